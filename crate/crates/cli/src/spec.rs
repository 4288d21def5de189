//! Experiment spec files and their resolution against presets and flags.

use std::fmt;
use std::path::{Path, PathBuf};

use cdl_core::config::SPEED_OF_LIGHT;
use cdl_core::eval::experiments::default_sparsity_grid;
use cdl_core::{Diagnostic, SystemConfig};
use serde::Deserialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Paper,
    Desk,
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Preset::Paper => "paper",
            Preset::Desk => "desk",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Experiment {
    Exp1SingleUeCompare,
    Exp2SubcarrierCompare,
    Exp3MultiUe,
    Exp4Ber,
    AccountingTables,
}

impl Experiment {
    pub fn multi_user(self) -> bool {
        self == Experiment::Exp3MultiUe
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Experiment::Exp1SingleUeCompare => "exp1_single_ue_compare",
            Experiment::Exp2SubcarrierCompare => "exp2_subcarrier_compare",
            Experiment::Exp3MultiUe => "exp3_multi_ue",
            Experiment::Exp4Ber => "exp4_ber",
            Experiment::AccountingTables => "accounting_tables",
        })
    }
}

/// `[system]` table: any subset of the scalar parameters.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemOverrides {
    pub tx_antennas: Option<usize>,
    pub rx_antennas: Option<usize>,
    pub subcarriers: Option<usize>,
    pub taps: Option<usize>,
    pub users: Option<usize>,
    pub sparsity: Option<usize>,
    pub measurement_rows: Option<usize>,
    pub carrier_freq: Option<f64>,
    pub bandwidth: Option<f64>,
    /// Meters.
    pub antenna_spacing: Option<f64>,
    /// In carrier wavelengths, e.g. `0.0666` for λ/15.
    pub antenna_spacing_wavelengths: Option<f64>,
    pub velocities_kmh: Option<Vec<f64>>,
    pub frame_interval: Option<f64>,
    pub training_frames: Option<usize>,
    pub test_vectors: Option<usize>,
    pub total_frames: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub sparsities: Option<Vec<usize>>,
    pub ksvd_max_iters: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BerSection {
    pub snr_db: Option<Vec<f64>>,
    pub min_bits: Option<u64>,
    pub target_errors: Option<u64>,
    pub compression_factors: Option<Vec<u64>>,
}

/// Contents of a spec file; every field is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub experiment: Option<Experiment>,
    pub preset: Option<Preset>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub system: SystemOverrides,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub ber: BerSection,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub path: PathBuf,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}: {}", self.path.display(), self.line, self.column, self.message)
    }
}

/// 1-based line and column of a byte offset.
fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

impl SpecFile {
    pub fn parse(text: &str, path: &Path) -> Result<Self, ParseError> {
        toml::from_str(text).map_err(|e| {
            let (line, column) = e.span().map_or((1, 1), |s| line_column(text, s.start));
            ParseError { path: path.to_path_buf(), line, column, message: e.message().trim().to_string() }
        })
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct FlagOverrides {
    pub experiment: Option<Experiment>,
    pub preset: Option<Preset>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

/// A spec after applying flags over file values over defaults.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub experiment: Option<Experiment>,
    pub preset: Preset,
    pub config: SystemConfig,
    pub out: PathBuf,
    pub sparsities: Vec<usize>,
    pub ksvd_max_iters: usize,
    pub snr_db: Vec<f64>,
    pub min_bits: u64,
    pub target_errors: Option<u64>,
    pub compression_factors: Vec<u64>,
    spacing_conflict: bool,
}

pub const DEFAULT_OUT: &str = "cdl-out";
pub const DEFAULT_SNR_DB: [f64; 6] = [-6.0, -3.0, 0.0, 3.0, 6.0, 9.0];
pub const DEFAULT_COMPRESSION_FACTORS: [u64; 2] = [2, 4];

pub fn preset_config(preset: Preset, multi_user: bool) -> SystemConfig {
    match (preset, multi_user) {
        (Preset::Paper, false) => SystemConfig::paper(),
        (Preset::Paper, true) => SystemConfig::paper_multi_user(),
        (Preset::Desk, false) => SystemConfig::desk(),
        (Preset::Desk, true) => SystemConfig::desk_multi_user(),
    }
}

pub fn resolve(file: &SpecFile, flags: &FlagOverrides) -> Resolved {
    let experiment = flags.experiment.or(file.experiment);
    let preset = flags.preset.or(file.preset).unwrap_or(Preset::Paper);
    let mut c = preset_config(preset, experiment.is_some_and(Experiment::multi_user));
    let s = &file.system;
    macro_rules! apply {
        ($($f:ident),*) => { $( if let Some(v) = s.$f.clone() { c.$f = v; } )* };
    }
    apply!(
        tx_antennas, rx_antennas, subcarriers, taps, users, sparsity, measurement_rows, carrier_freq, bandwidth,
        antenna_spacing, velocities_kmh, frame_interval, training_frames, test_vectors, total_frames
    );
    if let Some(w) = s.antenna_spacing_wavelengths {
        c.antenna_spacing = w * SPEED_OF_LIGHT / c.carrier_freq;
    }
    if (s.tx_antennas.is_some() || s.rx_antennas.is_some()) && s.measurement_rows.is_none() {
        c.measurement_rows = c.vector_len() / 2;
    }
    if let Some(seed) = flags.seed.or(file.seed) {
        c.rng_seed = seed;
    }
    Resolved {
        experiment,
        preset,
        out: flags.out.clone().or_else(|| file.out.clone()).unwrap_or_else(|| PathBuf::from(DEFAULT_OUT)),
        sparsities: file.sweep.sparsities.clone().unwrap_or_else(|| default_sparsity_grid(c.measurement_rows)),
        ksvd_max_iters: file.sweep.ksvd_max_iters.unwrap_or(50),
        snr_db: file.ber.snr_db.clone().unwrap_or_else(|| DEFAULT_SNR_DB.to_vec()),
        min_bits: file.ber.min_bits.unwrap_or(100_000),
        target_errors: file.ber.target_errors,
        compression_factors: file.ber.compression_factors.clone().unwrap_or_else(|| DEFAULT_COMPRESSION_FACTORS.to_vec()),
        spacing_conflict: s.antenna_spacing.is_some() && s.antenna_spacing_wavelengths.is_some(),
        config: c,
    }
}

impl Resolved {
    /// Config invariants followed by spec-level checks, in a fixed order.
    pub fn diagnostics(&self) -> Vec<Diagnostic> {
        let mut out = self.config.validate();
        let c = &self.config;
        if self.spacing_conflict {
            out.push(Diagnostic {
                code: "antenna_spacing",
                message: "set antenna_spacing or antenna_spacing_wavelengths, not both".into(),
            });
        }
        if self.experiment.is_none() {
            out.push(Diagnostic { code: "experiment", message: "no experiment named in the spec or on the command line".into() });
        }
        let n = c.vector_len();
        if self.sparsities.is_empty() {
            out.push(Diagnostic { code: "sweep_sparsity", message: "sweep sparsities are empty".into() });
        }
        for &s in &self.sparsities {
            if s == 0 || s > c.measurement_rows || s >= n {
                out.push(Diagnostic {
                    code: "sweep_sparsity",
                    message: format!("sweep sparsity {s} must satisfy 1 <= S <= N_g = {} and S < n = {n}", c.measurement_rows),
                });
            }
        }
        if self.ksvd_max_iters == 0 {
            out.push(Diagnostic { code: "ksvd_max_iters", message: "ksvd_max_iters must be positive".into() });
        }
        if self.experiment == Some(Experiment::Exp4Ber) {
            if c.users != 1 || c.rx_antennas != 1 {
                out.push(Diagnostic { code: "ber_single_link", message: "the BER experiment needs K = 1 and N_r = 1".into() });
            }
            for &g in &self.compression_factors {
                if g < 2 || n % g as usize != 0 || n / g as usize <= 1 {
                    out.push(Diagnostic {
                        code: "compression_factor",
                        message: format!("compression factor g = {g} must be >= 2, divide n = {n} and leave N_g >= 2"),
                    });
                }
            }
            if self.snr_db.is_empty() || self.snr_db.iter().any(|v| !v.is_finite()) {
                out.push(Diagnostic { code: "snr_grid", message: "SNR grid must be non-empty and finite".into() });
            }
            if self.min_bits == 0 {
                out.push(Diagnostic { code: "min_bits", message: "min_bits must be positive".into() });
            }
        }
        out
    }

    /// Flat `key=value` lines that reproduce this resolution.
    pub fn manifest_lines(&self) -> Vec<(String, String)> {
        let c = &self.config;
        let list = |v: &[String]| format!("[{}]", v.join(","));
        let nums = |v: &[f64]| list(&v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>());
        let ints = |v: &[u64]| list(&v.iter().map(u64::to_string).collect::<Vec<_>>());
        let mut lines = vec![
            ("experiment".into(), self.experiment.map_or("none".into(), |e| e.to_string())),
            ("preset".into(), self.preset.to_string()),
            ("seed".into(), c.rng_seed.to_string()),
            ("out".into(), self.out.display().to_string()),
        ];
        let sys: [(&str, String); 15] = [
            ("tx_antennas", c.tx_antennas.to_string()),
            ("rx_antennas", c.rx_antennas.to_string()),
            ("subcarriers", c.subcarriers.to_string()),
            ("taps", c.taps.to_string()),
            ("users", c.users.to_string()),
            ("sparsity", c.sparsity.to_string()),
            ("measurement_rows", c.measurement_rows.to_string()),
            ("carrier_freq", format!("{:?}", c.carrier_freq)),
            ("bandwidth", format!("{:?}", c.bandwidth)),
            ("antenna_spacing", format!("{:?}", c.antenna_spacing)),
            ("velocities_kmh", nums(&c.velocities_kmh)),
            ("frame_interval", format!("{:?}", c.frame_interval)),
            ("training_frames", c.training_frames.to_string()),
            ("test_vectors", c.test_vectors.to_string()),
            ("total_frames", c.total_frames.to_string()),
        ];
        lines.extend(sys.into_iter().map(|(k, v)| (format!("system.{k}"), v)));
        let sparsities: Vec<u64> = self.sparsities.iter().map(|&s| s as u64).collect();
        lines.push(("sweep.sparsities".into(), ints(&sparsities)));
        lines.push(("sweep.ksvd_max_iters".into(), self.ksvd_max_iters.to_string()));
        lines.push(("ber.snr_db".into(), nums(&self.snr_db)));
        lines.push(("ber.min_bits".into(), self.min_bits.to_string()));
        lines.push(("ber.target_errors".into(), self.target_errors.map_or("none".into(), |t| t.to_string())));
        lines.push(("ber.compression_factors".into(), ints(&self.compression_factors)));
        lines
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_column_counts_from_one() {
        assert_eq!(line_column("ab\ncd", 0), (1, 1));
        assert_eq!(line_column("ab\ncd", 4), (2, 2));
    }

    #[test]
    fn flags_beat_file_beat_defaults() {
        let file = SpecFile::parse("preset = \"desk\"\nseed = 4\n[system]\ntaps = 2\n", Path::new("s.toml")).unwrap();
        let r = resolve(&file, &FlagOverrides::default());
        assert_eq!((r.preset, r.config.rng_seed, r.config.taps), (Preset::Desk, 4, 2));
        assert_eq!(r.out, PathBuf::from(DEFAULT_OUT));
        let flags = FlagOverrides { preset: Some(Preset::Paper), seed: Some(9), ..Default::default() };
        let r = resolve(&file, &flags);
        assert_eq!((r.preset, r.config.rng_seed, r.config.taps, r.config.tx_antennas), (Preset::Paper, 9, 2, 64));
    }

    #[test]
    fn antenna_override_rescales_measurement_rows() {
        let file = SpecFile::parse("[system]\ntx_antennas = 32\n", Path::new("s.toml")).unwrap();
        let r = resolve(&file, &FlagOverrides::default());
        assert_eq!(r.config.measurement_rows, 16);
        let file = SpecFile::parse("[system]\ntx_antennas = 32\nmeasurement_rows = 10\n", Path::new("s.toml")).unwrap();
        assert_eq!(resolve(&file, &FlagOverrides::default()).config.measurement_rows, 10);
    }

    #[test]
    fn unknown_key_reports_position() {
        let e = SpecFile::parse("seed = 1\n[system]\n  tx_antenas = 3\n", Path::new("s.toml")).unwrap_err();
        assert_eq!((e.line, e.column), (3, 3));
        assert!(e.message.contains("tx_antenas"), "{}", e.message);
    }

    #[test]
    fn experiment_multi_user_preset() {
        let file = SpecFile::parse("experiment = \"exp3_multi_ue\"\npreset = \"desk\"\n", Path::new("s.toml")).unwrap();
        let r = resolve(&file, &FlagOverrides::default());
        assert_eq!(r.config.users, 3);
        assert!(r.diagnostics().is_empty());
    }
}

//! Closed-form memory, feedback and complexity accounting in exact integer
//! and rational arithmetic.

use std::fmt;
use std::io::Write;

use num_rational::Ratio;

use crate::config::SystemConfig;
use crate::error::{Error, Result};

/// Element counts are `u128` so paper-scale products never overflow.
pub type Count = u128;
pub type Rational = Ratio<u128>;

fn n_of(config: &SystemConfig) -> Count {
    config.vector_len() as Count
}

/// Dictionary entries saved by one common dictionary instead of per-subcarrier
/// ones: `K·(N_c − 1)·(N_r·N_t)²`.
pub fn memory_savings(config: &SystemConfig) -> Count {
    let n = n_of(config);
    config.users as Count * (config.subcarriers as Count).saturating_sub(1) * n * n
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DictionaryFeedback {
    /// `N_c·(N_r·N_t)²`.
    pub ksvd: Count,
    /// `(N_r·N_t)²`.
    pub common: Count,
    pub saved: Count,
    /// `Τ_com / Τ_ksvd = 1/N_c`.
    pub reduction: Rational,
}

/// Single-UE uplink dictionary payload with and without a common dictionary.
pub fn dictionary_feedback(config: &SystemConfig) -> Result<DictionaryFeedback> {
    if config.subcarriers == 0 || config.vector_len() == 0 {
        return Err(Error::param("dictionary feedback needs N_c >= 1 and N_r*N_t >= 1"));
    }
    let n = n_of(config);
    let common = n * n;
    let ksvd = config.subcarriers as Count * common;
    Ok(DictionaryFeedback { ksvd, common, saved: ksvd - common, reduction: Ratio::new(common, ksvd) })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CsiFeedback {
    /// `γ_u = N′·N_c·N_r·N_t`.
    pub uncompressed: Count,
    /// `γ_c = (N_r·N_t)² + N′·N_c·N_r·N_t / g`.
    pub compressed: Rational,
    /// `Γ = γ_c / γ_u`.
    pub ratio: Rational,
}

/// CSI feedback over `frames` frames at compression factor `g`.
pub fn csi_feedback_ratio(config: &SystemConfig, frames: u64, g: Rational) -> Result<CsiFeedback> {
    if frames == 0 || g < Ratio::from_integer(1) {
        return Err(Error::param(format!("need N' >= 1 and g >= 1, got N' = {frames} and g = {g}")));
    }
    if config.subcarriers == 0 || config.vector_len() == 0 {
        return Err(Error::param("CSI feedback needs N_c >= 1 and N_r*N_t >= 1"));
    }
    let n = n_of(config);
    let uncompressed = frames as Count * config.subcarriers as Count * n;
    let compressed = Ratio::from_integer(n * n) + Ratio::from_integer(uncompressed) / g;
    Ok(CsiFeedback { uncompressed, compressed, ratio: compressed / Ratio::from_integer(uncompressed) })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlopMethod {
    CdlOp,
    /// One atom update.
    CdlKsvdMin,
    /// All `n` atom updates.
    CdlKsvdMax,
}

impl FlopMethod {
    pub const ALL: [FlopMethod; 3] = [FlopMethod::CdlOp, FlopMethod::CdlKsvdMin, FlopMethod::CdlKsvdMax];
}

impl fmt::Display for FlopMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FlopMethod::CdlOp => "CDL-OP",
            FlopMethod::CdlKsvdMin => "CDL-KSVD (min)",
            FlopMethod::CdlKsvdMax => "CDL-KSVD (max)",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SvdVariant {
    /// Golub-Reinsch.
    GrSvd,
    /// Chan (R-SVD).
    ChanSvd,
}

impl SvdVariant {
    pub const ALL: [SvdVariant; 2] = [SvdVariant::GrSvd, SvdVariant::ChanSvd];
}

impl fmt::Display for SvdVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SvdVariant::GrSvd => "GR-SVD",
            SvdVariant::ChanSvd => "Chan-SVD",
        })
    }
}

/// FLOPs of learning the dictionary, `n = N_r·N_t`, `n_c_prime` nonzeros per
/// coefficient row.
pub fn flops_estimate(method: FlopMethod, variant: SvdVariant, n: u64, n_c_prime: u64) -> Count {
    let n = n as Count;
    let m = n_c_prime as Count;
    let single = match variant {
        SvdVariant::GrSvd => 14 * n * m * m + 9 * m * m * m,
        SvdVariant::ChanSvd => 6 * n * m * m + 20 * m * m * m,
    };
    match (method, variant) {
        (FlopMethod::CdlOp, SvdVariant::GrSvd) => 21 * n * n * n,
        (FlopMethod::CdlOp, SvdVariant::ChanSvd) => 26 * n * n * n,
        (FlopMethod::CdlKsvdMin, _) => single,
        (FlopMethod::CdlKsvdMax, _) => n * single,
    }
}

/// Exact round-half-up of `value` to `places` decimals.
pub fn format_decimal(value: Rational, places: u32) -> String {
    let scale = 10u128.pow(places);
    let scaled = value * Ratio::from_integer(scale);
    let rounded = (scaled + Ratio::new(1, 2)).floor().to_integer();
    let int = rounded / scale;
    if places == 0 {
        return int.to_string();
    }
    let frac = rounded % scale;
    let frac = format!("{:0width$}", frac, width = places as usize);
    let trimmed = frac.trim_end_matches('0');
    if trimmed.is_empty() {
        int.to_string()
    } else {
        format!("{int}.{trimmed}")
    }
}

/// Exact round-half-up of `value` to `digits` significant digits, written as
/// `m.mmm×10^e`-style `"m.mmme<e>"`.
pub fn format_scientific(value: Count, digits: u32) -> String {
    assert!(digits >= 1, "at least one significant digit");
    if value == 0 {
        return "0e0".to_string();
    }
    let len = value.to_string().len() as u32;
    let mut exp = len - 1;
    let mut mantissa = if len > digits {
        let div = 10u128.pow(len - digits);
        (value + div / 2) / div
    } else {
        value * 10u128.pow(digits - len)
    };
    if mantissa >= 10u128.pow(digits) {
        mantissa /= 10;
        exp += 1;
    }
    let m = mantissa.to_string();
    if digits == 1 {
        format!("{m}e{exp}")
    } else {
        format!("{}.{}e{exp}", &m[..1], &m[1..])
    }
}

/// One row of the dictionary-feedback table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DictionaryFeedbackRow {
    pub tx_antennas: usize,
    pub rx_antennas: usize,
    pub subcarriers: usize,
    pub feedback: DictionaryFeedback,
}

/// One row of the CSI feedback table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsiFeedbackRow {
    pub g: u64,
    pub subcarriers: usize,
    pub tx_antennas: usize,
    pub rx_antennas: usize,
    pub frames: u64,
    pub feedback: CsiFeedback,
}

/// One memory-savings example.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MemoryRow {
    pub users: usize,
    pub subcarriers: usize,
    pub tx_antennas: usize,
    pub rx_antennas: usize,
    pub saved: Count,
}

/// One row of the complexity table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlopRow {
    pub method: FlopMethod,
    pub gr_svd: Count,
    pub chan_svd: Count,
}

/// All three accounting tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AccountingReport {
    pub memory_savings: Vec<MemoryRow>,
    pub dictionary_feedback: Vec<DictionaryFeedbackRow>,
    pub csi_feedback: Vec<CsiFeedbackRow>,
    pub flops: Vec<FlopRow>,
    pub flop_n: u64,
    pub flop_training_columns: u64,
    pub flop_n_c_prime: u64,
}

fn with_dims(tx: usize, rx: usize, subcarriers: usize, users: usize) -> SystemConfig {
    let mut c = SystemConfig::paper();
    c.tx_antennas = tx;
    c.rx_antennas = rx;
    c.subcarriers = subcarriers;
    c.users = users;
    c
}

/// Reference operating points: `N_t = 64`; `N_c ∈ {4, 32}` for dictionary
/// feedback; `N′ = 2¹⁰` and `(g, N_c, N_r) ∈ {2,4}×{(32,1),(64,2)}` for CSI
/// feedback; `M′ = 1600`, `N_c′ = M′/4` for complexity.
pub fn paper_tables() -> AccountingReport {
    let memory_savings = [(1, 32), (3, 32)]
        .into_iter()
        .map(|(k, nc)| MemoryRow {
            users: k,
            subcarriers: nc,
            tx_antennas: 64,
            rx_antennas: 1,
            saved: memory_savings(&with_dims(64, 1, nc, k)),
        })
        .collect();
    let dictionary_feedback = [4, 32]
        .into_iter()
        .map(|nc| DictionaryFeedbackRow {
            tx_antennas: 64,
            rx_antennas: 1,
            subcarriers: nc,
            feedback: dictionary_feedback(&with_dims(64, 1, nc, 1)).expect("valid dimensions"),
        })
        .collect();
    let frames = 1u64 << 10;
    let mut csi_feedback = Vec::new();
    for g in [2u64, 4] {
        for (nc, nr) in [(32, 1), (64, 2)] {
            csi_feedback.push(CsiFeedbackRow {
                g,
                subcarriers: nc,
                tx_antennas: 64,
                rx_antennas: nr,
                frames,
                feedback: csi_feedback_ratio(&with_dims(64, nr, nc, 1), frames, Ratio::from_integer(g as u128))
                    .expect("valid dimensions"),
            });
        }
    }
    let (n, m_prime) = (64u64, 1600u64);
    let n_c_prime = m_prime / 4;
    let flops = FlopMethod::ALL
        .into_iter()
        .map(|method| FlopRow {
            method,
            gr_svd: flops_estimate(method, SvdVariant::GrSvd, n, n_c_prime),
            chan_svd: flops_estimate(method, SvdVariant::ChanSvd, n, n_c_prime),
        })
        .collect();
    AccountingReport {
        memory_savings,
        dictionary_feedback,
        csi_feedback,
        flops,
        flop_n: n,
        flop_training_columns: m_prime,
        flop_n_c_prime: n_c_prime,
    }
}

fn ratio_string(r: Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

impl AccountingReport {
    pub fn write_flops_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "method,n,m_prime,n_c_prime,gr_svd,chan_svd,gr_svd_sci,chan_svd_sci")?;
        for r in &self.flops {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{}",
                r.method,
                self.flop_n,
                self.flop_training_columns,
                self.flop_n_c_prime,
                r.gr_svd,
                r.chan_svd,
                format_scientific(r.gr_svd, 5),
                format_scientific(r.chan_svd, 5)
            )?;
        }
        Ok(())
    }

    pub fn write_dictionary_feedback_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "n_t,n_r,n_c,t_ksvd,t_com,t_saved,upsilon")?;
        for r in &self.dictionary_feedback {
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                r.tx_antennas,
                r.rx_antennas,
                r.subcarriers,
                r.feedback.ksvd,
                r.feedback.common,
                r.feedback.saved,
                ratio_string(r.feedback.reduction)
            )?;
        }
        Ok(())
    }

    pub fn write_csi_feedback_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "g,n_c,n_t,n_r,n_prime,gamma_u,gamma_c,gamma_ratio,gamma_ratio_decimal")?;
        for r in &self.csi_feedback {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{}",
                r.g,
                r.subcarriers,
                r.tx_antennas,
                r.rx_antennas,
                r.frames,
                r.feedback.uncompressed,
                ratio_string(r.feedback.compressed),
                ratio_string(r.feedback.ratio),
                format_decimal(r.feedback.ratio, 6)
            )?;
        }
        Ok(())
    }

    pub fn write_memory_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "k,n_c,n_t,n_r,delta_saved")?;
        for r in &self.memory_savings {
            writeln!(w, "{},{},{},{},{}", r.users, r.subcarriers, r.tx_antennas, r.rx_antennas, r.saved)?;
        }
        Ok(())
    }
}

impl fmt::Display for AccountingReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Computational complexity in FLOPS (n = {}, M' = {}, N_c' = {})", self.flop_n, self.flop_training_columns, self.flop_n_c_prime)?;
        writeln!(f, "{:<16} {:>14} {:>14}", "Method", "GR-SVD", "Chan-SVD")?;
        for r in &self.flops {
            writeln!(
                f,
                "{:<16} {:>14} {:>14}",
                r.method.to_string(),
                format_scientific(r.gr_svd, 5),
                format_scientific(r.chan_svd, 5)
            )?;
        }
        writeln!(f)?;
        writeln!(f, "Dictionary feedback reduction (single UE)")?;
        writeln!(f, "{:>4} {:>4} {:>4} {:>10} {:>8} {:>8}", "N_t", "N_r", "N_c", "T_ksvd", "T_com", "Upsilon")?;
        for r in &self.dictionary_feedback {
            writeln!(
                f,
                "{:>4} {:>4} {:>4} {:>10} {:>8} {:>8}",
                r.tx_antennas,
                r.rx_antennas,
                r.subcarriers,
                r.feedback.ksvd,
                r.feedback.common,
                ratio_string(r.feedback.reduction)
            )?;
        }
        writeln!(f)?;
        writeln!(f, "CSI feedback ratio")?;
        writeln!(f, "{:>3} {:>4} {:>4} {:>4} {:>6} {:>10} {:>9}", "g", "N_c", "N_t", "N_r", "N'", "Gamma", "(exact)")?;
        for r in &self.csi_feedback {
            writeln!(
                f,
                "{:>3} {:>4} {:>4} {:>4} {:>6} {:>10} {:>9}",
                r.g,
                r.subcarriers,
                r.tx_antennas,
                r.rx_antennas,
                r.frames,
                format_decimal(r.feedback.ratio, 3),
                ratio_string(r.feedback.ratio)
            )?;
        }
        writeln!(f)?;
        writeln!(f, "Memory savings")?;
        for r in &self.memory_savings {
            writeln!(f, "K = {}, N_c = {}, N_t = {}, N_r = {}: {}", r.users, r.subcarriers, r.tx_antennas, r.rx_antennas, r.saved)?;
        }
        Ok(())
    }
}

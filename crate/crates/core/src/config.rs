//! Scalar system parameters and their validation.

use std::fmt;

use num_rational::Ratio;

use crate::error::{Error, Result};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// All scalar parameters of a simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    /// BS transmit antennas `N_t`.
    pub tx_antennas: usize,
    /// UE receive antennas `N_r`.
    pub rx_antennas: usize,
    /// OFDM subcarriers `N_c`.
    pub subcarriers: usize,
    /// Time-domain taps `L`.
    pub taps: usize,
    /// Users `K`.
    pub users: usize,
    /// Operating sparsity `S`.
    pub sparsity: usize,
    /// Rows `N_g` of the measurement matrix.
    pub measurement_rows: usize,
    /// Carrier frequency in Hz.
    pub carrier_freq: f64,
    /// Bandwidth in Hz.
    pub bandwidth: f64,
    /// ULA element spacing in meters, shared by BS and UE arrays.
    pub antenna_spacing: f64,
    /// One speed per user, km/h.
    pub velocities_kmh: Vec<f64>,
    /// Channel update interval in seconds.
    pub frame_interval: f64,
    /// Training frames `N` per learning phase.
    pub training_frames: usize,
    /// Test vectors `P` per subcarrier.
    pub test_vectors: usize,
    /// Total frames `N′`.
    pub total_frames: usize,
    pub rng_seed: u64,
}

impl SystemConfig {
    /// Full-size single-user setting: 64 BS antennas, 32 subcarriers,
    /// 2 GHz carrier, λ/15 spacing, half-rate compression.
    pub fn paper() -> Self {
        let carrier_freq = 2e9;
        SystemConfig {
            tx_antennas: 64,
            rx_antennas: 1,
            subcarriers: 32,
            taps: 8,
            users: 1,
            sparsity: 8,
            measurement_rows: 32,
            carrier_freq,
            bandwidth: 20e6,
            antenna_spacing: SPEED_OF_LIGHT / carrier_freq / 15.0,
            velocities_kmh: vec![20.0],
            frame_interval: 10e-3,
            training_frames: 50,
            test_vectors: 500,
            total_frames: 1024,
            rng_seed: 1,
        }
    }

    /// Full-size three-user setting (10, 15 and 20 km/h).
    pub fn paper_multi_user() -> Self {
        SystemConfig { users: 3, velocities_kmh: vec![10.0, 15.0, 20.0], ..Self::paper() }
    }

    /// Scaled-down setting that runs in seconds.
    pub fn desk() -> Self {
        SystemConfig {
            tx_antennas: 16,
            subcarriers: 8,
            taps: 4,
            sparsity: 3,
            measurement_rows: 8,
            training_frames: 20,
            test_vectors: 100,
            total_frames: 150,
            ..Self::paper()
        }
    }

    pub fn desk_multi_user() -> Self {
        SystemConfig { users: 3, velocities_kmh: vec![10.0, 15.0, 20.0], ..Self::desk() }
    }

    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier_freq
    }

    /// Channel-vector length `N_r·N_t`.
    pub fn vector_len(&self) -> usize {
        self.rx_antennas * self.tx_antennas
    }

    /// `g = N_r·N_t / N_g`.
    pub fn compression_factor(&self) -> Result<Ratio<u64>> {
        if self.measurement_rows == 0 {
            return Err(Error::param("measurement_rows must be positive"));
        }
        Ok(Ratio::new(self.vector_len() as u64, self.measurement_rows as u64))
    }

    /// Maximum Doppler shift of user `k` in Hz.
    pub fn doppler_hz(&self, user: usize) -> f64 {
        let v = self.velocities_kmh.get(user).copied().unwrap_or(0.0) / 3.6;
        v * self.carrier_freq / SPEED_OF_LIGHT
    }

    /// Every violated invariant, in a fixed order.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let mut push = |code: &'static str, message: String| out.push(Diagnostic { code, message });
        for (name, value) in [
            ("tx_antennas", self.tx_antennas),
            ("rx_antennas", self.rx_antennas),
            ("subcarriers", self.subcarriers),
            ("taps", self.taps),
            ("users", self.users),
            ("sparsity", self.sparsity),
            ("measurement_rows", self.measurement_rows),
            ("training_frames", self.training_frames),
            ("test_vectors", self.test_vectors),
            ("total_frames", self.total_frames),
        ] {
            if value == 0 {
                push("positive", format!("{name} must be a positive integer"));
            }
        }
        if self.taps > self.subcarriers {
            push("taps_le_subcarriers", format!("taps L = {} exceeds subcarriers N_c = {}", self.taps, self.subcarriers));
        }
        let n = self.vector_len();
        if self.measurement_rows >= n && n > 0 {
            push(
                "compression",
                format!("measurement_rows N_g = {} must be below N_r*N_t = {}", self.measurement_rows, n),
            );
        }
        if self.measurement_rows <= 2 * self.sparsity {
            push(
                "recovery_bound",
                format!(
                    "sparse recovery requires N_g > 2S, got N_g = {} and S = {}",
                    self.measurement_rows, self.sparsity
                ),
            );
        }
        if self.velocities_kmh.len() != self.users {
            push(
                "velocities",
                format!("{} velocities given for {} users", self.velocities_kmh.len(), self.users),
            );
        }
        if self.velocities_kmh.iter().any(|v| !v.is_finite() || *v < 0.0) {
            push("velocities", "velocities must be finite and nonnegative".to_string());
        }
        if !(self.carrier_freq.is_finite() && self.carrier_freq > 0.0) {
            push("carrier_freq", "carrier frequency must be positive".to_string());
        }
        if !(self.bandwidth.is_finite() && self.bandwidth > 0.0) {
            push("bandwidth", "bandwidth must be positive".to_string());
        }
        if !(self.antenna_spacing.is_finite() && self.antenna_spacing >= 0.0) {
            push("antenna_spacing", "antenna spacing must be nonnegative".to_string());
        }
        if !(self.frame_interval.is_finite() && self.frame_interval > 0.0) {
            push("frame_interval", "frame interval must be positive".to_string());
        }
        if self.total_frames <= 2 * self.training_frames {
            push(
                "frame_budget",
                format!(
                    "total_frames N' = {} must exceed 2N = {}",
                    self.total_frames,
                    2 * self.training_frames
                ),
            );
        }
        out
    }

    /// `Ok` when [`validate`](Self::validate) reports nothing.
    pub fn check(&self) -> Result<()> {
        let diags = self.validate();
        if diags.is_empty() {
            Ok(())
        } else {
            Err(Error::Parameter(
                diags.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; "),
            ))
        }
    }
}

impl Default for SystemConfig {
    fn default() -> Self {
        Self::paper()
    }
}

/// One violated configuration invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    /// Stable machine-readable name of the invariant.
    pub code: &'static str,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}", self.code, self.message)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_are_valid() {
        for cfg in [
            SystemConfig::paper(),
            SystemConfig::paper_multi_user(),
            SystemConfig::desk(),
            SystemConfig::desk_multi_user(),
        ] {
            assert_eq!(cfg.validate(), vec![], "{cfg:?}");
        }
    }

    #[test]
    fn compression_factor_is_exact() {
        let cfg = SystemConfig::paper();
        assert_eq!(cfg.compression_factor().unwrap(), Ratio::new(2, 1));
        let cfg = SystemConfig { measurement_rows: 24, ..SystemConfig::paper() };
        assert_eq!(cfg.compression_factor().unwrap(), Ratio::new(8, 3));
    }

    #[test]
    fn recovery_bound_is_strict() {
        let cfg = SystemConfig { sparsity: 4, ..SystemConfig::desk() };
        let d = cfg.validate();
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].code, "recovery_bound");
        assert!(d[0].message.contains("N_g > 2S"));
    }

    #[test]
    fn taps_above_subcarriers_is_one_diagnostic() {
        let cfg = SystemConfig { taps: 9, ..SystemConfig::desk() };
        let d = cfg.validate();
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].code, "taps_le_subcarriers");
    }

    #[test]
    fn two_violations_are_ordered() {
        let cfg = SystemConfig { taps: 9, sparsity: 5, ..SystemConfig::desk() };
        let codes: Vec<_> = cfg.validate().iter().map(|d| d.code).collect();
        assert_eq!(codes, vec!["taps_le_subcarriers", "recovery_bound"]);
        assert_eq!(cfg.validate(), cfg.validate());
    }

    #[test]
    fn doppler_at_twenty_kmh() {
        let cfg = SystemConfig::paper();
        // 20 km/h at 2 GHz
        let want = 20.0 / 3.6 * 2e9 / SPEED_OF_LIGHT;
        assert!((cfg.doppler_hz(0) - want).abs() < 1e-12);
        assert!((cfg.doppler_hz(0) - 37.06).abs() < 0.01);
    }
}

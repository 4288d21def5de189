//! Spatially correlated, temporally evolving wideband MIMO-OFDM channels.
//!
//! Taps follow a Kronecker model with Jakes (Bessel-J0) correlation at both
//! ends of a uniform linear array. Frames evolve as a first-order
//! Gauss-Markov process whose coefficient is the Clarke autocorrelation at
//! the frame interval.

use std::io::{Read, Write};

use num_complex::Complex;
use rand::Rng;

use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::linalg::psd_sqrt;
use crate::rng::{complex_normal, stream, SimRng};
use crate::scalar::{cis, CMatrix, CVector, Real};

/// Zeroth-order Bessel function of the first kind.
///
/// Evaluated from Bessel's integral `J0(x) = (1/π)∫₀^π cos(x·sinθ) dθ` with
/// the midpoint rule; the integrand is π-periodic and analytic so the rule
/// converges geometrically once the node count exceeds `|x|/2`.
pub fn bessel_j0<T: Real>(x: T) -> T {
    let ax = x.abs().as_f64();
    let nodes = 24 + ax.ceil() as usize;
    let h = T::pi() / T::lit(nodes as f64);
    let mut acc = T::zero();
    for k in 0..nodes {
        let theta = h * (T::lit(k as f64) + T::lit(0.5));
        acc += (x * theta.sin()).cos();
    }
    acc / T::lit(nodes as f64)
}

/// Jakes correlation of a ULA: `r_uv = J0(2π·|u−v|·spacing/λ)`.
pub fn jakes_correlation<T: Real>(count: usize, spacing: f64, wavelength: f64) -> Result<CMatrix<T>> {
    if !(wavelength.is_finite() && wavelength > 0.0) {
        return Err(Error::param(format!("wavelength must be positive, got {wavelength}")));
    }
    if !(spacing.is_finite() && spacing >= 0.0) {
        return Err(Error::param(format!("antenna spacing must be nonnegative, got {spacing}")));
    }
    if count == 0 {
        return Err(Error::param("antenna count must be at least 1"));
    }
    let lags: Vec<T> = (0..count)
        .map(|lag| bessel_j0(T::two_pi() * T::lit(lag as f64 * spacing / wavelength)))
        .collect();
    Ok(CMatrix::from_fn(count, count, |u, v| Complex::new(lags[u.abs_diff(v)], T::zero())))
}

/// BS and per-user UE correlation matrices with their principal square roots.
#[derive(Debug, Clone)]
pub struct CorrelationModel<T: Real> {
    pub bs: CMatrix<T>,
    pub bs_sqrt: CMatrix<T>,
    pub ue: Vec<CMatrix<T>>,
    pub ue_sqrt: Vec<CMatrix<T>>,
}

impl<T: Real> CorrelationModel<T> {
    pub fn new(bs: CMatrix<T>, ue: Vec<CMatrix<T>>) -> Result<Self> {
        let bs_sqrt = psd_sqrt(&bs)?;
        let ue_sqrt = ue.iter().map(psd_sqrt).collect::<Result<Vec<_>>>()?;
        Ok(CorrelationModel { bs, bs_sqrt, ue, ue_sqrt })
    }

    /// Jakes matrices at both ends, one (identical) UE matrix per user.
    pub fn jakes(config: &SystemConfig) -> Result<Self> {
        let lambda = config.wavelength();
        let bs = jakes_correlation(config.tx_antennas, config.antenna_spacing, lambda)?;
        let ue = jakes_correlation(config.rx_antennas, config.antenna_spacing, lambda)?;
        Self::new(bs, vec![ue; config.users.max(1)])
    }

    /// Uncorrelated antennas.
    pub fn identity(tx: usize, rx: usize, users: usize) -> Result<Self> {
        Self::new(CMatrix::identity(tx, tx), vec![CMatrix::identity(rx, rx); users.max(1)])
    }

    pub fn tx_antennas(&self) -> usize {
        self.bs.nrows()
    }

    pub fn rx_antennas(&self, user: usize) -> usize {
        self.ue[user].nrows()
    }
}

/// `L` independent taps `H̄_i = R_UE^½·H̆_i·R_BS^½ / √tr(R_UE)` for `user`.
pub fn draw_correlated_taps<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    corr: &CorrelationModel<T>,
    user: usize,
    taps: usize,
) -> Result<Vec<CMatrix<T>>> {
    let ue_sqrt = corr
        .ue_sqrt
        .get(user)
        .ok_or_else(|| Error::param(format!("no UE correlation for user {user}")))?;
    let trace: T = corr.ue[user].diagonal().iter().map(|z| z.re).fold(T::zero(), |a, b| a + b);
    if trace <= T::zero() {
        return Err(Error::param("UE correlation matrix has non-positive trace"));
    }
    let norm = T::one() / trace.sqrt();
    let (nr, nt) = (ue_sqrt.nrows(), corr.bs_sqrt.nrows());
    Ok((0..taps)
        .map(|_| {
            let iid = CMatrix::<T>::from_fn(nr, nt, |_, _| complex_normal(rng));
            (ue_sqrt * iid * &corr.bs_sqrt).scale(norm)
        })
        .collect())
}

/// Per-subcarrier channel `H_l = Σ_i H̄_i·exp(−j2π·i·l/N_c)`, `l = 0..N_c`.
///
/// Subcarrier `l` here is the `(l+1)`-th subcarrier in one-based numbering.
pub fn taps_to_fdchtf<T: Real>(taps: &[CMatrix<T>], subcarriers: usize) -> Result<Vec<CMatrix<T>>> {
    if taps.is_empty() {
        return Err(Error::param("at least one tap is required"));
    }
    if taps.len() > subcarriers {
        return Err(Error::param(format!(
            "taps L = {} exceed subcarriers N_c = {}",
            taps.len(),
            subcarriers
        )));
    }
    let shape = taps[0].shape();
    if taps.iter().any(|t| t.shape() != shape) {
        return Err(Error::shape("taps must share one shape"));
    }
    let nc = T::lit(subcarriers as f64);
    Ok((0..subcarriers)
        .map(|l| {
            let mut acc = CMatrix::<T>::zeros(shape.0, shape.1);
            for (i, tap) in taps.iter().enumerate() {
                // reduce i·l mod N_c first so the phase stays accurate
                let k = (i * l) % subcarriers;
                let w = cis(-T::two_pi() * T::lit(k as f64) / nc);
                acc += tap * w;
            }
            acc
        })
        .collect())
}

/// Clarke/Jakes frame-to-frame correlation `J0(2π·f_d·τ)`.
pub fn temporal_correlation(doppler_hz: f64, frame_interval: f64) -> f64 {
    bessel_j0(std::f64::consts::TAU * doppler_hz * frame_interval)
}

/// One Gauss-Markov step: `H̄(n+1) = ρ·H̄(n) + √(1−ρ²)·fresh`.
pub fn evolve_frame<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    taps: &[CMatrix<T>],
    rho: f64,
    corr: &CorrelationModel<T>,
    user: usize,
) -> Result<Vec<CMatrix<T>>> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::param(format!("temporal correlation must lie in [0, 1], got {rho}")));
    }
    if rho == 1.0 {
        return Ok(taps.to_vec());
    }
    let fresh = draw_correlated_taps(rng, corr, user, taps.len())?;
    if rho == 0.0 {
        return Ok(fresh);
    }
    let a = T::lit(rho);
    let b = T::lit((1.0 - rho * rho).sqrt());
    Ok(taps.iter().zip(fresh).map(|(old, new)| old.scale(a) + new.scale(b)).collect())
}

/// Column-stacking `vec(·)`.
pub fn vectorize<T: Real>(h: &CMatrix<T>) -> CVector<T> {
    CVector::from_iterator(h.len(), h.iter().copied())
}

/// Inverse of [`vectorize`].
pub fn devectorize<T: Real>(v: &CVector<T>, rows: usize, cols: usize) -> Result<CMatrix<T>> {
    if v.len() != rows * cols {
        return Err(Error::shape(format!(
            "cannot reshape a vector of length {} into {}x{}",
            v.len(),
            rows,
            cols
        )));
    }
    Ok(CMatrix::from_column_slice(rows, cols, v.as_slice()))
}

/// One user's channel in one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization<T: Real> {
    /// One-based frame index.
    pub frame: usize,
    pub user: usize,
    pub taps: Vec<CMatrix<T>>,
    pub fdchtf: Vec<CMatrix<T>>,
    /// `vec(H_l)` per subcarrier.
    pub vectors: Vec<CVector<T>>,
}

impl<T: Real> ChannelRealization<T> {
    pub fn from_taps(frame: usize, user: usize, taps: Vec<CMatrix<T>>, subcarriers: usize) -> Result<Self> {
        let fdchtf = taps_to_fdchtf(&taps, subcarriers)?;
        let vectors = fdchtf.iter().map(vectorize).collect();
        Ok(ChannelRealization { frame, user, taps, fdchtf, vectors })
    }

    /// `H_k = [H_1, …, H_{N_c}]`, `N_r × N_c·N_t`.
    pub fn stacked(&self) -> CMatrix<T> {
        let (nr, nt) = self.fdchtf[0].shape();
        let mut out = CMatrix::zeros(nr, nt * self.fdchtf.len());
        for (l, h) in self.fdchtf.iter().enumerate() {
            out.view_mut((0, l * nt), (nr, nt)).copy_from(h);
        }
        out
    }
}

/// Anything that can hand out successive frames for all users.
pub trait ChannelSource<T: Real> {
    fn users(&self) -> usize;
    fn subcarriers(&self) -> usize;
    /// Realizations of the next frame, one per user, in user order.
    fn next_frame(&mut self) -> Result<Vec<ChannelRealization<T>>>;
}

/// Kronecker/Jakes channels evolving per user with their own Doppler.
#[derive(Debug, Clone)]
pub struct KroneckerChannel<T: Real> {
    corr: CorrelationModel<T>,
    subcarriers: usize,
    tap_count: usize,
    rho: Vec<f64>,
    taps: Vec<Vec<CMatrix<T>>>,
    rngs: Vec<SimRng>,
    frame: usize,
}

impl<T: Real> KroneckerChannel<T> {
    /// Each user draws from its own stream of `config.rng_seed`.
    pub fn new(config: &SystemConfig, corr: CorrelationModel<T>) -> Result<Self> {
        if config.taps == 0 || config.taps > config.subcarriers {
            return Err(Error::param(format!(
                "need 1 <= L <= N_c, got L = {} and N_c = {}",
                config.taps, config.subcarriers
            )));
        }
        if corr.ue.len() < config.users || config.velocities_kmh.len() < config.users {
            return Err(Error::param("correlation model or velocity list covers fewer users than the config"));
        }
        let rho = (0..config.users)
            .map(|k| temporal_correlation(config.doppler_hz(k), config.frame_interval).clamp(0.0, 1.0))
            .collect();
        let rngs = (0..config.users)
            .map(|k| stream(config.rng_seed, "channel", &[k as u64]))
            .collect();
        Ok(KroneckerChannel {
            corr,
            subcarriers: config.subcarriers,
            tap_count: config.taps,
            rho,
            taps: vec![Vec::new(); config.users],
            rngs,
            frame: 0,
        })
    }

    /// Jakes correlation built from `config`.
    pub fn from_config(config: &SystemConfig) -> Result<Self> {
        Self::new(config, CorrelationModel::jakes(config)?)
    }

    pub fn correlation(&self) -> &CorrelationModel<T> {
        &self.corr
    }

    /// Frame-to-frame coefficient of `user`.
    pub fn rho(&self, user: usize) -> f64 {
        self.rho[user]
    }

    /// Pull `count` frames and return them as `[frame][user]`.
    pub fn take_frames(&mut self, count: usize) -> Result<Vec<Vec<ChannelRealization<T>>>> {
        (0..count).map(|_| self.next_frame()).collect()
    }
}

impl<T: Real> ChannelSource<T> for KroneckerChannel<T> {
    fn users(&self) -> usize {
        self.taps.len()
    }

    fn subcarriers(&self) -> usize {
        self.subcarriers
    }

    fn next_frame(&mut self) -> Result<Vec<ChannelRealization<T>>> {
        self.frame += 1;
        let mut out = Vec::with_capacity(self.taps.len());
        for user in 0..self.taps.len() {
            let rng = &mut self.rngs[user];
            let next = if self.taps[user].is_empty() {
                draw_correlated_taps(rng, &self.corr, user, self.tap_count)?
            } else {
                evolve_frame(rng, &self.taps[user], self.rho[user], &self.corr, user)?
            };
            self.taps[user] = next.clone();
            out.push(ChannelRealization::from_taps(self.frame, user, next, self.subcarriers)?);
        }
        Ok(out)
    }
}

const DUMP_MAGIC: &[u8; 8] = b"CDLCHAN1";

/// Writes the stacked channel `H_k` of one realization.
///
/// Layout: 8-byte magic, then `frame`, `user`, `rows`, `cols` as
/// little-endian `u64`, then the matrix column-major as `(re, im)` pairs of
/// little-endian `f64`.
pub fn write_dump<T: Real, W: Write>(w: &mut W, real: &ChannelRealization<T>) -> Result<()> {
    let h = real.stacked();
    w.write_all(DUMP_MAGIC)?;
    for v in [real.frame, real.user, h.nrows(), h.ncols()] {
        w.write_all(&(v as u64).to_le_bytes())?;
    }
    for z in h.iter() {
        w.write_all(&z.re.as_f64().to_le_bytes())?;
        w.write_all(&z.im.as_f64().to_le_bytes())?;
    }
    Ok(())
}

/// Reads one record written by [`write_dump`]: `(frame, user, H_k)`.
pub fn read_dump<R: Read>(r: &mut R) -> Result<(usize, usize, CMatrix<f64>)> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != DUMP_MAGIC {
        return Err(Error::Format("not a channel dump".into()));
    }
    let mut word = [0u8; 8];
    let mut header = [0usize; 4];
    for slot in header.iter_mut() {
        r.read_exact(&mut word)?;
        *slot = u64::from_le_bytes(word) as usize;
    }
    let [frame, user, rows, cols] = header;
    let mut data = Vec::with_capacity(rows * cols);
    for _ in 0..rows * cols {
        r.read_exact(&mut word)?;
        let re = f64::from_le_bytes(word);
        r.read_exact(&mut word)?;
        let im = f64::from_le_bytes(word);
        data.push(Complex::new(re, im));
    }
    Ok((frame, user, CMatrix::from_vec(rows, cols, data)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::SPEED_OF_LIGHT;
    use proptest::prelude::*;

    /// Power series `Σ (−x²/4)^m / (m!)²`, independent of the integral route.
    fn j0_series(x: f64) -> f64 {
        let q = -x * x / 4.0;
        let mut term = 1.0;
        let mut sum = 1.0;
        for m in 1..200 {
            term *= q / (m as f64 * m as f64);
            sum += term;
            if term.abs() < 1e-18 {
                break;
            }
        }
        sum
    }

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn j0_matches_power_series() {
        for &x in &[0.0, 0.1, 2.0 * std::f64::consts::PI / 15.0, 1.0, 2.3286, 2.404825557695773, 5.0, 8.0, 12.0] {
            let got: f64 = bessel_j0(x);
            assert!((got - j0_series(x)).abs() < 1e-12, "x = {x}: {got} vs {}", j0_series(x));
        }
        // first zero
        assert!(bessel_j0(2.404825557695773_f64).abs() < 1e-12);
        assert!((bessel_j0(0.0_f32) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn jakes_single_antenna() {
        let r: CMatrix<f64> = jakes_correlation(1, 0.01, 0.15).unwrap();
        assert_eq!(r, CMatrix::from_element(1, 1, c(1.0, 0.0)));
    }

    #[test]
    fn jakes_two_antennas_at_lambda_over_15() {
        let lambda = 0.15;
        let r: CMatrix<f64> = jakes_correlation(2, lambda / 15.0, lambda).unwrap();
        let want = j0_series(2.0 * std::f64::consts::PI / 15.0);
        assert!((r[(0, 1)].re - want).abs() < 1e-12);
        assert!((want - 0.956614).abs() < 1e-6);
        assert_eq!(r[(0, 1)], r[(1, 0)]);
    }

    #[test]
    fn jakes_three_antennas_is_toeplitz() {
        let (d, lambda) = (0.037, 0.15);
        let r: CMatrix<f64> = jakes_correlation(3, d, lambda).unwrap();
        assert_eq!(r[(0, 1)], r[(1, 2)]);
        let want = j0_series(2.0 * 2.0 * std::f64::consts::PI * d / lambda);
        assert!((r[(0, 2)].re - want).abs() < 1e-12);
        for i in 0..3 {
            assert_eq!(r[(i, i)], c(1.0, 0.0));
        }
    }

    #[test]
    fn jakes_rejects_bad_wavelength() {
        assert!(jakes_correlation::<f64>(2, 0.01, 0.0).is_err());
        assert!(jakes_correlation::<f64>(2, 0.01, -1.0).is_err());
    }

    #[test]
    fn identity_correlation_single_rx_is_unnormalized() {
        let corr = CorrelationModel::<f64>::identity(3, 1, 1).unwrap();
        let mut a = stream(9, "t", &[]);
        let mut b = stream(9, "t", &[]);
        let taps = draw_correlated_taps(&mut a, &corr, 0, 2).unwrap();
        for tap in taps {
            let raw = CMatrix::<f64>::from_fn(1, 3, |_, _| complex_normal(&mut b));
            assert!((tap - raw).norm() < 1e-15);
        }
    }

    #[test]
    fn two_rx_identity_halves_entry_variance() {
        let corr = CorrelationModel::<f64>::identity(2, 2, 1).unwrap();
        let mut rng = stream(10, "var", &[]);
        let mut acc = 0.0;
        let draws = 5000;
        for _ in 0..draws {
            let t = &draw_correlated_taps(&mut rng, &corr, 0, 1).unwrap()[0];
            acc += t.norm_squared() / 4.0;
        }
        let var = acc / draws as f64;
        assert!((var - 0.5).abs() < 0.025, "{var}");
    }

    #[test]
    fn empirical_bs_covariance_matches_jakes() {
        let lambda = 0.15;
        let bs: CMatrix<f64> = jakes_correlation(4, lambda / 15.0, lambda).unwrap();
        let corr = CorrelationModel::new(bs.clone(), vec![CMatrix::identity(1, 1)]).unwrap();
        let mut rng = stream(11, "cov", &[]);
        let mut cov = CMatrix::<f64>::zeros(4, 4);
        let draws = 10_000;
        for _ in 0..draws {
            let t = &draw_correlated_taps(&mut rng, &corr, 0, 1).unwrap()[0];
            // row vector h; E[hᴴh] = R_BSᴴ·... = R_BS for real symmetric R
            cov += t.adjoint() * t;
        }
        cov.unscale_mut(draws as f64);
        let rel = (cov - &bs).norm() / bs.norm();
        assert!(rel < 0.05, "relative covariance error {rel}");
    }

    #[test]
    fn identity_tap_energy_matches_dimensions() {
        // R_UE = R_BS = I: E‖H̄‖² = N_r·N_t / tr(R_UE) · N_r... = N_t for any N_r
        let corr = CorrelationModel::<f64>::identity(4, 2, 1).unwrap();
        let mut rng = stream(12, "energy", &[]);
        let draws = 10_000;
        let mean: f64 = (0..draws)
            .map(|_| draw_correlated_taps(&mut rng, &corr, 0, 1).unwrap()[0].norm_squared())
            .sum::<f64>()
            / draws as f64;
        assert!((mean - 4.0).abs() / 4.0 < 0.05, "{mean}");
    }

    #[test]
    fn single_tap_is_frequency_flat() {
        let mut rng = stream(13, "flat", &[]);
        let tap = CMatrix::<f64>::from_fn(2, 3, |_, _| complex_normal(&mut rng));
        let fd = taps_to_fdchtf(std::slice::from_ref(&tap), 5).unwrap();
        assert_eq!(fd.len(), 5);
        for h in fd {
            assert_eq!(h, tap);
        }
    }

    #[test]
    fn full_length_taps_give_the_dft() {
        let n = 8;
        let mut rng = stream(14, "dft", &[]);
        let seq: Vec<Complex<f64>> = (0..n).map(|_| complex_normal(&mut rng)).collect();
        let taps: Vec<CMatrix<f64>> = seq.iter().map(|&z| CMatrix::from_element(1, 1, z)).collect();
        let fd = taps_to_fdchtf(&taps, n).unwrap();
        for (l, h) in fd.iter().enumerate() {
            let mut want = c(0.0, 0.0);
            for (i, &z) in seq.iter().enumerate() {
                let ang = -2.0 * std::f64::consts::PI * (i * l) as f64 / n as f64;
                want += z * c(ang.cos(), ang.sin());
            }
            assert!((h[(0, 0)] - want).norm() < 1e-12);
        }
    }

    #[test]
    fn zero_taps_give_zero_channel_and_too_many_taps_fail() {
        let taps = vec![CMatrix::<f64>::zeros(1, 2); 3];
        assert!(taps_to_fdchtf(&taps, 4).unwrap().iter().all(|h| h.norm() == 0.0));
        assert!(taps_to_fdchtf(&taps, 2).is_err());
    }

    #[test]
    fn fdchtf_is_linear() {
        let mut rng = stream(15, "lin", &[]);
        let a: Vec<CMatrix<f64>> = (0..3).map(|_| CMatrix::from_fn(2, 2, |_, _| complex_normal(&mut rng))).collect();
        let b: Vec<CMatrix<f64>> = (0..3).map(|_| CMatrix::from_fn(2, 2, |_, _| complex_normal(&mut rng))).collect();
        let (alpha, beta) = (c(0.5, -1.5), c(2.0, 0.25));
        let mix: Vec<CMatrix<f64>> = a.iter().zip(&b).map(|(x, y)| x * alpha + y * beta).collect();
        let fa = taps_to_fdchtf(&a, 6).unwrap();
        let fb = taps_to_fdchtf(&b, 6).unwrap();
        let fm = taps_to_fdchtf(&mix, 6).unwrap();
        for l in 0..6 {
            let want = &fa[l] * alpha + &fb[l] * beta;
            assert!((&fm[l] - want).norm() < 1e-12);
        }
    }

    #[test]
    fn evolve_endpoints() {
        let corr = CorrelationModel::<f64>::identity(3, 1, 1).unwrap();
        let mut rng = stream(16, "ev", &[]);
        let taps = draw_correlated_taps(&mut rng, &corr, 0, 2).unwrap();
        assert_eq!(evolve_frame(&mut rng, &taps, 1.0, &corr, 0).unwrap(), taps);

        let mut a = stream(17, "ev", &[]);
        let mut b = stream(17, "ev", &[]);
        let fresh = evolve_frame(&mut a, &taps, 0.0, &corr, 0).unwrap();
        assert_eq!(fresh, draw_correlated_taps(&mut b, &corr, 0, 2).unwrap());

        assert!(evolve_frame(&mut rng, &taps, 1.2, &corr, 0).is_err());
        assert!(evolve_frame(&mut rng, &taps, -0.1, &corr, 0).is_err());
    }

    #[test]
    fn rho_at_twenty_kmh() {
        let fd = 20.0 / 3.6 * 2e9 / SPEED_OF_LIGHT;
        let rho = temporal_correlation(fd, 10e-3);
        let want = j0_series(2.0 * std::f64::consts::PI * fd * 10e-3);
        assert!((rho - want).abs() < 1e-12);
        assert!((2.0 * std::f64::consts::PI * fd * 10e-3 - 2.3286).abs() < 1e-3);
    }

    #[test]
    fn evolution_keeps_variance_stationary() {
        let corr = CorrelationModel::<f64>::identity(2, 1, 1).unwrap();
        let mut rng = stream(18, "stat", &[]);
        let mut taps = draw_correlated_taps(&mut rng, &corr, 0, 1).unwrap();
        let mut acc = 0.0;
        let frames = 1000;
        for _ in 0..frames {
            taps = evolve_frame(&mut rng, &taps, 0.9, &corr, 0).unwrap();
            acc += taps[0].norm_squared() / 2.0;
        }
        let var = acc / frames as f64;
        // strongly correlated chain: effective sample size ~ 1000·(1−ρ²)/(1+ρ²)
        assert!((var - 1.0).abs() < 0.2, "{var}");
    }

    #[test]
    fn vectorize_is_column_major() {
        let m = CMatrix::<f64>::from_row_slice(2, 2, &[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0)]);
        let v = vectorize(&m);
        assert_eq!(v.as_slice(), &[c(1.0, 0.0), c(3.0, 0.0), c(2.0, 0.0), c(4.0, 0.0)]);
        let row = CMatrix::<f64>::from_row_slice(1, 3, &[c(1.0, 1.0), c(2.0, 0.0), c(3.0, -1.0)]);
        assert_eq!(vectorize(&row), row.transpose().column(0).into_owned());
        assert!(devectorize(&v, 3, 1).is_err());
    }

    #[test]
    fn seeded_generation_is_bit_identical() {
        let cfg = SystemConfig::desk();
        let mut a = KroneckerChannel::<f64>::from_config(&cfg).unwrap();
        let mut b = KroneckerChannel::<f64>::from_config(&cfg).unwrap();
        for _ in 0..5 {
            assert_eq!(a.next_frame().unwrap(), b.next_frame().unwrap());
        }
    }

    #[test]
    fn realization_consistency_and_dump_round_trip() {
        let cfg = SystemConfig { rx_antennas: 2, ..SystemConfig::desk() };
        let mut src = KroneckerChannel::<f64>::from_config(&cfg).unwrap();
        let real = src.next_frame().unwrap().remove(0);
        assert_eq!(real.fdchtf, taps_to_fdchtf(&real.taps, cfg.subcarriers).unwrap());
        let stacked = real.stacked();
        assert_eq!(stacked.shape(), (2, cfg.subcarriers * cfg.tx_antennas));
        let mut buf = Vec::new();
        write_dump(&mut buf, &real).unwrap();
        let (frame, user, back) = read_dump(&mut buf.as_slice()).unwrap();
        assert_eq!((frame, user), (1, 0));
        assert_eq!(back, stacked);
    }

    proptest! {
        #[test]
        fn vec_round_trip(rows in 1usize..6, cols in 1usize..6, seed in any::<u64>()) {
            let mut rng = stream(seed, "prop", &[]);
            let m = CMatrix::<f64>::from_fn(rows, cols, |_, _| complex_normal(&mut rng));
            prop_assert_eq!(devectorize(&vectorize(&m), rows, cols).unwrap(), m);
        }
    }
}

//! Coded 16-PSK downlink over one subcarrier with a diagonal phase precoder.
//!
//! Per block: info bits → convolutional code → 16-PSK → the same symbol on
//! every antenna through `W/√n` → true channel → AWGN → phase decision →
//! Viterbi. Noise variance is `10^(−SNR/10)` against unit-energy symbols.

use num_complex::Complex;
use rand::Rng;
use rayon::prelude::*;

use super::coding::{conv_encode, precoder, psk16_demodulate, psk16_modulate, viterbi_decode};
use crate::error::{Error, Result};
use crate::rng::{complex_normal, stream};
use crate::scalar::{CVector, Real};

/// Info bits per block; with the flush tail this gives 2052 coded bits and
/// 513 symbols.
pub const BLOCK_BITS: usize = 1024;

#[derive(Debug, Clone, PartialEq)]
pub struct BerOptions {
    pub snr_db: Vec<f64>,
    pub min_bits: u64,
    /// Stop a point early once this many bit errors have been counted.
    pub target_errors: Option<u64>,
    pub seed: u64,
}

impl BerOptions {
    pub fn new(snr_db: Vec<f64>, seed: u64) -> Self {
        BerOptions { snr_db, min_bits: 100_000, target_errors: None, seed }
    }
}

/// Channel estimates from which one curve's precoders are built, aligned
/// with the true channels.
#[derive(Debug, Clone)]
pub struct PrecoderSource<T: Real> {
    /// `true` or `cdl_op`.
    pub label: String,
    /// Compression factor of the estimates; 1 for the true channel.
    pub g: u64,
    pub estimates: Vec<CVector<T>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerPoint {
    pub snr_db: f64,
    pub bit_errors: u64,
    pub bits: u64,
}

impl BerPoint {
    pub fn ber(&self) -> f64 {
        if self.bits == 0 {
            0.0
        } else {
            self.bit_errors as f64 / self.bits as f64
        }
    }

    /// One standard deviation of the binomial counting error.
    pub fn std_error(&self) -> f64 {
        if self.bits == 0 {
            return 0.0;
        }
        let p = self.ber();
        (p * (1.0 - p) / self.bits as f64).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BerCurve {
    pub label: String,
    pub g: u64,
    pub points: Vec<BerPoint>,
    /// Blocks whose precoder had a zero entry replaced.
    pub flagged_blocks: u64,
}

/// Sends `bits` through one block and returns the decoded bits. `noise`
/// must hold one unit-variance sample per symbol.
pub fn transmit_block<T: Real>(
    bits: &[u8],
    h: &CVector<T>,
    weights: &CVector<T>,
    sigma: f64,
    noise: &[Complex<T>],
) -> Result<Vec<u8>> {
    if h.len() != weights.len() || h.is_empty() {
        return Err(Error::shape("channel and precoder lengths differ"));
    }
    let coded = conv_encode(bits)?;
    let mut padded = coded.clone();
    while padded.len() % 4 != 0 {
        padded.push(0);
    }
    let symbols = psk16_modulate::<T>(&padded)?;
    if noise.len() < symbols.len() {
        return Err(Error::shape("not enough noise samples for the block"));
    }
    let norm = T::lit((h.len() as f64).sqrt());
    let gain = h.iter().zip(weights.iter()).fold(Complex::new(T::zero(), T::zero()), |acc, (a, w)| acc + a * w).unscale(norm);
    let sigma = T::lit(sigma);
    let received: Vec<Complex<T>> =
        symbols.iter().zip(noise).map(|(s, z)| gain * s + z.scale(sigma)).collect();
    let mut demod = psk16_demodulate(&received);
    demod.truncate(coded.len());
    viterbi_decode(&demod)
}

fn block_inputs<T: Real>(seed: u64, block: u64) -> (Vec<u8>, Vec<Complex<T>>) {
    let mut bit_rng = stream(seed, "ber-bits", &[block]);
    let bits: Vec<u8> = (0..BLOCK_BITS).map(|_| bit_rng.random_range(0..2u8)).collect();
    let symbols = (2 * (BLOCK_BITS + super::coding::FLUSH_BITS)).div_ceil(super::coding::PSK_BITS);
    let mut noise_rng = stream(seed, "ber-noise", &[block]);
    let noise = (0..symbols).map(|_| complex_normal::<T, _>(&mut noise_rng)).collect();
    (bits, noise)
}

/// BER of every source at every SNR. Block `b` uses `channels[b mod len]`;
/// info bits and normalized noise depend only on `(seed, b)`, so all curves
/// and SNR points share them.
pub fn ber_link_sim<T: Real>(
    channels: &[CVector<T>],
    sources: &[PrecoderSource<T>],
    opts: &BerOptions,
) -> Result<Vec<BerCurve>> {
    if channels.is_empty() {
        return Err(Error::param("BER simulation needs at least one channel"));
    }
    if opts.min_bits == 0 || opts.snr_db.is_empty() {
        return Err(Error::param("BER simulation needs min_bits > 0 and a non-empty SNR grid"));
    }
    for s in sources {
        if s.estimates.len() != channels.len() {
            return Err(Error::shape(format!("source {} has {} estimates for {} channels", s.label, s.estimates.len(), channels.len())));
        }
    }
    let max_blocks = opts.min_bits.div_ceil(BLOCK_BITS as u64);
    let jobs: Vec<(usize, usize)> =
        (0..sources.len()).flat_map(|s| (0..opts.snr_db.len()).map(move |i| (s, i))).collect();
    let points = jobs
        .par_iter()
        .map(|&(si, pi)| {
            let src = &sources[si];
            let snr = opts.snr_db[pi];
            let sigma = (10f64.powf(-snr / 10.0)).sqrt();
            let mut point = BerPoint { snr_db: snr, bit_errors: 0, bits: 0 };
            let mut flagged = 0u64;
            for b in 0..max_blocks {
                let idx = (b % channels.len() as u64) as usize;
                let p = precoder(&src.estimates[idx]);
                flagged += p.flagged as u64;
                let (bits, noise) = block_inputs::<T>(opts.seed, b);
                let decoded = transmit_block(&bits, &channels[idx], &p.weights, sigma, &noise)?;
                point.bit_errors += bits.iter().zip(&decoded).filter(|(a, b)| a != b).count() as u64;
                point.bits += bits.len() as u64;
                if opts.target_errors.is_some_and(|t| point.bit_errors >= t) {
                    break;
                }
            }
            Ok((point, flagged))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut curves: Vec<BerCurve> = sources
        .iter()
        .map(|s| BerCurve { label: s.label.clone(), g: s.g, points: Vec::new(), flagged_blocks: 0 })
        .collect();
    for (&(si, _), (point, flagged)) in jobs.iter().zip(points) {
        curves[si].points.push(point);
        curves[si].flagged_blocks = curves[si].flagged_blocks.max(flagged);
    }
    Ok(curves)
}

/// CSV `precoder_source,g,snr_db,bit_errors,bits,ber`.
pub fn write_ber_csv<W: std::io::Write>(w: &mut W, curves: &[BerCurve]) -> Result<()> {
    writeln!(w, "precoder_source,g,snr_db,bit_errors,bits,ber")?;
    for c in curves {
        for p in &c.points {
            writeln!(w, "{},{},{},{},{},{:.12e}", c.label, c.g, p.snr_db, p.bit_errors, p.bits, p.ber())?;
        }
    }
    Ok(())
}

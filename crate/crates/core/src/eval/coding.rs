//! Rate-1/2 convolutional code (generators 101, 111), Viterbi decoding,
//! Gray-mapped 16-PSK and the diagonal phase-conjugation precoder.

use nalgebra::ComplexField;
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{cis, CVector, Real};

/// Constraint length.
pub const CONSTRAINT: usize = 3;
/// Zero bits appended to terminate the trellis.
pub const FLUSH_BITS: usize = CONSTRAINT - 1;
/// Generator taps on `(u_t, u_{t−1}, u_{t−2})`, emitted in this order.
pub const GENERATORS: [[u8; 3]; 2] = [[1, 0, 1], [1, 1, 1]];

const STATES: usize = 1 << (CONSTRAINT - 1);

/// Output pair for input `u` from state `(u_{t−1}, u_{t−2})` packed as
/// `u_{t−1}·2 + u_{t−2}`.
fn branch(state: usize, u: u8) -> [u8; 2] {
    let regs = [u, (state >> 1) as u8 & 1, state as u8 & 1];
    GENERATORS.map(|g| g.iter().zip(regs).fold(0, |acc, (&gi, r)| acc ^ (gi & r)))
}

fn next_state(state: usize, u: u8) -> usize {
    ((u as usize) << 1) | (state >> 1)
}

fn check_bits(bits: &[u8]) -> Result<()> {
    match bits.iter().position(|&b| b > 1) {
        Some(i) => Err(Error::Framing(format!("bit {i} has value {}, expected 0 or 1", bits[i]))),
        None => Ok(()),
    }
}

/// Encodes `bits` from the all-zero state and flushes with [`FLUSH_BITS`]
/// zeros; output length `2·(len + 2)`.
pub fn conv_encode(bits: &[u8]) -> Result<Vec<u8>> {
    check_bits(bits)?;
    let mut out = Vec::with_capacity(2 * (bits.len() + FLUSH_BITS));
    let mut state = 0;
    for &u in bits.iter().chain([0u8; FLUSH_BITS].iter()) {
        out.extend_from_slice(&branch(state, u));
        state = next_state(state, u);
    }
    Ok(out)
}

/// Viterbi over the terminated trellis; `branch_cost(step, expected)` is the
/// cost of emitting `expected` at `step`.
fn viterbi<F: Fn(usize, [u8; 2]) -> f64>(steps: usize, branch_cost: F) -> Vec<u8> {
    let inf = f64::INFINITY;
    let mut metric = [inf; STATES];
    metric[0] = 0.0;
    let mut history: Vec<[(usize, u8); STATES]> = Vec::with_capacity(steps);
    for t in 0..steps {
        let mut next = [inf; STATES];
        let mut from = [(0usize, 0u8); STATES];
        let inputs: &[u8] = if t + FLUSH_BITS >= steps { &[0] } else { &[0, 1] };
        for s in 0..STATES {
            if metric[s] == inf {
                continue;
            }
            for &u in inputs {
                let ns = next_state(s, u);
                let m = metric[s] + branch_cost(t, branch(s, u));
                // strict comparison keeps the lowest predecessor on ties
                if m < next[ns] {
                    next[ns] = m;
                    from[ns] = (s, u);
                }
            }
        }
        metric = next;
        history.push(from);
    }
    let mut state = 0;
    let mut bits = vec![0u8; steps];
    for t in (0..steps).rev() {
        let (prev, u) = history[t][state];
        bits[t] = u;
        state = prev;
    }
    bits.truncate(steps - FLUSH_BITS);
    bits
}

fn steps_of(len: usize) -> Result<usize> {
    if len % 2 != 0 {
        return Err(Error::Framing(format!("coded length {len} is not a multiple of 2")));
    }
    if len < 2 * FLUSH_BITS {
        return Err(Error::Framing(format!("coded length {len} is shorter than the flush tail")));
    }
    Ok(len / 2)
}

/// Hard-decision (Hamming metric) maximum-likelihood decoding.
pub fn viterbi_decode(coded: &[u8]) -> Result<Vec<u8>> {
    check_bits(coded)?;
    let steps = steps_of(coded.len())?;
    Ok(viterbi(steps, |t, e| {
        ((e[0] ^ coded[2 * t]) + (e[1] ^ coded[2 * t + 1])) as f64
    }))
}

/// Soft-decision decoding from per-bit log-likelihood ratios
/// `ln P(0)/P(1)`.
pub fn viterbi_decode_soft(llrs: &[f64]) -> Result<Vec<u8>> {
    let steps = steps_of(llrs.len())?;
    Ok(viterbi(steps, |t, e| {
        let cost = |bit: u8, llr: f64| if bit == 0 { -llr } else { llr };
        cost(e[0], llrs[2 * t]) + cost(e[1], llrs[2 * t + 1])
    }))
}

/// Hamming distance between equal-length bit slices.
pub fn hamming(a: &[u8], b: &[u8]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

/// Bits per 16-PSK symbol.
pub const PSK_BITS: usize = 4;
const PSK_POINTS: usize = 1 << PSK_BITS;

/// Gray label of constellation index `k` (angle `2πk/16`).
pub fn gray(k: usize) -> usize {
    k ^ (k >> 1)
}

fn gray_inverse(mut g: usize) -> usize {
    let mut k = g;
    while g > 0 {
        g >>= 1;
        k ^= g;
    }
    k
}

/// Unit-energy 16-PSK, 4 bits per symbol MSB first, Gray labels around the
/// circle.
pub fn psk16_modulate<T: Real>(bits: &[u8]) -> Result<Vec<Complex<T>>> {
    check_bits(bits)?;
    if bits.len() % PSK_BITS != 0 {
        return Err(Error::Framing(format!("{} bits do not fill whole 16-PSK symbols", bits.len())));
    }
    Ok(bits
        .chunks(PSK_BITS)
        .map(|c| {
            let label = c.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
            let k = gray_inverse(label);
            cis(T::two_pi() * T::lit(k as f64) / T::lit(PSK_POINTS as f64))
        })
        .collect())
}

/// Nearest-point hard decision.
pub fn psk16_demodulate<T: Real>(symbols: &[Complex<T>]) -> Vec<u8> {
    let mut out = Vec::with_capacity(symbols.len() * PSK_BITS);
    for s in symbols {
        let angle = s.im.as_f64().atan2(s.re.as_f64());
        let k = (angle / (std::f64::consts::TAU / PSK_POINTS as f64)).round().rem_euclid(PSK_POINTS as f64) as usize;
        let label = gray(k % PSK_POINTS);
        for b in (0..PSK_BITS).rev() {
            out.push(((label >> b) & 1) as u8);
        }
    }
    out
}

/// Diagonal phase-conjugation precoder `diag(conj(h_i)/|h_i|)`, stored as
/// its diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct Precoder<T: Real> {
    pub weights: CVector<T>,
    /// Some `h_i` was zero and got weight 1.
    pub flagged: bool,
}

pub fn precoder<T: Real>(h: &CVector<T>) -> Precoder<T> {
    let mut flagged = false;
    let weights = h.map(|z| {
        let m = z.modulus();
        if m > T::zero() {
            z.conj().unscale(m)
        } else {
            flagged = true;
            Complex::new(T::one(), T::zero())
        }
    });
    Precoder { weights, flagged }
}

//! Compressive-sensing codec: sparsifying dictionaries, Gaussian measurement
//! matrices, compression and OMP reconstruction.

use std::collections::HashMap;
use std::fmt;
use std::io::{BufRead, Write};
use std::sync::{Arc, RwLock};

use nalgebra::ComplexField;
use num_complex::Complex;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::linalg::{least_squares, unitarity_defect};
use crate::rng::{complex_normal, stream};
use crate::scalar::{cis, CMatrix, CVector, Real};

/// Secondary OMP stop: residual below this fraction of `‖y‖`.
pub const DEFAULT_RESIDUAL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CommonMethod {
    Ksvd,
    Procrustes,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DictionaryKind {
    Dft,
    /// Per-subcarrier K-SVD dictionary learned by one user.
    Ksvd { user: usize, subcarrier: usize },
    /// Common dictionary shared by every user and subcarrier.
    Common(CommonMethod),
    /// Loaded from a file with no further provenance.
    External,
}

impl fmt::Display for DictionaryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DictionaryKind::Dft => f.write_str("dft"),
            DictionaryKind::Ksvd { user, subcarrier } => write!(f, "ksvd-u{user}-l{subcarrier}"),
            DictionaryKind::Common(CommonMethod::Ksvd) => f.write_str("cdl-ksvd"),
            DictionaryKind::Common(CommonMethod::Procrustes) => f.write_str("cdl-op"),
            DictionaryKind::External => f.write_str("external"),
        }
    }
}

impl std::str::FromStr for DictionaryKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dft" => Ok(DictionaryKind::Dft),
            "cdl-ksvd" => Ok(DictionaryKind::Common(CommonMethod::Ksvd)),
            "cdl-op" => Ok(DictionaryKind::Common(CommonMethod::Procrustes)),
            "external" => Ok(DictionaryKind::External),
            _ => {
                let rest = s
                    .strip_prefix("ksvd-u")
                    .ok_or_else(|| Error::Format(format!("unknown dictionary kind {s:?}")))?;
                let (u, l) = rest
                    .split_once("-l")
                    .ok_or_else(|| Error::Format(format!("unknown dictionary kind {s:?}")))?;
                let parse = |x: &str| x.parse::<usize>().map_err(|_| Error::Format(format!("bad index in {s:?}")));
                Ok(DictionaryKind::Ksvd { user: parse(u)?, subcarrier: parse(l)? })
            }
        }
    }
}

/// Content hash of a dictionary; identical matrices of the same kind share it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DictId(pub u64);

impl fmt::Display for DictId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:016x}", self.0)
    }
}

fn content_id<I: Iterator<Item = (f64, f64)>>(kind: DictionaryKind, n: usize, entries: I) -> DictId {
    let mut h = Sha256::new();
    h.update(kind.to_string().as_bytes());
    h.update((n as u64).to_le_bytes());
    for (re, im) in entries {
        h.update(re.to_le_bytes());
        h.update(im.to_le_bytes());
    }
    let digest = h.finalize();
    let mut word = [0u8; 8];
    word.copy_from_slice(&digest[..8]);
    DictId(u64::from_be_bytes(word))
}

/// Square sparsifying basis with unit-norm columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Dictionary<T: Real> {
    matrix: CMatrix<T>,
    kind: DictionaryKind,
    id: DictId,
}

impl<T: Real> Dictionary<T> {
    /// Checks squareness and unit column norms (and unitarity for the
    /// Procrustes common dictionary).
    pub fn new(matrix: CMatrix<T>, kind: DictionaryKind) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(Error::shape(format!("dictionary must be square, got {}x{}", matrix.nrows(), matrix.ncols())));
        }
        let tol = T::rel_tol() * T::lit(100.0);
        for (j, col) in matrix.column_iter().enumerate() {
            let norm = col.norm();
            if (norm - T::one()).abs() > tol {
                return Err(Error::param(format!("dictionary column {j} has norm {:e}", norm.as_f64())));
            }
        }
        if kind == DictionaryKind::Common(CommonMethod::Procrustes) {
            let defect = unitarity_defect(&matrix);
            if defect > tol {
                return Err(Error::param(format!("Procrustes dictionary is not unitary (defect {:e})", defect.as_f64())));
            }
        }
        let id = content_id(kind, matrix.nrows(), matrix.iter().map(|z| (z.re.as_f64(), z.im.as_f64())));
        Ok(Dictionary { matrix, kind, id })
    }

    /// `Ψ[u,v] = exp(−j2π·u·v/n)/√n`.
    pub fn dft(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("DFT size must be positive"));
        }
        let scale = T::one() / T::lit(n as f64).sqrt();
        let nn = T::lit(n as f64);
        let m = CMatrix::from_fn(n, n, |u, v| {
            let k = (u * v) % n;
            cis(-T::two_pi() * T::lit(k as f64) / nn).scale(scale)
        });
        Self::new(m, DictionaryKind::Dft)
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn kind(&self) -> DictionaryKind {
        self.kind
    }

    pub fn id(&self) -> DictId {
        self.id
    }

    /// Ambient dimension `n`.
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Flat file: one ASCII header line `CDLDICT1 n=<n> kind=<kind> id=<hex>`,
    /// then the matrix row-major as `(re, im)` little-endian `f64` pairs.
    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "CDLDICT1 n={} kind={} id={}", self.dim(), self.kind, self.id)?;
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                let z = self.matrix[(i, j)];
                w.write_all(&z.re.as_f64().to_le_bytes())?;
                w.write_all(&z.im.as_f64().to_le_bytes())?;
            }
        }
        Ok(())
    }

    /// Reads a file written by [`write_to`](Self::write_to); the stored id
    /// must match the content.
    pub fn read_from<R: BufRead>(r: &mut R) -> Result<Self> {
        let mut line = String::new();
        r.read_line(&mut line)?;
        let mut fields = line.trim_end().split(' ');
        if fields.next() != Some("CDLDICT1") {
            return Err(Error::Format("missing CDLDICT1 header".into()));
        }
        let mut n = None;
        let mut kind = None;
        let mut id = None;
        for f in fields {
            match f.split_once('=') {
                Some(("n", v)) => n = v.parse::<usize>().ok(),
                Some(("kind", v)) => kind = Some(v.parse::<DictionaryKind>()?),
                Some(("id", v)) => id = u64::from_str_radix(v, 16).ok().map(DictId),
                _ => return Err(Error::Format(format!("unexpected header field {f:?}"))),
            }
        }
        let (n, kind, id) = match (n, kind, id) {
            (Some(n), Some(k), Some(i)) if n > 0 => (n, k, i),
            _ => return Err(Error::Format("incomplete dictionary header".into())),
        };
        let mut raw = vec![(0.0f64, 0.0f64); n * n];
        let mut word = [0u8; 8];
        for slot in raw.iter_mut() {
            r.read_exact(&mut word)?;
            slot.0 = f64::from_le_bytes(word);
            r.read_exact(&mut word)?;
            slot.1 = f64::from_le_bytes(word);
        }
        // header id is over column-major entries
        let col_major = (0..n).flat_map(|j| (0..n).map(move |i| (i, j))).map(|(i, j)| raw[i * n + j]);
        if content_id(kind, n, col_major) != id {
            return Err(Error::Format("dictionary id does not match its content".into()));
        }
        let m = CMatrix::from_fn(n, n, |i, j| {
            let (re, im) = raw[i * n + j];
            Complex::new(T::lit(re), T::lit(im))
        });
        Self::new(m, kind)
    }
}

/// Random Gaussian measurement matrix `Φ` with a per-dictionary `Θ = Φ·Ψ`
/// cache.
#[derive(Debug)]
pub struct MeasurementMatrix<T: Real> {
    phi: CMatrix<T>,
    seed: u64,
    theta: RwLock<HashMap<DictId, Arc<CMatrix<T>>>>,
}

impl<T: Real> Clone for MeasurementMatrix<T> {
    fn clone(&self) -> Self {
        MeasurementMatrix { phi: self.phi.clone(), seed: self.seed, theta: RwLock::new(HashMap::new()) }
    }
}

impl<T: Real> MeasurementMatrix<T> {
    /// i.i.d. `CN(0, 1/N_g)` entries, reproducible from `seed`.
    pub fn gaussian(seed: u64, rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || rows >= cols {
            return Err(Error::param(format!("measurement matrix needs 0 < N_g < n, got N_g = {rows}, n = {cols}")));
        }
        let mut rng = stream(seed, "measurement", &[rows as u64, cols as u64]);
        let scale = T::one() / T::lit(rows as f64).sqrt();
        let phi = CMatrix::from_fn(rows, cols, |_, _| complex_normal::<T, _>(&mut rng).scale(scale));
        Ok(Self::from_matrix(phi, seed))
    }

    /// Wraps an explicit matrix; `seed` only labels it.
    pub fn from_matrix(phi: CMatrix<T>, seed: u64) -> Self {
        MeasurementMatrix { phi, seed, theta: RwLock::new(HashMap::new()) }
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.phi
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn rows(&self) -> usize {
        self.phi.nrows()
    }

    pub fn cols(&self) -> usize {
        self.phi.ncols()
    }

    /// `Θ = Φ·Ψ`, computed once per dictionary id.
    pub fn theta(&self, dict: &Dictionary<T>) -> Result<Arc<CMatrix<T>>> {
        if dict.dim() != self.cols() {
            return Err(Error::shape(format!("dictionary of size {} with a {}-column measurement matrix", dict.dim(), self.cols())));
        }
        if let Some(t) = self.theta.read().expect("theta cache poisoned").get(&dict.id()) {
            return Ok(Arc::clone(t));
        }
        let t = Arc::new(&self.phi * dict.matrix());
        self.theta.write().expect("theta cache poisoned").entry(dict.id()).or_insert_with(|| Arc::clone(&t));
        Ok(t)
    }

    /// `h_c = Φ·h`.
    pub fn compress(&self, h: &CVector<T>, dict: &Dictionary<T>, tag: FeedbackTag) -> Result<CompressedFeedback<T>> {
        if h.len() != self.cols() {
            return Err(Error::shape(format!("channel vector of length {} with a {}-column measurement matrix", h.len(), self.cols())));
        }
        if dict.dim() != self.cols() {
            return Err(Error::shape("dictionary size differs from the measurement matrix"));
        }
        Ok(CompressedFeedback {
            values: &self.phi * h,
            dictionary: dict.id(),
            measurement_seed: self.seed,
            tag,
        })
    }
}

/// [`MeasurementMatrix::gaussian`] that also enforces the recovery bound
/// `N_g > 2S` for the operating sparsity.
pub fn gaussian_measurement<T: Real>(seed: u64, rows: usize, cols: usize, sparsity: usize) -> Result<MeasurementMatrix<T>> {
    if rows <= 2 * sparsity {
        return Err(Error::param(format!("sparse recovery requires N_g > 2S, got N_g = {rows} and S = {sparsity}")));
    }
    MeasurementMatrix::gaussian(seed, rows, cols)
}

/// Support-sorted sparse vector.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseVector<T: Real> {
    len: usize,
    support: Vec<usize>,
    values: Vec<Complex<T>>,
}

impl<T: Real> SparseVector<T> {
    pub fn new(len: usize, support: Vec<usize>, values: Vec<Complex<T>>) -> Result<Self> {
        if support.len() != values.len() {
            return Err(Error::shape("support and values differ in length"));
        }
        if support.windows(2).any(|w| w[0] >= w[1]) || support.last().is_some_and(|&i| i >= len) {
            return Err(Error::param("support must be strictly increasing and inside the ambient length"));
        }
        Ok(SparseVector { len, support, values })
    }

    pub fn zeros(len: usize) -> Self {
        SparseVector { len, support: Vec::new(), values: Vec::new() }
    }

    /// From unsorted `(index, value)` pairs with distinct indices.
    pub fn from_pairs(len: usize, mut pairs: Vec<(usize, Complex<T>)>) -> Result<Self> {
        pairs.sort_by_key(|p| p.0);
        let (support, values) = pairs.into_iter().unzip();
        Self::new(len, support, values)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn nnz(&self) -> usize {
        self.support.len()
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, Complex<T>)> + '_ {
        self.support.iter().copied().zip(self.values.iter().copied())
    }

    pub fn get(&self, index: usize) -> Option<Complex<T>> {
        self.support.binary_search(&index).ok().map(|p| self.values[p])
    }

    pub fn to_dense(&self) -> CVector<T> {
        let mut v = CVector::zeros(self.len);
        for (i, z) in self.iter() {
            v[i] = z;
        }
        v
    }

    /// `A·x` using only the support columns.
    pub fn synthesize(&self, a: &CMatrix<T>) -> CVector<T> {
        let mut out = CVector::zeros(a.nrows());
        for (i, z) in self.iter() {
            out.axpy(z, &a.column(i), Complex::new(T::one(), T::zero()));
        }
        out
    }
}

/// Who sent a compressed vector and when.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FeedbackTag {
    pub user: usize,
    pub subcarrier: usize,
    pub frame: usize,
}

/// What a UE sends uplink for one subcarrier.
#[derive(Debug, Clone, PartialEq)]
pub struct CompressedFeedback<T: Real> {
    /// `h_c`, length `N_g`.
    pub values: CVector<T>,
    pub dictionary: DictId,
    pub measurement_seed: u64,
    pub tag: FeedbackTag,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OmpOptions {
    pub sparsity: usize,
    pub residual_tol: f64,
}

impl OmpOptions {
    pub fn new(sparsity: usize) -> Self {
        OmpOptions { sparsity, residual_tol: DEFAULT_RESIDUAL_TOL }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OmpOutcome<T: Real> {
    pub code: SparseVector<T>,
    pub residual_norm: T,
    /// Selection order of the support.
    pub selection: Vec<usize>,
    /// Residual norm after each selection, starting with `‖y‖`.
    pub residual_trace: Vec<T>,
    /// A least-squares step needed the pseudo-inverse fallback.
    pub degenerate: bool,
}

/// Orthogonal matching pursuit.
///
/// Each step picks the column maximizing `|⟨r, a_j⟩|/‖a_j‖` (lowest index on
/// ties), refits all selected amplitudes by least squares and updates the
/// residual. Stops at `sparsity` atoms or once `‖r‖ ≤ residual_tol·‖y‖`.
/// Zero columns are never selected.
pub fn omp<T: Real>(y: &CVector<T>, a: &CMatrix<T>, opts: OmpOptions) -> Result<OmpOutcome<T>> {
    let (m, n) = a.shape();
    if y.len() != m {
        return Err(Error::shape(format!("observation of length {} for a {}x{} sensing matrix", y.len(), m, n)));
    }
    if opts.sparsity == 0 {
        return Err(Error::param("sparsity must be at least 1"));
    }
    let col_norms: Vec<T> = a.column_iter().map(|c| c.norm()).collect();
    let y_norm = y.norm();
    let stop = T::lit(opts.residual_tol) * y_norm;
    let max_atoms = opts.sparsity.min(n);

    let mut selected = vec![false; n];
    let mut selection = Vec::with_capacity(max_atoms);
    let mut residual = y.clone();
    let mut residual_norm = y_norm;
    let mut residual_trace = vec![y_norm];
    let mut amplitudes = CVector::<T>::zeros(0);
    let mut degenerate = false;

    while selection.len() < max_atoms && residual_norm > stop {
        let corr = a.ad_mul(&residual);
        let mut best: Option<(usize, T)> = None;
        for j in 0..n {
            if selected[j] || col_norms[j] == T::zero() {
                continue;
            }
            let score = corr[j].modulus() / col_norms[j];
            if best.is_none_or(|(_, s)| score > s) {
                best = Some((j, score));
            }
        }
        let Some((j, score)) = best else { break };
        if score == T::zero() {
            break;
        }
        selected[j] = true;
        selection.push(j);
        let sub = a.select_columns(selection.iter());
        let ls = least_squares(&sub, y)?;
        degenerate |= ls.degenerate;
        amplitudes = ls.solution;
        residual = y - &sub * &amplitudes;
        residual_norm = residual.norm();
        residual_trace.push(residual_norm);
    }

    let pairs = selection.iter().copied().zip(amplitudes.iter().copied()).collect();
    Ok(OmpOutcome {
        code: SparseVector::from_pairs(n, pairs)?,
        residual_norm,
        selection,
        residual_trace,
        degenerate,
    })
}

/// Sparse representation `h ≈ Ψ·h̃` with at most `sparsity` atoms.
pub fn sparse_code<T: Real>(h: &CVector<T>, dict: &Dictionary<T>, sparsity: usize) -> Result<OmpOutcome<T>> {
    omp(h, dict.matrix(), OmpOptions::new(sparsity))
}

/// BS-side estimate of one channel vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction<T: Real> {
    /// `ĥ = Ψ·h̃̂`.
    pub estimate: CVector<T>,
    /// `h̃̂`.
    pub code: SparseVector<T>,
    pub degenerate: bool,
}

fn check_pairing<T: Real>(fb: &CompressedFeedback<T>, phi: &MeasurementMatrix<T>, dict: &Dictionary<T>) -> Result<()> {
    if fb.dictionary != dict.id() {
        return Err(Error::Protocol(format!(
            "feedback was compressed for dictionary {} but {} ({}) is in force",
            fb.dictionary,
            dict.id(),
            dict.kind()
        )));
    }
    if fb.measurement_seed != phi.seed() {
        return Err(Error::Protocol(format!(
            "feedback used measurement seed {} but the BS holds seed {}",
            fb.measurement_seed,
            phi.seed()
        )));
    }
    if fb.values.len() != phi.rows() {
        return Err(Error::shape(format!("feedback of length {} for N_g = {}", fb.values.len(), phi.rows())));
    }
    Ok(())
}

fn finish<T: Real>(dict: &Dictionary<T>, out: OmpOutcome<T>) -> Reconstruction<T> {
    Reconstruction { estimate: out.code.synthesize(dict.matrix()), code: out.code, degenerate: out.degenerate }
}

/// `h̃̂ = OMP(h_c, Θ, S)`, `ĥ = Ψ·h̃̂`, using the cached `Θ`.
pub fn reconstruct<T: Real>(
    fb: &CompressedFeedback<T>,
    phi: &MeasurementMatrix<T>,
    dict: &Dictionary<T>,
    sparsity: usize,
) -> Result<Reconstruction<T>> {
    check_pairing(fb, phi, dict)?;
    let theta = phi.theta(dict)?;
    Ok(finish(dict, omp(&fb.values, &theta, OmpOptions::new(sparsity))?))
}

/// [`reconstruct`] recomputing `Θ` from scratch.
pub fn reconstruct_uncached<T: Real>(
    fb: &CompressedFeedback<T>,
    phi: &MeasurementMatrix<T>,
    dict: &Dictionary<T>,
    sparsity: usize,
) -> Result<Reconstruction<T>> {
    check_pairing(fb, phi, dict)?;
    let theta = phi.matrix() * dict.matrix();
    Ok(finish(dict, omp(&fb.values, &theta, OmpOptions::new(sparsity))?))
}

//! Dictionary learning: K-SVD, pooled common-dictionary K-SVD and the
//! orthogonal-Procrustes common dictionary.

use nalgebra::ComplexField;
use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{least_squares, svd};
use crate::scalar::{CMatrix, CVector, Real};
use crate::sparsify::{omp, CommonMethod, Dictionary, DictionaryKind, OmpOptions, SparseVector};

/// Where the training vectors came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// True channels known at the UE (`H′`, `H̃′`).
    TrueChannels,
    /// BS reconstructions (`Ĥ′`, `H̃̂′`).
    ReconstructedAtBs,
}

/// Column layout of a pooled training matrix: user-major, then subcarrier,
/// then frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrainingLayout {
    pub users: usize,
    pub subcarriers: usize,
    pub frames: usize,
}

impl TrainingLayout {
    /// `M′ = N·N_c·K`.
    pub fn columns(&self) -> usize {
        self.users * self.subcarriers * self.frames
    }

    pub fn column(&self, user: usize, subcarrier: usize, frame: usize) -> usize {
        (user * self.subcarriers + subcarrier) * self.frames + frame
    }
}

/// Pooled training vectors with optional sparse codes.
#[derive(Debug, Clone)]
pub struct TrainingSet<T: Real> {
    pub signals: CMatrix<T>,
    pub codes: Option<Vec<SparseVector<T>>>,
    pub provenance: Provenance,
    pub layout: TrainingLayout,
}

impl<T: Real> TrainingSet<T> {
    /// Builds the set from `vectors[user][subcarrier][frame]` (and matching
    /// codes when given).
    pub fn from_blocks(
        vectors: &[Vec<Vec<CVector<T>>>],
        codes: Option<&[Vec<Vec<SparseVector<T>>>]>,
        provenance: Provenance,
    ) -> Result<Self> {
        let users = vectors.len();
        let subcarriers = vectors.first().map_or(0, Vec::len);
        let frames = vectors.first().and_then(|u| u.first()).map_or(0, Vec::len);
        let n = vectors
            .first()
            .and_then(|u| u.first())
            .and_then(|s| s.first())
            .map(|v| v.len())
            .ok_or_else(|| Error::param("empty training set"))?;
        let layout = TrainingLayout { users, subcarriers, frames };
        let mut signals = CMatrix::zeros(n, layout.columns());
        for (k, per_user) in vectors.iter().enumerate() {
            if per_user.len() != subcarriers {
                return Err(Error::shape("ragged training blocks (subcarriers)"));
            }
            for (l, per_sub) in per_user.iter().enumerate() {
                if per_sub.len() != frames {
                    return Err(Error::shape("ragged training blocks (frames)"));
                }
                for (f, v) in per_sub.iter().enumerate() {
                    if v.len() != n {
                        return Err(Error::shape("training vectors differ in length"));
                    }
                    signals.set_column(layout.column(k, l, f), v);
                }
            }
        }
        let codes = match codes {
            None => None,
            Some(c) => {
                let mut flat = Vec::with_capacity(layout.columns());
                for per_user in c {
                    for per_sub in per_user {
                        for code in per_sub {
                            if code.len() != n {
                                return Err(Error::shape("sparse code length differs from n"));
                            }
                            flat.push(code.clone());
                        }
                    }
                }
                if flat.len() != layout.columns() {
                    return Err(Error::shape("codes do not match the training vectors"));
                }
                Some(flat)
            }
        };
        Ok(TrainingSet { signals, codes, provenance, layout })
    }

    pub fn dim(&self) -> usize {
        self.signals.nrows()
    }
}

/// Dense `n × M` matrix from column codes.
pub fn codes_to_matrix<T: Real>(n: usize, codes: &[SparseVector<T>]) -> CMatrix<T> {
    let mut m = CMatrix::zeros(n, codes.len());
    for (j, code) in codes.iter().enumerate() {
        for (i, z) in code.iter() {
            m[(i, j)] = z;
        }
    }
    m
}

/// `‖H′ − Ψ·H̃′‖²_F`.
pub fn objective<T: Real>(signals: &CMatrix<T>, dict: &CMatrix<T>, codes: &CMatrix<T>) -> Result<T> {
    if dict.ncols() != codes.nrows() || dict.nrows() != signals.nrows() || codes.ncols() != signals.ncols() {
        return Err(Error::shape(format!(
            "objective: H′ {}x{}, Ψ {}x{}, H̃′ {}x{}",
            signals.nrows(),
            signals.ncols(),
            dict.nrows(),
            dict.ncols(),
            codes.nrows(),
            codes.ncols()
        )));
    }
    Ok((signals - dict * codes).norm_squared())
}

/// [`objective`] with column-sparse codes.
pub fn objective_sparse<T: Real>(signals: &CMatrix<T>, dict: &CMatrix<T>, codes: &[SparseVector<T>]) -> Result<T> {
    if codes.len() != signals.ncols() {
        return Err(Error::shape("one code per training column is required"));
    }
    let parts: Vec<T> = codes
        .par_iter()
        .enumerate()
        .map(|(j, code)| (signals.column(j) - code.synthesize(dict)).norm_squared())
        .collect();
    Ok(parts.into_iter().fold(T::zero(), |a, b| a + b))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsvdOptions {
    pub sparsity: usize,
    pub max_iters: usize,
    /// Stop once the relative objective decrease falls below this.
    pub tol: f64,
    /// Replace atoms unused for `unused_patience` consecutive iterations by
    /// the worst-represented training column. Off by default.
    pub replace_unused: bool,
    pub unused_patience: usize,
}

impl KsvdOptions {
    pub fn new(sparsity: usize) -> Self {
        KsvdOptions { sparsity, max_iters: 50, tol: 1e-4, replace_unused: false, unused_patience: 3 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LearnReport {
    /// Objective after the first sparse-coding pass, before any update.
    pub initial_objective: f64,
    /// Objective after every full (sparse coding + update) iteration.
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    pub atoms_replaced: usize,
    pub converged: bool,
}

#[derive(Debug, Clone)]
pub struct KsvdOutput<T: Real> {
    pub dictionary: CMatrix<T>,
    pub codes: Vec<SparseVector<T>>,
    pub report: LearnReport,
}

/// Codes one column; keeps the previous support (refit) when it beats OMP,
/// so a coding pass never raises the objective.
fn code_column<T: Real>(
    h: &CVector<T>,
    dict: &CMatrix<T>,
    sparsity: usize,
    previous: Option<&SparseVector<T>>,
) -> Result<SparseVector<T>> {
    let fresh = omp(h, dict, OmpOptions::new(sparsity))?;
    let Some(prev) = previous.filter(|p| p.nnz() > 0) else {
        return Ok(fresh.code);
    };
    let sub = dict.select_columns(prev.support().iter());
    let ls = least_squares(&sub, h)?;
    let refit_res = (h - &sub * &ls.solution).norm();
    if refit_res < fresh.residual_norm {
        SparseVector::new(h.len(), prev.support().to_vec(), ls.solution.iter().copied().collect())
    } else {
        Ok(fresh.code)
    }
}

/// K-SVD over the columns of `signals`, starting from `init`.
///
/// Alternates OMP sparse coding with per-atom rank-1 updates: atom `k` and
/// its coefficient row are replaced by the dominant singular pair of the
/// residual restricted to the columns that use atom `k`. Unused atoms are
/// left alone unless `replace_unused` is set.
pub fn ksvd<T: Real>(signals: &CMatrix<T>, init: &CMatrix<T>, opts: KsvdOptions) -> Result<KsvdOutput<T>> {
    let n = init.nrows();
    if !init.is_square() {
        return Err(Error::shape(format!("initial dictionary must be square, got {}x{}", n, init.ncols())));
    }
    if signals.nrows() != n {
        return Err(Error::shape(format!("training vectors of length {} for a size-{} dictionary", signals.nrows(), n)));
    }
    if opts.sparsity == 0 || opts.sparsity >= n {
        return Err(Error::param(format!("K-SVD needs 1 <= S < n, got S = {} and n = {}", opts.sparsity, n)));
    }
    if signals.ncols() == 0 {
        return Err(Error::param("K-SVD needs at least one training vector"));
    }
    let m = signals.ncols();
    let mut psi = init.clone();
    let mut codes: Vec<SparseVector<T>> = Vec::new();
    let mut unused_streak = vec![0usize; n];
    let mut report = LearnReport {
        initial_objective: 0.0,
        objective_trace: Vec::new(),
        iterations: 0,
        atoms_replaced: 0,
        converged: false,
    };

    for it in 0..opts.max_iters {
        codes = (0..m)
            .into_par_iter()
            .map(|j| {
                let prev = codes.get(j);
                code_column(&signals.column(j).into_owned(), &psi, opts.sparsity, prev)
            })
            .collect::<Result<Vec<_>>>()?;
        if it == 0 {
            report.initial_objective = objective_sparse(signals, &psi, &codes)?.as_f64();
        }

        let mut usage: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (j, code) in codes.iter().enumerate() {
            for &i in code.support() {
                usage[i].push(j);
            }
        }

        for k in 0..n {
            if usage[k].is_empty() {
                unused_streak[k] += 1;
                if opts.replace_unused && unused_streak[k] >= opts.unused_patience {
                    replace_atom(signals, &mut psi, &codes, k)?;
                    unused_streak[k] = 0;
                    report.atoms_replaced += 1;
                }
                continue;
            }
            unused_streak[k] = 0;
            let cols = &usage[k];
            let mut err = CMatrix::<T>::zeros(n, cols.len());
            for (c, &j) in cols.iter().enumerate() {
                let mut e = signals.column(j).into_owned();
                for (i, z) in codes[j].iter() {
                    if i != k {
                        e.axpy(-z, &psi.column(i), Complex::new(T::one(), T::zero()));
                    }
                }
                err.set_column(c, &e);
            }
            let dec = svd(&err)?;
            let sigma = dec.singular_values[0];
            if sigma == T::zero() {
                // restricted residual vanished: drop the atom's coefficients
                for &j in cols {
                    set_coeff(&mut codes[j], k, Complex::new(T::zero(), T::zero()));
                }
                continue;
            }
            psi.set_column(k, &dec.u.column(0));
            for (c, &j) in cols.iter().enumerate() {
                let coeff = dec.v[(c, 0)].conj().scale(sigma);
                set_coeff(&mut codes[j], k, coeff);
            }
        }

        let obj = objective_sparse(signals, &psi, &codes)?.as_f64();
        let prev = report.objective_trace.last().copied().unwrap_or(report.initial_objective);
        report.objective_trace.push(obj);
        report.iterations = it + 1;
        if obj == 0.0 || (prev > 0.0 && (prev - obj) / prev < opts.tol) {
            report.converged = true;
            break;
        }
    }
    Ok(KsvdOutput { dictionary: psi, codes, report })
}

fn set_coeff<T: Real>(code: &mut SparseVector<T>, index: usize, value: Complex<T>) {
    let pos = code.support().binary_search(&index).expect("atom is in the support");
    code.values_mut()[pos] = value;
}

fn replace_atom<T: Real>(signals: &CMatrix<T>, psi: &mut CMatrix<T>, codes: &[SparseVector<T>], k: usize) -> Result<()> {
    let mut worst = None;
    let mut worst_err = T::zero();
    for (j, code) in codes.iter().enumerate() {
        let e = (signals.column(j) - code.synthesize(psi)).norm();
        if e > worst_err {
            worst_err = e;
            worst = Some(j);
        }
    }
    if let Some(j) = worst {
        let col = signals.column(j);
        let norm = col.norm();
        if norm > T::zero() {
            psi.set_column(k, &col.unscale(norm));
        }
    }
    Ok(())
}

/// Per-subcarrier K-SVD dictionary of one user, DFT-initialized.
pub fn learn_subcarrier_dictionary<T: Real>(
    signals: &CMatrix<T>,
    user: usize,
    subcarrier: usize,
    opts: KsvdOptions,
) -> Result<(Dictionary<T>, KsvdOutput<T>)> {
    let init = Dictionary::<T>::dft(signals.nrows())?;
    let out = ksvd(signals, init.matrix(), opts)?;
    let dict = Dictionary::new(out.dictionary.clone(), DictionaryKind::Ksvd { user, subcarrier })?;
    Ok((dict, out))
}

/// Common dictionary by K-SVD over the pooled training set. `init` defaults
/// to the DFT.
pub fn cdl_ksvd<T: Real>(
    training: &TrainingSet<T>,
    opts: KsvdOptions,
    init: Option<&Dictionary<T>>,
) -> Result<(Dictionary<T>, KsvdOutput<T>)> {
    let dft;
    let init = match init {
        Some(d) => d,
        None => {
            dft = Dictionary::<T>::dft(training.dim())?;
            &dft
        }
    };
    let out = ksvd(&training.signals, init.matrix(), opts)?;
    let dict = Dictionary::new(out.dictionary.clone(), DictionaryKind::Common(CommonMethod::Ksvd))?;
    Ok((dict, out))
}

#[derive(Debug, Clone)]
pub struct ProcrustesOutput<T: Real> {
    pub dictionary: Dictionary<T>,
    /// Singular values of `C = H̃′·H′ᴴ`, descending.
    pub singular_values: Vec<T>,
    /// `C` is numerically rank deficient, so the minimizer is not unique.
    pub rank_deficient: bool,
}

/// Unitary `Ψ` minimizing `‖H′ − Ψ·H̃′‖²_F`: with `C = H̃′·H′ᴴ = U·Σ·Vᴴ`,
/// `Ψ = V·Uᴴ`.
pub fn cdl_op<T: Real>(signals: &CMatrix<T>, codes: &CMatrix<T>) -> Result<ProcrustesOutput<T>> {
    if signals.shape() != codes.shape() {
        return Err(Error::shape(format!(
            "Procrustes needs H′ and H̃′ of equal shape, got {}x{} and {}x{}",
            signals.nrows(),
            signals.ncols(),
            codes.nrows(),
            codes.ncols()
        )));
    }
    let c = codes * signals.adjoint();
    let dec = svd(&c)?;
    let psi = &dec.v * dec.u.adjoint();
    let smax = dec.singular_values[0];
    let smin = *dec.singular_values.last().expect("non-empty");
    let rank_deficient = smax == T::zero() || smin <= T::lit(crate::linalg::PINV_THRESHOLD).max(T::rel_tol()) * smax;
    Ok(ProcrustesOutput {
        dictionary: Dictionary::new(psi, DictionaryKind::Common(CommonMethod::Procrustes))?,
        singular_values: dec.singular_values,
        rank_deficient,
    })
}

/// [`cdl_op`] on a training set carrying codes.
pub fn cdl_op_training<T: Real>(training: &TrainingSet<T>) -> Result<ProcrustesOutput<T>> {
    let codes = training
        .codes
        .as_ref()
        .ok_or_else(|| Error::param("Procrustes learning needs sparse codes for the training set"))?;
    cdl_op(&training.signals, &codes_to_matrix(training.dim(), codes))
}

/// Closed-form optimum `‖H′‖² + ‖H̃′‖² − 2·Σσ_i(C)`.
pub fn procrustes_optimum<T: Real>(signals: &CMatrix<T>, codes: &CMatrix<T>, singular_values: &[T]) -> T {
    let s: T = singular_values.iter().copied().fold(T::zero(), |a, b| a + b);
    signals.norm_squared() + codes.norm_squared() - s * T::lit(2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{random_unitary, unitarity_defect};
    use crate::rng::{complex_normal, stream};
    use rand::Rng;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn objective_edge_cases() {
        let mut rng = stream(1, "obj", &[]);
        let psi: CMatrix<f64> = random_unitary(&mut rng, 4);
        let x = CMatrix::<f64>::from_fn(4, 6, |_, _| complex_normal(&mut rng));
        let h = &psi * &x;
        assert!(objective(&h, &psi, &x).unwrap() < 1e-24);
        let zero = CMatrix::<f64>::zeros(4, 6);
        assert!((objective(&h, &psi, &zero).unwrap() - h.norm_squared()).abs() < 1e-12);
        assert!(objective(&h, &psi, &CMatrix::zeros(4, 5)).is_err());
    }

    #[test]
    fn objective_matches_elementwise_sum() {
        let mut rng = stream(2, "obj", &[]);
        let h = CMatrix::<f64>::from_fn(3, 5, |_, _| complex_normal(&mut rng));
        let psi = CMatrix::<f64>::from_fn(3, 3, |_, _| complex_normal(&mut rng));
        let x = CMatrix::<f64>::from_fn(3, 5, |_, _| complex_normal(&mut rng));
        let mut want = 0.0;
        for i in 0..3 {
            for j in 0..5 {
                let mut acc = h[(i, j)];
                for k in 0..3 {
                    acc -= psi[(i, k)] * x[(k, j)];
                }
                want += acc.norm_sqr();
            }
        }
        assert!((objective(&h, &psi, &x).unwrap() - want).abs() < 1e-12 * want.max(1.0));
    }

    #[test]
    fn rank_one_training_aligns_the_used_atom() {
        let mut rng = stream(3, "rank1", &[]);
        let mut u = CVector::<f64>::from_fn(4, |_, _| complex_normal(&mut rng));
        u.unscale_mut(u.norm());
        let v = CVector::<f64>::from_fn(12, |_, _| complex_normal(&mut rng));
        let h = &u * v.adjoint();
        let init = Dictionary::<f64>::dft(4).unwrap();
        let out = ksvd(&h, init.matrix(), KsvdOptions::new(1)).unwrap();
        let used: Vec<usize> = out.codes.iter().flat_map(|c| c.support().to_vec()).collect();
        let atom = used[0];
        assert!(used.iter().all(|&a| a == atom));
        let align = out.dictionary.column(atom).dotc(&u).norm();
        assert!((align - 1.0).abs() < 1e-8, "{align}");
        for k in 0..4 {
            if k != atom {
                assert_eq!(out.dictionary.column(k), init.matrix().column(k));
            }
        }
    }

    #[test]
    fn ksvd_is_monotone_with_unit_atoms() {
        let mut rng = stream(4, "mono", &[]);
        let h = CMatrix::<f64>::from_fn(8, 60, |_, _| complex_normal(&mut rng));
        let init = Dictionary::<f64>::dft(8).unwrap();
        let opts = KsvdOptions { max_iters: 15, tol: 0.0, ..KsvdOptions::new(3) };
        let out = ksvd(&h, init.matrix(), opts).unwrap();
        let mut prev = out.report.initial_objective;
        for &obj in &out.report.objective_trace {
            assert!(obj <= prev + 1e-9, "{obj} > {prev}");
            prev = obj;
        }
        for col in out.dictionary.column_iter() {
            assert!((col.norm() - 1.0).abs() < 1e-10);
        }
        assert!(out.codes.iter().all(|c| c.nnz() <= 3));
    }

    #[test]
    fn ksvd_rejects_bad_parameters() {
        let h = CMatrix::<f64>::zeros(4, 3);
        let init = CMatrix::<f64>::identity(4, 4);
        assert!(ksvd(&h, &init, KsvdOptions::new(4)).is_err());
        assert!(ksvd(&h, &init, KsvdOptions::new(0)).is_err());
        assert!(ksvd(&CMatrix::<f64>::zeros(3, 3), &init, KsvdOptions::new(1)).is_err());
    }

    #[test]
    fn replacement_flag_revives_unused_atoms() {
        let mut rng = stream(5, "replace", &[]);
        // rank-one training: a single atom ends up carrying every column
        let q: CMatrix<f64> = random_unitary(&mut rng, 6);
        let coeffs: Vec<Complex<f64>> = (0..30).map(|_| complex_normal(&mut rng)).collect();
        let h = CMatrix::<f64>::from_fn(6, 30, |i, j| q[(i, 0)] * coeffs[j]);
        let init = Dictionary::<f64>::dft(6).unwrap();
        let opts = KsvdOptions { replace_unused: true, max_iters: 8, tol: 0.0, ..KsvdOptions::new(1) };
        let out = ksvd(&h, init.matrix(), opts).unwrap();
        assert!(out.report.atoms_replaced > 0);
        let mut prev = out.report.initial_objective;
        for &obj in &out.report.objective_trace {
            assert!(obj <= prev + 1e-9);
            prev = obj;
        }
    }

    #[test]
    fn procrustes_identity_case() {
        let mut rng = stream(6, "opid", &[]);
        let h = CMatrix::<f64>::from_fn(5, 20, |_, _| complex_normal(&mut rng));
        let out = cdl_op(&h, &h).unwrap();
        assert!((out.dictionary.matrix() - CMatrix::<f64>::identity(5, 5)).norm() < 1e-10);
    }

    #[test]
    fn procrustes_recovers_planted_unitary() {
        let mut rng = stream(7, "opq", &[]);
        let q: CMatrix<f64> = random_unitary(&mut rng, 6);
        let x = CMatrix::<f64>::from_fn(6, 30, |_, _| complex_normal(&mut rng));
        let h = &q * &x;
        let out = cdl_op(&h, &x).unwrap();
        assert!((out.dictionary.matrix() - &q).norm() < 1e-8);
        assert!(!out.rank_deficient);
    }

    #[test]
    fn procrustes_beats_random_unitaries_and_meets_trace_identity() {
        let mut rng = stream(8, "opt", &[]);
        let h = CMatrix::<f64>::from_fn(6, 40, |_, _| complex_normal(&mut rng));
        let x = CMatrix::<f64>::from_fn(6, 40, |_, _| complex_normal(&mut rng));
        let out = cdl_op(&h, &x).unwrap();
        let best = objective(&h, out.dictionary.matrix(), &x).unwrap();
        assert!(unitarity_defect(out.dictionary.matrix()) < 1e-10);
        let closed = procrustes_optimum(&h, &x, &out.singular_values);
        assert!((best - closed).abs() <= 1e-8 * best.abs());
        for _ in 0..1000 {
            let w: CMatrix<f64> = random_unitary(&mut rng, 6);
            assert!(best <= objective(&h, &w, &x).unwrap() + 1e-9);
        }
    }

    #[test]
    fn procrustes_flags_rank_deficiency() {
        let mut rng = stream(9, "oprank", &[]);
        let h = CMatrix::<f64>::from_fn(4, 10, |_, _| complex_normal(&mut rng));
        let mut x = CMatrix::<f64>::zeros(4, 10);
        for j in 0..10 {
            x[(0, j)] = c(rng.random::<f64>(), 0.0);
        }
        let out = cdl_op(&h, &x).unwrap();
        assert!(out.rank_deficient);
        assert!(unitarity_defect(out.dictionary.matrix()) < 1e-10);
        assert!(cdl_op(&h, &CMatrix::zeros(4, 9)).is_err());
    }

    #[test]
    fn training_layout_is_user_major() {
        let v = |x: f64| CVector::<f64>::from_element(2, c(x, 0.0));
        // [user][subcarrier][frame]
        let blocks = vec![
            vec![vec![v(0.0), v(1.0)], vec![v(2.0), v(3.0)]],
            vec![vec![v(4.0), v(5.0)], vec![v(6.0), v(7.0)]],
        ];
        let t = TrainingSet::from_blocks(&blocks, None, Provenance::TrueChannels).unwrap();
        assert_eq!(t.layout.columns(), 8);
        for j in 0..8 {
            assert_eq!(t.signals[(0, j)].re, j as f64);
        }
        assert_eq!(t.layout.column(1, 0, 1), 5);
    }

    #[test]
    fn planted_unitary_dictionary_is_recovered() {
        use rand::seq::index::sample;
        for seed in 0..3u64 {
            let mut rng = stream(seed, "planted", &[]);
            let q: CMatrix<f64> = random_unitary(&mut rng, 8);
            let mut x = CMatrix::<f64>::zeros(8, 200);
            for j in 0..200 {
                for i in sample(&mut rng, 8, 2).iter() {
                    x[(i, j)] = complex_normal(&mut rng);
                }
            }
            let h = &q * &x;
            let init = Dictionary::<f64>::dft(8).unwrap();
            let out = ksvd(&h, init.matrix(), KsvdOptions::new(2)).unwrap();
            assert!(out.report.iterations <= 50);
            let last = *out.report.objective_trace.last().unwrap();
            assert!(last <= 1e-6 * h.norm_squared(), "seed {seed}: {last}");
        }
    }
}

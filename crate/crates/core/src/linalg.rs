//! Dense complex linear-algebra helpers. Storage is nalgebra; the SVD is
//! computed by faer in double precision.

use nalgebra::{ComplexField, SymmetricEigen};
use num_complex::Complex;
use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::complex_normal;
use crate::scalar::{CMatrix, CVector, Real};

/// Relative eigenvalue floor below which a Hermitian matrix is rejected as
/// not positive semidefinite.
pub const PSD_TOLERANCE: f64 = 1e-10;

/// Relative singular-value threshold of the pseudo-inverse fallback.
pub const PINV_THRESHOLD: f64 = 1e-10;

/// Principal square root of a Hermitian positive semidefinite matrix.
///
/// Eigenvalues in `[-tol, 0)` are clipped to zero, where
/// `tol = PSD_TOLERANCE · max(1, λ_max)` (`f32` uses its own floor).
pub fn psd_sqrt<T: Real>(r: &CMatrix<T>) -> Result<CMatrix<T>> {
    if !r.is_square() {
        return Err(Error::shape(format!("psd_sqrt needs a square matrix, got {}x{}", r.nrows(), r.ncols())));
    }
    let n = r.nrows();
    if n == 0 {
        return Ok(r.clone());
    }
    let herm_err = (r - r.adjoint()).norm();
    let scale = r.norm().max(T::one());
    if herm_err > T::lit(1e-8) * scale {
        return Err(Error::param(format!("psd_sqrt input is not Hermitian (skew norm {:e})", herm_err.as_f64())));
    }
    let eig = SymmetricEigen::new(r.clone());
    let lmax = eig.eigenvalues.iter().copied().fold(T::zero(), |a, b| a.max(b));
    let floor = T::lit(PSD_TOLERANCE).max(T::rel_tol());
    let tol = floor * lmax.max(T::one());
    let mut roots = Vec::with_capacity(n);
    for &lambda in eig.eigenvalues.iter() {
        if lambda < -tol {
            return Err(Error::NotPsd { eigenvalue: lambda.as_f64(), tolerance: tol.as_f64() });
        }
        roots.push(lambda.max(T::zero()).sqrt());
    }
    let u = &eig.eigenvectors;
    let mut scaled = u.clone();
    for (j, &s) in roots.iter().enumerate() {
        scaled.column_mut(j).scale_mut(s);
    }
    let out = scaled * u.adjoint();
    // symmetrize away round-off so the root is exactly Hermitian
    Ok((&out + out.adjoint()).unscale(T::lit(2.0)))
}

/// Thin SVD `M = U·diag(σ)·Vᴴ` with descending singular values and a
/// canonical phase: the largest-magnitude entry of every left singular
/// vector is real and nonnegative.
#[derive(Debug, Clone)]
pub struct Svd<T: Real> {
    pub u: CMatrix<T>,
    pub singular_values: Vec<T>,
    pub v: CMatrix<T>,
}

pub fn svd<T: Real>(m: &CMatrix<T>) -> Result<Svd<T>> {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return Err(Error::shape("svd of an empty matrix"));
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::param("svd of a matrix with non-finite entries"));
    }
    let fm = faer::Mat::<faer::c64>::from_fn(rows, cols, |i, j| {
        let z = m[(i, j)];
        faer::c64::new(z.re.as_f64(), z.im.as_f64())
    });
    let dec = fm.thin_svd().map_err(|e| Error::param(format!("SVD failed to converge: {e:?}")))?;
    let (fu, fs, fv) = (dec.U(), dec.S().column_vector(), dec.V());
    let k = rows.min(cols);
    let lift = |z: faer::c64| Complex::new(T::lit(z.re), T::lit(z.im));
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| fs[b].re.partial_cmp(&fs[a].re).unwrap_or(std::cmp::Ordering::Equal).then(a.cmp(&b)));
    let mut u = CMatrix::<T>::zeros(rows, k);
    let mut v = CMatrix::<T>::zeros(cols, k);
    let mut singular_values = Vec::with_capacity(k);
    for (dst, &src) in order.iter().enumerate() {
        singular_values.push(T::lit(fs[src].re.max(0.0)));
        let ucol: Vec<Complex<T>> = (0..rows).map(|i| lift(fu[(i, src)])).collect();
        let mut best = 0;
        let mut best_mag = T::zero();
        for (i, z) in ucol.iter().enumerate() {
            let mag = z.modulus();
            if mag > best_mag {
                best_mag = mag;
                best = i;
            }
        }
        let phase = if best_mag > T::zero() {
            ucol[best].unscale(best_mag).conj()
        } else {
            Complex::new(T::one(), T::zero())
        };
        for i in 0..rows {
            u[(i, dst)] = ucol[i] * phase;
        }
        for i in 0..cols {
            v[(i, dst)] = lift(fv[(i, src)]) * phase;
        }
    }
    Ok(Svd { u, singular_values, v })
}

/// Result of a least-squares solve on a (possibly rank-deficient) system.
#[derive(Debug, Clone)]
pub struct LeastSquares<T: Real> {
    pub solution: CVector<T>,
    /// The pseudo-inverse fallback was needed.
    pub degenerate: bool,
}

/// `argmin ‖A·x − y‖₂` by column-pivoted QR, falling back to an SVD
/// pseudo-inverse when `A` is wide or numerically rank deficient.
pub fn least_squares<T: Real>(a: &CMatrix<T>, y: &CVector<T>) -> Result<LeastSquares<T>> {
    let (m, k) = a.shape();
    if y.len() != m {
        return Err(Error::shape(format!("least_squares: {}x{} system with rhs of length {}", m, k, y.len())));
    }
    if k == 0 {
        return Ok(LeastSquares { solution: CVector::zeros(0), degenerate: false });
    }
    let thresh = T::lit(PINV_THRESHOLD).max(T::rel_tol());
    if m >= k {
        let qr = a.clone().col_piv_qr();
        let r = qr.r();
        let r00 = r[(0, 0)].modulus();
        let full_rank = r00 > T::zero() && (0..k).all(|i| r[(i, i)].modulus() > thresh * r00);
        if full_rank {
            let q = qr.q();
            let rhs = q.adjoint() * y;
            let r_sq = r.view((0, 0), (k, k)).into_owned();
            if let Some(mut z) = r_sq.solve_upper_triangular(&rhs) {
                qr.p().inv_permute_rows(&mut z);
                return Ok(LeastSquares { solution: z, degenerate: false });
            }
        }
    }
    if a.iter().all(|z| z.re == T::zero() && z.im == T::zero()) {
        return Ok(LeastSquares { solution: CVector::zeros(k), degenerate: true });
    }
    let dec = svd(a)?;
    let eps = thresh * dec.singular_values[0];
    let uty = dec.u.adjoint() * y;
    let mut solution = CVector::<T>::zeros(k);
    for (i, &s) in dec.singular_values.iter().enumerate() {
        if s > eps {
            solution.axpy(uty[i].unscale(s), &dec.v.column(i), Complex::new(T::one(), T::zero()));
        }
    }
    Ok(LeastSquares { solution, degenerate: true })
}

/// Haar-distributed random unitary matrix (QR of a complex Gaussian matrix
/// with the diagonal phase ambiguity removed).
pub fn random_unitary<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix<T> {
    let z = CMatrix::<T>::from_fn(n, n, |_, _| complex_normal(rng));
    let qr = z.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let mag = d.modulus();
        if mag > T::zero() {
            let ph = d.unscale(mag);
            q.column_mut(j).scale_mut_complex(ph);
        }
    }
    q
}

trait ScaleComplex<T: Real> {
    fn scale_mut_complex(&mut self, c: Complex<T>);
}

impl<T: Real, S> ScaleComplex<T> for nalgebra::Matrix<Complex<T>, nalgebra::Dyn, nalgebra::U1, S>
where
    S: nalgebra::StorageMut<Complex<T>, nalgebra::Dyn, nalgebra::U1>,
{
    fn scale_mut_complex(&mut self, c: Complex<T>) {
        for z in self.iter_mut() {
            *z *= c;
        }
    }
}

/// `‖ΨᴴΨ − I‖_F`.
pub fn unitarity_defect<T: Real>(m: &CMatrix<T>) -> T {
    let g = m.adjoint() * m;
    (g - CMatrix::<T>::identity(m.ncols(), m.ncols())).norm()
}

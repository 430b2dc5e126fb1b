//! Dense complex linear algebra on small Hermitian and unitary matrices.

use nalgebra::{DMatrix, DVector, Dyn, SymmetricEigen, SVD};
use num_complex::Complex64;
use rand::Rng;

use crate::error::{exceeds, Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;
pub type ComplexVector = DVector<Complex64>;

const EIG_MAX_ITERS: usize = 10_000;

#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[inline]
pub fn real(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn identity(d: usize) -> ComplexMatrix {
    ComplexMatrix::identity(d, d)
}

pub fn diag_real(values: &[f64]) -> ComplexMatrix {
    ComplexMatrix::from_diagonal(&ComplexVector::from_iterator(
        values.len(),
        values.iter().map(|&v| real(v)),
    ))
}

/// |v><v|
pub fn outer(v: &ComplexVector) -> ComplexMatrix {
    v * v.adjoint()
}

pub fn frobenius(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// max |a_ij - conj(a_ji)|
pub fn hermitian_defect(m: &ComplexMatrix) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            let d = (m[(i, j)] - m[(j, i)].conj()).norm();
            if d.is_nan() {
                return f64::NAN;
            }
            worst = worst.max(d);
        }
    }
    worst
}

pub fn hermitize(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()) * real(0.5)
}

pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a * b - b * a
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// ||U^dag U - I||_max
pub fn unitarity_defect(u: &ComplexMatrix) -> f64 {
    max_abs_diff(&(u.adjoint() * u), &identity(u.ncols()))
}

pub fn is_finite(m: &ComplexMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Eigen-decomposition of a Hermitian matrix.
///
/// Eigenvalues are sorted in descending order; column `k` of `eigenvectors`
/// belongs to `eigenvalues[k]`. Within a degenerate eigenspace the vectors are
/// orthonormal but otherwise arbitrary.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl SpectralDecomposition {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn vector(&self, k: usize) -> ComplexVector {
        self.eigenvectors.column(k).into_owned()
    }

    /// Σ_k f(λ_k) |v_k><v_k|
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let scaled: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let v = &self.eigenvectors;
        v * diag_real(&scaled) * v.adjoint()
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map(|l| l)
    }
}

/// Spectral decomposition of a Hermitian matrix (checked within `tol_herm`).
pub fn spectral(h: &ComplexMatrix, tol_herm: f64) -> Result<SpectralDecomposition> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "matrix is {}x{}",
            h.nrows(),
            h.ncols()
        )));
    }
    if !is_finite(h) {
        return Err(Error::NonFinite);
    }
    let defect = hermitian_defect(h);
    if exceeds(defect, tol_herm) {
        return Err(Error::NotHermitian { defect });
    }
    eigh(h)
}

/// Hermitian eigensolver without the Hermiticity check; the input is
/// symmetrized first.
pub(crate) fn eigh(h: &ComplexMatrix) -> Result<SpectralDecomposition> {
    let n = h.nrows();
    if n == 0 {
        return Ok(SpectralDecomposition {
            eigenvalues: vec![],
            eigenvectors: ComplexMatrix::zeros(0, 0),
        });
    }
    let eig = SymmetricEigen::try_new(hermitize(h), f64::EPSILON, EIG_MAX_ITERS)
        .ok_or(Error::NoConvergence)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut eigenvectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let col = eig.eigenvectors.column(src);
        let norm = col.norm();
        eigenvectors.set_column(dst, &(col / real(norm)));
    }
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Square root of a numerically PSD matrix.
///
/// Eigenvalues in `[-tol_psd, 0)` are clipped to zero; anything more negative
/// is an error.
pub fn sqrt_psd(m: &ComplexMatrix, tol_psd: f64) -> Result<ComplexMatrix> {
    let sd = eigh(m)?;
    let min = sd.eigenvalues.last().copied().unwrap_or(0.0);
    if exceeds(-min, tol_psd) {
        return Err(Error::NotPositive {
            min_eigenvalue: min,
        });
    }
    let floor = noise_floor(&sd.eigenvalues);
    Ok(sd.map(|l| if l <= floor { 0.0 } else { l.sqrt() }))
}

/// Eigenvalues below this are indistinguishable from round-off.
pub(crate) fn noise_floor(eigenvalues: &[f64]) -> f64 {
    let scale = eigenvalues.iter().map(|l| l.abs()).fold(0.0, f64::max);
    4.0 * eigenvalues.len() as f64 * f64::EPSILON * scale
}

/// SVD with an iteration cap. The convergence threshold matches nalgebra's
/// own default; a bare machine epsilon can stop the sweep on wrong values.
pub(crate) fn svd(m: ComplexMatrix, vectors: bool) -> Option<SVD<Complex64, Dyn, Dyn>> {
    SVD::try_new(m, vectors, vectors, 5.0 * f64::EPSILON, EIG_MAX_ITERS)
}

/// Sum of singular values.
pub fn trace_norm(m: &ComplexMatrix) -> f64 {
    match svd(m.clone(), false) {
        Some(svd) => svd.singular_values.iter().sum(),
        None => f64::NAN,
    }
}

/// exp(iH) for Hermitian H, computed spectrally so the result is unitary to
/// machine precision.
pub fn expi_hermitian(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    let sd = eigh(h)?;
    let v = &sd.eigenvectors;
    let phases = ComplexMatrix::from_diagonal(&ComplexVector::from_iterator(
        sd.len(),
        sd.eigenvalues.iter().map(|&l| Complex64::from_polar(1.0, l)),
    ));
    Ok(v * phases * v.adjoint())
}

/// Number of real parameters of [`offdiag_generator`] for dimension `d`.
pub fn generator_len(d: usize) -> usize {
    d * (d - 1)
}

/// Hermitian matrix with zero diagonal built from `d(d-1)` reals (real and
/// imaginary parts of the strict upper triangle).
///
/// Diagonal generators only rephase basis vectors and leave the projectors
/// unchanged, so they are omitted.
pub fn offdiag_generator(params: &[f64], d: usize) -> ComplexMatrix {
    debug_assert_eq!(params.len(), generator_len(d));
    let mut h = ComplexMatrix::zeros(d, d);
    let mut k = 0;
    for i in 0..d {
        for j in (i + 1)..d {
            let z = c64(params[k], params[k + 1]);
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
            k += 2;
        }
    }
    h
}

/// Gaussian random Hermitian matrix (GUE-like, unnormalized).
pub fn random_hermitian<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    use rand_distr::StandardNormal;
    let mut h = ComplexMatrix::zeros(d, d);
    for i in 0..d {
        h[(i, i)] = real(rng.sample(StandardNormal));
        for j in (i + 1)..d {
            let z = c64(rng.sample(StandardNormal), rng.sample(StandardNormal));
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
        }
    }
    h
}

/// Frobenius norm of the off-diagonal part of `U^dag M U`.
pub fn offdiag_norm_in_basis(m: &ComplexMatrix, u: &ComplexMatrix) -> f64 {
    let t = u.adjoint() * m * u;
    let mut s = 0.0;
    for i in 0..t.nrows() {
        for j in 0..t.ncols() {
            if i != j {
                s += t[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Common eigenbasis of a family of commuting Hermitian matrices.
///
/// Diagonalizes a random real combination of the family and checks that every
/// member is diagonal in the result (off-diagonal Frobenius norm `<= tol`).
/// A generic combination splits every degeneracy that the family splits, so a
/// failed check is retried with a fresh combination, up to `retries` extra
/// attempts. Returns `None` if no attempt passes.
pub fn joint_eigenbasis<R: Rng + ?Sized>(
    ops: &[ComplexMatrix],
    tol: f64,
    retries: usize,
    rng: &mut R,
) -> Option<ComplexMatrix> {
    let d = ops.first()?.nrows();
    if ops.len() == 1 {
        return eigh(&ops[0]).ok().map(|sd| sd.eigenvectors);
    }
    for _ in 0..=retries {
        let mut combo = ComplexMatrix::zeros(d, d);
        for op in ops {
            let w: f64 = rng.random_range(-1.0..1.0);
            combo += op * real(w);
        }
        let Ok(sd) = eigh(&combo) else { continue };
        let basis = sd.eigenvectors;
        if ops.iter().all(|op| offdiag_norm_in_basis(op, &basis) <= tol) {
            return Some(basis);
        }
    }
    None
}

/// Extends orthonormal columns to a full unitary by Gram-Schmidt against the
/// computational basis.
pub fn complete_basis(columns: &[ComplexVector], d: usize) -> ComplexMatrix {
    let mut out: Vec<ComplexVector> = columns.to_vec();
    for k in 0..d {
        if out.len() == d {
            break;
        }
        let mut v = ComplexVector::zeros(d);
        v[k] = real(1.0);
        for u in &out {
            let proj = u.dotc(&v);
            v -= u * proj;
        }
        let n = v.norm();
        if n > 1e-8 {
            out.push(v / real(n));
        }
    }
    ComplexMatrix::from_columns(&out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn trace_norm_of_rank_one_is_frobenius() {
        // Row-scaled rank-one matrices once tripped the SVD sweep.
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let d = rng.random_range(2..6);
            let u = ComplexVector::from_fn(d, |_, _| c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
            let v = ComplexVector::from_fn(d, |_, _| c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
            let mut m = &u * v.adjoint();
            for k in 0..d {
                let s: f64 = if rng.random_range(0.0..1.0) < 0.3 { 1e-3 } else { rng.random_range(0.0..1.0) };
                m.row_mut(k).scale_mut(s);
            }
            assert!((trace_norm(&m) - frobenius(&m)).abs() < 1e-12 * frobenius(&m).max(1.0));
        }
    }

    #[test]
    fn spectral_sorts_descending() {
        let sd = spectral(&diag_real(&[1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0]), 1e-9).unwrap();
        assert!((sd.eigenvalues[0] - 2.0 / 3.0).abs() < 1e-14);
        assert!((sd.eigenvalues[1] - 1.0 / 6.0).abs() < 1e-14);
        assert!((sd.eigenvalues[2] - 1.0 / 6.0).abs() < 1e-14);
    }

    #[test]
    fn spectral_pauli_x() {
        let x = ComplexMatrix::from_row_slice(2, 2, &[real(0.0), real(1.0), real(1.0), real(0.0)]);
        let sd = spectral(&x, 1e-9).unwrap();
        assert!((sd.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!((sd.eigenvalues[1] + 1.0).abs() < 1e-14);
        let plus = sd.vector(0);
        assert!((plus[0].norm() - 0.5f64.sqrt()).abs() < 1e-12);
        assert!(((plus[0] - plus[1]).norm()) < 1e-12);
    }

    #[test]
    fn spectral_identity() {
        let sd = spectral(&identity(4), 1e-9).unwrap();
        assert!(sd.eigenvalues.iter().all(|l| (l - 1.0).abs() < 1e-14));
    }

    #[test]
    fn spectral_rejects_non_hermitian() {
        let m = ComplexMatrix::from_row_slice(2, 2, &[real(0.0), real(1.0), real(0.0), real(0.0)]);
        assert!(matches!(spectral(&m, 1e-9), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn spectral_reconstructs_random_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for d in 1..=16 {
            let h = random_hermitian(d, &mut rng);
            let sd = spectral(&h, 1e-9).unwrap();
            assert!(max_abs_diff(&sd.reconstruct(), &h) < 1e-10, "d = {d}");
            assert!(unitarity_defect(&sd.eigenvectors) < 1e-10);
        }
    }

    #[test]
    fn sqrt_psd_rejects_negative() {
        assert!(matches!(
            sqrt_psd(&diag_real(&[1.0, -0.1]), 1e-9),
            Err(Error::NotPositive { .. })
        ));
        let r = sqrt_psd(&diag_real(&[0.25, -1e-12]), 1e-9).unwrap();
        assert!((r[(0, 0)].re - 0.5).abs() < 1e-14);
        assert_eq!(r[(1, 1)].re, 0.0);
    }

    #[test]
    fn expi_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = random_hermitian(4, &mut rng);
        assert!(unitarity_defect(&expi_hermitian(&h).unwrap()) < 1e-12);
    }

    #[test]
    fn joint_eigenbasis_splits_degeneracy() {
        // diag(1,1,2) and a matrix mixing the first two basis vectors.
        let a = diag_real(&[1.0, 1.0, 2.0]);
        let mut b = ComplexMatrix::zeros(3, 3);
        b[(0, 1)] = real(1.0);
        b[(1, 0)] = real(1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u = joint_eigenbasis(&[a.clone(), b.clone()], 1e-10, 5, &mut rng).unwrap();
        assert!(offdiag_norm_in_basis(&a, &u) < 1e-10);
        assert!(offdiag_norm_in_basis(&b, &u) < 1e-10);
    }

    #[test]
    fn joint_eigenbasis_fails_for_noncommuting() {
        let z = diag_real(&[1.0, -1.0]);
        let x = ComplexMatrix::from_row_slice(2, 2, &[real(0.0), real(1.0), real(1.0), real(0.0)]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(joint_eigenbasis(&[z, x], 1e-8, 5, &mut rng).is_none());
    }

    #[test]
    fn complete_basis_is_unitary() {
        let v = ComplexVector::from_vec(vec![real(0.6), c64(0.0, 0.8), real(0.0)]);
        let u = complete_basis(std::slice::from_ref(&v), 3);
        assert!(unitarity_defect(&u) < 1e-12);
        assert!((u.column(0) - &v).norm() < 1e-15);
    }
}

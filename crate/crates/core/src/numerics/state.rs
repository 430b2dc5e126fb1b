//! Density matrices, pure states and product bases.

use num_complex::Complex64;

use super::linalg::{
    self, diag_real, frobenius, hermitian_defect, hermitize, identity, is_finite, kron, outer,
    real, unitarity_defect, ComplexMatrix, ComplexVector,
};
use crate::error::{exceeds, Error, Result};

/// Numerical tolerances for state validation and spectral work.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Tolerances {
    pub herm: f64,
    pub psd: f64,
    pub trace: f64,
    pub spec: f64,
    pub supp: f64,
    pub norm: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            herm: 1e-9,
            psd: 1e-9,
            trace: 1e-9,
            spec: 1e-10,
            supp: 1e-10,
            norm: 1e-9,
        }
    }
}

/// Hermitian, positive semidefinite, unit-trace matrix together with the
/// dimensions of its tensor factors.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    dims: Vec<usize>,
}

/// Checks every density-matrix invariant and reports the first violation.
pub fn validate_density(
    matrix: ComplexMatrix,
    dims: &[usize],
    tol: &Tolerances,
) -> Result<DensityMatrix> {
    check_dims(&matrix, dims)?;
    if !is_finite(&matrix) {
        return Err(Error::NonFinite);
    }
    let defect = hermitian_defect(&matrix);
    if exceeds(defect, tol.herm) {
        return Err(Error::NotHermitian { defect });
    }
    let defect = (matrix.trace().re - 1.0).abs();
    if exceeds(defect, tol.trace) {
        return Err(Error::TraceNotOne { defect });
    }
    // A PSD unit-trace matrix has |a_ij| <= 1; larger entries would only feed
    // overflow into the eigensolver.
    let big = linalg::max_abs(&matrix);
    let matrix = hermitize(&matrix);
    let min_eigenvalue = if big > 1.0 + tol.trace {
        -big
    } else {
        linalg::eigh(&matrix)?
            .eigenvalues
            .last()
            .copied()
            .unwrap_or(0.0)
    };
    if exceeds(-min_eigenvalue, tol.psd) {
        return Err(Error::NotPositive { min_eigenvalue });
    }
    Ok(DensityMatrix {
        matrix,
        dims: dims.to_vec(),
    })
}

fn check_dims(matrix: &ComplexMatrix, dims: &[usize]) -> Result<()> {
    if !matrix.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "matrix is {}x{}",
            matrix.nrows(),
            matrix.ncols()
        )));
    }
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::DimensionMismatch(format!(
            "invalid subsystem dims {dims:?}"
        )));
    }
    let total = dims
        .iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .unwrap_or(usize::MAX);
    if total != matrix.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "dims {dims:?} do not match matrix dimension {}",
            matrix.nrows()
        )));
    }
    Ok(())
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix, dims: &[usize]) -> Result<Self> {
        validate_density(matrix, dims, &Tolerances::default())
    }

    /// Wraps a matrix known to be a valid state by construction.
    pub(crate) fn from_parts(matrix: ComplexMatrix, dims: Vec<usize>) -> Self {
        debug_assert_eq!(dims.iter().product::<usize>(), matrix.nrows());
        Self { matrix, dims }
    }

    pub fn maximally_mixed(dims: &[usize]) -> Self {
        let d: usize = dims.iter().product();
        Self::from_parts(identity(d) / real(d as f64), dims.to_vec())
    }

    pub fn from_pure(psi: &PureState, dims: &[usize]) -> Result<Self> {
        let d: usize = dims.iter().product();
        if d != psi.dim() {
            return Err(Error::DimensionMismatch(format!(
                "dims {dims:?} vs state dimension {}",
                psi.dim()
            )));
        }
        Ok(Self::from_parts(psi.projector(), dims.to_vec()))
    }

    /// Convex mixture Σ w_k ρ_k with weights summing to one.
    pub fn mixture(parts: &[(f64, &DensityMatrix)]) -> Result<Self> {
        let first = parts.first().ok_or_else(|| Error::BadParameter("empty mixture".into()))?;
        let dims = first.1.dims.clone();
        let mut m = ComplexMatrix::zeros(first.1.dim(), first.1.dim());
        for (w, rho) in parts {
            if rho.dims != dims {
                return Err(Error::DimensionMismatch("mixture components differ in dims".into()));
            }
            m += &rho.matrix * real(*w);
        }
        validate_density(m, &dims, &Tolerances::default())
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// a ⊗ b with concatenated subsystem dims.
    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self::from_parts(kron(&self.matrix, &other.matrix), dims)
    }

    /// Reduced state of subsystem `keep`.
    pub fn partial_trace(&self, keep: usize) -> Result<DensityMatrix> {
        let (left, d, right) = split_dims(&self.dims, keep)?;
        let mut out = ComplexMatrix::zeros(d, d);
        for a in 0..d {
            for b in 0..d {
                let mut acc = Complex64::new(0.0, 0.0);
                for l in 0..left {
                    for r in 0..right {
                        acc += self.matrix[((l * d + a) * right + r, (l * d + b) * right + r)];
                    }
                }
                out[(a, b)] = acc;
            }
        }
        Ok(Self::from_parts(out, vec![d]))
    }

    /// Projective pinching Σ_k Π_k ρ Π_k onto the rank-one projectors of a
    /// product basis.
    pub fn dephase(&self, basis: &ProductBasis) -> Result<DensityMatrix> {
        let probs = self.diagonal_in(basis)?;
        let u = basis.full();
        Ok(Self::from_parts(
            &u * diag_real(&probs) * u.adjoint(),
            self.dims.clone(),
        ))
    }

    /// Diagonal of the state in a product basis; index `k = i_1 d_2 ... + i_n`
    /// with the first subsystem most significant.
    pub fn diagonal_in(&self, basis: &ProductBasis) -> Result<Vec<f64>> {
        if basis.dims() != self.dims {
            return Err(Error::DimensionMismatch(format!(
                "basis dims {:?} vs state dims {:?}",
                basis.dims(),
                self.dims
            )));
        }
        let u = basis.full();
        Ok(diagonal_in_unitary(&self.matrix, &u))
    }

    /// Hilbert-Schmidt distance to another state.
    pub fn hs_distance(&self, other: &DensityMatrix) -> f64 {
        frobenius(&(&self.matrix - &other.matrix))
    }

    pub fn max_entry_deviation(&self, other: &DensityMatrix) -> f64 {
        linalg::max_abs_diff(&self.matrix, &other.matrix)
    }

    /// U ρ U^dag for a unitary on the full space.
    pub fn conjugate(&self, u: &ComplexMatrix) -> DensityMatrix {
        Self::from_parts(hermitize(&(u * &self.matrix * u.adjoint())), self.dims.clone())
    }
}

/// Real diagonal of `U^dag M U`.
pub(crate) fn diagonal_in_unitary(m: &ComplexMatrix, u: &ComplexMatrix) -> Vec<f64> {
    (0..u.ncols())
        .map(|k| {
            let col = u.column(k);
            col.dotc(&(m * col)).re
        })
        .collect()
}

/// (product of dims before, dim, product of dims after) for subsystem `k`.
pub(crate) fn split_dims(dims: &[usize], k: usize) -> Result<(usize, usize, usize)> {
    if k >= dims.len() {
        return Err(Error::IndexOutOfRange {
            index: k,
            count: dims.len(),
        });
    }
    Ok((
        dims[..k].iter().product(),
        dims[k],
        dims[k + 1..].iter().product(),
    ))
}

/// Normalized state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: ComplexVector,
}

impl PureState {
    pub fn new(amplitudes: ComplexVector, tol_norm: f64) -> Result<Self> {
        let defect = (amplitudes.norm_squared() - 1.0).abs();
        if exceeds(defect, tol_norm) {
            return Err(Error::NotNormalized { defect });
        }
        Ok(Self { amplitudes })
    }

    /// Normalizes arbitrary nonzero amplitudes.
    pub fn normalized(amplitudes: ComplexVector) -> Result<Self> {
        let n = amplitudes.norm();
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::BadParameter("zero or non-finite state vector".into()));
        }
        Ok(Self {
            amplitudes: amplitudes / real(n),
        })
    }

    pub fn from_slice(amps: &[Complex64]) -> Result<Self> {
        Self::new(ComplexVector::from_column_slice(amps), Tolerances::default().norm)
    }

    /// Computational basis vector |k> in dimension d.
    pub fn basis(d: usize, k: usize) -> Self {
        let mut v = ComplexVector::zeros(d);
        v[k] = real(1.0);
        Self { amplitudes: v }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &ComplexVector {
        &self.amplitudes
    }

    pub fn projector(&self) -> ComplexMatrix {
        outer(&self.amplitudes)
    }

    pub fn inner(&self, other: &PureState) -> Complex64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    pub fn tensor(&self, other: &PureState) -> PureState {
        Self {
            amplitudes: self.amplitudes.kronecker(&other.amplitudes),
        }
    }
}

/// One orthonormal basis per subsystem, stored as unitaries whose columns are
/// the basis vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductBasis {
    factors: Vec<ComplexMatrix>,
}

impl ProductBasis {
    pub fn new(factors: Vec<ComplexMatrix>, tol: f64) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::DimensionMismatch("empty product basis".into()));
        }
        for u in &factors {
            if !u.is_square() || u.nrows() == 0 {
                return Err(Error::DimensionMismatch("basis factor is not square".into()));
            }
            if !is_finite(u) {
                return Err(Error::NonFinite);
            }
            let defect = unitarity_defect(u);
            if exceeds(defect, tol) {
                return Err(Error::BadParameter(format!(
                    "basis factor is not unitary (defect {defect:.3e})"
                )));
            }
        }
        Ok(Self { factors })
    }

    pub(crate) fn from_unitaries(factors: Vec<ComplexMatrix>) -> Self {
        Self { factors }
    }

    pub fn computational(dims: &[usize]) -> Self {
        Self {
            factors: dims.iter().map(|&d| identity(d)).collect(),
        }
    }

    pub fn factors(&self) -> &[ComplexMatrix] {
        &self.factors
    }

    pub fn factor(&self, k: usize) -> &ComplexMatrix {
        &self.factors[k]
    }

    pub fn dims(&self) -> Vec<usize> {
        self.factors.iter().map(|u| u.nrows()).collect()
    }

    /// Full unitary U_1 ⊗ ... ⊗ U_n.
    pub fn full(&self) -> ComplexMatrix {
        let mut it = self.factors.iter();
        let first = it.next().expect("non-empty basis").clone();
        it.fold(first, |acc, u| kron(&acc, u))
    }

    pub fn vector(&self, subsystem: usize, k: usize) -> ComplexVector {
        self.factors[subsystem].column(k).into_owned()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::linalg::c64;

    fn ket(d: usize, k: usize) -> DensityMatrix {
        DensityMatrix::from_pure(&PureState::basis(d, k), &[d]).unwrap()
    }

    fn plus() -> DensityMatrix {
        let m = ComplexMatrix::from_element(2, 2, real(0.5));
        DensityMatrix::new(m, &[2]).unwrap()
    }

    fn bell() -> DensityMatrix {
        let s = 0.5f64.sqrt();
        let psi = PureState::from_slice(&[real(s), real(0.0), real(0.0), real(s)]).unwrap();
        DensityMatrix::from_pure(&psi, &[2, 2]).unwrap()
    }

    #[test]
    fn validate_accepts_valid_states() {
        assert!(DensityMatrix::new(identity(2) / real(2.0), &[2]).is_ok());
        assert!(DensityMatrix::new(ComplexMatrix::from_element(2, 2, real(0.5)), &[2]).is_ok());
    }

    #[test]
    fn validate_reports_trace_defect() {
        match DensityMatrix::new(diag_real(&[1.0, 0.1]), &[2]) {
            Err(Error::TraceNotOne { defect }) => assert!((defect - 0.1).abs() < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn validate_reports_each_violation() {
        let mut m = diag_real(&[0.5, 0.5]);
        m[(0, 1)] = real(0.3);
        assert!(matches!(
            DensityMatrix::new(m, &[2]),
            Err(Error::NotHermitian { defect }) if (defect - 0.3).abs() < 1e-12
        ));
        assert!(matches!(
            DensityMatrix::new(diag_real(&[1.5, -0.5]), &[2]),
            Err(Error::NotPositive { .. })
        ));
        assert!(matches!(
            DensityMatrix::new(identity(4) / real(4.0), &[2, 3]),
            Err(Error::DimensionMismatch(_))
        ));
        let mut m = diag_real(&[0.5, 0.5]);
        m[(0, 0)] = c64(f64::NAN, 0.0);
        assert!(matches!(DensityMatrix::new(m, &[2]), Err(Error::NonFinite)));
    }

    #[test]
    fn validate_rejects_huge_entries_without_eigensolve() {
        let mut m = diag_real(&[0.5, 0.5]);
        m[(0, 1)] = real(1e300);
        m[(1, 0)] = real(1e300);
        assert!(matches!(DensityMatrix::new(m, &[2]), Err(Error::NotPositive { .. })));
    }

    #[test]
    fn tensor_examples() {
        let t = ket(2, 0).tensor(&ket(2, 1));
        assert_eq!(t.dims(), &[2, 2]);
        assert!(linalg::max_abs_diff(t.matrix(), &diag_real(&[0.0, 1.0, 0.0, 0.0])) < 1e-15);

        let mm = DensityMatrix::maximally_mixed(&[2]).tensor(&DensityMatrix::maximally_mixed(&[2]));
        assert!(linalg::max_abs_diff(mm.matrix(), &(identity(4) / real(4.0))) < 1e-15);

        let t = ket(2, 0).tensor(&DensityMatrix::maximally_mixed(&[3]));
        let third = 1.0 / 3.0;
        assert!(
            linalg::max_abs_diff(t.matrix(), &diag_real(&[third, third, third, 0.0, 0.0, 0.0]))
                < 1e-15
        );
    }

    #[test]
    fn partial_trace_examples() {
        let a = bell().partial_trace(0).unwrap();
        assert!(linalg::max_abs_diff(a.matrix(), &(identity(2) / real(2.0))) < 1e-15);

        let prod = plus().tensor(&DensityMatrix::maximally_mixed(&[3]));
        assert!(linalg::max_abs_diff(prod.partial_trace(0).unwrap().matrix(), plus().matrix()) < 1e-15);
        assert!(matches!(prod.partial_trace(2), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn partial_trace_of_three_parties() {
        let s = ket(2, 1).tensor(&plus()).tensor(&ket(3, 2));
        assert!(linalg::max_abs_diff(s.partial_trace(1).unwrap().matrix(), plus().matrix()) < 1e-15);
        assert!(linalg::max_abs_diff(s.partial_trace(2).unwrap().matrix(), ket(3, 2).matrix()) < 1e-15);
    }

    #[test]
    fn dephase_examples() {
        let rho = plus().tensor(&ket(2, 0));
        let out = rho.dephase(&ProductBasis::computational(&[2, 2])).unwrap();
        let want = DensityMatrix::maximally_mixed(&[2]).tensor(&ket(2, 0));
        assert!(out.max_entry_deviation(&want) < 1e-15);

        let out = bell().dephase(&ProductBasis::computational(&[2, 2])).unwrap();
        assert!(linalg::max_abs_diff(out.matrix(), &diag_real(&[0.5, 0.0, 0.0, 0.5])) < 1e-15);
    }

    #[test]
    fn pure_state_norm_check() {
        assert!(matches!(
            PureState::from_slice(&[real(1.0), real(1.0)]),
            Err(Error::NotNormalized { .. })
        ));
        assert!(PureState::normalized(ComplexVector::zeros(2)).is_err());
    }
}

//! Fidelity, entropies and relative entropy (all logarithms base 2).

use super::linalg::{eigh, sqrt_psd, trace_norm};
use super::state::{DensityMatrix, Tolerances};
use crate::error::{Error, Result};

fn same_dim(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<()> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(format!(
            "states of dimension {} and {}",
            rho.dim(),
            sigma.dim()
        )));
    }
    Ok(())
}

/// Uhlmann fidelity F = (Tr √(√ρ σ √ρ))², evaluated as ‖√ρ √σ‖₁².
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    same_dim(rho, sigma)?;
    let tol = Tolerances::default().psd;
    let a = sqrt_psd(rho.matrix(), tol)?;
    let b = sqrt_psd(sigma.matrix(), tol)?;
    let root = trace_norm(&(a * b));
    if root.is_nan() {
        return Err(Error::NoConvergence);
    }
    Ok((root * root).clamp(0.0, 1.0))
}

fn xlog2x(x: f64) -> f64 {
    if x > 0.0 {
        x * x.log2()
    } else {
        0.0
    }
}

/// Shannon entropy in bits; non-positive entries contribute nothing.
pub fn shannon_entropy(p: &[f64]) -> f64 {
    -p.iter().map(|&x| xlog2x(x)).sum::<f64>()
}

/// Von Neumann entropy in bits.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    let sd = eigh(rho.matrix())?;
    Ok(shannon_entropy(&sd.eigenvalues).max(0.0))
}

/// S(ρ‖σ) = Tr ρ log₂ ρ − Tr ρ log₂ σ with the default support threshold.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    relative_entropy_with(rho, sigma, Tolerances::default().supp)
}

/// Relative entropy with an explicit support threshold: eigenvectors of σ
/// with eigenvalue `<= tol_supp` count as outside its support, and the result
/// is `+inf` when ρ puts more than `tol_supp` weight there.
pub fn relative_entropy_with(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    tol_supp: f64,
) -> Result<f64> {
    same_dim(rho, sigma)?;
    let r = eigh(rho.matrix())?;
    let s = eigh(sigma.matrix())?;
    let own: f64 = r.eigenvalues.iter().map(|&l| xlog2x(l)).sum();
    let mut cross = 0.0;
    for (j, &sj) in s.eigenvalues.iter().enumerate() {
        let v = s.eigenvectors.column(j);
        let weight = v.dotc(&(rho.matrix() * v)).re;
        if sj <= tol_supp {
            if weight > tol_supp {
                return Ok(f64::INFINITY);
            }
            continue;
        }
        cross += weight * sj.log2();
    }
    Ok((own - cross).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::linalg::{real, ComplexMatrix};
    use crate::numerics::state::PureState;

    fn ket(k: usize) -> DensityMatrix {
        DensityMatrix::from_pure(&PureState::basis(2, k), &[2]).unwrap()
    }

    fn plus() -> DensityMatrix {
        DensityMatrix::new(ComplexMatrix::from_element(2, 2, real(0.5)), &[2]).unwrap()
    }

    #[test]
    fn fidelity_examples() {
        let mm = DensityMatrix::maximally_mixed(&[2]);
        assert!((fidelity(&mm, &mm).unwrap() - 1.0).abs() < 1e-12);
        assert!((fidelity(&ket(0), &ket(0)).unwrap() - 1.0).abs() < 1e-12);
        assert!(fidelity(&ket(0), &ket(1)).unwrap() < 1e-12);
        // |<0|+>|^2
        assert!((fidelity(&ket(0), &plus()).unwrap() - 0.5).abs() < 1e-12);
        assert!((fidelity(&ket(0), &mm).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn fidelity_dimension_mismatch() {
        let a = DensityMatrix::maximally_mixed(&[2]);
        let b = DensityMatrix::maximally_mixed(&[3]);
        assert!(matches!(fidelity(&a, &b), Err(Error::DimensionMismatch(_))));
        assert!(matches!(relative_entropy(&a, &b), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn relative_entropy_examples() {
        let mm = DensityMatrix::maximally_mixed(&[2]);
        assert!(relative_entropy(&plus(), &plus()).unwrap().abs() < 1e-12);
        assert!((relative_entropy(&ket(0), &mm).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(relative_entropy(&ket(0), &ket(1)).unwrap(), f64::INFINITY);
    }

    #[test]
    fn entropies() {
        assert!((von_neumann_entropy(&DensityMatrix::maximally_mixed(&[2, 2])).unwrap() - 2.0).abs() < 1e-12);
        assert!(von_neumann_entropy(&plus()).unwrap().abs() < 1e-12);
        assert!((shannon_entropy(&[0.5, 0.0, 0.5]) - 1.0).abs() < 1e-15);
    }
}

//! Qubit states as Bloch vectors, with ρ = (1 + v·σ)/2 and σ_z|0> = +|0>.

use serde::{Deserialize, Serialize};

use super::linalg::{c64, real, ComplexMatrix};
use super::state::DensityMatrix;
use crate::error::{exceeds, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn dot(&self, o: &BlochVector) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(&self, o: &BlochVector) -> BlochVector {
        BlochVector::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn sub(&self, o: &BlochVector) -> BlochVector {
        BlochVector::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    /// v·σ
    pub fn pauli_sum(&self) -> ComplexMatrix {
        ComplexMatrix::from_row_slice(
            2,
            2,
            &[
                real(self.z),
                c64(self.x, -self.y),
                c64(self.x, self.y),
                real(-self.z),
            ],
        )
    }
}

/// Bloch coefficients of a 2x2 Hermitian matrix `m = (t + v·σ)/2`.
pub(crate) fn bloch_coefficients(m: &ComplexMatrix) -> BlochVector {
    let off = m[(0, 1)] + m[(1, 0)].conj();
    BlochVector::new(off.re, -off.im, (m[(0, 0)] - m[(1, 1)]).re)
}

pub fn bloch_of(rho: &DensityMatrix) -> Result<BlochVector> {
    if rho.dims() != [2] {
        return Err(Error::NotQubit(rho.dims().to_vec()));
    }
    Ok(bloch_coefficients(rho.matrix()))
}

pub fn qubit_of(v: &BlochVector, tol_norm: f64) -> Result<DensityMatrix> {
    let norm = v.norm();
    if exceeds(norm - 1.0, tol_norm) {
        return Err(Error::BlochNormExceeded { norm });
    }
    let m = (ComplexMatrix::identity(2, 2) + v.pauli_sum()) * real(0.5);
    Ok(DensityMatrix::from_parts(m, vec![2]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::state::PureState;

    #[test]
    fn conventions() {
        let zero = DensityMatrix::from_pure(&PureState::basis(2, 0), &[2]).unwrap();
        assert_eq!(bloch_of(&zero).unwrap(), BlochVector::new(0.0, 0.0, 1.0));
        let plus = DensityMatrix::new(ComplexMatrix::from_element(2, 2, real(0.5)), &[2]).unwrap();
        let v = bloch_of(&plus).unwrap();
        assert!((v.x - 1.0).abs() < 1e-15 && v.y.abs() < 1e-15 && v.z.abs() < 1e-15);
        let mm = DensityMatrix::maximally_mixed(&[2]);
        assert_eq!(bloch_of(&mm).unwrap(), BlochVector::default());
    }

    #[test]
    fn plus_i_points_along_y() {
        let s = 0.5f64.sqrt();
        let psi = PureState::from_slice(&[real(s), c64(0.0, s)]).unwrap();
        let rho = DensityMatrix::from_pure(&psi, &[2]).unwrap();
        let v = bloch_of(&rho).unwrap();
        assert!((v.y - 1.0).abs() < 1e-15);
    }

    #[test]
    fn errors() {
        let two = DensityMatrix::maximally_mixed(&[2, 2]);
        assert!(matches!(bloch_of(&two), Err(Error::NotQubit(_))));
        assert!(matches!(
            qubit_of(&BlochVector::new(1.0, 1.0, 0.0), 1e-9),
            Err(Error::BlochNormExceeded { .. })
        ));
    }
}

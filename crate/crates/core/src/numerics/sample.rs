//! Seeded random sampling of unitaries, states and probability vectors.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};

use super::linalg::{c64, diag_real, real, ComplexMatrix, ComplexVector};
use super::state::{DensityMatrix, PureState};
use crate::error::{Error, Result};

/// Deterministic random source; every draw is a function of (seed, stream).
#[derive(Debug, Clone)]
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self::stream(seed, 0)
    }

    /// Independent stream `stream` derived from `seed`.
    pub fn stream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { rng }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }

    fn gaussian_complex(&mut self) -> num_complex::Complex64 {
        let re: f64 = self.rng.sample(StandardNormal);
        let im: f64 = self.rng.sample(StandardNormal);
        c64(re, im)
    }

    /// Haar-distributed unitary: QR of a complex Ginibre matrix with the
    /// phases of R's diagonal moved into Q.
    pub fn haar_unitary(&mut self, d: usize) -> Result<ComplexMatrix> {
        if d == 0 {
            return Err(Error::BadParameter("dimension must be positive".into()));
        }
        let z = ComplexMatrix::from_fn(d, d, |_, _| self.gaussian_complex());
        let qr = z.qr();
        let (mut q, r) = qr.unpack();
        for k in 0..d {
            let rk = r[(k, k)];
            let phase = if rk.norm() > 0.0 { rk / rk.norm() } else { real(1.0) };
            let col = q.column(k) * phase;
            q.set_column(k, &col);
        }
        Ok(q)
    }

    pub fn pure_state(&mut self, d: usize) -> Result<PureState> {
        if d == 0 {
            return Err(Error::BadParameter("dimension must be positive".into()));
        }
        let v = ComplexVector::from_fn(d, |_, _| self.gaussian_complex());
        PureState::normalized(v)
    }

    /// Uniform point on the probability simplex with `n` vertices.
    pub fn simplex(&mut self, n: usize) -> Result<Vec<f64>> {
        if n == 0 {
            return Err(Error::BadParameter("simplex size must be positive".into()));
        }
        let e: Vec<f64> = (0..n).map(|_| self.rng.sample::<f64, _>(Exp1)).collect();
        let total: f64 = e.iter().sum();
        Ok(e.into_iter().map(|x| x / total).collect())
    }

    /// U D U^dag with Haar U and simplex-distributed D of the given rank.
    pub fn density(&mut self, dims: &[usize], rank: usize) -> Result<DensityMatrix> {
        let d: usize = dims.iter().product();
        if d == 0 || rank == 0 || rank > d {
            return Err(Error::BadParameter(format!(
                "rank {rank} invalid for dimension {d}"
            )));
        }
        let u = self.haar_unitary(d)?;
        let mut p = self.simplex(rank)?;
        p.resize(d, 0.0);
        let m = &u * diag_real(&p) * u.adjoint();
        Ok(DensityMatrix::from_parts(super::linalg::hermitize(&m), dims.to_vec()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::linalg::unitarity_defect;

    #[test]
    fn haar_is_unitary() {
        let mut s = Sampler::new(11);
        for d in 1..=6 {
            assert!(unitarity_defect(&s.haar_unitary(d).unwrap()) <= 1e-12);
        }
    }

    #[test]
    fn simplex_sums_to_one() {
        let p = Sampler::new(3).simplex(4).unwrap();
        assert_eq!(p.len(), 4);
        assert!(p.iter().all(|&x| x >= 0.0));
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn deterministic_given_seed() {
        let a = Sampler::new(5).haar_unitary(3).unwrap();
        let b = Sampler::new(5).haar_unitary(3).unwrap();
        assert_eq!(a, b);
        let c = Sampler::stream(5, 1).haar_unitary(3).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn bad_parameters() {
        let mut s = Sampler::new(0);
        assert!(s.haar_unitary(0).is_err());
        assert!(s.simplex(0).is_err());
        assert!(s.density(&[2], 3).is_err());
        assert!(s.density(&[2], 0).is_err());
    }

    #[test]
    fn density_is_valid() {
        let mut s = Sampler::new(9);
        for rank in 1..=4 {
            let rho = s.density(&[2, 2], rank).unwrap();
            let v = DensityMatrix::new(rho.matrix().clone(), &[2, 2]);
            assert!(v.is_ok());
        }
    }

    #[test]
    fn haar_first_moment_is_small() {
        // E[U] = 0 for Haar measure.
        let mut s = Sampler::new(21);
        let n = 4000;
        let mut acc = ComplexMatrix::zeros(2, 2);
        for _ in 0..n {
            acc += s.haar_unitary(2).unwrap();
        }
        acc /= real(n as f64);
        assert!(acc.iter().all(|z| z.norm() < 0.05));
    }
}

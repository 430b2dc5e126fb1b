//! Kraus channels: validation, application, standard constructors and the
//! unital / semi-classical classification of local noise.

use serde::{Deserialize, Serialize};

use crate::error::{exceeds, Error, Result};
use crate::numerics::bloch::{bloch_coefficients, BlochVector};
use crate::numerics::linalg::{
    self, c64, commutator, frobenius, identity, kron, max_abs, max_abs_diff, real, ComplexMatrix,
};
use crate::numerics::state::split_dims;
use crate::numerics::{DensityMatrix, Sampler};

/// Default trace-preservation tolerance.
pub const TOL_TP: f64 = 1e-9;

/// Default tolerance for unitality and semi-classicality decisions.
pub const TOL_CLASSIFY: f64 = 1e-8;

/// Retries of the randomized simultaneous diagonalization.
const JOINT_DIAG_RETRIES: usize = 5;

/// Trace-preserving completely positive map in Kraus form.
///
/// Two channels are equal when their actions agree (see
/// [`KrausChannel::same_action`]); the Kraus list itself is not unique.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    dim: usize,
    kraus: Vec<ComplexMatrix>,
}

/// Validates a Kraus list: non-empty, square, equal dimensions, and
/// ‖Σ E†E − I‖_max ≤ `tol_tp`.
pub fn validate_channel(kraus: Vec<ComplexMatrix>, tol_tp: f64) -> Result<KrausChannel> {
    let first = kraus.first().ok_or(Error::EmptyKrausList)?;
    let dim = first.nrows();
    if dim == 0 {
        return Err(Error::DimensionMismatch("zero-dimensional Kraus operator".into()));
    }
    for (k, e) in kraus.iter().enumerate() {
        if e.nrows() != dim || e.ncols() != dim {
            return Err(Error::DimensionMismatch(format!(
                "Kraus operator {k} is {}x{}, expected {dim}x{dim}",
                e.nrows(),
                e.ncols()
            )));
        }
        if !linalg::is_finite(e) {
            return Err(Error::NonFinite);
        }
    }
    let sum = kraus
        .iter()
        .fold(ComplexMatrix::zeros(dim, dim), |acc, e| acc + e.adjoint() * e);
    let defect = max_abs_diff(&sum, &identity(dim));
    if exceeds(defect, tol_tp) {
        return Err(Error::NotTracePreserving { defect });
    }
    Ok(KrausChannel { dim, kraus })
}

impl KrausChannel {
    pub fn new(kraus: Vec<ComplexMatrix>, tol_tp: f64) -> Result<Self> {
        validate_channel(kraus, tol_tp)
    }

    fn from_parts(kraus: Vec<ComplexMatrix>) -> Self {
        let dim = kraus[0].nrows();
        Self { dim, kraus }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn identity(d: usize) -> Self {
        Self::from_parts(vec![identity(d)])
    }

    /// Off-diagonal entries scaled by (1 − p), diagonal kept. Kraus form
    /// {√(1−p)·I} ∪ {√p·|i><i|}.
    pub fn phase_damping(d: usize, p: f64) -> Result<Self> {
        check_unit_interval("p", p)?;
        check_positive_dim(d)?;
        let mut kraus = vec![identity(d) * real((1.0 - p).sqrt())];
        for i in 0..d {
            let mut e = ComplexMatrix::zeros(d, d);
            e[(i, i)] = real(p.sqrt());
            kraus.push(e);
        }
        Ok(Self::from_parts(kraus))
    }

    /// Qubit decay towards |0>: E₀ = diag(1, √(1−γ)), E₁ = √γ·|0><1|.
    pub fn amplitude_damping(gamma: f64) -> Result<Self> {
        check_unit_interval("gamma", gamma)?;
        let e0 = linalg::diag_real(&[1.0, (1.0 - gamma).sqrt()]);
        let mut e1 = ComplexMatrix::zeros(2, 2);
        e1[(0, 1)] = real(gamma.sqrt());
        Ok(Self::from_parts(vec![e0, e1]))
    }

    /// ρ → (1 − q)ρ + q·I/d, realized with the d² Weyl operators X^a Z^b.
    pub fn depolarizing(d: usize, q: f64) -> Result<Self> {
        check_unit_interval("q", q)?;
        check_positive_dim(d)?;
        let dd = (d * d) as f64;
        let omega = std::f64::consts::TAU / d as f64;
        let mut kraus = Vec::with_capacity(d * d);
        for a in 0..d {
            for b in 0..d {
                let weight = if a == 0 && b == 0 {
                    1.0 - q + q / dd
                } else {
                    q / dd
                };
                // (X^a Z^b)|j> = ω^{bj} |j + a>
                let mut w = ComplexMatrix::zeros(d, d);
                for j in 0..d {
                    w[((j + a) % d, j)] = num_complex::Complex64::from_polar(
                        weight.sqrt(),
                        omega * (b * j) as f64,
                    );
                }
                kraus.push(w);
            }
        }
        Ok(Self::from_parts(kraus))
    }

    pub fn unitary(u: ComplexMatrix, tol: f64) -> Result<Self> {
        validate_channel(vec![u], tol)
    }

    /// Complete dephasing in the orthonormal basis given by the columns of `basis`.
    pub fn dephasing(basis: &ComplexMatrix, tol: f64) -> Result<Self> {
        let defect = linalg::unitarity_defect(basis);
        if !basis.is_square() || exceeds(defect, tol) {
            return Err(Error::BadParameter(format!(
                "dephasing basis is not unitary (defect {defect:.3e})"
            )));
        }
        let kraus = (0..basis.ncols())
            .map(|k| linalg::outer(&basis.column(k).into_owned()))
            .collect();
        Ok(Self::from_parts(kraus))
    }

    /// Measure in the computational basis, prepare |0> on outcome 0 and |+>
    /// on outcome 1: E₁ = |0><0|, E₂ = |+><1|.
    pub fn measure_prepare_example() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut e1 = ComplexMatrix::zeros(2, 2);
        e1[(0, 0)] = real(1.0);
        let mut e2 = ComplexMatrix::zeros(2, 2);
        e2[(0, 1)] = real(s);
        e2[(1, 1)] = real(s);
        Self::from_parts(vec![e1, e2])
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn compose(&self, first: &KrausChannel) -> Result<Self> {
        if self.dim != first.dim {
            return Err(Error::DimensionMismatch(format!(
                "cannot compose channels of dimension {} and {}",
                self.dim, first.dim
            )));
        }
        let mut kraus = Vec::with_capacity(self.kraus.len() * first.kraus.len());
        for a in &self.kraus {
            for b in &first.kraus {
                let e = a * b;
                if max_abs(&e) > 0.0 {
                    kraus.push(e);
                }
            }
        }
        if kraus.is_empty() {
            kraus.push(ComplexMatrix::zeros(self.dim, self.dim));
        }
        Ok(Self::from_parts(kraus))
    }

    /// Σ_k E_k M E_k† for an arbitrary operator M.
    pub fn apply_operator(&self, m: &ComplexMatrix) -> ComplexMatrix {
        self.kraus
            .iter()
            .fold(ComplexMatrix::zeros(self.dim, self.dim), |acc, e| {
                acc + e * m * e.adjoint()
            })
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "channel of dimension {} applied to state of dimension {}",
                self.dim,
                rho.dim()
            )));
        }
        let out = linalg::hermitize(&self.apply_operator(rho.matrix()));
        Ok(DensityMatrix::from_parts(out, rho.dims().to_vec()))
    }

    /// Applies the channel to subsystem `target`, identity elsewhere.
    pub fn apply_local(&self, rho: &DensityMatrix, target: usize) -> Result<DensityMatrix> {
        let (left, d, right) = split_dims(rho.dims(), target)?;
        if d != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "channel of dimension {} applied to subsystem {target} of dimension {d}",
                self.dim
            )));
        }
        let n = rho.dim();
        let idx = |l: usize, a: usize, r: usize| (l * d + a) * right + r;
        let m = rho.matrix();
        let mut out = ComplexMatrix::zeros(n, n);
        let mut half = ComplexMatrix::zeros(n, n);
        for e in &self.kraus {
            // half = (1 ⊗ E ⊗ 1) ρ
            half.fill(c64(0.0, 0.0));
            for l in 0..left {
                for r in 0..right {
                    for a in 0..d {
                        let row = idx(l, a, r);
                        for a2 in 0..d {
                            let w = e[(a, a2)];
                            if w.norm_sqr() == 0.0 {
                                continue;
                            }
                            let src = idx(l, a2, r);
                            for col in 0..n {
                                half[(row, col)] += w * m[(src, col)];
                            }
                        }
                    }
                }
            }
            // out += half (1 ⊗ E† ⊗ 1)
            for l in 0..left {
                for r in 0..right {
                    for b in 0..d {
                        let col = idx(l, b, r);
                        for b2 in 0..d {
                            let w = e[(b, b2)].conj();
                            if w.norm_sqr() == 0.0 {
                                continue;
                            }
                            let src = idx(l, b2, r);
                            for row in 0..n {
                                out[(row, col)] += half[(row, src)] * w;
                            }
                        }
                    }
                }
            }
        }
        Ok(DensityMatrix::from_parts(
            linalg::hermitize(&out),
            rho.dims().to_vec(),
        ))
    }

    /// Channel on the full space with Kraus operators 1 ⊗ … ⊗ E_k ⊗ … ⊗ 1.
    pub fn lift(&self, dims: &[usize], target: usize) -> Result<KrausChannel> {
        let (left, d, right) = split_dims(dims, target)?;
        if d != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "cannot lift a dimension-{} channel onto a subsystem of dimension {d}",
                self.dim
            )));
        }
        let kraus = self
            .kraus
            .iter()
            .map(|e| kron(&kron(&identity(left), e), &identity(right)))
            .collect();
        Ok(Self::from_parts(kraus))
    }

    /// Choi matrix Σ_ij |i><j| ⊗ Λ(|i><j|).
    pub fn choi(&self) -> ComplexMatrix {
        let d = self.dim;
        let mut choi = ComplexMatrix::zeros(d * d, d * d);
        for i in 0..d {
            for j in 0..d {
                let mut eij = ComplexMatrix::zeros(d, d);
                eij[(i, j)] = real(1.0);
                let img = self.apply_operator(&eij);
                choi.view_mut((i * d, j * d), (d, d)).copy_from(&img);
            }
        }
        choi
    }

    /// Smallest Choi eigenvalue; non-negative (up to round-off) for any Kraus list.
    pub fn choi_min_eigenvalue(&self) -> Result<f64> {
        Ok(linalg::eigh(&self.choi())?
            .eigenvalues
            .last()
            .copied()
            .unwrap_or(0.0))
    }

    /// Equality of action: Choi matrices agree within `tol` (max entry).
    pub fn same_action(&self, other: &KrausChannel, tol: f64) -> bool {
        self.dim == other.dim && max_abs_diff(&self.choi(), &other.choi()) <= tol
    }

    pub fn is_unital(&self, tol: f64) -> UnitalReport {
        let d = self.dim;
        let sum = self
            .kraus
            .iter()
            .fold(ComplexMatrix::zeros(d, d), |acc, e| acc + e * e.adjoint());
        let defect = max_abs_diff(&sum, &identity(d));
        let s = (d == 2).then(|| {
            let img = self.apply_operator(&(identity(2) * real(0.5)));
            bloch_coefficients(&img)
        });
        UnitalReport {
            unital: !exceeds(defect, tol),
            defect,
            s,
        }
    }

    /// A fixed orthonormal basis in which every output is diagonal, if one exists.
    ///
    /// The images of a Hermitian operator basis of the input space must
    /// pairwise commute (Frobenius norm ≤ `tol`); the returned basis
    /// diagonalizes all of them.
    pub fn semi_classical_basis(&self, tol: f64) -> Option<ComplexMatrix> {
        let images: Vec<ComplexMatrix> = hermitian_operator_basis(self.dim)
            .iter()
            .map(|h| linalg::hermitize(&self.apply_operator(h)))
            .collect();
        for (i, a) in images.iter().enumerate() {
            for b in &images[i + 1..] {
                if exceeds(frobenius(&commutator(a, b)), tol) {
                    return None;
                }
            }
        }
        let mut sampler = Sampler::new(0x5eed_c1a5);
        linalg::joint_eigenbasis(&images, tol, JOINT_DIAG_RETRIES, sampler.rng())
    }

    pub fn classify(&self, tol: f64) -> ChannelClass {
        let unital = self.is_unital(tol);
        let sc_basis = self.semi_classical_basis(tol);
        let semi_classical = sc_basis.is_some();
        ChannelClass {
            dim: self.dim,
            unital: unital.unital,
            semi_classical,
            sc_basis,
            can_create_qc: !unital.unital && !semi_classical,
            advisory: self.dim != 2,
        }
    }
}

fn check_unit_interval(name: &str, x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::BadParameter(format!("{name} = {x} is outside [0, 1]")));
    }
    Ok(())
}

fn check_positive_dim(d: usize) -> Result<()> {
    if d == 0 {
        return Err(Error::BadParameter("dimension must be positive".into()));
    }
    Ok(())
}

/// d² Hermitian matrices spanning all d×d operators: |i><i|, |i><j| + |j><i|,
/// i(|i><j| − |j><i|).
pub fn hermitian_operator_basis(d: usize) -> Vec<ComplexMatrix> {
    let mut out = Vec::with_capacity(d * d);
    for i in 0..d {
        let mut e = ComplexMatrix::zeros(d, d);
        e[(i, i)] = real(1.0);
        out.push(e);
        for j in (i + 1)..d {
            let mut x = ComplexMatrix::zeros(d, d);
            x[(i, j)] = real(1.0);
            x[(j, i)] = real(1.0);
            out.push(x);
            let mut y = ComplexMatrix::zeros(d, d);
            y[(i, j)] = c64(0.0, 1.0);
            y[(j, i)] = c64(0.0, -1.0);
            out.push(y);
        }
    }
    out
}

/// Outcome of the unitality test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitalReport {
    pub unital: bool,
    /// ‖Σ E E† − I‖_max
    pub defect: f64,
    /// Bloch vector of Λ(I/2) for qubit channels.
    pub s: Option<BlochVector>,
}

/// Classification of a local channel.
///
/// `can_create_qc` is `!unital && !semi_classical`. That predicate is only
/// established for qubits; for other dimensions `advisory` is set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelClass {
    pub dim: usize,
    pub unital: bool,
    pub semi_classical: bool,
    #[serde(with = "crate::io::opt_matrix")]
    pub sc_basis: Option<ComplexMatrix>,
    pub can_create_qc: bool,
    pub advisory: bool,
}

/// Convex mixture of `n_unitaries` Haar unitaries with simplex weights.
pub fn random_unital_qubit(seed: u64, n_unitaries: usize) -> Result<KrausChannel> {
    if n_unitaries == 0 {
        return Err(Error::BadParameter("n_unitaries must be at least 1".into()));
    }
    let mut s = Sampler::new(seed);
    let q = s.simplex(n_unitaries)?;
    let kraus = q
        .iter()
        .map(|&w| s.haar_unitary(2).map(|u| u * real(w.sqrt())))
        .collect::<Result<Vec<_>>>()?;
    Ok(KrausChannel::from_parts(kraus))
}

/// Random channel from a Haar isometry C^d → C^d ⊗ C^k.
pub fn random_channel(d: usize, n_kraus: usize, seed: u64) -> Result<KrausChannel> {
    check_positive_dim(d)?;
    if n_kraus == 0 {
        return Err(Error::BadParameter("n_kraus must be at least 1".into()));
    }
    let u = Sampler::new(seed).haar_unitary(d * n_kraus)?;
    let kraus = (0..n_kraus)
        .map(|k| u.view((k * d, 0), (d, d)).into_owned())
        .collect();
    Ok(KrausChannel::from_parts(kraus))
}

/// Complete dephasing in a Haar-random basis after a random channel; every
/// output is diagonal in that basis.
pub fn random_semi_classical(d: usize, n_kraus: usize, seed: u64) -> Result<KrausChannel> {
    let inner = random_channel(d, n_kraus, seed)?;
    let basis = Sampler::stream(seed, 1).haar_unitary(d)?;
    KrausChannel::dephasing(&basis, 1e-9)?.compose(&inner)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{bloch_of, PureState};

    fn ket(d: usize, k: usize) -> DensityMatrix {
        DensityMatrix::from_pure(&PureState::basis(d, k), &[d]).unwrap()
    }

    fn plus() -> DensityMatrix {
        DensityMatrix::new(ComplexMatrix::from_element(2, 2, real(0.5)), &[2]).unwrap()
    }

    #[test]
    fn validate_examples() {
        assert!(validate_channel(KrausChannel::measure_prepare_example().kraus.clone(), TOL_TP).is_ok());
        match validate_channel(vec![identity(2), identity(2)], TOL_TP) {
            Err(Error::NotTracePreserving { defect }) => assert!((defect - 1.0).abs() < 1e-15),
            other => panic!("unexpected {other:?}"),
        }
        let u = Sampler::new(1).haar_unitary(3).unwrap();
        assert!(validate_channel(vec![u], TOL_TP).is_ok());
        assert!(matches!(validate_channel(vec![], TOL_TP), Err(Error::EmptyKrausList)));
        assert!(matches!(
            validate_channel(vec![identity(2), identity(3)], TOL_TP),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn bad_parameters() {
        assert!(KrausChannel::phase_damping(2, 1.5).is_err());
        assert!(KrausChannel::amplitude_damping(-0.1).is_err());
        assert!(KrausChannel::depolarizing(2, f64::NAN).is_err());
        assert!(random_unital_qubit(0, 0).is_err());
    }

    #[test]
    fn standard_channels_are_trace_preserving() {
        let chans = [
            KrausChannel::phase_damping(3, 0.3).unwrap(),
            KrausChannel::amplitude_damping(0.4).unwrap(),
            KrausChannel::depolarizing(3, 0.7).unwrap(),
            KrausChannel::measure_prepare_example(),
            random_channel(3, 2, 4).unwrap(),
            random_semi_classical(2, 3, 5).unwrap(),
        ];
        for ch in chans {
            assert!(validate_channel(ch.kraus.clone(), 1e-12).is_ok());
            assert!(ch.choi_min_eigenvalue().unwrap() > -1e-12);
        }
    }

    #[test]
    fn depolarizing_action() {
        let ch = KrausChannel::depolarizing(3, 0.4).unwrap();
        let rho = Sampler::new(2).density(&[3], 3).unwrap();
        let want = rho.matrix() * real(0.6) + identity(3) * real(0.4 / 3.0);
        assert!(max_abs_diff(ch.apply(&rho).unwrap().matrix(), &want) < 1e-14);
    }

    #[test]
    fn phase_damping_scales_off_diagonals() {
        let psi = Sampler::new(8).pure_state(3).unwrap();
        let rho = DensityMatrix::from_pure(&psi, &[3]).unwrap();
        let out = KrausChannel::phase_damping(3, 0.5).unwrap().apply(&rho).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let f = if i == j { 1.0 } else { 0.5 };
                assert!((out.matrix()[(i, j)] - rho.matrix()[(i, j)] * f).norm() < 1e-15);
            }
        }
        let id = KrausChannel::phase_damping(3, 0.0).unwrap();
        assert!(id.same_action(&KrausChannel::identity(3), 1e-15));
    }

    #[test]
    fn apply_examples() {
        let out = KrausChannel::amplitude_damping(1.0).unwrap().apply(&ket(2, 1)).unwrap();
        assert!(out.max_entry_deviation(&ket(2, 0)) < 1e-15);

        let out = KrausChannel::measure_prepare_example()
            .apply(&DensityMatrix::maximally_mixed(&[2]))
            .unwrap();
        let want = DensityMatrix::mixture(&[(0.5, &ket(2, 0)), (0.5, &plus())]).unwrap();
        assert!(out.max_entry_deviation(&want) < 1e-15);

        let out = KrausChannel::phase_damping(2, 1.0).unwrap().apply(&plus()).unwrap();
        assert!(out.max_entry_deviation(&DensityMatrix::maximally_mixed(&[2])) < 1e-15);

        let u = Sampler::new(3).haar_unitary(2).unwrap();
        let rho = Sampler::new(4).density(&[2], 2).unwrap();
        let out = KrausChannel::unitary(u.clone(), 1e-9).unwrap().apply(&rho).unwrap();
        assert!(out.max_entry_deviation(&rho.conjugate(&u)) < 1e-14);

        assert!(matches!(
            KrausChannel::identity(3).apply(&rho),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn apply_local_matches_lifted_channel() {
        let mut s = Sampler::new(12);
        for (dims, target, seed) in [(vec![2, 2], 0, 1), (vec![2, 3], 1, 2), (vec![3, 2], 0, 3), (vec![2, 3, 2], 1, 4)] {
            let rho = s.density(&dims, 3).unwrap();
            let ch = random_channel(dims[target], 3, seed).unwrap();
            let local = ch.apply_local(&rho, target).unwrap();
            let lifted = ch.lift(&dims, target).unwrap().apply(&rho).unwrap();
            assert!(local.max_entry_deviation(&lifted) < 1e-12);
        }
    }

    #[test]
    fn apply_local_errors() {
        let rho = DensityMatrix::maximally_mixed(&[2, 3]);
        let ch = KrausChannel::identity(2);
        assert!(matches!(ch.apply_local(&rho, 1), Err(Error::DimensionMismatch(_))));
        assert!(matches!(ch.apply_local(&rho, 2), Err(Error::IndexOutOfRange { .. })));
        assert!(ch.apply_local(&rho, 0).unwrap().max_entry_deviation(&rho) < 1e-15);
    }

    #[test]
    fn unitality_examples() {
        assert!(KrausChannel::phase_damping(2, 0.7).unwrap().is_unital(TOL_CLASSIFY).unital);
        let r = KrausChannel::amplitude_damping(0.5).unwrap().is_unital(TOL_CLASSIFY);
        assert!(!r.unital);
        let s = r.s.unwrap();
        assert!(s.x.abs() < 1e-15 && s.y.abs() < 1e-15 && (s.z - 0.5).abs() < 1e-15);
        let u = Sampler::new(5).haar_unitary(2).unwrap();
        assert!(KrausChannel::unitary(u, 1e-9).unwrap().is_unital(TOL_CLASSIFY).unital);
        assert!(KrausChannel::phase_damping(3, 0.5).unwrap().is_unital(TOL_CLASSIFY).s.is_none());
    }

    #[test]
    fn semi_classical_examples() {
        for d in 2..=4 {
            let b = KrausChannel::phase_damping(d, 1.0)
                .unwrap()
                .semi_classical_basis(TOL_CLASSIFY)
                .expect("complete dephasing is semi-classical");
            // Columns are computational basis vectors up to order and phase.
            for k in 0..d {
                let col = b.column(k);
                let big = col.iter().filter(|z| z.norm() > 1.0 - 1e-9).count();
                assert_eq!(big, 1);
            }
        }
        assert!(KrausChannel::measure_prepare_example()
            .semi_classical_basis(TOL_CLASSIFY)
            .is_none());
        assert!(KrausChannel::phase_damping(2, 0.5)
            .unwrap()
            .semi_classical_basis(TOL_CLASSIFY)
            .is_none());
        // Fully depolarizing: every output is I/d.
        assert!(KrausChannel::depolarizing(3, 1.0)
            .unwrap()
            .semi_classical_basis(TOL_CLASSIFY)
            .is_some());
    }

    #[test]
    fn classify_examples() {
        let c = KrausChannel::measure_prepare_example().classify(TOL_CLASSIFY);
        assert!(!c.unital && !c.semi_classical && c.can_create_qc && !c.advisory);

        let c = KrausChannel::phase_damping(2, 0.5).unwrap().classify(TOL_CLASSIFY);
        assert!(c.unital && !c.can_create_qc);

        let c = KrausChannel::dephasing(&identity(2), 1e-9).unwrap().classify(TOL_CLASSIFY);
        assert!(c.unital && c.semi_classical && !c.can_create_qc);

        let c = KrausChannel::phase_damping(3, 0.5).unwrap().classify(TOL_CLASSIFY);
        assert!(c.unital && c.advisory);
    }

    #[test]
    fn random_unital_qubit_properties() {
        let ch = random_unital_qubit(17, 3).unwrap();
        assert!(ch.is_unital(1e-10).unital);
        assert_eq!(ch, random_unital_qubit(17, 3).unwrap());
        let single = random_unital_qubit(3, 1).unwrap();
        assert_eq!(single.kraus().len(), 1);
        assert!(linalg::unitarity_defect(&single.kraus()[0]) < 1e-12);
    }

    #[test]
    fn unital_iff_bloch_of_image_vanishes() {
        for seed in 0..40 {
            let ch = if seed % 2 == 0 {
                random_unital_qubit(seed, 1 + (seed as usize % 4)).unwrap()
            } else {
                random_channel(2, 2, seed).unwrap()
            };
            let img = ch.apply(&DensityMatrix::maximally_mixed(&[2])).unwrap();
            let s = bloch_of(&img).unwrap();
            assert_eq!(ch.is_unital(1e-8).unital, s.norm() <= 1e-8, "seed {seed}");
        }
    }

    #[test]
    fn semi_classical_outputs_are_diagonal_in_basis() {
        for seed in 0..5 {
            let d = 2 + seed as usize % 2;
            let ch = random_semi_classical(d, 2, seed).unwrap();
            let basis = ch.semi_classical_basis(TOL_CLASSIFY).expect("semi-classical");
            let pb = crate::numerics::ProductBasis::new(vec![basis], 1e-9).unwrap();
            let mut s = Sampler::new(100 + seed);
            for _ in 0..100 {
                let rho = s.density(&[d], d).unwrap();
                let out = ch.apply(&rho).unwrap();
                assert!(out.dephase(&pb).unwrap().max_entry_deviation(&out) < 1e-8);
            }
        }
    }

    #[test]
    fn generic_random_channels_are_neither() {
        for seed in 0..20 {
            let c = random_channel(2, 2, seed).unwrap().classify(TOL_CLASSIFY);
            assert!(c.can_create_qc, "seed {seed}");
        }
    }

    #[test]
    fn compose_matches_sequential_application() {
        let a = random_channel(2, 2, 1).unwrap();
        let b = KrausChannel::amplitude_damping(0.3).unwrap();
        let rho = Sampler::new(6).density(&[2], 2).unwrap();
        let seq = a.apply(&b.apply(&rho).unwrap()).unwrap();
        let comp = a.compose(&b).unwrap().apply(&rho).unwrap();
        assert!(seq.max_entry_deviation(&comp) < 1e-14);
    }
}

//! Distance-based quantumness measures Q_D(ρ) = min over classically
//! correlated σ of D(ρ, σ), for D = 1 − F (geometric) and D = S(ρ‖σ)
//! (relative entropy).
//!
//! Both are estimated by minimizing over product bases; for a fixed basis
//! the best diagonal state is found by a simplex ascent (geometric) or is
//! the dephased state (relative entropy). Reported values are upper bounds
//! on the true minima.

mod inner;

use std::cell::RefCell;

use serde::{Deserialize, Serialize};

use crate::channels::KrausChannel;
use crate::classicality::{exact_cc_basis, marginal_eigenbasis, TOL_CC};
use crate::error::{Error, Result};
use crate::numerics::linalg::{self, complete_basis, diag_real, joint_eigenbasis, ComplexMatrix};
use crate::numerics::state::diagonal_in_unitary;
use crate::numerics::{
    fidelity, relative_entropy, von_neumann_entropy, DensityMatrix, ProductBasis, PureState, Sampler,
    Tolerances,
};
use crate::optimize::{local_search, OptimizerConfig};

/// Slack allowed in estimator-level monotonicity checks.
pub const TOL_MONO: f64 = 1e-6;

/// Tolerance on the probability table of a [`CCState`].
pub const TOL_PROBS: f64 = 1e-9;

/// Σ_ij p_ij |i><i| ⊗ |j><j| in a product basis of two subsystems.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CCStateJson")]
pub struct CCState {
    probs: Vec<Vec<f64>>,
    basis: ProductBasis,
}

#[derive(Deserialize)]
struct CCStateJson {
    probs: Vec<Vec<f64>>,
    basis: ProductBasis,
}

impl TryFrom<CCStateJson> for CCState {
    type Error = Error;

    fn try_from(raw: CCStateJson) -> Result<Self> {
        CCState::new(raw.probs, raw.basis)
    }
}

impl CCState {
    /// Validates the table against the basis. Entries in [−tol, 0) are
    /// clipped and the table is renormalized.
    pub fn new(probs: Vec<Vec<f64>>, basis: ProductBasis) -> Result<Self> {
        let dims = basis.dims();
        if dims.len() != 2 {
            return Err(Error::DimensionMismatch(format!(
                "a CC state needs a bipartite basis, got dims {dims:?}"
            )));
        }
        if probs.len() != dims[0] || probs.iter().any(|row| row.len() != dims[1]) {
            return Err(Error::DimensionMismatch(format!(
                "probability table does not have shape {}x{}",
                dims[0], dims[1]
            )));
        }
        let flat: Vec<f64> = probs.iter().flatten().copied().collect();
        if flat.iter().any(|p| !p.is_finite()) {
            return Err(Error::NonFinite);
        }
        if let Some(&low) = flat.iter().find(|&&p| p < -TOL_PROBS) {
            return Err(Error::BadParameter(format!("negative probability {low}")));
        }
        let total: f64 = flat.iter().map(|p| p.max(0.0)).sum();
        if (total - 1.0).abs() > TOL_PROBS {
            return Err(Error::NotNormalized {
                defect: (total - 1.0).abs(),
            });
        }
        Ok(Self::from_flat(&flat, basis))
    }

    /// Builds from a row-major table, clipping negatives and renormalizing.
    fn from_flat(flat: &[f64], basis: ProductBasis) -> Self {
        let db = basis.dims()[1];
        let total: f64 = flat.iter().map(|p| p.max(0.0)).sum();
        let probs = flat
            .chunks(db)
            .map(|row| row.iter().map(|p| p.max(0.0) / total).collect())
            .collect();
        Self { probs, basis }
    }

    pub fn probs(&self) -> &[Vec<f64>] {
        &self.probs
    }

    pub fn basis(&self) -> &ProductBasis {
        &self.basis
    }

    pub fn dims(&self) -> Vec<usize> {
        self.basis.dims()
    }

    fn flat(&self) -> Vec<f64> {
        self.probs.iter().flatten().copied().collect()
    }

    pub fn render(&self) -> DensityMatrix {
        let u = self.basis.full();
        let m = &u * diag_real(&self.flat()) * u.adjoint();
        DensityMatrix::from_parts(linalg::hermitize(&m), self.dims())
    }

    /// Random table and Haar bases. `support` limits the number of nonzero
    /// entries (at least 1, capped at dA·dB).
    pub fn random(dims: &[usize], support: usize, sampler: &mut Sampler) -> Result<Self> {
        if dims.len() != 2 {
            return Err(Error::DimensionMismatch(format!("expected two subsystems, got {dims:?}")));
        }
        let n = dims[0] * dims[1];
        let k = support.clamp(1, n);
        let mut flat = sampler.simplex(k)?;
        flat.resize(n, 0.0);
        // Fisher-Yates so the support lands on random cells.
        for i in (1..n).rev() {
            let j = sampler.below(i + 1);
            flat.swap(i, j);
        }
        let basis = ProductBasis::from_unitaries(vec![sampler.haar_unitary(dims[0])?, sampler.haar_unitary(dims[1])?]);
        Ok(Self::from_flat(&flat, basis))
    }
}

/// Which distance the measure minimizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureKind {
    /// Q_G, with D = 1 − F.
    Geometric,
    /// Q_S in bits, with D = S(ρ‖σ).
    RelativeEntropy,
}

impl MeasureKind {
    /// D(ρ, σ) for this measure.
    pub fn distance(self, rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
        match self {
            Self::Geometric => Ok((1.0 - fidelity(rho, sigma)?).max(0.0)),
            Self::RelativeEntropy => relative_entropy(rho, sigma),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Random restarts run (the configured count).
    pub restarts: usize,
    /// Total starting points, including seeds and heuristic starts.
    pub starts: usize,
    /// Index of the winning start, in the order seeds, exact CC basis,
    /// marginal eigenbasis, random restarts.
    pub best_start: usize,
    pub best_start_kind: String,
    pub converged: bool,
    /// Finite-difference gradient norm of the basis objective at the winner.
    pub grad_norm: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureResult {
    pub kind: MeasureKind,
    /// D(ρ, rendered witness).
    pub value: f64,
    pub witness: CCState,
    pub diagnostics: Diagnostics,
}

fn require_bipartite(rho: &DensityMatrix) -> Result<()> {
    if rho.dims().len() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "expected a bipartite state, got dims {:?}",
            rho.dims()
        )));
    }
    Ok(())
}

/// Geometric measure Q_G(ρ) = min (1 − F(ρ, σ)).
pub fn q_geometric(rho: &DensityMatrix, opt: &OptimizerConfig) -> Result<MeasureResult> {
    q_measure(rho, MeasureKind::Geometric, opt, &[])
}

/// Relative entropy of quantumness Q_S(ρ) = min S(ρ‖σ), in bits.
pub fn q_relative_entropy(rho: &DensityMatrix, opt: &OptimizerConfig) -> Result<MeasureResult> {
    q_measure(rho, MeasureKind::RelativeEntropy, opt, &[])
}

/// Basis objective and the diagonal attaining it.
struct Objective {
    kind: MeasureKind,
    matrix: ComplexMatrix,
    factor: ComplexMatrix,
    entropy: f64,
}

impl Objective {
    fn new(rho: &DensityMatrix, kind: MeasureKind) -> Result<Self> {
        Ok(Self {
            kind,
            matrix: rho.matrix().clone(),
            factor: inner::thin_factor(rho.matrix())?,
            entropy: von_neumann_entropy(rho)?,
        })
    }

    fn solve(&self, basis: &ProductBasis, start: Option<&[f64]>) -> (f64, Vec<f64>) {
        let u = basis.full();
        match self.kind {
            MeasureKind::Geometric => {
                let m = inner::rotated_root(&u, &self.factor);
                let (root, p) = inner::max_root_fidelity(&m, start);
                ((1.0 - root * root).max(0.0), p)
            }
            MeasureKind::RelativeEntropy => {
                let p = diagonal_in_unitary(&self.matrix, &u);
                (inner::dephased_relative_entropy(&p, self.entropy), p)
            }
        }
    }
}

struct Start {
    basis: ProductBasis,
    probs: Option<Vec<f64>>,
    kind: &'static str,
}

/// Minimizes D(ρ, σ) over CC states, including each seed as a candidate
/// and as a starting basis.
pub fn q_measure(
    rho: &DensityMatrix,
    kind: MeasureKind,
    opt: &OptimizerConfig,
    seeds: &[CCState],
) -> Result<MeasureResult> {
    require_bipartite(rho)?;
    opt.validate()?;
    for s in seeds {
        if s.dims() != rho.dims() {
            return Err(Error::DimensionMismatch(format!(
                "seed dims {:?} differ from state dims {:?}",
                s.dims(),
                rho.dims()
            )));
        }
    }
    let objective = Objective::new(rho, kind)?;

    let mut starts: Vec<Start> = seeds
        .iter()
        .map(|s| Start {
            basis: s.basis.clone(),
            probs: Some(s.flat()),
            kind: "seed",
        })
        .collect();
    if let Some((basis, _)) = exact_cc_basis(rho, TOL_CC, opt.seed)? {
        starts.push(Start {
            basis,
            probs: None,
            kind: "exact_cc",
        });
    }
    starts.push(Start {
        basis: marginal_eigenbasis(rho)?,
        probs: None,
        kind: "marginal",
    });
    for r in 0..opt.restarts {
        let mut s = Sampler::stream(opt.seed, r as u64);
        let factors = rho
            .dims()
            .iter()
            .map(|&d| s.haar_unitary(d))
            .collect::<Result<Vec<_>>>()?;
        starts.push(Start {
            basis: ProductBasis::from_unitaries(factors),
            probs: None,
            kind: "random",
        });
    }

    // (value, witness, start index, converged, grad_norm)
    let mut best: Option<(f64, CCState, usize, bool, f64)> = None;
    let mut evaluations = 0;
    let mut consider = |value: f64, witness: CCState, idx: usize, converged: bool, grad: f64| {
        if best.as_ref().is_none_or(|b| value < b.0) {
            best = Some((value, witness, idx, converged, grad));
        }
    };

    for (idx, start) in starts.iter().enumerate() {
        if let Some(p) = &start.probs {
            // The seed itself, evaluated exactly.
            let cc = CCState::from_flat(p, start.basis.clone());
            let value = kind.distance(rho, &cc.render())?;
            consider(value, cc, idx, true, 0.0);
        }
        // Consecutive bases are close, so each inner solve starts from the
        // previous optimum.
        let warm = RefCell::new(start.probs.clone());
        let local = local_search(&start.basis, opt, |b| {
            let (value, p) = objective.solve(b, warm.borrow().as_deref());
            *warm.borrow_mut() = Some(p);
            value
        });
        evaluations += local.evaluations;
        let (value, p) = objective.solve(&local.basis, warm.borrow().as_deref());
        let cc = CCState::from_flat(&p, local.basis);
        consider(value, cc, idx, local.converged, local.grad_norm);
    }

    let (_, witness, idx, converged, grad_norm) = best.expect("at least one start");
    let value = kind.distance(rho, &witness.render())?;
    Ok(MeasureResult {
        kind,
        value,
        witness,
        diagnostics: Diagnostics {
            restarts: opt.restarts,
            starts: starts.len(),
            best_start: idx,
            best_start_kind: starts[idx].kind.to_string(),
            converged,
            grad_norm,
            evaluations,
        },
    })
}

fn amplitude_matrix(psi: &PureState, dims: &[usize]) -> Result<ComplexMatrix> {
    let &[da, db] = dims else {
        return Err(Error::DimensionMismatch(format!("expected two subsystems, got {dims:?}")));
    };
    if da * db != psi.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state of dimension {} does not split as {da}x{db}",
            psi.dim()
        )));
    }
    let defect = (psi.amplitudes().norm_squared() - 1.0).abs();
    if crate::error::exceeds(defect, Tolerances::default().norm) {
        return Err(Error::NotNormalized { defect });
    }
    let amps = psi.amplitudes();
    Ok(ComplexMatrix::from_fn(da, db, |i, j| amps[i * db + j]))
}

/// Q_G of a pure state: 1 − λ_max², λ_max the largest Schmidt coefficient.
pub fn q_geometric_pure(psi: &PureState, dims: &[usize]) -> Result<f64> {
    let a = amplitude_matrix(psi, dims)?;
    let top = a.singular_values().iter().cloned().fold(0.0, f64::max);
    Ok((1.0 - top * top).max(0.0))
}

/// The product state |a_1>|b_1> of the top Schmidt pair, as a CC state in
/// bases completed around those vectors.
pub fn pure_product_witness(psi: &PureState, dims: &[usize]) -> Result<CCState> {
    let a = amplitude_matrix(psi, dims)?;
    let svd = a.svd(true, true);
    let (u, v_t) = (svd.u.expect("requested"), svd.v_t.expect("requested"));
    let k = svd.singular_values.imax();
    // A = U S V† gives ψ = Σ_k s_k u_k ⊗ conj(v_k), and conj(v_k) is row k of V†.
    let ua = u.column(k).into_owned();
    let vb = v_t.row(k).transpose();
    let basis = ProductBasis::from_unitaries(vec![
        complete_basis(&[ua], dims[0]),
        complete_basis(&[vb], dims[1]),
    ]);
    let mut probs = vec![vec![0.0; dims[1]]; dims[0]];
    probs[0][0] = 1.0;
    Ok(CCState { probs, basis })
}

/// Image of a CC state under a channel on one subsystem, when that image is
/// again CC. Returns `None` if the conditional images do not commute.
pub fn pushforward_witness(witness: &CCState, ch: &KrausChannel, target: usize) -> Result<Option<CCState>> {
    let dims = witness.dims();
    if target > 1 {
        return Err(Error::IndexOutOfRange { index: target, count: 2 });
    }
    if ch.dim() != dims[target] {
        return Err(Error::DimensionMismatch(format!(
            "channel of dimension {} on subsystem {target} of dimension {}",
            ch.dim(),
            dims[target]
        )));
    }
    let other = 1 - target;
    let p = |t: usize, o: usize| if target == 0 { witness.probs[t][o] } else { witness.probs[o][t] };
    let images: Vec<ComplexMatrix> = (0..dims[target])
        .map(|t| {
            let v = witness.basis.vector(target, t);
            ch.apply_operator(&linalg::outer(&v))
        })
        .collect();
    // τ_o = Σ_t p(t, o) Λ(|t><t|), one per basis vector of the other side.
    let taus: Vec<ComplexMatrix> = (0..dims[other])
        .map(|o| {
            images
                .iter()
                .enumerate()
                .fold(ComplexMatrix::zeros(ch.dim(), ch.dim()), |acc, (t, img)| acc + img * linalg::real(p(t, o)))
        })
        .collect();
    let nonzero: Vec<ComplexMatrix> = taus.iter().filter(|t| linalg::frobenius(t) > 0.0).cloned().collect();
    let mut sampler = Sampler::stream(0x9f5d, 0);
    let new_basis = if nonzero.is_empty() {
        linalg::identity(ch.dim())
    } else {
        match joint_eigenbasis(&nonzero, 1e-9, 5, sampler.rng()) {
            Some(b) => b,
            None => return Ok(None),
        }
    };
    let mut flat = vec![0.0; dims[0] * dims[1]];
    for (o, tau) in taus.iter().enumerate() {
        let diag = diagonal_in_unitary(tau, &new_basis);
        for (t, q) in diag.into_iter().enumerate() {
            let (i, j) = if target == 0 { (t, o) } else { (o, t) };
            flat[i * dims[1] + j] = q;
        }
    }
    let mut factors = witness.basis.factors().to_vec();
    factors[target] = new_basis;
    let pushed = CCState::from_flat(&flat, ProductBasis::from_unitaries(factors));
    let direct = ch.apply_local(&witness.render(), target)?;
    if pushed.render().hs_distance(&direct) > 1e-9 {
        return Ok(None);
    }
    Ok(Some(pushed))
}

/// Outcome of comparing a measure before and after a local channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityReport {
    pub kind: MeasureKind,
    pub q_before: f64,
    pub q_after: f64,
    /// D(Λρ, Λξ*) for the witness ξ* of `q_before`.
    pub witness_pushforward_bound: f64,
    /// Λξ* is classically correlated, so it seeded the second search.
    pub pushforward_is_cc: bool,
    pub pass: bool,
    pub tol_mono: f64,
}

/// Computes Q(ρ) and Q(Λρ) with Λ acting on `target`, seeding the second
/// search with the pushed-forward witness.
pub fn monotonicity_report(
    rho: &DensityMatrix,
    ch: &KrausChannel,
    target: usize,
    kind: MeasureKind,
    opt: &OptimizerConfig,
) -> Result<MonotonicityReport> {
    monotonicity_report_seeded(rho, ch, target, kind, opt, &[])
}

/// As [`monotonicity_report`], with extra seeds for the first search.
pub fn monotonicity_report_seeded(
    rho: &DensityMatrix,
    ch: &KrausChannel,
    target: usize,
    kind: MeasureKind,
    opt: &OptimizerConfig,
    seeds: &[CCState],
) -> Result<MonotonicityReport> {
    require_bipartite(rho)?;
    let after_state = ch.apply_local(rho, target)?;
    let before = q_measure(rho, kind, opt, seeds)?;
    let pushed_direct = ch.apply_local(&before.witness.render(), target)?;
    let bound = kind.distance(&after_state, &pushed_direct)?;
    let pushed = pushforward_witness(&before.witness, ch, target)?;
    let after = q_measure(&after_state, kind, opt, pushed.as_slice())?;
    Ok(MonotonicityReport {
        kind,
        q_before: before.value,
        q_after: after.value,
        witness_pushforward_bound: bound,
        pushforward_is_cc: pushed.is_some(),
        pass: after.value <= before.value + TOL_MONO,
        tol_mono: TOL_MONO,
    })
}

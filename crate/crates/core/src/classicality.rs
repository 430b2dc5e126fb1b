//! Detection of classically correlated bipartite states
//! ρ = Σ_ij p_ij |i><i| ⊗ |j><j|.
//!
//! The exact route fixes a candidate basis on B, checks that ρ is
//! block-diagonal in it, and tests whether the conditional states on A
//! commute. When no candidate works, the Hilbert-Schmidt distance between ρ
//! and its dephased version is minimized over product bases.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::linalg::{
    self, commutator, frobenius, joint_eigenbasis, random_hermitian, real, ComplexMatrix,
};
use crate::numerics::{DensityMatrix, ProductBasis, Sampler};
use crate::optimize::{local_search, OptimizerConfig};

/// Hilbert-Schmidt residual below which a state counts as classically correlated.
pub const TOL_CC: f64 = 1e-7;

/// Conditional probabilities below this are dropped from ensembles.
pub const TOL_PROB: f64 = 1e-12;

/// Number of candidate B-bases tried by the exact route.
const B_CANDIDATES: usize = 10;

/// Decomposition Σ_j q_j σ_j ⊗ |j><j| with respect to a basis of B.
#[derive(Debug, Clone, Serialize)]
pub struct ConditionalEnsemble {
    #[serde(with = "crate::io::matrix")]
    pub basis_b: ComplexMatrix,
    pub members: Vec<EnsembleMember>,
    /// Indices `j` with q_j ≤ tolerance.
    pub omitted: Vec<usize>,
    /// Frobenius norm of the blocks (1 ⊗ <j|) ρ (1 ⊗ |k>) with j ≠ k; zero
    /// when ρ is classical on B in `basis_b`.
    pub off_block_norm: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EnsembleMember {
    pub index: usize,
    pub probability: f64,
    pub state: DensityMatrix,
}

fn bipartite_dims(rho: &DensityMatrix) -> Result<(usize, usize)> {
    match rho.dims() {
        &[a, b] => Ok((a, b)),
        dims => Err(Error::DimensionMismatch(format!(
            "expected a bipartite state, got dims {dims:?}"
        ))),
    }
}

/// (1 ⊗ <u|) M (1 ⊗ |v>) for vectors u, v on B.
fn block(m: &ComplexMatrix, da: usize, db: usize, u: &[num_complex::Complex64], v: &[num_complex::Complex64]) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(da, da);
    for a in 0..da {
        for b in 0..da {
            let mut acc = num_complex::Complex64::new(0.0, 0.0);
            for j in 0..db {
                let uj = u[j].conj();
                if uj.norm_sqr() == 0.0 {
                    continue;
                }
                for k in 0..db {
                    acc += uj * m[(a * db + j, b * db + k)] * v[k];
                }
            }
            out[(a, b)] = acc;
        }
    }
    out
}

fn column(m: &ComplexMatrix, k: usize) -> Vec<num_complex::Complex64> {
    m.column(k).iter().copied().collect()
}

/// Conditional states of A given the basis `basis_b` of B.
pub fn conditional_ensemble(rho: &DensityMatrix, basis_b: &ComplexMatrix) -> Result<ConditionalEnsemble> {
    let (da, db) = bipartite_dims(rho)?;
    if basis_b.nrows() != db || basis_b.ncols() != db {
        return Err(Error::DimensionMismatch(format!(
            "B-basis is {}x{}, subsystem B has dimension {db}",
            basis_b.nrows(),
            basis_b.ncols()
        )));
    }
    let m = rho.matrix();
    let cols: Vec<_> = (0..db).map(|k| column(basis_b, k)).collect();
    let mut members = Vec::new();
    let mut omitted = Vec::new();
    let mut off2 = 0.0;
    for j in 0..db {
        for k in 0..db {
            let blk = block(m, da, db, &cols[j], &cols[k]);
            if j != k {
                off2 += frobenius(&blk).powi(2);
                continue;
            }
            let q = blk.trace().re;
            if q <= TOL_PROB {
                omitted.push(j);
                continue;
            }
            let state = DensityMatrix::from_parts(linalg::hermitize(&(blk / real(q))), vec![da]);
            members.push(EnsembleMember {
                index: j,
                probability: q,
                state,
            });
        }
    }
    Ok(ConditionalEnsemble {
        basis_b: basis_b.clone(),
        members,
        omitted,
        off_block_norm: off2.sqrt(),
    })
}

/// All conditional states pairwise commute within `tol` (Frobenius norm).
pub fn is_cq_classical(ens: &ConditionalEnsemble, tol: f64) -> bool {
    max_commutator(ens) <= tol
}

/// Largest Frobenius norm of [σ_i, σ_j] over the ensemble.
pub fn max_commutator(ens: &ConditionalEnsemble) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, a) in ens.members.iter().enumerate() {
        for b in &ens.members[i + 1..] {
            worst = worst.max(frobenius(&commutator(a.state.matrix(), b.state.matrix())));
        }
    }
    worst
}

/// Result of the classicality test.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassicalityVerdict {
    pub is_cc: bool,
    pub witness_basis: Option<ProductBasis>,
    /// Smallest ‖ρ − dephase(ρ, B)‖_HS found.
    pub residual: f64,
    /// `"exact"` when a candidate basis certified the state, `"optimizer"` otherwise.
    pub method: String,
    pub tol_cc: f64,
}

/// Dephasing residual ‖ρ − Π_B(ρ)‖_HS, the off-diagonal norm of ρ in B.
pub(crate) fn dephasing_residual(rho: &DensityMatrix, basis: &ProductBasis) -> f64 {
    linalg::offdiag_norm_in_basis(rho.matrix(), &basis.full())
}

/// Exact route: a product basis in which ρ is diagonal, with its residual.
///
/// B-candidates are the eigenbasis of the B marginal followed by eigenbases
/// of Tr_A[(R ⊗ 1) ρ] for random Hermitian R. For a classically correlated ρ
/// the latter split every degeneracy of the marginal that the state itself
/// splits, so a generic R yields a valid B-basis.
pub(crate) fn exact_cc_basis(rho: &DensityMatrix, tol_cc: f64, seed: u64) -> Result<Option<(ProductBasis, f64)>> {
    let (da, db) = bipartite_dims(rho)?;
    let mut sampler = Sampler::stream(seed, 0xcc);
    for candidate in 0..B_CANDIDATES {
        let op = if candidate == 0 {
            rho.partial_trace(1)?.into_matrix()
        } else {
            let r = random_hermitian(da, sampler.rng());
            weighted_marginal_b(rho, &r, da, db)
        };
        let basis_b = linalg::eigh(&op)?.eigenvectors;
        let ens = conditional_ensemble(rho, &basis_b)?;
        if ens.off_block_norm > tol_cc || !is_cq_classical(&ens, tol_cc) {
            continue;
        }
        let weighted: Vec<ComplexMatrix> = ens
            .members
            .iter()
            .map(|m| m.state.matrix() * real(m.probability))
            .collect();
        let basis_a = if weighted.is_empty() {
            linalg::identity(da)
        } else {
            match joint_eigenbasis(&weighted, tol_cc, 5, sampler.rng()) {
                Some(b) => b,
                None => continue,
            }
        };
        let basis = ProductBasis::from_unitaries(vec![basis_a, basis_b]);
        let residual = dephasing_residual(rho, &basis);
        if residual <= tol_cc {
            return Ok(Some((basis, residual)));
        }
    }
    Ok(None)
}

/// Tr_A[(R ⊗ 1) ρ]
fn weighted_marginal_b(rho: &DensityMatrix, r: &ComplexMatrix, da: usize, db: usize) -> ComplexMatrix {
    let m = rho.matrix();
    let mut out = ComplexMatrix::zeros(db, db);
    for j in 0..db {
        for k in 0..db {
            let mut acc = num_complex::Complex64::new(0.0, 0.0);
            for a in 0..da {
                for b in 0..da {
                    acc += r[(a, b)] * m[(b * db + j, a * db + k)];
                }
            }
            out[(j, k)] = acc;
        }
    }
    linalg::hermitize(&out)
}

/// Decides membership in the classically correlated set with the default
/// threshold [`TOL_CC`].
pub fn is_classically_correlated(rho: &DensityMatrix, opt: &OptimizerConfig) -> Result<ClassicalityVerdict> {
    is_classically_correlated_with(rho, opt, TOL_CC)
}

pub fn is_classically_correlated_with(
    rho: &DensityMatrix,
    opt: &OptimizerConfig,
    tol_cc: f64,
) -> Result<ClassicalityVerdict> {
    opt.validate()?;
    if let Some((basis, residual)) = exact_cc_basis(rho, tol_cc, opt.seed)? {
        return Ok(ClassicalityVerdict {
            is_cc: true,
            witness_basis: Some(basis),
            residual,
            method: "exact".into(),
            tol_cc,
        });
    }
    let dims = rho.dims().to_vec();
    let objective = |b: &ProductBasis| dephasing_residual(rho, b);
    let mut best: Option<(ProductBasis, f64)> = None;
    for restart in 0..opt.restarts {
        let start = if restart == 0 {
            marginal_eigenbasis(rho)?
        } else {
            let mut s = Sampler::stream(opt.seed, restart as u64);
            ProductBasis::from_unitaries(
                dims.iter()
                    .map(|&d| s.haar_unitary(d))
                    .collect::<Result<Vec<_>>>()?,
            )
        };
        let local = local_search(&start, opt, objective);
        if best.as_ref().is_none_or(|(_, v)| local.value < *v) {
            best = Some((local.basis, local.value));
        }
    }
    let (basis, residual) = best.expect("at least one restart");
    let is_cc = residual <= tol_cc;
    Ok(ClassicalityVerdict {
        is_cc,
        witness_basis: is_cc.then_some(basis),
        residual,
        method: "optimizer".into(),
        tol_cc,
    })
}

/// Product of the eigenbases of the two marginals.
pub(crate) fn marginal_eigenbasis(rho: &DensityMatrix) -> Result<ProductBasis> {
    let factors = (0..rho.dims().len())
        .map(|k| Ok(linalg::eigh(rho.partial_trace(k)?.matrix())?.eigenvectors))
        .collect::<Result<Vec<_>>>()?;
    Ok(ProductBasis::from_unitaries(factors))
}

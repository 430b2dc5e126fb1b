//! Inner problems of the nested minimization: the best diagonal state in a
//! fixed product basis.

use crate::numerics::shannon_entropy;
use crate::numerics::linalg::{self, ComplexMatrix};

const MAX_ASCENT_ITERS: usize = 500;
const ASCENT_TOL: f64 = 1e-13;

/// Weight mixed into warm starts so that no coordinate starts at zero; the
/// multiplicative update below cannot revive a zero coordinate.
const WARM_MIX: f64 = 1e-3;

/// Maximizes the root fidelity √F(ρ, Σ_k p_k |k><k|) over the simplex.
///
/// `m` is U†R for the basis unitary U and any factor R with RR† = ρ; the root
/// fidelity is then Tr √P with P = M† diag(p) M. Its gradient in p_k is
/// q_k / 2 with q_k = (M P^{-1/2} M†)_kk, and the update p_k ← p_k q_k² / Σ
/// is the alternating maximization of Re Tr(W diag(√p) M) over the unitary W
/// and the unit vector √p, so it never decreases the objective. The root
/// fidelity is concave in p, hence the ascent approaches the global maximum
/// from any interior start. Rank-one ρ make F linear in p and the answer is
/// the best vertex, which is always compared.
pub(crate) fn max_root_fidelity(m: &ComplexMatrix, start: Option<&[f64]>) -> (f64, Vec<f64>) {
    let d = m.nrows();
    // Diagonal of U†ρU, i.e. the squared row norms of M.
    let diag: Vec<f64> = (0..d).map(|k| m.row(k).norm_squared()).collect();
    let (k_best, &v_best) = diag
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.total_cmp(y.1))
        .expect("non-empty diagonal");
    let vertex = || {
        let mut p = vec![0.0; d];
        p[k_best] = 1.0;
        (v_best.max(0.0).sqrt(), p)
    };
    if m.ncols() == 1 {
        return vertex();
    }

    let mut p = match start {
        Some(w) if w.len() == d => normalize(
            &w.iter()
                .zip(&diag)
                .map(|(x, y)| (1.0 - WARM_MIX) * x.max(0.0) + WARM_MIX * y.max(0.0))
                .collect::<Vec<_>>(),
        ),
        _ => normalize(&diag),
    };
    let Some(mut state) = gram_step(m, &p) else {
        return vertex();
    };
    for _ in 0..MAX_ASCENT_ITERS {
        let next = normalize(&p.iter().zip(&state.q).map(|(x, q)| x * q * q).collect::<Vec<_>>());
        let Some(next_state) = gram_step(m, &next) else { break };
        if next_state.value.partial_cmp(&state.value) != Some(std::cmp::Ordering::Greater) {
            break;
        }
        let gain = next_state.value - state.value;
        p = next;
        state = next_state;
        if gain <= ASCENT_TOL * state.value.max(1.0) {
            break;
        }
    }
    if v_best.sqrt() > state.value {
        return vertex();
    }
    (state.value, p)
}

fn normalize(p: &[f64]) -> Vec<f64> {
    let total: f64 = p.iter().map(|x| x.max(0.0)).sum();
    if total > 0.0 && total.is_finite() {
        p.iter().map(|x| x.max(0.0) / total).collect()
    } else {
        vec![1.0 / p.len() as f64; p.len()]
    }
}

struct GramStep {
    value: f64,
    q: Vec<f64>,
}

/// Tr √P and q_k = (M P^{-1/2} M†)_kk for P = M† diag(p) M.
fn gram_step(m: &ComplexMatrix, p: &[f64]) -> Option<GramStep> {
    let mut x = m.clone();
    for (k, &pk) in p.iter().enumerate() {
        x.row_mut(k).scale_mut(pk);
    }
    let gram = m.adjoint() * x;
    let sd = linalg::eigh(&gram).ok()?;
    let floor = linalg::noise_floor(&sd.eigenvalues);
    let mut value = 0.0;
    let mut q = vec![0.0; m.nrows()];
    for (j, &mu) in sd.eigenvalues.iter().enumerate() {
        if mu <= floor {
            continue;
        }
        let root = mu.sqrt();
        value += root;
        let mw = m * sd.eigenvectors.column(j);
        for (k, qk) in q.iter_mut().enumerate() {
            *qk += mw[k].norm_sqr() / root;
        }
    }
    value.is_finite().then_some(GramStep { value, q })
}

/// S(Π_B(ρ)) − S(ρ) from the diagonal of ρ in the basis and S(ρ).
pub(crate) fn dephased_relative_entropy(diag: &[f64], entropy: f64) -> f64 {
    (shannon_entropy(diag) - entropy).max(0.0)
}

/// U†R for the full product-basis unitary `u` and a factor R of ρ.
pub(crate) fn rotated_root(u: &ComplexMatrix, factor: &ComplexMatrix) -> ComplexMatrix {
    u.adjoint() * factor
}

/// Thin factor R = V √Λ of a PSD matrix, keeping eigenvalues above the
/// noise floor, so that RR† = ρ and R has one column per nonzero eigenvalue.
pub(crate) fn thin_factor(rho: &ComplexMatrix) -> crate::Result<ComplexMatrix> {
    let sd = linalg::eigh(rho)?;
    let floor = linalg::noise_floor(&sd.eigenvalues);
    let keep: Vec<usize> = (0..sd.len()).filter(|&j| sd.eigenvalues[j] > floor).collect();
    let mut r = ComplexMatrix::zeros(rho.nrows(), keep.len().max(1));
    for (c, &j) in keep.iter().enumerate() {
        r.set_column(c, &(sd.eigenvectors.column(j) * linalg::real(sd.eigenvalues[j].sqrt())));
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::linalg::{diag_real, sqrt_psd};
    use crate::numerics::{fidelity, DensityMatrix, Sampler};

    fn objective(rho: &DensityMatrix, u: &ComplexMatrix, p: &[f64]) -> f64 {
        let sigma = DensityMatrix::new(u * diag_real(p) * u.adjoint(), rho.dims()).unwrap();
        fidelity(rho, &sigma).unwrap()
    }

    fn setup(seed: u64, d: usize, rank: usize) -> (DensityMatrix, ComplexMatrix, ComplexMatrix) {
        let mut s = Sampler::new(seed);
        let rho = s.density(&[d], rank).unwrap();
        let u = s.haar_unitary(d).unwrap();
        let m = rotated_root(&u, &sqrt_psd(rho.matrix(), 1e-9).unwrap());
        (rho, u, m)
    }

    #[test]
    fn value_matches_fidelity_of_returned_probabilities() {
        for seed in 0..10 {
            let (rho, u, m) = setup(seed, 4, 4);
            let (root, p) = max_root_fidelity(&m, None);
            assert!((root * root - objective(&rho, &u, &p)).abs() < 1e-12);
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn beats_dirichlet_random_search() {
        for seed in 0..6 {
            let (rho, u, m) = setup(100 + seed, 4, 1 + seed as usize % 4);
            let (root, _) = max_root_fidelity(&m, None);
            let mut s = Sampler::new(7 + seed);
            let mut best: f64 = 0.0;
            for _ in 0..3000 {
                best = best.max(objective(&rho, &u, &s.simplex(4).unwrap()));
            }
            for k in 0..4 {
                let mut e = vec![0.0; 4];
                e[k] = 1.0;
                best = best.max(objective(&rho, &u, &e));
            }
            assert!(root * root >= best - 1e-12, "{} < {best}", root * root);
        }
    }

    #[test]
    fn satisfies_simplex_optimality_conditions() {
        // Projected finite-difference gradient of F(p): at the optimum every
        // coordinate with p_k > 0 has the same partial derivative and no
        // coordinate with p_k = 0 exceeds it.
        for seed in 0..5 {
            let (rho, u, m) = setup(200 + seed, 3, 3);
            let (_, p) = max_root_fidelity(&m, None);
            let h = 1e-6;
            let grad: Vec<f64> = (0..3)
                .map(|k| {
                    let mut up = p.clone();
                    up[k] += h;
                    let mut down = p.clone();
                    down[k] = (down[k] - h).max(0.0);
                    let span = up[k] - down[k];
                    let f = |q: &[f64]| {
                        let s: f64 = q.iter().sum();
                        let q: Vec<f64> = q.iter().map(|x| x / s).collect();
                        let sigma = &u * diag_real(&q) * u.adjoint();
                        let sig = DensityMatrix::new(sigma, &[3]).unwrap();
                        fidelity(&rho, &sig).unwrap() * s
                    };
                    (f(&up) - f(&down)) / span
                })
                .collect();
            let active: Vec<f64> = (0..3).filter(|&k| p[k] > 1e-6).map(|k| grad[k]).collect();
            let top = active.iter().cloned().fold(f64::MIN, f64::max);
            let low = active.iter().cloned().fold(f64::MAX, f64::min);
            assert!(top - low < 1e-4, "{grad:?} at {p:?}");
            for g in &grad {
                assert!(*g <= top + 1e-4);
            }
        }
    }

    #[test]
    fn commuting_case_is_exact_at_the_pinched_diagonal() {
        let u = Sampler::new(3).haar_unitary(3).unwrap();
        let p = [0.5, 0.3, 0.2];
        let rho = DensityMatrix::new(&u * diag_real(&p) * u.adjoint(), &[3]).unwrap();
        let m = rotated_root(&u, &sqrt_psd(rho.matrix(), 1e-9).unwrap());
        let (root, q) = max_root_fidelity(&m, None);
        assert!((root - 1.0).abs() < 1e-12);
        for k in 0..3 {
            assert!((q[k] - p[k]).abs() < 1e-10);
        }
    }

    #[test]
    fn pure_state_picks_a_vertex() {
        let mut s = Sampler::new(9);
        let psi = s.pure_state(4).unwrap();
        let rho = DensityMatrix::from_pure(&psi, &[4]).unwrap();
        let u = s.haar_unitary(4).unwrap();
        let m = rotated_root(&u, &sqrt_psd(rho.matrix(), 1e-9).unwrap());
        let (root, _) = max_root_fidelity(&m, None);
        let overlaps: Vec<f64> = (0..4).map(|k| u.column(k).dotc(psi.amplitudes()).norm_sqr()).collect();
        let best = overlaps.iter().cloned().fold(0.0, f64::max);
        assert!((root * root - best).abs() < 1e-12, "{} {best} {overlaps:?}", root * root);
    }

    #[test]
    fn dephased_relative_entropy_of_uniform_diagonal() {
        assert!((dephased_relative_entropy(&[0.5, 0.0, 0.0, 0.5], 0.0) - 1.0).abs() < 1e-15);
    }
}

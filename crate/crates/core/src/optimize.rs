//! Derivative-free local search over product bases.
//!
//! A product basis near a reference `(U_1, ..., U_n)` is parametrized as
//! `U_k exp(i H_k(θ_k))` with `H_k` Hermitian and zero on the diagonal. The
//! search runs Nelder-Mead in θ, re-centres the chart on the best point and
//! shrinks the initial step until a round no longer improves.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::linalg::{expi_hermitian, generator_len, offdiag_generator};
use crate::numerics::ProductBasis;

/// Settings shared by every basis optimization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    /// Random starting bases (heuristic and seeded starts are extra).
    pub restarts: usize,
    /// Objective evaluations allowed per start.
    pub max_iters: usize,
    /// Convergence threshold on the simplex value spread; also the scale of
    /// the reported finite-difference gradient norm.
    pub grad_tol: f64,
    /// Initial simplex edge in generator coordinates.
    pub step_init: f64,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            restarts: 20,
            max_iters: 4000,
            grad_tol: 1e-12,
            step_init: 0.4,
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 || self.max_iters == 0 {
            return Err(Error::BadParameter(
                "restarts and max_iters must be positive".into(),
            ));
        }
        if !(self.grad_tol > 0.0 && self.step_init > 0.0) {
            return Err(Error::BadParameter(
                "grad_tol and step_init must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Result of one local search.
#[derive(Debug, Clone)]
pub(crate) struct LocalResult {
    pub basis: ProductBasis,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
    pub grad_norm: f64,
}

/// Chart around a reference product basis.
struct Chart<'a> {
    reference: &'a ProductBasis,
    dims: Vec<usize>,
}

impl Chart<'_> {
    fn len(&self) -> usize {
        self.dims.iter().map(|&d| generator_len(d)).sum()
    }

    fn basis(&self, theta: &[f64]) -> ProductBasis {
        let mut offset = 0;
        let factors = self
            .dims
            .iter()
            .zip(self.reference.factors())
            .map(|(&d, u0)| {
                let n = generator_len(d);
                let h = offdiag_generator(&theta[offset..offset + n], d);
                offset += n;
                // Spectral exp of a finite Hermitian matrix does not fail for
                // the bounded steps used here; fall back to the reference.
                match expi_hermitian(&h) {
                    Ok(e) => u0 * e,
                    Err(_) => u0.clone(),
                }
            })
            .collect();
        ProductBasis::from_unitaries(factors)
    }
}

/// Minimizes `f` over product bases starting from `start`.
pub(crate) fn local_search<F>(start: &ProductBasis, cfg: &OptimizerConfig, mut f: F) -> LocalResult
where
    F: FnMut(&ProductBasis) -> f64,
{
    let mut best = start.clone();
    let mut best_val = f(&best);
    let mut evaluations = 1;
    let mut step = cfg.step_init;
    let mut converged = false;
    let dims = best.dims();

    while evaluations < cfg.max_iters && step >= 1e-7 {
        let chart = Chart {
            reference: &best,
            dims: dims.clone(),
        };
        let n = chart.len();
        if n == 0 {
            converged = true;
            break;
        }
        let budget = cfg.max_iters - evaluations;
        let nm = nelder_mead(n, step, budget, cfg.grad_tol, |theta| f(&chart.basis(theta)));
        evaluations += nm.evaluations;
        let improvement = best_val - nm.value;
        if improvement > 0.0 {
            best = chart.basis(&nm.x);
            best_val = nm.value;
        }
        converged = nm.converged && improvement <= cfg.grad_tol;
        if converged {
            break;
        }
        // Large moves re-centre the chart at the same scale; otherwise refine.
        if improvement <= 1e-4 {
            step *= 0.1;
        }
    }

    let grad_norm = {
        let chart = Chart {
            reference: &best,
            dims,
        };
        let h = 1e-6;
        let mut g2 = 0.0;
        let mut theta = vec![0.0; chart.len()];
        for k in 0..theta.len() {
            theta[k] = h;
            let up = f(&chart.basis(&theta));
            theta[k] = -h;
            let down = f(&chart.basis(&theta));
            theta[k] = 0.0;
            let g = (up - down) / (2.0 * h);
            g2 += g * g;
        }
        evaluations += 2 * theta.len();
        g2.sqrt()
    };

    LocalResult {
        basis: best,
        value: best_val,
        evaluations,
        converged,
        grad_norm,
    }
}

pub(crate) struct NelderMeadResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// Nelder-Mead with dimension-adapted coefficients, started from the origin
/// with an axis-aligned simplex of edge `step`.
pub(crate) fn nelder_mead<F>(
    n: usize,
    step: f64,
    max_evals: usize,
    ftol: f64,
    mut f: F,
) -> NelderMeadResult
where
    F: FnMut(&[f64]) -> f64,
{
    let nf = n as f64;
    let alpha = 1.0;
    let gamma = 1.0 + 2.0 / nf;
    let rho = 0.75 - 1.0 / (2.0 * nf);
    let sigma = 1.0 - 1.0 / nf;

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(vec![0.0; n]);
    for k in 0..n {
        let mut v = vec![0.0; n];
        v[k] = step;
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|x| f(x)).collect();
    let mut evals = n + 1;
    let mut converged = false;

    let combine = |a: &[f64], b: &[f64], t: f64| -> Vec<f64> {
        a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect()
    };

    while evals < max_evals {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let spread = values[n] - values[0];
        let diameter = simplex[1..]
            .iter()
            .map(|v| {
                v.iter()
                    .zip(&simplex[0])
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if spread <= ftol && diameter <= 1e-7 || diameter <= 1e-12 {
            converged = true;
            break;
        }

        let mut centroid = vec![0.0; n];
        for v in &simplex[..n] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / nf;
            }
        }
        let worst = simplex[n].clone();
        // x_r = c + α (c − x_w)
        let xr = combine(&centroid, &worst, -alpha);
        let fr = f(&xr);
        evals += 1;
        if fr < values[0] {
            let xe = combine(&centroid, &worst, -gamma);
            let fe = f(&xe);
            evals += 1;
            if fe < fr {
                simplex[n] = xe;
                values[n] = fe;
            } else {
                simplex[n] = xr;
                values[n] = fr;
            }
            continue;
        }
        if fr < values[n - 1] {
            simplex[n] = xr;
            values[n] = fr;
            continue;
        }
        let (xc, fc) = if fr < values[n] {
            let xc = combine(&centroid, &worst, -alpha * rho);
            let fc = f(&xc);
            (xc, fc)
        } else {
            let xc = combine(&centroid, &worst, rho);
            let fc = f(&xc);
            (xc, fc)
        };
        evals += 1;
        if fc < values[n].min(fr) {
            simplex[n] = xc;
            values[n] = fc;
            continue;
        }
        let best = simplex[0].clone();
        for k in 1..=n {
            simplex[k] = combine(&best, &simplex[k], sigma);
            values[k] = f(&simplex[k]);
        }
        evals += n;
    }

    let (i, &value) = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty simplex");
    NelderMeadResult {
        x: simplex[i].clone(),
        value,
        evaluations: evals,
        converged,
    }
}

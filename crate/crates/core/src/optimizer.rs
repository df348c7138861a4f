//! One-dimensional search for the partition factor beta* minimizing the
//! network-wide PAVP bound, subject to SNC stability.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numerics::QuadratureSpec;
use crate::params::SystemParameters;
use crate::snc;

/// Result of the beta line search.
#[derive(Debug, Clone)]
pub struct PartitionSolution {
    pub beta_star: f64,
    pub upsilon_nw_star: f64,
    /// Sampled (beta, upsilon_nw) curve including the assigned endpoints.
    pub curve: Vec<(f64, f64)>,
    /// Beta range where a stable theta exists; None when the grid is
    /// entirely infeasible.
    pub feasible_interval: Option<(f64, f64)>,
}

/// One entry of a sensitivity sweep.
#[derive(Debug, Clone)]
pub struct SweepEntry {
    pub value: f64,
    pub solution: std::result::Result<PartitionSolution, String>,
}

const BETA_LO: f64 = 0.02;
const BETA_HI: f64 = 0.98;
const GOLDEN: f64 = 0.618033988749895;
const BETA_TOL: f64 = 1e-3;

fn upsilon_nw_at_beta(
    p: &SystemParameters,
    beta: f64,
    zeta: f64,
    gamma_th: f64,
    quad: &QuadratureSpec,
) -> Result<(f64, bool)> {
    let r = snc::best_theta(zeta, &p.with_beta(beta), gamma_th, quad)?;
    Ok((r.upsilon_nw, r.stable))
}

/// Grid-then-golden-section minimization of the bound over beta in (0,1).
///
/// The endpoints beta = 0 and beta = 1 are assigned value 1 without
/// evaluation (either tier vanishes there). Ties resolve toward the smallest
/// beta, in both the coarse pass and the refinement, so flat or clamped
/// curves still produce a deterministic minimizer.
pub fn solve_partition(
    p: &SystemParameters,
    zeta: f64,
    gamma_th: f64,
    grid_points: usize,
    quad: &QuadratureSpec,
) -> Result<PartitionSolution> {
    if grid_points < 9 {
        return Err(Error::Simulation("need at least 9 grid points".into()));
    }
    let betas: Vec<f64> = (0..grid_points)
        .map(|i| BETA_LO + (BETA_HI - BETA_LO) * i as f64 / (grid_points - 1) as f64)
        .collect();
    let evals: Vec<(f64, bool)> = betas
        .par_iter()
        .map(|&b| upsilon_nw_at_beta(p, b, zeta, gamma_th, quad))
        .collect::<Result<_>>()?;

    let mut curve = Vec::with_capacity(grid_points + 2);
    curve.push((0.0, 1.0));
    for (b, (v, _)) in betas.iter().zip(&evals) {
        curve.push((*b, *v));
    }
    curve.push((1.0, 1.0));

    let feasible: Vec<f64> = betas
        .iter()
        .zip(&evals)
        .filter(|(_, (_, stable))| *stable)
        .map(|(b, _)| *b)
        .collect();
    let feasible_interval = feasible
        .first()
        .map(|&lo| (lo, *feasible.last().expect("nonempty")));

    if feasible.is_empty() {
        return Ok(PartitionSolution {
            beta_star: f64::NAN,
            upsilon_nw_star: 1.0,
            curve,
            feasible_interval: None,
        });
    }

    // Coarse argmin, first index on ties.
    let mut i_best = 0usize;
    for (i, (v, _)) in evals.iter().enumerate() {
        if *v < evals[i_best].0 {
            i_best = i;
        }
    }
    let coarse_beta = betas[i_best];
    let coarse_value = evals[i_best].0;

    // Golden-section refinement inside the neighboring bracket; `<=` keeps
    // the left interval on ties.
    let mut a = if i_best == 0 {
        BETA_LO
    } else {
        betas[i_best - 1]
    };
    let mut b = if i_best == grid_points - 1 {
        BETA_HI
    } else {
        betas[i_best + 1]
    };
    let eval_beta = |beta: f64| -> f64 {
        match upsilon_nw_at_beta(p, beta, zeta, gamma_th, quad) {
            Ok((v, _)) => v,
            Err(_) => f64::INFINITY,
        }
    };
    let mut x1 = b - GOLDEN * (b - a);
    let mut x2 = a + GOLDEN * (b - a);
    let mut f1 = eval_beta(x1);
    let mut f2 = eval_beta(x2);
    while (b - a) > BETA_TOL {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - GOLDEN * (b - a);
            f1 = eval_beta(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + GOLDEN * (b - a);
            f2 = eval_beta(x2);
        }
    }
    let refined_beta = 0.5 * (a + b);
    let refined_value = eval_beta(refined_beta);

    // Refinement must never be worse than the coarse minimum.
    let (beta_star, upsilon_nw_star) = if refined_value.is_finite() && refined_value < coarse_value
    {
        (refined_beta, refined_value)
    } else {
        (coarse_beta, coarse_value)
    };

    Ok(PartitionSolution {
        beta_star,
        upsilon_nw_star,
        curve,
        feasible_interval,
    })
}

/// Per-value partition solutions while one named parameter sweeps.
/// Failures are recorded per point and the sweep continues.
pub fn sensitivity_sweep(
    p: &SystemParameters,
    vary: &str,
    values: &[f64],
    zeta: f64,
    gamma_th: f64,
    grid_points: usize,
    quad: &QuadratureSpec,
) -> Vec<SweepEntry> {
    values
        .iter()
        .map(|&value| {
            let solve = || -> Result<PartitionSolution> {
                let mut q = p.clone();
                let mut zeta_eff = zeta;
                let mut gamma_eff = gamma_th;
                match vary {
                    "paoi_threshold" => zeta_eff = value,
                    "sinr_threshold" => {
                        q.set_field(vary, value)?;
                        gamma_eff = value;
                    }
                    _ => q.set_field(vary, value)?,
                }
                solve_partition(&q, zeta_eff, gamma_eff, grid_points, quad)
            };
            SweepEntry {
                value,
                solution: solve().map_err(|e| e.to_string()),
            }
        })
        .collect()
}

/// Shape check used by the acceptance suite: after 3-point median smoothing
/// the forward differences of the curve change sign at most once
/// (descending-then-ascending envelope).
pub fn single_dip_shape(curve: &[(f64, f64)]) -> bool {
    if curve.len() < 3 {
        return true;
    }
    let vals: Vec<f64> = curve.iter().map(|(_, v)| *v).collect();
    let mut smooth = vals.clone();
    for i in 1..vals.len() - 1 {
        let mut w = [vals[i - 1], vals[i], vals[i + 1]];
        w.sort_by(|a, b| a.partial_cmp(b).unwrap());
        smooth[i] = w[1];
    }
    let mut sign_changes = 0;
    let mut prev_sign = 0i32;
    for w in smooth.windows(2) {
        let d = w[1] - w[0];
        let sign = if d > 1e-12 {
            1
        } else if d < -1e-12 {
            -1
        } else {
            0
        };
        if sign != 0 {
            if prev_sign != 0 && sign != prev_sign {
                sign_changes += 1;
            }
            prev_sign = sign;
        }
    }
    sign_changes <= 1
}

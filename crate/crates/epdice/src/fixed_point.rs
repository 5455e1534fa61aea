//! Alternation between control optimization at fixed preference weights and
//! weight recomputation from the obtained abatement path, iterated until the
//! abatement paths of two successive optimizations coincide.

use crate::error::{Error, Result};
use crate::optimizer::{initial_controls, optimize, Bounds, OptimizeOpts};
use crate::preference::WeightPath;
use crate::simulate::{ControlPath, Model};

#[derive(Debug, Clone)]
pub struct FixedPointOpts {
    /// Sup-norm tolerance on the abatement path between successive
    /// optimizations.
    pub tolerance: f64,
    /// Maximum number of re-optimizations after the constant-weight pass.
    pub max_iters: usize,
    /// Mixing coefficient in [0,1) applied to the weight-generating abatement
    /// path: 0 feeds the latest optimum straight back (the default), larger
    /// values blend in the previous path for non-convergent parameter corners.
    pub damping: f64,
    pub optimize: OptimizeOpts,
}

impl Default for FixedPointOpts {
    fn default() -> Self {
        FixedPointOpts {
            tolerance: 1e-4,
            max_iters: 50,
            damping: 0.0,
            optimize: OptimizeOpts::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FixedPointStatus {
    /// Successive abatement paths within tolerance.
    Converged,
    /// A period-2 cycle: the path returned to the one from two iterations
    /// ago without the successive change being small.
    Oscillating,
    /// Iteration cap exhausted without either of the above.
    IterationCap,
}

#[derive(Debug, Clone)]
pub struct FixedPointReport {
    pub controls: ControlPath,
    /// Weights regenerated from the final abatement path, so the weight rule
    /// holds exactly for the returned controls.
    pub weights: WeightPath,
    pub status: FixedPointStatus,
    /// Re-optimizations performed after the constant-weight pass; at least 1.
    pub iterations: usize,
    /// Sup-norm abatement change at each iteration.
    pub mu_changes: Vec<f64>,
    /// Welfare of the constant-weight pass followed by each iteration's
    /// optimum (raw welfare units; not comparable across different weights,
    /// recorded for diagnostics).
    pub welfares: Vec<f64>,
    /// Controls the constant-weight pass started from, recorded so alternative
    /// basins can be probed.
    pub start: ControlPath,
    pub warnings: Vec<String>,
}

impl FixedPointReport {
    pub fn converged(&self) -> bool {
        self.status == FixedPointStatus::Converged
    }
}

/// Solves the endogenous-preference problem under standard policy bounds.
pub fn solve_endogenous(model: &Model, opts: &FixedPointOpts) -> Result<FixedPointReport> {
    let bounds = Bounds::standard(model);
    solve_with_bounds(model, &bounds, opts)
}

/// Solves the endogenous-preference problem under caller-supplied bounds
/// (used for the pinned-abatement scenario).
pub fn solve_with_bounds(
    model: &Model,
    bounds: &Bounds,
    opts: &FixedPointOpts,
) -> Result<FixedPointReport> {
    if opts.max_iters == 0 {
        return Err(Error::validation("max_iters", "must be at least 1"));
    }
    if !(opts.tolerance > 0.0) {
        return Err(Error::validation("tolerance", "must be positive"));
    }
    if !(0.0..1.0).contains(&opts.damping) {
        return Err(Error::validation("damping", "must lie in [0, 1)"));
    }

    let prefs = &model.params.preferences;
    let h = model.horizon();
    let start = initial_controls(model, bounds);
    let mut warnings = Vec::new();

    // Constant-weight pass: optimize with every weight at the base value.
    let weights0 = WeightPath::constant_alpha(prefs, h)?;
    let mut inner = optimize(model, &weights0, bounds, &start, &opts.optimize)?;
    if !inner.converged {
        warnings.push(format!(
            "constant-weight optimization stopped at stationarity {:.3e} after {} iterations",
            inner.stationarity, inner.iterations
        ));
    }
    let mut welfares = vec![inner.welfare];
    let mut mu_changes = Vec::new();

    // Abatement path the weights are regenerated from; damping blends in the
    // previous one.
    let mut mu_for_weights = inner.controls.mu.clone();
    let mut mu_two_ago: Option<Vec<f64>> = None;
    let mut status = FixedPointStatus::IterationCap;
    let mut iterations = 0;

    for k in 1..=opts.max_iters {
        let weights = WeightPath::from_mu(prefs, &mu_for_weights)?;
        let prev_mu = inner.controls.mu.clone();
        // Warm start from the previous optimum.
        let next = optimize(model, &weights, bounds, &inner.controls, &opts.optimize)?;
        if !next.converged {
            warnings.push(format!(
                "iteration {k} optimization stopped at stationarity {:.3e} after {} iterations",
                next.stationarity, next.iterations
            ));
        }
        inner = next;
        iterations = k;
        welfares.push(inner.welfare);

        let change = sup_diff(&inner.controls.mu, &prev_mu);
        mu_changes.push(change);
        if change <= opts.tolerance {
            status = FixedPointStatus::Converged;
            break;
        }
        if let Some(old) = &mu_two_ago {
            if sup_diff(&inner.controls.mu, old) <= opts.tolerance {
                status = FixedPointStatus::Oscillating;
                warnings.push(format!(
                    "abatement path cycles with period 2 (iteration {k} matches iteration {})",
                    k - 2
                ));
                break;
            }
        }
        mu_two_ago = Some(prev_mu);
        for (m, new) in mu_for_weights.iter_mut().zip(&inner.controls.mu) {
            *m = opts.damping * *m + (1.0 - opts.damping) * new;
        }
    }

    if status == FixedPointStatus::IterationCap {
        warnings.push(format!(
            "no fixed point within {} iterations (last change {:.3e})",
            opts.max_iters,
            mu_changes.last().copied().unwrap_or(f64::NAN)
        ));
    }
    for i in 2..mu_changes.len() {
        if mu_changes[i] > mu_changes[i - 1] {
            warnings.push(format!(
                "abatement change grew from {:.3e} to {:.3e} at iteration {}",
                mu_changes[i - 1],
                mu_changes[i],
                i + 1
            ));
        }
    }

    let weights = WeightPath::from_mu(prefs, &inner.controls.mu)?;
    Ok(FixedPointReport {
        controls: inner.controls,
        weights,
        status,
        iterations,
        mu_changes,
        welfares,
        start,
        warnings,
    })
}

fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

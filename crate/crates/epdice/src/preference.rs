//! CES utility over market and non-market consumption, endogenous preference
//! weights, relative prices, and welfare aggregation.

use crate::calibration::PreferenceParams;
use crate::error::{Error, Result};
use crate::simulate::{Model, Trajectory};

/// Preference weight on non-market goods: f = alpha + beta_mu * mu.
/// Errors when the result leaves (0, 1).
pub fn preference_weight(alpha: f64, beta_mu: f64, mu: f64) -> Result<f64> {
    let f = alpha + beta_mu * mu;
    if !(f > 0.0 && f < 1.0) {
        return Err(Error::Domain {
            op: "preference_weight",
            reason: format!("alpha + beta_mu*mu = {f} falls outside (0, 1)"),
        });
    }
    Ok(f)
}

/// A per-period weight path together with the abatement path that generated
/// it (all zeros for a constant path).
#[derive(Debug, Clone, PartialEq)]
pub struct WeightPath {
    pub weights: Vec<f64>,
    pub generating_mu: Vec<f64>,
}

impl WeightPath {
    /// Endogenous weights from an abatement path: f_t = alpha + beta_mu*mu_t.
    pub fn from_mu(pref: &PreferenceParams, mu: &[f64]) -> Result<Self> {
        let weights = mu
            .iter()
            .map(|&m| preference_weight(pref.alpha, pref.beta_mu, m))
            .collect::<Result<Vec<_>>>()?;
        Ok(WeightPath {
            weights,
            generating_mu: mu.to_vec(),
        })
    }

    /// Constant weights at the base level alpha (the fixed-point iteration's
    /// starting point).
    pub fn constant_alpha(pref: &PreferenceParams, horizon: usize) -> Result<Self> {
        Self::from_mu(pref, &vec![0.0; horizon])
    }

    /// An exogenous constant path. Unlike endogenous weights, f = 0 is
    /// allowed: the CES degenerates to single-good CRRA in consumption.
    pub fn exogenous(f: f64, horizon: usize) -> Result<Self> {
        if !(f >= 0.0 && f < 1.0) {
            return Err(Error::Domain {
                op: "WeightPath::exogenous",
                reason: format!("weight {f} falls outside [0, 1)"),
            });
        }
        Ok(WeightPath {
            weights: vec![f; horizon],
            generating_mu: vec![0.0; horizon],
        })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Instantaneous utility and its partial derivatives with respect to the two
/// consumption arguments. `c` and `e` must be positive; `theta = 1` selects
/// the Cobb-Douglas limit and `theta = inf` the linear aggregator.
pub(crate) fn utility_and_partials(
    c: f64,
    e: f64,
    weight: f64,
    theta: f64,
    eta: f64,
) -> (f64, f64, f64) {
    let (v, dv_dc, dv_de) = if theta.is_infinite() {
        let v = weight * e + (1.0 - weight) * c;
        (v, 1.0 - weight, weight)
    } else if theta == 1.0 {
        let v = e.powf(weight) * c.powf(1.0 - weight);
        (v, (1.0 - weight) * v / c, weight * v / e)
    } else {
        let b = (theta - 1.0) / theta;
        let s = weight * e.powf(b) + (1.0 - weight) * c.powf(b);
        let v = s.powf(1.0 / b);
        let outer = s.powf(1.0 / b - 1.0);
        (
            v,
            outer * (1.0 - weight) * c.powf(b - 1.0),
            outer * weight * e.powf(b - 1.0),
        )
    };
    if eta == 1.0 {
        (v.ln(), dv_dc / v, dv_de / v)
    } else {
        let marginal = v.powf(-eta);
        (
            v.powf(1.0 - eta) / (1.0 - eta),
            marginal * dv_dc,
            marginal * dv_de,
        )
    }
}

/// CRRA-wrapped CES utility of per-capita market consumption `c` and
/// per-capita non-market consumption `e`.
pub fn instantaneous_utility(c: f64, e: f64, weight: f64, theta: f64, eta: f64) -> Result<f64> {
    if !(c > 0.0) || !(e > 0.0) {
        return Err(Error::Domain {
            op: "instantaneous_utility",
            reason: format!("consumption arguments must be positive, got c={c}, e={e}"),
        });
    }
    if !(weight >= 0.0 && weight < 1.0) {
        return Err(Error::Domain {
            op: "instantaneous_utility",
            reason: format!("weight {weight} falls outside [0, 1)"),
        });
    }
    Ok(utility_and_partials(c, e, weight, theta, eta).0)
}

/// Willingness to pay for non-market goods in market units:
/// (f/(1-f)) * (c/e)^(1/theta). The marginal rate of substitution of the
/// CES aggregator; equals f/(1-f) in the perfect-substitutes limit.
pub fn relative_price(c: f64, e: f64, weight: f64, theta: f64) -> f64 {
    let ratio_term = if theta.is_infinite() {
        1.0
    } else {
        (c / e).powf(1.0 / theta)
    };
    weight / (1.0 - weight) * ratio_term
}

/// Decomposition of the relative price effect into the preference-change and
/// scarcity components. All rates are annualized; entry t covers period
/// t -> t+1, so the series is one shorter than the trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct RpeSeries {
    pub total: Vec<f64>,
    pub preference: Vec<f64>,
    pub scarcity: Vec<f64>,
}

/// Relative price effect along a trajectory: the preference term
/// g_f/(1-f_t) plus the scarcity term (g_c - g_e)/theta, with growth rates
/// as per-period log differences annualized by `period_years`. Constant
/// weights contribute exactly zero to the preference term.
pub fn rpe_series(
    trajectory: &Trajectory,
    weights: &WeightPath,
    theta: f64,
    period_years: f64,
) -> RpeSeries {
    let n = trajectory.periods.len().saturating_sub(1);
    let mut total = Vec::with_capacity(n);
    let mut preference = Vec::with_capacity(n);
    let mut scarcity = Vec::with_capacity(n);
    for t in 0..n {
        let cur = &trajectory.periods[t];
        let next = &trajectory.periods[t + 1];
        let (f0, f1) = (weights.weights[t], weights.weights[t + 1]);
        let g_f = if f1 == f0 {
            0.0
        } else {
            (f1.ln() - f0.ln()) / period_years
        };
        let pe = g_f / (1.0 - f0);
        let g_c = (next.economy.consumption_pc.ln() - cur.economy.consumption_pc.ln()) / period_years;
        let g_e = (next.economy.nonmarket_pc.ln() - cur.economy.nonmarket_pc.ln()) / period_years;
        let se = if theta.is_infinite() {
            0.0
        } else {
            (g_c - g_e) / theta
        };
        preference.push(pe);
        scarcity.push(se);
        total.push(pe + se);
    }
    RpeSeries {
        total,
        preference,
        scarcity,
    }
}

/// Population-weighted discounted utilitarian welfare:
/// sum_t P_t (1+rho)^(-period_years*t) u_t.
pub fn total_welfare(model: &Model, trajectory: &Trajectory, weights: &WeightPath) -> f64 {
    let pref = &model.params.preferences;
    let mut w = 0.0;
    for (t, rec) in trajectory.periods.iter().enumerate() {
        let u = utility_and_partials(
            rec.economy.consumption_pc,
            rec.economy.nonmarket_pc,
            weights.weights[t],
            pref.theta,
            pref.eta,
        )
        .0;
        w += model.discount(t) * model.paths.population[t] * u;
    }
    w
}

/// Per-period welfare diagnostics for a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct WelfareReport {
    pub total: f64,
    /// Instantaneous utility per period.
    pub utility: Vec<f64>,
    /// Willingness to pay for non-market goods per period.
    pub relative_price: Vec<f64>,
    pub rpe: RpeSeries,
}

pub fn welfare_report(model: &Model, trajectory: &Trajectory, weights: &WeightPath) -> WelfareReport {
    let pref = &model.params.preferences;
    let utility = trajectory
        .periods
        .iter()
        .enumerate()
        .map(|(t, rec)| {
            utility_and_partials(
                rec.economy.consumption_pc,
                rec.economy.nonmarket_pc,
                weights.weights[t],
                pref.theta,
                pref.eta,
            )
            .0
        })
        .collect();
    let relative_price = trajectory
        .periods
        .iter()
        .enumerate()
        .map(|(t, rec)| relative_price(rec.economy.consumption_pc, rec.economy.nonmarket_pc, weights.weights[t], pref.theta))
        .collect();
    WelfareReport {
        total: total_welfare(model, trajectory, weights),
        utility,
        relative_price,
        rpe: rpe_series(trajectory, weights, pref.theta, model.params.economy.period_years),
    }
}

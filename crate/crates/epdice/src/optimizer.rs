//! Welfare maximization over abatement and savings paths under box
//! constraints, with an exact adjoint gradient and a finite-difference
//! oracle for testing.

use crate::calibration::ModelParams;
use crate::error::{Error, Result};
use crate::preference::{utility_and_partials, WeightPath};
use crate::simulate::{simulate_into, ControlPath, Model, Trajectory};

/// Savings-rate box applied to free periods.
pub const S_MIN: f64 = 0.05;
pub const S_MAX: f64 = 0.9;
/// Number of terminal periods with the savings rate pinned (suppresses
/// end-of-horizon dissaving). Applied only when the horizon is long enough
/// that toy instances stay unconstrained.
pub const TERMINAL_PIN_PERIODS: usize = 10;
const TERMINAL_PIN_MIN_HORIZON: usize = 21;

const BB_STEP_MIN: f64 = 1e-12;
const BB_STEP_MAX: f64 = 1e10;
const ARMIJO_SLOPE: f64 = 1e-4;
const MAX_BACKTRACKS: u32 = 60;

/// Quasi-steady-state savings rate used for the terminal pin:
/// gamma * (delta + 0.004) / (delta + 0.004*eta + rho), annual rates.
pub fn terminal_savings_rate(params: &ModelParams) -> f64 {
    let e = &params.economy;
    let p = &params.preferences;
    (e.delta + 0.004) / (e.delta + 0.004 * p.eta + p.rho) * e.gamma
}

/// Per-period box constraints on the control path. Pinned coordinates carry
/// equal bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct Bounds {
    pub mu_lo: Vec<f64>,
    pub mu_hi: Vec<f64>,
    pub s_lo: Vec<f64>,
    pub s_hi: Vec<f64>,
}

impl Bounds {
    /// Standard policy-optimization bounds: mu free in [0, mu_max] except
    /// the first period pinned at its historical value; savings free in
    /// [S_MIN, S_MAX] except the terminal pin.
    pub fn standard(model: &Model) -> Bounds {
        let e = &model.params.economy;
        let h = e.horizon;
        let mut b = Bounds {
            mu_lo: vec![0.0; h],
            mu_hi: vec![e.mu_max; h],
            s_lo: vec![S_MIN; h],
            s_hi: vec![S_MAX; h],
        };
        b.mu_lo[0] = e.mu0;
        b.mu_hi[0] = e.mu0;
        if h >= TERMINAL_PIN_MIN_HORIZON {
            let pin = terminal_savings_rate(&model.params);
            for t in h - TERMINAL_PIN_PERIODS..h {
                b.s_lo[t] = pin;
                b.s_hi[t] = pin;
            }
        }
        b
    }

    /// Business-as-usual bounds: mu pinned at its historical value in every
    /// period, savings as in `standard`.
    pub fn business_as_usual(model: &Model) -> Bounds {
        let mut b = Self::standard(model);
        let mu0 = model.params.economy.mu0;
        for t in 0..b.mu_lo.len() {
            b.mu_lo[t] = mu0;
            b.mu_hi[t] = mu0;
        }
        b
    }

    pub fn project(&self, controls: &mut ControlPath) {
        for t in 0..controls.mu.len() {
            controls.mu[t] = controls.mu[t].clamp(self.mu_lo[t], self.mu_hi[t]);
            controls.s[t] = controls.s[t].clamp(self.s_lo[t], self.s_hi[t]);
        }
    }

    fn validate(&self, horizon: usize) -> Result<()> {
        let lens_ok = self.mu_lo.len() == horizon
            && self.mu_hi.len() == horizon
            && self.s_lo.len() == horizon
            && self.s_hi.len() == horizon;
        if !lens_ok {
            return Err(Error::validation("bounds", "bound arrays must match the horizon"));
        }
        for t in 0..horizon {
            if self.mu_lo[t] > self.mu_hi[t] || self.s_lo[t] > self.s_hi[t] {
                return Err(Error::validation(
                    "bounds",
                    format!("lower bound exceeds upper bound at period {t}"),
                ));
            }
        }
        Ok(())
    }
}

/// Ramped starting point: abatement rising linearly from its pinned initial
/// value toward the ceiling, savings at the quasi-steady-state rate.
pub fn initial_controls(model: &Model, bounds: &Bounds) -> ControlPath {
    let e = &model.params.economy;
    let h = e.horizon;
    let ramp = (e.mu_max - e.mu0) / 20.0;
    let s0 = terminal_savings_rate(&model.params);
    let mut c = ControlPath {
        mu: (0..h).map(|t| (e.mu0 + ramp * t as f64).min(e.mu_max)).collect(),
        s: vec![s0; h],
    };
    bounds.project(&mut c);
    c
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GradientMode {
    /// Exact reverse-mode gradient of the forward recursion.
    Adjoint,
    /// Central finite differences (the testing oracle; 4*horizon simulations
    /// per gradient).
    FiniteDifference,
}

#[derive(Debug, Clone)]
pub struct OptimizeOpts {
    pub max_iters: usize,
    /// Stationarity tolerance: sup-norm of the projected gradient of the
    /// welfare objective normalized by |welfare at the starting point|.
    pub tolerance: f64,
    /// Relative step of the finite-difference gradient.
    pub fd_step: f64,
    pub gradient: GradientMode,
    /// Positive constant multiplying the objective; the optimum is invariant
    /// to it (numerical-conditioning knob, exercised by tests).
    pub welfare_scale: f64,
}

impl Default for OptimizeOpts {
    fn default() -> Self {
        OptimizeOpts {
            max_iters: 40_000,
            tolerance: 1e-6,
            fd_step: 1e-6,
            gradient: GradientMode::Adjoint,
            welfare_scale: 1.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct OptimizationReport {
    pub controls: ControlPath,
    /// Welfare at the returned controls (raw units, unaffected by
    /// `welfare_scale`).
    pub welfare: f64,
    /// Accepted ascent steps.
    pub iterations: usize,
    /// Final sup-norm of the normalized projected gradient.
    pub stationarity: f64,
    pub converged: bool,
    /// Welfare after each accepted step (raw units); non-decreasing.
    pub welfare_history: Vec<f64>,
}

/// Welfare and its exact gradient with respect to every control coordinate,
/// both in raw welfare units.
pub fn adjoint_gradient(
    model: &Model,
    controls: &ControlPath,
    weights: &WeightPath,
) -> Result<(f64, ControlPath)> {
    let mut scratch = Trajectory::default();
    let welfare = simulate_into(model, controls, weights, None, &mut scratch)?;
    let mut grad = ControlPath {
        mu: vec![0.0; controls.len()],
        s: vec![0.0; controls.len()],
    };
    adjoint_into(model, controls, weights, &scratch, &mut grad);
    Ok((welfare, grad))
}

/// Reverse sweep over a simulated trajectory. `grad` receives dW/dmu_t and
/// dW/ds_t.
fn adjoint_into(
    model: &Model,
    controls: &ControlPath,
    weights: &WeightPath,
    traj: &Trajectory,
    grad: &mut ControlPath,
) {
    let params = &model.params;
    let h = model.horizon();
    let py = params.economy.period_years;
    let phi2 = params.economy.phi2;
    let gamma = params.economy.gamma;
    let sv = model.capital_survival();
    let cl = &params.climate;
    let (z1, z2, z3, z4) = (cl.zeta1, cl.zeta2, cl.zeta3, cl.zeta4);
    let t_coef = 1.0 - z1 * z2 - z1 * z3;
    let psi1 = params.damages.psi1;
    let psi2 = params.damages.psi2;
    let theta = params.preferences.theta;
    let eta = params.preferences.eta;
    // GtCO2 emitted over one period -> GtC injected.
    let cem = 1.0 / cl.gtco2_per_gtc;

    // Adjoints of the state entering period t+1; zero beyond the horizon.
    let (mut a_k, mut a_at, mut a_up, mut a_lo, mut a_t, mut a_tl) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);

    for t in (0..h).rev() {
        let rec = &traj.periods[t];
        let econ = &rec.economy;
        let disc = model.discount(t);
        let sigma = model.paths.carbon_intensity[t];
        let phi1 = model.paths.abatement_unit_cost[t];
        let mu = controls.mu[t];
        let s = controls.s[t];
        let temp = rec.climate.t_at;
        let one_plus_omega = 1.0 + econ.damage_frac;

        let (_, uc, ue) =
            utility_and_partials(econ.consumption_pc, econ.nonmarket_pc, weights.weights[t], theta, eta);
        // d(welfare)/d(aggregate consumption rate) and the non-market analog;
        // the 1000/P per-capita scaling cancels against the P population
        // weight in the welfare sum.
        let w_c = disc * 1000.0 * uc;
        let w_e = disc * 1000.0 * ue;

        // Sensitivity to the atmospheric stock at t+1 including its effect
        // on T_{t+1} through forcing.
        let a_at_eff = if t + 1 < h {
            a_at + a_t * z1 * cl.kappa / (std::f64::consts::LN_2 * traj.periods[t + 1].climate.l_at)
        } else {
            0.0
        };

        let a_y = w_c * (1.0 - s) + a_k * py * s;
        let a_g = a_y * (1.0 - econ.abatement_cost_frac) / one_plus_omega
            + a_at_eff * (1.0 - mu) * sigma * py * cem;

        grad.mu[t] = -a_y * econ.gross_output * phi1 * phi2 * mu.powf(phi2 - 1.0) / one_plus_omega
            - a_at_eff * sigma * econ.gross_output * py * cem;
        grad.s[t] = econ.net_output * (a_k * py - w_c);

        let de_dt = -econ.nonmarket_stock * 2.0 * psi2 * temp / (1.0 + psi2 * temp * temp);
        let n_k = a_g * gamma * econ.gross_output / econ.capital + a_k * sv;
        let n_t = -a_y * econ.net_output * 2.0 * psi1 * temp / one_plus_omega
            + w_e * de_dt
            + a_t * t_coef
            + a_tl * (1.0 - z4);
        let n_tl = a_t * z1 * z3 + a_tl * z4;
        let n_at = a_at_eff * cl.phi[0][0] + a_up * cl.phi[1][0] + a_lo * cl.phi[2][0];
        let n_up = a_at_eff * cl.phi[0][1] + a_up * cl.phi[1][1] + a_lo * cl.phi[2][1];
        let n_lo = a_at_eff * cl.phi[0][2] + a_up * cl.phi[1][2] + a_lo * cl.phi[2][2];

        a_k = n_k;
        a_t = n_t;
        a_tl = n_tl;
        a_at = n_at;
        a_up = n_up;
        a_lo = n_lo;
    }
}

/// Central finite-difference gradient of raw welfare; the testing oracle for
/// `adjoint_gradient`. Steps are relative: h_i = rel_step * max(1, |x_i|).
pub fn fd_gradient(
    model: &Model,
    controls: &ControlPath,
    weights: &WeightPath,
    rel_step: f64,
) -> Result<ControlPath> {
    let h = controls.len();
    let mut scratch = Trajectory::default();
    let mut probe = controls.clone();
    let mut grad = ControlPath {
        mu: vec![0.0; h],
        s: vec![0.0; h],
    };
    for t in 0..h {
        let step = rel_step * controls.mu[t].abs().max(1.0);
        probe.mu[t] = controls.mu[t] + step;
        let up = simulate_into(model, &probe, weights, None, &mut scratch)?;
        probe.mu[t] = controls.mu[t] - step;
        let down = simulate_into(model, &probe, weights, None, &mut scratch)?;
        probe.mu[t] = controls.mu[t];
        grad.mu[t] = (up - down) / (2.0 * step);
    }
    for t in 0..h {
        let step = rel_step * controls.s[t].abs().max(1.0);
        probe.s[t] = controls.s[t] + step;
        let up = simulate_into(model, &probe, weights, None, &mut scratch)?;
        probe.s[t] = controls.s[t] - step;
        let down = simulate_into(model, &probe, weights, None, &mut scratch)?;
        probe.s[t] = controls.s[t];
        grad.s[t] = (up - down) / (2.0 * step);
    }
    Ok(grad)
}

struct Objective<'a> {
    model: &'a Model,
    weights: &'a WeightPath,
    opts: &'a OptimizeOpts,
    /// Normalization: |welfare_scale * W(start)|, bounded away from zero.
    norm: f64,
    scratch: Trajectory,
    controls_buf: ControlPath,
    grad_buf: ControlPath,
}

impl<'a> Objective<'a> {
    /// Normalized objective value at packed point `x`.
    fn value(&mut self, x: &[f64]) -> Result<f64> {
        unpack(x, &mut self.controls_buf);
        let w = simulate_into(self.model, &self.controls_buf, self.weights, None, &mut self.scratch)?;
        Ok(w * self.opts.welfare_scale / self.norm)
    }

    /// Normalized objective value and gradient at packed point `x`.
    fn value_and_grad(&mut self, x: &[f64], g: &mut [f64]) -> Result<f64> {
        unpack(x, &mut self.controls_buf);
        let w = simulate_into(self.model, &self.controls_buf, self.weights, None, &mut self.scratch)?;
        match self.opts.gradient {
            GradientMode::Adjoint => {
                adjoint_into(
                    self.model,
                    &self.controls_buf,
                    self.weights,
                    &self.scratch,
                    &mut self.grad_buf,
                );
            }
            GradientMode::FiniteDifference => {
                self.grad_buf =
                    fd_gradient(self.model, &self.controls_buf, self.weights, self.opts.fd_step)?;
            }
        }
        let k = self.opts.welfare_scale / self.norm;
        let h = self.grad_buf.len();
        for t in 0..h {
            g[t] = self.grad_buf.mu[t] * k;
            g[h + t] = self.grad_buf.s[t] * k;
        }
        Ok(w * self.opts.welfare_scale / self.norm)
    }
}

fn pack(c: &ControlPath) -> Vec<f64> {
    let mut x = Vec::with_capacity(2 * c.len());
    x.extend_from_slice(&c.mu);
    x.extend_from_slice(&c.s);
    x
}

fn unpack(x: &[f64], c: &mut ControlPath) {
    let h = x.len() / 2;
    c.mu.clear();
    c.mu.extend_from_slice(&x[..h]);
    c.s.clear();
    c.s.extend_from_slice(&x[h..]);
}

fn project_point(x: &mut [f64], lo: &[f64], hi: &[f64]) {
    for i in 0..x.len() {
        x[i] = x[i].clamp(lo[i], hi[i]);
    }
}

/// Sup-norm of the projected gradient: components pushing against an active
/// bound are dropped.
fn stationarity(x: &[f64], g: &[f64], lo: &[f64], hi: &[f64]) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..x.len() {
        let blocked_hi = x[i] >= hi[i] && g[i] > 0.0;
        let blocked_lo = x[i] <= lo[i] && g[i] < 0.0;
        if !(blocked_hi || blocked_lo) {
            worst = worst.max(g[i].abs());
        }
    }
    worst
}

/// Maximizes welfare over the bounded control space by spectral projected
/// gradient ascent (Barzilai-Borwein steps, monotone Armijo backtracking).
pub fn optimize(
    model: &Model,
    weights: &WeightPath,
    bounds: &Bounds,
    start: &ControlPath,
    opts: &OptimizeOpts,
) -> Result<OptimizationReport> {
    let h = model.horizon();
    bounds.validate(h)?;
    if start.len() != h {
        return Err(Error::validation("start", "starting controls must match the horizon"));
    }
    if weights.len() != h {
        return Err(Error::validation("weights", "weight path must match the horizon"));
    }
    if !(opts.welfare_scale > 0.0 && opts.welfare_scale.is_finite()) {
        return Err(Error::validation("welfare_scale", "must be positive and finite"));
    }
    if !(opts.tolerance > 0.0) {
        return Err(Error::validation("tolerance", "must be positive"));
    }

    let mut lo = Vec::with_capacity(2 * h);
    lo.extend_from_slice(&bounds.mu_lo);
    lo.extend_from_slice(&bounds.s_lo);
    let mut hi = Vec::with_capacity(2 * h);
    hi.extend_from_slice(&bounds.mu_hi);
    hi.extend_from_slice(&bounds.s_hi);

    let mut x = pack(start);
    project_point(&mut x, &lo, &hi);

    let mut obj = Objective {
        model,
        weights,
        opts,
        norm: 1.0,
        scratch: Trajectory::default(),
        controls_buf: ControlPath {
            mu: Vec::with_capacity(h),
            s: Vec::with_capacity(h),
        },
        grad_buf: ControlPath {
            mu: vec![0.0; h],
            s: vec![0.0; h],
        },
    };
    // Normalize by the starting welfare magnitude so the tolerance and the
    // iterates are invariant to positive rescaling of utility. `value`
    // already carries `welfare_scale`.
    let w0 = obj.value(&x)?;
    obj.norm = w0.abs().max(1e-12);

    let n = 2 * h;
    let mut g = vec![0.0; n];
    let mut value = obj.value_and_grad(&x, &mut g)?;
    let mut welfare_history = vec![value * obj.norm / opts.welfare_scale];

    let mut step = {
        let pg0 = stationarity(&x, &g, &lo, &hi);
        if pg0 > 0.0 {
            (1.0 / pg0).clamp(BB_STEP_MIN, BB_STEP_MAX)
        } else {
            1.0
        }
    };

    let mut iterations = 0;
    let mut converged = false;
    let mut stat = stationarity(&x, &g, &lo, &hi);
    let mut trial = vec![0.0; n];
    let mut g_new = vec![0.0; n];

    while iterations < opts.max_iters {
        if stat <= opts.tolerance {
            converged = true;
            break;
        }

        // Projected ascent direction for the current spectral step.
        let mut dir = vec![0.0; n];
        for i in 0..n {
            dir[i] = (x[i] + step * g[i]).clamp(lo[i], hi[i]) - x[i];
        }
        let slope: f64 = g.iter().zip(&dir).map(|(gi, di)| gi * di).sum();
        if slope <= 0.0 {
            // Numerically stationary along every feasible direction.
            break;
        }

        let mut lambda = 1.0;
        let mut accepted = false;
        let mut trial_value = value;
        for _ in 0..MAX_BACKTRACKS {
            for i in 0..n {
                trial[i] = x[i] + lambda * dir[i];
            }
            project_point(&mut trial, &lo, &hi);
            trial_value = obj.value(&trial)?;
            if trial_value >= value + ARMIJO_SLOPE * lambda * slope {
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted {
            break;
        }

        let new_value = obj.value_and_grad(&trial, &mut g_new)?;
        debug_assert_eq!(new_value, trial_value);

        // Barzilai-Borwein spectral step from the accepted displacement.
        let mut ss = 0.0;
        let mut sy = 0.0;
        for i in 0..n {
            let si = trial[i] - x[i];
            ss += si * si;
            sy += si * (g[i] - g_new[i]);
        }
        step = if sy > 0.0 {
            (ss / sy).clamp(BB_STEP_MIN, BB_STEP_MAX)
        } else {
            BB_STEP_MAX
        };

        x.copy_from_slice(&trial);
        g.copy_from_slice(&g_new);
        value = new_value;
        iterations += 1;
        welfare_history.push(value * obj.norm / opts.welfare_scale);
        stat = stationarity(&x, &g, &lo, &hi);
        if ss == 0.0 {
            // The projection absorbed the whole step.
            break;
        }
    }
    if stat <= opts.tolerance {
        converged = true;
    }

    let mut controls = ControlPath {
        mu: vec![0.0; h],
        s: vec![0.0; h],
    };
    unpack(&x, &mut controls);
    let welfare = value * obj.norm / opts.welfare_scale;

    Ok(OptimizationReport {
        controls,
        welfare,
        iterations,
        stationarity: stat,
        converged,
        welfare_history,
    })
}

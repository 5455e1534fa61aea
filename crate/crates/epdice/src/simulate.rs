//! Forward simulation of the coupled climate-economy recursion.

use crate::calibration::{build_exogenous_paths, ExogenousPaths, ModelParams};
use crate::climate::{self, ClimateState};
use crate::economy::{self, EconomyState};
use crate::error::{Error, Result};
use crate::preference::{utility_and_partials, WeightPath};

/// Abatement and savings rates, one entry per period.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlPath {
    pub mu: Vec<f64>,
    pub s: Vec<f64>,
}

impl ControlPath {
    pub fn constant(mu: f64, s: f64, horizon: usize) -> Self {
        ControlPath {
            mu: vec![mu; horizon],
            s: vec![s; horizon],
        }
    }

    pub fn len(&self) -> usize {
        self.mu.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mu.is_empty()
    }
}

/// One period of simulated state. Stocks are start-of-period; flows are
/// annual rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodRecord {
    pub year: i32,
    pub climate: ClimateState,
    pub economy: EconomyState,
    /// Industrial emissions, GtCO2/yr.
    pub industrial_emissions: f64,
    /// Land-use emissions, GtCO2/yr.
    pub land_emissions: f64,
    /// Preference weight applied this period.
    pub weight: f64,
    /// Instantaneous utility.
    pub utility: f64,
}

/// Full simulated state history.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    pub periods: Vec<PeriodRecord>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.periods.len()
    }

    pub fn is_empty(&self) -> bool {
        self.periods.is_empty()
    }

    pub fn at_year(&self, year: i32) -> Option<&PeriodRecord> {
        self.periods.iter().find(|r| r.year == year)
    }
}

/// An atmospheric carbon pulse injected at one period's carbon update,
/// used by the social-cost finite differences.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Pulse {
    pub period: usize,
    pub gtco2: f64,
}

/// Calibrated parameters plus derived exogenous paths and per-period
/// precomputations.
#[derive(Debug, Clone)]
pub struct Model {
    pub params: ModelParams,
    pub paths: ExogenousPaths,
    /// (1+rho)^(-period_years * t)
    discount: Vec<f64>,
    /// (population_t / 1000)^(1-gamma)
    pop_factor: Vec<f64>,
    /// (1-delta)^period_years
    capital_survival: f64,
}

impl Model {
    pub fn new(params: ModelParams) -> Result<Self> {
        params.validate()?;
        let paths = build_exogenous_paths(&params)?;
        let h = params.economy.horizon;
        let years = params.economy.period_years;
        let discount = (0..h)
            .map(|t| (1.0 + params.preferences.rho).powf(-years * t as f64))
            .collect();
        let pop_factor = paths
            .population
            .iter()
            .map(|p| (p / 1000.0).powf(1.0 - params.economy.gamma))
            .collect();
        let capital_survival = (1.0 - params.economy.delta).powf(years);
        Ok(Model {
            params,
            paths,
            discount,
            pop_factor,
            capital_survival,
        })
    }

    pub fn horizon(&self) -> usize {
        self.params.economy.horizon
    }

    /// Calendar year of period `t`.
    pub fn year(&self, t: usize) -> i32 {
        self.params.base_year + (t as f64 * self.params.economy.period_years).round() as i32
    }

    /// Period index of a calendar year, when it falls on the grid.
    pub fn year_index(&self, year: i32) -> Option<usize> {
        (0..self.horizon()).find(|&t| self.year(t) == year)
    }

    pub fn discount(&self, t: usize) -> f64 {
        self.discount[t]
    }

    pub(crate) fn capital_survival(&self) -> f64 {
        self.capital_survival
    }

    pub(crate) fn pop_factor(&self, t: usize) -> f64 {
        self.pop_factor[t]
    }
}

/// Simulates the trajectory generated by `controls` under `weights`.
pub fn simulate(model: &Model, controls: &ControlPath, weights: &WeightPath) -> Result<Trajectory> {
    let mut trajectory = Trajectory::default();
    simulate_into(model, controls, weights, None, &mut trajectory)?;
    Ok(trajectory)
}

/// Welfare of the trajectory generated by `controls` under `weights`.
pub fn welfare_of(model: &Model, controls: &ControlPath, weights: &WeightPath) -> Result<f64> {
    let mut scratch = Trajectory::default();
    simulate_into(model, controls, weights, None, &mut scratch)
}

/// Forward recursion. Fills `out.periods` (reusing its allocation) and
/// returns total welfare. Control values are taken as given: box bounds are
/// the optimizer's concern, so small excursions (finite-difference probes at
/// a bound) simulate fine; only physical feasibility is enforced.
pub(crate) fn simulate_into(
    model: &Model,
    controls: &ControlPath,
    weights: &WeightPath,
    pulse: Option<Pulse>,
    out: &mut Trajectory,
) -> Result<f64> {
    let h = model.horizon();
    if controls.mu.len() != h || controls.s.len() != h {
        return Err(Error::validation(
            "controls",
            format!("control path length must equal horizon {h}"),
        ));
    }
    if weights.len() != h {
        return Err(Error::validation(
            "weights",
            format!("weight path length must equal horizon {h}"),
        ));
    }

    let params = &model.params;
    let econ = &params.economy;
    let pref = &params.preferences;
    let years = econ.period_years;

    out.periods.clear();
    out.periods.reserve(h);

    let mut climate_state = ClimateState::initial(&params.climate, model.paths.forcing_exogenous[0]);
    let mut capital = econ.k0;
    let mut welfare = 0.0;

    for t in 0..h {
        let mu = controls.mu[t];
        let s = controls.s[t];
        let f = weights.weights[t];
        if !mu.is_finite() || !s.is_finite() || s >= 1.0 {
            return Err(Error::Infeasible {
                period: t,
                year: model.year(t),
                reason: format!("controls mu={mu}, s={s} are not simulable"),
            });
        }

        let pop = model.paths.population[t];
        let gross = model.paths.tfp[t] * capital.powf(econ.gamma) * model.pop_factor(t);
        let damage = economy::damage_fraction(climate_state.t_at, params.damages.psi1);
        let abat = economy::abatement_cost_fraction(mu, model.paths.abatement_unit_cost[t], econ.phi2);
        let produced = economy::net_output(gross, damage, abat);
        let invest = s * produced;
        let consumption = produced - invest;
        // Recompose so the reported accounting identity C + I = Y is exact
        // in floating point, not just to rounding.
        let net = consumption + invest;
        let c_pc = consumption * 1000.0 / pop;
        let stock = economy::nonmarket_stock(climate_state.t_at, &params.damages);
        let e_pc = stock * 1000.0 / pop;

        if !(net > 0.0 && consumption > 0.0 && c_pc.is_finite()) {
            return Err(Error::Infeasible {
                period: t,
                year: model.year(t),
                reason: format!("non-positive output or consumption (net={net}, consumption={consumption})"),
            });
        }

        let utility = utility_and_partials(c_pc, e_pc, f, pref.theta, pref.eta).0;
        welfare += model.discount(t) * pop * utility;

        let ei_period = economy::industrial_emissions(mu, model.paths.carbon_intensity[t], gross, years);
        let land_period = model.paths.land_emissions[t];

        out.periods.push(PeriodRecord {
            year: model.year(t),
            climate: climate_state,
            economy: EconomyState {
                capital,
                gross_output: gross,
                net_output: net,
                consumption_total: consumption,
                consumption_pc: c_pc,
                investment: invest,
                nonmarket_stock: stock,
                nonmarket_pc: e_pc,
                damage_frac: damage,
                abatement_cost_frac: abat,
            },
            industrial_emissions: ei_period / years,
            land_emissions: land_period / years,
            weight: f,
            utility,
        });

        if t + 1 < h {
            let extra = match pulse {
                Some(p) if p.period == t => p.gtco2,
                _ => 0.0,
            };
            let after_carbon =
                climate::step_carbon(&climate_state, ei_period + extra, land_period, &params.climate);
            let chi = climate::forcing(
                after_carbon.l_at,
                model.paths.forcing_exogenous[t + 1],
                &params.climate,
            );
            climate_state = climate::step_temperature(&after_carbon, chi, &params.climate);
            capital = economy::step_capital(capital, invest, econ.delta, years);

            if !(climate_state.l_at > 0.0 && climate_state.t_at.is_finite() && capital > 0.0) {
                return Err(Error::Infeasible {
                    period: t + 1,
                    year: model.year(t + 1),
                    reason: "state left the feasible region".to_string(),
                });
            }
        }
    }

    Ok(welfare)
}

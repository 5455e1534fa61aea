//! Headline quantities derived from converged trajectories: social cost of
//! carbon, monetary non-market damages, net-zero timing, scenario runs,
//! sensitivity sweeps, and the CSV/JSON emitters behind the CLI artifacts.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::calibration::ModelParams;
use crate::error::{Error, Result};
use crate::fixed_point::{solve_with_bounds, FixedPointOpts, FixedPointStatus};
use crate::optimizer::{initial_controls, optimize, Bounds};
use crate::preference::{
    relative_price, utility_and_partials, welfare_report, WeightPath, WelfareReport,
};
use crate::simulate::{simulate_into, ControlPath, Model, Pulse, Trajectory};

/// Industrial emissions at or below this annual rate count as net zero
/// (GtCO2/yr).
pub const NET_ZERO_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    /// Single-good utility (zero non-market weight) with the aggregate
    /// DICE-2016 damage coefficient; one optimization.
    Dice,
    /// Abatement pinned at its initial value, savings optimized.
    BusinessAsUsual,
    /// Relative price effect with a fixed preference weight (beta_mu = 0).
    Rpe,
    /// Relative price effect with endogenous preferences; full fixed point.
    RpeEp,
}

impl Scenario {
    pub const ALL: [Scenario; 4] =
        [Scenario::Dice, Scenario::BusinessAsUsual, Scenario::Rpe, Scenario::RpeEp];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Dice => "dice",
            Scenario::BusinessAsUsual => "bau",
            Scenario::Rpe => "rpe",
            Scenario::RpeEp => "rpe-ep",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dice" => Ok(Scenario::Dice),
            "bau" => Ok(Scenario::BusinessAsUsual),
            "rpe" => Ok(Scenario::Rpe),
            "rpe-ep" => Ok(Scenario::RpeEp),
            other => Err(Error::validation(
                "scenario",
                format!("unknown scenario '{other}'; valid names: dice, bau, rpe, rpe-ep"),
            )),
        }
    }
}

/// Finite-difference perturbation sizes behind the social cost of carbon.
#[derive(Debug, Clone, Copy)]
pub struct SccOpts {
    /// Atmospheric pulse, GtCO2.
    pub pulse_gtco2: f64,
    /// Consumption increment, trillion $/yr for one period.
    pub consumption_increment: f64,
}

impl Default for SccOpts {
    fn default() -> Self {
        SccOpts {
            pulse_gtco2: 1e-3,
            consumption_increment: 1e-3,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOpts {
    pub fixed_point: FixedPointOpts,
    pub scc: SccOpts,
}

#[derive(Debug, Clone)]
pub struct FixedPointSummary {
    pub iterations: usize,
    pub status: FixedPointStatus,
    pub mu_changes: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct ScenarioResult {
    pub scenario: Scenario,
    /// Parameters the scenario actually ran under (after scenario-specific
    /// overrides).
    pub params: ModelParams,
    pub controls: ControlPath,
    pub weights: WeightPath,
    pub trajectory: Trajectory,
    pub welfare: f64,
    pub report: WelfareReport,
    /// Social cost of carbon per period, $/tCO2; length horizon−1 (a pulse
    /// in the final period has no successor to propagate into).
    pub scc: Vec<f64>,
    /// Monetary value of the non-market stock loss, trillion $; length
    /// horizon.
    pub valuation: Vec<f64>,
    pub net_zero_year: Option<i32>,
    pub fixed_point: Option<FixedPointSummary>,
    pub converged: bool,
    pub warnings: Vec<String>,
}

impl ScenarioResult {
    pub fn period_index(&self, year: i32) -> Option<usize> {
        self.trajectory.periods.iter().position(|r| r.year == year)
    }

    pub fn scc_at_year(&self, year: i32) -> Option<f64> {
        self.period_index(year).and_then(|t| self.scc.get(t).copied())
    }
}

/// Social cost of carbon at one period: the welfare loss of a small
/// atmospheric pulse at that period's carbon update divided by the welfare
/// gain of a small consumption increment in the same period, converted to
/// $/tCO2. The period length scales the emission-flow sensitivity (a unit
/// annual rate sustained for one period injects `period_years` of mass).
pub fn scc_at(
    model: &Model,
    controls: &ControlPath,
    weights: &WeightPath,
    base_welfare: f64,
    base: &Trajectory,
    opts: &SccOpts,
    period: usize,
) -> Result<f64> {
    let mut scratch = Trajectory::default();
    let pulsed = simulate_into(
        model,
        controls,
        weights,
        Some(Pulse {
            period,
            gtco2: opts.pulse_gtco2,
        }),
        &mut scratch,
    )?;
    let d_w_mass = pulsed - base_welfare;

    let rec = &base.periods[period];
    let pop = model.paths.population[period];
    let pref = &model.params.preferences;
    let (u0, _, _) = utility_and_partials(
        rec.economy.consumption_pc,
        rec.economy.nonmarket_pc,
        rec.weight,
        pref.theta,
        pref.eta,
    );
    let bumped_c = rec.economy.consumption_pc + 1000.0 * opts.consumption_increment / pop;
    let (u1, _, _) = utility_and_partials(bumped_c, rec.economy.nonmarket_pc, rec.weight, pref.theta, pref.eta);
    let d_w_cons = model.discount(period) * pop * (u1 - u0);

    if d_w_cons <= 0.0 || !d_w_cons.is_finite() || !d_w_mass.is_finite() {
        return Err(Error::Numerical(format!(
            "social cost of carbon at period {period}: welfare differences {d_w_mass:.6e} (pulse) / {d_w_cons:.6e} (consumption) are not usable"
        )));
    }
    // (trillion $ / GtCO2) -> $/tCO2 is a factor 1000.
    let per_mass = -d_w_mass / opts.pulse_gtco2;
    let per_dollar = d_w_cons / opts.consumption_increment;
    Ok(1000.0 * model.params.economy.period_years * per_mass / per_dollar + 0.0)
}

/// Social cost of carbon for every period with a successor.
pub fn scc_series(
    model: &Model,
    controls: &ControlPath,
    weights: &WeightPath,
    base_welfare: f64,
    base: &Trajectory,
    opts: &SccOpts,
) -> Result<Vec<f64>> {
    (0..model.horizon().saturating_sub(1))
        .map(|t| scc_at(model, controls, weights, base_welfare, base, opts, t))
        .collect()
}

/// Monetary value of the non-market stock loss per period: the destroyed
/// stock times the relative price of non-market goods, trillion $.
pub fn nonmarket_damage_value(
    params: &ModelParams,
    trajectory: &Trajectory,
    weights: &WeightPath,
) -> Vec<f64> {
    let theta = params.preferences.theta;
    let e0 = params.damages.e0;
    trajectory
        .periods
        .iter()
        .zip(&weights.weights)
        .map(|(rec, &f)| {
            let price = relative_price(rec.economy.consumption_pc, rec.economy.nonmarket_pc, f, theta);
            (e0 - rec.economy.nonmarket_stock) * price
        })
        .collect()
}

/// First calendar year whose annual industrial emissions are at or below
/// `NET_ZERO_EPS`.
pub fn net_zero_year(trajectory: &Trajectory) -> Option<i32> {
    trajectory
        .periods
        .iter()
        .find(|r| r.industrial_emissions <= NET_ZERO_EPS)
        .map(|r| r.year)
}

/// Runs one named scenario end to end.
pub fn run_scenario(scenario: Scenario, params: &ModelParams, opts: &RunOpts) -> Result<ScenarioResult> {
    let mut params = params.clone();
    let mut warnings = Vec::new();

    let (controls, weights, fixed_point, converged) = match scenario {
        Scenario::Dice => {
            params.damages.psi1 = params.dice_psi1;
            params.validate()?;
            let model = Model::new(params.clone())?;
            let weights = WeightPath::exogenous(0.0, model.horizon())?;
            let bounds = Bounds::standard(&model);
            let start = initial_controls(&model, &bounds);
            let inner = optimize(&model, &weights, &bounds, &start, &opts.fixed_point.optimize)?;
            if !inner.converged {
                warnings.push(format!(
                    "optimization stopped at stationarity {:.3e} after {} iterations",
                    inner.stationarity, inner.iterations
                ));
            }
            (inner.controls, weights, None, inner.converged)
        }
        Scenario::BusinessAsUsual | Scenario::Rpe | Scenario::RpeEp => {
            if scenario == Scenario::Rpe {
                params.preferences.beta_mu = 0.0;
                params.validate()?;
            }
            let model = Model::new(params.clone())?;
            let bounds = match scenario {
                Scenario::BusinessAsUsual => Bounds::business_as_usual(&model),
                _ => Bounds::standard(&model),
            };
            let rep = solve_with_bounds(&model, &bounds, &opts.fixed_point)?;
            warnings.extend(rep.warnings.iter().cloned());
            let summary = FixedPointSummary {
                iterations: rep.iterations,
                status: rep.status,
                mu_changes: rep.mu_changes.clone(),
            };
            let ok = rep.converged();
            (rep.controls, rep.weights, Some(summary), ok)
        }
    };

    let model = Model::new(params.clone())?;
    let mut trajectory = Trajectory::default();
    let welfare = simulate_into(&model, &controls, &weights, None, &mut trajectory)?;
    let report = welfare_report(&model, &trajectory, &weights);
    let scc = scc_series(&model, &controls, &weights, welfare, &trajectory, &opts.scc)?;
    let valuation = nonmarket_damage_value(&params, &trajectory, &weights);
    let net_zero = net_zero_year(&trajectory);

    if let Some(w) = abatement_ramp_warning(&controls, params.economy.mu_max) {
        warnings.push(w);
    }

    Ok(ScenarioResult {
        scenario,
        params,
        controls,
        weights,
        trajectory,
        welfare,
        report,
        scc,
        valuation,
        net_zero_year: net_zero,
        fixed_point,
        converged,
        warnings,
    })
}

/// Abatement is expected to ramp monotonically until it first saturates;
/// violations are diagnostics, not errors.
fn abatement_ramp_warning(controls: &ControlPath, mu_max: f64) -> Option<String> {
    let saturation = controls
        .mu
        .iter()
        .position(|&m| m >= mu_max - 1e-9)
        .unwrap_or(controls.mu.len());
    for t in 1..saturation {
        if controls.mu[t] < controls.mu[t - 1] - 1e-9 {
            return Some(format!(
                "abatement path decreases before saturation at period {t} ({:.6} -> {:.6})",
                controls.mu[t - 1],
                controls.mu[t]
            ));
        }
    }
    None
}

/// Headline numbers for one scenario or sweep cell.
#[derive(Debug, Clone, Serialize)]
pub struct ScenarioSummary {
    pub scenario: String,
    pub welfare: f64,
    pub scc_2020: Option<f64>,
    pub scc_2050: Option<f64>,
    pub scc_2100: Option<f64>,
    pub temperature_2100: Option<f64>,
    pub peak_temperature: f64,
    pub net_zero_year: Option<i32>,
    pub industrial_emissions_2050: Option<f64>,
    /// Fraction of the initial non-market stock destroyed by 2100.
    pub stock_loss_2100: Option<f64>,
    pub valuation_2050: Option<f64>,
    pub valuation_2100: Option<f64>,
    pub consumption_2050: Option<f64>,
    pub consumption_2100: Option<f64>,
    pub relative_price_2020: Option<f64>,
    pub fixed_point_iterations: Option<usize>,
    pub fixed_point_status: Option<String>,
    pub converged: bool,
    pub warnings: Vec<String>,
}

pub fn summarize(result: &ScenarioResult) -> ScenarioSummary {
    let e0 = result.params.damages.e0;
    let at = |year: i32| result.period_index(year);
    let econ_at = |year: i32| at(year).map(|t| result.trajectory.periods[t]);
    ScenarioSummary {
        scenario: result.scenario.name().to_string(),
        welfare: result.welfare,
        scc_2020: result.scc_at_year(2020),
        scc_2050: result.scc_at_year(2050),
        scc_2100: result.scc_at_year(2100),
        temperature_2100: econ_at(2100).map(|r| r.climate.t_at),
        peak_temperature: result
            .trajectory
            .periods
            .iter()
            .map(|r| r.climate.t_at)
            .fold(f64::NEG_INFINITY, f64::max),
        net_zero_year: result.net_zero_year,
        industrial_emissions_2050: econ_at(2050).map(|r| r.industrial_emissions),
        stock_loss_2100: econ_at(2100).map(|r| 1.0 - r.economy.nonmarket_stock / e0),
        valuation_2050: at(2050).map(|t| result.valuation[t]),
        valuation_2100: at(2100).map(|t| result.valuation[t]),
        consumption_2050: econ_at(2050).map(|r| r.economy.consumption_total),
        consumption_2100: econ_at(2100).map(|r| r.economy.consumption_total),
        relative_price_2020: at(2020).map(|t| result.report.relative_price[t]),
        fixed_point_iterations: result.fixed_point.as_ref().map(|f| f.iterations),
        fixed_point_status: result.fixed_point.as_ref().map(|f| {
            match f.status {
                FixedPointStatus::Converged => "converged",
                FixedPointStatus::Oscillating => "oscillating",
                FixedPointStatus::IterationCap => "iteration-cap",
            }
            .to_string()
        }),
        converged: result.converged,
        warnings: result.warnings.clone(),
    }
}

/// Per-period CSV for one scenario. Quantities undefined in the final
/// period (growth-rate decomposition, social cost of carbon) are left empty.
pub fn trajectory_csv(result: &ScenarioResult) -> String {
    let mut out = String::from("year,mu,s,T_at,M_industrial,C_total,E_stock,f_t,relative_price,RPE,SCC\n");
    for (t, rec) in result.trajectory.periods.iter().enumerate() {
        let rpe = result.report.rpe.total.get(t).map(|v| format!("{v:.6}")).unwrap_or_default();
        let scc = result.scc.get(t).map(|v| format!("{v:.6}")).unwrap_or_default();
        out.push_str(&format!(
            "{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{},{}\n",
            rec.year,
            result.controls.mu[t],
            result.controls.s[t],
            rec.climate.t_at,
            rec.industrial_emissions,
            rec.economy.consumption_total,
            rec.economy.nonmarket_stock,
            rec.weight,
            result.report.relative_price[t],
            rpe,
            scc,
        ));
    }
    out
}

pub fn summary_json(summary: &ScenarioSummary) -> Result<String> {
    let mut s = serde_json::to_string_pretty(summary)
        .map_err(|e| Error::Numerical(format!("summary serialization failed: {e}")))?;
    s.push('\n');
    Ok(s)
}

/// One sweep axis: a parameter key understood by
/// `ModelParams::override_value` plus its values and display labels.
#[derive(Debug, Clone)]
pub struct SweepAxis {
    pub key: String,
    pub values: Vec<f64>,
    pub labels: Vec<String>,
}

impl SweepAxis {
    pub fn new(key: &str, values: Vec<f64>, labels: Vec<String>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::validation("sweep axis", "axis has no values"));
        }
        if values.len() != labels.len() {
            return Err(Error::validation("sweep axis", "labels must match values"));
        }
        Ok(SweepAxis {
            key: key.to_string(),
            values,
            labels,
        })
    }

    /// Labels values by their shortest round-tripping decimal form,
    /// "inf" for the symbolic infinite value.
    pub fn from_values(key: &str, values: Vec<f64>) -> Result<Self> {
        let labels = values
            .iter()
            .map(|v| if v.is_infinite() { "inf".to_string() } else { format!("{v}") })
            .collect();
        Self::new(key, values, labels)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct SweepCell {
    /// One (key, label) pair per axis identifying the cell.
    pub coords: Vec<(String, String)>,
    pub summary: Option<ScenarioSummary>,
    pub error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct SweepGrid {
    pub axes: Vec<SweepAxis>,
    /// Row-major over the cartesian product of axis values.
    pub cells: Vec<SweepCell>,
}

impl SweepGrid {
    pub fn failed_cells(&self) -> impl Iterator<Item = &SweepCell> {
        self.cells.iter().filter(|c| c.error.is_some())
    }
}

/// Full cartesian sweep; each cell runs the endogenous-preference scenario
/// under the overridden parameters. Cells evaluate in parallel on `jobs`
/// worker threads; aggregation is keyed by cell index, so the output is
/// independent of scheduling.
pub fn run_sweep(
    base: &ModelParams,
    axes: &[SweepAxis],
    opts: &RunOpts,
    jobs: usize,
) -> Result<SweepGrid> {
    if axes.is_empty() {
        return Err(Error::validation("sweep", "at least one axis is required"));
    }
    if jobs == 0 {
        return Err(Error::validation("jobs", "must be at least 1"));
    }

    let mut index_sets: Vec<Vec<usize>> = vec![Vec::new()];
    for axis in axes {
        index_sets = index_sets
            .into_iter()
            .flat_map(|prefix| {
                (0..axis.len()).map(move |i| {
                    let mut next = prefix.clone();
                    next.push(i);
                    next
                })
            })
            .collect();
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Numerical(format!("worker pool construction failed: {e}")))?;

    let cells: Vec<SweepCell> = pool.install(|| {
        index_sets
            .par_iter()
            .map(|indices| {
                let coords: Vec<(String, String)> = axes
                    .iter()
                    .zip(indices)
                    .map(|(axis, &i)| (axis.key.clone(), axis.labels[i].clone()))
                    .collect();
                let mut params = base.clone();
                let mut setup: Result<()> = Ok(());
                for (axis, &i) in axes.iter().zip(indices) {
                    if let Err(e) = params.override_value(&axis.key, axis.values[i]) {
                        setup = Err(e);
                        break;
                    }
                }
                let outcome = setup.and_then(|_| run_scenario(Scenario::RpeEp, &params, opts));
                match outcome {
                    Ok(result) => SweepCell {
                        coords,
                        summary: Some(summarize(&result)),
                        error: None,
                    },
                    Err(e) => SweepCell {
                        coords,
                        summary: None,
                        error: Some(e.to_string()),
                    },
                }
            })
            .collect()
    });

    Ok(SweepGrid {
        axes: axes.to_vec(),
        cells,
    })
}

/// Matrix CSV over a two-axis sweep: first axis down the rows, second across
/// the columns, 2100 social cost of carbon in the cells (empty on failure).
pub fn sweep_matrix_csv(grid: &SweepGrid) -> Result<String> {
    if grid.axes.len() != 2 {
        return Err(Error::validation("sweep", "matrix output requires exactly two axes"));
    }
    let (rows, cols) = (&grid.axes[0], &grid.axes[1]);
    let mut out = String::new();
    out.push_str(&rows.key);
    for label in &cols.labels {
        out.push(',');
        out.push_str(&format!("{}={}", cols.key, label));
    }
    out.push('\n');
    for (i, row_label) in rows.labels.iter().enumerate() {
        out.push_str(row_label);
        for j in 0..cols.len() {
            let cell = &grid.cells[i * cols.len() + j];
            out.push(',');
            if let Some(v) = cell.summary.as_ref().and_then(|s| s.scc_2100) {
                out.push_str(&format!("{v:.6}"));
            }
        }
        out.push('\n');
    }
    Ok(out)
}

/// Long-format CSV with one row per sweep cell and the headline summary
/// columns.
pub fn sweep_cells_csv(grid: &SweepGrid) -> String {
    let mut out = String::new();
    for axis in &grid.axes {
        out.push_str(&axis.key);
        out.push(',');
    }
    out.push_str(
        "scc_2020,scc_2100,temperature_2100,peak_temperature,net_zero_year,fixed_point_iterations,converged,error\n",
    );
    let fmt_opt = |v: Option<f64>| v.map(|x| format!("{x:.6}")).unwrap_or_default();
    for cell in &grid.cells {
        for (_, label) in &cell.coords {
            out.push_str(label);
            out.push(',');
        }
        match &cell.summary {
            Some(s) => {
                out.push_str(&format!(
                    "{},{},{},{:.6},{},{},{},{}\n",
                    fmt_opt(s.scc_2020),
                    fmt_opt(s.scc_2100),
                    fmt_opt(s.temperature_2100),
                    s.peak_temperature,
                    s.net_zero_year.map(|y| y.to_string()).unwrap_or_default(),
                    s.fixed_point_iterations.map(|n| n.to_string()).unwrap_or_default(),
                    s.converged,
                    cell.error.as_deref().unwrap_or(""),
                ));
            }
            None => {
                out.push_str(&format!(",,,,,,,{}\n", cell.error.as_deref().unwrap_or("")));
            }
        }
    }
    out
}

/// One plot-ready series file: a name, a header, and data rows.
#[derive(Debug, Clone)]
pub struct FigurePanel {
    pub name: String,
    pub csv: String,
}

fn panel(name: &str, header: &str, rows: Vec<String>) -> FigurePanel {
    let mut csv = String::from(header);
    csv.push('\n');
    for row in rows {
        csv.push_str(&row);
        csv.push('\n');
    }
    FigurePanel {
        name: name.to_string(),
        csv,
    }
}

fn reporting_periods<'a>(
    result: &'a ScenarioResult,
) -> impl Iterator<Item = (usize, &'a crate::simulate::PeriodRecord)> {
    result
        .trajectory
        .periods
        .iter()
        .enumerate()
        .filter(|(_, r)| r.year <= 2100)
}

/// Temperature, emissions, social-cost, and relative-price-growth series for
/// the policy scenarios, 2015-2100.
pub fn figure2(params: &ModelParams, opts: &RunOpts) -> Result<Vec<FigurePanel>> {
    let mut temperature = Vec::new();
    let mut emissions = Vec::new();
    let mut scc = Vec::new();
    let mut rpe = Vec::new();
    for scenario in [Scenario::Dice, Scenario::Rpe, Scenario::RpeEp] {
        let result = run_scenario(scenario, params, opts)?;
        for (t, rec) in reporting_periods(&result) {
            let name = scenario.name();
            temperature.push(format!("{},{},{:.6}", name, rec.year, rec.climate.t_at));
            emissions.push(format!("{},{},{:.6}", name, rec.year, rec.industrial_emissions));
            if let Some(v) = result.scc.get(t) {
                scc.push(format!("{},{},{:.6}", name, rec.year, v));
            }
            if let Some(v) = result.report.rpe.total.get(t) {
                rpe.push(format!("{},{},{:.6}", name, rec.year, v));
            }
        }
    }
    let header = "scenario,year,value";
    Ok(vec![
        panel("figure2_temperature", header, temperature),
        panel("figure2_emissions", header, emissions),
        panel("figure2_scc", header, scc),
        panel("figure2_rpe", header, rpe),
    ])
}

/// Non-market stock (fraction of its initial value) and monetary damage
/// valuation for the no-policy and policy scenarios, 2015-2100.
pub fn figure3(params: &ModelParams, opts: &RunOpts) -> Result<Vec<FigurePanel>> {
    let mut stock = Vec::new();
    let mut valuation = Vec::new();
    for scenario in [Scenario::BusinessAsUsual, Scenario::Rpe, Scenario::RpeEp] {
        let result = run_scenario(scenario, params, opts)?;
        let e0 = result.params.damages.e0;
        for (t, rec) in reporting_periods(&result) {
            let name = scenario.name();
            stock.push(format!(
                "{},{},{:.6}",
                name,
                rec.year,
                rec.economy.nonmarket_stock / e0
            ));
            valuation.push(format!("{},{},{:.6}", name, rec.year, result.valuation[t]));
        }
    }
    let header = "scenario,year,value";
    Ok(vec![
        panel("figure3_stock", header, stock),
        panel("figure3_valuation", header, valuation),
    ])
}

/// Baseline values of the preference-feedback coefficient swept in the
/// sensitivity figure.
pub const FIGURE4_BETAS: [f64; 6] = [-0.01, 0.0, 0.01, 0.02, 0.03, 0.04];

/// Headline outcomes as functions of the preference-feedback coefficient.
pub fn figure4(params: &ModelParams, opts: &RunOpts, jobs: usize) -> Result<Vec<FigurePanel>> {
    let axis = SweepAxis::from_values("beta_mu", FIGURE4_BETAS.to_vec())?;
    let grid = run_sweep(params, std::slice::from_ref(&axis), opts, jobs)?;
    if let Some(cell) = grid.failed_cells().next() {
        return Err(Error::Numerical(format!(
            "sensitivity cell {:?} failed: {}",
            cell.coords,
            cell.error.as_deref().unwrap_or("unknown")
        )));
    }
    let header = "beta_mu,value";
    let mut scc_2020 = Vec::new();
    let mut scc_2100 = Vec::new();
    let mut t_2100 = Vec::new();
    let mut peak_t = Vec::new();
    for cell in &grid.cells {
        let label = &cell.coords[0].1;
        let s = cell.summary.as_ref().expect("failed cells rejected above");
        if let Some(v) = s.scc_2020 {
            scc_2020.push(format!("{label},{v:.6}"));
        }
        if let Some(v) = s.scc_2100 {
            scc_2100.push(format!("{label},{v:.6}"));
        }
        if let Some(v) = s.temperature_2100 {
            t_2100.push(format!("{label},{v:.6}"));
        }
        peak_t.push(format!("{},{:.6}", label, s.peak_temperature));
    }
    Ok(vec![
        panel("figure4_scc2020", header, scc_2020),
        panel("figure4_scc2100", header, scc_2100),
        panel("figure4_t2100", header, t_2100),
        panel("figure4_peak_temperature", header, peak_t),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulate::simulate;

    fn short_params(extra: &str) -> ModelParams {
        let mut params = ModelParams::baseline().unwrap();
        params.apply_config_text(&format!("horizon = 24\n{extra}")).unwrap();
        params.validate().unwrap();
        params
    }

    #[test]
    fn scenario_names_round_trip() {
        for scenario in Scenario::ALL {
            let name = scenario.to_string();
            assert_eq!(name.parse::<Scenario>().unwrap(), scenario);
        }
        let err = "dice2016".parse::<Scenario>().unwrap_err().to_string();
        assert!(err.contains("unknown scenario"), "{err}");
        assert!(err.contains("rpe-ep"), "error should list valid names: {err}");
    }

    #[test]
    fn net_zero_detection_reads_industrial_emissions() {
        let params = short_params("");
        let model = Model::new(params).unwrap();
        let h = model.horizon();
        let weights = WeightPath::exogenous(0.0, h).unwrap();
        let full = ControlPath { mu: vec![1.0; h], s: vec![0.2; h] };
        let none = ControlPath { mu: vec![0.03; h], s: vec![0.2; h] };
        let t_full = simulate(&model, &full, &weights).unwrap();
        let t_none = simulate(&model, &none, &weights).unwrap();
        assert_eq!(net_zero_year(&t_full), Some(model.year(0)));
        assert_eq!(net_zero_year(&t_none), None);
    }

    #[test]
    fn zero_damages_zero_the_social_cost_of_carbon() {
        // With both damage channels off, a carbon pulse cannot touch any
        // economic quantity, so the social cost of carbon vanishes exactly.
        let params = short_params("psi1 = 0\npsi2 = 0");
        let result = run_scenario(Scenario::RpeEp, &params, &RunOpts::default()).unwrap();
        for (t, &scc) in result.scc.iter().enumerate() {
            assert_eq!(scc, 0.0, "scc at period {t} should be exactly zero");
        }
    }

    #[test]
    fn optimal_scenarios_price_carbon_positively() {
        let params = short_params("");
        let result = run_scenario(Scenario::RpeEp, &params, &RunOpts::default()).unwrap();
        assert_eq!(result.scc.len(), result.trajectory.periods.len() - 1);
        for (t, &scc) in result.scc.iter().enumerate() {
            assert!(scc > 0.0, "scc at period {t} is {scc}");
        }
        // Scarcity makes the carbon price grow through the century.
        let (i20, i21) = (result.period_index(2020).unwrap(), result.period_index(2100).unwrap());
        assert!(result.scc[i21] > result.scc[i20]);
        // The non-market valuation is non-negative and spans the horizon.
        assert_eq!(result.valuation.len(), result.trajectory.periods.len());
        for &v in &result.valuation {
            assert!(v >= 0.0);
        }
    }

    #[test]
    fn summaries_expose_the_headline_years() {
        let params = short_params("");
        let result = run_scenario(Scenario::RpeEp, &params, &RunOpts::default()).unwrap();
        let summary = summarize(&result);
        assert_eq!(summary.scenario, "rpe-ep");
        assert!(summary.converged);
        assert_eq!(summary.scc_2020, result.scc_at_year(2020));
        assert_eq!(summary.scc_2100, result.scc_at_year(2100));
        let t2100 = result.period_index(2100).unwrap();
        assert_eq!(summary.temperature_2100, Some(result.trajectory.periods[t2100].climate.t_at));
        assert!(summary.peak_temperature >= summary.temperature_2100.unwrap());
        assert_eq!(summary.valuation_2100, Some(result.valuation[t2100]));
        assert!(summary.fixed_point_iterations.is_some());
        assert_eq!(summary.fixed_point_status.as_deref(), Some("converged"));
        let json = summary_json(&summary).unwrap();
        let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed["scenario"], "rpe-ep");
        assert!(parsed["welfare"].is_f64());
    }

    #[test]
    fn business_as_usual_pins_abatement_and_skips_net_zero() {
        let params = short_params("");
        let result = run_scenario(Scenario::BusinessAsUsual, &params, &RunOpts::default()).unwrap();
        let mu0 = result.params.economy.mu0;
        for &m in &result.controls.mu {
            assert!((m - mu0).abs() <= 1e-12, "bau abatement should stay pinned at {mu0}");
        }
        assert_eq!(result.net_zero_year, None);
    }

    #[test]
    fn dice_scenario_runs_single_good() {
        let params = short_params("");
        let result = run_scenario(Scenario::Dice, &params, &RunOpts::default()).unwrap();
        assert_eq!(result.params.damages.psi1, result.params.dice_psi1);
        for &w in &result.weights.weights {
            assert_eq!(w, 0.0);
        }
        assert!(result.fixed_point.is_none());
        assert!(result.converged);
    }

    #[test]
    fn trajectory_csv_has_one_row_per_period() {
        let params = short_params("");
        let result = run_scenario(Scenario::Rpe, &params, &RunOpts::default()).unwrap();
        let csv = trajectory_csv(&result);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), result.trajectory.periods.len() + 1);
        assert!(lines[0].starts_with("year,mu,s,"));
        let columns = lines[0].split(',').count();
        for line in &lines[1..] {
            assert_eq!(line.split(',').count(), columns);
        }
        // Final period has no social cost of carbon: trailing field empty.
        assert!(lines.last().unwrap().ends_with(','));
    }

    #[test]
    fn sweep_axis_validation() {
        assert!(SweepAxis::from_values("theta", vec![]).is_err());
        assert!(SweepAxis::new("theta", vec![1.0], vec![]).is_err());
        let axis = SweepAxis::from_values("theta", vec![0.5, f64::INFINITY]).unwrap();
        assert_eq!(axis.labels, vec!["0.5", "inf"]);
    }

    #[test]
    fn sweep_rejects_degenerate_requests() {
        let params = short_params("");
        assert!(run_sweep(&params, &[], &RunOpts::default(), 1).is_err());
        let axis = SweepAxis::from_values("theta", vec![0.5]).unwrap();
        assert!(run_sweep(&params, std::slice::from_ref(&axis), &RunOpts::default(), 0).is_err());
    }

    #[test]
    fn sweep_records_per_cell_failures_without_aborting() {
        let params = short_params("");
        let axis = SweepAxis::from_values("theta", vec![0.5, -1.0]).unwrap();
        let grid = run_sweep(&params, std::slice::from_ref(&axis), &RunOpts::default(), 1).unwrap();
        assert_eq!(grid.cells.len(), 2);
        assert!(grid.cells[0].summary.is_some());
        assert!(grid.cells[1].summary.is_none());
        assert_eq!(grid.failed_cells().count(), 1);
        let csv = sweep_cells_csv(&grid);
        assert!(csv.contains("theta"));
    }

    #[test]
    fn single_cell_sweep_matches_direct_run() {
        let params = short_params("");
        let axis = SweepAxis::from_values("beta_mu", vec![0.02]).unwrap();
        let grid = run_sweep(&params, std::slice::from_ref(&axis), &RunOpts::default(), 1).unwrap();
        let cell = grid.cells[0].summary.as_ref().unwrap();
        let direct = summarize(&run_scenario(Scenario::RpeEp, &params, &RunOpts::default()).unwrap());
        assert_eq!(cell.scc_2100, direct.scc_2100);
        assert_eq!(cell.welfare, direct.welfare);
        assert_eq!(cell.temperature_2100, direct.temperature_2100);
    }

    #[test]
    fn sweep_output_is_independent_of_worker_count() {
        let params = short_params("");
        let axes = vec![
            SweepAxis::from_values("theta", vec![0.5, 1.0]).unwrap(),
            SweepAxis::from_values("beta_mu", vec![0.0, 0.02]).unwrap(),
        ];
        let serial = run_sweep(&params, &axes, &RunOpts::default(), 1).unwrap();
        let parallel = run_sweep(&params, &axes, &RunOpts::default(), 4).unwrap();
        assert_eq!(sweep_matrix_csv(&serial).unwrap(), sweep_matrix_csv(&parallel).unwrap());
        assert_eq!(sweep_cells_csv(&serial), sweep_cells_csv(&parallel));
    }

    #[test]
    fn matrix_csv_requires_two_axes() {
        let params = short_params("");
        let axis = SweepAxis::from_values("beta_mu", vec![0.0]).unwrap();
        let grid = run_sweep(&params, std::slice::from_ref(&axis), &RunOpts::default(), 1).unwrap();
        assert!(sweep_matrix_csv(&grid).is_err());
    }
}

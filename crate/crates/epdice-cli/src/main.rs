//! Command-line front end: solve scenarios, sweep parameters, and emit
//! plot-ready figure series. All artifacts are deterministic functions of the
//! calibration and flags; the manifest's wall-clock field is the only
//! run-dependent output.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use epdice::analysis::{
    figure2, figure3, figure4, run_scenario, run_sweep, summarize, summary_json, sweep_cells_csv,
    sweep_matrix_csv, trajectory_csv, FigurePanel, RunOpts, Scenario, SweepAxis,
};
use epdice::calibration::ModelParams;
use serde::Serialize;

/// Exit status meanings: 0 = success and converged, 1 = invalid input or
/// solver failure, 2 = completed but not converged (or partial sweep failure).
const EXIT_OK: u8 = 0;
const EXIT_INVALID: u8 = 1;
const EXIT_NOT_CONVERGED: u8 = 2;

#[derive(Parser)]
#[command(
    name = "epdice",
    version,
    about = "Climate-economy scenarios with endogenous preferences for non-market goods"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Config file with `key = value` overrides applied on top of the
    /// bundled DICE-2016 calibration (or the file named by EPDICE_CALIBRATION).
    #[arg(long)]
    params: Option<PathBuf>,
    /// Directory the artifacts are written into (created if missing).
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    /// Sup-norm tolerance on the abatement path between fixed-point passes.
    #[arg(long)]
    fp_tol: Option<f64>,
    /// Cap on fixed-point re-optimizations.
    #[arg(long)]
    fp_max_iters: Option<usize>,
    /// Mixing weight in [0,1) on the previous abatement path when
    /// regenerating preference weights.
    #[arg(long)]
    fp_damping: Option<f64>,
    /// Stationarity tolerance of the inner trajectory optimizer.
    #[arg(long)]
    tol: Option<f64>,
    /// Iteration cap of the inner trajectory optimizer.
    #[arg(long)]
    max_iters: Option<usize>,
    /// Atmospheric pulse behind the social cost of carbon, GtCO2.
    #[arg(long)]
    pulse: Option<f64>,
    /// Consumption increment behind the social cost of carbon, trillion $/yr.
    #[arg(long)]
    increment: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one scenario (dice, bau, rpe, rpe-ep) and write its trajectory
    /// CSV, summary JSON, and manifest.
    Run {
        /// Scenario name: dice, bau, rpe, or rpe-ep.
        scenario: String,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Cartesian parameter sweep of the endogenous-preference scenario.
    Sweep {
        /// Axis list such as "theta=0.29,0.5,1,1.3,2,inf beta_mu=-0.01:0.01:0.04";
        /// values are comma lists or inclusive start:step:end ranges.
        #[arg(long)]
        grid: String,
        /// Worker threads; the output is identical for any value.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Emit plot-ready long-format CSV series for the published figures.
    Figures {
        /// One of: figure-2, figure-3, figure-4, all.
        #[arg(long, default_value = "all")]
        scenario_set: String,
        /// Worker threads for the sensitivity sweep panels.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[command(flatten)]
        common: CommonArgs,
    },
}

/// Provenance record written next to every artifact set.
#[derive(Serialize)]
struct RunManifest {
    command: String,
    params_hash: String,
    calibration_version: String,
    outputs: Vec<String>,
    /// Wall-clock seconds; the one field that varies between identical runs.
    wall_clock_seconds: f64,
    converged: BTreeMap<String, bool>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::from(EXIT_OK);
        }
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(EXIT_INVALID);
        }
    };
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INVALID)
        }
    }
}

fn dispatch(cli: Cli) -> Result<u8> {
    let started = Instant::now();
    match cli.command {
        Command::Run { scenario, common } => cmd_run(&scenario, &common, started),
        Command::Sweep { grid, jobs, common } => cmd_sweep(&grid, jobs, &common, started),
        Command::Figures { scenario_set, jobs, common } => {
            cmd_figures(&scenario_set, jobs, &common, started)
        }
    }
}

fn load_params(common: &CommonArgs) -> Result<ModelParams> {
    let mut params = ModelParams::baseline()?;
    if let Some(path) = &common.params {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading params file {}", path.display()))?;
        params.apply_config_text(&text)?;
        params.validate()?;
    }
    Ok(params)
}

fn run_opts(common: &CommonArgs) -> Result<RunOpts> {
    let mut opts = RunOpts::default();
    if let Some(v) = common.fp_tol {
        opts.fixed_point.tolerance = v;
    }
    if let Some(v) = common.fp_max_iters {
        opts.fixed_point.max_iters = v;
    }
    if let Some(v) = common.fp_damping {
        opts.fixed_point.damping = v;
    }
    if let Some(v) = common.tol {
        opts.fixed_point.optimize.tolerance = v;
    }
    if let Some(v) = common.max_iters {
        opts.fixed_point.optimize.max_iters = v;
    }
    if let Some(v) = common.pulse {
        if !(v > 0.0) {
            bail!("--pulse must be positive");
        }
        opts.scc.pulse_gtco2 = v;
    }
    if let Some(v) = common.increment {
        if !(v > 0.0) {
            bail!("--increment must be positive");
        }
        opts.scc.consumption_increment = v;
    }
    Ok(opts)
}

/// Writes one artifact and records its name; manifests list paths relative
/// to their own directory so identical runs compare equal wherever they land.
fn write_artifact(out_dir: &Path, name: &str, contents: &str, outputs: &mut Vec<String>) -> Result<()> {
    let path = out_dir.join(name);
    fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
    outputs.push(name.to_string());
    Ok(())
}

fn write_manifest(
    out_dir: &Path,
    command: String,
    params: &ModelParams,
    mut outputs: Vec<String>,
    converged: BTreeMap<String, bool>,
    started: Instant,
) -> Result<()> {
    let path = out_dir.join("manifest.json");
    outputs.push("manifest.json".to_string());
    let manifest = RunManifest {
        command,
        params_hash: params.hash(),
        calibration_version: params.version.clone(),
        outputs,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
        converged,
    };
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn cmd_run(scenario: &str, common: &CommonArgs, started: Instant) -> Result<u8> {
    let scenario: Scenario = scenario.parse().map_err(|e| anyhow!("{e}"))?;
    let params = load_params(common)?;
    let opts = run_opts(common)?;
    let result = run_scenario(scenario, &params, &opts)?;
    let summary = summarize(&result);

    fs::create_dir_all(&common.out_dir)?;
    let mut outputs = Vec::new();
    write_artifact(
        &common.out_dir,
        &format!("{scenario}_trajectory.csv"),
        &trajectory_csv(&result),
        &mut outputs,
    )?;
    write_artifact(
        &common.out_dir,
        &format!("{scenario}_summary.json"),
        &summary_json(&summary)?,
        &mut outputs,
    )?;
    let converged = BTreeMap::from([(scenario.to_string(), result.converged)]);
    write_manifest(&common.out_dir, format!("run {scenario}"), &params, outputs, converged, started)?;

    for w in &result.warnings {
        eprintln!("warning: {w}");
    }
    println!(
        "{scenario}: welfare {:.6}, scc 2020 {}, warming 2100 {}",
        summary.welfare,
        summary.scc_2020.map(|v| format!("{v:.2} $/tCO2")).unwrap_or_else(|| "n/a".into()),
        summary
            .temperature_2100
            .map(|v| format!("{v:.3} degC"))
            .unwrap_or_else(|| "n/a".into()),
    );
    Ok(if result.converged { EXIT_OK } else { EXIT_NOT_CONVERGED })
}

fn cmd_sweep(grid: &str, jobs: usize, common: &CommonArgs, started: Instant) -> Result<u8> {
    let axes = parse_grid(grid)?;
    let params = load_params(common)?;
    let opts = run_opts(common)?;
    let result = run_sweep(&params, &axes, &opts, jobs)?;

    fs::create_dir_all(&common.out_dir)?;
    let mut outputs = Vec::new();
    write_artifact(&common.out_dir, "sweep_cells.csv", &sweep_cells_csv(&result), &mut outputs)?;
    if axes.len() == 2 {
        write_artifact(
            &common.out_dir,
            "sweep_matrix.csv",
            &sweep_matrix_csv(&result)?,
            &mut outputs,
        )?;
    }
    let cell_name = |coords: &[(String, String)]| {
        coords
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(",")
    };
    let converged: BTreeMap<String, bool> = result
        .cells
        .iter()
        .map(|c| {
            let ok = c.error.is_none() && c.summary.as_ref().is_some_and(|s| s.converged);
            (cell_name(&c.coords), ok)
        })
        .collect();
    write_manifest(&common.out_dir, format!("sweep {grid}"), &params, outputs, converged, started)?;

    let failed: Vec<&epdice::analysis::SweepCell> = result.failed_cells().collect();
    if failed.is_empty() {
        println!("{} cells solved", result.cells.len());
        Ok(EXIT_OK)
    } else {
        for cell in &failed {
            eprintln!(
                "failed cell {}: {}",
                cell_name(&cell.coords),
                cell.error.as_deref().unwrap_or("unknown")
            );
        }
        eprintln!("{} of {} cells failed", failed.len(), result.cells.len());
        Ok(EXIT_NOT_CONVERGED)
    }
}

fn cmd_figures(set: &str, jobs: usize, common: &CommonArgs, started: Instant) -> Result<u8> {
    let params = load_params(common)?;
    let opts = run_opts(common)?;
    let mut panels: Vec<FigurePanel> = Vec::new();
    match set {
        "figure-2" => panels.extend(figure2(&params, &opts)?),
        "figure-3" => panels.extend(figure3(&params, &opts)?),
        "figure-4" => panels.extend(figure4(&params, &opts, jobs)?),
        "all" => {
            panels.extend(figure2(&params, &opts)?);
            panels.extend(figure3(&params, &opts)?);
            panels.extend(figure4(&params, &opts, jobs)?);
        }
        other => bail!("unknown scenario set '{other}'; valid: figure-2, figure-3, figure-4, all"),
    }

    fs::create_dir_all(&common.out_dir)?;
    let mut outputs = Vec::new();
    for panel in &panels {
        write_artifact(&common.out_dir, &format!("{}.csv", panel.name), &panel.csv, &mut outputs)?;
    }
    // The figure builders propagate any non-converged solve as an error, so
    // reaching this point means every underlying scenario converged.
    let converged = BTreeMap::from([(set.to_string(), true)]);
    write_manifest(&common.out_dir, format!("figures {set}"), &params, outputs, converged, started)?;
    println!("{} panel file(s) written", panels.len());
    Ok(EXIT_OK)
}

/// Parses an axis list such as
/// `theta=0.29,0.5,1,1.3,2,inf beta_mu=-0.01:0.01:0.04`.
/// Comma lists are taken verbatim ("inf" allowed); `start:step:end` ranges
/// expand inclusively with exact decimal arithmetic so labels stay clean.
fn parse_grid(spec: &str) -> Result<Vec<SweepAxis>> {
    let mut axes = Vec::new();
    for token in spec.split_whitespace() {
        let (key, values_spec) = token
            .split_once('=')
            .with_context(|| format!("axis '{token}' is not of the form key=values"))?;
        let values = if values_spec.contains(':') {
            expand_range(values_spec)
                .with_context(|| format!("axis '{key}' has a malformed range '{values_spec}'"))?
        } else {
            values_spec
                .split(',')
                .map(parse_value)
                .collect::<Result<Vec<_>>>()
                .with_context(|| format!("axis '{key}' has a malformed value list"))?
        };
        axes.push(SweepAxis::from_values(key, values).map_err(|e| anyhow!("{e}"))?);
    }
    if axes.is_empty() {
        bail!("the grid is empty; expected axes like theta=0.5,1 beta_mu=0:0.01:0.04");
    }
    Ok(axes)
}

fn parse_value(s: &str) -> Result<f64> {
    match s {
        "inf" => Ok(f64::INFINITY),
        _ => s.parse::<f64>().with_context(|| format!("'{s}' is not a number")),
    }
}

/// Inclusive start:step:end expansion in scaled-integer arithmetic: the
/// emitted values are exactly the decimals a comma list would have given.
fn expand_range(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        bail!("expected start:step:end");
    }
    let scale = parts
        .iter()
        .map(|p| decimal_places(p))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .max()
        .unwrap_or(0);
    let factor = 10_i64.pow(scale);
    let to_scaled = |s: &str| -> Result<i64> {
        let v: f64 = s.parse().with_context(|| format!("'{s}' is not a number"))?;
        Ok((v * factor as f64).round() as i64)
    };
    let (start, step, end) = (to_scaled(parts[0])?, to_scaled(parts[1])?, to_scaled(parts[2])?);
    if step == 0 {
        bail!("step must be nonzero");
    }
    if (end - start).signum() != step.signum() && end != start {
        bail!("step direction never reaches the end value");
    }
    let mut values = Vec::new();
    let mut v = start;
    loop {
        values.push(v as f64 / factor as f64);
        v += step;
        if (step > 0 && v > end) || (step < 0 && v < end) {
            break;
        }
    }
    Ok(values)
}

fn decimal_places(s: &str) -> Result<u32> {
    if s.contains(['e', 'E']) {
        bail!("exponent notation is not supported in ranges");
    }
    Ok(s.split_once('.').map_or(0, |(_, frac)| frac.len() as u32))
}

//! Parameter loading, validation, and exogenous driver paths.
//!
//! All calibrated scalars live in a flat `key = value` text format with `#`
//! comments. The bundled baseline (`data/dice2016.conf`) documents the
//! provenance of every entry; a user config supplies overrides for any subset
//! of keys. `EPDICE_CALIBRATION` redirects the baseline to another file.

use crate::error::{Error, Result};

/// Baseline calibration compiled into the binary.
pub const BASELINE_CONF: &str = include_str!("../data/dice2016.conf");

/// Environment variable that redirects the baseline calibration to a file.
pub const CALIBRATION_ENV: &str = "EPDICE_CALIBRATION";

const PHI_COLUMN_SUM_TOL: f64 = 1e-12;

/// Utility and discounting parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct PreferenceParams {
    /// Base weight on non-market goods in the CES aggregator.
    pub alpha: f64,
    /// Elasticity of substitution between market and non-market goods.
    /// `f64::INFINITY` selects the perfect-substitutes (linear) limit.
    pub theta: f64,
    /// Response of the preference weight to the abatement rate:
    /// f_t = alpha + beta_mu * mu_t.
    pub beta_mu: f64,
    /// Elasticity of marginal utility (CRRA curvature on the aggregate).
    pub eta: f64,
    /// Annual pure rate of time preference.
    pub rho: f64,
}

/// Damage coefficients for market output and the non-market stock.
#[derive(Debug, Clone, PartialEq)]
pub struct DamageParams {
    /// Market damage: Omega_t = psi1 * T^2, entering output as 1/(1+Omega).
    pub psi1: f64,
    /// Non-market damage: E_t = e0 / (1 + psi2 * T^2).
    pub psi2: f64,
    /// Initial (undamaged) non-market stock, trillion US$.
    pub e0: f64,
}

/// Production, accumulation, and grid parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct EconomyParams {
    /// Capital elasticity in the Cobb-Douglas production function.
    pub gamma: f64,
    /// Annual capital depreciation rate.
    pub delta: f64,
    /// Initial capital stock, trillion US$.
    pub k0: f64,
    /// Abatement cost exponent (cost fraction = phi1_t * mu^phi2).
    pub phi2: f64,
    /// Upper bound on the abatement rate.
    pub mu_max: f64,
    /// Historical first-period abatement rate (pinned by the optimizer).
    pub mu0: f64,
    /// Years per model period.
    pub period_years: f64,
    /// Number of periods simulated.
    pub horizon: usize,
}

/// Carbon cycle and temperature parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ClimateParams {
    /// Per-period reservoir transfer matrix; rows are destinations
    /// (atmosphere, upper ocean, lower ocean), columns sources. Each column
    /// sums to 1: carbon is conserved up to emission injections.
    pub phi: [[f64; 3]; 3],
    /// Initial reservoir masses, GtC.
    pub l_at0: f64,
    pub l_up0: f64,
    pub l_lo0: f64,
    /// Mass ratio converting emission flows (GtCO2) to reservoir units (GtC).
    pub gtco2_per_gtc: f64,
    /// Forcing of CO2 doubling, W/m^2.
    pub kappa: f64,
    /// Pre-industrial atmospheric carbon, GtC (forcing reference point).
    pub l1750: f64,
    /// Heat-exchange coefficients of the two-box temperature model
    /// (per period). Equilibrium warming at doubled CO2 is kappa/zeta2.
    pub zeta1: f64,
    pub zeta2: f64,
    pub zeta3: f64,
    pub zeta4: f64,
    /// Initial temperature anomalies, degC above 1900.
    pub t_at0: f64,
    pub t_lo0: f64,
}

/// Coefficients of the exogenous driver recursions (population, TFP, carbon
/// intensity, land-use emissions, non-CO2 forcing, backstop price).
#[derive(Debug, Clone, PartialEq)]
pub struct DriverParams {
    pub pop0: f64,
    pub pop_asym: f64,
    pub pop_adj: f64,
    pub tfp0: f64,
    pub tfp_g0: f64,
    pub tfp_decline: f64,
    /// Assumed initial gross output, used only in the sigma0 identity.
    pub gross0: f64,
    /// Initial industrial emissions, GtCO2/yr.
    pub emissions0: f64,
    pub sigma_g0: f64,
    pub sigma_g_decline: f64,
    /// Initial land-use emissions, GtCO2/yr, and their per-period decline.
    pub land0: f64,
    pub land_decline: f64,
    /// Backstop price path: backstop0 * (1 - backstop_decline)^t, US$/tCO2.
    pub backstop0: f64,
    pub backstop_decline: f64,
    /// Exogenous non-CO2 forcing ramp, W/m^2.
    pub fex0: f64,
    pub fex1: f64,
    pub fex_ramp_periods: usize,
}

/// Every calibrated scalar of the model.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub version: String,
    pub base_year: i32,
    pub preferences: PreferenceParams,
    pub damages: DamageParams,
    /// Aggregate damage coefficient of the single-good DICE comparison run.
    pub dice_psi1: f64,
    pub economy: EconomyParams,
    pub climate: ClimateParams,
    pub drivers: DriverParams,
}

/// Exogenous time paths, one entry per period.
#[derive(Debug, Clone, PartialEq)]
pub struct ExogenousPaths {
    /// Population, millions.
    pub population: Vec<f64>,
    /// Total factor productivity.
    pub tfp: Vec<f64>,
    /// Carbon intensity sigma_t, GtCO2 per trillion US$ of gross output
    /// per year.
    pub carbon_intensity: Vec<f64>,
    /// Land-use emissions, GtCO2 per period.
    pub land_emissions: Vec<f64>,
    /// Exogenous non-CO2 forcing, W/m^2.
    pub forcing_exogenous: Vec<f64>,
    /// Abatement cost coefficient phi1_t (fraction of gross output at mu=1).
    pub abatement_unit_cost: Vec<f64>,
}

impl ModelParams {
    /// Baseline calibration: the bundled file, or the file named by
    /// `EPDICE_CALIBRATION` when set.
    pub fn baseline() -> Result<Self> {
        let text = match std::env::var(CALIBRATION_ENV) {
            Ok(path) if !path.is_empty() => std::fs::read_to_string(path)?,
            _ => BASELINE_CONF.to_string(),
        };
        let mut p = Self::seed();
        p.apply_config_text(&text)?;
        p.validate()?;
        Ok(p)
    }

    /// Baseline with overrides from a user config text applied on top.
    pub fn from_config_text(text: &str) -> Result<Self> {
        let mut p = Self::baseline()?;
        p.apply_config_text(text)?;
        p.validate()?;
        Ok(p)
    }

    /// Baseline with overrides from a user config file applied on top.
    pub fn from_config_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_config_text(&text)
    }

    /// Applies `key = value` lines without validating; used internally and by
    /// sweep overrides. Unknown keys are rejected.
    pub fn apply_config_text(&mut self, text: &str) -> Result<()> {
        for (key, value, line) in parse_kv(text)? {
            self.assign(&key, &value, line)?;
        }
        Ok(())
    }

    /// Overrides one numeric key (sweep axes), then revalidates the result.
    pub fn override_value(&mut self, key: &str, value: f64) -> Result<()> {
        let rendered = if value.is_infinite() && value > 0.0 {
            "inf".to_string()
        } else {
            format!("{value:?}")
        };
        self.assign(key, &rendered, 0)?;
        self.validate()
    }

    /// All-NaN/zero seed that `validate` rejects unless every key was set.
    fn seed() -> Self {
        let nan = f64::NAN;
        ModelParams {
            version: String::new(),
            base_year: 0,
            preferences: PreferenceParams {
                alpha: nan,
                theta: nan,
                beta_mu: nan,
                eta: nan,
                rho: nan,
            },
            damages: DamageParams {
                psi1: nan,
                psi2: nan,
                e0: nan,
            },
            dice_psi1: nan,
            economy: EconomyParams {
                gamma: nan,
                delta: nan,
                k0: nan,
                phi2: nan,
                mu_max: nan,
                mu0: nan,
                period_years: nan,
                horizon: 0,
            },
            climate: ClimateParams {
                phi: [[nan; 3]; 3],
                l_at0: nan,
                l_up0: nan,
                l_lo0: nan,
                gtco2_per_gtc: nan,
                kappa: nan,
                l1750: nan,
                zeta1: nan,
                zeta2: nan,
                zeta3: nan,
                zeta4: nan,
                t_at0: nan,
                t_lo0: nan,
            },
            drivers: DriverParams {
                pop0: nan,
                pop_asym: nan,
                pop_adj: nan,
                tfp0: nan,
                tfp_g0: nan,
                tfp_decline: nan,
                gross0: nan,
                emissions0: nan,
                sigma_g0: nan,
                sigma_g_decline: nan,
                land0: nan,
                land_decline: nan,
                backstop0: nan,
                backstop_decline: nan,
                fex0: nan,
                fex1: nan,
                fex_ramp_periods: 0,
            },
        }
    }

    fn assign(&mut self, key: &str, value: &str, line: usize) -> Result<()> {
        let f = |value: &str| parse_f64(key, value, line);
        let u = |value: &str| parse_usize(key, value, line);
        match key {
            "version" => self.version = value.to_string(),
            "base_year" => {
                self.base_year = value.parse().map_err(|_| Error::Config {
                    line,
                    message: format!("`{key}` expects an integer year, got `{value}`"),
                })?
            }
            "alpha" => self.preferences.alpha = f(value)?,
            "theta" => self.preferences.theta = f(value)?,
            "beta_mu" => self.preferences.beta_mu = f(value)?,
            "eta" => self.preferences.eta = f(value)?,
            "rho" => self.preferences.rho = f(value)?,
            "psi1" => self.damages.psi1 = f(value)?,
            "psi2" => self.damages.psi2 = f(value)?,
            "e0" => self.damages.e0 = f(value)?,
            "dice_psi1" => self.dice_psi1 = f(value)?,
            "gamma" => self.economy.gamma = f(value)?,
            "delta" => self.economy.delta = f(value)?,
            "k0" => self.economy.k0 = f(value)?,
            "phi2" => self.economy.phi2 = f(value)?,
            "mu_max" => self.economy.mu_max = f(value)?,
            "mu0" => self.economy.mu0 = f(value)?,
            "period_years" => self.economy.period_years = f(value)?,
            "horizon" => self.economy.horizon = u(value)?,
            "pop0" => self.drivers.pop0 = f(value)?,
            "pop_asym" => self.drivers.pop_asym = f(value)?,
            "pop_adj" => self.drivers.pop_adj = f(value)?,
            "tfp0" => self.drivers.tfp0 = f(value)?,
            "tfp_g0" => self.drivers.tfp_g0 = f(value)?,
            "tfp_decline" => self.drivers.tfp_decline = f(value)?,
            "gross0" => self.drivers.gross0 = f(value)?,
            "emissions0" => self.drivers.emissions0 = f(value)?,
            "sigma_g0" => self.drivers.sigma_g0 = f(value)?,
            "sigma_g_decline" => self.drivers.sigma_g_decline = f(value)?,
            "land0" => self.drivers.land0 = f(value)?,
            "land_decline" => self.drivers.land_decline = f(value)?,
            "backstop0" => self.drivers.backstop0 = f(value)?,
            "backstop_decline" => self.drivers.backstop_decline = f(value)?,
            "fex0" => self.drivers.fex0 = f(value)?,
            "fex1" => self.drivers.fex1 = f(value)?,
            "fex_ramp_periods" => self.drivers.fex_ramp_periods = u(value)?,
            "phi_at_at" => self.climate.phi[0][0] = f(value)?,
            "phi_up_at" => self.climate.phi[0][1] = f(value)?,
            "phi_lo_at" => self.climate.phi[0][2] = f(value)?,
            "phi_at_up" => self.climate.phi[1][0] = f(value)?,
            "phi_up_up" => self.climate.phi[1][1] = f(value)?,
            "phi_lo_up" => self.climate.phi[1][2] = f(value)?,
            "phi_at_lo" => self.climate.phi[2][0] = f(value)?,
            "phi_up_lo" => self.climate.phi[2][1] = f(value)?,
            "phi_lo_lo" => self.climate.phi[2][2] = f(value)?,
            "l_at0" => self.climate.l_at0 = f(value)?,
            "l_up0" => self.climate.l_up0 = f(value)?,
            "l_lo0" => self.climate.l_lo0 = f(value)?,
            "gtco2_per_gtc" => self.climate.gtco2_per_gtc = f(value)?,
            "kappa" => self.climate.kappa = f(value)?,
            "l1750" => self.climate.l1750 = f(value)?,
            "zeta1" => self.climate.zeta1 = f(value)?,
            "zeta2" => self.climate.zeta2 = f(value)?,
            "zeta3" => self.climate.zeta3 = f(value)?,
            "zeta4" => self.climate.zeta4 = f(value)?,
            "t_at0" => self.climate.t_at0 = f(value)?,
            "t_lo0" => self.climate.t_lo0 = f(value)?,
            _ => {
                return Err(Error::Validation {
                    field: key.to_string(),
                    reason: "unknown parameter".to_string(),
                })
            }
        }
        Ok(())
    }

    /// Full-precision canonical rendering; reloading it reproduces `self`
    /// bit for bit.
    pub fn to_config_text(&self) -> String {
        let mut out = String::with_capacity(2048);
        let p = &self.preferences;
        let d = &self.damages;
        let e = &self.economy;
        let c = &self.climate;
        let g = &self.drivers;
        let mut kv = |k: &str, v: f64| {
            if v.is_infinite() && v > 0.0 {
                out.push_str(&format!("{k} = inf\n"));
            } else {
                out.push_str(&format!("{k} = {v:?}\n"));
            }
        };
        kv("alpha", p.alpha);
        kv("theta", p.theta);
        kv("beta_mu", p.beta_mu);
        kv("eta", p.eta);
        kv("rho", p.rho);
        kv("psi1", d.psi1);
        kv("psi2", d.psi2);
        kv("e0", d.e0);
        kv("dice_psi1", self.dice_psi1);
        kv("gamma", e.gamma);
        kv("delta", e.delta);
        kv("k0", e.k0);
        kv("phi2", e.phi2);
        kv("mu_max", e.mu_max);
        kv("mu0", e.mu0);
        kv("period_years", e.period_years);
        kv("pop0", g.pop0);
        kv("pop_asym", g.pop_asym);
        kv("pop_adj", g.pop_adj);
        kv("tfp0", g.tfp0);
        kv("tfp_g0", g.tfp_g0);
        kv("tfp_decline", g.tfp_decline);
        kv("gross0", g.gross0);
        kv("emissions0", g.emissions0);
        kv("sigma_g0", g.sigma_g0);
        kv("sigma_g_decline", g.sigma_g_decline);
        kv("land0", g.land0);
        kv("land_decline", g.land_decline);
        kv("backstop0", g.backstop0);
        kv("backstop_decline", g.backstop_decline);
        kv("fex0", g.fex0);
        kv("fex1", g.fex1);
        kv("phi_at_at", c.phi[0][0]);
        kv("phi_up_at", c.phi[0][1]);
        kv("phi_lo_at", c.phi[0][2]);
        kv("phi_at_up", c.phi[1][0]);
        kv("phi_up_up", c.phi[1][1]);
        kv("phi_lo_up", c.phi[1][2]);
        kv("phi_at_lo", c.phi[2][0]);
        kv("phi_up_lo", c.phi[2][1]);
        kv("phi_lo_lo", c.phi[2][2]);
        kv("l_at0", c.l_at0);
        kv("l_up0", c.l_up0);
        kv("l_lo0", c.l_lo0);
        kv("gtco2_per_gtc", c.gtco2_per_gtc);
        kv("kappa", c.kappa);
        kv("l1750", c.l1750);
        kv("zeta1", c.zeta1);
        kv("zeta2", c.zeta2);
        kv("zeta3", c.zeta3);
        kv("zeta4", c.zeta4);
        kv("t_at0", c.t_at0);
        kv("t_lo0", c.t_lo0);
        out.push_str(&format!("horizon = {}\n", e.horizon));
        out.push_str(&format!("fex_ramp_periods = {}\n", g.fex_ramp_periods));
        out.push_str(&format!("base_year = {}\n", self.base_year));
        out.push_str(&format!("version = {}\n", self.version));
        out
    }

    /// SHA-256 of the canonical rendering, hex-encoded. Stable across
    /// identical configs regardless of key order or comments.
    pub fn hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let digest = Sha256::digest(self.to_config_text().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let p = &self.preferences;
        check(p.alpha.is_finite() && p.alpha > 0.0 && p.alpha < 1.0, "alpha", "must lie in (0, 1)")?;
        check(!p.theta.is_nan() && p.theta > 0.0, "theta", "must be positive (or `inf`)")?;
        check(p.beta_mu.is_finite(), "beta_mu", "must be finite")?;
        check(p.eta.is_finite() && p.eta > 0.0, "eta", "must be positive")?;
        check(p.rho.is_finite() && p.rho >= 0.0, "rho", "must be non-negative")?;

        let d = &self.damages;
        check(d.psi1.is_finite() && d.psi1 >= 0.0, "psi1", "must be non-negative")?;
        check(d.psi2.is_finite() && d.psi2 >= 0.0, "psi2", "must be non-negative")?;
        check(d.e0.is_finite() && d.e0 > 0.0, "e0", "must be positive")?;
        check(self.dice_psi1.is_finite() && self.dice_psi1 >= 0.0, "dice_psi1", "must be non-negative")?;

        let e = &self.economy;
        check(e.gamma.is_finite() && e.gamma > 0.0 && e.gamma < 1.0, "gamma", "must lie in (0, 1)")?;
        check(e.delta.is_finite() && e.delta > 0.0 && e.delta < 1.0, "delta", "must lie in (0, 1)")?;
        check(e.k0.is_finite() && e.k0 > 0.0, "k0", "must be positive")?;
        check(e.phi2.is_finite() && e.phi2 > 1.0, "phi2", "must exceed 1 (convex abatement cost)")?;
        check(e.mu_max.is_finite() && e.mu_max > 0.0, "mu_max", "must be positive")?;
        check(
            e.mu0.is_finite() && e.mu0 >= 0.0 && e.mu0 <= e.mu_max,
            "mu0",
            "must lie in [0, mu_max]",
        )?;
        check(e.period_years.is_finite() && e.period_years > 0.0, "period_years", "must be positive")?;
        check(e.horizon >= 2, "horizon", "must cover at least two periods")?;

        // Weight range over every feasible abatement rate; beta_mu may be
        // negative, so both endpoints matter.
        for mu in [0.0, e.mu_max] {
            let f = p.alpha + p.beta_mu * mu;
            check(
                f > 0.0 && f < 1.0,
                "beta_mu",
                format!("alpha + beta_mu*mu = {f} falls outside (0, 1) at mu = {mu}"),
            )?;
        }

        let c = &self.climate;
        for (i, row) in c.phi.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                check(
                    v.is_finite() && *v >= 0.0,
                    "phi",
                    format!("entry ({i},{j}) must be finite and non-negative"),
                )?;
            }
        }
        for col in 0..3 {
            let sum: f64 = (0..3).map(|row| c.phi[row][col]).sum();
            check(
                (sum - 1.0).abs() <= PHI_COLUMN_SUM_TOL,
                "phi",
                format!("column {col} sums to {sum:.17}, expected 1 (carbon conservation)"),
            )?;
        }
        check(c.l_at0.is_finite() && c.l_at0 > 0.0, "l_at0", "must be positive")?;
        check(c.l_up0.is_finite() && c.l_up0 > 0.0, "l_up0", "must be positive")?;
        check(c.l_lo0.is_finite() && c.l_lo0 > 0.0, "l_lo0", "must be positive")?;
        check(c.gtco2_per_gtc.is_finite() && c.gtco2_per_gtc > 0.0, "gtco2_per_gtc", "must be positive")?;
        check(c.kappa.is_finite() && c.kappa > 0.0, "kappa", "must be positive")?;
        check(c.l1750.is_finite() && c.l1750 > 0.0, "l1750", "must be positive")?;
        check(c.zeta1.is_finite() && c.zeta1 > 0.0, "zeta1", "must be positive")?;
        check(c.zeta2.is_finite() && c.zeta2 > 0.0, "zeta2", "must be positive")?;
        check(c.zeta3.is_finite() && c.zeta3 >= 0.0, "zeta3", "must be non-negative")?;
        check(c.zeta4.is_finite() && c.zeta4 > 0.0 && c.zeta4 < 1.0, "zeta4", "must lie in (0, 1)")?;
        check(c.t_at0.is_finite() && c.t_at0 >= 0.0, "t_at0", "must be non-negative")?;
        check(c.t_lo0.is_finite(), "t_lo0", "must be finite")?;

        let g = &self.drivers;
        check(g.pop0.is_finite() && g.pop0 > 0.0, "pop0", "must be positive")?;
        check(g.pop_asym.is_finite() && g.pop_asym > 0.0, "pop_asym", "must be positive")?;
        check(g.pop_adj.is_finite() && g.pop_adj > 0.0 && g.pop_adj <= 1.0, "pop_adj", "must lie in (0, 1]")?;
        check(g.tfp0.is_finite() && g.tfp0 > 0.0, "tfp0", "must be positive")?;
        check(g.tfp_g0.is_finite() && g.tfp_g0 >= 0.0 && g.tfp_g0 < 1.0, "tfp_g0", "must lie in [0, 1)")?;
        check(g.tfp_decline.is_finite() && g.tfp_decline >= 0.0, "tfp_decline", "must be non-negative")?;
        check(g.gross0.is_finite() && g.gross0 > 0.0, "gross0", "must be positive")?;
        check(g.emissions0.is_finite() && g.emissions0 >= 0.0, "emissions0", "must be non-negative")?;
        check(g.sigma_g0.is_finite(), "sigma_g0", "must be finite")?;
        check(g.sigma_g_decline.is_finite(), "sigma_g_decline", "must be finite")?;
        check(g.land0.is_finite() && g.land0 >= 0.0, "land0", "must be non-negative")?;
        check(
            g.land_decline.is_finite() && g.land_decline >= 0.0 && g.land_decline <= 1.0,
            "land_decline",
            "must lie in [0, 1]",
        )?;
        check(g.backstop0.is_finite() && g.backstop0 >= 0.0, "backstop0", "must be non-negative")?;
        check(
            g.backstop_decline.is_finite() && g.backstop_decline >= 0.0 && g.backstop_decline < 1.0,
            "backstop_decline",
            "must lie in [0, 1)",
        )?;
        check(g.fex0.is_finite(), "fex0", "must be finite")?;
        check(g.fex1.is_finite(), "fex1", "must be finite")?;
        check(g.fex_ramp_periods >= 1, "fex_ramp_periods", "must be at least 1")?;
        check(e.mu0 < 1.0, "mu0", "must be below 1 (sigma0 identity divides by 1 - mu0)")?;
        check(!self.version.is_empty(), "version", "must be set")?;
        check(self.base_year != 0, "base_year", "must be set")?;
        Ok(())
    }
}

fn check(ok: bool, field: &str, reason: impl Into<String>) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Validation {
            field: field.to_string(),
            reason: reason.into(),
        })
    }
}

fn parse_f64(key: &str, value: &str, line: usize) -> Result<f64> {
    let v = value.trim();
    if v.eq_ignore_ascii_case("infinite") {
        return Ok(f64::INFINITY);
    }
    v.parse::<f64>().map_err(|_| Error::Config {
        line,
        message: format!("`{key}` expects a number, got `{v}`"),
    })
}

fn parse_usize(key: &str, value: &str, line: usize) -> Result<usize> {
    value.trim().parse::<usize>().map_err(|_| Error::Config {
        line,
        message: format!("`{key}` expects a non-negative integer, got `{value}`"),
    })
}

/// Parses flat `key = value` text. `#` starts a comment; blank lines are
/// skipped; later duplicates override earlier ones.
fn parse_kv(text: &str) -> Result<Vec<(String, String, usize)>> {
    let mut entries = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let stripped = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let stripped = stripped.trim();
        if stripped.is_empty() {
            continue;
        }
        let Some((key, value)) = stripped.split_once('=') else {
            return Err(Error::Config {
                line,
                message: format!("expected `key = value`, got `{stripped}`"),
            });
        };
        let key = key.trim();
        let value = value.trim();
        if key.is_empty() || value.is_empty() {
            return Err(Error::Config {
                line,
                message: "empty key or value".to_string(),
            });
        }
        entries.push((key.to_string(), value.to_string(), line));
    }
    Ok(entries)
}

/// Generates the exogenous driver paths from the calibrated recursions.
pub fn build_exogenous_paths(params: &ModelParams) -> Result<ExogenousPaths> {
    let h = params.economy.horizon;
    let years = params.economy.period_years;
    let g = &params.drivers;

    let mut population = Vec::with_capacity(h);
    let mut tfp = Vec::with_capacity(h);
    let mut sigma = Vec::with_capacity(h);
    let mut land = Vec::with_capacity(h);
    let mut fex = Vec::with_capacity(h);
    let mut phi1 = Vec::with_capacity(h);

    let mut pop = g.pop0;
    let mut a = g.tfp0;
    let mut sig = g.emissions0 / (g.gross0 * (1.0 - params.economy.mu0));
    let mut sig_growth = g.sigma_g0;
    let ramp = g.fex_ramp_periods as f64;

    for t in 0..h {
        population.push(pop);
        tfp.push(a);
        sigma.push(sig);
        land.push(g.land0 * (1.0 - g.land_decline).powi(t as i32) * years);
        let frac = if t >= g.fex_ramp_periods { 1.0 } else { t as f64 / ramp };
        fex.push(g.fex0 + (g.fex1 - g.fex0) * frac);
        let backstop = g.backstop0 * (1.0 - g.backstop_decline).powi(t as i32);
        // Backstop price in $/tCO2 times GtCO2 per trillion $ gross, rescaled
        // to a fraction of gross output at full abatement.
        phi1.push(backstop * sig / (params.economy.phi2 * 1000.0));

        pop *= (g.pop_asym / pop).powf(g.pop_adj);
        let tfp_growth = g.tfp_g0 * (-g.tfp_decline * years * t as f64).exp();
        a /= 1.0 - tfp_growth;
        sig *= (sig_growth * years).exp();
        sig_growth *= (1.0 + g.sigma_g_decline).powf(years);
    }

    let paths = ExogenousPaths {
        population,
        tfp,
        carbon_intensity: sigma,
        land_emissions: land,
        forcing_exogenous: fex,
        abatement_unit_cost: phi1,
    };
    paths.validate()?;
    Ok(paths)
}

impl ExogenousPaths {
    fn validate(&self) -> Result<()> {
        let all = [
            ("population", &self.population),
            ("tfp", &self.tfp),
            ("carbon_intensity", &self.carbon_intensity),
            ("land_emissions", &self.land_emissions),
            ("forcing_exogenous", &self.forcing_exogenous),
            ("abatement_unit_cost", &self.abatement_unit_cost),
        ];
        for (name, path) in all {
            if path.iter().any(|v| !v.is_finite()) {
                return Err(Error::Numerical(format!("exogenous path `{name}` is not finite")));
            }
        }
        for (name, path) in [
            ("population", &self.population),
            ("tfp", &self.tfp),
            ("carbon_intensity", &self.carbon_intensity),
            ("abatement_unit_cost", &self.abatement_unit_cost),
        ] {
            if path.iter().any(|v| *v <= 0.0) {
                return Err(Error::Numerical(format!("exogenous path `{name}` must stay positive")));
            }
        }
        if self
            .carbon_intensity
            .windows(2)
            .any(|w| w[1] >= w[0])
        {
            return Err(Error::Numerical(
                "carbon intensity must be strictly decreasing".to_string(),
            ));
        }
        Ok(())
    }
}

//! Carbon cycle, radiative forcing, and two-box temperature dynamics.

use crate::calibration::ClimateParams;

/// Climate state at the start of a period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClimateState {
    /// Reservoir carbon masses, GtC.
    pub l_at: f64,
    pub l_up: f64,
    pub l_lo: f64,
    /// Temperature anomalies, degC above 1900.
    pub t_at: f64,
    pub t_lo: f64,
    /// Radiative forcing driving this period's state, W/m^2.
    pub forcing: f64,
}

impl ClimateState {
    /// Initial (base-year) state; forcing is evaluated at the initial
    /// atmospheric stock and the first exogenous forcing entry.
    pub fn initial(params: &ClimateParams, forcing_exogenous: f64) -> Self {
        ClimateState {
            l_at: params.l_at0,
            l_up: params.l_up0,
            l_lo: params.l_lo0,
            t_at: params.t_at0,
            t_lo: params.t_lo0,
            forcing: forcing(params.l_at0, forcing_exogenous, params),
        }
    }
}

/// Advances the three reservoirs one period. Emission arguments are
/// per-period masses in GtCO2, converted to GtC before injection into the
/// atmosphere row. Temperatures and forcing are carried unchanged.
pub fn step_carbon(
    state: &ClimateState,
    industrial_gtco2: f64,
    land_gtco2: f64,
    params: &ClimateParams,
) -> ClimateState {
    let m = &params.phi;
    let inject = (industrial_gtco2 + land_gtco2) / params.gtco2_per_gtc;
    let src = [state.l_at, state.l_up, state.l_lo];
    ClimateState {
        l_at: m[0][0] * src[0] + m[0][1] * src[1] + m[0][2] * src[2] + inject,
        l_up: m[1][0] * src[0] + m[1][1] * src[1] + m[1][2] * src[2],
        l_lo: m[2][0] * src[0] + m[2][1] * src[1] + m[2][2] * src[2],
        ..*state
    }
}

/// Radiative forcing from an atmospheric stock plus exogenous non-CO2
/// forcing: kappa * log2(l_at / l1750) + f_ex.
pub fn forcing(l_at: f64, f_ex: f64, params: &ClimateParams) -> f64 {
    params.kappa * (l_at / params.l1750).log2() + f_ex
}

/// Advances the two temperature boxes one period under forcing `chi`.
/// Reservoirs are carried unchanged; the new state's `forcing` records `chi`.
pub fn step_temperature(state: &ClimateState, chi: f64, params: &ClimateParams) -> ClimateState {
    let (z1, z2, z3, z4) = (params.zeta1, params.zeta2, params.zeta3, params.zeta4);
    ClimateState {
        t_at: (1.0 - z1 * z2 - z1 * z3) * state.t_at + z1 * z3 * state.t_lo + z1 * chi,
        t_lo: (1.0 - z4) * state.t_at + z4 * state.t_lo,
        forcing: chi,
        ..*state
    }
}

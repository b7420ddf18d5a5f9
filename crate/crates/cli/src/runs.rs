// Copyright 2026 open-rabi Contributors
// SPDX-License-Identifier: Apache-2.0

//! Single-point computations behind the `steady`, `rate` and `evolve`
//! commands.

use open_rabi_core::analytic::{bounds, photon_rate_asymptotic, stationary};
use open_rabi_core::evolve::{
    default_horizon, evolve, linear_fit, steady_state, truncation_convergence, EvolveError, Probe,
    LINEARITY_R2_MIN,
};
use open_rabi_core::hilbert::expectation;
use open_rabi_core::liouvillian::assemble;
use open_rabi_core::{AtomOp, FieldOp, ModelKind, ObservableRecord, SystemParams, TruncatedSpace};
use serde::Serialize;

use crate::config::{NMax, RunConfig};
use crate::error::CliError;

/// Below this the photon number is treated as not growing at all.
pub const ZERO_RATE: f64 = 1e-9;

/// Absolute slack when comparing N, S with their lower bounds.
pub const BOUND_SLACK: f64 = 1e-12;

fn kind_name(kind: ModelKind) -> &'static str {
    match kind {
        ModelKind::Rabi => "rabi",
        ModelKind::JaynesCummings => "jaynes_cummings",
    }
}

fn resolve_n_max(cfg: &RunConfig, probe: Probe) -> Result<usize, CliError> {
    match cfg.n_max {
        NMax::Fixed(n) => Ok(n),
        NMax::Auto(_) => {
            let report = truncation_convergence(
                &cfg.params,
                cfg.kind,
                probe,
                &cfg.tolerances.convergence_options(),
            )?;
            log::info!("truncation ladder settled at n_max = {}", report.n_max);
            Ok(report.n_max)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParamColumns {
    pub omega0: f64,
    pub delta_plus: f64,
    pub g: f64,
    pub kappa: f64,
    pub gamma: f64,
    pub gamma_ph: f64,
    pub cavity_gamma_ph: f64,
    pub n_t: f64,
}

impl From<&SystemParams> for ParamColumns {
    fn from(p: &SystemParams) -> Self {
        Self {
            omega0: p.omega0,
            delta_plus: p.delta_plus(),
            g: p.g,
            kappa: p.kappa,
            gamma: p.gamma,
            gamma_ph: p.gamma_ph,
            cavity_gamma_ph: p.cavity_gamma_ph,
            n_t: p.n_thermal,
        }
    }
}

/// Steady state beside the closed-form predictions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SteadyRow {
    pub config_hash: String,
    pub kind: &'static str,
    pub n_max: usize,
    #[serde(flatten)]
    pub params: ParamColumns,
    pub mean_n: f64,
    pub mean_sz: f64,
    /// ⟨n⟩∞ − n_t
    #[serde(rename = "N")]
    pub n_excess: f64,
    /// ⟨σz⟩∞ + 1/(2n_t+1)
    #[serde(rename = "S")]
    pub s_excess: f64,
    pub n_inf_analytic: Option<f64>,
    pub sz_inf_analytic: Option<f64>,
    pub n_lower: Option<f64>,
    pub n_upper: Option<f64>,
    pub s_lower: Option<f64>,
    pub s_upper: Option<f64>,
    pub n_lower_ok: Option<bool>,
    pub s_lower_ok: Option<bool>,
    pub n_upper_ok: Option<bool>,
    pub s_upper_ok: Option<bool>,
    pub tail_pop: f64,
    pub residual: f64,
    pub sigma_min: f64,
}

impl SteadyRow {
    pub fn violates_lower_bound(&self) -> bool {
        self.n_lower_ok == Some(false) || self.s_lower_ok == Some(false)
    }
}

pub fn steady_point(cfg: &RunConfig) -> Result<SteadyRow, CliError> {
    let p = &cfg.params;
    if !p.has_energy_damping() {
        return Err(CliError::Config(
            "steady state needs κ > 0 or γ > 0 (energy damping)".into(),
        ));
    }
    let n_max = resolve_n_max(cfg, Probe::SteadyMeanN)?;
    let space = TruncatedSpace::new(n_max)?;
    let gen = assemble(p, space, cfg.kind)?;
    let ss = steady_state(&gen)?;
    let mean_n = expectation(&ss.rho, &space.field_operator(FieldOp::Number))?.re;
    let mean_sz = expectation(&ss.rho, &space.atom_operator(AtomOp::Z))?.re;
    let n_excess = mean_n - p.n_thermal;
    let s_excess = mean_sz + 1.0 / (2.0 * p.n_thermal + 1.0);
    let st = stationary(p).ok();
    let b = bounds(p).ok();
    Ok(SteadyRow {
        config_hash: cfg.hash(),
        kind: kind_name(cfg.kind),
        n_max,
        params: p.into(),
        mean_n,
        mean_sz,
        n_excess,
        s_excess,
        n_inf_analytic: st.map(|s| s.n_inf),
        sz_inf_analytic: st.map(|s| s.sz_inf),
        n_lower: b.map(|b| b.n_lower),
        n_upper: b.map(|b| b.n_upper),
        s_lower: b.map(|b| b.s_lower),
        s_upper: b.map(|b| b.s_upper),
        n_lower_ok: b.map(|b| n_excess >= b.n_lower - BOUND_SLACK),
        s_lower_ok: b.map(|b| s_excess >= b.s_lower - BOUND_SLACK),
        n_upper_ok: b.map(|b| n_excess <= b.n_upper + BOUND_SLACK),
        s_upper_ok: b.map(|b| s_excess <= b.s_upper + BOUND_SLACK),
        tail_pop: ss.rho.tail_population(2),
        residual: ss.residual,
        sigma_min: ss.sigma_min,
    })
}

/// Asymptotic photon rate from a pure-dephasing simulation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateRow {
    pub config_hash: String,
    pub kind: &'static str,
    pub n_max: usize,
    #[serde(flatten)]
    pub params: ParamColumns,
    pub t_end: f64,
    pub dt_out: f64,
    pub slope: f64,
    pub intercept: f64,
    pub fit_start: f64,
    pub fit_end: f64,
    pub linearity_r2: f64,
    /// RMS deviation of ⟨n⟩ from the fitted line.
    pub residual: f64,
    pub analytic_rate: f64,
    pub ratio: Option<f64>,
    /// ζ averaged over the fit window.
    pub zeta_a: f64,
    /// α averaged over the fit window.
    pub alpha_a: f64,
    pub mean_n_final: f64,
    pub mean_n_error_bound: f64,
    pub max_trace_drift: f64,
    pub max_hermiticity_error: f64,
    pub min_eigenvalue: f64,
    pub max_tail_pop: f64,
}

pub fn rate_horizon(cfg: &RunConfig) -> Result<f64, CliError> {
    match cfg.t_end {
        Some(t) => Ok(t),
        None => default_horizon(&cfg.params).ok_or_else(|| {
            CliError::Config("χ = 0 gives no default horizon; set t_end".into())
        }),
    }
}

pub fn rate_point(cfg: &RunConfig) -> Result<RateRow, CliError> {
    let p = &cfg.params;
    if p.kappa != 0.0 || p.gamma != 0.0 {
        return Err(CliError::Config(format!(
            "rate runs need κ = γ = 0 (pure dephasing), got κ = {}, γ = {}",
            p.kappa, p.gamma
        )));
    }
    let t_end = rate_horizon(cfg)?;
    let n_max = resolve_n_max(cfg, Probe::RateSlope { t_end: Some(t_end), dt_out: cfg.dt_out })?;
    let space = TruncatedSpace::new(n_max)?;
    let gen = assemble(p, space, cfg.kind)?;
    let rho0 = cfg.initial.build(space)?;
    let traj = evolve(&rho0, &gen, t_end, cfg.dt_out, &cfg.tolerances.evolve_options())?;
    let fit = linear_fit(&traj.records, cfg.window_fraction)?;
    if fit.linearity_r2 < LINEARITY_R2_MIN && fit.slope.abs() >= ZERO_RATE {
        return Err(EvolveError::NonlinearTail { estimate: fit }.into());
    }
    let window: Vec<&ObservableRecord> =
        traj.records.iter().filter(|r| r.t >= fit.fit_window[0]).collect();
    let mean = |f: fn(&ObservableRecord) -> f64| {
        window.iter().map(|r| f(r)).sum::<f64>() / window.len() as f64
    };
    let analytic_rate = photon_rate_asymptotic(p);
    Ok(RateRow {
        config_hash: cfg.hash(),
        kind: kind_name(cfg.kind),
        n_max,
        params: p.into(),
        t_end,
        dt_out: cfg.dt_out,
        slope: fit.slope,
        intercept: fit.intercept,
        fit_start: fit.fit_window[0],
        fit_end: fit.fit_window[1],
        linearity_r2: fit.linearity_r2,
        residual: fit.residual_rms,
        analytic_rate,
        ratio: (analytic_rate > 0.0).then(|| fit.slope / analytic_rate),
        zeta_a: mean(|r| r.zeta),
        alpha_a: mean(|r| r.alpha),
        mean_n_final: traj.last().mean_n,
        mean_n_error_bound: traj.mean_n_error_bound,
        max_trace_drift: traj.max_trace_drift(),
        max_hermiticity_error: traj.max_hermiticity_error(),
        min_eigenvalue: traj.min_eigenvalue(),
        max_tail_pop: traj.max_tail_pop(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryRow {
    pub config_hash: String,
    pub n_max: usize,
    #[serde(flatten)]
    pub record: ObservableRecord,
}

/// Full observable trace; `t_end` defaults to the rate horizon.
pub fn trajectory(cfg: &RunConfig) -> Result<Vec<TrajectoryRow>, CliError> {
    let t_end = rate_horizon(cfg)?;
    let n_max = match cfg.n_max {
        NMax::Fixed(n) => n,
        NMax::Auto(_) => {
            return Err(CliError::Config(
                "evolve needs a fixed n_max; the ladder has no probe for raw trajectories".into(),
            ))
        }
    };
    let space = TruncatedSpace::new(n_max)?;
    let gen = assemble(&cfg.params, space, cfg.kind)?;
    let rho0 = cfg.initial.build(space)?;
    let traj = evolve(&rho0, &gen, t_end, cfg.dt_out, &cfg.tolerances.evolve_options())?;
    let hash = cfg.hash();
    Ok(traj
        .records
        .into_iter()
        .map(|record| TrajectoryRow { config_hash: hash.clone(), n_max, record })
        .collect())
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_exponent(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let m = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / m;
    let my = ly.iter().sum::<f64>() / m;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

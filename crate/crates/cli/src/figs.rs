// Copyright 2026 open-rabi Contributors
// SPDX-License-Identifier: Apache-2.0

//! Pure-dephasing sweeps (κ = γ = Γ_ph = 0) around g = 0.02, γ_ph = 0.05,
//! Δ₊ = 2, one panel per varied parameter. Figure 1 reports the asymptotic
//! closure variables ζ_a, α_a; figure 2 the asymptotic photon rate beside
//! its closed form.

use open_rabi_core::SystemParams;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{RunConfig, SweepParam};
use crate::error::CliError;
use crate::runs::{rate_point, RateRow};

pub const BASE_G: f64 = 0.02;
pub const BASE_GAMMA_PH: f64 = 0.05;
pub const BASE_DELTA_PLUS: f64 = 2.0;

pub const G_GRID: [f64; 6] = [0.005, 0.01, 0.02, 0.03, 0.04, 0.05];
pub const GAMMA_PH_GRID: [f64; 6] = [0.01, 0.02, 0.03, 0.05, 0.07, 0.1];
pub const DELTA_PLUS_GRID: [f64; 6] = [1.0, 1.5, 2.0, 2.5, 3.0, 4.0];

pub fn base_params() -> SystemParams {
    SystemParams { g: BASE_G, gamma_ph: BASE_GAMMA_PH, omega0: BASE_DELTA_PLUS - 1.0, ..Default::default() }
}

/// `(panel, point)` pairs in output order.
pub fn grid_points() -> Result<Vec<(SweepParam, SystemParams)>, CliError> {
    let base = base_params();
    let mut points = Vec::new();
    for (param, grid) in [
        (SweepParam::G, &G_GRID),
        (SweepParam::GammaPh, &GAMMA_PH_GRID),
        (SweepParam::DeltaPlus, &DELTA_PLUS_GRID),
    ] {
        for &v in grid.iter() {
            points.push((param, param.apply(&base, v)?));
        }
    }
    Ok(points)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FigPoint {
    pub panel: &'static str,
    #[serde(flatten)]
    pub rate: RateRow,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Fig1Row {
    pub config_hash: String,
    pub panel: &'static str,
    pub g: f64,
    pub gamma_ph: f64,
    pub delta_plus: f64,
    pub n_max: usize,
    pub t_end: f64,
    pub zeta_a: f64,
    pub alpha_a: f64,
    pub linearity_r2: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Fig2Row {
    pub config_hash: String,
    pub panel: &'static str,
    pub g: f64,
    pub gamma_ph: f64,
    pub delta_plus: f64,
    pub n_max: usize,
    pub t_end: f64,
    pub slope: f64,
    pub analytic_rate: f64,
    pub ratio: Option<f64>,
    pub linearity_r2: f64,
    pub residual: f64,
}

impl From<&FigPoint> for Fig1Row {
    fn from(p: &FigPoint) -> Self {
        let r = &p.rate;
        Self {
            config_hash: r.config_hash.clone(),
            panel: p.panel,
            g: r.params.g,
            gamma_ph: r.params.gamma_ph,
            delta_plus: r.params.delta_plus,
            n_max: r.n_max,
            t_end: r.t_end,
            zeta_a: r.zeta_a,
            alpha_a: r.alpha_a,
            linearity_r2: r.linearity_r2,
            residual: r.residual,
        }
    }
}

impl From<&FigPoint> for Fig2Row {
    fn from(p: &FigPoint) -> Self {
        let r = &p.rate;
        Self {
            config_hash: r.config_hash.clone(),
            panel: p.panel,
            g: r.params.g,
            gamma_ph: r.params.gamma_ph,
            delta_plus: r.params.delta_plus,
            n_max: r.n_max,
            t_end: r.t_end,
            slope: r.slope,
            analytic_rate: r.analytic_rate,
            ratio: r.ratio,
            linearity_r2: r.linearity_r2,
            residual: r.residual,
        }
    }
}

/// Runs every grid point with the kind, truncation, horizon and tolerances
/// of `base`. Rows come back in grid order.
pub fn fig_points(base: &RunConfig, pool: &rayon::ThreadPool) -> Result<Vec<FigPoint>, CliError> {
    let points = grid_points()?;
    let results: Vec<Result<FigPoint, CliError>> = pool.install(|| {
        points
            .par_iter()
            .map(|(param, p)| {
                Ok(FigPoint { panel: param.name(), rate: rate_point(&base.with_params(*p))? })
            })
            .collect()
    });
    results.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids_contain_base_point() {
        assert!(G_GRID.contains(&BASE_G));
        assert!(GAMMA_PH_GRID.contains(&BASE_GAMMA_PH));
        assert!(DELTA_PLUS_GRID.contains(&BASE_DELTA_PLUS));
        let pts = grid_points().unwrap();
        assert_eq!(pts.len(), 18);
        assert!(pts.iter().all(|(_, p)| p.kappa == 0.0 && p.gamma == 0.0));
        assert_eq!(pts[14].1.omega0, 1.0);
    }
}

// Copyright 2026 open-rabi Contributors
// SPDX-License-Identifier: Apache-2.0

//! Closed-form predictions valid for small mean photon number.
//!
//! * correlator damping `χ = γ_ph + Γ_ph + κ/2 + γ(n_t + 1/2)`
//! * `Θ = g² / (Δ₊² + χ²)`
//! * pure-dephasing photon creation rate `⟨ṅ⟩ₐ = 2γ_ph g² / (Δ₊² + γ_ph²)`
//! * stationary values `⟨n⟩∞ = n_t + 2Θχ/κ`,
//!   `⟨σz⟩∞ = −1/(2n_t+1) + 4Θχ/(γ(n_t+1/2))`
//! * bounds `Θ ≤ N ≲ 2Θχ/κ` and `4Θ ≤ S ≲ 4Θχ/(γ(n_t+1/2))` with
//!   `N = ⟨n⟩∞ − n_t`, `S = ⟨σz⟩∞ + 1/(2n_t+1)`.

use serde::Serialize;
use thiserror::Error;

use crate::liouvillian::SystemParams;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalyticError {
    #[error("stationary prediction needs κ > 0 and γ > 0 (κ = {kappa}, γ = {gamma})")]
    DivisionByZero { kappa: f64, gamma: f64 },
}

pub fn chi(p: &SystemParams) -> f64 {
    p.gamma_ph + p.cavity_gamma_ph + p.kappa / 2.0 + p.gamma * (p.n_thermal + 0.5)
}

pub fn theta(p: &SystemParams) -> f64 {
    let dp = p.delta_plus();
    let chi = chi(p);
    p.g * p.g / (dp * dp + chi * chi)
}

/// Asymptotic photon creation rate for pure atomic dephasing (κ = γ = 0).
/// Outside that regime the value is still returned, with a warning.
pub fn photon_rate_asymptotic(p: &SystemParams) -> f64 {
    if p.kappa > 0.0 || p.gamma > 0.0 {
        log::warn!(
            "asymptotic photon rate evaluated with damping (κ = {}, γ = {}); only an order-of-magnitude estimate",
            p.kappa,
            p.gamma
        );
    }
    let dp = p.delta_plus();
    2.0 * p.gamma_ph * p.g * p.g / (dp * dp + p.gamma_ph * p.gamma_ph)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Stationary {
    pub n_inf: f64,
    pub sz_inf: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bounds {
    /// N_<
    pub n_lower: f64,
    /// N_>
    pub n_upper: f64,
    /// S_<
    pub s_lower: f64,
    /// S_>
    pub s_upper: f64,
}

fn require_damping(p: &SystemParams) -> Result<(), AnalyticError> {
    if p.kappa > 0.0 && p.gamma > 0.0 {
        Ok(())
    } else {
        Err(AnalyticError::DivisionByZero { kappa: p.kappa, gamma: p.gamma })
    }
}

pub fn stationary(p: &SystemParams) -> Result<Stationary, AnalyticError> {
    require_damping(p)?;
    let b = bounds(p)?;
    let nt = p.n_thermal;
    Ok(Stationary {
        n_inf: nt + b.n_upper,
        sz_inf: -1.0 / (2.0 * nt + 1.0) + b.s_upper,
    })
}

pub fn bounds(p: &SystemParams) -> Result<Bounds, AnalyticError> {
    require_damping(p)?;
    let theta = theta(p);
    let chi = chi(p);
    Ok(Bounds {
        n_lower: theta,
        n_upper: 2.0 * theta * chi / p.kappa,
        s_lower: 4.0 * theta,
        s_upper: 4.0 * theta * chi / (p.gamma * (p.n_thermal + 0.5)),
    })
}

/// All closed-form quantities for one parameter set. Stationary values and
/// bounds are `None` unless both κ and γ are positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnalyticPrediction {
    pub chi: f64,
    pub theta: f64,
    pub ndot_a: f64,
    pub n_inf: Option<f64>,
    pub sz_inf: Option<f64>,
    pub n_lower: Option<f64>,
    pub n_upper: Option<f64>,
    pub s_lower: Option<f64>,
    pub s_upper: Option<f64>,
}

impl AnalyticPrediction {
    pub fn new(p: &SystemParams) -> Self {
        let ndot_a = {
            let dp = p.delta_plus();
            2.0 * p.gamma_ph * p.g * p.g / (dp * dp + p.gamma_ph * p.gamma_ph)
        };
        let st = stationary(p).ok();
        let b = bounds(p).ok();
        Self {
            chi: chi(p),
            theta: theta(p),
            ndot_a,
            n_inf: st.map(|s| s.n_inf),
            sz_inf: st.map(|s| s.sz_inf),
            n_lower: b.map(|b| b.n_lower),
            n_upper: b.map(|b| b.n_upper),
            s_lower: b.map(|b| b.s_lower),
            s_upper: b.map(|b| b.s_upper),
        }
    }
}

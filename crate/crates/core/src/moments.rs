// Copyright 2026 open-rabi Contributors
// SPDX-License-Identifier: Apache-2.0

//! Six-variable moment system for `⟨n⟩`, `⟨σz⟩` and the correlators
//! `⟨pσx⟩, ⟨xσx⟩, ⟨pσy⟩, ⟨xσy⟩`, closed by fixing
//! `ζ = ⟨2x²σz⟩` and `α = ⟨(xp+px)σz⟩` (default `ζ = −1`, `α = 0`, their
//! values in `|g,0⟩`). With `ω = 1`:
//!
//! ```text
//! ṅ        = −√2 g ⟨pσx⟩ − κ(⟨n⟩ − n_t)
//! σ̇z       = 2√2 g ⟨xσy⟩ − (γ/2)[1 + (2n_t+1)⟨σz⟩]
//! d⟨pσx⟩/dt = −⟨xσx⟩ − ω₀⟨pσy⟩ − χ⟨pσx⟩ − √2 g
//! d⟨xσx⟩/dt =  ⟨pσx⟩ − ω₀⟨xσy⟩ − χ⟨xσx⟩
//! d⟨pσy⟩/dt =  ω₀⟨pσx⟩ − ⟨xσy⟩ − χ⟨pσy⟩ − √2 g α
//! d⟨xσy⟩/dt =  ⟨pσy⟩ + ω₀⟨xσx⟩ − χ⟨xσy⟩ − √2 g ζ
//! ```
//!
//! The inversion equation relaxes with the `γ/2` prefactor of the moment
//! hierarchy; the Lindblad generator itself relaxes `⟨σz⟩`
//! at rate `γ(2n_t+1)`. Only the photon-number equation is used for
//! cross-validation against the full dynamics.

use std::ops::ControlFlow;

use faer::linalg::solvers::Solve;
use faer::Mat;
use serde::Serialize;
use thiserror::Error;

use crate::analytic::chi;
use crate::liouvillian::{SystemParams, OMEGA};
use crate::ode::{Dopri5, OdeError};

const SQRT2: f64 = std::f64::consts::SQRT_2;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MomentError {
    #[error("correlator block is undamped (χ = 0); no fixed point")]
    SingularSystem,
    #[error(transparent)]
    Integration(#[from] OdeError),
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct MomentState {
    pub mean_n: f64,
    pub mean_sz: f64,
    pub p_sx: f64,
    pub x_sx: f64,
    pub p_sy: f64,
    pub x_sy: f64,
}

impl MomentState {
    /// Values in `|g,0⟩`.
    pub fn vacuum() -> Self {
        Self { mean_sz: -1.0, ..Self::default() }
    }

    pub fn to_array(&self) -> [f64; 6] {
        [self.mean_n, self.mean_sz, self.p_sx, self.x_sx, self.p_sy, self.x_sy]
    }

    pub fn from_slice(v: &[f64]) -> Self {
        Self {
            mean_n: v[0],
            mean_sz: v[1],
            p_sx: v[2],
            x_sx: v[3],
            p_sy: v[4],
            x_sy: v[5],
        }
    }

    pub fn correlators(&self) -> Correlators {
        Correlators { p_sx: self.p_sx, x_sx: self.x_sx, p_sy: self.p_sy, x_sy: self.x_sy }
    }
}

/// Values substituted for `ζ` and `α`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Closure {
    pub zeta: f64,
    pub alpha: f64,
}

impl Default for Closure {
    fn default() -> Self {
        Self { zeta: -1.0, alpha: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Correlators {
    pub p_sx: f64,
    pub x_sx: f64,
    pub p_sy: f64,
    pub x_sy: f64,
}

pub fn moment_rhs(s: &MomentState, p: &SystemParams, closure: &Closure) -> MomentState {
    let chi = chi(p);
    let w0 = p.omega0;
    let sg = SQRT2 * p.g;
    MomentState {
        mean_n: -sg * s.p_sx - p.kappa * (s.mean_n - p.n_thermal),
        mean_sz: 2.0 * sg * s.x_sy
            - 0.5 * p.gamma * (1.0 + (2.0 * p.n_thermal + 1.0) * s.mean_sz),
        p_sx: -OMEGA * s.x_sx - w0 * s.p_sy - chi * s.p_sx - sg,
        x_sx: OMEGA * s.p_sx - w0 * s.x_sy - chi * s.x_sx,
        p_sy: w0 * s.p_sx - OMEGA * s.x_sy - chi * s.p_sy - sg * closure.alpha,
        x_sy: OMEGA * s.p_sy + w0 * s.x_sx - chi * s.x_sy - sg * closure.zeta,
    }
}

/// Correlator block as `(A, b)` with `d/dt c = A c + b`, ordering
/// `(pσx, xσx, pσy, xσy)`.
fn correlator_system(p: &SystemParams, closure: &Closure) -> ([[f64; 4]; 4], [f64; 4]) {
    let chi = chi(p);
    let w0 = p.omega0;
    let sg = SQRT2 * p.g;
    let a = [
        [-chi, -OMEGA, -w0, 0.0],
        [OMEGA, -chi, 0.0, -w0],
        [w0, 0.0, -chi, -OMEGA],
        [0.0, w0, OMEGA, -chi],
    ];
    let b = [-sg, 0.0, -sg * closure.alpha, -sg * closure.zeta];
    (a, b)
}

/// Stationary correlators of the closed system.
pub fn correlator_fixed_point(
    p: &SystemParams,
    closure: &Closure,
) -> Result<Correlators, MomentError> {
    if !(chi(p) > 0.0) {
        return Err(MomentError::SingularSystem);
    }
    let (a, b) = correlator_system(p, closure);
    let m = Mat::<f64>::from_fn(4, 4, |i, j| a[i][j]);
    let rhs = Mat::<f64>::from_fn(4, 1, |i, _| -b[i]);
    let x = m.partial_piv_lu().solve(&rhs);
    Ok(Correlators { p_sx: x[(0, 0)], x_sx: x[(1, 0)], p_sy: x[(2, 0)], x_sy: x[(3, 0)] })
}

/// Integrates the closed system, returning `(t, state)` at
/// `0, dt_out, 2·dt_out, …, t_end`.
pub fn integrate_moments(
    initial: &MomentState,
    p: &SystemParams,
    closure: &Closure,
    t_end: f64,
    dt_out: f64,
    solver: &Dopri5,
) -> Result<Vec<(f64, MomentState)>, MomentError> {
    let times = output_grid(t_end, dt_out);
    let mut out = Vec::with_capacity(times.len());
    solver.integrate(
        |_, y: &[f64], dy: &mut [f64]| {
            let d = moment_rhs(&MomentState::from_slice(y), p, closure);
            dy.copy_from_slice(&d.to_array());
        },
        0.0,
        &initial.to_array(),
        &times,
        |t, y| {
            out.push((t, MomentState::from_slice(y)));
            ControlFlow::Continue(())
        },
    )?;
    Ok(out)
}

pub(crate) fn output_grid(t_end: f64, dt_out: f64) -> Vec<f64> {
    let count = (t_end / dt_out + 1e-9).floor() as usize;
    let mut times: Vec<f64> = (0..=count).map(|i| i as f64 * dt_out).collect();
    if t_end - times.last().copied().unwrap_or(0.0) > 1e-9 * t_end.max(1.0) {
        times.push(t_end);
    }
    times
}

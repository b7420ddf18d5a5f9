// Copyright 2026 open-rabi Contributors
// SPDX-License-Identifier: Apache-2.0

//! Time evolution, steady states, photon-rate extraction and truncation
//! convergence.

use std::ops::ControlFlow;

use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;
use serde::Serialize;
use thiserror::Error;

use crate::analytic::chi;
use crate::c64;
use crate::hilbert::state::unvectorize;
use crate::hilbert::{
    AtomOp, DensityMatrix, FieldOp, HilbertError, Level, Operator, StateTolerances, TruncatedSpace,
};
use crate::liouvillian::{assemble, LiouvillianError, ModelKind, Superoperator, SystemParams};
use crate::moments::output_grid;
use crate::ode::{Dopri5, OdeError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvolveError {
    #[error("population {tail:e} in the two highest Fock levels at t = {t} exceeds {threshold:e}; increase n_max")]
    TailOverflow { t: f64, tail: f64, threshold: f64 },
    #[error("integrator failed: {0}")]
    ToleranceFailure(#[from] OdeError),
    #[error("state invariant violated at t = {t}: {source}")]
    StateInvariant { t: f64, source: HilbertError },
    #[error("t_end and dt_out must be positive (t_end = {t_end}, dt_out = {dt_out})")]
    BadTimes { t_end: f64, dt_out: f64 },
    #[error("no steady state: Rabi dynamics with dephasing but κ = γ = 0 creates photons without bound")]
    NoSteadyState,
    #[error("generator kernel is degenerate (smallest singular value of bordered system {sigma_min:e})")]
    DegenerateKernel { sigma_min: f64 },
    #[error("steady-state residual {residual:e} exceeds {tolerance:e}")]
    Residual { residual: f64, tolerance: f64 },
    #[error("rate fit window has {records} records; at least 10 are required")]
    WindowTooShort { records: usize },
    #[error("photon number is not yet linear in the fit window (r² = {:.6})", .estimate.linearity_r2)]
    NonlinearTail { estimate: RateEstimate },
    #[error("no correlator damping (χ = 0); give an explicit horizon")]
    NoHorizon,
    #[error("probe did not converge up to n_max = {ceiling}")]
    NoConvergence { ceiling: usize, ladder: Vec<LadderPoint> },
    #[error(transparent)]
    Liouvillian(#[from] LiouvillianError),
    #[error(transparent)]
    Hilbert(#[from] HilbertError),
}

/// Observables sampled along a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ObservableRecord {
    pub t: f64,
    pub mean_n: f64,
    pub mean_sz: f64,
    /// ⟨2x²σz⟩
    pub zeta: f64,
    /// ⟨(xp+px)σz⟩
    pub alpha: f64,
    pub p_sx: f64,
    pub x_sx: f64,
    pub p_sy: f64,
    pub x_sy: f64,
    pub trace: f64,
    /// Population of the two highest Fock levels.
    pub tail_pop: f64,
    pub hermiticity_error: f64,
    pub min_eigenvalue: f64,
}

/// Operators behind every [`ObservableRecord`] column.
#[derive(Debug, Clone)]
pub struct Observables {
    pub number: Operator,
    pub sigma_z: Operator,
    pub zeta: Operator,
    pub alpha: Operator,
    pub p_sx: Operator,
    pub x_sx: Operator,
    pub p_sy: Operator,
    pub x_sy: Operator,
}

impl Observables {
    pub fn new(space: TruncatedSpace) -> Self {
        let x = space.field_operator(FieldOp::X);
        let p = space.field_operator(FieldOp::P);
        let sx = space.atom_operator(AtomOp::X);
        let sy = space.atom_operator(AtomOp::Y);
        let sz = space.atom_operator(AtomOp::Z);
        Self {
            number: space.field_operator(FieldOp::Number),
            zeta: &(&x * &x).scale(2.0) * &sz,
            alpha: &x.anticommutator(&p) * &sz,
            p_sx: &p * &sx,
            x_sx: &x * &sx,
            p_sy: &p * &sy,
            x_sy: &x * &sy,
            sigma_z: sz,
        }
    }

    /// Real part of `Tr(ρ·op)` for column-stacked `vec(ρ)`.
    fn measure(op: &Operator, v: &[c64], n: usize) -> f64 {
        op.matrix()
            .iter()
            .fold(c64::new(0.0, 0.0), |acc, (i, j, o)| acc + o * v[j + i * n])
            .re
    }

    fn record(&self, t: f64, v: &[c64], space: TruncatedSpace) -> Result<ObservableRecord, HilbertError> {
        let n = space.dim_total();
        let rho = DensityMatrix::from_matrix(space, unvectorize(v, n))?;
        Ok(ObservableRecord {
            t,
            mean_n: Self::measure(&self.number, v, n),
            mean_sz: Self::measure(&self.sigma_z, v, n),
            zeta: Self::measure(&self.zeta, v, n),
            alpha: Self::measure(&self.alpha, v, n),
            p_sx: Self::measure(&self.p_sx, v, n),
            x_sx: Self::measure(&self.x_sx, v, n),
            p_sy: Self::measure(&self.p_sy, v, n),
            x_sy: Self::measure(&self.x_sy, v, n),
            trace: rho.trace().re,
            tail_pop: rho.tail_population(2),
            hermiticity_error: rho.hermiticity_error(),
            min_eigenvalue: rho.min_eigenvalue()?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Abort with [`EvolveError::TailOverflow`] above this tail population.
    pub tail_threshold: f64,
    /// Invariants every sampled state must satisfy.
    pub state_tolerances: StateTolerances,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-9,
            atol: 1e-12,
            tail_threshold: 1e-6,
            state_tolerances: StateTolerances {
                hermiticity: 1e-10,
                trace: 1e-8,
                min_eigenvalue: -1e-8,
            },
        }
    }
}

impl EvolveOptions {
    pub fn solver(&self) -> Dopri5 {
        Dopri5::with_tolerances(self.rtol, self.atol)
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub records: Vec<ObservableRecord>,
    pub final_state: DensityMatrix,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    /// Bound on the accumulated integration error in ⟨n⟩ at the final time,
    /// from the summed local error estimates of the diagonal entries.
    pub mean_n_error_bound: f64,
}

impl Trajectory {
    pub fn last(&self) -> &ObservableRecord {
        self.records.last().expect("trajectories contain the t = 0 record")
    }

    pub fn max_trace_drift(&self) -> f64 {
        self.records.iter().map(|r| (r.trace - 1.0).abs()).fold(0.0, f64::max)
    }

    pub fn max_hermiticity_error(&self) -> f64 {
        self.records.iter().map(|r| r.hermiticity_error).fold(0.0, f64::max)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.records.iter().map(|r| r.min_eigenvalue).fold(f64::INFINITY, f64::min)
    }

    pub fn max_tail_pop(&self) -> f64 {
        self.records.iter().map(|r| r.tail_pop).fold(0.0, f64::max)
    }
}

/// Integrates `∂ρ/∂t = L(ρ)` with records at `0, dt_out, …, t_end`.
pub fn evolve(
    rho0: &DensityMatrix,
    gen: &Superoperator,
    t_end: f64,
    dt_out: f64,
    opts: &EvolveOptions,
) -> Result<Trajectory, EvolveError> {
    if !(t_end > 0.0 && dt_out > 0.0) {
        return Err(EvolveError::BadTimes { t_end, dt_out });
    }
    let space = gen.space();
    if rho0.space() != space {
        return Err(HilbertError::DimensionMismatch {
            expected: space.dim_total(),
            found: rho0.space().dim_total(),
        }
        .into());
    }
    rho0.validate(&opts.state_tolerances)
        .map_err(|source| EvolveError::StateInvariant { t: 0.0, source })?;

    let n = space.dim_total();
    let observables = Observables::new(space);
    let times = output_grid(t_end, dt_out);
    let mut records = Vec::with_capacity(times.len());
    let mut failure: Option<EvolveError> = None;
    let mut final_vec = rho0.vectorize();

    let stats = opts.solver().integrate(
        |_, y: &[c64], dy: &mut [c64]| gen.apply_vec_into(y, dy),
        0.0,
        &rho0.vectorize(),
        &times,
        |t, y| {
            let check = || -> Result<ObservableRecord, EvolveError> {
                let rec = observables
                    .record(t, y, space)
                    .map_err(|source| EvolveError::StateInvariant { t, source })?;
                let tol = &opts.state_tolerances;
                let violation = if (rec.trace - 1.0).abs() > tol.trace {
                    Some(HilbertError::TraceNotUnit(rec.trace))
                } else if rec.hermiticity_error > tol.hermiticity {
                    Some(HilbertError::NotHermitian(rec.hermiticity_error))
                } else if rec.min_eigenvalue < tol.min_eigenvalue {
                    Some(HilbertError::NegativeEigenvalue(rec.min_eigenvalue))
                } else {
                    None
                };
                if let Some(source) = violation {
                    return Err(EvolveError::StateInvariant { t, source });
                }
                if rec.tail_pop > opts.tail_threshold {
                    return Err(EvolveError::TailOverflow {
                        t,
                        tail: rec.tail_pop,
                        threshold: opts.tail_threshold,
                    });
                }
                Ok(rec)
            };
            match check() {
                Ok(rec) => {
                    records.push(rec);
                    final_vec.copy_from_slice(y);
                    ControlFlow::Continue(())
                }
                Err(e) => {
                    failure = Some(e);
                    ControlFlow::Break(())
                }
            }
        },
    )?;
    if let Some(e) = failure {
        return Err(e);
    }

    let mean_n_error_bound = (0..n)
        .map(|i| {
            let (_, k) = space.split(i);
            k as f64 * stats.accumulated_error[i + i * n]
        })
        .sum();
    Ok(Trajectory {
        records,
        final_state: DensityMatrix::from_vectorized(space, &final_vec)?,
        accepted_steps: stats.accepted,
        rejected_steps: stats.rejected,
        mean_n_error_bound,
    })
}

/// Result of a direct steady-state solve.
#[derive(Debug, Clone)]
pub struct SteadyState {
    pub rho: DensityMatrix,
    /// max |L(ρ∞)| through the matrix-free path.
    pub residual: f64,
    /// Smallest singular value estimate of the bordered system.
    pub sigma_min: f64,
}

pub const STEADY_RESIDUAL_TOL: f64 = 1e-10;
pub const DEGENERACY_TOL: f64 = 1e-8;

/// Solves `L(ρ) = 0, Tr ρ = 1` by replacing the first row of the vectorised
/// generator with the trace functional.
pub fn steady_state(gen: &Superoperator) -> Result<SteadyState, EvolveError> {
    if let Some((p, kind)) = gen.origin() {
        let dephasing = p.gamma_ph > 0.0 || p.cavity_gamma_ph > 0.0;
        if kind == ModelKind::Rabi && !p.has_energy_damping() && dephasing {
            return Err(EvolveError::NoSteadyState);
        }
    }
    let space = gen.space();
    let n = space.dim_total();
    let big = n * n;
    let mut triplets: Vec<Triplet<usize, usize, c64>> = gen
        .matrix()
        .iter()
        .filter(|&(i, _, _)| i != 0)
        .map(|(i, j, v)| Triplet::new(i, j, v))
        .collect();
    triplets.extend((0..n).map(|i| Triplet::new(0, i + i * n, c64::new(1.0, 0.0))));
    let bordered = SparseColMat::<usize, c64>::try_new_from_triplets(big, big, &triplets)
        .expect("generator entries are unique");
    let scale = gen.matrix().max_abs().max(1.0);

    let lu = bordered
        .sp_lu()
        .map_err(|_| EvolveError::DegenerateKernel { sigma_min: 0.0 })?;
    let sigma_min = smallest_singular_value(&lu, big) / scale;
    if !(sigma_min > DEGENERACY_TOL) {
        return Err(EvolveError::DegenerateKernel { sigma_min });
    }

    let mut rhs = Mat::<c64>::zeros(big, 1);
    rhs[(0, 0)] = c64::new(1.0, 0.0);
    let sol = lu.solve(&rhs);
    let v: Vec<c64> = (0..big).map(|i| sol[(i, 0)]).collect();
    let mut rho = DensityMatrix::from_vectorized(space, &v)?;
    rho.hermitize_and_normalize();

    let residual = gen.apply(rho.matrix()).norm_max();
    if !(residual < STEADY_RESIDUAL_TOL) {
        return Err(EvolveError::Residual { residual, tolerance: STEADY_RESIDUAL_TOL });
    }
    rho.validate(&StateTolerances::default())
        .map_err(|source| EvolveError::StateInvariant { t: f64::INFINITY, source })?;
    Ok(SteadyState { rho, residual, sigma_min })
}

/// Inverse power iteration on `(MᴴM)⁻¹` using the existing LU factors.
fn smallest_singular_value(lu: &faer::sparse::linalg::solvers::Lu<usize, c64>, dim: usize) -> f64 {
    let norm = |m: &Mat<c64>| (0..dim).map(|i| m[(i, 0)].norm_sqr()).sum::<f64>().sqrt();
    let mut v = Mat::<c64>::from_fn(dim, 1, |i, _| {
        c64::new(1.0 + ((i * 7919) % 13) as f64 / 13.0, ((i * 104729) % 7) as f64 / 7.0)
    });
    let nv = norm(&v);
    v = Mat::<c64>::from_fn(dim, 1, |i, _| v[(i, 0)] / nv);
    let mut lambda = 0.0;
    for _ in 0..12 {
        // M⁻ᴴ v = conj(M⁻ᵀ conj(v))
        let conj_v = Mat::<c64>::from_fn(dim, 1, |i, _| v[(i, 0)].conj());
        let w = lu.solve_transpose(&conj_v);
        let w = Mat::<c64>::from_fn(dim, 1, |i, _| w[(i, 0)].conj());
        let u = lu.solve(&w);
        let nu = norm(&u);
        if !nu.is_finite() || nu == 0.0 {
            return 0.0;
        }
        lambda = nu;
        v = Mat::<c64>::from_fn(dim, 1, |i, _| u[(i, 0)] / nu);
    }
    1.0 / lambda.sqrt()
}

/// Least-squares fit of ⟨n⟩ against t over the final part of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateEstimate {
    pub slope: f64,
    pub intercept: f64,
    pub fit_window: [f64; 2],
    pub residual_rms: f64,
    pub linearity_r2: f64,
}

pub const MIN_FIT_RECORDS: usize = 10;
pub const LINEARITY_R2_MIN: f64 = 0.999;

/// Fits ⟨n⟩(t) over the last `window_fraction` of the records.
pub fn asymptotic_rate(
    records: &[ObservableRecord],
    window_fraction: f64,
) -> Result<RateEstimate, EvolveError> {
    let fit = linear_fit(records, window_fraction)?;
    if fit.linearity_r2 < LINEARITY_R2_MIN {
        return Err(EvolveError::NonlinearTail { estimate: fit });
    }
    Ok(fit)
}

/// Same fit as [`asymptotic_rate`] without the linearity requirement.
pub fn linear_fit(
    records: &[ObservableRecord],
    window_fraction: f64,
) -> Result<RateEstimate, EvolveError> {
    let count = ((records.len() as f64) * window_fraction.clamp(0.0, 1.0)).ceil() as usize;
    if count < MIN_FIT_RECORDS {
        return Err(EvolveError::WindowTooShort { records: count });
    }
    let window = &records[records.len() - count..];
    let m = count as f64;
    let t_mean = window.iter().map(|r| r.t).sum::<f64>() / m;
    let n_mean = window.iter().map(|r| r.mean_n).sum::<f64>() / m;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for r in window {
        let dt = r.t - t_mean;
        let dn = r.mean_n - n_mean;
        sxx += dt * dt;
        sxy += dt * dn;
        syy += dn * dn;
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = n_mean - slope * t_mean;
    let ss_res: f64 = window
        .iter()
        .map(|r| {
            let e = r.mean_n - (intercept + slope * r.t);
            e * e
        })
        .sum();
    let linearity_r2 = if syy <= f64::MIN_POSITIVE || ss_res <= 1e-30 * syy.max(1e-300) {
        1.0
    } else {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    };
    Ok(RateEstimate {
        slope,
        intercept,
        fit_window: [window[0].t, window[count - 1].t],
        residual_rms: (ss_res / m).sqrt(),
        linearity_r2,
    })
}

/// `30/χ`, the default horizon for rate extraction.
pub fn default_horizon(params: &SystemParams) -> Option<f64> {
    let chi = chi(params);
    (chi > 0.0).then(|| 30.0 / chi)
}

pub const DEFAULT_WINDOW_FRACTION: f64 = 0.5;

/// Quantity tracked across the truncation ladder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Probe {
    /// ⟨n⟩ of the steady state.
    SteadyMeanN,
    /// Asymptotic slope of ⟨n⟩ from `|g,0⟩`, horizon `30/χ` unless given.
    RateSlope { t_end: Option<f64>, dt_out: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceOptions {
    pub start: usize,
    pub step: usize,
    pub ceiling: usize,
    pub rel_tol: f64,
    pub tail_tol: f64,
    pub evolve: EvolveOptions,
}

impl Default for ConvergenceOptions {
    fn default() -> Self {
        Self {
            start: 4,
            step: 4,
            ceiling: 40,
            rel_tol: 1e-3,
            tail_tol: 1e-10,
            evolve: EvolveOptions { tail_threshold: 1.0, ..EvolveOptions::default() },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LadderPoint {
    pub n_max: usize,
    pub value: f64,
    pub tail_pop: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub n_max: usize,
    pub value: f64,
    pub tail_pop: f64,
    pub ladder: Vec<LadderPoint>,
}

/// Evaluates `probe` at one truncation.
pub fn probe_at(
    params: &SystemParams,
    kind: ModelKind,
    probe: Probe,
    n_max: usize,
    evolve_opts: &EvolveOptions,
) -> Result<LadderPoint, EvolveError> {
    let space = TruncatedSpace::new(n_max)?;
    let gen = assemble(params, space, kind)?;
    match probe {
        Probe::SteadyMeanN => {
            let ss = steady_state(&gen)?;
            let n = crate::hilbert::expectation(&ss.rho, &space.field_operator(FieldOp::Number))?.re;
            Ok(LadderPoint { n_max, value: n, tail_pop: ss.rho.tail_population(2) })
        }
        Probe::RateSlope { t_end, dt_out } => {
            let t_end = match t_end {
                Some(t) => t,
                None => default_horizon(params).ok_or(EvolveError::NoHorizon)?,
            };
            let rho0 = DensityMatrix::basis(space, Level::Ground, 0)?;
            let traj = evolve(&rho0, &gen, t_end, dt_out, evolve_opts)?;
            let fit = linear_fit(&traj.records, DEFAULT_WINDOW_FRACTION)?;
            Ok(LadderPoint { n_max, value: fit.slope, tail_pop: traj.max_tail_pop() })
        }
    }
}

/// Smallest `n_max` on the ladder `start, start+step, …` whose probe changes
/// by less than `rel_tol` at `n_max + step` while its tail population stays
/// below `tail_tol`.
pub fn truncation_convergence(
    params: &SystemParams,
    kind: ModelKind,
    probe: Probe,
    opts: &ConvergenceOptions,
) -> Result<ConvergenceReport, EvolveError> {
    let mut ladder = vec![probe_at(params, kind, probe, opts.start, &opts.evolve)?];
    loop {
        let current = *ladder.last().unwrap();
        let next_n = current.n_max + opts.step;
        if next_n > opts.ceiling {
            return Err(EvolveError::NoConvergence { ceiling: opts.ceiling, ladder });
        }
        let next = probe_at(params, kind, probe, next_n, &opts.evolve)?;
        ladder.push(next);
        let scale = next.value.abs().max(current.value.abs());
        let change = (next.value - current.value).abs();
        let stable = scale == 0.0 || change <= opts.rel_tol * scale;
        if stable && current.tail_pop < opts.tail_tol {
            return Ok(ConvergenceReport {
                n_max: current.n_max,
                value: current.value,
                tail_pop: current.tail_pop,
                ladder,
            });
        }
    }
}

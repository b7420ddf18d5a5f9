// Copyright 2026 open-rabi Contributors
// SPDX-License-Identifier: Apache-2.0

//! Numerics for the open Rabi model: a two-level atom coupled to a single
//! cavity mode, anti-rotating term included, under thermal damping and pure
//! dephasing.
//!
//! The crate is organised bottom-up:
//!
//! * [`hilbert`]: truncated atom ⊗ field space, operators, density matrices.
//! * [`liouvillian`]: Hamiltonian and Lindblad generator, matrix-free and
//!   vectorised.
//! * [`ode`]: adaptive Dormand-Prince integrator.
//! * [`evolve`]: time evolution, steady states, rate extraction,
//!   truncation convergence.
//! * [`analytic`]: closed-form rate, stationary values and bounds.
//! * [`moments`]: the closed six-variable moment system.

pub mod analytic;
pub mod evolve;
pub mod hilbert;
pub mod liouvillian;
pub mod moments;
pub mod ode;

pub use faer::c64;

pub use analytic::AnalyticPrediction;
pub use evolve::{EvolveError, EvolveOptions, ObservableRecord, RateEstimate, SteadyState, Trajectory};
pub use hilbert::{AtomOp, DensityMatrix, FieldOp, Level, Operator, TruncatedSpace};
pub use liouvillian::{ModelKind, Superoperator, SystemParams};
pub use moments::{Closure, MomentState};

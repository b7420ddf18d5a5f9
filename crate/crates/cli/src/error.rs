// Copyright 2026 open-rabi Contributors
// SPDX-License-Identifier: Apache-2.0

use open_rabi_core::evolve::EvolveError;
use open_rabi_core::hilbert::HilbertError;
use open_rabi_core::liouvillian::LiouvillianError;
use thiserror::Error;

pub const EXIT_OTHER: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_CONVERGENCE: i32 = 3;
pub const EXIT_BOUND_VIOLATION: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Evolve(#[from] EvolveError),
    #[error(transparent)]
    Parameters(#[from] LiouvillianError),
    #[error(transparent)]
    State(#[from] HilbertError),
    #[error("{count} row(s) violate a lower bound")]
    BoundViolation { count: usize },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Parameters(_) => EXIT_CONFIG,
            CliError::Evolve(e) => match e {
                EvolveError::NoSteadyState | EvolveError::BadTimes { .. } | EvolveError::NoHorizon => {
                    EXIT_CONFIG
                }
                EvolveError::Liouvillian(_) => EXIT_CONFIG,
                EvolveError::Hilbert(_) => EXIT_OTHER,
                _ => EXIT_CONVERGENCE,
            },
            CliError::BoundViolation { .. } => EXIT_BOUND_VIOLATION,
            _ => EXIT_OTHER,
        }
    }

    /// Follow-up advice printed after the error message.
    pub fn guidance(&self) -> Option<&'static str> {
        match self {
            CliError::Evolve(EvolveError::NoSteadyState) => Some(
                "photon number grows linearly in this regime; use `open-rabi rate` or add κ or γ",
            ),
            CliError::Evolve(EvolveError::DegenerateKernel { .. }) => Some(
                "the generator has several stationary states (e.g. conserved excitations under JC); add energy damping or use `evolve`",
            ),
            CliError::Evolve(EvolveError::TailOverflow { .. }) => {
                Some("raise n_max or set n_max = \"auto\"")
            }
            CliError::Evolve(EvolveError::NonlinearTail { .. }) => {
                Some("transients have not decayed; increase t_end")
            }
            CliError::Evolve(EvolveError::NoConvergence { .. }) => {
                Some("raise tolerances.n_max_ceiling or loosen tolerances.convergence")
            }
            CliError::BoundViolation { .. } => Some("pass --warn-only to report without failing"),
            _ => None,
        }
    }
}

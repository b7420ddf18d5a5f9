// Copyright 2026 open-rabi Contributors
// SPDX-License-Identifier: Apache-2.0

use rayon::prelude::*;
use serde::Serialize;

use crate::config::{RunConfig, SweepMode, SweepSpec};
use crate::error::CliError;
use crate::runs::{rate_point, steady_point, RateRow, SteadyRow};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum SweepRows {
    Steady(Vec<SteadyRow>),
    Rate(Vec<RateRow>),
}

/// Builds the worker pool. `None` uses every available core.
pub fn worker_pool(jobs: Option<usize>) -> Result<rayon::ThreadPool, CliError> {
    let threads = jobs.unwrap_or_else(|| {
        std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
    });
    if threads == 0 {
        return Err(CliError::Config("worker count must be at least 1".into()));
    }
    Ok(rayon::ThreadPoolBuilder::new().num_threads(threads).build()?)
}

/// Evaluates `spec` point by point; the first failing point (in input order)
/// is reported.
pub fn run_sweep(
    base: &RunConfig,
    spec: &SweepSpec,
    pool: &rayon::ThreadPool,
) -> Result<SweepRows, CliError> {
    let configs: Vec<RunConfig> = spec
        .values
        .iter()
        .map(|&v| Ok(base.with_params(spec.param.apply(&base.params, v)?)))
        .collect::<Result<_, CliError>>()?;
    match spec.mode {
        SweepMode::Steady => {
            let rows: Vec<Result<SteadyRow, CliError>> =
                pool.install(|| configs.par_iter().map(steady_point).collect());
            Ok(SweepRows::Steady(rows.into_iter().collect::<Result<_, _>>()?))
        }
        SweepMode::Rate => {
            let rows: Vec<Result<RateRow, CliError>> =
                pool.install(|| configs.par_iter().map(rate_point).collect());
            Ok(SweepRows::Rate(rows.into_iter().collect::<Result<_, _>>()?))
        }
    }
}

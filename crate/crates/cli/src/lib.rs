// Copyright 2026 open-rabi Contributors
// SPDX-License-Identifier: Apache-2.0

//! Harness around `open-rabi-core`: TOML run configuration with `key=value`
//! overrides, single-point runs, parameter sweeps on a worker pool, the two
//! reference tables and the two figure sweeps, written as CSV or JSON.

pub mod config;
pub mod error;
pub mod figs;
pub mod output;
pub mod runs;
pub mod sweep;
pub mod tables;

pub use config::{Format, RunConfig};
pub use error::CliError;
pub use open_rabi_core as core;

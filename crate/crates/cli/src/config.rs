// Copyright 2026 open-rabi Contributors
// SPDX-License-Identifier: Apache-2.0

//! Run configuration: TOML file, `key=value` overrides, validation and a
//! stable hash.

use std::path::{Path, PathBuf};

use open_rabi_core::evolve::{ConvergenceOptions, EvolveOptions};
use open_rabi_core::hilbert::StateTolerances;
use open_rabi_core::{DensityMatrix, Level, ModelKind, SystemParams, TruncatedSpace};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub const DEFAULT_N_MAX: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AutoKeyword {
    Auto,
}

/// A fixed truncation or `"auto"` for the convergence ladder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NMax {
    Fixed(usize),
    Auto(AutoKeyword),
}

impl Default for NMax {
    fn default() -> Self {
        NMax::Fixed(DEFAULT_N_MAX)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "state", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialState {
    /// |g,0⟩
    #[default]
    Ground,
    /// |e,0⟩
    Excited,
    /// Thermal field ⊗ atomic populations.
    Thermal {
        n_thermal: f64,
        #[serde(default)]
        excited_population: f64,
    },
    /// |level, k⟩
    Fock { level: Level, k: usize },
}

impl InitialState {
    pub fn build(&self, space: TruncatedSpace) -> Result<DensityMatrix, CliError> {
        let rho = match *self {
            InitialState::Ground => DensityMatrix::basis(space, Level::Ground, 0)?,
            InitialState::Excited => DensityMatrix::basis(space, Level::Excited, 0)?,
            InitialState::Thermal { n_thermal, excited_population } => {
                if !(n_thermal >= 0.0 && (0.0..=1.0).contains(&excited_population)) {
                    return Err(CliError::Config(format!(
                        "thermal initial state needs n_thermal ≥ 0 and excited_population in [0, 1], got {n_thermal}, {excited_population}"
                    )));
                }
                DensityMatrix::product_thermal(space, excited_population, n_thermal)
            }
            InitialState::Fock { level, k } => DensityMatrix::basis(space, level, k)?,
        };
        Ok(rho)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    pub tail_threshold: f64,
    pub trace: f64,
    pub hermiticity: f64,
    pub min_eigenvalue: f64,
    /// Relative probe change accepted by the truncation ladder.
    pub convergence: f64,
    pub convergence_tail: f64,
    pub n_max_ceiling: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        let e = EvolveOptions::default();
        let c = ConvergenceOptions::default();
        Self {
            rtol: e.rtol,
            atol: e.atol,
            tail_threshold: e.tail_threshold,
            trace: e.state_tolerances.trace,
            hermiticity: e.state_tolerances.hermiticity,
            min_eigenvalue: e.state_tolerances.min_eigenvalue,
            convergence: c.rel_tol,
            convergence_tail: c.tail_tol,
            n_max_ceiling: c.ceiling,
        }
    }
}

impl Tolerances {
    pub fn evolve_options(&self) -> EvolveOptions {
        EvolveOptions {
            rtol: self.rtol,
            atol: self.atol,
            tail_threshold: self.tail_threshold,
            state_tolerances: StateTolerances {
                hermiticity: self.hermiticity,
                trace: self.trace,
                min_eigenvalue: self.min_eigenvalue,
            },
        }
    }

    pub fn convergence_options(&self) -> ConvergenceOptions {
        ConvergenceOptions {
            rel_tol: self.convergence,
            tail_tol: self.convergence_tail,
            ceiling: self.n_max_ceiling,
            evolve: EvolveOptions { tail_threshold: 1.0, ..self.evolve_options() },
            ..ConvergenceOptions::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    /// Standard output when absent.
    pub path: Option<PathBuf>,
    pub format: Format,
}

/// Parameters a sweep may vary. `delta_plus` sets `ω₀ = Δ₊ − 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    G,
    GammaPh,
    DeltaPlus,
    Omega0,
    Kappa,
    Gamma,
    CavityGammaPh,
    NT,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::G => "g",
            SweepParam::GammaPh => "gamma_ph",
            SweepParam::DeltaPlus => "delta_plus",
            SweepParam::Omega0 => "omega0",
            SweepParam::Kappa => "kappa",
            SweepParam::Gamma => "gamma",
            SweepParam::CavityGammaPh => "cavity_gamma_ph",
            SweepParam::NT => "n_t",
        }
    }

    pub fn apply(self, p: &SystemParams, value: f64) -> Result<SystemParams, CliError> {
        let mut q = *p;
        match self {
            SweepParam::G => q.g = value,
            SweepParam::GammaPh => q.gamma_ph = value,
            SweepParam::DeltaPlus => q = q.with_delta_plus(value)?,
            SweepParam::Omega0 => q.omega0 = value,
            SweepParam::Kappa => q.kappa = value,
            SweepParam::Gamma => q.gamma = value,
            SweepParam::CavityGammaPh => q.cavity_gamma_ph = value,
            SweepParam::NT => q.n_thermal = value,
        }
        q.validate()?;
        Ok(q)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SweepMode {
    #[default]
    Steady,
    Rate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub values: Vec<f64>,
    #[serde(default)]
    pub mode: SweepMode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub kind: ModelKind,
    pub n_max: NMax,
    pub params: SystemParams,
    pub initial: InitialState,
    /// Rate runs default to `30/χ`.
    pub t_end: Option<f64>,
    pub dt_out: f64,
    pub window_fraction: f64,
    pub tolerances: Tolerances,
    /// Report lower-bound violations without failing.
    pub warn_only: bool,
    pub output: OutputConfig,
    pub sweep: Option<SweepSpec>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            kind: ModelKind::Rabi,
            n_max: NMax::default(),
            params: SystemParams::default(),
            initial: InitialState::Ground,
            t_end: None,
            dt_out: 1.0,
            window_fraction: 0.5,
            tolerances: Tolerances::default(),
            warn_only: false,
            output: OutputConfig::default(),
            sweep: None,
        }
    }
}

impl RunConfig {
    /// Parses TOML text, applies `key=value` overrides and validates.
    pub fn from_toml_with_overrides(text: &str, overrides: &[String]) -> Result<Self, CliError> {
        let mut table: toml::Table =
            toml::from_str(text).map_err(|e| CliError::Config(format!("invalid config: {e}")))?;
        for item in overrides {
            apply_override(&mut table, item)?;
        }
        let config: RunConfig = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| CliError::Config(format!("invalid config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self, CliError> {
        let text = match path {
            Some(p) => std::fs::read_to_string(p)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", p.display())))?,
            None => String::new(),
        };
        Self::from_toml_with_overrides(&text, overrides)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.params.validate()?;
        let bad = |msg: String| Err(CliError::Config(msg));
        if let NMax::Fixed(0) = self.n_max {
            return bad("n_max must be at least 1".into());
        }
        if let Some(t) = self.t_end {
            if !(t > 0.0 && t.is_finite()) {
                return bad(format!("t_end must be positive, got {t}"));
            }
        }
        if !(self.dt_out > 0.0 && self.dt_out.is_finite()) {
            return bad(format!("dt_out must be positive, got {}", self.dt_out));
        }
        if !(self.window_fraction > 0.0 && self.window_fraction <= 1.0) {
            return bad(format!("window_fraction must be in (0, 1], got {}", self.window_fraction));
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("rtol", t.rtol),
            ("atol", t.atol),
            ("tail_threshold", t.tail_threshold),
            ("trace", t.trace),
            ("hermiticity", t.hermiticity),
            ("convergence", t.convergence),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("tolerances.{name} must be positive, got {v}"));
            }
        }
        if !(t.min_eigenvalue <= 0.0) {
            return bad(format!("tolerances.min_eigenvalue must be ≤ 0, got {}", t.min_eigenvalue));
        }
        if let Some(s) = &self.sweep {
            if s.values.is_empty() {
                return bad("sweep.values is empty".into());
            }
        }
        Ok(())
    }

    /// First 16 hex digits of the SHA-256 of the canonical JSON form. The
    /// output section does not take part.
    pub fn hash(&self) -> String {
        let physics = Self { output: OutputConfig::default(), ..self.clone() };
        let canonical = serde_json::to_vec(&physics).expect("config serialises");
        hex::encode(&Sha256::digest(&canonical)[..8])
    }

    pub fn with_params(&self, params: SystemParams) -> Self {
        Self { params, ..self.clone() }
    }
}

/// Applies `a.b.c=value`; the value is read as a TOML literal, falling back
/// to a bare string.
pub fn apply_override(table: &mut toml::Table, item: &str) -> Result<(), CliError> {
    let (key, raw) = item
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("override `{item}` is not key=value")))?;
    let path: Vec<&str> = key.trim().split('.').collect();
    if path.iter().any(|p| p.is_empty()) {
        return Err(CliError::Config(format!("override `{item}` has an empty key segment")));
    }
    let raw = raw.trim();
    let value = toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));

    let (last, parents) = path.split_last().unwrap();
    let mut cursor = table;
    for segment in parents {
        let entry = cursor
            .entry(segment.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cursor = entry.as_table_mut().ok_or_else(|| {
            CliError::Config(format!("override `{item}`: `{segment}` is not a table"))
        })?;
    }
    cursor.insert(last.to_string(), value);
    Ok(())
}

// Copyright 2026 open-rabi Contributors
// SPDX-License-Identifier: Apache-2.0

//! Rabi / Jaynes-Cummings Hamiltonian and the Lindblad generator
//!
//! ```text
//! ∂ρ/∂t = −i[H, ρ] + γ(n_t+1) D[σ₋]ρ + γ n_t D[σ₊]ρ + κ(n_t+1) D[a]ρ + κ n_t D[a†]ρ
//!         + (γ_ph/2) D[σz]ρ + (Γ_ph/2) D[n]ρ
//! D[L]ρ = LρL† − ½(L†Lρ + ρL†L)
//! ```
//!
//! Frequencies are in units of the cavity frequency, so `ω = 1`.
//!
//! A [`Superoperator`] carries two independent representations: a
//! matrix-free action on `ρ` built from the effective non-Hermitian
//! Hamiltonian `K = H − (i/2) Σ r L†L`, and the explicit column-stacked
//! matrix assembled term by term from Kronecker products,
//! `vec(AρB) = (Bᵀ ⊗ A) vec(ρ)`.

use faer::Mat;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::c64;
use crate::hilbert::state::{unvectorize, vectorize};
use crate::hilbert::{AtomOp, CsrMatrix, FieldOp, Operator, TruncatedSpace};

/// Cavity frequency; every other rate and frequency is measured against it.
pub const OMEGA: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LiouvillianError {
    #[error("parameter `{name}` must be finite and non-negative, got {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("dissipation rate must be non-negative, got {0}")]
    NegativeRate(f64),
    #[error("Δ₊ = {0} must be finite and non-negative")]
    InvalidDeltaPlus(f64),
    #[error("operators belong to different truncated spaces")]
    SpaceMismatch,
}

/// Physical parameters in units of `ω = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SystemParams {
    /// Atomic transition frequency ω₀. Values down to `−ω` (Δ₊ = 0) are
    /// accepted so that every Δ₊ ≥ 0 is reachable with `ω = 1`.
    pub omega0: f64,
    /// Atom-field coupling.
    pub g: f64,
    /// Cavity relaxation rate.
    pub kappa: f64,
    /// Atomic relaxation rate.
    pub gamma: f64,
    /// Atomic pure dephasing rate.
    pub gamma_ph: f64,
    /// Cavity pure dephasing rate Γ_ph.
    pub cavity_gamma_ph: f64,
    /// Thermal occupation of both reservoirs.
    #[serde(rename = "n_t")]
    pub n_thermal: f64,
}

impl Default for SystemParams {
    fn default() -> Self {
        Self {
            omega0: OMEGA,
            g: 0.0,
            kappa: 0.0,
            gamma: 0.0,
            gamma_ph: 0.0,
            cavity_gamma_ph: 0.0,
            n_thermal: 0.0,
        }
    }
}

impl SystemParams {
    pub fn omega(&self) -> f64 {
        OMEGA
    }

    /// Δ = ω₀ − ω
    pub fn delta(&self) -> f64 {
        self.omega0 - OMEGA
    }

    /// Δ₊ = ω + ω₀
    pub fn delta_plus(&self) -> f64 {
        OMEGA + self.omega0
    }

    /// Sets ω₀ = Δ₊ − ω.
    pub fn with_delta_plus(mut self, delta_plus: f64) -> Result<Self, LiouvillianError> {
        if !(delta_plus.is_finite() && delta_plus >= 0.0) {
            return Err(LiouvillianError::InvalidDeltaPlus(delta_plus));
        }
        self.omega0 = delta_plus - OMEGA;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), LiouvillianError> {
        if !(self.omega0.is_finite() && self.delta_plus() >= 0.0) {
            return Err(LiouvillianError::InvalidDeltaPlus(self.delta_plus()));
        }
        let fields = [
            ("g", self.g),
            ("kappa", self.kappa),
            ("gamma", self.gamma),
            ("gamma_ph", self.gamma_ph),
            ("cavity_gamma_ph", self.cavity_gamma_ph),
            ("n_t", self.n_thermal),
        ];
        for (name, value) in fields {
            if !value.is_finite() || value < 0.0 {
                return Err(LiouvillianError::InvalidParameter { name, value });
            }
        }
        Ok(())
    }

    /// κ > 0 or γ > 0.
    pub fn has_energy_damping(&self) -> bool {
        self.kappa > 0.0 || self.gamma > 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    /// Full Rabi Hamiltonian, anti-rotating term included.
    #[default]
    #[serde(alias = "rh")]
    Rabi,
    /// Rotating-wave approximation.
    #[serde(alias = "jc", alias = "jch")]
    JaynesCummings,
}

/// `H = ω n + (ω₀/2) σz + g(aσ₊ + a†σ₋) [+ g(a†σ₊ + aσ₋)]`, the last bracket
/// only for [`ModelKind::Rabi`], where the sum equals `ω n + (ω₀/2) σz + √2 g x σx`.
pub fn hamiltonian(params: &SystemParams, space: TruncatedSpace, kind: ModelKind) -> Operator {
    let n = space.field_operator(FieldOp::Number);
    let sz = space.atom_operator(AtomOp::Z);
    let a = space.field_operator(FieldOp::Annihilate);
    let ad = space.field_operator(FieldOp::Create);
    let sp = space.atom_operator(AtomOp::Raise);
    let sm = space.atom_operator(AtomOp::Lower);

    let mut h = &n.scale(OMEGA) + &sz.scale(params.omega0 / 2.0);
    let rotating = &(&a * &sp) + &(&ad * &sm);
    h = &h + &rotating.scale(params.g);
    if kind == ModelKind::Rabi {
        let counter = &(&ad * &sp) + &(&a * &sm);
        h = &h + &counter.scale(params.g);
    }
    h
}

#[derive(Debug, Clone)]
struct Channel {
    jump: CsrMatrix,
    rate: f64,
}

/// Linear map on density matrices with matrix-free and vectorised forms.
#[derive(Debug, Clone)]
pub struct Superoperator {
    space: TruncatedSpace,
    /// K = H − (i/2) Σ r L†L
    effective: CsrMatrix,
    channels: Vec<Channel>,
    /// Column-stacked generator, `dim² × dim²`.
    matrix: CsrMatrix,
    origin: Option<(SystemParams, ModelKind)>,
}

impl Superoperator {
    pub fn zero(space: TruncatedSpace) -> Self {
        let n = space.dim_total();
        Self {
            space,
            effective: CsrMatrix::zeros(n, n),
            channels: Vec::new(),
            matrix: CsrMatrix::zeros(n * n, n * n),
            origin: None,
        }
    }

    /// `ρ ↦ −i[H, ρ]`
    pub fn unitary(hamiltonian: &Operator) -> Self {
        let space = hamiltonian.space();
        let n = space.dim_total();
        let h = hamiltonian.matrix();
        let id = CsrMatrix::identity(n);
        let minus_i = c64::new(0.0, -1.0);
        let matrix = id.kron(h).sub(&h.transpose().kron(&id)).scale(minus_i);
        Self {
            space,
            effective: h.clone(),
            channels: Vec::new(),
            matrix,
            origin: None,
        }
    }

    pub fn space(&self) -> TruncatedSpace {
        self.space
    }

    /// Parameters and model this generator was assembled from, if any.
    pub fn origin(&self) -> Option<(SystemParams, ModelKind)> {
        self.origin
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.space.dim_total()
    }

    pub fn add(&self, other: &Self) -> Result<Self, LiouvillianError> {
        if self.space != other.space {
            return Err(LiouvillianError::SpaceMismatch);
        }
        let mut channels = self.channels.clone();
        channels.extend(other.channels.iter().cloned());
        Ok(Self {
            space: self.space,
            effective: self.effective.add(&other.effective),
            channels,
            matrix: self.matrix.add(&other.matrix),
            origin: None,
        })
    }

    /// Matrix-free action on a column-stacked `vec(ρ)`; writes into `out`.
    pub fn apply_vec_into(&self, rho: &[c64], out: &mut [c64]) {
        let n = self.dim();
        assert_eq!(rho.len(), n * n);
        assert_eq!(out.len(), n * n);
        let minus_i = c64::new(0.0, -1.0);
        let zero = c64::new(0.0, 0.0);
        out.iter_mut().for_each(|v| *v = zero);

        // −i K ρ
        for j in 0..n {
            let col = &rho[j * n..(j + 1) * n];
            let dst = &mut out[j * n..(j + 1) * n];
            for (i, d) in dst.iter_mut().enumerate() {
                let mut s = zero;
                for (k, v) in self.effective.row(i) {
                    s += v * col[k];
                }
                *d += minus_i * s;
            }
        }
        // +i ρ K†, (ρK†)[:, j] = Σ_k ρ[:, k] conj(K[j, k])
        let plus_i = c64::new(0.0, 1.0);
        for j in 0..n {
            for (k, v) in self.effective.row(j) {
                let w = plus_i * v.conj();
                for i in 0..n {
                    out[i + j * n] += rho[i + k * n] * w;
                }
            }
        }
        // Σ r L ρ L†
        let mut scratch = vec![zero; n * n];
        for ch in &self.channels {
            for j in 0..n {
                for i in 0..n {
                    let mut s = zero;
                    for (k, v) in ch.jump.row(i) {
                        s += v * rho[k + j * n];
                    }
                    scratch[i + j * n] = s;
                }
            }
            for j in 0..n {
                for (k, v) in ch.jump.row(j) {
                    let w = v.conj() * ch.rate;
                    for i in 0..n {
                        out[i + j * n] += scratch[i + k * n] * w;
                    }
                }
            }
        }
    }

    /// Matrix-free action `ρ ↦ L(ρ)`.
    pub fn apply(&self, rho: &Mat<c64>) -> Mat<c64> {
        let n = self.dim();
        let v = vectorize(rho);
        let mut out = vec![c64::new(0.0, 0.0); n * n];
        self.apply_vec_into(&v, &mut out);
        unvectorize(&out, n)
    }

    /// Explicit-matrix action on `vec(ρ)`.
    pub fn apply_matrix(&self, rho: &Mat<c64>) -> Mat<c64> {
        let n = self.dim();
        let v = vectorize(rho);
        let mut out = vec![c64::new(0.0, 0.0); n * n];
        self.matrix.mul_vec_into(&v, &mut out);
        unvectorize(&out, n)
    }
}

/// `rate · D[L]`.
pub fn dissipator(jump: &Operator, rate: f64) -> Result<Superoperator, LiouvillianError> {
    if !(rate >= 0.0) || !rate.is_finite() {
        return Err(LiouvillianError::NegativeRate(rate));
    }
    let space = jump.space();
    if rate == 0.0 {
        return Ok(Superoperator::zero(space));
    }
    let n = space.dim_total();
    let l = jump.matrix();
    let ldl = l.adjoint().matmul(l);
    let id = CsrMatrix::identity(n);
    let r = c64::new(rate, 0.0);
    let half = c64::new(0.5, 0.0);

    let sandwich = l.conj().kron(l);
    let left = id.kron(&ldl);
    let right = ldl.transpose().kron(&id);
    let matrix = sandwich.sub(&left.add(&right).scale(half)).scale(r);

    Ok(Superoperator {
        space,
        effective: ldl.scale(c64::new(0.0, -0.5 * rate)),
        channels: vec![Channel { jump: l.clone(), rate }],
        matrix,
        origin: None,
    })
}

/// Full generator for `params`, including every reservoir channel.
pub fn assemble(
    params: &SystemParams,
    space: TruncatedSpace,
    kind: ModelKind,
) -> Result<Superoperator, LiouvillianError> {
    params.validate()?;
    let nt = params.n_thermal;
    let h = hamiltonian(params, space, kind);
    let channels = [
        (space.atom_operator(AtomOp::Lower), params.gamma * (nt + 1.0)),
        (space.atom_operator(AtomOp::Raise), params.gamma * nt),
        (space.field_operator(FieldOp::Annihilate), params.kappa * (nt + 1.0)),
        (space.field_operator(FieldOp::Create), params.kappa * nt),
        (space.atom_operator(AtomOp::Z), params.gamma_ph / 2.0),
        (space.field_operator(FieldOp::Number), params.cavity_gamma_ph / 2.0),
    ];
    let mut gen = Superoperator::unitary(&h);
    for (op, rate) in channels {
        if rate > 0.0 {
            gen = gen.add(&dissipator(&op, rate)?)?;
        }
    }
    gen.origin = Some((*params, kind));
    Ok(gen)
}

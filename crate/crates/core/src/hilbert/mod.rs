// Copyright 2026 open-rabi Contributors
// SPDX-License-Identifier: Apache-2.0

//! Truncated atom ⊗ field Hilbert space and the operators acting on it.
//!
//! Basis ordering is atom-major: index `s · (n_max + 1) + k` labels
//! `|s⟩ ⊗ |k⟩` with `s = 0` for `|g⟩`, `s = 1` for `|e⟩` and Fock index
//! `k ∈ 0..=n_max`. The ground block therefore comes first.

mod sparse;
pub(crate) mod state;

use std::fmt;
use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::c64;

pub use sparse::CsrMatrix;
pub use state::{DensityMatrix, StateTolerances};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HilbertError {
    #[error("field truncation n_max must be at least 1, got {0}")]
    InvalidTruncation(usize),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("state is not Hermitian: max |ρ − ρ†| = {0:e}")]
    NotHermitian(f64),
    #[error("state trace deviates from 1: Tr ρ = {0}")]
    TraceNotUnit(f64),
    #[error("state has negative eigenvalue {0:e}")]
    NegativeEigenvalue(f64),
    #[error("Hermitian eigensolver failed to converge")]
    EigenFailure,
    #[error("state vector has zero norm")]
    ZeroNorm,
    #[error("Fock index {k} exceeds truncation n_max = {n_max}")]
    FockOutOfRange { k: usize, n_max: usize },
}

/// Atomic level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    #[serde(alias = "g")]
    Ground,
    #[serde(alias = "e")]
    Excited,
}

impl Level {
    fn index(self) -> usize {
        match self {
            Level::Ground => 0,
            Level::Excited => 1,
        }
    }
}

/// Field operators on the cavity factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldOp {
    /// `a`
    Annihilate,
    /// `a†`
    Create,
    /// `n = a†a`
    Number,
    /// `x = (a + a†)/√2`
    X,
    /// `p = (a − a†)/(√2 i)`
    P,
}

/// Atomic operators on the two-level factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AtomOp {
    /// `σ₊ = |e⟩⟨g|`
    Raise,
    /// `σ₋ = |g⟩⟨e|`
    Lower,
    X,
    Y,
    /// `σz = |e⟩⟨e| − |g⟩⟨g|`
    Z,
}

/// Composite space with the field truncated at Fock index `n_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TruncatedSpace {
    n_max: usize,
}

impl TruncatedSpace {
    /// At least one photon is needed to couple `|g,0⟩` to `|e,1⟩`.
    pub fn new(n_max: usize) -> Result<Self, HilbertError> {
        if n_max == 0 {
            return Err(HilbertError::InvalidTruncation(n_max));
        }
        Ok(Self { n_max })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn dim_field(&self) -> usize {
        self.n_max + 1
    }

    pub fn dim_total(&self) -> usize {
        2 * self.dim_field()
    }

    /// Basis index of `|level⟩ ⊗ |k⟩`.
    pub fn index(&self, level: Level, k: usize) -> usize {
        debug_assert!(k <= self.n_max);
        level.index() * self.dim_field() + k
    }

    /// Inverse of [`TruncatedSpace::index`]: `(level, k)`.
    pub fn split(&self, index: usize) -> (Level, usize) {
        let d = self.dim_field();
        let level = if index < d { Level::Ground } else { Level::Excited };
        (level, index % d)
    }

    pub fn identity(&self) -> Operator {
        Operator::new(*self, CsrMatrix::identity(self.dim_total()))
    }

    /// Field operator lifted to the composite space as `I₂ ⊗ f`.
    pub fn field_operator(&self, which: FieldOp) -> Operator {
        let d = self.dim_field();
        let sqrt = |k: usize| (k as f64).sqrt();
        let annihilate = || CsrMatrix::from_triplets(d, d, (1..d).map(|k| (k - 1, k, c64::new(sqrt(k), 0.0))));
        let factor = match which {
            FieldOp::Annihilate => annihilate(),
            FieldOp::Create => annihilate().adjoint(),
            FieldOp::Number => {
                CsrMatrix::from_diagonal(&(0..d).map(|k| c64::new(k as f64, 0.0)).collect::<Vec<_>>())
            }
            FieldOp::X => {
                let a = annihilate();
                a.add(&a.adjoint()).scale(c64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0))
            }
            FieldOp::P => {
                // (a − a†)/(√2 i) = −i (a − a†)/√2
                let a = annihilate();
                a.sub(&a.adjoint())
                    .scale(c64::new(0.0, -std::f64::consts::FRAC_1_SQRT_2))
            }
        };
        Operator::new(*self, CsrMatrix::identity(2).kron(&factor))
    }

    /// Atomic operator lifted to the composite space as `σ ⊗ I_field`.
    pub fn atom_operator(&self, which: AtomOp) -> Operator {
        let (g, e) = (Level::Ground.index(), Level::Excited.index());
        let one = c64::new(1.0, 0.0);
        let entries: Vec<(usize, usize, c64)> = match which {
            AtomOp::Raise => vec![(e, g, one)],
            AtomOp::Lower => vec![(g, e, one)],
            AtomOp::X => vec![(e, g, one), (g, e, one)],
            // (σ₊ − σ₋)/i
            AtomOp::Y => vec![(e, g, c64::new(0.0, -1.0)), (g, e, c64::new(0.0, 1.0))],
            AtomOp::Z => vec![(e, e, one), (g, g, -one)],
        };
        let factor = CsrMatrix::from_triplets(2, 2, entries);
        Operator::new(*self, factor.kron(&CsrMatrix::identity(self.dim_field())))
    }
}

/// Sparse operator on a [`TruncatedSpace`]. Immutable once built.
#[derive(Clone, PartialEq)]
pub struct Operator {
    space: TruncatedSpace,
    matrix: CsrMatrix,
}

impl fmt::Debug for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Operator")
            .field("n_max", &self.space.n_max)
            .field("nnz", &self.matrix.nnz())
            .finish()
    }
}

impl Operator {
    /// Panics if `matrix` is not `dim_total × dim_total`.
    pub fn new(space: TruncatedSpace, matrix: CsrMatrix) -> Self {
        let n = space.dim_total();
        assert_eq!(
            (matrix.nrows(), matrix.ncols()),
            (n, n),
            "operator matrix must be {n}x{n}"
        );
        Self { space, matrix }
    }

    pub fn zero(space: TruncatedSpace) -> Self {
        let n = space.dim_total();
        Self::new(space, CsrMatrix::zeros(n, n))
    }

    pub fn space(&self) -> TruncatedSpace {
        self.space
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn adjoint(&self) -> Self {
        Self::new(self.space, self.matrix.adjoint())
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self::new(self.space, self.matrix.scale(c64::new(factor, 0.0)))
    }

    pub fn scale_complex(&self, factor: c64) -> Self {
        Self::new(self.space, self.matrix.scale(factor))
    }

    /// `[self, other]`
    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    /// `self · other + other · self`
    pub fn anticommutator(&self, other: &Self) -> Self {
        &(self * other) + &(other * self)
    }

    /// Largest elementwise |A − A†|.
    pub fn hermiticity_error(&self) -> f64 {
        self.matrix.max_abs_diff(&self.matrix.adjoint())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.matrix.max_abs_diff(&other.matrix)
    }

    pub fn to_dense(&self) -> faer::Mat<c64> {
        self.matrix.to_dense()
    }
}

impl Mul for &Operator {
    type Output = Operator;

    fn mul(self, rhs: &Operator) -> Operator {
        assert_eq!(self.space, rhs.space, "operators live on different spaces");
        Operator::new(self.space, self.matrix.matmul(&rhs.matrix))
    }
}

impl Add for &Operator {
    type Output = Operator;

    fn add(self, rhs: &Operator) -> Operator {
        assert_eq!(self.space, rhs.space, "operators live on different spaces");
        Operator::new(self.space, self.matrix.add(&rhs.matrix))
    }
}

impl Sub for &Operator {
    type Output = Operator;

    fn sub(self, rhs: &Operator) -> Operator {
        assert_eq!(self.space, rhs.space, "operators live on different spaces");
        Operator::new(self.space, self.matrix.sub(&rhs.matrix))
    }
}

pub fn build_space(n_max: usize) -> Result<TruncatedSpace, HilbertError> {
    TruncatedSpace::new(n_max)
}

/// `Tr(ρ · op)`.
pub fn expectation(rho: &DensityMatrix, op: &Operator) -> Result<c64, HilbertError> {
    if rho.space() != op.space() {
        return Err(HilbertError::DimensionMismatch {
            expected: op.space().dim_total(),
            found: rho.space().dim_total(),
        });
    }
    let m = rho.matrix();
    Ok(op
        .matrix()
        .iter()
        .fold(c64::new(0.0, 0.0), |acc, (i, j, v)| acc + v * m[(j, i)]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> c64 {
        c64::new(re, im)
    }

    fn ket(space: TruncatedSpace, level: Level, k: usize) -> Vec<c64> {
        let mut v = vec![c(0.0, 0.0); space.dim_total()];
        v[space.index(level, k)] = c(1.0, 0.0);
        v
    }

    fn apply(op: &Operator, v: &[c64]) -> Vec<c64> {
        let mut out = vec![c(0.0, 0.0); v.len()];
        op.matrix().mul_vec_into(v, &mut out);
        out
    }

    #[test]
    fn dimensions() {
        assert_eq!(build_space(1).unwrap().dim_total(), 4);
        assert_eq!(build_space(10).unwrap().dim_total(), 22);
        assert_eq!(build_space(15).unwrap().dim_field(), 16);
        assert_eq!(build_space(0), Err(HilbertError::InvalidTruncation(0)));
    }

    #[test]
    fn basis_is_atom_major() {
        let s = build_space(3).unwrap();
        assert_eq!(s.index(Level::Ground, 0), 0);
        assert_eq!(s.index(Level::Ground, 3), 3);
        assert_eq!(s.index(Level::Excited, 0), 4);
        assert_eq!(s.split(6), (Level::Excited, 2));
    }

    #[test]
    fn annihilation_lowers_fock_index() {
        let s = build_space(4).unwrap();
        let a = s.field_operator(FieldOp::Annihilate);
        let out = apply(&a, &ket(s, Level::Ground, 1));
        assert_eq!(out, ket(s, Level::Ground, 0));
        // a only touches the k → k−1 band
        for (i, j, _) in a.matrix().iter() {
            let (li, ki) = s.split(i);
            let (lj, kj) = s.split(j);
            assert_eq!(li, lj);
            assert_eq!(ki + 1, kj);
        }
    }

    #[test]
    fn number_eigenvalue() {
        let s = build_space(5).unwrap();
        let n = s.field_operator(FieldOp::Number);
        let v = ket(s, Level::Excited, 3);
        let out = apply(&n, &v);
        assert_eq!(out, v.iter().map(|x| x * 3.0).collect::<Vec<_>>());
    }

    #[test]
    fn ladder_product_is_number_operator() {
        let s = build_space(10).unwrap();
        let a = s.field_operator(FieldOp::Annihilate);
        let ad = s.field_operator(FieldOp::Create);
        let n = s.field_operator(FieldOp::Number);
        assert!((&ad * &a).max_abs_diff(&n) < 1e-14);
        assert!(a.adjoint().max_abs_diff(&ad) == 0.0);
    }

    #[test]
    fn hermitian_operators() {
        let s = build_space(8).unwrap();
        for op in [FieldOp::X, FieldOp::P, FieldOp::Number] {
            assert!(s.field_operator(op).is_hermitian(1e-15), "{op:?}");
        }
        for op in [AtomOp::X, AtomOp::Y, AtomOp::Z] {
            assert!(s.atom_operator(op).is_hermitian(0.0), "{op:?}");
        }
    }

    #[test]
    fn canonical_commutator_below_truncation_edge() {
        let s = build_space(10).unwrap();
        let x = s.field_operator(FieldOp::X).to_dense();
        let p = s.field_operator(FieldOp::P).to_dense();
        let comm = &x * &p - &p * &x;
        let d = s.dim_field();
        for level in [Level::Ground, Level::Excited] {
            for k in 0..d {
                for l in 0..d {
                    let v = comm[(s.index(level, k), s.index(level, l))];
                    if k == s.n_max() && l == s.n_max() {
                        // truncation artefact: [a, a†] = 1 − (n_max + 1)|n_max⟩⟨n_max|
                        assert!((v - c(0.0, -(s.n_max() as f64))).norm() < 1e-12);
                    } else if k == l {
                        assert!((v - c(0.0, 1.0)).norm() < 1e-12, "k={k}");
                    } else {
                        assert!(v.norm() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn pauli_algebra() {
        for n_max in [1, 3, 7] {
            let s = build_space(n_max).unwrap();
            let sx = s.atom_operator(AtomOp::X);
            let sy = s.atom_operator(AtomOp::Y);
            let sz = s.atom_operator(AtomOp::Z);
            let sp = s.atom_operator(AtomOp::Raise);
            assert_eq!((&sx * &sx).max_abs_diff(&s.identity()), 0.0);
            let comm = sx.commutator(&sy);
            assert!(comm.max_abs_diff(&sz.scale_complex(c(0.0, 2.0))) < 1e-15);
            let recon = (&sx + &sy.scale_complex(c(0.0, 1.0))).scale(0.5);
            assert!(recon.max_abs_diff(&sp) < 1e-15);
        }
    }

    #[test]
    fn atomic_action_on_basis() {
        let s = build_space(4).unwrap();
        let sz = s.atom_operator(AtomOp::Z);
        let g0 = ket(s, Level::Ground, 0);
        assert_eq!(apply(&sz, &g0), g0.iter().map(|x| -x).collect::<Vec<_>>());
        let sp = s.atom_operator(AtomOp::Raise);
        for k in 0..=4 {
            assert_eq!(apply(&sp, &ket(s, Level::Ground, k)), ket(s, Level::Excited, k));
        }
    }

    #[test]
    fn composite_operators_are_kronecker_products() {
        let s = build_space(5).unwrap();
        let sx = s.atom_operator(AtomOp::X);
        let x = s.field_operator(FieldOp::X);
        // atom and field factors commute and their product is σx ⊗ x
        let prod = &sx * &x;
        assert!(sx.commutator(&x).matrix().max_abs() < 1e-15);
        let sx2 = CsrMatrix::from_triplets(2, 2, [(0, 1, c(1.0, 0.0)), (1, 0, c(1.0, 0.0))]);
        let a = CsrMatrix::from_triplets(6, 6, (1..6).map(|k| (k - 1, k, c((k as f64).sqrt(), 0.0))));
        let xf = a.add(&a.adjoint()).scale(c(std::f64::consts::FRAC_1_SQRT_2, 0.0));
        assert!(prod.matrix().max_abs_diff(&sx2.kron(&xf)) < 1e-15);
    }

    #[test]
    fn closure_variables_in_vacuum() {
        let s = build_space(6).unwrap();
        let rho = DensityMatrix::basis(s, Level::Ground, 0).unwrap();
        let x = s.field_operator(FieldOp::X);
        let p = s.field_operator(FieldOp::P);
        let sz = s.atom_operator(AtomOp::Z);
        let n = s.field_operator(FieldOp::Number);
        assert_eq!(expectation(&rho, &n).unwrap(), c(0.0, 0.0));
        let zeta = &(&x * &x).scale(2.0) * &sz;
        assert!((expectation(&rho, &zeta).unwrap() - c(-1.0, 0.0)).norm() < 1e-15);
        let alpha = &x.anticommutator(&p) * &sz;
        assert!(expectation(&rho, &alpha).unwrap().norm() < 1e-15);
    }

    #[test]
    fn expectation_rejects_other_space() {
        let rho = DensityMatrix::basis(build_space(2).unwrap(), Level::Ground, 0).unwrap();
        let n = build_space(3).unwrap().field_operator(FieldOp::Number);
        assert!(matches!(
            expectation(&rho, &n),
            Err(HilbertError::DimensionMismatch { expected: 8, found: 6 })
        ));
    }
}

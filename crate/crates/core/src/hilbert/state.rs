// Copyright 2026 open-rabi Contributors
// SPDX-License-Identifier: Apache-2.0

use faer::{Mat, Side};

use super::{HilbertError, Level, TruncatedSpace};
use crate::c64;

/// Acceptance thresholds for a physical state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateTolerances {
    pub hermiticity: f64,
    pub trace: f64,
    pub min_eigenvalue: f64,
}

impl Default for StateTolerances {
    fn default() -> Self {
        Self {
            hermiticity: 1e-12,
            trace: 1e-10,
            min_eigenvalue: -1e-8,
        }
    }
}

/// Dense density matrix on a truncated space.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    space: TruncatedSpace,
    matrix: Mat<c64>,
}

impl DensityMatrix {
    /// Wraps a matrix without checking physical invariants; see [`DensityMatrix::validate`].
    pub fn from_matrix(space: TruncatedSpace, matrix: Mat<c64>) -> Result<Self, HilbertError> {
        let n = space.dim_total();
        for found in [matrix.nrows(), matrix.ncols()] {
            if found != n {
                return Err(HilbertError::DimensionMismatch { expected: n, found });
            }
        }
        Ok(Self { space, matrix })
    }

    /// `|level, k⟩⟨level, k|`
    pub fn basis(space: TruncatedSpace, level: Level, k: usize) -> Result<Self, HilbertError> {
        if k > space.n_max() {
            return Err(HilbertError::FockOutOfRange { k, n_max: space.n_max() });
        }
        let n = space.dim_total();
        let idx = space.index(level, k);
        let matrix = Mat::from_fn(n, n, |i, j| {
            if i == idx && j == idx {
                c64::new(1.0, 0.0)
            } else {
                c64::new(0.0, 0.0)
            }
        });
        Ok(Self { space, matrix })
    }

    /// `|ψ⟩⟨ψ|` for the normalised `ψ`.
    pub fn from_ket(space: TruncatedSpace, psi: &[c64]) -> Result<Self, HilbertError> {
        let n = space.dim_total();
        if psi.len() != n {
            return Err(HilbertError::DimensionMismatch { expected: n, found: psi.len() });
        }
        let norm2: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if norm2 == 0.0 {
            return Err(HilbertError::ZeroNorm);
        }
        let matrix = Mat::from_fn(n, n, |i, j| psi[i] * psi[j].conj() / norm2);
        Ok(Self { space, matrix })
    }

    /// Product state: atomic populations `(p_g, p_e)` ⊗ truncated thermal
    /// field with mean occupation `n_thermal` (renormalised on the truncated
    /// ladder).
    pub fn product_thermal(
        space: TruncatedSpace,
        excited_population: f64,
        n_thermal: f64,
    ) -> Self {
        let d = space.dim_field();
        let ratio = if n_thermal > 0.0 {
            n_thermal / (n_thermal + 1.0)
        } else {
            0.0
        };
        let mut field: Vec<f64> = (0..d).map(|k| ratio.powi(k as i32)).collect();
        let z: f64 = field.iter().sum();
        field.iter_mut().for_each(|p| *p /= z);
        let atom = [1.0 - excited_population, excited_population];
        let n = space.dim_total();
        let mut matrix = Mat::<c64>::zeros(n, n);
        for (s, level) in [Level::Ground, Level::Excited].into_iter().enumerate() {
            for (k, pk) in field.iter().enumerate() {
                let idx = space.index(level, k);
                matrix[(idx, idx)] = c64::new(atom[s] * pk, 0.0);
            }
        }
        Self { space, matrix }
    }

    pub fn space(&self) -> TruncatedSpace {
        self.space
    }

    pub fn matrix(&self) -> &Mat<c64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Mat<c64> {
        self.matrix
    }

    pub fn trace(&self) -> c64 {
        (0..self.matrix.nrows()).map(|i| self.matrix[(i, i)]).sum()
    }

    pub fn hermiticity_error(&self) -> f64 {
        let n = self.matrix.nrows();
        let mut worst = 0.0f64;
        for j in 0..n {
            for i in 0..=j {
                worst = worst.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> Result<f64, HilbertError> {
        let herm = Mat::from_fn(self.matrix.nrows(), self.matrix.ncols(), |i, j| {
            (self.matrix[(i, j)] + self.matrix[(j, i)].conj()) * 0.5
        });
        let eig = herm
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|_| HilbertError::EigenFailure)?;
        Ok(eig.into_iter().fold(f64::INFINITY, f64::min))
    }

    /// Replaces the matrix by its Hermitian part and rescales to unit trace.
    pub fn hermitize_and_normalize(&mut self) {
        let n = self.matrix.nrows();
        for j in 0..n {
            for i in 0..=j {
                let avg = (self.matrix[(i, j)] + self.matrix[(j, i)].conj()) * 0.5;
                self.matrix[(i, j)] = avg;
                self.matrix[(j, i)] = avg.conj();
            }
        }
        let tr = self.trace().re;
        if tr != 0.0 {
            for j in 0..n {
                for i in 0..n {
                    self.matrix[(i, j)] /= tr;
                }
            }
        }
    }

    pub fn validate(&self, tol: &StateTolerances) -> Result<(), HilbertError> {
        let herm = self.hermiticity_error();
        if herm > tol.hermiticity {
            return Err(HilbertError::NotHermitian(herm));
        }
        let tr = self.trace();
        if (tr - c64::new(1.0, 0.0)).norm() > tol.trace {
            return Err(HilbertError::TraceNotUnit(tr.re));
        }
        let min = self.min_eigenvalue()?;
        if min < tol.min_eigenvalue {
            return Err(HilbertError::NegativeEigenvalue(min));
        }
        Ok(())
    }

    /// Population of the `count` highest Fock levels, summed over the atom.
    pub fn tail_population(&self, count: usize) -> f64 {
        let n_max = self.space.n_max();
        let lo = (n_max + 1).saturating_sub(count);
        (lo..=n_max)
            .flat_map(|k| [Level::Ground, Level::Excited].map(|l| self.space.index(l, k)))
            .map(|idx| self.matrix[(idx, idx)].re)
            .sum()
    }

    /// Column-stacked `vec(ρ)`: entry `i + j·n` holds `ρ[i, j]`.
    pub fn vectorize(&self) -> Vec<c64> {
        vectorize(&self.matrix)
    }

    pub fn from_vectorized(space: TruncatedSpace, v: &[c64]) -> Result<Self, HilbertError> {
        let n = space.dim_total();
        if v.len() != n * n {
            return Err(HilbertError::DimensionMismatch { expected: n * n, found: v.len() });
        }
        Ok(Self { space, matrix: unvectorize(v, n) })
    }
}

pub(crate) fn vectorize(m: &Mat<c64>) -> Vec<c64> {
    let (r, c) = (m.nrows(), m.ncols());
    let mut out = Vec::with_capacity(r * c);
    for j in 0..c {
        for i in 0..r {
            out.push(m[(i, j)]);
        }
    }
    out
}

pub(crate) fn unvectorize(v: &[c64], n: usize) -> Mat<c64> {
    Mat::from_fn(n, n, |i, j| v[i + j * n])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_state_is_valid() {
        let s = TruncatedSpace::new(4).unwrap();
        let rho = DensityMatrix::basis(s, Level::Excited, 2).unwrap();
        rho.validate(&StateTolerances::default()).unwrap();
        assert_eq!(rho.trace(), c64::new(1.0, 0.0));
        assert!(DensityMatrix::basis(s, Level::Ground, 5).is_err());
    }

    #[test]
    fn ket_is_normalised() {
        let s = TruncatedSpace::new(1).unwrap();
        let psi = [c64::new(1.0, 0.0), c64::new(0.0, 0.0), c64::new(0.0, 0.0), c64::new(0.0, 1.0)];
        let rho = DensityMatrix::from_ket(s, &psi).unwrap();
        rho.validate(&StateTolerances::default()).unwrap();
        assert!((rho.matrix()[(0, 3)] - c64::new(0.0, -0.5)).norm() < 1e-15);
        assert!(rho.min_eigenvalue().unwrap().abs() < 1e-12);
    }

    #[test]
    fn invalid_states_rejected() {
        let s = TruncatedSpace::new(1).unwrap();
        let mut m = Mat::<c64>::zeros(4, 4);
        m[(0, 0)] = c64::new(1.5, 0.0);
        m[(1, 1)] = c64::new(-0.5, 0.0);
        let rho = DensityMatrix::from_matrix(s, m.clone()).unwrap();
        assert!(matches!(
            rho.validate(&StateTolerances::default()),
            Err(HilbertError::NegativeEigenvalue(_))
        ));
        m[(0, 1)] = c64::new(0.1, 0.0);
        let rho = DensityMatrix::from_matrix(s, m).unwrap();
        assert!(matches!(
            rho.validate(&StateTolerances::default()),
            Err(HilbertError::NotHermitian(_))
        ));
        assert!(DensityMatrix::from_matrix(s, Mat::zeros(3, 3)).is_err());
    }

    #[test]
    fn thermal_product_has_unit_trace() {
        let s = TruncatedSpace::new(20).unwrap();
        let rho = DensityMatrix::product_thermal(s, 0.2, 0.1);
        rho.validate(&StateTolerances::default()).unwrap();
        assert!(rho.tail_population(2) < 1e-18);
    }

    #[test]
    fn vectorization_is_column_stacking() {
        let s = TruncatedSpace::new(1).unwrap();
        let m = Mat::from_fn(4, 4, |i, j| c64::new(i as f64, j as f64));
        let rho = DensityMatrix::from_matrix(s, m).unwrap();
        let v = rho.vectorize();
        assert_eq!(v[1 + 2 * 4], c64::new(1.0, 2.0));
        assert_eq!(DensityMatrix::from_vectorized(s, &v).unwrap(), rho);
    }
}

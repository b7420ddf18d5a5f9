// Copyright 2026 open-rabi Contributors
// SPDX-License-Identifier: Apache-2.0

//! Adaptive Dormand-Prince 5(4) integrator for `y' = f(t, y)` over real or
//! complex state vectors.
//!
//! Steps are clipped so every requested output time is hit exactly; no dense
//! output interpolation is involved.

use std::ops::{Add, ControlFlow, Mul};

use thiserror::Error;

use crate::c64;

pub trait OdeScalar: Copy + Add<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn modulus(self) -> f64;
}

impl OdeScalar for f64 {
    fn zero() -> Self {
        0.0
    }

    fn modulus(self) -> f64 {
        self.abs()
    }
}

impl OdeScalar for c64 {
    fn zero() -> Self {
        c64::new(0.0, 0.0)
    }

    fn modulus(self) -> f64 {
        self.norm()
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OdeError {
    #[error("step size underflow at t = {t} (h = {h:e}): local error target unreachable")]
    StepUnderflow { t: f64, h: f64 },
    #[error("step budget of {max_steps} exhausted at t = {t}")]
    TooManySteps { t: f64, max_steps: usize },
    #[error("non-finite state at t = {0}")]
    NonFinite(f64),
    #[error("output times must be non-decreasing and start at or after t0")]
    BadOutputTimes,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    /// Largest allowed step; `f64::INFINITY` for none.
    pub h_max: f64,
}

impl Default for Dopri5 {
    fn default() -> Self {
        Self {
            rtol: 1e-9,
            atol: 1e-12,
            max_steps: 10_000_000,
            h_max: f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
    /// Componentwise sum of |local error estimate| over accepted steps.
    pub accumulated_error: Vec<f64>,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// 5th-order minus embedded 4th-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn combine<T: OdeScalar>(out: &mut [T], y: &[T], h: f64, terms: &[(f64, &[T])]) {
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = T::zero();
        for &(w, k) in terms {
            if w != 0.0 {
                acc = acc + k[i] * w;
            }
        }
        *o = y[i] + acc * h;
    }
}

impl Dopri5 {
    pub fn with_tolerances(rtol: f64, atol: f64) -> Self {
        Self { rtol, atol, ..Self::default() }
    }

    fn error_norm<T: OdeScalar>(&self, err: &[T], y: &[T], y_new: &[T]) -> f64 {
        let n = err.len().max(1) as f64;
        let sum: f64 = err
            .iter()
            .zip(y.iter().zip(y_new))
            .map(|(e, (a, b))| {
                let sc = self.atol + self.rtol * a.modulus().max(b.modulus());
                let r = e.modulus() / sc;
                r * r
            })
            .sum();
        (sum / n).sqrt()
    }

    /// Integrates from `t0` and calls `observe(t, y)` at every entry of
    /// `outputs`. Returning `ControlFlow::Break` from `observe` stops the
    /// integration early without error.
    pub fn integrate<T, F, O>(
        &self,
        mut rhs: F,
        t0: f64,
        y0: &[T],
        outputs: &[f64],
        mut observe: O,
    ) -> Result<StepStats, OdeError>
    where
        T: OdeScalar,
        F: FnMut(f64, &[T], &mut [T]),
        O: FnMut(f64, &[T]) -> ControlFlow<()>,
    {
        if outputs.windows(2).any(|w| w[1] < w[0]) || outputs.first().is_some_and(|&t| t < t0) {
            return Err(OdeError::BadOutputTimes);
        }
        let n = y0.len();
        let mut stats = StepStats {
            accumulated_error: vec![0.0; n],
            ..Default::default()
        };
        let mut y = y0.to_vec();
        let mut t = t0;
        let zero = vec![T::zero(); n];
        let mut k1 = zero.clone();
        let mut k2 = zero.clone();
        let mut k3 = zero.clone();
        let mut k4 = zero.clone();
        let mut k5 = zero.clone();
        let mut k6 = zero.clone();
        let mut k7 = zero.clone();
        let mut tmp = zero.clone();
        let mut y_new = zero.clone();
        let mut err = zero;

        rhs(t, &y, &mut k1);
        stats.rhs_evals += 1;

        let mut h = self.initial_step(&mut rhs, t, &y, &k1, &mut tmp, &mut k2, &mut stats);
        let t_final = outputs.last().copied().unwrap_or(t0);
        let min_step = 1e-14 * t_final.abs().max(1.0);

        for &t_out in outputs {
            while t_out - t > min_step {
                if stats.accepted + stats.rejected >= self.max_steps {
                    return Err(OdeError::TooManySteps { t, max_steps: self.max_steps });
                }
                let mut step = h.min(self.h_max);
                let clipped = step >= t_out - t;
                if clipped {
                    step = t_out - t;
                }

                combine(&mut tmp, &y, step, &[(A21, &k1)]);
                rhs(t + C2 * step, &tmp, &mut k2);
                combine(&mut tmp, &y, step, &[(A31, &k1), (A32, &k2)]);
                rhs(t + C3 * step, &tmp, &mut k3);
                combine(&mut tmp, &y, step, &[(A41, &k1), (A42, &k2), (A43, &k3)]);
                rhs(t + C4 * step, &tmp, &mut k4);
                combine(&mut tmp, &y, step, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]);
                rhs(t + C5 * step, &tmp, &mut k5);
                combine(
                    &mut tmp,
                    &y,
                    step,
                    &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
                );
                rhs(t + step, &tmp, &mut k6);
                combine(
                    &mut y_new,
                    &y,
                    step,
                    &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)],
                );
                rhs(t + step, &y_new, &mut k7);
                stats.rhs_evals += 6;

                for (i, e) in err.iter_mut().enumerate() {
                    *e = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7)
                        * step;
                }
                let norm = self.error_norm(&err, &y, &y_new);
                if !norm.is_finite() {
                    return Err(OdeError::NonFinite(t));
                }

                if norm <= 1.0 {
                    stats.accepted += 1;
                    for (acc, e) in stats.accumulated_error.iter_mut().zip(&err) {
                        *acc += e.modulus();
                    }
                    t = if clipped { t_out } else { t + step };
                    std::mem::swap(&mut y, &mut y_new);
                    std::mem::swap(&mut k1, &mut k7);
                    let fac = if norm == 0.0 { 5.0 } else { (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0) };
                    // a clipped step says nothing about the natural step size
                    if !clipped || step * fac > h {
                        h = step * fac;
                    }
                } else {
                    stats.rejected += 1;
                    h = step * (0.9 * norm.powf(-0.2)).clamp(0.1, 1.0);
                    if h < min_step {
                        return Err(OdeError::StepUnderflow { t, h });
                    }
                }
            }
            if y.iter().any(|v| !v.modulus().is_finite()) {
                return Err(OdeError::NonFinite(t));
            }
            if observe(t_out, &y).is_break() {
                break;
            }
        }
        Ok(stats)
    }

    #[allow(clippy::too_many_arguments)]
    fn initial_step<T, F>(
        &self,
        rhs: &mut F,
        t: f64,
        y: &[T],
        f0: &[T],
        y1: &mut [T],
        f1: &mut [T],
        stats: &mut StepStats,
    ) -> f64
    where
        T: OdeScalar,
        F: FnMut(f64, &[T], &mut [T]),
    {
        let scaled = |v: &[T]| -> f64 {
            let n = v.len().max(1) as f64;
            let s: f64 = v
                .iter()
                .zip(y)
                .map(|(a, b)| {
                    let r = a.modulus() / (self.atol + self.rtol * b.modulus());
                    r * r
                })
                .sum();
            (s / n).sqrt()
        };
        let d0 = scaled(y);
        let d1 = scaled(f0);
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        combine(y1, y, h0, &[(1.0, f0)]);
        rhs(t + h0, y1, f1);
        stats.rhs_evals += 1;
        let diff: Vec<T> = f1.iter().zip(f0).map(|(a, b)| *a + *b * -1.0).collect();
        let d2 = scaled(&diff) / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        (100.0 * h0).min(h1).min(self.h_max)
    }
}

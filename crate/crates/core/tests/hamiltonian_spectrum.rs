// Copyright 2026 open-rabi Contributors
// SPDX-License-Identifier: Apache-2.0

use faer::{Mat, Side};
use open_rabi_core::liouvillian::hamiltonian;
use open_rabi_core::{c64, ModelKind, SystemParams, TruncatedSpace};

/// Dense Rabi matrix written out element by element in the `|s,k⟩` basis.
fn dense_rabi(n_max: usize, omega0: f64, g: f64) -> Mat<c64> {
    let d = n_max + 1;
    let idx = |s: usize, k: usize| s * d + k;
    let mut h = Mat::<c64>::zeros(2 * d, 2 * d);
    for k in 0..d {
        h[(idx(0, k), idx(0, k))] = c64::new(k as f64 - omega0 / 2.0, 0.0);
        h[(idx(1, k), idx(1, k))] = c64::new(k as f64 + omega0 / 2.0, 0.0);
    }
    for k in 1..d {
        let c = c64::new(g * (k as f64).sqrt(), 0.0);
        // a σ₊ : |g,k⟩ → |e,k−1⟩ and a† σ₊ : |g,k−1⟩ → |e,k⟩
        h[(idx(1, k - 1), idx(0, k))] = c;
        h[(idx(0, k), idx(1, k - 1))] = c;
        h[(idx(1, k), idx(0, k - 1))] = c;
        h[(idx(0, k - 1), idx(1, k))] = c;
    }
    h
}

#[test]
fn rabi_spectrum_matches_dense_oracle() {
    let space = TruncatedSpace::new(12).unwrap();
    let p = SystemParams { omega0: 1.0, g: 0.02, ..Default::default() };
    let h = hamiltonian(&p, space, ModelKind::Rabi).to_dense();
    let oracle = dense_rabi(12, 1.0, 0.02);
    let mut worst = 0.0f64;
    for j in 0..h.ncols() {
        for i in 0..h.nrows() {
            worst = worst.max((h[(i, j)] - oracle[(i, j)]).norm());
        }
    }
    assert!(worst < 1e-15);
    let ev = h.self_adjoint_eigenvalues(Side::Lower).unwrap();
    let ev_oracle = oracle.self_adjoint_eigenvalues(Side::Lower).unwrap();
    for (a, b) in ev.iter().zip(&ev_oracle) {
        assert!((a - b).abs() < 1e-12, "{a} vs {b}");
    }
}

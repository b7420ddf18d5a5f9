// Copyright 2026 open-rabi Contributors
// SPDX-License-Identifier: Apache-2.0

use open_rabi_core::analytic::{photon_rate_asymptotic, stationary};
use open_rabi_core::evolve::{
    asymptotic_rate, default_horizon, evolve, steady_state, truncation_convergence,
    ConvergenceOptions, EvolveError, EvolveOptions, Probe,
};
use open_rabi_core::hilbert::expectation;
use open_rabi_core::liouvillian::assemble;
use open_rabi_core::{AtomOp, DensityMatrix, FieldOp, Level, ModelKind, SystemParams, TruncatedSpace};

fn steady_observables(p: &SystemParams, n_max: usize) -> (f64, f64, f64) {
    let space = TruncatedSpace::new(n_max).unwrap();
    let ss = steady_state(&assemble(p, space, ModelKind::Rabi).unwrap()).unwrap();
    let n = expectation(&ss.rho, &space.field_operator(FieldOp::Number)).unwrap().re;
    let sz = expectation(&ss.rho, &space.atom_operator(AtomOp::Z)).unwrap().re;
    (n, sz, ss.residual)
}

fn pure_dephasing(g: f64, gamma_ph: f64, delta_plus: f64) -> SystemParams {
    SystemParams { g, gamma_ph, ..Default::default() }
        .with_delta_plus(delta_plus)
        .unwrap()
}

fn rate(p: &SystemParams, n_max: usize, opts: &EvolveOptions) -> f64 {
    let space = TruncatedSpace::new(n_max).unwrap();
    let gen = assemble(p, space, ModelKind::Rabi).unwrap();
    let rho0 = DensityMatrix::basis(space, Level::Ground, 0).unwrap();
    let traj = evolve(&rho0, &gen, default_horizon(p).unwrap(), 1.0, opts).unwrap();
    asymptotic_rate(&traj.records, 0.5).unwrap().slope
}

#[test]
fn excited_state_is_stationary_without_coupling() {
    let space = TruncatedSpace::new(3).unwrap();
    let gen = assemble(&SystemParams::default(), space, ModelKind::Rabi).unwrap();
    let rho0 = DensityMatrix::basis(space, Level::Excited, 0).unwrap();
    let traj = evolve(&rho0, &gen, 50.0, 1.0, &EvolveOptions::default()).unwrap();
    assert_eq!(traj.records.len(), 51);
    for r in &traj.records {
        assert!((r.mean_sz - 1.0).abs() < 1e-14);
    }
}

#[test]
fn rotating_wave_dynamics_never_leaves_vacuum() {
    let space = TruncatedSpace::new(6).unwrap();
    for p in [
        SystemParams { g: 0.02, gamma_ph: 0.05, ..Default::default() },
        SystemParams { g: 0.05, gamma_ph: 0.02, gamma: 0.01, kappa: 0.003, cavity_gamma_ph: 0.01, ..Default::default() },
    ] {
        let gen = assemble(&p, space, ModelKind::JaynesCummings).unwrap();
        let rho0 = DensityMatrix::basis(space, Level::Ground, 0).unwrap();
        let traj = evolve(&rho0, &gen, 300.0, 1.0, &EvolveOptions::default()).unwrap();
        assert!(traj.records.iter().all(|r| r.mean_n.abs() < 1e-10));
    }
}

#[test]
fn anti_rotating_term_creates_photons() {
    let space = TruncatedSpace::new(6).unwrap();
    let p = pure_dephasing(0.02, 0.05, 2.0);
    let gen = assemble(&p, space, ModelKind::Rabi).unwrap();
    let rho0 = DensityMatrix::basis(space, Level::Ground, 0).unwrap();
    let traj = evolve(&rho0, &gen, 100.0, 0.5, &EvolveOptions::default()).unwrap();
    assert!(traj.records[1..].iter().all(|r| r.mean_n > 0.0));
}

#[test]
fn pure_dephasing_rate_order_of_magnitude() {
    let p = pure_dephasing(0.02, 0.05, 2.0);
    let space = TruncatedSpace::new(8).unwrap();
    let gen = assemble(&p, space, ModelKind::Rabi).unwrap();
    let rho0 = DensityMatrix::basis(space, Level::Ground, 0).unwrap();
    let traj = evolve(&rho0, &gen, 600.0, 1.0, &EvolveOptions::default()).unwrap();
    let est = asymptotic_rate(&traj.records, 0.5).unwrap();
    let analytic = photon_rate_asymptotic(&p);
    assert!((analytic - 9.99e-6).abs() < 1e-8);
    let ratio = est.slope / analytic;
    assert!((0.5..=2.0).contains(&ratio), "ratio {ratio}");
    // full-model value recorded with an independent dense solver
    assert!((est.slope - 1.502e-5).abs() < 0.01e-5, "slope {}", est.slope);
    assert!(traj.max_trace_drift() < 1e-8);
    assert!(traj.max_hermiticity_error() < 1e-10);
    assert!(traj.min_eigenvalue() > -1e-8);
}

#[test]
fn rate_scales_as_g_squared() {
    let opts = EvolveOptions::default();
    let lo = rate(&pure_dephasing(0.01, 0.05, 2.0), 8, &opts);
    let hi = rate(&pure_dephasing(0.04, 0.05, 2.0), 8, &opts);
    let exponent = (hi / lo).ln() / 4f64.ln();
    assert!((exponent - 2.0).abs() < 0.05, "exponent {exponent}");
}

#[test]
fn halving_tolerance_is_within_error_estimate() {
    let p = pure_dephasing(0.02, 0.05, 2.0);
    let space = TruncatedSpace::new(6).unwrap();
    let gen = assemble(&p, space, ModelKind::Rabi).unwrap();
    let rho0 = DensityMatrix::basis(space, Level::Ground, 0).unwrap();
    let coarse = EvolveOptions::default();
    let fine = EvolveOptions { rtol: coarse.rtol / 2.0, atol: coarse.atol / 2.0, ..coarse };
    let a = evolve(&rho0, &gen, 200.0, 1.0, &coarse).unwrap();
    let b = evolve(&rho0, &gen, 200.0, 1.0, &fine).unwrap();
    let diff = (a.last().mean_n - b.last().mean_n).abs();
    assert!(diff <= a.mean_n_error_bound, "{diff:e} > {:e}", a.mean_n_error_bound);
}

#[test]
fn decoupled_steady_state_is_thermal() {
    let p = SystemParams { kappa: 0.01, gamma: 0.01, n_thermal: 0.1, ..Default::default() };
    let (n, sz, res) = steady_observables(&p, 12);
    assert!((n - 0.1).abs() < 1e-9);
    assert!((sz + 1.0 / 1.2).abs() < 1e-12);
    assert!(res < 1e-10);
}

#[test]
fn steady_state_matches_dense_oracle() {
    // (n_max, params, ⟨n⟩, ⟨σz⟩) from a dense numpy solve at n_max = 12
    let cases = [
        (
            SystemParams { g: 0.02, kappa: 0.01, gamma: 0.01, gamma_ph: 0.02, ..Default::default() },
            7.011712869126202e-4,
            -0.9990025417258797,
        ),
        (
            SystemParams { g: 0.05, kappa: 0.01, gamma: 0.01, gamma_ph: 0.002, ..Default::default() },
            1.5687696862333993e-3,
            -0.9971249005575415,
        ),
        (
            SystemParams {
                g: 0.02,
                kappa: 0.01,
                gamma: 0.02,
                gamma_ph: 0.01,
                cavity_gamma_ph: 0.003,
                n_thermal: 0.2,
                ..Default::default()
            },
            0.20052633113208784,
            -0.7138113772508818,
        ),
    ];
    for (p, n_ref, sz_ref) in cases {
        let (n, sz, res) = steady_observables(&p, 12);
        assert!((n - n_ref).abs() < 1e-9 * n_ref.max(1e-3), "{n} vs {n_ref}");
        assert!((sz - sz_ref).abs() < 1e-9, "{sz} vs {sz_ref}");
        assert!(res < 1e-10);
    }
}

#[test]
fn zero_atomic_frequency_is_exact() {
    for (gamma_ph, gamma, kappa) in [(0.02, 0.01, 0.001), (0.02, 0.01, 0.01), (0.002, 0.01, 0.01), (0.02, 0.003, 0.01)] {
        let p = SystemParams { omega0: 0.0, g: 0.02, gamma_ph, gamma, kappa, ..Default::default() };
        let (n, _, _) = steady_observables(&p, 12);
        let predicted = stationary(&p).unwrap().n_inf;
        assert!(((n - predicted) / predicted).abs() < 1e-6, "{n} vs {predicted}");
    }
}

#[test]
fn steady_state_is_long_time_limit() {
    let p = SystemParams { g: 0.02, kappa: 0.05, gamma: 0.05, gamma_ph: 0.02, ..Default::default() };
    let space = TruncatedSpace::new(6).unwrap();
    let gen = assemble(&p, space, ModelKind::Rabi).unwrap();
    let (n_inf, _, _) = steady_observables(&p, 6);
    let rho0 = DensityMatrix::basis(space, Level::Ground, 0).unwrap();
    let t_end = 20.0 / p.kappa.min(p.gamma);
    let traj = evolve(&rho0, &gen, t_end, 10.0, &EvolveOptions::default()).unwrap();
    assert!((traj.last().mean_n - n_inf).abs() < 1e-6);
}

#[test]
fn decoupled_ladder_converges_at_start() {
    let p = SystemParams { kappa: 0.01, gamma: 0.01, gamma_ph: 0.02, ..Default::default() };
    let report =
        truncation_convergence(&p, ModelKind::Rabi, Probe::SteadyMeanN, &ConvergenceOptions::default()).unwrap();
    assert_eq!(report.n_max, 4);
    assert_eq!(report.value, 0.0);
}

#[test]
fn weak_coupling_ladder_converges_by_twelve() {
    let p = SystemParams { g: 0.02, kappa: 0.01, gamma: 0.01, gamma_ph: 0.02, ..Default::default() };
    let report =
        truncation_convergence(&p, ModelKind::Rabi, Probe::SteadyMeanN, &ConvergenceOptions::default()).unwrap();
    assert!(report.n_max <= 12, "{report:?}");
    assert!(report.tail_pop < 1e-10);
}

#[test]
fn ladder_reports_ceiling() {
    let p = SystemParams { g: 0.02, kappa: 0.01, gamma: 0.01, gamma_ph: 0.02, ..Default::default() };
    let opts = ConvergenceOptions { ceiling: 6, tail_tol: 0.0, ..Default::default() };
    match truncation_convergence(&p, ModelKind::Rabi, Probe::SteadyMeanN, &opts) {
        Err(EvolveError::NoConvergence { ceiling: 6, ladder }) => assert_eq!(ladder.len(), 1),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn rate_ladder_converges() {
    let p = pure_dephasing(0.02, 0.05, 2.0);
    let probe = Probe::RateSlope { t_end: Some(300.0), dt_out: 1.0 };
    let report = truncation_convergence(&p, ModelKind::Rabi, probe, &ConvergenceOptions::default()).unwrap();
    assert!(report.n_max <= 12, "{report:?}");
}

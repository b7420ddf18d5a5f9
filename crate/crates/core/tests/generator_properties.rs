// Copyright 2026 open-rabi Contributors
// SPDX-License-Identifier: Apache-2.0

use faer::Mat;
use open_rabi_core::liouvillian::assemble;
use open_rabi_core::{c64, DensityMatrix, ModelKind, SystemParams, TruncatedSpace};
use proptest::prelude::*;

fn params() -> impl Strategy<Value = SystemParams> {
    (
        0.0..2.0f64,
        0.0..0.1f64,
        0.0..0.05f64,
        0.0..0.05f64,
        0.0..0.1f64,
        0.0..0.02f64,
        0.0..0.5f64,
    )
        .prop_map(|(omega0, g, kappa, gamma, gamma_ph, cavity_gamma_ph, n_thermal)| SystemParams {
            omega0,
            g,
            kappa,
            gamma,
            gamma_ph,
            cavity_gamma_ph,
            n_thermal,
        })
}

fn kind() -> impl Strategy<Value = ModelKind> {
    prop_oneof![Just(ModelKind::Rabi), Just(ModelKind::JaynesCummings)]
}

/// ρ = AA†/Tr(AA†) for a random complex A.
fn random_state(space: TruncatedSpace, entries: &[f64]) -> DensityMatrix {
    let n = space.dim_total();
    let a = Mat::<c64>::from_fn(n, n, |i, j| {
        let k = 2 * (i * n + j);
        c64::new(entries[k], entries[k + 1])
    });
    let mut rho = &a * a.adjoint();
    let tr: c64 = (0..n).map(|i| rho[(i, i)]).sum();
    rho = Mat::from_fn(n, n, |i, j| rho[(i, j)] / tr);
    DensityMatrix::from_matrix(space, rho).unwrap()
}

fn state() -> impl Strategy<Value = DensityMatrix> {
    (1usize..=5).prop_flat_map(|n_max| {
        let n = 2 * (n_max + 1);
        prop::collection::vec(-1.0..1.0f64, 2 * n * n)
            .prop_map(move |e| random_state(TruncatedSpace::new(n_max).unwrap(), &e))
    })
}

fn max_abs(m: &Mat<c64>) -> f64 {
    let mut worst = 0.0f64;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            worst = worst.max(m[(i, j)].norm());
        }
    }
    worst
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn matrix_and_matrix_free_paths_agree(p in params(), k in kind(), rho in state()) {
        let gen = assemble(&p, rho.space(), k).unwrap();
        let a = gen.apply(rho.matrix());
        let b = gen.apply_matrix(rho.matrix());
        prop_assert!(max_abs(&(&a - &b)) < 1e-12);
    }

    #[test]
    fn generator_is_trace_free(p in params(), k in kind(), rho in state()) {
        let gen = assemble(&p, rho.space(), k).unwrap();
        let d = gen.apply(rho.matrix());
        let tr: c64 = (0..d.nrows()).map(|i| d[(i, i)]).sum();
        prop_assert!(tr.norm() < 1e-12);
    }

    #[test]
    fn generator_preserves_hermiticity(p in params(), k in kind(), rho in state()) {
        let gen = assemble(&p, rho.space(), k).unwrap();
        let d = gen.apply(rho.matrix());
        prop_assert!(max_abs(&(&d - d.adjoint())) < 1e-12);
    }

    #[test]
    fn generator_is_linear(
        p in params(),
        pair in (1usize..=4).prop_flat_map(|n_max| {
            let n = 2 * (n_max + 1);
            (
                prop::collection::vec(-1.0..1.0f64, 2 * n * n),
                prop::collection::vec(-1.0..1.0f64, 2 * n * n),
                Just(n_max),
            )
        }),
        w in 0.0..1.0f64,
    ) {
        let (ea, eb, n_max) = pair;
        let space = TruncatedSpace::new(n_max).unwrap();
        let a = random_state(space, &ea);
        let b = random_state(space, &eb);
        let gen = assemble(&p, space, ModelKind::Rabi).unwrap();
        let mix = Mat::from_fn(a.matrix().nrows(), a.matrix().ncols(), |i, j| {
            a.matrix()[(i, j)] * w + b.matrix()[(i, j)] * (1.0 - w)
        });
        let lhs = gen.apply(&mix);
        let la = gen.apply(a.matrix());
        let lb = gen.apply(b.matrix());
        let rhs = Mat::from_fn(lhs.nrows(), lhs.ncols(), |i, j| la[(i, j)] * w + lb[(i, j)] * (1.0 - w));
        prop_assert!(max_abs(&(&lhs - &rhs)) < 1e-13);
    }

    #[test]
    fn expectation_of_hermitian_operator_is_real(rho in state()) {
        use open_rabi_core::hilbert::expectation;
        use open_rabi_core::{AtomOp, FieldOp};
        let s = rho.space();
        for op in [
            s.field_operator(FieldOp::X),
            s.field_operator(FieldOp::P),
            s.field_operator(FieldOp::Number),
            s.atom_operator(AtomOp::Y),
            &s.field_operator(FieldOp::P) * &s.atom_operator(AtomOp::X),
        ] {
            prop_assert!(expectation(&rho, &op).unwrap().im.abs() < 1e-10);
        }
    }
}

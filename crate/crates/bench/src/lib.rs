// Copyright 2026 open-rabi Contributors
// SPDX-License-Identifier: Apache-2.0

//! Criterion benchmarks for the generator, steady-state and evolution kernels.
//! The benchmarks live in `benches/`; run them with `cargo bench -p open-rabi-bench`.

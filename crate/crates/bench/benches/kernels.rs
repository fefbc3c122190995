use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use rsos_bench::{chain, dense_state};
use rsos_core::ansatz::{EntanglerBlock, EulerRotation};
use rsos_core::anyon::build_hamiltonian;
use rsos_core::Boundary;

fn gates(c: &mut Criterion) {
    let one = EulerRotation::new(0.3, 1.1, -0.4).matrix();
    let two = EntanglerBlock::new(0.2, -0.5, 0.9).matrix();
    let mut group = c.benchmark_group("gates");
    for qubits in [12, 16, 20] {
        let mut state = dense_state(qubits);
        group.bench_with_input(BenchmarkId::new("apply_1q", qubits), &qubits, |b, &n| {
            b.iter(|| state.apply_1q(black_box(n / 2), &one))
        });
        group.bench_with_input(BenchmarkId::new("apply_2q", qubits), &qubits, |b, &n| {
            b.iter(|| state.apply_2q(black_box(n / 2), n / 2 + 1, &two))
        });
    }
    group.finish();
}

fn hamiltonian(c: &mut Criterion) {
    let mut group = c.benchmark_group("hamiltonian");
    for (p, qubits, boundary) in [(4, 12, Boundary::Open), (5, 12, Boundary::Periodic), (4, 18, Boundary::Open)] {
        let (cfg, _) = chain(p, qubits, boundary);
        let terms = build_hamiltonian(&cfg).unwrap();
        let state = dense_state(qubits);
        let id = format!("p{p}-{boundary:?}-{qubits}q");
        group.bench_function(BenchmarkId::new("apply_sum", &id), |b| {
            b.iter(|| black_box(state.apply_sum(&terms).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, gates, hamiltonian);
criterion_main!(benches);

//! Fixtures shared by the benchmarks.

use rsos_core::ansatz::AnsatzLayout;
use rsos_core::{Boundary, ChainConfig, Statevector};

/// Chain on `qubits` qubits with its `|2, 1, 2, 1, …⟩` start state.
pub fn chain(p: usize, qubits: usize, boundary: Boundary) -> (ChainConfig, Statevector) {
    let cfg = ChainConfig::from_qubits(p, qubits, boundary).expect("valid bench chain");
    let state = Statevector::alternating_21(cfg.sites, &cfg.encoding).expect("valid labels");
    (cfg, state)
}

/// Deterministic, non-degenerate angles for every parameter of `layout`.
pub fn angles(layout: &AnsatzLayout) -> Vec<f64> {
    (0..layout.parameter_count()).map(|k| (0.7 * k as f64 + 0.3).sin()).collect()
}

/// Normalized state with every amplitude populated.
pub fn dense_state(qubits: usize) -> Statevector {
    let layout = AnsatzLayout::new(qubits, 1).expect("even qubit count");
    let start = Statevector::basis(qubits, 0).expect("small register");
    rsos_core::ansatz::apply_ansatz(&angles(&layout), &layout, &start).expect("unitary circuit")
}

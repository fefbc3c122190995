//! RSOS anyonic chains on A_p Dynkin diagrams and their qubit encoding.

mod algebra;
mod chain;
mod dynkin;
mod encoding;
pub(crate) mod operator;
mod tci;

pub use algebra::{
    apply_y, build_braid, build_hamiltonian, build_shift, build_tl_qubit,
    max_commutator_with_hamiltonian, max_physical_commutator, measure_yu, minus_q_sqrt, verify_algebra, AlgebraReport,
    QubitPermutation, TopologicalSymmetry, DENSE_Y_MAX_QUBITS,
};
pub use chain::{Boundary, ChainConfig, ShiftDirection};
pub use dynkin::DynkinSpec;
pub use encoding::{SiteEncoding, MAX_SUPPORTED_P};
pub use operator::{LocalOperator, SparseOperator};
pub use tci::{
    build_tci_hamiltonian, build_tci_tl, tci_ground_energy, verify_tci_algebra, TciChain,
    TCI_DENSE_MAX_SITES,
};

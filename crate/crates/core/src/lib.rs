//! Variational simulation of RSOS anyonic chains on qubit registers.
//!
//! The crate embeds A_p restricted solid-on-solid chains into `n_p = ceil(log2 p)`
//! qubits per site, prepares their critical ground states with an Euler-Cartan
//! brick-wall circuit trained by ADAM, and measures parity profiles, site
//! occupations and the topological symmetry operator. An independent exact
//! diagonalization in the constrained RSOS basis provides reference energies.

pub mod ansatz;
pub mod anyon;
pub mod error;
pub mod observables;
pub mod oracle;
pub mod statevector;
pub mod vqe;

pub use anyon::{Boundary, ChainConfig, DynkinSpec, LocalOperator, SiteEncoding};
pub use error::{Error, Result};
pub use statevector::Statevector;
/// Version recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

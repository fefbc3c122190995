//! Euler–Cartan brick-wall ansatz.

pub mod circuit;
pub mod gates;
mod layout;
pub mod synthesis;

pub use circuit::{Circuit, Gate};
pub use gates::{EntanglerBlock, EulerRotation};
pub use layout::{apply_ansatz, AnsatzLayout, BondOrder, Slot};
pub use synthesis::{decompose_entangler, kak_full, KakDecomposition};

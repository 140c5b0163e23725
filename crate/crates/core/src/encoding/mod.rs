//! Divide-and-conquer amplitude loading.
//!
//! A probability vector of length `n = 2^k` becomes a binary tree of `n - 1`
//! rotation angles. Every tree node gets its own qubit and a single `RY`;
//! controlled-SWAP combine layers then merge sibling registers bottom-up, so
//! the root qubit followed by the leftmost descendants ends up holding
//! `Σ_i sqrt(p_i) |i⟩` (root = most significant bit). The remaining qubits
//! are left entangled and are ignored when decoding.

mod angles;
mod circuit;
mod loader;
mod resources;

pub use angles::{angle_tree, AngleTree};
pub use circuit::{CircuitDescription, Gate};
pub use loader::{build_loader, build_loader_with, combine, joint_loader, LoaderOptions};
pub use resources::{resource_report, ResourceReport};

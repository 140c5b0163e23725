//! Dense statevector execution of loader circuits, shot sampling and
//! Pauli-trajectory noise.
//!
//! Qubit 0 is the most significant bit of every basis index and of every
//! printed bitstring.

mod histogram;
mod noise;
mod sampling;
mod state;

pub use histogram::ShotHistogram;
pub use noise::{apply_noise, apply_noise_with, GateWeights, NoiseModel};
pub use sampling::{sample, sample_ideal, sample_ideal_with, sample_probs_with, sample_with};
pub use state::{simulate, simulate_with_cap, Pauli, StateVector, DEFAULT_QUBIT_CAP};

//! Hybrid quantum-classical Monte Carlo matched filtering.
//!
//! Data and template are offset to be nonnegative, amplitude-encoded with a
//! divide-and-conquer loader, and sampled jointly. Each joint outcome
//! `(template index b, data index d)` is relocated to lag `d - b`, and the
//! stacked probabilities are rescaled and offset-corrected into the
//! time-domain correlation `rho[j] = sum_i y[j + i] * x[i]`.
//!
//! Modules:
//! - [`matched`]: domain types, the classical oracle, offset preprocessing,
//!   the offset correction and the shot-noise precision model.
//! - [`encoding`]: angle trees and the controlled-SWAP loader circuit.
//! - [`simulator`]: dense statevector execution, shot sampling and noise.
//! - [`hybrid`]: segmentation, relocation, stitching and run comparison.
//! - [`sigproc`]: Welch PSD, low-pass decimation, whitening and synthesis.
//! - [`io`]: CSV and text formats shared by the CLI and the tests.
//! - [`cli`]: command implementations behind the `qmf` binary.

pub mod cli;
pub mod encoding;
mod error;
pub mod hybrid;
pub mod io;
pub mod matched;
pub mod numeric;
pub mod rng;
pub mod sigproc;
pub mod simulator;

pub use error::{Error, Result};

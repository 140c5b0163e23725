use crate::numeric;
use crate::{Error, Result};

/// Smallest register the loader accepts: one qubit.
pub const MIN_PADDED_LEN: usize = 2;

/// Offset, normalized and zero-padded probability vector ready for loading.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodedSegment {
    raw: Vec<f64>,
    offset: f64,
    norm: f64,
    probs: Vec<f64>,
}

impl EncodedSegment {
    /// Source values before shifting.
    pub fn raw(&self) -> &[f64] {
        &self.raw
    }

    /// The shift Δ added to every raw value.
    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Normalization 𝒩 = Σ (raw + Δ).
    pub fn norm(&self) -> f64 {
        self.norm
    }

    /// Probabilities, padded with exact zeros to `padded_len()`.
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.raw.len()
    }

    pub fn is_empty(&self) -> bool {
        self.raw.is_empty()
    }

    pub fn padded_len(&self) -> usize {
        self.probs.len()
    }

    /// Register width log2(padded_len).
    pub fn num_qubits(&self) -> usize {
        self.probs.len().trailing_zeros() as usize
    }
}

/// Shifts `values` by `Δ = margin - min(values)`, normalizes by the shifted
/// sum and pads to the next power of two (at least [`MIN_PADDED_LEN`]).
pub fn preprocess(values: &[f64], margin: f64) -> Result<EncodedSegment> {
    if values.is_empty() {
        return Err(Error::EmptySeries);
    }
    if let Some(index) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    if !(margin.is_finite() && margin >= 0.0) {
        return Err(Error::InvalidParameter(format!("margin must be finite and >= 0, got {margin}")));
    }
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let offset = margin - min;
    let shifted: Vec<f64> = values.iter().map(|v| (v + offset).max(0.0)).collect();
    let norm = numeric::sum(shifted.iter().copied());
    if norm.is_nan() || norm <= 0.0 {
        return Err(Error::ZeroNorm);
    }
    let padded_len = values.len().next_power_of_two().max(MIN_PADDED_LEN);
    let mut probs: Vec<f64> = shifted.iter().map(|s| s / norm).collect();
    probs.resize(padded_len, 0.0);
    Ok(EncodedSegment { raw: values.to_vec(), offset, norm, probs })
}

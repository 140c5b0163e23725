//! Shot-noise precision of the corrected estimator.
//!
//! The sampled quantity is the offset value `u[j] = rho[j] + c[j]`, whose
//! relocated count is binomial. Its relative spread is
//! `sqrt(Σ_{i≠j} u[i] / (u[j]·s·L))`; since the correction `c[j]` is exact,
//! the absolute error carries over to `rho[j]` unchanged, so
//! `δρ/ρ = sqrt(Σ_{i≠j} u[i] / (u[j]·s·L)) · (1 + c[j]/ρ[j])`.

use crate::numeric;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Precision {
    /// Absolute standard error δρ.
    pub sigma: f64,
    /// `δρ / |ρ|`; `None` where the true value is zero.
    pub relative: Option<f64>,
}

/// Precision for every lag of a run whose shots all land on one of the lags.
pub fn predict_precision(values: &[f64], shots_per_lag: f64, corrections: &[f64]) -> Result<Vec<Precision>> {
    predict_precision_with_discards(values, shots_per_lag, corrections, 0.0)
}

/// As [`predict_precision`], with `discarded_mass` (in the same units as
/// `u`) for outcomes the decoder throws away. Discards stay in the shot
/// denominator, so they widen every lag's binomial spread.
pub fn predict_precision_with_discards(
    values: &[f64],
    shots_per_lag: f64,
    corrections: &[f64],
    discarded_mass: f64,
) -> Result<Vec<Precision>> {
    if !(shots_per_lag.is_finite() && shots_per_lag > 0.0) {
        return Err(Error::InvalidParameter(format!("shot count must be positive, got {shots_per_lag}")));
    }
    if values.len() != corrections.len() {
        return Err(Error::InvalidParameter(format!(
            "{} values but {} corrections",
            values.len(),
            corrections.len()
        )));
    }
    if values.is_empty() {
        return Ok(Vec::new());
    }
    let uncorrected: Vec<f64> = values.iter().zip(corrections).map(|(r, c)| (r + c).max(0.0)).collect();
    let total = numeric::sum(uncorrected.iter().copied()) + discarded_mass.max(0.0);
    let total_shots = shots_per_lag * values.len() as f64;
    Ok(values
        .iter()
        .zip(&uncorrected)
        .map(|(&rho, &u)| {
            let others = (total - u).max(0.0);
            let sigma = (u * others / total_shots).sqrt();
            let relative = (rho != 0.0).then(|| sigma / rho.abs());
            Precision { sigma, relative }
        })
        .collect())
}

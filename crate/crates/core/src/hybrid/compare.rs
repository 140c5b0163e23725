use crate::matched::SnrSeries;
use crate::numeric;
use crate::{Error, Result};

/// Agreement between an estimate and a reference series.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub points: usize,
    /// Pearson correlation of estimate against truth; `None` if either is constant.
    pub correlation: Option<f64>,
    /// Pearson correlation of `estimate − truth` against truth. Reported as
    /// 0 with `error_correlation_defined = false` when the errors are constant.
    pub error_correlation: f64,
    pub error_correlation_defined: bool,
    pub max_abs_error: f64,
    pub rms_error: f64,
    pub mean_error: f64,
    /// `error / sigma` per point where a positive sigma is known.
    pub z_scores: Vec<Option<f64>>,
    pub peak_truth: f64,
    pub peak_estimate: f64,
}

impl ComparisonReport {
    /// Point-wise comparison of pooled values, e.g. many short runs.
    pub fn from_values(estimates: &[f64], truth: &[f64], sigmas: &[Option<f64>]) -> Result<Self> {
        if estimates.len() != truth.len() || sigmas.len() != truth.len() {
            return Err(Error::InvalidParameter(format!(
                "comparison needs equal lengths, got {} estimates, {} truth, {} sigmas",
                estimates.len(),
                truth.len(),
                sigmas.len()
            )));
        }
        if truth.is_empty() {
            return Err(Error::EmptySeries);
        }
        let errors: Vec<f64> = estimates.iter().zip(truth).map(|(e, t)| e - t).collect();
        let error_correlation = numeric::pearson(&errors, truth);
        let peak = |v: &[f64]| v.iter().copied().fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
        Ok(Self {
            points: truth.len(),
            correlation: numeric::pearson(estimates, truth),
            error_correlation: error_correlation.unwrap_or(0.0),
            error_correlation_defined: error_correlation.is_some(),
            max_abs_error: errors.iter().fold(0.0, |m, e| m.max(e.abs())),
            rms_error: (numeric::sum(errors.iter().map(|e| e * e)) / errors.len() as f64).sqrt(),
            mean_error: numeric::mean(&errors),
            z_scores: errors
                .iter()
                .zip(sigmas)
                .map(|(e, s)| s.filter(|s| *s > 0.0).map(|s| e / s))
                .collect(),
            peak_truth: peak(truth),
            peak_estimate: peak(estimates),
        })
    }

    pub fn summary(&self) -> String {
        let corr = self.correlation.map_or("undefined".to_string(), |c| format!("{c:.4}"));
        let ecorr = if self.error_correlation_defined {
            format!("{:.4}", self.error_correlation)
        } else {
            "undefined(0)".to_string()
        };
        format!(
            "points={} corr={} err_corr={} max_abs_err={:.4e} rms_err={:.4e} peak_truth={:.6} peak_est={:.6}",
            self.points, corr, ecorr, self.max_abs_error, self.rms_error, self.peak_truth, self.peak_estimate
        )
    }
}

pub fn compare_runs(estimates: &SnrSeries, truth: &SnrSeries) -> Result<ComparisonReport> {
    if estimates.len() != truth.len() {
        return Err(Error::LengthMismatch { template: estimates.len(), data: truth.len() });
    }
    ComparisonReport::from_values(&estimates.values(), &truth.values(), &estimates.sigmas())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matched::{Provenance, SeriesMeta};
    use rand::SeedableRng;
    use rand_distr::{Distribution, Normal};

    fn series(values: Vec<f64>) -> SnrSeries {
        let meta = SeriesMeta { provenance: Provenance::Oracle, shots: 0, seed: None, epoch: 0.0, sample_rate: 1.0 };
        SnrSeries::from_values(values, None, meta)
    }

    #[test]
    fn identical_series() {
        let t = series(vec![1.0, -2.0, 3.5, 0.2]);
        let r = compare_runs(&t, &t).unwrap();
        assert!((r.correlation.unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(r.error_correlation, 0.0);
        assert!(!r.error_correlation_defined);
        assert_eq!(r.max_abs_error, 0.0);
    }

    #[test]
    fn independent_noise_is_uncorrelated() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let normal = Normal::new(0.0, 1.0).unwrap();
        let truth: Vec<f64> = (0..5000).map(|_| normal.sample(&mut rng) * 3.0).collect();
        let est: Vec<f64> = truth.iter().map(|t| t + 0.5 * normal.sample(&mut rng)).collect();
        let r = compare_runs(&series(est), &series(truth)).unwrap();
        assert!(r.error_correlation.abs() < 0.06, "{}", r.error_correlation);
        assert!(r.correlation.unwrap() > 0.98);
    }

    #[test]
    fn proportional_damping_is_fully_anticorrelated() {
        let truth = vec![1.0, -2.0, 3.0, 0.5, -0.7];
        let est: Vec<f64> = truth.iter().map(|t| 0.9 * t).collect();
        let r = compare_runs(&series(est), &series(truth)).unwrap();
        assert!((r.error_correlation + 1.0).abs() < 1e-12);
        assert!((r.peak_estimate - 2.7).abs() < 1e-12);
    }

    #[test]
    fn z_scores_need_sigma() {
        let r = ComparisonReport::from_values(&[1.0, 2.0], &[0.5, 2.0], &[Some(0.25), None]).unwrap();
        assert_eq!(r.z_scores, vec![Some(2.0), None]);
    }

    #[test]
    fn length_mismatch() {
        assert!(compare_runs(&series(vec![1.0]), &series(vec![1.0, 2.0])).is_err());
    }
}

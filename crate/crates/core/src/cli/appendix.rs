use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::hybrid::{estimate_snr, plan_segments, Backend, ComparisonReport, HybridConfig, SegmentLength};
use crate::matched::{oracle_snr, TimeSeries};
use crate::{rng, Result};

/// Many short standard-normal datasets filtered with one fixed template.
#[derive(Debug, Clone, PartialEq)]
pub struct AppendixParams {
    pub template: Vec<f64>,
    pub datasets: usize,
    pub points: usize,
    pub margin: f64,
    pub shots: u64,
    pub seed: u64,
}

impl Default for AppendixParams {
    fn default() -> Self {
        Self { template: vec![2.0, -1.0], datasets: 100, points: 4, margin: 0.1, shots: 20_000, seed: 0 }
    }
}

/// Pooled per-lag results over all datasets.
#[derive(Debug, Clone, PartialEq)]
pub struct AppendixResult {
    pub dataset: Vec<usize>,
    pub lag: Vec<usize>,
    pub truth: Vec<f64>,
    pub estimate: Vec<f64>,
    pub sigma: Vec<Option<f64>>,
    pub report: ComparisonReport,
    /// `Σ|estimate| / Σ|truth|` at each dataset's largest-|truth| lag.
    pub peak_ratio: f64,
}

impl AppendixResult {
    pub fn errors(&self) -> Vec<f64> {
        self.estimate.iter().zip(&self.truth).map(|(e, t)| e - t).collect()
    }
}

/// Datasets depend only on `params.seed`, so every backend sees the same data.
pub fn appendix_c(params: &AppendixParams, backend: Backend) -> Result<AppendixResult> {
    let template = TimeSeries::from_values(params.template.clone())?;
    let mut master = rng::master(params.seed);
    let inputs: Vec<(Vec<f64>, u64)> = (0..params.datasets)
        .map(|_| {
            let values = (0..params.points).map(|_| master.sample(StandardNormal)).collect();
            (values, master.random())
        })
        .collect();
    let plan = plan_segments(
        params.points,
        params.template.len(),
        SegmentLength::Fixed(params.points),
        params.template.len(),
        params.shots,
    )?;
    let per_dataset = inputs
        .par_iter()
        .map(|(values, seed)| {
            let data = TimeSeries::from_values(values.clone())?;
            let truth = oracle_snr(&template, &data)?;
            let est = estimate_snr(&template, &data, &plan, &HybridConfig::new(backend, params.margin, *seed))?;
            Ok((truth, est))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut out = AppendixResult {
        dataset: Vec::new(),
        lag: Vec::new(),
        truth: Vec::new(),
        estimate: Vec::new(),
        sigma: Vec::new(),
        report: ComparisonReport::from_values(&[0.0], &[0.0], &[None])?,
        peak_ratio: 0.0,
    };
    let (mut peak_est, mut peak_truth) = (0.0, 0.0);
    for (d, (truth, est)) in per_dataset.iter().enumerate() {
        for (t, e) in truth.estimates().iter().zip(est.estimates()) {
            out.dataset.push(d);
            out.lag.push(t.lag);
            out.truth.push(t.value);
            out.estimate.push(e.value);
            out.sigma.push(e.sigma);
        }
        if let Some(p) = truth.peak() {
            peak_truth += p.value.abs();
            peak_est += est.estimates()[p.lag].value.abs();
        }
    }
    out.report = ComparisonReport::from_values(&out.estimate, &out.truth, &out.sigma)?;
    out.peak_ratio = if peak_truth > 0.0 { peak_est / peak_truth } else { 1.0 };
    Ok(out)
}

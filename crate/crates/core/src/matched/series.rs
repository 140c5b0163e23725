use std::fmt;
use std::str::FromStr;

use crate::{Error, Result};

/// Uniformly sampled real-valued series.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    samples: Vec<f64>,
    sample_rate: f64,
    epoch: f64,
}

impl TimeSeries {
    pub fn new(samples: Vec<f64>, sample_rate: f64, epoch: f64) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptySeries);
        }
        if !(sample_rate.is_finite() && sample_rate > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "sample rate must be positive, got {sample_rate}"
            )));
        }
        if !epoch.is_finite() {
            return Err(Error::InvalidParameter("epoch must be finite".into()));
        }
        if let Some(index) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { samples, sample_rate, epoch })
    }

    /// Unit-rate series starting at zero, handy for synthetic vectors.
    pub fn from_values(samples: Vec<f64>) -> Result<Self> {
        Self::new(samples, 1.0, 0.0)
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn epoch(&self) -> f64 {
        self.epoch
    }

    pub fn time_at(&self, index: usize) -> f64 {
        self.epoch + index as f64 / self.sample_rate
    }

    /// Copy of `samples[start..end]` with the epoch advanced accordingly.
    pub fn slice(&self, start: usize, end: usize) -> Result<Self> {
        if start >= end || end > self.len() {
            return Err(Error::InvalidParameter(format!(
                "slice {start}..{end} out of range for length {}",
                self.len()
            )));
        }
        Self::new(self.samples[start..end].to_vec(), self.sample_rate, self.time_at(start))
    }

    pub fn with_samples(&self, samples: Vec<f64>) -> Result<Self> {
        Self::new(samples, self.sample_rate, self.epoch)
    }
}

/// One lag of a matched-filter output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrEstimate {
    pub lag: usize,
    pub value: f64,
    pub sigma: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provenance {
    Oracle,
    /// Hybrid estimator evaluated with exact joint probabilities.
    HybridExact,
    /// Hybrid estimator sampling the product distribution directly.
    HybridIdeal,
    /// Hybrid estimator sampling simulated loader circuits.
    HybridSim,
    HybridNoisy,
}

impl Provenance {
    pub fn as_str(&self) -> &'static str {
        match self {
            Provenance::Oracle => "oracle",
            Provenance::HybridExact => "hybrid-exact",
            Provenance::HybridIdeal => "hybrid-ideal",
            Provenance::HybridSim => "hybrid-sim",
            Provenance::HybridNoisy => "hybrid-noisy",
        }
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Provenance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "oracle" => Provenance::Oracle,
            "hybrid-exact" => Provenance::HybridExact,
            "hybrid-ideal" => Provenance::HybridIdeal,
            "hybrid-sim" => Provenance::HybridSim,
            "hybrid-noisy" => Provenance::HybridNoisy,
            other => return Err(Error::InvalidParameter(format!("unknown provenance '{other}'"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesMeta {
    pub provenance: Provenance,
    /// Total shots spent across all runs; zero for oracle and exact results.
    pub shots: u64,
    pub seed: Option<u64>,
    /// Time of lag 0 and the lag spacing, inherited from the data series.
    pub epoch: f64,
    pub sample_rate: f64,
}

impl SeriesMeta {
    pub fn oracle(data: &TimeSeries) -> Self {
        Self {
            provenance: Provenance::Oracle,
            shots: 0,
            seed: None,
            epoch: data.epoch(),
            sample_rate: data.sample_rate(),
        }
    }
}

/// Matched-filter output, one estimate per lag starting at lag 0.
#[derive(Debug, Clone, PartialEq)]
pub struct SnrSeries {
    estimates: Vec<SnrEstimate>,
    meta: SeriesMeta,
}

impl SnrSeries {
    pub fn new(estimates: Vec<SnrEstimate>, meta: SeriesMeta) -> Result<Self> {
        if let Some((i, e)) = estimates.iter().enumerate().find(|(i, e)| e.lag != *i) {
            return Err(Error::InvalidParameter(format!(
                "lags must be contiguous from 0: position {i} holds lag {}",
                e.lag
            )));
        }
        Ok(Self { estimates, meta })
    }

    pub fn from_values(values: Vec<f64>, sigmas: Option<Vec<f64>>, meta: SeriesMeta) -> Self {
        let estimates = values
            .into_iter()
            .enumerate()
            .map(|(lag, value)| SnrEstimate {
                lag,
                value,
                sigma: sigmas.as_ref().map(|s| s[lag]),
            })
            .collect();
        Self { estimates, meta }
    }

    pub fn estimates(&self) -> &[SnrEstimate] {
        &self.estimates
    }

    pub fn meta(&self) -> &SeriesMeta {
        &self.meta
    }

    pub fn len(&self) -> usize {
        self.estimates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.estimates.is_empty()
    }

    pub fn values(&self) -> Vec<f64> {
        self.estimates.iter().map(|e| e.value).collect()
    }

    pub fn sigmas(&self) -> Vec<Option<f64>> {
        self.estimates.iter().map(|e| e.sigma).collect()
    }

    pub fn time_of(&self, lag: usize) -> f64 {
        self.meta.epoch + lag as f64 / self.meta.sample_rate
    }

    /// Lag with the largest |value|; ties go to the earliest lag.
    pub fn peak(&self) -> Option<SnrEstimate> {
        self.estimates
            .iter()
            .copied()
            .fold(None, |best: Option<SnrEstimate>, e| match best {
                Some(b) if b.value.abs() >= e.value.abs() => Some(b),
                _ => Some(e),
            })
    }
}

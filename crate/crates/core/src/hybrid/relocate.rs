use crate::matched::{EncodedSegment, MIN_PADDED_LEN};
use crate::simulator::ShotHistogram;
use crate::{Error, Result};

/// Maps a joint outcome (template index `b`, data index `d`) to lag
/// `d − b`, discarding padding indices and lags outside `0..=k_d − k_t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RelocationRule {
    k_t: usize,
    k_d: usize,
    template_bits: usize,
    data_bits: usize,
}

fn register_bits(len: usize) -> usize {
    len.next_power_of_two().max(MIN_PADDED_LEN).trailing_zeros() as usize
}

impl RelocationRule {
    pub fn new(k_t: usize, k_d: usize) -> Result<Self> {
        if k_t == 0 || k_t > k_d {
            return Err(Error::InfeasiblePlan(format!("cannot relocate k_t={k_t} onto k_d={k_d}")));
        }
        Ok(Self { k_t, k_d, template_bits: register_bits(k_t), data_bits: register_bits(k_d) })
    }

    pub fn for_segments(template: &EncodedSegment, data: &EncodedSegment) -> Result<Self> {
        Self::new(template.len(), data.len())
    }

    pub fn lags(&self) -> usize {
        self.k_d - self.k_t + 1
    }

    pub fn width(&self) -> usize {
        self.template_bits + self.data_bits
    }

    pub fn split(&self, outcome: u64) -> (usize, usize) {
        let d = outcome & ((1u64 << self.data_bits) - 1);
        ((outcome >> self.data_bits) as usize, d as usize)
    }

    pub fn lag_of(&self, template_index: usize, data_index: usize) -> Option<usize> {
        if template_index >= self.k_t || data_index >= self.k_d || data_index < template_index {
            return None;
        }
        let lag = data_index - template_index;
        (lag < self.lags()).then_some(lag)
    }
}

/// Per-lag stacked counts of one run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relocated {
    pub counts: Vec<u64>,
    pub kept: u64,
    pub discarded: u64,
    pub total_shots: u64,
}

impl Relocated {
    /// `count[j] / total_shots`, discards included in the denominator.
    pub fn joint_prob_sums(&self) -> Vec<f64> {
        let total = self.total_shots as f64;
        self.counts.iter().map(|c| *c as f64 / total).collect()
    }

    pub fn discarded_fraction(&self) -> f64 {
        self.discarded as f64 / self.total_shots as f64
    }
}

pub fn relocate(hist: &ShotHistogram, rule: &RelocationRule) -> Result<Relocated> {
    if hist.width() != rule.width() {
        return Err(Error::BitstringWidth { expected: rule.width(), found: hist.width() });
    }
    if hist.total_shots() == 0 {
        return Err(Error::InvalidParameter("histogram holds no shots".into()));
    }
    let mut counts = vec![0u64; rule.lags()];
    let mut discarded = 0;
    for (outcome, c) in hist.iter() {
        let (b, d) = rule.split(outcome);
        match rule.lag_of(b, d) {
            Some(j) => counts[j] += c,
            None => discarded += c,
        }
    }
    Ok(Relocated { kept: hist.total_shots() - discarded, counts, discarded, total_shots: hist.total_shots() })
}

use std::collections::BTreeMap;

use super::state::project_index;
use crate::{Error, Result};

/// Shot counts per measured bitstring. Outcome `o` on `width` bits prints
/// with qubit 0 first (most significant).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShotHistogram {
    width: usize,
    counts: BTreeMap<u64, u64>,
    total_shots: u64,
}

impl ShotHistogram {
    pub fn new(width: usize) -> Self {
        assert!(width <= 64, "bitstrings wider than 64 bits are not supported");
        Self { width, counts: BTreeMap::new(), total_shots: 0 }
    }

    pub fn from_counts(width: usize, counts: impl IntoIterator<Item = (u64, u64)>) -> Result<Self> {
        if width > 64 {
            return Err(Error::InvalidParameter(format!("bitstring width {width} exceeds 64")));
        }
        let mut h = Self::new(width);
        for (outcome, count) in counts {
            if width < 64 && outcome >> width != 0 {
                return Err(Error::BitstringWidth { expected: width, found: 64 - outcome.leading_zeros() as usize });
            }
            h.add(outcome, count);
        }
        Ok(h)
    }

    pub fn add(&mut self, outcome: u64, count: u64) {
        if count == 0 {
            return;
        }
        *self.counts.entry(outcome).or_insert(0) += count;
        self.total_shots += count;
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn total_shots(&self) -> u64 {
        self.total_shots
    }

    pub fn count(&self, outcome: u64) -> u64 {
        self.counts.get(&outcome).copied().unwrap_or(0)
    }

    /// Nonzero `(outcome, count)` pairs in ascending outcome order.
    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.counts.iter().map(|(o, c)| (*o, *c))
    }

    pub fn bitstring(&self, outcome: u64) -> String {
        if self.width == 0 {
            return String::new();
        }
        format!("{outcome:0width$b}", width = self.width)
    }

    pub fn parse_bitstring(&self, bits: &str) -> Result<u64> {
        if bits.len() != self.width {
            return Err(Error::BitstringWidth { expected: self.width, found: bits.len() });
        }
        if bits.is_empty() {
            return Ok(0);
        }
        u64::from_str_radix(bits, 2).map_err(|_| Error::InvalidParameter(format!("'{bits}' is not a bitstring")))
    }

    /// Keeps the bits of `register` (qubit indices of this histogram's
    /// width), in register order.
    pub fn project(&self, register: &[usize]) -> Result<ShotHistogram> {
        if let Some(q) = register.iter().find(|q| **q >= self.width) {
            return Err(Error::InvalidParameter(format!("qubit {q} outside {}-bit histogram", self.width)));
        }
        let masks: Vec<usize> = register.iter().map(|q| 1usize << (self.width - 1 - q)).collect();
        let mut out = ShotHistogram::new(register.len());
        for (outcome, count) in self.iter() {
            out.add(project_index(outcome as usize, &masks) as u64, count);
        }
        Ok(out)
    }

    pub fn merge(&mut self, other: &ShotHistogram) -> Result<()> {
        if other.width != self.width {
            return Err(Error::BitstringWidth { expected: self.width, found: other.width });
        }
        for (o, c) in other.iter() {
            self.add(o, c);
        }
        Ok(())
    }

    /// Counts for every outcome `0..2^width`.
    pub fn to_dense(&self) -> Vec<u64> {
        let mut v = vec![0; 1usize << self.width];
        for (o, c) in self.iter() {
            v[o as usize] = c;
        }
        v
    }
}

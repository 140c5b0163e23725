use std::fmt;
use std::str::FromStr;

use super::rfft_full;
use crate::matched::TimeSeries;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Window {
    /// Symmetric Hann, `0.5 − 0.5·cos(2πn/(M−1))`.
    #[default]
    Hann,
    Rectangular,
}

impl Window {
    pub fn coefficients(&self, len: usize) -> Vec<f64> {
        match self {
            Window::Rectangular => vec![1.0; len],
            Window::Hann if len == 1 => vec![1.0],
            Window::Hann => (0..len)
                .map(|i| 0.5 - 0.5 * (2.0 * std::f64::consts::PI * i as f64 / (len - 1) as f64).cos())
                .collect(),
        }
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Window::Hann => "hann",
            Window::Rectangular => "rectangular",
        })
    }
}

impl FromStr for Window {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hann" | "hanning" => Ok(Window::Hann),
            "rectangular" | "boxcar" | "none" => Ok(Window::Rectangular),
            other => Err(Error::InvalidParameter(format!("unknown window '{other}'"))),
        }
    }
}

/// One-sided power spectral density on a uniform grid `0..=fs/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct PsdEstimate {
    pub frequencies: Vec<f64>,
    pub power: Vec<f64>,
    pub segment_length: usize,
    pub window: Window,
}

impl PsdEstimate {
    pub fn new(frequencies: Vec<f64>, power: Vec<f64>, segment_length: usize, window: Window) -> Result<Self> {
        if frequencies.len() != power.len() || frequencies.len() < 2 {
            return Err(Error::InvalidParameter("PSD needs matching grids with at least two bins".into()));
        }
        if let Some(i) = power.iter().position(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::InvalidParameter(format!("PSD bin {i} is negative or non-finite")));
        }
        let df = frequencies[1] - frequencies[0];
        let uniform = frequencies[0] == 0.0
            && df > 0.0
            && frequencies.windows(2).all(|w| ((w[1] - w[0]) - df).abs() <= 1e-9 * df.max(1.0));
        if !uniform {
            return Err(Error::InvalidParameter("PSD frequency grid must be uniform from 0 Hz".into()));
        }
        Ok(Self { frequencies, power, segment_length, window })
    }

    pub fn resolution(&self) -> f64 {
        self.frequencies[1] - self.frequencies[0]
    }

    pub fn max_frequency(&self) -> f64 {
        *self.frequencies.last().expect("at least two bins")
    }

    /// Linear interpolation; `None` outside the grid.
    pub fn interpolate(&self, f: f64) -> Option<f64> {
        let f = f.abs();
        let pos = f / self.resolution();
        let i = pos.floor() as usize;
        if i + 1 >= self.power.len() {
            return (pos - (self.power.len() - 1) as f64 <= 1e-9).then(|| *self.power.last().unwrap());
        }
        let t = pos - i as f64;
        Some(self.power[i] * (1.0 - t) + self.power[i + 1] * t)
    }

    /// `Σ power · df`, which approximates the series variance.
    pub fn total_power(&self) -> f64 {
        self.power.iter().sum::<f64>() * self.resolution()
    }
}

/// Welch's averaged periodogram: non-detrended windowed segments of
/// `segment_length` samples starting every `segment_length − overlap`.
pub fn welch_psd(ts: &TimeSeries, segment_length: usize, window: Window, overlap: usize) -> Result<PsdEstimate> {
    if segment_length < 2 {
        return Err(Error::InvalidParameter("segment length must be at least 2".into()));
    }
    if segment_length > ts.len() {
        return Err(Error::InvalidParameter(format!(
            "series of {} samples is shorter than one segment of {segment_length}",
            ts.len()
        )));
    }
    if overlap >= segment_length {
        return Err(Error::InvalidParameter("overlap must be smaller than the segment length".into()));
    }
    let fs = ts.sample_rate();
    let w = window.coefficients(segment_length);
    let w_energy: f64 = w.iter().map(|v| v * v).sum();
    let step = segment_length - overlap;
    let bins = segment_length / 2 + 1;
    let mut acc = vec![0.0; bins];
    let mut count = 0usize;
    let x = ts.samples();
    let mut start = 0;
    while start + segment_length <= x.len() {
        let seg: Vec<f64> = x[start..start + segment_length].iter().zip(&w).map(|(v, c)| v * c).collect();
        for (a, c) in acc.iter_mut().zip(rfft_full(&seg)) {
            *a += c.norm_sqr();
        }
        count += 1;
        start += step;
    }
    let scale = 1.0 / (fs * w_energy * count as f64);
    let nyquist_bin = segment_length.is_multiple_of(2).then_some(bins - 1);
    let power = acc
        .iter()
        .enumerate()
        .map(|(k, a)| {
            let one_sided = if k == 0 || Some(k) == nyquist_bin { 1.0 } else { 2.0 };
            a * scale * one_sided
        })
        .collect();
    let frequencies = (0..bins).map(|k| k as f64 * fs / segment_length as f64).collect();
    PsdEstimate::new(frequencies, power, segment_length, window)
}

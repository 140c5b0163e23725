use rand_distr::{Distribution, StandardNormal};

use super::{irfft_full, rfft_full, tukey, PsdEstimate};
use crate::matched::TimeSeries;
use crate::{rng, Error, Result};

/// Linear-sweep sinusoid with a Tukey envelope.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChirpSpec {
    pub f_start: f64,
    pub f_end: f64,
    pub duration: f64,
    pub amplitude: f64,
    pub taper_fraction: f64,
}

impl ChirpSpec {
    pub fn new(f_start: f64, f_end: f64, duration: f64, amplitude: f64) -> Self {
        Self { f_start, f_end, duration, amplitude, taper_fraction: 0.2 }
    }

    pub fn validate(&self, rate: f64) -> Result<()> {
        if !(self.f_start > 0.0 && self.f_start <= self.f_end && self.f_end < rate / 2.0) {
            return Err(Error::InvalidParameter(format!(
                "chirp band {}..{} Hz must satisfy 0 < start <= end < {} Hz",
                self.f_start,
                self.f_end,
                rate / 2.0
            )));
        }
        if !(self.duration.is_finite() && self.duration > 0.0) {
            return Err(Error::InvalidParameter("chirp duration must be positive".into()));
        }
        if !self.amplitude.is_finite() || !(0.0..=1.0).contains(&self.taper_fraction) {
            return Err(Error::InvalidParameter("chirp amplitude or taper out of range".into()));
        }
        Ok(())
    }
}

pub fn synth_chirp(spec: &ChirpSpec, rate: f64) -> Result<TimeSeries> {
    if !(rate.is_finite() && rate > 0.0) {
        return Err(Error::InvalidParameter(format!("sample rate must be positive, got {rate}")));
    }
    spec.validate(rate)?;
    let n = ((spec.duration * rate).round() as usize).max(1);
    let sweep = (spec.f_end - spec.f_start) / spec.duration;
    let envelope = tukey(n, spec.taper_fraction);
    let samples = (0..n)
        .map(|i| {
            let t = i as f64 / rate;
            let phase = 2.0 * std::f64::consts::PI * (spec.f_start * t + 0.5 * sweep * t * t);
            spec.amplitude * envelope[i] * phase.sin()
        })
        .collect();
    TimeSeries::new(samples, rate, 0.0)
}

/// Target spectrum for [`synth_noise`].
#[derive(Debug, Clone, PartialEq)]
pub enum NoiseSpectrum {
    White { sigma: f64 },
    /// `S(f) = level · (f_knee / max(f, f_knee))^exponent`.
    PowerLaw { level: f64, exponent: f64, f_knee: f64 },
    Psd(PsdEstimate),
}

impl NoiseSpectrum {
    fn density(&self, f: f64) -> Result<f64> {
        match self {
            NoiseSpectrum::White { sigma } => Ok(2.0 * sigma * sigma),
            NoiseSpectrum::PowerLaw { level, exponent, f_knee } => Ok(level * (f_knee / f.abs().max(*f_knee)).powf(*exponent)),
            NoiseSpectrum::Psd(psd) => psd
                .interpolate(f)
                .ok_or_else(|| Error::InvalidParameter(format!("PSD does not reach {f} Hz"))),
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match self {
            NoiseSpectrum::White { sigma } => sigma.is_finite() && *sigma >= 0.0,
            NoiseSpectrum::PowerLaw { level, exponent, f_knee } => {
                level.is_finite() && *level >= 0.0 && exponent.is_finite() && *f_knee > 0.0
            }
            NoiseSpectrum::Psd(_) => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("invalid noise spectrum {self:?}")))
        }
    }
}

/// Gaussian noise with the requested one-sided spectrum. Colored spectra are
/// shaped from white noise over one circular transform.
pub fn synth_noise(spectrum: &NoiseSpectrum, rate: f64, len: usize, seed: u64) -> Result<TimeSeries> {
    if len == 0 {
        return Err(Error::EmptySeries);
    }
    if !(rate.is_finite() && rate > 0.0) {
        return Err(Error::InvalidParameter(format!("sample rate must be positive, got {rate}")));
    }
    spectrum.validate()?;
    let mut rng = rng::master(seed);
    let white: Vec<f64> = (0..len).map(|_| StandardNormal.sample(&mut rng)).collect();
    if let NoiseSpectrum::White { sigma } = spectrum {
        return TimeSeries::new(white.into_iter().map(|v| v * sigma).collect(), rate, 0.0);
    }
    let mut spec = rfft_full(&white);
    for (k, c) in spec.iter_mut().enumerate() {
        let f = super::bin_frequency(k, len, rate);
        *c *= (spectrum.density(f)? * rate / 2.0).sqrt();
    }
    TimeSeries::new(irfft_full(spec), rate, 0.0)
}

/// `data + scale · signal` with the signal starting at sample `at`.
pub fn inject(data: &TimeSeries, signal: &TimeSeries, at: usize, scale: f64) -> Result<TimeSeries> {
    crate::matched::check_compatible(signal, data)?;
    if at + signal.len() > data.len() {
        return Err(Error::InvalidParameter(format!(
            "signal of {} samples at index {at} overruns data of {}",
            signal.len(),
            data.len()
        )));
    }
    let mut out = data.samples().to_vec();
    for (o, s) in out[at..].iter_mut().zip(signal.samples()) {
        *o += scale * s;
    }
    data.with_samples(out)
}

use num_complex::Complex64;

use super::{bin_frequency, irfft_full, rfft_full};
use crate::matched::TimeSeries;
use crate::{Error, Result};

/// Ideal low-pass: zero every bin above `cutoff_hz`, then keep every
/// `sample_rate / out_rate`-th sample.
pub fn lowpass_downsample(ts: &TimeSeries, cutoff_hz: f64, out_rate: f64) -> Result<TimeSeries> {
    let fs = ts.sample_rate();
    if !(out_rate.is_finite() && out_rate > 0.0 && out_rate <= fs) {
        return Err(Error::InvalidParameter(format!("output rate {out_rate} must be in (0, {fs}]")));
    }
    let ratio = fs / out_rate;
    let factor = ratio.round();
    if (ratio - factor).abs() > 1e-9 * ratio {
        return Err(Error::InvalidParameter(format!("output rate {out_rate} does not divide {fs}")));
    }
    if !(cutoff_hz.is_finite() && cutoff_hz > 0.0 && cutoff_hz < fs / 2.0 && cutoff_hz <= out_rate / 2.0) {
        return Err(Error::InvalidParameter(format!(
            "cutoff {cutoff_hz} Hz must be positive, below {} Hz and at most {} Hz",
            fs / 2.0,
            out_rate / 2.0
        )));
    }
    let factor = factor as usize;
    let n = ts.len();
    let mut spectrum = rfft_full(ts.samples());
    for (k, c) in spectrum.iter_mut().enumerate() {
        if bin_frequency(k, n, fs).abs() > cutoff_hz {
            *c = Complex64::new(0.0, 0.0);
        }
    }
    let filtered = irfft_full(spectrum);
    let decimated: Vec<f64> = filtered.into_iter().step_by(factor).collect();
    TimeSeries::new(decimated, out_rate, ts.epoch())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sines(rate: f64, n: usize, parts: &[(f64, f64)]) -> TimeSeries {
        let v = (0..n)
            .map(|i| {
                let t = i as f64 / rate;
                parts.iter().map(|(a, f)| a * (2.0 * PI * f * t).sin()).sum()
            })
            .collect();
        TimeSeries::new(v, rate, 0.0).unwrap()
    }

    #[test]
    fn passband_sine_amplitude_kept() {
        let ts = sines(4000.0, 8000, &[(1.0, 50.0), (0.5, 700.0)]);
        let out = lowpass_downsample(&ts, 99.98, 200.0).unwrap();
        assert_eq!(out.len(), 400);
        assert_eq!(out.sample_rate(), 200.0);
        let amp = (2.0 * crate::numeric::variance(out.samples())).sqrt();
        assert!((amp - 1.0).abs() < 0.01, "{amp}");
    }

    #[test]
    fn band_limited_matches_decimation() {
        let ts = sines(1000.0, 2000, &[(1.0, 10.0), (0.3, 42.5), (2.0, 80.0)]);
        let out = lowpass_downsample(&ts, 99.98, 200.0).unwrap();
        for (i, v) in out.samples().iter().enumerate() {
            assert!((v - ts.samples()[5 * i]).abs() < 1e-9);
        }
    }

    #[test]
    fn nothing_above_cutoff() {
        let noise = crate::sigproc::synth_noise(&crate::sigproc::NoiseSpectrum::White { sigma: 1.0 }, 800.0, 4096, 5).unwrap();
        let out = lowpass_downsample(&noise, 60.0, 200.0).unwrap();
        let spec = rfft_full(out.samples());
        let total: f64 = spec.iter().map(|c| c.norm_sqr()).sum();
        let above: f64 = spec
            .iter()
            .enumerate()
            .filter(|(k, _)| bin_frequency(*k, out.len(), 200.0).abs() > 60.0)
            .map(|(_, c)| c.norm_sqr())
            .sum();
        assert!(above / total < 1e-20);
    }

    #[test]
    fn zero_in_zero_out() {
        let ts = TimeSeries::new(vec![0.0; 400], 400.0, 1.0).unwrap();
        let out = lowpass_downsample(&ts, 99.0, 200.0).unwrap();
        assert!(out.samples().iter().all(|v| *v == 0.0));
        assert_eq!(out.epoch(), 1.0);
    }

    #[test]
    fn invalid_rates() {
        let ts = TimeSeries::new(vec![0.0; 400], 400.0, 0.0).unwrap();
        assert!(lowpass_downsample(&ts, 99.0, 300.0).is_err());
        assert!(lowpass_downsample(&ts, 150.0, 200.0).is_err());
        assert!(lowpass_downsample(&ts, 50.0, 800.0).is_err());
        assert!(lowpass_downsample(&ts, 0.0, 200.0).is_err());
    }
}

//! Signal conditioning and synthesis for desk-scale strain-like data.
//!
//! Spectra are one-sided densities: white noise of variance σ² sampled at
//! `fs` has a flat PSD of `2σ²/fs`.

mod filter;
mod synth;
mod welch;
mod whiten;

pub use filter::lowpass_downsample;
pub use synth::{inject, synth_chirp, synth_noise, ChirpSpec, NoiseSpectrum};
pub use welch::{welch_psd, PsdEstimate, Window};
pub use whiten::{whiten, whiten_with, WhitenOptions};

use num_complex::Complex64;
use rustfft::FftPlanner;

/// Forward FFT of a real series.
pub(crate) fn rfft_full(values: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = values.iter().map(|v| Complex64::new(*v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(buf.len()).process(&mut buf);
    buf
}

/// Inverse FFT, normalized, keeping the real part.
pub(crate) fn irfft_full(mut spectrum: Vec<Complex64>) -> Vec<f64> {
    let n = spectrum.len();
    FftPlanner::new().plan_fft_inverse(n).process(&mut spectrum);
    spectrum.into_iter().map(|c| c.re / n as f64).collect()
}

/// Frequency in Hz of FFT bin `k` for an `n`-point transform (negative above Nyquist).
pub(crate) fn bin_frequency(k: usize, n: usize, rate: f64) -> f64 {
    let k = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
    k * rate / n as f64
}

/// Tukey window with cosine tapers covering `fraction` of the length in total.
pub(crate) fn tukey(n: usize, fraction: f64) -> Vec<f64> {
    let taper = ((fraction.clamp(0.0, 1.0) * n as f64) / 2.0).floor() as usize;
    (0..n)
        .map(|i| {
            let edge = i.min(n - 1 - i);
            if taper == 0 || edge >= taper {
                1.0
            } else {
                0.5 * (1.0 - (std::f64::consts::PI * (edge as f64 + 0.5) / taper as f64).cos())
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fft_round_trip() {
        let v = vec![1.0, -2.0, 0.5, 3.0, 0.0, 1.5, -0.25];
        let back = irfft_full(rfft_full(&v));
        for (a, b) in v.iter().zip(&back) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn tukey_shape() {
        let w = tukey(16, 0.5);
        assert!(w[0] < 0.2 && w[15] < 0.2);
        assert_eq!(w[8], 1.0);
        assert!(tukey(8, 0.0).iter().all(|v| *v == 1.0));
        assert!((w[1] - w[14]).abs() < 1e-15);
    }

    #[test]
    fn bin_frequencies_wrap() {
        assert_eq!(bin_frequency(1, 8, 8.0), 1.0);
        assert_eq!(bin_frequency(4, 8, 8.0), 4.0);
        assert_eq!(bin_frequency(7, 8, 8.0), -1.0);
    }
}

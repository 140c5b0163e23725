use super::{irfft_full, rfft_full, tukey, PsdEstimate};
use crate::matched::TimeSeries;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WhitenOptions {
    /// Fraction of the series covered by the cosine tapers, split over both ends.
    pub taper_fraction: f64,
}

impl Default for WhitenOptions {
    fn default() -> Self {
        Self { taper_fraction: 0.125 }
    }
}

/// Scale each frequency bin by `1/sqrt(S(f)·fs/2)` so noise matching `psd`
/// comes out with unit variance.
pub fn whiten(ts: &TimeSeries, psd: &PsdEstimate) -> Result<TimeSeries> {
    whiten_with(ts, psd, WhitenOptions::default())
}

pub fn whiten_with(ts: &TimeSeries, psd: &PsdEstimate, options: WhitenOptions) -> Result<TimeSeries> {
    let fs = ts.sample_rate();
    let n = ts.len();
    if psd.max_frequency() < fs / 2.0 * (1.0 - 1e-9) {
        return Err(Error::InvalidParameter(format!(
            "PSD reaches {} Hz but the series needs {} Hz",
            psd.max_frequency(),
            fs / 2.0
        )));
    }
    let half = n / 2;
    let weight_at = |k: usize| -> Result<f64> {
        let f = k as f64 * fs / n as f64;
        let s = psd.interpolate(f).unwrap_or(0.0);
        if s.is_nan() || s <= 0.0 {
            return Err(Error::InvalidParameter(format!("PSD is not positive at {f} Hz")));
        }
        Ok(1.0 / (s * fs / 2.0).sqrt())
    };
    let mut weights = Vec::with_capacity(half + 1);
    for k in 0..=half {
        let edge = k == 0 || (n.is_multiple_of(2) && k == half);
        let interior = if !edge || half < 2 {
            k
        } else if k == 0 {
            1
        } else {
            half - 1
        };
        weights.push(weight_at(interior)?);
    }
    let window = tukey(n, options.taper_fraction);
    let tapered: Vec<f64> = ts.samples().iter().zip(&window).map(|(v, w)| v * w).collect();
    let mut spectrum = rfft_full(&tapered);
    for (k, c) in spectrum.iter_mut().enumerate() {
        let mirrored = if k <= half { k } else { n - k };
        *c *= weights[mirrored];
    }
    ts.with_samples(irfft_full(spectrum))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sigproc::{synth_noise, welch_psd, NoiseSpectrum, Window};

    fn flat(level: f64, fs: f64, seg: usize) -> PsdEstimate {
        let bins = seg / 2 + 1;
        PsdEstimate::new(
            (0..bins).map(|k| k as f64 * fs / seg as f64).collect(),
            vec![level; bins],
            seg,
            Window::Hann,
        )
        .unwrap()
    }

    fn interior(v: &[f64]) -> &[f64] {
        &v[v.len() / 8..v.len() - v.len() / 8]
    }

    #[test]
    fn white_with_matching_psd_has_unit_variance() {
        let fs = 200.0;
        let ts = synth_noise(&NoiseSpectrum::White { sigma: 3.0 }, fs, 1 << 15, 11).unwrap();
        let out = whiten(&ts, &flat(2.0 * 9.0 / fs, fs, 512)).unwrap();
        let var = crate::numeric::variance(interior(out.samples()));
        assert!((var - 1.0).abs() < 0.1, "{var}");
    }

    #[test]
    fn unit_flat_psd_is_a_constant_gain() {
        let ts = TimeSeries::new(vec![1.0, -2.0, 0.5, 4.0, 0.0, -1.0, 3.0], 1.0, 0.0).unwrap();
        let out = whiten_with(&ts, &flat(1.0, 1.0, 8), WhitenOptions { taper_fraction: 0.0 }).unwrap();
        let gain = out.samples()[0] / ts.samples()[0];
        assert!((gain - 2f64.sqrt()).abs() < 1e-12);
        for (a, b) in ts.samples().iter().zip(out.samples()) {
            assert!((a * gain - b).abs() < 1e-12);
        }
    }

    #[test]
    fn colored_noise_round_trip_is_flat() {
        let fs = 256.0;
        let spectrum = NoiseSpectrum::PowerLaw { level: 1e-2, exponent: 2.0, f_knee: 2.0 };
        let ts = synth_noise(&spectrum, fs, 1 << 17, 21).unwrap();
        let psd = welch_psd(&ts, 512, Window::Hann, 0).unwrap();
        let out = whiten(&ts, &psd).unwrap();
        let inner = interior(out.samples());
        let check = welch_psd(&TimeSeries::new(inner.to_vec(), fs, 0.0).unwrap(), 512, Window::Hann, 0).unwrap();
        let expected = 2.0 / fs;
        let mut lo = 1.0;
        while lo * 2.0 <= fs / 2.0 {
            let band: Vec<f64> = check
                .frequencies
                .iter()
                .zip(&check.power)
                .filter(|(f, _)| **f >= lo && **f < lo * 2.0)
                .map(|(_, p)| *p)
                .collect();
            let mean = band.iter().sum::<f64>() / band.len() as f64;
            assert!((mean / expected - 1.0).abs() < 0.25, "octave {lo} Hz: {}", mean / expected);
            lo *= 2.0;
        }
    }

    #[test]
    fn rejects_non_positive_psd() {
        let ts = TimeSeries::new(vec![1.0; 64], 8.0, 0.0).unwrap();
        let mut bad = flat(1.0, 8.0, 16);
        bad.power[3] = 0.0;
        assert!(whiten(&ts, &bad).is_err());
        assert!(whiten(&ts, &flat(1.0, 4.0, 16)).is_err());
    }

    #[test]
    fn edge_bins_take_interior_weight() {
        let mut psd = flat(1.0, 1.0, 8);
        psd.power[0] = 1e-30;
        psd.power[4] = 1e-30;
        let ts = TimeSeries::new(vec![1.0; 8], 1.0, 0.0).unwrap();
        let out = whiten_with(&ts, &psd, WhitenOptions { taper_fraction: 0.0 }).unwrap();
        assert!(out.samples().iter().all(|v| v.abs() < 10.0));
    }
}

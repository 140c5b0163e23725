use super::series::{SeriesMeta, SnrSeries, TimeSeries};
use crate::numeric::CompensatedSum;
use crate::{Error, Result};

/// Time-domain matched filter: `rho[j] = sum_i data[j + i] * template[i]`
/// for `j` in `0..=L - N`.
pub fn oracle_snr(template: &TimeSeries, data: &TimeSeries) -> Result<SnrSeries> {
    check_compatible(template, data)?;
    let values = correlate(template.samples(), data.samples());
    Ok(SnrSeries::from_values(values, None, SeriesMeta::oracle(data)))
}

pub(crate) fn check_compatible(template: &TimeSeries, data: &TimeSeries) -> Result<()> {
    if template.len() > data.len() {
        return Err(Error::LengthMismatch { template: template.len(), data: data.len() });
    }
    let (rt, rd) = (template.sample_rate(), data.sample_rate());
    if (rt - rd).abs() > 1e-9 * rt.max(rd) {
        return Err(Error::SampleRateMismatch { template: rt, data: rd });
    }
    Ok(())
}

/// Valid-mode cross-correlation; callers guarantee `template.len() <= data.len()`.
pub(crate) fn correlate(template: &[f64], data: &[f64]) -> Vec<f64> {
    let n = template.len();
    (0..=data.len() - n)
        .map(|j| {
            data[j..j + n]
                .iter()
                .zip(template)
                .map(|(y, x)| y * x)
                .collect::<CompensatedSum>()
                .value()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ts(v: &[f64]) -> TimeSeries {
        TimeSeries::from_values(v.to_vec()).unwrap()
    }

    #[test]
    fn hand_evaluated_examples() {
        assert_eq!(oracle_snr(&ts(&[2.0, -1.0]), &ts(&[1.0, 2.0, 3.0, 4.0])).unwrap().values(), [0.0, 1.0, 2.0]);
        assert_eq!(oracle_snr(&ts(&[1.0]), &ts(&[5.0, -3.0, 7.0])).unwrap().values(), [5.0, -3.0, 7.0]);
        assert_eq!(oracle_snr(&ts(&[2.0, -1.0]), &ts(&[2.0, -1.0])).unwrap().values(), [5.0]);
    }

    #[test]
    fn oracle_has_no_sigma() {
        let s = oracle_snr(&ts(&[1.0]), &ts(&[1.0, 2.0])).unwrap();
        assert!(s.sigmas().iter().all(Option::is_none));
    }

    #[test]
    fn errors() {
        assert_eq!(
            oracle_snr(&ts(&[1.0, 2.0, 3.0]), &ts(&[1.0])),
            Err(Error::LengthMismatch { template: 3, data: 1 })
        );
        let a = TimeSeries::new(vec![1.0], 100.0, 0.0).unwrap();
        let b = TimeSeries::new(vec![1.0, 2.0], 200.0, 0.0).unwrap();
        assert!(matches!(oracle_snr(&a, &b), Err(Error::SampleRateMismatch { .. })));
    }

    proptest! {
        #[test]
        fn linear_in_template(
            x in prop::collection::vec(-10.0f64..10.0, 1..6),
            extra in prop::collection::vec(-10.0f64..10.0, 0..10),
            alpha in -5.0f64..5.0,
        ) {
            let mut y = x.iter().map(|v| v * 0.5 + 1.0).collect::<Vec<_>>();
            y.extend(extra);
            let base = correlate(&x, &y);
            let scaled_x: Vec<f64> = x.iter().map(|v| alpha * v).collect();
            let scaled = correlate(&scaled_x, &y);
            for (s, b) in scaled.iter().zip(&base) {
                prop_assert!((s - alpha * b).abs() <= 1e-9 * (1.0 + b.abs() * alpha.abs()));
            }
        }

        #[test]
        fn appending_data_adds_one_lag(
            x in prop::collection::vec(-10.0f64..10.0, 1..5),
            y in prop::collection::vec(-10.0f64..10.0, 5..12),
            next in -10.0f64..10.0,
        ) {
            let before = correlate(&x, &y);
            let mut longer = y.clone();
            longer.push(next);
            let after = correlate(&x, &longer);
            prop_assert_eq!(after.len(), before.len() + 1);
            prop_assert_eq!(&after[..before.len()], &before[..]);
        }
    }
}

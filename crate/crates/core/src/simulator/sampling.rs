use rand::Rng;
use rand_distr::{Binomial, Distribution};

use super::histogram::ShotHistogram;
use super::state::StateVector;
use crate::matched::EncodedSegment;
use crate::rng;
use crate::{Error, Result};

/// Multinomial draw of `shots` over `probs` by sequential conditional
/// binomials. `probs` need not be exactly normalized.
pub fn sample_probs_with<R: Rng + ?Sized>(probs: &[f64], shots: u64, rng: &mut R) -> Vec<u64> {
    let mut counts = vec![0u64; probs.len()];
    let Some(last) = probs.iter().rposition(|p| *p > 0.0) else {
        return counts;
    };
    let mut remaining_shots = shots;
    let mut remaining_mass: f64 = probs.iter().map(|p| p.max(0.0)).sum();
    for (i, &p) in probs.iter().enumerate().take(last + 1) {
        if remaining_shots == 0 {
            break;
        }
        let p = p.max(0.0);
        let c = if i == last {
            remaining_shots
        } else {
            let q = (p / remaining_mass).clamp(0.0, 1.0);
            if q == 0.0 {
                0
            } else {
                Binomial::new(remaining_shots, q).expect("probability in [0, 1]").sample(rng)
            }
        };
        counts[i] = c;
        remaining_shots -= c;
        remaining_mass -= p;
    }
    counts
}

fn check_shots(shots: u64) -> Result<()> {
    if shots == 0 {
        return Err(Error::InvalidParameter("shot count must be positive".into()));
    }
    Ok(())
}

pub fn sample_with<R: Rng + ?Sized>(state: &StateVector, shots: u64, rng: &mut R) -> ShotHistogram {
    let counts = sample_probs_with(&state.probabilities(), shots, rng);
    let mut h = ShotHistogram::new(state.num_qubits());
    for (o, c) in counts.into_iter().enumerate() {
        h.add(o as u64, c);
    }
    h
}

/// Measures every qubit of `state` `shots` times.
pub fn sample(state: &StateVector, shots: u64, seed: u64) -> Result<ShotHistogram> {
    check_shots(shots)?;
    Ok(sample_with(state, shots, &mut rng::master(seed)))
}

/// Draws joint `(template, data)` outcomes straight from the product of the
/// two probability vectors, skipping circuit simulation. The outcome is the
/// template index in the high bits followed by the data index, matching the
/// output register of [`crate::encoding::joint_loader`].
pub fn sample_ideal_with<R: Rng + ?Sized>(
    template: &EncodedSegment,
    data: &EncodedSegment,
    shots: u64,
    rng: &mut R,
) -> ShotHistogram {
    let data_bits = data.num_qubits();
    let mut h = ShotHistogram::new(template.num_qubits() + data_bits);
    let template_counts = sample_probs_with(template.probs(), shots, rng);
    for (b, &n_b) in template_counts.iter().enumerate() {
        if n_b == 0 {
            continue;
        }
        for (d, c) in sample_probs_with(data.probs(), n_b, rng).into_iter().enumerate() {
            h.add(((b as u64) << data_bits) | d as u64, c);
        }
    }
    h
}

pub fn sample_ideal(template: &EncodedSegment, data: &EncodedSegment, shots: u64, seed: u64) -> Result<ShotHistogram> {
    check_shots(shots)?;
    Ok(sample_ideal_with(template, data, shots, &mut rng::master(seed)))
}

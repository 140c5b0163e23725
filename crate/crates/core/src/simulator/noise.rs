use std::collections::HashMap;

use rand::Rng;

use super::histogram::ShotHistogram;
use super::state::{simulate, Pauli, StateVector};
use crate::encoding::{CircuitDescription, Gate};
use crate::rng;
use crate::{Error, Result};

/// CNOT-equivalents charged per multi-qubit gate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateWeights {
    pub cnot: f64,
    pub cswap: f64,
}

impl Default for GateWeights {
    fn default() -> Self {
        Self { cnot: 1.0, cswap: 8.0 }
    }
}

impl GateWeights {
    pub fn weight(&self, gate: &Gate) -> f64 {
        match gate {
            Gate::Cnot { .. } => self.cnot,
            Gate::Cswap { .. } => self.cswap,
            Gate::Ry { .. } | Gate::X { .. } => 0.0,
        }
    }
}

/// Depolarizing faults after multi-qubit gates plus independent readout
/// bit flips.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    /// Fault probability per CNOT-equivalent.
    pub p_two_qubit: f64,
    /// Flip probability per measured bit.
    pub p_readout: f64,
    pub gate_weights: GateWeights,
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self::noiseless()
    }
}

impl NoiseModel {
    pub fn new(p_two_qubit: f64, p_readout: f64) -> Result<Self> {
        let model = Self { p_two_qubit, p_readout, gate_weights: GateWeights::default() };
        model.validate()?;
        Ok(model)
    }

    pub fn noiseless() -> Self {
        Self { p_two_qubit: 0.0, p_readout: 0.0, gate_weights: GateWeights::default() }
    }

    /// Spreads a total gate-fault probability over the circuit's
    /// CNOT-equivalents and a total readout error over its output bits.
    pub fn from_totals(circuit: &CircuitDescription, total_gate: f64, total_readout: f64) -> Result<Self> {
        let weights = GateWeights::default();
        let cnot_equivalents: f64 = circuit.gates().iter().map(|g| weights.weight(g)).sum();
        let bits = circuit.output_register().len().max(1) as f64;
        let p_two_qubit = if cnot_equivalents > 0.0 { total_gate / cnot_equivalents } else { 0.0 };
        Self::new(p_two_qubit, total_readout / bits)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in [("p_two_qubit", self.p_two_qubit), ("p_readout", self.p_readout)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidParameter(format!("{name} must lie in [0, 1], got {p}")));
            }
        }
        let GateWeights { cnot, cswap } = self.gate_weights;
        if !(cnot >= 0.0 && cswap >= 0.0 && cnot.is_finite() && cswap.is_finite()) {
            return Err(Error::InvalidParameter("gate weights must be finite and nonnegative".into()));
        }
        Ok(())
    }

    pub fn is_noiseless(&self) -> bool {
        self.p_two_qubit == 0.0 && self.p_readout == 0.0
    }

    pub fn fault_probability(&self, gate: &Gate) -> f64 {
        if !gate.is_multi_qubit() {
            return 0.0;
        }
        (self.p_two_qubit * self.gate_weights.weight(gate)).min(1.0)
    }
}

/// `(gate index, Pauli word)`; bit pair `2j` of the word acts on the gate's
/// `j`-th qubit.
type Fault = (usize, u32);

fn cumulative(state: &StateVector) -> Vec<f64> {
    let mut acc = 0.0;
    state
        .probabilities()
        .into_iter()
        .map(|p| {
            acc += p;
            acc
        })
        .collect()
}

fn draw(cdf: &[f64], u: f64) -> u64 {
    let total = *cdf.last().expect("nonempty state");
    let target = u * total;
    let idx = cdf.partition_point(|c| *c <= target).min(cdf.len() - 1);
    idx as u64
}

fn faulty_state(circuit: &CircuitDescription, faults: &[Fault]) -> StateVector {
    let mut state = StateVector::zero(circuit.num_qubits());
    let mut next = faults.iter().peekable();
    for (i, gate) in circuit.gates().iter().enumerate() {
        state.apply(gate);
        while let Some(&&(gi, word)) = next.peek() {
            if gi != i {
                break;
            }
            for (j, q) in gate.qubits().into_iter().enumerate() {
                let p = Pauli::from_index(((word >> (2 * j)) & 3) as u8);
                if p != Pauli::I {
                    state.pauli(q, p);
                }
            }
            next.next();
        }
    }
    state
}

/// Shot-by-shot Pauli-trajectory sampling of `circuit` under `model`,
/// measuring every qubit.
pub fn apply_noise_with<R: Rng + ?Sized>(
    circuit: &CircuitDescription,
    model: &NoiseModel,
    shots: u64,
    rng: &mut R,
) -> Result<ShotHistogram> {
    model.validate()?;
    if shots == 0 {
        return Err(Error::InvalidParameter("shot count must be positive".into()));
    }
    let n = circuit.num_qubits();
    let clean = cumulative(&simulate(circuit)?);
    let faulty_gates: Vec<(usize, f64, u32)> = circuit
        .gates()
        .iter()
        .enumerate()
        .filter_map(|(i, g)| {
            let p = model.fault_probability(g);
            (p > 0.0).then(|| (i, p, 1u32 << (2 * g.qubits().len())))
        })
        .collect();
    let mut trajectories: HashMap<Vec<Fault>, Vec<f64>> = HashMap::new();
    let mut hist = ShotHistogram::new(n);
    let mut faults: Vec<Fault> = Vec::new();
    for _ in 0..shots {
        faults.clear();
        for &(i, p, words) in &faulty_gates {
            if rng.random::<f64>() < p {
                faults.push((i, rng.random_range(1..words)));
            }
        }
        let u = rng.random::<f64>();
        let mut outcome = if faults.is_empty() {
            draw(&clean, u)
        } else {
            let cdf = trajectories
                .entry(faults.clone())
                .or_insert_with(|| cumulative(&faulty_state(circuit, &faults)));
            draw(cdf, u)
        };
        if model.p_readout > 0.0 {
            for bit in 0..n {
                if rng.random::<f64>() < model.p_readout {
                    outcome ^= 1 << bit;
                }
            }
        }
        hist.add(outcome, 1);
    }
    Ok(hist)
}

pub fn apply_noise(circuit: &CircuitDescription, model: &NoiseModel, shots: u64, seed: u64) -> Result<ShotHistogram> {
    apply_noise_with(circuit, model, shots, &mut rng::master(seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::{build_loader, AngleTree};

    fn loader(probs: &[f64]) -> CircuitDescription {
        build_loader(&AngleTree::from_probs(probs).unwrap())
    }

    #[test]
    fn validates_probabilities() {
        assert!(NoiseModel::new(1.5, 0.0).is_err());
        assert!(NoiseModel::new(0.1, -0.1).is_err());
        assert!(NoiseModel::new(0.01, 0.02).is_ok());
    }

    #[test]
    fn noise_off_matches_ideal_distribution() {
        let c = loader(&[0.1, 0.2, 0.3, 0.4]);
        let h = apply_noise(&c, &NoiseModel::noiseless(), 50_000, 4).unwrap();
        let marg = h.project(c.output_register()).unwrap();
        for (o, p) in [0.1f64, 0.2, 0.3, 0.4].iter().enumerate() {
            let sigma = (50_000.0 * p * (1.0 - p)).sqrt();
            assert!((marg.count(o as u64) as f64 - 50_000.0 * p).abs() < 5.0 * sigma);
        }
    }

    #[test]
    fn full_readout_scrambling_is_uniform() {
        let c = loader(&[1.0, 0.0]);
        let model = NoiseModel::new(0.0, 0.5).unwrap();
        let h = apply_noise(&c, &model, 40_000, 8).unwrap();
        let sigma = (40_000.0f64 * 0.25).sqrt();
        assert!((h.count(0) as f64 - 20_000.0).abs() < 5.0 * sigma);
        assert!((h.count(1) as f64 - 20_000.0).abs() < 5.0 * sigma);
    }

    #[test]
    fn seeded_runs_are_identical() {
        let c = loader(&[0.1, 0.2, 0.3, 0.15, 0.05, 0.05, 0.1, 0.05]);
        let model = NoiseModel::new(0.02, 0.03).unwrap();
        assert_eq!(apply_noise(&c, &model, 3000, 17).unwrap(), apply_noise(&c, &model, 3000, 17).unwrap());
    }

    #[test]
    fn gate_faults_flatten_the_output() {
        let probs = [0.7, 0.1, 0.1, 0.1];
        let c = loader(&probs);
        let model = NoiseModel::new(1.0 / 8.0, 0.0).unwrap();
        let h = apply_noise(&c, &model, 40_000, 2).unwrap().project(c.output_register()).unwrap();
        let p0 = h.count(0) as f64 / 40_000.0;
        assert!(p0 < 0.68, "fault on every CSWAP should leak weight away from |00⟩, got {p0}");
    }

    #[test]
    fn totals_spread_over_circuit() {
        let c = loader(&[0.1, 0.2, 0.3, 0.4]);
        let m = NoiseModel::from_totals(&c, 0.07, 0.07).unwrap();
        assert!((m.p_two_qubit - 0.07 / 8.0).abs() < 1e-15);
        assert!((m.p_readout - 0.035).abs() < 1e-15);
        assert_eq!(m.fault_probability(&Gate::Ry { target: 0, theta: 1.0 }), 0.0);
    }
}

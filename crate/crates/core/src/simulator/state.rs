use num_complex::Complex64;

use crate::encoding::{CircuitDescription, Gate};
use crate::{Error, Result};

/// 24 qubits of complex doubles is 256 MiB.
pub const DEFAULT_QUBIT_CAP: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_index(i: u8) -> Self {
        match i & 3 {
            0 => Pauli::I,
            1 => Pauli::X,
            2 => Pauli::Y,
            _ => Pauli::Z,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// |0…0⟩ on `num_qubits` qubits.
    pub fn zero(num_qubits: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Self { num_qubits, amplitudes }
    }

    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let n = amplitudes.len();
        if n == 0 || !n.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(n));
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidParameter(format!("state norm {norm} is not 1")));
        }
        Ok(Self { num_qubits: n.trailing_zeros() as usize, amplitudes })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    fn mask(&self, qubit: usize) -> usize {
        1 << (self.num_qubits - 1 - qubit)
    }

    /// Probabilities of `register` (first qubit most significant), summed
    /// over all other qubits.
    pub fn marginal(&self, register: &[usize]) -> Vec<f64> {
        let masks: Vec<usize> = register.iter().map(|q| self.mask(*q)).collect();
        let mut out = vec![0.0; 1 << register.len()];
        for (index, amp) in self.amplitudes.iter().enumerate() {
            out[project_index(index, &masks)] += amp.norm_sqr();
        }
        out
    }

    pub fn apply(&mut self, gate: &Gate) {
        match *gate {
            Gate::Ry { target, theta } => self.ry(target, theta),
            Gate::X { target } => self.pauli(target, Pauli::X),
            Gate::Cnot { control, target } => {
                let (c, t) = (self.mask(control), self.mask(target));
                for i in 0..self.amplitudes.len() {
                    if i & c != 0 && i & t == 0 {
                        self.amplitudes.swap(i, i | t);
                    }
                }
            }
            Gate::Cswap { control, a, b } => {
                let (c, ma, mb) = (self.mask(control), self.mask(a), self.mask(b));
                for i in 0..self.amplitudes.len() {
                    if i & c != 0 && i & ma != 0 && i & mb == 0 {
                        self.amplitudes.swap(i, (i ^ ma) | mb);
                    }
                }
            }
        }
    }

    fn ry(&mut self, target: usize, theta: f64) {
        let m = self.mask(target);
        let (s, c) = (theta / 2.0).sin_cos();
        for i in 0..self.amplitudes.len() {
            if i & m == 0 {
                let (a0, a1) = (self.amplitudes[i], self.amplitudes[i | m]);
                self.amplitudes[i] = a0 * c - a1 * s;
                self.amplitudes[i | m] = a0 * s + a1 * c;
            }
        }
    }

    pub fn pauli(&mut self, target: usize, p: Pauli) {
        let m = self.mask(target);
        let i_unit = Complex64::new(0.0, 1.0);
        for i in 0..self.amplitudes.len() {
            if i & m != 0 {
                continue;
            }
            let (a0, a1) = (self.amplitudes[i], self.amplitudes[i | m]);
            let (b0, b1) = match p {
                Pauli::I => (a0, a1),
                Pauli::X => (a1, a0),
                Pauli::Y => (-i_unit * a1, i_unit * a0),
                Pauli::Z => (a0, -a1),
            };
            self.amplitudes[i] = b0;
            self.amplitudes[i | m] = b1;
        }
    }
}

pub(crate) fn project_index(index: usize, masks: &[usize]) -> usize {
    masks.iter().fold(0, |acc, m| (acc << 1) | usize::from(index & m != 0))
}

pub fn simulate(circuit: &CircuitDescription) -> Result<StateVector> {
    simulate_with_cap(circuit, DEFAULT_QUBIT_CAP)
}

pub fn simulate_with_cap(circuit: &CircuitDescription, cap: usize) -> Result<StateVector> {
    if circuit.num_qubits() > cap {
        return Err(Error::QubitCapExceeded { requested: circuit.num_qubits(), cap });
    }
    let mut state = StateVector::zero(circuit.num_qubits());
    for gate in circuit.gates() {
        state.apply(gate);
    }
    Ok(state)
}

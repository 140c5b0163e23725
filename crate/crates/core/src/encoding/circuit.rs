use std::fmt;
use std::str::FromStr;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    Ry { target: usize, theta: f64 },
    Cnot { control: usize, target: usize },
    Cswap { control: usize, a: usize, b: usize },
    X { target: usize },
}

impl Gate {
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::Ry { target, .. } | Gate::X { target } => vec![target],
            Gate::Cnot { control, target } => vec![control, target],
            Gate::Cswap { control, a, b } => vec![control, a, b],
        }
    }

    pub fn is_multi_qubit(&self) -> bool {
        matches!(self, Gate::Cnot { .. } | Gate::Cswap { .. })
    }

    fn shifted(self, by: usize) -> Self {
        match self {
            Gate::Ry { target, theta } => Gate::Ry { target: target + by, theta },
            Gate::X { target } => Gate::X { target: target + by },
            Gate::Cnot { control, target } => Gate::Cnot { control: control + by, target: target + by },
            Gate::Cswap { control, a, b } => Gate::Cswap { control: control + by, a: a + by, b: b + by },
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gate::Ry { target, theta } => write!(f, "RY q{target} {theta}"),
            Gate::Cnot { control, target } => write!(f, "CNOT q{control} q{target}"),
            Gate::Cswap { control, a, b } => write!(f, "CSWAP q{control} q{a} q{b}"),
            Gate::X { target } => write!(f, "X q{target}"),
        }
    }
}

/// Ordered gate list on `num_qubits` qubits with a designated output
/// register, most significant bit first.
#[derive(Debug, Clone, PartialEq)]
pub struct CircuitDescription {
    num_qubits: usize,
    gates: Vec<Gate>,
    output_register: Vec<usize>,
}

impl CircuitDescription {
    pub fn new(num_qubits: usize, gates: Vec<Gate>, output_register: Vec<usize>) -> Result<Self> {
        for gate in &gates {
            let qs = gate.qubits();
            if let Some(q) = qs.iter().find(|q| **q >= num_qubits) {
                return Err(Error::InvalidGate(format!("{gate}: qubit {q} >= {num_qubits}")));
            }
            if has_duplicates(&qs) {
                return Err(Error::InvalidGate(format!("{gate}: repeated qubit")));
            }
            if let Gate::Ry { theta, .. } = gate {
                if !theta.is_finite() {
                    return Err(Error::InvalidGate(format!("{gate}: non-finite angle")));
                }
            }
        }
        if output_register.iter().any(|q| *q >= num_qubits) || has_duplicates(&output_register) {
            return Err(Error::InvalidGate(format!("invalid output register {output_register:?}")));
        }
        Ok(Self { num_qubits, gates, output_register })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn output_register(&self) -> &[usize] {
        &self.output_register
    }

    /// Layered depth under as-soon-as-possible scheduling.
    pub fn depth(&self) -> usize {
        let mut layer = vec![0usize; self.num_qubits];
        let mut depth = 0;
        for gate in &self.gates {
            let qs = gate.qubits();
            let next = qs.iter().map(|q| layer[*q]).max().unwrap_or(0) + 1;
            for q in qs {
                layer[q] = next;
            }
            depth = depth.max(next);
        }
        depth
    }

    pub fn count(&self, pred: impl Fn(&Gate) -> bool) -> usize {
        self.gates.iter().filter(|g| pred(g)).count()
    }

    /// Places `other` on fresh qubits after this circuit's; the output
    /// register is this one's followed by `other`'s.
    pub fn tensor(&self, other: &CircuitDescription) -> CircuitDescription {
        let by = self.num_qubits;
        let gates = self.gates.iter().copied().chain(other.gates.iter().map(|g| g.shifted(by))).collect();
        let output_register = self
            .output_register
            .iter()
            .copied()
            .chain(other.output_register.iter().map(|q| q + by))
            .collect();
        CircuitDescription { num_qubits: by + other.num_qubits, gates, output_register }
    }

    /// Plain-text dump: `qubits <n>`, `output <i,j,...>`, then one gate per line.
    pub fn to_text(&self) -> String {
        let mut out = format!("qubits {}\n", self.num_qubits);
        let reg: Vec<String> = self.output_register.iter().map(usize::to_string).collect();
        out.push_str(&format!("output {}\n", reg.join(",")));
        for g in &self.gates {
            out.push_str(&g.to_string());
            out.push('\n');
        }
        out
    }
}

impl FromStr for CircuitDescription {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut num_qubits = None;
        let mut output = None;
        let mut gates = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let err = |message: String| Error::Parse { line: line_no, message };
            let fields: Vec<&str> = line.split_whitespace().collect();
            let Some((&head, args)) = fields.split_first() else { continue };
            let qubit = |s: &str| -> Result<usize> {
                s.strip_prefix('q')
                    .and_then(|v| v.parse().ok())
                    .ok_or_else(|| err(format!("bad qubit '{s}'")))
            };
            let arity = |n: usize| -> Result<()> {
                if args.len() == n {
                    Ok(())
                } else {
                    Err(err(format!("{head} expects {n} arguments")))
                }
            };
            match head {
                "qubits" => {
                    arity(1)?;
                    num_qubits = Some(args[0].parse().map_err(|_| err("bad qubit count".into()))?);
                }
                "output" => {
                    let reg: Result<Vec<usize>> = args
                        .join("")
                        .split(',')
                        .filter(|s| !s.is_empty())
                        .map(|s| s.parse().map_err(|_| err(format!("bad output index '{s}'"))))
                        .collect();
                    output = Some(reg?);
                }
                "RY" => {
                    arity(2)?;
                    let theta = args[1].parse().map_err(|_| err(format!("bad angle '{}'", args[1])))?;
                    gates.push(Gate::Ry { target: qubit(args[0])?, theta });
                }
                "CNOT" => {
                    arity(2)?;
                    gates.push(Gate::Cnot { control: qubit(args[0])?, target: qubit(args[1])? });
                }
                "CSWAP" => {
                    arity(3)?;
                    gates.push(Gate::Cswap { control: qubit(args[0])?, a: qubit(args[1])?, b: qubit(args[2])? });
                }
                "X" => {
                    arity(1)?;
                    gates.push(Gate::X { target: qubit(args[0])? });
                }
                other => return Err(err(format!("unknown instruction '{other}'"))),
            }
        }
        let num_qubits = num_qubits.ok_or(Error::Parse { line: 0, message: "missing 'qubits' header".into() })?;
        CircuitDescription::new(num_qubits, gates, output.unwrap_or_default())
    }
}

fn has_duplicates(qs: &[usize]) -> bool {
    qs.iter().enumerate().any(|(i, q)| qs[..i].contains(q))
}

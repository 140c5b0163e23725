use super::angles::{angle_tree, AngleTree};
use super::circuit::{CircuitDescription, Gate};
use crate::matched::EncodedSegment;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoaderOptions {
    /// Drop identity rotations (θ = 0) and the combines they control.
    /// Qubit allocation and the output register are unchanged.
    pub prune_zero_subtrees: bool,
}

/// Controlled-SWAPs exchanging `left` and `right` when `control` is set:
/// `(a|0⟩+b|1⟩)|ψ⟩|φ⟩ → a|0⟩|ψ⟩|φ⟩ + b|1⟩|φ⟩|ψ⟩`.
pub fn combine(control: usize, left: &[usize], right: &[usize]) -> Result<Vec<Gate>> {
    if left.len() != right.len() {
        return Err(Error::InvalidParameter(format!(
            "combine registers differ in size: {} vs {}",
            left.len(),
            right.len()
        )));
    }
    let overlaps = left.iter().any(|q| right.contains(q) || *q == control)
        || right.contains(&control)
        || (1..left.len()).any(|i| left[..i].contains(&left[i]) || right[..i].contains(&right[i]));
    if overlaps {
        return Err(Error::OverlappingRegisters);
    }
    Ok(left
        .iter()
        .zip(right)
        .map(|(&a, &b)| Gate::Cswap { control, a, b })
        .collect())
}

pub fn build_loader(tree: &AngleTree) -> CircuitDescription {
    build_loader_with(tree, LoaderOptions::default())
}

/// One qubit per tree node in heap order (root `q0`, children of `qi` at
/// `q(2i+1)`, `q(2i+2)`), one `RY` each, then combine layers from the
/// deepest internal level up to the root.
pub fn build_loader_with(tree: &AngleTree, options: LoaderOptions) -> CircuitDescription {
    let nodes = tree.node_count();
    let depth = tree.depth();
    let mut gates = Vec::new();
    for q in 0..nodes {
        let theta = tree.heap_angle(q);
        if !(options.prune_zero_subtrees && theta == 0.0) {
            gates.push(Gate::Ry { target: q, theta });
        }
    }
    // registers[h]: output register of the subtree rooted at node h
    let mut registers: Vec<Vec<usize>> = (0..nodes).map(|h| vec![h]).collect();
    for level in (0..depth.saturating_sub(1)).rev() {
        for h in (1 << level) - 1..(1 << (level + 1)) - 1 {
            let (l, r) = (2 * h + 1, 2 * h + 2);
            if !(options.prune_zero_subtrees && tree.heap_angle(h) == 0.0) {
                gates.extend(combine(h, &registers[l], &registers[r]).expect("subtree registers are disjoint"));
            }
            let mut reg = vec![h];
            reg.extend_from_slice(&registers[l]);
            registers[h] = reg;
        }
    }
    let output = registers.swap_remove(0);
    CircuitDescription::new(nodes, gates, output).expect("loader gates address allocated qubits")
}

/// Template loader on the leading qubits and data loader after it; the
/// output register reads template bits then data bits.
pub fn joint_loader(
    template: &EncodedSegment,
    data: &EncodedSegment,
    options: LoaderOptions,
) -> Result<CircuitDescription> {
    let t = build_loader_with(&angle_tree(template)?, options);
    let d = build_loader_with(&angle_tree(data)?, options);
    Ok(t.tensor(&d))
}

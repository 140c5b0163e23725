use crate::hybrid::SegmentPlan;
use crate::matched::MIN_PADDED_LEN;
use crate::{Error, Result};

/// Concrete qubit, depth and shot counts for a segmentation plan, plus the
/// decoder size estimates for the unsegmented problem.
#[derive(Debug, Clone, PartialEq)]
pub struct ResourceReport {
    pub template_len: usize,
    pub data_len: usize,
    pub k_d: usize,
    pub k_t: usize,
    /// Loader qubits for one data segment (`padded(k_d) − 1`).
    pub data_qubits: usize,
    /// Loader qubits for one template chunk (`padded(k_t) − 1`).
    pub template_qubits: usize,
    /// Output register bits measured per run.
    pub output_bits: usize,
    pub lags_per_segment: usize,
    pub segments: usize,
    pub chunks: usize,
    pub runs: usize,
    /// Combine layers of the data loader.
    pub combine_layers: usize,
    /// Layered depth of the data loader (rotation layer included).
    pub loader_depth: usize,
    /// Controlled-SWAPs per run.
    pub cswaps_per_run: usize,
    pub shots_per_run: u64,
    pub total_shots: u64,
    /// Estimate `N·L` two-input OR gates, unit constant.
    pub decoder_or_gates: f64,
    /// Estimate `N·L·log2(N·L)` two-input AND gates plus inverters, unit constant.
    pub decoder_and_gates: f64,
}

impl ResourceReport {
    pub fn qubits_per_run(&self) -> usize {
        self.data_qubits + self.template_qubits
    }

    /// Qubits if every run were laid out side by side; grows as O(L).
    pub fn total_qubits(&self) -> usize {
        self.runs * self.qubits_per_run()
    }

    pub fn summary(&self) -> String {
        format!(
            "{} data qubits + {} template qubit{} per run, {} lag{} per segment, {} run{}",
            self.data_qubits,
            self.template_qubits,
            if self.template_qubits == 1 { "" } else { "s" },
            self.lags_per_segment,
            if self.lags_per_segment == 1 { "" } else { "s" },
            self.runs,
            if self.runs == 1 { "" } else { "s" },
        )
    }
}

fn loader_qubits(len: usize) -> usize {
    len.next_power_of_two().max(MIN_PADDED_LEN) - 1
}

pub fn resource_report(template_len: usize, data_len: usize, plan: &SegmentPlan) -> Result<ResourceReport> {
    if template_len > data_len {
        return Err(Error::LengthMismatch { template: template_len, data: data_len });
    }
    if plan.template_len() != template_len || plan.data_len() != data_len {
        return Err(Error::InfeasiblePlan(format!(
            "plan was made for N={}, L={}",
            plan.template_len(),
            plan.data_len()
        )));
    }
    let data_qubits = loader_qubits(plan.k_d());
    let template_qubits = loader_qubits(plan.k_t());
    let k_data = (data_qubits + 1).trailing_zeros() as usize;
    let k_template = (template_qubits + 1).trailing_zeros() as usize;
    let cswaps = |k: usize| -> usize { (1..k).map(|m| m * (1 << (k - 1 - m))).sum() };
    let runs = plan.num_runs();
    let nl = (template_len * data_len) as f64;
    Ok(ResourceReport {
        template_len,
        data_len,
        k_d: plan.k_d(),
        k_t: plan.k_t(),
        data_qubits,
        template_qubits,
        output_bits: k_data + k_template,
        lags_per_segment: plan.lags_per_segment(),
        segments: plan.segments().len(),
        chunks: plan.chunks().len(),
        runs,
        combine_layers: k_data.saturating_sub(1),
        loader_depth: 1 + k_data * k_data.saturating_sub(1) / 2,
        cswaps_per_run: cswaps(k_data) + cswaps(k_template),
        shots_per_run: plan.shots_per_run(),
        total_shots: plan.shots_per_run() * runs as u64,
        decoder_or_gates: nl,
        decoder_and_gates: nl * nl.log2().max(1.0),
    })
}

use rayon::prelude::*;

use super::plan::{PlannedSegment, SegmentPlan, TemplateChunk};
use super::relocate::{relocate, RelocationRule};
use crate::encoding::{joint_loader, LoaderOptions};
use crate::matched::{
    check_compatible, correlate, correction_totals, corrected_snr, exact_joint_prob_sum, predict_precision_with_discards, preprocess,
    EncodedSegment, Provenance, SeriesMeta, SnrSeries, TimeSeries,
};
use crate::numeric;
use crate::simulator::{apply_noise_with, sample_ideal_with, sample_with, simulate, NoiseModel, ShotHistogram};
use crate::{rng, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Backend {
    /// Exact joint probabilities; the infinite-shot limit.
    Exact,
    /// Sample the product distribution directly.
    Ideal,
    /// Simulate the joint loader circuit and sample all qubits.
    Statevector,
    /// Loader circuit under Pauli-trajectory noise.
    Noisy(NoiseModel),
}

impl Backend {
    pub fn provenance(&self) -> Provenance {
        match self {
            Backend::Exact => Provenance::HybridExact,
            Backend::Ideal => Provenance::HybridIdeal,
            Backend::Statevector => Provenance::HybridSim,
            Backend::Noisy(_) => Provenance::HybridNoisy,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ShotAllocation {
    /// Every run gets `plan.shots_per_run()`.
    #[default]
    Uniform,
    /// Same total budget, split in proportion to each run's predicted
    /// standard error so the stitched variance is minimized.
    PrecisionWeighted,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HybridConfig {
    pub backend: Backend,
    pub margin: f64,
    pub seed: u64,
    pub allocation: ShotAllocation,
    pub loader: LoaderOptions,
}

impl HybridConfig {
    pub fn new(backend: Backend, margin: f64, seed: u64) -> Self {
        Self { backend, margin, seed, allocation: ShotAllocation::Uniform, loader: LoaderOptions::default() }
    }
}

/// Encoded pair for one (segment, chunk) run, or the raw slices when one
/// side is constant under a zero margin and has nothing to sample.
enum RunInput {
    Encoded { template: EncodedSegment, data: EncodedSegment },
    Degenerate { template: Vec<f64>, data: Vec<f64> },
}

struct RunSpec<'a> {
    segment_index: usize,
    chunk_index: usize,
    segment: &'a PlannedSegment,
    input: RunInput,
}

struct RunResult {
    values: Vec<f64>,
    variances: Vec<f64>,
    shots: u64,
}

fn encode(template: &[f64], data: &[f64], margin: f64) -> Result<RunInput> {
    match (preprocess(template, margin), preprocess(data, margin)) {
        (Ok(template), Ok(data)) => Ok(RunInput::Encoded { template, data }),
        (Err(Error::ZeroNorm), _) | (_, Err(Error::ZeroNorm)) => {
            Ok(RunInput::Degenerate { template: template.to_vec(), data: data.to_vec() })
        }
        (Err(e), _) | (_, Err(e)) => Err(e),
    }
}

/// Standard-error weight of a run, from its exact probabilities.
fn run_weight(input: &RunInput) -> Result<f64> {
    let RunInput::Encoded { template, data } = input else { return Ok(0.0) };
    let lags = data.len() - template.len() + 1;
    let spread: f64 = (0..lags)
        .map(|j| exact_joint_prob_sum(template, data, j).map(|p| p * (1.0 - p)))
        .sum::<Result<f64>>()?;
    Ok(template.norm() * data.norm() * spread.sqrt())
}

fn sample_run(
    template: &EncodedSegment,
    data: &EncodedSegment,
    shots: u64,
    config: &HybridConfig,
    rng: &mut rng::StreamRng,
) -> Result<ShotHistogram> {
    match config.backend {
        Backend::Exact => unreachable!("exact backend does not sample"),
        Backend::Ideal => Ok(sample_ideal_with(template, data, shots, rng)),
        Backend::Statevector => {
            let circuit = joint_loader(template, data, config.loader)?;
            let state = simulate(&circuit)?;
            sample_with(&state, shots, rng).project(circuit.output_register())
        }
        Backend::Noisy(model) => {
            let circuit = joint_loader(template, data, config.loader)?;
            apply_noise_with(&circuit, &model, shots, rng)?.project(circuit.output_register())
        }
    }
}

fn execute(spec: &RunSpec<'_>, shots: u64, config: &HybridConfig) -> Result<RunResult> {
    let (template, data) = match &spec.input {
        RunInput::Degenerate { template, data } => {
            let values = correlate(template, data);
            let variances = vec![0.0; values.len()];
            return Ok(RunResult { values, variances, shots: 0 });
        }
        RunInput::Encoded { template, data } => (template, data),
    };
    let lags = data.len() - template.len() + 1;
    if let Backend::Exact = config.backend {
        let values = (0..lags)
            .map(|j| corrected_snr(exact_joint_prob_sum(template, data, j)?, template, data, j))
            .collect::<Result<Vec<f64>>>()?;
        return Ok(RunResult { variances: vec![0.0; lags], values, shots: 0 });
    }
    if shots == 0 {
        return Err(Error::InvalidParameter("run was allocated zero shots".into()));
    }
    let mut stream = rng::stream(config.seed, spec.segment_index as u32, spec.chunk_index as u32);
    let hist = sample_run(template, data, shots, config, &mut stream)?;
    let relocated = relocate(&hist, &RelocationRule::for_segments(template, data)?)?;
    let probs = relocated.joint_prob_sums();
    let values = probs
        .iter()
        .enumerate()
        .map(|(j, p)| corrected_snr(*p, template, data, j))
        .collect::<Result<Vec<f64>>>()?;
    let corrections = correction_totals(template, data)?;
    let mass = template.norm() * data.norm();
    let precision = predict_precision_with_discards(
        &values,
        shots as f64 / lags as f64,
        &corrections,
        mass * relocated.discarded_fraction(),
    )?;
    let variances = precision.iter().map(|p| p.sigma * p.sigma).collect();
    Ok(RunResult { values, variances, shots })
}

fn check_plan(template: &TimeSeries, data: &TimeSeries, plan: &SegmentPlan) -> Result<()> {
    check_compatible(template, data)?;
    if plan.template_len() != template.len() || plan.data_len() != data.len() {
        return Err(Error::InfeasiblePlan(format!(
            "plan made for N={}, L={} but got N={}, L={}",
            plan.template_len(),
            plan.data_len(),
            template.len(),
            data.len()
        )));
    }
    Ok(())
}

/// Hybrid matched filter. Every (segment, chunk) run is encoded, sampled on
/// its own random stream, relocated and offset-corrected; chunk results
/// are summed per lag, each lag taken from the segment that owns it.
pub fn estimate_snr(
    template: &TimeSeries,
    data: &TimeSeries,
    plan: &SegmentPlan,
    config: &HybridConfig,
) -> Result<SnrSeries> {
    check_plan(template, data, plan)?;
    let (x, y) = (template.samples(), data.samples());
    let specs = plan
        .segments()
        .iter()
        .enumerate()
        .flat_map(|(g, segment)| plan.chunks().iter().enumerate().map(move |(m, chunk)| (g, segment, m, chunk)))
        .map(|(g, segment, m, chunk): (usize, &PlannedSegment, usize, &TemplateChunk)| {
            let (start, len) = plan.data_window(segment, chunk);
            let input = encode(&x[chunk.offset..chunk.offset + chunk.len], &y[start..start + len], config.margin)?;
            Ok(RunSpec { segment_index: g, chunk_index: m, segment, input })
        })
        .collect::<Result<Vec<_>>>()?;

    let shots = allocate(&specs, plan, config)?;
    let results = specs
        .par_iter()
        .zip(shots.par_iter())
        .map(|(spec, &s)| execute(spec, s, config))
        .collect::<Result<Vec<_>>>()?;

    let lags = plan.num_lags();
    let mut values = vec![numeric::CompensatedSum::new(); lags];
    let mut variances = vec![0.0; lags];
    let mut total_shots = 0;
    for (spec, result) in specs.iter().zip(&results) {
        total_shots += result.shots;
        for lag in spec.segment.lags.clone() {
            let local = lag - spec.segment.start;
            values[lag].add(result.values[local]);
            variances[lag] += result.variances[local];
        }
    }
    let meta = SeriesMeta {
        provenance: config.backend.provenance(),
        shots: total_shots,
        seed: match config.backend {
            Backend::Exact => None,
            _ => Some(config.seed),
        },
        epoch: data.epoch(),
        sample_rate: data.sample_rate(),
    };
    Ok(SnrSeries::from_values(
        values.iter().map(|v| v.value()).collect(),
        Some(variances.into_iter().map(f64::sqrt).collect()),
        meta,
    ))
}

fn allocate(specs: &[RunSpec<'_>], plan: &SegmentPlan, config: &HybridConfig) -> Result<Vec<u64>> {
    let uniform = plan.shots_per_run();
    match config.allocation {
        ShotAllocation::Uniform => Ok(vec![uniform; specs.len()]),
        ShotAllocation::PrecisionWeighted => {
            let weights = specs.iter().map(|s| run_weight(&s.input)).collect::<Result<Vec<f64>>>()?;
            let total_weight: f64 = weights.iter().sum();
            if total_weight <= 0.0 {
                return Ok(vec![uniform; specs.len()]);
            }
            let budget = (uniform * specs.len() as u64) as f64;
            Ok(weights.iter().map(|w| ((budget * w / total_weight).round() as u64).max(1)).collect())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hybrid::{plan_segments, SegmentLength};
    use crate::matched::oracle_snr;

    fn ts(v: &[f64]) -> TimeSeries {
        TimeSeries::from_values(v.to_vec()).unwrap()
    }

    fn run(x: &[f64], y: &[f64], k_d: usize, k_t: usize, backend: Backend, margin: f64) -> SnrSeries {
        let plan = plan_segments(y.len(), x.len(), SegmentLength::Fixed(k_d), k_t, 4000).unwrap();
        estimate_snr(&ts(x), &ts(y), &plan, &HybridConfig::new(backend, margin, 42)).unwrap()
    }

    #[test]
    fn exact_backend_equals_oracle() {
        let x = [2.0, -1.0];
        let y = [1.0, 2.0, 3.0, 4.0, -2.0, 0.5];
        let truth = oracle_snr(&ts(&x), &ts(&y)).unwrap().values();
        let est = run(&x, &y, 4, 2, Backend::Exact, 0.1);
        for (a, b) in est.values().iter().zip(&truth) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_eq!(est.meta().provenance, Provenance::HybridExact);
        assert_eq!(est.meta().shots, 0);
    }

    #[test]
    fn chunked_template_stitches_to_oracle() {
        let x = [1.0, 2.0, -1.0, 1.0];
        let y = [0.3, -1.2, 2.2, 0.7, 1.9, -0.4, 0.0, 1.1, -2.5, 0.8];
        let truth = oracle_snr(&ts(&x), &ts(&y)).unwrap().values();
        for margin in [0.0, 0.1, 1.0] {
            let est = run(&x, &y, 4, 2, Backend::Exact, margin);
            assert_eq!(est.len(), truth.len());
            for (a, b) in est.values().iter().zip(&truth) {
                assert!((a - b).abs() < 1e-9, "margin {margin}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn constant_segments_bypass_sampling() {
        let x = [3.0, 3.0];
        let y = [1.0, 1.0, 1.0, 2.0, 5.0];
        let truth = oracle_snr(&ts(&x), &ts(&y)).unwrap().values();
        let est = run(&x, &y, 4, 2, Backend::Ideal, 0.0);
        for (a, b) in est.values().iter().zip(&truth) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(est.sigmas().iter().all(|s| *s == Some(0.0)));
    }

    #[test]
    fn sampled_backends_are_seed_deterministic() {
        let x = [2.0, -1.0];
        let y = [0.4, -0.3, 1.2, 0.9, -1.1, 0.2, 0.8];
        for backend in [Backend::Ideal, Backend::Statevector, Backend::Noisy(NoiseModel::new(0.01, 0.02).unwrap())] {
            let a = run(&x, &y, 4, 2, backend, 0.1);
            let b = run(&x, &y, 4, 2, backend, 0.1);
            assert_eq!(a, b);
            assert!(a.sigmas().iter().all(|s| s.unwrap() > 0.0));
        }
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let x = [2.0, -1.0, 0.5];
        let y: Vec<f64> = (0..40).map(|i| ((i * 7919) % 13) as f64 / 6.0 - 1.0).collect();
        let plan = plan_segments(y.len(), x.len(), SegmentLength::Fixed(4), 2, 2000).unwrap();
        let config = HybridConfig::new(Backend::Ideal, 0.1, 9);
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| estimate_snr(&ts(&x), &ts(&y), &plan, &config).unwrap());
        let b = four.install(|| estimate_snr(&ts(&x), &ts(&y), &plan, &config).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn weighted_allocation_keeps_budget() {
        let x = [2.0, -1.0];
        let y: Vec<f64> = (0..30).map(|i| (i as f64 * 0.7).sin() * (1.0 + i as f64 / 10.0)).collect();
        let plan = plan_segments(y.len(), x.len(), SegmentLength::Fixed(4), 2, 1000).unwrap();
        let mut config = HybridConfig::new(Backend::Ideal, 0.1, 3);
        config.allocation = ShotAllocation::PrecisionWeighted;
        let est = estimate_snr(&ts(&x), &ts(&y), &plan, &config).unwrap();
        let budget = 1000 * plan.num_runs() as u64;
        assert!((est.meta().shots as f64 - budget as f64).abs() <= plan.num_runs() as f64);
    }

    #[test]
    fn mismatched_plan_rejected() {
        let plan = plan_segments(6, 2, SegmentLength::Fixed(4), 2, 10).unwrap();
        let r = estimate_snr(&ts(&[1.0, 2.0]), &ts(&[1.0; 7]), &plan, &HybridConfig::new(Backend::Exact, 0.0, 0));
        assert!(matches!(r, Err(Error::InfeasiblePlan(_))));
    }
}

//! Acceptance gate. One PASS/FAIL line per criterion; exits nonzero if any
//! criterion fails.

use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use qmf::cli::{appendix_c, AppendixParams, DEFAULT_P_CX, DEFAULT_P_RO};
use qmf::encoding::{angle_tree, build_loader, combine, joint_loader, LoaderOptions};
use qmf::hybrid::{
    estimate_snr, optimal_segment_length, plan_segments, segment_cost, stationary_segment_length, Backend, HybridConfig,
    SegmentLength,
};
use qmf::matched::{
    correction_totals, exact_joint_prob_sum, oracle_snr, predict_precision_with_discards, preprocess, TimeSeries,
};
use qmf::numeric;
use qmf::sigproc::{self, ChirpSpec, NoiseSpectrum, Window};
use qmf::simulator::{sample, sample_ideal, simulate, NoiseModel, ShotHistogram, StateVector};

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn within(elapsed: Duration, limit_s: f64) -> bool {
    elapsed.as_secs_f64() < limit_s
}

fn loader_marginals() -> Outcome {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let n = rng.random_range(2..=16);
        let values: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
        let seg = preprocess(&values, 0.05).unwrap();
        let circuit = build_loader(&angle_tree(&seg).unwrap());
        let marg = simulate(&circuit).unwrap().marginal(circuit.output_register());
        let tv = 0.5 * marg.iter().zip(seg.probs()).map(|(a, b)| (a - b).abs()).sum::<f64>();
        worst = worst.max(tv);
    }
    let elapsed = started.elapsed();
    check(
        worst <= 1e-10 && within(elapsed, 10.0),
        format!("max TV {worst:.2e} over 200 vectors (limit 1e-10), {:.2} s (limit 10 s)", elapsed.as_secs_f64()),
    )
}

fn random_state(rng: &mut ChaCha8Rng, qubits: usize) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..1 << qubits)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|c| c / norm).collect()
}

fn combine_invariant() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let m = rng.random_range(1..=3);
        let ctrl = random_state(&mut rng, 1);
        let (a, b) = (ctrl[0], ctrl[1]);
        let psi = random_state(&mut rng, m);
        let phi = random_state(&mut rng, m);
        let dim = 1 << m;
        let amp = |c: usize, l: usize, r: usize| c * dim * dim + l * dim + r;
        let mut input = vec![Complex64::new(0.0, 0.0); 2 * dim * dim];
        let mut expected = input.clone();
        for l in 0..dim {
            for r in 0..dim {
                input[amp(0, l, r)] = a * psi[l] * phi[r];
                input[amp(1, l, r)] = b * psi[l] * phi[r];
                expected[amp(0, l, r)] = a * psi[l] * phi[r];
                expected[amp(1, l, r)] = b * phi[l] * psi[r];
            }
        }
        let left: Vec<usize> = (1..=m).collect();
        let right: Vec<usize> = (m + 1..=2 * m).collect();
        let mut state = StateVector::from_amplitudes(input).unwrap();
        for g in combine(0, &left, &right).unwrap() {
            state.apply(&g);
        }
        for (x, y) in state.amplitudes().iter().zip(&expected) {
            worst = worst.max((x - y).norm());
        }
    }
    check(worst <= 1e-12, format!("max amplitude error {worst:.2e} over 100 trials, m <= 3 (limit 1e-12)"))
}

fn exactness() -> Outcome {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for i in 0..100 {
        let n = rng.random_range(1..=8);
        let l = rng.random_range(n..=32);
        let x: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let y: Vec<f64> = (0..l).map(|_| rng.sample(StandardNormal)).collect();
        let margin = [0.0, 0.1, 1.0][i % 3];
        let k_t = rng.random_range(1..=n);
        let k_d = rng.random_range(k_t..=l);
        let x = TimeSeries::from_values(x).unwrap();
        let y = TimeSeries::from_values(y).unwrap();
        let plan = plan_segments(l, n, SegmentLength::Fixed(k_d), k_t, 1).unwrap();
        let est = estimate_snr(&x, &y, &plan, &HybridConfig::new(Backend::Exact, margin, 0)).unwrap();
        let truth = oracle_snr(&x, &y).unwrap();
        for (a, b) in est.values().iter().zip(truth.values()) {
            worst = worst.max((a - b).abs());
        }
    }
    let elapsed = started.elapsed();
    check(
        worst <= 1e-9 && within(elapsed, 5.0),
        format!("max |exact - oracle| {worst:.2e} over 100 instances (limit 1e-9), {:.2} s (limit 5 s)", elapsed.as_secs_f64()),
    )
}

fn appendix_ideal() -> Outcome {
    let started = Instant::now();
    let params = AppendixParams { seed: 2024, ..Default::default() };
    let r = appendix_c(&params, Backend::Statevector).unwrap();
    let elapsed = started.elapsed();
    let corr = r.report.correlation.unwrap_or(f64::NAN);
    let ecorr = r.report.error_correlation;
    check(
        corr >= 0.99 && ecorr.abs() <= 0.2 && within(elapsed, 60.0),
        format!(
            "corr {corr:.4} (>= 0.99), error corr {ecorr:.4} (|.| <= 0.2), {:.2} s (limit 60 s)",
            elapsed.as_secs_f64()
        ),
    )
}

fn appendix_noisy() -> Outcome {
    let started = Instant::now();
    let params = AppendixParams { seed: 2024, ..Default::default() };
    let model = NoiseModel::new(DEFAULT_P_CX, DEFAULT_P_RO).unwrap();
    let r = appendix_c(&params, Backend::Noisy(model)).unwrap();
    let elapsed = started.elapsed();
    let ecorr = r.report.error_correlation;
    let attenuated = r.peak_ratio < 1.0 && r.report.peak_estimate.abs() < r.report.peak_truth.abs();
    check(
        ecorr < -0.2 && attenuated && within(elapsed, 300.0),
        format!(
            "error corr {ecorr:.4} (< -0.2), peak ratio {:.4} and max |SNR| {:.3} vs {:.3} (attenuated), {:.2} s (limit 300 s)",
            r.peak_ratio,
            r.report.peak_estimate.abs(),
            r.report.peak_truth.abs(),
            elapsed.as_secs_f64()
        ),
    )
}

/// Per-lag sample mean and standard deviation over seeds `0..seeds`.
fn seed_spread(x: &TimeSeries, y: &TimeSeries, shots: u64, seeds: u64) -> (Vec<f64>, Vec<f64>) {
    let plan = plan_segments(y.len(), x.len(), SegmentLength::Fixed(y.len()), x.len(), shots).unwrap();
    let runs: Vec<Vec<f64>> = (0..seeds)
        .map(|s| estimate_snr(x, y, &plan, &HybridConfig::new(Backend::Ideal, 0.1, s)).unwrap().values())
        .collect();
    let lags = runs[0].len();
    let column = |j: usize| runs.iter().map(|r| r[j]).collect::<Vec<f64>>();
    let means = (0..lags).map(|j| numeric::mean(&column(j))).collect();
    let stds = (0..lags).map(|j| numeric::variance(&column(j)).sqrt()).collect();
    (means, stds)
}

fn precision_formula() -> Outcome {
    let started = Instant::now();
    let xv = [2.0, -1.0];
    let yv = [0.8, -0.3, 1.7, 0.2];
    let x = TimeSeries::from_values(xv.to_vec()).unwrap();
    let y = TimeSeries::from_values(yv.to_vec()).unwrap();
    let truth = oracle_snr(&x, &y).unwrap().values();
    let shots = 2_000u64;

    let tseg = preprocess(&xv, 0.1).unwrap();
    let dseg = preprocess(&yv, 0.1).unwrap();
    let lags = truth.len();
    let kept: f64 = (0..lags).map(|j| exact_joint_prob_sum(&tseg, &dseg, j).unwrap()).sum();
    let mass = tseg.norm() * dseg.norm();
    let corrections = correction_totals(&tseg, &dseg).unwrap();
    let predicted =
        predict_precision_with_discards(&truth, shots as f64 / lags as f64, &corrections, mass * (1.0 - kept)).unwrap();

    let (_, stds) = seed_spread(&x, &y, shots, 200);
    let worst_ratio = stds
        .iter()
        .zip(&predicted)
        .map(|(s, p)| (s / p.sigma).max(p.sigma / s))
        .fold(0.0f64, f64::max);

    let rms = |s: u64| {
        let plan = plan_segments(4, 2, SegmentLength::Fixed(4), 2, s).unwrap();
        let sq: f64 = (0..200u64)
            .flat_map(|seed| {
                let est = estimate_snr(&x, &y, &plan, &HybridConfig::new(Backend::Ideal, 0.1, 10_000 + seed)).unwrap();
                est.values().iter().zip(&truth).map(|(e, t)| (e - t).powi(2)).collect::<Vec<_>>()
            })
            .sum();
        (sq / (200 * lags) as f64).sqrt()
    };
    let scaling = rms(shots) / rms(4 * shots);
    let elapsed = started.elapsed();
    check(
        worst_ratio <= 1.5 && (1.5..=2.5).contains(&scaling) && within(elapsed, 300.0),
        format!(
            "worst std/prediction ratio {worst_ratio:.3} (<= 1.5), RMS ratio under shots x4 {scaling:.3} (2 +/- 25%), {:.2} s",
            elapsed.as_secs_f64()
        ),
    )
}

fn segmentation_optimizer() -> Outcome {
    let root2 = stationary_segment_length(2);
    let mut ok = (root2 - 3.146).abs() < 1e-3;
    let mut picks = Vec::new();
    for n in [2usize, 4, 8, 16] {
        let (k, root) = optimal_segment_length(n);
        let stationary = 2.0 * root / (root.ln() + 2.0);
        ok &= (stationary - n as f64).abs() < 1e-9;
        let grid_best = (n + 1..=50 * n + 100)
            .min_by(|a, b| segment_cost(*a as f64, n).total_cmp(&segment_cost(*b as f64, n)))
            .unwrap();
        ok &= k == grid_best;
        picks.push(format!("N={n}: k={k} (grid argmin {grid_best})"));
    }
    check(ok, format!("root for N=2 {root2:.4} (~3.146); {}", picks.join(", ")))
}

fn gw_pipeline() -> Outcome {
    let started = Instant::now();
    let raw_rate = 800.0;
    let rate = 200.0;
    let noise = sigproc::synth_noise(
        &NoiseSpectrum::PowerLaw { level: 2.0 / raw_rate, exponent: 2.0, f_knee: 8.0 },
        raw_rate,
        800 * 32,
        77,
    )
    .unwrap();
    let chirp = sigproc::synth_chirp(&ChirpSpec::new(30.0, 80.0, 0.45, 1.0), raw_rate).unwrap();
    let at_raw = 12_000;
    let data_raw = sigproc::inject(&noise, &chirp, at_raw, 0.6).unwrap();

    let data = sigproc::lowpass_downsample(&data_raw, 99.98, rate).unwrap();
    let template = sigproc::lowpass_downsample(&chirp, 99.98, rate).unwrap();
    let psd = sigproc::welch_psd(&data, 512, Window::Hann, 0).unwrap();
    let data_w = sigproc::whiten(&data, &psd).unwrap();
    let template_w = sigproc::whiten_with(&template, &psd, sigproc::WhitenOptions { taper_fraction: 0.0 }).unwrap();

    let at = at_raw / 4;
    let window = data_w.slice(at - 150, at + 250).unwrap();
    let truth = oracle_snr(&template_w, &window).unwrap();
    let plan = plan_segments(window.len(), template_w.len(), SegmentLength::Fixed(4), 2, 10_000).unwrap();
    let est = estimate_snr(&template_w, &window, &plan, &HybridConfig::new(Backend::Ideal, 0.0, 5)).unwrap();

    let tp = truth.peak().unwrap();
    let ep = est.peak().unwrap();
    let sigma = est.estimates()[tp.lag].sigma.unwrap_or(0.0);
    let gap = (est.estimates()[tp.lag].value - tp.value).abs();
    let corr = numeric::pearson(&est.values(), &truth.values()).unwrap_or(f64::NAN);
    let elapsed = started.elapsed();
    check(
        tp.lag == ep.lag && tp.lag == 150 && gap <= 3.0 * sigma && corr >= 0.95 && within(elapsed, 600.0),
        format!(
            "peak lag classical {} / hybrid {} (injected 150), peak gap {gap:.3} vs 3 sigma {:.3}, corr {corr:.4} (>= 0.95), {:.2} s",
            tp.lag,
            ep.lag,
            3.0 * sigma,
            elapsed.as_secs_f64()
        ),
    )
}

/// Two-sample chi-square p-value for equal-size histograms.
fn two_sample_p(a: &ShotHistogram, b: &ShotHistogram) -> f64 {
    let mut keys: Vec<u64> = a.iter().map(|(o, _)| o).chain(b.iter().map(|(o, _)| o)).collect();
    keys.sort_unstable();
    keys.dedup();
    let stat: f64 = keys
        .iter()
        .map(|k| {
            let (x, y) = (a.count(*k) as f64, b.count(*k) as f64);
            (x - y).powi(2) / (x + y)
        })
        .sum();
    let df = keys.len().saturating_sub(1);
    if df == 0 {
        return 1.0;
    }
    1.0 - ChiSquared::new(df as f64).unwrap().cdf(stat)
}

fn path_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let shots = 100_000;
    let mut worst = 1.0f64;
    for i in 0..20u64 {
        let n = rng.random_range(2..=4);
        let l = rng.random_range(n..=8);
        let x: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let y: Vec<f64> = (0..l).map(|_| rng.sample(StandardNormal)).collect();
        let t = preprocess(&x, 0.1).unwrap();
        let d = preprocess(&y, 0.1).unwrap();
        let ideal = sample_ideal(&t, &d, shots, 100 + i).unwrap();
        let circuit = joint_loader(&t, &d, LoaderOptions::default()).unwrap();
        let state = simulate(&circuit).unwrap();
        let simulated = sample(&state, shots, 200 + i).unwrap().project(circuit.output_register()).unwrap();
        worst = worst.min(two_sample_p(&ideal, &simulated));
    }
    check(worst > 0.001, format!("min two-sample chi-square p {worst:.4} over 20 instances at 1e5 shots (> 0.001)"))
}

fn main() {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 9] = [
        ("loader correctness", loader_marginals),
        ("combine invariant", combine_invariant),
        ("offset-correction exactness", exactness),
        ("noiseless 2-point template replication", appendix_ideal),
        ("noisy 2-point template replication", appendix_noisy),
        ("precision formula", precision_formula),
        ("segmentation optimizer", segmentation_optimizer),
        ("GW-style pipeline", gw_pipeline),
        ("ideal vs simulated sampling", path_equivalence),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = run();
        let tag = if outcome.pass { "PASS" } else { "FAIL" };
        if !outcome.pass {
            failures += 1;
        }
        println!("{tag} criterion {}: {name}: {}", i + 1, outcome.detail);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}

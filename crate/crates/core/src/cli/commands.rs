use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use super::appendix::{appendix_c, AppendixParams, AppendixResult};
use super::settings::{BackendName, Settings};
use super::{
    AppendixArgs, ChirpArgs, CliError, CliResult, CommonArgs, CompareArgs, ConditionArgs, FilterArgs, InjectArgs, NoiseArgs,
    PlanArgs, PsdArgs, DEFAULT_P_CX, DEFAULT_P_RO,
};
use crate::encoding::resource_report;
use crate::hybrid::{
    compare_runs, estimate_snr, plan_segments, Backend, ComparisonReport, HybridConfig, SegmentLength, SegmentPlan,
    ShotAllocation,
};
use crate::io::{self, Header};
use crate::matched::{oracle_snr, SnrSeries, TimeSeries};
use crate::sigproc::{self, ChirpSpec, NoiseSpectrum, PsdEstimate, WhitenOptions, Window};
use crate::simulator::NoiseModel;

fn read_series(path: &str) -> CliResult<TimeSeries> {
    io::read_time_series(Path::new(path))
        .map(|(ts, _)| ts)
        .map_err(|e| CliError::data(format!("{path}: {e}")))
}

fn read_psd(path: &str) -> CliResult<PsdEstimate> {
    io::read_psd(Path::new(path))
        .map(|(p, _)| p)
        .map_err(|e| CliError::data(format!("{path}: {e}")))
}

fn write(dir: &Path, name: &str, contents: &str) -> CliResult<PathBuf> {
    let path = dir.join(name);
    io::atomic_write(&path, contents).map_err(|e| CliError::internal(format!("writing {}: {e}", path.display())))?;
    Ok(path)
}

fn parse_flag<T: std::str::FromStr>(key: &str, raw: Option<String>) -> CliResult<Option<T>> {
    raw.map(|r| r.parse().map_err(|_| CliError::config(format!("bad value '{r}' for --{key}"))))
        .transpose()
}

fn noise_model(s: &mut Settings, common: &CommonArgs) -> CliResult<NoiseModel> {
    let p_cx = s.or("p-cx", common.p_cx, DEFAULT_P_CX)?;
    let p_ro = s.or("p-ro", common.p_ro, DEFAULT_P_RO)?;
    Ok(NoiseModel::new(p_cx, p_ro)?)
}

fn hybrid_backend(name: BackendName, noise: Option<NoiseModel>) -> Option<Backend> {
    match name {
        BackendName::Classical => None,
        BackendName::Exact => Some(Backend::Exact),
        BackendName::Ideal => Some(Backend::Ideal),
        BackendName::Statevector => Some(Backend::Statevector),
        BackendName::Noisy => Some(Backend::Noisy(noise.unwrap_or_default())),
    }
}

fn fmt_sigma(sigma: Option<f64>) -> String {
    sigma.map_or("-".to_string(), |s| format!("{s:.6}"))
}

pub fn filter(a: FilterArgs) -> CliResult<()> {
    let mut s = Settings::from_common("filter", &a.common)?;
    let template_path: String = s.require("template", a.template)?;
    let data_path: String = s.require("data", a.data)?;
    let backend_list: String = s.or("backend", a.common.backend.clone(), "classical,ideal".to_string())?;
    let backends = BackendName::parse_list(&backend_list)?;
    let hybrid = backends.iter().any(|b| *b != BackendName::Classical);
    let sampled = backends.iter().any(|b| !matches!(b, BackendName::Classical | BackendName::Exact));

    let (mut plan_inputs, mut config_base) = (None, None);
    if hybrid {
        let kd = s.or("kd", parse_flag("kd", a.common.kd.clone())?, SegmentLength::Fixed(4))?;
        let kt = s.or("kt", a.common.kt, 2usize)?;
        let shots = s.or("shots", a.common.shots, 10_000u64)?;
        let margin = s.or("margin", a.common.margin, 0.0)?;
        let allocation = match s.or("allocation", a.allocation, "uniform".to_string())?.as_str() {
            "uniform" => ShotAllocation::Uniform,
            "weighted" => ShotAllocation::PrecisionWeighted,
            other => return Err(CliError::config(format!("unknown allocation '{other}'"))),
        };
        let noise = if backends.contains(&BackendName::Noisy) { Some(noise_model(&mut s, &a.common)?) } else { None };
        let seed = if sampled { s.seed(a.common.seed)? } else { 0 };
        plan_inputs = Some((kd, kt, shots));
        config_base = Some((margin, seed, allocation, noise));
    }
    let out_dir = s.out_dir(a.common.out_dir.clone())?;

    let template = read_series(&template_path)?;
    let data = read_series(&data_path)?;
    let plan: Option<SegmentPlan> = match plan_inputs {
        Some((kd, kt, shots)) => Some(plan_segments(data.len(), template.len(), kd, kt, shots)?),
        None => None,
    };

    let mut classical: Option<SnrSeries> = None;
    let mut results = Vec::new();
    for name in &backends {
        let started = Instant::now();
        let series = match hybrid_backend(*name, config_base.and_then(|c| c.3)) {
            None => oracle_snr(&template, &data)?,
            Some(backend) => {
                let (margin, seed, allocation, _) = config_base.expect("resolved with the hybrid options");
                let mut config = HybridConfig::new(backend, margin, seed);
                config.allocation = allocation;
                estimate_snr(&template, &data, plan.as_ref().expect("planned"), &config)?
            }
        };
        let elapsed = started.elapsed().as_secs_f64();
        let mut header = s.header().clone();
        header.set("backend", name);
        let path = write(&out_dir, &format!("snr_{name}.csv"), &io::snr_series_to_string(&series, &header))?;
        let peak = series.peak().expect("at least one lag");
        out!(
            "backend={name} peak_lag={} peak_time_s={} peak_snr={:.6} sigma={} shots={} runtime_s={elapsed:.3} file={}",
            peak.lag,
            series.time_of(peak.lag),
            peak.value,
            fmt_sigma(peak.sigma),
            series.meta().shots,
            path.display()
        );
        if *name == BackendName::Classical {
            classical = Some(series.clone());
        }
        results.push((*name, series));
    }
    if let Some(truth) = &classical {
        for (name, series) in results.iter().filter(|(n, _)| *n != BackendName::Classical) {
            out!("compare {name} vs classical: {}", compare_runs(series, truth)?.summary());
        }
    }
    Ok(())
}

fn scatter_csv(r: &AppendixResult, header: &Header) -> String {
    let mut out = String::new();
    for (k, v) in header.entries() {
        let _ = writeln!(out, "# {k}={v}");
    }
    out.push_str("dataset,lag,truth,estimate,error,sigma\n");
    for i in 0..r.truth.len() {
        let sigma = r.sigma[i].map(|s| s.to_string()).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{sigma}",
            r.dataset[i],
            r.lag[i],
            r.truth[i],
            r.estimate[i],
            r.estimate[i] - r.truth[i]
        );
    }
    out
}

fn report_csv(report: &ComparisonReport, extra: &[(&str, f64)], header: &Header) -> String {
    let mut out = String::new();
    for (k, v) in header.entries() {
        let _ = writeln!(out, "# {k}={v}");
    }
    out.push_str("metric,value\n");
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    let rows = [
        ("points", report.points.to_string()),
        ("correlation", opt(report.correlation)),
        ("error_correlation", opt(report.error_correlation_defined.then_some(report.error_correlation))),
        ("max_abs_error", report.max_abs_error.to_string()),
        ("rms_error", report.rms_error.to_string()),
        ("mean_error", report.mean_error.to_string()),
        ("peak_truth", report.peak_truth.to_string()),
        ("peak_estimate", report.peak_estimate.to_string()),
    ];
    for (k, v) in rows {
        let _ = writeln!(out, "{k},{v}");
    }
    for (k, v) in extra {
        let _ = writeln!(out, "{k},{v}");
    }
    out
}

pub fn appendix(a: AppendixArgs) -> CliResult<()> {
    let mut s = Settings::from_common("appendix-c", &a.common)?;
    let defaults = AppendixParams::default();
    let datasets = s.or("datasets", a.datasets, defaults.datasets)?;
    let points = s.or("points", a.points, defaults.points)?;
    let margin = s.or("margin", a.common.margin, defaults.margin)?;
    let shots = s.or("shots", a.common.shots, defaults.shots)?;
    let noise = noise_model(&mut s, &a.common)?;
    let seed = s.seed(a.common.seed)?;
    let out_dir = s.out_dir(a.common.out_dir.clone())?;
    if datasets == 0 || points < defaults.template.len() {
        return Err(CliError::config(format!("need at least one dataset of at least {} points", defaults.template.len())));
    }
    let params = AppendixParams { datasets, points, margin, shots, seed, ..defaults };
    for (label, backend) in [("noiseless", Backend::Statevector), ("noisy", Backend::Noisy(noise))] {
        let started = Instant::now();
        let r = appendix_c(&params, backend)?;
        let mut header = s.header().clone();
        header.set("backend", label);
        write(&out_dir, &format!("appendix_c_{label}.csv"), &scatter_csv(&r, &header))?;
        write(
            &out_dir,
            &format!("comparison_{label}.csv"),
            &report_csv(&r.report, &[("peak_ratio", r.peak_ratio)], &header),
        )?;
        out!(
            "{label}: {} peak_ratio={:.4} runtime_s={:.3}",
            r.report.summary(),
            r.peak_ratio,
            started.elapsed().as_secs_f64()
        );
    }
    Ok(())
}

pub fn condition(a: ConditionArgs) -> CliResult<()> {
    let mut s = Settings::from_common("condition", &a.common)?;
    let input: String = s.require("input", a.input)?;
    let cutoff = s.or("cutoff", a.cutoff, 99.98)?;
    let out_rate = s.or("out-rate", a.out_rate, 200.0)?;
    let whiten = s.or("whiten", a.no_whiten.then_some(false), true)?;
    let psd_path: Option<String> = s.opt("psd", a.psd)?;
    let psd_segment = s.or("psd-segment", a.psd_segment, 512usize)?;
    let taper = s.or("taper", a.taper, WhitenOptions::default().taper_fraction)?;
    let output = s.or("output", a.output, "conditioned.csv".to_string())?;
    let out_dir = s.out_dir(a.common.out_dir)?;
    let ts = read_series(&input)?;
    let down = if (ts.sample_rate() - out_rate).abs() <= 1e-9 * out_rate && cutoff >= out_rate / 2.0 {
        ts
    } else {
        sigproc::lowpass_downsample(&ts, cutoff, out_rate)?
    };
    let result = if whiten {
        let psd = match &psd_path {
            Some(p) => read_psd(p)?,
            None => {
                let psd = sigproc::welch_psd(&down, psd_segment.min(down.len()), Window::Hann, 0)?;
                write(&out_dir, "psd_used.csv", &io::psd_to_string(&psd, s.header()))?;
                psd
            }
        };
        sigproc::whiten_with(&down, &psd, WhitenOptions { taper_fraction: taper })?
    } else {
        down
    };
    let path = write(&out_dir, &output, &io::time_series_to_string(&result, s.header()))?;
    out!("samples={} sample_rate={} file={}", result.len(), result.sample_rate(), path.display());
    Ok(())
}

pub fn psd(a: PsdArgs) -> CliResult<()> {
    let mut s = Settings::from_common("psd", &a.common)?;
    let input: String = s.require("input", a.input)?;
    let segment = s.or("segment", a.segment, 512usize)?;
    let overlap = s.or("overlap", a.overlap, 0usize)?;
    let window = s.or("window", parse_flag("window", a.window)?, Window::Hann)?;
    let output = s.or("output", a.output, "psd.csv".to_string())?;
    let out_dir = s.out_dir(a.common.out_dir)?;
    let ts = read_series(&input)?;
    let psd = sigproc::welch_psd(&ts, segment, window, overlap)?;
    let path = write(&out_dir, &output, &io::psd_to_string(&psd, s.header()))?;
    out!(
        "bins={} resolution_hz={} total_power={:.6e} file={}",
        psd.power.len(),
        psd.resolution(),
        psd.total_power(),
        path.display()
    );
    Ok(())
}

pub fn synth_chirp(a: ChirpArgs) -> CliResult<()> {
    let mut s = Settings::from_common("synth-chirp", &a.common)?;
    let f_start = s.require("f-start", a.f_start)?;
    let f_end = s.require("f-end", a.f_end)?;
    let duration = s.require("duration", a.duration)?;
    let amplitude = s.or("amplitude", a.amplitude, 1.0)?;
    let taper = s.or("taper", a.taper, 0.2)?;
    let rate = s.or("rate", a.rate, 200.0)?;
    let output = s.or("output", a.output, "chirp.csv".to_string())?;
    let out_dir = s.out_dir(a.common.out_dir)?;
    let spec = ChirpSpec { f_start, f_end, duration, amplitude, taper_fraction: taper };
    let ts = sigproc::synth_chirp(&spec, rate)?;
    let path = write(&out_dir, &output, &io::time_series_to_string(&ts, s.header()))?;
    out!("samples={} file={}", ts.len(), path.display());
    Ok(())
}

pub fn synth_noise(a: NoiseArgs) -> CliResult<()> {
    let mut s = Settings::from_common("synth-noise", &a.common)?;
    let rate = s.or("rate", a.rate, 200.0)?;
    let length = s.require("length", a.length)?;
    let psd_path: Option<String> = s.opt("psd", a.psd)?;
    let exponent: Option<f64> = s.opt("exponent", a.exponent)?;
    let spectrum = match (psd_path, exponent) {
        (Some(p), _) => NoiseSpectrum::Psd(read_psd(&p)?),
        (None, Some(exponent)) => NoiseSpectrum::PowerLaw {
            level: s.or("level", a.level, 2.0 / rate)?,
            exponent,
            f_knee: s.or("knee", a.knee, 1.0)?,
        },
        (None, None) => NoiseSpectrum::White { sigma: s.or("sigma", a.sigma, 1.0)? },
    };
    let seed = s.seed(a.common.seed)?;
    let output = s.or("output", a.output, "noise.csv".to_string())?;
    let out_dir = s.out_dir(a.common.out_dir)?;
    let ts = sigproc::synth_noise(&spectrum, rate, length, seed)?;
    let path = write(&out_dir, &output, &io::time_series_to_string(&ts, s.header()))?;
    out!("samples={} file={}", ts.len(), path.display());
    Ok(())
}

pub fn synth_inject(a: InjectArgs) -> CliResult<()> {
    let mut s = Settings::from_common("synth-inject", &a.common)?;
    let data_path: String = s.require("data", a.data)?;
    let signal_path: String = s.require("signal", a.signal)?;
    let at = s.require("at", a.at)?;
    let scale = s.or("scale", a.scale, 1.0)?;
    let output = s.or("output", a.output, "injected.csv".to_string())?;
    let out_dir = s.out_dir(a.common.out_dir)?;
    let data = read_series(&data_path)?;
    let signal = read_series(&signal_path)?;
    let ts = sigproc::inject(&data, &signal, at, scale).map_err(|e| CliError::data(e.to_string()))?;
    let path = write(&out_dir, &output, &io::time_series_to_string(&ts, s.header()))?;
    out!("samples={} file={}", ts.len(), path.display());
    Ok(())
}

fn resolve_plan(command: &str, a: PlanArgs) -> CliResult<(Settings, SegmentPlan, PathBuf)> {
    let mut s = Settings::from_common(command, &a.common)?;
    let template_path: Option<String> = s.opt("template", a.template)?;
    let data_path: Option<String> = s.opt("data", a.data)?;
    let n = match template_path {
        Some(p) => read_series(&p)?.len(),
        None => s.require("template-len", a.template_len)?,
    };
    let l = match data_path {
        Some(p) => read_series(&p)?.len(),
        None => s.require("data-len", a.data_len)?,
    };
    let kd = s.or("kd", parse_flag("kd", a.common.kd)?, SegmentLength::Auto)?;
    let kt = s.or("kt", a.common.kt, n)?;
    let shots = s.or("shots", a.common.shots, 10_000u64)?;
    let out_dir = s.out_dir(a.common.out_dir)?;
    let plan = plan_segments(l, n, kd, kt, shots)?;
    Ok((s, plan, out_dir))
}

pub fn plan(a: PlanArgs) -> CliResult<()> {
    let (s, plan, out_dir) = resolve_plan("plan", a)?;
    let mut out = String::new();
    for (k, v) in s.header().entries() {
        let _ = writeln!(out, "# {k}={v}");
    }
    out.push_str("segment,nominal_start,start,lag_start,lag_end,chunk,chunk_offset,chunk_len,window_start,window_len\n");
    for (g, seg) in plan.segments().iter().enumerate() {
        for (m, chunk) in plan.chunks().iter().enumerate() {
            let (ws, wl) = plan.data_window(seg, chunk);
            let _ = writeln!(
                out,
                "{g},{},{},{},{},{m},{},{},{ws},{wl}",
                seg.nominal_start, seg.start, seg.lags.start, seg.lags.end, chunk.offset, chunk.len
            );
        }
    }
    let path = write(&out_dir, "plan.csv", &out)?;
    let stationary = crate::hybrid::stationary_segment_length(plan.k_t());
    out!(
        "stationary_k={stationary:.4} chosen_kd={} kt={} segments={} chunks={} runs={} lags={} file={}",
        plan.k_d(),
        plan.k_t(),
        plan.segments().len(),
        plan.chunks().len(),
        plan.num_runs(),
        plan.num_lags(),
        path.display()
    );
    Ok(())
}

pub fn resources(a: PlanArgs) -> CliResult<()> {
    let (s, plan, out_dir) = resolve_plan("resources", a)?;
    let r = resource_report(plan.template_len(), plan.data_len(), &plan)?;
    let mut out = String::new();
    for (k, v) in s.header().entries() {
        let _ = writeln!(out, "# {k}={v}");
    }
    out.push_str("metric,value\n");
    let rows: [(&str, String); 20] = [
        ("template_len", r.template_len.to_string()),
        ("data_len", r.data_len.to_string()),
        ("k_d", r.k_d.to_string()),
        ("k_t", r.k_t.to_string()),
        ("data_qubits", r.data_qubits.to_string()),
        ("template_qubits", r.template_qubits.to_string()),
        ("qubits_per_run", r.qubits_per_run().to_string()),
        ("total_qubits", r.total_qubits().to_string()),
        ("output_bits", r.output_bits.to_string()),
        ("lags_per_segment", r.lags_per_segment.to_string()),
        ("segments", r.segments.to_string()),
        ("chunks", r.chunks.to_string()),
        ("runs", r.runs.to_string()),
        ("combine_layers", r.combine_layers.to_string()),
        ("loader_depth", r.loader_depth.to_string()),
        ("cswaps_per_run", r.cswaps_per_run.to_string()),
        ("shots_per_run", r.shots_per_run.to_string()),
        ("total_shots", r.total_shots.to_string()),
        ("decoder_or_gates", r.decoder_or_gates.to_string()),
        ("decoder_and_gates", r.decoder_and_gates.to_string()),
    ];
    for (k, v) in rows {
        let _ = writeln!(out, "{k},{v}");
    }
    let path = write(&out_dir, "resources.csv", &out)?;
    out!("{}", r.summary());
    out!("file={}", path.display());
    Ok(())
}

pub fn compare(a: CompareArgs) -> CliResult<()> {
    let mut s = Settings::from_common("compare", &a.common)?;
    let est_path: String = s.require("estimate", a.estimate)?;
    let truth_path: String = s.require("truth", a.truth)?;
    let out_dir = s.out_dir(a.common.out_dir)?;
    let read = |p: &str| {
        io::read_snr_series(Path::new(p))
            .map(|(x, _)| x)
            .map_err(|e| CliError::data(format!("{p}: {e}")))
    };
    let est = read(&est_path)?;
    let truth = read(&truth_path)?;
    let report = compare_runs(&est, &truth).map_err(|e| CliError::data(e.to_string()))?;
    let mut scatter = String::new();
    for (k, v) in s.header().entries() {
        let _ = writeln!(scatter, "# {k}={v}");
    }
    scatter.push_str("lag,truth,estimate,error,z\n");
    for ((t, e), z) in truth.estimates().iter().zip(est.estimates()).zip(&report.z_scores) {
        let z = z.map(|z| z.to_string()).unwrap_or_default();
        let _ = writeln!(scatter, "{},{},{},{},{z}", t.lag, t.value, e.value, e.value - t.value);
    }
    write(&out_dir, "comparison_points.csv", &scatter)?;
    write(&out_dir, "comparison.csv", &report_csv(&report, &[], s.header()))?;
    out!("{}", report.summary());
    Ok(())
}

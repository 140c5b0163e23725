use std::ops::Range;

use crate::{Error, Result};

/// Data segment length selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SegmentLength {
    Fixed(usize),
    /// Integer minimizer of [`segment_cost`] for the chunk length.
    Auto,
}

impl std::str::FromStr for SegmentLength {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(SegmentLength::Auto);
        }
        s.parse()
            .map(SegmentLength::Fixed)
            .map_err(|_| Error::InvalidParameter(format!("segment length must be an integer or 'auto', got '{s}'")))
    }
}

impl std::fmt::Display for SegmentLength {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SegmentLength::Fixed(k) => write!(f, "{k}"),
            SegmentLength::Auto => f.write_str("auto"),
        }
    }
}

/// One data segment. It is loaded from `start`, but only the lags in
/// `lags` are taken from it; the last segment is pulled back to end at
/// the data boundary and its repeated lags are dropped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlannedSegment {
    pub nominal_start: usize,
    pub start: usize,
    pub lags: Range<usize>,
}

/// Contiguous, non-overlapping slice of the template.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TemplateChunk {
    pub offset: usize,
    pub len: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SegmentPlan {
    data_len: usize,
    template_len: usize,
    k_d: usize,
    k_t: usize,
    segments: Vec<PlannedSegment>,
    chunks: Vec<TemplateChunk>,
    shots_per_run: u64,
    stationary_k: Option<f64>,
}

impl SegmentPlan {
    pub fn data_len(&self) -> usize {
        self.data_len
    }

    pub fn template_len(&self) -> usize {
        self.template_len
    }

    pub fn k_d(&self) -> usize {
        self.k_d
    }

    /// Chunk length; never larger than the template.
    pub fn k_t(&self) -> usize {
        self.k_t
    }

    pub fn lags_per_segment(&self) -> usize {
        self.k_d - self.k_t + 1
    }

    pub fn num_lags(&self) -> usize {
        self.data_len - self.template_len + 1
    }

    pub fn segments(&self) -> &[PlannedSegment] {
        &self.segments
    }

    pub fn chunks(&self) -> &[TemplateChunk] {
        &self.chunks
    }

    pub fn shots_per_run(&self) -> u64 {
        self.shots_per_run
    }

    pub fn num_runs(&self) -> usize {
        self.segments.len() * self.chunks.len()
    }

    /// Real root of the cost stationarity condition when `k_d` was chosen
    /// automatically.
    pub fn stationary_k(&self) -> Option<f64> {
        self.stationary_k
    }

    /// Lags a run can resolve: `min(k_d - k_t + 1, L - N + 1)`.
    pub fn run_lags(&self) -> usize {
        self.lags_per_segment().min(self.num_lags())
    }

    /// Data window `(start, len)` loaded for a segment/chunk pair.
    pub fn data_window(&self, segment: &PlannedSegment, chunk: &TemplateChunk) -> (usize, usize) {
        (segment.start + chunk.offset, self.run_lags() + chunk.len - 1)
    }
}

/// Per-sample cost of segmenting with length `k` for a template of length
/// `n`: `k·(ln k)² / (k − n)`. Infinite when `k <= n`.
pub fn segment_cost(k: f64, n: usize) -> f64 {
    if k <= n as f64 {
        return f64::INFINITY;
    }
    k * k.ln().powi(2) / (k - n as f64)
}

/// Root of `n = 2k / (ln k + 2)` above `n`, where [`segment_cost`] is
/// stationary.
pub fn stationary_segment_length(n: usize) -> f64 {
    let nf = n as f64;
    let f = |k: f64| 2.0 * k - nf * (k.ln() + 2.0);
    if n <= 1 {
        return 1.0;
    }
    let mut lo = nf;
    let mut hi = 2.0 * nf;
    while f(hi) <= 0.0 {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Integer segment length minimizing [`segment_cost`], with the real root.
pub fn optimal_segment_length(n: usize) -> (usize, f64) {
    let root = stationary_segment_length(n);
    let lowest = n + 1;
    let base = root.floor() as usize;
    let best = (base.saturating_sub(1)..=base + 2)
        .map(|k| k.max(lowest))
        .min_by(|a, b| segment_cost(*a as f64, n).total_cmp(&segment_cost(*b as f64, n)).then(a.cmp(b)))
        .unwrap_or(lowest);
    (best, root)
}

/// Splits `data_len` samples into overlapping segments of `k_d` and the
/// template into chunks of `k_t`, covering every lag `0..=L-N` exactly once.
pub fn plan_segments(
    data_len: usize,
    template_len: usize,
    k_d: SegmentLength,
    k_t: usize,
    shots_per_run: u64,
) -> Result<SegmentPlan> {
    if data_len == 0 || template_len == 0 {
        return Err(Error::InfeasiblePlan("empty data or template".into()));
    }
    if template_len > data_len {
        return Err(Error::LengthMismatch { template: template_len, data: data_len });
    }
    if k_t == 0 {
        return Err(Error::InfeasiblePlan("template chunk length must be at least 1".into()));
    }
    if shots_per_run == 0 {
        return Err(Error::InfeasiblePlan("shots per run must be positive".into()));
    }
    let k_t = k_t.min(template_len);
    let (k_d, stationary_k) = match k_d {
        SegmentLength::Fixed(k) => (k, None),
        SegmentLength::Auto => {
            let (k, root) = optimal_segment_length(k_t);
            (k.min(data_len).max(k_t), Some(root))
        }
    };
    if k_d < k_t {
        return Err(Error::InfeasiblePlan(format!("segment length {k_d} shorter than chunk length {k_t}")));
    }
    if k_d > data_len {
        return Err(Error::InfeasiblePlan(format!("segment length {k_d} exceeds data length {data_len}")));
    }
    let lags = data_len - template_len + 1;
    let stride = k_d - k_t + 1;
    let segments = (0..lags)
        .step_by(stride)
        .map(|nominal_start| PlannedSegment {
            nominal_start,
            start: nominal_start.min(lags.saturating_sub(stride)),
            lags: nominal_start..(nominal_start + stride).min(lags),
        })
        .collect();
    let chunks = (0..template_len)
        .step_by(k_t)
        .map(|offset| TemplateChunk { offset, len: k_t.min(template_len - offset) })
        .collect();
    Ok(SegmentPlan {
        data_len,
        template_len,
        k_d,
        k_t,
        segments,
        chunks,
        shots_per_run,
        stationary_k,
    })
}

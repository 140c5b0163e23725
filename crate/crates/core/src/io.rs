//! Text formats shared by the CLI, the tests and downstream tooling.
//!
//! Every file starts with `# key=value` lines carrying provenance, followed
//! by a CSV column header and rows. Floats are written in shortest
//! round-trip form, so `read(write(x)) == x` bit for bit.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use crate::matched::{Provenance, SeriesMeta, SnrEstimate, SnrSeries, TimeSeries};
use crate::sigproc::{PsdEstimate, Window};
use crate::simulator::ShotHistogram;
use crate::{Error, Result};

pub const TIME_SERIES_COLUMNS: &str = "index,time_s,value";
pub const PSD_COLUMNS: &str = "freq_hz,power";
pub const SNR_COLUMNS: &str = "lag,time_s,snr,sigma";
pub const HISTOGRAM_COLUMNS: &str = "bitstring,count";

/// Ordered `key=value` metadata lines.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Header {
    entries: Vec<(String, String)>,
}

impl Header {
    pub fn new() -> Self {
        Self::default()
    }

    /// Sets `key`, replacing an earlier value in place.
    pub fn set(&mut self, key: impl Into<String>, value: impl ToString) -> &mut Self {
        let key = key.into();
        let value = value.to_string();
        match self.entries.iter_mut().find(|(k, _)| *k == key) {
            Some(slot) => slot.1 = value,
            None => self.entries.push((key, value)),
        }
        self
    }

    pub fn with(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.set(key, value);
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    /// Appends every entry of `other` not already present.
    pub fn extend_from(&mut self, other: &Header) {
        for (k, v) in &other.entries {
            if self.get(k).is_none() {
                self.entries.push((k.clone(), v.clone()));
            }
        }
    }

    fn parse_value<T: std::str::FromStr>(&self, key: &str, line: usize) -> Result<Option<T>> {
        self.get(key)
            .map(|v| {
                v.parse().map_err(|_| Error::Parse { line, message: format!("bad value '{v}' for header key '{key}'") })
            })
            .transpose()
    }

    fn render(&self, out: &mut String) {
        for (k, v) in &self.entries {
            let _ = writeln!(out, "# {k}={v}");
        }
    }
}

/// Writes `contents` to a sibling temp file and renames it over `path`.
pub fn atomic_write(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(format!("{}: {}", path.display(), e.error)))?;
    Ok(())
}

pub fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

struct Table {
    header: Header,
    columns: Vec<String>,
    /// `(1-based line number, fields)`.
    rows: Vec<(usize, Vec<String>)>,
}

fn parse_table(text: &str) -> Result<Table> {
    let mut header = Header::new();
    let mut columns: Option<Vec<String>> = None;
    let mut rows = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let lineno = i + 1;
        if line.is_empty() {
            continue;
        }
        if let Some(meta) = line.strip_prefix('#') {
            if let Some((k, v)) = meta.trim().split_once('=') {
                header.set(k.trim(), v.trim());
            }
            continue;
        }
        let fields: Vec<String> = line.split(',').map(|f| f.trim().to_string()).collect();
        if columns.is_none() {
            columns = Some(fields);
        } else {
            rows.push((lineno, fields));
        }
    }
    let columns = columns.ok_or(Error::Parse { line: 0, message: "missing column header".into() })?;
    Ok(Table { header, columns, rows })
}

impl Table {
    fn expect_columns(&self, expected: &str) -> Result<()> {
        let found = self.columns.join(",");
        if found != expected {
            return Err(Error::Parse { line: 0, message: format!("expected columns '{expected}', found '{found}'") });
        }
        Ok(())
    }

    fn field<T: std::str::FromStr>(line: usize, fields: &[String], idx: usize, name: &str) -> Result<T> {
        let raw = fields
            .get(idx)
            .ok_or_else(|| Error::Parse { line, message: format!("missing column '{name}'") })?;
        raw.parse().map_err(|_| Error::Parse { line, message: format!("bad {name} '{raw}'") })
    }
}

pub fn time_series_to_string(ts: &TimeSeries, header: &Header) -> String {
    let mut out = String::new();
    let mut h = header.clone();
    h.set("sample_rate", ts.sample_rate()).set("epoch", ts.epoch());
    h.render(&mut out);
    let _ = writeln!(out, "{TIME_SERIES_COLUMNS}");
    for (i, v) in ts.samples().iter().enumerate() {
        let _ = writeln!(out, "{i},{},{v}", ts.time_at(i));
    }
    out
}

/// Accepts the full `index,time_s,value` layout or a bare `value` column.
/// Without a `sample_rate` header the rate comes from the first time step.
pub fn parse_time_series(text: &str) -> Result<(TimeSeries, Header)> {
    let table = parse_table(text)?;
    let value_col = match table.columns.join(",").as_str() {
        TIME_SERIES_COLUMNS => 2,
        "value" => 0,
        other => {
            return Err(Error::Parse { line: 0, message: format!("expected columns '{TIME_SERIES_COLUMNS}', found '{other}'") })
        }
    };
    let mut values = Vec::with_capacity(table.rows.len());
    let mut times = Vec::new();
    for (line, fields) in &table.rows {
        if value_col == 2 {
            let index: usize = Table::field(*line, fields, 0, "index")?;
            if index != values.len() {
                return Err(Error::Parse { line: *line, message: format!("expected index {}, found {index}", values.len()) });
            }
            times.push(Table::field::<f64>(*line, fields, 1, "time_s")?);
        }
        values.push(Table::field::<f64>(*line, fields, value_col, "value")?);
    }
    let rate = match table.header.parse_value::<f64>("sample_rate", 0)? {
        Some(r) => r,
        None if times.len() >= 2 => 1.0 / (times[1] - times[0]),
        None => 1.0,
    };
    let epoch = match table.header.parse_value::<f64>("epoch", 0)? {
        Some(e) => e,
        None => times.first().copied().unwrap_or(0.0),
    };
    let ts = TimeSeries::new(values, rate, epoch)?;
    Ok((ts, table.header))
}

pub fn psd_to_string(psd: &PsdEstimate, header: &Header) -> String {
    let mut out = String::new();
    let mut h = header.clone();
    h.set("segment_length", psd.segment_length).set("window", psd.window);
    h.render(&mut out);
    let _ = writeln!(out, "{PSD_COLUMNS}");
    for (f, p) in psd.frequencies.iter().zip(&psd.power) {
        let _ = writeln!(out, "{f},{p}");
    }
    out
}

pub fn parse_psd(text: &str) -> Result<(PsdEstimate, Header)> {
    let table = parse_table(text)?;
    table.expect_columns(PSD_COLUMNS)?;
    let mut freqs = Vec::new();
    let mut power = Vec::new();
    for (line, fields) in &table.rows {
        freqs.push(Table::field::<f64>(*line, fields, 0, "freq_hz")?);
        power.push(Table::field::<f64>(*line, fields, 1, "power")?);
    }
    let seg = table.header.parse_value::<usize>("segment_length", 0)?.unwrap_or(2 * freqs.len().saturating_sub(1));
    let window = table.header.parse_value::<Window>("window", 0)?.unwrap_or_default();
    Ok((PsdEstimate::new(freqs, power, seg, window)?, table.header))
}

pub fn snr_series_to_string(series: &SnrSeries, header: &Header) -> String {
    let meta = series.meta();
    let mut out = String::new();
    let mut h = header.clone();
    h.set("provenance", meta.provenance)
        .set("total_shots", meta.shots)
        .set("sample_rate", meta.sample_rate)
        .set("epoch", meta.epoch);
    if let Some(seed) = meta.seed {
        h.set("seed", seed);
    }
    h.render(&mut out);
    let _ = writeln!(out, "{SNR_COLUMNS}");
    for e in series.estimates() {
        let sigma = e.sigma.map(|s| s.to_string()).unwrap_or_default();
        let _ = writeln!(out, "{},{},{},{sigma}", e.lag, series.time_of(e.lag), e.value);
    }
    out
}

pub fn parse_snr_series(text: &str) -> Result<(SnrSeries, Header)> {
    let table = parse_table(text)?;
    table.expect_columns(SNR_COLUMNS)?;
    let mut estimates = Vec::with_capacity(table.rows.len());
    let mut first_time = None;
    let mut second_time = None;
    for (line, fields) in &table.rows {
        let lag = Table::field(*line, fields, 0, "lag")?;
        let t: f64 = Table::field(*line, fields, 1, "time_s")?;
        match estimates.len() {
            0 => first_time = Some(t),
            1 => second_time = Some(t),
            _ => {}
        }
        let value = Table::field(*line, fields, 2, "snr")?;
        let sigma = match fields.get(3).map(|s| s.as_str()) {
            None | Some("") => None,
            Some(_) => Some(Table::field(*line, fields, 3, "sigma")?),
        };
        estimates.push(SnrEstimate { lag, value, sigma });
    }
    let h = &table.header;
    let provenance = h.parse_value::<Provenance>("provenance", 0)?.unwrap_or(Provenance::Oracle);
    let sample_rate = match (h.parse_value::<f64>("sample_rate", 0)?, first_time, second_time) {
        (Some(r), _, _) => r,
        (None, Some(a), Some(b)) => 1.0 / (b - a),
        _ => 1.0,
    };
    let meta = SeriesMeta {
        provenance,
        shots: h.parse_value("total_shots", 0)?.unwrap_or(0),
        seed: h.parse_value("seed", 0)?,
        epoch: h.parse_value("epoch", 0)?.or(first_time).unwrap_or(0.0),
        sample_rate,
    };
    Ok((SnrSeries::new(estimates, meta)?, table.header))
}

pub fn histogram_to_string(hist: &ShotHistogram, header: &Header) -> String {
    let mut out = String::new();
    let mut h = header.clone();
    h.set("shots", hist.total_shots()).set("width", hist.width());
    h.render(&mut out);
    let _ = writeln!(out, "{HISTOGRAM_COLUMNS}");
    for (o, c) in hist.iter() {
        let _ = writeln!(out, "{},{c}", hist.bitstring(o));
    }
    out
}

pub fn parse_histogram(text: &str) -> Result<(ShotHistogram, Header)> {
    let table = parse_table(text)?;
    table.expect_columns(HISTOGRAM_COLUMNS)?;
    let width = match table.header.parse_value::<usize>("width", 0)? {
        Some(w) => w,
        None => table.rows.first().map(|(_, f)| f[0].len()).unwrap_or(0),
    };
    let mut hist = ShotHistogram::new(width.min(64));
    for (line, fields) in &table.rows {
        let bits: String = Table::field(*line, fields, 0, "bitstring")?;
        let outcome = hist
            .parse_bitstring(&bits)
            .map_err(|e| Error::Parse { line: *line, message: e.to_string() })?;
        hist.add(outcome, Table::field(*line, fields, 1, "count")?);
    }
    if let Some(shots) = table.header.parse_value::<u64>("shots", 0)? {
        if shots != hist.total_shots() {
            return Err(Error::Parse {
                line: 0,
                message: format!("header says {shots} shots, rows sum to {}", hist.total_shots()),
            });
        }
    }
    Ok((hist, table.header))
}

pub fn write_time_series(path: &Path, ts: &TimeSeries, header: &Header) -> Result<()> {
    atomic_write(path, &time_series_to_string(ts, header))
}

pub fn read_time_series(path: &Path) -> Result<(TimeSeries, Header)> {
    parse_time_series(&read_file(path)?)
}

pub fn write_psd(path: &Path, psd: &PsdEstimate, header: &Header) -> Result<()> {
    atomic_write(path, &psd_to_string(psd, header))
}

pub fn read_psd(path: &Path) -> Result<(PsdEstimate, Header)> {
    parse_psd(&read_file(path)?)
}

pub fn write_snr_series(path: &Path, series: &SnrSeries, header: &Header) -> Result<()> {
    atomic_write(path, &snr_series_to_string(series, header))
}

pub fn read_snr_series(path: &Path) -> Result<(SnrSeries, Header)> {
    parse_snr_series(&read_file(path)?)
}

pub fn write_histogram(path: &Path, hist: &ShotHistogram, header: &Header) -> Result<()> {
    atomic_write(path, &histogram_to_string(hist, header))
}

pub fn read_histogram(path: &Path) -> Result<(ShotHistogram, Header)> {
    parse_histogram(&read_file(path)?)
}

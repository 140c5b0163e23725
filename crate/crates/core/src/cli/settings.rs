use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use super::{CliError, CliResult, CommonArgs};
use crate::io::Header;
use crate::{rng, Error};

/// Keys any command understands. Anything else in a config file is a typo,
/// except the provenance keys that output files carry.
const KNOWN_KEYS: &[&str] = &[
    "seed", "shots", "kd", "kt", "margin", "backend", "p-cx", "p-ro", "out-dir", "template", "data", "allocation",
    "datasets", "points", "input", "cutoff", "out-rate", "psd", "psd-segment", "taper", "whiten", "output", "segment",
    "overlap", "window", "f-start", "f-end", "duration", "amplitude", "rate", "length", "sigma", "exponent", "level",
    "knee", "signal", "at", "scale", "template-len", "data-len",
];
const PROVENANCE_KEYS: &[&str] = &[
    "command", "version", "provenance", "total_shots", "sample_rate", "epoch", "segment_length", "width",
];

/// Resolves options from flags, then the config file, then defaults, and
/// records every resolved value for output headers.
#[derive(Debug, Clone)]
pub struct Settings {
    file: BTreeMap<String, String>,
    header: Header,
}

impl Settings {
    pub fn load(command: &str, config: Option<&Path>) -> CliResult<Self> {
        let file = match config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::config(format!("cannot read config {}: {e}", path.display())))?;
                parse_config(&text)?
            }
            None => BTreeMap::new(),
        };
        let header = Header::new().with("command", command).with("version", env!("CARGO_PKG_VERSION"));
        Ok(Self { file, header })
    }

    pub fn from_common(command: &str, common: &CommonArgs) -> CliResult<Self> {
        Self::load(command, common.config.as_deref())
    }

    pub fn header(&self) -> &Header {
        &self.header
    }

    fn lookup<T: FromStr>(&self, key: &str, flag: Option<T>) -> CliResult<Option<T>> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.file.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|_| CliError::config(format!("bad value '{raw}' for '{key}'"))),
        }
    }

    /// Optional value; recorded when present.
    pub fn opt<T: FromStr + fmt::Display>(&mut self, key: &str, flag: Option<T>) -> CliResult<Option<T>> {
        let v = self.lookup(key, flag)?;
        if let Some(v) = &v {
            self.header.set(key, v);
        }
        Ok(v)
    }

    pub fn or<T: FromStr + fmt::Display>(&mut self, key: &str, flag: Option<T>, default: T) -> CliResult<T> {
        let v = self.lookup(key, flag)?.unwrap_or(default);
        self.header.set(key, &v);
        Ok(v)
    }

    pub fn require<T: FromStr + fmt::Display>(&mut self, key: &str, flag: Option<T>) -> CliResult<T> {
        self.opt(key, flag)?
            .ok_or_else(|| CliError::config(format!("missing required option --{key}")))
    }

    /// Resolved seed, drawing and printing a fresh one when none is given.
    pub fn seed(&mut self, flag: Option<u64>) -> CliResult<u64> {
        let seed = match self.lookup("seed", flag)? {
            Some(s) => s,
            None => {
                let s = rng::random_seed();
                out!("seed={s} (randomly selected)");
                s
            }
        };
        self.header.set("seed", seed);
        Ok(seed)
    }

    pub fn out_dir(&mut self, flag: Option<PathBuf>) -> CliResult<PathBuf> {
        let dir = self.or("out-dir", flag.map(|p| p.display().to_string()), ".".to_string())?;
        let dir = PathBuf::from(dir);
        std::fs::create_dir_all(&dir)
            .map_err(|e| CliError::internal(format!("cannot create {}: {e}", dir.display())))?;
        Ok(dir)
    }
}

/// `key=value` lines. A leading `#` is stripped, so the header of any
/// output file parses; the first non-`key=value` line ends the file.
pub fn parse_config(text: &str) -> CliResult<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let body = line.trim_start_matches('#').trim();
        let Some((k, v)) = body.split_once('=') else {
            if line.starts_with('#') {
                continue;
            }
            break;
        };
        let key = k.trim().to_string();
        if PROVENANCE_KEYS.contains(&key.as_str()) {
            continue;
        }
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(CliError::config(format!("unknown config key '{key}' on line {}", i + 1)));
        }
        map.insert(key, v.trim().to_string());
    }
    Ok(map)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum BackendName {
    Classical,
    Exact,
    Ideal,
    Statevector,
    Noisy,
}

impl BackendName {
    pub fn as_str(&self) -> &'static str {
        match self {
            BackendName::Classical => "classical",
            BackendName::Exact => "exact",
            BackendName::Ideal => "ideal",
            BackendName::Statevector => "statevector",
            BackendName::Noisy => "noisy",
        }
    }

    pub fn parse_list(s: &str) -> CliResult<Vec<BackendName>> {
        let mut out: Vec<BackendName> = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let b: BackendName = part.parse().map_err(|e: Error| CliError::config(e.to_string()))?;
            if !out.contains(&b) {
                out.push(b);
            }
        }
        if out.is_empty() {
            return Err(CliError::config("no backend selected"));
        }
        Ok(out)
    }
}

impl fmt::Display for BackendName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BackendName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Ok(match s {
            "classical" | "oracle" => BackendName::Classical,
            "exact" | "hybrid-exact" => BackendName::Exact,
            "ideal" | "hybrid-ideal" => BackendName::Ideal,
            "statevector" | "sim" | "hybrid-sim" => BackendName::Statevector,
            "noisy" | "hybrid-noisy" => BackendName::Noisy,
            other => return Err(Error::InvalidParameter(format!("unknown backend '{other}'"))),
        })
    }
}

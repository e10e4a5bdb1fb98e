//! Run configuration: a `key = value` file, then command-line overrides.
//!
//! Recognised keys: `suite` (comma-separated ids, `all`, or empty for none),
//! `seed`, `grid`, `trials`, `out`, `format` (comma-separated), `timing`
//! and `tol.<name>`. Lines starting with `#` are comments.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::report::Format;

/// Environment variable that overrides the output directory of a config file.
pub const OUT_ENV: &str = "CWIKEL_LAB_OUT";

pub const DEFAULT_SEED: u64 = 20_240_607;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Selection {
    All,
    Only(Vec<String>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub selection: Selection,
    pub seed: u64,
    /// Points per axis for the one-dimensional classical suites.
    pub grid: Option<usize>,
    /// Number of random instances per randomized check.
    pub trials: Option<usize>,
    pub out: PathBuf,
    pub formats: Vec<Format>,
    /// Record wall time per row; off by default so reports are byte-stable.
    pub timing: bool,
    pub tolerances: BTreeMap<String, f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            selection: Selection::All,
            seed: DEFAULT_SEED,
            grid: None,
            trials: None,
            out: PathBuf::from("lab-out"),
            formats: vec![Format::Csv],
            timing: false,
            tolerances: BTreeMap::new(),
        }
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, found `{text}`")]
    Syntax { line: usize, text: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: bad value for `{key}`: {reason}")]
    Value { line: usize, key: String, reason: String },
    #[error("cannot read {path}: {reason}")]
    Io { path: PathBuf, reason: String },
}

pub fn parse_list(v: &str) -> Vec<String> {
    v.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect()
}

pub fn parse_selection(v: &str) -> Selection {
    if v.trim() == "all" {
        Selection::All
    } else {
        Selection::Only(parse_list(v))
    }
}

pub fn parse_formats(v: &str) -> Result<Vec<Format>, String> {
    let mut out: Vec<Format> = parse_list(v).iter().map(|s| s.parse()).collect::<Result<_, _>>()?;
    out.sort();
    out.dedup();
    Ok(out)
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.trim();
            if body.is_empty() || body.starts_with('#') {
                continue;
            }
            let Some((key, value)) = body.split_once('=') else {
                return Err(ConfigError::Syntax { line, text: body.into() });
            };
            let (key, value) = (key.trim(), value.trim());
            let bad = |reason: String| ConfigError::Value { line, key: key.into(), reason };
            match key {
                "suite" => cfg.selection = parse_selection(value),
                "seed" => cfg.seed = value.parse().map_err(|e| bad(format!("{e}")))?,
                "grid" => cfg.grid = Some(value.parse().map_err(|e| bad(format!("{e}")))?),
                "trials" => cfg.trials = Some(value.parse().map_err(|e| bad(format!("{e}")))?),
                "out" => cfg.out = PathBuf::from(value),
                "format" => cfg.formats = parse_formats(value).map_err(bad)?,
                "timing" => cfg.timing = value.parse().map_err(|e| bad(format!("{e}")))?,
                _ => match key.strip_prefix("tol.") {
                    Some(name) if !name.is_empty() => {
                        let v: f64 = value.parse().map_err(|e| bad(format!("{e}")))?;
                        if !(v.is_finite() && v > 0.0) {
                            return Err(bad("tolerance must be positive".into()));
                        }
                        cfg.tolerances.insert(name.into(), v);
                    }
                    _ => return Err(ConfigError::UnknownKey { line, key: key.into() }),
                },
            }
        }
        Ok(cfg)
    }

    /// Reads a config file without consulting the environment.
    pub fn read(path: &Path) -> Result<Self, ConfigError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| ConfigError::Io { path: path.into(), reason: e.to_string() })?;
        Self::parse(&text)
    }

    /// Reads a config file; `CWIKEL_LAB_OUT`, when set, replaces its `out`.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let mut cfg = Self::read(path)?;
        if let Some(dir) = std::env::var_os(OUT_ENV) {
            cfg.out = PathBuf::from(dir);
        }
        Ok(cfg)
    }

    pub fn tolerance(&self, name: &str, default: f64) -> f64 {
        self.tolerances.get(name).copied().unwrap_or(default)
    }

    pub fn trials_or(&self, default: usize) -> usize {
        self.trials.unwrap_or(default)
    }
}

//! Report rows and their CSV, JSON and plot-data renderings.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const CSV_HEADER: [&str; 7] = ["experiment", "paper_ref", "param_json", "claimed", "observed", "verdict", "seconds"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Holds,
    Fails,
    RecordedOnly,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
            Verdict::RecordedOnly => "recorded-only",
        })
    }
}

/// The quantity or relation a row tests.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Claim {
    /// observed value must not exceed the bound
    AtMost(f64),
    /// observed value is compared with an exact value
    Equals(f64),
    /// a scanned sequence is strictly increasing; observed is its smallest increment
    Increasing,
    /// nothing is asserted
    Recorded,
}

impl fmt::Display for Claim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Claim::AtMost(v) => write!(f, "<= {}", float(*v)),
            Claim::Equals(v) => write!(f, "= {}", float(*v)),
            Claim::Increasing => f.write_str("strictly increasing"),
            Claim::Recorded => f.write_str("recorded"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub paper_ref: String,
    pub params: BTreeMap<String, Value>,
    pub claimed: Claim,
    /// `None` when the computation failed or produced a non-finite value
    pub observed: Option<f64>,
    pub verdict: Verdict,
    pub seconds: f64,
    pub details: BTreeMap<String, Value>,
    /// `(x, y)` series written to the plot-data file
    pub plot: Vec<(f64, f64)>,
}

impl ExperimentReport {
    pub fn param_json(&self) -> String {
        serde_json::to_string(&self.params).expect("string-keyed map serializes")
    }

    pub fn param(&self, key: &str) -> Option<&Value> {
        self.params.get(key)
    }

    pub fn detail(&self, key: &str) -> Option<f64> {
        self.details.get(key).and_then(Value::as_f64)
    }

    fn sort_key(&self) -> (String, [u8; 32]) {
        (self.experiment.clone(), Sha256::digest(self.param_json().as_bytes()).into())
    }
}

/// Orders rows by experiment id, then by the SHA-256 of their parameter JSON.
pub fn sort_reports(reports: &mut [ExperimentReport]) {
    reports.sort_by_cached_key(ExperimentReport::sort_key);
}

/// Twelve significant digits.
pub fn float(v: f64) -> String {
    format!("{v:.11e}")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Plotdata,
}

impl Format {
    pub const ALL: [Format; 3] = [Format::Csv, Format::Json, Format::Plotdata];

    pub fn name(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Plotdata => "plotdata",
        }
    }
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Format::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| format!("unknown format `{s}` (expected csv, json or plotdata)"))
    }
}

#[derive(Debug, thiserror::Error)]
pub enum EmitError {
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub fn to_csv(reports: &[ExperimentReport]) -> Result<String, EmitError> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for r in reports {
        w.write_record([
            r.experiment.clone(),
            r.paper_ref.clone(),
            r.param_json(),
            r.claimed.to_string(),
            r.observed.map(float).unwrap_or_default(),
            r.verdict.to_string(),
            float(r.seconds),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| EmitError::Io { path: PathBuf::from("<memory>"), source: e.into_error() })?;
    Ok(String::from_utf8(bytes).expect("csv fields are UTF-8"))
}

pub fn to_json(reports: &[ExperimentReport]) -> Result<String, EmitError> {
    let mut s = serde_json::to_string_pretty(reports)?;
    s.push('\n');
    Ok(s)
}

pub fn from_json(text: &str) -> Result<Vec<ExperimentReport>, EmitError> {
    Ok(serde_json::from_str(text)?)
}

/// Whitespace-separated `x y` columns for every experiment with plot data,
/// one block per row (blank-line separated, parameters as a comment).
pub fn to_plotdata(reports: &[ExperimentReport]) -> BTreeMap<String, String> {
    let mut files: BTreeMap<String, String> = BTreeMap::new();
    for r in reports.iter().filter(|r| !r.plot.is_empty()) {
        let text = files.entry(r.experiment.clone()).or_default();
        if !text.is_empty() {
            text.push('\n');
        }
        text.push_str(&format!("# {}\n", r.param_json()));
        for (x, y) in &r.plot {
            text.push_str(&format!("{} {}\n", float(*x), float(*y)));
        }
    }
    files
}

fn write(path: PathBuf, contents: &str) -> Result<PathBuf, EmitError> {
    fs::write(&path, contents).map_err(|source| EmitError::Io { path: path.clone(), source })?;
    Ok(path)
}

/// Writes `report.csv`, `report.json` and `plotdata/<id>.dat` under `dir`.
pub fn emit(reports: &[ExperimentReport], formats: &[Format], dir: &Path) -> Result<Vec<PathBuf>, EmitError> {
    fs::create_dir_all(dir).map_err(|source| EmitError::Io { path: dir.to_path_buf(), source })?;
    let mut written = Vec::new();
    for format in formats {
        match format {
            Format::Csv => written.push(write(dir.join("report.csv"), &to_csv(reports)?)?),
            Format::Json => written.push(write(dir.join("report.json"), &to_json(reports)?)?),
            Format::Plotdata => {
                let sub = dir.join("plotdata");
                fs::create_dir_all(&sub).map_err(|source| EmitError::Io { path: sub.clone(), source })?;
                for (id, text) in to_plotdata(reports) {
                    written.push(write(sub.join(format!("{id}.dat")), &text)?);
                }
            }
        }
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(id: &str, k: i64) -> ExperimentReport {
        ExperimentReport {
            experiment: id.into(),
            paper_ref: "ref, with comma".into(),
            params: BTreeMap::from([("k".into(), Value::from(k)), ("eps".into(), Value::from(0.1))]),
            claimed: Claim::AtMost(532.0),
            observed: Some(1.0 / 3.0),
            verdict: Verdict::Holds,
            seconds: 0.0,
            details: BTreeMap::from([("note".into(), Value::from("x"))]),
            plot: vec![(1.0, 2.0), (2.0, 0.1 + 0.2)],
        }
    }

    #[test]
    fn one_report_one_data_row() {
        let csv = to_csv(&[sample("a", 1)]).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], "experiment,paper_ref,param_json,claimed,observed,verdict,seconds");
        assert_eq!(
            lines[1],
            r#"a,"ref, with comma","{""eps"":0.1,""k"":1}",<= 5.32000000000e2,3.33333333333e-1,holds,0.00000000000e0"#
        );
    }

    #[test]
    fn json_round_trips() {
        let mut rows = vec![sample("b", 2), sample("a", 1)];
        rows[0].observed = None;
        rows[1].claimed = Claim::Increasing;
        let back = from_json(&to_json(&rows).unwrap()).unwrap();
        assert_eq!(back, rows);
    }

    #[test]
    fn sorted_by_id_then_hash() {
        let mut rows = vec![sample("b", 1), sample("a", 2), sample("a", 1)];
        sort_reports(&mut rows);
        assert_eq!(rows[2].experiment, "b");
        let mut again = vec![rows[1].clone(), rows[0].clone(), rows[2].clone()];
        sort_reports(&mut again);
        assert_eq!(again, rows);
    }

    #[test]
    fn plotdata_blocks() {
        let files = to_plotdata(&[sample("a", 1), sample("a", 2)]);
        let text = &files["a"];
        assert_eq!(text.lines().filter(|l| l.starts_with('#')).count(), 2);
        assert!(text.contains("\n\n# "));
        assert!(text.contains("2.00000000000e0 3.00000000000e-1"));
    }
}

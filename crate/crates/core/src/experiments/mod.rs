//! Data generators behind the `bellswap` command-line tool.
//!
//! Every experiment takes a serde-friendly parameter struct, runs its grid
//! points in parallel, and returns rows in grid order together with a
//! pass/fail verdict. [`write_outputs`] turns that into CSV files plus a
//! JSON manifest holding the full parameter set, so rerunning from the
//! manifest reproduces the CSV byte for byte.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::protocol::Backend;

mod compare;
mod copy;
mod entropy;
mod plucker;
mod scaling;
mod theorem;

pub use compare::{oracle_compare, OracleCompareParams};
pub use copy::{imperfect_copy, ImperfectCopyParams};
pub use entropy::{ee_sweep, imperfect_bell, EeSweepParams, ImperfectBellParams, SweepMode, StateKind};
pub use plucker::{plucker_verify, PluckerParams};
pub use scaling::{prob_scaling, ProbScalingParams};
pub use theorem::{theorem_check, Filling, TheoremParams, TheoremState};

pub const SCHEMA_VERSION: &str = "bellswap-output/1";

/// Backend request from the command line. `Auto` picks the oracle when it
/// fits (2L ≤ 16) and the Gaussian backend otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendChoice {
    #[default]
    Auto,
    Oracle,
    Gaussian,
    Both,
}

impl BackendChoice {
    /// Backends to run for a system of `l` sites per layer.
    pub fn resolve(self, l: usize) -> Vec<Backend> {
        match self {
            BackendChoice::Auto if 2 * l <= crate::fock::MAX_MODES => vec![Backend::Oracle],
            BackendChoice::Auto | BackendChoice::Gaussian => vec![Backend::Gaussian],
            BackendChoice::Oracle => vec![Backend::Oracle],
            BackendChoice::Both => vec![Backend::Oracle, Backend::Gaussian],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    #[default]
    Nats,
    Log2,
}

impl Units {
    pub fn convert(self, nats: f64) -> f64 {
        match self {
            Units::Nats => nats,
            Units::Log2 => nats / std::f64::consts::LN_2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Units::Nats => "nats",
            Units::Log2 => "log 2",
        }
    }
}

/// Fixed 17-significant-digit float formatting.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

/// Rectangular CSV payload.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub file: String,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(file: &str, header: &[&'static str]) -> Self {
        Self {
            file: file.to_string(),
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| *h == name)
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        let io = |e: csv::Error| Error::Config(e.to_string());
        w.write_record(&self.header).map_err(io)?;
        for r in &self.rows {
            w.write_record(r).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Config(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Config(e.to_string()))
    }
}

/// One failed assertion, serialized into the manifest.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub check: String,
    pub detail: String,
}

impl Failure {
    pub fn new(check: &str, detail: impl Into<String>) -> Self {
        Self {
            check: check.to_string(),
            detail: detail.into(),
        }
    }
}

/// Result of an experiment run before it is written to disk.
#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub experiment: &'static str,
    pub tables: Vec<Table>,
    pub failures: Vec<Failure>,
    /// Extra structured results (fits, per-case reports).
    pub report: Value,
    /// Human-readable summary lines.
    pub summary: Vec<String>,
}

impl ExperimentOutput {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Identity record written next to every CSV.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentManifest {
    pub schema_version: String,
    pub experiment: String,
    pub seed: u64,
    pub backend: BackendChoice,
    pub parameters: Value,
    pub outputs: Vec<String>,
    pub passed: bool,
    #[serde(default)]
    pub failures: Value,
    #[serde(default)]
    pub report: Value,
}

/// Overlay the `parameters` object (and `seed`/`backend`) of a JSON
/// manifest onto `params`.
pub fn apply_config<P>(params: &P, config: &Value) -> Result<P>
where
    P: Serialize + for<'de> Deserialize<'de>,
{
    let mut base = serde_json::to_value(params).map_err(|e| Error::Config(e.to_string()))?;
    let obj = base
        .as_object_mut()
        .ok_or_else(|| Error::Config("parameters must serialize to an object".into()))?;
    let overlay = config.get("parameters").unwrap_or(config);
    let overlay = overlay
        .as_object()
        .ok_or_else(|| Error::Config("config must be a JSON object".into()))?;
    for (k, v) in overlay {
        if !obj.contains_key(k) {
            return Err(Error::Config(format!("unknown parameter `{k}`")));
        }
        obj.insert(k.clone(), v.clone());
    }
    for k in ["seed", "backend"] {
        if let (Some(v), true) = (config.get(k), obj.contains_key(k)) {
            obj.insert(k.to_string(), v.clone());
        }
    }
    serde_json::from_value(base).map_err(|e| Error::Config(e.to_string()))
}

/// Write all tables and the manifest into `dir`; returns the written paths.
pub fn write_outputs<P: Serialize>(
    dir: &Path,
    out: &ExperimentOutput,
    params: &P,
    seed: u64,
    backend: BackendChoice,
) -> Result<Vec<PathBuf>> {
    let io = |e: std::io::Error| Error::Config(format!("{}: {e}", dir.display()));
    fs::create_dir_all(dir).map_err(io)?;
    let mut written = Vec::new();
    for t in &out.tables {
        let path = dir.join(&t.file);
        fs::write(&path, t.to_csv()?).map_err(io)?;
        written.push(path);
    }
    let manifest = ExperimentManifest {
        schema_version: SCHEMA_VERSION.to_string(),
        experiment: out.experiment.to_string(),
        seed,
        backend,
        parameters: serde_json::to_value(params).map_err(|e| Error::Config(e.to_string()))?,
        outputs: out.tables.iter().map(|t| t.file.clone()).collect(),
        passed: out.passed(),
        failures: serde_json::to_value(&out.failures).map_err(|e| Error::Config(e.to_string()))?,
        report: out.report.clone(),
    };
    let path = dir.join(format!("{}.manifest.json", out.experiment));
    let mut text = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Config(e.to_string()))?;
    text.push('\n');
    fs::write(&path, text).map_err(io)?;
    written.push(path);
    Ok(written)
}

/// CSV name for one backend's rows; suffixed only when several backends ran.
pub(crate) fn table_file(base: &str, backend: Backend, backends: usize) -> String {
    if backends <= 1 {
        format!("{base}.csv")
    } else {
        format!("{base}_{}.csv", backend.name())
    }
}

pub(crate) fn fmt_list(v: &[usize]) -> String {
    v.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
}

pub(crate) fn require(cond: bool, what: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Config(what.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format() {
        assert_eq!(fmt_f64(0.25), "2.5000000000000000e-1");
        assert_eq!(fmt_f64(f64::NEG_INFINITY), "-inf");
        assert_eq!(fmt_f64(-1.0), "-1.0000000000000000e0");
    }

    #[test]
    fn csv_has_unix_newlines() {
        let mut t = Table::new("x.csv", &["a", "b"]);
        t.push(vec!["1".into(), "2".into()]);
        assert_eq!(t.to_csv().unwrap(), "a,b\n1,2\n");
    }

    #[test]
    fn auto_backend() {
        assert_eq!(BackendChoice::Auto.resolve(8), vec![Backend::Oracle]);
        assert_eq!(BackendChoice::Auto.resolve(10), vec![Backend::Gaussian]);
        assert_eq!(BackendChoice::Both.resolve(4).len(), 2);
    }

    #[derive(Debug, Serialize, Deserialize, PartialEq)]
    struct P {
        ls: Vec<usize>,
        seed: u64,
    }

    #[test]
    fn config_overlay() {
        let p = P { ls: vec![4], seed: 1 };
        let cfg = serde_json::json!({"parameters": {"ls": [6, 8]}, "seed": 9});
        assert_eq!(apply_config(&p, &cfg).unwrap(), P { ls: vec![6, 8], seed: 9 });
        let bad = serde_json::json!({"parameters": {"nope": 1}});
        assert!(matches!(apply_config(&p, &bad), Err(Error::Config(_))));
    }
}

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{ExperimentConfig, ExperimentKind};
use crate::theory::TheoryConstants;

/// One measurement. Wall time lives in [`Timing`] so that records of two
/// runs with the same seed compare byte for byte.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub kind: ExperimentKind,
    pub n: usize,
    pub replicate: u32,
    pub seed: u64,
    pub measured: Option<f64>,
    pub prediction: Option<f64>,
    /// `measured / prediction`, only when the prediction is positive.
    pub ratio: Option<f64>,
    /// `ok`, `flagged` or `error`.
    pub status: String,
    pub detail: String,
}

impl ResultRecord {
    pub(crate) fn new(
        kind: ExperimentKind,
        n: usize,
        replicate: u32,
        seed: u64,
        measured: Option<f64>,
        prediction: Option<f64>,
        detail: String,
    ) -> Self {
        let ratio = match (measured, prediction) {
            (Some(m), Some(p)) if p > 0.0 => Some(m / p),
            _ => None,
        };
        let status = if measured.is_none() {
            "error"
        } else if ratio.is_none() {
            "flagged"
        } else {
            "ok"
        };
        ResultRecord {
            kind,
            n,
            replicate,
            seed,
            measured,
            prediction,
            ratio,
            status: status.to_string(),
            detail,
        }
    }

    pub(crate) fn failed(kind: ExperimentKind, n: usize, replicate: u32, seed: u64, err: String) -> Self {
        let mut r = ResultRecord::new(kind, n, replicate, seed, None, None, err);
        r.status = "error".into();
        r
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub n: usize,
    pub replicate: u32,
    pub wall_time_s: f64,
}

/// Aggregates over the replicates of one size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeAggregate {
    pub n: usize,
    pub replicates: u32,
    pub ok: u32,
    pub mean: Option<f64>,
    pub std_dev: Option<f64>,
    pub mean_over_ln_n: Option<f64>,
    pub mean_ratio: Option<f64>,
    pub omega: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeTheory {
    pub n: usize,
    pub constants: Option<TheoryConstants>,
    pub error: Option<String>,
}

/// A pass/fail property of the branching-process battery.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyResult {
    pub name: String,
    pub estimate: f64,
    pub target: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub config: ExperimentConfig,
    pub theory: Vec<SizeTheory>,
    pub per_size: Vec<SizeAggregate>,
    /// `(mean(n_{j+1}) − mean(n_j)) / (ln n_{j+1} − ln n_j)` for consecutive sizes.
    pub increments: Vec<f64>,
    /// Least-squares slope of the per-size means against `ln n`.
    pub statistic: Option<f64>,
    pub expected: Option<f64>,
    pub tolerance: Option<f64>,
    pub pass: Option<bool>,
    pub properties: Vec<PropertyResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub records: Vec<ResultRecord>,
    pub timings: Vec<Timing>,
    pub summary: Summary,
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(String::new, |v| v.to_string())
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub const CSV_HEADER: &str = "kind,n,replicate,seed,measured,prediction,ratio,status,detail";

impl ExperimentReport {
    /// Records as CSV with a fixed column order.
    pub fn records_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                r.kind.label(),
                r.n,
                r.replicate,
                r.seed,
                opt(r.measured),
                opt(r.prediction),
                opt(r.ratio),
                r.status,
                csv_field(&r.detail)
            );
        }
        out
    }

    pub fn timings_csv(&self) -> String {
        let mut out = String::from("n,replicate,wall_time_s\n");
        for t in &self.timings {
            let _ = writeln!(out, "{},{},{}", t.n, t.replicate, t.wall_time_s);
        }
        out
    }

    pub fn summary_json(&self) -> String {
        serde_json::to_string_pretty(&self.summary).expect("summary serializes")
    }
}

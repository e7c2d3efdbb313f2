//! CSV, JSON and plain-text renderings of an [`ExperimentResult`].

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::metrics::Summary;
use super::runner::{ExperimentResult, MethodResult};
use crate::data::SourceFile;
use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 10] = [
    "method",
    "alpha",
    "coverage",
    "coverage_se",
    "size",
    "size_se",
    "accuracy",
    "accuracy_se",
    "auc",
    "auc_se",
];

/// What is needed to replay a run: the resolved configuration, its hash and
/// the input files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub config_hash: String,
    pub config: BTreeMap<String, String>,
    pub dataset: String,
    pub sources: Vec<SourceFile>,
}

pub fn display_name(method: &str) -> &str {
    match method {
        "hdc" => "HDC",
        "hdc_train" => "HDC (train)",
        "similarity" => "Similarity",
        "ratio" => "CHDC-ratio",
        "discount" => "CHDC-discount",
        "penalized" => "Penalized",
        "inverse_quantile" => "Inv. quantile",
        other => other,
    }
}

fn fixed(v: f64) -> String {
    format!("{v:.6}")
}

fn pair(s: Option<Summary>) -> [String; 2] {
    s.map_or([String::new(), String::new()], |s| [fixed(s.mean), fixed(s.se)])
}

fn csv_row(m: &MethodResult, alpha: f64) -> Vec<String> {
    let mut row = vec![m.method.clone(), fixed(alpha)];
    for s in [Some(m.coverage), Some(m.size), Some(m.accuracy), m.auc] {
        row.extend(pair(s));
    }
    row
}

fn csv_error(e: csv::Error) -> Error {
    Error::Format {
        path: "<results.csv>".into(),
        message: e.to_string(),
    }
}

pub fn write_csv(result: &ExperimentResult, out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER).map_err(csv_error)?;
    for m in &result.methods {
        w.write_record(csv_row(m, result.alpha)).map_err(csv_error)?;
    }
    w.flush().map_err(|e| Error::io("<results.csv>", e))
}

#[derive(Serialize)]
struct JsonRow<'a> {
    method: &'a str,
    alpha: f64,
    coverage: f64,
    coverage_se: f64,
    size: f64,
    size_se: f64,
    accuracy: f64,
    accuracy_se: f64,
    auc: Option<f64>,
    auc_se: Option<f64>,
    config_hash: &'a str,
    seed: u64,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    rows: Vec<JsonRow<'a>>,
    result: &'a ExperimentResult,
    metadata: &'a RunMetadata,
}

pub fn write_json(result: &ExperimentResult, metadata: &RunMetadata, mut out: impl Write) -> Result<()> {
    let rows = result
        .methods
        .iter()
        .map(|m| JsonRow {
            method: &m.method,
            alpha: result.alpha,
            coverage: m.coverage.mean,
            coverage_se: m.coverage.se,
            size: m.size.mean,
            size_se: m.size.se,
            accuracy: m.accuracy.mean,
            accuracy_se: m.accuracy.se,
            auc: m.auc.map(|s| s.mean),
            auc_se: m.auc.map(|s| s.se),
            config_hash: &metadata.config_hash,
            seed: result.seed,
        })
        .collect();
    let report = JsonReport {
        rows,
        result,
        metadata,
    };
    serde_json::to_writer_pretty(&mut out, &report)?;
    out.write_all(b"\n").map_err(|e| Error::io("<results.json>", e))
}

/// Fixed-width table of mean (standard error) per method.
pub fn summary_table(result: &ExperimentResult) -> String {
    let cell = |s: Option<Summary>| s.map_or("-".to_string(), |s| format!("{:.3} ({:.3})", s.mean, s.se));
    let mut out = String::new();
    let _ = writeln!(
        out,
        "alpha = {}, repetitions = {}, n_train/cal/test/ood = {}/{}/{}/{}",
        result.alpha, result.repetitions, result.n_train, result.n_cal, result.n_test, result.n_ood
    );
    let _ = writeln!(out, "{:<15} {:>15} {:>15} {:>15} {:>15}", "Method", "Cov.", "Size", "Acc.", "AUC");
    for m in &result.methods {
        let _ = writeln!(
            out,
            "{:<15} {:>15} {:>15} {:>15} {:>15}",
            display_name(&m.method),
            cell(Some(m.coverage)),
            cell(Some(m.size)),
            cell(Some(m.accuracy)),
            cell(m.auc)
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::runner::RepetitionMetrics;

    fn result() -> ExperimentResult {
        let s = |m| Summary { mean: m, se: 0.01 };
        let method = |name: &str, auc| MethodResult {
            method: name.into(),
            coverage: s(0.9),
            size: s(1.5),
            accuracy: s(0.8),
            auc,
            empty_rate: s(0.0),
            ood_empty_rate: None,
            pooled_coverage: 0.9,
            pooled_count: 10,
            label_coverage: vec![Some(0.9)],
            label_counts: vec![10],
            per_repetition: Vec::<RepetitionMetrics>::new(),
        };
        ExperimentResult {
            methods: vec![method("hdc", None), method("discount", Some(s(0.75)))],
            repetitions: 2,
            alpha: 0.1,
            seed: 7,
            classes: 1,
            n_train: 4,
            n_cal: 5,
            n_test: 1,
            n_ood: 0,
            label_cal_counts: vec![5.0],
        }
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        write_csv(&result(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], CSV_HEADER.join(","));
        assert_eq!(lines[1], "hdc,0.100000,0.900000,0.010000,1.500000,0.010000,0.800000,0.010000,,");
        assert!(lines[2].ends_with("0.750000,0.010000"));
    }

    #[test]
    fn json_rows_carry_hash_and_seed() {
        let meta = RunMetadata {
            config_hash: "abc".into(),
            config: BTreeMap::new(),
            dataset: "synthetic".into(),
            sources: vec![],
        };
        let mut buf = Vec::new();
        write_json(&result(), &meta, &mut buf).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["rows"][0]["config_hash"], "abc");
        assert_eq!(v["rows"][1]["seed"], 7);
        assert!(v["rows"][0]["auc"].is_null());
    }

    #[test]
    fn table_lists_every_method() {
        let t = summary_table(&result());
        assert!(t.contains("HDC") && t.contains("CHDC-discount") && t.contains("0.750 (0.010)"));
    }
}

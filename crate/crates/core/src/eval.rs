//! Detection quality metrics: confusion counts, precision/recall/F1, and
//! report serialization (JSON with provenance, CSV for spreadsheets).

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::data::AlignedSample;
use crate::error::{Error, Result};
use crate::model::{forward, predict_label, ModalityMode, ModelParams};

/// Raw counts, with "attack" as the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: u64,
    pub tn: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl ConfusionMatrix {
    pub fn total(&self) -> u64 {
        self.tp + self.tn + self.fp + self.fn_
    }

    /// TP / (TP + FP); 0 when nothing was predicted positive.
    pub fn precision(&self) -> f64 {
        ratio(self.tp, self.tp + self.fp)
    }

    /// TP / (TP + FN); 0 when no positives exist.
    pub fn recall(&self) -> f64 {
        ratio(self.tp, self.tp + self.fn_)
    }

    /// Harmonic mean of precision and recall; 0 when both are 0.
    pub fn f1(&self) -> f64 {
        let p = self.precision();
        let r = self.recall();
        if p + r == 0.0 {
            0.0
        } else {
            2.0 * p * r / (p + r)
        }
    }

    /// False alarms as a percentage of all samples.
    pub fn fp_rate_pct(&self) -> f64 {
        percent(self.fp, self.total())
    }

    /// Missed attacks as a percentage of all samples.
    pub fn fn_rate_pct(&self) -> f64 {
        percent(self.fn_, self.total())
    }
}

fn ratio(numerator: u64, denominator: u64) -> f64 {
    if denominator == 0 {
        0.0
    } else {
        numerator as f64 / denominator as f64
    }
}

fn percent(numerator: u64, total: u64) -> f64 {
    if total == 0 {
        0.0
    } else {
        100.0 * numerator as f64 / total as f64
    }
}

/// Tallies binary predictions against ground truth.
pub fn confusion(y_true: &[u8], y_pred: &[u8]) -> Result<ConfusionMatrix> {
    if y_true.len() != y_pred.len() {
        return Err(Error::ShapeMismatch {
            context: "confusion".into(),
            expected: format!("{} predictions", y_true.len()),
            got: format!("{} predictions", y_pred.len()),
        });
    }
    if y_true.is_empty() {
        return Err(Error::EmptyInput("labels"));
    }
    let mut matrix = ConfusionMatrix::default();
    for (&t, &p) in y_true.iter().zip(y_pred) {
        if t > 1 || p > 1 {
            return Err(Error::InvalidArgument(format!(
                "labels must be 0 or 1, found true={t} pred={p}"
            )));
        }
        match (t, p) {
            (1, 1) => matrix.tp += 1,
            (0, 0) => matrix.tn += 1,
            (0, 1) => matrix.fp += 1,
            _ => matrix.fn_ += 1,
        }
    }
    Ok(matrix)
}

/// Where a report came from. Not part of the metric columns; excluded from
/// any byte-level comparison of repeated runs.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ReportMeta {
    pub checkpoint: String,
    pub dataset: String,
    pub created_at: String,
    pub modality: String,
}

/// Full evaluation result: counts, derived metrics, and provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    #[serde(flatten)]
    pub confusion: ConfusionMatrix,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub fp_rate_pct: f64,
    pub fn_rate_pct: f64,
    #[serde(default)]
    pub meta: ReportMeta,
}

impl EvalReport {
    pub fn from_confusion(confusion: ConfusionMatrix, meta: ReportMeta) -> Self {
        EvalReport {
            precision: confusion.precision(),
            recall: confusion.recall(),
            f1: confusion.f1(),
            fp_rate_pct: confusion.fp_rate_pct(),
            fn_rate_pct: confusion.fn_rate_pct(),
            confusion,
            meta,
        }
    }
}

/// Runs the model over every sample and scores the predicted labels.
pub fn evaluate(
    params: &ModelParams,
    mode: ModalityMode,
    samples: &[AlignedSample],
    meta: ReportMeta,
) -> Result<EvalReport> {
    if samples.is_empty() {
        return Err(Error::EmptyInput("evaluation samples"));
    }
    let mut y_true = Vec::with_capacity(samples.len());
    let mut y_pred = Vec::with_capacity(samples.len());
    for sample in samples {
        let (_, probs) = forward(params, sample, mode)?;
        y_true.push(sample.label);
        y_pred.push(predict_label(probs));
    }
    Ok(EvalReport::from_confusion(
        confusion(&y_true, &y_pred)?,
        meta,
    ))
}

pub fn write_report_json(path: &Path, report: &EvalReport) -> Result<()> {
    let json = serde_json::to_string_pretty(report).map_err(|e| Error::json(path, e))?;
    fs::write(path, json).map_err(|e| Error::io(path, e))
}

pub fn read_report_json(path: &Path) -> Result<EvalReport> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::json(path, e))
}

const CSV_COLUMNS: [&str; 9] = [
    "tp",
    "tn",
    "fp",
    "fn",
    "precision",
    "recall",
    "f1",
    "fp_rate_pct",
    "fn_rate_pct",
];

/// One header row plus one data row; floats use the shortest round-trip
/// form. Provenance stays in the JSON report.
pub fn write_report_csv(path: &Path, report: &EvalReport) -> Result<()> {
    let mut writer = csv::Writer::from_path(path).map_err(|e| Error::csv(path, e))?;
    writer
        .write_record(CSV_COLUMNS)
        .map_err(|e| Error::csv(path, e))?;
    let c = &report.confusion;
    let record = [
        c.tp.to_string(),
        c.tn.to_string(),
        c.fp.to_string(),
        c.fn_.to_string(),
        report.precision.to_string(),
        report.recall.to_string(),
        report.f1.to_string(),
        report.fp_rate_pct.to_string(),
        report.fn_rate_pct.to_string(),
    ];
    writer
        .write_record(&record)
        .map_err(|e| Error::csv(path, e))?;
    writer.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Reads a report written by [`write_report_csv`]; meta fields are empty.
pub fn read_report_csv(path: &Path) -> Result<EvalReport> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| Error::csv(path, e))?;
    let headers = reader.headers().map_err(|e| Error::csv(path, e))?.clone();
    if headers.iter().collect::<Vec<_>>() != CSV_COLUMNS {
        return Err(Error::ShapeMismatch {
            context: format!("report CSV {}", path.display()),
            expected: CSV_COLUMNS.join(","),
            got: headers.iter().collect::<Vec<_>>().join(","),
        });
    }
    let record = reader
        .records()
        .next()
        .ok_or(Error::EmptyInput("report CSV"))?
        .map_err(|e| Error::csv(path, e))?;

    let cell = |i: usize| -> &str { record.get(i).unwrap_or("") };
    let count = |i: usize| -> Result<u64> {
        cell(i).parse().map_err(|_| Error::BadCell {
            row: 1,
            column: CSV_COLUMNS[i].into(),
            value: cell(i).into(),
        })
    };
    let metric = |i: usize| -> Result<f64> {
        cell(i).parse().map_err(|_| Error::BadCell {
            row: 1,
            column: CSV_COLUMNS[i].into(),
            value: cell(i).into(),
        })
    };

    Ok(EvalReport {
        confusion: ConfusionMatrix {
            tp: count(0)?,
            tn: count(1)?,
            fp: count(2)?,
            fn_: count(3)?,
        },
        precision: metric(4)?,
        recall: metric(5)?,
        f1: metric(6)?,
        fp_rate_pct: metric(7)?,
        fn_rate_pct: metric(8)?,
        meta: ReportMeta::default(),
    })
}

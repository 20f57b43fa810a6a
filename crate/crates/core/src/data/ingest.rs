//! CSV ingestion and emission for modality tables.
//!
//! Expected layout: a header row starting with `timestamp`, one column per
//! feature, and an optional trailing `label` column. Empty cells are missing
//! values; labels may not be missing.

use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};

/// Which of the two data sources a table belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Modality {
    Sensor,
    Network,
}

impl Modality {
    pub fn as_str(self) -> &'static str {
        match self {
            Modality::Sensor => "sensor",
            Modality::Network => "network",
        }
    }

    /// Feature count of the SWaT-shaped schema this crate targets.
    pub fn default_feature_count(self) -> usize {
        match self {
            Modality::Sensor => 51,
            Modality::Network => 16,
        }
    }
}

impl fmt::Display for Modality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One parsed modality table. Rows are sorted nondecreasing by timestamp and
/// each row holds exactly `feature_names.len()` value slots; `None` marks a
/// missing cell.
#[derive(Debug, Clone, PartialEq)]
pub struct RawModalityTable {
    pub modality: Modality,
    pub feature_names: Vec<String>,
    pub timestamps: Vec<f64>,
    pub rows: Vec<Vec<Option<f64>>>,
    pub labels: Option<Vec<u8>>,
}

impl RawModalityTable {
    pub fn len(&self) -> usize {
        self.timestamps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.timestamps.is_empty()
    }

    pub fn feature_count(&self) -> usize {
        self.feature_names.len()
    }

    pub fn has_missing(&self) -> bool {
        self.rows.iter().any(|r| r.iter().any(Option::is_none))
    }
}

/// Parses a modality CSV, validating the feature count, numeric cells, and
/// timestamp order. Empty cells become missing markers.
pub fn ingest_csv(
    path: &Path,
    modality: Modality,
    expected_feature_count: usize,
) -> Result<RawModalityTable> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::csv(path, e))?;

    let headers = reader.headers().map_err(|e| Error::csv(path, e))?.clone();
    if headers.is_empty() || headers.get(0) != Some("timestamp") {
        return Err(Error::InvalidArgument(format!(
            "{}: first CSV column must be 'timestamp', got {:?}",
            path.display(),
            headers.get(0).unwrap_or("")
        )));
    }
    let has_labels = headers.len() >= 2 && headers.get(headers.len() - 1) == Some("label");
    let feature_end = if has_labels {
        headers.len() - 1
    } else {
        headers.len()
    };
    let feature_names: Vec<String> = (1..feature_end)
        .map(|i| headers.get(i).unwrap_or("").to_string())
        .collect();
    if feature_names.len() != expected_feature_count {
        return Err(Error::FeatureCountMismatch {
            modality: modality.as_str(),
            expected: expected_feature_count,
            found: feature_names.len(),
        });
    }

    let mut timestamps = Vec::new();
    let mut rows = Vec::new();
    let mut labels = if has_labels { Some(Vec::new()) } else { None };
    for (idx, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::csv(path, e))?;
        let row_number = idx + 1;
        let ts = parse_cell(record.get(0).unwrap_or(""), row_number, "timestamp")?.ok_or(
            Error::BadCell {
                row: row_number,
                column: "timestamp".into(),
                value: String::new(),
            },
        )?;
        if let Some(&previous) = timestamps.last() {
            if ts < previous {
                return Err(Error::UnsortedTimestamps {
                    row: row_number,
                    timestamp: ts,
                    previous,
                });
            }
        }
        let mut values = Vec::with_capacity(feature_names.len());
        for (col, name) in feature_names.iter().enumerate() {
            values.push(parse_cell(
                record.get(col + 1).unwrap_or(""),
                row_number,
                name,
            )?);
        }
        if let Some(labels) = labels.as_mut() {
            let cell = record.get(record.len() - 1).unwrap_or("");
            let label = match cell {
                "0" => 0,
                "1" => 1,
                "" => return Err(Error::MissingLabel { timestamp: ts }),
                other => {
                    return Err(Error::BadCell {
                        row: row_number,
                        column: "label".into(),
                        value: other.into(),
                    })
                }
            };
            labels.push(label);
        }
        timestamps.push(ts);
        rows.push(values);
    }
    if timestamps.is_empty() {
        return Err(Error::EmptyInput("csv data rows"));
    }

    Ok(RawModalityTable {
        modality,
        feature_names,
        timestamps,
        rows,
        labels,
    })
}

fn parse_cell(cell: &str, row: usize, column: &str) -> Result<Option<f64>> {
    if cell.is_empty() {
        return Ok(None);
    }
    match cell.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(Some(v)),
        _ => Err(Error::BadCell {
            row,
            column: column.into(),
            value: cell.into(),
        }),
    }
}

/// Writes a table in the same schema `ingest_csv` reads. Missing cells are
/// written as empty strings; floats use the shortest round-trip form.
pub fn write_csv(table: &RawModalityTable, path: &Path) -> Result<()> {
    let mut writer = csv::Writer::from_path(path).map_err(|e| Error::csv(path, e))?;
    let mut header = vec!["timestamp".to_string()];
    header.extend(table.feature_names.iter().cloned());
    if table.labels.is_some() {
        header.push("label".into());
    }
    writer
        .write_record(&header)
        .map_err(|e| Error::csv(path, e))?;

    for (i, row) in table.rows.iter().enumerate() {
        let mut record = Vec::with_capacity(header.len());
        record.push(table.timestamps[i].to_string());
        for cell in row {
            record.push(cell.map(|v| v.to_string()).unwrap_or_default());
        }
        if let Some(labels) = &table.labels {
            record.push(labels[i].to_string());
        }
        writer
            .write_record(&record)
            .map_err(|e| Error::csv(path, e))?;
    }
    writer.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

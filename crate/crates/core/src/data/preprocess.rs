//! Missing-value imputation and min-max normalization.
//!
//! Statistics are fitted only on rows at or before a boundary timestamp (the
//! end of the training region), so nothing from the test region can leak into
//! the transforms.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::data::ingest::{Modality, RawModalityTable};
use crate::error::{Error, Result};

/// Per-feature fit results: mean of observed values, minimum, and maximum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureStats {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

/// Fitted statistics for both modalities, keyed by feature name.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PreprocessStats {
    pub sensor: BTreeMap<String, FeatureStats>,
    pub network: BTreeMap<String, FeatureStats>,
}

impl PreprocessStats {
    /// Fits both modalities on rows with `timestamp <= boundary`.
    pub fn fit(
        sensor: &RawModalityTable,
        network: &RawModalityTable,
        boundary: f64,
    ) -> Result<Self> {
        Ok(PreprocessStats {
            sensor: fit_table(sensor, boundary)?,
            network: fit_table(network, boundary)?,
        })
    }

    pub fn for_modality(&self, modality: Modality) -> &BTreeMap<String, FeatureStats> {
        match modality {
            Modality::Sensor => &self.sensor,
            Modality::Network => &self.network,
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self).map_err(|e| Error::json(path, e))?;
        fs::write(path, json).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::json(path, e))
    }
}

fn fit_table(table: &RawModalityTable, boundary: f64) -> Result<BTreeMap<String, FeatureStats>> {
    let in_range = table
        .timestamps
        .iter()
        .take_while(|&&ts| ts <= boundary)
        .count();
    let mut stats = BTreeMap::new();
    for (f, name) in table.feature_names.iter().enumerate() {
        let mut count = 0usize;
        let mut sum = 0.0;
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for row in &table.rows[..in_range] {
            if let Some(v) = row[f] {
                count += 1;
                sum += v;
                min = min.min(v);
                max = max.max(v);
            }
        }
        if count == 0 {
            return Err(Error::NoObservedValues {
                modality: table.modality.as_str(),
                feature: name.clone(),
            });
        }
        stats.insert(
            name.clone(),
            FeatureStats {
                mean: sum / count as f64,
                min,
                max,
            },
        );
    }
    Ok(stats)
}

/// Replaces every missing cell with its feature's fitted mean.
pub fn impute_missing(
    table: &RawModalityTable,
    stats: &PreprocessStats,
) -> Result<RawModalityTable> {
    let by_feature = stats.for_modality(table.modality);
    let mut out = table.clone();
    for (f, name) in table.feature_names.iter().enumerate() {
        let fs = lookup(by_feature, table.modality, name)?;
        for row in &mut out.rows {
            if row[f].is_none() {
                row[f] = Some(fs.mean);
            }
        }
    }
    Ok(out)
}

/// Rescales each feature to `(x - min) / (max - min)`, clamped into `[0, 1]`.
/// Constant features (min = max) map to 0. The table must be imputed first.
pub fn minmax_normalize(
    table: &RawModalityTable,
    stats: &PreprocessStats,
) -> Result<RawModalityTable> {
    if table.has_missing() {
        return Err(Error::InvalidArgument(
            "minmax_normalize requires an imputed table (missing values remain)".into(),
        ));
    }
    let by_feature = stats.for_modality(table.modality);
    let mut out = table.clone();
    for (f, name) in table.feature_names.iter().enumerate() {
        let fs = lookup(by_feature, table.modality, name)?;
        let range = fs.max - fs.min;
        for row in &mut out.rows {
            let v = row[f].expect("missing cell after impute check");
            row[f] = Some(if range == 0.0 {
                0.0
            } else {
                ((v - fs.min) / range).clamp(0.0, 1.0)
            });
        }
    }
    Ok(out)
}

fn lookup<'a>(
    stats: &'a BTreeMap<String, FeatureStats>,
    modality: Modality,
    feature: &str,
) -> Result<&'a FeatureStats> {
    stats
        .get(feature)
        .ok_or_else(|| Error::MissingFeatureStats {
            modality: modality.as_str(),
            feature: feature.to_string(),
        })
}

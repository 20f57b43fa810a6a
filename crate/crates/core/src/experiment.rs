//! End-to-end orchestration: raw tables in, preprocessed chronological
//! splits out, plus the modality ablation harness.

use serde::{Deserialize, Serialize};

use crate::data::{
    align_modalities, aligned_windows, impute_missing, minmax_normalize, AlignedSample,
    PreprocessStats, RawModalityTable,
};
use crate::error::{Error, Result};
use crate::eval::{evaluate, ReportMeta};
use crate::model::{train, ModalityMode, TrainConfig};

/// A dataset ready for training: normalized, aligned, split in time order.
#[derive(Debug, Clone)]
pub struct PreparedDataset {
    pub train: Vec<AlignedSample>,
    pub test: Vec<AlignedSample>,
    pub stats: PreprocessStats,
    /// Latest sensor timestamp whose row lands in the training split.
    /// Normalization statistics never see anything after it.
    pub fit_boundary: f64,
    pub warnings: Vec<String>,
}

/// Imputes, normalizes, aligns, and splits the two raw tables.
///
/// The alignment is decided by timestamps alone, so the train/test boundary
/// is known before any statistics are computed. When `stats` is `None` the
/// statistics are fitted on rows at or before that boundary; pass saved
/// statistics to reproduce a training run's preprocessing at evaluation time.
pub fn prepare_dataset(
    sensor: &RawModalityTable,
    network: &RawModalityTable,
    window: usize,
    train_fraction: f64,
    stats: Option<PreprocessStats>,
) -> Result<PreparedDataset> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "train fraction must be strictly between 0 and 1, got {train_fraction}"
        )));
    }
    if window == 0 {
        return Err(Error::InvalidArgument(
            "alignment window must be at least 1".into(),
        ));
    }

    let pairs = aligned_windows(&sensor.timestamps, &network.timestamps, window);
    if pairs.is_empty() {
        return Err(Error::NoAlignedSamples { window });
    }
    let train_len = (train_fraction * pairs.len() as f64).floor() as usize;
    if train_len == 0 {
        return Err(Error::EmptySplit {
            fraction: train_fraction,
            side: "train",
        });
    }
    let fit_boundary = sensor.timestamps[pairs[train_len - 1].0];

    let stats = match stats {
        Some(stats) => stats,
        None => PreprocessStats::fit(sensor, network, fit_boundary)?,
    };

    let sensor = minmax_normalize(&impute_missing(sensor, &stats)?, &stats)?;
    let network = minmax_normalize(&impute_missing(network, &stats)?, &stats)?;
    let samples = align_modalities(&sensor, &network, window)?;
    let split = crate::data::split_chronological(samples, train_fraction)?;

    Ok(PreparedDataset {
        train: split.train,
        test: split.test,
        stats,
        fit_boundary,
        warnings: split.warnings,
    })
}

/// Test-set metrics for one modality configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationRow {
    pub mode: ModalityMode,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Trains three models with identical configuration and seed, one per
/// modality mode, and scores each on the test split.
pub fn run_ablation(config: &TrainConfig, dataset: &PreparedDataset) -> Result<Vec<AblationRow>> {
    let modes = [
        ModalityMode::Multi,
        ModalityMode::SensorOnly,
        ModalityMode::NetworkOnly,
    ];
    let mut rows = Vec::with_capacity(modes.len());
    for mode in modes {
        let (params, _) = train(config, mode, &dataset.train)?;
        let report = evaluate(&params, mode, &dataset.test, ReportMeta::default())?;
        rows.push(AblationRow {
            mode,
            precision: report.precision,
            recall: report.recall,
            f1: report.f1,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{generate_synthetic, SyntheticSpec};
    use crate::model::gradcheck::tiny_config;

    fn small_spec() -> SyntheticSpec {
        SyntheticSpec {
            sample_count: 300,
            sensor_features: 5,
            network_features: 4,
            window: 3,
            seed: 7,
            ..SyntheticSpec::default()
        }
    }

    #[test]
    fn prepared_values_are_normalized_and_complete() {
        let (sensor, network) = generate_synthetic(&small_spec()).unwrap();
        let prepared = prepare_dataset(&sensor, &network, 3, 0.7, None).unwrap();
        assert!(!prepared.train.is_empty());
        assert!(!prepared.test.is_empty());
        for sample in prepared.train.iter().chain(&prepared.test) {
            assert!(sample.sensor.iter().all(|v| (0.0..=1.0).contains(v)));
            assert!(sample
                .network
                .as_slice()
                .iter()
                .all(|v| (0.0..=1.0).contains(v)));
        }
    }

    #[test]
    fn split_sizes_follow_the_fraction() {
        let (sensor, network) = generate_synthetic(&small_spec()).unwrap();
        let prepared = prepare_dataset(&sensor, &network, 3, 0.7, None).unwrap();
        let total = prepared.train.len() + prepared.test.len();
        assert_eq!(prepared.train.len(), (0.7 * total as f64).floor() as usize);
    }

    #[test]
    fn boundary_is_strictly_inside_the_time_range() {
        let (sensor, network) = generate_synthetic(&small_spec()).unwrap();
        let prepared = prepare_dataset(&sensor, &network, 3, 0.7, None).unwrap();
        assert!(prepared.fit_boundary > sensor.timestamps[0]);
        assert!(prepared.fit_boundary < *sensor.timestamps.last().unwrap());
    }

    #[test]
    fn saved_stats_reproduce_the_same_dataset() {
        let (sensor, network) = generate_synthetic(&small_spec()).unwrap();
        let first = prepare_dataset(&sensor, &network, 3, 0.7, None).unwrap();
        let second = prepare_dataset(&sensor, &network, 3, 0.7, Some(first.stats.clone())).unwrap();
        assert_eq!(first.train, second.train);
        assert_eq!(first.test, second.test);
        assert_eq!(first.stats, second.stats);
    }

    #[test]
    fn bad_fraction_and_window_are_rejected() {
        let (sensor, network) = generate_synthetic(&small_spec()).unwrap();
        assert!(prepare_dataset(&sensor, &network, 0, 0.7, None).is_err());
        assert!(prepare_dataset(&sensor, &network, 3, 0.0, None).is_err());
        assert!(prepare_dataset(&sensor, &network, 3, 1.0, None).is_err());
    }

    #[test]
    fn ablation_covers_all_three_modes() {
        let spec = small_spec();
        let (sensor, network) = generate_synthetic(&spec).unwrap();
        let prepared = prepare_dataset(&sensor, &network, 3, 0.7, None).unwrap();
        let config = TrainConfig {
            epochs: 2,
            batch_size: 32,
            ..tiny_config(0)
        };
        let rows = run_ablation(&config, &prepared).unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[0].mode, ModalityMode::Multi);
        assert_eq!(rows[1].mode, ModalityMode::SensorOnly);
        assert_eq!(rows[2].mode, ModalityMode::NetworkOnly);
        for row in &rows {
            assert!((0.0..=1.0).contains(&row.f1));
        }
    }
}

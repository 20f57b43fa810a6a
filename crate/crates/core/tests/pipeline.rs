//! Full-pipeline integration: synthetic tables written to disk, ingested
//! back, preprocessed, trained, checkpointed, and evaluated through the same
//! public API the command-line front end uses.

use fuseids_core::data::{
    generate_synthetic, ingest_csv, write_csv, AlignedSample, Modality, PreprocessStats,
    SyntheticSpec,
};
use fuseids_core::eval::{
    evaluate, read_report_csv, read_report_json, write_report_csv, write_report_json, ReportMeta,
};
use fuseids_core::experiment::{prepare_dataset, PreparedDataset};
use fuseids_core::model::{
    load_checkpoint, save_checkpoint, train, Checkpoint, ModalityMode, TrainConfig,
};

fn spec() -> SyntheticSpec {
    // Attack windows cluster in time, so at this scale the seed must be one
    // that lands attacks on both sides of the chronological split.
    SyntheticSpec {
        sample_count: 1200,
        sensor_features: 8,
        network_features: 5,
        window: 4,
        missing_rate: 0.01,
        seed: 17,
        ..SyntheticSpec::default()
    }
}

fn config() -> TrainConfig {
    TrainConfig {
        sensor_features: 8,
        network_features: 5,
        sensor_widths: [16, 12, 8, 6],
        lstm_hidden: [10, 10, 6],
        fusion_widths: [12, 6],
        window: 4,
        epochs: 12,
        batch_size: 32,
        seed: 3,
        ..TrainConfig::default()
    }
}

/// Writes both modality tables through the CSV layer and reads them back.
fn round_trip_tables(spec: &SyntheticSpec) -> PreparedDataset {
    let (sensor, network) = generate_synthetic(spec).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let sensor_path = dir.path().join("sensor.csv");
    let network_path = dir.path().join("network.csv");
    write_csv(&sensor, &sensor_path).unwrap();
    write_csv(&network, &network_path).unwrap();
    let sensor = ingest_csv(&sensor_path, Modality::Sensor, spec.sensor_features).unwrap();
    let network = ingest_csv(&network_path, Modality::Network, spec.network_features).unwrap();
    prepare_dataset(&sensor, &network, spec.window, 0.7, None).unwrap()
}

#[test]
fn csv_round_trip_is_lossless() {
    let (sensor, network) = generate_synthetic(&spec()).unwrap();
    assert!(sensor.has_missing(), "fixture must exercise missing cells");

    let dir = tempfile::tempdir().unwrap();
    let sensor_path = dir.path().join("sensor.csv");
    let network_path = dir.path().join("network.csv");
    write_csv(&sensor, &sensor_path).unwrap();
    write_csv(&network, &network_path).unwrap();

    let sensor_back = ingest_csv(&sensor_path, Modality::Sensor, sensor.feature_count()).unwrap();
    let network_back =
        ingest_csv(&network_path, Modality::Network, network.feature_count()).unwrap();
    assert_eq!(sensor_back, sensor);
    assert_eq!(network_back, network);
}

#[test]
fn end_to_end_artifacts_round_trip() {
    let spec = spec();
    let config = config();
    let prepared = round_trip_tables(&spec);
    let (params, trace) = train(&config, ModalityMode::Multi, &prepared.train).unwrap();

    assert_eq!(trace.len(), config.epochs);
    assert!(trace.iter().all(|l| l.is_finite()));
    assert!(
        trace.last().unwrap() < trace.first().unwrap(),
        "training never improved: {trace:?}"
    );

    let dir = tempfile::tempdir().unwrap();

    // Checkpoint: save, load, and evaluate the reloaded parameters; the
    // predictions must match the in-memory model exactly.
    let checkpoint_path = dir.path().join("checkpoint.json");
    let checkpoint = Checkpoint::from_params(&config, ModalityMode::Multi, &params);
    save_checkpoint(&checkpoint_path, &checkpoint).unwrap();
    let reloaded = load_checkpoint(&checkpoint_path)
        .unwrap()
        .to_params()
        .unwrap();

    let fresh = evaluate(
        &params,
        ModalityMode::Multi,
        &prepared.test,
        ReportMeta::default(),
    )
    .unwrap();
    let replayed = evaluate(
        &reloaded,
        ModalityMode::Multi,
        &prepared.test,
        ReportMeta::default(),
    )
    .unwrap();
    assert_eq!(replayed, fresh);

    // Saved normalization statistics must reproduce the same test split, the
    // way a later evaluation run rebuilds it.
    let stats_path = dir.path().join("stats.json");
    prepared.stats.save(&stats_path).unwrap();
    let stats = PreprocessStats::load(&stats_path).unwrap();
    let (sensor, network) = generate_synthetic(&spec).unwrap();
    let reprepared = prepare_dataset(&sensor, &network, spec.window, 0.7, Some(stats)).unwrap();
    assert_eq!(reprepared.test, prepared.test);

    // The report survives both serialization formats.
    assert_eq!(fresh.confusion.total() as usize, prepared.test.len());
    for metric in [fresh.precision, fresh.recall, fresh.f1] {
        assert!((0.0..=1.0).contains(&metric));
    }
    let json_path = dir.path().join("report.json");
    write_report_json(&json_path, &fresh).unwrap();
    assert_eq!(read_report_json(&json_path).unwrap(), fresh);
    let csv_path = dir.path().join("report.csv");
    write_report_csv(&csv_path, &fresh).unwrap();
    assert_eq!(read_report_csv(&csv_path).unwrap(), fresh);
}

/// On the full-size default dataset the fused model must clearly beat two
/// references that need no learning machinery: predicting attack everywhere,
/// and the best single-sensor-feature threshold rule fitted on the training
/// split. Everything here is seeded, so the scores are exact across runs.
#[test]
fn trained_model_beats_simple_baselines() {
    let spec = SyntheticSpec::default();
    let (sensor, network) = generate_synthetic(&spec).unwrap();
    let prepared = prepare_dataset(&sensor, &network, spec.window, 0.7, None).unwrap();

    let config = TrainConfig {
        sensor_widths: [32, 24, 16, 8],
        lstm_hidden: [16, 16, 8],
        fusion_widths: [16, 8],
        window: spec.window,
        epochs: 6,
        batch_size: 64,
        seed: 0,
        ..TrainConfig::default()
    };
    let (params, _) = train(&config, ModalityMode::Multi, &prepared.train).unwrap();
    let report = evaluate(
        &params,
        ModalityMode::Multi,
        &prepared.test,
        ReportMeta::default(),
    )
    .unwrap();

    let attacks = prepared.test.iter().filter(|s| s.label == 1).count();
    let all_attack = 2.0 * attacks as f64 / (prepared.test.len() + attacks) as f64;
    let threshold = threshold_baseline_f1(&prepared.train, &prepared.test);
    println!(
        "model F1 {:.4}, all-attack F1 {all_attack:.4}, threshold baseline F1 {threshold:.4}",
        report.f1
    );
    assert!(report.f1 >= 0.9, "model F1 {:.4}", report.f1);
    assert!(
        report.f1 >= all_attack + 0.25,
        "model F1 {:.4} vs all-attack {all_attack:.4}",
        report.f1
    );
    assert!(
        report.f1 >= threshold + 0.25,
        "model F1 {:.4} vs threshold baseline {threshold:.4}",
        report.f1
    );
}

/// Best single-sensor-feature threshold rule fitted on the training split:
/// midpoints between adjacent sorted train values (strided down to at most
/// 256 candidates per feature) are tried in both directions, and the winner
/// is scored on the test split.
fn threshold_baseline_f1(train: &[AlignedSample], test: &[AlignedSample]) -> f64 {
    let features = train[0].sensor.len();
    let mut best = (f64::NEG_INFINITY, 0usize, 0.0f64, false);
    for feature in 0..features {
        let mut values: Vec<f64> = train.iter().map(|s| s.sensor[feature]).collect();
        values.sort_by(f64::total_cmp);
        values.dedup();
        let stride = (values.len() / 256).max(1);
        for i in (0..values.len().saturating_sub(1)).step_by(stride) {
            let threshold = 0.5 * (values[i] + values[i + 1]);
            for above in [false, true] {
                let f1 = threshold_f1(train, feature, threshold, above);
                if f1 > best.0 {
                    best = (f1, feature, threshold, above);
                }
            }
        }
    }
    threshold_f1(test, best.1, best.2, best.3)
}

fn threshold_f1(samples: &[AlignedSample], feature: usize, threshold: f64, above: bool) -> f64 {
    let (mut tp, mut fp, mut fn_) = (0u64, 0u64, 0u64);
    for s in samples {
        let pred = (s.sensor[feature] > threshold) == above;
        match (s.label == 1, pred) {
            (true, true) => tp += 1,
            (false, true) => fp += 1,
            (true, false) => fn_ += 1,
            (false, false) => {}
        }
    }
    if tp == 0 {
        return 0.0;
    }
    let precision = tp as f64 / (tp + fp) as f64;
    let recall = tp as f64 / (tp + fn_) as f64;
    2.0 * precision * recall / (precision + recall)
}

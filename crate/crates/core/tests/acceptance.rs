//! The eight verification gates this project promises, one test per gate.
//! Each prints a single `acceptance: <gate>: PASS` line when it holds.
//!
//! Run with:
//!
//! ```text
//! cargo test -p fuseids-core --test acceptance -- --nocapture
//! ```

use std::time::{Duration, Instant};

use fuseids_core::data::{
    generate_separable_toy, generate_synthetic, ingest_csv, write_csv, AlignedSample, Modality,
    SyntheticSpec,
};
use fuseids_core::error::Error;
use fuseids_core::eval::{confusion, evaluate, ReportMeta};
use fuseids_core::experiment::{prepare_dataset, run_ablation};
use fuseids_core::model::{
    network_encode, run_gradcheck, save_checkpoint, tiny_config, train, Checkpoint, ModalityMode,
    ModelParams, TrainConfig,
};
use fuseids_core::rng::SeededRng;
use fuseids_core::tensor::Matrix;

const ALL_MODES: [ModalityMode; 3] = [
    ModalityMode::Multi,
    ModalityMode::SensorOnly,
    ModalityMode::NetworkOnly,
];

/// Gate 1: analytic gradients vs central finite differences on the tiny
/// instance, eps 1e-5, max relative error <= 1e-4 over every parameter,
/// seeds 0 through 4, under a minute.
#[test]
fn gradients_match_finite_differences() {
    let started = Instant::now();
    for seed in 0..5 {
        for mode in ALL_MODES {
            let report = run_gradcheck(&tiny_config(seed), mode, 1e-5, 1e-4).unwrap();
            assert!(
                report.passed(),
                "seed {seed}, mode {mode}: worst group {} at {:.3e}",
                report.worst_group().name,
                report.worst_group().error
            );
        }
    }
    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    println!("acceptance: gradients match central finite differences (seeds 0-4, eps 1e-5, tol 1e-4): PASS");
}

/// Straight-line transcription of the gate equations, written against plain
/// nested `Vec`s with no shared code beyond the standard library. Weight
/// rows are ordered input, forget, cell, output, matching the checkpoint
/// layout.
mod reference {
    pub struct Layer {
        pub u: Vec<Vec<f64>>,
        pub w: Vec<Vec<f64>>,
        pub b: Vec<f64>,
        pub hidden: usize,
    }

    fn sigmoid(x: f64) -> f64 {
        1.0 / (1.0 + (-x).exp())
    }

    pub fn run_stack(layers: &[Layer], inputs: &[Vec<f64>]) -> Vec<f64> {
        let mut sequence: Vec<Vec<f64>> = inputs.to_vec();
        let mut last_h = Vec::new();
        for layer in layers {
            let h_dim = layer.hidden;
            let mut h = vec![0.0; h_dim];
            let mut c = vec![0.0; h_dim];
            let mut outputs = Vec::with_capacity(sequence.len());
            for x in &sequence {
                let mut pre = vec![0.0; 4 * h_dim];
                for (r, row) in layer.u.iter().enumerate() {
                    let mut acc = layer.b[r];
                    for (j, value) in x.iter().enumerate() {
                        acc += row[j] * value;
                    }
                    for (j, value) in h.iter().enumerate() {
                        acc += layer.w[r][j] * value;
                    }
                    pre[r] = acc;
                }
                let mut next_h = vec![0.0; h_dim];
                let mut next_c = vec![0.0; h_dim];
                for j in 0..h_dim {
                    let i_gate = sigmoid(pre[j]);
                    let f_gate = sigmoid(pre[h_dim + j]);
                    let g_gate = pre[2 * h_dim + j].tanh();
                    let o_gate = sigmoid(pre[3 * h_dim + j]);
                    next_c[j] = f_gate * c[j] + i_gate * g_gate;
                    next_h[j] = o_gate * next_c[j].tanh();
                }
                h = next_h;
                c = next_c;
                outputs.push(h.clone());
            }
            last_h = h;
            sequence = outputs;
        }
        last_h
    }
}

/// Gate 2: the stacked recurrent encoder against the independent
/// transcription above, 100 random shapes with T <= 4 and hidden <= 4,
/// within 1e-10 elementwise.
#[test]
fn stacked_lstm_matches_reference() {
    let mut rng = SeededRng::new(2);
    for case in 0..100 {
        let window = 1 + rng.index(4);
        let features = 1 + rng.index(4);
        let hidden = [1 + rng.index(4), 1 + rng.index(4), 1 + rng.index(4)];
        let config = TrainConfig {
            sensor_features: 1,
            network_features: features,
            sensor_widths: [1, 1, 1, 1],
            lstm_hidden: hidden,
            fusion_widths: [2, 2],
            window,
            ..TrainConfig::default()
        };
        let mut params = ModelParams::zeros(&config).unwrap();
        for (_, tensor) in params.tensors_mut() {
            for v in tensor.value.as_mut_slice() {
                *v = rng.uniform(-1.0, 1.0);
            }
        }

        let layers: Vec<reference::Layer> = params
            .lstm_layers
            .iter()
            .map(|cell| reference::Layer {
                u: matrix_rows(&cell.input_weights.value),
                w: matrix_rows(&cell.recurrent_weights.value),
                b: cell.biases.value.as_slice().to_vec(),
                hidden: cell.recurrent_weights.value.cols(),
            })
            .collect();

        let flat: Vec<f64> = (0..window * features)
            .map(|_| rng.uniform(-1.0, 1.0))
            .collect();
        let x = Matrix::from_vec(window, features, flat).unwrap();
        let inputs: Vec<Vec<f64>> = (0..window).map(|t| x.row(t).to_vec()).collect();

        let got = network_encode(&params, &x).unwrap();
        let want = reference::run_stack(&layers, &inputs);
        assert_eq!(got.len(), want.len(), "case {case}");
        for (j, (g, w)) in got.iter().zip(&want).enumerate() {
            assert!(
                (g - w).abs() <= 1e-10,
                "case {case}, component {j}: {g} vs {w}"
            );
        }
    }
    println!("acceptance: stacked recurrent encoder matches independent transcription (100 cases, tol 1e-10): PASS");
}

fn matrix_rows(m: &Matrix) -> Vec<Vec<f64>> {
    (0..m.rows()).map(|r| m.row(r).to_vec()).collect()
}

/// Gate 3: precision, recall, F1, and the confusion counts against a
/// brute-force recount of 1000 random label pairs, exactly; zero-denominator
/// cases return 0.
#[test]
fn metrics_match_brute_force() {
    let mut rng = SeededRng::new(3);
    let y_true: Vec<u8> = (0..1000).map(|_| (rng.next_f64() < 0.3) as u8).collect();
    let y_pred: Vec<u8> = (0..1000).map(|_| (rng.next_f64() < 0.4) as u8).collect();

    let cm = confusion(&y_true, &y_pred).unwrap();
    let (mut tp, mut tn, mut fp, mut fn_) = (0u64, 0u64, 0u64, 0u64);
    for (t, p) in y_true.iter().zip(&y_pred) {
        match (t, p) {
            (1, 1) => tp += 1,
            (0, 0) => tn += 1,
            (0, 1) => fp += 1,
            (1, 0) => fn_ += 1,
            _ => unreachable!(),
        }
    }
    assert_eq!((cm.tp, cm.tn, cm.fp, cm.fn_), (tp, tn, fp, fn_));

    let brute_precision = if tp + fp == 0 {
        0.0
    } else {
        tp as f64 / (tp + fp) as f64
    };
    let brute_recall = if tp + fn_ == 0 {
        0.0
    } else {
        tp as f64 / (tp + fn_) as f64
    };
    let brute_f1 = if brute_precision + brute_recall == 0.0 {
        0.0
    } else {
        2.0 * brute_precision * brute_recall / (brute_precision + brute_recall)
    };
    assert_eq!(cm.precision(), brute_precision);
    assert_eq!(cm.recall(), brute_recall);
    assert_eq!(cm.f1(), brute_f1);

    // Degenerate inputs: no predicted positives, no actual positives.
    let zeros = confusion(&[0, 0, 0], &[0, 0, 0]).unwrap();
    assert_eq!(zeros.precision(), 0.0);
    assert_eq!(zeros.recall(), 0.0);
    assert_eq!(zeros.f1(), 0.0);
    println!("acceptance: metrics match brute-force recount (1000 pairs, exact): PASS");
}

/// Gate 4: after imputation and normalization every value sits in [0, 1]
/// with nothing missing, the statistics are fitted on the training side only
/// (permuting everything after the fit boundary leaves them bitwise
/// unchanged), and constant features map to 0.
#[test]
fn preprocessing_bounds_and_no_leakage() {
    let spec = SyntheticSpec {
        sample_count: 1200,
        sensor_features: 8,
        network_features: 5,
        window: 4,
        missing_rate: 0.02,
        seed: 4,
        ..SyntheticSpec::default()
    };
    let (mut sensor, network) = generate_synthetic(&spec).unwrap();
    assert!(sensor.has_missing(), "fixture must exercise imputation");

    // Append a constant feature to the sensor table.
    sensor.feature_names.push("constant".into());
    for row in &mut sensor.rows {
        row.push(Some(4.2));
    }
    let constant_index = sensor.feature_names.len() - 1;

    let prepared = prepare_dataset(&sensor, &network, spec.window, 0.7, None).unwrap();
    for sample in prepared.train.iter().chain(&prepared.test) {
        for v in sample.sensor.iter().chain(sample.network.as_slice()) {
            assert!(v.is_finite());
            assert!((0.0..=1.0).contains(v), "value {v} out of range");
        }
        assert_eq!(sample.sensor[constant_index], 0.0);
    }

    // Permute every row strictly after the fit boundary; the statistics must
    // not move at all.
    let mut scrambled_sensor = sensor.clone();
    let mut scrambled_network = network.clone();
    reverse_rows_after(
        &mut scrambled_sensor.rows,
        &sensor.timestamps,
        prepared.fit_boundary,
    );
    reverse_rows_after(
        &mut scrambled_network.rows,
        &network.timestamps,
        prepared.fit_boundary,
    );
    assert_ne!(
        scrambled_sensor.rows, sensor.rows,
        "permutation must change the raw data"
    );
    let reprepared = prepare_dataset(
        &scrambled_sensor,
        &scrambled_network,
        spec.window,
        0.7,
        None,
    )
    .unwrap();
    assert_eq!(reprepared.stats, prepared.stats);
    assert_eq!(reprepared.fit_boundary, prepared.fit_boundary);
    println!(
        "acceptance: preprocessing bounds, train-only statistics, constant-to-zero (exact): PASS"
    );
}

fn reverse_rows_after(rows: &mut [Vec<Option<f64>>], timestamps: &[f64], boundary: f64) {
    let start = timestamps.partition_point(|&t| t <= boundary);
    rows[start..].reverse();
}

/// Gate 5: on the default synthetic dataset (10,000 samples, attack ratio
/// 0.121), the fused model's mean test F1 over five training seeds is within
/// 0.01 of or better than both single-modality ablations, in under ten
/// minutes.
#[test]
fn multimodal_f1_not_worse_than_single_modality() {
    let started = Instant::now();
    let spec = SyntheticSpec::default();
    assert_eq!(spec.sample_count, 10_000);
    assert_eq!(spec.attack_ratio, 0.121);
    let (sensor, network) = generate_synthetic(&spec).unwrap();
    let prepared = prepare_dataset(&sensor, &network, spec.window, 0.7, None).unwrap();

    let base = TrainConfig {
        sensor_widths: [32, 24, 16, 8],
        lstm_hidden: [16, 16, 8],
        fusion_widths: [16, 8],
        window: spec.window,
        epochs: 6,
        batch_size: 64,
        ..TrainConfig::default()
    };
    let seeds = 5u64;
    let mut sums = [0.0f64; 3];
    for seed in 0..seeds {
        let config = TrainConfig {
            seed,
            ..base.clone()
        };
        let rows = run_ablation(&config, &prepared).unwrap();
        assert_eq!(rows[0].mode, ModalityMode::Multi);
        for (sum, row) in sums.iter_mut().zip(&rows) {
            *sum += row.f1;
        }
    }
    let [multi, sensor_only, network_only] = sums.map(|s| s / seeds as f64);
    println!("mean F1 over {seeds} seeds: multi {multi:.4}, sensor-only {sensor_only:.4}, network-only {network_only:.4}");
    assert!(
        multi >= sensor_only - 0.01,
        "multi {multi:.4} vs sensor-only {sensor_only:.4}"
    );
    assert!(
        multi >= network_only - 0.01,
        "multi {multi:.4} vs network-only {network_only:.4}"
    );
    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(600), "took {elapsed:?}");
    println!("acceptance: fused model at least matches both single-modality ablations (5 seeds, slack 0.01): PASS");
}

/// Gate 6: a linearly separable toy set, verified separable by brute-force
/// single-feature threshold first, trains to F1 = 1.0 with final loss below
/// 0.1 within 200 epochs.
#[test]
fn separable_toy_converges() {
    let samples = generate_separable_toy(6, 4, 3, 240, 5);
    assert!(
        best_single_feature_threshold_is_perfect(&samples),
        "toy fixture must be linearly separable"
    );

    let config = TrainConfig {
        sensor_features: 6,
        network_features: 4,
        sensor_widths: [12, 10, 8, 6],
        lstm_hidden: [8, 8, 6],
        fusion_widths: [12, 6],
        window: 3,
        epochs: 200,
        batch_size: 16,
        seed: 0,
        ..TrainConfig::default()
    };
    let (params, trace) = train(&config, ModalityMode::Multi, &samples).unwrap();
    assert!(trace.len() <= 200);
    let final_loss = *trace.last().unwrap();
    assert!(final_loss < 0.1, "final loss {final_loss}");
    let report = evaluate(
        &params,
        ModalityMode::Multi,
        &samples,
        ReportMeta::default(),
    )
    .unwrap();
    assert_eq!(report.f1, 1.0, "training F1 {}", report.f1);
    println!("acceptance: separable toy reaches F1 = 1.0 with loss < 0.1 within 200 epochs: PASS");
}

/// Sweeps thresholds on every sensor feature: the toy is separable when some
/// feature splits the classes perfectly.
fn best_single_feature_threshold_is_perfect(samples: &[AlignedSample]) -> bool {
    let features = samples[0].sensor.len();
    (0..features).any(|f| {
        let max_normal = samples
            .iter()
            .filter(|s| s.label == 0)
            .map(|s| s.sensor[f])
            .fold(f64::NEG_INFINITY, f64::max);
        let min_attack = samples
            .iter()
            .filter(|s| s.label == 1)
            .map(|s| s.sensor[f])
            .fold(f64::INFINITY, f64::min);
        max_normal < min_attack
    })
}

/// Gate 7: identical config and seed produce bitwise-identical checkpoint
/// bytes, loss traces, and report bytes across two full runs (timestamps
/// held fixed).
#[test]
fn training_is_deterministic() {
    let run = || {
        let spec = SyntheticSpec {
            sample_count: 600,
            sensor_features: 6,
            network_features: 4,
            window: 3,
            seed: 11,
            ..SyntheticSpec::default()
        };
        let (sensor, network) = generate_synthetic(&spec).unwrap();
        let prepared = prepare_dataset(&sensor, &network, spec.window, 0.7, None).unwrap();
        let config = TrainConfig {
            sensor_features: 6,
            network_features: 4,
            sensor_widths: [8, 8, 6, 4],
            lstm_hidden: [6, 6, 4],
            fusion_widths: [8, 4],
            window: 3,
            epochs: 3,
            batch_size: 16,
            seed: 9,
            ..TrainConfig::default()
        };
        let (params, trace) = train(&config, ModalityMode::Multi, &prepared.train).unwrap();

        let dir = tempfile::tempdir().unwrap();
        let checkpoint_path = dir.path().join("model.json");
        let checkpoint = Checkpoint::from_params(&config, ModalityMode::Multi, &params);
        save_checkpoint(&checkpoint_path, &checkpoint).unwrap();
        let checkpoint_bytes = std::fs::read(&checkpoint_path).unwrap();

        let trace_csv: String = std::iter::once("epoch,loss".to_string())
            .chain(trace.iter().enumerate().map(|(i, l)| format!("{i},{l}")))
            .collect::<Vec<_>>()
            .join("\n");

        let report = evaluate(
            &params,
            ModalityMode::Multi,
            &prepared.test,
            ReportMeta::default(),
        )
        .unwrap();
        let report_bytes = serde_json::to_vec_pretty(&report).unwrap();
        (checkpoint_bytes, trace_csv, report_bytes)
    };

    let first = run();
    let second = run();
    assert_eq!(first.0, second.0, "checkpoint bytes differ");
    assert_eq!(first.1, second.1, "loss traces differ");
    assert_eq!(first.2, second.2, "report bytes differ");
    println!("acceptance: double run is bitwise identical (checkpoint, trace, report): PASS");
}

/// Gate 8: tables shaped like the real plant export (51 sensor features,
/// 16 network features) ingest cleanly; off-by-one feature counts are
/// rejected with the named mismatch error.
#[test]
fn ingestion_validates_feature_counts() {
    let spec = SyntheticSpec {
        sample_count: 60,
        seed: 8,
        missing_rate: 0.0,
        ..SyntheticSpec::default()
    };
    let (sensor, network) = generate_synthetic(&spec).unwrap();
    assert_eq!(sensor.feature_count(), 51);
    assert_eq!(network.feature_count(), 16);

    let dir = tempfile::tempdir().unwrap();
    let sensor_path = dir.path().join("sensor.csv");
    let network_path = dir.path().join("network.csv");
    write_csv(&sensor, &sensor_path).unwrap();
    write_csv(&network, &network_path).unwrap();

    let sensor_ok = ingest_csv(&sensor_path, Modality::Sensor, 51).unwrap();
    let network_ok = ingest_csv(&network_path, Modality::Network, 16).unwrap();
    assert_eq!(sensor_ok.feature_count(), 51);
    assert_eq!(network_ok.feature_count(), 16);

    // Write variants with one feature dropped and one added.
    let mut narrow = sensor.clone();
    narrow.feature_names.pop();
    for row in &mut narrow.rows {
        row.pop();
    }
    let narrow_path = dir.path().join("narrow.csv");
    write_csv(&narrow, &narrow_path).unwrap();
    match ingest_csv(&narrow_path, Modality::Sensor, 51) {
        Err(Error::FeatureCountMismatch {
            modality,
            expected,
            found,
        }) => {
            assert_eq!((modality, expected, found), ("sensor", 51, 50));
        }
        other => panic!("expected a feature count mismatch, got {other:?}"),
    }

    let mut wide = network.clone();
    wide.feature_names.push("n17".into());
    for row in &mut wide.rows {
        row.push(Some(0.0));
    }
    let wide_path = dir.path().join("wide.csv");
    write_csv(&wide, &wide_path).unwrap();
    match ingest_csv(&wide_path, Modality::Network, 16) {
        Err(Error::FeatureCountMismatch {
            modality,
            expected,
            found,
        }) => {
            assert_eq!((modality, expected, found), ("network", 16, 17));
        }
        other => panic!("expected a feature count mismatch, got {other:?}"),
    }
    println!("acceptance: plant-shaped headers accepted, off-by-one feature counts rejected: PASS");
}

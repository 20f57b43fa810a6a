//! Causal alignment of sensor rows with network windows, and the
//! chronological train/test split.

use crate::data::ingest::RawModalityTable;
use crate::error::{Error, Result};
use crate::tensor::Matrix;

/// One training or evaluation sample: a sensor feature vector, the window of
/// network rows observed at or before it (oldest first), and its label.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignedSample {
    pub sensor: Vec<f64>,
    pub network: Matrix,
    pub label: u8,
}

/// Result of [`split_chronological`]: the two splits plus any class-coverage
/// warnings that callers should surface.
#[derive(Debug, Clone)]
pub struct SplitOutcome {
    pub train: Vec<AlignedSample>,
    pub test: Vec<AlignedSample>,
    pub warnings: Vec<String>,
}

/// Pairs each alignable sensor row with its network window, using timestamps
/// only. Returns `(sensor_index, network_end)` where the window is the
/// network rows `[network_end - window, network_end)`. Sensor rows with fewer
/// than `window` network rows at or before them are skipped.
pub fn aligned_windows(
    sensor_ts: &[f64],
    network_ts: &[f64],
    window: usize,
) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut end = 0usize;
    for (i, &t) in sensor_ts.iter().enumerate() {
        while end < network_ts.len() && network_ts[end] <= t {
            end += 1;
        }
        if end >= window {
            out.push((i, end));
        }
    }
    out
}

/// Builds aligned samples from preprocessed (imputed, no-missing) tables.
/// Labels come from the sensor table.
pub fn align_modalities(
    sensor: &RawModalityTable,
    network: &RawModalityTable,
    window: usize,
) -> Result<Vec<AlignedSample>> {
    if window == 0 {
        return Err(Error::InvalidArgument(
            "alignment window must be at least 1".into(),
        ));
    }
    let labels = sensor.labels.as_ref().ok_or_else(|| {
        Error::InvalidArgument("sensor table has no label column; alignment needs labels".into())
    })?;
    if sensor.has_missing() || network.has_missing() {
        return Err(Error::InvalidArgument(
            "align_modalities requires imputed tables (missing values remain)".into(),
        ));
    }

    let pairs = aligned_windows(&sensor.timestamps, &network.timestamps, window);
    if pairs.is_empty() {
        return Err(Error::NoAlignedSamples { window });
    }

    let features = network.feature_count();
    let mut samples = Vec::with_capacity(pairs.len());
    for (sensor_idx, end) in pairs {
        let mut flat = Vec::with_capacity(window * features);
        for row in &network.rows[end - window..end] {
            flat.extend(row.iter().map(|v| v.expect("missing cell after check")));
        }
        samples.push(AlignedSample {
            sensor: sensor.rows[sensor_idx]
                .iter()
                .map(|v| v.expect("missing cell after check"))
                .collect(),
            network: Matrix::from_vec(window, features, flat)?,
            label: labels[sensor_idx],
        });
    }
    Ok(samples)
}

/// Splits without shuffling: the first `floor(fraction * len)` samples train,
/// the rest test. Warns when either side is missing one of the two classes.
pub fn split_chronological(
    samples: Vec<AlignedSample>,
    train_fraction: f64,
) -> Result<SplitOutcome> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "train_fraction must lie in (0, 1), got {train_fraction}"
        )));
    }
    let take = (train_fraction * samples.len() as f64).floor() as usize;
    if take == 0 {
        return Err(Error::EmptySplit {
            fraction: train_fraction,
            side: "train",
        });
    }
    if take >= samples.len() {
        return Err(Error::EmptySplit {
            fraction: train_fraction,
            side: "test",
        });
    }
    let mut train = samples;
    let test = train.split_off(take);

    let mut warnings = Vec::new();
    for (name, split) in [("train", &train), ("test", &test)] {
        let attacks = split.iter().filter(|s| s.label == 1).count();
        if attacks == 0 {
            warnings.push(format!("{name} split contains no attack samples"));
        }
        if attacks == split.len() {
            warnings.push(format!("{name} split contains no normal samples"));
        }
    }
    Ok(SplitOutcome {
        train,
        test,
        warnings,
    })
}

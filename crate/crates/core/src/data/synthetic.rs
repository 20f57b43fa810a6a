//! Seeded generator for SWaT-shaped two-modality datasets.
//!
//! Sensor features are smooth process signals (shared sinusoid drivers plus
//! drift and noise); network features are packet statistics coupled to the
//! same drivers. Attacks occupy contiguous windows and shift a subset of
//! features in both modalities, so they are learnable but hidden under noise.

use serde::{Deserialize, Serialize};

use crate::data::align::AlignedSample;
use crate::data::ingest::{Modality, RawModalityTable};
use crate::error::{Error, Result};
use crate::rng::SeededRng;
use crate::tensor::Matrix;

/// Generator parameters. All fields have defaults, so a JSON `{}` is a valid
/// spec.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyntheticSpec {
    pub sample_count: usize,
    pub attack_ratio: f64,
    pub window: usize,
    pub seed: u64,
    pub sensor_features: usize,
    pub network_features: usize,
    /// Network rows emitted per sensor row (evenly spaced in time).
    pub network_rows_per_sensor: usize,
    pub noise_level: f64,
    pub drift_magnitude: f64,
    /// Attack shift on sensor features, relative to each feature's amplitude.
    pub sensor_attack_magnitude: f64,
    /// Attack shift on network features, relative to each feature's coupling.
    pub network_attack_magnitude: f64,
    /// Probability that any one data cell is left empty.
    pub missing_rate: f64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            sample_count: 10_000,
            attack_ratio: 0.121,
            window: 8,
            seed: 0,
            sensor_features: 51,
            network_features: 16,
            network_rows_per_sensor: 4,
            noise_level: 0.08,
            drift_magnitude: 0.1,
            sensor_attack_magnitude: 0.35,
            network_attack_magnitude: 0.5,
            missing_rate: 0.005,
        }
    }
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        if self.sample_count < 10 {
            return Err(Error::InvalidArgument(format!(
                "sample_count must be at least 10, got {}",
                self.sample_count
            )));
        }
        if !(self.attack_ratio > 0.0 && self.attack_ratio < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "attack_ratio must lie in (0, 1), got {}",
                self.attack_ratio
            )));
        }
        if self.window == 0 {
            return Err(Error::InvalidArgument("window must be at least 1".into()));
        }
        if self.sensor_features == 0 || self.network_features == 0 {
            return Err(Error::InvalidArgument(
                "both modalities need at least one feature".into(),
            ));
        }
        if self.network_rows_per_sensor == 0 {
            return Err(Error::InvalidArgument(
                "network_rows_per_sensor must be at least 1".into(),
            ));
        }
        for (name, value) in [
            ("noise_level", self.noise_level),
            ("drift_magnitude", self.drift_magnitude),
            ("sensor_attack_magnitude", self.sensor_attack_magnitude),
            ("network_attack_magnitude", self.network_attack_magnitude),
        ] {
            if !(value >= 0.0 && value.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "{name} must be a nonnegative finite number, got {value}"
                )));
            }
        }
        if !(0.0..0.5).contains(&self.missing_rate) {
            return Err(Error::InvalidArgument(format!(
                "missing_rate must lie in [0, 0.5), got {}",
                self.missing_rate
            )));
        }
        Ok(())
    }
}

const DRIVER_PERIODS: [f64; 3] = [97.0, 211.0, 401.0];
const ATTACK_WINDOW_MIN: usize = 20;
const ATTACK_WINDOW_MAX: usize = 60;

struct SensorChannel {
    driver: usize,
    phase: f64,
    amplitude: f64,
    offset: f64,
    drift: f64,
}

struct NetworkChannel {
    driver: usize,
    phase: f64,
    base: f64,
    coupling: f64,
}

struct AttackWindow {
    start: usize,
    end: usize,
    sensor_shifts: Vec<(usize, f64)>,
    network_shifts: Vec<(usize, f64)>,
}

/// Draws `count` distinct indices below `limit`.
fn pick_distinct(rng: &mut SeededRng, limit: usize, count: usize) -> Vec<usize> {
    let mut all: Vec<usize> = (0..limit).collect();
    rng.shuffle(&mut all);
    all.truncate(count.min(limit));
    all
}

/// Contiguous attack windows whose lengths sum to exactly `total`, placed
/// without overlap across `n` rows.
fn plan_attack_windows(rng: &mut SeededRng, n: usize, total: usize) -> Vec<(usize, usize)> {
    if total == 0 {
        return Vec::new();
    }
    let mut lengths = Vec::new();
    let mut remaining = total;
    while remaining > 0 {
        let drawn = ATTACK_WINDOW_MIN + rng.index(ATTACK_WINDOW_MAX - ATTACK_WINDOW_MIN + 1);
        let len = drawn.min(remaining);
        lengths.push(len);
        remaining -= len;
    }

    let free = n - total;
    let weights: Vec<f64> = (0..=lengths.len()).map(|_| rng.next_f64() + 1e-9).collect();
    let weight_sum: f64 = weights.iter().sum();
    let mut gaps: Vec<usize> = weights
        .iter()
        .map(|w| (free as f64 * w / weight_sum).floor() as usize)
        .collect();
    let assigned: usize = gaps.iter().sum();
    *gaps.last_mut().expect("at least one gap") += free - assigned;

    let mut windows = Vec::with_capacity(lengths.len());
    let mut cursor = 0usize;
    for (len, gap) in lengths.iter().zip(&gaps) {
        cursor += gap;
        windows.push((cursor, cursor + len));
        cursor += len;
    }
    windows
}

/// Generates the sensor and network tables. Deterministic for a given spec.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<(RawModalityTable, RawModalityTable)> {
    spec.validate()?;
    let n = spec.sample_count;
    let mut rng = SeededRng::new(spec.seed);

    let sensor_channels: Vec<SensorChannel> = (0..spec.sensor_features)
        .map(|_| SensorChannel {
            driver: rng.index(DRIVER_PERIODS.len()),
            phase: rng.uniform(0.0, std::f64::consts::TAU),
            amplitude: rng.uniform(0.5, 1.5),
            offset: rng.uniform(-2.0, 2.0),
            drift: spec.drift_magnitude * rng.uniform(-1.0, 1.0),
        })
        .collect();
    let network_channels: Vec<NetworkChannel> = (0..spec.network_features)
        .map(|_| NetworkChannel {
            driver: rng.index(DRIVER_PERIODS.len()),
            phase: rng.uniform(0.0, std::f64::consts::TAU),
            base: rng.uniform(0.0, 5.0),
            coupling: rng.uniform(0.3, 1.0),
        })
        .collect();

    let attack_total = (spec.attack_ratio * n as f64).round() as usize;
    let spans = plan_attack_windows(&mut rng, n, attack_total);

    // A fixed core of features reacts in every attack window, each pushed in
    // a direction drawn once per feature (a tampered valve sticks the same
    // way every time). Each window additionally disturbs a few extras.
    let core_sensor = pick_distinct(
        &mut rng,
        spec.sensor_features,
        spec.sensor_features.div_ceil(8),
    );
    let core_network = pick_distinct(
        &mut rng,
        spec.network_features,
        spec.network_features.div_ceil(4),
    );
    let mut draw_direction = |n: usize| -> Vec<f64> {
        (0..n)
            .map(|_| if rng.next_f64() < 0.5 { -1.0 } else { 1.0 })
            .collect()
    };
    let sensor_direction = draw_direction(spec.sensor_features);
    let network_direction = draw_direction(spec.network_features);
    let windows: Vec<AttackWindow> = spans
        .into_iter()
        .map(|(start, end)| {
            let mut sensor_hit = core_sensor.clone();
            for extra in pick_distinct(&mut rng, spec.sensor_features, 3) {
                if !sensor_hit.contains(&extra) {
                    sensor_hit.push(extra);
                }
            }
            let mut network_hit = core_network.clone();
            for extra in pick_distinct(&mut rng, spec.network_features, 2) {
                if !network_hit.contains(&extra) {
                    network_hit.push(extra);
                }
            }
            AttackWindow {
                start,
                end,
                sensor_shifts: sensor_hit
                    .into_iter()
                    .map(|f| {
                        (
                            f,
                            sensor_direction[f]
                                * spec.sensor_attack_magnitude
                                * sensor_channels[f].amplitude,
                        )
                    })
                    .collect(),
                network_shifts: network_hit
                    .into_iter()
                    .map(|g| {
                        (
                            g,
                            network_direction[g]
                                * spec.network_attack_magnitude
                                * network_channels[g].coupling,
                        )
                    })
                    .collect(),
            }
        })
        .collect();

    let mut labels = vec![0u8; n];
    for w in &windows {
        for label in &mut labels[w.start..w.end] {
            *label = 1;
        }
    }
    let window_at = |i: usize| windows.iter().find(|w| i >= w.start && i < w.end);

    // Sensor rows: one per step at integer seconds.
    let mut sensor_timestamps = Vec::with_capacity(n);
    let mut sensor_rows = Vec::with_capacity(n);
    for i in 0..n {
        let t = (i + 1) as f64;
        let mut row = Vec::with_capacity(spec.sensor_features);
        for (f, ch) in sensor_channels.iter().enumerate() {
            let wave = (std::f64::consts::TAU * t / DRIVER_PERIODS[ch.driver] + ch.phase).sin();
            let mut v = ch.offset
                + ch.amplitude * wave
                + ch.drift * ch.amplitude * (t / n as f64)
                + spec.noise_level * ch.amplitude * rng.normal();
            let missing = rng.next_f64() < spec.missing_rate;
            if let Some(w) = window_at(i) {
                if let Some((_, shift)) = w.sensor_shifts.iter().find(|(idx, _)| *idx == f) {
                    v += shift;
                }
            }
            row.push(if missing { None } else { Some(v) });
        }
        sensor_timestamps.push(t);
        sensor_rows.push(row);
    }

    // Network rows: `network_rows_per_sensor` per step, spaced inside (i, i+1].
    let rps = spec.network_rows_per_sensor;
    let mut network_timestamps = Vec::with_capacity(n * rps);
    let mut network_rows = Vec::with_capacity(n * rps);
    for i in 0..n {
        let in_window = window_at(i);
        for k in 1..=rps {
            let t = i as f64 + k as f64 / rps as f64;
            let mut row = Vec::with_capacity(spec.network_features);
            for (g, ch) in network_channels.iter().enumerate() {
                let wave = (std::f64::consts::TAU * t / DRIVER_PERIODS[ch.driver] + ch.phase).sin();
                let mut v = ch.base + ch.coupling * wave + spec.noise_level * rng.normal();
                let missing = rng.next_f64() < spec.missing_rate;
                if let Some(w) = in_window {
                    if let Some((_, shift)) = w.network_shifts.iter().find(|(idx, _)| *idx == g) {
                        v += shift;
                    }
                }
                row.push(if missing { None } else { Some(v) });
            }
            network_timestamps.push(t);
            network_rows.push(row);
        }
    }

    let sensor = RawModalityTable {
        modality: Modality::Sensor,
        feature_names: (1..=spec.sensor_features)
            .map(|i| format!("s{i:02}"))
            .collect(),
        timestamps: sensor_timestamps,
        rows: sensor_rows,
        labels: Some(labels),
    };
    let network = RawModalityTable {
        modality: Modality::Network,
        feature_names: (1..=spec.network_features)
            .map(|i| format!("n{i:02}"))
            .collect(),
        timestamps: network_timestamps,
        rows: network_rows,
        labels: None,
    };
    Ok((sensor, network))
}

/// Trivially separable aligned samples for convergence tests: every feature
/// of a normal sample clusters around 0.3, every feature of an attack sample
/// around 0.7, with light noise and values clamped into `[0, 1]`. Labels
/// alternate so both classes appear for any `count >= 2`.
pub fn generate_separable_toy(
    sensor_features: usize,
    network_features: usize,
    window: usize,
    count: usize,
    seed: u64,
) -> Vec<AlignedSample> {
    let mut rng = SeededRng::new(seed);
    (0..count)
        .map(|i| {
            let label = (i % 2) as u8;
            let center = if label == 1 { 0.7 } else { 0.3 };
            let mut draw = |_| (center + 0.05 * rng.normal()).clamp(0.0, 1.0);
            let sensor: Vec<f64> = (0..sensor_features).map(&mut draw).collect();
            let flat: Vec<f64> = (0..window * network_features).map(&mut draw).collect();
            AlignedSample {
                sensor,
                network: Matrix::from_vec(window, network_features, flat)
                    .expect("toy values are finite"),
                label,
            }
        })
        .collect()
}

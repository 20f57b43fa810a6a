//! One function per subcommand. Each validates everything it needs before
//! writing a single byte.

use std::path::Path;

use fuseids_core::data::{
    generate_synthetic, ingest_csv, write_csv, Modality, PreprocessStats, RawModalityTable,
};
use fuseids_core::eval::{evaluate, write_report_csv, write_report_json, EvalReport, ReportMeta};
use fuseids_core::experiment::{prepare_dataset, run_ablation, PreparedDataset};
use fuseids_core::model::{
    load_checkpoint, run_gradcheck, save_checkpoint, tiny_config, train, Checkpoint,
};

use crate::config::RunConfig;
use crate::CliError;

/// Generates the synthetic dataset and writes `sensor.csv`, `network.csv`,
/// and the generator settings as `spec.json`.
pub fn cmd_generate(config: &RunConfig, out: &Path) -> Result<(), CliError> {
    let (sensor, network) = generate_synthetic(&config.synthetic).map_err(CliError::Core)?;
    std::fs::create_dir_all(out)
        .map_err(|e| CliError::Config(format!("cannot create {}: {e}", out.display())))?;
    write_csv(&sensor, &out.join("sensor.csv")).map_err(CliError::Core)?;
    write_csv(&network, &out.join("network.csv")).map_err(CliError::Core)?;
    let spec = serde_json::to_string_pretty(&config.synthetic)
        .expect("generator settings always serialize");
    std::fs::write(out.join("spec.json"), spec)
        .map_err(|e| CliError::Config(format!("cannot write spec.json: {e}")))?;
    println!(
        "wrote {} sensor rows and {} network rows to {}",
        sensor.len(),
        network.len(),
        out.display()
    );
    Ok(())
}

/// Loads the configured CSVs, or generates the synthetic dataset when no
/// paths are configured.
fn load_tables(config: &RunConfig) -> Result<(RawModalityTable, RawModalityTable), CliError> {
    match &config.data {
        Some(paths) => {
            for path in [&paths.sensor, &paths.network] {
                if !path.is_file() {
                    return Err(CliError::Config(format!(
                        "data file {} does not exist",
                        path.display()
                    )));
                }
            }
            let sensor = ingest_csv(
                &paths.sensor,
                Modality::Sensor,
                config.train.sensor_features,
            )
            .map_err(CliError::Core)?;
            let network = ingest_csv(
                &paths.network,
                Modality::Network,
                config.train.network_features,
            )
            .map_err(CliError::Core)?;
            Ok((sensor, network))
        }
        None => generate_synthetic(&config.synthetic).map_err(CliError::Core),
    }
}

fn prepare(
    config: &RunConfig,
    window: usize,
    train_fraction: f64,
    stats: Option<PreprocessStats>,
) -> Result<PreparedDataset, CliError> {
    let (sensor, network) = load_tables(config)?;
    let prepared = prepare_dataset(&sensor, &network, window, train_fraction, stats)
        .map_err(CliError::Core)?;
    for warning in &prepared.warnings {
        eprintln!("warning: {warning}");
    }
    Ok(prepared)
}

/// Trains one model and writes `checkpoint.json`, `stats.json`, and the
/// per-epoch `loss.csv`.
pub fn cmd_train(config: &RunConfig, out: &Path) -> Result<(), CliError> {
    let prepared = prepare(
        config,
        config.train.window,
        config.train.train_fraction,
        None,
    )?;
    let (params, trace) =
        train(&config.train, config.modality, &prepared.train).map_err(CliError::Core)?;

    std::fs::create_dir_all(out)
        .map_err(|e| CliError::Config(format!("cannot create {}: {e}", out.display())))?;
    let checkpoint = Checkpoint::from_params(&config.train, config.modality, &params);
    save_checkpoint(&out.join("checkpoint.json"), &checkpoint).map_err(CliError::Core)?;
    prepared
        .stats
        .save(&out.join("stats.json"))
        .map_err(CliError::Core)?;
    std::fs::write(out.join("loss.csv"), loss_csv(&trace))
        .map_err(|e| CliError::Config(format!("cannot write loss.csv: {e}")))?;

    println!(
        "trained {} model on {} samples for {} epochs; final loss {}",
        config.modality,
        prepared.train.len(),
        trace.len(),
        trace.last().copied().unwrap_or(f64::NAN)
    );
    Ok(())
}

fn loss_csv(trace: &[f64]) -> String {
    let mut text = String::from("epoch,loss\n");
    for (epoch, loss) in trace.iter().enumerate() {
        text.push_str(&format!("{epoch},{loss}\n"));
    }
    text
}

/// Evaluates a saved checkpoint on the test split, reusing the saved
/// preprocessing statistics, and writes `report.json` and `report.csv`.
pub fn cmd_eval(config: &RunConfig, out: &Path) -> Result<(), CliError> {
    let checkpoint_path = config
        .checkpoint
        .as_ref()
        .ok_or_else(|| CliError::Config("eval requires a checkpoint path in the config".into()))?;
    let stats_path = config
        .stats
        .as_ref()
        .ok_or_else(|| CliError::Config("eval requires a stats path in the config".into()))?;
    for path in [checkpoint_path, stats_path] {
        if !path.is_file() {
            return Err(CliError::Config(format!(
                "{} does not exist",
                path.display()
            )));
        }
    }

    let checkpoint = load_checkpoint(checkpoint_path).map_err(CliError::Core)?;
    let params = checkpoint.to_params().map_err(CliError::Core)?;
    let stats = PreprocessStats::load(stats_path).map_err(CliError::Core)?;

    // The checkpoint's own configuration decides the architecture, window,
    // and split, so a stale `train` section cannot skew the evaluation.
    let prepared = prepare(
        config,
        checkpoint.config.window,
        checkpoint.config.train_fraction,
        Some(stats),
    )?;
    let meta = ReportMeta {
        checkpoint: checkpoint_path.display().to_string(),
        dataset: dataset_label(config),
        created_at: chrono::Utc::now().to_rfc3339(),
        modality: checkpoint.modality.to_string(),
    };
    let report =
        evaluate(&params, checkpoint.modality, &prepared.test, meta).map_err(CliError::Core)?;

    std::fs::create_dir_all(out)
        .map_err(|e| CliError::Config(format!("cannot create {}: {e}", out.display())))?;
    write_report_json(&out.join("report.json"), &report).map_err(CliError::Core)?;
    write_report_csv(&out.join("report.csv"), &report).map_err(CliError::Core)?;
    print_report(&report);
    Ok(())
}

fn dataset_label(config: &RunConfig) -> String {
    match &config.data {
        Some(paths) => format!("{} + {}", paths.sensor.display(), paths.network.display()),
        None => format!("synthetic (seed {})", config.synthetic.seed),
    }
}

fn print_report(report: &EvalReport) {
    println!(
        "tp {} tn {} fp {} fn {}",
        report.confusion.tp, report.confusion.tn, report.confusion.fp, report.confusion.fn_
    );
    println!(
        "precision {:.4}  recall {:.4}  f1 {:.4}  fp-rate {:.2}%  fn-rate {:.2}%",
        report.precision, report.recall, report.f1, report.fp_rate_pct, report.fn_rate_pct
    );
}

/// Verifies analytic gradients against central finite differences on the
/// tiny instance, printing the max relative error per parameter group.
pub fn cmd_gradcheck(config: &RunConfig) -> Result<(), CliError> {
    let mut worst: Option<(u64, String, f64)> = None;
    for &seed in &config.gradcheck.seeds {
        let report = run_gradcheck(
            &tiny_config(seed),
            config.modality,
            config.gradcheck.eps,
            config.gradcheck.tolerance,
        )
        .map_err(CliError::Core)?;
        println!("seed {seed} ({} mode):", config.modality);
        for group in &report.groups {
            let status = if group.error <= report.tolerance {
                "ok"
            } else {
                "FAIL"
            };
            println!("  {:<24} {:>12.4e}  {status}", group.name, group.error);
        }
        if !report.passed() {
            let g = report.worst_group();
            let replace = worst.as_ref().is_none_or(|(_, _, e)| g.error > *e);
            if replace {
                worst = Some((seed, g.name.clone(), g.error));
            }
        }
    }
    match worst {
        None => {
            println!(
                "all gradients within {} of finite differences",
                config.gradcheck.tolerance
            );
            Ok(())
        }
        Some((seed, name, error)) => Err(CliError::Verification(format!(
            "gradient check failed: {name} off by {error:.4e} at seed {seed} (tolerance {})",
            config.gradcheck.tolerance
        ))),
    }
}

/// Trains and evaluates all three modality modes with the same seed and
/// split, printing the comparison and writing `ablation.csv`.
pub fn cmd_ablation(config: &RunConfig, out: &Path) -> Result<(), CliError> {
    let prepared = prepare(
        config,
        config.train.window,
        config.train.train_fraction,
        None,
    )?;
    let rows = run_ablation(&config.train, &prepared).map_err(CliError::Core)?;

    std::fs::create_dir_all(out)
        .map_err(|e| CliError::Config(format!("cannot create {}: {e}", out.display())))?;
    let mut csv = String::from("mode,precision,recall,f1\n");
    println!(
        "{:<14} {:>9} {:>9} {:>9}",
        "mode", "precision", "recall", "f1"
    );
    for row in &rows {
        println!(
            "{:<14} {:>9.4} {:>9.4} {:>9.4}",
            row.mode.to_string(),
            row.precision,
            row.recall,
            row.f1
        );
        csv.push_str(&format!(
            "{},{},{},{}\n",
            row.mode, row.precision, row.recall, row.f1
        ));
    }
    std::fs::write(out.join("ablation.csv"), csv)
        .map_err(|e| CliError::Config(format!("cannot write ablation.csv: {e}")))?;
    Ok(())
}

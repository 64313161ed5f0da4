use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use tta_core::datasets::write_dataset;
use tta_core::experiment::{
    self, classifier_counts_csv, compare_early_stopping, curves_csv, emit_curves, encode_set, load_config, load_datasets, run_metrics,
    ExperimentConfig, RunMetrics, TrainedModel,
};
use tta_core::tree::build_tree;

/// Trace-distance tree AdaBoost quantum classifier experiments.
#[derive(Parser)]
#[command(name = "tta", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Experiment config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; defaults to the config's `output_dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the training seed (and the dataset seed for `gen-data`).
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for node-parallel training.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the train/test dataset files.
    GenData(Common),
    /// Build the trace-distance class tree without training it.
    BuildTree(Common),
    /// Run every repeat of the configured experiment.
    Train(Common),
    /// Re-evaluate the saved models of a trained experiment.
    Eval(Common),
    /// Recompute accuracy curves and classifier counts from saved models.
    Curves(Common),
    /// Boost a binary task with and without early stopping.
    EarlyStopStudy(Common),
}

struct Ctx {
    cfg: ExperimentConfig,
    out: PathBuf,
}

fn setup(c: &Common, dataset_seed: bool) -> Result<Ctx> {
    if let Some(t) = c.threads {
        if t == 0 {
            bail!("--threads must be at least 1");
        }
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global().context("configuring thread pool")?;
    }
    let mut cfg = load_config(&c.config).with_context(|| format!("invalid config {}", c.config.display()))?;
    if let Some(s) = c.seed {
        if dataset_seed {
            cfg.dataset.seed = s;
        } else {
            cfg.seed = s;
        }
    }
    let out = c.out.clone().or_else(|| cfg.output_dir.clone()).context("no output directory: pass --out or set output_dir")?;
    fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
    Ok(Ctx { cfg, out })
}

fn saved_models(out: &Path, repeats: usize) -> Result<Vec<(usize, TrainedModel)>> {
    (0..repeats)
        .map(|r| {
            let path = out.join(format!("run_{r}")).join("model.json");
            let text = fs::read_to_string(&path).with_context(|| format!("reading {}; run `tta train` first", path.display()))?;
            let model = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
            Ok((r, model))
        })
        .collect()
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::GenData(c) => {
            let ctx = setup(&c, true)?;
            let (train, test) = load_datasets(&ctx.cfg.dataset)?;
            write_dataset(&ctx.out.join("train.txt"), &train)?;
            write_dataset(&ctx.out.join("test.txt"), &test)?;
            println!("wrote {} train and {} test samples to {}", train.len(), test.len(), ctx.out.display());
        }
        Command::BuildTree(c) => {
            let ctx = setup(&c, false)?;
            let (train, _) = load_datasets(&ctx.cfg.dataset)?;
            let enc = encode_set(&train, &ctx.cfg.encoding, ctx.cfg.ansatz.n_qubits())?;
            let tree = build_tree(&enc.states, &enc.labels, enc.n_classes, ctx.cfg.splitter)?;
            let text = tree.to_text();
            fs::write(ctx.out.join("tree.txt"), &text)?;
            print!("{text}");
        }
        Command::Train(c) => {
            let ctx = setup(&c, false)?;
            let report = experiment::run_experiment(&ctx.cfg, Some(&ctx.out))?;
            for r in &report.runs {
                print_run(r);
            }
            print!("{}", experiment::aggregate_csv(&report.aggregate));
        }
        Command::Eval(c) => {
            let ctx = setup(&c, false)?;
            let (train, test) = load_datasets(&ctx.cfg.dataset)?;
            let n = ctx.cfg.ansatz.n_qubits();
            let (train, test) = (encode_set(&train, &ctx.cfg.encoding, n)?, encode_set(&test, &ctx.cfg.encoding, n)?);
            let mut runs = Vec::new();
            for (r, model) in saved_models(&ctx.out, ctx.cfg.repeats)? {
                let m = run_metrics(&ctx.cfg, &model, &train, &test, r, ctx.cfg.seed.wrapping_add(r as u64))?;
                print_run(&m);
                runs.push(m);
            }
            let rows = experiment::aggregate(&runs);
            fs::write(ctx.out.join("eval.csv"), experiment::aggregate_csv(&rows))?;
        }
        Command::Curves(c) => {
            let ctx = setup(&c, false)?;
            let (train, test) = load_datasets(&ctx.cfg.dataset)?;
            let n = ctx.cfg.ansatz.n_qubits();
            let (train, test) = (encode_set(&train, &ctx.cfg.encoding, n)?, encode_set(&test, &ctx.cfg.encoding, n)?);
            for (r, model) in saved_models(&ctx.out, ctx.cfg.repeats)? {
                let points = emit_curves(&model, &train, &test, ctx.cfg.curve_step)?;
                fs::write(ctx.out.join(format!("run_{r}")).join("curves.csv"), curves_csv(&points))?;
            }
            fs::write(ctx.out.join("classifier_counts.csv"), classifier_counts_csv())?;
            println!("curves written under {}", ctx.out.display());
        }
        Command::EarlyStopStudy(c) => {
            let ctx = setup(&c, false)?;
            let report = compare_early_stopping(&ctx.cfg)?;
            fs::write(ctx.out.join("early_stop.json"), serde_json::to_string_pretty(&report)?)?;
            let mut csv = String::from("variant,t,epsilon_t,epochs_used\n");
            for v in [&report.with, &report.without] {
                let name = if v.early_stopping { "with" } else { "without" };
                for (t, (e, n)) in v.epsilons.iter().zip(&v.epochs_per_round).enumerate() {
                    let _ = writeln!(csv, "{name},{},{e:.17e},{n}", t + 1);
                }
            }
            fs::write(ctx.out.join("early_stop.csv"), csv)?;
            for v in [&report.with, &report.without] {
                println!(
                    "early_stopping={} epochs={} members={} train={:.4} test={:.4} termination={:?}",
                    v.early_stopping, v.total_epochs, v.members, v.train_accuracy, v.test_accuracy, v.termination
                );
            }
        }
    }
    Ok(())
}

fn print_run(r: &RunMetrics) {
    println!(
        "run {} seed {}: train {:.4} test {:.4} members {} parameters {} epochs {}",
        r.repeat, r.seed, r.train_accuracy, r.test_accuracy, r.base_classifiers, r.parameters, r.total_epochs
    );
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

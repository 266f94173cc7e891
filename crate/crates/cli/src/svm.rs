use std::path::{Path, PathBuf};

use anyhow::Result;
use clap::{Args, Subcommand, ValueEnum};
use latentprobe_core::features::{FeatureTable, LabelMap, LabeledFeatureSet};
use latentprobe_core::io::model::{read_text, svm_from_json, svm_to_json, write_text};
use latentprobe_core::io::{read_fvec, write_json};
use latentprobe_core::svm::{
    evaluate, rank_by_margin, rank_table, train_svm, KernelConfig, SvmConfig, SvmModel,
};

#[derive(Subcommand)]
pub enum SvmCommand {
    /// Fit a model on labeled features.
    Train(TrainArgs),
    /// Report accuracy on a labeled test set.
    Eval(EvalArgs),
    /// Order samples by signed distance to the decision boundary.
    Rank(RankArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Kernel {
    Linear,
    Rbf,
}

#[derive(Args)]
pub struct TrainArgs {
    #[arg(long)]
    features: PathBuf,
    /// JSON list of {"id", "label": "good" | "bad"}.
    #[arg(long)]
    labels: PathBuf,
    #[arg(long, value_enum, default_value_t = Kernel::Linear)]
    kernel: Kernel,
    /// Regularization constant.
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    /// RBF width; defaults to 1 / feature dimension.
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long, default_value_t = 1e-6)]
    tolerance: f64,
    #[arg(long, default_value_t = 10_000)]
    max_iterations: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Use features as-is instead of L2-normalizing them.
    #[arg(long)]
    no_normalize: bool,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
pub struct EvalArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    features: PathBuf,
    #[arg(long)]
    labels: PathBuf,
    /// Optional JSON report with per-sample margins.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
pub struct RankArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    features: PathBuf,
    /// Attach true labels to the ranking.
    #[arg(long)]
    labels: Option<PathBuf>,
    #[arg(short, long)]
    output: PathBuf,
}

fn labeled(features: &Path, labels: &Path) -> Result<LabeledFeatureSet> {
    let table = read_fvec(features)?;
    let labels = LabelMap::from_json(&read_text(labels)?)?;
    Ok(table.with_labels(&labels)?)
}

fn load_model(path: &Path) -> Result<SvmModel> {
    Ok(svm_from_json(&read_text(path)?)?)
}

pub fn run(cmd: SvmCommand) -> Result<()> {
    match cmd {
        SvmCommand::Train(args) => {
            let train = labeled(&args.features, &args.labels)?;
            let config = SvmConfig {
                kernel: match args.kernel {
                    Kernel::Linear => KernelConfig::Linear,
                    Kernel::Rbf => KernelConfig::Rbf { gamma: args.gamma },
                },
                c: args.c,
                tolerance: args.tolerance,
                max_iterations: args.max_iterations,
                seed: args.seed,
                normalize: !args.no_normalize,
            };
            let model = train_svm(&train, &config)?;
            write_text(&svm_to_json(&model), &args.output)?;
            let meta = model.train_meta();
            log::debug!("kkt gap {:e}, {} support vectors", meta.kkt_gap, meta.support_vectors);
            println!("trained on {} samples ({} features)", train.len(), train.dim());
            println!("iterations: {}", meta.iterations);
            println!("final objective: {:.6}", meta.objective);
        }
        SvmCommand::Eval(args) => {
            let model = load_model(&args.model)?;
            let test = labeled(&args.features, &args.labels)?;
            let report = evaluate(&model, &test)?;
            if let Some(out) = &args.output {
                write_json(&report, out)?;
            }
            let c = report.confusion;
            println!("accuracy: {:.4}", report.accuracy);
            println!(
                "correct: {}/{} (good->good {}, bad->bad {}, bad->good {}, good->bad {})",
                report.correct(),
                test.len(),
                c.true_good,
                c.true_bad,
                c.false_good,
                c.false_bad
            );
        }
        SvmCommand::Rank(args) => {
            let model = load_model(&args.model)?;
            let ranking = match &args.labels {
                Some(labels) => rank_by_margin(&model, &labeled(&args.features, labels)?)?,
                None => {
                    let table: FeatureTable = read_fvec(&args.features)?;
                    rank_table(&model, &table)?
                }
            };
            if ranking.raw_decision {
                log::warn!("rbf model: ranking uses raw decision values, not geometric distances");
            }
            write_json(&ranking, &args.output)?;
            println!("ranked {} samples", ranking.samples.len());
        }
    }
    Ok(())
}

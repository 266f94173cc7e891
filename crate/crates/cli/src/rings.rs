use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use latentprobe_core::features::LabeledFeatureSet;
use latentprobe_core::io::model::write_text;
use latentprobe_core::io::write_fvec;
use latentprobe_core::rings::{rings_oracle, RingsConfig};
use latentprobe_core::svm::{evaluate, train_svm, SvmConfig};

#[derive(Args)]
pub struct RingsArgs {
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Training samples in total, half per class.
    #[arg(long, default_value_t = 300)]
    n_train: usize,
    #[arg(long, default_value_t = 120)]
    n_test: usize,
    #[arg(long, default_value_t = 1.0)]
    inner_radius: f64,
    #[arg(long, default_value_t = 2.0)]
    outer_radius: f64,
    #[arg(long, default_value_t = 0.1)]
    noise: f64,
    /// Train linear SVMs on both feature spaces and print test accuracies.
    #[arg(long)]
    evaluate: bool,
    /// Output directory.
    #[arg(short, long)]
    output: PathBuf,
}

fn accuracy(train: &LabeledFeatureSet, test: &LabeledFeatureSet) -> Result<f64> {
    let model = train_svm(train, &SvmConfig::default())?;
    Ok(evaluate(&model, test)?.accuracy)
}

pub fn run(args: RingsArgs) -> Result<()> {
    let config = RingsConfig {
        seed: args.seed,
        n_train: args.n_train,
        n_test: args.n_test,
        inner_radius: args.inner_radius,
        outer_radius: args.outer_radius,
        noise: args.noise,
    };
    let data = rings_oracle(&config)?;
    let dir = &args.output;
    std::fs::create_dir_all(dir)
        .map_err(|e| latentprobe_core::Error::Io { path: dir.clone(), source: e })?;
    write_fvec(&data.raw.train.to_table(), dir.join("raw-train.fvec"))?;
    write_fvec(&data.raw.test.to_table(), dir.join("raw-test.fvec"))?;
    write_fvec(&data.lifted.train.to_table(), dir.join("lifted-train.fvec"))?;
    write_fvec(&data.lifted.test.to_table(), dir.join("lifted-test.fvec"))?;
    for (name, set) in [("train-labels.json", &data.raw.train), ("test-labels.json", &data.raw.test)] {
        let ids: Vec<String> = set.samples().iter().map(|s| s.id.clone()).collect();
        write_text(&set.labels().to_json(&ids), dir.join(name))?;
    }
    let (good, bad) = data.raw.train.class_counts();
    println!(
        "wrote rings to {} ({good} good + {bad} bad train, {} test)",
        dir.display(),
        data.raw.test.len()
    );
    if args.evaluate {
        let raw = accuracy(&data.raw.train, &data.raw.test)?;
        let lifted = accuracy(&data.lifted.train, &data.lifted.test)?;
        println!("raw accuracy: {raw:.4}");
        println!("lifted accuracy: {lifted:.4}");
    }
    Ok(())
}

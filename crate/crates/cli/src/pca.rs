use std::path::PathBuf;

use anyhow::Result;
use clap::builder::TypedValueParser;
use clap::{Args, Subcommand};
use latentprobe_core::io::model::{pca_from_json, read_text};
use latentprobe_core::io::{read_fvec, write_fvec, write_json};
use latentprobe_core::pca::{fit_pca_table, DEFAULT_COMPONENTS};

#[derive(Subcommand)]
pub enum PcaCommand {
    /// Fit principal components to an FVEC file.
    Fit(FitArgs),
    /// Project an FVEC file onto fitted components.
    Transform(TransformArgs),
}

#[derive(Args)]
pub struct FitArgs {
    #[arg(long)]
    features: PathBuf,
    #[arg(long, default_value_t = DEFAULT_COMPONENTS, value_parser = clap::value_parser!(u32).range(1..).map(|v| v as usize))]
    k: usize,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
pub struct TransformArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    features: PathBuf,
    #[arg(short, long)]
    output: PathBuf,
}

pub fn run(cmd: PcaCommand) -> Result<()> {
    match cmd {
        PcaCommand::Fit(args) => {
            let table = read_fvec(&args.features)?;
            let model = fit_pca_table(&table, args.k)?;
            write_json(&model, &args.output)?;
            let total: f64 = model.explained_variance.iter().sum();
            println!(
                "fitted {} components on {} samples of dimension {}",
                model.k,
                table.len(),
                table.dim()
            );
            println!("explained variance (sum): {total:.6}");
        }
        PcaCommand::Transform(args) => {
            let model = pca_from_json(&read_text(&args.model)?)?;
            let table = read_fvec(&args.features)?;
            let out = model.transform_table(&table)?;
            write_fvec(&out, &args.output)?;
            println!("projected {} rows to {} dimensions", out.len(), out.dim());
        }
    }
    Ok(())
}

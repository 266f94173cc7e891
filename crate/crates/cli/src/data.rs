use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, Subcommand, ValueEnum};
use latentprobe_core::io::manifest::Split;
use latentprobe_core::io::model::write_text;
use latentprobe_core::io::{load_manifest, read_fvec, write_fvec};

#[derive(Subcommand)]
pub enum DataCommand {
    /// Print the header of an FVEC file.
    Info { path: PathBuf },
    /// Validate a Good/Bad manifest.
    Check(CheckArgs),
    /// Export one split's latent codes as FVEC plus labels.
    Latents(LatentsArgs),
}

#[derive(Args)]
pub struct CheckArgs {
    manifest: PathBuf,
    /// Fail on wrong split counts instead of warning.
    #[arg(long)]
    strict: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum SplitArg {
    Train,
    Test,
}

#[derive(Args)]
pub struct LatentsArgs {
    manifest: PathBuf,
    #[arg(long, value_enum)]
    split: SplitArg,
    #[arg(long)]
    strict: bool,
    #[arg(short, long)]
    output: PathBuf,
    #[arg(long)]
    labels_out: PathBuf,
}

pub fn run(cmd: DataCommand) -> Result<()> {
    match cmd {
        DataCommand::Info { path } => {
            let table = read_fvec(&path)?;
            println!("count: {}", table.len());
            println!("dim: {}", table.dim());
            println!("source: {}", table.source());
        }
        DataCommand::Check(args) => {
            let manifest = load_manifest(&args.manifest, args.strict)?;
            for w in &manifest.warnings {
                log::warn!("{w}");
            }
            let train = manifest.split(Split::Train).count();
            let test = manifest.split(Split::Test).count();
            println!(
                "{} entries ({train} train / {test} test), latent dim {}",
                manifest.entries.len(),
                manifest.dim
            );
        }
        DataCommand::Latents(args) => {
            let manifest = load_manifest(&args.manifest, args.strict)?;
            for w in &manifest.warnings {
                log::warn!("{w}");
            }
            let split = match args.split {
                SplitArg::Train => Split::Train,
                SplitArg::Test => Split::Test,
            };
            let set = manifest.latent_set(split)?;
            let table = set.to_table();
            write_fvec(&table, &args.output)?;
            write_text(&set.labels().to_json(table.ids()), &args.labels_out)?;
            println!("exported {} latent codes of dimension {}", set.len(), set.dim());
        }
    }
    Ok(())
}

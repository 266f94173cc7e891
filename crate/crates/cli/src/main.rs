//! `latentprobe`: plan construction, toy rendering, SVM train/eval/rank,
//! PCA and dataset utilities. Stages talk to each other only through files.
//!
//! Exit codes: 0 success, 1 domain error, 2 usage error.

mod data;
mod pca;
mod plan;
mod rings;
mod svm;
mod toygen;

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use latentprobe_core::Error;

#[derive(Parser)]
#[command(name = "latentprobe", version, about = "Latent-space interpolation plans and Good/Bad quality gating")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build an interpolation plan.
    #[command(subcommand)]
    Plan(plan::PlanCommand),
    /// Render a plan with the toy generator.
    Toygen(toygen::ToygenArgs),
    /// Train, evaluate or rank with an SVM.
    #[command(subcommand)]
    Svm(svm::SvmCommand),
    /// Fit or apply PCA.
    #[command(subcommand)]
    Pca(pca::PcaCommand),
    /// Generate the concentric-rings oracle dataset.
    Rings(rings::RingsArgs),
    /// Inspect FVEC files and dataset manifests.
    #[command(subcommand)]
    Data(data::DataCommand),
}

/// Misuse that clap cannot express, reported with exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn init_logging() {
    let level = match std::env::var("LATENTPROBE_LOG").as_deref() {
        Ok("quiet") => log::LevelFilter::Error,
        Ok("debug") => log::LevelFilter::Debug,
        _ => log::LevelFilter::Info,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .format(|buf, record| {
            let prefix = match record.level() {
                log::Level::Error => "error",
                log::Level::Warn => "warning",
                log::Level::Info => "info",
                log::Level::Debug | log::Level::Trace => "debug",
            };
            writeln!(buf, "{prefix}: {}", record.args())
        })
        .init();
}

fn one_line(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn main() -> ExitCode {
    init_logging();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Plan(cmd) => plan::run(cmd),
        Command::Toygen(args) => toygen::run(args),
        Command::Svm(cmd) => svm::run(cmd),
        Command::Pca(cmd) => pca::run(cmd),
        Command::Rings(args) => rings::run(args),
        Command::Data(cmd) => data::run(cmd),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            if let Some(u) = err.downcast_ref::<UsageError>() {
                eprintln!("error: usage: {}", one_line(&u.0));
                return ExitCode::from(2);
            }
            match err.downcast_ref::<Error>() {
                Some(e) => eprintln!("error: {}: {}", e.kind(), one_line(&format!("{err:#}"))),
                None => eprintln!("error: {}", one_line(&format!("{err:#}"))),
            }
            ExitCode::from(1)
        }
    }
}

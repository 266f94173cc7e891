use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::builder::TypedValueParser;
use clap::Args;
use latentprobe_core::features::{FeatureSource, FeatureTable};
use latentprobe_core::io::{read_plan, write_fvec};
use latentprobe_core::toy::{max_consecutive_delta, ToyGenParams, ToyGenerator};

#[derive(Args)]
pub struct ToygenArgs {
    #[arg(long)]
    plan: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 16, value_parser = clap::value_parser!(u32).range(1..).map(|v| v as usize))]
    height: usize,
    #[arg(long, default_value_t = 16, value_parser = clap::value_parser!(u32).range(1..).map(|v| v as usize))]
    width: usize,
    /// Multiplier applied before the sigmoid.
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    /// FVEC file receiving one flattened H×W×3 frame per plan point.
    #[arg(short, long)]
    output: PathBuf,
}

pub fn run(args: ToygenArgs) -> Result<()> {
    let plan = read_plan(&args.plan).with_context(|| format!("reading plan {}", args.plan.display()))?;
    let params = ToyGenParams {
        seed: args.seed,
        height: args.height,
        width: args.width,
        scale: args.scale,
    };
    let gen = ToyGenerator::for_point(params, &plan.points()[0])?;
    let frames = plan
        .points()
        .iter()
        .map(|p| gen.render(p))
        .collect::<latentprobe_core::Result<Vec<_>>>()?;
    let delta = max_consecutive_delta(&frames);
    let dim = args.height * args.width * 3;
    let ids = (0..frames.len()).map(|i| format!("frame-{i:04}")).collect();
    let rows = frames.into_iter().map(|f| f.pixels).collect();
    let table = FeatureTable::new(FeatureSource::Other("toy-frames".into()), dim, ids, rows)?;
    write_fvec(&table, &args.output)?;
    println!("rendered {} frames ({}, {}x{}x3)", table.len(), plan.kind(), args.height, args.width);
    println!("max consecutive-frame delta: {delta:.6}");
    println!("lipschitz bound (per unit input distance): {:.6}", gen.lipschitz_bound());
    Ok(())
}

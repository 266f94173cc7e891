use std::path::PathBuf;

use anyhow::Result;
use clap::builder::TypedValueParser;
use clap::{Args, Subcommand};
use latentprobe_core::io::model::read_json;
use latentprobe_core::io::write_plan;
use latentprobe_core::latent::{
    lerp_latent, lerp_linguistic, tri_latent, tri_linguistic, ConditioningPair, InterpolationPlan,
    LatentCode, DEFAULT_STEPS,
};

use crate::usage;

#[derive(Subcommand)]
pub enum PlanCommand {
    /// Pairwise interpolation between two corners.
    Lerp(PlanArgs),
    /// Triangular interpolation over three corners.
    Tri(PlanArgs),
}

/// Latent corners (`--z0 --z1 [--z2]`) interpolate latent codes; a fixed
/// `--z` with conditioning corners (`--c0 --c1 [--c2]`) interpolates text
/// embeddings.
#[derive(Args)]
pub struct PlanArgs {
    /// Latent code JSON (array of numbers).
    #[arg(long)]
    z0: Option<PathBuf>,
    #[arg(long)]
    z1: Option<PathBuf>,
    #[arg(long)]
    z2: Option<PathBuf>,
    /// Fixed latent code for linguistic plans.
    #[arg(long)]
    z: Option<PathBuf>,
    /// Conditioning pair JSON ({"words": [[...]], "sentence": [...]}).
    #[arg(long)]
    c0: Option<PathBuf>,
    #[arg(long)]
    c1: Option<PathBuf>,
    #[arg(long)]
    c2: Option<PathBuf>,
    /// Grid steps along one edge.
    #[arg(long, default_value_t = DEFAULT_STEPS, value_parser = clap::value_parser!(u32).range(2..).map(|v| v as usize))]
    steps: usize,
    #[arg(short, long)]
    output: PathBuf,
}

fn latent(path: &PathBuf) -> Result<LatentCode> {
    Ok(read_json(path)?)
}

fn conditioning(path: &PathBuf) -> Result<ConditioningPair> {
    Ok(read_json(path)?)
}

fn build(args: &PlanArgs, triangular: bool) -> Result<InterpolationPlan> {
    let latent_corners = [&args.z0, &args.z1, &args.z2];
    let cond_corners = [&args.c0, &args.c1, &args.c2];
    let any_latent = latent_corners.iter().any(|c| c.is_some());
    let any_cond = args.z.is_some() || cond_corners.iter().any(|c| c.is_some());
    if any_latent == any_cond {
        return Err(usage(
            "give either latent corners (--z0 --z1 [--z2]) or --z with conditioning corners (--c0 --c1 [--c2])",
        ));
    }
    let wanted = if triangular { 3 } else { 2 };
    let pick = |corners: [&Option<PathBuf>; 3], flag: &str| -> Result<Vec<PathBuf>> {
        let given: Vec<_> = corners.iter().filter_map(|c| c.as_ref().cloned()).collect();
        let ok = corners[..wanted].iter().all(|c| c.is_some()) && given.len() == wanted;
        if !ok {
            let names: Vec<_> = (0..wanted).map(|i| format!("--{flag}{i}")).collect();
            return Err(usage(format!("this plan needs exactly {}", names.join(" "))));
        }
        Ok(given)
    };
    let plan = if any_latent {
        let paths = pick(latent_corners, "z")?;
        let zs = paths.iter().map(latent).collect::<Result<Vec<_>>>()?;
        if triangular {
            tri_latent(&zs[0], &zs[1], &zs[2], args.steps)?
        } else {
            lerp_latent(&zs[0], &zs[1], args.steps)?
        }
    } else {
        let z = args.z.as_ref().ok_or_else(|| usage("linguistic plans need --z"))?;
        let z = latent(z)?;
        let paths = pick(cond_corners, "c")?;
        let cs = paths.iter().map(conditioning).collect::<Result<Vec<_>>>()?;
        if triangular {
            tri_linguistic(&z, &cs[0], &cs[1], &cs[2], args.steps)?
        } else {
            lerp_linguistic(&z, &cs[0], &cs[1], args.steps)?
        }
    };
    Ok(plan)
}

pub fn run(cmd: PlanCommand) -> Result<()> {
    let (args, triangular) = match &cmd {
        PlanCommand::Lerp(a) => (a, false),
        PlanCommand::Tri(a) => (a, true),
    };
    let plan = build(args, triangular)?;
    if plan.has_degenerate_corners() {
        log::warn!("degenerate corners: all corners are identical, the plan is constant");
    }
    write_plan(&plan, &args.output)?;
    println!("{}, {} points (steps {})", plan.kind(), plan.len(), plan.steps());
    if let Some(center) = plan.center_index() {
        let p = &plan.points()[center];
        println!("center: point {center} at ({:.4}, {:.4})", p.mix.gamma1, p.mix.gamma2);
    }
    Ok(())
}

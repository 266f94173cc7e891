//! Plan JSON documents.
//!
//! Floats are written in shortest round-trip form, so reading a plan back
//! yields bit-identical values.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::latent::{
    lerp_latent, lerp_linguistic, tri_latent, tri_linguistic, ConditioningPair, Corner,
    InterpolationPlan, LatentCode, MixParams, PlanKind, PlanPoint,
};

#[derive(Serialize, Deserialize)]
struct PlanDoc {
    kind: PlanKind,
    steps: usize,
    dim: usize,
    corners: Vec<CornerDoc>,
    points: Vec<PointDoc>,
}

#[derive(Serialize, Deserialize)]
struct CornerDoc {
    latent: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    words: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sentence: Option<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct PointDoc {
    gamma1: f64,
    gamma2: f64,
    latent: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    words: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sentence: Option<Vec<f64>>,
}

fn split_conditioning(c: &Option<ConditioningPair>) -> (Option<Vec<Vec<f64>>>, Option<Vec<f64>>) {
    match c {
        Some(c) => (Some(c.words().to_vec()), Some(c.sentence().to_vec())),
        None => (None, None),
    }
}

fn join_conditioning(
    words: Option<Vec<Vec<f64>>>,
    sentence: Option<Vec<f64>>,
    what: &str,
) -> Result<Option<ConditioningPair>> {
    match (words, sentence) {
        (Some(w), Some(s)) => ConditioningPair::new(w, s)
            .map(Some)
            .map_err(|e| Error::Format(format!("{what}: {e}"))),
        (None, None) => Ok(None),
        _ => Err(Error::Format(format!(
            "{what}: words and sentence must appear together"
        ))),
    }
}

fn latent(values: Vec<f64>, what: &str) -> Result<LatentCode> {
    LatentCode::new(values).map_err(|e| Error::Format(format!("{what}: {e}")))
}

pub fn plan_to_json(plan: &InterpolationPlan) -> String {
    let doc = PlanDoc {
        kind: plan.kind(),
        steps: plan.steps(),
        dim: plan.dim(),
        corners: plan
            .corners()
            .iter()
            .map(|c| {
                let (words, sentence) = split_conditioning(&c.conditioning);
                CornerDoc {
                    latent: c.latent.as_slice().to_vec(),
                    words,
                    sentence,
                }
            })
            .collect(),
        points: plan
            .points()
            .iter()
            .map(|p| {
                let (words, sentence) = split_conditioning(&p.conditioning);
                PointDoc {
                    gamma1: p.mix.gamma1,
                    gamma2: p.mix.gamma2,
                    latent: p.latent.as_slice().to_vec(),
                    words,
                    sentence,
                }
            })
            .collect(),
    };
    serde_json::to_string(&doc).expect("plan values are finite")
}

/// Parses and validates a plan: count law, shapes, grid positions and that
/// every point is the blend of the corners at its mix parameters.
pub fn plan_from_json(text: &str) -> Result<InterpolationPlan> {
    let doc: PlanDoc = serde_json::from_str(text).map_err(|e| Error::Parse(format!("plan: {e}")))?;
    let corners = doc
        .corners
        .into_iter()
        .enumerate()
        .map(|(i, c)| {
            let what = format!("corners[{i}]");
            Ok(Corner {
                latent: latent(c.latent, &what)?,
                conditioning: join_conditioning(c.words, c.sentence, &what)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let points = doc
        .points
        .into_iter()
        .enumerate()
        .map(|(i, p)| {
            let what = format!("points[{i}]");
            Ok(PlanPoint {
                mix: MixParams::new(p.gamma1, p.gamma2)
                    .map_err(|e| Error::Format(format!("{what}: {e}")))?,
                latent: latent(p.latent, &what)?,
                conditioning: join_conditioning(p.words, p.sentence, &what)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let plan = InterpolationPlan::from_parts(doc.kind, doc.steps, corners, points).map_err(|e| {
        match e {
            Error::PlanSize(s) => Error::Format(format!("steps={s} is below 2")),
            other => other,
        }
    })?;
    if plan.dim() != doc.dim {
        return Err(Error::Format(format!(
            "declared dim {} but latents have {}",
            doc.dim,
            plan.dim()
        )));
    }
    check_blends(&plan)?;
    Ok(plan)
}

fn close(a: &[f64], b: &[f64]) -> bool {
    a.iter()
        .zip(b)
        .all(|(x, y)| (x - y).abs() <= 1e-12 * (1.0 + x.abs().max(y.abs())))
}

fn check_blends(plan: &InterpolationPlan) -> Result<()> {
    let c = plan.corners();
    let steps = plan.steps();
    let cond = |i: usize| c[i].conditioning.as_ref().expect("linguistic corner");
    let expected = match plan.kind() {
        PlanKind::LerpLatent => lerp_latent(&c[0].latent, &c[1].latent, steps),
        PlanKind::TriLatent => tri_latent(&c[0].latent, &c[1].latent, &c[2].latent, steps),
        PlanKind::LerpLinguistic | PlanKind::TriLinguistic => {
            if c.iter().any(|k| k.latent != c[0].latent) {
                return Err(Error::Format("linguistic corners must share one latent".into()));
            }
            if plan.kind() == PlanKind::LerpLinguistic {
                lerp_linguistic(&c[0].latent, cond(0), cond(1), steps)
            } else {
                tri_linguistic(&c[0].latent, cond(0), cond(1), cond(2), steps)
            }
        }
    }
    .map_err(|e| Error::Format(format!("corners: {e}")))?;
    for (i, (got, want)) in plan.points().iter().zip(expected.points()).enumerate() {
        let mut ok = close(got.latent.as_slice(), want.latent.as_slice());
        if let (Some(g), Some(w)) = (&got.conditioning, &want.conditioning) {
            ok &= close(g.sentence(), w.sentence());
            ok &= g.words().iter().zip(w.words()).all(|(a, b)| close(a, b));
        }
        if !ok {
            return Err(Error::Format(format!(
                "points[{i}] is not the blend of the corners at ({}, {})",
                got.mix.gamma1, got.mix.gamma2
            )));
        }
    }
    Ok(())
}

pub fn write_plan(plan: &InterpolationPlan, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, plan_to_json(plan)).map_err(|e| Error::io(path, e))
}

pub fn read_plan(path: impl AsRef<Path>) -> Result<InterpolationPlan> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    plan_from_json(&text)
}

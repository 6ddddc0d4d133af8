//! Tightness of overshoots for the MAP against its skeleton random walk
//! observed at returns of the modulator to a fixed state.

use rand::Rng;
use serde::Serialize;

use super::overshoot::OVERSHOOT_KS_TOLERANCE;
use crate::engine::{run_replicated, SeedPlan};
use crate::error::{Error, Result};
use crate::model::{check_condition_c, MapSpec};
use crate::report::Check;
use crate::sim::{first_passage_up, skeleton_chain};
use crate::stats::{ks_distance, EmpiricalMeasure};

/// Medians must grow by at least this factor over the schedule to count as
/// escaping.
pub const ESCAPE_FACTOR: f64 = 1.5;
const SKELETON_CHUNK: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TightnessVerdict {
    Tight,
    Escaping,
    Ambiguous,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OvershootFamily {
    pub laws: Vec<EmpiricalMeasure>,
    pub medians: Vec<f64>,
    pub ks_first_last: f64,
    pub verdict: TightnessVerdict,
}

impl OvershootFamily {
    fn new(laws: Vec<EmpiricalMeasure>) -> Result<Self> {
        let medians: Vec<f64> = laws.iter().map(EmpiricalMeasure::median).collect();
        let ks_first_last = ks_distance(&laws[0], laws.last().unwrap())?;
        let growing = medians.windows(2).all(|w| w[1] > w[0]) && *medians.last().unwrap() >= ESCAPE_FACTOR * medians[0];
        let stable = ks_first_last <= OVERSHOOT_KS_TOLERANCE;
        let verdict = match (stable, growing) {
            (true, false) => TightnessVerdict::Tight,
            (false, true) => TightnessVerdict::Escaping,
            _ => TightnessVerdict::Ambiguous,
        };
        Ok(OvershootFamily {
            laws,
            medians,
            ks_first_last,
            verdict,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TightnessReport {
    pub anchor: usize,
    pub levels: Vec<f64>,
    pub continuous: OvershootFamily,
    pub skeleton: OvershootFamily,
    pub condition_holds: bool,
}

impl TightnessReport {
    pub fn agrees(&self) -> bool {
        let expected = if self.condition_holds {
            TightnessVerdict::Tight
        } else {
            TightnessVerdict::Escaping
        };
        self.continuous.verdict == expected && self.skeleton.verdict == expected
    }

    pub fn checks(&self) -> Vec<Check> {
        vec![Check::flag("tightness: continuous and skeleton overshoots agree with the condition", self.agrees()).with_detail(format!(
            "continuous {:?} {:?}, skeleton {:?} {:?}",
            self.continuous.verdict, self.continuous.medians, self.skeleton.verdict, self.skeleton.medians
        ))]
    }
}

/// Overshoot of the skeleton walk over `level`, or `None` past `max_cycles`.
pub fn skeleton_overshoot<R: Rng + ?Sized>(spec: &MapSpec, anchor: usize, level: f64, max_cycles: usize, rng: &mut R) -> Result<Option<f64>> {
    let mut base = 0.0;
    let mut cycles = 0;
    while cycles < max_cycles {
        let chunk = skeleton_chain(spec, anchor, SKELETON_CHUNK, rng)?;
        for &(_, v) in &chunk.returns {
            if base + v > level {
                return Ok(Some(base + v - level));
            }
        }
        base += chunk.returns.last().map_or(0.0, |r| r.1);
        cycles += SKELETON_CHUNK;
    }
    Ok(None)
}

pub fn empirical_tightness_probe(spec: &MapSpec, anchor: usize, levels: &[f64], plan: &SeedPlan) -> Result<TightnessReport> {
    spec.check_state(anchor)?;
    if levels.len() < 2 {
        return Err(Error::InvalidArgument("tightness probe needs at least two levels".into()));
    }
    let condition_holds = check_condition_c(spec)?.holds;
    let mut cont = Vec::new();
    let mut skel = Vec::new();
    for &level in levels {
        let c = run_replicated(&plan.derive(&format!("tight-map-{level}")), |_, rng| {
            Ok(first_passage_up(spec, (0.0, anchor), level, 1e6, rng)?.passed().map(|p| p.overshoot))
        })?;
        cont.push(EmpiricalMeasure::from_values(c.into_iter().flatten())?);
        let s = run_replicated(&plan.derive(&format!("tight-skeleton-{level}")), |_, rng| {
            skeleton_overshoot(spec, anchor, level, 1_000_000, rng)
        })?;
        skel.push(EmpiricalMeasure::from_values(s.into_iter().flatten())?);
    }
    Ok(TightnessReport {
        anchor,
        levels: levels.to_vec(),
        continuous: OvershootFamily::new(cont)?,
        skeleton: OvershootFamily::new(skel)?,
        condition_holds,
    })
}

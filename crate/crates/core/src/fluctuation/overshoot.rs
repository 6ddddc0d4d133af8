//! Overshoots over high levels and their stationary limit.

use serde::Serialize;

use crate::engine::{run_replicated, SeedPlan};
use crate::error::{Error, Result};
use crate::model::MapSpec;
use crate::report::Check;
use crate::sim::{first_passage_up, PassageOutcome};
use crate::stats::{ks_distance, EmpiricalMeasure};

pub const OVERSHOOT_KS_TOLERANCE: f64 = 0.03;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OvershootLevel {
    pub level: f64,
    /// `(overshoot, state)` law per initial state; `None` if nothing passed.
    pub laws: Vec<Option<EmpiricalMeasure>>,
    pub no_passage: Vec<u64>,
    pub killed: Vec<u64>,
}

impl OvershootLevel {
    /// All initial states together.
    pub fn pooled(&self) -> Option<EmpiricalMeasure> {
        let atoms: Vec<_> = self.laws.iter().flatten().flat_map(|m| m.atoms().iter().map(|a| (a.value, a.state))).collect();
        EmpiricalMeasure::from_pairs(atoms).ok()
    }

    pub fn median(&self) -> f64 {
        self.pooled().map_or(f64::NAN, |m| m.median())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OvershootReport {
    pub levels: Vec<OvershootLevel>,
    /// Largest KS distance between consecutive levels, over initial states.
    pub ks_levels: Vec<f64>,
    /// Largest KS distance between initial states, per level.
    pub ks_states: Vec<f64>,
    pub medians: Vec<f64>,
}

impl OvershootReport {
    /// Median overshoot strictly increasing along the levels.
    pub fn escaping(&self) -> bool {
        self.medians.windows(2).all(|w| w[1] > w[0])
    }

    pub fn checks(&self) -> Vec<Check> {
        let mut out = Vec::new();
        for (k, &d) in self.ks_levels.iter().enumerate() {
            out.push(Check::at_most(
                format!("overshoot: level {} vs {}", self.levels[k].level, self.levels[k + 1].level),
                d,
                OVERSHOOT_KS_TOLERANCE,
            ));
        }
        for (k, &d) in self.ks_states.iter().enumerate() {
            out.push(Check::at_most(
                format!("overshoot: initial-state independence at level {}", self.levels[k].level),
                d,
                OVERSHOOT_KS_TOLERANCE,
            ));
        }
        out.push(Check::flag("overshoot: tight (median not escaping)", !self.escaping()).with_detail(format!("medians {:?}", self.medians)));
        out
    }
}

fn ks_or_one(a: &Option<EmpiricalMeasure>, b: &Option<EmpiricalMeasure>) -> Result<f64> {
    match (a, b) {
        (Some(a), Some(b)) => ks_distance(a, b),
        _ => Ok(1.0),
    }
}

/// Overshoot laws at each level from every initial state, `plan.replicates`
/// walks per (level, state), each capped at `time_cap`.
pub fn estimate_stationary_overshoot(spec: &MapSpec, levels: &[f64], time_cap: f64, plan: &SeedPlan) -> Result<OvershootReport> {
    if levels.is_empty() || levels.iter().any(|&a| !(a > 0.0)) {
        return Err(Error::InvalidArgument("levels must be positive".into()));
    }
    let n = spec.n();
    let mut out = Vec::new();
    for &level in levels {
        let mut laws = Vec::new();
        let mut no_passage = Vec::new();
        let mut killed = Vec::new();
        for i in 0..n {
            let sub = plan.derive(&format!("overshoot-{level}-{i}"));
            let outcomes = run_replicated(&sub, |_, rng| first_passage_up(spec, (0.0, i), level, time_cap, rng))?;
            let mut atoms = Vec::new();
            let (mut miss, mut dead) = (0, 0);
            for o in outcomes {
                match o {
                    PassageOutcome::Passed(p) => atoms.push((p.overshoot, p.state)),
                    PassageOutcome::NoPassage { .. } => miss += 1,
                    PassageOutcome::Killed { .. } => dead += 1,
                }
            }
            laws.push(EmpiricalMeasure::from_pairs(atoms).ok());
            no_passage.push(miss);
            killed.push(dead);
        }
        out.push(OvershootLevel {
            level,
            laws,
            no_passage,
            killed,
        });
    }
    let mut ks_levels = Vec::new();
    for w in out.windows(2) {
        let mut worst: f64 = 0.0;
        for i in 0..n {
            worst = worst.max(ks_or_one(&w[0].laws[i], &w[1].laws[i])?);
        }
        ks_levels.push(worst);
    }
    let mut ks_states = Vec::new();
    for lvl in &out {
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                worst = worst.max(ks_or_one(&lvl.laws[i], &lvl.laws[j])?);
            }
        }
        ks_states.push(worst);
    }
    let medians = out.iter().map(OvershootLevel::median).collect();
    Ok(OvershootReport {
        levels: out,
        ks_levels,
        ks_states,
        medians,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{JumpLaw, LevyComponent, RateMatrix};

    #[test]
    fn creep_only_overshoot_is_zero() {
        let spec = MapSpec::levy(LevyComponent::brownian(1.0, 1.0)).unwrap();
        let r = estimate_stationary_overshoot(&spec, &[1.0, 2.0], 100.0, &SeedPlan::new(1, 50)).unwrap();
        for l in &r.levels {
            assert!(l.laws[0].as_ref().unwrap().atoms().iter().all(|a| a.value == 0.0));
        }
    }

    #[test]
    fn exponential_overshoot_is_stationary() {
        let spec = MapSpec::new(
            RateMatrix::two_state(1.0, 1.0).unwrap(),
            vec![
                LevyComponent::drift(-0.5).with_jumps(1.0, JumpLaw::exp_up(1.0)),
                LevyComponent::drift(-0.5).with_jumps(1.0, JumpLaw::exp_up(1.0)),
            ],
        )
        .unwrap();
        let r = estimate_stationary_overshoot(&spec, &[5.0, 10.0], 1e6, &SeedPlan::new(2, 10_000)).unwrap();
        let law = r.levels[1].laws[0].as_ref().unwrap();
        assert!(law.ks_to_cdf(|x| 1.0 - (-x).exp()).unwrap() <= 0.03);
        assert!(r.checks().iter().take(3).all(|c| c.passed), "{:?}", r.checks());
    }

    #[test]
    fn infinite_mean_jumps_escape() {
        let spec = MapSpec::levy(LevyComponent::drift(-0.5).with_jumps(1.0, JumpLaw::Pareto { index: 0.5, cutoff: 1.0, side: crate::model::Side::Up })).unwrap();
        let r = estimate_stationary_overshoot(&spec, &[10.0, 20.0, 40.0], 1e6, &SeedPlan::new(3, 4000)).unwrap();
        assert!(r.escaping(), "{:?}", r.medians);
    }
}

//! Self-similarity check: `(c Z_{c^{-alpha} t})` under `P^z` against `Z` under `P^{cz}`.

use serde::Serialize;

use super::exit::KS_TOLERANCE;
use super::rssmp::{simulate_rssmp, ScalingIndex};
use crate::engine::{run_replicated, SeedPlan};
use crate::error::{Error, Result};
use crate::model::MapSpec;
use crate::report::Check;
use crate::stats::{ks_distance, EmpiricalMeasure};

/// Marginals of `Z` at the given times, one measure per time.
pub fn rssmp_marginals(
    spec: &MapSpec,
    alpha: ScalingIndex,
    z: f64,
    times: &[f64],
    plan: &SeedPlan,
) -> Result<Vec<EmpiricalMeasure>> {
    let horizon = times.iter().copied().fold(0.0, f64::max);
    if !(horizon > 0.0) {
        return Err(Error::InvalidArgument("need a positive time".into()));
    }
    let rows = run_replicated(plan, |_, rng| {
        let path = simulate_rssmp(spec, alpha, z, horizon, rng)?;
        times
            .iter()
            .map(|&t| {
                path.value_at(t)
                    .ok_or_else(|| Error::Hypothesis(format!("path stopped before t = {t}")))
            })
            .collect::<Result<Vec<f64>>>()
    })?;
    (0..times.len())
        .map(|k| EmpiricalMeasure::from_values(rows.iter().map(|r| r[k])))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingReport {
    pub c: f64,
    pub start: f64,
    pub times: Vec<f64>,
    pub ks: Vec<f64>,
}

impl ScalingReport {
    pub fn checks(&self) -> Vec<Check> {
        self.times
            .iter()
            .zip(&self.ks)
            .map(|(t, &d)| Check::at_most(format!("self-similarity at t={t}"), d, KS_TOLERANCE))
            .collect()
    }
}

pub fn check_scaling(
    spec: &MapSpec,
    alpha: ScalingIndex,
    z: f64,
    c: f64,
    times: &[f64],
    plan: &SeedPlan,
) -> Result<ScalingReport> {
    if !(c > 0.0) {
        return Err(Error::InvalidArgument(format!("scale must be positive, got {c}")));
    }
    let squeeze = c.powf(-alpha.value());
    let inner: Vec<f64> = times.iter().map(|t| t * squeeze).collect();
    let scaled = rssmp_marginals(spec, alpha, z, &inner, &plan.derive("scaling-small"))?;
    let direct = rssmp_marginals(spec, alpha, c * z, times, &plan.derive("scaling-large"))?;
    let ks = scaled
        .iter()
        .zip(&direct)
        .map(|(a, b)| ks_distance(&a.map_values(|v| c * v)?, b))
        .collect::<Result<Vec<_>>>()?;
    Ok(ScalingReport {
        c,
        start: z,
        times: times.to_vec(),
        ks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::LevyComponent;

    #[test]
    fn deterministic_scaling_is_exact() {
        let spec = MapSpec::levy(LevyComponent::drift(1.0)).unwrap();
        // c Z_{t/c} = c (1 + t/c) = c + t
        let alpha = ScalingIndex::new(1.0).unwrap();
        let plan = SeedPlan::new(0, 5);
        let small = rssmp_marginals(&spec, alpha, 1.0, &[0.25, 0.5], &plan).unwrap();
        let large = rssmp_marginals(&spec, alpha, 2.0, &[0.5, 1.0], &plan).unwrap();
        for (a, b) in small.iter().zip(&large) {
            for (x, y) in a.atoms().iter().zip(b.atoms()) {
                assert!((2.0 * x.value - y.value).abs() < 1e-12);
            }
        }
    }
}

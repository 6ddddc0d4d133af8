//! The MAP observed at successive returns of the modulator to an anchor.

use rand::Rng;
use serde::Serialize;

use super::walker::{StepEnd, Walker};
use crate::error::{Error, Result};
use crate::model::MapSpec;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkeletonSample {
    pub anchor: usize,
    /// `(return time, value)` for each return, starting from `(0, 0)` excluded.
    pub returns: Vec<(f64, f64)>,
}

impl SkeletonSample {
    /// Per-cycle `(duration, increment)` pairs.
    pub fn increments(&self) -> Vec<(f64, f64)> {
        let mut prev = (0.0, 0.0);
        self.returns
            .iter()
            .map(|&r| {
                let d = (r.0 - prev.0, r.1 - prev.1);
                prev = r;
                d
            })
            .collect()
    }
}

pub fn skeleton_chain<R: Rng + ?Sized>(spec: &MapSpec, anchor: usize, count: usize, rng: &mut R) -> Result<SkeletonSample> {
    spec.check_state(anchor)?;
    if spec.n() < 2 {
        return Err(Error::InvalidArgument("skeleton chain needs at least two modulator states".into()));
    }
    if spec.has_killing() {
        return Err(Error::InvalidArgument("skeleton chain is undefined for killed specs".into()));
    }
    let mut walker = Walker::new(spec, 0.0, anchor)?;
    let mut returns = Vec::with_capacity(count);
    while returns.len() < count {
        let step = walker.step(rng, f64::INFINITY);
        if let StepEnd::Switch { to, .. } = step.end {
            if to == anchor {
                returns.push((step.segment.t1, step.x));
            }
        }
    }
    Ok(SkeletonSample { anchor, returns })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{LevyComponent, RateMatrix};
    use crate::stats::SummaryStat;
    use rand::SeedableRng;

    fn two_state(a0: f64, a1: f64) -> MapSpec {
        MapSpec::new(
            RateMatrix::two_state(1.0, 1.0).unwrap(),
            vec![LevyComponent::drift(a0), LevyComponent::drift(a1)],
        )
        .unwrap()
    }

    #[test]
    fn return_time_and_increment_means() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let s = skeleton_chain(&two_state(2.0, -1.0), 0, 10_000, &mut rng).unwrap();
        let inc = s.increments();
        let dur = SummaryStat::from_slice(&inc.iter().map(|d| d.0).collect::<Vec<_>>());
        let val = SummaryStat::from_slice(&inc.iter().map(|d| d.1).collect::<Vec<_>>());
        assert!((dur.mean() - 2.0).abs() <= 4.0 * dur.standard_error());
        assert!((val.mean() - 1.0).abs() <= 4.0 * val.standard_error());
        let ratio = val.mean() / dur.mean();
        assert!((ratio - 0.5).abs() < 0.05, "{ratio}");
    }

    #[test]
    fn inert_components_give_zero_chain() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let s = skeleton_chain(&two_state(0.0, 0.0), 1, 100, &mut rng).unwrap();
        assert!(s.returns.iter().all(|r| r.1 == 0.0));
        assert!(s.returns.windows(2).all(|w| w[0].0 < w[1].0));
    }
}

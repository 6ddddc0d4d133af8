//! The path observed up to an independent exponential time, split at its
//! running maximum.

use rand::Rng;
use rand_distr::Exp1;
use serde::Serialize;

use super::bridge;
use super::walker::{StepEnd, Walker};
use crate::error::{Error, Result};
use crate::model::MapSpec;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SplittingSample {
    pub horizon: f64,
    pub value: f64,
    pub state: usize,
    pub sup: f64,
    pub argmax_time: f64,
    pub argmax_state: usize,
    /// `int_0^{argmax_time} k(J_s) ds` for the kill rates supplied.
    pub argmax_exposure: f64,
    /// Killed before the horizon; `value` and `state` are then at the kill.
    pub killed: bool,
}

/// Which time at the maximum is reported when it is held on an interval or
/// sits at a switch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ArgmaxTie {
    /// First time at the maximum; a level reached continuously keeps the
    /// state it was reached in.
    First,
    /// Last time at the maximum; a switch without a jump at the maximum
    /// reports the new state.
    Last,
}

/// Sub-bridges per Brownian segment used to place the maximum in time.
const MAX_PIECES: usize = 8;

pub fn sample_at_exponential_horizon<R: Rng + ?Sized>(
    spec: &MapSpec,
    init: (f64, usize),
    q: f64,
    rng: &mut R,
) -> Result<SplittingSample> {
    let kill: Vec<f64> = spec.components().iter().map(|c| c.kill_rate).collect();
    sample_with_exposure(spec, init, q, &kill, ArgmaxTie::First, rng)
}

/// As [`sample_at_exponential_horizon`], accumulating `kill` (per-state
/// rates, not necessarily those of `spec`) up to the argmax.
pub fn sample_with_exposure<R: Rng + ?Sized>(
    spec: &MapSpec,
    init: (f64, usize),
    q: f64,
    kill: &[f64],
    tie: ArgmaxTie,
    rng: &mut R,
) -> Result<SplittingSample> {
    if !(q > 0.0 && q.is_finite()) {
        return Err(Error::InvalidArgument(format!("rate must be positive, got {q}")));
    }
    if kill.len() != spec.n() {
        return Err(Error::InvalidArgument(format!("need {} kill rates, got {}", spec.n(), kill.len())));
    }
    let horizon = rng.sample::<f64, _>(Exp1) / q;
    let mut walker = Walker::new(spec, init.0, init.1)?;
    let (mut sup, mut at, mut at_state, mut at_exposure) = (init.0, 0.0, init.1, 0.0);
    // exposure at the start of the current segment
    let mut exposure = 0.0;
    loop {
        let step = walker.step(rng, horizon);
        let seg = step.segment;
        let rate = kill[seg.state];
        let mut update = |x: f64, t: f64, j: usize| {
            if x > sup || (tie == ArgmaxTie::Last && x == sup) {
                sup = x;
                at = t;
                at_state = j;
                at_exposure = exposure + rate * (t - seg.t0);
            }
        };
        if seg.is_brownian() {
            let dt = seg.duration();
            let h = dt / MAX_PIECES as f64;
            let mut y0 = seg.x0;
            for k in 0..MAX_PIECES {
                let y1 = if k + 1 == MAX_PIECES {
                    seg.x1
                } else {
                    bridge::sample_point(rng, y0, seg.x1, seg.sigma2, dt - k as f64 * h, h)
                };
                let m = bridge::sample_maximum(rng, y0, y1, seg.sigma2, h);
                update(m, seg.t0 + (k as f64 + 0.5) * h, seg.state);
                y0 = y1;
            }
        } else {
            update(seg.x1, seg.t1, seg.state);
        }
        match step.end {
            StepEnd::Truncated | StepEnd::Kill => {
                return Ok(SplittingSample {
                    horizon,
                    value: seg.x1,
                    state: seg.state,
                    sup,
                    argmax_time: at,
                    argmax_state: at_state,
                    argmax_exposure: at_exposure,
                    killed: step.end == StepEnd::Kill,
                })
            }
            _ => update(step.x, seg.t1, step.state),
        }
        exposure += rate * seg.duration();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::LevyComponent;
    use crate::stats::SummaryStat;
    use rand::SeedableRng;

    #[test]
    fn pure_drifts() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let up = MapSpec::levy(LevyComponent::drift(1.0)).unwrap();
        let s = sample_at_exponential_horizon(&up, (0.0, 0), 1.0, &mut rng).unwrap();
        assert_eq!((s.sup, s.value, s.argmax_time), (s.horizon, s.horizon, s.horizon));
        let down = MapSpec::levy(LevyComponent::drift(-1.0)).unwrap();
        let s = sample_at_exponential_horizon(&down, (0.0, 0), 1.0, &mut rng).unwrap();
        assert_eq!((s.sup, s.argmax_time), (0.0, 0.0));
    }

    #[test]
    fn switch_at_the_maximum_follows_the_tie_rule() {
        // up in state 0, down in state 1: every maximum is reached creeping in 0
        let spec = MapSpec::new(
            crate::model::RateMatrix::two_state(1.0, 1.0).unwrap(),
            vec![LevyComponent::drift(1.0), LevyComponent::drift(-1.0)],
        )
        .unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        for _ in 0..1000 {
            let first = sample_with_exposure(&spec, (0.0, 0), 0.5, &[0.0, 0.0], ArgmaxTie::First, &mut rng).unwrap();
            assert_eq!(first.argmax_state, 0);
            let last = sample_with_exposure(&spec, (0.0, 0), 0.5, &[0.0, 0.0], ArgmaxTie::Last, &mut rng).unwrap();
            assert_eq!(last.argmax_state == 1, last.argmax_time < last.horizon, "{last:?}");
        }
    }

    #[test]
    fn exposure_accumulates_up_to_the_argmax() {
        let spec = MapSpec::levy(LevyComponent::drift(1.0)).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let s = sample_with_exposure(&spec, (0.0, 0), 1.0, &[0.3], ArgmaxTie::First, &mut rng).unwrap();
        assert!((s.argmax_exposure - 0.3 * s.horizon).abs() < 1e-12);
    }

    #[test]
    fn brownian_supremum_mean() {
        let spec = MapSpec::levy(LevyComponent::brownian(0.0, 1.0)).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let mut stat = SummaryStat::default();
        for _ in 0..100_000 {
            let s = sample_at_exponential_horizon(&spec, (0.0, 0), 1.0, &mut rng).unwrap();
            assert!(s.sup >= s.value && s.argmax_time <= s.horizon);
            stat.push(s.sup);
        }
        let exact = 1.0 / 2f64.sqrt();
        assert!((stat.mean() - exact).abs() <= 4.0 * stat.standard_error(), "{stat:?}");
    }
}

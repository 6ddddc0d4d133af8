//! Discrete ladder structure of non-creeping MAPs: new maxima (or minima)
//! can only be reached at event times.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::MapSpec;
use crate::sim::{MapPath, StepEnd, Walker};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LadderSide {
    Ascending,
    Descending,
}

impl LadderSide {
    /// `+1` for ascending, `-1` for descending.
    pub fn sign(self) -> f64 {
        match self {
            LadderSide::Ascending => 1.0,
            LadderSide::Descending => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Strictness {
    /// New record strictly beyond all previous values.
    Strict,
    /// Ties with the current record also count.
    Weak,
}

/// Errors unless every component is Brownian-free with no drift towards `side`.
pub fn require_non_creeping(spec: &MapSpec, side: LadderSide) -> Result<()> {
    let (creeps, which) = match side {
        LadderSide::Ascending => (spec.creeps_up(), "upward"),
        LadderSide::Descending => (spec.creeps_down(), "downward"),
    };
    if creeps {
        Err(Error::Creeping(format!("spec creeps {which}")))
    } else {
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LadderPoint {
    pub time: f64,
    pub value: f64,
    pub state: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LadderSequence {
    pub side: LadderSide,
    pub init_state: usize,
    /// Zeroth point is the start.
    pub points: Vec<LadderPoint>,
}

impl LadderSequence {
    /// Heights measured from the start, `>= 0` on either side.
    pub fn heights(&self) -> Vec<f64> {
        let x0 = self.points[0].value;
        self.points.iter().map(|p| self.side.sign() * (p.value - x0)).collect()
    }

    pub fn increments(&self) -> Vec<f64> {
        self.heights().windows(2).map(|w| w[1] - w[0]).collect()
    }
}

/// Strict ladder points of a recorded path.
pub fn extract_ladder(spec: &MapSpec, path: &MapPath, side: LadderSide) -> Result<LadderSequence> {
    require_non_creeping(spec, side)?;
    let s = side.sign();
    let first = path.events[0];
    let mut points = vec![LadderPoint {
        time: first.time,
        value: first.value,
        state: first.state,
    }];
    let mut best = s * first.value;
    for e in &path.events[1..] {
        if s * e.value > best {
            best = s * e.value;
            points.push(LadderPoint {
                time: e.time,
                value: e.value,
                state: e.state,
            });
        }
    }
    Ok(LadderSequence {
        side,
        init_state: first.state,
        points,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LadderRunConfig {
    pub side: LadderSide,
    pub strictness: Strictness,
    /// Points beyond this height end the run (and are not recorded).
    pub max_height: f64,
    /// The run ends once the walk is this far behind its record.
    pub escape_margin: f64,
    pub max_events: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LadderRun {
    /// `(height from start, state)`, zeroth point included.
    pub points: Vec<(f64, usize)>,
    /// False when stopped by the event cap.
    pub complete: bool,
    pub events: u64,
}

/// Ladder points of a fresh walk from `(0, init_state)`.
pub fn run_ladder<R: Rng + ?Sized>(spec: &MapSpec, init_state: usize, cfg: &LadderRunConfig, rng: &mut R) -> Result<LadderRun> {
    require_non_creeping(spec, cfg.side)?;
    let s = cfg.side.sign();
    let mut walker = Walker::new(spec, 0.0, init_state)?;
    let mut points = vec![(0.0, init_state)];
    let mut best = 0.0;
    let mut events = 0;
    loop {
        if walker.event_rate() == 0.0 {
            // no further events: the walk only drifts away from its record
            return Ok(LadderRun { points, complete: true, events });
        }
        if events >= cfg.max_events {
            return Ok(LadderRun { points, complete: false, events });
        }
        let step = walker.step(rng, f64::INFINITY);
        events += 1;
        if step.end == StepEnd::Kill {
            return Ok(LadderRun { points, complete: true, events });
        }
        let y = s * step.x;
        let record = match cfg.strictness {
            Strictness::Strict => y > best,
            Strictness::Weak => y >= best,
        };
        if record {
            if y > cfg.max_height {
                return Ok(LadderRun { points, complete: true, events });
            }
            best = y;
            points.push((y, step.state));
        } else if best - y > cfg.escape_margin {
            return Ok(LadderRun { points, complete: true, events });
        }
    }
}

/// One strict descending ladder epoch from `(0, i)`: the first time the
/// walk goes below 0, plus the counts per state of intermediate new minima
/// (over times `>= 1`) that stay `>= 0`. A walk that climbs above
/// `escape_level` is taken never to return: `depth` is then infinite.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DescentEpoch {
    pub depth: f64,
    pub state: usize,
    pub above_counts: Vec<u32>,
    pub complete: bool,
}

pub fn descent_epoch<R: Rng + ?Sized>(
    spec: &MapSpec,
    init_state: usize,
    escape_level: f64,
    max_events: u64,
    rng: &mut R,
) -> Result<DescentEpoch> {
    require_non_creeping(spec, LadderSide::Descending)?;
    let mut walker = Walker::new(spec, 0.0, init_state)?;
    let mut above_counts = vec![0; spec.n()];
    let mut low = f64::INFINITY;
    let mut complete = false;
    for _ in 0..max_events {
        if walker.event_rate() == 0.0 {
            complete = true;
            break;
        }
        let step = walker.step(rng, f64::INFINITY);
        if step.end == StepEnd::Kill {
            complete = true;
            break;
        }
        if step.x < 0.0 {
            return Ok(DescentEpoch {
                depth: -step.x,
                state: step.state,
                above_counts,
                complete: true,
            });
        }
        if step.x < low {
            low = step.x;
            above_counts[step.state] += 1;
        }
        if step.x > escape_level {
            complete = true;
            break;
        }
    }
    Ok(DescentEpoch {
        depth: f64::INFINITY,
        state: walker.state,
        above_counts,
        complete,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{JumpLaw, LevyComponent, RateMatrix};
    use crate::sim::simulate_path;
    use crate::stats::EmpiricalMeasure;
    use rand::SeedableRng;

    fn rng(seed: u64) -> rand_chacha::ChaCha8Rng {
        rand_chacha::ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn creeping_specs_are_refused() {
        let spec = MapSpec::levy(LevyComponent::brownian(0.0, 1.0)).unwrap();
        let path = simulate_path(&spec, (0.0, 0), 1.0, &mut rng(0)).unwrap();
        let err = extract_ladder(&spec, &path, LadderSide::Ascending).unwrap_err();
        assert!(err.to_string().starts_with("continuous ladder structure unsupported; use a non-creeping test spec"));
        let up = MapSpec::levy(LevyComponent::drift(1.0)).unwrap();
        assert!(require_non_creeping(&up, LadderSide::Descending).is_ok());
        assert!(require_non_creeping(&up, LadderSide::Ascending).is_err());
    }

    #[test]
    fn monotone_down_path_has_only_the_start() {
        let spec = MapSpec::levy(LevyComponent::drift(-1.0).with_jumps(1.0, JumpLaw::exp_down(1.0))).unwrap();
        let path = simulate_path(&spec, (0.0, 0), 20.0, &mut rng(1)).unwrap();
        let l = extract_ladder(&spec, &path, LadderSide::Ascending).unwrap();
        assert_eq!(l.points.len(), 1);
    }

    #[test]
    fn exponential_jumps_give_exponential_ladder_steps() {
        let spec = MapSpec::levy(LevyComponent::drift(-0.5).with_jumps(1.0, JumpLaw::exp_up(1.0))).unwrap();
        let path = simulate_path(&spec, (0.0, 0), 25_000.0, &mut rng(2)).unwrap();
        let l = extract_ladder(&spec, &path, LadderSide::Ascending).unwrap();
        let inc = l.increments();
        assert!(inc.len() >= 10_000, "{}", inc.len());
        assert!(inc.iter().all(|&h| h > 0.0));
        let m = EmpiricalMeasure::from_values(inc).unwrap();
        assert!(m.ks_to_cdf(|x| 1.0 - (-x).exp()).unwrap() <= 0.03);
        assert_eq!(l, extract_ladder(&spec, &path, LadderSide::Ascending).unwrap());
    }

    #[test]
    fn up_jumps_only_in_one_state_fix_the_ladder_state() {
        let spec = MapSpec::new(
            RateMatrix::two_state(1.0, 1.0).unwrap(),
            vec![
                LevyComponent::drift(-0.2).with_jumps(1.0, JumpLaw::exp_up(1.0)),
                LevyComponent::drift(-0.2),
            ],
        )
        .unwrap();
        let path = simulate_path(&spec, (0.0, 1), 200.0, &mut rng(3)).unwrap();
        let l = extract_ladder(&spec, &path, LadderSide::Ascending).unwrap();
        assert!(l.points.len() > 5);
        assert!(l.points[1..].iter().all(|p| p.state == 0));
    }
}

//! First passage above (or below) a level.

use rand::Rng;
use serde::Serialize;

use super::bridge;
use super::walker::{Segment, StepEnd, Walker};
use crate::error::{Error, Result};
use crate::model::MapSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Direction {
    Up,
    Down,
}

impl Direction {
    fn sign(self) -> f64 {
        match self {
            Direction::Up => 1.0,
            Direction::Down => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CrossingMode {
    Jump,
    Creep,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PassageSample {
    pub level: f64,
    pub time: f64,
    /// Distance beyond the level, always `>= 0`.
    pub overshoot: f64,
    pub state: usize,
    pub mode: CrossingMode,
}

impl PassageSample {
    /// Value of the process at the passage time.
    pub fn value(&self, direction: Direction) -> f64 {
        self.level + direction.sign() * self.overshoot
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum PassageOutcome {
    Passed(PassageSample),
    /// The time cap was reached first.
    NoPassage { cap: f64 },
    Killed { time: f64 },
}

impl PassageOutcome {
    pub fn passed(self) -> Option<PassageSample> {
        match self {
            PassageOutcome::Passed(p) => Some(p),
            _ => None,
        }
    }
}

/// Relative time resolution for locating Brownian crossings.
pub const CROSSING_RESOLUTION: f64 = 1e-9;

/// Drives `walker` until it passes `level` in `direction`, the cap, or a kill.
/// Every visited segment is handed to `on_segment`, the last one cut at the
/// crossing time for creeping passages.
pub fn run_to_passage<R: Rng + ?Sized>(
    walker: &mut Walker<'_>,
    level: f64,
    direction: Direction,
    cap: f64,
    rng: &mut R,
    mut on_segment: impl FnMut(&Segment),
) -> PassageOutcome {
    let s = direction.sign();
    let target = s * level;
    loop {
        let step = walker.step(rng, cap);
        let seg = step.segment;
        let (y0, y1) = (s * seg.x0, s * seg.x1);
        let creep_at = if seg.is_brownian() {
            let dt = seg.duration();
            let crossed = y1 >= target || {
                let p = bridge::crossing_probability(target, y0, y1, seg.sigma2, dt);
                rng.random::<f64>() < p
            };
            crossed.then(|| {
                seg.t0 + bridge::locate_crossing(rng, target, y0, y1, seg.sigma2, dt, CROSSING_RESOLUTION * dt.max(1e-3))
            })
        } else if s * seg.drift > 0.0 && y1 >= target {
            Some((seg.t0 + (target - y0) / (s * seg.drift)).min(seg.t1))
        } else {
            None
        };
        if let Some(time) = creep_at {
            on_segment(&Segment { t1: time, x1: level, ..seg });
            walker.t = time;
            walker.x = level;
            walker.state = seg.state;
            return PassageOutcome::Passed(PassageSample {
                level,
                time,
                overshoot: 0.0,
                state: seg.state,
                mode: CrossingMode::Creep,
            });
        }
        on_segment(&seg);
        match step.end {
            StepEnd::Truncated => return PassageOutcome::NoPassage { cap },
            StepEnd::Kill => return PassageOutcome::Killed { time: seg.t1 },
            _ => {
                if s * step.x >= target {
                    return PassageOutcome::Passed(PassageSample {
                        level,
                        time: seg.t1,
                        overshoot: s * step.x - target,
                        state: step.state,
                        mode: CrossingMode::Jump,
                    });
                }
            }
        }
    }
}

/// First passage strictly beyond `level` in `direction`, starting from
/// `init` on the near side.
pub fn first_passage<R: Rng + ?Sized>(
    spec: &MapSpec,
    init: (f64, usize),
    level: f64,
    direction: Direction,
    cap: f64,
    rng: &mut R,
) -> Result<PassageOutcome> {
    if direction.sign() * init.0 >= direction.sign() * level {
        return Err(Error::InvalidArgument(format!(
            "start {} is already beyond level {level}",
            init.0
        )));
    }
    if !(cap > 0.0) {
        return Err(Error::InvalidArgument(format!("time cap must be positive, got {cap}")));
    }
    let mut walker = Walker::new(spec, init.0, init.1)?;
    Ok(run_to_passage(&mut walker, level, direction, cap, rng, |_| {}))
}

pub fn first_passage_up<R: Rng + ?Sized>(
    spec: &MapSpec,
    init: (f64, usize),
    level: f64,
    cap: f64,
    rng: &mut R,
) -> Result<PassageOutcome> {
    first_passage(spec, init, level, Direction::Up, cap, rng)
}

//! Full path records.

use std::fmt::Write as _;

use rand::Rng;
use serde::Serialize;

use super::bridge;
use super::walker::{Segment, StepEnd, Walker};
use crate::error::{Error, Result};
use crate::model::MapSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Cause {
    Start,
    ModulatorSwitch,
    ComponentJump,
    GridPoint,
    Passage,
    Kill,
    Horizon,
}

impl Cause {
    pub fn label(self) -> &'static str {
        match self {
            Cause::Start => "start",
            Cause::ModulatorSwitch => "modulator-switch",
            Cause::ComponentJump => "component-jump",
            Cause::GridPoint => "grid-point",
            Cause::Passage => "passage",
            Cause::Kill => "kill",
            Cause::Horizon => "horizon",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PathEvent {
    pub time: f64,
    pub cause: Cause,
    pub state: usize,
    /// Value right after the event (switch jumps included).
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TerminalStatus {
    AliveAtHorizon,
    Killed,
    StoppedAtPassage,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MapPath {
    pub events: Vec<PathEvent>,
    pub segments: Vec<Segment>,
    pub status: TerminalStatus,
}

impl MapPath {
    pub fn start(&self) -> (f64, usize) {
        (self.events[0].value, self.events[0].state)
    }

    /// Last recorded value and state.
    pub fn terminal(&self) -> (f64, usize) {
        let e = self.events.last().expect("path has a start event");
        (e.value, e.state)
    }

    pub fn end_time(&self) -> f64 {
        self.events.last().map_or(0.0, |e| e.time)
    }

    pub fn is_killed(&self) -> bool {
        self.status == TerminalStatus::Killed
    }

    /// CSV with header `time,state,value,cause`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("time,state,value,cause\n");
        for e in &self.events {
            let _ = writeln!(s, "{},{},{},{}", e.time, e.state, e.value, e.cause.label());
        }
        s
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PathOptions {
    /// Adds grid-point events every `grid` time units; Brownian values there
    /// are bridge samples and split the segments.
    pub grid: Option<f64>,
}

pub fn simulate_path<R: Rng + ?Sized>(spec: &MapSpec, init: (f64, usize), horizon: f64, rng: &mut R) -> Result<MapPath> {
    simulate_path_with(spec, init, horizon, &PathOptions::default(), rng)
}

pub fn simulate_path_with<R: Rng + ?Sized>(
    spec: &MapSpec,
    init: (f64, usize),
    horizon: f64,
    options: &PathOptions,
    rng: &mut R,
) -> Result<MapPath> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::InvalidArgument(format!("horizon must be positive and finite, got {horizon}")));
    }
    if let Some(g) = options.grid {
        if !(g > 0.0) {
            return Err(Error::InvalidArgument(format!("grid spacing must be positive, got {g}")));
        }
    }
    let mut walker = Walker::new(spec, init.0, init.1)?;
    let mut events = vec![PathEvent {
        time: 0.0,
        cause: Cause::Start,
        state: init.1,
        value: init.0,
    }];
    let mut segments = Vec::new();
    let status = loop {
        let step = walker.step(rng, horizon);
        push_segment(&mut events, &mut segments, step.segment, options.grid, rng);
        let (cause, time) = match step.end {
            StepEnd::Truncated => (Cause::Horizon, horizon),
            StepEnd::Jump => (Cause::ComponentJump, step.segment.t1),
            StepEnd::Switch { .. } => (Cause::ModulatorSwitch, step.segment.t1),
            StepEnd::Kill => (Cause::Kill, step.segment.t1),
        };
        events.push(PathEvent {
            time,
            cause,
            state: step.state,
            value: step.x,
        });
        match step.end {
            StepEnd::Truncated => break TerminalStatus::AliveAtHorizon,
            StepEnd::Kill => break TerminalStatus::Killed,
            _ => {}
        }
    };
    Ok(MapPath {
        events,
        segments,
        status,
    })
}

fn push_segment<R: Rng + ?Sized>(
    events: &mut Vec<PathEvent>,
    segments: &mut Vec<Segment>,
    seg: Segment,
    grid: Option<f64>,
    rng: &mut R,
) {
    let Some(g) = grid else {
        segments.push(seg);
        return;
    };
    let mut k = (seg.t0 / g).floor() as u64 + 1;
    let mut cur = seg;
    loop {
        let tg = k as f64 * g;
        if tg >= cur.t1 {
            break;
        }
        let h = tg - cur.t0;
        let xg = if cur.is_brownian() {
            bridge::sample_point(rng, cur.x0, cur.x1, cur.sigma2, cur.duration(), h)
        } else {
            cur.x0 + cur.drift * h
        };
        segments.push(Segment { t1: tg, x1: xg, ..cur });
        events.push(PathEvent {
            time: tg,
            cause: Cause::GridPoint,
            state: cur.state,
            value: xg,
        });
        cur = Segment { t0: tg, x0: xg, ..cur };
        k += 1;
    }
    segments.push(cur);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{LevyComponent, RateMatrix};
    use rand::SeedableRng;

    fn rng(seed: u64) -> rand_chacha::ChaCha8Rng {
        rand_chacha::ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn unit_drift_is_exact() {
        let spec = MapSpec::levy(LevyComponent::drift(1.0)).unwrap();
        let p = simulate_path(&spec, (0.0, 0), 2.0, &mut rng(1)).unwrap();
        assert_eq!(p.segments.len(), 1);
        assert_eq!(p.terminal(), (2.0, 0));
        assert_eq!(p.status, TerminalStatus::AliveAtHorizon);
    }

    #[test]
    fn inert_component_stays_put() {
        let spec = MapSpec::levy(LevyComponent::drift(0.0)).unwrap();
        let p = simulate_path_with(&spec, (3.0, 0), 5.0, &PathOptions { grid: Some(0.5) }, &mut rng(1)).unwrap();
        assert!(p.events.iter().all(|e| e.value == 3.0));
        assert_eq!(p.events.len(), 11);
    }

    #[test]
    fn rejects_bad_input() {
        let spec = MapSpec::levy(LevyComponent::drift(1.0)).unwrap();
        assert!(simulate_path(&spec, (0.0, 0), 0.0, &mut rng(1)).is_err());
        assert!(simulate_path(&spec, (0.0, 3), 1.0, &mut rng(1)).is_err());
    }

    #[test]
    fn long_run_mean_of_two_drifts() {
        let spec = MapSpec::new(
            RateMatrix::two_state(1.0, 1.0).unwrap(),
            vec![LevyComponent::drift(2.0), LevyComponent::drift(-1.0)],
        )
        .unwrap();
        let mut r = rng(11);
        let mut s = crate::stats::SummaryStat::default();
        for k in 0..10_000 {
            let p = simulate_path(&spec, (0.0, k % 2), 10.0, &mut r).unwrap();
            s.push(p.terminal().0 / 10.0);
        }
        assert!((s.mean() - 0.5).abs() <= 4.0 * s.standard_error(), "{s:?}");
    }

    #[test]
    fn path_invariants_and_csv() {
        let spec = MapSpec::new(
            RateMatrix::two_state(1.0, 2.0).unwrap(),
            vec![
                LevyComponent::brownian(0.1, 1.0).with_jumps(1.0, crate::model::JumpLaw::exp_up(1.0)),
                LevyComponent::drift(-1.0).with_kill(0.05),
            ],
        )
        .unwrap();
        let opts = PathOptions { grid: Some(0.25) };
        let a = simulate_path_with(&spec, (0.0, 0), 20.0, &opts, &mut rng(5)).unwrap();
        let b = simulate_path_with(&spec, (0.0, 0), 20.0, &opts, &mut rng(5)).unwrap();
        assert_eq!(a, b);
        assert!(a.events.windows(2).all(|w| w[0].time < w[1].time));
        assert!(a.segments.windows(2).all(|w| w[0].t1 == w[1].t0));
        let csv = a.to_csv();
        assert!(csv.starts_with("time,state,value,cause\n0,0,0,start\n"));
        assert_eq!(csv.lines().count(), a.events.len() + 1);
    }
}

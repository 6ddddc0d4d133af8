//! Real self-similar Markov paths obtained from MAP paths by the
//! Lamperti-Kiu time change.

use std::fmt::Write as _;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::clock::{linear_integral, push_pieces, ClockPiece};
use crate::error::{Error, Result};
use crate::model::MapSpec;
use crate::sim::{Cause, MapPath, StepEnd, TerminalStatus, Walker};

/// Self-similarity index, `alpha > 0`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct ScalingIndex(f64);

impl ScalingIndex {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha > 0.0 && alpha.is_finite() {
            Ok(ScalingIndex(alpha))
        } else {
            Err(Error::InvalidArgument(format!("scaling index must be positive, got {alpha}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for ScalingIndex {
    type Error = Error;
    fn try_from(a: f64) -> Result<Self> {
        ScalingIndex::new(a)
    }
}

impl From<ScalingIndex> for f64 {
    fn from(a: ScalingIndex) -> f64 {
        a.0
    }
}

/// Modulator state encoding the sign of `z`: state 0 is positive, state 1
/// negative. One-state specs keep the sign they start with.
pub fn state_of_sign(spec: &MapSpec, z: f64) -> Result<usize> {
    if !(z != 0.0 && z.is_finite()) {
        return Err(Error::InvalidArgument(format!("start must be finite and non-zero, got {z}")));
    }
    match spec.n() {
        1 => Ok(0),
        2 => Ok(if z > 0.0 { 0 } else { 1 }),
        n => Err(Error::InvalidSpec(format!("sign modulation needs one or two states, spec has {n}"))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RssmpStatus {
    AliveAtHorizon,
    /// Sent to the cemetery 0 at the kill time.
    Killed,
    /// Stopped by the event cap before the clock reached the horizon.
    EventCap,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RssmpEvent {
    pub t: f64,
    pub z: f64,
    pub map_time: f64,
    pub state: usize,
    pub cause: Cause,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RssmpPath {
    pub alpha: f64,
    /// Sign of a one-state path; `None` when the sign is the state.
    fixed_sign: Option<f64>,
    pub pieces: Vec<ClockPiece>,
    pub events: Vec<RssmpEvent>,
    pub status: RssmpStatus,
}

/// Event cap for adaptive horizon extension.
pub const MAX_EVENTS: usize = 1_000_000;

impl RssmpPath {
    pub fn sign_of(&self, state: usize) -> f64 {
        match self.fixed_sign {
            Some(s) => s,
            None if state == 0 => 1.0,
            None => -1.0,
        }
    }

    pub fn start(&self) -> f64 {
        self.events[0].z
    }

    /// Clock value at the end of the simulated stretch.
    pub fn covered(&self) -> f64 {
        self.pieces.last().map_or(0.0, |p| p.phi1)
    }

    /// `Z_t`, or `None` beyond the simulated stretch of a live path.
    pub fn value_at(&self, t: f64) -> Option<f64> {
        if t < 0.0 {
            return None;
        }
        let end = self.covered();
        if t > end {
            return match self.status {
                RssmpStatus::Killed => Some(0.0),
                _ => None,
            };
        }
        let k = self.pieces.partition_point(|p| p.phi1 < t);
        let p = self.pieces.get(k)?;
        let s = p.invert(self.alpha, t);
        Some(self.sign_of(p.state) * p.value_at(s).exp())
    }

    /// `phi^{-1}(t)`.
    pub fn inverse_clock(&self, t: f64) -> Option<f64> {
        let k = self.pieces.partition_point(|p| p.phi1 < t);
        self.pieces.get(k).map(|p| p.invert(self.alpha, t))
    }

    /// `phi(s)` for a MAP time inside the simulated stretch.
    pub fn clock_at(&self, s: f64) -> Option<f64> {
        let k = self.pieces.partition_point(|p| p.s1 < s);
        self.pieces
            .get(k)
            .map(|p| p.phi0 + linear_integral(self.alpha, p.x0, p.value_at(s), s - p.s0))
    }

    /// First time `|Z| >= eps`, with the value there, read off the path.
    pub fn first_exit_scan(&self, eps: f64) -> Option<(f64, f64)> {
        let level = eps.ln();
        for p in &self.pieces {
            if p.x0 >= level {
                return Some((p.phi0, self.sign_of(p.state) * p.x0.exp()));
            }
            if p.x1 >= level {
                let s = p.s0 + (level - p.x0) / (p.x1 - p.x0) * (p.s1 - p.s0);
                let t = p.phi0 + linear_integral(self.alpha, p.x0, level, s - p.s0);
                return Some((t, self.sign_of(p.state) * eps));
            }
        }
        let last = self.events.last()?;
        (last.z.abs() >= eps && last.cause != Cause::Kill).then_some((last.t, last.z))
    }

    /// CSV with header `t,Z,sign`, one row per MAP event.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,Z,sign\n");
        for e in &self.events {
            let sign = if e.z > 0.0 {
                1
            } else if e.z < 0.0 {
                -1
            } else {
                0
            };
            let _ = writeln!(s, "{},{},{}", e.t, e.z, sign);
        }
        s
    }

    /// CSV of `Z` sampled at the given times (`t,Z,sign`).
    pub fn grid_csv(&self, times: &[f64]) -> String {
        let mut s = String::from("t,Z,sign\n");
        for &t in times {
            if let Some(z) = self.value_at(t) {
                let _ = writeln!(s, "{t},{z},{}", z.signum() as i32 * (z != 0.0) as i32);
            }
        }
        s
    }
}

fn event(t: f64, x: f64, state: usize, sign: f64, map_time: f64, cause: Cause) -> RssmpEvent {
    RssmpEvent {
        t,
        z: sign * x.exp(),
        map_time,
        state,
        cause,
    }
}

/// Time-changes a recorded MAP path started at `(log|z|, state)`. The sign
/// of a one-state path is positive. Clock values beyond the `f64` range
/// saturate at `+inf`; such stretches lie after every finite time.
pub fn to_rssmp<R: Rng + ?Sized>(path: &MapPath, alpha: ScalingIndex, rng: &mut R) -> RssmpPath {
    let alpha = alpha.value();
    let mut out = RssmpPath {
        alpha,
        fixed_sign: None,
        pieces: Vec::with_capacity(path.segments.len()),
        events: Vec::with_capacity(path.events.len()),
        status: match path.status {
            TerminalStatus::Killed => RssmpStatus::Killed,
            _ => RssmpStatus::AliveAtHorizon,
        },
    };
    let states = 1 + path.events.iter().map(|e| e.state).max().unwrap_or(0);
    if states == 1 {
        out.fixed_sign = Some(1.0);
    }
    let mut phi = 0.0;
    let mut seg_iter = path.segments.iter().peekable();
    for e in &path.events {
        while let Some(seg) = seg_iter.next_if(|s| s.t1 <= e.time) {
            phi = push_pieces(rng, seg, alpha, phi, &mut out.pieces);
        }
        let sign = out.sign_of(e.state);
        let mut ev = event(phi, e.value, e.state, sign, e.time, e.cause);
        if e.cause == Cause::Kill {
            ev.z = 0.0;
        }
        out.events.push(ev);
    }
    out
}

/// Simulates from `z != 0` until the clock passes `horizon`, the path is
/// killed, or [`MAX_EVENTS`] MAP steps have been taken.
pub fn simulate_rssmp<R: Rng + ?Sized>(
    spec: &MapSpec,
    alpha: ScalingIndex,
    z: f64,
    horizon: f64,
    rng: &mut R,
) -> Result<RssmpPath> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::InvalidArgument(format!("horizon must be positive and finite, got {horizon}")));
    }
    let state = state_of_sign(spec, z)?;
    let a = alpha.value();
    let mut walker = Walker::new(spec, z.abs().ln(), state)?;
    let mut path = RssmpPath {
        alpha: a,
        fixed_sign: (spec.n() == 1).then(|| z.signum()),
        pieces: Vec::new(),
        events: Vec::new(),
        status: RssmpStatus::AliveAtHorizon,
    };
    path.events.push(RssmpEvent {
        t: 0.0,
        z,
        map_time: 0.0,
        state,
        cause: Cause::Start,
    });
    let mut phi = 0.0;
    let mut steps = 0;
    while phi < horizon {
        if steps >= MAX_EVENTS {
            path.status = RssmpStatus::EventCap;
            break;
        }
        steps += 1;
        let step = walker.step_unbounded(rng, 1.0);
        phi = push_pieces(rng, &step.segment, a, phi, &mut path.pieces);
        let sign = path.sign_of(step.state);
        let cause = match step.end {
            StepEnd::Truncated => Cause::Horizon,
            StepEnd::Jump => Cause::ComponentJump,
            StepEnd::Switch { .. } => Cause::ModulatorSwitch,
            StepEnd::Kill => Cause::Kill,
        };
        let mut ev = event(phi, step.x, step.state, sign, step.segment.t1, cause);
        if step.end == StepEnd::Kill {
            ev.z = 0.0;
            path.events.push(ev);
            path.status = RssmpStatus::Killed;
            break;
        }
        if step.end != StepEnd::Truncated {
            path.events.push(ev);
        }
    }
    Ok(path)
}

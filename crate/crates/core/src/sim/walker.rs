//! One-segment-at-a-time event-driven simulation of a MAP.

use rand::Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::error::Result;
use crate::model::MapSpec;

/// Inter-event piece with constant modulator state. `x1` is the left limit
/// at `t1`, before any event jump.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub t0: f64,
    pub t1: f64,
    pub x0: f64,
    pub x1: f64,
    pub state: usize,
    pub drift: f64,
    pub sigma2: f64,
}

impl Segment {
    pub fn duration(&self) -> f64 {
        self.t1 - self.t0
    }

    pub fn is_brownian(&self) -> bool {
        self.sigma2 > 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepEnd {
    Switch { from: usize, to: usize },
    Jump,
    Kill,
    /// Stopped at the caller's time limit; the exponential clock is
    /// discarded, which is exact by memorylessness.
    Truncated,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step {
    pub segment: Segment,
    pub end: StepEnd,
    /// Value and state right after the step.
    pub x: f64,
    pub state: usize,
}

#[derive(Debug, Clone)]
struct StateRates {
    total: f64,
    kill: f64,
    jump: f64,
    switch: Vec<(usize, f64)>,
}

/// Current `(t, xi, J)` of a MAP plus the per-state rate tables.
#[derive(Debug, Clone)]
pub struct Walker<'a> {
    spec: &'a MapSpec,
    rates: Vec<StateRates>,
    pub t: f64,
    pub x: f64,
    pub state: usize,
    pub alive: bool,
}

impl<'a> Walker<'a> {
    pub fn new(spec: &'a MapSpec, x: f64, state: usize) -> Result<Self> {
        spec.check_state(state)?;
        let rates = (0..spec.n())
            .map(|i| {
                let c = spec.component(i);
                let switch: Vec<(usize, f64)> = (0..spec.n())
                    .filter(|&j| j != i && spec.rates().get(i, j) > 0.0)
                    .map(|j| (j, spec.rates().get(i, j)))
                    .collect();
                let q: f64 = switch.iter().map(|s| s.1).sum();
                let jump = if c.has_jumps() { c.jump_rate } else { 0.0 };
                StateRates {
                    total: c.kill_rate + jump + q,
                    kill: c.kill_rate,
                    jump,
                    switch,
                }
            })
            .collect();
        Ok(Walker {
            spec,
            rates,
            t: 0.0,
            x,
            state,
            alive: true,
        })
    }

    pub fn spec(&self) -> &'a MapSpec {
        self.spec
    }

    /// Total event rate in the current state.
    pub fn event_rate(&self) -> f64 {
        self.rates[self.state].total
    }

    /// Advances to the next event or to `limit`, whichever is first.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R, limit: f64) -> Step {
        debug_assert!(self.alive);
        let r = &self.rates[self.state];
        let c = self.spec.component(self.state);
        let wait = if r.total > 0.0 {
            rng.sample::<f64, _>(Exp1) / r.total
        } else {
            f64::INFINITY
        };
        let truncated = self.t + wait > limit;
        let t1 = if truncated { limit } else { self.t + wait };
        let dt = t1 - self.t;
        let mut x1 = self.x + c.drift * dt;
        if c.sigma2 > 0.0 {
            x1 += (c.sigma2 * dt).sqrt() * rng.sample::<f64, _>(StandardNormal);
        }
        let segment = Segment {
            t0: self.t,
            t1,
            x0: self.x,
            x1,
            state: self.state,
            drift: c.drift,
            sigma2: c.sigma2,
        };
        self.t = t1;
        self.x = x1;
        let end = if truncated {
            StepEnd::Truncated
        } else {
            let u = rng.random::<f64>() * r.total;
            if u < r.kill {
                self.alive = false;
                StepEnd::Kill
            } else if u < r.kill + r.jump {
                self.x += c.jump_law.sample(rng);
                StepEnd::Jump
            } else {
                let mut acc = r.kill + r.jump;
                let mut to = r.switch.last().map_or(self.state, |s| s.0);
                for &(j, q) in &r.switch {
                    acc += q;
                    if u < acc {
                        to = j;
                        break;
                    }
                }
                let from = self.state;
                let law = self.spec.transition(from, to);
                if !law.is_zero() {
                    self.x += law.sample(rng);
                }
                self.state = to;
                StepEnd::Switch { from, to }
            }
        };
        Step {
            segment,
            end,
            x: self.x,
            state: self.state,
        }
    }

    /// Like [`Walker::step`] without a time limit; in a state with no events
    /// the segment is cut after `chunk` time units instead.
    pub fn step_unbounded<R: Rng + ?Sized>(&mut self, rng: &mut R, chunk: f64) -> Step {
        let limit = if self.event_rate() > 0.0 {
            f64::INFINITY
        } else {
            self.t + chunk
        };
        self.step(rng, limit)
    }
}

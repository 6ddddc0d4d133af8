//! Occupation of a state before first passage below zero, against the
//! product of the descending ladder potential and the dual's weak
//! descending ladder potential.
//!
//! For a spec without drift or Brownian part the path is piecewise
//! constant, and reversing the embedded jump chain gives
//! `E^{x,i}[int_0^tau f(xi) 1(J = k) dt]
//!  = sum_j pi_k / (pi_j lambda_j) int int U_{i,j}(dz) hat U_{k,j}(dy) f(x - z + y)`
//! with `lambda_j` the total event rate in state `j`.

use serde::Serialize;

use super::ladder::{require_non_creeping, run_ladder, LadderRunConfig, LadderSide, Strictness};
use crate::engine::{run_replicated, SeedPlan};
use crate::error::{Error, Result};
use crate::model::{dual_spec, stationary_distribution, MapSpec};
use crate::report::Check;
use crate::sim::{StepEnd, Walker};
use crate::stats::SummaryStat;

pub const OCCUPATION_TOLERANCE: f64 = 0.1;
/// Dual ladder runs stop once the walk sits this far above its minimum.
const DUAL_ESCAPE_MARGIN: f64 = 25.0;
const MAX_EVENTS: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum TestFunction {
    /// `1_{[low, high]}`
    Indicator { low: f64, high: f64 },
    /// `exp(-rate v)`
    Exponential { rate: f64 },
    Constant { value: f64 },
}

impl TestFunction {
    pub fn eval(&self, v: f64) -> f64 {
        match *self {
            TestFunction::Indicator { low, high } => f64::from(u8::from(low <= v && v <= high)),
            TestFunction::Exponential { rate } => (-rate * v).exp(),
            TestFunction::Constant { value } => value,
        }
    }

    pub fn label(&self) -> String {
        match *self {
            TestFunction::Indicator { low, high } => format!("indicator[{low},{high}]"),
            TestFunction::Exponential { rate } => format!("exp(-{rate}v)"),
            TestFunction::Constant { value } => format!("constant {value}"),
        }
    }

    /// `sum_{z in zs, y in ys} f(x - z + y)` with `ys` sorted.
    fn pair_sum(&self, x: f64, zs: &[f64], ys: &[f64]) -> f64 {
        match *self {
            TestFunction::Constant { value } => value * zs.len() as f64 * ys.len() as f64,
            TestFunction::Exponential { rate } => {
                let a: f64 = zs.iter().map(|z| (-rate * (x - z)).exp()).sum();
                let b: f64 = ys.iter().map(|y| (-rate * y).exp()).sum();
                a * b
            }
            TestFunction::Indicator { low, high } => zs
                .iter()
                .map(|z| {
                    let lo = ys.partition_point(|&y| y < low - x + z);
                    let hi = ys.partition_point(|&y| y <= high - x + z);
                    (hi - lo) as f64
                })
                .sum(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OccupationRow {
    pub x: f64,
    pub init_state: usize,
    pub target_state: usize,
    pub function: TestFunction,
    pub lhs: f64,
    pub lhs_se: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OccupationReport {
    pub rows: Vec<OccupationRow>,
    /// Least-squares constant `c` in `lhs ~ c * rhs`.
    pub constant: f64,
    /// `sum |lhs - c rhs| / sum |lhs|`
    pub relative_l1: f64,
}

impl OccupationReport {
    pub fn checks(&self) -> Vec<Check> {
        vec![Check::at_most("occupation: relative L1 error after one fitted constant", self.relative_l1, OCCUPATION_TOLERANCE)
            .with_detail(format!("fitted constant {:.6}", self.constant))]
    }
}

/// Ladder depths `<= max_depth` from each state, grouped by ladder state.
fn ladder_atoms(spec: &MapSpec, init: usize, cfg: &LadderRunConfig, plan: &SeedPlan) -> Result<(Vec<Vec<f64>>, f64)> {
    let runs = run_replicated(plan, |_, rng| run_ladder(spec, init, cfg, rng))?;
    let mut by_state = vec![Vec::new(); spec.n()];
    for r in &runs {
        for &(h, j) in &r.points {
            by_state[j].push(h);
        }
    }
    for v in &mut by_state {
        v.sort_by(f64::total_cmp);
    }
    Ok((by_state, runs.len() as f64))
}

pub fn verify_occupation_formula(
    spec: &MapSpec,
    starts: &[(f64, usize)],
    targets: &[usize],
    functions: &[TestFunction],
    plan: &SeedPlan,
) -> Result<OccupationReport> {
    require_non_creeping(spec, LadderSide::Ascending)?;
    require_non_creeping(spec, LadderSide::Descending)?;
    if spec.has_killing() {
        return Err(Error::InvalidArgument("occupation formula needs a spec without killing".into()));
    }
    if starts.iter().any(|s| !(s.0 >= 0.0)) {
        return Err(Error::InvalidArgument("starts must be non-negative".into()));
    }
    for &(_, i) in starts {
        spec.check_state(i)?;
    }
    for &k in targets {
        spec.check_state(k)?;
    }
    let n = spec.n();
    let pi = stationary_distribution(spec.rates())?;
    let rates: Vec<f64> = (0..n).map(|j| Walker::new(spec, 0.0, j).map(|w| w.event_rate())).collect::<Result<_>>()?;
    let dual = dual_spec(spec)?;
    let max_x = starts.iter().map(|s| s.0).fold(0.0, f64::max);
    let down = LadderRunConfig {
        side: LadderSide::Descending,
        strictness: Strictness::Strict,
        max_height: max_x,
        escape_margin: f64::INFINITY,
        max_events: MAX_EVENTS,
    };
    let dual_down = LadderRunConfig {
        side: LadderSide::Descending,
        strictness: Strictness::Weak,
        max_height: f64::INFINITY,
        escape_margin: DUAL_ESCAPE_MARGIN,
        max_events: MAX_EVENTS,
    };
    let mut rows = Vec::new();
    for &(x, i) in starts {
        let (u, nu) = ladder_atoms(spec, i, &down, &plan.derive(&format!("occupation-ladder-{i}")))?;
        let lhs = occupation_lhs(spec, (x, i), targets, functions, &plan.derive(&format!("occupation-lhs-{x}-{i}")))?;
        for (t, &k) in targets.iter().enumerate() {
            let (v, nv) = ladder_atoms(&dual, k, &dual_down, &plan.derive(&format!("occupation-dual-{k}")))?;
            for (a, f) in functions.iter().enumerate() {
                let mut rhs = 0.0;
                for j in 0..n {
                    let zs: Vec<f64> = u[j].iter().cloned().filter(|&z| z <= x).collect();
                    rhs += pi[k] / (pi[j] * rates[j]) * f.pair_sum(x, &zs, &v[j]) / (nu * nv);
                }
                let stat = &lhs[t][a];
                rows.push(OccupationRow {
                    x,
                    init_state: i,
                    target_state: k,
                    function: *f,
                    lhs: stat.mean(),
                    lhs_se: stat.standard_error(),
                    rhs,
                });
            }
        }
    }
    let slr: f64 = rows.iter().map(|r| r.lhs * r.rhs).sum();
    let srr: f64 = rows.iter().map(|r| r.rhs * r.rhs).sum();
    let constant = if srr > 0.0 { slr / srr } else { 1.0 };
    let sl: f64 = rows.iter().map(|r| r.lhs.abs()).sum();
    let err: f64 = rows.iter().map(|r| (r.lhs - constant * r.rhs).abs()).sum();
    let relative_l1 = if sl > 0.0 { err / sl } else { err };
    Ok(OccupationReport {
        rows,
        constant,
        relative_l1,
    })
}

/// `[target][function]` statistics of the time-weighted occupation.
fn occupation_lhs(
    spec: &MapSpec,
    init: (f64, usize),
    targets: &[usize],
    functions: &[TestFunction],
    plan: &SeedPlan,
) -> Result<Vec<Vec<SummaryStat>>> {
    let per_path = run_replicated(plan, |_, rng| {
        let mut acc = vec![vec![0.0; functions.len()]; targets.len()];
        let mut w = Walker::new(spec, init.0, init.1)?;
        for _ in 0..MAX_EVENTS {
            let step = w.step(rng, f64::INFINITY);
            let seg = step.segment;
            for (t, &k) in targets.iter().enumerate() {
                if seg.state == k {
                    for (a, f) in functions.iter().enumerate() {
                        acc[t][a] += seg.duration() * f.eval(seg.x0);
                    }
                }
            }
            if step.end == StepEnd::Kill || step.x < 0.0 {
                return Ok(acc);
            }
        }
        Err(Error::InvalidArgument("occupation path did not pass below zero within the event cap".into()))
    })?;
    let mut out = vec![vec![SummaryStat::default(); functions.len()]; targets.len()];
    for acc in &per_path {
        for (t, row) in acc.iter().enumerate() {
            for (a, v) in row.iter().enumerate() {
                out[t][a].push(*v);
            }
        }
    }
    Ok(out)
}

//! Harmonic function of the MAP killed on entering the negative half-line.
//!
//! The descending ladder of a non-creeping MAP is a Markov random walk. Its
//! counting potential `V_{i,j}` solves a Markov renewal equation driven by
//! the law of one ladder epoch, which is estimated from independent epochs.
//! Counting ladder points makes `sum_j c_j V_{i,j}` harmonic only for one
//! weight vector `c`: the Perron vector of `A_{i,j}`, the expected number of
//! new minima in state `j` that stay above the start during one epoch.

use nalgebra::DMatrix;
use rand::Rng;
use serde::Serialize;

use super::ladder::{descent_epoch, require_non_creeping, DescentEpoch, LadderSide};
use crate::engine::{run_replicated, SeedPlan};
use crate::error::{Error, Result};
use crate::model::{classify_regime, MapSpec, Regime};
use crate::report::Check;
use crate::sim::{StepEnd, Walker};

pub const EPOCH_GROUPS: usize = 32;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpochLibrary {
    /// Complete epochs per initial state.
    pub epochs: Vec<Vec<DescentEpoch>>,
    /// Epochs stopped by the event cap, per initial state.
    pub incomplete: Vec<u64>,
}

/// Height above which an upward-drifting walk is taken never to return.
pub const ESCAPE_LEVEL: f64 = 40.0;

pub fn sample_epochs(spec: &MapSpec, plan: &SeedPlan, max_events: u64) -> Result<EpochLibrary> {
    require_non_creeping(spec, LadderSide::Descending)?;
    let escape = match classify_regime(spec)?.regime {
        Regime::DriftToPlusInfinity => ESCAPE_LEVEL,
        _ => f64::INFINITY,
    };
    let mut epochs = Vec::new();
    let mut incomplete = Vec::new();
    for i in 0..spec.n() {
        let all = run_replicated(&plan.derive(&format!("epochs-{i}")), |_, rng| descent_epoch(spec, i, escape, max_events, rng))?;
        incomplete.push(all.iter().filter(|e| !e.complete).count() as u64);
        epochs.push(all.into_iter().filter(|e| e.complete).collect());
    }
    Ok(EpochLibrary { epochs, incomplete })
}

/// `(h(x_m, i))` on the grid `x_m = m * step` plus the weights.
struct Table {
    values: Vec<Vec<f64>>,
    weights: Vec<f64>,
    perron_root: f64,
}

fn perron(a: &DMatrix<f64>) -> (Vec<f64>, f64) {
    let n = a.nrows();
    let shifted = a + DMatrix::identity(n, n);
    let mut v = vec![1.0; n];
    let mut root = 1.0;
    for _ in 0..2000 {
        let w: Vec<f64> = (0..n).map(|i| (0..n).map(|j| shifted[(i, j)] * v[j]).sum()).collect();
        let norm = w.iter().cloned().fold(0.0, f64::max);
        root = norm / v.iter().cloned().fold(0.0, f64::max);
        v = w.iter().map(|x| x / norm).collect();
    }
    let min = v.iter().cloned().fold(f64::INFINITY, f64::min);
    (v.iter().map(|x| x / min).collect(), root - 1.0)
}

fn build_table(lib: &EpochLibrary, skip: Option<usize>, step: f64, top: f64) -> Result<Table> {
    let n = lib.epochs.len();
    let bins = (top / step).ceil() as usize + 1;
    // f[b][i * n + l]
    let mut f = vec![vec![0.0; n * n]; bins + 1];
    let mut a = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        let kept: Vec<&DescentEpoch> = lib.epochs[i]
            .iter()
            .enumerate()
            .filter(|(k, _)| Some(k % EPOCH_GROUPS) != skip)
            .map(|(_, e)| e)
            .collect();
        if kept.is_empty() {
            return Err(Error::Empty("no complete ladder epochs".into()));
        }
        let w = 1.0 / kept.len() as f64;
        for e in kept {
            for j in 0..n {
                a[(i, j)] += w * e.above_counts[j] as f64;
            }
            let p = e.depth / step;
            if p.is_finite() && (p.floor() as usize) < bins {
                let b = p.floor() as usize;
                let frac = p - b as f64;
                f[b][i * n + e.state] += w * (1.0 - frac);
                f[b + 1][i * n + e.state] += w * frac;
            }
        }
    }
    let (weights, perron_root) = perron(&a);
    let f0 = DMatrix::from_row_slice(n, n, &f[0]);
    let inv = (DMatrix::<f64>::identity(n, n) - f0)
        .try_inverse()
        .ok_or_else(|| Error::InvalidArgument("degenerate ladder epochs".into()))?;
    let mut v: Vec<DMatrix<f64>> = Vec::with_capacity(bins);
    for m in 0..bins {
        let mut rhs = DMatrix::<f64>::identity(n, n);
        for b in 1..=m {
            let fb = &f[b];
            if fb.iter().all(|&x| x == 0.0) {
                continue;
            }
            let prev = &v[m - b];
            for i in 0..n {
                for l in 0..n {
                    let w = fb[i * n + l];
                    if w != 0.0 {
                        for j in 0..n {
                            rhs[(i, j)] += w * prev[(l, j)];
                        }
                    }
                }
            }
        }
        v.push(&inv * rhs);
    }
    let values = (0..n)
        .map(|i| v.iter().map(|vm| (0..n).map(|j| vm[(i, j)] * weights[j]).sum()).collect())
        .collect();
    Ok(Table {
        values,
        weights,
        perron_root,
    })
}

fn interpolate(values: &[f64], step: f64, x: f64) -> f64 {
    if x < 0.0 {
        return 0.0;
    }
    let p = x / step;
    let last = values.len() - 1;
    let m = (p.floor() as usize).min(last - 1);
    let frac = p - m as f64;
    values[m] + frac * (values[m + 1] - values[m])
}

/// `h(x, i)` on `[0, top]` with jackknife replicates over epoch groups.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HarmonicEstimate {
    pub step: f64,
    pub top: f64,
    /// Ladder-point weights per state, smallest equal to one.
    pub weights: Vec<f64>,
    /// Estimated Perron root of the epoch matrix; 1 in theory.
    pub perron_root: f64,
    /// `values[i][m]` at `x = m * step`.
    pub values: Vec<Vec<f64>>,
    pub standard_errors: Vec<Vec<f64>>,
    #[serde(skip)]
    leave_out: Vec<Vec<Vec<f64>>>,
}

impl HarmonicEstimate {
    pub fn from_library(lib: &EpochLibrary, step: f64, top: f64) -> Result<Self> {
        if !(step > 0.0 && top > step) {
            return Err(Error::InvalidArgument(format!("bad harmonic grid: step {step}, top {top}")));
        }
        let full = build_table(lib, None, step, top)?;
        let leave_out: Vec<Vec<Vec<f64>>> = (0..EPOCH_GROUPS)
            .map(|g| build_table(lib, Some(g), step, top).map(|t| t.values))
            .collect::<Result<_>>()?;
        let g = EPOCH_GROUPS as f64;
        let standard_errors = full
            .values
            .iter()
            .enumerate()
            .map(|(i, row)| {
                (0..row.len())
                    .map(|m| {
                        let mean = leave_out.iter().map(|t| t[i][m]).sum::<f64>() / g;
                        ((g - 1.0) / g * leave_out.iter().map(|t| (t[i][m] - mean).powi(2)).sum::<f64>()).sqrt()
                    })
                    .collect()
            })
            .collect();
        Ok(HarmonicEstimate {
            step,
            top,
            weights: full.weights,
            perron_root: full.perron_root,
            values: full.values,
            standard_errors,
            leave_out,
        })
    }

    pub fn grid(&self) -> Vec<f64> {
        (0..self.values[0].len()).map(|m| m as f64 * self.step).collect()
    }

    /// Linear interpolation, zero below 0, linear extrapolation past `top`.
    pub fn eval(&self, x: f64, i: usize) -> f64 {
        interpolate(&self.values[i], self.step, x)
    }

    /// Same with jackknife replicate `g` left out.
    pub fn eval_leave_out(&self, g: usize, x: f64, i: usize) -> f64 {
        interpolate(&self.leave_out[g][i], self.step, x)
    }
}

/// Moves the walker to time `t`, killing it at the first event where
/// `killed(x)` holds. Returns whether it is still alive.
pub(crate) fn advance_killed<R: Rng + ?Sized>(walker: &mut Walker, t: f64, killed: impl Fn(f64) -> bool, rng: &mut R) -> bool {
    while walker.alive && walker.t < t {
        let step = walker.step(rng, t);
        if step.end == StepEnd::Kill || killed(step.x) {
            walker.alive = false;
        }
    }
    walker.alive
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HarmonicConfig {
    pub step: f64,
    pub epochs_per_state: u64,
    pub epoch_event_cap: u64,
    pub paths: u64,
}

impl Default for HarmonicConfig {
    fn default() -> Self {
        HarmonicConfig {
            step: 0.02,
            epochs_per_state: 100_000,
            epoch_event_cap: 1_000_000,
            paths: 100_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HarmonicRow {
    pub x: f64,
    pub state: usize,
    pub t: f64,
    pub expectation: f64,
    pub target: f64,
    pub survival: f64,
    pub path_se: f64,
    pub ladder_se: f64,
}

impl HarmonicRow {
    pub fn abs_error(&self) -> f64 {
        (self.expectation - self.target).abs()
    }

    pub fn standard_error(&self) -> f64 {
        self.path_se.hypot(self.ladder_se)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HarmonicReport {
    pub estimate: HarmonicEstimate,
    pub rows: Vec<HarmonicRow>,
    /// Largest change of a row statistic under 2x grid refinement, in units
    /// of its SE.
    pub refinement_ratio: f64,
    pub refined: bool,
    pub incomplete_epochs: Vec<u64>,
}

impl HarmonicReport {
    pub fn checks(&self) -> Vec<Check> {
        self.rows
            .iter()
            .map(|r| {
                Check::at_most(
                    format!("harmonic: x = {}, state {}, t = {}", r.x, r.state, r.t),
                    r.abs_error(),
                    4.0 * r.standard_error(),
                )
            })
            .collect()
    }
}

/// `(start, time, end per path)`; `None` marks paths killed below zero.
type PathEnds = ((f64, usize), f64, Vec<Option<(f64, usize)>>);

fn rows_for(h: &HarmonicEstimate, ends: &[PathEnds]) -> Vec<HarmonicRow> {
    let g = EPOCH_GROUPS as f64;
    ends.iter()
        .map(|((x, i), t, vals)| {
            let n = vals.len() as f64;
            let hv: Vec<f64> = vals.iter().map(|v| v.map_or(0.0, |(y, j)| h.eval(y, j))).collect();
            let mean = hv.iter().sum::<f64>() / n;
            let var = hv.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
            let diffs: Vec<f64> = (0..EPOCH_GROUPS)
                .map(|k| {
                    let m = vals.iter().map(|v| v.map_or(0.0, |(y, j)| h.eval_leave_out(k, y, j))).sum::<f64>() / n;
                    m - h.eval_leave_out(k, *x, *i)
                })
                .collect();
            let dm = diffs.iter().sum::<f64>() / g;
            let ladder_var = (g - 1.0) / g * diffs.iter().map(|d| (d - dm).powi(2)).sum::<f64>();
            HarmonicRow {
                x: *x,
                state: *i,
                t: *t,
                expectation: mean,
                target: h.eval(*x, *i),
                survival: vals.iter().filter(|v| v.is_some()).count() as f64 / n,
                path_se: (var / n).sqrt(),
                ladder_se: ladder_var.sqrt(),
            }
        })
        .collect()
}

/// Checks `E^{x,i}[h(xi_t, J_t); t < tau_0^-] = h(x, i)` for every start
/// `x` in `xs`, every state and every `t` in `ts`.
pub fn harmonic_report(spec: &MapSpec, xs: &[f64], ts: &[f64], cfg: &HarmonicConfig, plan: &SeedPlan) -> Result<HarmonicReport> {
    require_non_creeping(spec, LadderSide::Descending)?;
    if classify_regime(spec)?.regime == Regime::Recurrent {
        return Err(Error::Hypothesis("the harmonic function needs a spec that does not drift to minus infinity".into()));
    }
    if xs.iter().any(|&x| !(x >= 0.0)) || ts.iter().any(|&t| !(t >= 0.0)) {
        return Err(Error::InvalidArgument("starts and times must be non-negative".into()));
    }
    let mut sorted_ts = ts.to_vec();
    sorted_ts.sort_by(f64::total_cmp);
    let mut ends = Vec::new();
    let mut top: f64 = xs.iter().cloned().fold(1.0, f64::max);
    for &x in xs {
        for i in 0..spec.n() {
            let sub = plan.derive(&format!("harmonic-{x}-{i}")).with_replicates(cfg.paths);
            let paths = run_replicated(&sub, |_, rng| {
                let mut w = Walker::new(spec, x, i)?;
                Ok(sorted_ts
                    .iter()
                    .map(|&t| advance_killed(&mut w, t, |y| y < 0.0, rng).then_some((w.x, w.state)))
                    .collect::<Vec<_>>())
            })?;
            for (k, &t) in sorted_ts.iter().enumerate() {
                let vals: Vec<Option<(f64, usize)>> = paths.iter().map(|p| p[k]).collect();
                for v in vals.iter().flatten() {
                    top = top.max(v.0);
                }
                ends.push(((x, i), t, vals));
            }
        }
    }
    let lib = sample_epochs(spec, &plan.derive("harmonic-epochs").with_replicates(cfg.epochs_per_state), cfg.epoch_event_cap)?;
    let top = top + 1.0;
    let coarse = HarmonicEstimate::from_library(&lib, cfg.step, top)?;
    let fine = HarmonicEstimate::from_library(&lib, cfg.step / 2.0, top)?;
    let coarse_rows = rows_for(&coarse, &ends);
    let fine_rows = rows_for(&fine, &ends);
    let refinement_ratio = coarse_rows
        .iter()
        .zip(&fine_rows)
        .map(|(a, b)| {
            let d = ((a.expectation - a.target) - (b.expectation - b.target)).abs();
            if d == 0.0 { 0.0 } else { d / a.standard_error() }
        })
        .fold(0.0, f64::max);
    let refined = refinement_ratio >= 1.0;
    let (estimate, rows) = if refined { (fine, fine_rows) } else { (coarse, coarse_rows) };
    Ok(HarmonicReport {
        estimate,
        rows,
        refinement_ratio,
        refined,
        incomplete_epochs: lib.incomplete,
    })
}

//! Markov renewal limits of the ladder potential.

use serde::Serialize;

use super::ladder::{require_non_creeping, run_ladder, LadderRunConfig, LadderSide, Strictness};
use super::potential::{fit_slope, PotentialEstimate};
use crate::engine::{run_replicated, SeedPlan};
use crate::error::{Error, Result};
use crate::model::{check_condition_c, MapSpec};
use crate::report::Check;

pub const RENEWAL_TOLERANCE: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RenewalReport {
    pub side: LadderSide,
    pub grid: Vec<f64>,
    pub condition_holds: bool,
    pub potentials: Vec<PotentialEstimate>,
    /// `slopes[i][j]` over the upper half of the grid.
    pub slopes: Vec<Vec<f64>>,
    /// Largest relative spread across initial states, over target states.
    pub slope_spread: f64,
    /// Smoothed integral at the two largest grid points, per initial state.
    pub smoothed: Vec<(f64, f64)>,
    /// Stationary ladder-state occupation over mean ladder step.
    pub predicted_slopes: Vec<f64>,
    /// Slope of the total potential on the lower and upper halves, per
    /// initial state; used when the limits are degenerate.
    pub half_slopes: Vec<(f64, f64)>,
}

impl RenewalReport {
    pub fn total_slope(&self, i: usize) -> f64 {
        self.slopes[i].iter().sum()
    }

    pub fn checks(&self) -> Vec<Check> {
        if !self.condition_holds {
            let decaying = self.half_slopes.iter().all(|&(lo, hi)| hi < lo);
            return vec![Check::flag("renewal: limits degenerate, slopes decay", decaying)
                .with_detail(format!("{:?}", self.half_slopes))];
        }
        let mut out = vec![Check::at_most("renewal: slope spread across initial states", self.slope_spread, RENEWAL_TOLERANCE)];
        for (i, &(a, b)) in self.smoothed.iter().enumerate() {
            let change = ((b - a) / b).abs();
            out.push(
                Check::at_most(format!("renewal: smoothed integral stabilizes from state {i}"), change, RENEWAL_TOLERANCE)
                    .with_detail(format!("{a:.6} -> {b:.6}")),
            );
        }
        let n = self.predicted_slopes.len();
        for j in 0..n {
            let mean = self.slopes.iter().map(|s| s[j]).sum::<f64>() / self.slopes.len() as f64;
            let pred = self.predicted_slopes[j];
            if pred > 0.0 {
                out.push(Check::at_most(
                    format!("renewal: slope to state {j} vs ladder occupation"),
                    ((mean - pred) / pred).abs(),
                    RENEWAL_TOLERANCE,
                ));
            }
        }
        out
    }
}

fn relative_spread(values: &[f64]) -> f64 {
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    if mean.abs() < 1e-12 {
        0.0
    } else {
        (max - min) / mean.abs()
    }
}

pub fn check_markov_renewal(spec: &MapSpec, side: LadderSide, grid: &[f64], plan: &SeedPlan) -> Result<RenewalReport> {
    if grid.len() < 4 {
        return Err(Error::InvalidArgument("renewal check needs at least four grid points".into()));
    }
    require_non_creeping(spec, side)?;
    let oriented = match side {
        LadderSide::Ascending => spec.clone(),
        LadderSide::Descending => spec.negated(),
    };
    let condition_holds = check_condition_c(&oriented)?.holds;
    let top = *grid.last().unwrap();
    let cfg = LadderRunConfig {
        side,
        strictness: Strictness::Strict,
        max_height: top,
        escape_margin: f64::INFINITY,
        max_events: 10_000_000,
    };
    let n = spec.n();
    let upper: Vec<usize> = (grid.len() / 2..grid.len()).collect();
    let lower: Vec<usize> = (0..=grid.len() / 2).collect();
    let xs = |idx: &[usize]| idx.iter().map(|&g| grid[g]).collect::<Vec<_>>();
    let mut potentials = Vec::new();
    let mut slopes = Vec::new();
    let mut smoothed = Vec::new();
    let mut half_slopes = Vec::new();
    let mut occupation = vec![0u64; n];
    let mut steps = 0.0;
    let mut step_count = 0u64;
    for i in 0..n {
        let runs = run_replicated(&plan.derive(&format!("renewal-{i}")), |_, rng| run_ladder(spec, i, &cfg, rng))?;
        for r in &runs {
            // stationary regime: ladder points in the upper half
            for w in r.points.windows(2) {
                if w[0].0 >= grid[grid.len() / 2] {
                    occupation[w[1].1] += 1;
                    steps += w[1].0 - w[0].0;
                    step_count += 1;
                }
            }
        }
        let u = PotentialEstimate::from_runs(i, n, grid, &runs);
        let per_j: Vec<f64> = (0..n)
            .map(|j| {
                let ys: Vec<f64> = upper.iter().map(|&g| u.value(g, j)).collect();
                fit_slope(&xs(&upper), &ys)
            })
            .collect();
        let total = u.total();
        let pick = |idx: &[usize]| idx.iter().map(|&g| total[g]).collect::<Vec<_>>();
        half_slopes.push((fit_slope(&xs(&lower), &pick(&lower)), fit_slope(&xs(&upper), &pick(&upper))));
        let smooth = |y: f64| {
            u.atoms.iter().filter(|a| a.0 <= y).map(|a| (-(y - a.0)).exp()).sum::<f64>() / u.replicates as f64
        };
        smoothed.push((smooth(grid[grid.len() - 2]), smooth(top)));
        slopes.push(per_j);
        potentials.push(u);
    }
    let slope_spread = (0..n)
        .map(|j| relative_spread(&slopes.iter().map(|s| s[j]).collect::<Vec<_>>()))
        .fold(0.0, f64::max);
    let mean_step = steps / step_count.max(1) as f64;
    let visits: u64 = occupation.iter().sum();
    let predicted_slopes = occupation
        .iter()
        .map(|&c| if visits == 0 { 0.0 } else { c as f64 / visits as f64 / mean_step })
        .collect();
    Ok(RenewalReport {
        side,
        grid: grid.to_vec(),
        condition_holds,
        potentials,
        slopes,
        slope_spread,
        smoothed,
        predicted_slopes,
        half_slopes,
    })
}

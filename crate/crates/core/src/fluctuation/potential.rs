//! Counting potential of the ladder process, estimated from independent
//! ladder runs.

use serde::Serialize;

use super::ladder::{run_ladder, LadderRun, LadderRunConfig};
use crate::engine::{run_replicated, SeedPlan};
use crate::error::{Error, Result};
use crate::model::MapSpec;

/// Per-replicate integer counts merge exactly.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct CountMoments {
    pub sum: u64,
    pub sum_sq: u64,
}

/// `U_{i,j}(x)`: expected number of ladder points of height `<= x` in state
/// `j`, started from state `i`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PotentialEstimate {
    pub init_state: usize,
    pub states: usize,
    pub grid: Vec<f64>,
    /// `counts[g][j]`
    pub counts: Vec<Vec<CountMoments>>,
    pub replicates: u64,
    pub incomplete: u64,
    /// Pooled `(height, state)` atoms, sorted.
    pub atoms: Vec<(f64, usize)>,
}

impl PotentialEstimate {
    fn empty(init_state: usize, states: usize, grid: &[f64]) -> Self {
        PotentialEstimate {
            init_state,
            states,
            grid: grid.to_vec(),
            counts: vec![vec![CountMoments::default(); states]; grid.len()],
            replicates: 0,
            incomplete: 0,
            atoms: Vec::new(),
        }
    }

    pub fn from_runs(init_state: usize, states: usize, grid: &[f64], runs: &[LadderRun]) -> Self {
        let mut est = PotentialEstimate::empty(init_state, states, grid);
        for r in runs {
            est.add_run(&r.points, r.complete);
        }
        est.atoms.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        est
    }

    fn add_run(&mut self, points: &[(f64, usize)], complete: bool) {
        self.replicates += 1;
        if !complete {
            self.incomplete += 1;
        }
        let mut per = vec![0u64; self.states];
        let mut sorted = points.to_vec();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut k = 0;
        for (g, &x) in self.grid.iter().enumerate() {
            while k < sorted.len() && sorted[k].0 <= x {
                per[sorted[k].1] += 1;
                k += 1;
            }
            for j in 0..self.states {
                self.counts[g][j].sum += per[j];
                self.counts[g][j].sum_sq += per[j] * per[j];
            }
        }
        self.atoms.extend_from_slice(points);
    }

    /// Exact merge of two batches over the same grid.
    pub fn merge(&self, other: &PotentialEstimate) -> Result<PotentialEstimate> {
        if self.grid != other.grid || self.states != other.states || self.init_state != other.init_state {
            return Err(Error::InvalidArgument("potential estimates on different grids".into()));
        }
        let mut out = self.clone();
        for (a, b) in out.counts.iter_mut().zip(&other.counts) {
            for (x, y) in a.iter_mut().zip(b) {
                x.sum += y.sum;
                x.sum_sq += y.sum_sq;
            }
        }
        out.replicates += other.replicates;
        out.incomplete += other.incomplete;
        out.atoms.extend_from_slice(&other.atoms);
        out.atoms.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        Ok(out)
    }

    pub fn value(&self, g: usize, j: usize) -> f64 {
        self.counts[g][j].sum as f64 / self.replicates as f64
    }

    pub fn standard_error(&self, g: usize, j: usize) -> f64 {
        let n = self.replicates as f64;
        let m = self.counts[g][j].sum as f64 / n;
        let var = (self.counts[g][j].sum_sq as f64 / n - m * m).max(0.0) * n / (n - 1.0).max(1.0);
        (var / n).sqrt()
    }

    /// `sum_j U_{i,j}(x)` on the grid.
    pub fn total(&self) -> Vec<f64> {
        (0..self.grid.len())
            .map(|g| (0..self.states).map(|j| self.value(g, j)).sum())
            .collect()
    }

    /// `int exp(-lambda x) U_{i,j}(dx)` from the pooled atoms.
    pub fn laplace(&self, lambda: f64, j: usize) -> f64 {
        self.atoms
            .iter()
            .filter(|a| a.1 == j)
            .map(|a| (-lambda * a.0).exp())
            .sum::<f64>()
            / self.replicates as f64
    }

    /// `U_{i,j}(x)` at any `x` from the atoms.
    pub fn at(&self, x: f64, j: usize) -> f64 {
        self.atoms.iter().filter(|a| a.1 == j && a.0 <= x).count() as f64 / self.replicates as f64
    }
}

pub fn estimate_potential(
    spec: &MapSpec,
    init_state: usize,
    grid: &[f64],
    cfg: &LadderRunConfig,
    plan: &SeedPlan,
) -> Result<PotentialEstimate> {
    spec.check_state(init_state)?;
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("grid must be strictly increasing".into()));
    }
    let runs = run_replicated(plan, |_, rng| run_ladder(spec, init_state, cfg, rng))?;
    Ok(PotentialEstimate::from_runs(init_state, spec.n(), grid, &runs))
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fluctuation::ladder::{LadderSide, Strictness};
    use crate::model::{JumpLaw, LevyComponent};

    fn cfg(max_height: f64) -> LadderRunConfig {
        LadderRunConfig {
            side: LadderSide::Ascending,
            strictness: Strictness::Strict,
            max_height,
            escape_margin: 50.0,
            max_events: 1_000_000,
        }
    }

    #[test]
    fn monotone_away_spec_has_unit_potential() {
        let spec = MapSpec::levy(LevyComponent::drift(-1.0).with_jumps(1.0, JumpLaw::exp_down(1.0))).unwrap();
        let u = estimate_potential(&spec, 0, &[0.0, 1.0, 10.0], &cfg(20.0), &SeedPlan::new(1, 100)).unwrap();
        assert_eq!(u.total(), vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn exponential_renewal_slope() {
        let spec = MapSpec::levy(LevyComponent::drift(-0.5).with_jumps(1.0, JumpLaw::exp_up(1.0))).unwrap();
        let grid: Vec<f64> = (0..=45).map(|k| 5.0 + k as f64).collect();
        let u = estimate_potential(&spec, 0, &grid, &cfg(60.0), &SeedPlan::new(2, 2000)).unwrap();
        let total = u.total();
        assert!(total.windows(2).all(|w| w[0] <= w[1]));
        let slope = fit_slope(&grid, &total);
        assert!((slope - 1.0).abs() <= 0.05, "{slope}");
        // U(dx) = delta_0 + dx, so the Laplace transform is 1 + 1/lambda
        assert!((u.laplace(2.0, 0) - 1.5).abs() < 0.05);
    }

    #[test]
    fn batch_merge_equals_pooled() {
        let spec = MapSpec::levy(LevyComponent::drift(-0.5).with_jumps(1.0, JumpLaw::exp_up(1.0))).unwrap();
        let grid = [1.0, 2.0, 4.0];
        let plan = SeedPlan::new(3, 40);
        let pooled = estimate_potential(&spec, 0, &grid, &cfg(5.0), &plan).unwrap();
        let runs = run_replicated(&plan, |_, rng| run_ladder(&spec, 0, &cfg(5.0), rng)).unwrap();
        let mut a = PotentialEstimate::empty(0, 1, &grid);
        let mut b = PotentialEstimate::empty(0, 1, &grid);
        for (k, r) in runs.iter().enumerate() {
            if k < 17 { &mut a } else { &mut b }.add_run(&r.points, r.complete);
        }
        assert_eq!(a.merge(&b).unwrap(), pooled);
    }
}

//! Monte Carlo estimates of `E^{0,i}[e^{z xi_t}; J_t = j]` compared with the
//! matrix exponential, and the increment duality between a spec and its dual.

use num_complex::Complex64;
use serde::Serialize;

use super::path::simulate_path;
use crate::engine::{run_replicated, SeedPlan};
use crate::error::Result;
use crate::model::{dual_spec, stationary_distribution, transform_matrix, MapSpec};
use crate::report::Check;
use crate::stats::ComplexStat;

pub const TRANSFORM_SE_MULTIPLIER: f64 = 4.0;

/// Per start state, one optional `(value, state)` per replicate.
pub type TerminalSample = Vec<Vec<Option<(f64, usize)>>>;

/// Terminal `(xi_t, J_t)` per start state; `None` for killed paths.
pub fn terminal_sample(spec: &MapSpec, t: f64, plan: &SeedPlan) -> Result<TerminalSample> {
    (0..spec.n())
        .map(|i| {
            run_replicated(&plan.derive(&format!("terminal-{i}")), |_, rng| {
                let p = simulate_path(spec, (0.0, i), t, rng)?;
                Ok((!p.is_killed()).then(|| p.terminal()))
            })
        })
        .collect()
}

/// Row `i` holds one accumulator per target state `j`.
pub fn empirical_transform(sample: &[Vec<Option<(f64, usize)>>], z: Complex64) -> Vec<Vec<ComplexStat>> {
    let n = sample.len();
    sample
        .iter()
        .map(|row| {
            let mut acc = vec![ComplexStat::default(); n];
            for r in row {
                for (j, a) in acc.iter_mut().enumerate() {
                    let v = match r {
                        Some((x, k)) if *k == j => (z * x).exp(),
                        _ => Complex64::new(0.0, 0.0),
                    };
                    a.push(v);
                }
            }
            acc
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransformEntry {
    pub z_re: f64,
    pub z_im: f64,
    pub i: usize,
    pub j: usize,
    pub target_re: f64,
    pub target_im: f64,
    pub estimate_re: f64,
    pub estimate_im: f64,
    pub abs_error: f64,
    pub standard_error: f64,
}

impl TransformEntry {
    fn new(z: Complex64, i: usize, j: usize, target: Complex64, estimate: Complex64, se: f64) -> Self {
        TransformEntry {
            z_re: z.re,
            z_im: z.im,
            i,
            j,
            target_re: target.re,
            target_im: target.im,
            estimate_re: estimate.re,
            estimate_im: estimate.im,
            abs_error: (target - estimate).norm(),
            standard_error: se,
        }
    }

    pub fn passed(&self) -> bool {
        self.abs_error <= TRANSFORM_SE_MULTIPLIER * self.standard_error
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransformReport {
    pub label: String,
    pub t: f64,
    pub entries: Vec<TransformEntry>,
}

impl TransformReport {
    /// Worst `abs_error / SE` over entries; entries with zero SE must match
    /// exactly.
    pub fn worst_ratio(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| match e.standard_error {
                s if s > 0.0 => e.abs_error / s,
                _ if e.abs_error <= 1e-12 => 0.0,
                _ => f64::INFINITY,
            })
            .fold(0.0, f64::max)
    }

    pub fn checks(&self) -> Vec<Check> {
        vec![Check::at_most(
            format!("{}: worst error in standard errors", self.label),
            self.worst_ratio(),
            TRANSFORM_SE_MULTIPLIER,
        )
        .with_detail(format!("{} entries, t = {}", self.entries.len(), self.t))]
    }
}

/// Entrywise MC estimate of the transform against `exp(F(z) t)`.
pub fn check_law_consistency(spec: &MapSpec, zs: &[Complex64], t: f64, plan: &SeedPlan) -> Result<TransformReport> {
    let sample = terminal_sample(spec, t, plan)?;
    let mut entries = Vec::new();
    for &z in zs {
        let exact = transform_matrix(spec, z, t)?;
        let est = empirical_transform(&sample, z);
        for (i, row) in est.iter().enumerate() {
            for (j, a) in row.iter().enumerate() {
                entries.push(TransformEntry::new(z, i, j, exact[(i, j)], a.mean(), a.standard_error()));
            }
        }
    }
    Ok(TransformReport {
        label: "law consistency".into(),
        t,
        entries,
    })
}

/// `pi_i hat E^{0,i}[e^{z xi_t}; J_t = j]` against
/// `pi_j E^{0,j}[e^{-z xi_t}; J_t = i]`, from independent ensembles of the
/// dual and the spec.
pub fn check_increment_duality(spec: &MapSpec, zs: &[Complex64], t: f64, plan: &SeedPlan) -> Result<TransformReport> {
    let pi = stationary_distribution(spec.rates())?;
    let dual = dual_spec(spec)?;
    let forward = terminal_sample(spec, t, &plan.derive("forward"))?;
    let backward = terminal_sample(&dual, t, &plan.derive("dual"))?;
    let mut entries = Vec::new();
    for &z in zs {
        let lhs = empirical_transform(&backward, z);
        let rhs = empirical_transform(&forward, -z);
        for i in 0..spec.n() {
            for j in 0..spec.n() {
                let (a, b) = (&lhs[i][j], &rhs[j][i]);
                let se = (pi[i] * a.standard_error()).hypot(pi[j] * b.standard_error());
                entries.push(TransformEntry::new(z, i, j, b.mean() * pi[j], a.mean() * pi[i], se));
            }
        }
    }
    Ok(TransformReport {
        label: "increment duality".into(),
        t,
        entries,
    })
}

//! Splitting at the maximum over an exponential horizon, checked against
//! the analytic resolvent.
//!
//! The post-maximum piece given `J(argmax) = k` is identified through the
//! dual, normalized by `w_k = P^pi(J(argmax) = k)`, which is itself
//! estimated from the dual samples.
//!
//! The forward factor uses the last time at the maximum and the dual factor
//! the first, which is its image under time reversal; the two agree on the
//! argmax state even when the maximum sits at a switch.
//!
//! Killing is handled by simulating without it and weighting each factor
//! by its survival probability up to the argmax, so the two factors carry
//! disjoint stretches of the kill exposure.

use num_complex::Complex64;
use serde::Serialize;

use crate::engine::{run_replicated, SeedPlan};
use crate::error::{Error, Result};
use crate::model::{dual_spec, exponential_resolvent, stationary_distribution, MapSpec};
use crate::report::Check;
use crate::sim::{sample_with_exposure, ArgmaxTie, SplittingSample};

pub const JACKKNIFE_GROUPS: usize = 32;
pub const SE_MULTIPLIER: f64 = 4.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplittingEntry {
    pub z: f64,
    pub i: usize,
    pub j: usize,
    pub analytic: (f64, f64),
    pub product: (f64, f64),
    pub abs_error: f64,
    pub standard_error: f64,
}

impl SplittingEntry {
    pub fn passed(&self) -> bool {
        self.abs_error <= SE_MULTIPLIER * self.standard_error
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplittingReport {
    pub q: f64,
    pub entries: Vec<SplittingEntry>,
    /// Estimated `P^pi(J(argmax) = k)`.
    pub argmax_law: Vec<f64>,
}

impl SplittingReport {
    pub fn checks(&self) -> Vec<Check> {
        self.entries
            .iter()
            .map(|e| {
                Check::at_most(
                    format!("splitting: z = {}, entry ({}, {})", e.z, e.i, e.j),
                    e.abs_error,
                    SE_MULTIPLIER * e.standard_error,
                )
            })
            .collect()
    }
}

/// Sums over one jackknife group: `e^{i z sup}` by argmax state, and counts.
#[derive(Clone)]
struct GroupSums {
    /// `[z][k]`
    transform: Vec<Vec<Complex64>>,
    argmax: Vec<f64>,
    count: f64,
}

impl GroupSums {
    fn new(nz: usize, n: usize) -> Self {
        GroupSums {
            transform: vec![vec![Complex64::new(0.0, 0.0); n]; nz],
            argmax: vec![0.0; n],
            count: 0.0,
        }
    }

    fn add(&mut self, s: &SplittingSample, zs: &[f64], sign: f64) {
        self.count += 1.0;
        let k = s.argmax_state;
        self.argmax[k] += 1.0;
        let survival = (-s.argmax_exposure).exp();
        for (a, &z) in zs.iter().enumerate() {
            self.transform[a][k] += Complex64::new(0.0, sign * z * s.sup).exp() * survival;
        }
    }

    fn accumulate(&mut self, o: &GroupSums, factor: f64) {
        for (a, b) in self.transform.iter_mut().zip(&o.transform) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y * factor;
            }
        }
        for (x, y) in self.argmax.iter_mut().zip(&o.argmax) {
            *x += y * factor;
        }
        self.count += o.count * factor;
    }
}

fn group_sums(
    spec: &MapSpec,
    init: usize,
    q: f64,
    zs: &[f64],
    sign: f64,
    tie: ArgmaxTie,
    plan: &SeedPlan,
) -> Result<Vec<GroupSums>> {
    let kill: Vec<f64> = spec.components().iter().map(|c| c.kill_rate).collect();
    let unkilled = spec.without_killing();
    let samples = run_replicated(plan, |_, rng| sample_with_exposure(&unkilled, (0.0, init), q, &kill, tie, rng))?;
    let n = spec.n();
    let mut groups = vec![GroupSums::new(zs.len(), n); JACKKNIFE_GROUPS];
    for (k, s) in samples.iter().enumerate() {
        groups[k % JACKKNIFE_GROUPS].add(s, zs, sign);
    }
    Ok(groups)
}

fn total_except(groups: &[GroupSums], skip: Option<usize>) -> GroupSums {
    let mut out = GroupSums::new(groups[0].transform.len(), groups[0].argmax.len());
    for (g, s) in groups.iter().enumerate() {
        if Some(g) != skip {
            out.accumulate(s, 1.0);
        }
    }
    out
}

/// `[z][i][j]` factor product from per-state sums.
fn product(spec_sums: &[GroupSums], dual_sums: &[GroupSums], pi: &[f64], nz: usize) -> (Vec<Vec<Vec<Complex64>>>, Vec<f64>) {
    let n = pi.len();
    let w: Vec<f64> = (0..n)
        .map(|k| (0..n).map(|j| pi[j] * dual_sums[j].argmax[k] / dual_sums[j].count).sum())
        .collect();
    let mut out = vec![vec![vec![Complex64::new(0.0, 0.0); n]; n]; nz];
    for a in 0..nz {
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    if w[k] > 0.0 {
                        let up = spec_sums[i].transform[a][k] / spec_sums[i].count;
                        let down = dual_sums[j].transform[a][k] / dual_sums[j].count;
                        acc += up * down * (pi[j] / w[k]);
                    }
                }
                out[a][i][j] = acc;
            }
        }
    }
    (out, w)
}

pub fn verify_wiener_hopf_splitting(spec: &MapSpec, q: f64, zs: &[f64], plan: &SeedPlan) -> Result<SplittingReport> {
    if !(q > 0.0) {
        return Err(Error::InvalidArgument(format!("rate must be positive, got {q}")));
    }
    if plan.replicates < JACKKNIFE_GROUPS as u64 {
        return Err(Error::InvalidArgument(format!("need at least {JACKKNIFE_GROUPS} replicates")));
    }
    let n = spec.n();
    let pi = stationary_distribution(spec.rates())?;
    let dual = dual_spec(spec)?;
    let mut spec_groups = Vec::new();
    let mut dual_groups = Vec::new();
    for i in 0..n {
        spec_groups.push(group_sums(spec, i, q, zs, 1.0, ArgmaxTie::Last, &plan.derive(&format!("split-{i}")))?);
        dual_groups.push(group_sums(&dual, i, q, zs, -1.0, ArgmaxTie::First, &plan.derive(&format!("split-dual-{i}")))?);
    }
    let full_spec: Vec<_> = spec_groups.iter().map(|g| total_except(g, None)).collect();
    let full_dual: Vec<_> = dual_groups.iter().map(|g| total_except(g, None)).collect();
    let (estimate, argmax_law) = product(&full_spec, &full_dual, &pi, zs.len());
    let leave_out: Vec<_> = (0..JACKKNIFE_GROUPS)
        .map(|g| {
            let s: Vec<_> = spec_groups.iter().map(|x| total_except(x, Some(g))).collect();
            let d: Vec<_> = dual_groups.iter().map(|x| total_except(x, Some(g))).collect();
            product(&s, &d, &pi, zs.len()).0
        })
        .collect();
    let m = JACKKNIFE_GROUPS as f64;
    let mut entries = Vec::new();
    for (a, &z) in zs.iter().enumerate() {
        let analytic = exponential_resolvent(spec, Complex64::new(0.0, z), q)?;
        for i in 0..n {
            for j in 0..n {
                let loo: Vec<Complex64> = leave_out.iter().map(|e| e[a][i][j]).collect();
                let mean = loo.iter().sum::<Complex64>() / m;
                let var = (m - 1.0) / m * loo.iter().map(|v| (v - mean).norm_sqr()).sum::<f64>();
                let lhs = analytic[(i, j)];
                let rhs = estimate[a][i][j];
                entries.push(SplittingEntry {
                    z,
                    i,
                    j,
                    analytic: (lhs.re, lhs.im),
                    product: (rhs.re, rhs.im),
                    abs_error: (lhs - rhs).norm(),
                    standard_error: var.sqrt(),
                });
            }
        }
    }
    Ok(SplittingReport { q, entries, argmax_law })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{LevyComponent, RateMatrix};

    #[test]
    fn pure_drift_has_exact_factors() {
        let spec = MapSpec::levy(LevyComponent::drift(1.0)).unwrap();
        let r = verify_wiener_hopf_splitting(&spec, 0.5, &[0.0, 1.0], &SeedPlan::new(1, 20_000)).unwrap();
        assert!(r.checks().iter().all(|c| c.passed), "{:?}", r.entries);
        assert_eq!(r.argmax_law, vec![1.0]);
    }

    #[test]
    fn zero_argument_reduces_to_modulator_resolvent() {
        let spec = MapSpec::new(
            RateMatrix::two_state(1.0, 2.0).unwrap(),
            vec![LevyComponent::brownian(0.5, 1.0), LevyComponent::brownian(-0.25, 1.0)],
        )
        .unwrap();
        let r = verify_wiener_hopf_splitting(&spec, 0.5, &[0.0], &SeedPlan::new(2, 20_000)).unwrap();
        assert!(r.checks().iter().all(|c| c.passed), "{:?}", r.entries);
        for e in &r.entries {
            assert!(e.analytic.1.abs() < 1e-12);
        }
    }

    #[test]
    fn brownian_two_state_agrees() {
        let spec = MapSpec::new(
            RateMatrix::two_state(1.0, 2.0).unwrap(),
            vec![LevyComponent::brownian(0.5, 1.0), LevyComponent::brownian(-0.25, 1.0)],
        )
        .unwrap();
        let r = verify_wiener_hopf_splitting(&spec, 0.5, &[-1.0, 0.5, 2.0], &SeedPlan::new(3, 40_000)).unwrap();
        assert!(r.checks().iter().all(|c| c.passed), "{:#?}", r.entries);
    }
}

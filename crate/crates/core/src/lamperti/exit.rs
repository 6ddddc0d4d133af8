//! Exit times `T_eps = inf{t : |Z_t| >= eps}` and the exit laws `mu_eps`.

use rand::Rng;
use serde::Serialize;

use super::clock::push_pieces;
use super::rssmp::{state_of_sign, ScalingIndex};
use crate::engine::{run_replicated, SeedPlan};
use crate::error::{Error, Result};
use crate::model::MapSpec;
use crate::report::Check;
use crate::sim::{run_to_passage, Direction, PassageOutcome, Segment, Walker};
use crate::stats::{ks_distance, Atom, EmpiricalMeasure, SummaryStat};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExitSample {
    pub eps: f64,
    pub start: f64,
    /// `T_eps` on the self-similar clock.
    pub time: f64,
    /// `Z_{T_eps}`, with `|Z| >= eps`.
    pub value: f64,
    /// Underlying MAP passage time and overshoot over `log eps`.
    pub map_time: f64,
    pub overshoot: f64,
    pub state: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ExitOutcome {
    Exited(ExitSample),
    NoExit { cap: f64 },
    Killed,
}

impl ExitOutcome {
    pub fn exited(self) -> Option<ExitSample> {
        match self {
            ExitOutcome::Exited(s) => Some(s),
            _ => None,
        }
    }

    /// The sample, or an error naming the missing exit.
    pub fn require(self) -> Result<ExitSample> {
        match self {
            ExitOutcome::Exited(s) => Ok(s),
            ExitOutcome::NoExit { cap } => Err(Error::Hypothesis(format!("no exit within MAP time cap {cap}"))),
            ExitOutcome::Killed => Err(Error::Hypothesis("path killed before exit".into())),
        }
    }
}

/// Default MAP time cap for exits of transient specs.
pub const EXIT_CAP: f64 = 1e6;

/// First exit from `(-eps, eps)` started at `0 < |z| < eps`: MAP passage
/// above `log eps`, then the clock along the path up to it.
pub fn first_exit<R: Rng + ?Sized>(
    spec: &MapSpec,
    alpha: ScalingIndex,
    z: f64,
    eps: f64,
    cap: f64,
    rng: &mut R,
) -> Result<ExitOutcome> {
    if !(z.abs() < eps) {
        return Err(Error::InvalidArgument(format!("need 0 < |z| < eps, got z = {z}, eps = {eps}")));
    }
    let state = state_of_sign(spec, z)?;
    let mut walker = Walker::new(spec, z.abs().ln(), state)?;
    let mut segments: Vec<Segment> = Vec::new();
    let outcome = run_to_passage(&mut walker, eps.ln(), Direction::Up, cap, rng, |s| segments.push(*s));
    let p = match outcome {
        PassageOutcome::Passed(p) => p,
        PassageOutcome::NoPassage { cap } => return Ok(ExitOutcome::NoExit { cap }),
        PassageOutcome::Killed { .. } => return Ok(ExitOutcome::Killed),
    };
    let mut phi = 0.0;
    let mut scratch = Vec::new();
    for seg in &segments {
        scratch.clear();
        phi = push_pieces(rng, seg, alpha.value(), phi, &mut scratch);
    }
    let sign = match spec.n() {
        1 => z.signum(),
        _ if p.state == 0 => 1.0,
        _ => -1.0,
    };
    Ok(ExitOutcome::Exited(ExitSample {
        eps,
        start: z,
        time: phi,
        value: sign * eps * p.overshoot.exp(),
        map_time: p.time,
        overshoot: p.overshoot,
        state: p.state,
    }))
}

/// As [`first_exit`], but a start already outside `(-eps, eps)` exits at
/// time zero.
pub fn exit_from<R: Rng + ?Sized>(
    spec: &MapSpec,
    alpha: ScalingIndex,
    z: f64,
    eps: f64,
    cap: f64,
    rng: &mut R,
) -> Result<ExitOutcome> {
    if z.abs() >= eps {
        let state = state_of_sign(spec, z)?;
        return Ok(ExitOutcome::Exited(ExitSample {
            eps,
            start: z,
            time: 0.0,
            value: z,
            map_time: 0.0,
            overshoot: (z.abs() / eps).ln(),
            state,
        }));
    }
    first_exit(spec, alpha, z, eps, cap, rng)
}

/// Geometric start schedule `z_k = z0 2^{-k}`, `k < steps`.
pub fn halving_schedule(z0: f64, steps: usize) -> Vec<f64> {
    (0..steps).map(|k| z0 * 0.5f64.powi(k as i32)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExitScalingRow {
    pub eps: f64,
    pub start: f64,
    pub mean_time: f64,
    pub standard_error: f64,
    /// `E[T_eps] / eps^alpha`
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExitScalingReport {
    pub alpha: f64,
    pub rows: Vec<ExitScalingRow>,
    /// `max ratio / min ratio - 1` over all rows.
    pub ratio_spread: f64,
    pub decreasing: bool,
}

/// Tolerated relative spread of `E[T_eps]/eps^alpha`.
pub const RATIO_SPREAD_TOLERANCE: f64 = 0.2;

impl ExitScalingReport {
    pub fn checks(&self) -> Vec<Check> {
        vec![
            Check::at_most("exit-time ratio spread", self.ratio_spread, RATIO_SPREAD_TOLERANCE),
            Check::flag("exit time decreases with eps", self.decreasing),
        ]
    }
}

/// `E^z[T_eps]` along `eps_schedule` with `z = rho eps`.
pub fn exit_moment_scaling(
    spec: &MapSpec,
    alpha: ScalingIndex,
    eps_schedule: &[f64],
    rho: f64,
    plan: &SeedPlan,
) -> Result<ExitScalingReport> {
    if !(0.0 < rho && rho < 1.0) {
        return Err(Error::InvalidArgument(format!("need 0 < rho < 1, got {rho}")));
    }
    let mut rows = Vec::new();
    for (k, &eps) in eps_schedule.iter().enumerate() {
        let z = rho * eps;
        let sub = plan.derive(&format!("exit-moment-{k}"));
        let times = run_replicated(&sub, |_, rng| {
            first_exit(spec, alpha, z, eps, EXIT_CAP, rng)?.require().map(|s| s.time)
        })?;
        let stat = SummaryStat::from_slice(&times);
        rows.push(ExitScalingRow {
            eps,
            start: z,
            mean_time: stat.mean(),
            standard_error: stat.standard_error(),
            ratio: stat.mean() / eps.powf(alpha.value()),
        });
    }
    let (lo, hi) = rows
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), r| (lo.min(r.ratio), hi.max(r.ratio)));
    let mut order: Vec<&ExitScalingRow> = rows.iter().collect();
    order.sort_by(|a, b| b.eps.total_cmp(&a.eps));
    let decreasing = order.windows(2).all(|w| w[1].mean_time < w[0].mean_time);
    Ok(ExitScalingReport {
        alpha: alpha.value(),
        ratio_spread: hi / lo - 1.0,
        rows,
        decreasing,
    })
}

fn exit_measure(samples: &[ExitSample]) -> Result<EmpiricalMeasure> {
    EmpiricalMeasure::new(
        samples
            .iter()
            .map(|s| Atom {
                value: s.value,
                state: s.state,
                weight: 1.0,
            })
            .collect(),
    )
}

/// KS tolerance for two-sample tests at `n = 10^4`.
pub const KS_TOLERANCE: f64 = 0.03;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MuEpsReport {
    pub eps: f64,
    pub starts: Vec<f64>,
    /// Law of `Z_{T_eps}` per start.
    pub laws: Vec<EmpiricalMeasure>,
    /// KS distance between consecutive starts.
    pub ks_consecutive: Vec<f64>,
}

impl MuEpsReport {
    /// Estimate from the smallest start.
    pub fn mu_hat(&self) -> &EmpiricalMeasure {
        self.laws.last().expect("schedule is non-empty")
    }

    pub fn stabilized(&self) -> bool {
        self.ks_consecutive.last().is_some_and(|&d| d <= KS_TOLERANCE)
    }

    pub fn checks(&self) -> Vec<Check> {
        vec![Check::at_most(
            format!("exit law stabilizes at eps={}", self.eps),
            self.ks_consecutive.last().copied().unwrap_or(f64::NAN),
            KS_TOLERANCE,
        )]
    }
}

/// Law of `Z_{T_eps}` for each start in `starts` (all with `|z| < eps`).
pub fn estimate_mu_eps(
    spec: &MapSpec,
    alpha: ScalingIndex,
    eps: f64,
    starts: &[f64],
    plan: &SeedPlan,
) -> Result<MuEpsReport> {
    if starts.is_empty() {
        return Err(Error::InvalidArgument("empty start schedule".into()));
    }
    let mut laws = Vec::new();
    for (k, &z) in starts.iter().enumerate() {
        let sub = plan.derive(&format!("mu-eps-{k}"));
        let samples = run_replicated(&sub, |_, rng| first_exit(spec, alpha, z, eps, EXIT_CAP, rng)?.require())?;
        laws.push(exit_measure(&samples)?);
    }
    let ks_consecutive = laws
        .windows(2)
        .map(|w| ks_distance(&w[0], &w[1]))
        .collect::<Result<Vec<_>>>()?;
    Ok(MuEpsReport {
        eps,
        starts: starts.to_vec(),
        laws,
        ks_consecutive,
    })
}

/// Law of `Z_{T_{eps'}}` when started from atoms drawn uniformly from `start_law`.
pub fn exit_law_from(
    spec: &MapSpec,
    alpha: ScalingIndex,
    start_law: &EmpiricalMeasure,
    eps_prime: f64,
    plan: &SeedPlan,
) -> Result<EmpiricalMeasure> {
    let atoms = start_law.atoms();
    if atoms.is_empty() {
        return Err(Error::Empty("start law".into()));
    }
    let samples = run_replicated(plan, |_, rng| {
        let z = atoms[rng.random_range(0..atoms.len())].value;
        exit_from(spec, alpha, z, eps_prime, EXIT_CAP, rng)?.require()
    })?;
    exit_measure(&samples)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsistencyReport {
    pub eps: f64,
    pub eps_prime: f64,
    pub ks: f64,
}

impl ConsistencyReport {
    pub fn checks(&self) -> Vec<Check> {
        vec![Check::at_most(
            format!("exit law consistency {} -> {}", self.eps, self.eps_prime),
            self.ks,
            KS_TOLERANCE,
        )]
    }
}

/// Runs from `mu_eps` to `T_{eps'}` and compares with the direct estimate
/// of `mu_{eps'}`.
pub fn check_mu_consistency(
    spec: &MapSpec,
    alpha: ScalingIndex,
    mu_eps: &MuEpsReport,
    mu_eps_prime: &MuEpsReport,
    plan: &SeedPlan,
) -> Result<ConsistencyReport> {
    let carried = exit_law_from(spec, alpha, mu_eps.mu_hat(), mu_eps_prime.eps, plan)?;
    Ok(ConsistencyReport {
        eps: mu_eps.eps,
        eps_prime: mu_eps_prime.eps,
        ks: ks_distance(&carried, mu_eps_prime.mu_hat())?,
    })
}

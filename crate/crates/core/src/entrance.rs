//! Approximate entrance from the origin.
//!
//! The process is started at `sign(j) eps e^O`, where `(O, j)` is drawn from
//! the stationary overshoot law of the MAP estimated at a high level. For
//! oscillating specs the path is cut at the first exit from `(-1, 1)` and
//! continued from an independent draw of the exit law there.

use rand::Rng;
use serde::Serialize;

use crate::engine::{run_replicated, SeedPlan};
use crate::error::{Error, Result};
use crate::fluctuation::estimate_stationary_overshoot;
use crate::lamperti::{
    estimate_mu_eps, exit_from, exit_moment_scaling, first_exit, simulate_rssmp, RssmpPath, ScalingIndex, EXIT_CAP,
};
use crate::model::{check_condition_c, classify_regime, MapSpec, Regime};
use crate::report::Check;
use crate::stats::{ks_distance, Atom, EmpiricalMeasure};

/// KS tolerance for the entrance diagnostics at `n = 10^4`.
pub const ENTRANCE_KS_TOLERANCE: f64 = 0.03;
/// Exit level at which oscillating paths are cut and restarted.
pub const CONCATENATION_LEVEL: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TimeOrigin {
    /// The entrance happens at time zero.
    ZeroOffset,
    /// The entrance time is drawn from the exit-time law at `eps / 100`.
    EmpiricalOffset,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntranceConfig {
    pub eps: f64,
    pub origin: TimeOrigin,
    /// MAP level at which the overshoot law is estimated.
    pub overshoot_level: f64,
    pub overshoot_samples: u64,
    /// Samples of the exit law at the concatenation level, and of the
    /// offset law.
    pub auxiliary_samples: u64,
}

impl EntranceConfig {
    pub fn new(eps: f64) -> Self {
        EntranceConfig {
            eps,
            origin: TimeOrigin::ZeroOffset,
            overshoot_level: 20.0,
            overshoot_samples: 10_000,
            auxiliary_samples: 10_000,
        }
    }
}

/// One sampled path from the origin, possibly glued from two pieces.
#[derive(Debug, Clone, PartialEq)]
pub struct EntrancePath {
    /// Time at which the path is placed at `entrance_value`.
    pub entrance_time: f64,
    pub entrance_value: f64,
    /// `(start time, path)`; each piece is used until the next one starts.
    pub pieces: Vec<(f64, RssmpPath)>,
}

impl EntrancePath {
    /// `Z_t`; `None` before the entrance or beyond the simulated stretch.
    pub fn value_at(&self, t: f64) -> Option<f64> {
        if t < self.entrance_time {
            return None;
        }
        let k = self.pieces.partition_point(|p| p.0 <= t).checked_sub(1)?;
        let (start, path) = &self.pieces[k];
        path.value_at(t - start)
    }

    /// First `(time, value)` with `|Z| >= level` after the entrance.
    pub fn first_exit(&self, level: f64) -> Option<(f64, f64)> {
        for (k, (start, path)) in self.pieces.iter().enumerate() {
            if let Some((t, z)) = path.first_exit_scan(level) {
                let end = self.pieces.get(k + 1).map_or(f64::INFINITY, |p| p.0);
                if start + t < end {
                    return Some((start + t, z));
                }
            }
        }
        None
    }

    /// Values at every recorded event time, in time order.
    pub fn recorded(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        for (k, (start, path)) in self.pieces.iter().enumerate() {
            let end = self.pieces.get(k + 1).map_or(f64::INFINITY, |p| p.0);
            out.extend(path.events.iter().map(|e| (start + e.t, e.z)).filter(|&(t, _)| t < end));
        }
        out
    }

    /// CSV with header `t,Z`, one row per recorded event.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,Z\n");
        for (t, z) in self.recorded() {
            s.push_str(&format!("{t:.12e},{z:.12e}\n"));
        }
        s
    }
}

fn draw<R: Rng + ?Sized>(law: &EmpiricalMeasure, rng: &mut R) -> Atom {
    let atoms = law.atoms();
    atoms[rng.random_range(0..atoms.len())]
}

/// Sampler for the process issued from the origin.
#[derive(Debug, Clone)]
pub struct EntranceSampler {
    pub spec: MapSpec,
    pub alpha: ScalingIndex,
    pub config: EntranceConfig,
    pub regime: Regime,
    /// `(overshoot, state)` law.
    pub overshoot_law: EmpiricalMeasure,
    /// Exit law at the concatenation level, for oscillating specs.
    pub restart_law: Option<EmpiricalMeasure>,
    /// Restart draws that hit the MAP time cap before exiting.
    pub restart_dropped: u64,
    pub offsets: Option<Vec<f64>>,
}

impl EntranceSampler {
    /// Refuses with [`Error::ConditionFails`] when the stationary overshoot
    /// does not exist.
    pub fn new(spec: &MapSpec, alpha: ScalingIndex, config: EntranceConfig, plan: &SeedPlan) -> Result<Self> {
        if !(config.eps > 0.0) {
            return Err(Error::InvalidArgument(format!("entrance resolution must be positive, got {}", config.eps)));
        }
        if spec.n() > 2 {
            return Err(Error::InvalidSpec(format!("sign modulation needs one or two states, spec has {}", spec.n())));
        }
        if !check_condition_c(spec)?.holds {
            return Err(Error::ConditionFails);
        }
        let regime = classify_regime(spec).map(|r| r.regime).unwrap_or(Regime::DriftToPlusInfinity);
        if regime == Regime::Oscillating && !(config.eps < CONCATENATION_LEVEL) {
            return Err(Error::InvalidArgument("oscillating entrance needs eps < 1".into()));
        }
        let report = estimate_stationary_overshoot(
            spec,
            &[config.overshoot_level],
            EXIT_CAP,
            &plan.derive("entrance-overshoot").with_replicates(config.overshoot_samples),
        )?;
        let overshoot_law = report.levels[0]
            .pooled()
            .ok_or_else(|| Error::Empty("no passage over the overshoot level".into()))?;
        let mut sampler = EntranceSampler {
            spec: spec.clone(),
            alpha,
            config,
            regime,
            overshoot_law,
            restart_law: None,
            restart_dropped: 0,
            offsets: None,
        };
        let aux = plan.derive("entrance-restart").with_replicates(config.auxiliary_samples);
        if regime == Regime::Oscillating {
            // exit times have a square-root tail here; capped runs are dropped
            let exits = run_replicated(&aux, |_, rng| {
                let z = sampler.entrance_value(rng);
                Ok(exit_from(spec, alpha, z, CONCATENATION_LEVEL, EXIT_CAP, rng)?.exited())
            })?;
            sampler.restart_dropped = exits.iter().filter(|e| e.is_none()).count() as u64;
            sampler.restart_law = Some(EmpiricalMeasure::new(
                exits.iter().flatten().map(|e| Atom { value: e.value, state: e.state, weight: 1.0 }).collect(),
            )?);
        }
        if config.origin == TimeOrigin::EmpiricalOffset {
            let small = config.eps / 100.0;
            let aux = plan.derive("entrance-offset").with_replicates(config.auxiliary_samples);
            sampler.offsets = Some(run_replicated(&aux, |_, rng| {
                first_exit(spec, alpha, small, config.eps, EXIT_CAP, rng)?.require().map(|e| e.time)
            })?);
        }
        Ok(sampler)
    }

    fn sign_of(&self, state: usize) -> f64 {
        if state == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// `sign(j) eps e^O` for a fresh draw of `(O, j)`.
    pub fn entrance_value<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let a = draw(&self.overshoot_law, rng);
        self.sign_of(a.state) * self.config.eps * a.value.exp()
    }

    pub fn sample<R: Rng + ?Sized>(&self, horizon: f64, rng: &mut R) -> Result<EntrancePath> {
        let entrance_time = match &self.offsets {
            Some(v) => v[rng.random_range(0..v.len())],
            None => 0.0,
        };
        let z = self.entrance_value(rng);
        let span = (horizon - entrance_time).max(f64::MIN_POSITIVE);
        let first = simulate_rssmp(&self.spec, self.alpha, z, span, rng)?;
        let mut pieces = vec![(entrance_time, first)];
        if let Some(restart) = &self.restart_law {
            if let Some((t1, _)) = pieces[0].1.first_exit_scan(CONCATENATION_LEVEL) {
                if entrance_time + t1 < horizon {
                    let z1 = draw(restart, rng).value;
                    let rest = simulate_rssmp(&self.spec, self.alpha, z1, horizon - entrance_time - t1, rng)?;
                    pieces.push((entrance_time + t1, rest));
                }
            }
        }
        Ok(EntrancePath {
            entrance_time,
            entrance_value: z,
            pieces,
        })
    }
}

pub fn sample_entrance(
    spec: &MapSpec,
    alpha: ScalingIndex,
    config: EntranceConfig,
    horizon: f64,
    plan: &SeedPlan,
) -> Result<Vec<EntrancePath>> {
    let sampler = EntranceSampler::new(spec, alpha, config, &plan.derive("entrance-setup"))?;
    run_replicated(&plan.derive("entrance-paths"), |_, rng| sampler.sample(horizon, rng))
}

/// Law of `Z_t` over an ensemble; paths without a value at `t` are skipped.
pub fn marginal(paths: &[EntrancePath], t: f64) -> Result<EmpiricalMeasure> {
    EmpiricalMeasure::from_values(paths.iter().filter_map(|p| p.value_at(t)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub eps: f64,
    pub exit_ratio_spread: f64,
    pub exit_decreasing: bool,
    pub exit_law_ks: f64,
    pub zero_visits: u64,
    pub halving_ks: Vec<(f64, f64)>,
    pub post_exit_level: f64,
    pub post_exit_ks: f64,
    pub post_exit_shifted_ks: f64,
}

impl ConvergenceReport {
    pub fn checks(&self) -> Vec<Check> {
        let mut out = vec![
            Check::at_most("entrance: exit-time ratio spread", self.exit_ratio_spread, crate::lamperti::exit::RATIO_SPREAD_TOLERANCE),
            Check::flag("entrance: exit time decreases with eps", self.exit_decreasing),
            Check::at_most("entrance: exit law stabilizes as the start shrinks", self.exit_law_ks, ENTRANCE_KS_TOLERANCE),
            Check::flag("entrance: no visits to zero after the start", self.zero_visits == 0),
        ];
        for &(t, d) in &self.halving_ks {
            out.push(Check::at_most(format!("entrance: eps-halving at t = {t}"), d, ENTRANCE_KS_TOLERANCE));
        }
        out.push(Check::at_most(
            format!("entrance: exit value at {} against direct exit law", self.post_exit_level),
            self.post_exit_ks,
            ENTRANCE_KS_TOLERANCE,
        ));
        out.push(Check::at_most(
            format!("entrance: path one time unit after exit at {}", self.post_exit_level),
            self.post_exit_shifted_ks,
            ENTRANCE_KS_TOLERANCE,
        ));
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceConfig {
    pub eps: f64,
    pub exit_eps_schedule: Vec<f64>,
    pub times: Vec<f64>,
    /// Level `eps' > eps` for the post-exit comparison.
    pub post_exit_level: f64,
    pub samples: u64,
}

/// Exit-time scaling, exit-law stabilization, no return to zero, stability
/// under halving `eps`, and the law after the first exit at a larger level.
pub fn convergence_report(
    spec: &MapSpec,
    alpha: ScalingIndex,
    cfg: &ConvergenceConfig,
    plan: &SeedPlan,
) -> Result<ConvergenceReport> {
    let n = cfg.samples;
    let scaling = exit_moment_scaling(spec, alpha, &cfg.exit_eps_schedule, 0.5, &plan.derive("conv-exit").with_replicates(n))?;
    let lead = cfg.post_exit_level;
    let starts = [lead / 100.0, lead / 200.0];
    let mu = estimate_mu_eps(spec, alpha, lead, &starts, &plan.derive("conv-mu").with_replicates(n))?;

    let horizon = cfg.times.iter().cloned().fold(0.0, f64::max);
    let mut base = EntranceConfig::new(cfg.eps);
    base.overshoot_samples = 2 * n;
    let full = sample_entrance(spec, alpha, base, horizon, &plan.derive("conv-eps").with_replicates(n))?;
    let mut halved_cfg = base;
    halved_cfg.eps = cfg.eps / 2.0;
    let halved = sample_entrance(spec, alpha, halved_cfg, horizon, &plan.derive("conv-half").with_replicates(n))?;

    let zero_visits = full
        .iter()
        .chain(&halved)
        .flat_map(|p| p.recorded())
        .filter(|&(t, z)| t > 0.0 && z == 0.0)
        .count() as u64;
    let halving_ks = cfg
        .times
        .iter()
        .map(|&t| Ok((t, ks_distance(&marginal(&full, t)?, &marginal(&halved, t)?)?)))
        .collect::<Result<Vec<_>>>()?;

    // exit at eps' along long enough paths, and one time unit later
    let sampler = EntranceSampler::new(spec, alpha, base, &plan.derive("conv-post-setup"))?;
    let rows = run_replicated(&plan.derive("conv-post").with_replicates(n), |_, rng| {
        let mut h = 4.0 * horizon.max(1.0);
        loop {
            let p = sampler.sample(h, rng)?;
            if let Some((t, z)) = p.first_exit(lead) {
                if let Some(later) = p.value_at(t + 1.0) {
                    return Ok((z, later));
                }
            }
            h *= 4.0;
            if h > 1e6 {
                return Err(Error::Hypothesis(format!("no exit at {lead} within the horizon")));
            }
        }
    })?;
    let exits = EmpiricalMeasure::from_values(rows.iter().map(|r| r.0))?;
    let later = EmpiricalMeasure::from_values(rows.iter().map(|r| r.1))?;
    let direct_later = run_replicated(&plan.derive("conv-direct").with_replicates(n), |_, rng| {
        let z = draw(mu.mu_hat(), rng).value;
        let path = simulate_rssmp(spec, alpha, z, 1.0, rng)?;
        path.value_at(1.0).ok_or_else(|| Error::Hypothesis("direct continuation stopped early".into()))
    })?;
    let direct_later = EmpiricalMeasure::from_values(direct_later)?;
    let direct_exit = EmpiricalMeasure::from_values(mu.mu_hat().atoms().iter().map(|a| a.value))?;

    Ok(ConvergenceReport {
        eps: cfg.eps,
        exit_ratio_spread: scaling.ratio_spread,
        exit_decreasing: scaling.decreasing,
        exit_law_ks: mu.ks_consecutive.last().copied().unwrap_or(f64::NAN),
        zero_visits,
        halving_ks,
        post_exit_level: lead,
        post_exit_ks: ks_distance(&exits, &direct_exit)?,
        post_exit_shifted_ks: ks_distance(&later, &direct_later)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NecessityReport {
    pub eps: f64,
    pub bound: f64,
    pub starts: Vec<f64>,
    /// `P^z(|Z_{T_eps}| < bound)` per start.
    pub probabilities: Vec<f64>,
    /// True when the stationary overshoot exists and the witness says nothing.
    pub vacuous: bool,
}

impl NecessityReport {
    pub fn decays(&self) -> bool {
        match (self.probabilities.first(), self.probabilities.last()) {
            (Some(&a), Some(&b)) => b <= 0.5 * a,
            _ => false,
        }
    }

    pub fn checks(&self) -> Vec<Check> {
        let (a, b) = (self.probabilities[0], *self.probabilities.last().unwrap());
        vec![Check::at_most("necessity: last-step probability over first", if a > 0.0 { b / a } else { f64::INFINITY }, 0.5)
            .with_detail(format!("{:?}{}", self.probabilities, if self.vacuous { " (condition holds: vacuous)" } else { "" }))]
    }
}

/// `P^z(|Z_{T_eps}| < bound)` along a schedule of starts shrinking to zero.
pub fn necessity_witness(
    spec: &MapSpec,
    alpha: ScalingIndex,
    eps: f64,
    bound: f64,
    starts: &[f64],
    plan: &SeedPlan,
) -> Result<NecessityReport> {
    if starts.is_empty() || starts.iter().any(|z| !(z.abs() < eps)) {
        return Err(Error::InvalidArgument("starts must satisfy 0 < |z| < eps".into()));
    }
    let vacuous = check_condition_c(spec)?.holds;
    let mut probabilities = Vec::new();
    for (k, &z) in starts.iter().enumerate() {
        let inside = run_replicated(&plan.derive(&format!("necessity-{k}")), |_, rng| {
            Ok(first_exit(spec, alpha, z, eps, EXIT_CAP, rng)?
                .exited()
                .is_some_and(|e| e.value.abs() < bound))
        })?;
        probabilities.push(inside.iter().filter(|&&b| b).count() as f64 / inside.len() as f64);
    }
    Ok(NecessityReport {
        eps,
        bound,
        starts: starts.to_vec(),
        probabilities,
        vacuous,
    })
}

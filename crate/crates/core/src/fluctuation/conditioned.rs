//! The MAP conditioned to stay negative, sampled by sequential importance
//! resampling of the process killed on entering the positive half-line.

use serde::Serialize;

use super::harmonic::{advance_killed, sample_epochs, HarmonicEstimate};
use super::ladder::{require_non_creeping, LadderSide};
use crate::engine::{run_replicated, SeedPlan};
use crate::error::{Error, Result};
use crate::model::{classify_regime, MapSpec, Regime};
use crate::report::Check;
use crate::sim::Walker;
use crate::stats::{Atom, EmpiricalMeasure};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConditionedConfig {
    pub particles: u64,
    pub checkpoints_per_unit: u32,
    /// Resample when the effective sample size drops below this fraction.
    pub ess_fraction: f64,
    pub harmonic_step: f64,
    pub harmonic_top: f64,
    pub epochs_per_state: u64,
    pub epoch_event_cap: u64,
}

impl Default for ConditionedConfig {
    fn default() -> Self {
        ConditionedConfig {
            particles: 10_000,
            checkpoints_per_unit: 16,
            ess_fraction: 0.5,
            harmonic_step: 0.02,
            harmonic_top: 60.0,
            epochs_per_state: 50_000,
            epoch_event_cap: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionedEnsemble {
    pub horizon: f64,
    /// Weighted `(value, state)` law.
    pub law: EmpiricalMeasure,
    pub effective_size: f64,
}

impl ConditionedEnsemble {
    pub fn fraction_below(&self, level: f64) -> f64 {
        self.law
            .atoms()
            .iter()
            .filter(|a| a.value < level)
            .map(|a| a.weight)
            .sum::<f64>()
            / self.law.total_weight()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionedReport {
    pub start: (f64, usize),
    pub ensembles: Vec<ConditionedEnsemble>,
    pub resamplings: u32,
    /// `(K, fractions below -K per horizon)`
    pub fractions: Vec<(f64, Vec<f64>)>,
}

impl ConditionedReport {
    pub fn checks(&self) -> Vec<Check> {
        self.fractions
            .iter()
            .map(|(k, f)| {
                Check::flag(format!("conditioned: fraction below -{k} increasing in horizon"), f.windows(2).all(|w| w[1] > w[0]))
                    .with_detail(format!("{f:?}"))
            })
            .collect()
    }

    pub fn means(&self) -> Vec<f64> {
        self.ensembles.iter().map(|e| e.law.mean()).collect()
    }
}

#[derive(Debug, Clone, Copy)]
struct Particle {
    x: f64,
    state: usize,
    weight: f64,
}

fn effective_size(ps: &[Particle]) -> f64 {
    let s: f64 = ps.iter().map(|p| p.weight).sum();
    let s2: f64 = ps.iter().map(|p| p.weight * p.weight).sum();
    if s2 == 0.0 {
        0.0
    } else {
        s * s / s2
    }
}

fn systematic_resample(ps: &[Particle], u: f64) -> Vec<Particle> {
    let n = ps.len();
    let total: f64 = ps.iter().map(|p| p.weight).sum();
    let mean = total / n as f64;
    let mut out = Vec::with_capacity(n);
    let mut acc = 0.0;
    let mut k = 0;
    for p in ps {
        acc += p.weight / total * n as f64;
        while (k as f64 + u) < acc && out.len() < n {
            out.push(Particle { weight: mean, ..*p });
            k += 1;
        }
    }
    while out.len() < n {
        let last = *ps.iter().rev().find(|p| p.weight > 0.0).unwrap_or(&ps[n - 1]);
        out.push(Particle { weight: mean, ..last });
    }
    out
}

/// Weighted ensembles of the conditioned process at each horizon, started
/// from `x < 0`.
pub fn conditioned_sampler(
    spec: &MapSpec,
    start: (f64, usize),
    horizons: &[f64],
    levels: &[f64],
    cfg: &ConditionedConfig,
    plan: &SeedPlan,
) -> Result<ConditionedReport> {
    let (x, i) = start;
    spec.check_state(i)?;
    if !(x < 0.0) {
        return Err(Error::InvalidArgument(format!("conditioned start must be negative, got {x}")));
    }
    if horizons.is_empty() || horizons.iter().any(|&h| !(h > 0.0)) {
        return Err(Error::InvalidArgument("horizons must be positive".into()));
    }
    require_non_creeping(spec, LadderSide::Ascending)?;
    let mirrored = spec.negated();
    if classify_regime(&mirrored)?.regime == Regime::Recurrent {
        return Err(Error::Hypothesis("conditioning to stay negative needs a spec that does not drift to plus infinity".into()));
    }
    let lib = sample_epochs(&mirrored, &plan.derive("conditioned-epochs").with_replicates(cfg.epochs_per_state), cfg.epoch_event_cap)?;
    let h = HarmonicEstimate::from_library(&lib, cfg.harmonic_step, cfg.harmonic_top)?;
    let harmonic = |y: f64, j: usize| h.eval(-y, j);

    let mut sorted = horizons.to_vec();
    sorted.sort_by(f64::total_cmp);
    let end = *sorted.last().unwrap();
    let dt = 1.0 / cfg.checkpoints_per_unit as f64;
    let mut times: Vec<f64> = (1..).map(|k| k as f64 * dt).take_while(|&t| t < end - 1e-12).collect();
    times.extend(sorted.iter().cloned());
    times.sort_by(f64::total_cmp);
    times.dedup_by(|a, b| (*a - *b).abs() < 1e-12);

    let mut particles = vec![Particle { x, state: i, weight: 1.0 }; cfg.particles as usize];
    let mut ensembles = Vec::new();
    let mut resamplings = 0;
    let mut now = 0.0;
    for (c, &t) in times.iter().enumerate() {
        let sub = plan.derive(&format!("conditioned-step-{c}")).with_replicates(cfg.particles);
        let current = &particles;
        let span = t - now;
        particles = run_replicated(&sub, |k, rng| {
            let p = current[k as usize];
            if p.weight == 0.0 {
                return Ok(p);
            }
            let mut w = Walker::new(spec, p.x, p.state)?;
            if !advance_killed(&mut w, span, |y| y > 0.0, rng) {
                return Ok(Particle { weight: 0.0, ..p });
            }
            let ratio = harmonic(w.x, w.state) / harmonic(p.x, p.state);
            Ok(Particle {
                x: w.x,
                state: w.state,
                weight: p.weight * ratio,
            })
        })?;
        now = t;
        if c == 0 && particles.iter().all(|p| p.weight == 0.0) {
            return Err(Error::AllKilled);
        }
        if sorted.iter().any(|&hz| (hz - t).abs() < 1e-12) {
            let atoms = particles
                .iter()
                .filter(|p| p.weight > 0.0)
                .map(|p| Atom {
                    value: p.x,
                    state: p.state,
                    weight: p.weight,
                })
                .collect();
            ensembles.push(ConditionedEnsemble {
                horizon: t,
                law: EmpiricalMeasure::new(atoms)?,
                effective_size: effective_size(&particles),
            });
        }
        if effective_size(&particles) < cfg.ess_fraction * cfg.particles as f64 {
            let u: f64 = rand::Rng::random(&mut plan.derive(&format!("conditioned-resample-{c}")).stream(0));
            particles = systematic_resample(&particles, u);
            resamplings += 1;
        }
    }
    let fractions = levels
        .iter()
        .map(|&k| (k, ensembles.iter().map(|e| e.fraction_below(-k)).collect()))
        .collect();
    Ok(ConditionedReport {
        start,
        ensembles,
        resamplings,
        fractions,
    })
}

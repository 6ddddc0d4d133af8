//! The acceptance suite: one function per criterion, each returning checks
//! with pinned tolerances, and a writer for the verify-all artifacts.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Serialize;

use crate::engine::SeedPlan;
use crate::entrance::{convergence_report, necessity_witness, ConvergenceConfig};
use crate::error::Result;
use crate::fixtures;
use crate::fluctuation::{
    check_markov_renewal, conditioned_sampler, estimate_stationary_overshoot, harmonic_report, verify_occupation_formula,
    verify_wiener_hopf_splitting, ConditionedConfig, HarmonicConfig, LadderSide, TestFunction, OVERSHOOT_KS_TOLERANCE,
    RENEWAL_TOLERANCE,
};
use crate::lamperti::{
    check_mu_consistency, check_scaling, estimate_mu_eps, exit_moment_scaling, halving_schedule, simulate_rssmp, ScalingIndex,
    EXIT_CAP,
};
use crate::model::{check_condition_c, matrix_exponent};
use crate::report::{checks_table, num, Check, Table};
use crate::sim::{check_increment_duality, check_law_consistency};
use crate::stats::ks_distance;

pub const CRITERIA: u8 = 16;

/// Master seed and a multiplier on every replicate count. `scale = 1`
/// runs the pinned sample sizes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerifyConfig {
    pub seed: u64,
    pub scale: f64,
}

impl VerifyConfig {
    pub fn new(seed: u64) -> Self {
        VerifyConfig { seed, scale: 1.0 }
    }

    fn n(&self, full: u64) -> u64 {
        ((full as f64 * self.scale).round() as u64).max(64)
    }

    fn plan(&self, id: u8, full: u64) -> SeedPlan {
        SeedPlan::new(self.seed, self.n(full)).derive(&format!("criterion-{id}"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub title: &'static str,
    pub checks: Vec<Check>,
}

impl CriterionResult {
    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.passed)
    }

    /// One line: id, verdict, title and the failing checks, if any.
    pub fn line(&self) -> String {
        let failing: Vec<String> = self
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| format!("{} = {} (tol {})", c.name, num(c.statistic), num(c.tolerance)))
            .collect();
        let mut s = format!("criterion {:>2} {}: {}", self.id, if self.passed() { "PASS" } else { "FAIL" }, self.title);
        if !failing.is_empty() {
            s.push_str(&format!(" [{}]", failing.join("; ")));
        }
        s
    }
}

pub fn title(id: u8) -> &'static str {
    match id {
        1 => "matrix exponent at zero equals the rate matrix",
        2 => "transform matrix against Monte Carlo",
        3 => "increment duality",
        4 => "stationary overshoot of the exponential-jump spec",
        5 => "deterministic self-similar path",
        6 => "exit-time scaling",
        7 => "exit-law consistency",
        8 => "self-similarity on the Brownian two-state spec",
        9 => "splitting at the maximum",
        10 => "Markov renewal slopes",
        11 => "harmonic martingale",
        12 => "stationary-overshoot condition classification",
        13 => "entrance stability and necessity witness",
        14 => "conditioned sampler trend",
        15 => "occupation formula",
        16 => "verify-all determinism",
        _ => "unknown criterion",
    }
}

fn unit() -> ScalingIndex {
    ScalingIndex::new(1.0).expect("positive index")
}

fn prefixed(prefix: &str, checks: Vec<Check>) -> Vec<Check> {
    checks
        .into_iter()
        .map(|mut c| {
            c.name = format!("{prefix}: {}", c.name);
            c
        })
        .collect()
}

fn c1() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (name, spec) in fixtures::all() {
        let f = matrix_exponent(&spec, Complex64::new(0.0, 0.0))?;
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 1.0;
        for i in 0..spec.n() {
            for j in 0..spec.n() {
                // killing enters the exponent as -kill on the diagonal
                let kill = if i == j { spec.component(i).kill_rate } else { 0.0 };
                let q = spec.rates().get(i, j) - kill;
                worst = worst.max((f[(i, j)] - q).norm());
                scale = scale.max(q.abs());
            }
        }
        out.push(Check::at_most(format!("{name}: max |F(0) - (Q - diag(kill))|"), worst, 4.0 * f64::EPSILON * scale));
    }
    Ok(out)
}

fn c2(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let zs: Vec<Complex64> = [-1.0, 0.5, 1.0, 2.0].iter().map(|&u| Complex64::new(0.0, u)).collect();
    let mut out = Vec::new();
    for name in ["exp_jump", "brownian2", "mixed", "occupation"] {
        let spec = fixtures::by_name(name).expect("fixture");
        let r = check_law_consistency(&spec, &zs, 1.0, &cfg.plan(2, 100_000).derive(name))?;
        out.extend(prefixed(name, r.checks()));
    }
    Ok(out)
}

fn c3(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for name in ["brownian2", "occupation", "two_state_jump"] {
        let spec = fixtures::by_name(name).expect("fixture");
        let r = check_increment_duality(&spec, &[Complex64::new(0.3, 0.0)], 1.0, &cfg.plan(3, 100_000).derive(name))?;
        out.extend(prefixed(name, r.checks()));
    }
    Ok(out)
}

fn c4(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let spec = fixtures::exp_jump();
    let r = estimate_stationary_overshoot(&spec, &[10.0], EXIT_CAP, &cfg.plan(4, 10_000))?;
    let laws = &r.levels[0].laws;
    let mut out = Vec::new();
    for (i, law) in laws.iter().enumerate() {
        let law = law.as_ref().ok_or_else(|| crate::Error::Empty(format!("no passage from state {i}")))?;
        out.push(Check::at_most(
            format!("KS to Exp(1) from state {i}"),
            law.ks_to_cdf(|x| 1.0 - (-x.max(0.0)).exp())?,
            OVERSHOOT_KS_TOLERANCE,
        ));
    }
    if let (Some(a), Some(b)) = (&laws[0], &laws[1]) {
        out.push(Check::at_most("KS between initial states", ks_distance(a, b)?, OVERSHOOT_KS_TOLERANCE));
    }
    Ok(out)
}

fn c5(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let spec = fixtures::deterministic();
    let horizon = 10.0;
    let mut rng = cfg.plan(5, 1).stream(0);
    let path = simulate_rssmp(&spec, unit(), 1.0, horizon, &mut rng)?;
    let mut worst: f64 = 0.0;
    for k in 0..100 {
        let t = horizon * k as f64 / 99.0;
        let z = path.value_at(t).unwrap_or(f64::NAN);
        worst = worst.max((z - (1.0 + t)).abs());
    }
    Ok(vec![Check::at_most("max |Z_t - (1 + t)| on 100 points", worst, 1e-9)])
}

fn c6(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let r = exit_moment_scaling(&fixtures::exp_jump(), unit(), &[0.1, 0.05, 0.025], 0.5, &cfg.plan(6, 10_000))?;
    Ok(r.checks())
}

fn c7(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let spec = fixtures::exp_jump();
    let plan = cfg.plan(7, 10_000);
    let (eps, eps_prime) = (0.25, 0.5);
    let mu = estimate_mu_eps(&spec, unit(), eps, &halving_schedule(eps / 2.0, 3), &plan.derive("mu"))?;
    let mu_prime = estimate_mu_eps(&spec, unit(), eps_prime, &halving_schedule(eps_prime / 2.0, 3), &plan.derive("mu-prime"))?;
    Ok(check_mu_consistency(&spec, unit(), &mu, &mu_prime, &plan.derive("carry"))?.checks())
}

fn c8(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    Ok(check_scaling(&fixtures::brownian2(), unit(), 1.0, 2.0, &[0.5, 1.0], &cfg.plan(8, 10_000))?.checks())
}

fn c9(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let r = verify_wiener_hopf_splitting(&fixtures::brownian2(), 0.5, &[-2.0, -1.0, 0.0, 1.0, 2.0], &cfg.plan(9, 100_000))?;
    Ok(r.checks())
}

fn c10(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let grid: Vec<f64> = (0..=45).map(|k| 5.0 + k as f64).collect();
    let plan = cfg.plan(10, 10_000);
    let single = check_markov_renewal(&fixtures::exp_renewal(), LadderSide::Ascending, &grid, &plan.derive("single"))?;
    let two = check_markov_renewal(&fixtures::two_state_jump(), LadderSide::Ascending, &grid, &plan.derive("two"))?;
    let mut out = vec![Check::at_most(
        "Exp(1) ladder renewal slope, relative error to 1",
        (single.total_slope(0) - 1.0).abs(),
        RENEWAL_TOLERANCE,
    )
    .with_detail(format!("slope {}", num(single.total_slope(0))))];
    out.push(Check::at_most("two-state slope spread across initial states", two.slope_spread, RENEWAL_TOLERANCE));
    Ok(out)
}

fn c11(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let hc = HarmonicConfig {
        epochs_per_state: cfg.n(100_000),
        paths: cfg.n(100_000),
        ..HarmonicConfig::default()
    };
    let r = harmonic_report(&fixtures::symmetric_jump(), &[5.0, 10.0], &[1.0, 2.0], &hc, &cfg.plan(11, 1))?;
    Ok(r.checks())
}

fn c12() -> Result<Vec<Check>> {
    let cases = [
        ("brownian2", fixtures::brownian2(), true),
        ("symmetric_jump", fixtures::symmetric_jump(), true),
        ("heavy_tail_oscillating", fixtures::heavy_tail_oscillating(), false),
    ];
    let mut out = Vec::new();
    for (name, spec, expected) in cases {
        let a = check_condition_c(&spec)?;
        let b = check_condition_c(&spec)?;
        out.push(
            Check::flag(format!("{name}: {}", if expected { "holds" } else { "fails" }), a.holds == expected)
                .with_detail(a.reason.label()),
        );
        out.push(Check::flag(format!("{name}: repeated verdicts agree"), a == b));
    }
    Ok(out)
}

fn c13(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let plan = cfg.plan(13, 10_000);
    let conv = ConvergenceConfig {
        eps: 0.01,
        exit_eps_schedule: vec![0.1, 0.05, 0.025],
        times: vec![1.0],
        post_exit_level: 0.1,
        samples: cfg.n(10_000),
    };
    let mut out = convergence_report(&fixtures::exp_jump(), unit(), &conv, &plan.derive("convergence"))?.checks();
    let eps = 0.01;
    let w = necessity_witness(
        &fixtures::c_failing(),
        unit(),
        eps,
        10.0 * eps,
        &halving_schedule(eps / 2.0, 12),
        &plan.derive("witness"),
    )?;
    out.extend(w.checks());
    out.push(Check::flag("necessity: witness is not vacuous", !w.vacuous));
    Ok(out)
}

fn c14(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let cc = ConditionedConfig {
        particles: cfg.n(10_000),
        ..ConditionedConfig::default()
    };
    let r = conditioned_sampler(&fixtures::symmetric_jump(), (-1.0, 0), &[1.0, 2.0, 4.0, 8.0], &[5.0], &cc, &cfg.plan(14, 1))?;
    Ok(r.checks())
}

fn c15(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let fs = [
        TestFunction::Indicator { low: 1.0, high: 2.0 },
        TestFunction::Exponential { rate: 1.0 },
        TestFunction::Constant { value: 1.0 },
    ];
    let r = verify_occupation_formula(&fixtures::occupation_fixture(), &[(1.0, 0), (3.0, 1)], &[0, 1], &fs, &cfg.plan(15, 100_000))?;
    Ok(r.checks())
}

/// Runs criterion `id` in 1..=15; errors become a single failing check.
pub fn run_criterion(id: u8, cfg: &VerifyConfig) -> CriterionResult {
    let checks = match id {
        1 => c1(),
        2 => c2(cfg),
        3 => c3(cfg),
        4 => c4(cfg),
        5 => c5(cfg),
        6 => c6(cfg),
        7 => c7(cfg),
        8 => c8(cfg),
        9 => c9(cfg),
        10 => c10(cfg),
        11 => c11(cfg),
        12 => c12(),
        13 => c13(cfg),
        14 => c14(cfg),
        15 => c15(cfg),
        _ => Err(crate::Error::InvalidArgument(format!("criterion {id} is not a single-run criterion"))),
    };
    CriterionResult {
        id,
        title: title(id),
        checks: checks.unwrap_or_else(|e| vec![Check::flag("ran without error", false).with_detail(e.to_string())]),
    }
}

/// Criteria 1 to 15 in order.
pub fn run_all(cfg: &VerifyConfig) -> Vec<CriterionResult> {
    (1..CRITERIA).map(|id| run_criterion(id, cfg)).collect()
}

pub fn summary_table(results: &[CriterionResult]) -> Table {
    let mut t = Table::new(&["criterion", "title", "result", "checks", "failed"]);
    for r in results {
        t.push(vec![
            r.id.to_string(),
            r.title.to_string(),
            if r.passed() { "pass" } else { "fail" }.into(),
            r.checks.len().to_string(),
            r.checks.iter().filter(|c| !c.passed).count().to_string(),
        ]);
    }
    t
}

/// Writes `summary.csv` and `criterion-XX.csv` per result; returns the paths.
pub fn write_results(dir: &Path, results: &[CriterionResult]) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut paths = Vec::new();
    let summary = dir.join("summary.csv");
    fs::write(&summary, summary_table(results).to_csv())?;
    paths.push(summary);
    for r in results {
        let p = dir.join(format!("criterion-{:02}.csv", r.id));
        fs::write(&p, checks_table(&r.checks).to_csv())?;
        paths.push(p);
    }
    Ok(paths)
}

/// Files in `a` and `b` with the same names and bytes.
pub fn compare_dirs(a: &Path, b: &Path) -> io::Result<Vec<Check>> {
    let names = |d: &Path| -> io::Result<Vec<String>> {
        let mut v: Vec<String> = fs::read_dir(d)?
            .map(|e| e.map(|e| e.file_name().to_string_lossy().into_owned()))
            .collect::<io::Result<_>>()?;
        v.sort();
        Ok(v)
    };
    let (na, nb) = (names(a)?, names(b)?);
    let mut out = vec![Check::flag("same file set", na == nb).with_detail(format!("{} files", na.len()))];
    for n in na.iter().filter(|n| nb.contains(n)) {
        out.push(Check::flag(format!("{n} byte-identical"), fs::read(a.join(n))? == fs::read(b.join(n))?));
    }
    Ok(out)
}

/// Writes `first` (a completed verify-all run) to `a`, runs verify-all
/// again into `b` and compares the outputs.
pub fn determinism_criterion(first: &[CriterionResult], cfg: &VerifyConfig, a: &Path, b: &Path) -> CriterionResult {
    let checks = (|| -> io::Result<Vec<Check>> {
        write_results(a, first)?;
        write_results(b, &run_all(cfg))?;
        compare_dirs(a, b)
    })();
    CriterionResult {
        id: 16,
        title: title(16),
        checks: checks.unwrap_or_else(|e| vec![Check::flag("outputs written", false).with_detail(e.to_string())]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_criteria_pass() {
        let cfg = VerifyConfig::new(1);
        for id in [1, 5, 12] {
            let r = run_criterion(id, &cfg);
            assert!(r.passed(), "{}", r.line());
        }
    }

    #[test]
    fn unknown_criterion_fails_cleanly() {
        let r = run_criterion(99, &VerifyConfig::new(1));
        assert!(!r.passed());
        assert!(r.line().contains("FAIL"));
    }

    #[test]
    fn summary_has_one_row_per_criterion() {
        let r = vec![run_criterion(1, &VerifyConfig::new(1)), run_criterion(12, &VerifyConfig::new(1))];
        let csv = summary_table(&r).to_csv();
        assert_eq!(csv.lines().count(), 3);
        assert!(csv.starts_with("criterion,title,result,checks,failed\n"));
    }
}

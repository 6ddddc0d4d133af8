use std::fs;
use std::path::{Path, PathBuf};

use kiu_core::entrance::{convergence_report, necessity_witness, sample_entrance, ConvergenceConfig, EntranceConfig, TimeOrigin};
use kiu_core::fluctuation::{
    check_markov_renewal, conditioned_sampler, empirical_tightness_probe, estimate_stationary_overshoot, harmonic_report,
    verify_occupation_formula, verify_wiener_hopf_splitting, ConditionedConfig, HarmonicConfig, LadderSide, TestFunction,
};
use kiu_core::lamperti::{halving_schedule, simulate_rssmp, ScalingIndex};
use kiu_core::report::{checks_table, num, Check, Table};
use kiu_core::verify::{run_criterion, write_results, VerifyConfig};
use kiu_core::{check_condition_c, classify_regime, MapSpec, SeedPlan};

use crate::config::{ExperimentConfig, OriginPolicy, SpecRef};
use crate::error::CliError;
use crate::plot;

/// Everything a subcommand needs after flags and config are merged.
pub struct Context {
    pub config: ExperimentConfig,
    pub seed: u64,
    pub output: PathBuf,
    pub spec: Option<MapSpec>,
}

impl Context {
    fn spec(&self) -> &MapSpec {
        self.spec.as_ref().expect("resolved for spec commands")
    }

    fn alpha(&self) -> ScalingIndex {
        ScalingIndex::new(self.config.alpha).expect("validated")
    }

    fn plan(&self, n: u64) -> SeedPlan {
        SeedPlan::new(self.seed, n)
    }

    fn write(&self, name: &str, contents: &str) -> Result<PathBuf, CliError> {
        fs::create_dir_all(&self.output)
            .map_err(|e| CliError::Run(format!("cannot create output directory {}: {e}", self.output.display())))?;
        let p = self.output.join(name);
        fs::write(&p, contents).map_err(|e| CliError::Run(format!("cannot write {}: {e}", p.display())))?;
        Ok(p)
    }

    /// Writes the resolved configuration next to the outputs, with the spec inlined.
    fn write_config(&self) -> Result<(), CliError> {
        let mut cfg = self.config.clone();
        cfg.seed = Some(self.seed);
        if let Some(spec) = &self.spec {
            cfg.spec = Some(SpecRef { inline: Some(spec.clone()), ..SpecRef::default() });
        }
        self.write("config.resolved.toml", &cfg.to_toml())?;
        Ok(())
    }
}

fn finish(checks: &[Check], what: &str) -> Result<(), CliError> {
    for c in checks {
        println!("{} {} = {} (tol {})", if c.passed { "PASS" } else { "FAIL" }, c.name, num(c.statistic), num(c.tolerance));
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    if failed == 0 {
        Ok(())
    } else {
        Err(CliError::Acceptance(format!("{failed} of {} {what} checks failed", checks.len())))
    }
}

pub fn simulate(ctx: &Context) -> Result<(), CliError> {
    let p = &ctx.config.simulate;
    let plan = ctx.plan(p.paths).derive("simulate");
    let k = p.grid_points - 1;
    let grid: Vec<f64> = (0..=k).map(|g| p.horizon * g as f64 / k as f64).collect();
    let paths = kiu_core::run_replicated(&plan, |_, rng| simulate_rssmp(ctx.spec(), ctx.alpha(), p.start, p.horizon, rng))?;
    for (i, path) in paths.iter().enumerate() {
        ctx.write(&format!("path-{i:04}.csv"), &path.grid_csv(&grid))?;
        ctx.write(&format!("events-{i:04}.csv"), &path.to_csv())?;
    }
    ctx.write_config()?;
    println!("wrote {} path(s) to {}", paths.len(), ctx.output.display());
    Ok(())
}

pub fn check_condition(ctx: &Context) -> Result<(), CliError> {
    let spec = ctx.spec();
    let v = check_condition_c(spec)?;
    let regime = classify_regime(spec).map(|r| r.regime.label()).unwrap_or("undecidable");
    let mut t = Table::new(&["holds", "reason", "regime", "integral", "detail"]);
    t.push(vec![
        v.holds.to_string(),
        v.reason.label().into(),
        regime.into(),
        v.integral.map(num).unwrap_or_default(),
        v.detail.clone(),
    ]);
    ctx.write("condition.csv", &t.to_csv())?;
    println!("{} / {}", if v.holds { "holds" } else { "fails" }, v.reason.label());
    Ok(())
}

pub fn overshoot(ctx: &Context) -> Result<(), CliError> {
    let p = &ctx.config.overshoot;
    let r = estimate_stationary_overshoot(ctx.spec(), &p.levels, p.time_cap, &ctx.plan(p.n))?;
    let mut t = Table::new(&["level", "init_state", "passed", "no_passage", "killed", "median", "mean"]);
    for l in &r.levels {
        for (i, law) in l.laws.iter().enumerate() {
            let (passed, median, mean) = match law {
                Some(m) => (m.atoms().len(), num(m.median()), num(m.mean())),
                None => (0, String::new(), String::new()),
            };
            t.push(vec![
                num(l.level),
                i.to_string(),
                passed.to_string(),
                l.no_passage[i].to_string(),
                l.killed[i].to_string(),
                median,
                mean,
            ]);
        }
    }
    ctx.write("overshoot.csv", &t.to_csv())?;
    let checks = r.checks();
    ctx.write("overshoot-checks.csv", &checks_table(&checks).to_csv())?;
    ctx.write_config()?;
    println!("{}", t.to_csv().trim_end());
    finish(&checks, "overshoot")
}

pub fn fluctuation_verify(ctx: &Context) -> Result<(), CliError> {
    let p = &ctx.config.fluctuation;
    let spec = ctx.spec();
    let plan = ctx.plan(p.n);
    let mut checks = Vec::new();
    for name in &p.checks {
        let sub = plan.derive(name);
        let found = match name.as_str() {
            "renewal" => check_markov_renewal(spec, LadderSide::Ascending, &p.renewal_grid, &sub)?.checks(),
            "wiener-hopf" => verify_wiener_hopf_splitting(spec, p.splitting_rate, &p.splitting_points, &sub)?.checks(),
            "harmonic" => {
                let cfg = HarmonicConfig {
                    epochs_per_state: p.n,
                    paths: p.n,
                    ..HarmonicConfig::default()
                };
                harmonic_report(spec, &p.harmonic_starts, &p.harmonic_times, &cfg, &sub)?.checks()
            }
            "conditioned" => {
                let cfg = ConditionedConfig {
                    particles: p.n,
                    ..ConditionedConfig::default()
                };
                conditioned_sampler(spec, (p.conditioned_start, 0), &p.conditioned_horizons, &p.conditioned_levels, &cfg, &sub)?.checks()
            }
            "occupation" => {
                let fs = [
                    TestFunction::Indicator { low: 1.0, high: 2.0 },
                    TestFunction::Exponential { rate: 1.0 },
                    TestFunction::Constant { value: 1.0 },
                ];
                let targets: Vec<usize> = (0..spec.n()).collect();
                verify_occupation_formula(spec, &p.occupation_starts, &targets, &fs, &sub)?.checks()
            }
            "tightness" => empirical_tightness_probe(spec, 0, &p.tightness_levels, &sub)?.checks(),
            _ => unreachable!("validated"),
        };
        checks.extend(found.into_iter().map(|mut c| {
            c.name = format!("{name}: {}", c.name);
            c
        }));
    }
    ctx.write("fluctuation-checks.csv", &checks_table(&checks).to_csv())?;
    ctx.write_config()?;
    finish(&checks, "fluctuation")
}

pub fn entrance(ctx: &Context) -> Result<(), CliError> {
    let p = &ctx.config.entrance;
    let spec = ctx.spec();
    let plan = ctx.plan(p.n);
    let mut checks = Vec::new();
    if p.witness {
        let bound = p.witness_bound.unwrap_or(10.0 * p.eps);
        let w = necessity_witness(spec, ctx.alpha(), p.eps, bound, &halving_schedule(p.eps / 2.0, p.witness_steps), &plan.derive("witness"))?;
        let mut t = Table::new(&["start", "probability"]);
        for (z, q) in w.starts.iter().zip(&w.probabilities) {
            t.push(vec![num(*z), num(*q)]);
        }
        ctx.write("witness.csv", &t.to_csv())?;
        if w.vacuous {
            println!("stationary overshoot exists: the witness is vacuous");
        }
        checks.extend(w.checks());
    }
    let mut cfg = EntranceConfig::new(p.eps);
    cfg.origin = match p.origin {
        OriginPolicy::ZeroOffset => TimeOrigin::ZeroOffset,
        OriginPolicy::EmpiricalOffset => TimeOrigin::EmpiricalOffset,
    };
    let paths = match sample_entrance(spec, ctx.alpha(), cfg, p.horizon, &plan.derive("entrance")) {
        Err(kiu_core::Error::ConditionFails) if p.witness => {
            ctx.write_config()?;
            return finish(&checks, "entrance");
        }
        Err(e @ kiu_core::Error::ConditionFails) => {
            return Err(CliError::Run(format!("{e}; set [entrance] witness = true to run the necessity witness")));
        }
        r => r?,
    };
    let mut t = Table::new(&["t", "path", "Z"]);
    for &time in &p.times {
        for (k, path) in paths.iter().enumerate() {
            if let Some(z) = path.value_at(time) {
                t.push(vec![num(time), k.to_string(), num(z)]);
            }
        }
    }
    ctx.write("entrance-marginals.csv", &t.to_csv())?;
    for (k, path) in paths.iter().take(p.export_paths).enumerate() {
        ctx.write(&format!("entrance-path-{k:04}.csv"), &path.to_csv())?;
    }
    if p.convergence {
        let conv = ConvergenceConfig {
            eps: p.eps,
            exit_eps_schedule: p.exit_eps_schedule.clone(),
            times: p.times.clone(),
            post_exit_level: p.post_exit_level,
            samples: p.n,
        };
        checks.extend(convergence_report(spec, ctx.alpha(), &conv, &plan.derive("convergence"))?.checks());
    }
    ctx.write("entrance-checks.csv", &checks_table(&checks).to_csv())?;
    ctx.write_config()?;
    println!("wrote {} entrance paths to {}", paths.len(), ctx.output.display());
    finish(&checks, "entrance")
}

pub fn verify_all(ctx: &Context) -> Result<(), CliError> {
    let v = &ctx.config.verify;
    let cfg = VerifyConfig {
        seed: ctx.seed,
        scale: v.scale,
    };
    let mut results = Vec::new();
    for &id in &v.criteria {
        let r = run_criterion(id, &cfg);
        println!("{}", r.line());
        results.push(r);
    }
    write_results(&ctx.output, &results)?;
    ctx.write_config()?;
    let failed: Vec<String> = results.iter().filter(|r| !r.passed()).map(|r| r.id.to_string()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Acceptance(format!("criteria {}", failed.join(", "))))
    }
}

pub fn report(from: &Path, output: &Path) -> Result<(), CliError> {
    let (manifest, script) = plot::build(from)?;
    fs::create_dir_all(output)?;
    fs::write(output.join("manifest.csv"), manifest.to_csv())?;
    fs::write(output.join("plot.py"), script)?;
    println!("indexed {} table(s); run `python3 {}`", manifest.rows.len(), output.join("plot.py").display());
    Ok(())
}

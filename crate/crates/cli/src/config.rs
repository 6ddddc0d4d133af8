//! Experiment configuration files.
//!
//! Every table rejects unknown keys. Relative spec file paths resolve
//! against the directory of the config file.

use std::fs;
use std::path::{Path, PathBuf};

use kiu_core::{fixtures, MapSpec};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

fn default_alpha() -> f64 {
    1.0
}

fn default_output() -> PathBuf {
    PathBuf::from("kiu-out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_output")]
    pub output: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec: Option<SpecRef>,
    #[serde(default)]
    pub simulate: SimulateParams,
    #[serde(default)]
    pub overshoot: OvershootParams,
    #[serde(default)]
    pub fluctuation: FluctuationParams,
    #[serde(default)]
    pub entrance: EntranceParams,
    #[serde(default)]
    pub verify: VerifyParams,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: None,
            alpha: default_alpha(),
            output: default_output(),
            spec: None,
            simulate: SimulateParams::default(),
            overshoot: OvershootParams::default(),
            fluctuation: FluctuationParams::default(),
            entrance: EntranceParams::default(),
            verify: VerifyParams::default(),
        }
    }
}

/// Exactly one of `fixture`, `file` or `inline`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecRef {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixture: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inline: Option<MapSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateParams {
    pub start: f64,
    pub horizon: f64,
    pub paths: u64,
    pub grid_points: usize,
}

impl Default for SimulateParams {
    fn default() -> Self {
        SimulateParams {
            start: 1.0,
            horizon: 10.0,
            paths: 1,
            grid_points: 101,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OvershootParams {
    pub levels: Vec<f64>,
    pub n: u64,
    pub time_cap: f64,
}

impl Default for OvershootParams {
    fn default() -> Self {
        OvershootParams {
            levels: vec![5.0, 10.0, 20.0],
            n: 10_000,
            time_cap: 1e6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FluctuationParams {
    /// Any of `renewal`, `wiener-hopf`, `harmonic`, `conditioned`,
    /// `occupation`, `tightness`.
    pub checks: Vec<String>,
    pub n: u64,
    pub renewal_grid: Vec<f64>,
    pub splitting_rate: f64,
    pub splitting_points: Vec<f64>,
    pub harmonic_starts: Vec<f64>,
    pub harmonic_times: Vec<f64>,
    pub conditioned_start: f64,
    pub conditioned_horizons: Vec<f64>,
    /// Depths `k`: the fraction below `-k` is tracked.
    pub conditioned_levels: Vec<f64>,
    pub occupation_starts: Vec<(f64, usize)>,
    pub tightness_levels: Vec<f64>,
}

pub const FLUCTUATION_CHECKS: [&str; 6] = ["renewal", "wiener-hopf", "harmonic", "conditioned", "occupation", "tightness"];

impl Default for FluctuationParams {
    fn default() -> Self {
        FluctuationParams {
            checks: FLUCTUATION_CHECKS.iter().map(|s| s.to_string()).collect(),
            n: 10_000,
            renewal_grid: (0..=45).map(|k| 5.0 + k as f64).collect(),
            splitting_rate: 0.5,
            splitting_points: vec![-2.0, -1.0, 0.0, 1.0, 2.0],
            harmonic_starts: vec![5.0, 10.0],
            harmonic_times: vec![1.0, 2.0],
            conditioned_start: -1.0,
            conditioned_horizons: vec![1.0, 2.0, 4.0, 8.0],
            conditioned_levels: vec![5.0],
            occupation_starts: vec![(1.0, 0), (3.0, 1)],
            tightness_levels: vec![5.0, 10.0, 20.0],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OriginPolicy {
    ZeroOffset,
    EmpiricalOffset,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EntranceParams {
    pub eps: f64,
    pub origin: OriginPolicy,
    pub horizon: f64,
    pub n: u64,
    pub times: Vec<f64>,
    /// Individual paths written as CSV.
    pub export_paths: usize,
    pub convergence: bool,
    pub post_exit_level: f64,
    pub exit_eps_schedule: Vec<f64>,
    /// Estimate `P^z(|Z_{T_eps}| < witness_bound)` along halving starts.
    pub witness: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_bound: Option<f64>,
    pub witness_steps: usize,
}

impl Default for EntranceParams {
    fn default() -> Self {
        EntranceParams {
            eps: 0.01,
            origin: OriginPolicy::ZeroOffset,
            horizon: 1.0,
            n: 10_000,
            times: vec![0.5, 1.0],
            export_paths: 10,
            convergence: false,
            post_exit_level: 0.1,
            exit_eps_schedule: vec![0.1, 0.05, 0.025],
            witness: false,
            witness_bound: None,
            witness_steps: 12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyParams {
    pub scale: f64,
    pub criteria: Vec<u8>,
}

impl Default for VerifyParams {
    fn default() -> Self {
        VerifyParams {
            scale: 1.0,
            criteria: (1..=15).collect(),
        }
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str, origin: &str) -> Result<Self, CliError> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| CliError::config(origin, e.message().trim().to_string() + &span_hint(text, e.span())))?;
        cfg.validate(origin)?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let origin = path.display().to_string();
        let text = fs::read_to_string(path).map_err(|e| CliError::config(&origin, format!("cannot read: {e}")))?;
        let mut cfg = Self::parse(&text, &origin)?;
        if let Some(SpecRef { file: Some(f), .. }) = &mut cfg.spec {
            if f.is_relative() {
                if let Some(dir) = path.parent() {
                    *f = dir.join(&*f);
                }
            }
        }
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    fn validate(&self, origin: &str) -> Result<(), CliError> {
        let bad = |key: &str, msg: &str| Err(CliError::config(origin, format!("{key}: {msg}")));
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return bad("alpha", "must be positive and finite");
        }
        if let Some(s) = &self.spec {
            let given = [s.fixture.is_some(), s.file.is_some(), s.inline.is_some()].iter().filter(|&&b| b).count();
            if given != 1 {
                return bad("spec", "set exactly one of fixture, file, inline");
            }
            if let Some(name) = &s.fixture {
                if fixtures::by_name(name).is_none() {
                    return bad("spec.fixture", &format!("unknown fixture {name:?}; known: {}", fixtures::NAMES.join(", ")));
                }
            }
        }
        if !(self.simulate.horizon > 0.0) || self.simulate.start == 0.0 || self.simulate.grid_points < 2 {
            return bad("simulate", "need horizon > 0, start != 0 and grid_points >= 2");
        }
        if self.overshoot.levels.iter().any(|&a| !(a > 0.0)) || self.overshoot.n == 0 {
            return bad("overshoot", "levels must be positive and n > 0");
        }
        if let Some(c) = self.fluctuation.checks.iter().find(|c| !FLUCTUATION_CHECKS.contains(&c.as_str())) {
            return bad("fluctuation.checks", &format!("unknown check {c:?}; known: {}", FLUCTUATION_CHECKS.join(", ")));
        }
        let e = &self.entrance;
        if !(e.eps > 0.0 && e.eps < 1.0) || !(e.horizon > 0.0) || e.n == 0 {
            return bad("entrance", "need 0 < eps < 1, horizon > 0 and n > 0");
        }
        if !(self.verify.scale > 0.0) || self.verify.criteria.iter().any(|&c| !(1..=15).contains(&c)) {
            return bad("verify", "scale must be positive and criteria within 1..=15");
        }
        Ok(())
    }

    /// The configured spec, or the fixture named on the command line.
    pub fn resolve_spec(&self, fixture_override: Option<&str>, origin: &str) -> Result<MapSpec, CliError> {
        if let Some(name) = fixture_override {
            return fixtures::by_name(name)
                .ok_or_else(|| CliError::config("--fixture", format!("unknown fixture {name:?}; known: {}", fixtures::NAMES.join(", "))));
        }
        let s = self.spec.as_ref().ok_or_else(|| CliError::config(origin, "spec: missing (or pass --fixture)"))?;
        if let Some(name) = &s.fixture {
            return Ok(fixtures::by_name(name).expect("validated"));
        }
        if let Some(spec) = &s.inline {
            return Ok(spec.clone());
        }
        let file = s.file.as_ref().expect("validated");
        let where_ = file.display().to_string();
        let text = fs::read_to_string(file).map_err(|e| CliError::config(&where_, format!("cannot read spec: {e}")))?;
        MapSpec::from_toml(&text).map_err(|e| CliError::config(&where_, e.to_string()))
    }
}

fn span_hint(text: &str, span: Option<std::ops::Range<usize>>) -> String {
    match span {
        Some(r) => {
            let line = text[..r.start.min(text.len())].matches('\n').count() + 1;
            format!(" (line {line})")
        }
        None => String::new(),
    }
}

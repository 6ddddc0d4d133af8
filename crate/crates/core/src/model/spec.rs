//! Parametric description of a Markov additive process.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::jump_law::JumpLaw;
use crate::error::{Error, Result};

/// Largest supported number of modulator states.
pub const MAX_STATES: usize = 8;

/// Index of a modulator state, `0..n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StateIndex(pub usize);

impl fmt::Display for StateIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Intensity matrix of the modulating chain (entries in 1/time).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RateMatrix(Vec<Vec<f64>>);

impl RateMatrix {
    pub fn new(entries: Vec<Vec<f64>>) -> Result<Self> {
        let q = RateMatrix(entries);
        q.validate()?;
        Ok(q)
    }

    /// Two-state matrix with `rate_01` from 0 to 1 and `rate_10` back.
    pub fn two_state(rate_01: f64, rate_10: f64) -> Result<Self> {
        Self::new(vec![vec![-rate_01, rate_01], vec![rate_10, -rate_10]])
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[i][j]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.0
    }

    /// Total rate of leaving state `i`.
    pub fn exit_rate(&self, i: usize) -> f64 {
        -self.0[i][i]
    }

    fn validate(&self) -> Result<()> {
        let n = self.n();
        if n == 0 || n > MAX_STATES {
            return Err(Error::InvalidSpec(format!("state count {n} outside 1..={MAX_STATES}")));
        }
        for (i, row) in self.0.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidSpec(format!("rates row {i} has {} entries, expected {n}", row.len())));
            }
            let mut scale: f64 = 1.0;
            for (j, &q) in row.iter().enumerate() {
                if !q.is_finite() {
                    return Err(Error::InvalidSpec(format!("rate q[{i}][{j}] is not finite")));
                }
                if i != j && q < 0.0 {
                    return Err(Error::InvalidSpec(format!("off-diagonal rate q[{i}][{j}] = {q} is negative")));
                }
                scale = scale.max(q.abs());
            }
            let sum: f64 = row.iter().sum();
            if sum.abs() > 1e-12 * scale {
                return Err(Error::InvalidSpec(format!("rates row {i} sums to {sum}, expected 0")));
            }
        }
        Ok(())
    }

    /// Strong connectivity of the graph of positive off-diagonal rates.
    pub fn is_irreducible(&self) -> bool {
        let n = self.n();
        let reach = |forward: bool| {
            let mut seen = vec![false; n];
            let mut stack = vec![0];
            seen[0] = true;
            while let Some(i) = stack.pop() {
                for j in 0..n {
                    let q = if forward { self.0[i][j] } else { self.0[j][i] };
                    if i != j && q > 0.0 && !seen[j] {
                        seen[j] = true;
                        stack.push(j);
                    }
                }
            }
            seen.into_iter().all(|s| s)
        };
        reach(true) && reach(false)
    }
}

/// Per-state Lévy component: drift, Gaussian variance and a compound Poisson
/// part stored as rate times a probability law, plus an optional kill rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevyComponent {
    /// space / time
    pub drift: f64,
    /// space² / time
    #[serde(default)]
    pub sigma2: f64,
    /// 1 / time
    #[serde(default)]
    pub jump_rate: f64,
    #[serde(default = "JumpLaw::zero")]
    pub jump_law: JumpLaw,
    /// 1 / time
    #[serde(default)]
    pub kill_rate: f64,
}

impl LevyComponent {
    pub fn drift(drift: f64) -> Self {
        LevyComponent {
            drift,
            sigma2: 0.0,
            jump_rate: 0.0,
            jump_law: JumpLaw::zero(),
            kill_rate: 0.0,
        }
    }

    pub fn brownian(drift: f64, sigma2: f64) -> Self {
        LevyComponent {
            sigma2,
            ..Self::drift(drift)
        }
    }

    pub fn with_jumps(mut self, rate: f64, law: JumpLaw) -> Self {
        self.jump_rate = rate;
        self.jump_law = law;
        self
    }

    pub fn with_kill(mut self, rate: f64) -> Self {
        self.kill_rate = rate;
        self
    }

    fn validate(&self, state: usize) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidSpec(format!("component {state}: {what}")));
        if !self.drift.is_finite() {
            return bad("drift must be finite");
        }
        if !(self.sigma2 >= 0.0 && self.sigma2.is_finite()) {
            return bad("sigma2 must be non-negative");
        }
        if !(self.jump_rate >= 0.0 && self.jump_rate.is_finite()) {
            return bad("jump_rate must be non-negative");
        }
        if !(self.kill_rate >= 0.0 && self.kill_rate.is_finite()) {
            return bad("kill_rate must be non-negative");
        }
        self.jump_law
            .validate()
            .map_err(|e| Error::InvalidSpec(format!("component {state} jump law: {e}")))
    }

    /// The component of the negated process.
    pub fn negated(&self) -> Self {
        LevyComponent {
            drift: -self.drift,
            sigma2: self.sigma2,
            jump_rate: self.jump_rate,
            jump_law: self.jump_law.reflected(),
            kill_rate: self.kill_rate,
        }
    }

    /// True when jumps actually occur.
    pub fn has_jumps(&self) -> bool {
        self.jump_rate > 0.0 && !self.jump_law.is_zero()
    }
}

/// Full parametric description of a MAP: modulator rates, per-state Lévy
/// components and the laws of the extra jumps inserted at switches.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpecFile", into = "SpecFile")]
pub struct MapSpec {
    rates: RateMatrix,
    components: Vec<LevyComponent>,
    // transitions[i][j]; point mass at 0 when absent
    transitions: Vec<Vec<JumpLaw>>,
}

impl MapSpec {
    pub fn new(rates: RateMatrix, components: Vec<LevyComponent>) -> Result<Self> {
        let n = rates.n();
        let spec = MapSpec {
            rates,
            components,
            transitions: vec![vec![JumpLaw::zero(); n]; n],
        };
        spec.validate()?;
        Ok(spec)
    }

    /// A single-state spec, i.e. a Lévy process.
    pub fn levy(component: LevyComponent) -> Result<Self> {
        Self::new(RateMatrix::new(vec![vec![0.0]])?, vec![component])
    }

    /// Sets the law of the jump added when the modulator moves from `from`
    /// to `to`.
    pub fn with_transition(mut self, from: usize, to: usize, law: JumpLaw) -> Result<Self> {
        if from >= self.n() || to >= self.n() || from == to {
            return Err(Error::InvalidSpec(format!("transition ({from}, {to}) is not an off-diagonal pair")));
        }
        self.transitions[from][to] = law;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.rates.n();
        if self.components.len() != n {
            return Err(Error::InvalidSpec(format!(
                "{} components for {n} states",
                self.components.len()
            )));
        }
        for (i, c) in self.components.iter().enumerate() {
            c.validate(i)?;
        }
        if self.transitions.len() != n || self.transitions.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidSpec("transition table has wrong shape".into()));
        }
        for i in 0..n {
            for j in 0..n {
                let law = &self.transitions[i][j];
                law.validate()
                    .map_err(|e| Error::InvalidSpec(format!("transition ({i}, {j}): {e}")))?;
                if (i == j || self.rates.get(i, j) == 0.0) && !law.is_zero() {
                    return Err(Error::InvalidSpec(format!(
                        "transition ({i}, {j}) has a jump law but no rate; it must be the point mass at 0"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.rates.n()
    }

    pub fn rates(&self) -> &RateMatrix {
        &self.rates
    }

    pub fn components(&self) -> &[LevyComponent] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &LevyComponent {
        &self.components[i]
    }

    pub fn transition(&self, from: usize, to: usize) -> &JumpLaw {
        &self.transitions[from][to]
    }

    pub fn check_state(&self, i: usize) -> Result<StateIndex> {
        if i < self.n() {
            Ok(StateIndex(i))
        } else {
            Err(Error::InvalidArgument(format!("state {i} out of range for {} states", self.n())))
        }
    }

    /// Total rate of clock events (switches, jumps, kills) in state `i`.
    pub fn event_rate(&self, i: usize) -> f64 {
        let c = &self.components[i];
        self.rates.exit_rate(i) + c.jump_rate + c.kill_rate
    }

    /// Whether the path can cross upward levels continuously.
    pub fn creeps_up(&self) -> bool {
        self.components.iter().any(|c| c.sigma2 > 0.0 || c.drift > 0.0)
    }

    /// Whether the path can cross downward levels continuously.
    pub fn creeps_down(&self) -> bool {
        self.components.iter().any(|c| c.sigma2 > 0.0 || c.drift < 0.0)
    }

    pub fn has_killing(&self) -> bool {
        self.components.iter().any(|c| c.kill_rate > 0.0)
    }

    /// The spec of `(-xi, J)`; the modulator is unchanged.
    pub fn negated(&self) -> MapSpec {
        MapSpec {
            rates: self.rates.clone(),
            components: self.components.iter().map(LevyComponent::negated).collect(),
            transitions: self
                .transitions
                .iter()
                .map(|row| row.iter().map(JumpLaw::reflected).collect())
                .collect(),
        }
    }

    /// The same spec with every kill rate set to zero.
    pub fn without_killing(&self) -> MapSpec {
        MapSpec {
            rates: self.rates.clone(),
            components: self
                .components
                .iter()
                .map(|c| LevyComponent {
                    kill_rate: 0.0,
                    ..c.clone()
                })
                .collect(),
            transitions: self.transitions.clone(),
        }
    }

    pub(crate) fn from_parts(
        rates: RateMatrix,
        components: Vec<LevyComponent>,
        transitions: Vec<Vec<JumpLaw>>,
    ) -> Result<Self> {
        let spec = MapSpec {
            rates,
            components,
            transitions,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("spec serializes")
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }
}

/// One off-diagonal transition-jump record in the configuration file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionRecord {
    pub from: usize,
    pub to: usize,
    pub law: JumpLaw,
}

/// On-disk layout of a [`MapSpec`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub states: usize,
    /// Must be true: lattice MAPs are not supported.
    #[serde(default = "default_true")]
    pub non_lattice: bool,
    pub rates: RateMatrix,
    pub components: Vec<LevyComponent>,
    #[serde(default)]
    pub transitions: Vec<TransitionRecord>,
}

fn default_true() -> bool {
    true
}

impl TryFrom<SpecFile> for MapSpec {
    type Error = Error;

    fn try_from(file: SpecFile) -> Result<Self> {
        if !file.non_lattice {
            return Err(Error::InvalidSpec("lattice MAPs are not supported (non_lattice must be true)".into()));
        }
        file.rates.validate()?;
        let n = file.rates.n();
        if file.states != n {
            return Err(Error::InvalidSpec(format!("states = {} but rates is {n}x{n}", file.states)));
        }
        let mut transitions = vec![vec![JumpLaw::zero(); n]; n];
        for record in file.transitions {
            if record.from >= n || record.to >= n || record.from == record.to {
                return Err(Error::InvalidSpec(format!(
                    "transition ({}, {}) is not an off-diagonal pair",
                    record.from, record.to
                )));
            }
            transitions[record.from][record.to] = record.law;
        }
        MapSpec::from_parts(file.rates, file.components, transitions)
    }
}

impl From<MapSpec> for SpecFile {
    fn from(spec: MapSpec) -> Self {
        let n = spec.n();
        let mut transitions = Vec::new();
        for (i, row) in spec.transitions.into_iter().enumerate() {
            for (j, law) in row.into_iter().enumerate() {
                if i != j && !law.is_zero() {
                    transitions.push(TransitionRecord { from: i, to: j, law });
                }
            }
        }
        SpecFile {
            states: n,
            non_lattice: true,
            rates: spec.rates,
            components: spec.components,
            transitions,
        }
    }
}

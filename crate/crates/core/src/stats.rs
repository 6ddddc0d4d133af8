//! Mergeable summary statistics and weighted empirical measures.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Count, mean and centred sum of squares; merges exactly (Chan et al.).
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct SummaryStat {
    count: u64,
    mean: f64,
    m2: f64,
}

impl SummaryStat {
    pub fn from_slice(xs: &[f64]) -> Self {
        let mut s = SummaryStat::default();
        for &x in xs {
            s.push(x);
        }
        s
    }

    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let d = x - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn merge(&self, other: &SummaryStat) -> SummaryStat {
        if self.count == 0 {
            return *other;
        }
        if other.count == 0 {
            return *self;
        }
        let n = self.count + other.count;
        let (na, nb) = (self.count as f64, other.count as f64);
        let d = other.mean - self.mean;
        SummaryStat {
            count: n,
            mean: self.mean + d * nb / n as f64,
            m2: self.m2 + other.m2 + d * d * na * nb / n as f64,
        }
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    pub fn standard_error(&self) -> f64 {
        if self.count == 0 {
            return f64::INFINITY;
        }
        (self.variance() / self.count as f64).sqrt()
    }
}

/// Real and imaginary parts tracked separately; SE is the modulus of the
/// two component SEs.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct ComplexStat {
    pub re: SummaryStat,
    pub im: SummaryStat,
}

impl ComplexStat {
    pub fn push(&mut self, z: Complex64) {
        self.re.push(z.re);
        self.im.push(z.im);
    }

    pub fn merge(&self, other: &ComplexStat) -> ComplexStat {
        ComplexStat {
            re: self.re.merge(&other.re),
            im: self.im.merge(&other.im),
        }
    }

    pub fn mean(&self) -> Complex64 {
        Complex64::new(self.re.mean(), self.im.mean())
    }

    pub fn standard_error(&self) -> f64 {
        self.re.standard_error().hypot(self.im.standard_error())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Atom {
    pub value: f64,
    pub state: usize,
    pub weight: f64,
}

/// Weighted atoms sorted by value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalMeasure {
    atoms: Vec<Atom>,
    total: f64,
}

impl EmpiricalMeasure {
    pub fn new(mut atoms: Vec<Atom>) -> Result<Self> {
        if atoms.iter().any(|a| !(a.weight >= 0.0) || !a.value.is_finite()) {
            return Err(Error::InvalidArgument("atoms need finite values and weights >= 0".into()));
        }
        atoms.sort_by(|a, b| a.value.total_cmp(&b.value).then(a.state.cmp(&b.state)));
        let total = atoms.iter().map(|a| a.weight).sum();
        Ok(EmpiricalMeasure { atoms, total })
    }

    /// Equal-weight atoms, all in state 0.
    pub fn from_values(values: impl IntoIterator<Item = f64>) -> Result<Self> {
        Self::new(
            values
                .into_iter()
                .map(|value| Atom {
                    value,
                    state: 0,
                    weight: 1.0,
                })
                .collect(),
        )
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (f64, usize)>) -> Result<Self> {
        Self::new(
            pairs
                .into_iter()
                .map(|(value, state)| Atom {
                    value,
                    state,
                    weight: 1.0,
                })
                .collect(),
        )
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty() || self.total <= 0.0
    }

    pub fn total_weight(&self) -> f64 {
        self.total
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let k = self.atoms.partition_point(|a| a.value <= x);
        self.atoms[..k].iter().map(|a| a.weight).sum::<f64>() / self.total
    }

    pub fn state_mass(&self, state: usize) -> f64 {
        self.atoms.iter().filter(|a| a.state == state).map(|a| a.weight).sum::<f64>() / self.total
    }

    pub fn restrict_to_state(&self, state: usize) -> Result<Self> {
        Self::new(self.atoms.iter().copied().filter(|a| a.state == state).collect())
    }

    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(
            self.atoms
                .iter()
                .map(|a| Atom {
                    value: f(a.value),
                    ..*a
                })
                .collect(),
        )
    }

    pub fn mean(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight * a.value).sum::<f64>() / self.total
    }

    /// Smallest atom value with CDF ≥ p.
    pub fn quantile(&self, p: f64) -> f64 {
        let target = p * self.total;
        let mut acc = 0.0;
        for a in &self.atoms {
            acc += a.weight;
            if acc >= target * (1.0 - 1e-15) {
                return a.value;
            }
        }
        self.atoms.last().map_or(f64::NAN, |a| a.value)
    }

    pub fn median(&self) -> f64 {
        self.quantile(0.5)
    }

    /// `E[f(X)]`.
    pub fn expectation(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.atoms.iter().map(|a| a.weight * f(a.value)).sum::<f64>() / self.total
    }

    /// Sup distance to a continuous reference CDF.
    pub fn ks_to_cdf(&self, cdf: impl Fn(f64) -> f64) -> Result<f64> {
        if self.is_empty() {
            return Err(Error::Empty("empirical measure".into()));
        }
        let mut acc = 0.0;
        let mut d: f64 = 0.0;
        let mut k = 0;
        while k < self.atoms.len() {
            let v = self.atoms[k].value;
            let f = cdf(v);
            d = d.max((f - acc / self.total).abs());
            while k < self.atoms.len() && self.atoms[k].value == v {
                acc += self.atoms[k].weight;
                k += 1;
            }
            d = d.max((acc / self.total - f).abs());
        }
        Ok(d)
    }

    /// `int |F_a - F_b| dx`.
    pub fn wasserstein1(&self, other: &EmpiricalMeasure) -> Result<f64> {
        let mut w = 0.0;
        let mut last = None;
        sweep(self, other, |x, fa, fb| {
            if let Some((x0, ga, gb)) = last {
                let (ga, gb): (f64, f64) = (ga, gb);
                w += (ga - gb).abs() * (x - x0);
            }
            last = Some((x, fa, fb));
        })?;
        Ok(w)
    }
}

/// Visits each distinct pooled value with both CDFs evaluated there.
fn sweep(a: &EmpiricalMeasure, b: &EmpiricalMeasure, mut visit: impl FnMut(f64, f64, f64)) -> Result<()> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Empty("empirical measure".into()));
    }
    let (mut i, mut j) = (0, 0);
    let (mut wa, mut wb) = (0.0, 0.0);
    while i < a.atoms.len() || j < b.atoms.len() {
        let va = a.atoms.get(i).map_or(f64::INFINITY, |x| x.value);
        let vb = b.atoms.get(j).map_or(f64::INFINITY, |x| x.value);
        let v = va.min(vb);
        while i < a.atoms.len() && a.atoms[i].value == v {
            wa += a.atoms[i].weight;
            i += 1;
        }
        while j < b.atoms.len() && b.atoms[j].value == v {
            wb += b.atoms[j].weight;
            j += 1;
        }
        visit(v, wa / a.total, wb / b.total);
    }
    Ok(())
}

/// Two-sample Kolmogorov-Smirnov distance over pooled atoms.
pub fn ks_distance(a: &EmpiricalMeasure, b: &EmpiricalMeasure) -> Result<f64> {
    let mut d: f64 = 0.0;
    sweep(a, b, |_, fa, fb| d = d.max((fa - fb).abs()))?;
    Ok(d.min(1.0))
}

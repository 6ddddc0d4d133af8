//! Parametric one-dimensional jump distributions.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Exp, Open01};
use serde::{Deserialize, Serialize};

use crate::quad;

/// Which half-line a one-sided family lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    Up,
    Down,
}

impl Side {
    pub fn flip(self) -> Self {
        match self {
            Side::Up => Side::Down,
            Side::Down => Side::Up,
        }
    }

    fn sign(self) -> f64 {
        match self {
            Side::Up => 1.0,
            Side::Down => -1.0,
        }
    }
}

/// Weighted component of a [`JumpLaw::Mixture`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixturePart {
    pub weight: f64,
    pub law: JumpLaw,
}

/// A probability law on the real line used for component jumps and for the
/// extra jumps inserted at modulator switches.
///
/// Parameters are in units of the additive coordinate (space); rates of the
/// exponential families are in 1/space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum JumpLaw {
    /// Dirac mass at `at`.
    Point { at: f64 },
    /// `Exp(rate)` on the positive half-line, mirrored when `side = down`.
    Exponential { rate: f64, side: Side },
    /// Up with probability `up_probability` as `Exp(up_rate)`, otherwise
    /// down as `-Exp(down_rate)`.
    TwoSidedExponential {
        up_probability: f64,
        up_rate: f64,
        down_rate: f64,
    },
    /// Uniform on `[low, high)`.
    Uniform { low: f64, high: f64 },
    /// Pareto tail `P(|X| >= x) = (cutoff / x)^index` for `x >= cutoff`.
    Pareto { index: f64, cutoff: f64, side: Side },
    /// Convex combination; weights are normalized on validation.
    Mixture { parts: Vec<MixturePart> },
    /// The law of `shift + X`.
    Shifted { shift: f64, law: Box<JumpLaw> },
}

/// Asymptotic decay class of one tail of a law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailClass {
    /// No mass beyond some finite point (including no mass at all).
    Bounded,
    /// Decays at least exponentially.
    Exponential,
    /// Regularly varying, `T(x) ~ c x^-index`.
    Power(f64),
}

impl TailClass {
    /// The heavier of two tails.
    pub fn heavier(self, other: TailClass) -> TailClass {
        use TailClass::*;
        match (self, other) {
            (Power(a), Power(b)) => Power(a.min(b)),
            (Power(a), _) | (_, Power(a)) => Power(a),
            (Exponential, _) | (_, Exponential) => Exponential,
            _ => Bounded,
        }
    }
}

impl JumpLaw {
    pub fn zero() -> Self {
        JumpLaw::Point { at: 0.0 }
    }

    pub fn exp_up(rate: f64) -> Self {
        JumpLaw::Exponential { rate, side: Side::Up }
    }

    pub fn exp_down(rate: f64) -> Self {
        JumpLaw::Exponential { rate, side: Side::Down }
    }

    /// True for the point mass at zero, the convention for absent jumps.
    pub fn is_zero(&self) -> bool {
        matches!(self, JumpLaw::Point { at } if *at == 0.0)
    }

    pub fn validate(&self) -> Result<(), String> {
        let finite = |v: f64, what: &str| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(format!("{what} must be finite"))
            }
        };
        match self {
            JumpLaw::Point { at } => finite(*at, "point location"),
            JumpLaw::Exponential { rate, .. } => {
                if *rate > 0.0 && rate.is_finite() {
                    Ok(())
                } else {
                    Err(format!("exponential rate must be positive, got {rate}"))
                }
            }
            JumpLaw::TwoSidedExponential {
                up_probability,
                up_rate,
                down_rate,
            } => {
                if !(0.0..=1.0).contains(up_probability) {
                    return Err(format!("up_probability {up_probability} outside [0, 1]"));
                }
                if !(*up_rate > 0.0 && *down_rate > 0.0 && up_rate.is_finite() && down_rate.is_finite()) {
                    return Err("two-sided exponential rates must be positive".into());
                }
                Ok(())
            }
            JumpLaw::Uniform { low, high } => {
                finite(*low, "uniform bound")?;
                finite(*high, "uniform bound")?;
                if low < high {
                    Ok(())
                } else {
                    Err(format!("uniform needs low < high, got [{low}, {high})"))
                }
            }
            JumpLaw::Pareto { index, cutoff, .. } => {
                if *index > 0.0 && *cutoff > 0.0 && index.is_finite() && cutoff.is_finite() {
                    Ok(())
                } else {
                    Err(format!("pareto needs positive index and cutoff, got {index}, {cutoff}"))
                }
            }
            JumpLaw::Mixture { parts } => {
                if parts.is_empty() {
                    return Err("mixture has no parts".into());
                }
                let mut total = 0.0;
                for part in parts {
                    if !(part.weight >= 0.0 && part.weight.is_finite()) {
                        return Err(format!("mixture weight {} must be non-negative", part.weight));
                    }
                    total += part.weight;
                    part.law.validate()?;
                }
                if total > 0.0 {
                    Ok(())
                } else {
                    Err("mixture weights sum to zero".into())
                }
            }
            JumpLaw::Shifted { shift, law } => {
                finite(*shift, "shift")?;
                law.validate()
            }
        }
    }

    fn mixture_total(parts: &[MixturePart]) -> f64 {
        parts.iter().map(|p| p.weight).sum()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            JumpLaw::Point { at } => *at,
            JumpLaw::Exponential { rate, side } => {
                side.sign() * Exp::new(*rate).expect("validated rate").sample(rng)
            }
            JumpLaw::TwoSidedExponential {
                up_probability,
                up_rate,
                down_rate,
            } => {
                let u: f64 = rng.random();
                let e: f64 = Exp::new(1.0).expect("unit rate").sample(rng);
                if u < *up_probability {
                    e / up_rate
                } else {
                    -e / down_rate
                }
            }
            JumpLaw::Uniform { low, high } => {
                let u: f64 = rng.random();
                low + (high - low) * u
            }
            JumpLaw::Pareto { index, cutoff, side } => {
                let u: f64 = Open01.sample(rng);
                side.sign() * cutoff * u.powf(-1.0 / index)
            }
            JumpLaw::Mixture { parts } => {
                let total = Self::mixture_total(parts);
                let mut u: f64 = rng.random::<f64>() * total;
                for part in parts {
                    if u < part.weight {
                        return part.law.sample(rng);
                    }
                    u -= part.weight;
                }
                let last = parts.iter().rev().find(|p| p.weight > 0.0).expect("validated");
                last.law.sample(rng)
            }
            JumpLaw::Shifted { shift, law } => shift + law.sample(rng),
        }
    }

    /// `P(X <= x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            JumpLaw::Point { at } => {
                if x >= *at {
                    1.0
                } else {
                    0.0
                }
            }
            JumpLaw::Exponential { rate, side } => match side {
                Side::Up => {
                    if x <= 0.0 {
                        0.0
                    } else {
                        -(-rate * x).exp_m1()
                    }
                }
                Side::Down => {
                    if x >= 0.0 {
                        1.0
                    } else {
                        (rate * x).exp()
                    }
                }
            },
            JumpLaw::TwoSidedExponential {
                up_probability,
                up_rate,
                down_rate,
            } => {
                let p = *up_probability;
                if x < 0.0 {
                    (1.0 - p) * (down_rate * x).exp()
                } else {
                    (1.0 - p) + p * -(-up_rate * x).exp_m1()
                }
            }
            JumpLaw::Uniform { low, high } => ((x - low) / (high - low)).clamp(0.0, 1.0),
            JumpLaw::Pareto { index, cutoff, side } => match side {
                Side::Up => {
                    if x < *cutoff {
                        0.0
                    } else {
                        1.0 - (cutoff / x).powf(*index)
                    }
                }
                Side::Down => {
                    if x <= -cutoff {
                        (cutoff / -x).powf(*index)
                    } else {
                        1.0
                    }
                }
            },
            JumpLaw::Mixture { parts } => {
                let total = Self::mixture_total(parts);
                parts.iter().map(|p| p.weight * p.law.cdf(x)).sum::<f64>() / total
            }
            JumpLaw::Shifted { shift, law } => law.cdf(x - shift),
        }
    }

    /// `P(X >= x)`.
    pub fn tail_up(&self, x: f64) -> f64 {
        match self {
            JumpLaw::Point { at } => {
                if *at >= x {
                    1.0
                } else {
                    0.0
                }
            }
            JumpLaw::Mixture { parts } => {
                let total = Self::mixture_total(parts);
                parts.iter().map(|p| p.weight * p.law.tail_up(x)).sum::<f64>() / total
            }
            JumpLaw::Shifted { shift, law } => law.tail_up(x - shift),
            JumpLaw::Exponential { rate, side: Side::Up } => {
                if x <= 0.0 {
                    1.0
                } else {
                    (-rate * x).exp()
                }
            }
            JumpLaw::TwoSidedExponential {
                up_probability,
                up_rate,
                ..
            } if x > 0.0 => up_probability * (-up_rate * x).exp(),
            JumpLaw::Pareto {
                index,
                cutoff,
                side: Side::Up,
            } => {
                if x <= *cutoff {
                    1.0
                } else {
                    (cutoff / x).powf(*index)
                }
            }
            // continuous laws: P(X >= x) = 1 - P(X <= x)
            _ => 1.0 - self.cdf(x),
        }
    }

    /// `P(X <= -x)`.
    pub fn tail_down(&self, x: f64) -> f64 {
        self.cdf(-x)
    }

    /// Mean, or `None` when the first absolute moment is infinite.
    pub fn mean(&self) -> Option<f64> {
        match self {
            JumpLaw::Point { at } => Some(*at),
            JumpLaw::Exponential { rate, side } => Some(side.sign() / rate),
            JumpLaw::TwoSidedExponential {
                up_probability,
                up_rate,
                down_rate,
            } => Some(up_probability / up_rate - (1.0 - up_probability) / down_rate),
            JumpLaw::Uniform { low, high } => Some(0.5 * (low + high)),
            JumpLaw::Pareto { index, cutoff, side } => {
                (*index > 1.0).then(|| side.sign() * index * cutoff / (index - 1.0))
            }
            JumpLaw::Mixture { parts } => {
                let total = Self::mixture_total(parts);
                let mut acc = 0.0;
                for p in parts.iter().filter(|p| p.weight > 0.0) {
                    acc += p.weight * p.law.mean()?;
                }
                Some(acc / total)
            }
            JumpLaw::Shifted { shift, law } => law.mean().map(|m| m + shift),
        }
    }

    /// Whether `E|X|^order` is finite, decided per family.
    pub fn has_abs_moment(&self, order: f64) -> bool {
        match self {
            JumpLaw::Pareto { index, .. } => *index > order,
            JumpLaw::Mixture { parts } => parts
                .iter()
                .filter(|p| p.weight > 0.0)
                .all(|p| p.law.has_abs_moment(order)),
            JumpLaw::Shifted { law, .. } => law.has_abs_moment(order),
            _ => true,
        }
    }

    /// Decay class of `P(X >= x)` as `x -> inf`.
    pub fn up_tail_class(&self) -> TailClass {
        match self {
            JumpLaw::Point { .. } | JumpLaw::Uniform { .. } => TailClass::Bounded,
            JumpLaw::Exponential { side, .. } => match side {
                Side::Up => TailClass::Exponential,
                Side::Down => TailClass::Bounded,
            },
            JumpLaw::TwoSidedExponential { up_probability, .. } => {
                if *up_probability > 0.0 {
                    TailClass::Exponential
                } else {
                    TailClass::Bounded
                }
            }
            JumpLaw::Pareto { index, side, .. } => match side {
                Side::Up => TailClass::Power(*index),
                Side::Down => TailClass::Bounded,
            },
            JumpLaw::Mixture { parts } => parts
                .iter()
                .filter(|p| p.weight > 0.0)
                .fold(TailClass::Bounded, |acc, p| acc.heavier(p.law.up_tail_class())),
            JumpLaw::Shifted { law, .. } => law.up_tail_class(),
        }
    }

    /// Decay class of `P(X <= -x)` as `x -> inf`.
    pub fn down_tail_class(&self) -> TailClass {
        self.reflected().up_tail_class()
    }

    /// The law of `-X`.
    pub fn reflected(&self) -> JumpLaw {
        match self {
            JumpLaw::Point { at } => JumpLaw::Point { at: -at },
            JumpLaw::Exponential { rate, side } => JumpLaw::Exponential {
                rate: *rate,
                side: side.flip(),
            },
            JumpLaw::TwoSidedExponential {
                up_probability,
                up_rate,
                down_rate,
            } => JumpLaw::TwoSidedExponential {
                up_probability: 1.0 - up_probability,
                up_rate: *down_rate,
                down_rate: *up_rate,
            },
            JumpLaw::Uniform { low, high } => JumpLaw::Uniform {
                low: -high,
                high: -low,
            },
            JumpLaw::Pareto { index, cutoff, side } => JumpLaw::Pareto {
                index: *index,
                cutoff: *cutoff,
                side: side.flip(),
            },
            JumpLaw::Mixture { parts } => JumpLaw::Mixture {
                parts: parts
                    .iter()
                    .map(|p| MixturePart {
                        weight: p.weight,
                        law: p.law.reflected(),
                    })
                    .collect(),
            },
            JumpLaw::Shifted { shift, law } => JumpLaw::Shifted {
                shift: -shift,
                law: Box::new(law.reflected()),
            },
        }
    }

    /// Moment generating function `E[exp(z X)]`, or a description of why `z`
    /// lies outside the transform domain.
    pub fn mgf(&self, z: Complex64) -> Result<Complex64, String> {
        let one = Complex64::new(1.0, 0.0);
        match self {
            JumpLaw::Point { at } => Ok((z * at).exp()),
            JumpLaw::Exponential { rate, side } => {
                let s = z * side.sign();
                if s.re < *rate {
                    Ok(*rate / (*rate - s))
                } else {
                    Err(format!("exponential(rate {rate}) needs Re(z) < {rate} on its side"))
                }
            }
            JumpLaw::TwoSidedExponential {
                up_probability,
                up_rate,
                down_rate,
            } => {
                if z.re < *up_rate && z.re > -down_rate {
                    Ok(*up_probability * *up_rate / (*up_rate - z)
                        + (1.0 - up_probability) * *down_rate / (*down_rate + z))
                } else {
                    Err(format!("two-sided exponential needs -{down_rate} < Re(z) < {up_rate}"))
                }
            }
            JumpLaw::Uniform { low, high } => {
                let w = z * (high - low);
                if w.norm() < 1e-5 {
                    Ok((z * low).exp() * (one + w / 2.0 + w * w / 6.0 + w * w * w / 24.0))
                } else {
                    Ok(((z * high).exp() - (z * low).exp()) / w)
                }
            }
            JumpLaw::Pareto { index, cutoff, side } => {
                let s = z * side.sign();
                if s.re > 0.0 {
                    return Err(format!("pareto(index {index}) has no exponential moments on its heavy side"));
                }
                Ok(pareto_transform(*index, *cutoff, s))
            }
            JumpLaw::Mixture { parts } => {
                let total = Self::mixture_total(parts);
                let mut acc = Complex64::new(0.0, 0.0);
                for p in parts.iter().filter(|p| p.weight > 0.0) {
                    acc += p.law.mgf(z)? * p.weight;
                }
                Ok(acc / total)
            }
            JumpLaw::Shifted { shift, law } => Ok((z * shift).exp() * law.mgf(z)?),
        }
    }
}

/// `E[exp(s X)]` for `X` Pareto on the positive side and `Re(s) <= 0`,
/// evaluated along the ray on which `exp(s x)` decays monotonically.
fn pareto_transform(index: f64, cutoff: f64, s: Complex64) -> Complex64 {
    let modulus = s.norm();
    if modulus == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    let direction = -s.conj() / modulus;
    let integral = quad::integrate_complex(
        |u| {
            let base = Complex64::new(cutoff, 0.0) + direction * (u / modulus);
            (-u).exp() * base.powf(-index - 1.0)
        },
        0.0,
        60.0,
        1e-15,
        1e-12,
    );
    index * cutoff.powf(index) * (s * cutoff).exp() * direction / modulus * integral
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pareto_up() -> JumpLaw {
        JumpLaw::Pareto {
            index: 3.0,
            cutoff: 1.0,
            side: Side::Up,
        }
    }

    #[test]
    fn tails_are_monotone_and_match_cdf() {
        let laws = [
            JumpLaw::exp_up(1.5),
            JumpLaw::TwoSidedExponential {
                up_probability: 0.3,
                up_rate: 2.0,
                down_rate: 0.5,
            },
            JumpLaw::Uniform { low: -1.0, high: 2.0 },
            pareto_up(),
        ];
        for law in &laws {
            let mut prev_up = f64::INFINITY;
            let mut prev_down = f64::INFINITY;
            for k in 0..50 {
                let x = 0.1 * k as f64;
                let up = law.tail_up(x);
                let down = law.tail_down(x);
                assert!(up <= prev_up + 1e-15 && down <= prev_down + 1e-15);
                prev_up = up;
                prev_down = down;
                if x > 0.0 {
                    assert!((up - (1.0 - law.cdf(x))).abs() < 1e-12, "{law:?} at {x}");
                }
            }
        }
    }

    #[test]
    fn mgf_at_zero_is_one() {
        let z = Complex64::new(0.0, 0.0);
        for law in [JumpLaw::exp_down(2.0), pareto_up(), JumpLaw::Uniform { low: 0.0, high: 1.0 }] {
            assert!((law.mgf(z).unwrap() - 1.0).norm() < 1e-12);
        }
    }

    #[test]
    fn pareto_transform_matches_direct_quadrature() {
        let law = pareto_up();
        for z in [Complex64::new(-1.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(-0.5, -2.0)] {
            let fast = law.mgf(z).unwrap();
            let direct = quad::integrate_complex(|x| (z * x).exp() * 3.0 * x.powf(-4.0), 1.0, 400.0, 1e-13, 1e-12);
            assert!((fast - direct).norm() < 1e-6, "z = {z}: {fast} vs {direct}");
        }
        assert!(law.mgf(Complex64::new(0.1, 0.0)).is_err());
    }

    #[test]
    fn uniform_mgf_near_zero_is_continuous() {
        let law = JumpLaw::Uniform { low: -0.5, high: 0.25 };
        let a = law.mgf(Complex64::new(1e-6, 0.0)).unwrap();
        let b = law.mgf(Complex64::new(1e-4, 0.0)).unwrap();
        assert!((a - 1.0).norm() < 1e-6);
        assert!((b.re - ((1e-4f64 * 0.25).exp() - (-1e-4f64 * 0.5).exp()) / (1e-4 * 0.75)).abs() < 1e-12);
    }

    #[test]
    fn moments_per_family() {
        assert_eq!(
            JumpLaw::Pareto {
                index: 0.5,
                cutoff: 1.0,
                side: Side::Up
            }
            .mean(),
            None
        );
        assert!((pareto_up().mean().unwrap() - 1.5).abs() < 1e-15);
        assert!(pareto_up().has_abs_moment(2.0));
        assert!(!pareto_up().has_abs_moment(3.0));
        let mix = JumpLaw::Mixture {
            parts: vec![
                MixturePart {
                    weight: 0.2,
                    law: JumpLaw::Pareto {
                        index: 2.0,
                        cutoff: 1.0,
                        side: Side::Up,
                    },
                },
                MixturePart {
                    weight: 0.8,
                    law: JumpLaw::Uniform { low: -1.0, high: 0.0 },
                },
            ],
        };
        assert_eq!(mix.mean(), Some(0.0));
        assert_eq!(mix.up_tail_class(), TailClass::Power(2.0));
        assert_eq!(mix.down_tail_class(), TailClass::Bounded);
    }

    #[test]
    fn reflection_is_an_involution() {
        let law = JumpLaw::Shifted {
            shift: 0.3,
            law: Box::new(JumpLaw::TwoSidedExponential {
                up_probability: 0.25,
                up_rate: 1.0,
                down_rate: 3.0,
            }),
        };
        assert_eq!(law.reflected().reflected(), law);
        assert!((law.reflected().mean().unwrap() + law.mean().unwrap()).abs() < 1e-15);
    }

    #[test]
    fn sample_mean_matches_analytic_mean() {
        let law = JumpLaw::TwoSidedExponential {
            up_probability: 0.4,
            up_rate: 2.0,
            down_rate: 1.0,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 200_000;
        let xs: Vec<f64> = (0..n).map(|_| law.sample(&mut rng)).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let se = (var / n as f64).sqrt();
        assert!((mean - law.mean().unwrap()).abs() < 4.0 * se);
    }
}

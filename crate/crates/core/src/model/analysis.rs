//! Analytic objects attached to a [`MapSpec`]: stationary law of the
//! modulator, matrix exponent, dual, long-run drift, regime and the
//! stationary-overshoot condition.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use super::jump_law::{JumpLaw, TailClass};
use super::spec::{LevyComponent, MapSpec, RateMatrix};
use crate::error::{Error, Result};
use crate::quad;

pub type CMatrix = DMatrix<Complex64>;

/// Stationary distribution of an irreducible intensity matrix.
pub fn stationary_distribution(q: &RateMatrix) -> Result<Vec<f64>> {
    if !q.is_irreducible() {
        return Err(Error::NotIrreducible);
    }
    let n = q.n();
    if n == 1 {
        return Ok(vec![1.0]);
    }
    // pi Q = 0 with the last equation replaced by sum(pi) = 1
    let mut a = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            a[(j, i)] = q.get(i, j);
        }
    }
    for i in 0..n {
        a[(n - 1, i)] = 1.0;
    }
    let mut b = nalgebra::DVector::<f64>::zeros(n);
    b[n - 1] = 1.0;
    let lu = a.clone().lu();
    let mut pi = lu.solve(&b).ok_or(Error::NotIrreducible)?;
    // one step of iterative refinement
    let residual = &b - &a * &pi;
    if let Some(correction) = lu.solve(&residual) {
        pi += correction;
    }
    let total: f64 = pi.iter().sum();
    Ok(pi.iter().map(|p| (p / total).max(0.0)).collect())
}

/// Max-norm of `pi Q`.
pub fn stationary_residual(q: &RateMatrix, pi: &[f64]) -> f64 {
    let n = q.n();
    (0..n)
        .map(|j| (0..n).map(|i| pi[i] * q.get(i, j)).sum::<f64>().abs())
        .fold(0.0, f64::max)
}

/// Laplace exponent `psi_i(z) = log E[exp(z xi^i_1)]` of one component,
/// including the killing term.
pub fn levy_exponent(c: &LevyComponent, z: Complex64) -> std::result::Result<Complex64, String> {
    let mut psi = z * c.drift + z * z * (0.5 * c.sigma2) - c.kill_rate;
    if c.jump_rate > 0.0 {
        psi += (c.jump_law.mgf(z)? - 1.0) * c.jump_rate;
    }
    Ok(psi)
}

/// Matrix exponent `F(z) = diag(psi_i(z)) + (q_ij G_ij(z))` with `G_ii = 1`.
pub fn matrix_exponent(spec: &MapSpec, z: Complex64) -> Result<CMatrix> {
    let n = spec.n();
    let domain = |what: String, e: String| Error::Domain {
        component: format!("{what}: {e}"),
        z: format!("{z}"),
    };
    let mut f = CMatrix::zeros(n, n);
    for i in 0..n {
        let psi = levy_exponent(spec.component(i), z).map_err(|e| domain(format!("component {i}"), e))?;
        for j in 0..n {
            let q = spec.rates().get(i, j);
            let g = if i == j || q == 0.0 {
                Complex64::new(1.0, 0.0)
            } else {
                spec.transition(i, j)
                    .mgf(z)
                    .map_err(|e| domain(format!("transition ({i}, {j})"), e))?
            };
            f[(i, j)] = g * q;
        }
        f[(i, i)] += psi;
    }
    Ok(f)
}

/// `exp(F(z) t)`, whose `(i, j)` entry is `E^{0,i}[exp(z xi_t); J_t = j]`.
pub fn transform_matrix(spec: &MapSpec, z: Complex64, t: f64) -> Result<CMatrix> {
    let f = matrix_exponent(spec, z)?;
    Ok((f * Complex64::new(t, 0.0)).exp())
}

/// `q [(qI - F(z))^{-1}]`, the transform of `(xi, J)` at an independent
/// `Exp(q)` time.
pub fn exponential_resolvent(spec: &MapSpec, z: Complex64, q: f64) -> Result<CMatrix> {
    let n = spec.n();
    let f = matrix_exponent(spec, z)?;
    let a = CMatrix::identity(n, n) * Complex64::new(q, 0.0) - f;
    let inv = a
        .try_inverse()
        .ok_or_else(|| Error::InvalidArgument(format!("qI - F(z) singular at q = {q}")))?;
    Ok(inv * Complex64::new(q, 0.0))
}

/// Dual MAP: rates `pi_j q_ji / pi_i`, negated components, and switch jumps
/// `hat Delta_ij ~ -Delta_ji`.
pub fn dual_spec(spec: &MapSpec) -> Result<MapSpec> {
    let pi = stationary_distribution(spec.rates())?;
    let n = spec.n();
    let mut rows = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                rows[i][j] = pi[j] / pi[i] * spec.rates().get(j, i);
            }
        }
        // keep the row sum exactly zero
        rows[i][i] = -rows[i].iter().enumerate().filter(|(j, _)| *j != i).map(|(_, q)| q).sum::<f64>();
    }
    let rates = RateMatrix::new(rows)?;
    let components = spec.components().iter().map(LevyComponent::negated).collect();
    let mut transitions = vec![vec![JumpLaw::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j && rates.get(i, j) > 0.0 {
                transitions[i][j] = spec.transition(j, i).reflected();
            }
        }
    }
    MapSpec::from_parts(rates, components, transitions)
}

/// Long-run mean `E^{0,pi}[xi_1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Drift {
    Finite(f64),
    /// Some component lacks a finite first absolute moment.
    Undefined,
}

impl Drift {
    pub fn value(self) -> Option<f64> {
        match self {
            Drift::Finite(v) => Some(v),
            Drift::Undefined => None,
        }
    }
}

fn drift_terms(spec: &MapSpec) -> Result<Option<Vec<f64>>> {
    let pi = stationary_distribution(spec.rates())?;
    let mut terms = Vec::new();
    for (i, c) in spec.components().iter().enumerate() {
        terms.push(pi[i] * c.drift);
        if c.jump_rate > 0.0 {
            match c.jump_law.mean() {
                Some(m) => terms.push(pi[i] * c.jump_rate * m),
                None => return Ok(None),
            }
        }
        for j in 0..spec.n() {
            let q = spec.rates().get(i, j);
            if i != j && q > 0.0 {
                match spec.transition(i, j).mean() {
                    Some(m) => terms.push(pi[i] * q * m),
                    None => return Ok(None),
                }
            }
        }
    }
    Ok(Some(terms))
}

/// `sum_i pi_i (a_i + r_i E[jump_i]) + sum_{i != j} pi_i q_ij E[Delta_ij]`.
pub fn asymptotic_drift(spec: &MapSpec) -> Result<Drift> {
    Ok(match drift_terms(spec)? {
        Some(terms) => Drift::Finite(terms.iter().sum()),
        None => Drift::Undefined,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    /// Drifts to minus infinity or is killed; zero is hit.
    Recurrent,
    DriftToPlusInfinity,
    Oscillating,
}

impl Regime {
    pub fn label(self) -> &'static str {
        match self {
            Regime::Recurrent => "R-recurrent",
            Regime::DriftToPlusInfinity => "T-drift-to-plus-infinity",
            Regime::Oscillating => "T-oscillating",
        }
    }

    pub fn is_transient(self) -> bool {
        self != Regime::Recurrent
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegimeVerdict {
    pub regime: Regime,
    pub mean: Drift,
}

/// R/T dichotomy from the sign of the long-run mean.
pub fn classify_regime(spec: &MapSpec) -> Result<RegimeVerdict> {
    let terms = drift_terms(spec)?;
    if spec.has_killing() {
        let mean = terms.map_or(Drift::Undefined, |t| Drift::Finite(t.iter().sum()));
        return Ok(RegimeVerdict {
            regime: Regime::Recurrent,
            mean,
        });
    }
    let terms = terms.ok_or(Error::RegimeUndecidable)?;
    let mean: f64 = terms.iter().sum();
    let scale: f64 = terms.iter().map(|t| t.abs()).sum();
    let regime = if mean.abs() <= 1e-12 * scale {
        Regime::Oscillating
    } else if mean > 0.0 {
        Regime::DriftToPlusInfinity
    } else {
        Regime::Recurrent
    };
    Ok(RegimeVerdict {
        regime,
        mean: Drift::Finite(mean),
    })
}

/// `Pi = sum_{i != j} q_ij L(Delta_ij) + sum_i Pi_i` as a weighted list of
/// parametric laws.
#[derive(Debug, Clone, PartialEq)]
pub struct AssembledJumpMeasure {
    pub parts: Vec<(f64, JumpLaw)>,
}

impl AssembledJumpMeasure {
    pub fn total_mass(&self) -> f64 {
        self.parts.iter().map(|(w, _)| w).sum()
    }

    /// `Pi([x, inf))`
    pub fn tail_up(&self, x: f64) -> f64 {
        self.parts.iter().map(|(w, law)| w * law.tail_up(x)).sum()
    }

    /// `Pi((-inf, -x])`
    pub fn tail_down(&self, x: f64) -> f64 {
        self.parts.iter().map(|(w, law)| w * law.tail_down(x)).sum()
    }

    pub fn up_tail_class(&self) -> TailClass {
        self.parts
            .iter()
            .fold(TailClass::Bounded, |acc, (_, law)| acc.heavier(law.up_tail_class()))
    }

    pub fn down_tail_class(&self) -> TailClass {
        self.parts
            .iter()
            .fold(TailClass::Bounded, |acc, (_, law)| acc.heavier(law.down_tail_class()))
    }

    /// `int_0^x int_y^inf Pi((-inf, -z]) dz dy = int_0^inf Pi((-inf,-z]) min(z, x) dz`.
    pub fn doubly_integrated_down_tail(&self, x: f64) -> f64 {
        let near = quad::integrate(|z| z * self.tail_down(z), 0.0, x, 1e-13, 1e-10);
        let far = quad::integrate_to_infinity(|z| self.tail_down(z), x, 1e-13, 1e-10);
        near + x * far
    }
}

pub fn assemble_jump_measure(spec: &MapSpec) -> AssembledJumpMeasure {
    let mut parts = Vec::new();
    for i in 0..spec.n() {
        for j in 0..spec.n() {
            let q = spec.rates().get(i, j);
            let law = spec.transition(i, j);
            if i != j && q > 0.0 && !law.is_zero() {
                parts.push((q, law.clone()));
            }
        }
    }
    for c in spec.components() {
        if c.has_jumps() {
            parts.push((c.jump_rate, c.jump_law.clone()));
        }
    }
    AssembledJumpMeasure { parts }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ConditionReason {
    FiniteMeanAndDrift,
    ToIntegralFinite,
    InfiniteAbsoluteMoment,
    ToIntegralDivergent,
    /// Boundary case of the tail-exponent test with a growing denominator.
    InconclusiveNumeric,
}

impl ConditionReason {
    pub fn label(self) -> &'static str {
        match self {
            ConditionReason::FiniteMeanAndDrift => "finite-mean-and-drift",
            ConditionReason::ToIntegralFinite => "TO-integral-finite",
            ConditionReason::InfiniteAbsoluteMoment => "infinite-absolute-moment",
            ConditionReason::ToIntegralDivergent => "TO-integral-divergent",
            ConditionReason::InconclusiveNumeric => "inconclusive-numeric",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionCVerdict {
    pub holds: bool,
    pub reason: ConditionReason,
    /// Numeric value of the integral when it was evaluated and converged.
    pub integral: Option<f64>,
    /// Human-readable certificate: which test decided and with what numbers.
    pub detail: String,
}

/// Lower limit of the integrability test.
pub const TO_LOWER_LIMIT: f64 = 1.0;
const TO_REL_TOL: f64 = 1e-6;
const TO_DIVERGENCE_THRESHOLD: f64 = 1e9;
const TO_MAX_DOUBLINGS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Quadrature {
    Converged(f64),
    Diverged(f64, f64),
    Unsettled(f64, f64),
}

fn to_integral_numeric(pi: &AssembledJumpMeasure) -> Quadrature {
    let integrand = |x: f64| x * pi.tail_up(x) / (1.0 + pi.doubly_integrated_down_tail(x));
    let mut lo = TO_LOWER_LIMIT;
    let mut total = 0.0;
    for k in 0..TO_MAX_DOUBLINGS {
        let hi = 2.0 * lo;
        let piece = quad::integrate(integrand, lo, hi, 1e-14, TO_REL_TOL * 1e-2);
        total += piece;
        if total > TO_DIVERGENCE_THRESHOLD {
            return Quadrature::Diverged(total, hi);
        }
        if k >= 3 && piece <= TO_REL_TOL * total {
            return Quadrature::Converged(total);
        }
        if total == 0.0 && k >= 3 {
            return Quadrature::Converged(0.0);
        }
        lo = hi;
    }
    Quadrature::Unsettled(total, lo)
}

/// Decides the stationary-overshoot condition: finite absolute moment and
/// either drift to plus infinity, or oscillation with the integrability
/// condition on the assembled jump measure.
pub fn check_condition_c(spec: &MapSpec) -> Result<ConditionCVerdict> {
    if !spec.rates().is_irreducible() {
        return Err(Error::NotIrreducible);
    }
    if spec.has_killing() {
        return Err(Error::RecurrentRegime);
    }
    let pi_measure = assemble_jump_measure(spec);
    let infinite = pi_measure.parts.iter().find(|(_, law)| !law.has_abs_moment(1.0));
    if let Some((w, law)) = infinite {
        return Ok(ConditionCVerdict {
            holds: false,
            reason: ConditionReason::InfiniteAbsoluteMoment,
            integral: None,
            detail: format!("jump law with weight {w} has infinite first absolute moment: {law:?}"),
        });
    }
    let regime = classify_regime(spec)?;
    match regime.regime {
        Regime::Recurrent => Err(Error::RecurrentRegime),
        Regime::DriftToPlusInfinity => Ok(ConditionCVerdict {
            holds: true,
            reason: ConditionReason::FiniteMeanAndDrift,
            integral: None,
            detail: format!("mean {:?} > 0", regime.mean),
        }),
        Regime::Oscillating => Ok(decide_to(&pi_measure)),
    }
}

fn decide_to(pi: &AssembledJumpMeasure) -> ConditionCVerdict {
    let finite = |integral: Option<f64>, detail: String| ConditionCVerdict {
        holds: true,
        reason: ConditionReason::ToIntegralFinite,
        integral,
        detail,
    };
    let divergent = |detail: String| ConditionCVerdict {
        holds: false,
        reason: ConditionReason::ToIntegralDivergent,
        integral: None,
        detail,
    };
    let numeric = to_integral_numeric(pi);
    let numeric_value = match numeric {
        Quadrature::Converged(v) => Some(v),
        _ => None,
    };
    match pi.up_tail_class() {
        TailClass::Bounded | TailClass::Exponential => finite(
            numeric_value,
            format!("upper tail decays at least exponentially; quadrature {numeric:?}"),
        ),
        TailClass::Power(p) => {
            // denominator ~ x^d; bounded when the lower tail has a finite
            // second moment
            let (d, bounded) = match pi.down_tail_class() {
                TailClass::Bounded | TailClass::Exponential => (0.0, true),
                TailClass::Power(q) if q > 2.0 => (0.0, true),
                TailClass::Power(q) => ((2.0 - q).max(0.0), false),
            };
            let exponent = 1.0 - p - d;
            let detail = format!("upper tail index {p}, denominator growth {d}, integrand exponent {exponent}");
            if exponent < -1.0 - 1e-12 {
                finite(numeric_value, detail)
            } else if exponent > -1.0 + 1e-12 || bounded {
                // at the boundary a bounded denominator leaves int c/x dx
                divergent(detail)
            } else {
                ConditionCVerdict {
                    holds: false,
                    reason: ConditionReason::InconclusiveNumeric,
                    integral: numeric_value,
                    detail: format!("{detail}; boundary case, quadrature {numeric:?}"),
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::jump_law::{MixturePart, Side};

    fn two_state_drifts(a0: f64, a1: f64) -> MapSpec {
        MapSpec::new(
            RateMatrix::two_state(1.0, 1.0).unwrap(),
            vec![LevyComponent::drift(a0), LevyComponent::drift(a1)],
        )
        .unwrap()
    }

    #[test]
    fn stationary_examples() {
        let pi = stationary_distribution(&RateMatrix::two_state(1.0, 1.0).unwrap()).unwrap();
        assert!((pi[0] - 0.5).abs() < 1e-15 && (pi[1] - 0.5).abs() < 1e-15);
        // pi_0 q_01 = pi_1 q_10 with q_01 = 2, q_10 = 1
        let q = RateMatrix::two_state(2.0, 1.0).unwrap();
        let pi = stationary_distribution(&q).unwrap();
        assert!((pi[0] - 1.0 / 3.0).abs() < 1e-14 && (pi[1] - 2.0 / 3.0).abs() < 1e-14);
        assert!(stationary_residual(&q, &pi) <= 1e-12);
        let cyclic = RateMatrix::new(vec![
            vec![-1.0, 1.0, 0.0],
            vec![0.0, -1.0, 1.0],
            vec![1.0, 0.0, -1.0],
        ])
        .unwrap();
        let pi = stationary_distribution(&cyclic).unwrap();
        assert!(pi.iter().all(|p| (p - 1.0 / 3.0).abs() < 1e-14));
        assert_eq!(
            stationary_distribution(&RateMatrix::two_state(1.0, 0.0).unwrap()),
            Err(Error::NotIrreducible)
        );
    }

    #[test]
    fn exponent_of_pure_drifts() {
        let spec = two_state_drifts(2.0, -1.0);
        let z = Complex64::new(0.7, 0.0);
        let f = matrix_exponent(&spec, z).unwrap();
        let expect = [[2.0 * 0.7 - 1.0, 1.0], [1.0, -0.7 - 1.0]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((f[(i, j)] - expect[i][j]).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn exponent_domain_error_names_component() {
        let spec = MapSpec::levy(LevyComponent::drift(0.0).with_jumps(1.0, JumpLaw::exp_up(1.0))).unwrap();
        let err = matrix_exponent(&spec, Complex64::new(2.0, 0.0)).unwrap_err();
        assert!(matches!(&err, Error::Domain { component, .. } if component.contains("component 0")));
    }

    #[test]
    fn dual_of_symmetric_spec_transposes_exponent() {
        let spec = MapSpec::new(
            RateMatrix::two_state(1.0, 1.0).unwrap(),
            vec![
                LevyComponent::brownian(0.3, 1.0).with_jumps(0.5, JumpLaw::exp_up(2.0)),
                LevyComponent::drift(-0.4),
            ],
        )
        .unwrap()
        .with_transition(0, 1, JumpLaw::Uniform { low: -0.2, high: 0.5 })
        .unwrap();
        let dual = dual_spec(&spec).unwrap();
        let z = Complex64::new(0.1, 0.8);
        let fd = matrix_exponent(&dual, z).unwrap();
        let f = matrix_exponent(&spec, -z).unwrap().transpose();
        assert!((fd - f).norm() < 1e-13);
    }

    #[test]
    fn drift_examples() {
        assert_eq!(asymptotic_drift(&two_state_drifts(2.0, -1.0)).unwrap(), Drift::Finite(0.5));
        let with_jumps = MapSpec::new(
            RateMatrix::two_state(1.0, 1.0).unwrap(),
            vec![
                LevyComponent::drift(2.0).with_jumps(1.0, JumpLaw::exp_up(1.0)),
                LevyComponent::drift(-1.0),
            ],
        )
        .unwrap();
        assert_eq!(asymptotic_drift(&with_jumps).unwrap(), Drift::Finite(1.0));
        let heavy = MapSpec::levy(LevyComponent::drift(0.0).with_jumps(
            1.0,
            JumpLaw::Pareto {
                index: 0.5,
                cutoff: 1.0,
                side: Side::Up,
            },
        ))
        .unwrap();
        assert_eq!(asymptotic_drift(&heavy).unwrap(), Drift::Undefined);
        assert_eq!(classify_regime(&heavy), Err(Error::RegimeUndecidable));
    }

    #[test]
    fn regime_examples() {
        assert_eq!(
            classify_regime(&two_state_drifts(2.0, -1.0)).unwrap().regime,
            Regime::DriftToPlusInfinity
        );
        assert_eq!(classify_regime(&two_state_drifts(1.0, -1.0)).unwrap().regime, Regime::Oscillating);
        let killed = MapSpec::new(
            RateMatrix::two_state(1.0, 1.0).unwrap(),
            vec![LevyComponent::drift(2.0).with_kill(0.1), LevyComponent::drift(-1.0)],
        )
        .unwrap();
        assert_eq!(classify_regime(&killed).unwrap().regime, Regime::Recurrent);
        assert_eq!(check_condition_c(&killed), Err(Error::RecurrentRegime));
    }

    #[test]
    fn assembled_measure_examples() {
        assert_eq!(assemble_jump_measure(&two_state_drifts(1.0, 1.0)).total_mass(), 0.0);
        let spec = MapSpec::new(
            RateMatrix::two_state(2.0, 1.0).unwrap(),
            vec![LevyComponent::drift(0.0), LevyComponent::drift(0.0)],
        )
        .unwrap()
        .with_transition(0, 1, JumpLaw::exp_up(1.0))
        .unwrap();
        let pi = assemble_jump_measure(&spec);
        assert!((pi.tail_up(1.5) - 2.0 * (-1.5f64).exp()).abs() < 1e-15);
        let spec = MapSpec::new(
            RateMatrix::two_state(1.0, 1.0).unwrap(),
            vec![
                LevyComponent::drift(0.0).with_jumps(1.0, JumpLaw::exp_up(1.0)),
                LevyComponent::drift(0.0).with_jumps(3.0, JumpLaw::exp_up(2.0)),
            ],
        )
        .unwrap();
        let pi = assemble_jump_measure(&spec);
        let x = 0.8f64;
        assert!((pi.tail_up(x) - ((-x).exp() + 3.0 * (-2.0 * x).exp())).abs() < 1e-15);
    }

    #[test]
    fn doubly_integrated_tail_of_exponential() {
        // Pi((-inf,-z]) = e^{-z}: int_0^x int_y^inf e^{-z} dz dy = 1 - e^{-x}
        let pi = AssembledJumpMeasure {
            parts: vec![(1.0, JumpLaw::exp_down(1.0))],
        };
        for x in [0.5, 2.0, 10.0] {
            assert!((pi.doubly_integrated_down_tail(x) - (1.0 - (-x).exp())).abs() < 1e-9);
        }
    }

    #[test]
    fn heavy_upper_tail_with_bounded_lower_jumps_diverges() {
        let law = JumpLaw::Mixture {
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
        let spec = MapSpec::new(
            RateMatrix::two_state(1.0, 1.0).unwrap(),
            vec![
                LevyComponent::drift(0.0).with_jumps(1.0, law.clone()),
                LevyComponent::drift(0.0).with_jumps(1.0, law),
            ],
        )
        .unwrap();
        let verdict = check_condition_c(&spec).unwrap();
        assert!(!verdict.holds);
        assert_eq!(verdict.reason, ConditionReason::ToIntegralDivergent);
        assert_eq!(check_condition_c(&spec).unwrap(), verdict);
    }

    #[test]
    fn tail_exponent_test_both_sides() {
        let pareto = |index, side| JumpLaw::Pareto {
            index,
            cutoff: 1.0,
            side,
        };
        // lower tail index 1.5 gives denominator growth 0.5; upper index 1.8
        // gives integrand exponent 1 - 1.8 - 0.5 = -1.3
        let pi = AssembledJumpMeasure {
            parts: vec![(1.0, pareto(1.8, Side::Up)), (1.0, pareto(1.5, Side::Down))],
        };
        let v = decide_to(&pi);
        assert_eq!(v.reason, ConditionReason::ToIntegralFinite, "{v:?}");
        let pi = AssembledJumpMeasure {
            parts: vec![(1.0, pareto(1.2, Side::Up)), (1.0, pareto(1.8, Side::Down))],
        };
        assert_eq!(decide_to(&pi).reason, ConditionReason::ToIntegralDivergent);
        let pi = AssembledJumpMeasure {
            parts: vec![(1.0, pareto(1.5, Side::Up)), (1.0, pareto(1.5, Side::Down))],
        };
        assert_eq!(decide_to(&pi).reason, ConditionReason::InconclusiveNumeric);
    }
}

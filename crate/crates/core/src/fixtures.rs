//! Named specs used by the acceptance suite and the CLI.

use crate::model::{JumpLaw, LevyComponent, MapSpec, MixturePart, RateMatrix, Side};

fn two_state(q01: f64, q10: f64, plus: LevyComponent, minus: LevyComponent) -> MapSpec {
    MapSpec::new(RateMatrix::two_state(q01, q10).expect("valid rates"), vec![plus, minus]).expect("valid fixture")
}

/// Unit drift in a single state: `Z_t = z + t` for `alpha = 1`.
pub fn deterministic() -> MapSpec {
    MapSpec::levy(LevyComponent::drift(1.0)).expect("valid fixture")
}

/// Drift -0.5 with Exp(1) up-jumps at rate 1 in both states. Crosses
/// levels only by jumps, so every overshoot is Exp(1).
pub fn exp_jump() -> MapSpec {
    let c = LevyComponent::drift(-0.5).with_jumps(1.0, JumpLaw::exp_up(1.0));
    two_state(1.0, 1.0, c.clone(), c)
}

/// Brownian components with drifts 0.5 and -0.25; positive mean.
pub fn brownian2() -> MapSpec {
    two_state(1.0, 2.0, LevyComponent::brownian(0.5, 1.0), LevyComponent::brownian(-0.25, 1.0))
}

/// Three states mixing every family, switch jumps and killing.
pub fn mixed() -> MapSpec {
    let rates = RateMatrix::new(vec![vec![-2.0, 1.5, 0.5], vec![1.0, -1.0, 0.0], vec![0.5, 0.5, -1.0]]).expect("valid rates");
    let components = vec![
        LevyComponent::brownian(0.2, 0.5).with_jumps(1.0, JumpLaw::exp_up(2.0)),
        LevyComponent::drift(-0.3).with_jumps(
            0.5,
            JumpLaw::TwoSidedExponential {
                up_probability: 0.3,
                up_rate: 1.0,
                down_rate: 3.0,
            },
        ),
        LevyComponent::drift(0.1)
            .with_jumps(0.2, JumpLaw::Pareto { index: 3.0, cutoff: 1.0, side: Side::Down })
            .with_kill(0.05),
    ];
    MapSpec::new(rates, components)
        .and_then(|s| s.with_transition(0, 1, JumpLaw::Uniform { low: -0.5, high: 0.5 }))
        .and_then(|s| s.with_transition(2, 0, JumpLaw::Point { at: 0.25 }))
        .expect("valid fixture")
}

/// Zero drift, symmetric two-sided exponential jumps; oscillates.
pub fn symmetric_jump() -> MapSpec {
    let law = |rate: f64| JumpLaw::TwoSidedExponential {
        up_probability: 0.5,
        up_rate: rate,
        down_rate: rate,
    };
    two_state(
        1.0,
        1.0,
        LevyComponent::drift(0.0).with_jumps(1.0, law(1.0)),
        LevyComponent::drift(0.0).with_jumps(2.0, law(2.0)),
    )
}

/// Oscillating with `Pi([x, oo)) = 0.2 x^-2` for `x >= 1` and downward jumps
/// in `[-1, 0)`.
pub fn heavy_tail_oscillating() -> MapSpec {
    let law = JumpLaw::Mixture {
        parts: vec![
            MixturePart { weight: 0.2, law: JumpLaw::Pareto { index: 2.0, cutoff: 1.0, side: Side::Up } },
            MixturePart { weight: 0.8, law: JumpLaw::Uniform { low: -1.0, high: 0.0 } },
        ],
    };
    let c = LevyComponent::drift(0.0).with_jumps(1.0, law);
    two_state(1.0, 1.0, c.clone(), c)
}

/// Upward jumps with infinite mean; no stationary overshoot.
pub fn c_failing() -> MapSpec {
    MapSpec::levy(LevyComponent::drift(-0.5).with_jumps(1.0, JumpLaw::Pareto { index: 0.5, cutoff: 1.0, side: Side::Up }))
        .expect("valid fixture")
}

/// Non-creeping spec with asymmetric jumps and switch jumps; negative mean,
/// so the walk leaves the half-line below zero almost surely.
pub fn occupation_fixture() -> MapSpec {
    two_state(
        1.0,
        1.0,
        LevyComponent::drift(0.0).with_jumps(
            1.0,
            JumpLaw::TwoSidedExponential {
                up_probability: 0.4,
                up_rate: 1.0,
                down_rate: 1.0,
            },
        ),
        LevyComponent::drift(0.0).with_jumps(
            2.0,
            JumpLaw::TwoSidedExponential {
                up_probability: 0.3,
                up_rate: 1.5,
                down_rate: 1.0,
            },
        ),
    )
    .with_transition(0, 1, JumpLaw::Uniform { low: -0.3, high: 0.2 })
    .and_then(|s| s.with_transition(1, 0, JumpLaw::Uniform { low: -0.2, high: 0.3 }))
    .expect("valid fixture")
}

/// Upward exponential jumps with different rates per state; drifts to
/// plus infinity without creeping upward.
pub fn two_state_jump() -> MapSpec {
    two_state(
        1.0,
        1.0,
        LevyComponent::drift(-0.5).with_jumps(2.0, JumpLaw::exp_up(1.0)),
        LevyComponent::drift(-1.0).with_jumps(1.0, JumpLaw::exp_up(2.0)),
    )
}

/// Single-state Exp(1) renewal walk: unit drift down, Exp(1) jumps at rate 2.
pub fn exp_renewal() -> MapSpec {
    MapSpec::levy(LevyComponent::drift(-1.0).with_jumps(2.0, JumpLaw::exp_up(1.0))).expect("valid fixture")
}

pub const NAMES: [&str; 10] = [
    "deterministic",
    "exp_jump",
    "brownian2",
    "mixed",
    "symmetric_jump",
    "heavy_tail_oscillating",
    "c_failing",
    "occupation",
    "two_state_jump",
    "exp_renewal",
];

pub fn by_name(name: &str) -> Option<MapSpec> {
    Some(match name {
        "deterministic" => deterministic(),
        "exp_jump" => exp_jump(),
        "brownian2" => brownian2(),
        "mixed" => mixed(),
        "symmetric_jump" => symmetric_jump(),
        "heavy_tail_oscillating" => heavy_tail_oscillating(),
        "c_failing" => c_failing(),
        "occupation" => occupation_fixture(),
        "two_state_jump" => two_state_jump(),
        "exp_renewal" => exp_renewal(),
        _ => return None,
    })
}

pub fn all() -> Vec<(&'static str, MapSpec)> {
    NAMES.iter().map(|&n| (n, by_name(n).expect("listed fixture"))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{check_condition_c, classify_regime, Regime};

    #[test]
    fn every_name_resolves() {
        assert_eq!(all().len(), NAMES.len());
        assert!(by_name("nope").is_none());
    }

    #[test]
    fn regimes() {
        let r = |s: MapSpec| classify_regime(&s).unwrap().regime;
        assert_eq!(r(exp_jump()), Regime::DriftToPlusInfinity);
        assert_eq!(r(brownian2()), Regime::DriftToPlusInfinity);
        assert_eq!(r(symmetric_jump()), Regime::Oscillating);
        assert_eq!(r(heavy_tail_oscillating()), Regime::Oscillating);
        assert_eq!(r(occupation_fixture()), Regime::Recurrent);
        assert_eq!(r(two_state_jump()), Regime::DriftToPlusInfinity);
        assert_eq!(r(mixed()), Regime::Recurrent);
    }

    #[test]
    fn condition_verdicts() {
        assert!(check_condition_c(&brownian2()).unwrap().holds);
        assert!(check_condition_c(&symmetric_jump()).unwrap().holds);
        assert!(!check_condition_c(&heavy_tail_oscillating()).unwrap().holds);
        assert!(!check_condition_c(&c_failing()).unwrap().holds);
    }
}

use kiu_core::fixtures;
use kiu_core::sim::{
    check_law_consistency, first_passage_up, simulate_path, simulate_path_with, Cause, CrossingMode, MapPath,
    PassageOutcome, PathOptions,
};
use kiu_core::{
    dual_spec, ks_distance, run_replicated, stationary_distribution, EmpiricalMeasure, JumpLaw, LevyComponent,
    MapSpec, RateMatrix, SeedPlan,
};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const KS_TOLERANCE: f64 = 0.03;
const SAMPLES: u64 = 20_000;

// Brownian and jump parts in both states, asymmetric switching, switch jumps
fn reversal_spec() -> MapSpec {
    MapSpec::new(
        RateMatrix::two_state(1.0, 2.5).unwrap(),
        vec![
            LevyComponent::brownian(0.4, 0.5).with_jumps(1.0, JumpLaw::exp_up(2.0)),
            LevyComponent::drift(-0.3).with_jumps(
                1.5,
                JumpLaw::TwoSidedExponential {
                    up_probability: 0.3,
                    up_rate: 1.0,
                    down_rate: 3.0,
                },
            ),
        ],
    )
    .unwrap()
    .with_transition(0, 1, JumpLaw::Uniform { low: -0.5, high: 0.2 })
    .unwrap()
    .with_transition(1, 0, JumpLaw::Point { at: 0.3 })
    .unwrap()
}

fn draw_state<R: Rng + ?Sized>(pi: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (k, p) in pi.iter().enumerate() {
        acc += p;
        if u < acc {
            return k;
        }
    }
    pi.len() - 1
}

// drift-only stretches give atoms whose location depends on rounding
fn snap(x: f64) -> f64 {
    (x * 1e9).round() / 1e9
}

fn grid_value(path: &MapPath, t: f64) -> (f64, usize) {
    let e = path
        .events
        .iter()
        .find(|e| e.cause == Cause::GridPoint && (e.time - t).abs() < 1e-9)
        .expect("grid point recorded");
    (e.value, e.state)
}

#[test]
fn transform_matches_simulation_at_two_horizons() {
    let zs = [Complex64::new(0.0, 1.0), Complex64::new(0.0, -0.5), Complex64::new(0.3, 0.0)];
    for (k, t) in [0.5, 2.0].into_iter().enumerate() {
        let plan = SeedPlan::new(41 + k as u64, 50_000);
        let report = check_law_consistency(&fixtures::mixed(), &zs, t, &plan).unwrap();
        for c in report.checks() {
            assert!(c.passed, "t = {t}: {} = {} > {}", c.name, c.statistic, c.tolerance);
        }
    }
}

#[test]
fn time_reversal_gives_the_dual() {
    let spec = reversal_spec();
    let dual = dual_spec(&spec).unwrap();
    let pi = stationary_distribution(spec.rates()).unwrap();
    let horizon = 2.0;
    let plan = SeedPlan::new(7, SAMPLES);
    let forward = run_replicated(&plan.derive("forward"), |_, rng| {
        let j0 = draw_state(&pi, rng);
        let opts = PathOptions { grid: Some(0.25) };
        simulate_path_with(&spec, (0.0, j0), horizon, &opts, rng)
    })
    .unwrap();
    let backward = run_replicated(&plan.derive("dual"), |_, rng| {
        let j0 = draw_state(&pi, rng);
        let opts = PathOptions { grid: Some(0.25) };
        simulate_path_with(&dual, (0.0, j0), horizon, &opts, rng)
    })
    .unwrap();
    for s in [0.5, 1.0] {
        // value at horizon - s seen from the endpoint, with the state there
        let reversed = forward.iter().map(|p| {
            let (end, _) = p.terminal();
            let (mid, state) = grid_value(p, horizon - s);
            (snap(mid - end), state)
        });
        let dual_values = backward.iter().map(|p| {
            let (x, state) = grid_value(p, s);
            (snap(x), state)
        });
        let a = EmpiricalMeasure::from_pairs(reversed).unwrap();
        let b = EmpiricalMeasure::from_pairs(dual_values).unwrap();
        for state in 0..2 {
            let ra = a.restrict_to_state(state).unwrap();
            let rb = b.restrict_to_state(state).unwrap();
            let ks = ks_distance(&ra, &rb).unwrap();
            assert!(ks <= KS_TOLERANCE, "s = {s}, state {state}: KS {ks}");
            let mass = (a.state_mass(state) - b.state_mass(state)).abs() / SAMPLES as f64;
            assert!(mass <= 0.02, "s = {s}, state {state}: mass gap {mass}");
        }
    }
}

#[test]
fn restarting_at_an_intermediate_time_preserves_the_law() {
    let spec = reversal_spec();
    let (s, t) = (0.75, 2.0);
    let plan = SeedPlan::new(9, SAMPLES);
    let continued = run_replicated(&plan.derive("continued"), |_, rng| {
        let p = simulate_path_with(&spec, (0.0, 0), t, &PathOptions { grid: Some(0.25) }, rng)?;
        let (mid, _) = grid_value(&p, s);
        Ok((snap(p.terminal().0 - mid), p.terminal().1))
    })
    .unwrap();
    let restarted = run_replicated(&plan.derive("restarted"), |_, rng| {
        let first = simulate_path(&spec, (0.0, 0), s, rng)?;
        let (mid, state) = first.terminal();
        let second = simulate_path(&spec, (mid, state), t - s, rng)?;
        Ok((snap(second.terminal().0 - mid), second.terminal().1))
    })
    .unwrap();
    let a = EmpiricalMeasure::from_pairs(continued).unwrap();
    let b = EmpiricalMeasure::from_pairs(restarted).unwrap();
    let ks = ks_distance(&a, &b).unwrap();
    assert!(ks <= KS_TOLERANCE, "KS {ks}");
    for state in 0..2 {
        let gap = (a.state_mass(state) - b.state_mass(state)).abs() / SAMPLES as f64;
        assert!(gap <= 0.02, "state {state}: mass gap {gap}");
    }
}

#[test]
fn same_seed_gives_the_same_path() {
    for (_, spec) in fixtures::all() {
        let run = || {
            let mut rng = ChaCha8Rng::seed_from_u64(3);
            simulate_path_with(&spec, (0.0, 0), 5.0, &PathOptions { grid: Some(0.5) }, &mut rng).unwrap()
        };
        assert_eq!(run(), run());
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn overshoot_is_never_negative(seed in any::<u64>(), level in 0.1f64..5.0, state in 0usize..2) {
        let spec = reversal_spec();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        if let PassageOutcome::Passed(p) = first_passage_up(&spec, (0.0, state), level, 1e4, &mut rng).unwrap() {
            prop_assert!(p.overshoot >= 0.0);
            prop_assert!(p.mode == CrossingMode::Jump || p.overshoot == 0.0);
        }
    }

    #[test]
    fn creeping_passages_land_on_the_level(seed in any::<u64>(), level in 0.1f64..5.0, drift in 0.1f64..2.0) {
        // no upward jumps and positive mean, so every passage is continuous
        let spec = MapSpec::levy(LevyComponent::brownian(drift + 1.0, 1.0).with_jumps(1.0, JumpLaw::exp_down(1.0))).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        match first_passage_up(&spec, (0.0, 0), level, 1e6, &mut rng).unwrap() {
            PassageOutcome::Passed(p) => {
                prop_assert_eq!(p.mode, CrossingMode::Creep);
                prop_assert_eq!(p.overshoot, 0.0);
            }
            other => prop_assert!(false, "{other:?}"),
        }
    }
}

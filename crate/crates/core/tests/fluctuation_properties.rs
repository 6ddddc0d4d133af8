use kiu_core::fixtures;
use kiu_core::fluctuation::{extract_ladder, run_ladder, verify_wiener_hopf_splitting, LadderRunConfig, LadderSide, Strictness};
use kiu_core::sim::simulate_path;
use kiu_core::SeedPlan;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn splitting_at_zero_holds_for_every_fixture() {
    for (name, spec) in fixtures::all() {
        let report = verify_wiener_hopf_splitting(&spec, 0.5, &[0.0], &SeedPlan::new(17, 10_000)).unwrap();
        for c in report.checks() {
            assert!(c.passed, "{name}: {} = {} > {}", c.name, c.statistic, c.tolerance);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn recorded_ladder_heights_strictly_increase(seed in any::<u64>(), state in 0usize..2, horizon in 1.0f64..50.0) {
        let up = fixtures::two_state_jump();
        for (side, spec) in [(LadderSide::Ascending, up.clone()), (LadderSide::Descending, up.negated())] {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let path = simulate_path(&spec, (0.0, state), horizon, &mut rng).unwrap();
            let ladder = extract_ladder(&spec, &path, side).unwrap();
            let heights = ladder.heights();
            prop_assert_eq!(heights[0], 0.0);
            prop_assert!(heights.windows(2).all(|w| w[1] > w[0]), "{heights:?}");
            prop_assert_eq!(&extract_ladder(&spec, &path, side).unwrap(), &ladder);
        }
    }

    #[test]
    fn strict_ladder_runs_strictly_increase(seed in any::<u64>(), state in 0usize..2) {
        let spec = fixtures::exp_jump();
        let cfg = LadderRunConfig {
            side: LadderSide::Ascending,
            strictness: Strictness::Strict,
            max_height: 20.0,
            escape_margin: 40.0,
            max_events: 100_000,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let run = run_ladder(&spec, state, &cfg, &mut rng).unwrap();
        prop_assert!(run.points.windows(2).all(|w| w[1].0 > w[0].0));
        prop_assert!(run.points.iter().all(|p| p.0 <= cfg.max_height));
    }
}

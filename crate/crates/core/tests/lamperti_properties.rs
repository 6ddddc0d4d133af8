use kiu_core::fixtures;
use kiu_core::lamperti::clock::linear_integral;
use kiu_core::lamperti::{first_exit, simulate_rssmp, to_rssmp, ScalingIndex, EXIT_CAP};
use kiu_core::sim::simulate_path;
use kiu_core::MapSpec;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn two_state_fixtures() -> Vec<MapSpec> {
    fixtures::all().into_iter().map(|(_, s)| s).filter(|s| s.n() <= 2 && !s.has_killing()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn clock_and_values_follow_the_map_path(seed in any::<u64>(), pick in 0usize..64, alpha in 0.25f64..3.0, x0 in -2.0f64..2.0) {
        let specs = two_state_fixtures();
        let spec = &specs[pick % specs.len()];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let state = if spec.n() == 2 { (seed % 2) as usize } else { 0 };
        let path = simulate_path(spec, (x0, state), 5.0, &mut rng).unwrap();
        let z = to_rssmp(&path, ScalingIndex::new(alpha).unwrap(), &mut rng);
        prop_assert!(z.pieces.windows(2).all(|w| w[0].phi1 == w[1].phi0));
        // heavy upward jumps can push the clock past the f64 range
        for p in z.pieces.iter().filter(|p| p.phi1.is_finite()) {
            // exact increments are positive; stored ones may round to zero on tiny pieces
            let inc = linear_integral(alpha, p.x0, p.x1, p.s1 - p.s0);
            prop_assert!(p.s1 == p.s0 || inc > 0.0);
            prop_assert!(p.phi1 >= p.phi0 && (p.phi1 - p.phi0 - inc).abs() <= 4.0 * f64::EPSILON * p.phi1);
        }
        for (e, m) in z.events.iter().zip(&path.events) {
            prop_assert_eq!(e.z.abs(), m.value.exp());
            prop_assert_eq!(e.z > 0.0, m.state == 0);
            if !e.t.is_finite() {
                continue;
            }
            // one ulp of the clock spans ulp / phi'(s) of MAP time, on
            // either side of a jump
            let before = z.pieces.iter().rev().find(|p| p.s1 <= m.time).map_or(m.value, |p| p.x1);
            let resolution = 4.0 * f64::EPSILON * e.t * (-alpha * before.min(m.value)).exp();
            let back = z.inverse_clock(e.t).unwrap();
            prop_assert!((back - m.time).abs() <= 1e-10 * (1.0 + m.time) + resolution, "{back} vs {}", m.time);
        }
    }

    #[test]
    fn transient_paths_never_reach_zero(seed in any::<u64>(), start in prop_oneof![-3.0f64..-0.01, 0.01f64..3.0]) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for spec in [fixtures::exp_jump(), fixtures::brownian2()] {
            let z = simulate_rssmp(&spec, ScalingIndex::new(1.0).unwrap(), start, 10.0, &mut rng).unwrap();
            prop_assert!(z.events.iter().all(|e| e.z != 0.0));
            for k in 1..=20 {
                prop_assert!(z.value_at(0.5 * k as f64).is_none_or(|v| v != 0.0));
            }
        }
    }

    #[test]
    fn exits_land_outside_the_interval(seed in any::<u64>(), eps in 0.01f64..1.0, frac in 0.01f64..0.99, up in any::<bool>()) {
        let start = if up { eps * frac } else { -eps * frac };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for spec in [fixtures::exp_jump(), fixtures::brownian2()] {
            let exit = first_exit(&spec, ScalingIndex::new(1.0).unwrap(), start, eps, EXIT_CAP, &mut rng)
                .unwrap()
                .require()
                .unwrap();
            prop_assert!(exit.value.abs() >= eps);
            // equality exactly when the level is crept over
            prop_assert_eq!(exit.overshoot == 0.0, (exit.value.abs() - eps).abs() <= 1e-12 * eps);
        }
    }
}

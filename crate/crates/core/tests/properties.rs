use akpz_core::height::{config_from_height, height_from_config};
use akpz_core::instances::{locally_equal_pair, ordered_pair, random_config, random_events, random_heights};
use akpz_core::sim::{couple_monotone, generate_events, localized_difference, simulate, step, Checkpoints, SimError, SimOptions};
use akpz_core::{Half, LocalizationBox, Window};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn window() -> Window {
    Window::new(-6, 6, Half(-24), Half(40)).unwrap()
}

fn region() -> LocalizationBox {
    LocalizationBox::new(-4, 4, Half(-12), Half(12)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn height_config_round_trip(seed in any::<u64>(), flips in 0usize..400) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_heights(&mut rng, &window(), flips);
        let cfg = config_from_height(&h).unwrap();
        prop_assert_eq!(&height_from_config(&cfg, None).unwrap(), &h);
        prop_assert_eq!(config_from_height(&height_from_config(&cfg, None).unwrap()).unwrap(), cfg);
    }

    #[test]
    fn steps_keep_interlacement(seed in any::<u64>(), flips in 0usize..400) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut cfg = random_config(&mut rng, &window(), flips);
        for e in random_events(&mut rng, &region(), 60, 1.0) {
            match step(&mut cfg, e.line, e.z2) {
                Ok(_) | Err(SimError::WindowExhausted { .. }) => {}
                Err(err) => return Err(TestCaseError::fail(format!("{err}"))),
            }
            prop_assert!(cfg.validate().is_ok());
        }
    }

    #[test]
    fn ordered_pairs_stay_ordered(seed in any::<u64>(), flips in 0usize..400) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (low, high) = ordered_pair(&mut rng, &window(), flips);
        let ev = generate_events(seed, region(), 2.0).unwrap();
        match couple_monotone(&low, &high, ev.iter(), &region(), &Checkpoints::EveryEvent) {
            Ok(rep) => prop_assert!(rep.holds(), "{:?}", rep.violations.first()),
            Err(akpz_core::sim::CouplingError::Sim(SimError::WindowExhausted { .. })) => {}
            Err(e) => return Err(TestCaseError::fail(format!("{e}"))),
        }
    }

    #[test]
    fn localized_dynamics_ignores_the_outside(seed in any::<u64>(), flips in 0usize..400) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b) = locally_equal_pair(&mut rng, &window(), &region(), flips);
        let ev = generate_events(seed, region(), 2.0).unwrap();
        match localized_difference(&a, &b, ev.iter(), &region(), &Checkpoints::EveryEvent) {
            Ok(diff) => prop_assert_eq!(diff, None),
            Err(akpz_core::sim::CouplingError::Sim(SimError::WindowExhausted { .. })) => {}
            Err(e) => return Err(TestCaseError::fail(format!("{e}"))),
        }
    }

    #[test]
    fn split_stream_runs_compose(seed in any::<u64>(), flips in 0usize..400, s in 0.0f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cfg = random_config(&mut rng, &window(), flips);
        let ev = generate_events(seed, region(), 3.0).unwrap();
        let opts = SimOptions::default();
        let whole = simulate(&cfg, ev.iter(), &opts);
        let first = simulate(&cfg, ev.iter().filter(|e| e.time <= s), &opts);
        let (Ok(whole), Ok(first)) = (whole, first) else { return Ok(()) };
        let Ok(second) = simulate(&first.final_cfg, ev.iter().filter(|e| e.time > s), &opts) else {
            return Ok(());
        };
        prop_assert_eq!(second.final_cfg, whole.final_cfg);
        prop_assert_eq!(first.jumps + second.jumps, whole.jumps);
    }
}

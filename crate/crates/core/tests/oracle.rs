use akpz_core::instances::{movable_particles, random_config, random_events, tiny_geometry};
use akpz_core::sim::oracle::DEFAULT_GUARD;
use akpz_core::sim::{simulate, variational_oracle, SimError, SimOptions};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn sequential_rule_matches_variational_formula_on_tiny_instances() {
    let (window, region) = tiny_geometry();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut checked, mut moved) = (0, 0);
    while checked < 500 {
        let cfg = random_config(&mut rng, &window, 40);
        if movable_particles(&cfg, &region) > 6 {
            continue;
        }
        let events = random_events(&mut rng, &region, 6, 1.0);
        let tr = match simulate(&cfg, events.iter().copied(), &SimOptions::default()) {
            Ok(tr) => tr,
            Err(SimError::WindowExhausted { .. }) => continue,
            Err(e) => panic!("{e}"),
        };
        let oracle = variational_oracle(&cfg, &events, 1.0, DEFAULT_GUARD).unwrap();
        let direct: Vec<_> = tr.final_cfg.particles().collect();
        assert_eq!(direct, oracle, "instance {checked}: {cfg:?} {events:?}");
        checked += 1;
        moved += (tr.jumps > 0) as u32;
    }
    // the comparison is not vacuous
    assert!(moved > 100, "{moved}");
}

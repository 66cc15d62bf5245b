use proptest::prelude::*;
use resourcetune::interval::union_all;
use resourcetune::scenario::{expected_utilization, generate_instance, ScenarioParams};
use resourcetune::MultipleInterval;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn generated_instances_hit_their_targets(
        seed in any::<u64>(),
        u in prop::sample::select(vec![0.5, 1.0, 2.0, 3.0]),
        p in prop::sample::select(vec![0.25, 0.5, 0.75]),
    ) {
        let instance = generate_instance(&ScenarioParams::new(u, p, seed)).unwrap();
        let (u_tr, u_sv, total) = expected_utilization(&instance.tracks, &instance.surveys);
        prop_assert!((u_tr - p * u).abs() < 1e-9);
        prop_assert!((u_sv - (1.0 - p) * u).abs() < 1e-9);
        prop_assert!((total - u).abs() < 1e-9);

        let domain = instance.spec.frequency_domain;
        for track in &instance.tracks {
            prop_assert!(track.goal_rate > 0.0 && track.goal_rate <= 1.0);
            prop_assert!((1..=3).contains(&track.emitters.len()));
            for e in &track.emitters {
                prop_assert!((1.0..=50.0).contains(&e.band.width()));
                prop_assert!(domain.contains(&e.band));
                prop_assert!(e.max_bandwidth >= e.band.width() && e.max_bandwidth <= 100.0);
            }
        }
        prop_assert_eq!(instance.surveys.len(), 10);
        for pair in instance.surveys.windows(2) {
            prop_assert!(pair[0].band.hi() <= pair[1].band.lo());
        }
        let bands: Vec<MultipleInterval> = instance.surveys.iter().map(|s| MultipleInterval::single(s.band)).collect();
        prop_assert_eq!(union_all(&bands), MultipleInterval::single(domain));
        for s in &instance.surveys {
            prop_assert!(s.goal_rate > 0.0 && s.goal_rate <= 1.0);
        }
    }
}

use proptest::prelude::*;
use resourcetune::model::Parent;
use resourcetune::planner::{construct_plan, feasible_positions};
use resourcetune::{Configuration, ConfigId, MultipleInterval, SingleInterval, SystemSpec, TuningPlan, Weight};

fn configs() -> impl Strategy<Value = (Vec<Configuration>, Vec<f64>)> {
    prop::collection::vec(
        (
            any::<bool>(),
            prop::collection::btree_set(0u32..6, 0..3),
            prop::collection::btree_set(0u32..10, 0..4),
            0.0f64..1.2,
        ),
        1..25,
    )
    .prop_map(|raw| {
        raw.into_iter()
            .enumerate()
            .filter(|(_, (_, t, s, _))| !(t.is_empty() && s.is_empty()))
            .map(|(i, (all, tracks, subs, rate))| {
                let lo = 100.0 + 10.0 * i as f64;
                let weight = if all { Weight::AllNodes } else { Weight::Single };
                let tracks = if all { tracks.into_iter().collect() } else { vec![] };
                let c = Configuration {
                    body: MultipleInterval::single(SingleInterval::new(lo, lo + 5.0).unwrap()),
                    weight,
                    observed_tracks: tracks,
                    observed_subsurveys: subs.into_iter().collect(),
                    parent: Parent::Tile(i as u32),
                };
                (c, rate)
            })
            .filter(|(c, _)| !c.observes_nothing())
            .unzip()
    })
}

fn ids_at(plan: &TuningPlan, step: usize) -> Vec<ConfigId> {
    let mut ids: Vec<ConfigId> = plan.cells_at(step).filter_map(|(_, _, c)| c.config).collect();
    ids.sort();
    ids.dedup();
    ids
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn constructed_plans_respect_invariants((configs, rates) in configs()) {
        let spec = SystemSpec::standard();
        let plan = construct_plan(&configs, &rates, &spec);
        let steps = plan.steps() as f64;
        for t in 0..plan.steps() {
            let ids = ids_at(&plan, t);
            for (i, a) in ids.iter().enumerate() {
                for b in &ids[i + 1..] {
                    prop_assert!(!configs[a.index()].overlaps(&configs[b.index()]));
                }
                // all-nodes configurations sit on exactly one receiver per node
                if configs[a.index()].weight == Weight::AllNodes {
                    for n in 0..plan.nodes() {
                        let here = (0..plan.receivers())
                            .filter(|&r| plan.cell(n, r, t).is_some_and(|c| c.config == Some(*a)))
                            .count();
                        prop_assert_eq!(here, 1);
                    }
                }
            }
        }
        for (i, &r) in rates.iter().enumerate() {
            let realized = plan.config_step_count(ConfigId(i as u32)) as f64 / steps;
            prop_assert!(realized <= r + 1.0 / steps + 1e-12);
        }
    }

    #[test]
    fn fragmentation_rule_only_removes_positions(
        (configs, rates) in configs(),
        probe in 0usize..25,
    ) {
        prop_assume!(!configs.is_empty());
        let spec = SystemSpec::standard();
        // a partly filled plan from a prefix of the configurations
        let half = configs.len() / 2;
        let mut prefix_rates = rates.clone();
        for r in &mut prefix_rates[half..] {
            *r = 0.0;
        }
        let plan = construct_plan(&configs, &prefix_rates, &spec);
        let id = ConfigId((probe % configs.len()) as u32);
        let q1 = feasible_positions(&plan, &configs, id, true);
        let q2 = feasible_positions(&plan, &configs, id, false);
        for p in &q1 {
            prop_assert!(q2.contains(p));
            let mut after = plan.clone();
            after.insert(id, &configs[id.index()], p).unwrap();
            prop_assert_eq!(after.cohesion(), plan.cohesion());
        }
    }
}

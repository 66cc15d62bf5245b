mod common;

use common::oracle::vertex_enumeration;
use proptest::prelude::*;
use resourcetune::rates::{
    current_rates, update_history, CoveringLp, CoveringSolver, DenseSimplex, HistoryState,
};

/// Covering LPs with every row covered by at least one column.
fn covering_lp(max_cols: usize, max_rows: usize) -> impl Strategy<Value = CoveringLp> {
    (1..=max_cols, 1..=max_rows).prop_flat_map(|(n, m)| {
        (
            prop::collection::vec(prop::sample::select(vec![1.0, 4.0]), n),
            prop::collection::vec(prop::collection::vec(any::<bool>(), m), n),
            prop::collection::vec(0.0f64..1.0, m),
        )
            .prop_map(move |(costs, cover, demands)| {
                let mut columns: Vec<Vec<u32>> = cover
                    .iter()
                    .map(|c| (0..m as u32).filter(|&i| c[i as usize]).collect())
                    .collect();
                for i in 0..m as u32 {
                    if !columns.iter().any(|c| c.contains(&i)) {
                        columns[i as usize % n].push(i);
                        columns[i as usize % n].sort_unstable();
                    }
                }
                CoveringLp { costs, columns, demands }
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn simplex_matches_vertex_enumeration(lp in covering_lp(6, 6)) {
        let x = DenseSimplex::default().solve(&lp).unwrap();
        let best = vertex_enumeration(&lp).unwrap();
        prop_assert!(lp.max_violation(&x) <= 1e-6);
        prop_assert!((lp.objective(&x) - best).abs() <= 1e-9, "{} vs {}", lp.objective(&x), best);
    }

    #[test]
    fn extra_columns_never_raise_the_objective(lp in covering_lp(6, 5), extra in covering_lp(3, 5)) {
        let base = lp.objective(&DenseSimplex::default().solve(&lp).unwrap());
        let mut bigger = lp.clone();
        for (c, col) in extra.costs.iter().zip(&extra.columns) {
            bigger.costs.push(*c);
            bigger.columns.push(col.iter().copied().filter(|&i| (i as usize) < lp.rows()).collect());
        }
        let grown = bigger.objective(&DenseSimplex::default().solve(&bigger).unwrap());
        prop_assert!(grown <= base + 1e-9);
    }

    #[test]
    fn realizing_demand_keeps_discounted_average_at_goal(
        goals in prop::collection::vec(0.0f64..=1.0, 1..5),
        discount in prop::sample::select(vec![0.5, 0.9, 0.99999]),
    ) {
        let mut h = HistoryState::new(goals.len(), discount).unwrap();
        for _ in 0..200 {
            let cur = current_rates(&h, &goals);
            update_history(&mut h, &cur);
            let norm = h.normalizer();
            for (&hx, &g) in h.history().iter().zip(&goals) {
                prop_assert!(hx / norm >= g - 1e-6);
            }
        }
    }
}

#[test]
fn realizing_goals_keeps_demand_at_goal() {
    let goals = [0.1, 0.45, 0.9];
    for discount in [0.5, 0.9, 0.99999] {
        let mut h = HistoryState::new(3, discount).unwrap();
        for _ in 0..50 {
            update_history(&mut h, &goals);
            for (c, g) in current_rates(&h, &goals).iter().zip(goals) {
                assert!((c - g).abs() < 1e-9, "{c} vs {g}");
            }
        }
    }
}

#[test]
fn three_tracks_shared_column_example() {
    let lp = CoveringLp {
        costs: vec![4.0; 4],
        columns: vec![vec![0, 1, 2], vec![0], vec![1], vec![2]],
        demands: vec![0.5, 0.3, 0.3],
    };
    assert!((vertex_enumeration(&lp).unwrap() - 2.0).abs() < 1e-12);
    let x = DenseSimplex::default().solve(&lp).unwrap();
    assert!((lp.objective(&x) - 2.0).abs() < 1e-12);
}

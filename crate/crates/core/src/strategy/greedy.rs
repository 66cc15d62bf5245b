use alloc::vec::Vec;

use super::{task_goals, CycleReport, Strategy};
use crate::clock::Stopwatch;
use crate::error::Result;
use crate::model::{Configuration, ConfigId, Instance, SubSurvey, SystemSpec, TuningPlan};
use crate::planner::{feasible_positions, select_position};
use crate::preprocess::{build_baseline_configurations, BaselineTiling};

/// Time-balance greedy baseline. Every task carries a balance that grows by
/// its goal rate each plan and shrinks by `1/|T|` per insertion observing it;
/// plans are filled with the configuration whose observed tasks have the
/// largest positive balance.
#[derive(Debug, Clone)]
pub struct Greedy {
    spec: SystemSpec,
    track_count: usize,
    subsurveys: Vec<SubSurvey>,
    configs: Vec<Configuration>,
    goals: Vec<f64>,
    balances: Vec<f64>,
}

/// `π_c = Σ_{x observed by c} max{0, b_x}`, tracks indexed first.
pub fn priority(config: &Configuration, balances: &[f64], track_count: usize) -> f64 {
    tasks(config, track_count).map(|x| balances[x].max(0.0)).sum()
}

fn tasks(config: &Configuration, track_count: usize) -> impl Iterator<Item = usize> + '_ {
    config
        .observed_tracks
        .iter()
        .map(|&t| t as usize)
        .chain(config.observed_subsurveys.iter().map(move |&s| track_count + s as usize))
}

impl Greedy {
    pub fn new(instance: &Instance, tiling: BaselineTiling) -> Result<Self> {
        instance.spec.validate()?;
        let base = build_baseline_configurations(&instance.tracks, &instance.surveys, &instance.spec, tiling);
        let goals = task_goals(&instance.tracks, &base.subsurveys);
        Ok(Self {
            spec: instance.spec.clone(),
            track_count: instance.tracks.len(),
            subsurveys: base.subsurveys,
            configs: base.configurations,
            balances: goals.clone(),
            goals,
        })
    }

    pub fn configurations(&self) -> &[Configuration] {
        &self.configs
    }

    pub fn subsurveys(&self) -> &[SubSurvey] {
        &self.subsurveys
    }

    /// Balances, tracks first.
    pub fn balances(&self) -> &[f64] {
        &self.balances
    }

    fn fill(&mut self) -> TuningPlan {
        let mut plan = TuningPlan::for_spec(&self.spec);
        let step_share = 1.0 / plan.steps() as f64;
        let mut order: Vec<(f64, usize)> = Vec::with_capacity(self.configs.len());
        loop {
            order.clear();
            for (i, c) in self.configs.iter().enumerate() {
                let p = priority(c, &self.balances, self.track_count);
                if p > 0.0 {
                    order.push((p, i));
                }
            }
            // stable: equal priorities keep construction order
            order.sort_by(|a, b| b.0.total_cmp(&a.0));
            let mut inserted = false;
            for &(_, i) in &order {
                let id = ConfigId(i as u32);
                let positions = feasible_positions(&plan, &self.configs, id, false);
                if let Some(position) = select_position(&positions, &plan) {
                    let c = &self.configs[i];
                    plan.insert(id, c, &position).expect("feasible position");
                    for x in tasks(c, self.track_count) {
                        self.balances[x] -= step_share;
                    }
                    inserted = true;
                    break;
                }
            }
            if !inserted {
                return plan;
            }
        }
    }
}

impl Strategy for Greedy {
    fn name(&self) -> &'static str {
        "greedy"
    }

    fn next_plan(&mut self, clock: &dyn Stopwatch) -> Result<CycleReport> {
        let start = clock.now();
        let plan = self.fill();
        for (b, g) in self.balances.iter_mut().zip(&self.goals) {
            *b += g;
        }
        Ok(CycleReport {
            plan,
            lp_seconds: 0.0,
            plan_seconds: (clock.now() - start).max(0.0),
            uncovered_tasks: 0,
            discarded: 0,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clock::FrozenClock;
    use crate::interval::{MultipleInterval, SingleInterval};
    use crate::model::{Emitter, InstanceMeta, Parent, Survey, SurveyId, Track, TrackId, Weight};
    use alloc::vec;

    fn si(lo: f64, hi: f64) -> SingleInterval {
        SingleInterval::new(lo, hi).unwrap()
    }

    #[test]
    fn priority_sums_positive_balances() {
        let c = Configuration {
            body: MultipleInterval::single(si(1.0, 2.0)),
            weight: Weight::AllNodes,
            observed_tracks: vec![0, 1],
            observed_subsurveys: vec![0],
            parent: Parent::Tile(0),
        };
        assert!((priority(&c, &[0.2, -0.1, 0.3], 2) - 0.5).abs() < 1e-15);
    }

    fn instance(track_goal: f64, survey_goal: f64) -> Instance {
        let spec = SystemSpec::standard();
        Instance {
            tracks: vec![Track::new(TrackId(0), vec![Emitter::new(si(10500.0, 10520.0), 100.0).unwrap()], track_goal).unwrap()],
            surveys: vec![Survey::new(SurveyId(0), si(12000.0, 12200.0), survey_goal).unwrap()],
            spec,
            meta: InstanceMeta::default(),
        }
    }

    #[test]
    fn insertion_lowers_balance_by_one_step() {
        let mut g = Greedy::new(&instance(0.3, 0.1), BaselineTiling::Interleaved).unwrap();
        let before = g.balances()[0];
        let plan = g.next_plan(&FrozenClock).unwrap().plan;
        let track = &instance(0.3, 0.1).tracks[0];
        let observed = (0..plan.steps()).filter(|&t| plan.track_observed_in_step(t, track)).count();
        // balance starts at 0.3, so three insertions drive it to zero
        assert_eq!(observed, 3);
        assert!((g.balances()[0] - (before - 0.3 + 0.3)).abs() < 1e-12);
    }

    #[test]
    fn nonpositive_balances_give_empty_plan() {
        let mut g = Greedy::new(&instance(0.3, 0.1), BaselineTiling::Interleaved).unwrap();
        for b in &mut g.balances {
            *b = -0.5;
        }
        let plan = g.next_plan(&FrozenClock).unwrap().plan;
        assert_eq!(plan.occupied_cells(), 0);
        assert!((g.balances()[0] - (-0.2)).abs() < 1e-12);
    }
}

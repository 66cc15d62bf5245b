use alloc::vec::Vec;

use super::{task_goals, CycleReport, Strategy};
use crate::clock::Stopwatch;
use crate::error::Result;
use crate::model::{Configuration, ConfigId, Instance, Parent, SubSurvey, SystemSpec, Track};
use crate::planner::construct_plan_with_stats;
use crate::preprocess::{build, dedup_unique_observation_sets, split_surveys, ConstructionVariant};
use crate::rates::{
    build_and_solve_rate_lp, current_rates, realized_rates, update_history, CoveringSolver,
    HistoryState, RateSolution,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResourceTuneParams {
    pub split_size: f64,
    pub discount: f64,
    pub variant: ConstructionVariant,
}

impl Default for ResourceTuneParams {
    fn default() -> Self {
        Self {
            split_size: 5.0,
            discount: 0.99999,
            variant: ConstructionVariant::LeftRight,
        }
    }
}

/// LP-driven scheduler: each cycle solves for insertion rates that restore
/// the discounted goal rates, builds a plan from them and folds the plan's
/// realized rates back into the history.
#[derive(Debug, Clone)]
pub struct ResourceTune<S> {
    spec: SystemSpec,
    tracks: Vec<Track>,
    subsurveys: Vec<SubSurvey>,
    configs: Vec<Configuration>,
    kept: Vec<ConfigId>,
    infeasible_parents: Vec<Parent>,
    goals: Vec<f64>,
    history: HistoryState,
    solver: S,
    last_solution: Option<RateSolution>,
}

impl<S: CoveringSolver> ResourceTune<S> {
    /// Splits surveys and builds the filtered configuration set once.
    pub fn new(instance: &Instance, params: ResourceTuneParams, solver: S) -> Result<Self> {
        instance.spec.validate()?;
        let subsurveys = split_surveys(&instance.surveys, params.split_size)?;
        let construction = build(&instance.tracks, &subsurveys, &instance.spec.shapes, params.variant);
        let kept = dedup_unique_observation_sets(&construction.configurations);
        let goals = task_goals(&instance.tracks, &subsurveys);
        let history = HistoryState::new(goals.len(), params.discount)?;
        Ok(Self {
            spec: instance.spec.clone(),
            tracks: instance.tracks.clone(),
            subsurveys,
            configs: construction.configurations,
            kept,
            infeasible_parents: construction.infeasible_parents,
            goals,
            history,
            solver,
            last_solution: None,
        })
    }

    pub fn configurations(&self) -> &[Configuration] {
        &self.configs
    }

    /// Configurations left after deduplication.
    pub fn filtered(&self) -> &[ConfigId] {
        &self.kept
    }

    pub fn subsurveys(&self) -> &[SubSurvey] {
        &self.subsurveys
    }

    pub fn infeasible_parents(&self) -> &[Parent] {
        &self.infeasible_parents
    }

    pub fn history(&self) -> &HistoryState {
        &self.history
    }

    /// Rate solution of the most recent cycle.
    pub fn last_solution(&self) -> Option<&RateSolution> {
        self.last_solution.as_ref()
    }

    /// Solves the rate LP for the current history without advancing.
    pub fn solve_rates(&mut self) -> Result<RateSolution> {
        let demands = current_rates(&self.history, &self.goals);
        build_and_solve_rate_lp(
            &self.configs,
            &self.kept,
            &demands,
            self.tracks.len(),
            self.spec.node_count,
            &mut self.solver,
        )
    }
}

impl<S: CoveringSolver> Strategy for ResourceTune<S> {
    fn name(&self) -> &'static str {
        "resourcetune"
    }

    fn next_plan(&mut self, clock: &dyn Stopwatch) -> Result<CycleReport> {
        let start = clock.now();
        let solution = self.solve_rates()?;
        let lp_done = clock.now();
        let (plan, stats) = construct_plan_with_stats(&self.configs, &solution.rates, &self.spec);
        let realized = realized_rates(&plan, &self.tracks, &self.subsurveys);
        update_history(&mut self.history, &realized);
        let end = clock.now();
        let report = CycleReport {
            plan,
            lp_seconds: (lp_done - start).max(0.0),
            plan_seconds: (end - lp_done).max(0.0),
            uncovered_tasks: solution.uncovered.len(),
            discarded: stats.discarded,
        };
        self.last_solution = Some(solution);
        Ok(report)
    }
}

//! Plan-emitting strategies behind one interface.

mod genetic;
mod greedy;
mod resource_tune;

pub use genetic::{Genetic, GeneticParams};
pub use greedy::{priority, Greedy};
pub use resource_tune::{ResourceTune, ResourceTuneParams};

use crate::clock::Stopwatch;
use crate::error::Result;
use crate::model::TuningPlan;

/// One cycle's output.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleReport {
    pub plan: TuningPlan,
    /// Seconds spent computing insertion rates (zero for the baselines).
    pub lp_seconds: f64,
    /// Seconds spent building the plan.
    pub plan_seconds: f64,
    /// Demanded tasks no configuration could cover.
    pub uncovered_tasks: usize,
    /// Configurations dropped during plan construction.
    pub discarded: usize,
}

impl CycleReport {
    pub fn total_seconds(&self) -> f64 {
        self.lp_seconds + self.plan_seconds
    }
}

/// Emits one tuning plan per call for a fixed task set.
pub trait Strategy {
    fn name(&self) -> &'static str;

    fn next_plan(&mut self, clock: &dyn Stopwatch) -> Result<CycleReport>;
}

/// Goal rates of tracks followed by those of `subsurveys`.
pub(crate) fn task_goals(tracks: &[crate::Track], subsurveys: &[crate::SubSurvey]) -> alloc::vec::Vec<f64> {
    tracks
        .iter()
        .map(|t| t.goal_rate)
        .chain(subsurveys.iter().map(|s| s.goal_rate))
        .collect()
}

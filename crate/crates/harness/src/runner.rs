//! Drives one strategy over one instance for a number of cycles.

use std::fmt;
use std::str::FromStr;

use resourcetune::clock::Stopwatch;
use resourcetune::evaluate::evaluate;
use resourcetune::preprocess::{BaselineTiling, ConstructionVariant};
use resourcetune::strategy::{Genetic, GeneticParams, Greedy, ResourceTune, ResourceTuneParams, Strategy};
use resourcetune::{Instance, TuningPlan};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};
use crate::solver::HighsSolver;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    ResourceTune,
    Greedy,
    Ga,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::ResourceTune, Algorithm::Greedy, Algorithm::Ga];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::ResourceTune => "resourcetune",
            Algorithm::Greedy => "greedy",
            Algorithm::Ga => "ga",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| HarnessError::Invalid(format!("unknown algorithm `{s}` (expected resourcetune, greedy or ga)")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub plans: usize,
    pub split_size: f64,
    pub discount: f64,
    /// Per-cycle time budget in seconds; the GA splits it across its two
    /// phases.
    pub budget_seconds: f64,
    pub variant: ConstructionVariant,
    pub tiling: BaselineTiling,
    /// Seed of the GA's random stream.
    pub algorithm_seed: u64,
    /// Caps GA generations per phase; set it together with a frozen clock
    /// for reproducible GA runs.
    pub ga_max_generations: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            plans: 100,
            split_size: 5.0,
            discount: 0.99999,
            budget_seconds: 2.0,
            variant: ConstructionVariant::LeftRight,
            tiling: BaselineTiling::Contiguous,
            algorithm_seed: 0,
            ga_max_generations: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.plans == 0 {
            return Err(HarnessError::Invalid("plan count must be at least 1".into()));
        }
        if !(self.split_size.is_finite() && self.split_size > 0.0) {
            return Err(HarnessError::Invalid("split size must be positive".into()));
        }
        if !(self.discount > 0.0 && self.discount < 1.0) {
            return Err(HarnessError::Invalid("discount must lie in (0, 1)".into()));
        }
        if !(self.budget_seconds.is_finite() && self.budget_seconds > 0.0) {
            return Err(HarnessError::Invalid("budget must be positive".into()));
        }
        Ok(())
    }
}

/// Timing of one cycle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CycleTiming {
    pub lp_seconds: f64,
    pub plan_seconds: f64,
    pub total_seconds: f64,
    pub overrun: bool,
    pub uncovered_tasks: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub instance_id: String,
    pub algorithm: Algorithm,
    pub scenario_u: f64,
    pub scenario_p: f64,
    pub plans: usize,
    pub objective: f64,
    pub lp_time_mean: f64,
    pub plan_time_mean: f64,
    pub total_time_mean: f64,
    pub total_time_max: f64,
    /// Instance seed.
    pub seed: u64,
    pub algorithm_seed: u64,
    /// Cycles whose total time exceeded the budget.
    pub overruns: usize,
    pub cycles: Vec<CycleTiming>,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub record: RunRecord,
    pub plans: Vec<TuningPlan>,
}

/// Builds the strategy for `algorithm`.
pub fn make_strategy(instance: &Instance, algorithm: Algorithm, config: &RunConfig) -> Result<Box<dyn Strategy>> {
    Ok(match algorithm {
        Algorithm::ResourceTune => {
            let params = ResourceTuneParams {
                split_size: config.split_size,
                discount: config.discount,
                variant: config.variant,
            };
            Box::new(ResourceTune::new(instance, params, HighsSolver)?)
        }
        Algorithm::Greedy => Box::new(Greedy::new(instance, config.tiling)?),
        Algorithm::Ga => {
            let params = GeneticParams {
                phase_seconds: config.budget_seconds / 2.0,
                max_generations: config.ga_max_generations,
                seed: config.algorithm_seed,
                ..GeneticParams::default()
            };
            Box::new(Genetic::new(instance, config.tiling, params)?)
        }
    })
}

/// Emits `config.plans` plans and scores the whole sequence. Budget
/// overruns are counted, never fatal.
pub fn run(
    instance_id: &str,
    instance: &Instance,
    algorithm: Algorithm,
    config: &RunConfig,
    clock: &dyn Stopwatch,
) -> Result<RunOutput> {
    config.validate()?;
    let mut strategy = make_strategy(instance, algorithm, config)?;
    let mut plans = Vec::with_capacity(config.plans);
    let mut cycles = Vec::with_capacity(config.plans);
    for _ in 0..config.plans {
        let report = strategy.next_plan(clock)?;
        let total = report.total_seconds();
        cycles.push(CycleTiming {
            lp_seconds: report.lp_seconds,
            plan_seconds: report.plan_seconds,
            total_seconds: total,
            overrun: total > config.budget_seconds,
            uncovered_tasks: report.uncovered_tasks,
        });
        plans.push(report.plan);
    }
    let objective = evaluate(&plans, &instance.tracks, &instance.surveys)?.total;
    let n = cycles.len() as f64;
    let mean = |f: fn(&CycleTiming) -> f64| cycles.iter().map(f).sum::<f64>() / n;
    let record = RunRecord {
        instance_id: instance_id.to_string(),
        algorithm,
        scenario_u: instance.meta.utilization,
        scenario_p: instance.meta.track_proportion,
        plans: plans.len(),
        objective,
        lp_time_mean: mean(|c| c.lp_seconds),
        plan_time_mean: mean(|c| c.plan_seconds),
        total_time_mean: mean(|c| c.total_seconds),
        total_time_max: cycles.iter().map(|c| c.total_seconds).fold(0.0, f64::max),
        seed: instance.meta.seed,
        algorithm_seed: config.algorithm_seed,
        overruns: cycles.iter().filter(|c| c.overrun).count(),
        cycles,
    };
    Ok(RunOutput { record, plans })
}

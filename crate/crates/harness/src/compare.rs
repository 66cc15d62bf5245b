//! Per-scenario aggregation: mean and SD of the objective, win counts and
//! quartiles of the objective normalized by each instance's best.

use std::collections::BTreeMap;

use rayon::prelude::*;
use resourcetune::clock::Stopwatch;
use resourcetune::Instance;
use serde::{Serialize, Serializer};

use crate::error::{HarnessError, Result};
use crate::runner::{run, Algorithm, RunConfig, RunRecord};

/// Objectives this close to the instance best count as a win.
pub const TIE_TOLERANCE: f64 = 1e-12;

fn finite_or_infinity<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_str("∞")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Quartiles {
    #[serde(serialize_with = "finite_or_infinity")]
    pub q1: f64,
    #[serde(serialize_with = "finite_or_infinity")]
    pub q2: f64,
    #[serde(serialize_with = "finite_or_infinity")]
    pub q3: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlgorithmSummary {
    pub algorithm: Algorithm,
    pub mean: f64,
    /// Sample standard deviation across instances.
    pub sd: f64,
    /// Instances where this algorithm reached the best objective, ties
    /// included.
    pub wins: usize,
    /// Wins shared with another algorithm.
    pub tied_wins: usize,
    pub normalized: Quartiles,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioSummary {
    pub utilization: f64,
    pub track_proportion: f64,
    pub instances: usize,
    pub algorithms: Vec<AlgorithmSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonTable {
    pub scenarios: Vec<ScenarioSummary>,
}

/// Linear-interpolation quantile (R's type 7) of ascending `sorted`.
pub fn quantile_type7(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    let (a, b) = (sorted[lo], sorted[hi]);
    if lo == hi || a == b {
        a
    } else {
        a + (h - lo as f64) * (b - a)
    }
}

/// Each objective divided by the smallest; `1` for algorithms at a zero best
/// and infinity for the others.
pub fn normalized_objectives(objectives: &[f64]) -> Vec<f64> {
    let best = objectives.iter().copied().fold(f64::INFINITY, f64::min);
    objectives
        .iter()
        .map(|&v| {
            if best > 0.0 {
                v / best
            } else if v <= TIE_TOLERANCE {
                1.0
            } else {
                f64::INFINITY
            }
        })
        .collect()
}

fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Aggregates run records by scenario `(U, p)`. Every instance must have one
/// record per algorithm.
pub fn compare_records(records: &[RunRecord]) -> Result<ComparisonTable> {
    if records.is_empty() {
        return Err(HarnessError::Invalid("no run records to compare".into()));
    }
    let mut algorithms: Vec<Algorithm> = records.iter().map(|r| r.algorithm).collect();
    algorithms.sort();
    algorithms.dedup();

    // scenario -> instance -> algorithm -> objective
    type Key = (u64, u64);
    let mut scenarios: BTreeMap<Key, BTreeMap<&str, BTreeMap<Algorithm, f64>>> = BTreeMap::new();
    for r in records {
        let key = (r.scenario_u.to_bits(), r.scenario_p.to_bits());
        let slot = scenarios.entry(key).or_default().entry(&r.instance_id).or_default();
        if slot.insert(r.algorithm, r.objective).is_some() {
            return Err(HarnessError::Invalid(format!(
                "duplicate record for {} / {}",
                r.instance_id, r.algorithm
            )));
        }
    }

    let mut keys: Vec<Key> = scenarios.keys().copied().collect();
    keys.sort_by(|a, b| {
        f64::from_bits(a.0)
            .total_cmp(&f64::from_bits(b.0))
            .then(f64::from_bits(a.1).total_cmp(&f64::from_bits(b.1)))
    });

    let mut out = Vec::new();
    for key in keys {
        let instances = &scenarios[&key];
        let mut objectives: BTreeMap<Algorithm, Vec<f64>> = BTreeMap::new();
        let mut normalized: BTreeMap<Algorithm, Vec<f64>> = BTreeMap::new();
        let mut wins: BTreeMap<Algorithm, (usize, usize)> = BTreeMap::new();
        for (id, per_alg) in instances {
            if per_alg.len() != algorithms.len() {
                return Err(HarnessError::Invalid(format!("instance {id} lacks a record for some algorithm")));
            }
            let values: Vec<f64> = algorithms.iter().map(|a| per_alg[a]).collect();
            let norm = normalized_objectives(&values);
            let best = values.iter().copied().fold(f64::INFINITY, f64::min);
            let winners: Vec<Algorithm> = algorithms
                .iter()
                .zip(&values)
                .filter(|(_, &v)| v <= best + TIE_TOLERANCE)
                .map(|(a, _)| *a)
                .collect();
            for w in &winners {
                let e = wins.entry(*w).or_default();
                e.0 += 1;
                if winners.len() > 1 {
                    e.1 += 1;
                }
            }
            for ((a, v), n) in algorithms.iter().zip(values).zip(norm) {
                objectives.entry(*a).or_default().push(v);
                normalized.entry(*a).or_default().push(n);
            }
        }
        let summaries = algorithms
            .iter()
            .map(|a| {
                let (mean, sd) = mean_sd(&objectives[a]);
                let mut norm = normalized[a].clone();
                norm.sort_by(f64::total_cmp);
                let (w, t) = wins.get(a).copied().unwrap_or_default();
                AlgorithmSummary {
                    algorithm: *a,
                    mean,
                    sd,
                    wins: w,
                    tied_wins: t,
                    normalized: Quartiles {
                        q1: quantile_type7(&norm, 0.25),
                        q2: quantile_type7(&norm, 0.5),
                        q3: quantile_type7(&norm, 0.75),
                    },
                }
            })
            .collect();
        out.push(ScenarioSummary {
            utilization: f64::from_bits(key.0),
            track_proportion: f64::from_bits(key.1),
            instances: instances.len(),
            algorithms: summaries,
        });
    }
    Ok(ComparisonTable { scenarios: out })
}

/// Runs every algorithm on every instance, instances in parallel, and
/// aggregates. Records come back in `(instance, algorithm)` input order.
pub fn compare(
    instances: &[(String, Instance)],
    algorithms: &[Algorithm],
    config: &RunConfig,
    clock: &(dyn Stopwatch + Sync),
) -> Result<(Vec<RunRecord>, ComparisonTable)> {
    if instances.is_empty() {
        return Err(HarnessError::Invalid("no instances to compare".into()));
    }
    if algorithms.len() < 2 {
        return Err(HarnessError::Invalid("compare needs at least two algorithms".into()));
    }
    let jobs: Vec<(&String, &Instance, Algorithm)> = instances
        .iter()
        .flat_map(|(id, inst)| algorithms.iter().map(move |&a| (id, inst, a)))
        .collect();
    let records = jobs
        .par_iter()
        .map(|(id, inst, a)| run(id, inst, *a, config, clock).map(|o| o.record))
        .collect::<Result<Vec<_>>>()?;
    let table = compare_records(&records)?;
    Ok((records, table))
}

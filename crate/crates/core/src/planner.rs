//! Plan construction from configurations and their goal insertion rates.
//!
//! Configurations wait in a queue ordered by how often they already appear
//! in the plan, heaviest and most demanded first. Each popped configuration
//! is placed where it neither repeats an observation already made in that
//! step nor costs an all-nodes slot; failing that, anywhere without a
//! repeated observation; failing both, it is dropped.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::model::{Configuration, ConfigId, Placement, Position, SystemSpec, TuningPlan, Weight};

/// Rates at or below this are treated as zero when queueing, absorbing
/// solver round-off.
pub const RATE_EPSILON: f64 = 1e-9;

/// Per-step record of which tasks are already observed by inserted
/// configurations.
#[derive(Debug, Clone)]
struct Occupancy {
    track_count: usize,
    task_count: usize,
    bits: Vec<bool>,
}

impl Occupancy {
    fn new(configs: &[Configuration], steps: usize) -> Self {
        let track_count = configs
            .iter()
            .flat_map(|c| c.observed_tracks.last())
            .max()
            .map_or(0, |&t| t as usize + 1);
        let sub_count = configs
            .iter()
            .flat_map(|c| c.observed_subsurveys.last())
            .max()
            .map_or(0, |&s| s as usize + 1);
        let task_count = track_count + sub_count;
        Self {
            track_count,
            task_count,
            bits: vec![false; task_count * steps],
        }
    }

    fn from_plan(plan: &TuningPlan, configs: &[Configuration]) -> Self {
        let mut occ = Self::new(configs, plan.steps());
        for t in 0..plan.steps() {
            let mut seen: Vec<ConfigId> = Vec::new();
            for (_, _, cell) in plan.cells_at(t) {
                if let Some(id) = cell.config {
                    if !seen.contains(&id) {
                        seen.push(id);
                        occ.mark(t, &configs[id.index()]);
                    }
                }
            }
        }
        occ
    }

    fn tasks<'c>(&self, c: &'c Configuration) -> impl Iterator<Item = usize> + 'c {
        let offset = self.track_count;
        c.observed_tracks
            .iter()
            .map(|&t| t as usize)
            .chain(c.observed_subsurveys.iter().map(move |&s| offset + s as usize))
    }

    fn overlaps(&self, step: usize, c: &Configuration) -> bool {
        let row = &self.bits[step * self.task_count..(step + 1) * self.task_count];
        self.tasks(c).any(|i| row[i])
    }

    fn mark(&mut self, step: usize, c: &Configuration) {
        let base = step * self.task_count;
        for i in self.tasks(c).collect::<Vec<_>>() {
            self.bits[base + i] = true;
        }
    }
}

/// Every position where `configs[id]` fits at an empty cell without
/// repeating an observation made by a configuration already in that step.
/// With `enforce_no_fragmentation`, only positions that leave the plan's
/// cohesion unchanged are kept.
pub fn feasible_positions(
    plan: &TuningPlan,
    configs: &[Configuration],
    id: ConfigId,
    enforce_no_fragmentation: bool,
) -> Vec<Position> {
    let occ = Occupancy::from_plan(plan, configs);
    let mut out = Vec::new();
    positions_into(plan, &occ, &configs[id.index()], enforce_no_fragmentation, &mut out);
    out
}

fn positions_into(
    plan: &TuningPlan,
    occ: &Occupancy,
    c: &Configuration,
    enforce_no_fragmentation: bool,
    out: &mut Vec<Position>,
) {
    for step in 0..plan.steps() {
        if occ.overlaps(step, c) {
            continue;
        }
        match c.weight {
            Weight::Single => {
                let min_free = plan.step_cohesion(step);
                for node in 0..plan.nodes() {
                    if enforce_no_fragmentation && plan.free_receivers(node, step) <= min_free {
                        continue;
                    }
                    for receiver in 0..plan.receivers() {
                        if plan.cell(node, receiver, step).is_none() {
                            out.push(Position {
                                step,
                                placement: Placement::Single { node, receiver },
                            });
                        }
                    }
                }
            }
            // Taking one receiver on every node always lowers the step's
            // cohesion.
            Weight::AllNodes if enforce_no_fragmentation => {}
            Weight::AllNodes => {
                let free: Vec<Vec<usize>> = (0..plan.nodes())
                    .map(|n| {
                        (0..plan.receivers())
                            .filter(|&r| plan.cell(n, r, step).is_none())
                            .collect()
                    })
                    .collect();
                if free.iter().any(Vec::is_empty) {
                    continue;
                }
                let mut pick = vec![0usize; free.len()];
                loop {
                    out.push(Position {
                        step,
                        placement: Placement::AllNodes(
                            pick.iter().zip(&free).map(|(&k, f)| f[k]).collect(),
                        ),
                    });
                    // odometer over the per-node choices, last node fastest
                    let Some(n) = (0..free.len()).rev().find(|&n| pick[n] + 1 < free[n].len()) else {
                        break;
                    };
                    pick[n] += 1;
                    for p in &mut pick[n + 1..] {
                        *p = 0;
                    }
                }
            }
        }
    }
}

/// Picks the position in the step with the fewest empty cells, then the
/// lowest step, node and receiver.
pub fn select_position(positions: &[Position], plan: &TuningPlan) -> Option<Position> {
    positions
        .iter()
        .min_by(|a, b| {
            plan.free_cells_at(a.step)
                .cmp(&plan.free_cells_at(b.step))
                .then(a.step.cmp(&b.step))
                .then_with(|| a.placement.cmp(&b.placement))
        })
        .cloned()
}

/// Queue entry; the heap pops the lexicographically least
/// `(R_c, −w_c, −r_c, construction order)`.
#[derive(Debug, Clone, Copy)]
struct Entry {
    inserted: usize,
    receivers: usize,
    rate: f64,
    id: ConfigId,
}

impl Entry {
    fn key_cmp(&self, other: &Self) -> Ordering {
        self.inserted
            .cmp(&other.inserted)
            .then(other.receivers.cmp(&self.receivers))
            .then(other.rate.total_cmp(&self.rate))
            .then(self.id.cmp(&other.id))
    }
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.key_cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    // Reversed so the max-heap yields the least key.
    fn cmp(&self, other: &Self) -> Ordering {
        other.key_cmp(self)
    }
}

/// Counters from one plan construction.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ConstructionStats {
    pub insertions: usize,
    /// Insertions that needed the fallback pass without the fragmentation
    /// rule.
    pub fallback_insertions: usize,
    /// Configurations dropped because no position was left for them.
    pub discarded: usize,
}

/// Builds one tuning plan; `rates` is indexed by configuration id.
pub fn construct_plan(configs: &[Configuration], rates: &[f64], spec: &SystemSpec) -> TuningPlan {
    construct_plan_with_stats(configs, rates, spec).0
}

pub fn construct_plan_with_stats(
    configs: &[Configuration],
    rates: &[f64],
    spec: &SystemSpec,
) -> (TuningPlan, ConstructionStats) {
    debug_assert_eq!(configs.len(), rates.len());
    let mut plan = TuningPlan::for_spec(spec);
    let mut occ = Occupancy::new(configs, plan.steps());
    let mut stats = ConstructionStats::default();
    let steps = plan.steps() as f64;

    let mut queue: BinaryHeap<Entry> = configs
        .iter()
        .zip(rates)
        .enumerate()
        .filter(|(_, (_, &r))| r > RATE_EPSILON)
        .map(|(i, (c, &rate))| Entry {
            inserted: 0,
            receivers: c.weight.receivers(spec.node_count),
            rate,
            id: ConfigId(i as u32),
        })
        .collect();

    let mut positions = Vec::new();
    while let Some(mut entry) = queue.pop() {
        let c = &configs[entry.id.index()];
        positions.clear();
        positions_into(&plan, &occ, c, true, &mut positions);
        let fallback = positions.is_empty();
        if fallback {
            positions_into(&plan, &occ, c, false, &mut positions);
        }
        let Some(position) = select_position(&positions, &plan) else {
            stats.discarded += 1;
            continue;
        };
        plan.insert(entry.id, c, &position)
            .expect("feasible position has empty cells");
        occ.mark(position.step, c);
        stats.insertions += 1;
        if fallback {
            stats.fallback_insertions += 1;
        }
        entry.inserted += 1;
        if entry.rate > entry.inserted as f64 / steps + RATE_EPSILON {
            queue.push(entry);
        }
    }
    (plan, stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::{MultipleInterval, SingleInterval};
    use crate::model::Parent;

    fn cfg(lo: f64, weight: Weight, tracks: &[u32], subs: &[u32]) -> Configuration {
        Configuration {
            body: MultipleInterval::single(SingleInterval::new(lo, lo + 10.0).unwrap()),
            weight,
            observed_tracks: tracks.to_vec(),
            observed_subsurveys: subs.to_vec(),
            parent: Parent::Tile(0),
        }
    }

    #[test]
    fn empty_plan_positions_for_single_weight() {
        let spec = SystemSpec::standard();
        let plan = TuningPlan::for_spec(&spec);
        let configs = [cfg(100.0, Weight::Single, &[], &[0])];
        assert_eq!(feasible_positions(&plan, &configs, ConfigId(0), false).len(), 80);
        assert!(feasible_positions(&plan, &configs, ConfigId(0), true).is_empty());
    }

    #[test]
    fn all_nodes_positions_enumerate_receiver_choices() {
        let spec = SystemSpec::standard();
        let plan = TuningPlan::for_spec(&spec);
        let configs = [cfg(100.0, Weight::AllNodes, &[0], &[])];
        assert_eq!(feasible_positions(&plan, &configs, ConfigId(0), false).len(), 16 * 10);
        assert!(feasible_positions(&plan, &configs, ConfigId(0), true).is_empty());
    }

    #[test]
    fn overlapping_step_is_excluded() {
        let spec = SystemSpec::standard();
        let mut plan = TuningPlan::for_spec(&spec);
        let configs = [cfg(100.0, Weight::AllNodes, &[0], &[]), cfg(200.0, Weight::Single, &[0], &[3])];
        let pos = Position { step: 2, placement: Placement::AllNodes(vec![0; 4]) };
        plan.insert(ConfigId(0), &configs[0], &pos).unwrap();
        let q = feasible_positions(&plan, &configs, ConfigId(1), false);
        assert!(q.iter().all(|p| p.step != 2));
        assert_eq!(q.len(), 9 * 8);
    }

    #[test]
    fn select_prefers_loaded_step() {
        let spec = SystemSpec::standard();
        let mut plan = TuningPlan::for_spec(&spec);
        let configs = [cfg(100.0, Weight::AllNodes, &[0], &[]), cfg(200.0, Weight::Single, &[], &[0])];
        plan.insert(ConfigId(0), &configs[0], &Position { step: 5, placement: Placement::AllNodes(vec![0; 4]) }).unwrap();
        let q = feasible_positions(&plan, &configs, ConfigId(1), false);
        let p = select_position(&q, &plan).unwrap();
        assert_eq!(p, Position { step: 5, placement: Placement::Single { node: 0, receiver: 1 } });
        assert!(select_position(&[], &plan).is_none());
    }

    #[test]
    fn all_nodes_config_inserted_rate_times_steps() {
        let spec = SystemSpec::standard();
        let configs = [cfg(100.0, Weight::AllNodes, &[0], &[])];
        let (plan, stats) = construct_plan_with_stats(&configs, &[0.3], &spec);
        assert_eq!(plan.config_step_count(ConfigId(0)), 3);
        assert_eq!(stats.insertions, 3);
        assert_eq!(stats.fallback_insertions, 3);
    }

    #[test]
    fn single_weight_configs_cluster() {
        let spec = SystemSpec::standard();
        let configs = [cfg(100.0, Weight::Single, &[], &[0]), cfg(200.0, Weight::Single, &[], &[1])];
        let plan = construct_plan(&configs, &[0.1, 0.1], &spec);
        assert_eq!(plan.occupied_cells(), 2);
        assert_eq!(plan.free_cells_at(0), 6);
        // the second one went to another node so cohesion stays at 9 * 2 + 1
        assert_eq!(plan.cohesion(), 19);
    }

    #[test]
    fn saturation_terminates() {
        let spec = SystemSpec::standard();
        let configs: Vec<_> = (0..30)
            .map(|i| cfg(100.0 + 20.0 * i as f64, if i % 2 == 0 { Weight::AllNodes } else { Weight::Single }, &[], &[i]))
            .collect();
        let rates = vec![1.0; 30];
        let (plan, stats) = construct_plan_with_stats(&configs, &rates, &spec);
        assert_eq!(plan.occupied_cells(), 80);
        assert!(stats.discarded > 0);
    }
}

//! Goal insertion rates and the discounted observation history.
//!
//! Tasks are indexed tracks first, then sub-surveys. Each cycle the demanded
//! rate of a task is what the next plan must realize so that the discounted
//! average over all plans so far meets the goal; a covering LP then assigns
//! every configuration the cheapest insertion rate that meets those demands.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::model::{Configuration, ConfigId, SubSurvey, Track, TuningPlan, Weight};

/// Discounted realized observation rates per task.
#[derive(Debug, Clone, PartialEq)]
pub struct HistoryState {
    discount: f64,
    history: Vec<f64>,
    plan_index: usize,
    /// `Σ_{i ≤ j} γ^i`, the normalizer of the next plan's average.
    next_normalizer: f64,
}

impl HistoryState {
    pub fn new(task_count: usize, discount: f64) -> Result<Self> {
        if !(discount > 0.0 && discount < 1.0) {
            return Err(Error::InvalidParameter("discount must lie in (0, 1)"));
        }
        Ok(Self {
            discount,
            history: vec![0.0; task_count],
            plan_index: 0,
            next_normalizer: 1.0,
        })
    }

    pub fn discount(&self) -> f64 {
        self.discount
    }

    /// Number of plans folded into the history.
    pub fn plan_index(&self) -> usize {
        self.plan_index
    }

    pub fn history(&self) -> &[f64] {
        &self.history
    }

    /// `(1 − γ^j) / (1 − γ)`: the discounted weight of the plans so far.
    pub fn normalizer(&self) -> f64 {
        (self.next_normalizer - 1.0) / self.discount
    }
}

/// Rate each task must be observed with in the next plan, clamped to
/// `[0, 1]`.
pub fn current_rates(history: &HistoryState, goals: &[f64]) -> Vec<f64> {
    debug_assert_eq!(goals.len(), history.history.len());
    goals
        .iter()
        .zip(&history.history)
        .map(|(&g, &h)| (history.next_normalizer * g - history.discount * h).clamp(0.0, 1.0))
        .collect()
}

/// Folds one plan's realized rates into the history: `H ← γH + R`.
pub fn update_history(history: &mut HistoryState, realized: &[f64]) {
    debug_assert_eq!(realized.len(), history.history.len());
    for (h, &r) in history.history.iter_mut().zip(realized) {
        *h = history.discount * *h + r;
    }
    history.plan_index += 1;
    history.next_normalizer = history.discount * history.next_normalizer + 1.0;
}

/// Realized rate of every task in `plan`, tracks first.
pub fn realized_rates(plan: &TuningPlan, tracks: &[Track], subsurveys: &[SubSurvey]) -> Vec<f64> {
    let steps = plan.steps() as f64;
    let mut out = vec![0.0; tracks.len() + subsurveys.len()];
    for t in 0..plan.steps() {
        for (slot, track) in out.iter_mut().zip(tracks) {
            if plan.track_observed_in_step(t, track) {
                *slot += 1.0;
            }
        }
        for (slot, sub) in out[tracks.len()..].iter_mut().zip(subsurveys) {
            if plan.band_observed_in_step(t, &sub.band) {
                *slot += 1.0;
            }
        }
    }
    for r in &mut out {
        *r /= steps;
    }
    out
}

/// `min Σ cost_j x_j` subject to `Σ_{j covers i} x_j ≥ demand_i`, `x ≥ 0`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CoveringLp {
    pub costs: Vec<f64>,
    /// Rows covered by each column, ascending.
    pub columns: Vec<Vec<u32>>,
    pub demands: Vec<f64>,
}

impl CoveringLp {
    pub fn rows(&self) -> usize {
        self.demands.len()
    }

    /// Largest demand shortfall of `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut cover = vec![0.0; self.rows()];
        for (col, &v) in self.columns.iter().zip(x) {
            for &i in col {
                cover[i as usize] += v;
            }
        }
        let negative = x.iter().fold(0.0f64, |m, &v| m.max(-v));
        cover
            .iter()
            .zip(&self.demands)
            .fold(negative, |m, (&c, &d)| m.max(d - c))
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        self.costs.iter().zip(x).map(|(c, v)| c * v).sum()
    }
}

/// Backend that solves a covering LP whose every row is covered by at least
/// one column.
pub trait CoveringSolver {
    fn solve(&mut self, lp: &CoveringLp) -> Result<Vec<f64>>;
}

/// Dense tableau simplex on the dual packing problem
/// `max Σ d_i y_i` s.t. `Σ_{i ∈ column j} y_i ≤ cost_j`, `y ≥ 0`.
///
/// The slack basis is feasible from the start, so no phase one is needed, and
/// the primal solution is read off the reduced costs of the slacks. Bland's
/// rule keeps it from cycling. Memory grows with `columns × (rows + columns)`,
/// so this is meant for small and medium problems.
#[derive(Debug, Clone, Copy)]
pub struct DenseSimplex {
    pub tolerance: f64,
    pub max_pivots: usize,
}

impl Default for DenseSimplex {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            max_pivots: 1_000_000,
        }
    }
}

impl CoveringSolver for DenseSimplex {
    fn solve(&mut self, lp: &CoveringLp) -> Result<Vec<f64>> {
        let m = lp.rows();
        let n = lp.costs.len();
        if m == 0 {
            return Ok(vec![0.0; n]);
        }
        let width = m + n + 1;
        let rhs = m + n;
        // Row j holds dual constraint j; the last row is the objective.
        let mut t = vec![0.0; (n + 1) * width];
        for (j, col) in lp.columns.iter().enumerate() {
            let row = &mut t[j * width..(j + 1) * width];
            for &i in col {
                row[i as usize] = 1.0;
            }
            row[m + j] = 1.0;
            row[rhs] = lp.costs[j];
        }
        for (i, &d) in lp.demands.iter().enumerate() {
            t[n * width + i] = -d;
        }
        let mut basis: Vec<usize> = (m..m + n).collect();
        let eps = self.tolerance;

        for _ in 0..self.max_pivots {
            let obj = &t[n * width..];
            let Some(enter) = (0..m + n).find(|&k| obj[k] < -eps) else {
                let obj = &t[n * width..];
                return Ok((0..n).map(|j| obj[m + j].max(0.0)).collect());
            };
            let mut leave: Option<(usize, f64)> = None;
            for j in 0..n {
                let a = t[j * width + enter];
                if a > eps {
                    let ratio = t[j * width + rhs] / a;
                    let better = match leave {
                        None => true,
                        Some((l, best)) => {
                            ratio < best - eps || (ratio <= best + eps && basis[j] < basis[l])
                        }
                    };
                    if better {
                        leave = Some((j, ratio));
                    }
                }
            }
            let Some((p, _)) = leave else {
                return Err(Error::Solver("covering LP is infeasible"));
            };
            pivot(&mut t, width, n + 1, p, enter);
            basis[p] = enter;
        }
        Err(Error::Solver("pivot limit reached"))
    }
}

fn pivot(t: &mut [f64], width: usize, rows: usize, p: usize, q: usize) {
    let inv = 1.0 / t[p * width + q];
    for v in &mut t[p * width..(p + 1) * width] {
        *v *= inv;
    }
    let pivot_row: Vec<f64> = t[p * width..(p + 1) * width].to_vec();
    for r in 0..rows {
        if r == p {
            continue;
        }
        let f = t[r * width + q];
        if f == 0.0 {
            continue;
        }
        for (v, &pv) in t[r * width..(r + 1) * width].iter_mut().zip(&pivot_row) {
            *v -= f * pv;
        }
        t[r * width + q] = 0.0;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    /// Some demanded task had no covering configuration; its constraint was
    /// dropped.
    InfeasibleFallback,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateSolution {
    /// Insertion rate of every configuration, by id; zero for configurations
    /// outside the filtered set.
    pub rates: Vec<f64>,
    pub objective: f64,
    pub status: LpStatus,
    /// Task indices (tracks first) whose constraint was dropped.
    pub uncovered: Vec<usize>,
}

/// LP column cost of a configuration.
pub fn weight_cost(weight: Weight, node_count: usize) -> f64 {
    weight.receivers(node_count) as f64
}

/// Assembles the covering LP over the configurations in `kept` for the tasks
/// with positive demand. Returns the LP, the task index of each LP row, and
/// the demanded tasks that no configuration covers.
pub fn build_rate_lp(
    configs: &[Configuration],
    kept: &[ConfigId],
    demands: &[f64],
    track_count: usize,
    node_count: usize,
) -> (CoveringLp, Vec<usize>, Vec<usize>) {
    let mut covered = vec![false; demands.len()];
    for id in kept {
        let c = &configs[id.index()];
        for &t in &c.observed_tracks {
            covered[t as usize] = true;
        }
        for &s in &c.observed_subsurveys {
            covered[track_count + s as usize] = true;
        }
    }
    let mut row_of = vec![u32::MAX; demands.len()];
    let mut row_task = Vec::new();
    let mut uncovered = Vec::new();
    for (task, &d) in demands.iter().enumerate() {
        if d > 0.0 {
            if covered[task] {
                row_of[task] = row_task.len() as u32;
                row_task.push(task);
            } else {
                uncovered.push(task);
            }
        }
    }

    let mut lp = CoveringLp {
        costs: Vec::with_capacity(kept.len()),
        columns: Vec::with_capacity(kept.len()),
        demands: row_task.iter().map(|&t| demands[t]).collect(),
    };
    for id in kept {
        let c = &configs[id.index()];
        let tasks = c
            .observed_tracks
            .iter()
            .map(|&t| t as usize)
            .chain(c.observed_subsurveys.iter().map(|&s| track_count + s as usize));
        let mut rows: Vec<u32> = tasks.map(|t| row_of[t]).filter(|&r| r != u32::MAX).collect();
        rows.sort_unstable();
        lp.costs.push(weight_cost(c.weight, node_count));
        lp.columns.push(rows);
    }
    (lp, row_task, uncovered)
}

/// Solves for the cheapest insertion rates that meet `demands`.
pub fn build_and_solve_rate_lp<S: CoveringSolver + ?Sized>(
    configs: &[Configuration],
    kept: &[ConfigId],
    demands: &[f64],
    track_count: usize,
    node_count: usize,
    solver: &mut S,
) -> Result<RateSolution> {
    let (lp, _, uncovered) = build_rate_lp(configs, kept, demands, track_count, node_count);
    let x = solver.solve(&lp)?;
    if x.len() != kept.len() {
        return Err(Error::Solver("solution length does not match column count"));
    }
    let mut rates = vec![0.0; configs.len()];
    for (id, &v) in kept.iter().zip(&x) {
        rates[id.index()] = v.max(0.0);
    }
    let objective = kept
        .iter()
        .map(|id| weight_cost(configs[id.index()].weight, node_count) * rates[id.index()])
        .sum();
    let status = if uncovered.is_empty() {
        LpStatus::Optimal
    } else {
        LpStatus::InfeasibleFallback
    };
    Ok(RateSolution {
        rates,
        objective,
        status,
        uncovered,
    })
}

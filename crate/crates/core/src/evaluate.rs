//! Exact objective over a sequence of tuning plans.
//!
//! Track terms count observed steps. Survey terms integrate the per-frequency
//! deficit; the observation count is piecewise constant in frequency, so a
//! sweep over coverage endpoints integrates it without quadrature error.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::model::{Survey, SurveyId, Track, TrackId, TuningPlan};

/// Fraction of the plan's steps in which `track` is observed.
pub fn realized_track_rate(plan: &TuningPlan, track: &Track) -> f64 {
    observed_step_count(plan, track) as f64 / plan.steps() as f64
}

fn observed_step_count(plan: &TuningPlan, track: &Track) -> usize {
    (0..plan.steps())
        .filter(|&t| plan.track_observed_in_step(t, track))
        .count()
}

/// Coverage events of every step of every plan, clipped to `survey`'s band.
/// Each step contributes its canonical coverage, so a frequency counts at
/// most once per step.
fn coverage_events(plans: &[TuningPlan], survey: &Survey, events: &mut Vec<(f64, i32)>) {
    for plan in plans {
        for t in 0..plan.steps() {
            push_step_events(plan, t, survey, events);
        }
    }
}

fn push_step_events(plan: &TuningPlan, step: usize, survey: &Survey, events: &mut Vec<(f64, i32)>) {
    for s in plan.step_coverage(step).singles() {
        if let Some(clip) = s.intersection(&survey.band) {
            events.push((clip.lo(), 1));
            events.push((clip.hi(), -1));
        }
    }
}

/// Survey term: `(1/|f|) ∫_f max{0, g − avg_j R_f^j} df`.
pub fn survey_deficit(plans: &[TuningPlan], survey: &Survey) -> Result<f64> {
    let total_steps = total_steps(plans)?;
    let mut events = Vec::new();
    coverage_events(plans, survey, &mut events);
    events.sort_by(|a, b| a.0.total_cmp(&b.0));

    let band = survey.band;
    let goal = survey.goal_rate;
    let mut acc = 0.0;
    let mut count: i32 = 0;
    let mut x = band.lo();
    let mut i = 0;
    loop {
        while i < events.len() && events[i].0 <= x {
            count += events[i].1;
            i += 1;
        }
        let next = if i < events.len() { events[i].0 } else { band.hi() };
        let rate = f64::from(count) / total_steps;
        acc += (next - x) * (goal - rate).max(0.0);
        if i >= events.len() {
            break;
        }
        x = next;
    }
    Ok(acc / band.width())
}

fn total_steps(plans: &[TuningPlan]) -> Result<f64> {
    let first = plans.first().ok_or(Error::InvalidParameter("no plans to evaluate"))?;
    if plans.iter().any(|p| p.steps() != first.steps()) {
        return Err(Error::InvalidParameter("plans differ in step count"));
    }
    Ok((plans.len() * first.steps()) as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationReport {
    pub total: f64,
    pub per_track: BTreeMap<TrackId, f64>,
    pub per_survey: BTreeMap<SurveyId, f64>,
    /// Realized rate of each track in each plan, in plan order.
    pub realized_track_rates: BTreeMap<TrackId, Vec<f64>>,
    pub plan_count: usize,
}

/// Objective `Θ = Σ_τ Θ_τ + Σ_σ Θ_σ` over `plans`.
pub fn evaluate(plans: &[TuningPlan], tracks: &[Track], surveys: &[Survey]) -> Result<EvaluationReport> {
    total_steps(plans)?;
    let mut per_track = BTreeMap::new();
    let mut realized_track_rates = BTreeMap::new();
    for track in tracks {
        let rates: Vec<f64> = plans.iter().map(|p| realized_track_rate(p, track)).collect();
        let mean = rates.iter().sum::<f64>() / plans.len() as f64;
        per_track.insert(track.id, (track.goal_rate - mean).max(0.0));
        realized_track_rates.insert(track.id, rates);
    }
    let mut per_survey = BTreeMap::new();
    for survey in surveys {
        per_survey.insert(survey.id, survey_deficit(plans, survey)?);
    }
    let total = per_track.values().sum::<f64>() + per_survey.values().sum::<f64>();
    Ok(EvaluationReport {
        total,
        per_track,
        per_survey,
        realized_track_rates,
        plan_count: plans.len(),
    })
}

/// Piecewise-constant observation count over one survey band.
#[derive(Debug, Clone)]
struct CoverageProfile {
    /// Segment boundaries, first = band.lo, last = band.hi.
    xs: Vec<f64>,
    /// `counts[i]` holds on `[xs[i], xs[i + 1])`.
    counts: Vec<u32>,
}

impl CoverageProfile {
    fn new(survey: &Survey) -> Self {
        Self {
            xs: alloc::vec![survey.band.lo(), survey.band.hi()],
            counts: alloc::vec![0],
        }
    }

    /// Index of the boundary at `x`, splitting a segment if needed.
    fn split_at(&mut self, x: f64) -> usize {
        let i = self.xs.partition_point(|&v| v < x);
        if self.xs[i] != x {
            // xs[i - 1] < x < xs[i]
            let count = self.counts[i - 1];
            self.xs.insert(i, x);
            self.counts.insert(i, count);
        }
        i
    }

    /// Adds one observation on `[lo, hi]`, already clipped to the band.
    fn add(&mut self, lo: f64, hi: f64) {
        let a = self.split_at(lo);
        let b = self.split_at(hi);
        for c in &mut self.counts[a..b] {
            *c += 1;
        }
    }

    /// Deficit integral with `extra` sorted `(x, ±1)` events layered on top.
    fn deficit_with(&self, extra: &[(f64, i32)], goal: f64, total_steps: f64) -> f64 {
        let mut acc = 0.0;
        let mut e = 0;
        let mut layered: i32 = 0;
        for (seg, &base) in self.counts.iter().enumerate() {
            let (mut x, end) = (self.xs[seg], self.xs[seg + 1]);
            loop {
                while e < extra.len() && extra[e].0 <= x {
                    layered += extra[e].1;
                    e += 1;
                }
                let next = if e < extra.len() && extra[e].0 < end { extra[e].0 } else { end };
                let rate = (f64::from(base) + f64::from(layered)) / total_steps;
                acc += (next - x) * (goal - rate).max(0.0);
                if next >= end {
                    break;
                }
                x = next;
            }
        }
        acc / (self.xs[self.xs.len() - 1] - self.xs[0])
    }
}

/// Running objective over a growing plan archive. Scoring a candidate plan
/// against the archive costs one pass over the candidate plus the stored
/// coverage breakpoints, independent of how many plans were archived.
#[derive(Debug, Clone)]
pub struct ObjectiveTracker<'a> {
    tracks: &'a [Track],
    surveys: &'a [Survey],
    steps: usize,
    plans: usize,
    track_counts: Vec<usize>,
    profiles: Vec<CoverageProfile>,
    scratch: Vec<(f64, i32)>,
}

impl<'a> ObjectiveTracker<'a> {
    pub fn new(tracks: &'a [Track], surveys: &'a [Survey], steps: usize) -> Self {
        Self {
            tracks,
            surveys,
            steps,
            plans: 0,
            track_counts: alloc::vec![0; tracks.len()],
            profiles: surveys.iter().map(CoverageProfile::new).collect(),
            scratch: Vec::new(),
        }
    }

    pub fn plan_count(&self) -> usize {
        self.plans
    }

    /// Archives `plan`.
    pub fn push(&mut self, plan: &TuningPlan) {
        debug_assert_eq!(plan.steps(), self.steps);
        for (count, track) in self.track_counts.iter_mut().zip(self.tracks) {
            *count += observed_step_count(plan, track);
        }
        for t in 0..plan.steps() {
            let coverage = plan.step_coverage(t);
            for (profile, survey) in self.profiles.iter_mut().zip(self.surveys) {
                for s in coverage.singles() {
                    if let Some(clip) = s.intersection(&survey.band) {
                        profile.add(clip.lo(), clip.hi());
                    }
                }
            }
        }
        self.plans += 1;
    }

    /// Objective over the archive alone; zero plans yields the all-goals
    /// value.
    pub fn objective(&self) -> f64 {
        if self.plans == 0 {
            return self.tracks.iter().map(|t| t.goal_rate).sum::<f64>()
                + self.surveys.iter().map(|s| s.goal_rate).sum::<f64>();
        }
        let total = (self.plans * self.steps) as f64;
        let tracks: f64 = self
            .tracks
            .iter()
            .zip(&self.track_counts)
            .map(|(t, &c)| (t.goal_rate - c as f64 / total).max(0.0))
            .sum();
        let surveys: f64 = self
            .profiles
            .iter()
            .zip(self.surveys)
            .map(|(p, s)| p.deficit_with(&[], s.goal_rate, total))
            .sum();
        tracks + surveys
    }

    /// Objective over the archive plus `candidate`, without archiving it.
    pub fn objective_with(&mut self, candidate: &TuningPlan) -> f64 {
        debug_assert_eq!(candidate.steps(), self.steps);
        let total = ((self.plans + 1) * self.steps) as f64;
        let mut theta = 0.0;
        for (track, &count) in self.tracks.iter().zip(&self.track_counts) {
            let observed = count + observed_step_count(candidate, track);
            theta += (track.goal_rate - observed as f64 / total).max(0.0);
        }
        let coverage: Vec<_> = (0..candidate.steps()).map(|t| candidate.step_coverage(t)).collect();
        for (profile, survey) in self.profiles.iter().zip(self.surveys) {
            self.scratch.clear();
            for m in &coverage {
                for s in m.singles() {
                    if let Some(clip) = s.intersection(&survey.band) {
                        self.scratch.push((clip.lo(), 1));
                        self.scratch.push((clip.hi(), -1));
                    }
                }
            }
            self.scratch.sort_by(|a, b| a.0.total_cmp(&b.0));
            theta += profile.deficit_with(&self.scratch, survey.goal_rate, total);
        }
        theta
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::{MultipleInterval, SingleInterval};
    use crate::model::{Cell, Emitter};
    use alloc::vec;

    fn si(lo: f64, hi: f64) -> SingleInterval {
        SingleInterval::new(lo, hi).unwrap()
    }

    fn cell(lo: f64, hi: f64) -> Cell {
        Cell {
            body: MultipleInterval::single(si(lo, hi)),
            config: None,
        }
    }

    fn survey(lo: f64, hi: f64, g: f64) -> Survey {
        Survey::new(SurveyId(0), si(lo, hi), g).unwrap()
    }

    #[test]
    fn never_covered_survey_has_full_deficit() {
        let plans = [TuningPlan::new(4, 2, 10)];
        let d = survey_deficit(&plans, &survey(100.0, 200.0, 0.35)).unwrap();
        assert_eq!(d, 0.35);
    }

    #[test]
    fn half_covered_survey() {
        // left half observed in 4 of 10 steps, right half never
        let mut plan = TuningPlan::new(1, 1, 10);
        for t in 0..4 {
            plan.set_cell(0, 0, t, cell(100.0, 150.0)).unwrap();
        }
        let d = survey_deficit(&[plan], &survey(100.0, 200.0, 0.4)).unwrap();
        assert!((d - 0.2).abs() < 1e-12);
    }

    #[test]
    fn multiplicity_within_a_step_is_ignored() {
        let mut plan = TuningPlan::new(2, 1, 1);
        plan.set_cell(0, 0, 0, cell(100.0, 200.0)).unwrap();
        plan.set_cell(1, 0, 0, cell(100.0, 200.0)).unwrap();
        let d = survey_deficit(&[plan, TuningPlan::new(2, 1, 1)], &survey(100.0, 200.0, 1.0)).unwrap();
        assert!((d - 0.5).abs() < 1e-12);
    }

    #[test]
    fn empty_plans_give_sum_of_goals() {
        let tracks = [Track::new(TrackId(1), vec![Emitter::new(si(10.0, 20.0), 50.0).unwrap()], 0.3).unwrap()];
        let surveys = [survey(100.0, 200.0, 0.4)];
        let plans = vec![TuningPlan::new(4, 2, 10); 3];
        let r = evaluate(&plans, &tracks, &surveys).unwrap();
        assert!((r.total - 0.7).abs() < 1e-12);
        assert_eq!(r.plan_count, 3);
        assert_eq!(r.realized_track_rates[&TrackId(1)], vec![0.0; 3]);
    }

    #[test]
    fn partial_track_observation() {
        let tracks = [Track::new(TrackId(1), vec![Emitter::new(si(10.0, 20.0), 50.0).unwrap()], 0.5).unwrap()];
        let mut plan = TuningPlan::new(4, 2, 10);
        for t in 0..3 {
            for n in 0..4 {
                plan.set_cell(n, 0, t, cell(10.0, 40.0)).unwrap();
            }
        }
        assert!((realized_track_rate(&plan, &tracks[0]) - 0.3).abs() < 1e-12);
        let r = evaluate(&[plan], &tracks, &[]).unwrap();
        assert!((r.total - 0.2).abs() < 1e-12);
    }

    #[test]
    fn evaluation_rejects_empty_sequence() {
        assert!(evaluate(&[], &[], &[]).is_err());
    }

    #[test]
    fn tracker_matches_batch_evaluation() {
        let tracks = [Track::new(TrackId(1), vec![Emitter::new(si(10.0, 20.0), 50.0).unwrap()], 0.5).unwrap()];
        let surveys = [
            survey(0.5, 100.0, 0.6),
            Survey::new(SurveyId(1), si(100.0, 130.0), 0.2).unwrap(),
        ];
        let mut plans = Vec::new();
        for k in 0..4 {
            let mut plan = TuningPlan::new(4, 2, 5);
            for t in 0..5 {
                if (t + k) % 2 == 0 {
                    for n in 0..4 {
                        plan.set_cell(n, 0, t, cell(10.0, 40.0)).unwrap();
                    }
                }
                plan.set_cell(t % 4, 1, t, cell(30.0 + k as f64 * 7.0, 90.0 + t as f64 * 9.0)).unwrap();
            }
            plans.push(plan);
        }
        let mut tracker = ObjectiveTracker::new(&tracks, &surveys, 5);
        for (i, p) in plans.iter().enumerate() {
            let batch = evaluate(&plans[..=i], &tracks, &surveys).unwrap().total;
            let w = tracker.objective_with(p);
            assert!((w - batch).abs() < 1e-12, "{i} {w} {batch}");
            tracker.push(p);
            assert!((tracker.objective() - batch).abs() < 1e-12);
        }
    }
}

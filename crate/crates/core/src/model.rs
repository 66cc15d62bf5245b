//! System model: tasks, configurations, tuning plans and the rules deciding
//! when a task counts as observed.

use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::interval::{union_all, MultipleInterval, Shape, SingleInterval};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TrackId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SurveyId(pub u32);

/// Index of a configuration in the slice it was constructed into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConfigId(pub u32);

impl ConfigId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for TrackId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "track-{}", self.0)
    }
}

impl fmt::Display for SurveyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "survey-{}", self.0)
    }
}

/// The allowed receiver shapes.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeSet {
    shapes: Vec<Shape>,
}

impl ShapeSet {
    pub fn new(shapes: Vec<Shape>) -> Result<Self> {
        if shapes.is_empty() {
            return Err(Error::InvalidSpec("shape set is empty"));
        }
        Ok(Self { shapes })
    }

    /// `{(y) | y ∈ ℕ, 10 ≤ y ≤ 100} ∪ {(100, 100, 100)}`.
    pub fn standard() -> Self {
        let mut shapes: Vec<Shape> = (10..=100)
            .map(|y| Shape::band(f64::from(y)).expect("positive width"))
            .collect();
        shapes.push(Shape::new(alloc::vec![100.0, 100.0, 100.0]).expect("valid shape"));
        Self { shapes }
    }

    pub fn shapes(&self) -> &[Shape] {
        &self.shapes
    }

    pub fn contains(&self, shape: &Shape) -> bool {
        self.shapes.iter().any(|s| s == shape)
    }
}

/// Dimensions and constants of the modelled system.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemSpec {
    pub node_count: usize,
    pub receivers_per_node: usize,
    pub steps_per_plan: usize,
    pub shapes: ShapeSet,
    pub frequency_domain: SingleInterval,
    pub plan_duration_seconds: f64,
}

impl SystemSpec {
    /// Four nodes with two receivers each, ten steps per two-second plan,
    /// the standard shape set, and the 10-16 GHz band.
    pub fn standard() -> Self {
        Self {
            node_count: 4,
            receivers_per_node: 2,
            steps_per_plan: 10,
            shapes: ShapeSet::standard(),
            frequency_domain: SingleInterval::new(10_000.0, 16_000.0).expect("valid domain"),
            plan_duration_seconds: 2.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.node_count == 0 || self.receivers_per_node == 0 || self.steps_per_plan == 0 {
            return Err(Error::InvalidSpec("node, receiver and step counts must be positive"));
        }
        if !(self.plan_duration_seconds.is_finite() && self.plan_duration_seconds > 0.0) {
            return Err(Error::InvalidSpec("plan duration must be positive"));
        }
        Ok(())
    }

    /// Number of cells in one tuning plan.
    pub fn cells_per_plan(&self) -> usize {
        self.node_count * self.receivers_per_node * self.steps_per_plan
    }
}

/// One broadcasting band of a track and the widest receiver band allowed
/// when observing it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Emitter {
    pub band: SingleInterval,
    pub max_bandwidth: f64,
}

impl Emitter {
    pub fn new(band: SingleInterval, max_bandwidth: f64) -> Result<Self> {
        if !(max_bandwidth >= band.width()) {
            return Err(Error::InvalidTask("emitter bandwidth cap is below its band width"));
        }
        Ok(Self {
            band,
            max_bandwidth,
        })
    }

    /// Observed by `single` when the band fits inside and `single` respects
    /// the bandwidth cap.
    #[inline]
    pub fn observed_by(&self, single: &SingleInterval) -> bool {
        single.contains(&self.band) && single.width() <= self.max_bandwidth
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Track {
    pub id: TrackId,
    pub emitters: Vec<Emitter>,
    pub goal_rate: f64,
}

impl Track {
    pub fn new(id: TrackId, emitters: Vec<Emitter>, goal_rate: f64) -> Result<Self> {
        if emitters.is_empty() {
            return Err(Error::InvalidTask("track has no emitters"));
        }
        check_rate(goal_rate)?;
        Ok(Self {
            id,
            emitters,
            goal_rate,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Survey {
    pub id: SurveyId,
    pub band: SingleInterval,
    pub goal_rate: f64,
}

impl Survey {
    pub fn new(id: SurveyId, band: SingleInterval, goal_rate: f64) -> Result<Self> {
        check_rate(goal_rate)?;
        Ok(Self {
            id,
            band,
            goal_rate,
        })
    }
}

fn check_rate(rate: f64) -> Result<()> {
    if (0.0..=1.0).contains(&rate) {
        Ok(())
    } else {
        Err(Error::InvalidTask("goal rate outside [0, 1]"))
    }
}

/// A fragment of a survey band, observed when one receiver covers it
/// completely.
#[derive(Debug, Clone, PartialEq)]
pub struct SubSurvey {
    pub survey: SurveyId,
    pub index: u32,
    pub band: SingleInterval,
    pub goal_rate: f64,
}

/// Number of receivers a configuration occupies when inserted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Weight {
    /// One receiver on one node; observes sub-surveys only.
    Single,
    /// One receiver on every node; observes tracks and sub-surveys.
    AllNodes,
}

impl Weight {
    /// Receivers occupied in a system with `node_count` nodes (1 or 4 in the
    /// standard system).
    #[inline]
    pub fn receivers(self, node_count: usize) -> usize {
        match self {
            Weight::Single => 1,
            Weight::AllNodes => node_count,
        }
    }
}

/// What a configuration was constructed for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parent {
    Emitter { track: u32, emitter: u32 },
    SubSurvey(u32),
    /// A fixed tiling configuration of the baseline algorithms.
    Tile(u32),
}

/// A shaped multiple-interval with a weight and its precomputed observation
/// sets. Track and sub-survey indices refer to the slices the configuration
/// was built against.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    pub body: MultipleInterval,
    pub weight: Weight,
    /// Sorted, deduplicated track indices.
    pub observed_tracks: Vec<u32>,
    /// Sorted, deduplicated sub-survey indices.
    pub observed_subsurveys: Vec<u32>,
    pub parent: Parent,
}

impl Configuration {
    /// Computes observation sets by brute force over all tasks.
    pub fn new(
        body: MultipleInterval,
        weight: Weight,
        parent: Parent,
        tracks: &[Track],
        subsurveys: &[SubSurvey],
    ) -> Self {
        let observed_tracks = match weight {
            Weight::Single => Vec::new(),
            Weight::AllNodes => (0..tracks.len() as u32)
                .filter(|&i| body_observes_track(&body, &tracks[i as usize]))
                .collect(),
        };
        let observed_subsurveys = (0..subsurveys.len() as u32)
            .filter(|&i| body_observes_band(&body, &subsurveys[i as usize].band))
            .collect();
        Self {
            body,
            weight,
            observed_tracks,
            observed_subsurveys,
            parent,
        }
    }

    pub fn observes_nothing(&self) -> bool {
        self.observed_tracks.is_empty() && self.observed_subsurveys.is_empty()
    }

    /// `true` if the two configurations share an observed track or
    /// sub-survey.
    pub fn overlaps(&self, other: &Configuration) -> bool {
        sorted_intersect(&self.observed_tracks, &other.observed_tracks)
            || sorted_intersect(&self.observed_subsurveys, &other.observed_subsurveys)
    }
}

pub(crate) fn sorted_intersect(a: &[u32], b: &[u32]) -> bool {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            core::cmp::Ordering::Less => i += 1,
            core::cmp::Ordering::Greater => j += 1,
            core::cmp::Ordering::Equal => return true,
        }
    }
    false
}

/// Some emitter of `track` fits a single of `body` within its bandwidth cap.
pub fn body_observes_track(body: &MultipleInterval, track: &Track) -> bool {
    track
        .emitters
        .iter()
        .any(|e| body.singles().iter().any(|s| e.observed_by(s)))
}

/// Some single of `body` contains `band` entirely.
pub fn body_observes_band(body: &MultipleInterval, band: &SingleInterval) -> bool {
    body.singles().iter().any(|s| s.contains(band))
}

/// Static observation test used by preprocessing and the LP: only
/// all-nodes configurations can realize tracks.
pub fn config_observes_track(c: &Configuration, track: &Track) -> bool {
    c.weight == Weight::AllNodes && body_observes_track(&c.body, track)
}

/// Sub-surveys need a single receiver, so weight does not matter.
pub fn config_observes_subsurvey(c: &Configuration, subsurvey: &SubSurvey) -> bool {
    body_observes_band(&c.body, &subsurvey.band)
}

/// A complete experiment input.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub spec: SystemSpec,
    pub tracks: Vec<Track>,
    pub surveys: Vec<Survey>,
    pub meta: InstanceMeta,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct InstanceMeta {
    pub seed: u64,
    pub utilization: f64,
    pub track_proportion: f64,
}

/// Where a configuration goes within one time step.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Placement {
    /// A single receiver on one node.
    Single { node: usize, receiver: usize },
    /// One receiver per node, indexed by node.
    AllNodes(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Position {
    pub step: usize,
    pub placement: Placement,
}

impl Position {
    /// Every `(node, receiver)` cell the position occupies.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let (single, all) = match &self.placement {
            Placement::Single { node, receiver } => (Some((*node, *receiver)), &[][..]),
            Placement::AllNodes(receivers) => (None, receivers.as_slice()),
        };
        single
            .into_iter()
            .chain(all.iter().enumerate().map(|(n, &r)| (n, r)))
    }

    pub fn weight(&self) -> Weight {
        match self.placement {
            Placement::Single { .. } => Weight::Single,
            Placement::AllNodes(_) => Weight::AllNodes,
        }
    }
}

/// Content of an occupied receiver cell.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub body: MultipleInterval,
    /// The configuration this cell was filled from, when known.
    pub config: Option<ConfigId>,
}

/// Node × receiver × time-step grid of optional multiple-intervals.
#[derive(Debug, Clone, PartialEq)]
pub struct TuningPlan {
    nodes: usize,
    receivers: usize,
    steps: usize,
    cells: Vec<Option<Cell>>,
}

impl TuningPlan {
    pub fn new(nodes: usize, receivers: usize, steps: usize) -> Self {
        Self {
            nodes,
            receivers,
            steps,
            cells: alloc::vec![None; nodes * receivers * steps],
        }
    }

    pub fn for_spec(spec: &SystemSpec) -> Self {
        Self::new(spec.node_count, spec.receivers_per_node, spec.steps_per_plan)
    }

    #[inline]
    pub fn nodes(&self) -> usize {
        self.nodes
    }

    #[inline]
    pub fn receivers(&self) -> usize {
        self.receivers
    }

    #[inline]
    pub fn steps(&self) -> usize {
        self.steps
    }

    #[inline]
    fn index(&self, node: usize, receiver: usize, step: usize) -> usize {
        (node * self.receivers + receiver) * self.steps + step
    }

    fn check_bounds(&self, node: usize, receiver: usize, step: usize) -> Result<()> {
        if node < self.nodes && receiver < self.receivers && step < self.steps {
            Ok(())
        } else {
            Err(Error::PositionMismatch)
        }
    }

    pub fn cell(&self, node: usize, receiver: usize, step: usize) -> Option<&Cell> {
        if self.check_bounds(node, receiver, step).is_err() {
            return None;
        }
        self.cells[self.index(node, receiver, step)].as_ref()
    }

    /// Fills one empty cell.
    pub fn set_cell(&mut self, node: usize, receiver: usize, step: usize, cell: Cell) -> Result<()> {
        self.check_bounds(node, receiver, step)?;
        let idx = self.index(node, receiver, step);
        if self.cells[idx].is_some() {
            return Err(Error::CellOccupied {
                node,
                receiver,
                step,
            });
        }
        self.cells[idx] = Some(cell);
        Ok(())
    }

    /// Inserts `config` at `position`. Every referenced cell must be empty and
    /// the position's arity must match the configuration weight; on error the
    /// plan is left unchanged.
    pub fn insert(&mut self, id: ConfigId, config: &Configuration, position: &Position) -> Result<()> {
        if position.weight() != config.weight {
            return Err(Error::PositionMismatch);
        }
        if let Placement::AllNodes(receivers) = &position.placement {
            if receivers.len() != self.nodes {
                return Err(Error::PositionMismatch);
            }
        }
        for (node, receiver) in position.cells() {
            self.check_bounds(node, receiver, position.step)?;
            if self.cells[self.index(node, receiver, position.step)].is_some() {
                return Err(Error::CellOccupied {
                    node,
                    receiver,
                    step: position.step,
                });
            }
        }
        for (node, receiver) in position.cells() {
            let idx = self.index(node, receiver, position.step);
            self.cells[idx] = Some(Cell {
                body: config.body.clone(),
                config: Some(id),
            });
        }
        Ok(())
    }

    /// Occupied cells at `step` as `(node, receiver, cell)`.
    pub fn cells_at(&self, step: usize) -> impl Iterator<Item = (usize, usize, &Cell)> + '_ {
        (0..self.nodes).flat_map(move |n| {
            (0..self.receivers).filter_map(move |r| self.cell(n, r, step).map(|c| (n, r, c)))
        })
    }

    pub fn free_receivers(&self, node: usize, step: usize) -> usize {
        (0..self.receivers)
            .filter(|&r| self.cells[self.index(node, r, step)].is_none())
            .count()
    }

    /// Empty cells across all nodes at `step`.
    pub fn free_cells_at(&self, step: usize) -> usize {
        (0..self.nodes).map(|n| self.free_receivers(n, step)).sum()
    }

    /// How many all-nodes configurations can still be inserted at `step`.
    pub fn step_cohesion(&self, step: usize) -> usize {
        (0..self.nodes)
            .map(|n| self.free_receivers(n, step))
            .min()
            .unwrap_or(0)
    }

    /// Number of all-nodes configurations that can still be inserted.
    pub fn cohesion(&self) -> usize {
        (0..self.steps).map(|t| self.step_cohesion(t)).sum()
    }

    pub fn occupied_cells(&self) -> usize {
        self.cells.iter().filter(|c| c.is_some()).count()
    }

    /// Union of everything observed at `step`.
    pub fn step_coverage(&self, step: usize) -> MultipleInterval {
        let bodies: Vec<&MultipleInterval> = self.cells_at(step).map(|(_, _, c)| &c.body).collect();
        union_all(bodies)
    }

    /// Multiple-intervals held by at least one receiver on every node at
    /// `step`, compared exactly.
    pub fn shared_bodies(&self, step: usize) -> Vec<&MultipleInterval> {
        let mut shared: Vec<&MultipleInterval> = Vec::new();
        for r in 0..self.receivers {
            let Some(candidate) = self.cell(0, r, step).map(|c| &c.body) else {
                continue;
            };
            if shared.contains(&candidate) {
                continue;
            }
            let everywhere = (1..self.nodes).all(|n| {
                (0..self.receivers).any(|r2| self.cell(n, r2, step).is_some_and(|c| &c.body == candidate))
            });
            if everywhere {
                shared.push(candidate);
            }
        }
        shared
    }

    /// A track is observed when one of its emitters is observed by a
    /// multiple-interval every node tunes at least one receiver to.
    pub fn track_observed_in_step(&self, step: usize, track: &Track) -> bool {
        self.shared_bodies(step)
            .into_iter()
            .any(|m| body_observes_track(m, track))
    }

    /// A band is observed when one receiver covers it completely.
    pub fn band_observed_in_step(&self, step: usize, band: &SingleInterval) -> bool {
        self.cells_at(step)
            .any(|(_, _, c)| body_observes_band(&c.body, band))
    }

    /// Steps that contain configuration `id`.
    pub fn config_step_count(&self, id: ConfigId) -> usize {
        (0..self.steps)
            .filter(|&t| self.cells_at(t).any(|(_, _, c)| c.config == Some(id)))
            .count()
    }
}

//! Task preprocessing: survey splitting and configuration construction.
//!
//! Every emitter of every track and every sub-survey is a *parent*. For each
//! parent the widest allowed shape whose bands can hold it is chosen, then
//! placed so that each of its bands in turn covers the parent, shifted as far
//! left and as far right as possible (or centered, for the alternative
//! variants). All placements get weight "all nodes" and are then duplicated
//! with weight "single".

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::interval::{realize_shape, MultipleInterval, Shape, SingleInterval};
use crate::model::{
    Configuration, ConfigId, Parent, ShapeSet, SubSurvey, Survey, SystemSpec, Track, Weight,
};

/// How each band of the selected shape is aligned with its parent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstructionVariant {
    /// Band's upper end on the parent's upper end, and band's lower end on
    /// the parent's lower end.
    LeftRight,
    /// Band centered on the parent.
    Centered,
    /// Left, centered and right placements.
    LeftCenterRight,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PreprocessParams {
    pub split_size: f64,
    pub variant: ConstructionVariant,
}

impl Default for PreprocessParams {
    fn default() -> Self {
        Self {
            split_size: 5.0,
            variant: ConstructionVariant::LeftRight,
        }
    }
}

/// Splits every survey left to right into bands of width `split_size`; the
/// last band of a survey may be narrower.
pub fn split_surveys(surveys: &[Survey], split_size: f64) -> Result<Vec<SubSurvey>> {
    if !(split_size.is_finite() && split_size > 0.0) {
        return Err(Error::InvalidParameter("split size must be positive"));
    }
    let mut out = Vec::new();
    for survey in surveys {
        let (lo, hi) = (survey.band.lo(), survey.band.hi());
        let count = libm::ceil(survey.band.width() / split_size) as u32;
        for y in 0..count {
            let start = lo + f64::from(y) * split_size;
            let end = (lo + f64::from(y + 1) * split_size).min(hi);
            // Rounding in the quotient can leave an empty tail.
            let Ok(band) = SingleInterval::new(start, end) else {
                continue;
            };
            out.push(SubSurvey {
                survey: survey.id,
                index: y,
                band,
                goal_rate: survey.goal_rate,
            });
        }
    }
    Ok(out)
}

/// Number of parents: emitters plus `⌈|f_σ| / k⌉` per survey.
pub fn parent_count(tracks: &[Track], surveys: &[Survey], split_size: f64) -> usize {
    let emitters: usize = tracks.iter().map(|t| t.emitters.len()).sum();
    let subsurveys: usize = surveys
        .iter()
        .map(|s| libm::ceil(s.band.width() / split_size) as usize)
        .sum();
    emitters + subsurveys
}

/// The shape with the largest total band width among those whose every band
/// `y` satisfies `parent_width ≤ y ≤ cap`. Ties keep the first in set order.
pub fn select_shape(parent_width: f64, cap: f64, shapes: &ShapeSet) -> Option<&Shape> {
    let mut best: Option<&Shape> = None;
    for shape in shapes.shapes() {
        if !shape.widths().all(|y| parent_width <= y && y <= cap) {
            continue;
        }
        if best.is_none_or(|b| shape.total_width() > b.total_width()) {
            best = Some(shape);
        }
    }
    best
}

/// Output of a configuration construction.
#[derive(Debug, Clone, Default)]
pub struct Construction {
    pub configurations: Vec<Configuration>,
    /// Parents for which no allowed shape fits.
    pub infeasible_parents: Vec<Parent>,
    /// Placements dropped because they would reach non-positive frequencies.
    pub dropped_placements: usize,
}

/// Left-right heuristic.
pub fn build_left_right(tracks: &[Track], subsurveys: &[SubSurvey], shapes: &ShapeSet) -> Construction {
    build(tracks, subsurveys, shapes, ConstructionVariant::LeftRight)
}

/// One centered placement per band of the selected shape.
pub fn build_centered(tracks: &[Track], subsurveys: &[SubSurvey], shapes: &ShapeSet) -> Construction {
    build(tracks, subsurveys, shapes, ConstructionVariant::Centered)
}

/// Left, centered and right placements per band.
pub fn build_left_center_right(
    tracks: &[Track],
    subsurveys: &[SubSurvey],
    shapes: &ShapeSet,
) -> Construction {
    build(tracks, subsurveys, shapes, ConstructionVariant::LeftCenterRight)
}

/// Runs `variant` over every parent (emitters first, then sub-surveys).
pub fn build(
    tracks: &[Track],
    subsurveys: &[SubSurvey],
    shapes: &ShapeSet,
    variant: ConstructionVariant,
) -> Construction {
    let mut out = Construction::default();
    let mut bodies: Vec<(MultipleInterval, Parent)> = Vec::new();

    let emitters = tracks.iter().enumerate().flat_map(|(ti, t)| {
        t.emitters.iter().enumerate().map(move |(ei, e)| {
            (
                e.band,
                e.max_bandwidth,
                Parent::Emitter {
                    track: ti as u32,
                    emitter: ei as u32,
                },
            )
        })
    });
    let subs = subsurveys
        .iter()
        .enumerate()
        .map(|(i, s)| (s.band, f64::INFINITY, Parent::SubSurvey(i as u32)));

    for (band, cap, parent) in emitters.chain(subs) {
        let Some(shape) = select_shape(band.width(), cap, shapes) else {
            out.infeasible_parents.push(parent);
            continue;
        };
        for origin in placements(&band, shape, variant) {
            match realize_shape(shape, origin) {
                Ok(body) => bodies.push((body, parent)),
                Err(_) => out.dropped_placements += 1,
            }
        }
    }

    let index = TaskIndex::new(tracks, subsurveys);
    out.configurations.reserve(2 * bodies.len());
    for (body, parent) in &bodies {
        out.configurations
            .push(index.configuration(body.clone(), Weight::AllNodes, *parent));
    }
    for (body, parent) in bodies {
        out.configurations
            .push(index.configuration(body, Weight::Single, parent));
    }
    out
}

/// Shape origins that put each band of `shape` on `band` per `variant`.
fn placements(band: &SingleInterval, shape: &Shape, variant: ConstructionVariant) -> Vec<f64> {
    let widths: Vec<f64> = shape.widths().collect();
    let offsets = shape.offsets();
    let mut origins = Vec::with_capacity(3 * widths.len());
    for (&w, &o) in widths.iter().zip(&offsets) {
        let left = band.hi() - w - o;
        let right = band.lo() - o;
        let center = band.center() - w / 2.0 - o;
        match variant {
            ConstructionVariant::LeftRight => origins.extend([left, right]),
            ConstructionVariant::Centered => origins.push(center),
            ConstructionVariant::LeftCenterRight => origins.extend([left, center, right]),
        }
    }
    origins
}

/// Keeps the first configuration of every distinct
/// `(weight, observed tracks, observed sub-surveys)` and drops those that
/// observe nothing. Returns the surviving ids in construction order.
pub fn dedup_unique_observation_sets(configs: &[Configuration]) -> Vec<ConfigId> {
    let mut seen: BTreeSet<(Weight, &[u32], &[u32])> = BTreeSet::new();
    let mut kept = Vec::new();
    for (i, c) in configs.iter().enumerate() {
        if c.observes_nothing() {
            continue;
        }
        if seen.insert((c.weight, &c.observed_tracks, &c.observed_subsurveys)) {
            kept.push(ConfigId(i as u32));
        }
    }
    kept
}

/// Layout of the fixed `(100, 100, 100)` tiles used by the baselines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BaselineTiling {
    /// Tiles laid end to end every 300 MHz. The 100 MHz gap inside each tile
    /// is never covered by a tile.
    #[default]
    Contiguous,
    /// Pairs of tiles offset by 100 MHz, every 400 MHz, so that tile bands
    /// cover the whole domain.
    Interleaved,
}

const TILE_BAND: f64 = 100.0;

fn tile_shape() -> Shape {
    Shape::new(alloc::vec![TILE_BAND, TILE_BAND, TILE_BAND]).expect("valid tile shape")
}

/// Tile origins over `domain`.
pub fn tile_origins(domain: &SingleInterval, tiling: BaselineTiling) -> Vec<f64> {
    let mut origins = Vec::new();
    match tiling {
        BaselineTiling::Contiguous => {
            let mut o = domain.lo();
            while o < domain.hi() {
                origins.push(o);
                o += 3.0 * TILE_BAND;
            }
        }
        BaselineTiling::Interleaved => {
            let mut o = domain.lo();
            while o < domain.hi() {
                origins.push(o);
                if o + TILE_BAND < domain.hi() {
                    origins.push(o + TILE_BAND);
                }
                o += 4.0 * TILE_BAND;
            }
        }
    }
    origins
}

/// Configurations and sub-surveys for the greedy and GA baselines.
#[derive(Debug, Clone)]
pub struct BaselineConstruction {
    pub configurations: Vec<Configuration>,
    pub subsurveys: Vec<SubSurvey>,
    pub infeasible_parents: Vec<Parent>,
}

/// Fixed tiles of shape `(100, 100, 100)` (weight "single" copies first,
/// then weight "all nodes"), surveys split at every tile band edge, and one
/// centered all-nodes configuration per emitter.
pub fn build_baseline_configurations(
    tracks: &[Track],
    surveys: &[Survey],
    spec: &SystemSpec,
    tiling: BaselineTiling,
) -> BaselineConstruction {
    let shape = tile_shape();
    let tiles: Vec<MultipleInterval> = tile_origins(&spec.frequency_domain, tiling)
        .into_iter()
        .filter_map(|o| realize_shape(&shape, o).ok())
        .collect();

    let mut cuts: Vec<f64> = tiles
        .iter()
        .flat_map(|t| t.singles().iter().flat_map(|s| [s.lo(), s.hi()]))
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let subsurveys = split_at_cuts(surveys, &cuts);

    let index = TaskIndex::new(tracks, &subsurveys);
    let mut configurations = Vec::new();
    for weight in [Weight::Single, Weight::AllNodes] {
        for (i, body) in tiles.iter().enumerate() {
            configurations.push(index.configuration(body.clone(), weight, Parent::Tile(i as u32)));
        }
    }

    let mut infeasible_parents = Vec::new();
    for (ti, track) in tracks.iter().enumerate() {
        for (ei, e) in track.emitters.iter().enumerate() {
            let parent = Parent::Emitter {
                track: ti as u32,
                emitter: ei as u32,
            };
            let Some(shape) = select_shape(e.band.width(), e.max_bandwidth, &spec.shapes) else {
                infeasible_parents.push(parent);
                continue;
            };
            let w = shape.entries()[0];
            let origin = e.band.center() - w / 2.0;
            if let Ok(body) = realize_shape(shape, origin) {
                configurations.push(index.configuration(body, Weight::AllNodes, parent));
            }
        }
    }
    BaselineConstruction {
        configurations,
        subsurveys,
        infeasible_parents,
    }
}

/// Splits every survey band at the sorted cut points lying strictly inside
/// it.
pub fn split_at_cuts(surveys: &[Survey], cuts: &[f64]) -> Vec<SubSurvey> {
    let mut out = Vec::new();
    for survey in surveys {
        let (lo, hi) = (survey.band.lo(), survey.band.hi());
        let first = cuts.partition_point(|&c| c <= lo);
        let inner = cuts[first..].iter().copied().take_while(|&c| c < hi);
        let mut start = lo;
        let mut index = 0;
        for end in inner.chain(core::iter::once(hi)) {
            out.push(SubSurvey {
                survey: survey.id,
                index,
                band: SingleInterval::new(start, end).expect("cuts strictly inside band"),
                goal_rate: survey.goal_rate,
            });
            index += 1;
            start = end;
        }
    }
    out
}

/// Task lookup sorted by lower band edge, for computing observation sets
/// without scanning every task per single-interval.
pub struct TaskIndex<'a> {
    tracks: &'a [Track],
    subsurveys: &'a [SubSurvey],
    /// `(lo, hi, cap, track index)` sorted by `lo`.
    emitters: Vec<(f64, f64, f64, u32)>,
    /// `(lo, hi, sub-survey index)` sorted by `lo`.
    subs: Vec<(f64, f64, u32)>,
}

impl<'a> TaskIndex<'a> {
    pub fn new(tracks: &'a [Track], subsurveys: &'a [SubSurvey]) -> Self {
        let mut emitters: Vec<_> = tracks
            .iter()
            .enumerate()
            .flat_map(|(i, t)| {
                t.emitters
                    .iter()
                    .map(move |e| (e.band.lo(), e.band.hi(), e.max_bandwidth, i as u32))
            })
            .collect();
        emitters.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut subs: Vec<_> = subsurveys
            .iter()
            .enumerate()
            .map(|(i, s)| (s.band.lo(), s.band.hi(), i as u32))
            .collect();
        subs.sort_by(|a, b| a.0.total_cmp(&b.0));
        Self {
            tracks,
            subsurveys,
            emitters,
            subs,
        }
    }

    pub fn tracks(&self) -> &'a [Track] {
        self.tracks
    }

    pub fn subsurveys(&self) -> &'a [SubSurvey] {
        self.subsurveys
    }

    /// Sub-surveys whose band lies inside `single`.
    pub fn subsurveys_within(&self, single: &SingleInterval, out: &mut Vec<u32>) {
        let start = self.subs.partition_point(|s| s.0 < single.lo());
        for &(lo, hi, i) in &self.subs[start..] {
            if lo > single.hi() {
                break;
            }
            if hi <= single.hi() {
                out.push(i);
            }
        }
    }

    /// Tracks with an emitter observed by `single`.
    pub fn tracks_within(&self, single: &SingleInterval, out: &mut Vec<u32>) {
        let start = self.emitters.partition_point(|e| e.0 < single.lo());
        for &(lo, hi, cap, i) in &self.emitters[start..] {
            if lo > single.hi() {
                break;
            }
            if hi <= single.hi() && single.width() <= cap {
                out.push(i);
            }
        }
    }

    /// Builds a configuration with observation sets computed through the
    /// index.
    pub fn configuration(&self, body: MultipleInterval, weight: Weight, parent: Parent) -> Configuration {
        let mut observed_tracks = Vec::new();
        let mut observed_subsurveys = Vec::new();
        for s in body.singles() {
            if weight == Weight::AllNodes {
                self.tracks_within(s, &mut observed_tracks);
            }
            self.subsurveys_within(s, &mut observed_subsurveys);
        }
        observed_tracks.sort_unstable();
        observed_tracks.dedup();
        observed_subsurveys.sort_unstable();
        observed_subsurveys.dedup();
        Configuration {
            body,
            weight,
            observed_tracks,
            observed_subsurveys,
            parent,
        }
    }
}

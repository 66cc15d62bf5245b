//! JSON instance and plan files.

use std::fs;
use std::path::Path;

use resourcetune::model::{Cell, InstanceMeta};
use resourcetune::{
    ConfigId, Emitter, Instance, MultipleInterval, Shape, ShapeSet, SingleInterval, Survey,
    SurveyId, SystemSpec, Track, TrackId, TuningPlan,
};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandFile {
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpecFile {
    pub node_count: usize,
    pub receivers_per_node: usize,
    pub steps_per_plan: usize,
    /// Shape entries: band widths alternating with gaps.
    pub shapes: Vec<Vec<f64>>,
    pub frequency_domain: BandFile,
    pub plan_duration_seconds: f64,
}

impl Default for SpecFile {
    fn default() -> Self {
        SpecFile::from(&SystemSpec::standard())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmitterFile {
    pub lo: f64,
    pub hi: f64,
    pub max_bandwidth: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackFile {
    pub id: u32,
    pub goal_rate: f64,
    pub emitters: Vec<EmitterFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurveyFile {
    pub id: u32,
    pub lo: f64,
    pub hi: f64,
    pub goal_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MetaFile {
    pub seed: u64,
    pub utilization: f64,
    pub track_proportion: f64,
}

/// On-disk instance. A missing `spec` means the standard system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    #[serde(default)]
    pub spec: SpecFile,
    pub tracks: Vec<TrackFile>,
    pub surveys: Vec<SurveyFile>,
    #[serde(default)]
    pub meta: MetaFile,
}

impl From<&SystemSpec> for SpecFile {
    fn from(spec: &SystemSpec) -> Self {
        Self {
            node_count: spec.node_count,
            receivers_per_node: spec.receivers_per_node,
            steps_per_plan: spec.steps_per_plan,
            shapes: spec.shapes.shapes().iter().map(|s| s.entries().to_vec()).collect(),
            frequency_domain: BandFile {
                lo: spec.frequency_domain.lo(),
                hi: spec.frequency_domain.hi(),
            },
            plan_duration_seconds: spec.plan_duration_seconds,
        }
    }
}

impl TryFrom<&SpecFile> for SystemSpec {
    type Error = HarnessError;

    fn try_from(f: &SpecFile) -> Result<Self> {
        let shapes = f
            .shapes
            .iter()
            .map(|e| Shape::new(e.clone()))
            .collect::<resourcetune::Result<Vec<_>>>()?;
        let spec = SystemSpec {
            node_count: f.node_count,
            receivers_per_node: f.receivers_per_node,
            steps_per_plan: f.steps_per_plan,
            shapes: ShapeSet::new(shapes)?,
            frequency_domain: SingleInterval::new(f.frequency_domain.lo, f.frequency_domain.hi)?,
            plan_duration_seconds: f.plan_duration_seconds,
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl From<&Instance> for InstanceFile {
    fn from(instance: &Instance) -> Self {
        Self {
            spec: SpecFile::from(&instance.spec),
            tracks: instance
                .tracks
                .iter()
                .map(|t| TrackFile {
                    id: t.id.0,
                    goal_rate: t.goal_rate,
                    emitters: t
                        .emitters
                        .iter()
                        .map(|e| EmitterFile {
                            lo: e.band.lo(),
                            hi: e.band.hi(),
                            max_bandwidth: e.max_bandwidth,
                        })
                        .collect(),
                })
                .collect(),
            surveys: instance
                .surveys
                .iter()
                .map(|s| SurveyFile {
                    id: s.id.0,
                    lo: s.band.lo(),
                    hi: s.band.hi(),
                    goal_rate: s.goal_rate,
                })
                .collect(),
            meta: MetaFile {
                seed: instance.meta.seed,
                utilization: instance.meta.utilization,
                track_proportion: instance.meta.track_proportion,
            },
        }
    }
}

impl TryFrom<&InstanceFile> for Instance {
    type Error = HarnessError;

    fn try_from(f: &InstanceFile) -> Result<Self> {
        let tracks = f
            .tracks
            .iter()
            .map(|t| {
                let emitters = t
                    .emitters
                    .iter()
                    .map(|e| Emitter::new(SingleInterval::new(e.lo, e.hi)?, e.max_bandwidth))
                    .collect::<resourcetune::Result<Vec<_>>>()?;
                Track::new(TrackId(t.id), emitters, t.goal_rate)
            })
            .collect::<resourcetune::Result<Vec<_>>>()?;
        let surveys = f
            .surveys
            .iter()
            .map(|s| Survey::new(SurveyId(s.id), SingleInterval::new(s.lo, s.hi)?, s.goal_rate))
            .collect::<resourcetune::Result<Vec<_>>>()?;
        let mut ids: Vec<u32> = f.tracks.iter().map(|t| t.id).collect();
        ids.sort_unstable();
        let mut survey_ids: Vec<u32> = f.surveys.iter().map(|s| s.id).collect();
        survey_ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) || survey_ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(HarnessError::Invalid("duplicate task id".into()));
        }
        Ok(Instance {
            spec: SystemSpec::try_from(&f.spec)?,
            tracks,
            surveys,
            meta: InstanceMeta {
                seed: f.meta.seed,
                utilization: f.meta.utilization,
                track_proportion: f.meta.track_proportion,
            },
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellFile {
    pub node: usize,
    pub receiver: usize,
    pub step: usize,
    /// `[lo, hi]` pairs of the cell's multiple-interval.
    pub bands: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanFile {
    pub nodes: usize,
    pub receivers: usize,
    pub steps: usize,
    /// Occupied cells only.
    pub cells: Vec<CellFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanSequenceFile {
    pub plans: Vec<PlanFile>,
}

impl From<&TuningPlan> for PlanFile {
    fn from(plan: &TuningPlan) -> Self {
        let mut cells = Vec::new();
        for node in 0..plan.nodes() {
            for receiver in 0..plan.receivers() {
                for step in 0..plan.steps() {
                    if let Some(c) = plan.cell(node, receiver, step) {
                        cells.push(CellFile {
                            node,
                            receiver,
                            step,
                            bands: c.body.singles().iter().map(|s| [s.lo(), s.hi()]).collect(),
                            config: c.config.map(|id| id.0),
                        });
                    }
                }
            }
        }
        Self {
            nodes: plan.nodes(),
            receivers: plan.receivers(),
            steps: plan.steps(),
            cells,
        }
    }
}

impl TryFrom<&PlanFile> for TuningPlan {
    type Error = HarnessError;

    fn try_from(f: &PlanFile) -> Result<Self> {
        let mut plan = TuningPlan::new(f.nodes, f.receivers, f.steps);
        for c in &f.cells {
            let singles = c
                .bands
                .iter()
                .map(|&[lo, hi]| SingleInterval::new(lo, hi))
                .collect::<resourcetune::Result<Vec<_>>>()?;
            let cell = Cell {
                body: MultipleInterval::from_singles(singles)?,
                config: c.config.map(ConfigId),
            };
            plan.set_cell(c.node, c.receiver, c.step, cell)?;
        }
        Ok(plan)
    }
}

pub fn plans_to_file(plans: &[TuningPlan]) -> PlanSequenceFile {
    PlanSequenceFile {
        plans: plans.iter().map(PlanFile::from).collect(),
    }
}

pub fn plans_from_file(f: &PlanSequenceFile) -> Result<Vec<TuningPlan>> {
    f.plans.iter().map(TuningPlan::try_from).collect()
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    serde_json::from_str(&text).map_err(|source| HarnessError::Json {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes pretty JSON followed by a newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|source| HarnessError::Json {
        path: path.to_path_buf(),
        source,
    })?;
    text.push('\n');
    fs::write(path, text).map_err(|e| HarnessError::io(path, e))
}

pub fn read_instance(path: &Path) -> Result<Instance> {
    let file: InstanceFile = read_json(path)?;
    Instance::try_from(&file).map_err(|e| HarnessError::Invalid(format!("{}: {e}", path.display())))
}

pub fn write_instance(path: &Path, instance: &Instance) -> Result<()> {
    write_json(path, &InstanceFile::from(instance))
}

pub fn read_plans(path: &Path) -> Result<Vec<TuningPlan>> {
    let file: PlanSequenceFile = read_json(path)?;
    plans_from_file(&file).map_err(|e| HarnessError::Invalid(format!("{}: {e}", path.display())))
}

pub fn write_plans(path: &Path, plans: &[TuningPlan]) -> Result<()> {
    write_json(path, &plans_to_file(plans))
}

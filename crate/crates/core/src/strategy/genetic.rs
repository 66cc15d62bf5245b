use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{CycleReport, Strategy};
use crate::clock::Stopwatch;
use crate::error::{Error, Result};
use crate::evaluate::ObjectiveTracker;
use crate::model::{Cell, Configuration, ConfigId, Instance, Survey, SystemSpec, Track, TuningPlan, Weight};
use crate::preprocess::{build_baseline_configurations, BaselineTiling};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneticParams {
    pub population: usize,
    pub elitism: usize,
    pub tournament: usize,
    pub crossover_rate: f64,
    /// Wall-clock limit of each of the two phases.
    pub phase_seconds: f64,
    /// Optional generation cap per phase; with a frozen clock this alone
    /// bounds the search, which makes runs reproducible.
    pub max_generations: Option<usize>,
    /// Share of the second phase's initial population seeded from the
    /// first phase's final population.
    pub seeded_fraction: f64,
    pub seed: u64,
}

impl Default for GeneticParams {
    fn default() -> Self {
        Self {
            population: 50,
            elitism: 2,
            tournament: 2,
            crossover_rate: 0.9,
            phase_seconds: 1.0,
            max_generations: None,
            seeded_fraction: 0.5,
            seed: 0,
        }
    }
}

/// Gene value: `0` is an idle receiver, `k > 0` the `k`-th allele.
type Gene = u32;

#[derive(Debug, Clone)]
struct Individual {
    genes: Vec<Gene>,
    fitness: f64,
}

/// Two-phase genetic baseline.
///
/// Both phases evolve one gene per (node, receiver, step). Phase one only
/// offers all-nodes configurations; phase two offers every configuration and
/// starts partly from phase one's survivors. Nodes are not forced to agree,
/// so a track is observed only where all of them happen to carry the same
/// body at a step. Fitness is the
/// objective over all plans emitted so far plus the candidate.
#[derive(Debug, Clone)]
pub struct Genetic {
    spec: SystemSpec,
    tracks: Vec<Track>,
    surveys: Vec<Survey>,
    configs: Vec<Configuration>,
    all_nodes: Vec<ConfigId>,
    params: GeneticParams,
    rng: ChaCha8Rng,
    archive: Vec<TuningPlan>,
    trace: Vec<f64>,
}

impl Genetic {
    pub fn new(instance: &Instance, tiling: BaselineTiling, params: GeneticParams) -> Result<Self> {
        instance.spec.validate()?;
        if params.population < 2 || params.elitism >= params.population || params.tournament == 0 {
            return Err(Error::InvalidParameter("population too small for elitism/tournament"));
        }
        let base = build_baseline_configurations(&instance.tracks, &instance.surveys, &instance.spec, tiling);
        let all_nodes = base
            .configurations
            .iter()
            .enumerate()
            .filter(|(_, c)| c.weight == Weight::AllNodes)
            .map(|(i, _)| ConfigId(i as u32))
            .collect();
        Ok(Self {
            spec: instance.spec.clone(),
            tracks: instance.tracks.clone(),
            surveys: instance.surveys.clone(),
            configs: base.configurations,
            all_nodes,
            params,
            rng: ChaCha8Rng::seed_from_u64(params.seed),
            archive: Vec::new(),
            trace: Vec::new(),
        })
    }

    /// Genes per chromosome in the second phase.
    pub fn chromosome_len(&self) -> usize {
        self.spec.cells_per_plan()
    }

    pub fn configurations(&self) -> &[Configuration] {
        &self.configs
    }

    /// Best fitness after every generation of the last cycle, both phases.
    pub fn fitness_trace(&self) -> &[f64] {
        &self.trace
    }

    /// Fitness of `plan` appended to the emitted plans.
    pub fn fitness_of(&self, plan: &TuningPlan) -> f64 {
        let mut tracker = self.tracker();
        tracker.objective_with(plan)
    }

    /// Decodes a full chromosome, one gene per (node, receiver, step), with
    /// alleles indexing the configuration list (`0` idle).
    pub fn decode(&self, genes: &[Gene]) -> TuningPlan {
        decode_full(&self.spec, &self.configs, genes)
    }

    fn tracker(&self) -> ObjectiveTracker<'_> {
        let mut tracker = ObjectiveTracker::new(&self.tracks, &self.surveys, self.spec.steps_per_plan);
        for p in &self.archive {
            tracker.push(p);
        }
        tracker
    }
}

fn decode_full(spec: &SystemSpec, configs: &[Configuration], genes: &[Gene]) -> TuningPlan {
    let mut plan = TuningPlan::for_spec(spec);
    let (r_count, t_count) = (spec.receivers_per_node, spec.steps_per_plan);
    for (i, &g) in genes.iter().enumerate() {
        if g == 0 {
            continue;
        }
        let id = ConfigId(g - 1);
        let (node, rest) = (i / (r_count * t_count), i % (r_count * t_count));
        let (receiver, step) = (rest / t_count, rest % t_count);
        let cell = Cell {
            body: configs[id.index()].body.clone(),
            config: Some(id),
        };
        plan.set_cell(node, receiver, step, cell).expect("each gene maps to its own cell");
    }
    plan
}

/// Maps phase-one alleles (indices into the all-nodes list) to
/// configuration alleles.
fn to_config_genes(all_nodes: &[ConfigId], genes: &[Gene]) -> Vec<Gene> {
    genes.iter().map(|&g| if g == 0 { 0 } else { all_nodes[g as usize - 1].0 + 1 }).collect()
}

/// Share of each phase's time spent evolving; the rest absorbs decoding and
/// clock jitter.
const DEADLINE_SHARE: f64 = 0.97;

struct Phase<'s, 'c> {
    params: &'s GeneticParams,
    alleles: u32,
    clock: &'c dyn Stopwatch,
    /// Clock reading by which the phase must have finished.
    deadline: f64,
}

impl Phase<'_, '_> {
    fn random_genes(&self, rng: &mut ChaCha8Rng, len: usize) -> Vec<Gene> {
        (0..len).map(|_| rng.random_range(0..=self.alleles)).collect()
    }

    fn tournament<'p>(&self, rng: &mut ChaCha8Rng, pop: &'p [Individual]) -> &'p Individual {
        let mut best = &pop[rng.random_range(0..pop.len())];
        for _ in 1..self.params.tournament {
            let other = &pop[rng.random_range(0..pop.len())];
            if other.fitness < best.fitness {
                best = other;
            }
        }
        best
    }

    /// Evolves `pop` until the clock or generation cap runs out; returns it
    /// sorted best first.
    fn evolve(
        &self,
        rng: &mut ChaCha8Rng,
        mut pop: Vec<Individual>,
        fitness: &mut dyn FnMut(&[Gene]) -> f64,
        trace: &mut Vec<f64>,
    ) -> Vec<Individual> {
        sort(&mut pop);
        trace.push(pop[0].fitness);
        let len = pop[0].genes.len();
        let mutation = 1.0 / len as f64;
        let mut generation = 0;
        let mut last_duration = 0.0;
        loop {
            if self.params.max_generations.is_some_and(|cap| generation >= cap) {
                break;
            }
            // skip a generation that would likely end past the deadline
            let started = self.clock.now();
            if started + last_duration >= self.deadline {
                break;
            }
            let mut next: Vec<Individual> = pop[..self.params.elitism].to_vec();
            while next.len() < pop.len() {
                let a = self.tournament(rng, &pop);
                let b = self.tournament(rng, &pop);
                let mut genes = a.genes.clone();
                if rng.random_bool(self.params.crossover_rate) {
                    for (g, &other) in genes.iter_mut().zip(&b.genes) {
                        if rng.random_bool(0.5) {
                            *g = other;
                        }
                    }
                }
                for g in &mut genes {
                    if rng.random_bool(mutation) {
                        *g = rng.random_range(0..=self.alleles);
                    }
                }
                let f = fitness(&genes);
                next.push(Individual { genes, fitness: f });
            }
            pop = next;
            sort(&mut pop);
            trace.push(pop[0].fitness);
            generation += 1;
            last_duration = (self.clock.now() - started).max(0.0);
        }
        pop
    }
}

fn sort(pop: &mut [Individual]) {
    // stable, so equal fitness keeps the elite ahead of newcomers
    pop.sort_by(|a, b| a.fitness.total_cmp(&b.fitness));
}

impl Strategy for Genetic {
    fn name(&self) -> &'static str {
        "ga"
    }

    fn next_plan(&mut self, clock: &dyn Stopwatch) -> Result<CycleReport> {
        let start = clock.now();
        let mut tracker = ObjectiveTracker::new(&self.tracks, &self.surveys, self.spec.steps_per_plan);
        for p in &self.archive {
            tracker.push(p);
        }
        let mut rng = self.rng.clone();
        let mut trace = Vec::new();
        let params = self.params;
        let spec = &self.spec;
        let configs = &self.configs;
        let all_nodes = &self.all_nodes;

        // phase one: all-nodes configurations only
        let phase = Phase {
            params: &params,
            alleles: all_nodes.len() as u32,
            clock,
            deadline: start + params.phase_seconds * DEADLINE_SHARE,
        };
        let mut fit_short = |genes: &[Gene]| {
            let plan = decode_full(spec, configs, &to_config_genes(all_nodes, genes));
            tracker.objective_with(&plan)
        };
        let pop: Vec<Individual> = (0..params.population)
            .map(|_| {
                let genes = phase.random_genes(&mut rng, spec.cells_per_plan());
                let fitness = fit_short(&genes);
                Individual { genes, fitness }
            })
            .collect();
        let survivors = phase.evolve(&mut rng, pop, &mut fit_short, &mut trace);

        // phase two: every configuration, one gene per cell
        let phase = Phase {
            params: &params,
            alleles: configs.len() as u32,
            clock,
            deadline: start + 2.0 * params.phase_seconds * DEADLINE_SHARE,
        };
        let mut fit_full = |genes: &[Gene]| tracker.objective_with(&decode_full(spec, configs, genes));
        let seeded = ((params.population as f64 * params.seeded_fraction) as usize).clamp(1, params.population);
        let mut pop: Vec<Individual> = survivors
            .iter()
            .take(seeded)
            .map(|ind| Individual {
                genes: to_config_genes(all_nodes, &ind.genes),
                fitness: ind.fitness,
            })
            .collect();
        while pop.len() < params.population {
            let genes = phase.random_genes(&mut rng, spec.cells_per_plan());
            let fitness = fit_full(&genes);
            pop.push(Individual { genes, fitness });
        }
        let best = phase.evolve(&mut rng, pop, &mut fit_full, &mut trace);
        let plan = decode_full(spec, configs, &best[0].genes);

        self.rng = rng;
        self.trace = trace;
        self.archive.push(plan.clone());
        Ok(CycleReport {
            plan,
            lp_seconds: 0.0,
            plan_seconds: (clock.now() - start).max(0.0),
            uncovered_tasks: 0,
            discarded: 0,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clock::FrozenClock;
    use crate::interval::SingleInterval;
    use crate::model::{Emitter, InstanceMeta, SurveyId, TrackId};

    fn si(lo: f64, hi: f64) -> SingleInterval {
        SingleInterval::new(lo, hi).unwrap()
    }

    fn instance() -> Instance {
        Instance {
            spec: SystemSpec::standard(),
            tracks: vec![Track::new(TrackId(0), vec![Emitter::new(si(10500.0, 10520.0), 100.0).unwrap()], 0.4).unwrap()],
            surveys: vec![Survey::new(SurveyId(0), si(12000.0, 12400.0), 0.5).unwrap()],
            meta: InstanceMeta::default(),
        }
    }

    fn capped(generations: usize, seed: u64) -> GeneticParams {
        GeneticParams {
            max_generations: Some(generations),
            seed,
            ..GeneticParams::default()
        }
    }

    #[test]
    fn chromosome_length_matches_grid() {
        let ga = Genetic::new(&instance(), BaselineTiling::Interleaved, capped(1, 0)).unwrap();
        assert_eq!(ga.chromosome_len(), 80);
    }

    #[test]
    fn idle_chromosome_scores_all_goals() {
        let ga = Genetic::new(&instance(), BaselineTiling::Interleaved, capped(1, 0)).unwrap();
        let plan = ga.decode(&[0; 80]);
        assert!((ga.fitness_of(&plan) - 0.9).abs() < 1e-12);
    }

    #[test]
    fn elitism_keeps_best_fitness_monotone() {
        let mut ga = Genetic::new(&instance(), BaselineTiling::Interleaved, capped(15, 3)).unwrap();
        for _ in 0..2 {
            ga.next_plan(&FrozenClock).unwrap();
            let trace = ga.fitness_trace();
            assert_eq!(trace.len(), 32);
            assert!(trace.windows(2).all(|w| w[1] <= w[0]));
        }
    }

    #[test]
    fn capped_runs_are_reproducible() {
        let run = || {
            let mut ga = Genetic::new(&instance(), BaselineTiling::Interleaved, capped(5, 11)).unwrap();
            (0..3).map(|_| ga.next_plan(&FrozenClock).unwrap().plan).collect::<Vec<_>>()
        };
        assert_eq!(run(), run());
    }
}

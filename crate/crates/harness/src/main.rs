use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use resourcetune::evaluate::evaluate;
use resourcetune::preprocess::{BaselineTiling, ConstructionVariant};
use resourcetune::scenario::{generate_instance, ScenarioParams};
use resourcetune_harness::clock::WallClock;
use resourcetune_harness::compare::compare;
use resourcetune_harness::format::{read_instance, read_plans, write_instance, write_json, write_plans};
use resourcetune_harness::report::{write_csv, write_plots, write_summary};
use resourcetune_harness::runner::{run, Algorithm, RunConfig};

#[derive(Parser)]
#[command(name = "resourcetune", version, about = "Receiver tuning-plan experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write seeded random instances.
    Generate {
        #[arg(long)]
        utilization: f64,
        #[arg(long)]
        track_proportion: f64,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run one algorithm on one instance.
    Run {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum)]
        algorithm: AlgorithmArg,
        #[command(flatten)]
        common: CommonArgs,
        /// Output directory for the record, CSV row and plans.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run several algorithms on every instance of a directory.
    Compare {
        #[arg(long)]
        instances_dir: PathBuf,
        /// Comma-separated algorithm names.
        #[arg(long, value_delimiter = ',', default_value = "resourcetune,greedy,ga")]
        algorithms: Vec<AlgorithmArg>,
        #[command(flatten)]
        common: CommonArgs,
        /// Output directory for the CSV, summary and plots.
        #[arg(long)]
        out: PathBuf,
    },
    /// Score a stored plan sequence against an instance.
    Eval {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        plans_file: PathBuf,
    },
}

#[derive(Args)]
struct CommonArgs {
    #[arg(long, default_value_t = 100)]
    plans: usize,
    #[arg(long, default_value_t = 5.0)]
    split_size: f64,
    #[arg(long, default_value_t = 0.99999)]
    discount: f64,
    #[arg(long, default_value_t = 2.0)]
    budget_seconds: f64,
    /// Configuration construction used by resourcetune.
    #[arg(long, value_enum, default_value_t = VariantArg::LeftRight)]
    variant: VariantArg,
    /// Tile layout used by the greedy and GA baselines.
    #[arg(long, value_enum, default_value_t = TilingArg::Contiguous)]
    baseline_tiling: TilingArg,
    /// Seed of the GA's random stream.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Caps GA generations per phase.
    #[arg(long)]
    ga_generations: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgorithmArg {
    Resourcetune,
    Greedy,
    Ga,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    LeftRight,
    Centered,
    LeftCenterRight,
}

#[derive(Clone, Copy, ValueEnum)]
enum TilingArg {
    Contiguous,
    Interleaved,
}

impl From<AlgorithmArg> for Algorithm {
    fn from(a: AlgorithmArg) -> Self {
        match a {
            AlgorithmArg::Resourcetune => Algorithm::ResourceTune,
            AlgorithmArg::Greedy => Algorithm::Greedy,
            AlgorithmArg::Ga => Algorithm::Ga,
        }
    }
}

impl CommonArgs {
    fn config(&self) -> RunConfig {
        RunConfig {
            plans: self.plans,
            split_size: self.split_size,
            discount: self.discount,
            budget_seconds: self.budget_seconds,
            variant: match self.variant {
                VariantArg::LeftRight => ConstructionVariant::LeftRight,
                VariantArg::Centered => ConstructionVariant::Centered,
                VariantArg::LeftCenterRight => ConstructionVariant::LeftCenterRight,
            },
            tiling: match self.baseline_tiling {
                TilingArg::Interleaved => BaselineTiling::Interleaved,
                TilingArg::Contiguous => BaselineTiling::Contiguous,
            },
            algorithm_seed: self.seed,
            ga_max_generations: self.ga_generations,
        }
    }
}

fn create_dir(dir: &Path) -> anyhow::Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))
}

fn instance_id(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn execute(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Generate {
            utilization,
            track_proportion,
            count,
            seed,
            out,
        } => {
            if count == 0 {
                bail!("--count must be at least 1");
            }
            create_dir(&out)?;
            for k in 0..count as u64 {
                let s = seed + k;
                let instance = generate_instance(&ScenarioParams::new(utilization, track_proportion, s))?;
                let path = out.join(format!("u{utilization}_p{track_proportion}_seed{s}.json"));
                write_instance(&path, &instance)?;
                println!("{}", path.display());
            }
        }
        Command::Run {
            instance,
            algorithm,
            common,
            out,
        } => {
            let inst = read_instance(&instance)?;
            let config = common.config();
            let output = run(&instance_id(&instance), &inst, algorithm.into(), &config, &WallClock::new())?;
            create_dir(&out)?;
            write_json(&out.join("record.json"), &output.record)?;
            write_csv(&out.join("runs.csv"), std::slice::from_ref(&output.record))?;
            write_plans(&out.join("plans.json"), &output.plans)?;
            let r = &output.record;
            println!(
                "{} {} plans={} objective={:.6} total_time_mean={:.3}s overruns={}",
                r.instance_id, r.algorithm, r.plans, r.objective, r.total_time_mean, r.overruns
            );
        }
        Command::Compare {
            instances_dir,
            algorithms,
            common,
            out,
        } => {
            let mut paths: Vec<PathBuf> = fs::read_dir(&instances_dir)
                .with_context(|| format!("cannot read {}", instances_dir.display()))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "json"))
                .collect();
            paths.sort();
            if paths.is_empty() {
                bail!("no .json instances in {}", instances_dir.display());
            }
            let instances = paths
                .iter()
                .map(|p| Ok((instance_id(p), read_instance(p)?)))
                .collect::<anyhow::Result<Vec<_>>>()?;
            let algorithms: Vec<Algorithm> = algorithms.into_iter().map(Algorithm::from).collect();
            let (records, table) = compare(&instances, &algorithms, &common.config(), &WallClock::new())?;
            create_dir(&out)?;
            write_csv(&out.join("runs.csv"), &records)?;
            write_summary(&out.join("summary.json"), &table)?;
            write_plots(&out.join("plots"), &table, &records)?;
            for s in &table.scenarios {
                for a in &s.algorithms {
                    println!(
                        "U={} p={} {}: mean={:.4} sd={:.4} wins={}/{} median_norm={}",
                        s.utilization, s.track_proportion, a.algorithm, a.mean, a.sd, a.wins, s.instances, a.normalized.q2
                    );
                }
            }
        }
        Command::Eval { instance, plans_file } => {
            let inst = read_instance(&instance)?;
            let plans = read_plans(&plans_file)?;
            let report = evaluate(&plans, &inst.tracks, &inst.surveys)?;
            let per_track: Vec<_> = report.per_track.iter().map(|(id, v)| serde_json::json!({"id": id.0, "deficit": v})).collect();
            let per_survey: Vec<_> = report.per_survey.iter().map(|(id, v)| serde_json::json!({"id": id.0, "deficit": v})).collect();
            let value = serde_json::json!({
                "objective": report.total,
                "plans": report.plan_count,
                "tracks": per_track,
                "surveys": per_survey,
            });
            println!("{}", serde_json::to_string_pretty(&value)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

//! Benchmark CLI: scenario simulation, alarm evaluation, bound curves,
//! regression training, and time-to-collision estimation.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use collision_alarms::alarms::{estimate_ttc, train_regression_with, FeatureSet};
use collision_alarms::bounds::CostConfig;
use collision_alarms::harness::{
    default_bound_grid, run_benchmark_on, timing_report, write_bound_curve, write_timings, Alarm,
    AlarmSpec, BenchmarkConfig, EvalSet,
};
use collision_alarms::mlp::TrainConfig;
use collision_alarms::scenarios::{
    read_batch, write_batch, ScenarioConfig, ScenarioGenerator, ScenarioKind,
};

#[derive(Parser)]
#[command(
    name = "collision-alarms",
    version,
    about = "Collision-alarm benchmark suite"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a scenario batch and store it as line-delimited JSON.
    Simulate(SimulateArgs),
    /// Run alarms over a batch and write the result tables.
    Evaluate(EvaluateArgs),
    /// Emit the Monte Carlo EAC bound curve as CSV.
    Bound(BoundArgs),
    /// Train the regression alarm and write its weight file.
    Train(TrainArgs),
    /// Estimate time-to-collision for one stored scenario's belief.
    Ttc(TtcArgs),
}

/// Scenario selection shared by several subcommands. Flags override the
/// config file, which overrides the built-in defaults.
#[derive(Args)]
struct ScenarioArgs {
    /// Scenario family [default: left-turn].
    #[arg(long, value_enum)]
    scenario: Option<ScenarioFlag>,
    /// Detection horizon t_f in seconds [default: 1.0].
    #[arg(long)]
    horizon: Option<f64>,
    /// Check interval in seconds [default: 0.1].
    #[arg(long)]
    dt: Option<f64>,
    /// Seed for scenario generation (and, in `evaluate`, for the oracle and
    /// alarm streams) [default: 0].
    #[arg(long)]
    seed: Option<u64>,
    /// JSON benchmark config (all fields optional; mirrors the defaults).
    /// Subcommands other than `evaluate` read only its `scenario` section.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(clap::ValueEnum, Clone, Copy)]
enum ScenarioFlag {
    LeftTurn,
    Bicycle,
}

impl ScenarioArgs {
    /// Benchmark config with the scenario flags folded in.
    fn build_benchmark(&self) -> anyhow::Result<BenchmarkConfig> {
        let mut config = match &self.config {
            Some(path) => BenchmarkConfig::from_json_file(path)?,
            None => BenchmarkConfig::default(),
        };
        if let Some(kind) = self.scenario {
            config.scenario.kind = match kind {
                ScenarioFlag::LeftTurn => ScenarioKind::LeftTurn,
                ScenarioFlag::Bicycle => ScenarioKind::Bicycle,
            };
        }
        if let Some(t_f) = self.horizon {
            config.scenario.t_f = t_f;
        }
        if let Some(dt) = self.dt {
            config.scenario.dt = dt;
        }
        if let Some(seed) = self.seed {
            config.scenario.seed = seed;
            config.seed = seed;
        }
        Ok(config)
    }

    fn build(&self) -> anyhow::Result<ScenarioConfig> {
        Ok(self.build_benchmark()?.scenario)
    }
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Number of scenarios.
    #[arg(long, default_value_t = 1000)]
    n: usize,
    /// Output batch file.
    #[arg(long, default_value = "batch.jsonl")]
    out: PathBuf,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Stored batch file from `simulate`; scenarios are generated on the
    /// fly when absent.
    #[arg(long)]
    batch: Option<PathBuf>,
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Number of scenarios when generating on the fly [default: 1000].
    #[arg(long)]
    n: Option<usize>,
    /// Oracle sample count [default: 20000].
    #[arg(long)]
    samples: Option<usize>,
    /// False-negative costs, comma separated (false-positive cost fixed
    /// at 1). Ignored when the config file lists cost pairs explicitly.
    #[arg(long, value_delimiter = ',')]
    costs: Option<Vec<f64>>,
    /// Regression weight file to include as an alarm.
    #[arg(long)]
    model: Option<PathBuf>,
    /// Also measure single-threaded per-call wall times (timings.csv;
    /// non-deterministic by nature).
    #[arg(long)]
    timing: bool,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct BoundArgs {
    /// False-negative costs, comma separated (false-positive cost fixed
    /// at 1).
    #[arg(long, value_delimiter = ',', default_values_t = vec![1.0, 10.0, 100.0])]
    costs: Vec<f64>,
    /// Output CSV path.
    #[arg(long, default_value = "bound.csv")]
    out: PathBuf,
    /// Smallest sample count.
    #[arg(long, default_value_t = 10)]
    n_min: usize,
    /// Largest sample count.
    #[arg(long, default_value_t = 100_000)]
    n_max: usize,
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Training set size.
    #[arg(long, default_value_t = 100_000)]
    n: usize,
    /// Monte Carlo samples per training label.
    #[arg(long, default_value_t = 1000)]
    oracle_samples: usize,
    /// Hidden-layer width.
    #[arg(long, default_value_t = 150)]
    width: usize,
    /// Feature inputs: raw belief moments, or with appended
    /// time-to-collision surrogates.
    #[arg(long, value_enum, default_value = "raw")]
    features: FeatureFlag,
    /// Output weight file.
    #[arg(long, default_value = "model.json")]
    out: PathBuf,
}

#[derive(clap::ValueEnum, Clone, Copy)]
enum FeatureFlag {
    Raw,
    TtcSurrogate,
}

#[derive(Args)]
struct TtcArgs {
    /// Stored batch file.
    #[arg(long)]
    batch: PathBuf,
    /// Scenario index within the batch.
    #[arg(long, default_value_t = 0)]
    index: usize,
    /// Check interval in seconds.
    #[arg(long, default_value_t = 0.1)]
    dt: f64,
    /// Largest cutoff time to consider.
    #[arg(long, default_value_t = 3.0)]
    max_horizon: f64,
    /// Monte Carlo samples shared across cutoffs.
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    /// Alarm probability cutoff.
    #[arg(long, default_value_t = 0.1)]
    c_cut: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn main() -> anyhow::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match Cli::parse().command {
        Command::Simulate(args) => simulate(args),
        Command::Evaluate(args) => evaluate(args),
        Command::Bound(args) => bound(args),
        Command::Train(args) => train(args),
        Command::Ttc(args) => ttc(args),
    }
}

fn simulate(args: SimulateArgs) -> anyhow::Result<()> {
    let config = args.scenario.build()?;
    let generator = ScenarioGenerator::new(config.clone())?;
    let batch = generator.generate_batch(args.n);
    let collisions = batch.iter().filter(|s| s.collided).count();
    write_batch(&args.out, &config, &batch)?;
    println!(
        "wrote {} scenarios ({} collisions, rate {:.4}) to {}",
        batch.len(),
        collisions,
        collisions as f64 / batch.len().max(1) as f64,
        args.out.display()
    );
    Ok(())
}

fn evaluate(args: EvaluateArgs) -> anyhow::Result<()> {
    let mut config = args.scenario.build_benchmark()?;
    if let Some(n) = args.n {
        config.n_scenarios = n;
    }
    if let Some(samples) = args.samples {
        config.oracle_samples = samples;
    }
    config.out_dir = args.out.clone();
    if let Some(costs) = &args.costs {
        config.costs = costs
            .iter()
            .map(|&r_fn| CostConfig::new(r_fn, 1.0))
            .collect::<Result<Vec<_>, _>>()?;
    }
    if let Some(model) = &args.model {
        config.alarms.push(AlarmSpec::Regression {
            model_path: model.clone(),
        });
    }

    let stored_set = match &args.batch {
        Some(path) => {
            let (stored_config, records) = read_batch(path)?;
            let generator = ScenarioGenerator::new(stored_config.clone())?;
            config.scenario = stored_config;
            Some(EvalSet::from_records(&records, &generator)?)
        }
        None => None,
    };

    let report = run_benchmark_on(&config, stored_set)?;
    for file in &report.files {
        println!("wrote {}", file.display());
    }
    if args.timing {
        let generator = ScenarioGenerator::new(config.scenario.clone())?;
        let scenarios = generator.generate_batch(config.n_scenarios.min(200));
        let set = EvalSet::from_scenarios(&scenarios, config.scenario.horizon()?)?;
        let alarms = config
            .alarms
            .iter()
            .map(Alarm::from_spec)
            .collect::<Result<Vec<_>, _>>()?;
        let stats = timing_report(&alarms, &set, config.seed, 5, 100);
        let path = config.out_dir.join("timings.csv");
        write_timings(&path, &stats)?;
        println!("wrote {}", path.display());
    }
    if report.bound_checks.iter().any(|c| !c.ok) {
        println!("warning: a Monte Carlo alarm exceeded its sampling bound");
    }
    Ok(())
}

fn bound(args: BoundArgs) -> anyhow::Result<()> {
    let costs = args
        .costs
        .iter()
        .map(|&r_fn| CostConfig::new(r_fn, 1.0))
        .collect::<Result<Vec<_>, _>>()?;
    let ns: Vec<usize> = default_bound_grid()
        .into_iter()
        .filter(|&n| n >= args.n_min && n <= args.n_max)
        .collect();
    write_bound_curve(&args.out, &ns, &costs)?;
    println!("wrote {}", args.out.display());
    Ok(())
}

fn train(args: TrainArgs) -> anyhow::Result<()> {
    let config = args.scenario.build()?;
    let generator = ScenarioGenerator::new(config.clone())?;
    let horizon = config.horizon()?;
    let features = match args.features {
        FeatureFlag::Raw => FeatureSet::Raw,
        FeatureFlag::TtcSurrogate => FeatureSet::TtcSurrogate,
    };
    let report = train_regression_with(
        generator.belief_generator(),
        &horizon,
        args.oracle_samples,
        args.n,
        args.width,
        &TrainConfig::default(),
        config.seed,
        features,
    )?;
    report.model.save_json(&args.out)?;
    println!(
        "trained width-{} model on {} points in {} epochs; held-out RMSE {:.5} ({} points); wrote {}",
        args.width,
        args.n,
        report.epochs,
        report.holdout_rmse,
        report.holdout_size,
        args.out.display()
    );
    Ok(())
}

fn ttc(args: TtcArgs) -> anyhow::Result<()> {
    let (config, records) = read_batch(&args.batch)?;
    let record = records
        .get(args.index)
        .ok_or_else(|| anyhow::anyhow!("index {} out of range", args.index))?;
    let generator = ScenarioGenerator::new(config)?;
    let belief = record.to_belief(generator.models().clone())?;
    match estimate_ttc(
        &belief,
        args.dt,
        args.max_horizon,
        args.samples,
        args.c_cut,
        args.seed,
    ) {
        Some(t) => println!("ttc: {t:.3} s"),
        None => println!("ttc: none within {:.3} s", args.max_horizon),
    }
    Ok(())
}

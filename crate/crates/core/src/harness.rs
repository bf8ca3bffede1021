//! Benchmark orchestration: run alarms over scenario batches, score them
//! against a high-sample oracle, and emit CSV tables plus a run manifest.
//!
//! Scoring conventions:
//!
//! * `FNR = P(no alarm | collision)` and `FPR = P(alarm | no collision)` are
//!   conditional frequencies; the joint frequencies are reported alongside.
//! * `EC = r_fn * P(collision, no alarm) + r_fp * P(alarm, no collision)`
//!   estimated by empirical joint frequencies over the batch.
//! * `EAC = EC_alarm - EC_oracle`, the oracle being a high-sample Monte
//!   Carlo alarm on its own fixed stream.
//!
//! Every number written to the result tables is a deterministic function of
//! `(config, seed)`; wall-clock timing goes to a separate report.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::alarms::{
    expected_value_alarm, mc_alarm, regression_alarm, unscented_alarm, HorizonConfig,
};
use crate::bounds::{mc_eac_bound, optimal_cutoff, CostConfig};
use crate::dynamics::JointBelief;
use crate::error::{Error, Result};
use crate::mlp::RegressionModel;
use crate::rng::{derive_seed, Domain};
use crate::scenarios::{config_hash, Scenario, ScenarioConfig, ScenarioGenerator, ScenarioRecord};

/// Serializable alarm description, as it appears in config files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum AlarmSpec {
    Mc { samples: usize },
    ExpectedValue,
    Unscented { kappa: f64 },
    Regression { model_path: PathBuf },
}

/// Resolved alarm ready to evaluate (regression weights loaded).
#[derive(Debug, Clone)]
pub enum Alarm {
    Mc { samples: usize },
    ExpectedValue,
    Unscented { kappa: f64 },
    Regression(Box<RegressionModel>),
}

impl AlarmSpec {
    pub fn name(&self) -> String {
        match self {
            AlarmSpec::Mc { samples } => format!("mc-{samples}"),
            AlarmSpec::ExpectedValue => "expected-value".into(),
            AlarmSpec::Unscented { .. } => "unscented".into(),
            AlarmSpec::Regression { .. } => "regression".into(),
        }
    }
}

impl Alarm {
    pub fn from_spec(spec: &AlarmSpec) -> Result<Self> {
        Ok(match spec {
            AlarmSpec::Mc { samples } => Alarm::Mc { samples: *samples },
            AlarmSpec::ExpectedValue => Alarm::ExpectedValue,
            AlarmSpec::Unscented { kappa } => Alarm::Unscented { kappa: *kappa },
            AlarmSpec::Regression { model_path } => {
                Alarm::Regression(Box::new(RegressionModel::load_json(model_path)?))
            }
        })
    }

    pub fn name(&self) -> String {
        match self {
            Alarm::Mc { samples } => format!("mc-{samples}"),
            Alarm::ExpectedValue => "expected-value".into(),
            Alarm::Unscented { .. } => "unscented".into(),
            Alarm::Regression(_) => "regression".into(),
        }
    }
}

/// Scenario batch in evaluation form: beliefs plus ground-truth labels.
pub struct EvalSet {
    pub beliefs: Vec<JointBelief>,
    pub labels: Vec<bool>,
    pub horizon: HorizonConfig,
}

impl EvalSet {
    pub fn from_scenarios(scenarios: &[Scenario], horizon: HorizonConfig) -> Result<Self> {
        if scenarios.is_empty() {
            return Err(Error::EmptyBatch);
        }
        Ok(EvalSet {
            beliefs: scenarios.iter().map(|s| s.belief.clone()).collect(),
            labels: scenarios.iter().map(|s| s.collided).collect(),
            horizon,
        })
    }

    pub fn from_records(
        records: &[ScenarioRecord],
        generator: &ScenarioGenerator,
    ) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::EmptyBatch);
        }
        let beliefs = records
            .iter()
            .map(|r| r.to_belief(generator.models().clone()))
            .collect::<Result<Vec<_>>>()?;
        Ok(EvalSet {
            beliefs,
            labels: records.iter().map(|r| r.collided).collect(),
            horizon: generator.config().horizon()?,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn collision_rate(&self) -> f64 {
        self.labels.iter().filter(|c| **c).count() as f64 / self.len() as f64
    }
}

/// Per-cost-config scores of one alarm.
#[derive(Debug, Clone, Serialize)]
pub struct EvaluationRow {
    pub costs: CostConfig,
    pub c_cut: f64,
    /// Conditional rates; absent when the conditioning event never occurs.
    pub fnr: Option<f64>,
    pub fpr: Option<f64>,
    /// Joint frequencies over the whole batch.
    pub fnr_joint: f64,
    pub fpr_joint: f64,
    pub ec: f64,
    pub eac: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EvaluationResult {
    pub alarm: String,
    pub scenario_count: usize,
    pub collision_rate: f64,
    /// Mean wall time per alarm call, measured while computing decisions
    /// (possibly under scenario-level parallelism; see `timing_report` for
    /// contention-free numbers).
    pub mean_wall_time: f64,
    pub rows: Vec<EvaluationRow>,
}

/// Collision-probability estimates of an alarm on every scenario, computed
/// on per-scenario derived streams. The estimate vector is deterministic in
/// `(alarm, set, seed)` no matter the thread count.
pub fn alarm_estimates(alarm: &Alarm, set: &EvalSet, seed: u64) -> (Vec<f64>, f64) {
    let results: Vec<(f64, f64)> = set
        .beliefs
        .par_iter()
        .enumerate()
        .map(|(i, belief)| {
            let scen_seed = derive_seed(seed, Domain::AlarmEval, i as u64);
            let r = match alarm {
                // The cutoff passed here does not matter: decisions are
                // re-derived per cost config from the estimate.
                Alarm::Mc { samples } => {
                    mc_alarm(belief, &set.horizon, *samples, 0.5, scen_seed)
                }
                Alarm::ExpectedValue => expected_value_alarm(belief, &set.horizon),
                Alarm::Unscented { kappa } => {
                    unscented_alarm(belief, &set.horizon, *kappa, 0.5)
                        .expect("belief covariance validated at construction")
                }
                Alarm::Regression(model) => regression_alarm(model, belief, 0.5),
            };
            (r.estimate.expect("all alarms estimate"), r.wall_time)
        })
        .collect();
    let mean_wall = results.iter().map(|(_, w)| w).sum::<f64>() / results.len() as f64;
    (results.iter().map(|(e, _)| *e).collect(), mean_wall)
}

/// Oracle estimates: high-sample Monte Carlo on a stream keyed by `seed`
/// only, independent of every alarm stream.
pub fn oracle_estimates(set: &EvalSet, samples: usize, seed: u64) -> Vec<f64> {
    set.beliefs
        .par_iter()
        .enumerate()
        .map(|(i, belief)| {
            let scen_seed = derive_seed(seed, Domain::Oracle, i as u64);
            mc_alarm(belief, &set.horizon, samples, 0.5, scen_seed)
                .estimate
                .expect("mc alarm always estimates")
        })
        .collect()
}

fn score_rows(
    estimates: &[f64],
    labels: &[bool],
    costs: &[CostConfig],
    oracle_estimates: &[f64],
) -> Vec<EvaluationRow> {
    let n = labels.len() as f64;
    let n_coll = labels.iter().filter(|c| **c).count() as f64;
    let n_clear = n - n_coll;
    costs
        .iter()
        .map(|cost| {
            let c_cut = optimal_cutoff(cost);
            let mut fn_count = 0u64;
            let mut fp_count = 0u64;
            let mut oracle_fn = 0u64;
            let mut oracle_fp = 0u64;
            for ((est, oracle_est), collided) in
                estimates.iter().zip(oracle_estimates).zip(labels)
            {
                let fired = *est > c_cut;
                let oracle_fired = *oracle_est > c_cut;
                match (collided, fired) {
                    (true, false) => fn_count += 1,
                    (false, true) => fp_count += 1,
                    _ => {}
                }
                match (collided, oracle_fired) {
                    (true, false) => oracle_fn += 1,
                    (false, true) => oracle_fp += 1,
                    _ => {}
                }
            }
            let fnr_joint = fn_count as f64 / n;
            let fpr_joint = fp_count as f64 / n;
            let ec = cost.r_fn * fnr_joint + cost.r_fp * fpr_joint;
            let oracle_ec = cost.r_fn * (oracle_fn as f64 / n) + cost.r_fp * (oracle_fp as f64 / n);
            EvaluationRow {
                costs: *cost,
                c_cut,
                fnr: (n_coll > 0.0).then(|| fn_count as f64 / n_coll),
                fpr: (n_clear > 0.0).then(|| fp_count as f64 / n_clear),
                fnr_joint,
                fpr_joint,
                ec,
                eac: ec - oracle_ec,
            }
        })
        .collect()
}

/// Score one alarm against the oracle decisions over the same batch and
/// cost cutoffs.
pub fn evaluate(
    alarm: &Alarm,
    set: &EvalSet,
    costs: &[CostConfig],
    oracle_est: &[f64],
    seed: u64,
) -> Result<EvaluationResult> {
    if set.is_empty() {
        return Err(Error::EmptyBatch);
    }
    if oracle_est.len() != set.len() {
        return Err(Error::DimensionMismatch {
            expected: set.len(),
            actual: oracle_est.len(),
        });
    }
    // Key the alarm stream by its name, not its list position, so results
    // do not depend on the order alarms are evaluated in.
    let alarm_seed = derive_seed(seed, Domain::AlarmEval, fnv1a64(alarm.name().as_bytes()));
    let (estimates, mean_wall) = alarm_estimates(alarm, set, alarm_seed);
    Ok(EvaluationResult {
        alarm: alarm.name(),
        scenario_count: set.len(),
        collision_rate: set.collision_rate(),
        mean_wall_time: mean_wall,
        rows: score_rows(&estimates, &set.labels, costs, oracle_est),
    })
}

/// Score the oracle against itself (its EAC is zero by construction).
pub fn oracle_result(
    set: &EvalSet,
    costs: &[CostConfig],
    oracle_est: &[f64],
    oracle_samples: usize,
) -> EvaluationResult {
    EvaluationResult {
        alarm: format!("oracle-mc-{oracle_samples}"),
        scenario_count: set.len(),
        collision_rate: set.collision_rate(),
        mean_wall_time: 0.0,
        rows: score_rows(oracle_est, &set.labels, costs, oracle_est),
    }
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= *b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Benchmark description, loadable from a flat JSON config file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct BenchmarkConfig {
    pub scenario: ScenarioConfig,
    pub alarms: Vec<AlarmSpec>,
    pub costs: Vec<CostConfig>,
    pub oracle_samples: usize,
    pub n_scenarios: usize,
    /// Seed for oracle and alarm streams (scenario generation uses the
    /// scenario config's own seed).
    pub seed: u64,
    pub out_dir: PathBuf,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        BenchmarkConfig {
            scenario: ScenarioConfig::default(),
            alarms: vec![
                AlarmSpec::Mc { samples: 10 },
                AlarmSpec::Mc { samples: 100 },
                AlarmSpec::Mc { samples: 1000 },
                AlarmSpec::Unscented { kappa: 0.0 },
                AlarmSpec::ExpectedValue,
            ],
            costs: vec![
                CostConfig { r_fn: 1.0, r_fp: 1.0 },
                CostConfig { r_fn: 10.0, r_fp: 1.0 },
                CostConfig { r_fn: 100.0, r_fp: 1.0 },
            ],
            oracle_samples: 20_000,
            n_scenarios: 1000,
            seed: 0,
            out_dir: PathBuf::from("out"),
        }
    }
}

impl BenchmarkConfig {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// Runtime check of the sampling-error bound on every Monte Carlo alarm.
#[derive(Debug, Clone, Serialize)]
pub struct BoundCheck {
    pub alarm: String,
    pub samples: usize,
    pub costs: CostConfig,
    pub eac: f64,
    pub bound: f64,
    pub ok: bool,
}

/// An alarm that could not be evaluated; the run continues without it.
#[derive(Debug, Clone, Serialize)]
pub struct AlarmFailure {
    pub alarm: String,
    pub error: String,
}

#[derive(Debug)]
pub struct BenchmarkReport {
    pub oracle: EvaluationResult,
    pub alarms: Vec<EvaluationResult>,
    pub failures: Vec<AlarmFailure>,
    pub bound_checks: Vec<BoundCheck>,
    pub files: Vec<PathBuf>,
}

#[derive(Serialize)]
struct Manifest<'a> {
    format: &'static str,
    version: u32,
    crate_version: &'static str,
    config: &'a BenchmarkConfig,
    scenario_config_hash: String,
    collision_rate: f64,
    bound_checks: &'a [BoundCheck],
    alarm_failures: &'a [AlarmFailure],
}

/// Run the full benchmark: generate (or reuse) a batch, compute oracle
/// decisions once, evaluate every alarm, and write report files under
/// `config.out_dir`:
///
/// * `table2.csv` — oracle performance per cost config
/// * `table3.csv` — alarm EAC per cost config
/// * `details.csv` — full long-format scores
/// * `manifest.json` — config, hash, and bound checks for replay
///
/// Identical `(config, seed)` produce byte-identical files regardless of
/// thread count.
pub fn run_benchmark(config: &BenchmarkConfig) -> Result<BenchmarkReport> {
    run_benchmark_on(config, None)
}

/// As [`run_benchmark`], but optionally reusing a pre-built evaluation set
/// (e.g. loaded from a stored batch matching the scenario config).
pub fn run_benchmark_on(
    config: &BenchmarkConfig,
    batch: Option<EvalSet>,
) -> Result<BenchmarkReport> {
    let set = match batch {
        Some(set) => set,
        None => {
            let generator = ScenarioGenerator::new(config.scenario.clone())?;
            let scenarios = generator.generate_batch(config.n_scenarios);
            EvalSet::from_scenarios(&scenarios, config.scenario.horizon()?)?
        }
    };

    let oracle_est = oracle_estimates(
        &set,
        config.oracle_samples,
        derive_seed(config.seed, Domain::Oracle, 0),
    );
    let oracle = oracle_result(&set, &config.costs, &oracle_est, config.oracle_samples);

    let mut alarms = Vec::new();
    let mut failures = Vec::new();
    let mut bound_checks = Vec::new();
    for spec in &config.alarms {
        // A failing alarm (e.g. a missing weight file) is recorded and the
        // run continues with the rest.
        let outcome = Alarm::from_spec(spec)
            .and_then(|alarm| evaluate(&alarm, &set, &config.costs, &oracle_est, config.seed)
                .map(|result| (alarm, result)));
        let (alarm, result) = match outcome {
            Ok(pair) => pair,
            Err(err) => {
                log::warn!("alarm {} failed: {err}", spec.name());
                failures.push(AlarmFailure {
                    alarm: spec.name(),
                    error: err.to_string(),
                });
                continue;
            }
        };
        if let Alarm::Mc { samples } = alarm {
            for row in &result.rows {
                let bound = mc_eac_bound(samples, &row.costs);
                bound_checks.push(BoundCheck {
                    alarm: result.alarm.clone(),
                    samples,
                    costs: row.costs,
                    eac: row.eac,
                    bound,
                    ok: row.eac <= bound + 1e-12,
                });
            }
        }
        alarms.push(result);
    }
    for check in &bound_checks {
        if !check.ok {
            log::warn!(
                "{} EAC {} exceeds the sampling bound {} at costs {:?}",
                check.alarm,
                check.eac,
                check.bound,
                check.costs
            );
        }
    }

    std::fs::create_dir_all(&config.out_dir)?;
    let mut files = Vec::new();

    let table2 = config.out_dir.join("table2.csv");
    write_oracle_table(&table2, &oracle, &config.costs)?;
    files.push(table2);

    let table3 = config.out_dir.join("table3.csv");
    write_eac_table(&table3, &alarms, &config.costs)?;
    files.push(table3);

    let details = config.out_dir.join("details.csv");
    write_details(&details, std::iter::once(&oracle).chain(alarms.iter()))?;
    files.push(details);

    let manifest_path = config.out_dir.join("manifest.json");
    let manifest = Manifest {
        format: "benchmark-manifest",
        version: 1,
        crate_version: env!("CARGO_PKG_VERSION"),
        config,
        scenario_config_hash: config_hash(&config.scenario),
        collision_rate: set.collision_rate(),
        bound_checks: &bound_checks,
        alarm_failures: &failures,
    };
    std::fs::write(&manifest_path, serde_json::to_string_pretty(&manifest)?)?;
    files.push(manifest_path);

    Ok(BenchmarkReport {
        oracle,
        alarms,
        failures,
        bound_checks,
        files,
    })
}

/// Fixed 6-significant-digit format used in every CSV cell.
pub fn fmt_sig6(x: f64) -> String {
    if !x.is_finite() {
        return "NA".into();
    }
    if x == 0.0 {
        return "0".into();
    }
    let mag = x.abs().log10().floor() as i32;
    let decimals = (5 - mag).max(0) as usize;
    format!("{x:.decimals$}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_sig6).unwrap_or_else(|| "NA".into())
}

fn write_oracle_table(path: &Path, oracle: &EvaluationResult, costs: &[CostConfig]) -> Result<()> {
    let mut out = String::new();
    out.push_str("scenario,collision_rate");
    for c in costs {
        let label = c.label();
        out.push_str(&format!(",fnr_{label},fpr_{label},ec_{label}"));
    }
    out.push('\n');
    out.push_str(&format!(
        "{},{}",
        oracle.alarm,
        fmt_sig6(oracle.collision_rate)
    ));
    for row in &oracle.rows {
        out.push_str(&format!(
            ",{},{},{}",
            fmt_opt(row.fnr),
            fmt_opt(row.fpr),
            fmt_sig6(row.ec)
        ));
    }
    out.push('\n');
    std::fs::write(path, out)?;
    Ok(())
}

fn write_eac_table(
    path: &Path,
    alarms: &[EvaluationResult],
    costs: &[CostConfig],
) -> Result<()> {
    let mut out = String::new();
    out.push_str("alarm");
    for c in costs {
        out.push_str(&format!(",eac_{}", c.label()));
    }
    out.push('\n');
    for result in alarms {
        out.push_str(&result.alarm);
        for row in &result.rows {
            out.push_str(&format!(",{}", fmt_sig6(row.eac)));
        }
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

fn write_details<'a>(
    path: &Path,
    results: impl Iterator<Item = &'a EvaluationResult>,
) -> Result<()> {
    let mut out = String::new();
    out.push_str(
        "alarm,r_fn,r_fp,c_cut,collision_rate,fnr,fpr,fnr_joint,fpr_joint,ec,eac\n",
    );
    for result in results {
        for row in &result.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{}\n",
                result.alarm,
                fmt_sig6(row.costs.r_fn),
                fmt_sig6(row.costs.r_fp),
                fmt_sig6(row.c_cut),
                fmt_sig6(result.collision_rate),
                fmt_opt(row.fnr),
                fmt_opt(row.fpr),
                fmt_sig6(row.fnr_joint),
                fmt_sig6(row.fpr_joint),
                fmt_sig6(row.ec),
                fmt_sig6(row.eac)
            ));
        }
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Emit the sampling-bound curve as CSV: one row per sample count, one
/// bound column per cost config.
pub fn write_bound_curve(path: &Path, ns: &[usize], costs: &[CostConfig]) -> Result<()> {
    let mut out = String::new();
    out.push_str("n");
    for c in costs {
        out.push_str(&format!(",bound_{}", c.label()));
    }
    out.push('\n');
    for &n in ns {
        out.push_str(&format!("{n}"));
        for c in costs {
            out.push_str(&format!(",{}", fmt_sig6(mc_eac_bound(n, c))));
        }
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Log-spaced sample counts for the bound curve, 10 to 1e5.
pub fn default_bound_grid() -> Vec<usize> {
    let mut ns = Vec::new();
    let mut last = 0;
    for i in 0..=48 {
        let n = (10.0f64.powf(1.0 + i as f64 / 12.0)).round() as usize;
        if n != last {
            ns.push(n);
            last = n;
        }
    }
    ns
}

/// Wall-clock statistics of repeated single-threaded alarm calls.
#[derive(Debug, Clone, Serialize)]
pub struct TimingStats {
    pub alarm: String,
    pub calls: usize,
    pub mean_s: f64,
    pub p50_s: f64,
    pub p90_s: f64,
}

/// Time each alarm on the batch, one call at a time inside a single-thread
/// pool so per-call numbers are free of scenario-level contention. The first
/// `warmup` calls are excluded. A `baseline` row measures harness overhead
/// with a no-op alarm.
pub fn timing_report(
    alarms: &[Alarm],
    set: &EvalSet,
    seed: u64,
    warmup: usize,
    max_calls: usize,
) -> Vec<TimingStats> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .expect("single-thread pool");
    let calls = max_calls.min(set.len());
    let mut stats = Vec::new();

    let mut measure = |name: String, mut call: Box<dyn FnMut(usize) -> bool + '_>| {
        let mut times = Vec::with_capacity(calls);
        for i in 0..calls + warmup {
            let idx = i % set.len();
            let start = Instant::now();
            let decision = call(idx);
            let elapsed = start.elapsed().as_secs_f64();
            std::hint::black_box(decision);
            if i >= warmup {
                times.push(elapsed);
            }
        }
        times.sort_by(|a, b| a.partial_cmp(b).expect("finite times"));
        let mean = times.iter().sum::<f64>() / times.len() as f64;
        let pct = |q: f64| times[((times.len() - 1) as f64 * q).round() as usize];
        stats.push(TimingStats {
            alarm: name,
            calls,
            mean_s: mean,
            p50_s: pct(0.5),
            p90_s: pct(0.9),
        });
    };

    pool.install(|| {
        measure(
            "baseline".into(),
            Box::new(|idx| std::hint::black_box(&set.beliefs[idx]).dim() == 0),
        );
        for alarm in alarms {
            let name = alarm.name();
            let alarm_seed = derive_seed(seed, Domain::AlarmEval, fnv1a64(name.as_bytes()));
            measure(
                name,
                Box::new(move |idx| {
                    let belief = &set.beliefs[idx];
                    let scen_seed = derive_seed(alarm_seed, Domain::AlarmEval, idx as u64);
                    match alarm {
                        Alarm::Mc { samples } => {
                            mc_alarm(belief, &set.horizon, *samples, 0.5, scen_seed).decision
                        }
                        Alarm::ExpectedValue => expected_value_alarm(belief, &set.horizon).decision,
                        Alarm::Unscented { kappa } => {
                            unscented_alarm(belief, &set.horizon, *kappa, 0.5)
                                .expect("valid covariance")
                                .decision
                        }
                        Alarm::Regression(model) => {
                            regression_alarm(model, belief, 0.5).decision
                        }
                    }
                }),
            );
        }
    });
    stats
}

/// Write the timing report; these numbers are wall-clock and intentionally
/// excluded from the deterministic result tables.
pub fn write_timings(path: &Path, stats: &[TimingStats]) -> Result<()> {
    let mut out = String::new();
    out.push_str("alarm,calls,mean_ms,p50_ms,p90_ms\n");
    for s in stats {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            s.alarm,
            s.calls,
            fmt_sig6(s.mean_s * 1e3),
            fmt_sig6(s.p50_s * 1e3),
            fmt_sig6(s.p90_s * 1e3)
        ));
    }
    std::fs::write(path, out)?;
    Ok(())
}

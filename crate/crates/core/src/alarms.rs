//! Collision-probability estimators and alarm decision rules.
//!
//! Every alarm consumes a [`JointBelief`] over the two-vehicle state and a
//! [`HorizonConfig`] describing the check interval, cutoff time, and safety
//! margin, and produces an [`AlarmResult`]. Estimators:
//!
//! * [`mc_alarm`] — Monte Carlo rollouts with early exit on first overlap.
//! * [`expected_value_alarm`] — propagates only the belief mean.
//! * [`unscented_alarm`] — propagates a sigma-point set and averages the
//!   collision indicator.
//! * [`regression_alarm`] — queries a trained [`RegressionModel`].
//!
//! [`estimate_ttc`] composes alarms over increasing cutoff times into a
//! time-to-collision estimate from one shared sample set.
//!
//! All estimators are deterministic functions of their inputs and a `u64`
//! seed; Monte Carlo sampling derives one substream per sample, so results
//! are independent of thread count.

use std::time::Instant;

use nalgebra::DVector;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{JointBelief, JointModel, ModelKind};
use crate::error::{Error, Result};
use crate::geometry::normalize_angle;
use crate::mlp::{self, RegressionModel, TrainConfig};
use crate::rng::{substream, Domain};

/// Check interval, cutoff time, and per-vehicle margin for collision checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HorizonConfig {
    pub dt: f64,
    pub t_f: f64,
    pub margin: f64,
    /// Also check the initial state at `t = 0`. Off by default: rollouts
    /// start checking at `t = dt`.
    #[serde(default)]
    pub include_initial: bool,
}

impl HorizonConfig {
    pub fn new(dt: f64, t_f: f64, margin: f64) -> Result<Self> {
        if !(dt > 0.0 && dt <= t_f) || !(margin >= 0.0) || !t_f.is_finite() {
            return Err(Error::BadHorizon);
        }
        Ok(HorizonConfig {
            dt,
            t_f,
            margin,
            include_initial: false,
        })
    }

    pub fn with_include_initial(mut self, include: bool) -> Self {
        self.include_initial = include;
        self
    }

    /// Number of checked steps `t = dt, 2dt, ..., t_f`.
    pub fn steps(&self) -> usize {
        (self.t_f / self.dt).round().max(1.0) as usize
    }
}

/// Outcome of one alarm query.
#[derive(Debug, Clone, PartialEq)]
pub struct AlarmResult {
    /// Collision-probability estimate in `[0, 1]`; the expected-value alarm
    /// reports its overlap indicator as 0/1.
    pub estimate: Option<f64>,
    pub decision: bool,
    pub samples_used: usize,
    pub wall_time: f64,
}

fn check_inputs(belief: &JointBelief, horizon: &HorizonConfig) {
    let models = belief.models();
    assert!(
        (models.dt() - horizon.dt).abs() < 1e-12,
        "horizon dt {} must equal the model timestep {}",
        horizon.dt,
        models.dt()
    );
}

/// Sample one noisy trajectory and return true at the first footprint
/// overlap among `t = dt, ..., t_f` (plus `t = 0` when configured).
pub fn rollout_collides(
    initial: &DVector<f64>,
    models: &JointModel,
    horizon: &HorizonConfig,
    rng: &mut impl Rng,
) -> bool {
    rollout_first_collision(initial, models, horizon, rng).is_some()
}

/// As [`rollout_collides`], but reports the step index of the first overlap
/// (1-based; 0 means the initial state when `include_initial` is set).
pub fn rollout_first_collision(
    initial: &DVector<f64>,
    models: &JointModel,
    horizon: &HorizonConfig,
    rng: &mut impl Rng,
) -> Option<usize> {
    if horizon.include_initial && models.any_overlap(initial, horizon.margin) {
        return Some(0);
    }
    let mut state = initial.clone();
    for k in 1..=horizon.steps() {
        state = models.step_joint(&state, rng);
        if models.any_overlap(&state, horizon.margin) {
            return Some(k);
        }
    }
    None
}

/// Zero-noise variant used by the point-based alarms.
fn deterministic_rollout_collides(
    initial: &DVector<f64>,
    models: &JointModel,
    horizon: &HorizonConfig,
) -> bool {
    if horizon.include_initial && models.any_overlap(initial, horizon.margin) {
        return true;
    }
    let mut state = initial.clone();
    for _ in 1..=horizon.steps() {
        state = models.step_joint_deterministic(&state);
        if models.any_overlap(&state, horizon.margin) {
            return true;
        }
    }
    false
}

/// Monte Carlo sampling alarm: `estimate = colliding rollouts / n`,
/// `decision = count > n * c_cut` (strict, so a tie never fires).
pub fn mc_alarm(
    belief: &JointBelief,
    horizon: &HorizonConfig,
    n: usize,
    c_cut: f64,
    seed: u64,
) -> AlarmResult {
    assert!(n >= 1, "mc_alarm needs at least one sample");
    assert!((0.0..=1.0).contains(&c_cut), "c_cut must be a probability");
    check_inputs(belief, horizon);
    let start = Instant::now();
    let models = belief.models();
    let count: u64 = (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(seed, Domain::McSample, i);
            let x0 = belief.sample_initial(&mut rng);
            rollout_collides(&x0, models, horizon, &mut rng) as u64
        })
        .sum();
    AlarmResult {
        estimate: Some(count as f64 / n as f64),
        decision: count as f64 > n as f64 * c_cut,
        samples_used: n,
        wall_time: start.elapsed().as_secs_f64(),
    }
}

/// Point-based alarm that propagates only the belief mean with zero noise
/// and fires iff the mean footprints overlap at any checked time. Blind to
/// the belief variance by construction.
pub fn expected_value_alarm(belief: &JointBelief, horizon: &HorizonConfig) -> AlarmResult {
    check_inputs(belief, horizon);
    let start = Instant::now();
    let hit = deterministic_rollout_collides(belief.mean(), belief.models(), horizon);
    AlarmResult {
        estimate: Some(if hit { 1.0 } else { 0.0 }),
        decision: hit,
        samples_used: 1,
        wall_time: start.elapsed().as_secs_f64(),
    }
}

/// Point-based alarm that propagates the belief's sigma points through
/// zero-noise rollouts and averages the collision indicator with the sigma
/// weights. Negative center weights (spread `kappa < 0`) can push the raw
/// weighted sum outside `[0, 1]`; the estimate is clamped and a warning
/// logged.
///
/// The points cover only the initial-state uncertainty; an augmented-state
/// variant that also places sigma points over the per-step process noise
/// would capture rollout dispersion at the cost of a much larger point set,
/// and is left as an extension.
pub fn unscented_alarm(
    belief: &JointBelief,
    horizon: &HorizonConfig,
    kappa: f64,
    c_cut: f64,
) -> Result<AlarmResult> {
    assert!((0.0..=1.0).contains(&c_cut), "c_cut must be a probability");
    check_inputs(belief, horizon);
    let start = Instant::now();
    let models = belief.models();
    let points = belief.sigma_points(kappa)?;
    let raw: f64 = points
        .iter()
        .map(|(w, p)| {
            if deterministic_rollout_collides(p, models, horizon) {
                *w
            } else {
                0.0
            }
        })
        .sum();
    let estimate = raw.clamp(0.0, 1.0);
    if raw != estimate {
        log::warn!("unscented estimate {raw} outside [0,1] (negative sigma weights); clamped");
    }
    Ok(AlarmResult {
        estimate: Some(estimate),
        decision: estimate > c_cut,
        samples_used: points.len(),
        wall_time: start.elapsed().as_secs_f64(),
    })
}

/// Deterministic feature map for the regression alarm.
///
/// Ordering contract (all covariance entries follow the mean-derived block):
///
/// 1. Relative block:
///    * path + path: `[s2 - s1, v2 - v1]`
///    * bicycle + bicycle: vehicle 2's mean pose in vehicle 1's mean frame
///      `[rel_x, rel_y, rel_theta]`, then the relative velocity in that
///      frame `[v2 cos(rel_theta) - v1, v2 sin(rel_theta)]`
///    * mixed: footprint pose of vehicle 2 in vehicle 1's footprint frame
///      `[rel_x, rel_y, rel_theta]`
/// 2. Remaining mean components (absolute positions dropped for the
///    homogeneous pairs, which makes the whole map translation invariant):
///    * path + path: `[s1, v1, s2, v2]`
///    * bicycle + bicycle: `[theta1, v1, a1, omega1, v2, a2, omega2]`
///    * mixed: the full joint mean
/// 3. Upper triangle of the covariance, row-major, diagonal included.
///
/// Which inputs the regression alarm sees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FeatureSet {
    /// Raw belief moments (default): keeps the pipeline model-agnostic.
    #[default]
    Raw,
    /// Raw moments plus three hand-crafted criticality surrogates computed
    /// from the mean: footprint center distance, its closing rate over one
    /// deterministic step, and the capped distance/closing-rate quotient (a
    /// time-to-collision proxy).
    TtcSurrogate,
}

/// Path + path yields 6 + 10 = 16 features; bicycle + bicycle yields
/// 12 + 78 = 90. [`FeatureSet::TtcSurrogate`] appends 3 more.
pub fn extract_features(belief: &JointBelief) -> DVector<f64> {
    extract_features_with(belief, FeatureSet::Raw)
}

/// [`extract_features`] with an explicit feature-set choice.
pub fn extract_features_with(belief: &JointBelief, set: FeatureSet) -> DVector<f64> {
    let mut features = raw_features(belief);
    if set == FeatureSet::TtcSurrogate {
        let models = belief.models();
        let center_distance = |joint: &DVector<f64>| {
            let rects = models.footprints(joint, 0.0);
            (rects[0].center.x - rects[1].center.x).hypot(rects[0].center.y - rects[1].center.y)
        };
        let d0 = center_distance(belief.mean());
        let d1 = center_distance(&models.step_joint_deterministic(belief.mean()));
        let closing = (d0 - d1) / models.dt();
        const TTC_CAP: f64 = 10.0;
        let ttc = if closing > 1e-9 {
            (d0 / closing).min(TTC_CAP)
        } else {
            TTC_CAP
        };
        let n = features.len();
        features = features.insert_rows(n, 3, 0.0);
        features[n] = d0;
        features[n + 1] = closing;
        features[n + 2] = ttc;
    }
    features
}

fn raw_features(belief: &JointBelief) -> DVector<f64> {
    let mean = belief.mean();
    let models = belief.models();
    let kinds: Vec<&ModelKind> = models.vehicles().iter().map(|v| &v.kind).collect();
    let mut out: Vec<f64> = Vec::new();
    match (kinds[0], kinds[1]) {
        (ModelKind::Path(_), ModelKind::Path(_)) => {
            let (s1, v1, s2, v2) = (mean[0], mean[1], mean[2], mean[3]);
            out.extend([s2 - s1, v2 - v1, s1, v1, s2, v2]);
        }
        (ModelKind::Bicycle, ModelKind::Bicycle) => {
            let (x1, y1, t1, v1, a1, w1) = (mean[0], mean[1], mean[2], mean[3], mean[4], mean[5]);
            let (x2, y2, t2, v2, a2, w2) =
                (mean[6], mean[7], mean[8], mean[9], mean[10], mean[11]);
            let (c, s) = (t1.cos(), t1.sin());
            let (dx, dy) = (x2 - x1, y2 - y1);
            let rel_x = c * dx + s * dy;
            let rel_y = -s * dx + c * dy;
            let rel_t = normalize_angle(t2 - t1);
            out.extend([
                rel_x,
                rel_y,
                rel_t,
                v2 * rel_t.cos() - v1,
                v2 * rel_t.sin(),
                t1,
                v1,
                a1,
                w1,
                v2,
                a2,
                w2,
            ]);
        }
        _ => {
            let states = models.split(mean);
            let rects: Vec<_> = states
                .iter()
                .zip(models.vehicles())
                .map(|(st, m)| crate::dynamics::footprint(st, m))
                .collect();
            let p1 = rects[0].center;
            let p2 = rects[1].center;
            let (c, s) = (p1.theta.cos(), p1.theta.sin());
            let (dx, dy) = (p2.x - p1.x, p2.y - p1.y);
            out.extend([
                c * dx + s * dy,
                -s * dx + c * dy,
                normalize_angle(p2.theta - p1.theta),
            ]);
            out.extend(mean.iter());
        }
    }
    let cov = belief.cov();
    for i in 0..cov.nrows() {
        for j in i..cov.ncols() {
            out.push(cov[(i, j)]);
        }
    }
    DVector::from_vec(out)
}

/// Learned alarm: clamped network output on the model's feature set
/// ([`extract_features`] for the default raw models), fired on strict
/// `estimate > c_cut`.
pub fn regression_alarm(
    model: &RegressionModel,
    belief: &JointBelief,
    c_cut: f64,
) -> AlarmResult {
    assert!((0.0..=1.0).contains(&c_cut), "c_cut must be a probability");
    let start = Instant::now();
    let estimate = model.predict(&extract_features_with(belief, model.feature_set()));
    AlarmResult {
        estimate: Some(estimate),
        decision: estimate > c_cut,
        samples_used: 1,
        wall_time: start.elapsed().as_secs_f64(),
    }
}

/// Output of [`train_regression`].
#[derive(Debug)]
pub struct TrainReport {
    pub model: RegressionModel,
    /// RMSE against the oracle labels of a held-out set generated after the
    /// training range (10% of the training size, at least one).
    pub holdout_rmse: f64,
    pub holdout_size: usize,
    pub epochs: usize,
    pub train_rmse: f64,
}

/// Fit a regression alarm on oracle-labeled scenarios with the default raw
/// feature set.
///
/// `belief_gen(i)` must deterministically produce the i-th training belief;
/// labels come from a Monte Carlo estimate with `oracle_samples` rollouts on
/// an independent stream. Indices `0..train_size` train the network, the
/// following 10% are held out for the reported RMSE.
pub fn train_regression<G>(
    belief_gen: G,
    horizon: &HorizonConfig,
    oracle_samples: usize,
    train_size: usize,
    width: usize,
    cfg: &TrainConfig,
    seed: u64,
) -> Result<TrainReport>
where
    G: Fn(u64) -> JointBelief + Sync,
{
    train_regression_with(
        belief_gen,
        horizon,
        oracle_samples,
        train_size,
        width,
        cfg,
        seed,
        FeatureSet::Raw,
    )
}

/// [`train_regression`] with an explicit feature-set choice; the returned
/// model is tagged so [`regression_alarm`] queries it consistently.
#[allow(clippy::too_many_arguments)]
pub fn train_regression_with<G>(
    belief_gen: G,
    horizon: &HorizonConfig,
    oracle_samples: usize,
    train_size: usize,
    width: usize,
    cfg: &TrainConfig,
    seed: u64,
    features: FeatureSet,
) -> Result<TrainReport>
where
    G: Fn(u64) -> JointBelief + Sync,
{
    if train_size == 0 {
        return Err(Error::BadTrainingSet("training size is zero".into()));
    }
    assert!(oracle_samples >= 1);
    let holdout_size = (train_size / 10).max(1);
    let total = train_size + holdout_size;
    let data: Vec<(DVector<f64>, f64)> = (0..total as u64)
        .into_par_iter()
        .map(|i| {
            let belief = belief_gen(i);
            let label_seed = crate::rng::derive_seed(seed, Domain::TrainingLabels, i);
            let label = mc_alarm(&belief, horizon, oracle_samples, 0.5, label_seed)
                .estimate
                .expect("mc alarm always estimates");
            (extract_features_with(&belief, features), label)
        })
        .collect();

    let train_features: Vec<DVector<f64>> =
        data[..train_size].iter().map(|(f, _)| f.clone()).collect();
    let labels: Vec<f64> = data[..train_size].iter().map(|(_, y)| *y).collect();
    let (model, stats) = mlp::fit(&train_features, &labels, width, cfg, seed)?;
    let model = model.with_feature_set(features);

    let sq_sum: f64 = data[train_size..]
        .iter()
        .map(|(f, y)| (model.predict(f) - y).powi(2))
        .sum();
    Ok(TrainReport {
        model,
        holdout_rmse: (sq_sum / holdout_size as f64).sqrt(),
        holdout_size,
        epochs: stats.epochs,
        train_rmse: stats.train_rmse,
    })
}

/// Time-to-collision from one shared Monte Carlo sample set: the smallest
/// cutoff `t_f = k * dt` at which the fraction of rollouts whose first
/// collision happens by `t_f` strictly exceeds `c_cut`; `None` if the
/// fraction never crosses within `max_horizon`.
pub fn estimate_ttc(
    belief: &JointBelief,
    dt: f64,
    max_horizon: f64,
    n: usize,
    c_cut: f64,
    seed: u64,
) -> Option<f64> {
    assert!(n >= 1);
    assert!((0.0..=1.0).contains(&c_cut), "c_cut must be a probability");
    let horizon = HorizonConfig::new(dt, max_horizon, 0.0).expect("valid ttc horizon");
    check_inputs(belief, &horizon);
    let models = belief.models();
    let steps = horizon.steps();
    let firsts: Vec<Option<usize>> = (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(seed, Domain::Ttc, i);
            let x0 = belief.sample_initial(&mut rng);
            rollout_first_collision(&x0, models, &horizon, &mut rng)
        })
        .collect();
    let mut per_step = vec![0u64; steps + 1];
    for f in firsts.into_iter().flatten() {
        per_step[f] += 1;
    }
    let mut cumulative = 0u64;
    let threshold = n as f64 * c_cut;
    for (k, count) in per_step.iter().enumerate() {
        cumulative += count;
        if k >= 1 && cumulative as f64 > threshold {
            return Some(k as f64 * dt);
        }
    }
    None
}

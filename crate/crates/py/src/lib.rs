//! Python bindings for the collision-alarms crate: footprint geometry, the
//! closed-form bound functions, scenario simulation, and every alarm.
//!
//! Build the extension module with `cargo build --release -p
//! collision-alarms-python`; the smoke test under `python/` copies the
//! resulting cdylib next to itself as `collision_alarms_py.so`.

use std::path::PathBuf;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use collision_alarms::alarms;
use collision_alarms::bounds;
use collision_alarms::bounds::CostConfig;
use collision_alarms::dynamics::JointBelief;
use collision_alarms::geometry;
use collision_alarms::mlp;
use collision_alarms::scenarios::{ScenarioConfig, ScenarioGenerator, ScenarioKind};

fn pyerr(e: collision_alarms::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn costs(r_fn: f64, r_fp: f64) -> PyResult<CostConfig> {
    CostConfig::new(r_fn, r_fp).map_err(pyerr)
}

fn horizon(dt: f64, t_f: f64, margin: f64) -> PyResult<alarms::HorizonConfig> {
    alarms::HorizonConfig::new(dt, t_f, margin).map_err(pyerr)
}

/// Planar pose (x, y, heading).
#[pyclass(name = "Pose", skip_from_py_object)]
#[derive(Clone)]
struct PyPose {
    inner: geometry::Pose,
}

#[pymethods]
impl PyPose {
    #[new]
    fn new(x: f64, y: f64, theta: f64) -> Self {
        PyPose {
            inner: geometry::Pose::new(x, y, theta),
        }
    }

    #[getter]
    fn x(&self) -> f64 {
        self.inner.x
    }

    #[getter]
    fn y(&self) -> f64 {
        self.inner.y
    }

    #[getter]
    fn theta(&self) -> f64 {
        self.inner.theta
    }

    fn __repr__(&self) -> String {
        format!(
            "Pose(x={}, y={}, theta={})",
            self.inner.x, self.inner.y, self.inner.theta
        )
    }
}

/// Oriented rectangle footprint.
#[pyclass(name = "OrientedRect", skip_from_py_object)]
#[derive(Clone)]
struct PyRect {
    inner: geometry::OrientedRect,
}

#[pymethods]
impl PyRect {
    #[new]
    fn new(x: f64, y: f64, theta: f64, length: f64, width: f64) -> PyResult<Self> {
        Ok(PyRect {
            inner: geometry::OrientedRect::new(geometry::Pose::new(x, y, theta), length, width)
                .map_err(pyerr)?,
        })
    }

    #[getter]
    fn center(&self) -> PyPose {
        PyPose {
            inner: self.inner.center,
        }
    }

    #[getter]
    fn length(&self) -> f64 {
        self.inner.length
    }

    #[getter]
    fn width(&self) -> f64 {
        self.inner.width
    }

    fn corners(&self) -> Vec<(f64, f64)> {
        self.inner.corners().to_vec()
    }

    /// Rectangle grown by `margin` on every side.
    fn inflate(&self, margin: f64) -> PyResult<PyRect> {
        Ok(PyRect {
            inner: geometry::inflate(&self.inner, margin).map_err(pyerr)?,
        })
    }
}

/// True iff the closed rectangles intersect (touching counts).
#[pyfunction]
fn rect_overlap(a: &PyRect, b: &PyRect) -> bool {
    geometry::rect_overlap(&a.inner, &b.inner)
}

// --- closed-form bound functions ---------------------------------------------

/// Optimal alarm cutoff r_fp / (r_fn + r_fp).
#[pyfunction]
fn optimal_cutoff(r_fn: f64, r_fp: f64) -> PyResult<f64> {
    Ok(bounds::optimal_cutoff(&costs(r_fn, r_fp)?))
}

/// Worst-case expected cost of the optimal alarm.
#[pyfunction]
fn optimal_ec_ceiling(r_fn: f64, r_fp: f64) -> PyResult<f64> {
    Ok(bounds::optimal_ec_ceiling(&costs(r_fn, r_fp)?))
}

/// Two-sided concentration bound 2 exp(-n eps^2 / 2), capped at one.
#[pyfunction]
fn hoeffding_p_eps(n: usize, eps: f64) -> f64 {
    bounds::hoeffding_p_eps(n, eps)
}

/// EAC bound max(eps, p_eps) * (r_fn + r_fp).
#[pyfunction]
fn eac_bound(eps: f64, p_eps: f64, r_fn: f64, r_fp: f64) -> PyResult<f64> {
    Ok(bounds::eac_bound(eps, p_eps, &costs(r_fn, r_fp)?))
}

/// Tightest EAC bound for an n-sample Monte Carlo alarm.
#[pyfunction]
fn mc_eac_bound(n: usize, r_fn: f64, r_fp: f64) -> PyResult<f64> {
    Ok(bounds::mc_eac_bound(n, &costs(r_fn, r_fp)?))
}

/// EAC bound (r_fn + r_fp) * rmse for a regression alarm.
#[pyfunction]
fn rmse_eac_bound(rmse: f64, r_fn: f64, r_fp: f64) -> PyResult<f64> {
    Ok(bounds::rmse_eac_bound(rmse, &costs(r_fn, r_fp)?))
}

// --- beliefs, scenarios, alarms ------------------------------------------------

/// Gaussian belief over the joint two-vehicle state, bound to its motion
/// models. Created by [`Simulator`].
#[pyclass(name = "Belief", skip_from_py_object)]
#[derive(Clone)]
struct PyBelief {
    inner: JointBelief,
}

#[pymethods]
impl PyBelief {
    #[getter]
    fn mean(&self) -> Vec<f64> {
        self.inner.mean().iter().copied().collect()
    }

    #[getter]
    fn cov(&self) -> Vec<Vec<f64>> {
        let c = self.inner.cov();
        (0..c.nrows())
            .map(|i| (0..c.ncols()).map(|j| c[(i, j)]).collect())
            .collect()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    /// Regression feature vector (relative block, remaining means,
    /// covariance upper triangle).
    fn features(&self) -> Vec<f64> {
        alarms::extract_features(&self.inner).iter().copied().collect()
    }
}

/// One generated episode.
#[pyclass(name = "Scenario")]
struct PyScenario {
    #[pyo3(get)]
    index: u64,
    belief: PyBelief,
    #[pyo3(get)]
    collided: bool,
    #[pyo3(get)]
    first_collision_time: Option<f64>,
}

#[pymethods]
impl PyScenario {
    #[getter]
    fn belief(&self) -> PyBelief {
        self.belief.clone()
    }
}

/// Alarm outcome: probability estimate, decision, sample count, wall time.
#[pyclass(name = "AlarmResult")]
struct PyAlarmResult {
    #[pyo3(get)]
    estimate: Option<f64>,
    #[pyo3(get)]
    decision: bool,
    #[pyo3(get)]
    samples_used: usize,
    #[pyo3(get)]
    wall_time: f64,
}

impl From<alarms::AlarmResult> for PyAlarmResult {
    fn from(r: alarms::AlarmResult) -> Self {
        PyAlarmResult {
            estimate: r.estimate,
            decision: r.decision,
            samples_used: r.samples_used,
            wall_time: r.wall_time,
        }
    }
}

/// Episode factory for one scenario family ("left-turn" or "bicycle").
#[pyclass(name = "Simulator")]
struct PySimulator {
    generator: ScenarioGenerator,
}

#[pymethods]
impl PySimulator {
    #[new]
    #[pyo3(signature = (kind, seed = 0, t_f = 1.0, dt = 0.1))]
    fn new(kind: &str, seed: u64, t_f: f64, dt: f64) -> PyResult<Self> {
        let mut config = match kind {
            "left-turn" => ScenarioConfig::left_turn(seed),
            "bicycle" => ScenarioConfig::bicycle(seed),
            other => {
                return Err(PyValueError::new_err(format!(
                    "unknown scenario kind {other:?} (expected \"left-turn\" or \"bicycle\")"
                )))
            }
        };
        config.t_f = t_f;
        config.dt = dt;
        Ok(PySimulator {
            generator: ScenarioGenerator::new(config).map_err(pyerr)?,
        })
    }

    #[getter]
    fn kind(&self) -> &'static str {
        match self.generator.config().kind {
            ScenarioKind::LeftTurn => "left-turn",
            ScenarioKind::Bicycle => "bicycle",
        }
    }

    /// Generate episode `index` (deterministic in config and index).
    fn generate(&self, index: u64) -> PyScenario {
        let s = self.generator.generate(index);
        PyScenario {
            index: s.index,
            belief: PyBelief { inner: s.belief },
            collided: s.collided,
            first_collision_time: s.first_collision_time,
        }
    }

    /// Fraction of colliding episodes among indices `0..n`.
    fn collision_rate(&self, n: usize) -> f64 {
        let batch = self.generator.generate_batch(n);
        batch.iter().filter(|s| s.collided).count() as f64 / n.max(1) as f64
    }

    /// Build a belief over this simulator's joint state from raw moments.
    fn belief(&self, mean: Vec<f64>, cov: Vec<Vec<f64>>) -> PyResult<PyBelief> {
        let dim = mean.len();
        if cov.len() != dim || cov.iter().any(|row| row.len() != dim) {
            return Err(PyValueError::new_err("covariance shape must match mean"));
        }
        let cov = DMatrix::from_fn(dim, dim, |i, j| cov[i][j]);
        let inner = JointBelief::new(
            DVector::from_vec(mean),
            cov,
            Arc::clone(self.generator.models()),
        )
        .map_err(pyerr)?;
        Ok(PyBelief { inner })
    }
}

/// Monte Carlo sampling alarm (n rollouts, early exit on first overlap).
#[pyfunction]
#[pyo3(signature = (belief, n, c_cut, seed, t_f = 1.0, dt = 0.1, margin = 0.0))]
fn mc_alarm(
    belief: &PyBelief,
    n: usize,
    c_cut: f64,
    seed: u64,
    t_f: f64,
    dt: f64,
    margin: f64,
) -> PyResult<PyAlarmResult> {
    let h = horizon(dt, t_f, margin)?;
    Ok(alarms::mc_alarm(&belief.inner, &h, n, c_cut, seed).into())
}

/// Point-based alarm on the propagated belief mean.
#[pyfunction]
#[pyo3(signature = (belief, t_f = 1.0, dt = 0.1, margin = 0.0))]
fn expected_value_alarm(belief: &PyBelief, t_f: f64, dt: f64, margin: f64) -> PyResult<PyAlarmResult> {
    let h = horizon(dt, t_f, margin)?;
    Ok(alarms::expected_value_alarm(&belief.inner, &h).into())
}

/// Sigma-point alarm with spread parameter `kappa`.
#[pyfunction]
#[pyo3(signature = (belief, c_cut, kappa = 0.0, t_f = 1.0, dt = 0.1, margin = 0.0))]
fn unscented_alarm(
    belief: &PyBelief,
    c_cut: f64,
    kappa: f64,
    t_f: f64,
    dt: f64,
    margin: f64,
) -> PyResult<PyAlarmResult> {
    let h = horizon(dt, t_f, margin)?;
    Ok(alarms::unscented_alarm(&belief.inner, &h, kappa, c_cut)
        .map_err(pyerr)?
        .into())
}

/// Smallest cutoff time at which the collision-probability alarm fires, or
/// None within `max_horizon`.
#[pyfunction]
#[pyo3(signature = (belief, c_cut, seed, dt = 0.1, max_horizon = 3.0, n = 10_000))]
fn estimate_ttc(
    belief: &PyBelief,
    c_cut: f64,
    seed: u64,
    dt: f64,
    max_horizon: f64,
    n: usize,
) -> Option<f64> {
    alarms::estimate_ttc(&belief.inner, dt, max_horizon, n, c_cut, seed)
}

/// Trained regression alarm.
#[pyclass(name = "RegressionModel")]
struct PyRegressionModel {
    inner: mlp::RegressionModel,
}

#[pymethods]
impl PyRegressionModel {
    /// Load a versioned JSON weight file.
    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        Ok(PyRegressionModel {
            inner: mlp::RegressionModel::load_json(&path).map_err(pyerr)?,
        })
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        self.inner.save_json(&path).map_err(pyerr)
    }

    #[getter]
    fn input_dim(&self) -> usize {
        self.inner.input_dim()
    }

    #[getter]
    fn hidden_width(&self) -> usize {
        self.inner.hidden_width()
    }

    /// Clamped collision-probability prediction for a belief.
    fn predict(&self, belief: &PyBelief) -> f64 {
        self.inner.predict(&alarms::extract_features(&belief.inner))
    }

    /// Alarm decision `predict(belief) > c_cut`.
    fn alarm(&self, belief: &PyBelief, c_cut: f64) -> PyAlarmResult {
        alarms::regression_alarm(&self.inner, &belief.inner, c_cut).into()
    }
}

/// Fit the regression alarm on oracle-labeled episodes from a simulator.
/// Returns the model and its held-out RMSE.
#[pyfunction]
#[pyo3(signature = (sim, train_size, width = 150, oracle_samples = 1000, seed = 0, t_f = 1.0, dt = 0.1, margin = 0.0))]
#[allow(clippy::too_many_arguments)]
fn train_regression(
    sim: &PySimulator,
    train_size: usize,
    width: usize,
    oracle_samples: usize,
    seed: u64,
    t_f: f64,
    dt: f64,
    margin: f64,
) -> PyResult<(PyRegressionModel, f64)> {
    let h = horizon(dt, t_f, margin)?;
    let report = alarms::train_regression(
        sim.generator.belief_generator(),
        &h,
        oracle_samples,
        train_size,
        width,
        &mlp::TrainConfig::default(),
        seed,
    )
    .map_err(pyerr)?;
    Ok((
        PyRegressionModel {
            inner: report.model,
        },
        report.holdout_rmse,
    ))
}

#[pymodule]
fn collision_alarms_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPose>()?;
    m.add_class::<PyRect>()?;
    m.add_class::<PyBelief>()?;
    m.add_class::<PyScenario>()?;
    m.add_class::<PyAlarmResult>()?;
    m.add_class::<PySimulator>()?;
    m.add_class::<PyRegressionModel>()?;
    m.add_function(wrap_pyfunction!(rect_overlap, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_cutoff, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_ec_ceiling, m)?)?;
    m.add_function(wrap_pyfunction!(hoeffding_p_eps, m)?)?;
    m.add_function(wrap_pyfunction!(eac_bound, m)?)?;
    m.add_function(wrap_pyfunction!(mc_eac_bound, m)?)?;
    m.add_function(wrap_pyfunction!(rmse_eac_bound, m)?)?;
    m.add_function(wrap_pyfunction!(mc_alarm, m)?)?;
    m.add_function(wrap_pyfunction!(expected_value_alarm, m)?)?;
    m.add_function(wrap_pyfunction!(unscented_alarm, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_ttc, m)?)?;
    m.add_function(wrap_pyfunction!(train_regression, m)?)?;
    Ok(())
}

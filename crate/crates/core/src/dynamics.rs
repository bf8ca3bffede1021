//! Vehicle motion models, Gaussian joint beliefs, sampling, and sigma points.
//!
//! Two model families are supported: a path-constrained nearly-constant
//! velocity model (state `[s, v]` along a [`PathCurve`]) and a planar
//! kinematic bicycle model (state `[x, y, theta, v, a, omega]`). The joint
//! state of an encounter concatenates the per-vehicle states; a
//! [`JointBelief`] is a Gaussian over that concatenation.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::curve::PathCurve;
use crate::error::{Error, Result};
use crate::geometry::{OrientedRect, Pose};

pub const PATH_STATE_DIM: usize = 2;
pub const BICYCLE_STATE_DIM: usize = 6;

/// Arc length along a fixed path and speed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathState {
    pub s: f64,
    pub v: f64,
}

/// Planar kinematic bicycle state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BicycleState {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
    pub v: f64,
    pub a: f64,
    pub omega: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VehicleState {
    Path(PathState),
    Bicycle(BicycleState),
}

impl VehicleState {
    pub fn dim(&self) -> usize {
        match self {
            VehicleState::Path(_) => PATH_STATE_DIM,
            VehicleState::Bicycle(_) => BICYCLE_STATE_DIM,
        }
    }

    pub fn write_to(&self, out: &mut [f64]) {
        match *self {
            VehicleState::Path(p) => {
                out[0] = p.s;
                out[1] = p.v;
            }
            VehicleState::Bicycle(b) => {
                out[0] = b.x;
                out[1] = b.y;
                out[2] = b.theta;
                out[3] = b.v;
                out[4] = b.a;
                out[5] = b.omega;
            }
        }
    }
}

/// Deterministic transition family for one vehicle.
#[derive(Debug, Clone)]
pub enum ModelKind {
    /// Nearly-constant velocity motion along a fixed curve.
    Path(Arc<PathCurve>),
    /// Euler-integrated kinematic bicycle in free space.
    Bicycle,
}

/// One vehicle's motion model: transition kind, per-step process noise,
/// timestep, and footprint dimensions.
#[derive(Debug, Clone)]
pub struct VehicleModel {
    pub kind: ModelKind,
    pub dt: f64,
    q: DMatrix<f64>,
    noise_factor: DMatrix<f64>,
    pub length: f64,
    pub width: f64,
    /// Internal Euler substeps per `dt` for the bicycle transition (the
    /// path transition is exact and ignores this). Noise is still injected
    /// once per full step.
    substeps: usize,
}

impl VehicleModel {
    pub fn new(kind: ModelKind, dt: f64, q: DMatrix<f64>, length: f64, width: f64) -> Result<Self> {
        let dim = match kind {
            ModelKind::Path(_) => PATH_STATE_DIM,
            ModelKind::Bicycle => BICYCLE_STATE_DIM,
        };
        if q.nrows() != dim || q.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: q.nrows(),
            });
        }
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::InvalidConfig(format!("timestep must be positive, got {dt}")));
        }
        if !(length > 0.0 && width > 0.0) {
            return Err(Error::BadRectDimensions { length, width });
        }
        let noise_factor = psd_cholesky(&q)?;
        Ok(VehicleModel {
            kind,
            dt,
            q,
            noise_factor,
            length,
            width,
            substeps: 1,
        })
    }

    /// Refine the bicycle Euler integration with `n` substeps per `dt`.
    pub fn with_substeps(mut self, n: usize) -> Self {
        self.substeps = n.max(1);
        self
    }

    /// Path model with independent per-step noise stds on `[s, v]`.
    pub fn path(curve: Arc<PathCurve>, dt: f64, noise_std: [f64; 2], length: f64, width: f64) -> Result<Self> {
        let q = DMatrix::from_diagonal(&DVector::from_iterator(
            2,
            noise_std.iter().map(|s| s * s),
        ));
        VehicleModel::new(ModelKind::Path(curve), dt, q, length, width)
    }

    /// Bicycle model with independent per-step noise stds on
    /// `[x, y, theta, v, a, omega]`.
    pub fn bicycle(dt: f64, noise_std: [f64; 6], length: f64, width: f64) -> Result<Self> {
        let q = DMatrix::from_diagonal(&DVector::from_iterator(
            6,
            noise_std.iter().map(|s| s * s),
        ));
        VehicleModel::new(ModelKind::Bicycle, dt, q, length, width)
    }

    pub fn state_dim(&self) -> usize {
        match self.kind {
            ModelKind::Path(_) => PATH_STATE_DIM,
            ModelKind::Bicycle => BICYCLE_STATE_DIM,
        }
    }

    pub fn process_noise(&self) -> &DMatrix<f64> {
        &self.q
    }

    /// Draw one additive process-noise vector.
    pub fn sample_noise(&self, rng: &mut impl Rng) -> DVector<f64> {
        let dim = self.state_dim();
        let z = DVector::from_iterator(dim, (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)));
        &self.noise_factor * z
    }

    fn state_from(&self, slice: &[f64]) -> VehicleState {
        match self.kind {
            ModelKind::Path(_) => VehicleState::Path(PathState {
                s: slice[0],
                v: slice[1],
            }),
            ModelKind::Bicycle => VehicleState::Bicycle(BicycleState {
                x: slice[0],
                y: slice[1],
                theta: slice[2],
                v: slice[3],
                a: slice[4],
                omega: slice[5],
            }),
        }
    }
}

/// Apply the deterministic transition, then add `noise`.
///
/// Path model: `s <- s + v dt`, `v <- v`. Bicycle model: Euler step where the
/// position advances along the current heading before heading and speed are
/// updated.
pub fn step(state: &VehicleState, model: &VehicleModel, noise: &DVector<f64>) -> VehicleState {
    debug_assert_eq!(noise.len(), state.dim());
    let dt = model.dt;
    match *state {
        VehicleState::Path(p) => VehicleState::Path(PathState {
            s: p.s + p.v * dt + noise[0],
            v: p.v + noise[1],
        }),
        VehicleState::Bicycle(b) => {
            let h = dt / model.substeps as f64;
            let mut b = b;
            for _ in 0..model.substeps {
                b = BicycleState {
                    x: b.x + b.v * b.theta.cos() * h,
                    y: b.y + b.v * b.theta.sin() * h,
                    theta: b.theta + b.omega * h,
                    v: b.v + b.a * h,
                    a: b.a,
                    omega: b.omega,
                };
            }
            VehicleState::Bicycle(BicycleState {
                x: b.x + noise[0],
                y: b.y + noise[1],
                theta: b.theta + noise[2],
                v: b.v + noise[3],
                a: b.a + noise[4],
                omega: b.omega + noise[5],
            })
        }
    }
}

/// Invert the deterministic transition, then add fresh `noise`.
/// `step_backward(step(x, 0), 0) == x` exactly.
pub fn step_backward(state: &VehicleState, model: &VehicleModel, noise: &DVector<f64>) -> VehicleState {
    debug_assert_eq!(noise.len(), state.dim());
    let dt = model.dt;
    match *state {
        VehicleState::Path(p) => VehicleState::Path(PathState {
            s: p.s - p.v * dt + noise[0],
            v: p.v + noise[1],
        }),
        VehicleState::Bicycle(b) => {
            let h = dt / model.substeps as f64;
            let mut b = b;
            for _ in 0..model.substeps {
                let v0 = b.v - b.a * h;
                let theta0 = b.theta - b.omega * h;
                b = BicycleState {
                    x: b.x - v0 * theta0.cos() * h,
                    y: b.y - v0 * theta0.sin() * h,
                    theta: theta0,
                    v: v0,
                    a: b.a,
                    omega: b.omega,
                };
            }
            VehicleState::Bicycle(BicycleState {
                x: b.x + noise[0],
                y: b.y + noise[1],
                theta: b.theta + noise[2],
                v: b.v + noise[3],
                a: b.a + noise[4],
                omega: b.omega + noise[5],
            })
        }
    }
}

/// Vehicle footprint at a state: the path model maps `s` through its curve,
/// the bicycle model uses `(x, y, theta)` directly.
pub fn footprint(state: &VehicleState, model: &VehicleModel) -> OrientedRect {
    let pose = match (state, &model.kind) {
        (VehicleState::Path(p), ModelKind::Path(curve)) => curve.pose_at(p.s),
        (VehicleState::Bicycle(b), ModelKind::Bicycle) => Pose::new(b.x, b.y, b.theta),
        _ => panic!("state kind does not match model kind"),
    };
    OrientedRect::new(pose, model.length, model.width).expect("model dims validated")
}

/// The models of every vehicle in an encounter, in joint-state order.
#[derive(Debug, Clone)]
pub struct JointModel {
    vehicles: Vec<VehicleModel>,
    offsets: Vec<usize>,
    dim: usize,
}

impl JointModel {
    pub fn new(vehicles: Vec<VehicleModel>) -> Result<Self> {
        if vehicles.len() < 2 {
            return Err(Error::InvalidConfig(
                "a joint model needs at least two vehicles".into(),
            ));
        }
        let dt = vehicles[0].dt;
        if vehicles.iter().any(|v| (v.dt - dt).abs() > 1e-12) {
            return Err(Error::InvalidConfig(
                "all vehicles must share the same timestep".into(),
            ));
        }
        let mut offsets = Vec::with_capacity(vehicles.len());
        let mut dim = 0;
        for v in &vehicles {
            offsets.push(dim);
            dim += v.state_dim();
        }
        Ok(JointModel {
            vehicles,
            offsets,
            dim,
        })
    }

    pub fn vehicles(&self) -> &[VehicleModel] {
        &self.vehicles
    }

    pub fn state_dim(&self) -> usize {
        self.dim
    }

    pub fn dt(&self) -> f64 {
        self.vehicles[0].dt
    }

    /// Per-vehicle states packed in the joint vector.
    pub fn split(&self, joint: &DVector<f64>) -> Vec<VehicleState> {
        debug_assert_eq!(joint.len(), self.dim);
        self.vehicles
            .iter()
            .zip(&self.offsets)
            .map(|(m, &off)| m.state_from(&joint.as_slice()[off..off + m.state_dim()]))
            .collect()
    }

    pub fn merge(&self, states: &[VehicleState]) -> DVector<f64> {
        debug_assert_eq!(states.len(), self.vehicles.len());
        let mut out = DVector::zeros(self.dim);
        for (st, &off) in states.iter().zip(&self.offsets) {
            st.write_to(&mut out.as_mut_slice()[off..off + st.dim()]);
        }
        out
    }

    fn transition(
        &self,
        joint: &DVector<f64>,
        mut noise_for: impl FnMut(&VehicleModel) -> DVector<f64>,
        backward: bool,
    ) -> DVector<f64> {
        let mut out = DVector::zeros(self.dim);
        for (m, &off) in self.vehicles.iter().zip(&self.offsets) {
            let state = m.state_from(&joint.as_slice()[off..off + m.state_dim()]);
            let noise = noise_for(m);
            let next = if backward {
                step_backward(&state, m, &noise)
            } else {
                step(&state, m, &noise)
            };
            next.write_to(&mut out.as_mut_slice()[off..off + m.state_dim()]);
        }
        out
    }

    /// One forward step with fresh process noise for every vehicle.
    pub fn step_joint(&self, joint: &DVector<f64>, rng: &mut impl Rng) -> DVector<f64> {
        self.transition(joint, |m| m.sample_noise(rng), false)
    }

    /// One deterministic (zero-noise) forward step.
    pub fn step_joint_deterministic(&self, joint: &DVector<f64>) -> DVector<f64> {
        self.transition(joint, |m| DVector::zeros(m.state_dim()), false)
    }

    /// One backward step with fresh process noise for every vehicle.
    pub fn step_backward_joint(&self, joint: &DVector<f64>, rng: &mut impl Rng) -> DVector<f64> {
        self.transition(joint, |m| m.sample_noise(rng), true)
    }

    /// Footprints of every vehicle, each inflated by `margin`.
    pub fn footprints(&self, joint: &DVector<f64>, margin: f64) -> Vec<OrientedRect> {
        self.split(joint)
            .iter()
            .zip(&self.vehicles)
            .map(|(st, m)| {
                let rect = footprint(st, m);
                if margin > 0.0 {
                    crate::geometry::inflate(&rect, margin).expect("margin validated upstream")
                } else {
                    rect
                }
            })
            .collect()
    }

    /// True iff any pair of (margin-inflated) footprints overlaps.
    pub fn any_overlap(&self, joint: &DVector<f64>, margin: f64) -> bool {
        let rects = self.footprints(joint, margin);
        for i in 0..rects.len() {
            for j in i + 1..rects.len() {
                if crate::geometry::rect_overlap(&rects[i], &rects[j]) {
                    return true;
                }
            }
        }
        false
    }
}

/// Gaussian belief over the concatenated two-vehicle state.
#[derive(Debug, Clone)]
pub struct JointBelief {
    mean: DVector<f64>,
    cov: DMatrix<f64>,
    factor: DMatrix<f64>,
    models: Arc<JointModel>,
}

impl JointBelief {
    pub fn new(mean: DVector<f64>, cov: DMatrix<f64>, models: Arc<JointModel>) -> Result<Self> {
        if mean.len() != models.state_dim() {
            return Err(Error::DimensionMismatch {
                expected: models.state_dim(),
                actual: mean.len(),
            });
        }
        if cov.nrows() != mean.len() || cov.ncols() != mean.len() {
            return Err(Error::DimensionMismatch {
                expected: mean.len(),
                actual: cov.nrows(),
            });
        }
        let factor = psd_cholesky(&cov)?;
        Ok(JointBelief {
            mean,
            cov,
            factor,
            models,
        })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    pub fn models(&self) -> &Arc<JointModel> {
        &self.models
    }

    /// Multivariate Gaussian draw via the cached semidefinite Cholesky factor.
    pub fn sample_initial(&self, rng: &mut impl Rng) -> DVector<f64> {
        let n = self.dim();
        let z = DVector::from_iterator(n, (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)));
        &self.mean + &self.factor * z
    }

    /// Standard symmetric sigma-point set: `2n + 1` weighted points placed at
    /// the mean and at `mean +- sqrt(n + kappa) * L_i`. `kappa = 0` gives the
    /// conventional unit spread with points at `mean +- sqrt(n) * L_i`.
    ///
    /// Weights sum to one; the weighted first and second moments reproduce
    /// the belief exactly. `kappa` in `(-n, 0)` produces a negative center
    /// weight, which callers must handle (collision estimates clamp).
    pub fn sigma_points(&self, kappa: f64) -> Result<Vec<(f64, DVector<f64>)>> {
        let n = self.dim();
        let nf = n as f64;
        if !(kappa > -nf) || !kappa.is_finite() {
            return Err(Error::BadSpread { kappa, dim: n });
        }
        let scale = (nf + kappa).sqrt();
        let w_center = kappa / (nf + kappa);
        let w_side = 0.5 / (nf + kappa);
        let mut points = Vec::with_capacity(2 * n + 1);
        points.push((w_center, self.mean.clone()));
        for i in 0..n {
            let col = self.factor.column(i) * scale;
            points.push((w_side, &self.mean + &col));
            points.push((w_side, &self.mean - &col));
        }
        Ok(points)
    }
}

/// Lower-triangular factor `L` with `L L^T = m` for symmetric positive
/// *semidefinite* matrices. Zero pivots (singular directions) are allowed as
/// long as the matching column vanishes; anything else is rejected.
pub(crate) fn psd_cholesky(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::InvalidCovariance("matrix is not square".into()));
    }
    let scale = m.diagonal().amax().max(1.0);
    for i in 0..n {
        for j in 0..i {
            if (m[(i, j)] - m[(j, i)]).abs() > 1e-9 * scale {
                return Err(Error::InvalidCovariance(format!(
                    "asymmetric at ({i},{j}): {} vs {}",
                    m[(i, j)],
                    m[(j, i)]
                )));
            }
        }
        if !m[(i, i)].is_finite() {
            return Err(Error::InvalidCovariance("non-finite entry".into()));
        }
    }
    let tol = 1e-12 * scale;
    let mut l = DMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = m[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if d > tol {
            let pivot = d.sqrt();
            l[(j, j)] = pivot;
            for i in j + 1..n {
                let mut off = m[(i, j)];
                for k in 0..j {
                    off -= l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = off / pivot;
            }
        } else if d < -tol {
            return Err(Error::InvalidCovariance(format!(
                "negative pivot {d} at index {j}"
            )));
        } else {
            // Singular direction: the remaining column must vanish too.
            for i in j + 1..n {
                let mut off = m[(i, j)];
                for k in 0..j {
                    off -= l[(i, k)] * l[(j, k)];
                }
                if off.abs() > 1e-6 * scale {
                    return Err(Error::InvalidCovariance(format!(
                        "zero pivot at {j} with nonzero off-diagonal {off}"
                    )));
                }
            }
        }
    }
    Ok(l)
}

//! Recursive pseudo-linear least-square target estimation.
//!
//! A bearing `m` constrains the target to a line; writing that constraint as
//! a linear equation in the target coordinates (the pseudo-linear trick)
//! lets a plain recursive least-square filter absorb one bearing per step.
//! Two estimators share the machinery:
//!
//! * the world-frame estimator consumes global bearings plus the vehicle's
//!   GPS position, and its state is the target position in the world frame;
//! * the body-frame estimator needs no position fix at all. Its state is the
//!   target position in the vehicle frame, which moves under the vehicle's
//!   own motion, so every update first propagates the estimate through a
//!   rigid-body transition before applying the gain correction.
//!
//! The range weights of the exact measurement model are deliberately
//! dropped (the classic pseudo-linear simplification), so the estimator is
//! biased at short range and high noise; the simulator measures that rather
//! than hiding it.

use crate::error::Error;
use crate::geometry::{wrap, Azimuth, Mat2, PoseView, Vec2};
use crate::sensing::{BearingMeasurement, Frame};
use crate::vehicle::VehicleParams;

/// Estimator state: current target estimate and the propagation matrix of
/// the underlying recursive least squares.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetEstimate {
    /// Estimated target position; world frame or body frame depending on
    /// which estimator produced it.
    pub p_hat: Vec2,
    /// Least-squares propagation matrix. Starts at identity (the prior has
    /// unit weight) and only ever shrinks in the PSD order.
    pub q: Mat2,
    /// Step index of the last absorbed measurement.
    pub k: u64,
}

impl TargetEstimate {
    /// State holding a prior guess with unit weight at step `k`.
    pub fn with_unit_weight(p_hat: Vec2, k: u64) -> Self {
        TargetEstimate {
            p_hat,
            q: Mat2::identity(),
            k,
        }
    }

    /// Eigenvalues of `q`, ascending. `q` stays symmetric by construction,
    /// so the closed form for symmetric 2x2 matrices applies.
    pub fn q_eigenvalues(&self) -> (f64, f64) {
        let tr = self.q.m11 + self.q.m22;
        let disc = ((self.q.m11 - self.q.m22).powi(2) + 4.0 * self.q.m12 * self.q.m21)
            .max(0.0)
            .sqrt();
        (0.5 * (tr - disc), 0.5 * (tr + disc))
    }
}

/// Which transition matrix the body-frame estimator propagates with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TransitionMode {
    /// Rotate the estimate by exactly `-omega_prev * h` (the angle the body
    /// frame turned through during the step).
    #[default]
    ExactRotation,
    /// First-order rotation written directly in the turn rate, period
    /// treated as unit. Kept for comparison runs; it diverges from the
    /// exact rotation unless `h` is one second.
    FirstOrderRate,
}

/// Rigid-body transition of a body-frame point over one sampling period:
/// `p_next = a * p + b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalTransition {
    pub a: Mat2,
    pub b: Vec2,
}

impl LocalTransition {
    pub fn new(omega_prev: f64, params: &VehicleParams, mode: TransitionMode) -> Self {
        let a = match mode {
            TransitionMode::ExactRotation => Mat2::rotation_ccw(-omega_prev * params.h),
            TransitionMode::FirstOrderRate => Mat2::new(1.0, omega_prev, -omega_prev, 1.0),
        };
        // The vehicle always advances v_c * h along its own +x axis, so in
        // the body frame everything else slides backward by that much.
        LocalTransition {
            a,
            b: Vec2::new(-params.v_c * params.h, 0.0),
        }
    }
}

/// Row vector of the world-frame pseudo-linear measurement equation.
fn h_global(m: f64) -> Vec2 {
    Vec2::new(-m.cos(), m.sin())
}

/// Row vector of the body-frame pseudo-linear measurement equation. The
/// body-frame bearing is measured from the +x axis, so the annihilating
/// direction swaps roles compared to the azimuth convention.
fn h_local(m: f64) -> Vec2 {
    Vec2::new(-m.sin(), m.cos())
}

/// Gain and propagation update shared by both estimators.
fn rls_gain(q: Mat2, h: Vec2) -> (Vec2, Mat2) {
    let qh = q.mul_vec(h);
    let denom = h.dot(qh) + 1.0;
    let k = qh * (1.0 / denom);
    // Down-date as the explicitly symmetric rank-1 form (Qh)(Qh)'/denom
    // rather than k(Qh)', so the weight stays bitwise symmetric.
    let q_next = Mat2::new(
        q.m11 - qh.x * qh.x / denom,
        q.m12 - qh.x * qh.y / denom,
        q.m21 - qh.x * qh.y / denom,
        q.m22 - qh.y * qh.y / denom,
    );
    (k, q_next)
}

/// Initialize the world-frame estimate from two bearings.
///
/// Each bearing pins the target to a line through the observation point;
/// the estimate is their intersection. Near-parallel sightlines or an
/// intersection on top of the current observer carry no range information
/// and are rejected, leaving the caller to fall back to a configured prior.
pub fn init_global(
    m0: &BearingMeasurement,
    p0: Vec2,
    m1: &BearingMeasurement,
    p1: Vec2,
) -> Result<TargetEstimate, Error> {
    debug_assert_eq!(m0.frame, Frame::Global);
    debug_assert_eq!(m1.frame, Frame::Global);
    let u0 = Azimuth::new(m0.value).radial_unit();
    let u1 = Azimuth::new(m1.value).radial_unit();
    // Cross product of the two directions equals sin(m0 - m1).
    let det = u0.x * u1.y - u0.y * u1.x;
    if det.abs() <= 1e-6 {
        return Err(Error::IllConditionedInit);
    }
    let d = p1 - p0;
    let t0 = (d.x * u1.y - d.y * u1.x) / det;
    let target = p0 + u0 * t0;
    if (target - p1).norm() <= 1e-9 {
        return Err(Error::IllConditionedInit);
    }
    Ok(TargetEstimate::with_unit_weight(target, 1))
}

/// Absorb one world-frame bearing.
pub fn update_global(est: &TargetEstimate, m: &BearingMeasurement, p: Vec2) -> TargetEstimate {
    debug_assert_eq!(m.frame, Frame::Global);
    let h = h_global(m.value);
    let (gain, q_next) = rls_gain(est.q, h);
    let innovation = h.dot(p) - h.dot(est.p_hat);
    TargetEstimate {
        p_hat: est.p_hat + gain * innovation,
        q: q_next,
        k: est.k + 1,
    }
}

/// Absorb one body-frame bearing, propagating the estimate through the
/// vehicle's own motion first.
///
/// Deliberate quirk of this recursion: the correction term applies the
/// measurement row to the pre-propagation estimate, not to the prediction.
/// The two differ by the step's translation and rotation, which matters
/// once the vehicle turns; see the simulator's comparison metrics.
pub fn update_local(
    est: &TargetEstimate,
    m_l: &BearingMeasurement,
    omega_prev: f64,
    params: &VehicleParams,
    mode: TransitionMode,
) -> TargetEstimate {
    debug_assert_eq!(m_l.frame, Frame::Local);
    let trans = LocalTransition::new(omega_prev, params, mode);
    let h = h_local(m_l.value);
    let (gain, q_next) = rls_gain(est.q, h);
    let p_hat = trans.a.mul_vec(est.p_hat) + trans.b - gain * h.dot(est.p_hat);
    TargetEstimate {
        p_hat,
        q: q_next,
        k: est.k + 1,
    }
}

/// Initialize the body-frame estimate from the first two bearings.
///
/// The first bearing fixes the ray the target sits on in the initial body
/// frame; the unknown range along that ray is solved so that, after one
/// propagation step, the predicted position is consistent with the second
/// bearing (which reads as a zero pseudo-measurement in its own frame).
pub fn init_local(
    m0: &BearingMeasurement,
    m1: &BearingMeasurement,
    omega0: f64,
    params: &VehicleParams,
    mode: TransitionMode,
) -> Result<TargetEstimate, Error> {
    debug_assert_eq!(m0.frame, Frame::Local);
    debug_assert_eq!(m1.frame, Frame::Local);
    let u0 = Vec2::new(m0.value.cos(), m0.value.sin());
    let h1 = h_local(m1.value);
    let trans = LocalTransition::new(omega0, params, mode);
    let denom = h1.dot(trans.a.mul_vec(u0));
    if denom.abs() <= 1e-9 {
        return Err(Error::IllConditionedInit);
    }
    let r0 = -h1.dot(trans.b) / denom;
    if r0 <= 1e-9 {
        // The rays only meet behind the sensor; no usable range.
        return Err(Error::IllConditionedInit);
    }
    let p_hat = trans.a.mul_vec(u0 * r0) + trans.b;
    if p_hat.norm() <= 1e-9 {
        return Err(Error::IllConditionedInit);
    }
    Ok(TargetEstimate::with_unit_weight(p_hat, 1))
}

/// Range and azimuth of the estimated target as seen from the vehicle.
///
/// In the world frame this needs the vehicle's position; in the body frame
/// the estimate already encodes the relative geometry and only the heading
/// enters (to convert the body-frame angle back to an azimuth).
pub fn estimate_range_and_bearing(
    est: &TargetEstimate,
    view: &PoseView,
    frame: Frame,
) -> Result<(f64, Azimuth), Error> {
    match frame {
        Frame::Global => {
            let p = view.position.ok_or_else(|| {
                Error::InvalidInput("world-frame range needs the vehicle position".into())
            })?;
            let rel = est.p_hat - p;
            let r = rel.norm();
            if r == 0.0 {
                return Err(Error::DegenerateGeometry("estimate on top of the vehicle"));
            }
            Ok((r, Azimuth::new(rel.x.atan2(rel.y))))
        }
        Frame::Local => {
            let r = est.p_hat.norm();
            if r == 0.0 {
                return Err(Error::DegenerateGeometry("estimate on top of the vehicle"));
            }
            let body_angle = est.p_hat.y.atan2(est.p_hat.x);
            let phi = wrap(std::f64::consts::FRAC_PI_2 - view.theta - body_angle);
            Ok((r, Azimuth::new(phi)))
        }
    }
}

//! Discrete-time Dubins kinematics and the turn-rate command.
//!
//! The vehicle moves at constant forward speed `v_c` and is steered only
//! through the angular rate `omega`. One sampling period of length `h`
//! advances the pose along a circular arc; the position update is the chord
//! of that arc. Steering decisions are made in a target-centered frame as a
//! pair (radial speed, tangential speed) and converted back to an angular
//! rate here.

use crate::error::Error;
use crate::geometry::{wrap, Azimuth, Pose2D};

/// Fixed kinematic parameters of the vehicle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VehicleParams {
    /// Constant forward speed, m/s.
    pub v_c: f64,
    /// Sampling period, s.
    pub h: f64,
    /// Optional clamp on the commanded angular rate, rad/s. Off by default;
    /// the nominal control law has no rate limit.
    pub omega_max: Option<f64>,
}

impl VehicleParams {
    pub fn new(v_c: f64, h: f64) -> Result<Self, Error> {
        if !(v_c.is_finite() && v_c > 0.0) {
            return Err(Error::InvalidInput(format!(
                "forward speed must be positive and finite, got {v_c}"
            )));
        }
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::InvalidInput(format!(
                "sampling period must be positive and finite, got {h}"
            )));
        }
        Ok(VehicleParams {
            v_c,
            h,
            omega_max: None,
        })
    }

    pub fn with_omega_max(mut self, omega_max: f64) -> Result<Self, Error> {
        if !(omega_max.is_finite() && omega_max > 0.0) {
            return Err(Error::InvalidInput(format!(
                "angular-rate clamp must be positive and finite, got {omega_max}"
            )));
        }
        self.omega_max = Some(omega_max);
        Ok(self)
    }
}

/// Velocity split into the component toward the target (`v_r`) and the
/// component across the sightline (`v_t`). Always satisfies
/// `v_r^2 + v_t^2 = v_c^2`: the vehicle cannot slow down, it can only trade
/// closing speed for circulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VelocityDecomposition {
    pub v_r: f64,
    pub v_t: f64,
}

/// One sampling period of the Dubins model.
///
/// The heading advances by `omega * h`; the position moves along the chord
/// of the arc, length `(2 v_c / omega) sin(omega h / 2)`, in the mid-step
/// heading direction. The `omega -> 0` singularity is removable and handled
/// by a short Taylor expansion, so a straight step is exactly `v_c * h`.
pub fn dubins_step(state: &Pose2D, omega: f64, params: &VehicleParams) -> Pose2D {
    debug_assert!(omega.is_finite());
    let u = omega * params.h;
    let half = 0.5 * u;
    let chord = if u.abs() < 1e-6 {
        // (2/omega) sin(omega h / 2) = h (1 - u^2/24 + u^4/1920 - ...)
        params.h * (1.0 - u * u / 24.0 + u * u * u * u / 1920.0)
    } else {
        (2.0 / omega) * half.sin()
    };
    let mid = state.theta + half;
    Pose2D::new(
        state.x + params.v_c * chord * mid.cos(),
        state.y + params.v_c * chord * mid.sin(),
        state.theta + u,
    )
}

/// Angular rate that realizes a desired velocity decomposition.
///
/// The decomposition plus the sightline azimuth `phi` fix a desired world-
/// frame velocity direction; the command turns the mid-step heading
/// `theta + omega h / 2` onto it. The heading difference is wrapped to
/// `(-pi, pi]` first so the vehicle never tries to fly backward, and the
/// result is clamped if `omega_max` is set.
pub fn omega_from_decomposition(
    decomp: &VelocityDecomposition,
    phi: Azimuth,
    theta: f64,
    params: &VehicleParams,
) -> Result<f64, Error> {
    let v = phi.radial_unit() * decomp.v_r + phi.tangential_unit() * decomp.v_t;
    if v.x == 0.0 && v.y == 0.0 {
        return Err(Error::DegenerateGeometry("zero velocity decomposition"));
    }
    let direction = v.y.atan2(v.x);
    let mut omega = 2.0 / params.h * wrap(direction - theta);
    if let Some(limit) = params.omega_max {
        omega = omega.clamp(-limit, limit);
    }
    Ok(omega)
}

/// Complete a radial speed into a full decomposition.
///
/// The magnitude of the tangential component is forced by
/// `v_t^2 = v_c^2 - v_r^2`; only its sign is free. We pick the sign whose
/// turn command is smaller in magnitude, i.e. the circling direction that
/// needs the least heading change from where the vehicle already points.
/// Ties (which in floating point means equal within a small tolerance) go
/// to positive `v_t`.
pub fn tangential_sign(
    v_r: f64,
    phi: Azimuth,
    theta: f64,
    params: &VehicleParams,
) -> Result<VelocityDecomposition, Error> {
    if !v_r.is_finite() || v_r < 0.0 || v_r > params.v_c {
        return Err(Error::InvalidInput(format!(
            "radial speed must lie in [0, v_c], got {v_r}"
        )));
    }
    let v_t_mag = (params.v_c * params.v_c - v_r * v_r).max(0.0).sqrt();
    if v_t_mag == 0.0 {
        return Ok(VelocityDecomposition { v_r, v_t: 0.0 });
    }
    let plus = VelocityDecomposition { v_r, v_t: v_t_mag };
    let minus = VelocityDecomposition { v_r, v_t: -v_t_mag };
    let omega_plus = omega_from_decomposition(&plus, phi, theta, params)?;
    let omega_minus = omega_from_decomposition(&minus, phi, theta, params)?;
    let gap = omega_plus.abs() - omega_minus.abs();
    let tie = gap.abs() <= 1e-9 * (1.0 + omega_plus.abs().max(omega_minus.abs()));
    if tie || gap < 0.0 {
        Ok(plus)
    } else {
        Ok(minus)
    }
}

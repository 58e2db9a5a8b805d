//! Planar geometry: vectors, poses, angle wrapping, and the azimuth
//! convention used by the bearing sensor.
//!
//! Two different angle origins coexist here and it is worth being explicit
//! about them once. Headings (`Pose2D::theta`) are measured from the +x axis,
//! counter-clockwise positive, the usual mathematical convention. Azimuths
//! are measured from the +y axis toward +x (compass-style), so the radial
//! unit vector at azimuth `phi` is `[sin phi, cos phi]`. Both live in
//! `(-pi, pi]`.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::Error;

/// Plain 2D vector. Doubles as a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub const fn zero() -> Self {
        Vec2 { x: 0.0, y: 0.0 }
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

/// Row-major 2x2 matrix. Just enough linear algebra for the estimators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2 {
    pub m11: f64,
    pub m12: f64,
    pub m21: f64,
    pub m22: f64,
}

impl Mat2 {
    pub const fn new(m11: f64, m12: f64, m21: f64, m22: f64) -> Self {
        Mat2 { m11, m12, m21, m22 }
    }

    pub const fn identity() -> Self {
        Mat2::new(1.0, 0.0, 0.0, 1.0)
    }

    /// Counter-clockwise rotation by `theta`.
    ///
    /// The world-to-body map for a pose with heading `theta` is
    /// `rotation_ccw(-theta)`.
    pub fn rotation_ccw(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Mat2::new(c, -s, s, c)
    }

    pub fn transpose(self) -> Self {
        Mat2::new(self.m11, self.m21, self.m12, self.m22)
    }

    pub fn det(self) -> f64 {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    pub fn mul_vec(self, v: Vec2) -> Vec2 {
        Vec2::new(
            self.m11 * v.x + self.m12 * v.y,
            self.m21 * v.x + self.m22 * v.y,
        )
    }

    pub fn mul_mat(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.m11 * o.m11 + self.m12 * o.m21,
            self.m11 * o.m12 + self.m12 * o.m22,
            self.m21 * o.m11 + self.m22 * o.m21,
            self.m21 * o.m12 + self.m22 * o.m22,
        )
    }
}

/// Vehicle pose in the world frame. `theta` is the heading from +x,
/// counter-clockwise positive; constructors keep it wrapped to `(-pi, pi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose2D {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

impl Pose2D {
    pub fn new(x: f64, y: f64, theta: f64) -> Self {
        Pose2D {
            x,
            y,
            theta: wrap(theta),
        }
    }

    pub fn position(self) -> Vec2 {
        Vec2::new(self.x, self.y)
    }
}

/// The slice of the pose a consumer is entitled to see.
///
/// Heading comes from the compass and is always available. Position comes
/// from GPS and is absent in the GPS-denied mode; the simulator hands the
/// controller a view without it so that a position read is a compile-time
/// impossibility rather than a code-review obligation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoseView {
    pub theta: f64,
    pub position: Option<Vec2>,
}

impl PoseView {
    pub fn with_position(pose: Pose2D) -> Self {
        PoseView {
            theta: pose.theta,
            position: Some(pose.position()),
        }
    }

    pub fn heading_only(theta: f64) -> Self {
        PoseView {
            theta: wrap(theta),
            position: None,
        }
    }
}

/// Bearing from the +y axis toward +x, wrapped to `(-pi, pi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Azimuth {
    pub value: f64,
}

impl Azimuth {
    pub fn new(raw: f64) -> Self {
        Azimuth { value: wrap(raw) }
    }

    /// Unit vector pointing along this azimuth.
    pub fn radial_unit(self) -> Vec2 {
        Vec2::new(self.value.sin(), self.value.cos())
    }

    /// Unit vector 90 degrees clockwise of the radial one, so that
    /// `(radial, tangential)` is the frame the velocity gets decomposed in.
    pub fn tangential_unit(self) -> Vec2 {
        Vec2::new(self.value.cos(), -self.value.sin())
    }
}

/// Wrap into `(-pi, pi]`; internal fast path that trusts its input.
pub(crate) fn wrap(a: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut w = a.rem_euclid(two_pi);
    if w > PI {
        w -= two_pi;
    }
    w
}

/// Wrap an angle into `(-pi, pi]`.
pub fn wrap_angle(a: f64) -> Result<f64, Error> {
    if !a.is_finite() {
        return Err(Error::InvalidInput(format!(
            "angle must be finite, got {a}"
        )));
    }
    Ok(wrap(a))
}

/// Azimuth of `to` as seen from `from`.
pub fn azimuth_to(from: Vec2, to: Vec2) -> Result<Azimuth, Error> {
    if !from.is_finite() || !to.is_finite() {
        return Err(Error::InvalidInput(
            "azimuth endpoints must be finite".into(),
        ));
    }
    let d = to - from;
    if d.x == 0.0 && d.y == 0.0 {
        return Err(Error::DegenerateGeometry("azimuth of a point from itself"));
    }
    Ok(Azimuth::new(d.x.atan2(d.y)))
}

/// Express a world-frame point in the body frame of `pose`.
pub fn global_to_local(point: Vec2, pose: &Pose2D) -> Vec2 {
    Mat2::rotation_ccw(-pose.theta).mul_vec(point - pose.position())
}

/// Inverse of [`global_to_local`].
pub fn local_to_global(point: Vec2, pose: &Pose2D) -> Vec2 {
    pose.position() + Mat2::rotation_ccw(pose.theta).mul_vec(point)
}

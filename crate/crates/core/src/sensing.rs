//! Noisy bearing measurements.
//!
//! The sensor reports the azimuth to the target corrupted by zero-mean
//! Gaussian noise. Draws are not taken from one long RNG sequence; each
//! (seed, step, frame) triple is hashed into its own generator so a
//! measurement is a pure function of those three values. Re-running a step,
//! reordering runs in a sweep, or interleaving global- and local-frame
//! measurements can never shift which noise value a given step sees.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Error;
use crate::geometry::{azimuth_to, wrap, Pose2D, Vec2};

/// Measurement noise description.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    /// Standard deviation of the bearing error, radians.
    pub sigma: f64,
    /// Base seed; every stream this model produces is derived from it.
    pub seed: u64,
}

impl NoiseModel {
    pub fn new(sigma: f64, seed: u64) -> Result<Self, Error> {
        if !(sigma.is_finite() && sigma >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "noise standard deviation must be nonnegative, got {sigma}"
            )));
        }
        Ok(NoiseModel { sigma, seed })
    }
}

/// Which frame a bearing was taken in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frame {
    /// Azimuth from the +y world axis (needs the vehicle's world position).
    Global,
    /// Angle of the target from the body +x axis (needs no position fix).
    Local,
}

/// One bearing sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BearingMeasurement {
    /// Measured angle, wrapped to `(-pi, pi]`.
    pub value: f64,
    pub frame: Frame,
    /// Time index the sample was taken at.
    pub step: u64,
}

fn stream_key(seed: u64, k: u64, tag: u64) -> u64 {
    let mut x =
        seed ^ k.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ tag.wrapping_mul(0xD1B5_4A32_D192_ED03);
    // splitmix64 finalizer so neighbouring (seed, k) keys decorrelate
    x ^= x >> 30;
    x = x.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x ^= x >> 27;
    x = x.wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^= x >> 31;
    x
}

fn noise_draw(noise: &NoiseModel, k: u64, frame: Frame) -> f64 {
    if noise.sigma == 0.0 {
        return 0.0;
    }
    let tag = match frame {
        Frame::Global => 0,
        Frame::Local => 1,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(stream_key(noise.seed, k, tag));
    let z: f64 = rng.sample(StandardNormal);
    noise.sigma * z
}

/// Bearing to the target in the world frame.
pub fn measure_global(
    vehicle: &Pose2D,
    target: Vec2,
    noise: &NoiseModel,
    k: u64,
) -> Result<BearingMeasurement, Error> {
    let azimuth = azimuth_to(vehicle.position(), target)?;
    Ok(BearingMeasurement {
        value: wrap(azimuth.value + noise_draw(noise, k, Frame::Global)),
        frame: Frame::Global,
        step: k,
    })
}

/// Bearing to the target expressed in the body frame.
pub fn measure_local(
    target_local: Vec2,
    noise: &NoiseModel,
    k: u64,
) -> Result<BearingMeasurement, Error> {
    if target_local.x == 0.0 && target_local.y == 0.0 {
        return Err(Error::DegenerateGeometry("local bearing of the origin"));
    }
    if !target_local.is_finite() {
        return Err(Error::InvalidInput("local target must be finite".into()));
    }
    Ok(BearingMeasurement {
        value: wrap(target_local.y.atan2(target_local.x) + noise_draw(noise, k, Frame::Local)),
        frame: Frame::Local,
        step: k,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn quiet() -> NoiseModel {
        NoiseModel::new(0.0, 0).unwrap()
    }

    #[test]
    fn sigma_must_be_nonnegative() {
        assert!(NoiseModel::new(-0.1, 0).is_err());
        assert!(NoiseModel::new(f64::NAN, 0).is_err());
    }

    #[test]
    fn noiseless_global_measurement_is_the_azimuth() {
        let pose = Pose2D::new(0.0, 0.0, 1.234);
        let m = measure_global(&pose, Vec2::new(100.0, 100.0), &quiet(), 3).unwrap();
        assert_eq!(m.value, FRAC_PI_4);
        assert_eq!(m.frame, Frame::Global);
        assert_eq!(m.step, 3);

        let m = measure_global(&pose, Vec2::new(0.0, 10.0), &quiet(), 0).unwrap();
        assert_eq!(m.value, 0.0);

        assert!(measure_global(&pose, Vec2::zero(), &quiet(), 0).is_err());
    }

    #[test]
    fn noiseless_local_measurement_examples() {
        let m = measure_local(Vec2::new(141.421, 0.0), &quiet(), 0).unwrap();
        assert_eq!(m.value, 0.0);
        let m = measure_local(Vec2::new(0.0, 5.0), &quiet(), 0).unwrap();
        assert_abs_diff_eq!(m.value, FRAC_PI_2, epsilon = 1e-15);
        let m = measure_local(Vec2::new(1.0, 1.0), &quiet(), 0).unwrap();
        assert_abs_diff_eq!(m.value, FRAC_PI_4, epsilon = 1e-15);
        assert!(measure_local(Vec2::zero(), &quiet(), 0).is_err());
    }

    #[test]
    fn identical_inputs_reproduce_identical_noise() {
        let noise = NoiseModel::new(0.2, 42).unwrap();
        let pose = Pose2D::new(1.0, 2.0, 0.0);
        let target = Vec2::new(50.0, -30.0);
        let a = measure_global(&pose, target, &noise, 17).unwrap();
        let b = measure_global(&pose, target, &noise, 17).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
    }

    #[test]
    fn steps_seeds_and_frames_give_distinct_draws() {
        let noise = NoiseModel::new(0.2, 42).unwrap();
        let pose = Pose2D::new(0.0, 0.0, 0.0);
        let target = Vec2::new(0.0, 10.0);
        let at = |k| measure_global(&pose, target, &noise, k).unwrap().value;
        assert_ne!(at(1), at(2));
        let other_seed = NoiseModel::new(0.2, 43).unwrap();
        assert_ne!(
            at(1),
            measure_global(&pose, target, &other_seed, 1).unwrap().value
        );
        // Same key, different frame: the local stream is its own sub-stream.
        let local = measure_local(Vec2::new(0.0, 10.0), &noise, 1).unwrap();
        assert_ne!(at(1), local.value);
    }

    #[test]
    fn empirical_noise_moments() {
        let sigma = 0.1;
        let noise = NoiseModel::new(sigma, 7).unwrap();
        let pose = Pose2D::new(0.0, 0.0, 0.0);
        let target = Vec2::new(0.0, 10.0); // azimuth 0, so value == the draw
        let n = 100_000;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for k in 0..n {
            let e = measure_global(&pose, target, &noise, k).unwrap().value;
            sum += e;
            sum_sq += e * e;
        }
        let mean = sum / n as f64;
        let var = sum_sq / n as f64 - mean * mean;
        assert!(mean.abs() < 5.0 * sigma / (n as f64).sqrt());
        assert!((var.sqrt() - sigma).abs() < 0.02 * sigma);
    }
}

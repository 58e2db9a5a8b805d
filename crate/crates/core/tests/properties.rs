//! Randomized invariants over the geometry, kinematics, optimizer, and
//! estimator, checked with shrinking.

use bearing_search::estimation::{update_global, TargetEstimate};
use bearing_search::geometry::{
    azimuth_to, global_to_local, local_to_global, wrap_angle, Azimuth, Pose2D, Vec2,
};
use bearing_search::optimizer::{
    objective_f, objective_fprime, solve, stationary_v_s, OptimizerInstance,
};
use bearing_search::sensing::{BearingMeasurement, Frame};
use bearing_search::vehicle::{
    dubins_step, omega_from_decomposition, tangential_sign, VehicleParams, VelocityDecomposition,
};
use proptest::prelude::*;
use std::f64::consts::PI;

const TAU: f64 = 2.0 * PI;

fn finite_angle() -> impl Strategy<Value = f64> {
    -50.0..50.0f64
}

/// Instance parameters with at least a couple of steps of slack to the
/// target, so no branch is squeezed against the terminal guard.
fn instance() -> impl Strategy<Value = OptimizerInstance> {
    (2.0..500.0f64, 0.5..10.0f64, 0.05..1.0f64, 0.0..8.0f64).prop_filter_map(
        "more than one step from the target",
        |(r, v_c, h, beta)| {
            if v_c * h / r < 0.98 {
                Some(OptimizerInstance::new(r, v_c, h, beta).unwrap())
            } else {
                None
            }
        },
    )
}

proptest! {
    #[test]
    fn wrapping_lands_in_the_half_open_interval(a in finite_angle()) {
        let w = wrap_angle(a).unwrap();
        prop_assert!(w > -PI && w <= PI);
        // Idempotent, and faithful modulo full turns.
        prop_assert_eq!(wrap_angle(w).unwrap(), w);
        let shifted = wrap_angle(a + TAU).unwrap();
        prop_assert!((shifted - w).abs() < 1e-9);
    }

    #[test]
    fn azimuth_round_trips_through_its_unit_vector(
        phi in -PI..PI,
        r in 0.1..1000.0f64,
        cx in -500.0..500.0f64,
        cy in -500.0..500.0f64,
    ) {
        let from = Vec2::new(cx, cy);
        let to = from + Azimuth::new(phi).radial_unit() * r;
        let back = azimuth_to(from, to).unwrap();
        let err = wrap_angle(back.value - phi).unwrap().abs();
        prop_assert!(err < 1e-7, "azimuth came back {} off", err);
    }

    #[test]
    fn frame_maps_invert_each_other(
        px in -100.0..100.0f64,
        py in -100.0..100.0f64,
        x in -100.0..100.0f64,
        y in -100.0..100.0f64,
        theta in finite_angle(),
    ) {
        let pose = Pose2D::new(x, y, theta);
        let p = Vec2::new(px, py);
        let round = local_to_global(global_to_local(p, &pose), &pose);
        prop_assert!((round - p).norm() < 1e-9);
    }

    #[test]
    fn one_step_never_travels_farther_than_the_arc(
        x in -10.0..10.0f64,
        y in -10.0..10.0f64,
        theta in finite_angle(),
        omega in -12.0..12.0f64,
        v_c in 0.5..10.0f64,
        h in 0.05..1.0f64,
    ) {
        let params = VehicleParams::new(v_c, h).unwrap();
        let start = Pose2D::new(x, y, theta);
        let end = dubins_step(&start, omega, &params);
        let chord = (end.position() - start.position()).norm();
        prop_assert!(chord <= v_c * h + 1e-12);
        prop_assert!((wrap_angle(end.theta - theta - omega * h).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn commanded_rate_moves_along_the_requested_direction(
        v_r_frac in 0.0..1.0f64,
        sign in proptest::bool::ANY,
        phi in -PI..PI,
        theta in -PI..PI,
    ) {
        // Any feasible decomposition translates into a turn rate whose
        // mid-step heading is exactly the direction of the requested
        // velocity (modulo full turns).
        let params = VehicleParams::new(4.0, 0.25).unwrap();
        let v_r = 4.0 * v_r_frac;
        let v_t = (params.v_c * params.v_c - v_r * v_r).max(0.0).sqrt()
            * if sign { 1.0 } else { -1.0 };
        let decomp = VelocityDecomposition { v_r, v_t };
        let az = Azimuth::new(phi);
        let v = az.radial_unit() * v_r + az.tangential_unit() * v_t;
        prop_assume!(v.norm() > 1e-9);
        let omega = omega_from_decomposition(&decomp, az, theta, &params).unwrap();
        let mid = theta + omega * params.h / 2.0;
        let err = wrap_angle(mid - v.y.atan2(v.x)).unwrap().abs();
        prop_assert!(err < 1e-9, "direction error {err}");
    }

    #[test]
    fn tie_break_prefers_the_smaller_turn(
        v_r_frac in 0.0..0.999f64,
        phi in -PI..PI,
        theta in -PI..PI,
    ) {
        let params = VehicleParams::new(4.0, 0.25).unwrap();
        let v_r = 4.0 * v_r_frac;
        let az = Azimuth::new(phi);
        let chosen = tangential_sign(v_r, az, theta, &params).unwrap();
        let omega_chosen =
            omega_from_decomposition(&chosen, az, theta, &params).unwrap();
        let flipped = VelocityDecomposition { v_r: chosen.v_r, v_t: -chosen.v_t };
        if flipped.v_t.abs() > 1e-12 {
            let omega_flipped =
                omega_from_decomposition(&flipped, az, theta, &params).unwrap();
            prop_assert!(omega_chosen.abs() <= omega_flipped.abs() + 1e-9);
        }
    }

    #[test]
    fn objective_endpoints_normalize(inst in instance()) {
        let at_vc = objective_f(&inst, inst.v_c).unwrap();
        prop_assert!((at_vc - 1.0).abs() < 1e-10);
        let v_s = stationary_v_s(&inst);
        let at_vs = objective_f(&inst, v_s).unwrap();
        prop_assert!((at_vs - inst.beta).abs() < 1e-9);
        prop_assert!(inst.feasible_lo() <= v_s && v_s <= inst.v_c);
    }

    #[test]
    fn slope_matches_finite_differences(inst in instance(), frac in 0.1..0.9f64) {
        let v_s = stationary_v_s(&inst);
        let v = v_s + frac * (inst.v_c - v_s);
        let width = inst.v_c - v_s;
        prop_assume!(width > 1e-6);
        let eps = 1e-6 * width;
        let up = objective_f(&inst, v + eps).unwrap();
        let down = objective_f(&inst, v - eps).unwrap();
        let fd = (up - down) / (2.0 * eps);
        let an = objective_fprime(&inst, v).unwrap();
        let scale = an.abs().max(fd.abs()).max(1e-6);
        prop_assert!(
            (fd - an).abs() <= 1e-4 * scale,
            "analytic {an} vs finite difference {fd}"
        );
    }

    #[test]
    fn chosen_speed_lies_in_the_pareto_interval(inst in instance()) {
        let sol = solve(&inst).unwrap();
        let v_s = stationary_v_s(&inst);
        prop_assert!(sol.v_r_star >= v_s - 1e-12);
        prop_assert!(sol.v_r_star <= inst.v_c + 1e-12);
        prop_assert!(sol.f_at_star <= 1.0 + 1e-9);
        prop_assert!(sol.f_at_star <= inst.beta + 1e-9);
    }

    #[test]
    fn estimation_term_peaks_at_the_stationary_speed(
        inst in instance(),
        a in 0.05..0.95f64,
        b in 0.05..0.95f64,
    ) {
        // With zero weight the objective is the normalized estimation
        // term: strictly falling toward v_s from below, strictly rising
        // toward v_c above it.
        let pure = OptimizerInstance::new(inst.r, inst.v_c, inst.h, 0.0).unwrap();
        let v_s = stationary_v_s(&pure);
        let lo = pure.feasible_lo();
        let (x, y) = (lo + (v_s - lo) * a.min(b), lo + (v_s - lo) * a.max(b));
        prop_assume!(y - x > 1e-9 * pure.v_c);
        let fx = objective_f(&pure, x).unwrap();
        let fy = objective_f(&pure, y).unwrap();
        prop_assert!(fy <= fx + 1e-9, "not falling below v_s: f({x})={fx} f({y})={fy}");

        let (u, w) = (v_s + (pure.v_c - v_s) * a.min(b), v_s + (pure.v_c - v_s) * a.max(b));
        prop_assume!(w - u > 1e-9 * pure.v_c);
        let fu = objective_f(&pure, u).unwrap();
        let fw = objective_f(&pure, w).unwrap();
        prop_assert!(fw >= fu - 1e-9, "not rising above v_s: f({u})={fu} f({w})={fw}");
    }

    #[test]
    fn approach_term_always_rewards_speed(
        inst in instance(),
        a in 0.0..1.0f64,
        b in 0.0..1.0f64,
    ) {
        // The weighted difference f(beta=1) - f(beta=0) isolates the
        // normalized approach term, which must fall monotonically in v_r.
        let zero = OptimizerInstance::new(inst.r, inst.v_c, inst.h, 0.0).unwrap();
        let one = OptimizerInstance::new(inst.r, inst.v_c, inst.h, 1.0).unwrap();
        let v_s = stationary_v_s(&zero);
        let (x, y) = (v_s + (zero.v_c - v_s) * a.min(b), v_s + (zero.v_c - v_s) * a.max(b));
        prop_assume!(y - x > 1e-9 * zero.v_c);
        let approach = |v: f64| {
            objective_f(&one, v).unwrap() - objective_f(&zero, v).unwrap()
        };
        prop_assert!(approach(y) <= approach(x) + 1e-9);
    }

    #[test]
    fn updates_only_shrink_the_weight(
        px in -50.0..50.0f64,
        py in -50.0..50.0f64,
        bearings in proptest::collection::vec(-PI..PI, 1..20),
    ) {
        let mut est = TargetEstimate::with_unit_weight(Vec2::new(px, py), 0);
        let mut prev = est.q_eigenvalues();
        for (i, m) in bearings.iter().enumerate() {
            let meas = BearingMeasurement {
                value: *m,
                frame: Frame::Global,
                step: (i + 1) as u64,
            };
            est = update_global(&est, &meas, Vec2::new(i as f64, -(i as f64)));
            let (lo, hi) = est.q_eigenvalues();
            prop_assert!(lo > 0.0);
            prop_assert!(hi <= prev.1 + 1e-12);
            // Symmetry is preserved exactly.
            prop_assert_eq!(est.q.m12, est.q.m21);
            prev = (lo, hi);
        }
    }
}

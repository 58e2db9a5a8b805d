//! Closed-form choice of the radial speed.
//!
//! Each step the controller splits the fixed forward speed between closing
//! on the target and circling it. Circling keeps the bearing geometry rich,
//! which is what the estimator feeds on; closing ends the search sooner.
//! The two goals are scored over one step, normalized against their best
//! and worst values on the Pareto set, and blended with a weight `beta`
//! (0 = pure estimation, large = pure approach). The blended objective is
//! strictly convex between the stationary speed `v_s` and the forward speed
//! `v_c`, so its minimizer is either an endpoint or the root of the
//! derivative, and the derivative's root reduces to a cubic. [`solve`]
//! dispatches among those candidates in closed form.
//!
//! Everything here is scale-free: only `rho = v_c * h / r` and `beta`
//! matter, which is what makes exhaustive randomized cross-checking against
//! a grid search cheap.

use crate::error::Error;

/// One radial-speed problem: current range plus vehicle constants and the
/// trade-off weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerInstance {
    /// Range to the (estimated) target, m.
    pub r: f64,
    /// Forward speed, m/s.
    pub v_c: f64,
    /// Sampling period, s.
    pub h: f64,
    /// Trade-off weight, dimensionless, >= 0.
    pub beta: f64,
}

impl OptimizerInstance {
    pub fn new(r: f64, v_c: f64, h: f64, beta: f64) -> Result<Self, Error> {
        if !(r.is_finite() && r > 0.0 && v_c.is_finite() && v_c > 0.0 && h.is_finite() && h > 0.0) {
            return Err(Error::InvalidInput(format!(
                "range, speed and period must be positive and finite, got r={r}, v_c={v_c}, h={h}"
            )));
        }
        if !(beta.is_finite() && beta >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "trade-off weight must be nonnegative and finite, got {beta}"
            )));
        }
        let inst = OptimizerInstance { r, v_c, h, beta };
        if inst.rho() > 1.0 {
            // Less than one step of travel to the target; the search is
            // over and the one-step objective is meaningless.
            return Err(Error::NearTerminalRange);
        }
        Ok(inst)
    }

    /// Step-to-range ratio `v_c h / r`. The whole problem depends on the
    /// geometry only through this number.
    pub fn rho(&self) -> f64 {
        self.v_c * self.h / self.r
    }

    /// Smallest radial speed that still shrinks the range over one step.
    pub fn feasible_lo(&self) -> f64 {
        self.v_c * self.v_c * self.h / (2.0 * self.r)
    }

    fn xi(&self, v_r: f64) -> f64 {
        self.r * self.r - 2.0 * self.r * v_r * self.h + self.v_c * self.v_c * self.h * self.h
    }

    /// Slope of the approach-cost term; also the normalization constant
    /// that blows up as the range closes on one step of travel.
    fn approach_slope(&self) -> f64 {
        let vch = self.v_c * self.h;
        self.beta * (vch * vch + self.r * self.r) / (self.v_c * (vch - self.r) * (vch - self.r))
    }

    fn check_not_terminal(&self) -> Result<(), Error> {
        if self.rho() >= 1.0 - 1e-9 {
            return Err(Error::NearTerminalRange);
        }
        Ok(())
    }
}

/// Which branch of the dispatch produced the answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolveCase {
    /// `beta >= 4`: approach at full speed no matter the geometry.
    GreedyBeta4,
    /// `beta` in `[2, 4)` and `rho` at or below the critical ratio:
    /// full speed.
    SmallRho,
    /// `beta` in `[2, 4)` and `rho` above the critical ratio: the interior
    /// derivative root wins.
    LargeRho,
    /// `beta` in `[1, 2)`: the interior root always wins.
    Interior,
    /// `beta` in `[0, 1)` and the root's objective beats `beta`.
    RootWins,
    /// `beta` in `[0, 1)` otherwise: the stationary speed wins.
    StationaryWins,
}

/// Result of [`solve`], with the diagnostic quantities the dispatch used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialSolution {
    pub v_r_star: f64,
    pub case_fired: SolveCase,
    /// Stationary speed: the radial speed that keeps the range fixed while
    /// maximizing what the next bearing is worth.
    pub v_s: f64,
    /// Largest derivative root in `[v_s, v_c]`, when the dispatch needed it.
    pub v_z: Option<f64>,
    pub rho: f64,
    /// Critical step-to-range ratio, populated for `beta` in `[2, 4)`.
    pub rho_c: Option<f64>,
    pub f_at_star: f64,
}

/// Blended one-step objective. Lower is better; by construction the
/// endpoints satisfy `f(v_c) = 1` and `f(v_s) = beta`.
pub fn objective_f(inst: &OptimizerInstance, v_r: f64) -> Result<f64, Error> {
    inst.check_not_terminal()?;
    let vch = inst.v_c * inst.h;
    let theta = inst.r * inst.r - vch * vch;
    let xi = inst.xi(v_r);
    let estimation =
        1.0 - (inst.v_c * inst.v_c - v_r * v_r) * theta * theta / (inst.v_c * inst.v_c * xi * xi);
    let approach = (inst.v_c - v_r) * inst.approach_slope();
    Ok(estimation + approach)
}

/// Closed-form derivative of [`objective_f`] in `v_r`.
pub fn objective_fprime(inst: &OptimizerInstance, v_r: f64) -> Result<f64, Error> {
    inst.check_not_terminal()?;
    let vch = inst.v_c * inst.h;
    let theta = inst.r * inst.r - vch * vch;
    let xi = inst.xi(v_r);
    let numer = 2.0 * v_r * (inst.r * inst.r + vch * vch) - 4.0 * inst.r * inst.v_c * vch;
    Ok(numer * theta * theta / (inst.v_c * inst.v_c * xi * xi * xi) - inst.approach_slope())
}

/// Closed-form second derivative of [`objective_f`]. Strictly positive on
/// `[v_s, v_c]`, which is what makes the derivative root unique there.
pub fn objective_fsecond(inst: &OptimizerInstance, v_r: f64) -> Result<f64, Error> {
    inst.check_not_terminal()?;
    let vch = inst.v_c * inst.h;
    let theta = inst.r * inst.r - vch * vch;
    let xi = inst.xi(v_r);
    let n = 2.0 * v_r * (inst.r * inst.r + vch * vch) - 4.0 * inst.r * inst.v_c * vch;
    let n_prime = 2.0 * (inst.r * inst.r + vch * vch);
    let c = theta * theta / (inst.v_c * inst.v_c);
    Ok(c * (n_prime * xi + 6.0 * inst.r * inst.h * n) / (xi * xi * xi * xi))
}

/// Radial speed that leaves the range unchanged over one step while
/// maximizing the information in the next bearing.
pub fn stationary_v_s(inst: &OptimizerInstance) -> f64 {
    let vch = inst.v_c * inst.h;
    2.0 * inst.r * inst.v_c * vch / (inst.r * inst.r + vch * vch)
}

/// Critical step-to-range ratio separating the full-speed and interior-root
/// regimes for `beta` in `[2, 4]`.
///
/// This is evaluated as `(beta - 2) / (2 + sqrt(beta (4 - beta)))`, the
/// conjugate rewrite of the textbook `(2 - sqrt(4 beta - beta^2)) / (beta - 2)`
/// form; the two are identical but the rewrite has no 0/0 at `beta = 2`, so
/// no special-cased limit is needed.
pub fn rho_critical(beta: f64) -> Result<f64, Error> {
    if !(beta.is_finite() && (2.0..=4.0).contains(&beta)) {
        return Err(Error::InvalidInput(format!(
            "critical ratio is defined for weights in [2, 4], got {beta}"
        )));
    }
    Ok((beta - 2.0) / (2.0 + (beta * (4.0 - beta)).sqrt()))
}

fn real_cubic_roots(a3: f64, a2: f64, a1: f64, a0: f64) -> ([f64; 3], usize) {
    // Monic, then depressed: w = t - p/3 turns w^3 + p w^2 + q w + r0 into
    // t^3 + a t + b.
    let p = a2 / a3;
    let q = a1 / a3;
    let r0 = a0 / a3;
    let a = q - p * p / 3.0;
    let b = 2.0 * p * p * p / 27.0 - p * q / 3.0 + r0;
    let shift = -p / 3.0;
    let disc = -4.0 * a * a * a - 27.0 * b * b;
    let mut roots = [0.0; 3];
    if a == 0.0 && b == 0.0 {
        roots[0] = shift;
        return (roots, 1);
    }
    if disc > 0.0 {
        // Three distinct real roots; trigonometric form.
        let m = 2.0 * (-a / 3.0).sqrt();
        let arg = (3.0 * b / (a * m)).clamp(-1.0, 1.0);
        let ang = arg.acos() / 3.0;
        for (k, slot) in roots.iter_mut().enumerate() {
            let t = m * (ang - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos();
            *slot = t + shift;
        }
        (roots, 3)
    } else {
        // One real root; Cardano.
        let half_b = b / 2.0;
        let inner = (half_b * half_b + a * a * a / 27.0).max(0.0).sqrt();
        let u = (-half_b + inner).cbrt();
        let v = (-half_b - inner).cbrt();
        roots[0] = u + v + shift;
        (roots, 1)
    }
}

/// Rightmost sign change of the derivative on `[v_s, v_c]`, refined by
/// bisection. Returns `None` when the derivative never changes sign.
fn scan_largest_root(inst: &OptimizerInstance, v_s: f64) -> Result<Option<f64>, Error> {
    const CELLS: usize = 2048;
    let lo = v_s;
    let hi = inst.v_c;
    let width = hi - lo;
    if width <= 0.0 {
        return Ok(None);
    }
    let at = |i: usize| lo + width * i as f64 / CELLS as f64;
    let mut bracket = None;
    let mut right = objective_fprime(inst, hi)?;
    for i in (0..CELLS).rev() {
        let left = objective_fprime(inst, at(i))?;
        if left == 0.0 {
            return Ok(Some(at(i)));
        }
        if left * right < 0.0 {
            bracket = Some((at(i), at(i + 1), left));
            break;
        }
        right = left;
    }
    let Some((mut a, mut b, mut fa)) = bracket else {
        return Ok(if right == 0.0 { Some(hi) } else { None });
    };
    let tol = 1e-12 * inst.v_c.max(1.0);
    while b - a > tol {
        let mid = 0.5 * (a + b);
        let fm = objective_fprime(inst, mid)?;
        if fm == 0.0 {
            return Ok(Some(mid));
        }
        if fa * fm < 0.0 {
            b = mid;
        } else {
            a = mid;
            fa = fm;
        }
    }
    Ok(Some(0.5 * (a + b)))
}

/// A few Newton steps to sharpen a root estimate; the second derivative is
/// positive on the interval so these converge from a bracketed start.
fn polish_root(inst: &OptimizerInstance, mut v: f64, lo: f64, hi: f64) -> Result<f64, Error> {
    for _ in 0..4 {
        let d1 = objective_fprime(inst, v)?;
        let d2 = objective_fsecond(inst, v)?;
        if d1 == 0.0 || d2 <= 0.0 {
            break;
        }
        let next = (v - d1 / d2).clamp(lo, hi);
        if (next - v).abs() <= 1e-15 * inst.v_c {
            return Ok(next);
        }
        v = next;
    }
    Ok(v)
}

/// Largest root of the objective's derivative on `[v_s, v_c]`.
///
/// The derivative clears to a cubic in `v_r` (written below in the
/// dimensionless variable `w = v_r h / r`), solved in closed form; roots
/// are filtered back to the interval and the largest is polished by Newton
/// steps. If the closed form yields nothing usable (clustered roots near
/// `rho -> 1` lose precision), a 2048-cell sign scan plus bisection takes
/// over. With a positive weight the derivative is negative at `v_s`, so
/// when it never crosses zero there is no root at all; this returns `v_s`
/// then, and the dispatch in [`solve`] never consults the value in those
/// regimes.
pub fn largest_root_v_z(inst: &OptimizerInstance) -> Result<f64, Error> {
    inst.check_not_terminal()?;
    let v_s = stationary_v_s(inst);
    if inst.beta == 0.0 {
        // The cubic degenerates to a linear equation whose root is exactly
        // the stationary speed.
        return Ok(v_s);
    }
    let rho = inst.rho();
    let s = 1.0 + rho * rho;
    let one_minus = 1.0 - rho;
    let one_plus = 1.0 + rho;
    let g = one_minus.powi(4) * one_plus * one_plus;
    let brs = inst.beta * rho * s;
    let a3 = 8.0 * brs;
    let a2 = -12.0 * brs * s;
    let a1 = 6.0 * brs * s * s + 2.0 * g * s;
    let a0 = -(brs * s * s * s + 4.0 * g * rho * rho);
    let (roots, n) = real_cubic_roots(a3, a2, a1, a0);

    let w_lo = v_s * inst.h / inst.r;
    let w_hi = rho;
    let tol_w = 1e-9 * rho.max(1e-12);
    let mut best: Option<f64> = None;
    for &w in roots.iter().take(n) {
        if w >= w_lo - tol_w && w <= w_hi + tol_w {
            best = Some(best.map_or(w, |b: f64| b.max(w)));
        }
    }
    if let Some(w) = best {
        let v = (w * inst.r / inst.h).clamp(v_s, inst.v_c);
        let v = polish_root(inst, v, v_s, inst.v_c)?;
        if objective_fprime(inst, v)?.abs() <= 1e-9 {
            return Ok(v);
        }
    }
    match scan_largest_root(inst, v_s)? {
        Some(v) => polish_root(inst, v, v_s, inst.v_c),
        None => Ok(v_s),
    }
}

/// Optimal radial speed for one step.
///
/// The dispatch follows the convexity analysis: for heavy approach weights
/// the answer is pinned at `v_c`; in the middle band it is `v_c` or the
/// interior root depending on whether the step-to-range ratio has passed
/// the critical value; for light weights the interior root competes with
/// the stationary speed on objective value. Exact ties go to the larger
/// speed, which makes strictly more progress for the same score.
pub fn solve(inst: &OptimizerInstance) -> Result<RadialSolution, Error> {
    inst.check_not_terminal()?;
    let v_s = stationary_v_s(inst);
    let rho = inst.rho();
    let beta = inst.beta;

    let (v_r_star, case_fired, v_z, rho_c) = if beta >= 4.0 {
        (inst.v_c, SolveCase::GreedyBeta4, None, None)
    } else if beta >= 2.0 {
        let rc = rho_critical(beta)?;
        if rho <= rc {
            (inst.v_c, SolveCase::SmallRho, None, Some(rc))
        } else {
            let vz = largest_root_v_z(inst)?;
            (vz, SolveCase::LargeRho, Some(vz), Some(rc))
        }
    } else if beta >= 1.0 {
        let vz = largest_root_v_z(inst)?;
        (vz, SolveCase::Interior, Some(vz), None)
    } else if beta == 0.0 {
        // Pure estimation: the objective is minimized exactly at the
        // stationary speed, no root-finding needed.
        (v_s, SolveCase::StationaryWins, Some(v_s), None)
    } else {
        let vz = largest_root_v_z(inst)?;
        let f_z = objective_f(inst, vz)?;
        if f_z < beta || (f_z == beta && vz > v_s) {
            (vz, SolveCase::RootWins, Some(vz), None)
        } else {
            (v_s, SolveCase::StationaryWins, Some(vz), None)
        }
    };

    Ok(RadialSolution {
        v_r_star,
        case_fired,
        v_s,
        v_z,
        rho,
        rho_c,
        f_at_star: objective_f(inst, v_r_star)?,
    })
}

/// Grid argmin of the objective over the feasible set. Test oracle and
/// diagnostic only; `solve` is the production path.
pub fn brute_force_argmin(inst: &OptimizerInstance, grid_points: usize) -> Result<f64, Error> {
    if grid_points < 1000 {
        return Err(Error::InvalidInput(format!(
            "grid argmin needs at least 1000 points, got {grid_points}"
        )));
    }
    let lo = inst.feasible_lo();
    let hi = inst.v_c;
    let mut best_v = lo;
    let mut best_f = objective_f(inst, lo)?;
    for i in 1..grid_points {
        let v = lo + (hi - lo) * i as f64 / (grid_points - 1) as f64;
        let f = objective_f(inst, v)?;
        if f < best_f {
            best_f = f;
            best_v = v;
        }
    }
    Ok(best_v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn canonical(beta: f64) -> OptimizerInstance {
        OptimizerInstance::new(10.0, 4.0, 0.25, beta).unwrap()
    }

    #[test]
    fn constructor_guards_the_domain() {
        assert!(OptimizerInstance::new(-1.0, 4.0, 0.25, 1.0).is_err());
        assert!(OptimizerInstance::new(10.0, 4.0, 0.25, -0.5).is_err());
        assert!(OptimizerInstance::new(10.0, f64::NAN, 0.25, 1.0).is_err());
        // Less than one step of range is rejected outright.
        assert_eq!(
            OptimizerInstance::new(0.9, 4.0, 0.25, 1.0),
            Err(Error::NearTerminalRange)
        );
        // Exactly one step constructs (boundary of the admissible ratios)
        // but refuses evaluation.
        let edge = OptimizerInstance::new(1.0, 4.0, 0.25, 1.0).unwrap();
        assert_eq!(objective_f(&edge, 2.0), Err(Error::NearTerminalRange));
        assert_eq!(solve(&edge), Err(Error::NearTerminalRange));
    }

    #[test]
    fn endpoint_identities() {
        for &beta in &[0.0, 0.3, 1.0, 2.5, 4.0, 7.0] {
            let inst = canonical(beta);
            let v_s = stationary_v_s(&inst);
            assert_abs_diff_eq!(objective_f(&inst, inst.v_c).unwrap(), 1.0, epsilon = 1e-10);
            assert_abs_diff_eq!(objective_f(&inst, v_s).unwrap(), beta, epsilon = 1e-10);
        }
    }

    #[test]
    fn objective_reference_values() {
        let inst = canonical(1.0);
        assert_relative_eq!(
            objective_f(&inst, 2.0).unwrap(),
            0.7357922568545279,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            objective_f(&inst, 3.0).unwrap(),
            0.731963995386228,
            max_relative = 1e-12
        );
    }

    #[test]
    fn derivative_reference_values() {
        let inst = canonical(1.0);
        let v_s = stationary_v_s(&inst);
        // With any positive weight the derivative at v_s is strictly
        // negative (the approach term's slope never vanishes), which is
        // exactly why the stationary point loses for beta in (0, 1).
        assert_relative_eq!(
            objective_fprime(&inst, v_s).unwrap(),
            -0.3117283950617284,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            objective_fprime(&inst, 2.0).unwrap(),
            -0.11338577041189446,
            max_relative = 1e-12
        );
        // At beta = 0 the stationary point is a true critical point.
        let pure = canonical(0.0);
        assert_abs_diff_eq!(
            objective_fprime(&pure, stationary_v_s(&pure)).unwrap(),
            0.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn derivative_matches_finite_differences() {
        for &beta in &[0.0, 0.7, 1.5, 3.0] {
            let inst = canonical(beta);
            let v_s = stationary_v_s(&inst);
            for i in 0..=20 {
                let v = v_s + (inst.v_c - v_s) * i as f64 / 20.0;
                let d = 1e-6;
                let (a, b) = (v - d, (v + d).min(inst.v_c));
                let fd =
                    (objective_f(&inst, b).unwrap() - objective_f(&inst, a).unwrap()) / (b - a);
                let exact = objective_fprime(&inst, 0.5 * (a + b)).unwrap();
                assert_relative_eq!(exact, fd, max_relative = 1e-5, epsilon = 1e-7);
            }
        }
    }

    #[test]
    fn second_derivative_reference_values_and_positivity() {
        let inst = canonical(1.0);
        let v_s = stationary_v_s(&inst);
        assert_relative_eq!(
            objective_fsecond(&inst, v_s).unwrap(),
            0.13541124457720788,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            objective_fsecond(&inst, inst.v_c).unwrap(),
            0.3711515012955342,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            objective_fsecond(&inst, 2.0).unwrap(),
            0.19689552029056204,
            max_relative = 1e-12
        );
    }

    #[test]
    fn stationary_speed_formula() {
        let inst = canonical(1.0);
        assert_relative_eq!(stationary_v_s(&inst), 80.0 / 101.0, max_relative = 1e-15);
        // At exactly one step of range the stationary speed is full speed.
        let edge = OptimizerInstance::new(1.0, 4.0, 0.25, 1.0).unwrap();
        assert_relative_eq!(stationary_v_s(&edge), 4.0, max_relative = 1e-15);
        // Far away it collapses toward zero like 2 v_c rho.
        let far = OptimizerInstance::new(1e6, 4.0, 0.25, 1.0).unwrap();
        assert_relative_eq!(
            stationary_v_s(&far),
            2.0 * 4.0 * far.rho(),
            max_relative = 1e-9
        );
        // Always inside the feasible set.
        for &r in &[1.01, 2.0, 10.0, 1e4] {
            let inst = OptimizerInstance::new(r, 4.0, 0.25, 1.0).unwrap();
            let v_s = stationary_v_s(&inst);
            assert!(v_s >= inst.feasible_lo() && v_s <= inst.v_c);
        }
    }

    #[test]
    fn critical_ratio_values() {
        assert_relative_eq!(
            rho_critical(3.0).unwrap(),
            0.2679491924311228,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            rho_critical(2.5).unwrap(),
            0.12701665379258298,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            rho_critical(3.9).unwrap(),
            0.7239474737685051,
            max_relative = 1e-12
        );
        assert_eq!(rho_critical(2.0).unwrap(), 0.0);
        assert_eq!(rho_critical(4.0).unwrap(), 1.0);
        assert!(rho_critical(1.9).is_err());
        assert!(rho_critical(4.1).is_err());
    }

    #[test]
    fn root_reference_values() {
        let inst = canonical(1.0);
        let vz = largest_root_v_z(&inst).unwrap();
        assert_relative_eq!(vz, 2.5295806360253383, max_relative = 1e-10);
        assert!(objective_fprime(&inst, vz).unwrap().abs() <= 1e-10);

        let steep = OptimizerInstance::new(2.0, 4.0, 0.25, 3.0).unwrap();
        let vz = largest_root_v_z(&steep).unwrap();
        assert_relative_eq!(vz, 3.9568166517917107, max_relative = 1e-10);
        assert_relative_eq!(
            objective_f(&steep, vz).unwrap(),
            0.9843318566101465,
            max_relative = 1e-10
        );

        // Zero weight: the only root is the stationary speed itself.
        let pure = canonical(0.0);
        assert_eq!(largest_root_v_z(&pure).unwrap(), stationary_v_s(&pure));
    }

    #[test]
    fn scan_fallback_agrees_with_the_closed_form() {
        for &(r, beta) in &[(10.0, 1.0), (3.0, 1.7), (2.0, 3.0), (50.0, 0.4)] {
            let inst = OptimizerInstance::new(r, 4.0, 0.25, beta).unwrap();
            let v_s = stationary_v_s(&inst);
            let cubic = largest_root_v_z(&inst).unwrap();
            let scanned = scan_largest_root(&inst, v_s)
                .unwrap()
                .expect("root exists in these regimes");
            assert_abs_diff_eq!(cubic, scanned, epsilon = 1e-9);
        }
    }

    #[test]
    fn near_terminal_instance_still_yields_a_usable_root() {
        // Here rho is close enough to 1 that the clustered cubic roots can
        // lose the bracket; the scan fallback has to hold the contract.
        let inst = OptimizerInstance::new(1.0015731109525239, 4.0, 0.25, 1.0).unwrap();
        let vz = largest_root_v_z(&inst).unwrap();
        let v_s = stationary_v_s(&inst);
        assert!(vz >= v_s && vz <= inst.v_c);
        // The slope swings by ~1e5 across this sliver of feasible speeds, so
        // a small absolute bound on it is meaningless. The convexity of the
        // tail pins the root instead: the slope must change sign within a
        // thousandth of the feasible width on either side.
        let delta = 1e-3 * (inst.v_c - v_s);
        assert!(objective_fprime(&inst, vz - delta).unwrap() < 0.0);
        assert!(objective_fprime(&inst, vz + delta).unwrap() > 0.0);
        let f_z = objective_f(&inst, vz).unwrap();
        assert!(f_z <= objective_f(&inst, v_s).unwrap() + 1e-12);
        assert!(f_z <= objective_f(&inst, inst.v_c).unwrap() + 1e-12);
    }

    #[test]
    fn dispatch_cases() {
        // Heavy weight: full speed everywhere.
        let sol = solve(&canonical(5.0)).unwrap();
        assert_eq!(sol.case_fired, SolveCase::GreedyBeta4);
        assert_eq!(sol.v_r_star, 4.0);
        assert_abs_diff_eq!(sol.f_at_star, 1.0, epsilon = 1e-10);
        assert_eq!(sol.v_z, None);

        // Middle band, ratio below critical: still full speed.
        let inst = OptimizerInstance::new(5.0, 4.0, 0.25, 3.0).unwrap();
        assert_eq!(inst.rho(), 0.2);
        let sol = solve(&inst).unwrap();
        assert_eq!(sol.case_fired, SolveCase::SmallRho);
        assert_eq!(sol.v_r_star, 4.0);
        assert_relative_eq!(sol.rho_c.unwrap(), 0.2679491924311228, max_relative = 1e-12);

        // Middle band, ratio above critical: interior root.
        let inst = OptimizerInstance::new(2.0, 4.0, 0.25, 3.0).unwrap();
        let sol = solve(&inst).unwrap();
        assert_eq!(sol.case_fired, SolveCase::LargeRho);
        assert_relative_eq!(sol.v_r_star, 3.9568166517917107, max_relative = 1e-10);

        // Unit weight: interior root regime.
        let sol = solve(&canonical(1.0)).unwrap();
        assert_eq!(sol.case_fired, SolveCase::Interior);
        assert_relative_eq!(sol.v_r_star, 2.5295806360253383, max_relative = 1e-10);
        assert_relative_eq!(sol.f_at_star, 0.7049409849234151, max_relative = 1e-10);

        // Light weight: the root's value always undercuts beta (the
        // objective strictly decreases leaving v_s), so the root wins.
        let sol = solve(&canonical(0.2)).unwrap();
        assert_eq!(sol.case_fired, SolveCase::RootWins);
        assert!(sol.f_at_star < 0.2);
        assert!(sol.v_r_star > sol.v_s);

        // Zero weight: stationary speed, no search.
        let sol = solve(&canonical(0.0)).unwrap();
        assert_eq!(sol.case_fired, SolveCase::StationaryWins);
        assert_eq!(sol.v_r_star, sol.v_s);
    }

    #[test]
    fn solution_respects_the_feasible_and_pareto_bounds() {
        for &beta in &[0.0, 0.5, 1.0, 1.9, 2.0, 2.7, 3.9, 4.0, 9.0] {
            for &r in &[1.05, 1.5, 4.0, 25.0, 400.0] {
                let inst = OptimizerInstance::new(r, 4.0, 0.25, beta).unwrap();
                let sol = solve(&inst).unwrap();
                assert!(sol.v_r_star >= inst.feasible_lo() - 1e-12);
                assert!(sol.v_r_star >= sol.v_s - 1e-12);
                assert!(sol.v_r_star <= inst.v_c + 1e-12);
            }
        }
    }

    #[test]
    fn grid_argmin_matches_solve() {
        let inst = canonical(1.0);
        let grid = brute_force_argmin(&inst, 100_000).unwrap();
        let sol = solve(&inst).unwrap();
        let cell = (inst.v_c - inst.feasible_lo()) / 99_999.0;
        assert!((grid - sol.v_r_star).abs() <= cell);

        // Refining the grid must not move the argmin by more than a cell.
        let coarse = brute_force_argmin(&inst, 10_000).unwrap();
        let coarse_cell = (inst.v_c - inst.feasible_lo()) / 9_999.0;
        assert!((grid - coarse).abs() <= coarse_cell);

        assert!(brute_force_argmin(&inst, 10).is_err());
    }

    #[test]
    fn heavier_weight_never_slows_the_approach() {
        let mut prev = 0.0;
        for i in 0..=40 {
            let beta = i as f64 * 0.125;
            let sol = solve(&canonical(beta)).unwrap();
            assert!(
                sol.v_r_star >= prev - 1e-9,
                "v_r* regressed at beta={beta}: {} < {prev}",
                sol.v_r_star
            );
            prev = sol.v_r_star;
        }
    }
}

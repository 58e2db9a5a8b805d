//! The per-step control loop: estimate, solve, steer.
//!
//! Each tick the controller ingests one bearing, updates the target
//! estimate, and then acts as if the estimate were the truth (certainty
//! equivalence): the estimated range feeds the radial-speed optimizer, the
//! optimal radial speed is completed to a velocity decomposition, and the
//! decomposition becomes a turn-rate command. Two modes share this skeleton
//! and differ only in which estimator runs and what the controller is
//! allowed to see: with GPS the world-frame estimator gets bearings plus
//! the vehicle position; without GPS the body-frame estimator gets bearings
//! and the compass heading, nothing else.

use crate::error::Error;
use crate::estimation::{
    estimate_range_and_bearing, init_global, init_local, update_global, update_local,
    TargetEstimate, TransitionMode,
};
use crate::geometry::{Azimuth, PoseView, Vec2};
use crate::optimizer::{solve, OptimizerInstance, RadialSolution};
use crate::sensing::{BearingMeasurement, Frame, NoiseModel};
use crate::vehicle::{omega_from_decomposition, tangential_sign, VehicleParams};

/// Which estimator drives the loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ControlMode {
    /// World-frame estimation; the controller reads the GPS position.
    GlobalGPS,
    /// Body-frame estimation; the controller reads only the heading.
    LocalNoGPS,
}

/// How the trade-off weight evolves during a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BetaSchedule {
    /// Fixed weight; the nominal design.
    #[default]
    Constant,
    /// Weight grows as the estimated range shrinks, proportional to the
    /// first estimated range over the current one, capped at 1e3.
    InverseRange,
    /// Weight climbs 10% when the raw estimation score stalls between
    /// steps (ratio within [0.95, 1.05]) and drops 10% otherwise,
    /// clamped to [0, 10]. Both schedules are heuristics and off by
    /// default.
    ProgressRatio,
}

/// Everything fixed for the duration of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerConfig {
    pub mode: ControlMode,
    /// Trade-off weight between estimation quality and approach speed.
    pub beta: f64,
    pub beta_schedule: BetaSchedule,
    pub vehicle: VehicleParams,
    /// Carried for the measurement harness; the control law never reads it.
    pub noise: NoiseModel,
    /// Prior target estimate in the controller's working frame (world
    /// coordinates with GPS, body coordinates at mission start without).
    /// `None` means bootstrap from the first two bearings.
    pub initial_estimate: Option<Vec2>,
    /// Transition used by the body-frame estimator.
    pub local_transition_mode: TransitionMode,
    /// Turn rate commanded at step zero, before any estimate exists.
    pub omega0: f64,
}

impl ControllerConfig {
    pub fn validate(&self) -> Result<(), Error> {
        if !(self.beta.is_finite() && self.beta >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "trade-off weight must be nonnegative and finite, got {}",
                self.beta
            )));
        }
        if !self.omega0.is_finite() {
            return Err(Error::InvalidInput(
                "initial turn rate must be finite".into(),
            ));
        }
        Ok(())
    }

    fn frame(&self) -> Frame {
        match self.mode {
            ControlMode::GlobalGPS => Frame::Global,
            ControlMode::LocalNoGPS => Frame::Local,
        }
    }
}

/// First measurement, parked until the second one arrives to triangulate.
#[derive(Debug, Clone, Copy, PartialEq)]
struct PendingInit {
    m0: BearingMeasurement,
    /// Observation point of `m0`; only the GPS mode has one.
    p0: Option<Vec2>,
}

/// Mutable loop state threaded through the steps of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct ControllerState {
    k: u64,
    estimate: Option<TargetEstimate>,
    pending: Option<PendingInit>,
    omega_prev: f64,
    /// First estimated range, reference for the inverse-range schedule.
    r_ref: Option<f64>,
    /// Current weight under the progress-ratio schedule.
    progress_beta: f64,
    /// Raw estimation scores of the last two completed steps.
    fe_window: [Option<f64>; 2],
}

impl ControllerState {
    /// Step index the next measurement is expected to carry.
    pub fn next_step(&self) -> u64 {
        self.k
    }

    /// Current working-frame estimate, if one exists yet.
    pub fn estimate(&self) -> Option<&TargetEstimate> {
        self.estimate.as_ref()
    }

    /// Turn rate emitted by the previous step.
    pub fn omega_prev(&self) -> f64 {
        self.omega_prev
    }
}

/// What one controller tick produced.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlDecision {
    /// Turn-rate command for the coming sampling period.
    pub omega: f64,
    /// Set when the estimated range is already inside one step of travel;
    /// the command is then zero and the speed problem is not posed.
    pub terminal: bool,
    /// Trade-off weight actually used this step (schedules move it).
    pub beta_used: f64,
    /// Posterior estimate after ingesting this step's bearing. Absent at
    /// step zero, where no estimate exists yet.
    pub estimate: Option<TargetEstimate>,
    pub r_hat: Option<f64>,
    pub phi_hat: Option<Azimuth>,
    /// Radial-speed solution; absent at step zero and on terminal ticks.
    pub solution: Option<RadialSolution>,
}

impl ControlDecision {
    pub fn v_r_star(&self) -> Option<f64> {
        self.solution.as_ref().map(|s| s.v_r_star)
    }
}

fn fault(context: &str, e: Error) -> Error {
    Error::ControllerFault(format!("{context}: {e}"))
}

/// Raw one-step estimation score at unit noise; only its step-to-step
/// ratio matters, which is why the noise factor can be dropped.
fn raw_estimation_score(v_r: f64, r: f64, params: &VehicleParams) -> f64 {
    let vch = params.v_c * params.h;
    let xi = r * r - 2.0 * r * v_r * params.h + vch * vch;
    (params.v_c * params.v_c - v_r * v_r) * params.h * params.h / (r * r * xi * xi)
}

/// Step zero: record the first bearing (and position fix, if any) and emit
/// the configured initial turn rate. No estimate exists yet, so nothing
/// else can be decided.
pub fn step_zero(
    config: &ControllerConfig,
    view: &PoseView,
    measurement: &BearingMeasurement,
) -> Result<(ControlDecision, ControllerState), Error> {
    config.validate()?;
    if measurement.frame != config.frame() {
        return Err(Error::ControllerFault(
            "measurement frame does not match the controller mode".into(),
        ));
    }
    if config.mode == ControlMode::GlobalGPS && view.position.is_none() {
        return Err(Error::ControllerFault(
            "GPS mode needs a position fix".into(),
        ));
    }
    let (estimate, pending) = match config.initial_estimate {
        Some(prior) => (Some(TargetEstimate::with_unit_weight(prior, 0)), None),
        None => {
            let p0 = match config.mode {
                ControlMode::GlobalGPS => view.position,
                ControlMode::LocalNoGPS => None,
            };
            (
                None,
                Some(PendingInit {
                    m0: *measurement,
                    p0,
                }),
            )
        }
    };
    let state = ControllerState {
        k: 1,
        estimate,
        pending,
        omega_prev: config.omega0,
        r_ref: None,
        progress_beta: config.beta,
        fe_window: [None, None],
    };
    let decision = ControlDecision {
        omega: config.omega0,
        terminal: false,
        beta_used: config.beta,
        estimate: None,
        r_hat: None,
        phi_hat: None,
        solution: None,
    };
    Ok((decision, state))
}

/// The control law below the estimator: given a working-frame estimate,
/// produce the turn-rate command. [`step`] feeds this the posterior; tests
/// can feed it ground truth to check certainty equivalence.
pub fn decide_from_estimate(
    config: &ControllerConfig,
    beta_used: f64,
    estimate: &TargetEstimate,
    view: &PoseView,
) -> Result<ControlDecision, Error> {
    let (r_hat, phi_hat) = estimate_range_and_bearing(estimate, view, config.frame())
        .map_err(|e| fault("range/bearing recovery", e))?;
    let params = &config.vehicle;

    let terminal_decision = |beta_used: f64| ControlDecision {
        omega: 0.0,
        terminal: true,
        beta_used,
        estimate: Some(*estimate),
        r_hat: Some(r_hat),
        phi_hat: Some(phi_hat),
        solution: None,
    };

    // Inside one step of travel the one-step objective is not defined; the
    // search is over as far as this controller can tell.
    if params.v_c * params.h / r_hat >= 1.0 {
        return Ok(terminal_decision(beta_used));
    }
    let inst = OptimizerInstance::new(r_hat, params.v_c, params.h, beta_used)
        .map_err(|e| fault("radial-speed instance", e))?;
    let solution = match solve(&inst) {
        Ok(s) => s,
        // The optimizer refuses a hair short of the guard above; that
        // sliver is terminal too.
        Err(Error::NearTerminalRange) => return Ok(terminal_decision(beta_used)),
        Err(e) => return Err(fault("radial-speed solve", e)),
    };
    let decomp = tangential_sign(solution.v_r_star, phi_hat, view.theta, params)
        .map_err(|e| fault("tangential completion", e))?;
    let omega = omega_from_decomposition(&decomp, phi_hat, view.theta, params)
        .map_err(|e| fault("turn-rate recovery", e))?;
    Ok(ControlDecision {
        omega,
        terminal: false,
        beta_used,
        estimate: Some(*estimate),
        r_hat: Some(r_hat),
        phi_hat: Some(phi_hat),
        solution: Some(solution),
    })
}

/// One controller tick for steps one and onward: ingest the bearing,
/// update the estimate, and command a turn rate from it.
pub fn step(
    config: &ControllerConfig,
    state: ControllerState,
    view: &PoseView,
    measurement: &BearingMeasurement,
) -> Result<(ControlDecision, ControllerState), Error> {
    if measurement.frame != config.frame() {
        return Err(Error::ControllerFault(
            "measurement frame does not match the controller mode".into(),
        ));
    }
    let mut state = state;
    let params = &config.vehicle;

    // (1) Fold the measurement into the estimate, bootstrapping from the
    // parked first bearing when no prior was configured.
    let estimate = match (state.estimate.take(), state.pending.take()) {
        (Some(est), _) => match config.mode {
            ControlMode::GlobalGPS => {
                let p = view.position.ok_or_else(|| {
                    Error::ControllerFault("GPS mode needs a position fix".into())
                })?;
                update_global(&est, measurement, p)
            }
            ControlMode::LocalNoGPS => update_local(
                &est,
                measurement,
                state.omega_prev,
                params,
                config.local_transition_mode,
            ),
        },
        (None, Some(pending)) => match config.mode {
            ControlMode::GlobalGPS => {
                let p1 = view.position.ok_or_else(|| {
                    Error::ControllerFault("GPS mode needs a position fix".into())
                })?;
                let p0 = pending.p0.expect("GPS mode parked a position with m0");
                init_global(&pending.m0, p0, measurement, p1)
                    .map_err(|e| fault("two-bearing triangulation", e))?
            }
            ControlMode::LocalNoGPS => init_local(
                &pending.m0,
                measurement,
                state.omega_prev,
                params,
                config.local_transition_mode,
            )
            .map_err(|e| fault("two-bearing ranging", e))?,
        },
        (None, None) => {
            return Err(Error::ControllerFault(
                "step called before step_zero".into(),
            ))
        }
    };

    // (2) Recover range and bearing, (3) pick the weight for this step.
    let (r_hat, _) = estimate_range_and_bearing(&estimate, view, config.frame())
        .map_err(|e| fault("range/bearing recovery", e))?;
    let beta_used = match config.beta_schedule {
        BetaSchedule::Constant => config.beta,
        BetaSchedule::InverseRange => {
            let r_ref = *state.r_ref.get_or_insert(r_hat);
            (config.beta * r_ref / r_hat).min(1e3)
        }
        BetaSchedule::ProgressRatio => state.progress_beta,
    };

    // (4) Decide, then do the schedule bookkeeping for the next step.
    let decision = decide_from_estimate(config, beta_used, &estimate, view)?;
    if let (BetaSchedule::ProgressRatio, Some(v_r)) = (config.beta_schedule, decision.v_r_star()) {
        let score = raw_estimation_score(v_r, r_hat, params);
        state.fe_window = [state.fe_window[1], Some(score)];
        if let [Some(prev), Some(last)] = state.fe_window {
            let ratio = last / prev;
            let stalled = ratio.is_finite() && ratio != 0.0 && (0.95..=1.05).contains(&ratio);
            let next = if stalled {
                state.progress_beta * 1.1
            } else {
                state.progress_beta / 1.1
            };
            state.progress_beta = next.clamp(0.0, 10.0);
        }
    }

    state.k += 1;
    state.omega_prev = decision.omega;
    state.estimate = decision.estimate;
    Ok((decision, state))
}

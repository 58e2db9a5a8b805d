//! Closed-loop episode execution.
//!
//! The simulator owns the ground truth (true pose, true target) and plays
//! the plant: it synthesizes measurements, hands the controller exactly the
//! view its mode entitles it to, applies the commanded turn rate, and
//! records everything. The controller side never sees the true target or
//! the true range; in the no-GPS mode it does not even see the position.
//! That separation is structural: the controller receives a [`PoseView`],
//! and the no-GPS view simply has no position in it.

use std::io::{self, Write};

use crate::controller::{step, step_zero, ControlMode, ControllerConfig, ControllerState};
use crate::error::Error;
use crate::geometry::{global_to_local, local_to_global, Pose2D, PoseView, Vec2};
use crate::sensing::{measure_global, measure_local};
use crate::vehicle::dubins_step;

/// One closed-loop experiment: initial conditions, truth, controller, and
/// stopping rules.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub p0: Vec2,
    pub theta0: f64,
    /// True target position (world frame). The controller never sees it.
    pub p_t: Vec2,
    pub controller: ControllerConfig,
    /// Hard cap on the step index; the run records steps 0..=max_steps.
    pub max_steps: u64,
    /// The run stops once the true range drops below
    /// `terminal_range_factor * v_c * h`.
    pub terminal_range_factor: f64,
}

impl Scenario {
    pub const DEFAULT_MAX_STEPS: u64 = 4000;

    pub fn new(p0: Vec2, theta0: f64, p_t: Vec2, controller: ControllerConfig) -> Self {
        Scenario {
            p0,
            theta0,
            p_t,
            controller,
            max_steps: Self::DEFAULT_MAX_STEPS,
            terminal_range_factor: 1.0,
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        self.controller.validate()?;
        if !(self.p0.is_finite() && self.p_t.is_finite() && self.theta0.is_finite()) {
            return Err(Error::InvalidInput(
                "scenario geometry must be finite".into(),
            ));
        }
        if self.max_steps < 1 {
            return Err(Error::InvalidInput("max_steps must be at least 1".into()));
        }
        if !(self.terminal_range_factor.is_finite() && self.terminal_range_factor > 0.0) {
            return Err(Error::InvalidInput(format!(
                "terminal range factor must be positive, got {}",
                self.terminal_range_factor
            )));
        }
        Ok(())
    }

    /// True range below which the run stops.
    pub fn terminal_range(&self) -> f64 {
        self.terminal_range_factor * self.controller.vehicle.v_c * self.controller.vehicle.h
    }
}

/// One row of the trace: everything known about step `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    pub k: u64,
    /// `k * h` exactly.
    pub t: f64,
    pub pose: Pose2D,
    /// Turn rate commanded at this step (applied over the next period).
    pub omega: f64,
    /// Measured bearing at this step, in the mode's frame.
    pub measurement: f64,
    /// Target estimate mapped to the world frame for comparability;
    /// absent before any estimate exists.
    pub p_hat: Option<Vec2>,
    /// Estimation error against the true target, harness-computed.
    pub e_est: Option<f64>,
    /// The controller's own range estimate.
    pub r_hat: Option<f64>,
    /// True range, harness-computed; the controller never sees this.
    pub r_true: f64,
    pub v_r_star: Option<f64>,
    pub beta_used: f64,
    pub f_at_star: Option<f64>,
}

/// End-of-run roll-up.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimSummary {
    /// True range fell below the terminal range.
    pub terminated: bool,
    /// Time of the last record; for non-terminating runs this is the cap,
    /// i.e. a censored value, not a completion time.
    pub search_time: f64,
    pub final_e_est: f64,
    pub final_r_true: f64,
}

/// Full record of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationTrace {
    /// Sampling period the rows are spaced by.
    pub h: f64,
    pub terminal_range: f64,
    pub records: Vec<TraceRecord>,
    pub summary: SimSummary,
    /// A controller or sensing failure that cut the run short; the rows up
    /// to the failure are kept.
    pub fault: Option<Error>,
}

/// Execute one closed-loop run.
pub fn run(scenario: &Scenario) -> Result<SimulationTrace, Error> {
    scenario.validate()?;
    let params = scenario.controller.vehicle;
    let terminal_range = scenario.terminal_range();
    let initial_pose = Pose2D::new(scenario.p0.x, scenario.p0.y, scenario.theta0);

    // The controller takes its prior in its working frame. Scenario priors
    // are world-frame, so for the no-GPS mode the harness (which knows the
    // initial pose; the controller does not) re-expresses it once at t = 0.
    let mut config = scenario.controller;
    if config.mode == ControlMode::LocalNoGPS {
        if let Some(prior) = config.initial_estimate {
            config.initial_estimate = Some(global_to_local(prior, &initial_pose));
        }
    }

    let mut pose = initial_pose;
    let mut records: Vec<TraceRecord> = Vec::new();
    let mut ctrl_state: Option<ControllerState> = None;
    let mut fault = None;
    let mut terminated = false;
    let mut k: u64 = 0;

    loop {
        let r_true = (scenario.p_t - pose.position()).norm();

        let measured = match config.mode {
            ControlMode::GlobalGPS => measure_global(&pose, scenario.p_t, &config.noise, k),
            ControlMode::LocalNoGPS => {
                let target_local = global_to_local(scenario.p_t, &pose);
                measure_local(target_local, &config.noise, k)
            }
        };
        let m = match measured {
            Ok(m) => m,
            Err(e) => {
                fault = Some(e);
                break;
            }
        };

        let view = match config.mode {
            ControlMode::GlobalGPS => PoseView::with_position(pose),
            ControlMode::LocalNoGPS => PoseView::heading_only(pose.theta),
        };
        let stepped = match ctrl_state.take() {
            None => step_zero(&config, &view, &m),
            Some(s) => step(&config, s, &view, &m),
        };
        let (decision, new_state) = match stepped {
            Ok(x) => x,
            Err(e) => {
                fault = Some(e);
                break;
            }
        };
        ctrl_state = Some(new_state);

        // World-frame estimate for the row. At step zero the decision has
        // no estimate yet, but a configured prior is still worth plotting,
        // in its original world-frame form.
        let (p_hat, r_hat) = match (&decision.estimate, decision.r_hat) {
            (Some(est), r) => {
                let world = match config.mode {
                    ControlMode::GlobalGPS => est.p_hat,
                    ControlMode::LocalNoGPS => local_to_global(est.p_hat, &pose),
                };
                (Some(world), r)
            }
            (None, _) => match scenario.controller.initial_estimate {
                Some(prior) => (Some(prior), Some((prior - pose.position()).norm())),
                None => (None, None),
            },
        };

        records.push(TraceRecord {
            k,
            t: k as f64 * params.h,
            pose,
            omega: decision.omega,
            measurement: m.value,
            p_hat,
            e_est: p_hat.map(|p| (scenario.p_t - p).norm()),
            r_hat,
            r_true,
            v_r_star: decision.v_r_star(),
            beta_used: decision.beta_used,
            f_at_star: decision.solution.as_ref().map(|s| s.f_at_star),
        });

        if r_true < terminal_range {
            terminated = true;
            break;
        }
        if k == scenario.max_steps {
            break;
        }
        pose = dubins_step(&pose, decision.omega, &params);
        k += 1;
    }

    let summary = match records.last() {
        Some(last) => SimSummary {
            terminated,
            search_time: last.t,
            final_e_est: last.e_est.unwrap_or(f64::NAN),
            final_r_true: last.r_true,
        },
        None => SimSummary {
            terminated: false,
            search_time: 0.0,
            final_e_est: f64::NAN,
            final_r_true: (scenario.p_t - scenario.p0).norm(),
        },
    };
    Ok(SimulationTrace {
        h: params.h,
        terminal_range,
        records,
        summary,
        fault,
    })
}

/// Aggregate row of [`sweep_beta`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaSweepRow {
    pub beta: f64,
    /// Mean over all seeds, censored values included.
    pub mean_search_time: f64,
    /// Mean over the runs that produced an estimate at all.
    pub mean_final_e_est: f64,
    /// Fraction of seeds whose run reached the terminal range.
    pub termination_rate: f64,
    pub runs: usize,
    pub faults: usize,
}

/// Run every (weight, seed) pair and aggregate per weight. Faulted runs are
/// counted and folded in with their censored search time, not dropped.
pub fn sweep_beta(
    scenario: &Scenario,
    betas: &[f64],
    seeds: &[u64],
) -> Result<Vec<BetaSweepRow>, Error> {
    if betas.is_empty() {
        return Err(Error::InvalidInput(
            "weight sweep needs at least one weight".into(),
        ));
    }
    if seeds.is_empty() {
        return Err(Error::InvalidInput(
            "weight sweep needs at least one seed".into(),
        ));
    }
    let mut rows = Vec::with_capacity(betas.len());
    for &beta in betas {
        let mut time_sum = 0.0;
        let mut err_sum = 0.0;
        let mut err_count = 0usize;
        let mut terminations = 0usize;
        let mut faults = 0usize;
        for &seed in seeds {
            let mut sc = *scenario;
            sc.controller.beta = beta;
            sc.controller.noise.seed = seed;
            let trace = run(&sc)?;
            time_sum += trace.summary.search_time;
            if trace.summary.final_e_est.is_finite() {
                err_sum += trace.summary.final_e_est;
                err_count += 1;
            }
            if trace.summary.terminated {
                terminations += 1;
            }
            if trace.fault.is_some() {
                faults += 1;
            }
        }
        let n = seeds.len();
        rows.push(BetaSweepRow {
            beta,
            mean_search_time: time_sum / n as f64,
            mean_final_e_est: if err_count > 0 {
                err_sum / err_count as f64
            } else {
                f64::NAN
            },
            termination_rate: terminations as f64 / n as f64,
            runs: n,
            faults,
        });
    }
    Ok(rows)
}

/// Side-by-side estimation-error comparison of two traces.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    /// Length of the common prefix the deltas were computed over.
    pub steps_compared: usize,
    pub len_a: usize,
    pub len_b: usize,
    /// Full per-step estimation-error series of each trace.
    pub e_est_a: Vec<Option<f64>>,
    pub e_est_b: Vec<Option<f64>>,
    /// Largest |e_est_a - e_est_b| over the common prefix (0 if nothing
    /// was comparable).
    pub max_abs_delta: f64,
    /// First time each trace's estimation error dropped below 1 m.
    pub time_to_1m_a: Option<f64>,
    pub time_to_1m_b: Option<f64>,
}

/// Compare the estimation-error histories of two runs.
pub fn metrics_compare(
    a: &SimulationTrace,
    b: &SimulationTrace,
) -> Result<ComparisonReport, Error> {
    if a.h != b.h {
        return Err(Error::InvalidInput(format!(
            "traces have different sampling periods: {} vs {}",
            a.h, b.h
        )));
    }
    let series = |t: &SimulationTrace| t.records.iter().map(|r| r.e_est).collect::<Vec<_>>();
    let first_below_1m = |t: &SimulationTrace| {
        t.records
            .iter()
            .find(|r| r.e_est.is_some_and(|e| e < 1.0))
            .map(|r| r.t)
    };
    let e_est_a = series(a);
    let e_est_b = series(b);
    let steps_compared = e_est_a.len().min(e_est_b.len());
    let mut max_abs_delta = 0.0f64;
    for i in 0..steps_compared {
        if let (Some(x), Some(y)) = (e_est_a[i], e_est_b[i]) {
            max_abs_delta = max_abs_delta.max((x - y).abs());
        }
    }
    Ok(ComparisonReport {
        steps_compared,
        len_a: e_est_a.len(),
        len_b: e_est_b.len(),
        time_to_1m_a: first_below_1m(a),
        time_to_1m_b: first_below_1m(b),
        e_est_a,
        e_est_b,
        max_abs_delta,
    })
}

fn cell(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

/// Header row of [`write_csv`]; consumers key their column lookup off it.
pub const CSV_HEADER: &str =
    "k,t,x,y,theta,omega,measurement,p_hat_x,p_hat_y,e_est,r_hat,r_true,v_r_star,beta_used,f_at_star";

/// Serialize a trace as CSV: header row, one record per step, floats as
/// their shortest round-trip decimals, absent values as empty cells.
pub fn write_csv<W: Write>(trace: &SimulationTrace, out: &mut W) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in &trace.records {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.k,
            r.t,
            r.pose.x,
            r.pose.y,
            r.pose.theta,
            r.omega,
            r.measurement,
            cell(r.p_hat.map(|p| p.x)),
            cell(r.p_hat.map(|p| p.y)),
            cell(r.e_est),
            cell(r.r_hat),
            r.r_true,
            cell(r.v_r_star),
            r.beta_used,
            cell(r.f_at_star),
        )?;
    }
    Ok(())
}

/// [`write_csv`] into a `String`.
pub fn to_csv_string(trace: &SimulationTrace) -> String {
    let mut buf = Vec::new();
    write_csv(trace, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("CSV output is ASCII")
}

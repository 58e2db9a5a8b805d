//! Declarative scenario configs.
//!
//! A config file is the on-disk form of one [`Scenario`]: four sections
//! (`vehicle`, `noise`, `controller`, `scenario`) whose keys mirror the
//! library types field for field. TOML is the native encoding; a `.json`
//! extension switches to JSON with the same schema. Every key except
//! `noise.sigma` has a nominal default, so the smallest useful config is
//! two lines. Unknown keys are rejected rather than ignored.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use bearing_search::controller::{BetaSchedule, ControlMode, ControllerConfig};
use bearing_search::estimation::TransitionMode;
use bearing_search::geometry::Vec2;
use bearing_search::sensing::NoiseModel;
use bearing_search::simulator::Scenario;
use bearing_search::vehicle::VehicleParams;
use bearing_search::Error;

/// On-disk form of a full scenario. Field defaults reproduce the nominal
/// benchmark setup: a 4 m/s vehicle sampled every 0.25 s starting at the
/// origin, a target at (100, 100), a prior at (40, 80), unit weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfigFile {
    #[serde(default)]
    pub vehicle: VehicleSection,
    /// Required section: there is no defensible default noise level, so
    /// configs must state one (zero is accepted and means noiseless).
    pub noise: NoiseSection,
    #[serde(default)]
    pub controller: ControllerSection,
    #[serde(default)]
    pub scenario: ScenarioSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VehicleSection {
    /// Forward speed in m/s.
    #[serde(default = "defaults::v_c")]
    pub v_c: f64,
    /// Sampling period in s.
    #[serde(default = "defaults::h")]
    pub h: f64,
    /// Optional turn-rate saturation in rad/s.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_max: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSection {
    /// Bearing noise standard deviation in rad.
    pub sigma: f64,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControllerSection {
    #[serde(default)]
    pub mode: ModeName,
    #[serde(default = "defaults::beta")]
    pub beta: f64,
    #[serde(default)]
    pub beta_schedule: ScheduleName,
    #[serde(default)]
    pub local_transition_mode: TransitionName,
    /// Turn rate commanded at step zero, in rad/s.
    #[serde(default)]
    pub omega0: f64,
    /// `[x, y]` prior in world coordinates, or the string
    /// `"two-bearing-init"` to bootstrap from the first two bearings.
    #[serde(default)]
    pub initial_estimate: PriorSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSection {
    /// Initial vehicle position in m.
    #[serde(default)]
    pub p0: [f64; 2],
    /// Initial heading in rad.
    #[serde(default)]
    pub theta0: f64,
    /// True target position in m.
    #[serde(rename = "p_T", default = "defaults::p_t")]
    pub p_t: [f64; 2],
    #[serde(default = "defaults::max_steps")]
    pub max_steps: u64,
    /// The run stops when the true range drops below
    /// `terminal_range_factor * v_c * h`.
    #[serde(default = "defaults::terminal_range_factor")]
    pub terminal_range_factor: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeName {
    /// World-frame estimation with a GPS position fix.
    #[default]
    Global,
    /// Body-frame estimation from bearings and heading only.
    Local,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScheduleName {
    #[default]
    Constant,
    InverseRange,
    ProgressRatio,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransitionName {
    #[default]
    ExactRotation,
    FirstOrderRate,
}

/// Either explicit prior coordinates or the bootstrap keyword.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PriorSpec {
    Coords([f64; 2]),
    Named(String),
}

/// The one string [`PriorSpec::Named`] accepts.
pub const TWO_BEARING_INIT: &str = "two-bearing-init";

mod defaults {
    pub fn v_c() -> f64 {
        4.0
    }
    pub fn h() -> f64 {
        0.25
    }
    pub fn beta() -> f64 {
        1.0
    }
    pub fn p_t() -> [f64; 2] {
        [100.0, 100.0]
    }
    pub fn max_steps() -> u64 {
        4000
    }
    pub fn terminal_range_factor() -> f64 {
        1.0
    }
}

impl Default for VehicleSection {
    fn default() -> Self {
        VehicleSection {
            v_c: defaults::v_c(),
            h: defaults::h(),
            omega_max: None,
        }
    }
}

impl Default for ControllerSection {
    fn default() -> Self {
        ControllerSection {
            mode: ModeName::Global,
            beta: defaults::beta(),
            beta_schedule: ScheduleName::Constant,
            local_transition_mode: TransitionName::ExactRotation,
            omega0: 0.0,
            initial_estimate: PriorSpec::default(),
        }
    }
}

impl Default for ScenarioSection {
    fn default() -> Self {
        ScenarioSection {
            p0: [0.0, 0.0],
            theta0: 0.0,
            p_t: defaults::p_t(),
            max_steps: defaults::max_steps(),
            terminal_range_factor: defaults::terminal_range_factor(),
        }
    }
}

impl Default for PriorSpec {
    fn default() -> Self {
        PriorSpec::Coords([40.0, 80.0])
    }
}

/// Parse a config from text. `json` selects the JSON encoding; otherwise
/// the text is read as TOML.
pub fn parse(text: &str, json: bool) -> Result<RunConfigFile, Error> {
    if json {
        serde_json::from_str(text)
            .map_err(|e| Error::InvalidInput(format!("config does not parse as JSON: {e}")))
    } else {
        toml::from_str(text)
            .map_err(|e| Error::InvalidInput(format!("config does not parse as TOML: {e}")))
    }
}

/// Read and parse a config file, choosing the encoding by extension.
pub fn load(path: &Path) -> Result<RunConfigFile, Error> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read config {}: {e}", path.display())))?;
    let json = path
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("json"));
    parse(&text, json)
}

impl RunConfigFile {
    /// Serialize back to TOML. Parsing the output reproduces `self`
    /// exactly (the config grammar round-trips).
    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config schema is always TOML-serializable")
    }

    /// Materialize the executable scenario, running every library-side
    /// validation on the way.
    pub fn to_scenario(&self) -> Result<Scenario, Error> {
        let mut vehicle = VehicleParams::new(self.vehicle.v_c, self.vehicle.h)?;
        if let Some(omega_max) = self.vehicle.omega_max {
            vehicle = vehicle.with_omega_max(omega_max)?;
        }
        let noise = NoiseModel::new(self.noise.sigma, self.noise.seed)?;
        let initial_estimate = match &self.controller.initial_estimate {
            PriorSpec::Coords([x, y]) => Some(Vec2::new(*x, *y)),
            PriorSpec::Named(name) if name == TWO_BEARING_INIT => None,
            PriorSpec::Named(other) => {
                return Err(Error::InvalidInput(format!(
                    "initial_estimate must be [x, y] or \"{TWO_BEARING_INIT}\", got \"{other}\""
                )))
            }
        };
        let controller = ControllerConfig {
            mode: match self.controller.mode {
                ModeName::Global => ControlMode::GlobalGPS,
                ModeName::Local => ControlMode::LocalNoGPS,
            },
            beta: self.controller.beta,
            beta_schedule: match self.controller.beta_schedule {
                ScheduleName::Constant => BetaSchedule::Constant,
                ScheduleName::InverseRange => BetaSchedule::InverseRange,
                ScheduleName::ProgressRatio => BetaSchedule::ProgressRatio,
            },
            vehicle,
            noise,
            initial_estimate,
            local_transition_mode: match self.controller.local_transition_mode {
                TransitionName::ExactRotation => TransitionMode::ExactRotation,
                TransitionName::FirstOrderRate => TransitionMode::FirstOrderRate,
            },
            omega0: self.controller.omega0,
        };
        let mut scenario = Scenario::new(
            Vec2::new(self.scenario.p0[0], self.scenario.p0[1]),
            self.scenario.theta0,
            Vec2::new(self.scenario.p_t[0], self.scenario.p_t[1]),
            controller,
        );
        scenario.max_steps = self.scenario.max_steps;
        scenario.terminal_range_factor = self.scenario.terminal_range_factor;
        scenario.validate()?;
        Ok(scenario)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_fills_in_the_nominal_setup() {
        let cfg = parse("[noise]\nsigma = 0.02\n", false).unwrap();
        let sc = cfg.to_scenario().unwrap();
        assert_eq!(sc.controller.vehicle.v_c, 4.0);
        assert_eq!(sc.controller.vehicle.h, 0.25);
        assert_eq!(sc.controller.vehicle.omega_max, None);
        assert_eq!(sc.controller.beta, 1.0);
        assert_eq!(sc.controller.mode, ControlMode::GlobalGPS);
        assert_eq!(sc.controller.noise.sigma, 0.02);
        assert_eq!(sc.controller.noise.seed, 0);
        assert_eq!(sc.controller.initial_estimate, Some(Vec2::new(40.0, 80.0)));
        assert_eq!(sc.p0, Vec2::zero());
        assert_eq!(sc.p_t, Vec2::new(100.0, 100.0));
        assert_eq!(sc.max_steps, 4000);
        assert_eq!(sc.terminal_range(), 1.0);
    }

    #[test]
    fn sigma_is_the_one_required_key() {
        let err = parse("", false).unwrap_err();
        assert!(err.to_string().contains("noise"), "{err}");
        let err = parse("[noise]\nseed = 3\n", false).unwrap_err();
        assert!(err.to_string().contains("sigma"), "{err}");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = parse("[noise]\nsigma = 0.1\nsgima = 0.1\n", false).unwrap_err();
        assert!(err.to_string().contains("sgima"), "{err}");
        assert!(parse("[noise]\nsigma = 0.1\n[extra]\nx = 1\n", false).is_err());
    }

    #[test]
    fn json_encoding_parses_the_same_schema() {
        let toml_cfg = parse("[noise]\nsigma = 0.05\nseed = 9\n", false).unwrap();
        let json_cfg = parse(r#"{"noise": {"sigma": 0.05, "seed": 9}}"#, true).unwrap();
        assert_eq!(toml_cfg, json_cfg);
    }

    #[test]
    fn round_trip_is_a_fixed_point() {
        let text = r#"
            [vehicle]
            v_c = 3.0
            h = 0.5
            omega_max = 1.2

            [noise]
            sigma = 0.02
            seed = 17

            [controller]
            mode = "local"
            beta = 2.5
            beta_schedule = "inverse-range"
            local_transition_mode = "first-order-rate"
            omega0 = 0.3
            initial_estimate = "two-bearing-init"

            [scenario]
            p0 = [1.0, -2.0]
            theta0 = 0.1
            p_T = [50.0, 60.0]
            max_steps = 100
            terminal_range_factor = 2.0
        "#;
        let once = parse(text, false).unwrap();
        let twice = parse(&once.to_toml_string(), false).unwrap();
        assert_eq!(once, twice);
        // A defaulted config round-trips too (optional keys reappear as
        // their values, never as gaps that shift meaning).
        let sparse = parse("[noise]\nsigma = 0.0\n", false).unwrap();
        let again = parse(&sparse.to_toml_string(), false).unwrap();
        assert_eq!(sparse, again);
    }

    #[test]
    fn prior_keyword_maps_to_bootstrap() {
        let cfg = parse(
            "[noise]\nsigma = 0.0\n[controller]\ninitial_estimate = \"two-bearing-init\"\n",
            false,
        )
        .unwrap();
        assert_eq!(cfg.to_scenario().unwrap().controller.initial_estimate, None);

        let bad = parse(
            "[noise]\nsigma = 0.0\n[controller]\ninitial_estimate = \"guess\"\n",
            false,
        )
        .unwrap();
        assert!(bad.to_scenario().is_err());
    }

    #[test]
    fn library_validation_runs_at_conversion() {
        let negative_sigma = parse("[noise]\nsigma = -0.1\n", false).unwrap();
        assert!(negative_sigma.to_scenario().is_err());
        let bad_speed = parse("[vehicle]\nv_c = 0.0\n[noise]\nsigma = 0.0\n", false).unwrap();
        assert!(bad_speed.to_scenario().is_err());
    }
}

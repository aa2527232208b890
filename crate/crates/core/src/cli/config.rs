//! Scenario config files.
//!
//! TOML with sections `scenario`, `world`, `robot`, `human` and the optional
//! `thresholds`, `planner`, `human_model`. Unknown keys are rejected.
//! Overrides use `section.key=value`; a bare `key=value` is accepted when
//! exactly one section has that key.

use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use crate::assessor::Thresholds;
use crate::error::{Error, Result};
use crate::geometry::{CorridorWorld, Pose};
use crate::planner::PlannerConfig;
use crate::sim::{HumanModelConfig, HumanPolicy, ScenarioConfig};

/// The built-in scenarios, in report order.
pub const BUILTIN_SCENARIOS: [(&str, &str); 4] = [
    ("open_minimal", include_str!("../../scenarios/open_minimal.toml")),
    ("open_facilitating", include_str!("../../scenarios/open_facilitating.toml")),
    ("narrow_minimal", include_str!("../../scenarios/narrow_minimal.toml")),
    ("narrow_facilitating", include_str!("../../scenarios/narrow_facilitating.toml")),
];

pub fn builtin_scenario(name: &str) -> Option<&'static str> {
    BUILTIN_SCENARIOS.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSection {
    pub name: String,
    pub human_policy: HumanPolicy,
    #[serde(default = "default_tick_dt")]
    pub tick_dt: f64,
    #[serde(default = "default_max_ticks")]
    pub max_ticks: usize,
    #[serde(default = "default_goal_tolerance")]
    pub goal_tolerance: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub noise_std: f64,
}

fn default_tick_dt() -> f64 {
    0.25
}

fn default_max_ticks() -> usize {
    240
}

fn default_goal_tolerance() -> f64 {
    0.3
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorldSection {
    pub length: f64,
    pub width: f64,
    #[serde(default = "default_wall_thickness")]
    pub wall_thickness: f64,
}

fn default_wall_thickness() -> f64 {
    0.2
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentSection {
    /// `[x, y, theta]`
    pub start: [f64; 3],
    pub goal: [f64; 3],
    pub radius: f64,
    #[serde(default = "default_speed")]
    pub speed: f64,
}

fn default_speed() -> f64 {
    0.5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub scenario: ScenarioSection,
    pub world: WorldSection,
    pub robot: AgentSection,
    pub human: AgentSection,
    #[serde(default)]
    pub thresholds: Thresholds,
    #[serde(default)]
    pub planner: PlannerConfig,
    #[serde(default)]
    pub human_model: HumanModelConfig,
}

fn pose(p: [f64; 3]) -> Pose {
    Pose::new(p[0], p[1], p[2])
}

impl ConfigFile {
    pub fn into_scenario(self) -> Result<ScenarioConfig> {
        let w = &self.world;
        for (field, v) in [
            ("world.length", w.length),
            ("world.width", w.width),
            ("world.wall_thickness", w.wall_thickness),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config(field, format!("must be > 0, got {v}")));
            }
        }
        let world = CorridorWorld::straight(w.length, w.width, w.wall_thickness)?;
        let cfg = ScenarioConfig {
            name: self.scenario.name,
            world,
            robot_start: pose(self.robot.start),
            robot_goal: pose(self.robot.goal),
            human_start: pose(self.human.start),
            human_goal: pose(self.human.goal),
            robot_radius: self.robot.radius,
            human_radius: self.human.radius,
            robot_speed: self.robot.speed,
            human_speed: self.human.speed,
            human_policy: self.scenario.human_policy,
            thresholds: self.thresholds,
            planner: self.planner,
            human_model: self.human_model,
            tick_dt: self.scenario.tick_dt,
            max_ticks: self.scenario.max_ticks,
            goal_tolerance: self.scenario.goal_tolerance,
            seed: self.scenario.seed,
            noise_std: self.scenario.noise_std,
        };
        cfg.validate().map_err(|e| match e {
            Error::InvalidInput { field, message } => Error::Config { field, message },
            other => other,
        })?;
        Ok(cfg)
    }
}

/// Turns a toml deserialization error into a field-level config error.
fn schema_error(e: toml::de::Error) -> Error {
    let message = e.message().to_owned();
    let field = message
        .split('`')
        .nth(1)
        .map(str::to_owned)
        .unwrap_or_else(|| "config".to_owned());
    Error::config(field, message)
}

fn parse_table(text: &str) -> Result<Table> {
    text.parse::<Table>().map_err(schema_error)
}

fn parse_value(raw: &str) -> Value {
    format!("v = {raw}")
        .parse::<Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(raw.to_owned()))
}

/// Applies `key=value` overrides to a fully populated config table.
pub fn apply_overrides(table: &mut Table, overrides: &[String]) -> Result<()> {
    for o in overrides {
        let (key, raw) = o
            .split_once('=')
            .ok_or_else(|| Error::config(o.clone(), "override must look like key=value"))?;
        let key = key.trim();
        let (section, name) = match key.split_once('.') {
            Some((s, n)) => (s.to_owned(), n.to_owned()),
            None => {
                let owners: Vec<&String> = table
                    .iter()
                    .filter(|(_, v)| v.as_table().is_some_and(|t| t.contains_key(key)))
                    .map(|(k, _)| k)
                    .collect();
                match owners.as_slice() {
                    [one] => ((*one).clone(), key.to_owned()),
                    [] => return Err(Error::config(key, "unknown override key")),
                    _ => return Err(Error::config(key, "ambiguous override key; use section.key")),
                }
            }
        };
        let sec = table
            .get_mut(&section)
            .and_then(Value::as_table_mut)
            .ok_or_else(|| Error::config(key, format!("unknown section `{section}`")))?;
        if !sec.contains_key(&name) {
            return Err(Error::config(key, "unknown override key"));
        }
        sec.insert(name, parse_value(raw.trim()));
    }
    Ok(())
}

/// Parses config text, applies overrides and validates the result.
pub fn load_config(text: &str, overrides: &[String]) -> Result<ScenarioConfig> {
    let file: ConfigFile = parse_table(text)?.try_into().map_err(schema_error)?;
    if overrides.is_empty() {
        return file.into_scenario();
    }
    let mut full = Table::try_from(&file).map_err(|e| Error::config("config", e.to_string()))?;
    apply_overrides(&mut full, overrides)?;
    let file: ConfigFile = full.try_into().map_err(schema_error)?;
    file.into_scenario()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_load() {
        for (name, text) in BUILTIN_SCENARIOS {
            let cfg = load_config(text, &[]).unwrap();
            assert_eq!(cfg.name, name);
        }
    }

    #[test]
    fn negative_width_names_the_field() {
        let text = builtin_scenario("open_minimal").unwrap().replace("width = 4.0", "width = -4.0");
        let e = load_config(&text, &[]).unwrap_err();
        assert!(matches!(&e, Error::Config { field, .. } if field == "world.width"), "{e}");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = builtin_scenario("open_minimal").unwrap().replace("tau_oh = 1.0", "tau_ohh = 1.0");
        let e = load_config(&text, &[]).unwrap_err();
        assert!(e.to_string().contains("tau_ohh"), "{e}");
    }

    #[test]
    fn overrides_resolve_bare_and_dotted_keys() {
        let text = builtin_scenario("open_minimal").unwrap();
        let cfg = load_config(text, &["gamma=0.5".into(), "planner.max_iterations=7".into()]).unwrap();
        assert_eq!(cfg.thresholds.gamma, 0.5);
        assert_eq!(cfg.planner.max_iterations, 7);
        assert!(load_config(text, &["radius=0.3".into()]).is_err());
        assert!(load_config(text, &["nonsense=1".into()]).is_err());
        let cfg = load_config(text, &["scenario.name=other".into()]).unwrap();
        assert_eq!(cfg.name, "other");
    }
}

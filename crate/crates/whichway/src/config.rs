//! JSON run configuration.
//!
//! A config file names a `kind` and overrides any subset of that kind's
//! defaults. Nested objects merge key by key; `wires` is replaced whole and
//! also accepts the shorthand strings `"auto"` and `"none"`.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use whichway_core::scenario::{ScenarioConfig, ScenarioKind, WireSpec};

use crate::error::{AppError, Result};

/// Environment variable that relocates relative output directories.
pub const OUTPUT_ROOT_ENV: &str = "WHICHWAY_OUTPUT_ROOT";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(flatten)]
    pub scenario: ScenarioConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn defaults(kind: ScenarioKind) -> Self {
        RunConfig {
            scenario: ScenarioConfig::defaults(kind),
            output_dir: None,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let user: Value = serde_json::from_str(text).map_err(|e| AppError::Config(e.to_string()))?;
        let Value::Object(user) = user else {
            return Err(AppError::Config("top level must be an object".into()));
        };
        let kind = user
            .get("kind")
            .ok_or_else(|| AppError::Config("missing `kind`".into()))
            .and_then(|k| serde_json::from_value::<ScenarioKind>(k.clone()).map_err(|e| AppError::Config(format!("kind: {e}"))))?;

        let mut merged = serde_json::to_value(RunConfig::defaults(kind))?;
        for (key, value) in user {
            match key.as_str() {
                "output_dir" => {
                    merged["output_dir"] = value;
                }
                "wires" => {
                    merged["wires"] = wires_shorthand(value)?;
                }
                _ => {
                    let slot = merged
                        .get_mut(&key)
                        .ok_or_else(|| AppError::Config(format!("unknown field `{key}`")))?;
                    merge(slot, value, &key)?;
                }
            }
        }
        let cfg: RunConfig = serde_json::from_value(merged).map_err(|e| AppError::Config(e.to_string()))?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| AppError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.scenario.validate().map_err(AppError::Invalid)
    }

    /// Canonical text; parsing it back yields an equal config.
    pub fn to_json(&self) -> Result<String> {
        Ok(crate::format::to_json_string(self)?)
    }

    /// Where this run's artifacts go. Relative directories hang off
    /// `$WHICHWAY_OUTPUT_ROOT` when it is set, else the working directory.
    pub fn resolve_output_dir(&self, fallback_name: &str) -> PathBuf {
        let dir = self
            .output_dir
            .clone()
            .unwrap_or_else(|| PathBuf::from("runs").join(fallback_name));
        if dir.is_absolute() {
            return dir;
        }
        match std::env::var_os(OUTPUT_ROOT_ENV) {
            Some(root) if !root.is_empty() => PathBuf::from(root).join(dir),
            _ => dir,
        }
    }
}

fn wires_shorthand(value: Value) -> Result<Value> {
    let spec = match value.as_str() {
        Some("auto") => WireSpec::auto(),
        Some("none") => WireSpec::None,
        Some(other) => return Err(AppError::Config(format!("wires: unknown shorthand `{other}`"))),
        None => return Ok(value),
    };
    Ok(serde_json::to_value(spec)?)
}

fn merge(slot: &mut Value, value: Value, path: &str) -> Result<()> {
    match (slot, value) {
        (Value::Object(base), Value::Object(over)) => merge_objects(base, over, path),
        (slot, value) => {
            *slot = value;
            Ok(())
        }
    }
}

fn merge_objects(base: &mut Map<String, Value>, over: Map<String, Value>, path: &str) -> Result<()> {
    for (key, value) in over {
        let inner = format!("{path}.{key}");
        let slot = base
            .get_mut(&key)
            .ok_or_else(|| AppError::Config(format!("unknown field `{inner}`")))?;
        merge(slot, value, &inner)?;
    }
    Ok(())
}

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::Failure;

/// Every key a config file may set.
const KNOWN_KEYS: &[&str] = &[
    "mu", "delta", "seed", "out_path", "format", "workers", "t", "x0", "grid", "kind", "n_samples", "a", "y", "eps",
    "step", "cap", "t_max", "n_steps", "x", "method", "check", "mc_n", "mc_step", "mass_tol", "residual_tol",
    "mc_tol", "T", "t_grid", "only", "skip", "alpha", "n_moment", "n_hitting", "hitting_step", "solver_steps",
    "suite",
];

/// The JSON object from `--config`, or an empty one.
pub fn load(path: Option<&Path>) -> Result<Map<String, Value>, Failure> {
    let Some(path) = path else {
        return Ok(Map::new());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read config {}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| Failure::usage(format!("config {} is not valid JSON: {e}", path.display())))?;
    let Value::Object(map) = value else {
        return Err(Failure::usage(format!("config {} must hold a JSON object", path.display())));
    };
    if let Some(bad) = map.keys().find(|k| !KNOWN_KEYS.contains(&k.as_str())) {
        return Err(Failure::usage(format!(
            "unknown config key `{bad}`; known keys: {}",
            KNOWN_KEYS.join(", ")
        )));
    }
    Ok(map)
}

/// Values from the file, replaced by every flag given on the command line.
pub fn overlay<T: Serialize + DeserializeOwned>(flags: &T, file: &Map<String, Value>) -> Result<T, Failure> {
    let mut merged = file.clone();
    merged.remove("suite");
    if let Value::Object(given) = serde_json::to_value(flags).map_err(|e| Failure::usage(e.to_string()))? {
        for (k, v) in given {
            if !v.is_null() {
                merged.insert(k, v);
            }
        }
    }
    serde_json::from_value(Value::Object(merged)).map_err(|e| Failure::usage(format!("config: {e}")))
}

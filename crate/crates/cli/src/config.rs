use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

/// Flag structs that accept `--config <json>`.
pub trait Configurable: Serialize + DeserializeOwned {
    fn config_path(&self) -> Option<&Path>;
}

/// Parses a flag value as inline JSON, or as the path of a JSON file.
pub fn json_arg(s: &str) -> Result<Value, String> {
    let trimmed = s.trim_start();
    let text = if trimmed.starts_with('{') || trimmed.starts_with('[') {
        s.to_string()
    } else {
        std::fs::read_to_string(s).map_err(|e| format!("{s}: {e}"))?
    };
    serde_json::from_str(&text).map_err(|e| e.to_string())
}

pub fn read_object(path: &Path) -> Result<Map<String, Value>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    match serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))? {
        Value::Object(map) => Ok(map),
        _ => bail!("{} must hold a JSON object", path.display()),
    }
}

/// Overrides the serialized flags with the keys of the config file.
/// Keys are flag names with underscores (`max_t` for `--max-t`).
pub fn merge<T: Configurable>(flags: T) -> Result<T> {
    let Some(path) = flags.config_path().map(Path::to_path_buf) else {
        return Ok(flags);
    };
    let Value::Object(mut base) = serde_json::to_value(&flags)? else {
        unreachable!("flag structs serialize to objects")
    };
    for (key, value) in read_object(&path)? {
        if !base.contains_key(&key) {
            let known: Vec<&String> = base.keys().collect();
            bail!("unknown config key `{key}` (expected one of {known:?})");
        }
        base.insert(key, value);
    }
    serde_json::from_value(Value::Object(base)).context("config values")
}

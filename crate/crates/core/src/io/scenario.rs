//! TOML scenario files.

use std::path::Path;

use sha2::{Digest, Sha256};

use crate::sim::ScenarioConfig;
use crate::{Error, Result};

/// Parses and validates a scenario document.
pub fn parse_scenario(text: &str) -> Result<ScenarioConfig> {
    let config: ScenarioConfig = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    config.validate()?;
    Ok(config)
}

pub fn load_scenario(path: &Path) -> Result<ScenarioConfig> {
    parse_scenario(&std::fs::read_to_string(path)?)
}

pub fn to_toml_string(config: &ScenarioConfig) -> Result<String> {
    toml::to_string_pretty(config).map_err(|e| Error::Parse(e.to_string()))
}

pub fn save_scenario(config: &ScenarioConfig, path: &Path) -> Result<()> {
    std::fs::write(path, to_toml_string(config)?)?;
    Ok(())
}

/// SHA-256 of the expanded scenario with every default written out, so
/// scenarios that differ only in omitted defaults, generated-vs-explicit
/// POIs or list order hash the same.
pub fn canonical_hash(config: &ScenarioConfig) -> String {
    let text = toml::to_string(&config.expanded()).expect("scenario serializes");
    hex::encode(Sha256::digest(text.as_bytes()))
}

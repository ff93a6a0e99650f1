use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::io::scenario::canonical_hash;
use crate::sim::ScenarioConfig;
use crate::Result;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub scenario_path: PathBuf,
    pub output_dir: PathBuf,
    pub tool_version: String,
    pub config_hash: String,
    pub master_seed: u64,
    pub wall_clock_seconds: f64,
    pub files: Vec<String>,
}

impl RunManifest {
    pub fn new(
        config: &ScenarioConfig,
        scenario_path: &Path,
        outdir: &Path,
        files: Vec<PathBuf>,
        elapsed: Duration,
    ) -> Self {
        Self {
            scenario_path: scenario_path.to_path_buf(),
            output_dir: outdir.to_path_buf(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config_hash: canonical_hash(config),
            master_seed: config.master_seed,
            wall_clock_seconds: elapsed.as_secs_f64(),
            files: files
                .iter()
                .filter_map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
                .collect(),
        }
    }

    pub fn write(&self, outdir: &Path) -> Result<PathBuf> {
        let path = outdir.join(MANIFEST_FILE);
        std::fs::write(&path, serde_json::to_string_pretty(self)? + "\n")?;
        Ok(path)
    }
}

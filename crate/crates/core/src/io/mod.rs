//! Scenario files, telemetry export, plot data and run manifests.

pub mod export;
pub mod manifest;
pub mod plots;
pub mod scenario;

use std::path::Path;
use std::time::Instant;

pub use export::{write_prediction, write_telemetry};
pub use manifest::RunManifest;
pub use plots::{emit_plots, emit_plots_from_dir};
pub use scenario::{canonical_hash, load_scenario, parse_scenario, save_scenario, to_toml_string};

use crate::sim::{run_scenario, RunFailure, ScenarioConfig};

/// Runs `config` and writes telemetry, plot data and the manifest into
/// `outdir`. A failed run still writes the partial telemetry.
pub fn run(
    config: &ScenarioConfig,
    scenario_path: &Path,
    outdir: &Path,
) -> Result<RunManifest, RunFailure> {
    let started = Instant::now();
    std::fs::create_dir_all(outdir).map_err(crate::Error::from)?;
    match run_scenario(config) {
        Ok(out) => {
            let mut files = write_telemetry(&out.log, outdir)?;
            files.extend(write_prediction(&out.prediction, outdir)?);
            files.extend(emit_plots(&out.log, outdir)?);
            let manifest =
                RunManifest::new(config, scenario_path, outdir, files, started.elapsed());
            manifest.write(outdir)?;
            Ok(manifest)
        }
        Err(failure) => {
            write_telemetry(&failure.partial, outdir).map_err(RunFailure::from)?;
            Err(failure)
        }
    }
}

/// Serde adapter storing a [`crate::Vec3`] as a three-element array.
pub mod vec3 {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::Vec3;

    pub fn serialize<S: Serializer>(v: &Vec3, s: S) -> Result<S::Ok, S::Error> {
        [v.x, v.y, v.z].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec3, D::Error> {
        let [x, y, z] = <[f64; 3]>::deserialize(d)?;
        Ok(Vec3::new(x, y, z))
    }
}

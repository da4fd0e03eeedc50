use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::report::OutDir;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputFile {
    pub path: String,
    pub houses: usize,
    pub records: usize,
}

/// Written last by every stage. `config` together with the versions is
/// enough to repeat the run; `run_config.toml` holds the same settings in
/// the form `--config` reads.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub core_version: String,
    pub stage: String,
    pub config: RunConfig,
    pub config_sha256: String,
    pub inputs: Vec<InputFile>,
    /// File name to row count.
    pub outputs: BTreeMap<String, usize>,
}

impl Manifest {
    pub fn new(stage: &str, config: &RunConfig, inputs: Vec<InputFile>) -> Manifest {
        Manifest {
            tool: "thermokit".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            core_version: thermokit_core::VERSION.into(),
            stage: stage.into(),
            config: config.clone(),
            config_sha256: config.hash(),
            inputs,
            outputs: BTreeMap::new(),
        }
    }

    pub fn write(mut self, out: &mut OutDir) -> Result<()> {
        let toml_path = out.path("run_config.toml");
        std::fs::write(&toml_path, self.config.to_toml()).map_err(|e| Error::io(&toml_path, e))?;
        out.note("run_config.toml", 1);
        self.outputs = out.rows.clone();
        out.json("manifest.json", &self)
    }

    pub fn load(path: &std::path::Path) -> Result<Manifest> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }
}

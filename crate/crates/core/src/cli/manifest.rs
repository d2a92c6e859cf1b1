//! Run manifests written next to every output.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config_file::ScenarioFile;
use super::CliError;

pub const GAMMA_S_AVERAGING: &str =
    "linear mean of gamma_s over all trials (outage and infeasible trials contribute 0), reported in dB";
pub const MEAN_B_AVERAGING: &str = "mean of b over all trials (infeasible trials contribute 0)";
pub const CI_METHOD: &str = "normal approximation, 1.96*sqrt(p(1-p)/trials)";

/// Conventions that affect how the numbers should be read.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Conventions {
    pub gamma_s_averaging: String,
    pub mean_b_averaging: String,
    pub ci95: String,
    pub pairing: String,
}

impl Default for Conventions {
    fn default() -> Self {
        Self {
            gamma_s_averaging: GAMMA_S_AVERAGING.into(),
            mean_b_averaging: MEAN_B_AVERAGING.into(),
            ci95: CI_METHOD.into(),
            pairing: "paired".into(),
        }
    }
}

/// Everything needed to reproduce one command invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub timestamp: String,
    pub output: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub master_seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub power_grid_dbm: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub schemes: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub inputs: Vec<String>,
    pub conventions: Conventions,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<ScenarioFile>,
}

impl RunManifest {
    pub fn new(command: &str, output: &Path) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            output: output.display().to_string(),
            master_seed: None,
            trials: None,
            power_grid_dbm: Vec::new(),
            schemes: Vec::new(),
            inputs: Vec::new(),
            conventions: Conventions::default(),
            config: None,
        }
    }

    /// Sidecar path: `<output>.manifest.toml` (or `<dir>/manifest.toml` for directories).
    pub fn path_for(output: &Path) -> PathBuf {
        if output.is_dir() {
            return output.join("manifest.toml");
        }
        let mut name = output.as_os_str().to_owned();
        name.push(".manifest.toml");
        PathBuf::from(name)
    }

    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Io(format!("cannot encode manifest: {e}")))
    }

    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Input(format!("invalid manifest: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read manifest {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn write_beside(&self, output: &Path) -> Result<PathBuf, CliError> {
        let path = Self::path_for(output);
        std::fs::write(&path, self.to_toml()?)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_round_trip() {
        let mut m = RunManifest::new("simulate", Path::new("out.csv"));
        m.master_seed = Some(42);
        m.trials = Some(1000);
        m.power_grid_dbm = vec![0.0, 5.0];
        m.schemes = vec!["sjas".into()];
        m.config = Some(ScenarioFile::reference());
        let text = m.to_toml().unwrap();
        assert_eq!(RunManifest::from_toml(&text).unwrap(), m);
    }

    #[test]
    fn sidecar_name() {
        assert_eq!(
            RunManifest::path_for(Path::new("/tmp/x/out.csv")),
            PathBuf::from("/tmp/x/out.csv.manifest.toml")
        );
    }
}

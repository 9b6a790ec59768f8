//! Record of what a command ran and wrote.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use super::config::serialize_config;
use crate::error::{Error, Result};
use crate::experiments::ExperimentConfig;

#[derive(Clone, Debug, PartialEq)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub config: ExperimentConfig,
    /// Seconds since the Unix epoch when the run started.
    pub started: u64,
    pub wall_seconds: f64,
    pub files: Vec<PathBuf>,
    /// One line per headline quantity of the run.
    pub summary: Vec<String>,
}

impl RunManifest {
    pub fn start(command: &str, config: &ExperimentConfig) -> Self {
        RunManifest {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config: config.clone(),
            started: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
            wall_seconds: 0.0,
            files: Vec::new(),
            summary: Vec::new(),
        }
    }

    pub fn render(&self) -> String {
        let mut out = format!(
            "command = {}\nversion = {}\nstarted = {}\nwall_seconds = {:.3}\n",
            self.command, self.version, self.started, self.wall_seconds
        );
        for f in &self.files {
            out.push_str(&format!("file = {}\n", f.display()));
        }
        for s in &self.summary {
            out.push_str(&format!("result = {s}\n"));
        }
        out.push_str("\n[config]\n");
        out.push_str(&serialize_config(&self.config));
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.render()).map_err(|e| Error::io(path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_lists_files_and_echoes_the_config() {
        let mut m = RunManifest::start("simulate", &ExperimentConfig::default());
        m.files.push(PathBuf::from("energy.csv"));
        m.summary.push("audit = 0".into());
        let text = m.render();
        assert!(text.contains("command = simulate"));
        assert!(text.contains("file = energy.csv"));
        assert!(text.contains("result = audit = 0"));
        let config = text.split("[config]\n").nth(1).unwrap();
        let back = super::super::config::parse_config_str(config, Path::new("m")).unwrap();
        assert_eq!(back, ExperimentConfig::default());
    }
}

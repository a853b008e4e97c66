//! CSV files with a one-line metadata header, and JSON sidecars.

use std::fmt::Write as _;
use std::path::PathBuf;

use serde::Serialize;

use crate::config::{ConfigError, RunConfig};

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Serialize)]
struct Sidecar<'a, R: Serialize> {
    artifact_version: &'static str,
    command: &'static str,
    /// Companion data file, if any.
    data: Option<String>,
    config: &'a RunConfig,
    result: &'a R,
}

pub struct Artifacts<'a> {
    command: &'static str,
    config: &'a RunConfig,
}

fn io_error(path: &std::path::Path, e: std::io::Error) -> ConfigError {
    ConfigError {
        key: "out".into(),
        reason: format!("{}: {e}", path.display()),
    }
}

impl<'a> Artifacts<'a> {
    pub fn new(command: &'static str, config: &'a RunConfig) -> Result<Self, ConfigError> {
        std::fs::create_dir_all(&config.out).map_err(|e| io_error(&config.out, e))?;
        Ok(Self { command, config })
    }

    fn write(&self, name: &str, text: &str) -> Result<PathBuf, ConfigError> {
        let path = self.config.out.join(name);
        std::fs::write(&path, text).map_err(|e| io_error(&path, e))?;
        Ok(path)
    }

    fn sidecar<R: Serialize>(&self, data: Option<String>, result: &R) -> String {
        let sidecar = Sidecar {
            artifact_version: ARTIFACT_VERSION,
            command: self.command,
            data,
            config: self.config,
            result,
        };
        let mut text = serde_json::to_string_pretty(&sidecar).expect("sidecar serializes");
        text.push('\n');
        text
    }

    /// `<stem>.csv` plus `<stem>.json` carrying the config and `summary`.
    pub fn csv<const N: usize, R: Serialize>(
        &self,
        stem: &str,
        header: &[&str; N],
        rows: impl Iterator<Item = [f64; N]>,
        summary: &R,
    ) -> Result<Vec<PathBuf>, crate::CliError> {
        let mut text = format!("# qaperture {ARTIFACT_VERSION} command={}", self.command);
        for (k, v) in self.config.pairs() {
            write!(text, " {k}={v}").unwrap();
        }
        text.push('\n');
        text.push_str(&header.join(","));
        text.push('\n');
        for row in rows {
            let cells: Vec<String> = row.iter().map(f64::to_string).collect();
            text.push_str(&cells.join(","));
            text.push('\n');
        }
        let name = format!("{stem}.csv");
        let csv = self.write(&name, &text)?;
        let json = self.write(&format!("{stem}.json"), &self.sidecar(Some(name), summary))?;
        Ok(vec![csv, json])
    }

    /// `<stem>.json` carrying the config and `result`.
    pub fn json<R: Serialize>(&self, stem: &str, result: &R) -> Result<Vec<PathBuf>, crate::CliError> {
        Ok(vec![self.write(&format!("{stem}.json"), &self.sidecar(None, result))?])
    }
}

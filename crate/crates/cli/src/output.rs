//! Artifact directory: CSV and JSON files, the check summary and the manifest.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use crate::config::Config;
use crate::error::CliError;

/// One measured quantity against its threshold.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    /// `"<="` or `">="`.
    pub relation: &'static str,
    pub pass: bool,
}

pub fn below(name: impl Into<String>, value: f64, limit: f64) -> Check {
    Check { name: name.into(), value, limit, relation: "<=", pass: value <= limit }
}

pub fn above(name: impl Into<String>, value: f64, limit: f64) -> Check {
    Check { name: name.into(), value, limit, relation: ">=", pass: value >= limit }
}

pub struct Output {
    dir: PathBuf,
    files: Vec<String>,
    checks: Vec<Check>,
    provenance: serde_json::Map<String, Value>,
}

impl Output {
    pub fn create(dir: &Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir)?;
        Ok(Output { dir: dir.to_path_buf(), files: Vec::new(), checks: Vec::new(), provenance: Default::default() })
    }

    pub fn checks(&self) -> &[Check] {
        &self.checks
    }

    pub fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn tag(&mut self, key: &str, value: impl Into<Value>) {
        self.provenance.insert(key.into(), value.into());
    }

    /// Opens `name` for writing and records it in the manifest.
    pub fn file(&mut self, name: &str) -> Result<BufWriter<File>, CliError> {
        if !self.files.iter().any(|f| f == name) {
            self.files.push(name.to_string());
        }
        Ok(BufWriter::new(File::create(self.dir.join(name))?))
    }

    pub fn csv<F>(&mut self, name: &str, write: F) -> Result<(), CliError>
    where
        F: FnOnce(&mut BufWriter<File>) -> sm_tomo::Result<()>,
    {
        let mut w = self.file(name)?;
        write(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn json(&mut self, name: &str, value: &impl Serialize) -> Result<(), CliError> {
        let mut w = self.file(name)?;
        serde_json::to_writer_pretty(&mut w, value)?;
        writeln!(w)?;
        w.flush()?;
        Ok(())
    }

    /// Writes `summary.json` and `manifest.json`. Nothing machine-specific
    /// goes into either, so reruns reproduce them byte for byte.
    pub fn finish(mut self, command: &str, config: &Config, refine: u32) -> Result<bool, CliError> {
        let failing: Vec<&str> = self.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
        let pass = failing.is_empty();
        let summary = json!({
            "command": command,
            "pass": pass,
            "failing": failing,
            "checks": self.checks,
        });
        self.json("summary.json", &summary)?;

        let mut effective = config.clone();
        effective.experiment.out = PathBuf::from(".");
        let manifest = json!({
            "command": command,
            "generator": concat!("smtomo ", env!("CARGO_PKG_VERSION")),
            "seed": config.experiment.seed,
            "refine": refine,
            "config": effective,
            "files": self.files,
            "provenance": self.provenance,
        });
        let mut w = BufWriter::new(File::create(self.dir.join("manifest.json"))?);
        serde_json::to_writer_pretty(&mut w, &manifest)?;
        writeln!(w)?;
        w.flush()?;
        Ok(pass)
    }
}

//! Result bundle: a machine-readable JSON summary plus CSV tables, every
//! file stamped with the build version, the config hash, and the master
//! seed.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{Context, Result};
use serde_json::{json, Value};

use crate::config::ExperimentSpec;
use burgers_spde::report::Table;

pub const BUILD_VERSION: &str = env!("BUILD_GIT_DESCRIBE");

pub struct ResultBundle {
    pub summary: Value,
    pub tables: Vec<Table>,
    pub ok: bool,
}

impl ResultBundle {
    pub fn new(subcommand: &str, spec: &ExperimentSpec, body: Value, ok: bool, elapsed: Duration) -> Result<Self> {
        let spec_echo: Value = serde_json::to_value(spec).context("spec echo")?;
        let summary = json!({
            "subcommand": subcommand,
            "experiment": spec.name,
            "version": BUILD_VERSION,
            "spec_hash": spec.hash(),
            "master_seed": spec.master_seed,
            "workers": spec.workers,
            "ok": ok,
            "wall_clock_seconds": elapsed.as_secs_f64(),
            "result": body,
            "spec": spec_echo,
        });
        Ok(Self { summary, tables: Vec::new(), ok })
    }

    pub fn with_tables(mut self, tables: Vec<Table>) -> Self {
        self.tables = tables;
        self
    }

    /// Writes summary.json and one CSV per table into `dir`.
    pub fn write(&self, dir: &Path, spec: &ExperimentSpec) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let mut written = Vec::new();
        let summary_path = dir.join("summary.json");
        fs::write(&summary_path, serde_json::to_string_pretty(&self.summary)?)
            .with_context(|| format!("writing {}", summary_path.display()))?;
        written.push(summary_path);
        for table in &self.tables {
            let path = dir.join(format!("{}.csv", table.name));
            let mut text = String::new();
            text.push_str(&format!("# version: {}\n", BUILD_VERSION));
            text.push_str(&format!("# spec_hash: {}\n", spec.hash()));
            text.push_str(&format!("# master_seed: {}\n", spec.master_seed));
            text.push_str(&table.to_csv());
            fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
            written.push(path);
        }
        Ok(written)
    }
}

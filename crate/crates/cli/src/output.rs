//! Tables, summaries and manifests written by a scenario run.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::config::ScenarioConfig;

/// Long-format table destined for one CSV file.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&'static str]) -> Self {
        Table { name: name.to_string(), header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| *h == name)
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
    }
}

/// Shortest representation that parses back to the same value.
pub fn num(x: f64) -> String {
    format!("{x}")
}

/// Seed used for one realization of one network.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeedRecord {
    pub network: String,
    pub realization: usize,
    pub seed: u64,
    /// Draws rejected because the graph was disconnected.
    pub redraws: usize,
}

#[derive(Clone, Debug, Default)]
pub struct ScenarioOutput {
    pub tables: Vec<Table>,
    pub summary: Map<String, Value>,
    /// Further files, as (name, contents).
    pub files: Vec<(String, String)>,
    pub seeds: Vec<SeedRecord>,
    pub warnings: Vec<String>,
}

impl ScenarioOutput {
    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OutputFile {
    pub file: String,
    pub sha256: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Manifest {
    pub scenario: String,
    pub code_version: String,
    pub config_sha256: String,
    /// The effective config, after command-line overrides.
    pub config: ScenarioConfig,
    pub workers: usize,
    pub seeds: Vec<SeedRecord>,
    pub warnings: Vec<String>,
    pub outputs: Vec<OutputFile>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Writes every table as `<name>.csv`, the summary as `summary.json`, the
/// extra files and finally `manifest.json` into `dir`.
pub fn write(dir: &Path, cfg: &ScenarioConfig, workers: usize, out: &ScenarioOutput) -> std::io::Result<(PathBuf, Manifest)> {
    fs::create_dir_all(dir)?;
    let mut outputs = Vec::new();
    let mut put = |name: String, text: String| -> std::io::Result<()> {
        fs::write(dir.join(&name), text.as_bytes())?;
        outputs.push(OutputFile { file: name, sha256: sha256_hex(text.as_bytes()) });
        Ok(())
    };
    for t in &out.tables {
        put(format!("{}.csv", t.name), t.to_csv())?;
    }
    let summary = serde_json::to_string_pretty(&out.summary).expect("summary serializes") + "\n";
    put("summary.json".into(), summary)?;
    for (name, text) in &out.files {
        put(name.clone(), text.clone())?;
    }
    let manifest = Manifest {
        scenario: cfg.scenario.to_string(),
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        config_sha256: sha256_hex(cfg.canonical_json().as_bytes()),
        config: cfg.clone(),
        workers,
        seeds: out.seeds.clone(),
        warnings: out.warnings.clone(),
        outputs,
    };
    let path = dir.join("manifest.json");
    fs::write(&path, serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n")?;
    Ok((path, manifest))
}

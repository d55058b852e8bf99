//! Config-driven runner for the gaussnet experiments.
//!
//! A scenario config (JSON) names one of the [`catalog::ScenarioId`]s and
//! carries networks, protocol, payloads, ensemble sizes and output paths.
//! [`run`] validates it, executes it on a rayon pool and writes CSV tables,
//! a JSON summary and a manifest.

pub mod catalog;
pub mod config;
pub mod output;
pub mod scenarios;
pub mod stats;

use std::path::{Path, PathBuf};

pub use catalog::ScenarioId;
pub use config::{ConfigError, Diagnostic, ScenarioConfig};
pub use output::{Manifest, ScenarioOutput, Table};
pub use scenarios::RunError;

/// Environment variable consulted when a config sets no worker count.
pub const WORKERS_ENV: &str = "GAUSSNET_WORKERS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Run(#[from] RunError),
    #[error("writing {path}: {message}")]
    Output { path: String, message: String },
}

impl CliError {
    /// 1 for configuration problems, 2 for failures while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            _ => 2,
        }
    }
}

/// Worker count: the config's, else `GAUSSNET_WORKERS`, else all cores.
pub fn workers(cfg: &ScenarioConfig) -> Result<usize, ConfigError> {
    if let Some(w) = cfg.workers {
        return Ok(w);
    }
    match std::env::var(WORKERS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(w) if w > 0 => Ok(w),
            _ => Err(ConfigError::Invalid(vec![Diagnostic {
                path: WORKERS_ENV.into(),
                message: format!("expected a positive integer, got '{v}'"),
            }])),
        },
        Err(_) => Ok(std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)),
    }
}

/// Validates and runs a scenario without writing anything.
pub fn execute(cfg: &ScenarioConfig, base: &Path) -> Result<(ScenarioOutput, usize), CliError> {
    cfg.validate(base)?;
    let n = workers(cfg)?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build().map_err(|e| RunError {
        scenario: cfg.scenario,
        context: "thread pool".into(),
        message: e.to_string(),
    })?;
    let out = pool.install(|| scenarios::execute(cfg, base))?;
    Ok((out, n))
}

#[derive(Debug)]
pub struct RunReport {
    pub dir: PathBuf,
    pub manifest: Manifest,
    pub output: ScenarioOutput,
}

/// Runs a scenario and writes its outputs to `cfg.output.dir`.
pub fn run(cfg: &ScenarioConfig, base: &Path) -> Result<RunReport, CliError> {
    let (output, n) = execute(cfg, base)?;
    let dir = cfg.output.dir.clone();
    let (_, manifest) = output::write(&dir, cfg, n, &output)
        .map_err(|e| CliError::Output { path: dir.display().to_string(), message: e.to_string() })?;
    Ok(RunReport { dir, manifest, output })
}

/// A short human-readable account of a finished run.
pub fn summary_text(report: &RunReport) -> String {
    let mut s = format!("scenario {} finished; outputs in {}\n", report.manifest.scenario, report.dir.display());
    for f in &report.manifest.outputs {
        s.push_str(&format!("  {}\n", f.file));
    }
    for (k, v) in &report.output.summary {
        if k != "scenario" {
            s.push_str(&format!("{k}: {v}\n"));
        }
    }
    if !report.output.warnings.is_empty() {
        s.push_str(&format!("{} warning(s), listed in manifest.json\n", report.output.warnings.len()));
    }
    s
}

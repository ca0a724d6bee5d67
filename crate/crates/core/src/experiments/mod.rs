//! Experiment drivers. Each experiment writes its artifacts under
//! `<out>/<experiment>/`, echoes its resolved configuration, and returns
//! verdicts; `run_all` adds a summary document at `<out>/verdicts.json`.

pub mod blowup;
pub mod config;
pub mod holder;
pub mod inflation;
pub mod nonuniform;
pub mod output;
pub mod residuals;
pub mod sweep;
pub mod verdict;
pub mod verify_norms;

use std::path::Path;
use std::time::Instant;

use serde::Serialize;

pub use config::{ConfigFile, ExperimentConfig, ExperimentId, Overrides};
pub use verdict::{exit_code, overall, ExperimentReport, Status, Verdict};

use crate::error::{Error, Result};

/// Runs one experiment from a resolved configuration.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let started = Instant::now();
    let dir = cfg.experiment_dir();
    output::write_text(&dir.join("config_echo.toml"), &cfg.echo().to_toml()?)?;
    let mut report = ExperimentReport::new(cfg.id.as_str());
    match cfg.id {
        ExperimentId::VerifyNorms => verify_norms::run(cfg, &mut report)?,
        ExperimentId::Residuals => residuals::run(cfg, &mut report)?,
        ExperimentId::Nonuniform => nonuniform::run(cfg, &mut report)?,
        ExperimentId::Holder => holder::run(cfg, &mut report)?,
        ExperimentId::Blowup => blowup::run(cfg, &mut report)?,
        ExperimentId::Inflation => inflation::run(cfg, &mut report)?,
    }
    if report.verdicts.is_empty() {
        return Err(Error::Numeric(format!("{} produced no verdicts", cfg.id)));
    }
    report.wall_time_s = started.elapsed().as_secs_f64();
    output::write_json(&dir.join("verdicts.json"), &report)?;
    Ok(report)
}

/// Verdict summary across experiments.
#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub status: Status,
    pub experiments: Vec<ExperimentReport>,
}

impl Summary {
    pub fn new(experiments: Vec<ExperimentReport>) -> Self {
        Self { status: overall(experiments.iter().map(|r| r.status())), experiments }
    }

    pub fn exit_code(&self) -> i32 {
        exit_code(self.status)
    }

    pub fn write(&self, out_dir: &Path) -> Result<()> {
        output::write_json(&out_dir.join("verdicts.json"), self)?;
        Ok(())
    }
}

/// Resolves and runs each experiment in order. Configuration errors abort
/// before anything runs.
pub fn run_all(ids: &[ExperimentId], file: Option<&ConfigFile>, ov: &Overrides) -> Result<Summary> {
    let configs: Vec<ExperimentConfig> =
        ids.iter().map(|&id| ExperimentConfig::resolve(id, file, ov)).collect::<Result<_>>()?;
    let mut reports = Vec::with_capacity(configs.len());
    for cfg in &configs {
        reports.push(run_experiment(cfg)?);
    }
    let summary = Summary::new(reports);
    if let Some(first) = configs.first() {
        summary.write(&first.out_dir)?;
    }
    Ok(summary)
}

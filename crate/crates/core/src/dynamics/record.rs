use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::solver::{SolverConfig, SystemState};
use crate::error::Result;

pub const MONITOR_CSV_HEADER: &str =
    "t,Hs_u,Hsm1_eta,L2_u,Linf_u,L1_eta,mass_u,mass_eta,Linf_ux,B32_u,B0inf_eta,tail_u,tail_eta";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HaltReason {
    Completed,
    GradientBlowup,
    ResolutionLoss,
    Nonfinite,
}

impl HaltReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            HaltReason::Completed => "completed",
            HaltReason::GradientBlowup => "gradient-blowup",
            HaltReason::ResolutionLoss => "resolution-loss",
            HaltReason::Nonfinite => "nonfinite",
        }
    }
}

/// One row of the monitor table.
#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct MonitorSample {
    pub t: f64,
    pub hs_u: f64,
    pub hsm1_eta: f64,
    pub l2_u: f64,
    pub linf_u: f64,
    pub l1_eta: f64,
    pub mass_u: f64,
    pub mass_eta: f64,
    pub linf_ux: f64,
    pub b32_u: f64,
    pub b0inf_eta: f64,
    pub tail_u: f64,
    pub tail_eta: f64,
}

impl MonitorSample {
    /// Largest of the two tail fractions.
    pub fn tail(&self) -> f64 {
        self.tail_u.max(self.tail_eta)
    }

    /// `‖u‖_{H^s} + ‖η‖_{H^{s-1}}`.
    pub fn energy(&self) -> f64 {
        self.hs_u + self.hsm1_eta
    }

    fn csv_row(&self) -> String {
        let v = [
            self.t,
            self.hs_u,
            self.hsm1_eta,
            self.l2_u,
            self.linf_u,
            self.l1_eta,
            self.mass_u,
            self.mass_eta,
            self.linf_ux,
            self.b32_u,
            self.b0inf_eta,
            self.tail_u,
            self.tail_eta,
        ];
        v.iter().map(|x| format!("{x:.17e}")).collect::<Vec<_>>().join(",")
    }
}

/// Quadrature values of the initial data used by the post-run reports.
#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct InitialQuantities {
    pub l2_u0: f64,
    pub linf_u0: f64,
    pub l1_u0: f64,
    pub l1_eta0: f64,
    pub linf_eta0: f64,
    pub eta0_min: f64,
    pub mass_u0: f64,
    pub mass_eta0: f64,
    pub linf_ux0: f64,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct CharacteristicSample {
    pub t: f64,
    pub q: f64,
    /// `q_x` from its variational ODE.
    pub qx: f64,
    /// `q_x` from `exp(∫ u_x(s, q(s)) ds)`.
    pub qx_exp: f64,
    /// `m(t) = u_x(t, q(t))`.
    pub m: f64,
    /// `η(t, q) q_x`.
    pub eta_qx: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CharacteristicTrace {
    pub x0: f64,
    pub eta0_at_x0: f64,
    pub samples: Vec<CharacteristicSample>,
}

impl CharacteristicTrace {
    /// Largest relative gap between the two `q_x` computations.
    pub fn jacobian_mismatch(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| (s.qx - s.qx_exp).abs() / s.qx_exp.abs().max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max)
    }
}

/// A decimated state sample.
#[derive(Clone, Debug, Serialize)]
pub struct Snapshot {
    pub t: f64,
    pub u: Vec<f64>,
    pub eta: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunRecord {
    pub config: SolverConfig,
    pub box_length: f64,
    pub points: usize,
    pub initial: InitialQuantities,
    pub monitors: Vec<MonitorSample>,
    pub traces: Vec<CharacteristicTrace>,
    pub snapshots: Vec<Snapshot>,
    pub halt: HaltReason,
    /// Time of the last accepted state.
    pub t_end: f64,
    pub steps: usize,
    pub warnings: Vec<String>,
    pub wall_time_s: f64,
    /// Last accepted state; not serialised.
    #[serde(skip)]
    pub final_state: Option<SystemState>,
}

impl RunRecord {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| crate::Error::Parse(e.to_string()))
    }

    pub fn monitor_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.monitors.len() + 1));
        out.push_str(MONITOR_CSV_HEADER);
        out.push('\n');
        for m in &self.monitors {
            let _ = writeln!(out, "{}", m.csv_row());
        }
        out
    }

    /// Writes the record as JSON, creating parent directories; returns the path.
    pub fn write_json(&self, path: &Path) -> Result<PathBuf> {
        create_parent(path)?;
        let mut f = std::fs::File::create(path)?;
        f.write_all(self.to_json()?.as_bytes())?;
        Ok(path.to_path_buf())
    }

    pub fn write_monitor_csv(&self, path: &Path) -> Result<PathBuf> {
        create_parent(path)?;
        std::fs::write(path, self.monitor_csv())?;
        Ok(path.to_path_buf())
    }

    pub fn completed(&self) -> bool {
        self.halt == HaltReason::Completed
    }
}

fn create_parent(path: &Path) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    Ok(())
}

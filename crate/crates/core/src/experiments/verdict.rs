use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Inconclusive,
    Fail,
}

impl Status {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Inconclusive => "INCONCLUSIVE",
        })
    }
}

/// Outcome of one checked claim.
#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub claim: String,
    pub measured: BTreeMap<String, f64>,
    pub threshold: String,
    pub status: Status,
    pub artifacts: Vec<String>,
}

impl Verdict {
    pub fn new(claim: impl Into<String>, threshold: impl Into<String>, status: Status) -> Self {
        Self {
            claim: claim.into(),
            measured: BTreeMap::new(),
            threshold: threshold.into(),
            status,
            artifacts: Vec::new(),
        }
    }

    pub fn check(claim: impl Into<String>, threshold: impl Into<String>, ok: bool) -> Self {
        Self::new(claim, threshold, Status::from_bool(ok))
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.measured.insert(key.to_string(), value);
        self
    }

    pub fn artifact(mut self, path: impl Into<String>) -> Self {
        self.artifacts.push(path.into());
        self
    }

    /// Downgrades a result to inconclusive when its hypotheses were left.
    pub fn inconclusive_if(mut self, cond: bool) -> Self {
        if cond {
            self.status = Status::Inconclusive;
        }
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}", self.status, self.claim)?;
        let measured: Vec<String> = self.measured.iter().map(|(k, v)| format!("{k}={v:.6e}")).collect();
        if !measured.is_empty() {
            write!(f, " | {}", measured.join(", "))?;
        }
        write!(f, " | need {}", self.threshold)
    }
}

/// Verdicts and notes emitted by one experiment.
#[derive(Clone, Debug, Serialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub verdicts: Vec<Verdict>,
    pub notes: Vec<String>,
    pub wall_time_s: f64,
}

impl ExperimentReport {
    pub fn new(experiment: &str) -> Self {
        Self { experiment: experiment.to_string(), verdicts: Vec::new(), notes: Vec::new(), wall_time_s: 0.0 }
    }

    pub fn push(&mut self, v: Verdict) {
        self.verdicts.push(v);
    }

    pub fn status(&self) -> Status {
        overall(self.verdicts.iter().map(|v| v.status))
    }

    pub fn find(&self, claim: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.claim == claim)
    }
}

/// Fail dominates inconclusive, which dominates pass.
pub fn overall(statuses: impl IntoIterator<Item = Status>) -> Status {
    statuses.into_iter().max().unwrap_or(Status::Pass)
}

pub fn exit_code(status: Status) -> i32 {
    match status {
        Status::Pass => 0,
        Status::Fail => 1,
        Status::Inconclusive => 2,
    }
}

use serde::Serialize;

use super::record::{MonitorSample, RunRecord};
use crate::error::{Error, Result};

/// Samples whose tail fraction stays below this are treated as resolved.
pub const RESOLVED_TAIL: f64 = 0.1;

fn resolved(m: &MonitorSample) -> bool {
    m.tail() < RESOLVED_TAIL
}

#[derive(Clone, Debug, Serialize)]
pub struct ConservationReport {
    /// Largest `|∫u(t) − ∫u₀|` relative to `max(|∫u₀|, ‖u₀‖_{L¹})`.
    pub drift_u: f64,
    /// Same for `η`.
    pub drift_eta: f64,
    pub judged: usize,
}

impl ConservationReport {
    pub fn max_drift(&self) -> f64 {
        self.drift_u.max(self.drift_eta)
    }
}

pub fn conservation_report(rec: &RunRecord) -> ConservationReport {
    let init = &rec.initial;
    let scale_u = init.mass_u0.abs().max(init.l1_u0);
    let scale_eta = init.mass_eta0.abs().max(init.l1_eta0);
    let rel = |d: f64, s: f64| if s == 0.0 { d.abs() } else { d.abs() / s };
    let mut report = ConservationReport { drift_u: 0.0, drift_eta: 0.0, judged: 0 };
    for m in rec.monitors.iter().filter(|m| resolved(m)) {
        report.drift_u = report.drift_u.max(rel(m.mass_u - init.mass_u0, scale_u));
        report.drift_eta = report.drift_eta.max(rel(m.mass_eta - init.mass_eta0, scale_eta));
        report.judged += 1;
    }
    report
}

#[derive(Clone, Debug, Serialize)]
pub struct AprioriReport {
    /// Smallest `bound − value` of the `L²` estimate over judged samples.
    pub worst_l2_margin: f64,
    /// Smallest `bound − value` of the `L^∞` estimate.
    pub worst_linf_margin: f64,
    pub violations: usize,
    pub judged: usize,
}

impl AprioriReport {
    pub fn holds(&self) -> bool {
        self.violations == 0
    }
}

/// Checks `‖u‖_{L²} <= ‖u₀‖_{L²} + ½‖η₀‖_{L¹} t` and
/// `‖u‖_{L^∞} <= ‖u₀‖_{L^∞} + (‖u₀‖_{L²} + ½‖η₀‖_{L¹}) t + ½‖η₀‖_{L¹} t²`
/// on every resolved sample, with multiplicative slack `1 + 1e-6`.
pub fn apriori_bounds_report(rec: &RunRecord) -> Result<AprioriReport> {
    let init = &rec.initial;
    if init.eta0_min < 0.0 {
        return Err(Error::Precondition(format!(
            "a-priori bounds assume a nonnegative initial surface, but min η₀ = {:.3e}",
            init.eta0_min
        )));
    }
    let t0 = rec.monitors.first().map_or(0.0, |m| m.t);
    let half_mass = 0.5 * init.l1_eta0;
    let mut report = AprioriReport {
        worst_l2_margin: f64::INFINITY,
        worst_linf_margin: f64::INFINITY,
        violations: 0,
        judged: 0,
    };
    for m in rec.monitors.iter().filter(|m| resolved(m)) {
        let t = m.t - t0;
        let l2_bound = init.l2_u0 + half_mass * t;
        let linf_bound = init.linf_u0 + (init.l2_u0 + half_mass) * t + half_mass * t * t;
        report.worst_l2_margin = report.worst_l2_margin.min(l2_bound - m.l2_u);
        report.worst_linf_margin = report.worst_linf_margin.min(linf_bound - m.linf_u);
        if m.l2_u > l2_bound * (1.0 + 1e-6) || m.linf_u > linf_bound * (1.0 + 1e-6) {
            report.violations += 1;
        }
        report.judged += 1;
    }
    Ok(report)
}

#[derive(Clone, Debug, Serialize)]
pub struct TransportReport {
    /// Largest `|η(t,q) q_x − η₀(x₀)| / ‖η₀‖_{L^∞}` over resolved samples.
    pub max_rel_error: f64,
    pub judged: usize,
}

pub fn transport_identity_check(rec: &RunRecord) -> TransportReport {
    let scale = rec.initial.linf_eta0;
    let mut report = TransportReport { max_rel_error: 0.0, judged: 0 };
    if scale == 0.0 {
        return report;
    }
    for trace in &rec.traces {
        for (s, m) in trace.samples.iter().zip(&rec.monitors) {
            if resolved(m) {
                let err = (s.eta_qx - trace.eta0_at_x0).abs() / scale;
                report.max_rel_error = report.max_rel_error.max(err);
                report.judged += 1;
            }
        }
    }
    report
}

#[derive(Clone, Debug, Serialize)]
pub struct MonotonicityReport {
    /// `−√M(0)` with `M(0) = ½‖η₀‖_{L¹} + ‖u₀‖_{L²} + ‖u₀‖_{L^∞}`.
    pub threshold: f64,
    pub crossing_time: Option<f64>,
    /// Resolved samples after the crossing where `m` failed to decrease.
    pub violations: usize,
    pub judged: usize,
    pub m_initial: f64,
    pub m_last: f64,
}

impl MonotonicityReport {
    pub fn monotone(&self) -> bool {
        self.crossing_time.is_some() && self.violations == 0
    }
}

/// Whether `m(t) = u_x(t, q(t))` along trace `index` keeps decreasing once it
/// has dropped below `−√M(0)`.
pub fn monotonicity_report(rec: &RunRecord, index: usize) -> Result<MonotonicityReport> {
    let trace = rec
        .traces
        .get(index)
        .ok_or_else(|| Error::Precondition(format!("record has no characteristic trace {index}")))?;
    let init = &rec.initial;
    let threshold = -(0.5 * init.l1_eta0 + init.l2_u0 + init.linf_u0).sqrt();
    let series: Vec<(f64, f64)> = trace
        .samples
        .iter()
        .zip(&rec.monitors)
        .filter(|(_, m)| resolved(m))
        .map(|(s, _)| (s.t, s.m))
        .collect();
    let mut report = MonotonicityReport {
        threshold,
        crossing_time: None,
        violations: 0,
        judged: 0,
        m_initial: series.first().map_or(f64::NAN, |p| p.1),
        m_last: series.last().map_or(f64::NAN, |p| p.1),
    };
    if let Some(start) = series.iter().position(|&(_, m)| m < threshold) {
        report.crossing_time = Some(series[start].0);
        for w in series[start..].windows(2) {
            report.judged += 1;
            if w[1].1 > w[0].1 {
                report.violations += 1;
            }
        }
    }
    Ok(report)
}

/// `(t, ‖u‖_{H^s} + ‖η‖_{H^{s-1}})` for every monitor sample.
pub fn energy_series(rec: &RunRecord) -> Vec<(f64, f64)> {
    rec.monitors.iter().map(|m| (m.t, m.energy())).collect()
}

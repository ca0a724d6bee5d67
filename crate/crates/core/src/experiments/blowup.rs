//! Wave breaking from certified data, with conservation, a-priori bounds,
//! monotonicity of the slope along the characteristic and the transport identity.

use super::config::ExperimentConfig;
use super::output::{display, write_dat};
use super::verdict::{ExperimentReport, Verdict};
use crate::constructions::{breaking_data, BreakingCertificate};
use crate::dynamics::{
    apriori_bounds_report, conservation_report, integrate, monotonicity_report, transport_identity_check, DtPolicy,
    HaltReason, HaltThresholds, RunRecord, SolverConfig, SystemState,
};
use crate::error::{Error, Result};
use crate::spectral::PeriodicGrid;

/// Parameters `(a, A, w)` of the breaking datum `u₀ = −a x e^{−x²/2}`, `η₀ = A e^{−x²/(2w²)}`.
pub const BREAKING_PARAMS: (f64, f64, f64) = (8.0, 0.1, 1.0);
pub const MASS_DRIFT_TOLERANCE: f64 = 1e-10;
pub const TRANSPORT_TOLERANCE: f64 = 1e-4;

/// Builds and certifies the breaking datum, then integrates it to `t_final`
/// (the certified bound when `None`), tracing the characteristic from 0.
pub fn breaking_run(
    params: (f64, f64, f64),
    grid: &PeriodicGrid,
    cfg: &ExperimentConfig,
) -> Result<(BreakingCertificate, RunRecord)> {
    let (u0, eta0, cert) = breaking_data(params.0, params.1, params.2, grid)?;
    if !cert.admissible {
        return Err(Error::config(format!(
            "breaking datum is not admissible: {}",
            cert.failed_clauses().join("; ")
        )));
    }
    let solver = SolverConfig {
        dt: DtPolicy::Adaptive { cfl: cfg.cfl },
        t_final: cfg.t_final.unwrap_or(cert.t_bound),
        dealias: cfg.dealias,
        halt: HaltThresholds { ux_factor: cfg.ux_factor, tail_frac: cfg.tail_frac },
        stride: cfg.stride,
        sobolev_s: cfg.s,
        ..SolverConfig::default()
    };
    let rec = integrate(&SystemState::new(u0, eta0, 0.0)?, &solver, &[cert.x0])?;
    Ok((cert, rec))
}

pub fn breaking_grid_for(cfg: &ExperimentConfig) -> Result<PeriodicGrid> {
    PeriodicGrid::new(
        cfg.grid_length.ok_or_else(|| Error::config("blow-up run needs grid.L"))?,
        cfg.grid_points.ok_or_else(|| Error::config("blow-up run needs grid.N"))?,
    )
}

pub fn run(cfg: &ExperimentConfig, report: &mut ExperimentReport) -> Result<()> {
    let dir = cfg.experiment_dir();
    let grid = breaking_grid_for(cfg)?;
    let (cert, rec) = breaking_run(BREAKING_PARAMS, &grid, cfg)?;
    let json = rec.write_json(&dir.join("run.json"))?;
    let csv = rec.write_monitor_csv(&dir.join("monitors.csv"))?;
    let trace = &rec.traces[0];
    let m_dat = write_dat(
        &dir.join("slope_along_characteristic.dat"),
        "t m(t)",
        &trace.samples.iter().map(|s| (s.t, s.m)).collect::<Vec<_>>(),
    )?;
    let ux_dat = write_dat(
        &dir.join("max_gradient.dat"),
        "t |u_x|_inf",
        &rec.monitors.iter().map(|m| (m.t, m.linf_ux)).collect::<Vec<_>>(),
    )?;
    report.notes.push(format!(
        "certificate: u0'(0) = {:.6}, T_bound = {:.6}; halt = {} at t = {:.6} after {} steps",
        cert.slope,
        cert.t_bound,
        rec.halt.as_str(),
        rec.t_end,
        rec.steps
    ));
    report.notes.extend(rec.warnings.iter().cloned());

    let ux_ratio = rec.monitors.last().map_or(f64::NAN, |m| m.linf_ux) / rec.initial.linf_ux0;
    report.push(
        Verdict::check(
            "gradient-blowup-before-bound",
            format!("halt = gradient-blowup and t_halt <= {:.6}", cert.t_bound),
            rec.halt == HaltReason::GradientBlowup && rec.t_end <= cert.t_bound,
        )
        .with("t_halt", rec.t_end)
        .with("t_bound", cert.t_bound)
        .with("ux_growth", ux_ratio)
        .artifact(display(&json))
        .artifact(display(&csv))
        .artifact(display(&ux_dat)),
    );

    let mono = monotonicity_report(&rec, 0)?;
    report.push(
        Verdict::check("slope-monotone-after-crossing", "m(t) nonincreasing after crossing", mono.monotone())
            .with("m_initial", mono.m_initial)
            .with("m_last", mono.m_last)
            .with("threshold", mono.threshold)
            .with("crossing_time", mono.crossing_time.unwrap_or(f64::NAN))
            .with("violations", mono.violations as f64)
            .artifact(display(&m_dat)),
    );
    report.push(
        Verdict::check("initial-slope-recorded", "|m(0) - u0'(0)| <= 1e-8", (mono.m_initial - cert.slope).abs() <= 1e-8)
            .with("m_initial", mono.m_initial)
            .with("u0_slope", cert.slope),
    );

    let cons = conservation_report(&rec);
    report.push(
        Verdict::check(
            "mass-conservation",
            format!("relative drift <= {MASS_DRIFT_TOLERANCE:e}"),
            cons.judged > 0 && cons.max_drift() <= MASS_DRIFT_TOLERANCE,
        )
        .with("drift_u", cons.drift_u)
        .with("drift_eta", cons.drift_eta)
        .with("samples", cons.judged as f64),
    );
    let apriori = apriori_bounds_report(&rec)?;
    report.push(
        Verdict::check("apriori-bounds", "0 violations on resolved samples", apriori.holds())
            .with("worst_l2_margin", apriori.worst_l2_margin)
            .with("worst_linf_margin", apriori.worst_linf_margin)
            .with("violations", apriori.violations as f64)
            .with("samples", apriori.judged as f64),
    );
    let transport = transport_identity_check(&rec);
    report.push(
        Verdict::check(
            "transport-identity",
            format!("relative error <= {TRANSPORT_TOLERANCE:e}"),
            transport.judged > 0 && transport.max_rel_error <= TRANSPORT_TOLERANCE,
        )
        .with("max_rel_error", transport.max_rel_error)
        .with("samples", transport.judged as f64),
    );
    Ok(())
}

//! Decay of the residuals of the approximate family in `n`. No time stepping.

use super::config::ExperimentConfig;
use super::output::{display, write_csv, write_dat};
use super::sweep::map_ordered;
use super::verdict::{ExperimentReport, Verdict};
use crate::constructions::{approx_residuals, ApproxSolutionParams};
use crate::error::Result;
use crate::norms::{fit_power_law, sobolev_norm};
use crate::spectral::PeriodicGrid;

pub const SAMPLE_TIMES: [f64; 3] = [0.0, 0.5, 1.0];
/// Half-width of the windows around the predicted slopes.
pub const SLOPE_WINDOW: f64 = 0.2;

#[derive(Clone, Copy, Debug)]
pub struct ResidualPoint {
    pub n: u32,
    pub points: usize,
    /// `max_t ‖E‖_{H^{s1}}`.
    pub e: f64,
    /// `max_t ‖F‖_{H^{s1-1}}`.
    pub f: f64,
}

fn grid_for(p: &ApproxSolutionParams, cfg: &ExperimentConfig) -> Result<PeriodicGrid> {
    match cfg.grid_points {
        Some(points) => PeriodicGrid::new(cfg.grid_length.unwrap_or_else(|| p.box_length()), points),
        None => p.residual_grid(),
    }
}

pub fn residual_point(p: &ApproxSolutionParams, s1: f64, grid: &PeriodicGrid) -> Result<ResidualPoint> {
    let (mut e, mut f) = (0.0_f64, 0.0_f64);
    for &t in &SAMPLE_TIMES {
        let (re, rf) = approx_residuals(p, t, grid)?;
        e = e.max(sobolev_norm(&re, s1));
        f = f.max(sobolev_norm(&rf, s1 - 1.0));
    }
    Ok(ResidualPoint { n: p.n, points: grid.points(), e, f })
}

pub fn run(cfg: &ExperimentConfig, report: &mut ExperimentReport) -> Result<()> {
    let dir = cfg.experiment_dir();
    let (s, delta, s1) = (cfg.s, cfg.delta, cfg.r[0]);
    let results = map_ordered(&cfg.n_list, |&n| -> Result<ResidualPoint> {
        let p = ApproxSolutionParams::new(1, n, delta, s)?;
        residual_point(&p, s1, &grid_for(&p, cfg)?)
    });
    let points: Vec<ResidualPoint> = results.into_iter().collect::<Result<_>>()?;

    let rows: Vec<Vec<f64>> = points.iter().map(|r| vec![r.n as f64, r.points as f64, r.e, r.f]).collect();
    let csv = write_csv(&dir.join("residuals.csv"), &["n", "N", "E_Hs1", "F_Hs1m1"], &rows)?;
    let e_pairs: Vec<(f64, f64)> = points.iter().map(|r| (r.n as f64, r.e)).collect();
    let f_pairs: Vec<(f64, f64)> = points.iter().map(|r| (r.n as f64, r.f)).collect();
    let e_dat = write_dat(&dir.join("residual_E.dat"), "n E", &e_pairs)?;
    let f_dat = write_dat(&dir.join("residual_F.dat"), "n F", &f_pairs)?;
    let fit_e = fit_power_law(&e_pairs)?;
    let fit_f = fit_power_law(&f_pairs)?;

    let bound = -(s - s1) - 0.5;
    report.push(
        Verdict::check(
            "residual-decay",
            format!("both slopes <= {bound:.4}"),
            fit_e.slope <= bound && fit_f.slope <= bound,
        )
        .with("slope_E", fit_e.slope)
        .with("slope_F", fit_f.slope)
        .artifact(display(&csv))
        .artifact(display(&e_dat))
        .artifact(display(&f_dat)),
    );

    let predicted_e = -s - 1.0 + s1;
    report.push(
        Verdict::check(
            "residual-E-slope",
            format!("slope_E = {predicted_e:.4} +/- {SLOPE_WINDOW}"),
            (fit_e.slope - predicted_e).abs() <= SLOPE_WINDOW,
        )
        .with("slope_E", fit_e.slope)
        .with("fit_residual", fit_e.residual),
    );

    // leading η-transport term n^{-2+δ/2} measured in H^{s1-1}
    let predicted_f = -2.0 + 0.5 * delta + (s1 - 1.0);
    report.push(
        Verdict::check(
            "residual-F-slope",
            format!("slope_F = {predicted_f:.4} +/- {SLOPE_WINDOW}"),
            (fit_f.slope - predicted_f).abs() <= SLOPE_WINDOW,
        )
        .with("slope_F", fit_f.slope)
        .with("fit_residual", fit_f.residual),
    );

    let n0 = cfg.n_list[0];
    let p0 = ApproxSolutionParams::new(0, n0, delta, s)?;
    let g0 = grid_for(&p0, cfg)?;
    let mut f_zero = 0.0_f64;
    for &t in &SAMPLE_TIMES {
        f_zero = f_zero.max(approx_residuals(&p0, t, &g0)?.1.max_abs());
    }
    report.push(
        Verdict::check("residual-F-vanishes-at-alpha-0", "max |F| = 0", f_zero == 0.0)
            .with("n", n0 as f64)
            .with("max_abs_F", f_zero),
    );
    Ok(())
}

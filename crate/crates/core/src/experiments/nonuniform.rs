//! Paired evolutions from the `α = 0, 1` data: initial distance shrinks with
//! `n`, distance at `t = 1` does not.

use super::config::ExperimentConfig;
use super::output::{display, write_csv, write_dat};
use super::sweep::map_ordered;
use super::verdict::{ExperimentReport, Verdict};
use crate::constructions::{approx_solution, nonuniform_initial_data, ApproxSolutionParams};
use crate::dynamics::{integrate, DtPolicy, HaltThresholds, RunRecord, SolverConfig, SystemState};
use crate::error::{Error, Result};
use crate::norms::{fit_power_law, sobolev_norm};
use crate::spectral::{Field, PeriodicGrid};

/// `2|sin(1/2)|`, the separation at `t = 1`.
pub fn separation_reference(t: f64) -> f64 {
    2.0 * (0.5 * t).sin().abs()
}

/// `‖u − v‖_{H^s} + ‖η − θ‖_{H^{s−1}}`.
pub fn pair_distance(a: (&Field, &Field), b: (&Field, &Field), s: f64) -> Result<f64> {
    Ok(sobolev_norm(&a.0.sub(b.0)?, s) + sobolev_norm(&a.1.sub(b.1)?, s - 1.0))
}

#[derive(Clone, Debug)]
pub struct NonuniformPoint {
    pub n: u32,
    pub points: usize,
    pub d0: f64,
    pub d1: f64,
    /// `‖u^{α,n}(t) − u_{α,n}(t)‖_{H^s}` for `α = 0, 1`.
    pub gap: [f64; 2],
    pub completed: bool,
    pub records: [RunRecord; 2],
}

fn grid_for(p: &ApproxSolutionParams, cfg: &ExperimentConfig) -> Result<PeriodicGrid> {
    match cfg.grid_points {
        Some(points) => PeriodicGrid::new(cfg.grid_length.unwrap_or_else(|| p.box_length()), points),
        None => p.packet_grid(),
    }
}

pub fn nonuniform_point(n: u32, cfg: &ExperimentConfig) -> Result<NonuniformPoint> {
    let t_final = cfg.t_final.unwrap_or(1.0);
    let p1 = ApproxSolutionParams::new(1, n, cfg.delta, cfg.s)?;
    let p0 = p1.with_alpha(0);
    let grid = grid_for(&p1, cfg)?;
    let (u1, e1) = nonuniform_initial_data(&p1, &grid)?;
    let (u0, e0) = nonuniform_initial_data(&p0, &grid)?;

    // both members share one fixed step so their difference carries no step-size noise
    let umax = u0.max_abs().max(u1.max_abs()).max(1.0);
    let dt = (cfg.cfl * grid.spacing() / umax).min(1e-3 * t_final);
    let solver = SolverConfig {
        dt: DtPolicy::Fixed { dt },
        t_final,
        dealias: cfg.dealias,
        halt: HaltThresholds { ux_factor: cfg.ux_factor, tail_frac: cfg.tail_frac },
        stride: cfg.stride,
        sobolev_s: cfg.s,
        besov_monitors: false,
        ..SolverConfig::default()
    };
    let r0 = integrate(&SystemState::new(u0.clone(), e0.clone(), 0.0)?, &solver, &[])?;
    let r1 = integrate(&SystemState::new(u1.clone(), e1.clone(), 0.0)?, &solver, &[])?;
    let completed = r0.completed() && r1.completed();
    let d0 = pair_distance((&u1, &e1), (&u0, &e0), cfg.s)?;

    let end = |r: &RunRecord| -> Result<SystemState> {
        r.final_state.clone().ok_or_else(|| Error::Numeric("run kept no final state".into()))
    };
    let (f0, f1) = (end(&r0)?, end(&r1)?);
    let d1 = pair_distance((&f1.u, &f1.eta), (&f0.u, &f0.eta), cfg.s)?;
    let mut gap = [0.0; 2];
    for (alpha, fin) in [(0usize, &f0), (1, &f1)] {
        let (ua, _) = approx_solution(&p1.with_alpha(alpha as u8), fin.t, &grid)?;
        gap[alpha] = sobolev_norm(&ua.sub(&fin.u)?, cfg.s);
    }
    Ok(NonuniformPoint { n, points: grid.points(), d0, d1, gap, completed, records: [r0, r1] })
}

pub fn run(cfg: &ExperimentConfig, report: &mut ExperimentReport) -> Result<()> {
    let dir = cfg.experiment_dir();
    let t_final = cfg.t_final.unwrap_or(1.0);
    let results = map_ordered(&cfg.n_list, |&n| nonuniform_point(n, cfg));
    let points: Vec<NonuniformPoint> = results.into_iter().collect::<Result<_>>()?;

    for pt in &points {
        for (alpha, rec) in pt.records.iter().enumerate() {
            rec.write_monitor_csv(&dir.join(format!("monitors_n{}_alpha{alpha}.csv", pt.n)))?;
        }
    }
    let reference = separation_reference(t_final);
    let rows: Vec<Vec<f64>> = points
        .iter()
        .map(|p| vec![p.n as f64, p.points as f64, p.d0, p.d1, p.gap[0], p.gap[1], reference])
        .collect();
    let csv = write_csv(
        &dir.join("distances.csv"),
        &["n", "N", "d0", "d1", "gap_alpha0", "gap_alpha1", "reference"],
        &rows,
    )?;
    let d0_dat = write_dat(&dir.join("d0.dat"), "n d0", &points.iter().map(|p| (p.n as f64, p.d0)).collect::<Vec<_>>())?;
    let d1_dat = write_dat(&dir.join("d1.dat"), "n d1", &points.iter().map(|p| (p.n as f64, p.d1)).collect::<Vec<_>>())?;
    let ref_dat = write_dat(
        &dir.join("reference.dat"),
        "n 2|sin(t/2)|",
        &points.iter().map(|p| (p.n as f64, reference)).collect::<Vec<_>>(),
    )?;
    let halted = points.iter().any(|p| !p.completed);
    if halted {
        let which: Vec<String> = points.iter().filter(|p| !p.completed).map(|p| p.n.to_string()).collect();
        report.notes.push(format!("runs for n = {} stopped before t = {t_final}", which.join(", ")));
    }

    let fit = fit_power_law(&points.iter().map(|p| (p.n as f64, p.d0)).collect::<Vec<_>>())?;
    let bound = -(1.0 - 0.5 * cfg.delta) + 0.1;
    report.push(
        Verdict::check("initial-distance-vanishes", format!("slope of d0 <= {bound:.4}"), fit.slope <= bound)
            .with("slope_d0", fit.slope)
            .with("predicted", -(1.0 - 0.5 * cfg.delta))
            .artifact(display(&csv))
            .artifact(display(&d0_dat))
            .inconclusive_if(halted),
    );

    let last = points.iter().max_by_key(|p| p.n).expect("n_list is nonempty");
    let need = 0.9 * reference;
    report.push(
        Verdict::check("separation-persists", format!("d1(n_max) >= {need:.5}"), last.d1 >= need)
            .with("n", last.n as f64)
            .with("d1", last.d1)
            .with("reference", reference)
            .artifact(display(&d1_dat))
            .artifact(display(&ref_dat))
            .inconclusive_if(halted),
    );

    let gaps: Vec<f64> = points.iter().map(|p| p.gap[1]).collect();
    let decreasing = gaps.windows(2).all(|w| w[1] < w[0]);
    let mut v = Verdict::check("approximation-gap-decreases", "gap strictly decreasing in n", decreasing)
        .inconclusive_if(halted);
    for p in &points {
        v = v.with(&format!("gap_n{}", p.n), p.gap[1]);
    }
    report.push(v);
    report.notes.push(format!("reference separation 2|sin(t/2)| = {reference:.5} at t = {t_final}"));
    Ok(())
}

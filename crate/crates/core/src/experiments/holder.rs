//! Hölder dependence on data in the weaker topology `H^r × H^{r−1}`: rough
//! perturbations of one smooth base datum, scaled to prescribed sizes.

use super::config::ExperimentConfig;
use super::nonuniform::pair_distance;
use super::output::{display, write_csv, write_dat};
use super::sweep::map_ordered;
use super::verdict::{ExperimentReport, Verdict};
use crate::dynamics::{integrate, DtPolicy, HaltThresholds, RunRecord, SolverConfig, SystemState};
use crate::error::{Error, Result};
use crate::norms::{build_lp_partition, fit_power_law, sobolev_norm};
use crate::spectral::{Field, PeriodicGrid};

/// Dyadic block holding the perturbation.
pub const PERTURBATION_BLOCK: i32 = 6;
/// Carrier frequency of the perturbation, inside block 6.
pub const PERTURBATION_CARRIER: f64 = 96.0;

pub fn base_datum(grid: &PeriodicGrid) -> (Field, Field) {
    let u = Field::from_fn(grid, |x| 0.5 * (-0.5 * x * x).exp());
    let eta = Field::from_fn(grid, |x| 0.5 * (-0.25 * x * x).exp());
    (u, eta)
}

/// `cos(96x) e^{−x²/2}` projected onto one Littlewood-Paley block.
pub fn perturbation_profile(grid: &PeriodicGrid) -> Result<Field> {
    let partition = build_lp_partition(grid)?;
    if PERTURBATION_BLOCK > partition.j_max() {
        return Err(Error::config(format!(
            "grid resolves blocks up to {}, the perturbation needs {PERTURBATION_BLOCK}",
            partition.j_max()
        )));
    }
    let raw = Field::from_fn(grid, |x| (PERTURBATION_CARRIER * x).cos() * (-0.5 * x * x).exp());
    let coeffs = partition.block_coefficients(PERTURBATION_BLOCK, raw.coefficients());
    let out = Field::from_coefficients(grid, coeffs);
    if out.max_abs() == 0.0 {
        return Err(Error::config("perturbation block is empty on this grid"));
    }
    Ok(out)
}

/// Perturbation of `H^r × H^{r−1}` size exactly `eps`, applied equally to both components.
pub fn scaled_perturbation(profile: &Field, r: f64, eps: f64) -> Field {
    let size = sobolev_norm(profile, r) + sobolev_norm(profile, r - 1.0);
    profile.scale(eps / size)
}

fn snapshot_fields(grid: &PeriodicGrid, rec: &RunRecord) -> Result<Vec<(f64, Field, Field)>> {
    rec.snapshots
        .iter()
        .map(|s| Ok((s.t, Field::new(grid, s.u.clone())?, Field::new(grid, s.eta.clone())?)))
        .collect()
}

/// `sup_t ‖(u, η)(t) − (v, θ)(t)‖_{H^r × H^{r−1}}` over shared snapshot times.
pub fn sup_distance(grid: &PeriodicGrid, a: &RunRecord, b: &RunRecord, r: f64) -> Result<f64> {
    let (sa, sb) = (snapshot_fields(grid, a)?, snapshot_fields(grid, b)?);
    let mut d = 0.0_f64;
    for ((ta, ua, ea), (tb, ub, eb)) in sa.iter().zip(&sb) {
        if (ta - tb).abs() > 1e-12 {
            return Err(Error::Numeric(format!("snapshot times differ: {ta} vs {tb}")));
        }
        d = d.max(pair_distance((ua, ea), (ub, eb), r)?);
    }
    Ok(d)
}

#[derive(Clone, Debug)]
pub struct HolderPoint {
    pub r: f64,
    pub eps: f64,
    pub d0: f64,
    pub d_t: f64,
    /// Largest `‖u‖_{H^s} + ‖η‖_{H^{s−1}}` of the perturbed run.
    pub max_energy: f64,
    pub completed: bool,
}

pub fn run(cfg: &ExperimentConfig, report: &mut ExperimentReport) -> Result<()> {
    let dir = cfg.experiment_dir();
    let grid = PeriodicGrid::new(
        cfg.grid_length.ok_or_else(|| Error::config("holder needs grid.L"))?,
        cfg.grid_points.ok_or_else(|| Error::config("holder needs grid.N"))?,
    )?;
    let t_final = cfg.t_final.unwrap_or(0.5);
    let (u0, eta0) = base_datum(&grid);
    let profile = perturbation_profile(&grid)?;
    let dt = (cfg.cfl * grid.spacing() / u0.max_abs().max(1.0)).min(1e-3 * t_final);
    let solver = SolverConfig {
        dt: DtPolicy::Fixed { dt },
        t_final,
        dealias: cfg.dealias,
        halt: HaltThresholds { ux_factor: cfg.ux_factor, tail_frac: cfg.tail_frac },
        stride: cfg.stride,
        sobolev_s: cfg.s,
        snapshot_every: Some(1),
        besov_monitors: false,
        ..SolverConfig::default()
    };
    let evolve = |du: &Field| -> Result<RunRecord> {
        let state = SystemState::new(u0.add(du)?, eta0.add(du)?, 0.0)?;
        integrate(&state, &solver, &[])
    };

    let base = evolve(&Field::zeros(&grid))?;
    base.write_monitor_csv(&dir.join("monitors_base.csv"))?;
    let y0 = sobolev_norm(&u0, cfg.s) + sobolev_norm(&eta0, cfg.s - 1.0);
    let m_bound = 2.0 * y0;

    // zero perturbation: the run must reproduce the base run exactly
    let anchor = evolve(&Field::zeros(&grid))?;
    let anchor_d = cfg.r.iter().map(|&r| sup_distance(&grid, &base, &anchor, r)).collect::<Result<Vec<_>>>()?;
    let anchor_max = anchor_d.iter().cloned().fold(0.0_f64, f64::max);
    report.push(Verdict::check("zero-perturbation-anchor", "d_T = 0", anchor_max == 0.0).with("d_T", anchor_max));

    let jobs: Vec<(f64, f64)> =
        cfg.r.iter().flat_map(|&r| cfg.epsilon_list.iter().map(move |&e| (r, e))).collect();
    let results = map_ordered(&jobs, |&(r, eps)| -> Result<HolderPoint> {
        let du = scaled_perturbation(&profile, r, eps);
        let rec = evolve(&du)?;
        let d0 = pair_distance((&u0.add(&du)?, &eta0.add(&du)?), (&u0, &eta0), r)?;
        let d_t = sup_distance(&grid, &base, &rec, r)?;
        let max_energy = rec.monitors.iter().map(|m| m.energy()).fold(0.0_f64, f64::max);
        Ok(HolderPoint { r, eps, d0, d_t, max_energy, completed: rec.completed() })
    });
    let points: Vec<HolderPoint> = results.into_iter().collect::<Result<_>>()?;

    let rows: Vec<Vec<f64>> = points
        .iter()
        .map(|p| vec![p.r, p.eps, p.d0, p.d_t, p.max_energy, m_bound, p.completed as u8 as f64])
        .collect();
    let csv = write_csv(
        &dir.join("holder.csv"),
        &["r", "epsilon", "d0", "d_T", "max_energy", "m_bound", "completed"],
        &rows,
    )?;
    report.notes.push(format!(
        "base datum energy y0 = {y0:.6}; bound m = 2 y0 = {m_bound:.6}; T = {t_final}; fixed dt = {dt:.3e}"
    ));

    for &r in &cfg.r {
        let beta = cfg.s - r;
        let mine: Vec<&HolderPoint> = points.iter().filter(|p| p.r == r).collect();
        let pairs: Vec<(f64, f64)> = mine.iter().map(|p| (p.d0, p.d_t)).collect();
        let dat = write_dat(&dir.join(format!("holder_r{r}.dat")), "d0 d_T", &pairs)?;
        let left = mine.iter().any(|p| !p.completed || p.max_energy > m_bound);
        let fit = fit_power_law(&pairs)?;
        let constant = mine.iter().map(|p| p.d_t / p.d0.powf(beta)).fold(0.0_f64, f64::max);
        report.push(
            Verdict::check(
                format!("holder-exponent-r{r}"),
                format!("slope >= beta - 0.1 = {:.4}", beta - 0.1),
                fit.slope >= beta - 0.1,
            )
            .with("r", r)
            .with("beta", beta)
            .with("slope", fit.slope)
            .with("max_dT_over_d0_beta", constant)
            .artifact(display(&csv))
            .artifact(display(&dat))
            .inconclusive_if(left),
        );
    }
    Ok(())
}

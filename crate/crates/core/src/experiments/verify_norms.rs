//! Norm-machinery checks: packet asymptotics, interpolation, Littlewood-Paley
//! reconstruction and Besov/Sobolev equivalence.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::ExperimentConfig;
use super::output::{display, write_csv, write_dat};
use super::sweep::map_ordered;
use super::verdict::{ExperimentReport, Verdict};
use crate::constructions::{dyadic_box_length, packet_envelope, points_for_frequency};
use crate::error::{Error, Result};
use crate::norms::{
    besov_norm_with, build_lp_partition, interpolation_check, lebesgue_norm, lp_blocks, sobolev_norm,
};
use crate::spectral::{Field, PeriodicGrid};

pub const RANDOM_FIELDS: usize = 1000;
pub const RECONSTRUCTIONS: usize = 100;
pub const INTERPOLATION_TRIPLES: [(f64, f64, f64); 3] = [(0.0, 1.0, 2.0), (0.5, 1.25, 2.5), (1.0, 1.5, 3.0)];

/// Seeded random real field whose spectrum decays like `(1+|k|)^{-decay}`
/// and stays inside the retained band.
pub fn random_field(grid: &PeriodicGrid, rng: &mut impl Rng) -> Field {
    let n = grid.points();
    let kmax = (grid.retained_cutoff() / grid.frequency_spacing()).floor() as i64;
    let kmax = rng.gen_range(1..=kmax.max(1));
    let decay: f64 = rng.gen_range(0.0..2.5);
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
    coeffs[0] = Complex64::new(rng.gen_range(-1.0..1.0), 0.0) * grid.length();
    for k in 1..=kmax {
        let amp = rng.gen_range(-1.0..1.0) * (1.0 + k as f64).powf(-decay) * grid.length();
        let phase: f64 = rng.gen_range(0.0..2.0 * PI);
        let c = Complex64::from_polar(amp, phase);
        coeffs[grid.index_of_mode(k)] = c;
        coeffs[grid.index_of_mode(-k)] = c.conj();
    }
    Field::from_coefficients(grid, coeffs)
}

/// `n^{-δ/2-s} ‖φ(x/n^δ) trig(nx)‖_{H^s} / ((1/√2)‖φ‖_{L²})` for cos and sin.
pub fn packet_ratio(n: u32, s: f64, delta: f64, grid: Option<(Option<f64>, usize)>) -> Result<(f64, f64)> {
    let nf = n as f64;
    let d = nf.powf(delta);
    let auto_l = dyadic_box_length(8.0 * d);
    let grid = match grid {
        Some((l, points)) => PeriodicGrid::new(l.unwrap_or(auto_l), points)?,
        None => PeriodicGrid::new(auto_l, points_for_frequency(auto_l, 3.0 * nf))?,
    };
    if grid.xi_max() < 2.0 * nf || grid.length() < 4.0 * d {
        return Err(Error::config(format!(
            "grid (L = {:.3}, N = {}) is too small for n = {n}",
            grid.length(),
            grid.points()
        )));
    }
    let env = packet_envelope();
    let reference = envelope_l2() / 2f64.sqrt();
    let scale = nf.powf(-0.5 * delta - s) / reference;
    let c = Field::from_fn(&grid, |x| env.eval(x / d) * (nf * x).cos());
    let si = Field::from_fn(&grid, |x| env.eval(x / d) * (nf * x).sin());
    Ok((scale * sobolev_norm(&c, s), scale * sobolev_norm(&si, s)))
}

/// `‖φ‖_{L²}` of the packet envelope by trapezoidal quadrature, which is
/// spectrally accurate for a smooth compactly supported integrand.
pub fn envelope_l2() -> f64 {
    let grid = PeriodicGrid::new(8.0, 1 << 14).expect("fixed quadrature grid");
    lebesgue_norm(&packet_envelope().on_grid(&grid), 2.0)
}

pub fn run(cfg: &ExperimentConfig, report: &mut ExperimentReport) -> Result<()> {
    let dir = cfg.experiment_dir();
    let (s, delta) = (cfg.s, cfg.delta);

    let fixed = cfg.grid_points.map(|points| (cfg.grid_length, points));
    let ratios = map_ordered(&cfg.n_list, |&n| packet_ratio(n, s, delta, fixed));
    let ratios: Vec<(u32, f64, f64)> = cfg
        .n_list
        .iter()
        .zip(ratios)
        .map(|(&n, r)| r.map(|(c, si)| (n, c, si)))
        .collect::<Result<_>>()?;
    let rows: Vec<Vec<f64>> = ratios.iter().map(|&(n, c, si)| vec![n as f64, c, si]).collect();
    let csv = write_csv(&dir.join("packet_ratio.csv"), &["n", "ratio_cos", "ratio_sin"], &rows)?;
    let dat = write_dat(
        &dir.join("packet_ratio_cos.dat"),
        "n ratio_cos",
        &ratios.iter().map(|&(n, c, _)| (n as f64, c)).collect::<Vec<_>>(),
    )?;
    let &(n_max, c_max, s_max) = ratios.iter().max_by_key(|r| r.0).expect("n_list is nonempty");
    let worst = (c_max - 1.0).abs().max((s_max - 1.0).abs());
    report.push(
        Verdict::check("packet-norm-asymptotics", "|ratio - 1| <= 0.05 at the largest n (cos and sin)", worst <= 0.05)
            .with("n", n_max as f64)
            .with("ratio_cos", c_max)
            .with("ratio_sin", s_max)
            .artifact(display(&csv))
            .artifact(display(&dat)),
    );

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let grid = PeriodicGrid::new(2.0 * PI, 256)?;
    let fields: Vec<Field> = (0..RANDOM_FIELDS).map(|_| random_field(&grid, &mut rng)).collect();

    let mut violations = 0usize;
    let mut worst_ratio = 0.0_f64;
    for f in &fields {
        for &(s1, sm, s2) in &INTERPOLATION_TRIPLES {
            let (lhs, rhs) = interpolation_check(f, s1, sm, s2)?;
            if lhs > rhs * (1.0 + 1e-12) {
                violations += 1;
            }
            if rhs > 0.0 {
                worst_ratio = worst_ratio.max(lhs / rhs);
            }
        }
    }
    report.push(
        Verdict::check("interpolation-inequality", "0 violations", violations == 0)
            .with("fields", fields.len() as f64)
            .with("triples", INTERPOLATION_TRIPLES.len() as f64)
            .with("violations", violations as f64)
            .with("max_lhs_over_rhs", worst_ratio),
    );

    let lp_grid = PeriodicGrid::new(2.0 * PI * 8.0, 4096)?;
    let partition = build_lp_partition(&lp_grid)?;
    let unity = partition.unity_error();
    report.push(
        Verdict::check("partition-of-unity", "max error <= 1e-12 on retained frequencies", unity <= 1e-12)
            .with("max_error", unity),
    );

    let mut worst_rec = 0.0_f64;
    for _ in 0..RECONSTRUCTIONS {
        let f = random_field(&lp_grid, &mut rng);
        let back = lp_blocks(&f, &partition)?.reconstruct()?;
        let err = lebesgue_norm(&back.sub(&f)?, 2.0) / lebesgue_norm(&f, 2.0).max(f64::MIN_POSITIVE);
        worst_rec = worst_rec.max(err);
    }
    report.push(
        Verdict::check("lp-reconstruction", "relative error <= 1e-10", worst_rec <= 1e-10)
            .with("fields", RECONSTRUCTIONS as f64)
            .with("max_relative_error", worst_rec),
    );

    let band_partition = build_lp_partition(&grid)?;
    let (mut lo, mut hi) = (f64::INFINITY, 0.0_f64);
    for f in &fields {
        let s = rng.gen_range(0.0..=2.0);
        let sob = sobolev_norm(f, s);
        if sob == 0.0 {
            continue;
        }
        let ratio = besov_norm_with(f, &band_partition, s, 2.0, 2.0)? / sob;
        lo = lo.min(ratio);
        hi = hi.max(ratio);
    }
    report.push(
        Verdict::check("besov-sobolev-equivalence", "ratio within [1/8, 8]", lo >= 0.125 && hi <= 8.0)
            .with("min_ratio", lo)
            .with("max_ratio", hi),
    );
    Ok(())
}

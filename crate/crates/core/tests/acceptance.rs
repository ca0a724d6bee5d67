//! Acceptance suite: one test per criterion, each printing a single
//! `criterion N: PASS|FAIL` line with the measured values.
//!
//! Run with `cargo test -p fwlab --test acceptance -- --nocapture --test-threads 1`.

use std::f64::consts::PI;
use std::time::Instant;

use fwlab::constructions::{breaking_data, nonuniform_initial_data, ApproxSolutionParams};
use fwlab::dynamics::{
    conservation_report, integrate, rk4_step, DtPolicy, HaltThresholds, MonitorSample, SolverConfig, SystemState,
};
use fwlab::experiments::{run_experiment, ExperimentConfig, ExperimentId, ExperimentReport, Status};
use fwlab::norms::{fit_power_law, lebesgue_norm};
use fwlab::spectral::{apply_multiplier, Field, PeriodicGrid};
use num_complex::Complex64;

fn verdict_line(criterion: u32, title: &str, ok: bool, detail: &str) {
    let status = if ok { "PASS" } else { "FAIL" };
    println!("criterion {criterion}: {status} [{title}] {detail}");
    assert!(ok, "criterion {criterion} ({title}) failed: {detail}");
}

fn experiment(id: ExperimentId) -> (ExperimentReport, f64, tempfile::TempDir) {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig::defaults(id, false);
    cfg.out_dir = dir.path().to_path_buf();
    let started = Instant::now();
    let rep = run_experiment(&cfg).unwrap();
    (rep, started.elapsed().as_secs_f64(), dir)
}

fn measured(rep: &ExperimentReport, claim: &str, key: &str) -> f64 {
    let v = rep.find(claim).unwrap_or_else(|| panic!("missing verdict {claim}"));
    *v.measured.get(key).unwrap_or_else(|| panic!("verdict {claim} lacks {key}"))
}

fn passed(rep: &ExperimentReport, claim: &str) -> bool {
    rep.find(claim).map(|v| v.status == Status::Pass).unwrap_or(false)
}

#[test]
fn criterion_01_packet_norm_asymptotics() {
    let (rep, secs, _dir) = experiment(ExperimentId::VerifyNorms);
    let c = measured(&rep, "packet-norm-asymptotics", "ratio_cos");
    let s = measured(&rep, "packet-norm-asymptotics", "ratio_sin");
    let n = measured(&rep, "packet-norm-asymptotics", "n");
    let ok = n == 256.0 && (c - 1.0).abs() <= 0.05 && (s - 1.0).abs() <= 0.05 && secs <= 30.0;
    verdict_line(1, "packet norm asymptotics", ok, &format!("n={n} ratio_cos={c:.6} ratio_sin={s:.6} runtime={secs:.1}s"));
}

#[test]
fn criterion_02_interpolation_inequality() {
    let (rep, secs, _dir) = experiment(ExperimentId::VerifyNorms);
    let violations = measured(&rep, "interpolation-inequality", "violations");
    let fields = measured(&rep, "interpolation-inequality", "fields");
    let triples = measured(&rep, "interpolation-inequality", "triples");
    let ok = violations == 0.0 && fields == 1000.0 && triples == 3.0 && secs <= 30.0;
    verdict_line(
        2,
        "interpolation inequality",
        ok,
        &format!("violations={violations} fields={fields} triples={triples} runtime={secs:.1}s"),
    );
}

#[test]
fn criterion_03_littlewood_paley_partition() {
    let (rep, _, _dir) = experiment(ExperimentId::VerifyNorms);
    let unity = measured(&rep, "partition-of-unity", "max_error");
    let rec = measured(&rep, "lp-reconstruction", "max_relative_error");
    let fields = measured(&rep, "lp-reconstruction", "fields");
    let ok = unity <= 1e-12 && rec <= 1e-10 && fields == 100.0;
    verdict_line(3, "partition identity", ok, &format!("unity_error={unity:.3e} reconstruction={rec:.3e}"));
}

#[test]
fn criterion_04_residual_scaling() {
    let (rep, secs, _dir) = experiment(ExperimentId::Residuals);
    let e = measured(&rep, "residual-E-slope", "slope_E");
    let f = measured(&rep, "residual-F-slope", "slope_F");
    let ok = (e + 2.0).abs() <= 0.2 && (f + 1.625).abs() <= 0.2 && e <= -1.5 && f <= -1.5 && secs <= 60.0;
    verdict_line(4, "residual scaling", ok, &format!("slope_E={e:.4} slope_F={f:.4} runtime={secs:.1}s"));
}

#[test]
fn criterion_05_nonuniform_continuity() {
    let (rep, secs, _dir) = experiment(ExperimentId::Nonuniform);
    let slope = measured(&rep, "initial-distance-vanishes", "slope_d0");
    let d1 = measured(&rep, "separation-persists", "d1");
    let n = measured(&rep, "separation-persists", "n");
    let ok = rep.status() == Status::Pass && slope <= -0.525 && n == 128.0 && d1 >= 0.863 && secs <= 1200.0;
    verdict_line(
        5,
        "non-uniform continuity",
        ok,
        &format!("slope_d0={slope:.4} d1(n=128)={d1:.4} runtime={secs:.1}s status={}", rep.status()),
    );
}

#[test]
fn criterion_06_holder_continuity() {
    let (rep, secs, _dir) = experiment(ExperimentId::Holder);
    let s1 = measured(&rep, "holder-exponent-r1", "slope");
    let s15 = measured(&rep, "holder-exponent-r1.5", "slope");
    let ok = passed(&rep, "holder-exponent-r1")
        && passed(&rep, "holder-exponent-r1.5")
        && s1 >= 0.9
        && s15 >= 0.4
        && secs <= 900.0;
    verdict_line(
        6,
        "Hölder continuity",
        ok,
        &format!("slope(r=1)={s1:.4} slope(r=1.5)={s15:.4} runtime={secs:.1}s"),
    );
}

#[test]
fn criterion_07_conservation_and_apriori_bounds() {
    // smooth run: the α = 1 packet at n = 32 on its resolved grid
    let p = ApproxSolutionParams::new(1, 32, 0.75, 2.0).unwrap();
    let grid = p.packet_grid().unwrap();
    let (u, eta) = nonuniform_initial_data(&p, &grid).unwrap();
    let cfg = SolverConfig { besov_monitors: false, ..SolverConfig::default() };
    let rec = integrate(&SystemState::new(u, eta, 0.0).unwrap(), &cfg, &[]).unwrap();
    let smooth = conservation_report(&rec);

    let (rep, _, _dir) = experiment(ExperimentId::Blowup);
    let breaking_drift = measured(&rep, "mass-conservation", "drift_u").max(measured(&rep, "mass-conservation", "drift_eta"));
    let violations = measured(&rep, "apriori-bounds", "violations");
    let judged = measured(&rep, "apriori-bounds", "samples");
    let ok = rec.completed()
        && smooth.judged > 0
        && smooth.max_drift() <= 1e-10
        && breaking_drift <= 1e-10
        && violations == 0.0
        && judged > 0.0;
    verdict_line(
        7,
        "conservation and a-priori bounds",
        ok,
        &format!(
            "smooth_drift={:.3e} breaking_drift={breaking_drift:.3e} apriori_violations={violations} samples={judged}",
            smooth.max_drift()
        ),
    );
}

#[test]
fn criterion_08_wave_breaking() {
    let (rep, secs, _dir) = experiment(ExperimentId::Blowup);
    let t_halt = measured(&rep, "gradient-blowup-before-bound", "t_halt");
    let transport = measured(&rep, "transport-identity", "max_rel_error");
    let mono = measured(&rep, "slope-monotone-after-crossing", "violations");
    let ok = passed(&rep, "gradient-blowup-before-bound")
        && t_halt <= 0.25
        && passed(&rep, "slope-monotone-after-crossing")
        && transport <= 1e-4
        && secs <= 300.0;
    verdict_line(
        8,
        "wave breaking",
        ok,
        &format!("t_halt={t_halt:.5} monotone_violations={mono} transport={transport:.3e} runtime={secs:.1}s"),
    );
}

#[test]
fn criterion_09_inflation_statics() {
    let (rep, _, _dir) = experiment(ExperimentId::Inflation);
    let norm = measured(&rep, "data-normalisation", "max_abs_error");
    let slope = measured(&rep, "slope-matches-harmonic-sum", "max_relative_error");
    let growth = measured(&rep, "besov-growth-before-halt", "growth");
    let noted = rep.notes.iter().any(|n| n.contains("not reproducible"));
    let shells_12 = rep.find("slope-matches-harmonic-sum").unwrap().measured.contains_key("slope_N12");
    let ok = norm <= 1e-10 && slope <= 0.01 && shells_12 && noted && growth >= 5.0;
    verdict_line(
        9,
        "inflation statics",
        ok,
        &format!("norm_error={norm:.3e} slope_rel_error={slope:.3e} besov_growth={growth:.2} note_emitted={noted}"),
    );
}

fn evolve_fixed(state: &SystemState, dt: f64, steps: usize) -> SystemState {
    let mut s = state.clone();
    for _ in 0..steps {
        s = rk4_step(&s, dt).unwrap();
    }
    s
}

fn state_error(a: &SystemState, b: &SystemState) -> f64 {
    lebesgue_norm(&a.u.sub(&b.u).unwrap(), 2.0) + lebesgue_norm(&a.eta.sub(&b.eta).unwrap(), 2.0)
}

fn rk4_order() -> f64 {
    let grid = PeriodicGrid::new(2.0 * PI * 8.0, 1024).unwrap();
    let (u, eta, _) = breaking_data(4.0, 0.1, 1.0, &grid).unwrap();
    let s0 = SystemState::new(u, eta, 0.0).unwrap();
    let t = 0.1;
    let reference = evolve_fixed(&s0, t / 640.0, 640);
    let pairs: Vec<(f64, f64)> = [20usize, 40, 80]
        .iter()
        .map(|&k| (t / k as f64, state_error(&evolve_fixed(&s0, t / k as f64, k), &reference)))
        .collect();
    fit_power_law(&pairs).unwrap().slope
}

/// Largest pointwise gap to the linear flow `û(t) = e^{−iξt/(1+ξ²)} û₀`.
fn linear_oracle_error() -> f64 {
    let grid = PeriodicGrid::new(2.0 * PI * 8.0, 512).unwrap();
    let u0 = Field::from_fn(&grid, |x| 1e-6 * (-x * x).exp());
    let t = 1.0;
    let cfg = SolverConfig {
        dt: DtPolicy::Fixed { dt: 1e-3 },
        t_final: t,
        besov_monitors: false,
        ..SolverConfig::default()
    };
    let rec = integrate(&SystemState::new(u0.clone(), Field::zeros(&grid), 0.0).unwrap(), &cfg, &[]).unwrap();
    let end = rec.final_state.unwrap();
    let exact = apply_multiplier(&u0, |xi: f64| Complex64::from_polar(1.0, -xi * t / (1.0 + xi * xi))).unwrap();
    end.u.sub(&exact).unwrap().max_abs().max(end.eta.max_abs())
}

/// Largest relative change of the spectral monitors when `N` doubles.
fn resolution_doubling_change() -> f64 {
    let series = |points: usize| -> Vec<MonitorSample> {
        let grid = PeriodicGrid::new(2.0 * PI * 8.0, points).unwrap();
        let (u, eta, _) = breaking_data(4.0, 0.1, 1.0, &grid).unwrap();
        let cfg = SolverConfig {
            dt: DtPolicy::Fixed { dt: 1e-3 },
            t_final: 0.1,
            stride: 10,
            halt: HaltThresholds { ux_factor: 1e3, tail_frac: 0.1 },
            ..SolverConfig::default()
        };
        let rec = integrate(&SystemState::new(u, eta, 0.0).unwrap(), &cfg, &[]).unwrap();
        assert!(rec.completed());
        rec.monitors
    };
    let (coarse, fine) = (series(1024), series(2048));
    assert_eq!(coarse.len(), fine.len());
    let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs());
    coarse
        .iter()
        .zip(&fine)
        .map(|(a, b)| {
            assert!((a.t - b.t).abs() < 1e-12);
            [
                rel(a.hs_u, b.hs_u),
                rel(a.hsm1_eta, b.hsm1_eta),
                rel(a.l2_u, b.l2_u),
                rel(a.mass_eta, b.mass_eta),
                rel(a.b32_u, b.b32_u),
            ]
            .into_iter()
            .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

#[test]
fn criterion_10_solver_self_checks() {
    let order = rk4_order();
    let linear = linear_oracle_error();
    let doubling = resolution_doubling_change();
    let ok = order >= 3.7 && linear <= 1e-8 && doubling <= 1e-8;
    verdict_line(
        10,
        "solver self-checks",
        ok,
        &format!("rk4_order={order:.3} linear_oracle_error={linear:.3e} doubling_change={doubling:.3e}"),
    );
}

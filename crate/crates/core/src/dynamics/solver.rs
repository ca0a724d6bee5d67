use std::time::Instant;

use num_complex::Complex64;
use serde::Serialize;

use super::record::{
    CharacteristicSample, CharacteristicTrace, HaltReason, InitialQuantities, MonitorSample, RunRecord, Snapshot,
};
use crate::error::{Error, Result};
use crate::norms::{besov_from_coefficients, build_lp_partition, lebesgue_norm_of, sobolev_norm_of, LpPartition};
use crate::spectral::{
    dealias_in_place, interpolate_coefficients, symbols, tail_fraction_of, Field, PeriodicGrid,
};

/// The pair `(u, η)` at time `t`.
#[derive(Clone, Debug)]
pub struct SystemState {
    pub u: Field,
    pub eta: Field,
    pub t: f64,
}

impl SystemState {
    pub fn new(u: Field, eta: Field, t: f64) -> Result<Self> {
        if !u.grid().same_as(eta.grid()) {
            return Err(Error::GridMismatch);
        }
        Ok(Self { u, eta, t })
    }

    pub fn grid(&self) -> &PeriodicGrid {
        self.u.grid()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DtPolicy {
    Fixed { dt: f64 },
    /// `dt = cfl · h / max(1, ‖u‖_∞)`, capped at `1e-3 · t_final`.
    Adaptive { cfl: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HaltThresholds {
    /// Multiple of the initial `‖u_x‖_∞` that classifies a halt as gradient blow-up.
    pub ux_factor: f64,
    /// Tail fraction above which the run stops.
    pub tail_frac: f64,
}

impl Default for HaltThresholds {
    fn default() -> Self {
        Self { ux_factor: 1e3, tail_frac: 0.1 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolverConfig {
    pub dt: DtPolicy,
    pub t_final: f64,
    pub dealias: bool,
    pub halt: HaltThresholds,
    /// Steps between monitor samples.
    pub stride: usize,
    /// Sobolev index of the `Hs_u` / `Hsm1_eta` monitors.
    pub sobolev_s: f64,
    /// Monitor samples between stored snapshots; `None` keeps none.
    pub snapshot_every: Option<usize>,
    /// Record the Besov monitors (one inverse FFT per dyadic block).
    pub besov_monitors: bool,
    /// Hold `u` fixed and transport `η` only.
    pub freeze_velocity: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            dt: DtPolicy::Adaptive { cfl: 0.5 },
            t_final: 1.0,
            dealias: true,
            halt: HaltThresholds::default(),
            stride: 10,
            sobolev_s: 2.0,
            snapshot_every: None,
            besov_monitors: true,
            freeze_velocity: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let dt_ok = match self.dt {
            DtPolicy::Fixed { dt } => dt > 0.0 && dt.is_finite(),
            DtPolicy::Adaptive { cfl } => cfl > 0.0 && cfl.is_finite(),
        };
        if !dt_ok {
            return Err(Error::config(format!("invalid time step policy {:?}", self.dt)));
        }
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return Err(Error::config(format!("t_final must be finite and >= 0, got {}", self.t_final)));
        }
        if self.stride == 0 {
            return Err(Error::config("monitor stride must be positive"));
        }
        if !(self.halt.ux_factor > 0.0 && self.halt.tail_frac > 0.0) {
            return Err(Error::config("halt thresholds must be positive"));
        }
        if self.snapshot_every == Some(0) {
            return Err(Error::config("snapshot interval must be positive"));
        }
        Ok(())
    }
}

/// Spectral right-hand side shared by all entry points.
struct Evolver {
    grid: PeriodicGrid,
    ik: Vec<Complex64>,
    nonlocal: Vec<Complex64>,
    dealias: bool,
    freeze_velocity: bool,
}

type Spec = Vec<Complex64>;

/// RK4 state: spectra and characteristic variables `[q, q_x, ∫u_x]`.
#[derive(Clone)]
struct Stage {
    u: Spec,
    eta: Spec,
    chars: Vec<[f64; 3]>,
}

impl Stage {
    fn axpy(&self, a: f64, d: &Stage) -> Stage {
        Stage {
            u: self.u.iter().zip(&d.u).map(|(x, y)| x + y * a).collect(),
            eta: self.eta.iter().zip(&d.eta).map(|(x, y)| x + y * a).collect(),
            chars: self
                .chars
                .iter()
                .zip(&d.chars)
                .map(|(x, y)| [x[0] + a * y[0], x[1] + a * y[1], x[2] + a * y[2]])
                .collect(),
        }
    }

    fn is_finite(&self) -> bool {
        self.u.iter().chain(&self.eta).all(|c| c.re.is_finite() && c.im.is_finite())
            && self.chars.iter().all(|c| c.iter().all(|v| v.is_finite()))
    }
}

impl Evolver {
    fn new(grid: &PeriodicGrid, dealias: bool, freeze_velocity: bool) -> Self {
        Self {
            grid: grid.clone(),
            ik: grid.symbol(symbols::derivative).expect("iξ is admissible"),
            nonlocal: grid.symbol(symbols::nonlocal_wave).expect("iξ/(1+ξ²) is admissible"),
            dealias,
            freeze_velocity,
        }
    }

    fn times(&self, a: &[Complex64], m: &[Complex64]) -> Spec {
        a.iter().zip(m).map(|(x, y)| x * y).collect()
    }

    fn project(&self, mut s: Spec) -> Spec {
        if self.dealias {
            dealias_in_place(&self.grid, &mut s);
        }
        s
    }

    fn derivative(&self, st: &Stage) -> Stage {
        let g = &self.grid;
        let ux_hat = self.times(&st.u, &self.ik);
        let u = g.inverse_real(&st.u);
        let ux = g.inverse_real(&ux_hat);
        let eta = g.inverse_real(&st.eta);

        let flux: Vec<f64> = eta.iter().zip(&u).map(|(e, v)| e * v).collect();
        let flux_hat = self.project(g.forward_transform(&flux));
        let d_eta: Spec = self.times(&flux_hat, &self.ik).into_iter().map(|c| -c).collect();

        let d_u = if self.freeze_velocity {
            vec![Complex64::new(0.0, 0.0); st.u.len()]
        } else {
            let adv: Vec<f64> = u.iter().zip(&ux).map(|(a, b)| a * b).collect();
            let adv_hat = self.project(g.forward_transform(&adv));
            adv_hat
                .iter()
                .zip(st.eta.iter().zip(&st.u))
                .zip(&self.nonlocal)
                .map(|((a, (e, v)), m)| m * (e - v) - a)
                .collect()
        };

        let chars = st
            .chars
            .iter()
            .map(|c| {
                let vel = interpolate_coefficients(g, &st.u, c[0]);
                let grad = interpolate_coefficients(g, &ux_hat, c[0]);
                [vel, grad * c[1], grad]
            })
            .collect();
        Stage { u: d_u, eta: d_eta, chars }
    }

    fn rk4(&self, st: &Stage, dt: f64) -> Stage {
        let k1 = self.derivative(st);
        let k2 = self.derivative(&st.axpy(0.5 * dt, &k1));
        let k3 = self.derivative(&st.axpy(0.5 * dt, &k2));
        let k4 = self.derivative(&st.axpy(dt, &k3));
        let mut out = st.axpy(dt / 6.0, &k1);
        out = out.axpy(dt / 3.0, &k2);
        out = out.axpy(dt / 3.0, &k3);
        out.axpy(dt / 6.0, &k4)
    }

    fn stage_from(&self, state: &SystemState, chars: Vec<[f64; 3]>) -> Stage {
        Stage {
            u: self.project(state.u.coefficients().to_vec()),
            eta: self.project(state.eta.coefficients().to_vec()),
            chars,
        }
    }

    fn state_from(&self, st: &Stage, t: f64) -> SystemState {
        SystemState {
            u: Field::from_coefficients(&self.grid, st.u.clone()),
            eta: Field::from_coefficients(&self.grid, st.eta.clone()),
            t,
        }
    }
}

/// Time derivatives `(u_t, η_t)` with two-thirds dealiasing of the products.
pub fn rhs(state: &SystemState) -> Result<(Field, Field)> {
    let ev = Evolver::new(state.grid(), true, false);
    let st = Stage {
        u: state.u.coefficients().to_vec(),
        eta: state.eta.coefficients().to_vec(),
        chars: Vec::new(),
    };
    let d = ev.derivative(&st);
    if !d.is_finite() {
        return Err(Error::Numeric("right-hand side is not finite".into()));
    }
    Ok((
        Field::from_coefficients(state.grid(), d.u),
        Field::from_coefficients(state.grid(), d.eta),
    ))
}

/// One classical RK4 step of size `dt` with dealiased products.
pub fn rk4_step(state: &SystemState, dt: f64) -> Result<SystemState> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::config(format!("time step must be positive, got {dt}")));
    }
    let ev = Evolver::new(state.grid(), true, false);
    let st = Stage {
        u: state.u.coefficients().to_vec(),
        eta: state.eta.coefficients().to_vec(),
        chars: Vec::new(),
    };
    let next = ev.rk4(&st, dt);
    if !next.is_finite() {
        return Err(Error::Numeric("RK4 step produced non-finite values".into()));
    }
    Ok(ev.state_from(&next, state.t + dt))
}

struct Monitor<'a> {
    grid: &'a PeriodicGrid,
    ik: &'a [Complex64],
    partition: Option<LpPartition>,
    s: f64,
}

impl Monitor<'_> {
    fn sample(&self, st: &Stage, t: f64) -> (MonitorSample, Vec<f64>, Vec<f64>) {
        let g = self.grid;
        let h = g.spacing();
        let u = g.inverse_real(&st.u);
        let eta = g.inverse_real(&st.eta);
        let ux_hat: Spec = st.u.iter().zip(self.ik).map(|(a, b)| a * b).collect();
        let ux = g.inverse_real(&ux_hat);
        let (b32_u, b0inf_eta) = match &self.partition {
            Some(p) => (
                besov_from_coefficients(p, &st.u, 1.5, 2.0, f64::INFINITY),
                besov_from_coefficients(p, &st.eta, 0.0, f64::INFINITY, f64::INFINITY),
            ),
            None => (f64::NAN, f64::NAN),
        };
        let m = MonitorSample {
            t,
            hs_u: sobolev_norm_of(g, &st.u, self.s),
            hsm1_eta: sobolev_norm_of(g, &st.eta, self.s - 1.0),
            l2_u: sobolev_norm_of(g, &st.u, 0.0),
            linf_u: lebesgue_norm_of(&u, h, f64::INFINITY),
            l1_eta: lebesgue_norm_of(&eta, h, 1.0),
            mass_u: st.u[0].re,
            mass_eta: st.eta[0].re,
            linf_ux: lebesgue_norm_of(&ux, h, f64::INFINITY),
            b32_u,
            b0inf_eta,
            tail_u: tail_fraction_of(g, &st.u).unwrap_or(0.0),
            tail_eta: tail_fraction_of(g, &st.eta).unwrap_or(0.0),
        };
        (m, u, eta)
    }
}

fn boundary_ratio(samples: &[f64]) -> f64 {
    let max = samples.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if max == 0.0 {
        0.0
    } else {
        samples[0].abs() / max
    }
}

const BOUNDARY_TOLERANCE: f64 = 1e-10;

/// Integrates from `state` until `cfg.t_final` or a halt condition.
///
/// Characteristics start at each of `seeds`. Numeric failures end the run with
/// [`HaltReason::Nonfinite`]; only invalid configurations are errors.
pub fn integrate(state: &SystemState, cfg: &SolverConfig, seeds: &[f64]) -> Result<RunRecord> {
    cfg.validate()?;
    let started = Instant::now();
    let grid = state.grid().clone();
    let box_half = 0.5 * grid.length();
    if let Some(&x) = seeds.iter().find(|&&x| !(x >= -box_half && x < box_half)) {
        return Err(Error::config(format!("characteristic seed {x} lies outside the box")));
    }
    let ev = Evolver::new(&grid, cfg.dealias, cfg.freeze_velocity);
    let partition = if cfg.besov_monitors { build_lp_partition(&grid).ok() } else { None };
    let monitor = Monitor { grid: &grid, ik: &ev.ik, partition, s: cfg.sobolev_s };

    let mut st = ev.stage_from(state, seeds.iter().map(|&x| [x, 1.0, 0.0]).collect());
    let mut t = state.t;
    let t_final = state.t + cfg.t_final;

    let (m0, u_samples, eta_samples) = monitor.sample(&st, t);
    // quadrature of the data as given, before any dealiasing
    let (u_given, eta_given, h) = (state.u.samples(), state.eta.samples(), grid.spacing());
    let initial = InitialQuantities {
        l2_u0: lebesgue_norm_of(u_given, h, 2.0),
        linf_u0: lebesgue_norm_of(u_given, h, f64::INFINITY),
        l1_u0: lebesgue_norm_of(u_given, h, 1.0),
        l1_eta0: lebesgue_norm_of(eta_given, h, 1.0),
        linf_eta0: lebesgue_norm_of(eta_given, h, f64::INFINITY),
        eta0_min: state.eta.min(),
        mass_u0: m0.mass_u,
        mass_eta0: m0.mass_eta,
        linf_ux0: m0.linf_ux,
    };
    let mut traces: Vec<CharacteristicTrace> = seeds
        .iter()
        .map(|&x0| CharacteristicTrace {
            x0,
            eta0_at_x0: interpolate_coefficients(&grid, &st.eta, x0),
            samples: Vec::new(),
        })
        .collect();
    let mut rec = RunRecord {
        config: cfg.clone(),
        box_length: grid.length(),
        points: grid.points(),
        initial,
        monitors: Vec::new(),
        traces: Vec::new(),
        snapshots: Vec::new(),
        halt: HaltReason::Completed,
        t_end: t,
        steps: 0,
        warnings: Vec::new(),
        wall_time_s: 0.0,
        final_state: None,
    };
    let mut boundary_warned = false;
    let mut record_sample = |rec: &mut RunRecord,
                             traces: &mut Vec<CharacteristicTrace>,
                             st: &Stage,
                             t: f64,
                             sample: Option<(MonitorSample, Vec<f64>, Vec<f64>)>| {
        let (m, u, eta) = sample.unwrap_or_else(|| monitor.sample(st, t));
        if !boundary_warned && (boundary_ratio(&u) > BOUNDARY_TOLERANCE || boundary_ratio(&eta) > BOUNDARY_TOLERANCE)
        {
            boundary_warned = true;
            rec.warnings.push(format!(
                "t = {t:.6}: boundary values exceed {BOUNDARY_TOLERANCE:e} of the field maxima; enlarge the box"
            ));
        }
        let ux_hat: Spec = st.u.iter().zip(&ev.ik).map(|(a, b)| a * b).collect();
        for (trace, c) in traces.iter_mut().zip(&st.chars) {
            let eta_q = interpolate_coefficients(&grid, &st.eta, c[0]);
            trace.samples.push(CharacteristicSample {
                t,
                q: grid.reduce(c[0]),
                qx: c[1],
                qx_exp: c[2].exp(),
                m: interpolate_coefficients(&grid, &ux_hat, c[0]),
                eta_qx: eta_q * c[1],
            });
        }
        let n = rec.monitors.len();
        if let Some(every) = cfg.snapshot_every {
            if n.is_multiple_of(every) {
                rec.snapshots.push(Snapshot { t, u, eta });
            }
        }
        rec.monitors.push(m);
    };
    record_sample(&mut rec, &mut traces, &st, t, Some((m0, u_samples, eta_samples)));

    let ux0 = rec.initial.linf_ux0;
    let mut since_monitor = 0usize;
    let mut last_recorded_t = t;
    let eps = 1e-12 * t_final.abs().max(1.0);
    while t < t_final - eps {
        let mut dt = match cfg.dt {
            DtPolicy::Fixed { dt } => dt,
            DtPolicy::Adaptive { cfl } => {
                let umax = grid.inverse_real(&st.u).iter().fold(0.0_f64, |m, v| m.max(v.abs()));
                (cfl * grid.spacing() / umax.max(1.0)).min(1e-3 * cfg.t_final)
            }
        };
        if t + dt > t_final - eps {
            dt = t_final - t;
        }
        let next = ev.rk4(&st, dt);
        if !next.is_finite() {
            rec.halt = HaltReason::Nonfinite;
            rec.warnings.push(format!("non-finite state after t = {t:.6}"));
            break;
        }
        st = next;
        t = if t_final - (t + dt) <= eps { t_final } else { t + dt };
        rec.steps += 1;
        since_monitor += 1;

        let tail = tail_fraction_of(&grid, &st.u)
            .unwrap_or(0.0)
            .max(tail_fraction_of(&grid, &st.eta).unwrap_or(0.0));
        if tail > cfg.halt.tail_frac {
            let ux_hat: Spec = st.u.iter().zip(&ev.ik).map(|(a, b)| a * b).collect();
            let grad = grid.inverse_real(&ux_hat).iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            rec.halt = if grad > cfg.halt.ux_factor * ux0 {
                HaltReason::GradientBlowup
            } else {
                HaltReason::ResolutionLoss
            };
            record_sample(&mut rec, &mut traces, &st, t, None);
            last_recorded_t = t;
            break;
        }
        if since_monitor >= cfg.stride || t >= t_final {
            record_sample(&mut rec, &mut traces, &st, t, None);
            last_recorded_t = t;
            since_monitor = 0;
        }
    }
    if rec.halt == HaltReason::Completed && t > last_recorded_t {
        record_sample(&mut rec, &mut traces, &st, t, None);
    }
    for trace in &traces {
        if trace.samples.iter().any(|s| !(s.qx > 0.0)) && rec.halt == HaltReason::Completed {
            rec.warnings.push(format!("q_x lost positivity along the characteristic from {}", trace.x0));
        }
    }
    rec.t_end = t;
    rec.traces = traces;
    rec.final_state = Some(ev.state_from(&st, t));
    rec.wall_time_s = started.elapsed().as_secs_f64();
    Ok(rec)
}

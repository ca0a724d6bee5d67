//! C ABI over the `fwlab` core.
//!
//! Every object crosses the boundary as an opaque pointer that the caller
//! releases with the matching `*_free` function. Fallible calls return an
//! [`FwStatus`] and write results through out-pointers; on failure the
//! message is available from [`fw_last_error`] on the same thread. Panics
//! never unwind into C: they are reported as [`FwStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use fwlab::constructions::breaking_data;
use fwlab::dynamics::{integrate, DtPolicy, HaltReason, HaltThresholds, RunRecord, SolverConfig, SystemState};
use fwlab::norms::{besov_norm, lebesgue_norm, sobolev_norm};
use fwlab::spectral::{dealias, derivative, nonlocal_wave_operator, spectral_tail_fraction};
use fwlab::{Error, Field, PeriodicGrid};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FwStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Numeric = 3,
    GridMismatch = 4,
    Precondition = 5,
    Io = 6,
    Panic = 7,
}

/// How a run ended.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FwHalt {
    Completed = 0,
    GradientBlowup = 1,
    ResolutionLoss = 2,
    Nonfinite = 3,
}

/// Periodic grid handle.
pub struct FwGrid(PeriodicGrid);
/// Real field handle.
pub struct FwField(Field);
/// Completed integration handle.
pub struct FwRunRecord(RunRecord);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    let c = CString::new(text).expect("interior NULs were replaced");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> FwStatus {
    match err {
        Error::Config(_) | Error::Parse(_) => FwStatus::InvalidArgument,
        Error::SymmetryViolation { .. } | Error::Numeric(_) | Error::UndefinedRatio(_) => FwStatus::Numeric,
        Error::GridMismatch => FwStatus::GridMismatch,
        Error::Precondition(_) => FwStatus::Precondition,
        Error::Io(_) => FwStatus::Io,
    }
}

/// Runs `f`, translating errors and panics into status codes.
fn guard<F: FnOnce() -> Result<(), FwStatus>>(f: F) -> FwStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FwStatus::Ok,
        Ok(Err(status)) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            FwStatus::Panic
        }
    }
}

fn fail(err: Error) -> FwStatus {
    let status = status_of(&err);
    set_error(err.to_string());
    status
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, FwStatus> {
    if p.is_null() {
        set_error(format!("{what} is null"));
        Err(FwStatus::NullPointer)
    } else {
        Ok(&*p)
    }
}

fn check_out<T>(p: *mut T, what: &str) -> Result<(), FwStatus> {
    if p.is_null() {
        set_error(format!("{what} is null"));
        Err(FwStatus::NullPointer)
    } else {
        Ok(())
    }
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

/// Message of the last failed call on this thread, or NULL. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn fw_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn fw_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Creates a grid of `points` (a power of two >= 8) on `[-length/2, length/2)`.
///
/// # Safety
/// `out` must be valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn fw_grid_new(length: f64, points: usize, out: *mut *mut FwGrid) -> FwStatus {
    guard(|| {
        check_out(out, "out")?;
        let g = PeriodicGrid::new(length, points).map_err(fail)?;
        *out = boxed(FwGrid(g));
        Ok(())
    })
}

/// # Safety
/// `grid` must be NULL or a pointer returned by `fw_grid_new`, freed once.
#[no_mangle]
pub unsafe extern "C" fn fw_grid_free(grid: *mut FwGrid) {
    if !grid.is_null() {
        drop(Box::from_raw(grid));
    }
}

/// Number of grid points, 0 for NULL.
///
/// # Safety
/// `grid` must be NULL or a live grid handle.
#[no_mangle]
pub unsafe extern "C" fn fw_grid_points(grid: *const FwGrid) -> usize {
    grid.as_ref().map_or(0, |g| g.0.points())
}

/// Box length, NaN for NULL.
///
/// # Safety
/// `grid` must be NULL or a live grid handle.
#[no_mangle]
pub unsafe extern "C" fn fw_grid_length(grid: *const FwGrid) -> f64 {
    grid.as_ref().map_or(f64::NAN, |g| g.0.length())
}

/// Copies `len` samples (which must equal the grid size) into a new field.
///
/// # Safety
/// `samples` must point to `len` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fw_field_from_samples(
    grid: *const FwGrid,
    samples: *const f64,
    len: usize,
    out: *mut *mut FwField,
) -> FwStatus {
    guard(|| {
        let g = deref(grid, "grid")?;
        deref(samples, "samples")?;
        check_out(out, "out")?;
        if len != g.0.points() {
            set_error(format!("expected {} samples, got {len}", g.0.points()));
            return Err(FwStatus::InvalidArgument);
        }
        let data = std::slice::from_raw_parts(samples, len).to_vec();
        let f = Field::new(&g.0, data).map_err(fail)?;
        *out = boxed(FwField(f));
        Ok(())
    })
}

/// # Safety
/// `field` must be NULL or a live field handle, freed once.
#[no_mangle]
pub unsafe extern "C" fn fw_field_free(field: *mut FwField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// Number of samples, 0 for NULL.
///
/// # Safety
/// `field` must be NULL or a live field handle.
#[no_mangle]
pub unsafe extern "C" fn fw_field_len(field: *const FwField) -> usize {
    field.as_ref().map_or(0, |f| f.0.samples().len())
}

/// Copies the samples into `out`, which must hold exactly `len` doubles.
///
/// # Safety
/// `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn fw_field_samples(field: *const FwField, out: *mut f64, len: usize) -> FwStatus {
    guard(|| {
        let f = deref(field, "field")?;
        check_out(out, "out")?;
        let s = f.0.samples();
        if len != s.len() {
            set_error(format!("buffer holds {len} values, field has {}", s.len()));
            return Err(FwStatus::InvalidArgument);
        }
        ptr::copy_nonoverlapping(s.as_ptr(), out, len);
        Ok(())
    })
}

unsafe fn scalar(field: *const FwField, out: *mut f64, op: impl FnOnce(&Field) -> Result<f64, Error>) -> FwStatus {
    guard(|| {
        let f = deref(field, "field")?;
        check_out(out, "out")?;
        *out = op(&f.0).map_err(fail)?;
        Ok(())
    })
}

unsafe fn unary(field: *const FwField, out: *mut *mut FwField, op: impl FnOnce(&Field) -> Field) -> FwStatus {
    guard(|| {
        let f = deref(field, "field")?;
        check_out(out, "out")?;
        *out = boxed(FwField(op(&f.0)));
        Ok(())
    })
}

/// Discrete `L^p` norm; `p` may be `INFINITY`.
///
/// # Safety
/// `field` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fw_lebesgue_norm(field: *const FwField, p: f64, out: *mut f64) -> FwStatus {
    scalar(field, out, |f| {
        if p >= 1.0 {
            Ok(lebesgue_norm(f, p))
        } else {
            Err(Error::Config(format!("p must be >= 1, got {p}")))
        }
    })
}

/// `H^s` norm.
///
/// # Safety
/// `field` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fw_sobolev_norm(field: *const FwField, s: f64, out: *mut f64) -> FwStatus {
    scalar(field, out, |f| {
        if s.is_finite() {
            Ok(sobolev_norm(f, s))
        } else {
            Err(Error::Config(format!("s must be finite, got {s}")))
        }
    })
}

/// Besov `B^s_{p,r}` norm; `p` and `r` may be `INFINITY`.
///
/// # Safety
/// `field` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fw_besov_norm(field: *const FwField, s: f64, p: f64, r: f64, out: *mut f64) -> FwStatus {
    scalar(field, out, |f| besov_norm(f, s, p, r))
}

/// Fraction of retained spectral energy in the top octave.
///
/// # Safety
/// `field` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fw_tail_fraction(field: *const FwField, out: *mut f64) -> FwStatus {
    scalar(field, out, spectral_tail_fraction)
}

/// Spectral derivative `∂ₓf` as a new field.
///
/// # Safety
/// `field` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fw_derivative(field: *const FwField, out: *mut *mut FwField) -> FwStatus {
    unary(field, out, derivative)
}

/// `∂ₓ(1 − ∂ₓ²)⁻¹ f` as a new field.
///
/// # Safety
/// `field` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fw_nonlocal_wave(field: *const FwField, out: *mut *mut FwField) -> FwStatus {
    unary(field, out, nonlocal_wave_operator)
}

/// Two-thirds dealiasing as a new field.
///
/// # Safety
/// `field` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fw_dealias(field: *const FwField, out: *mut *mut FwField) -> FwStatus {
    unary(field, out, dealias)
}

/// Breaking datum `u₀ = −a x e^{−x²/2}`, `η₀ = A e^{−x²/(2w²)}` and its
/// certified time bound. An inadmissible datum is still returned, with
/// `admissible` set to 0 and `t_bound` possibly infinite.
///
/// # Safety
/// `grid` must be a live handle; every out-pointer must be writable.
#[no_mangle]
pub unsafe extern "C" fn fw_breaking_data(
    grid: *const FwGrid,
    a: f64,
    amplitude: f64,
    width: f64,
    u_out: *mut *mut FwField,
    eta_out: *mut *mut FwField,
    t_bound: *mut f64,
    admissible: *mut i32,
) -> FwStatus {
    guard(|| {
        let g = deref(grid, "grid")?;
        check_out(u_out, "u_out")?;
        check_out(eta_out, "eta_out")?;
        check_out(t_bound, "t_bound")?;
        check_out(admissible, "admissible")?;
        let (u, eta, cert) = breaking_data(a, amplitude, width, &g.0).map_err(fail)?;
        *u_out = boxed(FwField(u));
        *eta_out = boxed(FwField(eta));
        *t_bound = cert.t_bound;
        *admissible = cert.admissible as i32;
        Ok(())
    })
}

/// Solver settings passed by value.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct FwSolverOptions {
    pub t_final: f64,
    /// Adaptive step `cfl·h/max(1, ‖u‖∞)` when `fixed_dt <= 0`.
    pub cfl: f64,
    /// Fixed step when positive.
    pub fixed_dt: f64,
    pub ux_factor: f64,
    pub tail_frac: f64,
    pub stride: usize,
    /// Sobolev index of the energy monitors.
    pub sobolev_s: f64,
    pub dealias: i32,
}

/// Defaults of the core solver.
#[no_mangle]
pub extern "C" fn fw_solver_options_default() -> FwSolverOptions {
    let d = SolverConfig::default();
    let cfl = match d.dt {
        DtPolicy::Adaptive { cfl } => cfl,
        DtPolicy::Fixed { .. } => 0.5,
    };
    FwSolverOptions {
        t_final: d.t_final,
        cfl,
        fixed_dt: 0.0,
        ux_factor: d.halt.ux_factor,
        tail_frac: d.halt.tail_frac,
        stride: d.stride,
        sobolev_s: d.sobolev_s,
        dealias: d.dealias as i32,
    }
}

/// Integrates `(u, η)` from `t = 0`, tracing characteristics from `seeds`.
///
/// # Safety
/// `u`, `eta` must be live handles on the same grid; `seeds` must point to
/// `n_seeds` doubles (or be NULL with `n_seeds = 0`); `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fw_integrate(
    u: *const FwField,
    eta: *const FwField,
    options: FwSolverOptions,
    seeds: *const f64,
    n_seeds: usize,
    out: *mut *mut FwRunRecord,
) -> FwStatus {
    guard(|| {
        let (u, eta) = (deref(u, "u")?, deref(eta, "eta")?);
        check_out(out, "out")?;
        let seeds = if n_seeds == 0 {
            &[][..]
        } else {
            deref(seeds, "seeds")?;
            std::slice::from_raw_parts(seeds, n_seeds)
        };
        let cfg = SolverConfig {
            dt: if options.fixed_dt > 0.0 {
                DtPolicy::Fixed { dt: options.fixed_dt }
            } else {
                DtPolicy::Adaptive { cfl: options.cfl }
            },
            t_final: options.t_final,
            dealias: options.dealias != 0,
            halt: HaltThresholds { ux_factor: options.ux_factor, tail_frac: options.tail_frac },
            stride: options.stride,
            sobolev_s: options.sobolev_s,
            ..SolverConfig::default()
        };
        let state = SystemState::new(u.0.clone(), eta.0.clone(), 0.0).map_err(fail)?;
        let rec = integrate(&state, &cfg, seeds).map_err(fail)?;
        *out = boxed(FwRunRecord(rec));
        Ok(())
    })
}

/// # Safety
/// `record` must be NULL or a live record handle, freed once.
#[no_mangle]
pub unsafe extern "C" fn fw_run_record_free(record: *mut FwRunRecord) {
    if !record.is_null() {
        drop(Box::from_raw(record));
    }
}

/// How the run ended; `Nonfinite` for NULL.
///
/// # Safety
/// `record` must be NULL or a live record handle.
#[no_mangle]
pub unsafe extern "C" fn fw_run_record_halt(record: *const FwRunRecord) -> FwHalt {
    match record.as_ref().map(|r| r.0.halt) {
        Some(HaltReason::Completed) => FwHalt::Completed,
        Some(HaltReason::GradientBlowup) => FwHalt::GradientBlowup,
        Some(HaltReason::ResolutionLoss) => FwHalt::ResolutionLoss,
        Some(HaltReason::Nonfinite) | None => FwHalt::Nonfinite,
    }
}

/// Final time reached, NaN for NULL.
///
/// # Safety
/// `record` must be NULL or a live record handle.
#[no_mangle]
pub unsafe extern "C" fn fw_run_record_t_end(record: *const FwRunRecord) -> f64 {
    record.as_ref().map_or(f64::NAN, |r| r.0.t_end)
}

/// Number of monitor samples, 0 for NULL.
///
/// # Safety
/// `record` must be NULL or a live record handle.
#[no_mangle]
pub unsafe extern "C" fn fw_run_record_samples(record: *const FwRunRecord) -> usize {
    record.as_ref().map_or(0, |r| r.0.monitors.len())
}

/// Final `u` of the run as a new field.
///
/// # Safety
/// `record` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fw_run_record_final_u(record: *const FwRunRecord, out: *mut *mut FwField) -> FwStatus {
    guard(|| {
        let r = deref(record, "record")?;
        check_out(out, "out")?;
        let state = r.0.final_state.as_ref().ok_or_else(|| {
            set_error("record holds no final state");
            FwStatus::Precondition
        })?;
        *out = boxed(FwField(state.u.clone()));
        Ok(())
    })
}

/// Serialises the record as JSON into a new string released by `fw_string_free`.
///
/// # Safety
/// `record` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fw_run_record_to_json(record: *const FwRunRecord, out: *mut *mut c_char) -> FwStatus {
    guard(|| {
        let r = deref(record, "record")?;
        check_out(out, "out")?;
        let json = r.0.to_json().map_err(fail)?;
        *out = CString::new(json)
            .map_err(|_| {
                set_error("JSON contains a NUL byte");
                FwStatus::Numeric
            })?
            .into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must be NULL or a string returned by this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn fw_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

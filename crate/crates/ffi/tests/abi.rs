use std::ffi::CStr;
use std::f64::consts::PI;
use std::ptr;

use fwlab_ffi::*;

unsafe fn last_error() -> String {
    let p = fw_last_error();
    assert!(!p.is_null());
    CStr::from_ptr(p).to_string_lossy().into_owned()
}

unsafe fn grid(length: f64, points: usize) -> *mut FwGrid {
    let mut g = ptr::null_mut();
    assert_eq!(fw_grid_new(length, points, &mut g), FwStatus::Ok);
    g
}

unsafe fn field(g: *const FwGrid, f: impl Fn(f64) -> f64) -> *mut FwField {
    let n = fw_grid_points(g);
    let l = fw_grid_length(g);
    let samples: Vec<f64> = (0..n).map(|i| f(-0.5 * l + l * i as f64 / n as f64)).collect();
    let mut out = ptr::null_mut();
    assert_eq!(fw_field_from_samples(g, samples.as_ptr(), n, &mut out), FwStatus::Ok);
    out
}

#[test]
fn grid_lifecycle_and_errors() {
    unsafe {
        let g = grid(2.0 * PI, 64);
        assert_eq!(fw_grid_points(g), 64);
        assert!((fw_grid_length(g) - 2.0 * PI).abs() < 1e-15);
        fw_grid_free(g);
        fw_grid_free(ptr::null_mut());

        let mut bad = ptr::null_mut();
        assert_eq!(fw_grid_new(2.0 * PI, 100, &mut bad), FwStatus::InvalidArgument);
        assert!(bad.is_null());
        assert!(last_error().contains("100"));
        assert_eq!(fw_grid_new(1.0, 64, ptr::null_mut()), FwStatus::NullPointer);
        assert!(fw_grid_points(ptr::null()) == 0);
    }
}

#[test]
fn field_round_trip_and_norms() {
    unsafe {
        let g = grid(2.0 * PI, 64);
        let f = field(g, |x| (3.0 * x).cos());
        assert_eq!(fw_field_len(f), 64);
        let mut back = vec![0.0; 64];
        assert_eq!(fw_field_samples(f, back.as_mut_ptr(), 64), FwStatus::Ok);
        assert!((back[0] - (3.0 * -PI).cos()).abs() < 1e-15);
        assert_eq!(fw_field_samples(f, back.as_mut_ptr(), 10), FwStatus::InvalidArgument);

        let mut v = 0.0;
        assert_eq!(fw_sobolev_norm(f, 1.0, &mut v), FwStatus::Ok);
        assert!((v - (PI * 10.0).sqrt()).abs() < 1e-12);
        assert_eq!(fw_lebesgue_norm(f, f64::INFINITY, &mut v), FwStatus::Ok);
        assert!((v - 1.0).abs() < 1e-12);
        assert_eq!(fw_lebesgue_norm(f, 0.5, &mut v), FwStatus::InvalidArgument);
        assert_eq!(fw_besov_norm(f, 1.0, 2.0, 2.0, &mut v), FwStatus::Ok);
        assert!(v > 0.0);
        assert_eq!(fw_tail_fraction(f, &mut v), FwStatus::Ok);
        assert!(v < 1e-25);

        let mut d = ptr::null_mut();
        assert_eq!(fw_derivative(f, &mut d), FwStatus::Ok);
        let mut ds = vec![0.0; 64];
        fw_field_samples(d, ds.as_mut_ptr(), 64);
        let x0 = -PI;
        assert!((ds[0] + 3.0 * (3.0 * x0).sin()).abs() < 1e-12);
        let mut w = ptr::null_mut();
        assert_eq!(fw_nonlocal_wave(f, &mut w), FwStatus::Ok);
        let mut a = ptr::null_mut();
        assert_eq!(fw_dealias(f, &mut a), FwStatus::Ok);
        for h in [d, w, a, f] {
            fw_field_free(h);
        }

        let nan = vec![f64::NAN; 64];
        let mut out = ptr::null_mut();
        assert_eq!(fw_field_from_samples(g, nan.as_ptr(), 64, &mut out), FwStatus::Numeric);
        assert_eq!(fw_field_from_samples(g, nan.as_ptr(), 32, &mut out), FwStatus::InvalidArgument);
        fw_grid_free(g);
    }
}

#[test]
fn breaking_run_through_the_abi() {
    unsafe {
        let g = grid(2.0 * PI * 8.0, 4096);
        let (mut u, mut eta, mut t_bound, mut ok) = (ptr::null_mut(), ptr::null_mut(), 0.0, 0);
        assert_eq!(fw_breaking_data(g, 8.0, 0.1, 1.0, &mut u, &mut eta, &mut t_bound, &mut ok), FwStatus::Ok);
        assert_eq!(ok, 1);
        assert!((t_bound - 0.25).abs() < 1e-10);

        let mut opts = fw_solver_options_default();
        opts.t_final = t_bound;
        opts.ux_factor = 3.0;
        opts.tail_frac = 1e-3;
        let seeds = [0.0];
        let mut rec = ptr::null_mut();
        assert_eq!(fw_integrate(u, eta, opts, seeds.as_ptr(), 1, &mut rec), FwStatus::Ok);
        assert_ne!(fw_run_record_halt(rec), FwHalt::Completed);
        assert!(fw_run_record_t_end(rec) < t_bound);
        assert!(fw_run_record_samples(rec) > 1);

        let mut json = ptr::null_mut();
        assert_eq!(fw_run_record_to_json(rec, &mut json), FwStatus::Ok);
        let text = CStr::from_ptr(json).to_str().unwrap();
        assert!(text.contains("\"halt\""));
        fw_string_free(json);

        let mut fin = ptr::null_mut();
        assert_eq!(fw_run_record_final_u(rec, &mut fin), FwStatus::Ok);
        assert_eq!(fw_field_len(fin), 4096);
        fw_field_free(fin);
        fw_run_record_free(rec);

        opts.stride = 0;
        let mut rec = ptr::null_mut();
        assert_eq!(fw_integrate(u, eta, opts, ptr::null(), 0, &mut rec), FwStatus::InvalidArgument);
        assert!(last_error().contains("stride"));

        let other = grid(2.0 * PI, 64);
        let small = field(other, |x| x.sin());
        opts.stride = 10;
        assert_eq!(fw_integrate(u, small, opts, ptr::null(), 0, &mut rec), FwStatus::GridMismatch);
        for h in [u, eta, small] {
            fw_field_free(h);
        }
        fw_grid_free(other);
        fw_grid_free(g);
    }
}

#[test]
fn header_declares_every_export() {
    let header = include_str!("../include/fwlab.h");
    for name in [
        "fw_last_error",
        "fw_version",
        "fw_grid_new",
        "fw_grid_free",
        "fw_field_from_samples",
        "fw_field_samples",
        "fw_sobolev_norm",
        "fw_besov_norm",
        "fw_breaking_data",
        "fw_integrate",
        "fw_run_record_to_json",
        "fw_string_free",
        "FW_STATUS_OK",
        "FW_HALT_GRADIENT_BLOWUP",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
    let v = unsafe { CStr::from_ptr(fw_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

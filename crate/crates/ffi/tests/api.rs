use std::ffi::{CStr, CString};
use std::ptr;

use ionx_ffi::*;

const SMALL: &str = "grid=scaled\nsystem.d=25\nsystem.delta=20\n";

fn small_model() -> *mut IonxModel {
    let cfg = CString::new(SMALL).unwrap();
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { ionx_model_new(cfg.as_ptr(), &mut m) }, IonxStatus::Ok);
    assert!(!m.is_null());
    m
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(ionx_last_error_message()) }
        .to_string_lossy()
        .into_owned()
}

#[test]
fn equilibrium_profile_round_trip() {
    let m = small_model();
    let mut n = 0usize;
    assert_eq!(unsafe { ionx_model_compartments(m, &mut n) }, IonxStatus::Ok);
    assert!(n > 0);
    let mut eq = ptr::null_mut();
    assert_eq!(unsafe { ionx_equilibrium(m, &mut eq) }, IonxStatus::Ok);
    let mut c1 = vec![0.0; n];
    let mut c2 = vec![0.0; n];
    let mut phi = vec![0.0; n];
    unsafe {
        assert_eq!(ionx_state_concentration(eq, 0, c1.as_mut_ptr(), n), IonxStatus::Ok);
        assert_eq!(ionx_state_concentration(eq, 1, c2.as_mut_ptr(), n), IonxStatus::Ok);
        assert_eq!(ionx_state_potential(eq, phi.as_mut_ptr(), n), IonxStatus::Ok);
    }
    for k in 0..n {
        let product = c1[k] * c2[k];
        assert!((product - 1.0).abs() < 1e-6, "c1*c2 = {product} at {k}");
    }
    let mut j = f64::NAN;
    assert_eq!(unsafe { ionx_exit_flux(m, eq, &mut j) }, IonxStatus::Ok);
    assert!(j.abs() < 1e-9);
    unsafe {
        ionx_state_free(eq);
        ionx_model_free(m);
    }
}

#[test]
fn simulate_and_read_columns() {
    let m = small_model();
    let drive = CString::new("step(3)").unwrap();
    let mut s = ptr::null_mut();
    assert_eq!(
        unsafe { ionx_simulate(m, IonxMode::Potentiostatic, drive.as_ptr(), 2.0, &mut s) },
        IonxStatus::Ok
    );
    let mut len = 0usize;
    assert_eq!(unsafe { ionx_series_len(s, &mut len) }, IonxStatus::Ok);
    assert_eq!(len, 21);
    let mut tau = vec![0.0; len];
    let mut flux = vec![0.0; len];
    unsafe {
        assert_eq!(
            ionx_series_column(s, IonxSeriesColumn::Tau, tau.as_mut_ptr(), len),
            IonxStatus::Ok
        );
        assert_eq!(
            ionx_series_column(s, IonxSeriesColumn::ExitFlux, flux.as_mut_ptr(), len),
            IonxStatus::Ok
        );
    }
    assert!((tau[len - 1] - 2.0).abs() < 1e-12);
    assert!(flux[len - 1] > 0.0);

    let mut short = vec![0.0; len - 1];
    let status = unsafe { ionx_series_column(s, IonxSeriesColumn::Drive, short.as_mut_ptr(), len - 1) };
    assert_eq!(status, IonxStatus::BufferTooSmall);
    assert!(last_error().contains("need 21"));
    unsafe {
        ionx_series_free(s);
        ionx_model_free(m);
    }
}

#[test]
fn steady_state_flux_grows_with_potential() {
    let m = small_model();
    let mut n = 0usize;
    unsafe { ionx_model_compartments(m, &mut n) };
    let mut fluxes = Vec::new();
    for v in [1.0, 3.0] {
        let mut st = ptr::null_mut();
        assert_eq!(
            unsafe { ionx_steady_state(m, IonxMode::Potentiostatic, v, &mut st) },
            IonxStatus::Ok
        );
        let mut j = 0.0;
        unsafe {
            ionx_exit_flux(m, st, &mut j);
            ionx_state_free(st);
        }
        fluxes.push(j);
    }
    assert!(fluxes[0] > 0.0 && fluxes[1] > fluxes[0]);
    unsafe { ionx_model_free(m) };
}

#[test]
fn errors_set_status_and_message() {
    let mut m = ptr::null_mut();
    let bad = CString::new("system.X=-1").unwrap();
    let status = unsafe { ionx_model_new(bad.as_ptr(), &mut m) };
    assert_ne!(status, IonxStatus::Ok);
    assert!(m.is_null());
    assert!(!last_error().is_empty());

    let garbage = CString::new("no equals sign").unwrap();
    assert_eq!(unsafe { ionx_model_new(garbage.as_ptr(), &mut m) }, IonxStatus::Parse);

    let mut n = 0usize;
    assert_eq!(
        unsafe { ionx_model_compartments(ptr::null(), &mut n) },
        IonxStatus::NullPointer
    );
    assert!(last_error().contains("model"));

    let model = small_model();
    assert_eq!(last_error(), "");
    let drive = CString::new("wobble(1)").unwrap();
    let mut s = ptr::null_mut();
    assert_eq!(
        unsafe { ionx_simulate(model, IonxMode::Potentiostatic, drive.as_ptr(), 1.0, &mut s) },
        IonxStatus::Parse
    );
    let mut eq = ptr::null_mut();
    unsafe { ionx_equilibrium(model, &mut eq) };
    let mut buf = [0.0; 4];
    assert_eq!(
        unsafe { ionx_state_concentration(eq, 7, buf.as_mut_ptr(), 4) },
        IonxStatus::InvalidArgument
    );
    unsafe {
        ionx_state_free(eq);
        ionx_model_free(model);
        ionx_model_free(ptr::null_mut());
        ionx_state_free(ptr::null_mut());
        ionx_series_free(ptr::null_mut());
        ionx_string_free(ptr::null_mut());
    }
}

#[test]
fn netlist_text_is_terminated() {
    let m = small_model();
    let drive = CString::new("step(1)").unwrap();
    let mut text = ptr::null_mut();
    assert_eq!(
        unsafe { ionx_netlist(m, IonxMode::Galvanostatic, drive.as_ptr(), &mut text) },
        IonxStatus::Ok
    );
    let body = unsafe { CStr::from_ptr(text) }.to_str().unwrap().to_owned();
    assert!(body.trim_end().ends_with(".end"));
    assert!(body.lines().any(|l| l.starts_with("I IA ")));
    unsafe {
        ionx_string_free(text);
        ionx_model_free(m);
    }
}

#[test]
fn version_matches_package() {
    let v = unsafe { CStr::from_ptr(ionx_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

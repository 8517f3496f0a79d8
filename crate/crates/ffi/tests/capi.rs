use std::ffi::{c_char, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use typical_clt_ffi::*;

fn last_error() -> String {
    let len = tc_last_error_length();
    let mut buf = vec![0 as c_char; len + 1];
    let full = unsafe { tc_last_error_message(buf.as_mut_ptr(), buf.len()) };
    assert_eq!(full, len);
    let bytes: Vec<u8> = buf[..len].iter().map(|&c| c as u8).collect();
    String::from_utf8(bytes).unwrap()
}

#[test]
fn sphere_law_round_trip() {
    let mut law = ptr::null_mut();
    assert_eq!(unsafe { tc_sphere_law_new(3, &mut law) }, TcStatus::Ok);
    let (mut d, mut c, mut j) = (0.0, 0.0, 0.0);
    unsafe {
        assert_eq!(tc_sphere_law_density(law, 0.5, &mut d), TcStatus::Ok);
        assert_eq!(tc_sphere_law_cdf(law, 0.0, &mut c), TcStatus::Ok);
        assert_eq!(tc_sphere_law_jn(law, 0.0, &mut j), TcStatus::Ok);
        tc_sphere_law_free(law);
    }
    // n = 3: uniform on [−√3, √3]
    assert!((d - 1.0 / (2.0 * 3f64.sqrt())).abs() < 1e-12);
    assert!((c - 0.5).abs() < 1e-12);
    assert!((j - 1.0).abs() < 1e-12);
}

#[test]
fn bad_dimension_reports_domain_error() {
    let mut law = ptr::null_mut();
    assert_eq!(unsafe { tc_sphere_law_new(1, &mut law) }, TcStatus::Domain);
    assert!(law.is_null());
    assert!(!last_error().is_empty());
}

#[test]
fn null_arguments_are_rejected() {
    let mut out = 0.0;
    assert_eq!(unsafe { tc_sphere_law_cdf(ptr::null(), 0.0, &mut out) }, TcStatus::NullArgument);
    assert!(last_error().contains("law"));
    assert_eq!(unsafe { tc_sphere_law_new(4, ptr::null_mut()) }, TcStatus::NullArgument);
    unsafe {
        tc_sphere_law_free(ptr::null_mut());
        tc_system_free(ptr::null_mut());
    }
    assert_eq!(unsafe { tc_system_dim(ptr::null()) }, 0);
}

#[test]
fn error_message_is_truncated_and_terminated() {
    let mut law = ptr::null_mut();
    unsafe { tc_sphere_law_new(0, &mut law) };
    let full = tc_last_error_length();
    let mut buf = [1 as c_char; 5];
    assert_eq!(unsafe { tc_last_error_message(buf.as_mut_ptr(), buf.len()) }, full);
    assert_eq!(buf[4], 0);
}

#[test]
fn unknown_system_is_a_config_error() {
    let name = CString::new("no-such-system").unwrap();
    let mut sys = ptr::null_mut();
    assert_eq!(unsafe { tc_system_new(name.as_ptr(), 8, &mut sys) }, TcStatus::Config);
}

#[test]
fn weighted_sums_are_seeded_and_checked() {
    let name = CString::new("iid-rademacher").unwrap();
    let mut sys = ptr::null_mut();
    assert_eq!(unsafe { tc_system_new(name.as_ptr(), 4, &mut sys) }, TcStatus::Ok);
    assert_eq!(unsafe { tc_system_dim(sys) }, 4);

    let theta = [1.0, 1.0, 1.0, 1.0];
    let mut a = [0.0; 64];
    let mut b = [0.0; 64];
    unsafe {
        assert_eq!(tc_system_weighted_sums(sys, theta.as_ptr(), 4, 64, 7, a.as_mut_ptr()), TcStatus::Ok);
        assert_eq!(tc_system_weighted_sums(sys, theta.as_ptr(), 4, 64, 7, b.as_mut_ptr()), TcStatus::Ok);
        assert_eq!(tc_system_weighted_sums(sys, theta.as_ptr(), 3, 64, 7, b.as_mut_ptr()), TcStatus::Domain);
    }
    assert_eq!(a, b);
    // equal weights 1/2 on ±1 entries give values in {−2, −1, 0, 1, 2}
    assert!(a.iter().all(|v| (v * 2.0 - (v * 2.0).round()).abs() < 1e-12 && v.abs() <= 2.0 + 1e-12));

    let mut m2 = 0.0;
    let mut lower = true;
    unsafe {
        assert_eq!(tc_maximal_lp_norm(sys, 2.0, 1, &mut m2, &mut lower), TcStatus::Ok);
        tc_system_free(sys);
    }
    assert!((m2 - 1.0).abs() < 1e-12);
    assert!(!lower);
}

#[test]
fn gaussian_system_has_closed_form_m2() {
    let eig = [2.0, 1.0, 0.5, 0.5];
    let mut sys = ptr::null_mut();
    let mut m2 = 0.0;
    unsafe {
        assert_eq!(tc_system_new_gaussian(eig.as_ptr(), eig.len(), &mut sys), TcStatus::Ok);
        assert_eq!(tc_maximal_lp_norm(sys, 2.0, 0, &mut m2, ptr::null_mut()), TcStatus::Ok);
        tc_system_free(sys);
    }
    assert!((m2 - 2f64.sqrt()).abs() < 1e-12);
}

#[test]
fn rademacher_sample_distance_to_normal() {
    let samples = [-1.0, 1.0, -1.0, 1.0];
    let mut rho = 0.0;
    assert_eq!(unsafe { tc_kolmogorov_to_normal(samples.as_ptr(), 4, &mut rho) }, TcStatus::Ok);
    // Φ(1) − 1/2
    assert!((rho - 0.341_344_746_068_542_9).abs() < 1e-9);
    assert_eq!(unsafe { tc_kolmogorov_to_normal(ptr::null(), 0, &mut rho) }, TcStatus::Domain);
}

#[test]
fn mean_distance_through_the_abi() {
    let name = CString::new("trigonometric").unwrap();
    let target = CString::new("phi").unwrap();
    let mut sys = ptr::null_mut();
    let (mut mean, mut se) = (0.0, 0.0);
    unsafe {
        assert_eq!(tc_system_new(name.as_ptr(), 16, &mut sys), TcStatus::Ok);
        let status = tc_mean_theta_distance(sys, target.as_ptr(), 8, 2000, 100, 42, &mut mean, &mut se);
        assert_eq!(status, TcStatus::Ok);
        let bad = CString::new("psi").unwrap();
        let status = tc_mean_theta_distance(sys, bad.as_ptr(), 8, 2000, 100, 42, &mut mean, ptr::null_mut());
        assert_eq!(status, TcStatus::Config);
        tc_system_free(sys);
    }
    assert!(mean > 0.0 && mean < 0.2, "mean {mean}");
    assert!(se >= 0.0);
}

#[test]
fn generated_header_compiles_as_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/typical_clt.h");
    let text = std::fs::read_to_string(&header).expect("header generated by build.rs");
    for symbol in ["tc_sphere_law_new", "tc_system_weighted_sums", "tc_mean_theta_distance", "TC_STATUS_PANIC"] {
        assert!(text.contains(symbol), "{symbol} missing from header");
    }
    let Ok(status) = Command::new("cc")
        .args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c"])
        .arg(&header)
        .status()
    else {
        eprintln!("no C compiler found, skipping syntax check");
        return;
    };
    assert!(status.success());
}

use std::ffi::{CStr, CString};
use std::process::Command;
use std::ptr;

use mspace_ffi::*;

fn last_error() -> String {
    let p = mspace_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn z2() -> *mut MspaceSpace {
    let spec = CString::new("z2").unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { mspace_space_parse(spec.as_ptr(), &mut out) }, MspaceStatus::Ok);
    out
}

#[test]
fn toeplitz_shift_round_trip() {
    let u = z2();
    assert_eq!(unsafe { mspace_space_dim(u) }, 2);
    let symbol = CString::new(r#"{"laurent":{"1":[1,0]}}"#).unwrap();
    let mut op = ptr::null_mut();
    assert_eq!(unsafe { mspace_tto_new(u, u, symbol.as_ptr(), &mut op) }, MspaceStatus::Ok);
    assert_eq!(unsafe { (mspace_operator_rows(op), mspace_operator_cols(op)) }, (2, 2));

    let mut buf = [0.0; 8];
    assert_eq!(unsafe { mspace_operator_entries(op, buf.as_mut_ptr(), 7) }, MspaceStatus::BufferTooSmall);
    assert_eq!(unsafe { mspace_operator_entries(op, buf.as_mut_ptr(), 8) }, MspaceStatus::Ok);
    let expected = [0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0];
    assert!(buf.iter().zip(expected).all(|(a, b)| (a - b).abs() < 1e-12), "{buf:?}");

    let (mut member, mut disp, mut rebuild) = (false, 0.0, 0.0);
    assert_eq!(unsafe { mspace_is_tto(op, 1e-9, &mut member, &mut disp, &mut rebuild) }, MspaceStatus::Ok);
    assert!(member && rebuild < 1e-9);
    assert_eq!(unsafe { mspace_is_tho(op, 1e-9, &mut member, &mut disp, &mut rebuild) }, MspaceStatus::Ok);
    assert!(!member);

    let (mut kind, mut re, mut im) = (MspaceSedlock::None, f64::NAN, f64::NAN);
    assert_eq!(unsafe { mspace_sedlock_class(op, 1e-9, &mut kind, &mut re, &mut im) }, MspaceStatus::Ok);
    assert_eq!(kind, MspaceSedlock::Finite);
    assert!(re.abs() < 1e-9 && im.abs() < 1e-9);

    unsafe {
        mspace_operator_free(op);
        mspace_space_free(u);
    }
}

#[test]
fn entries_wrap_back_into_an_operator() {
    let u = z2();
    let entries = [0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0];
    let mut op = ptr::null_mut();
    assert_eq!(unsafe { mspace_operator_from_entries(u, u, entries.as_ptr(), &mut op) }, MspaceStatus::Ok);
    let (mut member, mut disp, mut rebuild) = (false, 0.0, 0.0);
    assert_eq!(unsafe { mspace_is_tto(op, 1e-9, &mut member, &mut disp, &mut rebuild) }, MspaceStatus::Ok);
    assert!(member);
    unsafe {
        mspace_operator_free(op);
        mspace_space_free(u);
    }
}

#[test]
fn clark_points_are_plus_minus_one() {
    let u = z2();
    let (mut points, mut weights) = ([0.0; 4], [0.0; 2]);
    assert_eq!(unsafe { mspace_clark(u, 1.0, 0.0, points.as_mut_ptr(), weights.as_mut_ptr(), 2) }, MspaceStatus::Ok);
    let mut re = [points[0], points[2]];
    re.sort_by(f64::total_cmp);
    assert!((re[0] + 1.0).abs() < 1e-12 && (re[1] - 1.0).abs() < 1e-12);
    assert!(weights.iter().all(|w| (w - 0.5).abs() < 1e-12));
    unsafe { mspace_space_free(u) };
}

#[test]
fn errors_carry_codes_and_messages() {
    let mut out = ptr::null_mut();
    let zeros = [1.5, 0.0];
    assert_eq!(unsafe { mspace_space_new(zeros.as_ptr(), 1, 1.0, 0.0, &mut out) }, MspaceStatus::Domain);
    assert!(last_error().contains("outside the unit circle"));
    assert!(out.is_null());

    assert_eq!(unsafe { mspace_space_new(zeros.as_ptr(), 1, 1.0, 0.0, ptr::null_mut()) }, MspaceStatus::Domain);
    let zeros = [0.5, 0.0];
    assert_eq!(unsafe { mspace_space_new(zeros.as_ptr(), 1, 1.0, 0.0, ptr::null_mut()) }, MspaceStatus::NullPointer);

    let bad = CString::new("z0").unwrap();
    assert_eq!(unsafe { mspace_space_parse(bad.as_ptr(), &mut out) }, MspaceStatus::Input);
    assert_eq!(unsafe { mspace_space_parse(ptr::null(), &mut out) }, MspaceStatus::NullPointer);

    let (u, v) = (z2(), {
        let spec = CString::new("z3").unwrap();
        let mut s = ptr::null_mut();
        unsafe { mspace_space_parse(spec.as_ptr(), &mut s) };
        s
    });
    let entries = [0.0; 12];
    let mut a = ptr::null_mut();
    let mut b = ptr::null_mut();
    assert_eq!(unsafe { mspace_operator_from_entries(u, v, entries.as_ptr(), &mut a) }, MspaceStatus::Ok);
    assert_eq!(unsafe { mspace_operator_from_entries(u, u, entries.as_ptr(), &mut b) }, MspaceStatus::Ok);
    let (mut kind, mut re, mut im) = (MspaceSedlock::None, 0.0, 0.0);
    assert_eq!(unsafe { mspace_sedlock_class(a, 1e-9, &mut kind, &mut re, &mut im) }, MspaceStatus::SpaceMismatch);
    unsafe {
        mspace_operator_free(a);
        mspace_operator_free(b);
        mspace_space_free(u);
        mspace_space_free(v);
        mspace_space_free(ptr::null_mut());
        mspace_string_free(ptr::null_mut());
    }
}

#[test]
fn suite_report_is_json() {
    let filter = CString::new("clark, sedlock.adjoint").unwrap();
    let (mut passed, mut report) = (false, ptr::null_mut());
    assert_eq!(unsafe { mspace_verify_suite(5, 3, filter.as_ptr(), &mut passed, &mut report) }, MspaceStatus::Ok);
    assert!(passed);
    let text = unsafe { CStr::from_ptr(report) }.to_str().unwrap().to_owned();
    unsafe { mspace_string_free(report) };
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(value["checks"].as_array().unwrap().len(), 2);

    let nothing = CString::new("nothing").unwrap();
    assert_eq!(unsafe { mspace_verify_suite(5, 3, nothing.as_ptr(), &mut passed, &mut report) }, MspaceStatus::Input);
}

#[test]
fn version_is_a_c_string() {
    let v = unsafe { CStr::from_ptr(mspace_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_compiles_as_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/mspace.h");
    let Ok(status) = Command::new("cc").args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c", header]).status() else {
        eprintln!("no C compiler; skipping header check");
        return;
    };
    assert!(status.success());
}

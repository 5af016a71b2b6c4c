use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use domino_cyl_ffi::*;

fn take(s: *mut std::ffi::c_char) -> String {
    assert!(!s.is_null());
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_string();
    unsafe { dc_string_free(s) };
    out
}

fn system(w: i64, h: i64, kind: DcCocycle) -> *mut DcSystem {
    let mut d = ptr::null_mut();
    assert_eq!(unsafe { dc_disk_rectangle(w, h, &mut d) }, DcStatus::Ok);
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { dc_system_new(d, kind, 0, &mut s) }, DcStatus::Ok);
    unsafe { dc_disk_free(d) };
    s
}

#[test]
fn counts_through_the_abi() {
    let s = system(4, 4, DcCocycle::Kernel);
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { dc_count(s, 1, &mut out) }, DcStatus::Ok);
    assert_eq!(take(out), "36");
    assert_eq!(unsafe { dc_count(s, 4, &mut out) }, DcStatus::Ok);
    assert_eq!(take(out), "5051532105");
    unsafe { dc_system_free(s) };
}

#[test]
fn polynomial_json_matches_for_both_cocycles() {
    let mut seen = Vec::new();
    for kind in [DcCocycle::Kernel, DcCocycle::Connector] {
        let s = system(2, 3, kind);
        let mut out = ptr::null_mut();
        assert_eq!(unsafe { dc_twist_polynomial(s, 4, &mut out) }, DcStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
        seen.push(v);
        unsafe { dc_system_free(s) };
    }
    assert_eq!(seen[0], seen[1]);
}

#[test]
fn parse_errors_set_status_and_message() {
    let text = CString::new("#x\n##\n").unwrap();
    let mut d = ptr::null_mut();
    assert_eq!(
        unsafe { dc_disk_parse(text.as_ptr(), &mut d) },
        DcStatus::InvalidInput
    );
    assert!(d.is_null());
    let msg = unsafe { CStr::from_ptr(dc_last_error()) }.to_str().unwrap();
    assert!(msg.contains("unexpected character"), "{msg}");

    let unbalanced = CString::new("###\n").unwrap();
    assert_eq!(
        unsafe { dc_disk_parse(unbalanced.as_ptr(), &mut d) },
        DcStatus::InvalidInput
    );
    assert_eq!(
        unsafe { dc_disk_parse(ptr::null(), &mut d) },
        DcStatus::NullPointer
    );
    assert_eq!(
        unsafe { dc_count(ptr::null(), 1, &mut ptr::null_mut()) },
        DcStatus::NullPointer
    );
}

#[test]
fn plug_bound_is_a_resource_error() {
    let mut d = ptr::null_mut();
    assert_eq!(unsafe { dc_disk_rectangle(4, 4, &mut d) }, DcStatus::Ok);
    assert_eq!(unsafe { dc_disk_cells(d) }, 16);
    let mut s = ptr::null_mut();
    assert_eq!(
        unsafe { dc_system_new(d, DcCocycle::Kernel, 10, &mut s) },
        DcStatus::ResourceBound
    );
    unsafe { dc_disk_free(d) };
}

#[test]
fn samples_are_reproducible() {
    let s = system(2, 3, DcCocycle::Kernel);
    let draw = |seed, i| {
        let mut t = 0i64;
        assert_eq!(
            unsafe { dc_sample_twist(s, 6, seed, i, &mut t) },
            DcStatus::Ok
        );
        t
    };
    let a: Vec<i64> = (0..50).map(|i| draw(3, i)).collect();
    let b: Vec<i64> = (0..50).map(|i| draw(3, i)).collect();
    assert_eq!(a, b);
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { dc_spectral_report(s, 4, &mut out) }, DcStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
    assert!(v["lambda1"].as_f64().unwrap() > 1.0);
    assert_eq!(v["etaCurve"].as_array().unwrap().len(), 5);
    unsafe { dc_system_free(s) };
}

const C_PROGRAM: &str = r###"
#include <stdio.h>
#include <string.h>
#include "domino_cyl.h"

int main(void) {
    DcDisk *d = NULL;
    DcSystem *s = NULL;
    char *count = NULL;
    if (dc_disk_parse("##\n##\n", &d) != DC_STATUS_OK) return 10;
    if (dc_system_new(d, DC_COCYCLE_KERNEL, 0, &s) != DC_STATUS_OK) return 11;
    if (dc_count(s, 2, &count) != DC_STATUS_OK) return 12;
    int ok = strcmp(count, "9") == 0;
    dc_string_free(count);
    dc_system_free(s);
    dc_disk_free(d);
    if (dc_disk_parse("#\n", &d) != DC_STATUS_INVALID_INPUT) return 13;
    printf("%s\n", dc_last_error());
    return ok ? 0 : 14;
}
"###;

#[test]
fn header_compiles_and_links_from_c() {
    let include = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");
    // test binaries live in <target>/<profile>/deps, the library one level up
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().unwrap().parent().unwrap();
    let lib = profile_dir.join("libdomino_cyl_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    let bin = dir.path().join("main");
    std::fs::write(&src, C_PROGRAM).unwrap();
    let status = Command::new("cc")
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(&include)
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&bin).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("unbalanced"));
}

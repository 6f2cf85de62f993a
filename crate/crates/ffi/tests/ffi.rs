use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;
use veerkit_ffi::*;

fn cs(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn take(p: *mut std::ffi::c_char) -> String {
    let s = CStr::from_ptr(p).to_str().unwrap().to_string();
    vk_string_free(p);
    s
}

#[test]
fn figure_eight_handle() {
    unsafe {
        let mut v = ptr::null_mut();
        assert_eq!(vk_veering_from_sig(cs("cPcbbbiht_12").as_ptr(), &mut v), VkStatus::Ok);
        assert_eq!(vk_veering_tet_count(v), 2);
        assert_eq!(vk_veering_edge_count(v), 2);
        let mut cols = Vec::new();
        for e in 0..2 {
            let mut c = VkColour::Red;
            assert_eq!(vk_veering_edge_colour(v, e, &mut c), VkStatus::Ok);
            cols.push(c);
        }
        cols.sort_by_key(|c| *c as i32);
        assert_eq!(cols, vec![VkColour::Red, VkColour::Blue]);
        let mut c = VkColour::Red;
        assert_eq!(vk_veering_edge_colour(v, 7, &mut c), VkStatus::OutOfRange);
        vk_veering_free(v);
    }
}

#[test]
fn parse_errors_map_to_status() {
    unsafe {
        let mut v = ptr::null_mut();
        assert_eq!(vk_veering_from_sig(cs("cPcbbbiht_1").as_ptr(), &mut v), VkStatus::ParseError);
        assert!(v.is_null());
        let msg = CStr::from_ptr(vk_last_error()).to_str().unwrap();
        assert!(msg.contains("angle string"), "{msg}");
        assert_eq!(vk_veering_from_sig(ptr::null(), &mut v), VkStatus::NullPointer);
        assert_eq!(vk_veering_from_sig(cs("fLLQcbcdeeemgopdp_21012").as_ptr(), &mut v), VkStatus::CheckFailed);
    }
}

#[test]
fn check_json_report() {
    unsafe {
        let mut out = ptr::null_mut();
        assert_eq!(vk_check_json(cs("cPcbbbiht_12").as_ptr(), &mut out), VkStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
        assert_eq!(v["tet_count"], 2);
        assert_eq!(v["checks"]["veering"], true);
        let mut out = ptr::null_mut();
        assert_eq!(vk_check_json(cs("fLLQcbcdeeemgopdp_21012").as_ptr(), &mut out), VkStatus::CheckFailed);
        let v: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
        assert_eq!(v["checks"]["taut"], false);
    }
}

#[test]
fn order_oracle_handle() {
    unsafe {
        let mut v = ptr::null_mut();
        assert_eq!(vk_veering_from_sig(cs("cPcbbbiht_12").as_ptr(), &mut v), VkStatus::Ok);
        let mut o = ptr::null_mut();
        assert_eq!(vk_order_new(v, 64, &mut o), VkStatus::Ok);
        let mut s = 0i8;
        let (a, b, c) = (cs("t0.v0"), cs("t0.v0"), cs("t1.v2"));
        assert_eq!(vk_order_triple(o, a.as_ptr(), b.as_ptr(), c.as_ptr(), &mut s), VkStatus::Ok);
        assert_eq!(s, 0);
        let (a, b, c) = (cs("t0.v0"), cs("t0.v1"), cs("t1.v2/g0/g1"));
        assert_eq!(vk_order_triple(o, a.as_ptr(), b.as_ptr(), c.as_ptr(), &mut s), VkStatus::Ok);
        let mut s2 = 0i8;
        assert_eq!(vk_order_triple(o, b.as_ptr(), a.as_ptr(), c.as_ptr(), &mut s2), VkStatus::Ok);
        assert_eq!(s, -s2);
        assert_ne!(s, 0);
        assert!(vk_order_witness_size(o) >= 1);
        let bad = cs("nonsense");
        assert_eq!(vk_order_triple(o, bad.as_ptr(), b.as_ptr(), c.as_ptr(), &mut s), VkStatus::ParseError);
        vk_order_free(o);
        vk_veering_free(v);
    }
}

#[test]
fn roundtrip_json() {
    unsafe {
        let mut v = ptr::null_mut();
        assert_eq!(vk_veering_from_sig(cs("cPcbbbiht_12").as_ptr(), &mut v), VkStatus::Ok);
        let mut out = ptr::null_mut();
        assert_eq!(vk_roundtrip_json(v, -1, 64, &mut out), VkStatus::Ok);
        let r: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
        assert_eq!(r["reconstruction"]["isomorphic"], true);
        assert_eq!(r["reconstruction"]["colours_match"], true);
        let mut out = ptr::null_mut();
        assert_eq!(vk_roundtrip_json(v, 0, 64, &mut out), VkStatus::InsufficientContinent);
        vk_veering_free(v);
    }
}

#[test]
fn null_handles_are_harmless() {
    unsafe {
        vk_veering_free(ptr::null_mut());
        vk_order_free(ptr::null_mut());
        vk_string_free(ptr::null_mut());
        assert_eq!(vk_veering_tet_count(ptr::null()), 0);
        let mut out = ptr::null_mut();
        assert_eq!(vk_roundtrip_json(ptr::null(), 1, 64, &mut out), VkStatus::NullPointer);
    }
}

fn header() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include").join("veerkit_ffi.h")
}

#[test]
fn header_declares_the_interface() {
    let h = std::fs::read_to_string(header()).unwrap();
    for name in [
        "vk_veering_from_sig",
        "vk_veering_free",
        "vk_check_json",
        "vk_roundtrip_json",
        "vk_order_triple",
        "vk_last_error",
        "vk_string_free",
        "VK_STATUS_DEPTH_EXHAUSTED",
        "typedef struct VkVeering VkVeering",
    ] {
        assert!(h.contains(name), "header lacks {name}");
    }
}

#[test]
fn c_program_links_against_the_static_library() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let target = std::env::var_os("CARGO_TARGET_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| manifest.join("../../target"));
    let lib = ["debug", "debug/deps", "release", "release/deps"]
        .iter()
        .map(|p| target.join(p).join("libveerkit_ffi.a"))
        .filter_map(|p| Some((std::fs::metadata(&p).ok()?.modified().ok()?, p)))
        .max()
        .map(|x| x.1);
    let (Some(lib), Ok(_)) = (lib, Command::new("cc").arg("--version").output()) else {
        eprintln!("static library or C compiler not available; C link test not run");
        return;
    };
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    std::fs::write(
        &src,
        r#"#include <stdio.h>
#include "veerkit_ffi.h"
int main(void) {
    VkVeering *v = NULL;
    if (vk_veering_from_sig("cPcbbbiht_12", &v) != VK_STATUS_OK) return 1;
    if (vk_veering_tet_count(v) != 2) return 2;
    char *json = NULL;
    if (vk_check_json("cPcbbbiht_12", &json) != VK_STATUS_OK) return 3;
    vk_string_free(json);
    VkVeering *bad = NULL;
    if (vk_veering_from_sig("cPcbbbiht_1", &bad) != VK_STATUS_PARSE_ERROR) return 4;
    vk_veering_free(v);
    printf("ok\n");
    return 0;
}
"#,
    )
    .unwrap();
    let exe = dir.path().join("main");
    let st = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(st.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "C program exit {:?}", out.status);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "ok");
}

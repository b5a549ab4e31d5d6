use std::ffi::{c_char, CStr, CString};
use std::path::Path;
use std::ptr;

use flgauge_ffi::*;

fn fixture(name: &str) -> CString {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name);
    CString::new(std::fs::read_to_string(path).unwrap()).unwrap()
}

fn parse(text: &CString) -> *mut FlgModule {
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { flg_module_parse(text.as_ptr(), &mut m) }, FlgStatus::Ok);
    assert!(!m.is_null());
    m
}

fn last_error() -> String {
    let mut buf = vec![0 as c_char; 512];
    let mut needed = 0;
    assert_eq!(unsafe { flg_last_error(buf.as_mut_ptr(), buf.len(), &mut needed) }, FlgStatus::Ok);
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_str().unwrap().to_owned()
}

#[test]
fn emit_round_trips_fixture() {
    let text = fixture("ext_p3_t1.fl");
    let m = parse(&text);
    let mut needed = 0;
    assert_eq!(unsafe { flg_module_emit(m, ptr::null_mut(), 0, &mut needed) }, FlgStatus::BufferTooSmall);
    let mut buf = vec![0 as c_char; needed];
    assert_eq!(unsafe { flg_module_emit(m, buf.as_mut_ptr(), buf.len(), &mut needed) }, FlgStatus::Ok);
    let out = unsafe { CStr::from_ptr(buf.as_ptr()) };
    assert_eq!(out.to_bytes(), text.as_bytes());
    unsafe { flg_module_free(m) };
}

#[test]
fn parse_error_sets_status_and_message() {
    let bad = CString::new("flgauge-module 1\np 3\nN 1\nf 1\nkind fl\nwmax zero\n").unwrap();
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { flg_module_parse(bad.as_ptr(), &mut m) }, FlgStatus::Parse);
    assert!(m.is_null());
    assert!(last_error().contains("line 6"), "{}", last_error());
}

#[test]
fn null_handles_are_rejected() {
    let mut passed = false;
    assert_eq!(unsafe { flg_module_validate(ptr::null(), &mut passed) }, FlgStatus::NullPointer);
    assert_eq!(unsafe { flg_module_parse(ptr::null(), ptr::null_mut()) }, FlgStatus::NullPointer);
    unsafe { flg_module_free(ptr::null_mut()) };
}

#[test]
fn validate_and_unit_self_ext() {
    let text = fixture("unit.fl");
    let u = parse(&text);
    let mut passed = false;
    assert_eq!(unsafe { flg_module_validate(u, &mut passed) }, FlgStatus::Ok);
    assert!(passed);
    unsafe { flg_module_free(u) };

    let k = parse(&fixture("k2_p3.fl"));
    let mut lifted = ptr::null_mut();
    assert_eq!(unsafe { flg_module_lift(k, &mut lifted) }, FlgStatus::Ok);
    assert_eq!(unsafe { flg_module_validate(lifted, &mut passed) }, FlgStatus::Ok);
    assert!(passed);
    unsafe { flg_module_free(lifted) };
    unsafe { flg_module_free(k) };

    let w = parse(&fixture("w1.fl"));
    assert_eq!(unsafe { flg_module_lift(w, &mut lifted) }, FlgStatus::InvalidArgument);
    assert!(!last_error().is_empty());
    unsafe { flg_module_free(w) };
}

#[test]
fn hom_ext_of_nonsplit_extension() {
    let e = parse(&fixture("ext_p3_t1.fl"));
    let (mut hom, mut ext) = (usize::MAX, usize::MAX);
    assert_eq!(unsafe { flg_hom_ext1(e, e, &mut hom, &mut ext) }, FlgStatus::Ok);
    assert!(hom >= 1);
    let mut twisted = ptr::null_mut();
    assert_eq!(unsafe { flg_module_twist(e, 1, &mut twisted) }, FlgStatus::Ok);
    let mut passed = false;
    assert_eq!(unsafe { flg_module_validate(twisted, &mut passed) }, FlgStatus::Ok);
    assert!(passed);
    unsafe {
        flg_module_free(twisted);
        flg_module_free(e);
    }
}

#[test]
fn extension_class_and_sen() {
    let e = parse(&fixture("ext_p3_t1.fl"));
    let mut t = [9u64; 4];
    let mut splits = true;
    assert_eq!(unsafe { flg_extension_class(e, t.as_mut_ptr(), t.len(), &mut splits) }, FlgStatus::Ok);
    assert_eq!(t[0], 1);
    assert!(!splits);

    let mut d = ptr::null_mut();
    assert_eq!(unsafe { flg_sen_apply(e, &mut d) }, FlgStatus::Ok);
    assert_eq!(unsafe { flg_extension_class(d, t.as_mut_ptr(), t.len(), &mut splits) }, FlgStatus::Ok);
    assert!(splits);
    unsafe {
        flg_module_free(d);
        flg_module_free(e);
    }

    let s = parse(&fixture("ext_p3_split.fl"));
    assert_eq!(unsafe { flg_extension_class(s, t.as_mut_ptr(), t.len(), &mut splits) }, FlgStatus::Ok);
    assert_eq!(t[0], 0);
    assert!(splits);
    unsafe { flg_module_free(s) };
}

#[test]
fn syntomic_unit_in_weight_one() {
    let u = parse(&fixture("unit.fl"));
    let (mut h0, mut h1) = (u64::MAX, u64::MAX);
    assert_eq!(unsafe { flg_syntomic_lengths(u, 1, &mut h0, &mut h1) }, FlgStatus::Ok);
    assert_eq!((h0, h1), (0, 4));
    unsafe { flg_module_free(u) };
}

#[test]
fn mazur_numbers_and_criterion() {
    let mut v = 0;
    assert_eq!(unsafe { flg_mazur_number(3, 0, &mut v) }, FlgStatus::InvalidArgument);
    assert_eq!(unsafe { flg_mazur_number(4, 1, &mut v) }, FlgStatus::InvalidArgument);
    assert_eq!(unsafe { flg_mazur_number(3, 4, &mut v) }, FlgStatus::Ok);
    assert_eq!(v, 3);
    let mut passed = false;
    assert_eq!(unsafe { flg_acceptance_criterion(1, &mut passed) }, FlgStatus::Ok);
    assert!(passed);
    assert_eq!(unsafe { flg_acceptance_criterion(12, &mut passed) }, FlgStatus::InvalidArgument);
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("include/flgauge.h")).unwrap();
    assert!(header.contains("#ifndef FLGAUGE_H"));
    assert!(header.contains("typedef struct FlgModule FlgModule;"));
    assert!(header.contains("FLG_STATUS_BUFFER_TOO_SMALL = 6"));
    for f in [
        "flg_last_error", "flg_module_parse", "flg_module_free", "flg_module_emit", "flg_module_validate",
        "flg_hom_ext1", "flg_syntomic_lengths", "flg_module_twist", "flg_module_lift", "flg_sen_apply",
        "flg_extension_class", "flg_mazur_number", "flg_acceptance_criterion",
    ] {
        assert!(header.contains(&format!("{f}(")), "{f} missing");
    }
}

#[test]
fn header_compiles_as_c() {
    let Ok(cc) = which_cc() else { return };
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let out = std::process::Command::new(cc)
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-x", "c", "-"])
        .arg(format!("-I{}", dir.display()))
        .stdin(std::process::Stdio::piped())
        .stderr(std::process::Stdio::piped())
        .spawn()
        .and_then(|mut c| {
            use std::io::Write;
            c.stdin.take().unwrap().write_all(b"#include \"flgauge.h\"\nint main(void){FlgModule *m=0;flg_module_free(m);return FLG_STATUS_OK;}\n")?;
            c.wait_with_output()
        })
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

fn which_cc() -> Result<&'static str, ()> {
    match std::process::Command::new("cc").arg("--version").output() {
        Ok(o) if o.status.success() => Ok("cc"),
        _ => Err(()),
    }
}

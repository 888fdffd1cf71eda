use std::ffi::{CStr, CString};
use std::ptr;

use qhkit_ffi::*;

fn last_error() -> String {
    let p = qh_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn domain(json: &str) -> *mut QhDomain {
    let spec = CString::new(json).unwrap();
    let mut d = ptr::null_mut();
    assert_eq!(unsafe { qh_domain_from_json(spec.as_ptr(), &mut d) }, QhStatus::Ok);
    d
}

#[test]
fn ball_distances_through_the_c_abi() {
    let d = domain(r#"{"kind": "ball", "center": [0, 0], "radius": 1}"#);
    assert_eq!(unsafe { qh_domain_dim(d) }, 2);
    let (x, y) = ([0.0, 0.0], [0.5, 0.0]);
    let mut dist = 0.0;
    assert_eq!(unsafe { qh_dist_to_boundary(d, y.as_ptr(), 2, &mut dist) }, QhStatus::Ok);
    assert!((dist - 0.5).abs() < 1e-15);
    let mut inside = false;
    assert_eq!(unsafe { qh_contains(d, y.as_ptr(), 2, &mut inside) }, QhStatus::Ok);
    assert!(inside);
    let (mut lo, mut up, mut tol) = (0.0, 0.0, 0.0);
    let s = unsafe { qh_k_bounds(d, x.as_ptr(), y.as_ptr(), 2, 3, &mut lo, &mut up, &mut tol) };
    assert_eq!(s, QhStatus::Ok);
    // radial segment from the center: k = log 2 exactly
    assert!((up - 2f64.ln()).abs() < 1e-6 + tol);
    assert!(lo <= up + tol);
    let mut j = 0.0;
    assert_eq!(unsafe { qh_j_metric(d, x.as_ptr(), y.as_ptr(), 2, &mut j) }, QhStatus::Ok);
    assert_eq!(j, lo);
    unsafe { qh_domain_free(d) };
}

#[test]
fn errors_carry_codes_and_messages() {
    let bad = CString::new(r#"{"kind": "ball", "center": [0, 0]}"#).unwrap();
    let mut d = ptr::null_mut();
    assert_eq!(unsafe { qh_domain_from_json(bad.as_ptr(), &mut d) }, QhStatus::Validation);
    assert!(d.is_null());
    assert!(last_error().contains("radius"));

    let garbage = CString::new("{not json").unwrap();
    assert_eq!(unsafe { qh_domain_from_json(garbage.as_ptr(), &mut d) }, QhStatus::Parse);
    assert_eq!(unsafe { qh_domain_from_json(ptr::null(), &mut d) }, QhStatus::NullPointer);

    let d = domain(r#"{"kind": "slit_disk"}"#);
    let outside = [2.0, 0.0];
    let mut v = 0.0;
    assert_eq!(unsafe { qh_dist_to_boundary(d, outside.as_ptr(), 2, &mut v) }, QhStatus::OutsideDomain);
    assert!(last_error().contains("(2, 0)"));
    let three = [0.1, 0.1, 0.1];
    assert_eq!(unsafe { qh_dist_to_boundary(d, three.as_ptr(), 3, &mut v) }, QhStatus::Validation);
    unsafe { qh_domain_free(d) };
    unsafe { qh_domain_free(ptr::null_mut()) };
    assert_eq!(unsafe { qh_domain_dim(ptr::null()) }, 0);
}

#[test]
fn map_roundtrip_and_qh_constant() {
    let spec = CString::new(
        r#"{"map": {"kind": "similarity", "scale": 3, "rotation": [[0, -1], [1, 0]], "translation": [1, 2]}}"#,
    )
    .unwrap();
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { qh_map_from_json(spec.as_ptr(), &mut m) }, QhStatus::Ok);
    let p = [0.2, 0.1];
    let mut q = [0.0; 2];
    assert_eq!(unsafe { qh_map_forward(m, p.as_ptr(), 2, q.as_mut_ptr()) }, QhStatus::Ok);
    // 3 * rot90(0.2, 0.1) + (1, 2)
    assert!((q[0] - 0.7).abs() < 1e-14 && (q[1] - 2.6).abs() < 1e-14);
    let mut back = [0.0; 2];
    assert_eq!(unsafe { qh_map_inverse(m, q.as_ptr(), 2, back.as_mut_ptr()) }, QhStatus::Ok);
    assert!((back[0] - 0.2).abs() < 1e-14 && (back[1] - 0.1).abs() < 1e-14);
    let far = [5.0, 5.0];
    assert_eq!(
        unsafe { qh_map_forward(m, far.as_ptr(), 2, q.as_mut_ptr()) },
        QhStatus::OutsideDomain
    );

    let (mut src, mut tgt) = (ptr::null_mut(), ptr::null_mut());
    assert_eq!(unsafe { qh_map_domains(m, &mut src, &mut tgt) }, QhStatus::Ok);
    let mut d = 0.0;
    let c = [1.0, 2.0];
    assert_eq!(unsafe { qh_dist_to_boundary(tgt, c.as_ptr(), 2, &mut d) }, QhStatus::Ok);
    assert!((d - 3.0).abs() < 1e-14);

    let mut mhat = 0.0;
    assert_eq!(unsafe { qh_estimate_qh_constant(m, 20, 1, 2, &mut mhat) }, QhStatus::Ok);
    assert!((mhat - 1.0).abs() < 1e-6);
    unsafe {
        qh_domain_free(src);
        qh_domain_free(tgt);
        qh_map_free(m);
    }
}

#[test]
fn header_declares_the_api() {
    let h = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/qhkit.h")).unwrap();
    for name in [
        "qh_domain_from_json",
        "qh_domain_free",
        "qh_k_bounds",
        "qh_map_forward",
        "qh_map_inverse",
        "qh_last_error_message",
        "typedef struct QhDomain QhDomain",
        "QH_STATUS_OUTSIDE_DOMAIN = 5",
    ] {
        assert!(h.contains(name), "header lacks {name}");
    }
    let v = unsafe { CStr::from_ptr(qh_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

//! C ABI for qhkit.
//!
//! Domains and maps are opaque handles created from JSON specs and released
//! with the matching `_free` function. Every fallible call returns a
//! [`QhStatus`]; on failure the message is available from
//! [`qh_last_error_message`] on the same thread until the next failing call.
//! Points are passed as `dim` consecutive doubles.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qhkit::checks::{estimate_qh_constant, sample_pairs, CheckConfig};
use qhkit::metric::{j_metric, Estimator};
use qhkit::{Domain, Error, MapSpec, MapUnderTest, Point};

/// Result codes of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QhStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Validation = 4,
    OutsideDomain = 5,
    Resolution = 6,
    Path = 7,
    MapConsistency = 8,
    Sampling = 9,
    Io = 10,
    Panic = 11,
}

/// Opaque domain handle.
pub struct QhDomain {
    inner: Domain,
}

/// Opaque map handle.
pub struct QhMap {
    inner: MapUnderTest,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> QhStatus {
    match e {
        Error::OutsideDomain { .. } => QhStatus::OutsideDomain,
        Error::Validation { .. } => QhStatus::Validation,
        Error::Parse(_) => QhStatus::Parse,
        Error::Sampling(_) => QhStatus::Sampling,
        Error::Resolution { .. } => QhStatus::Resolution,
        Error::Path(_) => QhStatus::Path,
        Error::MapConsistency(_) => QhStatus::MapConsistency,
        Error::Io(_) | Error::Csv(_) => QhStatus::Io,
    }
}

enum Fail {
    Null(&'static str),
    Utf8,
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

/// Runs `f`, turning errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> QhStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QhStatus::Ok,
        Ok(Err(Fail::Null(what))) => {
            set_error(format!("null pointer passed as `{what}`"));
            QhStatus::NullPointer
        }
        Ok(Err(Fail::Utf8)) => {
            set_error("spec is not valid UTF-8".into());
            QhStatus::InvalidUtf8
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            QhStatus::Panic
        }
    }
}

unsafe fn text<'a>(s: *const c_char, what: &'static str) -> Result<&'a str, Fail> {
    if s.is_null() {
        return Err(Fail::Null(what));
    }
    CStr::from_ptr(s).to_str().map_err(|_| Fail::Utf8)
}

unsafe fn point(p: *const f64, dim: usize, what: &'static str) -> Result<Point, Fail> {
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    Ok(Point::from_slice(std::slice::from_raw_parts(p, dim))?)
}

unsafe fn out<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or(Fail::Null(what))
}

unsafe fn domain<'a>(d: *const QhDomain) -> Result<&'a Domain, Fail> {
    d.as_ref().map(|d| &d.inner).ok_or(Fail::Null("domain"))
}

unsafe fn map<'a>(m: *const QhMap) -> Result<&'a MapUnderTest, Fail> {
    m.as_ref().map(|m| &m.inner).ok_or(Fail::Null("map"))
}

fn write_point(p: &Point, dst: *mut f64) {
    for (i, c) in p.coords().iter().enumerate() {
        // SAFETY: callers pass a buffer of the map's dimension
        unsafe { *dst.add(i) = *c };
    }
}

/// Message of the last failed call on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn qh_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn qh_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses a domain spec. On success `*out` owns a new handle.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qh_domain_from_json(json: *const c_char, out: *mut *mut QhDomain) -> QhStatus {
    guard(|| {
        let slot = unsafe { self::out(out, "out")? };
        let d = Domain::from_json(unsafe { text(json, "json")? })?;
        *slot = Box::into_raw(Box::new(QhDomain { inner: d }));
        Ok(())
    })
}

/// Releases a domain handle; null is ignored.
///
/// # Safety
/// `d` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qh_domain_free(d: *mut QhDomain) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// Dimension of the domain, or 0 for a null handle.
///
/// # Safety
/// `d` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qh_domain_dim(d: *const QhDomain) -> usize {
    d.as_ref().map_or(0, |d| d.inner.dim())
}

/// # Safety
/// `p` must point to `dim` doubles and `inside` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qh_contains(d: *const QhDomain, p: *const f64, dim: usize, inside: *mut bool) -> QhStatus {
    guard(|| {
        let dom = unsafe { domain(d)? };
        let p = unsafe { point(p, dim, "p")? };
        *unsafe { out(inside, "inside")? } = dom.contains(&p);
        Ok(())
    })
}

/// Euclidean distance from an interior point to the boundary.
///
/// # Safety
/// `p` must point to `dim` doubles and `dist` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qh_dist_to_boundary(d: *const QhDomain, p: *const f64, dim: usize, dist: *mut f64) -> QhStatus {
    guard(|| {
        let dom = unsafe { domain(d)? };
        let p = unsafe { point(p, dim, "p")? };
        *unsafe { out(dist, "dist")? } = dom.dist_to_boundary(&p)?;
        Ok(())
    })
}

/// # Safety
/// `x` and `y` must each point to `dim` doubles and `value` be valid.
#[no_mangle]
pub unsafe extern "C" fn qh_j_metric(
    d: *const QhDomain,
    x: *const f64,
    y: *const f64,
    dim: usize,
    value: *mut f64,
) -> QhStatus {
    guard(|| {
        let dom = unsafe { domain(d)? };
        let (x, y) = unsafe { (point(x, dim, "x")?, point(y, dim, "y")?) };
        *unsafe { out(value, "value")? } = j_metric(dom, &x, &y)?;
        Ok(())
    })
}

/// Lower (j-metric) and upper (graph, at `level`) bounds for the
/// quasihyperbolic distance; `upper_tol` receives the upper bound's
/// quadrature tolerance and may be null.
///
/// # Safety
/// `x` and `y` must each point to `dim` doubles; `lower` and `upper` must be
/// valid pointers.
#[no_mangle]
pub unsafe extern "C" fn qh_k_bounds(
    d: *const QhDomain,
    x: *const f64,
    y: *const f64,
    dim: usize,
    level: u32,
    lower: *mut f64,
    upper: *mut f64,
    upper_tol: *mut f64,
) -> QhStatus {
    guard(|| {
        let dom = unsafe { domain(d)? };
        let (x, y) = unsafe { (point(x, dim, "x")?, point(y, dim, "y")?) };
        let (lo, up) = unsafe { (out(lower, "lower")?, out(upper, "upper")?) };
        let k = Estimator::shared().k_upper(dom, &x, &y, level)?;
        *lo = j_metric(dom, &x, &y)?;
        *up = k.value;
        if let Some(t) = unsafe { upper_tol.as_mut() } {
            *t = k.abs_tol;
        }
        Ok(())
    })
}

/// Parses a map spec (`{"map": {...}}`). On success `*out` owns a new handle.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qh_map_from_json(json: *const c_char, out: *mut *mut QhMap) -> QhStatus {
    guard(|| {
        let slot = unsafe { self::out(out, "out")? };
        let m = MapSpec::parse(unsafe { text(json, "json")? })?.build()?;
        *slot = Box::into_raw(Box::new(QhMap { inner: m }));
        Ok(())
    })
}

/// Releases a map handle; null is ignored.
///
/// # Safety
/// `m` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qh_map_free(m: *mut QhMap) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// New handles for the source and target domains of a map. Either output
/// may be null to skip it.
///
/// # Safety
/// `m` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn qh_map_domains(m: *const QhMap, source: *mut *mut QhDomain, target: *mut *mut QhDomain) -> QhStatus {
    guard(|| {
        let f = unsafe { map(m)? };
        if let Some(s) = unsafe { source.as_mut() } {
            *s = Box::into_raw(Box::new(QhDomain { inner: f.source.clone() }));
        }
        if let Some(t) = unsafe { target.as_mut() } {
            *t = Box::into_raw(Box::new(QhDomain { inner: f.target.clone() }));
        }
        Ok(())
    })
}

fn apply(m: *const QhMap, p: *const f64, dim: usize, dst: *mut f64, inverse: bool) -> QhStatus {
    guard(|| {
        let f = unsafe { map(m)? };
        let p = unsafe { point(p, dim, "p")? };
        if dst.is_null() {
            return Err(Fail::Null("out"));
        }
        let (from, to) = if inverse { (&f.target, &f.source) } else { (&f.source, &f.target) };
        if !from.contains(&p) {
            return Err(Fail::Lib(Error::OutsideDomain {
                domain: from.name().to_string(),
                point: p.to_string(),
            }));
        }
        let q = if inverse { f.inverse(&p) } else { f.forward(&p) };
        if !to.contains(&q) {
            return Err(Fail::Lib(Error::MapConsistency(format!("{p} is sent to {q}, outside `{}`", to.name()))));
        }
        write_point(&q, dst);
        Ok(())
    })
}

/// Image of a source point; writes `dim` doubles to `out`.
///
/// # Safety
/// `p` and `out` must each point to `dim` doubles.
#[no_mangle]
pub unsafe extern "C" fn qh_map_forward(m: *const QhMap, p: *const f64, dim: usize, out: *mut f64) -> QhStatus {
    apply(m, p, dim, out, false)
}

/// Preimage of a target point; writes `dim` doubles to `out`.
///
/// # Safety
/// `p` and `out` must each point to `dim` doubles.
#[no_mangle]
pub unsafe extern "C" fn qh_map_inverse(m: *const QhMap, p: *const f64, dim: usize, out: *mut f64) -> QhStatus {
    apply(m, p, dim, out, true)
}

/// Estimated quasihyperbolic distortion constant on `pairs` seeded pairs.
///
/// # Safety
/// `m` must be a live handle and `value` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qh_estimate_qh_constant(
    m: *const QhMap,
    pairs: usize,
    seed: u64,
    level: u32,
    value: *mut f64,
) -> QhStatus {
    guard(|| {
        let f = unsafe { map(m)? };
        let v = unsafe { out(value, "value")? };
        let sample = sample_pairs(&f.source, pairs, seed)?;
        let cfg = CheckConfig { level, seed, ..CheckConfig::default() };
        *v = estimate_qh_constant(f, &sample, &cfg)?.0;
        Ok(())
    })
}

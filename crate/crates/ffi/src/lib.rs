//! C ABI for mediatrix.
//!
//! Functions return an [`MdxStatus`]; on failure the message is available
//! from [`mdx_last_error_message`] on the same thread. Strings handed out by
//! the library are freed with [`mdx_string_free`], surfaces with
//! [`mdx_surface_free`].

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use mediatrix::metric_lab::{line_equidistant, LineMetric};
use mediatrix::scene::{builtin, run_scene, RunOptions, SceneSpec};
use mediatrix::surface::obj::parse_obj;
use mediatrix::surface::{load_surface, validate_alexandrov, SurfaceDescriptor, TriSurface};
use mediatrix::Error;

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MdxStatus {
    Ok = 0,
    /// Null pointer, invalid UTF-8 or out-of-range argument.
    InvalidArgument = 1,
    /// Malformed mesh, scene or descriptor text.
    Parse = 2,
    /// The surface could not be built or fails a precondition.
    Surface = 3,
    /// The computation itself failed (separation, resolution, empty set).
    Computation = 4,
    Io = 5,
    /// A Rust panic was caught at the boundary.
    Internal = 6,
}

/// Opaque triangulated surface.
pub struct MdxSurface(TriSurface);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(e: &Error) -> MdxStatus {
    match e {
        Error::Parse { .. } | Error::Scene(_) | Error::Json(_) | Error::UnknownGenerator(_) | Error::UnknownScene(_) => {
            MdxStatus::Parse
        }
        Error::NonManifold(_)
        | Error::DegenerateFace { .. }
        | Error::NonOrientable
        | Error::Disconnected(_)
        | Error::NonSimpleBoundary(_)
        | Error::EmptyBoundary
        | Error::HasBoundary => MdxStatus::Surface,
        Error::InvalidParameter(_) | Error::UnknownSuite(_) => MdxStatus::InvalidArgument,
        Error::Io(_) => MdxStatus::Io,
        _ => MdxStatus::Computation,
    }
}

struct Fail(MdxStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Fail {
        Fail(status_of(&e), e.to_string())
    }
}

fn bad(msg: &str) -> Fail {
    Fail(MdxStatus::InvalidArgument, msg.to_string())
}

/// Runs `f`, records its error and maps panics to `Internal`.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> MdxStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            MdxStatus::Ok
        }
        Ok(Err(Fail(code, msg))) => {
            set_error(msg);
            code
        }
        Err(_) => {
            set_error("internal error");
            MdxStatus::Internal
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(bad(&format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| bad(&format!("{what} is not UTF-8")))
}

unsafe fn put<T>(out: *mut T, v: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(bad("output pointer is null"));
    }
    out.write(v);
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    let c = CString::new(s).map_err(|_| bad("string contains NUL"))?;
    put(out, c.into_raw())
}

unsafe fn surface<'a>(s: *const MdxSurface) -> Result<&'a TriSurface, Fail> {
    s.as_ref().map(|s| &s.0).ok_or_else(|| bad("surface is null"))
}

/// Message of the last failed call on this thread, or null. Owned by the
/// library and valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn mdx_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn mdx_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Frees a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn mdx_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds a generated surface by name (`flat_disk`, `sphere`, `flat_torus`,
/// `cone`, `doubled_disk`, `sqrt_horn`, ...) with default parameters and
/// target edge length `h`.
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mdx_surface_builtin(name: *const c_char, h: f64, out: *mut *mut MdxSurface) -> MdxStatus {
    guard(|| {
        let desc = SurfaceDescriptor::from_name(text(name, "name")?)?;
        let s = load_surface(&desc, h)?;
        put(out, Box::into_raw(Box::new(MdxSurface(s))))
    })
}

/// Builds a surface from a JSON descriptor such as
/// `{"generator":"cone","total_angle":4.71,"radius":1}`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mdx_surface_from_json(json: *const c_char, h: f64, out: *mut *mut MdxSurface) -> MdxStatus {
    guard(|| {
        let desc: SurfaceDescriptor = serde_json::from_str(text(json, "json")?).map_err(Error::from)?;
        let s = load_surface(&desc, h)?;
        put(out, Box::into_raw(Box::new(MdxSurface(s))))
    })
}

/// Parses an OBJ-style indexed face set from memory.
///
/// # Safety
/// `obj` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mdx_surface_load_obj(obj: *const c_char, out: *mut *mut MdxSurface) -> MdxStatus {
    guard(|| {
        let s = parse_obj(text(obj, "obj")?)?;
        put(out, Box::into_raw(Box::new(MdxSurface(s))))
    })
}

/// # Safety
/// `s` must come from this library and not have been freed. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn mdx_surface_free(s: *mut MdxSurface) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Vertex count, or 0 for a null surface.
///
/// # Safety
/// `s` must be null or a live surface.
#[no_mangle]
pub unsafe extern "C" fn mdx_surface_vertex_count(s: *const MdxSurface) -> usize {
    s.as_ref().map_or(0, |s| s.0.n_vertices())
}

/// Face count, or 0 for a null surface.
///
/// # Safety
/// `s` must be null or a live surface.
#[no_mangle]
pub unsafe extern "C" fn mdx_surface_face_count(s: *const MdxSurface) -> usize {
    s.as_ref().map_or(0, |s| s.0.n_faces())
}

/// # Safety
/// `s` must be a live surface; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mdx_surface_euler_characteristic(s: *const MdxSurface, out: *mut i64) -> MdxStatus {
    guard(|| put(out, surface(s)?.euler_characteristic()))
}

/// Total angle at vertex `v`.
///
/// # Safety
/// `s` must be a live surface; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mdx_surface_cone_angle(s: *const MdxSurface, v: u32, out: *mut f64) -> MdxStatus {
    guard(|| {
        let s = surface(s)?;
        if v as usize >= s.n_vertices() {
            return Err(bad(&format!("vertex {v} out of range")));
        }
        put(out, s.cone_angle(v))
    })
}

/// Curvature-bounded-below check: `*pass` is 1 when no interior vertex has
/// total angle above `2π + tol_angle`. `*report` (optional) receives the full
/// report as JSON.
///
/// # Safety
/// `s` must be a live surface; `pass` must be writable; `report` may be null.
#[no_mangle]
pub unsafe extern "C" fn mdx_surface_validate(
    s: *const MdxSurface,
    tol_angle: f64,
    pass: *mut c_int,
    report: *mut *mut c_char,
) -> MdxStatus {
    guard(|| {
        let r = validate_alexandrov(surface(s)?, tol_angle);
        if !report.is_null() {
            put_string(report, serde_json::to_string(&r).map_err(Error::from)?)?;
        }
        put(pass, r.pass as c_int)
    })
}

fn run_spec(spec: &SceneSpec, report: *mut *mut c_char, pass: *mut c_int) -> Result<(), Fail> {
    let out = run_scene(spec, &RunOptions::default())?;
    unsafe {
        if !pass.is_null() {
            put(pass, out.report.pass as c_int)?;
        }
        put_string(report, out.report.to_json())
    }
}

/// Runs a scene given as JSON and returns the report JSON. `*pass` (optional)
/// is 1 when every conclusive check passed. Failing checks are not an error.
///
/// # Safety
/// `json` must be a NUL-terminated string; `report` must be writable;
/// `pass` may be null.
#[no_mangle]
pub unsafe extern "C" fn mdx_run_scene_json(json: *const c_char, report: *mut *mut c_char, pass: *mut c_int) -> MdxStatus {
    guard(|| run_spec(&SceneSpec::from_json(text(json, "json")?)?, report, pass))
}

/// Runs a builtin scene by name; see [`mdx_run_scene_json`].
///
/// # Safety
/// As for [`mdx_run_scene_json`].
#[no_mangle]
pub unsafe extern "C" fn mdx_run_builtin_scene(name: *const c_char, report: *mut *mut c_char, pass: *mut c_int) -> MdxStatus {
    guard(|| run_spec(&builtin(text(name, "name")?)?, report, pass))
}

/// Equidistant set of `p` and `q` on `[lo, hi]` under a line metric
/// (`standard`, `bounded_ratio`/`d1`, `truncated`/`d2`), as a JSON array of
/// `{"kind":"point","x":..}` and `{"kind":"interval","lo":..,"hi":..}`.
///
/// # Safety
/// `metric` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mdx_line_equidistant(
    metric: *const c_char,
    p: f64,
    q: f64,
    lo: f64,
    hi: f64,
    resolution: f64,
    out: *mut *mut c_char,
) -> MdxStatus {
    guard(|| {
        let m = LineMetric::parse(text(metric, "metric")?)?;
        let roots = line_equidistant(m, p, q, lo, hi, resolution)?;
        put_string(out, serde_json::to_string(&roots).map_err(Error::from)?)
    })
}

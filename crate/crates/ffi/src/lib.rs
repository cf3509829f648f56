//! C interface to `hdpack`.
//!
//! Maps and packings are opaque handles owned by the caller and released
//! with their `_free` function. Every fallible call returns an
//! [`HdpStatus`]; the message of the most recent failure on the calling
//! thread is available through [`hdp_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;

use hdpack::continuum::{douglas_energy, BoundaryFunction, ContinuumError};
use hdpack::map::{generate_tiling, grid_patch, is_polyhedral, map_from_json, truncate, PlanarMap, Truncation};
use hdpack::packing::{pack, packing_svg, BoundaryMode, DoublePacking, PackingError};
use hdpack::potential::{capacity, PotentialError};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HdpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NoConvergence = 3,
    Io = 4,
    Panic = 5,
}

/// Boundary normalization of a packing.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HdpMode {
    /// Horocyclic boundary circles filling the unit disc.
    Disc = 0,
    /// Equal boundary radii, scaled into the unit disc.
    Uniform = 1,
}

/// A planar map.
pub struct HdpMap {
    map: Arc<PlanarMap>,
}

/// A truncation of a map together with its double circle packing.
pub struct HdpPacking {
    trunc: Truncation,
    packing: DoublePacking,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

struct Failure(HdpStatus, String);

impl Failure {
    fn invalid(msg: impl Into<String>) -> Self {
        Failure(HdpStatus::InvalidArgument, msg.into())
    }
}

impl From<hdpack::map::MapError> for Failure {
    fn from(e: hdpack::map::MapError) -> Self {
        Failure::invalid(e.to_string())
    }
}

impl From<PackingError> for Failure {
    fn from(e: PackingError) -> Self {
        let status = match e {
            PackingError::NoConvergence { .. } | PackingError::PlacementInconsistent { .. } | PackingError::Numerical(_) => {
                HdpStatus::NoConvergence
            }
            _ => HdpStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

impl From<PotentialError> for Failure {
    fn from(e: PotentialError) -> Self {
        let status = if matches!(e, PotentialError::Solve(_)) { HdpStatus::NoConvergence } else { HdpStatus::InvalidArgument };
        Failure(status, e.to_string())
    }
}

impl From<ContinuumError> for Failure {
    fn from(e: ContinuumError) -> Self {
        Failure::invalid(e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> HdpStatus {
    let (status, message) = match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => (HdpStatus::Ok, String::new()),
        Ok(Err(Failure(status, msg))) => (status, msg),
        Err(_) => (HdpStatus::Panic, "internal panic".to_string()),
    };
    LAST_ERROR.with(|e| *e.borrow_mut() = message);
    status
}

fn non_null<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    // SAFETY: callers pass either null or a pointer obtained from this library.
    unsafe { p.as_ref() }.ok_or_else(|| Failure(HdpStatus::NullPointer, format!("{what} is null")))
}

fn out_ptr<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    // SAFETY: callers pass either null or a valid, writable location.
    unsafe { p.as_mut() }.ok_or_else(|| Failure(HdpStatus::NullPointer, format!("{what} is null")))
}

fn publish_map(map: PlanarMap, out: *mut *mut HdpMap) -> Result<(), Failure> {
    *out_ptr(out, "out")? = Box::into_raw(Box::new(HdpMap { map: Arc::new(map) }));
    Ok(())
}

/// Length in bytes of the last error message on this thread, excluding the
/// terminating nul.
#[no_mangle]
pub extern "C" fn hdp_last_error_length() -> usize {
    LAST_ERROR.with(|e| e.borrow().len())
}

/// Copies the last error message on this thread into `buf` as a
/// nul-terminated string, truncated to `cap - 1` bytes. Returns the number
/// of bytes written, excluding the nul.
///
/// # Safety
/// `buf` must be null or point to `cap` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn hdp_last_error_message(buf: *mut c_char, cap: usize) -> usize {
    if buf.is_null() || cap == 0 {
        return 0;
    }
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let n = msg.len().min(cap - 1);
        // SAFETY: `buf` holds `cap > n` bytes.
        unsafe {
            std::ptr::copy_nonoverlapping(msg.as_ptr(), buf.cast::<u8>(), n);
            *buf.add(n) = 0;
        }
        n
    })
}

/// Builds `layers` layers of the `{p, q}` tiling around a vertex.
///
/// # Safety
/// `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn hdp_map_tiling(p: usize, q: usize, layers: usize, out: *mut *mut HdpMap) -> HdpStatus {
    guard(|| publish_map(generate_tiling(p, q, layers)?, out))
}

/// Square-lattice patch with its outer face marked.
///
/// # Safety
/// `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn hdp_map_grid(cols: usize, rows: usize, out: *mut *mut HdpMap) -> HdpStatus {
    guard(|| publish_map(grid_patch(cols, rows)?, out))
}

/// Parses a map from its JSON rotation-system form.
///
/// # Safety
/// `json` must be null or a nul-terminated string; `out` must be null or
/// writable.
#[no_mangle]
pub unsafe extern "C" fn hdp_map_from_json(json: *const c_char, out: *mut *mut HdpMap) -> HdpStatus {
    guard(|| {
        non_null(json, "json")?;
        // SAFETY: checked non-null; the caller guarantees termination.
        let text = unsafe { CStr::from_ptr(json) }.to_str().map_err(|e| Failure::invalid(e.to_string()))?;
        publish_map(map_from_json(text)?, out)
    })
}

/// # Safety
/// `map` must be null or a live map handle.
#[no_mangle]
pub unsafe extern "C" fn hdp_map_vertex_count(map: *const HdpMap, out: *mut usize) -> HdpStatus {
    guard(|| {
        let map = non_null(map, "map")?;
        *out_ptr(out, "out")? = map.map.vertex_count();
        Ok(())
    })
}

/// Whether the map is simple and 3-connected.
///
/// # Safety
/// `map` must be null or a live map handle; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn hdp_map_is_polyhedral(map: *const HdpMap, out: *mut bool) -> HdpStatus {
    guard(|| {
        let map = non_null(map, "map")?;
        *out_ptr(out, "out")? = is_polyhedral(&map.map);
        Ok(())
    })
}

/// # Safety
/// `map` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hdp_map_free(map: *mut HdpMap) {
    if !map.is_null() {
        // SAFETY: the handle came from `Box::into_raw` and is freed once.
        drop(unsafe { Box::from_raw(map) });
    }
}

/// Packs the ball of `radius` around `root`, or everything inside the
/// marked outer face when `radius` is 0.
///
/// # Safety
/// `map` must be null or a live map handle; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn hdp_pack(
    map: *const HdpMap,
    root: usize,
    radius: usize,
    mode: HdpMode,
    tol: f64,
    out: *mut *mut HdpPacking,
) -> HdpStatus {
    guard(|| {
        let map = non_null(map, "map")?;
        let out = out_ptr(out, "out")?;
        if !(tol > 0.0) {
            return Err(Failure::invalid("tolerance must be positive"));
        }
        let trunc = if radius == 0 {
            Truncation::from_outer_face(map.map.clone(), root)?
        } else {
            truncate(map.map.clone(), root, radius)?
        };
        let mode = match mode {
            HdpMode::Disc => BoundaryMode::Disc,
            HdpMode::Uniform => BoundaryMode::Uniform(1.0),
        };
        let packing = pack(&trunc, &mode, tol)?;
        *out = Box::into_raw(Box::new(HdpPacking { trunc, packing }));
        Ok(())
    })
}

/// # Safety
/// `packing` must be null or a live packing handle; `out` must be null or
/// writable.
#[no_mangle]
pub unsafe extern "C" fn hdp_packing_vertex_count(packing: *const HdpPacking, out: *mut usize) -> HdpStatus {
    guard(|| {
        let p = non_null(packing, "packing")?;
        *out_ptr(out, "out")? = p.packing.vertex_count();
        Ok(())
    })
}

/// Center and radius of the circle of truncation vertex `v`.
///
/// # Safety
/// `packing` must be null or a live packing handle; `x`, `y` and `r` must
/// be null or writable.
#[no_mangle]
pub unsafe extern "C" fn hdp_packing_vertex_circle(
    packing: *const HdpPacking,
    v: usize,
    x: *mut f64,
    y: *mut f64,
    r: *mut f64,
) -> HdpStatus {
    guard(|| {
        let p = &non_null(packing, "packing")?.packing;
        if v >= p.vertex_count() {
            return Err(Failure::invalid(format!("vertex {v} is out of range")));
        }
        let (x, y, r) = (out_ptr(x, "x")?, out_ptr(y, "y")?, out_ptr(r, "r")?);
        let c = p.vertex_center(v);
        (*x, *y, *r) = (c.re, c.im, p.vertex_radius(v));
        Ok(())
    })
}

/// Largest dyadic `δ` for which the shrunken discs separate.
///
/// # Safety
/// `packing` must be null or a live packing handle; `out` must be null or
/// writable.
#[no_mangle]
pub unsafe extern "C" fn hdp_packing_delta0(packing: *const HdpPacking, out: *mut f64) -> HdpStatus {
    guard(|| {
        let p = non_null(packing, "packing")?;
        *out_ptr(out, "out")? = p.packing.delta0();
        Ok(())
    })
}

/// Writes the SVG drawing of the packing to `path`.
///
/// # Safety
/// `packing` must be null or a live packing handle; `path` must be null or
/// a nul-terminated string.
#[no_mangle]
pub unsafe extern "C" fn hdp_packing_write_svg(packing: *const HdpPacking, path: *const c_char) -> HdpStatus {
    guard(|| {
        let p = non_null(packing, "packing")?;
        non_null(path, "path")?;
        // SAFETY: checked non-null; the caller guarantees termination.
        let path = unsafe { CStr::from_ptr(path) }.to_str().map_err(|e| Failure::invalid(e.to_string()))?;
        std::fs::write(path, packing_svg(&p.packing)).map_err(|e| Failure(HdpStatus::Io, format!("{path}: {e}")))
    })
}

/// Capacity of a set of truncation vertices.
///
/// # Safety
/// `packing` must be null or a live packing handle; `set` must point to
/// `len` indices (or be null with `len` 0); `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn hdp_capacity(
    packing: *const HdpPacking,
    set: *const usize,
    len: usize,
    out: *mut f64,
) -> HdpStatus {
    guard(|| {
        let p = non_null(packing, "packing")?;
        let set = if len == 0 {
            &[][..]
        } else {
            non_null(set, "set")?;
            // SAFETY: non-null and `len` elements long by contract.
            unsafe { std::slice::from_raw_parts(set, len) }
        };
        *out_ptr(out, "out")? = capacity(&p.trunc, set)?.value;
        Ok(())
    })
}

/// Douglas integral of the periodic function sampled at `n` equally spaced
/// angles starting from 0, evaluated with `n_theta` nodes.
///
/// # Safety
/// `samples` must point to `n` values; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn hdp_douglas_energy(samples: *const f64, n: usize, n_theta: usize, out: *mut f64) -> HdpStatus {
    guard(|| {
        non_null(samples, "samples")?;
        // SAFETY: non-null and `n` elements long by contract.
        let values = unsafe { std::slice::from_raw_parts(samples, n) }.to_vec();
        let g = BoundaryFunction::from_samples(values)?;
        *out_ptr(out, "out")? = douglas_energy(&g, n_theta)?;
        Ok(())
    })
}

/// # Safety
/// `packing` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hdp_packing_free(packing: *mut HdpPacking) {
    if !packing.is_null() {
        // SAFETY: the handle came from `Box::into_raw` and is freed once.
        drop(unsafe { Box::from_raw(packing) });
    }
}

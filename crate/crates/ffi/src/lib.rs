//! C ABI for `domino-cyl`.
//!
//! Objects are opaque handles created by `dc_*_new`/`dc_disk_*` functions and
//! released with the matching `*_free`. Every fallible call returns a
//! [`DcStatus`]; on failure the message is available from
//! [`dc_last_error`]. Strings handed out by the library are NUL-terminated,
//! owned by the caller and released with [`dc_string_free`]. Big integers
//! travel as decimal strings.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use domino_cyl::region::{parse_disk, Disk};
use domino_cyl::stats::{spectral_report, SamplerState};
use domino_cyl::transfer::{count_cylinder, twist_polynomial, FloorGraph, TransferSystem};
use domino_cyl::twist::{BaseDirection, FloorCocycle, TwistKernel};
use domino_cyl::{dynamics, Error};

/// Result codes. The first four agree with the command-line exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DcStatus {
    Ok = 0,
    InvalidInput = 1,
    ResourceBound = 2,
    Internal = 3,
    NullPointer = 4,
    Panic = 5,
}

/// Which floor cocycle a transfer system uses.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DcCocycle {
    Kernel = 0,
    Connector = 1,
}

/// A quadriculated disk.
pub struct DcDisk(Disk);

/// A transfer system (plugs, floors and the twist cocycle) over a disk.
pub struct DcSystem(TransferSystem);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> DcStatus {
    match e.exit_code() {
        1 => DcStatus::InvalidInput,
        2 => DcStatus::ResourceBound,
        _ => DcStatus::Internal,
    }
}

/// Runs `f`, translating errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), DcStatusError>) -> DcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DcStatus::Ok,
        Ok(Err(DcStatusError(s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("panic inside domino-cyl".into());
            DcStatus::Panic
        }
    }
}

struct DcStatusError(DcStatus, String);

impl From<Error> for DcStatusError {
    fn from(e: Error) -> Self {
        DcStatusError(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> DcStatusError {
    DcStatusError(DcStatus::NullPointer, format!("{what} is null"))
}

fn out_string(out: *mut *mut c_char, s: String) -> Result<(), DcStatusError> {
    let c =
        CString::new(s).map_err(|_| DcStatusError(DcStatus::Internal, "interior NUL".into()))?;
    // SAFETY: callers check `out` for null before reaching here.
    unsafe { *out = c.into_raw() };
    Ok(())
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn dc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be null or a pointer obtained from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses an ASCII disk (`#` cell, `.` hole, one row per line).
///
/// # Safety
/// `text` must be a valid NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dc_disk_parse(text: *const c_char, out: *mut *mut DcDisk) -> DcStatus {
    guard(|| {
        if text.is_null() {
            return Err(null("text"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let s = CStr::from_ptr(text)
            .to_str()
            .map_err(|_| DcStatusError(DcStatus::InvalidInput, "disk text is not UTF-8".into()))?;
        let d = parse_disk(s).map_err(Error::from)?;
        *out = Box::into_raw(Box::new(DcDisk(d)));
        Ok(())
    })
}

/// The `width × height` rectangle.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dc_disk_rectangle(
    width: i64,
    height: i64,
    out: *mut *mut DcDisk,
) -> DcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let d = Disk::rectangle(width, height).map_err(Error::from)?;
        *out = Box::into_raw(Box::new(DcDisk(d)));
        Ok(())
    })
}

/// # Safety
/// `disk` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn dc_disk_free(disk: *mut DcDisk) {
    if !disk.is_null() {
        drop(Box::from_raw(disk));
    }
}

/// Number of cells, or 0 for a null handle.
///
/// # Safety
/// `disk` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dc_disk_cells(disk: *const DcDisk) -> usize {
    disk.as_ref().map_or(0, |d| d.0.n_cells())
}

/// Builds the transfer system of `disk` with the reference kernel along `+e1`.
/// `plug_bound` caps the number of plugs (0 selects the default).
///
/// # Safety
/// `disk` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dc_system_new(
    disk: *const DcDisk,
    cocycle: DcCocycle,
    plug_bound: usize,
    out: *mut *mut DcSystem,
) -> DcStatus {
    guard(|| {
        let d = disk.as_ref().ok_or_else(|| null("disk"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let bound = if plug_bound == 0 {
            domino_cyl::plugfloor::DEFAULT_PLUG_BOUND
        } else {
            plug_bound
        };
        let graph = FloorGraph::build(&d.0, bound)?;
        let k = TwistKernel::reference(BaseDirection::PlusE1);
        let c = match cocycle {
            DcCocycle::Kernel => FloorCocycle::PerFloorKernel(k),
            DcCocycle::Connector => FloorCocycle::connector(k, &graph)?,
        };
        let ts = TransferSystem::from_graph(graph.into(), &c)?;
        *out = Box::into_raw(Box::new(DcSystem(ts)));
        Ok(())
    })
}

/// # Safety
/// `sys` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn dc_system_free(sys: *mut DcSystem) {
    if !sys.is_null() {
        drop(Box::from_raw(sys));
    }
}

/// Number of plugs, or 0 for a null handle.
///
/// # Safety
/// `sys` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dc_system_plugs(sys: *const DcSystem) -> usize {
    sys.as_ref().map_or(0, |s| s.0.dim())
}

/// Number of tilings of height `n`, as a decimal string.
///
/// # Safety
/// `sys` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dc_count(
    sys: *const DcSystem,
    n: usize,
    out: *mut *mut c_char,
) -> DcStatus {
    guard(|| {
        let s = sys.as_ref().ok_or_else(|| null("sys"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        out_string(out, count_cylinder(&s.0, n).to_string())
    })
}

/// `P_n` as JSON `{"<exponent>": "<decimal>"}`.
///
/// # Safety
/// `sys` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dc_twist_polynomial(
    sys: *const DcSystem,
    n: usize,
    out: *mut *mut c_char,
) -> DcStatus {
    guard(|| {
        let s = sys.as_ref().ok_or_else(|| null("sys"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let p = twist_polynomial(&s.0, n)?;
        let map: serde_json::Map<String, serde_json::Value> = p
            .terms()
            .map(|(e, c)| (e.to_string(), c.to_string().into()))
            .collect();
        out_string(out, serde_json::Value::Object(map).to_string())
    })
}

/// Spectral report as JSON (`lambda1`, `gap`, `sigma2`, `C0`, `C1`, `etaCurve`).
///
/// # Safety
/// `sys` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dc_spectral_report(
    sys: *const DcSystem,
    grid: usize,
    out: *mut *mut c_char,
) -> DcStatus {
    guard(|| {
        let s = sys.as_ref().ok_or_else(|| null("sys"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        if grid == 0 {
            return Err(DcStatusError(
                DcStatus::InvalidInput,
                "grid must be positive".into(),
            ));
        }
        let r = spectral_report(&s.0, grid)?;
        let json = serde_json::to_string(&r).map_err(Error::from)?;
        out_string(out, json)
    })
}

/// Twist of the uniform sample number `index` of height `n` under `seed`.
///
/// # Safety
/// `sys` must be a live handle; `twist` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dc_sample_twist(
    sys: *const DcSystem,
    n: usize,
    seed: u64,
    index: u64,
    twist: *mut i64,
) -> DcStatus {
    guard(|| {
        let s = sys.as_ref().ok_or_else(|| null("sys"))?;
        if twist.is_null() {
            return Err(null("twist"));
        }
        let st = SamplerState::new(&s.0, n, seed);
        if st.total() == &0u32.into() {
            return Err(DcStatusError(
                DcStatus::InvalidInput,
                "no tilings of this height".into(),
            ));
        }
        *twist = dynamics::cocycle_twist(&s.0, &st.sample(index))?;
        Ok(())
    })
}

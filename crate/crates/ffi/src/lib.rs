//! C ABI over `ghtree`.
//!
//! Objects are opaque handles created by `ght_*_new`/`ght_*_from_json` and
//! released with the matching `_free`. Every fallible call returns a
//! [`GhtStatus`]; on failure `ght_last_error_message` describes it until the
//! next call on the same thread. Strings returned by the library must be
//! released with `ght_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ghtree::io::{self, SpaceDoc, SubsetDoc, TreeDoc};
use ghtree::{connectivity_defect, gh_exact, minimax_matrix, tree_report, Budget, Error, FiniteMetricSpace, MetricTree};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GhtStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    /// Input rejected by a constructor (bad matrix, cycle, unknown vertex...).
    ValidationError = 4,
    BudgetExceeded = 5,
    /// The output buffer is too small; the required length was written.
    BufferTooSmall = 6,
    InvalidArgument = 7,
    Panic = 8,
}

/// A finite metric space.
pub struct GhtSpace {
    inner: FiniteMetricSpace,
}

/// A finite metric tree.
pub struct GhtTree {
    inner: MetricTree,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

struct Fail(GhtStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::BudgetExceeded { .. } => GhtStatus::BudgetExceeded,
            Error::BadParams(_) | Error::OutOfRange { .. } => GhtStatus::InvalidArgument,
            _ => GhtStatus::ValidationError,
        };
        Fail(code, e.to_string())
    }
}

impl From<serde_json::Error> for Fail {
    fn from(e: serde_json::Error) -> Self {
        Fail(GhtStatus::ParseError, e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(GhtStatus::NullPointer, format!("`{what}` is null"))
}

/// Runs `f`, translating errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> GhtStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GhtStatus::Ok,
        Ok(Err(Fail(code, msg))) => {
            set_error(msg);
            code
        }
        Err(_) => {
            set_error("internal panic");
            GhtStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(GhtStatus::InvalidUtf8, format!("`{what}` is not valid UTF-8")))
}

unsafe fn put<T>(out: *mut T, value: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn space<'a>(p: *const GhtSpace, what: &str) -> Result<&'a FiniteMetricSpace, Fail> {
    p.as_ref().map(|s| &s.inner).ok_or_else(|| null(what))
}

fn check_eps(eps: f64) -> Result<(), Fail> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(Fail(GhtStatus::InvalidArgument, format!("eps must be positive, got {eps}")))
    }
}

/// Builds a space from an `n x n` row-major matrix. `labels` may be null
/// (points are then named `p0, p1, ...`) or point to `n` strings.
///
/// # Safety
/// `matrix` must hold `n * n` doubles; `labels`, if not null, `n` valid C
/// strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ght_space_new(
    labels: *const *const c_char,
    matrix: *const f64,
    n: usize,
    eps: f64,
    out: *mut *mut GhtSpace,
) -> GhtStatus {
    guard(|| {
        check_eps(eps)?;
        if matrix.is_null() && n > 0 {
            return Err(null("matrix"));
        }
        let flat: &[f64] = if n == 0 { &[] } else { std::slice::from_raw_parts(matrix, n * n) };
        let rows = flat.chunks(n.max(1)).map(|r| r.to_vec()).collect();
        let names = if labels.is_null() {
            (0..n).map(|i| format!("p{i}")).collect()
        } else {
            let list = std::slice::from_raw_parts(labels, n);
            list.iter().map(|&l| str_arg(l, "labels[i]").map(str::to_string)).collect::<Result<_, _>>()?
        };
        let inner = FiniteMetricSpace::new(names, rows, eps)?;
        put(out, Box::into_raw(Box::new(GhtSpace { inner })), "out")
    })
}

/// Builds a space from `{"labels": [...], "matrix": [[...]]}`.
///
/// # Safety
/// `json` must be a valid C string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ght_space_from_json(json: *const c_char, eps: f64, out: *mut *mut GhtSpace) -> GhtStatus {
    guard(|| {
        check_eps(eps)?;
        let doc: SpaceDoc = serde_json::from_str(str_arg(json, "json")?)?;
        let inner = io::space_from_doc(doc, eps)?;
        put(out, Box::into_raw(Box::new(GhtSpace { inner })), "out")
    })
}

/// # Safety
/// `space` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ght_space_free(space: *mut GhtSpace) {
    if !space.is_null() {
        drop(Box::from_raw(space));
    }
}

/// Number of points, 0 for a null handle.
///
/// # Safety
/// `space` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ght_space_len(space: *const GhtSpace) -> usize {
    space.as_ref().map_or(0, |s| s.inner.len())
}

/// # Safety
/// `space` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ght_space_diameter(space: *const GhtSpace, out: *mut f64) -> GhtStatus {
    guard(|| {
        let x = self::space(space, "space")?;
        put(out, x.diameter(), "out")
    })
}

/// Exact Gromov-Hausdorff distance. The witness is written to `pairs` as
/// `(x_index, y_index)` couples, `2 * pairs_len` entries; `pairs_cap`
/// counts couples. With a short buffer the call fails with
/// `BufferTooSmall` having written the value and the required length.
/// `max_cells = 0` selects the default budget.
///
/// # Safety
/// Handles must be live; `value` and `pairs_len` writable; `pairs` null or
/// room for `2 * pairs_cap` entries.
#[no_mangle]
pub unsafe extern "C" fn ght_gh_exact(
    x: *const GhtSpace,
    y: *const GhtSpace,
    max_cells: usize,
    value: *mut f64,
    pairs: *mut usize,
    pairs_cap: usize,
    pairs_len: *mut usize,
) -> GhtStatus {
    guard(|| {
        let (x, y) = (space(x, "x")?, space(y, "y")?);
        let budget = if max_cells == 0 { Budget::default() } else { Budget::cells(max_cells) };
        let r = gh_exact(x, y, budget)?;
        let w = r.witness.pairs();
        put(value, r.value, "value")?;
        put(pairs_len, w.len(), "pairs_len")?;
        if w.len() > pairs_cap || (pairs.is_null() && !w.is_empty()) {
            return Err(Fail(GhtStatus::BufferTooSmall, format!("witness needs {} pairs", w.len())));
        }
        for (k, &(i, j)) in w.iter().enumerate() {
            pairs.add(2 * k).write(i);
            pairs.add(2 * k + 1).write(j);
        }
        Ok(())
    })
}

/// Writes the `n x n` minimax matrix row-major; `cap` counts doubles.
///
/// # Safety
/// `space` must be live and `out` hold `cap` doubles.
#[no_mangle]
pub unsafe extern "C" fn ght_minimax_matrix(space: *const GhtSpace, out: *mut f64, cap: usize) -> GhtStatus {
    guard(|| {
        let x = self::space(space, "space")?;
        let n = x.len();
        if cap < n * n || out.is_null() {
            return Err(Fail(GhtStatus::BufferTooSmall, format!("matrix needs {} entries", n * n)));
        }
        for (k, v) in minimax_matrix(x).into_iter().flatten().enumerate() {
            out.add(k).write(v);
        }
        Ok(())
    })
}

/// `diam U(X) / 2`, zero exactly when `X` is dotted connected.
///
/// # Safety
/// `space` must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ght_connectivity_defect(space: *const GhtSpace, out: *mut f64) -> GhtStatus {
    guard(|| {
        let x = self::space(space, "space")?;
        put(out, connectivity_defect(x), "out")
    })
}

/// Builds a tree from `{"vertices": [...], "edges": [[u, v, len]]}`.
///
/// # Safety
/// `json` must be a valid C string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ght_tree_from_json(json: *const c_char, eps: f64, out: *mut *mut GhtTree) -> GhtStatus {
    guard(|| {
        check_eps(eps)?;
        let doc: TreeDoc = serde_json::from_str(str_arg(json, "json")?)?;
        let inner = io::tree_from_doc(&doc, eps)?;
        put(out, Box::into_raw(Box::new(GhtTree { inner })), "out")
    })
}

/// # Safety
/// `tree` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ght_tree_free(tree: *mut GhtTree) {
    if !tree.is_null() {
        drop(Box::from_raw(tree));
    }
}

/// Tree report for the subset `{"vertices": [...], "edge_points": [[e, s]]}`
/// as a JSON string, to be released with `ght_string_free`.
///
/// # Safety
/// `tree` must be live, `subset_json` a valid C string, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ght_tree_report_json(
    tree: *const GhtTree,
    subset_json: *const c_char,
    max_cells: usize,
    out: *mut *mut c_char,
) -> GhtStatus {
    guard(|| {
        let t = &tree.as_ref().ok_or_else(|| null("tree"))?.inner;
        let doc: SubsetDoc = serde_json::from_str(str_arg(subset_json, "subset_json")?)?;
        let x = io::subset_from_doc(t, &doc)?;
        let budget = if max_cells == 0 { Budget::default() } else { Budget::cells(max_cells) };
        let text = serde_json::to_string(&tree_report(t, &x, budget))?;
        let c = CString::new(text).map_err(|e| Fail(GhtStatus::Panic, e.to_string()))?;
        put(out, c.into_raw(), "out")
    })
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn ght_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the last failure on this thread, or null. Owned by the
/// library and valid until the next call.
#[no_mangle]
pub extern "C" fn ght_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

//! C interface to pmcad.
//!
//! Objects cross the boundary as opaque handles owned by the caller and
//! released with the matching `*_free`. Every fallible call returns a
//! [`PmStatus`]; on failure the message is available from
//! [`pm_last_error`] until the next failing call on the same thread.
//! Strings returned to the caller are released with [`pm_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::ptr;

use pmcad::cad::{build_cad, qe, truth_evaluate, CADTree, CadMode, CadOptions, Limits, QeOptions};
use pmcad::formula::{eval_qf, parse_document, parse_formula, Formula};
use pmcad::pianomovers::{generate, Corridor, Kind, Length, ProblemSpec};
use pmcad::projection::project_all;
use pmcad::{CadError, Rat, VarOrder};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PmStatus {
    Ok = 0,
    Other = 1,
    Usage = 2,
    ResourceLimit = 3,
    NotWellOriented = 4,
    NullPointer = 5,
    InvalidUtf8 = 6,
}

/// A formula with its variable order.
pub struct PmFormula {
    order: VarOrder,
    formula: Formula,
}

/// A cylindrical algebraic decomposition.
pub struct PmCad {
    tree: CADTree,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn fail(status: PmStatus, msg: impl Into<String>) -> PmStatus {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
    status
}

fn from_error(e: CadError) -> PmStatus {
    let status = match e {
        CadError::Usage(_)
        | CadError::Syntax { .. }
        | CadError::UnknownVariable(_)
        | CadError::Unassigned(_)
        | CadError::PointNotFree(_) => PmStatus::Usage,
        CadError::ResourceLimit(_) => PmStatus::ResourceLimit,
        CadError::NotWellOriented { .. } => PmStatus::NotWellOriented,
        CadError::Nullified | CadError::Io(_) => PmStatus::Other,
    };
    fail(status, e.to_string())
}

unsafe fn text<'a>(s: *const c_char) -> Result<&'a str, PmStatus> {
    if s.is_null() {
        return Err(fail(PmStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(s).to_str().map_err(|_| fail(PmStatus::InvalidUtf8, "argument is not UTF-8"))
}

fn give_string(s: String, out: *mut *mut c_char) -> PmStatus {
    match CString::new(s) {
        Ok(c) => {
            unsafe { *out = c.into_raw() };
            PmStatus::Ok
        }
        Err(_) => fail(PmStatus::Other, "output contains a NUL byte"),
    }
}

fn limits(max_cells: u64) -> Limits {
    Limits {
        max_cells: if max_cells == 0 { Limits::default().max_cells } else { max_cells as usize },
        ..Limits::default()
    }
}

macro_rules! try_status {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(s) => return s,
        }
    };
}

/// Message of the last failure on this thread, or NULL. Owned by the
/// library; valid until the next failing call.
#[no_mangle]
pub extern "C" fn pm_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn pm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must be NULL or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn pm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a `vars x, y . formula` document.
///
/// # Safety
/// `doc` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pm_formula_parse(doc: *const c_char, out: *mut *mut PmFormula) -> PmStatus {
    if out.is_null() {
        return fail(PmStatus::NullPointer, "null output pointer");
    }
    let doc = try_status!(text(doc));
    match parse_document(doc) {
        Ok((order, formula)) => {
            *out = Box::into_raw(Box::new(PmFormula { order, formula }));
            PmStatus::Ok
        }
        Err(e) => from_error(e),
    }
}

/// Generates a ladder formulation by kind name (e.g. "wang"). `length` is
/// a rational such as "3" or "5/4", or NULL for a symbolic length; angled
/// kinds use a corridor angle with tangent 1.
///
/// # Safety
/// `kind` must be a NUL-terminated string, `length` NULL or one, and
/// `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pm_formula_generate(
    kind: *const c_char,
    length: *const c_char,
    out: *mut *mut PmFormula,
) -> PmStatus {
    if out.is_null() {
        return fail(PmStatus::NullPointer, "null output pointer");
    }
    let kind: Kind = match try_status!(text(kind)).parse() {
        Ok(k) => k,
        Err(e) => return from_error(e),
    };
    let length = if length.is_null() {
        Length::Symbolic
    } else {
        match try_status!(text(length)).parse::<Rat>() {
            Ok(q) => Length::Value(q),
            Err(_) => return fail(PmStatus::Usage, "length is not a rational number"),
        }
    };
    let one = Rat::from_integer(1.into());
    let corridor = match kind {
        Kind::ObtuseInvalid | Kind::ObtuseWang => Corridor::Obtuse(one),
        Kind::AcuteInvalid | Kind::AcuteWang => Corridor::Acute(one),
        _ => Corridor::RightAngle,
    };
    match generate(kind, &ProblemSpec { length, corridor }) {
        Ok(f) => {
            *out = Box::into_raw(Box::new(PmFormula { order: f.order, formula: f.formula }));
            PmStatus::Ok
        }
        Err(e) => from_error(e),
    }
}

/// # Safety
/// `f` must be NULL or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pm_formula_free(f: *mut PmFormula) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// The formula as a `vars ... .` document.
///
/// # Safety
/// `f` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pm_formula_to_text(f: *const PmFormula, out: *mut *mut c_char) -> PmStatus {
    let (Some(f), false) = (f.as_ref(), out.is_null()) else {
        return fail(PmStatus::NullPointer, "null argument");
    };
    give_string(format!("vars {}.\n{}.\n", f.order.names().join(", "), f.formula.to_text(&f.order)), out)
}

/// Number of variables in the formula's order.
///
/// # Safety
/// `f` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pm_formula_nvars(f: *const PmFormula) -> usize {
    f.as_ref().map_or(0, |f| f.order.len())
}

/// Eliminates the quantifiers of `f`; the result keeps `f`'s order.
/// `max_cells` of 0 selects the default limit.
///
/// # Safety
/// `f` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pm_qe(f: *const PmFormula, max_cells: u64, out: *mut *mut PmFormula) -> PmStatus {
    let (Some(f), false) = (f.as_ref(), out.is_null()) else {
        return fail(PmStatus::NullPointer, "null argument");
    };
    let opts = QeOptions { limits: limits(max_cells), ..QeOptions::default() };
    match qe(&f.formula, &f.order, &opts) {
        Ok(r) => {
            *out = Box::into_raw(Box::new(PmFormula { order: f.order.clone(), formula: r.formula }));
            PmStatus::Ok
        }
        Err(e) => from_error(e),
    }
}

/// Truth of a quantifier-free formula at a point given as one rational
/// string per variable.
///
/// # Safety
/// `f` must be a live handle, `values` must point to `n` NUL-terminated
/// strings and `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pm_formula_eval(
    f: *const PmFormula,
    values: *const *const c_char,
    n: usize,
    out: *mut bool,
) -> PmStatus {
    let (Some(f), false) = (f.as_ref(), out.is_null()) else {
        return fail(PmStatus::NullPointer, "null argument");
    };
    if n != f.order.len() || (n > 0 && values.is_null()) {
        return fail(PmStatus::Usage, format!("expected {} values", f.order.len()));
    }
    let mut pt = Vec::with_capacity(n);
    for i in 0..n {
        let s = try_status!(text(*values.add(i)));
        match s.trim().parse::<Rat>() {
            Ok(q) => pt.push(Some(q)),
            Err(_) => return fail(PmStatus::Usage, format!("'{s}' is not a rational number")),
        }
    }
    match eval_qf(&f.formula, &pt) {
        Ok(b) => {
            *out = b;
            PmStatus::Ok
        }
        Err(e) => from_error(e),
    }
}

/// Full CAD of the atoms of a quantifier-free formula, with truth values.
///
/// # Safety
/// `f` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pm_cad_build(f: *const PmFormula, max_cells: u64, out: *mut *mut PmCad) -> PmStatus {
    let (Some(f), false) = (f.as_ref(), out.is_null()) else {
        return fail(PmStatus::NullPointer, "null argument");
    };
    let n = f.order.len();
    let ps: Vec<_> = f.formula.polys().into_iter().map(|p| p.with_nvars(n)).filter(|p| !p.is_constant()).collect();
    let built = project_all(&ps, &f.order, None)
        .and_then(|seq| build_cad(&seq, &CadOptions { mode: CadMode::Full, limits: limits(max_cells) }))
        .and_then(|mut tree| truth_evaluate(&mut tree, &f.formula).map(|_| tree));
    match built {
        Ok(tree) => {
            *out = Box::into_raw(Box::new(PmCad { tree }));
            PmStatus::Ok
        }
        Err(e) => from_error(e),
    }
}

/// # Safety
/// `c` must be NULL or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pm_cad_free(c: *mut PmCad) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Number of top-dimensional-level cells.
///
/// # Safety
/// `c` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pm_cad_cell_count(c: *const PmCad) -> usize {
    c.as_ref().map_or(0, |c| c.tree.cell_count())
}

/// The CAD as JSON: order, options, projection levels and cells.
///
/// # Safety
/// `c` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pm_cad_to_json(c: *const PmCad, out: *mut *mut c_char) -> PmStatus {
    let (Some(c), false) = (c.as_ref(), out.is_null()) else {
        return fail(PmStatus::NullPointer, "null argument");
    };
    match serde_json_string(&c.tree) {
        Some(s) => give_string(s, out),
        None => fail(PmStatus::Other, "serialization failed"),
    }
}

fn serde_json_string(t: &CADTree) -> Option<String> {
    serde_json::to_string(&t.to_json()).ok()
}

/// Parses a formula over an explicit comma-separated order.
///
/// # Safety
/// `order` and `formula` must be NUL-terminated strings and `out` a valid
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn pm_formula_parse_with_order(
    order: *const c_char,
    formula: *const c_char,
    out: *mut *mut PmFormula,
) -> PmStatus {
    if out.is_null() {
        return fail(PmStatus::NullPointer, "null output pointer");
    }
    let order = match VarOrder::parse(try_status!(text(order))) {
        Ok(o) => o,
        Err(e) => return from_error(e),
    };
    match parse_formula(try_status!(text(formula)), &order) {
        Ok(formula) => {
            *out = Box::into_raw(Box::new(PmFormula { order, formula }));
            PmStatus::Ok
        }
        Err(e) => from_error(e),
    }
}

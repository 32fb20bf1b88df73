//! C ABI over the `anharmonic` crate.
//!
//! Every function returns an [`AnhStatus`]. On failure a message is kept per
//! thread and can be fetched with [`anh_last_error`]. Strings returned through
//! out-parameters are owned by the caller and released with
//! [`anh_string_free`]; handles are released with their `_free` function.

use anharmonic::qes::{qes_solve, QesSolution, QesSpec};
use anharmonic::spectrum::eigenvalues;
use anharmonic::trees::{
    check_proposition1, enumerate_double_symmetric, EmbeddedTree,
};
use anharmonic::zeros::{census, CensusBox, CensusConfig};
use anharmonic::{cli, parse_potential, Error, EvenPolynomial};
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnhStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Numerical = 3,
    InvalidTree = 4,
    VerificationFailed = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

/// Parsed even potential.
pub struct AnhPotential(EvenPolynomial);

/// Closed-form eigenpairs of one QES sextic.
pub struct AnhQes {
    spec: QesSpec,
    solutions: Vec<QesSolution>,
}

/// Validated embedded tree.
pub struct AnhTree(EmbeddedTree);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(err: &Error) -> AnhStatus {
    match err {
        Error::InvalidPotential(_)
        | Error::InvalidDegree(_)
        | Error::InvalidParity(_)
        | Error::Parse(_)
        | Error::InvalidArgument(_)
        | Error::Unsupported(_) => AnhStatus::InvalidArgument,
        Error::InvalidTree(_) => AnhStatus::InvalidTree,
        Error::Mismatch(_) | Error::ConstraintViolation(_) => AnhStatus::VerificationFailed,
        _ => AnhStatus::Numerical,
    }
}

fn guard<F: FnOnce() -> Result<(), AnhStatus>>(f: F) -> AnhStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => AnhStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic");
            AnhStatus::Panic
        }
    }
}

fn fail(err: Error) -> AnhStatus {
    let s = status_of(&err);
    set_error(err.to_string());
    s
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, AnhStatus> {
    if p.is_null() {
        set_error("null string");
        return Err(AnhStatus::NullPointer);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error("string is not valid UTF-8");
        AnhStatus::InvalidArgument
    })
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), AnhStatus> {
    if out.is_null() {
        set_error("null output pointer");
        return Err(AnhStatus::NullPointer);
    }
    let c = CString::new(s).map_err(|_| {
        set_error("output contains a NUL byte");
        AnhStatus::InvalidArgument
    })?;
    *out = c.into_raw();
    Ok(())
}

unsafe fn check_out<T>(out: *mut T) -> Result<(), AnhStatus> {
    if out.is_null() {
        set_error("null output pointer");
        Err(AnhStatus::NullPointer)
    } else {
        Ok(())
    }
}

/// Message of the last failure on this thread, or null. Free with
/// [`anh_string_free`].
#[no_mangle]
pub extern "C" fn anh_last_error() -> *mut c_char {
    LAST_ERROR.with(|e| {
        e.borrow()
            .as_ref()
            .map_or(std::ptr::null_mut(), |m| m.clone().into_raw())
    })
}

/// Release a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a pointer previously returned by this library.
#[no_mangle]
pub unsafe extern "C" fn anh_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parse a potential such as `"z^4+z^2"`.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn anh_potential_parse(text: *const c_char, out: *mut *mut AnhPotential) -> AnhStatus {
    guard(|| {
        check_out(out)?;
        let s = read_str(text)?;
        let p = parse_potential(s).map_err(fail)?;
        *out = Box::into_raw(Box::new(AnhPotential(p)));
        Ok(())
    })
}

/// Build a potential from its even coefficients `c0, c2, c4, ...`.
///
/// # Safety
/// `coeffs` must point to `len` doubles and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn anh_potential_from_coeffs(
    coeffs: *const f64,
    len: usize,
    out: *mut *mut AnhPotential,
) -> AnhStatus {
    guard(|| {
        check_out(out)?;
        if coeffs.is_null() {
            set_error("null coefficient array");
            return Err(AnhStatus::NullPointer);
        }
        let c = std::slice::from_raw_parts(coeffs, len).to_vec();
        let p = EvenPolynomial::new(c).map_err(fail)?;
        *out = Box::into_raw(Box::new(AnhPotential(p)));
        Ok(())
    })
}

/// # Safety
/// `p` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn anh_potential_free(p: *mut AnhPotential) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// # Safety
/// `p` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn anh_potential_degree(p: *const AnhPotential, out: *mut usize) -> AnhStatus {
    guard(|| {
        check_out(out)?;
        let p = p.as_ref().ok_or(AnhStatus::NullPointer)?;
        *out = p.0.degree();
        Ok(())
    })
}

/// Eigenvalues `λ_0..λ_{len−1}` into `lambdas`, and optionally their real
/// zero counts into `zero_counts` (may be null).
///
/// # Safety
/// `p` must be a live handle; `lambdas` (and `zero_counts` if non-null) must
/// hold `len` elements.
#[no_mangle]
pub unsafe extern "C" fn anh_eigenvalues(
    p: *const AnhPotential,
    tol: f64,
    lambdas: *mut f64,
    zero_counts: *mut usize,
    len: usize,
) -> AnhStatus {
    guard(|| {
        let p = p.as_ref().ok_or(AnhStatus::NullPointer)?;
        check_out(lambdas)?;
        if len == 0 {
            return Ok(());
        }
        let pairs = eigenvalues(&p.0, len - 1, tol).map_err(fail)?;
        for (i, e) in pairs.iter().enumerate() {
            *lambdas.add(i) = e.lambda;
            if !zero_counts.is_null() {
                *zero_counts.add(i) = e.real_zero_count;
            }
        }
        Ok(())
    })
}

/// Zero census of the `k`-th eigenfunction in `[−x_max, x_max] × [−y_max,
/// y_max]`, as JSON.
///
/// # Safety
/// `p` must be a live handle and `out_json` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn anh_census_json(
    p: *const AnhPotential,
    k: usize,
    x_max: f64,
    y_max: f64,
    tol: f64,
    out_json: *mut *mut c_char,
) -> AnhStatus {
    guard(|| {
        let p = p.as_ref().ok_or(AnhStatus::NullPointer)?;
        check_out(out_json)?;
        let pairs = eigenvalues(&p.0, k, 1e-10).map_err(fail)?;
        let ep = &pairs[k];
        let b = CensusBox::new(x_max, y_max).map_err(fail)?;
        let mut c = census(&p.0, ep.lambda, ep.parity, b, &CensusConfig::with_tol(tol)).map_err(fail)?;
        c.k = Some(k);
        write_string(out_json, cli::to_json(&c).map_err(fail)?)
    })
}

/// Solve the QES sextic with parameters `(m, p, b)`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn anh_qes_new(m: u32, p: u32, b: f64, out: *mut *mut AnhQes) -> AnhStatus {
    guard(|| {
        check_out(out)?;
        let spec = QesSpec::new(m, p, b).map_err(fail)?;
        let solutions = qes_solve(&spec).map_err(fail)?;
        *out = Box::into_raw(Box::new(AnhQes { spec, solutions }));
        Ok(())
    })
}

/// # Safety
/// `q` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn anh_qes_free(q: *mut AnhQes) {
    if !q.is_null() {
        drop(Box::from_raw(q));
    }
}

/// Number of closed-form solutions (`m + 1`).
///
/// # Safety
/// `q` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn anh_qes_solution_count(q: *const AnhQes, out: *mut usize) -> AnhStatus {
    guard(|| {
        check_out(out)?;
        let q = q.as_ref().ok_or(AnhStatus::NullPointer)?;
        *out = q.solutions.len();
        Ok(())
    })
}

/// Eigenvalues of the solutions in increasing order.
///
/// # Safety
/// `q` must be a live handle and `lambdas` hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn anh_qes_eigenvalues(q: *const AnhQes, lambdas: *mut f64, len: usize) -> AnhStatus {
    guard(|| {
        let q = q.as_ref().ok_or(AnhStatus::NullPointer)?;
        check_out(lambdas)?;
        if len < q.solutions.len() {
            set_error(format!("need room for {} values", q.solutions.len()));
            return Err(AnhStatus::BufferTooSmall);
        }
        for (i, s) in q.solutions.iter().enumerate() {
            *lambdas.add(i) = s.lambda;
        }
        Ok(())
    })
}

/// All solutions as JSON.
///
/// # Safety
/// `q` must be a live handle and `out_json` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn anh_qes_json(q: *const AnhQes, out_json: *mut *mut c_char) -> AnhStatus {
    guard(|| {
        let q = q.as_ref().ok_or(AnhStatus::NullPointer)?;
        let v = serde_json::json!({
            "m": q.spec.m,
            "p": q.spec.p,
            "b": q.spec.b,
            "solutions": q.solutions,
        });
        write_string(out_json, cli::to_json(&v).map_err(fail)?)
    })
}

/// Number of double-symmetric trees with `ends` ends.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn anh_trees_count(ends: usize, on_axes: bool, out: *mut usize) -> AnhStatus {
    guard(|| {
        check_out(out)?;
        *out = enumerate_double_symmetric(ends, on_axes).map_err(fail)?.len();
        Ok(())
    })
}

/// Catalogue of double-symmetric trees as JSON.
///
/// # Safety
/// `out_json` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn anh_trees_enumerate_json(
    ends: usize,
    on_axes: bool,
    out_json: *mut *mut c_char,
) -> AnhStatus {
    guard(|| {
        let list: Vec<serde_json::Value> = enumerate_double_symmetric(ends, on_axes)
            .map_err(fail)?
            .iter()
            .map(|t| serde_json::json!({"canonical": t.canonical_form(), "contour": t.contour_word()}))
            .collect();
        write_string(out_json, cli::to_json(&list).map_err(fail)?)
    })
}

/// Parse and validate a tree from JSON.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn anh_tree_from_json(json: *const c_char, out: *mut *mut AnhTree) -> AnhStatus {
    guard(|| {
        check_out(out)?;
        let s = read_str(json)?;
        let t: EmbeddedTree = serde_json::from_str(s).map_err(|e| {
            set_error(e.to_string());
            AnhStatus::InvalidTree
        })?;
        *out = Box::into_raw(Box::new(AnhTree(t)));
        Ok(())
    })
}

/// # Safety
/// `t` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn anh_tree_free(t: *mut AnhTree) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// # Safety
/// `t` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn anh_tree_canonical_form(t: *const AnhTree, out: *mut *mut c_char) -> AnhStatus {
    guard(|| {
        let t = t.as_ref().ok_or(AnhStatus::NullPointer)?;
        write_string(out, t.0.canonical_form())
    })
}

/// Structural checks for degree `d`; returns `VERIFICATION_FAILED` when a
/// clause fails. The report is written to `out_json` either way.
///
/// # Safety
/// `t` must be a live handle and `out_json` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn anh_tree_check(
    t: *const AnhTree,
    d: usize,
    alternating: bool,
    out_json: *mut *mut c_char,
) -> AnhStatus {
    guard(|| {
        let t = t.as_ref().ok_or(AnhStatus::NullPointer)?;
        let rep = check_proposition1(&t.0, d, alternating).map_err(fail)?;
        write_string(out_json, cli::to_json(&rep).map_err(fail)?)?;
        if rep.passed() {
            Ok(())
        } else {
            set_error(rep.violations.join("; "));
            Err(AnhStatus::VerificationFailed)
        }
    })
}

/// The exact tree-count suite as a JSON report.
///
/// # Safety
/// `out_json` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn anh_verify_trees(out_json: *mut *mut c_char) -> AnhStatus {
    guard(|| {
        let rep = cli::verify_trees().map_err(fail)?;
        write_string(out_json, cli::to_json(&rep).map_err(fail)?)?;
        if rep.passed {
            Ok(())
        } else {
            set_error("tree counts differ from the expected values");
            Err(AnhStatus::VerificationFailed)
        }
    })
}

//! C ABI bindings.
//!
//! Objects cross the boundary as opaque handles owned by the caller and
//! released with the matching `*_free`. Every fallible call returns an
//! [`FpStatus`]; on failure a message is available from [`fp_last_error`]
//! on the same thread until the next failing call. Panics never unwind into
//! C: they are caught and reported as [`FpStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::marker::{PhantomData, PhantomPinned};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use fracpicard::cli::format::to_json;
use fracpicard::expr::{parse, AnalyticExpr};
use fracpicard::hypotheses::{check_conditions_seeded, HypothesisError, Problem};
use fracpicard::picard::{solve, PicardError, Solution, SolverOptions};
use fracpicard::quadrature::gamma;
use num_complex::Complex64;

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ParseError = 3,
    EvalError = 4,
    HypothesisFailed = 5,
    NotConverged = 6,
    Panic = 7,
}

/// Parsed expression in `x`.
pub struct FpExpr {
    _data: [u8; 0],
    _marker: PhantomData<(*mut u8, PhantomPinned)>,
}

/// Problem data: order, initial value, coefficients, maps and constants.
pub struct FpProblem {
    _data: [u8; 0],
    _marker: PhantomData<(*mut u8, PhantomPinned)>,
}

/// Solved problem with its certificate.
pub struct FpSolution {
    _data: [u8; 0],
    _marker: PhantomData<(*mut u8, PhantomPinned)>,
}

/// Solver controls; obtain defaults from [`fp_solver_options_default`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FpSolverOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub quad_order: usize,
    pub grid_size: usize,
    pub seed: u64,
}

impl From<FpSolverOptions> for SolverOptions {
    fn from(o: FpSolverOptions) -> Self {
        SolverOptions {
            tol: o.tol,
            max_iter: o.max_iter,
            quad_order: o.quad_order,
            grid_size: o.grid_size,
            seed: o.seed,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(FpStatus, String);

impl From<HypothesisError> for Failure {
    fn from(e: HypothesisError) -> Self {
        let status = match e {
            HypothesisError::Parse(_) => FpStatus::ParseError,
            HypothesisError::Eval(_) => FpStatus::EvalError,
            HypothesisError::InvalidProblem(_) | HypothesisError::Frac(_) => {
                FpStatus::InvalidArgument
            }
            _ => FpStatus::HypothesisFailed,
        };
        Failure(status, e.to_string())
    }
}

impl From<PicardError> for Failure {
    fn from(e: PicardError) -> Self {
        let status = match &e {
            PicardError::ToleranceNotReached { .. } => FpStatus::NotConverged,
            PicardError::InvalidOption(_) => FpStatus::InvalidArgument,
            PicardError::Eval(_) | PicardError::RangeEscape { .. } => FpStatus::EvalError,
            PicardError::Hypothesis(h) => return Failure::from(h.clone()),
            _ => FpStatus::HypothesisFailed,
        };
        Failure(status, e.to_string())
    }
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard<F>(f: F) -> FpStatus
where
    F: FnOnce() -> Result<(), Failure>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FpStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            FpStatus::Panic
        }
    }
}

fn null() -> Failure {
    Failure(FpStatus::NullPointer, "null pointer argument".into())
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null());
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(FpStatus::InvalidArgument, "string is not UTF-8".into()))
}

unsafe fn expr_arg(name: &str, p: *const c_char) -> Result<AnalyticExpr, Failure> {
    parse(str_arg(p)?).map_err(|e| Failure(FpStatus::ParseError, format!("{name}: {e}")))
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " "))
        .expect("interior NULs removed")
        .into_raw()
}

unsafe fn problem_ref<'a>(p: *const FpProblem) -> Result<&'a Problem, Failure> {
    (p as *const Problem).as_ref().ok_or_else(null)
}

unsafe fn solution_ref<'a>(p: *const FpSolution) -> Result<&'a Solution, Failure> {
    (p as *const Solution).as_ref().ok_or_else(null)
}

/// Message of the last failure on this thread, or NULL. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn fp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Frees a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn fp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// `Γ(x)`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fp_gamma(x: f64, out: *mut f64) -> FpStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(null)?;
        *out = gamma(x).map_err(|e| Failure(FpStatus::InvalidArgument, e.to_string()))?;
        Ok(())
    })
}

/// Parses an expression in `x`.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fp_expr_parse(text: *const c_char, out: *mut *mut FpExpr) -> FpStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(null)?;
        *out = ptr::null_mut();
        let e = expr_arg("expression", text)?;
        *out = Box::into_raw(Box::new(e)) as *mut FpExpr;
        Ok(())
    })
}

/// Evaluates at `x = re + i·im`.
///
/// # Safety
/// `e` must be a live handle; `out_re` and `out_im` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fp_expr_eval(
    e: *const FpExpr,
    re: f64,
    im: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> FpStatus {
    guard(|| {
        let e = (e as *const AnalyticExpr).as_ref().ok_or_else(null)?;
        let (o_re, o_im) = (
            out_re.as_mut().ok_or_else(null)?,
            out_im.as_mut().ok_or_else(null)?,
        );
        let v = e
            .eval(Complex64::new(re, im))
            .map_err(|err| Failure(FpStatus::EvalError, err.to_string()))?;
        *o_re = v.re;
        *o_im = v.im;
        Ok(())
    })
}

/// Canonical text of the expression; free with [`fp_string_free`].
///
/// # Safety
/// `e` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fp_expr_to_string(e: *const FpExpr, out: *mut *mut c_char) -> FpStatus {
    guard(|| {
        let e = (e as *const AnalyticExpr).as_ref().ok_or_else(null)?;
        *out.as_mut().ok_or_else(null)? = into_c_string(e.to_string());
        Ok(())
    })
}

/// # Safety
/// `e` must come from [`fp_expr_parse`] and not be freed twice. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn fp_expr_free(e: *mut FpExpr) {
    if !e.is_null() {
        drop(Box::from_raw(e as *mut AnalyticExpr));
    }
}

/// Builds a problem from expression strings.
///
/// # Safety
/// String arguments must be NUL-terminated; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fp_problem_new(
    alpha: f64,
    lambda_re: f64,
    lambda_im: f64,
    a: *const c_char,
    b: *const c_char,
    psi: *const c_char,
    phi: *const c_char,
    alpha0: f64,
    beta0: f64,
    k: f64,
    sigma: f64,
    out: *mut *mut FpProblem,
) -> FpStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(null)?;
        *out = ptr::null_mut();
        let p = Problem::new(
            alpha,
            Complex64::new(lambda_re, lambda_im),
            expr_arg("a", a)?,
            expr_arg("b", b)?,
            expr_arg("psi", psi)?,
            expr_arg("phi", phi)?,
            alpha0,
            beta0,
            k,
            sigma,
        )?;
        *out = Box::into_raw(Box::new(p)) as *mut FpProblem;
        Ok(())
    })
}

/// `C(x+1)·sin(u(L(x))) + γ·sin(x+1)` with `u(−1) = λ`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fp_problem_example1(
    alpha: f64,
    c: f64,
    gamma_coef: f64,
    lambda: f64,
    out: *mut *mut FpProblem,
) -> FpStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(null)?;
        let p = Problem::example1(alpha, c, gamma_coef, Complex64::new(lambda, 0.0))?;
        *out = Box::into_raw(Box::new(p)) as *mut FpProblem;
        Ok(())
    })
}

/// `η·sin(x+1)·cos(u(L(x)))` with `u(−1) = λ`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fp_problem_example2(
    alpha: f64,
    eta: f64,
    lambda: f64,
    out: *mut *mut FpProblem,
) -> FpStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(null)?;
        let p = Problem::example2(alpha, eta, Complex64::new(lambda, 0.0))?;
        *out = Box::into_raw(Box::new(p)) as *mut FpProblem;
        Ok(())
    })
}

/// # Safety
/// `p` must come from a `fp_problem_*` constructor and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn fp_problem_free(p: *mut FpProblem) {
    if !p.is_null() {
        drop(Box::from_raw(p as *mut Problem));
    }
}

/// Checks the hypotheses. Writes 1 or 0 to `all_passed` and, if `json_out`
/// is not NULL, the report as JSON (free with [`fp_string_free`]).
///
/// # Safety
/// `p` must be a live handle and `all_passed` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fp_check(
    p: *const FpProblem,
    seed: u64,
    all_passed: *mut i32,
    json_out: *mut *mut c_char,
) -> FpStatus {
    guard(|| {
        let p = problem_ref(p)?;
        let flag = all_passed.as_mut().ok_or_else(null)?;
        let report = check_conditions_seeded(p, seed)?;
        *flag = i32::from(report.all_passed());
        if let Some(out) = json_out.as_mut() {
            let text = to_json(&report).map_err(|e| Failure(FpStatus::EvalError, e.to_string()))?;
            *out = into_c_string(text);
        }
        Ok(())
    })
}

#[no_mangle]
pub extern "C" fn fp_solver_options_default() -> FpSolverOptions {
    let d = SolverOptions::default();
    FpSolverOptions {
        tol: d.tol,
        max_iter: d.max_iter,
        quad_order: d.quad_order,
        grid_size: d.grid_size,
        seed: d.seed,
    }
}

/// Certifies and solves. `opts` may be NULL for defaults.
///
/// # Safety
/// `p` must be a live handle, `opts` NULL or valid, `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fp_solve(
    p: *const FpProblem,
    opts: *const FpSolverOptions,
    out: *mut *mut FpSolution,
) -> FpStatus {
    guard(|| {
        let p = problem_ref(p)?;
        let out = out.as_mut().ok_or_else(null)?;
        *out = ptr::null_mut();
        let opts = opts
            .as_ref()
            .copied()
            .unwrap_or_else(|| fp_solver_options_default());
        let sol = solve(p, &opts.into())?;
        *out = Box::into_raw(Box::new(sol)) as *mut FpSolution;
        Ok(())
    })
}

/// `u(t)` for `t ∈ [−1, 1]`.
///
/// # Safety
/// `s` must be a live handle; `out_re` and `out_im` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fp_solution_eval(
    s: *const FpSolution,
    t: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> FpStatus {
    guard(|| {
        let s = solution_ref(s)?;
        let (o_re, o_im) = (
            out_re.as_mut().ok_or_else(null)?,
            out_im.as_mut().ok_or_else(null)?,
        );
        if !(-1.0..=1.0).contains(&t) {
            return Err(Failure(
                FpStatus::InvalidArgument,
                format!("t = {t} outside [-1, 1]"),
            ));
        }
        let v = s.u.eval(t);
        *o_re = v.re;
        *o_im = v.im;
        Ok(())
    })
}

/// Number of Picard iterations performed, or 0 for NULL.
///
/// # Safety
/// `s` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fp_solution_iterations(s: *const FpSolution) -> usize {
    solution_ref(s).map_or(0, |s| s.certificate.iterations)
}

/// Certificate as JSON; free with [`fp_string_free`].
///
/// # Safety
/// `s` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fp_solution_certificate_json(
    s: *const FpSolution,
    out: *mut *mut c_char,
) -> FpStatus {
    guard(|| {
        let s = solution_ref(s)?;
        let out = out.as_mut().ok_or_else(null)?;
        let text =
            to_json(&s.certificate).map_err(|e| Failure(FpStatus::EvalError, e.to_string()))?;
        *out = into_c_string(text);
        Ok(())
    })
}

/// # Safety
/// `s` must come from [`fp_solve`] and not be freed twice. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn fp_solution_free(s: *mut FpSolution) {
    if !s.is_null() {
        drop(Box::from_raw(s as *mut Solution));
    }
}

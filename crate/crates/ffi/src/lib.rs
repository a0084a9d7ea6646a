//! C ABI for `levy-opt`.
//!
//! Models live behind an opaque `LevyModel` handle. Every fallible call
//! returns a `LevyStatus`; on failure the message is kept per thread and can
//! be copied out with [`levy_last_error_message`]. Results are written
//! through out-pointers and left untouched on failure.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use levy_opt::{
    cumulant_exponent, eval_g, eval_g_prime, eval_gn, eval_gn_prime, log_triplet,
    optimal_continuous, optimal_discrete, validate_model, Boundary, Constraint, Error, GnMethod,
    JumpAtom, LevyTriplet, MarketModel, McConfig, OptResult, QuadConfig,
};

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LevyStatus {
    Ok = 0,
    /// The model violates an assumption or the config could not be parsed.
    InvalidModel = 1,
    /// A solver or integration step failed.
    Numerical = 2,
    /// Strategy outside the domain of the function.
    Domain = 3,
    InvalidArgument = 4,
    NullPointer = 5,
    /// A Rust panic was caught at the boundary.
    Panic = 6,
}

/// Opaque model handle.
pub struct LevyModel(MarketModel);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LevyBoundary {
    Interior = 0,
    Lower = 1,
    Upper = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevySolution {
    pub argmax: f64,
    pub value: f64,
    /// Derivative at the argmax (one-sided at a boundary).
    pub derivative: f64,
    pub boundary: LevyBoundary,
    pub iterations: usize,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LevyGnKind {
    Quadrature = 0,
    MonteCarlo = 1,
}

/// How `g^N` is evaluated. Pass NULL where accepted for quadrature with
/// default settings.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevyGnOptions {
    pub kind: LevyGnKind,
    /// Monte Carlo sample count.
    pub paths: usize,
    pub seed: u64,
    pub antithetic: bool,
    /// Gauss-Hermite node count.
    pub nodes: usize,
    /// Jump-count cutoff for quadrature; 0 picks it from the Poisson tail.
    pub max_jumps: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> LevyStatus {
    match e {
        Error::InvalidModel(_) | Error::Config(_) | Error::Io(_) => LevyStatus::InvalidModel,
        Error::Domain { .. } => LevyStatus::Domain,
        Error::InvalidArgument(_) => LevyStatus::InvalidArgument,
        Error::Unbounded(_) => LevyStatus::Numerical,
    }
}

struct Failure(LevyStatus, String);

type Outcome = std::result::Result<(), Failure>;

fn fail(status: LevyStatus, msg: impl Into<String>) -> Outcome {
    Err(Failure(status, msg.into()))
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

/// Runs `f`, records any error or panic and maps it to a status.
fn guard(f: impl FnOnce() -> Outcome) -> LevyStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            LevyStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            LevyStatus::Panic
        }
    }
}

unsafe fn model_ref<'a>(model: *const LevyModel) -> std::result::Result<&'a MarketModel, Failure> {
    if model.is_null() {
        return Err(Failure(
            LevyStatus::NullPointer,
            "model handle is NULL".into(),
        ));
    }
    Ok(&(*model).0)
}

unsafe fn write<T>(out: *mut T, v: T) -> Outcome {
    if out.is_null() {
        return fail(LevyStatus::NullPointer, "output pointer is NULL");
    }
    out.write(v);
    Ok(())
}

unsafe fn gn_method(opts: *const LevyGnOptions) -> GnMethod {
    if opts.is_null() {
        return GnMethod::default();
    }
    let o = *opts;
    match o.kind {
        LevyGnKind::Quadrature => GnMethod::Quad(QuadConfig {
            max_jumps: (o.max_jumps > 0).then_some(o.max_jumps),
            nodes: o.nodes,
        }),
        LevyGnKind::MonteCarlo => {
            GnMethod::Mc(McConfig::new(o.paths, o.seed).antithetic(o.antithetic))
        }
    }
}

fn solution(r: &OptResult) -> LevySolution {
    LevySolution {
        argmax: r.argmax,
        value: r.value,
        derivative: r.derivative,
        boundary: match r.boundary {
            Boundary::Interior => LevyBoundary::Interior,
            Boundary::Lower => LevyBoundary::Lower,
            Boundary::Upper => LevyBoundary::Upper,
        },
        iterations: r.iterations,
    }
}

/// Default evaluation options: quadrature with 64 nodes, automatic cutoff,
/// and 100000 Monte Carlo paths with seed 0 if `kind` is switched.
#[no_mangle]
pub extern "C" fn levy_gn_options_default() -> LevyGnOptions {
    LevyGnOptions {
        kind: LevyGnKind::Quadrature,
        paths: McConfig::DEFAULT_PATHS,
        seed: 0,
        antithetic: false,
        nodes: QuadConfig::default().nodes,
        max_jumps: 0,
    }
}

/// Builds a model from its triplet. `sizes` and `intensities` hold
/// `n_atoms` entries each and may be NULL when `n_atoms` is 0. The model is
/// not validated here; see [`levy_model_validate`].
///
/// # Safety
/// `sizes` and `intensities` must point to `n_atoms` readable doubles and
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn levy_model_new(
    b: f64,
    c: f64,
    sizes: *const f64,
    intensities: *const f64,
    n_atoms: usize,
    horizon: f64,
    x0: f64,
    p: f64,
    out: *mut *mut LevyModel,
) -> LevyStatus {
    guard(|| {
        if out.is_null() {
            return fail(LevyStatus::NullPointer, "output pointer is NULL");
        }
        if n_atoms > 0 && (sizes.is_null() || intensities.is_null()) {
            return fail(LevyStatus::NullPointer, "atom arrays are NULL");
        }
        let atoms = (0..n_atoms)
            .map(|i| JumpAtom::new(*sizes.add(i), *intensities.add(i)))
            .collect();
        let m = MarketModel::new(LevyTriplet::new(b, c, atoms), horizon, x0, p);
        write(out, Box::into_raw(Box::new(LevyModel(m))))
    })
}

/// Parses a JSON model document `{"b", "c", "atoms": [{"x", "lambda"}], "T", "x0", "p"}`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn levy_model_from_json(
    json: *const c_char,
    out: *mut *mut LevyModel,
) -> LevyStatus {
    guard(|| {
        if out.is_null() {
            return fail(LevyStatus::NullPointer, "output pointer is NULL");
        }
        if json.is_null() {
            return fail(LevyStatus::NullPointer, "json is NULL");
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| Failure(LevyStatus::InvalidModel, format!("json is not UTF-8: {e}")))?;
        let m = MarketModel::from_json_str(text)?;
        write(out, Box::into_raw(Box::new(LevyModel(m))))
    })
}

/// Releases a handle. NULL is ignored.
///
/// # Safety
/// `model` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn levy_model_free(model: *mut LevyModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// `LEVY_STATUS_OK` if every assumption holds, otherwise
/// `LEVY_STATUS_INVALID_MODEL` with the failed assumptions as message.
///
/// # Safety
/// `model` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn levy_model_validate(model: *const LevyModel) -> LevyStatus {
    guard(|| {
        let report = validate_model(model_ref(model)?);
        if report.passed() {
            Ok(())
        } else {
            fail(LevyStatus::InvalidModel, report.failure_summary())
        }
    })
}

/// Cumulant exponent `κ(u) = log E[exp(u L̃_1)]` of the log-price.
///
/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn levy_cumulant(
    model: *const LevyModel,
    u: f64,
    out: *mut f64,
) -> LevyStatus {
    guard(|| {
        let m = model_ref(model)?;
        write(out, cumulant_exponent(&log_triplet(&m.triplet), u))
    })
}

/// Continuous-time growth rate `g(π)`; may be `-inf` at a closed endpoint.
///
/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn levy_eval_g(
    model: *const LevyModel,
    pi: f64,
    out: *mut f64,
) -> LevyStatus {
    guard(|| write(out, eval_g(model_ref(model)?, pi)?.value))
}

/// `g'(π)` on the interior of the admissible set.
///
/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn levy_eval_g_prime(
    model: *const LevyModel,
    pi: f64,
    out: *mut f64,
) -> LevyStatus {
    guard(|| write(out, eval_g_prime(model_ref(model)?, pi)?))
}

/// N-period growth rate `g^N(π)` for `π ∈ [0, 1]`. `std_error` may be NULL;
/// it receives 0 for quadrature.
///
/// # Safety
/// `model` must be a live handle, `opts` NULL or readable, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn levy_eval_gn(
    model: *const LevyModel,
    periods: usize,
    pi: f64,
    opts: *const LevyGnOptions,
    out: *mut f64,
    std_error: *mut f64,
) -> LevyStatus {
    guard(|| {
        let m = model_ref(model)?;
        m.ensure_valid()?;
        let v = eval_gn(m, periods, pi, &gn_method(opts))?;
        write(out, v.value)?;
        if !std_error.is_null() {
            std_error.write(v.std_error);
        }
        Ok(())
    })
}

/// `(g^N)'(π)` for `π ∈ [0, 1]`.
///
/// # Safety
/// As for [`levy_eval_gn`].
#[no_mangle]
pub unsafe extern "C" fn levy_eval_gn_prime(
    model: *const LevyModel,
    periods: usize,
    pi: f64,
    opts: *const LevyGnOptions,
    out: *mut f64,
    std_error: *mut f64,
) -> LevyStatus {
    guard(|| {
        let m = model_ref(model)?;
        m.ensure_valid()?;
        let v = eval_gn_prime(m, periods, pi, &gn_method(opts))?;
        write(out, v.value)?;
        if !std_error.is_null() {
            std_error.write(v.std_error);
        }
        Ok(())
    })
}

/// Maximizes `g` over `[0, 1]` (`constrained`) or the admissible set.
///
/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn levy_solve_continuous(
    model: *const LevyModel,
    constrained: bool,
    out: *mut LevySolution,
) -> LevyStatus {
    guard(|| {
        let constraint = if constrained {
            Constraint::UnitInterval
        } else {
            Constraint::Unconstrained
        };
        let r = optimal_continuous(model_ref(model)?, constraint)?;
        write(out, solution(&r))
    })
}

/// Maximizes `g^N` over `[0, 1]`.
///
/// # Safety
/// `model` must be a live handle, `opts` NULL or readable, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn levy_solve_discrete(
    model: *const LevyModel,
    periods: usize,
    opts: *const LevyGnOptions,
    out: *mut LevySolution,
) -> LevyStatus {
    guard(|| {
        let m = model_ref(model)?;
        m.ensure_valid()?;
        if periods == 0 {
            return fail(LevyStatus::InvalidArgument, "N must be at least 1");
        }
        let r = optimal_discrete(m, periods, &gn_method(opts))?;
        write(out, solution(&r))
    })
}

/// Copies the calling thread's last error message into `buf` (always
/// NUL-terminated when `len > 0`) and returns the full message length
/// without the terminator. Returns 0 if the last call succeeded.
///
/// # Safety
/// `buf` must be NULL or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn levy_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else {
            if !buf.is_null() && len > 0 {
                *buf = 0;
            }
            return 0;
        };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn levy_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

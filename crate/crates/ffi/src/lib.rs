//! C ABI over `leroy`.
//!
//! Conventions:
//!
//! * every fallible call returns a [`LeroyStatus`] and writes results
//!   through out-pointers, which are left untouched on failure (except
//!   `needed` in [`leroy_eval_string`]);
//! * a [`LeroyContext`] carries the working precision and the message of
//!   the last failure on that context ([`leroy_last_error`]);
//! * handles are created by `*_new`/`*_trace` and released by the matching
//!   `*_free`; passing NULL to a `*_free` is a no-op;
//! * a context is not thread-safe; use one per thread.
//!
//! The header `include/leroy.h` is generated by cbindgen at build time.

#![allow(clippy::missing_safety_doc)]

use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use leroy::boundary::{trace_curve, BoundaryCurve};
use leroy::classifier::{classify, digamma_bernstein_check, gamma_ratio_cm_check, Clause, CmStatus, GammaRatioParams};
use leroy::criterion::{criterion_analyze, levy_exponent_quadrature, Argmax, Pattern, ZeroLimit};
use leroy::hankel::{hankel_test, HankelFamily};
use leroy::precision::format_sig;
use leroy::series::{leroy_derivative, ln_mellin_closed_form, moment};
use leroy::{Error, Params, PrecisionContext};

/// Result codes. `LEROY_STATUS_OK` is zero; everything else is a failure.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeroyStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    Precondition = 3,
    OrderCap = 4,
    CancellationCap = 5,
    Quadrature = 6,
    Bracket = 7,
    NonMonotone = 8,
    Precision = 9,
    BufferTooSmall = 10,
    OutOfRange = 11,
    Panic = 12,
}

impl From<&Error> for LeroyStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Domain(_) => LeroyStatus::Domain,
            Error::Precondition(_) => LeroyStatus::Precondition,
            Error::OrderCap { .. } => LeroyStatus::OrderCap,
            Error::CancellationCap { .. } => LeroyStatus::CancellationCap,
            Error::Quadrature { .. } => LeroyStatus::Quadrature,
            Error::Bracket(_) => LeroyStatus::Bracket,
            Error::NonMonotone(_) => LeroyStatus::NonMonotone,
            Error::PrecisionEscalation(_) => LeroyStatus::Precision,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeroyCmStatus {
    Cm = 0,
    NotCm = 1,
    CmBySufficiency = 2,
    OpenRegion = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeroyClause {
    TheoremA = 0,
    TheoremBSuff = 1,
    TheoremBNec = 2,
    TheoremC = 3,
    CriterionSufficient = 4,
    StirlingDegenerate = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeroyPattern {
    NonPositive = 0,
    NegThenPos = 1,
    NegPosNeg = 2,
    Other = 3,
}

/// Where `sup g` is attained; `argmax_z` is meaningful for `Interior` only.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeroyArgmax {
    Interior = 0,
    LowerEnd = 1,
    UpperEnd = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeroyLimitKind {
    Finite = 0,
    PlusInfinity = 1,
    MinusInfinity = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeroyVerdict {
    pub status: LeroyCmStatus,
    pub clause: LeroyClause,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeroyCriterion {
    pub holds: bool,
    pub marginal: bool,
    /// `sup g` rounded to double; `+inf` when `β < α`.
    pub sup_g: f64,
    pub argmax: LeroyArgmax,
    pub argmax_z: f64,
    pub pattern: LeroyPattern,
    pub zero_limit_kind: LeroyLimitKind,
    pub zero_limit: f64,
    pub n_critical_points: usize,
    pub n_sign_changes: usize,
    pub tolerance: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeroyLevyExponent {
    pub value: f64,
    pub drift: f64,
    pub integral: f64,
    pub error: f64,
}

/// Summary of a Hankel run. `violation_family` is 0 for H0, 1 for H1 and
/// -1 when there is no violation.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeroyHankel {
    pub all_nonnegative: bool,
    pub violation_family: i32,
    pub violation_k: i32,
    pub digits_used: u32,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeroyGammaRatioCheck {
    pub holds: bool,
    pub balance: bool,
    pub shift: bool,
    pub scale: bool,
    pub half_shift: bool,
}

/// Opaque: working precision plus the last error message.
pub struct LeroyContext {
    precision: PrecisionContext,
    last_error: CString,
}

/// Opaque: a sampled boundary curve.
pub struct LeroyBoundaryCurve {
    curve: BoundaryCurve,
}

impl LeroyContext {
    fn fail(&mut self, status: LeroyStatus, msg: impl Into<String>) -> LeroyStatus {
        let msg = msg.into().replace('\0', " ");
        self.last_error = CString::new(msg).unwrap_or_default();
        status
    }
}

/// Runs `body` on the context, converting errors and panics to statuses.
unsafe fn with_ctx<F>(ctx: *mut LeroyContext, body: F) -> LeroyStatus
where
    F: FnOnce(&PrecisionContext) -> Result<(), Failure>,
{
    let Some(ctx) = ctx.as_mut() else {
        return LeroyStatus::NullPointer;
    };
    ctx.last_error = CString::default();
    let precision = ctx.precision;
    match catch_unwind(AssertUnwindSafe(|| body(&precision))) {
        Ok(Ok(())) => LeroyStatus::Ok,
        Ok(Err(Failure::Lib(e))) => ctx.fail((&e).into(), e.to_string()),
        Ok(Err(Failure::Status(s, m))) => ctx.fail(s, m),
        Err(_) => ctx.fail(LeroyStatus::Panic, "internal panic"),
    }
}

enum Failure {
    Lib(Error),
    Status(LeroyStatus, String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn null(name: &str) -> Failure {
    Failure::Status(LeroyStatus::NullPointer, format!("{name} is NULL"))
}

unsafe fn put<T>(out: *mut T, name: &str, v: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(name));
    }
    out.write(v);
    Ok(())
}

/// Creates a context working at `digits` significant decimal digits
/// (at least 16). On failure `*out` is set to NULL.
#[no_mangle]
pub unsafe extern "C" fn leroy_context_new(digits: u32, out: *mut *mut LeroyContext) -> LeroyStatus {
    if out.is_null() {
        return LeroyStatus::NullPointer;
    }
    out.write(ptr::null_mut());
    match PrecisionContext::new(digits) {
        Ok(precision) => {
            out.write(Box::into_raw(Box::new(LeroyContext {
                precision,
                last_error: CString::default(),
            })));
            LeroyStatus::Ok
        }
        Err(e) => (&e).into(),
    }
}

#[no_mangle]
pub unsafe extern "C" fn leroy_context_free(ctx: *mut LeroyContext) {
    if !ctx.is_null() {
        drop(Box::from_raw(ctx));
    }
}

#[no_mangle]
pub unsafe extern "C" fn leroy_context_digits(ctx: *const LeroyContext) -> u32 {
    ctx.as_ref().map_or(0, |c| c.precision.decimal_digits())
}

/// Message of the last failure on `ctx`, or "" after a success. Owned by
/// the context and valid until the next call on it.
#[no_mangle]
pub unsafe extern "C" fn leroy_last_error(ctx: *const LeroyContext) -> *const c_char {
    match ctx.as_ref() {
        Some(c) => c.last_error.as_ptr(),
        None => c"context is NULL".as_ptr(),
    }
}

/// Static name of a status code, e.g. "DOMAIN".
#[no_mangle]
pub extern "C" fn leroy_status_name(status: LeroyStatus) -> *const c_char {
    let s: &'static CStr = match status {
        LeroyStatus::Ok => c"OK",
        LeroyStatus::NullPointer => c"NULL_POINTER",
        LeroyStatus::Domain => c"DOMAIN",
        LeroyStatus::Precondition => c"PRECONDITION",
        LeroyStatus::OrderCap => c"ORDER_CAP",
        LeroyStatus::CancellationCap => c"CANCELLATION_CAP",
        LeroyStatus::Quadrature => c"QUADRATURE",
        LeroyStatus::Bracket => c"BRACKET",
        LeroyStatus::NonMonotone => c"NON_MONOTONE",
        LeroyStatus::Precision => c"PRECISION",
        LeroyStatus::BufferTooSmall => c"BUFFER_TOO_SMALL",
        LeroyStatus::OutOfRange => c"OUT_OF_RANGE",
        LeroyStatus::Panic => c"PANIC",
    };
    s.as_ptr()
}

#[no_mangle]
pub extern "C" fn leroy_version() -> *const c_char {
    static V: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(v) => v,
        Err(_) => c"unknown",
    };
    V.as_ptr()
}

/// `k`-th derivative of `F` at real `z`, rounded to double, with its
/// absolute error bound.
#[no_mangle]
pub unsafe extern "C" fn leroy_eval(
    ctx: *mut LeroyContext,
    alpha: f64,
    beta: f64,
    gamma: f64,
    z: f64,
    order: u32,
    value: *mut f64,
    tail_bound: *mut f64,
) -> LeroyStatus {
    with_ctx(ctx, |pc| {
        if value.is_null() {
            return Err(null("value"));
        }
        let r = leroy_derivative(&Params::new(alpha, beta, gamma)?, z, order, pc)?;
        if !tail_bound.is_null() {
            tail_bound.write(r.tail_bound.to_f64());
        }
        put(value, "value", r.value.to_f64())
    })
}

/// As [`leroy_eval`], but writes the value as a NUL-terminated decimal
/// string with the context's digits into `buf`. `*needed` receives the
/// required buffer size including the terminator; if `len` is smaller the
/// call returns `BufferTooSmall` and leaves `buf` alone.
#[no_mangle]
pub unsafe extern "C" fn leroy_eval_string(
    ctx: *mut LeroyContext,
    alpha: f64,
    beta: f64,
    gamma: f64,
    z: f64,
    order: u32,
    buf: *mut c_char,
    len: usize,
    needed: *mut usize,
) -> LeroyStatus {
    with_ctx(ctx, |pc| {
        let r = leroy_derivative(&Params::new(alpha, beta, gamma)?, z, order, pc)?;
        let s = format_sig(&r.value, pc.decimal_digits() as usize);
        let n = s.len() + 1;
        if !needed.is_null() {
            needed.write(n);
        }
        if buf.is_null() {
            return Err(null("buf"));
        }
        if len < n {
            return Err(Failure::Status(
                LeroyStatus::BufferTooSmall,
                format!("buffer of {len} bytes, need {n}"),
            ));
        }
        ptr::copy_nonoverlapping(s.as_ptr().cast::<c_char>(), buf, s.len());
        buf.add(s.len()).write(0);
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn leroy_classify(
    ctx: *mut LeroyContext,
    alpha: f64,
    beta: f64,
    gamma: f64,
    out: *mut LeroyVerdict,
) -> LeroyStatus {
    with_ctx(ctx, |pc| {
        let v = classify(&Params::new(alpha, beta, gamma)?, pc);
        let status = match v.status {
            CmStatus::CM => LeroyCmStatus::Cm,
            CmStatus::NotCM => LeroyCmStatus::NotCm,
            CmStatus::CMBySufficiency => LeroyCmStatus::CmBySufficiency,
            CmStatus::OpenRegion => LeroyCmStatus::OpenRegion,
        };
        let clause = match v.clause {
            Clause::TheoremA => LeroyClause::TheoremA,
            Clause::TheoremBSuff => LeroyClause::TheoremBSuff,
            Clause::TheoremBNec => LeroyClause::TheoremBNec,
            Clause::TheoremC => LeroyClause::TheoremC,
            Clause::CriterionSufficient => LeroyClause::CriterionSufficient,
            Clause::StirlingDegenerate => LeroyClause::StirlingDegenerate,
        };
        put(out, "out", LeroyVerdict { status, clause })
    })
}

#[no_mangle]
pub unsafe extern "C" fn leroy_criterion(
    ctx: *mut LeroyContext,
    alpha: f64,
    beta: f64,
    gamma: f64,
    out: *mut LeroyCriterion,
) -> LeroyStatus {
    with_ctx(ctx, |pc| {
        let r = criterion_analyze(&Params::new(alpha, beta, gamma)?, pc);
        let (argmax, argmax_z) = match r.argmax {
            Argmax::Interior(z) => (LeroyArgmax::Interior, z),
            Argmax::LowerEnd => (LeroyArgmax::LowerEnd, 0.0),
            Argmax::UpperEnd => (LeroyArgmax::UpperEnd, 1.0),
        };
        let (zero_limit_kind, zero_limit) = match r.zero_limit_phi {
            ZeroLimit::Finite(v) => (LeroyLimitKind::Finite, v),
            ZeroLimit::PlusInfinity => (LeroyLimitKind::PlusInfinity, f64::INFINITY),
            ZeroLimit::MinusInfinity => (LeroyLimitKind::MinusInfinity, f64::NEG_INFINITY),
        };
        let pattern = match r.pattern {
            Pattern::NonPositive => LeroyPattern::NonPositive,
            Pattern::NegThenPos => LeroyPattern::NegThenPos,
            Pattern::NegPosNeg => LeroyPattern::NegPosNeg,
            Pattern::Other => LeroyPattern::Other,
        };
        put(
            out,
            "out",
            LeroyCriterion {
                holds: r.holds,
                marginal: r.marginal,
                sup_g: r.sup_g.to_f64(),
                argmax,
                argmax_z,
                pattern,
                zero_limit_kind,
                zero_limit,
                n_critical_points: r.critical_points.len(),
                n_sign_changes: r.sign_changes.len(),
                tolerance: r.tolerance,
            },
        )
    })
}

/// `ln E[X^n]`.
#[no_mangle]
pub unsafe extern "C" fn leroy_ln_moment(
    ctx: *mut LeroyContext,
    alpha: f64,
    beta: f64,
    gamma: f64,
    n: u64,
    out: *mut f64,
) -> LeroyStatus {
    with_ctx(ctx, |pc| {
        let m = moment(&Params::new(alpha, beta, gamma)?, n, pc);
        put(out, "out", m.ln_value.to_f64())
    })
}

/// `ln E[X^s]` in closed form, `s > -1`.
#[no_mangle]
pub unsafe extern "C" fn leroy_ln_mellin(
    ctx: *mut LeroyContext,
    alpha: f64,
    beta: f64,
    gamma: f64,
    s: f64,
    out: *mut f64,
) -> LeroyStatus {
    with_ctx(ctx, |pc| {
        let v = ln_mellin_closed_form(&Params::new(alpha, beta, gamma)?, s, pc)?;
        put(out, "out", v.to_f64())
    })
}

/// Lévy-Khintchine exponent at `s > 0` by quadrature.
#[no_mangle]
pub unsafe extern "C" fn leroy_levy_exponent(
    ctx: *mut LeroyContext,
    alpha: f64,
    beta: f64,
    gamma: f64,
    s: f64,
    out: *mut LeroyLevyExponent,
) -> LeroyStatus {
    with_ctx(ctx, |pc| {
        let e = levy_exponent_quadrature(&Params::new(alpha, beta, gamma)?, s, pc)?;
        put(
            out,
            "out",
            LeroyLevyExponent {
                value: e.value,
                drift: e.drift,
                integral: e.integral,
                error: e.error,
            },
        )
    })
}

#[no_mangle]
pub unsafe extern "C" fn leroy_hankel(
    ctx: *mut LeroyContext,
    alpha: f64,
    beta: f64,
    gamma: f64,
    order: u32,
    out: *mut LeroyHankel,
) -> LeroyStatus {
    with_ctx(ctx, |pc| {
        let r = hankel_test(&Params::new(alpha, beta, gamma)?, order, pc)?;
        let (violation_family, violation_k) = match r.first_violation {
            Some(v) => (if v.family == HankelFamily::H0 { 0 } else { 1 }, v.k as i32),
            None => (-1, -1),
        };
        put(
            out,
            "out",
            LeroyHankel {
                all_nonnegative: r.all_nonnegative,
                violation_family,
                violation_k,
                digits_used: r.digits_used,
            },
        )
    })
}

#[no_mangle]
#[allow(non_snake_case, clippy::too_many_arguments)]
pub unsafe extern "C" fn leroy_gamma_ratio_check(
    ctx: *mut LeroyContext,
    A: f64,
    a: f64,
    B: f64,
    b: f64,
    theta: f64,
    alpha_exp: f64,
    beta_exp: f64,
    out: *mut LeroyGammaRatioCheck,
) -> LeroyStatus {
    with_ctx(ctx, |_| {
        let c = gamma_ratio_cm_check(&GammaRatioParams::new(A, a, B, b, theta, alpha_exp, beta_exp)?);
        put(
            out,
            "out",
            LeroyGammaRatioCheck {
                holds: c.holds,
                balance: c.balance,
                shift: c.shift,
                scale: c.scale,
                half_shift: c.half_shift,
            },
        )
    })
}

/// Bernstein property of `ψ(Ax+a) - ψ(Bx+b)`.
#[no_mangle]
#[allow(non_snake_case)]
pub unsafe extern "C" fn leroy_digamma_bernstein(
    ctx: *mut LeroyContext,
    A: f64,
    a: f64,
    B: f64,
    b: f64,
    out: *mut bool,
) -> LeroyStatus {
    with_ctx(ctx, |_| put(out, "out", digamma_bernstein_check(A, a, B, b)?))
}

/// Traces `β(α)` for fixed `γ > 1` on `n_points ≥ 8` samples.
#[no_mangle]
pub unsafe extern "C" fn leroy_boundary_trace(
    ctx: *mut LeroyContext,
    gamma: f64,
    n_points: usize,
    out: *mut *mut LeroyBoundaryCurve,
) -> LeroyStatus {
    if !out.is_null() {
        out.write(ptr::null_mut());
    }
    with_ctx(ctx, |pc| {
        if out.is_null() {
            return Err(null("out"));
        }
        let curve = trace_curve(gamma, n_points, pc)?;
        out.write(Box::into_raw(Box::new(LeroyBoundaryCurve { curve })));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn leroy_boundary_free(curve: *mut LeroyBoundaryCurve) {
    if !curve.is_null() {
        drop(Box::from_raw(curve));
    }
}

/// Number of samples, 0 for NULL.
#[no_mangle]
pub unsafe extern "C" fn leroy_boundary_len(curve: *const LeroyBoundaryCurve) -> usize {
    curve.as_ref().map_or(0, |c| c.curve.alphas.len())
}

#[no_mangle]
pub unsafe extern "C" fn leroy_boundary_ratio_monotone(curve: *const LeroyBoundaryCurve) -> bool {
    curve.as_ref().is_some_and(|c| c.curve.ratio_monotone)
}

#[no_mangle]
pub unsafe extern "C" fn leroy_boundary_point(
    curve: *const LeroyBoundaryCurve,
    index: usize,
    alpha: *mut f64,
    beta: *mut f64,
) -> LeroyStatus {
    let Some(c) = curve.as_ref() else {
        return LeroyStatus::NullPointer;
    };
    if alpha.is_null() || beta.is_null() {
        return LeroyStatus::NullPointer;
    }
    if index >= c.curve.alphas.len() {
        return LeroyStatus::OutOfRange;
    }
    alpha.write(c.curve.alphas[index]);
    beta.write(c.curve.betas[index]);
    LeroyStatus::Ok
}

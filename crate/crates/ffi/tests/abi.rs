use std::ffi::CStr;
use std::path::Path;
use std::process::Command;
use std::ptr;

use leroy_ffi::*;

fn context(digits: u32) -> *mut LeroyContext {
    let mut ctx = ptr::null_mut();
    assert_eq!(unsafe { leroy_context_new(digits, &mut ctx) }, LeroyStatus::Ok);
    assert!(!ctx.is_null());
    ctx
}

fn last_error(ctx: *const LeroyContext) -> String {
    unsafe { CStr::from_ptr(leroy_last_error(ctx)) }.to_string_lossy().into_owned()
}

#[test]
fn context_lifecycle() {
    let mut ctx = ptr::null_mut();
    assert_eq!(unsafe { leroy_context_new(8, &mut ctx) }, LeroyStatus::Domain);
    assert!(ctx.is_null());
    assert_eq!(unsafe { leroy_context_new(40, ptr::null_mut()) }, LeroyStatus::NullPointer);
    let ctx = context(40);
    assert_eq!(unsafe { leroy_context_digits(ctx) }, 40);
    assert_eq!(last_error(ctx), "");
    unsafe {
        leroy_context_free(ctx);
        leroy_context_free(ptr::null_mut());
    }
}

#[test]
fn eval_exp_minus_one() {
    let ctx = context(30);
    let (mut v, mut tail) = (0.0, 0.0);
    let st = unsafe { leroy_eval(ctx, 1.0, 1.0, 1.0, -1.0, 0, &mut v, &mut tail) };
    assert_eq!(st, LeroyStatus::Ok);
    assert!((v - (-1.0f64).exp()).abs() < 1e-16);
    assert!(tail < 1e-25);

    let mut buf = [0 as std::ffi::c_char; 64];
    let mut needed = 0usize;
    let st = unsafe { leroy_eval_string(ctx, 1.0, 1.0, 1.0, -1.0, 0, buf.as_mut_ptr(), buf.len(), &mut needed) };
    assert_eq!(st, LeroyStatus::Ok);
    let s = unsafe { CStr::from_ptr(buf.as_ptr()) }.to_str().unwrap();
    assert_eq!(s, "3.67879441171442321595523770161e-1");
    assert_eq!(needed, s.len() + 1);

    let mut small = [0 as std::ffi::c_char; 8];
    let st = unsafe { leroy_eval_string(ctx, 1.0, 1.0, 1.0, -1.0, 0, small.as_mut_ptr(), small.len(), &mut needed) };
    assert_eq!(st, LeroyStatus::BufferTooSmall);
    assert_eq!(needed, s.len() + 1);
    unsafe { leroy_context_free(ctx) };
}

#[test]
fn errors_carry_messages() {
    let ctx = context(30);
    let mut v = 0.0;
    let st = unsafe { leroy_eval(ctx, -1.0, 1.0, 1.0, 0.5, 0, &mut v, ptr::null_mut()) };
    assert_eq!(st, LeroyStatus::Domain);
    assert!(last_error(ctx).contains("alpha"), "{}", last_error(ctx));
    let name = unsafe { CStr::from_ptr(leroy_status_name(st)) };
    assert_eq!(name.to_str().unwrap(), "DOMAIN");

    let st = unsafe { leroy_eval(ctx, 1.0, 1.0, 1.0, 0.5, 0, ptr::null_mut(), ptr::null_mut()) };
    assert_eq!(st, LeroyStatus::NullPointer);

    let mut h = LeroyHankel {
        all_nonnegative: false,
        violation_family: 0,
        violation_k: 0,
        digits_used: 0,
    };
    let st = unsafe { leroy_hankel(ctx, 1.0, 1.0, 1.0, 40, &mut h) };
    assert_eq!(st, LeroyStatus::OrderCap);

    // A success clears the message.
    let st = unsafe { leroy_eval(ctx, 1.0, 1.0, 1.0, 0.5, 0, &mut v, ptr::null_mut()) };
    assert_eq!(st, LeroyStatus::Ok);
    assert_eq!(last_error(ctx), "");
    assert_eq!(unsafe { leroy_eval(ptr::null_mut(), 1.0, 1.0, 1.0, 0.5, 0, &mut v, ptr::null_mut()) }, LeroyStatus::NullPointer);
    unsafe { leroy_context_free(ctx) };
}

#[test]
fn classification_and_criterion() {
    let ctx = context(30);
    let mut v = LeroyVerdict {
        status: LeroyCmStatus::OpenRegion,
        clause: LeroyClause::TheoremA,
    };
    assert_eq!(unsafe { leroy_classify(ctx, 0.5, 0.75, 2.0, &mut v) }, LeroyStatus::Ok);
    assert_eq!(v.status, LeroyCmStatus::Cm);
    assert_eq!(v.clause, LeroyClause::TheoremC);
    assert_eq!(unsafe { leroy_classify(ctx, 0.25, 0.26, 2.0, &mut v) }, LeroyStatus::Ok);
    assert_eq!(v.status, LeroyCmStatus::OpenRegion);

    let mut c = std::mem::MaybeUninit::<LeroyCriterion>::uninit();
    assert_eq!(unsafe { leroy_criterion(ctx, 0.5, 0.6, 2.0, c.as_mut_ptr()) }, LeroyStatus::Ok);
    let c = unsafe { c.assume_init() };
    assert!(!c.holds);
    assert_eq!(c.pattern, LeroyPattern::NegThenPos);
    assert_eq!(c.zero_limit_kind, LeroyLimitKind::Finite);
    assert!((c.zero_limit + 0.3).abs() < 1e-12);

    let mut h = std::mem::MaybeUninit::<LeroyHankel>::uninit();
    assert_eq!(unsafe { leroy_hankel(ctx, 0.5, 0.6, 2.0, 4, h.as_mut_ptr()) }, LeroyStatus::Ok);
    let h = unsafe { h.assume_init() };
    assert!(!h.all_nonnegative);
    assert_eq!((h.violation_family, h.violation_k), (0, 1));
    unsafe { leroy_context_free(ctx) };
}

#[test]
fn moments_mellin_levy() {
    let ctx = context(30);
    let (mut lm, mut lmel) = (0.0, 0.0);
    assert_eq!(unsafe { leroy_ln_moment(ctx, 1.0, 1.0, 2.0, 3, &mut lm) }, LeroyStatus::Ok);
    assert!((lm + 6f64.ln()).abs() < 1e-14);
    assert_eq!(unsafe { leroy_ln_mellin(ctx, 1.0, 1.0, 2.0, 3.0, &mut lmel) }, LeroyStatus::Ok);
    assert!((lm - lmel).abs() < 1e-14);
    let mut e = std::mem::MaybeUninit::<LeroyLevyExponent>::uninit();
    assert_eq!(unsafe { leroy_levy_exponent(ctx, 0.3, 0.4, 2.0, 2.5, e.as_mut_ptr()) }, LeroyStatus::Ok);
    let e = unsafe { e.assume_init() };
    let mut cf = 0.0;
    assert_eq!(unsafe { leroy_ln_mellin(ctx, 0.3, 0.4, 2.0, 2.5, &mut cf) }, LeroyStatus::Ok);
    assert!((e.value - cf).abs() < 1e-8);
    assert_eq!(unsafe { leroy_ln_mellin(ctx, 0.3, 0.4, 2.0, -2.0, &mut cf) }, LeroyStatus::Domain);
    unsafe { leroy_context_free(ctx) };
}

#[test]
fn gamma_ratio_and_bernstein() {
    let ctx = context(20);
    let mut c = std::mem::MaybeUninit::<LeroyGammaRatioCheck>::uninit();
    let st = unsafe { leroy_gamma_ratio_check(ctx, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, c.as_mut_ptr()) };
    assert_eq!(st, LeroyStatus::Ok);
    assert!(unsafe { c.assume_init() }.holds);
    let mut b = true;
    assert_eq!(unsafe { leroy_digamma_bernstein(ctx, 1.0, 2.0, 1.0, 1.0, &mut b) }, LeroyStatus::Ok);
    assert!(!b);
    assert_eq!(unsafe { leroy_digamma_bernstein(ctx, 0.0, 2.0, 1.0, 1.0, &mut b) }, LeroyStatus::Domain);
    unsafe { leroy_context_free(ctx) };
}

#[test]
fn boundary_handle() {
    let ctx = context(20);
    let mut curve = ptr::null_mut();
    assert_eq!(unsafe { leroy_boundary_trace(ctx, 2.0, 8, &mut curve) }, LeroyStatus::Ok);
    assert_eq!(unsafe { leroy_boundary_len(curve) }, 8);
    assert!(unsafe { leroy_boundary_ratio_monotone(curve) });
    for i in 0..8 {
        let (mut a, mut b) = (0.0, 0.0);
        assert_eq!(unsafe { leroy_boundary_point(curve, i, &mut a, &mut b) }, LeroyStatus::Ok);
        assert!(a < b && b < 1.5 * a, "{a} {b}");
    }
    let (mut a, mut b) = (0.0, 0.0);
    assert_eq!(unsafe { leroy_boundary_point(curve, 8, &mut a, &mut b) }, LeroyStatus::OutOfRange);
    unsafe { leroy_boundary_free(curve) };

    let mut curve = ptr::null_mut();
    assert_eq!(unsafe { leroy_boundary_trace(ctx, 0.5, 8, &mut curve) }, LeroyStatus::Precondition);
    assert!(curve.is_null());
    assert_eq!(unsafe { leroy_boundary_len(curve) }, 0);
    unsafe { leroy_context_free(ctx) };
}

fn c_compiler() -> Option<String> {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    Command::new(&cc).arg("--version").output().ok().map(|_| cc)
}

#[test]
fn header_compiles_as_c_and_cpp() {
    let Some(cc) = c_compiler() else {
        eprintln!("no C compiler found; skipping");
        return;
    };
    let root = Path::new(env!("CARGO_MANIFEST_DIR"));
    let include = root.join("include");
    assert!(include.join("leroy.h").exists());
    let smoke = root.join("tests/c/smoke.c");
    let out = Command::new(&cc)
        .args(["-std=c11", "-Wall", "-Wextra", "-Werror", "-fsyntax-only", "-I"])
        .arg(&include)
        .arg(&smoke)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let out = Command::new(&cc)
        .args(["-x", "c++", "-std=c++17", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(&include)
        .arg(&smoke)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

//! Extended-precision log-Gamma and digamma.
//!
//! `ln_gamma` switches between Spouge's convergent approximation for
//! moderate arguments and the Stirling series for large ones. The switch
//! point is the argument above which the Stirling series, truncated at its
//! smallest term, meets the working precision. `digamma` uses the
//! asymptotic series above the same point and upward recurrence below it.

use std::collections::HashMap;
use std::f64::consts::{LN_2, PI};
use std::sync::{Arc, Mutex, OnceLock};

use rug::float::Constant;
use rug::{Float, Integer};

use crate::error::{Error, Result};
use crate::params::Params;
use crate::precision::PrecisionContext;

/// Extra bits carried internally on top of the context precision.
const INTERNAL_GUARD: u32 = 32;

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: &Float, ctx: &PrecisionContext) -> Result<Float> {
    check_positive(x, "ln_gamma")?;
    let out = ln_gamma_unchecked(x, ctx.bits());
    Ok(Float::with_val(ctx.bits(), out))
}

/// Convenience wrapper taking an `f64` argument.
pub fn ln_gamma_f64(x: f64, ctx: &PrecisionContext) -> Result<Float> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("ln_gamma of non-finite {x}")));
    }
    ln_gamma(&Float::with_val(64, x), ctx)
}

/// Digamma `ψ(x) = Γ'(x)/Γ(x)` for `x > 0`.
pub fn digamma(x: &Float, ctx: &PrecisionContext) -> Result<Float> {
    check_positive(x, "digamma")?;
    let out = digamma_unchecked(x, ctx.bits());
    Ok(Float::with_val(ctx.bits(), out))
}

pub fn digamma_f64(x: f64, ctx: &PrecisionContext) -> Result<Float> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("digamma of non-finite {x}")));
    }
    digamma(&Float::with_val(64, x), ctx)
}

/// Stirling equivalent of the moment sequence on the critical line
/// `αγ = 1`:
///
/// `E[X^n] ~ Γ(β)^γ (2π)^((1-γ)/2) γ^(n + γ(β-1/2)) n^(γ(1/2-β) + 1/2)`.
pub fn moment_asymptotic(params: &Params, n: u64, ctx: &PrecisionContext) -> Result<Float> {
    if n == 0 {
        return Err(Error::Precondition("moment_asymptotic needs n >= 1".into()));
    }
    if !params.on_critical_line(ctx) {
        return Err(Error::Precondition(format!(
            "moment_asymptotic needs alpha*gamma = 1, got {}",
            params.alpha() * params.gamma()
        )));
    }
    let bits = ctx.bits() + INTERNAL_GUARD;
    let (beta, gamma) = (params.beta(), params.gamma());
    let two_pi = Float::with_val(bits, Constant::Pi) * 2u32;
    let n_f = Float::with_val(bits, n);
    let mut log = ln_gamma_unchecked(&Float::with_val(bits, beta), bits) * gamma;
    log += Float::with_val(bits, two_pi.ln_ref()) * ((1.0 - gamma) / 2.0);
    let ln_g = Float::with_val(bits, gamma).ln();
    log += ln_g * (Float::with_val(bits, n) + gamma * (beta - 0.5));
    log += n_f.ln() * (gamma * (0.5 - beta) + 0.5);
    Ok(Float::with_val(ctx.bits(), log.exp()))
}

fn check_positive(x: &Float, what: &str) -> Result<()> {
    if !x.is_finite() || *x <= 0 {
        return Err(Error::Domain(format!("{what} needs a finite positive argument, got {x}")));
    }
    Ok(())
}

/// `ln Γ(x)` at `bits` of output precision; `x > 0` is the caller's job.
pub(crate) fn ln_gamma_unchecked(x: &Float, bits: u32) -> Float {
    if *x == 1 || *x == 2 {
        return Float::new(bits);
    }
    let wp = bits + INTERNAL_GUARD;
    if *x >= stirling_threshold(wp) {
        stirling_ln_gamma(x, wp)
    } else {
        spouge_ln_gamma(x, wp)
    }
}

pub(crate) fn digamma_unchecked(x: &Float, bits: u32) -> Float {
    let wp = bits + INTERNAL_GUARD;
    let threshold = stirling_threshold(wp);
    if *x >= threshold {
        return asymptotic_digamma(x, wp);
    }
    let shift = Float::with_val(64, &threshold - x).ceil();
    let shift = shift.to_u32_saturating().unwrap_or(0).max(1);
    let mut correction = Float::new(wp);
    let mut y = Float::with_val(wp, x);
    for _ in 0..shift {
        correction += Float::with_val(wp, y.recip_ref());
        y += 1u32;
    }
    asymptotic_digamma(&y, wp) - correction
}

/// Argument above which the Stirling series reaches `2^-wp` before it
/// starts diverging (its smallest term is about `exp(-2πx)`).
fn stirling_threshold(wp: u32) -> f64 {
    (wp as f64 + 8.0) * LN_2 / (2.0 * PI) + 1.0
}

fn stirling_ln_gamma(x: &Float, wp: u32) -> Float {
    let coeffs = stirling_coefficients(wp);
    let x = Float::with_val(wp, x);
    let ln_x = Float::with_val(wp, x.ln_ref());
    let mut sum = Float::with_val(wp, &x - 0.5) * &ln_x;
    sum -= &x;
    sum += &coeffs.half_ln_two_pi;

    let inv_x = Float::with_val(wp, x.recip_ref());
    let inv_x2 = Float::with_val(wp, inv_x.square_ref());
    let mut power = inv_x;
    let cutoff = sum.get_exp().unwrap_or(0) - wp as i32 - 4;
    for c in &coeffs.ln_gamma {
        let term = Float::with_val(wp, c * &power);
        if term.is_zero() || term.get_exp().unwrap_or(i32::MIN) < cutoff {
            break;
        }
        sum += term;
        power *= &inv_x2;
    }
    sum
}

fn asymptotic_digamma(x: &Float, wp: u32) -> Float {
    let coeffs = stirling_coefficients(wp);
    let x = Float::with_val(wp, x);
    let mut sum = Float::with_val(wp, x.ln_ref());
    sum -= Float::with_val(wp, x.recip_ref()) / 2u32;

    let inv_x2 = Float::with_val(wp, x.square_ref()).recip();
    let mut power = inv_x2.clone();
    let cutoff = sum.get_exp().unwrap_or(0) - wp as i32 - 4;
    for c in &coeffs.digamma {
        let term = Float::with_val(wp, c * &power);
        if term.is_zero() || term.get_exp().unwrap_or(i32::MIN) < cutoff {
            break;
        }
        sum -= term;
        power *= &inv_x2;
    }
    sum
}

fn spouge_ln_gamma(x: &Float, wp: u32) -> Float {
    let sp = spouge_coefficients(wp);
    let bits = sp.bits;
    let z = Float::with_val(bits, x - 1u32);
    let mut series = sp.c0.clone();
    let mut denom = Float::with_val(bits, &z + 1u32);
    for c in &sp.coeffs {
        series += Float::with_val(bits, c / &denom);
        denom += 1u32;
    }
    let z_plus_a = Float::with_val(bits, &z + sp.a);
    let mut out = Float::with_val(bits, &z + 0.5) * Float::with_val(bits, z_plus_a.ln_ref());
    out -= z_plus_a;
    out += series.ln();
    Float::with_val(wp, out)
}

struct StirlingCoefficients {
    half_ln_two_pi: Float,
    /// `B_{2n} / (2n (2n-1))`
    ln_gamma: Vec<Float>,
    /// `B_{2n} / (2n)`
    digamma: Vec<Float>,
}

struct SpougeCoefficients {
    a: u32,
    bits: u32,
    c0: Float,
    coeffs: Vec<Float>,
}

fn stirling_coefficients(wp: u32) -> Arc<StirlingCoefficients> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<StirlingCoefficients>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(c) = cache.lock().unwrap().get(&wp) {
        return c.clone();
    }
    let terms = (PI * stirling_threshold(wp)).ceil() as usize + 4;
    let tangent = tangent_numbers(terms);
    let mut ln_gamma = Vec::with_capacity(terms);
    let mut digamma = Vec::with_capacity(terms);
    for (i, t) in tangent.iter().take(terms).enumerate() {
        let n = i as u32 + 1;
        // B_{2n} = (-1)^(n-1) 2n T_n / (4^n (4^n - 1))
        let four_n = Integer::from(1) << (2 * n);
        let denom = Integer::from(&four_n * (Integer::from(&four_n - 1u32)));
        let mut b_over_2n = Float::with_val(wp, t) / Float::with_val(wp, &denom);
        if n % 2 == 0 {
            b_over_2n = -b_over_2n;
        }
        ln_gamma.push(Float::with_val(wp, &b_over_2n / (2 * n - 1)));
        digamma.push(b_over_2n);
    }
    let two_pi = Float::with_val(wp, Constant::Pi) * 2u32;
    let coeffs = Arc::new(StirlingCoefficients {
        half_ln_two_pi: two_pi.ln() / 2u32,
        ln_gamma,
        digamma,
    });
    cache.lock().unwrap().insert(wp, coeffs.clone());
    coeffs
}

fn spouge_coefficients(wp: u32) -> Arc<SpougeCoefficients> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<SpougeCoefficients>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(c) = cache.lock().unwrap().get(&wp) {
        return c.clone();
    }
    // Relative error is below a^(-1/2) (2π)^-(a+1/2); the coefficients
    // alternate and peak near 2^(1.85 a), so that much extra precision is
    // carried through the sum.
    let a = ((wp as f64 + 8.0) * LN_2 / (2.0 * PI).ln()).ceil() as u32 + 1;
    let bits = wp + (1.9 * a as f64).ceil() as u32 + 32;
    let two_pi = Float::with_val(bits, Constant::Pi) * 2u32;
    let c0 = two_pi.sqrt();
    let mut coeffs = Vec::with_capacity(a as usize - 1);
    let mut factorial = Float::with_val(bits, 1u32);
    for k in 1..a {
        if k > 1 {
            factorial *= k - 1;
        }
        let base = Float::with_val(bits, a - k);
        let mut c = Float::with_val(bits, base.ln_ref()) * (k as f64 - 0.5);
        c += a - k;
        let mut c = c.exp() / &factorial;
        if k % 2 == 0 {
            c = -c;
        }
        coeffs.push(c);
    }
    let sp = Arc::new(SpougeCoefficients { a, bits, c0, coeffs });
    cache.lock().unwrap().insert(wp, sp.clone());
    sp
}

/// Tangent numbers `T_1, ..., T_n` (1, 2, 16, 272, ...), exact.
fn tangent_numbers(n: usize) -> Arc<Vec<Integer>> {
    static CACHE: OnceLock<Mutex<Arc<Vec<Integer>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(Arc::new(Vec::new())));
    let mut guard = cache.lock().unwrap();
    if guard.len() >= n {
        return guard.clone();
    }
    let n = n.max(2 * guard.len());
    let mut t = vec![Integer::new(); n + 1];
    t[1] = Integer::from(1);
    for k in 2..=n {
        t[k] = Integer::from(&t[k - 1] * (k as u32 - 1));
    }
    for k in 2..=n {
        for j in k..=n {
            let next = Integer::from(&t[j - 1] * (j - k) as u32) + Integer::from(&t[j] * (j - k + 2) as u32);
            t[j] = next;
        }
    }
    t.remove(0);
    *guard = Arc::new(t);
    guard.clone()
}

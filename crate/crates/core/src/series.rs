//! Series evaluation of `F^(γ)_{α,β}(z) = Σ_{n≥0} z^n / Γ(β + αn)^γ`,
//! its derivatives, the moment sequence and the closed-form Mellin
//! transform of the associated random variable.

use rug::{Float, Integer};

use crate::error::{Error, Result};
use crate::gamma::ln_gamma_unchecked;
use crate::params::Params;
use crate::precision::{digits_to_bits, PrecisionContext};

/// Largest derivative order accepted by [`leroy_derivative`].
pub const MAX_DERIVATIVE_ORDER: u32 = 30;

/// Precision cap for the cancellation guard on the negative axis.
pub const MAX_SERIES_DIGITS: u32 = 4000;

const MAX_TERMS: usize = 2_000_000;

/// A truncated series value with its truncation accounting.
#[derive(Debug, Clone)]
pub struct SeriesResult {
    pub value: Float,
    pub terms_used: usize,
    /// Bound on `|value - exact|`, truncation plus accumulated rounding.
    pub tail_bound: Float,
    /// Decimal digits the final pass ran at (after any escalation).
    pub digits_used: u32,
}

/// `f64` forecast of a series run, used to size precision and to decide
/// whether direct summation is affordable at all.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesPlan {
    /// Index of the largest term.
    pub peak_index: u64,
    /// `log10` of the largest term magnitude.
    pub log10_peak: f64,
    /// `log10` of the first term magnitude.
    pub log10_first: f64,
    /// Estimated number of terms before the stopping rule fires.
    pub estimated_terms: u64,
    /// Digits for the first summation pass.
    pub digits: u32,
}

/// `F^(γ)_{α,β}(z)`.
pub fn leroy_eval(params: &Params, z: f64, ctx: &PrecisionContext) -> Result<SeriesResult> {
    LeroySeries::new(*params, *ctx).derivative(z, 0)
}

/// `d^k/dz^k F^(γ)_{α,β}(z) = Σ_n (n+k)!/n! z^n / Γ(β + α(n+k))^γ`.
pub fn leroy_derivative(params: &Params, z: f64, k: u32, ctx: &PrecisionContext) -> Result<SeriesResult> {
    LeroySeries::new(*params, *ctx).derivative(z, k)
}

/// Generalized Mittag-Leffler function `E_{α,β}(z)`, the `γ = 1` case.
pub fn mittag_leffler(alpha: f64, beta: f64, z: f64, ctx: &PrecisionContext) -> Result<SeriesResult> {
    leroy_eval(&Params::new(alpha, beta, 1.0)?, z, ctx)
}

/// Evaluator that keeps the coefficient table `-γ ln Γ(β + αm)` between
/// calls, so sweeps over `z` and derivative order share the Gamma work.
pub struct LeroySeries {
    params: Params,
    ctx: PrecisionContext,
    table: CoefficientTable,
}

struct CoefficientTable {
    bits: u32,
    /// `-γ ln Γ(β + αm)`
    ln_coef: Vec<Float>,
    /// `exp(ln_coef[m+1] - ln_coef[m])`
    ratio: Vec<Float>,
    max_abs_ln: f64,
}

impl CoefficientTable {
    fn empty() -> Self {
        Self {
            bits: 0,
            ln_coef: Vec::new(),
            ratio: Vec::new(),
            max_abs_ln: 0.0,
        }
    }

    fn ensure(&mut self, params: &Params, bits: u32, upto: usize) {
        if bits > self.bits {
            // Grow geometrically: sweeps raise the precision a little on
            // almost every call, and each rebuild redoes every ln Γ.
            let grown = if self.bits == 0 { bits } else { bits.max(self.bits + self.bits / 2) };
            *self = Self::empty();
            self.bits = grown.div_ceil(64) * 64;
        }
        let bits = self.bits;
        while self.ln_coef.len() <= upto + 1 {
            let m = self.ln_coef.len() as u64;
            let mut arg = Float::with_val(bits + 64, params.alpha());
            arg *= m;
            arg += params.beta();
            let c = ln_gamma_unchecked(&arg, bits) * (-params.gamma());
            self.max_abs_ln = self.max_abs_ln.max(c.to_f64().abs());
            if let Some(prev) = self.ln_coef.last() {
                self.ratio.push(Float::with_val(bits, &c - prev).exp());
            }
            self.ln_coef.push(c);
        }
    }
}

impl LeroySeries {
    pub fn new(params: Params, ctx: PrecisionContext) -> Self {
        Self {
            params,
            ctx,
            table: CoefficientTable::empty(),
        }
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn context(&self) -> &PrecisionContext {
        &self.ctx
    }

    /// `f64` forecast of summing the order-`k` derivative series at `z`.
    pub fn plan(&self, z: f64, k: u32) -> SeriesPlan {
        plan(&self.params, z, k, &self.ctx)
    }

    /// `k`-th derivative at `z`, with precision escalated until the
    /// accumulated rounding fits the error contract.
    pub fn derivative(&mut self, z: f64, k: u32) -> Result<SeriesResult> {
        if !z.is_finite() {
            return Err(Error::Domain(format!("series argument must be finite, got {z}")));
        }
        if k > MAX_DERIVATIVE_ORDER {
            return Err(Error::OrderCap {
                order: k,
                cap: MAX_DERIVATIVE_ORDER,
            });
        }
        let plan = self.plan(z, k);
        if plan.log10_peak > 1.0e8 {
            return Err(Error::Domain(format!(
                "series terms reach 10^{:.3e}, beyond the representable range",
                plan.log10_peak
            )));
        }
        if plan.estimated_terms as usize > MAX_TERMS {
            return Err(Error::CancellationCap {
                needed: plan.digits,
                cap: MAX_SERIES_DIGITS,
            });
        }
        let mut digits = plan.digits;
        loop {
            if digits > MAX_SERIES_DIGITS {
                return Err(Error::CancellationCap {
                    needed: digits,
                    cap: MAX_SERIES_DIGITS,
                });
            }
            match self.sum_at(z, k, &plan, digits)? {
                Pass::Done(result) => return Ok(result),
                Pass::Escalate(needed) => digits = needed.max(2 * digits),
            }
        }
    }

    fn sum_at(&mut self, z: f64, k: u32, plan: &SeriesPlan, digits: u32) -> Result<Pass> {
        let ctx = self.ctx;
        let guard = (plan.estimated_terms as f64 + 16.0).log2().ceil() as u32 + 16;
        let bits = digits_to_bits(digits) + guard;
        let k_us = k as usize;
        self.table.ensure(&self.params, bits, k_us + plan.estimated_terms as usize + 4);
        let wp = self.table.bits;

        let mut first = Float::with_val(wp, Integer::from(Integer::factorial(k)));
        first *= Float::with_val(wp, self.table.ln_coef[k_us].exp_ref());
        let out_bits = ctx.bits();
        let eps = ctx.epsilon();

        if z == 0.0 {
            let value = Float::with_val(out_bits, &first);
            let ulp = Float::with_val(wp, Float::i_exp(1, 2 - wp as i32));
            let table = Float::with_val(wp, first.abs_ref()) * ulp * (8.0 + self.table.max_abs_ln);
            let tail_bound = Float::with_val(out_bits, table + output_rounding(&value));
            return Ok(Pass::Done(SeriesResult {
                value,
                terms_used: 1,
                tail_bound,
                digits_used: digits,
            }));
        }

        let zf = Float::with_val(wp, z);
        let mut term = first;
        let mut sum = Float::new(wp);
        let mut abs_sum = Float::new(wp);
        let mut n: usize = 0;
        let mut below = 0u32;
        let truncation: Float;
        loop {
            sum += &term;
            abs_sum += Float::with_val(wp, term.abs_ref());
            if n + k_us + 3 >= self.table.ratio.len() {
                self.table.ensure(&self.params, wp, n + k_us + 64 + n / 2);
            }
            let next = next_term(&self.table, &term, &zf, n, k_us, wp);
            n += 1;
            if n > MAX_TERMS {
                return Err(Error::CancellationCap {
                    needed: digits,
                    cap: MAX_SERIES_DIGITS,
                });
            }
            let small = Float::with_val(wp, sum.abs_ref()) * &eps;
            if n as u64 > plan.peak_index && Float::with_val(wp, next.abs_ref()) <= small {
                below += 1;
            } else {
                below = 0;
            }
            if below >= 3 {
                let after = next_term(&self.table, &next, &zf, n, k_us, wp);
                let lead = Float::with_val(wp, next.abs_ref());
                let ratio = if lead.is_zero() {
                    Float::new(wp)
                } else {
                    Float::with_val(wp, after.abs_ref()) / &lead
                };
                let mut bound = if ratio < 1 {
                    Float::with_val(wp, &lead / Float::with_val(wp, 1 - &ratio))
                } else {
                    Float::with_val(wp, f64::INFINITY)
                };
                if z < 0.0 && bound > lead {
                    bound = lead;
                }
                let target = self.target(&sum, wp);
                if bound <= Float::with_val(wp, &target / 2u32) {
                    truncation = bound;
                    break;
                }
            }
            term = next;
        }

        // Every term carries relative error about (n + |ln c|) ulps from the
        // multiplicative recurrence and the Gamma table.
        let ulp = Float::with_val(wp, Float::i_exp(1, 2 - wp as i32));
        let spread = n as f64 + 8.0 + self.table.max_abs_ln;
        let rounding = Float::with_val(wp, &abs_sum * &ulp) * spread;
        let target = self.target(&sum, wp);
        if rounding > Float::with_val(wp, &target / 2u32) {
            let ratio = Float::with_val(64, &rounding / &target).to_f64();
            let needed = digits + ratio.log10().ceil().max(1.0) as u32 + 4;
            return Ok(Pass::Escalate(needed));
        }

        let value = Float::with_val(out_bits, &sum);
        let tail_bound = Float::with_val(out_bits, truncation + rounding + output_rounding(&value));
        Ok(Pass::Done(SeriesResult {
            value,
            terms_used: n,
            tail_bound,
            digits_used: digits,
        }))
    }

    /// `max(10^3 eps |S|, 10^(-d+5))`
    fn target(&self, sum: &Float, wp: u32) -> Float {
        let ctx = &self.ctx;
        let rel = Float::with_val(wp, sum.abs_ref()) * ctx.epsilon() * 1000u32;
        let abs = crate::precision::pow10(5 - ctx.decimal_digits() as i64, wp);
        rel.max(&abs)
    }

}

/// Half an ulp of `value` at its own precision, rounded up.
fn output_rounding(value: &Float) -> Float {
    if value.is_zero() || !value.is_finite() {
        return Float::new(value.prec());
    }
    let e = value.get_exp().unwrap_or(0);
    Float::with_val(64, Float::i_exp(1, e - value.prec() as i32))
}

fn next_term(table: &CoefficientTable, term: &Float, z: &Float, n: usize, k: usize, wp: u32) -> Float {
    let mut next = Float::with_val(wp, term * z);
    next *= (n + k + 1) as u64;
    next /= (n + 1) as u64;
    next *= &table.ratio[n + k];
    next
}

enum Pass {
    Done(SeriesResult),
    Escalate(u32),
}

fn lgamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// `ln |t_n|` for the order-`k` derivative series, in `f64`.
fn log_term(params: &Params, ln_abs_z: f64, k: u32, n: f64) -> f64 {
    let k = k as f64;
    let lf = if n == 0.0 {
        lgamma(k + 1.0)
    } else {
        lgamma(n + k + 1.0) - lgamma(n + 1.0)
    };
    let zpart = if n == 0.0 { 0.0 } else { n * ln_abs_z };
    lf + zpart - params.gamma() * lgamma(params.beta() + params.alpha() * (n + k))
}

fn plan(params: &Params, z: f64, k: u32, ctx: &PrecisionContext) -> SeriesPlan {
    let d = ctx.decimal_digits();
    let l0 = log_term(params, 0.0, k, 0.0);
    if z == 0.0 {
        return SeriesPlan {
            peak_index: 0,
            log10_peak: l0 / std::f64::consts::LN_10,
            log10_first: l0 / std::f64::consts::LN_10,
            estimated_terms: 1,
            digits: d,
        };
    }
    let lz = z.abs().ln();
    let lt = |n: f64| log_term(params, lz, k, n);
    // ln|t_n| is concave in n: first index where the increment turns negative.
    let increasing = |n: f64| lt(n + 1.0) >= lt(n);
    let mut hi = 1.0f64;
    while increasing(hi) && hi < 1.0e18 {
        hi *= 2.0;
    }
    let mut lo = 0.0f64;
    if increasing(0.0) {
        // Beyond 2^53 the midpoint can round onto an endpoint.
        while hi - lo > 1.0 {
            let mid = ((lo + hi) / 2.0).floor();
            if mid <= lo || mid >= hi {
                break;
            }
            if increasing(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo = hi;
    }
    let peak = lo;
    let l_peak = lt(peak).max(l0);

    let ln10 = std::f64::consts::LN_10;
    let reference = l0.min(l_peak);
    let stop = reference.min(0.0) - (d as f64 + 8.0) * ln10;
    let mut hi = (peak + 1.0).max(2.0);
    while lt(hi) > stop && hi < 1.0e18 {
        hi *= 2.0;
    }
    let mut lo = peak;
    while hi - lo > 1.0 {
        let mid = ((lo + hi) / 2.0).floor();
        if mid <= lo || mid >= hi {
            break;
        }
        if lt(mid) > stop {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let terms = hi + 4.0;
    let cancellation = if z < 0.0 { ((l_peak - l0) / ln10).max(0.0) } else { 0.0 };
    let extra = cancellation + terms.log10() + 5.0;
    let digits = (d as f64 + extra).ceil().min(u32::MAX as f64 / 4.0) as u32;
    SeriesPlan {
        peak_index: peak as u64,
        log10_peak: l_peak / ln10,
        log10_first: l0 / ln10,
        estimated_terms: terms.min(u64::MAX as f64 / 2.0) as u64,
        digits,
    }
}

/// `E[X^n] = n! (Γ(β)/Γ(β+αn))^γ` in value and log form.
#[derive(Debug, Clone)]
pub struct Moment {
    pub value: Float,
    pub ln_value: Float,
}

pub fn moment(params: &Params, n: u64, ctx: &PrecisionContext) -> Moment {
    let bits = ctx.bits() + 32;
    let mut arg = Float::with_val(bits + 64, params.alpha());
    arg *= n;
    arg += params.beta();
    let ln_n_fact = ln_gamma_unchecked(&Float::with_val(64, n + 1), bits);
    let ratio = ln_gamma_unchecked(&Float::with_val(64, params.beta()), bits) - ln_gamma_unchecked(&arg, bits);
    let ln_value = ln_n_fact + ratio * params.gamma();
    Moment {
        value: Float::with_val(ctx.bits(), ln_value.exp_ref()),
        ln_value: Float::with_val(ctx.bits(), ln_value),
    }
}

/// `ln E[X^s] = ln Γ(1+s) + γ (ln Γ(β) - ln Γ(αs+β))` for real `s > -1`.
pub fn ln_mellin_closed_form(params: &Params, s: f64, ctx: &PrecisionContext) -> Result<Float> {
    let bits = ctx.bits() + 32;
    if !s.is_finite() || s <= -1.0 {
        return Err(Error::Domain(format!("Mellin transform needs s > -1, got {s}")));
    }
    let mut arg = Float::with_val(bits + 64, params.alpha());
    arg *= s;
    arg += params.beta();
    if arg <= 0 {
        return Err(Error::Domain(format!("Mellin transform needs alpha*s + beta > 0, got s = {s}")));
    }
    let one_plus_s = Float::with_val(bits + 64, s) + 1u32;
    let ratio = ln_gamma_unchecked(&Float::with_val(64, params.beta()), bits) - ln_gamma_unchecked(&arg, bits);
    let out = ln_gamma_unchecked(&one_plus_s, bits) + ratio * params.gamma();
    Ok(Float::with_val(ctx.bits(), out))
}

/// `E[X^s] = Γ(1+s) (Γ(β)/Γ(αs+β))^γ`.
pub fn mellin_closed_form(params: &Params, s: f64, ctx: &PrecisionContext) -> Result<Float> {
    Ok(ln_mellin_closed_form(params, s, ctx)?.exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::ops::Pow;

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    fn p(a: f64, b: f64, g: f64) -> Params {
        Params::new(a, b, g).unwrap()
    }

    fn rel(a: &Float, b: &Float) -> f64 {
        let d = Float::with_val(a.prec().max(b.prec()), a - b).abs();
        (d / Float::with_val(b.prec(), b.abs_ref())).to_f64()
    }

    #[test]
    fn exponential_case() {
        let c = ctx();
        let one = Float::with_val(400, 1u32);
        let e = leroy_eval(&p(1.0, 1.0, 1.0), 1.0, &c).unwrap();
        assert!(rel(&e.value, &Float::with_val(400, one.exp_ref())) < 1e-48);
        let inv = leroy_eval(&p(1.0, 1.0, 1.0), -1.0, &c).unwrap();
        let expected = Float::with_val(400, -&one).exp();
        assert!(rel(&inv.value, &expected) < 1e-48);
        assert!(inv.tail_bound >= 0);
    }

    #[test]
    fn derivatives_of_exponential() {
        let c = ctx();
        let r = leroy_derivative(&p(1.0, 1.0, 1.0), -1.0, 3, &c).unwrap();
        assert!((r.value.to_f64() - 0.36787944117144233).abs() < 1e-15);
    }

    #[test]
    fn value_at_zero_is_first_coefficient() {
        let c = ctx();
        let params = p(0.7, 1.3, 2.5);
        let r = leroy_eval(&params, 0.0, &c).unwrap();
        let g = Float::with_val(400, 1.3).gamma();
        let expected = Float::with_val(400, g.pow(-2.5));
        assert!(rel(&r.value, &expected) < 1e-48);
        assert_eq!(r.terms_used, 1);
    }

    #[test]
    fn order_cap_and_non_finite() {
        let c = ctx();
        let params = p(1.0, 1.0, 1.0);
        assert!(matches!(
            leroy_derivative(&params, -1.0, 31, &c),
            Err(Error::OrderCap { order: 31, cap: 30 })
        ));
        assert!(matches!(leroy_eval(&params, f64::NAN, &c), Err(Error::Domain(_))));
    }

    #[test]
    fn large_negative_argument_escalates() {
        let c = ctx();
        let r = leroy_eval(&p(1.0, 1.0, 1.0), -60.0, &c).unwrap();
        let expected = Float::with_val(600, -60).exp();
        let err = Float::with_val(600, &r.value - &expected).abs();
        assert!(err <= r.tail_bound);
        assert!(r.tail_bound < 1e-45);
        assert!(rel(&r.value, &expected) < 1e-18);
        assert!(r.digits_used > c.decimal_digits());
    }

    #[test]
    fn terms_grow_with_modulus() {
        let c = ctx();
        let params = p(0.5, 0.8, 1.5);
        let mut last = 0;
        for z in [0.1, 1.0, 5.0, 20.0] {
            let r = leroy_eval(&params, -z, &c).unwrap();
            assert!(r.terms_used > last);
            last = r.terms_used;
        }
    }

    #[test]
    fn moments_trivial() {
        let c = ctx();
        assert!((moment(&p(1.0, 1.0, 1.0), 5, &c).value.to_f64() - 1.0).abs() < 1e-45);
        let m0 = moment(&p(0.3, 2.2, 1.7), 0, &c);
        assert!(m0.ln_value.to_f64().abs() < 1e-45);
    }

    #[test]
    fn mellin_matches_moment_at_integers() {
        let c = ctx();
        let params = p(0.5, 0.75, 2.0);
        for n in 0..6u64 {
            let a = mellin_closed_form(&params, n as f64, &c).unwrap();
            let b = moment(&params, n, &c).value;
            assert!(rel(&a, &b) < 1e-47);
        }
        assert!((mellin_closed_form(&p(1.0, 1.0, 1.0), 2.5, &c).unwrap().to_f64() - 1.0).abs() < 1e-45);
    }

    #[test]
    fn mellin_domain() {
        let c = ctx();
        let params = p(0.5, 0.75, 2.0);
        assert!(mellin_closed_form(&params, -1.0, &c).is_err());
        assert!(mellin_closed_form(&p(2.0, 0.5, 1.0), -0.5, &c).is_err());
    }

    #[test]
    fn mellin_vanishes_at_minus_one_when_beta_equals_alpha() {
        let c = ctx();
        let params = p(0.5, 0.5, 2.0);
        let mut last = f64::INFINITY;
        for k in 2..=6 {
            let s = -1.0 + 10f64.powi(-k);
            let v = mellin_closed_form(&params, s, &c).unwrap().to_f64();
            assert!(v > 0.0 && v < last);
            last = v;
        }
        assert!(last < 1e-5);
    }

    #[test]
    fn mittag_leffler_cos() {
        let c = ctx();
        let r = mittag_leffler(2.0, 1.0, -1.0, &c).unwrap();
        let one = Float::with_val(400, 1u32);
        assert!(rel(&r.value, &Float::with_val(400, one.cos_ref())) < 1e-48);
    }

    #[test]
    fn plan_terminates_for_astronomical_peaks() {
        // Peak index well past 2^53 for αγ = 0.05.
        let c = ctx();
        let params = p(0.1, 0.1, 0.5);
        for x in [6.3, 10.0, 100.0] {
            let plan = plan(&params, -x, 12, &c);
            assert!(plan.estimated_terms as f64 > 1e15);
        }
        assert!(leroy_eval(&params, -100.0, &c).is_err());
    }
}

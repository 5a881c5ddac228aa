//! The criterion function `g(z) = z + γ(z^(β-α) - z^β)`, the density
//! `φ(x) = e^-x/(1-e^-x) - γ e^(-βx/α)/(1-e^(-x/α))`, sign analysis of
//! `g - 1` on `(0, 1)`, and quadrature of the Lévy-Khintchine exponent.
//!
//! Under `z = e^(-x/α)` one has `φ(x) = z^α (1 - g(z)) / ((1 - z^α)(1 - z))`,
//! so `φ ≥ 0` on `(0, ∞)` exactly when `g ≤ 1` on `(0, 1)`.
//!
//! The analysis works in `u = -ln z` with `h(u) = 1 - g(e^-u)`:
//!
//! ```text
//! h(u)  = (1 - e^-u) - γ e^(-(β-α)u) (1 - e^(-αu))
//! h'(u) = e^-u + γ(β-α) e^(-(β-α)u) - γβ e^(-βu)
//! ```

use rug::Float;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gamma::digamma_unchecked;
use crate::params::{boundary_tolerance, Params};
use crate::precision::PrecisionContext;
use crate::quadrature::{integrate_pieces, Tolerance};
use crate::roots::brent;

/// Shape of `g - 1` read with `z` increasing (equivalently, of `φ` read
/// with `x` increasing).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Pattern {
    NonPositive,
    NegThenPos,
    NegPosNeg,
    Other,
}

impl Pattern {
    pub fn as_str(self) -> &'static str {
        match self {
            Pattern::NonPositive => "NonPositive",
            Pattern::NegThenPos => "NegThenPos",
            Pattern::NegPosNeg => "NegPosNeg",
            Pattern::Other => "Other",
        }
    }
}

/// Where `sup g` is attained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Argmax {
    Interior(f64),
    /// `z -> 0+`
    LowerEnd,
    /// `z -> 1-`, where `g -> 1`
    UpperEnd,
}

/// `lim φ(x)` as `x -> 0+`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ZeroLimit {
    Finite(f64),
    PlusInfinity,
    MinusInfinity,
}

impl std::fmt::Display for ZeroLimit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ZeroLimit::Finite(v) => write!(f, "{}", crate::precision::format_sig_f64(*v, 17)),
            ZeroLimit::PlusInfinity => f.write_str("+inf"),
            ZeroLimit::MinusInfinity => f.write_str("-inf"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CriterionReport {
    pub holds: bool,
    /// Within the tolerance band of the boundary: an interior maximum of `g`
    /// touching 1, or `αγ = 1` with `β = (1+α)/2`.
    pub marginal: bool,
    /// `+inf` when `β < α`.
    pub sup_g: Float,
    pub sup_excess: Float,
    pub argmax: Argmax,
    /// Interior critical points of `g`, ascending in `z`.
    pub critical_points: Vec<f64>,
    /// Points where `g - 1` changes sign, ascending in `z`.
    pub sign_changes: Vec<f64>,
    pub pattern: Pattern,
    pub zero_limit_phi: ZeroLimit,
    /// Tolerance used for `holds`.
    pub tolerance: f64,
}

/// `g(z)` for `0 < z < 1`.
pub fn g_eval(params: &Params, z: f64, ctx: &PrecisionContext) -> Result<Float> {
    if !(z > 0.0 && z < 1.0) {
        return Err(Error::Domain(format!("g is defined on (0, 1), got z = {z}")));
    }
    let bits = ctx.bits() + 16;
    let zf = Float::with_val(bits, z);
    let ln_z = Float::with_val(bits, zf.ln_ref());
    let a = Float::with_val(bits, &ln_z * (params.beta() - params.alpha())).exp();
    let b = Float::with_val(bits, &ln_z * params.beta()).exp();
    let mut g = Float::with_val(bits, &a - &b) * params.gamma();
    g += &zf;
    Ok(Float::with_val(ctx.bits(), g))
}

/// `φ(x)` for `x > 0`, evaluated with enough guard bits to absorb the
/// `1/x` cancellation near the origin.
pub fn phi_eval(params: &Params, x: f64, ctx: &PrecisionContext) -> Result<Float> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::Domain(format!("phi is defined for finite x > 0, got {x}")));
    }
    let guard = 32 + if x < 1.0 { (-x.log2()).ceil() as u32 } else { 0 };
    let bits = ctx.bits() + guard;
    let (alpha, beta, gamma) = (params.alpha(), params.beta(), params.gamma());
    let xf = Float::with_val(bits, x);
    let first = Float::with_val(bits, xf.exp_m1_ref()).recip();
    let y = Float::with_val(bits, &xf / alpha);
    let num = Float::with_val(bits, -Float::with_val(bits, &y * beta)).exp();
    let den = -Float::with_val(bits, Float::with_val(bits, -&y).exp_m1_ref());
    let second = Float::with_val(bits, &num / &den) * gamma;
    Ok(Float::with_val(ctx.bits(), first - second))
}

/// `φ(x)` in `f64`; Laurent expansion near the origin, `expm1` forms
/// elsewhere. Returns NaN for `x <= 0`.
pub fn phi_eval_f64(params: &Params, x: f64) -> f64 {
    if !(x > 0.0) {
        return f64::NAN;
    }
    let (alpha, beta, gamma) = (params.alpha(), params.beta(), params.gamma());
    if x / alpha < 0.1 && x < 0.5 {
        // φ(x) = Σ x^(n-1)/n! [B_n(0) - γ α^(1-n) B_n(1-β)]
        let t = 1.0 - beta;
        let mut sum = 0.0;
        let mut xp = 1.0 / x;
        let mut fact = 1.0;
        let mut ap = alpha;
        for n in 0..=16usize {
            if n > 0 {
                fact *= n as f64;
                xp *= x;
                ap /= alpha;
            }
            let c = BERNOULLI[n] - gamma * ap * bernoulli_poly(n, t);
            sum += c * xp / fact;
        }
        return sum;
    }
    let first = 1.0 / x.exp_m1();
    let y = x / alpha;
    let second = gamma * (-beta * y).exp() / -(-y).exp_m1();
    first - second
}

const BERNOULLI: [f64; 17] = [
    1.0,
    -0.5,
    1.0 / 6.0,
    0.0,
    -1.0 / 30.0,
    0.0,
    1.0 / 42.0,
    0.0,
    -1.0 / 30.0,
    0.0,
    5.0 / 66.0,
    0.0,
    -691.0 / 2730.0,
    0.0,
    7.0 / 6.0,
    0.0,
    -3617.0 / 510.0,
];

fn bernoulli_poly(n: usize, t: f64) -> f64 {
    let mut binom = 1.0;
    let mut sum = 0.0;
    for (k, b) in BERNOULLI.iter().enumerate().take(n + 1) {
        if k > 0 {
            binom *= (n + 1 - k) as f64 / k as f64;
        }
        sum += binom * b * t.powi((n - k) as i32);
    }
    sum
}

/// Closed-form `lim φ(x)` at `0+`. The leading term is `(1 - αγ)/x`; on the
/// critical line (within tolerance) the limit is `γβ - (1+γ)/2`, which
/// equals `-εγ` when `αγ = 1`.
pub fn zero_limit(params: &Params, ctx: &PrecisionContext) -> ZeroLimit {
    let lead = 1.0 - params.alpha() * params.gamma();
    if params.on_critical_line(ctx) {
        ZeroLimit::Finite(params.gamma() * params.beta() - 0.5 * (1.0 + params.gamma()))
    } else if lead > 0.0 {
        ZeroLimit::PlusInfinity
    } else {
        ZeroLimit::MinusInfinity
    }
}

/// Samples of `φ(2^-k)` and their Richardson extrapolation to `x = 0`.
#[derive(Debug, Clone)]
pub struct DyadicLimit {
    pub samples: Vec<(u32, f64)>,
    pub last: f64,
    pub extrapolated: f64,
}

/// `φ` along `x = 2^-k` for `k` in `ks`. The extrapolation eliminates the
/// `O(x)` and `O(x^2)` terms from the last three samples.
pub fn dyadic_zero_limit(
    params: &Params,
    ks: std::ops::RangeInclusive<u32>,
    ctx: &PrecisionContext,
) -> Result<DyadicLimit> {
    let mut samples = Vec::new();
    for k in ks {
        let x = (-(k as f64)).exp2();
        samples.push((k, phi_eval(params, x, ctx)?.to_f64()));
    }
    if samples.is_empty() {
        return Err(Error::Precondition("empty range of dyadic exponents".into()));
    }
    let n = samples.len();
    let last = samples[n - 1].1;
    let extrapolated = if n >= 3 {
        let (a, b, c) = (samples[n - 3].1, samples[n - 2].1, samples[n - 1].1);
        let r1 = 2.0 * c - b;
        let r0 = 2.0 * b - a;
        (4.0 * r1 - r0) / 3.0
    } else if n == 2 {
        2.0 * last - samples[0].1
    } else {
        last
    };
    Ok(DyadicLimit {
        samples,
        last,
        extrapolated,
    })
}

/// Taylor data of `h'(u) = Σ c_n u^n / n!` near `u = 0`, with the first two
/// coefficients snapped to zero on the critical line / its boundary point.
struct Local {
    alpha: f64,
    beta: f64,
    gamma: f64,
    coef: [f64; 26],
}

impl Local {
    fn new(params: &Params, ctx: &PrecisionContext) -> Self {
        let (alpha, beta, gamma) = (params.alpha(), params.beta(), params.gamma());
        let mut coef = [0.0; 26];
        let (d, b) = (beta - alpha, beta);
        let (mut dp, mut bp) = (d, b);
        for (n, c) in coef.iter_mut().enumerate() {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            *c = sign * (1.0 + gamma * (dp - bp));
            dp *= d;
            bp *= b;
        }
        let tol = boundary_tolerance(ctx);
        if params.on_critical_line(ctx) {
            coef[0] = 0.0;
            if params.epsilon_gap().abs() <= tol {
                coef[1] = 0.0;
            }
        }
        Self {
            alpha,
            beta,
            gamma,
            coef,
        }
    }

    fn taylor_range(&self) -> f64 {
        0.1 / self.beta.max(1.0).max((self.beta - self.alpha).abs())
    }

    fn dh(&self, u: f64) -> f64 {
        let (a, b, g) = (self.alpha, self.beta, self.gamma);
        if u < self.taylor_range() {
            let mut sum = 0.0;
            let mut p = 1.0;
            for (n, c) in self.coef.iter().enumerate() {
                if n > 0 {
                    p *= u / n as f64;
                }
                sum += c * p;
            }
            sum
        } else if u < 1.0 {
            (1.0 - g * a) + (-u).exp_m1() + g * (b - a) * (-(b - a) * u).exp_m1() - g * b * (-b * u).exp_m1()
        } else {
            (-u).exp() + g * (b - a) * (-(b - a) * u).exp() - g * b * (-b * u).exp()
        }
    }

    fn h(&self, u: f64) -> f64 {
        let (a, b, g) = (self.alpha, self.beta, self.gamma);
        if u < self.taylor_range() {
            let mut sum = 0.0;
            let mut p = 1.0;
            for (n, c) in self.coef.iter().enumerate() {
                p *= u / (n + 1) as f64;
                sum += c * p;
            }
            sum
        } else if u < 1.0 {
            -(-u).exp_m1() + g * (-(b - a) * u).exp() * (-a * u).exp_m1()
        } else {
            (1.0 - (-u).exp()) - g * ((-(b - a) * u).exp() - (-b * u).exp())
        }
    }

    /// Sign of `h` just to the right of 0: that of the first non-zero
    /// Taylor coefficient.
    fn sign_at_zero(&self) -> f64 {
        self.coef.iter().find(|c| **c != 0.0).map_or(0.0, |c| c.signum())
    }
}

/// `h(u)`, `h'(u)`, `h''(u)` in multiple precision.
fn h_mp(params: &Params, u: f64, bits: u32) -> (Float, Float, Float) {
    let guard = 32 + if u < 1.0 { 2 * (-u.log2()).ceil().max(0.0) as u32 } else { 0 };
    let wp = bits + guard;
    let (a, b, g) = (params.alpha(), params.beta(), params.gamma());
    let uf = Float::with_val(wp, u);
    let e1 = Float::with_val(wp, -&uf).exp();
    let ed = Float::with_val(wp, Float::with_val(wp, &uf * -(b - a))).exp();
    let eb = Float::with_val(wp, Float::with_val(wp, &uf * -b)).exp();
    let em1 = Float::with_val(wp, -&uf).exp_m1();
    let ema = Float::with_val(wp, Float::with_val(wp, &uf * -a).exp_m1_ref());
    // h = -expm1(-u) + γ e^(-(β-α)u) expm1(-αu)
    let h = Float::with_val(wp, -&em1) + Float::with_val(wp, &ed * &ema) * g;
    let dh = Float::with_val(wp, &e1 + Float::with_val(wp, &ed * (g * (b - a))))
        - Float::with_val(wp, &eb * (g * b));
    let d2h = Float::with_val(wp, Float::with_val(wp, &eb * (g * b * b)) - &e1)
        - Float::with_val(wp, &ed * (g * (b - a) * (b - a)));
    (h, dh, d2h)
}

const SCAN_POINTS: usize = 10_000;
const SCAN_LOWER: f64 = 1.0e-10;

/// Critical points, supremum and sign changes of `g` on `(0, 1)`.
pub fn criterion_analyze(params: &Params, ctx: &PrecisionContext) -> CriterionReport {
    let (alpha, beta, gamma) = (params.alpha(), params.beta(), params.gamma());
    let tol = boundary_tolerance(ctx);
    let bits = ctx.bits();
    let local = Local::new(params, ctx);

    let mut rate = beta.min(1.0);
    if beta != alpha {
        rate = rate.min((beta - alpha).abs());
    }
    let u_max = (60.0 / rate).clamp(60.0, 1.0e12);
    let grid: Vec<f64> = (0..SCAN_POINTS)
        .map(|j| {
            let t = j as f64 / (SCAN_POINTS - 1) as f64;
            (SCAN_LOWER.ln() + t * (u_max / SCAN_LOWER).ln()).exp()
        })
        .collect();

    // Critical points of h (ascending u), refined in f64 then polished by
    // Newton in multiple precision.
    let mut crit: Vec<(f64, Float)> = Vec::new();
    let mut prev = local.dh(grid[0]);
    for w in grid.windows(2) {
        let cur = local.dh(w[1]);
        if prev != 0.0 && cur != 0.0 && prev.signum() != cur.signum() {
            let root = brent(|u| local.dh(u), w[0], w[1], 1e-15 * w[0], 200).unwrap_or(0.5 * (w[0] + w[1]));
            let root = polish(params, root, w[0], w[1], bits);
            let (h, _, _) = h_mp(params, root, bits);
            crit.push((root, h));
        } else if cur == 0.0 {
            let (h, _, _) = h_mp(params, w[1], bits);
            crit.push((w[1], h));
        }
        prev = cur;
    }

    // Supremum of g - 1 = -h.
    let inf = Float::with_val(bits, f64::INFINITY);
    let mut excess = Float::new(bits);
    let mut argmax = Argmax::UpperEnd;
    let lower_end = if beta < alpha {
        Some(inf.clone())
    } else if beta == alpha {
        Some(Float::with_val(bits, gamma - 1.0))
    } else {
        None
    };
    for (u, h) in &crit {
        let e = Float::with_val(bits, -h);
        if e > excess {
            excess = e;
            argmax = Argmax::Interior((-u).exp());
        }
    }
    if let Some(e) = lower_end {
        if e > excess {
            excess = e;
            argmax = Argmax::LowerEnd;
        }
    }
    let holds = excess <= tol;
    let interior_touch = crit.iter().any(|(_, h)| {
        let a = Float::with_val(bits, h.abs_ref());
        a <= tol
    });
    let boundary_point = params.on_critical_line(ctx) && params.epsilon_gap().abs() <= tol;
    let marginal = interior_touch || boundary_point;
    let sup_g = Float::with_val(bits, &excess + 1u32);

    // Sign changes of h along nodes 0+, critical points, u_max.
    let sign_of = |h: &Float| -> f64 {
        if Float::with_val(bits, h.abs_ref()) <= tol {
            0.0
        } else if h.is_sign_negative() {
            -1.0
        } else {
            1.0
        }
    };
    let mut nodes: Vec<(f64, f64)> = vec![(0.0, local.sign_at_zero())];
    for (u, h) in &crit {
        nodes.push((*u, sign_of(h)));
    }
    let h_end = if beta < alpha {
        -1.0
    } else {
        let (h, _, _) = h_mp(params, u_max, bits);
        sign_of(&h)
    };
    nodes.push((u_max, h_end));

    let mut changes_u: Vec<f64> = Vec::new();
    let mut region_signs: Vec<f64> = Vec::new();
    let mut last_sign = 0.0;
    let mut last_u = 0.0;
    for &(u, s) in &nodes {
        if s == 0.0 {
            continue;
        }
        if last_sign == 0.0 {
            region_signs.push(s);
        } else if s != last_sign {
            let lo = if last_u == 0.0 { SCAN_LOWER.min(u * 0.5) } else { last_u };
            let root = brent(|v| local.h(v), lo, u, 1e-15 * lo, 200).unwrap_or(0.5 * (lo + u));
            changes_u.push(root);
            region_signs.push(s);
        }
        last_sign = s;
        last_u = u;
    }

    // Report in z ascending = u descending; signs of g - 1 = -h.
    let mut sign_changes: Vec<f64> = changes_u.iter().map(|u| (-u).exp()).collect();
    sign_changes.reverse();
    let g_signs: Vec<f64> = region_signs.iter().rev().map(|s| -s).collect();
    let pattern = classify_pattern(&g_signs, holds);
    let mut critical_points: Vec<f64> = crit.iter().map(|(u, _)| (-u).exp()).collect();
    critical_points.reverse();

    CriterionReport {
        holds,
        marginal,
        sup_g: if excess.is_infinite() { inf } else { sup_g },
        sup_excess: excess,
        argmax,
        critical_points,
        sign_changes,
        pattern,
        zero_limit_phi: zero_limit(params, ctx),
        tolerance: tol,
    }
}

fn classify_pattern(g_signs: &[f64], holds: bool) -> Pattern {
    match g_signs {
        _ if holds && g_signs.iter().all(|s| *s <= 0.0) => Pattern::NonPositive,
        [] => {
            if holds {
                Pattern::NonPositive
            } else {
                Pattern::Other
            }
        }
        [s] if *s < 0.0 => Pattern::NonPositive,
        [a, b] if *a < 0.0 && *b > 0.0 => Pattern::NegThenPos,
        [a, b, c] if *a < 0.0 && *b > 0.0 && *c < 0.0 => Pattern::NegPosNeg,
        _ => Pattern::Other,
    }
}

/// Two Newton steps on `h'` in multiple precision, kept inside `[lo, hi]`.
fn polish(params: &Params, u: f64, lo: f64, hi: f64, bits: u32) -> f64 {
    let mut u = u;
    for _ in 0..2 {
        let (_, dh, d2h) = h_mp(params, u, bits);
        if d2h.is_zero() {
            break;
        }
        let step = Float::with_val(bits, &dh / &d2h).to_f64();
        let next = u - step;
        if !(next > lo && next < hi) || next == u {
            break;
        }
        u = next;
    }
    u
}

/// Lévy-Khintchine exponent split into its parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LevyExponent {
    pub value: f64,
    pub drift: f64,
    pub integral: f64,
    /// Quadrature plus truncation estimate.
    pub error: f64,
}

/// `(ψ(1) - αγψ(β)) s + ∫_0^∞ (e^(-sx) - 1 + sx) φ(x) dx/x`.
pub fn levy_exponent_quadrature(params: &Params, s: f64, ctx: &PrecisionContext) -> Result<LevyExponent> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::Domain(format!("levy exponent needs finite s > 0, got {s}")));
    }
    let (alpha, beta, gamma) = (params.alpha(), params.beta(), params.gamma());
    let bits = ctx.bits() + 16;
    let psi1 = digamma_unchecked(&Float::with_val(bits, 1u32), bits);
    let psib = digamma_unchecked(&Float::with_val(bits, beta), bits);
    let drift_coef = Float::with_val(bits, &psi1 - Float::with_val(bits, &psib * (alpha * gamma)));
    let drift = Float::with_val(bits, &drift_coef * s).to_f64();

    let kernel = |x: f64| -> f64 {
        let sx = s * x;
        if sx < 0.1 {
            // (e^-y - 1 + y)/x = s Σ_{n≥2} (-1)^n y^(n-1) / n!,  y = sx
            let mut term = sx * s / 2.0;
            let mut sum = term;
            for n in 3..=14 {
                term *= -sx / n as f64;
                sum += term;
            }
            sum
        } else {
            ((-sx).exp_m1() + sx) / x
        }
    };
    let integrand = |x: f64| kernel(x) * phi_eval_f64(params, x);

    let rate = (beta / alpha).min(1.0);
    let x_end = 10.0 + 50.0 / rate;
    let tol = Tolerance {
        abs: 1e-12,
        rel: 1e-12,
        max_intervals: 4000,
    };
    let q = integrate_pieces(integrand, &[0.0, 1e-3, 1.0, 10.0, x_end], tol)?;
    // |φ| ≤ (1 + γ/(1 - e^(-x/α))) e^(-rate x) beyond x_end and the kernel is ≤ s.
    let tail = s * (1.0 + gamma / -(-x_end / alpha).exp_m1()) * (-rate * x_end).exp() / rate;
    Ok(LevyExponent {
        value: drift + q.value,
        drift,
        integral: q.value,
        error: q.error + tail,
    })
}

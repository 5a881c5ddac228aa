//! Hankel-determinant and log-convexity tests on the moment sequence
//! `m_n = n! (Γ(β)/Γ(β+αn))^γ`.

use rug::Float;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::Params;
use crate::precision::{digits_to_bits, PrecisionContext};
use crate::series::moment;

/// Largest order accepted by [`hankel_test`].
pub const MAX_HANKEL_ORDER: u32 = 12;

const MAX_DOUBLINGS: u32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum HankelFamily {
    /// `det (m_{i+j})`
    H0,
    /// `det (m_{i+j+1})`
    H1,
}

impl HankelFamily {
    pub fn as_str(self) -> &'static str {
        match self {
            HankelFamily::H0 => "H0",
            HankelFamily::H1 => "H1",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct HankelViolation {
    pub family: HankelFamily,
    /// Matrix size is `k + 1`.
    pub k: u32,
}

#[derive(Debug, Clone)]
pub struct HankelReport {
    pub order: u32,
    /// `det_h0[k]` is the determinant of `(m_{i+j})_{0 ≤ i,j ≤ k}`.
    pub det_h0: Vec<Float>,
    pub det_h1: Vec<Float>,
    /// Per-determinant tolerance: `10^-(digits-10)` times the Hadamard bound.
    pub tol_h0: Vec<Float>,
    pub tol_h1: Vec<Float>,
    pub all_nonnegative: bool,
    pub first_violation: Option<HankelViolation>,
    pub digits_used: u32,
}

/// Both Hankel determinant families up to size `order + 1`, at precision
/// `max(ctx, 30 + 12 order)` digits. Each run is repeated with 20 more
/// digits; disagreement doubles the precision (up to three times).
pub fn hankel_test(params: &Params, order: u32, ctx: &PrecisionContext) -> Result<HankelReport> {
    if order > MAX_HANKEL_ORDER {
        return Err(Error::OrderCap {
            order,
            cap: MAX_HANKEL_ORDER,
        });
    }
    let mut digits = ctx.decimal_digits().max(30 + 12 * order);
    for _ in 0..=MAX_DOUBLINGS {
        let first = run(params, order, digits);
        let check = run(params, order, digits + 20);
        if agree(&first, &check) {
            return Ok(first);
        }
        digits *= 2;
    }
    Err(Error::PrecisionEscalation(format!(
        "Hankel determinants of order {order} unstable up to {digits} digits"
    )))
}

fn run(params: &Params, order: u32, digits: u32) -> HankelReport {
    let ctx = PrecisionContext::new(digits).expect("digits above minimum");
    let moments: Vec<Float> = (0..=(2 * order as u64 + 1)).map(|n| moment(params, n, &ctx).value).collect();
    let bits = digits_to_bits(digits);
    let (det_h0, tol_h0) = family(&moments, order, 0, bits, digits);
    let (det_h1, tol_h1) = family(&moments, order, 1, bits, digits);
    let mut first_violation = None;
    for k in 0..=order as usize {
        for (fam, dets, tols) in [
            (HankelFamily::H0, &det_h0, &tol_h0),
            (HankelFamily::H1, &det_h1, &tol_h1),
        ] {
            if first_violation.is_none() && dets[k] < Float::with_val(bits, -&tols[k]) {
                first_violation = Some(HankelViolation { family: fam, k: k as u32 });
            }
        }
    }
    HankelReport {
        order,
        det_h0,
        det_h1,
        tol_h0,
        tol_h1,
        all_nonnegative: first_violation.is_none(),
        first_violation,
        digits_used: digits,
    }
}

fn family(moments: &[Float], order: u32, shift: usize, bits: u32, digits: u32) -> (Vec<Float>, Vec<Float>) {
    let mut dets = Vec::new();
    let mut tols = Vec::new();
    let rel = crate::precision::pow10(10 - digits as i64, bits);
    for k in 0..=order as usize {
        let m: Vec<Vec<Float>> = (0..=k)
            .map(|i| (0..=k).map(|j| moments[i + j + shift].clone()).collect())
            .collect();
        let bound = hadamard_bound(&m, bits);
        dets.push(determinant(m, bits));
        tols.push(Float::with_val(bits, &bound * &rel));
    }
    (dets, tols)
}

/// Two runs agree when every determinant matches within its tolerance and
/// they reach the same violation verdict.
fn agree(a: &HankelReport, b: &HankelReport) -> bool {
    if a.first_violation != b.first_violation {
        return false;
    }
    let close = |x: &Float, y: &Float, t: &Float| Float::with_val(x.prec(), x - y).abs() <= *t;
    a.det_h0.iter().zip(&b.det_h0).zip(&a.tol_h0).all(|((x, y), t)| close(x, y, t))
        && a.det_h1.iter().zip(&b.det_h1).zip(&a.tol_h1).all(|((x, y), t)| close(x, y, t))
}

/// `Π_i ||row_i||_2`, an upper bound on `|det|`.
pub fn hadamard_bound(m: &[Vec<Float>], bits: u32) -> Float {
    let mut prod = Float::with_val(bits, 1u32);
    for row in m {
        let mut s = Float::new(bits);
        for v in row {
            s += Float::with_val(bits, v.square_ref());
        }
        prod *= s.sqrt();
    }
    prod
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn determinant(mut m: Vec<Vec<Float>>, bits: u32) -> Float {
    let n = m.len();
    let mut det = Float::with_val(bits, 1u32);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[i][col].cmp_abs(&m[j][col]).unwrap_or(std::cmp::Ordering::Equal))
            .expect("non-empty range");
        if m[pivot][col].is_zero() {
            return Float::new(bits);
        }
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        det *= &m[col][col];
        for row in col + 1..n {
            let f = Float::with_val(bits, &m[row][col] / &m[col][col]);
            for c in col..n {
                let t = Float::with_val(bits, &f * &m[col][c]);
                m[row][c] -= t;
            }
        }
    }
    det
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogConvexity {
    pub holds: bool,
    /// First `n` with `ln m_{n-1} + ln m_{n+1} - 2 ln m_n < -10^2 eps`.
    pub first_failure: Option<u64>,
    /// Smallest second difference seen.
    pub min_second_difference: f64,
}

/// Checks `ln m_{n-1} + ln m_{n+1} - 2 ln m_n ≥ -10^2 eps` for `n = 1..=n_max`.
pub fn log_convexity_test(params: &Params, n_max: u64, ctx: &PrecisionContext) -> Result<LogConvexity> {
    if n_max < 2 {
        return Err(Error::Precondition(format!("n_max must be at least 2, got {n_max}")));
    }
    let bits = ctx.bits();
    let ln: Vec<Float> = (0..=n_max + 1).map(|n| moment(params, n, ctx).ln_value).collect();
    let tol = Float::with_val(bits, ctx.epsilon() * 100u32);
    let mut first_failure = None;
    let mut min_second = f64::INFINITY;
    for n in 1..=n_max as usize {
        let mut d = Float::with_val(bits, &ln[n - 1] + &ln[n + 1]);
        d -= Float::with_val(bits, &ln[n] * 2u32);
        min_second = min_second.min(d.to_f64());
        if first_failure.is_none() && d < Float::with_val(bits, -&tol) {
            first_failure = Some(n as u64);
        }
    }
    Ok(LogConvexity {
        holds: first_failure.is_none(),
        first_failure,
        min_second_difference: min_second,
    })
}

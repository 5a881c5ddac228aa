//! The curve `β(α) = inf{β : g ≤ 1 on (0,1)}` for fixed `γ > 1` on
//! `α ∈ (0, 1/γ)`, by bisection on the criterion predicate.

use serde::Serialize;

use crate::criterion::criterion_analyze;
use crate::error::{Error, Result};
use crate::params::Params;
use crate::precision::PrecisionContext;

/// Second differences below `-CONVEXITY_NOISE` count as convexity
/// violations; the bisection itself is only good to about this level.
pub const CONVEXITY_NOISE: f64 = 1e-12;

/// Slack in the ratio-monotonicity check.
pub const RATIO_SLACK: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryCurve {
    pub gamma: f64,
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    /// `β(α)/α` non-decreasing on the sample (up to [`RATIO_SLACK`]).
    pub ratio_monotone: bool,
    pub convexity_violations: Vec<(usize, usize, usize)>,
}

impl BoundaryCurve {
    pub fn ratios(&self) -> Vec<f64> {
        self.alphas.iter().zip(&self.betas).map(|(a, b)| b / a).collect()
    }
}

fn holds(alpha: f64, beta: f64, gamma: f64, ctx: &PrecisionContext) -> Result<bool> {
    Ok(criterion_analyze(&Params::new(alpha, beta, gamma)?, ctx).holds)
}

fn check_inputs(gamma: f64, alpha: f64) -> Result<()> {
    if !(gamma > 1.0 && gamma.is_finite()) {
        return Err(Error::Precondition(format!("gamma must exceed 1, got {gamma}")));
    }
    if !(alpha > 0.0 && alpha * gamma < 1.0) {
        return Err(Error::Precondition(format!(
            "alpha must lie in (0, 1/gamma) = (0, {}), got {alpha}",
            1.0 / gamma
        )));
    }
    Ok(())
}

/// `β(α)` by bisection on `[α, α(1+γ)/2]` down to `max(10^(-d/3), 4 ulp)`.
/// Three interior probes of the initial bracket must be consistent with a
/// single false-to-true flip of the predicate, else `NonMonotone`.
pub fn beta_of_alpha(gamma: f64, alpha: f64, ctx: &PrecisionContext) -> Result<f64> {
    check_inputs(gamma, alpha)?;
    let (mut lo, mut hi) = (alpha, 0.5 * alpha * (1.0 + gamma));
    if holds(alpha, lo, gamma, ctx)? {
        return Err(Error::Bracket(format!("criterion holds at beta = alpha = {alpha}")));
    }
    if !holds(alpha, hi, gamma, ctx)? {
        return Err(Error::Bracket(format!(
            "criterion fails at beta = alpha(1+gamma)/2 = {hi}"
        )));
    }
    let probes: Vec<(f64, bool)> = [0.25, 0.5, 0.75]
        .iter()
        .map(|t| {
            let b = lo + t * (hi - lo);
            holds(alpha, b, gamma, ctx).map(|h| (b, h))
        })
        .collect::<Result<_>>()?;
    if probes.windows(2).any(|w| w[0].1 && !w[1].1) {
        return Err(Error::NonMonotone(format!(
            "criterion in beta at alpha = {alpha}, gamma = {gamma}: probes {probes:?}"
        )));
    }
    for (b, h) in &probes {
        if *h {
            hi = hi.min(*b);
        } else {
            lo = lo.max(*b);
        }
    }
    let target = ctx.tolerance(1.0 / 3.0);
    loop {
        let width = hi - lo;
        let ulp_floor = 4.0 * f64::EPSILON * hi;
        if width <= target.max(ulp_floor) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if holds(alpha, mid, gamma, ctx)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `β(α)` on `n_points` uniform samples of `[1/(10γ), (1 - 10^-3)/γ]`.
pub fn trace_curve(gamma: f64, n_points: usize, ctx: &PrecisionContext) -> Result<BoundaryCurve> {
    if n_points < 8 {
        return Err(Error::Precondition(format!("need at least 8 points, got {n_points}")));
    }
    if !(gamma > 1.0 && gamma.is_finite()) {
        return Err(Error::Precondition(format!("gamma must exceed 1, got {gamma}")));
    }
    let (a0, a1) = (0.1 / gamma, (1.0 - 1e-3) / gamma);
    let alphas: Vec<f64> = (0..n_points)
        .map(|i| a0 + (a1 - a0) * i as f64 / (n_points - 1) as f64)
        .collect();
    let betas = alphas
        .iter()
        .map(|&a| beta_of_alpha(gamma, a, ctx))
        .collect::<Result<Vec<_>>>()?;
    let ratios: Vec<f64> = alphas.iter().zip(&betas).map(|(a, b)| b / a).collect();
    let ratio_monotone = ratios.windows(2).all(|w| w[1] >= w[0] - RATIO_SLACK);
    let convexity_violations = (1..n_points - 1)
        .filter(|&i| betas[i - 1] - 2.0 * betas[i] + betas[i + 1] < -CONVEXITY_NOISE)
        .map(|i| (i - 1, i, i + 1))
        .collect();
    Ok(BoundaryCurve {
        gamma,
        alphas,
        betas,
        ratio_monotone,
        convexity_violations,
    })
}

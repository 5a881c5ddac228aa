use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::precision::PrecisionContext;

/// The triple `(α, β, γ)` of `F^(γ)_{α,β}(z) = Σ z^n / Γ(β + αn)^γ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    alpha: f64,
    beta: f64,
    gamma: f64,
}

impl Params {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        for (name, v) in [("alpha", alpha), ("beta", beta), ("gamma", gamma)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Domain(format!("{name} must be finite and positive, got {v}")));
            }
        }
        Ok(Self { alpha, beta, gamma })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `αγ = 1` up to `max(10^(-digits/2), 8 ulp)` relative.
    pub fn on_critical_line(&self, ctx: &PrecisionContext) -> bool {
        (self.alpha * self.gamma - 1.0).abs() <= boundary_tolerance(ctx)
    }

    /// `ε = (1 + α)/2 - β`.
    pub fn epsilon_gap(&self) -> f64 {
        (1.0 + self.alpha) / 2.0 - self.beta
    }
}

impl std::fmt::Display for Params {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(alpha={}, beta={}, gamma={})", self.alpha, self.beta, self.gamma)
    }
}

/// Relative tolerance for parameter-space boundary comparisons. Inputs are
/// `f64`, so the band never shrinks below a few ulps.
pub(crate) fn boundary_tolerance(ctx: &PrecisionContext) -> f64 {
    ctx.tolerance(0.5).max(8.0 * f64::EPSILON)
}

/// `a >= b` up to [`boundary_tolerance`].
pub(crate) fn approx_ge(a: f64, b: f64, ctx: &PrecisionContext) -> bool {
    a >= b - boundary_tolerance(ctx) * a.abs().max(b.abs())
}

/// `a <= b` up to [`boundary_tolerance`].
pub(crate) fn approx_le(a: f64, b: f64, ctx: &PrecisionContext) -> bool {
    approx_ge(b, a, ctx)
}

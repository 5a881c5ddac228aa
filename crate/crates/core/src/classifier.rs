//! Complete-monotonicity verdicts for `x ↦ F^(γ)_{α,β}(-x)`, the Γ-ratio
//! characterization for `V(x) = θ^-x Γ(Ax+a)^α' / Γ(Bx+b)^β'`, the digamma
//! Bernstein condition, and a numerical derivative-sign spot test.

use rug::Float;
use serde::Serialize;

use crate::contour;
use crate::criterion::{criterion_analyze, CriterionReport};
use crate::error::{Error, Result};
use crate::gamma::ln_gamma_unchecked;
use crate::params::{approx_ge, approx_le, Params};
use crate::precision::PrecisionContext;
use crate::series::{LeroySeries, MAX_DERIVATIVE_ORDER};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CmStatus {
    CM,
    NotCM,
    CMBySufficiency,
    OpenRegion,
}

impl CmStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            CmStatus::CM => "CM",
            CmStatus::NotCM => "NotCM",
            CmStatus::CMBySufficiency => "CMBySufficiency",
            CmStatus::OpenRegion => "OpenRegion",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Clause {
    TheoremA,
    #[serde(rename = "TheoremB_suff")]
    TheoremBSuff,
    #[serde(rename = "TheoremB_nec")]
    TheoremBNec,
    TheoremC,
    CriterionSufficient,
    StirlingDegenerate,
}

impl Clause {
    pub fn as_str(self) -> &'static str {
        match self {
            Clause::TheoremA => "TheoremA",
            Clause::TheoremBSuff => "TheoremB_suff",
            Clause::TheoremBNec => "TheoremB_nec",
            Clause::TheoremC => "TheoremC",
            Clause::CriterionSufficient => "CriterionSufficient",
            Clause::StirlingDegenerate => "StirlingDegenerate",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CmVerdict {
    pub status: CmStatus,
    pub clause: Clause,
    pub detail: String,
}

impl CmVerdict {
    fn new(status: CmStatus, clause: Clause, detail: impl Into<String>) -> Self {
        Self {
            status,
            clause,
            detail: detail.into(),
        }
    }

    /// CM, either by characterization or by the sufficient criterion.
    pub fn is_cm(&self) -> bool {
        matches!(self.status, CmStatus::CM | CmStatus::CMBySufficiency)
    }
}

/// Exact decision tree, with the criterion as tie-breaker in the
/// undecided strip `γ > 1, αγ < 1, α < β < α(1+γ)/2`.
pub fn classify(params: &Params, ctx: &PrecisionContext) -> CmVerdict {
    classify_with_report(params, ctx).0
}

/// As [`classify`], also returning the criterion report when it was run.
pub fn classify_with_report(params: &Params, ctx: &PrecisionContext) -> (CmVerdict, Option<CriterionReport>) {
    use CmStatus::*;
    let (alpha, beta, gamma) = (params.alpha(), params.beta(), params.gamma());
    let ag = alpha * gamma;
    let on_line = params.on_critical_line(ctx);
    let above_line = !on_line && ag > 1.0;

    if gamma <= 1.0 {
        return if !above_line && approx_ge(beta, alpha, ctx) {
            (CmVerdict::new(CM, Clause::TheoremA, "gamma <= 1, alpha*gamma <= 1, beta >= alpha"), None)
        } else if above_line {
            (CmVerdict::new(NotCM, Clause::TheoremA, "gamma <= 1, alpha*gamma > 1"), None)
        } else {
            (CmVerdict::new(NotCM, Clause::TheoremA, "gamma <= 1, beta < alpha"), None)
        };
    }
    if above_line {
        return (
            CmVerdict::new(
                NotCM,
                Clause::StirlingDegenerate,
                "gamma > 1, alpha*gamma > 1: E[X^n]^(1/n) -> 0",
            ),
            None,
        );
    }
    if on_line {
        let threshold = 0.5 * (1.0 + alpha);
        return if approx_ge(beta, threshold, ctx) {
            (CmVerdict::new(CM, Clause::TheoremC, "alpha*gamma = 1, beta >= (1+alpha)/2"), None)
        } else {
            (CmVerdict::new(NotCM, Clause::TheoremC, "alpha*gamma = 1, beta < (1+alpha)/2"), None)
        };
    }
    if approx_le(beta, alpha, ctx) {
        return (CmVerdict::new(NotCM, Clause::TheoremBNec, "gamma > 1, beta <= alpha"), None);
    }
    if approx_ge(beta, 0.5 * alpha * (1.0 + gamma), ctx) {
        return (
            CmVerdict::new(CM, Clause::TheoremBSuff, "alpha*gamma < 1, beta >= alpha(1+gamma)/2"),
            None,
        );
    }
    let report = criterion_analyze(params, ctx);
    let verdict = if report.holds {
        CmVerdict::new(CMBySufficiency, Clause::CriterionSufficient, "g(z) <= 1 on (0,1)")
    } else {
        CmVerdict::new(
            OpenRegion,
            Clause::CriterionSufficient,
            "criterion fails; conjectured not CM",
        )
    };
    (verdict, Some(report))
}

/// Parameters of `V(x) = θ^-x Γ(Ax+a)^α' / Γ(Bx+b)^β'`, all positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
#[allow(non_snake_case)]
pub struct GammaRatioParams {
    pub A: f64,
    pub a: f64,
    pub B: f64,
    pub b: f64,
    pub theta: f64,
    pub alpha_exp: f64,
    pub beta_exp: f64,
}

impl GammaRatioParams {
    #[allow(non_snake_case, clippy::too_many_arguments)]
    pub fn new(A: f64, a: f64, B: f64, b: f64, theta: f64, alpha_exp: f64, beta_exp: f64) -> Result<Self> {
        let p = Self {
            A,
            a,
            B,
            b,
            theta,
            alpha_exp,
            beta_exp,
        };
        for (name, v) in p.named() {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Domain(format!("{name} must be finite and positive, got {v}")));
            }
        }
        Ok(p)
    }

    fn named(&self) -> [(&'static str, f64); 7] {
        [
            ("A", self.A),
            ("a", self.a),
            ("B", self.B),
            ("b", self.b),
            ("theta", self.theta),
            ("alpha_exp", self.alpha_exp),
            ("beta_exp", self.beta_exp),
        ]
    }

    /// `ln V(x)` for `x > -min(a/A, b/B)`.
    pub fn ln_value(&self, x: &Float, bits: u32) -> Float {
        let wp = bits + 32;
        let ax = Float::with_val(wp, x * self.A) + self.a;
        let bx = Float::with_val(wp, x * self.B) + self.b;
        let mut v = ln_gamma_unchecked(&ax, wp) * self.alpha_exp;
        v -= ln_gamma_unchecked(&bx, wp) * self.beta_exp;
        v -= Float::with_val(wp, x * Float::with_val(wp, self.theta).ln());
        Float::with_val(bits, v)
    }
}

/// The four conditions and their conjunction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GammaRatioCheck {
    pub holds: bool,
    /// `α'A = β'B`
    pub balance: bool,
    /// `Ab ≥ Ba`
    pub shift: bool,
    /// `B^(Bβ') θ ≥ A^(Aα')`
    pub scale: bool,
    /// `β'(2b - 1) ≥ α'(2a - 1)`
    pub half_shift: bool,
}

const RATIO_TOL: f64 = 1e-12;

fn ge_rel(lhs: f64, rhs: f64) -> bool {
    lhs >= rhs - RATIO_TOL * lhs.abs().max(rhs.abs()).max(1.0)
}

pub fn gamma_ratio_cm_check(p: &GammaRatioParams) -> GammaRatioCheck {
    let balance = {
        let (l, r) = (p.alpha_exp * p.A, p.beta_exp * p.B);
        (l - r).abs() <= RATIO_TOL * l.abs().max(r.abs())
    };
    let shift = ge_rel(p.A * p.b, p.B * p.a);
    // In logs: Bβ' ln B + ln θ ≥ Aα' ln A.
    let scale = ge_rel(p.B * p.beta_exp * p.B.ln() + p.theta.ln(), p.A * p.alpha_exp * p.A.ln());
    let half_shift = ge_rel(p.beta_exp * (2.0 * p.b - 1.0), p.alpha_exp * (2.0 * p.a - 1.0));
    GammaRatioCheck {
        holds: balance && shift && scale && half_shift,
        balance,
        shift,
        scale,
        half_shift,
    }
}

/// Bernstein property of `ψ(Ax+a) - ψ(Bx+b)` on `(0, ∞)`:
/// `a ≥ b`, `A ≥ B` and `2(Ab - Ba) ≥ A - B`.
#[allow(non_snake_case)]
pub fn digamma_bernstein_check(A: f64, a: f64, B: f64, b: f64) -> Result<bool> {
    for (name, v) in [("A", A), ("a", a), ("B", B), ("b", b)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::Domain(format!("{name} must be finite and positive, got {v}")));
        }
    }
    Ok(a >= b && A >= B && 2.0 * (A * b - B * a) >= A - B)
}

/// How a spot-test value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SpotRoute {
    Series,
    Contour,
}

/// A point where `F^(k)(-x) = (-1)^k d^k/dx^k F(-x)` is negative beyond
/// tolerance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub order: u32,
    pub x: f64,
    pub value: f64,
    pub tolerance: f64,
    pub route: SpotRoute,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpotReport {
    pub passed: bool,
    pub witness: Option<Witness>,
    pub series_points: usize,
    pub contour_points: usize,
    /// Points neither route could afford.
    pub skipped: usize,
}

/// Largest extra cancellation the spot test pays for on the series route
/// before switching to the contour integral.
pub const SPOT_SERIES_MAX_EXTRA_DIGITS: u32 = 150;
const SPOT_SERIES_MAX_TERMS: u64 = 50_000;
/// Term budget when the contour route is available instead; every term
/// costs one high-precision ln Γ.
const SPOT_SERIES_MAX_TERMS_WITH_CONTOUR: u64 = 2_000;

/// Checks `F^(k)(-x) ≥ -10^3 eps max(1, |F(-x)|)` for `k ≤ max_order`
/// and `x` in `grid`. Stops at the first violation. A pass is evidence, a
/// failure is a refutation of complete monotonicity.
pub fn cm_spot_test(params: &Params, max_order: u32, grid: &[f64], ctx: &PrecisionContext) -> Result<SpotReport> {
    if max_order > MAX_DERIVATIVE_ORDER {
        return Err(Error::OrderCap {
            order: max_order,
            cap: MAX_DERIVATIVE_ORDER,
        });
    }
    if let Some(x) = grid.iter().find(|x| !(**x > 0.0 && x.is_finite())) {
        return Err(Error::Domain(format!("spot-test grid needs finite x > 0, got {x}")));
    }
    let mut series = LeroySeries::new(*params, *ctx);
    let term_budget = if contour::applicable(params) {
        SPOT_SERIES_MAX_TERMS_WITH_CONTOUR
    } else {
        SPOT_SERIES_MAX_TERMS
    };
    let eps = Float::with_val(64, ctx.epsilon()).to_f64();
    let d = ctx.decimal_digits();
    let mut report = SpotReport {
        passed: true,
        witness: None,
        series_points: 0,
        contour_points: 0,
        skipped: 0,
    };
    for &x in grid {
        let mut scale = None;
        for k in 0..=max_order {
            let plan = series.plan(-x, k);
            let affordable = plan.digits.saturating_sub(d) <= SPOT_SERIES_MAX_EXTRA_DIGITS
                && plan.estimated_terms <= term_budget;
            let (value, err, route) = if affordable {
                // (-1)^k d^k/dx^k F(-x) = F^(k)(-x)
                let r = series.derivative(-x, k)?;
                report.series_points += 1;
                (r.value.to_f64(), r.tail_bound.to_f64(), SpotRoute::Series)
            } else if contour::applicable(params) {
                match contour::signed_derivative(params, x, k) {
                    Ok(c) => {
                        report.contour_points += 1;
                        (c.value, c.error, SpotRoute::Contour)
                    }
                    Err(e) if e.is_numerical() => {
                        report.skipped += 1;
                        continue;
                    }
                    Err(e) => return Err(e),
                }
            } else {
                report.skipped += 1;
                continue;
            };
            let s = *scale.get_or_insert_with(|| value.abs().max(1.0));
            let base = 1.0e3 * eps * s.max(1.0);
            let tolerance = match route {
                SpotRoute::Series => base + err,
                SpotRoute::Contour => base + 10.0 * err,
            };
            if value < -tolerance {
                report.passed = false;
                report.witness = Some(Witness {
                    order: k,
                    x,
                    value,
                    tolerance,
                    route,
                });
                return Ok(report);
            }
        }
    }
    Ok(report)
}

/// `n` points log-spaced on `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|j| {
                if j == n - 1 {
                    hi
                } else {
                    (lo.ln() + (hi / lo).ln() * j as f64 / (n - 1) as f64).exp()
                }
            })
            .collect(),
    }
}

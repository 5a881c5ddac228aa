//! Evaluation and complete-monotonicity analysis of the Le Roy-type
//! Mittag-Leffler function
//!
//! ```text
//! F^(γ)_{α,β}(z) = Σ_{n≥0} z^n / Γ(β + αn)^γ,    α, β, γ > 0.
//! ```
//!
//! The crate is organised around the question of when `x ↦ F(-x)` is
//! completely monotone on `(0, ∞)`:
//!
//! * [`gamma`]: extended-precision `ln Γ`, digamma and Stirling asymptotics;
//! * [`series`]: the series itself, its derivatives, moments and the Mellin
//!   transform of the underlying random variable;
//! * [`contour`]: a Mellin-Barnes route for large arguments where direct
//!   summation is hopeless;
//! * [`criterion`]: the function `g(z) = z + γ(z^(β-α) - z^β)`, the Lévy
//!   density `φ` and the Lévy-Khintchine exponent;
//! * [`classifier`]: the decision procedure and numerical CM spot tests;
//! * [`hankel`]: the Stieltjes moment-problem oracle;
//! * [`boundary`]: the boundary curve `β(α)` for fixed `γ > 1`;
//! * [`cli`]: the `leroy` command-line front end.

pub mod boundary;
pub mod classifier;
pub mod cli;
pub mod contour;
pub mod criterion;
pub mod error;
pub mod gamma;
pub mod hankel;
pub mod params;
pub mod precision;
pub mod quadrature;
pub mod roots;
pub mod series;

pub use error::{Error, Result};
pub use params::Params;
pub use precision::PrecisionContext;
pub use rug;

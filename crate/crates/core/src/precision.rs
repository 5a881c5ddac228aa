//! Working-precision carrier shared by every extended-precision kernel.

use rug::Float;

use crate::error::{Error, Result};

const LOG2_10: f64 = std::f64::consts::LOG2_10;

/// Guard bits carried on top of the nominal decimal precision.
const GUARD_BITS: u32 = 16;

/// Decimal working precision. Immutable once built and passed explicitly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrecisionContext {
    decimal_digits: u32,
}

impl PrecisionContext {
    pub const DEFAULT_DIGITS: u32 = 50;
    pub const MIN_DIGITS: u32 = 16;

    pub fn new(decimal_digits: u32) -> Result<Self> {
        if decimal_digits < Self::MIN_DIGITS {
            return Err(Error::Domain(format!(
                "precision must be at least {} decimal digits, got {decimal_digits}",
                Self::MIN_DIGITS
            )));
        }
        Ok(Self { decimal_digits })
    }

    pub fn decimal_digits(&self) -> u32 {
        self.decimal_digits
    }

    /// Binary precision used for `rug::Float` values at this context.
    pub fn bits(&self) -> u32 {
        digits_to_bits(self.decimal_digits)
    }

    /// Unit roundoff `10^(1 - digits)`.
    pub fn epsilon(&self) -> Float {
        pow10(1 - self.decimal_digits as i64, self.bits())
    }

    /// `log10` of [`epsilon`](Self::epsilon).
    pub fn log10_epsilon(&self) -> f64 {
        1.0 - self.decimal_digits as f64
    }

    /// `10^(-digits * fraction)` as an `f64`; underflows to zero for very
    /// high precision.
    pub fn tolerance(&self, fraction: f64) -> f64 {
        10f64.powf(-(self.decimal_digits as f64) * fraction)
    }

    /// Same context with `extra` more digits.
    pub fn raised(&self, extra: u32) -> Self {
        Self {
            decimal_digits: self.decimal_digits + extra,
        }
    }

    /// Context with at least `digits` digits.
    pub fn at_least(&self, digits: u32) -> Self {
        Self {
            decimal_digits: self.decimal_digits.max(digits),
        }
    }
}

impl Default for PrecisionContext {
    fn default() -> Self {
        Self {
            decimal_digits: Self::DEFAULT_DIGITS,
        }
    }
}

pub(crate) fn digits_to_bits(digits: u32) -> u32 {
    (digits as f64 * LOG2_10).ceil() as u32 + GUARD_BITS
}

/// `10^e` rounded to `bits`.
pub(crate) fn pow10(e: i64, bits: u32) -> Float {
    let ten = Float::with_val(bits, 10);
    let e = i32::try_from(e).expect("decimal exponent out of range");
    Float::with_val(bits, rug::ops::Pow::pow(ten, e))
}

/// Formats `x` with `sig` significant digits in scientific notation.
pub fn format_sig(x: &Float, sig: usize) -> String {
    if x.is_zero() {
        return format!("{:.*e}", sig.saturating_sub(1), 0.0);
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x.is_sign_negative() {
            "-inf".into()
        } else {
            "inf".into()
        };
    }
    let (neg, digits, exp) = x.to_sign_string_exp(10, Some(sig.max(1)));
    let exp = exp.unwrap_or(0) - 1;
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    let (head, tail) = digits.split_at(1);
    out.push_str(head);
    if !tail.is_empty() {
        out.push('.');
        out.push_str(tail);
    }
    out.push('e');
    out.push_str(&exp.to_string());
    out
}

/// Formats an `f64` with `sig` significant digits in scientific notation.
pub fn format_sig_f64(x: f64, sig: usize) -> String {
    if !x.is_finite() {
        return format_sig(&Float::with_val(53, x), sig);
    }
    format_sig(&Float::with_val(64, x), sig.min(17))
}

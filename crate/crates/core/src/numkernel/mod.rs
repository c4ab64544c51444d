//! Extended-precision arithmetic contract and the special functions the
//! integral tower is built from.
//!
//! Every routine takes a [`PrecisionContext`]; results are MPFR floats
//! rounded at the context's working precision, so two calls with the same
//! inputs and context are bit-identical.

mod expint;
mod factorial;

pub use expint::{euler_constant, expint_ei_neg, expint_ei_neg_continued_fraction, expint_ei_neg_series};
pub use factorial::{factorial, factorial_f};

use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;

use crate::error::{Error, Result};

/// Extended-precision real. Carries its own MPFR precision; routines create
/// values at the precision of the [`PrecisionContext`] they are handed.
pub type ExtReal = Float;

const LOG2_10: f64 = std::f64::consts::LOG2_10;

/// Working decimal precision and the tolerances derived from it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrecisionContext {
    decimal_digits: u32,
    guard_digits: u32,
}

impl Default for PrecisionContext {
    fn default() -> Self {
        Self { decimal_digits: 50, guard_digits: 10 }
    }
}

impl PrecisionContext {
    pub const MIN_DIGITS: u32 = 20;

    pub fn new(decimal_digits: u32) -> Result<Self> {
        if decimal_digits < Self::MIN_DIGITS {
            return Err(Error::Precision(format!(
                "decimal_digits = {decimal_digits} is below the minimum of {}",
                Self::MIN_DIGITS
            )));
        }
        Ok(Self { decimal_digits, guard_digits: 10 })
    }

    pub fn with_guard_digits(mut self, guard_digits: u32) -> Self {
        self.guard_digits = guard_digits;
        self
    }

    /// Same target digits, `extra` more guard digits.
    pub fn widened(self, extra: u32) -> Self {
        self.with_guard_digits(self.guard_digits + extra)
    }

    pub fn decimal_digits(&self) -> u32 {
        self.decimal_digits
    }

    pub fn guard_digits(&self) -> u32 {
        self.guard_digits
    }

    /// MPFR precision in bits covering target plus guard digits.
    pub fn bits(&self) -> u32 {
        ((self.decimal_digits + self.guard_digits) as f64 * LOG2_10).ceil() as u32 + 8
    }

    /// `10^(-decimal_digits)`.
    pub fn tol_abs(&self) -> ExtReal {
        self.pow10(-(self.decimal_digits as i32))
    }

    pub fn pow10(&self, e: i32) -> ExtReal {
        let ten = Float::with_val(self.bits(), 10);
        Pow::pow(ten, e)
    }

    pub fn zero(&self) -> ExtReal {
        Float::new(self.bits())
    }

    pub fn one(&self) -> ExtReal {
        Float::with_val(self.bits(), 1)
    }

    pub fn int(&self, v: i64) -> ExtReal {
        Float::with_val(self.bits(), v)
    }

    pub fn from_f64(&self, v: f64) -> ExtReal {
        Float::with_val(self.bits(), v)
    }

    /// Re-rounds an existing value to this context's precision.
    pub fn real(&self, v: &Float) -> ExtReal {
        Float::with_val(self.bits(), v)
    }

    /// Parses a decimal literal exactly at working precision ("1.4" is not
    /// routed through f64).
    pub fn parse(&self, s: &str) -> Result<ExtReal> {
        let parsed = Float::parse(s.trim()).map_err(|e| Error::Domain(format!("cannot parse {s:?} as a real: {e}")))?;
        Ok(Float::with_val(self.bits(), parsed))
    }

    pub fn pi(&self) -> ExtReal {
        Float::with_val(self.bits(), Constant::Pi)
    }

    pub fn ln2(&self) -> ExtReal {
        Float::with_val(self.bits(), Constant::Log2)
    }
}

/// Number of leading decimal digits on which `a` and `b` agree, relative to
/// `|b|`. Capped at `cap` when they are equal.
pub fn agreeing_digits(a: &Float, b: &Float, cap: u32) -> u32 {
    let diff = Float::with_val(a.prec().max(b.prec()), a - b).abs();
    if diff.is_zero() {
        return cap;
    }
    let scale = Float::with_val(b.prec(), b.abs_ref());
    if scale.is_zero() {
        return 0;
    }
    let rel = diff / scale;
    let d = -rel.log10().to_f64();
    if d <= 0.0 {
        0
    } else {
        (d.floor() as u32).min(cap)
    }
}

/// `|a - b| / |b|` as an f64 (for reporting).
pub fn rel_deviation(a: &Float, b: &Float) -> f64 {
    let p = a.prec().max(b.prec());
    let diff = Float::with_val(p, a - b).abs();
    if b.is_zero() {
        return diff.to_f64();
    }
    (diff / Float::with_val(p, b.abs_ref())).to_f64()
}

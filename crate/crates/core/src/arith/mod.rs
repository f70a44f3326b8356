//! Exact integer primitives and certified real arithmetic.
//!
//! Everything above this module works with [`Integer`] for exact values and
//! [`CertifiedReal`] for anything irrational. Constants that appear in the
//! bounds are written as decimal literals and parsed into exact rationals, so
//! the only rounding that ever happens is the outward rounding inside
//! [`CertifiedReal`].

mod cf;
mod real;

pub use cf::{continued_fraction_of, ContinuedFraction};
pub use real::{certified_log, certified_sign, CertifiedReal, Sign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

pub type Integer = BigInt;

/// Working precision used when nothing else is requested.
pub const DEFAULT_PRECISION_BITS: u32 = 256;
/// Upper limit for automatic precision escalation.
pub const DEFAULT_PRECISION_CAP: u32 = 16_384;

/// Starting precision and escalation cap for certified decisions.
///
/// Precision is counted in fractional bits: an enclosure at `bits` has
/// endpoints that are integer multiples of `2^-bits`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrecisionPolicy {
    pub start: u32,
    pub cap: u32,
}

impl Default for PrecisionPolicy {
    fn default() -> Self {
        PrecisionPolicy {
            start: DEFAULT_PRECISION_BITS,
            cap: DEFAULT_PRECISION_CAP,
        }
    }
}

impl PrecisionPolicy {
    pub fn new(start: u32, cap: u32) -> Result<Self> {
        if start == 0 || start > cap {
            return Err(Error::domain(format!(
                "precision policy needs 0 < start <= cap, got start={start} cap={cap}"
            )));
        }
        Ok(PrecisionPolicy { start, cap })
    }

    /// Starting precision doubled; the cap is raised if it would fall below it.
    pub fn doubled(self) -> Self {
        let start = self.start.saturating_mul(2);
        PrecisionPolicy {
            start,
            cap: self.cap.max(start),
        }
    }

    /// The doubling ladder `start, 2*start, ...` up to and including `cap`.
    pub fn ladder(self) -> impl Iterator<Item = u32> {
        let cap = self.cap;
        std::iter::successors(Some(self.start), move |&b| {
            if b >= cap {
                None
            } else {
                Some(b.saturating_mul(2).min(cap))
            }
        })
    }

    /// Evaluate `attempt` on the doubling ladder until it yields a value.
    ///
    /// `attempt` returns `Ok(None)` when the enclosure at that precision was
    /// too wide to decide. Exhausting the ladder is a precision error.
    pub fn escalate<T>(
        self,
        what: &str,
        mut attempt: impl FnMut(u32) -> Result<Option<T>>,
    ) -> Result<T> {
        let mut last = self.start;
        for bits in self.ladder() {
            last = bits;
            if let Some(v) = attempt(bits)? {
                return Ok(v);
            }
        }
        Err(Error::precision(what, last))
    }
}

/// Floor of the square root.
pub fn isqrt(n: &Integer) -> Result<Integer> {
    if n.is_negative() {
        return Err(Error::domain(format!("isqrt of negative number {n}")));
    }
    Ok(n.sqrt())
}

/// `Some(r)` with `r*r == n` when `n` is a perfect square, `None` otherwise.
pub fn perfect_square_root(n: &Integer) -> Option<Integer> {
    if n.is_negative() {
        return None;
    }
    // Squares are 0, 1, 4, 9 mod 16; rejects most candidates before the root.
    let low = n.iter_u64_digits().next().unwrap_or(0) & 15;
    if !matches!(low, 0 | 1 | 4 | 9) {
        return None;
    }
    let r = n.sqrt();
    if &r * &r == *n {
        Some(r)
    } else {
        None
    }
}

/// Parses a decimal literal such as `0.4672`, `2.96e28` or `-24.34` into an
/// exact rational.
pub fn exact_decimal(lit: &str) -> BigRational {
    try_exact_decimal(lit).unwrap_or_else(|| panic!("malformed decimal constant {lit:?}"))
}

pub fn try_exact_decimal(lit: &str) -> Option<BigRational> {
    let lit = lit.trim();
    let (mantissa, exp) = match lit.find(['e', 'E']) {
        Some(i) => (&lit[..i], lit[i + 1..].parse::<i32>().ok()?),
        None => (lit, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{int_part}{frac_part}").parse().ok()?;
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut value = if scale >= 0 {
        BigRational::from_integer(digits * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(digits, num_traits::pow(ten, (-scale) as usize))
    };
    if neg && !value.is_zero() {
        value = -value;
    }
    Some(value)
}

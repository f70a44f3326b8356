use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

use super::PrecisionPolicy;
use crate::error::{Error, Result};

/// A real number known only through a rigorous enclosure.
///
/// The enclosure is `[lo, hi] * 2^-bits` with integer `lo <= hi`. Every
/// operation rounds outward, so the exact value of the expression that
/// produced a `CertifiedReal` always lies inside it.
#[derive(Clone, PartialEq, Eq)]
pub struct CertifiedReal {
    lo: BigInt,
    hi: BigInt,
    bits: u32,
}

/// Outcome of a certified sign test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Negative,
    /// The enclosure still contains zero.
    Indeterminate,
    Positive,
}

fn pow2(k: u32) -> BigInt {
    BigInt::one() << k as usize
}

fn floor_div(a: &BigInt, b: &BigInt) -> BigInt {
    a.div_floor(b)
}

fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    -((-a).div_floor(b))
}

fn floor_shr(a: &BigInt, k: u32) -> BigInt {
    floor_div(a, &pow2(k))
}

fn ceil_shr(a: &BigInt, k: u32) -> BigInt {
    ceil_div(a, &pow2(k))
}

fn ceil_sqrt(v: &BigInt) -> BigInt {
    let r = v.sqrt();
    if &r * &r < *v {
        r + 1
    } else {
        r
    }
}

impl CertifiedReal {
    fn from_raw(lo: BigInt, hi: BigInt, bits: u32) -> Self {
        debug_assert!(lo <= hi, "inverted enclosure");
        CertifiedReal { lo, hi, bits }
    }

    pub fn from_integer(n: &BigInt, bits: u32) -> Self {
        let v = n << bits as usize;
        Self::from_raw(v.clone(), v, bits)
    }

    pub fn from_i64(n: i64, bits: u32) -> Self {
        Self::from_integer(&BigInt::from(n), bits)
    }

    /// Tightest enclosure of an exact rational at this precision.
    pub fn from_rational(q: &BigRational, bits: u32) -> Self {
        let num = q.numer() << bits as usize;
        Self::from_raw(floor_div(&num, q.denom()), ceil_div(&num, q.denom()), bits)
    }

    /// Enclosure of a decimal constant such as `"2.96e28"`.
    pub fn from_decimal(lit: &str, bits: u32) -> Self {
        Self::from_rational(&super::exact_decimal(lit), bits)
    }

    /// Enclosure of `[lo, hi]`, widened outward to the grid.
    pub fn from_bounds(lo: &BigRational, hi: &BigRational, bits: u32) -> Result<Self> {
        if lo > hi {
            return Err(Error::domain("enclosure bounds are inverted"));
        }
        let l = Self::from_rational(lo, bits);
        let h = Self::from_rational(hi, bits);
        Ok(Self::from_raw(l.lo, h.hi, bits))
    }

    pub fn precision_bits(&self) -> u32 {
        self.bits
    }

    fn unit(&self) -> BigInt {
        pow2(self.bits)
    }

    pub fn lower(&self) -> BigRational {
        BigRational::new(self.lo.clone(), self.unit())
    }

    pub fn upper(&self) -> BigRational {
        BigRational::new(self.hi.clone(), self.unit())
    }

    pub fn midpoint(&self) -> BigRational {
        BigRational::new(&self.lo + &self.hi, self.unit() << 1usize)
    }

    pub fn radius(&self) -> BigRational {
        BigRational::new(&self.hi - &self.lo, self.unit() << 1usize)
    }

    /// Approximate midpoint, for display only.
    pub fn to_f64(&self) -> f64 {
        self.midpoint().to_f64().unwrap_or(f64::NAN)
    }

    /// Largest `f64` not above the enclosure's lower end.
    pub fn lower_f64(&self) -> f64 {
        let lo = self.lower();
        let mut f = lo.to_f64().unwrap_or(f64::NEG_INFINITY);
        while f.is_finite() && BigRational::from_f64(f).is_some_and(|r| r > lo) {
            f = f.next_down();
        }
        f
    }

    /// Smallest `f64` not below the enclosure's upper end.
    pub fn upper_f64(&self) -> f64 {
        let hi = self.upper();
        let mut f = hi.to_f64().unwrap_or(f64::INFINITY);
        while f.is_finite() && BigRational::from_f64(f).is_some_and(|r| r < hi) {
            f = f.next_up();
        }
        f
    }

    pub fn contains(&self, q: &BigRational) -> bool {
        self.lower() <= *q && *q <= self.upper()
    }

    pub fn contains_integer(&self, n: &BigInt) -> bool {
        let v = n << self.bits as usize;
        self.lo <= v && v <= self.hi
    }

    /// Whether the enclosure is a single exact point.
    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    /// Re-expresses the enclosure on a grid with `bits` fractional bits.
    pub fn with_bits(&self, bits: u32) -> Self {
        match bits.cmp(&self.bits) {
            Ordering::Equal => self.clone(),
            Ordering::Greater => {
                let s = (bits - self.bits) as usize;
                Self::from_raw(&self.lo << s, &self.hi << s, bits)
            }
            Ordering::Less => {
                let s = self.bits - bits;
                Self::from_raw(floor_shr(&self.lo, s), ceil_shr(&self.hi, s), bits)
            }
        }
    }

    fn aligned(&self, other: &Self) -> (Self, Self) {
        let bits = self.bits.max(other.bits);
        (self.with_bits(bits), other.with_bits(bits))
    }

    pub fn sign(&self) -> Sign {
        if self.lo.is_positive() {
            Sign::Positive
        } else if self.hi.is_negative() {
            Sign::Negative
        } else {
            Sign::Indeterminate
        }
    }

    /// True only if every point of `self` is below every point of `other`.
    pub fn certainly_lt(&self, other: &Self) -> bool {
        let (a, b) = self.aligned(other);
        a.hi < b.lo
    }

    pub fn certainly_gt(&self, other: &Self) -> bool {
        other.certainly_lt(self)
    }

    /// Decides `self < other`; `None` while the enclosures overlap.
    pub fn cmp_certified(&self, other: &Self) -> Option<Ordering> {
        if self.certainly_lt(other) {
            Some(Ordering::Less)
        } else if self.certainly_gt(other) {
            Some(Ordering::Greater)
        } else {
            None
        }
    }

    pub fn abs(&self) -> Self {
        match self.sign() {
            Sign::Positive => self.clone(),
            Sign::Negative => -self,
            Sign::Indeterminate => {
                let m = self.lo.abs().max(self.hi.abs());
                Self::from_raw(BigInt::zero(), m, self.bits)
            }
        }
    }

    pub fn max(&self, other: &Self) -> Self {
        let (a, b) = self.aligned(other);
        Self::from_raw(a.lo.max(b.lo), a.hi.max(b.hi), a.bits)
    }

    pub fn min(&self, other: &Self) -> Self {
        let (a, b) = self.aligned(other);
        Self::from_raw(a.lo.min(b.lo), a.hi.min(b.hi), a.bits)
    }

    /// Exact multiplication by an integer.
    pub fn scale(&self, n: &BigInt) -> Self {
        let (l, h) = (&self.lo * n, &self.hi * n);
        if n.is_negative() {
            Self::from_raw(h, l, self.bits)
        } else {
            Self::from_raw(l, h, self.bits)
        }
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        let (a, b) = self.aligned(other);
        if b.sign() == Sign::Indeterminate {
            return Err(Error::domain("division by an enclosure containing zero"));
        }
        let mut lo: Option<BigInt> = None;
        let mut hi: Option<BigInt> = None;
        for x in [&a.lo, &a.hi] {
            let num = x << a.bits as usize;
            for y in [&b.lo, &b.hi] {
                let f = floor_div(&num, y);
                let c = ceil_div(&num, y);
                lo = Some(lo.map_or(f.clone(), |v| v.min(f)));
                hi = Some(hi.map_or(c.clone(), |v| v.max(c)));
            }
        }
        Ok(Self::from_raw(lo.unwrap(), hi.unwrap(), a.bits))
    }

    pub fn recip(&self) -> Result<Self> {
        Self::from_i64(1, self.bits).checked_div(self)
    }

    /// Integer power; negative exponents divide.
    pub fn powi(&self, exp: i64) -> Result<Self> {
        let mut base = self.clone();
        let mut acc = Self::from_i64(1, self.bits);
        let mut e = exp.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        if exp < 0 {
            acc.recip()
        } else {
            Ok(acc)
        }
    }

    pub fn sqrt(&self) -> Result<Self> {
        if self.lo.is_negative() {
            return Err(Error::domain("square root of an enclosure reaching below zero"));
        }
        let s = self.bits as usize;
        Ok(Self::from_raw(
            (&self.lo << s).sqrt(),
            ceil_sqrt(&(&self.hi << s)),
            self.bits,
        ))
    }

    pub fn ln(&self) -> Result<Self> {
        certified_log(self)
    }

    /// `floor(x)` if it is the same integer for every point of the enclosure.
    pub fn floor_certified(&self) -> Option<BigInt> {
        let u = self.unit();
        let a = floor_div(&self.lo, &u);
        (a == floor_div(&self.hi, &u)).then_some(a)
    }

    /// Upper bound for `floor(x)` over the enclosure.
    pub fn floor_upper(&self) -> BigInt {
        floor_div(&self.hi, &self.unit())
    }

    /// The only integer inside the enclosure, if there is exactly one.
    pub fn unique_integer(&self) -> Option<BigInt> {
        let u = self.unit();
        let c = ceil_div(&self.lo, &u);
        (c == floor_div(&self.hi, &u)).then_some(c)
    }

    /// Enclosure of the distance to the nearest integer, `||x||`.
    pub fn dist_to_nearest_integer(&self) -> Self {
        let one = self.unit();
        let half = &one >> 1usize;
        let nearest = |v: &BigInt| floor_div(&(v + &half), &one);
        let (k_lo, k_hi) = (nearest(&self.lo), nearest(&self.hi));
        let d_lo = (&self.lo - &k_lo * &one).abs();
        let d_hi = (&self.hi - &k_hi * &one).abs();
        let (lo, hi) = if k_lo == k_hi {
            let k = &k_lo * &one;
            let lo = if self.lo <= k && k <= self.hi {
                BigInt::zero()
            } else {
                d_lo.clone().min(d_hi.clone())
            };
            (lo, d_lo.max(d_hi))
        } else if &k_hi - &k_lo >= BigInt::from(2)
            || self.lo <= &k_lo * &one
            || self.hi >= &k_hi * &one
        {
            (BigInt::zero(), half)
        } else {
            (d_lo.min(d_hi), half)
        };
        Self::from_raw(lo, hi, self.bits)
    }
}

impl fmt::Debug for CertifiedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "CertifiedReal[{:e}, {:e}]@{}",
            self.lower_f64(),
            self.upper_f64(),
            self.bits
        )
    }
}

impl fmt::Display for CertifiedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lower_f64(), self.upper_f64())
    }
}

impl Neg for &CertifiedReal {
    type Output = CertifiedReal;
    fn neg(self) -> CertifiedReal {
        CertifiedReal::from_raw(-&self.hi, -&self.lo, self.bits)
    }
}

impl Neg for CertifiedReal {
    type Output = CertifiedReal;
    fn neg(self) -> CertifiedReal {
        -&self
    }
}

impl Add for &CertifiedReal {
    type Output = CertifiedReal;
    fn add(self, rhs: &CertifiedReal) -> CertifiedReal {
        let (a, b) = self.aligned(rhs);
        CertifiedReal::from_raw(a.lo + b.lo, a.hi + b.hi, a.bits)
    }
}

impl Sub for &CertifiedReal {
    type Output = CertifiedReal;
    fn sub(self, rhs: &CertifiedReal) -> CertifiedReal {
        let (a, b) = self.aligned(rhs);
        CertifiedReal::from_raw(a.lo - b.hi, a.hi - b.lo, a.bits)
    }
}

impl Mul for &CertifiedReal {
    type Output = CertifiedReal;
    fn mul(self, rhs: &CertifiedReal) -> CertifiedReal {
        let (a, b) = self.aligned(rhs);
        let products = [&a.lo * &b.lo, &a.lo * &b.hi, &a.hi * &b.lo, &a.hi * &b.hi];
        let min = products.iter().min().unwrap();
        let max = products.iter().max().unwrap();
        CertifiedReal::from_raw(floor_shr(min, a.bits), ceil_shr(max, a.bits), a.bits)
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for CertifiedReal {
            type Output = CertifiedReal;
            fn $m(self, rhs: CertifiedReal) -> CertifiedReal {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&CertifiedReal> for CertifiedReal {
            type Output = CertifiedReal;
            fn $m(self, rhs: &CertifiedReal) -> CertifiedReal {
                (&self).$m(rhs)
            }
        }
    )*};
}

forward_owned!(Add add, Sub sub, Mul mul);

/// Sign of an expression, re-evaluated on the policy's doubling ladder until
/// the enclosure excludes zero.
///
/// Returns [`Sign::Indeterminate`] if the cap is reached first.
pub fn certified_sign(
    policy: PrecisionPolicy,
    mut expr: impl FnMut(u32) -> Result<CertifiedReal>,
) -> Result<Sign> {
    for bits in policy.ladder() {
        match expr(bits)?.sign() {
            Sign::Indeterminate => continue,
            s => return Ok(s),
        }
    }
    Ok(Sign::Indeterminate)
}

/// Enclosure of the natural logarithm.
pub fn certified_log(x: &CertifiedReal) -> Result<CertifiedReal> {
    if !x.lo.is_positive() {
        return Err(Error::domain(format!("logarithm of non-positive enclosure {x}")));
    }
    if x.is_exact() {
        let (lo, hi) = ln_scaled(&x.lo, x.bits);
        return Ok(CertifiedReal::from_raw(lo, hi, x.bits));
    }
    let (lo, _) = ln_scaled(&x.lo, x.bits);
    let (_, hi) = ln_scaled(&x.hi, x.bits);
    Ok(CertifiedReal::from_raw(lo, hi, x.bits))
}

/// Lower and upper bounds on `2^w * atanh(u)` where `u = num / 2^w`,
/// `0 <= num <= 2^w / 2`. Returns `(sum, slack)`: the true value lies in
/// `[sum, sum + slack]`.
fn atanh_series(num: &BigInt, w: u32) -> (BigInt, BigInt) {
    debug_assert!(!num.is_negative());
    let sq = (num * num) >> w as usize;
    let mut power = num.clone();
    let mut sum = BigInt::zero();
    let mut terms: u64 = 0;
    let mut j: u64 = 0;
    while !power.is_zero() {
        sum += &power / BigInt::from(2 * j + 1);
        terms += 1;
        j += 1;
        power = (&power * &sq) >> w as usize;
    }
    // Each truncated power/term is short by at most 4 ulps, plus a tail of at
    // most 4 ulps after the power underflows.
    (sum, BigInt::from(4 * terms + 4))
}

/// Floor and ceiling of `2^p * ln(y / 2^p)` for integer `y > 0`.
fn ln_scaled(y: &BigInt, p: u32) -> (BigInt, BigInt) {
    debug_assert!(y.is_positive());
    // y / 2^p lies in [2^k, 2^(k+1)).
    let mut k = y.bits() as i64 - 1 - p as i64;
    // Move the reduced argument into [1/sqrt2, sqrt2].
    let e = 2 * (p as i64 + k) + 1;
    if e >= 0 && (y * y) > (BigInt::one() << e as usize) {
        k += 1;
    }
    let guard = 48 + (64 - k.unsigned_abs().leading_zeros());
    let w = p + guard;
    let one = pow2(w);

    // z = y / 2^(p+k) on the 2^-w grid, rounded down (at most 1 ulp off).
    let shift = w as i64 - p as i64 - k;
    let z = if shift >= 0 {
        y << shift as usize
    } else {
        floor_shr(y, (-shift) as u32)
    };

    // u = (z - 1) / (z + 1); |u| <= 0.1716. Rounding z and u costs <= 2 ulps
    // in u, hence <= 5 ulps in 2*atanh(u).
    let num = &z - &one;
    let u = floor_div(&(&num << w as usize), &(&z + &one));
    let (s, slack) = atanh_series(&u.abs(), w);
    let (mut lo, mut hi) = if u.is_negative() {
        (-(&s + &slack) * 2 - 5, -&s * 2 + 5)
    } else {
        (&s * 2 - 5, (&s + &slack) * 2 + 5)
    };

    if k != 0 {
        // ln 2 = 2 atanh(1/3); u = 1/3 rounded down costs <= 3 ulps.
        let third = &one / BigInt::from(3);
        let (s2, slack2) = atanh_series(&third, w);
        let ln2_lo = &s2 * 2 - 3;
        let ln2_hi = (&s2 + &slack2) * 2 + 3;
        let kk = BigInt::from(k);
        if k > 0 {
            lo += &kk * ln2_lo;
            hi += &kk * ln2_hi;
        } else {
            lo += &kk * ln2_hi;
            hi += &kk * ln2_lo;
        }
    }
    (floor_shr(&lo, guard), ceil_shr(&hi, guard))
}

//! Analytic bounds: the gap bound on `m`, the hypergeometric (Rickert)
//! quantities, the linear form `Λ`, the Laurent–Mignotte estimate and the
//! resulting bounds on `m` and `a` for `b = b_1`.
//!
//! Every constant is an exact decimal turned into an enclosure on demand.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{exact_decimal, perfect_square_root, CertifiedReal, Integer, PrecisionPolicy, Sign};
use crate::error::{Error, Result};
use crate::pell::{b_nu, Epsilon, PairContext};

fn dec(lit: &str, bits: u32) -> CertifiedReal {
    CertifiedReal::from_decimal(lit, bits)
}

fn int(n: &Integer, bits: u32) -> CertifiedReal {
    CertifiedReal::from_integer(n, bits)
}

fn small(n: i64, bits: u32) -> CertifiedReal {
    CertifiedReal::from_i64(n, bits)
}

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// `(r + √(k b)) / 2` with `r = √(k b + 4)` taken as a real.
fn unit(k: &Integer, b: &Integer, bits: u32) -> Result<CertifiedReal> {
    let kb = k * b;
    let r = int(&(&kb + 4), bits).sqrt()?;
    (&r + &int(&kb, bits).sqrt()?).checked_div(&small(2, bits))
}

/// `α = (s + √(ab))/2`.
pub fn alpha(a: &Integer, b: &Integer, bits: u32) -> Result<CertifiedReal> {
    unit(a, b, bits)
}

/// `β = (t + √((a+1)b))/2`.
pub fn beta(a: &Integer, b: &Integer, bits: u32) -> Result<CertifiedReal> {
    unit(&(a + 1), b, bits)
}

/// `γ = √(a+1)(√b + ε√a) / (√a(√b + ε√(a+1)))`.
pub fn gamma(a: &Integer, b: &Integer, epsilon: Epsilon, bits: u32) -> Result<CertifiedReal> {
    let e = small(epsilon.value(), bits);
    let sa = int(a, bits).sqrt()?;
    let sa1 = int(&(a + 1), bits).sqrt()?;
    let sb = int(b, bits).sqrt()?;
    let num = &sa1 * &(&sb + &(&e * &sa));
    let den = &sa * &(&sb + &(&e * &sa1));
    num.checked_div(&den)
}

/// One evaluated bound in serializable form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundRecord {
    pub name: String,
    pub inputs: BTreeMap<String, String>,
    pub enclosure_lo: Option<f64>,
    pub enclosure_hi: Option<f64>,
    pub verdict: Option<String>,
}

impl BoundRecord {
    pub fn new(name: &str, inputs: &[(&str, String)], value: Option<&CertifiedReal>) -> Self {
        BoundRecord {
            name: name.to_string(),
            inputs: inputs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect(),
            enclosure_lo: value.map(CertifiedReal::lower_f64),
            enclosure_hi: value.map(CertifiedReal::upper_f64),
            verdict: None,
        }
    }

    pub fn with_verdict(mut self, verdict: impl Into<String>) -> Self {
        self.verdict = Some(verdict.into());
        self
    }
}

// ---------------------------------------------------------------------------
// Gap bound

fn check_at_least_b1(a: &Integer, b: &Integer) -> Result<()> {
    if !a.is_positive() {
        return Err(Error::domain(format!("a must be positive, got {a}")));
    }
    let b1: Integer = 64 * a + 32;
    if b < &b1 {
        return Err(Error::domain(format!("b = {b} is below b_1(a) = {b1}")));
    }
    Ok(())
}

/// `0.4672 (a+1)^(-1/2) b^(1/2)`: every solution index `m >= 2` exceeds it.
pub fn m_lower_bound(a: &Integer, b: &Integer, bits: u32) -> Result<CertifiedReal> {
    check_at_least_b1(a, b)?;
    let q = BigRational::new(b.clone(), a + 1);
    CertifiedReal::from_rational(&q, bits)
        .sqrt()
        .map(|r| &dec("0.4672", bits) * &r)
}

/// Same threshold without the `b >= b_1` hypothesis, for diagnostics.
pub fn gap_bound_unchecked(a: &Integer, b: &Integer, bits: u32) -> Result<CertifiedReal> {
    let q = BigRational::new(b.clone(), a + 1);
    Ok(&dec("0.4672", bits) * &CertifiedReal::from_rational(&q, bits).sqrt()?)
}

/// Exact test of `m < 0.4672 (a+1)^(-1/2) b^(1/2)`.
pub fn below_gap_bound(a: &Integer, b: &Integer, m: &Integer) -> bool {
    // m^2 (a+1) 10^8 < 4672^2 b
    m * m * (a + 1) * 100_000_000u64 < Integer::from(4672u64 * 4672) * b
}

// ---------------------------------------------------------------------------
// Hypergeometric method

#[derive(Debug, Clone)]
pub struct RickertParams {
    pub a: Integer,
    pub n: Integer,
    pub lambda: CertifiedReal,
}

impl RickertParams {
    /// `θ_1 = √(1 + 4a/N)`.
    pub fn theta1(&self, bits: u32) -> Result<CertifiedReal> {
        let q = BigRational::one() + BigRational::new(4 * &self.a, self.n.clone());
        CertifiedReal::from_rational(&q, bits).sqrt()
    }

    /// `θ_2 = √(1 + 4(a+1)/N)`.
    pub fn theta2(&self, bits: u32) -> Result<CertifiedReal> {
        let q = BigRational::one() + BigRational::new(4 * (&self.a + 1), self.n.clone());
        CertifiedReal::from_rational(&q, bits).sqrt()
    }

    /// `(2.96·10^28 N (a+1))^(-1)`.
    pub fn measure_constant(&self) -> BigRational {
        let c = exact_decimal("2.96e28") * BigRational::from_integer(&self.n * (&self.a + 1));
        c.recip()
    }
}

/// `λ = 1 + log(11(a+1)N) / log(0.041 N^2 / (a(a+1)))`, certified below 2.
pub fn rickert_lambda(a: &Integer, n: &Integer, policy: PrecisionPolicy) -> Result<RickertParams> {
    if !a.is_positive() {
        return Err(Error::domain(format!("a must be positive, got {a}")));
    }
    let aa1: Integer = a * (a + 1);
    if !(n % &aa1).is_zero() {
        return Err(Error::domain(format!("N = {n} is not a multiple of a(a+1) = {aa1}")));
    }
    let floor: Integer = 270 * &aa1 * (a + 1);
    if n < &floor {
        return Err(Error::domain(format!("N = {n} is below 270a(a+1)^2 = {floor}")));
    }
    let lambda = policy.escalate("λ < 2 is not certified", |bits| {
        let num = int(&(11 * (a + 1) * n), bits).ln()?;
        let arg = exact_decimal("0.041") * BigRational::new(n * n, aa1.clone());
        let den = CertifiedReal::from_rational(&arg, bits).ln()?;
        let lambda = &small(1, bits) + &num.checked_div(&den)?;
        Ok(lambda.certainly_lt(&small(2, bits)).then_some(lambda))
    })?;
    Ok(RickertParams {
        a: a.clone(),
        n: n.clone(),
        lambda,
    })
}

/// Simultaneous approximation quality of a solution `(x, y, z)` of the
/// Pellian system.
#[derive(Debug, Clone)]
pub struct ThetaCheck {
    /// `max{|θ_1 - ty/((a+1)z)|, |θ_2 - sx/(az)|}`
    pub quality: CertifiedReal,
    /// The same maximum with the fractions attached to the other θ.
    pub swapped_quality: CertifiedReal,
    /// `(2b/a) z^-2`
    pub bound: CertifiedReal,
}

impl ThetaCheck {
    pub fn holds(&self) -> bool {
        self.quality.certainly_lt(&self.bound)
    }

    pub fn swapped_holds(&self) -> bool {
        self.swapped_quality.certainly_lt(&self.bound)
    }
}

/// Measures how well `(a+1)sx`, `aty` over `q = a(a+1)z` approximate `θ_1`,
/// `θ_2` with `N = a(a+1)b`.
///
/// `sx/(az)` tends to `s/√(ab) = θ_2` and `ty/((a+1)z)` to `θ_1`, so the
/// quality is measured with that pairing; the swapped pairing is reported
/// alongside.
pub fn theta_approximation_quality(
    a: &Integer,
    b: &Integer,
    x: &Integer,
    y: &Integer,
    z: &Integer,
    bits: u32,
) -> Result<ThetaCheck> {
    if !(x.is_positive() && y.is_positive() && z.is_positive()) {
        return Err(Error::domain("x, y, z must be positive"));
    }
    let a1: Integer = a + 1;
    if a * z * z - b * x * x != 4 * (a - b) || &a1 * z * z - b * y * y != 4 * (&a1 - b) {
        return Err(Error::domain(format!("({x}, {y}, {z}) does not solve the Pellian system")));
    }
    if z == &Integer::from(2) {
        return Err(Error::domain("z = 2 is the trivial solution"));
    }
    let ctx = PairContext::new(a, b, Epsilon::Plus)?;
    let n: Integer = a * &a1 * b;
    let params = RickertParams {
        a: a.clone(),
        n,
        lambda: small(0, bits),
    };
    let (t1, t2) = (params.theta1(bits)?, params.theta2(bits)?);
    let p_sx = CertifiedReal::from_rational(&BigRational::new(ctx.s() * x, a * z), bits);
    let p_ty = CertifiedReal::from_rational(&BigRational::new(ctx.t() * y, &a1 * z), bits);
    let quality = (&t1 - &p_ty).abs().max(&(&t2 - &p_sx).abs());
    let swapped_quality = (&t1 - &p_sx).abs().max(&(&t2 - &p_ty).abs());
    let bound = CertifiedReal::from_rational(&BigRational::new(2 * b, a * z * z), bits);
    Ok(ThetaCheck {
        quality,
        swapped_quality,
        bound,
    })
}

/// Right side of the hypergeometric bound on `log z`:
///
/// ```text
/// log(5.92e28 a^2 (a+1)^4 b^2) log(0.041 a (a+1) b^2) / log(0.0037 b / (a+1))
/// ```
///
/// `None` when the denominator is not positive.
pub fn z_log_upper_bound(a: &Integer, b: &Integer, bits: u32) -> Result<Option<CertifiedReal>> {
    if !a.is_positive() || !b.is_positive() {
        return Err(Error::domain("a and b must be positive"));
    }
    let a1: Integer = a + 1;
    // 0.0037 b / (a+1) > 1  <=>  37 b > 10^4 (a+1)
    if 37 * b <= 10_000 * &a1 {
        return Ok(None);
    }
    let bb = b * b;
    let a14: Integer = a1.pow(4);
    let f1 = exact_decimal("5.92e28") * BigRational::from_integer(a * a * &a14 * &bb);
    let f2 = exact_decimal("0.041") * BigRational::from_integer(a * &a1 * &bb);
    let f3 = exact_decimal("0.0037") * BigRational::new(b.clone(), a1);
    let num = &CertifiedReal::from_rational(&f1, bits).ln()? * &CertifiedReal::from_rational(&f2, bits).ln()?;
    Ok(Some(num.checked_div(&CertifiedReal::from_rational(&f3, bits).ln()?)?))
}

/// Both sides of the combined inequality
/// `0.4672 (a+1)^(-1/2) b^(1/2) < (log z bound) / log α`.
#[derive(Debug, Clone)]
pub struct HypergeometricMargin {
    pub lhs: CertifiedReal,
    /// `None` when the `log z` bound is vacuous.
    pub rhs: Option<CertifiedReal>,
}

impl HypergeometricMargin {
    /// `Some(true)` when the inequality certainly fails (no solution),
    /// `Some(false)` when it certainly holds or is vacuous, `None` if undecided.
    pub fn eliminates(&self) -> Option<bool> {
        match &self.rhs {
            None => Some(false),
            Some(r) => match self.lhs.cmp_certified(r) {
                Some(std::cmp::Ordering::Greater) => Some(true),
                Some(_) => Some(false),
                None => None,
            },
        }
    }
}

/// `α` here uses `s = √(ab+4)` as a real, so `b` need not complete a pair.
pub fn hypergeometric_margin(a: &Integer, b: &Integer, bits: u32) -> Result<HypergeometricMargin> {
    let lhs = gap_bound_unchecked(a, b, bits)?;
    let rhs = match z_log_upper_bound(a, b, bits)? {
        None => None,
        Some(z) => Some(z.checked_div(&alpha(a, b, bits)?.ln()?)?),
    };
    Ok(HypergeometricMargin { lhs, rhs })
}

/// Whether the hypergeometric bound leaves no room for a solution with
/// `b` in place of the second element.
pub fn hypergeometric_eliminates(a: &Integer, b: &Integer, policy: PrecisionPolicy) -> Result<bool> {
    let b2 = b_nu(a, 2)?;
    if b < &b2 {
        return Err(Error::domain(format!("b = {b} is below b_2(a) = {b2}")));
    }
    policy.escalate("hypergeometric comparison is undecided", |bits| {
        hypergeometric_margin(a, b, bits).map(|m| m.eliminates())
    })
}

/// Both sides of
///
/// ```text
/// 14.95 a < log(6.21e34 a^6 (a+1)^6) log(42992 a^5 (a+1)^3) / (log(32 a^2) log(3.78 a^2))
/// ```
///
/// optionally with `a+1` replaced by its upper bound `1.2a` (valid for `a >= 5`).
#[derive(Debug, Clone)]
pub struct LargeACheck {
    pub lhs: CertifiedReal,
    pub rhs: CertifiedReal,
}

impl LargeACheck {
    pub fn holds(&self) -> Option<bool> {
        self.lhs.cmp_certified(&self.rhs).map(|o| o == std::cmp::Ordering::Less)
    }
}

pub fn large_a_inequality(a: &Integer, substitute: bool, bits: u32) -> Result<LargeACheck> {
    if !a.is_positive() {
        return Err(Error::domain("a must be positive"));
    }
    let ar = BigRational::from_integer(a.clone());
    let a1 = if substitute {
        ratio(6, 5) * &ar
    } else {
        &ar + BigRational::one()
    };
    let pw = |q: &BigRational, e: i32| num_traits::pow::Pow::pow(q, e);
    let ln = |q: BigRational| CertifiedReal::from_rational(&q, bits).ln();
    let n1 = ln(exact_decimal("6.21e34") * pw(&ar, 6) * pw(&a1, 6))?;
    let n2 = ln(BigRational::from_integer(42992.into()) * pw(&ar, 5) * pw(&a1, 3))?;
    let d1 = ln(BigRational::from_integer(32.into()) * pw(&ar, 2))?;
    let d2 = ln(exact_decimal("3.78") * pw(&ar, 2))?;
    let rhs = (&n1 * &n2).checked_div(&(&d1 * &d2))?;
    let lhs = CertifiedReal::from_rational(&(exact_decimal("14.95") * ar), bits);
    Ok(LargeACheck { lhs, rhs })
}

/// True when the `a+1 < 1.2a` form of the large-`a` inequality certainly
/// fails at `a`, i.e. the case `b >= b_2` is contradictory there.
pub fn large_a_contradiction(a: &Integer, policy: PrecisionPolicy) -> Result<bool> {
    policy.escalate("large-a inequality is undecided", |bits| {
        Ok(large_a_inequality(a, true, bits)?.holds().map(|h| !h))
    })
}

/// Smallest integer `M` with `M / log(M+1) >= 6.543e15 log^2 b`; every
/// `m` with `m / log(m+1) < 6.543e15 log^2 b` then satisfies `m < M`.
///
/// Comparisons that stay undecided at the precision cap are resolved
/// upward, so the result is always a valid bound.
pub fn sextuple_m_bound(b: &Integer, policy: PrecisionPolicy) -> Result<Integer> {
    if b < &Integer::from(96) {
        return Err(Error::domain(format!("b = {b} is below 96")));
    }
    // m / log(m+1) is increasing for m >= 1.
    let reaches = |m: &Integer| -> Result<bool> {
        let r = policy.escalate("", |bits| {
            let lb = int(b, bits).ln()?;
            let c = &dec("6.543e15", bits) * &(&lb * &lb);
            let f = int(m, bits).checked_div(&int(&(m + 1), bits).ln()?)?;
            Ok(f.cmp_certified(&c).map(|o| o != std::cmp::Ordering::Less))
        });
        match r {
            Ok(v) => Ok(v),
            Err(Error::Precision { .. }) => Ok(false),
            Err(e) => Err(e),
        }
    };
    let mut lo = Integer::one();
    if reaches(&lo)? {
        return Ok(lo);
    }
    let mut hi = Integer::from(2);
    while !reaches(&hi)? {
        lo = hi.clone();
        hi *= 2;
    }
    // reaches(lo) is false, reaches(hi) is true
    while &hi - &lo > Integer::one() {
        let mid: Integer = (&lo + &hi) / 2;
        if reaches(&mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

// ---------------------------------------------------------------------------
// Linear form

#[derive(Debug, Clone)]
pub struct LinearFormParams {
    pub context: PairContext,
    pub alpha: CertifiedReal,
    pub beta: CertifiedReal,
    pub gamma: CertifiedReal,
    pub log_alpha: CertifiedReal,
    pub log_beta: CertifiedReal,
    pub log_gamma: CertifiedReal,
}

impl LinearFormParams {
    pub fn new(context: &PairContext, bits: u32) -> Result<Self> {
        let (a, b) = (context.a(), context.b());
        let alpha = alpha(a, b, bits)?;
        let beta = beta(a, b, bits)?;
        let gamma = gamma(a, b, context.epsilon(), bits)?;
        Ok(LinearFormParams {
            log_alpha: alpha.ln()?,
            log_beta: beta.ln()?,
            log_gamma: gamma.ln()?,
            alpha,
            beta,
            gamma,
            context: context.clone(),
        })
    }

    /// `Λ = m log α - n log β + log γ`.
    pub fn lambda(&self, m: u64, n: u64) -> CertifiedReal {
        &(&self.log_alpha.scale(&m.into()) - &self.log_beta.scale(&n.into())) + &self.log_gamma
    }
}

pub fn linear_form(context: &PairContext, m: u64, n: u64, bits: u32) -> Result<CertifiedReal> {
    Ok(LinearFormParams::new(context, bits)?.lambda(m, n))
}

fn bits_for_power(context: &PairContext, power: u64, policy: PrecisionPolicy) -> PrecisionPolicy {
    // α < (a b + 4), so α^power needs about power * bitlen(ab + 4) bits.
    let size = (context.a() * context.b() + 4u32).bits();
    let need = (power.saturating_mul(size)).saturating_add(64).min(u32::MAX as u64) as u32;
    let start = policy.start.max(need);
    PrecisionPolicy {
        start,
        cap: policy.cap.max(start),
    }
}

/// Certifies `0 < Λ < α^(1-2m)`. `Ok(false)` means the enclosure certainly
/// violates it.
pub fn certify_lambda_bound(
    context: &PairContext,
    m: u64,
    n: u64,
    policy: PrecisionPolicy,
) -> Result<bool> {
    if m == 0 {
        return Err(Error::domain("the bound on Λ needs m >= 1"));
    }
    let policy = bits_for_power(context, 2 * m, policy);
    policy.escalate("sign of Λ is undecided", |bits| {
        let p = LinearFormParams::new(context, bits)?;
        let lam = p.lambda(m, n);
        let cap = p.alpha.powi(1 - 2 * m as i64)?;
        Ok(match lam.sign() {
            Sign::Negative => Some(false),
            Sign::Indeterminate => None,
            Sign::Positive => {
                if lam.certainly_lt(&cap) {
                    Some(true)
                } else if lam.certainly_gt(&cap) {
                    Some(false)
                } else {
                    None
                }
            }
        })
    })
}

/// Certifies `(m - 0.0005) log α - n log β < 0`.
pub fn certify_index_log_relation(
    context: &PairContext,
    m: u64,
    n: u64,
    policy: PrecisionPolicy,
) -> Result<bool> {
    policy.escalate("index relation is undecided", |bits| {
        let p = LinearFormParams::new(context, bits)?;
        let mm = &small(m as i64, bits) - &dec("0.0005", bits);
        let v = &(&mm * &p.log_alpha) - &p.log_beta.scale(&n.into());
        Ok(match v.sign() {
            Sign::Negative => Some(true),
            Sign::Positive => Some(false),
            Sign::Indeterminate => None,
        })
    })
}

// ---------------------------------------------------------------------------
// Two logarithms (b = b_1)

/// Which argument of `max{log b' + 0.14, 21/D, 1/2}` is largest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LmBranch {
    LogBPrime,
    TwentyOneOverD,
    Half,
}

/// Laurent–Mignotte data for `Λ = log(α^ν γ) - n log(β/α)`, degree 4.
#[derive(Debug, Clone)]
pub struct LMParams {
    pub d: u32,
    pub nu: u64,
    pub n: u64,
    pub log_a1: CertifiedReal,
    pub log_a2: CertifiedReal,
    pub b_prime: CertifiedReal,
}

impl LMParams {
    /// `log A_1 = (log α + log β)/2`, `log A_2 = 1.16(ν/2 + 1) log α`,
    /// `b' = n/(D log A_2) + 1/(D log A_1)`; checks the height hypotheses.
    pub fn new(context: &PairContext, nu: u64, n: u64, bits: u32) -> Result<Self> {
        if nu == 0 || n == 0 {
            return Err(Error::domain("need ν >= 1 and n >= 1"));
        }
        let d = 4u32;
        let p = LinearFormParams::new(context, bits)?;
        let dd = small(d as i64, bits);
        let half = CertifiedReal::from_rational(&ratio(1, 2), bits);
        let log_a1 = &(&p.log_alpha + &p.log_beta) * &half;
        let nu_half_plus_1 = CertifiedReal::from_rational(&ratio(nu as i64 + 2, 2), bits);
        let log_a2 = &(&dec("1.16", bits) * &nu_half_plus_1) * &p.log_alpha;

        let quarter = small(1, bits).checked_div(&dd)?;
        let log_alpha1 = &p.log_beta - &p.log_alpha;
        let log_alpha2 = &p.log_alpha.scale(&nu.into()) + &p.log_gamma;
        let h2 = &(&nu_half_plus_1 * &p.log_alpha) + &small(2, bits).ln()?;
        let floors1 = [log_alpha1.abs().checked_div(&dd)?, quarter.clone()];
        let floors2 = [h2, log_alpha2.abs().checked_div(&dd)?, quarter];
        for f in &floors1 {
            if !log_a1.certainly_gt(f) && log_a1 != *f {
                return Err(Error::domain(format!("log A_1 = {log_a1} is below {f}")));
            }
        }
        for f in &floors2 {
            if !log_a2.certainly_gt(f) {
                return Err(Error::domain(format!("log A_2 = {log_a2} is not above {f}")));
            }
        }
        let b_prime = &small(n as i64, bits).checked_div(&(&dd * &log_a2))?
            + &small(1, bits).checked_div(&(&dd * &log_a1))?;
        Ok(LMParams {
            d,
            nu,
            n,
            log_a1,
            log_a2,
            b_prime,
        })
    }
}

#[derive(Debug, Clone)]
pub struct LMBound {
    /// Lower bound for `log Λ`.
    pub value: CertifiedReal,
    pub branch: LmBranch,
}

/// `-24.34 D^4 (max{log b' + 0.14, 21/D, 1/2})^2 log A_1 log A_2`.
pub fn lm_lower_bound(p: &LMParams) -> Result<LMBound> {
    let bits = p.log_a1.precision_bits();
    let c1 = &p.b_prime.ln()? + &dec("0.14", bits);
    let c2 = CertifiedReal::from_rational(&ratio(21, p.d as i64), bits);
    let c3 = CertifiedReal::from_rational(&ratio(1, 2), bits);
    let m = c1.max(&c2).max(&c3);
    let branch = if c1.certainly_gt(&c2) {
        LmBranch::LogBPrime
    } else if c2.certainly_gt(&c1) {
        LmBranch::TwentyOneOverD
    } else {
        // Either way the value enclosure covers both.
        LmBranch::LogBPrime
    };
    let d4 = Integer::from(p.d).pow(4);
    let k = dec("24.34", bits).scale(&d4);
    let value = -(&(&(&k * &(&m * &m)) * &p.log_a1) * &p.log_a2);
    debug_assert!(c3.certainly_lt(&c2));
    Ok(LMBound { value, branch })
}

/// The constant in front of `max{...}^2` after combining the lower bound
/// with `Λ < α^(1-2m)`: `24.34 · 4^4 · (2.16/2) · 0.58^2 / 2`.
pub fn combined_constant() -> BigRational {
    let d4 = BigRational::from_integer(256.into());
    exact_decimal("24.34") * d4 * exact_decimal("1.08") * exact_decimal("0.3364") / BigRational::from_integer(2.into())
}

/// Printed constant of the `m` bound for `b = b_1`.
pub const PAPER_B1_CONSTANT: &str = "18067.6";
/// Printed bound on `a` for `b = b_1` at `ν = 2`.
pub const PAPER_A_BOUND: &str = "18072.11";

/// Threshold for `x - δ < 1132 max{log x, 5.25}^2`: the smallest integer
/// `X` with the inequality certainly false for every `x >= X`.
pub fn lm_threshold(delta: &BigRational, policy: PrecisionPolicy) -> Result<Integer> {
    if delta.is_negative() {
        return Err(Error::domain("δ must be non-negative"));
    }
    // On [e^5.25, 23000] the right side is at least 1132·5.25^2 > 31200 > x,
    // and beyond 23000 the difference is increasing because x / log x > 2264.
    let start = Integer::from(23_000);
    let g = |x: &Integer| -> Result<Sign> {
        policy.escalate("sign of x - δ - 1132 log^2 x is undecided", |bits| {
            let lx = int(x, bits).ln()?;
            let rhs = &small(1132, bits) * &(&lx * &lx);
            let v = &(&int(x, bits) - &CertifiedReal::from_rational(delta, bits)) - &rhs;
            let s = v.sign();
            Ok((s != Sign::Indeterminate).then_some(s))
        })
    };
    let slope_ok = policy.escalate("slope condition is undecided", |bits| {
        let r = int(&start, bits).checked_div(&int(&start, bits).ln()?)?;
        Ok(r.cmp_certified(&small(2264, bits)).map(|o| o == std::cmp::Ordering::Greater))
    })?;
    if !slope_ok || g(&start)? != Sign::Negative {
        return Err(Error::domain("threshold search bracket is invalid for this δ"));
    }
    let mut lo = start;
    let mut hi = Integer::from(1u64 << 20);
    while g(&hi)? != Sign::Positive {
        lo = hi.clone();
        hi *= 2;
    }
    while &hi - &lo > Integer::one() {
        let mid: Integer = (&lo + &hi) / 2;
        if g(&mid)? == Sign::Positive {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// `δ = 0.58 / (2(ν+2) log α)`, the offset in `(1.16m - 0.58)/(2(ν+2) log α)`.
fn lm_delta(log_alpha: &CertifiedReal, nu: u64) -> Result<BigRational> {
    let den = log_alpha.scale(&(2 * (nu + 2)).into());
    let d = CertifiedReal::from_rational(&exact_decimal("0.58"), den.precision_bits()).checked_div(&den)?;
    Ok(d.upper())
}

/// Upper bounds on `m` for `b = b_1(a)` and a given `ν = m - n`.
#[derive(Debug, Clone)]
pub struct B1Bound {
    pub a: Integer,
    pub nu: u64,
    pub log_alpha: CertifiedReal,
    /// `18067.6 (ν+2) log α`
    pub paper: CertifiedReal,
    /// `(2X/1.16)(ν+2) log α` with `X` from [`lm_threshold`].
    pub derived: CertifiedReal,
    pub threshold: Integer,
}

impl B1Bound {
    /// Integer `M` with `m < M` under both readings.
    pub fn m0(&self) -> Integer {
        self.paper.max(&self.derived).floor_upper() + 1
    }
}

pub fn b1_case_m_upper(a: &Integer, nu: u64, policy: PrecisionPolicy) -> Result<B1Bound> {
    if nu < 2 {
        return Err(Error::domain(format!("ν = {nu} must be at least 2")));
    }
    let b: Integer = 64 * a + 32;
    let bits = policy.start;
    let log_alpha = alpha(a, &b, bits)?.ln()?;
    let k = Integer::from(nu + 2);
    let paper = &dec(PAPER_B1_CONSTANT, bits) * &log_alpha.scale(&k);
    let delta = lm_delta(&log_alpha, nu)?;
    let threshold = lm_threshold(&delta, policy)?;
    let coeff = BigRational::new(2 * &threshold, 1.into()) / exact_decimal("1.16");
    let derived = &CertifiedReal::from_rational(&coeff, bits) * &log_alpha.scale(&k);
    Ok(B1Bound {
        a: a.clone(),
        nu,
        log_alpha,
        paper,
        derived,
        threshold,
    })
}

/// `9033.8 (ν+2)/(ν - 0.0005)`.
pub fn paper_a_bound(nu: u64) -> BigRational {
    let nu = BigRational::from_integer(nu.into());
    exact_decimal("9033.8") * (&nu + BigRational::from_integer(2.into())) / (nu - exact_decimal("0.0005"))
}

/// The same `a` bound with the constant from [`lm_threshold`]; `δ` is
/// taken at its largest value over `a >= 1` (`a = 1`).
pub fn derived_a_bound(nu: u64, policy: PrecisionPolicy) -> Result<BigRational> {
    if nu < 2 {
        return Err(Error::domain(format!("ν = {nu} must be at least 2")));
    }
    let bits = policy.start;
    let log_alpha = alpha(&1.into(), &96.into(), bits)?.ln()?;
    let delta = lm_delta(&log_alpha, nu)?;
    let x = BigRational::from_integer(lm_threshold(&delta, policy)?);
    let nu = BigRational::from_integer(nu.into());
    let k = x / exact_decimal("1.16");
    Ok(k * (&nu + BigRational::from_integer(2.into())) / (nu - exact_decimal("0.0005")))
}

/// Checks that `b` is a pair partner of both `a` and `a+1` before bounds
/// that rely on `s` and `t` being integers.
pub fn require_pair_context(a: &Integer, b: &Integer) -> Result<()> {
    for k in [a.clone(), a + 1] {
        if perfect_square_root(&(&k * b + 4)).is_none() {
            return Err(Error::domain(format!("{{{k}, {b}}} is not a D(4)-pair")));
        }
    }
    Ok(())
}

/// Every bound that applies to `(a, b)`, as records.
pub fn bound_report(a: &Integer, b: &Integer, policy: PrecisionPolicy) -> Result<Vec<BoundRecord>> {
    let bits = policy.start;
    let ins = |extra: &[(&'static str, String)]| -> Vec<(&'static str, String)> {
        let mut v = vec![("a", a.to_string()), ("b", b.to_string())];
        v.extend(extra.iter().cloned());
        v
    };
    let mut out = Vec::new();
    if let Ok(g) = m_lower_bound(a, b, bits) {
        out.push(BoundRecord::new("m_lower_bound", &ins(&[]), Some(&g)));
    }
    let z = z_log_upper_bound(a, b, bits)?;
    out.push(
        BoundRecord::new("z_log_upper_bound", &ins(&[]), z.as_ref())
            .with_verdict(if z.is_some() { "finite" } else { "vacuous" }),
    );
    if let Ok(b2) = b_nu(a, 2) {
        if b >= &b2 {
            let m = hypergeometric_margin(a, b, bits)?;
            let e = hypergeometric_eliminates(a, b, policy)?;
            out.push(
                BoundRecord::new("hypergeometric_rhs", &ins(&[]), m.rhs.as_ref())
                    .with_verdict(if e { "eliminated" } else { "survives" }),
            );
        }
    }
    let n: Integer = a * (a + 1) * b;
    if let Ok(r) = rickert_lambda(a, &n, policy) {
        out.push(BoundRecord::new("rickert_lambda", &ins(&[("N", n.to_string())]), Some(&r.lambda)).with_verdict("lambda_below_2"));
    }
    if b >= &Integer::from(96) {
        let m = sextuple_m_bound(b, policy)?;
        let r = CertifiedReal::from_integer(&m, bits);
        out.push(BoundRecord::new("sextuple_m_bound", &ins(&[]), Some(&r)).with_verdict(m.to_string()));
    }
    if b == &(64 * a + 32) {
        for nu in [2u64, 4] {
            let bb = b1_case_m_upper(a, nu, policy)?;
            let i = ins(&[("nu", nu.to_string())]);
            out.push(BoundRecord::new("b1_m_upper_paper", &i, Some(&bb.paper)));
            out.push(
                BoundRecord::new("b1_m_upper_derived", &i, Some(&bb.derived))
                    .with_verdict(format!("threshold={}", bb.threshold)),
            );
        }
    }
    Ok(out)
}

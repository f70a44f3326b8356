//! Pellian equations attached to a pair `{a, b}` for which `{a+1, b}` is
//! also a D(4)-pair, and the recurrences `v_m`, `w_n` whose common values
//! are the `z` with `bc + 4 = z^2`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::{perfect_square_root, CertifiedReal, Integer, PrecisionPolicy};
use crate::error::{Error, Result};

/// The sign `ε` of the fundamental solutions `z0 = z1 = 2ε`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Epsilon {
    Minus,
    Plus,
}

impl Epsilon {
    pub const BOTH: [Epsilon; 2] = [Epsilon::Minus, Epsilon::Plus];

    pub fn value(self) -> i64 {
        match self {
            Epsilon::Minus => -1,
            Epsilon::Plus => 1,
        }
    }

    pub fn from_value(v: i64) -> Result<Self> {
        match v {
            -1 => Ok(Epsilon::Minus),
            1 => Ok(Epsilon::Plus),
            _ => Err(Error::domain(format!("epsilon must be ±1, got {v}"))),
        }
    }
}

impl fmt::Display for Epsilon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:+}", self.value())
    }
}

impl Serialize for Epsilon {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_i64(self.value())
    }
}

impl<'de> Deserialize<'de> for Epsilon {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = i64::deserialize(d)?;
        Epsilon::from_value(v).map_err(serde::de::Error::custom)
    }
}

/// `(a, b)` together with `s = sqrt(ab+4)`, `t = sqrt((a+1)b+4)` and a sign.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairContext {
    a: Integer,
    b: Integer,
    s: Integer,
    t: Integer,
    epsilon: Epsilon,
}

impl PairContext {
    pub fn new(a: &Integer, b: &Integer, epsilon: Epsilon) -> Result<Self> {
        if !a.is_positive() || b <= &(a + 1) {
            return Err(Error::domain(format!("need 0 < a and a + 1 < b, got a={a} b={b}")));
        }
        let s = perfect_square_root(&(a * b + 4))
            .ok_or_else(|| Error::domain(format!("{{{a}, {b}}} is not a D(4)-pair")))?;
        let t = perfect_square_root(&((a + 1) * b + 4))
            .ok_or_else(|| Error::domain(format!("{{{}, {b}}} is not a D(4)-pair", a + 1)))?;
        Ok(PairContext {
            a: a.clone(),
            b: b.clone(),
            s,
            t,
            epsilon,
        })
    }

    pub fn from_u64(a: u64, b: u64, epsilon: Epsilon) -> Result<Self> {
        Self::new(&a.into(), &b.into(), epsilon)
    }

    pub fn with_epsilon(&self, epsilon: Epsilon) -> Self {
        PairContext {
            epsilon,
            ..self.clone()
        }
    }

    pub fn a(&self) -> &Integer {
        &self.a
    }
    pub fn b(&self) -> &Integer {
        &self.b
    }
    pub fn s(&self) -> &Integer {
        &self.s
    }
    pub fn t(&self) -> &Integer {
        &self.t
    }
    pub fn epsilon(&self) -> Epsilon {
        self.epsilon
    }

    fn side(&self, which: Which) -> (Integer, &Integer) {
        match which {
            Which::V => (self.a.clone(), &self.s),
            Which::W => (&self.a + 1, &self.t),
        }
    }
}

/// Selects the `v` sequence (built on `a`, `s`) or the `w` sequence (on `a+1`, `t`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Which {
    V,
    W,
}

/// `s_0 = 2`, `s_1 = 8a + 2`, `s_{k+2} = 2(2a+1) s_{k+1} - s_k`.
pub fn s_sequence(a: &Integer, count: usize) -> Vec<Integer> {
    let mult: Integer = 2 * (2 * a + 1);
    let mut out = Vec::with_capacity(count);
    let (mut prev, mut cur) = (Integer::from(2), 8 * a + 2);
    for _ in 0..count {
        out.push(prev.clone());
        let next = &mult * &cur - &prev;
        prev = std::mem::replace(&mut cur, next);
    }
    out
}

/// `b_ν = (s_ν^2 - 4) / a`, the ν-th `b` for which `{a, b}` and `{a+1, b}`
/// are both D(4)-pairs.
pub fn b_nu(a: &Integer, nu: usize) -> Result<Integer> {
    if !a.is_positive() || nu == 0 {
        return Err(Error::domain(format!("b_nu needs a >= 1 and nu >= 1, got a={a} nu={nu}")));
    }
    let s = s_sequence(a, nu + 1).pop().unwrap();
    let sq: Integer = &s * &s - 4;
    let (q, r) = sq.div_rem(a);
    debug_assert!(r.is_zero());
    Ok(q)
}

pub fn b_nu_u64(a: u64, nu: usize) -> Integer {
    b_nu(&a.into(), nu).expect("a >= 1 and nu >= 1")
}

/// Which of the two Pellian equations a fundamental solution belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Equation {
    /// `a z^2 - b x^2 = 4(a - b)`
    First,
    /// `(a+1) z^2 - b y^2 = 4(a + 1 - b)`
    Second,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FundamentalSolution {
    #[serde(with = "crate::serde_int")]
    pub z0: Integer,
    /// `x0` for the first equation, `y1` for the second.
    #[serde(with = "crate::serde_int")]
    pub x0: Integer,
    pub equation: Equation,
}

/// Every solution of the chosen equation inside the box where fundamental
/// solutions live: `1 <= x0`, `x0^2 (s-2) < k(b-k)` and
/// `z0^2 k < (s-2)(b-k)`, with `(k, s) = (a, s)` or `(a+1, t)`.
pub fn fundamental_solutions(
    a: &Integer,
    b: &Integer,
    which: Equation,
) -> Result<Vec<FundamentalSolution>> {
    let k = match which {
        Equation::First => a.clone(),
        Equation::Second => a + 1,
    };
    if !k.is_positive() || b <= &k {
        return Err(Error::domain(format!("fundamental box is empty unless b > {k}, got b={b}")));
    }
    let root = perfect_square_root(&(&k * b + 4))
        .ok_or_else(|| Error::domain(format!("{{{k}, {b}}} is not a D(4)-pair")))?;
    let gap: Integer = &root - 2;
    let span: Integer = b - &k;
    let x_cap = &k * &span;
    let z_cap = &gap * &span;
    let rhs: Integer = 4 * (&k - b);

    let mut out = Vec::new();
    let mut x = Integer::one();
    while &x * &x * &gap < x_cap {
        let (z2, rem) = (b * &x * &x + &rhs).div_rem(&k);
        if rem.is_zero() && z2.is_positive() && &z2 * &k < z_cap {
            if let Some(z) = perfect_square_root(&z2) {
                for z0 in [-z.clone(), z] {
                    out.push(FundamentalSolution {
                        z0,
                        x0: x.clone(),
                        equation: which,
                    });
                }
            }
        }
        x += 1;
    }
    Ok(out)
}

/// Walks a positive solution `(z, x)` of `k z^2 - b x^2 = 4(k - b)` down by
/// the unit `(r - √(kb))/2` while `x` stays positive and keeps shrinking.
///
/// The result is the representative with least positive `x` below the
/// starting point. It satisfies the fundamental box bounds up to equality;
/// boundary cases such as `(±2, 2)` for `{1, 5}` sit exactly on them.
pub fn descend_to_fundamental(
    a: &Integer,
    b: &Integer,
    which: Equation,
    z: &Integer,
    x: &Integer,
) -> Result<FundamentalSolution> {
    let k = match which {
        Equation::First => a.clone(),
        Equation::Second => a + 1,
    };
    if !x.is_positive() || &k * z * z - b * x * x != 4 * (&k - b) {
        return Err(Error::domain(format!("({z}, {x}) is not a positive solution for k={k}, b={b}")));
    }
    let root = perfect_square_root(&(&k * b + 4))
        .ok_or_else(|| Error::domain(format!("{{{k}, {b}}} is not a D(4)-pair")))?;
    let (mut z, mut x) = (z.clone(), x.clone());
    loop {
        let nz: Integer = (&root * &z - b * &x) / 2;
        let nx: Integer = (&root * &x - &k * &z) / 2;
        if !nx.is_positive() || nx >= x {
            break;
        }
        (z, x) = (nz, nx);
    }
    Ok(FundamentalSolution { z0: z, x0: x, equation: which })
}

/// Whether a solution lies in the closed fundamental box.
pub fn in_closed_box(a: &Integer, b: &Integer, f: &FundamentalSolution) -> bool {
    let k = match f.equation {
        Equation::First => a.clone(),
        Equation::Second => a + 1,
    };
    let Some(root) = perfect_square_root(&(&k * b + 4)) else {
        return false;
    };
    let gap: Integer = root - 2;
    let span: Integer = b - &k;
    f.x0.is_positive()
        && &f.x0 * &f.x0 * &gap <= &k * &span
        && !f.z0.is_zero()
        && &f.z0 * &f.z0 * &k <= &gap * &span
}

/// Iterator over `(index, value)` of a recurrence `u_{k+2} = mult u_{k+1} - u_k`.
/// Holds only the last two terms.
#[derive(Debug, Clone)]
pub struct Recurrence {
    index: u64,
    cur: Integer,
    next: Integer,
    mult: Integer,
}

impl Iterator for Recurrence {
    type Item = (u64, Integer);

    fn next(&mut self) -> Option<Self::Item> {
        let after = &self.mult * &self.next - &self.cur;
        let cur = std::mem::replace(&mut self.cur, std::mem::replace(&mut self.next, after));
        let i = self.index;
        self.index += 1;
        Some((i, cur))
    }
}

/// The sequences `v_0 = 2ε, v_1 = εs + b, v_{m+2} = s v_{m+1} - v_m` and
/// `w_0 = 2ε, w_1 = εt + b, w_{n+2} = t w_{n+1} - w_n`.
#[derive(Debug, Clone)]
pub struct SequencePair {
    context: PairContext,
}

impl SequencePair {
    pub fn context(&self) -> &PairContext {
        &self.context
    }

    pub fn sequence(&self, which: Which) -> Recurrence {
        let (_, root) = self.context.side(which);
        let e = self.context.epsilon.value();
        Recurrence {
            index: 0,
            cur: Integer::from(2 * e),
            next: root * e + &self.context.b,
            mult: root.clone(),
        }
    }

    pub fn v(&self) -> Recurrence {
        self.sequence(Which::V)
    }

    pub fn w(&self) -> Recurrence {
        self.sequence(Which::W)
    }

    /// Term `index` of the chosen sequence, by unrolling the recurrence.
    pub fn term(&self, which: Which, index: u64) -> Integer {
        self.sequence(which).nth(index as usize).unwrap().1
    }
}

pub fn sequence_pair(a: &Integer, b: &Integer, epsilon: Epsilon) -> Result<SequencePair> {
    Ok(SequencePair {
        context: PairContext::new(a, b, epsilon)?,
    })
}

/// Enclosure of the closed form
/// `((ε√k + √b)/√k) ρ^i + ((ε√k - √b)/√k) ρ̄^i`, `ρ = (r + √(kb))/2`, `ρ̄ = 1/ρ`.
pub fn closed_form_enclosure(
    ctx: &PairContext,
    which: Which,
    index: u64,
    bits: u32,
) -> Result<CertifiedReal> {
    let (k, root) = ctx.side(which);
    let e = CertifiedReal::from_i64(ctx.epsilon.value(), bits);
    let sk = CertifiedReal::from_integer(&k, bits).sqrt()?;
    let sb = CertifiedReal::from_integer(&ctx.b, bits).sqrt()?;
    let skb = CertifiedReal::from_integer(&(&k * &ctx.b), bits).sqrt()?;
    let r = CertifiedReal::from_integer(root, bits);
    let two = CertifiedReal::from_i64(2, bits);
    let rho = (&r + &skb).checked_div(&two)?;
    let rho_bar = (&r - &skb).checked_div(&two)?;
    let esk = &e * &sk;
    let c1 = (&esk + &sb).checked_div(&sk)?;
    let c2 = (&esk - &sb).checked_div(&sk)?;
    let i = index as i64;
    Ok(&(&c1 * &rho.powi(i)?) + &(&c2 * &rho_bar.powi(i)?))
}

/// `v_m` from the closed form, rounded to the unique integer in an enclosure
/// of radius below 1/2.
pub fn closed_form_v(ctx: &PairContext, m: u64, policy: PrecisionPolicy) -> Result<Integer> {
    closed_form_term(ctx, Which::V, m, policy)
}

pub fn closed_form_term(
    ctx: &PairContext,
    which: Which,
    index: u64,
    policy: PrecisionPolicy,
) -> Result<Integer> {
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    policy.escalate("closed form does not resolve to an integer", |bits| {
        let x = closed_form_enclosure(ctx, which, index, bits)?;
        Ok(if x.radius() < half { x.unique_integer() } else { None })
    })
}

/// The residue of term `index` modulo `b^2`, from the parity formulas
///
/// ```text
/// v_{2m}   ≡ 2ε + b(aεm² + sm)
/// v_{2m+1} ≡ εs + b(½asε m(m+1) + 2m + 1)
/// ```
///
/// and the same with `(a+1, t)` for `w`.
pub fn congruence_class_mod_b2(ctx: &PairContext, which: Which, index: u64) -> Integer {
    let (k, root) = ctx.side(which);
    let b = &ctx.b;
    let e = Integer::from(ctx.epsilon.value());
    let m = Integer::from(index / 2);
    let raw: Integer = if index % 2 == 0 {
        2 * &e + b * (&k * &e * &m * &m + root * &m)
    } else {
        let half_mm1 = &m * (&m + 1) / 2;
        &e * root + b * (&k * root * &e * half_mm1 + 2 * &m + 1)
    };
    raw.mod_floor(&(b * b))
}

/// One solution of `v_m = w_n` with `m >= 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Intersection {
    #[serde(with = "crate::serde_int")]
    pub a: Integer,
    #[serde(with = "crate::serde_int")]
    pub b: Integer,
    pub epsilon: Epsilon,
    pub m: u64,
    pub n: u64,
    #[serde(with = "crate::serde_int")]
    pub z: Integer,
    /// `c = (z^2 - 4) / b`.
    #[serde(with = "crate::serde_int")]
    pub derived_c: Integer,
}

/// Which of the index lemmas a found solution satisfies. Contexts with
/// `a = 3` legitimately fail some of them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexChecks {
    pub both_even: bool,
    pub m_greater_than_n: bool,
    /// `n <= m <= 3n/2 + 1`
    pub m_within_n_window: bool,
    /// `m > 0.4672 (a+1)^(-1/2) b^(1/2)`
    pub above_gap_bound: bool,
}

impl IndexChecks {
    pub fn all(&self) -> bool {
        self.both_even && self.m_greater_than_n && self.m_within_n_window && self.above_gap_bound
    }
}

impl Intersection {
    pub fn index_checks(&self) -> IndexChecks {
        let (m, n) = (self.m, self.n);
        let mm = Integer::from(m) * m;
        // m^2 (a+1) 10^8 > 4672^2 b
        let above = mm * (&self.a + 1) * 100_000_000u64 > Integer::from(4672u64 * 4672) * &self.b;
        IndexChecks {
            both_even: m % 2 == 0 && n % 2 == 0,
            m_greater_than_n: m > n,
            m_within_n_window: n <= m && 2 * m <= 3 * n + 2,
            above_gap_bound: above,
        }
    }
}

/// Every `v_m = w_n` with `1 <= m <= m_max`, for both signs of `ε`, found by
/// merging the two increasing integer sequences.
pub fn find_intersections(a: &Integer, b: &Integer, m_max: u64) -> Result<Vec<Intersection>> {
    let base = PairContext::new(a, b, Epsilon::Plus)?;
    let mut out = Vec::new();
    for eps in Epsilon::BOTH {
        let pair = SequencePair {
            context: base.with_epsilon(eps),
        };
        let mut w = pair.w().skip(1).peekable();
        for (m, v) in pair.v().skip(1).take(m_max as usize) {
            while w.peek().is_some_and(|(_, x)| *x < v) {
                w.next();
            }
            if let Some((n, x)) = w.peek() {
                if *x == v {
                    let c = (&v * &v - 4) / b;
                    out.push(Intersection {
                        a: a.clone(),
                        b: b.clone(),
                        epsilon: eps,
                        m,
                        n: *n,
                        z: v.clone(),
                        derived_c: c,
                    });
                }
            }
        }
    }
    out.sort_by(|x, y| (x.m, x.n, x.epsilon).cmp(&(y.m, y.n, y.epsilon)));
    Ok(out)
}

/// A value `z` shared by the orbits of two fundamental solutions, giving
/// `c = (z^2 - 4)/b` with `{a, b, c}` and `{a+1, b, c}` both triples.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneralIntersection {
    #[serde(with = "crate::serde_int")]
    pub a: Integer,
    #[serde(with = "crate::serde_int")]
    pub b: Integer,
    #[serde(with = "crate::serde_int")]
    pub z0: Integer,
    #[serde(with = "crate::serde_int")]
    pub z1: Integer,
    pub m: u64,
    pub n: u64,
    #[serde(with = "crate::serde_int")]
    pub z: Integer,
    #[serde(with = "crate::serde_int")]
    pub c: Integer,
}

fn orbit(root: &Integer, b: &Integer, f: &FundamentalSolution, count: u64) -> Vec<(u64, Integer)> {
    let v1: Integer = (root * &f.z0 + b * &f.x0) / 2;
    let rec = Recurrence {
        index: 0,
        cur: f.z0.clone(),
        next: v1,
        mult: root.clone(),
    };
    rec.take(count as usize + 1).collect()
}

/// Every `z > 2` with `bc + 4 = z^2`, `c > 0`, lying on an orbit of each
/// equation, over all fundamental solutions in the closed box (including
/// `z0 = 0`), indices up to `m_max`. Unlike [`find_intersections`] this does
/// not assume `z0 = z1 = ±2`.
pub fn find_intersections_general(a: &Integer, b: &Integer, m_max: u64) -> Result<Vec<GeneralIntersection>> {
    let ctx = PairContext::new(a, b, Epsilon::Plus)?;
    let closed = |which: Equation| -> Vec<FundamentalSolution> {
        let k = match which {
            Equation::First => a.clone(),
            Equation::Second => a + 1,
        };
        let root = perfect_square_root(&(&k * b + 4)).unwrap();
        let gap: Integer = root - 2;
        let span: Integer = b - &k;
        let mut out = Vec::new();
        let mut x = Integer::one();
        while &x * &x * &gap <= &k * &span {
            let num: Integer = b * &x * &x + 4 * (&k - b);
            let (z2, rem) = num.div_rem(&k);
            if rem.is_zero() && !z2.is_negative() && &z2 * &k <= &gap * &span {
                if let Some(z) = perfect_square_root(&z2) {
                    out.push(FundamentalSolution { z0: z.clone(), x0: x.clone(), equation: which });
                    if !z.is_zero() {
                        out.push(FundamentalSolution { z0: -z, x0: x.clone(), equation: which });
                    }
                }
            }
            x += 1;
        }
        out
    };
    let mut found = std::collections::BTreeMap::new();
    let first = closed(Equation::First);
    let second = closed(Equation::Second);
    for f in &first {
        let vs = orbit(ctx.s(), b, f, m_max);
        for g in &second {
            let ws: std::collections::HashMap<Integer, u64> =
                orbit(ctx.t(), b, g, m_max).into_iter().map(|(i, w)| (w, i)).collect();
            for (m, v) in &vs {
                let Some(&n) = ws.get(v) else { continue };
                if v <= &Integer::from(2) {
                    continue;
                }
                let num: Integer = v * v - 4;
                let (c, rem) = num.div_rem(b);
                if !rem.is_zero() || !c.is_positive() || &c == a || c == a + 1 || &c == b {
                    continue;
                }
                found.entry(v.clone()).or_insert_with(|| GeneralIntersection {
                    a: a.clone(),
                    b: b.clone(),
                    z0: f.z0.clone(),
                    z1: g.z0.clone(),
                    m: *m,
                    n,
                    z: v.clone(),
                    c,
                });
            }
        }
    }
    Ok(found.into_values().collect())
}

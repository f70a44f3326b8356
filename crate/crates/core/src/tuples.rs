//! D(4)-tuples, their square-root witnesses, and the regular extensions
//! `d+` and `d-` of a triple.

use std::fmt;
use std::io::{BufRead, Write};
use std::sync::Arc;

use num_integer::Integer as _;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::arith::{perfect_square_root, Integer};
use crate::error::{Error, Result};

const N: i64 = 4;

/// Root of `xy + n` when it is a perfect square.
fn product_shift_root(x: &Integer, y: &Integer, n: i64) -> Option<Integer> {
    perfect_square_root(&(x * y + n))
}

fn check_positive_distinct(xs: &[Integer]) -> Result<Vec<Integer>> {
    if let Some(x) = xs.iter().find(|x| !x.is_positive()) {
        return Err(Error::domain(format!("tuple elements must be positive, got {x}")));
    }
    let mut sorted = xs.to_vec();
    sorted.sort();
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::domain(format!("duplicate tuple element {}", w[0])));
    }
    Ok(sorted)
}

/// `Some(r)` with `r^2 = ab + 4` if `{a, b}` is a D(4)-pair.
pub fn is_d4_pair(a: &Integer, b: &Integer) -> Result<Option<Integer>> {
    check_positive_distinct(&[a.clone(), b.clone()])?;
    Ok(product_shift_root(a, b, N))
}

/// Whether every pair of `xs` is a D(4)-pair.
pub fn is_d4_tuple(xs: &[Integer]) -> Result<bool> {
    let xs = check_positive_distinct(xs)?;
    for (i, x) in xs.iter().enumerate() {
        for y in &xs[i + 1..] {
            if product_shift_root(x, y, N).is_none() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// A D(4)-triple `a < b < c` with its three witnesses.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DTriple {
    a: Integer,
    b: Integer,
    c: Integer,
    r_ab: Integer,
    r_ac: Integer,
    r_bc: Integer,
}

impl DTriple {
    /// Validates a triple; the elements may be given in any order.
    pub fn new(x: Integer, y: Integer, z: Integer) -> Result<Self> {
        let v = check_positive_distinct(&[x, y, z])?;
        let [a, b, c]: [Integer; 3] = v.try_into().unwrap();
        let root = |x: &Integer, y: &Integer| {
            product_shift_root(x, y, N)
                .ok_or_else(|| Error::domain(format!("{x}*{y}+4 is not a perfect square")))
        };
        Ok(DTriple {
            r_ab: root(&a, &b)?,
            r_ac: root(&a, &c)?,
            r_bc: root(&b, &c)?,
            a,
            b,
            c,
        })
    }

    pub fn from_u64(a: u64, b: u64, c: u64) -> Result<Self> {
        Self::new(a.into(), b.into(), c.into())
    }

    pub fn a(&self) -> &Integer {
        &self.a
    }
    pub fn b(&self) -> &Integer {
        &self.b
    }
    pub fn c(&self) -> &Integer {
        &self.c
    }
    pub fn r_ab(&self) -> &Integer {
        &self.r_ab
    }
    pub fn r_ac(&self) -> &Integer {
        &self.r_ac
    }
    pub fn r_bc(&self) -> &Integer {
        &self.r_bc
    }

    pub fn elements(&self) -> [Integer; 3] {
        [self.a.clone(), self.b.clone(), self.c.clone()]
    }
}

impl fmt::Display for DTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}, {}, {}}}", self.a, self.b, self.c)
    }
}

/// A D(4)-quadruple in ascending order; witnesses follow the pair order
/// `(0,1), (0,2), (0,3), (1,2), (1,3), (2,3)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DQuadruple {
    elements: [Integer; 4],
    witnesses: [Integer; 6],
}

impl DQuadruple {
    pub fn new(xs: [Integer; 4]) -> Result<Self> {
        let v = check_positive_distinct(&xs)?;
        let mut witnesses = Vec::with_capacity(6);
        for i in 0..4 {
            for j in i + 1..4 {
                let r = product_shift_root(&v[i], &v[j], N).ok_or_else(|| {
                    Error::domain(format!("{}*{}+4 is not a perfect square", v[i], v[j]))
                })?;
                witnesses.push(r);
            }
        }
        Ok(DQuadruple {
            elements: v.try_into().unwrap(),
            witnesses: witnesses.try_into().unwrap(),
        })
    }

    pub fn elements(&self) -> &[Integer; 4] {
        &self.elements
    }

    pub fn witnesses(&self) -> &[Integer; 6] {
        &self.witnesses
    }
}

/// Both regular extensions of a triple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegularExtension {
    pub d_plus: Integer,
    /// Zero exactly when `c = a + b + 2 r_ab`.
    pub d_minus: Integer,
    pub triple: DTriple,
}

/// `d± = a + b + c + (abc ± r_ab r_ac r_bc) / 2`.
///
/// The square root of `(ab+4)(ac+4)(bc+4)` is the product of the witnesses,
/// so both values are computed exactly.
pub fn regular_extensions(t: &DTriple) -> RegularExtension {
    let sum = &t.a + &t.b + &t.c;
    let abc = &t.a * &t.b * &t.c;
    let root = &t.r_ab * &t.r_ac * &t.r_bc;
    let half = |v: Integer| {
        debug_assert!(v.is_even(), "abc ± r_ab r_ac r_bc must be even");
        v / 2
    };
    RegularExtension {
        d_plus: &sum + half(&abc + &root),
        d_minus: &sum + half(&abc - &root),
        triple: t.clone(),
    }
}

/// `(b + c - a - d)^2 == (ad + 4)(bc + 4)`, evaluated exactly.
pub fn regularity_relation_holds(a: &Integer, d: &Integer, b: &Integer, c: &Integer) -> bool {
    let lhs = b + c - a - d;
    &lhs * &lhs == (a * d + N) * (b * c + N)
}

/// All D(4)-pairs `x < y <= limit`, indexed by the smaller element.
///
/// Pairs come from `xy = r^2 - 4 = (r - 2)(r + 2)`: for each `r` the
/// divisors of `r^2 - 4` are generated from the factorizations of `r - 2`
/// and `r + 2`.
#[derive(Debug, Clone)]
pub struct PairTable {
    limit: u64,
    /// `partners[x]` holds `(y, r)` with `x < y`, `xy + 4 = r^2`, sorted by `y`.
    partners: Vec<Vec<(u64, u64)>>,
}

impl PairTable {
    pub fn build(limit: u64) -> Self {
        let n = limit as usize;
        let mut partners: Vec<Vec<(u64, u64)>> = vec![Vec::new(); n + 1];
        if limit >= 2 {
            let spf = smallest_prime_factors(n + 3);
            let max_prod = (limit as u128) * (limit as u128 - 1);
            let mut r: u64 = 3;
            loop {
                let prod = (r as u128) * (r as u128) - 4;
                if prod > max_prod {
                    break;
                }
                let mut factors = factor(r - 2, &spf);
                for (p, e) in factor(r + 2, &spf) {
                    match factors.iter_mut().find(|f| f.0 == p) {
                        Some(f) => f.1 += e,
                        None => factors.push((p, e)),
                    }
                }
                for_each_divisor(&factors, |x| {
                    let x = x as u128;
                    if x * x < prod {
                        let y = prod / x;
                        if y <= limit as u128 {
                            partners[x as usize].push((y as u64, r));
                        }
                    }
                });
                r += 1;
            }
            for p in &mut partners {
                p.sort_unstable();
            }
        }
        PairTable { limit, partners }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Partners `y > x` of `x` with their witnesses.
    pub fn partners(&self, x: u64) -> &[(u64, u64)] {
        self.partners.get(x as usize).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Witness of `{x, y}` for `x < y <= limit`.
    pub fn witness(&self, x: u64, y: u64) -> Option<u64> {
        let p = self.partners(x);
        p.binary_search_by_key(&y, |e| e.0).ok().map(|i| p[i].1)
    }

    /// Triples whose smallest element is `a`, ordered by `(b, c)`.
    pub fn triples_with_smallest(&self, a: u64) -> Vec<DTriple> {
        let p = self.partners(a);
        let mut out = Vec::new();
        for (i, &(b, r_ab)) in p.iter().enumerate() {
            for &(c, r_ac) in &p[i + 1..] {
                if let Some(r_bc) = self.witness(b, c) {
                    out.push(DTriple {
                        a: a.into(),
                        b: b.into(),
                        c: c.into(),
                        r_ab: r_ab.into(),
                        r_ac: r_ac.into(),
                        r_bc: r_bc.into(),
                    });
                }
            }
        }
        out
    }
}

fn smallest_prime_factors(n: usize) -> Vec<u32> {
    let mut spf = vec![0u32; n + 1];
    for i in 2..=n {
        if spf[i] == 0 {
            let mut j = i;
            while j <= n {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    spf
}

fn factor(mut m: u64, spf: &[u32]) -> Vec<(u64, u32)> {
    let mut out: Vec<(u64, u32)> = Vec::new();
    while m > 1 {
        let p = spf[m as usize] as u64;
        let mut e = 0;
        while m % p == 0 {
            m /= p;
            e += 1;
        }
        out.push((p, e));
    }
    out
}

fn for_each_divisor(factors: &[(u64, u32)], mut f: impl FnMut(u64)) {
    fn go(factors: &[(u64, u32)], acc: u64, f: &mut impl FnMut(u64)) {
        match factors.split_first() {
            None => f(acc),
            Some((&(p, e), rest)) => {
                let mut v = acc;
                for _ in 0..=e {
                    go(rest, v, f);
                    v = v.saturating_mul(p);
                }
            }
        }
    }
    go(factors, 1, &mut f);
}

/// Every D(4)-triple with `c <= limit`, each once, in lexicographic order.
pub fn enumerate_d4_triples(limit: u64) -> impl Iterator<Item = DTriple> + Send {
    let table = Arc::new(PairTable::build(limit));
    (1..=limit).flat_map(move |a| table.triples_with_smallest(a).into_iter())
}

/// Formats a tuple as one line of space-separated ascending integers.
pub fn format_tuple(xs: &[Integer]) -> String {
    let mut v = xs.to_vec();
    v.sort();
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

/// Parses one line of the tuple text format; the result is ascending.
pub fn parse_tuple_line(line: &str) -> Result<Vec<Integer>> {
    let xs = line
        .split_whitespace()
        .map(|tok| {
            tok.parse::<Integer>()
                .map_err(|_| Error::domain(format!("not an integer: {tok:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    check_positive_distinct(&xs)
}

pub fn write_tuples<'a, W: Write>(
    mut out: W,
    tuples: impl IntoIterator<Item = &'a [Integer]>,
) -> Result<()> {
    for t in tuples {
        writeln!(out, "{}", format_tuple(t))?;
    }
    Ok(())
}

/// Reads the tuple text format, skipping blank lines.
pub fn read_tuples<R: BufRead>(input: R) -> Result<Vec<Vec<Integer>>> {
    let mut out = Vec::new();
    for line in input.lines() {
        let line = line?;
        if !line.trim().is_empty() {
            out.push(parse_tuple_line(&line)?);
        }
    }
    Ok(out)
}

/// A pairwise witness row, as printed by the `check` command.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairWitness {
    #[serde(with = "crate::serde_int")]
    pub x: Integer,
    #[serde(with = "crate::serde_int")]
    pub y: Integer,
    #[serde(with = "crate::serde_int")]
    pub product_plus_4: Integer,
    /// `None` when `xy + 4` is not a square.
    pub root: Option<String>,
}

pub fn witness_table(xs: &[Integer]) -> Result<Vec<PairWitness>> {
    let xs = check_positive_distinct(xs)?;
    let mut rows = Vec::new();
    for (i, x) in xs.iter().enumerate() {
        for y in &xs[i + 1..] {
            rows.push(PairWitness {
                x: x.clone(),
                y: y.clone(),
                product_plus_4: x * y + N,
                root: product_shift_root(x, y, N).map(|r| r.to_string()),
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_integer::Roots;
    use num_traits::Zero;
    use proptest::prelude::*;

    fn int(v: i64) -> Integer {
        Integer::from(v)
    }

    fn ints(v: &[i64]) -> Vec<Integer> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn pair_examples() {
        assert_eq!(is_d4_pair(&int(3), &int(4)).unwrap(), Some(int(4)));
        assert_eq!(is_d4_pair(&int(1), &int(5)).unwrap(), Some(int(3)));
        assert_eq!(is_d4_pair(&int(1), &int(2)).unwrap(), None);
        assert!(is_d4_pair(&int(0), &int(2)).is_err());
        assert!(is_d4_pair(&int(2), &int(2)).is_err());
    }

    #[test]
    fn only_consecutive_pair_is_3_4() {
        let consecutive: Vec<i64> = (1..100_000)
            .filter(|&a| is_d4_pair(&int(a), &int(a + 1)).unwrap().is_some())
            .collect();
        assert_eq!(consecutive, vec![3]);
    }

    #[test]
    fn tuple_examples() {
        assert!(is_d4_tuple(&ints(&[3, 4, 15, 224])).unwrap());
        assert!(is_d4_tuple(&ints(&[1, 5, 12, 96])).unwrap());
        assert!(!is_d4_tuple(&ints(&[1, 2, 3])).unwrap());
        assert!(is_d4_tuple(&ints(&[1, 5, 5])).is_err());
    }

    #[test]
    fn extensions_of_1_5_12() {
        let t = DTriple::from_u64(1, 5, 12).unwrap();
        let e = regular_extensions(&t);
        assert_eq!(e.d_plus, int(96));
        assert_eq!(e.d_minus, int(0));
        // Independent witnesses for {1,5,12,96}.
        assert_eq!(int(96) + 4, int(10 * 10));
        assert_eq!(int(5 * 96) + 4, int(22 * 22));
        assert_eq!(int(12 * 96) + 4, int(34 * 34));
        // Degenerate case: c = a + b + 2r with r = 3.
        assert_eq!(t.c(), &(t.a() + t.b() + 2 * t.r_ab()));
    }

    #[test]
    fn extensions_of_3_4_15() {
        let e = regular_extensions(&DTriple::from_u64(3, 4, 15).unwrap());
        assert_eq!(e.d_plus, int(224));
        // 15 = 3 + 4 + 2*4, so there is no smaller regular partner.
        assert_eq!(e.d_minus, int(0));
    }

    #[test]
    fn down_extension_of_1_5_96() {
        let e = regular_extensions(&DTriple::from_u64(1, 5, 96).unwrap());
        assert_eq!(e.d_minus, int(12));
        // Solve relation (19) for d directly: the only d < 96 that works.
        let solutions: Vec<i64> = (0..96)
            .filter(|&d| regularity_relation_holds(&int(1), &int(d), &int(5), &int(96)))
            .collect();
        assert_eq!(solutions, vec![12]);
    }

    #[test]
    fn relation_examples() {
        assert!(regularity_relation_holds(&int(1), &int(96), &int(5), &int(12)));
        assert!(regularity_relation_holds(&int(1), &int(0), &int(5), &int(12)));
        assert!(!regularity_relation_holds(&int(2), &int(3), &int(5), &int(7)));
    }

    fn brute_force_triples(limit: u64) -> Vec<(u64, u64, u64)> {
        let sq = |n: u64| {
            let r = (n as u128).sqrt();
            r * r == n as u128
        };
        let mut out = Vec::new();
        for a in 1..=limit {
            for b in a + 1..=limit {
                if !sq(a * b + 4) {
                    continue;
                }
                for c in b + 1..=limit {
                    if sq(a * c + 4) && sq(b * c + 4) {
                        out.push((a, b, c));
                    }
                }
            }
        }
        out
    }

    fn as_u64(t: &DTriple) -> (u64, u64, u64) {
        let f = |x: &Integer| u64::try_from(x).unwrap();
        (f(t.a()), f(t.b()), f(t.c()))
    }

    #[test]
    fn enumeration_matches_brute_force() {
        for limit in [3, 4, 12, 100, 1000] {
            let fast: Vec<_> = enumerate_d4_triples(limit).map(|t| as_u64(&t)).collect();
            assert_eq!(fast, brute_force_triples(limit), "limit {limit}");
        }
    }

    #[test]
    fn enumeration_examples() {
        assert!(enumerate_d4_triples(4).next().is_none());
        let small: Vec<_> = enumerate_d4_triples(12).map(|t| as_u64(&t)).collect();
        assert!(small.contains(&(1, 5, 12)));
        let t224: Vec<_> = enumerate_d4_triples(224).map(|t| as_u64(&t)).collect();
        assert!(t224.contains(&(3, 15, 224)));
        assert!(t224.contains(&(4, 15, 224)));
    }

    #[test]
    fn every_triple_extends_regularly() {
        for t in enumerate_d4_triples(3000) {
            let e = regular_extensions(&t);
            let [a, b, c] = t.elements();
            assert!(
                is_d4_tuple(&[a.clone(), b.clone(), c.clone(), e.d_plus.clone()]).unwrap(),
                "{t}"
            );
            assert!(regularity_relation_holds(&a, &e.d_plus, &b, &c));
            assert!(regularity_relation_holds(&a, &e.d_minus, &b, &c));
            assert!(!e.d_minus.is_negative());
            let degenerate = c == &a + &b + 2 * t.r_ab();
            assert_eq!(e.d_minus.is_zero(), degenerate, "{t}");
            if !e.d_minus.is_zero() {
                assert!(e.d_minus < c);
                assert!(is_d4_tuple(&[a.clone(), b.clone(), c.clone(), e.d_minus.clone()]).unwrap());
                let down = DTriple::new(a.clone(), b.clone(), e.d_minus.clone()).unwrap();
                assert_eq!(regular_extensions(&down).d_plus, c);
            }
        }
    }

    #[test]
    fn text_format() {
        let parsed = read_tuples("224 3 15 4\n\n1 5 12 96\n".as_bytes()).unwrap();
        assert_eq!(parsed, vec![ints(&[3, 4, 15, 224]), ints(&[1, 5, 12, 96])]);
        let mut buf = Vec::new();
        write_tuples(&mut buf, parsed.iter().map(Vec::as_slice)).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "3 4 15 224\n1 5 12 96\n");
        assert!(parse_tuple_line("1 x 3").is_err());
        assert!(parse_tuple_line("1 3 3").is_err());
        assert!(parse_tuple_line("0 3").is_err());
    }

    proptest! {
        #[test]
        fn quadruple_from_any_triple(idx in 0usize..200) {
            let triples: Vec<_> = enumerate_d4_triples(500).collect();
            let t = &triples[idx % triples.len()];
            let e = regular_extensions(t);
            let [a, b, c] = t.elements();
            let q = DQuadruple::new([a, b, c, e.d_plus]).unwrap();
            for (k, (i, j)) in [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)].into_iter().enumerate() {
                let w = &q.witnesses()[k];
                prop_assert_eq!(w * w, &q.elements()[i] * &q.elements()[j] + 4);
            }
        }
    }
}

//! Two triples sharing `{b, c}`: the `d_i` identities and the scan that
//! looks for pairs `{a1, b, c}`, `{a2, b, c}` not extending to a quadruple.

use num_integer::Integer as _;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{isqrt, Integer};
use crate::error::{Error, Result};
use crate::tuples::{regular_extensions, regularity_relation_holds, DTriple, PairTable};

/// The two readings of `c = a b d_i + λ_i max{d_i, b}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaReading {
    /// `a` is `a_i`.
    PerIndex,
    /// `a` is `a_1` for both indices.
    Common,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaValue {
    pub reading: LambdaReading,
    pub index: usize,
    /// Exact value as `p/q`.
    pub value: String,
    pub approx: f64,
    pub in_range: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub a1: u64,
    pub a2: u64,
    pub b: u64,
    pub c: u64,
    #[serde(with = "crate::serde_int")]
    pub d1: Integer,
    #[serde(with = "crate::serde_int")]
    pub d2: Integer,
    /// `(b + c - a_i - d_i)^2 = (a_i d_i + 4)(bc + 4)` for both indices.
    pub relation_holds: [bool; 2],
    /// `d_i` equals `d-` of `{a_i, b, c}` from the tuples module.
    pub matches_d_minus: [bool; 2],
    /// `d_i > 0` implies `{a_i, d_i, b, c}` is regular with `c = d+(a_i, b, d_i)`.
    pub c_is_d_plus: [Option<bool>; 2],
    pub lambdas: Vec<LambdaValue>,
    /// `d1 = a2` and `d2 = a1`.
    pub conclusion_holds: bool,
}

impl IdentityReport {
    pub fn reading_holds(&self, reading: LambdaReading) -> bool {
        self.lambdas.iter().filter(|l| l.reading == reading).all(|l| l.in_range)
    }

    /// Every exact identity holds; λ ranges are reported, not required.
    pub fn identities_hold(&self) -> bool {
        self.relation_holds.iter().all(|&x| x)
            && self.matches_d_minus.iter().all(|&x| x)
            && self.c_is_d_plus.iter().all(|x| x.unwrap_or(true))
    }
}

fn root(x: &Integer) -> Result<Integer> {
    let r = isqrt(x)?;
    if &(&r * &r) == x {
        Ok(r)
    } else {
        Err(Error::domain(format!("{x} is not a perfect square")))
    }
}

/// Evaluates the `d_i` identities for triples `{a1, b, c}`, `{a2, b, c}` with
/// `a1 < a2 < b < c < b^3/4`.
pub fn theorem15_identity_check(a1: u64, a2: u64, b: u64, c: u64) -> Result<IdentityReport> {
    if !(0 < a1 && a1 < a2 && a2 < b && b < c) {
        return Err(Error::domain(format!("need 0 < a1 < a2 < b < c, got {a1}, {a2}, {b}, {c}")));
    }
    let (bi, ci) = (Integer::from(b), Integer::from(c));
    if 4 * &ci >= bi.pow(3) {
        return Err(Error::domain(format!("c = {c} is not below b^3/4")));
    }
    let u = root(&(&bi * &ci + 4))?;
    let mut ds = Vec::new();
    let mut relation_holds = [false; 2];
    let mut matches_d_minus = [false; 2];
    let mut c_is_d_plus = [None; 2];
    for (i, &a) in [a1, a2].iter().enumerate() {
        let t = DTriple::from_u64(a, b, c)?;
        let ai = Integer::from(a);
        let r = root(&(&ai * &bi + 4))?;
        let s = root(&(&ai * &ci + 4))?;
        let twice: Integer = &ai * &bi * &ci - &r * &s * &u;
        let d = &ai + &bi + &ci + twice.div_floor(&Integer::from(2));
        relation_holds[i] = twice.is_even() && regularity_relation_holds(&ai, &d, &bi, &ci);
        matches_d_minus[i] = regular_extensions(&t).d_minus == d;
        if d.is_positive() {
            c_is_d_plus[i] = Some(match DTriple::new(ai.clone(), bi.clone(), d.clone()) {
                Ok(inner) => d < ci && regular_extensions(&inner).d_plus == ci,
                Err(_) => false,
            });
        }
        ds.push(d);
    }
    let mut lambdas = Vec::new();
    for reading in [LambdaReading::PerIndex, LambdaReading::Common] {
        for (i, d) in ds.iter().enumerate() {
            let a = match reading {
                LambdaReading::PerIndex => [a1, a2][i],
                LambdaReading::Common => a1,
            };
            let num: Integer = &ci - Integer::from(a) * &bi * d;
            let den = if d > &bi { d.clone() } else { bi.clone() };
            let lam = BigRational::new(num, den);
            let in_range = lam > BigRational::one() && lam < BigRational::from_integer(4.into());
            lambdas.push(LambdaValue {
                reading,
                index: i + 1,
                value: lam.to_string(),
                approx: ratio_f64(&lam),
                in_range,
            });
        }
    }
    let conclusion_holds = ds[0] == Integer::from(a2) && ds[1] == Integer::from(a1);
    let [d1, d2]: [Integer; 2] = ds.try_into().unwrap();
    Ok(IdentityReport {
        a1,
        a2,
        b,
        c,
        d1,
        d2,
        relation_holds,
        matches_d_minus,
        c_is_d_plus,
        lambdas,
        conclusion_holds,
    })
}

fn ratio_f64(q: &BigRational) -> f64 {
    let n: f64 = q.numer().to_string().parse().unwrap_or(f64::NAN);
    let d: f64 = q.denom().to_string().parse().unwrap_or(f64::NAN);
    n / d
}

/// Two triples sharing `{b, c}` with `a1 < a2 < b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QuadrupleCandidate {
    pub a1: u64,
    pub a2: u64,
    pub b: u64,
    pub c: u64,
}

impl QuadrupleCandidate {
    /// `4c < b^3`.
    pub fn in_proved_stratum(&self) -> bool {
        (4 * self.c as u128) < (self.b as u128).pow(3)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjectureScan {
    pub limit: u64,
    /// Cells `(b, c)` with at least two admissible `a`.
    pub cells: usize,
    pub candidates: usize,
    pub confirmed: Vec<QuadrupleCandidate>,
    /// Failures with `4c < b^3`.
    pub violations_below: Vec<QuadrupleCandidate>,
    /// Failures with `4c >= b^3`.
    pub violations_above: Vec<QuadrupleCandidate>,
}

impl ConjectureScan {
    pub fn is_confirmed(&self, a1: u64, a2: u64, b: u64, c: u64) -> bool {
        self.confirmed
            .binary_search(&QuadrupleCandidate { a1, a2, b, c })
            .is_ok()
    }

    pub fn violations(&self) -> usize {
        self.violations_below.len() + self.violations_above.len()
    }
}

/// For every D(4)-pair `{b, c}` with `c <= limit`, collects all `a < b`
/// making a triple and tests every pair `a1 < a2` for `a1 a2 + 4` square.
pub fn conjecture1_scan(limit: u64) -> Result<ConjectureScan> {
    if limit < 12 {
        return Err(Error::domain(format!("scan limit {limit} is below 12")));
    }
    let table = PairTable::build(limit);
    let mut lower: Vec<Vec<u64>> = vec![Vec::new(); limit as usize + 1];
    for x in 1..=limit {
        for &(y, _) in table.partners(x) {
            lower[y as usize].push(x);
        }
    }
    let per_b: Vec<(usize, Vec<QuadrupleCandidate>, Vec<QuadrupleCandidate>)> = (1..=limit)
        .into_par_iter()
        .map(|b| {
            let mut cells = 0;
            let mut ok = Vec::new();
            let mut bad = Vec::new();
            let below_b = &lower[b as usize];
            for &(c, _) in table.partners(b) {
                let common: Vec<u64> = below_b
                    .iter()
                    .copied()
                    .filter(|a| lower[c as usize].binary_search(a).is_ok())
                    .collect();
                if common.len() < 2 {
                    continue;
                }
                cells += 1;
                for (i, &a1) in common.iter().enumerate() {
                    for &a2 in &common[i + 1..] {
                        let q = QuadrupleCandidate { a1, a2, b, c };
                        if table.witness(a1, a2).is_some() {
                            ok.push(q);
                        } else {
                            bad.push(q);
                        }
                    }
                }
            }
            (cells, ok, bad)
        })
        .collect();
    let mut scan = ConjectureScan {
        limit,
        cells: 0,
        candidates: 0,
        confirmed: Vec::new(),
        violations_below: Vec::new(),
        violations_above: Vec::new(),
    };
    for (cells, ok, bad) in per_b {
        scan.cells += cells;
        scan.candidates += ok.len() + bad.len();
        scan.confirmed.extend(ok);
        for q in bad {
            if q.in_proved_stratum() {
                scan.violations_below.push(q);
            } else {
                scan.violations_above.push(q);
            }
        }
    }
    scan.confirmed.sort_unstable();
    scan.violations_below.sort_unstable();
    scan.violations_above.sort_unstable();
    Ok(scan)
}

/// The chain that rules out `a1 d1 != a2 d2` when `d1` is the largest of
/// `b, d1, d2`, evaluated exactly on given witnesses `t1^2 = a1 d1 + 4`:
///
/// ```text
/// 2 t1 < 4 d1/b + 1  =>  d1 > b(a1 b - 1)/4  =>  b + d1 + a1 d1 b > a1^2 b^3/4 + 3b/4
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DominantChain {
    pub premise: bool,
    /// `d1 > b(a1 b - 2)/4`, the bound after squaring.
    pub first_bound: bool,
    /// `t1 >= a1 b / 2`.
    pub t_bound: bool,
    /// `d1 > b(a1 b - 1)/4`.
    pub d_bound: bool,
    /// `b + d1 + a1 d1 b > a1^2 b^3/4 + 3b/4`.
    pub c_bound: bool,
}

impl DominantChain {
    /// The premise implies every later step.
    pub fn implication_holds(&self) -> bool {
        !self.premise || (self.first_bound && self.t_bound && self.d_bound && self.c_bound)
    }
}

pub fn dominant_d_chain(a1: u64, b: u64, d1: u64, t1: u64) -> Result<DominantChain> {
    let (a, b, d, t) = (
        Integer::from(a1),
        Integer::from(b),
        Integer::from(d1),
        Integer::from(t1),
    );
    if a.is_zero() || b.is_zero() || &t * &t != &a * &d + 4 {
        return Err(Error::domain(format!("need a1, b > 0 and t1^2 = a1 d1 + 4, got {a1}, {b}, {d1}, {t1}")));
    }
    // all sides scaled by 4b to stay in integers
    let premise = 2 * &t * &b < 4 * &d + &b;
    let first_bound = 4 * &d > &b * (&a * &b - 2);
    let t_bound = 2 * &t >= &a * &b;
    let d_bound = 4 * &d > &b * (&a * &b - 1);
    let c_low: Integer = &b + &d + &a * &d * &b;
    let c_bound = 4 * c_low > &a * &a * b.pow(3) + 3 * &b;
    Ok(DominantChain {
        premise,
        first_bound,
        t_bound,
        d_bound,
        c_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tuples::enumerate_d4_triples;
    use proptest::prelude::*;
    use std::collections::BTreeMap;

    #[test]
    fn known_quadruple() {
        let r = theorem15_identity_check(3, 4, 15, 224).unwrap();
        assert_eq!((r.d1.clone(), r.d2.clone()), (4.into(), 3.into()));
        assert!(r.identities_hold() && r.conclusion_holds);
        assert!(r.reading_holds(LambdaReading::PerIndex));
        assert!(!r.reading_holds(LambdaReading::Common));
        assert_eq!(r.lambdas[0].value, "44/15");
    }

    #[test]
    fn zero_d_case_still_satisfies_the_relation() {
        // {1, 5, 12} has c = a + b + 2r, so d- vanishes
        let t = DTriple::from_u64(1, 5, 12).unwrap();
        assert!(regular_extensions(&t).d_minus.is_zero());
        assert!(regularity_relation_holds(&1.into(), &0.into(), &5.into(), &12.into()));
        let scan = conjecture1_scan(3000).unwrap();
        for q in scan.confirmed.iter().filter(|q| q.in_proved_stratum()) {
            let r = theorem15_identity_check(q.a1, q.a2, q.b, q.c).unwrap();
            if r.d1.is_zero() || r.d2.is_zero() {
                assert!(r.relation_holds.iter().all(|&x| x), "{q:?}");
            }
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(theorem15_identity_check(4, 3, 15, 224).is_err());
        assert!(theorem15_identity_check(3, 4, 15, 5000).is_err());
        assert!(theorem15_identity_check(1, 2, 15, 224).is_err());
        assert!(conjecture1_scan(11).is_err());
        assert!(dominant_d_chain(1, 5, 3, 2).is_err());
    }

    #[test]
    fn small_scan_finds_the_example() {
        let s = conjecture1_scan(224).unwrap();
        assert!(s.is_confirmed(3, 4, 15, 224));
        assert_eq!(s.violations(), 0);
    }

    #[test]
    fn scan_matches_naive_enumeration() {
        let limit = 600;
        let mut cells: BTreeMap<(u64, u64), Vec<u64>> = BTreeMap::new();
        for t in enumerate_d4_triples(limit) {
            let v: Vec<u64> = t.elements().iter().map(|x| x.to_string().parse().unwrap()).collect();
            cells.entry((v[1], v[2])).or_default().push(v[0]);
        }
        let mut expected = 0;
        for as_ in cells.values() {
            expected += as_.len() * (as_.len() - 1) / 2;
        }
        let s = conjecture1_scan(limit).unwrap();
        assert_eq!(s.candidates, expected);
    }

    #[test]
    fn identities_and_d_minus_agree_on_scanned_data() {
        let s = conjecture1_scan(2000).unwrap();
        let mut per_index = 0;
        let mut common = 0;
        let mut n = 0;
        for q in s.confirmed.iter().filter(|q| q.in_proved_stratum()) {
            let r = theorem15_identity_check(q.a1, q.a2, q.b, q.c).unwrap();
            assert!(r.identities_hold() && r.conclusion_holds, "{q:?}");
            n += 1;
            per_index += r.reading_holds(LambdaReading::PerIndex) as usize;
            common += r.reading_holds(LambdaReading::Common) as usize;
        }
        assert!(n > 0);
        assert!(per_index >= common);
    }

    proptest! {
        #[test]
        fn chain_holds_on_synthetic_witnesses(a1 in 1u64..40, k in 1u64..400, b in 2u64..2000) {
            // t1 = 2 + a1 k gives an integral d1
            let t1 = 2 + a1 * k;
            let d1 = k * (4 + a1 * k);
            let c = dominant_d_chain(a1, b, d1, t1).unwrap();
            prop_assert!(c.implication_holds(), "{:?}", c);
        }

        #[test]
        fn chain_premise_reached(a1 in 1u64..6, b in 2u64..30) {
            // pick t1 just above a1 b / 2 so the premise can hold
            let mut k = b / 2;
            loop {
                let t1 = 2 + a1 * k;
                let d1 = k * (4 + a1 * k);
                let c = dominant_d_chain(a1, b, d1, t1).unwrap();
                if c.premise {
                    prop_assert!(c.implication_holds());
                    break;
                }
                k += 1;
            }
        }
    }
}

//! Baker–Davenport reduction of the bound on `m`.
//!
//! From `0 < Λ < α^(1-2m)`, dividing by `log β`:
//!
//! ```text
//! 0 < mκ - n + μ < A B^(-m),   κ = log α / log β,  μ = log γ / log β,
//!                              A = α / log β,      B = α^2.
//! ```
//!
//! If `q > 6M` is a convergent denominator of `κ` and
//! `ε0 = ||μq|| - M||κq|| > 0`, no solution has
//! `log(Aq/ε0)/log B <= m <= M`.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{CertifiedReal, ContinuedFraction, Integer, PrecisionPolicy, Sign};
use crate::bounds::LinearFormParams;
use crate::error::{Error, Result};
use crate::pell::{find_intersections, Epsilon, Intersection, PairContext};

/// Convergents tried past the first one with `q > 6M` before escalating precision.
pub const EXTRA_CONVERGENTS: usize = 10;

/// Largest index the brute-force oracle accepts.
pub const ORACLE_LIMIT: u64 = 10_000;

#[derive(Debug, Clone)]
pub struct ReductionInstance {
    pub kappa: CertifiedReal,
    pub mu: CertifiedReal,
    pub a_coeff: CertifiedReal,
    pub b_base: CertifiedReal,
    pub m: Integer,
}

impl ReductionInstance {
    pub fn from_parts(
        kappa: CertifiedReal,
        mu: CertifiedReal,
        a_coeff: CertifiedReal,
        b_base: CertifiedReal,
        m: Integer,
    ) -> Result<Self> {
        if !m.is_positive() {
            return Err(Error::domain(format!("the bound M must be positive, got {m}")));
        }
        if a_coeff.sign() != Sign::Positive {
            return Err(Error::domain("A must be certainly positive"));
        }
        if !b_base.certainly_gt(&CertifiedReal::from_i64(1, b_base.precision_bits())) {
            return Err(Error::domain("B must be certainly above 1"));
        }
        Ok(ReductionInstance {
            kappa,
            mu,
            a_coeff,
            b_base,
            m,
        })
    }

    pub fn precision_bits(&self) -> u32 {
        self.kappa.precision_bits()
    }
}

/// Working precision for a bound `M`: at least `2 log2 M + 64` bits.
pub fn bits_for_bound(m: &Integer, policy: PrecisionPolicy) -> u32 {
    let need = 2 * m.bits() + 64;
    policy.start.max(need.min(u32::MAX as u64) as u32)
}

pub fn build_instance(context: &PairContext, m: &Integer, bits: u32) -> Result<ReductionInstance> {
    let p = LinearFormParams::new(context, bits)?;
    let kappa = p.log_alpha.checked_div(&p.log_beta)?;
    let mu = p.log_gamma.checked_div(&p.log_beta)?;
    let a_coeff = p.alpha.checked_div(&p.log_beta)?;
    let b_base = &p.alpha * &p.alpha;
    ReductionInstance::from_parts(kappa, mu, a_coeff, b_base, m.clone())
}

/// One successful reduction step.
#[derive(Debug, Clone)]
pub struct BdStep {
    pub q: Integer,
    pub convergent_index: usize,
    pub eps0: CertifiedReal,
    pub new_m: Integer,
}

fn cf_depth_for(bits: u32) -> usize {
    bits as usize
}

/// Runs the step with the `skip`-th convergent past the first `q > 6M`.
///
/// `Ok(None)` when `ε0` is not certainly positive. A precision error means
/// the certified continued fraction stops before the required convergent.
pub fn bd_step(inst: &ReductionInstance, skip: usize) -> Result<Option<BdStep>> {
    let bits = inst.precision_bits();
    let cf = ContinuedFraction::certified_prefix(&inst.kappa, cf_depth_for(bits));
    let six_m: Integer = 6 * &inst.m;
    let first = cf
        .convergents()
        .iter()
        .position(|(_, q)| q > &six_m)
        .ok_or_else(|| Error::precision("no certified convergent of κ with q > 6M", bits))?;
    let k = first + skip;
    let Some((_, q)) = cf.convergents().get(k) else {
        return Err(Error::precision(format!("convergent {k} of κ is not certified"), bits));
    };
    let kq = inst.kappa.scale(q).dist_to_nearest_integer();
    let mq = inst.mu.scale(q).dist_to_nearest_integer();
    let eps0 = &mq - &kq.scale(&inst.m);
    if eps0.sign() != Sign::Positive {
        return Ok(None);
    }
    let ratio = inst.a_coeff.scale(q).checked_div(&eps0)?;
    let x = ratio.ln()?.checked_div(&inst.b_base.ln()?)?;
    let new_m = x.floor_upper().max(Integer::zero());
    Ok(Some(BdStep {
        q: q.clone(),
        convergent_index: k,
        eps0,
        new_m,
    }))
}

/// One line of a reduction transcript.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptLine {
    #[serde(with = "crate::serde_int")]
    pub a: Integer,
    #[serde(with = "crate::serde_int")]
    pub b: Integer,
    pub epsilon: Epsilon,
    pub step: u32,
    #[serde(with = "crate::serde_int")]
    pub q: Integer,
    pub eps0_lo: f64,
    pub eps0_hi: f64,
    #[serde(rename = "new_M", with = "crate::serde_int")]
    pub new_m: Integer,
    pub precision_bits: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionTranscript {
    #[serde(with = "crate::serde_int")]
    pub a: Integer,
    #[serde(with = "crate::serde_int")]
    pub b: Integer,
    #[serde(rename = "M0", with = "crate::serde_int")]
    pub m0: Integer,
    pub lines: Vec<TranscriptLine>,
    /// Bound after the last round that lowered it, `m <= final_M`.
    #[serde(rename = "final_M", with = "crate::serde_int")]
    pub final_m: Integer,
    /// Rounds that lowered the bound.
    pub steps: u32,
    pub precision_used: u32,
    /// False when not even the first round produced a bound.
    pub resolved: bool,
}

impl ReductionTranscript {
    /// Bounds after each completed round, starting with `M0`.
    pub fn round_bounds(&self) -> Vec<Integer> {
        let mut out = vec![self.m0.clone()];
        for s in 1..=self.steps {
            let m = self
                .lines
                .iter()
                .filter(|l| l.step == s)
                .map(|l| l.new_m.clone())
                .max()
                .unwrap();
            out.push(m);
        }
        out
    }

    pub fn to_jsonl(&self) -> Result<String> {
        let mut s = String::new();
        for l in &self.lines {
            s.push_str(&serde_json::to_string(l)?);
            s.push('\n');
        }
        Ok(s)
    }
}

/// One branch of one round: escalate precision, and at each precision try
/// the first convergent past `6M` and up to [`EXTRA_CONVERGENTS`] more.
fn reduce_branch(
    context: &PairContext,
    m: &Integer,
    policy: PrecisionPolicy,
) -> Result<Option<(BdStep, u32)>> {
    let start = bits_for_bound(m, policy);
    let ladder = PrecisionPolicy {
        start,
        cap: policy.cap.max(start),
    };
    for bits in ladder.ladder() {
        let inst = build_instance(context, m, bits)?;
        for skip in 0..=EXTRA_CONVERGENTS {
            match bd_step(&inst, skip) {
                Ok(Some(step)) => return Ok(Some((step, bits))),
                Ok(None) => continue,
                Err(Error::Precision { .. }) => break,
                Err(e) => return Err(e),
            }
        }
    }
    Ok(None)
}

/// Repeats the reduction on both signs of `ε`, taking the larger bound each
/// round, until the bound stops decreasing or `max_steps` rounds have run.
pub fn reduce_pair(
    a: &Integer,
    b: &Integer,
    m0: &Integer,
    max_steps: u32,
    policy: PrecisionPolicy,
) -> Result<ReductionTranscript> {
    if !m0.is_positive() {
        return Err(Error::domain(format!("M0 must be positive, got {m0}")));
    }
    let base = PairContext::new(a, b, Epsilon::Plus)?;
    let mut t = ReductionTranscript {
        a: a.clone(),
        b: b.clone(),
        m0: m0.clone(),
        lines: Vec::new(),
        final_m: m0.clone(),
        steps: 0,
        precision_used: 0,
        resolved: false,
    };
    let mut m = m0.clone();
    for step in 1..=max_steps {
        let mut round = Vec::new();
        for eps in Epsilon::BOTH {
            match reduce_branch(&base.with_epsilon(eps), &m, policy)? {
                Some((s, bits)) => round.push((eps, s, bits)),
                None => break,
            }
        }
        if round.len() < 2 {
            break;
        }
        let new_m = round.iter().map(|(_, s, _)| s.new_m.clone()).max().unwrap();
        if new_m >= m {
            break;
        }
        for (eps, s, bits) in round {
            t.precision_used = t.precision_used.max(bits);
            t.lines.push(TranscriptLine {
                a: a.clone(),
                b: b.clone(),
                epsilon: eps,
                step,
                q: s.q,
                eps0_lo: s.eps0.lower_f64(),
                eps0_hi: s.eps0.upper_f64(),
                new_m: s.new_m,
                precision_bits: bits,
            });
        }
        t.steps = step;
        t.resolved = true;
        m = new_m;
    }
    t.final_m = m;
    Ok(t)
}

/// Every `v_m = w_n` with `2 <= m <= M`, both signs, by direct merge.
pub fn brute_force_oracle(a: &Integer, b: &Integer, m: u64) -> Result<Vec<Intersection>> {
    if m > ORACLE_LIMIT {
        return Err(Error::domain(format!("oracle bound {m} exceeds {ORACLE_LIMIT}")));
    }
    Ok(find_intersections(a, b, m)?
        .into_iter()
        .filter(|x| x.m >= 2)
        .collect())
}

/// True when `M` is small enough for the oracle to close indices `2..=M`.
pub fn oracle_can_close(m: &Integer) -> bool {
    m <= &Integer::from(ORACLE_LIMIT) && !m.is_negative()
}

/// Convenience for the common `M = 1` target: nothing left to check.
pub fn is_closed_without_oracle(m: &Integer) -> bool {
    m <= &Integer::one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::exact_decimal;
    use crate::bounds::b1_case_m_upper;
    use crate::pell::b_nu_u64;
    use proptest::prelude::*;

    fn i(v: i64) -> Integer {
        Integer::from(v)
    }

    fn policy() -> PrecisionPolicy {
        PrecisionPolicy::default()
    }

    fn m_4_3e19() -> Integer {
        exact_decimal("4.3e19").to_integer()
    }

    #[test]
    fn instance_examples() {
        let c = PairContext::from_u64(1, 3360, Epsilon::Plus).unwrap();
        let inst = build_instance(&c, &m_4_3e19(), 256).unwrap();
        let one = CertifiedReal::from_i64(1, 256);
        assert!(inst.kappa.certainly_lt(&one) && inst.kappa.sign() == Sign::Positive);
        let c = PairContext::from_u64(3, 15, Epsilon::Minus).unwrap();
        let inst = build_instance(&c, &i(100), 256).unwrap();
        let k = ((7.0 + 45f64.sqrt()) / 2.0).ln() / ((8.0 + 60f64.sqrt()) / 2.0).ln();
        assert!((inst.kappa.to_f64() - k).abs() < 1e-14);
        assert!(build_instance(&c, &i(0), 256).is_err());
        assert!(bits_for_bound(&m_4_3e19(), policy()) >= 2 * 66 + 64);
    }

    #[test]
    fn degenerate_mu_gives_no_step() {
        let bits = 256;
        let five = CertifiedReal::from_i64(5, bits).sqrt().unwrap();
        let phi = (&five + &CertifiedReal::from_i64(1, bits))
            .checked_div(&CertifiedReal::from_i64(2, bits))
            .unwrap();
        let inst = ReductionInstance::from_parts(
            phi,
            CertifiedReal::from_i64(0, bits),
            CertifiedReal::from_i64(1, bits),
            CertifiedReal::from_i64(4, bits),
            i(100),
        )
        .unwrap();
        for skip in 0..5 {
            assert!(bd_step(&inst, skip).unwrap().is_none());
        }
    }

    #[test]
    fn step_reports_missing_precision() {
        let c = PairContext::from_u64(1, 96, Epsilon::Plus).unwrap();
        let inst = build_instance(&c, &m_4_3e19(), 40).unwrap();
        assert!(matches!(bd_step(&inst, 0), Err(Error::Precision { .. })));
    }

    #[test]
    fn b2_case_for_a1_reduces_below_seven() {
        let t = reduce_pair(&i(1), &i(3360), &m_4_3e19(), 5, policy()).unwrap();
        assert!(t.resolved);
        assert!(t.final_m <= i(6), "{:?}", t.round_bounds());
        let first = &t.lines[0];
        assert!(first.q > 6 * m_4_3e19());
        assert!(first.eps0_lo > 0.0);
    }

    #[test]
    fn b1_case_reduces_below_two() {
        for a in [1i64, 2, 7] {
            let m0 = b1_case_m_upper(&i(a), 2, policy()).unwrap().m0();
            let b = 64 * a + 32;
            let t = reduce_pair(&i(a), &i(b), &m0, 3, policy()).unwrap();
            assert!(t.final_m <= i(1), "a={a}: {:?}", t.round_bounds());
            assert!(t.steps <= 3);
        }
    }

    #[test]
    fn transcript_is_strictly_decreasing_and_serializes() {
        let t = reduce_pair(&i(2), &b_nu_u64(2, 2), &m_4_3e19(), 5, policy()).unwrap();
        let r = t.round_bounds();
        assert!(r.windows(2).all(|w| w[1] < w[0]), "{r:?}");
        for line in t.to_jsonl().unwrap().lines() {
            let v: serde_json::Value = serde_json::from_str(line).unwrap();
            for key in ["a", "b", "epsilon", "step", "q", "eps0_lo", "eps0_hi", "new_M", "precision_bits"] {
                assert!(v.get(key).is_some(), "{key}");
            }
            let back: TranscriptLine = serde_json::from_value(v).unwrap();
            assert!(t.lines.contains(&back));
        }
    }

    #[test]
    fn reduction_is_stable_under_precision_doubling() {
        let m0 = m_4_3e19();
        let p = PrecisionPolicy::new(256, 8192).unwrap();
        for a in 1..=3u64 {
            let b = b_nu_u64(a, 2);
            let x = reduce_pair(&a.into(), &b, &m0, 5, p).unwrap();
            let y = reduce_pair(&a.into(), &b, &m0, 5, p.doubled()).unwrap();
            assert_eq!(x.final_m, y.final_m, "a={a}");
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(reduce_pair(&i(1), &i(3360), &i(0), 3, policy()).is_err());
        assert!(reduce_pair(&i(1), &i(5), &i(10), 3, policy()).is_err());
        assert!(brute_force_oracle(&i(1), &i(96), ORACLE_LIMIT + 1).is_err());
    }

    #[test]
    fn oracle_examples() {
        assert!(brute_force_oracle(&i(1), &i(96), 1000).unwrap().is_empty());
        assert!(brute_force_oracle(&i(5), &i(352), 1000).unwrap().is_empty());
        let known = brute_force_oracle(&i(3), &i(15), 1000).unwrap();
        assert_eq!(known.len(), 1);
        let x = &known[0];
        assert_eq!((x.m, x.n, x.z.clone(), x.epsilon), (2, 2, i(58), Epsilon::Minus));
        assert!(oracle_can_close(&i(10_000)) && !oracle_can_close(&i(10_001)));
        assert!(is_closed_without_oracle(&i(1)) && !is_closed_without_oracle(&i(2)));
    }

    #[test]
    fn reduced_bounds_agree_with_oracle() {
        for a in 1..=5i64 {
            if a == 3 {
                continue;
            }
            let b = b_nu_u64(a as u64, 2);
            let t = reduce_pair(&i(a), &b, &m_4_3e19(), 5, policy()).unwrap();
            let m: u64 = t.final_m.to_string().parse().unwrap();
            assert!(brute_force_oracle(&i(a), &b, m.max(20)).unwrap().is_empty());
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn parity_restricted_scan_finds_the_same_solutions(a in 1u64..60, nu in 1usize..3) {
            prop_assume!(a != 3);
            let b = b_nu_u64(a, nu);
            let all = brute_force_oracle(&a.into(), &b, 200).unwrap();
            let even: Vec<_> = all.iter().filter(|x| x.m % 2 == 0 && x.n % 2 == 0).cloned().collect();
            prop_assert_eq!(all, even);
        }

        #[test]
        fn b1_reduction_matches_oracle(a in 1u64..120) {
            prop_assume!(a != 3);
            let b = Integer::from(64 * a + 32);
            let m0 = b1_case_m_upper(&a.into(), 2, policy()).unwrap().m0();
            let t = reduce_pair(&a.into(), &b, &m0, 3, policy()).unwrap();
            prop_assert!(t.resolved);
            let m: u64 = t.final_m.to_string().parse().unwrap();
            prop_assert!(brute_force_oracle(&a.into(), &b, m.max(20)).unwrap().is_empty());
        }
    }
}

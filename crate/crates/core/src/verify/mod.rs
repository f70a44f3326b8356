//! Campaigns that close the finitely many cases left after the bounds.
//!
//! A campaign expands into independent cases, one per `(a, b)`. Each case is
//! decided on its own ([`evaluate_case`]) and [`run_campaign`] adds the
//! worker pool, checkpoints and report files.

mod quadruples;
mod run;

pub use quadruples::{
    conjecture1_scan, dominant_d_chain, theorem15_identity_check, DominantChain, ConjectureScan, IdentityReport,
    LambdaReading, QuadrupleCandidate,
};
pub use run::{read_cases, run_campaign, CampaignReport, CampaignSummary, CsvRow};

use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{Integer, PrecisionPolicy};
use crate::bounds::{
    b1_case_m_upper, below_gap_bound, hypergeometric_eliminates, large_a_contradiction, sextuple_m_bound,
};
use crate::error::{Error, Result};
use crate::pell::{b_nu_u64, find_intersections, find_intersections_general, Intersection};
use crate::reduction::{brute_force_oracle, oracle_can_close, reduce_pair, ReductionTranscript};

/// Largest `a` left open in the `b_1` case.
pub const B1_A_MAX: u64 = 18_072;

/// Reduction rounds for the `b_1` sweep.
pub const B1_MAX_STEPS: u32 = 3;

/// Reduction rounds for the `b_2` pairs.
pub const B2_MAX_STEPS: u32 = 5;

/// `m < 7` in the `b_2` case.
pub const B2_TARGET: u64 = 6;

/// Rule giving the `b` values of a campaign for each `a`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BRule {
    B1,
    B2,
    B3,
    Explicit(Vec<u64>),
}

/// How a single case is decided.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseKind {
    /// `M0` from the `b_1` linear-forms bound at `ν = 2`; success is `final_M <= 1`.
    B1Reduction,
    /// `M0` from the sextuple bound; success is `final_M <= 6` and below the gap floor.
    B2Reduction,
    /// `a >= 6`: the large-`a` inequality contradicts the hypergeometric bound.
    LargeA,
    /// The hypergeometric inequality alone.
    Hypergeometric,
    /// Any valid pair: sextuple `M0`, closed when the reduced bound falls
    /// below the gap floor or the oracle clears the remaining indices.
    Generic,
    /// `a = 3` in the `b_1` sweep, where a solution family is known.
    SkippedKnown,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaseItem {
    pub a: u64,
    pub b: Integer,
    pub kind: CaseKind,
    pub max_steps: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    EliminatedHypergeometric,
    Reduced {
        #[serde(rename = "final_M", with = "crate::serde_int")]
        final_m: Integer,
    },
    SolutionFound {
        solutions: Vec<Intersection>,
    },
    Unresolved {
        reason: String,
    },
    Skipped {
        reason: String,
    },
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::EliminatedHypergeometric => "eliminated_hypergeometric",
            Verdict::Reduced { .. } => "reduced",
            Verdict::SolutionFound { .. } => "solution_found",
            Verdict::Unresolved { .. } => "unresolved",
            Verdict::Skipped { .. } => "skipped",
        }
    }

    pub fn is_unresolved(&self) -> bool {
        matches!(self, Verdict::Unresolved { .. })
    }

    pub fn final_m(&self) -> Option<&Integer> {
        match self {
            Verdict::Reduced { final_m } => Some(final_m),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseResult {
    pub a: u64,
    #[serde(with = "crate::serde_int")]
    pub b: Integer,
    pub kind: CaseKind,
    #[serde(flatten)]
    pub verdict: Verdict,
    /// Excluded from the theorem's claim (`a = 3`).
    pub excluded: bool,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_int")]
    pub m0: Option<Integer>,
    pub max_steps: u32,
    pub steps: u32,
    pub precision_bits: u32,
    pub hypergeometric_eliminates: Option<bool>,
    pub below_gap_floor: Option<bool>,
    pub wall_ms: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transcript: Option<ReductionTranscript>,
}

impl CaseResult {
    pub fn key(&self) -> (u64, Integer) {
        (self.a, self.b.clone())
    }

    /// The same result with timing removed, for comparisons across runs.
    pub fn without_timing(&self) -> Self {
        CaseResult {
            wall_ms: 0,
            ..self.clone()
        }
    }

    pub fn is_closed(&self) -> bool {
        matches!(
            self.verdict,
            Verdict::EliminatedHypergeometric | Verdict::Reduced { .. } | Verdict::Skipped { .. }
        )
    }
}

mod opt_int {
    use num_bigint::BigInt;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<BigInt>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(v) => s.serialize_str(&v.to_string()),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigInt>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|s| s.parse().map_err(D::Error::custom))
            .transpose()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignSpec {
    pub name: String,
    pub a_range: RangeInclusive<u64>,
    pub b_rule: BRule,
    pub max_steps: u32,
    pub precision: PrecisionPolicy,
    pub parallelism: usize,
    pub checkpoint_path: Option<PathBuf>,
}

impl CampaignSpec {
    /// `(a, b_1(a))` for `1 <= a <= a_max`.
    pub fn b1(a_max: u64) -> Self {
        CampaignSpec {
            name: "b1".into(),
            a_range: 1..=a_max,
            b_rule: BRule::B1,
            max_steps: B1_MAX_STEPS,
            precision: PrecisionPolicy::default(),
            parallelism: 1,
            checkpoint_path: None,
        }
    }

    /// `(a, b_2(a))` for `a <= 5`, plus `a = 6` standing for every `a >= 6`.
    pub fn b2() -> Self {
        CampaignSpec {
            name: "b2".into(),
            a_range: 1..=6,
            b_rule: BRule::B2,
            max_steps: B2_MAX_STEPS,
            precision: PrecisionPolicy::default(),
            parallelism: 1,
            checkpoint_path: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty() || !self.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
            return Err(Error::domain(format!("campaign name {:?} is not an identifier", self.name)));
        }
        if self.a_range.is_empty() || *self.a_range.start() == 0 {
            return Err(Error::domain(format!(
                "a range {}..={} must be nonempty and start at 1 or above",
                self.a_range.start(),
                self.a_range.end()
            )));
        }
        if self.b_rule == BRule::B1 && *self.a_range.end() > B1_A_MAX {
            return Err(Error::domain(format!("b1 campaigns stop at a = {B1_A_MAX}")));
        }
        if let BRule::Explicit(bs) = &self.b_rule {
            if bs.is_empty() {
                return Err(Error::domain("explicit b list is empty"));
            }
        }
        if self.parallelism == 0 {
            return Err(Error::domain("parallelism must be at least 1"));
        }
        Ok(())
    }

    pub fn items(&self) -> Result<Vec<CaseItem>> {
        self.validate()?;
        let mut out = Vec::new();
        for a in self.a_range.clone() {
            let item = |b: Integer, kind| CaseItem {
                a,
                b,
                kind,
                max_steps: self.max_steps,
            };
            match &self.b_rule {
                BRule::B1 if a == 3 => out.push(item(b_nu_u64(a, 1), CaseKind::SkippedKnown)),
                BRule::B1 => out.push(item(b_nu_u64(a, 1), CaseKind::B1Reduction)),
                BRule::B2 if a <= 5 => out.push(item(b_nu_u64(a, 2), CaseKind::B2Reduction)),
                BRule::B2 => out.push(item(b_nu_u64(a, 2), CaseKind::LargeA)),
                BRule::B3 => out.push(item(b_nu_u64(a, 3), CaseKind::Hypergeometric)),
                BRule::Explicit(bs) => {
                    for &b in bs {
                        out.push(item(b.into(), CaseKind::Generic));
                    }
                }
            }
        }
        Ok(out)
    }
}

fn closed_by_oracle(a: &Integer, b: &Integer, m: &Integer) -> Result<Option<Vec<Intersection>>> {
    if !oracle_can_close(m) {
        return Ok(None);
    }
    let m: u64 = m.to_string().parse().unwrap();
    Ok(Some(brute_force_oracle(a, b, m)?))
}

struct Outcome {
    verdict: Verdict,
    m0: Option<Integer>,
    transcript: Option<ReductionTranscript>,
    hyper: Option<bool>,
    below_gap: Option<bool>,
}

impl Outcome {
    fn of(verdict: Verdict) -> Self {
        Outcome {
            verdict,
            m0: None,
            transcript: None,
            hyper: None,
            below_gap: None,
        }
    }
}

fn reduction_outcome(
    item: &CaseItem,
    m0: Integer,
    policy: PrecisionPolicy,
    closes: impl Fn(&Integer) -> bool,
) -> Result<Outcome> {
    let a = Integer::from(item.a);
    let t = reduce_pair(&a, &item.b, &m0, item.max_steps, policy)?;
    let below_gap = below_gap_bound(&a, &item.b, &t.final_m);
    let residual = closed_by_oracle(&a, &item.b, &t.final_m)?;
    let verdict = match residual {
        Some(sols) if !sols.is_empty() => Verdict::SolutionFound { solutions: sols },
        _ if !t.resolved => Verdict::Unresolved {
            reason: "no reduction round produced a bound".into(),
        },
        _ if closes(&t.final_m) => Verdict::Reduced {
            final_m: t.final_m.clone(),
        },
        _ => Verdict::Unresolved {
            reason: format!("bound stalled at M = {}", t.final_m),
        },
    };
    Ok(Outcome {
        verdict,
        m0: Some(m0),
        transcript: Some(t),
        hyper: None,
        below_gap: Some(below_gap),
    })
}

fn decide(item: &CaseItem, policy: PrecisionPolicy) -> Result<Outcome> {
    let a = Integer::from(item.a);
    match item.kind {
        CaseKind::SkippedKnown => Ok(Outcome::of(Verdict::Skipped {
            reason: "a = 3: the pair has a known intersection family".into(),
        })),
        CaseKind::B1Reduction => {
            let m0 = b1_case_m_upper(&a, 2, policy)?.m0();
            reduction_outcome(item, m0, policy, |m| *m <= Integer::from(1))
        }
        CaseKind::B2Reduction => {
            let m0 = sextuple_m_bound(&item.b, policy)?;
            let hyper = hypergeometric_eliminates(&a, &item.b, policy)?;
            let b = item.b.clone();
            let mut o = reduction_outcome(item, m0, policy, |m| {
                *m <= Integer::from(B2_TARGET) && below_gap_bound(&a, &b, m)
            })?;
            o.hyper = Some(hyper);
            Ok(o)
        }
        CaseKind::LargeA => {
            let holds = large_a_contradiction(&a, policy)?;
            let mut o = Outcome::of(if holds {
                Verdict::EliminatedHypergeometric
            } else {
                Verdict::Unresolved {
                    reason: "large-a inequality did not give a contradiction".into(),
                }
            });
            o.hyper = Some(holds);
            Ok(o)
        }
        CaseKind::Hypergeometric => {
            let holds = hypergeometric_eliminates(&a, &item.b, policy)?;
            let mut o = Outcome::of(if holds {
                Verdict::EliminatedHypergeometric
            } else {
                Verdict::Unresolved {
                    reason: "hypergeometric inequality does not eliminate the pair".into(),
                }
            });
            o.hyper = Some(holds);
            Ok(o)
        }
        CaseKind::Generic => {
            let m0 = sextuple_m_bound(&item.b, policy)?;
            let b = item.b.clone();
            let gap_a = a.clone();
            let mut o = reduction_outcome(item, m0, policy, move |m| {
                *m <= Integer::from(1) || below_gap_bound(&gap_a, &b, m) || oracle_can_close(m)
            })?;
            o.hyper = hypergeometric_eliminates(&a, &item.b, policy).ok();
            Ok(o)
        }
    }
}

/// Decides one case. Failures that are not the case's fault (bad input,
/// exhausted precision) become `unresolved` verdicts.
pub fn evaluate_case(item: &CaseItem, policy: PrecisionPolicy) -> CaseResult {
    let start = Instant::now();
    let o = decide(item, policy).unwrap_or_else(|e| Outcome::of(Verdict::Unresolved { reason: e.to_string() }));
    let (steps, precision_bits) = o
        .transcript
        .as_ref()
        .map(|t| (t.steps, t.precision_used))
        .unwrap_or((0, policy.start));
    CaseResult {
        a: item.a,
        b: item.b.clone(),
        kind: item.kind,
        verdict: o.verdict,
        excluded: item.a == 3,
        m0: o.m0,
        max_steps: item.max_steps,
        steps,
        precision_bits,
        hypergeometric_eliminates: o.hyper,
        below_gap_floor: o.below_gap,
        wall_ms: start.elapsed().as_millis() as u64,
        transcript: o.transcript,
    }
}

/// Runs cases on a pool of `workers` threads; results keep the input order.
pub fn evaluate_cases(items: &[CaseItem], policy: PrecisionPolicy, workers: usize) -> Result<Vec<CaseResult>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Resource(e.to_string()))?;
    Ok(pool.install(|| items.par_iter().map(|i| evaluate_case(i, policy)).collect()))
}

/// Exit status for a set of results: 3 if a non-excluded case has a
/// solution, else 2 if any case is unresolved, else 0.
pub fn exit_status(results: &[CaseResult]) -> i32 {
    if results
        .iter()
        .any(|r| !r.excluded && matches!(r.verdict, Verdict::SolutionFound { .. }))
    {
        3
    } else if results.iter().any(|r| matches!(r.verdict, Verdict::Unresolved { .. })) {
        2
    } else {
        0
    }
}

/// The `b_1` sweep in memory.
pub fn campaign_b1(a_max: u64, policy: PrecisionPolicy, workers: usize) -> Result<Vec<CaseResult>> {
    let spec = CampaignSpec {
        precision: policy,
        ..CampaignSpec::b1(a_max)
    };
    evaluate_cases(&spec.items()?, policy, workers)
}

/// The `b_2` pairs in memory.
pub fn campaign_b2(policy: PrecisionPolicy) -> Result<Vec<CaseResult>> {
    let spec = CampaignSpec {
        precision: policy,
        ..CampaignSpec::b2()
    };
    evaluate_cases(&spec.items()?, policy, 1)
}

/// Elimination facts around the `b_2` case, keyed by name.
///
/// `b2_survives_hypergeometric` is true when the inequality fails to
/// eliminate every `(a, b_2(a))`, `a <= 5`.
pub fn b2_elimination_checks(policy: PrecisionPolicy) -> Result<Vec<(String, bool)>> {
    let mut out = Vec::new();
    let mut survives = true;
    let mut b3 = true;
    for a in 1..=5u64 {
        let e2 = hypergeometric_eliminates(&a.into(), &b_nu_u64(a, 2), policy)?;
        let e3 = hypergeometric_eliminates(&a.into(), &b_nu_u64(a, 3), policy)?;
        out.push((format!("hypergeometric_eliminates_b2_a{a}"), e2));
        out.push((format!("hypergeometric_eliminates_b3_a{a}"), e3));
        survives &= !e2;
        b3 &= e3;
    }
    out.push(("b2_survives_hypergeometric".into(), survives));
    out.push(("b3_eliminated".into(), b3));
    out.push(("large_a_contradiction_a6".into(), large_a_contradiction(&6.into(), policy)?));
    Ok(out)
}

/// One row of [`theorem_ap1_spotcheck`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpotcheckRow {
    pub a: u64,
    pub nu: usize,
    #[serde(with = "crate::serde_int")]
    pub b: Integer,
    /// `v_m = w_n` with `m >= 2` from the `z0 = ±2` sequences.
    pub standard: usize,
    /// Common values over every fundamental solution, giving `c`.
    pub general: usize,
    pub expected_nonempty: bool,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpotcheckReport {
    pub a_max: u64,
    pub m_max: u64,
    pub rows: Vec<SpotcheckRow>,
}

impl SpotcheckReport {
    pub fn ok(&self) -> bool {
        self.rows.iter().all(|r| r.ok)
    }
}

/// Direct search, independent of every bound: no `c` for `a != 3` with
/// `b = b_1, b_2`, and at least one for `a = 3`.
///
/// For `a = 3` the solutions do not lie on the `z0 = ±2` sequences, so the
/// general search over all fundamental solutions is the one that must be
/// nonempty.
pub fn theorem_ap1_spotcheck(a_max: u64, m_max: u64) -> Result<SpotcheckReport> {
    if a_max == 0 || a_max > 50 || m_max == 0 || m_max > 200 {
        return Err(Error::domain(format!(
            "spot check needs 1 <= a_max <= 50 and 1 <= m_max <= 200, got {a_max}, {m_max}"
        )));
    }
    let cells: Vec<(u64, usize)> = (1..=a_max).flat_map(|a| [(a, 1), (a, 2)]).collect();
    let rows = cells
        .par_iter()
        .map(|&(a, nu)| -> Result<SpotcheckRow> {
            let b = b_nu_u64(a, nu);
            let ai = Integer::from(a);
            let standard = find_intersections(&ai, &b, m_max)?.iter().filter(|x| x.m >= 2).count();
            let general = find_intersections_general(&ai, &b, m_max)?.len();
            let expected_nonempty = a == 3;
            let ok = if expected_nonempty {
                general > 0
            } else {
                standard == 0 && general == 0
            };
            Ok(SpotcheckRow {
                a,
                nu,
                b,
                standard,
                general,
                expected_nonempty,
                ok,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SpotcheckReport { a_max, m_max, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::m_lower_bound;

    fn policy() -> PrecisionPolicy {
        PrecisionPolicy::default()
    }

    #[test]
    fn spec_validation() {
        assert!(CampaignSpec::b1(500).validate().is_ok());
        assert!(CampaignSpec::b1(B1_A_MAX + 1).validate().is_err());
        let empty = CampaignSpec {
            a_range: 5..=4,
            ..CampaignSpec::b1(10)
        };
        assert!(empty.validate().is_err());
        let bad = CampaignSpec {
            name: "no spaces".into(),
            ..CampaignSpec::b2()
        };
        assert!(bad.validate().is_err());
        let items = CampaignSpec::b1(4).items().unwrap();
        assert_eq!(items.len(), 4);
        assert_eq!(items[2].kind, CaseKind::SkippedKnown);
        assert_eq!(items[2].b, Integer::from(224));
        let items = CampaignSpec::b2().items().unwrap();
        assert_eq!(items.last().unwrap().kind, CaseKind::LargeA);
    }

    #[test]
    fn b2_campaign_closes_all_pairs() {
        let res = campaign_b2(policy()).unwrap();
        assert_eq!(res.len(), 6);
        for r in &res[..5] {
            let m = r.verdict.final_m().unwrap_or_else(|| panic!("{r:?}"));
            assert!(*m <= Integer::from(6));
            assert_eq!(r.below_gap_floor, Some(true));
            let floor = m_lower_bound(&r.a.into(), &r.b, 128).unwrap();
            assert!(floor.lower_f64() > 12.0);
        }
        assert_eq!(res[5].verdict, Verdict::EliminatedHypergeometric);
        assert_eq!(exit_status(&res), 0);
        let m0 = res[4].m0.clone().unwrap();
        assert!(m0 > Integer::from(40u64) * Integer::from(10u64).pow(18));
    }

    #[test]
    fn b1_small_sweep() {
        let res = campaign_b1(40, policy(), 4).unwrap();
        for r in &res {
            if r.a == 3 {
                assert_eq!(r.verdict.label(), "skipped");
                assert!(r.excluded);
                continue;
            }
            assert!(r.verdict.final_m().unwrap() <= &Integer::from(1), "{r:?}");
            assert!(r.steps <= 3);
        }
        assert_eq!(exit_status(&res), 0);
    }

    #[test]
    fn b1_top_of_range() {
        let item = CaseItem {
            a: B1_A_MAX,
            b: b_nu_u64(B1_A_MAX, 1),
            kind: CaseKind::B1Reduction,
            max_steps: B1_MAX_STEPS,
        };
        assert_eq!(item.b, Integer::from(1_156_640));
        let r = evaluate_case(&item, policy());
        assert!(r.verdict.final_m().unwrap() <= &Integer::from(1), "{r:?}");
    }

    #[test]
    fn verdicts_reproduce_in_isolation() {
        let res = campaign_b1(12, policy(), 3).unwrap();
        for r in &res {
            let item = CaseItem {
                a: r.a,
                b: r.b.clone(),
                kind: r.kind,
                max_steps: r.max_steps,
            };
            assert_eq!(evaluate_case(&item, policy()).without_timing(), r.without_timing());
        }
    }

    #[test]
    fn case_results_round_trip_json() {
        for r in campaign_b2(policy()).unwrap() {
            let s = serde_json::to_string(&r).unwrap();
            let v: serde_json::Value = serde_json::from_str(&s).unwrap();
            assert!(v.get("verdict").is_some());
            let back: CaseResult = serde_json::from_str(&s).unwrap();
            assert_eq!(back, r);
        }
    }

    #[test]
    fn exit_status_map() {
        let base = evaluate_case(
            &CaseItem {
                a: 6,
                b: b_nu_u64(6, 2),
                kind: CaseKind::LargeA,
                max_steps: 1,
            },
            policy(),
        );
        let mut unresolved = base.clone();
        unresolved.verdict = Verdict::Unresolved { reason: "x".into() };
        let mut found = base.clone();
        found.verdict = Verdict::SolutionFound { solutions: vec![] };
        assert_eq!(exit_status(std::slice::from_ref(&base)), 0);
        assert_eq!(exit_status(&[base.clone(), unresolved.clone()]), 2);
        assert_eq!(exit_status(&[unresolved, found.clone()]), 3);
        found.excluded = true;
        assert_eq!(exit_status(&[base, found]), 0);
    }

    #[test]
    fn hypergeometric_rows() {
        let spec = CampaignSpec {
            a_range: 1..=5,
            b_rule: BRule::B3,
            ..CampaignSpec::b2()
        };
        let res = evaluate_cases(&spec.items().unwrap(), policy(), 2).unwrap();
        assert!(res.iter().all(|r| r.verdict == Verdict::EliminatedHypergeometric));
    }

    #[test]
    fn generic_rule_handles_explicit_pairs() {
        let spec = CampaignSpec {
            name: "explicit".into(),
            a_range: 1..=1,
            b_rule: BRule::Explicit(vec![3360]),
            ..CampaignSpec::b2()
        };
        let res = evaluate_cases(&spec.items().unwrap(), policy(), 1).unwrap();
        assert_eq!(res[0].verdict.label(), "reduced");
        let bad = CampaignSpec {
            b_rule: BRule::Explicit(vec![7]),
            ..spec
        };
        let res = evaluate_cases(&bad.items().unwrap(), policy(), 1).unwrap();
        assert_eq!(res[0].verdict.label(), "unresolved");
    }

    #[test]
    fn elimination_checks_report_the_a5_exception() {
        let checks: std::collections::BTreeMap<_, _> = b2_elimination_checks(policy()).unwrap().into_iter().collect();
        for a in 1..=4 {
            assert!(!checks[&format!("hypergeometric_eliminates_b2_a{a}")]);
        }
        assert!(checks["hypergeometric_eliminates_b2_a5"]);
        assert!(!checks["b2_survives_hypergeometric"]);
        assert!(checks["b3_eliminated"]);
        assert!(checks["large_a_contradiction_a6"]);
    }

    #[test]
    fn spotcheck_small() {
        let r = theorem_ap1_spotcheck(10, 60).unwrap();
        assert!(r.ok(), "{:?}", r.rows.iter().filter(|r| !r.ok).collect::<Vec<_>>());
        let three: Vec<_> = r.rows.iter().filter(|r| r.a == 3).collect();
        assert!(three.iter().any(|r| r.general > 0));
        assert!(theorem_ap1_spotcheck(51, 10).is_err());
        assert!(theorem_ap1_spotcheck(10, 201).is_err());
    }
}

//! The `d4verify` command line.
//!
//! Exit codes: 0 success, 1 `check` on a set that is not a D(4)-tuple,
//! 2 unresolved cases, 3 counterexample found, 64 usage error, 65 input that
//! is well formed but not a valid triple or pair, 74 I/O failure.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{error::ErrorKind, Args, Parser, Subcommand, ValueEnum};
use num_traits::Signed;
use serde::Serialize;

use crate::arith::{try_exact_decimal, Integer, PrecisionPolicy, DEFAULT_PRECISION_BITS, DEFAULT_PRECISION_CAP};
use crate::bounds::{b1_case_m_upper, bound_report, sextuple_m_bound, BoundRecord};
use crate::error::Error;
use crate::pell::{b_nu, find_intersections, find_intersections_general, PairContext, Epsilon};
use crate::reduction::reduce_pair;
use crate::tuples::{is_d4_tuple, regular_extensions, regularity_relation_holds, witness_table, DTriple};
use crate::verify::{
    b2_elimination_checks, conjecture1_scan, run_campaign, theorem15_identity_check, theorem_ap1_spotcheck,
    CampaignSpec, LambdaReading, B1_A_MAX,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NO: i32 = 1;
pub const EXIT_UNRESOLVED: i32 = 2;
pub const EXIT_COUNTEREXAMPLE: i32 = 3;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DATA: i32 = 65;
pub const EXIT_IO: i32 = 74;

/// Largest accepted precision, in bits.
pub const PRECISION_LIMIT: u32 = 1 << 20;

/// Config file read when neither `--config` nor `D4VERIFY_CONFIG` is given.
pub const DEFAULT_CONFIG: &str = "d4verify.conf";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Parser, Debug)]
#[command(name = "d4verify", version, about = "Checks and case sweeps for D(4)-tuple extension results")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct GlobalArgs {
    /// Starting precision in bits for certified arithmetic
    #[arg(long, global = true, env = "D4VERIFY_PRECISION")]
    precision: Option<u32>,
    /// Escalation cap in bits
    #[arg(long, global = true, env = "D4VERIFY_PRECISION_CAP")]
    precision_cap: Option<u32>,
    /// Worker threads for campaigns
    #[arg(long, global = true, env = "D4VERIFY_WORKERS")]
    workers: Option<usize>,
    #[arg(long, global = true, value_enum, env = "D4VERIFY_FORMAT")]
    format: Option<Format>,
    /// Directory for campaign reports
    #[arg(long, global = true, env = "D4VERIFY_OUTPUT_DIR")]
    output_dir: Option<PathBuf>,
    /// key=value config file; flags and environment take precedence
    #[arg(long, global = true, env = "D4VERIFY_CONFIG")]
    config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Test whether the given integers form a D(4)-tuple
    Check {
        #[arg(num_args = 2.., required = true)]
        elements: Vec<String>,
    },
    /// Regular extensions d+ and d- of a triple
    Extend { a: String, b: String, c: String },
    /// Solutions of v_m = w_n for the pair context (a, b)
    Intersect {
        a: String,
        b: String,
        #[arg(long, default_value_t = 100)]
        m_max: u64,
        /// Search the orbits of every fundamental solution, not only z0 = ±2
        #[arg(long)]
        general: bool,
    },
    /// Baker–Davenport reduction of an upper bound on m
    Reduce {
        a: String,
        b: String,
        /// Initial bound; integer or decimal with exponent, e.g. 4.3e19
        #[arg(long = "M0", alias = "m0")]
        m0: Option<String>,
        #[arg(long, default_value_t = 5)]
        steps: u32,
    },
    /// Every bound that applies to (a, b)
    Bounds { a: String, b: String },
    /// Run a named campaign
    Campaign {
        name: CampaignName,
        #[arg(long)]
        a_max: Option<u64>,
        /// Scan limit for c (conjecture1, theorem15)
        #[arg(long, default_value_t = 10_000)]
        limit: u64,
        /// Index limit (spotcheck)
        #[arg(long, default_value_t = 200)]
        m_max: u64,
        /// Reuse finished cases from the checkpoint directory
        #[arg(long)]
        resume: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CampaignName {
    B1,
    B2,
    Conjecture1,
    Theorem15,
    Spotcheck,
}

/// Settings after merging flags, environment, config file and defaults.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliConfig {
    pub precision_bits: u32,
    pub precision_cap: u32,
    pub workers: usize,
    pub output_dir: PathBuf,
    pub format: Format,
}

impl Default for CliConfig {
    fn default() -> Self {
        CliConfig {
            precision_bits: DEFAULT_PRECISION_BITS,
            precision_cap: DEFAULT_PRECISION_CAP,
            workers: std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
            output_dir: PathBuf::from("d4verify-out"),
            format: Format::Text,
        }
    }
}

impl CliConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(64 <= self.precision_bits
            && self.precision_bits <= self.precision_cap
            && self.precision_cap <= PRECISION_LIMIT)
        {
            return Err(format!(
                "need 64 <= precision <= precision-cap <= {PRECISION_LIMIT}, got {} and {}",
                self.precision_bits, self.precision_cap
            ));
        }
        if self.workers == 0 {
            return Err("workers must be at least 1".into());
        }
        Ok(())
    }

    pub fn policy(&self) -> PrecisionPolicy {
        PrecisionPolicy {
            start: self.precision_bits,
            cap: self.precision_cap,
        }
    }
}

/// Parses `key=value` lines; `#` starts a comment.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, String> {
    let mut out = BTreeMap::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {}: expected key=value", no + 1))?;
        let k = k.trim().replace('-', "_");
        if !["precision", "precision_cap", "workers", "format", "output_dir"].contains(&k.as_str()) {
            return Err(format!("config line {}: unknown key {k:?}", no + 1));
        }
        out.insert(k, v.trim().to_string());
    }
    Ok(out)
}

fn resolve_config(g: &GlobalArgs) -> Result<CliConfig, String> {
    let file = match &g.config {
        Some(p) => Some(fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?),
        None => fs::read_to_string(DEFAULT_CONFIG).ok(),
    };
    let kv = file.as_deref().map(parse_config).transpose()?.unwrap_or_default();
    fn num<T: std::str::FromStr>(kv: &BTreeMap<String, String>, k: &str) -> Result<Option<T>, String> {
        kv.get(k)
            .map(|v| v.parse().map_err(|_| format!("config {k}: bad value {v:?}")))
            .transpose()
    }
    let d = CliConfig::default();
    let format = match (g.format, kv.get("format")) {
        (Some(f), _) => f,
        (None, Some(v)) => Format::from_str(v, true).map_err(|_| format!("config format: bad value {v:?}"))?,
        (None, None) => d.format,
    };
    let cfg = CliConfig {
        precision_bits: g.precision.or(num(&kv, "precision")?).unwrap_or(d.precision_bits),
        precision_cap: g.precision_cap.or(num(&kv, "precision_cap")?).unwrap_or(d.precision_cap),
        workers: g.workers.or(num(&kv, "workers")?).unwrap_or(d.workers),
        output_dir: g
            .output_dir
            .clone()
            .or(kv.get("output_dir").map(PathBuf::from))
            .unwrap_or(d.output_dir),
        format,
    };
    cfg.validate()?;
    Ok(cfg)
}

/// Failure of a command, carrying its exit code.
struct Fail(i32, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Domain(_) => EXIT_DATA,
            Error::Precision { .. } | Error::Resource(_) => EXIT_UNRESOLVED,
            Error::Io(_) | Error::Json(_) | Error::Csv(_) => EXIT_IO,
        };
        Fail(code, e.to_string())
    }
}

impl From<io::Error> for Fail {
    fn from(e: io::Error) -> Self {
        Fail(EXIT_IO, e.to_string())
    }
}

impl From<serde_json::Error> for Fail {
    fn from(e: serde_json::Error) -> Self {
        Fail(EXIT_IO, e.to_string())
    }
}

impl From<csv::Error> for Fail {
    fn from(e: csv::Error) -> Self {
        Fail(EXIT_IO, e.to_string())
    }
}

fn usage(msg: impl Into<String>) -> Fail {
    Fail(EXIT_USAGE, msg.into())
}

fn parse_int(s: &str) -> Result<Integer, Fail> {
    s.trim().parse().map_err(|_| usage(format!("not an integer: {s:?}")))
}

fn parse_positive(s: &str) -> Result<Integer, Fail> {
    let n = parse_int(s)?;
    if !n.is_positive() {
        return Err(usage(format!("expected a positive integer, got {n}")));
    }
    Ok(n)
}

/// Integer bound from `"12345"` or `"4.3e19"`, rounded up.
pub fn parse_bound(s: &str) -> Option<Integer> {
    let q = try_exact_decimal(s.trim())?;
    let n = q.ceil().to_integer();
    n.is_positive().then_some(n)
}

fn json_line(out: &mut dyn Write, v: &impl Serialize) -> Result<(), Fail> {
    writeln!(out, "{}", serde_json::to_string_pretty(v)?)?;
    Ok(())
}

fn csv_rows<T: Serialize>(out: &mut dyn Write, rows: &[T]) -> Result<(), Fail> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct CheckOutput {
    tuple: Vec<String>,
    pairs: Vec<crate::tuples::PairWitness>,
    is_d4_tuple: bool,
}

fn cmd_check(cfg: &CliConfig, elements: &[String], out: &mut dyn Write) -> Result<i32, Fail> {
    let xs = elements.iter().map(|s| parse_int(s)).collect::<Result<Vec<_>, _>>()?;
    let pairs = witness_table(&xs).map_err(|e| usage(e.to_string()))?;
    let yes = is_d4_tuple(&xs).map_err(|e| usage(e.to_string()))?;
    let mut sorted = xs.clone();
    sorted.sort();
    match cfg.format {
        Format::Text => {
            for p in &pairs {
                match &p.root {
                    Some(r) => writeln!(out, "{{{}, {}}}: {}*{}+4 = {} = {}^2", p.x, p.y, p.x, p.y, p.product_plus_4, r)?,
                    None => writeln!(out, "{{{}, {}}}: {}*{}+4 = {} is not a square", p.x, p.y, p.x, p.y, p.product_plus_4)?,
                }
            }
            let set = sorted.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ");
            writeln!(out, "{{{set}}} is a D(4)-tuple: {}", if yes { "yes" } else { "no" })?;
        }
        Format::Json => json_line(
            out,
            &CheckOutput {
                tuple: sorted.iter().map(ToString::to_string).collect(),
                pairs,
                is_d4_tuple: yes,
            },
        )?,
        Format::Csv => csv_rows(out, &pairs)?,
    }
    Ok(if yes { EXIT_OK } else { EXIT_NO })
}

#[derive(Serialize)]
struct ExtendOutput {
    triple: [String; 3],
    d_plus: String,
    d_minus: String,
    d_plus_regular: bool,
    d_plus_quadruple: bool,
    /// Absent when `d- = 0`.
    d_minus_regular: Option<bool>,
    d_minus_quadruple: Option<bool>,
}

fn cmd_extend(cfg: &CliConfig, a: &str, b: &str, c: &str, out: &mut dyn Write) -> Result<i32, Fail> {
    let (a, b, c) = (parse_int(a)?, parse_int(b)?, parse_int(c)?);
    let t = DTriple::new(a, b, c)?;
    let ext = regular_extensions(&t);
    let [a, b, c] = t.elements();
    let quad = |d: &Integer| -> Result<bool, Fail> {
        Ok(d.is_positive() && ![&a, &b, &c].contains(&d) && is_d4_tuple(&[a.clone(), b.clone(), c.clone(), d.clone()])?)
    };
    let o = ExtendOutput {
        triple: [a.to_string(), b.to_string(), c.to_string()],
        d_plus: ext.d_plus.to_string(),
        d_minus: ext.d_minus.to_string(),
        d_plus_regular: regularity_relation_holds(&a, &ext.d_plus, &b, &c),
        d_plus_quadruple: quad(&ext.d_plus)?,
        d_minus_regular: ext
            .d_minus
            .is_positive()
            .then(|| regularity_relation_holds(&a, &ext.d_minus, &b, &c)),
        d_minus_quadruple: if ext.d_minus.is_positive() { Some(quad(&ext.d_minus)?) } else { None },
    };
    let yn = |x: bool| if x { "yes" } else { "no" };
    match cfg.format {
        Format::Text => {
            writeln!(out, "triple {t}")?;
            writeln!(
                out,
                "d+ = {}  regular: {}  quadruple: {}",
                o.d_plus,
                yn(o.d_plus_regular),
                yn(o.d_plus_quadruple)
            )?;
            match (o.d_minus_regular, o.d_minus_quadruple) {
                (Some(r), Some(q)) => writeln!(out, "d- = {}  regular: {}  quadruple: {}", o.d_minus, yn(r), yn(q))?,
                _ => writeln!(out, "d- = {}  (c = a + b + 2r)", o.d_minus)?,
            }
        }
        Format::Json => json_line(out, &o)?,
        Format::Csv => csv_rows(out, &[o])?,
    }
    Ok(EXIT_OK)
}

fn cmd_intersect(
    cfg: &CliConfig,
    a: &str,
    b: &str,
    m_max: u64,
    general: bool,
    out: &mut dyn Write,
) -> Result<i32, Fail> {
    let (a, b) = (parse_int(a)?, parse_int(b)?);
    if m_max == 0 {
        return Err(usage("--m-max must be at least 1"));
    }
    PairContext::new(&a, &b, Epsilon::Plus)?;
    if general {
        let rows = find_intersections_general(&a, &b, m_max)?;
        match cfg.format {
            Format::Text if rows.is_empty() => writeln!(out, "no solutions with m <= {m_max}")?,
            Format::Text => {
                writeln!(out, "z0\tz1\tm\tn\tz\tc")?;
                for r in &rows {
                    writeln!(out, "{}\t{}\t{}\t{}\t{}\t{}", r.z0, r.z1, r.m, r.n, r.z, r.c)?;
                }
            }
            Format::Json => json_line(out, &rows)?,
            Format::Csv => csv_rows(out, &rows)?,
        }
        return Ok(EXIT_OK);
    }
    let rows = find_intersections(&a, &b, m_max)?;
    match cfg.format {
        Format::Text if rows.is_empty() => writeln!(out, "no solutions with m <= {m_max}")?,
        Format::Text => {
            writeln!(out, "eps\tm\tn\tz\tc")?;
            for r in &rows {
                writeln!(out, "{}\t{}\t{}\t{}\t{}", r.epsilon.value(), r.m, r.n, r.z, r.derived_c)?;
            }
        }
        Format::Json => json_line(out, &rows)?,
        Format::Csv => csv_rows(out, &rows)?,
    }
    Ok(EXIT_OK)
}

/// `M0` when none is given: the `b_1` linear-forms bound for `b = b_1(a)`,
/// the sextuple bound for `b >= b_2(a)`.
fn default_m0(a: &Integer, b: &Integer, policy: PrecisionPolicy) -> Result<Option<Integer>, Fail> {
    if !a.is_positive() {
        return Ok(None);
    }
    if *b == b_nu(a, 1)? {
        return Ok(Some(b1_case_m_upper(a, 2, policy)?.m0()));
    }
    if *b >= b_nu(a, 2)? {
        return Ok(Some(sextuple_m_bound(b, policy)?));
    }
    Ok(None)
}

fn cmd_reduce(
    cfg: &CliConfig,
    a: &str,
    b: &str,
    m0: Option<&str>,
    steps: u32,
    out: &mut dyn Write,
) -> Result<i32, Fail> {
    let (a, b) = (parse_int(a)?, parse_int(b)?);
    let policy = cfg.policy();
    let m0 = match m0 {
        Some(s) => parse_bound(s).ok_or_else(|| usage(format!("--M0 must be a positive number, got {s:?}")))?,
        None => default_m0(&a, &b, policy)?
            .ok_or_else(|| usage(format!("no default M0 for ({a}, {b}); pass --M0")))?,
    };
    PairContext::new(&a, &b, Epsilon::Plus)?;
    let t = reduce_pair(&a, &b, &m0, steps, policy)?;
    match cfg.format {
        Format::Text => {
            writeln!(out, "pair ({a}, {b})  M0 = {m0}")?;
            for l in &t.lines {
                writeln!(
                    out,
                    "step {}  eps {:+}  q = {}  eps0 in [{:.6e}, {:.6e}]  M -> {}  ({} bits)",
                    l.step,
                    l.epsilon.value(),
                    l.q,
                    l.eps0_lo,
                    l.eps0_hi,
                    l.new_m,
                    l.precision_bits
                )?;
            }
            if t.resolved {
                writeln!(out, "final M = {}", t.final_m)?;
            } else {
                writeln!(out, "unresolved: no step produced a bound below M0")?;
            }
        }
        Format::Json => json_line(out, &t)?,
        Format::Csv => csv_rows(out, &t.lines)?,
    }
    Ok(if t.resolved { EXIT_OK } else { EXIT_UNRESOLVED })
}

#[derive(Serialize)]
struct BoundRow<'a> {
    name: &'a str,
    inputs: String,
    enclosure_lo: Option<f64>,
    enclosure_hi: Option<f64>,
    verdict: Option<&'a str>,
}

fn inputs_text(r: &BoundRecord) -> String {
    r.inputs.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";")
}

fn cmd_bounds(cfg: &CliConfig, a: &str, b: &str, out: &mut dyn Write) -> Result<i32, Fail> {
    let (a, b) = (parse_positive(a)?, parse_positive(b)?);
    let recs = bound_report(&a, &b, cfg.policy())?;
    match cfg.format {
        Format::Text => {
            for r in &recs {
                let val = match (r.enclosure_lo, r.enclosure_hi) {
                    (Some(lo), Some(hi)) => format!("[{lo:.10e}, {hi:.10e}]"),
                    _ => "-".into(),
                };
                let verdict = r.verdict.as_deref().unwrap_or("");
                writeln!(out, "{:<28} {val}  {verdict}  ({})", r.name, inputs_text(r))?;
            }
        }
        Format::Json => json_line(out, &recs)?,
        Format::Csv => {
            let rows: Vec<BoundRow> = recs
                .iter()
                .map(|r| BoundRow {
                    name: &r.name,
                    inputs: inputs_text(r),
                    enclosure_lo: r.enclosure_lo,
                    enclosure_hi: r.enclosure_hi,
                    verdict: r.verdict.as_deref(),
                })
                .collect();
            csv_rows(out, &rows)?
        }
    }
    Ok(EXIT_OK)
}

fn write_json_file(path: &Path, v: &impl Serialize) -> Result<(), Fail> {
    fs::write(path, serde_json::to_string_pretty(v)? + "\n")?;
    Ok(())
}

#[derive(Serialize)]
struct ScanSummary {
    name: &'static str,
    limit: u64,
    cells: usize,
    candidates: usize,
    confirmed: usize,
    violations_below: usize,
    violations_above: usize,
    exit_status: i32,
}

#[derive(Serialize)]
struct IdentitySummary {
    name: &'static str,
    limit: u64,
    checked: usize,
    identities_hold: usize,
    conclusion_holds: usize,
    per_index_reading_in_range: usize,
    common_reading_in_range: usize,
    exit_status: i32,
}

fn cmd_campaign(
    cfg: &CliConfig,
    name: CampaignName,
    a_max: Option<u64>,
    limit: u64,
    m_max: u64,
    resume: bool,
    out: &mut dyn Write,
) -> Result<i32, Fail> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Fail(EXIT_IO, e.to_string()))?;
    let policy = cfg.policy();
    match name {
        CampaignName::B1 | CampaignName::B2 => {
            let (spec, checks) = if name == CampaignName::B1 {
                let a_max = a_max.unwrap_or(B1_A_MAX);
                if a_max == 0 || a_max > B1_A_MAX {
                    return Err(usage(format!("--a-max must be in 1..={B1_A_MAX}")));
                }
                (CampaignSpec::b1(a_max), BTreeMap::new())
            } else {
                if a_max.is_some() {
                    return Err(usage("campaign b2 has a fixed range; --a-max does not apply"));
                }
                (CampaignSpec::b2(), b2_elimination_checks(policy)?.into_iter().collect())
            };
            let spec = CampaignSpec {
                precision: policy,
                parallelism: cfg.workers,
                ..spec
            };
            let dir = cfg.output_dir.join(&spec.name);
            let report = run_campaign(&spec, &dir, resume, checks)?;
            let s = &report.summary;
            match cfg.format {
                Format::Text => {
                    writeln!(out, "campaign {}: {} cases ({} resumed)", s.name, s.cases, report.resumed)?;
                    for (k, v) in &s.counts {
                        writeln!(out, "  {k}: {v}")?;
                    }
                    if let Some(m) = &s.max_final_m {
                        writeln!(out, "  max final M: {m}")?;
                    }
                    for (k, v) in &s.checks {
                        writeln!(out, "  check {k}: {v}")?;
                    }
                    writeln!(out, "reports in {}", dir.display())?;
                }
                Format::Json => json_line(out, s)?,
                Format::Csv => out.write_all(&fs::read(dir.join("summary.csv"))?)?,
            }
            Ok(s.exit_status)
        }
        CampaignName::Conjecture1 => {
            let scan = pool.install(|| conjecture1_scan(limit))?;
            let status = if scan.violations() > 0 { EXIT_COUNTEREXAMPLE } else { EXIT_OK };
            let dir = cfg.output_dir.join("conjecture1");
            fs::create_dir_all(&dir)?;
            write_json_file(&dir.join("scan.json"), &scan)?;
            let s = ScanSummary {
                name: "conjecture1",
                limit,
                cells: scan.cells,
                candidates: scan.candidates,
                confirmed: scan.confirmed.len(),
                violations_below: scan.violations_below.len(),
                violations_above: scan.violations_above.len(),
                exit_status: status,
            };
            write_json_file(&dir.join("summary.json"), &s)?;
            match cfg.format {
                Format::Text => {
                    writeln!(out, "conjecture1 scan, c <= {limit}: {} pairs of triples", s.candidates)?;
                    writeln!(out, "  quadruples: {}", s.confirmed)?;
                    writeln!(out, "  violations with 4c < b^3: {}", s.violations_below)?;
                    writeln!(out, "  violations with 4c >= b^3: {}", s.violations_above)?;
                    writeln!(out, "reports in {}", dir.display())?;
                }
                Format::Json => json_line(out, &s)?,
                Format::Csv => csv_rows(out, &[s])?,
            }
            Ok(status)
        }
        CampaignName::Theorem15 => {
            let scan = pool.install(|| conjecture1_scan(limit))?;
            let cands: Vec<_> = scan
                .confirmed
                .iter()
                .chain(&scan.violations_below)
                .filter(|q| q.in_proved_stratum())
                .copied()
                .collect();
            let reports = cands
                .iter()
                .map(|q| theorem15_identity_check(q.a1, q.a2, q.b, q.c))
                .collect::<crate::Result<Vec<_>>>()?;
            let dir = cfg.output_dir.join("theorem15");
            fs::create_dir_all(&dir)?;
            let mut f = fs::File::create(dir.join("identities.jsonl"))?;
            for r in &reports {
                writeln!(f, "{}", serde_json::to_string(r)?)?;
            }
            let ok = reports.iter().filter(|r| r.identities_hold()).count();
            let concl = reports.iter().filter(|r| r.conclusion_holds).count();
            let status = if ok == reports.len() && concl == reports.len() {
                EXIT_OK
            } else {
                EXIT_COUNTEREXAMPLE
            };
            let s = IdentitySummary {
                name: "theorem15",
                limit,
                checked: reports.len(),
                identities_hold: ok,
                conclusion_holds: concl,
                per_index_reading_in_range: reports
                    .iter()
                    .filter(|r| r.reading_holds(LambdaReading::PerIndex))
                    .count(),
                common_reading_in_range: reports
                    .iter()
                    .filter(|r| r.reading_holds(LambdaReading::Common))
                    .count(),
                exit_status: status,
            };
            write_json_file(&dir.join("summary.json"), &s)?;
            match cfg.format {
                Format::Text => {
                    writeln!(out, "theorem15 identities, c <= {limit}, 4c < b^3: {} cases", s.checked)?;
                    writeln!(out, "  identities hold: {}", s.identities_hold)?;
                    writeln!(out, "  d1 = a2 and d2 = a1: {}", s.conclusion_holds)?;
                    writeln!(out, "  1 < λ < 4 with a = a_i: {}", s.per_index_reading_in_range)?;
                    writeln!(out, "  1 < λ < 4 with a = a_1: {}", s.common_reading_in_range)?;
                    writeln!(out, "reports in {}", dir.display())?;
                }
                Format::Json => json_line(out, &s)?,
                Format::Csv => csv_rows(out, &[s])?,
            }
            Ok(status)
        }
        CampaignName::Spotcheck => {
            let a_max = a_max.unwrap_or(50);
            let rep = pool
                .install(|| theorem_ap1_spotcheck(a_max, m_max))
                .map_err(|e| usage(e.to_string()))?;
            let status = if rep.rows.iter().any(|r| !r.ok && !r.expected_nonempty) {
                EXIT_COUNTEREXAMPLE
            } else if !rep.ok() {
                EXIT_UNRESOLVED
            } else {
                EXIT_OK
            };
            let dir = cfg.output_dir.join("spotcheck");
            fs::create_dir_all(&dir)?;
            write_json_file(&dir.join("report.json"), &rep)?;
            match cfg.format {
                Format::Text => {
                    for r in rep.rows.iter().filter(|r| r.standard + r.general > 0 || !r.ok) {
                        writeln!(
                            out,
                            "a={} b={} (ν={}): {} standard, {} general solutions{}",
                            r.a,
                            r.b,
                            r.nu,
                            r.standard,
                            r.general,
                            if r.ok { "" } else { "  UNEXPECTED" }
                        )?;
                    }
                    writeln!(
                        out,
                        "spotcheck a <= {a_max}, m <= {m_max}: {}",
                        if rep.ok() { "ok" } else { "failed" }
                    )?;
                }
                Format::Json => json_line(out, &rep)?,
                Format::Csv => csv_rows(out, &rep.rows)?,
            }
            Ok(status)
        }
    }
}

/// Parses `args` (program name first) and runs the command, writing to the
/// given streams. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    EXIT_USAGE
                }
            };
        }
    };
    let cfg = match resolve_config(&cli.global) {
        Ok(c) => c,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            return EXIT_USAGE;
        }
    };
    let res = match &cli.command {
        Command::Check { elements } => cmd_check(&cfg, elements, out),
        Command::Extend { a, b, c } => cmd_extend(&cfg, a, b, c, out),
        Command::Intersect { a, b, m_max, general } => cmd_intersect(&cfg, a, b, *m_max, *general, out),
        Command::Reduce { a, b, m0, steps } => cmd_reduce(&cfg, a, b, m0.as_deref(), *steps, out),
        Command::Bounds { a, b } => cmd_bounds(&cfg, a, b, out),
        Command::Campaign {
            name,
            a_max,
            limit,
            m_max,
            resume,
        } => cmd_campaign(&cfg, *name, *a_max, *limit, *m_max, *resume, out),
    };
    match res {
        Ok(code) => code,
        Err(Fail(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = io::stdout();
    let stderr = io::stderr();
    let code = run(args, &mut stdout.lock(), &mut stderr.lock());
    let _ = io::stdout().flush();
    code
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["d4verify"];
        full.extend_from_slice(args);
        let code = run(full, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn check_examples() {
        let (code, out, _) = run_str(&["check", "3", "4", "15", "224"]);
        assert_eq!(code, 0);
        assert!(out.contains("15*224+4 = 3364 = 58^2"));
        assert!(out.ends_with("yes\n"));
        assert_eq!(run_str(&["check", "1", "2"]).0, EXIT_NO);
        assert_eq!(run_str(&["check", "1", "5", "12", "96"]).0, 0);
        assert_eq!(run_str(&["check", "7"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["check", "1", "x"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["check", "1", "1"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["check", "0", "5"]).0, EXIT_USAGE);
    }

    #[test]
    fn extend_examples() {
        let (code, out, _) = run_str(&["extend", "1", "5", "12"]);
        assert_eq!(code, 0);
        assert!(out.contains("d+ = 96") && out.contains("d- = 0"));
        let (_, out, _) = run_str(&["extend", "3", "4", "15"]);
        assert!(out.contains("d+ = 224  regular: yes  quadruple: yes"));
        assert_eq!(run_str(&["extend", "1", "2", "3"]).0, EXIT_DATA);
        let (_, out, _) = run_str(&["--format", "json", "extend", "4", "3", "15"]);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["d_plus"], "224");
    }

    #[test]
    fn intersect_examples() {
        let (code, out, _) = run_str(&["intersect", "3", "15", "--m-max", "50"]);
        assert_eq!(code, 0);
        assert!(out.contains("-1\t2\t2\t58\t224"), "{out}");
        let (_, out, _) = run_str(&["intersect", "1", "96", "--m-max", "200"]);
        assert!(out.starts_with("no solutions"));
        assert_eq!(run_str(&["intersect", "3", "15", "--m-max", "0"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["intersect", "1", "5"]).0, EXIT_DATA);
        let (_, out, _) = run_str(&["intersect", "3", "224", "--m-max", "20", "--general"]);
        assert!(out.contains("3135"), "{out}");
    }

    #[test]
    fn reduce_examples() {
        let (code, out, _) = run_str(&["reduce", "1", "3360", "--M0", "4.3e19"]);
        assert_eq!(code, 0);
        let last = out.lines().last().unwrap();
        let m: u64 = last.trim_start_matches("final M = ").parse().unwrap();
        assert!(m <= 6);
        let (code, out, _) = run_str(&["reduce", "2", "160", "--steps", "3"]);
        assert_eq!(code, 0);
        assert!(out.ends_with("final M = 1\n") || out.ends_with("final M = 0\n"), "{out}");
        assert_eq!(run_str(&["reduce", "1", "20"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["reduce", "1", "96", "--M0", "-3"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["reduce", "1", "97", "--M0", "100"]).0, EXIT_DATA);
        let (_, out, _) = run_str(&["--format", "json", "reduce", "1", "96"]);
        let t: crate::reduction::ReductionTranscript = serde_json::from_str(&out).unwrap();
        assert!(t.resolved);
    }

    #[test]
    fn bounds_and_formats() {
        let (code, out, _) = run_str(&["--format", "csv", "bounds", "5", "170016"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("name,inputs,enclosure_lo,enclosure_hi,verdict"));
        let (_, out, _) = run_str(&["--format", "json", "bounds", "1", "96"]);
        let v: Vec<BoundRecord> = serde_json::from_str(&out).unwrap();
        assert!(!v.is_empty());
    }

    #[test]
    fn usage_errors_and_help() {
        assert_eq!(run_str(&["--help"]).0, 0);
        assert_eq!(run_str(&["--version"]).0, 0);
        assert_eq!(run_str(&[]).0, EXIT_USAGE);
        assert_eq!(run_str(&["frobnicate"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["campaign", "b9"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["--precision", "32", "check", "1", "5"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["--precision", "512", "--precision-cap", "256", "check", "1", "5"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["--workers", "0", "check", "1", "5"]).0, EXIT_USAGE);
    }

    #[test]
    fn config_file_is_overridden_by_flags() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.conf");
        fs::write(&p, "# defaults\nformat = json\nprecision=128\n").unwrap();
        let ps = p.to_str().unwrap();
        let (_, out, _) = run_str(&["--config", ps, "check", "1", "5"]);
        assert!(out.trim_start().starts_with('{'));
        let (_, out, _) = run_str(&["--config", ps, "--format", "text", "check", "1", "5"]);
        assert!(out.contains("yes"));
        fs::write(&p, "colour=blue\n").unwrap();
        assert_eq!(run_str(&["--config", ps, "check", "1", "5"]).0, EXIT_USAGE);
        assert!(parse_config("precision 5").is_err());
    }

    #[test]
    fn bound_literals() {
        assert_eq!(parse_bound("4.3e19"), Some(Integer::from(43u64) * Integer::from(10u64).pow(18)));
        assert_eq!(parse_bound("12.5"), Some(Integer::from(13)));
        assert_eq!(parse_bound("0"), None);
        assert_eq!(parse_bound("abc"), None);
    }

    #[test]
    fn campaigns_write_reports() {
        let dir = tempfile::tempdir().unwrap();
        let d = dir.path().to_str().unwrap();
        let (code, out, _) = run_str(&["--output-dir", d, "campaign", "b1", "--a-max", "12"]);
        assert_eq!(code, 0, "{out}");
        assert!(dir.path().join("b1/summary.csv").exists());
        let (code, _, _) = run_str(&["--output-dir", d, "--workers", "2", "campaign", "b1", "--a-max", "12", "--resume"]);
        assert_eq!(code, 0);
        let (code, out, _) = run_str(&["--output-dir", d, "campaign", "b2"]);
        assert_eq!(code, 0, "{out}");
        assert!(out.contains("check b3_eliminated: true"));
        let (code, _, _) = run_str(&["--output-dir", d, "campaign", "conjecture1", "--limit", "2000"]);
        assert_eq!(code, 0);
        let (code, _, _) = run_str(&["--output-dir", d, "campaign", "theorem15", "--limit", "2000"]);
        assert_eq!(code, 0);
        let (code, out, _) = run_str(&["--output-dir", d, "campaign", "spotcheck", "--a-max", "6", "--m-max", "40"]);
        assert_eq!(code, 0, "{out}");
        assert_eq!(run_str(&["--output-dir", d, "campaign", "b1", "--a-max", "20000"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["--output-dir", d, "campaign", "spotcheck", "--a-max", "60"]).0, EXIT_USAGE);
    }
}

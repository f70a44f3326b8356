//! Checkpointed campaign execution and report files.
//!
//! Output directory layout:
//!
//! ```text
//! checkpoint/<a>_<b>.json   one finished case per file
//! cases.jsonl               every case, sorted by (a, b)
//! transcripts.jsonl         every reduction step
//! summary.csv               a, b, verdict, final_M, steps, precision_bits, wall_ms
//! summary.json              counts and checks; independent of timing and workers
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{evaluate_cases, exit_status, CampaignSpec, CaseItem, CaseResult};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CsvRow {
    pub a: u64,
    pub b: String,
    pub verdict: String,
    #[serde(rename = "final_M")]
    pub final_m: String,
    pub steps: u32,
    pub precision_bits: u32,
    pub wall_ms: u64,
}

impl From<&CaseResult> for CsvRow {
    fn from(r: &CaseResult) -> Self {
        CsvRow {
            a: r.a,
            b: r.b.to_string(),
            verdict: r.verdict.label().into(),
            final_m: r.verdict.final_m().map(ToString::to_string).unwrap_or_default(),
            steps: r.steps,
            precision_bits: r.precision_bits,
            wall_ms: r.wall_ms,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CampaignSummary {
    pub name: String,
    pub cases: usize,
    pub counts: BTreeMap<String, usize>,
    pub excluded: usize,
    #[serde(rename = "max_final_M")]
    pub max_final_m: Option<String>,
    pub max_steps_used: u32,
    pub exit_status: i32,
    /// Extra facts a campaign certifies besides its cases.
    pub checks: BTreeMap<String, bool>,
}

impl CampaignSummary {
    pub fn new(name: &str, results: &[CaseResult], checks: BTreeMap<String, bool>) -> Self {
        let mut counts = BTreeMap::new();
        for r in results {
            *counts.entry(r.verdict.label().to_string()).or_insert(0) += 1;
        }
        CampaignSummary {
            name: name.into(),
            cases: results.len(),
            counts,
            excluded: results.iter().filter(|r| r.excluded).count(),
            max_final_m: results
                .iter()
                .filter(|r| !r.excluded)
                .filter_map(|r| r.verdict.final_m())
                .max()
                .map(ToString::to_string),
            max_steps_used: results.iter().map(|r| r.steps).max().unwrap_or(0),
            exit_status: exit_status(results),
            checks,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CampaignReport {
    pub summary: CampaignSummary,
    pub results: Vec<CaseResult>,
    /// Cases taken from checkpoints instead of recomputed.
    pub resumed: usize,
    pub output_dir: PathBuf,
}

impl CampaignReport {
    pub fn exit_status(&self) -> i32 {
        self.summary.exit_status
    }
}

fn marker_name(item: &CaseItem) -> String {
    format!("{}_{}.json", item.a, item.b)
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn load_marker(path: &Path, item: &CaseItem) -> Option<CaseResult> {
    let text = fs::read_to_string(path).ok()?;
    let r: CaseResult = serde_json::from_str(&text).ok()?;
    (r.a == item.a && r.b == item.b && r.kind == item.kind && r.max_steps == item.max_steps).then_some(r)
}

/// Runs a campaign, writing reports into `output_dir`.
///
/// With `resume`, finished cases found in the checkpoint directory are
/// reused; otherwise every case is recomputed and its marker overwritten.
/// Cases run in chunks so that an interrupted run loses at most one chunk.
pub fn run_campaign(
    spec: &CampaignSpec,
    output_dir: &Path,
    resume: bool,
    checks: BTreeMap<String, bool>,
) -> Result<CampaignReport> {
    let items = spec.items()?;
    fs::create_dir_all(output_dir)?;
    let ckpt = spec
        .checkpoint_path
        .clone()
        .unwrap_or_else(|| output_dir.join("checkpoint"));
    fs::create_dir_all(&ckpt)?;

    let mut slots: Vec<Option<CaseResult>> = vec![None; items.len()];
    let mut resumed = 0;
    if resume {
        for (slot, item) in slots.iter_mut().zip(&items) {
            if let Some(r) = load_marker(&ckpt.join(marker_name(item)), item) {
                *slot = Some(r);
                resumed += 1;
            }
        }
    }
    let todo: Vec<usize> = (0..items.len()).filter(|&i| slots[i].is_none()).collect();
    let chunk = (spec.parallelism * 4).max(1);
    for idx in todo.chunks(chunk) {
        let batch: Vec<CaseItem> = idx.iter().map(|&i| items[i].clone()).collect();
        let done = evaluate_cases(&batch, spec.precision, spec.parallelism)?;
        for (&i, r) in idx.iter().zip(done) {
            write_atomic(&ckpt.join(marker_name(&items[i])), serde_json::to_string(&r)?.as_bytes())?;
            slots[i] = Some(r);
        }
    }

    let mut results: Vec<CaseResult> = slots.into_iter().map(Option::unwrap).collect();
    results.sort_by_key(CaseResult::key);
    write_reports(output_dir, &results)?;
    let summary = CampaignSummary::new(&spec.name, &results, checks);
    write_atomic(
        &output_dir.join("summary.json"),
        (serde_json::to_string_pretty(&summary)? + "\n").as_bytes(),
    )?;
    Ok(CampaignReport {
        summary,
        results,
        resumed,
        output_dir: output_dir.to_path_buf(),
    })
}

fn write_reports(dir: &Path, results: &[CaseResult]) -> Result<()> {
    let mut cases = fs::File::create(dir.join("cases.jsonl"))?;
    let mut transcripts = fs::File::create(dir.join("transcripts.jsonl"))?;
    for r in results {
        writeln!(cases, "{}", serde_json::to_string(r)?)?;
        if let Some(t) = &r.transcript {
            transcripts.write_all(t.to_jsonl()?.as_bytes())?;
        }
    }
    let mut w = csv::Writer::from_path(dir.join("summary.csv"))?;
    for r in results {
        w.serialize(CsvRow::from(r))?;
    }
    w.flush()?;
    Ok(())
}

/// Lines of `cases.jsonl` with the timing field cleared.
pub fn read_cases(dir: &Path) -> Result<Vec<CaseResult>> {
    let text = fs::read_to_string(dir.join("cases.jsonl"))?;
    text.lines()
        .map(|l| Ok(serde_json::from_str::<CaseResult>(l)?.without_timing()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::CampaignSpec;

    fn spec(a_max: u64, workers: usize) -> CampaignSpec {
        CampaignSpec {
            parallelism: workers,
            ..CampaignSpec::b1(a_max)
        }
    }

    #[test]
    fn summaries_do_not_depend_on_workers() {
        let d1 = tempfile::tempdir().unwrap();
        let d8 = tempfile::tempdir().unwrap();
        let r1 = run_campaign(&spec(30, 1), d1.path(), false, BTreeMap::new()).unwrap();
        let r8 = run_campaign(&spec(30, 8), d8.path(), false, BTreeMap::new()).unwrap();
        assert_eq!((r1.exit_status(), r8.exit_status()), (0, 0));
        assert_eq!(
            fs::read(d1.path().join("summary.json")).unwrap(),
            fs::read(d8.path().join("summary.json")).unwrap()
        );
        assert_eq!(read_cases(d1.path()).unwrap(), read_cases(d8.path()).unwrap());
        assert_eq!(
            fs::read(d1.path().join("transcripts.jsonl")).unwrap(),
            fs::read(d8.path().join("transcripts.jsonl")).unwrap()
        );
    }

    #[test]
    fn resumed_run_matches_uninterrupted() {
        let full = tempfile::tempdir().unwrap();
        let part = tempfile::tempdir().unwrap();
        run_campaign(&spec(24, 2), full.path(), false, BTreeMap::new()).unwrap();
        run_campaign(&spec(10, 2), part.path(), false, BTreeMap::new()).unwrap();
        // a torn marker from the interruption must be ignored
        fs::write(part.path().join("checkpoint/11_736.json"), "{\"a\":").unwrap();
        let r = run_campaign(&spec(24, 2), part.path(), true, BTreeMap::new()).unwrap();
        assert_eq!(r.resumed, 10);
        assert_eq!(read_cases(full.path()).unwrap(), read_cases(part.path()).unwrap());
        assert_eq!(
            fs::read(full.path().join("summary.json")).unwrap(),
            fs::read(part.path().join("summary.json")).unwrap()
        );
    }

    #[test]
    fn csv_has_documented_columns() {
        let d = tempfile::tempdir().unwrap();
        run_campaign(&spec(4, 1), d.path(), false, BTreeMap::new()).unwrap();
        let mut rd = csv::Reader::from_path(d.path().join("summary.csv")).unwrap();
        let headers: Vec<String> = rd.headers().unwrap().iter().map(String::from).collect();
        assert_eq!(headers, ["a", "b", "verdict", "final_M", "steps", "precision_bits", "wall_ms"]);
        let rows: Vec<CsvRow> = rd.deserialize().collect::<std::result::Result<_, _>>().unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[2].verdict, "skipped");
        assert!(rows[0].final_m.parse::<u64>().unwrap() <= 1);
    }

    #[test]
    fn empty_range_is_an_error() {
        let d = tempfile::tempdir().unwrap();
        let s = CampaignSpec {
            a_range: 3..=2,
            ..spec(3, 1)
        };
        assert!(run_campaign(&s, d.path(), false, BTreeMap::new()).is_err());
    }

    #[test]
    fn unresolved_cases_set_status_two() {
        let d = tempfile::tempdir().unwrap();
        let s = CampaignSpec {
            name: "stalled".into(),
            max_steps: 0,
            ..spec(2, 1)
        };
        let r = run_campaign(&s, d.path(), false, BTreeMap::new()).unwrap();
        assert!(r.results.iter().all(|c| c.verdict.is_unresolved()));
        assert_eq!(r.exit_status(), 2);
    }
}

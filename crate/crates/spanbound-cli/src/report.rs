//! Run-log aggregation: JSONL records in, Markdown and CSV out.
//!
//! Output ordering never depends on input order: summary rows sort by
//! checker then backend, CSV rows by (checker, backend, instance, seed),
//! and columns by key. Identical logs therefore render identical bytes.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num::BigRational;

use crate::runner::{CliError, RunRecord};

/// Append records to a JSONL log, one record per line.
pub fn append_jsonl(path: &Path, records: &[RunRecord]) -> Result<(), CliError> {
    let mut file = fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| CliError::Usage(format!("cannot open {}: {e}", path.display())))?;
    for r in records {
        let line = serde_json::to_string(r)
            .map_err(|e| CliError::Usage(format!("cannot serialize record: {e}")))?;
        writeln!(file, "{line}")
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

/// Read every record from the given JSONL logs; blank lines are skipped.
pub fn read_jsonl(paths: &[PathBuf]) -> Result<Vec<RunRecord>, CliError> {
    let mut out = Vec::new();
    for path in paths {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        for (lineno, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let record: RunRecord = serde_json::from_str(line).map_err(|e| {
                CliError::Usage(format!("{}:{}: {e}", path.display(), lineno + 1))
            })?;
            out.push(record);
        }
    }
    Ok(out)
}

#[derive(Default)]
struct Stats {
    runs: usize,
    passes: usize,
    failures: usize,
    findings: usize,
}

/// Markdown summary: pass counts per (checker, backend), then the
/// extremal instances (tightest Kneser slack, largest rho).
pub fn markdown_summary(records: &[RunRecord]) -> String {
    let mut stats: BTreeMap<(String, String), Stats> = BTreeMap::new();
    for r in records {
        let entry = stats
            .entry((r.checker.clone(), r.backend.clone()))
            .or_default();
        entry.runs += 1;
        if r.holds {
            entry.passes += 1;
        } else if r.failed() {
            entry.failures += 1;
        } else {
            entry.findings += 1;
        }
    }
    let mut out = String::new();
    out.push_str("# Run summary\n\n");
    out.push_str("| checker | backend | runs | passes | failures | findings |\n");
    out.push_str("|---|---|---:|---:|---:|---:|\n");
    for ((checker, backend), s) in &stats {
        out.push_str(&format!(
            "| {checker} | {backend} | {} | {} | {} | {} |\n",
            s.runs, s.passes, s.failures, s.findings
        ));
    }
    let mut extremal = Vec::new();
    if let Some((r, slack)) = min_by_quantity_i64(records, "slack") {
        extremal.push(format!(
            "- tightest Kneser slack: {slack} ({} on {}, seed {}, instance {})",
            r.checker, r.backend, r.seed, r.instance
        ));
    }
    if let Some((r, rho)) = max_by_quantity_rational(records, "rho") {
        extremal.push(format!(
            "- largest rho: {rho} ({} on {}, seed {}, instance {})",
            r.checker, r.backend, r.seed, r.instance
        ));
    }
    if !extremal.is_empty() {
        out.push_str("\n## Extremal instances\n\n");
        for line in extremal {
            out.push_str(&line);
            out.push('\n');
        }
    }
    out
}

fn min_by_quantity_i64<'a>(
    records: &'a [RunRecord],
    key: &str,
) -> Option<(&'a RunRecord, i64)> {
    records
        .iter()
        .filter_map(|r| {
            let v = r.quantities.get(key)?.parse::<i64>().ok()?;
            Some((r, v))
        })
        .min_by_key(|(r, v)| (*v, r.checker.clone(), r.backend.clone(), r.instance, r.seed))
}

fn max_by_quantity_rational<'a>(
    records: &'a [RunRecord],
    key: &str,
) -> Option<(&'a RunRecord, BigRational)> {
    records
        .iter()
        .filter_map(|r| {
            let v = BigRational::from_str(r.quantities.get(key)?).ok()?;
            Some((r, v))
        })
        .max_by(|(ra, va), (rb, vb)| {
            // Ties resolve toward the lexicographically earliest record so
            // the report is stable under input reordering.
            va.cmp(vb).then_with(|| {
                (&rb.checker, &rb.backend, rb.instance, rb.seed).cmp(&(
                    &ra.checker,
                    &ra.backend,
                    ra.instance,
                    ra.seed,
                ))
            })
        })
}

fn csv_escape(value: &str) -> String {
    if value.contains(',') || value.contains('"') || value.contains('\n') {
        format!("\"{}\"", value.replace('"', "\"\""))
    } else {
        value.to_string()
    }
}

/// Every raw quantity as CSV: fixed record columns, then the union of
/// quantity keys in sorted order; absent quantities render empty.
pub fn csv_quantities(records: &[RunRecord]) -> String {
    let mut keys: BTreeSet<&str> = BTreeSet::new();
    for r in records {
        keys.extend(r.quantities.keys().map(String::as_str));
    }
    let mut sorted: Vec<&RunRecord> = records.iter().collect();
    sorted.sort_by(|a, b| {
        (&a.checker, &a.backend, a.instance, a.seed).cmp(&(
            &b.checker,
            &b.backend,
            b.instance,
            b.seed,
        ))
    });
    let mut out = String::from("checker,backend,instance,seed,proven,holds");
    for k in &keys {
        out.push(',');
        out.push_str(&csv_escape(k));
    }
    out.push('\n');
    for r in sorted {
        out.push_str(&format!(
            "{},{},{},{},{},{}",
            csv_escape(&r.checker),
            csv_escape(&r.backend),
            r.instance,
            r.seed,
            r.proven,
            r.holds
        ));
        for k in &keys {
            out.push(',');
            if let Some(v) = r.quantities.get(*k) {
                out.push_str(&csv_escape(v));
            }
        }
        out.push('\n');
    }
    out
}

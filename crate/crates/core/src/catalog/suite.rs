use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    ade_entry, apply_golden, fermat_entry, regular_entry, AdeKind, FamilyEntry, FamilyKind,
    GoldenRow,
};
use crate::frobenius::{
    classify_observed, fedder_is_fpure, free_rank_aq, hypersurface_series, naive_free_rank_oracle,
    thm54_from_report, FrobeniusError, SplittingConfig, SplittingReport, Thm54Outcome, Verdict,
    ORACLE_CAP,
};
use crate::qseries::{a_invariant, artinian_reduction, e_prime, sw_bound, Rational};
use crate::wpoly::Polynomial;

pub const SCHEMA_VERSION: u32 = 1;

pub const CSV_HEADER: [&str; 15] = [
    "family",
    "index",
    "p",
    "e",
    "q",
    "a_q",
    "ratio",
    "a_inv",
    "eprime",
    "bound",
    "fedder",
    "lemma51",
    "symmetry",
    "thm54",
    "golden_match",
];

/// Scales of the system of parameters used for the Artinian reductions.
const THM54_SCALES: [u64; 2] = [2, 3];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckOutcome {
    Pass,
    Fail,
    Skipped,
}

impl CheckOutcome {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            CheckOutcome::Pass
        } else {
            CheckOutcome::Fail
        }
    }

    /// Fail if any input failed, Pass if at least one passed, else Skipped.
    pub fn combine<'a>(outcomes: impl IntoIterator<Item = &'a CheckOutcome>) -> Self {
        let mut acc = CheckOutcome::Skipped;
        for o in outcomes {
            match o {
                CheckOutcome::Fail => return CheckOutcome::Fail,
                CheckOutcome::Pass => acc = CheckOutcome::Pass,
                CheckOutcome::Skipped => {}
            }
        }
        acc
    }

    pub fn as_str(self) -> &'static str {
        match self {
            CheckOutcome::Pass => "pass",
            CheckOutcome::Fail => "fail",
            CheckOutcome::Skipped => "skipped",
        }
    }
}

type Checks = BTreeMap<String, CheckOutcome>;

fn set(checks: &mut Checks, name: &str, outcome: CheckOutcome) {
    checks.insert(name.to_string(), outcome);
}

/// One Frobenius power of one entry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowRecord {
    pub e: u32,
    pub q: u64,
    pub report: Option<SplittingReport>,
    /// Why no report was produced.
    pub skipped: Option<String>,
    pub oracle_a_q: Option<u64>,
    pub thm54: Vec<Thm54Outcome>,
    pub checks: Checks,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub id: String,
    pub family: FamilyKind,
    pub index: Vec<u32>,
    pub prime: u32,
    pub e_max: u32,
    pub equation: String,
    pub weights: Vec<u32>,
    pub a_inv: Option<i64>,
    pub eprime: Option<Rational>,
    pub bound: Option<Rational>,
    pub fedder: Option<bool>,
    pub verdict: Option<Verdict>,
    pub reports: Vec<RowRecord>,
    pub checks: Checks,
    pub errors: Vec<String>,
    /// Seconds since the Unix epoch at completion.
    pub timestamp: Option<u64>,
}

impl ExperimentRecord {
    fn sort_key(&self) -> (FamilyKind, Vec<u32>, u32) {
        (self.family, self.index.clone(), self.prime)
    }

    pub fn index_label(&self) -> String {
        self.index
            .iter()
            .map(|i| i.to_string())
            .collect::<Vec<_>>()
            .join(".")
    }
}

/// A catalog entry with the largest Frobenius exponent to compute.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteCell {
    pub entry: FamilyEntry,
    pub e_max: u32,
}

/// Computes everything for one entry. Errors are captured in the record;
/// checks whose inputs are missing are `Skipped`.
pub fn run_entry(entry: &FamilyEntry, e_max: u32, budget: u64) -> ExperimentRecord {
    let mut rec = ExperimentRecord {
        id: entry.id(),
        family: entry.family,
        index: entry.index.clone(),
        prime: entry.prime,
        e_max,
        equation: entry.equation.clone(),
        weights: entry.weights.clone(),
        a_inv: None,
        eprime: None,
        bound: None,
        fedder: None,
        verdict: None,
        reports: Vec::new(),
        checks: Checks::new(),
        errors: Vec::new(),
        timestamp: None,
    };
    match entry.polynomial() {
        Ok(f) => evaluate(entry, &f, budget, &mut rec),
        Err(err) => rec.errors.push(format!("parse: {err}")),
    }
    rec.timestamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .ok()
        .map(|d| d.as_secs());
    rec
}

fn evaluate(entry: &FamilyEntry, f: &Polynomial, budget: u64, rec: &mut ExperimentRecord) {
    let d = entry.dim();
    let series = match hypersurface_series(f) {
        Ok(s) => Some(s),
        Err(err) => {
            rec.errors.push(format!("series: {err}"));
            None
        }
    };
    if let Some(s) = &series {
        let a = a_invariant(s);
        rec.a_inv = Some(a);
        match e_prime(s, d) {
            Ok(ep) => {
                if d >= 1 {
                    rec.bound = Some(sw_bound(a, d as u32, &ep));
                }
                rec.eprime = Some(ep);
            }
            Err(err) => rec.errors.push(format!("eprime: {err}")),
        }
    }
    match fedder_is_fpure(f) {
        Ok(v) => rec.fedder = Some(v),
        Err(err) => rec.errors.push(format!("fedder: {err}")),
    }

    let sop_ok = match (&series, entry.sop_degrees.is_empty()) {
        (Some(s), false) => {
            let ok = artinian_reduction(s, &entry.sop_degrees).is_ok();
            set(&mut rec.checks, "sop_valid", CheckOutcome::from_bool(ok));
            ok
        }
        _ => {
            set(&mut rec.checks, "sop_valid", CheckOutcome::Skipped);
            false
        }
    };
    golden_checks(entry, rec);
    let prop22 = match (rec.fedder, rec.a_inv) {
        (Some(fp), Some(a)) => CheckOutcome::from_bool(!(fp && a > 0)),
        _ => CheckOutcome::Skipped,
    };
    set(&mut rec.checks, "prop22", prop22);

    let cfg = SplittingConfig::with_budget(budget);
    let mut exhausted = false;
    for e in 1..=rec.e_max {
        let q = (entry.prime as u64).saturating_pow(e);
        let mut row = RowRecord {
            e,
            q,
            report: None,
            skipped: None,
            oracle_a_q: None,
            thm54: Vec::new(),
            checks: Checks::new(),
        };
        if exhausted {
            row.skipped = Some("budget".into());
        } else {
            match free_rank_aq(f, e, &cfg) {
                Ok(rep) => row.report = Some(rep),
                Err(FrobeniusError::BudgetExceeded { needed, limit }) => {
                    exhausted = true;
                    row.skipped = Some(format!("budget: {needed} > {limit}"));
                }
                Err(err) => {
                    rec.errors.push(format!("e={e}: {err}"));
                    row.skipped = Some(err.to_string());
                }
            }
        }
        row_checks(entry, f, rec, &mut row, sop_ok);
        rec.reports.push(row);
    }

    let aq_values: Vec<(u32, u64)> = rec
        .reports
        .iter()
        .filter_map(|r| r.report.as_ref().map(|rep| (rep.e, rep.a_q)))
        .collect();
    let fedder_consistency =
        CheckOutcome::combine(rec.reports.iter().filter_map(|r| r.checks.get("fedder")));
    set(&mut rec.checks, "fedder_consistency", fedder_consistency);
    let verdict_check = match (rec.fedder, rec.a_inv) {
        (Some(fp), Some(a)) if !aq_values.is_empty() => {
            let verdict = classify_observed(fp, a, aq_values).verdict;
            rec.verdict = Some(verdict);
            match entry.expected_verdict {
                Some(expected) => CheckOutcome::from_bool(verdict == expected),
                None => CheckOutcome::Skipped,
            }
        }
        _ => CheckOutcome::Skipped,
    };
    set(&mut rec.checks, "verdict", verdict_check);
}

fn golden_checks(entry: &FamilyEntry, rec: &mut ExperimentRecord) {
    let compare = |golden: Option<bool>| match golden {
        Some(ok) => CheckOutcome::from_bool(ok),
        None => CheckOutcome::Skipped,
    };
    let a_match = compare(match (entry.golden_a, rec.a_inv) {
        (Some(g), Some(a)) => Some(g == a),
        (Some(_), None) => Some(false),
        _ => None,
    });
    let eprime_match = compare(match (&entry.golden_eprime, &rec.eprime) {
        (Some(g), Some(c)) => Some(g == c),
        (Some(_), None) => Some(false),
        _ => None,
    });
    let bound_match = compare(match (&entry.golden_bound, &rec.bound) {
        (Some(g), Some(c)) => Some(g == c),
        (Some(_), None) => Some(false),
        _ => None,
    });
    set(
        &mut rec.checks,
        "golden_match",
        CheckOutcome::combine(&[a_match, eprime_match, bound_match]),
    );

    let d = entry.dim() as u32;
    let consistency = match (&entry.golden_a, &entry.golden_eprime, &entry.golden_bound) {
        (Some(a), Some(ep), Some(b)) if d >= 1 => {
            CheckOutcome::from_bool(&sw_bound(*a, d, ep) == b)
        }
        _ => CheckOutcome::Skipped,
    };
    set(&mut rec.checks, "golden_consistency", consistency);

    // The printed e' must be the one value that breaks the bound column,
    // while the computed e' matches the corrected one.
    let printed = match (&entry.printed_eprime, &entry.golden_a, &entry.golden_bound) {
        (Some(pe), Some(a), Some(b)) if d >= 1 => {
            CheckOutcome::from_bool(&sw_bound(*a, d, pe) != b && rec.eprime.as_ref() != Some(pe))
        }
        _ => CheckOutcome::Skipped,
    };
    set(&mut rec.checks, "printed_eprime_inconsistent", printed);
}

fn row_checks(
    entry: &FamilyEntry,
    f: &Polynomial,
    rec: &ExperimentRecord,
    row: &mut RowRecord,
    sop_ok: bool,
) {
    let names = [
        "fedder",
        "lemma51",
        "symmetry",
        "thm54",
        "bound_respected",
        "convergence",
        "kunz",
        "oracle",
    ];
    for name in names {
        set(&mut row.checks, name, CheckOutcome::Skipped);
    }
    let Some(rep) = row.report.clone() else {
        return;
    };
    let q = rep.q;
    let slack = Rational::new(2, q);

    if let Some(fp) = rec.fedder {
        set(
            &mut row.checks,
            "fedder",
            CheckOutcome::from_bool(fp == (rep.a_q >= 1)),
        );
    }
    if let Some(ok) = rep.lemma51_ok {
        set(&mut row.checks, "lemma51", CheckOutcome::from_bool(ok));
    }
    if sop_ok {
        let mut sym = Vec::new();
        let mut holds = Vec::new();
        for scale in THM54_SCALES {
            match thm54_from_report(f, &rep, &entry.sop_degrees, scale) {
                Ok(out) => {
                    sym.push(CheckOutcome::from_bool(out.symmetric));
                    holds.push(CheckOutcome::from_bool(
                        out.holds && out.minus_ok && out.plus_ok,
                    ));
                    row.thm54.push(out);
                }
                Err(_) => {
                    sym.push(CheckOutcome::Fail);
                    holds.push(CheckOutcome::Fail);
                }
            }
        }
        set(&mut row.checks, "symmetry", CheckOutcome::combine(&sym));
        set(&mut row.checks, "thm54", CheckOutcome::combine(&holds));
    }
    if entry.family.is_ade() {
        if let Some(b) = &entry.golden_bound {
            let ok = rep.ratio <= b.clone() + slack.clone();
            set(
                &mut row.checks,
                "bound_respected",
                CheckOutcome::from_bool(ok),
            );
        }
    }
    if let Some(s) = &entry.golden_s {
        let ok = (rep.ratio.clone() - s.clone()).abs() <= slack;
        set(&mut row.checks, "convergence", CheckOutcome::from_bool(ok));
    }
    if entry.family == FamilyKind::Regular {
        let d = entry.dim() as u32;
        set(
            &mut row.checks,
            "kunz",
            CheckOutcome::from_bool(rep.a_q == q.pow(d)),
        );
    }
    let size = (q as u128).checked_pow(entry.variables.len() as u32);
    if size.is_some_and(|s| s <= ORACLE_CAP as u128) {
        let outcome = match naive_free_rank_oracle(f, rep.e) {
            Ok(a) => {
                row.oracle_a_q = Some(a);
                CheckOutcome::from_bool(a == rep.a_q)
            }
            Err(_) => CheckOutcome::Fail,
        };
        set(&mut row.checks, "oracle", outcome);
    }
}

/// Runs every entry in parallel; records come back ordered by family,
/// index and prime.
pub fn run_suite(entries: &[FamilyEntry], e_max: u32, budget: u64) -> Vec<ExperimentRecord> {
    let mut records: Vec<ExperimentRecord> = entries
        .par_iter()
        .map(|e| run_entry(e, e_max, budget))
        .collect();
    records.sort_by_key(|r| r.sort_key());
    records
}

/// The regression suite: ADE singularities at their smallest admissible
/// primes and one more, regular rings, and the Fermat cubic on both sides
/// of p mod 3.
pub fn paper_suite() -> Vec<SuiteCell> {
    let mut cells = Vec::new();
    let mut push = |entry: FamilyEntry, e_max: u32| cells.push(SuiteCell { entry, e_max });
    for n in 1..=4 {
        for p in [3, 5] {
            let e_max = if n == 1 && p == 3 { 3 } else { 2 };
            push(ade_entry(AdeKind::A, n, p).unwrap(), e_max);
        }
    }
    for n in 4..=6 {
        for p in [3, 5] {
            push(ade_entry(AdeKind::D, n, p).unwrap(), 2);
        }
    }
    for (n, primes) in [(6, [5, 7]), (7, [5, 7]), (8, [7, 11])] {
        for p in primes {
            push(ade_entry(AdeKind::E, n, p).unwrap(), 2);
        }
    }
    for dim in [2, 3] {
        for p in [2, 3, 5] {
            push(regular_entry(dim, p).unwrap(), 2);
        }
    }
    for p in [5, 7, 11, 13] {
        push(fermat_entry(3, p).unwrap(), 2);
    }
    cells
}

/// Runs [`paper_suite`], optionally with overridden reference values.
pub fn verify_paper(budget: u64, golden: Option<&[GoldenRow]>) -> Vec<ExperimentRecord> {
    let mut cells = paper_suite();
    if let Some(rows) = golden {
        let mut entries: Vec<FamilyEntry> = cells.iter().map(|c| c.entry.clone()).collect();
        apply_golden(&mut entries, rows);
        for (cell, entry) in cells.iter_mut().zip(entries) {
            cell.entry = entry;
        }
    }
    let mut records: Vec<ExperimentRecord> = cells
        .par_iter()
        .map(|c| run_entry(&c.entry, c.e_max, budget))
        .collect();
    records.sort_by_key(|r| r.sort_key());
    records
}

/// Zeroes wall-clock fields so that reruns produce identical files.
pub fn strip_timings(records: &mut [ExperimentRecord]) {
    for rec in records {
        rec.timestamp = None;
        for row in &mut rec.reports {
            if let Some(rep) = &mut row.report {
                rep.elapsed_ms = 0;
            }
        }
    }
}

/// Human-readable list of every failed check and captured error.
pub fn failed_checks(records: &[ExperimentRecord]) -> Vec<String> {
    let mut out = Vec::new();
    for rec in records {
        for err in &rec.errors {
            out.push(format!("{}: error: {err}", rec.id));
        }
        for (name, outcome) in &rec.checks {
            if *outcome == CheckOutcome::Fail {
                out.push(format!("{}: {name}", rec.id));
            }
        }
        for row in &rec.reports {
            for (name, outcome) in &row.checks {
                if *outcome == CheckOutcome::Fail {
                    out.push(format!("{} e={}: {name}", rec.id, row.e));
                }
            }
        }
    }
    out
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_csv(records: &[ExperimentRecord], path: &Path) -> io::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(CSV_HEADER)?;
    for rec in records {
        let entry_golden = CheckOutcome::combine(
            [
                "golden_match",
                "golden_consistency",
                "printed_eprime_inconsistent",
                "verdict",
            ]
            .iter()
            .filter_map(|k| rec.checks.get(*k)),
        );
        for row in &rec.reports {
            let check = |k: &str| row.checks.get(k).copied().unwrap_or(CheckOutcome::Skipped);
            let row_golden = CheckOutcome::combine(
                std::iter::once(&entry_golden).chain(
                    ["bound_respected", "convergence", "kunz", "oracle"]
                        .iter()
                        .filter_map(|k| row.checks.get(*k)),
                ),
            );
            let rep = row.report.as_ref();
            w.write_record([
                rec.family.to_string(),
                rec.index_label(),
                rec.prime.to_string(),
                row.e.to_string(),
                row.q.to_string(),
                opt(&rep.map(|r| r.a_q)),
                opt(&rep.map(|r| r.ratio.clone())),
                opt(&rec.a_inv),
                opt(&rec.eprime),
                opt(&rec.bound),
                check("fedder").as_str().to_string(),
                check("lemma51").as_str().to_string(),
                check("symmetry").as_str().to_string(),
                check("thm54").as_str().to_string(),
                row_golden.as_str().to_string(),
            ])?;
        }
    }
    w.flush()
}

#[derive(Serialize, Deserialize)]
struct JsonDoc {
    schema: u32,
    records: Vec<ExperimentRecord>,
}

pub fn write_json(records: &[ExperimentRecord], path: &Path) -> io::Result<()> {
    let doc = JsonDoc {
        schema: SCHEMA_VERSION,
        records: records.to_vec(),
    };
    let mut text = serde_json::to_string_pretty(&doc).map_err(io::Error::other)?;
    text.push('\n');
    fs::write(path, text)
}

/// Reads a file written by [`write_json`].
pub fn read_json(path: &Path) -> io::Result<Vec<ExperimentRecord>> {
    let doc: JsonDoc =
        serde_json::from_str(&fs::read_to_string(path)?).map_err(io::Error::other)?;
    if doc.schema != SCHEMA_VERSION {
        return Err(io::Error::other(format!(
            "unsupported schema {}",
            doc.schema
        )));
    }
    Ok(doc.records)
}

/// Writes `results.csv` and `results.json` into `dir`.
pub fn write_reports(records: &[ExperimentRecord], dir: &Path) -> io::Result<(PathBuf, PathBuf)> {
    fs::create_dir_all(dir)?;
    let csv_path = dir.join("results.csv");
    let json_path = dir.join("results.json");
    write_csv(records, &csv_path)?;
    write_json(records, &json_path)?;
    Ok((csv_path, json_path))
}

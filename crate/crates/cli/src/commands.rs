use std::path::Path;

use fsig_core::catalog::{
    failed_checks, golden_table, random_corpus, strip_timings, verify_paper as run_verify,
    write_reports, CheckOutcome, GoldenRow,
};
use fsig_core::frobenius::{
    classify_observed, fedder_is_fpure, free_rank_aq, hypersurface_a_invariant,
    hypersurface_series, naive_free_rank_oracle, Classification, FrobeniusError, SplittingConfig,
    SplittingReport,
};
use fsig_core::qseries::{a_invariant, e_prime, sw_bound};
use fsig_core::wpoly::Polynomial;
use fsig_core::Rational;
use serde::{Deserialize, Serialize};

use crate::job::JobSpec;
use crate::{Failure, EXIT_BUDGET, EXIT_CHECK, EXIT_ORACLE};

pub struct Output {
    pub json: bool,
    pub approx: bool,
}

impl From<crate::OutputArgs> for Output {
    fn from(a: crate::OutputArgs) -> Self {
        Output {
            json: a.json,
            approx: a.approx,
        }
    }
}

impl Output {
    fn rational(&self, r: &Rational) -> String {
        if self.approx {
            format!("{r} (~{})", r.approx())
        } else {
            r.to_string()
        }
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::input(e.to_string()))?;
    println!("{text}");
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundReport {
    pub series: String,
    pub d: usize,
    pub a: i64,
    pub eprime: Rational,
    pub bound: Rational,
}

pub fn bound(spec: &JobSpec, out: &Output) -> Result<(), Failure> {
    let f = spec.polynomial()?;
    let series = hypersurface_series(&f).map_err(Failure::from_frobenius)?;
    let d = f.ring().nvars() - 1;
    if d == 0 {
        return Err(Failure::input("the bound needs at least two variables"));
    }
    let a = a_invariant(&series);
    let eprime = e_prime(&series, d).map_err(|e| Failure::input(e.to_string()))?;
    let report = BoundReport {
        series: series.to_string(),
        d,
        a,
        bound: sw_bound(a, d as u32, &eprime),
        eprime,
    };
    if out.json {
        return print_json(&report);
    }
    println!("series: {}", report.series);
    println!("d: {}", report.d);
    println!("a: {}", report.a);
    println!("e': {}", out.rational(&report.eprime));
    println!("bound: {}", out.rational(&report.bound));
    Ok(())
}

fn config_for(f: &Polynomial, budget: u64) -> SplittingConfig {
    SplittingConfig {
        budget,
        profile: f.weighted_degree().is_ok(),
    }
}

fn check_oracle(f: &Polynomial, rep: &SplittingReport) -> Result<u64, Failure> {
    let expected = naive_free_rank_oracle(f, rep.e).map_err(Failure::from_frobenius)?;
    if expected != rep.a_q {
        return Err(Failure::new(
            EXIT_ORACLE,
            format!(
                "oracle mismatch at e={}: blocked {} vs reference {}",
                rep.e, rep.a_q, expected
            ),
        ));
    }
    Ok(expected)
}

fn print_report(rep: &SplittingReport, out: &Output) {
    println!(
        "e={} q={} a_q={} ratio={}",
        rep.e,
        rep.q,
        rep.a_q,
        out.rational(&rep.ratio)
    );
    if let Some(profile) = &rep.degree_profile {
        let cells: Vec<String> = profile.iter().map(|(n, c)| format!("{n}:{c}")).collect();
        println!("  profile (degree:count): {}", cells.join(" "));
    }
    if let Some(ok) = rep.lemma51_ok {
        println!("  generator degrees within -a(q-1): {ok}");
    }
}

pub fn aq(spec: &JobSpec, e: u32, budget: u64, oracle: bool, out: &Output) -> Result<(), Failure> {
    let f = spec.polynomial()?;
    let rep = free_rank_aq(&f, e, &config_for(&f, budget)).map_err(Failure::from_frobenius)?;
    if oracle {
        check_oracle(&f, &rep)?;
    }
    if out.json {
        return print_json(&rep);
    }
    print_report(&rep, out);
    if oracle {
        println!("  oracle: agrees");
    }
    Ok(())
}

pub fn fsignature(
    spec: &JobSpec,
    e_max: u32,
    budget: u64,
    oracle: bool,
    out: &Output,
) -> Result<(), Failure> {
    let f = spec.polynomial()?;
    let cfg = config_for(&f, budget);
    let mut reports = Vec::new();
    let mut truncated = None;
    for e in 1..=e_max {
        match free_rank_aq(&f, e, &cfg) {
            Ok(rep) => {
                if oracle {
                    check_oracle(&f, &rep)?;
                }
                reports.push(rep);
            }
            Err(err @ FrobeniusError::BudgetExceeded { .. }) => {
                truncated = Some((e, err));
                break;
            }
            Err(err) => return Err(Failure::from_frobenius(err)),
        }
    }
    if reports.is_empty() {
        if let Some((_, err)) = truncated {
            return Err(Failure::new(EXIT_BUDGET, err.to_string()));
        }
    }
    if out.json {
        print_json(&reports)?;
    } else {
        for rep in &reports {
            print_report(rep, out);
        }
    }
    if let Some((e, err)) = truncated {
        eprintln!("fsig: stopped at e={e}: {err}");
    }
    Ok(())
}

pub fn classify(spec: &JobSpec, e_max: u32, budget: u64, out: &Output) -> Result<(), Failure> {
    let f = spec.polynomial()?;
    let a_inv = hypersurface_a_invariant(&f).map_err(Failure::from_frobenius)?;
    let is_f_pure = fedder_is_fpure(&f).map_err(Failure::from_frobenius)?;
    let cfg = SplittingConfig {
        budget,
        profile: false,
    };
    let mut aq_values = Vec::new();
    for e in 1..=e_max {
        match free_rank_aq(&f, e, &cfg) {
            Ok(rep) => aq_values.push((rep.e, rep.a_q)),
            Err(FrobeniusError::BudgetExceeded { .. }) => break,
            Err(err) => return Err(Failure::from_frobenius(err)),
        }
    }
    let c: Classification = classify_observed(is_f_pure, a_inv, aq_values);
    if out.json {
        return print_json(&c);
    }
    println!("{}", c.verdict);
    println!("f-pure: {}", c.is_f_pure);
    println!("a: {}", c.a_inv);
    let cells: Vec<String> = c
        .aq_values
        .iter()
        .map(|(e, a)| format!("e={e}:{a}"))
        .collect();
    println!("a_q: {}", cells.join(" "));
    Ok(())
}

pub fn fedder(spec: &JobSpec, out: &Output) -> Result<(), Failure> {
    let f = spec.polynomial()?;
    let pure = fedder_is_fpure(&f).map_err(Failure::from_frobenius)?;
    if out.json {
        return print_json(&serde_json::json!({ "f_pure": pure }));
    }
    println!("{}", if pure { "F-pure" } else { "not F-pure" });
    Ok(())
}

fn read_golden(path: &Path) -> Result<Vec<GoldenRow>, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

pub fn verify_paper(
    out_dir: &Path,
    budget: u64,
    golden: Option<&Path>,
    timings: bool,
) -> Result<(), Failure> {
    let rows = golden.map(read_golden).transpose()?;
    let mut records = run_verify(budget, rows.as_deref());
    if !timings {
        strip_timings(&mut records);
    }
    let (csv_path, json_path) = write_reports(&records, out_dir)
        .map_err(|e| Failure::input(format!("{}: {e}", out_dir.display())))?;

    let mut counts = [0usize; 3];
    for rec in &records {
        let all = rec
            .checks
            .values()
            .chain(rec.reports.iter().flat_map(|r| r.checks.values()));
        for c in all {
            counts[match c {
                CheckOutcome::Pass => 0,
                CheckOutcome::Fail => 1,
                CheckOutcome::Skipped => 2,
            }] += 1;
        }
    }
    println!(
        "{} entries: {} passed, {} failed, {} skipped checks",
        records.len(),
        counts[0],
        counts[1],
        counts[2]
    );
    println!("wrote {} and {}", csv_path.display(), json_path.display());
    let failures = failed_checks(&records);
    if failures.is_empty() {
        return Ok(());
    }
    for line in &failures {
        println!("FAIL {line}");
    }
    Err(Failure::new(
        EXIT_CHECK,
        format!("{} failed checks", failures.len()),
    ))
}

pub fn golden() -> Result<(), Failure> {
    print_json(&golden_table())
}

pub fn corpus(
    seed: u64,
    count: usize,
    max_vars: usize,
    max_weight: u32,
    primes: &[u32],
    check: bool,
) -> Result<(), Failure> {
    if max_vars < 2 || max_weight < 1 || primes.is_empty() {
        return Err(Failure::input(
            "need max_vars >= 2, max_weight >= 1 and a prime",
        ));
    }
    if let Some(&p) = primes.iter().find(|&&p| !is_prime(p)) {
        return Err(Failure::input(format!("{p} is not prime")));
    }
    let entries = random_corpus(seed, count, max_vars, max_weight, primes);
    if !check {
        return print_json(&entries);
    }
    let mut violations = 0;
    for entry in &entries {
        let f = entry.polynomial().map_err(Failure::from_poly)?;
        let a = hypersurface_a_invariant(&f).map_err(Failure::from_frobenius)?;
        let pure = fedder_is_fpure(&f).map_err(Failure::from_frobenius)?;
        if pure && a > 0 {
            violations += 1;
            println!("VIOLATION {}: {} (a = {a})", entry.id(), entry.equation);
        }
    }
    println!("{} entries, {violations} F-pure with a > 0", entries.len());
    if violations > 0 {
        return Err(Failure::new(EXIT_CHECK, "corpus check failed"));
    }
    Ok(())
}

fn is_prime(n: u32) -> bool {
    n >= 2
        && (2..)
            .take_while(|d| d * d <= n)
            .all(|d| !n.is_multiple_of(d))
}

//! Acceptance gate: one line per criterion, then a single assertion.
//!
//! Run with `cargo test -p fsig-cli --test acceptance -- --nocapture`.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use fsig_core::catalog::{
    ade_entry, diagonal_entry, fermat_entry, random_corpus, regular_entry, verify_paper, AdeKind,
    CheckOutcome, FamilyEntry,
};
use fsig_core::frobenius::{
    classify_theorem53, fedder_is_fpure, free_rank_aq, hypersurface_a_invariant,
    hypersurface_series, naive_free_rank_oracle, SplittingConfig, Verdict, DEFAULT_BUDGET,
    ORACLE_CAP,
};
use fsig_core::qseries::{a_invariant, e_prime, sw_bound};
use fsig_core::Rational;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn r(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed <= limit, || {
        format!("took {elapsed:?}, limit {limit:?}")
    })
}

/// `(e', a, bound)` from the series of the entry's equation.
fn invariants(entry: &FamilyEntry) -> (Rational, i64, Rational) {
    let f = entry.polynomial().unwrap();
    let s = hypersurface_series(&f).unwrap();
    let a = a_invariant(&s);
    let ep = e_prime(&s, 2).unwrap();
    let b = sw_bound(a, 2, &ep);
    (ep, a, b)
}

fn table_reproduction() -> Outcome {
    let start = Instant::now();
    // Rows of the reference table: type, e', a, right-hand side.
    let mut rows: Vec<(FamilyEntry, Rational, i64, Rational)> = (1..=4)
        .map(|n| {
            let m = n as i64 + 1;
            (ade_entry(AdeKind::A, n, 3).unwrap(), r(1, m), -2, r(1, m))
        })
        .collect();
    rows.push((ade_entry(AdeKind::E, 6, 5).unwrap(), r(1, 6), -1, r(1, 24)));
    rows.push((ade_entry(AdeKind::E, 7, 5).unwrap(), r(1, 12), -1, r(1, 48)));
    rows.push((
        ade_entry(AdeKind::E, 8, 7).unwrap(),
        r(1, 30),
        -1,
        r(1, 120),
    ));
    for (entry, ep, a, b) in &rows {
        let got = invariants(entry);
        ensure(got == (ep.clone(), *a, b.clone()), || {
            format!("{}: got {:?}", entry.id(), got)
        })?;
    }
    for n in 4..=6i64 {
        let entry = ade_entry(AdeKind::D, n as u32, 3).unwrap();
        let (ep, a, b) = invariants(&entry);
        ensure(
            a == -1 && b == r(1, 4 * (n - 2)) && ep == r(1, n - 2),
            || format!("D{n}: e'={ep} a={a} bound={b}"),
        )?;
        let printed = r(1, n - 1);
        ensure(sw_bound(-1, 2, &printed) != r(1, 4 * (n - 2)), || {
            format!("D{n}: printed e' unexpectedly consistent")
        })?;
    }
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok("A1-A4, D4-D6, E6-E8 exact; printed D_n e' = 1/(n-1) inconsistent with bound".into())
}

fn polynomial_ring_bound() -> Outcome {
    let start = Instant::now();
    let expected = [r(1, 1), r(1, 1), r(9, 8), r(4, 3)];
    for (d, want) in (1..=4u32).zip(expected) {
        let entry = regular_entry(d, 3).unwrap();
        let f = entry.polynomial().unwrap();
        let s = hypersurface_series(&f).unwrap();
        let a = a_invariant(&s);
        let got = sw_bound(a, d, &e_prime(&s, d as usize).unwrap());
        ensure(got == want, || format!("d={d}: {got} != {want}"))?;
        ensure((got == Rational::one()) == (d <= 2), || {
            format!("d={d}: equality case")
        })?;
    }
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok("1, 1, 9/8, 4/3 for d = 1..4".into())
}

fn kunz_anchor() -> Outcome {
    let start = Instant::now();
    for p in [2, 3, 5] {
        let f = regular_entry(2, p).unwrap().polynomial().unwrap();
        for e in 1..=2 {
            let rep =
                free_rank_aq(&f, e, &SplittingConfig::default()).map_err(|e| e.to_string())?;
            ensure(
                rep.a_q == rep.q * rep.q && rep.ratio == Rational::one(),
                || format!("p={p} e={e}: a_q={}", rep.a_q),
            )?;
        }
    }
    within(start.elapsed(), Duration::from_secs(30))?;
    Ok("a_q = q^2 for p = 2, 3, 5 and e = 1, 2".into())
}

fn fedder_anchors() -> Outcome {
    let start = Instant::now();
    let a1 = ade_entry(AdeKind::A, 1, 3).unwrap().polynomial().unwrap();
    ensure(fedder_is_fpure(&a1).unwrap(), || "A1 p=3 not F-pure".into())?;
    for (p, pure) in [(7, true), (13, true), (5, false), (11, false)] {
        let f = fermat_entry(3, p).unwrap().polynomial().unwrap();
        ensure(fedder_is_fpure(&f).unwrap() == pure, || {
            format!("Fermat cubic p={p}")
        })?;
    }
    within(start.elapsed(), Duration::from_secs(5))?;
    Ok("A1/p=3 F-pure; cubic F-pure at 7, 13 and not at 5, 11".into())
}

fn unique_summand_anchor() -> Outcome {
    let start = Instant::now();
    let f = fermat_entry(3, 7).unwrap().polynomial().unwrap();
    for e in 1..=2 {
        let rep = free_rank_aq(&f, e, &SplittingConfig::default()).map_err(|e| e.to_string())?;
        ensure(rep.a_q == 1, || format!("e={e}: a_q={}", rep.a_q))?;
        ensure(rep.degree_profile.is_some(), || {
            "graded blocks not used".into()
        })?;
    }
    let c = classify_theorem53(&f, 2, &SplittingConfig::default()).map_err(|e| e.to_string())?;
    ensure(c.verdict == Verdict::UniqueSummand, || {
        format!("verdict {}", c.verdict)
    })?;
    ensure(c.aq_values == vec![(1, 1), (2, 1)], || {
        format!("{:?}", c.aq_values)
    })?;
    within(start.elapsed(), Duration::from_secs(300))?;
    Ok("cubic p=7: a_7 = a_49 = 1, UniqueSummand".into())
}

fn ade_convergence() -> Outcome {
    let start = Instant::now();
    let cells = [
        (ade_entry(AdeKind::A, 1, 3).unwrap(), 3),
        (ade_entry(AdeKind::A, 2, 5).unwrap(), 1),
        (ade_entry(AdeKind::E, 6, 5).unwrap(), 1),
    ];
    let mut shown = Vec::new();
    for (entry, e_max) in cells {
        let f = entry.polynomial().unwrap();
        let s = entry.golden_s.clone().unwrap();
        for e in 1..=e_max {
            let rep =
                free_rank_aq(&f, e, &SplittingConfig::default()).map_err(|e| e.to_string())?;
            let gap = (rep.ratio.clone() - s.clone()).abs();
            ensure(gap <= r(2, rep.q as i64), || {
                format!("{} q={}: |{} - {}| > 2/q", entry.id(), rep.q, rep.ratio, s)
            })?;
            if e == 1 {
                let oracle = naive_free_rank_oracle(&f, 1).map_err(|e| e.to_string())?;
                ensure(oracle == rep.a_q, || {
                    format!("{}: oracle {oracle}", entry.id())
                })?;
            }
            shown.push(format!("{}:{}", entry.id(), rep.ratio));
        }
    }
    within(start.elapsed(), Duration::from_secs(600))?;
    Ok(shown.join(" "))
}

/// ADE entries at every admissible prime up to 17, regular rings, Fermat
/// cubics and a few diagonal hypersurfaces.
fn wide_catalog() -> Vec<FamilyEntry> {
    let primes = [2, 3, 5, 7, 11, 13, 17];
    let mut out = Vec::new();
    for &p in &primes {
        for n in 1..=4 {
            out.extend(ade_entry(AdeKind::A, n, p).ok());
        }
        for n in 4..=6 {
            out.extend(ade_entry(AdeKind::D, n, p).ok());
        }
        for n in 6..=8 {
            out.extend(ade_entry(AdeKind::E, n, p).ok());
        }
        for d in 1..=3 {
            out.extend(regular_entry(d, p).ok());
        }
        out.extend(fermat_entry(3, p).ok());
        out.extend(diagonal_entry(&[2, 3, 5], p).ok());
        out.extend(diagonal_entry(&[2, 4, 4], p).ok());
    }
    out
}

fn oracle_equivalence() -> Outcome {
    let mut cells = 0;
    for entry in wide_catalog() {
        let f = entry.polynomial().unwrap();
        let n = entry.variables.len() as u32;
        for e in 1.. {
            let size = (entry.prime as u64).pow(e).pow(n);
            if size > ORACLE_CAP {
                break;
            }
            let rep =
                free_rank_aq(&f, e, &SplittingConfig::default()).map_err(|e| e.to_string())?;
            let oracle = naive_free_rank_oracle(&f, e).map_err(|e| e.to_string())?;
            ensure(rep.a_q == oracle, || {
                format!(
                    "{} e={e}: blocked {} vs oracle {oracle}",
                    entry.id(),
                    rep.a_q
                )
            })?;
            cells += 1;
        }
    }
    Ok(format!(
        "{cells} (entry, e) cells with q^n <= {ORACLE_CAP} agree"
    ))
}

fn degree_bound() -> Outcome {
    let mut cells = 0;
    for entry in wide_catalog() {
        let f = entry.polynomial().unwrap();
        if !fedder_is_fpure(&f).unwrap() {
            continue;
        }
        let a = hypersurface_a_invariant(&f).unwrap();
        for e in 1..=2 {
            let rep = match free_rank_aq(&f, e, &SplittingConfig::default()) {
                Ok(rep) => rep,
                Err(_) if e == 2 => continue,
                Err(err) => return Err(format!("{}: {err}", entry.id())),
            };
            let q = rep.q as i64;
            let profile = rep.degree_profile.as_ref().unwrap();
            let top = profile.keys().last().copied().unwrap_or(0) as i64;
            ensure(top <= -a * (q - 1) && rep.lemma51_ok == Some(true), || {
                format!("{} e={e}: degree {top} > {}", entry.id(), -a * (q - 1))
            })?;
            cells += 1;
        }
    }
    for p in [2, 3, 5, 7] {
        let f = regular_entry(1, p).unwrap().polynomial().unwrap();
        for e in 1..=2 {
            let rep = free_rank_aq(&f, e, &SplittingConfig::default()).unwrap();
            let top = *rep.degree_profile.as_ref().unwrap().keys().last().unwrap();
            ensure(top == rep.q - 1, || {
                format!("k[y], p={p} e={e}: top degree {top}")
            })?;
        }
    }
    Ok(format!(
        "{cells} F-pure cells within -a(q-1); k[y] attains q-1"
    ))
}

fn proof_machinery() -> Outcome {
    let records = verify_paper(DEFAULT_BUDGET, None);
    let (mut sym, mut ineq) = (0, 0);
    for rec in &records {
        ensure(rec.checks["sop_valid"] == CheckOutcome::Pass, || {
            format!("{}: sop", rec.id)
        })?;
        for row in &rec.reports {
            let Some(_) = row.report else { continue };
            for (name, counter) in [("symmetry", &mut sym), ("thm54", &mut ineq)] {
                ensure(row.checks[name] == CheckOutcome::Pass, || {
                    format!("{} e={}: {name} {:?}", rec.id, row.e, row.checks[name])
                })?;
                *counter += 1;
            }
            let scales: Vec<u64> = row.thm54.iter().map(|t| t.scale).collect();
            ensure(scales == vec![2, 3], || {
                format!("{}: scales {scales:?}", rec.id)
            })?;
        }
    }
    Ok(format!(
        "symmetry in {sym} cells, inequality in {ineq} cells, N = 2, 3"
    ))
}

fn corpus_property() -> Outcome {
    let start = Instant::now();
    let corpus = random_corpus(2024, 200, 3, 4, &[3, 5, 7]);
    ensure(corpus.len() == 200, || "short corpus".into())?;
    let (mut positive, mut pure) = (0, 0);
    for entry in &corpus {
        let f = entry.polynomial().map_err(|e| e.to_string())?;
        let a = hypersurface_a_invariant(&f).map_err(|e| e.to_string())?;
        let fp = fedder_is_fpure(&f).map_err(|e| e.to_string())?;
        ensure(!(fp && a > 0), || {
            format!("{}: {} F-pure with a = {a}", entry.id(), entry.equation)
        })?;
        positive += (a > 0) as usize;
        pure += fp as usize;
    }
    within(start.elapsed(), Duration::from_secs(300))?;
    Ok(format!(
        "0 violations; {positive} entries with a > 0, {pure} F-pure"
    ))
}

fn run_verify(dir: &Path, threads: &str) -> Result<(Vec<u8>, Vec<u8>), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_fsig"))
        .args(["verify-paper", "--out-dir"])
        .arg(dir)
        .env("FSIG_THREADS", threads)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(status.status.success(), || {
        format!(
            "threads={threads}: {}",
            String::from_utf8_lossy(&status.stdout)
        )
    })?;
    let read = |name: &str| std::fs::read(dir.join(name)).map_err(|e| e.to_string());
    Ok((read("results.csv")?, read("results.json")?))
}

fn determinism() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let one = run_verify(&tmp.path().join("t1"), "1")?;
    let eight = run_verify(&tmp.path().join("t8"), "8")?;
    let again = run_verify(&tmp.path().join("t1b"), "1")?;
    ensure(one == eight && one == again, || "outputs differ".into())?;
    Ok(format!(
        "{} CSV bytes, {} JSON bytes identical across 3 runs",
        one.0.len(),
        one.1.len()
    ))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 11] = [
        ("reference table (e', a, bound)", table_reproduction),
        ("polynomial ring bound", polynomial_ring_bound),
        ("regular ring a_q = q^d", kunz_anchor),
        ("Fedder anchors", fedder_anchors),
        ("unique free summand, cubic p=7", unique_summand_anchor),
        ("ADE convergence within 2/q", ade_convergence),
        ("blocked rank = unblocked oracle", oracle_equivalence),
        ("generator degrees <= -a(q-1)", degree_bound),
        ("symmetry and a_q <= 2 sum r_n", proof_machinery),
        ("no F-pure corpus entry with a > 0", corpus_property),
        ("deterministic verify-paper output", determinism),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match &outcome {
            Ok(detail) => println!("criterion {:>2} PASS {name} [{secs:.2}s]: {detail}", i + 1),
            Err(why) => {
                println!("criterion {:>2} FAIL {name} [{secs:.2}s]: {why}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

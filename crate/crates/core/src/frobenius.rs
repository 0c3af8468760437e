//! Characteristic-p invariants of a hypersurface `R = S/(f)`,
//! `S = F_p[x_1, ..., x_n]`.
//!
//! The splitting number `a_q` (q = p^e) is the length of
//! `S/(m^[q] : f^(q-1))`, which equals the rank of multiplication by
//! `f^(q-1)` on the monomial basis of `S/m^[q]`. For weighted-homogeneous
//! `f` that map shifts degrees by `(q-1) deg f`, so the matrix splits into
//! one block per source degree; the rank of the block at degree n is the
//! number of free-summand generators of degree n.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::time::Instant;

use num_bigint::{BigInt, BigUint};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{rank_fp, MatrixFp};
use crate::qseries::{
    a_invariant, artinian_reduction, check_gorenstein_symmetry, ci_series, Rational,
    RationalSeries, SeriesError,
};
use crate::wpoly::{Monomial, PolyError, Polynomial};

/// Default cap on `q^n`, the size of the monomial basis of `S/m^[q]`.
pub const DEFAULT_BUDGET: u64 = 1 << 21;

/// Hard cap on `q^n` for the unblocked oracle.
pub const ORACLE_CAP: u64 = 5000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrobeniusError {
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("polynomial has a nonzero constant term")]
    UnitPolynomial,
    #[error("basis of {needed} monomials exceeds the budget of {limit}")]
    BudgetExceeded { needed: u128, limit: u64 },
    #[error("polynomial is not weighted-homogeneous; degrees {0:?}")]
    NotHomogeneous(BTreeSet<u64>),
    #[error("Frobenius exponent must be at least 1")]
    InvalidExponent,
    #[error(transparent)]
    Poly(PolyError),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

impl From<PolyError> for FrobeniusError {
    fn from(e: PolyError) -> Self {
        match e {
            PolyError::NotHomogeneous(degrees) => FrobeniusError::NotHomogeneous(degrees),
            PolyError::ZeroPolynomial => FrobeniusError::ZeroPolynomial,
            other => FrobeniusError::Poly(other),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplittingConfig {
    /// Largest admissible `q^n`.
    pub budget: u64,
    /// Compute the graded profile (requires a homogeneous `f`).
    pub profile: bool,
}

impl Default for SplittingConfig {
    fn default() -> Self {
        SplittingConfig {
            budget: DEFAULT_BUDGET,
            profile: true,
        }
    }
}

impl SplittingConfig {
    pub fn with_budget(budget: u64) -> Self {
        SplittingConfig {
            budget,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplittingReport {
    pub e: u32,
    pub q: u64,
    pub a_q: u64,
    /// `a_q / q^d` with `d = n - 1`.
    pub ratio: Rational,
    /// Weighted degree -> number of free-summand generators in that degree.
    pub degree_profile: Option<BTreeMap<u64, u64>>,
    pub lemma51_ok: Option<bool>,
    pub block_count: usize,
    pub elapsed_ms: u64,
}

fn check_hypersurface(f: &Polynomial) -> Result<(), FrobeniusError> {
    if f.is_zero() {
        return Err(FrobeniusError::ZeroPolynomial);
    }
    if f.constant_term() != 0 {
        return Err(FrobeniusError::UnitPolynomial);
    }
    Ok(())
}

/// `(q, q^n)` after checking `q^n` against `limit`.
fn frobenius_size(f: &Polynomial, e: u32, limit: u64) -> Result<(u64, u64), FrobeniusError> {
    if e == 0 {
        return Err(FrobeniusError::InvalidExponent);
    }
    let p = f.ring().prime() as u128;
    let n = f.ring().nvars() as u32;
    let q = p.checked_pow(e);
    let size = q.and_then(|q| q.checked_pow(n));
    match (q, size) {
        (Some(q), Some(size)) if size <= limit as u128 => Ok((q as u64, size as u64)),
        _ => Err(FrobeniusError::BudgetExceeded {
            needed: size.unwrap_or(u128::MAX),
            limit,
        }),
    }
}

fn ratio(a_q: u64, q: u64, d: usize) -> Rational {
    Rational::new(a_q, num_traits::pow(BigInt::from(q), d))
}

/// Base-q key of an exponent vector with entries below `q`.
fn encode(exps: &[u32], q: u64) -> u64 {
    exps.iter().rev().fold(0u64, |acc, &e| acc * q + e as u64)
}

/// Exponent vectors with every entry below `bound` and weighted degree
/// exactly `degree`, in lexicographic order.
pub fn monomials_of_degree(weights: &[u64], bound: u64, degree: u64) -> Vec<Vec<u32>> {
    let n = weights.len();
    let mut out = Vec::new();
    if n == 0 || bound == 0 {
        if n == 0 && degree == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    // suffix[i] = largest degree reachable with variables i..n.
    let mut suffix = vec![0u64; n + 1];
    for i in (0..n).rev() {
        suffix[i] = suffix[i + 1] + (bound - 1) * weights[i];
    }
    let mut cur = vec![0u32; n];
    fn rec(
        i: usize,
        remaining: u64,
        weights: &[u64],
        bound: u64,
        suffix: &[u64],
        cur: &mut Vec<u32>,
        out: &mut Vec<Vec<u32>>,
    ) {
        if i == weights.len() {
            if remaining == 0 {
                out.push(cur.clone());
            }
            return;
        }
        if remaining > suffix[i] {
            return;
        }
        let w = weights[i];
        let top = (remaining / w).min(bound - 1);
        for e in 0..=top {
            cur[i] = e as u32;
            rec(i + 1, remaining - e * w, weights, bound, suffix, cur, out);
        }
        cur[i] = 0;
    }
    rec(0, degree, weights, bound, &suffix, &mut cur, &mut out);
    out
}

/// All exponent vectors with entries below `q`, indexed by `encode`.
fn all_monomials(n: usize, q: u64) -> Vec<Vec<u32>> {
    let total = (q as usize).pow(n as u32);
    (0..total as u64)
        .map(|mut key| {
            (0..n)
                .map(|_| {
                    let e = key % q;
                    key /= q;
                    e as u32
                })
                .collect()
        })
        .collect()
}

/// Terms of `f^(q-1)` reduced modulo `m^[q]`.
fn splitting_multiplier(f: &Polynomial, q: u64) -> Result<Vec<(Vec<u32>, u32)>, FrobeniusError> {
    let g = f.pow(q - 1)?.bracket_normal_form(q);
    Ok(g.terms()
        .iter()
        .map(|(m, c)| (m.exponents().to_vec(), *c))
        .collect())
}

/// Rows of multiplication by `g` from `sources` into the span of the
/// monomials indexed by `column`.
fn multiplication_matrix(
    sources: &[Vec<u32>],
    g: &[(Vec<u32>, u32)],
    q: u64,
    cols: usize,
    prime: u32,
    column: impl Fn(&[u32]) -> usize,
) -> MatrixFp {
    let mut triplets = Vec::new();
    let mut target = vec![0u32; sources.first().map_or(0, Vec::len)];
    for (r, mu) in sources.iter().enumerate() {
        'terms: for (tau, c) in g {
            for (j, (&a, &b)) in mu.iter().zip(tau).enumerate() {
                let s = a + b;
                if s as u64 >= q {
                    continue 'terms;
                }
                target[j] = s;
            }
            triplets.push((r, column(&target), *c));
        }
    }
    MatrixFp::from_triplets(sources.len(), cols, prime, triplets)
}

/// Splitting number `a_q` for `q = p^e`.
///
/// Homogeneous input is split into degree blocks evaluated in parallel;
/// otherwise the whole `q^n`-dimensional map is reduced at once and no
/// profile is produced (requesting one is an error).
pub fn free_rank_aq(
    f: &Polynomial,
    e: u32,
    cfg: &SplittingConfig,
) -> Result<SplittingReport, FrobeniusError> {
    let start = Instant::now();
    check_hypersurface(f)?;
    let (q, _) = frobenius_size(f, e, cfg.budget)?;
    let ring = f.ring();
    let n = ring.nvars();
    let d = n - 1;
    let prime = ring.prime();
    let degree = match f.weighted_degree() {
        Ok(deg) => Some(deg),
        Err(PolyError::NotHomogeneous(degrees)) => {
            if cfg.profile {
                return Err(FrobeniusError::NotHomogeneous(degrees));
            }
            None
        }
        Err(other) => return Err(other.into()),
    };
    let g = splitting_multiplier(f, q)?;

    let (a_q, profile, block_count) = match degree {
        Some(deg) => {
            let weights = ring.weights();
            let top = (q - 1) * weights.iter().sum::<u64>();
            let shift = (q - 1) * deg;
            let blocks: Vec<(u64, usize)> = if g.is_empty() || shift > top {
                Vec::new()
            } else {
                (0..=top - shift)
                    .into_par_iter()
                    .filter_map(|src| {
                        let sources = monomials_of_degree(&weights, q, src);
                        if sources.is_empty() {
                            return None;
                        }
                        let targets = monomials_of_degree(&weights, q, src + shift);
                        if targets.is_empty() {
                            return None;
                        }
                        let index: HashMap<u64, usize> = targets
                            .iter()
                            .enumerate()
                            .map(|(i, t)| (encode(t, q), i))
                            .collect();
                        let m = multiplication_matrix(&sources, &g, q, targets.len(), prime, |t| {
                            index[&encode(t, q)]
                        });
                        Some((src, rank_fp(&m)))
                    })
                    .collect()
            };
            let profile: BTreeMap<u64, u64> = blocks
                .iter()
                .filter(|&&(_, r)| r > 0)
                .map(|&(src, r)| (src, r as u64))
                .collect();
            let a_q = profile.values().sum();
            (a_q, Some(profile), blocks.len())
        }
        None => {
            let basis = all_monomials(n, q);
            let m =
                multiplication_matrix(&basis, &g, q, basis.len(), prime, |t| encode(t, q) as usize);
            (rank_fp(&m) as u64, None, 1)
        }
    };

    let lemma51_ok = match (&profile, degree) {
        (Some(profile), Some(deg)) if cfg.profile => {
            let a = deg as i64 - ring.weights().iter().sum::<u64>() as i64;
            Some(lemma51_holds(profile, a, q))
        }
        _ => None,
    };
    Ok(SplittingReport {
        e,
        q,
        a_q,
        ratio: ratio(a_q, q, d),
        degree_profile: if cfg.profile { profile } else { None },
        lemma51_ok,
        block_count,
        elapsed_ms: start.elapsed().as_millis() as u64,
    })
}

/// Unblocked reference for `a_q`: `f^(q-1)` by repeated multiplication,
/// each basis monomial multiplied and reduced as a polynomial, one
/// `q^n x q^n` matrix.
pub fn naive_free_rank_oracle(f: &Polynomial, e: u32) -> Result<u64, FrobeniusError> {
    check_hypersurface(f)?;
    let (q, _) = frobenius_size(f, e, ORACLE_CAP)?;
    let ring = f.ring().clone();
    let mut g = Polynomial::constant(ring.clone(), 1);
    for _ in 0..q - 1 {
        g = g.try_mul(f)?;
    }
    let basis = all_monomials(ring.nvars(), q);
    let mut triplets = Vec::new();
    for (r, exps) in basis.iter().enumerate() {
        let mono = Polynomial::monomial(ring.clone(), Monomial::new(exps.clone())?, 1);
        let image = mono.try_mul(&g)?.bracket_normal_form(q);
        for (m, c) in image.terms() {
            triplets.push((r, encode(m.exponents(), q) as usize, *c));
        }
    }
    let m = MatrixFp::from_triplets(basis.len(), basis.len(), ring.prime(), triplets);
    Ok(rank_fp(&m) as u64)
}

/// Fedder's test: `R` is F-pure iff `f^(p-1)` is not in `m^[p]`.
pub fn fedder_is_fpure(f: &Polynomial) -> Result<bool, FrobeniusError> {
    check_hypersurface(f)?;
    let p = f.ring().prime() as u64;
    Ok(!f.pow(p - 1)?.bracket_normal_form(p).is_zero())
}

/// Every degree carrying a free-summand generator is at most `-a (q-1)`.
pub fn lemma51_holds(profile: &BTreeMap<u64, u64>, a: i64, q: u64) -> bool {
    let limit = -(a as i128) * (q as i128 - 1);
    profile
        .iter()
        .filter(|&(_, &count)| count > 0)
        .all(|(&n, _)| n as i128 <= limit)
}

/// Reports for `e = 1..=e_max`. Stops after the first budget overrun,
/// leaving that error as the last entry.
pub fn fsignature_sequence(
    f: &Polynomial,
    e_max: u32,
    cfg: &SplittingConfig,
) -> Vec<Result<SplittingReport, FrobeniusError>> {
    let mut out = Vec::new();
    for e in 1..=e_max {
        let r = free_rank_aq(f, e, cfg);
        let stop = matches!(r, Err(FrobeniusError::BudgetExceeded { .. }));
        out.push(r);
        if stop {
            break;
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Verdict {
    UniqueSummand,
    FPureRationalLike,
    NotFPure,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Verdict::UniqueSummand => "UniqueSummand",
            Verdict::FPureRationalLike => "FPureRationalLike",
            Verdict::NotFPure => "NotFPure",
            Verdict::Inconclusive => "Inconclusive",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub is_f_pure: bool,
    pub a_inv: i64,
    /// `a_q = 1` for every computed e (false when none was computed).
    pub unique_summand_all_e: bool,
    pub verdict: Verdict,
    /// `(e, a_q)` for every e that fit the budget.
    pub aq_values: Vec<(u32, u64)>,
}

/// a-invariant of `S/(f)` for homogeneous `f`.
pub fn hypersurface_a_invariant(f: &Polynomial) -> Result<i64, FrobeniusError> {
    let deg = f.weighted_degree()?;
    Ok(deg as i64 - f.ring().weights().iter().sum::<u64>() as i64)
}

/// Poincare series of `S/(f)` for homogeneous `f`.
pub fn hypersurface_series(f: &Polynomial) -> Result<RationalSeries, FrobeniusError> {
    let deg = f.weighted_degree()?;
    Ok(ci_series(&f.ring().weights(), &[deg])?)
}

/// Sorts `S/(f)` into the cases of the unique-free-summand
/// characterization: F-pure with `a = 0` should give `a_q = 1` for all e,
/// F-pure with `a < 0` growing `a_q`, and non-F-pure `a_q = 0`. Observed
/// splitting numbers that contradict the case make the verdict
/// `Inconclusive`, as does a budget too small for any e.
pub fn classify_theorem53(
    f: &Polynomial,
    e_max: u32,
    cfg: &SplittingConfig,
) -> Result<Classification, FrobeniusError> {
    let a_inv = hypersurface_a_invariant(f)?;
    let is_f_pure = fedder_is_fpure(f)?;
    let cfg = SplittingConfig {
        profile: false,
        ..*cfg
    };
    let mut aq_values = Vec::new();
    for r in fsignature_sequence(f, e_max, &cfg) {
        match r {
            Ok(rep) => aq_values.push((rep.e, rep.a_q)),
            Err(FrobeniusError::BudgetExceeded { .. }) => break,
            Err(other) => return Err(other),
        }
    }
    Ok(classify_observed(is_f_pure, a_inv, aq_values))
}

/// Verdict from an F-purity answer, the a-invariant and the splitting
/// numbers already computed.
pub fn classify_observed(
    is_f_pure: bool,
    a_inv: i64,
    aq_values: Vec<(u32, u64)>,
) -> Classification {
    let unique_summand_all_e = !aq_values.is_empty() && aq_values.iter().all(|&(_, a)| a == 1);
    let verdict = if aq_values.is_empty() {
        Verdict::Inconclusive
    } else if !is_f_pure {
        if aq_values.iter().all(|&(_, a)| a == 0) {
            Verdict::NotFPure
        } else {
            Verdict::Inconclusive
        }
    } else if a_inv == 0 {
        if unique_summand_all_e {
            Verdict::UniqueSummand
        } else {
            Verdict::Inconclusive
        }
    } else if a_inv < 0 {
        let first = aq_values[0].1;
        let last = aq_values[aq_values.len() - 1].1;
        let grows = if aq_values.len() > 1 {
            last > first
        } else {
            last >= 1
        };
        if grows && aq_values.iter().all(|&(_, a)| a >= 1) {
            Verdict::FPureRationalLike
        } else {
            Verdict::Inconclusive
        }
    } else {
        // F-pure with a > 0 cannot happen for a graded Cohen-Macaulay ring.
        Verdict::Inconclusive
    };
    Classification {
        is_f_pure,
        a_inv,
        unique_summand_all_e,
        verdict,
        aq_values,
    }
}

/// Both sides of `a_q <= 2 * sum_{n <= T} r_n`, `T = floor(-a(q-1)/2)`,
/// where `r_n` are the graded dimensions of `R/(g_1^q, ..., g_d^q)` for a
/// homogeneous system of parameters `g_i` of degrees `scale * b_i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Thm54Outcome {
    pub e: u32,
    pub q: u64,
    pub scale: u64,
    pub a_inv: i64,
    pub a_q: u64,
    /// Generators of degree below `-a(q-1)/2`.
    pub a_minus: u64,
    /// Generators of degree at least `-a(q-1)/2`.
    pub a_plus: u64,
    pub threshold: i64,
    pub socle_degree: usize,
    /// `sum_{n <= T} r_n`.
    pub lower_sum: BigUint,
    /// `sum_{2n < -a(q-1)} r_n`, the bound for `a_minus`.
    pub minus_sum: BigUint,
    pub rhs: BigUint,
    pub minus_ok: bool,
    pub plus_ok: bool,
    pub symmetric: bool,
    pub holds: bool,
}

pub fn thm54_intermediate(
    f: &Polynomial,
    e: u32,
    sop_degrees: &[u64],
    scale: u64,
    cfg: &SplittingConfig,
) -> Result<Thm54Outcome, FrobeniusError> {
    // Validate the parameters before paying for the rank computation.
    let series = hypersurface_series(f)?;
    let (q, _) = frobenius_size(f, e, cfg.budget)?;
    let params: Vec<u64> = sop_degrees.iter().map(|&b| b * q * scale).collect();
    artinian_reduction(&series, &params)?;
    let report = free_rank_aq(
        f,
        e,
        &SplittingConfig {
            profile: true,
            ..*cfg
        },
    )?;
    thm54_from_report(f, &report, sop_degrees, scale)
}

/// Same as [`thm54_intermediate`] for an already computed report, which must
/// carry a degree profile.
pub fn thm54_from_report(
    f: &Polynomial,
    report: &SplittingReport,
    sop_degrees: &[u64],
    scale: u64,
) -> Result<Thm54Outcome, FrobeniusError> {
    let series = hypersurface_series(f)?;
    let a = a_invariant(&series);
    let q = report.q;
    let params: Vec<u64> = sop_degrees.iter().map(|&b| b * q * scale).collect();
    let artinian = artinian_reduction(&series, &params)?;
    let profile = report
        .degree_profile
        .as_ref()
        .expect("thm54 needs a degree profile");

    // Twice the midpoint, -a(q-1), keeps the comparisons integral.
    let doubled_mid = -(a as i128) * (q as i128 - 1);
    let threshold = doubled_mid.div_euclid(2) as i64;
    let a_minus: u64 = profile
        .iter()
        .filter(|&(&n, _)| 2 * (n as i128) < doubled_mid)
        .map(|(_, &c)| c)
        .sum();
    let a_plus = report.a_q - a_minus;
    let lower_sum = artinian.prefix_sum(threshold);
    let minus_sum: BigUint = artinian
        .coeffs
        .iter()
        .enumerate()
        .filter(|&(n, _)| 2 * (n as i128) < doubled_mid)
        .map(|(_, c)| c)
        .sum();
    let rhs = &lower_sum * 2u32;
    Ok(Thm54Outcome {
        e: report.e,
        q,
        scale,
        a_inv: a,
        a_q: report.a_q,
        a_minus,
        a_plus,
        threshold,
        socle_degree: artinian.socle_degree,
        minus_ok: BigUint::from(a_minus) <= minus_sum,
        plus_ok: BigUint::from(a_plus) <= lower_sum,
        holds: BigUint::from(report.a_q) <= rhs,
        symmetric: check_gorenstein_symmetry(&artinian),
        lower_sum,
        minus_sum,
        rhs,
    })
}

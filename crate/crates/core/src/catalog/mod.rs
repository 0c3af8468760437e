//! Built-in hypersurface families with their reference invariants, a
//! seeded random corpus, and the batch runner that checks computed values
//! against them.

mod corpus;
mod suite;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::frobenius::Verdict;
use crate::qseries::{sw_bound, Rational};
use crate::wpoly::{parse_poly, PolyError, Polynomial, WeightedRing};

pub use corpus::random_corpus;
pub use suite::{
    failed_checks, paper_suite, read_json, run_entry, run_suite, strip_timings, verify_paper,
    write_csv, write_json, write_reports, CheckOutcome, ExperimentRecord, RowRecord, SuiteCell,
    CSV_HEADER, SCHEMA_VERSION,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("{family} needs p >= {min_prime} (odd for A_n), got p = {p}")]
    UnsupportedCharacteristic {
        family: String,
        p: u32,
        min_prime: u32,
    },
    #[error("invalid index {index} for {family}")]
    BadIndex { family: String, index: String },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FamilyKind {
    A,
    D,
    E6,
    E7,
    E8,
    Regular,
    Fermat,
    Diagonal,
    Corpus,
}

impl FamilyKind {
    pub fn is_ade(self) -> bool {
        matches!(
            self,
            FamilyKind::A | FamilyKind::D | FamilyKind::E6 | FamilyKind::E7 | FamilyKind::E8
        )
    }

    /// Smallest characteristic the family is catalogued for.
    pub fn min_prime(self) -> u32 {
        match self {
            // Listed with p >= 2 in the reference table, but the quadric
            // form x^2 + y^2 + z^(n+1) is not reduced in characteristic 2.
            FamilyKind::A => 3,
            FamilyKind::D => 3,
            FamilyKind::E6 | FamilyKind::E7 => 5,
            FamilyKind::E8 => 7,
            FamilyKind::Regular
            | FamilyKind::Fermat
            | FamilyKind::Diagonal
            | FamilyKind::Corpus => 2,
        }
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// The three simple-singularity types with a free index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdeKind {
    A,
    D,
    /// Index 6, 7 or 8.
    E,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyEntry {
    pub family: FamilyKind,
    /// `n` for A_n, D_n, the variable count for regular rings, the degree
    /// for Fermat hypersurfaces, the exponents for diagonal ones, a serial
    /// number for corpus entries; empty for E_6, E_7, E_8.
    pub index: Vec<u32>,
    pub prime: u32,
    pub min_prime: u32,
    pub variables: Vec<String>,
    pub weights: Vec<u32>,
    pub equation: String,
    pub sop_degrees: Vec<u64>,
    pub golden_s: Option<Rational>,
    pub golden_eprime: Option<Rational>,
    /// e' as printed in the reference table when it disagrees with the
    /// table's own bound column.
    pub printed_eprime: Option<Rational>,
    pub golden_a: Option<i64>,
    pub golden_bound: Option<Rational>,
    pub expected_verdict: Option<Verdict>,
}

impl FamilyEntry {
    pub fn index_label(&self) -> String {
        self.index
            .iter()
            .map(|i| i.to_string())
            .collect::<Vec<_>>()
            .join(".")
    }

    /// Stable identifier such as `A1-p3` or `E8-p7`.
    pub fn id(&self) -> String {
        format!("{}{}-p{}", self.family, self.index_label(), self.prime)
    }

    pub fn dim(&self) -> usize {
        self.variables.len() - 1
    }

    pub fn ring(&self) -> Result<Arc<WeightedRing>, PolyError> {
        let vars = self
            .variables
            .iter()
            .cloned()
            .zip(self.weights.iter().copied());
        Ok(Arc::new(WeightedRing::new(
            self.prime as u64,
            vars,
            vec![],
        )?))
    }

    pub fn polynomial(&self) -> Result<Polynomial, PolyError> {
        parse_poly(&self.equation, &self.ring()?)
    }

    /// Same family data in another characteristic.
    pub fn at_prime(&self, p: u32) -> FamilyEntry {
        FamilyEntry {
            prime: p,
            ..self.clone()
        }
    }

    fn bare(
        family: FamilyKind,
        index: Vec<u32>,
        prime: u32,
        weights: Vec<u32>,
        equation: String,
    ) -> Self {
        FamilyEntry {
            family,
            index,
            prime,
            min_prime: family.min_prime(),
            variables: variable_names(weights.len()),
            weights,
            equation,
            sop_degrees: Vec::new(),
            golden_s: None,
            golden_eprime: None,
            printed_eprime: None,
            golden_a: None,
            golden_bound: None,
            expected_verdict: None,
        }
    }
}

/// `x, y, z` for up to three variables, `x1, x2, ...` beyond.
pub fn variable_names(n: usize) -> Vec<String> {
    if n <= 3 {
        ["x", "y", "z"][..n].iter().map(|s| s.to_string()).collect()
    } else {
        (1..=n).map(|i| format!("x{i}")).collect()
    }
}

fn check_prime(family: FamilyKind, p: u32) -> Result<(), CatalogError> {
    let min_prime = family.min_prime();
    let odd_ok = family != FamilyKind::A || p % 2 == 1;
    if p < min_prime || !odd_ok || !crate::wpoly::is_prime(p as u64) {
        return Err(CatalogError::UnsupportedCharacteristic {
            family: family.to_string(),
            p,
            min_prime,
        });
    }
    Ok(())
}

fn r(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

/// Rational double point of the given type in characteristic `p`, with its
/// reference invariants. For `AdeKind::E` the index selects E_6, E_7, E_8.
pub fn ade_entry(kind: AdeKind, n: u32, p: u32) -> Result<FamilyEntry, CatalogError> {
    let bad = |family: &str| CatalogError::BadIndex {
        family: family.to_string(),
        index: n.to_string(),
    };
    let (family, weights, equation, sop, s, eprime, a) = match kind {
        AdeKind::A => {
            if n < 1 {
                return Err(bad("A"));
            }
            let m = n as i64 + 1;
            (
                FamilyKind::A,
                vec![n + 1, n + 1, 2],
                format!("x^2+y^2+z^{}", n + 1),
                vec![n as u64 + 1, 2],
                r(1, m),
                r(1, m),
                -2,
            )
        }
        AdeKind::D => {
            if n < 4 {
                return Err(bad("D"));
            }
            let m = n as i64 - 2;
            (
                FamilyKind::D,
                vec![n - 1, 2, n - 2],
                format!("x^2+yz^2+y^{}", n - 1),
                vec![2, n as u64 - 2],
                r(1, 4 * m),
                r(1, m),
                -1,
            )
        }
        AdeKind::E => match n {
            6 => (
                FamilyKind::E6,
                vec![6, 4, 3],
                "x^2+y^3+z^4".to_string(),
                vec![4, 3],
                r(1, 24),
                r(1, 6),
                -1,
            ),
            7 => (
                FamilyKind::E7,
                vec![9, 6, 4],
                "x^2+y^3+yz^3".to_string(),
                vec![6, 4],
                r(1, 48),
                r(1, 12),
                -1,
            ),
            8 => (
                FamilyKind::E8,
                vec![15, 10, 6],
                "x^2+y^3+z^5".to_string(),
                vec![10, 6],
                r(1, 120),
                r(1, 30),
                -1,
            ),
            _ => return Err(bad("E")),
        },
    };
    check_prime(family, p)?;
    let index = match family {
        FamilyKind::A | FamilyKind::D => vec![n],
        _ => Vec::new(),
    };
    let mut entry = FamilyEntry::bare(family, index, p, weights, equation);
    entry.sop_degrees = sop;
    entry.golden_bound = Some(sw_bound(a, 2, &eprime));
    entry.golden_s = Some(s);
    entry.golden_eprime = Some(eprime);
    entry.golden_a = Some(a);
    if family == FamilyKind::D {
        entry.printed_eprime = Some(r(1, n as i64 - 1));
    }
    Ok(entry)
}

/// `F_p[x_1..x_n]` presented as the hypersurface `x_{n+1} = 0` in `n + 1`
/// variables.
pub fn regular_entry(dim: u32, p: u32) -> Result<FamilyEntry, CatalogError> {
    if dim < 1 {
        return Err(CatalogError::BadIndex {
            family: "Regular".into(),
            index: dim.to_string(),
        });
    }
    check_prime(FamilyKind::Regular, p)?;
    let nvars = dim as usize + 1;
    let names = variable_names(nvars);
    let equation = names[0].clone();
    let mut entry = FamilyEntry::bare(FamilyKind::Regular, vec![dim], p, vec![1; nvars], equation);
    entry.sop_degrees = vec![1; dim as usize];
    let a = -(dim as i64);
    entry.golden_s = Some(Rational::one());
    entry.golden_eprime = Some(Rational::one());
    entry.golden_a = Some(a);
    entry.golden_bound = Some(sw_bound(a, dim, &Rational::one()));
    Ok(entry)
}

/// `x^k + y^k + z^k`. For the cubic the expected classification follows
/// p mod 3: ordinary (unique summand) for p = 1, not F-pure for p = 2.
pub fn fermat_entry(degree: u32, p: u32) -> Result<FamilyEntry, CatalogError> {
    if degree < 2 {
        return Err(CatalogError::BadIndex {
            family: "Fermat".into(),
            index: degree.to_string(),
        });
    }
    check_prime(FamilyKind::Fermat, p)?;
    if degree.is_multiple_of(p) {
        return Err(CatalogError::UnsupportedCharacteristic {
            family: "Fermat".into(),
            p,
            min_prime: 2,
        });
    }
    let equation = format!("x^{degree}+y^{degree}+z^{degree}");
    let mut entry = FamilyEntry::bare(FamilyKind::Fermat, vec![degree], p, vec![1, 1, 1], equation);
    entry.sop_degrees = vec![1, 1];
    if degree == 3 {
        entry.expected_verdict = Some(if p % 3 == 1 {
            Verdict::UniqueSummand
        } else {
            Verdict::NotFPure
        });
    }
    Ok(entry)
}

/// `sum x_i^(a_i)` with weights `L / a_i`, `L = lcm(a_i)`.
pub fn diagonal_entry(exponents: &[u32], p: u32) -> Result<FamilyEntry, CatalogError> {
    if exponents.len() < 2 || exponents.contains(&0) {
        return Err(CatalogError::BadIndex {
            family: "Diagonal".into(),
            index: format!("{exponents:?}"),
        });
    }
    check_prime(FamilyKind::Diagonal, p)?;
    let lcm = exponents
        .iter()
        .fold(1u32, |acc, &a| num_integer::lcm(acc, a));
    let weights: Vec<u32> = exponents.iter().map(|&a| lcm / a).collect();
    let names = variable_names(exponents.len());
    let equation = names
        .iter()
        .zip(exponents)
        .map(|(v, a)| format!("{v}^{a}"))
        .collect::<Vec<_>>()
        .join("+");
    let mut entry = FamilyEntry::bare(
        FamilyKind::Diagonal,
        exponents.to_vec(),
        p,
        weights,
        equation,
    );
    // x_2, ..., x_n cut out the Artinian ring F_p[x_1]/(x_1^(a_1)).
    entry.sop_degrees = entry.weights[1..].iter().map(|&w| w as u64).collect();
    Ok(entry)
}

/// One row of the reference table; [`apply_golden`] overrides the values
/// stored on matching catalog entries.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldenRow {
    pub family: FamilyKind,
    pub index: Vec<u32>,
    pub s: Option<Rational>,
    pub eprime: Option<Rational>,
    pub printed_eprime: Option<Rational>,
    pub a: Option<i64>,
    pub bound: Option<Rational>,
}

impl GoldenRow {
    pub fn label(&self) -> String {
        let idx: Vec<String> = self.index.iter().map(|i| i.to_string()).collect();
        format!("{}{}", self.family, idx.join("."))
    }
}

/// Reference values for A_1..A_4, D_4..D_6, E_6, E_7, E_8.
pub fn golden_table() -> Vec<GoldenRow> {
    let mut specs: Vec<(AdeKind, u32)> = (1..=4).map(|n| (AdeKind::A, n)).collect();
    specs.extend((4..=6).map(|n| (AdeKind::D, n)));
    specs.extend((6..=8).map(|n| (AdeKind::E, n)));
    specs
        .into_iter()
        .map(|(kind, n)| {
            let e = ade_entry(kind, n, 7).expect("table entries are valid at p = 7");
            GoldenRow {
                family: e.family,
                index: e.index,
                s: e.golden_s,
                eprime: e.golden_eprime,
                printed_eprime: e.printed_eprime,
                a: e.golden_a,
                bound: e.golden_bound,
            }
        })
        .collect()
}

pub fn apply_golden(entries: &mut [FamilyEntry], rows: &[GoldenRow]) {
    for entry in entries.iter_mut() {
        if let Some(row) = rows
            .iter()
            .find(|r| r.family == entry.family && r.index == entry.index)
        {
            entry.golden_s = row.s.clone();
            entry.golden_eprime = row.eprime.clone();
            entry.printed_eprime = row.printed_eprime.clone();
            entry.golden_a = row.a;
            entry.golden_bound = row.bound.clone();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qseries::{a_invariant, ci_series, e_prime};

    fn all_ade(p: u32) -> Vec<FamilyEntry> {
        let mut out = Vec::new();
        for n in 1..=4 {
            out.push(ade_entry(AdeKind::A, n, p).unwrap());
        }
        for n in 4..=6 {
            out.push(ade_entry(AdeKind::D, n, p).unwrap());
        }
        for n in 6..=8 {
            out.push(ade_entry(AdeKind::E, n, p).unwrap());
        }
        out
    }

    #[test]
    fn equations_are_homogeneous_for_their_weights() {
        for e in all_ade(7) {
            let f = e.polynomial().unwrap();
            let deg = f.weighted_degree().unwrap();
            let expected = match e.family {
                FamilyKind::A => 2 * (e.index[0] as u64 + 1),
                FamilyKind::D => 2 * (e.index[0] as u64 - 1),
                FamilyKind::E6 => 12,
                FamilyKind::E7 => 18,
                FamilyKind::E8 => 30,
                _ => unreachable!(),
            };
            assert_eq!(deg, expected, "{}", e.id());
            assert_eq!(f.len(), 3, "{}", e.id());
        }
    }

    #[test]
    fn stored_values_agree_with_the_series() {
        for e in all_ade(7) {
            let f = e.polynomial().unwrap();
            let w: Vec<u64> = e.weights.iter().map(|&w| w as u64).collect();
            let s = ci_series(&w, &[f.weighted_degree().unwrap()]).unwrap();
            assert_eq!(Some(a_invariant(&s)), e.golden_a, "{}", e.id());
            assert_eq!(e_prime(&s, 2).ok(), e.golden_eprime, "{}", e.id());
            let bound = sw_bound(e.golden_a.unwrap(), 2, e.golden_eprime.as_ref().unwrap());
            assert_eq!(Some(bound), e.golden_bound, "{}", e.id());
            assert_eq!(e.golden_s, e.golden_bound, "{}", e.id());
        }
    }

    #[test]
    fn worked_examples() {
        let a2 = ade_entry(AdeKind::A, 2, 5).unwrap();
        assert_eq!(a2.golden_s, Some(r(1, 3)));
        assert_eq!(a2.golden_bound, Some(r(1, 3)));
        let e8 = ade_entry(AdeKind::E, 8, 7).unwrap();
        assert_eq!(e8.golden_s, Some(r(1, 120)));
        assert_eq!(e8.golden_a, Some(-1));
        assert_eq!(e8.golden_eprime, Some(r(1, 30)));
        let d5 = ade_entry(AdeKind::D, 5, 3).unwrap();
        assert_eq!(d5.golden_eprime, Some(r(1, 3)));
        assert_eq!(d5.printed_eprime, Some(r(1, 4)));
        assert_eq!(d5.weights, vec![4, 2, 3]);
        let e7 = ade_entry(AdeKind::E, 7, 5).unwrap();
        assert_eq!(e7.weights, vec![9, 6, 4]);
    }

    #[test]
    fn printed_d_eprime_contradicts_the_bound_column() {
        for n in 4..=6 {
            let d = ade_entry(AdeKind::D, n, 3).unwrap();
            let from_printed = sw_bound(-1, 2, d.printed_eprime.as_ref().unwrap());
            assert_ne!(Some(from_printed), d.golden_bound);
        }
    }

    #[test]
    fn characteristic_and_index_restrictions() {
        assert!(matches!(
            ade_entry(AdeKind::A, 1, 2),
            Err(CatalogError::UnsupportedCharacteristic { .. })
        ));
        assert!(matches!(
            ade_entry(AdeKind::E, 8, 5),
            Err(CatalogError::UnsupportedCharacteristic { .. })
        ));
        assert!(matches!(
            ade_entry(AdeKind::E, 6, 3),
            Err(CatalogError::UnsupportedCharacteristic { .. })
        ));
        assert!(ade_entry(AdeKind::E, 7, 5).is_ok());
        assert!(matches!(
            ade_entry(AdeKind::D, 3, 5),
            Err(CatalogError::BadIndex { .. })
        ));
        assert!(matches!(
            ade_entry(AdeKind::A, 0, 5),
            Err(CatalogError::BadIndex { .. })
        ));
        assert!(matches!(
            ade_entry(AdeKind::E, 9, 7),
            Err(CatalogError::BadIndex { .. })
        ));
        assert!(matches!(
            ade_entry(AdeKind::D, 4, 9),
            Err(CatalogError::UnsupportedCharacteristic { .. })
        ));
    }

    #[test]
    fn other_families() {
        let reg = regular_entry(3, 5).unwrap();
        assert_eq!(reg.variables, vec!["x1", "x2", "x3", "x4"]);
        assert_eq!(reg.golden_bound, Some(r(9, 8)));
        assert_eq!(reg.id(), "Regular3-p5");

        let fermat = fermat_entry(3, 7).unwrap();
        assert_eq!(fermat.expected_verdict, Some(Verdict::UniqueSummand));
        assert_eq!(
            fermat_entry(3, 11).unwrap().expected_verdict,
            Some(Verdict::NotFPure)
        );
        assert!(fermat_entry(3, 3).is_err());

        let diag = diagonal_entry(&[2, 3, 5], 7).unwrap();
        assert_eq!(diag.weights, vec![15, 10, 6]);
        assert_eq!(diag.polynomial().unwrap().weighted_degree().unwrap(), 30);
        assert_eq!(diag.id(), "Diagonal2.3.5-p7");
    }

    #[test]
    fn golden_override_replaces_values() {
        let mut rows = golden_table();
        assert_eq!(rows.len(), 10);
        let e8 = rows
            .iter_mut()
            .find(|r| r.family == FamilyKind::E8)
            .unwrap();
        e8.bound = Some(r(1, 121));
        let mut entries = vec![ade_entry(AdeKind::E, 8, 7).unwrap()];
        apply_golden(&mut entries, &rows);
        assert_eq!(entries[0].golden_bound, Some(r(1, 121)));
    }
}

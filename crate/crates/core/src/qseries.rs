//! Poincare series of graded complete intersections.
//!
//! A series is kept as an integer numerator over a product of factors
//! `(1 - t^k)`. Nothing is simplified on construction; cancellation happens
//! only when a limit or a finite quotient is requested.

use std::fmt;
use std::ops::{Add, Div, Mul, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("invalid degrees: {0}")]
    InvalidDegrees(String),
    #[error("pole order at t=1 is {actual}, expected {expected}")]
    PoleOrderMismatch { actual: i64, expected: i64 },
    #[error(
        "series times the parameter factors is not a polynomial with nonnegative coefficients"
    )]
    NotPolynomial,
}

/// Exact rational in lowest terms, rendered as `num/den` (always with the
/// denominator, also for integers).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Self {
        Rational(BigRational::new(num.into(), den.into()))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn abs(&self) -> Rational {
        Rational(self.0.abs())
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Decimal rendering with 6 significant digits, for display only.
    pub fn approx(&self) -> String {
        let x = self.to_f64();
        if x == 0.0 {
            return "0".to_string();
        }
        let magnitude = x.abs().log10().floor() as i32;
        let decimals = (5 - magnitude).max(0) as usize;
        format!("{x:.decimals$}")
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl FromStr for Rational {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let n: BigInt = n.parse().map_err(|_| format!("bad numerator in `{s}`"))?;
        let d: BigInt = d.parse().map_err(|_| format!("bad denominator in `{s}`"))?;
        if d.is_zero() {
            return Err(format!("zero denominator in `{s}`"));
        }
        Ok(Rational::new(n, d))
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! rational_op {
    ($trait:ident, $method:ident) => {
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
        impl<'a> $trait<&'a Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
    };
}

rational_op!(Add, add);
rational_op!(Sub, sub);
rational_op!(Mul, mul);
rational_op!(Div, div);

/// Integer polynomial in t, dense, index = degree. Trailing zeros trimmed.
type IntPoly = Vec<BigInt>;

fn trim(mut p: IntPoly) -> IntPoly {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

/// `p * (1 - t^k)`.
fn mul_one_minus(p: &[BigInt], k: usize) -> IntPoly {
    let mut out = vec![BigInt::zero(); p.len() + k];
    for (i, c) in p.iter().enumerate() {
        out[i] += c;
        out[i + k] -= c;
    }
    trim(out)
}

/// Exact quotient `p / (1 - t^k)`, or `None` if it leaves a remainder.
fn div_one_minus(p: &[BigInt], k: usize) -> Option<IntPoly> {
    if p.is_empty() {
        return Some(Vec::new());
    }
    if p.len() <= k {
        return None;
    }
    let qlen = p.len() - k;
    let mut quot = vec![BigInt::zero(); qlen];
    for n in 0..qlen {
        let mut c = p[n].clone();
        if n >= k {
            c += &quot[n - k];
        }
        quot[n] = c;
    }
    (mul_one_minus(&quot, k) == trim(p.to_vec())).then_some(quot)
}

fn eval_at_one(p: &[BigInt]) -> BigInt {
    p.iter().sum()
}

/// `numerator / prod (1 - t^k)` over the denominator factors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RationalSeries {
    numerator: Vec<BigInt>,
    /// Present when the numerator is known as `prod (1 - t^d_i)`.
    numerator_factors: Option<Vec<u64>>,
    denom_factors: Vec<u64>,
}

impl RationalSeries {
    pub fn new(numerator: Vec<BigInt>, denom_factors: Vec<u64>) -> Result<Self, SeriesError> {
        if denom_factors.contains(&0) {
            return Err(SeriesError::InvalidDegrees(
                "denominator factor of degree 0".into(),
            ));
        }
        let numerator = trim(numerator);
        if numerator.is_empty() {
            return Err(SeriesError::InvalidDegrees("zero numerator".into()));
        }
        Ok(RationalSeries {
            numerator,
            numerator_factors: None,
            denom_factors,
        })
    }

    pub fn numerator(&self) -> &[BigInt] {
        &self.numerator
    }

    pub fn numerator_factors(&self) -> Option<&[u64]> {
        self.numerator_factors.as_deref()
    }

    pub fn denom_factors(&self) -> &[u64] {
        &self.denom_factors
    }

    /// Multiplicity of t=1 as a root of the numerator.
    fn numerator_vanishing_order(&self) -> (usize, IntPoly) {
        let mut p = self.numerator.clone();
        let mut order = 0;
        while eval_at_one(&p).is_zero() {
            p = div_one_minus(&p, 1).expect("t=1 is a root");
            order += 1;
        }
        (order, p)
    }

    /// Order of the pole at t=1.
    pub fn pole_order(&self) -> i64 {
        self.denom_factors.len() as i64 - self.numerator_vanishing_order().0 as i64
    }
}

fn fmt_factor(k: u64) -> String {
    if k == 1 {
        "(1-t)".to_string()
    } else {
        format!("(1-t^{k})")
    }
}

fn fmt_int_poly(p: &[BigInt]) -> String {
    let mut parts: Vec<String> = Vec::new();
    for (i, c) in p.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let mag = c.abs();
        let body = match i {
            0 => mag.to_string(),
            _ => {
                let var = if i == 1 {
                    "t".to_string()
                } else {
                    format!("t^{i}")
                };
                if mag.is_one() {
                    var
                } else {
                    format!("{mag}*{var}")
                }
            }
        };
        let sign = if c.is_negative() { "-" } else { "+" };
        if parts.is_empty() {
            parts.push(if c.is_negative() {
                format!("-{body}")
            } else {
                body
            });
        } else {
            parts.push(format!("{sign} {body}"));
        }
    }
    parts.join(" ")
}

/// `(1-t^a)(1-t^b)/((1-t^c)(1-t^d)(1-t^e))`; an expanded numerator is
/// parenthesized, a trivial one prints as `1`.
impl fmt::Display for RationalSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let num = match &self.numerator_factors {
            Some(fs) if fs.is_empty() => "1".to_string(),
            Some(fs) => fs.iter().map(|&k| fmt_factor(k)).collect(),
            None if self.numerator == [BigInt::one()] => "1".to_string(),
            None => format!("({})", fmt_int_poly(&self.numerator)),
        };
        if self.denom_factors.is_empty() {
            return write!(f, "{num}");
        }
        let den: String = self.denom_factors.iter().map(|&k| fmt_factor(k)).collect();
        write!(f, "{num}/({den})")
    }
}

/// Series of `k[x_1..x_n]/(f_1..f_c)` for a homogeneous regular sequence of
/// degrees `rel_degrees` in variables of weights `weights`.
pub fn ci_series(weights: &[u64], rel_degrees: &[u64]) -> Result<RationalSeries, SeriesError> {
    if weights.is_empty() {
        return Err(SeriesError::InvalidDegrees("no variables".into()));
    }
    if weights.iter().chain(rel_degrees).any(|&w| w == 0) {
        return Err(SeriesError::InvalidDegrees(
            "degrees must be positive".into(),
        ));
    }
    if rel_degrees.len() > weights.len() {
        return Err(SeriesError::InvalidDegrees(format!(
            "{} relations in {} variables",
            rel_degrees.len(),
            weights.len()
        )));
    }
    let mut numerator = vec![BigInt::one()];
    for &d in rel_degrees {
        numerator = mul_one_minus(&numerator, d as usize);
    }
    Ok(RationalSeries {
        numerator,
        numerator_factors: Some(rel_degrees.to_vec()),
        denom_factors: weights.to_vec(),
    })
}

/// Degree of the series as a rational function.
pub fn a_invariant(s: &RationalSeries) -> i64 {
    let deg = s.numerator.len() as i64 - 1;
    let a = deg - s.denom_factors.iter().sum::<u64>() as i64;
    if let Some(rels) = &s.numerator_factors {
        debug_assert_eq!(a, a_invariant_iterated(&s.denom_factors, rels));
    }
    a
}

/// The a-invariant obtained by starting from the polynomial ring,
/// `a = -sum w_j`, and adding `d_i` for each relation cut out.
pub fn a_invariant_iterated(weights: &[u64], rel_degrees: &[u64]) -> i64 {
    rel_degrees
        .iter()
        .fold(-(weights.iter().sum::<u64>() as i64), |a, &d| a + d as i64)
}

/// `lim_{t->1} (1-t)^d P(t)`.
pub fn e_prime(s: &RationalSeries, d: usize) -> Result<Rational, SeriesError> {
    let (vanish, reduced) = s.numerator_vanishing_order();
    let pole = s.denom_factors.len() as i64 - vanish as i64;
    if pole != d as i64 {
        return Err(SeriesError::PoleOrderMismatch {
            actual: pole,
            expected: d as i64,
        });
    }
    // (1 - t^k) = (1 - t)(1 + t + ... + t^{k-1}); the second factor is k at t=1.
    let den: BigInt = s.denom_factors.iter().map(|&k| BigInt::from(k)).product();
    Ok(Rational::new(eval_at_one(&reduced), den))
}

/// `(-a)^d e' / (2^(d-1) d!)`.
pub fn sw_bound(a: i64, d: u32, eprime: &Rational) -> Rational {
    assert!(d >= 1, "bound needs dimension at least 1");
    let neg_a = BigInt::from(-a);
    let num: BigInt = num_traits::pow(neg_a, d as usize);
    let two_pow = BigInt::one() << (d - 1);
    let fact: BigInt = (1..=d as u64).map(BigInt::from).product();
    &Rational::new(num, two_pow * fact) * eprime
}

/// Power-series coefficients `H(0..=n)`.
pub fn hilbert_coeffs(s: &RationalSeries, n: usize) -> Vec<BigInt> {
    let mut c: Vec<BigInt> = (0..=n)
        .map(|i| s.numerator.get(i).cloned().unwrap_or_default())
        .collect();
    for &k in &s.denom_factors {
        let k = k as usize;
        for i in k..=n {
            let prev = c[i - k].clone();
            c[i] += prev;
        }
    }
    c
}

/// Graded dimensions `r_0..r_s` of a finite-length graded quotient.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArtinianProfile {
    pub coeffs: Vec<BigUint>,
    pub socle_degree: usize,
}

impl ArtinianProfile {
    pub fn total(&self) -> BigUint {
        self.coeffs.iter().sum()
    }

    /// `sum_{n <= upto} r_n`; empty for negative `upto`.
    pub fn prefix_sum(&self, upto: i64) -> BigUint {
        if upto < 0 {
            return BigUint::zero();
        }
        self.coeffs.iter().take(upto as usize + 1).sum()
    }
}

/// Series of `R/(g_1, ..., g_d)` for a homogeneous system of parameters of
/// degrees `param_degrees`, i.e. `P(R,t) * prod (1 - t^c_i)`.
pub fn artinian_reduction(
    s: &RationalSeries,
    param_degrees: &[u64],
) -> Result<ArtinianProfile, SeriesError> {
    let pole = s.pole_order();
    if pole != param_degrees.len() as i64 {
        return Err(SeriesError::PoleOrderMismatch {
            actual: pole,
            expected: param_degrees.len() as i64,
        });
    }
    if param_degrees.contains(&0) {
        return Err(SeriesError::InvalidDegrees("parameter degree 0".into()));
    }
    let mut poly = s.numerator.clone();
    for &c in param_degrees {
        poly = mul_one_minus(&poly, c as usize);
    }
    for &k in &s.denom_factors {
        poly = div_one_minus(&poly, k as usize).ok_or(SeriesError::NotPolynomial)?;
    }
    let poly = trim(poly);
    let socle = a_invariant(s) + param_degrees.iter().sum::<u64>() as i64;
    if poly.is_empty() || poly.len() as i64 - 1 != socle {
        return Err(SeriesError::NotPolynomial);
    }
    let coeffs = poly
        .into_iter()
        .map(|c| c.to_biguint().ok_or(SeriesError::NotPolynomial))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ArtinianProfile {
        coeffs,
        socle_degree: socle as usize,
    })
}

/// `r_n = r_{s-n}` for all n.
pub fn check_gorenstein_symmetry(prof: &ArtinianProfile) -> bool {
    prof.coeffs.len() == prof.socle_degree + 1 && prof.coeffs.iter().eq(prof.coeffs.iter().rev())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn a_n(n: u64) -> RationalSeries {
        ci_series(&[n + 1, n + 1, 2], &[2 * (n + 1)]).unwrap()
    }

    #[test]
    fn a_n_series_matches_displayed_formula() {
        for n in 1..6 {
            let s = a_n(n);
            assert_eq!(s.denom_factors(), &[n + 1, n + 1, 2]);
            assert_eq!(s.numerator_factors(), Some(&[2 * (n + 1)][..]));
            assert_eq!(a_invariant(&s), -2);
            assert_eq!(e_prime(&s, 2).unwrap(), q(1, n as i64 + 1));
        }
        assert_eq!(a_n(2).to_string(), "(1-t^6)/((1-t^3)(1-t^3)(1-t^2))");
    }

    #[test]
    fn polynomial_ring() {
        for d in 1..6usize {
            let s = ci_series(&vec![1; d], &[]).unwrap();
            assert_eq!(a_invariant(&s), -(d as i64));
            assert_eq!(e_prime(&s, d).unwrap(), Rational::one());
        }
        let s = ci_series(&[1, 1], &[]).unwrap();
        assert_eq!(s.to_string(), "1/((1-t)(1-t))");
        assert_eq!(hilbert_coeffs(&s, 4), ints(&[1, 2, 3, 4, 5]));
    }

    #[test]
    fn truncated_polynomial_ring() {
        let s = ci_series(&[1], &[3]).unwrap();
        assert_eq!(hilbert_coeffs(&s, 5), ints(&[1, 1, 1, 0, 0, 0]));
        assert_eq!(a_invariant(&s), 2);
        assert_eq!(e_prime(&s, 0).unwrap(), Rational::from_integer(3));
    }

    #[test]
    fn e8_and_dn() {
        let e8 = ci_series(&[15, 10, 6], &[30]).unwrap();
        assert_eq!(a_invariant(&e8), -1);
        assert_eq!(e_prime(&e8, 2).unwrap(), q(1, 30));
        for n in 4..9i64 {
            let w = [(n - 1) as u64, 2, (n - 2) as u64];
            let s = ci_series(&w, &[2 * (n - 1) as u64]).unwrap();
            assert_eq!(a_invariant(&s), -1);
            assert_eq!(e_prime(&s, 2).unwrap(), q(1, n - 2));
        }
    }

    #[test]
    fn pole_order_mismatch() {
        let s = a_n(1);
        assert_eq!(
            e_prime(&s, 3),
            Err(SeriesError::PoleOrderMismatch {
                actual: 2,
                expected: 3
            })
        );
    }

    #[test]
    fn bound_values() {
        assert_eq!(sw_bound(-2, 2, &q(1, 5)), q(1, 5));
        assert_eq!(sw_bound(-1, 2, &q(1, 30)), q(1, 120));
        assert_eq!(sw_bound(-1, 1, &Rational::one()), Rational::one());
        assert_eq!(sw_bound(-2, 2, &Rational::one()), Rational::one());
        assert_eq!(sw_bound(-3, 3, &Rational::one()), q(9, 8));
        assert_eq!(sw_bound(-4, 4, &Rational::one()), q(4, 3));
        assert_eq!(sw_bound(0, 2, &q(3, 1)), Rational::zero());
    }

    #[test]
    fn a1_hilbert_coefficients() {
        let s = ci_series(&[2, 2, 2], &[4]).unwrap();
        assert_eq!(hilbert_coeffs(&s, 4), ints(&[1, 0, 3, 0, 5]));
    }

    #[test]
    fn artinian_examples() {
        let s = ci_series(&[2, 2, 2], &[4]).unwrap();
        let prof = artinian_reduction(&s, &[2, 2]).unwrap();
        assert_eq!(
            prof.coeffs,
            vec![1u32, 0, 1]
                .into_iter()
                .map(BigUint::from)
                .collect::<Vec<_>>()
        );
        assert_eq!(prof.socle_degree, 2);
        let prof = artinian_reduction(&s, &[4, 2]).unwrap();
        assert_eq!(
            prof.coeffs,
            vec![1u32, 0, 2, 0, 1]
                .into_iter()
                .map(BigUint::from)
                .collect::<Vec<_>>()
        );
        assert_eq!(prof.socle_degree, 4);
        assert!(check_gorenstein_symmetry(&prof));

        let line = ci_series(&[1], &[]).unwrap();
        let prof = artinian_reduction(&line, &[7]).unwrap();
        assert_eq!(prof.coeffs, vec![BigUint::one(); 7]);
        assert_eq!(prof.socle_degree, 6);
        assert_eq!(prof.total(), BigUint::from(7u32));
    }

    #[test]
    fn artinian_rejects_non_parameters() {
        let s = ci_series(&[2, 2, 2], &[4]).unwrap();
        assert_eq!(
            artinian_reduction(&s, &[3, 2]),
            Err(SeriesError::NotPolynomial)
        );
        assert!(matches!(
            artinian_reduction(&s, &[2]),
            Err(SeriesError::PoleOrderMismatch { .. })
        ));
    }

    #[test]
    fn symmetry_check() {
        let mk = |v: &[u32]| ArtinianProfile {
            coeffs: v.iter().map(|&x| BigUint::from(x)).collect(),
            socle_degree: v.len() - 1,
        };
        assert!(check_gorenstein_symmetry(&mk(&[1, 0, 2, 0, 1])));
        assert!(check_gorenstein_symmetry(&mk(&[1, 1, 1, 1])));
        assert!(!check_gorenstein_symmetry(&mk(&[1, 2, 0])));
    }

    #[test]
    fn invalid_degrees() {
        assert!(ci_series(&[], &[]).is_err());
        assert!(ci_series(&[1, 0], &[]).is_err());
        assert!(ci_series(&[1], &[2, 2]).is_err());
        assert!(ci_series(&[1], &[0]).is_err());
    }

    #[test]
    fn rational_render_and_parse() {
        assert_eq!(q(32, 24).to_string(), "4/3");
        assert_eq!(Rational::one().to_string(), "1/1");
        assert_eq!(q(-2, 4).to_string(), "-1/2");
        assert_eq!("4/3".parse::<Rational>().unwrap(), q(4, 3));
        assert_eq!("7".parse::<Rational>().unwrap(), Rational::from_integer(7));
        assert!("1/0".parse::<Rational>().is_err());
        assert_eq!(q(1, 24).approx(), "0.0416667");
        assert_eq!(q(9, 8).approx(), "1.12500");
    }

    #[test]
    fn expanded_numerator_render() {
        let s = RationalSeries::new(ints(&[1, 0, -2, 1]), vec![2]).unwrap();
        assert_eq!(s.to_string(), "(1 - 2*t^2 + t^3)/((1-t^2))");
    }
}

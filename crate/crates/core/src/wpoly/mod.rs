//! Sparse multivariate polynomials over a prime field with a positive
//! weighted grading.
//!
//! Terms are kept in a canonical order (descending weighted degree, then
//! descending lexicographic exponent vector) with no zero coefficients, so
//! structural equality is polynomial equality.

mod parse;

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use parse::parse_poly;

/// Exclusive upper bound on the characteristic.
pub const MAX_PRIME: u64 = 1 << 31;

/// Largest exponent a monomial may carry.
pub const MAX_EXPONENT: u64 = (1 << 31) - 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("{0} is not a prime below 2^31")]
    NotPrime(u64),
    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),
    #[error("variable `{0}` has nonpositive weight")]
    NonpositiveWeight(String),
    #[error("relation degree must be positive")]
    NonpositiveDegree,
    #[error("{relations} relations in {variables} variables gives negative dimension")]
    NegativeDimension { variables: usize, relations: usize },
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("exponent overflow (limit 2^31 - 1)")]
    ExponentOverflow,
    #[error("polynomials belong to different rings")]
    RingMismatch,
    #[error("zero polynomial has no degree")]
    ZeroPolynomial,
    #[error("polynomial is not weighted-homogeneous; degrees {0:?}")]
    NotHomogeneous(BTreeSet<u64>),
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    pub weight: u32,
}

/// Prime field, weighted variables and the degrees of the defining relations.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WeightedRing {
    prime: u32,
    variables: Vec<Variable>,
    relation_degrees: Vec<u64>,
}

impl WeightedRing {
    pub fn new<S: Into<String>>(
        prime: u64,
        vars: impl IntoIterator<Item = (S, u32)>,
        relation_degrees: Vec<u64>,
    ) -> Result<Self, PolyError> {
        if prime >= MAX_PRIME || !is_prime(prime) {
            return Err(PolyError::NotPrime(prime));
        }
        let mut variables: Vec<Variable> = Vec::new();
        for (name, weight) in vars {
            let name = name.into();
            if variables.iter().any(|v| v.name == name) {
                return Err(PolyError::DuplicateVariable(name));
            }
            if weight == 0 {
                return Err(PolyError::NonpositiveWeight(name));
            }
            variables.push(Variable { name, weight });
        }
        if relation_degrees.contains(&0) {
            return Err(PolyError::NonpositiveDegree);
        }
        if relation_degrees.len() > variables.len() {
            return Err(PolyError::NegativeDimension {
                variables: variables.len(),
                relations: relation_degrees.len(),
            });
        }
        Ok(WeightedRing {
            prime: prime as u32,
            variables,
            relation_degrees,
        })
    }

    pub fn prime(&self) -> u32 {
        self.prime
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn nvars(&self) -> usize {
        self.variables.len()
    }

    pub fn weights(&self) -> Vec<u64> {
        self.variables.iter().map(|v| v.weight as u64).collect()
    }

    pub fn relation_degrees(&self) -> &[u64] {
        &self.relation_degrees
    }

    /// Krull dimension: variables minus relations.
    pub fn dim(&self) -> usize {
        self.variables.len() - self.relation_degrees.len()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name == name)
    }

    /// The polynomial ring on the same variables, without relations.
    pub fn ambient(&self) -> WeightedRing {
        WeightedRing {
            prime: self.prime,
            variables: self.variables.clone(),
            relation_degrees: Vec::new(),
        }
    }

    pub fn with_relations(&self, relation_degrees: Vec<u64>) -> Result<WeightedRing, PolyError> {
        WeightedRing::new(
            self.prime as u64,
            self.variables.iter().map(|v| (v.name.clone(), v.weight)),
            relation_degrees,
        )
    }

    /// Same field and variables; relations are ignored.
    pub fn same_ambient(&self, other: &WeightedRing) -> bool {
        self.prime == other.prime && self.variables == other.variables
    }
}

/// Exponent vector, one entry per ring variable. Ordered lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Result<Self, PolyError> {
        if exponents.iter().any(|&e| e as u64 > MAX_EXPONENT) {
            return Err(PolyError::ExponentOverflow);
        }
        Ok(Monomial(exponents))
    }

    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn weighted_degree(&self, weights: &[u64]) -> u64 {
        self.0
            .iter()
            .zip(weights)
            .map(|(&e, &w)| e as u64 * w)
            .sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn checked_mul(&self, other: &Monomial) -> Result<Monomial, PolyError> {
        let mut out = Vec::with_capacity(self.0.len());
        for (&a, &b) in self.0.iter().zip(&other.0) {
            let s = a as u64 + b as u64;
            if s > MAX_EXPONENT {
                return Err(PolyError::ExponentOverflow);
            }
            out.push(s as u32);
        }
        Ok(Monomial(out))
    }

    /// Multiply every exponent by `factor`.
    pub fn scaled(&self, factor: u64) -> Result<Monomial, PolyError> {
        let mut out = Vec::with_capacity(self.0.len());
        for &a in &self.0 {
            let s = (a as u64)
                .checked_mul(factor)
                .filter(|&s| s <= MAX_EXPONENT)
                .ok_or(PolyError::ExponentOverflow)?;
            out.push(s as u32);
        }
        Ok(Monomial(out))
    }

    /// True when every exponent is strictly below `q`, i.e. the monomial is
    /// not in the bracket power `(x_1^q, ..., x_n^q)`.
    pub fn below(&self, q: u64) -> bool {
        self.0.iter().all(|&e| (e as u64) < q)
    }
}

/// Sparse polynomial with coefficients in `{1, ..., p-1}`.
#[derive(Debug, Clone)]
pub struct Polynomial {
    ring: Arc<WeightedRing>,
    terms: Vec<(Monomial, u32)>,
}

impl PartialEq for Polynomial {
    fn eq(&self, other: &Self) -> bool {
        self.ring.same_ambient(&other.ring) && self.terms == other.terms
    }
}

impl Eq for Polynomial {}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    a * b % p
}

impl Polynomial {
    pub fn zero(ring: Arc<WeightedRing>) -> Self {
        Polynomial {
            ring,
            terms: Vec::new(),
        }
    }

    pub fn constant(ring: Arc<WeightedRing>, c: u64) -> Self {
        let n = ring.nvars();
        Self::from_terms(ring, [(Monomial::one(n), c)])
    }

    pub fn variable(ring: Arc<WeightedRing>, index: usize) -> Self {
        let mut exps = vec![0; ring.nvars()];
        exps[index] = 1;
        Self::from_terms(ring, [(Monomial(exps), 1)])
    }

    pub fn monomial(ring: Arc<WeightedRing>, mono: Monomial, c: u64) -> Self {
        Self::from_terms(ring, [(mono, c)])
    }

    /// Collects terms, combining equal monomials and reducing mod p.
    pub fn from_terms(
        ring: Arc<WeightedRing>,
        terms: impl IntoIterator<Item = (Monomial, u64)>,
    ) -> Self {
        let p = ring.prime() as u64;
        let mut acc: HashMap<Monomial, u64> = HashMap::new();
        for (m, c) in terms {
            assert_eq!(m.0.len(), ring.nvars(), "monomial length mismatch");
            let slot = acc.entry(m).or_insert(0);
            *slot = (*slot + c % p) % p;
        }
        let terms = acc
            .into_iter()
            .filter(|&(_, c)| c != 0)
            .map(|(m, c)| (m, c as u32))
            .collect();
        Self::sorted(ring, terms)
    }

    fn sorted(ring: Arc<WeightedRing>, mut terms: Vec<(Monomial, u32)>) -> Self {
        let w = ring.weights();
        terms.sort_by(|(a, _), (b, _)| {
            b.weighted_degree(&w)
                .cmp(&a.weighted_degree(&w))
                .then_with(|| b.cmp(a))
        });
        Polynomial { ring, terms }
    }

    pub fn ring(&self) -> &Arc<WeightedRing> {
        &self.ring
    }

    /// Terms in canonical order.
    pub fn terms(&self) -> &[(Monomial, u32)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn constant_term(&self) -> u32 {
        self.terms
            .iter()
            .find(|(m, _)| m.is_one())
            .map(|&(_, c)| c)
            .unwrap_or(0)
    }

    pub fn coefficient(&self, mono: &Monomial) -> u32 {
        self.terms
            .iter()
            .find(|(m, _)| m == mono)
            .map(|&(_, c)| c)
            .unwrap_or(0)
    }

    fn check_ring(&self, other: &Polynomial) -> Result<(), PolyError> {
        if self.ring.same_ambient(&other.ring) {
            Ok(())
        } else {
            Err(PolyError::RingMismatch)
        }
    }

    pub fn try_add(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.check_ring(other)?;
        let terms = self
            .terms
            .iter()
            .chain(&other.terms)
            .map(|(m, c)| (m.clone(), *c as u64));
        Ok(Self::from_terms(self.ring.clone(), terms))
    }

    pub fn neg(&self) -> Polynomial {
        let p = self.ring.prime();
        Polynomial {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), p - c)).collect(),
        }
    }

    pub fn try_sub(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.try_add(&other.neg())
    }

    pub fn scale(&self, c: u64) -> Polynomial {
        let p = self.ring.prime() as u64;
        let terms = self
            .terms
            .iter()
            .map(|(m, a)| (m.clone(), mulmod(*a as u64, c % p, p)));
        Self::from_terms(self.ring.clone(), terms)
    }

    pub fn try_mul(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.check_ring(other)?;
        let p = self.ring.prime() as u64;
        let mut acc: HashMap<Monomial, u64> =
            HashMap::with_capacity(self.terms.len() * other.terms.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m = ma.checked_mul(mb)?;
                let slot = acc.entry(m).or_insert(0);
                *slot = (*slot + mulmod(*ca as u64, *cb as u64, p)) % p;
            }
        }
        let terms = acc
            .into_iter()
            .filter(|&(_, c)| c != 0)
            .map(|(m, c)| (m, c as u32))
            .collect();
        Ok(Self::sorted(self.ring.clone(), terms))
    }

    /// Exponent-scaled copy: the image of `self` under `x_j -> x_j^factor`.
    /// When `factor` is a power of p this is `self^factor`, since
    /// `c^p = c` on residues.
    pub fn frobenius_scale(&self, factor: u64) -> Result<Polynomial, PolyError> {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| Ok((m.scaled(factor)?, *c)))
            .collect::<Result<Vec<_>, PolyError>>()?;
        // Positive scaling preserves both the degree and the lex order.
        Ok(Polynomial {
            ring: self.ring.clone(),
            terms,
        })
    }

    /// `self^k`, splitting `k` into base-p digits so only powers below p
    /// are formed by repeated multiplication.
    pub fn pow(&self, k: u64) -> Result<Polynomial, PolyError> {
        let one = Polynomial::constant(self.ring.clone(), 1);
        if k == 0 {
            return Ok(one);
        }
        let p = self.ring.prime() as u64;
        let mut digits = Vec::new();
        let mut rest = k;
        while rest > 0 {
            digits.push(rest % p);
            rest /= p;
        }
        let max_digit = *digits.iter().max().unwrap() as usize;
        let mut small = vec![one.clone()];
        for i in 1..=max_digit {
            let next = small[i - 1].try_mul(self)?;
            small.push(next);
        }
        let mut result = one;
        let mut scale: Option<u64> = Some(1);
        for &c in &digits {
            let s = scale.ok_or(PolyError::ExponentOverflow)?;
            if c != 0 {
                let piece = small[c as usize].frobenius_scale(s)?;
                result = result.try_mul(&piece)?;
            }
            scale = s.checked_mul(p);
        }
        Ok(result)
    }

    /// Weighted degree shared by every term.
    pub fn weighted_degree(&self) -> Result<u64, PolyError> {
        if self.terms.is_empty() {
            return Err(PolyError::ZeroPolynomial);
        }
        let w = self.ring.weights();
        let degrees: BTreeSet<u64> = self
            .terms
            .iter()
            .map(|(m, _)| m.weighted_degree(&w))
            .collect();
        if degrees.len() == 1 {
            Ok(*degrees.iter().next().unwrap())
        } else {
            Err(PolyError::NotHomogeneous(degrees))
        }
    }

    /// Representative modulo `(x_1^q, ..., x_n^q)` on the basis of monomials
    /// with all exponents below `q`.
    pub fn bracket_normal_form(&self, q: u64) -> Polynomial {
        Polynomial {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.below(q))
                .cloned()
                .collect(),
        }
    }
}

/// Product of two polynomials over the same ring.
pub fn poly_mul(a: &Polynomial, b: &Polynomial) -> Result<Polynomial, PolyError> {
    a.try_mul(b)
}

pub fn poly_pow(f: &Polynomial, k: u64) -> Result<Polynomial, PolyError> {
    f.pow(k)
}

pub fn weighted_degree(f: &Polynomial) -> Result<u64, PolyError> {
    f.weighted_degree()
}

pub fn bracket_normal_form(f: &Polynomial, q: u64) -> Polynomial {
    f.bracket_normal_form(q)
}

/// Canonical rendering: terms in canonical order joined by ` + `, explicit
/// `*` and `^`, coefficient omitted when it is 1.
impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            let mut factors: Vec<String> = Vec::new();
            if *c != 1 || m.is_one() {
                factors.push(c.to_string());
            }
            for (j, &e) in m.exponents().iter().enumerate() {
                let name = &self.ring.variables()[j].name;
                match e {
                    0 => {}
                    1 => factors.push(name.clone()),
                    _ => factors.push(format!("{name}^{e}")),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

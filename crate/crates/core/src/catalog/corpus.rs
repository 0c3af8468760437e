use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{variable_names, FamilyEntry, FamilyKind};
use crate::frobenius::monomials_of_degree;
use crate::wpoly::{Monomial, Polynomial, WeightedRing};

/// Seeded weighted-homogeneous trinomials and quadrinomials in 2 to
/// `max_vars` variables with weights up to `max_weight`. No variable divides
/// every term, and degrees run high enough that some a-invariants are
/// positive. Primes are assigned round-robin.
pub fn random_corpus(
    seed: u64,
    count: usize,
    max_vars: usize,
    max_weight: u32,
    primes: &[u32],
) -> Vec<FamilyEntry> {
    assert!(max_vars >= 2 && max_weight >= 1 && !primes.is_empty());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let p = primes[i % primes.len()];
            loop {
                if let Some(entry) = attempt(&mut rng, i as u32, p, max_vars, max_weight) {
                    break entry;
                }
            }
        })
        .collect()
}

fn attempt(
    rng: &mut ChaCha8Rng,
    serial: u32,
    p: u32,
    max_vars: usize,
    max_weight: u32,
) -> Option<FamilyEntry> {
    let nvars = rng.gen_range(2..=max_vars);
    let weights: Vec<u32> = (0..nvars).map(|_| rng.gen_range(1..=max_weight)).collect();
    let wsum: u32 = weights.iter().sum();
    let degree = rng.gen_range(2..=wsum + 2 * max_weight) as u64;
    let w64: Vec<u64> = weights.iter().map(|&w| w as u64).collect();
    let candidates = monomials_of_degree(&w64, degree + 1, degree);
    let nterms = rng.gen_range(3..=4);
    if candidates.len() < nterms {
        return None;
    }
    let chosen: Vec<&Vec<u32>> = candidates.choose_multiple(rng, nterms).collect();
    let common = (0..nvars).any(|j| chosen.iter().all(|m| m[j] > 0));
    if common {
        return None;
    }
    let names = variable_names(nvars);
    let ring = Arc::new(
        WeightedRing::new(
            p as u64,
            names.iter().cloned().zip(weights.iter().copied()),
            vec![],
        )
        .ok()?,
    );
    let mut terms = Vec::with_capacity(nterms);
    for m in chosen {
        terms.push((Monomial::new(m.clone()).ok()?, rng.gen_range(1..p) as u64));
    }
    let f = Polynomial::from_terms(ring, terms);
    Some(FamilyEntry {
        family: FamilyKind::Corpus,
        index: vec![serial],
        prime: p,
        min_prime: 2,
        variables: names,
        weights,
        equation: f.to_string(),
        sop_degrees: Vec::new(),
        golden_s: None,
        golden_eprime: None,
        printed_eprime: None,
        golden_a: None,
        golden_bound: None,
        expected_verdict: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproducible_and_homogeneous() {
        let a = random_corpus(1, 5, 3, 4, &[3, 5]);
        let b = random_corpus(1, 5, 3, 4, &[3, 5]);
        assert_eq!(a, b);
        assert_ne!(a, random_corpus(2, 5, 3, 4, &[3, 5]));
        for e in random_corpus(7, 60, 3, 4, &[3, 5, 7]) {
            let f = e.polynomial().unwrap();
            assert!(f.weighted_degree().is_ok(), "{}", e.equation);
            assert!((3..=4).contains(&f.len()), "{}", e.equation);
            assert_eq!(f.constant_term(), 0);
        }
    }
}

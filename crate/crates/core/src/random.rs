//! Seeded generators for random exact test data.

use rand::Rng;

use crate::multivector::{Multivector, Signature};
use crate::scalar::{Gaussian, Monomial, PolyScalar, Rational, Scalar};

pub fn rational<R: Rng>(rng: &mut R, max_num: i64, max_den: i64) -> Rational {
    Rational::new(rng.random_range(-max_num..=max_num).into(), rng.random_range(1..=max_den).into())
}

pub fn gaussian<R: Rng>(rng: &mut R, max_num: i64, max_den: i64, complex: bool) -> Gaussian {
    let im = if complex { rational(rng, max_num, max_den) } else { Rational::default() };
    Gaussian::new(rational(rng, max_num, max_den), im)
}

/// Polynomial with up to `max_terms` terms of degree at most `max_degree`
/// in the first `nvars` variables.
pub fn poly<R: Rng>(rng: &mut R, nvars: usize, max_degree: u32, max_terms: usize) -> PolyScalar {
    let mut p = PolyScalar::zero();
    let n = rng.random_range(1..=max_terms);
    for _ in 0..n {
        let mut budget = rng.random_range(0..=max_degree);
        let mut e = vec![0u32; nvars];
        while budget > 0 && nvars > 0 {
            e[rng.random_range(0..nvars)] += 1;
            budget -= 1;
        }
        p.add_term(Monomial::from_exponents(e), &gaussian(rng, 4, 3, false));
    }
    p
}

/// Each blade is present with probability `density`.
pub fn multivector<S: Scalar, R: Rng>(
    rng: &mut R,
    sig: &Signature,
    density: f64,
    mut coeff: impl FnMut(&mut R) -> S,
) -> Multivector<S> {
    let mut terms = Vec::new();
    for m in 0..=sig.all_mask() {
        if rng.random_bool(density) {
            terms.push((m, coeff(rng)));
        }
    }
    Multivector::from_terms(sig, terms).expect("masks lie inside the signature")
}

pub fn vector<S: Scalar, R: Rng>(rng: &mut R, sig: &Signature, mut coeff: impl FnMut(&mut R) -> S) -> Multivector<S> {
    let c: Vec<S> = (0..sig.dim()).map(|_| coeff(rng)).collect();
    Multivector::vector(sig, &c).expect("one component per generator")
}

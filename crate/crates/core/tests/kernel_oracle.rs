//! The blade kernel against an independent recursion: left multiplication by
//! a generator splits into a wedge and a contraction, and a blade
//! `e_a1 ^ rest` is rewritten as `e_a1 * rest - (e_a1 contracted into rest)`.

use std::collections::BTreeMap;

use proptest::prelude::*;
use starga::multivector::{MetricSignature, Multivector, Signature};
use starga::scalar::{int, Gaussian, Rational};

type Terms = BTreeMap<u64, Rational>;

fn add(t: &mut Terms, mask: u64, c: Rational) {
    let slot = t.entry(mask).or_default();
    *slot += c;
    if *slot == Rational::default() {
        t.remove(&mask);
    }
}

fn gen_times(sig: &MetricSignature, i: usize, rhs: &Terms) -> Terms {
    let d = sig.dim();
    let mut out = Terms::new();
    for (&mask, c) in rhs {
        if mask >> i & 1 == 0 {
            let below = (mask & ((1u64 << i) - 1)).count_ones();
            add(&mut out, mask | 1 << i, if below % 2 == 0 { c.clone() } else { -c.clone() });
        }
        let members: Vec<usize> = (0..d).filter(|j| mask >> j & 1 == 1).collect();
        for (m, &j) in members.iter().enumerate() {
            let f = sig.entry(i, j);
            if *f == Rational::default() {
                continue;
            }
            let t = c * f;
            add(&mut out, mask ^ 1 << j, if m % 2 == 0 { t } else { -t });
        }
    }
    out
}

fn contract_gen(sig: &MetricSignature, i: usize, mask: u64) -> Terms {
    let mut single = Terms::new();
    single.insert(mask, int(1));
    let full = gen_times(sig, i, &single);
    full.into_iter().filter(|(m, _)| m.count_ones() < mask.count_ones()).collect()
}

fn blade_times(sig: &MetricSignature, a: u64, rhs: &Terms) -> Terms {
    if a == 0 {
        return rhs.clone();
    }
    let a1 = a.trailing_zeros() as usize;
    let rest = a ^ 1 << a1;
    let mut out = gen_times(sig, a1, &blade_times(sig, rest, rhs));
    for (m, c) in contract_gen(sig, a1, rest) {
        for (mm, cc) in blade_times(sig, m, rhs) {
            add(&mut out, mm, -(c.clone() * cc));
        }
    }
    out
}

fn oracle(sig: &MetricSignature, a: u64, b: u64) -> Terms {
    let mut rhs = Terms::new();
    rhs.insert(b, int(1));
    blade_times(sig, a, &rhs)
}

fn kernel(sig: &Signature, a: u64, b: u64) -> Terms {
    let x = Multivector::<Gaussian>::from_terms(sig, [(a, Gaussian::one())]).unwrap();
    let y = Multivector::<Gaussian>::from_terms(sig, [(b, Gaussian::one())]).unwrap();
    x.star(&y).unwrap().terms().map(|(m, c)| (m, c.re.clone())).collect()
}

fn signatures() -> Vec<Signature> {
    let mut general = Vec::new();
    for (k, x) in [1, 0, -2, 3, 1, 0, 2, -1, 0, 1, 1, 1, 2, 0, -3, 1].iter().enumerate() {
        general.push(Rational::new((*x).into(), (1 + k as i64 % 3).into()));
    }
    vec![
        MetricSignature::euclidean(4),
        MetricSignature::minkowski_nonstandard(4),
        MetricSignature::minkowski_standard(4),
        MetricSignature::symplectic(2),
        MetricSignature::from_matrix("general:4", 4, general).unwrap(),
    ]
}

#[test]
fn every_blade_pair_matches_the_recursion() {
    for sig in signatures() {
        for a in 0..16u64 {
            for b in 0..16u64 {
                assert_eq!(kernel(&sig, a, b), oracle(&sig, a, b), "{} {a:b} {b:b}", sig.id());
            }
        }
    }
}

#[test]
fn symmetric_cross_terms_follow_the_metric() {
    // e0 e1 + e1 e0 = 2 M_01 for a non-diagonal symmetric matrix
    let m = vec![int(2), int(1), int(1), int(-1)];
    let sig = MetricSignature::from_matrix("sym:2", 2, m).unwrap();
    let e0 = Multivector::<Gaussian>::generator(&sig, 0).unwrap();
    let e1 = Multivector::<Gaussian>::generator(&sig, 1).unwrap();
    let anti = e0.star(&e1).unwrap().try_add(&e1.star(&e0).unwrap()).unwrap();
    assert_eq!(anti, Multivector::scalar(&sig, Gaussian::from_int(2)));
}

proptest! {
    #[test]
    fn random_six_dimensional_pairs(a in 0u64..64, b in 0u64..64, entries in prop::collection::vec(-3i64..4, 36)) {
        let m = entries.iter().map(|&x| int(x)).collect();
        let sig = MetricSignature::from_matrix("random:6", 6, m).unwrap();
        prop_assert_eq!(kernel(&sig, a, b), oracle(&sig, a, b));
    }
}

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use starga::geometry::{christoffel, Sphere};
use starga::moyal::{ExtendedPhaseSpace, PhaseSpace};
use starga::random;
use starga::rigid_body::{integrate, InertiaOperator, RigidBodyState};
use starga::{Gaussian, MetricSignature, Multivector};

fn clifford_product(c: &mut Criterion) {
    let mut group = c.benchmark_group("clifford_star");
    for d in [3, 4, 6] {
        let sig = MetricSignature::euclidean(d);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a: Multivector<Gaussian> = random::multivector(&mut rng, &sig, 0.5, |r| random::gaussian(r, 9, 5, false));
        let b: Multivector<Gaussian> = random::multivector(&mut rng, &sig, 0.5, |r| random::gaussian(r, 9, 5, false));
        group.bench_with_input(BenchmarkId::from_parameter(d), &d, |bench, _| {
            bench.iter(|| black_box(&a).star(black_box(&b)).unwrap())
        });
    }
    group.finish();
}

fn moyal_product(c: &mut Criterion) {
    let ps = PhaseSpace::new(2);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let f = random::poly(&mut rng, 4, 4, 6);
    let g = random::poly(&mut rng, 4, 4, 6);
    c.bench_function("moyal_degree4_dof2", |b| b.iter(|| ps.moyal(black_box(&f), black_box(&g))));
}

fn brst_check(c: &mut Criterion) {
    let ext = ExtendedPhaseSpace::new(1, false);
    let q = ext.base().q(0);
    let p = ext.base().p(0);
    let h = &(&p * &p) + &(&(&q * &q) * &q);
    c.bench_function("brst_check_cubic", |b| b.iter(|| ext.brst_check(black_box(&h)).unwrap()));
}

fn sphere_christoffel(c: &mut Criterion) {
    let s = Sphere::unit();
    c.bench_function("christoffel_s2", |b| b.iter(|| christoffel(&s, black_box(&[0.9, 1.3])).unwrap()));
}

fn rigid_body(c: &mut Criterion) {
    let i = InertiaOperator::principal([1.0, 2.0, 3.0]).unwrap();
    let s0 = RigidBodyState::new([0.7, -0.4, 0.5]);
    c.bench_function("rigid_body_1000_steps", |b| b.iter(|| integrate(black_box(&s0), &i, 1e-3, 1000).unwrap()));
}

criterion_group!(benches, clifford_product, moyal_product, brst_check, sphere_christoffel, rigid_body);
criterion_main!(benches);

use proptest::prelude::*;
use starga::lie::*;
use starga::multivector::{MetricSignature, Multivector};
use starga::scalar::{int, rat, Gaussian};

type Mv = Multivector<Gaussian>;

fn g(n: i64) -> Gaussian {
    Gaussian::from_int(n)
}

/// `[X_i, Z_j] = sign * I * eps_ijk Y_k` with the plain commutator.
fn relation_holds(x: &[Mv], z: &[Mv], y: &[Mv], i4: &Mv, sign: i64) -> bool {
    (0..3).all(|i| {
        (0..3).all(|j| {
            let lhs = &(&x[i] * &z[j]) - &(&z[j] * &x[i]);
            let mut rhs = Mv::zero(i4.signature());
            for (k, yk) in y.iter().enumerate() {
                rhs = &rhs + &(i4 * yk).scale(&g(sign * epsilon(i, j, k)));
            }
            lhs == rhs
        })
    })
}

#[test]
fn lorentz_relations_in_both_metrics() {
    for (metric, flip) in [(LorentzMetric::Nonstandard, 1), (LorentzMetric::Standard, -1)] {
        let gens = lorentz_generators(metric);
        let i4 = Mv::pseudoscalar(&lorentz_signature(metric));
        let (l, k) = (&gens[0..3], &gens[3..6]);
        assert!(relation_holds(l, l, l, &i4, -flip), "{metric:?} [L,L]");
        assert!(relation_holds(l, k, k, &i4, -flip), "{metric:?} [L,K]");
        assert!(relation_holds(k, k, l, &i4, flip), "{metric:?} [K,K]");
        let alg = BivectorAlgebra::lorentz(metric);
        assert_eq!(alg.dim(), 6);
        assert!(alg.jacobi_violation().is_none());
    }
}

#[test]
fn lorentz_structure_constants_flip_sign_between_metrics() {
    let a = BivectorAlgebra::lorentz(LorentzMetric::Nonstandard);
    let b = BivectorAlgebra::lorentz(LorentzMetric::Standard);
    for i in 0..6 {
        for j in 0..6 {
            for k in 0..6 {
                let (x, y) = (&a.structure()[i][j][k], &b.structure()[i][j][k]);
                assert!(x == y || *x == -y);
            }
        }
    }
}

#[test]
fn unitary_and_general_linear_close() {
    for n in 1..=3 {
        let u = BivectorAlgebra::un(n).unwrap();
        assert_eq!(u.dim(), n * n);
        assert!(u.jacobi_violation().is_none());
        let j = complex_structure(u.signature(), n).unwrap();
        assert!(u.non_commuting_with(&j).unwrap().is_empty());
        let gl = BivectorAlgebra::gln(n).unwrap();
        assert_eq!(gl.dim(), n * n);
        assert!(gl.jacobi_violation().is_none());
    }
}

#[test]
fn killing_form_of_lorentz_is_indefinite() {
    let k = BivectorAlgebra::lorentz(LorentzMetric::Nonstandard).killing().unwrap();
    let diag: Vec<Gaussian> = (0..6).map(|i| k[i][i].clone()).collect();
    let positive = diag.iter().filter(|x| x.re > int(0)).count();
    let negative = diag.iter().filter(|x| x.re < int(0)).count();
    assert_eq!((positive, negative), (3, 3));
}

#[test]
fn algebra_specs_parse() {
    for spec in ["so3", "lorentz:std", "lorentz:nonstd", "un:2", "gln:3", "clifford:4:nonstd"] {
        BivectorAlgebra::parse(spec).unwrap();
    }
    assert!(BivectorAlgebra::parse("sl:2").is_err());
}

#[test]
fn induced_fields_anti_represent_the_algebra() {
    let alg = BivectorAlgebra::lorentz(LorentzMetric::Nonstandard);
    for a in alg.generators() {
        for b in alg.generators() {
            let bracket = linear_field_bracket(&induced_field_matrix(a).unwrap(), &induced_field_matrix(b).unwrap());
            let direct = induced_field_matrix(&a.commutator(b).unwrap()).unwrap();
            let negated: Vec<Vec<Gaussian>> = direct.iter().map(|r| r.iter().map(|x| -x).collect()).collect();
            assert_eq!(bracket, negated);
        }
    }
}

#[test]
fn rotor_derivative_is_the_induced_field() {
    let sig = MetricSignature::euclidean(3);
    let b = Multivector::<f64>::blade(&sig, &[0, 2]).unwrap().scale(&0.8);
    let x = Multivector::vector(&sig, &[0.3, -1.1, 0.5]).unwrap();
    let h = 1e-5;
    let fwd = sandwich(&rotor_exp(&b, h).unwrap(), &x).unwrap();
    let bwd = sandwich(&rotor_exp(&b, -h).unwrap(), &x).unwrap();
    let deriv = (&fwd - &bwd).scale(&(0.5 / h));
    assert!(deriv.distance(&induced_field(&b, &x).unwrap()) < 1e-9);
    assert!(deriv.distance(&ad(&b, &x).unwrap()) < 1e-9);
}

#[test]
fn coadjoint_pairing_is_invariant() {
    let sig = MetricSignature::euclidean(3);
    let r = rotor_exp(&Multivector::<f64>::blade(&sig, &[1, 2]).unwrap(), 0.9).unwrap();
    let bv = |x: [f64; 3]| -> Multivector<f64> {
        let e = |i, j| Multivector::<f64>::blade(&sig, &[i, j]).unwrap();
        &(&e(1, 2).scale(&x[0]) + &e(2, 0).scale(&x[1])) + &e(0, 1).scale(&x[2])
    };
    let (b, theta) = (bv([0.2, -0.7, 1.3]), bv([1.0, 0.4, -0.6]));
    let lhs = b.reverse().inner(&coadjoint(&r, &theta).unwrap()).unwrap().scalar_part();
    let rhs = adjoint(&r, &b).unwrap().reverse().inner(&theta).unwrap().scalar_part();
    assert!((lhs - rhs).abs() < 1e-14);
}

proptest! {
    #[test]
    fn exact_versors_act_as_automorphisms(a in -6i64..7, b in -6i64..7, x in prop::array::uniform3(-5i64..6), y in prop::array::uniform3(-5i64..6)) {
        prop_assume!(a != 0 || b != 0);
        let sig = MetricSignature::euclidean(3);
        let r = &Mv::scalar(&sig, g(a)) + &Mv::blade(&sig, &[0, 1]).unwrap().scale(&g(b));
        let vx = Mv::vector(&sig, &x.map(g)).unwrap();
        let vy = Mv::vector(&sig, &y.map(g)).unwrap();
        let act = |v: &Mv| versor_act(&r, v).unwrap();
        prop_assert_eq!(act(&vx).inner(&act(&vy)).unwrap(), vx.inner(&vy).unwrap());
        prop_assert_eq!(act(&vx.wedge(&vy).unwrap()), act(&vx).wedge(&act(&vy)).unwrap());
    }

    #[test]
    fn induced_field_matches_the_commutator(c in prop::array::uniform3(-5i64..6), x in prop::array::uniform3(-5i64..6)) {
        let alg = BivectorAlgebra::so3();
        let sig = alg.signature().clone();
        let mut b = Mv::zero(&sig);
        for (gen, ci) in alg.generators().iter().zip(c) {
            b = &b + &gen.scale(&g(ci));
        }
        let v = Mv::vector(&sig, &x.map(g)).unwrap();
        prop_assert_eq!(induced_field(&b, &v).unwrap(), b.commutator(&v).unwrap());
        let cross = [c[1] * x[2] - c[2] * x[1], c[2] * x[0] - c[0] * x[2], c[0] * x[1] - c[1] * x[0]];
        // B_i . x = -(e_i x x)
        prop_assert_eq!(induced_field(&b, &v).unwrap(), Mv::vector(&sig, &cross.map(|z| g(-z))).unwrap());
    }
}

#[test]
fn half_rational_versor() {
    let sig = MetricSignature::euclidean(2);
    let r = &Mv::scalar(&sig, Gaussian::real(rat(1, 2))) + &Mv::blade(&sig, &[0, 1]).unwrap();
    let e0 = Mv::generator(&sig, 0).unwrap();
    let out = versor_act(&r, &e0).unwrap();
    assert_eq!(out.inner(&out).unwrap(), Mv::one(&sig));
}

#[test]
fn so3_structure_and_killing_metric() {
    let alg = BivectorAlgebra::so3();
    let b = alg.generators();
    assert_eq!(ad(&b[0], &b[1]).unwrap(), b[2].neg());
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                assert_eq!(alg.structure()[i][j][k], g(-epsilon(i, j, k)));
            }
        }
    }
    let kappa = alg.killing().unwrap();
    for i in 0..3 {
        for j in 0..3 {
            assert_eq!(kappa[i][j], g(if i == j { -1 } else { 0 }));
        }
    }
}

fn random_bivector(c: [f64; 3]) -> Multivector<f64> {
    let sig = MetricSignature::euclidean(3);
    let e = |i, j| Multivector::<f64>::blade(&sig, &[i, j]).unwrap();
    &(&e(1, 2).scale(&c[0]) + &e(2, 0).scale(&c[1])) + &e(0, 1).scale(&c[2])
}

proptest! {
    #[test]
    fn adjoint_is_a_left_action_preserving_the_killing_norm(
        a in prop::array::uniform3(-2.0f64..2.0),
        b in prop::array::uniform3(-2.0f64..2.0),
        c in prop::array::uniform3(-2.0f64..2.0),
    ) {
        let r1 = rotor_exp(&random_bivector(a), 1.0).unwrap();
        let r2 = rotor_exp(&random_bivector(b), 1.0).unwrap();
        let x = random_bivector(c);
        let nested = adjoint(&r1, &adjoint(&r2, &x).unwrap()).unwrap();
        let composed = adjoint(&(&r1 * &r2), &x).unwrap();
        prop_assert!(nested.distance(&composed) < 1e-10);
        let norm = |m: &Multivector<f64>| m.inner(m).unwrap().scalar_part();
        prop_assert!((norm(&composed) - norm(&x)).abs() < 1e-10);
        // coadjoint is a right action
        let co = coadjoint(&r2, &coadjoint(&r1, &x).unwrap()).unwrap();
        prop_assert!(co.distance(&coadjoint(&(&r1 * &r2), &x).unwrap()) < 1e-10);
    }
}

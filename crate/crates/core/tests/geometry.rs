use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, PI};

use proptest::prelude::*;
use starga::error::Error;
use starga::geometry::*;
use starga::multivector::{MetricSignature, Multivector};

fn sphere_grid(n: usize, margin: f64) -> Vec<[f64; 2]> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let t = margin + (PI - 2.0 * margin) * i as f64 / (n - 1) as f64;
            let p = 2.0 * PI * j as f64 / n as f64;
            out.push([t, p]);
        }
    }
    out
}

fn unit_frame(y: &[f64]) -> starga::error::Result<Vec2> {
    orthonormal_frame(&Sphere::unit(), y)
}

#[test]
fn sphere_metric_and_christoffel_values() {
    let s = Sphere::unit();
    let g = metric(&s, &[FRAC_PI_3, 0.4]);
    assert!((g[(0, 0)] - 1.0).abs() < 1e-14);
    assert!((g[(1, 1)] - 0.75).abs() < 1e-14);
    assert!(g[(0, 1)].abs() < 1e-14);

    let t = FRAC_PI_4;
    let gamma = christoffel_extrinsic(&s, &[t, 1.0]).unwrap();
    assert!((gamma[0][1][1] + t.sin() * t.cos()).abs() < 1e-12);
    assert!((gamma[1][0][1] - 1.0).abs() < 1e-12);
    assert!((gamma[1][1][0] - 1.0).abs() < 1e-12);
    assert!(gamma[0][0][0].abs() < 1e-12 && gamma[1][1][1].abs() < 1e-12);
}

#[test]
fn sphere_grid_christoffel_and_curvature() {
    let s = Sphere::unit();
    let (mut agree, mut compat, mut dk) = (0.0f64, 0.0f64, 0.0f64);
    for x in sphere_grid(20, 0.2) {
        let r = christoffel(&s, &x).unwrap();
        agree = agree.max(r.agreement);
        compat = compat.max(r.compatibility);
        assert!(r.asymmetry < 1e-12);
        dk = dk.max((gaussian_curvature(&s, &x).unwrap() - 1.0).abs());
    }
    assert!(agree < 1e-8, "christoffel agreement {agree:e}");
    assert!(compat < 1e-8, "metric compatibility {compat:e}");
    assert!(dk < 1e-6, "curvature {dk:e}");
}

#[test]
fn sphere_grid_cartan_structure_equations() {
    let s = Sphere::unit();
    let (mut curv, mut tors) = (0.0f64, 0.0f64);
    for x in sphere_grid(20, 0.2) {
        let c = cartan_structure_residuals(&s, &x, &unit_frame).unwrap();
        curv = curv.max(c.curvature);
        tors = tors.max(c.torsion);
    }
    assert!(curv < 1e-6, "curvature equation {curv:e}");
    assert!(tors < 1e-6, "torsion equation {tors:e}");
}

#[test]
fn sphere_orthonormal_frame_structure_constants() {
    let s = Sphere::unit();
    for x in sphere_grid(6, 0.3) {
        let f = noncoordinate_frame(&s, &x, &unit_frame).unwrap();
        let cot = 1.0 / x[0].tan();
        assert!((f.c[1][0][1] + cot).abs() < 1e-8);
        assert!((f.c[1][1][0] - cot).abs() < 1e-8);
        assert!(f.c[0][0][1].abs() < 1e-8);
        for t in 0..2 {
            for r in 0..2 {
                for u in 0..2 {
                    assert!((f.gamma[t][r][u] - f.gamma_koszul[t][r][u]).abs() < 1e-7);
                    assert!(f.torsion[t][r][u].abs() < 1e-7);
                }
            }
        }
        assert!(f.maurer_cartan < 1e-7);
    }
}

#[test]
fn radius_two_sphere_has_quarter_curvature() {
    let s = Sphere::new(2.0, 2).unwrap();
    for x in sphere_grid(5, 0.3) {
        assert!((gaussian_curvature(&s, &x).unwrap() - 0.25).abs() < 1e-6);
    }
    let scaled = Scaled { chart: Sphere::unit(), factor: 2.0 };
    assert!((gaussian_curvature(&scaled, &[1.0, 0.5]).unwrap() - 0.25).abs() < 1e-6);
}

#[test]
fn finite_difference_fallback_matches_analytic() {
    let s = Sphere::unit();
    let n = Numeric(Sphere::unit());
    for x in sphere_grid(5, 0.3) {
        let a = christoffel_extrinsic(&s, &x).unwrap();
        let b = christoffel_extrinsic(&n, &x).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    assert!((a[i][j][k] - b[i][j][k]).abs() < 1e-5);
                }
            }
        }
        assert!((gaussian_curvature(&n, &x).unwrap() - 1.0).abs() < 1e-3);
    }
}

#[test]
fn torus_curvature_matches_closed_form() {
    let t = Torus { big_r: 2.0, r: 0.5 };
    for &(u, v) in &[(0.1, 0.0), (1.0, 1.0), (2.0, PI), (3.0, 2.5)] {
        let expect = v.cos() / (t.r * (t.big_r + t.r * v.cos()));
        let k = gaussian_curvature(&t, &[u, v]).unwrap();
        assert!((k - expect).abs() < 1e-6, "torus K at v={v}: {k} vs {expect}");
        let r = riemann(&t, &[u, v]).unwrap();
        assert!(first_bianchi_residual(&r) < 1e-8);
    }
}

#[test]
fn three_sphere_sectional_curvatures() {
    let s = Sphere::new(1.0, 3).unwrap();
    let x = [1.0, 1.2, 0.3];
    let f = frames_at(&s, &x).unwrap();
    let r = riemann(&s, &x).unwrap();
    for (a, b) in [(0, 1), (0, 2), (1, 2)] {
        assert!((sectional_curvature(&f, &r, a, b) - 1.0).abs() < 1e-8);
    }
    assert!(first_bianchi_residual(&r) < 1e-8);
    assert!(second_bianchi_residual(&s, &x).unwrap() < 1e-6);
    let numeric = Numeric(Sphere::new(1.0, 3).unwrap());
    let fr = frames_at(&numeric, &x).unwrap();
    let rn = riemann(&numeric, &x).unwrap();
    assert!((sectional_curvature(&fr, &rn, 0, 2) - 1.0).abs() < 1e-3);
}

#[test]
fn flat_plane_has_no_connection() {
    let p = Plane { dim: 3 };
    let x = [0.3, -1.0, 2.0];
    let r = christoffel(&p, &x).unwrap();
    assert!(flatten(&r.gamma).iter().all(|v| *v == 0.0));
    assert!(riemann(&p, &x).unwrap().iter().flatten().flatten().flatten().all(|v| *v == 0.0));
}

fn flatten(t: &Vec3) -> Vec<f64> {
    t.iter().flatten().flatten().copied().collect()
}

#[test]
fn bianchi_and_ricci_identities_on_the_sphere() {
    let s = Sphere::unit();
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    for x in sphere_grid(4, 0.6) {
        let r = riemann(&s, &x).unwrap();
        assert!(first_bianchi_residual(&r) < 1e-6);
        assert!(second_bianchi_residual(&s, &x).unwrap() < 1e-4);
        let f = frames_at(&s, &x).unwrap();
        let v = |rng: &mut rand_chacha::ChaCha8Rng| vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        let (a, b, c) = (v(&mut rng), v(&mut rng), v(&mut rng));
        assert!(ricci_identity_residual(&f, &r, &a, &b, &c).unwrap() < 1e-6);
    }
}

#[test]
fn curvature_bivector_acts_as_minus_riemann() {
    let s = Sphere::unit();
    let x = [1.1, 0.2];
    let f = frames_at(&s, &x).unwrap();
    let r = riemann(&s, &x).unwrap();
    let bv = curvature_bivector(&f, &r, 0, 1).unwrap();
    for k in 0..2 {
        let c = f.to_multivector(&f.xi[k]).unwrap();
        let lhs = c.inner(&bv).unwrap();
        let expect: Vec<f64> = (0..3).map(|a| -(0..2).map(|l| r[l][0][1][k] * f.xi[l][a]).sum::<f64>()).collect();
        let diff = &lhs - &f.to_multivector(&expect).unwrap();
        assert!(diff.max_abs() < 1e-6);
    }
}

#[test]
fn projection_is_idempotent_and_kills_normals() {
    let s = Sphere::unit();
    let f = frames_at(&s, &[0.9, 2.0]).unwrap();
    let sig = MetricSignature::euclidean(3);
    let a = Multivector::vector(&sig, &[0.3, -1.2, 0.7]).unwrap();
    let pa = f.project(&a).unwrap();
    assert!((&f.project(&pa).unwrap() - &pa).max_abs() < 1e-12);
    let tangent = f.to_multivector(&f.tangent_part(&[0.3, -1.2, 0.7])).unwrap();
    assert!((&pa - &tangent).max_abs() < 1e-12);
    let n = f.to_multivector(&f.position).unwrap();
    assert!(f.project(&n).unwrap().max_abs() < 1e-12);
    let biv = f.to_multivector(&f.xi[0]).unwrap().wedge(&f.to_multivector(&f.xi[1]).unwrap()).unwrap();
    assert!((&f.project(&biv).unwrap() - &biv).max_abs() < 1e-12);
    assert!(f.reciprocity_residual() < 1e-12);
}

#[test]
fn shape_bivector_identities_on_unit_sphere() {
    let s = Sphere::unit();
    let x = [0.8, 1.3];
    let f = frames_at(&s, &x).unwrap();
    let a = [0.4, -0.9];
    let b = [1.1, 0.3];
    let sa = shape_bivector(&s, &x, &a).unwrap();
    let bv = f.to_multivector(&f.vector(&b)).unwrap();
    let lhs = bv.inner(&sa).unwrap();
    let rhs = f.to_multivector(&normal_derivative(&s, &x, &a, &b).unwrap()).unwrap();
    assert!((&lhs - &rhs).max_abs() < 1e-10);
    // the second fundamental form is symmetric
    let av = f.to_multivector(&f.vector(&a)).unwrap();
    let ab = av.inner(&shape_bivector(&s, &x, &b).unwrap()).unwrap();
    assert!((&ab - &lhs).max_abs() < 1e-10);
    // unit sphere: |b . S(b)| = |b|^2
    let unit: Vec<f64> = {
        let v = f.vector(&b);
        let n = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        f.components(&v.iter().map(|c| c / n).collect::<Vec<_>>())
    };
    let ub = f.to_multivector(&f.vector(&unit)).unwrap();
    let w = ub.inner(&shape_bivector(&s, &x, &unit).unwrap()).unwrap();
    let len: f64 = (0..3).map(|k| w.coeff(1 << k).powi(2)).sum::<f64>().sqrt();
    assert!((len - 1.0).abs() < 1e-10);
}

#[test]
fn hodge_star_of_one_is_volume_form() {
    let s = Sphere::unit();
    let x = [0.7, 0.1];
    let f = frames_at(&s, &x).unwrap();
    let sig = form_signature(2);
    let vol = hodge(&f, &Multivector::scalar(&sig, 1.0));
    let expect = Multivector::blade(&sig, &[0, 1]).unwrap().scale(&x[0].sin());
    assert!((&vol - &expect).max_abs() < 1e-12);
}

#[test]
fn coderivative_is_minus_divergence_on_sphere() {
    let s = Sphere::unit();
    let sig = form_signature(2);
    let one = |y: &[f64]| -> starga::error::Result<Multivector<f64>> {
        Multivector::vector(&sig, &[y[0].cos() * y[1].sin(), y[0].sin().powi(2) + y[1].cos()])
    };
    let two = |y: &[f64]| -> starga::error::Result<Multivector<f64>> {
        Ok(Multivector::blade(&sig, &[0, 1])?.scale(&(y[0].sin() * (1.0 + y[1].cos()))))
    };
    for x in [[0.7, 0.1], [1.4, 2.2], [2.5, 4.0]] {
        for field in [&one as FormField, &two as FormField] {
            let co = coderivative(&s, field, &x).unwrap();
            let div = divergence(&s, field, &x).unwrap();
            assert!((&co + &div).max_abs() < 1e-7, "at {x:?}: {co:?} vs {div:?}");
        }
    }
}

#[test]
fn lie_derivative_of_forms_two_ways() {
    let sig = form_signature(2);
    let a = |y: &[f64]| -> starga::error::Result<Vec<f64>> { Ok(vec![y[1] * y[0], y[0].sin()]) };
    let w = |y: &[f64]| -> starga::error::Result<Multivector<f64>> {
        Multivector::vector(&sig, &[y[0] * y[0] * y[1], y[1].cos()])
    };
    let x = [0.4, -0.8];
    let l1 = lie_derivative_form(&a, &w, &x).unwrap();
    let l2 = lie_derivative_form_components(&a, &w, &x).unwrap();
    assert!((&l1 - &l2).max_abs() < 1e-8);
}

#[test]
fn jacobi_lie_bracket_components_match_ambient() {
    let s = Sphere::unit();
    let a = |y: &[f64]| -> starga::error::Result<Vec<f64>> { Ok(vec![y[1].sin(), 0.3]) };
    let b = |y: &[f64]| -> starga::error::Result<Vec<f64>> { Ok(vec![0.5, y[0].cos()]) };
    let x = [1.0, 0.6];
    let comp = jacobi_lie_bracket(&a, &b, &x).unwrap();
    let amb = jacobi_lie_bracket_ambient(&s, &a, &b, &x).unwrap();
    let f = frames_at(&s, &x).unwrap();
    let diff: f64 = f.vector(&comp).iter().zip(&amb).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
    assert!(diff < 1e-8);
    let exact = [-(1.0f64.cos()) * 0.6f64.cos(), -(0.6f64.sin()) * 1.0f64.sin()];
    assert!((comp[0] - exact[0]).abs() < 1e-8 && (comp[1] - exact[1]).abs() < 1e-8);
}

#[test]
fn cotangent_bundle_canonical_forms() {
    let flat = Cotangent { base: Box::new(Plane { dim: 1 }) };
    let x = [0.3, 1.7];
    let theta = flat.canonical_one_form(&x).unwrap();
    assert!((theta[0] - 1.7).abs() < 1e-9 && theta[1].abs() < 1e-9);

    let sph = Cotangent { base: Box::new(Sphere::unit()) };
    let sig = form_signature(4);
    let th = |y: &[f64]| -> starga::error::Result<Multivector<f64>> {
        Multivector::vector(&sig, &sph.canonical_one_form(y)?)
    };
    let x = [1.0, 0.5, 0.7, -0.4];
    let theta = sph.canonical_one_form(&x).unwrap();
    for (t, e) in theta.iter().zip([0.7, -0.4, 0.0, 0.0]) {
        assert!((t - e).abs() < 1e-8, "{theta:?}");
    }
    let omega = exterior_derivative(&th, &x).unwrap().neg();
    let expect = &Multivector::blade(&sig, &[0, 2]).unwrap() + &Multivector::blade(&sig, &[1, 3]).unwrap();
    assert!((&omega - &expect).max_abs() < 1e-6);
}

#[test]
fn circle_action_moment_map_on_sphere() {
    let r = circle_action_s2(20, 0.1).unwrap();
    assert!(r.pde_residual < 1e-9, "{r:?}");
    assert!(r.field_residual < 1e-12 && r.omega_residual < 1e-12);
    assert!(r.passed(1e-9));
    assert!(matches!(circle_action_s2(20, 0.01), Err(Error::OutsideDomain(_))));
}

#[test]
fn domain_errors() {
    let s = Sphere::unit();
    assert!(matches!(frames_at(&s, &[0.0, 1.0]), Err(Error::OutsideDomain(_))));
    assert!(matches!(frames_at(&s, &[f64::NAN, 1.0]), Err(Error::OutsideDomain(_))));
    assert!(Sphere::new(-1.0, 2).is_err());
    assert!(parse_chart("torus:1:2").is_err());
    assert!(parse_chart("banana").is_err());
    assert_eq!(parse_chart("sphere:2").unwrap().name(), "sphere:2:2");
    let collapsed = Scaled { chart: Plane { dim: 2 }, factor: 0.0 };
    assert!(matches!(frames_at(&collapsed, &[0.0, 0.0]), Err(Error::DegenerateMetric(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn exterior_derivative_squares_to_zero(a in -2.0f64..2.0, b in -2.0f64..2.0, x0 in -1.0f64..1.0, x1 in -1.0f64..1.0, x2 in -1.0f64..1.0) {
        let sig = form_signature(3);
        let w = move |y: &[f64]| -> starga::error::Result<Multivector<f64>> {
            Multivector::vector(&sig, &[(a * y[1]).sin(), y[0] * y[2] * b, (y[0] + y[1]).cos()])
        };
        let dw = |y: &[f64]| exterior_derivative(&w, y);
        let ddw = exterior_derivative(&dw, &[x0, x1, x2]).unwrap();
        prop_assert!(ddw.max_abs() < 1e-6);
    }

    #[test]
    fn sphere_curvature_is_inverse_radius_squared(r in 0.5f64..3.0, t in 0.3f64..2.8, p in 0.0f64..std::f64::consts::TAU) {
        let s = Sphere::new(r, 2).unwrap();
        prop_assert!((gaussian_curvature(&s, &[t, p]).unwrap() - 1.0 / (r * r)).abs() < 1e-5);
    }
}

//! Seeded end-to-end checks grouped by the property they exercise.
//!
//! Each group returns plain measurements. A measurement passes when its
//! value does not exceed its limit; exact checks count failures against a
//! limit of zero.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::calculus::{momentum_map_angular, Symplectic};
use crate::error::Result;
use crate::geometry::{
    cartan_structure_residuals, christoffel, circle_action_s2, first_bianchi_residual, frames_at, gaussian_curvature,
    orthonormal_frame, ricci_identity_residual, riemann, second_bianchi_residual, Sphere, Vec2,
};
use crate::lie::{complex_structure, epsilon, lorentz_generators, lorentz_signature, BivectorAlgebra, LorentzMetric};
use crate::moyal::{active_passive_angular_residuals, oscillator_active_passive_residual, ExtendedPhaseSpace};
use crate::multivector::{grade_of, MetricSignature, Multivector, Signature};
use crate::random;
use crate::rigid_body::{integrate, reversal_error, InertiaOperator, RigidBodyState};
use crate::scalar::{Gaussian, PolyScalar};

type Mv = Multivector<Gaussian>;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Measurement {
    pub name: String,
    pub value: f64,
    pub limit: f64,
}

impl Measurement {
    pub fn new(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Measurement { name: name.into(), value, limit }
    }

    /// Counts failures of an exact check.
    pub fn exact(name: impl Into<String>, failures: usize) -> Self {
        Measurement::new(name, failures as f64, 0.0)
    }

    pub fn passed(&self) -> bool {
        self.value <= self.limit
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GroupReport {
    pub id: u8,
    pub title: String,
    pub measurements: Vec<Measurement>,
}

impl GroupReport {
    pub fn passed(&self) -> bool {
        self.measurements.iter().all(Measurement::passed)
    }

    pub fn failures(&self) -> Vec<&Measurement> {
        self.measurements.iter().filter(|m| !m.passed()).collect()
    }

    /// Applies a uniform scale to every nonzero limit.
    pub fn scale_limits(&mut self, factor: f64) {
        for m in &mut self.measurements {
            if m.limit > 0.0 {
                m.limit *= factor;
            }
        }
    }
}

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

pub fn kernel_signatures() -> Vec<Signature> {
    vec![
        MetricSignature::euclidean(2),
        MetricSignature::euclidean(3),
        MetricSignature::euclidean(4),
        MetricSignature::minkowski_nonstandard(4),
        MetricSignature::symplectic(1),
        MetricSignature::symplectic(2),
    ]
}

fn grades_allowed(r: usize, s: usize, k: usize) -> bool {
    k >= r.abs_diff(s) && k <= r + s && (r + s - k) % 2 == 0
}

/// Associativity, grade structure and reversion on `triples` random
/// rational triples per signature.
pub fn kernel_exactness(seed: u64, triples: usize) -> Result<GroupReport> {
    let mut measurements = Vec::new();
    for (n, sig) in kernel_signatures().iter().enumerate() {
        let mut r = rng(seed, n as u64);
        let transposed = sig.transposed();
        let (mut assoc, mut grade, mut rev) = (0, 0, 0);
        for _ in 0..triples {
            let mut gen = || random::multivector(&mut r, sig, 0.35, |r| random::gaussian(r, 6, 4, false));
            let (a, b, c) = (gen(), gen(), gen());
            let ab = a.star(&b)?;
            if ab.star(&c)? != a.star(&b.star(&c)?)? {
                assoc += 1;
            }
            for ra in a.grades() {
                for sb in b.grades() {
                    let p = a.grade(ra).star(&b.grade(sb))?;
                    if p.terms().any(|(m, _)| !grades_allowed(ra, sb, grade_of(m))) {
                        grade += 1;
                    }
                }
            }
            let lhs = ab.reverse().with_signature(&transposed)?;
            let rhs = b.reverse().with_signature(&transposed)?.star(&a.reverse().with_signature(&transposed)?)?;
            if lhs != rhs {
                rev += 1;
            }
        }
        let id = sig.id().to_string();
        measurements.push(Measurement::exact(format!("{id}: associativity"), assoc));
        measurements.push(Measurement::exact(format!("{id}: grade structure"), grade));
        measurements.push(Measurement::exact(format!("{id}: reversion"), rev));
    }
    Ok(GroupReport { id: 1, title: "Clifford kernel exactness".into(), measurements })
}

/// Basis relations, quaternion units and the vector product split.
pub fn basic_identities(seed: u64, pairs: usize) -> Result<GroupReport> {
    let mut measurements = Vec::new();
    for sig in [MetricSignature::euclidean(3), MetricSignature::minkowski_nonstandard(4)] {
        let mut bad = 0;
        for i in 0..sig.dim() {
            for j in 0..sig.dim() {
                let (a, b) = (Mv::generator(&sig, i)?, Mv::generator(&sig, j)?);
                let eta = Mv::scalar(&sig, Gaussian::real(sig.entry(i, j).clone()));
                if a.star(&b)? != &eta + &a.wedge(&b)? {
                    bad += 1;
                }
            }
        }
        measurements.push(Measurement::exact(format!("{}: basis products", sig.id()), bad));
    }

    let sig = MetricSignature::euclidean(3);
    let minus_one = Mv::scalar(&sig, Gaussian::from_int(-1));
    let q = [Mv::blade(&sig, &[1, 2])?, Mv::blade(&sig, &[0, 2])?, Mv::blade(&sig, &[0, 1])?];
    let mut bad = q.iter().filter(|qi| qi.star(qi).map(|s| s != minus_one).unwrap_or(true)).count();
    if q[0].star(&q[1])?.star(&q[2])? != minus_one {
        bad += 1;
    }
    measurements.push(Measurement::exact("quaternion units", bad));

    let mut r = rng(seed, 100);
    let i3 = Mv::pseudoscalar(&sig);
    let mut bad = 0;
    for _ in 0..pairs {
        let a: Vec<Gaussian> = (0..3).map(|_| random::gaussian(&mut r, 9, 5, false)).collect();
        let b: Vec<Gaussian> = (0..3).map(|_| random::gaussian(&mut r, 9, 5, false)).collect();
        let dot = (0..3).fold(Gaussian::zero(), |acc, k| &acc + &(&a[k] * &b[k]));
        let cross: Vec<Gaussian> =
            (0..3).map(|k| &(&a[(k + 1) % 3] * &b[(k + 2) % 3]) - &(&a[(k + 2) % 3] * &b[(k + 1) % 3])).collect();
        let lhs = Mv::vector(&sig, &a)?.star(&Mv::vector(&sig, &b)?)?;
        let rhs = &Mv::scalar(&sig, dot) + &i3.star(&Mv::vector(&sig, &cross)?)?;
        if lhs != rhs {
            bad += 1;
        }
    }
    measurements.push(Measurement::exact(format!("vector product split ({pairs} pairs)"), bad));
    Ok(GroupReport { id: 2, title: "Basic product identities".into(), measurements })
}

/// Structure constants, Killing metrics, Lorentz relations and the
/// `u(n)`/`gl(n)` families.
pub fn algebra_closure() -> Result<GroupReport> {
    let mut measurements = Vec::new();
    let so3 = BivectorAlgebra::so3();
    let mut bad = 0;
    let kappa = so3.killing()?;
    for i in 0..3 {
        for j in 0..3 {
            if kappa[i][j] != Gaussian::from_int(if i == j { -1 } else { 0 }) {
                bad += 1;
            }
            for k in 0..3 {
                if so3.structure()[i][j][k] != Gaussian::from_int(-epsilon(i, j, k)) {
                    bad += 1;
                }
            }
        }
    }
    measurements.push(Measurement::exact("so3: C = -eps, kappa = -delta", bad));

    for (metric, flip, label) in
        [(LorentzMetric::Nonstandard, 1, "nonstandard"), (LorentzMetric::Standard, -1, "standard")]
    {
        let gens = lorentz_generators(metric);
        let i4 = Mv::pseudoscalar(&lorentz_signature(metric));
        let (l, k) = (&gens[..3], &gens[3..]);
        let mut bad = 0;
        // [L,L] = -s I eps L, [L,K] = -s I eps K, [K,K] = s I eps L
        for (x, z, y, sign) in [(l, l, l, -flip), (l, k, k, -flip), (k, k, l, flip)] {
            for i in 0..3 {
                for j in 0..3 {
                    let lhs = &x[i].star(&z[j])? - &z[j].star(&x[i])?;
                    let mut rhs = Mv::zero(i4.signature());
                    for (m, ym) in y.iter().enumerate() {
                        rhs = &rhs + &i4.star(ym)?.scale(&Gaussian::from_int(sign * epsilon(i, j, m)));
                    }
                    if lhs != rhs {
                        bad += 1;
                    }
                }
            }
        }
        let alg = BivectorAlgebra::lorentz(metric);
        bad += usize::from(alg.jacobi_violation().is_some());
        measurements.push(Measurement::exact(format!("lorentz ({label}) relations"), bad));
    }

    for n in 1..=3 {
        let u = BivectorAlgebra::un(n)?;
        let j = complex_structure(u.signature(), n)?;
        let bad = usize::from(u.dim() != n * n)
            + usize::from(u.jacobi_violation().is_some())
            + u.non_commuting_with(&j)?.len();
        measurements.push(Measurement::exact(format!("u({n}) closes and commutes with J"), bad));
        let gl = BivectorAlgebra::gln(n)?;
        let bad = usize::from(gl.dim() != n * n) + usize::from(gl.jacobi_violation().is_some());
        measurements.push(Measurement::exact(format!("gl({n}) closes"), bad));
    }
    Ok(GroupReport { id: 3, title: "Bivector algebra closure".into(), measurements })
}

/// Active angular momentum against passive rotor action.
pub fn active_passive() -> Result<GroupReport> {
    let bad = active_passive_angular_residuals()?.iter().filter(|r| !r.is_zero()).count();
    let mut measurements = vec![Measurement::exact("combined generator annihilates x^j s_j", bad)];
    for (label, t) in [("pi/4", std::f64::consts::FRAC_PI_4), ("pi/2", std::f64::consts::FRAC_PI_2)] {
        measurements.push(Measurement::new(
            format!("oscillator flow vs rotor at t = {label}"),
            oscillator_active_passive_residual(t)?,
            1e-12,
        ));
    }
    Ok(GroupReport { id: 4, title: "Active and passive rotations".into(), measurements })
}

fn canonical_failures(eps: &ExtendedPhaseSpace) -> Result<usize> {
    let sig = eps.signature().clone();
    let n = 2 * eps.dof();
    let mut bad = 0;
    for a in 0..n {
        for b in 0..n {
            let zy = eps.bracket(&eps.lift(&eps.z(a)), &eps.lift(&eps.y(b)))?;
            let one = if a == b { Multivector::one(&sig) } else { Multivector::zero(&sig) };
            bad += usize::from(zy != one);
            let zl = eps.bracket(&eps.zeta(a), &eps.lambda(b))?;
            let minus_i = if a == b {
                Multivector::scalar(&sig, PolyScalar::constant(-Gaussian::i()))
            } else {
                Multivector::zero(&sig)
            };
            bad += usize::from(zl != minus_i);
            bad += usize::from(!eps.bracket(&eps.zeta(a), &eps.zeta(b))?.is_zero());
            bad += usize::from(!eps.bracket(&eps.lambda(a), &eps.lambda(b))?.is_zero());
            bad += usize::from(!eps.bracket(&eps.lift(&eps.z(a)), &eps.lift(&eps.z(b)))?.is_zero());
            bad += usize::from(!eps.bracket(&eps.lift(&eps.y(a)), &eps.lift(&eps.y(b)))?.is_zero());
        }
    }
    Ok(bad)
}

/// Canonical relations, equations of motion and BRST charges for `count`
/// random polynomial Hamiltonians of degree at most 4.
pub fn brst_suite(seed: u64, count: usize) -> Result<GroupReport> {
    let mut measurements = Vec::new();
    for dof in 1..=2 {
        let eps = ExtendedPhaseSpace::new(dof, false);
        measurements.push(Measurement::exact(format!("dof {dof}: canonical relations"), canonical_failures(&eps)?));
    }
    let mut r = rng(seed, 200);
    let (mut eom, mut charges) = (0, 0);
    for k in 0..count {
        let dof = 1 + k % 2;
        let eps = ExtendedPhaseSpace::new(dof, false);
        let h = random::poly(&mut r, 2 * dof, 4, 4);
        eom += eps.equations_of_motion_check(&h)?.iter().filter(|(_, res)| !res.is_zero()).count();
        charges += eps.brst_check(&h)?.failures().len();
    }
    measurements.push(Measurement::exact(format!("equations of motion ({count} hamiltonians)"), eom));
    measurements.push(Measurement::exact(format!("BRST conservation and nilpotency ({count} hamiltonians)"), charges));
    Ok(GroupReport { id: 5, title: "Extended phase space and BRST".into(), measurements })
}

/// Grid residuals on the round sphere with the poles excluded by `margin`.
pub fn sphere_geometry(grid: usize, margin: f64) -> Result<GroupReport> {
    let s = Sphere::unit();
    let frame = |y: &[f64]| -> Result<Vec2> { orthonormal_frame(&Sphere::unit(), y) };
    let (mut agree, mut dk, mut curv, mut tors, mut ricci) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let pi = std::f64::consts::PI;
    for i in 0..grid {
        for j in 0..grid {
            let x = [margin + (pi - 2.0 * margin) * i as f64 / (grid - 1) as f64, 2.0 * pi * j as f64 / grid as f64];
            agree = agree.max(christoffel(&s, &x)?.agreement);
            dk = dk.max((gaussian_curvature(&s, &x)? - 1.0).abs());
            let c = cartan_structure_residuals(&s, &x, &frame)?;
            curv = curv.max(c.curvature);
            tors = tors.max(c.torsion);
            let r = riemann(&s, &x)?;
            let f = frames_at(&s, &x)?;
            ricci = ricci.max(first_bianchi_residual(&r)).max(ricci_identity_residual(
                &f,
                &r,
                &[1.0, 0.3],
                &[-0.4, 0.8],
                &[0.2, -1.1],
            )?);
        }
    }
    // in two dimensions the differential identity cancels by antisymmetry,
    // so it is measured on the 3-sphere
    let s3 = Sphere::new(1.0, 3)?;
    let mut bianchi: f64 = 0.0;
    for x in [[0.8, 1.0, 0.0], [1.3, 1.4, 2.0], [1.9, 2.0, 4.0], [1.2, 0.9, 5.5]] {
        bianchi = bianchi.max(second_bianchi_residual(&s3, &x)?);
    }
    let big = Sphere::new(2.0, 2)?;
    let mut dk2: f64 = 0.0;
    for x in [[0.5, 0.1], [1.5, 3.0], [2.6, 5.0]] {
        dk2 = dk2.max((gaussian_curvature(&big, &x)? - 0.25).abs());
    }
    let measurements = vec![
        Measurement::new("christoffel metric vs extrinsic", agree, 1e-8),
        Measurement::new("|K - 1|", dk, 1e-6),
        Measurement::new("curvature structure equation", curv, 1e-6),
        Measurement::new("torsion structure equation", tors, 1e-6),
        Measurement::new("first Bianchi and Ricci identity", ricci, 1e-6),
        Measurement::new("second Bianchi (3-sphere)", bianchi, 1e-6),
        Measurement::new("radius 2: |K - 1/4|", dk2, 1e-6),
    ];
    Ok(GroupReport { id: 6, title: format!("Unit sphere geometry on a {grid}x{grid} grid"), measurements })
}

/// Hamiltonian fields, bracket homomorphism, complex structure, momentum
/// map and the circle action on the sphere.
pub fn symplectic_suite(seed: u64, samples: usize) -> Result<GroupReport> {
    let mut r = rng(seed, 300);
    let (mut ham, mut hom, mut jj) = (0, 0, 0);
    for dof in 1..=3 {
        let sym = Symplectic::new(dof);
        for _ in 0..samples {
            let f = random::poly(&mut r, 2 * dof, 3, 4);
            let h = random::poly(&mut r, 2 * dof, 3, 4);
            ham += usize::from(!sym.hamiltonian_residual(&h)?.is_zero());
            hom += sym.bracket_homomorphism_residual(&f, &h).iter().filter(|c| !c.is_zero()).count();
            let z: Vec<Gaussian> = (0..2 * dof).map(|_| random::gaussian(&mut r, 7, 3, false)).collect();
            let zz = sym.dot_j(&sym.dot_j(&z)?)?;
            jj += zz.iter().zip(&z).filter(|(a, b)| **a != -*b).count();
        }
    }
    let ps = crate::moyal::PhaseSpace::new(3);
    let mm = momentum_map_angular(&ps)?;
    let circle = circle_action_s2(20, 0.1)?;
    let measurements = vec![
        Measurement::exact("h_H . Omega = dH", ham),
        Measurement::exact("[h_F, h_G] = -h_{F,G}", hom),
        Measurement::exact("(z . J) . J = -z", jj),
        Measurement::exact("angular momentum map residuals", mm.nonzero()),
        Measurement::new("sphere circle action PDE", circle.pde_residual, 1e-9),
    ];
    Ok(GroupReport { id: 7, title: "Symplectic and Poisson structures".into(), measurements })
}

/// Parameters of a rigid body run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RigidBodyRun {
    pub moments: [f64; 3],
    pub l0: [f64; 3],
    pub dt: f64,
    pub steps: usize,
}

impl Default for RigidBodyRun {
    fn default() -> Self {
        RigidBodyRun { moments: [1.0, 2.0, 3.0], l0: [0.7, -0.4, 0.5], dt: 1e-3, steps: 10_000 }
    }
}

pub fn rigid_body_suite(run: &RigidBodyRun) -> Result<GroupReport> {
    let inertia = InertiaOperator::principal(run.moments)?;
    let s0 = RigidBodyState::new(run.l0);
    let traj = integrate(&s0, &inertia, run.dt, run.steps)?;
    let c = traj.conservation()?;
    let measurements = vec![
        Measurement::new("Casimir drift", c.casimir_drift, 1e-10),
        Measurement::new("energy drift", c.energy_drift, 1e-8),
        Measurement::new("spatial angular momentum drift", c.spatial_momentum_drift, 1e-6),
        Measurement::new("Poincare equation residual", traj.max_poincare_residual()?, 1e-6),
        Measurement::new("forward-backward reversal", reversal_error(&s0, &inertia, run.dt, run.steps)?, 1e-8),
        Measurement::new("rotor normalization", c.rotor_defect.max(c.orthogonality_defect), 1e-9),
    ];
    Ok(GroupReport { id: 8, title: "Free rigid body".into(), measurements })
}

/// Suite sizes; the defaults match the acceptance thresholds.
#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub seed: u64,
    pub triples: usize,
    pub vector_pairs: usize,
    pub hamiltonians: usize,
    pub grid: usize,
    pub symplectic_samples: usize,
    pub rigid_body: RigidBodyRun,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 0,
            triples: 1000,
            vector_pairs: 100,
            hamiltonians: 20,
            grid: 20,
            symplectic_samples: 8,
            rigid_body: RigidBodyRun::default(),
        }
    }
}

pub fn run_group(id: u8, cfg: &SuiteConfig) -> Result<GroupReport> {
    match id {
        1 => kernel_exactness(cfg.seed, cfg.triples),
        2 => basic_identities(cfg.seed, cfg.vector_pairs),
        3 => algebra_closure(),
        4 => active_passive(),
        5 => brst_suite(cfg.seed, cfg.hamiltonians),
        6 => sphere_geometry(cfg.grid, 0.2),
        7 => symplectic_suite(cfg.seed, cfg.symplectic_samples),
        8 => rigid_body_suite(&cfg.rigid_body),
        _ => Err(crate::error::Error::Invalid(format!("no check group {id}"))),
    }
}

pub const GROUPS: [u8; 8] = [1, 2, 3, 4, 5, 6, 7, 8];

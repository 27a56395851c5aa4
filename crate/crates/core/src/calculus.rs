//! Exterior calculus, polyvector brackets and symplectic structures on flat
//! coordinate spaces, with exact polynomial coefficients.
//!
//! Forms and polyvectors share one carrier: generator `i` stands for `dx^i`
//! in a form and for `d/dx^i` in a polyvector. The pairing between them is
//! the coordinate duality, so no metric enters.

use num::{One, Zero};

use crate::error::{Error, Result};
use crate::lie::{epsilon, induced_field_matrix, BivectorAlgebra};
use crate::linalg;
use crate::moyal::PhaseSpace;
use crate::multivector::{MetricSignature, Multivector, Signature};
use crate::scalar::{Gaussian, PolyScalar, Rational, Scalar, Var};

type Field = Multivector<PolyScalar>;

/// Identity-metric signature used as the coordinate basis of a flat chart.
pub fn coordinate_signature(id: &str, labels: Vec<String>) -> Signature {
    let d = labels.len();
    let mut m = vec![Rational::zero(); d * d];
    for i in 0..d {
        m[i * d + i] = Rational::one();
    }
    MetricSignature::with_labels(id.to_string(), d, m, labels).expect("identity metric")
}

fn indices(mask: u64) -> Vec<usize> {
    (0..64).filter(|i| mask >> i & 1 == 1).collect()
}

/// Interior product `a . A` with the first slot: for a blade
/// `dx^{k_1} .. dx^{k_r}` the sum `sum_m (-1)^(m-1) a^{k_m} (.. omit k_m ..)`.
pub fn interior<S: Scalar>(a: &[S], form: &Multivector<S>) -> Multivector<S> {
    let mut out = Multivector::zero(form.signature());
    for (mask, c) in form.terms() {
        for (m, k) in indices(mask).into_iter().enumerate() {
            if a[k].is_zero() {
                continue;
            }
            let term = a[k].mul(c);
            out.add_blade(mask ^ (1 << k), &if m % 2 == 1 { term.neg() } else { term });
        }
    }
    out
}

/// Removes generator `i` from the right end of each blade: `A . e^i` taken
/// on the last slot, zero on scalars.
pub fn right_interior<S: Scalar>(form: &Multivector<S>, i: usize) -> Multivector<S> {
    let mut out = Multivector::zero(form.signature());
    for (mask, c) in form.terms() {
        if mask >> i & 1 == 0 {
            continue;
        }
        let after = (mask >> (i + 1)).count_ones();
        out.add_blade(mask ^ (1 << i), &if after % 2 == 1 { c.neg() } else { c.clone() });
    }
    out
}

/// Extends a linear map on generators to a derivation of the wedge product:
/// each generator of a blade is replaced in turn by `image(k)`.
pub fn derivation<S: Scalar>(form: &Multivector<S>, image: impl Fn(usize) -> Multivector<S>) -> Result<Multivector<S>> {
    let sig = form.signature().clone();
    let mut out = Multivector::zero(&sig);
    for (mask, c) in form.terms() {
        let idx = indices(mask);
        for m in 0..idx.len() {
            let mut blade = Multivector::scalar(&sig, c.clone());
            for (n, &k) in idx.iter().enumerate() {
                let factor = if n == m { image(k) } else { Multivector::generator(&sig, k)? };
                blade = blade.wedge(&factor)?;
            }
            out = out.try_add(&blade)?;
        }
    }
    Ok(out)
}

/// Flat coordinate space with polynomial fields.
#[derive(Clone, Debug)]
pub struct FlatSpace {
    vars: Vec<Var>,
    sig: Signature,
}

impl FlatSpace {
    pub fn new(id: &str, vars: Vec<Var>, labels: Vec<String>) -> Result<Self> {
        if vars.len() != labels.len() {
            return Err(Error::Invalid("one label per coordinate".into()));
        }
        Ok(FlatSpace { sig: coordinate_signature(id, labels), vars })
    }

    pub fn from_phase_space(ps: &PhaseSpace) -> Self {
        let labels = ps.z().iter().map(|v| ps.registry().name(*v).to_string()).collect();
        FlatSpace::new(&format!("darboux:{}", 2 * ps.dof()), ps.z(), labels).expect("matching labels")
    }

    pub fn dim(&self) -> usize {
        self.vars.len()
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn one_form(&self, coeffs: &[PolyScalar]) -> Result<Field> {
        Multivector::vector(&self.sig, coeffs)
    }

    pub fn components(&self, v: &Field) -> Vec<PolyScalar> {
        (0..self.dim()).map(|i| v.coeff(1 << i)).collect()
    }

    fn partial(&self, a: &Field, i: usize) -> Field {
        a.map(|c| c.diff(self.vars[i]))
    }

    pub fn gradient(&self, f: &PolyScalar) -> Vec<PolyScalar> {
        self.vars.iter().map(|v| f.diff(*v)).collect()
    }

    pub fn d(&self, a: &Field) -> Result<Field> {
        let mut out = Field::zero(&self.sig);
        for i in 0..self.dim() {
            out = out.try_add(&Field::generator(&self.sig, i)?.wedge(&self.partial(a, i))?)?;
        }
        Ok(out)
    }

    /// `a^k d_k` applied to the coefficients.
    pub fn directional(&self, a: &[PolyScalar], form: &Field) -> Result<Field> {
        let mut out = Field::zero(&self.sig);
        for (k, ak) in a.iter().enumerate() {
            out = out.try_add(&self.partial(form, k).scale(ak))?;
        }
        Ok(out)
    }

    /// `(d i_a + i_a d) A`.
    pub fn lie_derivative(&self, a: &[PolyScalar], form: &Field) -> Result<Field> {
        self.d(&interior(a, form))?.try_add(&interior(a, &self.d(form)?))
    }

    /// Component form `a^k d_k A + (d_i a^k)` substituted for each `dx^k`.
    pub fn lie_derivative_components(&self, a: &[PolyScalar], form: &Field) -> Result<Field> {
        let sig = self.sig.clone();
        let moved = derivation(form, |k| {
            let coeffs: Vec<PolyScalar> = self.vars.iter().map(|v| a[k].diff(*v)).collect();
            Multivector::vector(&sig, &coeffs).expect("dimension matches")
        })?;
        self.directional(a, form)?.try_add(&moved)
    }

    pub fn jacobi_lie_bracket(&self, a: &[PolyScalar], b: &[PolyScalar]) -> Vec<PolyScalar> {
        (0..self.dim())
            .map(|i| {
                let mut s = PolyScalar::zero();
                for j in 0..self.dim() {
                    s += &(&a[j] * &b[i].diff(self.vars[j]));
                    s = &s - &(&b[j] * &a[i].diff(self.vars[j]));
                }
                s
            })
            .collect()
    }

    /// `(A . D) B = sum_i (A . e^i) ^ d_i B` with the contraction on the
    /// last slot of `A`.
    fn contract_derivative(&self, a: &Field, b: &Field) -> Result<Field> {
        let mut out = Field::zero(&self.sig);
        for i in 0..self.dim() {
            out = out.try_add(&right_interior(a, i).wedge(&self.partial(b, i))?)?;
        }
        Ok(out)
    }

    /// Schouten-Nijenhuis bracket of homogeneous polyvector fields,
    /// `(-1)^(r-1) (A.D)B + (-1)^(rs) (-1)^(s-1) (B.D)A`.
    pub fn schouten_nijenhuis(&self, a: &Field, b: &Field) -> Result<Field> {
        let r = grade_or_zero(a)?;
        let s = grade_or_zero(b)?;
        let sign = |e: i64| if e.rem_euclid(2) == 0 { PolyScalar::one() } else { -&PolyScalar::one() };
        let first = self.contract_derivative(a, b)?.scale(&sign(r as i64 - 1));
        let second = self.contract_derivative(b, a)?.scale(&sign((r * s + s) as i64 - 1));
        first.try_add(&second)
    }
}

fn grade_or_zero<S: Scalar>(a: &Multivector<S>) -> Result<usize> {
    if a.is_zero() {
        Ok(0)
    } else {
        a.homogeneous_grade()
    }
}

/// Symplectic structures on the flat Darboux chart of a phase space.
#[derive(Clone, Debug)]
pub struct Symplectic {
    ps: PhaseSpace,
    flat: FlatSpace,
}

impl Symplectic {
    pub fn new(dof: usize) -> Self {
        let ps = PhaseSpace::new(dof);
        let flat = FlatSpace::from_phase_space(&ps);
        Symplectic { ps, flat }
    }

    pub fn phase_space(&self) -> &PhaseSpace {
        &self.ps
    }

    pub fn flat(&self) -> &FlatSpace {
        &self.flat
    }

    fn n(&self) -> usize {
        self.flat.dim()
    }

    fn const_poly(r: &Rational) -> PolyScalar {
        PolyScalar::from_rational(r.clone())
    }

    /// `Omega_ab` with `J = (Omega^{-1})^T`.
    pub fn omega_matrix(&self) -> Result<Vec<Vec<Rational>>> {
        let n = self.n();
        let jt: Vec<Rational> = (0..n * n).map(|k| self.ps.poisson_tensor()[k % n][k / n].clone()).collect();
        let (inv, _) = linalg::inverse_rational(n, &jt)?;
        Ok((0..n).map(|a| inv[a * n..(a + 1) * n].to_vec()).collect())
    }

    /// `Omega = 1/2 Omega_ab dz^a dz^b`.
    pub fn omega(&self) -> Result<Field> {
        let om = self.omega_matrix()?;
        let sig = self.flat.signature();
        let mut out = Field::zero(sig);
        for a in 0..self.n() {
            for b in a + 1..self.n() {
                if !om[a][b].is_zero() {
                    out = out.try_add(&Field::blade(sig, &[a, b])?.scale(&Self::const_poly(&om[a][b])))?;
                }
            }
        }
        Ok(out)
    }

    /// `J = 1/2 J^ab zeta_a zeta_b`.
    pub fn j_bivector(&self) -> Result<Field> {
        let jt = self.ps.poisson_tensor();
        let sig = self.flat.signature();
        let mut out = Field::zero(sig);
        for a in 0..self.n() {
            for b in a + 1..self.n() {
                if !jt[a][b].is_zero() {
                    out = out.try_add(&Field::blade(sig, &[a, b])?.scale(&Self::const_poly(&jt[a][b])))?;
                }
            }
        }
        Ok(out)
    }

    /// `z^flat = z . Omega`.
    pub fn flat_map(&self, z: &[PolyScalar]) -> Result<Field> {
        Ok(interior(z, &self.omega()?))
    }

    /// `omega^sharp = J . omega`.
    pub fn sharp(&self, omega: &Field) -> Result<Field> {
        self.j_bivector()?.inner(omega)
    }

    /// `h_H = J^{ij} (d_j H) xi_i`.
    pub fn hamiltonian_field(&self, h: &PolyScalar) -> Vec<PolyScalar> {
        let jt = self.ps.poisson_tensor();
        let grad = self.flat.gradient(h);
        (0..self.n())
            .map(|i| {
                let mut s = PolyScalar::zero();
                for (j, gj) in grad.iter().enumerate() {
                    if !jt[i][j].is_zero() {
                        s += &gj.scale(&Gaussian::real(jt[i][j].clone()));
                    }
                }
                s
            })
            .collect()
    }

    /// `h_H . Omega - dH`.
    pub fn hamiltonian_residual(&self, h: &PolyScalar) -> Result<Field> {
        let lhs = self.flat_map(&self.hamiltonian_field(h))?;
        lhs.try_sub(&self.flat.d(&Field::scalar(self.flat.signature(), h.clone()))?)
    }

    pub fn poisson_bracket(&self, f: &PolyScalar, g: &PolyScalar) -> PolyScalar {
        self.ps.poisson_bracket(f, g)
    }

    /// `(h_G h_F) . Omega`.
    pub fn poisson_from_omega(&self, f: &PolyScalar, g: &PolyScalar) -> Result<PolyScalar> {
        let hf = self.flat.one_form(&self.hamiltonian_field(f))?;
        let hg = self.flat.one_form(&self.hamiltonian_field(g))?;
        Ok(hg.wedge(&hf)?.inner(&self.omega()?)?.scalar_part())
    }

    /// `[h_F, h_G]_JLB + h_{F,G}`, componentwise.
    pub fn bracket_homomorphism_residual(&self, f: &PolyScalar, g: &PolyScalar) -> Vec<PolyScalar> {
        let lhs = self.flat.jacobi_lie_bracket(&self.hamiltonian_field(f), &self.hamiltonian_field(g));
        let rhs = self.hamiltonian_field(&self.poisson_bracket(f, g));
        lhs.iter().zip(&rhs).map(|(a, b)| a + b).collect()
    }

    /// `theta = p_m dq^m`.
    pub fn canonical_one_form(&self) -> Result<Field> {
        let d = self.ps.dof();
        let mut coeffs = vec![PolyScalar::zero(); 2 * d];
        for m in 0..d {
            coeffs[m] = self.ps.p(m);
        }
        self.flat.one_form(&coeffs)
    }

    /// `z . Sy w = z^a Omega_ab w^b`.
    pub fn symplectic_product(&self, z: &[Gaussian], w: &[Gaussian]) -> Result<Gaussian> {
        let om = self.omega_matrix()?;
        let mut s = Gaussian::zero();
        for a in 0..self.n() {
            for b in 0..self.n() {
                s = &s + &(&(&z[a] * &Gaussian::real(om[a][b].clone())) * &w[b]);
            }
        }
        Ok(s)
    }

    /// `z . J` for a constant vector, as components.
    pub fn dot_j(&self, z: &[Gaussian]) -> Result<Vec<Gaussian>> {
        let sig = self.flat.signature();
        let j = self.j_bivector()?.map(|c| c.constant_part());
        let v = Multivector::vector(sig, z)?.inner(&j)?;
        Ok((0..self.n()).map(|i| v.coeff(1 << i)).collect())
    }

    pub fn j_dot_j(&self) -> Result<Gaussian> {
        let j = self.j_bivector()?.map(|c| c.constant_part());
        Ok(j.inner(&j)?.scalar_part())
    }
}

/// `{F,G} = C^k_ij theta_k d_i F d_j G` on the dual of a bivector algebra.
pub fn lie_poisson_bracket(alg: &BivectorAlgebra, theta: &[Var], f: &PolyScalar, g: &PolyScalar) -> Result<PolyScalar> {
    let n = alg.dim();
    if theta.len() != n {
        return Err(Error::Invalid(format!("need {n} dual coordinates")));
    }
    let c = alg.structure();
    let mut out = PolyScalar::zero();
    for i in 0..n {
        let fi = f.diff(theta[i]);
        if fi.is_zero() {
            continue;
        }
        for j in 0..n {
            let gj = g.diff(theta[j]);
            if gj.is_zero() {
                continue;
            }
            let fg = &fi * &gj;
            for (k, th) in theta.iter().enumerate() {
                if !c[i][j][k].is_zero() {
                    out += &(&fg * &PolyScalar::var(*th)).scale(&c[i][j][k]);
                }
            }
        }
    }
    Ok(out)
}

/// Exact residuals of the angular momentum map on a 3 degree of freedom
/// phase space.
#[derive(Clone, Debug)]
pub struct MomentumMapReport {
    /// `P_i = eps_ijk q^j p_k`.
    pub generators: Vec<PolyScalar>,
    /// `{P_i, P_j} - eps_ijk P_k`.
    pub algebra: Vec<PolyScalar>,
    /// `h_{P_i} - orientation * B_i^lifted . (q + pi)`, componentwise.
    pub field_match: Vec<PolyScalar>,
    /// `(b_j . d) P_i - C^i_jk P_k`.
    pub equivariance: Vec<PolyScalar>,
    /// Sign relating the hamiltonian field of `P_i` to the lifted induced
    /// field in the `h . Omega = dH` convention.
    pub orientation: i64,
}

impl MomentumMapReport {
    pub fn nonzero(&self) -> usize {
        self.algebra.iter().chain(&self.field_match).chain(&self.equivariance).filter(|r| !r.is_zero()).count()
    }

    pub fn passed(&self) -> bool {
        self.nonzero() == 0
    }
}

pub const MOMENTUM_ORIENTATION: i64 = -1;

/// Lifted induced field of a bivector on `(q, p)`: the same rotation acts on
/// both halves.
pub fn lifted_induced_field(alg: &BivectorAlgebra, i: usize, ps: &PhaseSpace) -> Result<Vec<PolyScalar>> {
    let m = induced_field_matrix(&alg.generators()[i])?;
    let d = ps.dof();
    let mut out = vec![PolyScalar::zero(); 2 * d];
    for k in 0..d {
        for l in 0..d {
            if m[k][l].is_zero() {
                continue;
            }
            out[k] += &ps.q(l).scale(&m[k][l]);
            out[d + k] += &ps.p(l).scale(&m[k][l]);
        }
    }
    Ok(out)
}

pub fn momentum_map_angular(ps: &PhaseSpace) -> Result<MomentumMapReport> {
    if ps.dof() != 3 {
        return Err(Error::Invalid("angular momentum needs 3 degrees of freedom".into()));
    }
    let alg = BivectorAlgebra::so3();
    let sym = Symplectic { ps: ps.clone(), flat: FlatSpace::from_phase_space(ps) };
    let gens: Vec<PolyScalar> = (0..3)
        .map(|i| {
            let mut s = PolyScalar::zero();
            for j in 0..3 {
                for k in 0..3 {
                    let e = epsilon(i, j, k);
                    if e != 0 {
                        s += &(&ps.q(j) * &ps.p(k)).scale(&Gaussian::from_int(e));
                    }
                }
            }
            s
        })
        .collect();
    let mut algebra = Vec::new();
    let mut field_match = Vec::new();
    let mut equivariance = Vec::new();
    let c = alg.structure();
    for i in 0..3 {
        for j in 0..3 {
            let mut r = ps.poisson_bracket(&gens[i], &gens[j]);
            for (k, pk) in gens.iter().enumerate() {
                r = &r - &pk.scale(&Gaussian::from_int(epsilon(i, j, k)));
            }
            algebra.push(r);
        }
        let h = sym.hamiltonian_field(&gens[i]);
        let b = lifted_induced_field(&alg, i, ps)?;
        for (hk, bk) in h.iter().zip(&b) {
            field_match.push(hk - &bk.scale(&Gaussian::from_int(MOMENTUM_ORIENTATION)));
        }
    }
    for j in 0..3 {
        let b = lifted_induced_field(&alg, j, ps)?;
        for i in 0..3 {
            let mut r = PolyScalar::zero();
            for (bk, v) in b.iter().zip(ps.z()) {
                r += &(bk * &gens[i].diff(v));
            }
            for (k, pk) in gens.iter().enumerate() {
                r = &r - &pk.scale(&c[j][k][i]);
            }
            equivariance.push(r);
        }
    }
    Ok(MomentumMapReport { generators: gens, algebra, field_match, equivariance, orientation: MOMENTUM_ORIENTATION })
}

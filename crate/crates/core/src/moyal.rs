//! Moyal product on polynomial phase space functions and the extended
//! product on superfunctions of `(z, y, zeta, lambda)`.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::linalg;
use crate::multivector::{half, MetricSignature, Multivector, Signature};
use crate::scalar::{int, Gaussian, Monomial, PolyScalar, Rational, Var, VarRegistry};

pub type Superfunction = Multivector<PolyScalar>;

/// One factor `exp(c d<_a d>_b)` of a bidifferential exponential.
#[derive(Clone, Debug)]
pub struct DerivativePair {
    pub left: Var,
    pub right: Var,
    pub coeff: PolyScalar,
}

/// `f exp(sum_pairs c d<_a d>_b) g` for commuting variables. The factors
/// commute, so they are applied one after another on monomial pairs.
pub fn bidifferential_exp(f: &PolyScalar, g: &PolyScalar, pairs: &[DerivativePair]) -> PolyScalar {
    type State = BTreeMap<(Monomial, Monomial), PolyScalar>;
    let mut states: State = BTreeMap::new();
    for (ma, ca) in f.terms() {
        for (mb, cb) in g.terms() {
            let slot = states.entry((ma.clone(), mb.clone())).or_default();
            *slot += &PolyScalar::constant(ca * cb);
        }
    }
    for pair in pairs {
        let mut next: State = BTreeMap::new();
        let mut powers = vec![PolyScalar::one()];
        for ((ma, mb), coef) in states {
            let kmax = ma.exponent(pair.left).min(mb.exponent(pair.right));
            while powers.len() <= kmax as usize {
                let p = &powers[powers.len() - 1] * &pair.coeff;
                powers.push(p);
            }
            let (ea, eb) = (ma.exponent(pair.left) as i64, mb.exponent(pair.right) as i64);
            let mut factor = int(1);
            for k in 0..=kmax {
                if k > 0 {
                    let k = k as i64;
                    factor = factor * int((ea - k + 1) * (eb - k + 1)) / int(k);
                }
                let (Some(la), Some(lb)) = (ma.lower(pair.left, k), mb.lower(pair.right, k)) else { break };
                let c = (&coef * &powers[k as usize]).scale(&Gaussian::real(factor.clone()));
                if c.is_zero() {
                    continue;
                }
                let slot = next.entry((la, lb)).or_default();
                *slot += &c;
            }
        }
        states = next.into_iter().filter(|(_, c)| !c.is_zero()).collect();
    }
    let mut out = PolyScalar::zero();
    for ((ma, mb), coef) in states {
        let m = ma.try_mul(&mb).expect("exponent overflow in star product");
        out += &(&coef * &PolyScalar::term(m, Gaussian::one()));
    }
    out
}

/// Polynomial phase space with coordinates `(q_1..q_n, p_1..p_n)`, a formal
/// `hbar`, and Poisson tensor `J^{q_i p_j} = eta^{ij}`,
/// `J^{p_i q_j} = -eta^{ij}` for a diagonal `eta`.
#[derive(Clone, Debug)]
pub struct PhaseSpace {
    reg: VarRegistry,
    q: Vec<Var>,
    p: Vec<Var>,
    hbar: Var,
    eta: Vec<Rational>,
}

impl PhaseSpace {
    pub fn new(dof: usize) -> Self {
        PhaseSpace::with_metric(&vec![int(1); dof], "q", "p")
    }

    pub fn with_metric(eta: &[Rational], qname: &str, pname: &str) -> Self {
        let n = eta.len();
        let names: Vec<String> = (1..=n)
            .map(|i| format!("{qname}{i}"))
            .chain((1..=n).map(|i| format!("{pname}{i}")))
            .chain(["hbar".to_string()])
            .collect();
        let reg = VarRegistry::new(names).expect("distinct names");
        PhaseSpace::from_registry(reg, (0..n).map(Var).collect(), (n..2 * n).map(Var).collect(), Var(2 * n), eta)
    }

    fn from_registry(reg: VarRegistry, q: Vec<Var>, p: Vec<Var>, hbar: Var, eta: &[Rational]) -> Self {
        PhaseSpace { reg, q, p, hbar, eta: eta.to_vec() }
    }

    pub fn registry(&self) -> &VarRegistry {
        &self.reg
    }

    pub fn dof(&self) -> usize {
        self.q.len()
    }

    pub fn q(&self, i: usize) -> PolyScalar {
        PolyScalar::var(self.q[i])
    }

    pub fn p(&self, i: usize) -> PolyScalar {
        PolyScalar::var(self.p[i])
    }

    pub fn hbar(&self) -> Var {
        self.hbar
    }

    /// Coordinates in order `(q, p)`.
    pub fn z(&self) -> Vec<Var> {
        self.q.iter().chain(&self.p).copied().collect()
    }

    /// `J^{ab}` over `z`.
    pub fn poisson_tensor(&self) -> Vec<Vec<Rational>> {
        let n = self.dof();
        let mut j = vec![vec![Rational::zero(); 2 * n]; 2 * n];
        for i in 0..n {
            j[i][n + i] = self.eta[i].clone();
            j[n + i][i] = -self.eta[i].clone();
        }
        j
    }

    pub fn poisson_bracket(&self, f: &PolyScalar, g: &PolyScalar) -> PolyScalar {
        let z = self.z();
        let j = self.poisson_tensor();
        let mut out = PolyScalar::zero();
        for (a, za) in z.iter().enumerate() {
            let fa = f.diff(*za);
            if fa.is_zero() {
                continue;
            }
            for (b, zb) in z.iter().enumerate() {
                if !j[a][b].is_zero() {
                    out += &(&fa * &g.diff(*zb)).scale(&Gaussian::real(j[a][b].clone()));
                }
            }
        }
        out
    }

    fn moyal_pairs(&self) -> Vec<DerivativePair> {
        let z = self.z();
        let j = self.poisson_tensor();
        let ihbar_half = PolyScalar::var(self.hbar).scale(&Gaussian::new(Rational::zero(), half()));
        let mut pairs = Vec::new();
        for (a, row) in j.iter().enumerate() {
            for (b, x) in row.iter().enumerate() {
                if !x.is_zero() {
                    pairs.push(DerivativePair {
                        left: z[a],
                        right: z[b],
                        coeff: ihbar_half.scale(&Gaussian::real(x.clone())),
                    });
                }
            }
        }
        pairs
    }

    /// `F exp((i hbar / 2) J^{ab} d<_a d>_b) G`.
    pub fn moyal(&self, f: &PolyScalar, g: &PolyScalar) -> PolyScalar {
        bidifferential_exp(f, g, &self.moyal_pairs())
    }

    pub fn moyal_commutator(&self, f: &PolyScalar, g: &PolyScalar) -> PolyScalar {
        &self.moyal(f, g) - &self.moyal(g, f)
    }

    /// `lim_{hbar -> 0} [F, G]_M / (i hbar)`.
    pub fn classical_limit(&self, f: &PolyScalar, g: &PolyScalar) -> Result<PolyScalar> {
        let c = self.moyal_commutator(f, g).div_var(self.hbar)?.scale(&-Gaussian::i());
        Ok(c.substitute(self.hbar, &PolyScalar::zero()))
    }

    /// Constant Hessian of a polynomial of degree at most two, over `z`.
    pub fn constant_hessian(&self, h: &PolyScalar) -> Result<Vec<Vec<Gaussian>>> {
        if h.degree() > 2 {
            return Err(Error::NotQuadratic(h.display(&self.reg)));
        }
        let z = self.z();
        Ok(z.iter().map(|a| z.iter().map(|b| h.diff(*a).diff(*b).constant_part()).collect()).collect())
    }

    /// Matrix `exp(t J Hess H)`; row `a` gives `z_a(t)` in terms of `z(0)`.
    pub fn hamiltonian_flow_quadratic(&self, h: &PolyScalar, t: f64) -> Result<DMatrix<f64>> {
        let hess = self.constant_hessian(h)?;
        let linear = h.terms().any(|(m, _)| m.degree() == 1);
        if linear || hess.iter().flatten().any(|x| !x.is_real()) {
            return Err(Error::NotQuadratic(h.display(&self.reg)));
        }
        let n = 2 * self.dof();
        let j = self.poisson_tensor();
        let a = DMatrix::from_fn(n, n, |r, c| {
            (0..n)
                .map(|k| j[r][k].to_f64().unwrap_or(f64::NAN) * hess[k][c].re.to_f64().unwrap_or(f64::NAN))
                .sum::<f64>()
                * t
        });
        let m = a.exp();
        if m.iter().all(|x| x.is_finite()) {
            Ok(m)
        } else {
            Err(Error::NonFinite)
        }
    }

    /// Bosonic `gl(n)` generators: `E^{ij} = q_i p_j + q_j p_i` and
    /// `F^{ij} = q_i p_j - q_j p_i` for `i < j`, then `K^i = q_i p_i`.
    pub fn gln_generators(&self) -> Vec<PolyScalar> {
        let n = self.dof();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                out.push(&(&self.q(i) * &self.p(j)) + &(&self.q(j) * &self.p(i)));
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                out.push(&(&self.q(i) * &self.p(j)) - &(&self.q(j) * &self.p(i)));
            }
        }
        for i in 0..n {
            out.push(&self.q(i) * &self.p(i));
        }
        out
    }

    /// Coordinates of `f` in the span of `basis`, if it lies there.
    pub fn span_coordinates(&self, basis: &[PolyScalar], f: &PolyScalar) -> Option<Vec<Gaussian>> {
        let mut monos: Vec<Monomial> =
            basis.iter().chain([f]).flat_map(|p| p.terms().map(|(m, _)| m.clone()).collect::<Vec<_>>()).collect();
        monos.sort();
        monos.dedup();
        let rows: Vec<Vec<Gaussian>> = monos.iter().map(|m| basis.iter().map(|b| b.coeff(m)).collect()).collect();
        let rhs: Vec<Gaussian> = monos.iter().map(|m| f.coeff(m)).collect();
        linalg::solve(&rows, &rhs)
    }
}

/// Active Lorentz generators on `(x^0..x^3, p^0..p^3)`:
/// `L^i = eps_ijk x^j p^k` and `K^i = M^{0i}` with `M^{mn} = x^m p^n - p^m x^n`.
pub fn active_lorentz(nonstandard: bool) -> (PhaseSpace, Vec<PolyScalar>, Vec<PolyScalar>) {
    let s = if nonstandard { 1 } else { -1 };
    let eta = [int(-s), int(s), int(s), int(s)];
    let ps = PhaseSpace::with_metric(&eta, "x", "p");
    let m = |a: usize, b: usize| &(&ps.q(a) * &ps.p(b)) - &(&ps.p(a) * &ps.q(b));
    let l = vec![m(2, 3), m(3, 1), m(1, 2)];
    let k = vec![m(0, 1), m(0, 2), m(0, 3)];
    (ps, l, k)
}

/// Superfunctions of `(z, y)` and the Grassmann generators
/// `(zeta_1..zeta_2n, lambda^1..lambda^2n)`, with the product
/// `exp((i c/2)(d<_z d>_y - d<_y d>_z) + (1/2)(d<_lambda d>_zeta + d<_zeta d>_lambda))`,
/// where `c` is `hbar` when enabled and `1` otherwise.
#[derive(Clone, Debug)]
pub struct ExtendedPhaseSpace {
    base: PhaseSpace,
    y: Vec<Var>,
    sig: Signature,
    with_hbar: bool,
}

impl ExtendedPhaseSpace {
    pub fn new(dof: usize, with_hbar: bool) -> Self {
        let n = 2 * dof;
        let names: Vec<String> = (1..=dof)
            .map(|i| format!("q{i}"))
            .chain((1..=dof).map(|i| format!("p{i}")))
            .chain((1..=dof).map(|i| format!("yq{i}")))
            .chain((1..=dof).map(|i| format!("yp{i}")))
            .chain(["hbar".to_string()])
            .collect();
        let reg = VarRegistry::new(names).expect("distinct names");
        let base = PhaseSpace::from_registry(
            reg,
            (0..dof).map(Var).collect(),
            (dof..n).map(Var).collect(),
            Var(2 * n),
            &vec![int(1); dof],
        );
        let mut m = vec![Rational::zero(); 4 * n * n];
        for k in 0..n {
            m[k * 2 * n + n + k] = half();
            m[(n + k) * 2 * n + k] = half();
        }
        let labels = base
            .z()
            .iter()
            .map(|v| format!("zeta_{}", base.reg.name(*v)))
            .chain(base.z().iter().map(|v| format!("lambda_{}", base.reg.name(*v))))
            .collect();
        let sig = MetricSignature::with_labels(format!("extended:{dof}"), 2 * n, m, labels).expect("valid");
        ExtendedPhaseSpace { base, y: (n..2 * n).map(Var).collect(), sig, with_hbar }
    }

    pub fn base(&self) -> &PhaseSpace {
        &self.base
    }

    pub fn registry(&self) -> &VarRegistry {
        &self.base.reg
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    fn n(&self) -> usize {
        self.y.len()
    }

    pub fn dof(&self) -> usize {
        self.y.len() / 2
    }

    pub fn y(&self, a: usize) -> PolyScalar {
        PolyScalar::var(self.y[a])
    }

    pub fn z(&self, a: usize) -> PolyScalar {
        PolyScalar::var(self.base.z()[a])
    }

    pub fn zeta(&self, a: usize) -> Superfunction {
        Superfunction::generator(&self.sig, a).expect("index in range")
    }

    pub fn lambda(&self, a: usize) -> Superfunction {
        Superfunction::generator(&self.sig, self.n() + a).expect("index in range")
    }

    pub fn lift(&self, f: &PolyScalar) -> Superfunction {
        Superfunction::scalar(&self.sig, f.clone())
    }

    fn bosonic_pairs(&self) -> Vec<DerivativePair> {
        let mut c = PolyScalar::constant(Gaussian::new(Rational::zero(), half()));
        if self.with_hbar {
            c = &c * &PolyScalar::var(self.base.hbar);
        }
        let z = self.base.z();
        let mut pairs = Vec::new();
        for (k, zk) in z.iter().enumerate() {
            pairs.push(DerivativePair { left: *zk, right: self.y[k], coeff: c.clone() });
            pairs.push(DerivativePair { left: self.y[k], right: *zk, coeff: -&c });
        }
        pairs
    }

    pub fn bosonic_star(&self, f: &PolyScalar, g: &PolyScalar) -> PolyScalar {
        bidifferential_exp(f, g, &self.bosonic_pairs())
    }

    /// With the `hbar` flag each Clifford contraction also carries one `hbar`.
    pub fn star(&self, f: &Superfunction, g: &Superfunction) -> Result<Superfunction> {
        let pairs = self.bosonic_pairs();
        if !self.with_hbar {
            return f.star_with(g, |a, b| bidifferential_exp(a, b, &pairs));
        }
        let hbar = PolyScalar::var(self.base.hbar);
        let mut out = Superfunction::zero(&self.sig);
        for r in f.grades() {
            for s in g.grades() {
                let prod = f.grade(r).star_with(&g.grade(s), |a, b| bidifferential_exp(a, b, &pairs))?;
                for k in prod.grades() {
                    let weight = hbar.pow(((r + s - k) / 2) as u32);
                    out = out.try_add(&prod.grade(k).scale(&weight))?;
                }
            }
        }
        Ok(out)
    }

    /// Grassmann parity; mixed elements are rejected.
    pub fn parity(&self, f: &Superfunction) -> Result<usize> {
        let odd = f.odd();
        if !odd.is_zero() && !f.even().is_zero() {
            return Err(Error::MixedParity(f.display(|c| c.display(self.registry()))));
        }
        Ok(usize::from(!odd.is_zero()))
    }

    /// `(1/i) (F * G - (-1)^(e_F e_G) G * F)`, or divided by `i hbar` when
    /// the product carries `hbar`.
    pub fn bracket(&self, f: &Superfunction, g: &Superfunction) -> Result<Superfunction> {
        let sign = self.parity(f)? * self.parity(g)?;
        let fg = self.star(f, g)?;
        let gf = self.star(g, f)?;
        let c = if sign == 1 { fg.try_add(&gf)? } else { fg.try_sub(&gf)? };
        let c = c.scale(&PolyScalar::constant(-Gaussian::i()));
        if self.with_hbar {
            c.try_map(|x| x.div_var(self.base.hbar))
        } else {
            Ok(c)
        }
    }

    fn j(&self, a: usize, b: usize) -> Rational {
        self.base.poisson_tensor()[a][b].clone()
    }

    /// `y_i J^{ij} d_j H + i zeta_j J^{jk} d_l d_k H lambda^l`.
    pub fn extended_hamiltonian(&self, h: &PolyScalar) -> Result<Superfunction> {
        let n = self.n();
        let z = self.base.z();
        let mut bos = PolyScalar::zero();
        let mut out = Superfunction::zero(&self.sig);
        for i in 0..n {
            for j in 0..n {
                let jij = self.j(i, j);
                if jij.is_zero() {
                    continue;
                }
                let c = Gaussian::real(jij);
                bos += &(&self.y(i) * &h.diff(z[j])).scale(&c);
                for l in 0..n {
                    let coeff = h.diff(z[l]).diff(z[j]).scale(&(&c * &Gaussian::i()));
                    let blade = self.zeta(i).wedge(&self.lambda(l))?;
                    out = out.try_add(&blade.scale(&coeff))?;
                }
            }
        }
        out.try_add(&self.lift(&bos))
    }

    /// BRST charges `Q = y_j lambda^j` and `Qbar = zeta_j J^{jk} y_k`.
    pub fn brst_charges(&self) -> Result<(Superfunction, Superfunction)> {
        let n = self.n();
        let mut q = Superfunction::zero(&self.sig);
        let mut qbar = Superfunction::zero(&self.sig);
        for j in 0..n {
            q = q.try_add(&self.lambda(j).scale(&self.y(j)))?;
            for k in 0..n {
                let jk = self.j(j, k);
                if !jk.is_zero() {
                    qbar = qbar.try_add(&self.zeta(j).scale(&self.y(k).scale(&Gaussian::real(jk))))?;
                }
            }
        }
        Ok((q, qbar))
    }

    /// Residuals of `{Q, H}`, `{Qbar, H}`, `{Q, Q}`, `{Qbar, Qbar}`,
    /// `{Q, Qbar}` for the extended Hamiltonian of `h`.
    pub fn brst_check(&self, h: &PolyScalar) -> Result<BrstReport> {
        let ht = self.extended_hamiltonian(h)?;
        let (q, qbar) = self.brst_charges()?;
        let brackets = vec![
            ("{Q,H}".to_string(), self.bracket(&q, &ht)?),
            ("{Qbar,H}".to_string(), self.bracket(&qbar, &ht)?),
            ("{Q,Q}".to_string(), self.bracket(&q, &q)?),
            ("{Qbar,Qbar}".to_string(), self.bracket(&qbar, &qbar)?),
            ("{Q,Qbar}".to_string(), self.bracket(&q, &qbar)?),
        ];
        Ok(BrstReport { brackets })
    }

    /// Each equation of motion `dA/dt = {A, H}` compared with its closed form.
    pub fn equations_of_motion_check(&self, h: &PolyScalar) -> Result<Vec<(String, Superfunction)>> {
        let n = self.n();
        let z = self.base.z();
        let ht = self.extended_hamiltonian(h)?;
        let jt = self.base.poisson_tensor();
        let d2 = |a: usize, b: usize| h.diff(z[a]).diff(z[b]);
        let gj = |a: usize, b: usize| Gaussian::real(jt[a][b].clone());
        let mut out = Vec::new();
        for i in 0..n {
            let mut zdot = PolyScalar::zero();
            for j in 0..n {
                zdot += &h.diff(z[j]).scale(&gj(i, j));
            }
            let lhs = self.bracket(&self.lift(&self.z(i)), &ht)?;
            let name = self.base.reg.name(z[i]).to_string();
            out.push((format!("d{name}/dt"), lhs.try_sub(&self.lift(&zdot))?));

            let mut zeta_dot = Superfunction::zero(&self.sig);
            let mut lambda_dot = Superfunction::zero(&self.sig);
            let mut ydot = Superfunction::zero(&self.sig);
            for j in 0..n {
                for k in 0..n {
                    zeta_dot = zeta_dot.try_sub(&self.zeta(j).scale(&d2(k, i).scale(&gj(j, k))))?;
                    lambda_dot = lambda_dot.try_add(&self.lambda(k).scale(&d2(j, k).scale(&gj(i, j))))?;
                    let yt = (&self.y(j) * &d2(k, i)).scale(&gj(j, k));
                    ydot = ydot.try_sub(&self.lift(&yt))?;
                    for l in 0..n {
                        let c = d2(k, l).diff(z[i]).scale(&(&gj(j, k) * &Gaussian::i()));
                        ydot = ydot.try_sub(&self.zeta(j).wedge(&self.lambda(l))?.scale(&c))?;
                    }
                }
            }
            let lhs = self.bracket(&self.zeta(i), &ht)?;
            out.push((format!("dzeta_{name}/dt"), lhs.try_sub(&zeta_dot)?));
            let lhs = self.bracket(&self.lambda(i), &ht)?;
            out.push((format!("dlambda_{name}/dt"), lhs.try_sub(&lambda_dot)?));
            let lhs = self.bracket(&self.lift(&self.y(i)), &ht)?;
            out.push((format!("dy_{name}/dt"), lhs.try_sub(&ydot)?));
        }
        Ok(out)
    }

    /// `(1/i)[zeta_i, Hp] + J^{jk} d_k d_i H zeta_j` for each `i`, over a
    /// Clifford signature on the `zeta` generators alone.
    pub fn passive_hamiltonian_residuals(&self, h: &PolyScalar, hp: &Superfunction) -> Result<Vec<Superfunction>> {
        let sig = hp.signature();
        let n = self.n();
        if sig.dim() != n {
            return Err(Error::Invalid(format!("passive signature must have {n} generators")));
        }
        let z = self.base.z();
        let jt = self.base.poisson_tensor();
        let mut out = Vec::new();
        for i in 0..n {
            let zi = Superfunction::generator(sig, i)?;
            let comm = zi.graded_commutator(hp)?.scale(&PolyScalar::constant(-Gaussian::i()));
            let mut expected = Superfunction::zero(sig);
            for j in 0..n {
                for k in 0..n {
                    let c = h.diff(z[k]).diff(z[i]).scale(&Gaussian::real(jt[j][k].clone()));
                    expected = expected.try_sub(&Superfunction::generator(sig, j)?.scale(&c))?;
                }
            }
            out.push(comm.try_sub(&expected)?);
        }
        Ok(out)
    }

    /// Exact search for a bivector `Hp` that passes
    /// [`Self::passive_hamiltonian_residuals`] for a quadratic `h`.
    pub fn solve_passive_hamiltonian(&self, h: &PolyScalar, sig: &Signature) -> Result<Option<Multivector<Gaussian>>> {
        self.base.constant_hessian(h)?;
        let n = self.n();
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        let basis: Vec<Superfunction> =
            pairs.iter().map(|&(a, b)| Superfunction::blade(sig, &[a, b])).collect::<Result<_>>()?;
        let zero_h = PolyScalar::zero();
        let mut rows: BTreeMap<(usize, u64), Vec<Gaussian>> = BTreeMap::new();
        let mut rhs: BTreeMap<(usize, u64), Gaussian> = BTreeMap::new();
        let base_res = self.passive_hamiltonian_residuals(h, &Superfunction::zero(sig))?;
        for (col, b) in basis.iter().enumerate() {
            let res = self.passive_hamiltonian_residuals(&zero_h, b)?;
            for (i, r) in res.iter().enumerate() {
                for (m, c) in r.terms() {
                    rows.entry((i, m)).or_insert_with(|| vec![Gaussian::zero(); basis.len()])[col] = c.constant_part();
                }
            }
        }
        for (i, r) in base_res.iter().enumerate() {
            for (m, c) in r.terms() {
                rows.entry((i, m)).or_insert_with(|| vec![Gaussian::zero(); basis.len()]);
                rhs.insert((i, m), -&c.constant_part());
            }
        }
        let keys: Vec<(usize, u64)> = rows.keys().copied().collect();
        let a: Vec<Vec<Gaussian>> = keys.iter().map(|k| rows[k].clone()).collect();
        let b: Vec<Gaussian> = keys.iter().map(|k| rhs.get(k).cloned().unwrap_or_default()).collect();
        Ok(linalg::solve(&a, &b).map(|x| {
            let mut out = Multivector::zero(sig);
            for (c, &(p, q)) in x.iter().zip(&pairs) {
                out = &out + &Multivector::blade(sig, &[p, q]).expect("valid").scale(c);
            }
            out
        }))
    }
}

#[derive(Clone, Debug)]
pub struct BrstReport {
    pub brackets: Vec<(String, Superfunction)>,
}

impl BrstReport {
    pub fn failures(&self) -> Vec<&str> {
        self.brackets.iter().filter(|(_, r)| !r.is_zero()).map(|(n, _)| n.as_str()).collect()
    }

    pub fn passed(&self) -> bool {
        self.failures().is_empty()
    }
}

/// Residual of `(i/hbar)[L^i, A]_M + B_i x A` for `A = x^j e_j` in three
/// dimensions; exactly zero when the active and passive rotations agree.
pub fn active_passive_angular_residuals() -> Result<Vec<Superfunction>> {
    let ps = PhaseSpace::new(3);
    let sig = MetricSignature::euclidean(3);
    let coords: Vec<PolyScalar> = (0..3).map(|j| ps.q(j)).collect();
    let a = Superfunction::vector(&sig, &coords)?;
    let l = [
        &(&ps.q(1) * &ps.p(2)) - &(&ps.q(2) * &ps.p(1)),
        &(&ps.q(2) * &ps.p(0)) - &(&ps.q(0) * &ps.p(2)),
        &(&ps.q(0) * &ps.p(1)) - &(&ps.q(1) * &ps.p(0)),
    ];
    let bivectors = [(1, 2), (2, 0), (0, 1)];
    let mut out = Vec::new();
    for (li, (j, k)) in l.iter().zip(bivectors) {
        let active = a.try_map(|c| ps.moyal_commutator(li, c).div_var(ps.hbar()).map(|x| x.scale(&Gaussian::i())))?;
        let b = Superfunction::blade(&sig, &[j, k])?;
        out.push(active.try_add(&b.commutator(&a)?)?);
    }
    Ok(out)
}

/// Largest difference between the oscillator flow applied to the
/// coordinates and the rotor `exp((t/2) eta rho)` applied to the basis.
pub fn oscillator_active_passive_residual(t: f64) -> Result<f64> {
    let ps = PhaseSpace::new(1);
    let h = (&(&ps.q(0) * &ps.q(0)) + &(&ps.p(0) * &ps.p(0))).scale(&Gaussian::real(half()));
    let m = ps.hamiltonian_flow_quadratic(&h, t)?;
    let sig = MetricSignature::euclidean(2);
    let r = crate::lie::rotor_exp(&Multivector::<f64>::blade(&sig, &[0, 1])?, t)?;
    let mut worst: f64 = 0.0;
    for (q, p) in [(1.0, 0.0), (0.0, 1.0), (0.3, -1.7)] {
        let active = Multivector::vector(&sig, &[m[(0, 0)] * q + m[(0, 1)] * p, m[(1, 0)] * q + m[(1, 1)] * p])?;
        let passive = crate::lie::sandwich(&r, &Multivector::vector(&sig, &[q, p])?)?;
        worst = worst.max(active.distance(&passive));
    }
    Ok(worst)
}

impl ExtendedPhaseSpace {
    /// Euclidean signature on the `zeta` generators used for passive checks.
    pub fn passive_signature(&self) -> Signature {
        MetricSignature::euclidean(self.n())
    }

    /// Null pairing on `(zeta_q, zeta_p)`: `zeta_q^2 = zeta_p^2 = 0` and
    /// `zeta_q zeta_p + zeta_p zeta_q = 1` for each conjugate pair. Hyperbolic
    /// flows such as `H = qp` only have a bivector generator here.
    pub fn null_passive_signature(&self) -> Signature {
        let n = self.n();
        let dof = n / 2;
        let mut m = vec![Rational::zero(); n * n];
        for k in 0..dof {
            m[k * n + dof + k] = half();
            m[(dof + k) * n + k] = half();
        }
        MetricSignature::from_matrix(format!("null:{n}"), n, m).expect("valid")
    }
}

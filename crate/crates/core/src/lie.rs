//! Rotor groups and their bivector Lie algebras.

use std::fmt;

use num::Zero;

use crate::error::{Error, Result};
use crate::linalg;
use crate::multivector::{half, MetricSignature, Multivector, Signature};
use crate::scalar::{int, Gaussian, PolyScalar, Scalar};

type Mv = Multivector<Gaussian>;

/// Relative size below which a series term stops the summation.
pub const SERIES_TOL: f64 = 1e-14;
pub const SERIES_CAP: usize = 200;

/// `exp(x)` for a float multivector by its power series.
pub fn exp_series(x: &Multivector<f64>) -> Result<Multivector<f64>> {
    let mut sum = Multivector::one(x.signature());
    let mut term = sum.clone();
    for k in 1..SERIES_CAP {
        term = term.star(x)?.scale(&(1.0 / k as f64));
        sum = &sum + &term;
        sum.check_finite()?;
        if term.max_abs() <= SERIES_TOL * sum.max_abs().max(1.0) {
            return Ok(sum);
        }
    }
    Err(Error::SeriesDiverged(SERIES_CAP))
}

/// `R = exp(t B / 2)`. Closed form when `B * B` is a scalar, otherwise the
/// power series.
pub fn rotor_exp(b: &Multivector<f64>, t: f64) -> Result<Multivector<f64>> {
    let sq = b.star(b)?;
    let s = sq.scalar_part();
    if sq.terms().any(|(m, c)| m != 0 && c.abs() > 1e-15 * (1.0 + s.abs())) {
        return exp_series(&b.scale(&(t / 2.0)));
    }
    let x = t / 2.0;
    let (c, k) = if s < 0.0 {
        let w = (-s).sqrt();
        ((x * w).cos(), (x * w).sin() / w)
    } else if s > 0.0 {
        let w = s.sqrt();
        ((x * w).cosh(), (x * w).sinh() / w)
    } else {
        (1.0, x)
    };
    let r = &Multivector::scalar(b.signature(), c) + &b.scale(&k);
    r.check_finite()?;
    Ok(r)
}

/// `1 + (t/2) B` for a nilpotent bivector, exact with a formal parameter.
pub fn rotor_exp_nilpotent(b: &Multivector<PolyScalar>, t: &PolyScalar) -> Result<Multivector<PolyScalar>> {
    if !b.star(b)?.is_zero() {
        return Err(Error::NonScalarSquare);
    }
    let half_t = t.scale(&Gaussian::real(half()));
    Ok(&Multivector::one(b.signature()) + &b.scale(&half_t))
}

/// Checks `R R~ = 1` within `tol` and that `R` is even.
pub fn check_rotor(r: &Multivector<f64>, tol: f64) -> Result<()> {
    let n = r.star(&r.reverse())?;
    let off = (&n - &Multivector::one(r.signature())).max_abs();
    if off > tol || r.odd().max_abs() > tol {
        return Err(Error::NotARotor(format!("{:?}", n)));
    }
    Ok(())
}

/// Rescales an even element so that `R R~ = 1`.
pub fn normalize_rotor(r: &Multivector<f64>) -> Result<Multivector<f64>> {
    let n = r.star(&r.reverse())?.scalar_part();
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::NotARotor(format!("norm {n}")));
    }
    Ok(r.scale(&(1.0 / n.sqrt())))
}

/// `R x R~`.
pub fn sandwich<S: Scalar>(r: &Multivector<S>, x: &Multivector<S>) -> Result<Multivector<S>> {
    r.star(x)?.star(&r.reverse())
}

/// `R x R~ / (R R~)` for an unnormalized exact versor.
pub fn versor_act(r: &Mv, x: &Mv) -> Result<Mv> {
    let n = r.star(&r.reverse())?;
    if n.grades() != [0] {
        return Err(Error::NotARotor(format!("{n:?}")));
    }
    let inv = n.scalar_part().inv()?;
    Ok(sandwich(r, x)?.scale(&inv))
}

/// Adjoint action `R B R~` of the rotor group on its algebra.
pub fn adjoint<S: Scalar>(r: &Multivector<S>, b: &Multivector<S>) -> Result<Multivector<S>> {
    sandwich(r, b)
}

/// Coadjoint action `R~ Theta R`.
pub fn coadjoint<S: Scalar>(r: &Multivector<S>, theta: &Multivector<S>) -> Result<Multivector<S>> {
    r.reverse().star(theta)?.star(r)
}

/// Algebra adjoint `ad_A B = A x B`.
pub fn ad<S: Scalar>(a: &Multivector<S>, b: &Multivector<S>) -> Result<Multivector<S>> {
    a.commutator(b)
}

/// Algebra coadjoint `ad*_A Theta = Theta x A`.
pub fn coad<S: Scalar>(a: &Multivector<S>, theta: &Multivector<S>) -> Result<Multivector<S>> {
    theta.commutator(a)
}

/// Field induced by a bivector at a point: `B . x`.
pub fn induced_field<S: Scalar>(b: &Multivector<S>, x: &Multivector<S>) -> Result<Multivector<S>> {
    b.inner(x)
}

/// Matrix of the linear field `x -> B . x`, `m[k][l]` the `e_k` component of
/// `B . e_l`.
pub fn induced_field_matrix(b: &Mv) -> Result<Vec<Vec<Gaussian>>> {
    let sig = b.signature();
    let d = sig.dim();
    let mut m = vec![vec![Gaussian::zero(); d]; d];
    for l in 0..d {
        let v = induced_field(b, &Mv::generator(sig, l)?)?;
        v.expect_grade(1)?;
        for (k, row) in m.iter_mut().enumerate() {
            row[l] = v.coeff(1 << k);
        }
    }
    Ok(m)
}

/// Lie bracket of the linear fields `x -> M_a x` and `x -> M_b x`, as a
/// matrix: `(a.d)b - (b.d)a = (M_b M_a - M_a M_b) x`.
pub fn linear_field_bracket(ma: &[Vec<Gaussian>], mb: &[Vec<Gaussian>]) -> Vec<Vec<Gaussian>> {
    let d = ma.len();
    let prod = |x: &[Vec<Gaussian>], y: &[Vec<Gaussian>], i: usize, j: usize| {
        (0..d).fold(Gaussian::zero(), |acc, k| &acc + &(&x[i][k] * &y[k][j]))
    };
    (0..d).map(|i| (0..d).map(|j| &prod(mb, ma, i, j) - &prod(ma, mb, i, j)).collect()).collect()
}

/// Lie algebra spanned by bivectors under the commutator product, with
/// structure constants `B_i x B_j = C^k_ij B_k` solved exactly.
#[derive(Clone)]
pub struct BivectorAlgebra {
    name: String,
    labels: Vec<String>,
    generators: Vec<Mv>,
    structure: Vec<Vec<Vec<Gaussian>>>,
}

impl fmt::Debug for BivectorAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BivectorAlgebra").field("name", &self.name).field("labels", &self.labels).finish()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LorentzMetric {
    /// `diag(1, -1, -1, -1)`
    Standard,
    /// `diag(-1, 1, 1, 1)`
    Nonstandard,
}

impl BivectorAlgebra {
    pub fn new(name: impl Into<String>, labels: Vec<String>, generators: Vec<Mv>) -> Result<Self> {
        let n = generators.len();
        if labels.len() != n {
            return Err(Error::Invalid("one label per generator".into()));
        }
        let masks = blade_masks(&generators);
        let column = |x: &Mv| -> Vec<Gaussian> { masks.iter().map(|&m| x.coeff(m)).collect() };
        let cols: Vec<Vec<Gaussian>> = generators.iter().map(column).collect();
        let rows: Vec<Vec<Gaussian>> = (0..masks.len()).map(|r| cols.iter().map(|c| c[r].clone()).collect()).collect();
        if linalg::rank(&rows) < n {
            return Err(Error::DependentGenerators);
        }
        let mut structure = vec![vec![Vec::new(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let x = generators[i].commutator(&generators[j])?;
                if x.terms().any(|(m, _)| !masks.contains(&m)) {
                    return Err(Error::NotClosed(i, j));
                }
                structure[i][j] = linalg::solve(&rows, &column(&x)).ok_or(Error::NotClosed(i, j))?;
            }
        }
        Ok(BivectorAlgebra { name: name.into(), labels, generators, structure })
    }

    /// `so(3)`: `B1 = e2e3`, `B2 = e3e1`, `B3 = e1e2`.
    pub fn so3() -> Self {
        let sig = MetricSignature::euclidean(3);
        let b = |i: usize, j: usize| Mv::blade(&sig, &[i, j]).expect("valid blade");
        let gens = vec![b(1, 2), b(2, 0), b(0, 1)];
        BivectorAlgebra::new("so3", labels(&["B1", "B2", "B3"]), gens).expect("so(3) closes")
    }

    /// Lorentz algebra from `sigma_mn = (I/2)(g_m g_n - g_n g_m)`, with
    /// boosts `K_i = sigma_0i / 2` and rotations
    /// `L_i = (1/2) sum_{j<k} eps_ijk sigma_jk`.
    pub fn lorentz(metric: LorentzMetric) -> Self {
        let gens = lorentz_generators(metric);
        let name = match metric {
            LorentzMetric::Standard => "lorentz:std",
            LorentzMetric::Nonstandard => "lorentz:nonstd",
        };
        BivectorAlgebra::new(name, labels(&["L1", "L2", "L3", "K1", "K2", "K3"]), gens)
            .expect("Lorentz generators close")
    }

    /// `u(n)` inside the Euclidean algebra on `(alpha_1..alpha_n, beta_1..beta_n)`.
    pub fn un(n: usize) -> Result<Self> {
        let sig = MetricSignature::euclidean(2 * n);
        let (gens, names) = unitary_like(&sig, n, 1)?;
        BivectorAlgebra::new(format!("un:{n}"), names, gens)
    }

    /// `gl(n)` inside the split algebra with `alpha_i^2 = 1`, `beta_i^2 = -1`.
    pub fn gln(n: usize) -> Result<Self> {
        let sig = split_signature(n)?;
        let (gens, names) = unitary_like(&sig, n, -1)?;
        BivectorAlgebra::new(format!("gln:{n}"), names, gens)
    }

    /// Every grade-2 blade of a signature.
    pub fn spin(sig: &Signature) -> Result<Self> {
        let d = sig.dim();
        let mut gens = Vec::new();
        let mut names = Vec::new();
        for i in 0..d {
            for j in i + 1..d {
                gens.push(Mv::blade(sig, &[i, j])?);
                names.push(format!("{}{}", sig.labels()[i], sig.labels()[j]));
            }
        }
        BivectorAlgebra::new(format!("spin:{}", sig.id()), names, gens)
    }

    /// Parses `so3`, `lorentz:std`, `lorentz:nonstd`, `un:N`, `gln:N`,
    /// `clifford:D:euclidean|euclid|std|nonstd`.
    pub fn parse(spec: &str) -> Result<Self> {
        let parts: Vec<&str> = spec.split(':').collect();
        let num = |s: &str| s.parse::<usize>().map_err(|_| Error::Invalid(format!("bad size in `{spec}`")));
        match parts.as_slice() {
            ["so3"] => Ok(BivectorAlgebra::so3()),
            ["lorentz"] | ["lorentz", "nonstd"] => Ok(BivectorAlgebra::lorentz(LorentzMetric::Nonstandard)),
            ["lorentz", "std"] => Ok(BivectorAlgebra::lorentz(LorentzMetric::Standard)),
            ["un", n] => BivectorAlgebra::un(num(n)?),
            ["gln", n] => BivectorAlgebra::gln(num(n)?),
            ["clifford", d, kind] => {
                let d = num(d)?;
                if d < 2 {
                    return Err(Error::Invalid("bivectors need at least two generators".into()));
                }
                let sig = match *kind {
                    "euclidean" | "euclid" => MetricSignature::euclidean(d),
                    "std" => MetricSignature::minkowski_standard(d),
                    "nonstd" => MetricSignature::minkowski_nonstandard(d),
                    _ => return Err(Error::Invalid(format!("unknown signature `{kind}`"))),
                };
                BivectorAlgebra::spin(&sig)
            }
            _ => Err(Error::Invalid(format!("unknown algebra `{spec}`"))),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.generators.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn generators(&self) -> &[Mv] {
        &self.generators
    }

    pub fn signature(&self) -> &Signature {
        self.generators[0].signature()
    }

    /// `C^k_ij`, indexed `[i][j][k]`.
    pub fn structure(&self) -> &[Vec<Vec<Gaussian>>] {
        &self.structure
    }

    /// Killing form `kappa_ij = B_i . B_j`.
    pub fn killing(&self) -> Result<Vec<Vec<Gaussian>>> {
        let g = &self.generators;
        g.iter().map(|a| g.iter().map(|b| Ok(a.inner(b)?.scalar_part())).collect()).collect()
    }

    /// Coordinates of an element of the span.
    pub fn coordinates(&self, x: &Mv) -> Option<Vec<Gaussian>> {
        let masks = blade_masks(&self.generators);
        if x.terms().any(|(m, _)| !masks.contains(&m)) {
            return None;
        }
        let rows: Vec<Vec<Gaussian>> =
            masks.iter().map(|&m| self.generators.iter().map(|g| g.coeff(m)).collect()).collect();
        let rhs: Vec<Gaussian> = masks.iter().map(|&m| x.coeff(m)).collect();
        linalg::solve(&rows, &rhs)
    }

    /// Jacobi identity on the structure constants; returns the first
    /// violating triple.
    pub fn jacobi_violation(&self) -> Option<(usize, usize, usize)> {
        let n = self.dim();
        let c = &self.structure;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let mut acc = Gaussian::zero();
                        for m in 0..n {
                            acc = &acc + &(&c[i][j][m] * &c[m][k][l]);
                            acc = &acc + &(&c[j][k][m] * &c[m][i][l]);
                            acc = &acc + &(&c[k][i][m] * &c[m][j][l]);
                        }
                        if !acc.is_zero() {
                            return Some((i, j, k));
                        }
                    }
                }
            }
        }
        None
    }

    /// Generators whose commutator with `x` does not vanish.
    pub fn non_commuting_with(&self, x: &Mv) -> Result<Vec<usize>> {
        let mut bad = Vec::new();
        for (i, g) in self.generators.iter().enumerate() {
            if !g.commutator(x)?.is_zero() {
                bad.push(i);
            }
        }
        Ok(bad)
    }
}

fn labels(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn blade_masks(gens: &[Mv]) -> Vec<u64> {
    let mut masks: Vec<u64> = gens.iter().flat_map(|g| g.terms().map(|(m, _)| m).collect::<Vec<_>>()).collect();
    masks.sort_unstable();
    masks.dedup();
    masks
}

/// `diag(1, .., 1, -1, .., -1)` on `(alpha, beta)`.
pub fn split_signature(n: usize) -> Result<Signature> {
    let diag: Vec<_> = (0..2 * n).map(|i| int(if i < n { 1 } else { -1 })).collect();
    let labels = (1..=n).map(|i| format!("a{i}")).chain((1..=n).map(|i| format!("b{i}"))).collect();
    let d = 2 * n;
    let mut m = vec![num::BigRational::zero(); d * d];
    for (i, x) in diag.into_iter().enumerate() {
        m[i * d + i] = x;
    }
    MetricSignature::with_labels(format!("split:{n}"), d, m, labels)
}

/// `E_ij = a_i a_j + s b_i b_j`, `F_ij = a_i b_j - b_i a_j`, `J_i = a_i b_i`.
fn unitary_like(sig: &Signature, n: usize, s: i64) -> Result<(Vec<Mv>, Vec<String>)> {
    let g = |i: usize| Mv::generator(sig, i);
    let mut gens = Vec::new();
    let mut names = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let e = &g(i)?.star(&g(j)?)? + &g(n + i)?.star(&g(n + j)?)?.scale(&Gaussian::from_int(s));
            gens.push(e);
            names.push(format!("E{}{}", i + 1, j + 1));
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            let f = &g(i)?.star(&g(n + j)?)? - &g(n + i)?.star(&g(j)?)?;
            gens.push(f);
            names.push(format!("F{}{}", i + 1, j + 1));
        }
    }
    for i in 0..n {
        gens.push(g(i)?.star(&g(n + i)?)?);
        names.push(format!("J{}", i + 1));
    }
    Ok((gens, names))
}

/// Sum of the diagonal generators `sum_i a_i b_i`.
pub fn complex_structure(sig: &Signature, n: usize) -> Result<Mv> {
    let mut j = Mv::zero(sig);
    for i in 0..n {
        j = &j + &Mv::blade(sig, &[i, n + i])?;
    }
    Ok(j)
}

pub fn lorentz_signature(metric: LorentzMetric) -> Signature {
    match metric {
        LorentzMetric::Standard => MetricSignature::minkowski_standard(4),
        LorentzMetric::Nonstandard => MetricSignature::minkowski_nonstandard(4),
    }
}

/// `[L_1, L_2, L_3, K_1, K_2, K_3]`.
pub fn lorentz_generators(metric: LorentzMetric) -> Vec<Mv> {
    let sig = lorentz_signature(metric);
    let i4 = Mv::pseudoscalar(&sig);
    let h = Gaussian::real(half());
    let sigma = |m: usize, n: usize| -> Mv {
        let (gm, gn) = (Mv::generator(&sig, m).unwrap(), Mv::generator(&sig, n).unwrap());
        (&i4 * &(&(&gm * &gn) - &(&gn * &gm))).scale(&h)
    };
    let l = |j: usize, k: usize| sigma(j, k).scale(&h);
    vec![l(2, 3), l(3, 1), l(1, 2), sigma(0, 1).scale(&h), sigma(0, 2).scale(&h), sigma(0, 3).scale(&h)]
}

/// Levi-Civita symbol on `{0, 1, 2}`.
pub fn epsilon(i: usize, j: usize, k: usize) -> i64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1,
        _ => 0,
    }
}

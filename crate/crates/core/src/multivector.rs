//! Multivectors over a constant contraction matrix.
//!
//! The product of two elements is the star product
//! `A exp(sum M_ij d<_i d>_j) B`, where `d<_i` is the right derivative with
//! respect to generator `i` acting on `A` and `d>_j` the left derivative
//! acting on `B`. A symmetric `M` gives the Clifford product, an
//! antisymmetric one the symplectic product, and any other constant matrix
//! (a duality pairing, the fermionic block of extended phase space) is
//! handled by the same kernel.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::{int, rational_sqrt, Rational, Scalar};

pub const MAX_DIM: usize = 63;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignatureKind {
    Symmetric,
    Antisymmetric,
    General,
}

/// Generator set together with its contraction matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MetricSignature {
    id: String,
    dim: usize,
    kind: SignatureKind,
    matrix: Vec<Rational>,
    labels: Vec<String>,
    rows: Vec<Vec<(usize, Rational)>>,
}

pub type Signature = Arc<MetricSignature>;

impl MetricSignature {
    pub fn from_matrix(id: impl Into<String>, dim: usize, matrix: Vec<Rational>) -> Result<Signature> {
        let labels = (1..=dim).map(|i| format!("e{i}")).collect();
        MetricSignature::with_labels(id, dim, matrix, labels)
    }

    pub fn with_labels(
        id: impl Into<String>,
        dim: usize,
        matrix: Vec<Rational>,
        labels: Vec<String>,
    ) -> Result<Signature> {
        if dim > MAX_DIM {
            return Err(Error::DimensionTooLarge(dim));
        }
        if matrix.len() != dim * dim || labels.len() != dim {
            return Err(Error::Invalid(format!("contraction matrix must be {dim}x{dim}")));
        }
        let at = |i: usize, j: usize| &matrix[i * dim + j];
        let pairs = || (0..dim).flat_map(|i| (0..dim).map(move |j| (i, j)));
        let kind = if pairs().all(|(i, j)| at(i, j) == at(j, i)) {
            SignatureKind::Symmetric
        } else if pairs().all(|(i, j)| *at(i, j) == -at(j, i)) {
            SignatureKind::Antisymmetric
        } else {
            SignatureKind::General
        };
        let rows = (0..dim)
            .map(|i| (0..dim).filter(|&j| !at(i, j).is_zero()).map(|j| (j, at(i, j).clone())).collect())
            .collect();
        Ok(Arc::new(MetricSignature { id: id.into(), dim, kind, matrix, labels, rows }))
    }

    pub fn diagonal(id: impl Into<String>, diag: &[Rational]) -> Result<Signature> {
        let d = diag.len();
        let mut m = vec![Rational::zero(); d * d];
        for (i, x) in diag.iter().enumerate() {
            m[i * d + i] = x.clone();
        }
        MetricSignature::from_matrix(id, d, m)
    }

    pub fn euclidean(d: usize) -> Signature {
        MetricSignature::diagonal(format!("euclidean:{d}"), &vec![int(1); d]).expect("valid dimension")
    }

    /// Signature `diag(-1, 1, ..., 1)`: the time-like generator squares to -1.
    pub fn minkowski_nonstandard(d: usize) -> Signature {
        let mut diag = vec![int(1); d];
        diag[0] = int(-1);
        MetricSignature::diagonal(format!("minkowski-nonstd:{d}"), &diag).expect("valid dimension")
    }

    /// Signature `diag(1, -1, ..., -1)`.
    pub fn minkowski_standard(d: usize) -> Signature {
        let mut diag = vec![int(-1); d];
        diag[0] = int(1);
        MetricSignature::diagonal(format!("minkowski-std:{d}"), &diag).expect("valid dimension")
    }

    /// Darboux form on `2 * dof` generators ordered `(q_1..q_n, p_1..p_n)`
    /// with `M[q_a][p_a] = 1` and `M[p_a][q_a] = -1`.
    pub fn symplectic(dof: usize) -> Signature {
        let d = 2 * dof;
        let mut m = vec![Rational::zero(); d * d];
        for a in 0..dof {
            m[a * d + dof + a] = int(1);
            m[(dof + a) * d + a] = int(-1);
        }
        let labels = (1..=dof).map(|a| format!("eta{a}")).chain((1..=dof).map(|a| format!("rho{a}"))).collect();
        MetricSignature::with_labels(format!("symplectic:{d}"), d, m, labels).expect("valid dimension")
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> SignatureKind {
        self.kind
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn entry(&self, i: usize, j: usize) -> &Rational {
        &self.matrix[i * self.dim + j]
    }

    pub fn matrix(&self) -> &[Rational] {
        &self.matrix
    }

    /// Same generators with the transposed contraction matrix.
    pub fn transposed(&self) -> Signature {
        let d = self.dim;
        let m = (0..d * d).map(|k| self.matrix[(k % d) * d + k / d].clone()).collect();
        MetricSignature::with_labels(format!("{}^T", self.id), d, m, self.labels.clone()).expect("valid")
    }

    pub fn all_mask(&self) -> u64 {
        if self.dim == 0 {
            0
        } else {
            (1u64 << self.dim) - 1
        }
    }

    fn scalar_rows<S: Scalar>(&self) -> Vec<Vec<(usize, S)>> {
        self.rows.iter().map(|r| r.iter().map(|(j, x)| (*j, S::from_rational(x))).collect()).collect()
    }
}

pub fn grade_of(mask: u64) -> usize {
    mask.count_ones() as usize
}

/// Sign of reordering the concatenation of ascending blades `a` and `b`
/// into ascending order, ignoring overlap.
pub fn reorder_sign(a: u64, b: u64) -> bool {
    let mut swaps = 0u32;
    let mut rest = b;
    while rest != 0 {
        let y = rest.trailing_zeros();
        swaps += (a >> y >> 1).count_ones();
        rest &= rest - 1;
    }
    swaps % 2 == 1
}

/// Expands the product of two basis blades into `(mask, factor)` pairs.
pub fn blade_product<S: Scalar>(a: u64, b: u64, rows: &[Vec<(usize, S)>]) -> Vec<(u64, S)> {
    let mut out: BTreeMap<u64, S> = BTreeMap::new();
    contract(a, b, S::one(), rows.len(), rows, &mut out);
    out.into_iter().filter(|(_, c)| !c.is_zero()).collect()
}

/// Contractions are enumerated with the left index strictly decreasing,
/// which counts each unordered set of pairs once and absorbs the `1/k!`.
fn contract<S: Scalar>(a: u64, b: u64, coef: S, bound: usize, rows: &[Vec<(usize, S)>], out: &mut BTreeMap<u64, S>) {
    if a & b == 0 {
        let c = if reorder_sign(a, b) { coef.neg() } else { coef.clone() };
        out.entry(a | b).or_insert_with(S::zero).add_assign(&c);
    }
    let mut left = if bound >= 64 { a } else { a & ((1u64 << bound) - 1) };
    while left != 0 {
        let i = left.trailing_zeros() as usize;
        left &= left - 1;
        let sign_a = (a >> i >> 1).count_ones() % 2 == 1;
        for (j, mij) in &rows[i] {
            if (b >> j) & 1 == 0 {
                continue;
            }
            let sign_b = (b & ((1u64 << j) - 1)).count_ones() % 2 == 1;
            let c = coef.mul(mij);
            let c = if sign_a ^ sign_b { c.neg() } else { c };
            contract(a ^ (1 << i), b ^ (1 << j), c, i, rows, out);
        }
    }
}

/// Sparse multivector: blade masks mapped to non-zero coefficients.
#[derive(Clone, PartialEq)]
pub struct Multivector<S: Scalar> {
    sig: Signature,
    blades: BTreeMap<u64, S>,
}

impl<S: Scalar> fmt::Debug for Multivector<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Multivector[{}]", self.sig.id)?;
        f.debug_map().entries(self.blades.iter()).finish()
    }
}

impl<S: Scalar> Multivector<S> {
    pub fn zero(sig: &Signature) -> Self {
        Multivector { sig: sig.clone(), blades: BTreeMap::new() }
    }

    pub fn scalar(sig: &Signature, s: S) -> Self {
        Multivector::from_terms(sig, [(0, s)]).expect("mask 0 is always valid")
    }

    pub fn one(sig: &Signature) -> Self {
        Multivector::scalar(sig, S::one())
    }

    pub fn from_terms(sig: &Signature, terms: impl IntoIterator<Item = (u64, S)>) -> Result<Self> {
        let mut mv = Multivector::zero(sig);
        for (mask, c) in terms {
            if mask & !sig.all_mask() != 0 {
                return Err(Error::GeneratorOutOfRange { index: 63 - mask.leading_zeros() as usize, dim: sig.dim });
            }
            mv.add_blade(mask, &c);
        }
        Ok(mv)
    }

    pub fn generator(sig: &Signature, i: usize) -> Result<Self> {
        if i >= sig.dim {
            return Err(Error::GeneratorOutOfRange { index: i, dim: sig.dim });
        }
        Multivector::from_terms(sig, [(1u64 << i, S::one())])
    }

    /// Wedge product of the listed generators, in the given order.
    pub fn blade(sig: &Signature, indices: &[usize]) -> Result<Self> {
        let mut out = Multivector::one(sig);
        for &i in indices {
            out = out.wedge(&Multivector::generator(sig, i)?)?;
        }
        Ok(out)
    }

    pub fn vector(sig: &Signature, coeffs: &[S]) -> Result<Self> {
        if coeffs.len() != sig.dim {
            return Err(Error::Invalid(format!("{} components for dimension {}", coeffs.len(), sig.dim)));
        }
        Multivector::from_terms(sig, coeffs.iter().enumerate().map(|(i, c)| (1u64 << i, c.clone())))
    }

    pub fn pseudoscalar(sig: &Signature) -> Self {
        Multivector::from_terms(sig, [(sig.all_mask(), S::one())]).expect("valid mask")
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn terms(&self) -> impl Iterator<Item = (u64, &S)> {
        self.blades.iter().map(|(m, c)| (*m, c))
    }

    pub fn len(&self) -> usize {
        self.blades.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blades.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.blades.is_empty()
    }

    pub fn coeff(&self, mask: u64) -> S {
        self.blades.get(&mask).cloned().unwrap_or_else(S::zero)
    }

    pub fn scalar_part(&self) -> S {
        self.coeff(0)
    }

    pub fn add_blade(&mut self, mask: u64, c: &S) {
        if c.is_zero() {
            return;
        }
        let slot = self.blades.entry(mask).or_insert_with(S::zero);
        slot.add_assign(c);
        if slot.is_zero() {
            self.blades.remove(&mask);
        }
    }

    pub fn grades(&self) -> Vec<usize> {
        let mut g: Vec<usize> = self.blades.keys().map(|&m| grade_of(m)).collect();
        g.sort_unstable();
        g.dedup();
        g
    }

    /// The single grade of a homogeneous element; zero counts as grade 0.
    pub fn homogeneous_grade(&self) -> Result<usize> {
        match self.grades().as_slice() {
            [] => Ok(0),
            [g] => Ok(*g),
            _ => Err(Error::NotHomogeneous),
        }
    }

    pub fn expect_grade(&self, k: usize) -> Result<()> {
        let g = self.grades();
        if g.iter().all(|&x| x == k) {
            Ok(())
        } else {
            Err(Error::GradeMismatch { expected: k, found: g })
        }
    }

    pub fn grade(&self, k: usize) -> Self {
        self.filter(|m| grade_of(m) == k)
    }

    pub fn even(&self) -> Self {
        self.filter(|m| grade_of(m) % 2 == 0)
    }

    pub fn odd(&self) -> Self {
        self.filter(|m| grade_of(m) % 2 == 1)
    }

    fn filter(&self, keep: impl Fn(u64) -> bool) -> Self {
        Multivector {
            sig: self.sig.clone(),
            blades: self.blades.iter().filter(|(m, _)| keep(**m)).map(|(m, c)| (*m, c.clone())).collect(),
        }
    }

    fn map_sign(&self, flip: impl Fn(usize) -> bool) -> Self {
        Multivector {
            sig: self.sig.clone(),
            blades: self
                .blades
                .iter()
                .map(|(m, c)| (*m, if flip(grade_of(*m)) { c.neg() } else { c.clone() }))
                .collect(),
        }
    }

    /// Reversion: grade `k` picks up `(-1)^(k(k-1)/2)`.
    pub fn reverse(&self) -> Self {
        self.map_sign(|k| (k / 2) % 2 == 1)
    }

    pub fn involute(&self) -> Self {
        self.map_sign(|k| k % 2 == 1)
    }

    pub fn conjugate(&self) -> Self {
        self.reverse().involute()
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Multivector<T> {
        let mut out = Multivector::zero(&self.sig);
        for (m, c) in &self.blades {
            out.add_blade(*m, &f(c));
        }
        out
    }

    pub fn try_map<T: Scalar>(&self, f: impl Fn(&S) -> Result<T>) -> Result<Multivector<T>> {
        let mut out = Multivector::zero(&self.sig);
        for (m, c) in &self.blades {
            out.add_blade(*m, &f(c)?);
        }
        Ok(out)
    }

    /// Reinterprets the same components over another signature of equal
    /// dimension.
    pub fn with_signature(&self, sig: &Signature) -> Result<Self> {
        if sig.dim != self.sig.dim {
            return Err(self.mismatch(sig));
        }
        Ok(Multivector { sig: sig.clone(), blades: self.blades.clone() })
    }

    fn mismatch(&self, other: &Signature) -> Error {
        Error::SignatureMismatch { left: self.sig.id.clone(), right: other.id.clone() }
    }

    fn check(&self, rhs: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.sig, &rhs.sig) || self.sig == rhs.sig {
            Ok(())
        } else {
            Err(self.mismatch(&rhs.sig))
        }
    }

    pub fn try_add(&self, rhs: &Self) -> Result<Self> {
        self.check(rhs)?;
        let mut out = self.clone();
        for (m, c) in &rhs.blades {
            out.add_blade(*m, c);
        }
        Ok(out)
    }

    pub fn try_sub(&self, rhs: &Self) -> Result<Self> {
        self.try_add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        self.map_sign(|_| true)
    }

    pub fn scale(&self, s: &S) -> Self {
        self.map(|c| c.mul(s))
    }

    /// Left multiplication of every coefficient, for non-commutative rings.
    pub fn scale_left(&self, s: &S) -> Self {
        self.map(|c| s.mul(c))
    }

    /// Star product with the signature's contraction matrix.
    pub fn star(&self, rhs: &Self) -> Result<Self> {
        self.star_with(rhs, |x, y| x.mul(y))
    }

    /// Star product whose coefficients combine through `coeff_mul`, which
    /// need not be commutative. Blade factors are ordinary scalars and are
    /// applied after `coeff_mul`.
    pub fn star_with(&self, rhs: &Self, coeff_mul: impl Fn(&S, &S) -> S) -> Result<Self> {
        self.check(rhs)?;
        let rows = self.sig.scalar_rows::<S>();
        let mut out = Multivector::zero(&self.sig);
        for (ma, ca) in &self.blades {
            for (mb, cb) in &rhs.blades {
                let table = blade_product(*ma, *mb, &rows);
                if table.is_empty() {
                    continue;
                }
                let c = coeff_mul(ca, cb);
                if c.is_zero() {
                    continue;
                }
                for (m, f) in table {
                    out.add_blade(m, &c.mul(&f));
                }
            }
        }
        Ok(out)
    }

    /// Grassmann (exterior) product.
    pub fn wedge(&self, rhs: &Self) -> Result<Self> {
        self.check(rhs)?;
        let mut out = Multivector::zero(&self.sig);
        for (ma, ca) in &self.blades {
            for (mb, cb) in &rhs.blades {
                if ma & mb != 0 {
                    continue;
                }
                let c = ca.mul(cb);
                out.add_blade(ma | mb, &if reorder_sign(*ma, *mb) { c.neg() } else { c });
            }
        }
        Ok(out)
    }

    /// Inner product: the grade `|r - s|` part of the product of each pair of
    /// homogeneous components.
    pub fn inner(&self, rhs: &Self) -> Result<Self> {
        self.graded_pair_product(rhs, |r, s| r.abs_diff(s))
    }

    /// Grade `r + s` part of each pairwise product; equals the wedge for any
    /// contraction matrix.
    pub fn outer(&self, rhs: &Self) -> Result<Self> {
        self.graded_pair_product(rhs, |r, s| r + s)
    }

    fn graded_pair_product(&self, rhs: &Self, target: impl Fn(usize, usize) -> usize) -> Result<Self> {
        self.check(rhs)?;
        let mut out = Multivector::zero(&self.sig);
        for r in self.grades() {
            let a = self.grade(r);
            for s in rhs.grades() {
                let p = a.star(&rhs.grade(s))?;
                out = out.try_add(&p.grade(target(r, s)))?;
            }
        }
        Ok(out)
    }

    /// `(AB - BA) / 2`.
    pub fn commutator(&self, rhs: &Self) -> Result<Self> {
        let d = self.star(rhs)?.try_sub(&rhs.star(self)?)?;
        Ok(d.scale(&S::from_rational(&Rational::new(1.into(), 2.into()))))
    }

    /// `A*B - (-1)^(rs) B*A` for homogeneous operands of grades `r`, `s`.
    pub fn graded_commutator(&self, rhs: &Self) -> Result<Self> {
        let r = self.homogeneous_grade()?;
        let s = rhs.homogeneous_grade()?;
        let ab = self.star(rhs)?;
        let ba = rhs.star(self)?;
        if (r * s) % 2 == 0 {
            ab.try_sub(&ba)
        } else {
            ab.try_add(&ba)
        }
    }

    /// Hodge dual with explicit inverse metric (row-major) and `sqrt|g|`.
    /// Blades are read as products of reciprocal generators.
    pub fn hodge_with(&self, inv_metric: &[S], sqrt_det: &S) -> Self {
        let d = self.sig.dim;
        let mut out = Multivector::zero(&self.sig);
        for (mask, c) in &self.blades {
            let upper: Vec<usize> = (0..d).filter(|i| mask >> i & 1 == 1).collect();
            let mut lowered = Vec::new();
            lower_indices(&upper, inv_metric, d, 0, S::one(), &mut Vec::new(), &mut lowered);
            for (js, f) in lowered {
                let used: u64 = js.iter().map(|j| 1u64 << j).sum();
                let rest: Vec<usize> = (0..d).filter(|i| used >> i & 1 == 0).collect();
                let perm: Vec<usize> = js.iter().chain(&rest).copied().collect();
                let term = f.mul(c).mul(sqrt_det);
                out.add_blade(self.sig.all_mask() ^ used, &if permutation_odd(&perm) { term.neg() } else { term });
            }
        }
        out
    }

    /// Hodge dual for a symmetric non-degenerate signature; requires
    /// `|det M|` to be a rational square.
    pub fn hodge(&self) -> Result<Self> {
        if self.sig.kind != SignatureKind::Symmetric {
            return Err(Error::Invalid("Hodge dual needs a symmetric signature".into()));
        }
        let (inv, det) = linalg::inverse_rational(self.sig.dim, &self.sig.matrix)?;
        let root = rational_sqrt(&det.abs())?;
        let inv: Vec<S> = inv.iter().map(S::from_rational).collect();
        Ok(self.hodge_with(&inv, &S::from_rational(&root)))
    }

    pub fn to_json(&self, nvars: usize) -> Value {
        let blades: Vec<Value> =
            self.blades.iter().map(|(m, c)| json!({ "mask": m, "coeff": c.to_json(nvars) })).collect();
        json!({ "signature_id": self.sig.id, "blades": blades })
    }

    pub fn display(&self, fmt_coeff: impl Fn(&S) -> String) -> String {
        if self.blades.is_empty() {
            return "0".into();
        }
        self.blades
            .iter()
            .map(|(m, c)| {
                let names: Vec<&str> =
                    (0..self.sig.dim).filter(|i| m >> i & 1 == 1).map(|i| self.sig.labels[i].as_str()).collect();
                if names.is_empty() {
                    fmt_coeff(c)
                } else {
                    format!("{} {}", fmt_coeff(c), names.join("^"))
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

impl Multivector<f64> {
    pub fn check_finite(&self) -> Result<()> {
        if self.blades.values().all(|c| c.is_finite()) {
            Ok(())
        } else {
            Err(Error::NonFinite)
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.blades.values().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn distance(&self, rhs: &Self) -> f64 {
        self.try_sub(rhs).map_or(f64::INFINITY, |d| d.max_abs())
    }

    /// Drops components with magnitude at or below `tol`.
    pub fn prune(&self, tol: f64) -> Self {
        self.filter_coeffs(|c| c.abs() > tol)
    }

    fn filter_coeffs(&self, keep: impl Fn(f64) -> bool) -> Self {
        Multivector {
            sig: self.sig.clone(),
            blades: self.blades.iter().filter(|(_, c)| keep(**c)).map(|(m, c)| (*m, *c)).collect(),
        }
    }
}

fn lower_indices<S: Scalar>(
    upper: &[usize],
    inv: &[S],
    d: usize,
    k: usize,
    acc: S,
    chosen: &mut Vec<usize>,
    out: &mut Vec<(Vec<usize>, S)>,
) {
    if k == upper.len() {
        out.push((chosen.clone(), acc));
        return;
    }
    for j in 0..d {
        let g = &inv[upper[k] * d + j];
        if g.is_zero() || chosen.contains(&j) {
            continue;
        }
        chosen.push(j);
        lower_indices(upper, inv, d, k + 1, acc.mul(g), chosen, out);
        chosen.pop();
    }
}

pub fn permutation_odd(p: &[usize]) -> bool {
    let mut inversions = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                inversions += 1;
            }
        }
    }
    inversions % 2 == 1
}

impl<'a, S: Scalar> Add<&'a Multivector<S>> for &'a Multivector<S> {
    type Output = Multivector<S>;
    /// Panics on signature mismatch; see [`Multivector::try_add`].
    fn add(self, rhs: &Multivector<S>) -> Multivector<S> {
        self.try_add(rhs).expect("signature mismatch")
    }
}

impl<'a, S: Scalar> Sub<&'a Multivector<S>> for &'a Multivector<S> {
    type Output = Multivector<S>;
    fn sub(self, rhs: &Multivector<S>) -> Multivector<S> {
        self.try_sub(rhs).expect("signature mismatch")
    }
}

impl<'a, S: Scalar> Mul<&'a Multivector<S>> for &'a Multivector<S> {
    type Output = Multivector<S>;
    /// Star product. Panics on signature mismatch; see [`Multivector::star`].
    fn mul(self, rhs: &Multivector<S>) -> Multivector<S> {
        self.star(rhs).expect("signature mismatch")
    }
}

impl<S: Scalar> Neg for &Multivector<S> {
    type Output = Multivector<S>;
    fn neg(self) -> Multivector<S> {
        Multivector::neg(self)
    }
}

pub fn half() -> Rational {
    Rational::new(1.into(), 2.into())
}

pub fn one() -> Rational {
    Rational::one()
}

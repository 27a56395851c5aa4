//! Coefficient rings: Gaussian rationals, sparse polynomials over them, and
//! the [`Scalar`] trait that lets multivectors run over exact or float
//! coefficients.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rational_to_string(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    Rational::from_str(s.trim()).map_err(|_| Error::Malformed(format!("rational `{s}`")))
}

/// Exact square root of a non-negative rational, if it is a perfect square.
pub fn rational_sqrt(r: &Rational) -> Result<Rational> {
    if r.is_negative() {
        return Err(Error::IrrationalSqrt(rational_to_string(r)));
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    if &(&n * &n) == r.numer() && &(&d * &d) == r.denom() {
        Ok(Rational::new(n, d))
    } else {
        Err(Error::IrrationalSqrt(rational_to_string(r)))
    }
}

/// Coefficient ring used by [`crate::multivector::Multivector`].
///
/// Exact types (`Gaussian`, `PolyScalar`) and `f64` are never mixed: the
/// multivector type is generic over a single `Scalar`.
pub trait Scalar: Clone + PartialEq + fmt::Debug + Send + Sync + 'static {
    const EXACT: bool;
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn from_rational(r: &Rational) -> Self;
    fn to_json(&self, nvars: usize) -> Value;

    fn from_int(n: i64) -> Self {
        Self::from_rational(&int(n))
    }

    fn add_assign(&mut self, rhs: &Self) {
        *self = Scalar::add(self, rhs);
    }
}

/// Complex number with rational real and imaginary parts.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Gaussian {
    pub re: Rational,
    pub im: Rational,
}

impl Gaussian {
    pub fn new(re: Rational, im: Rational) -> Self {
        Gaussian { re, im }
    }

    pub fn real(re: Rational) -> Self {
        Gaussian { re, im: Rational::zero() }
    }

    pub fn from_int(n: i64) -> Self {
        Gaussian::real(int(n))
    }

    pub fn i() -> Self {
        Gaussian { re: Rational::zero(), im: Rational::one() }
    }

    pub fn zero() -> Self {
        Gaussian::default()
    }

    pub fn one() -> Self {
        Gaussian::from_int(1)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Gaussian { re: self.re.clone(), im: -&self.im }
    }

    pub fn scale(&self, r: &Rational) -> Self {
        Gaussian { re: &self.re * r, im: &self.im * r }
    }

    pub fn inv(&self) -> Result<Self> {
        let n = &self.re * &self.re + &self.im * &self.im;
        if n.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Gaussian { re: &self.re / &n, im: -&self.im / &n })
    }

    pub fn div(&self, rhs: &Self) -> Result<Self> {
        Ok(self * &rhs.inv()?)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Gaussian::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(self.re.to_f64().unwrap_or(f64::NAN), self.im.to_f64().unwrap_or(f64::NAN))
    }

    fn parts_json(&self) -> (Value, Value) {
        (json!(rational_to_string(&self.re)), json!(rational_to_string(&self.im)))
    }
}

impl fmt::Display for Gaussian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => write!(f, "{}i", self.im),
            (false, false) => write!(f, "({}{:+}i)", self.re, self.im),
        }
    }
}

impl<'a> Add<&'a Gaussian> for &'a Gaussian {
    type Output = Gaussian;
    fn add(self, rhs: &Gaussian) -> Gaussian {
        Gaussian { re: &self.re + &rhs.re, im: &self.im + &rhs.im }
    }
}

impl<'a> Sub<&'a Gaussian> for &'a Gaussian {
    type Output = Gaussian;
    fn sub(self, rhs: &Gaussian) -> Gaussian {
        Gaussian { re: &self.re - &rhs.re, im: &self.im - &rhs.im }
    }
}

impl<'a> Mul<&'a Gaussian> for &'a Gaussian {
    type Output = Gaussian;
    fn mul(self, rhs: &Gaussian) -> Gaussian {
        if self.im.is_zero() && rhs.im.is_zero() {
            return Gaussian::real(&self.re * &rhs.re);
        }
        Gaussian { re: &self.re * &rhs.re - &self.im * &rhs.im, im: &self.re * &rhs.im + &self.im * &rhs.re }
    }
}

impl Neg for &Gaussian {
    type Output = Gaussian;
    fn neg(self) -> Gaussian {
        Gaussian { re: -&self.re, im: -&self.im }
    }
}

impl Neg for Gaussian {
    type Output = Gaussian;
    fn neg(self) -> Gaussian {
        Gaussian { re: -self.re, im: -self.im }
    }
}

impl Scalar for Gaussian {
    const EXACT: bool = true;
    fn zero() -> Self {
        Gaussian::zero()
    }
    fn one() -> Self {
        Gaussian::one()
    }
    fn is_zero(&self) -> bool {
        Gaussian::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn from_rational(r: &Rational) -> Self {
        Gaussian::real(r.clone())
    }
    fn to_json(&self, _nvars: usize) -> Value {
        let (re, im) = self.parts_json();
        json!({ "re": re, "im": im })
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn from_rational(r: &Rational) -> Self {
        r.to_f64().unwrap_or(f64::NAN)
    }
    fn to_json(&self, _nvars: usize) -> Value {
        json!(self)
    }
}

/// Handle to a registered variable.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Var(pub usize);

/// Ordered set of variable names. Immutable once built; every polynomial
/// that takes part in one computation is expected to use the same registry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarRegistry {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl VarRegistry {
    pub fn new<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut reg = VarRegistry { names: Vec::new(), index: HashMap::new() };
        for name in names {
            let name = name.into();
            if reg.index.contains_key(&name) {
                return Err(Error::DuplicateVariable(name));
            }
            reg.index.insert(name.clone(), reg.names.len());
            reg.names.push(name);
        }
        Ok(reg)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn var(&self, name: &str) -> Result<Var> {
        self.index.get(name).map(|&i| Var(i)).ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn name(&self, v: Var) -> &str {
        &self.names[v.0]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> {
        (0..self.names.len()).map(Var)
    }
}

/// Exponent vector with trailing zeros trimmed, so equal monomials compare
/// equal regardless of how many variables were in scope.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn from_exponents(mut e: Vec<u32>) -> Self {
        while e.last() == Some(&0) {
            e.pop();
        }
        Monomial(e)
    }

    pub fn var(v: Var) -> Self {
        let mut e = vec![0; v.0 + 1];
        e[v.0] = 1;
        Monomial(e)
    }

    pub fn exponent(&self, v: Var) -> u32 {
        self.0.get(v.0).copied().unwrap_or(0)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn try_mul(&self, rhs: &Monomial) -> Result<Monomial> {
        let (long, short) = if self.0.len() >= rhs.0.len() { (self, rhs) } else { (rhs, self) };
        let mut e = long.0.clone();
        for (x, y) in e.iter_mut().zip(&short.0) {
            *x = x.checked_add(*y).ok_or(Error::ExponentOverflow)?;
        }
        Ok(Monomial(e))
    }

    /// Lowers the exponent of `v` by `k`; `None` if the exponent is too small.
    pub fn lower(&self, v: Var, k: u32) -> Option<Monomial> {
        let e = self.exponent(v);
        if e < k {
            return None;
        }
        if k == 0 {
            return Some(self.clone());
        }
        let mut out = self.0.clone();
        out[v.0] = e - k;
        Some(Monomial::from_exponents(out))
    }

    fn padded(&self, n: usize) -> Result<Vec<u32>> {
        if self.0.len() > n {
            return Err(Error::RegistryMismatch { index: self.0.len() - 1, len: n });
        }
        let mut e = self.0.clone();
        e.resize(n, 0);
        Ok(e)
    }
}

/// Sparse polynomial with Gaussian-rational coefficients.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct PolyScalar {
    terms: BTreeMap<Monomial, Gaussian>,
}

impl PolyScalar {
    pub fn zero() -> Self {
        PolyScalar::default()
    }

    pub fn one() -> Self {
        PolyScalar::constant(Gaussian::one())
    }

    pub fn constant(c: Gaussian) -> Self {
        PolyScalar::term(Monomial::one(), c)
    }

    pub fn from_rational(r: Rational) -> Self {
        PolyScalar::constant(Gaussian::real(r))
    }

    pub fn from_int(n: i64) -> Self {
        PolyScalar::constant(Gaussian::from_int(n))
    }

    pub fn i() -> Self {
        PolyScalar::constant(Gaussian::i())
    }

    pub fn var(v: Var) -> Self {
        PolyScalar::term(Monomial::var(v), Gaussian::one())
    }

    pub fn term(m: Monomial, c: Gaussian) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        PolyScalar { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Gaussian)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> Gaussian {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn constant_part(&self) -> Gaussian {
        self.coeff(&Monomial::one())
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        self.terms.keys().map(|m| m.exponent(v)).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, m: Monomial, c: &Gaussian) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                *existing = &*existing + c;
                if existing.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c.clone());
            }
        }
    }

    pub fn scale(&self, c: &Gaussian) -> Self {
        if c.is_zero() {
            return PolyScalar::zero();
        }
        PolyScalar { terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect() }
    }

    pub fn try_mul(&self, rhs: &PolyScalar) -> Result<PolyScalar> {
        let mut out = PolyScalar::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.try_mul(mb)?, &(ca * cb));
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> PolyScalar {
        let mut acc = PolyScalar::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    pub fn diff(&self, v: Var) -> PolyScalar {
        self.diff_n(v, 1)
    }

    /// `k`-th partial derivative with respect to `v`.
    pub fn diff_n(&self, v: Var, k: u32) -> PolyScalar {
        let mut out = PolyScalar::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(v);
            if let Some(lowered) = m.lower(v, k) {
                let falling: i64 = (0..k).map(|j| (e - j) as i64).product();
                out.add_term(lowered, &c.scale(&int(falling)));
            }
        }
        out
    }

    /// Exact division by a single variable; fails if some term lacks it.
    pub fn div_var(&self, v: Var) -> Result<PolyScalar> {
        let mut out = PolyScalar::zero();
        for (m, c) in &self.terms {
            let lowered = m.lower(v, 1).ok_or(Error::DivisionByZero)?;
            out.add_term(lowered, c);
        }
        Ok(out)
    }

    /// Replaces `v` by the polynomial `value` everywhere.
    pub fn substitute(&self, v: Var, value: &PolyScalar) -> PolyScalar {
        let mut out = PolyScalar::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(v);
            let mut rest = m.0.clone();
            if v.0 < rest.len() {
                rest[v.0] = 0;
            }
            let base = PolyScalar::term(Monomial::from_exponents(rest), c.clone());
            out = &out + &(&base * &value.pow(e));
        }
        out
    }

    pub fn eval_exact(&self, bindings: &HashMap<Var, Gaussian>, reg: &VarRegistry) -> Result<Gaussian> {
        let mut acc = Gaussian::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let x = bindings.get(&Var(i)).ok_or_else(|| unbound(reg, i))?;
                t = &t * &x.pow(e);
            }
            acc = &acc + &t;
        }
        Ok(acc)
    }

    pub fn eval_f64(&self, bindings: &HashMap<Var, f64>, reg: &VarRegistry) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let mut t = c.to_complex();
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let x = bindings.get(&Var(i)).ok_or_else(|| unbound(reg, i))?;
                t *= x.powi(e as i32);
            }
            acc += t;
        }
        if acc.re.is_finite() && acc.im.is_finite() {
            Ok(acc)
        } else {
            Err(Error::NonFinite)
        }
    }

    /// Evaluation by positional values, `values[i]` bound to `Var(i)`.
    pub fn eval_slice(&self, values: &[f64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let mut t = c.to_complex();
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t *= values[i].powi(e as i32);
                }
            }
            acc += t;
        }
        acc
    }

    pub fn to_json_padded(&self, nvars: usize) -> Result<Value> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            let (re, im) = c.parts_json();
            terms.push(json!({ "exponents": m.padded(nvars)?, "re": re, "im": im }));
        }
        Ok(Value::Array(terms))
    }

    pub fn to_json(&self, reg: &VarRegistry) -> Result<Value> {
        Ok(json!({ "variables": reg.names(), "terms": self.to_json_padded(reg.len())? }))
    }

    pub fn from_json(value: &Value, reg: &VarRegistry) -> Result<PolyScalar> {
        let terms = match value {
            Value::Array(t) => t,
            Value::Object(o) => {
                if let Some(vars) = o.get("variables") {
                    let names: Vec<&str> = vars.as_array().into_iter().flatten().filter_map(Value::as_str).collect();
                    if names != reg.names().iter().map(String::as_str).collect::<Vec<_>>() {
                        return Err(Error::Malformed("variable list differs from registry".into()));
                    }
                }
                o.get("terms").and_then(Value::as_array).ok_or_else(|| Error::Malformed("missing `terms`".into()))?
            }
            _ => return Err(Error::Malformed("polynomial must be an array or object".into())),
        };
        let mut out = PolyScalar::zero();
        for t in terms {
            let exps = t
                .get("exponents")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::Malformed("missing `exponents`".into()))?;
            if exps.len() != reg.len() {
                return Err(Error::Malformed(format!("{} exponents for {} variables", exps.len(), reg.len())));
            }
            let e = exps
                .iter()
                .map(|x| {
                    x.as_u64()
                        .and_then(|n| u32::try_from(n).ok())
                        .ok_or_else(|| Error::Malformed("bad exponent".into()))
                })
                .collect::<Result<Vec<u32>>>()?;
            let part = |key: &str| -> Result<Rational> {
                match t.get(key) {
                    None => Ok(Rational::zero()),
                    Some(Value::String(s)) => parse_rational(s),
                    Some(Value::Number(n)) => {
                        n.as_i64().map(int).ok_or_else(|| Error::Malformed(format!("non-integer number for `{key}`")))
                    }
                    Some(_) => Err(Error::Malformed(format!("bad `{key}`"))),
                }
            };
            out.add_term(Monomial::from_exponents(e), &Gaussian::new(part("re")?, part("im")?));
        }
        Ok(out)
    }

    pub fn display(&self, reg: &VarRegistry) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let vars: Vec<String> =
                    m.0.iter()
                        .enumerate()
                        .filter(|(_, &e)| e > 0)
                        .map(|(i, &e)| {
                            let n = reg.names.get(i).cloned().unwrap_or_else(|| format!("x{i}"));
                            if e == 1 {
                                n
                            } else {
                                format!("{n}^{e}")
                            }
                        })
                        .collect();
                if vars.is_empty() {
                    c.to_string()
                } else {
                    format!("{}*{}", c, vars.join("*"))
                }
            })
            .collect();
        parts.join(" + ")
    }
}

fn unbound(reg: &VarRegistry, i: usize) -> Error {
    Error::UnboundVariable(reg.names.get(i).cloned().unwrap_or_else(|| format!("#{i}")))
}

impl<'a> Add<&'a PolyScalar> for &'a PolyScalar {
    type Output = PolyScalar;
    fn add(self, rhs: &PolyScalar) -> PolyScalar {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl AddAssign<&PolyScalar> for PolyScalar {
    fn add_assign(&mut self, rhs: &PolyScalar) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c);
        }
    }
}

impl<'a> Sub<&'a PolyScalar> for &'a PolyScalar {
    type Output = PolyScalar;
    fn sub(self, rhs: &PolyScalar) -> PolyScalar {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), &-c);
        }
        out
    }
}

impl<'a> Mul<&'a PolyScalar> for &'a PolyScalar {
    type Output = PolyScalar;
    /// Panics on exponent overflow; use [`PolyScalar::try_mul`] to handle it.
    fn mul(self, rhs: &PolyScalar) -> PolyScalar {
        self.try_mul(rhs).expect("exponent overflow in polynomial product")
    }
}

impl Neg for &PolyScalar {
    type Output = PolyScalar;
    fn neg(self) -> PolyScalar {
        PolyScalar { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
}

impl Scalar for PolyScalar {
    const EXACT: bool = true;
    fn zero() -> Self {
        PolyScalar::zero()
    }
    fn one() -> Self {
        PolyScalar::one()
    }
    fn is_zero(&self) -> bool {
        PolyScalar::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn from_rational(r: &Rational) -> Self {
        PolyScalar::from_rational(r.clone())
    }
    fn to_json(&self, nvars: usize) -> Value {
        let width = nvars.max(self.terms.keys().map(|m| m.0.len()).max().unwrap_or(0));
        self.to_json_padded(width).expect("padding to the widest monomial cannot fail")
    }
    fn add_assign(&mut self, rhs: &Self) {
        *self += rhs;
    }
}

//! Sparse multivariate polynomials, truncated power series, Gauss values,
//! substitution under monomial transforms and the logarithmic derivation.

mod text;
mod truncated;
mod unit;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::num::Q;
use crate::valuegroup::{cmp, Value};

pub use text::parse_poly;
pub use truncated::TruncatedSeries;
pub use unit::{SymCoeff, SymMono, UnitExpr};

/// Exponent vector of a monomial.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(n: usize) -> Self {
        Self(vec![0; n])
    }

    pub fn var(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        Self(e)
    }

    pub fn degree(&self) -> u64 {
        self.0.iter().map(|&e| u64::from(e)).sum()
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        self.0
            .iter()
            .zip(&o.0)
            .map(|(a, b)| a.checked_add(*b).ok_or(Error::ExponentOverflow))
            .collect::<Result<_>>()
            .map(Self)
    }

    pub fn divides(&self, o: &Self) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a <= b)
    }

    pub fn as_i64(&self) -> Vec<i64> {
        self.0.iter().map(|&e| i64::from(e)).collect()
    }

    pub fn from_i64(v: &[i64]) -> Result<Self> {
        v.iter()
            .map(|&e| u32::try_from(e).map_err(|_| Error::ExponentOverflow))
            .collect::<Result<_>>()
            .map(Self)
    }
}

/// Coefficient rings: the rationals, and Laurent polynomials in unit symbols.
pub trait Coefficient: Clone + PartialEq + fmt::Debug + fmt::Display {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn scale(&self, k: &Q) -> Self;
    fn from_q(c: Q) -> Self;
    /// Coefficient of the empty symbol product (the element itself for Q).
    fn constant_part(&self) -> Q;
}

impl Coefficient for Q {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn scale(&self, k: &Q) -> Self {
        self * k
    }
    fn from_q(c: Q) -> Self {
        c
    }
    fn constant_part(&self) -> Q {
        self.clone()
    }
}

/// Finite map from monomials to nonzero coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly<K = Q> {
    nvars: usize,
    terms: BTreeMap<Monomial, K>,
}

impl<K: Coefficient> Poly<K> {
    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: K) -> Self {
        Self::term(Monomial::one(nvars), c)
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, K::one())
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        Self::term(Monomial::var(nvars, i), K::one())
    }

    pub fn term(m: Monomial, c: K) -> Self {
        let nvars = m.0.len();
        let mut p = Self::zero(nvars);
        p.add_term(m, c);
        p
    }

    pub fn from_terms(
        nvars: usize,
        terms: impl IntoIterator<Item = (Monomial, K)>,
    ) -> Result<Self> {
        let mut p = Self::zero(nvars);
        for (m, c) in terms {
            if m.0.len() != nvars {
                return Err(Error::DimensionMismatch {
                    expected: nvars,
                    found: m.0.len(),
                });
            }
            p.add_term(m, c);
        }
        Ok(p)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &K)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> K {
        self.terms.get(m).cloned().unwrap_or_else(K::zero)
    }

    pub fn constant_term(&self) -> K {
        self.coeff(&Monomial::one(self.nvars))
    }

    pub fn degree(&self) -> u64 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, m: Monomial, c: K) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v = v.add(&c);
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    fn check_vars(&self, o: &Self) -> Result<()> {
        if self.nvars != o.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                found: o.nvars,
            });
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.check_vars(o)?;
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|c| c.neg())
    }

    pub fn scale(&self, k: &K) -> Self {
        let mut out = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c.mul(k));
        }
        out
    }

    pub fn map_coeffs<L: Coefficient>(&self, f: impl Fn(&K) -> L) -> Poly<L> {
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        self.mul_below(o, None)
    }

    /// Product keeping only monomials of total degree below `trunc`.
    pub fn mul_below(&self, o: &Self, trunc: Option<u64>) -> Result<Self> {
        self.check_vars(o)?;
        let mut out = Self::zero(self.nvars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                if let Some(t) = trunc {
                    if m1.degree() + m2.degree() >= t {
                        continue;
                    }
                }
                out.add_term(m1.mul(m2)?, c1.mul(c2));
            }
        }
        Ok(out)
    }

    pub fn pow(&self, e: u32) -> Result<Self> {
        self.pow_below(e, None)
    }

    pub fn pow_below(&self, mut e: u32, trunc: Option<u64>) -> Result<Self> {
        let mut base = self.clone();
        let mut acc = Self::one(self.nvars).truncate(trunc);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_below(&base, trunc)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_below(&base, trunc)?;
            }
        }
        Ok(acc)
    }

    /// Drops every monomial of total degree `>= trunc`.
    pub fn truncate(&self, trunc: Option<u64>) -> Self {
        match trunc {
            None => self.clone(),
            Some(t) => Self {
                nvars: self.nvars,
                terms: self
                    .terms
                    .iter()
                    .filter(|(m, _)| m.degree() < t)
                    .map(|(m, c)| (m.clone(), c.clone()))
                    .collect(),
            },
        }
    }

    /// Exact quotient by `x^d`; `None` when some term is not divisible.
    pub fn div_monomial(&self, d: &Monomial) -> Option<Self> {
        let mut out = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            if !d.divides(m) {
                return None;
            }
            out.add_term(
                Monomial(m.0.iter().zip(&d.0).map(|(a, b)| a - b).collect()),
                c.clone(),
            );
        }
        Some(out)
    }

    pub fn mul_monomial(&self, d: &Monomial) -> Result<Self> {
        let mut out = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            out.add_term(m.mul(d)?, c.clone());
        }
        Ok(out)
    }

    /// Monomial change of the first `e.len()` variables: `x_i = prod_j x_j(1)^{e[i][j]}`,
    /// so an exponent block `w` becomes `w·e`. Trailing variables are untouched.
    pub fn monomial_map(&self, e: &[Vec<i64>], trunc: Option<u64>) -> Result<Self> {
        let k = e.len();
        if k > self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                found: k,
            });
        }
        let mut out = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            let w: Vec<i64> = m.0[..k].iter().map(|&x| i64::from(x)).collect();
            let w2 = crate::intmat::vec_mul(&w, e).map_err(|_| Error::ExponentOverflow)?;
            let mut exps = Monomial::from_i64(&w2)?.0;
            exps.extend_from_slice(&m.0[k..]);
            let nm = Monomial(exps);
            if trunc.map_or(true, |t| nm.degree() < t) {
                out.add_term(nm, c.clone());
            }
        }
        Ok(out)
    }

    /// Same polynomial viewed in `n` variables (new trailing variables have exponent 0).
    pub fn extend_vars(&self, n: usize) -> Self {
        let mut out = Self::zero(n.max(self.nvars));
        for (m, c) in &self.terms {
            let mut e = m.0.clone();
            e.resize(n.max(self.nvars), 0);
            out.add_term(Monomial(e), c.clone());
        }
        out
    }
}

impl Poly<Q> {
    pub fn to_sym(&self) -> Poly<SymCoeff> {
        self.map_coeffs(|c| SymCoeff::from_q(c.clone()))
    }
}

impl<K: Coefficient> fmt::Display for Poly<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", text::format_poly(self))
    }
}

/// Result of a Gauss valuation.
#[derive(Debug, Clone, PartialEq)]
pub enum GaussValue {
    Finite(Value),
    AboveTruncation,
    Infinity,
}

impl GaussValue {
    pub fn finite(&self) -> Option<&Value> {
        match self {
            GaussValue::Finite(v) => Some(v),
            _ => None,
        }
    }
}

/// Value of the monomial with exponents `m` under `vals`.
pub fn monomial_value(m: &Monomial, vals: &[Value]) -> Result<Value> {
    if m.0.len() != vals.len() {
        return Err(Error::DimensionMismatch {
            expected: vals.len(),
            found: m.0.len(),
        });
    }
    let basis = vals
        .first()
        .map(|v| v.basis().clone())
        .ok_or(Error::DimensionMismatch {
            expected: 1,
            found: 0,
        })?;
    crate::valuegroup::combine(&basis, &m.as_i64(), vals)
}

/// The term of least value and that value; `None` for the zero polynomial.
pub fn min_term<'a, K: Coefficient>(
    f: &'a Poly<K>,
    vals: &[Value],
) -> Result<Option<(&'a Monomial, Value)>> {
    if vals.len() != f.nvars() {
        return Err(Error::DimensionMismatch {
            expected: f.nvars(),
            found: vals.len(),
        });
    }
    let mut best: Option<(&Monomial, Value)> = None;
    for (m, _) in f.terms() {
        let v = monomial_value(m, vals)?;
        best = match best {
            Some((bm, bv)) if cmp(&bv, &v)? != Ordering::Greater => Some((bm, bv)),
            _ => Some((m, v)),
        };
    }
    Ok(best)
}

/// Gauss value of a polynomial: the least value of a supported monomial.
pub fn gauss_value<K: Coefficient>(f: &Poly<K>, vals: &[Value]) -> Result<GaussValue> {
    Ok(match min_term(f, vals)? {
        Some((_, v)) => GaussValue::Finite(v),
        None => GaussValue::Infinity,
    })
}

/// Gauss value of a truncated series: finite only when the least stored value lies
/// strictly below every value a monomial of degree `trunc` could take.
pub fn gauss_value_series<K: Coefficient>(
    f: &TruncatedSeries<K>,
    vals: &[Value],
) -> Result<GaussValue> {
    let Some((_, v)) = min_term(f.poly(), vals)? else {
        return Ok(GaussValue::AboveTruncation);
    };
    let mut floor: Option<Value> = None;
    for w in vals {
        floor = match floor {
            Some(f) if cmp(&f, w)? != Ordering::Greater => Some(f),
            _ => Some(w.clone()),
        };
    }
    let bound = floor
        .expect("nonempty vals")
        .scale(&crate::num::q(i64::from(f.trunc())));
    if cmp(&v, &bound)? == Ordering::Less {
        Ok(GaussValue::Finite(v))
    } else {
        Ok(GaussValue::AboveTruncation)
    }
}

/// Image of one variable: `unit · y^monomial`, times `(y_var + c)` when `shift` is set.
#[derive(Debug, Clone, PartialEq)]
pub struct SubstExpr {
    pub monomial: Vec<u32>,
    pub unit: UnitExpr,
    pub shift: Option<(usize, Q)>,
}

impl SubstExpr {
    pub fn identity(n: usize, i: usize) -> Self {
        Self {
            monomial: Monomial::var(n, i).0,
            unit: UnitExpr::one(),
            shift: None,
        }
    }

    pub fn to_poly(&self) -> Poly<SymCoeff> {
        let n = self.monomial.len();
        let base = Poly::term(Monomial(self.monomial.clone()), self.unit.to_sym());
        match &self.shift {
            None => base,
            Some((v, c)) => {
                let lin = Poly::var(n, *v)
                    .add(&Poly::constant(n, SymCoeff::from_q(c.clone())))
                    .expect("same arity");
                base.mul(&lin).expect("same arity")
            }
        }
    }
}

/// Polynomial composition `f(images[0], …, images[k-1])`.
pub fn compose<K: Coefficient>(f: &Poly<K>, images: &[Poly<K>]) -> Result<Poly<K>> {
    compose_below(f, images, None)
}

pub fn compose_below<K: Coefficient>(
    f: &Poly<K>,
    images: &[Poly<K>],
    trunc: Option<u64>,
) -> Result<Poly<K>> {
    if images.len() != f.nvars() {
        return Err(Error::DimensionMismatch {
            expected: f.nvars(),
            found: images.len(),
        });
    }
    let n = images.first().map_or(0, Poly::nvars);
    let maxes: Vec<Vec<u64>> = images
        .iter()
        .map(|img| {
            (0..n)
                .map(|j| {
                    img.terms()
                        .map(|(mm, _)| u64::from(mm.0[j]))
                        .max()
                        .unwrap_or(0)
                })
                .collect()
        })
        .collect();
    // each output exponent is at most sum_i e_i * maxdeg_j(image_i)
    for (m, _) in f.terms() {
        let mut bound = vec![0u64; n];
        for (e, mx) in m.0.iter().zip(&maxes) {
            for (b, x) in bound.iter_mut().zip(mx) {
                *b = b.saturating_add(u64::from(*e).saturating_mul(*x));
            }
        }
        if bound.iter().any(|&b| b > u64::from(u32::MAX)) {
            return Err(Error::ExponentOverflow);
        }
    }
    let mut cache: Vec<BTreeMap<u32, Poly<K>>> = vec![BTreeMap::new(); images.len()];
    let mut out = Poly::zero(n);
    for (m, c) in f.terms() {
        let mut acc = Poly::constant(n, c.clone());
        for (i, &e) in m.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !cache[i].contains_key(&e) {
                let p = images[i].pow_below(e, trunc)?;
                cache[i].insert(e, p);
            }
            acc = acc.mul_below(&cache[i][&e], trunc)?;
        }
        out = out.add(&acc)?;
    }
    Ok(out)
}

/// Expands `f` under a per-variable substitution; unit symbols stay formal.
pub fn substitute<K: Coefficient>(f: &Poly<K>, sub: &[SubstExpr]) -> Result<Poly<SymCoeff>>
where
    K: Into<SymCoeff>,
{
    let images: Vec<Poly<SymCoeff>> = sub.iter().map(SubstExpr::to_poly).collect();
    let g = f.map_coeffs(|c| c.clone().into());
    compose(&g, &images)
}

impl From<Q> for SymCoeff {
    fn from(c: Q) -> Self {
        SymCoeff::from_q(c)
    }
}

/// The derivation `y^b ↦ (b·e) y^b`; variables past `e.len()` have weight 0.
pub fn derivation_apply<K: Coefficient>(f: &Poly<K>, e: &[Q]) -> Poly<K> {
    let mut out = Poly::zero(f.nvars());
    for (m, c) in f.terms() {
        let w = m.0.iter().zip(e).fold(<Q as Zero>::zero(), |acc, (&b, x)| {
            acc + x * Q::from_integer(b.into())
        });
        out.add_term(m.clone(), c.scale(&w));
    }
    out
}

pub fn is_unit<K: Coefficient>(f: &TruncatedSeries<K>) -> bool {
    f.trunc() > 0 && !f.poly().constant_term().is_zero()
}

//! Splitting a polynomial by classes of exponents modulo the saturated row
//! lattice of `C`, picking the class of least value, rewriting a class in the
//! `x` variables, and derivations that act diagonally on classes.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::intmat::{self, IMat};
use crate::lattice::{self, ModuleGens};
use crate::linalg;
use crate::num::{lcm_denoms, q, Q};
use crate::series::{gauss_value, GaussValue, Monomial, Poly, UnitExpr};
use crate::valuegroup::{cmp, Value};

/// Canonical key of `Λ + ((Q^r̄ C) ∩ Z^s̄)`.
///
/// With `P C Q = D`, a vector lies in the saturation exactly when its last
/// `s̄ - r̄` coordinates after multiplying by `Q` vanish, so those coordinates
/// are the key.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct CosetIndex(pub Vec<i64>);

impl CosetIndex {
    pub fn is_trivial(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }
}

/// Class computations for a fixed exponent matrix.
#[derive(Debug, Clone)]
pub struct Classifier {
    c: IMat,
    q: IMat,
}

impl Classifier {
    pub fn new(c: &IMat) -> Result<Self> {
        let rbar = c.len();
        let rank = linalg::rank_int(c);
        if rank != rbar {
            return Err(Error::RankDeficient {
                expected: rbar,
                found: rank,
            });
        }
        Ok(Self {
            c: c.clone(),
            q: intmat::smith(c)?.q,
        })
    }

    pub fn sbar(&self) -> usize {
        self.q.len()
    }

    pub fn class(&self, lambda: &[i64]) -> Result<CosetIndex> {
        if lambda.len() != self.sbar() {
            return Err(Error::DimensionMismatch {
                expected: self.sbar(),
                found: lambda.len(),
            });
        }
        let w = intmat::vec_mul(lambda, &self.q)?;
        Ok(CosetIndex(w[self.c.len()..].to_vec()))
    }
}

pub fn coset_class(lambda: &[i64], c: &IMat) -> Result<CosetIndex> {
    Classifier::new(c)?.class(lambda)
}

/// Splits `f` by the class of the exponents of its first `s̄` variables.
pub fn decompose(f: &Poly, c: &IMat) -> Result<BTreeMap<CosetIndex, Poly>> {
    let cl = Classifier::new(c)?;
    let s = cl.sbar();
    if f.nvars() < s {
        return Err(Error::DimensionMismatch {
            expected: s,
            found: f.nvars(),
        });
    }
    let mut parts: BTreeMap<CosetIndex, Poly> = BTreeMap::new();
    for (m, a) in f.terms() {
        let key = cl.class(&m.as_i64()[..s])?;
        parts
            .entry(key)
            .or_insert_with(|| Poly::zero(f.nvars()))
            .add_term(m.clone(), a.clone());
    }
    Ok(parts)
}

/// The class of least Gauss value. `vals` covers every variable of the parts.
pub fn min_value_class(
    parts: &BTreeMap<CosetIndex, Poly>,
    vals: &[Value],
) -> Result<(CosetIndex, Value)> {
    let mut best: Option<(CosetIndex, Value)> = None;
    let mut finite = Vec::new();
    for (k, p) in parts {
        if let GaussValue::Finite(v) = gauss_value(p, vals)? {
            finite.push((k.clone(), v.clone()));
            best = match best {
                Some((bk, bv)) if cmp(&bv, &v)?.is_le() => Some((bk, bv)),
                _ => Some((k.clone(), v)),
            };
        }
    }
    let (key, val) = best.ok_or(Error::AboveTruncation)?;
    for (k, v) in &finite {
        if k != &key && v == &val {
            return Err(Error::Inconsistent(format!(
                "classes {:?} and {:?} share the least value",
                key.0, k.0
            )));
        }
    }
    Ok((key, val))
}

/// One term `a · φ^{phi_exp} · x^{x_exp} · z^{rest}` of a rewritten class part,
/// where `z` are the variables past the first `s̄`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct XTerm {
    #[serde(with = "crate::num::qstr")]
    pub coeff: Q,
    /// Which module generator `ū` the exponent was reduced to.
    pub generator: usize,
    #[serde(with = "crate::num::qvec")]
    pub x_exp: Vec<Q>,
    #[serde(with = "crate::num::qvec")]
    pub phi_exp: Vec<Q>,
    pub rest: Vec<u32>,
}

/// `h = y^Λ · Σ φ^{phi_exp} x^{x_exp} z^{rest}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct XRewrite {
    pub lambda: Vec<i64>,
    pub terms: Vec<XTerm>,
}

impl XRewrite {
    pub fn is_integral(&self) -> bool {
        self.terms.iter().all(|t| t.x_exp.iter().all(Q::is_integer))
    }

    /// Substitutes `x_i = y^{C_i} φ_i` back and returns the polynomial in `y, z`.
    /// The `φ` factors must cancel.
    pub fn expand(&self, c: &IMat, nvars: usize) -> Result<Poly> {
        let cq = linalg::from_int(c);
        let mut out = Poly::zero(nvars);
        for t in &self.terms {
            if t.phi_exp
                .iter()
                .zip(&t.x_exp)
                .any(|(a, b)| !(a + b).is_zero())
            {
                return Err(Error::Inconsistent("unit exponents do not cancel".into()));
            }
            let w = linalg::vec_mul(&t.x_exp, &cq);
            let mut e = Vec::with_capacity(nvars);
            for (x, &l) in w.iter().zip(&self.lambda) {
                let v = x + q(l);
                let v = crate::num::to_i64(&v)
                    .ok_or_else(|| Error::Inconsistent("fractional y exponent".into()))?;
                e.push(v);
            }
            e.extend(t.rest.iter().map(|&r| i64::from(r)));
            out.add_term(Monomial::from_i64(&e)?, t.coeff.clone());
        }
        Ok(out)
    }
}

/// Rewrites a single-class part `h` as `y^Λ` times a sum over module
/// generators of `M_Λ`. `Λ` must be the `lambda` the generators were built for.
pub fn rewrite_in_x(h: &Poly, c: &IMat, gens: &ModuleGens) -> Result<XRewrite> {
    let s = c.first().map_or(0, Vec::len);
    let lambda = &gens.lambda;
    let mut terms = Vec::new();
    for (m, a) in h.terms() {
        let alpha = m.as_i64();
        let diff: Vec<i64> = alpha[..s].iter().zip(lambda).map(|(x, l)| x - l).collect();
        let v = lattice::pull_back(c, &diff)?;
        if !lattice::in_preimage(&v, c) {
            return Err(Error::NotInImage(diff));
        }
        let generator = gens
            .find(c, &diff)
            .ok_or_else(|| Error::NotInImage(diff.clone()))?;
        terms.push(XTerm {
            coeff: a.clone(),
            generator,
            phi_exp: v.iter().map(|x| -x).collect(),
            x_exp: v,
            rest: m.0[s..].to_vec(),
        });
    }
    Ok(XRewrite {
        lambda: lambda.clone(),
        terms,
    })
}

/// Product `Π φ_i^{k_i}` for an integral exponent vector.
pub fn unit_power(phis: &[UnitExpr], k: &[Q]) -> Result<UnitExpr> {
    let ks = k
        .iter()
        .map(|x| {
            crate::num::to_i64(x).ok_or(Error::Precondition("fractional unit exponent".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(UnitExpr::product(phis, &ks))
}

/// A primitive integer vector `e` with `C e = 0` and `Λ·e > 0`.
pub fn kernel_derivation_vector(c: &IMat, lambda: &[i64]) -> Result<Vec<Q>> {
    let s = c.first().map_or(lambda.len(), Vec::len);
    if lambda.len() != s {
        return Err(Error::DimensionMismatch {
            expected: s,
            found: lambda.len(),
        });
    }
    let lq: Vec<Q> = lambda.iter().map(|&x| q(x)).collect();
    let dot = |e: &[Q]| e.iter().zip(&lq).fold(Q::zero(), |acc, (a, b)| acc + a * b);
    let kernel = linalg::nullspace(&linalg::from_int(c), s);
    let e = kernel
        .into_iter()
        .find(|e| !dot(e).is_zero())
        .ok_or(Error::TrivialClass)?;
    let l = Q::from_integer(lcm_denoms(&e));
    let mut e: Vec<Q> = e.iter().map(|x| x * &l).collect();
    let g = e.iter().fold(num_bigint::BigInt::zero(), |g, x| {
        num_integer::Integer::gcd(&g, x.numer())
    });
    let mut scale = Q::from_integer(g).recip();
    if dot(&e).is_negative() {
        scale = -scale;
    }
    e.iter_mut().for_each(|x| *x *= &scale);
    Ok(e)
}

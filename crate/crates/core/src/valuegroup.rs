//! Ordered value groups embedded in the reals.
//!
//! A [`Value`] is a rational combination of the generators of an
//! [`EmbeddingBasis`]. The generators are rationally independent reals, so a
//! combination vanishes exactly when its coordinates do, and the sign of a
//! nonzero combination is found by refining dyadic enclosures.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::{lcm_denoms, Q};

/// Maximum number of refinement rounds in a sign decision.
pub const REFINEMENT_CAP: u32 = 256;

/// A real number with arbitrarily tight dyadic enclosures.
pub trait RealOracle: Send + Sync + fmt::Debug {
    /// Returns `k` with the real in `[k / 2^bits, (k + 1) / 2^bits]`.
    fn enclose(&self, bits: u32) -> std::result::Result<BigInt, String>;

    fn descriptor(&self) -> GenDescriptor;
}

/// JSON descriptor of a generator, e.g. `{"kind":"sqrt","n":2}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GenDescriptor {
    Sqrt { n: u64 },
    Custom { name: String },
}

#[derive(Debug)]
struct SqrtOracle {
    n: u64,
    cache: Mutex<HashMap<u32, BigInt>>,
}

impl RealOracle for SqrtOracle {
    fn enclose(&self, bits: u32) -> std::result::Result<BigInt, String> {
        let mut cache = self.cache.lock().map_err(|e| e.to_string())?;
        Ok(cache
            .entry(bits)
            .or_insert_with(|| (BigInt::from(self.n) << (2 * bits as usize)).sqrt())
            .clone())
    }

    fn descriptor(&self) -> GenDescriptor {
        GenDescriptor::Sqrt { n: self.n }
    }
}

fn squarefree(n: u64) -> bool {
    let mut k = 2u64;
    while k * k <= n {
        if n % (k * k) == 0 {
            return false;
        }
        k += 1;
    }
    true
}

/// Rationally independent positive reals spanning a value group tensored with Q.
#[derive(Debug)]
pub struct EmbeddingBasis {
    gens: Vec<Arc<dyn RealOracle>>,
}

impl EmbeddingBasis {
    /// Square roots of distinct squarefree integers (`1` allowed, standing for the rational generator).
    pub fn sqrt(ns: &[u64]) -> Result<Arc<Self>> {
        let mut seen = std::collections::BTreeSet::new();
        for &n in ns {
            if n == 0 || !squarefree(n) {
                return Err(Error::InvalidBasis(format!(
                    "{n} is not a positive squarefree integer"
                )));
            }
            if !seen.insert(n) {
                return Err(Error::InvalidBasis(format!("generator sqrt({n}) repeated")));
            }
        }
        let gens = ns
            .iter()
            .map(|&n| {
                Arc::new(SqrtOracle {
                    n,
                    cache: Mutex::default(),
                }) as Arc<dyn RealOracle>
            })
            .collect();
        Ok(Arc::new(Self { gens }))
    }

    /// Custom generators. The caller guarantees rational independence.
    pub fn from_oracles(gens: Vec<Arc<dyn RealOracle>>) -> Arc<Self> {
        Arc::new(Self { gens })
    }

    pub fn from_descriptors(ds: &[GenDescriptor]) -> Result<Arc<Self>> {
        let ns = ds
            .iter()
            .map(|d| match d {
                GenDescriptor::Sqrt { n } => Ok(*n),
                GenDescriptor::Custom { name } => Err(Error::InvalidBasis(format!(
                    "custom generator {name:?} cannot be rebuilt from its descriptor"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::sqrt(&ns)
    }

    pub fn dim(&self) -> usize {
        self.gens.len()
    }

    pub fn descriptors(&self) -> Vec<GenDescriptor> {
        self.gens.iter().map(|g| g.descriptor()).collect()
    }

    pub fn same_as(&self, other: &EmbeddingBasis) -> bool {
        std::ptr::eq(self, other) || self.descriptors() == other.descriptors()
    }

    /// Sign of `sum coords[i] * gen[i]`.
    pub fn sign(&self, coords: &[Q]) -> Result<Ordering> {
        if coords.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: coords.len(),
            });
        }
        if coords.iter().all(Zero::is_zero) {
            return Ok(Ordering::Equal);
        }
        let l = lcm_denoms(coords);
        let ints: Vec<BigInt> = coords.iter().map(|c| (c * &l).to_integer()).collect();
        for bits in 1..=REFINEMENT_CAP {
            let mut lo = BigInt::zero();
            let mut hi = BigInt::zero();
            for (i, (p, g)) in ints.iter().zip(&self.gens).enumerate() {
                if p.is_zero() {
                    continue;
                }
                let k = g
                    .enclose(bits)
                    .map_err(|reason| Error::Oracle { index: i, reason })?;
                let k1 = &k + 1;
                if p.is_positive() {
                    lo += p * &k;
                    hi += p * &k1;
                } else {
                    lo += p * &k1;
                    hi += p * &k;
                }
            }
            if lo.is_positive() {
                return Ok(Ordering::Greater);
            }
            if hi.is_negative() {
                return Ok(Ordering::Less);
            }
        }
        Err(Error::RefinementCap(REFINEMENT_CAP))
    }

    /// Floating-point approximation, for display only.
    pub fn approx(&self, coords: &[Q]) -> f64 {
        use num_traits::ToPrimitive;
        self.gens
            .iter()
            .zip(coords)
            .map(|(g, c)| {
                let k = g.enclose(52).unwrap_or_default();
                c.to_f64().unwrap_or(f64::NAN) * k.to_f64().unwrap_or(f64::NAN) / 2f64.powi(52)
            })
            .sum()
    }
}

/// An element of the value group: rational coordinates against a basis.
#[derive(Clone)]
pub struct Value {
    basis: Arc<EmbeddingBasis>,
    coords: Vec<Q>,
}

impl fmt::Debug for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cs: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "Value({})", cs.join(", "))
    }
}

impl PartialEq for Value {
    fn eq(&self, other: &Self) -> bool {
        self.basis.same_as(&other.basis) && self.coords == other.coords
    }
}

impl Eq for Value {}

impl Value {
    pub fn new(basis: Arc<EmbeddingBasis>, coords: Vec<Q>) -> Result<Self> {
        if coords.len() != basis.dim() {
            return Err(Error::DimensionMismatch {
                expected: basis.dim(),
                found: coords.len(),
            });
        }
        Ok(Self { basis, coords })
    }

    pub fn zero(basis: &Arc<EmbeddingBasis>) -> Self {
        Self {
            basis: basis.clone(),
            coords: vec![Q::zero(); basis.dim()],
        }
    }

    /// The `i`-th generator itself.
    pub fn generator(basis: &Arc<EmbeddingBasis>, i: usize) -> Self {
        let mut v = Self::zero(basis);
        v.coords[i] = Q::one();
        v
    }

    pub fn basis(&self) -> &Arc<EmbeddingBasis> {
        &self.basis
    }

    pub fn coords(&self) -> &[Q] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn sign(&self) -> Result<Ordering> {
        self.basis.sign(&self.coords)
    }

    pub fn is_positive(&self) -> Result<bool> {
        Ok(self.sign()? == Ordering::Greater)
    }

    pub fn scale(&self, k: &Q) -> Self {
        Self {
            basis: self.basis.clone(),
            coords: self.coords.iter().map(|c| c * k).collect(),
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        if !self.basis.same_as(&other.basis) {
            return Err(Error::BasisMismatch);
        }
        Ok(Self {
            basis: self.basis.clone(),
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&-other)
    }

    pub fn approx(&self) -> f64 {
        self.basis.approx(&self.coords)
    }
}

impl Add for &Value {
    type Output = Value;
    fn add(self, rhs: &Value) -> Value {
        self.try_add(rhs).expect("values from different bases")
    }
}

impl Sub for &Value {
    type Output = Value;
    fn sub(self, rhs: &Value) -> Value {
        self.try_sub(rhs).expect("values from different bases")
    }
}

impl Neg for &Value {
    type Output = Value;
    fn neg(self) -> Value {
        Value {
            basis: self.basis.clone(),
            coords: self.coords.iter().map(|c| -c).collect(),
        }
    }
}

pub fn cmp(a: &Value, b: &Value) -> Result<Ordering> {
    if !a.basis.same_as(&b.basis) {
        return Err(Error::BasisMismatch);
    }
    if a.coords == b.coords {
        return Ok(Ordering::Equal);
    }
    a.try_sub(b)?.sign()
}

/// Integer combination `sum k_i v_i`; all values must share `basis`.
pub fn combine(basis: &Arc<EmbeddingBasis>, ks: &[i64], vs: &[Value]) -> Result<Value> {
    combine_q(
        basis,
        &ks.iter().map(|&k| crate::num::q(k)).collect::<Vec<_>>(),
        vs,
    )
}

pub fn combine_q(basis: &Arc<EmbeddingBasis>, ks: &[Q], vs: &[Value]) -> Result<Value> {
    if ks.len() != vs.len() {
        return Err(Error::DimensionMismatch {
            expected: vs.len(),
            found: ks.len(),
        });
    }
    let mut acc = Value::zero(basis);
    for (k, v) in ks.iter().zip(vs) {
        if !k.is_zero() {
            acc = acc.try_add(&v.scale(k))?;
        }
    }
    Ok(acc)
}

pub fn is_rationally_independent(vs: &[Value]) -> Result<bool> {
    let Some(first) = vs.first() else {
        return Ok(true);
    };
    if vs.iter().any(|v| !v.basis.same_as(&first.basis)) {
        return Err(Error::BasisMismatch);
    }
    let rows: Vec<Vec<Q>> = vs.iter().map(|v| v.coords.clone()).collect();
    Ok(crate::linalg::rank(&rows) == vs.len())
}

/// A composite group `Γ = Γ_1 ⊕ … ⊕ Γ_β`, highest level first, ordered lexicographically.
#[derive(Debug, Clone)]
pub struct CompositeGroup {
    pub levels: Vec<Arc<EmbeddingBasis>>,
}

/// Element of a composite group stored level-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeValue {
    pub parts: Vec<Value>,
}

/// An isolated subgroup: the values whose top `vanishing` levels are zero.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IsolatedSubgroup {
    pub vanishing: usize,
    pub rational_rank: usize,
}

impl CompositeGroup {
    pub fn new(levels: Vec<Arc<EmbeddingBasis>>) -> Self {
        Self { levels }
    }

    pub fn rank(&self) -> usize {
        self.levels.len()
    }

    pub fn rational_rank(&self) -> usize {
        self.levels.iter().map(|b| b.dim()).sum()
    }

    pub fn value(&self, parts: Vec<Vec<Q>>) -> Result<CompositeValue> {
        if parts.len() != self.rank() {
            return Err(Error::DimensionMismatch {
                expected: self.rank(),
                found: parts.len(),
            });
        }
        let parts = self
            .levels
            .iter()
            .zip(parts)
            .map(|(b, c)| Value::new(b.clone(), c))
            .collect::<Result<_>>()?;
        Ok(CompositeValue { parts })
    }

    /// The chain `0 = Γ_β ⊂ … ⊂ Γ_0 = Γ`, smallest first.
    pub fn isolated_subgroups(&self) -> Vec<IsolatedSubgroup> {
        (0..=self.rank())
            .rev()
            .map(|k| IsolatedSubgroup {
                vanishing: k,
                rational_rank: self.levels[k..].iter().map(|b| b.dim()).sum(),
            })
            .collect()
    }
}

pub fn isolated_subgroups(g: &CompositeGroup) -> Vec<IsolatedSubgroup> {
    g.isolated_subgroups()
}

impl CompositeValue {
    pub fn rank(&self) -> usize {
        self.parts.len()
    }

    pub fn cmp(&self, other: &Self) -> Result<Ordering> {
        if self.parts.len() != other.parts.len() {
            return Err(Error::BasisMismatch);
        }
        for (a, b) in self.parts.iter().zip(&other.parts) {
            match cmp(a, b)? {
                Ordering::Equal => continue,
                o => return Ok(o),
            }
        }
        Ok(Ordering::Equal)
    }
}

/// Image of `v` in `Γ / Γ_level`: the top `level` parts.
pub fn composite_project(v: &CompositeValue, level: usize) -> Result<CompositeValue> {
    if level > v.rank() {
        return Err(Error::InvalidLevel {
            level,
            rank: v.rank(),
        });
    }
    Ok(CompositeValue {
        parts: v.parts[..level].to_vec(),
    })
}

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::{fmt_q, parse_q, q_pow, Q};

pub type SymMono = BTreeMap<String, i64>;

fn mono_mul(a: &SymMono, b: &SymMono) -> SymMono {
    let mut out = a.clone();
    for (s, e) in b {
        let v = out.entry(s.clone()).or_insert(0);
        *v += e;
        if *v == 0 {
            out.remove(s);
        }
    }
    out
}

fn mono_fmt(m: &SymMono) -> String {
    m.iter()
        .map(|(s, &e)| {
            if e == 1 {
                s.clone()
            } else {
                format!("{s}^{e}")
            }
        })
        .collect::<Vec<_>>()
        .join("*")
}

/// A formal unit: nonzero rational scalar times a product of unit symbols
/// with integer exponents, e.g. `3 * phi1 * phi2^-1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UnitExpr {
    pub scalar: Q,
    pub syms: SymMono,
}

impl Default for UnitExpr {
    fn default() -> Self {
        Self::one()
    }
}

impl UnitExpr {
    pub fn one() -> Self {
        Self {
            scalar: Q::one(),
            syms: SymMono::new(),
        }
    }

    pub fn scalar(c: Q) -> Result<Self> {
        if c.is_zero() {
            return Err(Error::Precondition("a unit scalar must be nonzero".into()));
        }
        Ok(Self {
            scalar: c,
            syms: SymMono::new(),
        })
    }

    pub fn symbol(name: &str) -> Self {
        Self {
            scalar: Q::one(),
            syms: [(name.to_string(), 1)].into(),
        }
    }

    pub fn is_one(&self) -> bool {
        self.scalar.is_one() && self.syms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.syms.is_empty()
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self {
            scalar: &self.scalar * &o.scalar,
            syms: mono_mul(&self.syms, &o.syms),
        }
    }

    pub fn pow(&self, e: i64) -> Self {
        Self {
            scalar: q_pow(&self.scalar, e),
            syms: self
                .syms
                .iter()
                .filter(|_| e != 0)
                .map(|(s, x)| (s.clone(), x * e))
                .collect(),
        }
    }

    pub fn inv(&self) -> Self {
        self.pow(-1)
    }

    /// `prod us[i]^es[i]`.
    pub fn product(us: &[UnitExpr], es: &[i64]) -> Self {
        us.iter()
            .zip(es)
            .fold(Self::one(), |acc, (u, &e)| acc.mul(&u.pow(e)))
    }

    pub fn to_sym(&self) -> SymCoeff {
        SymCoeff(
            [(self.syms.clone(), self.scalar.clone())]
                .into_iter()
                .collect(),
        )
    }
}

impl fmt::Display for UnitExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.syms.is_empty() {
            write!(f, "{}", self.scalar)
        } else if self.scalar.is_one() {
            write!(f, "{}", mono_fmt(&self.syms))
        } else {
            write!(f, "{}*{}", self.scalar, mono_fmt(&self.syms))
        }
    }
}

#[derive(Serialize, Deserialize)]
struct UnitJson {
    #[serde(default = "one_str")]
    scalar: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    syms: SymMono,
}

fn one_str() -> String {
    "1".into()
}

impl Serialize for UnitExpr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        UnitJson {
            scalar: fmt_q(&self.scalar),
            syms: self.syms.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for UnitExpr {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = UnitJson::deserialize(d)?;
        let scalar = parse_q(&j.scalar).map_err(serde::de::Error::custom)?;
        if scalar.is_zero() {
            return Err(serde::de::Error::custom("unit scalar must be nonzero"));
        }
        Ok(Self {
            scalar,
            syms: j.syms.into_iter().filter(|(_, e)| *e != 0).collect(),
        })
    }
}

/// Laurent polynomial over Q in unit symbols; the coefficient ring of
/// substituted expressions.
#[derive(Debug, Clone, PartialEq, Eq, Default, PartialOrd, Ord)]
pub struct SymCoeff(pub BTreeMap<SymMono, Q>);

impl SymCoeff {
    pub fn from_q(c: Q) -> Self {
        let mut m = BTreeMap::new();
        if !c.is_zero() {
            m.insert(SymMono::new(), c);
        }
        Self(m)
    }

    pub fn as_scalar(&self) -> Option<Q> {
        match self.0.len() {
            0 => Some(Q::zero()),
            1 => self.0.get(&SymMono::new()).cloned(),
            _ => None,
        }
    }

    pub fn as_unit(&self) -> Option<UnitExpr> {
        if self.0.len() != 1 {
            return None;
        }
        let (m, c) = self.0.iter().next()?;
        Some(UnitExpr {
            scalar: c.clone(),
            syms: m.clone(),
        })
    }

    pub fn mul_unit(&self, u: &UnitExpr) -> Self {
        Self(
            self.0
                .iter()
                .map(|(m, c)| (mono_mul(m, &u.syms), c * &u.scalar))
                .collect(),
        )
    }
}

impl fmt::Display for SymCoeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        if self.0.len() == 1 {
            let (m, c) = self.0.iter().next().expect("one term");
            return match (m.is_empty(), c.is_one()) {
                (true, _) => write!(f, "{c}"),
                (false, true) => write!(f, "{}", mono_fmt(m)),
                (false, false) => write!(f, "{c}*{}", mono_fmt(m)),
            };
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(m, c)| {
                if m.is_empty() {
                    c.to_string()
                } else if c.is_one() {
                    mono_fmt(m)
                } else {
                    format!("{c}*{}", mono_fmt(m))
                }
            })
            .collect();
        write!(f, "({})", parts.join(" + "))
    }
}

impl super::Coefficient for SymCoeff {
    fn zero() -> Self {
        Self::default()
    }
    fn one() -> Self {
        Self::from_q(<Q as One>::one())
    }
    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }
    fn add(&self, o: &Self) -> Self {
        let mut out = self.0.clone();
        for (m, c) in &o.0 {
            let v = out.entry(m.clone()).or_insert_with(<Q as Zero>::zero);
            *v += c;
            if Zero::is_zero(v) {
                out.remove(m);
            }
        }
        Self(out)
    }
    fn neg(&self) -> Self {
        Self(self.0.iter().map(|(m, c)| (m.clone(), -c)).collect())
    }
    fn mul(&self, o: &Self) -> Self {
        let mut acc = Self::default();
        for (m1, c1) in &self.0 {
            let part = Self(
                o.0.iter()
                    .map(|(m2, c2)| (mono_mul(m1, m2), c1 * c2))
                    .collect(),
            );
            acc = acc.add(&part);
        }
        acc
    }
    fn scale(&self, k: &Q) -> Self {
        if Zero::is_zero(k) {
            return Self::default();
        }
        Self(self.0.iter().map(|(m, c)| (m.clone(), c * k)).collect())
    }
    fn from_q(c: Q) -> Self {
        SymCoeff::from_q(c)
    }
    fn constant_part(&self) -> Q {
        self.0
            .get(&SymMono::new())
            .cloned()
            .unwrap_or_else(<Q as Zero>::zero)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{q, qf};
    use crate::series::Coefficient;

    #[test]
    fn unit_arithmetic() {
        let phi = UnitExpr::symbol("phi1");
        let u = UnitExpr::scalar(q(3)).unwrap().mul(&phi);
        assert_eq!(u.to_string(), "3*phi1");
        assert_eq!(u.inv().to_string(), "1/3*phi1^-1");
        assert!(u.mul(&u.inv()).is_one());
        assert!(UnitExpr::scalar(q(0)).is_err());
    }

    #[test]
    fn unit_json() {
        let u: UnitExpr = serde_json::from_str(r#"{"scalar":"2/3","syms":{"phi1":-2}}"#).unwrap();
        assert_eq!(u.scalar, qf(2, 3));
        assert_eq!(
            serde_json::to_string(&u).unwrap(),
            r#"{"scalar":"2/3","syms":{"phi1":-2}}"#
        );
        assert!(serde_json::from_str::<UnitExpr>(r#"{"scalar":"0"}"#).is_err());
    }

    #[test]
    fn laurent_cancellation() {
        let a = UnitExpr::symbol("c").to_sym();
        let b = UnitExpr::symbol("c").inv().to_sym();
        assert_eq!(a.mul(&b), SymCoeff::one());
        assert!(a.add(&a.neg()).is_zero());
    }
}

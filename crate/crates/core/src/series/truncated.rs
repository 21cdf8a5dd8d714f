use super::{Coefficient, Monomial, Poly};
use crate::error::{Error, Result};
use crate::num::Q;

/// A power series known modulo the monomials of total degree `>= trunc`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSeries<K = Q> {
    poly: Poly<K>,
    trunc: u32,
}

impl<K: Coefficient> TruncatedSeries<K> {
    pub fn new(poly: Poly<K>, trunc: u32) -> Self {
        Self {
            poly: poly.truncate(Some(trunc.into())),
            trunc,
        }
    }

    /// An exact polynomial, viewed with a truncation just above its degree.
    pub fn exact(poly: Poly<K>) -> Self {
        let trunc = u32::try_from(poly.degree() + 1).unwrap_or(u32::MAX);
        Self { poly, trunc }
    }

    pub fn poly(&self) -> &Poly<K> {
        &self.poly
    }

    pub fn trunc(&self) -> u32 {
        self.trunc
    }

    pub fn nvars(&self) -> usize {
        self.poly.nvars()
    }

    fn t(&self, o: &Self) -> u32 {
        self.trunc.min(o.trunc)
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        Ok(Self::new(self.poly.add(&o.poly)?, self.t(o)))
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        Ok(Self::new(self.poly.sub(&o.poly)?, self.t(o)))
    }

    pub fn neg(&self) -> Self {
        Self {
            poly: self.poly.neg(),
            trunc: self.trunc,
        }
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        let t = self.t(o);
        Ok(Self {
            poly: self.poly.mul_below(&o.poly, Some(t.into()))?,
            trunc: t,
        })
    }

    pub fn pow(&self, e: u32) -> Result<Self> {
        Ok(Self {
            poly: self.poly.pow_below(e, Some(self.trunc.into()))?,
            trunc: self.trunc,
        })
    }

    /// `f / x^d`, known modulo degree `trunc - |d|`.
    pub fn div_monomial(&self, d: &Monomial) -> Result<Self> {
        let q = self.poly.div_monomial(d).ok_or_else(|| {
            Error::Precondition(format!("series not divisible by monomial {:?}", d.0))
        })?;
        let dd = u32::try_from(d.degree()).unwrap_or(u32::MAX);
        Ok(Self::new(q, self.trunc.saturating_sub(dd)))
    }

    /// `x^d · f`, known modulo degree `trunc + |d|`.
    pub fn mul_monomial(&self, d: &Monomial) -> Result<Self> {
        let dd = u32::try_from(d.degree()).map_err(|_| Error::ExponentOverflow)?;
        Ok(Self {
            poly: self.poly.mul_monomial(d)?,
            trunc: self.trunc.checked_add(dd).ok_or(Error::ExponentOverflow)?,
        })
    }

    /// Type-I substitution of the leading variable block. Each variable maps to a
    /// monomial of positive degree, so the truncation ideal maps into itself.
    pub fn monomial_map(&self, e: &[Vec<i64>]) -> Result<Self> {
        Ok(Self {
            poly: self.poly.monomial_map(e, Some(self.trunc.into()))?,
            trunc: self.trunc,
        })
    }
}

impl TruncatedSeries<Q> {
    /// Multiplicative inverse of a unit series.
    pub fn inverse(&self) -> Result<Self> {
        let c = self.poly.constant_term();
        if num_traits::Zero::is_zero(&c) {
            return Err(Error::Precondition("series is not a unit".into()));
        }
        let n = self.nvars();
        let cinv = c.recip();
        // u = c (1 + t)  =>  u^-1 = c^-1 sum (-t)^k
        let t = self.poly.scale(&cinv).sub(&Poly::one(n))?;
        let neg_t = t.neg();
        let mut acc = Poly::one(n);
        let mut pw = Poly::one(n);
        for _ in 1..self.trunc {
            pw = pw.mul_below(&neg_t, Some(self.trunc.into()))?;
            if pw.is_zero() {
                break;
            }
            acc = acc.add(&pw)?;
        }
        Ok(Self::new(acc.scale(&cinv), self.trunc))
    }

    /// Integer power; negative exponents invert first.
    pub fn powi(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        let k = u32::try_from(e.unsigned_abs()).map_err(|_| Error::ExponentOverflow)?;
        base.pow(k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::q;
    use crate::series::parse_poly;

    fn s(t: &str, n: usize, d: u32) -> TruncatedSeries {
        TruncatedSeries::new(parse_poly(t, n).unwrap(), d)
    }

    #[test]
    fn truncation_propagates_minimum() {
        let a = s("1 + y1", 2, 3);
        let b = s("1 + y2", 2, 5);
        let p = a.mul(&b).unwrap();
        assert_eq!(p.trunc(), 3);
        assert_eq!(p.poly(), &parse_poly("1 + y1 + y2 + y1*y2", 2).unwrap());
        assert_eq!(a.add(&b).unwrap().trunc(), 3);
    }

    #[test]
    fn inverse_of_unit() {
        let u = s("2 + y1", 1, 4);
        let inv = u.inverse().unwrap();
        let one = u.mul(&inv).unwrap();
        assert_eq!(one.poly(), &Poly::constant(1, q(1)));
        assert!(s("y1", 1, 4).inverse().is_err());
        assert_eq!(
            u.powi(-2).unwrap().mul(&u.pow(2).unwrap()).unwrap().poly(),
            &Poly::constant(1, q(1))
        );
    }

    #[test]
    fn monomial_division_lowers_truncation() {
        let f = s("y1*y2 + y1^2*y2", 2, 6);
        let u = f.div_monomial(&Monomial(vec![1, 1])).unwrap();
        assert_eq!(u.trunc(), 4);
        assert_eq!(u.poly(), &parse_poly("1 + y1", 2).unwrap());
        assert!(f.div_monomial(&Monomial(vec![2, 0])).is_err());
    }
}

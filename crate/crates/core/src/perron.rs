//! Perron transforms: the subtractive continued-fraction step, type I and
//! type II_r transforms, divisibility normalization and monomial-times-unit
//! factorization.

use std::cmp::Ordering;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intmat::{self, IMat};
use crate::num::Q;
use crate::series::{is_unit, Monomial, SubstExpr, TruncatedSeries, UnitExpr};
use crate::valuegroup::{cmp, combine, is_rationally_independent, Value};

/// Default bound on Perron steps per normalization call.
pub const DEFAULT_CAP: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StepKind {
    I,
    II { r: usize },
}

/// One transform: `x_i = prod_j x_j(1)^{a_ij}` (type I), or the type II_r
/// variant with the residue constant `c` in the last column.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformStep {
    pub kind: StepKind,
    pub a: IMat,
    pub c: Option<UnitExpr>,
}

#[derive(Serialize, Deserialize)]
struct StepJson {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    r: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    c: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    c_units: Option<crate::series::SymMono>,
    #[serde(rename = "A")]
    a: IMat,
}

impl Serialize for TransformStep {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let (kind, r) = match self.kind {
            StepKind::I => ("I", None),
            StepKind::II { r } => ("II", Some(r)),
        };
        StepJson {
            kind: kind.into(),
            r,
            c: self.c.as_ref().map(|u| u.scalar.to_string()),
            c_units: self
                .c
                .as_ref()
                .filter(|u| !u.syms.is_empty())
                .map(|u| u.syms.clone()),
            a: self.a.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for TransformStep {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = StepJson::deserialize(d)?;
        let kind = match (j.kind.as_str(), j.r) {
            ("I", None) => StepKind::I,
            ("II", Some(r)) => StepKind::II { r },
            (k, r) => {
                return Err(D::Error::custom(format!(
                    "bad step kind {k:?} with r = {r:?}"
                )))
            }
        };
        let c = match j.c {
            None => None,
            Some(s) => {
                let scalar = crate::num::parse_q(&s).map_err(D::Error::custom)?;
                if scalar.is_zero() {
                    return Err(D::Error::custom("residue constant must be nonzero"));
                }
                Some(UnitExpr {
                    scalar,
                    syms: j.c_units.unwrap_or_default(),
                })
            }
        };
        Ok(TransformStep { kind, a: j.a, c })
    }
}

impl TransformStep {
    pub fn type_i(a: IMat) -> Self {
        Self {
            kind: StepKind::I,
            a,
            c: None,
        }
    }

    pub fn type_ii(r: usize, c: UnitExpr, a: IMat) -> Self {
        Self {
            kind: StepKind::II { r },
            a,
            c: Some(c),
        }
    }

    /// Size of the block of valued variables the step acts on.
    pub fn rank(&self) -> usize {
        match self.kind {
            StepKind::I => self.a.len(),
            StepKind::II { .. } => self.a.len().saturating_sub(1),
        }
    }

    /// Upper-left block acting on the valued variables.
    pub fn top(&self) -> IMat {
        let k = self.rank();
        self.a[..k].iter().map(|r| r[..k].to_vec()).collect()
    }

    /// Shape, sign and determinant checks.
    pub fn validate(&self, rbar: usize) -> Result<()> {
        let want = match self.kind {
            StepKind::I => rbar,
            StepKind::II { r } => {
                if r == 0 {
                    return Err(Error::InvalidTransform(
                        "type II index r must be positive".into(),
                    ));
                }
                if self.c.is_none() {
                    return Err(Error::InvalidTransform(
                        "type II step without constant".into(),
                    ));
                }
                rbar + 1
            }
        };
        let (rows, cols) = intmat::shape(&self.a);
        if rows != want || cols != want {
            return Err(Error::InvalidTransform(format!(
                "matrix is {rows}x{cols}, expected {want}x{want}"
            )));
        }
        if !intmat::is_nonneg(&self.a) {
            return Err(Error::InvalidTransform("negative matrix entry".into()));
        }
        if !intmat::is_unimodular(&self.a) {
            return Err(Error::InvalidTransform(format!(
                "determinant {} is not ±1",
                intmat::det(&self.a)
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    T,
    U,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransformSeq {
    pub side: Side,
    pub steps: Vec<TransformStep>,
}

impl TransformSeq {
    pub fn new(side: Side) -> Self {
        Self {
            side,
            steps: Vec::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Product of the type I matrices, `x = x(t)^{A_1 ⋯ A_t}`.
    pub fn cumulative(&self, k: usize) -> Result<IMat> {
        let mut acc = intmat::identity(k);
        for s in &self.steps {
            if s.kind != StepKind::I {
                return Err(Error::InvalidTransform(
                    "cumulative matrix of a type II step".into(),
                ));
            }
            acc = intmat::mul(&acc, &s.a)?;
        }
        Ok(acc)
    }

    pub fn extend(&mut self, other: TransformSeq) {
        self.steps.extend(other.steps);
    }
}

/// Values of the new parameters: `ν(x) = A ν(x(1))` solved for `ν(x(1))`.
pub fn values_after(top: &IMat, vals: &[Value]) -> Result<Vec<Value>> {
    let inv = crate::linalg::inverse(&crate::linalg::from_int(top))
        .ok_or_else(|| Error::InvalidTransform("singular upper block".into()))?;
    let basis = vals
        .first()
        .map(|v| v.basis().clone())
        .ok_or(Error::DimensionMismatch {
            expected: 1,
            found: 0,
        })?;
    inv.iter()
        .map(|row| crate::valuegroup::combine_q(&basis, row, vals))
        .collect()
}

fn check_positive(vals: &[Value]) -> Result<()> {
    for (i, v) in vals.iter().enumerate() {
        if !v.is_positive()? {
            return Err(Error::NonPositive(i));
        }
    }
    Ok(())
}

/// One step: the second largest value is subtracted from the largest.
pub fn perron_step(vals: &[Value]) -> Result<(TransformStep, Vec<Value>)> {
    check_positive(vals)?;
    let n = vals.len();
    let mut order: Vec<usize> = (0..n).collect();
    let mut err = None;
    order.sort_by(|&i, &j| match cmp(&vals[i], &vals[j]) {
        Ok(Ordering::Equal) if i != j => {
            err.get_or_insert(Error::Tie(i.min(j), i.max(j)));
            Ordering::Equal
        }
        Ok(o) => o,
        Err(e) => {
            err.get_or_insert(e);
            Ordering::Equal
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    let mut e = intmat::identity(n);
    let mut out = vals.to_vec();
    if n > 1 {
        let (big, second) = (order[n - 1], order[n - 2]);
        e[big][second] = 1;
        out[big] = vals[big].try_sub(&vals[second])?;
    }
    Ok((TransformStep::type_i(e), out))
}

/// Outcome of [`make_nonnegative`].
#[derive(Debug, Clone)]
pub struct Normalized {
    pub seq: TransformSeq,
    pub vectors: Vec<Vec<i64>>,
    pub vals: Vec<Value>,
    pub cumulative: IMat,
}

/// Runs Perron steps until every exponent vector `w` (transformed as `w ↦ wE`)
/// is nonnegative. Each vector must have nonnegative value under `vals`.
pub fn make_nonnegative(
    vectors: &[Vec<i64>],
    vals: &[Value],
    side: Side,
    cap: usize,
) -> Result<Normalized> {
    let k = vals.len();
    let basis = vals.first().map(|v| v.basis().clone());
    for w in vectors {
        if w.len() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                found: w.len(),
            });
        }
        if w.iter().any(|&x| x < 0) {
            let b = basis.as_ref().expect("nonempty");
            if combine(b, w, vals)?.sign()? != Ordering::Greater {
                return Err(Error::Precondition(format!(
                    "exponent vector {w:?} has non-positive value"
                )));
            }
        }
    }
    let mut out = Normalized {
        seq: TransformSeq::new(side),
        vectors: vectors.to_vec(),
        vals: vals.to_vec(),
        cumulative: intmat::identity(k),
    };
    while out.vectors.iter().any(|w| w.iter().any(|&x| x < 0)) {
        if out.seq.steps.len() >= cap {
            return Err(Error::IterationCap {
                cap,
                partial: Box::new(out.seq),
            });
        }
        let (step, nv) = perron_step(&out.vals)?;
        out.vectors = out
            .vectors
            .iter()
            .map(|w| intmat::vec_mul(w, &step.a))
            .collect::<Result<_>>()?;
        out.cumulative = intmat::mul(&out.cumulative, &step.a)?;
        out.vals = nv;
        out.seq.steps.push(step);
    }
    Ok(out)
}

/// Type I transforms after which `x^a` divides `x^b`.
pub fn monomialize_divisibility(a: &[i64], b: &[i64], vals: &[Value]) -> Result<TransformSeq> {
    Ok(divisibility(a, b, vals, Side::T, DEFAULT_CAP)?.seq)
}

pub fn divisibility(
    a: &[i64],
    b: &[i64],
    vals: &[Value],
    side: Side,
    cap: usize,
) -> Result<Normalized> {
    if a.len() != vals.len() || b.len() != vals.len() {
        return Err(Error::DimensionMismatch {
            expected: vals.len(),
            found: a.len().min(b.len()),
        });
    }
    let diff: Vec<i64> = b.iter().zip(a).map(|(x, y)| x - y).collect();
    if diff.iter().any(|&x| x < 0) {
        let basis = vals[0].basis();
        if combine(basis, &diff, vals)?.sign()? == Ordering::Less {
            return Err(Error::Precondition(
                "value of x^a exceeds value of x^b".into(),
            ));
        }
    }
    make_nonnegative(&[diff], vals, side, cap)
}

/// `f = x^d · u` after the transforms in `seq`, with `u` a unit.
#[derive(Debug, Clone)]
pub struct Factorization {
    pub seq: TransformSeq,
    pub d: Vec<u32>,
    pub u: TruncatedSeries,
    pub vals: Vec<Value>,
    /// `f` itself after the transforms.
    pub transformed: TruncatedSeries,
}

fn first_block(m: &Monomial, k: usize) -> Vec<i64> {
    m.0[..k].iter().map(|&e| i64::from(e)).collect()
}

/// Least-value term ordered by the first `vals.len()` exponents; among equal
/// blocks a term free of the remaining variables is preferred.
fn leading_term(f: &TruncatedSeries, vals: &[Value]) -> Result<(Monomial, Value)> {
    let k = vals.len();
    let basis = vals[0].basis().clone();
    let mut best: Option<(Monomial, Value)> = None;
    for (m, _) in f.poly().terms() {
        let v = combine(&basis, &first_block(m, k), vals)?;
        let pure = m.0[k..].iter().all(|&e| e == 0);
        best = match best {
            None => Some((m.clone(), v)),
            Some((bm, bv)) => match cmp(&v, &bv)? {
                Ordering::Less => Some((m.clone(), v)),
                Ordering::Equal if pure && !bm.0[k..].iter().all(|&e| e == 0) => {
                    Some((m.clone(), v))
                }
                _ => Some((bm, bv)),
            },
        };
    }
    let (m, v) = best.ok_or(Error::AboveTruncation)?;
    if m.0[k..].iter().any(|&e| e != 0) {
        return Err(Error::Precondition(
            "least-value terms involve non-valued variables".into(),
        ));
    }
    Ok((m, v))
}

pub fn factor_monomial_unit(f: &TruncatedSeries, vals: &[Value]) -> Result<Factorization> {
    factor_monomial_unit_capped(f, vals, Side::T, DEFAULT_CAP)
}

pub fn factor_monomial_unit_capped(
    f: &TruncatedSeries,
    vals: &[Value],
    side: Side,
    cap: usize,
) -> Result<Factorization> {
    let k = vals.len();
    if k == 0 || k > f.nvars() {
        return Err(Error::DimensionMismatch {
            expected: f.nvars(),
            found: k,
        });
    }
    check_positive(vals)?;
    let (_, v0) = leading_term(f, vals)?;
    let mut floor = vals[0].clone();
    for v in &vals[1..] {
        if cmp(v, &floor)? == Ordering::Less {
            floor = v.clone();
        }
    }
    if cmp(&v0, &floor.scale(&crate::num::q(i64::from(f.trunc()))))? != Ordering::Less {
        return Err(Error::AboveTruncation);
    }
    let mut seq = TransformSeq::new(side);
    let mut cur = f.clone();
    let mut cv = vals.to_vec();
    loop {
        let (d, _) = leading_term(&cur, &cv)?;
        let db = first_block(&d, k);
        let offending = cur
            .poly()
            .terms()
            .map(|(m, _)| first_block(m, k))
            .find(|b| b.iter().zip(&db).any(|(x, y)| x < y));
        let Some(b) = offending else { break };
        let remaining = cap.saturating_sub(seq.steps.len());
        let norm = divisibility(&db, &b, &cv, side, remaining).map_err(|e| match e {
            Error::IterationCap { partial, .. } => {
                let mut p = seq.clone();
                p.extend(*partial);
                Error::IterationCap {
                    cap,
                    partial: Box::new(p),
                }
            }
            e => e,
        })?;
        let next = cur.monomial_map(&norm.cumulative)?;
        let dn = intmat::vec_mul(&db, &norm.cumulative)?;
        if dn.iter().sum::<i64>() >= i64::from(cur.trunc()) {
            return Err(Error::AboveTruncation);
        }
        cur = next;
        cv = norm.vals;
        seq.extend(norm.seq);
    }
    let (d, _) = leading_term(&cur, &cv)?;
    let u = cur.div_monomial(&d)?;
    if !is_unit(&u) {
        return Err(Error::Inconsistent(
            "cofactor of the leading monomial is not a unit".into(),
        ));
    }
    Ok(Factorization {
        seq,
        d: d.0[..k].to_vec(),
        u,
        vals: cv,
        transformed: cur,
    })
}

/// Reduction of values `vals` satisfying the primitive relation `rel · vals = 0`:
/// a nonnegative unimodular `M` with `vals = M · (w, 0)` and `w` positive.
///
/// The first columns of `M` form a basis of the lattice `{x : rel · x = 0}`,
/// made nonnegative by Perron steps on the coordinates of `vals`; the last
/// column is a nonnegative `u` with `rel · u = 1`.
pub fn reduce_dependent(vals: &[Value], rel: &[i64], cap: usize) -> Result<(IMat, Vec<Value>)> {
    check_positive(vals)?;
    let n = vals.len();
    if n < 2 || rel.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n.max(2),
            found: rel.len(),
        });
    }
    let basis = vals[0].basis().clone();
    if !combine(&basis, rel, vals)?.is_zero() {
        return Err(Error::Precondition(
            "values do not satisfy the relation".into(),
        ));
    }
    let snf = intmat::smith(&[rel.to_vec()])?;
    if snf.divisors != [1] {
        return Err(Error::Precondition(format!(
            "relation {rel:?} is not primitive"
        )));
    }
    // rel · Q = ±e_0: column 0 meets the relation, the others span its kernel
    let mut cols: IMat = (1..n)
        .map(|k| snf.q.iter().map(|row| row[k]).collect())
        .collect();
    let mut w = Vec::with_capacity(n - 1);
    for (k, col) in cols.iter_mut().enumerate() {
        let v = combine(&basis, &snf.q_inv[k + 1], vals)?;
        if v.sign()? == Ordering::Less {
            col.iter_mut().for_each(|x| *x = -*x);
            w.push(-&v);
        } else {
            w.push(v);
        }
    }
    let rows = intmat::transpose(&cols);
    let norm = make_nonnegative(&rows, &w, Side::U, cap)?;
    let sum: Vec<i64> = norm.vectors.iter().map(|r| r.iter().sum()).collect();
    let dot: i64 = rel.iter().zip(&snf.q).map(|(a, row)| a * row[0]).sum();
    let mut u: Vec<i64> = snf.q.iter().map(|row| row[0] * dot).collect();
    let mut t = 0i64;
    for (x, s) in u.iter().zip(&sum) {
        if *x < 0 {
            if *s <= 0 {
                return Err(Error::Inconsistent(
                    "reduced cone misses a coordinate".into(),
                ));
            }
            t = t.max((-x + s - 1) / s);
        }
    }
    for (x, s) in u.iter_mut().zip(&sum) {
        *x += t * s;
    }
    let m: IMat = norm
        .vectors
        .iter()
        .zip(&u)
        .map(|(r, &x)| r.iter().copied().chain([x]).collect())
        .collect();
    if !intmat::is_unimodular(&m) {
        return Err(Error::Inconsistent("reduction is not unimodular".into()));
    }
    Ok((m, norm.vals))
}

/// Substitution record and new values of a type II_r step.
#[derive(Debug, Clone)]
pub struct TypeII {
    pub subst: Vec<SubstExpr>,
    pub vals: Vec<Value>,
}

/// The type II_r display: for `i ≤ r̄`, `x_i = prod_j x_j(1)^{a_ij} c^{a_{i,r̄+1}}`,
/// and `x_{r̄+r} = prod_j x_j(1)^{a_{r̄+1,j}} (x_{r̄+r}(1) + 1) c^{a_{r̄+1,r̄+1}}`.
/// `m` is the total number of parameters.
pub fn apply_type_ii(vals: &[Value], m: usize, r: usize, c: &Q, a: &IMat) -> Result<TypeII> {
    let rbar = vals.len();
    let cu = UnitExpr::scalar(c.clone())?;
    let step = TransformStep::type_ii(r, cu.clone(), a.clone());
    step.validate(rbar)?;
    if rbar + r > m {
        return Err(Error::InvalidTransform(format!(
            "II_{r} needs {} parameters, have {m}",
            rbar + r
        )));
    }
    let mono = |row: &[i64]| -> Vec<u32> {
        let mut e = vec![0u32; m];
        for (j, &x) in row[..rbar].iter().enumerate() {
            e[j] = x as u32;
        }
        e
    };
    let mut subst: Vec<SubstExpr> = (0..m).map(|i| SubstExpr::identity(m, i)).collect();
    for i in 0..rbar {
        subst[i] = SubstExpr {
            monomial: mono(&a[i]),
            unit: cu.pow(a[i][rbar]),
            shift: None,
        };
    }
    subst[rbar + r - 1] = SubstExpr {
        monomial: mono(&a[rbar]),
        unit: cu.pow(a[rbar][rbar]),
        shift: Some((rbar + r - 1, crate::num::q(1))),
    };
    let new_vals = values_after(&step.top(), vals)?;
    check_positive(&new_vals)?;
    if !is_rationally_independent(&new_vals)? {
        return Err(Error::InvalidTransform("new values are dependent".into()));
    }
    Ok(TypeII {
        subst,
        vals: new_vals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::q;
    use crate::series::{parse_poly, substitute, Poly};
    use crate::valuegroup::EmbeddingBasis;

    fn vals(ns: &[u64]) -> Vec<Value> {
        let b = EmbeddingBasis::sqrt(ns).unwrap();
        (0..ns.len()).map(|i| Value::generator(&b, i)).collect()
    }

    #[test]
    fn step_examples() {
        let v = vals(&[2, 3]);
        let (s, nv) = perron_step(&v).unwrap();
        assert_eq!(s.a, vec![vec![1, 0], vec![1, 1]]);
        assert_eq!(nv[0], v[0]);
        assert_eq!(nv[1], v[1].try_sub(&v[0]).unwrap());

        let one = vals(&[2]);
        let (s, nv) = perron_step(&one).unwrap();
        assert_eq!(s.a, vec![vec![1]]);
        assert_eq!(nv, one);

        let rev = vec![v[1].clone(), v[0].clone()];
        let (s, nv) = perron_step(&rev).unwrap();
        assert_eq!(s.a, vec![vec![1, 1], vec![0, 1]]);
        assert_eq!(nv[0], v[1].try_sub(&v[0]).unwrap());
    }

    #[test]
    fn step_in_three_dimensions() {
        let v = vals(&[2, 3, 5]);
        let (s, nv) = perron_step(&v).unwrap();
        assert_eq!(s.a, vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 1, 1]]);
        assert_eq!(nv[2], v[2].try_sub(&v[1]).unwrap());
        assert_eq!(nv[..2], v[..2]);
    }

    #[test]
    fn dependent_values_reduce() {
        let v = vals(&[2, 3]);
        let ext = vec![v[0].clone(), v[1].clone(), v[0].try_add(&v[1]).unwrap()];
        let rel = [1, 1, -1];
        let (m, w) = reduce_dependent(&ext, &rel, 100).unwrap();
        assert!(intmat::is_nonneg(&m) && intmat::is_unimodular(&m));
        assert!(w.iter().all(|x| x.is_positive().unwrap()));
        let b = v[0].basis().clone();
        for (row, want) in m.iter().zip(&ext) {
            assert_eq!(&combine(&b, &row[..2], &w).unwrap(), want);
        }
        assert_eq!(intmat::vec_mul(&rel, &m).unwrap(), vec![0, 0, 1]);
        assert!(matches!(
            reduce_dependent(&ext, &[2, 2, -2], 100),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn step_rejects_bad_input() {
        let v = vals(&[2, 3]);
        assert!(matches!(
            perron_step(&[v[0].clone(), -&v[1]]),
            Err(Error::NonPositive(1))
        ));
        assert!(matches!(
            perron_step(&[v[0].clone(), v[0].clone()]),
            Err(Error::Tie(0, 1))
        ));
    }

    #[test]
    fn divisibility_examples() {
        let v = vals(&[2, 3]);
        assert!(monomialize_divisibility(&[1, 0], &[2, 0], &v)
            .unwrap()
            .is_empty());
        assert!(matches!(
            monomialize_divisibility(&[0, 1], &[1, 0], &v),
            Err(Error::Precondition(_))
        ));
        let seq = monomialize_divisibility(&[1, 0], &[0, 1], &v).unwrap();
        assert!(!seq.is_empty());
        let cum = seq.cumulative(2).unwrap();
        let a2 = intmat::vec_mul(&[1, 0], &cum).unwrap();
        let b2 = intmat::vec_mul(&[0, 1], &cum).unwrap();
        assert!(a2.iter().zip(&b2).all(|(x, y)| x <= y));
        // substitution check on x^a and x^b
        let subst: Vec<SubstExpr> = cum
            .iter()
            .map(|row| SubstExpr {
                monomial: row.iter().map(|&x| x as u32).collect(),
                unit: UnitExpr::one(),
                shift: None,
            })
            .collect();
        let xa = substitute(&parse_poly("y1", 2).unwrap(), &subst).unwrap();
        let xb = substitute(&parse_poly("y2", 2).unwrap(), &subst).unwrap();
        assert_eq!(
            xa,
            Poly::term(Monomial::from_i64(&a2).unwrap(), q(1)).to_sym()
        );
        assert_eq!(
            xb,
            Poly::term(Monomial::from_i64(&b2).unwrap(), q(1)).to_sym()
        );
    }

    #[test]
    fn factor_examples() {
        let v = vals(&[2, 3]);
        let f = TruncatedSeries::new(parse_poly("y1", 3).unwrap(), 6);
        let fac = factor_monomial_unit(&f, &v).unwrap();
        assert!(fac.seq.is_empty());
        assert_eq!(fac.d, vec![1, 0]);
        assert_eq!(fac.u.poly(), &Poly::one(3));

        let f = TruncatedSeries::new(parse_poly("5*y1^2", 2).unwrap(), 6);
        let fac = factor_monomial_unit(&f, &v).unwrap();
        assert_eq!(fac.d, vec![2, 0]);
        assert_eq!(fac.u.poly(), &Poly::constant(2, q(5)));

        let f = TruncatedSeries::new(parse_poly("y1 + y2", 2).unwrap(), 6);
        let fac = factor_monomial_unit(&f, &v).unwrap();
        assert_eq!(fac.seq.steps.len(), 1);
        assert_eq!(fac.d, vec![1, 0]);
        assert_eq!(fac.u.poly(), &parse_poly("1 + y2", 2).unwrap());
        assert!(is_unit(&fac.u));
    }

    #[test]
    fn factor_rejects_impure_leading_terms() {
        let v = vals(&[2]);
        let f = TruncatedSeries::new(parse_poly("y1*y2", 2).unwrap(), 6);
        assert!(matches!(
            factor_monomial_unit(&f, &v),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn type_ii_examples() {
        let v = vals(&[2]);
        let t = apply_type_ii(&v, 2, 1, &q(1), &vec![vec![1, 0], vec![0, 1]]).unwrap();
        let f = parse_poly("y2", 2).unwrap();
        assert_eq!(
            substitute(&f, &t.subst).unwrap(),
            parse_poly("y2 + 1", 2).unwrap().to_sym()
        );

        let t = apply_type_ii(&v, 2, 1, &q(2), &vec![vec![1, 1], vec![0, 1]]).unwrap();
        let x1 = substitute(&parse_poly("y1", 2).unwrap(), &t.subst).unwrap();
        let x2 = substitute(&parse_poly("y2", 2).unwrap(), &t.subst).unwrap();
        assert_eq!(x1, parse_poly("2*y1", 2).unwrap().to_sym());
        assert_eq!(x2, parse_poly("2*y2 + 2", 2).unwrap().to_sym());
        assert_eq!(t.vals, v);

        assert!(apply_type_ii(&v, 2, 1, &q(2), &vec![vec![2, 0], vec![0, 1]]).is_err());
        assert!(apply_type_ii(&v, 2, 1, &q(0), &vec![vec![1, 0], vec![0, 1]]).is_err());
    }

    #[test]
    fn step_json_round_trip() {
        let s = TransformStep::type_ii(
            1,
            UnitExpr::scalar(crate::num::qf(3, 2)).unwrap(),
            vec![vec![1, 1], vec![0, 1]],
        );
        let j = serde_json::to_string(&s).unwrap();
        assert_eq!(j, r#"{"kind":"II","r":1,"c":"3/2","A":[[1,1],[0,1]]}"#);
        assert_eq!(serde_json::from_str::<TransformStep>(&j).unwrap(), s);
        assert!(serde_json::from_str::<TransformStep>(r#"{"kind":"II","A":[[1]]}"#).is_err());
    }
}

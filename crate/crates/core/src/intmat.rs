//! Integer matrices (row-major `Vec<Vec<i64>>`) with overflow-checked arithmetic,
//! determinants, unimodular inverses and Smith normal form.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type IMat = Vec<Vec<i64>>;

pub fn identity(n: usize) -> IMat {
    (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect()
}

pub fn shape(m: &[Vec<i64>]) -> (usize, usize) {
    (m.len(), m.first().map_or(0, |r| r.len()))
}

pub fn mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Result<IMat> {
    let (_, k) = shape(a);
    let (kb, cols) = shape(b);
    if k != kb && !a.is_empty() {
        return Err(Error::DimensionMismatch {
            expected: k,
            found: kb,
        });
    }
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    (0..k).try_fold(0i64, |acc, t| {
                        row[t]
                            .checked_mul(b[t][j])
                            .and_then(|p| acc.checked_add(p))
                            .ok_or(Error::Overflow)
                    })
                })
                .collect()
        })
        .collect()
}

/// Row vector times matrix.
pub fn vec_mul(v: &[i64], m: &[Vec<i64>]) -> Result<Vec<i64>> {
    if v.len() != m.len() {
        return Err(Error::DimensionMismatch {
            expected: m.len(),
            found: v.len(),
        });
    }
    let cols = shape(m).1;
    (0..cols)
        .map(|j| {
            v.iter().zip(m).try_fold(0i64, |acc, (x, r)| {
                x.checked_mul(r[j])
                    .and_then(|p| acc.checked_add(p))
                    .ok_or(Error::Overflow)
            })
        })
        .collect()
}

pub fn transpose(m: &[Vec<i64>]) -> IMat {
    crate::linalg::transpose(m)
}

pub fn is_nonneg(m: &[Vec<i64>]) -> bool {
    m.iter().all(|r| r.iter().all(|&x| x >= 0))
}

fn to_big(m: &[Vec<i64>]) -> Vec<Vec<BigInt>> {
    m.iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect()
}

fn from_big(m: &[Vec<BigInt>]) -> Result<IMat> {
    m.iter()
        .map(|r| {
            r.iter()
                .map(|x| x.to_i64().ok_or(Error::Overflow))
                .collect()
        })
        .collect()
}

/// Determinant by fraction-free (Bareiss) elimination.
pub fn det(m: &[Vec<i64>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a = to_big(m);
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(p) => {
                    a.swap(k, p);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

pub fn is_unimodular(m: &[Vec<i64>]) -> bool {
    let (r, c) = shape(m);
    r == c && det(m).abs().is_one()
}

/// Exact inverse of a unimodular matrix.
pub fn inverse_unimodular(m: &[Vec<i64>]) -> Result<IMat> {
    let d = det(m);
    if !d.abs().is_one() {
        return Err(Error::InvalidTransform(format!(
            "determinant {d} is not ±1"
        )));
    }
    let inv = crate::linalg::inverse(&crate::linalg::from_int(m))
        .ok_or_else(|| Error::Inconsistent("unimodular matrix not invertible".into()))?;
    inv.iter()
        .map(|r| {
            r.iter()
                .map(|x| crate::num::to_i64(x).ok_or(Error::Overflow))
                .collect()
        })
        .collect()
}

pub fn permutation(perm: &[usize]) -> IMat {
    let n = perm.len();
    let mut p = vec![vec![0; n]; n];
    for (i, &j) in perm.iter().enumerate() {
        p[i][j] = 1;
    }
    p
}

/// Smith normal form `p · c · q = d` with unimodular `p`, `q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Snf {
    pub p: IMat,
    pub q: IMat,
    pub p_inv: IMat,
    pub q_inv: IMat,
    /// Nonzero elementary divisors, each dividing the next.
    pub divisors: Vec<i64>,
}

impl Snf {
    pub fn rank(&self) -> usize {
        self.divisors.len()
    }
}

fn swap_cols(m: &mut [Vec<BigInt>], a: usize, b: usize) {
    for r in m.iter_mut() {
        r.swap(a, b);
    }
}

// row_i += f * row_j
fn add_row(m: &mut [Vec<BigInt>], i: usize, j: usize, f: &BigInt) {
    let src = m[j].clone();
    for (x, y) in m[i].iter_mut().zip(&src) {
        *x += f * y;
    }
}

fn add_col(m: &mut [Vec<BigInt>], i: usize, j: usize, f: &BigInt) {
    for r in m.iter_mut() {
        let y = r[j].clone();
        r[i] += f * y;
    }
}

pub fn smith(c: &[Vec<i64>]) -> Result<Snf> {
    let (rows, cols) = shape(c);
    let mut a = to_big(c);
    let mut p = to_big(&identity(rows));
    let mut q = to_big(&identity(cols));
    let mut divisors = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // smallest nonzero entry in the trailing block becomes the pivot
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !a[i][j].is_zero()
                    && best.map_or(true, |(bi, bj)| a[i][j].abs() < a[bi][bj].abs())
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(t, pi);
        p.swap(t, pi);
        swap_cols(&mut a, t, pj);
        swap_cols(&mut q, t, pj);
        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                if !a[i][t].is_zero() {
                    let f = -a[i][t].div_floor(&a[t][t]);
                    add_row(&mut a, i, t, &f);
                    add_row(&mut p, i, t, &f);
                    if !a[i][t].is_zero() {
                        a.swap(t, i);
                        p.swap(t, i);
                        dirty = true;
                    }
                }
            }
            for j in t + 1..cols {
                if !a[t][j].is_zero() {
                    let f = -a[t][j].div_floor(&a[t][t]);
                    add_col(&mut a, j, t, &f);
                    add_col(&mut q, j, t, &f);
                    if !a[t][j].is_zero() {
                        swap_cols(&mut a, t, j);
                        swap_cols(&mut q, t, j);
                        dirty = true;
                    }
                }
            }
            if dirty {
                continue;
            }
            // divisibility of the trailing block by the pivot
            let mut fixed = false;
            'outer: for i in t + 1..rows {
                for j in t + 1..cols {
                    if !(&a[i][j] % &a[t][t]).is_zero() {
                        add_row(&mut a, t, i, &BigInt::one());
                        add_row(&mut p, t, i, &BigInt::one());
                        fixed = true;
                        break 'outer;
                    }
                }
            }
            if !fixed {
                break;
            }
        }
        if a[t][t].is_negative() {
            for x in a[t].iter_mut() {
                *x = -x.clone();
            }
            for x in p[t].iter_mut() {
                *x = -x.clone();
            }
        }
        divisors.push(a[t][t].to_i64().ok_or(Error::Overflow)?);
        t += 1;
    }
    let p = from_big(&p)?;
    let q = from_big(&q)?;
    Ok(Snf {
        p_inv: inverse_unimodular(&p)?,
        q_inv: inverse_unimodular(&q)?,
        p,
        q,
        divisors,
    })
}

//! Dense rational linear algebra on row-major `Vec<Vec<Q>>`.

use num_traits::{One, Zero};

use crate::num::Q;

pub type QMat = Vec<Vec<Q>>;

pub fn from_int(m: &[Vec<i64>]) -> QMat {
    m.iter()
        .map(|r| r.iter().map(|&x| crate::num::q(x)).collect())
        .collect()
}

/// Reduced row echelon form; returns the matrix and its pivot columns.
pub fn rref(m: &[Vec<Q>]) -> (QMat, Vec<usize>) {
    let mut a: QMat = m.to_vec();
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        if row == rows {
            break;
        }
        let Some(p) = (row..rows).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(row, p);
        let inv = a[row][col].recip();
        for x in a[row].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows {
            if i != row && !a[i][col].is_zero() {
                let f = a[i][col].clone();
                for j in 0..cols {
                    let t = &f * &a[row][j];
                    a[i][j] -= t;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    (a, pivots)
}

pub fn rank(m: &[Vec<Q>]) -> usize {
    rref(m).1.len()
}

pub fn rank_int(m: &[Vec<i64>]) -> usize {
    rank(&from_int(m))
}

/// Basis of `{x : m x = 0}`.
pub fn nullspace(m: &[Vec<Q>], cols: usize) -> Vec<Vec<Q>> {
    let (r, piv) = rref(m);
    let free: Vec<usize> = (0..cols).filter(|c| !piv.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![Q::zero(); cols];
            x[f] = Q::one();
            for (i, &p) in piv.iter().enumerate() {
                x[p] = -r[i][f].clone();
            }
            x
        })
        .collect()
}

pub fn inverse(m: &[Vec<Q>]) -> Option<QMat> {
    let n = m.len();
    let aug: QMat = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { Q::one() } else { Q::zero() }));
            row
        })
        .collect();
    let (r, piv) = rref(&aug);
    if piv.len() < n || piv[n - 1] >= n {
        return None;
    }
    Some(r.into_iter().map(|row| row[n..].to_vec()).collect())
}

pub fn mul(a: &[Vec<Q>], b: &[Vec<Q>]) -> QMat {
    let k = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..k).fold(Q::zero(), |acc, t| acc + &row[t] * &b[t][j]))
                .collect()
        })
        .collect()
}

pub fn vec_mul(v: &[Q], m: &[Vec<Q>]) -> Vec<Q> {
    let cols = m.first().map_or(0, |r| r.len());
    (0..cols)
        .map(|j| {
            v.iter()
                .zip(m)
                .fold(Q::zero(), |acc, (x, r)| acc + x * &r[j])
        })
        .collect()
}

pub fn mat_vec(m: &[Vec<Q>], v: &[Q]) -> Vec<Q> {
    m.iter()
        .map(|r| r.iter().zip(v).fold(Q::zero(), |acc, (a, b)| acc + a * b))
        .collect()
}

/// Columns of `m` (r×s, rank r) forming an invertible r×r minor, leftmost first.
pub fn independent_columns(m: &[Vec<Q>]) -> Vec<usize> {
    rref(m).1
}

pub fn transpose<T: Clone>(m: &[Vec<T>]) -> Vec<Vec<T>> {
    let cols = m.first().map_or(0, |r| r.len());
    (0..cols)
        .map(|j| m.iter().map(|r| r[j].clone()).collect())
        .collect()
}

/// Solves `x m = b` for a full-row-rank `m`; `None` when `b` is outside the row space.
pub fn solve_left(m: &[Vec<Q>], b: &[Q]) -> Option<Vec<Q>> {
    let cols = independent_columns(m);
    if cols.len() != m.len() {
        return None;
    }
    let minor: QMat = m
        .iter()
        .map(|r| cols.iter().map(|&c| r[c].clone()).collect())
        .collect();
    let inv = inverse(&minor)?;
    let bj: Vec<Q> = cols.iter().map(|&c| b[c].clone()).collect();
    let x = vec_mul(&bj, &inv);
    (vec_mul(&x, m) == b).then_some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{q, qf};

    fn m(rows: &[&[i64]]) -> QMat {
        rows.iter()
            .map(|r| r.iter().map(|&x| q(x)).collect())
            .collect()
    }

    #[test]
    fn rank_and_nullspace() {
        let a = m(&[&[1, 1], &[2, 2]]);
        assert_eq!(rank(&a), 1);
        let ns = nullspace(&a, 2);
        assert_eq!(ns, vec![vec![q(-1), q(1)]]);
    }

    #[test]
    fn inverse_of_triangular() {
        let a = m(&[&[2, 1], &[0, 1]]);
        let inv = inverse(&a).unwrap();
        assert_eq!(inv, vec![vec![qf(1, 2), qf(-1, 2)], vec![q(0), q(1)]]);
        assert!(inverse(&m(&[&[1, 2], &[2, 4]])).is_none());
    }

    #[test]
    fn left_solve() {
        let a = m(&[&[1, 0, 1], &[0, 2, 1]]);
        let x = solve_left(&a, &[q(1), q(2), q(2)]).unwrap();
        assert_eq!(x, vec![q(1), q(1)]);
        assert!(solve_left(&a, &[q(1), q(0), q(0)]).is_none());
    }
}

//! The lattice `G = {v : vC ∈ Z^s̄}`, the semigroups
//! `H = {v ∈ Z^r̄ : vC ≥ 0}` and `I = {v ∈ G : vC ≥ 0}`, and generators of
//! `M_Λ = {v ∈ G : vC + Λ ≥ 0}` as a module over `H`.
//!
//! Since `C` has full row rank, `v ↦ vC` is injective, so every semigroup is
//! computed in image coordinates inside `Z^s̄`, where each becomes the
//! intersection of a lattice with the nonnegative orthant. Hilbert bases of such
//! intersections are the nonnegative conformally minimal lattice vectors, found
//! by a Graver basis completion.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::intmat::{self, IMat, Snf};
use crate::linalg::{self, QMat};
use crate::num::{q, Q};

/// Upper bound on the size of a Graver completion.
pub const COMPLETION_CAP: usize = 50_000;

fn check_rank(c: &IMat) -> Result<()> {
    let rbar = c.len();
    let rank = linalg::rank_int(c);
    if rank != rbar {
        return Err(Error::RankDeficient {
            expected: rbar,
            found: rank,
        });
    }
    Ok(())
}

/// `G = Φ^{-1}(Z^s̄)` for `Φ(v) = vC`.
#[derive(Debug, Clone)]
pub struct PreimageLattice {
    /// Rows generate `G`.
    pub basis: QMat,
    /// `[G : Z^r̄]`.
    pub index: u64,
    pub snf: Snf,
}

pub fn preimage_lattice(c: &IMat) -> Result<PreimageLattice> {
    check_rank(c)?;
    let snf = intmat::smith(c)?;
    // P C Q = D, so vC ∈ Z^s̄ iff (v P^{-1})_i d_i ∈ Z
    let basis = snf
        .p
        .iter()
        .zip(&snf.divisors)
        .map(|(row, &d)| row.iter().map(|&x| Q::new(x.into(), d.into())).collect())
        .collect();
    let index = snf
        .divisors
        .iter()
        .try_fold(1u64, |acc, &d| acc.checked_mul(d as u64))
        .ok_or(Error::Overflow)?;
    Ok(PreimageLattice { basis, index, snf })
}

impl PreimageLattice {
    /// Membership through the basis representation.
    pub fn contains(&self, v: &[Q]) -> bool {
        let w = linalg::vec_mul(v, &linalg::from_int(&self.snf.p_inv));
        w.iter()
            .zip(&self.snf.divisors)
            .all(|(x, &d)| (x * q(d)).is_integer())
    }

    /// One representative of each class of `G / Z^r̄`, reduced into `[0,1)^r̄`.
    pub fn coset_reps(&self) -> Vec<Vec<Q>> {
        let mut reps = vec![Vec::new()];
        for &d in &self.snf.divisors {
            reps = reps
                .into_iter()
                .flat_map(|w: Vec<Q>| {
                    (0..d).map(move |k| {
                        let mut w = w.clone();
                        w.push(Q::new(k.into(), d.into()));
                        w
                    })
                })
                .collect();
        }
        let p = linalg::from_int(&self.snf.p);
        reps.iter()
            .map(|w| {
                linalg::vec_mul(w, &p)
                    .iter()
                    .map(|x| x - x.floor())
                    .collect()
            })
            .collect()
    }
}

/// Direct test `vC ∈ Z^s̄`.
pub fn in_preimage(v: &[Q], c: &IMat) -> bool {
    linalg::vec_mul(v, &linalg::from_int(c))
        .iter()
        .all(Q::is_integer)
}

/// Does `u` conformally precede `v` (same signs, no larger magnitudes)?
fn conformal_le(u: &[i64], v: &[i64]) -> bool {
    u.iter()
        .zip(v)
        .all(|(&a, &b)| a == 0 || (a.signum() == b.signum() && a.abs() <= b.abs()))
}

fn normal_form(mut s: Vec<i64>, g: &[Vec<i64>]) -> Vec<i64> {
    loop {
        if s.iter().all(|&x| x == 0) {
            return s;
        }
        match g.iter().find(|h| conformal_le(h, &s)) {
            Some(h) => {
                for (x, y) in s.iter_mut().zip(h) {
                    *x -= y;
                }
            }
            None => return s,
        }
    }
}

/// Completion of `±gens` to a set containing the Graver basis of the lattice
/// they span.
pub fn graver_completion(gens: &[Vec<i64>], cap: usize) -> Result<Vec<Vec<i64>>> {
    let mut g: Vec<Vec<i64>> = Vec::new();
    for v in gens {
        if v.iter().any(|&x| x != 0) {
            g.push(v.clone());
            g.push(v.iter().map(|x| -x).collect());
        }
    }
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for j in 0..g.len() {
        for i in 0..j {
            pairs.push((i, j));
        }
    }
    while let Some((i, j)) = pairs.pop() {
        let s: Vec<i64> = g[i].iter().zip(&g[j]).map(|(a, b)| a + b).collect();
        let f = normal_form(s, &g);
        if f.iter().any(|&x| x != 0) {
            if g.len() >= cap {
                return Err(Error::CompletionCap(cap));
            }
            let k = g.len();
            g.push(f);
            for i in 0..k {
                pairs.push((i, k));
            }
        }
    }
    Ok(g)
}

/// Hilbert basis of `L ∩ N^s` for the lattice `L` spanned by `gens`.
pub fn orthant_hilbert_basis(gens: &[Vec<i64>]) -> Result<Vec<Vec<i64>>> {
    let g = graver_completion(gens, COMPLETION_CAP)?;
    let nonneg: BTreeSet<Vec<i64>> = g
        .into_iter()
        .filter(|v| v.iter().all(|&x| x >= 0) && v.iter().any(|&x| x > 0))
        .collect();
    let minimal = nonneg
        .iter()
        .filter(|v| {
            !nonneg
                .iter()
                .any(|u| u != *v && u.iter().zip(v.iter()).all(|(a, b)| a <= b))
        })
        .cloned()
        .collect();
    Ok(minimal)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Which {
    H,
    I,
}

/// A semigroup given by its Hilbert basis, in `v` coordinates and in image
/// coordinates `vC`.
#[derive(Debug, Clone)]
pub struct ConeSemigroup {
    pub which: Which,
    pub hilbert: Vec<Vec<Q>>,
    pub image: Vec<Vec<i64>>,
}

/// Rows spanning `Z^r̄ C` (for `H`) or its saturation `Q^r̄ C ∩ Z^s̄` (for `I`).
pub fn image_lattice(c: &IMat, which: Which) -> Result<Vec<Vec<i64>>> {
    check_rank(c)?;
    Ok(match which {
        Which::H => c.clone(),
        Which::I => {
            let snf = intmat::smith(c)?;
            snf.q_inv[..c.len()].to_vec()
        }
    })
}

/// Preimage `v` with `vC = w`.
pub fn pull_back(c: &IMat, w: &[i64]) -> Result<Vec<Q>> {
    let wq: Vec<Q> = w.iter().map(|&x| q(x)).collect();
    linalg::solve_left(&linalg::from_int(c), &wq).ok_or_else(|| Error::NotInImage(w.to_vec()))
}

pub fn hilbert_basis(c: &IMat, which: Which) -> Result<ConeSemigroup> {
    let image = orthant_hilbert_basis(&image_lattice(c, which)?)?;
    let hilbert = image
        .iter()
        .map(|w| pull_back(c, w))
        .collect::<Result<_>>()?;
    Ok(ConeSemigroup {
        which,
        hilbert,
        image,
    })
}

/// Is `w` in the integer row lattice spanned by `rows`?
pub fn in_row_lattice(rows: &[Vec<i64>], w: &[i64]) -> bool {
    let wq: Vec<Q> = w.iter().map(|&x| q(x)).collect();
    match linalg::solve_left(&linalg::from_int(rows), &wq) {
        Some(x) => x.iter().all(Q::is_integer),
        None => false,
    }
}

/// Membership in `H` for a vector given in image coordinates.
pub fn in_h_image(c: &IMat, w: &[i64]) -> bool {
    w.iter().all(|&x| x >= 0) && in_row_lattice(c, w)
}

/// Generators of `M_Λ` over `H`.
#[derive(Debug, Clone)]
pub struct ModuleGens {
    pub lambda: Vec<i64>,
    /// The `ū_i` in `v` coordinates.
    pub gens: Vec<Vec<Q>>,
    /// The `ū_i C` in image coordinates.
    pub gens_image: Vec<Vec<i64>>,
    /// Hilbert basis of `H`.
    pub over: Vec<Vec<Q>>,
    pub index: u64,
}

impl ModuleGens {
    /// Index of a generator `ū` with `vC - ūC ∈ H`, for `v` given by its image `w = vC`.
    pub fn find(&self, c: &IMat, w: &[i64]) -> Option<usize> {
        self.gens_image.iter().position(|g| {
            let d: Vec<i64> = w.iter().zip(g).map(|(a, b)| a - b).collect();
            in_h_image(c, &d)
        })
    }
}

pub fn module_generators(c: &IMat, lambda: &[i64]) -> Result<ModuleGens> {
    let s = c.first().map_or(0, Vec::len);
    if lambda.len() != s {
        return Err(Error::DimensionMismatch {
            expected: s,
            found: lambda.len(),
        });
    }
    if lambda.iter().any(|&x| x < 0) {
        return Err(Error::Precondition("Λ must be nonnegative".into()));
    }
    let g = preimage_lattice(c)?;
    let over = hilbert_basis(c, Which::H)?;
    if c.len() == s {
        // M_Λ = -Λ + N^s; generators are -Λ plus the points below no element of H
        let gens_image: Vec<Vec<i64>> = standard_points(&over.image, s)
            .into_iter()
            .map(|u| u.iter().zip(lambda).map(|(a, l)| a - l).collect())
            .collect();
        let gens = gens_image
            .iter()
            .map(|w| pull_back(c, w))
            .collect::<Result<_>>()?;
        return Ok(ModuleGens {
            lambda: lambda.to_vec(),
            gens,
            gens_image,
            over: over.hilbert,
            index: g.index,
        });
    }
    let cq = linalg::from_int(c);
    // one coset ρ + Z^r̄C of the saturation at a time: the height-1 Hilbert
    // elements of {(u, t) : u - t(Λ + ρ) ∈ Z^r̄C} generate that part over H
    let mut gens_image: BTreeSet<Vec<i64>> = BTreeSet::new();
    for rep in g.coset_reps() {
        let rho: Vec<i64> = linalg::vec_mul(&rep, &cq)
            .iter()
            .map(|x| crate::num::to_i64(x).ok_or(Error::Overflow))
            .collect::<Result<_>>()?;
        let mut homog: Vec<Vec<i64>> = c
            .iter()
            .map(|r| r.iter().copied().chain([0]).collect())
            .collect();
        homog.push(
            lambda
                .iter()
                .zip(&rho)
                .map(|(l, r)| l + r)
                .chain([1])
                .collect(),
        );
        for v in orthant_hilbert_basis(&homog)? {
            if v[s] == 1 {
                gens_image.insert(v[..s].iter().zip(lambda).map(|(u, l)| u - l).collect());
            }
        }
    }
    let gens_image: Vec<Vec<i64>> = gens_image.into_iter().collect();
    let gens = gens_image
        .iter()
        .map(|w| pull_back(c, w))
        .collect::<Result<_>>()?;
    Ok(ModuleGens {
        lambda: lambda.to_vec(),
        gens,
        gens_image,
        over: over.hilbert,
        index: g.index,
    })
}

/// Points of `N^s` lying componentwise above none of `gens`; finite when `gens`
/// contains a multiple of every unit vector.
fn standard_points(gens: &[Vec<i64>], s: usize) -> Vec<Vec<i64>> {
    let above = |u: &[i64]| gens.iter().any(|h| h.iter().zip(u).all(|(a, b)| a <= b));
    let mut out = Vec::new();
    let mut u = vec![0i64; s];
    // depth-first over coordinates; raising a coordinate never undoes domination
    fn walk(k: usize, u: &mut Vec<i64>, above: &dyn Fn(&[i64]) -> bool, out: &mut Vec<Vec<i64>>) {
        if k == u.len() {
            out.push(u.clone());
            return;
        }
        while !above(u) {
            walk(k + 1, u, above, out);
            u[k] += 1;
        }
        u[k] = 0;
    }
    walk(0, &mut u, &above, &mut out);
    out
}

/// Brute-force oracles used by the test suites.
pub mod oracle {
    use super::*;

    /// Least nonzero `|det|` over the r̄×r̄ minors of `c`.
    pub fn minor_denominator(c: &IMat) -> u64 {
        let s = c.first().map_or(0, Vec::len);
        let r = c.len();
        let mut best: Option<BigInt> = None;
        let mut cols: Vec<usize> = (0..r).collect();
        if r == 0 {
            return 1;
        }
        loop {
            let minor: IMat = c
                .iter()
                .map(|row| cols.iter().map(|&j| row[j]).collect())
                .collect();
            let d = intmat::det(&minor).abs();
            if !d.is_zero() && best.as_ref().map_or(true, |b| &d < b) {
                best = Some(d);
            }
            // next combination
            let mut i = r;
            loop {
                if i == 0 {
                    return best.map_or(1, |b| u64::try_from(b).unwrap_or(u64::MAX));
                }
                i -= 1;
                if cols[i] < s - r + i {
                    cols[i] += 1;
                    for k in i + 1..r {
                        cols[k] = cols[k - 1] + 1;
                    }
                    break;
                }
            }
        }
    }

    /// Counts `v ∈ (1/N) Z^r̄ ∩ [0,1)^r̄` with `vC ∈ Z^s̄`, which equals `[G : Z^r̄]`
    /// because `G ⊆ (1/N) Z^r̄`.
    pub fn index(c: &IMat) -> u64 {
        let n = minor_denominator(c) as i64;
        let r = c.len();
        let mut count = 0;
        let mut k = vec![0i64; r];
        loop {
            let ok = (0..c[0].len())
                .all(|j| (0..r).map(|i| k[i] * c[i][j]).sum::<i64>().rem_euclid(n) == 0);
            if ok {
                count += 1;
            }
            let mut i = 0;
            loop {
                if i == r {
                    return count;
                }
                k[i] += 1;
                if k[i] < n {
                    break;
                }
                k[i] = 0;
                i += 1;
            }
        }
    }

    fn box_points(s: usize, hi: i64) -> Vec<Vec<i64>> {
        let mut out = vec![Vec::new()];
        for _ in 0..s {
            out = out
                .into_iter()
                .flat_map(|p: Vec<i64>| {
                    (0..=hi).map(move |x| {
                        let mut p = p.clone();
                        p.push(x);
                        p
                    })
                })
                .collect();
        }
        out
    }

    /// Irreducible elements of the semigroup inside `[0, hi]^s̄` (image coordinates).
    pub fn hilbert_in_box(c: &IMat, which: Which, hi: i64) -> BTreeSet<Vec<i64>> {
        let s = c[0].len();
        let cq = linalg::from_int(c);
        let member = |w: &Vec<i64>| {
            let wq: Vec<Q> = w.iter().map(|&x| q(x)).collect();
            match linalg::solve_left(&cq, &wq) {
                None => false,
                Some(v) => match which {
                    Which::H => v.iter().all(Q::is_integer),
                    Which::I => true,
                },
            }
        };
        let pts: Vec<Vec<i64>> = box_points(s, hi)
            .into_iter()
            .filter(|w| w.iter().any(|&x| x > 0) && member(w))
            .collect();
        let set: BTreeSet<Vec<i64>> = pts.iter().cloned().collect();
        pts.iter()
            .filter(|w| {
                !set.iter()
                    .any(|u| u != *w && u.iter().zip(w.iter()).all(|(a, b)| a <= b))
            })
            .cloned()
            .collect()
    }

    /// Points of `M_Λ` with every coordinate in `[-bound, bound]`.
    pub fn module_points(c: &IMat, lambda: &[i64], bound: i64) -> Result<Vec<Vec<Q>>> {
        let g = preimage_lattice(c)?;
        let r = c.len();
        let cq = linalg::from_int(c);
        let mut out = Vec::new();
        for rep in g.coset_reps() {
            let mut k = vec![-bound; r];
            'grid: loop {
                let v: Vec<Q> = rep.iter().zip(&k).map(|(a, &b)| a + q(b)).collect();
                if v.iter().all(|x| x <= &q(bound)) {
                    let w = linalg::vec_mul(&v, &cq);
                    if w.iter().zip(lambda).all(|(x, &l)| x + q(l) >= Q::zero()) {
                        out.push(v);
                    }
                }
                let mut i = 0;
                loop {
                    if i == r {
                        break 'grid;
                    }
                    k[i] += 1;
                    if k[i] <= bound {
                        break;
                    }
                    k[i] = -bound;
                    i += 1;
                }
            }
        }
        Ok(out)
    }

    /// `v - ū ∈ H` for some generator.
    pub fn covered(c: &IMat, gens: &ModuleGens, v: &[Q]) -> bool {
        let cq = linalg::from_int(c);
        gens.gens.iter().any(|u| {
            let d: Vec<Q> = v.iter().zip(u).map(|(a, b)| a - b).collect();
            d.iter().all(Q::is_integer) && linalg::vec_mul(&d, &cq).iter().all(|x| !x.is_negative())
        })
    }
}

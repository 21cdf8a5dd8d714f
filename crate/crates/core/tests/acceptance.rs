//! Acceptance suite. Runs without the libtest harness and prints one PASS/FAIL
//! line per criterion; exits nonzero if any criterion fails.

use std::path::PathBuf;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use monoform::certify::{bookkeeping, chain_images, check_certificate, Certificate, Status};
use monoform::cosets::{decompose, kernel_derivation_vector, min_value_class};
use monoform::cuts::{
    lift_type_i, lift_type_ii, run_monomialization, verify_lift, CutsState, PendingRow,
    SolveOptions,
};
use monoform::error::Error;
use monoform::intmat::{self, IMat};
use monoform::lattice::{self, hilbert_basis, module_generators, preimage_lattice, Which};
use monoform::linalg;
use monoform::num::{q, qf, Q};
use monoform::perron::{self, perron_step, reduce_dependent, DEFAULT_CAP};
use monoform::problem::{CompositeDecl, ExtensionProblem, RawRow};
use monoform::series::{
    compose, derivation_apply, gauss_value, GaussValue, Monomial, Poly, SymCoeff, UnitExpr,
};
use monoform::valuegroup::{
    combine, is_rationally_independent, EmbeddingBasis, GenDescriptor, Value,
};

type Outcome = Result<String, String>;

fn rng(tag: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x6d6f_6e6f ^ tag)
}

fn basis235() -> Arc<EmbeddingBasis> {
    EmbeddingBasis::sqrt(&[2, 3, 5]).unwrap()
}

/// `k` positive, rationally independent values with small integer coordinates.
fn random_values(r: &mut ChaCha8Rng, basis: &Arc<EmbeddingBasis>, k: usize) -> Vec<Value> {
    loop {
        let vs: Vec<Value> = (0..k)
            .map(|_| {
                let coords = (0..basis.dim()).map(|_| q(r.gen_range(-2..=3))).collect();
                Value::new(basis.clone(), coords).unwrap()
            })
            .collect();
        if vs.iter().all(|v| v.is_positive().unwrap()) && is_rationally_independent(&vs).unwrap() {
            return vs;
        }
    }
}

fn random_poly(r: &mut ChaCha8Rng, nvars: usize, max_deg: u32) -> Poly {
    loop {
        let mut p = Poly::zero(nvars);
        for _ in 0..r.gen_range(1..=4) {
            let mut e = vec![0u32; nvars];
            for _ in 0..r.gen_range(0..=max_deg) {
                e[r.gen_range(0..nvars)] += 1;
            }
            let num = *[-5, -3, -2, -1, 1, 2, 3, 4].choose(r).unwrap();
            p.add_term(Monomial(e), qf(num, r.gen_range(1..=4)));
        }
        if !p.is_zero() {
            return p;
        }
    }
}

fn random_full_rank(r: &mut ChaCha8Rng, rows: usize, cols: usize, hi: i64) -> IMat {
    loop {
        let c: IMat = (0..rows)
            .map(|_| (0..cols).map(|_| r.gen_range(0..=hi)).collect())
            .collect();
        if linalg::rank_int(&c) == rows {
            return c;
        }
    }
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let out = f();
    let el = start.elapsed();
    match (out, limit) {
        (Ok(d), Some(l)) if el > l => Err(format!("{d}; took {el:.2?}, limit {l:?}")),
        (Ok(d), _) => Ok(format!("{d} in {el:.2?}")),
        (Err(e), _) => Err(e),
    }
}

fn gauss_multiplicativity() -> Outcome {
    let mut r = rng(1);
    let b = basis235();
    let gens: Vec<Value> = (0..3).map(|i| Value::generator(&b, i)).collect();
    for t in 0..200 {
        let k = r.gen_range(1..=3);
        let f = random_poly(&mut r, k, 6);
        let g = random_poly(&mut r, k, 6);
        let vals = &gens[..k];
        let fg = f.mul(&g).map_err(|e| e.to_string())?;
        let lhs = gauss_value(&fg, vals).map_err(|e| e.to_string())?;
        let (GaussValue::Finite(a), GaussValue::Finite(c)) = (
            gauss_value(&f, vals).unwrap(),
            gauss_value(&g, vals).unwrap(),
        ) else {
            return Err(format!("pair {t}: nonzero polynomial without finite value"));
        };
        if lhs != GaussValue::Finite(a.try_add(&c).unwrap()) {
            return Err(format!("pair {t}: value of ({f})({g}) is not additive"));
        }
    }
    Ok("200 pairs".into())
}

fn coord_rank(vals: &[Value]) -> usize {
    linalg::rank(&vals.iter().map(|v| v.coords().to_vec()).collect::<Vec<_>>())
}

fn perron_suite() -> Outcome {
    let mut r = rng(2);
    let b = basis235();
    let mut steps = 0;
    for t in 0..500 {
        let k = r.gen_range(1..=3);
        let mut vals = random_values(&mut r, &b, k);
        let rank = coord_rank(&vals);
        for _ in 0..r.gen_range(1..=6) {
            let (step, nv) = perron_step(&vals).map_err(|e| format!("vector {t}: {e}"))?;
            if !intmat::is_unimodular(&step.a) || !intmat::is_nonneg(&step.a) {
                return Err(format!("vector {t}: illegal matrix {:?}", step.a));
            }
            if !nv.iter().all(|v| v.is_positive().unwrap()) {
                return Err(format!("vector {t}: non-positive value after a step"));
            }
            if coord_rank(&nv) != rank {
                return Err(format!("vector {t}: coordinate rank changed"));
            }
            if perron::values_after(&step.a, &vals).unwrap() != nv {
                return Err(format!(
                    "vector {t}: reported values disagree with the matrix"
                ));
            }
            vals = nv;
            steps += 1;
        }
    }
    Ok(format!("500 vectors, {steps} steps"))
}

fn sym_monomial(e: &[i64]) -> Poly<SymCoeff> {
    Poly::term(
        Monomial(e.iter().map(|&x| x as u32).collect()),
        SymCoeff::from_q(q(1)),
    )
}

fn divisibility_suite() -> Outcome {
    let mut r = rng(3);
    let b = basis235();
    let mut done = [0usize; 2];
    let mut total_steps = 0;
    while done.iter().sum::<usize>() < 200 {
        let k = if done[0] < 100 { 2 } else { 3 };
        let vals = random_values(&mut r, &b, k);
        let a: Vec<i64> = (0..k).map(|_| r.gen_range(0..=5)).collect();
        let bb: Vec<i64> = (0..k).map(|_| r.gen_range(0..=5)).collect();
        let diff: Vec<i64> = bb.iter().zip(&a).map(|(x, y)| x - y).collect();
        if combine(&b, &diff, &vals).unwrap().sign().unwrap().is_lt() {
            continue;
        }
        let norm = perron::divisibility(&a, &bb, &vals, perron::Side::T, DEFAULT_CAP)
            .map_err(|e| format!("{a:?} | {bb:?}: {e}"))?;
        let a1 = intmat::vec_mul(&a, &norm.cumulative).unwrap();
        let b1 = intmat::vec_mul(&bb, &norm.cumulative).unwrap();
        if a1.iter().zip(&b1).any(|(x, y)| x > y) {
            return Err(format!("{a:?} | {bb:?}: {a1:?} does not divide {b1:?}"));
        }
        let images = chain_images(&norm.seq.steps, k, k).unwrap();
        for (old, new) in [(&a, &a1), (&bb, &b1)] {
            if compose(&sym_monomial(old), &images).unwrap() != sym_monomial(new) {
                return Err(format!(
                    "substitution of x^{old:?} does not give x(1)^{new:?}"
                ));
            }
            if combine(&b, old, &vals).unwrap() != combine(&b, new, &norm.vals).unwrap() {
                return Err(format!("value of x^{old:?} changed"));
            }
        }
        total_steps += norm.seq.steps.len();
        done[k - 2] += 1;
    }
    Ok(format!(
        "{} pairs in N², {} in N³, {total_steps} steps, 0 cap failures",
        done[0], done[1]
    ))
}

fn in_grid(c: &IMat, v: &[Q]) -> bool {
    linalg::vec_mul(v, &linalg::from_int(c))
        .iter()
        .all(Q::is_integer)
}

fn lattice_suite() -> Outcome {
    let mut r = rng(4);
    let mut cs = Vec::new();
    for _ in 0..100 {
        let rb = r.gen_range(1..=3);
        let sb = r.gen_range(rb..=3);
        let c = random_full_rank(&mut r, rb, sb, 4);
        let g = preimage_lattice(&c).map_err(|e| format!("C {c:?}: {e}"))?;
        let n = lattice::oracle::minor_denominator(&c) as i64;
        for _ in 0..200 {
            let v: Vec<Q> = (0..rb)
                .map(|_| qf(r.gen_range(-2 * n..=2 * n), n))
                .collect();
            if g.contains(&v) != in_grid(&c, &v) {
                return Err(format!("C {c:?}: membership of {v:?} disagrees"));
            }
        }
        if g.index != lattice::oracle::index(&c) {
            return Err(format!(
                "C {c:?}: index {} vs brute force {}",
                g.index,
                lattice::oracle::index(&c)
            ));
        }
        for which in [Which::H, Which::I] {
            let hb = hilbert_basis(&c, which).map_err(|e| format!("C {c:?}: {e}"))?;
            let engine: std::collections::BTreeSet<Vec<i64>> = hb
                .image
                .iter()
                .filter(|w| w.iter().all(|&x| x <= 8))
                .cloned()
                .collect();
            if engine != lattice::oracle::hilbert_in_box(&c, which, 8) {
                return Err(format!(
                    "C {c:?}: {which:?} Hilbert basis disagrees in the box"
                ));
            }
        }
        if g.index <= 12 {
            cs.push(c);
        }
    }
    let mut points = 0;
    for t in 0..50 {
        let c = &cs[t % cs.len()];
        let sb = c[0].len();
        let lambda: Vec<i64> = (0..sb).map(|_| r.gen_range(0..=4)).collect();
        let m = module_generators(c, &lambda).map_err(|e| format!("C {c:?} Λ {lambda:?}: {e}"))?;
        for v in lattice::oracle::module_points(c, &lambda, 8).unwrap() {
            if !lattice::oracle::covered(c, &m, &v) {
                return Err(format!("C {c:?} Λ {lambda:?}: {v:?} not covered"));
            }
            points += 1;
        }
    }
    Ok(format!("100 matrices, 50 modules covering {points} points"))
}

fn coset_suite() -> Outcome {
    let mut r = rng(5);
    let b = basis235();
    for t in 0..200 {
        let sb = r.gen_range(1..=3);
        let rb = r.gen_range(1..=sb);
        let c = random_full_rank(&mut r, rb, sb, 3);
        let f = random_poly(&mut r, sb, 6);
        let parts = decompose(&f, &c).map_err(|e| e.to_string())?;
        let mut sum = Poly::zero(sb);
        for p in parts.values() {
            if p.is_zero() {
                return Err(format!("poly {t}: empty class part"));
            }
            sum = sum.add(p).unwrap();
        }
        if sum != f || parts.values().map(Poly::len).sum::<usize>() != f.len() {
            return Err(format!("poly {t}: parts of {f} do not re-sum"));
        }
    }
    for t in 0..200 {
        let sb = r.gen_range(1..=3);
        let rb = r.gen_range(1..=sb);
        let c = random_full_rank(&mut r, rb, sb, 3);
        let vals = random_values(&mut r, &b, sb);
        let parts = decompose(&random_poly(&mut r, sb, 6), &c).unwrap();
        let values: Vec<Value> = parts
            .values()
            .filter_map(|p| gauss_value(p, &vals).unwrap().finite().cloned())
            .collect();
        for i in 0..values.len() {
            for j in i + 1..values.len() {
                if values[i] == values[j] {
                    return Err(format!("instance {t}: two classes share a value"));
                }
            }
        }
        let (key, v) = min_value_class(&parts, &vals).map_err(|e| format!("instance {t}: {e}"))?;
        if values
            .iter()
            .any(|w| monoform::valuegroup::cmp(w, &v).unwrap().is_lt())
            || !parts.contains_key(&key)
        {
            return Err(format!("instance {t}: least class is not least"));
        }
    }
    let mut eigen = 0;
    for _ in 0..100 {
        let sb = r.gen_range(2..=3);
        let rb = r.gen_range(1..sb);
        let c = random_full_rank(&mut r, rb, sb, 3);
        let parts = decompose(&random_poly(&mut r, sb, 6), &c).unwrap();
        for (key, h) in &parts {
            if key.is_trivial() {
                continue;
            }
            let (lambda, _) = h.terms().next().unwrap();
            let lambda = lambda.as_i64();
            let e = kernel_derivation_vector(&c, &lambda).map_err(|e| e.to_string())?;
            let dot = lambda
                .iter()
                .zip(&e)
                .fold(Q::zero(), |acc, (&l, x)| acc + q(l) * x);
            if derivation_apply(h, &e) != h.scale(&dot) {
                return Err(format!(
                    "class {:?} of C {c:?} is not an eigenvector",
                    key.0
                ));
            }
            eigen += 1;
        }
    }
    Ok(format!(
        "200 decompositions, 200 valuations, {eigen} eigen-derivation checks"
    ))
}

fn phis(k: usize) -> Vec<UnitExpr> {
    (1..=k)
        .map(|i| UnitExpr::symbol(&format!("phi{i}")))
        .collect()
}

/// Random state with m, n ≤ 4 and l ≤ 2.
fn random_state(r: &mut ChaCha8Rng, b: &Arc<EmbeddingBasis>, min_l: usize) -> CutsState {
    loop {
        let sb = r.gen_range(1..=3);
        let rb = r.gen_range(1..=sb);
        let l = r.gen_range(min_l..=2);
        let p = r.gen_range(0..=1);
        if rb + l + p > 4 || sb + l + p > 4 {
            continue;
        }
        let c = random_full_rank(r, rb, sb, 2);
        let yvals = random_values(r, b, sb);
        let pending = (0..p)
            .map(|_| PendingRow {
                g: (0..sb).map(|_| r.gen_range(0..=1)).collect(),
                unit: UnitExpr::symbol("kappa"),
            })
            .collect();
        if let Ok(st) = CutsState::new(sb + l + p, c, phis(rb), yvals, l, pending) {
            return st;
        }
    }
}

fn tails_preserved(before: &CutsState, after: &CutsState) -> Result<(), String> {
    let rows = after.rows().map_err(|e| e.to_string())?;
    for j in 0..before.l {
        if rows[after.rbar + j] != Poly::var(after.n, after.sbar + j) {
            return Err(format!(
                "identification x{} = y{} lost",
                after.rbar + j + 1,
                after.sbar + j + 1
            ));
        }
    }
    Ok(())
}

fn check_lift(before: &CutsState, after: &CutsState) -> Result<(), String> {
    if linalg::rank_int(&after.c) != before.rbar {
        return Err("rank of C changed".into());
    }
    verify_lift(before, after).map_err(|e| e.to_string())?;
    tails_preserved(before, after)
}

fn cuts_suite() -> Outcome {
    let mut r = rng(6);
    let b = basis235();
    for t in 0..100 {
        let st = random_state(&mut r, &b, 0);
        let rb = st.rbar;
        let mut perm: Vec<usize> = (0..rb).collect();
        perm.shuffle(&mut r);
        let mut a = intmat::permutation(&perm);
        let mut xv = perron::values_after(&a, &st.xvals).unwrap();
        for _ in 0..r.gen_range(0..=3) {
            let (s, nv) = perron_step(&xv).unwrap();
            a = intmat::mul(&a, &s.a).unwrap();
            xv = nv;
        }
        let st2 =
            lift_type_i(&st, &a, DEFAULT_CAP).map_err(|e| format!("type I instance {t}: {e}"))?;
        check_lift(&st, &st2).map_err(|e| format!("type I instance {t}: {e}"))?;
    }
    let (mut ok, mut retries) = (0, 0);
    while ok < 50 {
        let st = random_state(&mut r, &b, 0);
        let rr = r.gen_range(1..=st.l + 1);
        if rr > st.l && st.pending.is_empty() {
            continue;
        }
        // value of x_{r̄+r} as a positive integer combination of the x values
        let k: Vec<i64> = loop {
            let k: Vec<i64> = (0..st.rbar).map(|_| r.gen_range(0..=2)).collect();
            if k.iter().any(|&x| x > 0) {
                break k;
            }
        };
        let t_val = combine(&b, &k, &st.xvals).unwrap();
        let mut ext = st.xvals.clone();
        ext.push(t_val);
        let rel: Vec<i64> = k.iter().copied().chain([-1]).collect();
        let (a, _) = reduce_dependent(&ext, &rel, DEFAULT_CAP)
            .map_err(|e| format!("T-side reduction: {e}"))?;
        let c = [q(1), q(2), q(-1), qf(1, 3)]
            .choose(&mut r)
            .unwrap()
            .clone();
        match lift_type_ii(&st, rr, &c, &a, DEFAULT_CAP) {
            Ok(st2) => {
                check_lift(&st, &st2).map_err(|e| format!("type II instance {ok}: {e}"))?;
                if rr == st.l + 1
                    && (st2.l != st.l + 1 || st2.pending.len() + 1 != st.pending.len())
                {
                    return Err(format!("type II instance {ok}: pending row not consumed"));
                }
                ok += 1;
            }
            Err(Error::Precondition(_)) | Err(Error::Inconsistent(_)) if retries < 1000 => {
                retries += 1
            }
            Err(e) => return Err(format!("type II lift: {e}")),
        }
    }
    Ok(format!(
        "100 type I and 50 type II lifts ({retries} type II draws refused)"
    ))
}

fn problems_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../problems")
}

fn mutations(cert: &Certificate) -> Vec<(&'static str, Certificate)> {
    let mut out = Vec::new();
    let Some(f) = &cert.final_form else {
        return out;
    };
    if f.c.is_empty() {
        return out;
    }
    let mut m = cert.clone();
    if let Some(step) = m.u_steps.first_mut().or(m.t_steps.first_mut()) {
        step.a[0][0] += 1;
    } else {
        m.final_form.as_mut().unwrap().c[0][0] += 1;
    }
    out.push(("corrupted entry", m));
    let mut m = cert.clone();
    let c = &mut m.final_form.as_mut().unwrap().c;
    let last = c.len() - 1;
    c[last] = if last == 0 {
        vec![0; c[0].len()]
    } else {
        c[0].clone()
    };
    out.push(("rank-deficient C", m));
    out
}

fn catalog_suite() -> Outcome {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(problems_dir())
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    if paths.len() != 10 {
        return Err(format!(
            "expected 10 bundled problems, found {}",
            paths.len()
        ));
    }
    let mut controls = 0;
    for p in &paths {
        let name = p.file_stem().unwrap().to_string_lossy().to_string();
        let prob = ExtensionProblem::from_json(&std::fs::read_to_string(p).unwrap())
            .map_err(|e| format!("{name}: {e}"))?;
        let cert = run_monomialization(&prob, &SolveOptions::default())
            .map_err(|e| format!("{name}: {e}"))?;
        if cert.status != Status::Ok {
            return Err(format!("{name}: solver failed: {:?}", cert.diagnosis));
        }
        let round =
            Certificate::from_json(&cert.to_json().unwrap()).map_err(|e| format!("{name}: {e}"))?;
        let rep = check_certificate(&round);
        if !rep.passed() {
            return Err(format!("{name}: certifier rejects: {}", rep.text()));
        }
        for (kind, m) in mutations(&round) {
            if check_certificate(&m).passed() {
                return Err(format!("{name}: {kind} passes certification"));
            }
            controls += 1;
        }
    }
    Ok(format!(
        "10 problems certified, {controls} mutations rejected"
    ))
}

const PRIMES: [u64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

fn random_composite(r: &mut ChaCha8Rng, seed: usize) -> ExtensionProblem {
    let depth = r.gen_range(1..=3);
    let mut primes = PRIMES.to_vec();
    primes.shuffle(r);
    let mut levels = Vec::new();
    for _ in 0..depth {
        let d = r.gen_range(1..=2);
        levels.push(
            primes
                .drain(..d)
                .map(|n| GenDescriptor::Sqrt { n })
                .collect::<Vec<_>>(),
        );
    }
    let sbar = r.gen_range(1..=3);
    let y_values: Vec<Vec<Vec<String>>> = (0..sbar)
        .map(|_| {
            // a zero run on top levels puts the value in a smaller isolated subgroup
            let top_zero = r.gen_range(0..depth);
            levels
                .iter()
                .enumerate()
                .map(|(k, lv)| {
                    lv.iter()
                        .map(|_| {
                            if k < top_zero {
                                0
                            } else {
                                r.gen_range(if k == top_zero { 1 } else { -2 }..=3)
                            }
                        })
                        .map(|x: i64| x.to_string())
                        .collect()
                })
                .collect()
        })
        .collect();
    let rbar = r.gen_range(1..=sbar);
    let x = (0..rbar)
        .map(|_| RawRow {
            monomial: Some((0..sbar).map(|_| r.gen_range(0..=2)).collect()),
            ..RawRow::default()
        })
        .collect();
    ExtensionProblem {
        schema: None,
        name: format!("composite-{seed}"),
        m: rbar,
        n: sbar,
        basis: levels[0].clone(),
        y_values: Vec::new(),
        x,
        trunc: None,
        t_steps: Vec::new(),
        composite: Some(CompositeDecl { levels, y_values }),
        declared: None,
    }
}

fn bookkeeping_suite() -> Outcome {
    let mut r = rng(8);
    let (mut multi, mut redrawn) = (0, 0);
    let mut t = 0;
    while t < 300 {
        let p = random_composite(&mut r, t);
        let bk = match bookkeeping(&p, None) {
            Ok(bk) => bk,
            Err(Error::Inadmissible(_)) => {
                redrawn += 1;
                continue;
            }
            Err(e) => return Err(format!("instance {t}: {e}")),
        };
        t += 1;
        if bk.rbar > bk.sbar || bk.rank_t > bk.rank_u {
            return Err(format!("generator bug at instance {t}: {bk:?}"));
        }
        if let Err(e) = &bk.alignment {
            return Err(format!("generator bug at instance {t}: {e}"));
        }
        multi += usize::from(bk.rank_u > 1);
    }
    Ok(format!(
        "300 composite instances, {multi} of rank > 1, {redrawn} dependent draws skipped"
    ))
}

fn main() {
    let suites: Vec<(&str, Option<u64>, fn() -> Outcome)> = vec![
        (
            "1 gauss valuation multiplicativity",
            Some(5),
            gauss_multiplicativity,
        ),
        ("2 perron step suite", Some(5), perron_suite),
        ("3 divisibility normalization", None, divisibility_suite),
        ("4 lattice oracle equivalence", None, lattice_suite),
        ("5 coset suite", None, coset_suite),
        ("6 cuts lifting", Some(30), cuts_suite),
        ("7 end-to-end catalog", None, catalog_suite),
        ("8 bookkeeping inequalities", None, bookkeeping_suite),
    ];
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = 0;
    for (name, limit, f) in suites {
        if !filter.is_empty() && !filter.iter().any(|x| name.contains(x.as_str())) {
            continue;
        }
        match timed(limit.map(Duration::from_secs), f) {
            Ok(d) => println!("PASS {name}: {d}"),
            Err(e) => {
                println!("FAIL {name}: {e}");
                failed += 1;
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}

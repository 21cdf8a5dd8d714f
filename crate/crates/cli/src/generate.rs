//! Random admissible problems: monomials with unit tails over independent square-root values.

use anyhow::{bail, Result};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use monoform::problem::{ExtensionProblem, PolySpec, RawRow, PROBLEM_SCHEMA};
use monoform::valuegroup::GenDescriptor;

const PRIMES: [u64; 6] = [2, 3, 5, 7, 11, 13];

pub fn problem(seed: u64, rows: usize, vars: usize, tail_degree: u32) -> Result<ExtensionProblem> {
    if vars == 0 || vars > PRIMES.len() {
        bail!("--vars must be between 1 and {}", PRIMES.len());
    }
    if rows > vars {
        bail!("--rows may not exceed --vars");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut primes = PRIMES.to_vec();
    primes.shuffle(&mut rng);
    primes.truncate(vars);
    let basis = primes.iter().map(|&n| GenDescriptor::Sqrt { n }).collect();
    let y_values = (0..vars)
        .map(|i| {
            (0..vars)
                .map(|j| monoform::num::q(i64::from(i == j)))
                .collect()
        })
        .collect();
    // rows with independent exponents: a random nonnegative matrix of full rank
    let mut x = Vec::new();
    let mut exps: Vec<Vec<i64>> = Vec::new();
    while x.len() < rows {
        let e: Vec<u32> = (0..vars).map(|_| rng.gen_range(0..=2)).collect();
        let mut cand = exps.clone();
        cand.push(e.iter().map(|&v| i64::from(v)).collect());
        if monoform::linalg::rank_int(&cand) < cand.len() {
            continue;
        }
        exps = cand;
        let tail = (tail_degree > 0 && rng.gen_bool(0.7)).then(|| {
            let terms: Vec<String> = (0..rng.gen_range(1..=2))
                .map(|_| {
                    let mut t = format!("{}", rng.gen_range(1..=3));
                    let mut deg = 0;
                    let target = rng.gen_range(1..=tail_degree);
                    while deg < target {
                        t += &format!("*y{}", rng.gen_range(1..=vars));
                        deg += 1;
                    }
                    t
                })
                .collect();
            PolySpec::Text(terms.join(" + "))
        });
        x.push(RawRow {
            monomial: Some(e),
            tail,
            ..RawRow::default()
        });
    }
    Ok(ExtensionProblem {
        schema: Some(PROBLEM_SCHEMA.into()),
        name: format!("generated-{seed}"),
        m: rows,
        n: vars,
        basis,
        y_values,
        x,
        trunc: None,
        t_steps: Vec::new(),
        composite: None,
        declared: None,
    })
}

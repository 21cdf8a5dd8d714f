//! Certificates (`mf-cert/1`) and their verification.
//!
//! The checker rebuilds every substitution from the recorded matrices and
//! constants. It shares only polynomial, matrix and value arithmetic with the
//! solver.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::sync::Arc;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intmat::{self, IMat};
use crate::linalg;
use crate::num::{q, Q};
use crate::perron::{StepKind, TransformStep};
use crate::problem::{ExtensionProblem, XRow};
use crate::series::{compose, parse_poly, Monomial, Poly, SymCoeff, UnitExpr};
use crate::valuegroup::{
    cmp, combine, combine_q, is_rationally_independent, EmbeddingBasis, Value,
};

pub const CERT_SCHEMA: &str = "mf-cert/1";

/// `δ_i = unit · series`, the series known below degree `trunc` (exact when absent).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Delta {
    pub unit: UnitExpr,
    pub series: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trunc: Option<u32>,
}

impl Delta {
    pub fn one() -> Self {
        Self {
            unit: UnitExpr::one(),
            series: "1".into(),
            trunc: None,
        }
    }
}

/// `x_i(t) = Π_j y_j(t)^{C_ij} · δ_i` for every row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinalForm {
    pub rbar: usize,
    pub sbar: usize,
    pub l: usize,
    #[serde(rename = "C")]
    pub c: IMat,
    pub deltas: Vec<Delta>,
    /// 1-based pairs `(i, j)` with `x_i(t) = y_j(t)`.
    pub idents: Vec<[usize; 2]>,
    /// Comparison degree; `None` compares exactly.
    #[serde(default)]
    pub trunc: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    #[serde(rename = "OK")]
    Ok,
    #[serde(rename = "FAILED")]
    Failed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl CheckResult {
    fn new(name: &str, res: std::result::Result<(), String>) -> Self {
        match res {
            Ok(()) => Self {
                name: name.into(),
                passed: true,
                detail: None,
            },
            Err(d) => Self {
                name: name.into(),
                passed: false,
                detail: Some(d),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub tool: String,
    pub notes: Vec<String>,
}

impl Default for Meta {
    fn default() -> Self {
        Self {
            tool: format!("monoform {}", env!("CARGO_PKG_VERSION")),
            notes: vec!["residue constants are rational, so every residue tower is Q".into()],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub schema: String,
    pub problem: ExtensionProblem,
    pub problem_hash: String,
    pub t_steps: Vec<TransformStep>,
    pub u_steps: Vec<TransformStep>,
    #[serde(rename = "final", default)]
    pub final_form: Option<FinalForm>,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnosis: Option<String>,
    #[serde(default)]
    pub checks: Vec<CheckResult>,
    #[serde(default)]
    pub meta: Meta,
}

impl Certificate {
    /// Pretty JSON with sorted keys.
    pub fn to_json(&self) -> Result<String> {
        let v = serde_json::to_value(self)?;
        Ok(serde_json::to_string_pretty(&v)? + "\n")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let c: Self = serde_json::from_str(s)?;
        if c.schema != CERT_SCHEMA {
            return Err(Error::Parse(format!(
                "unknown certificate schema {:?}",
                c.schema
            )));
        }
        Ok(c)
    }
}

/// Itemized verification outcome.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Report {
    pub checks: Vec<CheckResult>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn push(&mut self, name: &str, res: std::result::Result<(), String>) {
        self.checks.push(CheckResult::new(name, res));
    }

    pub fn extend(&mut self, other: Report) {
        self.checks.extend(other.checks);
    }

    pub fn failed(&self) -> Vec<&CheckResult> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    pub fn text(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let mark = if c.passed { "PASS" } else { "FAIL" };
            let _ = write!(s, "{mark} {}", c.name);
            if let Some(d) = &c.detail {
                let _ = write!(s, ": {d}");
            }
            s.push('\n');
        }
        s
    }
}

/// Images of the old variables in the new ones under one recorded step acting on
/// the first `block` of `nvars` variables.
pub fn step_images(
    step: &TransformStep,
    block: usize,
    nvars: usize,
) -> Result<Vec<Poly<SymCoeff>>> {
    let k = step.a.len();
    let want = match step.kind {
        StepKind::I => block,
        StepKind::II { .. } => block + 1,
    };
    if k != want || step.a.iter().any(|r| r.len() != k) {
        return Err(Error::InvalidTransform(format!(
            "matrix size {k}, expected {want}"
        )));
    }
    let mono = |row: &[i64]| -> Result<Monomial> {
        let mut e = vec![0u32; nvars];
        for (j, &x) in row[..block].iter().enumerate() {
            e[j] =
                u32::try_from(x).map_err(|_| Error::InvalidTransform("negative entry".into()))?;
        }
        Ok(Monomial(e))
    };
    let mut out: Vec<Poly<SymCoeff>> = (0..nvars).map(|i| Poly::var(nvars, i)).collect();
    match step.kind {
        StepKind::I => {
            for i in 0..block {
                out[i] = Poly::term(mono(&step.a[i])?, SymCoeff::from_q(q(1)));
            }
        }
        StepKind::II { r } => {
            let c = step
                .c
                .as_ref()
                .ok_or_else(|| Error::InvalidTransform("type II step without constant".into()))?;
            let v = block + r - 1;
            if r == 0 || v >= nvars {
                return Err(Error::InvalidTransform(format!("II_{r} out of range")));
            }
            for i in 0..block {
                out[i] = Poly::term(mono(&step.a[i])?, c.pow(step.a[i][block]).to_sym());
            }
            let shifted = Poly::var(nvars, v).add(&Poly::one(nvars))?;
            out[v] = Poly::term(mono(&step.a[block])?, c.pow(step.a[block][block]).to_sym())
                .mul(&shifted)?;
        }
    }
    Ok(out)
}

/// The old variables as polynomials in the variables after all `steps`.
pub fn chain_images(
    steps: &[TransformStep],
    block: usize,
    nvars: usize,
) -> Result<Vec<Poly<SymCoeff>>> {
    let mut acc: Vec<Poly<SymCoeff>> = (0..nvars).map(|i| Poly::var(nvars, i)).collect();
    for s in steps {
        let imgs = step_images(s, block, nvars)?;
        acc = acc
            .iter()
            .map(|p| compose(p, &imgs))
            .collect::<Result<_>>()?;
    }
    Ok(acc)
}

fn values_after(step: &TransformStep, vals: &[Value]) -> Result<Vec<Value>> {
    let k = vals.len();
    let top: Vec<Vec<Q>> = step.a[..k]
        .iter()
        .map(|r| r[..k].iter().map(|&x| q(x)).collect())
        .collect();
    let inv =
        linalg::inverse(&top).ok_or_else(|| Error::InvalidTransform("singular block".into()))?;
    let basis = vals[0].basis().clone();
    inv.iter().map(|row| combine_q(&basis, row, vals)).collect()
}

/// Legality of one step applied to parameters with values `before`.
pub fn check_step(step: &TransformStep, before: &[Value]) -> Report {
    let mut rep = Report::default();
    let k = before.len();
    let want = match step.kind {
        StepKind::I => k,
        StepKind::II { r } => {
            rep.push(
                "step.kind",
                if r == 0 { Err("II_0".into()) } else { Ok(()) },
            );
            rep.push(
                "step.constant",
                if step.c.is_some() {
                    Ok(())
                } else {
                    Err("missing constant".into())
                },
            );
            k + 1
        }
    };
    let (rows, cols) = intmat::shape(&step.a);
    let shape_ok = rows == want && cols == want;
    rep.push(
        "step.shape",
        if shape_ok {
            Ok(())
        } else {
            Err(format!("{rows}x{cols}, expected {want}x{want}"))
        },
    );
    if !shape_ok {
        return rep;
    }
    let d = intmat::det(&step.a);
    rep.push(
        "step.det",
        if intmat::is_unimodular(&step.a) {
            Ok(())
        } else {
            Err(format!("determinant {d}"))
        },
    );
    rep.push(
        "step.nonneg",
        if intmat::is_nonneg(&step.a) {
            Ok(())
        } else {
            Err("negative entry".into())
        },
    );
    if k == 0 {
        return rep;
    }
    let res = (|| -> std::result::Result<(), String> {
        let nv = values_after(step, before).map_err(|e| e.to_string())?;
        for (i, v) in nv.iter().enumerate() {
            if !v.is_positive().map_err(|e| e.to_string())? {
                return Err(format!("new value {} is not positive", i + 1));
            }
        }
        if !is_rationally_independent(&nv).map_err(|e| e.to_string())? {
            return Err("new values are dependent".into());
        }
        Ok(())
    })();
    rep.push("step.values", res);
    rep
}

fn leading_value(
    f: &Poly,
    sbar: usize,
    yvals: &[Value],
    basis: &Arc<EmbeddingBasis>,
) -> Result<Value> {
    let mut best: Option<Value> = None;
    for (m, _) in f.terms() {
        if m.0[sbar..].iter().any(|&e| e != 0) {
            continue;
        }
        let v = combine(basis, &m.as_i64()[..sbar], yvals)?;
        best = match best {
            Some(b) if cmp(&b, &v)?.is_le() => Some(b),
            _ => Some(v),
        };
    }
    best.ok_or_else(|| Error::Inadmissible("row has no term in the valued variables".into()))
}

fn err_s(e: Error) -> String {
    e.to_string()
}

/// Verifies a certificate against its embedded problem.
pub fn check_final_form(cert: &Certificate) -> Report {
    let mut rep = Report::default();
    rep.push(
        "schema",
        if cert.schema == CERT_SCHEMA {
            Ok(())
        } else {
            Err(cert.schema.clone())
        },
    );
    rep.push(
        "problem_hash",
        match cert.problem.hash() {
            Ok(h) if h == cert.problem_hash => Ok(()),
            Ok(h) => Err(format!("recorded {}, computed {h}", cert.problem_hash)),
            Err(e) => Err(e.to_string()),
        },
    );
    rep.push(
        "t_steps",
        if cert.t_steps == cert.problem.t_steps {
            Ok(())
        } else {
            Err("T-side history differs from the problem's steps".into())
        },
    );
    let parsed = match cert.problem.parse() {
        Ok(p) => p,
        Err(e) => {
            rep.push("problem", Err(e.to_string()));
            return rep;
        }
    };
    let Some(fin) = &cert.final_form else {
        rep.push(
            "final",
            Err(cert
                .diagnosis
                .clone()
                .unwrap_or_else(|| "no final relation recorded".into())),
        );
        return rep;
    };
    let (m, n, rbar, sbar) = (parsed.m, parsed.n, parsed.rbar, parsed.sbar);
    let shape = if fin.rbar != rbar || fin.sbar != sbar {
        Err(format!(
            "r̄, s̄ = {}, {} but problem has {rbar}, {sbar}",
            fin.rbar, fin.sbar
        ))
    } else if fin.c.len() != m || fin.c.iter().any(|r| r.len() != n) || fin.deltas.len() != m {
        Err(format!("final relation must have {m} rows of length {n}"))
    } else if fin.c.iter().flatten().any(|&x| x < 0) {
        Err("negative exponent in C".into())
    } else {
        Ok(())
    };
    let shape_ok = shape.is_ok();
    rep.push("shape", shape);
    if !shape_ok {
        return rep;
    }

    // step legality, tracking values on both sides
    let basis = parsed.basis.clone();
    let mut yvals = parsed.yvals.clone();
    let mut u_ok = Ok(());
    for (i, s) in cert.u_steps.iter().enumerate() {
        let r = check_step(s, &yvals);
        if let Some(f) = r.failed().first() {
            u_ok = Err(format!(
                "step {}: {} {}",
                i + 1,
                f.name,
                f.detail.clone().unwrap_or_default()
            ));
            break;
        }
        yvals = values_after(s, &yvals).expect("checked");
    }
    let u_good = u_ok.is_ok();
    rep.push("steps.U", u_ok);
    let xvals0: Result<Vec<Value>> = parsed.rows[..rbar]
        .iter()
        .map(|r| match r {
            XRow::Valued { f, .. } => leading_value(f, sbar, &parsed.yvals, &basis),
            _ => unreachable!(),
        })
        .collect();
    let mut t_ok = Ok(());
    let mut xvals = Vec::new();
    match xvals0 {
        Err(e) => t_ok = Err(e.to_string()),
        Ok(v) => {
            xvals = v;
            if rbar > 0 {
                for (i, s) in cert.t_steps.iter().enumerate() {
                    let r = check_step(s, &xvals);
                    if let Some(f) = r.failed().first() {
                        t_ok = Err(format!(
                            "step {}: {} {}",
                            i + 1,
                            f.name,
                            f.detail.clone().unwrap_or_default()
                        ));
                        break;
                    }
                    xvals = values_after(s, &xvals).expect("checked");
                }
            } else if !cert.t_steps.is_empty() {
                t_ok = Err("transforms recorded for a trivial valuation".into());
            }
        }
    }
    let t_good = t_ok.is_ok();
    rep.push("steps.T", t_ok);

    // (a) x(t) = y(t)^C δ, pulled back along both histories
    rep.push(
        "a.composition",
        composition(cert, &parsed, fin)
            .map_err(err_s)
            .and_then(|r| r),
    );

    // (b) rank of the exponent matrix
    let rk = linalg::rank_int(&fin.c);
    rep.push(
        "b.rank",
        if rk == m {
            Ok(())
        } else {
            Err(format!("rank {rk}, expected {m}"))
        },
    );

    // (c) values of the first blocks
    if t_good && u_good {
        rep.push(
            "c.values",
            (|| -> Result<std::result::Result<(), String>> {
                if fin.c[..rbar]
                    .iter()
                    .any(|r| r[sbar..].iter().any(|&x| x != 0))
                {
                    return Ok(Err("valued rows involve unvalued y's".into()));
                }
                if !is_rationally_independent(&xvals)? || !is_rationally_independent(&yvals)? {
                    return Ok(Err("first-block values are dependent".into()));
                }
                for (i, row) in fin.c[..rbar].iter().enumerate() {
                    let v = combine(&basis, &row[..sbar], &yvals)?;
                    if v != xvals[i] {
                        return Ok(Err(format!("value of x{} disagrees with C·ν(y)", i + 1)));
                    }
                }
                Ok(Ok(()))
            })()
            .map_err(err_s)
            .and_then(|r| r),
        );
    } else {
        rep.push("c.values", Err("skipped: illegal step".into()));
    }

    // (d) identifications
    rep.push(
        "d.idents",
        (|| {
            let want: BTreeSet<[usize; 2]> =
                (0..fin.l).map(|k| [rbar + k + 1, sbar + k + 1]).collect();
            let got: BTreeSet<[usize; 2]> = fin.idents.iter().copied().collect();
            if fin.l < parsed.l || want != got {
                return Err(format!("expected identifications {want:?}, found {got:?}"));
            }
            for &[i, j] in &fin.idents {
                let row = &fin.c[i - 1];
                let unit_row = row
                    .iter()
                    .enumerate()
                    .all(|(k, &x)| x == i64::from(k == j - 1));
                if !unit_row || fin.deltas[i - 1] != Delta::one() {
                    return Err(format!("x{i} is not y{j}"));
                }
            }
            Ok(())
        })(),
    );

    // (e) units
    rep.push(
        "e.units",
        (|| {
            for (i, d) in fin.deltas.iter().enumerate() {
                let p = parse_poly(&d.series, n).map_err(err_s)?;
                if d.trunc == Some(0) || p.constant_term().is_zero() {
                    return Err(format!("δ{} is not a unit", i + 1));
                }
            }
            Ok(())
        })(),
    );
    rep
}

fn composition(
    cert: &Certificate,
    parsed: &crate::problem::Parsed,
    fin: &FinalForm,
) -> Result<std::result::Result<(), String>> {
    let (m, n) = (parsed.m, parsed.n);
    let trunc = fin.trunc.map(u64::from);
    let u = chain_images(&cert.u_steps, parsed.sbar, n)?;
    let t = chain_images(&cert.t_steps, parsed.rbar, m)?;
    let mut g = Vec::with_capacity(m);
    for (row, d) in fin.c.iter().zip(&fin.deltas) {
        let series = parse_poly(&d.series, n)?.to_sym().scale(&d.unit.to_sym());
        let mono = Poly::term(Monomial::from_i64(row)?, SymCoeff::from_q(q(1)));
        g.push(mono.mul(&series)?);
    }
    for i in 0..m {
        let lhs = compose(&parsed.rows[i].to_sym(n)?, &u)?.truncate(trunc);
        let rhs = if m == 0 {
            Poly::zero(n)
        } else {
            compose(&t[i], &g)?.truncate(trunc)
        };
        if lhs != rhs {
            return Ok(Err(format!("row x{}: {} differs from {}", i + 1, lhs, rhs)));
        }
    }
    Ok(Ok(()))
}

/// Rank and rational-rank bookkeeping, including isolated subgroups when the
/// problem declares composite values.
pub fn check_rank_bookkeeping(problem: &ExtensionProblem, cert: Option<&Certificate>) -> Report {
    let mut rep = Report::default();
    match bookkeeping(problem, cert) {
        Ok(b) => {
            rep.push(
                "rbar<=sbar",
                if b.rbar <= b.sbar {
                    Ok(())
                } else {
                    Err(format!("r̄ = {} > s̄ = {}", b.rbar, b.sbar))
                },
            );
            rep.push(
                "rank_t<=rank_u",
                if b.rank_t <= b.rank_u {
                    Ok(())
                } else {
                    Err(format!("rank {} > rank {}", b.rank_t, b.rank_u))
                },
            );
            rep.push("contraction", b.alignment.clone());
            if let Some(d) = &problem.declared {
                let mut bad = Vec::new();
                for (name, want, got) in [
                    ("rbar", d.rbar, b.rbar),
                    ("sbar", d.sbar, b.sbar),
                    ("rank_t", d.rank_t, b.rank_t),
                    ("rank_u", d.rank_u, b.rank_u),
                ] {
                    if let Some(w) = want {
                        if w != got {
                            bad.push(format!("{name} declared {w}, computed {got}"));
                        }
                    }
                }
                rep.push(
                    "declared",
                    if bad.is_empty() {
                        Ok(())
                    } else {
                        Err(bad.join("; "))
                    },
                );
            }
        }
        Err(e) => rep.push("bookkeeping", Err(e.to_string())),
    }
    rep
}

/// Computed bookkeeping data.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Bookkeeping {
    pub rbar: usize,
    pub sbar: usize,
    pub rank_t: usize,
    pub rank_u: usize,
    /// For each number `k` of vanishing top levels, the rational ranks of the
    /// isolated subgroups `Δ_k` on the U side and `Δ_k ∩ Γ_T` on the T side.
    pub chain: Vec<(usize, usize, usize)>,
    #[serde(skip)]
    pub alignment: std::result::Result<(), String>,
}

fn distinct(xs: impl Iterator<Item = usize>) -> usize {
    xs.collect::<BTreeSet<_>>().len()
}

pub fn bookkeeping(problem: &ExtensionProblem, cert: Option<&Certificate>) -> Result<Bookkeeping> {
    let n = problem.n;
    let rows = problem
        .x
        .iter()
        .map(|r| r.parse(n))
        .collect::<Result<Vec<_>>>()?;
    let valued: Vec<&Poly> = rows
        .iter()
        .filter_map(|r| match r {
            XRow::Valued { f, .. } => Some(f),
            _ => None,
        })
        .collect();
    let rbar = cert
        .and_then(|c| c.final_form.as_ref())
        .map_or(valued.len(), |f| f.rbar);
    let Some(comp) = &problem.composite else {
        let sbar = problem.y_values.len();
        let rank = |k: usize| usize::from(k > 0);
        return Ok(Bookkeeping {
            rbar,
            sbar,
            rank_t: rank(rbar),
            rank_u: rank(sbar),
            chain: vec![(0, sbar, rbar), (1, 0, 0)],
            alignment: Ok(()),
        });
    };
    let levels = comp
        .levels
        .iter()
        .map(|ds| EmbeddingBasis::from_descriptors(ds))
        .collect::<Result<Vec<_>>>()?;
    let sbar = comp.y_values.len();
    let depth = levels.len();
    // y values as rational rows, level-major
    let ycoords: Vec<Vec<Vec<Q>>> = comp
        .y_values
        .iter()
        .map(|parts| {
            if parts.len() != depth {
                return Err(Error::DimensionMismatch {
                    expected: depth,
                    found: parts.len(),
                });
            }
            parts
                .iter()
                .zip(&levels)
                .map(|(p, b)| {
                    if p.len() != b.dim() {
                        return Err(Error::DimensionMismatch {
                            expected: b.dim(),
                            found: p.len(),
                        });
                    }
                    p.iter().map(|s| crate::num::parse_q(s)).collect()
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let ylevel = |j: usize, k: usize| -> Result<Value> {
        Value::new(levels[k].clone(), ycoords[j][k].clone())
    };
    // leading exponent of each valued row under the lexicographic order
    let mut xexp: Vec<Vec<i64>> = Vec::new();
    for f in &valued {
        let mut best: Option<(Vec<i64>, Vec<Value>)> = None;
        for (mono, _) in f.terms() {
            if mono.0[sbar..].iter().any(|&e| e != 0) {
                continue;
            }
            let e = mono.as_i64()[..sbar].to_vec();
            let v: Vec<Value> = (0..depth)
                .map(|k| {
                    let vs = (0..sbar)
                        .map(|j| ylevel(j, k))
                        .collect::<Result<Vec<_>>>()?;
                    combine(&levels[k], &e, &vs)
                })
                .collect::<Result<_>>()?;
            let better = match &best {
                None => true,
                Some((_, bv)) => {
                    let mut o = std::cmp::Ordering::Equal;
                    for (a, b) in v.iter().zip(bv) {
                        o = cmp(a, b)?;
                        if o.is_ne() {
                            break;
                        }
                    }
                    o.is_lt()
                }
            };
            if better {
                best = Some((e, v));
            }
        }
        xexp.push(
            best.ok_or_else(|| Error::Inadmissible("row without valued terms".into()))?
                .0,
        );
    }
    // coordinates of the first k levels, as rows
    let prefix_rows = |k: usize, rows: &[Vec<Q>]| -> usize {
        if k == 0 {
            0
        } else {
            linalg::rank(rows)
        }
    };
    let y_rows = |k: usize| -> Vec<Vec<Q>> {
        (0..sbar)
            .map(|j| ycoords[j][..k].iter().flatten().cloned().collect())
            .collect()
    };
    let x_rows = |k: usize| -> Vec<Vec<Q>> {
        let yr = y_rows(k);
        xexp.iter()
            .map(|e| {
                let eq: Vec<Q> = e.iter().map(|&x| q(x)).collect();
                if yr.is_empty() || yr[0].is_empty() {
                    Vec::new()
                } else {
                    linalg::vec_mul(&eq, &yr)
                }
            })
            .collect()
    };
    if linalg::rank(&y_rows(depth)) != sbar {
        return Err(Error::Inadmissible(
            "composite y values are rationally dependent".into(),
        ));
    }
    if linalg::rank(&x_rows(depth)) != xexp.len() {
        return Err(Error::Inadmissible(
            "composite x values are rationally dependent".into(),
        ));
    }
    let mut chain = Vec::new();
    for k in 0..=depth {
        let du = sbar - prefix_rows(k, &y_rows(k));
        let dt = xexp.len() - prefix_rows(k, &x_rows(k));
        chain.push((k, du, dt));
    }
    let rank_u = distinct(chain.iter().map(|c| c.1)) - 1;
    let rank_t = distinct(chain.iter().map(|c| c.2)) - 1;
    let mut alignment = Ok(());
    for w in chain.windows(2) {
        let ((k, du0, dt0), (_, du1, dt1)) = (w[0], w[1]);
        if du0 == du1 && dt0 != dt1 {
            alignment = Err(format!(
                "level {} splits the T-side group without splitting the U-side group",
                k + 1
            ));
        }
        if dt0 > du0 {
            alignment = Err(format!(
                "T-side subgroup {k} exceeds its U-side counterpart"
            ));
        }
    }
    Ok(Bookkeeping {
        rbar: xexp.len(),
        sbar,
        rank_t,
        rank_u,
        chain,
        alignment,
    })
}

/// All checks on a certificate.
pub fn check_certificate(cert: &Certificate) -> Report {
    let mut rep = check_final_form(cert);
    rep.extend(check_rank_bookkeeping(&cert.problem, Some(cert)));
    rep
}

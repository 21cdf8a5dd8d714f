//! Compatible transform sequences: lifting T-side transforms to the U side while
//! keeping the relation
//!
//! ```text
//! x_i       = y^{C_i} φ_i          i ≤ r̄
//! x_{r̄+j}   = y_{s̄+j}              j ≤ l
//! x_{r̄+l+k} = κ_k y^{g_k} y_{s̄+l+k}   (pending rows)
//! ```
//!
//! and the end-to-end solver producing certificates.

use num_traits::Zero;

use crate::certify::{self, Certificate, Delta, FinalForm, Meta, Status, CERT_SCHEMA};
use crate::error::{Error, Result};
use crate::intmat::{self, IMat};
use crate::linalg;
use crate::num::Q;
use crate::perron::{
    self, factor_monomial_unit_capped, make_nonnegative, reduce_dependent, Side, StepKind,
    TransformSeq, TransformStep,
};
use crate::problem::{ExtensionProblem, XRow};
use crate::series::{compose, Monomial, Poly, SymCoeff, TruncatedSeries, UnitExpr};
use crate::valuegroup::{combine, combine_q, is_rationally_independent, Value};

/// `x = κ · y^g · y_{s̄+l+k}`, waiting to become an identification.
#[derive(Debug, Clone, PartialEq)]
pub struct PendingRow {
    pub g: Vec<i64>,
    pub unit: UnitExpr,
}

#[derive(Debug, Clone)]
pub struct CutsState {
    pub m: usize,
    pub n: usize,
    pub rbar: usize,
    pub sbar: usize,
    pub l: usize,
    pub c: IMat,
    pub phis: Vec<UnitExpr>,
    pub xvals: Vec<Value>,
    pub yvals: Vec<Value>,
    pub pending: Vec<PendingRow>,
    pub t_history: TransformSeq,
    pub u_history: TransformSeq,
}

impl CutsState {
    pub fn new(
        n: usize,
        c: IMat,
        phis: Vec<UnitExpr>,
        yvals: Vec<Value>,
        l: usize,
        pending: Vec<PendingRow>,
    ) -> Result<Self> {
        let rbar = c.len();
        let sbar = yvals.len();
        let m = rbar + l + pending.len();
        if phis.len() != rbar {
            return Err(Error::DimensionMismatch {
                expected: rbar,
                found: phis.len(),
            });
        }
        if sbar + l + pending.len() > n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: sbar + l + pending.len(),
            });
        }
        let xvals = if rbar == 0 {
            Vec::new()
        } else {
            let basis = yvals[0].basis().clone();
            c.iter()
                .map(|row| combine(&basis, row, &yvals))
                .collect::<Result<_>>()?
        };
        let st = Self {
            m,
            n,
            rbar,
            sbar,
            l,
            c,
            phis,
            xvals,
            yvals,
            pending,
            t_history: TransformSeq::new(Side::T),
            u_history: TransformSeq::new(Side::U),
        };
        st.check_invariants()?;
        Ok(st)
    }

    pub fn check_invariants(&self) -> Result<()> {
        if self.c.iter().any(|r| r.len() != self.sbar) {
            return Err(Error::Inconsistent(
                "exponent rows must have length s̄".into(),
            ));
        }
        let rank = linalg::rank_int(&self.c);
        if rank != self.rbar {
            return Err(Error::RankDeficient {
                expected: self.rbar,
                found: rank,
            });
        }
        if !is_rationally_independent(&self.xvals)? || !is_rationally_independent(&self.yvals)? {
            return Err(Error::Inconsistent(
                "first-block values are dependent".into(),
            ));
        }
        for (i, row) in self.c.iter().enumerate() {
            let v = combine(self.yvals[0].basis(), row, &self.yvals)?;
            if v != self.xvals[i] {
                return Err(Error::Inconsistent(format!("value of x{} drifted", i + 1)));
            }
        }
        if self
            .pending
            .iter()
            .any(|p| p.g.len() != self.sbar || p.g.iter().any(|&e| e < 0))
        {
            return Err(Error::Inconsistent("pending monomial malformed".into()));
        }
        Ok(())
    }

    /// The relation rows as polynomials in `y`.
    pub fn rows(&self) -> Result<Vec<Poly<SymCoeff>>> {
        let n = self.n;
        let pad = |g: &[i64]| -> Result<Vec<u32>> {
            let mut e = vec![0u32; n];
            for (k, &x) in g.iter().enumerate() {
                e[k] = u32::try_from(x).map_err(|_| Error::ExponentOverflow)?;
            }
            Ok(e)
        };
        let mut out = Vec::with_capacity(self.m);
        for (row, phi) in self.c.iter().zip(&self.phis) {
            out.push(Poly::term(Monomial(pad(row)?), phi.to_sym()));
        }
        for j in 0..self.l {
            out.push(Poly::var(n, self.sbar + j));
        }
        for (k, p) in self.pending.iter().enumerate() {
            let mut e = pad(&p.g)?;
            e[self.sbar + self.l + k] += 1;
            out.push(Poly::term(Monomial(e), p.unit.to_sym()));
        }
        Ok(out)
    }

    fn absorb_type_i(&mut self, rows: IMat, cap: usize) -> Result<()> {
        let norm = make_nonnegative(&rows, &self.yvals, Side::U, cap)?;
        for p in &mut self.pending {
            p.g = intmat::vec_mul(&p.g, &norm.cumulative)?;
        }
        self.c = norm.vectors;
        self.yvals = norm.vals;
        self.u_history.extend(norm.seq);
        Ok(())
    }
}

fn primitive(v: &[i64]) -> Vec<i64> {
    let g = v
        .iter()
        .fold(0i64, |g, &x| num_integer::Integer::gcd(&g, &x));
    v.iter().map(|x| x / g.max(1)).collect()
}

fn units_product(us: &[UnitExpr], ks: &[i64]) -> UnitExpr {
    UnitExpr::product(us, ks)
}

/// Lifts a T-side type I transform `x = x(1)^A`.
pub fn lift_type_i(state: &CutsState, a: &IMat, cap: usize) -> Result<CutsState> {
    let step = TransformStep::type_i(a.clone());
    step.validate(state.rbar)?;
    let ainv = intmat::inverse_unimodular(a)?;
    let m = intmat::mul(&ainv, &state.c)?;
    let mut st = state.clone();
    st.phis = ainv
        .iter()
        .map(|row| units_product(&state.phis, row))
        .collect();
    st.xvals = perron::values_after(a, &state.xvals)?;
    for (i, v) in st.xvals.iter().enumerate() {
        if !v.is_positive()? {
            return Err(Error::NonPositive(i));
        }
    }
    st.absorb_type_i(m, cap)?;
    st.t_history.steps.push(step);
    st.check_invariants()?;
    Ok(st)
}

/// Lifts a T-side type II_r transform with residue constant `c`.
///
/// For `r ≤ l` the transform acts on an identification row; for `r = l + 1` it
/// consumes the first pending row, which then becomes an identification.
pub fn lift_type_ii(state: &CutsState, r: usize, c: &Q, a: &IMat, cap: usize) -> Result<CutsState> {
    let (rbar, sbar) = (state.rbar, state.sbar);
    if c.is_zero() {
        return Err(Error::Precondition(
            "residue constant must be nonzero".into(),
        ));
    }
    let cu = UnitExpr::scalar(c.clone())?;
    let step = TransformStep::type_ii(r, cu.clone(), a.clone());
    step.validate(rbar)?;
    let consumes = r == state.l + 1;
    let (g, kappa) = if r >= 1 && r <= state.l {
        (vec![0; sbar], UnitExpr::one())
    } else if consumes && !state.pending.is_empty() {
        (state.pending[0].g.clone(), state.pending[0].unit.clone())
    } else {
        return Err(Error::Precondition(format!(
            "II_{r} needs an identification or a pending parameter row at position {r}"
        )));
    };
    let new_x = perron::values_after(&step.top(), &state.xvals)?;
    for (i, v) in new_x.iter().enumerate() {
        if !v.is_positive()? {
            return Err(Error::NonPositive(i));
        }
    }

    // Ĉ = [[C, 0], [g, 1]] and ℓ = (φ, κ)
    let mut chat: IMat = state
        .c
        .iter()
        .map(|r| r.iter().copied().chain([0]).collect())
        .collect();
    chat.push(g.iter().copied().chain([1]).collect());
    let ell: Vec<UnitExpr> = state.phis.iter().cloned().chain([kappa]).collect();
    let ainv = intmat::inverse_unimodular(a)?;
    let m_last = intmat::vec_mul(&ainv[rbar], &chat)?;
    let m_ll = m_last[sbar];
    if m_ll == 0 {
        return Err(Error::Inconsistent(
            "transform does not involve the shifted parameter".into(),
        ));
    }
    let (bhat, new_y) = if m_last[..sbar].iter().all(|&x| x == 0) {
        // pure translation: the U side shifts by the same kind of step
        (intmat::identity(sbar + 1), state.yvals.clone())
    } else {
        let basis = state.yvals[0].basis().clone();
        let top: Vec<Q> = m_last[..sbar]
            .iter()
            .map(|&x| Q::from_integer((-x).into()))
            .collect();
        let v_last =
            combine_q(&basis, &top, &state.yvals)?.scale(&Q::new(1.into(), m_ll.into()));
        if !v_last.is_positive()? {
            return Err(Error::Precondition(format!(
                "derived value of y{} is not positive",
                sbar + r
            )));
        }
        let mut ext = state.yvals.clone();
        ext.push(v_last);
        reduce_dependent(&ext, &primitive(&m_last), cap)?
    };
    let rel = intmat::vec_mul(&m_last, &bhat)?;
    if rel[..sbar].iter().any(|&x| x != 0) {
        return Err(Error::Inconsistent(
            "U-side reduction missed the relation".into(),
        ));
    }
    let k = rel[sbar];
    if k.abs() != 1 {
        return Err(Error::Precondition(format!(
            "the U-side constant would need a root of order {}",
            k.abs()
        )));
    }
    let neg: Vec<i64> = ainv[rbar].iter().map(|x| -x).collect();
    let d = cu.mul(&units_product(&ell, &neg)).pow(k);
    let nmat = intmat::mul(&intmat::mul(&ainv, &chat)?, &bhat)?;

    let mut st = state.clone();
    st.phis = (0..rbar)
        .map(|i| d.pow(nmat[i][sbar]).mul(&units_product(&ell, &ainv[i])))
        .collect();
    let c1: IMat = nmat[..rbar]
        .iter()
        .map(|row| row[..sbar].to_vec())
        .collect();
    let skip = usize::from(consumes);
    st.pending = state.pending[skip..]
        .iter()
        .map(|p| -> Result<PendingRow> {
            let e = intmat::vec_mul(&p.g, &bhat[..sbar])?;
            Ok(PendingRow {
                g: e[..sbar].to_vec(),
                unit: p.unit.mul(&d.pow(e[sbar])),
            })
        })
        .collect::<Result<_>>()?;
    if consumes {
        st.l += 1;
    }
    st.xvals = new_x;
    st.yvals = new_y;
    st.u_history.steps.push(TransformStep::type_ii(r, d, bhat));
    st.absorb_type_i(c1, cap)?;
    st.t_history.steps.push(step);
    st.check_invariants()?;
    Ok(st)
}

/// Applies one recorded T-side step.
pub fn lift(state: &CutsState, step: &TransformStep, cap: usize) -> Result<CutsState> {
    match step.kind {
        StepKind::I => lift_type_i(state, &step.a, cap),
        StepKind::II { r } => {
            let c = step
                .c
                .as_ref()
                .filter(|u| u.syms.is_empty())
                .ok_or_else(|| Error::Precondition("T-side constants must be rational".into()))?;
            lift_type_ii(state, r, &c.scalar, &step.a, cap)
        }
    }
}

/// Checks `rows_before ∘ U = T ∘ rows_after` for the steps taken between two states.
pub fn verify_lift(before: &CutsState, after: &CutsState) -> Result<()> {
    let t_new = &after.t_history.steps[before.t_history.steps.len()..];
    let u_new = &after.u_history.steps[before.u_history.steps.len()..];
    let u = certify::chain_images(u_new, before.sbar, before.n)?;
    let t = certify::chain_images(t_new, before.rbar, before.m)?;
    let old = before.rows()?;
    let new = after.rows()?;
    for i in 0..before.m {
        let lhs = compose(&old[i], &u)?;
        let rhs = compose(&t[i], &new)?;
        if lhs != rhs {
            return Err(Error::Inconsistent(format!(
                "row x{}: {lhs} vs {rhs}",
                i + 1
            )));
        }
    }
    Ok(())
}

/// Solver settings.
#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// Comparison degree; defaults to the problem's, else its degree + 2.
    pub trunc: Option<u32>,
    pub max_steps: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            trunc: None,
            max_steps: perron::DEFAULT_CAP,
        }
    }
}

/// Largest comparison degree tried when factorizations fall above truncation.
pub const MAX_TRUNC: u32 = 256;

struct Solved {
    u_steps: Vec<TransformStep>,
    final_form: FinalForm,
}

/// Solves a problem and returns a checked certificate. Failures of the solver
/// yield a certificate with status `FAILED` and a diagnosis; malformed problems
/// are errors.
pub fn run_monomialization(problem: &ExtensionProblem, opts: &SolveOptions) -> Result<Certificate> {
    let parsed = problem.parse()?;
    let hash = problem.hash()?;
    let mut cert = Certificate {
        schema: CERT_SCHEMA.into(),
        problem: problem.clone(),
        problem_hash: hash,
        t_steps: problem.t_steps.clone(),
        u_steps: Vec::new(),
        final_form: None,
        status: Status::Failed,
        diagnosis: None,
        checks: Vec::new(),
        meta: Meta::default(),
    };
    match solve(problem, &parsed, opts) {
        Ok(s) => {
            cert.u_steps = s.u_steps;
            cert.final_form = Some(s.final_form);
        }
        Err(Error::IterationCap { cap, partial }) => {
            cert.u_steps = partial.steps.clone();
            cert.diagnosis = Some(format!("iteration cap {cap} exceeded"));
            return Ok(cert);
        }
        Err(e @ (Error::Parse(_) | Error::Json(_) | Error::InvalidBasis(_))) => return Err(e),
        Err(e) => {
            cert.diagnosis = Some(e.to_string());
            return Ok(cert);
        }
    }
    let report = certify::check_certificate(&cert);
    cert.status = if report.passed() {
        Status::Ok
    } else {
        Status::Failed
    };
    if !report.passed() {
        cert.diagnosis = Some(
            report
                .failed()
                .iter()
                .map(|c| c.name.clone())
                .collect::<Vec<_>>()
                .join(", "),
        );
    }
    cert.checks = report.checks;
    Ok(cert)
}

fn solve(
    problem: &ExtensionProblem,
    parsed: &crate::problem::Parsed,
    opts: &SolveOptions,
) -> Result<Solved> {
    let start = opts.trunc.or(problem.trunc).unwrap_or_else(|| {
        let deg = parsed
            .rows
            .iter()
            .map(|r| match r {
                XRow::Valued { f, .. } => f.degree(),
                _ => 0,
            })
            .max()
            .unwrap_or(0);
        u32::try_from(deg).unwrap_or(MAX_TRUNC - 2) + 2
    });
    let mut d = start.max(1);
    loop {
        match solve_at(parsed, &problem.t_steps, d, opts) {
            Err(Error::AboveTruncation) if d < MAX_TRUNC => d = (d * 2).min(MAX_TRUNC),
            r => return r,
        }
    }
}

fn solve_at(
    parsed: &crate::problem::Parsed,
    problem_steps: &[TransformStep],
    trunc: u32,
    opts: &SolveOptions,
) -> Result<Solved> {
    let (m, n, rbar, sbar) = (parsed.m, parsed.n, parsed.rbar, parsed.sbar);
    let mut yvals = parsed.yvals.clone();
    let mut series: Vec<TruncatedSeries> = Vec::new();
    let mut units = Vec::new();
    let mut pending = Vec::new();
    for row in &parsed.rows {
        match row {
            XRow::Valued { unit, f } => {
                series.push(TruncatedSeries::new(f.clone(), trunc));
                units.push(unit.clone());
            }
            XRow::Param { g, unit, .. } => pending.push(PendingRow {
                g: g[..sbar].iter().map(|&e| i64::from(e)).collect(),
                unit: unit.clone(),
            }),
            XRow::Ident { .. } => {}
        }
    }
    let mut u_seq = TransformSeq::new(Side::U);
    for i in 0..rbar {
        let used = u_seq.steps.len();
        let fac = factor_monomial_unit_capped(
            &series[i],
            &yvals,
            Side::U,
            opts.max_steps.saturating_sub(used),
        )
        .map_err(|e| match e {
            Error::IterationCap { cap, partial } => {
                let mut p = u_seq.clone();
                p.extend(*partial);
                Error::IterationCap {
                    cap,
                    partial: Box::new(p),
                }
            }
            e => e,
        })?;
        if !fac.seq.is_empty() {
            let cum = fac.seq.cumulative(sbar)?;
            for (k, s) in series.iter_mut().enumerate() {
                *s = if k == i {
                    fac.transformed.clone()
                } else {
                    s.monomial_map(&cum)?
                };
            }
            for p in &mut pending {
                p.g = intmat::vec_mul(&p.g, &cum)?;
            }
            u_seq.extend(fac.seq);
        }
        yvals = fac.vals;
    }
    // every row is now y^{d_i} u_i
    let mut c = Vec::with_capacity(rbar);
    let mut us = Vec::with_capacity(rbar);
    for s in &series {
        let fac = factor_monomial_unit_capped(s, &yvals, Side::U, 0)?;
        c.push(fac.d.iter().map(|&e| i64::from(e)).collect::<Vec<_>>());
        us.push(fac.u);
    }
    if linalg::rank_int(&c) != rbar {
        return Err(Error::Inadmissible(
            "x values are rationally dependent".into(),
        ));
    }
    let exact = us.iter().all(|u| u.poly().degree() == 0);
    let (c, units, deltas_series, pending, l, u_steps) = if problem_steps.is_empty() {
        let ds: Vec<(Poly, Option<u32>)> = us
            .iter()
            .map(|u| (u.poly().clone(), if exact { None } else { Some(u.trunc()) }))
            .collect();
        (c, units, ds, pending, parsed.l, u_seq.steps)
    } else {
        if !exact {
            return Err(Error::Inadmissible(
                "T-side transforms need constant units after factoring".into(),
            ));
        }
        let phis: Vec<UnitExpr> = units
            .iter()
            .zip(&us)
            .map(|(phi, u)| Ok(phi.mul(&UnitExpr::scalar(u.poly().constant_term())?)))
            .collect::<Result<_>>()?;
        let mut st = CutsState::new(n, c, phis, yvals, parsed.l, pending)?;
        st.u_history = u_seq;
        for step in problem_steps {
            let used = st.u_history.steps.len();
            st = lift(&st, step, opts.max_steps.saturating_sub(used))?;
        }
        let ds = vec![(Poly::one(n), None); rbar];
        (st.c, st.phis, ds, st.pending, st.l, st.u_history.steps)
    };
    let mut full = Vec::with_capacity(m);
    let mut deltas = Vec::with_capacity(m);
    for ((row, unit), (s, t)) in c.iter().zip(&units).zip(&deltas_series) {
        let mut r = row.clone();
        r.resize(n, 0);
        full.push(r);
        deltas.push(Delta {
            unit: unit.clone(),
            series: s.to_string(),
            trunc: *t,
        });
    }
    let mut idents = Vec::new();
    for j in 0..l {
        let mut r = vec![0; n];
        r[sbar + j] = 1;
        full.push(r);
        deltas.push(Delta::one());
        idents.push([rbar + j + 1, sbar + j + 1]);
    }
    for (k, p) in pending.iter().enumerate() {
        let mut r = p.g.clone();
        r.resize(n, 0);
        r[sbar + l + k] += 1;
        full.push(r);
        deltas.push(Delta {
            unit: p.unit.clone(),
            series: "1".into(),
            trunc: None,
        });
    }
    let any_trunc = deltas.iter().any(|d| d.trunc.is_some());
    Ok(Solved {
        u_steps,
        final_form: FinalForm {
            rbar,
            sbar,
            l,
            c: full,
            deltas,
            idents,
            trunc: any_trunc.then_some(trunc),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::q;
    use crate::valuegroup::EmbeddingBasis;

    fn vals(ns: &[u64]) -> Vec<Value> {
        let b = EmbeddingBasis::sqrt(ns).unwrap();
        (0..ns.len()).map(|i| Value::generator(&b, i)).collect()
    }

    fn phis(k: usize) -> Vec<UnitExpr> {
        (1..=k)
            .map(|i| UnitExpr::symbol(&format!("phi{i}")))
            .collect()
    }

    #[test]
    fn identity_lift_is_noop() {
        let st = CutsState::new(2, vec![vec![1, 1]], phis(1), vals(&[2, 3]), 0, vec![]).unwrap();
        let st2 = lift_type_i(&st, &vec![vec![1]], 100).unwrap();
        assert_eq!(st2.c, st.c);
        assert_eq!(st2.phis, st.phis);
        verify_lift(&st, &st2).unwrap();
    }

    #[test]
    fn type_i_lift_normalizes() {
        let st = CutsState::new(
            2,
            vec![vec![1, 0], vec![1, 1]],
            phis(2),
            vals(&[2, 3]),
            0,
            vec![],
        )
        .unwrap();
        let a = vec![vec![1, 0], vec![1, 1]];
        let st2 = lift_type_i(&st, &a, 100).unwrap();
        assert!(intmat::is_nonneg(&st2.c));
        assert_eq!(linalg::rank_int(&st2.c), 2);
        verify_lift(&st, &st2).unwrap();
    }

    #[test]
    fn type_ii_on_identification() {
        // x1 = y1, x2 = y2 with ν(x1) = √2; T-side II_1 with ν(x2) = 2ν(x1)
        let st = CutsState::new(2, vec![vec![1]], phis(1), vals(&[2]), 1, vec![]).unwrap();
        let a = vec![vec![1, 0], vec![2, 1]];
        let st2 = lift_type_ii(&st, 1, &q(2), &a, 100).unwrap();
        assert_eq!(st2.l, 1);
        verify_lift(&st, &st2).unwrap();
    }

    #[test]
    fn type_ii_consumes_pending() {
        let st = CutsState::new(
            3,
            vec![vec![1, 1]],
            phis(1),
            vals(&[2, 3]),
            0,
            vec![PendingRow {
                g: vec![0, 0],
                unit: UnitExpr::one(),
            }],
        )
        .unwrap();
        // ν(x2) = ν(x1) = √2 + √3
        let a = vec![vec![1, 0], vec![1, 1]];
        let st2 = lift_type_ii(&st, 1, &q(3), &a, 100).unwrap();
        assert_eq!(st2.l, 1);
        assert!(st2.pending.is_empty());
        verify_lift(&st, &st2).unwrap();
    }

    #[test]
    fn missing_parameter_row_is_refused() {
        let st = CutsState::new(2, vec![vec![1]], phis(1), vals(&[2]), 0, vec![]).unwrap();
        let a = vec![vec![1, 0], vec![1, 1]];
        assert!(matches!(
            lift_type_ii(&st, 1, &q(1), &a, 100),
            Err(Error::Precondition(_))
        ));
        assert!(lift_type_ii(&st, 1, &q(0), &a, 100).is_err());
    }
}

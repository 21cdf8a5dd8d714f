use monoform::certify::{self, check_certificate, check_rank_bookkeeping, check_step, Status};
use monoform::cuts::{self, lift_type_i, lift_type_ii, verify_lift, CutsState, SolveOptions};
use monoform::intmat;
use monoform::linalg::rank_int;
use monoform::num::q;
use monoform::perron::{perron_step, StepKind, TransformStep};
use monoform::problem::{CompositeDecl, Declared, ExtensionProblem, PolySpec, RawRow};
use monoform::series::{parse_poly, UnitExpr};
use monoform::valuegroup::{EmbeddingBasis, GenDescriptor, Value};

fn sqrt_vals(ns: &[u64]) -> Vec<Value> {
    let b = EmbeddingBasis::sqrt(ns).unwrap();
    (0..ns.len()).map(|i| Value::generator(&b, i)).collect()
}

fn phis(k: usize) -> Vec<UnitExpr> {
    (1..=k).map(|i| UnitExpr::symbol(&format!("phi{i}"))).collect()
}

fn problem(name: &str, ns: &[u64], n: usize, x: Vec<RawRow>) -> ExtensionProblem {
    let s = ns.len();
    ExtensionProblem {
        schema: Some("mf-problem/1".into()),
        name: name.into(),
        m: x.len(),
        n,
        basis: ns.iter().map(|&n| GenDescriptor::Sqrt { n }).collect(),
        y_values: (0..s)
            .map(|i| (0..s).map(|j| q(i64::from(i == j))).collect())
            .collect(),
        x,
        trunc: None,
        t_steps: Vec::new(),
        composite: None,
        declared: None,
    }
}

fn mono(e: &[u32]) -> RawRow {
    RawRow {
        monomial: Some(e.to_vec()),
        ..RawRow::default()
    }
}

fn solve(p: &ExtensionProblem) -> certify::Certificate {
    cuts::run_monomialization(p, &SolveOptions::default()).unwrap()
}

#[test]
fn identity_extension() {
    let p = problem("id", &[2, 3], 2, vec![mono(&[1, 0]), mono(&[0, 1])]);
    let c = solve(&p);
    assert_eq!(c.status, Status::Ok);
    assert!(c.t_steps.is_empty() && c.u_steps.is_empty());
    assert_eq!(c.final_form.unwrap().c, intmat::identity(2));
}

#[test]
fn intro_blowup_is_already_monomial() {
    let p = problem("blowup", &[2, 3], 2, vec![mono(&[1, 1]), mono(&[0, 1])]);
    let c = solve(&p);
    assert_eq!(c.status, Status::Ok);
    let f = c.final_form.as_ref().unwrap();
    assert_eq!(f.c, vec![vec![1, 1], vec![0, 1]]);
    assert_eq!(rank_int(&f.c), 2);
    assert!(check_certificate(&c).passed());
}

#[test]
fn unit_tail_is_absorbed() {
    let mut row = mono(&[1, 1]);
    row.tail = Some(PolySpec::Text("y1".into()));
    let p = problem("tail", &[2, 3], 2, vec![row]);
    let c = solve(&p);
    assert_eq!(c.status, Status::Ok, "{:?}", c.diagnosis);
    let f = c.final_form.unwrap();
    assert_eq!(f.c, vec![vec![1, 1]]);
    assert_eq!(parse_poly(&f.deltas[0].series, 2).unwrap(), parse_poly("1 + y1", 2).unwrap());
}

#[test]
fn rank_deficient_final_form_fails() {
    let p = problem("blowup", &[2, 3], 2, vec![mono(&[1, 1]), mono(&[0, 1])]);
    let mut c = solve(&p);
    c.final_form.as_mut().unwrap().c = vec![vec![1, 1], vec![1, 1]];
    let rep = check_certificate(&c);
    assert!(!rep.passed());
}

#[test]
fn corrupted_history_fails() {
    let mut row = mono(&[1, 1]);
    row.tail = Some(PolySpec::Text("y1".into()));
    let p = problem("tail", &[2, 3], 2, vec![row, mono(&[0, 1])]);
    let c = solve(&p);
    assert_eq!(c.status, Status::Ok);
    for (i, s) in c.u_steps.iter().enumerate() {
        for r in 0..s.a.len() {
            for k in 0..s.a.len() {
                let mut bad = c.clone();
                bad.u_steps[i].a[r][k] += 1;
                assert!(!check_certificate(&bad).passed(), "step {i} entry ({r},{k})");
            }
        }
    }
}

#[test]
fn step_negative_controls() {
    let vals = sqrt_vals(&[2, 3]);
    let (step, _) = perron_step(&vals).unwrap();
    assert!(check_step(&step, &vals).passed());
    assert!(!check_step(&TransformStep::type_i(vec![vec![2, 0], vec![0, 1]]), &vals).passed());
    let neg = check_step(&TransformStep::type_i(vec![vec![1, 0], vec![-1, 1]]), &vals);
    assert!(neg.failed().iter().any(|c| c.name == "step.nonneg"));
}

#[test]
fn bookkeeping_rank_one() {
    let p = problem("r1", &[2, 3], 2, vec![mono(&[1, 1])]);
    assert!(check_rank_bookkeeping(&p, None).passed());
}

#[test]
fn declared_rbar_above_sbar_fails() {
    let mut p = problem("r1", &[2, 3], 2, vec![mono(&[1, 1])]);
    p.declared = Some(Declared {
        rbar: Some(3),
        sbar: Some(2),
        ..Declared::default()
    });
    assert!(!check_rank_bookkeeping(&p, None).passed());
}

#[test]
fn two_level_bookkeeping() {
    let mut p = problem("two", &[2], 2, vec![mono(&[1, 0])]);
    let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    p.basis = vec![GenDescriptor::Sqrt { n: 2 }];
    p.y_values = vec![vec![q(1)], vec![q(0)]];
    p.composite = Some(CompositeDecl {
        levels: vec![
            vec![GenDescriptor::Sqrt { n: 2 }],
            vec![GenDescriptor::Sqrt { n: 3 }],
        ],
        y_values: vec![vec![s(&["1"]), s(&["0"])], vec![s(&["0"]), s(&["1"])]],
    });
    let rep = check_rank_bookkeeping(&p, None);
    assert!(rep.passed(), "{}", rep.text());
    let b = certify::bookkeeping(&p, None).unwrap();
    assert_eq!((b.rank_u, b.rank_t), (2, 1));
}

#[test]
fn lift_type_i_examples() {
    let st = CutsState::new(2, vec![vec![1, 1]], phis(1), sqrt_vals(&[2, 3]), 0, vec![]).unwrap();
    let same = lift_type_i(&st, &vec![vec![1]], 100).unwrap();
    assert_eq!(same.c, vec![vec![1, 1]]);
    assert!(same.u_history.is_empty());

    let st = CutsState::new(2, vec![vec![1, 0], vec![0, 1]], phis(2), sqrt_vals(&[2, 3]), 0, vec![])
        .unwrap();
    let a = vec![vec![1, 0], vec![1, 1]];
    let st2 = lift_type_i(&st, &a, 100).unwrap();
    assert!(intmat::is_nonneg(&st2.c));
    assert_eq!(rank_int(&st2.c), 2);
    verify_lift(&st, &st2).unwrap();
}

#[test]
fn lift_type_ii_examples() {
    let st = CutsState::new(2, vec![vec![1]], phis(1), sqrt_vals(&[2]), 1, vec![]).unwrap();

    let id = lift_type_ii(&st, 1, &q(1), &intmat::identity(2), 100).unwrap();
    assert_eq!(id.l, 1);
    assert_eq!(id.c, st.c);
    verify_lift(&st, &id).unwrap();

    let a = vec![vec![1, 1], vec![0, 1]];
    let st2 = lift_type_ii(&st, 1, &q(2), &a, 100).unwrap();
    st2.check_invariants().unwrap();
    assert_eq!(rank_int(&st2.c), 1);
    assert!(matches!(st2.u_history.steps[0].kind, StepKind::II { r: 1 }));
    verify_lift(&st, &st2).unwrap();

    assert!(lift_type_ii(&st, 1, &q(0), &a, 100).is_err());
}

#[test]
fn field_case_has_no_valued_rows() {
    let p = problem("field", &[2], 1, vec![]);
    let c = solve(&p);
    assert_eq!(c.status, Status::Ok, "{:?}", c.diagnosis);
    assert_eq!(c.final_form.unwrap().rbar, 0);
}

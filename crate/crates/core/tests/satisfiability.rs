mod common;

use proptest::prelude::*;

use common::{all_traces, formula_up_to, rng, APS, PROGS};
use hyperpdl::lasso::LassoWord;
use hyperpdl::oracle::{LassoAssignment, Oracle, QuantifierMode};
use hyperpdl::satisfiability::{satisfiable, Fragment, SatError, SatOptions};
use hyperpdl::syntax::{parse_formula, Formula, Vocabulary};
use hyperpdl::world::WorldInterp;

type Trace = LassoWord<(usize, usize)>;

fn opts() -> SatOptions {
    SatOptions {
        aps: APS.iter().map(|s| s.to_string()).collect(),
        programs: PROGS.iter().map(|s| s.to_string()).collect(),
        ..SatOptions::default()
    }
}

fn interp() -> WorldInterp {
    WorldInterp::traces(&APS, &PROGS)
}

/// `Q1 p1. Q2 p2. .. body`, `true` meaning existential.
fn close(prefix: &[bool], body: Formula) -> Formula {
    prefix.iter().enumerate().rev().fold(body, |g, (i, &e)| {
        let v = format!("p{}", i + 1);
        if e {
            Formula::exists(v, g)
        } else {
            Formula::forall(v, g)
        }
    })
}

/// Whether the closed formula holds on the trace set.
fn holds_on(set: &[Trace], g: &Formula) -> bool {
    Oracle::new(interp()).with_mode(QuantifierMode::TraceSet(set.to_vec())).eval(&LassoAssignment::empty(), 0, g).unwrap()
}

fn f(s: &str) -> Formula {
    parse_formula(s, &Vocabulary::open()).unwrap()
}

#[test]
fn fragments_and_errors() {
    let o = opts();
    assert_eq!(satisfiable(&f("forall p. forall q. a@p -> a@q"), &o).unwrap().fragment, Fragment::ForallStar);
    assert_eq!(satisfiable(&f("exists p. a@p"), &o).unwrap().fragment, Fragment::ExistsStar);
    assert_eq!(satisfiable(&f("exists p. forall q. a@p"), &o).unwrap().fragment, Fragment::ExistsForall);
    assert!(matches!(satisfiable(&f("forall p. exists q. a@p <-> a@q"), &o), Err(SatError::Unsupported(_))));
    assert!(matches!(satisfiable(&f("(exists p. a@p) & (exists q. b@q)"), &o), Err(SatError::Unsupported(_))));
}

#[test]
fn witness_names_follow_the_prefix() {
    let r = satisfiable(&f("exists x. exists y. a@x & <(s,t)> !a@y"), &opts()).unwrap();
    assert!(r.satisfiable);
    let (names, traces) = r.witness.unwrap();
    assert_eq!(names, vec!["x".to_string(), "y".to_string()]);
    assert_eq!(traces.len(), 2);
}

#[test]
fn delta_needs_infinitely_many_steps() {
    // a trace taking s twice in a row from every point on: (s)^omega
    let r = satisfiable(&f("exists p. delta ((s) ; (s))"), &opts()).unwrap();
    assert!(r.satisfiable);
    let trace = &r.witness.unwrap().1[0];
    assert!(trace.period.iter().all(|&(_, p)| PROGS[p] == "s"));
    assert!(!satisfiable(&f("exists p. delta ((s) ; (s)) & [any*] [(s)] false"), &opts()).unwrap().satisfiable);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn existential_witnesses_satisfy_the_body(seed in any::<u64>(), n in 1usize..=2) {
        let mut r = rng(seed);
        let body = formula_up_to(&mut r, n, 6);
        let res = satisfiable(&close(&vec![true; n], body.clone()), &opts()).unwrap();
        let oracle = Oracle::new(interp());
        match &res.witness {
            Some((_, traces)) => {
                prop_assert!(res.satisfiable);
                prop_assert!(oracle.eval(&LassoAssignment::new(traces.clone()), 0, &body).unwrap(), "{}", body);
            }
            None => {
                prop_assert!(!res.satisfiable);
                let short = all_traces(4, 2, if n == 1 { 2 } else { 1 });
                let found = if n == 1 {
                    short.iter().any(|t| oracle.eval(&LassoAssignment::new(vec![t.clone()]), 0, &body).unwrap())
                } else {
                    short.iter().any(|t| short.iter().any(|u| oracle.eval(&LassoAssignment::new(vec![t.clone(), u.clone()]), 0, &body).unwrap()))
                };
                prop_assert!(!found, "short witness for unsatisfiable {}", body);
            }
        }
    }

    #[test]
    fn universal_formulas_have_single_trace_models(seed in any::<u64>(), n in 1usize..=2) {
        let mut r = rng(seed);
        let body = formula_up_to(&mut r, n, 6);
        let g = close(&vec![false; n], body);
        let res = satisfiable(&g, &opts()).unwrap();
        match &res.witness {
            Some((_, traces)) => {
                prop_assert_eq!(traces.len(), 1);
                prop_assert!(holds_on(traces, &g), "{}", g);
            }
            None => {
                prop_assert!(!res.satisfiable);
                for t in all_traces(4, 2, 2) {
                    prop_assert!(!holds_on(&[t], &g), "{}", g);
                }
            }
        }
    }

    #[test]
    fn one_variable_quantifiers_agree(seed in any::<u64>()) {
        let mut r = rng(seed);
        let body = formula_up_to(&mut r, 1, 7);
        let e = satisfiable(&close(&[true], body.clone()), &opts()).unwrap().satisfiable;
        let a = satisfiable(&close(&[false], body), &opts()).unwrap().satisfiable;
        prop_assert_eq!(e, a);
    }

    #[test]
    fn exists_forall_models_are_the_witnesses(seed in any::<u64>()) {
        let mut r = rng(seed);
        let body = formula_up_to(&mut r, 2, 6);
        let g = close(&[true, false], body);
        let res = satisfiable(&g, &opts()).unwrap();
        match &res.witness {
            Some((_, traces)) => prop_assert!(holds_on(traces, &g), "{}", g),
            None => {
                prop_assert!(!res.satisfiable);
                for t in all_traces(4, 2, 2) {
                    prop_assert!(!holds_on(&[t], &g), "{}", g);
                }
            }
        }
    }
}

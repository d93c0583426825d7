mod common;

use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use common::{formula_up_to, random_kts, rng, PROGS};
use hyperpdl::kts::{parse_kts, Kts};
use hyperpdl::model_checker::{model_check, CheckError, CheckOptions};
use hyperpdl::oracle::{LassoAssignment, Oracle, QuantifierMode};
use hyperpdl::paths::parse_paths;
use hyperpdl::syntax::{parse_formula, Formula, Vocabulary};
use hyperpdl::world::WorldInterp;

fn f(s: &str) -> Formula {
    parse_formula(s, &Vocabulary::open()).unwrap()
}

fn check(k: &Kts, g: &Formula) -> bool {
    model_check(k, g, &CheckOptions::default()).unwrap().holds
}

/// Every state has exactly one outgoing edge.
fn deterministic_kts(r: &mut ChaCha8Rng, max: usize) -> Kts {
    let mut k = random_kts(r, max);
    let n = k.states.len();
    k.edges = vec![vec![vec![]; n]; PROGS.len()];
    for s in 0..n {
        let p = r.gen_range(0..PROGS.len());
        k.edges[p][s].push(r.gen_range(0..n));
    }
    k
}

fn close(r: &mut ChaCha8Rng, body: Formula) -> Formula {
    let q = |r: &mut ChaCha8Rng, v: &str, b: Formula| if r.gen_bool(0.5) { Formula::exists(v, b) } else { Formula::forall(v, b) };
    let inner = q(r, "p2", body);
    q(r, "p1", inner)
}

const OD: &str = "forall p1. forall p2. [any*] (a@p1 <-> a@p2)";

#[test]
fn golden_verdicts() {
    let uniform = "aps a\nprograms s t\nstate q0 { a }\nstate q1 { a }\ninit q0\nedge q0 s q1\nedge q0 t q0\nedge q1 s q0\n";
    let branch = "aps a\nprograms s\nstate q0 { }\nstate q1 { a }\nstate q2 { }\ninit q0\nedge q0 s q1\nedge q0 s q2\nedge q1 s q1\nedge q2 s q2\n";
    let cycle = "aps a\nprograms s\nstate q0 { a }\nstate q1 { }\ninit q0\nedge q0 s q1\nedge q1 s q0\n";
    assert!(check(&parse_kts(uniform).unwrap(), &f(OD)));
    assert!(!check(&parse_kts(branch).unwrap(), &f(OD)));
    assert!(check(&parse_kts(cycle).unwrap(), &f("forall p1. forall p2. [(any;any)*] (a@p1 <-> a@p2)")));
    // the same cycle without the parity restriction: a path and its shift never agree,
    // but both paths start at the initial state
    assert!(check(&parse_kts(cycle).unwrap(), &f(OD)));
}

#[test]
fn counterexample_path_is_a_system_path() {
    let k = parse_kts("aps a\nprograms s\nstate q0 { }\nstate q1 { a }\nstate q2 { }\ninit q0\nedge q0 s q1\nedge q0 s q2\nedge q1 s q1\nedge q2 s q2\n").unwrap();
    let v = model_check(&k, &f("exists p. <(s)> a@p"), &CheckOptions::default()).unwrap();
    assert!(v.holds);
    let w = v.subformulas[0].witness.as_ref().unwrap();
    let path = w.path.as_ref().unwrap();
    let interp = WorldInterp::kts(k);
    let parsed = parse_paths(&format!("path p: {path}"), &interp).unwrap();
    let pa = LassoAssignment::new(vec![parsed[0].1.clone()]);
    assert_eq!(pa.world(0, 0), 0);
    let body = hyperpdl::syntax::parse_with_scope("<(s)> a@p", &Vocabulary::open(), &["p"]).unwrap();
    assert!(Oracle::new(interp).eval(&pa, 0, &body).unwrap());
}

#[test]
fn open_formulas_are_rejected() {
    let k = parse_kts("aps a\nprograms s\nstate q0 { a }\ninit q0\nedge q0 s q0\n").unwrap();
    let g = hyperpdl::syntax::parse_with_scope("a@p", &Vocabulary::open(), &["p"]).unwrap();
    assert!(matches!(model_check(&k, &g, &CheckOptions::default()), Err(CheckError::NotClosed(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn deterministic_systems_match_the_oracle(seed in any::<u64>()) {
        let mut r = rng(seed);
        let k = deterministic_kts(&mut r, 4);
        let body = formula_up_to(&mut r, 2, 7);
        let g = close(&mut r, body);
        let want = Oracle::new(WorldInterp::kts(k.clone()))
            .with_mode(QuantifierMode::Deterministic)
            .eval(&LassoAssignment::empty(), 0, &g)
            .unwrap();
        prop_assert_eq!(check(&k, &g), want, "{}", g);
        // one path per state: the quantifier kind is irrelevant
        if let Formula::Exists(v, b) | Formula::Forall(v, b) = &g {
            prop_assert_eq!(check(&k, &Formula::exists(v.clone(), (**b).clone())), check(&k, &Formula::forall(v.clone(), (**b).clone())));
        }
    }

    #[test]
    fn negation_flips(seed in any::<u64>()) {
        let mut r = rng(seed);
        let k = random_kts(&mut r, 3);
        let body = formula_up_to(&mut r, 2, 6);
        let g = close(&mut r, body);
        prop_assert_ne!(check(&k, &g), check(&k, &Formula::not(g.clone())));
    }

    #[test]
    fn swapping_universal_quantifiers(seed in any::<u64>()) {
        let mut r = rng(seed);
        let k = random_kts(&mut r, 3);
        let body = formula_up_to(&mut r, 2, 6);
        let swapped = rename(&body);
        prop_assert_eq!(
            check(&k, &Formula::forall("p1", Formula::forall("p2", body))),
            check(&k, &Formula::forall("p1", Formula::forall("p2", swapped)))
        );
    }

    #[test]
    fn existential_witnesses_satisfy_the_body(seed in any::<u64>()) {
        let mut r = rng(seed);
        let k = random_kts(&mut r, 4);
        let body = formula_up_to(&mut r, 1, 7);
        let g = Formula::exists("p1", body.clone());
        let v = model_check(&k, &g, &CheckOptions::default()).unwrap();
        if let Some(path) = v.subformulas[0].witness.as_ref().and_then(|w| w.path.clone()) {
            prop_assert!(v.holds);
            let interp = WorldInterp::kts(k.clone());
            let parsed = parse_paths(&format!("path p1: {path}"), &interp).unwrap();
            let pa = LassoAssignment::new(vec![parsed[0].1.clone()]);
            prop_assert_eq!(pa.world(0, 0), k.init);
            prop_assert!(Oracle::new(interp).eval(&pa, 0, &body).unwrap(), "{} on {}", body, path);
        }
    }
}

/// `p1` and `p2` exchanged.
fn rename(g: &Formula) -> Formula {
    let swap = |text: String| text.replace("@p1", "@tmp").replace("@p2", "@p1").replace("@tmp", "@p2");
    hyperpdl::syntax::parse_with_scope(&swap(g.to_string()), &Vocabulary::open(), &["p1", "p2"]).unwrap()
}

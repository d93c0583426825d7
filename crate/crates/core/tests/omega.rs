mod common;

use common::{omega_member, random_trace, rng};
use hyperpdl::aba::accepts_lasso;
use hyperpdl::formula_automata::{build_aba, BuildOptions};
use hyperpdl::lasso::LassoWord;
use hyperpdl::omega::{compile_omega, parse_omega_spec, OmegaError};
use hyperpdl::oracle::{LassoAssignment, Oracle};
use hyperpdl::world::WorldInterp;

type Trace = LassoWord<(usize, usize)>;

fn t(stem: &[(usize, usize)], period: &[(usize, usize)]) -> Trace {
    LassoWord::new(stem.to_vec(), period.to_vec())
}

/// Specifications with a few lassos known to be in the language.
fn specs() -> Vec<(&'static str, &'static str, Vec<Vec<Trace>>)> {
    vec![
        (
            "a exactly at even positions",
            "aps a\nprograms s\npaths 1\npair:\n  stem: eps\n  loop: [{a}]|(_) [{}]|(_)\n",
            vec![vec![t(&[], &[(1, 0), (0, 0)])], vec![t(&[(1, 0), (0, 0)], &[(1, 0), (0, 0), (1, 0), (0, 0)])]],
        ),
        (
            "infinitely many a",
            "aps a\nprograms s\npaths 1\npair:\n  stem: ([{}]|(s) + [{a}]|(s))*\n  loop: [{}]|(s)* [{a}]|(s)\n",
            vec![vec![t(&[(0, 0)], &[(0, 0), (1, 0)])], vec![t(&[], &[(1, 0)])]],
        ),
        (
            "eventually only program s",
            "aps a\nprograms s t\npaths 1\npair:\n  stem: ([{}]|(_) + [{a}]|(_))*\n  loop: [{}]|(s) + [{a}]|(s)\n",
            vec![vec![t(&[(0, 1), (1, 1)], &[(1, 0)])], vec![t(&[], &[(0, 0), (1, 0)])]],
        ),
        (
            "two paths agree on a forever",
            "aps a\nprograms s t\npaths 2\npair:\n  stem: eps\n  loop: [{a},{a}]|(_,_) + [{},{}]|(_,_)\n",
            vec![vec![t(&[], &[(1, 0), (0, 1)]), t(&[(1, 1)], &[(0, 0), (1, 0)])]],
        ),
        (
            "union of two pairs",
            "aps a\nprograms s t\npaths 1\npair:\n  stem: eps\n  loop: [{a}]|(s)\npair:\n  stem: [{}]|(t)\n  loop: [{}]|(t)\n",
            vec![vec![t(&[], &[(1, 0)])], vec![t(&[(0, 1)], &[(0, 1)])]],
        ),
        (
            "period three with programs",
            "aps a b\nprograms s t\npaths 1\npair:\n  stem: [{b}]|(_)*\n  loop: [{}]|(s) [{}]|(s) [{a}]|(t)\n",
            vec![vec![t(&[(2, 1), (2, 0)], &[(0, 0), (0, 0), (1, 1)])], vec![t(&[], &[(0, 0), (0, 0), (1, 1)])]],
        ),
    ]
}

#[test]
fn compiled_formulas_define_the_languages() {
    let mut r = rng(21);
    for (name, text, members) in specs() {
        let spec = parse_omega_spec(text).unwrap();
        let f = compile_omega(&spec).unwrap();
        let interp = WorldInterp::traces(&spec.aps, &spec.programs);
        let oracle = Oracle::new(interp.clone());
        let aba = build_aba(&f, spec.paths, &interp, &BuildOptions::default()).unwrap();
        let check = |pa: &LassoAssignment| {
            let want = omega_member(&spec.pairs, &interp, &pa.nu());
            assert_eq!(oracle.eval(pa, 0, &f).unwrap(), want, "{name}: oracle on {:?}", pa.paths());
            assert_eq!(accepts_lasso(&aba, &pa.nu()).unwrap(), want, "{name}: automaton on {:?}", pa.paths());
            want
        };
        for m in members {
            assert!(check(&LassoAssignment::new(m)), "{name}: constructed member rejected");
        }
        for _ in 0..60 {
            let traces = (0..spec.paths)
                .map(|_| random_trace(&mut r, spec.aps.len(), spec.programs.len(), 3, 4))
                .collect();
            check(&LassoAssignment::new(traces));
        }
    }
}

#[test]
fn rejected_specifications() {
    let ok = "aps a\nprograms s\npaths 1\npair:\n  stem: eps\n  loop: [{a}]|(s)\n";
    assert!(parse_omega_spec(ok).is_ok());
    let cases = [
        ("aps a\nprograms s\npaths 1\npair:\n  stem: eps\n  loop: [{a}]|(s)*\n", OmegaError::EmptyLoop(1)),
        ("aps a\nprograms s\npaths 1\npair:\n  stem: eps\n  loop: [{a}]|(s) + eps\n", OmegaError::EmptyLoop(1)),
        ("aps a\nprograms s\npaths 2\npair:\n  stem: eps\n  loop: [{a}]|(s)\n", OmegaError::Arity { expected: 2, got: 1 }),
        ("aps a\nprograms s\npaths 1\npair:\n  stem: eps\n  loop: [{b}]|(s)\n", OmegaError::UnknownAp("b".into())),
        ("aps a\nprograms s\npaths 1\npair:\n  stem: eps\n  loop: [{a}]|(u)\n", OmegaError::UnknownProgram("u".into())),
        ("aps a\npaths 1\npair:\n  stem: eps\n  loop: [{a}]|(s)\n", OmegaError::Missing("programs")),
        ("aps a\nprograms s\npaths 1\n", OmegaError::NoPairs),
    ];
    for (text, want) in cases {
        assert_eq!(parse_omega_spec(text), Err(want), "{text}");
    }
    assert!(matches!(parse_omega_spec("aps a\nprograms s\npaths 1\npair:\n  stem: eps\n"), Err(OmegaError::Syntax(4, _))));
    assert!(matches!(parse_omega_spec("aps a\nprograms s\npaths 1\npair:\n  stem: eps\n  loop: [{a}|(s)\n"), Err(OmegaError::Regex(6, _))));
}

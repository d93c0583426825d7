mod common;

use proptest::prelude::*;

use common::{random_kts, random_path, random_trace, rng, APS, PROGS};
use hyperpdl::kts::{parse_kts, parse_kts_with, KtsError, KtsFormat};
use hyperpdl::lasso::LassoWord;
use hyperpdl::oracle::LassoAssignment;
use hyperpdl::paths::{complete_path, format_path, parse_paths, PathsError};
use hyperpdl::world::WorldInterp;

#[test]
fn structural_errors_carry_lines() {
    let cases: [(&str, KtsError); 6] = [
        ("aps a\nprograms s\nstate q0 { a }\nedge q0 s q0\n", KtsError::MissingInit),
        ("programs s\nstate q0\nstate q1\ninit q0\nedge q0 s q1\n", KtsError::DeadState { name: "q1".into() }),
        ("programs s\nstate q0\nstate q0\n", KtsError::DuplicateState { line: 3, name: "q0".into() }),
        ("aps a\nprograms s\nstate q0 { b }\n", KtsError::UnknownAp { line: 3, name: "b".into() }),
        ("programs s\nstate q0\ninit q0\nedge q0 u q0\n", KtsError::UnknownProgram { line: 4, name: "u".into() }),
        ("programs s\nstate q0\ninit q1\n", KtsError::UnknownState { line: 3, name: "q1".into() }),
    ];
    for (text, want) in cases {
        assert_eq!(parse_kts(text), Err(want), "{text}");
    }
    assert!(matches!(parse_kts("programs s\nstates q0\n"), Err(KtsError::Syntax { line: 2, .. })));
}

#[test]
fn dialects() {
    let kripke = parse_kts_with("aps a\nstate x { a }\nstate y\ninit x\nedge x y\nedge y x\n", KtsFormat::Kripke).unwrap();
    assert_eq!(kripke.programs, vec!["step"]);
    assert_eq!(kripke.post(0, 0), &[1]);
    assert!(matches!(parse_kts_with("programs s\nstate x\ninit x\nedge x x\n", KtsFormat::Kripke), Err(KtsError::Syntax { line: 1, .. })));
    assert!(matches!(parse_kts_with("aps a\nstate x\ninit x\nedge x s x\n", KtsFormat::Kripke), Err(KtsError::Syntax { line: 4, .. })));
    let lts = parse_kts_with("programs go stay\nstate x\nstate y\ninit x\nedge x go y\nedge y stay y\n", KtsFormat::Lts).unwrap();
    assert!(lts.aps.is_empty() && lts.labels.iter().all(|l| l.is_empty()));
    assert!(matches!(parse_kts_with("programs go\nstate x { a }\ninit x\nedge x go x\n", KtsFormat::Lts), Err(KtsError::Syntax { line: 2, .. })));
}

#[test]
fn paths_must_follow_edges() {
    let k = parse_kts("aps a\nprograms s t\nstate q0\nstate q1 { a }\ninit q0\nedge q0 s q1\nedge q1 t q1\nedge q1 s q0\n").unwrap();
    let interp = WorldInterp::kts(k);
    assert!(parse_paths("path p: (q0 s) | (q1 t)", &interp).is_ok());
    assert!(parse_paths("path p: | (q0 s) (q1 s)", &interp).is_ok());
    // the period's last step must lead back to its first world
    assert!(matches!(parse_paths("path p: | (q0 s) (q1 t)", &interp), Err(PathsError::NotAPath(1, ..))));
    assert!(matches!(parse_paths("path p: (q0 t) | (q1 t)", &interp), Err(PathsError::NotAPath(1, ..))));
    assert_eq!(parse_paths("path p: (q0 s) |", &interp), Err(PathsError::EmptyPeriod(1)));
    assert_eq!(parse_paths("path p: | (q7 s)", &interp), Err(PathsError::UnknownWorld(1, "q7".into())));
    assert_eq!(parse_paths("path p: | (q1 u)", &interp), Err(PathsError::UnknownProgram(1, "u".into())));
    assert_eq!(parse_paths("path p: | (q1 t)\npath p: | (q1 t)", &interp), Err(PathsError::Duplicate(2, "p".into())));
}

#[test]
fn trace_worlds_are_proposition_sets() {
    let interp = WorldInterp::traces(&APS, &PROGS);
    let parsed = parse_paths("path x: ({a} s) | ({a b} t) ({} s)", &interp).unwrap();
    let x = &parsed[0].1;
    assert_eq!(x.stem, vec![(1, 0)]);
    assert_eq!(x.period, vec![(3, 1), (0, 0)]);
    assert!(matches!(parse_paths("path x: | ({c} s)", &interp), Err(PathsError::UnknownWorld(1, _))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn printed_systems_reparse(seed in any::<u64>()) {
        let mut r = rng(seed);
        let k = random_kts(&mut r, 5);
        prop_assert_eq!(parse_kts(&k.print()).unwrap(), k);
    }

    #[test]
    fn printed_paths_reparse(seed in any::<u64>()) {
        let mut r = rng(seed);
        let k = random_kts(&mut r, 4);
        let path = random_path(&mut r, &k, 3, 3);
        let interp = WorldInterp::kts(k.clone());
        let back = parse_paths(&format!("path p: {}", format_path(&interp, &path)), &interp).unwrap();
        prop_assert_eq!(&back[0].1, &path);
        // completing a prefix of the path gives another system path
        let prefix: Vec<_> = (0..path.len()).map(|i| *path.at(i)).collect();
        let done = complete_path(&k, &prefix);
        let text = format!("path p: {}", format_path(&interp, &done));
        prop_assert!(parse_paths(&text, &interp).is_ok(), "{}", text);
        prop_assert_eq!(&(0..prefix.len()).map(|i| *done.at(i)).collect::<Vec<_>>(), &prefix);
        let from_start = complete_path(&k, &[]);
        prop_assert_eq!(from_start.at(0).0, k.init);
    }

    #[test]
    fn printed_traces_reparse(seed in any::<u64>()) {
        let mut r = rng(seed);
        let interp = WorldInterp::traces(&APS, &PROGS);
        let t = random_trace(&mut r, APS.len(), PROGS.len(), 3, 3);
        let back = parse_paths(&format!("path p: {}", format_path(&interp, &t)), &interp).unwrap();
        prop_assert_eq!(&back[0].1, &t);
    }

    #[test]
    fn combined_word_reads_every_path(seed in any::<u64>(), n in 1usize..=3) {
        let mut r = rng(seed);
        let paths: Vec<LassoWord<(usize, usize)>> = (0..n).map(|_| random_trace(&mut r, 2, 2, 3, 4)).collect();
        let pa = LassoAssignment::new(paths.clone());
        let word = pa.nu();
        for j in 0..40 {
            let l = word.at(j);
            for (i, p) in paths.iter().enumerate() {
                prop_assert_eq!((l.worlds[i], l.progs[i]), *p.at(j));
                prop_assert_eq!(pa.world(i, j), p.at(j).0);
                prop_assert_eq!(pa.prog(i, j), p.at(j).1);
            }
        }
    }

    #[test]
    fn unrolling_keeps_the_word(seed in any::<u64>(), extra in 0usize..4, reps in 1usize..4) {
        let mut r = rng(seed);
        let w = random_trace(&mut r, 2, 2, 3, 3);
        let u = w.unroll(w.stem.len() + extra, w.period.len() * reps);
        for j in 0..30 {
            prop_assert_eq!(w.at(j), u.at(j));
        }
    }
}

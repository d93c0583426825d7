//! Satisfiability of linear formulas (a quantifier prefix over a
//! quantifier-free body) over arbitrary trace sets, for the prefixes
//! `forall*`, `exists*` and `exists* forall*`.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::aba::{is_empty, AbaError, Automaton, MhNba};
use crate::formula_automata::{BuildError, BuildOptions, Builder};
use crate::paths::Path;
use crate::syntax::{to_nnf, Formula, PathVar, Program, TupleSym};
use crate::world::WorldInterp;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Fragment {
    ForallStar,
    ExistsStar,
    ExistsForall,
    Unsupported,
}

/// A formula split into its quantifier prefix and body. `prefix[i]` is
/// `(existential, name)` for the variable with index `i + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Linear {
    pub fragment: Fragment,
    pub prefix: Vec<(bool, String)>,
    pub body: Formula,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SatError {
    #[error("{0}: satisfiability is undecidable for linear formulas with a forall-exists alternation, and only forall*, exists* and exists*forall* prefixes are supported")]
    Unsupported(String),
    #[error("the trace alphabet has {letters} letters, above the configured cap of {cap}")]
    AlphabetTooLarge { letters: u128, cap: u128 },
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Emptiness(#[from] AbaError),
}

#[derive(Clone, Debug)]
pub struct SatOptions {
    /// Propositions and programs of the trace alphabet in addition to those
    /// the formula mentions.
    pub aps: Vec<String>,
    pub programs: Vec<String>,
    pub build: BuildOptions,
    pub alphabet_cap: u128,
}

impl Default for SatOptions {
    fn default() -> Self {
        SatOptions { aps: vec![], programs: vec![], build: BuildOptions::default(), alphabet_cap: 1_000_000 }
    }
}

#[derive(Clone, Debug)]
pub struct SatResult {
    pub fragment: Fragment,
    pub satisfiable: bool,
    /// The formula handed to the automaton: the compressed body for
    /// `forall*`, the expansion for `exists* forall*`.
    pub decided: Formula,
    pub interp: WorldInterp,
    /// Names and traces of a satisfying trace set.
    pub witness: Option<(Vec<String>, Vec<Path>)>,
    pub automaton_states: usize,
    pub explored_states: usize,
}

/// Reads the quantifier prefix through negations; `None` when a quantifier
/// occurs below the prefix.
pub fn linear_form(f: &Formula) -> Option<Linear> {
    let mut prefix = Vec::new();
    let mut positive = true;
    let mut cur = f;
    loop {
        match cur {
            Formula::Not(b) => {
                positive = !positive;
                cur = b;
            }
            Formula::Exists(v, b) => {
                prefix.push((positive, v.clone()));
                cur = b;
            }
            Formula::Forall(v, b) => {
                prefix.push((!positive, v.clone()));
                cur = b;
            }
            Formula::NotExists(v, b) => {
                prefix.push((!positive, v.clone()));
                positive = !positive;
                cur = b;
            }
            _ => break,
        }
    }
    if !cur.is_quantifier_free() {
        return None;
    }
    let body = if positive { cur.clone() } else { Formula::not(cur.clone()) };
    let first_forall = prefix.iter().position(|(e, _)| !e).unwrap_or(prefix.len());
    let fragment = if prefix[first_forall..].iter().any(|(e, _)| *e) {
        Fragment::Unsupported
    } else if first_forall == prefix.len() {
        Fragment::ExistsStar
    } else if first_forall == 0 {
        Fragment::ForallStar
    } else {
        Fragment::ExistsForall
    };
    Some(Linear { fragment, prefix, body })
}

pub fn classify_fragment(f: &Formula) -> Fragment {
    linear_form(f).map_or(Fragment::Unsupported, |l| l.fragment)
}

/// Merges the tuple positions in `group` (0-based) into the smallest one.
/// Wildcards only give `_`, a single program σ among wildcards gives σ, and
/// two different programs give an unsatisfiable step `{false}? ; (..)`.
pub fn compress_tuple(t: &TupleSym, group: &[usize]) -> Program {
    let at = *group.iter().min().expect("group is nonempty");
    let named: BTreeSet<&String> = group.iter().filter_map(|&i| t.0[i].as_ref()).collect();
    let merged_entry = if named.len() == 1 { named.iter().next().map(|s| s.to_string()) } else { None };
    let entries: Vec<_> = t
        .0
        .iter()
        .enumerate()
        .filter(|(i, _)| *i == at || !group.contains(i))
        .map(|(i, e)| if i == at { merged_entry.clone() } else { e.clone() })
        .collect();
    let tup = Program::Tup(TupleSym(entries));
    if named.len() > 1 {
        Program::concat(Program::test(Formula::False), tup)
    } else {
        tup
    }
}

fn rewrite(f: &Formula, atom: &dyn Fn(&PathVar) -> PathVar, tup: &dyn Fn(&TupleSym) -> Program) -> Formula {
    let r = |g: &Formula| Box::new(rewrite(g, atom, tup));
    match f {
        Formula::True | Formula::False => f.clone(),
        Formula::Atom { ap, var } => Formula::Atom { ap: ap.clone(), var: atom(var) },
        Formula::Not(g) => Formula::Not(r(g)),
        Formula::And(l, g) => Formula::And(r(l), r(g)),
        Formula::Or(l, g) => Formula::Or(r(l), r(g)),
        Formula::Exists(v, g) => Formula::Exists(v.clone(), r(g)),
        Formula::Forall(v, g) => Formula::Forall(v.clone(), r(g)),
        Formula::NotExists(v, g) => Formula::NotExists(v.clone(), r(g)),
        Formula::Diamond(p, g) => Formula::Diamond(rewrite_program(p, atom, tup), r(g)),
        Formula::Boxed(p, g) => Formula::Boxed(rewrite_program(p, atom, tup), r(g)),
        Formula::Delta(p) => Formula::Delta(rewrite_program(p, atom, tup)),
        Formula::NotDelta(p) => Formula::NotDelta(rewrite_program(p, atom, tup)),
    }
}

fn rewrite_program(p: &Program, atom: &dyn Fn(&PathVar) -> PathVar, tup: &dyn Fn(&TupleSym) -> Program) -> Program {
    let r = |q: &Program| Box::new(rewrite_program(q, atom, tup));
    match p {
        Program::Tup(t) => tup(t),
        Program::Eps => Program::Eps,
        Program::Sum(l, q) => Program::Sum(r(l), r(q)),
        Program::Concat(l, q) => Program::Concat(r(l), r(q)),
        Program::Star(q) => Program::Star(r(q)),
        Program::Test(g) => Program::Test(Box::new(rewrite(g, atom, tup))),
    }
}

/// `f[keep/drop]`: the variable with index `drop` becomes `keep`, both
/// are renamed to `keep.name`, later indices shift down by one and every
/// tuple merges the two positions.
pub fn merge_vars(f: &Formula, keep: &PathVar, drop: usize) -> Formula {
    assert!(keep.index >= 1 && keep.index < drop, "merge needs keep < drop");
    let atom = |v: &PathVar| {
        if v.index == keep.index || v.index == drop {
            keep.clone()
        } else if v.index > drop {
            PathVar::new(v.name.clone(), v.index - 1)
        } else {
            v.clone()
        }
    };
    let tup = |t: &TupleSym| compress_tuple(t, &[keep.index - 1, drop - 1]);
    rewrite(f, &atom, &tup)
}

/// The body of a `forall*` formula over `n` variables with all of them
/// merged into a single variable `p`.
pub fn collapse_forall(body: &Formula, n: usize) -> Formula {
    let p = PathVar::new("p", 1);
    let renamed = rewrite(body, &|v| if v.index == 1 { p.clone() } else { v.clone() }, &|t| Program::Tup(t.clone()));
    (2..=n).fold(renamed, |g, _| merge_vars(&g, &p, 2))
}

/// `exists x1..xn forall y1..ym. body` as the `exists*` body
/// `AND over j in [n]^m of body[x_j1/y1]..[x_jm/ym]`.
pub fn expand_exists_forall(prefix: &[(bool, String)], body: &Formula) -> Formula {
    let n = prefix.iter().take_while(|(e, _)| *e).count();
    let m = prefix.len() - n;
    let mut conjuncts = Vec::new();
    let mut choice = vec![0usize; m];
    loop {
        let g = choice.iter().fold(body.clone(), |g, &j| merge_vars(&g, &PathVar::new(prefix[j].1.clone(), j + 1), n + 1));
        conjuncts.push(g);
        if n == 0 || !advance(&mut choice, n) {
            break;
        }
    }
    Formula::conj(conjuncts)
}

fn advance(choice: &mut [usize], n: usize) -> bool {
    for c in choice.iter_mut().rev() {
        *c += 1;
        if *c < n {
            return true;
        }
        *c = 0;
    }
    false
}

fn collect_vocab(f: &Formula, aps: &mut BTreeSet<String>, progs: &mut BTreeSet<String>) {
    match f {
        Formula::True | Formula::False => {}
        Formula::Atom { ap, .. } => {
            aps.insert(ap.clone());
        }
        Formula::Not(g) | Formula::Exists(_, g) | Formula::Forall(_, g) | Formula::NotExists(_, g) => collect_vocab(g, aps, progs),
        Formula::And(l, r) | Formula::Or(l, r) => {
            collect_vocab(l, aps, progs);
            collect_vocab(r, aps, progs);
        }
        Formula::Diamond(p, g) | Formula::Boxed(p, g) => {
            collect_program_vocab(p, aps, progs);
            collect_vocab(g, aps, progs);
        }
        Formula::Delta(p) | Formula::NotDelta(p) => collect_program_vocab(p, aps, progs),
    }
}

fn collect_program_vocab(p: &Program, aps: &mut BTreeSet<String>, progs: &mut BTreeSet<String>) {
    match p {
        Program::Tup(t) => progs.extend(t.0.iter().flatten().cloned()),
        Program::Eps => {}
        Program::Sum(l, r) | Program::Concat(l, r) => {
            collect_program_vocab(l, aps, progs);
            collect_program_vocab(r, aps, progs);
        }
        Program::Star(q) => collect_program_vocab(q, aps, progs),
        Program::Test(g) => collect_vocab(g, aps, progs),
    }
}

/// The trace alphabet for `f`: its propositions and programs plus the extra
/// ones in `opts`, with a program `step` when there is none at all.
pub fn trace_interp(f: &Formula, opts: &SatOptions) -> WorldInterp {
    let mut aps: BTreeSet<String> = opts.aps.iter().cloned().collect();
    let mut progs: BTreeSet<String> = opts.programs.iter().cloned().collect();
    collect_vocab(f, &mut aps, &mut progs);
    if progs.is_empty() {
        progs.insert("step".into());
    }
    WorldInterp::traces(&aps.into_iter().collect::<Vec<_>>(), &progs.into_iter().collect::<Vec<_>>())
}

/// Nonemptiness of the automaton of `body` over `n` traces. The accepted
/// word's components are the witness traces.
fn decide(fragment: Fragment, body: &Formula, names: Vec<String>, interp: WorldInterp, opts: &SatOptions) -> Result<SatResult, SatError> {
    let n = names.len();
    let letters = interp.letter_count(n);
    if letters > opts.alphabet_cap {
        return Err(SatError::AlphabetTooLarge { letters, cap: opts.alphabet_cap });
    }
    let nnf = to_nnf(body);
    let aba = Builder::new(&interp, opts.build.clone()).build(&nnf, n)?;
    let automaton_states = aba.len();
    let mh = MhNba::new(Arc::new(aba));
    let e = is_empty(&mh, &interp.letters(n))?;
    let witness = e.witness.map(|run| {
        let traces = (0..n).map(|i| run.word.map(|l| (l.worlds[i], l.progs[i]))).collect();
        (names, traces)
    });
    Ok(SatResult {
        fragment,
        satisfiable: !e.empty,
        decided: body.clone(),
        interp,
        witness,
        automaton_states: automaton_states.max(mh.state_count()),
        explored_states: e.explored_states,
    })
}

pub fn sat_forall(l: &Linear, opts: &SatOptions) -> Result<SatResult, SatError> {
    let collapsed = collapse_forall(&l.body, l.prefix.len());
    let interp = trace_interp(&l.body, opts);
    decide(Fragment::ForallStar, &collapsed, vec!["p".into()], interp, opts)
}

pub fn sat_exists(l: &Linear, opts: &SatOptions) -> Result<SatResult, SatError> {
    let interp = trace_interp(&l.body, opts);
    let names = l.prefix.iter().map(|(_, v)| v.clone()).collect();
    decide(Fragment::ExistsStar, &l.body, names, interp, opts)
}

pub fn sat_exists_forall(l: &Linear, opts: &SatOptions) -> Result<SatResult, SatError> {
    let expanded = expand_exists_forall(&l.prefix, &l.body);
    let interp = trace_interp(&l.body, opts);
    let names = l.prefix.iter().filter(|(e, _)| *e).map(|(_, v)| v.clone()).collect();
    decide(Fragment::ExistsForall, &expanded, names, interp, opts)
}

/// Classifies `f` and runs the matching procedure.
pub fn satisfiable(f: &Formula, opts: &SatOptions) -> Result<SatResult, SatError> {
    let l = linear_form(f).ok_or_else(|| SatError::Unsupported("a quantifier occurs below the prefix".into()))?;
    match l.fragment {
        Fragment::ForallStar => sat_forall(&l, opts),
        Fragment::ExistsStar => sat_exists(&l, opts),
        Fragment::ExistsForall => sat_exists_forall(&l, opts),
        Fragment::Unsupported => Err(SatError::Unsupported("the prefix has a forall-exists alternation".into())),
    }
}

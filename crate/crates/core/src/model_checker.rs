//! `T |= phi` for a system and a closed formula: emptiness of the automaton
//! of every maximal quantified subformula, combined along the formula's
//! boolean skeleton.

use std::collections::HashMap;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::aba::{is_empty, AbaError, Automaton, MhNba, StateId, SINK_TRUE};
use crate::formula_automata::{BuildError, BuildOptions, Builder, ExistsNba, StageSize};
use crate::kts::Kts;
use crate::lasso::LassoWord;
use crate::paths::{complete_path, format_path, Path};
use crate::syntax::{criticality, to_nnf, Formula};
use crate::world::{Letter, WorldInterp};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CheckError {
    #[error("formula is not closed: {0} occurs outside every quantifier")]
    NotClosed(String),
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Emptiness(#[from] AbaError),
}

#[derive(Clone, Debug, Default)]
pub struct CheckOptions {
    pub build: BuildOptions,
    pub concurrency: bool,
}

/// Outcome for one maximal quantified subformula `exists v. body`.
#[derive(Clone, Debug, Serialize)]
pub struct SubVerdict {
    pub formula: String,
    /// Whether some path from the initial state satisfies the body.
    pub nonempty: bool,
    pub stages: Vec<StageSize>,
    pub explored_states: usize,
    pub witness: Option<Witness>,
    pub millis: f64,
}

/// A path for the outermost quantified variable, recovered from the accepting
/// lasso, together with the raw automaton run.
#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    pub variable: String,
    pub path: Option<String>,
    pub run: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub holds: bool,
    pub formula: String,
    pub nnf: String,
    pub criticality: usize,
    pub subformulas: Vec<SubVerdict>,
    pub warnings: Vec<String>,
    pub millis: f64,
}

/// The boolean structure above the quantifiers; leaves index `subformulas`.
enum Skeleton {
    Const(bool),
    Leaf(usize, bool),
    And(Box<Skeleton>, Box<Skeleton>),
    Or(Box<Skeleton>, Box<Skeleton>),
}

impl Skeleton {
    fn eval(&self, leaves: &[bool]) -> bool {
        match self {
            Skeleton::Const(b) => *b,
            Skeleton::Leaf(i, negated) => leaves[*i] != *negated,
            Skeleton::And(l, r) => l.eval(leaves) && r.eval(leaves),
            Skeleton::Or(l, r) => l.eval(leaves) || r.eval(leaves),
        }
    }
}

fn skeleton(f: &Formula, leaves: &mut Vec<(String, Formula)>, index: &mut HashMap<(String, Formula), usize>) -> Result<Skeleton, CheckError> {
    let mut leaf = |v: &String, b: &Formula, negated: bool| {
        let k = (v.clone(), b.clone());
        let i = *index.entry(k.clone()).or_insert_with(|| {
            leaves.push(k);
            leaves.len() - 1
        });
        Skeleton::Leaf(i, negated)
    };
    Ok(match f {
        Formula::True => Skeleton::Const(true),
        Formula::False => Skeleton::Const(false),
        Formula::Exists(v, b) => leaf(v, b, false),
        Formula::NotExists(v, b) => leaf(v, b, true),
        Formula::And(l, r) => Skeleton::And(Box::new(skeleton(l, leaves, index)?), Box::new(skeleton(r, leaves, index)?)),
        Formula::Or(l, r) => Skeleton::Or(Box::new(skeleton(l, leaves, index)?), Box::new(skeleton(r, leaves, index)?)),
        other => return Err(CheckError::NotClosed(other.to_string())),
    })
}

/// Emptiness of `exists v. body` at the top level, where the new path starts
/// in the initial state and the alphabet is the single unit letter.
pub fn check_exists(kts: &Arc<Kts>, v: &str, body: &Formula, opts: &BuildOptions) -> Result<(SubVerdict, Vec<String>), CheckError> {
    let start = Instant::now();
    let interp = WorldInterp::Kts(kts.clone());
    let mut builder = Builder::new(&interp, opts.clone());
    let body_aba = builder.build(body, 1)?;
    let body_states = body_aba.len();
    let mh = Arc::new(MhNba::new(Arc::new(body_aba)));
    let ex = ExistsNba::new(mh.clone(), kts.clone(), 0);
    let e = is_empty(&ex, &[Letter::unit()])?;
    let mut stages = builder.stages;
    stages.push(StageSize {
        formula: Formula::Exists(v.to_string(), Box::new(body.clone())).to_string(),
        paths: 0,
        body_states,
        dealternated_states: mh.state_count(),
        quantified_states: ex.state_count(),
        complemented_states: None,
    });
    let witness = e.witness.map(|run| Witness {
        variable: v.to_string(),
        path: decode_path(kts, &ex, &run.states).map(|p| format_path(&interp, &p)),
        run: run.states.map(|&q| ex.state_label(q)).to_string(),
    });
    let verdict = SubVerdict {
        formula: Formula::Exists(v.to_string(), Box::new(body.clone())).to_string(),
        nonempty: !e.empty,
        stages,
        explored_states: e.explored_states,
        witness,
        millis: start.elapsed().as_secs_f64() * 1e3,
    };
    Ok((verdict, builder.warnings))
}

/// Reads the simulated path off the triple states of an accepting run. When
/// the run reaches the accepting sink the body is already decided and the
/// rest of the path is arbitrary, so it is completed along first edges.
fn decode_path(kts: &Kts, ex: &ExistsNba, states: &LassoWord<StateId>) -> Option<Path> {
    let all: Vec<StateId> = states.stem.iter().chain(states.period.iter()).copied().collect();
    let full: Vec<(StateId, usize, usize)> = all.iter().skip(1).map_while(|&q| ex.triple(q)).collect();
    let triples: Vec<(usize, usize)> = full.iter().map(|&(_, s, p)| (s, p)).collect();
    // the first program is not part of any state: pick one the body can take
    let body = ex.body();
    let sigma0 = (0..kts.programs.len()).find(|&p| {
        let moves = body.transition(body.initial(), &Letter::unit().extend(kts.init, p)).disjuncts().unwrap_or_default();
        match full.first() {
            Some(&(q, s, _)) => kts.post(kts.init, p).contains(&s) && moves.contains(&q),
            None => !kts.post(kts.init, p).is_empty() && moves.contains(&SINK_TRUE),
        }
    })?;
    let mut steps = vec![(kts.init, sigma0)];
    steps.extend(triples.iter().copied());
    let k = states.stem.len();
    if k >= 1 && triples.len() + 1 == all.len() {
        let period = steps.split_off(k);
        Some(LassoWord::new(steps, period))
    } else {
        Some(complete_path(kts, &steps))
    }
}

/// Decides `kts |= f`.
pub fn model_check(kts: &Kts, f: &Formula, opts: &CheckOptions) -> Result<Verdict, CheckError> {
    let start = Instant::now();
    let nnf = to_nnf(f);
    let mut leaves = Vec::new();
    let sk = skeleton(&nnf, &mut leaves, &mut HashMap::new())?;
    let kts = Arc::new(kts.clone());
    let run = |(v, b): &(String, Formula)| check_exists(&kts, v, b, &opts.build);
    let results: Vec<Result<(SubVerdict, Vec<String>), CheckError>> = if opts.concurrency {
        leaves.par_iter().map(run).collect()
    } else {
        leaves.iter().map(run).collect()
    };
    let mut subformulas = Vec::with_capacity(results.len());
    let mut warnings = Vec::new();
    for r in results {
        let (s, w) = r?;
        subformulas.push(s);
        warnings.extend(w);
    }
    let values: Vec<bool> = subformulas.iter().map(|s| s.nonempty).collect();
    Ok(Verdict {
        holds: sk.eval(&values),
        formula: f.to_string(),
        nnf: nnf.to_string(),
        criticality: criticality(&nnf),
        subformulas,
        warnings,
        millis: start.elapsed().as_secs_f64() * 1e3,
    })
}

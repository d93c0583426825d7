//! Alternating automata for NNF formulas over letters of `n` paths.
//!
//! Atoms test the current world of one path, connectives get a fresh initial
//! state, modalities run `M_alpha` inside the automaton and enter test
//! automata conjunctively (or, for boxes, negated tests disjunctively), and
//! quantifiers dealternate their body and simulate the new path through the
//! system in the state space.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use serde::Serialize;
use thiserror::Error;

use crate::aba::{complement, materialize, reduce_nba, Aba, Automaton, MhNba, PosBool, Rule, StateId, SINK_FALSE, SINK_TRUE};
use crate::kts::Kts;
use crate::marked_nfa::{build_marked_nfa, dp_table, eps_formula, eps_reach, Guard, MarkedNfa, NodeId, TestSet};
use crate::syntax::{negate_nnf, Formula, Program};
use crate::world::{Letter, WorldInterp};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BuildError {
    #[error("path quantifier `{0}` needs a system; trace mode only handles quantifier-free formulas")]
    QuantifierInTraceMode(String),
    #[error("formula is not in negation normal form: {0}")]
    NotNnf(String),
    #[error("path variable `{0}` refers to path {1}, but only {2} paths are in scope")]
    Unbound(String, usize, usize),
    #[error("tuple {0} has arity {1}, expected {2}")]
    Arity(String, usize, usize),
}

/// How modality transitions summarise the markings met on epsilon paths.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum GuardMode {
    /// The `dp`/`eps` guard formulas.
    #[default]
    Succinct,
    /// One disjunct per marking set of the annotated epsilon closure.
    Explicit,
}

#[derive(Clone, Debug)]
pub struct BuildOptions {
    pub guard_mode: GuardMode,
    /// Nesting depth of negated Δ beyond which a warning is emitted.
    pub notdelta_cap: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions { guard_mode: GuardMode::Succinct, notdelta_cap: 2 }
    }
}

/// Automaton sizes recorded at every quantifier.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct StageSize {
    pub formula: String,
    pub paths: usize,
    pub body_states: usize,
    pub dealternated_states: usize,
    pub quantified_states: usize,
    pub complemented_states: Option<usize>,
}

pub struct Builder<'a> {
    interp: &'a WorldInterp,
    opts: BuildOptions,
    notdelta_depth: usize,
    pub warnings: Vec<String>,
    pub stages: Vec<StageSize>,
}

/// Builds `A_f` for a formula in NNF whose free variables are `pi_1..pi_n`.
pub fn build_aba(f: &Formula, n: usize, interp: &WorldInterp, opts: &BuildOptions) -> Result<Aba<Letter>, BuildError> {
    Builder::new(interp, opts.clone()).build(f, n)
}

/// How a composite automaton refers to an embedded child's initial state.
#[derive(Clone)]
enum Entry {
    Const(bool),
    State(StateId, Rule<Letter>),
}

impl Entry {
    fn rho(&self, l: &Letter) -> PosBool {
        match self {
            Entry::Const(true) => PosBool::True,
            Entry::Const(false) => PosBool::False,
            Entry::State(_, r) => r(l),
        }
    }

    fn var(&self) -> PosBool {
        match self {
            Entry::Const(true) => PosBool::True,
            Entry::Const(false) => PosBool::False,
            Entry::State(q, _) => PosBool::var(*q),
        }
    }
}

fn embed(out: &mut Aba<Letter>, child: &Aba<Letter>, group: &str) -> Entry {
    let e = out.embed(child, group);
    match child.initial() {
        SINK_TRUE => Entry::Const(true),
        SINK_FALSE => Entry::Const(false),
        q => {
            let id = e.map(q);
            Entry::State(id, out.rule(id))
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Modal {
    Diamond,
    Box,
    Delta,
}

/// A tuple-step out of a node: the guard collecting the tests met on the
/// epsilon path before the step, the step's tuple and its target node.
#[derive(Clone)]
struct Step {
    guard: Guard,
    tuple: Vec<Option<usize>>,
    target: NodeId,
}

#[derive(Clone, Default)]
struct NodeSteps {
    steps: Vec<Step>,
    /// Tests met on epsilon paths to the final node.
    to_final: Guard,
}

fn matches(tuple: &[Option<usize>], progs: &[usize]) -> bool {
    tuple.iter().zip(progs).all(|(t, p)| t.is_none_or(|t| t == *p))
}

/// Substitutes every test variable by the formula `var` yields.
fn subst(g: &Guard, var: &dyn Fn(usize) -> PosBool) -> PosBool {
    g.fold(&mut |i| var(i), &|| PosBool::True, &|| PosBool::False, &PosBool::and, &PosBool::or)
}

/// The dual guard (and/or, true/false swapped) under the same substitution.
const REDUCE_LETTER_LIMIT: u128 = 4096;

fn subst_dual(g: &Guard, var: &dyn Fn(usize) -> PosBool) -> PosBool {
    g.fold(&mut |i| var(i), &|| PosBool::False, &|| PosBool::True, &PosBool::or, &PosBool::and)
}

fn guard_of_set(set: TestSet) -> Guard {
    (0..64).filter(|i| set >> i & 1 == 1).fold(Guard::True, |g, i| Guard::and(g, Guard::Var(i)))
}

impl<'a> Builder<'a> {
    pub fn new(interp: &'a WorldInterp, opts: BuildOptions) -> Self {
        Builder { interp, opts, notdelta_depth: 0, warnings: vec![], stages: vec![] }
    }

    fn finish(&self, mut a: Aba<Letter>, n: usize) -> Aba<Letter> {
        let interp = self.interp.clone();
        a.letter_check = Some(Arc::new(move |l: &Letter| interp.valid_letter(l, n)));
        a
    }

    pub fn build(&mut self, f: &Formula, n: usize) -> Result<Aba<Letter>, BuildError> {
        let a = match f {
            Formula::True => Aba::constant(true),
            Formula::False => Aba::constant(false),
            Formula::Atom { ap, var } => self.atom(ap, var.index, &var.name, n, true)?,
            Formula::Not(inner) => match inner.as_ref() {
                Formula::Atom { ap, var } => self.atom(ap, var.index, &var.name, n, false)?,
                other => return Err(BuildError::NotNnf(format!("negation of {other}"))),
            },
            Formula::And(l, r) | Formula::Or(l, r) => {
                let conj = matches!(f, Formula::And(..));
                let (a1, a2) = (self.build(l, n)?, self.build(r, n)?);
                let mut out = Aba::new();
                let e1 = embed(&mut out, &a1, "left");
                let e2 = embed(&mut out, &a2, "right");
                let rule: Rule<Letter> = Arc::new(move |l| {
                    if conj {
                        PosBool::and(e1.rho(l), e2.rho(l))
                    } else {
                        PosBool::or(e1.rho(l), e2.rho(l))
                    }
                });
                let q0 = out.add_state(if conj { "and" } else { "or" }, false, rule);
                out.set_initial(q0);
                out.weak = a1.weak && a2.weak;
                out
            }
            Formula::Diamond(alpha, body) => self.modal(Modal::Diamond, alpha, Some(body), n)?,
            Formula::Boxed(alpha, body) => self.modal(Modal::Box, alpha, Some(body), n)?,
            Formula::Delta(alpha) => self.modal(Modal::Delta, alpha, None, n)?,
            Formula::NotDelta(alpha) => {
                self.notdelta_depth += 1;
                if self.notdelta_depth > self.opts.notdelta_cap {
                    let msg = format!(
                        "negated delta nested {} deep (cap {}); each level complements",
                        self.notdelta_depth, self.opts.notdelta_cap
                    );
                    tracing::warn!("{msg}");
                    self.warnings.push(msg);
                }
                let d = self.modal(Modal::Delta, alpha, None, n);
                self.notdelta_depth -= 1;
                let d = d?;
                // simplifying needs every letter; skip it on large alphabets
                if self.interp.letter_count(n) <= REDUCE_LETTER_LIMIT {
                    complement(&reduce_nba(&d, &self.interp.letters(n)))
                } else {
                    complement(&d)
                }
            }
            Formula::Exists(v, body) => self.exists(v, body, n, false)?,
            Formula::NotExists(v, body) => self.exists(v, body, n, true)?,
            Formula::Forall(..) => return Err(BuildError::NotNnf(format!("universal quantifier in {f}"))),
        };
        Ok(self.finish(a, n))
    }

    fn atom(&self, ap: &str, index: usize, name: &str, n: usize, positive: bool) -> Result<Aba<Letter>, BuildError> {
        if index == 0 || index > n {
            return Err(BuildError::Unbound(name.to_string(), index, n));
        }
        let k = index - 1;
        let ap = self.interp.ap_index(ap);
        let interp = self.interp.clone();
        let mut a = Aba::new();
        let rule: Rule<Letter> = Arc::new(move |l: &Letter| {
            let holds = ap.is_some_and(|a| interp.holds(a, l.worlds[k]));
            if holds == positive {
                PosBool::True
            } else {
                PosBool::False
            }
        });
        let label = if positive { format!("atom@{name}") } else { format!("!atom@{name}") };
        let q = a.add_state(label, false, rule);
        a.set_initial(q);
        a.weak = true;
        Ok(a)
    }

    fn resolve(&self, m: &MarkedNfa, n: usize) -> Result<Vec<Vec<Option<usize>>>, BuildError> {
        m.tup_edges
            .iter()
            .map(|(_, t, _)| {
                if t.arity() != n {
                    return Err(BuildError::Arity(t.to_string(), t.arity(), n));
                }
                Ok(t.0
                    .iter()
                    .map(|e| e.as_ref().map(|p| self.interp.program_index(p).unwrap_or(usize::MAX)))
                    .collect())
            })
            .collect()
    }

    /// Steps and final guards for every node, in the configured guard mode.
    fn node_steps(&self, m: &MarkedNfa, n: usize) -> Result<Vec<NodeSteps>, BuildError> {
        let tuples = self.resolve(m, n)?;
        let mut table = vec![NodeSteps::default(); m.node_count];
        match self.opts.guard_mode {
            GuardMode::Succinct => {
                let dp = dp_table(m);
                for (q, entry) in table.iter_mut().enumerate() {
                    for (e, (src, _, dst)) in m.tup_edges.iter().enumerate() {
                        let g = eps_formula(m, &dp, q, *src);
                        if g != Guard::False {
                            entry.steps.push(Step { guard: g, tuple: tuples[e].clone(), target: *dst });
                        }
                    }
                    entry.to_final = eps_formula(m, &dp, q, m.final_node);
                }
            }
            GuardMode::Explicit => {
                let reach = eps_reach(m);
                for (q, entry) in table.iter_mut().enumerate() {
                    for &(x, mid) in reach.from(q) {
                        for (e, (src, _, dst)) in m.tup_edges.iter().enumerate() {
                            if *src == mid {
                                entry.steps.push(Step { guard: guard_of_set(x), tuple: tuples[e].clone(), target: *dst });
                            }
                        }
                        if mid == m.final_node {
                            entry.to_final = Guard::or(entry.to_final.clone(), guard_of_set(x));
                        }
                    }
                }
            }
        }
        Ok(table)
    }

    fn modal(&mut self, kind: Modal, alpha: &Program, body: Option<&Formula>, n: usize) -> Result<Aba<Letter>, BuildError> {
        let m = build_marked_nfa(alpha, n);
        let steps = Arc::new(self.node_steps(&m, n)?);
        let mut out = Aba::new();
        let body_aba = match body {
            Some(b) => Some(self.build(b, n)?),
            None => None,
        };
        let mut tests_aba = Vec::with_capacity(m.tests.len());
        for t in &m.tests {
            let t = if kind == Modal::Box { negate_nnf(t) } else { t.clone() };
            tests_aba.push(self.build(&t, n)?);
        }
        let body_entry = body_aba.as_ref().map(|b| embed(&mut out, b, "body"));
        let tests: Arc<Vec<Entry>> = Arc::new(
            tests_aba.iter().enumerate().map(|(i, t)| embed(&mut out, t, &format!("test{i}"))).collect(),
        );
        let weak_children = body_aba.as_ref().is_none_or(|b| b.weak) && tests_aba.iter().all(|t| t.weak);

        // Nodes that can be occupied between letters: the initial node and
        // every tuple-step target.
        let mut relevant: Vec<NodeId> = vec![m.initial];
        for (_, _, dst) in &m.tup_edges {
            if !relevant.contains(dst) {
                relevant.push(*dst);
            }
        }
        if kind == Modal::Delta {
            relevant.retain(|&q| q != m.initial);
        }
        let first = out.len() as StateId + u32::from(kind == Modal::Delta);
        let ids: Arc<HashMap<NodeId, StateId>> =
            Arc::new(relevant.iter().enumerate().map(|(i, &q)| (q, first + i as StateId)).collect());

        let group = match kind {
            Modal::Diamond => "diamond",
            Modal::Box => "box",
            Modal::Delta => "delta",
        };
        if kind == Modal::Delta {
            let (steps, tests, ids) = (steps.clone(), tests.clone(), ids.clone());
            let q0 = out.len() as StateId;
            let completion = completions(&steps, &m);
            let init = m.initial;
            let rule: Rule<Letter> = Arc::new(move |l| {
                let direct = subst(&steps[init].to_final, &|i| tests[i].rho(l));
                PosBool::or(delta_rule(&steps[init], &completion, &ids, &tests, q0, l), direct)
            });
            let q = out.add_state("delta", true, rule);
            out.set_group(q, group);
            debug_assert_eq!(q, q0);
        }
        let q0 = first - u32::from(kind == Modal::Delta);
        let completion = Arc::new(completions(&steps, &m));
        let ids_check = ids.clone();
        for &node in &relevant {
            let (steps, tests, ids, body) = (steps.clone(), tests.clone(), ids.clone(), body_entry.clone());
            let completion = completion.clone();
            let rule: Rule<Letter> = match kind {
                Modal::Diamond => {
                    let body = body.expect("diamond has a body");
                    Arc::new(move |l| {
                        let s = &steps[node];
                        let mut acc = PosBool::and(subst(&s.to_final, &|i| tests[i].rho(l)), body.rho(l));
                        for st in s.steps.iter().filter(|st| matches(&st.tuple, &l.progs)) {
                            let t = PosBool::and(subst(&st.guard, &|i| tests[i].rho(l)), PosBool::var(ids[&st.target]));
                            acc = PosBool::or(acc, t);
                        }
                        acc
                    })
                }
                Modal::Box => {
                    let body = body.expect("box has a body");
                    Arc::new(move |l| {
                        let s = &steps[node];
                        let mut acc = PosBool::or(subst_dual(&s.to_final, &|i| tests[i].rho(l)), body.rho(l));
                        for st in s.steps.iter().filter(|st| matches(&st.tuple, &l.progs)) {
                            let t = PosBool::or(subst_dual(&st.guard, &|i| tests[i].rho(l)), PosBool::var(ids[&st.target]));
                            acc = PosBool::and(acc, t);
                        }
                        acc
                    })
                }
                Modal::Delta => Arc::new(move |l| delta_rule(&steps[node], &completion, &ids, &tests, q0, l)),
            };
            let q = out.add_state(format!("{group}:n{node}"), kind == Modal::Box, rule);
            out.set_group(q, group);
            debug_assert_eq!(Some(&q), ids_check.get(&node));
        }
        out.set_initial(match kind {
            Modal::Delta => q0,
            _ => ids_check[&m.initial],
        });
        out.weak = kind != Modal::Delta && weak_children;
        Ok(out)
    }

    fn exists(&mut self, v: &str, body: &Formula, n: usize, negated: bool) -> Result<Aba<Letter>, BuildError> {
        let kts = match self.interp.system() {
            Some(k) => k.clone(),
            None => return Err(BuildError::QuantifierInTraceMode(v.to_string())),
        };
        let body_aba = self.build(body, n + 1)?;
        let body_states = body_aba.len();
        let mh = Arc::new(MhNba::new(Arc::new(body_aba)));
        let ex = Arc::new(ExistsNba::new(mh.clone(), kts, n));
        let letters = self.interp.letters(n);
        let quantified = reduce_nba(&materialize(ex, &letters, &format!("exists {v}")), &letters);
        let mut stage = StageSize {
            formula: format!("{}", if negated { Formula::NotExists(v.into(), Box::new(body.clone())) } else { Formula::Exists(v.into(), Box::new(body.clone())) }),
            paths: n,
            body_states,
            dealternated_states: mh.state_count(),
            quantified_states: quantified.len(),
            complemented_states: None,
        };
        let out = if negated {
            let c = complement(&quantified);
            stage.complemented_states = Some(c.len());
            c
        } else {
            quantified
        };
        self.stages.push(stage);
        Ok(out)
    }
}

/// Per target node, the tests met on epsilon paths from it to the final node.
fn completions(steps: &[NodeSteps], m: &MarkedNfa) -> Vec<Guard> {
    (0..m.node_count).map(|q| steps[q].to_final.clone()).collect()
}

fn delta_rule(
    s: &NodeSteps,
    completion: &[Guard],
    ids: &HashMap<NodeId, StateId>,
    tests: &[Entry],
    q0: StateId,
    l: &Letter,
) -> PosBool {
    let mut acc = PosBool::False;
    for st in s.steps.iter().filter(|st| matches(&st.tuple, &l.progs)) {
        let now = subst(&st.guard, &|i| tests[i].rho(l));
        if now == PosBool::False {
            continue;
        }
        let restart = PosBool::and(PosBool::var(q0), subst(&completion[st.target], &|i| tests[i].var()));
        acc = PosBool::or(acc, PosBool::and(now, PosBool::or(PosBool::var(ids[&st.target]), restart)));
    }
    acc
}

/// The quantifier construction over a dealternated body: states are the
/// accepting and rejecting sinks, the fresh initial state 2, and triples of a
/// body state, the simulated path's current system state and its next
/// program.
pub struct ExistsNba {
    body: Arc<MhNba<Letter>>,
    kts: Arc<Kts>,
    n: usize,
    table: Mutex<ExistsTable>,
}

#[derive(Default)]
struct ExistsTable {
    triples: Vec<(StateId, usize, usize)>,
    index: HashMap<(StateId, usize, usize), StateId>,
    cache: HashMap<(StateId, Letter), PosBool>,
}

const EXISTS_INIT: StateId = 2;

impl ExistsNba {
    pub fn new(body: Arc<MhNba<Letter>>, kts: Arc<Kts>, n: usize) -> Self {
        ExistsNba { body, kts, n, table: Mutex::new(ExistsTable::default()) }
    }

    /// `(body state, system state, program)` behind a triple state.
    pub fn triple(&self, q: StateId) -> Option<(StateId, usize, usize)> {
        if q <= EXISTS_INIT {
            return None;
        }
        Some(self.table.lock().unwrap().triples[(q - EXISTS_INIT - 1) as usize])
    }

    pub fn body(&self) -> &Arc<MhNba<Letter>> {
        &self.body
    }

    /// Body successors when the simulated path sits in `s` and takes `sigma`.
    fn step(&self, q: StateId, s: usize, sigma: usize, l: &Letter, out: &mut Vec<(StateId, usize, usize)>) -> bool {
        let next = self.kts.post(s, sigma);
        if next.is_empty() {
            return false;
        }
        let d = self.body.transition(q, &l.extend(s, sigma)).disjuncts().expect("dealternated body is nondeterministic");
        for q2 in d {
            if q2 == SINK_TRUE {
                return true;
            }
            for &s2 in next {
                for sigma2 in 0..self.kts.programs.len() {
                    if !self.kts.post(s2, sigma2).is_empty() {
                        out.push((q2, s2, sigma2));
                    }
                }
            }
        }
        false
    }
}

impl Automaton<Letter> for ExistsNba {
    fn initial(&self) -> StateId {
        match self.body.initial() {
            SINK_TRUE => SINK_TRUE,
            SINK_FALSE => SINK_FALSE,
            _ => EXISTS_INIT,
        }
    }

    fn is_accepting(&self, q: StateId) -> bool {
        match q {
            SINK_TRUE => true,
            SINK_FALSE | EXISTS_INIT => false,
            _ => self.body.is_accepting(self.triple(q).expect("triple state").0),
        }
    }

    fn transition(&self, q: StateId, l: &Letter) -> PosBool {
        match q {
            SINK_TRUE => return PosBool::True,
            SINK_FALSE => return PosBool::False,
            _ => {}
        }
        if let Some(p) = self.table.lock().unwrap().cache.get(&(q, l.clone())) {
            return p.clone();
        }
        let mut succ = Vec::new();
        let mut accept = false;
        if q == EXISTS_INIT {
            let branch = if self.n == 0 { self.kts.init } else { l.worlds[self.n - 1] };
            for sigma in 0..self.kts.programs.len() {
                accept |= self.step(self.body.initial(), branch, sigma, l, &mut succ);
            }
        } else {
            let (qb, s, sigma) = self.triple(q).expect("triple state");
            accept = self.step(qb, s, sigma, l, &mut succ);
        }
        let mut t = self.table.lock().unwrap();
        let result = if accept {
            PosBool::True
        } else {
            let ids: Vec<StateId> = succ
                .into_iter()
                .map(|tr| {
                    if let Some(&id) = t.index.get(&tr) {
                        return id;
                    }
                    let id = EXISTS_INIT + 1 + t.triples.len() as StateId;
                    t.triples.push(tr);
                    t.index.insert(tr, id);
                    id
                })
                .collect();
            PosBool::any(ids.into_iter().map(PosBool::var))
        };
        t.cache.insert((q, l.clone()), result.clone());
        result
    }

    fn state_count(&self) -> usize {
        EXISTS_INIT as usize + 1 + self.table.lock().unwrap().triples.len()
    }

    fn state_label(&self, q: StateId) -> String {
        match q {
            SINK_TRUE => "true".into(),
            SINK_FALSE => "false".into(),
            EXISTS_INIT => "branch".into(),
            _ => {
                let (qb, s, sigma) = self.triple(q).expect("triple state");
                format!("({},{},{})", self.body.state_label(qb), self.kts.states[s], self.kts.programs[sigma])
            }
        }
    }
}

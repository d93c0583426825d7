//! Generators and independent reference procedures shared by the
//! integration tests and the acceptance suite.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap, HashSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hyperpdl::aba::{Aba, Automaton, PosBool, StateId, SINK_FALSE, SINK_TRUE};
use hyperpdl::kts::Kts;
use hyperpdl::lasso::LassoWord;
use hyperpdl::omega::{Regex, Symbol};
use hyperpdl::oracle::{bounded_paths, LassoAssignment};
use hyperpdl::syntax::{CtlStar, Formula, PathVar, Program, TupleSym};
use hyperpdl::world::{Letter, WorldInterp};

pub const APS: [&str; 2] = ["a", "b"];
pub const PROGS: [&str; 2] = ["s", "t"];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A system with 1..=max_states states over `APS` and `PROGS`; every state
/// has at least one outgoing edge.
pub fn random_kts(r: &mut ChaCha8Rng, max_states: usize) -> Kts {
    let n = r.gen_range(1..=max_states);
    let labels = (0..n).map(|_| (0..APS.len()).filter(|_| r.gen_bool(0.5)).collect()).collect();
    let mut edges = vec![vec![vec![]; n]; PROGS.len()];
    for s in 0..n {
        let k = r.gen_range(1..=3);
        for _ in 0..k {
            let p = r.gen_range(0..PROGS.len());
            let t = r.gen_range(0..n);
            edges[p][s].push(t);
        }
    }
    for per in &mut edges {
        for succ in per.iter_mut() {
            succ.sort_unstable();
            succ.dedup();
        }
    }
    Kts {
        aps: APS.iter().map(|s| s.to_string()).collect(),
        programs: PROGS.iter().map(|s| s.to_string()).collect(),
        states: (0..n).map(|i| format!("q{i}")).collect(),
        init: 0,
        labels,
        edges,
    }
}

pub fn var(i: usize) -> PathVar {
    PathVar::new(format!("p{i}"), i)
}

fn random_tuple(r: &mut ChaCha8Rng, n: usize) -> TupleSym {
    TupleSym((0..n).map(|_| if r.gen_bool(0.5) { None } else { Some(PROGS.choose(r).unwrap().to_string()) }).collect())
}

fn literal(r: &mut ChaCha8Rng, n: usize) -> Formula {
    match r.gen_range(0..8) {
        0 => Formula::True,
        1 => Formula::False,
        k => {
            let a = Formula::atom(*APS.choose(r).unwrap(), var(r.gen_range(1..=n)));
            if k % 2 == 0 {
                Formula::not(a)
            } else {
                a
            }
        }
    }
}

/// A quantifier-free NNF formula over `p1..pn` with at most `budget` nodes.
pub fn random_formula(r: &mut ChaCha8Rng, n: usize, budget: usize) -> Formula {
    if budget <= 1 || r.gen_bool(0.2) {
        return literal(r, n);
    }
    match r.gen_range(0..4) {
        0 if budget >= 3 => {
            let l = r.gen_range(1..budget - 1);
            let (a, b) = (random_formula(r, n, l), random_formula(r, n, (budget - 1 - l).max(1)));
            if r.gen_bool(0.5) {
                Formula::and(a, b)
            } else {
                Formula::or(a, b)
            }
        }
        1 | 2 if budget >= 3 => {
            let p = r.gen_range(1..budget - 1);
            let prog = random_program(r, n, p, true);
            let body = random_formula(r, n, (budget - 1 - p).max(1));
            if r.gen_bool(0.5) {
                Formula::diamond(prog, body)
            } else {
                Formula::boxed(prog, body)
            }
        }
        _ => {
            let prog = random_program(r, n, budget - 1, true);
            if r.gen_bool(0.5) {
                Formula::Delta(prog)
            } else {
                Formula::NotDelta(prog)
            }
        }
    }
}

/// A program over `n` paths with at most `budget` nodes; test formulas are
/// quantifier-free NNF.
pub fn random_program(r: &mut ChaCha8Rng, n: usize, budget: usize, tests: bool) -> Program {
    if budget <= 1 {
        return if r.gen_bool(0.85) { Program::Tup(random_tuple(r, n)) } else { Program::Eps };
    }
    match r.gen_range(0..5) {
        0 | 1 if budget >= 3 => {
            let l = r.gen_range(1..budget - 1);
            let (a, b) = (random_program(r, n, l, tests), random_program(r, n, budget - 1 - l, tests));
            if r.gen_bool(0.5) {
                Program::sum(a, b)
            } else {
                Program::concat(a, b)
            }
        }
        2 => Program::star(random_program(r, n, budget - 1, tests)),
        3 if tests => Program::test(random_formula(r, n, (budget - 1).min(3))),
        _ => Program::Tup(random_tuple(r, n)),
    }
}

/// Generates until the size bound holds.
pub fn formula_up_to(r: &mut ChaCha8Rng, n: usize, max: usize) -> Formula {
    loop {
        let f = random_formula(r, n, max);
        if f.size() <= max {
            return f;
        }
    }
}

pub fn program_up_to(r: &mut ChaCha8Rng, n: usize, max: usize, tests: bool) -> Program {
    loop {
        let p = random_program(r, n, max, tests);
        if p.size() <= max {
            return p;
        }
    }
}

/// A system path from a random state with stem and period bounded as given.
/// A state whose every short lasso has a longer period (a long simple cycle)
/// falls back to the lassos within the combined bound.
pub fn random_path(r: &mut ChaCha8Rng, k: &Kts, max_stem: usize, max_period: usize) -> LassoWord<(usize, usize)> {
    let s = r.gen_range(0..k.states.len());
    let all = bounded_paths(k, s, max_stem + max_period);
    let fit: Vec<_> = all.iter().filter(|p| p.stem.len() <= max_stem && p.period.len() <= max_period).collect();
    match fit.choose(r) {
        Some(p) => (*p).clone(),
        None => all.choose(r).expect("every state has a bounded lasso").clone(),
    }
}

pub fn random_assignment(r: &mut ChaCha8Rng, k: &Kts, n: usize, max_stem: usize, max_period: usize) -> LassoAssignment {
    LassoAssignment::new((0..n).map(|_| random_path(r, k, max_stem, max_period)).collect())
}

/// A trace over `aps` proposition bitmasks with `programs` programs.
pub fn random_trace(r: &mut ChaCha8Rng, aps: usize, programs: usize, max_stem: usize, max_period: usize) -> LassoWord<(usize, usize)> {
    let step = |r: &mut ChaCha8Rng| (r.gen_range(0..1usize << aps), r.gen_range(0..programs));
    let stem = (0..r.gen_range(0..=max_stem)).map(|_| step(r)).collect();
    let period = (0..r.gen_range(1..=max_period)).map(|_| step(r)).collect();
    LassoWord::new(stem, period)
}

/// All lassos over `worlds` x `programs` with stem + period <= `bound`.
pub fn all_traces(worlds: usize, programs: usize, bound: usize) -> Vec<LassoWord<(usize, usize)>> {
    let letters: Vec<(usize, usize)> = (0..worlds).flat_map(|w| (0..programs).map(move |p| (w, p))).collect();
    let mut words: Vec<Vec<(usize, usize)>> = vec![vec![]];
    let mut out = Vec::new();
    for len in 1..=bound {
        words = words.iter().flat_map(|w| letters.iter().map(move |l| [w.clone(), vec![*l]].concat())).collect();
        for w in &words {
            for split in 0..len {
                out.push(LassoWord::new(w[..split].to_vec(), w[split..].to_vec()));
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Random alternating automata over letters 0..letters.

fn random_posbool(r: &mut ChaCha8Rng, states: u32, depth: usize) -> PosBool {
    if depth == 0 || r.gen_bool(0.35) {
        return match r.gen_range(0..10) {
            0 => PosBool::True,
            1 => PosBool::False,
            _ => PosBool::var(r.gen_range(2..states)),
        };
    }
    let (a, b) = (random_posbool(r, states, depth - 1), random_posbool(r, states, depth - 1));
    if r.gen_bool(0.5) {
        PosBool::and(a, b)
    } else {
        PosBool::or(a, b)
    }
}

/// An automaton with `m` non-sink states over `letters` letters.
pub fn random_aba(r: &mut ChaCha8Rng, m: usize, letters: usize) -> Aba<u32> {
    let states = (m + 2) as u32;
    let mut table = vec![vec![]; 2];
    let mut accepting = vec![true, false];
    for _ in 0..m {
        table.push((0..letters).map(|_| random_posbool(r, states, 2)).collect());
        accepting.push(r.gen_bool(0.5));
    }
    Aba::from_table(table, accepting, 2)
}

/// A nondeterministic automaton: transitions are disjunctions only.
pub fn random_nba(r: &mut ChaCha8Rng, m: usize, letters: usize) -> Aba<u32> {
    let states = (m + 2) as u32;
    let mut table = vec![vec![]; 2];
    let mut accepting = vec![true, false];
    for _ in 0..m {
        table.push(
            (0..letters)
                .map(|_| PosBool::any((0..r.gen_range(0..=2)).map(|_| if r.gen_bool(0.05) { PosBool::True } else { PosBool::var(r.gen_range(2..states)) })))
                .collect(),
        );
        accepting.push(r.gen_bool(0.4));
    }
    Aba::from_table(table, accepting, 2)
}

pub fn random_word(r: &mut ChaCha8Rng, letters: u32, max_stem: usize, max_period: usize) -> LassoWord<u32> {
    let stem = (0..r.gen_range(0..=max_stem)).map(|_| r.gen_range(0..letters)).collect();
    let period = (0..r.gen_range(1..=max_period)).map(|_| r.gen_range(0..letters)).collect();
    LassoWord::new(stem, period)
}

/// Disjunctive normal form as a list of successor sets, without
/// subsumption; `True` is the single empty set and `False` the empty list.
pub fn dnf(f: &PosBool) -> Vec<BTreeSet<StateId>> {
    match f {
        PosBool::True => vec![BTreeSet::new()],
        PosBool::False => vec![],
        PosBool::Var(q) => vec![BTreeSet::from([*q])],
        PosBool::Or(a, b) => [dnf(a), dnf(b)].concat(),
        PosBool::And(a, b) => {
            let (x, y) = (dnf(a), dnf(b));
            x.iter().flat_map(|s| y.iter().map(move |t| s.union(t).copied().collect())).collect()
        }
    }
}

/// Acceptance of a lasso by an alternating automaton, by trying every
/// positional strategy of the existential player on the product of states
/// and normalized word positions. Exponential; for small automata only.
pub fn brute_force_accepts(a: &dyn Automaton<u32>, w: &LassoWord<u32>) -> bool {
    let mut nodes: Vec<(StateId, usize)> = vec![(a.initial(), 0)];
    let mut index: HashMap<(StateId, usize), usize> = HashMap::from([((a.initial(), 0), 0)]);
    let mut choices: Vec<Vec<BTreeSet<StateId>>> = Vec::new();
    let mut i = 0;
    while i < nodes.len() {
        let (q, p) = nodes[i];
        let c = if q == SINK_TRUE {
            vec![BTreeSet::new()]
        } else if q == SINK_FALSE {
            vec![]
        } else {
            dnf(&a.transition(q, w.at(p)))
        };
        for set in &c {
            for &s in set {
                let key = (s, w.next(p));
                if let std::collections::hash_map::Entry::Vacant(e) = index.entry(key) {
                    e.insert(nodes.len());
                    nodes.push(key);
                }
            }
        }
        choices.push(c);
        i += 1;
    }
    let mut pick = vec![0usize; nodes.len()];
    loop {
        if strategy_wins(a, &nodes, &index, &choices, &pick, w) {
            return true;
        }
        let mut j = 0;
        loop {
            if j == pick.len() {
                return false;
            }
            pick[j] += 1;
            if pick[j] < choices[j].len().max(1) {
                break;
            }
            pick[j] = 0;
            j += 1;
        }
    }
}

fn strategy_wins(
    a: &dyn Automaton<u32>,
    nodes: &[(StateId, usize)],
    index: &HashMap<(StateId, usize), usize>,
    choices: &[Vec<BTreeSet<StateId>>],
    pick: &[usize],
    w: &LassoWord<u32>,
) -> bool {
    let succ = |i: usize| -> Vec<usize> {
        let (_, p) = nodes[i];
        choices[i][pick[i]].iter().map(|&s| index[&(s, w.next(p))]).collect()
    };
    let mut reach = vec![false; nodes.len()];
    let mut stack = vec![0];
    reach[0] = true;
    while let Some(i) = stack.pop() {
        if choices[i].is_empty() {
            return false;
        }
        for j in succ(i) {
            if !reach[j] {
                reach[j] = true;
                stack.push(j);
            }
        }
    }
    // no reachable cycle through rejecting nodes only
    let bad: Vec<usize> = (0..nodes.len()).filter(|&i| reach[i] && !a.is_accepting(nodes[i].0)).collect();
    let bad_set: HashSet<usize> = bad.iter().copied().collect();
    for &start in &bad {
        let mut seen = HashSet::new();
        let mut stack: Vec<usize> = succ(start).into_iter().filter(|j| bad_set.contains(j)).collect();
        while let Some(i) = stack.pop() {
            if i == start {
                return false;
            }
            if seen.insert(i) {
                stack.extend(succ(i).into_iter().filter(|j| bad_set.contains(j)));
            }
        }
    }
    true
}

// ---------------------------------------------------------------------------
// Regex pairs to a Büchi automaton, for omega-regular membership.

/// Thompson NFA: epsilon edges and symbol edges between numbered states.
struct Nfa {
    states: usize,
    eps: Vec<(usize, usize)>,
    sym: Vec<(usize, Symbol, usize)>,
}

impl Nfa {
    fn fresh(&mut self) -> usize {
        self.states += 1;
        self.states - 1
    }

    fn build(&mut self, r: &Regex) -> (usize, usize) {
        let (s, f) = (self.fresh(), self.fresh());
        match r {
            Regex::Eps => self.eps.push((s, f)),
            Regex::Sym(x) => self.sym.push((s, x.clone(), f)),
            Regex::Alt(a, b) => {
                for c in [a, b] {
                    let (cs, cf) = self.build(c);
                    self.eps.extend([(s, cs), (cf, f)]);
                }
            }
            Regex::Cat(a, b) => {
                let (as_, af) = self.build(a);
                let (bs, bf) = self.build(b);
                self.eps.extend([(s, as_), (af, bs), (bf, f)]);
            }
            Regex::Star(a) => {
                let (as_, af) = self.build(a);
                self.eps.extend([(s, as_), (af, f), (s, f), (af, as_)]);
            }
        }
        (s, f)
    }

    fn closure(&self, from: usize) -> BTreeSet<usize> {
        let mut seen = BTreeSet::from([from]);
        let mut stack = vec![from];
        while let Some(q) = stack.pop() {
            for &(a, b) in &self.eps {
                if a == q && seen.insert(b) {
                    stack.push(b);
                }
            }
        }
        seen
    }
}

/// Whether a letter (one world and program per path) matches a symbol:
/// exact proposition sets, tuple entries equal or wildcard.
pub fn symbol_matches(s: &Symbol, interp: &WorldInterp, l: &Letter) -> bool {
    let (worlds, progs) = (&l.worlds, &l.progs);
    worlds.len() == s.sets.len()
        && s.sets.iter().zip(worlds).all(|(set, &w)| interp.aps().iter().enumerate().all(|(i, a)| set.contains(a) == (w >> i & 1 == 1)))
        && s.progs.0.iter().zip(progs).all(|(e, &p)| e.as_deref().is_none_or(|e| e == interp.program_name(p)))
}

/// Membership of a lasso word in `OR_i stem_i . loop_i^omega`, through a
/// Büchi automaton: the stem NFA, then the loop NFA whose final state jumps
/// back to its start through an accepting marker.
pub fn omega_member(pairs: &[(Regex, Regex)], interp: &WorldInterp, w: &LassoWord<Letter>) -> bool {
    pairs.iter().any(|(stem, lp)| {
        let mut nfa = Nfa { states: 0, eps: vec![], sym: vec![] };
        let (s0, sf) = nfa.build(stem);
        let (l0, lf) = nfa.build(lp);
        let marker = nfa.fresh();
        nfa.eps.extend([(sf, l0), (lf, marker), (marker, l0)]);
        buchi_accepts(&nfa, s0, marker, interp, w)
    })
}

fn buchi_accepts(nfa: &Nfa, init: usize, marker: usize, interp: &WorldInterp, w: &LassoWord<Letter>) -> bool {
    // product nodes (nfa state, position): epsilon edges keep the position,
    // symbol edges read the letter there and advance
    let succ = |(q, p): (usize, usize)| -> Vec<(usize, usize)> {
        let mut v: Vec<(usize, usize)> = nfa.eps.iter().filter(|e| e.0 == q).map(|e| (e.1, p)).collect();
        for (a, sym, b) in &nfa.sym {
            if *a == q && symbol_matches(sym, interp, w.at(p)) {
                v.push((*b, w.next(p)));
            }
        }
        v
    };
    let reach = |from: Vec<(usize, usize)>| -> HashSet<(usize, usize)> {
        let mut seen = HashSet::new();
        let mut stack = from;
        while let Some(n) = stack.pop() {
            if seen.insert(n) {
                stack.extend(succ(n));
            }
        }
        seen
    };
    // a loop language without the empty word makes every cycle through the
    // marker read at least one letter
    reach(vec![(init, 0)]).into_iter().filter(|n| n.0 == marker).any(|acc| reach(succ(acc)).contains(&acc))
}

// ---------------------------------------------------------------------------
// HyperCTL* alternation depth.

/// Alternation depth of a HyperCTL* formula: universal quantifiers become
/// negated existentials, negations are pushed to atoms and quantifiers
/// (until and release swap, next is self-dual), and a quantifier below
/// another one counts when it is negated or lies, without an intermediate
/// quantifier, in the left operand of an until or the right operand of a
/// release. The result is the maximal count along a branch.
pub fn alternation_depth(f: &CtlStar) -> usize {
    depth(f, true, false, false)
}

fn depth(f: &CtlStar, positive: bool, nested: bool, obliged: bool) -> usize {
    match f {
        CtlStar::True | CtlStar::False | CtlStar::Atom(..) => 0,
        CtlStar::Not(g) => depth(g, !positive, nested, obliged),
        CtlStar::And(l, r) | CtlStar::Or(l, r) => depth(l, positive, nested, obliged).max(depth(r, positive, nested, obliged)),
        CtlStar::Next(g) => depth(g, positive, nested, obliged),
        CtlStar::Until(l, r) | CtlStar::Release(l, r) => {
            // under negation an until is a release and vice versa
            let until = matches!(f, CtlStar::Until(..)) == positive;
            let (lo, ro) = if until { (true, obliged) } else { (obliged, true) };
            depth(l, positive, nested, lo).max(depth(r, positive, nested, ro))
        }
        CtlStar::Exists(_, g) | CtlStar::Forall(_, g) => {
            let existential = matches!(f, CtlStar::Exists(..)) == positive;
            let counts = nested && (!existential || obliged);
            // an effective existential keeps the polarity for its body; an
            // effective universal is a negated existential over the negated
            // body, so the polarity flips
            usize::from(counts) + depth(g, if existential { positive } else { !positive }, true, false)
        }
    }
}

/// The suite of HyperCTL* formulas for the criticality comparison, with the
/// alternation depth each one is expected to have.
pub fn hyperctl_suite() -> Vec<(&'static str, CtlStar, usize)> {
    use CtlStar as C;
    let a = |v: &str| C::atom("a", v);
    let b = |v: &str| C::atom("b", v);
    vec![
        ("forall p. forall q. G(a_p <-> a_q)", C::forall("p", C::forall("q", C::globally(C::or(C::and(a("p"), a("q")), C::and(C::not(a("p")), C::not(a("q"))))))), 0),
        ("forall p. exists q. G(a_p <-> a_q)", C::forall("p", C::exists("q", C::globally(C::or(C::and(a("p"), a("q")), C::and(C::not(a("p")), C::not(a("q"))))))), 1),
        ("exists p. forall q. X a_q", C::exists("p", C::forall("q", C::next(a("q")))), 1),
        ("forall p. X forall q. b_q", C::forall("p", C::next(C::forall("q", b("q")))), 0),
        ("exists p. F exists q. a_q", C::exists("p", C::eventually(C::exists("q", a("q")))), 0),
        ("forall p. F exists q. a_q", C::forall("p", C::eventually(C::exists("q", a("q")))), 1),
        ("exists p. G exists q. a_q", C::exists("p", C::globally(C::exists("q", a("q")))), 1),
        ("exists p. (exists q. a_q) U b_p", C::exists("p", C::until(C::exists("q", a("q")), b("p"))), 1),
        ("exists p. (exists q. a_q) R b_p", C::exists("p", C::release(C::exists("q", a("q")), b("p"))), 0),
        ("exists p. (forall q. a_q) R b_p", C::exists("p", C::release(C::forall("q", a("q")), b("p"))), 1),
        ("exists p. a_p U exists q. b_q", C::exists("p", C::until(a("p"), C::exists("q", b("q")))), 0),
        ("forall p. !X exists q. a_q", C::forall("p", C::not(C::next(C::exists("q", a("q"))))), 0),
        (
            "forall p. exists q. forall r. (a_p U b_q) & G a_r",
            C::forall("p", C::exists("q", C::forall("r", C::and(C::until(a("p"), b("q")), C::globally(a("r")))))),
            2,
        ),
    ]
}

// ---------------------------------------------------------------------------
// Segments of a program by a state-sequence search in M_alpha.

/// Whether the absolute positions `i <= k` delimit a segment of `m`'s
/// program: a run from the initial node that takes one tuple edge per
/// position, every epsilon stretch meeting only markings whose tests hold at
/// the position it happens at, and a final epsilon stretch at `k` into the
/// final node. Tests are decided by `test`.
pub fn segment_by_search(
    m: &hyperpdl::marked_nfa::MarkedNfa,
    eps: &hyperpdl::marked_nfa::EpsReach,
    programs: &[String],
    pa: &LassoAssignment,
    i: usize,
    k: usize,
    test: &dyn Fn(usize, &Formula) -> bool,
) -> bool {
    let holds = |x: u64, pos: usize| (0..m.tests.len()).filter(|t| x >> t & 1 == 1).all(|t| test(pos, &m.tests[t]));
    let mut current: BTreeSet<usize> = BTreeSet::from([m.initial]);
    for j in i..k {
        let letter: Vec<&str> = (0..pa.n()).map(|l| programs[pa.prog(l, j)].as_str()).collect();
        let mut next = BTreeSet::new();
        for &q in &current {
            for (x, q2) in hyperpdl::marked_nfa::tau_reach(m, eps, q, &letter) {
                if holds(x, j) {
                    next.insert(q2);
                }
            }
        }
        current = next;
    }
    current.iter().any(|&q| eps.from(q).iter().any(|&(x, q2)| q2 == m.final_node && holds(x, k)))
}

/// Marking sets of all epsilon paths from `q` to `q2`, by a search over
/// (node, markings so far) pairs; both endpoints count.
pub fn eps_marking_sets(m: &hyperpdl::marked_nfa::MarkedNfa, q: usize, q2: usize) -> BTreeSet<u64> {
    let mark = |n: usize| m.marking[n].map_or(0u64, |t| 1 << t);
    let mut seen = HashSet::from([(q, mark(q))]);
    let mut stack = vec![(q, mark(q))];
    let mut out = BTreeSet::new();
    while let Some((n, x)) = stack.pop() {
        if n == q2 {
            out.insert(x);
        }
        for &(a, b) in &m.eps_edges {
            if a == n {
                let s = (b, x | mark(b));
                if seen.insert(s) {
                    stack.push(s);
                }
            }
        }
    }
    out
}

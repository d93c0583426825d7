//! The intermediate automaton `M_alpha` of a program: epsilon edges, tuple
//! guarded edges and test markings, together with the succinct `dp`/`eps`
//! guard formulas that summarise marking sets along epsilon paths.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt::Write;

use crate::syntax::{Formula, Program, TupleSym};

pub type NodeId = usize;
pub type TestId = usize;
/// Set of test ids as a bitmask.
pub type TestSet = u64;

pub const MAX_TESTS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConstructionKind {
    Tup,
    Eps,
    Sum,
    Concat,
    Star,
    Test,
}

/// One case of the inductive construction; its nodes occupy `lo..hi`.
#[derive(Clone, Debug)]
pub struct Construction {
    pub kind: ConstructionKind,
    pub q0: NodeId,
    pub qf: NodeId,
    pub lo: NodeId,
    pub hi: NodeId,
    pub children: Vec<usize>,
}

impl Construction {
    pub fn contains(&self, q: NodeId) -> bool {
        self.lo <= q && q < self.hi
    }
}

#[derive(Clone, Debug)]
pub struct MarkedNfa {
    pub arity: usize,
    pub node_count: usize,
    pub initial: NodeId,
    pub final_node: NodeId,
    pub eps_edges: Vec<(NodeId, NodeId)>,
    /// The `q_f -> q_0` edges of star constructions (a subset of `eps_edges`).
    pub backward_edges: Vec<(NodeId, NodeId)>,
    pub tup_edges: Vec<(NodeId, TupleSym, NodeId)>,
    pub marking: Vec<Option<TestId>>,
    /// Star constructions enclosing each node, outermost first.
    pub star_scope: Vec<Vec<usize>>,
    pub tests: Vec<Formula>,
    pub constructions: Vec<Construction>,
    pub root: usize,
}

struct Builder {
    next: NodeId,
    eps: Vec<(NodeId, NodeId)>,
    backward: Vec<(NodeId, NodeId)>,
    tup: Vec<(NodeId, TupleSym, NodeId)>,
    marking: Vec<Option<TestId>>,
    scope: Vec<Vec<usize>>,
    stars: Vec<usize>,
    tests: Vec<Formula>,
    cons: Vec<Construction>,
}

impl Builder {
    fn node(&mut self) -> NodeId {
        let q = self.next;
        self.next += 1;
        self.marking.push(None);
        self.scope.push(self.stars.clone());
        q
    }

    fn build(&mut self, p: &Program) -> usize {
        let id = self.cons.len();
        self.cons.push(Construction {
            kind: ConstructionKind::Eps,
            q0: 0,
            qf: 0,
            lo: self.next,
            hi: 0,
            children: vec![],
        });
        let (kind, q0, qf, children) = match p {
            Program::Tup(t) => {
                let (a, b) = (self.node(), self.node());
                self.tup.push((a, t.clone(), b));
                (ConstructionKind::Tup, a, b, vec![])
            }
            Program::Eps => {
                let (a, b) = (self.node(), self.node());
                self.eps.push((a, b));
                (ConstructionKind::Eps, a, b, vec![])
            }
            Program::Sum(l, r) => {
                let q0 = self.node();
                let c1 = self.build(l);
                let c2 = self.build(r);
                let qf = self.node();
                let (a, b) = (&self.cons[c1], &self.cons[c2]);
                let edges = [(q0, a.q0), (q0, b.q0), (a.qf, qf), (b.qf, qf)];
                self.eps.extend(edges);
                (ConstructionKind::Sum, q0, qf, vec![c1, c2])
            }
            Program::Concat(l, r) => {
                let c1 = self.build(l);
                let c2 = self.build(r);
                let (a, b) = (&self.cons[c1], &self.cons[c2]);
                let (q0, qf) = (a.q0, b.qf);
                self.eps.push((a.qf, b.q0));
                (ConstructionKind::Concat, q0, qf, vec![c1, c2])
            }
            Program::Star(b) => {
                self.stars.push(id);
                let q0 = self.node();
                let c1 = self.build(b);
                let qf = self.node();
                self.stars.pop();
                let a = &self.cons[c1];
                let edges = [(q0, a.q0), (q0, qf), (a.qf, qf), (qf, q0)];
                self.eps.extend(edges);
                self.backward.push((qf, q0));
                (ConstructionKind::Star, q0, qf, vec![c1])
            }
            Program::Test(f) => {
                let tid = match self.tests.iter().position(|t| *t == **f) {
                    Some(i) => i,
                    None => {
                        self.tests.push((**f).clone());
                        self.tests.len() - 1
                    }
                };
                let (a, m, b) = (self.node(), self.node(), self.node());
                self.marking[m] = Some(tid);
                self.eps.extend([(a, m), (m, b)]);
                (ConstructionKind::Test, a, b, vec![])
            }
        };
        let hi = self.next;
        let c = &mut self.cons[id];
        c.kind = kind;
        c.q0 = q0;
        c.qf = qf;
        c.hi = hi;
        c.children = children;
        id
    }
}

/// Builds `M_alpha` over `n` paths. Tuple arities are not checked here; the
/// automaton builder reports mismatches.
pub fn build_marked_nfa(alpha: &Program, n: usize) -> MarkedNfa {
    let mut b = Builder {
        next: 0,
        eps: vec![],
        backward: vec![],
        tup: vec![],
        marking: vec![],
        scope: vec![],
        stars: vec![],
        tests: vec![],
        cons: vec![],
    };
    let root = b.build(alpha);
    let (initial, final_node) = (b.cons[root].q0, b.cons[root].qf);
    assert!(b.next <= 3 * alpha.size(), "M_alpha has {} states for a program of size {}", b.next, alpha.size());
    assert!(
        b.marking[initial].is_none() && b.marking[final_node].is_none(),
        "initial and final states of M_alpha must be unmarked"
    );
    assert!(b.tests.len() <= MAX_TESTS, "more than {MAX_TESTS} distinct tests in one program");
    MarkedNfa {
        arity: n,
        node_count: b.next,
        initial,
        final_node,
        eps_edges: b.eps,
        backward_edges: b.backward,
        tup_edges: b.tup,
        marking: b.marking,
        star_scope: b.scope,
        tests: b.tests,
        constructions: b.cons,
        root,
    }
}

impl MarkedNfa {
    pub fn psi(&self, q: NodeId) -> TestSet {
        self.marking[q].map_or(0, |t| 1u64 << t)
    }

    /// Innermost star construction enclosing both nodes.
    pub fn innermost_common_star(&self, q: NodeId, q2: NodeId) -> Option<usize> {
        let (a, b) = (&self.star_scope[q], &self.star_scope[q2]);
        a.iter().zip(b).take_while(|(x, y)| x == y).last().map(|(x, _)| *x)
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph m_alpha {\n  rankdir=LR;\n");
        for q in 0..self.node_count {
            let shape = if q == self.final_node { "doublecircle" } else { "circle" };
            let label = match self.marking[q] {
                Some(t) => format!("q{q}\\n{{{}}}", escape(&self.tests[t].to_string())),
                None => format!("q{q}"),
            };
            let _ = writeln!(out, "  n{q} [shape={shape}, label=\"{label}\"];");
        }
        let _ = writeln!(out, "  start [shape=point];\n  start -> n{};", self.initial);
        for &(a, b) in &self.eps_edges {
            let _ = writeln!(out, "  n{a} -> n{b} [style=dashed, label=\"eps\"];");
        }
        for (a, g, b) in &self.tup_edges {
            let _ = writeln!(out, "  n{a} -> n{b} [label=\"{}\"];", escape(&g.to_string()));
        }
        out.push_str("}\n");
        out
    }
}

pub(crate) fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Positive boolean formula over test variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
#[derive(Default)]
pub enum Guard {
    True,
    #[default]
    False,
    Var(TestId),
    And(Box<Guard>, Box<Guard>),
    Or(Box<Guard>, Box<Guard>),
}


impl Guard {
    pub fn and(a: Guard, b: Guard) -> Guard {
        match (a, b) {
            (Guard::False, _) | (_, Guard::False) => Guard::False,
            (Guard::True, x) | (x, Guard::True) => x,
            (a, b) => Guard::And(Box::new(a), Box::new(b)),
        }
    }

    pub fn or(a: Guard, b: Guard) -> Guard {
        match (a, b) {
            (Guard::True, _) | (_, Guard::True) => Guard::True,
            (Guard::False, x) | (x, Guard::False) => x,
            (a, b) => Guard::Or(Box::new(a), Box::new(b)),
        }
    }

    /// Leaves plus operators.
    pub fn size(&self) -> usize {
        match self {
            Guard::True | Guard::False | Guard::Var(_) => 1,
            Guard::And(a, b) | Guard::Or(a, b) => 1 + a.size() + b.size(),
        }
    }

    pub fn eval(&self, v: &dyn Fn(TestId) -> bool) -> bool {
        match self {
            Guard::True => true,
            Guard::False => false,
            Guard::Var(t) => v(*t),
            Guard::And(a, b) => a.eval(v) && b.eval(v),
            Guard::Or(a, b) => a.eval(v) || b.eval(v),
        }
    }

    pub fn eval_set(&self, set: TestSet) -> bool {
        self.eval(&|t| set & (1u64 << t) != 0)
    }

    /// Folds the formula bottom-up; `var` replaces each test variable.
    pub fn fold<T>(&self, var: &mut dyn FnMut(TestId) -> T, t: &dyn Fn() -> T, f: &dyn Fn() -> T, and: &dyn Fn(T, T) -> T, or: &dyn Fn(T, T) -> T) -> T {
        match self {
            Guard::True => t(),
            Guard::False => f(),
            Guard::Var(i) => var(*i),
            Guard::And(a, b) => {
                let x = a.fold(var, t, f, and, or);
                let y = b.fold(var, t, f, and, or);
                and(x, y)
            }
            Guard::Or(a, b) => {
                let x = a.fold(var, t, f, and, or);
                let y = b.fold(var, t, f, and, or);
                or(x, y)
            }
        }
    }
}

impl std::fmt::Display for Guard {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Guard::True => write!(f, "true"),
            Guard::False => write!(f, "false"),
            Guard::Var(t) => write!(f, "v{t}"),
            Guard::And(a, b) => write!(f, "({a} & {b})"),
            Guard::Or(a, b) => write!(f, "({a} | {b})"),
        }
    }
}

/// `dp(q, q')` for all node pairs: marking sets along epsilon paths that never
/// take a star's backward edge.
#[derive(Clone, Debug)]
pub struct DpTable {
    nodes: usize,
    entries: Vec<Guard>,
}

impl DpTable {
    pub fn get(&self, q: NodeId, q2: NodeId) -> &Guard {
        &self.entries[q * self.nodes + q2]
    }
}

pub fn dp_table(m: &MarkedNfa) -> DpTable {
    let n = m.node_count;
    let mut entries = Vec::with_capacity(n * n);
    let mut memo = HashMap::new();
    for q in 0..n {
        for q2 in 0..n {
            entries.push(dp(m, m.root, q, q2, &mut memo));
        }
    }
    DpTable { nodes: n, entries }
}

fn dp(m: &MarkedNfa, c: usize, q: NodeId, q2: NodeId, memo: &mut HashMap<(usize, NodeId, NodeId), Guard>) -> Guard {
    if let Some(g) = memo.get(&(c, q, q2)) {
        return g.clone();
    }
    let con = &m.constructions[c];
    let g = match con.kind {
        ConstructionKind::Tup => bool_guard(q == q2),
        ConstructionKind::Eps => bool_guard(!(q == con.qf && q2 == con.q0 && q != q2)),
        ConstructionKind::Test => {
            let marked = con.q0 + 1;
            if q == q2 && q != marked {
                Guard::True
            } else if q > q2 {
                Guard::False
            } else {
                Guard::Var(m.marking[marked].expect("test node is marked"))
            }
        }
        ConstructionKind::Sum => {
            let (c1, c2) = (con.children[0], con.children[1]);
            let (a, b) = (&m.constructions[c1], &m.constructions[c2]);
            if q == q2 && (q == con.q0 || q == con.qf) {
                Guard::True
            } else if a.contains(q) && a.contains(q2) {
                dp(m, c1, q, q2, memo)
            } else if b.contains(q) && b.contains(q2) {
                dp(m, c2, q, q2, memo)
            } else if q == con.q0 && a.contains(q2) {
                dp(m, c1, a.q0, q2, memo)
            } else if q == con.q0 && b.contains(q2) {
                dp(m, c2, b.q0, q2, memo)
            } else if a.contains(q) && q2 == con.qf {
                dp(m, c1, q, a.qf, memo)
            } else if b.contains(q) && q2 == con.qf {
                dp(m, c2, q, b.qf, memo)
            } else if q == con.q0 && q2 == con.qf {
                let (a0, af, b0, bf) = (a.q0, a.qf, b.q0, b.qf);
                Guard::or(dp(m, c1, a0, af, memo), dp(m, c2, b0, bf, memo))
            } else {
                Guard::False
            }
        }
        ConstructionKind::Concat => {
            let (c1, c2) = (con.children[0], con.children[1]);
            let (a, b) = (&m.constructions[c1], &m.constructions[c2]);
            if a.contains(q) && a.contains(q2) {
                dp(m, c1, q, q2, memo)
            } else if b.contains(q) && b.contains(q2) {
                dp(m, c2, q, q2, memo)
            } else if a.contains(q) && b.contains(q2) {
                let (af, b0) = (a.qf, b.q0);
                Guard::and(dp(m, c1, q, af, memo), dp(m, c2, b0, q2, memo))
            } else {
                Guard::False
            }
        }
        ConstructionKind::Star => {
            let c1 = con.children[0];
            let a = &m.constructions[c1];
            if q == q2 && (q == con.q0 || q == con.qf) {
                Guard::True
            } else if a.contains(q) && a.contains(q2) {
                dp(m, c1, q, q2, memo)
            } else if q == con.q0 && q2 == con.qf {
                Guard::True
            } else if q == con.q0 && a.contains(q2) {
                dp(m, c1, a.q0, q2, memo)
            } else if a.contains(q) && q2 == con.qf {
                dp(m, c1, q, a.qf, memo)
            } else {
                Guard::False
            }
        }
    };
    memo.insert((c, q, q2), g.clone());
    g
}

fn bool_guard(b: bool) -> Guard {
    if b {
        Guard::True
    } else {
        Guard::False
    }
}

/// `eps(q, q2) = dp(q, q2) | (dp(q, qf) & dp(q0, q2))` with `q0`, `qf` the
/// boundary of the innermost star enclosing both nodes.
pub fn eps_formula(m: &MarkedNfa, dp: &DpTable, q: NodeId, q2: NodeId) -> Guard {
    let direct = dp.get(q, q2).clone();
    match m.innermost_common_star(q, q2) {
        Some(s) => {
            let star = &m.constructions[s];
            let around = Guard::and(dp.get(q, star.qf).clone(), dp.get(star.q0, q2).clone());
            Guard::or(direct, around)
        }
        None => direct,
    }
}

/// Epsilon reachability annotated with the exact set of markings visited:
/// `(src, X, dst)` iff some epsilon path from `src` to `dst` meets exactly the
/// markings `X` (including both endpoints).
#[derive(Clone, Debug, Default)]
pub struct EpsReach {
    pub facts: HashSet<(NodeId, TestSet, NodeId)>,
    by_src: Vec<Vec<(TestSet, NodeId)>>,
}

impl EpsReach {
    pub fn from(&self, q: NodeId) -> &[(TestSet, NodeId)] {
        &self.by_src[q]
    }
}

pub fn eps_reach(m: &MarkedNfa) -> EpsReach {
    eps_reach_filtered(m, false)
}

/// As [`eps_reach`] but ignoring the backward edges of star constructions.
pub fn eps_reach_forward(m: &MarkedNfa) -> EpsReach {
    eps_reach_filtered(m, true)
}

fn eps_reach_filtered(m: &MarkedNfa, skip_backward: bool) -> EpsReach {
    let mut preds: Vec<Vec<NodeId>> = vec![vec![]; m.node_count];
    for &(a, b) in &m.eps_edges {
        if skip_backward && m.backward_edges.contains(&(a, b)) {
            continue;
        }
        preds[b].push(a);
    }
    let mut facts = HashSet::new();
    let mut work = Vec::new();
    for q in 0..m.node_count {
        let f = (q, m.psi(q), q);
        facts.insert(f);
        work.push(f);
    }
    while let Some((q1, x, q2)) = work.pop() {
        for &p in &preds[q1] {
            let f = (p, x | m.psi(p), q2);
            if facts.insert(f) {
                work.push(f);
            }
        }
    }
    let mut by_src = vec![vec![]; m.node_count];
    for &(a, x, b) in &facts {
        by_src[a].push((x, b));
    }
    for v in &mut by_src {
        v.sort_unstable();
    }
    EpsReach { facts, by_src }
}

/// All `(X, q'')` with `q =>eps_X q'` and a tuple edge `q' -> q''` whose guard
/// matches `letter`.
pub fn tau_reach<S: AsRef<str>>(m: &MarkedNfa, eps: &EpsReach, q: NodeId, letter: &[S]) -> BTreeSet<(TestSet, NodeId)> {
    let mut out = BTreeSet::new();
    for &(x, mid) in eps.from(q) {
        for (src, g, dst) in &m.tup_edges {
            if *src == mid && g.matches(letter) {
                out.insert((x, *dst));
            }
        }
    }
    out
}

/// Whether every node has at most one tuple-step target on every letter. The
/// letters checked are the programs named in guards at each position plus one
/// fresh program standing for all others.
pub fn is_deterministic(m: &MarkedNfa) -> bool {
    let eps = eps_reach(m);
    let mut columns: Vec<Vec<String>> = vec![vec![]; m.arity];
    for (_, g, _) in &m.tup_edges {
        for (i, e) in g.0.iter().enumerate() {
            if let Some(p) = e {
                if !columns[i].contains(p) {
                    columns[i].push(p.clone());
                }
            }
        }
    }
    for col in &mut columns {
        col.push("\u{0}fresh".to_string());
    }
    let mut letter = vec![String::new(); m.arity];
    let mut ok = true;
    product(&columns, 0, &mut letter, &mut |l| {
        for q in 0..m.node_count {
            let targets: BTreeSet<NodeId> = tau_reach(m, &eps, q, l).into_iter().map(|(_, t)| t).collect();
            if targets.len() > 1 {
                return false;
            }
        }
        true
    }, &mut ok);
    ok
}

fn product(cols: &[Vec<String>], i: usize, cur: &mut Vec<String>, f: &mut dyn FnMut(&[String]) -> bool, ok: &mut bool) {
    if !*ok {
        return;
    }
    if i == cols.len() {
        *ok = f(cur);
        return;
    }
    for v in &cols[i] {
        cur[i] = v.clone();
        product(cols, i + 1, cur, f, ok);
    }
}

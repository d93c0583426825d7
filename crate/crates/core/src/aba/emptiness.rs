use std::collections::{HashMap, VecDeque};
use std::hash::Hash;
use std::sync::Arc;

use thiserror::Error;

use super::automaton::Automaton;
use super::mh::MhNba;
use super::posbool::{PosBool, StateId, SINK_TRUE};
use crate::lasso::LassoWord;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AbaError {
    #[error("emptiness needs an enumerable alphabet, but no letters were supplied")]
    AlphabetNotEnumerable,
    #[error("state {0} has a conjunctive transition; expected a nondeterministic automaton")]
    NotNondeterministic(StateId),
    #[error("letter at lasso position {0} lies outside the automaton's alphabet")]
    LetterDomain(usize),
}

/// An accepting run on a lasso word: `states.at(i)` reads `word.at(i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Run<L> {
    pub states: LassoWord<StateId>,
    pub word: LassoWord<L>,
}

#[derive(Clone, Debug)]
pub struct Emptiness<L> {
    pub empty: bool,
    pub witness: Option<Run<L>>,
    pub explored_states: usize,
}

/// Explicit graph with labelled edges, discovered from a root.
struct Graph<N> {
    nodes: Vec<N>,
    accepting: Vec<bool>,
    succ: Vec<Vec<(usize, usize)>>,
}

fn explore<N: Clone + Hash + Eq>(
    root: N,
    mut expand: impl FnMut(&N) -> Result<Vec<(usize, N)>, AbaError>,
    is_accepting: impl Fn(&N) -> bool,
) -> Result<Graph<N>, AbaError> {
    let mut index: HashMap<N, usize> = HashMap::new();
    let mut g = Graph { nodes: vec![], accepting: vec![], succ: vec![] };
    index.insert(root.clone(), 0);
    g.nodes.push(root.clone());
    g.accepting.push(is_accepting(&root));
    g.succ.push(vec![]);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let node = g.nodes[i].clone();
        for (label, m) in expand(&node)? {
            let j = match index.get(&m) {
                Some(&j) => j,
                None => {
                    let j = g.nodes.len();
                    index.insert(m.clone(), j);
                    g.accepting.push(is_accepting(&m));
                    g.nodes.push(m);
                    g.succ.push(vec![]);
                    queue.push_back(j);
                    j
                }
            };
            g.succ[i].push((label, j));
        }
    }
    Ok(g)
}

/// Iterative Tarjan; returns the SCC index of every node.
fn sccs(succ: &[Vec<(usize, usize)>]) -> Vec<usize> {
    let n = succ.len();
    const UNSEEN: usize = usize::MAX;
    let (mut index, mut low, mut comp) = (vec![UNSEEN; n], vec![0; n], vec![UNSEEN; n]);
    let mut on_stack = vec![false; n];
    let (mut stack, mut counter, mut ncomp) = (Vec::new(), 0, 0);
    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&(v, k)) = call.last() {
            if k < succ[v].len() {
                let w = succ[v][k].1;
                call.last_mut().expect("nonempty call stack").1 += 1;
                if index[w] == UNSEEN {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(u, _)) = call.last() {
                    low[u] = low[u].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        comp[w] = ncomp;
                        if w == v {
                            break;
                        }
                    }
                    ncomp += 1;
                }
            }
        }
    }
    comp
}

/// Shortest path `from -> to` (to reached after at least one edge when
/// `nonempty`) using only nodes allowed by `inside`. Returns (node, label) pairs
/// starting at `from`.
fn path(g_succ: &[Vec<(usize, usize)>], from: usize, to: usize, nonempty: bool, inside: &dyn Fn(usize) -> bool) -> Option<Vec<(usize, usize)>> {
    if !nonempty && from == to {
        return Some(vec![]);
    }
    let mut prev: HashMap<usize, (usize, usize)> = HashMap::new();
    let mut queue = VecDeque::from([from]);
    let mut seen = vec![false; g_succ.len()];
    seen[from] = !nonempty;
    while let Some(v) = queue.pop_front() {
        for &(label, w) in &g_succ[v] {
            if !inside(w) {
                continue;
            }
            if w == to {
                let mut out = vec![(v, label)];
                let mut cur = v;
                while cur != from {
                    let (p, l) = prev[&cur];
                    out.push((p, l));
                    cur = p;
                }
                out.reverse();
                return Some(out);
            }
            if !seen[w] {
                seen[w] = true;
                prev.insert(w, (v, label));
                queue.push_back(w);
            }
        }
    }
    None
}

/// Finds a reachable accepting cycle: returns stem and cycle as (node, label) steps.
fn accepting_lasso<N>(g: &Graph<N>) -> Option<(Vec<(usize, usize)>, Vec<(usize, usize)>)> {
    let comp = sccs(&g.succ);
    let mut size = HashMap::new();
    for &c in &comp {
        *size.entry(c).or_insert(0usize) += 1;
    }
    let target = (0..g.nodes.len()).find(|&v| {
        g.accepting[v] && (size[&comp[v]] > 1 || g.succ[v].iter().any(|&(_, w)| w == v))
    })?;
    let stem = path(&g.succ, 0, target, false, &|_| true)?;
    let c = comp[target];
    let cycle = path(&g.succ, target, target, true, &|w| comp[w] == c)?;
    Some((stem, cycle))
}

/// Nonemptiness of a nondeterministic automaton over the given letters.
pub fn is_empty<L: Clone>(a: &dyn Automaton<L>, letters: &[L]) -> Result<Emptiness<L>, AbaError> {
    if letters.is_empty() {
        return Err(AbaError::AlphabetNotEnumerable);
    }
    let g = explore(
        a.initial(),
        |&q| {
            let mut out = Vec::new();
            for (i, l) in letters.iter().enumerate() {
                let d = a.transition(q, l).disjuncts().ok_or(AbaError::NotNondeterministic(q))?;
                out.extend(d.into_iter().map(|s| (i, s)));
            }
            Ok(out)
        },
        |&q| a.is_accepting(q),
    )?;
    let explored_states = g.nodes.len();
    Ok(match accepting_lasso(&g) {
        None => Emptiness { empty: true, witness: None, explored_states },
        Some((stem, cycle)) => {
            let states = LassoWord::new(
                stem.iter().map(|&(v, _)| g.nodes[v]).collect(),
                cycle.iter().map(|&(v, _)| g.nodes[v]).collect(),
            );
            let word = LassoWord::new(
                stem.iter().map(|&(_, l)| letters[l].clone()).collect(),
                cycle.iter().map(|&(_, l)| letters[l].clone()).collect(),
            );
            Emptiness { empty: false, witness: Some(Run { states, word }), explored_states }
        }
    })
}

fn check_letters<L>(a: &dyn Automaton<L>, w: &LassoWord<L>) -> Result<(), AbaError> {
    match w.positions().find(|(_, l)| !a.accepts_letter(l)) {
        Some((i, _)) => Err(AbaError::LetterDomain(i)),
        None => Ok(()),
    }
}

/// Membership of a lasso word in a nondeterministic automaton: an accepting
/// cycle in the product with the word's positions.
pub fn accepts_lasso_nba<L>(a: &dyn Automaton<L>, w: &LassoWord<L>) -> Result<bool, AbaError> {
    check_letters(a, w)?;
    let g = explore(
        (a.initial(), 0usize),
        |&(q, p)| {
            let d = a.transition(q, w.at(p)).disjuncts().ok_or(AbaError::NotNondeterministic(q))?;
            Ok(d.into_iter().map(|s| (0, (s, w.next(p)))).collect())
        },
        |&(q, _)| a.is_accepting(q),
    )?;
    Ok(accepting_lasso(&g).is_some())
}

/// Membership of a lasso word in an alternating automaton, decided by solving
/// the Büchi acceptance game on the product of states and word positions.
pub fn accepts_lasso<L>(a: &dyn Automaton<L>, w: &LassoWord<L>) -> Result<bool, AbaError> {
    check_letters(a, w)?;
    let mut rho: Vec<PosBool> = Vec::new();
    let g = explore(
        (a.initial(), 0usize),
        |&(q, p)| {
            let f = a.transition(q, w.at(p));
            let next = w.next(p);
            let succ = f.vars().into_iter().map(|s| (0, (s, next))).collect();
            Ok(succ)
        },
        |&(q, _)| a.is_accepting(q),
    )?;
    let mut index: HashMap<(StateId, usize), usize> = HashMap::new();
    for (i, &(q, p)) in g.nodes.iter().enumerate() {
        index.insert((q, p), i);
        rho.push(a.transition(q, w.at(p)));
    }
    let next_of = |i: usize| w.next(g.nodes[i].1);
    let n = g.nodes.len();
    let cpre = |set: &[bool], i: usize| -> bool {
        let np = next_of(i);
        rho[i].eval(&|s| if s == SINK_TRUE { true } else { index.get(&(s, np)).is_some_and(|&j| set[j]) })
    };
    let mut z = vec![true; n];
    loop {
        let mut y = vec![false; n];
        loop {
            let mut changed = false;
            for i in 0..n {
                if !y[i] && ((g.accepting[i] && cpre(&z, i)) || cpre(&y, i)) {
                    y[i] = true;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        if y == z {
            break;
        }
        z = y;
    }
    Ok(z[0])
}

/// Lasso membership through dealternation: the Miyano-Hayashi automaton of `a`
/// in product with the word.
pub fn accepts_lasso_via_mh<L>(a: Arc<dyn Automaton<L>>, w: &LassoWord<L>) -> Result<bool, AbaError>
where
    L: Clone + Hash + Eq + Send + Sync + 'static,
{
    let nba = MhNba::new(a);
    accepts_lasso_nba(&nba, w)
}

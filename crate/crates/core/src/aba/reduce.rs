//! Language-preserving simplification of explicit nondeterministic automata:
//! states without an accepting continuation are dropped, bisimilar states are
//! merged, and the result is marked weak when its strongly connected
//! components agree on acceptance.

use std::collections::HashMap;
use std::hash::Hash;
use std::sync::Arc;

use super::automaton::{Aba, Automaton, Rule};
use super::posbool::{PosBool, StateId, SINK_FALSE, SINK_TRUE};

/// Simplifies `a` over the given alphabet. Automata with conjunctions in
/// some transition are returned unchanged.
pub fn reduce_nba<L: Clone + Hash + Eq + Send + Sync + 'static>(a: &Aba<L>, letters: &[L]) -> Aba<L> {
    let n = a.len();
    let mut succ: Vec<Vec<Vec<StateId>>> = vec![vec![]; n];
    for q in 2..n {
        for l in letters {
            match a.transition(q as StateId, l).disjuncts() {
                Some(d) => succ[q].push(d),
                None => return a.clone(),
            }
        }
    }
    let graph: Vec<Vec<usize>> = succ
        .iter()
        .map(|per| {
            let mut v: Vec<usize> = per.iter().flatten().map(|&s| s as usize).collect();
            v.sort_unstable();
            v.dedup();
            v
        })
        .collect();
    let comp = sccs(&graph);
    let live = live_states(a, &graph, &comp);

    // coarsest partition of live states by acceptance and successor blocks
    let mut block: Vec<usize> = (0..n).map(|q| if q < 2 { q } else { 2 + usize::from(a.is_accepting(q as StateId)) }).collect();
    loop {
        let mut ids: HashMap<(usize, Vec<Vec<usize>>), usize> = HashMap::new();
        let mut next = block.clone();
        for q in 2..n {
            if !live[q] {
                continue;
            }
            let sig: Vec<Vec<usize>> = succ[q]
                .iter()
                .map(|d| {
                    let mut b: Vec<usize> = d.iter().filter(|&&s| live[s as usize]).map(|&s| block[s as usize]).collect();
                    b.sort_unstable();
                    b.dedup();
                    b
                })
                .collect();
            let fresh = 2 + ids.len();
            next[q] = *ids.entry((block[q], sig)).or_insert(fresh);
        }
        let count = |b: &[usize]| (2..n).filter(|&q| live[q]).map(|q| b[q]).collect::<std::collections::HashSet<_>>().len();
        let stable = count(&next) == count(&block);
        block = next;
        if stable {
            break;
        }
    }

    // one state per block, in order of first member
    let mut new_id: HashMap<usize, StateId> = HashMap::new();
    let mut reps = Vec::new();
    for q in 2..n {
        if live[q] && !new_id.contains_key(&block[q]) {
            new_id.insert(block[q], 2 + reps.len() as StateId);
            reps.push(q);
        }
    }
    let map: Arc<Vec<Option<StateId>>> = Arc::new(
        (0..n)
            .map(|q| match q as StateId {
                SINK_TRUE | SINK_FALSE => Some(q as StateId),
                _ if live[q] => Some(new_id[&block[q]]),
                _ => None,
            })
            .collect(),
    );
    let mut out = Aba::new();
    for &q in &reps {
        let st = a.state(q as StateId);
        let (rule, map) = (st.rule.clone(), map.clone());
        let r: Rule<L> = Arc::new(move |l| rule(l).substitute(&mut |s| map[s as usize].map_or(PosBool::False, PosBool::var)));
        let id = out.add_state(st.label.clone(), st.accepting, r);
        out.set_group(id, st.group.clone());
    }
    out.set_initial(map[a.initial() as usize].unwrap_or(SINK_FALSE));
    out.letter_check = a.letter_check.clone();
    out.weak = a.weak || {
        let mut acc: HashMap<usize, bool> = HashMap::new();
        (2..n).filter(|&q| live[q] && cyclic(&graph, &comp, q)).all(|q| *acc.entry(comp[q]).or_insert(a.is_accepting(q as StateId)) == a.is_accepting(q as StateId))
    };
    out
}

/// Whether `q` lies on a cycle.
fn cyclic(graph: &[Vec<usize>], comp: &[usize], q: usize) -> bool {
    graph[q].iter().any(|&s| s == q || (s >= 2 && comp[s] == comp[q]))
}

/// States that can reach the accepting sink or an accepting state on a cycle.
fn live_states<L: Send + Sync + 'static>(a: &Aba<L>, graph: &[Vec<usize>], comp: &[usize]) -> Vec<bool> {
    let n = graph.len();
    let mut rev: Vec<Vec<usize>> = vec![vec![]; n];
    for (q, ss) in graph.iter().enumerate() {
        for &s in ss {
            rev[s].push(q);
        }
    }
    let mut live = vec![false; n];
    let mut stack = vec![SINK_TRUE as usize];
    for q in 2..n {
        if a.is_accepting(q as StateId) && cyclic(graph, comp, q) {
            stack.push(q);
        }
    }
    while let Some(q) = stack.pop() {
        if !live[q] {
            live[q] = true;
            stack.extend(rev[q].iter().copied());
        }
    }
    live
}

/// Component index per node (Kosaraju); sinks get their own components.
fn sccs(graph: &[Vec<usize>]) -> Vec<usize> {
    let n = graph.len();
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    for root in 0..n {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let mut stack = vec![(root, 0usize)];
        while let Some(&mut (q, ref mut i)) = stack.last_mut() {
            if let Some(&s) = graph[q].get(*i) {
                *i += 1;
                if !seen[s] {
                    seen[s] = true;
                    stack.push((s, 0));
                }
            } else {
                order.push(q);
                stack.pop();
            }
        }
    }
    let mut rev: Vec<Vec<usize>> = vec![vec![]; n];
    for (q, ss) in graph.iter().enumerate() {
        for &s in ss {
            rev[s].push(q);
        }
    }
    let mut comp = vec![usize::MAX; n];
    let mut c = 0;
    for &root in order.iter().rev() {
        if comp[root] != usize::MAX {
            continue;
        }
        let mut stack = vec![root];
        comp[root] = c;
        while let Some(q) = stack.pop() {
            for &p in &rev[q] {
                if comp[p] == usize::MAX {
                    comp[p] = c;
                    stack.push(p);
                }
            }
        }
        c += 1;
    }
    comp
}

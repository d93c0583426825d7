use std::sync::Arc;

use super::automaton::{Aba, Automaton, Rule};
use super::posbool::{PosBool, StateId, SINK_FALSE, SINK_TRUE};

/// Complement of an alternating Büchi automaton.
///
/// Weak automata are dualised directly with flipped acceptance. Otherwise the
/// dual co-Büchi automaton is turned into a weak Büchi automaton by ranking:
/// state `(q, i)` for each non-sink `q` and rank `i ∈ 0..=2m` (`m` non-sink
/// states), ranks never increase along transitions, accepting states of the
/// input may not keep an odd rank, and odd ranks are accepting.
pub fn complement<L: Send + Sync + 'static>(a: &Aba<L>) -> Aba<L> {
    if a.weak {
        dualize(a)
    } else {
        rank_complement(a)
    }
}

fn swap_sink(q: StateId) -> Option<StateId> {
    match q {
        SINK_TRUE => Some(SINK_FALSE),
        SINK_FALSE => Some(SINK_TRUE),
        _ => None,
    }
}

fn dualize<L: Send + Sync + 'static>(a: &Aba<L>) -> Aba<L> {
    let mut out = Aba::new();
    for q in 2..a.len() as StateId {
        let st = a.state(q);
        let r = st.rule.clone();
        let rule: Rule<L> = Arc::new(move |l| r(l).dual());
        let id = out.add_state(format!("~{}", st.label), !st.accepting, rule);
        out.set_group(id, st.group.clone());
    }
    out.set_initial(swap_sink(a.initial()).unwrap_or(a.initial()));
    out.weak = true;
    out.letter_check = a.letter_check.clone();
    out
}

fn rank_complement<L: Send + Sync + 'static>(a: &Aba<L>) -> Aba<L> {
    let m = a.len() as StateId - 2;
    let top = 2 * m;
    let width = top + 1;
    let id = move |q: StateId, i: StateId| 2 + (q - 2) * width + i;
    let accepting: Arc<Vec<bool>> = Arc::new((0..a.len() as StateId).map(|q| a.is_accepting(q)).collect());
    let mut out = Aba::new();
    for q in 2..a.len() as StateId {
        let st = a.state(q);
        for i in 0..=top {
            let rule: Rule<L> = if accepting[q as usize] && i % 2 == 1 {
                Arc::new(|_| PosBool::False)
            } else {
                let (r, acc) = (st.rule.clone(), accepting.clone());
                Arc::new(move |l| {
                    r(l).dual().substitute(&mut |s| {
                        PosBool::any(
                            (0..=i)
                                .filter(|j| !(acc[s as usize] && j % 2 == 1))
                                .map(|j| PosBool::var(id(s, j))),
                        )
                    })
                })
            };
            let sid = out.add_state(format!("({},{i})", st.label), i % 2 == 1, rule);
            out.set_group(sid, st.group.clone());
            out.set_rank(sid, id(q, 0), i);
            debug_assert_eq!(sid, id(q, i));
        }
    }
    out.set_initial(swap_sink(a.initial()).unwrap_or_else(|| id(a.initial(), top)));
    out.weak = true;
    out.letter_check = a.letter_check.clone();
    out
}

use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use super::posbool::{PosBool, StateId, SINK_FALSE, SINK_TRUE};

/// Common interface of explicit and lazily explored Büchi automata. State ids
/// 0 and 1 are always the accepting and rejecting sinks.
pub trait Automaton<L>: Send + Sync {
    fn initial(&self) -> StateId;
    fn is_accepting(&self, q: StateId) -> bool;
    fn transition(&self, q: StateId, letter: &L) -> PosBool;
    /// Number of states allocated so far; lazy automata grow as they are explored.
    fn state_count(&self) -> usize;
    fn state_label(&self, q: StateId) -> String {
        format!("q{q}")
    }
    /// Whether `letter` belongs to the automaton's alphabet.
    fn accepts_letter(&self, _letter: &L) -> bool {
        true
    }
    /// Sub-automaton a state belongs to, for clustering in DOT output.
    fn state_group(&self, _q: StateId) -> String {
        String::new()
    }
    /// Rank annotation `(anchor, rank)` of states produced by ranking
    /// complementation. States sharing an anchor differ only in rank, and a
    /// lower rank accepts a subset of the words of a higher one.
    fn rank(&self, _q: StateId) -> Option<(StateId, u32)> {
        None
    }
}

pub type Rule<L> = Arc<dyn Fn(&L) -> PosBool + Send + Sync>;
pub type LetterCheck<L> = Arc<dyn Fn(&L) -> bool + Send + Sync>;

pub struct AbaState<L> {
    pub label: String,
    pub accepting: bool,
    pub rule: Rule<L>,
    /// Name of the sub-automaton this state came from; used for DOT clusters.
    pub group: String,
    pub rank: Option<(StateId, u32)>,
}

impl<L> Clone for AbaState<L> {
    fn clone(&self) -> Self {
        AbaState {
            label: self.label.clone(),
            accepting: self.accepting,
            rule: self.rule.clone(),
            group: self.group.clone(),
            rank: self.rank,
        }
    }
}

/// Explicit state set with transitions computed per letter.
pub struct Aba<L> {
    states: Vec<AbaState<L>>,
    init: StateId,
    /// Set when every state lies in a level whose states agree on acceptance and
    /// transitions never climb levels, so complementation is plain dualisation.
    pub weak: bool,
    pub letter_check: Option<LetterCheck<L>>,
}

impl<L> Clone for Aba<L> {
    fn clone(&self) -> Self {
        Aba {
            states: self.states.clone(),
            init: self.init,
            weak: self.weak,
            letter_check: self.letter_check.clone(),
        }
    }
}

impl<L: 'static> Default for Aba<L> {
    fn default() -> Self {
        Self::new()
    }
}

impl<L: 'static> Aba<L> {
    /// Only the two sinks; the initial state is the accepting sink.
    pub fn new() -> Self {
        let sink = |label: &str, accepting: bool, value: PosBool| AbaState {
            label: label.to_string(),
            accepting,
            rule: Arc::new(move |_: &L| value.clone()) as Rule<L>,
            group: String::new(),
            rank: None,
        };
        Aba {
            states: vec![sink("true", true, PosBool::True), sink("false", false, PosBool::False)],
            init: SINK_TRUE,
            weak: false,
            letter_check: None,
        }
    }

    /// An automaton whose initial state is one of the sinks.
    pub fn constant(value: bool) -> Self {
        let mut a = Self::new();
        a.init = if value { SINK_TRUE } else { SINK_FALSE };
        a.weak = true;
        a
    }

    pub fn add_state(&mut self, label: impl Into<String>, accepting: bool, rule: Rule<L>) -> StateId {
        self.states.push(AbaState { label: label.into(), accepting, rule, group: String::new(), rank: None });
        (self.states.len() - 1) as StateId
    }

    pub fn set_rule(&mut self, q: StateId, rule: Rule<L>) {
        assert!(q > SINK_FALSE, "sink transitions are fixed");
        self.states[q as usize].rule = rule;
    }

    pub fn set_initial(&mut self, q: StateId) {
        self.init = q;
    }

    pub fn set_group(&mut self, q: StateId, group: impl Into<String>) {
        self.states[q as usize].group = group.into();
    }

    pub fn set_rank(&mut self, q: StateId, anchor: StateId, rank: u32) {
        self.states[q as usize].rank = Some((anchor, rank));
    }

    pub fn state(&self, q: StateId) -> &AbaState<L> {
        &self.states[q as usize]
    }

    pub fn rule(&self, q: StateId) -> Rule<L> {
        self.states[q as usize].rule.clone()
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Copies the non-sink states of `other` into `self`; returns the renaming.
    pub fn embed(&mut self, other: &Aba<L>, group: &str) -> Embedding {
        let offset = self.states.len() as StateId - 2;
        let emb = Embedding { offset };
        for st in other.states.iter().skip(2) {
            let inner = st.rule.clone();
            let rule: Rule<L> = Arc::new(move |l| inner(l).remap(&|q| emb.map(q)));
            let g = if st.group.is_empty() { group.to_string() } else { format!("{group}/{}", st.group) };
            let rank = st.rank.map(|(anchor, r)| (emb.map(anchor), r));
            self.states.push(AbaState { label: st.label.clone(), accepting: st.accepting, rule, group: g, rank });
        }
        emb
    }
}

impl Aba<u32> {
    /// Builds an explicit automaton from a transition table over letters
    /// `0..table[q].len()`. Rows 0 and 1 are ignored (sinks).
    pub fn from_table(table: Vec<Vec<PosBool>>, accepting: Vec<bool>, init: StateId) -> Aba<u32> {
        let mut a = Aba::<u32>::new();
        for (q, row) in table.into_iter().enumerate().skip(2) {
            let row = Arc::new(row);
            a.add_state(format!("q{q}"), accepting[q], Arc::new(move |l: &u32| row[*l as usize].clone()));
        }
        a.set_initial(init);
        a
    }
}

/// Renaming of an embedded automaton's states.
#[derive(Clone, Copy, Debug)]
pub struct Embedding {
    offset: StateId,
}

impl Embedding {
    pub fn map(&self, q: StateId) -> StateId {
        if q <= SINK_FALSE {
            q
        } else {
            q + self.offset
        }
    }
}

impl<L: Send + Sync + 'static> Automaton<L> for Aba<L> {
    fn initial(&self) -> StateId {
        self.init
    }

    fn is_accepting(&self, q: StateId) -> bool {
        self.states[q as usize].accepting
    }

    fn transition(&self, q: StateId, letter: &L) -> PosBool {
        (self.states[q as usize].rule)(letter)
    }

    fn state_count(&self) -> usize {
        self.states.len()
    }

    fn state_label(&self, q: StateId) -> String {
        self.states[q as usize].label.clone()
    }

    fn accepts_letter(&self, letter: &L) -> bool {
        self.letter_check.as_ref().is_none_or(|c| c(letter))
    }

    fn state_group(&self, q: StateId) -> String {
        self.states[q as usize].group.clone()
    }

    fn rank(&self, q: StateId) -> Option<(StateId, u32)> {
        self.states[q as usize].rank
    }
}

/// States reachable from the initial state over `letters`, in discovery order.
pub fn reachable_states<L>(a: &dyn Automaton<L>, letters: &[L]) -> Vec<StateId> {
    let mut seen: HashMap<StateId, ()> = HashMap::new();
    let mut order = Vec::new();
    let mut queue = VecDeque::from([a.initial()]);
    seen.insert(a.initial(), ());
    while let Some(q) = queue.pop_front() {
        order.push(q);
        for l in letters {
            for s in a.transition(q, l).vars() {
                if seen.insert(s, ()).is_none() {
                    queue.push_back(s);
                }
            }
        }
    }
    order
}

/// Explores a (possibly lazy) automaton over `letters` and freezes the
/// reachable part into an explicit [`Aba`] with contiguous ids.
pub fn materialize<L: Send + Sync + 'static>(a: Arc<dyn Automaton<L>>, letters: &[L], group: &str) -> Aba<L> {
    let order = reachable_states(a.as_ref(), letters);
    let mut ids: HashMap<StateId, StateId> = HashMap::from([(SINK_TRUE, SINK_TRUE), (SINK_FALSE, SINK_FALSE)]);
    let mut next = 2;
    for &q in &order {
        if q > SINK_FALSE {
            ids.insert(q, next);
            next += 1;
        }
    }
    let ids = Arc::new(ids);
    let mut out = Aba::new();
    for &q in &order {
        if q <= SINK_FALSE {
            continue;
        }
        let (inner, ids) = (a.clone(), ids.clone());
        let rule: Rule<L> = Arc::new(move |l| {
            inner.transition(q, l).remap(&|s| *ids.get(&s).unwrap_or(&SINK_FALSE))
        });
        let id = out.add_state(a.state_label(q), a.is_accepting(q), rule);
        out.set_group(id, group);
    }
    out.set_initial(ids[&a.initial()]);
    out
}

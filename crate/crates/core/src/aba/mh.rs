use std::collections::HashMap;
use std::hash::Hash;
use std::sync::{Arc, Mutex};

use super::automaton::Automaton;
use super::posbool::{cross, prune, union, PosBool, StateId, SINK_FALSE, SINK_TRUE};

/// Miyano-Hayashi breakpoint construction, explored on demand. State 0 is the
/// pair `(∅, ∅)`, which behaves exactly like the accepting sink.
pub struct MhNba<L> {
    inner: Arc<dyn Automaton<L>>,
    table: Mutex<MhTable<L>>,
    init: StateId,
}

struct MhTable<L> {
    pairs: Vec<(Vec<StateId>, Vec<StateId>)>,
    index: HashMap<(Vec<StateId>, Vec<StateId>), StateId>,
    cache: HashMap<(StateId, L), PosBool>,
}

impl<L: Clone + Hash + Eq + Send + Sync + 'static> MhNba<L> {
    pub fn new(inner: Arc<dyn Automaton<L>>) -> Self {
        let mut table = MhTable {
            pairs: vec![(vec![], vec![]), (vec![], vec![])],
            index: HashMap::new(),
            cache: HashMap::new(),
        };
        table.index.insert((vec![], vec![]), SINK_TRUE);
        let q0 = inner.initial();
        let init = match q0 {
            SINK_TRUE => SINK_TRUE,
            SINK_FALSE => SINK_FALSE,
            q => {
                let o = if inner.is_accepting(q) { vec![] } else { vec![q] };
                table.intern(vec![q], o)
            }
        };
        MhNba { inner, table: Mutex::new(table), init }
    }

    /// The `(S, O)` pair behind a state id.
    pub fn pair(&self, q: StateId) -> (Vec<StateId>, Vec<StateId>) {
        self.table.lock().unwrap().pairs[q as usize].clone()
    }

    pub fn inner(&self) -> &Arc<dyn Automaton<L>> {
        &self.inner
    }

    fn models_of(&self, states: &[StateId], letter: &L) -> Vec<Vec<StateId>> {
        let mut acc = vec![vec![]];
        for &q in states {
            let rho = self.inner.transition(q, letter);
            acc = prune(cross(&acc, &rho.minimal_models()).into_iter().map(|m| self.lowest_ranks(&m).0).collect());
            if acc.is_empty() {
                break;
            }
        }
        acc
    }

    /// Keeps only the lowest-ranked state per rank anchor. A lower rank
    /// accepts fewer words and offers every move of a higher one, so runs can
    /// be redirected to it. Returns the kept set and the redirection.
    fn lowest_ranks(&self, set: &[StateId]) -> (Vec<StateId>, HashMap<StateId, StateId>) {
        let mut best: HashMap<StateId, (u32, StateId)> = HashMap::new();
        for &q in set {
            if let Some((anchor, r)) = self.inner.rank(q) {
                let e = best.entry(anchor).or_insert((r, q));
                if r < e.0 {
                    *e = (r, q);
                }
            }
        }
        let mut redirect = HashMap::new();
        let kept = set
            .iter()
            .copied()
            .filter(|&q| match self.inner.rank(q) {
                Some((anchor, _)) if best[&anchor].1 != q => {
                    redirect.insert(q, best[&anchor].1);
                    false
                }
                _ => true,
            })
            .collect();
        (kept, redirect)
    }

    fn successors(&self, s: &[StateId], o: &[StateId], letter: &L) -> Vec<(Vec<StateId>, Vec<StateId>)> {
        let not_final = |set: &[StateId]| -> Vec<StateId> {
            set.iter().copied().filter(|&q| !self.inner.is_accepting(q)).collect()
        };
        let mut out = Vec::new();
        if o.is_empty() {
            for y in self.models_of(s, letter) {
                let o2 = not_final(&y);
                out.push((y, o2));
            }
        } else {
            let rest: Vec<StateId> = s.iter().copied().filter(|q| !o.contains(q)).collect();
            let xs = self.models_of(o, letter);
            if xs.is_empty() {
                return out;
            }
            let ys = self.models_of(&rest, letter);
            for x in &xs {
                for y in &ys {
                    let (s2, redirect) = self.lowest_ranks(&union(x, y));
                    let mut o2: Vec<StateId> = x.iter().map(|q| *redirect.get(q).unwrap_or(q)).collect();
                    o2.sort_unstable();
                    o2.dedup();
                    out.push((s2, not_final(&o2)));
                }
            }
        }
        out
    }
}

impl<L> MhTable<L> {
    fn intern(&mut self, s: Vec<StateId>, o: Vec<StateId>) -> StateId {
        if let Some(&id) = self.index.get(&(s.clone(), o.clone())) {
            return id;
        }
        let id = self.pairs.len() as StateId;
        self.pairs.push((s.clone(), o.clone()));
        self.index.insert((s, o), id);
        id
    }
}

impl<L: Clone + Hash + Eq + Send + Sync + 'static> Automaton<L> for MhNba<L> {
    fn initial(&self) -> StateId {
        self.init
    }

    fn is_accepting(&self, q: StateId) -> bool {
        match q {
            SINK_TRUE => true,
            SINK_FALSE => false,
            q => self.table.lock().unwrap().pairs[q as usize].1.is_empty(),
        }
    }

    fn transition(&self, q: StateId, letter: &L) -> PosBool {
        match q {
            SINK_TRUE => return PosBool::True,
            SINK_FALSE => return PosBool::False,
            _ => {}
        }
        let (s, o) = {
            let t = self.table.lock().unwrap();
            if let Some(p) = t.cache.get(&(q, letter.clone())) {
                return p.clone();
            }
            t.pairs[q as usize].clone()
        };
        let succ = self.successors(&s, &o, letter);
        let mut t = self.table.lock().unwrap();
        let ids: Vec<StateId> = succ.into_iter().map(|(s2, o2)| t.intern(s2, o2)).collect();
        let result = PosBool::any(ids.into_iter().map(PosBool::var));
        t.cache.insert((q, letter.clone()), result.clone());
        result
    }

    fn state_count(&self) -> usize {
        self.table.lock().unwrap().pairs.len()
    }

    fn state_label(&self, q: StateId) -> String {
        match q {
            SINK_TRUE => "true".into(),
            SINK_FALSE => "false".into(),
            q => {
                let (s, o) = self.pair(q);
                format!("({:?},{:?})", s, o)
            }
        }
    }

    fn accepts_letter(&self, letter: &L) -> bool {
        self.inner.accepts_letter(letter)
    }
}

/// Dealternates `a`. The result is explored lazily; every transition it
/// returns is a disjunction of states.
pub fn miyano_hayashi<L: Clone + Hash + Eq + Send + Sync + 'static>(a: Arc<dyn Automaton<L>>) -> MhNba<L> {
    MhNba::new(a)
}

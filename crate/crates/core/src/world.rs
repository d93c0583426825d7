//! Letters of the formula automata and the two ways of reading their worlds:
//! KTS states with their labels, or plain proposition sets of traces.

use std::fmt;
use std::sync::Arc;

use crate::kts::Kts;
use crate::lasso::LassoWord;

/// One letter over `n` paths: the current world of every path and the
/// atomic program each path takes next. `n = 0` is the single unit letter.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub worlds: Vec<usize>,
    pub progs: Vec<usize>,
}

impl Letter {
    pub fn unit() -> Letter {
        Letter { worlds: vec![], progs: vec![] }
    }

    pub fn arity(&self) -> usize {
        self.worlds.len()
    }

    /// The letter with one more path appended.
    pub fn extend(&self, world: usize, prog: usize) -> Letter {
        let mut l = self.clone();
        l.worlds.push(world);
        l.progs.push(prog);
        l
    }
}

#[derive(Clone, Debug)]
pub enum WorldInterp {
    /// Worlds are state indices of the system.
    Kts(Arc<Kts>),
    /// Worlds are bitmasks over `aps`.
    Traces { aps: Vec<String>, programs: Vec<String> },
}

impl WorldInterp {
    pub fn kts(k: Kts) -> WorldInterp {
        WorldInterp::Kts(Arc::new(k))
    }

    pub fn traces<A: AsRef<str>, P: AsRef<str>>(aps: &[A], programs: &[P]) -> WorldInterp {
        assert!(aps.len() <= 32, "trace mode supports at most 32 propositions");
        WorldInterp::Traces {
            aps: aps.iter().map(|a| a.as_ref().to_string()).collect(),
            programs: programs.iter().map(|p| p.as_ref().to_string()).collect(),
        }
    }

    pub fn system(&self) -> Option<&Arc<Kts>> {
        match self {
            WorldInterp::Kts(k) => Some(k),
            WorldInterp::Traces { .. } => None,
        }
    }

    pub fn aps(&self) -> &[String] {
        match self {
            WorldInterp::Kts(k) => &k.aps,
            WorldInterp::Traces { aps, .. } => aps,
        }
    }

    pub fn programs(&self) -> &[String] {
        match self {
            WorldInterp::Kts(k) => &k.programs,
            WorldInterp::Traces { programs, .. } => programs,
        }
    }

    pub fn ap_index(&self, name: &str) -> Option<usize> {
        self.aps().iter().position(|a| a == name)
    }

    pub fn program_index(&self, name: &str) -> Option<usize> {
        self.programs().iter().position(|p| p == name)
    }

    pub fn holds(&self, ap: usize, world: usize) -> bool {
        match self {
            WorldInterp::Kts(k) => k.holds(ap, world),
            WorldInterp::Traces { .. } => world >> ap & 1 == 1,
        }
    }

    /// Holds for an AP given by name; unknown names never hold.
    pub fn holds_named(&self, ap: &str, world: usize) -> bool {
        self.ap_index(ap).is_some_and(|a| self.holds(a, world))
    }

    pub fn world_count(&self) -> usize {
        match self {
            WorldInterp::Kts(k) => k.states.len(),
            WorldInterp::Traces { aps, .. } => 1 << aps.len(),
        }
    }

    /// Size of the alphabet over `n` paths, saturating.
    pub fn letter_count(&self, n: usize) -> u128 {
        let per = self.world_count() as u128 * self.programs().len() as u128;
        (0..n).fold(1u128, |acc, _| acc.saturating_mul(per))
    }

    /// Every letter over `n` paths, in lexicographic order.
    pub fn letters(&self, n: usize) -> Vec<Letter> {
        let mut out = vec![Letter::unit()];
        for _ in 0..n {
            let mut next = Vec::with_capacity(out.len() * self.world_count() * self.programs().len());
            for l in &out {
                for w in 0..self.world_count() {
                    for p in 0..self.programs().len() {
                        next.push(l.extend(w, p));
                    }
                }
            }
            out = next;
        }
        out
    }

    /// Whether `l` is a well-formed letter over `n` paths.
    pub fn valid_letter(&self, l: &Letter, n: usize) -> bool {
        l.worlds.len() == n
            && l.progs.len() == n
            && l.worlds.iter().all(|&w| w < self.world_count())
            && l.progs.iter().all(|&p| p < self.programs().len())
    }

    pub fn world_name(&self, w: usize) -> String {
        match self {
            WorldInterp::Kts(k) => k.states[w].clone(),
            WorldInterp::Traces { aps, .. } => {
                let names: Vec<&str> =
                    aps.iter().enumerate().filter(|(i, _)| w >> i & 1 == 1).map(|(_, a)| a.as_str()).collect();
                format!("{{{}}}", names.join(" "))
            }
        }
    }

    pub fn program_name(&self, p: usize) -> &str {
        &self.programs()[p]
    }

    pub fn show_letter(&self, l: &Letter) -> String {
        let ws: Vec<String> = l.worlds.iter().map(|&w| self.world_name(w)).collect();
        let ps: Vec<&str> = l.progs.iter().map(|&p| self.program_name(p)).collect();
        format!("({}|{})", ws.join(","), ps.join(","))
    }

    /// Bitmask of a proposition set given by names.
    pub fn world_of_aps<S: AsRef<str>>(&self, names: &[S]) -> Option<usize> {
        let mut w = 0;
        for n in names {
            w |= 1 << self.ap_index(n.as_ref())?;
        }
        Some(w)
    }
}

/// Flattens aligned paths of `(world, program)` pairs into one word whose
/// j-th letter holds every path's world at step j and its program from step
/// j to j+1. Both the oracle and the automata tests go through this.
pub fn nu(paths: &[LassoWord<(usize, usize)>]) -> LassoWord<Letter> {
    let (stem, period) = match paths.first() {
        Some(p) => (p.stem.len(), p.period.len()),
        None => (0, 1),
    };
    assert!(
        paths.iter().all(|p| p.stem.len() == stem && p.period.len() == period),
        "nu needs aligned paths"
    );
    let letter = |i: usize| Letter {
        worlds: paths.iter().map(|p| p.at(i).0).collect(),
        progs: paths.iter().map(|p| p.at(i).1).collect(),
    };
    LassoWord::new((0..stem).map(letter).collect(), (stem..stem + period).map(letter).collect())
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}|{:?})", self.worlds, self.progs)
    }
}

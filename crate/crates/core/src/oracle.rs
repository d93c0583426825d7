//! Direct evaluation of the semantics on ultimately periodic path
//! assignments. Positions count steps: position j holds every path's j-th
//! world and the program leading to step j+1.

use std::cell::RefCell;
use std::collections::{BTreeSet, HashMap, VecDeque};

use thiserror::Error;

use crate::kts::KtsError;
use crate::lasso::{lcm, LassoWord};
use crate::syntax::{Formula, Program, TupleSym};
use crate::world::{nu, Letter, WorldInterp};

/// Paths as lassos of `(world, program)` with equal stem and period lengths.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LassoAssignment {
    paths: Vec<LassoWord<(usize, usize)>>,
    stem: usize,
    period: usize,
}

/// Unrolls every lasso to the longest stem and the lcm of the periods.
pub fn align_lassos<T: Clone>(ls: &[LassoWord<T>]) -> Vec<LassoWord<T>> {
    let stem = ls.iter().map(|l| l.stem.len()).max().unwrap_or(0);
    let period = ls.iter().fold(1, |acc, l| lcm(acc, l.period.len()));
    ls.iter().map(|l| l.unroll(stem, period)).collect()
}

impl LassoAssignment {
    pub fn new(paths: Vec<LassoWord<(usize, usize)>>) -> Self {
        let paths = align_lassos(&paths);
        let (stem, period) = paths.first().map_or((0, 1), |p| (p.stem.len(), p.period.len()));
        LassoAssignment { paths, stem, period }
    }

    /// No paths; the single position carries the unit letter.
    pub fn empty() -> Self {
        LassoAssignment::new(vec![])
    }

    pub fn paths(&self) -> &[LassoWord<(usize, usize)>] {
        &self.paths
    }

    pub fn n(&self) -> usize {
        self.paths.len()
    }

    pub fn stem_len(&self) -> usize {
        self.stem
    }

    pub fn period_len(&self) -> usize {
        self.period
    }

    /// Number of distinct normalized positions.
    pub fn len(&self) -> usize {
        self.stem + self.period
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn normalize(&self, pos: usize) -> usize {
        if pos < self.stem {
            pos
        } else {
            self.stem + (pos - self.stem) % self.period
        }
    }

    pub fn next(&self, p: usize) -> usize {
        if p + 1 < self.len() {
            p + 1
        } else {
            self.stem
        }
    }

    pub fn world(&self, k: usize, p: usize) -> usize {
        self.paths[k].at(p).0
    }

    pub fn prog(&self, k: usize, p: usize) -> usize {
        self.paths[k].at(p).1
    }

    pub fn nu(&self) -> LassoWord<Letter> {
        if self.paths.is_empty() {
            return LassoWord::new(vec![Letter::unit(); self.stem], vec![Letter::unit(); self.period]);
        }
        nu(&self.paths)
    }

    /// The assignment shifted to start at position `p`.
    pub fn suffix(&self, p: usize) -> Self {
        if self.paths.is_empty() {
            return LassoAssignment::empty();
        }
        LassoAssignment::new(self.paths.iter().map(|l| l.suffix(self.normalize(p))).collect())
    }

    /// The assignment with one more path, realigned.
    pub fn push(&self, path: LassoWord<(usize, usize)>) -> Self {
        let mut paths = self.paths.clone();
        paths.push(path);
        LassoAssignment::new(paths)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("quantifier `{0}` cannot be evaluated: enable deterministic, bounded or trace-set mode")]
    UnsupportedQuantifier(String),
    #[error("deterministic quantifier mode needs a system in which every state has one successor: {0}")]
    NotDeterministic(#[from] KtsError),
    #[error("path variable `{0}` refers to path {1}, but the assignment has {2}")]
    Unbound(String, usize, usize),
    #[error("tuple {0} has arity {1}, but the assignment has {2} paths")]
    Arity(String, usize, usize),
    #[error("trace quantifier `{0}` occurs after a modality; only prefix quantifiers are supported")]
    QuantifierNotAtStart(String),
}

/// How the oracle treats path quantifiers.
#[derive(Clone, Debug, Default)]
pub enum QuantifierMode {
    /// Quantifiers are an error.
    #[default]
    Forbidden,
    /// Every system state has one successor, so each quantifier has one path.
    Deterministic,
    /// Enumerates system lassos with stem plus period at most the bound.
    /// Incomplete: a `false` for an existential may only mean no short witness.
    Bounded(usize),
    /// Quantifiers range over the given traces, all starting at position 0.
    TraceSet(Vec<LassoWord<(usize, usize)>>),
}

#[derive(Clone, Debug)]
pub struct Oracle {
    interp: WorldInterp,
    mode: QuantifierMode,
    memo: bool,
}

impl Oracle {
    pub fn new(interp: WorldInterp) -> Self {
        Oracle { interp, mode: QuantifierMode::Forbidden, memo: true }
    }

    pub fn with_mode(mut self, mode: QuantifierMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_memo(mut self, memo: bool) -> Self {
        self.memo = memo;
        self
    }

    pub fn interp(&self) -> &WorldInterp {
        &self.interp
    }

    /// Whether `f` holds on the suffix of `pa` from absolute position `i`.
    pub fn eval(&self, pa: &LassoAssignment, i: usize, f: &Formula) -> Result<bool, OracleError> {
        Eval::new(self, pa).formula(pa.normalize(i), f)
    }

    /// Normalized positions `k` with `(pa, i, k)` in `R(alpha)`.
    pub fn segments(&self, pa: &LassoAssignment, i: usize, alpha: &Program) -> Result<BTreeSet<usize>, OracleError> {
        Eval::new(self, pa).segments(pa.normalize(i), alpha)
    }

    pub fn delta(&self, pa: &LassoAssignment, i: usize, alpha: &Program) -> Result<bool, OracleError> {
        Eval::new(self, pa).delta(pa.normalize(i), alpha)
    }

    /// `(pa, i, k)` in `R(alpha)` for absolute positions, by recursion on
    /// `alpha` over absolute positions up to `k`.
    pub fn in_r(&self, pa: &LassoAssignment, i: usize, k: usize, alpha: &Program) -> Result<bool, OracleError> {
        if k < i {
            return Ok(false);
        }
        Ok(Eval::new(self, pa).ends_upto(i, alpha, k)?.contains(&k))
    }
}

struct Eval<'a> {
    o: &'a Oracle,
    pa: &'a LassoAssignment,
    formulas: RefCell<HashMap<(usize, usize), bool>>,
    programs: RefCell<HashMap<(usize, usize), BTreeSet<usize>>>,
}

fn key<T>(p: usize, x: &T) -> (usize, usize) {
    (p, x as *const T as usize)
}

impl<'a> Eval<'a> {
    fn new(o: &'a Oracle, pa: &'a LassoAssignment) -> Self {
        Eval { o, pa, formulas: RefCell::new(HashMap::new()), programs: RefCell::new(HashMap::new()) }
    }

    fn matches(&self, t: &TupleSym, p: usize) -> Result<bool, OracleError> {
        if t.arity() != self.pa.n() {
            return Err(OracleError::Arity(t.to_string(), t.arity(), self.pa.n()));
        }
        Ok(t.0.iter().enumerate().all(|(k, e)| match e {
            None => true,
            Some(name) => self.o.interp.program_name(self.pa.prog(k, p)) == name,
        }))
    }

    fn formula(&self, p: usize, f: &Formula) -> Result<bool, OracleError> {
        if self.o.memo {
            if let Some(&v) = self.formulas.borrow().get(&key(p, f)) {
                return Ok(v);
            }
        }
        let v = match f {
            Formula::True => true,
            Formula::False => false,
            Formula::Atom { ap, var } => {
                if var.index == 0 || var.index > self.pa.n() {
                    return Err(OracleError::Unbound(var.name.clone(), var.index, self.pa.n()));
                }
                self.o.interp.holds_named(ap, self.pa.world(var.index - 1, p))
            }
            Formula::Not(g) => !self.formula(p, g)?,
            Formula::And(l, r) => self.formula(p, l)? && self.formula(p, r)?,
            Formula::Or(l, r) => self.formula(p, l)? || self.formula(p, r)?,
            Formula::Diamond(alpha, body) => {
                let mut found = false;
                for k in self.segments(p, alpha)? {
                    if self.formula(k, body)? {
                        found = true;
                        break;
                    }
                }
                found
            }
            Formula::Boxed(alpha, body) => {
                let mut all = true;
                for k in self.segments(p, alpha)? {
                    if !self.formula(k, body)? {
                        all = false;
                        break;
                    }
                }
                all
            }
            Formula::Delta(alpha) => self.delta(p, alpha)?,
            Formula::NotDelta(alpha) => !self.delta(p, alpha)?,
            Formula::Exists(v, body) => self.quantify(p, v, body, true)?,
            Formula::Forall(v, body) => self.quantify(p, v, body, false)?,
            Formula::NotExists(v, body) => !self.quantify(p, v, body, true)?,
        };
        if self.o.memo {
            self.formulas.borrow_mut().insert(key(p, f), v);
        }
        Ok(v)
    }

    fn quantify(&self, p: usize, v: &str, body: &Formula, existential: bool) -> Result<bool, OracleError> {
        let candidates: Vec<LassoWord<(usize, usize)>> = match &self.o.mode {
            QuantifierMode::Forbidden => return Err(OracleError::UnsupportedQuantifier(v.to_string())),
            QuantifierMode::TraceSet(traces) => {
                if p != 0 {
                    return Err(OracleError::QuantifierNotAtStart(v.to_string()));
                }
                traces.clone()
            }
            QuantifierMode::Deterministic | QuantifierMode::Bounded(_) => {
                let kts = self.o.interp.system().ok_or_else(|| OracleError::UnsupportedQuantifier(v.to_string()))?;
                let branch = if self.pa.n() == 0 { kts.init } else { self.pa.world(self.pa.n() - 1, p) };
                match self.o.mode {
                    QuantifierMode::Deterministic => vec![kts.deterministic_path(branch)?],
                    QuantifierMode::Bounded(b) => bounded_paths(kts, branch, b),
                    _ => unreachable!(),
                }
            }
        };
        let base = self.pa.suffix(p);
        for c in candidates {
            let ext = base.push(c);
            let holds = Eval::new(self.o, &ext).formula(0, body)?;
            if holds == existential {
                return Ok(existential);
            }
        }
        Ok(!existential)
    }

    fn segments(&self, p: usize, alpha: &Program) -> Result<BTreeSet<usize>, OracleError> {
        if self.o.memo {
            if let Some(v) = self.programs.borrow().get(&key(p, alpha)) {
                return Ok(v.clone());
            }
        }
        let out: BTreeSet<usize> = match alpha {
            Program::Tup(t) => {
                if self.matches(t, p)? {
                    BTreeSet::from([self.pa.next(p)])
                } else {
                    BTreeSet::new()
                }
            }
            Program::Eps => BTreeSet::from([p]),
            Program::Sum(l, r) => {
                let mut s = self.segments(p, l)?;
                s.extend(self.segments(p, r)?);
                s
            }
            Program::Concat(l, r) => {
                let mut s = BTreeSet::new();
                for j in self.segments(p, l)? {
                    s.extend(self.segments(j, r)?);
                }
                s
            }
            Program::Star(body) => {
                let mut seen = BTreeSet::from([p]);
                let mut queue = VecDeque::from([p]);
                while let Some(j) = queue.pop_front() {
                    for k in self.segments(j, body)? {
                        if seen.insert(k) {
                            queue.push_back(k);
                        }
                    }
                }
                seen
            }
            Program::Test(f) => {
                if self.formula(p, f)? {
                    BTreeSet::from([p])
                } else {
                    BTreeSet::new()
                }
            }
        };
        if self.o.memo {
            self.programs.borrow_mut().insert(key(p, alpha), out.clone());
        }
        Ok(out)
    }

    /// Some infinite chain of consecutive segments starts at `p`: a cycle is
    /// reachable in the segment graph over normalized positions.
    fn delta(&self, p: usize, alpha: &Program) -> Result<bool, OracleError> {
        let mut succ: HashMap<usize, BTreeSet<usize>> = HashMap::new();
        let mut queue = VecDeque::from([p]);
        while let Some(j) = queue.pop_front() {
            if succ.contains_key(&j) {
                continue;
            }
            let s = self.segments(j, alpha)?;
            queue.extend(s.iter().copied());
            succ.insert(j, s);
        }
        for &x in succ.keys() {
            let mut seen = BTreeSet::new();
            let mut stack: Vec<usize> = succ[&x].iter().copied().collect();
            while let Some(y) = stack.pop() {
                if y == x {
                    return Ok(true);
                }
                if seen.insert(y) {
                    stack.extend(succ[&y].iter().copied());
                }
            }
        }
        Ok(false)
    }

    /// Absolute end positions `k <= h` with `(pa, i, k)` in `R(alpha)`.
    fn ends_upto(&self, i: usize, alpha: &Program, h: usize) -> Result<BTreeSet<usize>, OracleError> {
        Ok(match alpha {
            Program::Tup(t) => {
                if i < h && self.matches(t, self.pa.normalize(i))? {
                    BTreeSet::from([i + 1])
                } else {
                    BTreeSet::new()
                }
            }
            Program::Eps => BTreeSet::from([i]),
            Program::Sum(l, r) => {
                let mut s = self.ends_upto(i, l, h)?;
                s.extend(self.ends_upto(i, r, h)?);
                s
            }
            Program::Concat(l, r) => {
                let mut s = BTreeSet::new();
                for j in self.ends_upto(i, l, h)? {
                    s.extend(self.ends_upto(j, r, h)?);
                }
                s
            }
            Program::Star(body) => {
                let mut seen = BTreeSet::from([i]);
                let mut queue = VecDeque::from([i]);
                while let Some(j) = queue.pop_front() {
                    for k in self.ends_upto(j, body, h)? {
                        if seen.insert(k) {
                            queue.push_back(k);
                        }
                    }
                }
                seen
            }
            Program::Test(f) => {
                if i <= h && self.formula(self.pa.normalize(i), f)? {
                    BTreeSet::from([i])
                } else {
                    BTreeSet::new()
                }
            }
        })
    }
}

/// All lassos of the system from `s` with stem plus period at most `bound`.
pub fn bounded_paths(kts: &crate::kts::Kts, s: usize, bound: usize) -> Vec<LassoWord<(usize, usize)>> {
    let mut out = Vec::new();
    let mut seq: Vec<(usize, usize)> = Vec::new();
    fn go(kts: &crate::kts::Kts, cur: usize, bound: usize, seq: &mut Vec<(usize, usize)>, out: &mut Vec<LassoWord<(usize, usize)>>) {
        if seq.len() == bound {
            return;
        }
        for (sigma, next) in kts.out_edges(cur) {
            seq.push((cur, sigma));
            for k in 0..seq.len() {
                if seq[k].0 == next {
                    out.push(LassoWord::new(seq[..k].to_vec(), seq[k..].to_vec()));
                }
            }
            go(kts, next, bound, seq, out);
            seq.pop();
        }
    }
    go(kts, s, bound, &mut seq, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_program, parse_with_scope, Vocabulary};

    fn interp() -> WorldInterp {
        WorldInterp::traces(&["a"], &["s", "t"])
    }

    fn pa(stem: &[(usize, usize)], period: &[(usize, usize)]) -> LassoAssignment {
        LassoAssignment::new(vec![LassoWord::new(stem.to_vec(), period.to_vec())])
    }

    fn f(text: &str) -> Formula {
        parse_with_scope(text, &Vocabulary::open(), &["p"]).unwrap()
    }

    #[test]
    fn alignment_uses_lcm_and_longest_stem() {
        let a = LassoWord::new(vec![], vec![(0, 0), (1, 0)]);
        let b = LassoWord::new(vec![(1, 1), (1, 1)], vec![(0, 0), (0, 1), (1, 1)]);
        let pa = LassoAssignment::new(vec![a.clone(), b.clone()]);
        assert_eq!((pa.stem_len(), pa.period_len()), (2, 6));
        for i in 0..20 {
            assert_eq!(pa.paths()[0].at(i), a.at(i));
            assert_eq!(pa.paths()[1].at(i), b.at(i));
        }
    }

    #[test]
    fn atoms_read_position_zero() {
        let o = Oracle::new(interp());
        assert!(o.eval(&pa(&[(1, 0)], &[(0, 0)]), 0, &f("a@p")).unwrap());
        assert!(!o.eval(&pa(&[(1, 0)], &[(0, 0)]), 5, &f("a@p")).unwrap());
    }

    #[test]
    fn segment_basics() {
        let o = Oracle::new(interp());
        let w = pa(&[(0, 0)], &[(1, 1)]);
        let p = |s: &str| parse_program(s, &Vocabulary::open(), &["p"]).unwrap();
        assert_eq!(o.segments(&w, 0, &p("eps")).unwrap(), BTreeSet::from([0]));
        assert_eq!(o.segments(&w, 0, &p("(s)")).unwrap(), BTreeSet::from([1]));
        assert_eq!(o.segments(&w, 0, &p("(t)")).unwrap(), BTreeSet::new());
        assert_eq!(o.segments(&w, 0, &p("any*")).unwrap(), BTreeSet::from([0, 1]));
        assert!(o.in_r(&w, 3, 7, &p("(t)*")).unwrap());
        assert!(!o.in_r(&w, 0, 2, &p("(t)*")).unwrap());
    }

    #[test]
    fn box_false_fails_after_any_step() {
        let o = Oracle::new(interp());
        assert!(!o.eval(&pa(&[], &[(0, 0)]), 0, &f("[any] false")).unwrap());
    }

    #[test]
    fn delta_cases() {
        let o = Oracle::new(interp());
        let p = |s: &str| parse_program(s, &Vocabulary::open(), &["p"]).unwrap();
        let w = pa(&[(1, 0)], &[(0, 0)]);
        assert!(o.delta(&w, 0, &p("eps")).unwrap());
        assert!(o.delta(&w, 0, &p("any")).unwrap());
        assert!(!o.delta(&w, 0, &p("{a@p}? ; any")).unwrap());
        assert!(o.delta(&pa(&[], &[(1, 0), (0, 1)]), 0, &p("{a@p}? ; any ; any")).unwrap());
    }

    #[test]
    fn quantifiers_need_a_mode() {
        let o = Oracle::new(interp());
        let g = crate::syntax::parse_formula("exists q. a@q", &Vocabulary::open()).unwrap();
        assert!(matches!(o.eval(&LassoAssignment::empty(), 0, &g), Err(OracleError::UnsupportedQuantifier(_))));
        let traces = vec![LassoWord::new(vec![], vec![(0, 0)]), LassoWord::new(vec![], vec![(1, 0)])];
        let o = o.with_mode(QuantifierMode::TraceSet(traces));
        assert!(o.eval(&LassoAssignment::empty(), 0, &g).unwrap());
    }
}

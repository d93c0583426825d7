use std::fmt;

pub type StateId = u32;

/// Reserved accepting sink with `rho = true`.
pub const SINK_TRUE: StateId = 0;
/// Reserved rejecting sink with `rho = false`.
pub const SINK_FALSE: StateId = 1;

/// Positive boolean combination of successor states.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PosBool {
    True,
    False,
    Var(StateId),
    And(Box<PosBool>, Box<PosBool>),
    Or(Box<PosBool>, Box<PosBool>),
}

/// Folds pairwise so that long lists give trees of logarithmic depth.
fn balanced(mut items: Vec<PosBool>, unit: PosBool, op: fn(PosBool, PosBool) -> PosBool) -> PosBool {
    if items.is_empty() {
        return unit;
    }
    while items.len() > 1 {
        let mut next = Vec::with_capacity(items.len().div_ceil(2));
        let mut it = items.into_iter();
        while let Some(a) = it.next() {
            next.push(match it.next() {
                Some(b) => op(a, b),
                None => a,
            });
        }
        items = next;
    }
    items.pop().unwrap()
}

/// Sorted, duplicate-free set of states.
pub type Model = Vec<StateId>;

impl PosBool {
    /// A successor reference; the sinks collapse to their constants.
    pub fn var(q: StateId) -> PosBool {
        match q {
            SINK_TRUE => PosBool::True,
            SINK_FALSE => PosBool::False,
            q => PosBool::Var(q),
        }
    }

    pub fn and(a: PosBool, b: PosBool) -> PosBool {
        match (a, b) {
            (PosBool::False, _) | (_, PosBool::False) => PosBool::False,
            (PosBool::True, x) | (x, PosBool::True) => x,
            (a, b) => PosBool::And(Box::new(a), Box::new(b)),
        }
    }

    pub fn or(a: PosBool, b: PosBool) -> PosBool {
        match (a, b) {
            (PosBool::True, _) | (_, PosBool::True) => PosBool::True,
            (PosBool::False, x) | (x, PosBool::False) => x,
            (a, b) => PosBool::Or(Box::new(a), Box::new(b)),
        }
    }

    pub fn all(items: impl IntoIterator<Item = PosBool>) -> PosBool {
        balanced(items.into_iter().collect(), PosBool::True, PosBool::and)
    }

    pub fn any(items: impl IntoIterator<Item = PosBool>) -> PosBool {
        balanced(items.into_iter().collect(), PosBool::False, PosBool::or)
    }

    /// Swaps conjunction with disjunction and true with false.
    pub fn dual(&self) -> PosBool {
        match self {
            PosBool::True => PosBool::False,
            PosBool::False => PosBool::True,
            PosBool::Var(q) => PosBool::var(*q),
            PosBool::And(a, b) => PosBool::or(a.dual(), b.dual()),
            PosBool::Or(a, b) => PosBool::and(a.dual(), b.dual()),
        }
    }

    /// Replaces every variable by a formula, simplifying constants.
    pub fn substitute(&self, f: &mut dyn FnMut(StateId) -> PosBool) -> PosBool {
        match self {
            PosBool::True => PosBool::True,
            PosBool::False => PosBool::False,
            PosBool::Var(q) => f(*q),
            PosBool::And(a, b) => {
                let x = a.substitute(f);
                if x == PosBool::False {
                    return x;
                }
                PosBool::and(x, b.substitute(f))
            }
            PosBool::Or(a, b) => {
                let x = a.substitute(f);
                if x == PosBool::True {
                    return x;
                }
                PosBool::or(x, b.substitute(f))
            }
        }
    }

    /// Renames states; sinks are renamed through `PosBool::var`.
    pub fn remap(&self, f: &dyn Fn(StateId) -> StateId) -> PosBool {
        self.substitute(&mut |q| PosBool::var(f(q)))
    }

    pub fn eval(&self, v: &dyn Fn(StateId) -> bool) -> bool {
        match self {
            PosBool::True => true,
            PosBool::False => false,
            PosBool::Var(q) => v(*q),
            PosBool::And(a, b) => a.eval(v) && b.eval(v),
            PosBool::Or(a, b) => a.eval(v) || b.eval(v),
        }
    }

    pub fn vars(&self) -> Vec<StateId> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out.sort_unstable();
        out.dedup();
        out
    }

    fn collect_vars(&self, out: &mut Vec<StateId>) {
        match self {
            PosBool::True | PosBool::False => {}
            PosBool::Var(q) => out.push(*q),
            PosBool::And(a, b) | PosBool::Or(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    /// Successors of a purely disjunctive transition; `True` is the accepting
    /// sink. `None` when a conjunction occurs.
    pub fn disjuncts(&self) -> Option<Vec<StateId>> {
        fn go(p: &PosBool, out: &mut Vec<StateId>) -> bool {
            match p {
                PosBool::True => {
                    out.push(SINK_TRUE);
                    true
                }
                PosBool::False => true,
                PosBool::Var(q) => {
                    out.push(*q);
                    true
                }
                PosBool::Or(a, b) => go(a, out) && go(b, out),
                PosBool::And(..) => false,
            }
        }
        let mut out = Vec::new();
        if go(self, &mut out) {
            out.sort_unstable();
            out.dedup();
            Some(out)
        } else {
            None
        }
    }

    pub fn size(&self) -> usize {
        match self {
            PosBool::True | PosBool::False | PosBool::Var(_) => 1,
            PosBool::And(a, b) | PosBool::Or(a, b) => 1 + a.size() + b.size(),
        }
    }

    /// Minimal satisfying sets, without supersets of one another.
    pub fn minimal_models(&self) -> Vec<Model> {
        match self {
            PosBool::True => vec![vec![]],
            PosBool::False => vec![],
            PosBool::Var(q) => vec![vec![*q]],
            PosBool::Or(a, b) => {
                let mut v = a.minimal_models();
                v.extend(b.minimal_models());
                prune(v)
            }
            PosBool::And(a, b) => cross(&a.minimal_models(), &b.minimal_models()),
        }
    }
}

/// Minimal models of a conjunction given the minimal models of its parts.
pub fn cross(xs: &[Model], ys: &[Model]) -> Vec<Model> {
    let mut out = Vec::with_capacity(xs.len() * ys.len());
    for x in xs {
        for y in ys {
            out.push(union(x, y));
        }
    }
    prune(out)
}

pub fn union(x: &[StateId], y: &[StateId]) -> Model {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() && j < y.len() {
        match x[i].cmp(&y[j]) {
            std::cmp::Ordering::Less => {
                out.push(x[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(y[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push(x[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&x[i..]);
    out.extend_from_slice(&y[j..]);
    out
}

fn is_subset(x: &[StateId], y: &[StateId]) -> bool {
    let mut j = 0;
    for &a in x {
        while j < y.len() && y[j] < a {
            j += 1;
        }
        if j == y.len() || y[j] != a {
            return false;
        }
        j += 1;
    }
    true
}

/// Drops duplicates and every set that strictly contains another.
pub fn prune(mut v: Vec<Model>) -> Vec<Model> {
    v.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    v.dedup();
    let mut keep: Vec<Model> = Vec::with_capacity(v.len());
    for m in v {
        if !keep.iter().any(|k| is_subset(k, &m)) {
            keep.push(m);
        }
    }
    keep
}

impl fmt::Display for PosBool {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PosBool::True => write!(f, "true"),
            PosBool::False => write!(f, "false"),
            PosBool::Var(q) => write!(f, "q{q}"),
            PosBool::And(a, b) => write!(f, "({a} & {b})"),
            PosBool::Or(a, b) => write!(f, "({a} | {b})"),
        }
    }
}

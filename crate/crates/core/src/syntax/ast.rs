use std::fmt;

/// A bound path variable. `index` is the 1-based quantifier depth that
/// introduced it, so `index == 1` is the outermost quantified path.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PathVar {
    pub name: String,
    pub index: usize,
}

impl PathVar {
    pub fn new(name: impl Into<String>, index: usize) -> Self {
        PathVar { name: name.into(), index }
    }
}

/// One position of a program tuple; `None` is the wildcard `_`.
pub type TupleEntry = Option<String>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TupleSym(pub Vec<TupleEntry>);

impl TupleSym {
    pub fn any(n: usize) -> Self {
        TupleSym(vec![None; n])
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn is_any(&self) -> bool {
        self.0.iter().all(Option::is_none)
    }

    /// Wildcards match anything; concrete entries must equal the letter's program.
    pub fn matches<S: AsRef<str>>(&self, letter: &[S]) -> bool {
        self.0.len() == letter.len()
            && self
                .0
                .iter()
                .zip(letter)
                .all(|(e, p)| e.as_deref().is_none_or(|e| e == p.as_ref()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Atom { ap: String, var: PathVar },
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Exists(String, Box<Formula>),
    Forall(String, Box<Formula>),
    NotExists(String, Box<Formula>),
    Diamond(Program, Box<Formula>),
    Boxed(Program, Box<Formula>),
    Delta(Program),
    NotDelta(Program),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Program {
    Tup(TupleSym),
    Eps,
    Sum(Box<Program>, Box<Program>),
    Concat(Box<Program>, Box<Program>),
    Star(Box<Program>),
    Test(Box<Formula>),
}

impl Formula {
    pub fn atom(ap: impl Into<String>, var: PathVar) -> Self {
        Formula::Atom { ap: ap.into(), var }
    }

    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(l: Formula, r: Formula) -> Self {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Self {
        Formula::Or(Box::new(l), Box::new(r))
    }

    pub fn exists(v: impl Into<String>, body: Formula) -> Self {
        Formula::Exists(v.into(), Box::new(body))
    }

    pub fn forall(v: impl Into<String>, body: Formula) -> Self {
        Formula::Forall(v.into(), Box::new(body))
    }

    pub fn diamond(p: Program, body: Formula) -> Self {
        Formula::Diamond(p, Box::new(body))
    }

    pub fn boxed(p: Program, body: Formula) -> Self {
        Formula::Boxed(p, Box::new(body))
    }

    /// Left-nested conjunction; the empty conjunction is `True`.
    pub fn conj(items: impl IntoIterator<Item = Formula>) -> Self {
        items.into_iter().reduce(Formula::and).unwrap_or(Formula::True)
    }

    pub fn disj(items: impl IntoIterator<Item = Formula>) -> Self {
        items.into_iter().reduce(Formula::or).unwrap_or(Formula::False)
    }

    /// AST node count, programs included.
    pub fn size(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Atom { .. } => 1,
            Formula::Not(b)
            | Formula::Exists(_, b)
            | Formula::Forall(_, b)
            | Formula::NotExists(_, b) => 1 + b.size(),
            Formula::And(l, r) | Formula::Or(l, r) => 1 + l.size() + r.size(),
            Formula::Diamond(p, b) | Formula::Boxed(p, b) => 1 + p.size() + b.size(),
            Formula::Delta(p) | Formula::NotDelta(p) => 1 + p.size(),
        }
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::True | Formula::False | Formula::Atom { .. } => true,
            Formula::Exists(..) | Formula::Forall(..) | Formula::NotExists(..) => false,
            Formula::Not(b) => b.is_quantifier_free(),
            Formula::And(l, r) | Formula::Or(l, r) => {
                l.is_quantifier_free() && r.is_quantifier_free()
            }
            Formula::Diamond(p, b) | Formula::Boxed(p, b) => {
                p.is_quantifier_free() && b.is_quantifier_free()
            }
            Formula::Delta(p) | Formula::NotDelta(p) => p.is_quantifier_free(),
        }
    }

    pub fn is_nnf(&self) -> bool {
        match self {
            Formula::True | Formula::False | Formula::Atom { .. } => true,
            Formula::Not(b) => matches!(**b, Formula::Atom { .. }),
            Formula::Forall(..) => false,
            Formula::Exists(_, b) | Formula::NotExists(_, b) => b.is_nnf(),
            Formula::And(l, r) | Formula::Or(l, r) => l.is_nnf() && r.is_nnf(),
            Formula::Diamond(p, b) | Formula::Boxed(p, b) => p.is_nnf() && b.is_nnf(),
            Formula::Delta(p) | Formula::NotDelta(p) => p.is_nnf(),
        }
    }
}

impl Program {
    pub fn tup(entries: &[Option<&str>]) -> Self {
        Program::Tup(TupleSym(entries.iter().map(|e| e.map(str::to_string)).collect()))
    }

    pub fn any(n: usize) -> Self {
        Program::Tup(TupleSym::any(n))
    }

    pub fn sum(l: Program, r: Program) -> Self {
        Program::Sum(Box::new(l), Box::new(r))
    }

    pub fn concat(l: Program, r: Program) -> Self {
        Program::Concat(Box::new(l), Box::new(r))
    }

    pub fn star(b: Program) -> Self {
        Program::Star(Box::new(b))
    }

    pub fn test(f: Formula) -> Self {
        Program::Test(Box::new(f))
    }

    pub fn size(&self) -> usize {
        match self {
            Program::Tup(_) | Program::Eps => 1,
            Program::Sum(l, r) | Program::Concat(l, r) => 1 + l.size() + r.size(),
            Program::Star(b) => 1 + b.size(),
            Program::Test(f) => 1 + f.size(),
        }
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Program::Tup(_) | Program::Eps => true,
            Program::Sum(l, r) | Program::Concat(l, r) => {
                l.is_quantifier_free() && r.is_quantifier_free()
            }
            Program::Star(b) => b.is_quantifier_free(),
            Program::Test(f) => f.is_quantifier_free(),
        }
    }

    pub fn is_nnf(&self) -> bool {
        match self {
            Program::Tup(_) | Program::Eps => true,
            Program::Sum(l, r) | Program::Concat(l, r) => l.is_nnf() && r.is_nnf(),
            Program::Star(b) => b.is_nnf(),
            Program::Test(f) => f.is_nnf(),
        }
    }

    /// Whether the empty segment belongs to the program's language when every
    /// test is assumed to pass.
    pub fn may_match_empty(&self) -> bool {
        match self {
            Program::Tup(_) => false,
            Program::Eps | Program::Star(_) | Program::Test(_) => true,
            Program::Sum(l, r) => l.may_match_empty() || r.may_match_empty(),
            Program::Concat(l, r) => l.may_match_empty() && r.may_match_empty(),
        }
    }
}

impl fmt::Display for TupleSym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", e.as_deref().unwrap_or("_"))?;
        }
        write!(f, ")")
    }
}

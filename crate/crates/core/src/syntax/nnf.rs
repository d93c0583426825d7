use super::ast::{Formula, Program};

/// Negation normal form: only `Exists`/`NotExists` quantifiers, negation only on
/// atoms, and `NotDelta` in place of negated `Delta`. Tests are normalized in place.
pub fn to_nnf(f: &Formula) -> Formula {
    nnf(f, false)
}

/// NNF of the negation of `f`.
pub fn negate_nnf(f: &Formula) -> Formula {
    nnf(f, true)
}

fn nnf(f: &Formula, neg: bool) -> Formula {
    match f {
        Formula::True => {
            if neg {
                Formula::False
            } else {
                Formula::True
            }
        }
        Formula::False => {
            if neg {
                Formula::True
            } else {
                Formula::False
            }
        }
        Formula::Atom { .. } => {
            if neg {
                Formula::not(f.clone())
            } else {
                f.clone()
            }
        }
        Formula::Not(b) => nnf(b, !neg),
        Formula::And(l, r) => {
            let (l, r) = (nnf(l, neg), nnf(r, neg));
            if neg {
                Formula::or(l, r)
            } else {
                Formula::and(l, r)
            }
        }
        Formula::Or(l, r) => {
            let (l, r) = (nnf(l, neg), nnf(r, neg));
            if neg {
                Formula::and(l, r)
            } else {
                Formula::or(l, r)
            }
        }
        Formula::Exists(v, b) => quantifier(v, nnf(b, false), neg),
        Formula::NotExists(v, b) => quantifier(v, nnf(b, false), !neg),
        Formula::Forall(v, b) => quantifier(v, nnf(b, true), !neg),
        Formula::Diamond(p, b) => {
            let (p, b) = (program_nnf(p), nnf(b, neg));
            if neg {
                Formula::boxed(p, b)
            } else {
                Formula::diamond(p, b)
            }
        }
        Formula::Boxed(p, b) => {
            let (p, b) = (program_nnf(p), nnf(b, neg));
            if neg {
                Formula::diamond(p, b)
            } else {
                Formula::boxed(p, b)
            }
        }
        Formula::Delta(p) => {
            if neg {
                Formula::NotDelta(program_nnf(p))
            } else {
                Formula::Delta(program_nnf(p))
            }
        }
        Formula::NotDelta(p) => {
            if neg {
                Formula::Delta(program_nnf(p))
            } else {
                Formula::NotDelta(program_nnf(p))
            }
        }
    }
}

fn quantifier(v: &str, body: Formula, negated: bool) -> Formula {
    if negated {
        Formula::NotExists(v.to_string(), Box::new(body))
    } else {
        Formula::Exists(v.to_string(), Box::new(body))
    }
}

pub fn program_nnf(p: &Program) -> Program {
    match p {
        Program::Tup(_) | Program::Eps => p.clone(),
        Program::Sum(l, r) => Program::sum(program_nnf(l), program_nnf(r)),
        Program::Concat(l, r) => Program::concat(program_nnf(l), program_nnf(r)),
        Program::Star(b) => Program::star(program_nnf(b)),
        Program::Test(f) => Program::test(to_nnf(f)),
    }
}

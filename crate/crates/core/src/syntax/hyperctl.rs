//! HyperCTL* input and its translation into HyperPDL-Delta.

use super::ast::{Formula, PathVar, Program};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CtlStar {
    True,
    False,
    Atom(String, String),
    Not(Box<CtlStar>),
    And(Box<CtlStar>, Box<CtlStar>),
    Or(Box<CtlStar>, Box<CtlStar>),
    Next(Box<CtlStar>),
    Until(Box<CtlStar>, Box<CtlStar>),
    Release(Box<CtlStar>, Box<CtlStar>),
    Exists(String, Box<CtlStar>),
    Forall(String, Box<CtlStar>),
}

impl CtlStar {
    pub fn atom(ap: &str, var: &str) -> Self {
        CtlStar::Atom(ap.into(), var.into())
    }
    pub fn not(f: CtlStar) -> Self {
        CtlStar::Not(Box::new(f))
    }
    pub fn and(l: CtlStar, r: CtlStar) -> Self {
        CtlStar::And(Box::new(l), Box::new(r))
    }
    pub fn or(l: CtlStar, r: CtlStar) -> Self {
        CtlStar::Or(Box::new(l), Box::new(r))
    }
    pub fn next(f: CtlStar) -> Self {
        CtlStar::Next(Box::new(f))
    }
    pub fn until(l: CtlStar, r: CtlStar) -> Self {
        CtlStar::Until(Box::new(l), Box::new(r))
    }
    pub fn release(l: CtlStar, r: CtlStar) -> Self {
        CtlStar::Release(Box::new(l), Box::new(r))
    }
    pub fn globally(f: CtlStar) -> Self {
        CtlStar::release(CtlStar::False, f)
    }
    pub fn eventually(f: CtlStar) -> Self {
        CtlStar::until(CtlStar::True, f)
    }
    pub fn exists(v: &str, f: CtlStar) -> Self {
        CtlStar::Exists(v.into(), Box::new(f))
    }
    pub fn forall(v: &str, f: CtlStar) -> Self {
        CtlStar::Forall(v.into(), Box::new(f))
    }
}

/// Translates with `X f -> <any> tr(f)`, `f U g -> <({tr f}? ; any)*> tr g` and
/// `f R g -> [({tr !f}? ; any)*] tr g`. Next operators under an odd number of
/// negations (counting the implicit one under each universal quantifier) are
/// emitted as `[any]` so that the NNF of the result always carries `<any>`.
pub fn translate_hyperctlstar(f: &CtlStar) -> Formula {
    tr(f, true, &mut Vec::new())
}

fn tr(f: &CtlStar, positive: bool, scope: &mut Vec<String>) -> Formula {
    let n = scope.len();
    match f {
        CtlStar::True => Formula::True,
        CtlStar::False => Formula::False,
        CtlStar::Atom(ap, v) => {
            let idx = scope.iter().rposition(|s| s == v).map(|i| i + 1).unwrap_or(0);
            Formula::atom(ap.clone(), PathVar::new(v.clone(), idx))
        }
        CtlStar::Not(b) => Formula::not(tr(b, !positive, scope)),
        CtlStar::And(l, r) => Formula::and(tr(l, positive, scope), tr(r, positive, scope)),
        CtlStar::Or(l, r) => Formula::or(tr(l, positive, scope), tr(r, positive, scope)),
        CtlStar::Next(b) => {
            let body = tr(b, positive, scope);
            if positive {
                Formula::diamond(Program::any(n), body)
            } else {
                Formula::boxed(Program::any(n), body)
            }
        }
        CtlStar::Until(l, r) => {
            let test = tr(l, true, scope);
            let step = Program::star(Program::concat(Program::test(test), Program::any(n)));
            Formula::diamond(step, tr(r, positive, scope))
        }
        CtlStar::Release(l, r) => {
            let test = Formula::not(tr(l, false, scope));
            let step = Program::star(Program::concat(Program::test(test), Program::any(n)));
            Formula::boxed(step, tr(r, positive, scope))
        }
        CtlStar::Exists(v, b) | CtlStar::Forall(v, b) => {
            let universal = matches!(f, CtlStar::Forall(..));
            scope.push(v.clone());
            let body = tr(b, if universal { !positive } else { positive }, scope);
            scope.pop();
            if universal {
                Formula::forall(v.clone(), body)
            } else {
                Formula::exists(v.clone(), body)
            }
        }
    }
}

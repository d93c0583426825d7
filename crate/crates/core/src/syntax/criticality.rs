use super::ast::{Formula, Program};
use crate::marked_nfa::{build_marked_nfa, is_deterministic};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriticalQuantifier {
    pub var: String,
    /// Number of quantifiers enclosing this one.
    pub depth: usize,
    pub negated: bool,
    pub in_test: bool,
    pub in_box_body: bool,
}

#[derive(Clone, Copy, Default)]
struct Ctx {
    in_test: bool,
    in_box_body: bool,
    in_det_box_test: bool,
}

/// Highest number of critical quantifiers along any path of the syntax tree.
/// Expects NNF input.
pub fn criticality(f: &Formula) -> usize {
    walk(f, Ctx::default(), 0, &mut Vec::new())
}

/// All critical quantifiers, in syntax-tree preorder.
pub fn critical_quantifiers(f: &Formula) -> Vec<CriticalQuantifier> {
    let mut out = Vec::new();
    walk(f, Ctx::default(), 0, &mut out);
    out
}

fn walk(f: &Formula, ctx: Ctx, depth: usize, out: &mut Vec<CriticalQuantifier>) -> usize {
    match f {
        Formula::True | Formula::False | Formula::Atom { .. } => 0,
        Formula::Not(b) => walk(b, ctx, depth, out),
        Formula::And(l, r) | Formula::Or(l, r) => {
            walk(l, ctx, depth, out).max(walk(r, ctx, depth, out))
        }
        Formula::Exists(v, b) | Formula::NotExists(v, b) | Formula::Forall(v, b) => {
            let negated = !matches!(f, Formula::Exists(..));
            let critical = depth > 0
                && (negated || ctx.in_test || ctx.in_box_body)
                && !(negated && ctx.in_det_box_test);
            if critical {
                out.push(CriticalQuantifier {
                    var: v.clone(),
                    depth,
                    negated,
                    in_test: ctx.in_test,
                    in_box_body: ctx.in_box_body,
                });
            }
            usize::from(critical) + walk(b, Ctx::default(), depth + 1, out)
        }
        Formula::Diamond(p, b) => {
            let tests = Ctx { in_test: true, ..ctx };
            walk_program(p, tests, depth, out).max(walk(b, ctx, depth, out))
        }
        Formula::Boxed(p, b) => {
            let det = depth > 0 && is_deterministic(&build_marked_nfa(p, depth));
            let tests = Ctx { in_test: true, in_det_box_test: ctx.in_det_box_test || det, ..ctx };
            let body = Ctx { in_box_body: true, ..ctx };
            walk_program(p, tests, depth, out).max(walk(b, body, depth, out))
        }
        Formula::Delta(p) | Formula::NotDelta(p) => {
            walk_program(p, Ctx { in_test: true, ..ctx }, depth, out)
        }
    }
}

fn walk_program(p: &Program, ctx: Ctx, depth: usize, out: &mut Vec<CriticalQuantifier>) -> usize {
    match p {
        Program::Tup(_) | Program::Eps => 0,
        Program::Sum(l, r) | Program::Concat(l, r) => {
            walk_program(l, ctx, depth, out).max(walk_program(r, ctx, depth, out))
        }
        Program::Star(b) => walk_program(b, ctx, depth, out),
        Program::Test(t) => walk(t, ctx, depth, out),
    }
}

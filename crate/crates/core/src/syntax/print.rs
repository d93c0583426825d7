//! Canonical printer. Output re-parses to the same AST for every formula the
//! parser can produce.

use std::fmt::{self, Display, Write};

use super::ast::{Formula, Program};

const QUANT: u8 = 0;
const OR: u8 = 1;
const AND: u8 = 2;
const UNARY: u8 = 3;

fn formula_level(f: &Formula) -> u8 {
    match f {
        Formula::Exists(..) | Formula::Forall(..) => QUANT,
        Formula::Or(..) => OR,
        Formula::And(..) => AND,
        _ => UNARY,
    }
}

fn write_formula(out: &mut String, f: &Formula, ctx: u8) {
    let paren = formula_level(f) < ctx;
    if paren {
        out.push('(');
    }
    match f {
        Formula::True => out.push_str("true"),
        Formula::False => out.push_str("false"),
        Formula::Atom { ap, var } => {
            let _ = write!(out, "{ap}@{}", var.name);
        }
        Formula::Not(b) => {
            out.push('!');
            write_formula(out, b, UNARY);
        }
        Formula::And(l, r) => {
            write_formula(out, l, AND);
            out.push_str(" & ");
            write_formula(out, r, UNARY);
        }
        Formula::Or(l, r) => {
            write_formula(out, l, OR);
            out.push_str(" | ");
            write_formula(out, r, AND);
        }
        Formula::Exists(v, b) | Formula::Forall(v, b) => {
            let kw = if matches!(f, Formula::Exists(..)) { "exists" } else { "forall" };
            let _ = write!(out, "{kw} {v}. ");
            write_formula(out, b, QUANT);
        }
        Formula::NotExists(v, b) => {
            let _ = write!(out, "!(exists {v}. ");
            write_formula(out, b, QUANT);
            out.push(')');
        }
        Formula::Diamond(p, b) => {
            out.push('<');
            write_program(out, p, SUM);
            out.push('>');
            out.push(' ');
            write_formula(out, b, UNARY);
        }
        Formula::Boxed(p, b) => {
            out.push('[');
            write_program(out, p, SUM);
            out.push(']');
            out.push(' ');
            write_formula(out, b, UNARY);
        }
        Formula::Delta(p) => {
            out.push_str("delta ");
            write_program(out, p, STAR);
        }
        Formula::NotDelta(p) => {
            out.push_str("!delta ");
            write_program(out, p, STAR);
        }
    }
    if paren {
        out.push(')');
    }
}

const SUM: u8 = 0;
const SEQ: u8 = 1;
const STAR: u8 = 2;

fn program_level(p: &Program) -> u8 {
    match p {
        Program::Sum(..) => SUM,
        Program::Concat(..) => SEQ,
        _ => STAR,
    }
}

fn write_program(out: &mut String, p: &Program, ctx: u8) {
    let paren = program_level(p) < ctx;
    if paren {
        out.push('(');
    }
    match p {
        Program::Tup(t) if t.is_any() && t.arity() > 0 => out.push_str("any"),
        Program::Tup(t) => {
            let _ = write!(out, "{t}");
        }
        Program::Eps => out.push_str("eps"),
        Program::Sum(l, r) => {
            write_program(out, l, SUM);
            out.push_str(" + ");
            write_program(out, r, SEQ);
        }
        Program::Concat(l, r) => {
            write_program(out, l, SEQ);
            out.push_str(" ; ");
            write_program(out, r, STAR);
        }
        Program::Star(b) => {
            write_program(out, b, STAR);
            out.push('*');
        }
        Program::Test(f) => {
            out.push('{');
            write_formula(out, f, QUANT);
            out.push_str("}?");
        }
    }
    if paren {
        out.push(')');
    }
}

impl Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_formula(&mut s, self, QUANT);
        f.write_str(&s)
    }
}

impl Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_program(&mut s, self, SUM);
        f.write_str(&s)
    }
}

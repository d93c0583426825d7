//! Formulas and programs of HyperPDL-Delta: AST, parser, printer, negation
//! normal form, criticality and the HyperCTL* embedding.

mod ast;
mod criticality;
mod hyperctl;
mod nnf;
mod parse;
mod print;

pub use ast::{Formula, PathVar, Program, TupleEntry, TupleSym};
pub use criticality::{critical_quantifiers, criticality, CriticalQuantifier};
pub use hyperctl::{translate_hyperctlstar, CtlStar};
pub use nnf::{negate_nnf, program_nnf, to_nnf};
pub use parse::{parse_formula, parse_program, parse_with_scope, ParseError, Pos, Vocabulary};

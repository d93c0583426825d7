//! HyperPDL-Δ: a propositional dynamic logic for hyperproperties.
//!
//! Formulas are compiled into alternating Büchi automata over letters that
//! carry one world and one atomic program per quantified path. Model checking
//! runs emptiness on the automaton of each maximal quantified subformula;
//! the linear fragments are decided over arbitrary trace sets; ω-regular
//! languages compile back into quantifier-free formulas. The lasso oracle
//! evaluates the semantics directly on ultimately periodic assignments.

pub mod aba;
pub mod config;
pub mod formula_automata;
pub mod kts;
pub mod lasso;
pub mod marked_nfa;
pub mod model_checker;
pub mod omega;
pub mod oracle;
pub mod paths;
pub mod satisfiability;
pub mod syntax;
pub mod world;

pub use kts::{parse_kts, Kts};
pub use lasso::LassoWord;
pub use syntax::{parse_formula, to_nnf, Formula, Program};

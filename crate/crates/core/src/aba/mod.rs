//! Alternating Büchi automata over intensional alphabets.

mod automaton;
mod complement;
mod dot;
mod emptiness;
mod mh;
mod posbool;
mod reduce;

pub use automaton::{materialize, reachable_states, Aba, AbaState, Automaton, Embedding, LetterCheck, Rule};
pub use complement::complement;
pub use dot::to_dot;
pub use emptiness::{accepts_lasso, accepts_lasso_nba, accepts_lasso_via_mh, is_empty, AbaError, Emptiness, Run};
pub use mh::{miyano_hayashi, MhNba};
pub use posbool::{cross, prune, union, Model, PosBool, StateId, SINK_FALSE, SINK_TRUE};
pub use reduce::reduce_nba;

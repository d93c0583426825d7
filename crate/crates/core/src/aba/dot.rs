use std::collections::BTreeMap;
use std::fmt::Write;

use super::automaton::{reachable_states, Automaton};
use super::posbool::{SINK_FALSE, SINK_TRUE};
use crate::marked_nfa::escape;

/// DOT rendering of the part of `a` reachable over `letters`. Each minimal
/// model of a transition with more than one state is drawn through a small
/// junction node, so the edges of one conjunction share an arc marker.
pub fn to_dot<L>(a: &dyn Automaton<L>, letters: &[L], show: &dyn Fn(&L) -> String) -> String {
    let states = reachable_states(a, letters);
    let mut out = String::from("digraph aba {\n  rankdir=LR;\n  node [shape=circle];\n");
    let _ = writeln!(out, "  init [shape=point];");
    let mut clusters: BTreeMap<String, Vec<u32>> = BTreeMap::new();
    for &q in &states {
        clusters.entry(a.state_group(q)).or_default().push(q);
    }
    for (ci, (group, qs)) in clusters.iter().enumerate() {
        let indent = if group.is_empty() { "  " } else { "    " };
        if !group.is_empty() {
            let _ = writeln!(out, "  subgraph cluster_{ci} {{\n    label=\"{}\";", escape(group));
        }
        for &q in qs {
            let shape = if a.is_accepting(q) { "doublecircle" } else { "circle" };
            let label = match q {
                SINK_TRUE => "true".to_string(),
                SINK_FALSE => "false".to_string(),
                _ => a.state_label(q),
            };
            let _ = writeln!(out, "{indent}s{q} [shape={shape}, label=\"{}\"];", escape(&label));
        }
        if !group.is_empty() {
            out.push_str("  }\n");
        }
    }
    let _ = writeln!(out, "  init -> s{};", a.initial());
    let mut junction = 0usize;
    for &q in &states {
        let mut by_target: BTreeMap<Vec<u32>, Vec<String>> = BTreeMap::new();
        for l in letters {
            for model in a.transition(q, l).minimal_models() {
                let model = if model.is_empty() { vec![SINK_TRUE] } else { model };
                by_target.entry(model).or_default().push(show(l));
            }
        }
        for (model, ls) in by_target {
            let label = escape(&ls.join(", "));
            if model.len() == 1 {
                let _ = writeln!(out, "  s{q} -> s{} [label=\"{label}\"];", model[0]);
            } else {
                let _ = writeln!(out, "  j{junction} [shape=point, width=0.05];");
                let _ = writeln!(out, "  s{q} -> j{junction} [label=\"{label}\", arrowhead=none];");
                for t in model {
                    let _ = writeln!(out, "  j{junction} -> s{t} [style=bold];");
                }
                junction += 1;
            }
        }
    }
    out.push_str("}\n");
    out
}

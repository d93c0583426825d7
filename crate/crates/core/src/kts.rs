//! Kripke transition systems: states labelled with atomic propositions and
//! edges labelled with atomic programs.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write;

use thiserror::Error;

use crate::lasso::LassoWord;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KtsError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: unknown state `{name}`")]
    UnknownState { line: usize, name: String },
    #[error("line {line}: unknown atomic program `{name}`")]
    UnknownProgram { line: usize, name: String },
    #[error("line {line}: unknown atomic proposition `{name}`")]
    UnknownAp { line: usize, name: String },
    #[error("line {line}: state `{name}` declared twice")]
    DuplicateState { line: usize, name: String },
    #[error("state `{name}` has no outgoing edge")]
    DeadState { name: String },
    #[error("no `init` line")]
    MissingInit,
    #[error("state `{name}` does not have exactly one outgoing edge")]
    Nondeterministic { name: String },
}

/// Input dialects. Kripke files have unlabelled edges (program `step`), LTS
/// files have unlabelled states.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum KtsFormat {
    #[default]
    Kts,
    Kripke,
    Lts,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Kts {
    pub aps: Vec<String>,
    pub programs: Vec<String>,
    pub states: Vec<String>,
    pub init: usize,
    /// `labels[s]` holds AP indices.
    pub labels: Vec<BTreeSet<usize>>,
    /// `edges[sigma][s]` lists successors, sorted and deduplicated.
    pub edges: Vec<Vec<Vec<usize>>>,
}

impl Kts {
    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    pub fn program_index(&self, name: &str) -> Option<usize> {
        self.programs.iter().position(|s| s == name)
    }

    pub fn ap_index(&self, name: &str) -> Option<usize> {
        self.aps.iter().position(|s| s == name)
    }

    pub fn holds(&self, ap: usize, s: usize) -> bool {
        self.labels[s].contains(&ap)
    }

    /// Successors by program index.
    pub fn post(&self, s: usize, sigma: usize) -> &[usize] {
        &self.edges[sigma][s]
    }

    /// Successors by program name; an unknown program has none.
    pub fn successors(&self, s: usize, sigma: &str) -> Vec<usize> {
        self.program_index(sigma).map(|p| self.edges[p][s].clone()).unwrap_or_default()
    }

    /// All `(program, successor)` pairs leaving `s`.
    pub fn out_edges(&self, s: usize) -> Vec<(usize, usize)> {
        let mut v = Vec::new();
        for (p, per_state) in self.edges.iter().enumerate() {
            for &t in &per_state[s] {
                v.push((p, t));
            }
        }
        v
    }

    pub fn is_deterministic(&self) -> bool {
        (0..self.states.len()).all(|s| self.out_edges(s).len() == 1)
    }

    /// The unique path from `s` when every reachable state has exactly one
    /// outgoing edge: stem up to the first repeated state, then the cycle.
    pub fn deterministic_path(&self, s: usize) -> Result<LassoWord<(usize, usize)>, KtsError> {
        let mut seen: HashMap<usize, usize> = HashMap::new();
        let mut seq = Vec::new();
        let mut cur = s;
        loop {
            if let Some(&k) = seen.get(&cur) {
                let period = seq.split_off(k);
                return Ok(LassoWord::new(seq, period));
            }
            let out = self.out_edges(cur);
            if out.len() != 1 {
                return Err(KtsError::Nondeterministic { name: self.states[cur].clone() });
            }
            seen.insert(cur, seq.len());
            seq.push((cur, out[0].0));
            cur = out[0].1;
        }
    }

    /// Canonical text in the `Kts` dialect.
    pub fn print(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "aps {}", self.aps.join(" "));
        let _ = writeln!(out, "programs {}", self.programs.join(" "));
        for (i, name) in self.states.iter().enumerate() {
            let labels: Vec<&str> = self.labels[i].iter().map(|&a| self.aps[a].as_str()).collect();
            let _ = writeln!(out, "state {name} {{ {} }}", labels.join(" "));
        }
        let _ = writeln!(out, "init {}", self.states[self.init]);
        for (p, per_state) in self.edges.iter().enumerate() {
            for (s, succ) in per_state.iter().enumerate() {
                for &t in succ {
                    let _ = writeln!(out, "edge {} {} {}", self.states[s], self.programs[p], self.states[t]);
                }
            }
        }
        out
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph kts {\n");
        for (i, name) in self.states.iter().enumerate() {
            let labels: Vec<&str> = self.labels[i].iter().map(|&a| self.aps[a].as_str()).collect();
            let shape = if i == self.init { "doublecircle" } else { "circle" };
            let _ = writeln!(out, "  s{i} [shape={shape}, label=\"{name}\\n{{{}}}\"];", labels.join(","));
        }
        for (p, per_state) in self.edges.iter().enumerate() {
            for (s, succ) in per_state.iter().enumerate() {
                for &t in succ {
                    let _ = writeln!(out, "  s{s} -> s{t} [label=\"{}\"];", self.programs[p]);
                }
            }
        }
        out.push_str("}\n");
        out
    }

    fn validate(&self) -> Result<(), KtsError> {
        for s in 0..self.states.len() {
            if self.edges.iter().all(|e| e[s].is_empty()) {
                return Err(KtsError::DeadState { name: self.states[s].clone() });
            }
        }
        Ok(())
    }
}

pub fn parse_kts(text: &str) -> Result<Kts, KtsError> {
    parse_kts_with(text, KtsFormat::Kts)
}

pub fn parse_kts_with(text: &str, format: KtsFormat) -> Result<Kts, KtsError> {
    let mut aps: Vec<String> = Vec::new();
    let mut programs: Vec<String> = if format == KtsFormat::Kripke { vec!["step".into()] } else { Vec::new() };
    let mut states: Vec<String> = Vec::new();
    let mut labels: Vec<BTreeSet<usize>> = Vec::new();
    let mut init: Option<usize> = None;
    let mut raw_edges: Vec<(usize, usize, usize)> = Vec::new();

    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let syntax = |msg: &str| KtsError::Syntax { line, msg: msg.to_string() };
        let mut words = content.split_whitespace();
        let head = words.next().unwrap_or_default();
        match head {
            "aps" => {
                if format == KtsFormat::Lts {
                    return Err(syntax("LTS input carries no atomic propositions"));
                }
                aps.extend(words.map(str::to_string));
            }
            "programs" => {
                if format == KtsFormat::Kripke {
                    return Err(syntax("Kripke input has the single implicit program `step`"));
                }
                programs.extend(words.map(str::to_string));
            }
            "state" => {
                let rest = content["state".len()..].trim();
                let (name, label_text) = match rest.find('{') {
                    Some(i) => {
                        let close = rest.rfind('}').filter(|&c| c > i).ok_or_else(|| syntax("missing `}`"))?;
                        if !rest[close + 1..].trim().is_empty() {
                            return Err(syntax("trailing text after `}`"));
                        }
                        (rest[..i].trim(), &rest[i + 1..close])
                    }
                    None => (rest, ""),
                };
                if name.is_empty() || name.contains(char::is_whitespace) {
                    return Err(syntax("expected `state NAME { ... }`"));
                }
                if states.iter().any(|s| s == name) {
                    return Err(KtsError::DuplicateState { line, name: name.to_string() });
                }
                let mut set = BTreeSet::new();
                for a in label_text.split(|c: char| c.is_whitespace() || c == ',').filter(|w| !w.is_empty()) {
                    if format == KtsFormat::Lts {
                        return Err(syntax("LTS states carry no labels"));
                    }
                    let idx = aps
                        .iter()
                        .position(|x| x == a)
                        .ok_or(KtsError::UnknownAp { line, name: a.to_string() })?;
                    set.insert(idx);
                }
                states.push(name.to_string());
                labels.push(set);
            }
            "init" => {
                let name = words.next().ok_or_else(|| syntax("expected `init NAME`"))?;
                let idx = states
                    .iter()
                    .position(|s| s == name)
                    .ok_or(KtsError::UnknownState { line, name: name.to_string() })?;
                init = Some(idx);
            }
            "edge" => {
                let parts: Vec<&str> = words.collect();
                let (src, prog, dst) = match (format, parts.as_slice()) {
                    (KtsFormat::Kripke, [s, d]) => (*s, "step", *d),
                    (KtsFormat::Kripke, _) => return Err(syntax("expected `edge SRC DST`")),
                    (_, [s, p, d]) => (*s, *p, *d),
                    _ => return Err(syntax("expected `edge SRC PROG DST`")),
                };
                let find = |n: &str| {
                    states
                        .iter()
                        .position(|s| s == n)
                        .ok_or(KtsError::UnknownState { line, name: n.to_string() })
                };
                let p = programs
                    .iter()
                    .position(|x| x == prog)
                    .ok_or(KtsError::UnknownProgram { line, name: prog.to_string() })?;
                raw_edges.push((find(src)?, p, find(dst)?));
            }
            other => return Err(syntax(&format!("unknown directive `{other}`"))),
        }
    }

    let init = init.ok_or(KtsError::MissingInit)?;
    let mut edges = vec![vec![Vec::new(); states.len()]; programs.len()];
    for (s, p, t) in raw_edges {
        edges[p][s].push(t);
    }
    for per_state in &mut edges {
        for succ in per_state.iter_mut() {
            succ.sort_unstable();
            succ.dedup();
        }
    }
    let k = Kts { aps, programs, states, init, labels, edges };
    k.validate()?;
    Ok(k)
}

//! Text form of path assignments: one `path NAME: (w p) (w p) | (w p)` line
//! per variable, stem entries before `|`, period entries after. Worlds are
//! state names over a system and `{a b}` proposition sets over traces.

use std::collections::HashMap;

use thiserror::Error;

use crate::kts::Kts;
use crate::lasso::LassoWord;
use crate::world::WorldInterp;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PathsError {
    #[error("line {0}: {1}")]
    Syntax(usize, String),
    #[error("line {0}: unknown world `{1}`")]
    UnknownWorld(usize, String),
    #[error("line {0}: unknown atomic program `{1}`")]
    UnknownProgram(usize, String),
    #[error("line {0}: the period is empty")]
    EmptyPeriod(usize),
    #[error("line {0}: path `{1}` declared twice")]
    Duplicate(usize, String),
    #[error("line {0}: `{1}` is not a path of the system: no `{2}` edge from `{3}` to `{4}`")]
    NotAPath(usize, String, String, String, String),
}

pub type Path = LassoWord<(usize, usize)>;

pub fn format_path(interp: &WorldInterp, path: &Path) -> String {
    let show = |v: &[(usize, usize)]| {
        v.iter().map(|&(w, p)| format!("({} {})", interp.world_name(w), interp.program_name(p))).collect::<Vec<_>>().join(" ")
    };
    if path.stem.is_empty() {
        format!("| {}", show(&path.period))
    } else {
        format!("{} | {}", show(&path.stem), show(&path.period))
    }
}

pub fn format_paths<S: AsRef<str>>(interp: &WorldInterp, names: &[S], paths: &[Path]) -> String {
    names.iter().zip(paths).map(|(n, p)| format!("path {}: {}\n", n.as_ref(), format_path(interp, p))).collect()
}

/// Parses a path file in declaration order. Over a system every step must
/// follow an edge, including the step from the end of the period back to its
/// start.
pub fn parse_paths(text: &str, interp: &WorldInterp) -> Result<Vec<(String, Path)>, PathsError> {
    let mut out: Vec<(String, Path)> = Vec::new();
    let mut seen = HashMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let rest = line
            .strip_prefix("path")
            .filter(|r| r.starts_with(char::is_whitespace))
            .ok_or_else(|| PathsError::Syntax(line_no, "expected `path NAME: ...`".into()))?;
        let (name, body) = rest.split_once(':').ok_or_else(|| PathsError::Syntax(line_no, "missing `:`".into()))?;
        let name = name.trim().to_string();
        if name.is_empty() || name.contains(char::is_whitespace) {
            return Err(PathsError::Syntax(line_no, format!("bad path name `{name}`")));
        }
        if seen.insert(name.clone(), line_no).is_some() {
            return Err(PathsError::Duplicate(line_no, name));
        }
        let (stem, period) = match body.split_once('|') {
            Some((s, p)) => (s, p),
            None => return Err(PathsError::Syntax(line_no, "missing `|` between stem and period".into())),
        };
        let stem = entries(stem, line_no, interp)?;
        let period = entries(period, line_no, interp)?;
        if period.is_empty() {
            return Err(PathsError::EmptyPeriod(line_no));
        }
        let path = LassoWord::new(stem, period);
        if let Some(k) = interp.system() {
            check_edges(k, &name, &path, line_no)?;
        }
        out.push((name, path));
    }
    Ok(out)
}

/// Declared path names in order, without resolving worlds; lets a formula be
/// parsed in the file's scope before the alphabet is known.
pub fn path_names(text: &str) -> Vec<String> {
    text.lines()
        .filter_map(|l| l.split('#').next()?.trim().strip_prefix("path")?.split_once(':').map(|(n, _)| n.trim().to_string()))
        .filter(|n| !n.is_empty())
        .collect()
}

fn entries(text: &str, line: usize, interp: &WorldInterp) -> Result<Vec<(usize, usize)>, PathsError> {
    let mut out = Vec::new();
    let mut rest = text.trim();
    while !rest.is_empty() {
        let inner = rest.strip_prefix('(').ok_or_else(|| PathsError::Syntax(line, format!("expected `(` at `{rest}`")))?;
        let close = inner.find(')').ok_or_else(|| PathsError::Syntax(line, "unclosed `(`".into()))?;
        let entry = inner[..close].trim();
        rest = inner[close + 1..].trim_start();
        let (world, prog) = if let Some(set) = entry.strip_prefix('{') {
            let end = set.find('}').ok_or_else(|| PathsError::Syntax(line, "unclosed `{`".into()))?;
            let names: Vec<&str> = set[..end].split_whitespace().collect();
            let w = interp.world_of_aps(&names).ok_or_else(|| PathsError::UnknownWorld(line, format!("{{{}}}", &set[..end])))?;
            (w, set[end + 1..].trim())
        } else {
            let (w, p) = entry.split_once(char::is_whitespace).ok_or_else(|| PathsError::Syntax(line, format!("expected `(world program)`, got `({entry})`")))?;
            let k = interp.system().ok_or_else(|| PathsError::UnknownWorld(line, w.to_string()))?;
            (k.state_index(w).ok_or_else(|| PathsError::UnknownWorld(line, w.to_string()))?, p.trim())
        };
        let p = interp.program_index(prog).ok_or_else(|| PathsError::UnknownProgram(line, prog.to_string()))?;
        out.push((world, p));
    }
    Ok(out)
}

fn check_edges(k: &Kts, name: &str, path: &Path, line: usize) -> Result<(), PathsError> {
    let seq: Vec<&(usize, usize)> = path.stem.iter().chain(path.period.iter()).collect();
    for j in 0..seq.len() {
        let (s, p) = *seq[j];
        let t = if j + 1 < seq.len() { seq[j + 1].0 } else { path.period[0].0 };
        if !k.post(s, p).contains(&t) {
            return Err(PathsError::NotAPath(line, name.into(), k.programs[p].clone(), k.states[s].clone(), k.states[t].clone()));
        }
    }
    Ok(())
}

/// Extends a finite path prefix to a lasso: the last step's program moves to
/// its first successor, then the walk always takes the first outgoing edge
/// until a state repeats.
pub fn complete_path(k: &Kts, prefix: &[(usize, usize)]) -> Path {
    let mut seq = prefix.to_vec();
    let mut cur = match prefix.last() {
        Some(&(s, p)) => k.post(s, p)[0],
        None => k.init,
    };
    let mut seen: HashMap<usize, usize> = HashMap::new();
    loop {
        if let Some(&j) = seen.get(&cur) {
            let period = seq.split_off(j);
            return LassoWord::new(seq, period);
        }
        seen.insert(cur, seq.len());
        let (p, t) = k.out_edges(cur)[0];
        seq.push((cur, p));
        cur = t;
    }
}

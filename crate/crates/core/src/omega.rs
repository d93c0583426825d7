//! Compiles an omega-regular language over path tuples, given as a union of
//! `stem . loop^omega` regex pairs, into the quantifier-free formula
//! `OR_i <stem_i> delta loop_i` over the paths `p1..pn`.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::syntax::{Formula, PathVar, Program, TupleSym};

/// One letter class: the proposition set of every path and the program
/// tuple, where `None` entries are wildcards.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Symbol {
    pub sets: Vec<BTreeSet<String>>,
    pub progs: TupleSym,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Regex {
    Eps,
    Sym(Symbol),
    Alt(Box<Regex>, Box<Regex>),
    Cat(Box<Regex>, Box<Regex>),
    Star(Box<Regex>),
}

impl Regex {
    pub fn nullable(&self) -> bool {
        match self {
            Regex::Eps | Regex::Star(_) => true,
            Regex::Sym(_) => false,
            Regex::Alt(l, r) => l.nullable() || r.nullable(),
            Regex::Cat(l, r) => l.nullable() && r.nullable(),
        }
    }

    fn symbols<'a>(&'a self, out: &mut Vec<&'a Symbol>) {
        match self {
            Regex::Eps => {}
            Regex::Sym(s) => out.push(s),
            Regex::Alt(l, r) | Regex::Cat(l, r) => {
                l.symbols(out);
                r.symbols(out);
            }
            Regex::Star(b) => b.symbols(out),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OmegaSpec {
    pub aps: Vec<String>,
    pub programs: Vec<String>,
    pub paths: usize,
    /// `(stem, loop)` pairs.
    pub pairs: Vec<(Regex, Regex)>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OmegaError {
    #[error("line {0}: {1}")]
    Syntax(usize, String),
    #[error("line {0}: regex: {1}")]
    Regex(usize, String),
    #[error("symbol has {got} components, expected {expected}")]
    Arity { expected: usize, got: usize },
    #[error("unknown atomic proposition `{0}`")]
    UnknownAp(String),
    #[error("unknown atomic program `{0}`")]
    UnknownProgram(String),
    #[error("pair {0}: the loop expression accepts the empty word")]
    EmptyLoop(usize),
    #[error("missing `{0}` line")]
    Missing(&'static str),
    #[error("the specification has no `pair:` block")]
    NoPairs,
}

struct RegexParser<'a> {
    s: &'a [u8],
    i: usize,
}

impl<'a> RegexParser<'a> {
    fn ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.i).copied()
    }

    fn err<T>(&self, msg: &str) -> Result<T, String> {
        Err(format!("{msg} at column {}", self.i + 1))
    }

    fn eat(&mut self, c: u8) -> Result<(), String> {
        if self.peek() == Some(c) {
            self.i += 1;
            Ok(())
        } else {
            self.err(&format!("expected `{}`", c as char))
        }
    }

    fn word(&mut self) -> String {
        self.ws();
        let start = self.i;
        while self.i < self.s.len() && (self.s[self.i].is_ascii_alphanumeric() || self.s[self.i] == b'_' || self.s[self.i] == b'\'') {
            self.i += 1;
        }
        String::from_utf8_lossy(&self.s[start..self.i]).into_owned()
    }

    fn alt(&mut self) -> Result<Regex, String> {
        let mut r = self.seq()?;
        while self.peek() == Some(b'+') {
            self.i += 1;
            r = Regex::Alt(Box::new(r), Box::new(self.seq()?));
        }
        Ok(r)
    }

    fn seq(&mut self) -> Result<Regex, String> {
        let mut r = self.postfix()?;
        loop {
            match self.peek() {
                Some(b';') => {
                    self.i += 1;
                    r = Regex::Cat(Box::new(r), Box::new(self.postfix()?));
                }
                Some(b'[' | b'(') | Some(b'e') => r = Regex::Cat(Box::new(r), Box::new(self.postfix()?)),
                _ => return Ok(r),
            }
        }
    }

    fn postfix(&mut self) -> Result<Regex, String> {
        let mut r = self.atom()?;
        while self.peek() == Some(b'*') {
            self.i += 1;
            r = Regex::Star(Box::new(r));
        }
        Ok(r)
    }

    fn atom(&mut self) -> Result<Regex, String> {
        match self.peek() {
            Some(b'(') => {
                self.i += 1;
                let r = self.alt()?;
                self.eat(b')')?;
                Ok(r)
            }
            Some(b'[') => self.symbol().map(Regex::Sym),
            Some(b'e') => {
                let w = self.word();
                if w == "eps" {
                    Ok(Regex::Eps)
                } else {
                    self.err(&format!("unexpected `{w}`"))
                }
            }
            Some(c) => self.err(&format!("unexpected `{}`", c as char)),
            None => self.err("unexpected end"),
        }
    }

    fn symbol(&mut self) -> Result<Symbol, String> {
        self.eat(b'[')?;
        let mut sets = Vec::new();
        loop {
            self.eat(b'{')?;
            let mut set = BTreeSet::new();
            loop {
                let w = self.word();
                if w.is_empty() {
                    break;
                }
                set.insert(w);
            }
            self.eat(b'}')?;
            sets.push(set);
            match self.peek() {
                Some(b',') => self.i += 1,
                _ => break,
            }
        }
        self.eat(b']')?;
        self.eat(b'|')?;
        self.eat(b'(')?;
        let mut progs = Vec::new();
        loop {
            let w = self.word();
            match w.as_str() {
                "" => return self.err("expected a program or `_`"),
                "_" => progs.push(None),
                _ => progs.push(Some(w)),
            }
            match self.peek() {
                Some(b',') => self.i += 1,
                _ => break,
            }
        }
        self.eat(b')')?;
        Ok(Symbol { sets, progs: TupleSym(progs) })
    }
}

/// Parses one regular expression: symbols `[{a b},{c}]|(s,t)`, `eps`,
/// union `+`, concatenation `;` or juxtaposition, postfix `*` and grouping.
pub fn parse_regex(text: &str) -> Result<Regex, String> {
    let mut p = RegexParser { s: text.as_bytes(), i: 0 };
    let r = p.alt()?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    Ok(r)
}

/// Parses a specification file:
///
/// ```text
/// aps a b
/// programs s t
/// paths 2
/// pair:
///   stem: eps
///   loop: [{a},{}]|(s,_)
/// ```
pub fn parse_omega_spec(text: &str) -> Result<OmegaSpec, OmegaError> {
    let mut aps = None;
    let mut programs = None;
    let mut paths = None;
    let mut pairs = Vec::new();
    let mut open: Option<(usize, Option<Regex>, Option<Regex>)> = None;
    let close = |open: &mut Option<(usize, Option<Regex>, Option<Regex>)>, pairs: &mut Vec<(Regex, Regex)>| match open.take() {
        Some((_, Some(s), Some(l))) => {
            pairs.push((s, l));
            Ok(())
        },
        Some((line, _, _)) => Err(OmegaError::Syntax(line, "`pair:` needs both `stem:` and `loop:`".into())),
        None => Ok(()),
    };
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, rest) = match line.split_once(|c: char| c.is_whitespace() || c == ':') {
            Some((k, r)) => (k, r.trim_start_matches(':').trim()),
            None => (line.trim_end_matches(':'), ""),
        };
        match key {
            "aps" => aps = Some(rest.split_whitespace().map(String::from).collect::<Vec<_>>()),
            "programs" => programs = Some(rest.split_whitespace().map(String::from).collect::<Vec<_>>()),
            "paths" => {
                paths = Some(rest.parse::<usize>().map_err(|_| OmegaError::Syntax(line_no, format!("bad path count `{rest}`")))?)
            }
            "pair" => {
                close(&mut open, &mut pairs)?;
                open = Some((line_no, None, None));
            }
            "stem" | "loop" => {
                let slot = open.as_mut().ok_or_else(|| OmegaError::Syntax(line_no, format!("`{key}:` outside a `pair:` block")))?;
                let r = parse_regex(rest).map_err(|e| OmegaError::Regex(line_no, e))?;
                if key == "stem" {
                    slot.1 = Some(r);
                } else {
                    slot.2 = Some(r);
                }
            }
            _ => return Err(OmegaError::Syntax(line_no, format!("unknown key `{key}`"))),
        }
    }
    close(&mut open, &mut pairs)?;
    let spec = OmegaSpec {
        aps: aps.unwrap_or_default(),
        programs: programs.ok_or(OmegaError::Missing("programs"))?,
        paths: paths.ok_or(OmegaError::Missing("paths"))?,
        pairs,
    };
    validate(&spec)?;
    Ok(spec)
}

fn validate(spec: &OmegaSpec) -> Result<(), OmegaError> {
    if spec.pairs.is_empty() {
        return Err(OmegaError::NoPairs);
    }
    for (k, (stem, lp)) in spec.pairs.iter().enumerate() {
        if lp.nullable() {
            return Err(OmegaError::EmptyLoop(k + 1));
        }
        let mut syms = Vec::new();
        stem.symbols(&mut syms);
        lp.symbols(&mut syms);
        for s in syms {
            for got in [s.sets.len(), s.progs.arity()] {
                if got != spec.paths {
                    return Err(OmegaError::Arity { expected: spec.paths, got });
                }
            }
            if let Some(a) = s.sets.iter().flatten().find(|a| !spec.aps.contains(a)) {
                return Err(OmegaError::UnknownAp(a.clone()));
            }
            if let Some(p) = s.progs.0.iter().flatten().find(|p| !spec.programs.contains(p)) {
                return Err(OmegaError::UnknownProgram(p.clone()));
            }
        }
    }
    Ok(())
}

/// `p1 .. pn`, the path variables of the compiled formula.
pub fn path_var(l: usize) -> PathVar {
    PathVar::new(format!("p{l}"), l)
}

/// `{AND_l (AND_{a in P_l} a@p_l & AND_{a not in P_l} !a@p_l)}? ; tau`.
pub fn symbol_program(s: &Symbol, aps: &[String]) -> Program {
    let literals = s.sets.iter().enumerate().flat_map(|(l, set)| {
        aps.iter().map(move |a| {
            let atom = Formula::atom(a.clone(), path_var(l + 1));
            if set.contains(a) {
                atom
            } else {
                Formula::not(atom)
            }
        })
    });
    Program::concat(Program::test(Formula::conj(literals)), Program::Tup(s.progs.clone()))
}

pub fn regex_program(r: &Regex, aps: &[String]) -> Program {
    match r {
        Regex::Eps => Program::Eps,
        Regex::Sym(s) => symbol_program(s, aps),
        Regex::Alt(l, q) => Program::sum(regex_program(l, aps), regex_program(q, aps)),
        Regex::Cat(l, q) => Program::concat(regex_program(l, aps), regex_program(q, aps)),
        Regex::Star(b) => Program::star(regex_program(b, aps)),
    }
}

pub fn compile_omega(spec: &OmegaSpec) -> Result<Formula, OmegaError> {
    validate(spec)?;
    Ok(Formula::disj(
        spec.pairs
            .iter()
            .map(|(stem, lp)| Formula::diamond(regex_program(stem, &spec.aps), Formula::Delta(regex_program(lp, &spec.aps)))),
    ))
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sets: Vec<String> = self.sets.iter().map(|s| format!("{{{}}}", s.iter().cloned().collect::<Vec<_>>().join(" "))).collect();
        let progs: Vec<&str> = self.progs.0.iter().map(|p| p.as_deref().unwrap_or("_")).collect();
        write!(f, "[{}]|({})", sets.join(","), progs.join(","))
    }
}

impl fmt::Display for Regex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Regex::Eps => write!(f, "eps"),
            Regex::Sym(s) => write!(f, "{s}"),
            Regex::Alt(l, r) => write!(f, "({l} + {r})"),
            Regex::Cat(l, r) => write!(f, "({l} ; {r})"),
            Regex::Star(b) => write!(f, "({b})*"),
        }
    }
}

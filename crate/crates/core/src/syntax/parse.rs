//! Recursive-descent parser for the ASCII formula grammar.

use std::collections::BTreeSet;

use thiserror::Error;

use super::ast::{Formula, PathVar, Program, TupleSym};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl std::fmt::Display for Pos {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("{pos}: syntax error: {msg}")]
    Syntax { pos: Pos, msg: String },
    #[error("{pos}: tuple {tuple} has arity {found} but {expected} paths are quantified here")]
    Arity { pos: Pos, tuple: String, found: usize, expected: usize },
    #[error("{pos}: path variable `{name}` is not bound")]
    Unbound { pos: Pos, name: String },
    #[error("{pos}: modality outside the scope of any path quantifier")]
    ModalityOutsideQuantifier { pos: Pos },
    #[error("{pos}: unknown atomic proposition `{name}`")]
    UnknownAp { pos: Pos, name: String },
    #[error("{pos}: unknown atomic program `{name}`")]
    UnknownProgram { pos: Pos, name: String },
}

/// Names a formula may mention. `None` leaves that namespace unchecked.
#[derive(Clone, Debug, Default)]
pub struct Vocabulary {
    pub aps: Option<BTreeSet<String>>,
    pub programs: Option<BTreeSet<String>>,
}

impl Vocabulary {
    pub fn open() -> Self {
        Vocabulary::default()
    }

    pub fn new<A, P>(aps: A, programs: P) -> Self
    where
        A: IntoIterator,
        A::Item: Into<String>,
        P: IntoIterator,
        P::Item: Into<String>,
    {
        Vocabulary {
            aps: Some(aps.into_iter().map(Into::into).collect()),
            programs: Some(programs.into_iter().map(Into::into).collect()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Wild,
    Dot,
    At,
    Bang,
    Amp,
    Pipe,
    Arrow,
    Iff,
    Lt,
    Gt,
    LBrack,
    RBrack,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Question,
    Plus,
    Semi,
    Star,
    Comma,
    Eof,
}

const KEYWORDS: &[&str] = &["exists", "forall", "true", "false", "delta", "any", "eps"];

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Eof => "end of input".into(),
        other => format!("{other:?}"),
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        let bump = |n: usize, i: &mut usize, col: &mut usize| {
            *i += n;
            *col += n;
        };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            bump(1, &mut i, &mut col);
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_alphanumeric() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'')
            {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            col += i - start;
            out.push((if word == "_" { Tok::Wild } else { Tok::Ident(word) }, pos));
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 3)].iter().collect();
        let (tok, len) = if rest.starts_with("<->") {
            (Tok::Iff, 3)
        } else if rest.starts_with("->") {
            (Tok::Arrow, 2)
        } else {
            let t = match c {
                '.' => Tok::Dot,
                '@' => Tok::At,
                '!' => Tok::Bang,
                '&' => Tok::Amp,
                '|' => Tok::Pipe,
                '<' => Tok::Lt,
                '>' => Tok::Gt,
                '[' => Tok::LBrack,
                ']' => Tok::RBrack,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '{' => Tok::LBrace,
                '}' => Tok::RBrace,
                '?' => Tok::Question,
                '+' => Tok::Plus,
                ';' => Tok::Semi,
                '*' => Tok::Star,
                ',' => Tok::Comma,
                other => {
                    return Err(ParseError::Syntax { pos, msg: format!("unexpected character `{other}`") })
                }
            };
            (t, 1)
        };
        bump(len, &mut i, &mut col);
        out.push((tok, pos));
    }
    out.push((Tok::Eof, Pos { line, col }));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    scope: Vec<String>,
    vocab: &'a Vocabulary,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn expect(&mut self, t: Tok) -> Result<(), ParseError> {
        if *self.peek() == t {
            self.next();
            Ok(())
        } else {
            Err(self.unexpected(&format!("expected {}", describe(&t))))
        }
    }

    fn unexpected(&self, ctx: &str) -> ParseError {
        ParseError::Syntax { pos: self.pos(), msg: format!("{ctx}, found {}", describe(self.peek())) }
    }

    fn ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.next();
                Ok(s)
            }
            _ => Err(self.unexpected(&format!("expected {what}"))),
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        if self.is_kw("exists") || self.is_kw("forall") {
            return self.quantifier();
        }
        let l = self.implication()?;
        if *self.peek() == Tok::Iff {
            self.next();
            let r = self.formula()?;
            let both = Formula::and(l.clone(), r.clone());
            let neither = Formula::and(Formula::not(l), Formula::not(r));
            return Ok(Formula::or(both, neither));
        }
        Ok(l)
    }

    fn quantifier(&mut self) -> Result<Formula, ParseError> {
        let universal = self.is_kw("forall");
        self.next();
        let v = self.ident("path variable")?;
        self.expect(Tok::Dot)?;
        self.scope.push(v.clone());
        let body = self.formula();
        self.scope.pop();
        let body = body?;
        Ok(if universal { Formula::forall(v, body) } else { Formula::exists(v, body) })
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let l = self.disjunction()?;
        if *self.peek() == Tok::Arrow {
            self.next();
            let r = if self.is_kw("exists") || self.is_kw("forall") {
                self.quantifier()?
            } else {
                self.implication()?
            };
            return Ok(Formula::or(Formula::not(l), r));
        }
        Ok(l)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut l = self.conjunction()?;
        while *self.peek() == Tok::Pipe {
            self.next();
            let r = self.conjunction()?;
            l = Formula::or(l, r);
        }
        Ok(l)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut l = self.unary()?;
        while *self.peek() == Tok::Amp {
            self.next();
            let r = self.unary()?;
            l = Formula::and(l, r);
        }
        Ok(l)
    }

    fn require_scope(&self, pos: Pos) -> Result<(), ParseError> {
        if self.scope.is_empty() {
            Err(ParseError::ModalityOutsideQuantifier { pos })
        } else {
            Ok(())
        }
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Bang => {
                self.next();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Lt => {
                self.next();
                self.require_scope(pos)?;
                let p = self.program()?;
                self.expect(Tok::Gt)?;
                Ok(Formula::diamond(p, self.unary()?))
            }
            Tok::LBrack => {
                self.next();
                self.require_scope(pos)?;
                let p = self.program()?;
                self.expect(Tok::RBrack)?;
                Ok(Formula::boxed(p, self.unary()?))
            }
            Tok::LParen => {
                self.next();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Ident(kw) if kw == "exists" || kw == "forall" => self.quantifier(),
            Tok::Ident(kw) if kw == "true" => {
                self.next();
                Ok(Formula::True)
            }
            Tok::Ident(kw) if kw == "false" => {
                self.next();
                Ok(Formula::False)
            }
            Tok::Ident(kw) if kw == "delta" => {
                self.next();
                self.require_scope(pos)?;
                Ok(Formula::Delta(self.postfix_program()?))
            }
            Tok::Ident(_) => {
                let ap = self.ident("atomic proposition")?;
                if let Some(aps) = &self.vocab.aps {
                    if !aps.contains(&ap) {
                        return Err(ParseError::UnknownAp { pos, name: ap });
                    }
                }
                self.expect(Tok::At)?;
                let vpos = self.pos();
                let name = self.ident("path variable")?;
                let index = self
                    .scope
                    .iter()
                    .rposition(|v| *v == name)
                    .ok_or(ParseError::Unbound { pos: vpos, name: name.clone() })?;
                Ok(Formula::atom(ap, PathVar::new(name, index + 1)))
            }
            _ => Err(self.unexpected("expected a formula")),
        }
    }

    fn program(&mut self) -> Result<Program, ParseError> {
        let mut l = self.sequence()?;
        while *self.peek() == Tok::Plus {
            self.next();
            let r = self.sequence()?;
            l = Program::sum(l, r);
        }
        Ok(l)
    }

    fn sequence(&mut self) -> Result<Program, ParseError> {
        let mut l = self.postfix_program()?;
        while *self.peek() == Tok::Semi {
            self.next();
            let r = self.postfix_program()?;
            l = Program::concat(l, r);
        }
        Ok(l)
    }

    fn postfix_program(&mut self) -> Result<Program, ParseError> {
        let mut p = self.program_atom()?;
        while *self.peek() == Tok::Star {
            self.next();
            p = Program::star(p);
        }
        Ok(p)
    }

    fn program_atom(&mut self) -> Result<Program, ParseError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Ident(kw) if kw == "any" => {
                self.next();
                Ok(Program::any(self.scope.len()))
            }
            Tok::Ident(kw) if kw == "eps" => {
                self.next();
                Ok(Program::Eps)
            }
            Tok::LBrace => {
                self.next();
                let f = self.formula()?;
                self.expect(Tok::RBrace)?;
                self.expect(Tok::Question)?;
                Ok(Program::test(f))
            }
            Tok::LParen => {
                self.next();
                let is_tuple = match self.peek() {
                    Tok::Wild => true,
                    Tok::Ident(s) => !KEYWORDS.contains(&s.as_str()),
                    _ => false,
                };
                if is_tuple {
                    self.tuple(pos)
                } else {
                    let p = self.program()?;
                    self.expect(Tok::RParen)?;
                    Ok(p)
                }
            }
            _ => Err(self.unexpected("expected a program")),
        }
    }

    fn tuple(&mut self, pos: Pos) -> Result<Program, ParseError> {
        let mut entries = Vec::new();
        loop {
            let epos = self.pos();
            match self.next() {
                Tok::Wild => entries.push(None),
                Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                    if let Some(progs) = &self.vocab.programs {
                        if !progs.contains(&s) {
                            return Err(ParseError::UnknownProgram { pos: epos, name: s });
                        }
                    }
                    entries.push(Some(s));
                }
                _ => {
                    self.at -= 1;
                    return Err(self.unexpected("expected an atomic program or `_`"));
                }
            }
            match self.next() {
                Tok::Comma => continue,
                Tok::RParen => break,
                _ => {
                    self.at -= 1;
                    return Err(self.unexpected("expected `,` or `)`"));
                }
            }
        }
        let t = TupleSym(entries);
        if t.arity() != self.scope.len() {
            return Err(ParseError::Arity {
                pos,
                tuple: t.to_string(),
                found: t.arity(),
                expected: self.scope.len(),
            });
        }
        Ok(Program::Tup(t))
    }
}

/// Parses a closed formula. Atoms and programs are checked against `vocab`.
pub fn parse_formula(text: &str, vocab: &Vocabulary) -> Result<Formula, ParseError> {
    parse_with_scope(text, vocab, &[])
}

/// Parses a formula whose free path variables are `scope` (outermost first).
pub fn parse_with_scope(text: &str, vocab: &Vocabulary, scope: &[&str]) -> Result<Formula, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        at: 0,
        scope: scope.iter().map(|s| s.to_string()).collect(),
        vocab,
    };
    let f = p.formula()?;
    if *p.peek() != Tok::Eof {
        return Err(p.unexpected("expected end of input"));
    }
    Ok(f)
}

/// Parses a program in a scope of `scope.len()` quantified paths.
pub fn parse_program(text: &str, vocab: &Vocabulary, scope: &[&str]) -> Result<Program, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        at: 0,
        scope: scope.iter().map(|s| s.to_string()).collect(),
        vocab,
    };
    let prog = p.program()?;
    if *p.peek() != Tok::Eof {
        return Err(p.unexpected("expected end of input"));
    }
    Ok(prog)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<Formula, ParseError> {
        parse_formula(s, &Vocabulary::open())
    }

    #[test]
    fn minimal_closed_formula() {
        assert_eq!(
            parse("exists p1. a@p1").unwrap(),
            Formula::exists("p1", Formula::atom("a", PathVar::new("p1", 1)))
        );
    }

    #[test]
    fn iff_is_desugared_under_box() {
        let f = parse("forall p1. forall p2. [ any* ] (a@p1 <-> a@p2)").unwrap();
        let a1 = Formula::atom("a", PathVar::new("p1", 1));
        let a2 = Formula::atom("a", PathVar::new("p2", 2));
        let body = Formula::or(
            Formula::and(a1.clone(), a2.clone()),
            Formula::and(Formula::not(a1), Formula::not(a2)),
        );
        let expect = Formula::forall(
            "p1",
            Formula::forall("p2", Formula::boxed(Program::star(Program::any(2)), body)),
        );
        assert_eq!(f, expect);
    }

    #[test]
    fn arity_mismatch() {
        let e = parse("exists p1. <(s,s)> true").unwrap_err();
        assert!(matches!(e, ParseError::Arity { found: 2, expected: 1, .. }), "{e}");
    }

    #[test]
    fn unbound_and_outside_scope() {
        assert!(matches!(parse("exists p. a@q"), Err(ParseError::Unbound { .. })));
        assert!(matches!(parse("<any> true"), Err(ParseError::ModalityOutsideQuantifier { .. })));
        assert!(matches!(parse("delta any"), Err(ParseError::ModalityOutsideQuantifier { .. })));
    }

    #[test]
    fn quantifier_body_extends_right() {
        let f = parse("exists p. a@p & b@p | c@p").unwrap();
        assert!(matches!(f, Formula::Exists(_, ref b) if matches!(**b, Formula::Or(..))));
    }

    #[test]
    fn precedence_and_over_or_and_implication() {
        let f = parse("exists p. a@p | b@p & c@p -> d@p").unwrap();
        let Formula::Exists(_, body) = f else { panic!() };
        let Formula::Or(l, _) = *body else { panic!() };
        assert!(matches!(*l, Formula::Not(ref x) if matches!(**x, Formula::Or(..))));
    }

    #[test]
    fn shadowing_binds_innermost() {
        let f = parse("exists p. exists p. a@p").unwrap();
        let Formula::Exists(_, b) = f else { panic!() };
        let Formula::Exists(_, b) = *b else { panic!() };
        assert_eq!(*b, Formula::atom("a", PathVar::new("p", 2)));
    }

    #[test]
    fn vocabulary_checked() {
        let v = Vocabulary::new(["a"], ["s"]);
        assert!(parse_formula("exists p. <(s)> a@p", &v).is_ok());
        assert!(matches!(parse_formula("exists p. b@p", &v), Err(ParseError::UnknownAp { .. })));
        assert!(matches!(
            parse_formula("exists p. <(t)> a@p", &v),
            Err(ParseError::UnknownProgram { .. })
        ));
    }

    #[test]
    fn syntax_error_reports_position() {
        let e = parse("exists p.\n  a@p &").unwrap_err();
        match e {
            ParseError::Syntax { pos, .. } => assert_eq!(pos.line, 2),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn parenthesised_programs_and_tests() {
        let f = parse("exists p. <({a@p}? ; any)*> b@p").unwrap();
        let Formula::Exists(_, b) = f else { panic!() };
        let Formula::Diamond(Program::Star(inner), _) = *b else { panic!() };
        assert!(matches!(*inner, Program::Concat(..)));
    }
}

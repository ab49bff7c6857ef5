//! Concrete syntax: lexing, parsing and printing.
//!
//! ```text
//! formula  ::= unary ('->' formula)?
//! unary    ::= '#' unary | atom | '(' formula ')'
//! term     ::= '\' x ':' formula '.' term
//!            | 'let' x1,...,xn '=' N1,...,Nn 'in' term
//!            | atom+ [lambda | let]
//! sequent  ::= entries '|-' (term ':' formula | formula)
//! ```

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arena::VertexId;
use crate::games::{Move, Strategy, View};
use crate::syntax::{canonicalize_avoiding, Formula, Term, TypingContext};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    ArityMismatch,
    DuplicateVariable,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{message} at {}..{}{}", span.start, span.end, expected_suffix(expected))]
pub struct ParseError {
    pub span: SourceSpan,
    pub message: String,
    pub expected: Vec<String>,
    pub kind: ParseErrorKind,
}

fn expected_suffix(expected: &[String]) -> String {
    if expected.is_empty() {
        String::new()
    } else {
        format!(" (expected {})", expected.join(" or "))
    }
}

impl ParseError {
    /// Renders the error with a caret line under the offending input.
    pub fn render(&self, input: &str) -> String {
        let start = input[..self.span.start.min(input.len())].chars().count();
        let width = input
            .get(self.span.start..self.span.end)
            .map(|s| s.chars().count())
            .unwrap_or(0)
            .max(1);
        format!("error: {self}\n  {input}\n  {}{}", " ".repeat(start), "^".repeat(width))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Hash,
    Arrow,
    LParen,
    RParen,
    Lambda,
    Colon,
    Dot,
    Comma,
    Eq,
    Turnstile,
    Let,
    In,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(x) => format!("identifier `{x}`"),
            Tok::Hash => "`#`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Lambda => "`\\`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Turnstile => "`|-`".into(),
            Tok::Let => "`let`".into(),
            Tok::In => "`in`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

fn syntax_err(start: usize, end: usize, message: impl Into<String>, expected: &[&str]) -> ParseError {
    ParseError {
        span: SourceSpan { start, end },
        message: message.into(),
        expected: expected.iter().map(|s| s.to_string()).collect(),
        kind: ParseErrorKind::Syntax,
    }
}

fn lex(input: &str) -> Result<Vec<(Tok, SourceSpan)>, ParseError> {
    let mut out = Vec::new();
    let mut it = input.char_indices().peekable();
    while let Some(&(i, c)) = it.peek() {
        let single = |t: Tok| (t, SourceSpan { start: i, end: i + c.len_utf8() });
        match c {
            c if c.is_whitespace() => {
                it.next();
            }
            '#' | '□' => {
                out.push(single(Tok::Hash));
                it.next();
            }
            '→' => {
                out.push(single(Tok::Arrow));
                it.next();
            }
            '⊢' => {
                out.push(single(Tok::Turnstile));
                it.next();
            }
            '\\' | 'λ' => {
                out.push(single(Tok::Lambda));
                it.next();
            }
            '(' => {
                out.push(single(Tok::LParen));
                it.next();
            }
            ')' => {
                out.push(single(Tok::RParen));
                it.next();
            }
            ':' => {
                out.push(single(Tok::Colon));
                it.next();
            }
            '.' => {
                out.push(single(Tok::Dot));
                it.next();
            }
            ',' => {
                out.push(single(Tok::Comma));
                it.next();
            }
            '=' => {
                out.push(single(Tok::Eq));
                it.next();
            }
            '-' => {
                it.next();
                match it.peek() {
                    Some(&(_, '>')) => {
                        it.next();
                        out.push((Tok::Arrow, SourceSpan { start: i, end: i + 2 }));
                    }
                    _ => return Err(syntax_err(i, i + 1, "stray `-`", &["`->`"])),
                }
            }
            '|' => {
                it.next();
                match it.peek() {
                    Some(&(_, '-')) => {
                        it.next();
                        out.push((Tok::Turnstile, SourceSpan { start: i, end: i + 2 }));
                    }
                    _ => return Err(syntax_err(i, i + 1, "stray `|`", &["`|-`"])),
                }
            }
            '⋄' | '◇' => {
                return Err(syntax_err(
                    i,
                    i + c.len_utf8(),
                    "the diamond modality is not supported",
                    &[],
                ))
            }
            c if c.is_ascii_lowercase() => {
                let mut end = i;
                while let Some(&(j, d)) = it.peek() {
                    if d.is_ascii_alphanumeric() || d == '_' {
                        end = j + 1;
                        it.next();
                    } else {
                        break;
                    }
                }
                let word = &input[i..end];
                let tok = match word {
                    "let" => Tok::Let,
                    "in" => Tok::In,
                    _ => Tok::Ident(word.to_string()),
                };
                out.push((tok, SourceSpan { start: i, end }));
            }
            _ => {
                return Err(syntax_err(
                    i,
                    i + c.len_utf8(),
                    format!("unexpected character `{c}`"),
                    &[],
                ))
            }
        }
    }
    out.push((Tok::Eof, SourceSpan { start: input.len(), end: input.len() }));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, SourceSpan)>,
    pos: usize,
}

impl Parser {
    fn new(input: &str) -> Result<Parser, ParseError> {
        Ok(Parser { toks: lex(input)?, pos: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].0
    }

    fn span(&self) -> SourceSpan {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, expected: &[&str]) -> ParseError {
        let s = self.span();
        syntax_err(s.start, s.end, format!("unexpected {}", self.peek().describe()), expected)
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&[what]))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(x) => {
                self.bump();
                Ok(x)
            }
            _ => Err(self.unexpected(&["identifier"])),
        }
    }

    fn eof(&self) -> Result<(), ParseError> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(self.unexpected(&["end of input"]))
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.unary()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.formula()?;
            Ok(Formula::arrow(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Hash => {
                self.bump();
                Ok(Formula::boxed(self.unary()?))
            }
            Tok::Ident(a) => {
                self.bump();
                Ok(Formula::Atom(a))
            }
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            _ => Err(self.unexpected(&["atom", "`#`", "`(`"])),
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        match self.peek() {
            Tok::Lambda => self.lambda(),
            Tok::Let => self.let_term(),
            _ => self.application(),
        }
    }

    fn lambda(&mut self) -> Result<Term, ParseError> {
        self.expect(Tok::Lambda, "`\\`")?;
        let x = self.ident()?;
        self.expect(Tok::Colon, "`:`")?;
        let ann = self.formula()?;
        self.expect(Tok::Dot, "`.`")?;
        let body = self.term()?;
        Ok(Term::Abs(x, ann, Box::new(body)))
    }

    fn let_term(&mut self) -> Result<Term, ParseError> {
        let start = self.span().start;
        self.expect(Tok::Let, "`let`")?;
        let mut binders: Vec<(String, SourceSpan)> = Vec::new();
        let mut bounds = Vec::new();
        if *self.peek() != Tok::In {
            loop {
                let sp = self.span();
                binders.push((self.ident()?, sp));
                if *self.peek() == Tok::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
            for (i, (x, sp)) in binders.iter().enumerate() {
                if binders[..i].iter().any(|(y, _)| y == x) {
                    return Err(ParseError {
                        span: *sp,
                        message: format!("binder `{x}` repeated in let"),
                        expected: vec![],
                        kind: ParseErrorKind::DuplicateVariable,
                    });
                }
            }
            self.expect(Tok::Eq, "`=`")?;
            loop {
                bounds.push(self.term()?);
                if *self.peek() == Tok::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        let end = self.span().start;
        if binders.len() != bounds.len() {
            return Err(ParseError {
                span: SourceSpan { start, end },
                message: format!(
                    "let binds {} variables to {} terms",
                    binders.len(),
                    bounds.len()
                ),
                expected: vec![],
                kind: ParseErrorKind::ArityMismatch,
            });
        }
        self.expect(Tok::In, "`in`")?;
        let body = self.term()?;
        Ok(Term::boxsubst(
            body,
            binders.into_iter().map(|(x, _)| x).zip(bounds).collect(),
        ))
    }

    fn application(&mut self) -> Result<Term, ParseError> {
        let mut t = self.atom_term()?;
        loop {
            match self.peek() {
                Tok::Ident(_) | Tok::LParen => {
                    let a = self.atom_term()?;
                    t = Term::app(t, a);
                }
                Tok::Lambda | Tok::Let => {
                    let a = self.term()?;
                    return Ok(Term::app(t, a));
                }
                _ => return Ok(t),
            }
        }
    }

    fn atom_term(&mut self) -> Result<Term, ParseError> {
        match self.peek().clone() {
            Tok::Ident(x) => {
                self.bump();
                Ok(Term::Var(x))
            }
            Tok::LParen => {
                self.bump();
                let t = self.term()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(t)
            }
            _ => Err(self.unexpected(&["variable", "`(`", "`\\`", "`let`"])),
        }
    }
}

pub fn parse_formula(input: &str) -> Result<Formula, ParseError> {
    let mut p = Parser::new(input)?;
    let f = p.formula()?;
    p.eof()?;
    Ok(f)
}

/// Parses a term and puts it in canonical form.
pub fn parse_term(input: &str) -> Result<Term, ParseError> {
    let mut p = Parser::new(input)?;
    let t = p.term()?;
    p.eof()?;
    Ok(crate::syntax::canonicalize(&t))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParsedSequent {
    pub context: TypingContext,
    pub term: Option<Term>,
    pub goal: Formula,
}

/// Parses `x1:F1, ..., xn:Fn |- M : F` or `F1, ..., Fn |- F`.
/// Unnamed entries at position i are called `v{i+1}`.
pub fn parse_sequent(input: &str) -> Result<ParsedSequent, ParseError> {
    let mut p = Parser::new(input)?;
    let mut decls: Vec<(String, Formula, SourceSpan)> = Vec::new();
    if *p.peek() != Tok::Turnstile {
        loop {
            let sp = p.span();
            let named = matches!(p.peek(), Tok::Ident(_)) && *p.peek_at(1) == Tok::Colon;
            if named {
                let x = p.ident()?;
                p.bump();
                let f = p.formula()?;
                decls.push((x, f, sp));
            } else {
                let f = p.formula()?;
                decls.push((format!("v{}", decls.len() + 1), f, sp));
            }
            if *p.peek() == Tok::Comma {
                p.bump();
            } else {
                break;
            }
        }
    }
    p.expect(Tok::Turnstile, "`|-`")?;
    for (i, (x, _, sp)) in decls.iter().enumerate() {
        if decls[..i].iter().any(|(y, _, _)| y == x) {
            return Err(ParseError {
                span: *sp,
                message: format!("variable `{x}` declared twice"),
                expected: vec![],
                kind: ParseErrorKind::DuplicateVariable,
            });
        }
    }
    let context =
        TypingContext::from_decls(decls.into_iter().map(|(x, f, _)| (x, f)).collect()).unwrap();
    let mark = p.pos;
    let as_assignment = (|| {
        let t = p.term()?;
        p.expect(Tok::Colon, "`:`")?;
        let f = p.formula()?;
        p.eof()?;
        Ok::<_, ParseError>((t, f))
    })();
    match as_assignment {
        Ok((t, goal)) => Ok(ParsedSequent {
            term: Some(canonicalize_avoiding(&t, &context.names())),
            context,
            goal,
        }),
        Err(e1) => {
            let far1 = p.pos;
            p.pos = mark;
            match p.formula().and_then(|f| p.eof().map(|_| f)) {
                Ok(goal) => Ok(ParsedSequent { context, term: None, goal }),
                Err(e2) => Err(if far1 >= p.pos { e1 } else { e2 }),
            }
        }
    }
}

pub fn print_formula(f: &Formula) -> String {
    match f {
        Formula::Atom(a) => a.clone(),
        Formula::Box(b) => format!("#{}", print_unary(b)),
        Formula::Arrow(d, c) => {
            let dom = if d.is_arrow() { format!("({})", print_formula(d)) } else { print_formula(d) };
            format!("{dom} -> {}", print_formula(c))
        }
    }
}

fn print_unary(f: &Formula) -> String {
    if f.is_arrow() {
        format!("({})", print_formula(f))
    } else {
        print_formula(f)
    }
}

pub fn print_term(t: &Term) -> String {
    match t {
        Term::Var(x) => x.clone(),
        Term::Abs(x, a, b) => format!("\\{x}:{}. {}", print_formula(a), print_term(b)),
        Term::App(f, a) => {
            let fs = match **f {
                Term::Abs(..) | Term::BoxSubst(..) => format!("({})", print_term(f)),
                _ => print_term(f),
            };
            let as_ = match **a {
                Term::Var(_) => print_term(a),
                _ => format!("({})", print_term(a)),
            };
            format!("{fs} {as_}")
        }
        Term::BoxSubst(m, bs) => {
            if bs.is_empty() {
                return format!("let in {}", print_term(m));
            }
            let binders: Vec<&str> = bs.iter().map(|b| b.binder.as_str()).collect();
            let bounds: Vec<String> = bs
                .iter()
                .map(|b| match b.bound {
                    Term::Abs(..) | Term::BoxSubst(..) => format!("({})", print_term(&b.bound)),
                    _ => print_term(&b.bound),
                })
                .collect();
            format!("let {} = {} in {}", binders.join(","), bounds.join(","), print_term(m))
        }
    }
}

pub fn print_context(c: &TypingContext) -> String {
    c.decls()
        .iter()
        .map(|(x, f)| format!("{x}:{}", print_formula(f)))
        .collect::<Vec<_>>()
        .join(", ")
}

pub fn print_assignment(c: &TypingContext, t: &Term, f: &Formula) -> String {
    let ctx = print_context(c);
    if ctx.is_empty() {
        format!("|- {} : {}", print_term(t), print_formula(f))
    } else {
        format!("{ctx} |- {} : {}", print_term(t), print_formula(f))
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_formula(self))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_term(self))
    }
}

#[derive(Serialize, Deserialize)]
struct MoveDoc {
    vertex: String,
    pointer: Option<usize>,
}

/// Version stamp of the arena and strategy json documents.
pub const JSON_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct StrategyDoc {
    #[serde(default = "default_version")]
    version: u32,
    arena_formula: String,
    views: Vec<Vec<MoveDoc>>,
}

fn default_version() -> u32 {
    JSON_VERSION
}

#[derive(Debug, Error)]
pub enum StrategyFormatError {
    #[error("unsupported strategy json version {0}")]
    Version(u32),
    #[error("malformed strategy json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("bad arena formula: {0}")]
    Formula(#[from] ParseError),
}

/// Strategy json: `{version, arena_formula, views: [[{vertex, pointer|null}]]}`, views sorted.
pub fn strategy_to_json(arena_formula: &Formula, s: &Strategy) -> String {
    let doc = StrategyDoc {
        version: JSON_VERSION,
        arena_formula: print_formula(arena_formula),
        views: s
            .views
            .iter()
            .map(|v| {
                v.moves
                    .iter()
                    .map(|m| MoveDoc { vertex: m.vertex.0.clone(), pointer: m.pointer })
                    .collect()
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("strategy serializes")
}

pub fn strategy_from_json(input: &str) -> Result<(Formula, Strategy), StrategyFormatError> {
    let doc: StrategyDoc = serde_json::from_str(input)?;
    if doc.version != JSON_VERSION {
        return Err(StrategyFormatError::Version(doc.version));
    }
    let f = parse_formula(&doc.arena_formula)?;
    let views = doc
        .views
        .into_iter()
        .map(|v| View {
            moves: v
                .into_iter()
                .map(|m| Move { vertex: VertexId(m.vertex), pointer: m.pointer })
                .collect(),
        })
        .collect();
    Ok((f, Strategy { views }))
}

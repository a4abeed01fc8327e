//! Lexer and parser for the surface language.
//!
//! ```text
//! file   := { "import" path | decl }
//! decl   := "def" name binders [":" term] ":=" term
//!         | "axiom" name binders ":" term
//!         | "postulate" name binders ":" term string
//!         | ("wsusp" | "trunc") name { "(" name ":=" term ")" } ["at" "levels" nat+]
//! term   := ("Pi" | "Sigma") binders "->" term
//!         | "fun" names "=>" term
//!         | app ["->" term]
//! app    := (atom | keyword-form) atom*
//! ```

use std::fmt;

use crate::print::is_ident_char;
use crate::syntax::Span;

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Ident(String),
    Universe(u32),
    Nat(u32),
    Str(String),
    Splice(String),
    LParen,
    RParen,
    Colon,
    Define,
    FatArrow,
    Arrow,
    Underscore,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Universe(l) => write!(f, "`U{l}`"),
            Tok::Nat(n) => write!(f, "`{n}`"),
            Tok::Str(_) => f.write_str("string literal"),
            Tok::Splice(s) => write!(f, "`${s}`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Define => f.write_str("`:=`"),
            Tok::FatArrow => f.write_str("`=>`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::Underscore => f.write_str("`_`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntaxError {
    pub span: Span,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

pub fn lex(text: &str, file: u32) -> (Vec<Token>, Vec<SyntaxError>) {
    let mut out = Vec::new();
    let mut errors = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0usize, 1u32, 1u32);
    macro_rules! bump {
        () => {{
            if chars[i] == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            i += 1;
        }};
    }
    while i < chars.len() {
        let c = chars[i];
        let start = (line, col);
        if c.is_whitespace() {
            bump!();
            continue;
        }
        if c == '-' && chars.get(i + 1) == Some(&'-') {
            while i < chars.len() && chars[i] != '\n' {
                bump!();
            }
            continue;
        }
        if c == '{' && chars.get(i + 1) == Some(&'-') {
            let mut depth = 0usize;
            loop {
                if i >= chars.len() {
                    errors.push(SyntaxError {
                        span: Span::new(file, start, (line, col)),
                        message: "unterminated block comment".into(),
                    });
                    break;
                }
                if chars[i] == '{' && chars.get(i + 1) == Some(&'-') {
                    depth += 1;
                    bump!();
                    bump!();
                } else if chars[i] == '-' && chars.get(i + 1) == Some(&'}') {
                    depth -= 1;
                    bump!();
                    bump!();
                    if depth == 0 {
                        break;
                    }
                } else {
                    bump!();
                }
            }
            continue;
        }
        let tok = match c {
            '(' => {
                bump!();
                Tok::LParen
            }
            ')' => {
                bump!();
                Tok::RParen
            }
            ':' if chars.get(i + 1) == Some(&'=') => {
                bump!();
                bump!();
                Tok::Define
            }
            ':' => {
                bump!();
                Tok::Colon
            }
            '=' if chars.get(i + 1) == Some(&'>') => {
                bump!();
                bump!();
                Tok::FatArrow
            }
            '-' if chars.get(i + 1) == Some(&'>') => {
                bump!();
                bump!();
                Tok::Arrow
            }
            '"' => {
                bump!();
                let mut s = String::new();
                let mut closed = false;
                while i < chars.len() {
                    let d = chars[i];
                    bump!();
                    if d == '"' {
                        closed = true;
                        break;
                    }
                    s.push(d);
                }
                if !closed {
                    errors.push(SyntaxError {
                        span: Span::new(file, start, (line, col)),
                        message: "unterminated string literal".into(),
                    });
                }
                Tok::Str(s)
            }
            '$' => {
                bump!();
                let mut s = String::new();
                while i < chars.len() && is_ident_char(chars[i]) && !is_arrow_at(&chars, i) {
                    s.push(chars[i]);
                    bump!();
                }
                Tok::Splice(s)
            }
            d if d.is_ascii_digit() => {
                let mut s = String::new();
                while i < chars.len() && chars[i].is_ascii_digit() {
                    s.push(chars[i]);
                    bump!();
                }
                match s.parse() {
                    Ok(n) => Tok::Nat(n),
                    Err(_) => {
                        errors.push(SyntaxError {
                            span: Span::new(file, start, (line, col)),
                            message: "number literal too large".into(),
                        });
                        continue;
                    }
                }
            }
            d if d.is_alphabetic() || d == '_' => {
                let mut s = String::new();
                while i < chars.len() && is_ident_char(chars[i]) && !is_arrow_at(&chars, i) {
                    s.push(chars[i]);
                    bump!();
                }
                if s == "_" {
                    Tok::Underscore
                } else if crate::print::is_universe_token(&s) {
                    match s[1..].parse() {
                        Ok(l) => Tok::Universe(l),
                        Err(_) => {
                            errors.push(SyntaxError {
                                span: Span::new(file, start, (line, col)),
                                message: "universe level too large".into(),
                            });
                            continue;
                        }
                    }
                } else {
                    Tok::Ident(s)
                }
            }
            other => {
                bump!();
                errors.push(SyntaxError {
                    span: Span::new(file, start, (line, col)),
                    message: format!("unexpected character `{}`", other.escape_debug()),
                });
                continue;
            }
        };
        out.push(Token {
            tok,
            span: Span::new(file, start, (line, col)),
        });
    }
    out.push(Token {
        tok: Tok::Eof,
        span: Span::new(file, (line, col), (line, col)),
    });
    (out, errors)
}

/// `-` starts an arrow or a comment rather than continuing an identifier.
fn is_arrow_at(chars: &[char], i: usize) -> bool {
    chars[i] == '-' && matches!(chars.get(i + 1), Some('>') | Some('-'))
}

#[derive(Debug, Clone)]
pub struct STerm {
    pub kind: SKind,
    pub span: Span,
}

/// A binder group `(x y : A)`; `None` names are anonymous.
pub type Group = (Vec<Option<String>>, STerm);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElimKind {
    Unit,
    Bool,
    Empty,
    Sigma,
}

#[derive(Debug, Clone)]
pub enum SKind {
    Name(String),
    Splice(String),
    Universe(u32),
    Pi(Vec<Group>, Box<STerm>),
    Sigma(Vec<Group>, Box<STerm>),
    Arrow(Box<STerm>, Box<STerm>),
    Lam(Vec<Option<String>>, Box<STerm>),
    App(Box<STerm>, Box<STerm>),
    Pair(Box<STerm>, Box<STerm>),
    Fst(Box<STerm>),
    Snd(Box<STerm>),
    Id(Box<STerm>, Box<STerm>, Box<STerm>),
    Refl(Box<STerm>, Box<STerm>),
    J(Vec<STerm>),
    Elim(ElimKind, Vec<STerm>),
    UnitTy,
    UnitVal,
    BoolTy,
    BoolTrue,
    BoolFalse,
    EmptyTy,
}

#[derive(Debug, Clone)]
pub enum SDecl {
    Def {
        name: String,
        params: Vec<Group>,
        ty: Option<STerm>,
        body: STerm,
    },
    Axiom {
        name: String,
        params: Vec<Group>,
        ty: STerm,
    },
    Postulate {
        name: String,
        params: Vec<Group>,
        ty: STerm,
        marker: String,
    },
    Schema {
        keyword: String,
        name: String,
        args: Vec<(String, STerm)>,
        levels: Option<Vec<u32>>,
    },
}

impl SDecl {
    pub fn name(&self) -> &str {
        match self {
            SDecl::Def { name, .. }
            | SDecl::Axiom { name, .. }
            | SDecl::Postulate { name, .. }
            | SDecl::Schema { name, .. } => name,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct SurfaceFile {
    pub imports: Vec<(String, Span)>,
    pub decls: Vec<(SDecl, Span)>,
    pub errors: Vec<SyntaxError>,
}

const DECL_KEYWORDS: &[&str] = &["def", "axiom", "postulate", "wsusp", "trunc", "import"];
const MAX_DEPTH: usize = 256;

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    allow_splices: bool,
    depth: usize,
}

type PResult<T> = Result<T, SyntaxError>;

impl Parser {
    fn new(toks: Vec<Token>, allow_splices: bool) -> Self {
        Parser {
            toks,
            pos: 0,
            allow_splices,
            depth: 0,
        }
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn prev_span(&self) -> Span {
        self.toks[self.pos.saturating_sub(1)].span
    }

    fn advance(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, expected: &str) -> PResult<T> {
        Err(SyntaxError {
            span: self.span(),
            message: format!("expected {expected}, found {}", self.peek()),
        })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> PResult<Span> {
        if *self.peek() == tok {
            Ok(self.advance().span)
        } else {
            self.error(what)
        }
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn ident(&mut self, what: &str) -> PResult<String> {
        match self.peek() {
            Tok::Ident(s) if !crate::print::is_keyword(s) => {
                let s = s.clone();
                self.advance();
                Ok(s)
            }
            _ => self.error(what),
        }
    }

    fn binder_name(&mut self) -> PResult<Option<String>> {
        if *self.peek() == Tok::Underscore {
            self.advance();
            return Ok(None);
        }
        self.ident("a binder name").map(Some)
    }

    fn file(&mut self) -> SurfaceFile {
        let mut f = SurfaceFile::default();
        while *self.peek() != Tok::Eof {
            let start = self.span();
            let res = if self.is_kw("import") {
                self.advance();
                match self.peek().clone() {
                    Tok::Ident(p) => {
                        self.advance();
                        f.imports.push((p, start.join(self.prev_span())));
                        Ok(())
                    }
                    _ => self.error("an import path"),
                }
            } else {
                self.decl().map(|d| f.decls.push((d, start.join(self.prev_span()))))
            };
            if let Err(e) = res {
                f.errors.push(e);
                self.recover();
            }
        }
        f
    }

    /// Skips to the next declaration keyword.
    fn recover(&mut self) {
        self.advance();
        while *self.peek() != Tok::Eof
            && !DECL_KEYWORDS.iter().any(|k| self.is_kw(k))
        {
            self.advance();
        }
    }

    fn decl(&mut self) -> PResult<SDecl> {
        let Tok::Ident(kw) = self.peek().clone() else {
            return self.error("a declaration");
        };
        match kw.as_str() {
            "def" => {
                self.advance();
                let name = self.ident("a declaration name")?;
                let params = self.groups(false)?;
                let ty = if *self.peek() == Tok::Colon {
                    self.advance();
                    Some(self.term()?)
                } else {
                    None
                };
                self.expect(Tok::Define, "`:=`")?;
                let body = self.term()?;
                Ok(SDecl::Def {
                    name,
                    params,
                    ty,
                    body,
                })
            }
            "axiom" | "postulate" => {
                self.advance();
                let name = self.ident("a declaration name")?;
                let params = self.groups(false)?;
                self.expect(Tok::Colon, "`:`")?;
                let ty = self.term()?;
                if kw == "axiom" {
                    return Ok(SDecl::Axiom { name, params, ty });
                }
                match self.peek().clone() {
                    Tok::Str(marker) if !marker.trim().is_empty() => {
                        self.advance();
                        Ok(SDecl::Postulate {
                            name,
                            params,
                            ty,
                            marker,
                        })
                    }
                    Tok::Str(_) => Err(SyntaxError {
                        span: self.span(),
                        message: "postulate marker must not be empty".into(),
                    }),
                    _ => self.error("a postulate marker string"),
                }
            }
            "wsusp" | "trunc" => {
                self.advance();
                let name = self.ident("a type name")?;
                let mut args = Vec::new();
                while *self.peek() == Tok::LParen {
                    self.advance();
                    let key = self.ident("a schema parameter name")?;
                    self.expect(Tok::Define, "`:=`")?;
                    let val = self.term()?;
                    self.expect(Tok::RParen, "`)`")?;
                    args.push((key, val));
                }
                let levels = if self.is_kw("at") {
                    self.advance();
                    if !self.is_kw("levels") {
                        return self.error("`levels`");
                    }
                    self.advance();
                    let mut ls = Vec::new();
                    while let Tok::Nat(n) = *self.peek() {
                        ls.push(n);
                        self.advance();
                    }
                    if ls.is_empty() {
                        return self.error("a universe level");
                    }
                    Some(ls)
                } else {
                    None
                };
                Ok(SDecl::Schema {
                    keyword: kw,
                    name,
                    args,
                    levels,
                })
            }
            _ => self.error("a declaration"),
        }
    }

    /// `(x y : A) (z : B) ...`; with `required`, at least one group.
    fn groups(&mut self, required: bool) -> PResult<Vec<Group>> {
        let mut gs = Vec::new();
        while *self.peek() == Tok::LParen {
            self.advance();
            let mut names = vec![self.binder_name()?];
            while *self.peek() != Tok::Colon {
                names.push(self.binder_name()?);
            }
            self.advance();
            let ty = self.term()?;
            self.expect(Tok::RParen, "`)`")?;
            gs.push((names, ty));
        }
        if required && gs.is_empty() {
            return self.error("a binder `(x : A)`");
        }
        Ok(gs)
    }

    pub fn term(&mut self) -> PResult<STerm> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            self.depth -= 1;
            return Err(SyntaxError {
                span: self.span(),
                message: "term nested too deeply".into(),
            });
        }
        let r = self.term_inner();
        self.depth -= 1;
        r
    }

    fn term_inner(&mut self) -> PResult<STerm> {
        let start = self.span();
        if self.is_kw("Pi") || self.is_kw("Sigma") {
            let pi = self.is_kw("Pi");
            self.advance();
            let gs = self.groups(true)?;
            self.expect(Tok::Arrow, "`->`")?;
            let body = Box::new(self.term()?);
            let span = start.join(body.span);
            let kind = if pi { SKind::Pi(gs, body) } else { SKind::Sigma(gs, body) };
            return Ok(STerm { kind, span });
        }
        if self.is_kw("fun") {
            self.advance();
            let mut names = vec![self.binder_name()?];
            while *self.peek() != Tok::FatArrow {
                names.push(self.binder_name()?);
            }
            self.advance();
            let body = Box::new(self.term()?);
            let span = start.join(body.span);
            return Ok(STerm {
                kind: SKind::Lam(names, body),
                span,
            });
        }
        let lhs = self.app()?;
        if *self.peek() == Tok::Arrow {
            self.advance();
            let rhs = self.term()?;
            let span = lhs.span.join(rhs.span);
            return Ok(STerm {
                kind: SKind::Arrow(Box::new(lhs), Box::new(rhs)),
                span,
            });
        }
        Ok(lhs)
    }

    fn app(&mut self) -> PResult<STerm> {
        let mut head = self.head()?;
        while self.starts_atom() {
            let arg = self.atom()?;
            let span = head.span.join(arg.span);
            head = STerm {
                kind: SKind::App(Box::new(head), Box::new(arg)),
                span,
            };
        }
        Ok(head)
    }

    fn starts_atom(&self) -> bool {
        match self.peek() {
            Tok::Ident(s) => {
                !crate::print::is_keyword(s)
                    || matches!(
                        s.as_str(),
                        "Unit" | "tt" | "Bool" | "true" | "false" | "Empty"
                    )
            }
            Tok::Universe(_) | Tok::LParen | Tok::Splice(_) => true,
            _ => false,
        }
    }

    fn atoms(&mut self, n: usize) -> PResult<Vec<STerm>> {
        (0..n).map(|_| self.atom()).collect()
    }

    fn head(&mut self) -> PResult<STerm> {
        let start = self.span();
        let Tok::Ident(kw) = self.peek().clone() else {
            return self.atom();
        };
        let b = Box::new;
        let kind = match kw.as_str() {
            "pair" | "Id" | "refl" | "J" | "fst" | "snd" => {
                self.advance();
                let n = match kw.as_str() {
                    "fst" | "snd" => 1,
                    "pair" | "refl" => 2,
                    "Id" => 3,
                    _ => 5,
                };
                let mut a = self.atoms(n)?.into_iter();
                let mut next = || a.next().expect("arity");
                match kw.as_str() {
                    "pair" => SKind::Pair(b(next()), b(next())),
                    "refl" => SKind::Refl(b(next()), b(next())),
                    "Id" => SKind::Id(b(next()), b(next()), b(next())),
                    "fst" => SKind::Fst(b(next())),
                    "snd" => SKind::Snd(b(next())),
                    _ => SKind::J((0..5).map(|_| next()).collect()),
                }
            }
            "elim" => {
                self.advance();
                let (ek, n) = match self.peek() {
                    Tok::Ident(s) if s == "Unit" => (ElimKind::Unit, 3),
                    Tok::Ident(s) if s == "Bool" => (ElimKind::Bool, 4),
                    Tok::Ident(s) if s == "Empty" => (ElimKind::Empty, 2),
                    Tok::Ident(s) if s == "Sigma" => (ElimKind::Sigma, 3),
                    _ => return self.error("`Unit`, `Bool`, `Empty` or `Sigma` after `elim`"),
                };
                self.advance();
                SKind::Elim(ek, self.atoms(n)?)
            }
            _ => return self.atom(),
        };
        Ok(STerm {
            kind,
            span: start.join(self.prev_span()),
        })
    }

    fn atom(&mut self) -> PResult<STerm> {
        let start = self.span();
        let kind = match self.peek().clone() {
            Tok::Universe(l) => SKind::Universe(l),
            Tok::Splice(s) => {
                if !self.allow_splices {
                    return Err(SyntaxError {
                        span: start,
                        message: format!("unexpected splice `${s}` outside a schema template"),
                    });
                }
                SKind::Splice(s)
            }
            Tok::LParen => {
                self.advance();
                let t = self.term()?;
                let end = self.expect(Tok::RParen, "`)`")?;
                return Ok(STerm {
                    kind: t.kind,
                    span: start.join(end),
                });
            }
            Tok::Ident(s) => match s.as_str() {
                "Unit" => SKind::UnitTy,
                "tt" => SKind::UnitVal,
                "Bool" => SKind::BoolTy,
                "true" => SKind::BoolTrue,
                "false" => SKind::BoolFalse,
                "Empty" => SKind::EmptyTy,
                _ if crate::print::is_keyword(&s) => return self.error("a term"),
                _ => SKind::Name(s),
            },
            _ => return self.error("a term"),
        };
        self.advance();
        Ok(STerm { kind, span: start })
    }
}

pub fn parse_file(text: &str, file: u32) -> SurfaceFile {
    let (toks, lex_errors) = lex(text, file);
    let mut p = Parser::new(toks, false);
    let mut f = p.file();
    let mut errors = lex_errors;
    errors.append(&mut f.errors);
    errors.sort_by_key(|e| e.span);
    f.errors = errors;
    f
}

/// Parses a standalone term; `$name` splices are accepted when `splices`.
pub fn parse_term(text: &str, file: u32, splices: bool) -> PResult<STerm> {
    let (toks, errors) = lex(text, file);
    if let Some(e) = errors.into_iter().next() {
        return Err(e);
    }
    let mut p = Parser::new(toks, splices);
    let t = p.term()?;
    if *p.peek() != Tok::Eof {
        return p.error("end of input");
    }
    Ok(t)
}

/// Parses declarations written with `$name` splices (schema templates).
pub fn parse_template(text: &str, file: u32) -> SurfaceFile {
    let (toks, lex_errors) = lex(text, file);
    let mut p = Parser::new(toks, true);
    let mut f = p.file();
    f.errors.splice(0..0, lex_errors);
    f
}

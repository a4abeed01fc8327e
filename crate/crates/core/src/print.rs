//! Pretty-printer producing surface syntax that parses back to the same
//! core term.

use std::collections::HashSet;

use crate::syntax::{Name, Term, TermKind};

pub const KEYWORDS: &[&str] = &[
    "def", "axiom", "postulate", "import", "wsusp", "trunc", "Pi", "Sigma", "fun", "Id", "refl",
    "J", "pair", "fst", "snd", "Unit", "tt", "Bool", "true", "false", "Empty", "elim",
];

pub fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s) || is_universe_token(s)
}

pub fn is_universe_token(s: &str) -> bool {
    s.len() > 1 && s.starts_with('U') && s[1..].bytes().all(|b| b.is_ascii_digit())
}

/// Prints `term` in a context whose binder names are `names`, innermost last.
pub fn print_term(term: &Term, names: &[Name]) -> String {
    let mut consts = Vec::new();
    term.constants(&mut consts);
    let mut p = Printer {
        avoid: consts.iter().map(|c| c.to_string()).collect(),
        scope: names.iter().map(|n| n.to_string()).collect(),
        out: String::new(),
    };
    p.term(term);
    p.out
}

#[derive(Clone, Copy, PartialEq, PartialOrd)]
enum Prec {
    Top,
    App,
    Atom,
}

struct Printer {
    avoid: HashSet<String>,
    scope: Vec<String>,
    out: String,
}

impl Printer {
    fn fresh(&self, hint: &str) -> String {
        let base: String = if hint.is_empty() || hint == "_" || !valid_ident(hint) {
            "x".into()
        } else {
            hint.trim_end_matches(|c: char| c.is_ascii_digit()).to_string()
        };
        let base = if base.is_empty() { "x".to_string() } else { base };
        let taken = |s: &str| is_keyword(s) || self.avoid.contains(s) || self.scope.iter().any(|n| n == s);
        if hint != "_" && valid_ident(hint) && !taken(hint) {
            return hint.to_string();
        }
        if !taken(&base) {
            return base;
        }
        (1..)
            .map(|k| format!("{base}{k}"))
            .find(|c| !taken(c))
            .expect("infinite supply of names")
    }

    fn paren(&mut self, need: bool, f: impl FnOnce(&mut Self)) {
        if need {
            self.out.push('(');
        }
        f(self);
        if need {
            self.out.push(')');
        }
    }

    fn term(&mut self, t: &Term) {
        self.at(t, Prec::Top)
    }

    fn at(&mut self, t: &Term, prec: Prec) {
        use TermKind::*;
        match t.kind() {
            Var(i) => {
                let i = *i as usize;
                if i < self.scope.len() {
                    let n = self.scope[self.scope.len() - 1 - i].clone();
                    self.out.push_str(&n);
                } else {
                    self.out.push_str(&format!("?{}", i - self.scope.len()));
                }
            }
            Universe(l) => self.out.push_str(&format!("U{l}")),
            Const(n) => self.out.push_str(n),
            UnitTy => self.out.push_str("Unit"),
            UnitVal => self.out.push_str("tt"),
            BoolTy => self.out.push_str("Bool"),
            BoolTrue => self.out.push_str("true"),
            BoolFalse => self.out.push_str("false"),
            EmptyTy => self.out.push_str("Empty"),
            Pi(_, a, b) if !b.has_free(0) => self.paren(prec > Prec::Top, |p| {
                p.at(a, Prec::App);
                p.out.push_str(" -> ");
                p.scope.push("_".into());
                p.at(b, Prec::Top);
                p.scope.pop();
            }),
            Pi(..) | Sigma(..) => self.paren(prec > Prec::Top, |p| p.binder_chain(t)),
            Lam(..) => self.paren(prec > Prec::Top, |p| {
                p.out.push_str("fun");
                let mut cur = t;
                let mut pushed = 0;
                while let Lam(n, body) = cur.kind() {
                    let name = if body.has_free(0) { p.fresh(n) } else { "_".to_string() };
                    p.out.push(' ');
                    p.out.push_str(&name);
                    p.scope.push(name);
                    pushed += 1;
                    cur = body;
                }
                p.out.push_str(" => ");
                p.at(cur, Prec::Top);
                for _ in 0..pushed {
                    p.scope.pop();
                }
            }),
            App(..) => {
                let (head, args) = t.spine();
                self.paren(prec > Prec::App, |p| {
                    p.at(head, Prec::App);
                    for a in args {
                        p.out.push(' ');
                        p.at(a, Prec::Atom);
                    }
                })
            }
            Pair(a, b) => self.keyword(prec, "pair", &[a, b]),
            Fst(a) => self.keyword(prec, "fst", &[a]),
            Snd(a) => self.keyword(prec, "snd", &[a]),
            Id(a, x, y) => self.keyword(prec, "Id", &[a, x, y]),
            Refl(a, m) => self.keyword(prec, "refl", &[a, m]),
            J {
                motive,
                base,
                lhs,
                rhs,
                path,
            } => self.keyword(prec, "J", &[motive, base, lhs, rhs, path]),
            SigmaElim {
                motive,
                branch,
                scrut,
            } => self.keyword(prec, "elim Sigma", &[motive, branch, scrut]),
            UnitElim {
                motive,
                branch,
                scrut,
            } => self.keyword(prec, "elim Unit", &[motive, branch, scrut]),
            BoolElim {
                motive,
                on_true,
                on_false,
                scrut,
            } => self.keyword(prec, "elim Bool", &[motive, on_true, on_false, scrut]),
            EmptyElim { motive, scrut } => self.keyword(prec, "elim Empty", &[motive, scrut]),
        }
    }

    fn keyword(&mut self, prec: Prec, kw: &str, args: &[&Term]) {
        self.paren(prec > Prec::App, |p| {
            p.out.push_str(kw);
            for a in args {
                p.out.push(' ');
                p.at(a, Prec::Atom);
            }
        })
    }

    /// Groups consecutive binders of the same kind and domain:
    /// `Pi (x y : A) (z : B) -> C`.
    fn binder_chain(&mut self, t: &Term) {
        let is_pi = matches!(t.kind(), TermKind::Pi(..));
        self.out.push_str(if is_pi { "Pi" } else { "Sigma" });
        let mut cur = t.clone();
        let mut pushed = 0;
        let mut prev_dom: Option<Term> = None;
        let mut group_colon = 0;
        loop {
            let (n, a, b) = match cur.kind() {
                TermKind::Pi(n, a, b) if is_pi && b.has_free(0) => (n.clone(), a.clone(), b.clone()),
                TermKind::Sigma(n, a, b) if !is_pi => (n.clone(), a.clone(), b.clone()),
                _ => break,
            };
            let name = if b.has_free(0) { self.fresh(&n) } else { "_".to_string() };
            let same = prev_dom.as_ref().is_some_and(|d| a.struct_eq(&d.lift(1, 0)));
            if same {
                // Reopen the previous group: "(x : A)" becomes "(x y : A)".
                let close = self.out.len() - 1;
                let dom_text = self.out[group_colon..close].to_string();
                self.out.truncate(group_colon);
                self.out.push(' ');
                self.out.push_str(&name);
                group_colon = self.out.len();
                self.out.push_str(&dom_text);
                self.out.push(')');
            } else {
                self.out.push_str(" (");
                self.out.push_str(&name);
                group_colon = self.out.len();
                self.out.push_str(" : ");
                self.at(&a, Prec::Top);
                self.out.push(')');
            }
            prev_dom = Some(a);
            self.scope.push(name);
            pushed += 1;
            cur = b;
        }
        self.out.push_str(" -> ");
        self.at(&cur, Prec::Top);
        for _ in 0..pushed {
            self.scope.pop();
        }
    }
}

pub fn valid_ident(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_alphabetic() || c == '_' => {}
        _ => return false,
    }
    s != "_" && s.chars().all(is_ident_char) && !s.contains("->") && !is_keyword(s)
}

pub fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '\'' | '-' | '.' | '/')
}

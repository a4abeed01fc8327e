//! Core term language.
//!
//! Terms are nameless: bound variables are de Bruijn indices, so
//! α-equivalence is plain structural equality. Binders keep a name hint
//! that is used only when printing.

use std::fmt;
use std::sync::Arc;

use indexmap::IndexMap;
use thiserror::Error;

/// Identifier of a global constant or a binder hint.
pub type Name = Arc<str>;

/// Source location, 1-based lines and columns. `file` indexes the driver's
/// file table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Span {
    pub file: u32,
    pub start_line: u32,
    pub start_col: u32,
    pub end_line: u32,
    pub end_col: u32,
}

impl Span {
    pub fn new(file: u32, start: (u32, u32), end: (u32, u32)) -> Self {
        Span {
            file,
            start_line: start.0,
            start_col: start.1,
            end_line: end.0,
            end_col: end.1,
        }
    }

    /// Smallest span covering both.
    pub fn join(self, other: Span) -> Span {
        let (sl, sc) = (self.start_line, self.start_col).min((other.start_line, other.start_col));
        let (el, ec) = (self.end_line, self.end_col).max((other.end_line, other.end_col));
        Span::new(self.file, (sl, sc), (el, ec))
    }
}

#[derive(Clone)]
pub struct Term(Arc<Node>);

struct Node {
    kind: TermKind,
    /// One past the largest free variable index; 0 for closed terms.
    loose: u32,
    span: Option<Span>,
}

#[derive(Clone)]
pub enum TermKind {
    Var(u32),
    Universe(u32),
    Pi(Name, Term, Term),
    Lam(Name, Term),
    App(Term, Term),
    Sigma(Name, Term, Term),
    Pair(Term, Term),
    Fst(Term),
    Snd(Term),
    /// Dependent eliminator for Σ: `motive : Σ A B → U`, `branch : Π a b, motive (a, b)`.
    SigmaElim {
        motive: Term,
        branch: Term,
        scrut: Term,
    },
    Id(Term, Term, Term),
    Refl(Term, Term),
    J {
        motive: Term,
        base: Term,
        lhs: Term,
        rhs: Term,
        path: Term,
    },
    Const(Name),
    UnitTy,
    UnitVal,
    BoolTy,
    BoolTrue,
    BoolFalse,
    EmptyTy,
    UnitElim {
        motive: Term,
        branch: Term,
        scrut: Term,
    },
    BoolElim {
        motive: Term,
        on_true: Term,
        on_false: Term,
        scrut: Term,
    },
    EmptyElim {
        motive: Term,
        scrut: Term,
    },
}

fn loose_of(kind: &TermKind) -> u32 {
    use TermKind::*;
    let under = |t: &Term| t.loose().saturating_sub(1);
    match kind {
        Var(i) => i + 1,
        Universe(_) | Const(_) | UnitTy | UnitVal | BoolTy | BoolTrue | BoolFalse | EmptyTy => 0,
        Pi(_, a, b) | Sigma(_, a, b) => a.loose().max(under(b)),
        Lam(_, b) => under(b),
        App(a, b) | Pair(a, b) | Refl(a, b) => a.loose().max(b.loose()),
        Fst(a) | Snd(a) => a.loose(),
        Id(a, b, c) => a.loose().max(b.loose()).max(c.loose()),
        J {
            motive,
            base,
            lhs,
            rhs,
            path,
        } => motive
            .loose()
            .max(base.loose())
            .max(lhs.loose())
            .max(rhs.loose())
            .max(path.loose()),
        SigmaElim {
            motive,
            branch,
            scrut,
        }
        | UnitElim {
            motive,
            branch,
            scrut,
        } => motive.loose().max(branch.loose()).max(scrut.loose()),
        BoolElim {
            motive,
            on_true,
            on_false,
            scrut,
        } => motive
            .loose()
            .max(on_true.loose())
            .max(on_false.loose())
            .max(scrut.loose()),
        EmptyElim { motive, scrut } => motive.loose().max(scrut.loose()),
    }
}

impl Term {
    pub fn new(kind: TermKind) -> Term {
        let loose = loose_of(&kind);
        Term(Arc::new(Node {
            kind,
            loose,
            span: None,
        }))
    }

    pub fn with_span(kind: TermKind, span: Span) -> Term {
        let loose = loose_of(&kind);
        Term(Arc::new(Node {
            kind,
            loose,
            span: Some(span),
        }))
    }

    pub fn kind(&self) -> &TermKind {
        &self.0.kind
    }

    pub fn span(&self) -> Option<Span> {
        self.0.span
    }

    pub fn loose(&self) -> u32 {
        self.0.loose
    }

    pub fn is_closed(&self) -> bool {
        self.0.loose == 0
    }

    pub fn ptr_eq(&self, other: &Term) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    pub fn var(i: u32) -> Term {
        Term::new(TermKind::Var(i))
    }
    pub fn universe(l: u32) -> Term {
        Term::new(TermKind::Universe(l))
    }
    pub fn pi(name: impl Into<Name>, dom: Term, cod: Term) -> Term {
        Term::new(TermKind::Pi(name.into(), dom, cod))
    }
    pub fn lam(name: impl Into<Name>, body: Term) -> Term {
        Term::new(TermKind::Lam(name.into(), body))
    }
    pub fn app(f: Term, x: Term) -> Term {
        Term::new(TermKind::App(f, x))
    }
    pub fn apps(f: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(f, Term::app)
    }
    pub fn sigma(name: impl Into<Name>, first: Term, second: Term) -> Term {
        Term::new(TermKind::Sigma(name.into(), first, second))
    }
    pub fn pair(a: Term, b: Term) -> Term {
        Term::new(TermKind::Pair(a, b))
    }
    pub fn fst(p: Term) -> Term {
        Term::new(TermKind::Fst(p))
    }
    pub fn snd(p: Term) -> Term {
        Term::new(TermKind::Snd(p))
    }
    pub fn id(ty: Term, lhs: Term, rhs: Term) -> Term {
        Term::new(TermKind::Id(ty, lhs, rhs))
    }
    pub fn refl(ty: Term, point: Term) -> Term {
        Term::new(TermKind::Refl(ty, point))
    }
    pub fn j(motive: Term, base: Term, lhs: Term, rhs: Term, path: Term) -> Term {
        Term::new(TermKind::J {
            motive,
            base,
            lhs,
            rhs,
            path,
        })
    }
    pub fn constant(name: impl Into<Name>) -> Term {
        Term::new(TermKind::Const(name.into()))
    }

    /// `A → B` as a Π whose codomain ignores its binder.
    pub fn arrow(dom: Term, cod: Term) -> Term {
        Term::pi("_", dom, cod.lift(1, 0))
    }

    /// Splits `f a₁ … aₙ` into `f` and its arguments.
    pub fn spine(&self) -> (&Term, Vec<&Term>) {
        let mut head = self;
        let mut args = Vec::new();
        while let TermKind::App(f, x) = head.kind() {
            args.push(x);
            head = f;
        }
        args.reverse();
        (head, args)
    }

    /// Rebuilds this node with the given kind, keeping the span.
    fn rebuild(&self, kind: TermKind) -> Term {
        let loose = loose_of(&kind);
        Term(Arc::new(Node {
            kind,
            loose,
            span: self.0.span,
        }))
    }

    /// Applies `f` to each immediate subterm together with the number of
    /// binders crossed to reach it.
    pub fn map_children(&self, depth: u32, f: &mut impl FnMut(&Term, u32) -> Term) -> Term {
        use TermKind::*;
        let kind = match self.kind() {
            Var(_) | Universe(_) | Const(_) | UnitTy | UnitVal | BoolTy | BoolTrue | BoolFalse
            | EmptyTy => return self.clone(),
            Pi(n, a, b) => Pi(n.clone(), f(a, depth), f(b, depth + 1)),
            Sigma(n, a, b) => Sigma(n.clone(), f(a, depth), f(b, depth + 1)),
            Lam(n, b) => Lam(n.clone(), f(b, depth + 1)),
            App(a, b) => App(f(a, depth), f(b, depth)),
            Pair(a, b) => Pair(f(a, depth), f(b, depth)),
            Fst(a) => Fst(f(a, depth)),
            Snd(a) => Snd(f(a, depth)),
            SigmaElim {
                motive,
                branch,
                scrut,
            } => SigmaElim {
                motive: f(motive, depth),
                branch: f(branch, depth),
                scrut: f(scrut, depth),
            },
            Id(a, b, c) => Id(f(a, depth), f(b, depth), f(c, depth)),
            Refl(a, b) => Refl(f(a, depth), f(b, depth)),
            J {
                motive,
                base,
                lhs,
                rhs,
                path,
            } => J {
                motive: f(motive, depth),
                base: f(base, depth),
                lhs: f(lhs, depth),
                rhs: f(rhs, depth),
                path: f(path, depth),
            },
            UnitElim {
                motive,
                branch,
                scrut,
            } => UnitElim {
                motive: f(motive, depth),
                branch: f(branch, depth),
                scrut: f(scrut, depth),
            },
            BoolElim {
                motive,
                on_true,
                on_false,
                scrut,
            } => BoolElim {
                motive: f(motive, depth),
                on_true: f(on_true, depth),
                on_false: f(on_false, depth),
                scrut: f(scrut, depth),
            },
            EmptyElim { motive, scrut } => EmptyElim {
                motive: f(motive, depth),
                scrut: f(scrut, depth),
            },
        };
        self.rebuild(kind)
    }

    /// Adds `amount` to every free variable `>= cutoff`. Infallible because
    /// the amount is non-negative.
    pub fn lift(&self, amount: u32, cutoff: u32) -> Term {
        if amount == 0 || self.loose() <= cutoff {
            return self.clone();
        }
        match self.kind() {
            TermKind::Var(i) => {
                // loose > cutoff implies i >= cutoff
                self.rebuild(TermKind::Var(i + amount))
            }
            _ => self.map_children(cutoff, &mut |t, c| t.lift(amount, c)),
        }
    }

    /// Signed shift of free variables `>= cutoff`.
    pub fn shift(&self, amount: i64, cutoff: u32) -> Result<Term, ShiftError> {
        if amount >= 0 {
            return Ok(self.lift(amount as u32, cutoff));
        }
        let down = amount.unsigned_abs();
        self.lower(down, cutoff)
    }

    fn lower(&self, down: u64, cutoff: u32) -> Result<Term, ShiftError> {
        if self.loose() <= cutoff {
            return Ok(self.clone());
        }
        if let TermKind::Var(i) = self.kind() {
            let i = u64::from(*i);
            if i < u64::from(cutoff) + down {
                return Err(ShiftError::Underflow {
                    index: i as u32,
                    amount: down,
                });
            }
            return Ok(self.rebuild(TermKind::Var((i - down) as u32)));
        }
        let mut failure = None;
        let out = self.map_children(cutoff, &mut |t, c| match t.lower(down, c) {
            Ok(t) => t,
            Err(e) => {
                failure.get_or_insert(e);
                t.clone()
            }
        });
        match failure {
            Some(e) => Err(e),
            None => Ok(out),
        }
    }

    /// Capture-avoiding substitution of `replacement` for `Var(index)`;
    /// free variables above `index` move down by one.
    pub fn subst(&self, replacement: &Term, index: u32) -> Term {
        self.subst_at(replacement, index, 0)
    }

    fn subst_at(&self, replacement: &Term, index: u32, depth: u32) -> Term {
        let target = index + depth;
        if self.loose() <= target {
            return self.clone();
        }
        match self.kind() {
            TermKind::Var(i) => {
                if *i == target {
                    replacement.lift(depth, 0)
                } else {
                    // i > target here
                    self.rebuild(TermKind::Var(i - 1))
                }
            }
            _ => self.map_children(depth, &mut |t, d| t.subst_at(replacement, index, d)),
        }
    }

    /// Substitutes `arg` for the outermost bound variable of a binder body.
    pub fn instantiate(&self, arg: &Term) -> Term {
        self.subst(arg, 0)
    }

    /// Structural equality with binder names and spans erased.
    pub fn struct_eq(&self, other: &Term) -> bool {
        use TermKind::*;
        if self.ptr_eq(other) {
            return true;
        }
        if self.loose() != other.loose() {
            return false;
        }
        match (self.kind(), other.kind()) {
            (Var(a), Var(b)) => a == b,
            (Universe(a), Universe(b)) => a == b,
            (Pi(_, a1, b1), Pi(_, a2, b2)) | (Sigma(_, a1, b1), Sigma(_, a2, b2)) => {
                a1.struct_eq(a2) && b1.struct_eq(b2)
            }
            (Lam(_, a), Lam(_, b)) | (Fst(a), Fst(b)) | (Snd(a), Snd(b)) => a.struct_eq(b),
            (App(a1, b1), App(a2, b2))
            | (Pair(a1, b1), Pair(a2, b2))
            | (Refl(a1, b1), Refl(a2, b2)) => a1.struct_eq(a2) && b1.struct_eq(b2),
            (Id(a1, b1, c1), Id(a2, b2, c2)) => {
                a1.struct_eq(a2) && b1.struct_eq(b2) && c1.struct_eq(c2)
            }
            (
                J {
                    motive: m1,
                    base: d1,
                    lhs: l1,
                    rhs: r1,
                    path: p1,
                },
                J {
                    motive: m2,
                    base: d2,
                    lhs: l2,
                    rhs: r2,
                    path: p2,
                },
            ) => {
                m1.struct_eq(m2)
                    && d1.struct_eq(d2)
                    && l1.struct_eq(l2)
                    && r1.struct_eq(r2)
                    && p1.struct_eq(p2)
            }
            (Const(a), Const(b)) => a == b,
            (UnitTy, UnitTy)
            | (UnitVal, UnitVal)
            | (BoolTy, BoolTy)
            | (BoolTrue, BoolTrue)
            | (BoolFalse, BoolFalse)
            | (EmptyTy, EmptyTy) => true,
            (
                SigmaElim {
                    motive: m1,
                    branch: b1,
                    scrut: s1,
                },
                SigmaElim {
                    motive: m2,
                    branch: b2,
                    scrut: s2,
                },
            )
            | (
                UnitElim {
                    motive: m1,
                    branch: b1,
                    scrut: s1,
                },
                UnitElim {
                    motive: m2,
                    branch: b2,
                    scrut: s2,
                },
            ) => m1.struct_eq(m2) && b1.struct_eq(b2) && s1.struct_eq(s2),
            (
                BoolElim {
                    motive: m1,
                    on_true: t1,
                    on_false: f1,
                    scrut: s1,
                },
                BoolElim {
                    motive: m2,
                    on_true: t2,
                    on_false: f2,
                    scrut: s2,
                },
            ) => m1.struct_eq(m2) && t1.struct_eq(t2) && f1.struct_eq(f2) && s1.struct_eq(s2),
            (EmptyElim { motive: m1, scrut: s1 }, EmptyElim { motive: m2, scrut: s2 }) => {
                m1.struct_eq(m2) && s1.struct_eq(s2)
            }
            _ => false,
        }
    }

    /// True if `Var(index)` occurs free.
    pub fn has_free(&self, index: u32) -> bool {
        self.has_free_at(index, 0)
    }

    fn has_free_at(&self, index: u32, depth: u32) -> bool {
        let target = index + depth;
        if self.loose() <= target {
            return false;
        }
        match self.kind() {
            TermKind::Var(i) => *i == target,
            _ => self
                .children()
                .into_iter()
                .any(|(t, b)| t.has_free_at(index, depth + b)),
        }
    }

    /// Every constant name mentioned, in first-occurrence order.
    pub fn constants(&self, out: &mut Vec<Name>) {
        if let TermKind::Const(n) = self.kind() {
            if !out.contains(n) {
                out.push(n.clone());
            }
            return;
        }
        for (t, _) in self.children() {
            t.constants(out);
        }
    }

    /// Immediate subterms with the number of binders each sits under.
    pub fn children(&self) -> Vec<(&Term, u32)> {
        use TermKind::*;
        match self.kind() {
            Var(_) | Universe(_) | Const(_) | UnitTy | UnitVal | BoolTy | BoolTrue | BoolFalse
            | EmptyTy => vec![],
            Pi(_, a, b) | Sigma(_, a, b) => vec![(a, 0), (b, 1)],
            Lam(_, b) => vec![(b, 1)],
            App(a, b) | Pair(a, b) | Refl(a, b) => vec![(a, 0), (b, 0)],
            Fst(a) | Snd(a) => vec![(a, 0)],
            Id(a, b, c) => vec![(a, 0), (b, 0), (c, 0)],
            J {
                motive,
                base,
                lhs,
                rhs,
                path,
            } => vec![(motive, 0), (base, 0), (lhs, 0), (rhs, 0), (path, 0)],
            SigmaElim {
                motive,
                branch,
                scrut,
            }
            | UnitElim {
                motive,
                branch,
                scrut,
            } => vec![(motive, 0), (branch, 0), (scrut, 0)],
            BoolElim {
                motive,
                on_true,
                on_false,
                scrut,
            } => vec![(motive, 0), (on_true, 0), (on_false, 0), (scrut, 0)],
            EmptyElim { motive, scrut } => vec![(motive, 0), (scrut, 0)],
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|(t, _)| t.size()).sum::<usize>()
    }
}

impl PartialEq for Term {
    fn eq(&self, other: &Term) -> bool {
        self.struct_eq(other)
    }
}

impl Eq for Term {}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::print::print_term(self, &[]))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ShiftError {
    #[error("shifting variable {index} down by {amount} would make it negative")]
    Underflow { index: u32, amount: u64 },
}

/// Local typing context, innermost binding last.
#[derive(Debug, Clone, Default)]
pub struct Context {
    entries: Vec<(Name, Term)>,
}

impl Context {
    pub fn new() -> Self {
        Context::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn push(&mut self, name: Name, ty: Term) {
        self.entries.push((name, ty));
    }

    pub fn pop(&mut self) {
        self.entries.pop();
    }

    pub fn extended(&self, name: Name, ty: Term) -> Context {
        let mut c = self.clone();
        c.push(name, ty);
        c
    }

    /// Type of `Var(index)`, weakened to the current context.
    pub fn lookup(&self, index: u32) -> Option<Term> {
        let i = index as usize;
        if i >= self.entries.len() {
            return None;
        }
        let (_, ty) = &self.entries[self.entries.len() - 1 - i];
        Some(ty.lift(index + 1, 0))
    }

    /// Binder names, innermost last.
    pub fn names(&self) -> Vec<Name> {
        self.entries.iter().map(|(n, _)| n.clone()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Schema {
    WSusp,
    Trunc,
}

#[derive(Debug, Clone)]
pub enum DeclKind {
    Definition { ty: Term, body: Term },
    Axiom { ty: Term },
    Postulate { ty: Term, marker: String },
    /// The schema declaration itself; its generated constants are separate
    /// `Generated` entries.
    SchemaInstance {
        schema: Schema,
        parameters: Vec<(Name, Term)>,
        levels: Vec<u32>,
        generated: Vec<Name>,
    },
    /// A trusted constant emitted by a schema elaborator.
    Generated { ty: Term, schema: Name },
}

#[derive(Debug, Clone)]
pub struct Declaration {
    pub name: Name,
    pub kind: DeclKind,
    pub span: Span,
}

impl Declaration {
    pub fn ty(&self) -> Option<&Term> {
        match &self.kind {
            DeclKind::Definition { ty, .. }
            | DeclKind::Axiom { ty }
            | DeclKind::Postulate { ty, .. }
            | DeclKind::Generated { ty, .. } => Some(ty),
            DeclKind::SchemaInstance { .. } => None,
        }
    }

    pub fn body(&self) -> Option<&Term> {
        match &self.kind {
            DeclKind::Definition { body, .. } => Some(body),
            _ => None,
        }
    }

    /// Axioms and postulates: trusted types with no body and no schema behind them.
    pub fn is_bodyless_trusted(&self) -> bool {
        matches!(
            self.kind,
            DeclKind::Axiom { .. } | DeclKind::Postulate { .. }
        )
    }
}

/// Global constants in insertion order. Each entry records its position so
/// that conversion can prefer unfolding later definitions first.
#[derive(Debug, Clone, Default)]
pub struct GlobalEnv {
    decls: IndexMap<Name, Arc<Declaration>>,
}

impl GlobalEnv {
    pub fn new() -> Self {
        GlobalEnv::default()
    }

    pub fn get(&self, name: &str) -> Option<&Arc<Declaration>> {
        self.decls.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.decls.contains_key(name)
    }

    /// Position of a constant in insertion order.
    pub fn height(&self, name: &str) -> Option<usize> {
        self.decls.get_index_of(name)
    }

    pub fn len(&self) -> usize {
        self.decls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.decls.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Arc<Declaration>> {
        self.decls.values()
    }

    /// Inserts without checking. Returns false if the name is taken.
    pub fn insert(&mut self, decl: Arc<Declaration>) -> bool {
        if self.decls.contains_key(&decl.name) {
            return false;
        }
        self.decls.insert(decl.name.clone(), decl);
        true
    }

    /// Type of a constant, if it has one.
    pub fn type_of(&self, name: &str) -> Option<&Term> {
        self.decls.get(name).and_then(|d| d.ty())
    }

    /// Body of a definition; axioms and generated constants have none.
    pub fn unfold(&self, name: &str) -> Option<&Term> {
        self.decls.get(name).and_then(|d| d.body())
    }
}

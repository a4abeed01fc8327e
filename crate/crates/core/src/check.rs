//! Bidirectional type checking.
//!
//! `infer` is syntax-directed because `refl` and `J` carry their type and
//! endpoint annotations. Lambdas and pairs are only checked, never inferred.
//! Cumulativity is applied only where both sides are universes.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::eval::Evaluator;
use crate::print::print_term;
use crate::syntax::{Context, DeclKind, Declaration, GlobalEnv, Name, Span, Term, TermKind};

#[derive(Debug, Clone)]
pub enum ErrorKind {
    /// Both sides are in weak-head normal form.
    Mismatch { expected: Term, got: Term },
    UnboundName(Name),
    UniverseViolation { expected: u32, got: u32 },
    NotAFunction(Term),
    NotAPair(Term),
    NotAnIdType(Term),
    NotAType(Term),
    CannotInfer(&'static str),
    DuplicateName(Name),
    SchemaError(String),
}

#[derive(Debug, Clone, Error)]
pub struct TypeError {
    pub kind: ErrorKind,
    pub span: Option<Span>,
    /// Local binder names at the point of failure, for printing.
    pub names: Vec<Name>,
}

impl fmt::Display for TypeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = |t: &Term| print_term(t, &self.names);
        match &self.kind {
            ErrorKind::Mismatch { expected, got } => {
                write!(f, "type mismatch: expected `{}`, got `{}`", p(expected), p(got))
            }
            ErrorKind::UnboundName(n) => write!(f, "unbound name `{n}`"),
            ErrorKind::UniverseViolation { expected, got } => write!(
                f,
                "universe violation: a term of type U{got} does not fit in U{expected}"
            ),
            ErrorKind::NotAFunction(t) => write!(f, "expected a function type, got `{}`", p(t)),
            ErrorKind::NotAPair(t) => write!(f, "expected a Sigma type, got `{}`", p(t)),
            ErrorKind::NotAnIdType(t) => write!(f, "expected an identity type, got `{}`", p(t)),
            ErrorKind::NotAType(t) => write!(f, "expected a type, got a term of type `{}`", p(t)),
            ErrorKind::CannotInfer(what) => {
                write!(f, "cannot infer the type of {what}; add a type annotation")
            }
            ErrorKind::DuplicateName(n) => write!(f, "duplicate declaration `{n}`"),
            ErrorKind::SchemaError(m) => write!(f, "schema error: {m}"),
        }
    }
}

pub type TcResult<T> = Result<T, TypeError>;

pub struct Checker<'e> {
    pub ev: Evaluator<'e>,
}

impl<'e> Checker<'e> {
    pub fn new(env: &'e GlobalEnv) -> Self {
        Checker {
            ev: Evaluator::new(env),
        }
    }

    fn err<T>(&self, ctx: &Context, span: Option<Span>, kind: ErrorKind) -> TcResult<T> {
        Err(TypeError {
            kind,
            span,
            names: ctx.names(),
        })
    }

    pub fn infer(&self, ctx: &Context, t: &Term) -> TcResult<Term> {
        self.infer_at(ctx, t, None)
    }

    pub fn check(&self, ctx: &Context, t: &Term, ty: &Term) -> TcResult<()> {
        self.check_at(ctx, t, ty, None)
    }

    /// `sub ≤ sup`: convertible, or both universes with increasing level.
    pub fn cumul(&self, ctx: &Context, sub: &Term, sup: &Term) -> bool {
        if self.ev.conv(ctx, sub, sup) {
            return true;
        }
        match (self.ev.whnf(sub).kind(), self.ev.whnf(sup).kind()) {
            (TermKind::Universe(i), TermKind::Universe(j)) => i <= j,
            _ => false,
        }
    }

    /// Checks that `t` is a type and returns its universe level.
    pub fn universe_of(&self, ctx: &Context, t: &Term) -> TcResult<u32> {
        self.universe_at(ctx, t, None)
    }

    fn universe_at(&self, ctx: &Context, t: &Term, outer: Option<Span>) -> TcResult<u32> {
        let sp = t.span().or(outer);
        let ty = self.infer_at(ctx, t, sp)?;
        let nf = self.ev.whnf(&ty);
        match nf.kind() {
            TermKind::Universe(l) => Ok(*l),
            _ => self.err(ctx, sp, ErrorKind::NotAType(nf)),
        }
    }

    fn infer_at(&self, ctx: &Context, t: &Term, outer: Option<Span>) -> TcResult<Term> {
        use TermKind::*;
        let sp = t.span().or(outer);
        match t.kind() {
            Var(i) => match ctx.lookup(*i) {
                Some(ty) => Ok(ty),
                None => self.err(ctx, sp, ErrorKind::UnboundName(format!("#{i}").into())),
            },
            Universe(l) => Ok(Term::universe(l + 1)),
            Const(n) => match self.ev.env().type_of(n) {
                Some(ty) => Ok(ty.clone()),
                None => self.err(ctx, sp, ErrorKind::UnboundName(n.clone())),
            },
            Pi(n, a, b) | Sigma(n, a, b) => {
                let la = self.universe_at(ctx, a, sp)?;
                let lb = self.universe_at(&ctx.extended(n.clone(), a.clone()), b, sp)?;
                Ok(Term::universe(la.max(lb)))
            }
            Lam(..) => self.err(ctx, sp, ErrorKind::CannotInfer("a function")),
            Pair(..) => self.err(ctx, sp, ErrorKind::CannotInfer("a pair")),
            App(f, x) => {
                let tf = self.infer_at(ctx, f, sp)?;
                let nf = self.ev.whnf(&tf);
                match nf.kind() {
                    Pi(_, a, b) => {
                        self.check_at(ctx, x, a, x.span().or(sp))?;
                        Ok(b.instantiate(x))
                    }
                    _ => self.err(ctx, f.span().or(sp), ErrorKind::NotAFunction(nf)),
                }
            }
            Fst(p) | Snd(p) => {
                let tp = self.infer_at(ctx, p, sp)?;
                let nf = self.ev.whnf(&tp);
                match nf.kind() {
                    Sigma(_, a, b) => Ok(if matches!(t.kind(), Fst(_)) {
                        a.clone()
                    } else {
                        b.instantiate(&Term::fst(p.clone()))
                    }),
                    _ => self.err(ctx, p.span().or(sp), ErrorKind::NotAPair(nf)),
                }
            }
            SigmaElim {
                motive,
                branch,
                scrut,
            } => {
                let ts = self.infer_at(ctx, scrut, sp)?;
                let nf = self.ev.whnf(&ts);
                let Sigma(n, a, b) = nf.kind() else {
                    return self.err(ctx, scrut.span().or(sp), ErrorKind::NotAPair(nf));
                };
                self.check_family(ctx, motive, std::slice::from_ref(&nf), sp)?;
                // Π (a : A) (b : B a), motive (pair a b)
                let target = Term::app(
                    motive.lift(2, 0),
                    Term::pair(Term::var(1), Term::var(0)),
                );
                let branch_ty = Term::pi(n.clone(), a.clone(), Term::pi("b", b.clone(), target));
                self.check_at(ctx, branch, &branch_ty, branch.span().or(sp))?;
                Ok(Term::app(motive.clone(), scrut.clone()))
            }
            Id(a, x, y) => {
                let l = self.universe_at(ctx, a, sp)?;
                self.check_at(ctx, x, a, x.span().or(sp))?;
                self.check_at(ctx, y, a, y.span().or(sp))?;
                Ok(Term::universe(l))
            }
            Refl(a, m) => {
                self.universe_at(ctx, a, sp)?;
                self.check_at(ctx, m, a, m.span().or(sp))?;
                Ok(Term::id(a.clone(), m.clone(), m.clone()))
            }
            J {
                motive,
                base,
                lhs,
                rhs,
                path,
            } => {
                let tp = self.infer_at(ctx, path, sp)?;
                let nf = self.ev.whnf(&tp);
                let Id(a, _, _) = nf.kind() else {
                    return self.err(ctx, path.span().or(sp), ErrorKind::NotAnIdType(nf));
                };
                let a = a.clone();
                self.check_at(ctx, lhs, &a, lhs.span().or(sp))?;
                self.check_at(ctx, rhs, &a, rhs.span().or(sp))?;
                let want = Term::id(a.clone(), lhs.clone(), rhs.clone());
                if !self.cumul(ctx, &tp, &want) {
                    return self.mismatch(ctx, path.span().or(sp), &want, &tp);
                }
                // E : Π (x y : A), Id A x y → U
                let tele = [
                    a.clone(),
                    a.lift(1, 0),
                    Term::id(a.lift(2, 0), Term::var(1), Term::var(0)),
                ];
                self.check_family(ctx, motive, &tele, motive.span().or(sp))?;
                let diag = Term::apps(
                    motive.lift(1, 0),
                    [
                        Term::var(0),
                        Term::var(0),
                        Term::refl(a.lift(1, 0), Term::var(0)),
                    ],
                );
                let base_ty = Term::pi("x", a.clone(), diag);
                self.check_at(ctx, base, &base_ty, base.span().or(sp))?;
                Ok(Term::apps(
                    motive.clone(),
                    [lhs.clone(), rhs.clone(), path.clone()],
                ))
            }
            UnitTy | BoolTy | EmptyTy => Ok(Term::universe(0)),
            UnitVal => Ok(Term::new(UnitTy)),
            BoolTrue | BoolFalse => Ok(Term::new(BoolTy)),
            UnitElim {
                motive,
                branch,
                scrut,
            } => {
                let unit = Term::new(UnitTy);
                self.check_at(ctx, scrut, &unit, scrut.span().or(sp))?;
                self.check_family(ctx, motive, &[unit], motive.span().or(sp))?;
                let want = Term::app(motive.clone(), Term::new(UnitVal));
                self.check_at(ctx, branch, &want, branch.span().or(sp))?;
                Ok(Term::app(motive.clone(), scrut.clone()))
            }
            BoolElim {
                motive,
                on_true,
                on_false,
                scrut,
            } => {
                let b = Term::new(BoolTy);
                self.check_at(ctx, scrut, &b, scrut.span().or(sp))?;
                self.check_family(ctx, motive, &[b], motive.span().or(sp))?;
                let wt = Term::app(motive.clone(), Term::new(BoolTrue));
                self.check_at(ctx, on_true, &wt, on_true.span().or(sp))?;
                let wf = Term::app(motive.clone(), Term::new(BoolFalse));
                self.check_at(ctx, on_false, &wf, on_false.span().or(sp))?;
                Ok(Term::app(motive.clone(), scrut.clone()))
            }
            EmptyElim { motive, scrut } => {
                let e = Term::new(EmptyTy);
                self.check_at(ctx, scrut, &e, scrut.span().or(sp))?;
                self.check_family(ctx, motive, &[e], motive.span().or(sp))?;
                Ok(Term::app(motive.clone(), scrut.clone()))
            }
        }
    }

    /// Checks that `fam` is a type family over the telescope `tele` (each
    /// entry in the scope of the previous ones), returning its level.
    pub fn family_level(&self, ctx: &Context, fam: &Term, tele: &[Term]) -> TcResult<u32> {
        self.check_family(ctx, fam, tele, None)
    }

    fn check_family(
        &self,
        ctx: &Context,
        fam: &Term,
        tele: &[Term],
        outer: Option<Span>,
    ) -> TcResult<u32> {
        let sp = fam.span().or(outer);
        let Some((first, rest)) = tele.split_first() else {
            return self.universe_at(ctx, fam, sp);
        };
        if let TermKind::Lam(n, body) = fam.kind() {
            let inner = ctx.extended(n.clone(), first.clone());
            return self.check_family(&inner, body, rest, sp);
        }
        let ty = self.infer_at(ctx, fam, sp)?;
        let mut cur = self.ev.whnf(&ty);
        let mut inner = ctx.clone();
        // Each `want` lives under the telescope entries already pushed.
        for want in tele {
            let TermKind::Pi(n, a, b) = cur.kind() else {
                // Too few binders: report the missing argument.
                let cod = match cur.kind() {
                    TermKind::Universe(_) => cur.lift(1, 0),
                    _ => return self.err(&inner, sp, ErrorKind::NotAFunction(cur.clone())),
                };
                let want_ty = Term::pi("_", want.clone(), cod);
                return self.mismatch(&inner, sp, &want_ty, &cur);
            };
            if !self.ev.conv(&inner, a, want) {
                return self.mismatch(&inner, sp, want, a);
            }
            inner.push(n.clone(), a.clone());
            let next = self.ev.whnf(b);
            cur = next;
        }
        match cur.kind() {
            TermKind::Universe(l) => Ok(*l),
            _ => self.err(&inner, sp, ErrorKind::NotAType(cur.clone())),
        }
    }

    fn mismatch<T>(&self, ctx: &Context, sp: Option<Span>, expected: &Term, got: &Term) -> TcResult<T> {
        let expected = self.ev.whnf(expected);
        let got = self.ev.whnf(got);
        if let (TermKind::Universe(e), TermKind::Universe(g)) = (expected.kind(), got.kind()) {
            return self.err(
                ctx,
                sp,
                ErrorKind::UniverseViolation {
                    expected: *e,
                    got: *g,
                },
            );
        }
        self.err(ctx, sp, ErrorKind::Mismatch { expected, got })
    }

    fn check_at(&self, ctx: &Context, t: &Term, ty: &Term, outer: Option<Span>) -> TcResult<()> {
        let sp = t.span().or(outer);
        match t.kind() {
            TermKind::Lam(n, body) => {
                let nf = self.ev.whnf(ty);
                match nf.kind() {
                    TermKind::Pi(_, a, b) => {
                        self.check_at(&ctx.extended(n.clone(), a.clone()), body, b, sp)
                    }
                    _ => self.err(ctx, sp, ErrorKind::NotAFunction(nf)),
                }
            }
            TermKind::Pair(x, y) => {
                let nf = self.ev.whnf(ty);
                match nf.kind() {
                    TermKind::Sigma(_, a, b) => {
                        self.check_at(ctx, x, a, x.span().or(sp))?;
                        self.check_at(ctx, y, &b.instantiate(x), y.span().or(sp))
                    }
                    _ => self.err(ctx, sp, ErrorKind::NotAPair(nf)),
                }
            }
            _ => {
                let got = self.infer_at(ctx, t, sp)?;
                if self.cumul(ctx, &got, ty) {
                    Ok(())
                } else {
                    self.mismatch(ctx, sp, ty, &got)
                }
            }
        }
    }

    /// Checks a single declaration in `env` (which must not yet contain it).
    pub fn check_declaration(&self, decl: &Declaration) -> TcResult<()> {
        let ctx = Context::new();
        let sp = Some(decl.span);
        if self.ev.env().contains(&decl.name) {
            return self.err(&ctx, sp, ErrorKind::DuplicateName(decl.name.clone()));
        }
        match &decl.kind {
            DeclKind::Definition { ty, body } => {
                self.universe_at(&ctx, ty, sp)?;
                self.check_at(&ctx, body, ty, body.span().or(sp))
            }
            DeclKind::Axiom { ty } | DeclKind::Generated { ty, .. } => {
                self.universe_at(&ctx, ty, sp).map(|_| ())
            }
            DeclKind::Postulate { ty, marker } => {
                if marker.trim().is_empty() {
                    return self.err(
                        &ctx,
                        sp,
                        ErrorKind::SchemaError("postulate requires a nonempty marker".into()),
                    );
                }
                self.universe_at(&ctx, ty, sp).map(|_| ())
            }
            DeclKind::SchemaInstance { .. } => Ok(()),
        }
    }
}

/// Checks `decl` and adds it to `env`.
pub fn check_and_add(env: &mut GlobalEnv, decl: Declaration) -> TcResult<()> {
    Checker::new(env).check_declaration(&decl)?;
    env.insert(Arc::new(decl));
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(l: u32) -> Term {
        Term::universe(l)
    }

    fn with_axioms(list: &[(&str, Term)]) -> GlobalEnv {
        let mut env = GlobalEnv::new();
        for (n, ty) in list {
            check_and_add(
                &mut env,
                Declaration {
                    name: (*n).into(),
                    kind: DeclKind::Axiom { ty: ty.clone() },
                    span: Span::default(),
                },
            )
            .unwrap();
        }
        env
    }

    #[test]
    fn universe_in_next() {
        let env = GlobalEnv::new();
        let c = Checker::new(&env);
        assert_eq!(c.infer(&Context::new(), &u(0)).unwrap(), u(1));
    }

    #[test]
    fn refl_inhabits_diagonal() {
        let env = with_axioms(&[("A", u(0)), ("M", Term::constant("A")), ("N", Term::constant("A"))]);
        let c = Checker::new(&env);
        let a = Term::constant("A");
        let m = Term::constant("M");
        let n = Term::constant("N");
        let r = Term::refl(a.clone(), m.clone());
        assert_eq!(c.infer(&Context::new(), &r).unwrap(), Term::id(a.clone(), m.clone(), m.clone()));
        let e = c.check(&Context::new(), &r, &Term::id(a, m, n)).unwrap_err();
        assert!(matches!(e.kind, ErrorKind::Mismatch { .. }));
    }

    #[test]
    fn lambda_and_pair_check() {
        let env = with_axioms(&[("A", u(0)), ("a", Term::constant("A"))]);
        let c = Checker::new(&env);
        let a = Term::constant("A");
        c.check(&Context::new(), &Term::lam("x", Term::var(0)), &Term::arrow(a.clone(), a.clone()))
            .unwrap();
        let sig = Term::sigma("x", a.clone(), Term::id(a.lift(1, 0), Term::var(0), Term::var(0)));
        let p = Term::pair(Term::constant("a"), Term::refl(a.clone(), Term::constant("a")));
        c.check(&Context::new(), &p, &sig).unwrap();
    }

    #[test]
    fn cumulativity_only_at_heads() {
        let env = with_axioms(&[("A", u(0))]);
        let c = Checker::new(&env);
        let ctx = Context::new();
        assert!(c.cumul(&ctx, &u(0), &u(1)));
        assert!(!c.cumul(&ctx, &u(1), &u(0)));
        let a = Term::constant("A");
        assert!(!c.cumul(&ctx, &Term::arrow(a.clone(), u(0)), &Term::arrow(a, u(1))));
    }

    #[test]
    fn type_in_type_rejected() {
        let env = GlobalEnv::new();
        let c = Checker::new(&env);
        let e = c.check(&Context::new(), &u(0), &u(0)).unwrap_err();
        assert!(matches!(e.kind, ErrorKind::UniverseViolation { expected: 0, got: 1 }));
    }

    #[test]
    fn duplicate_declaration() {
        let mut env = with_axioms(&[("A", u(0))]);
        let e = check_and_add(
            &mut env,
            Declaration {
                name: "A".into(),
                kind: DeclKind::Axiom { ty: u(0) },
                span: Span::default(),
            },
        )
        .unwrap_err();
        assert!(matches!(e.kind, ErrorKind::DuplicateName(_)));
    }

    #[test]
    fn j_result_type() {
        let env = with_axioms(&[
            ("A", u(0)),
            ("M", Term::constant("A")),
            ("N", Term::constant("A")),
            ("p", Term::id(Term::constant("A"), Term::constant("M"), Term::constant("N"))),
        ]);
        let c = Checker::new(&env);
        let a = Term::constant("A");
        // E := fun x y _ => Id A y x, d := fun x => refl A x
        let motive = Term::lam(
            "x",
            Term::lam("y", Term::lam("q", Term::id(a.clone(), Term::var(1), Term::var(2)))),
        );
        let base = Term::lam("x", Term::refl(a.clone(), Term::var(0)));
        let j = Term::j(motive, base, Term::constant("M"), Term::constant("N"), Term::constant("p"));
        let ty = c.infer(&Context::new(), &j).unwrap();
        assert!(c.ev.conv(&Context::new(), &ty, &Term::id(a, Term::constant("N"), Term::constant("M"))));
    }
}

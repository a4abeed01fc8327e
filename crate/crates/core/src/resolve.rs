//! Scope resolution: surface terms with names to core terms with indices.

use std::collections::HashMap;

use crate::check::{ErrorKind, TypeError};
use crate::parse::{ElimKind, Group, SDecl, SKind, STerm};
use crate::syntax::{DeclKind, Declaration, Name, Span, Term, TermKind};

pub struct Resolver<'a> {
    globals: &'a dyn Fn(&str) -> bool,
    splices: HashMap<String, Term>,
    /// Treat every unknown name as a global constant.
    pub open: bool,
}

/// A declaration after resolution, before checking.
#[derive(Debug, Clone)]
pub enum Resolved {
    Decl(Declaration),
    /// `def` without a type: the body's type is inferred under `params`.
    Untyped {
        name: Name,
        params: Vec<(Name, Term)>,
        body: Term,
        span: Span,
    },
    Schema {
        keyword: String,
        name: Name,
        args: Vec<(String, Term, Span)>,
        levels: Option<Vec<u32>>,
        span: Span,
    },
}

type RResult<T> = Result<T, TypeError>;

fn unbound(name: &str, span: Span) -> TypeError {
    TypeError {
        kind: ErrorKind::UnboundName(name.into()),
        span: Some(span),
        names: vec![],
    }
}

fn hint(n: &Option<String>) -> Name {
    n.as_deref().unwrap_or("_").into()
}

impl<'a> Resolver<'a> {
    pub fn new(globals: &'a dyn Fn(&str) -> bool) -> Self {
        Resolver {
            globals,
            splices: HashMap::new(),
            open: false,
        }
    }

    pub fn with_splices(mut self, splices: HashMap<String, Term>) -> Self {
        self.splices = splices;
        self
    }

    pub fn term(&self, t: &STerm, scope: &mut Vec<Option<String>>) -> RResult<Term> {
        let sp = t.span;
        let mk = |k: TermKind| Term::with_span(k, sp);
        let kind = match &t.kind {
            SKind::Name(n) => {
                if let Some(pos) = scope.iter().rev().position(|s| s.as_deref() == Some(n)) {
                    TermKind::Var(pos as u32)
                } else if self.open || (self.globals)(n) {
                    TermKind::Const(n.as_str().into())
                } else {
                    return Err(unbound(n, sp));
                }
            }
            SKind::Splice(n) => match self.splices.get(n) {
                Some(t) => return Ok(t.lift(scope.len() as u32, 0)),
                None => {
                    return Err(TypeError {
                        kind: ErrorKind::SchemaError(format!("unknown template parameter `${n}`")),
                        span: Some(sp),
                        names: vec![],
                    })
                }
            },
            SKind::Universe(l) => TermKind::Universe(*l),
            SKind::Pi(gs, body) | SKind::Sigma(gs, body) => {
                let pi = matches!(t.kind, SKind::Pi(..));
                let binders = self.groups(gs, scope)?;
                let b = self.term(body, scope);
                scope.truncate(scope.len() - binders.len());
                let mut acc = b?;
                for (n, dom) in binders.into_iter().rev() {
                    acc = mk(if pi {
                        TermKind::Pi(n, dom, acc)
                    } else {
                        TermKind::Sigma(n, dom, acc)
                    });
                }
                return Ok(acc);
            }
            SKind::Arrow(a, b) => {
                let a = self.term(a, scope)?;
                scope.push(None);
                let b = self.term(b, scope);
                scope.pop();
                TermKind::Pi("_".into(), a, b?)
            }
            SKind::Lam(names, body) => {
                scope.extend(names.iter().cloned());
                let b = self.term(body, scope);
                scope.truncate(scope.len() - names.len());
                let mut acc = b?;
                for n in names.iter().rev() {
                    acc = mk(TermKind::Lam(hint(n), acc));
                }
                return Ok(acc);
            }
            SKind::App(f, x) => {
                let (ft, xt) = (self.term(f, scope)?, self.term(x, scope)?);
                // A spliced lambda in head position is reduced away so the
                // generated types stay inferable.
                if spliced_head(f) {
                    if let TermKind::Lam(_, body) = ft.kind() {
                        return Ok(body.instantiate(&xt));
                    }
                }
                TermKind::App(ft, xt)
            }
            SKind::Pair(a, b) => TermKind::Pair(self.term(a, scope)?, self.term(b, scope)?),
            SKind::Fst(a) => TermKind::Fst(self.term(a, scope)?),
            SKind::Snd(a) => TermKind::Snd(self.term(a, scope)?),
            SKind::Id(a, x, y) => TermKind::Id(
                self.term(a, scope)?,
                self.term(x, scope)?,
                self.term(y, scope)?,
            ),
            SKind::Refl(a, m) => TermKind::Refl(self.term(a, scope)?, self.term(m, scope)?),
            SKind::J(args) => {
                let mut a = self.terms(args, scope)?.into_iter();
                let mut next = || a.next().expect("J arity");
                TermKind::J {
                    motive: next(),
                    base: next(),
                    lhs: next(),
                    rhs: next(),
                    path: next(),
                }
            }
            SKind::Elim(ek, args) => {
                let mut a = self.terms(args, scope)?.into_iter();
                let mut next = || a.next().expect("eliminator arity");
                match ek {
                    ElimKind::Unit => TermKind::UnitElim {
                        motive: next(),
                        branch: next(),
                        scrut: next(),
                    },
                    ElimKind::Sigma => TermKind::SigmaElim {
                        motive: next(),
                        branch: next(),
                        scrut: next(),
                    },
                    ElimKind::Bool => TermKind::BoolElim {
                        motive: next(),
                        on_true: next(),
                        on_false: next(),
                        scrut: next(),
                    },
                    ElimKind::Empty => TermKind::EmptyElim {
                        motive: next(),
                        scrut: next(),
                    },
                }
            }
            SKind::UnitTy => TermKind::UnitTy,
            SKind::UnitVal => TermKind::UnitVal,
            SKind::BoolTy => TermKind::BoolTy,
            SKind::BoolTrue => TermKind::BoolTrue,
            SKind::BoolFalse => TermKind::BoolFalse,
            SKind::EmptyTy => TermKind::EmptyTy,
        };
        Ok(mk(kind))
    }

    fn terms(&self, ts: &[STerm], scope: &mut Vec<Option<String>>) -> RResult<Vec<Term>> {
        ts.iter().map(|t| self.term(t, scope)).collect()
    }

    /// Resolves binder groups, pushing every bound name onto `scope`. Each
    /// group's domain is resolved once and weakened for later names.
    fn groups(&self, gs: &[Group], scope: &mut Vec<Option<String>>) -> RResult<Vec<(Name, Term)>> {
        let depth = scope.len();
        let mut out = Vec::new();
        for (names, ty) in gs {
            let dom = match self.term(ty, scope) {
                Ok(d) => d,
                Err(e) => {
                    scope.truncate(depth);
                    return Err(e);
                }
            };
            for (k, n) in names.iter().enumerate() {
                out.push((hint(n), dom.lift(k as u32, 0)));
                scope.push(n.clone());
            }
        }
        Ok(out)
    }

    pub fn decl(&self, d: &SDecl, span: Span) -> RResult<Resolved> {
        let mut scope = Vec::new();
        let with_params = |this: &Self, params: &[Group], scope: &mut Vec<Option<String>>| {
            this.groups(params, scope)
        };
        let pis = |params: &[(Name, Term)], body: Term| {
            params.iter().rev().fold(body, |acc, (n, a)| {
                Term::with_span(TermKind::Pi(n.clone(), a.clone(), acc), span)
            })
        };
        match d {
            SDecl::Def {
                name,
                params,
                ty,
                body,
            } => {
                let ps = with_params(self, params, &mut scope)?;
                let body = self.term(body, &mut scope)?;
                let Some(ty) = ty else {
                    return Ok(Resolved::Untyped {
                        name: name.as_str().into(),
                        params: ps,
                        body,
                        span,
                    });
                };
                let ty = self.term(ty, &mut scope)?;
                let lams = ps.iter().rev().fold(body, |acc, (n, _)| {
                    Term::with_span(TermKind::Lam(n.clone(), acc), span)
                });
                Ok(Resolved::Decl(Declaration {
                    name: name.as_str().into(),
                    kind: DeclKind::Definition {
                        ty: pis(&ps, ty),
                        body: lams,
                    },
                    span,
                }))
            }
            SDecl::Axiom { name, params, ty } => {
                let ps = with_params(self, params, &mut scope)?;
                let ty = pis(&ps, self.term(ty, &mut scope)?);
                Ok(Resolved::Decl(Declaration {
                    name: name.as_str().into(),
                    kind: DeclKind::Axiom { ty },
                    span,
                }))
            }
            SDecl::Postulate {
                name,
                params,
                ty,
                marker,
            } => {
                let ps = with_params(self, params, &mut scope)?;
                let ty = pis(&ps, self.term(ty, &mut scope)?);
                Ok(Resolved::Decl(Declaration {
                    name: name.as_str().into(),
                    kind: DeclKind::Postulate {
                        ty,
                        marker: marker.clone(),
                    },
                    span,
                }))
            }
            SDecl::Schema {
                keyword,
                name,
                args,
                levels,
            } => {
                let args = args
                    .iter()
                    .map(|(k, v)| Ok((k.clone(), self.term(v, &mut scope)?, v.span)))
                    .collect::<RResult<Vec<_>>>()?;
                Ok(Resolved::Schema {
                    keyword: keyword.clone(),
                    name: name.as_str().into(),
                    args,
                    levels: levels.clone(),
                    span,
                })
            }
        }
    }
}

/// Parses and resolves a term, treating unknown names as constants.
pub fn read_term(text: &str, names: &[Name]) -> Result<Term, String> {
    let st = crate::parse::parse_term(text, 0, false).map_err(|e| e.message)?;
    let no_globals = |_: &str| false;
    let mut r = Resolver::new(&no_globals);
    r.open = true;
    let mut scope = names.iter().map(|n| Some(n.to_string())).collect();
    r.term(&st, &mut scope).map_err(|e| e.to_string())
}

fn spliced_head(t: &STerm) -> bool {
    match &t.kind {
        SKind::Splice(_) => true,
        SKind::App(f, _) => spliced_head(f),
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::print::print_term;

    #[test]
    fn binders_resolve_to_indices() {
        let t = read_term("fun x y => x", &[]).unwrap();
        assert_eq!(t, Term::lam("x", Term::lam("y", Term::var(1))));
    }

    #[test]
    fn group_domains_are_weakened() {
        let t = read_term("Pi (A : U0) (x y : A) -> Id A x y", &[]).unwrap();
        let expect = Term::pi(
            "A",
            Term::universe(0),
            Term::pi(
                "x",
                Term::var(0),
                Term::pi("y", Term::var(1), Term::id(Term::var(2), Term::var(1), Term::var(0))),
            ),
        );
        assert_eq!(t, expect);
    }

    #[test]
    fn unbound_name_is_reported() {
        let no = |_: &str| false;
        let r = Resolver::new(&no);
        let st = crate::parse::parse_term("fun x => y", 0, false).unwrap();
        let e = r.term(&st, &mut vec![]).unwrap_err();
        assert!(matches!(e.kind, ErrorKind::UnboundName(_)));
    }

    #[test]
    fn print_then_read() {
        for src in [
            "fun x => x",
            "Pi (A : U0) (P : A -> U0) (x y : A) -> Id A x y -> P x -> P y",
            "Sigma (x : U1) -> Sigma (y : x) -> Id x y y",
            "fun f x => f (fst x) (J (fun a b _ => U0) (fun _ => Unit) tt tt (refl Unit tt))",
            "elim Bool (fun _ => U0) Unit Empty true",
            "fst p q",
        ] {
            let t = read_term(src, &[]).unwrap();
            let printed = print_term(&t, &[]);
            let back = read_term(&printed, &[]).unwrap();
            assert_eq!(t, back, "{src} -> {printed}");
        }
    }
}

//! Weak-head normalization and definitional equality.
//!
//! Definitional computation is exactly: β for functions, projections out of
//! pairs, the Σ/𝟏/𝟐 eliminators on canonical scrutinees, J on `refl`, and
//! δ-unfolding of definitions. Axioms, postulates and schema-generated
//! constants never reduce. Conversion adds η for functions and nothing for
//! pairs.

use std::cell::RefCell;
use std::collections::HashMap;

use crate::syntax::{Context, DeclKind, GlobalEnv, Name, Term, TermKind};

pub struct Evaluator<'e> {
    env: &'e GlobalEnv,
    /// whnf of each unfolded definition body, computed once per evaluator.
    unfold_memo: RefCell<HashMap<Name, Term>>,
}

impl<'e> Evaluator<'e> {
    pub fn new(env: &'e GlobalEnv) -> Self {
        Evaluator {
            env,
            unfold_memo: RefCell::new(HashMap::new()),
        }
    }

    pub fn env(&self) -> &'e GlobalEnv {
        self.env
    }

    /// Full weak-head normal form, unfolding definitions at the head.
    pub fn whnf(&self, term: &Term) -> Term {
        let mut t = term.clone();
        loop {
            t = self.whnf_core(&t);
            match self.unfold_head(&t) {
                Some(u) => t = u,
                None => return t,
            }
        }
    }

    /// Weak-head reduction without unfolding the head constant. Scrutinees
    /// of eliminators are still fully normalized so that J and friends can
    /// fire on `refl` hidden behind a definition.
    pub fn whnf_core(&self, term: &Term) -> Term {
        let mut t = term.clone();
        loop {
            let next = match t.kind() {
                TermKind::App(..) => {
                    let (head, args) = t.spine();
                    let head_nf = self.whnf_core(head);
                    if let TermKind::Lam(_, body) = head_nf.kind() {
                        let mut r = body.instantiate(args[0]);
                        for a in &args[1..] {
                            r = Term::app(r, (*a).clone());
                        }
                        r
                    } else if head_nf.ptr_eq(head) {
                        return t;
                    } else {
                        return Term::apps(head_nf, args.into_iter().cloned());
                    }
                }
                TermKind::Fst(p) => match self.whnf(p).kind() {
                    TermKind::Pair(a, _) => a.clone(),
                    _ => return t,
                },
                TermKind::Snd(p) => match self.whnf(p).kind() {
                    TermKind::Pair(_, b) => b.clone(),
                    _ => return t,
                },
                TermKind::J {
                    base, lhs, path, ..
                } => match self.whnf(path).kind() {
                    TermKind::Refl(..) => Term::app(base.clone(), lhs.clone()),
                    _ => return t,
                },
                TermKind::SigmaElim { branch, scrut, .. } => match self.whnf(scrut).kind() {
                    TermKind::Pair(a, b) => Term::app(Term::app(branch.clone(), a.clone()), b.clone()),
                    _ => return t,
                },
                TermKind::UnitElim { branch, scrut, .. } => match self.whnf(scrut).kind() {
                    TermKind::UnitVal => branch.clone(),
                    _ => return t,
                },
                TermKind::BoolElim {
                    on_true,
                    on_false,
                    scrut,
                    ..
                } => match self.whnf(scrut).kind() {
                    TermKind::BoolTrue => on_true.clone(),
                    TermKind::BoolFalse => on_false.clone(),
                    _ => return t,
                },
                _ => return t,
            };
            t = next;
        }
    }

    /// If the head of `t` is a definition, replaces it with its body.
    fn unfold_head(&self, t: &Term) -> Option<Term> {
        let (head, args) = t.spine();
        let TermKind::Const(name) = head.kind() else {
            return None;
        };
        let body = self.unfold_const(name)?;
        Some(Term::apps(body, args.into_iter().cloned()))
    }

    fn unfold_const(&self, name: &Name) -> Option<Term> {
        if let Some(t) = self.unfold_memo.borrow().get(name) {
            return Some(t.clone());
        }
        let body = self.env.unfold(name)?.clone();
        let nf = self.whnf_core(&body);
        self.unfold_memo
            .borrow_mut()
            .insert(name.clone(), nf.clone());
        Some(nf)
    }

    /// Insertion height of the head definition, if the head unfolds.
    fn head_height(&self, t: &Term) -> Option<usize> {
        let (head, _) = t.spine();
        match head.kind() {
            TermKind::Const(n) => match self.env.get(n).map(|d| &d.kind) {
                Some(DeclKind::Definition { .. }) => self.env.height(n),
                _ => None,
            },
            _ => None,
        }
    }

    /// Definitional equality. The context is only used by callers for
    /// reporting; conversion itself is untyped.
    pub fn conv(&self, _ctx: &Context, a: &Term, b: &Term) -> bool {
        self.conv_terms(a, b)
    }

    fn conv_terms(&self, a: &Term, b: &Term) -> bool {
        if a.struct_eq(b) {
            return true;
        }
        let mut a = self.whnf_core(a);
        let mut b = self.whnf_core(b);
        loop {
            if a.struct_eq(&b) {
                return true;
            }
            match (self.head_height(&a), self.head_height(&b)) {
                (None, None) => return self.conv_whnf(&a, &b),
                (Some(ha), Some(hb)) => {
                    if ha == hb && self.same_spine_args(&a, &b) {
                        return true;
                    }
                    if ha >= hb {
                        a = self.whnf_core(&self.unfold_head(&a).expect("head unfolds"));
                    }
                    if hb >= ha {
                        b = self.whnf_core(&self.unfold_head(&b).expect("head unfolds"));
                    }
                }
                (Some(_), None) => {
                    a = self.whnf_core(&self.unfold_head(&a).expect("head unfolds"));
                }
                (None, Some(_)) => {
                    b = self.whnf_core(&self.unfold_head(&b).expect("head unfolds"));
                }
            }
        }
    }

    fn same_spine_args(&self, a: &Term, b: &Term) -> bool {
        let (_, xs) = a.spine();
        let (_, ys) = b.spine();
        xs.len() == ys.len() && xs.iter().zip(ys.iter()).all(|(x, y)| self.conv_terms(x, y))
    }

    /// Both sides are in weak-head normal form with non-unfoldable heads.
    fn conv_whnf(&self, a: &Term, b: &Term) -> bool {
        use TermKind::*;
        match (a.kind(), b.kind()) {
            (Lam(_, x), Lam(_, y)) => self.conv_terms(x, y),
            (Lam(_, x), _) => self.conv_terms(x, &Term::app(b.lift(1, 0), Term::var(0))),
            (_, Lam(_, y)) => self.conv_terms(&Term::app(a.lift(1, 0), Term::var(0)), y),
            (Universe(i), Universe(j)) => i == j,
            (Pi(_, a1, b1), Pi(_, a2, b2)) | (Sigma(_, a1, b1), Sigma(_, a2, b2)) => {
                self.conv_terms(a1, a2) && self.conv_terms(b1, b2)
            }
            (Pair(a1, b1), Pair(a2, b2)) | (Refl(a1, b1), Refl(a2, b2)) => {
                self.conv_terms(a1, a2) && self.conv_terms(b1, b2)
            }
            (Id(a1, x1, y1), Id(a2, x2, y2)) => {
                self.conv_terms(a1, a2) && self.conv_terms(x1, x2) && self.conv_terms(y1, y2)
            }
            (App(f1, x1), App(f2, x2)) => self.conv_terms(f1, f2) && self.conv_terms(x1, x2),
            (Fst(p), Fst(q)) | (Snd(p), Snd(q)) => self.conv_terms(p, q),
            (Var(i), Var(j)) => i == j,
            (Const(m), Const(n)) => m == n,
            (UnitTy, UnitTy)
            | (UnitVal, UnitVal)
            | (BoolTy, BoolTy)
            | (BoolTrue, BoolTrue)
            | (BoolFalse, BoolFalse)
            | (EmptyTy, EmptyTy) => true,
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
                self.conv_terms(p1, p2)
                    && self.conv_terms(l1, l2)
                    && self.conv_terms(r1, r2)
                    && self.conv_terms(d1, d2)
                    && self.conv_terms(m1, m2)
            }
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
            ) => self.conv_terms(s1, s2) && self.conv_terms(b1, b2) && self.conv_terms(m1, m2),
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
            ) => {
                self.conv_terms(s1, s2)
                    && self.conv_terms(t1, t2)
                    && self.conv_terms(f1, f2)
                    && self.conv_terms(m1, m2)
            }
            (EmptyElim { motive: m1, scrut: s1 }, EmptyElim { motive: m2, scrut: s2 }) => {
                self.conv_terms(s1, s2) && self.conv_terms(m1, m2)
            }
            _ => false,
        }
    }
}

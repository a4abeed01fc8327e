use proptest::prelude::*;
use proptest::strategy::ValueTree;
use proptest::test_runner::{Config, TestRunner};

use hott::parse::parse_file;
use hott::print::print_term;
use hott::resolve::read_term;
use hott::{Context, Evaluator, Name, Term, TermKind};

use super::{stdlib_env, subterms};

/// Term skeletons; variable indices are reduced modulo the scope when built.
#[derive(Debug, Clone)]
pub enum Shape {
    Var(u32),
    Univ(u32),
    Const(usize),
    Base(u8),
    Pi(usize, Box<Shape>, Box<Shape>),
    Sigma(usize, Box<Shape>, Box<Shape>),
    Lam(usize, Box<Shape>),
    App(Box<Shape>, Box<Shape>),
    Pair(Box<Shape>, Box<Shape>),
    Fst(Box<Shape>),
    Snd(Box<Shape>),
    Id(Box<Shape>, Box<Shape>, Box<Shape>),
    Refl(Box<Shape>, Box<Shape>),
    J(Vec<Shape>),
    Elim(u8, Vec<Shape>),
}

// Binder names that collide with each other, with constants and with
// the printer's own fresh names.
pub const BINDERS: [&str; 8] = ["x", "y", "x1", "f", "A", "_", "p'", "a-b"];
pub const CONSTS: [&str; 6] = ["f", "g", "concat", "Circle.pt", "x", "std/x"];

pub fn shape() -> impl Strategy<Value = Shape> {
    let leaf = prop_oneof![
        (0u32..6).prop_map(Shape::Var),
        (0u32..4).prop_map(Shape::Univ),
        (0..CONSTS.len()).prop_map(Shape::Const),
        (0u8..7).prop_map(Shape::Base),
    ];
    leaf.prop_recursive(6, 64, 5, |s| {
        let b = || s.clone().prop_map(Box::new);
        let n = || 0..BINDERS.len();
        prop_oneof![
            (n(), b(), b()).prop_map(|(n, a, c)| Shape::Pi(n, a, c)),
            (n(), b(), b()).prop_map(|(n, a, c)| Shape::Sigma(n, a, c)),
            (n(), b()).prop_map(|(n, a)| Shape::Lam(n, a)),
            (b(), b()).prop_map(|(a, c)| Shape::App(a, c)),
            (b(), b()).prop_map(|(a, c)| Shape::Pair(a, c)),
            b().prop_map(Shape::Fst),
            b().prop_map(Shape::Snd),
            (b(), b(), b()).prop_map(|(a, x, y)| Shape::Id(a, x, y)),
            (b(), b()).prop_map(|(a, x)| Shape::Refl(a, x)),
            prop::collection::vec(s.clone(), 5).prop_map(Shape::J),
            (0u8..4, prop::collection::vec(s.clone(), 4)).prop_map(|(k, v)| Shape::Elim(k, v)),
        ]
    })
}

pub fn build(s: &Shape, depth: u32) -> Term {
    let r = |s: &Shape| build(s, depth);
    let under = |s: &Shape| build(s, depth + 1);
    let k = |t: TermKind| Term::new(t);
    match s {
        Shape::Var(i) if depth > 0 => Term::var(i % depth),
        Shape::Var(i) => Term::constant(CONSTS[*i as usize % CONSTS.len()]),
        Shape::Univ(l) => Term::universe(*l),
        Shape::Const(i) => Term::constant(CONSTS[*i]),
        Shape::Base(b) => k(match b {
            0 => TermKind::UnitTy,
            1 => TermKind::UnitVal,
            2 => TermKind::BoolTy,
            3 => TermKind::BoolTrue,
            4 => TermKind::BoolFalse,
            _ => TermKind::EmptyTy,
        }),
        Shape::Pi(n, a, c) => Term::pi(BINDERS[*n], r(a), under(c)),
        Shape::Sigma(n, a, c) => Term::sigma(BINDERS[*n], r(a), under(c)),
        Shape::Lam(n, a) => Term::lam(BINDERS[*n], under(a)),
        Shape::App(a, c) => Term::app(r(a), r(c)),
        Shape::Pair(a, c) => Term::pair(r(a), r(c)),
        Shape::Fst(a) => Term::fst(r(a)),
        Shape::Snd(a) => Term::snd(r(a)),
        Shape::Id(a, x, y) => Term::id(r(a), r(x), r(y)),
        Shape::Refl(a, x) => Term::refl(r(a), r(x)),
        Shape::J(v) => Term::j(r(&v[0]), r(&v[1]), r(&v[2]), r(&v[3]), r(&v[4])),
        Shape::Elim(kind, v) => k(match kind {
            0 => TermKind::SigmaElim {
                motive: r(&v[0]),
                branch: r(&v[1]),
                scrut: r(&v[2]),
            },
            1 => TermKind::UnitElim {
                motive: r(&v[0]),
                branch: r(&v[1]),
                scrut: r(&v[2]),
            },
            2 => TermKind::BoolElim {
                motive: r(&v[0]),
                on_true: r(&v[1]),
                on_false: r(&v[2]),
                scrut: r(&v[3]),
            },
            _ => TermKind::EmptyElim {
                motive: r(&v[0]),
                scrut: r(&v[1]),
            },
        }),
    }
}


/// Names for the free variables of an open generated term; distinct from
/// every generated constant.
pub const OPEN: [&str; 3] = ["u", "v", "w"];

/// Prints `t` and reads it back.
pub fn round_trip(t: &Term, open: usize) -> Result<(), String> {
    let names: Vec<Name> = OPEN[..open].iter().map(|&n| n.into()).collect();
    let text = print_term(t, &names);
    match read_term(&text, &names) {
        Ok(back) if &back == t => Ok(()),
        Ok(back) => Err(format!("{text} read back as {back:?}")),
        Err(e) => Err(format!("{text}: {e}")),
    }
}

/// Round-trips `cases` generated terms; returns the failures.
pub fn round_trip_failures(cases: u32) -> Vec<String> {
    let mut runner = TestRunner::new(Config { cases, ..Config::default() });
    let strat = (shape(), 0usize..=OPEN.len());
    (0..cases)
        .filter_map(|_| {
            let (s, open) = strat.new_tree(&mut runner).expect("generate").current();
            round_trip(&build(&s, open as u32), open).err()
        })
        .collect()
}

/// Feeds `cases` random byte strings to the parser; returns how many panicked.
pub fn fuzz_crashes(cases: u32) -> usize {
    let mut runner = TestRunner::deterministic();
    let strat = prop::collection::vec(any::<u8>(), 0..200);
    let mut crashes = 0;
    for _ in 0..cases {
        let bytes = strat.new_tree(&mut runner).expect("generate").current();
        let text = String::from_utf8_lossy(&bytes).into_owned();
        if std::panic::catch_unwind(|| parse_file(&text, 0)).is_err() {
            crashes += 1;
        }
    }
    crashes
}

pub fn sample(every: usize) -> (std::sync::Arc<hott::GlobalEnv>, Vec<Term>) {
    let env = stdlib_env();
    let picked = subterms(&env).into_iter().step_by(every).collect();
    (env, picked)
}

/// Library subterms whose weak-head normal form is not a fixed point.
pub fn whnf_failures(env: &hott::GlobalEnv, terms: &[Term]) -> Vec<String> {
    let ev = Evaluator::new(env);
    let mut failures = vec![];
    for t in terms {
        let once = ev.whnf(t);
        let twice = ev.whnf(&once);
        if once != twice {
            failures.push(print_term(t, &[]));
        }
    }
    failures
}

/// Violations of reflexivity, symmetry, transitivity through normal forms,
/// and congruence, over the sampled terms.
pub fn conv_failures(env: &hott::GlobalEnv, terms: &[Term]) -> usize {
    let ev = Evaluator::new(env);
    let ctx = Context::new();
    let c = |a: &Term, b: &Term| ev.conv(&ctx, a, b);
    let f = Term::constant("opaque-f");
    let mut failures = 0;
    for (i, t) in terms.iter().enumerate() {
        let nf = ev.whnf(t);
        let core = ev.whnf_core(t);
        // Reflexivity, and reduction preserves the class.
        if !c(t, t) || !c(t, &nf) || !c(&nf, t) || !c(&core, &nf) {
            failures += 1;
        }
        // Congruence for application and identity types.
        if !c(&Term::app(f.clone(), t.clone()), &Term::app(f.clone(), nf.clone()))
            || !c(&Term::id(f.clone(), t.clone(), core.clone()), &Term::id(f.clone(), nf.clone(), t.clone()))
        {
            failures += 1;
        }
        // Symmetry and transitivity against a neighbour.
        let u = &terms[(i * 31 + 7) % terms.len()];
        let fwd = c(t, u);
        if fwd != c(u, t) {
            failures += 1;
        }
        if fwd && !c(&nf, &ev.whnf(u)) {
            failures += 1;
        }
    }
    failures
}

//! Elaboration of `wsusp` and `trunc` declarations into trusted constants.
//!
//! The constants' types are produced from surface-syntax templates in which
//! `$B`, `$C`, `$A`, `$f`, `$g` stand for the (checked, closed) schema
//! parameters. Every generated type is re-checked before it is added, so a
//! template bug surfaces as a schema error rather than an unsound axiom.
//!
//! Computation rules are stated as paths using the library's `concat`,
//! `ap`, `apd` and `transport`, so those must already be in scope.

use std::collections::HashMap;
use std::sync::Arc;

use crate::check::{Checker, ErrorKind, TcResult, TypeError};
use crate::parse::parse_template;
use crate::resolve::{Resolved, Resolver};
use crate::syntax::{Context, DeclKind, Declaration, GlobalEnv, Name, Schema, Span, Term};

pub const DEFAULT_LEVELS: &[u32] = &[0, 1];

const WSUSP_PARAMS: &[&str] = &["B", "C", "A", "f", "g"];
const TRUNC_PARAMS: &[&str] = &["A"];

fn schema_error(span: Span, msg: impl Into<String>) -> TypeError {
    TypeError {
        kind: ErrorKind::SchemaError(msg.into()),
        span: Some(span),
        names: vec![],
    }
}

/// Checks a schema declaration and adds its generated constants to `env`.
/// Returns the schema instance record. On error `env` is left unchanged.
pub fn elaborate(
    env: &mut GlobalEnv,
    keyword: &str,
    name: &Name,
    args: &[(String, Term, Span)],
    levels: Option<&[u32]>,
    span: Span,
) -> TcResult<Declaration> {
    let (schema, expected) = match keyword {
        "wsusp" => (Schema::WSusp, WSUSP_PARAMS),
        "trunc" => (Schema::Trunc, TRUNC_PARAMS),
        other => return Err(schema_error(span, format!("unknown schema `{other}`"))),
    };
    let mut params: HashMap<String, (Term, Span)> = HashMap::new();
    for (k, v, sp) in args {
        if !expected.contains(&k.as_str()) {
            return Err(schema_error(*sp, format!("unknown parameter `{k}` for `{keyword}`")));
        }
        if params.insert(k.clone(), (v.clone(), *sp)).is_some() {
            return Err(schema_error(*sp, format!("parameter `{k}` given twice")));
        }
    }
    if let Some(missing) = expected.iter().find(|k| !params.contains_key(**k)) {
        return Err(schema_error(span, format!("missing parameter `{missing}`")));
    }
    let needed: &[&str] = match schema {
        Schema::WSusp => &["concat", "ap", "apd", "transport"],
        Schema::Trunc => &["transport"],
    };
    if let Some(n) = needed.iter().find(|n| !env.contains(n)) {
        return Err(schema_error(
            span,
            format!("`{keyword}` needs the path library (`{n}` is not in scope; import std/ap)"),
        ));
    }
    let levels: Vec<u32> = levels.unwrap_or(DEFAULT_LEVELS).to_vec();
    let k = *levels.iter().max().expect("levels are nonempty");

    let checker = Checker::new(env);
    let ctx = Context::new();
    let at = |key: &str| params[key].clone();
    let i = match schema {
        Schema::WSusp => {
            let (b, bs) = at("B");
            let (c, cs) = at("C");
            let (a, as_) = at("A");
            let lb = checker.universe_of(&ctx, &b).map_err(|e| with_span(e, bs))?;
            let lc = checker.universe_of(&ctx, &c).map_err(|e| with_span(e, cs))?;
            let la = checker
                .family_level(&ctx, &a, std::slice::from_ref(&b))
                .map_err(|e| with_span(e, as_))?;
            for key in ["f", "g"] {
                let (t, sp) = at(key);
                checker
                    .check(&ctx, &t, &Term::arrow(b.clone(), c.clone()))
                    .map_err(|e| with_span(e, sp))?;
            }
            lb.max(lc).max(la)
        }
        Schema::Trunc => {
            let (a, sp) = at("A");
            checker.universe_of(&ctx, &a).map_err(|e| with_span(e, sp))?
        }
    };
    drop(checker);

    let text = match schema {
        Schema::WSusp => wsusp_template(name, i, k),
        Schema::Trunc => trunc_template(name, i, k),
    };
    let splices: HashMap<String, Term> = params.into_iter().map(|(k, (t, _))| (k, t)).collect();
    let mut work = env.clone();
    let mut generated = Vec::new();
    let file = parse_template(&text, span.file);
    if let Some(e) = file.errors.first() {
        return Err(schema_error(span, format!("internal template error: {}", e.message)));
    }
    for (sdecl, _) in &file.decls {
        let resolved = {
            let known = |n: &str| work.contains(n);
            Resolver::new(&known)
                .with_splices(splices.clone())
                .decl(sdecl, span)
                .map_err(|e| schema_error(span, format!("internal template error: {e}")))?
        };
        let Resolved::Decl(d) = resolved else {
            unreachable!("templates contain only axioms")
        };
        let DeclKind::Axiom { ty } = d.kind else {
            unreachable!("templates contain only axioms")
        };
        let decl = Declaration {
            name: d.name.clone(),
            kind: DeclKind::Generated {
                ty,
                schema: name.clone(),
            },
            span,
        };
        let check = Checker::new(&work).check_declaration(&decl);
        if let Err(e) = check {
            return Err(match e.kind {
                ErrorKind::DuplicateName(_) => e,
                _ => schema_error(span, format!("generated constant `{}` does not check: {e}", d.name)),
            });
        }
        generated.push(d.name.clone());
        work.insert(Arc::new(decl));
    }
    *env = work;
    Ok(Declaration {
        name: name.clone(),
        kind: DeclKind::SchemaInstance {
            schema,
            parameters: splices_in_order(expected, &splices),
            levels,
            generated,
        },
        span,
    })
}

fn splices_in_order(keys: &[&str], m: &HashMap<String, Term>) -> Vec<(Name, Term)> {
    keys.iter().map(|k| ((*k).into(), m[*k].clone())).collect()
}

fn with_span(mut e: TypeError, sp: Span) -> TypeError {
    if e.span.is_none() {
        e.span = Some(sp);
    }
    e
}

fn wsusp_template(n: &str, i: u32, k: u32) -> String {
    let alg = format!(
        "(X : U{k}) (p : $C -> X) (s : Pi (b : $B) -> $A b -> Id X (p ($f b)) (p ($g b)))"
    );
    let fib = format!(
        "(E : {n} -> U{k}) (e : Pi (c : $C) -> E ({n}.pt c)) \
         (d : Pi (b : $B) (a : $A b) -> Id (E ({n}.pt ($g b))) \
            (transport {n} (fun x => E x) ({n}.pt ($f b)) ({n}.pt ($g b)) ({n}.cl b a) (e ($f b))) \
            (e ($g b)))"
    );
    let rec = format!("{n}.rec X p s");
    let ind = format!("{n}.ind E e d");
    let ptf = format!("({n}.pt ($f b))");
    let ptg = format!("({n}.pt ($g b))");
    let tr = format!("(transport {n} (fun x => E x) {ptf} {ptg} ({n}.cl b a))");
    format!(
        "axiom {n} : U{i}
axiom {n}.pt : $C -> {n}
axiom {n}.cl : Pi (b : $B) (a : $A b) -> Id {n} {ptf} {ptg}
axiom {n}.rec : Pi {alg} -> {n} -> X
axiom {n}.rec-beta-pt : Pi {alg} (c : $C) -> Id X ({rec} ({n}.pt c)) (p c)
axiom {n}.rec-beta-cl : Pi {alg} (b : $B) (a : $A b) ->
  Id (Id X ({rec} {ptf}) (p ($g b)))
    (concat X ({rec} {ptf}) ({rec} {ptg}) (p ($g b))
      (ap {n} X ({rec}) {ptf} {ptg} ({n}.cl b a))
      ({n}.rec-beta-pt X p s ($g b)))
    (concat X ({rec} {ptf}) (p ($f b)) (p ($g b))
      ({n}.rec-beta-pt X p s ($f b))
      (s b a))
axiom {n}.ind : Pi {fib} (x : {n}) -> E x
axiom {n}.ind-beta-pt : Pi {fib} (c : $C) -> Id (E ({n}.pt c)) ({ind} ({n}.pt c)) (e c)
axiom {n}.ind-beta-cl : Pi {fib} (b : $B) (a : $A b) ->
  Id (Id (E {ptg}) ({tr} ({ind} {ptf})) (e ($g b)))
    (concat (E {ptg}) ({tr} ({ind} {ptf})) ({ind} {ptg}) (e ($g b))
      (apd {n} (fun x => E x) ({ind}) {ptf} {ptg} ({n}.cl b a))
      ({n}.ind-beta-pt E e d ($g b)))
    (concat (E {ptg}) ({tr} ({ind} {ptf})) ({tr} (e ($f b))) (e ($g b))
      (ap (E {ptf}) (E {ptg}) {tr} ({ind} {ptf}) (e ($f b)) ({n}.ind-beta-pt E e d ($f b)))
      (d b a))
"
    )
}

fn trunc_template(n: &str, i: u32, k: u32) -> String {
    let alg = format!("(X : U{k}) (c : $A -> X) (s : Pi (x y : X) -> Id X x y)");
    let fib = format!(
        "(E : {n} -> U{k}) (e : Pi (a : $A) -> E ({n}.inj a)) \
         (d : Pi (x y : {n}) (u : E x) (v : E y) -> \
            Id (E y) (transport {n} (fun z => E z) x y ({n}.sq x y) u) v)"
    );
    format!(
        "axiom {n} : U{i}
axiom {n}.inj : $A -> {n}
axiom {n}.sq : Pi (x y : {n}) -> Id {n} x y
axiom {n}.rec : Pi {alg} -> {n} -> X
axiom {n}.ind : Pi {fib} (x : {n}) -> E x
axiom {n}.rec-beta-pt : Pi {alg} (a : $A) -> Id X ({n}.rec X c s ({n}.inj a)) (c a)
axiom {n}.ind-beta-pt : Pi {fib} (a : $A) -> Id (E ({n}.inj a)) ({n}.ind E e d ({n}.inj a)) (e a)
"
    )
}

/// Prints the schema declaration in source form.
pub fn print_schema(decl: &Declaration) -> Option<String> {
    let DeclKind::SchemaInstance {
        schema,
        parameters,
        levels,
        ..
    } = &decl.kind
    else {
        return None;
    };
    let kw = match schema {
        Schema::WSusp => "wsusp",
        Schema::Trunc => "trunc",
    };
    let mut s = format!("{kw} {}", decl.name);
    for (k, v) in parameters {
        s.push_str(&format!(" ({k} := {})", crate::print::print_term(v, &[])));
    }
    s.push_str(" at levels");
    for l in levels {
        s.push_str(&format!(" {l}"));
    }
    Some(s)
}

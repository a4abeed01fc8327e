//! Batch driver: import resolution, dependency-ordered checking, diagnostics.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rayon::prelude::*;

use crate::check::{check_and_add, Checker, ErrorKind, TypeError};
use crate::hit;
use crate::parse::{parse_file, SurfaceFile};
use crate::print::print_term;
use crate::resolve::{Resolved, Resolver};
use crate::syntax::{Context, DeclKind, Declaration, GlobalEnv, Span, Term, TermKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Error,
    Warning,
    Note,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Diagnostic {
    pub path: String,
    pub span: Span,
    pub severity: Severity,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
            Severity::Note => "note",
        };
        write!(
            f,
            "{}:{}:{}: {sev}: {}",
            self.path, self.span.start_line, self.span.start_col, self.message
        )
    }
}

#[derive(Debug, Clone, Default)]
pub struct Options {
    /// Explicit library root; overrides `HOTT_STDLIB` and the bundled copy.
    pub stdlib: Option<PathBuf>,
    pub no_stdlib: bool,
    pub jobs: usize,
}

impl Options {
    pub fn stdlib_root(&self) -> Option<PathBuf> {
        if self.no_stdlib {
            return None;
        }
        if let Some(p) = &self.stdlib {
            return Some(p.clone());
        }
        if let Some(p) = std::env::var_os("HOTT_STDLIB") {
            return Some(PathBuf::from(p));
        }
        Some(bundled_stdlib())
    }
}

pub fn bundled_stdlib() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../stdlib")
}

/// A top-level entry of a checked file, in source order.
#[derive(Debug, Clone)]
pub enum Item {
    Decl(Arc<Declaration>),
    Schema(Declaration),
}

#[derive(Debug, Clone)]
pub struct FileReport {
    pub path: String,
    /// Everything in scope after the file: its imports' closures plus its own.
    pub env: Arc<GlobalEnv>,
    pub items: Vec<Item>,
    /// Declarations written in the file (a schema counts once).
    pub decl_count: usize,
    pub ok: bool,
}

#[derive(Debug, Default)]
pub struct Report {
    /// Files in dependency order.
    pub files: Vec<FileReport>,
    pub diagnostics: Vec<Diagnostic>,
    /// I/O failure, unresolved import or cycle.
    pub fatal: bool,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        if self.fatal {
            2
        } else if self.diagnostics.iter().any(|d| d.severity == Severity::Error) {
            1
        } else {
            0
        }
    }

    pub fn summary(&self) -> String {
        let n: usize = self.files.iter().map(|f| f.decl_count).sum();
        format!("checked {n} declarations in {} files", self.files.len())
    }

    pub fn render_diagnostics(&self) -> String {
        self.diagnostics.iter().map(|d| format!("{d}\n")).collect()
    }

    /// All declarations in dependency order, as a single checkable file.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for f in &self.files {
            out.push_str(&format!("-- {}\n", f.path));
            for item in &f.items {
                match item {
                    Item::Decl(d) => {
                        out.push_str(&print_declaration(d));
                        out.push('\n');
                    }
                    Item::Schema(s) => {
                        out.push_str(&hit::print_schema(s).expect("schema item"));
                        out.push('\n');
                        if let DeclKind::SchemaInstance { generated, .. } = &s.kind {
                            for g in generated {
                                let ty = f.env.type_of(g).expect("generated constant");
                                out.push_str(&format!("--   {g} : {}\n", print_term(ty, &[])));
                            }
                        }
                    }
                }
            }
            out.push('\n');
        }
        out
    }
}

pub fn print_declaration(d: &Declaration) -> String {
    match &d.kind {
        DeclKind::Definition { ty, body } => format!(
            "def {} : {} :=\n  {}",
            d.name,
            print_term(ty, &[]),
            print_term(body, &[])
        ),
        DeclKind::Axiom { ty } => format!("axiom {} : {}", d.name, print_term(ty, &[])),
        DeclKind::Postulate { ty, marker } => format!(
            "postulate {} : {}\n  \"{}\"",
            d.name,
            print_term(ty, &[]),
            marker
        ),
        DeclKind::Generated { ty, schema } => {
            format!("-- {} : {} (from {schema})", d.name, print_term(ty, &[]))
        }
        DeclKind::SchemaInstance { .. } => hit::print_schema(d).expect("schema"),
    }
}

struct Source {
    display: String,
    surface: SurfaceFile,
    /// Indices of imported files, in import order.
    deps: Vec<usize>,
}

struct Loader<'a> {
    opts: &'a Options,
    root: Option<PathBuf>,
    files: Vec<Source>,
    by_key: HashMap<PathBuf, usize>,
    diagnostics: Vec<Diagnostic>,
    fatal: bool,
}

impl<'a> Loader<'a> {
    fn load(&mut self, path: &Path, display: String, from: Option<(usize, Span)>) -> Option<usize> {
        let key = fs::canonicalize(path).unwrap_or_else(|_| path.to_path_buf());
        if let Some(&id) = self.by_key.get(&key) {
            return Some(id);
        }
        let text = match fs::read(path) {
            Ok(bytes) => String::from_utf8_lossy(&bytes).into_owned(),
            Err(e) => {
                let (p, span) = match from {
                    Some((i, sp)) => (self.files[i].display.clone(), sp),
                    None => (display.clone(), Span::new(0, (1, 1), (1, 1))),
                };
                self.diagnostics.push(Diagnostic {
                    path: p,
                    span,
                    severity: Severity::Error,
                    message: format!("cannot read `{}`: {e}", path.display()),
                });
                self.fatal = true;
                return None;
            }
        };
        let id = self.files.len();
        let surface = parse_file(&text, id as u32);
        self.by_key.insert(key, id);
        self.files.push(Source {
            display,
            surface,
            deps: vec![],
        });
        let imports = self.files[id].surface.imports.clone();
        let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        for (imp, span) in imports {
            match self.resolve_import(&dir, &imp) {
                Some(p) => {
                    let disp = p.to_string_lossy().into_owned();
                    if let Some(dep) = self.load(&p, disp, Some((id, span))) {
                        self.files[id].deps.push(dep);
                    }
                }
                None => {
                    self.diagnostics.push(Diagnostic {
                        path: self.files[id].display.clone(),
                        span,
                        severity: Severity::Error,
                        message: format!("unresolved import `{imp}`"),
                    });
                    self.fatal = true;
                }
            }
        }
        let _ = self.opts;
        Some(id)
    }

    /// `std/...` names the library; anything else is tried relative to the
    /// importing file first and then against the library root.
    fn resolve_import(&self, dir: &Path, imp: &str) -> Option<PathBuf> {
        let file = if imp.ends_with(".hott") {
            imp.to_string()
        } else {
            format!("{imp}.hott")
        };
        if let Some(rest) = file.strip_prefix("std/") {
            let p = self.root.as_ref()?.join(rest);
            return p.is_file().then_some(p);
        }
        let local = dir.join(&file);
        if local.is_file() {
            return Some(local);
        }
        let p = self.root.as_ref()?.join(&file);
        p.is_file().then_some(p)
    }
}

/// Assigns each file a wave: one more than the deepest import. Returns None
/// and reports on a cycle.
fn waves(files: &[Source], diags: &mut Vec<Diagnostic>) -> Option<Vec<usize>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Active,
        Done,
    }
    fn visit(
        i: usize,
        files: &[Source],
        mark: &mut [Mark],
        wave: &mut [usize],
        diags: &mut Vec<Diagnostic>,
    ) -> bool {
        match mark[i] {
            Mark::Done => return true,
            Mark::Active => {
                diags.push(Diagnostic {
                    path: files[i].display.clone(),
                    span: Span::new(i as u32, (1, 1), (1, 1)),
                    severity: Severity::Error,
                    message: "import cycle".into(),
                });
                return false;
            }
            Mark::New => {}
        }
        mark[i] = Mark::Active;
        let mut w = 0;
        for &d in &files[i].deps {
            if !visit(d, files, mark, wave, diags) {
                return false;
            }
            w = w.max(wave[d] + 1);
        }
        wave[i] = w;
        mark[i] = Mark::Done;
        true
    }
    let mut mark = vec![Mark::New; files.len()];
    let mut wave = vec![0; files.len()];
    for i in 0..files.len() {
        if !visit(i, files, &mut mark, &mut wave, diags) {
            return None;
        }
    }
    Some(wave)
}

fn diag(path: &str, e: &TypeError, fallback: Span) -> Diagnostic {
    Diagnostic {
        path: path.to_string(),
        span: e.span.unwrap_or(fallback),
        severity: Severity::Error,
        message: e.to_string(),
    }
}

/// Checks one file against the union of its imports' environments.
fn check_file(src: &Source, imports: &[&FileReport]) -> (FileReport, Vec<Diagnostic>) {
    let mut diags = Vec::new();
    let path = &src.display;
    for e in &src.surface.errors {
        diags.push(Diagnostic {
            path: path.clone(),
            span: e.span,
            severity: Severity::Error,
            message: e.message.clone(),
        });
    }
    let mut env = GlobalEnv::new();
    let mut poisoned = false;
    for (imp, (_, span)) in imports.iter().zip(&src.surface.imports) {
        if !imp.ok {
            poisoned = true;
            diags.push(Diagnostic {
                path: path.clone(),
                span: *span,
                severity: Severity::Error,
                message: format!("imported file `{}` has errors", imp.path),
            });
            continue;
        }
        for d in imp.env.iter() {
            match env.get(&d.name) {
                Some(existing) if Arc::ptr_eq(existing, d) => {}
                Some(_) => diags.push(Diagnostic {
                    path: path.clone(),
                    span: *span,
                    severity: Severity::Error,
                    message: format!("`{}` is declared by two different imports", d.name),
                }),
                None => {
                    env.insert(d.clone());
                }
            }
        }
    }
    let mut items = Vec::new();
    let decl_count = src.surface.decls.len();
    if !poisoned {
        for (sdecl, span) in &src.surface.decls {
            let resolved = {
                let known = |n: &str| env.contains(n);
                Resolver::new(&known).decl(sdecl, *span)
            };
            let res = resolved.and_then(|r| elaborate(&mut env, r, &mut items));
            if let Err(e) = res {
                diags.push(diag(path, &e, *span));
            }
        }
    }
    let ok = diags.is_empty();
    (
        FileReport {
            path: path.clone(),
            env: Arc::new(env),
            items,
            decl_count,
            ok,
        },
        diags,
    )
}

fn elaborate(env: &mut GlobalEnv, r: Resolved, items: &mut Vec<Item>) -> Result<(), TypeError> {
    match r {
        Resolved::Decl(d) => {
            let name = d.name.clone();
            check_and_add(env, d)?;
            items.push(Item::Decl(env.get(&name).expect("just added").clone()));
        }
        Resolved::Untyped {
            name,
            params,
            body,
            span,
        } => {
            let ty = {
                let c = Checker::new(env);
                let mut ctx = Context::new();
                for (n, a) in &params {
                    c.universe_of(&ctx, a).map_err(|e| spanned(e, span))?;
                    ctx.push(n.clone(), a.clone());
                }
                c.infer(&ctx, &body).map_err(|e| spanned(e, span))?
            };
            let ty = params.iter().rev().fold(ty, |acc, (n, a)| {
                Term::new(TermKind::Pi(n.clone(), a.clone(), acc))
            });
            let body = params.iter().rev().fold(body, |acc, (n, _)| {
                Term::with_span(TermKind::Lam(n.clone(), acc), span)
            });
            let d = Declaration {
                name: name.clone(),
                kind: DeclKind::Definition { ty, body },
                span,
            };
            check_and_add(env, d)?;
            items.push(Item::Decl(env.get(&name).expect("just added").clone()));
        }
        Resolved::Schema {
            keyword,
            name,
            args,
            levels,
            span,
        } => {
            if env.contains(&name) {
                return Err(TypeError {
                    kind: ErrorKind::DuplicateName(name),
                    span: Some(span),
                    names: vec![],
                });
            }
            let inst = hit::elaborate(env, &keyword, &name, &args, levels.as_deref(), span)?;
            items.push(Item::Schema(inst));
        }
    }
    Ok(())
}

fn spanned(mut e: TypeError, sp: Span) -> TypeError {
    if e.span.is_none() {
        e.span = Some(sp);
    }
    e
}

/// A directory stands for every `.hott` file below it, in sorted order.
fn expand_dir(path: &Path) -> Vec<PathBuf> {
    if !path.is_dir() {
        return vec![path.to_path_buf()];
    }
    let mut entries: Vec<PathBuf> = fs::read_dir(path)
        .map(|rd| rd.filter_map(|e| e.ok().map(|e| e.path())).collect())
        .unwrap_or_default();
    entries.sort();
    entries
        .into_iter()
        .flat_map(|p| {
            if p.is_dir() {
                expand_dir(&p)
            } else if p.extension().is_some_and(|e| e == "hott") {
                vec![p]
            } else {
                vec![]
            }
        })
        .collect()
}

/// Loads `paths` and everything they import, then checks all files in
/// dependency order. Independent files are checked in parallel.
pub fn check_paths(paths: &[PathBuf], opts: &Options) -> Report {
    let mut loader = Loader {
        opts,
        root: opts.stdlib_root(),
        files: vec![],
        by_key: HashMap::new(),
        diagnostics: vec![],
        fatal: false,
    };
    for p in paths.iter().flat_map(|p| expand_dir(p)) {
        loader.load(&p, p.to_string_lossy().into_owned(), None);
    }
    let mut report = Report {
        diagnostics: std::mem::take(&mut loader.diagnostics),
        fatal: loader.fatal,
        files: vec![],
    };
    if report.fatal {
        report.diagnostics.sort();
        return report;
    }
    let Some(wave) = waves(&loader.files, &mut report.diagnostics) else {
        report.fatal = true;
        return report;
    };
    let files = loader.files;
    let mut done: Vec<Option<FileReport>> = vec![None; files.len()];
    let max_wave = wave.iter().copied().max().unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs.max(1))
        .build()
        .expect("thread pool");
    let mut order = Vec::new();
    for w in 0..=max_wave {
        let ids: Vec<usize> = (0..files.len()).filter(|&i| wave[i] == w).collect();
        let results: Vec<(usize, FileReport, Vec<Diagnostic>)> = pool.install(|| {
            ids.par_iter()
                .map(|&i| {
                    let imports: Vec<&FileReport> = files[i]
                        .deps
                        .iter()
                        .map(|&d| done[d].as_ref().expect("dependency checked"))
                        .collect();
                    let (r, ds) = check_file(&files[i], &imports);
                    (i, r, ds)
                })
                .collect()
        });
        for (i, r, ds) in results {
            report.diagnostics.extend(ds);
            done[i] = Some(r);
            order.push(i);
        }
    }
    report.files = order
        .into_iter()
        .map(|i| done[i].take().expect("checked"))
        .collect();
    report.diagnostics.sort();
    report
}

/// Names of body-less trusted declarations (axioms and postulates) across
/// the checked files.
pub fn trusted_names(report: &Report) -> BTreeSet<String> {
    report
        .files
        .iter()
        .flat_map(|f| f.items.iter())
        .filter_map(|i| match i {
            Item::Decl(d) if d.is_bodyless_trusted() => Some(d.name.to_string()),
            _ => None,
        })
        .collect()
}

#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::sync::Arc;

use hott::driver::{bundled_stdlib, check_paths, Options, Report};
use hott::resolve::read_term;
use hott::{Context, Evaluator, GlobalEnv, Name, Term};

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

pub fn fixture(rel: &str) -> PathBuf {
    fixtures().join(rel)
}

pub fn stdlib() -> PathBuf {
    bundled_stdlib()
}

pub fn check(paths: &[PathBuf], jobs: usize) -> Report {
    let opts = Options {
        stdlib: Some(stdlib()),
        no_stdlib: false,
        jobs,
    };
    check_paths(paths, &opts)
}

/// Checks one file and returns the environment in scope after it.
pub fn env_after(path: &Path) -> Arc<GlobalEnv> {
    let report = check(&[path.to_path_buf()], 1);
    assert_eq!(report.exit_code(), 0, "{}", report.render_diagnostics());
    let name = path.to_string_lossy();
    report
        .files
        .iter()
        .find(|f| f.path == name)
        .expect("file in report")
        .env
        .clone()
}

/// Environment of the whole bundled library.
pub fn stdlib_env() -> Arc<GlobalEnv> {
    let report = check(&[stdlib()], 1);
    assert_eq!(report.exit_code(), 0, "{}", report.render_diagnostics());
    let mut env = GlobalEnv::new();
    for f in &report.files {
        for d in f.env.iter() {
            env.insert(d.clone());
        }
    }
    Arc::new(env)
}

pub fn term(src: &str, names: &[&str]) -> Term {
    let names: Vec<Name> = names.iter().map(|&n| n.into()).collect();
    read_term(src, &names).unwrap_or_else(|e| panic!("{src}: {e}"))
}

pub fn conv(env: &GlobalEnv, a: &Term, b: &Term) -> bool {
    Evaluator::new(env).conv(&Context::new(), a, b)
}

pub fn conv_src(env: &GlobalEnv, names: &[&str], a: &str, b: &str) -> bool {
    conv(env, &term(a, names), &term(b, names))
}

pub fn hott_files(dir: &Path) -> Vec<PathBuf> {
    let mut out: Vec<PathBuf> = std::fs::read_dir(dir)
        .expect("fixture directory")
        .map(|e| e.expect("entry").path())
        .filter(|p| p.extension().is_some_and(|e| e == "hott"))
        .collect();
    out.sort();
    out
}

/// Line of the `-- error` marker in a negative fixture.
pub fn marked_line(path: &Path) -> u32 {
    let text = std::fs::read_to_string(path).expect("fixture");
    let idx = text
        .lines()
        .position(|l| l.contains("-- error"))
        .unwrap_or_else(|| panic!("{} has no `-- error` marker", path.display()));
    idx as u32 + 1
}

/// Outcome of one negative fixture: `Ok` when it fails at the marked line
/// with a mismatch or universe violation.
pub fn check_negative(path: &Path) -> Result<(), String> {
    let report = check(&[path.to_path_buf()], 1);
    let diags = report.render_diagnostics();
    if report.exit_code() != 1 {
        return Err(format!("exit code {} for {}:\n{diags}", report.exit_code(), path.display()));
    }
    let line = marked_line(path);
    let name = path.to_string_lossy();
    let hit = report.diagnostics.iter().any(|d| {
        d.path == name
            && d.span.start_line == line
            && d.span.start_col > 0
            && (d.message.starts_with("type mismatch") || d.message.starts_with("universe violation"))
    });
    if hit {
        Ok(())
    } else {
        Err(format!("{}: expected a mismatch at line {line}, got:\n{diags}", path.display()))
    }
}

/// Every subterm of every declaration; open ones refer to their binders.
pub fn subterms(env: &GlobalEnv) -> Vec<Term> {
    fn walk(t: &Term, out: &mut Vec<Term>) {
        out.push(t.clone());
        for (c, _) in t.children() {
            walk(c, out);
        }
    }
    let mut out = Vec::new();
    for d in env.iter() {
        if let Some(ty) = d.ty() {
            walk(ty, &mut out);
        }
        if let Some(b) = d.body() {
            walk(b, &mut out);
        }
    }
    out
}

pub mod gen;

//! A small proof checker for homotopy type theory: intensional Martin-Löf
//! type theory with J, cumulative Russell universes and function η, plus
//! higher inductive types generated from schemas whose computation rules
//! hold only propositionally.

pub mod check;
pub mod driver;
pub mod eval;
pub mod hit;
pub mod parse;
pub mod print;
pub mod resolve;
pub mod syntax;

pub use check::{Checker, ErrorKind, TypeError};
pub use eval::Evaluator;
pub use syntax::{Context, DeclKind, Declaration, GlobalEnv, Name, Span, Term, TermKind};

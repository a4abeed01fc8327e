use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use hott::driver::{check_paths, Options};

#[derive(Parser)]
#[command(name = "hott", version, about = "Proof checker for homotopy type theory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Type-check files and everything they import.
    Check {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
        /// Library root (default: $HOTT_STDLIB, then the bundled library).
        #[arg(long, value_name = "DIR", conflicts_with = "no_stdlib")]
        stdlib: Option<PathBuf>,
        /// Do not resolve imports against any library root.
        #[arg(long)]
        no_stdlib: bool,
        /// Print every checked declaration, including schema-generated constants.
        #[arg(long)]
        dump_elaborated: bool,
        /// Print a one-line count of checked declarations and files.
        #[arg(long)]
        summary: bool,
        /// Worker threads for checking independent files.
        #[arg(long, short = 'j', default_value_t = 1, value_name = "N")]
        jobs: usize,
    },
}

fn main() -> ExitCode {
    let Command::Check {
        paths,
        stdlib,
        no_stdlib,
        dump_elaborated,
        summary,
        jobs,
    } = Cli::parse().command;
    let opts = Options {
        stdlib,
        no_stdlib,
        jobs,
    };
    let report = check_paths(&paths, &opts);
    eprint!("{}", report.render_diagnostics());
    if dump_elaborated && report.exit_code() == 0 {
        print!("{}", report.dump());
    }
    if summary {
        println!("{}", report.summary());
    }
    ExitCode::from(report.exit_code() as u8)
}

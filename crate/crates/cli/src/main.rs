//! `resolab`: batch front-end for the spectral studies in `resolab-core`.

mod args;
mod commands;
mod config;
mod output;

use std::ffi::OsString;
use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use resolab_core::{Error, Tolerances};
use serde_json::{json, Map, Value};

use args::Cli;

const EXIT_USAGE: u8 = 1;
const EXIT_VALIDATION: u8 = 2;
const EXIT_ACCURACY: u8 = 3;

fn main() -> ExitCode {
    let argv: Vec<OsString> = std::env::args_os().collect();
    let argv = match config::expand(argv) {
        Ok(a) => a,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };

    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs.into()).build_global() {
            eprintln!("error: cannot start worker pool: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    if let Some(dir) = &cli.out {
        if let Err(e) = std::fs::create_dir_all(dir) {
            eprintln!("error: output directory {} is not writable: {e}", dir.display());
            return ExitCode::from(EXIT_VALIDATION);
        }
    }

    let mut tol = Tolerances::DEFAULT;
    if let Some(seed) = cli.seed {
        tol.seed = seed;
    }

    let mut out = match commands::run(&cli.command, &tol) {
        Ok(out) => out,
        Err(e) => return report_error(&e),
    };

    emit(&out.payload);
    if let Some(dir) = &cli.out {
        let common = common_metadata(&argv, &tol);
        if let Err(e) = output::write(dir, cli.format, &mut out, &common) {
            eprintln!("error: writing results to {}: {e}", dir.display());
            return ExitCode::from(EXIT_VALIDATION);
        }
    }
    ExitCode::SUCCESS
}

/// Prints to stdout, ignoring a closed pipe.
fn emit(value: &Value) {
    let text = serde_json::to_string_pretty(value).expect("json serializes");
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn report_error(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    if let Error::SearchDepth { partial, .. } = e {
        let pairs: Vec<Value> =
            partial.iter().map(|(m, eps, r)| json!({ "m": m, "eps": eps, "residual": r })).collect();
        emit(&json!({ "partial": pairs }));
    }
    ExitCode::from(if e.is_validation() { EXIT_VALIDATION } else { EXIT_ACCURACY })
}

/// Tool version, the effective arguments (output location excluded) and the
/// tolerances; no timestamps, so reruns are byte-identical.
fn common_metadata(argv: &[OsString], tol: &Tolerances) -> Map<String, Value> {
    let mut echo = Vec::new();
    let mut skip = false;
    for arg in argv.iter().skip(1) {
        let a = arg.to_string_lossy();
        if skip {
            skip = false;
            continue;
        }
        if a == "--out" {
            skip = true;
            continue;
        }
        if a.starts_with("--out=") {
            continue;
        }
        echo.push(a.into_owned());
    }
    let mut m = Map::new();
    m.insert("tool".into(), json!("resolab"));
    m.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    m.insert("arguments".into(), json!(echo));
    m.insert("tolerances".into(), serde_json::to_value(tol).expect("tolerances serialize"));
    m
}

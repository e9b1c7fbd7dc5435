//! Runs a scenario in-process, the way the `modlab` binary does, and prints
//! the report's verdict and the CSV table names.
//!
//! Usage: `scenario_runner <command> [key=value ...]`, e.g.
//! `scenario_runner zoo-dump zoo.samples=5`.

use clap::ValueEnum;
use modlab::cli::{execute, exit_code, report, resolve, validate, Command};

fn main() {
    let mut args = std::env::args().skip(1);
    let cmd = args
        .next()
        .and_then(|s| Command::from_str(&s, false).ok())
        .unwrap_or(Command::ZooDump);
    let overrides: Vec<String> = args.collect();
    let sc = match resolve(None, &overrides) {
        Ok(sc) => sc,
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(2);
        }
    };
    let issues = validate(cmd, &sc);
    if !issues.is_empty() {
        eprintln!("{}", serde_json::to_string_pretty(&issues).unwrap());
        std::process::exit(2);
    }
    let outcome = execute(cmd, &sc).expect("validated scenario runs");
    let rep = report(cmd, &sc, &outcome);
    println!("verdict {}", rep["verdict"]);
    for t in &outcome.tables {
        println!("table {} ({} rows)", t.name, t.rows.len());
    }
    std::process::exit(exit_code(&outcome));
}

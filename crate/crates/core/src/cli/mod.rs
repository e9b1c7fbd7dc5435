//! The `modlab` scenario runner.
//!
//! `modlab <command> --config <path> [--set key=value ...] [--out <dir>]
//! [--threads N] [--seed S]` reads one JSON scenario, applies the overrides,
//! validates everything up front and writes `report.json`, `tables/*.csv`
//! and `plots/*.svg` under the output directory.
//!
//! Exit status: 0 when every verdict passes, 1 on a failed verdict, 2 on an
//! invalid configuration (with a JSON error list on stderr and in
//! `errors.json`), 3 when a solver run is not certified, 4 on any other
//! runtime error.

mod commands;
mod scenario;
pub mod svg;

use std::path::{Path, PathBuf};

use clap::Parser;
use serde::Serialize;
use serde_json::{json, Value};

pub use commands::{
    boundary_points, execute, linearity_deviation, resolution_grids, zoo_samples, Outcome, Table, LINEARITY_TOL,
    ZOO_K_O_TOL,
};
pub use scenario::{
    apply_override, resolve, ClosureConfig, Command, FamilyConfig, MapConfig, ModulusConfig, PoletskyConfig,
    ScanConfig, Scenario, ZooConfig,
};

use crate::error::{Error, Result};
use crate::geom::{norm, Annulus};
use crate::mapzoo::{MapFamily, MapKind};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_UNCERTIFIED: i32 = 3;
pub const EXIT_RUNTIME: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "modlab", version, about = "Discrete modulus laboratory: scenario runner")]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    /// Scenario JSON file.
    #[arg(long)]
    pub config: PathBuf,
    /// Dotted-path override applied on top of the file, e.g. `modulus.p=3`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

/// One entry of the machine-readable error list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConfigIssue {
    pub field: String,
    pub message: String,
}

impl ConfigIssue {
    fn new(field: impl Into<String>, message: impl ToString) -> Self {
        ConfigIssue {
            field: field.into(),
            message: message.to_string(),
        }
    }
}

struct Issues(Vec<ConfigIssue>);

impl Issues {
    fn check(&mut self, field: &str, ok: bool, message: impl FnOnce() -> String) {
        if !ok {
            self.0.push(ConfigIssue::new(field, message()));
        }
    }

    fn result(&mut self, field: &str, r: Result<()>) {
        if let Err(e) = r {
            self.0.push(ConfigIssue::new(field, e));
        }
    }
}

fn maps(sc: &Scenario, ms: &[u32], alphas: &[f64], kind: MapKind, field: &str, is: &mut Issues) -> Vec<MapFamily> {
    is.check(&format!("{field}.ms"), !ms.is_empty(), || "needs at least one m".into());
    let mut out = Vec::new();
    for &alpha in alphas {
        for &m in ms {
            match MapFamily::new(kind, m, alpha, sc.map.dim, sc.map.p) {
                Ok(f) => out.push(f),
                Err(e) => is.0.push(ConfigIssue::new("map", format!("m = {m}, alpha = {alpha}: {e}"))),
            }
        }
    }
    out
}

fn check_radii(field: &str, r0: f64, radii: &[f64], directions: Option<usize>, is: &mut Issues) {
    is.check(&format!("{field}.r0"), r0 > 0.0 && r0.is_finite(), || format!("r0 = {r0} must be positive"));
    for (i, r) in radii.iter().enumerate() {
        is.check(&format!("{field}.radii.{i}"), *r > 0.0 && r.is_finite(), || format!("radius {r} must be positive"));
    }
    is.check(&format!("{field}.directions"), directions != Some(0), || "needs at least one direction".into());
}

/// Every problem with the scenario for this command; empty when runnable.
pub fn validate(cmd: Command, sc: &Scenario) -> Vec<ConfigIssue> {
    let mut is = Issues(Vec::new());
    if let Some(c) = sc.command {
        is.check("command", c == cmd, || {
            format!("scenario is for `{}`, invoked as `{}`", c.name(), cmd.name())
        });
    }
    is.check("threads", sc.threads >= 1, || "threads must be at least 1".into());
    is.result("solver", sc.solver.validate());
    let n = sc.map.dim;
    match cmd {
        Command::Modulus => {
            let mc = &sc.modulus;
            is.check("modulus.p", mc.p >= 1.0 && mc.p.is_finite(), || format!("p = {} must be >= 1", mc.p));
            is.result("modulus.grid", mc.grid.validate());
            for (i, r) in mc.resolutions.iter().enumerate() {
                is.check(&format!("modulus.resolutions.{i}"), *r >= 1, || "resolution must be positive".into());
            }
            is.check("modulus.tolerance", mc.tolerance > 0.0, || "tolerance must be positive".into());
            if let Some(e) = mc.expected {
                is.check("modulus.expected", e.is_finite() && e != 0.0, || "expected value must be finite and non-zero".into());
            }
            let d = mc.grid.lo.len();
            match &mc.family {
                FamilyConfig::Connecting { e, f, domain } => {
                    is.result("modulus.family.e", e.validate(d));
                    is.result("modulus.family.f", f.validate(d));
                    match domain {
                        crate::curve::Domain::Annulus(a) => is.result("modulus.family.domain", check_annulus(a, d)),
                        crate::curve::Domain::Region(r) => is.result("modulus.family.domain", r.validate(d)),
                        crate::curve::Domain::Mask(m) => {
                            let cells = mc.grid.cells.iter().product::<usize>();
                            is.check("modulus.family.domain", m.len() == cells, || {
                                format!("mask has {} entries for {cells} cells", m.len())
                            })
                        }
                        crate::curve::Domain::Whole => {}
                    }
                }
                FamilyConfig::Radial { annulus, count, step } => {
                    is.result("modulus.family.annulus", check_annulus(annulus, d));
                    is.check("modulus.family.count", *count >= 1, || "count must be positive".into());
                    is.check("modulus.family.step", *step > 0.0, || "step must be positive".into());
                }
                FamilyConfig::File { path } => {
                    is.check("modulus.family.path", Path::new(path).is_file(), || format!("no such file `{path}`"));
                }
            }
        }
        Command::VerifyPoletsky => {
            let pc = &sc.poletsky;
            is.check("poletsky.alphas", !pc.alphas.is_empty(), || "needs at least one alpha".into());
            is.check("poletsky.shells", !pc.shells.is_empty(), || "needs at least one shell".into());
            let fam = maps(sc, &pc.ms, &pc.alphas, sc.map.kind, "poletsky", &mut is);
            is.check("poletsky.y0", pc.y0.len() == n, || format!("y0 has {} coordinates, map dimension is {n}", pc.y0.len()));
            is.check("poletsky.y0", pc.y0.iter().all(|c| c.is_finite()), || "y0 must be finite".into());
            let image = fam.iter().map(MapFamily::image_radius).fold(f64::INFINITY, f64::min);
            for (i, &(r1, r2)) in pc.shells.iter().enumerate() {
                let field = format!("poletsky.shells.{i}");
                is.check(&field, r1 > 0.0 && r1 < r2 && r2.is_finite(), || format!("need 0 < r1 < r2, got ({r1}, {r2})"));
                if pc.y0.len() == n {
                    is.check(&field, norm(&pc.y0) + r2 <= image * (1.0 + 1e-12), || {
                        format!("shell of outer radius {r2} around y0 leaves the image ball of radius {image}")
                    });
                }
            }
            if let Some(s) = &pc.sampling {
                is.check("poletsky.sampling.curves", s.curves >= 1, || "curves must be positive".into());
                is.check("poletsky.sampling.cells", s.cells >= 2, || "cells must be at least 2".into());
                is.check("poletsky.sampling.step", s.step > 0.0, || "step must be positive".into());
                is.check("poletsky.sampling.etas", !s.etas.is_empty(), || "needs at least one eta".into());
                is.result("poletsky.sampling.solver", s.solver.validate());
            }
        }
        Command::Equicontinuity => {
            let c = &sc.scan;
            let mut fam = maps(sc, &c.ms, &[sc.map.alpha], sc.map.kind, "scan", &mut is);
            check_radii("scan", c.r0, &c.radii, c.directions, &mut is);
            is.check("scan.x0", c.x0.len() == n, || format!("x0 has {} coordinates, map dimension is {n}", c.x0.len()));
            if c.contrast {
                fam.extend(maps(sc, &c.ms, &[sc.map.alpha], MapKind::Scaling, "scan", &mut is));
            }
            let reach = norm(&c.x0) + 2.0 * c.r0;
            for f in &fam {
                if c.x0.len() == n && reach > f.domain_radius() {
                    is.0.push(ConfigIssue::new(
                        "scan.r0",
                        format!("B(x0, 2 r0) reaches radius {reach}, beyond the domain of {}", f.id()),
                    ));
                    break;
                }
            }
        }
        Command::ClosureScan => {
            let c = &sc.closure;
            let fam = maps(sc, &c.ms, &[sc.map.alpha], sc.map.kind, "closure", &mut is);
            check_radii("closure", c.r0, &c.radii, c.directions, &mut is);
            for (i, b) in c.boundary.iter().enumerate() {
                is.check(&format!("closure.boundary.{i}"), b.len() == n, || {
                    format!("point has {} coordinates, map dimension is {n}", b.len())
                });
            }
            if c.boundary.is_empty() && fam.iter().any(|f| !f.domain_radius().is_finite()) {
                is.0.push(ConfigIssue::new("closure.boundary", "required for an unbounded domain"));
            }
        }
        Command::ZooDump => {
            maps(sc, &[sc.map.m], &[sc.map.alpha], sc.map.kind, "map", &mut is);
            is.check("zoo.fd_step", sc.zoo.fd_step > 0.0 && sc.zoo.fd_step < 1e-2, || {
                "fd_step must lie in (0, 0.01)".into()
            });
        }
    }
    is.0
}

fn check_annulus(a: &Annulus, dim: usize) -> Result<()> {
    a.validate()?;
    crate::geom::check_dim(dim, a.dim())
}

/// Exit status for a finished run: non-certification dominates, then the
/// verdict.
pub fn exit_code(o: &Outcome) -> i32 {
    if !o.certified {
        EXIT_UNCERTIFIED
    } else if !o.pass {
        EXIT_FAIL
    } else {
        EXIT_PASS
    }
}

/// The JSON report: resolved scenario, seed, verdict and results. Contains
/// no timings or paths, so equal inputs give equal bytes.
pub fn report(cmd: Command, sc: &Scenario, o: &Outcome) -> Value {
    json!({
        "tool": "modlab",
        "version": env!("CARGO_PKG_VERSION"),
        "command": cmd.name(),
        "seed": sc.seed,
        "scenario": sc,
        "verdict": {
            "pass": o.pass,
            "certified": o.certified,
            "exit_code": exit_code(o),
        },
        "tables": o.tables.iter().map(|t| format!("tables/{}.csv", t.name)).collect::<Vec<_>>(),
        "plots": o.plots.iter().map(|p| format!("plots/{}.svg", p.0)).collect::<Vec<_>>(),
        "results": o.results,
    })
}

pub fn write_table(path: &Path, t: &Table) -> Result<()> {
    let io = |e: csv::Error| Error::Io(e.to_string());
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(&t.header).map_err(io)?;
    for row in &t.rows {
        w.write_record(row).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `report.json`, `tables/*.csv` and `plots/*.svg` under `dir`.
pub fn write_outputs(dir: &Path, report: &Value, o: &Outcome) -> Result<()> {
    std::fs::create_dir_all(dir.join("tables"))?;
    let mut text = serde_json::to_string_pretty(report).map_err(|e| Error::Io(e.to_string()))?;
    text.push('\n');
    std::fs::write(dir.join("report.json"), text)?;
    for t in &o.tables {
        write_table(&dir.join("tables").join(format!("{}.csv", t.name)), t)?;
    }
    if !o.plots.is_empty() {
        std::fs::create_dir_all(dir.join("plots"))?;
        for (name, svg) in &o.plots {
            std::fs::write(dir.join("plots").join(format!("{name}.svg")), svg)?;
        }
    }
    Ok(())
}

fn fail(out: &Path, code: i32, issues: Vec<ConfigIssue>) -> i32 {
    let doc = json!({ "exit_code": code, "errors": issues });
    let text = serde_json::to_string_pretty(&doc).unwrap_or_default();
    eprintln!("{text}");
    if std::fs::create_dir_all(out).is_ok() {
        let _ = std::fs::write(out.join("errors.json"), text + "\n");
    }
    code
}

fn classify(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::Contract(_) | Error::DimensionMismatch { .. } | Error::Io(_) => EXIT_CONFIG,
        _ => EXIT_RUNTIME,
    }
}

/// Full command-line entry point; returns the process exit status.
pub fn main_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_PASS };
        }
    };
    let text = match std::fs::read_to_string(&cli.config) {
        Ok(t) => t,
        Err(e) => return fail(&cli.out, EXIT_CONFIG, vec![ConfigIssue::new("config", format!("{}: {e}", cli.config.display()))]),
    };
    let mut overrides = cli.set.clone();
    overrides.extend(cli.seed.map(|s| format!("seed={s}")));
    overrides.extend(cli.threads.map(|t| format!("threads={t}")));
    let sc = match resolve(Some(&text), &overrides) {
        Ok(sc) => sc,
        Err(e) => return fail(&cli.out, EXIT_CONFIG, vec![ConfigIssue::new("config", e)]),
    };
    let issues = validate(cli.command, &sc);
    if !issues.is_empty() {
        return fail(&cli.out, EXIT_CONFIG, issues);
    }
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(sc.threads).build() {
        Ok(p) => p,
        Err(e) => return fail(&cli.out, EXIT_RUNTIME, vec![ConfigIssue::new("threads", e)]),
    };
    let outcome = match pool.install(|| execute(cli.command, &sc)) {
        Ok(o) => o,
        Err(e) => return fail(&cli.out, classify(&e), vec![ConfigIssue::new(cli.command.name(), e)]),
    };
    let rep = report(cli.command, &sc, &outcome);
    if let Err(e) = write_outputs(&cli.out, &rep, &outcome) {
        return fail(&cli.out, EXIT_RUNTIME, vec![ConfigIssue::new("out", e)]);
    }
    let code = exit_code(&outcome);
    let status = match code {
        EXIT_PASS => "pass",
        EXIT_FAIL => "fail",
        _ => "not certified",
    };
    println!("{} {}: {status} ({})", cli.command.name(), sc.name, cli.out.join("report.json").display());
    code
}

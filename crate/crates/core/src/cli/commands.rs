use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde_json::{json, Value};

use super::scenario::{Command, FamilyConfig, Scenario};
use super::svg::{BarChart, LineChart, Series};
use crate::curve::{parse_family, radial_family};
use crate::error::{Error, Result};
use crate::geom::{norm, sphere_directions, ExtPoint};
use crate::mapzoo::{MapFamily, MapKind};
use crate::modsolve::{modulus_connecting_with, modulus_finite_with, Grid};
use crate::verify::{
    closure_scan, default_directions, default_radii, equicontinuity_scan, verify_poletsky, EquicontinuityReport,
    PoletskySampling,
};

/// Relative agreement required between the closed-form and finite-difference
/// outer dilatation in a zoo dump.
pub const ZOO_K_O_TOL: f64 = 1e-3;

/// Allowed deviation of the scaling family's displacement from `m` times
/// the displacement at the smallest `m`.
pub const LINEARITY_TOL: f64 = 0.01;

/// Width of the excluded neighbourhood of the singular loci when sampling.
const ZOO_EXCLUSION: f64 = 1e-3;

const SCAN_RADII: usize = 8;
const CLOSURE_POINTS: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(name: &str, header: &[&str]) -> Self {
        Table {
            name: name.into(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }
}

/// Everything a command produces, before it is written to disk.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub command: Command,
    pub results: Value,
    pub tables: Vec<Table>,
    /// File stem and SVG text.
    pub plots: Vec<(String, String)>,
    pub pass: bool,
    pub certified: bool,
}

fn num(x: f64) -> String {
    format!("{x}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// Runs one command of a validated scenario.
pub fn execute(cmd: Command, sc: &Scenario) -> Result<Outcome> {
    match cmd {
        Command::Modulus => modulus(sc),
        Command::VerifyPoletsky => poletsky(sc),
        Command::Equicontinuity => equicontinuity(sc),
        Command::ClosureScan => closure(sc),
        Command::ZooDump => zoo_dump(sc),
    }
}

/// The base grid followed by one grid per requested resolution, each with
/// the base aspect ratio and `r` cells along the first axis.
pub fn resolution_grids(base: &Grid, resolutions: &[usize]) -> Result<Vec<Grid>> {
    if resolutions.is_empty() {
        base.validate()?;
        return Ok(vec![base.clone()]);
    }
    resolutions
        .iter()
        .map(|&r| {
            let cells = base
                .cells
                .iter()
                .map(|&c| ((c as f64) * r as f64 / base.cells[0] as f64).round().max(1.0) as usize)
                .collect::<Vec<_>>();
            Grid::new(base.lo.clone(), base.hi.clone(), cells)
        })
        .collect()
}

fn modulus(sc: &Scenario) -> Result<Outcome> {
    let mc = &sc.modulus;
    let family = match &mc.family {
        FamilyConfig::Radial { annulus, count, step } => Some(radial_family(annulus, *count, *step)?),
        FamilyConfig::File { path } => Some(parse_family(&std::fs::read_to_string(path)?)?),
        FamilyConfig::Connecting { .. } => None,
    };
    let mut table = Table::new(
        "modulus",
        &["cells", "value", "lower_bound", "gap", "iterations", "constraints", "active", "certified", "rel_error"],
    );
    let mut runs = Vec::new();
    let mut points = Vec::new();
    let mut certified = true;
    let mut last_rel = None;
    for g in resolution_grids(&mc.grid, &mc.resolutions)? {
        let res = match (&family, mc.family.connecting()) {
            (Some(f), _) => modulus_finite_with(f, &g, mc.p, &sc.solver)?,
            (None, Some(spec)) => modulus_connecting_with(&spec, &g, mc.p, &sc.solver)?,
            (None, None) => unreachable!("non-connecting families are materialized"),
        };
        let rel = mc.expected.map(|e| (res.value - e).abs() / e.abs());
        certified &= res.certified;
        last_rel = rel;
        let cells = g.cells.iter().map(|c| c.to_string()).collect::<Vec<_>>().join("x");
        table.rows.push(vec![
            cells.clone(),
            num(res.value),
            num(res.lower_bound),
            num(res.gap),
            res.iterations.to_string(),
            res.constraints.to_string(),
            res.active_constraints.to_string(),
            res.certified.to_string(),
            opt(rel),
        ]);
        points.push((g.cells[0] as f64, res.value, res.lower_bound));
        let mut entry = res.to_json(mc.include_density);
        entry["cells"] = json!(g.cells);
        entry["rel_error"] = json!(rel);
        runs.push(entry);
    }
    let pass = last_rel.is_none_or(|r| r <= mc.tolerance);
    let mut plots = Vec::new();
    if points.len() > 1 {
        let mut series = vec![
            Series {
                label: "modulus".into(),
                points: points.iter().map(|p| (p.0, p.1)).collect(),
            },
            Series {
                label: "dual bound".into(),
                points: points.iter().map(|p| (p.0, p.2)).collect(),
            },
        ];
        if let Some(e) = mc.expected {
            series.push(Series {
                label: "expected".into(),
                points: points.iter().map(|p| (p.0, e)).collect(),
            });
        }
        let chart = LineChart {
            title: format!("{}: modulus vs resolution (p = {})", sc.name, mc.p),
            x_label: "cells along first axis".into(),
            y_label: "modulus".into(),
            log_x: true,
            log_y: false,
            series,
        };
        plots.push(("modulus_vs_resolution".into(), chart.render()));
    }
    Ok(Outcome {
        command: Command::Modulus,
        results: json!({
            "runs": runs,
            "expected": mc.expected,
            "tolerance": mc.tolerance,
            "final_rel_error": last_rel,
        }),
        tables: vec![table],
        plots,
        pass,
        certified,
    })
}

fn poletsky(sc: &Scenario) -> Result<Outcome> {
    let pc = &sc.poletsky;
    let y0 = ExtPoint::finite(pc.y0.clone())?;
    let mut header = vec!["map", "m", "alpha", "r1", "r2", "image_curves", "lifted_curves", "dropped", "lhs", "lhs_gap"];
    header.extend(["lhs_certified", "min_rhs", "pass", "degenerate"]);
    let mut table = Table::new("poletsky", &header);
    let mut reports = Vec::new();
    let (mut groups, mut lhs, mut rhs) = (Vec::new(), Vec::new(), Vec::new());
    let (mut pass, mut certified) = (true, true);
    for &alpha in &pc.alphas {
        for &m in &pc.ms {
            let map = sc.map.build(m, alpha)?;
            let q = map.q_weight();
            let sampling = pc.sampling.clone().unwrap_or_else(|| PoletskySampling::for_dim(map.dim));
            for &(r1, r2) in &pc.shells {
                let rep = verify_poletsky(&map, &q, &y0, r1, r2, &sampling)?;
                pass &= rep.pass;
                certified &= rep.lhs_certified;
                let mut row = vec![
                    rep.map.clone(),
                    m.to_string(),
                    num(alpha),
                    num(r1),
                    num(r2),
                    rep.image_curves.to_string(),
                    rep.lifted_curves.to_string(),
                    rep.dropped.len().to_string(),
                    num(rep.lhs),
                    num(rep.lhs_gap),
                    rep.lhs_certified.to_string(),
                    num(rep.min_rhs),
                    rep.pass.to_string(),
                    rep.degenerate.to_string(),
                ];
                for r in &rep.rhs {
                    let col = format!("rhs_{}", eta_name(r.eta));
                    let idx = match table.header.iter().position(|h| *h == col) {
                        Some(i) => i,
                        None => {
                            table.header.push(col);
                            table.header.len() - 1
                        }
                    };
                    row.resize(row.len().max(idx + 1), String::new());
                    row[idx] = num(r.value);
                }
                table.rows.push(row);
                groups.push(format!("m={m} α={alpha} ({r1},{r2})"));
                lhs.push(rep.lhs);
                rhs.push(rep.min_rhs);
                reports.push(rep);
            }
        }
    }
    let width = table.header.len();
    for row in &mut table.rows {
        row.resize(width, String::new());
    }
    let chart = BarChart {
        title: format!("{}: lifted modulus vs weighted bound", sc.name),
        y_label: "value".into(),
        log_y: true,
        groups,
        bars: vec![("lhs".into(), lhs), ("min rhs".into(), rhs)],
    };
    Ok(Outcome {
        command: Command::VerifyPoletsky,
        results: json!({ "checks": reports, "all_pass": pass }),
        tables: vec![table],
        plots: vec![("poletsky_bars".into(), chart.render())],
        pass,
        certified,
    })
}

fn eta_name(k: crate::verify::EtaKind) -> String {
    serde_json::to_value(k)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_else(|| format!("{k:?}"))
}

fn scan_table(name: &str, radii: &[f64]) -> Table {
    let mut t = Table::new(
        name,
        &["family", "m", "map", "s", "q_norm", "c_hat", "c_hat_running", "skipped"],
    );
    t.header.extend((0..radii.len()).map(|i| format!("omega_{i}")));
    t
}

fn push_scan_rows(t: &mut Table, label: &str, rep: &EquicontinuityReport) {
    for row in &rep.rows {
        let mut r = vec![
            label.to_string(),
            row.m.to_string(),
            row.map.clone(),
            num(row.s),
            opt(row.q_norm),
            opt(row.c_hat),
            opt(row.c_hat_running),
            row.skipped.to_string(),
        ];
        r.extend(row.omega.iter().map(|&w| num(w)));
        t.rows.push(r);
    }
}

fn omega_chart(title: String, rep: &EquicontinuityReport) -> String {
    LineChart {
        title,
        x_label: "radius".into(),
        y_label: "modulus of continuity".into(),
        log_x: true,
        log_y: true,
        series: rep
            .rows
            .iter()
            .map(|row| Series {
                label: format!("m={}", row.m),
                points: rep.radii.iter().copied().zip(row.omega.iter().copied()).collect(),
            })
            .collect(),
    }
    .render()
}

fn family_of(sc: &Scenario, ms: &[u32], kind: MapKind) -> Result<Vec<MapFamily>> {
    ms.iter()
        .map(|&m| MapFamily::new(kind, m, sc.map.alpha, sc.map.dim, sc.map.p))
        .collect()
}

/// Largest relative deviation of `omega_m(r0)` from `m · omega_m0(r0) / m0`.
pub fn linearity_deviation(rep: &EquicontinuityReport) -> f64 {
    let Some(first) = rep.rows.first() else {
        return 0.0;
    };
    let unit = first.omega[0] / first.m as f64;
    rep.rows
        .iter()
        .map(|row| (row.omega[0] / (unit * row.m as f64) - 1.0).abs())
        .fold(0.0, f64::max)
}

fn equicontinuity(sc: &Scenario) -> Result<Outcome> {
    let c = &sc.scan;
    let radii = if c.radii.is_empty() { default_radii(c.r0, SCAN_RADII) } else { c.radii.clone() };
    let dirs = c.directions.unwrap_or_else(|| default_directions(sc.map.dim));
    let fam = family_of(sc, &c.ms, sc.map.kind)?;
    let main = equicontinuity_scan(&fam, &c.x0, c.r0, &radii, dirs)?;
    let v = &main.verdict;
    let main_pass = v.bounded && (!v.q_integrable || v.c_hat_stable);
    let mut table = scan_table("equicontinuity", &radii);
    push_scan_rows(&mut table, "family", &main);
    let mut plots = vec![("omega_vs_radius".into(), omega_chart(format!("{}: {}", sc.name, main.family), &main))];
    let mut pass = main_pass;
    let mut contrast = Value::Null;
    if c.contrast {
        let scaling = equicontinuity_scan(&family_of(sc, &c.ms, MapKind::Scaling)?, &c.x0, c.r0, &radii, dirs)?;
        let inverse = equicontinuity_scan(&family_of(sc, &c.ms, MapKind::InverseScaling)?, &c.x0, c.r0, &radii, dirs)?;
        let deviation = linearity_deviation(&scaling);
        let scaling_pass = deviation <= LINEARITY_TOL && (c.ms.len() < 2 || scaling.verdict.divergent_in_m);
        let inverse_pass = inverse.verdict.lipschitz_max <= 1.0 + 1e-12;
        pass &= scaling_pass && inverse_pass;
        push_scan_rows(&mut table, "scaling", &scaling);
        push_scan_rows(&mut table, "inverse-scaling", &inverse);
        plots.push(("omega_vs_radius_scaling".into(), omega_chart(format!("{}: scaling", sc.name), &scaling)));
        plots.push(("omega_vs_radius_inverse".into(), omega_chart(format!("{}: inverse scaling", sc.name), &inverse)));
        contrast = json!({
            "scaling": { "report": scaling, "linearity_deviation": deviation, "linearity_tol": LINEARITY_TOL, "pass": scaling_pass },
            "inverse_scaling": { "report": inverse, "pass": inverse_pass },
        });
    }
    Ok(Outcome {
        command: Command::Equicontinuity,
        results: json!({ "family": main, "family_pass": main_pass, "contrast": contrast }),
        tables: vec![table],
        plots,
        pass,
        certified: true,
    })
}

/// `count` points on the sphere `|x| = radius`.
pub fn boundary_points(dim: usize, radius: f64, count: usize) -> Vec<Vec<f64>> {
    sphere_directions(dim, count)
        .into_iter()
        .map(|d| d.iter().map(|c| radius * c).collect())
        .collect()
}

fn closure(sc: &Scenario) -> Result<Outcome> {
    let c = &sc.closure;
    let fam = family_of(sc, &c.ms, sc.map.kind)?;
    let radius = fam.first().map_or(f64::INFINITY, MapFamily::domain_radius);
    let boundary = if c.boundary.is_empty() {
        if !radius.is_finite() {
            return Err(Error::Config("closure.boundary is required for an unbounded domain".into()));
        }
        boundary_points(sc.map.dim, radius, CLOSURE_POINTS)
    } else {
        c.boundary.clone()
    };
    let radii = if c.radii.is_empty() { default_radii(c.r0, SCAN_RADII) } else { c.radii.clone() };
    let dirs = c.directions.unwrap_or_else(|| default_directions(sc.map.dim));
    let rep = closure_scan(&fam, &boundary, c.r0, &radii, dirs)?;
    let pass = rep.verdict.monotone_in_radius;
    let mut table = scan_table("closure", &radii);
    push_scan_rows(&mut table, "family", &rep);
    let plot = omega_chart(format!("{}: chordal, {}", sc.name, rep.family), &rep);
    Ok(Outcome {
        command: Command::ClosureScan,
        results: json!({ "scan": rep, "pass": pass }),
        tables: vec![table],
        plots: vec![("chordal_omega_vs_radius".into(), plot)],
        pass,
        certified: true,
    })
}

/// Seeded points of the map's domain (capped at radius 2) away from the
/// origin, the boundary, the gluing sphere and the branch set.
pub fn zoo_samples(map: &MapFamily, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let n = map.dim;
    let radius = map.domain_radius().min(2.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let dir: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let len = norm(&dir);
        if len == 0.0 {
            continue;
        }
        let t = radius * rng.random::<f64>().powf(1.0 / n as f64);
        let x: Vec<f64> = dir.iter().map(|c| c * t / len).collect();
        let near_singular = match map.kind {
            MapKind::Scaling | MapKind::InverseScaling => false,
            MapKind::PlanarBranched => (t - map.glue_radius()).abs() < ZOO_EXCLUSION,
            MapKind::SpatialBranched => {
                (t - map.glue_radius()).abs() < ZOO_EXCLUSION || x[0].hypot(x[1]) < ZOO_EXCLUSION
            }
        };
        if t < ZOO_EXCLUSION || t > radius - ZOO_EXCLUSION || near_singular {
            continue;
        }
        out.push(x);
    }
    out
}

fn zoo_dump(sc: &Scenario) -> Result<Outcome> {
    let map = sc.map.build(sc.map.m, sc.map.alpha)?;
    let n = map.dim;
    let q = map.q_weight();
    let mut header: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
    header.extend((0..n).map(|i| format!("f{i}")));
    header.extend(["k_o".into(), "k_o_numeric".into(), "q".into()]);
    let mut table = Table {
        name: "zoo".into(),
        header,
        rows: Vec::new(),
    };
    let mut worst: f64 = 0.0;
    for x in zoo_samples(&map, sc.zoo.samples, sc.seed) {
        let y = map.evaluate(&x)?;
        let k = map.k_o(&x)?;
        let k_num = map.k_o_numeric(&x, sc.zoo.fd_step)?;
        worst = worst.max((k_num - k).abs() / k.abs());
        let mut row: Vec<String> = x.iter().chain(&y).map(|&v| num(v)).collect();
        row.extend([num(k), num(k_num), num(q.eval(&y))]);
        table.rows.push(row);
    }
    let pass = worst <= ZOO_K_O_TOL;
    Ok(Outcome {
        command: Command::ZooDump,
        results: json!({
            "map": map,
            "id": map.id(),
            "samples": table.rows.len(),
            "max_k_o_rel_error": worst,
            "k_o_tol": ZOO_K_O_TOL,
        }),
        tables: vec![table],
        plots: Vec::new(),
        pass,
        certified: true,
    })
}

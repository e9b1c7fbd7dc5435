use serde::{Deserialize, Serialize};

use super::eta::{rhs_integral, EtaKind, EtaProfile};
use crate::curve::{lift_family, radial_family, CurveIssue};
use crate::error::{Error, Result};
use crate::geom::{norm, Annulus, ExtPoint};
use crate::mapzoo::{MapFamily, QWeight};
use crate::modsolve::{modulus_finite_with, Grid, SolverConfig};

/// Relative margin granted to the right-hand side.
pub const POLETSKY_MARGIN: f64 = 0.05;

const LOWER_ESTIMATE_NOTE: &str = "lhs is the modulus of a finite lifted sub-family and so a lower estimate \
of the modulus of the full family: a pass is a necessary-condition check, a failure is a counterexample \
up to the solver certificate";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PoletskySampling {
    /// Radial image curves crossing the shell.
    pub curves: usize,
    /// Vertex spacing of the image curves.
    pub step: f64,
    /// Grid cells per axis over the lifted family's bounding cube.
    pub cells: usize,
    pub etas: Vec<EtaKind>,
    pub solver: SolverConfig,
}

impl Default for PoletskySampling {
    fn default() -> Self {
        PoletskySampling {
            curves: 32,
            step: 0.01,
            cells: 256,
            etas: vec![EtaKind::Step, EtaKind::InverseT],
            solver: SolverConfig::default(),
        }
    }
}

impl PoletskySampling {
    /// Defaults scaled to the dimension: fewer cells per axis in space.
    pub fn for_dim(n: usize) -> Self {
        let mut s = PoletskySampling::default();
        if n >= 3 {
            s.curves = 64;
            s.cells = 40;
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RhsValue {
    pub eta: EtaKind,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoletskyReport {
    pub map: String,
    pub map_params: MapFamily,
    pub y0: Vec<f64>,
    pub r1: f64,
    pub r2: f64,
    pub image_curves: usize,
    pub lifted_curves: usize,
    pub dropped: Vec<CurveIssue>,
    pub grid: Option<Grid>,
    pub lhs: f64,
    pub lhs_gap: f64,
    pub lhs_certified: bool,
    pub rhs: Vec<RhsValue>,
    pub min_rhs: f64,
    pub margin: f64,
    pub pass: bool,
    /// Empty lifted family: lhs is 0 and the check says nothing.
    pub degenerate: bool,
    pub note: String,
}

impl PoletskyReport {
    /// Whether the stored verdict matches the stored numbers.
    pub fn consistent(&self) -> bool {
        let min = self.rhs.iter().map(|r| r.value).fold(f64::INFINITY, f64::min);
        min == self.min_rhs && self.pass == (self.lhs <= self.min_rhs * (1.0 + self.margin))
    }
}

/// Checks `M(Γ_f(y0, r1, r2)) <= ∫ Q η^n dm` on a sampled lifted family.
pub fn verify_poletsky(
    map: &MapFamily,
    q: &QWeight,
    y0: &ExtPoint,
    r1: f64,
    r2: f64,
    sampling: &PoletskySampling,
) -> Result<PoletskyReport> {
    map.validate()?;
    let n = map.dim;
    crate::geom::check_dim(n, q.dim())?;
    let Some(c) = y0.coords() else {
        return Err(Error::contract("y0 must be finite"));
    };
    crate::geom::check_dim(n, c.len())?;
    if !(r1 > 0.0 && r1 < r2 && r2.is_finite()) {
        return Err(Error::contract(format!("need 0 < r1 < r2, got r1 = {r1}, r2 = {r2}")));
    }
    if norm(c) + r2 > map.image_radius() * (1.0 + 1e-12) {
        return Err(Error::contract(format!(
            "shell A(y0, {r1}, {r2}) leaves the image ball of radius {}",
            map.image_radius()
        )));
    }
    if sampling.curves == 0 || sampling.cells < 2 || !(sampling.step > 0.0) || sampling.etas.is_empty() {
        return Err(Error::Config("sampling needs curves >= 1, cells >= 2, step > 0 and one η".into()));
    }
    sampling.solver.validate()?;

    let mut rhs = Vec::new();
    for &kind in &sampling.etas {
        let eta = EtaProfile::of_kind(kind, r1, r2)?;
        rhs.push(RhsValue {
            eta: kind,
            value: rhs_integral(q, y0, &eta)?,
        });
    }
    let min_rhs = rhs.iter().map(|r| r.value).fold(f64::INFINITY, f64::min);

    let shell = Annulus::new(c.to_vec(), r1, r2)?;
    let image = radial_family(&shell, sampling.curves, sampling.step)?;
    let lifted = lift_family(&image, map)?;
    let mut report = PoletskyReport {
        map: map.id(),
        map_params: map.clone(),
        y0: c.to_vec(),
        r1,
        r2,
        image_curves: image.len(),
        lifted_curves: lifted.len(),
        dropped: lifted.meta.issues.clone(),
        grid: None,
        lhs: 0.0,
        lhs_gap: 0.0,
        lhs_certified: true,
        rhs,
        min_rhs,
        margin: POLETSKY_MARGIN,
        pass: true,
        degenerate: lifted.is_empty(),
        note: LOWER_ESTIMATE_NOTE.into(),
    };
    if lifted.is_empty() {
        return Ok(report);
    }
    let grid = bounding_cube(lifted.curves.iter().flat_map(|c| c.vertices()), n, sampling.cells)?;
    let res = modulus_finite_with(&lifted, &grid, n as f64, &sampling.solver)?;
    report.grid = Some(grid);
    report.lhs = res.value;
    report.lhs_gap = res.gap;
    report.lhs_certified = res.certified;
    report.pass = report.lhs <= min_rhs * (1.0 + POLETSKY_MARGIN);
    Ok(report)
}

/// Cube around the points with a 2% border, `cells` per axis.
fn bounding_cube<'a>(pts: impl Iterator<Item = &'a Vec<f64>>, n: usize, cells: usize) -> Result<Grid> {
    let mut lo = vec![f64::INFINITY; n];
    let mut hi = vec![f64::NEG_INFINITY; n];
    for p in pts {
        for a in 0..n {
            lo[a] = lo[a].min(p[a]);
            hi[a] = hi[a].max(p[a]);
        }
    }
    let width = (0..n).map(|a| hi[a] - lo[a]).fold(0.0, f64::max).max(1e-6);
    let half = 0.51 * width;
    let centre: Vec<f64> = (0..n).map(|a| 0.5 * (lo[a] + hi[a])).collect();
    Grid::new(
        centre.iter().map(|c| c - half).collect::<Vec<_>>(),
        centre.iter().map(|c| c + half).collect::<Vec<_>>(),
        vec![cells; n],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn quick() -> PoletskySampling {
        PoletskySampling {
            curves: 8,
            cells: 64,
            ..PoletskySampling::default()
        }
    }

    #[test]
    fn planar_example_passes() {
        let map = MapFamily::planar(2, 0.5, 3.0).unwrap();
        let r = verify_poletsky(&map, &map.q_weight(), &ExtPoint::origin(2), 0.3, 0.6, &quick()).unwrap();
        assert!(r.pass && r.consistent() && !r.degenerate);
        assert_eq!(r.lifted_curves, 16);
        assert!(r.lhs > 0.0 && r.lhs < r.min_rhs);
    }

    #[test]
    fn identity_map_matches_closed_forms() {
        let map = MapFamily::scaling(1, 2).unwrap();
        let q = map.q_weight();
        let (r1, r2) = (0.3, 0.8);
        let r = verify_poletsky(&map, &q, &ExtPoint::origin(2), r1, r2, &quick()).unwrap();
        let step = r.rhs.iter().find(|v| v.eta == EtaKind::Step).unwrap().value;
        assert!((step - PI * (r2 * r2 - r1 * r1) / (r2 - r1).powi(2)).abs() < 1e-9);
        let inv = r.rhs.iter().find(|v| v.eta == EtaKind::InverseT).unwrap().value;
        assert!((inv - 2.0 * PI / (r2 / r1).ln()).abs() < 1e-9);
        // eight disjoint radial segments: lhs is the sum of their single moduli,
        // each bounded above by ∫ over the segment's cells; certainly below 2π/log
        assert!(r.pass && r.lhs < inv);
    }

    #[test]
    fn bad_shells_are_rejected() {
        let map = MapFamily::planar(2, 0.5, 3.0).unwrap();
        let q = map.q_weight();
        let o = ExtPoint::origin(2);
        assert!(verify_poletsky(&map, &q, &o, 0.6, 0.3, &quick()).is_err());
        assert!(verify_poletsky(&map, &q, &o, 0.5, 1.5, &quick()).is_err());
        assert!(verify_poletsky(&map, &q, &ExtPoint::Infinity, 0.1, 0.2, &quick()).is_err());
    }
}

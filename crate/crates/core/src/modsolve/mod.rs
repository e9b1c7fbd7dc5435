//! Discrete p-modulus of curve families on a uniform grid.
//!
//! A density is one nonnegative value per cell; a curve's length under it
//! is `Σ ρ_c ℓ_c` over the cells it crosses. The modulus is the least
//! energy `Σ ρ_c^p vol` among densities giving every curve length at least
//! one. Results carry a two-sided certificate: the returned density is
//! admissible, so its energy bounds the modulus from above, and a dual
//! value bounds it from below.

mod connecting;
pub(crate) mod dual;
mod grid;
mod inner;
mod simplex;

use serde::{Deserialize, Serialize};

use crate::curve::{curve_cell_incidence, CurveFamily, Polyline};
use crate::error::{Error, Result};

pub use connecting::{modulus_connecting, modulus_connecting_with, shortest_connecting_length, ConnectingGraph};
pub use grid::Grid;

use dual::Row;
use inner::{certificate, Inner};

/// One nonnegative value per grid cell, in the grid's flat order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityField {
    pub grid: Grid,
    pub values: Vec<f64>,
}

impl DensityField {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        grid.validate()?;
        if values.len() != grid.num_cells() {
            return Err(Error::contract(format!(
                "density has {} values for {} cells",
                values.len(),
                grid.num_cells()
            )));
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::contract("density values must be finite and nonnegative"));
        }
        Ok(DensityField { grid, values })
    }

    pub fn constant(grid: Grid, value: f64) -> Result<Self> {
        let n = grid.num_cells();
        DensityField::new(grid, vec![value; n])
    }

    /// Samples `f` at the cell centers.
    pub fn from_fn(grid: Grid, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let values = (0..grid.num_cells()).map(|c| f(&grid.center(c))).collect();
        DensityField::new(grid, values)
    }

    pub fn scaled(&self, k: f64) -> Result<Self> {
        DensityField::new(self.grid.clone(), self.values.iter().map(|v| v * k).collect())
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }
}

fn check_p(p: f64) -> Result<()> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::contract(format!("modulus exponent p = {p} must be finite and >= 1")));
    }
    Ok(())
}

/// `Σ ρ_c^p vol_c`.
pub fn energy(rho: &DensityField, p: f64) -> Result<f64> {
    check_p(p)?;
    Ok(inner::raw_energy(&rho.values, p, rho.grid.cell_volume()))
}

/// `∫_γ ρ ds` for the piecewise constant density.
pub fn curve_length_under_density(c: &Polyline, rho: &DensityField) -> Result<f64> {
    Ok(curve_cell_incidence(c, &rho.grid)?
        .iter()
        .map(|&(cell, len)| rho.values[cell] * len)
        .sum())
}

/// `log(1 + 1/m)`, the shape of the ring lower bound without its constant.
pub fn ring_lower_bound(m_ratio: f64) -> Result<f64> {
    if !(m_ratio > 0.0) {
        return Err(Error::contract("ring ratio must be positive"));
    }
    Ok((1.0 / m_ratio).ln_1p())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    FiniteFamily,
    Connecting,
}

/// Solver tolerances and budgets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Relative duality gap at which a result is certified.
    pub gap_tol: f64,
    /// Connecting mode stops once every grid path has ρ-length >= 1 - slack.
    pub slack: f64,
    /// Budget in full passes over the active constraints.
    pub max_iterations: u64,
    /// Largest max-norm of a step in the connecting path graph.
    pub stencil_radius: usize,
    /// Violated paths added per constraint-generation round.
    pub paths_per_round: usize,
    /// Over-relaxation factor of the dual coordinate steps, in (0, 2).
    pub relaxation: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            gap_tol: 1e-3,
            slack: 1e-3,
            max_iterations: 100_000,
            stencil_radius: 2,
            paths_per_round: 256,
            relaxation: 1.0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.gap_tol > 0.0 && self.gap_tol < 1.0) {
            return Err(Error::Config("gap_tol must lie in (0, 1)".into()));
        }
        if !(self.slack >= 0.0 && self.slack < 1.0) {
            return Err(Error::Config("slack must lie in [0, 1)".into()));
        }
        if self.max_iterations == 0 || self.stencil_radius == 0 || self.paths_per_round == 0 {
            return Err(Error::Config(
                "max_iterations, stencil_radius and paths_per_round must be positive".into(),
            ));
        }
        if !(self.relaxation > 0.0 && self.relaxation < 2.0) {
            return Err(Error::Config("relaxation must lie in (0, 2)".into()));
        }
        if self.stencil_radius > 4 {
            return Err(Error::Config("stencil_radius above 4 is not supported".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModulusResult {
    /// Energy of `density`.
    pub value: f64,
    /// Admissible density (up to the connecting slack).
    pub density: DensityField,
    /// Certified lower bound on the discrete modulus.
    pub lower_bound: f64,
    /// `(value - lower_bound) / value`.
    pub gap: f64,
    pub iterations: u64,
    pub active_constraints: usize,
    /// Constraints held by the solver (all curves in finite mode).
    pub constraints: usize,
    pub mode: Mode,
    pub p: f64,
    /// Whether the gap reached the configured tolerance.
    pub certified: bool,
    /// The family has no curves, so the modulus is 0.
    pub empty_family: bool,
    /// No grid path joins E and F inside the domain.
    pub unreachable: bool,
}

impl ModulusResult {
    fn empty(grid: &Grid, p: f64, mode: Mode, unreachable: bool) -> Result<Self> {
        Ok(ModulusResult {
            value: 0.0,
            density: DensityField::constant(grid.clone(), 0.0)?,
            lower_bound: 0.0,
            gap: 0.0,
            iterations: 0,
            active_constraints: 0,
            constraints: 0,
            mode,
            p,
            certified: true,
            empty_family: true,
            unreachable,
        })
    }

    /// JSON report; the density is included as a flat array on request.
    pub fn to_json(&self, with_density: bool) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("result serializes");
        let obj = v.as_object_mut().expect("result is an object");
        let density = obj.remove("density").expect("density field");
        obj.insert("grid".into(), density["grid"].clone());
        if with_density {
            obj.insert("density".into(), density["values"].clone());
        }
        v
    }
}

/// Modulus of an explicitly listed family with default tolerances.
pub fn modulus_finite(fam: &CurveFamily, g: &Grid, p: f64) -> Result<ModulusResult> {
    modulus_finite_with(fam, g, p, &SolverConfig::default())
}

pub fn modulus_finite_with(fam: &CurveFamily, g: &Grid, p: f64, cfg: &SolverConfig) -> Result<ModulusResult> {
    check_p(p)?;
    g.validate()?;
    cfg.validate()?;
    if fam.is_empty() {
        return ModulusResult::empty(g, p, Mode::FiniteFamily, false);
    }
    let vol = g.cell_volume();
    let mut inner = Inner::new(p, vol, g.num_cells(), cfg.relaxation);
    for c in &fam.curves {
        inner.add_row(Row::from_incidence(&curve_cell_incidence(c, g)?));
    }
    let (iterations, check) = inner.solve(p, vol, cfg.gap_tol, cfg.max_iterations)?;
    finish(g, p, Mode::FiniteFamily, &inner, iterations, check.min_len, cfg)
}

/// Scales the inner density to admissibility and packages the certificate.
pub(crate) fn finish(
    g: &Grid,
    p: f64,
    mode: Mode,
    inner: &Inner,
    iterations: u64,
    min_len: f64,
    cfg: &SolverConfig,
) -> Result<ModulusResult> {
    let vol = g.cell_volume();
    let raw = inner.density();
    let lower = inner.lower_bound();
    let check = certificate(&raw, p, vol, min_len, lower);
    let values: Vec<f64> = if min_len > 0.0 {
        raw.iter().map(|r| r / min_len).collect()
    } else {
        raw
    };
    let density = DensityField::new(g.clone(), values)?;
    let value = energy(&density, p)?;
    Ok(ModulusResult {
        value,
        density,
        lower_bound: lower.min(value),
        gap: check.gap,
        iterations,
        active_constraints: inner.active_count(),
        constraints: inner.len(),
        mode,
        p,
        certified: check.gap <= cfg.gap_tol,
        empty_family: false,
        unreachable: false,
    })
}

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform axis-aligned grid of cells.
///
/// Cells are numbered with axis 0 varying fastest, so in the plane the flat
/// index is `ix + nx * iy` (row-major with rows along `y`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub cells: Vec<usize>,
}

impl Grid {
    pub fn new(lo: impl Into<Vec<f64>>, hi: impl Into<Vec<f64>>, cells: impl Into<Vec<usize>>) -> Result<Self> {
        let g = Grid {
            lo: lo.into(),
            hi: hi.into(),
            cells: cells.into(),
        };
        g.validate()?;
        Ok(g)
    }

    /// Cube `[-half, half]^dim` with `per_axis` cells along every axis.
    pub fn centered_cube(dim: usize, half: f64, per_axis: usize) -> Result<Self> {
        Grid::new(vec![-half; dim], vec![half; dim], vec![per_axis; dim])
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.lo.len();
        if n < 2 || self.hi.len() != n || self.cells.len() != n {
            return Err(Error::contract("grid corners and cell counts must share dimension >= 2"));
        }
        for i in 0..n {
            if !(self.lo[i].is_finite() && self.hi[i].is_finite() && self.lo[i] < self.hi[i]) {
                return Err(Error::contract("grid box must have lo < hi on every axis"));
            }
            if self.cells[i] == 0 {
                return Err(Error::contract("grid needs at least one cell per axis"));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn num_cells(&self) -> usize {
        self.cells.iter().product()
    }

    pub fn side(&self, axis: usize) -> f64 {
        (self.hi[axis] - self.lo[axis]) / self.cells[axis] as f64
    }

    pub fn sides(&self) -> Vec<f64> {
        (0..self.dim()).map(|a| self.side(a)).collect()
    }

    pub fn min_side(&self) -> f64 {
        self.sides().into_iter().fold(f64::INFINITY, f64::min)
    }

    pub fn cell_volume(&self) -> f64 {
        self.sides().iter().product()
    }

    pub fn flat(&self, idx: &[usize]) -> usize {
        let mut f = 0;
        for a in (0..self.dim()).rev() {
            f = f * self.cells[a] + idx[a];
        }
        f
    }

    pub fn unflat(&self, mut f: usize) -> Vec<usize> {
        let mut idx = Vec::with_capacity(self.dim());
        for a in 0..self.dim() {
            idx.push(f % self.cells[a]);
            f /= self.cells[a];
        }
        idx
    }

    pub fn center(&self, f: usize) -> Vec<f64> {
        self.unflat(f)
            .iter()
            .enumerate()
            .map(|(a, &i)| self.lo[a] + (i as f64 + 0.5) * self.side(a))
            .collect()
    }

    /// Closed box of a cell.
    pub fn cell_box(&self, f: usize) -> (Vec<f64>, Vec<f64>) {
        let idx = self.unflat(f);
        let lo: Vec<f64> = (0..self.dim())
            .map(|a| self.lo[a] + idx[a] as f64 * self.side(a))
            .collect();
        let hi = (0..self.dim()).map(|a| lo[a] + self.side(a)).collect();
        (lo, hi)
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && (0..self.dim()).all(|a| {
                let slack = 1e-12 * (self.hi[a] - self.lo[a]);
                x[a] >= self.lo[a] - slack && x[a] <= self.hi[a] + slack
            })
    }

    /// Cell index along `axis` for a coordinate. Points on a shared face go
    /// to the cell on the positive side; the outer faces clamp inward.
    pub(crate) fn axis_index(&self, axis: usize, x: f64) -> usize {
        let u = (x - self.lo[axis]) / self.side(axis);
        let r = u.round();
        let k = if (u - r).abs() < 1e-9 { r } else { u.floor() };
        (k.max(0.0) as usize).min(self.cells[axis] - 1)
    }

    pub fn locate(&self, x: &[f64]) -> Option<usize> {
        if !self.contains(x) {
            return None;
        }
        let idx: Vec<usize> = (0..self.dim()).map(|a| self.axis_index(a, x[a])).collect();
        Some(self.flat(&idx))
    }

    /// Same box with every cell count multiplied by `factor`.
    pub fn refined(&self, factor: usize) -> Grid {
        Grid {
            lo: self.lo.clone(),
            hi: self.hi.clone(),
            cells: self.cells.iter().map(|c| c * factor).collect(),
        }
    }
}

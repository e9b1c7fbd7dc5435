//! Dense primal simplex for the p = 1 modulus.
//!
//! The 1-modulus is the linear program `min Σ vol_c ρ_c` subject to
//! `Aρ >= 1`, `ρ >= 0`. We solve its packing dual
//!
//! ```text
//! max Σ_i λ_i   subject to   Σ_i a_ic λ_i <= vol_c,   λ >= 0
//! ```
//!
//! whose slack basis is feasible, so no phase one is needed. Bland's rule
//! guarantees termination. The optimal ρ is read off as the shadow prices
//! of the cell rows.

use super::dual::Row;
use crate::error::{Error, Result};

const EPS: f64 = 1e-11;

/// Largest dense tableau accepted, in entries.
pub(crate) const MAX_TABLEAU: usize = 40_000_000;

pub(crate) struct LpSolution {
    pub value: f64,
    /// Density per grid cell.
    pub rho: Vec<f64>,
    /// Curve multipliers.
    pub lambda: Vec<f64>,
    pub pivots: usize,
}

/// Solves the 1-modulus of `rows` on a grid of `ncells` cells of volume `vol`.
pub(crate) fn solve_p1(rows: &[Row], vol: f64, ncells: usize) -> Result<LpSolution> {
    // compact the cells that some curve touches
    let mut local = vec![usize::MAX; ncells];
    let mut cells = Vec::new();
    for r in rows {
        for &c in &r.cells {
            if local[c as usize] == usize::MAX {
                local[c as usize] = cells.len();
                cells.push(c as usize);
            }
        }
    }
    let m = cells.len();
    let k = rows.len();
    let width = k + m + 1;
    if (m + 1) * width > MAX_TABLEAU {
        return Err(Error::Contract(format!(
            "p = 1 solver limited to {MAX_TABLEAU} tableau entries ({m} cells x {k} curves requested)"
        )));
    }
    // tableau rows 0..m are cell constraints, row m is the objective
    let mut t = vec![0.0; (m + 1) * width];
    for (j, r) in rows.iter().enumerate() {
        for (&c, &a) in r.cells.iter().zip(&r.lens) {
            t[local[c as usize] * width + j] += a;
        }
    }
    for i in 0..m {
        t[i * width + k + i] = 1.0;
        t[i * width + width - 1] = vol;
    }
    for j in 0..k {
        t[m * width + j] = -1.0;
    }
    let mut basis: Vec<usize> = (k..k + m).collect();
    let mut pivots = 0usize;
    loop {
        let Some(enter) = (0..k + m).find(|&j| t[m * width + j] < -EPS) else {
            break;
        };
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..m {
            let a = t[i * width + enter];
            if a > EPS {
                let ratio = t[i * width + width - 1] / a;
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((li, lr)) => {
                        if ratio < lr - EPS || (ratio <= lr + EPS && basis[i] < basis[li]) {
                            Some((i, ratio))
                        } else {
                            Some((li, lr))
                        }
                    }
                };
            }
        }
        let Some((row, _)) = leave else {
            // a curve without length inside any cell makes the family degenerate
            return Err(Error::contract("unbounded packing problem: a curve has zero length"));
        };
        pivot(&mut t, width, m, row, enter);
        basis[row] = enter;
        pivots += 1;
    }
    let mut lambda = vec![0.0; k];
    for (i, &b) in basis.iter().enumerate() {
        if b < k {
            lambda[b] = t[i * width + width - 1];
        }
    }
    let mut rho = vec![0.0; ncells];
    for (i, &c) in cells.iter().enumerate() {
        rho[c] = t[m * width + k + i].max(0.0);
    }
    Ok(LpSolution {
        value: t[m * width + width - 1],
        rho,
        lambda,
        pivots,
    })
}

fn pivot(t: &mut [f64], width: usize, m: usize, row: usize, col: usize) {
    let inv = 1.0 / t[row * width + col];
    for x in &mut t[row * width..(row + 1) * width] {
        *x *= inv;
    }
    let prow: Vec<f64> = t[row * width..(row + 1) * width].to_vec();
    for i in 0..=m {
        if i == row {
            continue;
        }
        let f = t[i * width + col];
        if f == 0.0 {
            continue;
        }
        let r = &mut t[i * width..(i + 1) * width];
        for (x, &p) in r.iter_mut().zip(&prow) {
            *x -= f * p;
        }
        r[col] = 0.0;
    }
}

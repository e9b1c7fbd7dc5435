use super::dual::{DualSolver, Row};
use super::simplex::{solve_p1, LpSolution};
use crate::error::Result;

/// Rows above which length evaluations are spread over the thread pool.
pub(crate) const PAR_ROWS: usize = 2048;

/// Active-set solver shared by the finite and connecting modes.
pub(crate) enum Inner {
    Dual(DualSolver),
    Lp {
        rows: Vec<Row>,
        ncells: usize,
        sol: Option<LpSolution>,
    },
}

/// Certificate of the current iterate.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Check {
    /// Least length of an active constraint.
    pub min_len: f64,
    /// `(U - L) / U` with `U = energy(ρ) / min_len^p` and `L` the dual value.
    pub gap: f64,
}

impl Inner {
    pub fn new(p: f64, vol: f64, ncells: usize, relaxation: f64) -> Self {
        if p == 1.0 {
            Inner::Lp {
                rows: Vec::new(),
                ncells,
                sol: None,
            }
        } else {
            Inner::Dual(DualSolver::new(p, vol, ncells, relaxation))
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Inner::Dual(d) => d.len(),
            Inner::Lp { rows, .. } => rows.len(),
        }
    }

    pub fn min_length(&self, rho: &[f64]) -> f64 {
        match self {
            Inner::Dual(d) => d.min_length(rho),
            Inner::Lp { rows, .. } => rows.iter().map(|r| r.length_under(rho)).fold(f64::INFINITY, f64::min),
        }
    }

    pub fn add_row(&mut self, row: Row) {
        match self {
            Inner::Dual(d) => d.add_row(row),
            Inner::Lp { rows, sol, .. } => {
                rows.push(row);
                *sol = None;
            }
        }
    }

    pub fn density(&self) -> Vec<f64> {
        match self {
            Inner::Dual(d) => d.density(),
            Inner::Lp { sol, ncells, .. } => sol.as_ref().map_or_else(|| vec![0.0; *ncells], |s| s.rho.clone()),
        }
    }

    pub fn lower_bound(&self) -> f64 {
        match self {
            Inner::Dual(d) => d.lower_bound().max(0.0),
            Inner::Lp { sol, .. } => sol.as_ref().map_or(0.0, |s| s.value),
        }
    }

    pub fn active_count(&self) -> usize {
        match self {
            Inner::Dual(d) => d.active_count(),
            Inner::Lp { sol, .. } => sol.as_ref().map_or(0, |s| s.lambda.iter().filter(|&&l| l > 0.0).count()),
        }
    }

    pub fn check(&self, p: f64, vol: f64) -> Check {
        let rho = self.density();
        let min_len = self.min_length(&rho);
        certificate(&rho, p, vol, min_len, self.lower_bound())
    }

    /// Iterates until the active-set gap is at most `tol` or `budget`
    /// iterations are spent. Returns the iterations used and the last check.
    pub fn solve(&mut self, p: f64, vol: f64, tol: f64, budget: u64) -> Result<(u64, Check)> {
        match self {
            Inner::Lp { rows, ncells, sol, .. } => {
                if sol.is_none() {
                    *sol = Some(solve_p1(rows, vol, *ncells)?);
                }
                let pivots = sol.as_ref().map_or(0, |s| s.pivots) as u64;
                Ok((pivots.max(1), self.check(p, vol)))
            }
            Inner::Dual(_) => {
                let mut used = 0u64;
                let mut every = 1u64;
                loop {
                    let n = every.min(budget.saturating_sub(used)).max(1);
                    if let Inner::Dual(d) = self {
                        for _ in 0..n {
                            d.sweep();
                        }
                    }
                    used += n;
                    let c = self.check(p, vol);
                    if c.gap <= tol || used >= budget {
                        return Ok((used, c));
                    }
                    every = (every * 2).min(16);
                }
            }
        }
    }
}

pub(crate) fn raw_energy(rho: &[f64], p: f64, vol: f64) -> f64 {
    if p == 1.0 {
        rho.iter().sum::<f64>() * vol
    } else if p == 2.0 {
        rho.iter().map(|r| r * r).sum::<f64>() * vol
    } else {
        rho.iter().map(|r| r.powf(p)).sum::<f64>() * vol
    }
}

pub(crate) fn certificate(rho: &[f64], p: f64, vol: f64, min_len: f64, lower: f64) -> Check {
    let upper = if min_len > 0.0 {
        raw_energy(rho, p, vol) / min_len.powf(p)
    } else {
        f64::INFINITY
    };
    let gap = if upper.is_finite() && upper > 0.0 {
        ((upper - lower) / upper).max(0.0)
    } else {
        1.0
    };
    Check { min_len, gap }
}

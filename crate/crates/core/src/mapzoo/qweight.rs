use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{norm, unit_sphere_area};
use crate::quad;

/// Radial weight `Q ≥ 0` centred at the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum QWeight {
    /// `value` on the closed ball of `support_radius`, or everywhere when `None`.
    Constant {
        dim: usize,
        value: f64,
        support_radius: Option<f64>,
    },
    /// `coef / |y|^exponent` on the closed ball of `support_radius`, zero outside.
    Power {
        dim: usize,
        coef: f64,
        exponent: f64,
        support_radius: f64,
    },
}

impl QWeight {
    pub fn constant(dim: usize, value: f64, support_radius: Option<f64>) -> Self {
        QWeight::Constant {
            dim,
            value,
            support_radius,
        }
    }

    pub fn power(dim: usize, coef: f64, exponent: f64, support_radius: f64) -> Self {
        QWeight::Power {
            dim,
            coef,
            exponent,
            support_radius,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            QWeight::Constant { dim, .. } | QWeight::Power { dim, .. } => *dim,
        }
    }

    /// `None` for an unbounded support.
    pub fn support_radius(&self) -> Option<f64> {
        match self {
            QWeight::Constant { support_radius, .. } => *support_radius,
            QWeight::Power { support_radius, .. } => Some(*support_radius),
        }
    }

    /// Order of the singularity at the origin.
    pub fn singular_exponent(&self) -> f64 {
        match self {
            QWeight::Constant { .. } => 0.0,
            QWeight::Power { exponent, .. } => *exponent,
        }
    }

    pub fn eval(&self, y: &[f64]) -> f64 {
        self.eval_radius(norm(y))
    }

    /// Value at any point with `|y| = r`.
    pub fn eval_radius(&self, r: f64) -> f64 {
        if self.support_radius().is_some_and(|s| r > s) {
            return 0.0;
        }
        match self {
            QWeight::Constant { value, .. } => *value,
            QWeight::Power { coef, exponent, .. } => {
                if *exponent == 0.0 {
                    *coef
                } else if r == 0.0 {
                    f64::INFINITY
                } else {
                    coef * r.powf(-exponent)
                }
            }
        }
    }

    fn check_convergent(&self, p: f64) -> Result<()> {
        if !(p >= 1.0) {
            return Err(Error::contract("norm exponent must be >= 1"));
        }
        if self.support_radius().is_none() {
            let zero = matches!(self, QWeight::Constant { value, .. } if *value == 0.0);
            if !zero {
                return Err(Error::Divergent("weight is not integrable over R^n".into()));
            }
        }
        let n = self.dim() as f64;
        if p * self.singular_exponent() >= n {
            return Err(Error::Divergent(format!(
                "p * exponent = {} >= n = {n}: singularity at the origin is not integrable",
                p * self.singular_exponent()
            )));
        }
        Ok(())
    }

    /// `∫ Q^p dm`, integrating the radial power law in closed form.
    pub fn integral_pow(&self, p: f64) -> Result<f64> {
        self.check_convergent(p)?;
        let n = self.dim();
        let area = unit_sphere_area(n);
        let Some(big_r) = self.support_radius() else {
            return Ok(0.0);
        };
        Ok(match self {
            QWeight::Constant { value, .. } => value.powf(p) * area * big_r.powi(n as i32) / n as f64,
            QWeight::Power { coef, exponent, .. } => {
                let k = n as f64 - p * exponent;
                coef.powf(p) * area * big_r.powf(k) / k
            }
        })
    }

    /// `L^p` norm `(∫ Q^p dm)^(1/p)`.
    pub fn norm(&self, p: f64) -> Result<f64> {
        Ok(self.integral_pow(p)?.powf(1.0 / p))
    }

    /// `∫ Q^p dm` by polar quadrature of the radial profile.
    pub fn integral_pow_quadrature(&self, p: f64, tol: f64) -> Result<f64> {
        self.check_convergent(p)?;
        let n = self.dim();
        let Some(big_r) = self.support_radius() else {
            return Ok(0.0);
        };
        let radial = |r: f64| self.eval_radius(r).powf(p) * r.powi(n as i32 - 1);
        Ok(unit_sphere_area(n) * quad::tanh_sinh(radial, 0.0, big_r, tol).value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn planar_l1_norm() {
        // ∫_0^1 4/(α r^α) 2π r dr = 8π / (α (2 - α))
        let q = QWeight::power(2, 4.0 / 0.5, 0.5, 1.0);
        let closed = q.integral_pow(1.0).unwrap();
        assert!((closed - 8.0 * PI / 0.75).abs() < 1e-12);
        let quad = q.integral_pow_quadrature(1.0, 1e-12).unwrap();
        assert!((quad - closed).abs() < 1e-9 * closed);
    }

    #[test]
    fn unit_ball_constant() {
        let q = QWeight::constant(2, 1.0, Some(1.0));
        assert!((q.integral_pow(1.0).unwrap() - PI).abs() < 1e-14);
        assert!((q.norm(2.0).unwrap() - PI.sqrt()).abs() < 1e-14);
        assert_eq!(q.eval(&[2.0, 0.0]), 0.0);
    }

    #[test]
    fn divergence_signals() {
        let q = QWeight::power(2, 8.0, 0.5, 1.0);
        assert!(matches!(q.integral_pow(4.0), Err(Error::Divergent(_))));
        assert!(matches!(q.integral_pow_quadrature(4.0, 1e-8), Err(Error::Divergent(_))));
        let whole = QWeight::constant(3, 1.0, None);
        assert!(matches!(whole.norm(1.0), Err(Error::Divergent(_))));
    }

    #[test]
    fn singular_at_origin() {
        let q = QWeight::power(2, 8.0, 0.5, 1.0);
        assert_eq!(q.eval(&[0.0, 0.0]), f64::INFINITY);
        assert!((q.eval(&[0.25, 0.0]) - 16.0).abs() < 1e-12);
    }
}

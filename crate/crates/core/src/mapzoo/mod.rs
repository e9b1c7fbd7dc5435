//! The explicit mapping families: conformal scalings and the planar and
//! spatial branched maps built from a radial stretch followed by angle
//! doubling.
//!
//! The branched families share the radial stretch
//!
//! ```text
//! g_m(x) = (|x| - 1)^(1/α) / |x| · x          for 1 + m^-α <= |x| <= 2
//! g_m(x) = (1/m) / (1 + m^-α) · x             for |x| < 1 + m^-α
//! ```
//!
//! which is continuous across the gluing sphere `|x| = 1 + m^-α`. The planar
//! map squares the result (`z ↦ z²`); the spatial map doubles the polar
//! angle in the `x1 x2` plane and leaves the other coordinates alone. Both
//! are two-to-one away from their branch set and send `B(0, 2)` into the
//! closed unit ball.

mod qweight;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::norm;

pub use qweight::QWeight;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MapKind {
    /// `x ↦ m x` on the closed unit ball.
    Scaling,
    /// `y ↦ y / m` on all of `R^n`.
    InverseScaling,
    /// Radial stretch followed by `z ↦ z²`, `n = 2`.
    PlanarBranched,
    /// Radial stretch followed by angle doubling in the first two axes.
    SpatialBranched,
}

impl MapKind {
    pub fn name(&self) -> &'static str {
        match self {
            MapKind::Scaling => "scaling",
            MapKind::InverseScaling => "inverse-scaling",
            MapKind::PlanarBranched => "planar-branched",
            MapKind::SpatialBranched => "spatial-branched",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        [
            MapKind::Scaling,
            MapKind::InverseScaling,
            MapKind::PlanarBranched,
            MapKind::SpatialBranched,
        ]
        .into_iter()
        .find(|k| k.name() == s)
    }
}

/// One member `f_m` of a mapping family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapFamily {
    pub kind: MapKind,
    pub m: u32,
    /// Stretch exponent of the branched families; ignored by the scalings.
    pub alpha: f64,
    pub dim: usize,
    /// Exponent of the `L^p` integrability claim on `Q`.
    pub p: f64,
}

/// Preimages of a point, `+` branch first.
#[derive(Debug, Clone, PartialEq)]
pub struct Preimages {
    pub points: Vec<Vec<f64>>,
    /// Set when the point lies on the branch set and the preimages coincide.
    pub branch_point: bool,
}

const DOMAIN_SLACK: f64 = 1e-12;

impl MapFamily {
    pub fn scaling(m: u32, dim: usize) -> Result<Self> {
        Self::new(MapKind::Scaling, m, 1.0, dim, 1.0)
    }

    pub fn inverse_scaling(m: u32, dim: usize) -> Result<Self> {
        Self::new(MapKind::InverseScaling, m, 1.0, dim, 1.0)
    }

    pub fn planar(m: u32, alpha: f64, p: f64) -> Result<Self> {
        Self::new(MapKind::PlanarBranched, m, alpha, 2, p)
    }

    pub fn spatial(m: u32, alpha: f64, dim: usize, p: f64) -> Result<Self> {
        Self::new(MapKind::SpatialBranched, m, alpha, dim, p)
    }

    pub fn new(kind: MapKind, m: u32, alpha: f64, dim: usize, p: f64) -> Result<Self> {
        let f = MapFamily {
            kind,
            m,
            alpha,
            dim,
            p,
        };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::contract("family index m must be positive"));
        }
        if self.dim < 2 {
            return Err(Error::contract("dimension must be at least 2"));
        }
        if !(self.p >= 1.0) {
            return Err(Error::contract("integrability exponent p must be >= 1"));
        }
        match self.kind {
            MapKind::Scaling | MapKind::InverseScaling => Ok(()),
            MapKind::PlanarBranched | MapKind::SpatialBranched => {
                if self.kind == MapKind::PlanarBranched && self.dim != 2 {
                    return Err(Error::contract("planar-branched maps live in dimension 2"));
                }
                let upper = self.alpha_upper();
                if !(self.alpha > 0.0 && self.alpha < upper) {
                    return Err(Error::contract(format!(
                        "alpha = {} outside (0, {upper})",
                        self.alpha
                    )));
                }
                Ok(())
            }
        }
    }

    /// Supremum of admissible `α`: `2/p` in the plane, `n / (p (n - 1))` in space.
    pub fn alpha_upper(&self) -> f64 {
        match self.kind {
            MapKind::PlanarBranched => 2.0 / self.p,
            MapKind::SpatialBranched => {
                let n = self.dim as f64;
                n / (self.p * (n - 1.0))
            }
            _ => f64::INFINITY,
        }
    }

    pub fn id(&self) -> String {
        match self.kind {
            MapKind::Scaling | MapKind::InverseScaling => {
                format!("{}(m={}, n={})", self.kind.name(), self.m, self.dim)
            }
            _ => format!(
                "{}(m={}, alpha={}, n={}, p={})",
                self.kind.name(),
                self.m,
                self.alpha,
                self.dim,
                self.p
            ),
        }
    }

    fn mf(&self) -> f64 {
        self.m as f64
    }

    /// Radius of the closed ball forming the domain (`∞` for the inverse scaling).
    pub fn domain_radius(&self) -> f64 {
        match self.kind {
            MapKind::Scaling => 1.0,
            MapKind::InverseScaling => f64::INFINITY,
            _ => 2.0,
        }
    }

    /// Radius of the closed ball containing the image.
    pub fn image_radius(&self) -> f64 {
        match self.kind {
            MapKind::Scaling => self.mf(),
            MapKind::InverseScaling => f64::INFINITY,
            _ => 1.0,
        }
    }

    /// `|x| = 1 + m^-α`, where the two pieces of the radial stretch meet.
    pub fn glue_radius(&self) -> f64 {
        1.0 + self.mf().powf(-self.alpha)
    }

    /// Image radius below which preimages come from the linear inner piece.
    pub fn inner_image_radius(&self) -> f64 {
        let r = 1.0 / self.mf();
        match self.kind {
            MapKind::PlanarBranched => r * r,
            MapKind::SpatialBranched => r,
            _ => 0.0,
        }
    }

    pub fn branch_count(&self) -> usize {
        match self.kind {
            MapKind::Scaling | MapKind::InverseScaling => 1,
            _ => 2,
        }
    }

    pub fn in_domain(&self, x: &[f64]) -> bool {
        x.len() == self.dim && norm(x) <= self.domain_radius() * (1.0 + DOMAIN_SLACK)
    }

    fn check_domain(&self, x: &[f64]) -> Result<()> {
        crate::geom::check_dim(self.dim, x.len())?;
        if !self.in_domain(x) {
            return Err(Error::OutsideDomain(x.to_vec()));
        }
        Ok(())
    }

    fn inner_factor(&self) -> f64 {
        let mf = self.mf();
        (1.0 / mf) / (1.0 + mf.powf(-self.alpha))
    }

    /// Radial stretch `g_m`.
    fn stretch(&self, x: &[f64]) -> Vec<f64> {
        let t = norm(x);
        let s = if t >= self.glue_radius() {
            (t - 1.0).powf(1.0 / self.alpha) / t
        } else {
            self.inner_factor()
        };
        x.iter().map(|c| s * c).collect()
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_domain(x)?;
        Ok(self.eval_unchecked(x))
    }

    fn eval_unchecked(&self, x: &[f64]) -> Vec<f64> {
        let mf = self.mf();
        match self.kind {
            MapKind::Scaling => x.iter().map(|c| mf * c).collect(),
            MapKind::InverseScaling => x.iter().map(|c| c / mf).collect(),
            MapKind::PlanarBranched => {
                let y = self.stretch(x);
                vec![y[0] * y[0] - y[1] * y[1], 2.0 * y[0] * y[1]]
            }
            MapKind::SpatialBranched => double_angle(&self.stretch(x)),
        }
    }

    /// Preimages of `w`, `+` branch first.
    pub fn branch_inverses(&self, w: &[f64]) -> Result<Preimages> {
        crate::geom::check_dim(self.dim, w.len())?;
        let mf = self.mf();
        match self.kind {
            MapKind::Scaling => {
                if norm(w) > mf * (1.0 + DOMAIN_SLACK) {
                    return Err(Error::OutsideDomain(w.to_vec()));
                }
                Ok(Preimages {
                    points: vec![w.iter().map(|c| c / mf).collect()],
                    branch_point: false,
                })
            }
            MapKind::InverseScaling => Ok(Preimages {
                points: vec![w.iter().map(|c| c * mf).collect()],
                branch_point: false,
            }),
            MapKind::PlanarBranched | MapKind::SpatialBranched => {
                if norm(w) > 1.0 + DOMAIN_SLACK {
                    return Err(Error::OutsideDomain(w.to_vec()));
                }
                let planar = self.kind == MapKind::PlanarBranched;
                let rho = w[0].hypot(w[1]);
                if rho == 0.0 && (planar || w[2..].iter().all(|c| *c == 0.0)) {
                    return Ok(Preimages {
                        points: vec![vec![0.0; self.dim]],
                        branch_point: true,
                    });
                }
                // Undo the angle doubling: half angle, `±` in the x1 x2 plane.
                let phi = w[1].atan2(w[0]) / 2.0;
                let r_plane = if planar { rho.sqrt() } else { rho };
                let y_plus: Vec<f64> = std::iter::once(r_plane * phi.cos())
                    .chain(std::iter::once(r_plane * phi.sin()))
                    .chain(w[2..].iter().copied())
                    .collect();
                let mut y_minus = y_plus.clone();
                y_minus[0] = -y_minus[0];
                y_minus[1] = -y_minus[1];
                let points = vec![self.unstretch(&y_plus), self.unstretch(&y_minus)];
                Ok(Preimages {
                    branch_point: rho == 0.0,
                    points: if rho == 0.0 { vec![points[0].clone()] } else { points },
                })
            }
        }
    }

    /// Inverse of the radial stretch.
    fn unstretch(&self, y: &[f64]) -> Vec<f64> {
        let s = norm(y);
        if s == 0.0 {
            return y.to_vec();
        }
        let factor = if s >= 1.0 / self.mf() {
            (1.0 + s.powf(self.alpha)) / s
        } else {
            1.0 / self.inner_factor()
        };
        y.iter().map(|c| factor * c).collect()
    }

    /// Outer dilatation `‖f'‖^n / J` from the closed-form differential.
    ///
    /// Returns `f64::INFINITY` where the differential is non-zero but the
    /// Jacobian vanishes (the branch set of the spatial map).
    pub fn k_o(&self, x: &[f64]) -> Result<f64> {
        self.check_domain(x)?;
        Ok(match self.kind {
            MapKind::Scaling | MapKind::InverseScaling => 1.0,
            MapKind::PlanarBranched => {
                let t = norm(x);
                if t >= self.glue_radius() {
                    t / (self.alpha * (t - 1.0))
                } else {
                    1.0
                }
            }
            MapKind::SpatialBranched => {
                let t = norm(x);
                let n = self.dim as i32;
                let y = self.stretch(x);
                if y[0].hypot(y[1]) == 0.0 && t > 0.0 {
                    return Ok(f64::INFINITY);
                }
                // Singular values of the composite differential: λr, 2λt, and
                // λt with multiplicity n - 2.
                let (lr, lt) = if t >= self.glue_radius() {
                    let g = (t - 1.0).powf(1.0 / self.alpha);
                    (g / (self.alpha * (t - 1.0)), g / t)
                } else {
                    (self.inner_factor(), self.inner_factor())
                };
                lr.max(2.0 * lt).powi(n) / (2.0 * lr * lt.powi(n - 1))
            }
        })
    }

    /// The displayed dilatation formula: exact for the planar map, an upper
    /// bound `2^(n-1) α^(1-n) (|x| / (|x| - 1))^(n-1)` for the spatial map.
    pub fn k_o_bound(&self, x: &[f64]) -> Result<f64> {
        self.check_domain(x)?;
        match self.kind {
            MapKind::SpatialBranched => {
                let t = norm(x);
                let n = self.dim as i32;
                Ok(if t >= self.glue_radius() {
                    2f64.powi(n - 1) * (t / (self.alpha * (t - 1.0))).powi(n - 1)
                } else {
                    2f64.powi(n - 1)
                })
            }
            _ => self.k_o(x),
        }
    }

    /// Central-difference Jacobian.
    pub fn jacobian_numeric(&self, x: &[f64], step: f64) -> Result<DMatrix<f64>> {
        self.check_domain(x)?;
        let n = self.dim;
        let mut jac = DMatrix::zeros(n, n);
        let mut xp = x.to_vec();
        for j in 0..n {
            xp[j] = x[j] + step;
            let fp = self.evaluate(&xp)?;
            xp[j] = x[j] - step;
            let fm = self.evaluate(&xp)?;
            xp[j] = x[j];
            for i in 0..n {
                jac[(i, j)] = (fp[i] - fm[i]) / (2.0 * step);
            }
        }
        Ok(jac)
    }

    /// Outer dilatation from a finite-difference Jacobian.
    pub fn k_o_numeric(&self, x: &[f64], step: f64) -> Result<f64> {
        let jac = self.jacobian_numeric(x, step)?;
        let det = jac.determinant();
        if !(det > 0.0) {
            return Err(Error::DegenerateJacobian {
                at: x.to_vec(),
                det,
            });
        }
        let norm_op = jac.singular_values().max();
        Ok(norm_op.powi(self.dim as i32) / det)
    }

    /// Sum of the outer dilatation over all preimages of `w`.
    pub fn k_i_sum(&self, w: &[f64]) -> Result<f64> {
        let pre = self.branch_inverses(w)?;
        if pre.branch_point {
            return Err(Error::BranchPoint(w.to_vec()));
        }
        pre.points
            .iter()
            .filter(|z| self.in_domain(z))
            .map(|z| self.k_o(z))
            .sum()
    }

    /// Weight `Q` paired with this family.
    pub fn q_weight(&self) -> QWeight {
        let n = self.dim;
        match self.kind {
            MapKind::Scaling => QWeight::constant(n, 1.0, None),
            MapKind::InverseScaling => QWeight::constant(n, 1.0, Some(1.0)),
            MapKind::PlanarBranched => QWeight::power(n, 4.0 / self.alpha, self.alpha, 1.0),
            MapKind::SpatialBranched => {
                let k = (n - 1) as f64;
                QWeight::power(
                    n,
                    2f64.powf(k) * 4.0 / self.alpha.powf(k),
                    k * self.alpha,
                    1.0,
                )
            }
        }
    }
}

/// `(r cos φ, r sin φ, x3, ..) ↦ (r cos 2φ, r sin 2φ, x3, ..)`.
fn double_angle(y: &[f64]) -> Vec<f64> {
    let r = y[0].hypot(y[1]);
    let mut out = y.to_vec();
    if r > 0.0 {
        out[0] = (y[0] * y[0] - y[1] * y[1]) / r;
        out[1] = 2.0 * y[0] * y[1] / r;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::dist;

    fn polar(r: f64, t: f64) -> Vec<f64> {
        vec![r * t.cos(), r * t.sin()]
    }

    #[test]
    fn scaling_examples() {
        let f = MapFamily::scaling(3, 2).unwrap();
        assert_eq!(f.evaluate(&[0.1, 0.0]).unwrap(), vec![0.30000000000000004, 0.0]);
        assert_eq!(f.k_o(&[0.2, 0.3]).unwrap(), 1.0);
        assert!(f.evaluate(&[1.5, 0.0]).is_err());
        let id = MapFamily::scaling(1, 2).unwrap();
        assert_eq!(id.evaluate(&[0.25, -0.5]).unwrap(), vec![0.25, -0.5]);
    }

    #[test]
    fn planar_boundary_maps_to_unit_circle() {
        for m in [1, 2, 4, 8, 16] {
            for alpha in [0.25, 0.5] {
                let f = MapFamily::planar(m, alpha, 3.0).unwrap();
                for k in 0..12 {
                    let w = f.evaluate(&polar(2.0, k as f64 * 0.5)).unwrap();
                    assert!((norm(&w) - 1.0).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn gluing_is_continuous() {
        let f = MapFamily::planar(2, 0.5, 3.0).unwrap();
        let rg = f.glue_radius();
        for k in 0..8 {
            let t = 0.3 + k as f64;
            let a = f.evaluate(&polar(rg * (1.0 - 1e-13), t)).unwrap();
            let b = f.evaluate(&polar(rg * (1.0 + 1e-13), t)).unwrap();
            assert!(dist(&a, &b) < 1e-9, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn planar_dilatation_examples() {
        let f = MapFamily::planar(4, 0.5, 3.0).unwrap();
        assert!((f.k_o(&[1.5, 0.0]).unwrap() - 6.0).abs() < 1e-12);
        assert_eq!(f.k_o(&[0.5, 0.0]).unwrap(), 1.0);
        // between the unit circle and the gluing circle the map is conformal
        let g = MapFamily::planar(2, 0.5, 3.0).unwrap();
        assert_eq!(g.k_o(&[1.5, 0.0]).unwrap(), 1.0);
    }

    #[test]
    fn preimage_examples() {
        let f = MapFamily::planar(2, 0.5, 3.0).unwrap();
        let w = polar(0.25, std::f64::consts::PI / 3.0);
        let pre = f.branch_inverses(&w).unwrap();
        assert_eq!(pre.points.len(), 2);
        for z in &pre.points {
            assert!(dist(&f.evaluate(z).unwrap(), &w) < 1e-12);
        }
        let origin = f.branch_inverses(&[0.0, 0.0]).unwrap();
        assert!(origin.branch_point);
        assert_eq!(origin.points, vec![vec![0.0, 0.0]]);
        assert!(f.k_i_sum(&[0.0, 0.0]).is_err());
    }

    #[test]
    fn closed_form_preimage_in_outer_ring() {
        // w = r e^{iφ} ↦ ±((√r)^α + 1) e^{iφ/2}
        let (alpha, r, phi) = (0.5, 0.6f64, 1.1f64);
        let f = MapFamily::planar(3, alpha, 3.0).unwrap();
        let pre = f.branch_inverses(&polar(r, phi)).unwrap();
        let modulus = r.sqrt().powf(alpha) + 1.0;
        assert!(dist(&pre.points[0], &polar(modulus, phi / 2.0)) < 1e-12);
        assert!(dist(&pre.points[1], &polar(-modulus, phi / 2.0)) < 1e-12);
    }

    #[test]
    fn k_i_bound_example() {
        let f = MapFamily::planar(2, 0.5, 3.0).unwrap();
        let w = polar(0.25, 0.4);
        let ki = f.k_i_sum(&w).unwrap();
        assert!(ki <= 16.0);
        assert!(ki <= f.q_weight().eval(&w));
    }

    #[test]
    fn spatial_roundtrip_and_dilatation() {
        let f = MapFamily::spatial(3, 0.5, 3, 1.2).unwrap();
        let w = vec![0.3, -0.2, 0.4];
        let pre = f.branch_inverses(&w).unwrap();
        assert_eq!(pre.points.len(), 2);
        for z in &pre.points {
            assert!(dist(&f.evaluate(z).unwrap(), &w) < 1e-12);
            let exact = f.k_o(z).unwrap();
            let bound = f.k_o_bound(z).unwrap();
            let fd = f.k_o_numeric(z, 1e-6).unwrap();
            assert!(exact <= bound);
            assert!((fd - exact).abs() < 1e-4 * exact, "{fd} vs {exact}");
        }
        assert_eq!(f.k_o(&[0.2, 0.1, 0.3]).unwrap(), 4.0);
        // on the x3 axis the two preimages merge
        let axis = f.branch_inverses(&[0.0, 0.0, 0.5]).unwrap();
        assert!(axis.branch_point);
        assert_eq!(axis.points.len(), 1);
    }

    #[test]
    fn parameter_validation() {
        assert!(MapFamily::planar(1, 0.7, 3.0).is_err());
        assert!(MapFamily::planar(1, 0.0, 3.0).is_err());
        assert!(MapFamily::planar(0, 0.5, 3.0).is_err());
        assert!(MapFamily::spatial(1, 0.74, 3, 2.0).is_ok());
        assert!(MapFamily::spatial(1, 0.76, 3, 2.0).is_err());
        assert!(MapFamily::new(MapKind::PlanarBranched, 1, 0.5, 3, 3.0).is_err());
    }

    #[test]
    fn outside_domain_rejected() {
        let f = MapFamily::planar(2, 0.5, 3.0).unwrap();
        assert!(matches!(f.evaluate(&[2.1, 0.0]), Err(Error::OutsideDomain(_))));
        assert!(matches!(f.evaluate(&[0.0, 0.0, 0.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn kind_names_roundtrip() {
        for k in [
            MapKind::Scaling,
            MapKind::InverseScaling,
            MapKind::PlanarBranched,
            MapKind::SpatialBranched,
        ] {
            assert_eq!(MapKind::from_name(k.name()), Some(k));
        }
    }
}

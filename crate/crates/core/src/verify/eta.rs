use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{norm, unit_sphere_area, ExtPoint};
use crate::mapzoo::QWeight;
use crate::quad;

/// Shortfall below 1 tolerated in `∫ η dr`.
pub const ADMISSIBILITY_TOL: f64 = 1e-9;

const QUAD_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EtaKind {
    /// `1 / (r2 - r1)`.
    Step,
    /// `1 / (t log(r2 / r1))`.
    InverseT,
    /// Piecewise linear through user knots.
    Table,
}

/// Radial test function `η` supported on `[r1, r2]`, normalized so that
/// `∫ η dr = 1` and then multiplied by `scale`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtaProfile {
    pub kind: EtaKind,
    pub r1: f64,
    pub r2: f64,
    /// Factor applied after normalization; 1 for the built-in profiles.
    pub scale: f64,
    /// `(t, value)` knots for [`EtaKind::Table`], strictly increasing in `t`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub knots: Vec<(f64, f64)>,
    /// Normalizing constant that made the raw profile integrate to one.
    pub normalization: f64,
}

fn check_interval(r1: f64, r2: f64) -> Result<()> {
    if !(r1 >= 0.0 && r1 < r2 && r2.is_finite()) {
        return Err(Error::contract(format!("need 0 <= r1 < r2 < inf, got r1 = {r1}, r2 = {r2}")));
    }
    Ok(())
}

impl EtaProfile {
    pub fn step(r1: f64, r2: f64) -> Result<Self> {
        check_interval(r1, r2)?;
        Ok(EtaProfile {
            kind: EtaKind::Step,
            r1,
            r2,
            scale: 1.0,
            knots: Vec::new(),
            normalization: 1.0 / (r2 - r1),
        })
    }

    pub fn inverse_t(r1: f64, r2: f64) -> Result<Self> {
        check_interval(r1, r2)?;
        if r1 == 0.0 {
            return Err(Error::contract("the 1/t profile needs r1 > 0"));
        }
        Ok(EtaProfile {
            kind: EtaKind::InverseT,
            r1,
            r2,
            scale: 1.0,
            knots: Vec::new(),
            normalization: 1.0 / (r2 / r1).ln(),
        })
    }

    /// Piecewise linear profile through `knots`, rescaled to unit integral.
    /// The first and last knots must sit at `r1` and `r2`.
    pub fn table(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::contract("table profile needs at least two knots"));
        }
        let (r1, r2) = (knots[0].0, knots[knots.len() - 1].0);
        check_interval(r1, r2)?;
        if knots.windows(2).any(|w| !(w[0].0 < w[1].0)) || knots.iter().any(|k| !(k.1 >= 0.0 && k.1.is_finite())) {
            return Err(Error::contract("table knots must increase in t and carry finite values >= 0"));
        }
        let raw: f64 = knots
            .windows(2)
            .map(|w| 0.5 * (w[0].1 + w[1].1) * (w[1].0 - w[0].0))
            .sum();
        if !(raw > 0.0) {
            return Err(Error::contract("table profile vanishes identically"));
        }
        Ok(EtaProfile {
            kind: EtaKind::Table,
            r1,
            r2,
            scale: 1.0,
            knots,
            normalization: 1.0 / raw,
        })
    }

    pub fn of_kind(kind: EtaKind, r1: f64, r2: f64) -> Result<Self> {
        match kind {
            EtaKind::Step => EtaProfile::step(r1, r2),
            EtaKind::InverseT => EtaProfile::inverse_t(r1, r2),
            EtaKind::Table => Err(Error::contract("table profiles need explicit knots")),
        }
    }

    pub fn scaled(mut self, k: f64) -> Self {
        self.scale *= k;
        self
    }

    pub fn eval(&self, t: f64) -> f64 {
        if !(t >= self.r1 && t <= self.r2) {
            return 0.0;
        }
        let raw = match self.kind {
            EtaKind::Step => 1.0,
            EtaKind::InverseT => 1.0 / t,
            EtaKind::Table => {
                let i = self.knots.partition_point(|k| k.0 <= t).clamp(1, self.knots.len() - 1);
                let ((t0, v0), (t1, v1)) = (self.knots[i - 1], self.knots[i]);
                v0 + (v1 - v0) * (t - t0) / (t1 - t0)
            }
        };
        self.scale * self.normalization * raw
    }

    /// Points where the profile fails to be smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self.kind {
            EtaKind::Table => self.knots.iter().map(|k| k.0).collect(),
            _ => vec![self.r1, self.r2],
        }
    }

    /// `∫ η dr` by quadrature.
    pub fn integral(&self) -> f64 {
        quad::tanh_sinh_pieces(|t| self.eval(t), &self.breakpoints(), QUAD_TOL).value
    }

    pub fn check_admissible(&self) -> Result<()> {
        let i = self.integral();
        if i < 1.0 - ADMISSIBILITY_TOL {
            return Err(Error::contract(format!("profile is not admissible: ∫η dr = {i} < 1")));
        }
        Ok(())
    }
}

/// `∫ Q(y) η(|y - y0|)^n dm(y)` over the shell `r1 <= |y - y0| <= r2`.
///
/// Polar coordinates centred at `y0` with the polar axis through the
/// origin turn the integral into a radial integral of the angular mean of
/// `Q`, which depends only on `|y|`; both one-dimensional integrals are
/// split at the support boundary and at the origin's distance from `y0`.
pub fn rhs_integral(q: &QWeight, y0: &ExtPoint, eta: &EtaProfile) -> Result<f64> {
    eta.check_admissible()?;
    let Some(c) = y0.coords() else {
        return Err(Error::contract("rhs integral needs a finite centre"));
    };
    let n = q.dim();
    crate::geom::check_dim(n, c.len())?;
    let d = norm(c);
    let singular = q.singular_exponent();
    if singular > 0.0 && d >= eta.r1 && d <= eta.r2 && singular >= n as f64 {
        return Err(Error::Divergent(format!(
            "Q ~ |y|^-{singular} is not integrable near the origin in dimension {n}"
        )));
    }
    let support = q.support_radius();
    let mut breaks = eta.breakpoints();
    let mut extra = vec![d];
    if let Some(big_r) = support {
        extra.push((big_r - d).abs());
        extra.push(big_r + d);
    }
    for b in extra {
        if b > eta.r1 && b < eta.r2 {
            breaks.push(b);
        }
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();

    let radial = |r: f64| -> f64 {
        let e = eta.eval(r);
        if e == 0.0 {
            return 0.0;
        }
        e.powi(n as i32) * r.powi(n as i32 - 1) * angular_mass(q, d, r, n, support)
    };
    Ok(quad::tanh_sinh_pieces(radial, &breaks, QUAD_TOL).value)
}

/// `∫_{S^{n-1}} Q(y0 + r ω) dω` for `|y0| = d`.
fn angular_mass(q: &QWeight, d: f64, r: f64, n: usize, support: Option<f64>) -> f64 {
    if d == 0.0 {
        return unit_sphere_area(n) * q.eval_radius(r);
    }
    // |y|^2 = d^2 + r^2 + 2 r d cos θ
    let at = |theta: f64| -> f64 {
        let y2 = d * d + r * r + 2.0 * r * d * theta.cos();
        q.eval_radius(y2.max(0.0).sqrt()) * theta.sin().powi(n as i32 - 2)
    };
    let mut breaks = vec![0.0, PI];
    if let Some(big_r) = support {
        let c = (big_r * big_r - d * d - r * r) / (2.0 * r * d);
        if c > -1.0 && c < 1.0 {
            breaks.insert(1, c.acos());
        }
    }
    let sub = if n == 2 { 2.0 } else { unit_sphere_area(n - 1) };
    sub * quad::tanh_sinh_pieces(at, &breaks, QUAD_TOL).value
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn built_in_profiles_integrate_to_one() {
        for eta in [
            EtaProfile::step(0.25, 0.5).unwrap(),
            EtaProfile::inverse_t(0.3, 0.6).unwrap(),
            EtaProfile::table(vec![(1.0, 0.0), (1.5, 2.0), (2.0, 1.0)]).unwrap(),
        ] {
            let i = eta.integral();
            assert!((1.0 - ADMISSIBILITY_TOL..=1.0 + 1e-3).contains(&i), "{:?}: {i}", eta.kind);
            assert!(eta.check_admissible().is_ok());
        }
    }

    #[test]
    fn scaled_profile_is_rejected() {
        let eta = EtaProfile::step(1.0, 2.0).unwrap().scaled(0.5);
        let q = QWeight::constant(2, 1.0, None);
        assert!(matches!(rhs_integral(&q, &ExtPoint::origin(2), &eta), Err(Error::Contract(_))));
    }

    #[test]
    fn constant_weight_on_plane_shell() {
        let eta = EtaProfile::step(1.0, 2.0).unwrap();
        let q = QWeight::constant(2, 1.0, None);
        let v = rhs_integral(&q, &ExtPoint::origin(2), &eta).unwrap();
        assert!((v - 3.0 * PI).abs() < 1e-9);
        // off-centre shells see the same constant
        let y0 = ExtPoint::finite(vec![0.7, -0.2]).unwrap();
        let v = rhs_integral(&q, &y0, &eta).unwrap();
        assert!((v - 3.0 * PI).abs() < 1e-8, "{v}");
    }

    #[test]
    fn power_weight_closed_form() {
        // (r2 - r1)^-2 · 2π ∫ 4/(α r^α) r dr
        let alpha = 0.5;
        let q = QWeight::power(2, 4.0 / alpha, alpha, 1.0);
        let (r1, r2) = (0.25, 0.5);
        let eta = EtaProfile::step(r1, r2).unwrap();
        let k = 2.0 - alpha;
        let closed = 2.0 * PI * 4.0 / alpha * (r2.powf(k) - r1.powf(k)) / k / (r2 - r1).powi(2);
        let v = rhs_integral(&q, &ExtPoint::origin(2), &eta).unwrap();
        assert!((v - closed).abs() < 1e-9 * closed);
    }

    #[test]
    fn off_centre_shell_against_brute_force() {
        // midpoint-rule sum over a fine polar mesh around y0
        let q = QWeight::power(2, 8.0, 0.5, 1.0);
        let y0 = vec![0.3, 0.0];
        let eta = EtaProfile::inverse_t(0.2, 0.5).unwrap();
        let v = rhs_integral(&q, &ExtPoint::finite(y0.clone()).unwrap(), &eta).unwrap();
        let (nr, nt) = (1500, 1500);
        let mut sum = 0.0;
        for i in 0..nr {
            let r = 0.2 + (i as f64 + 0.5) * 0.3 / nr as f64;
            for j in 0..nt {
                let t = (j as f64 + 0.5) * 2.0 * PI / nt as f64;
                let y = [y0[0] + r * t.cos(), y0[1] + r * t.sin()];
                sum += q.eval(&y) * eta.eval(r).powi(2) * r;
            }
        }
        sum *= 0.3 / nr as f64 * 2.0 * PI / nt as f64;
        assert!((v - sum).abs() < 3e-3 * v, "{v} vs {sum}");
    }

    #[test]
    fn three_dimensional_off_centre_constant() {
        // Q = 1 on the unit ball, shell around y0 = (2,0,0) with radii
        // 0.5..1.5: only the lens |y| <= 1 contributes
        let q = QWeight::constant(3, 1.0, Some(1.0));
        let eta = EtaProfile::step(0.5, 1.5).unwrap();
        let y0 = ExtPoint::finite(vec![2.0, 0.0, 0.0]).unwrap();
        let v = rhs_integral(&q, &y0, &eta).unwrap();
        // |B(0,1) ∩ B(y0, 1.5)| minus nothing: the inner ball B(y0, 0.5)
        // misses the unit ball; lens volume by the two-cap formula
        let cap = |h: f64, rad: f64| PI * h * h * (3.0 * rad - h) / 3.0;
        let x = (2.0f64 * 2.0 + 1.0 - 1.5 * 1.5) / (2.0 * 2.0);
        let lens = cap(1.0 - x, 1.0) + cap(1.5 - (2.0 - x), 1.5);
        assert!((v - lens).abs() < 1e-7, "{v} vs {lens}");
    }

    #[test]
    fn divergent_when_singularity_inside_shell() {
        let q = QWeight::power(2, 1.0, 2.5, 1.0);
        let eta = EtaProfile::step(0.1, 0.4).unwrap();
        let y0 = ExtPoint::finite(vec![0.2, 0.0]).unwrap();
        assert!(matches!(rhs_integral(&q, &y0, &eta), Err(Error::Divergent(_))));
    }
}

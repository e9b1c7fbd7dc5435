//! Geometry of the extended space `R^n ∪ {∞}`.
//!
//! Points are plain coordinate vectors; the dimension is carried by the
//! vector length and checked wherever two objects meet.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of the extended space: either finite coordinates or `∞`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtPoint {
    Finite(Vec<f64>),
    Infinity,
}

impl ExtPoint {
    pub fn finite(coords: impl Into<Vec<f64>>) -> Result<Self> {
        let coords = coords.into();
        if coords.len() < 2 {
            return Err(Error::contract("dimension must be at least 2"));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::contract("finite point with non-finite coordinate"));
        }
        Ok(ExtPoint::Finite(coords))
    }

    pub fn origin(dim: usize) -> Self {
        ExtPoint::Finite(vec![0.0; dim])
    }

    pub fn coords(&self) -> Option<&[f64]> {
        match self {
            ExtPoint::Finite(c) => Some(c),
            ExtPoint::Infinity => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtPoint::Infinity)
    }
}

impl From<Vec<f64>> for ExtPoint {
    fn from(v: Vec<f64>) -> Self {
        ExtPoint::Finite(v)
    }
}

pub fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn dist(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    x.iter()
        .zip(y)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        Err(Error::DimensionMismatch { expected, got })
    } else {
        Ok(())
    }
}

/// Chordal distance on the sphere of diameter one.
///
/// `h(x, y) = |x - y| / (sqrt(1 + |x|^2) sqrt(1 + |y|^2))` and
/// `h(x, ∞) = 1 / sqrt(1 + |x|^2)`.
pub fn chordal_distance(x: &ExtPoint, y: &ExtPoint) -> Result<f64> {
    match (x, y) {
        (ExtPoint::Infinity, ExtPoint::Infinity) => Ok(0.0),
        (ExtPoint::Finite(a), ExtPoint::Infinity) | (ExtPoint::Infinity, ExtPoint::Finite(a)) => {
            Ok(1.0 / (1.0 + norm_sq(a)).sqrt())
        }
        (ExtPoint::Finite(a), ExtPoint::Finite(b)) => {
            check_dim(a.len(), b.len())?;
            Ok(chordal_finite(a, b))
        }
    }
}

pub(crate) fn chordal_finite(a: &[f64], b: &[f64]) -> f64 {
    let d = dist(a, b);
    if d == 0.0 {
        return 0.0;
    }
    d / ((1.0 + norm_sq(a)).sqrt() * (1.0 + norm_sq(b)).sqrt())
}

fn norm_sq(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

/// Largest pairwise chordal distance of a finite set.
pub fn chordal_diameter(points: &[ExtPoint]) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::contract("chordal diameter of an empty set"));
    }
    let mut best = 0.0f64;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            best = best.max(chordal_distance(a, b)?);
        }
    }
    Ok(best)
}

/// Open ring `r1 < |y - y0| < r2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Annulus {
    pub center: Vec<f64>,
    pub r1: f64,
    pub r2: f64,
}

impl Annulus {
    pub fn new(center: impl Into<Vec<f64>>, r1: f64, r2: f64) -> Result<Self> {
        let a = Annulus {
            center: center.into(),
            r1,
            r2,
        };
        a.validate()?;
        Ok(a)
    }

    pub fn validate(&self) -> Result<()> {
        if self.center.len() < 2 || self.center.iter().any(|c| !c.is_finite()) {
            return Err(Error::contract("annulus center must be a finite point, n >= 2"));
        }
        if !(self.r1 > 0.0 && self.r1 < self.r2 && self.r2.is_finite()) {
            return Err(Error::contract(format!(
                "annulus radii must satisfy 0 < r1 < r2 < inf (r1 = {}, r2 = {})",
                self.r1, self.r2
            )));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    /// Strict membership; points on either sphere are outside.
    pub fn contains(&self, x: &ExtPoint) -> Result<bool> {
        match x {
            ExtPoint::Infinity => Ok(false),
            ExtPoint::Finite(c) => {
                check_dim(self.dim(), c.len())?;
                Ok(self.contains_coords(c))
            }
        }
    }

    pub(crate) fn contains_coords(&self, c: &[f64]) -> bool {
        let r = dist(c, &self.center);
        self.r1 < r && r < self.r2
    }

    pub fn inner(&self) -> Sphere {
        Sphere {
            center: self.center.clone(),
            radius: self.r1,
        }
    }

    pub fn outer(&self) -> Sphere {
        Sphere {
            center: self.center.clone(),
            radius: self.r2,
        }
    }

    /// Lebesgue measure of the ring.
    pub fn volume(&self) -> f64 {
        let n = self.dim();
        unit_ball_volume(n) * (self.r2.powi(n as i32) - self.r1.powi(n as i32))
    }
}

pub fn annulus_contains(a: &Annulus, x: &ExtPoint) -> Result<bool> {
    a.contains(x)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sphere {
    pub center: Vec<f64>,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: impl Into<Vec<f64>>, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::contract("ball radius must be positive"));
        }
        Ok(Ball {
            center: center.into(),
            radius,
        })
    }

    /// Open ball membership.
    pub fn contains(&self, x: &[f64]) -> bool {
        dist(x, &self.center) < self.radius
    }
}

/// Closed point sets used as curve endpoints and domains.
///
/// Every variant is connected, which the intersection test relies on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    /// `|x - center| <= radius`
    Ball { center: Vec<f64>, radius: f64 },
    /// `|x - center| == radius`
    Sphere { center: Vec<f64>, radius: f64 },
    /// `|x - center| >= radius`
    Exterior { center: Vec<f64>, radius: f64 },
    /// `x[axis] <= bound` when `upper` is false, `x[axis] >= bound` otherwise.
    HalfSpace { axis: usize, bound: f64, upper: bool },
    /// Axis-aligned closed box.
    Box { lo: Vec<f64>, hi: Vec<f64> },
}

impl Region {
    pub fn dim(&self) -> Option<usize> {
        match self {
            Region::Ball { center, .. }
            | Region::Sphere { center, .. }
            | Region::Exterior { center, .. } => Some(center.len()),
            Region::Box { lo, .. } => Some(lo.len()),
            Region::HalfSpace { .. } => None,
        }
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        if let Some(d) = self.dim() {
            check_dim(dim, d)?;
        }
        match self {
            Region::Ball { radius, .. } | Region::Sphere { radius, .. } if !(*radius > 0.0) => {
                Err(Error::contract("region radius must be positive"))
            }
            Region::Exterior { radius, .. } if !(*radius >= 0.0) => {
                Err(Error::contract("exterior radius must be nonnegative"))
            }
            Region::HalfSpace { axis, bound, .. } if *axis >= dim || !bound.is_finite() => {
                Err(Error::contract("half-space axis out of range"))
            }
            Region::Box { lo, hi } => {
                check_dim(lo.len(), hi.len())?;
                if lo.iter().zip(hi).any(|(a, b)| !(a <= b)) {
                    Err(Error::contract("box corners out of order"))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            Region::Ball { center, radius } => dist(x, center) <= *radius,
            Region::Sphere { center, radius } => (dist(x, center) - radius).abs() <= 1e-12,
            Region::Exterior { center, radius } => dist(x, center) >= *radius,
            Region::HalfSpace { axis, bound, upper } => {
                if *upper {
                    x[*axis] >= *bound
                } else {
                    x[*axis] <= *bound
                }
            }
            Region::Box { lo, hi } => x
                .iter()
                .zip(lo.iter().zip(hi))
                .all(|(v, (a, b))| *a <= *v && *v <= *b),
        }
    }

    /// `inf` and `sup` of `|x - p|` over the region.
    fn dist_range(&self, p: &[f64]) -> (f64, f64) {
        match self {
            Region::Ball { center, radius } => {
                let d = dist(p, center);
                ((d - radius).max(0.0), d + radius)
            }
            Region::Sphere { center, radius } => {
                let d = dist(p, center);
                ((d - radius).abs(), d + radius)
            }
            Region::Exterior { center, radius } => {
                let d = dist(p, center);
                ((radius - d).max(0.0), f64::INFINITY)
            }
            Region::HalfSpace { axis, bound, upper } => {
                let gap = if *upper { bound - p[*axis] } else { p[*axis] - bound };
                (gap.max(0.0), f64::INFINITY)
            }
            Region::Box { lo, hi } => {
                let mut near = 0.0;
                let mut far = 0.0;
                for i in 0..p.len() {
                    let below = lo[i] - p[i];
                    let above = p[i] - hi[i];
                    let g = below.max(above).max(0.0);
                    near += g * g;
                    let f = (p[i] - lo[i]).abs().max((p[i] - hi[i]).abs());
                    far += f * f;
                }
                (near.sqrt(), far.sqrt())
            }
        }
    }

    /// Whether the two closed sets share a point.
    pub fn intersects(&self, other: &Region) -> bool {
        use Region::*;
        match (self, other) {
            (Ball { center, radius }, o) | (o, Ball { center, radius }) => {
                o.dist_range(center).0 <= *radius
            }
            (Sphere { center, radius }, o) | (o, Sphere { center, radius }) => {
                let (lo, hi) = o.dist_range(center);
                lo <= *radius && *radius <= hi
            }
            (Exterior { center, radius }, o) | (o, Exterior { center, radius }) => {
                o.dist_range(center).1 >= *radius
            }
            (
                HalfSpace {
                    axis: a1,
                    bound: b1,
                    upper: u1,
                },
                HalfSpace {
                    axis: a2,
                    bound: b2,
                    upper: u2,
                },
            ) => {
                if a1 != a2 || u1 == u2 {
                    true
                } else if *u1 {
                    b1 <= b2
                } else {
                    b2 <= b1
                }
            }
            (HalfSpace { axis, bound, upper }, Box { lo, hi })
            | (Box { lo, hi }, HalfSpace { axis, bound, upper }) => {
                if *upper {
                    hi[*axis] >= *bound
                } else {
                    lo[*axis] <= *bound
                }
            }
            (Box { lo: l1, hi: h1 }, Box { lo: l2, hi: h2 }) => {
                (0..l1.len()).all(|i| l1[i] <= h2[i] && l2[i] <= h1[i])
            }
        }
    }
}

/// Volume of the unit ball in `R^n`.
pub fn unit_ball_volume(n: usize) -> f64 {
    unit_sphere_area(n) / n as f64
}

/// Surface measure of the unit sphere `S^{n-1}` in `R^n`.
pub fn unit_sphere_area(n: usize) -> f64 {
    // |S^{n-1}| = 2 pi^{n/2} / Gamma(n/2), via the recurrence |S^{n+1}| = 2 pi |S^{n-1}| / n.
    match n {
        0 => 0.0,
        1 => 2.0,
        2 => 2.0 * PI,
        _ => 2.0 * PI * unit_sphere_area(n - 2) / (n - 2) as f64,
    }
}

/// Deterministic, roughly equidistributed unit vectors.
///
/// In the plane these are `count` equally spaced angles starting at 0; in
/// three dimensions a spherical Fibonacci lattice whose first point is
/// `e1` when `count == 1`. Higher dimensions use normalized Gaussians from
/// a fixed seed.
pub fn sphere_directions(dim: usize, count: usize) -> Vec<Vec<f64>> {
    match dim {
        2 => (0..count)
            .map(|i| {
                let t = 2.0 * PI * i as f64 / count as f64;
                vec![t.cos(), t.sin()]
            })
            .collect(),
        3 => {
            let golden = PI * (3.0 - 5f64.sqrt());
            (0..count)
                .map(|i| {
                    let z = 1.0 - (2 * i + 1) as f64 / count as f64;
                    let r = (1.0 - z * z).max(0.0).sqrt();
                    let t = golden * i as f64;
                    vec![r * t.cos(), r * t.sin(), z]
                })
                .collect()
        }
        _ => {
            use rand::{RngExt, SeedableRng};
            use rand_distr::StandardNormal;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
            (0..count)
                .map(|_| loop {
                    let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
                    let r = norm(&v);
                    if r > 1e-12 {
                        break v.into_iter().map(|c| c / r).collect();
                    }
                })
                .collect()
        }
    }
}

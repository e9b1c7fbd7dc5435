//! Discretized curves, finite curve families and their generators.

mod incidence;
mod io;
mod lift;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{dist, sphere_directions, Annulus, Region};

pub use incidence::curve_cell_incidence;
pub(crate) use incidence::{merge as merge_incidence, segment_incidence};
pub use io::{parse_family, write_family};
pub use lift::lift_family;

/// Polygonal curve with at least two vertices and no repeated consecutive
/// vertex. `step` is an upper bound on the spacing of consecutive vertices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polyline {
    vertices: Vec<Vec<f64>>,
    step: f64,
}

impl Polyline {
    pub fn new(vertices: Vec<Vec<f64>>) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::contract("polyline needs at least two vertices"));
        }
        let dim = vertices[0].len();
        if dim < 2 {
            return Err(Error::contract("polyline dimension must be at least 2"));
        }
        let mut step = 0.0f64;
        for w in vertices.windows(2) {
            if w[1].len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: w[1].len(),
                });
            }
            let d = dist(&w[0], &w[1]);
            if !(d > 0.0) {
                return Err(Error::contract("consecutive polyline vertices must be distinct"));
            }
            step = step.max(d);
        }
        if vertices.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::contract("polyline vertex with non-finite coordinate"));
        }
        Ok(Polyline { vertices, step })
    }

    /// Straight segment subdivided so that the spacing is at most `step`.
    pub fn segment(a: &[f64], b: &[f64], step: f64) -> Result<Self> {
        Polyline::new(vec![a.to_vec(), b.to_vec()])?.resample(step)
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    pub fn dim(&self) -> usize {
        self.vertices[0].len()
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn first(&self) -> &[f64] {
        &self.vertices[0]
    }

    pub fn last(&self) -> &[f64] {
        &self.vertices[self.vertices.len() - 1]
    }

    pub fn length(&self) -> f64 {
        self.vertices.windows(2).map(|w| dist(&w[0], &w[1])).sum()
    }

    /// Inserts equally spaced vertices so no gap exceeds `max_step`.
    pub fn resample(&self, max_step: f64) -> Result<Self> {
        if !(max_step > 0.0) {
            return Err(Error::contract("resampling step must be positive"));
        }
        let mut out = vec![self.vertices[0].clone()];
        for w in self.vertices.windows(2) {
            let d = dist(&w[0], &w[1]);
            let k = (d / max_step).ceil().max(1.0) as usize;
            for j in 1..=k {
                let t = j as f64 / k as f64;
                out.push(w[0].iter().zip(&w[1]).map(|(a, b)| a + t * (b - a)).collect());
            }
        }
        Polyline::new(out)
    }

    /// The piece between vertex `from` and vertex `to` inclusive.
    pub fn sub_polyline(&self, from: usize, to: usize) -> Result<Self> {
        if from >= to || to >= self.vertices.len() {
            return Err(Error::contract("sub-polyline range out of order"));
        }
        Polyline::new(self.vertices[from..=to].to_vec())
    }
}

/// Per-curve failure recorded while building a family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveIssue {
    pub curve: usize,
    pub branch: Option<usize>,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FamilyMeta {
    pub description: String,
    pub params: BTreeMap<String, f64>,
    pub issues: Vec<CurveIssue>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveFamily {
    pub curves: Vec<Polyline>,
    pub meta: FamilyMeta,
}

impl CurveFamily {
    pub fn new(curves: Vec<Polyline>, description: impl Into<String>) -> Result<Self> {
        if let Some(first) = curves.first() {
            let d = first.dim();
            if let Some(c) = curves.iter().find(|c| c.dim() != d) {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: c.dim(),
                });
            }
        }
        Ok(CurveFamily {
            curves,
            meta: FamilyMeta {
                description: description.into(),
                ..Default::default()
            },
        })
    }

    pub fn len(&self) -> usize {
        self.curves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curves.is_empty()
    }

    pub fn dim(&self) -> Option<usize> {
        self.curves.first().map(Polyline::dim)
    }

    pub fn with_param(mut self, key: &str, value: f64) -> Self {
        self.meta.params.insert(key.to_string(), value);
        self
    }

    /// Concatenation of two families over the same space.
    pub fn union(&self, other: &CurveFamily) -> Result<CurveFamily> {
        let mut curves = self.curves.clone();
        curves.extend(other.curves.iter().cloned());
        CurveFamily::new(
            curves,
            format!("({}) ∪ ({})", self.meta.description, other.meta.description),
        )
    }
}

/// `count` radial segments crossing the closed ring from the inner to the
/// outer sphere along equidistributed directions.
pub fn radial_family(a: &Annulus, count: usize, step: f64) -> Result<CurveFamily> {
    a.validate()?;
    if count == 0 {
        return Err(Error::contract("radial family needs count >= 1"));
    }
    let n = a.dim();
    let curves = sphere_directions(n, count)
        .into_iter()
        .map(|u| {
            let p = |r: f64| -> Vec<f64> { a.center.iter().zip(&u).map(|(c, d)| c + r * d).collect() };
            Polyline::segment(&p(a.r1), &p(a.r2), step)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CurveFamily::new(curves, "radial segments crossing an annulus")?
        .with_param("r1", a.r1)
        .with_param("r2", a.r2)
        .with_param("count", count as f64)
        .with_param("step", step))
}

/// Region in which connecting curves must run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    /// The whole grid box.
    Whole,
    Annulus(Annulus),
    Region(Region),
    /// Explicit cell indicator in the grid's flat order.
    Mask(Vec<bool>),
}

impl Domain {
    pub(crate) fn contains(&self, x: &[f64]) -> Option<bool> {
        match self {
            Domain::Whole => Some(true),
            Domain::Annulus(a) => Some(a.contains_coords(x)),
            Domain::Region(r) => Some(r.contains(x)),
            Domain::Mask(_) => None,
        }
    }
}

/// The family of all curves joining `e` to `f` inside `domain`, represented
/// implicitly; the connecting solver realizes it through shortest paths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConnectingSpec {
    pub e: Region,
    pub f: Region,
    pub domain: Domain,
}

pub fn connecting_family_spec(e: Region, f: Region, domain: Domain) -> Result<ConnectingSpec> {
    if let (Some(a), Some(b)) = (e.dim(), f.dim()) {
        crate::geom::check_dim(a, b)?;
    }
    if let Some(d) = e.dim().or(f.dim()) {
        e.validate(d)?;
        f.validate(d)?;
    }
    if e.intersects(&f) {
        return Err(Error::contract("connecting family needs disjoint E and F"));
    }
    Ok(ConnectingSpec { e, f, domain })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::norm;

    #[test]
    fn radial_family_examples() {
        let a = Annulus::new(vec![0.0, 0.0], 1.0, 2.0).unwrap();
        let fam = radial_family(&a, 4, 0.1).unwrap();
        assert_eq!(fam.len(), 4);
        let ends = [[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]];
        for (c, e) in fam.curves.iter().zip(ends) {
            assert!((c.length() - 1.0).abs() < 1e-12);
            assert!((norm(c.first()) - 1.0).abs() < 1e-12);
            assert!((norm(c.last()) - 2.0).abs() < 1e-12);
            assert!(dist(c.first(), &e) < 1e-12);
            assert!(c.step() <= 0.1 + 1e-12);
        }
        let one = radial_family(&a, 1, 1.0).unwrap();
        assert_eq!(one.curves[0].vertices(), &[vec![1.0, 0.0], vec![2.0, 0.0]]);
    }

    #[test]
    fn radial_family_three_dimensions() {
        let a = Annulus::new(vec![0.5, 0.0, -0.5], 0.2, 0.7).unwrap();
        for c in radial_family(&a, 33, 0.05).unwrap().curves {
            assert!((dist(c.first(), &a.center) - 0.2).abs() < 1e-12);
            assert!((dist(c.last(), &a.center) - 0.7).abs() < 1e-12);
        }
    }

    #[test]
    fn polyline_invariants() {
        assert!(Polyline::new(vec![vec![0.0, 0.0]]).is_err());
        assert!(Polyline::new(vec![vec![0.0, 0.0], vec![0.0, 0.0]]).is_err());
        assert!(Polyline::new(vec![vec![0.0, 0.0], vec![1.0, 0.0, 0.0]]).is_err());
        let p = Polyline::segment(&[0.0, 0.0], &[1.0, 1.0], 0.1).unwrap();
        assert!(p.step() <= 0.1);
        assert!((p.length() - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn connecting_spec_checks_overlap() {
        let left = Region::HalfSpace {
            axis: 0,
            bound: 0.0,
            upper: false,
        };
        let right = Region::HalfSpace {
            axis: 0,
            bound: 2.0,
            upper: true,
        };
        let rect = Domain::Region(Region::Box {
            lo: vec![0.0, 0.0],
            hi: vec![2.0, 1.0],
        });
        assert!(connecting_family_spec(left.clone(), right, rect.clone()).is_ok());
        let overlapping = Region::HalfSpace {
            axis: 0,
            bound: -1.0,
            upper: true,
        };
        assert!(connecting_family_spec(left, overlapping, rect).is_err());

        let ring = Annulus::new(vec![0.0, 0.0], 1.0, 2.0).unwrap();
        let spec = connecting_family_spec(
            Region::Sphere {
                center: vec![0.0, 0.0],
                radius: 1.0,
            },
            Region::Sphere {
                center: vec![0.0, 0.0],
                radius: 2.0,
            },
            Domain::Annulus(ring),
        );
        assert!(spec.is_ok());
    }
}

use crate::error::{Error, Result};
use crate::geom::dist;
use crate::mapzoo::MapFamily;

use super::{CurveFamily, CurveIssue, Polyline};

/// Maximum number of bisections of one image segment while refining a lift.
const MAX_REFINE_DEPTH: u32 = 24;

/// Lifts every curve of `fam` through every branch of `map`.
///
/// The output holds, per input curve, one polyline per branch (`+` branch
/// first). Each lift starts on its labelled preimage of the first vertex
/// and continues along the preimage nearest to the previous lifted vertex;
/// image segments are bisected until consecutive lifted vertices are no
/// farther apart than the input curve's step. Curves that hit the branch
/// set or leave the image are dropped and recorded in the family metadata.
pub fn lift_family(fam: &CurveFamily, map: &MapFamily) -> Result<CurveFamily> {
    if let Some(d) = fam.dim() {
        crate::geom::check_dim(map.dim, d)?;
    }
    let branches = map.branch_count();
    let mut curves = Vec::with_capacity(fam.len() * branches);
    let mut issues = fam.meta.issues.clone();
    for (ci, curve) in fam.curves.iter().enumerate() {
        for b in 0..branches {
            match lift_curve(curve, map, b) {
                Ok(p) => curves.push(p),
                Err(e) => issues.push(CurveIssue {
                    curve: ci,
                    branch: Some(b),
                    message: e.to_string(),
                }),
            }
        }
    }
    let mut out = CurveFamily::new(curves, format!("lift of [{}] through {}", fam.meta.description, map.id()))?;
    out.meta.params = fam.meta.params.clone();
    out.meta.params.insert("branches".into(), branches as f64);
    out.meta.issues = issues;
    Ok(out)
}

fn preimages(map: &MapFamily, w: &[f64]) -> Result<Vec<Vec<f64>>> {
    let pre = map.branch_inverses(w)?;
    if pre.branch_point {
        return Err(Error::BranchPoint(w.to_vec()));
    }
    Ok(pre.points)
}

fn nearest(cands: Vec<Vec<f64>>, prev: &[f64]) -> Vec<f64> {
    cands
        .into_iter()
        .min_by(|a, b| dist(a, prev).total_cmp(&dist(b, prev)))
        .expect("at least one preimage")
}

fn lift_curve(curve: &Polyline, map: &MapFamily, branch: usize) -> Result<Polyline> {
    let step = curve.step();
    let verts = curve.vertices();
    let mut first = preimages(map, &verts[0])?;
    if branch >= first.len() {
        return Err(Error::contract("branch index out of range"));
    }
    let mut out = vec![first.swap_remove(branch)];
    for w in verts.windows(2) {
        push_refined(map, &w[0], &w[1], step, 0, &mut out)?;
    }
    Polyline::new(out)
}

/// Appends the lift of the image segment `a -> b` (excluding `a`).
fn push_refined(
    map: &MapFamily,
    a: &[f64],
    b: &[f64],
    step: f64,
    depth: u32,
    out: &mut Vec<Vec<f64>>,
) -> Result<()> {
    let prev = out.last().expect("lift starts with one vertex").clone();
    let zb = nearest(preimages(map, b)?, &prev);
    if dist(&zb, &prev) <= step || depth >= MAX_REFINE_DEPTH {
        if dist(&zb, &prev) > 0.0 {
            out.push(zb);
        }
        return Ok(());
    }
    let mid: Vec<f64> = a.iter().zip(b).map(|(x, y)| 0.5 * (x + y)).collect();
    push_refined(map, a, &mid, step, depth + 1, out)?;
    push_refined(map, &mid, b, step, depth + 1, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::radial_family;
    use crate::geom::{norm, Annulus};

    #[test]
    fn lifted_radial_family_roundtrips() {
        let map = MapFamily::planar(2, 0.5, 3.0).unwrap();
        let a = Annulus::new(vec![0.0, 0.0], 0.3, 0.6).unwrap();
        let fam = radial_family(&a, 5, 0.01).unwrap();
        let lifted = lift_family(&fam, &map).unwrap();
        assert_eq!(lifted.len(), 10);
        assert!(lifted.meta.issues.is_empty());
        for (k, c) in lifted.curves.iter().enumerate() {
            let src = &fam.curves[k / 2];
            assert!(c.step() <= src.step() + 1e-12);
            for z in c.vertices() {
                let w = map.evaluate(z).unwrap();
                let r = norm(&w);
                assert!(r > 0.3 - 1e-9 && r < 0.6 + 1e-9);
            }
            let w0 = map.evaluate(c.first()).unwrap();
            let w1 = map.evaluate(c.last()).unwrap();
            assert!(dist(&w0, src.first()) < 1e-9);
            assert!(dist(&w1, src.last()) < 1e-9);
        }
    }

    #[test]
    fn identity_lift_is_identity() {
        let map = MapFamily::scaling(1, 2).unwrap();
        let a = Annulus::new(vec![0.0, 0.0], 0.2, 0.7).unwrap();
        let fam = radial_family(&a, 7, 0.05).unwrap();
        let lifted = lift_family(&fam, &map).unwrap();
        assert_eq!(lifted.curves, fam.curves);
    }

    #[test]
    fn curve_through_branch_point_is_recorded() {
        let map = MapFamily::planar(2, 0.5, 3.0).unwrap();
        let c = Polyline::new(vec![vec![-0.3, 0.0], vec![0.0, 0.0], vec![0.3, 0.0]]).unwrap();
        let fam = CurveFamily::new(vec![c], "through the origin").unwrap();
        let lifted = lift_family(&fam, &map).unwrap();
        assert!(lifted.is_empty());
        assert_eq!(lifted.meta.issues.len(), 2);
        assert!(lifted.meta.issues[0].message.contains("branch point"));
    }

    #[test]
    fn lift_across_the_cut_stays_continuous() {
        // crosses the negative real axis, where the half-angle formula jumps
        let map = MapFamily::planar(3, 0.5, 3.0).unwrap();
        let pts: Vec<Vec<f64>> = (0..=40)
            .map(|k| {
                let t = 2.5 + k as f64 * 0.03;
                vec![0.5 * t.cos(), 0.5 * t.sin()]
            })
            .collect();
        let fam = CurveFamily::new(vec![Polyline::new(pts).unwrap()], "arc").unwrap();
        let lifted = lift_family(&fam, &map).unwrap();
        for c in &lifted.curves {
            assert!(c.step() <= fam.curves[0].step() + 1e-12);
        }
    }
}

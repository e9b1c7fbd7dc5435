use crate::error::{Error, Result};
use crate::modsolve::Grid;

use super::Polyline;

/// Lengths of `c` inside each grid cell, sorted by cell index.
///
/// A segment running along a shared face is charged to the cell with the
/// larger index. The lengths sum to the polyline length up to rounding.
pub fn curve_cell_incidence(c: &Polyline, g: &Grid) -> Result<Vec<(usize, f64)>> {
    if c.dim() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: g.dim(),
            got: c.dim(),
        });
    }
    if let Some(v) = c.vertices().iter().find(|v| !g.contains(v)) {
        return Err(Error::contract(format!("curve vertex {v:?} outside grid box")));
    }
    let mut out = Vec::new();
    for w in c.vertices().windows(2) {
        segment_incidence(g, &w[0], &w[1], &mut out);
    }
    Ok(merge(out))
}

/// Appends the per-cell pieces of the segment `a -> b` (unmerged).
pub(crate) fn segment_incidence(g: &Grid, a: &[f64], b: &[f64], out: &mut Vec<(usize, f64)>) {
    let n = g.dim();
    let len = crate::geom::dist(a, b);
    if len == 0.0 {
        return;
    }
    let mut ts = vec![0.0, 1.0];
    for axis in 0..n {
        let d = b[axis] - a[axis];
        if d == 0.0 {
            continue;
        }
        let h = g.side(axis);
        let ua = (a[axis] - g.lo[axis]) / h;
        let ub = (b[axis] - g.lo[axis]) / h;
        let (lo, hi) = if ua < ub { (ua, ub) } else { (ub, ua) };
        let mut k = lo.ceil();
        while k <= hi {
            let t = (g.lo[axis] + k * h - a[axis]) / d;
            if t > 0.0 && t < 1.0 {
                ts.push(t);
            }
            k += 1.0;
        }
    }
    ts.sort_by(f64::total_cmp);
    let mut mid = vec![0.0; n];
    let mut idx = vec![0usize; n];
    for w in ts.windows(2) {
        let dt = w[1] - w[0];
        if dt <= 1e-14 {
            continue;
        }
        let tm = 0.5 * (w[0] + w[1]);
        for axis in 0..n {
            mid[axis] = a[axis] + tm * (b[axis] - a[axis]);
            idx[axis] = g.axis_index(axis, mid[axis]);
        }
        out.push((g.flat(&idx), dt * len));
    }
}

pub(crate) fn merge(mut v: Vec<(usize, f64)>) -> Vec<(usize, f64)> {
    v.sort_by_key(|e| e.0);
    let mut out: Vec<(usize, f64)> = Vec::with_capacity(v.len());
    for (c, l) in v {
        match out.last_mut() {
            Some(last) if last.0 == c => last.1 += l,
            _ => out.push((c, l)),
        }
    }
    out.retain(|e| e.1 > 0.0);
    out
}

//! Independent reference solvers shared by the integration tests.
#![allow(dead_code)]

use minilp::{ComparisonOp, OptimizationDirection, Problem};
use nalgebra::DMatrix;

/// Sparse constraint row: `(cell, length of the curve in the cell)`.
pub type Row = Vec<(usize, f64)>;

/// p = 1 modulus as a dense LP: minimize `Σ vol ρ` subject to every row
/// having ρ-length at least 1.
pub fn lp_modulus_p1(rows: &[Row], vol: f64, ncells: usize) -> f64 {
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let vars: Vec<_> = (0..ncells).map(|_| lp.add_var(vol, (0.0, f64::INFINITY))).collect();
    for r in rows {
        let expr: Vec<_> = r.iter().map(|&(c, l)| (vars[c], l)).collect();
        lp.add_constraint(expr.as_slice(), ComparisonOp::Ge, 1.0);
    }
    lp.solve().expect("reference LP solves").objective()
}

/// p = 2 modulus by accelerated projected gradient on the dual quadratic
/// program `max_{λ >= 0} Σλ - Σ_c (Aᵀλ)_c² / (4 vol)`.
///
/// Returns `(lower, upper)`: the dual value and the energy of the scaled
/// primal density; both bracket the optimum.
pub fn qp_modulus_p2(rows: &[Row], vol: f64, ncells: usize, rel_tol: f64) -> (f64, f64) {
    let m = rows.len();
    let mut a = DMatrix::<f64>::zeros(m, ncells);
    for (i, r) in rows.iter().enumerate() {
        for &(c, l) in r {
            a[(i, c)] += l;
        }
    }
    let ata = a.transpose() * &a;
    let lmax = ata.symmetric_eigen().eigenvalues.max();
    let step = 2.0 * vol / lmax;
    let dual = |lam: &[f64]| -> (f64, Vec<f64>) {
        let s = a.transpose() * nalgebra::DVector::from_column_slice(lam);
        let rho: Vec<f64> = s.iter().map(|v| v / (2.0 * vol)).collect();
        let g = lam.iter().sum::<f64>() - s.iter().map(|v| v * v).sum::<f64>() / (4.0 * vol);
        (g, rho)
    };
    let upper_of = |rho: &[f64]| -> f64 {
        let r = nalgebra::DVector::from_column_slice(rho);
        let lens = &a * r;
        let min = lens.min();
        if min <= 0.0 {
            return f64::INFINITY;
        }
        rho.iter().map(|v| v * v * vol).sum::<f64>() / (min * min)
    };
    let mut lam = vec![0.0; m];
    let mut y = lam.clone();
    let mut t = 1.0f64;
    let mut best_lower = 0.0f64;
    let mut best_upper = f64::INFINITY;
    let mut prev = f64::NEG_INFINITY;
    for it in 0..2_000_000 {
        let (_, rho_y) = dual(&y);
        let r = nalgebra::DVector::from_column_slice(&rho_y);
        let lens = &a * r;
        let next: Vec<f64> = (0..m).map(|i| (y[i] + step * (1.0 - lens[i])).max(0.0)).collect();
        let (g, rho) = dual(&next);
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        if g < prev {
            // adaptive restart
            t = 1.0;
            y = next.clone();
        } else {
            let beta = (t - 1.0) / t_next;
            y = (0..m).map(|i| next[i] + beta * (next[i] - lam[i])).collect();
            t = t_next;
        }
        prev = g;
        lam = next;
        best_lower = best_lower.max(g);
        if it % 16 == 0 {
            best_upper = best_upper.min(upper_of(&rho));
            if best_upper - best_lower <= rel_tol * best_upper {
                break;
            }
        }
    }
    (best_lower, best_upper)
}

/// Cell classes for the path enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cell {
    Blocked,
    Domain,
    E,
    F,
}

/// Every simple path `E, D, ..., D, F` in the planar grid graph whose steps
/// are the primitive offsets of max-norm at most `radius`, as constraint
/// rows over the domain cells. A step contributes its length inside each
/// domain cell it crosses; crossing a blocked cell forbids the step.
/// `step_rows(u, v)` supplies that per-step incidence.
pub fn enumerate_paths(
    cells: (usize, usize),
    class: &[Cell],
    radius: isize,
    step_row: &dyn Fn(usize, usize) -> Option<Row>,
) -> Vec<Row> {
    let (nx, ny) = cells;
    let mut offsets = Vec::new();
    for dy in -radius..=radius {
        for dx in -radius..=radius {
            if gcd(dx.unsigned_abs(), dy.unsigned_abs()) == 1 {
                offsets.push((dx, dy));
            }
        }
    }
    let neighbours = |u: usize| -> Vec<usize> {
        let (x, y) = ((u % nx) as isize, (u / nx) as isize);
        offsets
            .iter()
            .filter_map(|&(dx, dy)| {
                let (a, b) = (x + dx, y + dy);
                (a >= 0 && b >= 0 && a < nx as isize && b < ny as isize).then(|| (b as usize) * nx + a as usize)
            })
            .collect()
    };
    let mut rows = Vec::new();
    let mut visited = vec![false; nx * ny];
    fn dfs(
        u: usize,
        acc: &mut Row,
        visited: &mut [bool],
        class: &[Cell],
        neighbours: &dyn Fn(usize) -> Vec<usize>,
        step_row: &dyn Fn(usize, usize) -> Option<Row>,
        rows: &mut Vec<Row>,
    ) {
        for v in neighbours(u) {
            if visited[v] || matches!(class[v], Cell::Blocked | Cell::E) {
                continue;
            }
            let Some(inc) = step_row(u, v) else { continue };
            let mark = acc.len();
            acc.extend(inc);
            if class[v] == Cell::F {
                rows.push(merge(acc.clone()));
            } else {
                visited[v] = true;
                dfs(v, acc, visited, class, neighbours, step_row, rows);
                visited[v] = false;
            }
            acc.truncate(mark);
        }
    }
    for s in 0..nx * ny {
        if class[s] == Cell::E {
            visited[s] = true;
            let mut acc = Vec::new();
            dfs(s, &mut acc, &mut visited, class, &neighbours, step_row, &mut rows);
            visited[s] = false;
        }
    }
    rows.sort_by(|a, b| a.partial_cmp(b).unwrap());
    rows.dedup();
    rows
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn merge(mut row: Row) -> Row {
    row.sort_by_key(|a| a.0);
    let mut out: Row = Vec::new();
    for (c, l) in row {
        match out.last_mut() {
            Some(last) if last.0 == c => last.1 += l,
            _ => out.push((c, l)),
        }
    }
    out
}

/// Relative difference.
pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

pub mod zoo {
    use modlab::geom::norm;
    use modlab::mapzoo::{MapFamily, MapKind};
    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Seeded image points `w` inside the image and the support of `Q`,
    /// away from the branch set.
    pub fn image_samples(map: &MapFamily, count: usize, seed: u64) -> Vec<Vec<f64>> {
        let n = map.dim;
        let support = map.q_weight().support_radius().unwrap_or(f64::INFINITY);
        let r = map.image_radius().min(2.0).min(support);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::new();
        while out.len() < count {
            let w: Vec<f64> = (0..n).map(|_| rng.random_range(-r..r)).collect();
            let t = norm(&w);
            if t > r || t < 1e-3 {
                continue;
            }
            if map.kind == MapKind::SpatialBranched && w[0].hypot(w[1]) < 1e-3 {
                continue;
            }
            out.push(w);
        }
        out
    }

    #[derive(Debug, Default)]
    pub struct Fidelity {
        pub roundtrip_max: f64,
        pub wrong_preimage_count: usize,
        pub k_i_excess_max: f64,
        pub glue_jump_max: f64,
    }

    pub fn check(map: &MapFamily, samples: usize, seed: u64) -> Fidelity {
        let q = map.q_weight();
        let mut f = Fidelity::default();
        for w in image_samples(map, samples, seed) {
            let pre = map.branch_inverses(&w).unwrap();
            let inside: Vec<_> = pre.points.iter().filter(|z| map.in_domain(z)).collect();
            if inside.len() != map.branch_count() {
                f.wrong_preimage_count += 1;
            }
            for z in inside {
                let back = map.evaluate(z).unwrap();
                let err = back.iter().zip(&w).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                f.roundtrip_max = f.roundtrip_max.max(err);
            }
            let k = map.k_i_sum(&w).unwrap();
            f.k_i_excess_max = f.k_i_excess_max.max(k - q.eval(&w));
        }
        if matches!(map.kind, MapKind::PlanarBranched | MapKind::SpatialBranched) {
            let g = map.glue_radius();
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x91e);
            for _ in 0..samples.min(200) {
                let dir: Vec<f64> = (0..map.dim).map(|_| rng.random_range(-1.0..1.0)).collect();
                let d = norm(&dir);
                if d < 1e-3 {
                    continue;
                }
                let at = |s: f64| -> Vec<f64> { dir.iter().map(|c| c * s / d).collect() };
                let a = map.evaluate(&at(g * (1.0 - 1e-13))).unwrap();
                let b = map.evaluate(&at(g * (1.0 + 1e-13))).unwrap();
                let jump = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
                f.glue_jump_max = f.glue_jump_max.max(jump);
            }
        }
        f
    }
}

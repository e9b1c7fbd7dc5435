//! Modulus of the family of all grid curves joining E to F in a domain.
//!
//! The family is realized by a path graph on cell centers: a node steps to
//! any cell whose offset is a primitive integer vector of max-norm at most
//! the stencil radius, and the weight of a step is the exact integral of
//! the density along the straight segment between the two centers. Radius
//! 1 gives the axis and diagonal neighbours; radius 2 adds the knight moves,
//! cutting the worst direction bias from about 8% to under 3%.
//!
//! Constraint generation alternates an inner solve over the active paths
//! with a multi-source Dijkstra search for paths that are still too short.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use super::dual::Row;
use super::inner::{certificate, Inner};
use super::{check_p, finish, DensityField, Grid, Mode, ModulusResult, SolverConfig};
use crate::curve::{merge_incidence, segment_incidence, ConnectingSpec, Domain};
use crate::error::{Error, Result};
use crate::geom::Region;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Class {
    Blocked,
    Domain,
    E,
    F,
}

struct Step {
    offset: Vec<isize>,
    end: isize,
    /// Flat offsets of the crossed cells with the segment length in each.
    touched: Vec<(isize, f64)>,
}

/// Path graph of a connecting family on a grid.
pub struct ConnectingGraph {
    grid: Grid,
    class: Vec<Class>,
    steps: Vec<Step>,
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn cell_region(g: &Grid, c: usize) -> Region {
    let (lo, hi) = g.cell_box(c);
    Region::Box { lo, hi }
}

/// Cells whose center lies in `r`; when there are none (a thin set or a
/// face of the grid box), the cells whose closed box meets `r`.
fn terminal_cells(r: &Region, g: &Grid) -> Vec<bool> {
    let by_center: Vec<bool> = (0..g.num_cells()).map(|c| r.contains(&g.center(c))).collect();
    if by_center.iter().any(|&b| b) {
        by_center
    } else {
        (0..g.num_cells()).map(|c| r.intersects(&cell_region(g, c))).collect()
    }
}

impl ConnectingGraph {
    pub fn new(spec: &ConnectingSpec, g: &Grid, radius: usize) -> Result<Self> {
        g.validate()?;
        let n = g.dim();
        spec.e.validate(n)?;
        spec.f.validate(n)?;
        if let Domain::Mask(m) = &spec.domain {
            if m.len() != g.num_cells() {
                return Err(Error::contract(format!(
                    "domain mask has {} entries for {} cells",
                    m.len(),
                    g.num_cells()
                )));
            }
        }
        if let Domain::Annulus(a) = &spec.domain {
            crate::geom::check_dim(n, a.dim())?;
        }
        let e_cells = terminal_cells(&spec.e, g);
        let f_cells = terminal_cells(&spec.f, g);
        let mut class = Vec::with_capacity(g.num_cells());
        for c in 0..g.num_cells() {
            class.push(match (e_cells[c], f_cells[c]) {
                (true, true) => {
                    return Err(Error::contract(
                        "a grid cell meets both E and F: zero-length connecting path at this resolution",
                    ))
                }
                (true, false) => Class::E,
                (false, true) => Class::F,
                _ => {
                    let inside = match &spec.domain {
                        Domain::Mask(m) => m[c],
                        d => d.contains(&g.center(c)).unwrap_or(false),
                    };
                    if inside {
                        Class::Domain
                    } else {
                        Class::Blocked
                    }
                }
            });
        }
        let mut strides = vec![1isize; n];
        for a in 1..n {
            strides[a] = strides[a - 1] * g.cells[a - 1] as isize;
        }
        Ok(ConnectingGraph {
            steps: stencil(g, radius, &strides),
            grid: g.clone(),
            class,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn num_steps(&self) -> usize {
        self.steps.len()
    }

    fn search(&self, rho: &[f64]) -> Search {
        let ncell = self.grid.num_cells();
        let mut dist = vec![f64::INFINITY; ncell];
        let mut pred = vec![(u32::MAX, u16::MAX); ncell];
        let mut heap = BinaryHeap::new();
        for c in 0..ncell {
            if self.class[c] == Class::E {
                dist[c] = 0.0;
                heap.push(Reverse(Entry(0.0, c as u32)));
            }
        }
        let n = self.grid.dim();
        let mut idx = vec![0isize; n];
        while let Some(Reverse(Entry(d, u))) = heap.pop() {
            let u = u as usize;
            if d > dist[u] || self.class[u] == Class::F {
                continue;
            }
            let mut rest = u;
            for a in 0..n {
                idx[a] = (rest % self.grid.cells[a]) as isize;
                rest /= self.grid.cells[a];
            }
            'steps: for (si, s) in self.steps.iter().enumerate() {
                for a in 0..n {
                    let k = idx[a] + s.offset[a];
                    if k < 0 || k >= self.grid.cells[a] as isize {
                        continue 'steps;
                    }
                }
                let v = (u as isize + s.end) as usize;
                let mut w = 0.0;
                for &(t, len) in &s.touched {
                    let t = (u as isize + t) as usize;
                    match self.class[t] {
                        Class::Blocked => continue 'steps,
                        Class::Domain => w += rho[t] * len,
                        _ => {}
                    }
                }
                let nd = d + w;
                if nd < dist[v] {
                    dist[v] = nd;
                    pred[v] = (u as u32, si as u16);
                    heap.push(Reverse(Entry(nd, v as u32)));
                }
            }
        }
        Search { dist, pred }
    }

    fn path_row(&self, s: &Search, target: usize) -> Row {
        let mut inc = Vec::new();
        let mut v = target;
        while s.pred[v].0 != u32::MAX {
            let (u, si) = s.pred[v];
            for &(t, len) in &self.steps[si as usize].touched {
                let t = (u as isize + t) as usize;
                if self.class[t] == Class::Domain {
                    inc.push((t, len));
                }
            }
            v = u as usize;
        }
        Row::from_incidence(&merge_incidence(inc))
    }

    /// F cells reached by the search, shortest first.
    fn targets(&self, s: &Search) -> Vec<usize> {
        let mut t: Vec<usize> = (0..self.grid.num_cells())
            .filter(|&c| self.class[c] == Class::F && s.dist[c].is_finite())
            .collect();
        t.sort_by(|&a, &b| s.dist[a].total_cmp(&s.dist[b]).then(a.cmp(&b)));
        t
    }

    /// Shortest ρ-length over all graph paths from E to F, `None` if F is
    /// unreachable.
    pub fn shortest(&self, rho: &DensityField) -> Result<Option<f64>> {
        if rho.grid != self.grid {
            return Err(Error::contract("density lives on a different grid"));
        }
        let s = self.search(&rho.values);
        Ok(self.targets(&s).first().map(|&t| s.dist[t]))
    }
}

struct Search {
    dist: Vec<f64>,
    pred: Vec<(u32, u16)>,
}

#[derive(PartialEq)]
struct Entry(f64, u32);

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0).then(self.1.cmp(&other.1))
    }
}

/// Primitive steps of max-norm at most `radius`, with their cell crossings.
fn stencil(g: &Grid, radius: usize, strides: &[isize]) -> Vec<Step> {
    let n = g.dim();
    let r = radius as isize;
    let width = 2 * radius + 1;
    let local = Grid::new(
        vec![0.0; n],
        g.sides().iter().map(|s| s * width as f64).collect::<Vec<_>>(),
        vec![width; n],
    )
    .expect("stencil grid is valid");
    let mid = local.center(local.flat(&vec![radius; n]));
    let mut steps = Vec::new();
    let total = width.pow(n as u32);
    for k in 0..total {
        let idx = local.unflat(k);
        let offset: Vec<isize> = idx.iter().map(|&i| i as isize - r).collect();
        let g0 = offset.iter().fold(0usize, |acc, &o| gcd(acc, o.unsigned_abs()));
        if g0 != 1 {
            continue;
        }
        let end_pt = local.center(k);
        let mut inc = Vec::new();
        segment_incidence(&local, &mid, &end_pt, &mut inc);
        let touched = merge_incidence(inc)
            .into_iter()
            .filter(|&(_, len)| len > 1e-12 * g.min_side())
            .map(|(c, len)| {
                let ci = local.unflat(c);
                let flat: isize = (0..n).map(|a| (ci[a] as isize - r) * strides[a]).sum();
                (flat, len)
            })
            .collect();
        let end = (0..n).map(|a| offset[a] * strides[a]).sum();
        steps.push(Step { offset, end, touched });
    }
    steps
}

/// Modulus of the connecting family with default tolerances.
pub fn modulus_connecting(spec: &ConnectingSpec, g: &Grid, p: f64) -> Result<ModulusResult> {
    modulus_connecting_with(spec, g, p, &SolverConfig::default())
}

/// Shortest ρ-length of a grid path joining E to F in the domain.
pub fn shortest_connecting_length(spec: &ConnectingSpec, rho: &DensityField, stencil_radius: usize) -> Result<Option<f64>> {
    ConnectingGraph::new(spec, &rho.grid, stencil_radius)?.shortest(rho)
}

pub fn modulus_connecting_with(spec: &ConnectingSpec, g: &Grid, p: f64, cfg: &SolverConfig) -> Result<ModulusResult> {
    check_p(p)?;
    cfg.validate()?;
    let graph = ConnectingGraph::new(spec, g, cfg.stencil_radius)?;
    let vol = g.cell_volume();
    let ncell = g.num_cells();

    // geometric search: reachability and the first batch of paths
    let ones: Vec<f64> = vec![1.0; ncell];
    let first = graph.search(&ones);
    let targets = graph.targets(&first);
    let Some(&closest) = targets.first() else {
        return ModulusResult::empty(g, p, Mode::Connecting, true);
    };
    if graph.path_row(&first, closest).cells.is_empty() {
        return Err(Error::contract(
            "E and F are joined without crossing the domain: zero-length connecting path",
        ));
    }

    let mut inner = Inner::new(p, vol, ncell, cfg.relaxation);
    let mut stamp = vec![0u32; ncell];
    let mut round = 1u32;
    add_paths(&graph, &first, &targets, cfg.paths_per_round, &mut inner, &mut stamp, round);

    // paths are added below a threshold tight enough that the remaining
    // shortfall cannot by itself exceed the gap tolerance
    let add_below = 1.0 - cfg.slack.min(cfg.gap_tol / (4.0 * p));
    let mut used = 0u64;
    let mut floor_tol = cfg.gap_tol / 2.0;
    let mut shortfall = 1.0f64;
    loop {
        // early rounds miss many paths, so a rough inner solve suffices
        let inner_tol = (0.5 * shortfall).clamp(floor_tol, 0.05);
        let budget = cfg.max_iterations.saturating_sub(used).max(1);
        let (it, _) = inner.solve(p, vol, inner_tol, budget)?;
        used += it;
        let rho = inner.density();
        let s = graph.search(&rho);
        let targets = graph.targets(&s);
        let d_min = s.dist[targets[0]];
        let check = certificate(&rho, p, vol, d_min, inner.lower_bound());
        let feasible = d_min >= 1.0 - cfg.slack;
        shortfall = (1.0 - d_min).max(0.0);
        if (feasible && check.gap <= cfg.gap_tol) || used >= cfg.max_iterations {
            return finish(g, p, Mode::Connecting, &inner, used, d_min, cfg);
        }
        let violated: Vec<usize> = targets
            .iter()
            .copied()
            .take_while(|&t| s.dist[t] < add_below)
            .collect();
        if violated.is_empty() {
            if floor_tol < 1e-12 {
                return finish(g, p, Mode::Connecting, &inner, used, d_min, cfg);
            }
            floor_tol /= 4.0;
        } else {
            round += 1;
            add_paths(&graph, &s, &violated, cfg.paths_per_round, &mut inner, &mut stamp, round);
        }
    }
}

/// Adds up to `cap` paths, skipping any that mostly reuse cells already
/// taken this round. The first candidate is always added.
fn add_paths(
    graph: &ConnectingGraph,
    s: &Search,
    targets: &[usize],
    cap: usize,
    inner: &mut Inner,
    stamp: &mut [u32],
    round: u32,
) {
    let mut added = 0;
    for &t in targets {
        if added >= cap {
            break;
        }
        let row = graph.path_row(s, t);
        if row.cells.is_empty() {
            continue;
        }
        let reused = row.cells.iter().filter(|&&c| stamp[c as usize] == round).count();
        if added > 0 && 2 * reused >= row.cells.len() {
            continue;
        }
        for &c in &row.cells {
            stamp[c as usize] = round;
        }
        inner.add_row(row);
        added += 1;
    }
}

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{chordal_finite, dist, norm, sphere_directions};
use crate::mapzoo::MapFamily;

/// Relative growth of `S` between consecutive family members still read
/// as bounded.
pub const FLUCTUATION_TOL: f64 = 0.10;

/// Largest max/min ratio of the running constant `Ĉ` read as stable.
pub const C_HAT_STABILITY: f64 = 2.0;

/// Log-log growth rate of `S` in `m` above which the scan reports divergence.
pub const DIVERGENCE_SLOPE: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Euclidean,
    Chordal,
}

/// Direction counts: 64 in the plane, 128 in space.
pub fn default_directions(n: usize) -> usize {
    if n == 2 {
        64
    } else {
        128
    }
}

/// `r0, r0/2, ..., r0/2^(count-1)`.
pub fn default_radii(r0: f64, count: usize) -> Vec<f64> {
    (0..count).map(|k| r0 * 0.5f64.powi(k as i32)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub m: u32,
    pub map: String,
    /// Modulus of continuity at each sample radius.
    pub omega: Vec<f64>,
    /// `max_i omega_i · log^(1/n)(1 + r0 / radius_i)`.
    pub s: f64,
    /// `‖Q‖_1`, absent when `Q` is not integrable.
    pub q_norm: Option<f64>,
    pub c_hat: Option<f64>,
    /// Supremum of `c_hat` over this and all smaller `m`.
    pub c_hat_running: Option<f64>,
    /// Sample points outside the map's domain.
    pub skipped: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanVerdict {
    pub q_integrable: bool,
    /// `S_m` finite and never growing by more than the fluctuation tolerance.
    pub bounded: bool,
    /// max/min of the running `Ĉ`.
    pub c_hat_ratio: Option<f64>,
    pub c_hat_stable: bool,
    /// Least-squares slope of `log S_m` against `log m`.
    pub growth_exponent: Option<f64>,
    pub divergent_in_m: bool,
    /// Every row's modulus of continuity shrinks with the radius.
    pub monotone_in_radius: bool,
    /// `max_m max_i omega_i / radius_i`.
    pub lipschitz_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquicontinuityReport {
    pub family: String,
    pub metric: Metric,
    pub centers: Vec<Vec<f64>>,
    pub r0: f64,
    pub radii: Vec<f64>,
    pub directions: usize,
    pub rows: Vec<ScanRow>,
    /// Supremum of the statistic over the whole family.
    pub s: f64,
    pub verdict: ScanVerdict,
}

impl EquicontinuityReport {
    /// `S` recomputed from the stored table.
    pub fn recompute_s(&self) -> f64 {
        let n = self.centers.first().map_or(2, Vec::len);
        self.rows
            .iter()
            .map(|row| statistic(&row.omega, &self.radii, self.r0, n))
            .fold(0.0, f64::max)
    }
}

fn statistic(omega: &[f64], radii: &[f64], r0: f64, n: usize) -> f64 {
    omega
        .iter()
        .zip(radii)
        .map(|(&w, &r)| if w == 0.0 { 0.0 } else { w * (r0 / r).ln_1p().powf(1.0 / n as f64) })
        .fold(0.0, f64::max)
}

fn check_family(family: &[MapFamily]) -> Result<usize> {
    let Some(first) = family.first() else {
        return Err(Error::contract("scan needs at least one map"));
    };
    for f in family {
        f.validate()?;
        crate::geom::check_dim(first.dim, f.dim)?;
    }
    Ok(first.dim)
}

fn check_radii(radii: &[f64]) -> Result<()> {
    if radii.is_empty() || radii.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
        return Err(Error::contract("radii must be a nonempty list of finite values >= 0"));
    }
    Ok(())
}

/// Modulus of continuity of one map around several centres: per radius,
/// the largest displacement over centres and sample directions.
fn omega_table(map: &MapFamily, centers: &[Vec<f64>], radii: &[f64], dirs: &[Vec<f64>], metric: Metric) -> Result<(Vec<f64>, usize)> {
    let images: Vec<Vec<f64>> = centers.iter().map(|c| map.evaluate(c)).collect::<Result<_>>()?;
    let per_radius: Vec<(f64, usize)> = radii
        .par_iter()
        .map(|&r| {
            let mut worst = 0.0f64;
            let mut skipped = 0;
            if r == 0.0 {
                return (0.0, 0);
            }
            for (c, fc) in centers.iter().zip(&images) {
                for u in dirs {
                    let x: Vec<f64> = c.iter().zip(u).map(|(a, b)| a + r * b).collect();
                    if !map.in_domain(&x) {
                        skipped += 1;
                        continue;
                    }
                    let fx = map.evaluate(&x).expect("point checked to lie in the domain");
                    let d = match metric {
                        Metric::Euclidean => dist(&fx, fc),
                        Metric::Chordal => chordal_finite(&fx, fc),
                    };
                    worst = worst.max(d);
                }
            }
            (worst, skipped)
        })
        .collect();
    Ok((
        per_radius.iter().map(|p| p.0).collect(),
        per_radius.iter().map(|p| p.1).sum(),
    ))
}

fn scan(
    family: &[MapFamily],
    centers: Vec<Vec<f64>>,
    r0: f64,
    radii: &[f64],
    directions: usize,
    metric: Metric,
) -> Result<EquicontinuityReport> {
    let n = family[0].dim;
    let dirs = sphere_directions(n, directions);
    let mut rows = Vec::with_capacity(family.len());
    let mut running: Option<f64> = None;
    for map in family {
        let (omega, skipped) = omega_table(map, &centers, radii, &dirs, metric)?;
        let s = statistic(&omega, radii, r0, n);
        let q_norm = map.q_weight().norm(1.0).ok();
        let c_hat = q_norm.map(|qn| s / qn.powf(1.0 / n as f64));
        if let Some(c) = c_hat {
            running = Some(running.map_or(c, |r: f64| r.max(c)));
        }
        rows.push(ScanRow {
            m: map.m,
            map: map.id(),
            omega,
            s,
            q_norm,
            c_hat,
            c_hat_running: c_hat.and(running),
            skipped,
        });
    }
    let s = rows.iter().map(|r| r.s).fold(0.0, f64::max);
    let verdict = judge(&rows, radii);
    Ok(EquicontinuityReport {
        family: family[0].kind.name().to_string(),
        metric,
        centers,
        r0,
        radii: radii.to_vec(),
        directions,
        rows,
        s,
        verdict,
    })
}

fn judge(rows: &[ScanRow], radii: &[f64]) -> ScanVerdict {
    let q_integrable = rows.iter().all(|r| r.q_norm.is_some());
    let finite = rows.iter().all(|r| r.s.is_finite());
    let bounded = finite
        && rows
            .windows(2)
            .all(|w| w[1].s <= (1.0 + FLUCTUATION_TOL) * w[0].s);
    let running: Vec<f64> = rows.iter().filter_map(|r| r.c_hat_running).collect();
    let c_hat_ratio = if q_integrable && !running.is_empty() {
        let max = running.iter().copied().fold(0.0, f64::max);
        let min = running.iter().copied().fold(f64::INFINITY, f64::min);
        Some(if min > 0.0 { max / min } else { f64::INFINITY })
    } else {
        None
    };
    let growth_exponent = slope(rows);
    let mut order: Vec<usize> = (0..radii.len()).collect();
    order.sort_by(|&a, &b| radii[a].total_cmp(&radii[b]));
    let monotone_in_radius = rows
        .iter()
        .all(|r| order.windows(2).all(|w| r.omega[w[0]] <= r.omega[w[1]] * (1.0 + 1e-12)));
    let lipschitz_max = rows
        .iter()
        .flat_map(|r| r.omega.iter().zip(radii).filter(|p| *p.1 > 0.0).map(|(w, rad)| w / rad))
        .fold(0.0, f64::max);
    ScanVerdict {
        q_integrable,
        bounded,
        c_hat_ratio,
        c_hat_stable: c_hat_ratio.is_some_and(|r| r <= C_HAT_STABILITY),
        growth_exponent,
        divergent_in_m: growth_exponent.is_some_and(|g| g >= DIVERGENCE_SLOPE),
        monotone_in_radius,
        lipschitz_max,
    }
}

/// Least-squares slope of `log S` against `log m`; needs two distinct `m`.
fn slope(rows: &[ScanRow]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.s > 0.0 && r.s.is_finite())
        .map(|r| ((r.m as f64).ln(), r.s.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / sxx)
}

/// Modulus of continuity of each family member around `x0`, with the
/// logarithmic statistic `S` and the fitted constant `Ĉ = S / ‖Q‖_1^(1/n)`.
pub fn equicontinuity_scan(
    family: &[MapFamily],
    x0: &[f64],
    r0: f64,
    radii: &[f64],
    directions: usize,
) -> Result<EquicontinuityReport> {
    let n = check_family(family)?;
    crate::geom::check_dim(n, x0.len())?;
    check_radii(radii)?;
    if !(r0 > 0.0) || directions == 0 {
        return Err(Error::contract("scan needs r0 > 0 and at least one direction"));
    }
    for f in family {
        if norm(x0) + 2.0 * r0 > f.domain_radius() {
            return Err(Error::contract(format!(
                "B(x0, 2 r0) leaves the domain of {}",
                f.id()
            )));
        }
    }
    scan(family, vec![x0.to_vec()], r0, radii, directions, Metric::Euclidean)
}

/// The same statistic centred at boundary points and measured in the
/// chordal metric; sample points outside the closed domain are skipped.
pub fn closure_scan(
    family: &[MapFamily],
    boundary: &[Vec<f64>],
    r0: f64,
    radii: &[f64],
    directions: usize,
) -> Result<EquicontinuityReport> {
    let n = check_family(family)?;
    check_radii(radii)?;
    if boundary.is_empty() || !(r0 > 0.0) || directions == 0 {
        return Err(Error::contract("closure scan needs boundary points, r0 > 0 and directions"));
    }
    for b in boundary {
        crate::geom::check_dim(n, b.len())?;
    }
    scan(family, boundary.to_vec(), r0, radii, directions, Metric::Chordal)
}

//! Modulus of the curves crossing the ring 1 < |x| < 2 in the plane.
//!
//! Exact value 2π / log 2 ≈ 9.0647. Usage: `ring_modulus [cells-per-axis]`.

use std::f64::consts::PI;
use std::time::Instant;

use modlab::curve::{connecting_family_spec, Domain};
use modlab::geom::Region;
use modlab::modsolve::{modulus_connecting, Grid};

fn main() -> modlab::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(128);
    let grid = Grid::centered_cube(2, 2.0, n)?;
    let e = Region::Ball {
        center: vec![0.0, 0.0],
        radius: 1.0,
    };
    let f = Region::Exterior {
        center: vec![0.0, 0.0],
        radius: 2.0,
    };
    let spec = connecting_family_spec(e, f, Domain::Whole)?;
    let t = Instant::now();
    let r = modulus_connecting(&spec, &grid, 2.0)?;
    let exact = 2.0 * PI / 2f64.ln();
    println!("grid          {n} x {n}");
    println!("modulus       {:.5}", r.value);
    println!("exact         {exact:.5}");
    println!("rel. error    {:+.3}%", 100.0 * (r.value / exact - 1.0));
    println!("gap           {:.2e} (certified: {})", r.gap, r.certified);
    println!("paths         {} ({} active)", r.constraints, r.active_constraints);
    println!("sweeps        {}", r.iterations);
    println!("time          {:.2?}", t.elapsed());
    Ok(())
}

//! Modulus of the curves joining the short sides of the rectangle [0,2]×[0,1].
//!
//! For p = 2 the extremal density is the constant 1/2 and the modulus is 1/2.
//! Usage: `rectangle_modulus [p]`.

use modlab::curve::{connecting_family_spec, Domain};
use modlab::geom::Region;
use modlab::modsolve::{modulus_connecting, shortest_connecting_length, Grid};

fn main() -> modlab::Result<()> {
    let p: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2.0);
    let grid = Grid::new(vec![0.0, 0.0], vec![2.0, 1.0], vec![256, 128])?;
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
    let spec = connecting_family_spec(left, right, Domain::Whole)?;
    let r = modulus_connecting(&spec, &grid, p)?;
    // the crossing family of a 2 x 1 rectangle has p-modulus 2^(1-p)
    let exact = 2f64.powf(1.0 - p);
    println!("p             {p}");
    println!("modulus       {:.6}", r.value);
    println!("exact         {exact:.6}");
    println!("rel. error    {:+.3}%", 100.0 * (r.value / exact - 1.0));
    println!("gap           {:.2e} (certified: {})", r.gap, r.certified);
    let shortest = shortest_connecting_length(&spec, &r.density, 2)?.unwrap_or(f64::INFINITY);
    println!("shortest path {shortest:.6}");
    Ok(())
}

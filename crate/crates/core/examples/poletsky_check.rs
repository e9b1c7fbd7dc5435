//! Inverse Poletsky check for the planar branched family.
//!
//! For each `m` and `α` the image shell is crossed by radial segments, the
//! segments are lifted through both branches, and the modulus of the lifted
//! family is compared with `∫ Q η² dm` for the step and `1/t` profiles.

use std::time::Instant;

use modlab::geom::ExtPoint;
use modlab::mapzoo::MapFamily;
use modlab::verify::{verify_poletsky, PoletskySampling};

fn main() -> modlab::Result<()> {
    let sampling = PoletskySampling::default();
    let y0 = ExtPoint::origin(2);
    println!("{:<40} {:>11} {:>9} {:>9} {:>9}  verdict", "map", "shell", "lhs", "rhs step", "rhs 1/t");
    let t = Instant::now();
    for alpha in [0.25, 0.5] {
        for m in [1, 2, 4, 8] {
            let map = MapFamily::planar(m, alpha, 3.0)?;
            for (r1, r2) in [(0.3, 0.6), (0.1, 0.8)] {
                let r = verify_poletsky(&map, &map.q_weight(), &y0, r1, r2, &sampling)?;
                println!(
                    "{:<40} {:>11} {:>9.3} {:>9.3} {:>9.3}  {}",
                    r.map,
                    format!("({r1}, {r2})"),
                    r.lhs,
                    r.rhs[0].value,
                    r.rhs[1].value,
                    if r.pass { "pass" } else { "FAIL" }
                );
            }
        }
    }
    println!("total time {:.2?}", t.elapsed());
    Ok(())
}

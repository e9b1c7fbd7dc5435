//! Chordal modulus of continuity at boundary points |x| = 2 for the planar
//! and spatial branched families.

use modlab::cli::boundary_points;
use modlab::mapzoo::MapFamily;
use modlab::verify::{closure_scan, default_directions, default_radii};

fn main() -> modlab::Result<()> {
    let radii = default_radii(0.4, 8);
    let ms = [1u32, 2, 4, 8, 16];
    let families = [
        ms.iter().map(|&m| MapFamily::planar(m, 0.5, 3.0)).collect::<Result<Vec<_>, _>>()?,
        ms.iter().map(|&m| MapFamily::spatial(m, 0.25, 3, 3.0)).collect::<Result<Vec<_>, _>>()?,
    ];
    for fam in &families {
        let n = fam[0].dim;
        let r = closure_scan(fam, &boundary_points(n, 2.0, 8), 0.4, &radii, default_directions(n))?;
        println!("{}", r.family);
        print!("{:>6}", "m \\ r");
        for x in &radii {
            print!(" {x:>9.4}");
        }
        println!();
        for row in &r.rows {
            print!("{:>6}", row.m);
            for w in &row.omega {
                print!(" {w:>9.5}");
            }
            println!();
        }
        println!("non-increasing as r -> 0: {}\n", r.verdict.monotone_in_radius);
    }
    Ok(())
}

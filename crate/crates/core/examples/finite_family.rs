//! Modulus of an explicit curve family read from the text format.
//!
//! Sixteen radial segments cross the annulus 1 < |x| < 2. The family is
//! written out, parsed back and solved for p = 1, 2 and 3; the returned
//! density is checked against every curve.

use modlab::curve::{parse_family, radial_family, write_family};
use modlab::geom::Annulus;
use modlab::modsolve::{curve_length_under_density, energy, modulus_finite, Grid};

fn main() -> modlab::Result<()> {
    let ring = Annulus::new(vec![0.0, 0.0], 1.0, 2.0)?;
    let text = write_family(&radial_family(&ring, 16, 0.05)?);
    let fam = parse_family(&text)?;
    println!("{} curves, {} bytes of text", fam.len(), text.len());

    let grid = Grid::centered_cube(2, 2.0, 64)?;
    for p in [1.0, 2.0, 3.0] {
        let r = modulus_finite(&fam, &grid, p)?;
        let shortest = fam
            .curves
            .iter()
            .map(|c| curve_length_under_density(c, &r.density))
            .collect::<modlab::Result<Vec<_>>>()?
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        println!(
            "p = {p}: modulus {:.6}  dual bound {:.6}  gap {:.1e}  energy {:.6}  shortest ρ-length {:.6}",
            r.value,
            r.lower_bound,
            r.gap,
            energy(&r.density, p)?,
            shortest
        );
    }
    Ok(())
}

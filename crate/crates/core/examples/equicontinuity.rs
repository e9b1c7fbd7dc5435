//! Interior equicontinuity scan of the planar branched family for
//! m = 1..16, against the scaling family x ↦ m x and its inverse.

use modlab::mapzoo::MapFamily;
use modlab::verify::{default_radii, equicontinuity_scan};

fn main() -> modlab::Result<()> {
    let ms: Vec<u32> = (1..=16).collect();
    let radii = default_radii(0.4, 8);
    let planar: Vec<_> = ms.iter().map(|&m| MapFamily::planar(m, 0.5, 3.0)).collect::<Result<_, _>>()?;
    let r = equicontinuity_scan(&planar, &[0.0, 0.0], 0.4, &radii, 64)?;
    println!("{:>3} {:>12} {:>10} {:>10}", "m", "S_m", "Ĉ_m", "sup Ĉ");
    for row in &r.rows {
        println!(
            "{:>3} {:>12.4e} {:>10.4} {:>10.4}",
            row.m,
            row.s,
            row.c_hat.unwrap_or(f64::NAN),
            row.c_hat_running.unwrap_or(f64::NAN)
        );
    }
    println!("verdict {:?}", r.verdict);

    for (label, fam) in [
        ("scaling", ms.iter().map(|&m| MapFamily::scaling(m, 2)).collect::<Result<Vec<_>, _>>()?),
        ("inverse", ms.iter().map(|&m| MapFamily::inverse_scaling(m, 2)).collect::<Result<Vec<_>, _>>()?),
    ] {
        let c = equicontinuity_scan(&fam, &[0.0, 0.0], 0.4, &radii, 64)?;
        let omega: Vec<String> = c.rows.iter().step_by(5).map(|row| format!("{:.3}", row.omega[0])).collect();
        println!(
            "{label}: ω(r0) at m = 1, 6, 11, 16: {}  slope {:.3}  Lipschitz max {:.3}",
            omega.join(", "),
            c.verdict.growth_exponent.unwrap_or(f64::NAN),
            c.verdict.lipschitz_max
        );
    }
    Ok(())
}

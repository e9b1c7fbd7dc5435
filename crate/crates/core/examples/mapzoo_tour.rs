//! A walk through the mapping zoo: one point per map, its image and
//! preimages, the outer dilatation in closed form and by finite
//! differences, and the weight `Q` with its L^1 norm.

use modlab::mapzoo::{MapFamily, QWeight};

fn show(map: &MapFamily, x: &[f64]) -> modlab::Result<()> {
    let y = map.evaluate(x)?;
    let pre = map.branch_inverses(&y)?;
    let back = pre
        .points
        .iter()
        .map(|z| z.iter().zip(x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
        .fold(f64::INFINITY, f64::min);
    let q = map.q_weight();
    println!("{}", map.id());
    println!("  x = {x:?}\n  f(x) = {y:.6?}");
    println!("  preimages {}  round trip {back:.1e}", pre.points.len());
    println!("  K_O closed {:.8}  numeric {:.8}", map.k_o(x)?, map.k_o_numeric(x, 1e-6)?);
    println!("  K_I sum {:.6}  Q(f(x)) {:.6}", map.k_i_sum(&y)?, q.eval(&y));
    norms(&q);
    Ok(())
}

fn norms(q: &QWeight) {
    match (q.integral_pow(1.0), q.integral_pow_quadrature(1.0, 1e-10)) {
        (Ok(a), Ok(b)) => println!("  ‖Q‖_1 closed {a:.6}  quadrature {b:.6}"),
        (Err(e), _) | (_, Err(e)) => println!("  ‖Q‖_1: {e}"),
    }
}

fn main() -> modlab::Result<()> {
    show(&MapFamily::scaling(3, 2)?, &[0.2, 0.1])?;
    show(&MapFamily::inverse_scaling(3, 2)?, &[1.5, -0.4])?;
    show(&MapFamily::planar(2, 0.5, 3.0)?, &[1.2, 0.9])?;
    show(&MapFamily::spatial(2, 0.25, 3, 3.0)?, &[1.1, 0.7, 0.6])?;
    // integrability is lost once α reaches n
    let q = MapFamily::planar(2, 0.5, 3.0)?.q_weight();
    println!("‖Q‖_4: {:?}", q.integral_pow(4.0).err().map(|e| e.to_string()));
    Ok(())
}

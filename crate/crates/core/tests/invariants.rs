//! Property tests for the geometry, curve, mapping and verification layers.

use std::f64::consts::PI;

use modlab::curve::{curve_cell_incidence, lift_family, radial_family, CurveFamily, Polyline};
use modlab::geom::{chordal_distance, dist, norm, Annulus, ExtPoint};
use modlab::mapzoo::MapFamily;
use modlab::modsolve::{modulus_finite, Grid};
use modlab::verify::{default_radii, equicontinuity_scan, rhs_integral, EtaKind, EtaProfile};
use proptest::prelude::*;

fn pt(n: usize, r: f64) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-r..r, n)
}

fn ext(x: &[f64]) -> ExtPoint {
    ExtPoint::finite(x.to_vec()).unwrap()
}

fn rotate(x: &[f64], t: f64) -> Vec<f64> {
    let (s, c) = t.sin_cos();
    let mut y = x.to_vec();
    y[0] = c * x[0] - s * x[1];
    y[1] = s * x[0] + c * x[1];
    y
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn chordal_metric_axioms(n in 2usize..4, a in pt(3, 50.0), b in pt(3, 50.0), c in pt(3, 50.0)) {
        let (a, b, c) = (ext(&a[..n]), ext(&b[..n]), ext(&c[..n]));
        let ab = chordal_distance(&a, &b).unwrap();
        prop_assert_eq!(ab, chordal_distance(&b, &a).unwrap());
        prop_assert_eq!(chordal_distance(&a, &a).unwrap(), 0.0);
        prop_assert!(ab > 0.0 || a == b);
        prop_assert!(ab <= 1.0 + 1e-15);
        let ac = chordal_distance(&a, &c).unwrap();
        let cb = chordal_distance(&c, &b).unwrap();
        prop_assert!(ab <= ac + cb + 1e-12);
        let inf = ExtPoint::Infinity;
        let ai = chordal_distance(&a, &inf).unwrap();
        prop_assert!(ab <= ai + chordal_distance(&inf, &b).unwrap() + 1e-12);
    }

    #[test]
    fn chordal_distance_is_rotation_invariant(a in pt(3, 10.0), b in pt(3, 10.0), t in 0.0..2.0 * PI) {
        let d0 = chordal_distance(&ext(&a), &ext(&b)).unwrap();
        let d1 = chordal_distance(&ext(&rotate(&a, t)), &ext(&rotate(&b, t))).unwrap();
        prop_assert!((d0 - d1).abs() <= 1e-12);
    }

    #[test]
    fn chordal_and_euclidean_are_bilipschitz_on_balls(big_r in 0.1f64..10.0, a in pt(2, 1.0), b in pt(2, 1.0)) {
        let s = |x: &[f64]| -> Vec<f64> {
            let k = big_r / norm(x).max(1.0);
            x.iter().map(|c| c * k).collect()
        };
        let (a, b) = (s(&a), s(&b));
        let e = dist(&a, &b);
        let h = chordal_distance(&ext(&a), &ext(&b)).unwrap();
        prop_assert!(e / (1.0 + big_r * big_r) <= h * (1.0 + 1e-12) && h <= e * (1.0 + 1e-12));
    }

    #[test]
    fn incidence_conserves_length_under_resampling(
        verts in prop::collection::vec(pt(2, 0.99), 2..6),
        refine in 1usize..6,
    ) {
        prop_assume!(verts.windows(2).all(|w| dist(&w[0], &w[1]) > 1e-6));
        let g = Grid::centered_cube(2, 1.0, 12).unwrap();
        let c = Polyline::new(verts).unwrap();
        let fine = c.resample(c.step() / refine as f64).unwrap();
        let total = |p: &Polyline| curve_cell_incidence(p, &g).unwrap().iter().map(|x| x.1).sum::<f64>();
        prop_assert!((total(&c) - c.length()).abs() <= 1e-12 * c.length().max(1.0) * 8.0);
        prop_assert!((total(&fine) - total(&c)).abs() <= 1e-12 * c.length().max(1.0) * 8.0);
    }

    #[test]
    fn radial_family_lengths_are_the_shell_width(r1 in 0.05f64..1.0, w in 0.05f64..1.0, count in 1usize..40) {
        let a = Annulus::new(vec![0.3, -0.2], r1, r1 + w).unwrap();
        let fam = radial_family(&a, count, 0.05).unwrap();
        prop_assert_eq!(fam.len(), count);
        for c in &fam.curves {
            prop_assert!((c.length() - w).abs() < 1e-12);
        }
    }

    #[test]
    fn lifted_curves_map_back_onto_their_images(m in 1u32..9, alpha in 0.1f64..0.65, t0 in 0.0..2.0 * PI) {
        let map = MapFamily::planar(m, alpha, 3.0).unwrap();
        let a = Annulus::new(vec![0.0, 0.0], 0.2, 0.7).unwrap();
        let image = radial_family(&a, 3, 0.02).unwrap();
        let rotated = CurveFamily::new(
            image.curves.iter().map(|c| Polyline::new(c.vertices().iter().map(|v| rotate(v, t0)).collect()).unwrap()).collect(),
            "rotated radial",
        ).unwrap();
        let lifted = lift_family(&rotated, &map).unwrap();
        prop_assert_eq!(lifted.len(), 6);
        for (k, c) in lifted.curves.iter().enumerate() {
            let src = &rotated.curves[k / 2];
            // each lifted vertex maps onto the image segment
            let (p0, p1) = (src.first(), src.last());
            for z in c.vertices() {
                let w = map.evaluate(z).unwrap();
                let along = (w[0] - p0[0]) * (p1[0] - p0[0]) + (w[1] - p0[1]) * (p1[1] - p0[1]);
                let t = along / dist(p0, p1).powi(2);
                let foot: Vec<f64> = (0..2).map(|i| p0[i] + t * (p1[i] - p0[i])).collect();
                prop_assert!(dist(&w, &foot) < 1e-9 && (-1e-9..=1.0 + 1e-9).contains(&t));
            }
            prop_assert!(dist(&map.evaluate(c.first()).unwrap(), p0) < 1e-9);
            prop_assert!(dist(&map.evaluate(c.last()).unwrap(), p1) < 1e-9);
        }
    }

    #[test]
    fn branched_images_stay_in_the_unit_ball(m in 1u32..20, alpha in 0.05f64..0.66, x in pt(2, 2.0)) {
        let map = MapFamily::planar(m, alpha, 3.0).unwrap();
        let x: Vec<f64> = if norm(&x) > 2.0 { x.iter().map(|c| c * 2.0 / norm(&x)).collect() } else { x };
        prop_assert!(norm(&map.evaluate(&x).unwrap()) <= 1.0 + 1e-12);
        let spatial = MapFamily::spatial(m, alpha.min(0.49), 3, 3.0).unwrap();
        let x3 = vec![x[0] * 0.8, x[1] * 0.8, 0.5];
        prop_assert!(norm(&spatial.evaluate(&x3).unwrap()) <= 1.0 + 1e-12);
    }

    #[test]
    fn eta_profiles_are_normalized(r1 in 0.01f64..1.0, w in 0.01f64..2.0) {
        for kind in [EtaKind::Step, EtaKind::InverseT] {
            let eta = EtaProfile::of_kind(kind, r1, r1 + w).unwrap();
            let q = eta.integral();
            prop_assert!((1.0 - 1e-9..=1.0 + 1e-3).contains(&q), "{kind:?}: {q}");
        }
    }

    #[test]
    fn step_rhs_matches_closed_form_shell_integral(r1 in 0.05f64..0.5, w in 0.05f64..0.45) {
        // constant Q = 1 on the unit ball, shell centred at 0
        let q = modlab::mapzoo::QWeight::constant(2, 1.0, Some(1.0));
        let eta = EtaProfile::of_kind(EtaKind::Step, r1, r1 + w).unwrap();
        let got = rhs_integral(&q, &ExtPoint::origin(2), &eta).unwrap();
        let want = PI * ((r1 + w).powi(2) - r1 * r1) / w.powi(2);
        prop_assert!((got - want).abs() <= 1e-3 * want);
    }

    #[test]
    fn scan_statistic_ignores_sample_order(shift in 0usize..8) {
        let fam: Vec<_> = [1u32, 3, 7].iter().map(|&m| MapFamily::planar(m, 0.5, 3.0).unwrap()).collect();
        let radii = default_radii(0.4, 8);
        let mut shuffled = radii.clone();
        shuffled.rotate_left(shift);
        shuffled.swap(0, 7);
        let a = equicontinuity_scan(&fam, &[0.1, 0.0], 0.4, &radii, 32).unwrap();
        let b = equicontinuity_scan(&fam, &[0.1, 0.0], 0.4, &shuffled, 32).unwrap();
        prop_assert_eq!(a.s, b.s);
    }
}

#[test]
fn lifted_modulus_grows_with_the_sampled_family() {
    let map = MapFamily::planar(2, 0.5, 3.0).unwrap();
    let a = Annulus::new(vec![0.0, 0.0], 0.3, 0.6).unwrap();
    let g = Grid::centered_cube(2, 2.0, 64).unwrap();
    let mut prev = 0.0;
    for count in [2, 4, 8, 16] {
        let lifted = lift_family(&radial_family(&a, count, 0.01).unwrap(), &map).unwrap();
        let r = modulus_finite(&lifted, &g, 2.0).unwrap();
        // nested samples: counts double, so each family contains the previous one
        assert!(r.value >= prev * (1.0 - 2e-3), "{count}: {} < {prev}", r.value);
        prev = r.value;
    }
}

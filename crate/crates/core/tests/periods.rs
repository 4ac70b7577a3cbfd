use epsilon_core::periods::{build_cycles, integrate_product, period_determinant, period_matrix, CycleOptions};
use epsilon_core::{Connection, Error};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::function::gamma::gamma;
use std::f64::consts::PI;

fn kummer_target(alpha: f64) -> Complex64 {
    (Complex64::from_polar(1.0, 2.0 * PI * alpha) - 1.0) * gamma(alpha)
}

#[test]
fn kummer_determinant() {
    for (s, alpha) in [("1/3/z - 1", 1.0 / 3.0), ("7/4/z - 1", 1.75), ("-1/2/z - 1", -0.5)] {
        let c = Connection::parse(s).unwrap();
        let (d, err) = period_determinant(&c, 12).unwrap();
        let t = kummer_target(alpha);
        assert!((d - t).norm() < 1e-10 * t.norm(), "{s}: {d} vs {t}");
        assert!(err < 1e-8 * t.norm());
    }
}

#[test]
fn gaussian_determinant() {
    for (s, a) in [("-z", 1.0), ("-5/2*z", 2.5)] {
        let c = Connection::parse(s).unwrap();
        let (d, _) = period_determinant(&c, 12).unwrap();
        let t = (2.0 * PI / a).sqrt();
        assert!((d - t).norm() < 1e-10 * t, "{s}: {d} vs {t}");
    }
}

#[test]
fn homotopy_invariance() {
    let c = Connection::parse("1/3/z + 2/5/(z - 1) - 1").unwrap();
    let m0 = period_matrix(&c, 11, &CycleOptions::default()).unwrap();
    let base = m0.cycles.base;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut moved = 0;
    for _ in 0..50 {
        let off = Complex64::new(rng.gen_range(-0.03..0.03), rng.gen_range(-0.03..0.03));
        let opts = CycleOptions {
            base: Some(base + off),
            radius_scale: Some(rng.gen_range(0.6..1.2)),
            outer_scale: Some(rng.gen_range(1.0..1.6)),
        };
        let m = match period_matrix(&c, 11, &opts) {
            Ok(m) => m,
            // A perturbed base point may violate the clearance constraints.
            Err(Error::PathHitsSingularity(_)) => continue,
            Err(e) => panic!("{e}"),
        };
        moved += 1;
        for (r0, r1) in m0.entries.iter().zip(&m.entries) {
            for (a, b) in r0.iter().zip(r1) {
                assert!((a - b).norm() < 1e-8 * (1.0 + a.norm()), "{a} vs {b}");
            }
        }
    }
    assert!(moved >= 45, "only {moved} perturbations admissible");
}

#[test]
fn cycles_have_zero_boundary_and_right_count() {
    for s in ["1/3/z + 2/5/(z - 1) - 1", "1/z^3 + 1/3/(z-2)", "1/2/z + 1/3/(z - 1) + 1/4/(z + 1)", "-z^2 + 1/5/z"] {
        let c = Connection::parse(s).unwrap();
        let sys = build_cycles(&c, &CycleOptions::default()).unwrap();
        assert_eq!(sys.cycles.len() as i64, c.euler_char().unwrap(), "{s}");
        for k in 0..sys.cycles.len() {
            assert!(sys.boundary(k).norm() < 1e-12);
        }
    }
}

#[test]
fn wild_finite_point_is_nondegenerate() {
    let c = Connection::parse("1/z^3 + 1/3/(z-2)").unwrap();
    let m = period_matrix(&c, 10, &CycleOptions::default()).unwrap();
    let (d, e) = m.determinant();
    assert!(d.norm() > 100.0 * e, "{d} ± {e}");
}

#[test]
fn rational_flat_section_is_rejected() {
    let c = Connection::parse("2/z").unwrap();
    assert!(matches!(period_determinant(&c, 10), Err(Error::NonzeroH0(1))));
}

#[test]
fn kunneth_gaussian_square() {
    let a = build_cycles(&Connection::parse("-2*z").unwrap(), &CycleOptions::default()).unwrap();
    let r = integrate_product(&a, 0, &a, 0, &|_, _| Complex64::new(1.0, 0.0), 1e-11).unwrap();
    assert!((r.value - PI).norm() < 1e-8 * PI, "{}", r.value);
}

#[test]
fn kunneth_separates_mixed_factors() {
    let a = build_cycles(&Connection::parse("-2*z").unwrap(), &CycleOptions::default()).unwrap();
    let b = build_cycles(&Connection::parse("1/3/z - 1").unwrap(), &CycleOptions::default()).unwrap();
    let f = |z: Complex64| z * z + 1.0;
    let g = |w: Complex64| 1.0 / w;
    let joint = integrate_product(&a, 0, &b, 0, &|z, w| f(z) * g(w), 1e-11).unwrap();
    let sep = a.integrate(0, &f, 1e-12).unwrap().value * b.integrate(0, &g, 1e-12).unwrap().value;
    assert!((joint.value - sep).norm() < 1e-8 * sep.norm(), "{} vs {sep}", joint.value);
}

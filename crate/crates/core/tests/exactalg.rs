use epsilon_core::exactalg::{form_expand_at, rat, Poly, RationalFunction};
use epsilon_core::{Point, Rat};
use num_traits::Zero;
use proptest::prelude::*;

fn small_rat() -> impl Strategy<Value = Rat> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| rat(n, d))
}

fn poly(max_deg: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec(small_rat(), 0..=max_deg + 1).prop_map(Poly::from_coeffs)
}

/// Rational functions whose poles all sit at small rational points.
fn ratfunc() -> impl Strategy<Value = RationalFunction> {
    (poly(4), prop::collection::vec((-4i64..=4, 1i64..=3, 1usize..=3), 0..=3)).prop_map(|(num, poles)| {
        let mut den = Poly::one();
        for (n, d, k) in poles {
            let lin = Poly::from_coeffs(vec![-rat(n, d), rat(1, 1)]);
            for _ in 0..k {
                den = &den * &lin;
            }
        }
        RationalFunction::new(num, den).unwrap()
    })
}

fn nonzero_ratfunc() -> impl Strategy<Value = RationalFunction> {
    ratfunc().prop_filter("nonzero", |f| !f.is_zero())
}

fn poles(f: &RationalFunction) -> Vec<Point> {
    let mut pts: Vec<Point> = f.finite_poles().unwrap().into_iter().map(|(d, _)| Point::Finite(d)).collect();
    pts.push(Point::Infinity);
    pts
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn ring_laws(a in ratfunc(), b in ratfunc(), c in ratfunc()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(&a * &RationalFunction::one(), a.clone());
    }

    #[test]
    fn inverse_and_leibniz(a in nonzero_ratfunc(), b in ratfunc()) {
        prop_assert_eq!(&a * &a.inv().unwrap(), RationalFunction::one());
        prop_assert_eq!(&(&b / &a) * &a, b.clone());
        let lhs = (&a * &b).derivative();
        let rhs = &(&a.derivative() * &b) + &(&a * &b.derivative());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn residue_theorem(f in ratfunc()) {
        let mut total = Rat::zero();
        for p in poles(&f) {
            total += form_expand_at(&f, &p, 2).residue().unwrap();
        }
        prop_assert!(total.is_zero(), "sum of residues {}", total);
    }

    #[test]
    fn exact_forms_have_no_residues(f in ratfunc()) {
        let df = f.derivative();
        for p in poles(&df) {
            prop_assert!(form_expand_at(&df, &p, 2).residue().unwrap().is_zero());
        }
    }

    #[test]
    fn expansion_is_a_ring_map(a in nonzero_ratfunc(), b in nonzero_ratfunc(), n in -3i64..=3, d in 1i64..=2) {
        let p = if n == 3 { Point::Infinity } else { Point::Finite(rat(n, d)) };
        let trunc = 4;
        let ea = a.expand_at(&p, trunc + 8);
        let eb = b.expand_at(&p, trunc + 8);
        let prod = (&a * &b).expand_at(&p, trunc);
        let sum = (&a + &b).expand_at(&p, trunc);
        let m = ea.mul(&eb).unwrap();
        let s = ea.add(&eb).unwrap();
        for j in -10..trunc {
            prop_assert_eq!(prod.coeff(j).unwrap(), m.coeff(j).unwrap());
            prop_assert_eq!(sum.coeff(j).unwrap(), s.coeff(j).unwrap());
        }
    }
}

use epsilon_core::exactalg::rat;
use epsilon_core::lines::{rational_reconstruct, GradedLine, SymbolicComplex};
use epsilon_core::Rat;
use num_complex::Complex64;
use proptest::prelude::*;

fn small_rat() -> impl Strategy<Value = Rat> {
    (-7i64..=7, 1i64..=6).prop_map(|(n, d)| rat(n, d))
}

fn atom() -> impl Strategy<Value = SymbolicComplex> {
    prop_oneof![
        small_rat().prop_filter_map("nonzero", |q| SymbolicComplex::rational(q).ok()),
        small_rat().prop_filter_map("pole", |q| SymbolicComplex::gamma_pow(&q, 1).ok()),
        (small_rat(), -2i64..=2).prop_filter_map("pole", |(q, e)| SymbolicComplex::gamma_pow(&q, e).ok()),
        small_rat().prop_map(|q| SymbolicComplex::exp_two_pi_i(&q)),
        (small_rat(), small_rat()).prop_filter_map("zero base", |(x, e)| SymbolicComplex::rat_pow(&x, &e).ok()),
        (small_rat(), -2i64..=2).prop_filter_map("integral", |(c, n)| SymbolicComplex::cyclotomic_pow(&c, n).ok()),
        (-3i64..=3).prop_map(SymbolicComplex::two_pi_i_pow),
        (-3i64..=3).prop_map(SymbolicComplex::i_pow),
        (-2i64..=2).prop_map(|k| SymbolicComplex::exp(rat(k, 3))),
    ]
}

fn scalar() -> impl Strategy<Value = SymbolicComplex> {
    prop::collection::vec(atom(), 1..=4).prop_map(|v| v.iter().fold(SymbolicComplex::one(), |a, b| a.mul(b)))
}

fn line() -> impl Strategy<Value = GradedLine> {
    (-5i64..=5, scalar()).prop_map(|(d, s)| GradedLine::new(d, s))
}

fn close(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= 1e-9 * (1.0 + a.norm().max(b.norm()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn tensor_is_a_commutative_group(a in line(), b in line(), c in line()) {
        prop_assert_eq!(a.tensor(&b).tensor(&c), a.tensor(&b.tensor(&c)));
        prop_assert_eq!(a.tensor(&b), b.tensor(&a));
        prop_assert_eq!(a.tensor(&GradedLine::unit()), a.clone());
        prop_assert_eq!(a.tensor(&a.inverse()), GradedLine::unit());
        prop_assert_eq!(a.tensor(&b).degree, a.degree + b.degree);
    }

    #[test]
    fn twist_additivity(a in line(), m in -6i64..=6, n in -6i64..=6) {
        prop_assert_eq!(a.tate_twist(m).tate_twist(n), a.tate_twist(m + n));
        prop_assert_eq!(a.tate_twist(n).degree, a.degree);
        prop_assert_eq!(a.tensor(&b_twisted(n)), a.tate_twist(n));
    }

    #[test]
    fn powers_agree_with_products(s in scalar(), n in -3i64..=3) {
        let mut acc = SymbolicComplex::one();
        for _ in 0..n.abs() {
            acc = acc.mul(&s);
        }
        if n < 0 {
            acc = acc.inv();
        }
        prop_assert_eq!(s.pow(n), acc);
    }

    #[test]
    fn evaluation_is_multiplicative(a in scalar(), b in scalar()) {
        let (Ok(x), Ok(y), Ok(xy)) = (a.eval(), b.eval(), a.mul(&b).eval()) else {
            return Ok(());
        };
        prop_assert!(close(xy.value(), x.value() * y.value()), "{} vs {}", xy.value(), x.value() * y.value());
    }

    #[test]
    fn rationals_reconstruct(q in small_rat().prop_filter("nonzero", |q| *q != rat(0, 1))) {
        let x = SymbolicComplex::rational(q.clone()).unwrap().eval().unwrap().value();
        prop_assert_eq!(rational_reconstruct(x, 1000, 1e-12), Some(q));
    }
}

fn b_twisted(n: i64) -> GradedLine {
    GradedLine::new(0, SymbolicComplex::two_pi_i_pow(-n))
}

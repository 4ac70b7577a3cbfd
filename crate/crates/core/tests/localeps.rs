mod common;

use epsilon_core::exactalg::{rat, LocalSeries, Poly, RationalFunction};
use epsilon_core::localeps::{character_of, g_lambda, g_nu, nu_local, GaussSumInput};
use epsilon_core::{Connection, Point};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn z0() -> Point {
    Point::finite(0, 1)
}

/// `ν = z^k (u₀ + u₁ z + u₂ z²)` with `u₀ ≠ 0`.
fn random_nu<R: Rng>(rng: &mut R) -> RationalFunction {
    let k = rng.gen_range(-3i32..=3);
    let u = Poly::from_coeffs(vec![common::nonzero_rat(rng), common::any_rat(rng), common::any_rat(rng)]);
    let mono = if k >= 0 {
        RationalFunction::from_poly(Poly::monomial(rat(1, 1), k as usize))
    } else {
        RationalFunction::from_poly(Poly::monomial(rat(1, 1), (-k) as usize)).inv().unwrap()
    };
    &RationalFunction::from_poly(u) * &mono
}

/// Wild at 0 of pole order 2..=5, with another simple pole at 2.
fn random_wild<R: Rng>(rng: &mut R) -> Connection {
    let m = rng.gen_range(2..=5);
    let mut omega = RationalFunction::polar(common::nonzero_rat(rng), &rat(0, 1), m);
    for j in 1..m {
        omega = &omega + &RationalFunction::polar(common::any_rat(rng), &rat(0, 1), j);
    }
    omega = &omega + &RationalFunction::polar(common::nonzero_rat(rng), &rat(2, 1), 1);
    Connection::new(omega).unwrap()
}

#[test]
fn g_lambda_matches_all_residues() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..100 {
        let c = random_wild(&mut rng);
        let nu = random_nu(&mut rng);
        let chi = character_of(&c, &z0(), 0).unwrap();
        let nu_loc = nu_local(&nu, &z0(), chi.a).unwrap();
        let input = GaussSumInput::new(chi.clone(), nu_loc.clone()).unwrap();
        let omega_loc = c.local_form(&z0(), 12);
        let g = g_lambda(&input, &omega_loc).unwrap();
        assert_eq!(g.valuation().unwrap(), -(input.c_nu + chi.a as i64));
        // ω − g ν is holomorphic, so every Res(t^j (ω − g ν)) with j ≥ 0 vanishes.
        let diff = omega_loc.series.sub(&nu_loc.mul_series(&g).unwrap().series).unwrap();
        for j in 0..=chi.f as i64 + 2 {
            let tj = LocalSeries::monomial(z0(), rat(1, 1), j, 12);
            let r = diff.mul(&tj).unwrap().coeff(-1).unwrap();
            assert!(r.is_zero(), "ω = {}, ν = {}, j = {j}: residue {r}", c.omega(), nu);
        }
    }
}

#[test]
fn g_nu_pairs_to_minus_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..100 {
        let alpha = common::nonzero_rat(&mut rng);
        let c = Connection::new(&RationalFunction::polar(alpha, &rat(0, 1), 1) + &RationalFunction::polar(rat(1, 1), &rat(3, 1), 1))
            .unwrap();
        let nu = random_nu(&mut rng);
        let chi = character_of(&c, &z0(), 0).unwrap();
        let input = GaussSumInput::new(chi.clone(), nu_local(&nu, &z0(), chi.a).unwrap()).unwrap();
        let g = g_nu(&input).unwrap();
        let r = input.nu_loc.mul_series(&g).unwrap().residue().unwrap();
        assert_eq!(r, rat(-1, 1), "ν = {nu}");
    }
}

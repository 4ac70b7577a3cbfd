#![allow(dead_code)]

use epsilon_core::exactalg::{rat, Poly, RationalFunction};
use epsilon_core::lines::SymbolicComplex;
use epsilon_core::localeps::{canonical_fiber, nu_local, tau_closed_form, CharacterData, GaussSumInput};
use epsilon_core::oracle::tau_numeric;
use epsilon_core::{parse_rational_function, Connection, Error, Point, Rat};
use num_complex::Complex64;
use rand::Rng;

pub fn nonzero_rat<R: Rng>(rng: &mut R) -> Rat {
    loop {
        let n = rng.gen_range(-5i64..=5);
        if n != 0 {
            return rat(n, rng.gen_range(1..=4));
        }
    }
}

pub fn any_rat<R: Rng>(rng: &mut R) -> Rat {
    rat(rng.gen_range(-5i64..=5), rng.gen_range(1..=4))
}

/// Random connection with at most four singular points and pole orders at most five.
pub fn random_connection<R: Rng>(rng: &mut R) -> Connection {
    loop {
        let with_inf = rng.gen_bool(0.6);
        let n_fin = rng.gen_range(if with_inf { 0..=3 } else { 1..=4 });
        let mut pts: Vec<Rat> = Vec::new();
        while pts.len() < n_fin {
            let d = rat(rng.gen_range(-4i64..=4), rng.gen_range(1..=2));
            if !pts.contains(&d) {
                pts.push(d);
            }
        }
        let mut omega = RationalFunction::zero();
        for d in &pts {
            let m = rng.gen_range(1..=5);
            for j in 1..=m {
                let c = if j == m { nonzero_rat(rng) } else { any_rat(rng) };
                omega = &omega + &RationalFunction::polar(c, d, j);
            }
        }
        if with_inf {
            // Pole order of ω dz at infinity is deg + 2.
            let deg = rng.gen_range(0..=3usize);
            let mut cs: Vec<Rat> = (0..deg).map(|_| any_rat(rng)).collect();
            cs.push(nonzero_rat(rng));
            omega = &omega + &RationalFunction::from_poly(Poly::from_coeffs(cs));
        }
        if omega.is_zero() {
            continue;
        }
        let c = Connection::new(omega).unwrap();
        let s = c.singular_points().len();
        if (1..=4).contains(&s) && c.profile().iter().all(|p| p.pole_order <= 5) {
            return c;
        }
    }
}

/// Closed-form Gauss sum at 0 for `ν` given as a string.
pub fn closed(chi: &CharacterData, nu: &str) -> Complex64 {
    let nu_loc = nu_local(&parse_rational_function(nu).unwrap(), &chi.point, chi.a).unwrap();
    let input = GaussSumInput::new(chi.clone(), nu_loc).unwrap();
    let trunc = GaussSumInput::needed_trunc(input.c_nu, chi.a).max(4);
    let fiber = canonical_fiber(&input, &chi.local_form(trunc), &SymbolicComplex::one()).unwrap();
    tau_closed_form(&input, &fiber, false).unwrap().value.eval().unwrap().value()
}

pub fn numeric(chi: &CharacterData, nu: &str, digits: u32) -> Result<(Complex64, f64), Error> {
    let nu_loc = nu_local(&parse_rational_function(nu).unwrap(), &chi.point, chi.a).unwrap();
    tau_numeric(chi, &nu_loc, digits).map(|v| (v.tau, v.err))
}

pub fn chi(lam: &[Rat]) -> CharacterData {
    CharacterData::from_lambda(Point::finite(0, 1), lam)
}

pub fn grid() -> Vec<(CharacterData, &'static str)> {
    let mut out = Vec::new();
    for delta in [rat(1, 3), rat(1, 2), rat(1, 1), rat(2, 1)] {
        for lam in [vec![delta.clone()], vec![rat(2, 5), delta.clone()], vec![rat(2, 5), rat(1, 3), delta.clone()]] {
            for nu in ["1", "1/z", "z"] {
                out.push((chi(&lam), nu));
            }
        }
    }
    out
}


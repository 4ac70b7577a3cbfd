mod common;

use std::collections::BTreeMap;
use std::time::Instant;

use epsilon_core::derham::{nabla, verify_certificate, DeRham, TwistedForm};
use epsilon_core::exactalg::{rat, Poly, RationalFunction};
use epsilon_core::{Connection, Point, Rat};
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Coordinates of a rational function: `(i, k)` is `(z − d_i)^{−k}`, `(usize::MAX, j)` is `z^j`.
fn coords(f: &RationalFunction, fin: &[Rat]) -> BTreeMap<(usize, usize), Rat> {
    let mut out = BTreeMap::new();
    for (i, d) in fin.iter().enumerate() {
        let s = f.expand_at(&Point::Finite(d.clone()), 0);
        for (e, c) in s.terms() {
            if e < 0 && !c.is_zero() {
                out.insert((i, (-e) as usize), c.clone());
            }
        }
    }
    let (q, _) = f.num().div_rem(f.den());
    for (j, c) in q.coeffs().iter().enumerate() {
        if !c.is_zero() {
            out.insert((usize::MAX, j), c.clone());
        }
    }
    out
}

/// Row-echelon form with distinct leading keys; its length is the rank.
fn reduce_basis(rows: Vec<BTreeMap<(usize, usize), Rat>>) -> Vec<BTreeMap<(usize, usize), Rat>> {
    let mut out: Vec<BTreeMap<(usize, usize), Rat>> = Vec::new();
    for mut row in rows {
        loop {
            row.retain(|_, v| !v.is_zero());
            let Some(key) = row.keys().next().cloned() else { break };
            let Some(p) = out.iter().find(|p| p.keys().next() == Some(&key)) else { break };
            let f = row[&key].clone() / &p[&key];
            for (k, v) in p {
                let e = row.entry(*k).or_insert_with(Rat::zero);
                *e -= &f * v;
            }
        }
        if !row.is_empty() {
            out.push(row);
        }
    }
    out
}

/// `(h⁰, h¹)` from the ranks of `∇` on pole-bounded pieces of the algebraic de Rham complex.
fn brute_force(c: &Connection) -> (usize, usize) {
    let prof = c.profile();
    let fin: Vec<Rat> = c.finite_poles().iter().map(|(d, _)| d.clone()).collect();
    let resonance = prof
        .iter()
        .filter(|p| p.pole_order == 1 && p.alpha.is_integer())
        .map(|p| p.alpha.abs().to_integer().try_into().unwrap_or(0usize))
        .max()
        .unwrap_or(0);
    let n = resonance.max(2) + 2;
    let mut basis = Vec::new();
    for d in &fin {
        for k in 1..=n {
            basis.push(RationalFunction::polar(rat(1, 1), d, k));
        }
    }
    let top = if c.is_singular(&Point::Infinity) { n } else { 0 };
    for j in 0..=top {
        basis.push(RationalFunction::from_poly(Poly::monomial(rat(1, 1), j)));
    }
    let rows: Vec<_> = basis.iter().map(|u| coords(&nabla(c.omega(), u), &fin)).collect();
    let r = reduce_basis(rows).len();
    let target: usize = prof.iter().map(|p| n + p.pole_order).sum::<usize>() - 1;
    (basis.len() - r, target - r)
}

#[test]
fn brute_force_ranks_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..60 {
        let c = common::random_connection(&mut rng);
        let dr = DeRham::new(&c).unwrap();
        let (h0, h1) = brute_force(&c);
        assert_eq!((dr.h0_dim(), dr.h1_basis().len()), (h0, h1), "{}", c.omega());
    }
}

#[test]
fn brute_force_on_resonant_examples() {
    for s in ["2/z", "3/z - 3/(z-1)", "-2/z + 1/(z - 1)", "1/z + 1/3/(z-1)", "z + 2/z", "1/z^2 - 2/z"] {
        let c = Connection::parse(s).unwrap();
        let dr = DeRham::new(&c).unwrap();
        assert_eq!((dr.h0_dim(), dr.h1_basis().len()), brute_force(&c), "{s}");
    }
}

#[test]
fn index_theorem_random() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    let start = Instant::now();
    for _ in 0..200 {
        let c = common::random_connection(&mut rng);
        let dr = DeRham::new(&c).unwrap();
        let chi = c.euler_char().unwrap();
        assert_eq!(dr.h1_basis().len() as i64 - dr.h0_dim() as i64, chi, "{}", c.omega());
    }
    assert!(start.elapsed().as_secs() < 60);
}

#[test]
fn reductions_are_certified() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    for _ in 0..100 {
        let c = common::random_connection(&mut rng);
        let dr = DeRham::new(&c).unwrap();
        let fin: Vec<Rat> = c.finite_poles().iter().map(|(d, _)| d.clone()).collect();
        // A random form with poles only on the divisor.
        let mut f = RationalFunction::zero();
        for d in &fin {
            let k = rng.gen_range(1..=4);
            f = &f + &RationalFunction::polar(common::any_rat(&mut rng), d, k);
        }
        if c.is_singular(&Point::Infinity) {
            let deg = rng.gen_range(0..=3);
            f = &f + &RationalFunction::from_poly(Poly::from_coeffs((0..=deg).map(|_| common::any_rat(&mut rng)).collect()));
        } else if fin.len() >= 2 {
            // Regular at infinity: residues must cancel, so use a difference of simple poles.
            f = &f + &(&RationalFunction::polar(rat(1, 1), &fin[0], 1) - &RationalFunction::polar(rat(1, 1), &fin[1], 1));
        }
        let f = drop_residue_at_infinity_if_regular(&c, &fin, f);
        let red = dr.reduce(&TwistedForm::new(f.clone())).unwrap();
        assert!(verify_certificate(c.omega(), &f, &red), "{} on {}", f, c.omega());
        // Exact forms reduce to zero.
        let u = RationalFunction::polar(rat(1, 1), fin.first().unwrap_or(&rat(0, 1)), 1);
        if !fin.is_empty() {
            let ex = nabla(c.omega(), &u);
            assert!(dr.class_coordinates(&TwistedForm::new(ex)).unwrap().iter().all(|q| q.is_zero()));
        }
    }
}

/// When infinity is regular a form must vanish to order two there; subtract the
/// excess simple-pole residue at the first finite point.
fn drop_residue_at_infinity_if_regular(c: &Connection, fin: &[Rat], f: RationalFunction) -> RationalFunction {
    if c.is_singular(&Point::Infinity) || fin.is_empty() {
        return f;
    }
    let total = fin.iter().fold(Rat::zero(), |acc, d| acc + f.expand_at(&Point::Finite(d.clone()), 0).coeff(-1).unwrap());
    &f - &RationalFunction::polar(total, &fin[0], 1)
}

//! Twisted de Rham cohomology of `d + ω dz` on P¹ minus the singular points,
//! by pole-order reduction in partial-fraction coordinates.

use std::collections::BTreeMap;

use num_traits::{One, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::connection::Connection;
use crate::error::{Error, Result};
use crate::exactalg::{rat_int, Point, Poly, Rat, RationalFunction};

/// The form `coeff · dz`.
#[derive(Clone, PartialEq, Debug)]
pub struct TwistedForm {
    pub coeff: RationalFunction,
}

impl TwistedForm {
    pub fn new(coeff: RationalFunction) -> Self {
        TwistedForm { coeff }
    }
}

impl std::fmt::Display for TwistedForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({})dz", self.coeff)
    }
}

#[derive(Clone, PartialEq, Debug)]
pub struct Reduction {
    pub reduced: TwistedForm,
    /// `u` with `f − reduced = du + u ω dz`.
    pub certificate: RationalFunction,
}

#[derive(Clone, PartialEq, Debug)]
pub struct CohomologyBasis {
    pub h0_dim: usize,
    pub h1_dim: usize,
    pub chi: i64,
    pub h1_basis: Vec<TwistedForm>,
    /// `(form, reduction)` for every form reduced while building the basis.
    pub reduction_certificates: Vec<(TwistedForm, Reduction)>,
}

impl CohomologyBasis {
    pub fn to_json(&self) -> Value {
        json!({
            "h0": self.h0_dim,
            "h1": self.h1_dim,
            "chi": self.chi,
            "basis": self.h1_basis.iter().map(|b| b.to_string()).collect::<Vec<_>>(),
        })
    }
}

/// `(u' + u ω) dz`
pub fn nabla(omega: &RationalFunction, u: &RationalFunction) -> RationalFunction {
    &u.derivative() + &(u * omega)
}

/// Exact check of `f − reduced = du + u ω dz`.
pub fn verify_certificate(omega: &RationalFunction, f: &RationalFunction, r: &Reduction) -> bool {
    (&(f - &r.reduced.coeff) - &nabla(omega, &r.certificate)).is_zero()
}

/// Partial-fraction coordinate: `(z − d_i)^{−k}` or `z^j`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
enum Coord {
    Polar(usize, usize),
    Poly(usize),
}

type Vector = BTreeMap<Coord, Rat>;

fn axpy(v: &mut Vector, c: &Rat, w: &Vector) {
    for (k, x) in w {
        let e = v.entry(*k).or_insert_with(Rat::zero);
        *e += c * x;
        if e.is_zero() {
            v.remove(k);
        }
    }
}

/// Reduction data for a connection with a singular point at infinity.
#[derive(Clone, Debug)]
struct Frame {
    omega: RationalFunction,
    poles: Vec<(Rat, usize)>,
    /// Degree of the polynomial part of `ω`, if nonzero.
    poly_deg: Option<usize>,
    /// Highest kept polar order at each finite pole (`a_d`), and a resonant extra order.
    stall_finite: Vec<Option<usize>>,
    stall_inf: Option<usize>,
    /// Relations in echelon form: pivot coordinate, row, and `u` with row = reduce(∇u) up to the reduction certificate.
    relations: Vec<(Coord, Vector, RationalFunction)>,
    basis: Vec<Coord>,
}

impl Frame {
    fn new(c: &Connection) -> Result<Self> {
        let omega = c.omega().clone();
        let poles = c.finite_poles().to_vec();
        let residues: Vec<Rat> = poles
            .iter()
            .map(|(d, _)| omega.expand_at(&Point::Finite(d.clone()), 0).coeff(-1).unwrap())
            .collect();
        let (q, _) = omega.num().div_rem(omega.den());
        let poly_deg = q.degree();
        let r = residues.iter().fold(Rat::zero(), |a, b| a + b);
        let stall_finite = poles
            .iter()
            .zip(&residues)
            .map(|((_, m), alpha)| {
                if *m == 1 && alpha.is_integer() && alpha >= &Rat::one() {
                    Some(alpha.to_integer().to_usize().unwrap() + 1)
                } else {
                    None
                }
            })
            .collect();
        let stall_inf = if poly_deg.is_none() && r.is_integer() && r <= -Rat::one() {
            Some((-&r).to_integer().to_usize().unwrap() - 1)
        } else {
            None
        };
        let mut fr = Frame {
            omega,
            poles,
            poly_deg,
            stall_finite,
            stall_inf,
            relations: Vec::new(),
            basis: Vec::new(),
        };
        fr.build_relations()?;
        Ok(fr)
    }

    fn monomial(&self, c: Coord) -> RationalFunction {
        match c {
            Coord::Polar(i, k) => RationalFunction::polar(Rat::one(), &self.poles[i].0, k),
            Coord::Poly(j) => RationalFunction::from_poly(Poly::monomial(Rat::one(), j)),
        }
    }

    fn to_rf(&self, v: &Vector) -> RationalFunction {
        let mut out = RationalFunction::zero();
        let mut poly = Vec::new();
        for (k, x) in v {
            match *k {
                Coord::Poly(j) => {
                    if poly.len() <= j {
                        poly.resize(j + 1, Rat::zero());
                    }
                    poly[j] = x.clone();
                }
                Coord::Polar(i, k) => out = &out + &RationalFunction::polar(x.clone(), &self.poles[i].0, k),
            }
        }
        &out + &RationalFunction::from_poly(Poly::from_coeffs(poly))
    }

    fn coords(&self, f: &RationalFunction) -> Result<Vector> {
        let mut v = Vector::new();
        if f.is_zero() {
            return Ok(v);
        }
        let mut rest = f.den().clone();
        for (i, (d, _)) in self.poles.iter().enumerate() {
            let m = f.den().root_multiplicity(d);
            if m == 0 {
                continue;
            }
            let lin = Poly::from_coeffs(vec![-d.clone(), Rat::one()]);
            for _ in 0..m {
                rest = rest.div_rem(&lin).0;
            }
            let s = f.expand_at(&Point::Finite(d.clone()), 0);
            for (e, c) in s.terms() {
                v.insert(Coord::Polar(i, (-e) as usize), c.clone());
            }
        }
        if rest.degree() != Some(0) {
            return Err(Error::Unsupported(format!("form has poles outside the singular set: {f}")));
        }
        let (q, _) = f.num().div_rem(f.den());
        for (j, c) in q.coeffs().iter().enumerate() {
            if !c.is_zero() {
                v.insert(Coord::Poly(j), c.clone());
            }
        }
        Ok(v)
    }

    fn in_rep_space(&self, c: Coord) -> bool {
        match c {
            Coord::Polar(i, k) => k <= self.poles[i].1 || self.stall_finite[i] == Some(k),
            Coord::Poly(j) => match self.poly_deg {
                Some(p) => j < p,
                None => self.stall_inf == Some(j),
            },
        }
    }

    /// Reducer `u` for a coordinate outside the representative space and the
    /// coefficient of that coordinate in `∇u`.
    fn reducer(&self, c: Coord) -> (RationalFunction, Rat) {
        let u = match c {
            Coord::Polar(i, k) => Coord::Polar(i, k - self.poles[i].1),
            Coord::Poly(j) => match self.poly_deg {
                Some(p) => Coord::Poly(j - p),
                None => Coord::Poly(j + 1),
            },
        };
        let u = match u {
            Coord::Polar(_, 0) => Coord::Poly(0),
            other => other,
        };
        let urf = self.monomial(u);
        let lead = self.coords(&nabla(&self.omega, &urf)).unwrap().get(&c).cloned().unwrap_or_else(Rat::zero);
        (urf, lead)
    }

    /// Reduce into the representative space (before quotienting by relations).
    fn reduce_to_rep(&self, mut v: Vector) -> (Vector, RationalFunction) {
        let mut cert = RationalFunction::zero();
        loop {
            // Polynomial part first: finite reductions never create polynomial terms outside the space.
            let next = v
                .iter()
                .filter(|(k, _)| !self.in_rep_space(**k))
                .max_by_key(|(k, _)| match k {
                    Coord::Poly(j) => (1, *j, 0),
                    Coord::Polar(i, kk) => (0, *kk, *i),
                })
                .map(|(k, x)| (*k, x.clone()));
            let Some((c, x)) = next else { break };
            let (u, lead) = self.reducer(c);
            assert!(!lead.is_zero(), "reduction stalled at {c:?}");
            let s = x / lead;
            let nv = self.coords(&nabla(&self.omega, &u)).unwrap();
            axpy(&mut v, &-s.clone(), &nv);
            cert = &cert + &u.scale(&s);
        }
        (v, cert)
    }

    fn build_relations(&mut self) -> Result<()> {
        let mut sources: Vec<RationalFunction> = Vec::new();
        if self.poly_deg.is_none() {
            sources.push(RationalFunction::one());
        }
        for (i, st) in self.stall_finite.iter().enumerate() {
            if let Some(k) = st {
                sources.push(RationalFunction::polar(Rat::one(), &self.poles[i].0, k - 1));
            }
        }
        if let Some(j) = self.stall_inf {
            sources.push(self.monomial(Coord::Poly(j + 1)));
        }
        let weight = |c: &Coord| match c {
            Coord::Poly(j) => (*j + 1, 1usize, 0usize),
            Coord::Polar(i, k) => (*k, 0, *i),
        };
        for u in sources {
            let nv = self.coords(&nabla(&self.omega, &u))?;
            let (mut row, cert) = self.reduce_to_rep(nv);
            // row = ∇u − ∇cert
            let mut urf = &u - &cert;
            for (p, prow, pu) in &self.relations {
                if let Some(x) = row.get(p).cloned() {
                    axpy(&mut row, &-x.clone(), prow);
                    urf = &urf - &pu.scale(&x);
                }
            }
            if let Some(p) = row.keys().copied().max_by_key(weight) {
                let inv = Rat::one() / &row[&p];
                row.values_mut().for_each(|x| *x *= &inv);
                urf = urf.scale(&inv);
                for (_, prow, pu) in self.relations.iter_mut() {
                    if let Some(x) = prow.get(&p).cloned() {
                        axpy(prow, &-x.clone(), &row);
                        *pu = &*pu - &urf.scale(&x);
                    }
                }
                self.relations.push((p, row, urf));
            }
        }
        let pivots: Vec<Coord> = self.relations.iter().map(|(p, _, _)| *p).collect();
        let mut rep: Vec<Coord> = Vec::new();
        for (i, (_, m)) in self.poles.iter().enumerate() {
            for k in 1..=*m {
                rep.push(Coord::Polar(i, k));
            }
            if let Some(k) = self.stall_finite[i] {
                rep.push(Coord::Polar(i, k));
            }
        }
        match self.poly_deg {
            Some(p) => rep.extend((0..p).map(Coord::Poly)),
            None => rep.extend(self.stall_inf.map(Coord::Poly)),
        }
        self.basis = rep.into_iter().filter(|c| !pivots.contains(c)).collect();
        self.basis.sort_by_key(|c| match c {
            Coord::Poly(j) => (0, *j, 0),
            Coord::Polar(i, k) => (1, *k, *i),
        });
        Ok(())
    }

    fn reduce(&self, f: &RationalFunction) -> Result<Reduction> {
        let v = self.coords(f)?;
        let (mut v, mut cert) = self.reduce_to_rep(v);
        for (p, row, u) in &self.relations {
            if let Some(x) = v.get(p).cloned() {
                axpy(&mut v, &-x.clone(), row);
                cert = &cert + &u.scale(&x);
            }
        }
        Ok(Reduction { reduced: TwistedForm::new(self.to_rf(&v)), certificate: cert })
    }
}

/// Pole-order reduction engine for one connection. When infinity is a regular
/// point the computation runs in the coordinate `z' = 1/(z − d₀)`.
#[derive(Clone, Debug)]
pub struct DeRham {
    conn: Connection,
    frame: Frame,
    /// `d₀` when the frame lives in the moved coordinate.
    moved: Option<Rat>,
}

impl DeRham {
    pub fn new(c: &Connection) -> Result<Self> {
        let sing = c.singular_points();
        if sing.is_empty() {
            return Err(Error::EmptyDivisor);
        }
        if sing.contains(&Point::Infinity) {
            return Ok(DeRham { conn: c.clone(), frame: Frame::new(c)?, moved: None });
        }
        let d0 = sing[0].as_finite().unwrap().clone();
        let one = Rat::one();
        let moved_conn = c.mobius(&d0, &one, &one, &Rat::zero())?;
        Ok(DeRham { conn: c.clone(), frame: Frame::new(&moved_conn)?, moved: Some(d0) })
    }

    pub fn connection(&self) -> &Connection {
        &self.conn
    }

    /// `f(z) dz` in the frame coordinate `z'`, where `z = d₀ + 1/z'`.
    fn form_to_frame(&self, f: &RationalFunction) -> RationalFunction {
        match &self.moved {
            None => f.clone(),
            Some(d0) => {
                let one = Rat::one();
                let g = f.compose_mobius(d0, &one, &one, &Rat::zero());
                let jac = RationalFunction::from_poly(Poly::monomial(rat_int(-1), 2)).inv().unwrap();
                &g * &jac
            }
        }
    }

    /// Function `g(z')` back in `z`, via `z' = 1/(z − d₀)`.
    fn fn_from_frame(&self, g: &RationalFunction) -> RationalFunction {
        match &self.moved {
            None => g.clone(),
            Some(d0) => g.compose_mobius(&Rat::zero(), &Rat::one(), &Rat::one(), &-d0.clone()),
        }
    }

    fn form_from_frame(&self, g: &RationalFunction) -> RationalFunction {
        match &self.moved {
            None => g.clone(),
            Some(d0) => {
                // dz' = −dz/(z − d₀)²
                let lin = RationalFunction::from_poly(Poly::from_coeffs(vec![-d0.clone(), Rat::one()]));
                let jac = (&lin * &lin).inv().unwrap().scale(&rat_int(-1));
                &self.fn_from_frame(g) * &jac
            }
        }
    }

    pub fn reduce(&self, f: &TwistedForm) -> Result<Reduction> {
        let r = self.frame.reduce(&self.form_to_frame(&f.coeff))?;
        let out = Reduction {
            reduced: TwistedForm::new(self.form_from_frame(&r.reduced.coeff)),
            certificate: self.fn_from_frame(&r.certificate),
        };
        debug_assert!(verify_certificate(self.conn.omega(), &f.coeff, &out));
        Ok(out)
    }

    pub fn h1_basis(&self) -> Vec<TwistedForm> {
        self.frame
            .basis
            .iter()
            .map(|c| TwistedForm::new(self.form_from_frame(&self.frame.monomial(*c))))
            .collect()
    }

    /// Coordinates of a form's class in the basis of [`DeRham::h1_basis`].
    pub fn class_coordinates(&self, f: &TwistedForm) -> Result<Vec<Rat>> {
        let r = self.frame.reduce(&self.form_to_frame(&f.coeff))?;
        let v = self.frame.coords(&r.reduced.coeff)?;
        Ok(self.frame.basis.iter().map(|c| v.get(c).cloned().unwrap_or_else(Rat::zero)).collect())
    }

    pub fn h0_dim(&self) -> usize {
        usize::from(self.conn.has_rational_flat_section())
    }

    pub fn cohomology(&self) -> Result<CohomologyBasis> {
        let h1_basis = self.h1_basis();
        let mut certs = Vec::new();
        // Reduce a spanning family of the representative space: each basis form and each relation source.
        let mut span: Vec<RationalFunction> = h1_basis.iter().map(|b| b.coeff.clone()).collect();
        for (_, row, _) in &self.frame.relations {
            span.push(self.form_from_frame(&self.frame.to_rf(row)));
        }
        for f in span {
            let tf = TwistedForm::new(f);
            let r = self.reduce(&tf)?;
            if !verify_certificate(self.conn.omega(), &tf.coeff, &r) {
                return Err(Error::Unsupported("reduction certificate failed".into()));
            }
            certs.push((tf, r));
        }
        Ok(CohomologyBasis {
            h0_dim: self.h0_dim(),
            h1_dim: h1_basis.len(),
            chi: self.conn.euler_char()?,
            h1_basis,
            reduction_certificates: certs,
        })
    }
}

pub fn reduce_form(c: &Connection, f: &TwistedForm) -> Result<Reduction> {
    DeRham::new(c)?.reduce(f)
}

pub fn cohomology(c: &Connection) -> Result<CohomologyBasis> {
    DeRham::new(c)?.cohomology()
}

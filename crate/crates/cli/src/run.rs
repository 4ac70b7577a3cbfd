use std::fmt::Write as _;

use epsilon_core::exactalg::fmt_rat;
use epsilon_core::localeps::{local_report, nu_local};
use epsilon_core::{
    cohomology, parse_rational_function, period_matrix, product_check, tau_numeric, Connection, CycleOptions, Error,
    FiberNormalization, RationalFunction,
};
use serde_json::{json, Value};

use crate::config::JobConfig;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;

#[derive(Debug)]
pub enum Failure {
    Parse(String),
    Precondition(String),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Parse(_) => EXIT_PARSE,
            Failure::Precondition(_) => EXIT_PRECONDITION,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Parse(m) | Failure::Precondition(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse { .. } => Failure::Parse(e.to_string()),
            _ => Failure::Precondition(e.to_string()),
        }
    }
}

pub struct Outcome {
    pub code: i32,
    pub text: String,
    pub json: Value,
}

fn parse_inputs(cfg: &JobConfig) -> Result<(Connection, RationalFunction), Failure> {
    let omega = parse_rational_function(&cfg.omega).map_err(|e| Failure::Parse(format!("--omega: {e}")))?;
    let nu = parse_rational_function(&cfg.nu).map_err(|e| Failure::Parse(format!("--nu: {e}")))?;
    if nu.is_zero() {
        return Err(Failure::Precondition("ν must be nonzero".into()));
    }
    Ok((Connection::new(omega)?, nu))
}

fn fmt_c(z: num_complex::Complex64) -> String {
    format!("{:.12e} {} {:.12e}i", z.re, if z.im < 0.0 { '-' } else { '+' }, z.im.abs())
}

fn config_json(cfg: &JobConfig) -> Value {
    json!({
        "omega": cfg.omega,
        "nu": cfg.nu,
        "precision": cfg.precision,
        "anchor": fmt_rat(&cfg.anchor),
        "omit_m_units": cfg.omit_m_units,
        "oracle": cfg.oracle,
    })
}

const TRIVIAL: &str = "connection extends to P¹; χ convention inapplicable";

/// Invariant table without numerics.
pub fn explain(cfg: &JobConfig) -> Result<Outcome, Failure> {
    let (c, nu) = parse_inputs(cfg)?;
    let mut text = String::new();
    writeln!(text, "ω = {}    ν = {}", c.omega(), nu).unwrap();
    if c.singular_points().is_empty() {
        writeln!(text, "{TRIVIAL}").unwrap();
        return Ok(Outcome { code: EXIT_PASS, text, json: json!({"config": config_json(cfg), "notice": TRIVIAL}) });
    }
    writeln!(text, "{:<8} {:>4} {:>3} {:>3} {:>8} {:>8} {:>5}  g", "point", "pole", "f", "a", "α", "δ", "c(ν)").unwrap();
    let mut rows = Vec::new();
    for p in c.profile() {
        let rep = local_report(&c, &p.point, &nu, &FiberNormalization::Local, cfg.omit_m_units)?;
        writeln!(
            text,
            "{:<8} {:>4} {:>3} {:>3} {:>8} {:>8} {:>5}  {}",
            p.point.to_string(),
            p.pole_order,
            rep.chi.f,
            rep.chi.a,
            fmt_rat(&p.alpha),
            fmt_rat(&rep.chi.delta),
            rep.c_nu,
            rep.g
        )
        .unwrap();
        rows.push(json!({
            "point": p.point.to_string(),
            "pole_order": p.pole_order,
            "f": rep.chi.f,
            "a": rep.chi.a,
            "alpha": fmt_rat(&p.alpha),
            "delta": fmt_rat(&rep.chi.delta),
            "c_nu": rep.c_nu,
            "g": rep.g.to_string(),
        }));
    }
    writeln!(text, "χ = {}", c.euler_char()?).unwrap();
    let json = json!({"config": config_json(cfg), "points": rows, "chi": c.euler_char()?});
    Ok(Outcome { code: EXIT_PASS, text, json })
}

/// Full pipeline: profile, local factors, cohomology, periods and the product check.
pub fn run(cfg: &JobConfig) -> Result<Outcome, Failure> {
    let (c, nu) = parse_inputs(cfg)?;
    if c.singular_points().is_empty() {
        return Err(Failure::Precondition(TRIVIAL.into()));
    }
    let mut text = String::new();
    writeln!(text, "ω = {}    ν = {}    anchor = {}", c.omega(), nu, fmt_rat(&cfg.anchor)).unwrap();

    let norm = FiberNormalization::Global { anchor: cfg.anchor.clone() };
    writeln!(text, "{:<8} {:>3} {:>3} {:>8} {:>5}  {:<28} ε", "point", "f", "a", "δ", "c(ν)", "τ").unwrap();
    let mut locals = Vec::new();
    for p in c.singular_points() {
        let rep = local_report(&c, p, &nu, &norm, cfg.omit_m_units)?;
        writeln!(
            text,
            "{:<8} {:>3} {:>3} {:>8} {:>5}  {:<28} {}",
            p.to_string(),
            rep.chi.f,
            rep.chi.a,
            fmt_rat(&rep.chi.delta),
            rep.c_nu,
            rep.tau.to_string(),
            rep.epsilon
        )
        .unwrap();
        locals.push(rep);
    }

    let coh = cohomology(&c)?;
    writeln!(text, "χ = {}    h⁰ = {}    h¹ = {}    basis: {}", coh.chi, coh.h0_dim, coh.h1_dim, {
        coh.h1_basis.iter().map(|b| b.to_string()).collect::<Vec<_>>().join(", ")
    })
    .unwrap();

    let pm = match period_matrix(&c, cfg.precision, &CycleOptions::default()) {
        Ok(pm) => pm,
        Err(Error::PrecisionUnreachable(m)) => return Ok(unreachable(cfg, text, m)),
        Err(e) => return Err(e.into()),
    };
    let (det, det_err) = pm.determinant();
    writeln!(text, "period determinant  {}  ± {:.1e}", fmt_c(det), det_err).unwrap();

    let rep = match product_check(&c, &nu, cfg.precision, &cfg.anchor, cfg.omit_m_units) {
        Ok(r) => r,
        Err(Error::PrecisionUnreachable(m)) => return Ok(unreachable(cfg, text, m)),
        Err(e) => return Err(e.into()),
    };
    let d = &rep.degrees;
    writeln!(
        text,
        "degree check        Σc = {}  total degree = {}  h¹ − h⁰ = {}  {}",
        d.sum_c,
        d.total_degree,
        d.h1 as i64 - d.h0 as i64,
        if d.pass { "ok" } else { "MISMATCH" }
    )
    .unwrap();
    writeln!(text, "lhs                 {}  ± {:.1e}", fmt_c(rep.lhs), rep.lhs_err).unwrap();
    writeln!(text, "rhs                 {}  = {}", fmt_c(rep.rhs), rep.rhs_symbolic).unwrap();
    writeln!(text, "ratio               {}", fmt_c(rep.ratio)).unwrap();
    let rational = rep.rational_part.as_ref().map(fmt_rat).unwrap_or_else(|| "undetermined unit".into());
    writeln!(text, "rational part       {rational}  (after i^{})", rep.phase_quarter_turns).unwrap();
    if let Some((k, q)) = &rep.two_pi_i_excess {
        if *k != 0 {
            writeln!(text, "note                ratio = i^m · (2πi)^{k} · {q}").unwrap();
        }
    }

    let mut oracle = Vec::new();
    if cfg.oracle {
        writeln!(text, "oracle (local fibers)").unwrap();
        for (p, rep) in c.singular_points().iter().zip(&locals) {
            let closed = local_report(&c, p, &nu, &FiberNormalization::Local, false)?.tau.value.eval()?.value();
            let nu_loc = nu_local(&nu, p, rep.chi.a)?;
            match tau_numeric(&rep.chi, &nu_loc, cfg.precision.min(12)) {
                Ok(v) => {
                    let ok = (v.tau - closed).norm() <= v.err + 1e-12 * closed.norm();
                    writeln!(text, "  {:<8} {}  ± {:.1e}  {}", p.to_string(), fmt_c(v.tau), v.err, if ok { "agrees" } else { "DISAGREES" })
                        .unwrap();
                    oracle.push(json!({"point": p.to_string(), "numeric": [v.tau.re, v.tau.im], "err": v.err,
                        "closed_form": [closed.re, closed.im], "agrees": ok}));
                }
                Err(e @ (Error::PrecisionUnreachable(_) | Error::Unsupported(_))) => {
                    writeln!(text, "  {:<8} {e}", p.to_string()).unwrap();
                    oracle.push(json!({"point": p.to_string(), "skipped": e.to_string()}));
                }
                Err(e) => return Err(e.into()),
            }
        }
    }
    let oracle_ok = oracle.iter().all(|o| o["agrees"].as_bool().unwrap_or(true));
    let pass = rep.pass && oracle_ok;
    writeln!(text, "result              {}", if pass { "PASS" } else { "FAIL" }).unwrap();

    let json = json!({
        "config": config_json(cfg),
        "profile": c.profile(),
        "local": locals.iter().map(|r| r.to_json()).collect::<Vec<_>>(),
        "cohomology": coh.to_json(),
        "periods": pm.to_json(),
        "product": rep.to_json(),
        "oracle": if cfg.oracle { Value::Array(oracle) } else { Value::Null },
        "pass": pass,
    });
    Ok(Outcome { code: if pass { EXIT_PASS } else { EXIT_CHECK }, text, json })
}

fn unreachable(cfg: &JobConfig, mut text: String, msg: String) -> Outcome {
    writeln!(text, "precision unreachable: {msg}").unwrap();
    writeln!(text, "result              FAIL").unwrap();
    let json = json!({"config": config_json(cfg), "precision_unreachable": msg, "pass": false});
    Outcome { code: EXIT_CHECK, text, json }
}

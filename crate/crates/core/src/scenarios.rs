//! The divisible module that is not henselian, as a checked certificate, and
//! a bounded membership probe for hulls `aR + M_tor`.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::FieldElem;
use crate::hensel::Solver;
use crate::linalg::FpMatrix;
use crate::series::{Exp, SeriesElem, Value};
use crate::skew::{SkewPoly, SkewRing, DEFAULT_FACTOR_BOUND};
use crate::text::{format_poly, format_series};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    pub inputs: String,
    pub expected: String,
    pub outcome: String,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub checks: Vec<Check>,
}

impl Certificate {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// One `name: PASS|FAIL: detail` line per check.
    pub fn lines(&self) -> Vec<String> {
        self.checks
            .iter()
            .map(|c| {
                format!(
                    "{}: {}: {}",
                    c.name,
                    if c.pass { "PASS" } else { "FAIL" },
                    c.outcome
                )
            })
            .collect()
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "[{}] {}", if c.pass { "PASS" } else { "FAIL" }, c.name)?;
            writeln!(f, "    inputs:   {}", c.inputs)?;
            writeln!(f, "    expected: {}", c.expected)?;
            writeln!(f, "    computed: {}", c.outcome)?;
        }
        write!(
            f,
            "overall: {}",
            if self.pass() { "PASS" } else { "FAIL" }
        )
    }
}

/// With `y = u` and `x = (1 + y).(t - 1) = y.(t - 1)`: the equation
/// `z.(t - 1) = x` has the solutions `y + c`, `c` in `ann(t - 1)`, and `y`
/// is the only one of positive valuation. A divisible hull of `(1 + y)R`
/// without torsion cannot hold `y`, since it would then hold the torsion
/// element `1 = (1 + y) - y`; so that hull is divisible but not henselian,
/// while the henselian side does produce `y`.
pub fn run_counterexample(solver: &Solver) -> Result<Certificate> {
    let sm = solver.model();
    let tw = sm.tower();
    let ring = SkewRing::new(tw);
    let one = sm.constant(tw.one(1));
    let y = sm.u();
    let one_plus_y = sm.add(&one, &y)?;
    let r = ring.sub(&ring.t(1), &ring.one(1));
    let r_text = format_poly(&r);
    let mut checks = Vec::new();

    let one_r = sm.act(&one, &r)?;
    let torsion = one_r.is_zero_known();
    checks.push(Check {
        name: "one-is-torsion",
        inputs: format!("1, r = {r_text}"),
        expected: "1.r = 0".into(),
        outcome: format!("1.r = {}", format_series(&one_r)),
        pass: torsion,
    });

    let x = sm.act(&one_plus_y, &r)?;
    let xy = sm.act(&y, &r)?;
    checks.push(Check {
        name: "shifted-image",
        inputs: format!("y = {}", format_series(&y)),
        expected: "(1 + y).r = y.r".into(),
        outcome: format!("x = {}, y.r = {}", format_series(&x), format_series(&xy)),
        pass: x == xy,
    });

    let ann = solver.ann_roots(&r)?;
    let eta = solver.eta(&r);
    let mut solutions = Vec::new();
    let mut all_solve = true;
    for c in &ann.roots {
        let z = sm.add(&y, &sm.constant(tw.descend(c)?))?;
        all_solve &= sm.sub(&sm.act(&z, &r)?, &x)?.is_zero_known();
        solutions.push(z);
    }
    let sizes_match = crate::hensel::Eta::Finite(ann.roots.len() as u128) == eta;
    checks.push(Check {
        name: "solution-set",
        inputs: format!("z.({r_text}) = x"),
        expected: format!("solutions y + c for the {eta} roots c of {r_text}"),
        outcome: format!(
            "{{{}}}",
            solutions
                .iter()
                .map(format_series)
                .collect::<Vec<_>>()
                .join(", ")
        ),
        pass: all_solve && sizes_match,
    });

    let positive: Vec<&SeriesElem> = solutions
        .iter()
        .filter(|z| z.valuation_bound() > Value::int(0))
        .collect();
    let valuations: Vec<String> = solutions
        .iter()
        .map(|z| z.valuation().map(|v| v.to_string()).unwrap_or_else(|_| "?".into()))
        .collect();
    checks.push(Check {
        name: "unique-positive",
        inputs: "valuations of the solutions".into(),
        expected: "exactly one solution of positive valuation, namely y".into(),
        outcome: format!("valuations [{}]", valuations.join(", ")),
        pass: positive.len() == 1 && *positive[0] == y,
    });

    let diff = sm.sub(&one_plus_y, &y)?;
    checks.push(Check {
        name: "torsion-membership",
        inputs: "B a torsion-free divisible hull of (1 + y)R".into(),
        expected: "(1 + y) in B and (1 + y) - y = 1 is torsion, so y is not in B".into(),
        outcome: format!(
            "(1 + y) - y = {}; 1 torsion: {torsion}",
            format_series(&diff)
        ),
        pass: diff == one && torsion,
    });

    let z = solver.hensel_lift(&r, &x)?;
    let z_ok = sm.sub(&sm.act(&z, &r)?, &x)?.is_zero_known();
    checks.push(Check {
        name: "hensel-solution",
        inputs: format!("z.({r_text}) = x with v(z) > 0"),
        expected: "the henselian lift returns y".into(),
        outcome: format!("z = {}", format_series(&z)),
        pass: z_ok && sm.truncate(&z, Value::Infinity).terms() == y.terms(),
    });
    Ok(Certificate { checks })
}

/// A witness `(r, s)` with `z.r - a.s` torsion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HullWitness {
    pub r: SkewPoly,
    pub s: SkewPoly,
    /// `z.r - a.s`, a constant.
    pub torsion: FieldElem,
}

/// Looks for `r != 0` and `s` over `F_{p^m}` of degree at most `d` with
/// `z.r - a.s` constant, by linear algebra over `F_p` on the series
/// coefficients below the inputs' common precision (every term when they
/// are exact). Exact relations (`z.r = a.s`) are tried at every degree
/// before a constant correction is allowed.
/// `None` only means nothing was found within the bounds.
pub fn hull_contains_bounded(
    solver: &Solver,
    a: &SeriesElem,
    z: &SeriesElem,
    m: usize,
    d: usize,
) -> Result<Option<HullWitness>> {
    if d > DEFAULT_FACTOR_BOUND {
        return Err(Error::DegreeBoundExceeded {
            degree: d,
            bound: DEFAULT_FACTOR_BOUND,
        });
    }
    for allow_torsion in [false, true] {
        for deg in 0..=d {
            if let Some(w) = hull_search(solver, a, z, m, deg, allow_torsion)? {
                return Ok(Some(w));
            }
        }
    }
    Ok(None)
}

fn hull_search(
    solver: &Solver,
    a: &SeriesElem,
    z: &SeriesElem,
    m: usize,
    d: usize,
    allow_torsion: bool,
) -> Result<Option<HullWitness>> {
    let sm = solver.model();
    let tw = sm.tower();
    let ring = SkewRing::new(tw);
    let powers = |x: &SeriesElem| {
        let mut out = vec![x.clone()];
        for _ in 0..d {
            out.push(sm.act_t(out.last().expect("nonempty")));
        }
        out
    };
    let zt = powers(z);
    let at = powers(a);
    let cutoff = zt
        .iter()
        .chain(&at)
        .map(SeriesElem::precision)
        .min()
        .expect("nonempty");
    let mut exps: Vec<Exp> = zt
        .iter()
        .chain(&at)
        .flat_map(|x| x.terms().iter().map(|(g, _)| *g))
        .filter(|g| Value::Finite(*g) < cutoff && !(allow_torsion && *g == Exp::from_integer(0)))
        .collect();
    exps.sort();
    exps.dedup();
    let mut big = m;
    for x in zt.iter().chain(&at) {
        for (_, c) in x.terms() {
            big = tw.compositum(big, c.degree())?;
        }
    }
    let g = tw.generator(m)?;
    let basis: Vec<FieldElem> = (0..m).map(|k| tw.pow(&g, k as u128)).collect();
    // unknowns: r_i and s_i in F_{p^m}, m prime-field coordinates each
    let mut cols = Vec::new();
    for (series, sign) in [(&zt, false), (&at, true)] {
        for x in series.iter() {
            for b in &basis {
                let mut col = Vec::with_capacity(exps.len() * big);
                for gamma in &exps {
                    let c = sm.residue_at(x, gamma)?;
                    let (c, bb) = tw.align(&c, b)?;
                    let mut v = tw.embed_lift(&tw.mul(&c, &bb), big)?;
                    if sign {
                        v = tw.neg(&v);
                    }
                    col.extend_from_slice(v.coeffs());
                }
                cols.push(col);
            }
        }
    }
    let rows = exps.len() * big;
    let kernel = FpMatrix::from_columns(tw.p(), rows, &cols).kernel();
    let half = (d + 1) * m;
    let Some(v) = kernel.iter().find(|v| v[..half].iter().any(|&c| c != 0)) else {
        return Ok(None);
    };
    let poly = |coords: &[u32]| -> Result<SkewPoly> {
        let coeffs = coords
            .chunks(m)
            .map(|ch| tw.from_coeffs(m, ch))
            .collect::<Result<Vec<_>>>()?;
        ring.from_coeffs_in(m, coeffs)
    };
    let (r, unit) = ring.make_monic(&poly(&v[..half])?)?;
    let s = ring.mul_scalar_right(&poly(&v[half..])?, &tw.inv(&unit)?);
    let diff = sm.truncate(&sm.sub(&sm.act(z, &r)?, &sm.act(a, &s)?)?, cutoff);
    let constant = diff
        .terms()
        .iter()
        .all(|(g, _)| *g == Exp::from_integer(0) && allow_torsion);
    if !constant {
        return Err(Error::PrecisionExhausted(
            "hull witness does not verify below the common precision".into(),
        ));
    }
    let torsion = match diff.terms().first() {
        Some((_, c)) => c.clone(),
        None => tw.zero(1),
    };
    Ok(Some(HullWitness { r, s, torsion }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Tower;
    use crate::series::SeriesModel;
    use crate::text::{parse_poly, parse_series};

    #[test]
    fn counterexample_over_f2() {
        let tw = Tower::new(2, 1, 24).unwrap();
        let sv = Solver::new(SeriesModel::new(&tw, 8, 64));
        let cert = run_counterexample(&sv).unwrap();
        assert!(cert.pass(), "{cert}");
        assert_eq!(cert.checks.len(), 6);
        assert_eq!(cert.lines()[0], "one-is-torsion: PASS: 1.r = 0");
        assert_eq!(cert.lines()[1], "shifted-image: PASS: x = u + u^2, y.r = u + u^2");
        assert_eq!(cert.lines()[2], "solution-set: PASS: {u, 1 + u}");
        assert_eq!(cert.lines()[3], "unique-positive: PASS: valuations [1, 0]");
        assert_eq!(cert, run_counterexample(&sv).unwrap());
    }

    #[test]
    fn counterexample_over_f3() {
        let tw = Tower::new(3, 1, 12).unwrap();
        let sv = Solver::new(SeriesModel::new(&tw, 6, 64));
        let cert = run_counterexample(&sv).unwrap();
        assert!(cert.pass(), "{cert}");
        assert_eq!(cert.lines()[2], "solution-set: PASS: {u, 1 + u, 2 + u}");
        assert_eq!(cert.lines()[3], "unique-positive: PASS: valuations [1, 0, 0]");
    }

    #[test]
    fn hull_examples() {
        let tw = Tower::new(2, 1, 12).unwrap();
        let sm = SeriesModel::new(&tw, 8, 64);
        let sv = Solver::new(sm);
        let a = parse_series(&sm, "1 + u").unwrap();
        let w = hull_contains_bounded(&sv, &a, &a, 1, 2).unwrap().unwrap();
        assert_eq!((w.r.clone(), w.s.clone()), (parse_poly(&tw, "1").unwrap(), parse_poly(&tw, "1").unwrap()));
        let w = hull_contains_bounded(&sv, &a, &sm.u(), 1, 1).unwrap().unwrap();
        let t1 = parse_poly(&tw, "t + 1").unwrap();
        assert_eq!((w.r, w.s), (t1.clone(), t1));
        assert!(w.torsion.is_zero());
        let half = parse_series(&sm, "u^(1/2)").unwrap();
        let w = hull_contains_bounded(&sv, &sm.u(), &half, 1, 1).unwrap().unwrap();
        assert_eq!((w.r, w.s), (parse_poly(&tw, "t").unwrap(), parse_poly(&tw, "1").unwrap()));
        let w = hull_contains_bounded(&sv, &a, &sm.u(), 1, 0).unwrap().unwrap();
        assert_eq!(w.torsion, tw.one(1));
        let far = parse_series(&sm, "u^(1/3)");
        assert!(far.is_err());
        let other = parse_series(&sm, "u^(1/4) + u^(3/8)").unwrap();
        assert_eq!(hull_contains_bounded(&sv, &sm.u(), &other, 1, 1).unwrap(), None);
    }
}

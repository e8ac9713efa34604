//! A concrete henselian divisible valued module: truncated generalized
//! Laurent series `sum c_gamma u^gamma` with coefficients in the field tower
//! and exponents in `Z[1/p]`.
//!
//! The ring acts by `x.t = x^{p^s}` (exponents times `p^s`, coefficients
//! through Frobenius) and `x.lambda = x * lambda`. Valuations live in
//! `Z[1/p] ∪ {inf}` with `tau(gamma) = p^s gamma` and fixed point
//! `theta = 0`. Constants are exactly the torsion elements.

use std::fmt;

use num_rational::Ratio;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::field::{FieldElem, Tower};
use crate::skew::SkewPoly;

pub mod chain;

pub use chain::{Axiom, FiniteTauChain, Violation};

/// Default absolute precision cutoff.
pub const DEFAULT_PRECISION: i64 = 64;
/// Default bound `k` on exponent denominators `p^k`.
pub const DEFAULT_K_MAX: u32 = 8;

pub type Exp = Ratio<i64>;

/// An element of `Z[1/p] ∪ {inf}`; `Finite < Infinity`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Finite(Exp),
    Infinity,
}

impl Value {
    pub fn int(v: i64) -> Value {
        Value::Finite(Exp::from_integer(v))
    }

    pub fn finite(&self) -> Option<Exp> {
        match self {
            Value::Finite(g) => Some(*g),
            Value::Infinity => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Value::Finite(_))
    }

    /// `tau^k(self)` for `tau(gamma) = q gamma`.
    pub fn tau_pow(&self, q: i64, k: u32) -> Value {
        match self {
            Value::Finite(g) => Value::Finite(*g * Exp::from_integer(q.pow(k))),
            Value::Infinity => Value::Infinity,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Finite(g) => write!(f, "{}", crate::text::format_ratio(g)),
            Value::Infinity => write!(f, "inf"),
        }
    }
}

/// `sum c_gamma u^gamma + O(u^precision)`; `precision = Infinity` means the
/// series is exact. Exponents are strictly increasing and below the
/// precision, coefficients are nonzero and stored in their least field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesElem {
    terms: Vec<(Exp, FieldElem)>,
    precision: Value,
}

impl SeriesElem {
    pub fn terms(&self) -> &[(Exp, FieldElem)] {
        &self.terms
    }

    pub fn precision(&self) -> Value {
        self.precision
    }

    pub fn is_exact(&self) -> bool {
        self.precision == Value::Infinity
    }

    /// No known nonzero term (zero up to the precision).
    pub fn is_zero_known(&self) -> bool {
        self.terms.is_empty()
    }

    /// The least known exponent, or the precision when none is known; a
    /// lower bound for the valuation.
    pub fn valuation_bound(&self) -> Value {
        self.terms
            .first()
            .map(|(g, _)| Value::Finite(*g))
            .unwrap_or(self.precision)
    }

    /// Exact valuation; `Indeterminate` when every known term vanishes but
    /// the series is not exact.
    pub fn valuation(&self) -> Result<Value> {
        match (self.terms.first(), self.precision) {
            (Some((g, _)), _) => Ok(Value::Finite(*g)),
            (None, Value::Infinity) => Ok(Value::Infinity),
            (None, n) => Err(Error::Indeterminate(n.to_string())),
        }
    }

    /// Constant term support only.
    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|(g, _)| g.is_zero())
    }
}

/// `(x_tor, x_theta, x_pos, x_neg)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub torsion: SeriesElem,
    pub theta: SeriesElem,
    pub positive: SeriesElem,
    pub negative: SeriesElem,
}

/// Operations of the series module over one tower.
#[derive(Clone, Copy, Debug)]
pub struct SeriesModel<'t> {
    tower: &'t Tower,
    k_max: u32,
    precision: i64,
}

impl<'t> SeriesModel<'t> {
    pub fn new(tower: &'t Tower, k_max: u32, precision: i64) -> Self {
        SeriesModel {
            tower,
            k_max,
            precision,
        }
    }

    pub fn tower(&self) -> &'t Tower {
        self.tower
    }

    pub fn k_max(&self) -> u32 {
        self.k_max
    }

    /// Default working precision `N`.
    pub fn precision(&self) -> i64 {
        self.precision
    }

    pub fn working_precision(&self) -> Value {
        Value::int(self.precision)
    }

    /// `p^s`.
    pub fn q(&self) -> i64 {
        self.tower.q()
    }

    pub fn tau(&self, v: Value) -> Value {
        v.tau_pow(self.q(), 1)
    }

    /// Rejects exponents whose denominator is not `p^k` with `k <= k_max`.
    pub fn check_exponent(&self, g: &Exp) -> Result<()> {
        let mut d = *g.denom();
        let p = self.tower.p() as i64;
        let mut k = 0;
        while d % p == 0 {
            d /= p;
            k += 1;
        }
        if d != 1 {
            return Err(Error::InvalidConfig(format!(
                "exponent {} has a denominator prime to {p}",
                crate::text::format_ratio(g)
            )));
        }
        if k > self.k_max {
            return Err(Error::DenominatorBudget { k_max: self.k_max });
        }
        Ok(())
    }

    pub fn zero(&self) -> SeriesElem {
        SeriesElem {
            terms: Vec::new(),
            precision: Value::Infinity,
        }
    }

    /// Zero known up to `u^precision`.
    pub fn zero_to(&self, precision: Value) -> SeriesElem {
        SeriesElem {
            terms: Vec::new(),
            precision,
        }
    }

    pub fn constant(&self, c: FieldElem) -> SeriesElem {
        self.monomial(Exp::zero(), c)
    }

    /// `c u^gamma`, exact.
    pub fn monomial(&self, gamma: Exp, c: FieldElem) -> SeriesElem {
        self.build(vec![(gamma, c)], Value::Infinity)
    }

    /// `u`, exact.
    pub fn u(&self) -> SeriesElem {
        self.monomial(Exp::from_integer(1), self.tower.one(1))
    }

    /// Checked constructor from arbitrary terms (merged and normalized).
    pub fn from_terms(&self, terms: Vec<(Exp, FieldElem)>, precision: Value) -> Result<SeriesElem> {
        for (g, _) in &terms {
            self.check_exponent(g)?;
        }
        if let Value::Finite(n) = precision {
            self.check_exponent(&n)?;
        }
        let mut acc = self.zero_to(precision);
        for (g, c) in terms {
            acc = self.add(&acc, &self.monomial(g, c))?;
        }
        Ok(acc)
    }

    /// Normalizes sorted-or-not terms: merge equal exponents, drop zeros and
    /// everything at or above the precision, descend coefficients.
    fn build(&self, mut terms: Vec<(Exp, FieldElem)>, precision: Value) -> SeriesElem {
        terms.sort_by(|a, b| a.0.cmp(&b.0));
        let mut out: Vec<(Exp, FieldElem)> = Vec::with_capacity(terms.len());
        for (g, c) in terms {
            if Value::Finite(g) >= precision {
                break;
            }
            match out.last_mut() {
                Some((h, d)) if *h == g => {
                    let (a, b) = self.tower.align(d, &c).expect("coefficient fields are admitted");
                    *d = self.tower.add(&a, &b);
                }
                _ => out.push((g, c)),
            }
        }
        let terms = out
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(g, c)| {
                let c = self.tower.descend(&c).expect("descending stays admitted");
                (g, c)
            })
            .collect();
        SeriesElem { terms, precision }
    }

    /// Cuts `x` down to precision `n`.
    pub fn truncate(&self, x: &SeriesElem, n: Value) -> SeriesElem {
        self.build(x.terms.clone(), x.precision.min(n))
    }

    pub fn add(&self, x: &SeriesElem, y: &SeriesElem) -> Result<SeriesElem> {
        let mut terms = x.terms.clone();
        terms.extend(y.terms.iter().cloned());
        for (_, c) in &terms {
            self.tower.check_degree(c.degree())?;
        }
        let (mut m, mut same) = (0usize, true);
        for (_, c) in &terms {
            if m == 0 {
                m = c.degree();
            } else if c.degree() != m {
                same = false;
            }
        }
        if !same {
            // fail early when coefficient fields have no admitted compositum
            let mut acc = 1;
            for (_, c) in &terms {
                acc = self.tower.compositum(acc, c.degree())?;
            }
        }
        Ok(self.build(terms, x.precision.min(y.precision)))
    }

    pub fn neg(&self, x: &SeriesElem) -> SeriesElem {
        SeriesElem {
            terms: x
                .terms
                .iter()
                .map(|(g, c)| (*g, self.tower.neg(c)))
                .collect(),
            precision: x.precision,
        }
    }

    pub fn sub(&self, x: &SeriesElem, y: &SeriesElem) -> Result<SeriesElem> {
        self.add(x, &self.neg(y))
    }

    /// `x . lambda`.
    pub fn scale(&self, x: &SeriesElem, lambda: &FieldElem) -> Result<SeriesElem> {
        if lambda.is_zero() {
            return Ok(self.zero());
        }
        let mut terms = Vec::with_capacity(x.terms.len());
        for (g, c) in &x.terms {
            let (a, b) = self.tower.align(c, lambda)?;
            terms.push((*g, self.tower.mul(&a, &b)));
        }
        Ok(self.build(terms, x.precision))
    }

    /// `x . t`.
    pub fn act_t(&self, x: &SeriesElem) -> SeriesElem {
        let q = Exp::from_integer(self.q());
        SeriesElem {
            terms: x
                .terms
                .iter()
                .map(|(g, c)| (*g * q, self.tower.frob_pow(c, 1)))
                .collect(),
            precision: self.tau(x.precision),
        }
    }

    /// `x . r = sum (x . t^i) a_i`; the precision is the least `tau^i(N)`
    /// over nonzero `a_i`.
    pub fn act(&self, x: &SeriesElem, r: &SkewPoly) -> Result<SeriesElem> {
        let mut acc = self.zero();
        let mut xt = x.clone();
        for (i, a) in r.coeffs().iter().enumerate() {
            if i > 0 {
                xt = self.act_t(&xt);
            }
            if a.is_zero() {
                continue;
            }
            acc = self.add(&acc, &self.scale(&xt, a)?)?;
            acc.precision = acc.precision.min(xt.precision);
            acc = self.truncate(&acc, acc.precision);
        }
        Ok(acc)
    }

    /// Coefficient of `u^gamma`.
    pub fn residue_at(&self, x: &SeriesElem, gamma: &Exp) -> Result<FieldElem> {
        if Value::Finite(*gamma) >= x.precision {
            return Err(Error::PrecisionExhausted(format!(
                "residue at {} beyond precision {}",
                crate::text::format_ratio(gamma),
                x.precision
            )));
        }
        Ok(x.terms
            .iter()
            .find(|(g, _)| g == gamma)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(|| self.tower.zero(1)))
    }

    /// Whether `|M_{>=gamma} / M_{>gamma}| >= n`. Every such quotient is the
    /// additive group of the whole tower, so this always holds in this model.
    pub fn ball_quotient_at_least(&self, gamma: &Exp, n: u128) -> bool {
        let _ = (gamma, n);
        true
    }

    /// Splits off the constant, positive and negative parts; the valuation
    /// `theta` part is always zero here.
    pub fn decompose(&self, x: &SeriesElem) -> Decomposition {
        let pick = |f: &dyn Fn(&Exp) -> bool, precision: Value| SeriesElem {
            terms: x.terms.iter().filter(|(g, _)| f(g)).cloned().collect(),
            precision,
        };
        let zero = Value::int(0);
        let n = x.precision;
        // a cutoff above 0 leaves the constant and negative parts exact
        let (tor, neg) = if n > zero {
            (Value::Infinity, Value::Infinity)
        } else {
            (zero, n)
        };
        Decomposition {
            torsion: pick(&|g| g.is_zero(), tor),
            theta: self.zero(),
            positive: pick(&|g| g.is_positive(), n.max(zero)),
            negative: pick(&|g| g.is_negative(), neg),
        }
    }

    /// Regularity of `x` (for every `r`, or for the given `r`).
    pub fn is_regular(&self, x: &SeriesElem, r: Option<&SkewPoly>) -> Result<bool> {
        let theta = Value::int(0);
        let Some(r) = r else {
            if x.terms.is_empty() {
                if x.precision > theta {
                    return Ok(true);
                }
                return Err(Error::Indeterminate(x.precision.to_string()));
            }
            return Ok(x.valuation()? != theta);
        };
        if x.terms.is_empty() && x.precision == Value::Infinity {
            return Ok(true);
        }
        let vx = x.valuation()?;
        let expected = r
            .coeffs()
            .iter()
            .enumerate()
            .filter(|(_, a)| !a.is_zero())
            .map(|(i, _)| vx.tau_pow(self.q(), i as u32))
            .min()
            .ok_or(Error::ZeroArgument)?;
        let y = self.act(x, r)?;
        match y.terms.first() {
            Some((g, _)) => Ok(Value::Finite(*g) == expected),
            None if y.precision > expected => Ok(false),
            None => Err(Error::Indeterminate(y.precision.to_string())),
        }
    }

    /// Torsion elements are the constants.
    pub fn is_torsion(&self, x: &SeriesElem) -> bool {
        x.is_constant()
    }
}

fn format_exp(g: &Exp) -> String {
    if g.is_integer() && !g.is_negative() {
        g.numer().to_string()
    } else {
        format!("({})", crate::text::format_ratio(g))
    }
}

impl fmt::Display for SeriesElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self
            .terms
            .iter()
            .map(|(g, c)| {
                let mono = if g.is_zero() {
                    None
                } else if *g == Exp::from_integer(1) {
                    Some("u".to_string())
                } else {
                    Some(format!("u^{}", format_exp(g)))
                };
                match mono {
                    None => c.to_string(),
                    Some(m) if c.is_one() && c.degree() == 1 => m,
                    Some(m) => format!("{c}*{m}"),
                }
            })
            .collect();
        if let Value::Finite(n) = self.precision {
            parts.push(format!("O(u^{})", format_exp(&n)));
        }
        if parts.is_empty() {
            return write!(f, "0");
        }
        write!(f, "{}", parts.join(" + "))
    }
}

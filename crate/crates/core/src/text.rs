//! Text syntaxes for field elements, skew polynomials, series, p.p. formulas,
//! theory descriptors and finite chains.
//!
//! Printers produce exactly what the parsers accept, so every value
//! round-trips.

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::field::{FieldElem, Tower};
use crate::hensel::Eta;
use crate::pp::{MatrixOverR, PPFormula, TheoryDescriptor};
use crate::series::{FiniteTauChain, SeriesElem, SeriesModel, Value};
use crate::skew::{SkewPoly, SkewRing};

pub(crate) struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    pub(crate) fn new(src: &'a str) -> Self {
        Cursor { src, pos: 0 }
    }

    pub(crate) fn pos(&self) -> usize {
        self.pos
    }

    pub(crate) fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::parse(self.pos, msg))
    }

    pub(crate) fn skip_ws(&mut self) {
        while let Some(c) = self.rest().chars().next() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    pub(crate) fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    pub(crate) fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.rest().chars().next()
    }

    pub(crate) fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    pub(crate) fn eat_str(&mut self, s: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    pub(crate) fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected '{c}'"))
        }
    }

    pub(crate) fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    pub(crate) fn finish(&mut self) -> Result<()> {
        if self.at_end() {
            Ok(())
        } else {
            self.err("unexpected trailing input")
        }
    }

    pub(crate) fn number(&mut self) -> Result<u64> {
        self.skip_ws();
        let digits: String = self.rest().chars().take_while(char::is_ascii_digit).collect();
        if digits.is_empty() {
            return self.err("expected a number");
        }
        let v = digits
            .parse::<u64>()
            .or_else(|_| self.err("number out of range"))?;
        self.pos += digits.len();
        Ok(v)
    }

    pub(crate) fn signed(&mut self) -> Result<i64> {
        let neg = self.eat('-');
        let v = self.number()? as i64;
        Ok(if neg { -v } else { v })
    }

    pub(crate) fn ident(&mut self) -> String {
        self.skip_ws();
        let id: String = self
            .rest()
            .chars()
            .take_while(|c| c.is_ascii_alphanumeric() || *c == '_')
            .collect();
        self.pos += id.len();
        id
    }
}

/// `[c_k g^k + ... + c_0]@m` or a bare residue.
pub(crate) fn field_elem(cur: &mut Cursor, tw: &Tower) -> Result<FieldElem> {
    match cur.peek() {
        Some('[') => {}
        Some(c) if c.is_ascii_digit() => {
            let v = cur.number()?;
            return Ok(tw.residue((v % tw.p() as u64) as i64, 1));
        }
        _ => return cur.err("expected a field element"),
    }
    cur.expect('[')?;
    let inner_start = cur.pos();
    // collect (sign, coefficient, power of g) and evaluate once m is known
    let mut terms: Vec<(bool, u64, u64)> = Vec::new();
    let mut first = true;
    loop {
        let neg = if cur.eat('-') {
            true
        } else if first || cur.eat('+') {
            false
        } else {
            break;
        };
        first = false;
        let mut coef = 1u64;
        let mut saw_coef = false;
        if cur.peek().is_some_and(|c| c.is_ascii_digit()) {
            coef = cur.number()?;
            saw_coef = true;
            cur.eat('*');
        }
        let mut power = 0u64;
        if cur.eat('g') {
            power = 1;
            if cur.eat('^') {
                power = cur.number()?;
            }
        } else if !saw_coef {
            return Err(Error::parse(inner_start, "empty field element term"));
        }
        terms.push((neg, coef, power));
    }
    cur.expect(']')?;
    cur.expect('@')?;
    let m = cur.number()? as usize;
    tw.check_degree(m)?;
    let g = tw.generator(m)?;
    let mut acc = tw.zero(m);
    for (neg, coef, power) in terms {
        let c = (coef % tw.p() as u64) as u32;
        let mut term = tw.scale(&tw.pow(&g, power as u128), c);
        if neg {
            term = tw.neg(&term);
        }
        acc = tw.add(&acc, &term);
    }
    Ok(acc)
}

pub fn parse_field_elem(tw: &Tower, s: &str) -> Result<FieldElem> {
    let mut cur = Cursor::new(s);
    let x = field_elem(&mut cur, tw)?;
    cur.finish()?;
    Ok(x)
}

enum Factor {
    T(usize),
    C(FieldElem),
}

fn factors(cur: &mut Cursor, tw: &Tower) -> Result<Vec<Factor>> {
    let mut factors = Vec::new();
    loop {
        match cur.peek() {
            Some('t') => {
                cur.eat('t');
                let mut e = 1;
                if cur.eat('^') {
                    e = cur.number()? as usize;
                }
                factors.push(Factor::T(e));
            }
            Some('[') => factors.push(Factor::C(field_elem(cur, tw)?)),
            Some(c) if c.is_ascii_digit() => factors.push(Factor::C(field_elem(cur, tw)?)),
            Some('(') => {
                return cur.err("parenthesised sub-expressions are not polynomials");
            }
            _ => return cur.err("expected 't' or a coefficient"),
        }
        if !cur.eat('*') {
            return Ok(factors);
        }
    }
}

fn evaluate(
    tw: &Tower,
    start: usize,
    terms: Vec<(bool, Vec<Factor>)>,
    min_m: usize,
) -> Result<SkewPoly> {
    let mut m = min_m;
    for (_, fs) in &terms {
        for f in fs {
            if let Factor::C(c) = f {
                m = tw
                    .compositum(m, c.degree())
                    .map_err(|_| Error::parse(start, "coefficient fields have no admitted compositum"))?;
            }
        }
    }
    let ring = SkewRing::new(tw);
    let mut acc = ring.zero(m);
    for (neg, fs) in terms {
        let mut term = ring.one(m);
        for f in fs {
            let factor = match f {
                Factor::T(e) => ring.monomial(e, tw.one(m)),
                Factor::C(c) => ring.constant(tw.embed_lift(&c, m)?),
            };
            term = ring.mul(&term, &factor);
        }
        acc = if neg {
            ring.sub(&acc, &term)
        } else {
            ring.add(&acc, &term)
        };
    }
    Ok(acc)
}

/// Parses a sum of products of `t`, `t^i` and field elements; products are
/// evaluated in the ring, so `[g]@2*t` means `t*[g+1]@2`.
pub(crate) fn poly_in(cur: &mut Cursor, tw: &Tower, min_m: usize) -> Result<SkewPoly> {
    let start = cur.pos();
    let mut terms: Vec<(bool, Vec<Factor>)> = Vec::new();
    let mut first = true;
    loop {
        let neg = if cur.eat('-') {
            true
        } else if first || cur.eat('+') {
            false
        } else {
            break;
        };
        first = false;
        terms.push((neg, factors(cur, tw)?));
    }
    evaluate(tw, start, terms, min_m)
}

/// A parenthesised polynomial or a single product.
fn coefficient(cur: &mut Cursor, tw: &Tower) -> Result<SkewPoly> {
    if cur.eat('(') {
        let q = poly_in(cur, tw, 1)?;
        cur.expect(')')?;
        Ok(q)
    } else {
        let start = cur.pos();
        let fs = factors(cur, tw)?;
        evaluate(tw, start, vec![(false, fs)], 1)
    }
}

pub fn parse_poly(tw: &Tower, s: &str) -> Result<SkewPoly> {
    parse_poly_in(tw, s, 1)
}

/// Parses over the compositum of `F_{p^m}` and the written coefficients.
pub fn parse_poly_in(tw: &Tower, s: &str, m: usize) -> Result<SkewPoly> {
    let mut cur = Cursor::new(s);
    if cur.eat_str("0") && cur.at_end() {
        return Ok(SkewRing::new(tw).zero(m));
    }
    let mut cur = Cursor::new(s);
    let q = poly_in(&mut cur, tw, m)?;
    cur.finish()?;
    Ok(q)
}

/// Highest degree first; unit coefficients are omitted except on the lowest
/// term of a polynomial over a proper extension, which keeps the field
/// degree visible.
pub fn format_poly(q: &SkewPoly) -> String {
    if q.is_zero() {
        return if q.k_degree() == 1 {
            "0".into()
        } else {
            format!("[0]@{}", q.k_degree())
        };
    }
    let lowest = q.t_adic_order().expect("nonzero");
    let mut parts = Vec::new();
    for (i, c) in q.coeffs().iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let keep_unit = i == lowest && q.k_degree() > 1;
        let coef = if c.is_one() && !keep_unit {
            None
        } else {
            Some(c.to_string())
        };
        parts.push(match (i, coef) {
            (0, Some(c)) => c,
            (0, None) => "1".into(),
            (1, None) => "t".into(),
            (1, Some(c)) => format!("t*{c}"),
            (_, None) => format!("t^{i}"),
            (_, Some(c)) => format!("t^{i}*{c}"),
        });
    }
    parts.join(" + ")
}

/// `a/b`, `-a` or `a`.
pub(crate) fn rational(cur: &mut Cursor) -> Result<Ratio<i64>> {
    let num = cur.signed()?;
    let den = if cur.eat('/') {
        let d = cur.number()? as i64;
        if d == 0 {
            return cur.err("zero denominator");
        }
        d
    } else {
        1
    };
    Ok(Ratio::new(num, den))
}

pub(crate) fn format_ratio(r: &Ratio<i64>) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// `u`, `u^2`, `u^(-1)`, `u^(3/4)` after the `u` has been consumed.
fn u_exponent(cur: &mut Cursor) -> Result<Ratio<i64>> {
    if !cur.eat('^') {
        return Ok(Ratio::from_integer(1));
    }
    if cur.eat('(') {
        let r = rational(cur)?;
        cur.expect(')')?;
        Ok(r)
    } else {
        Ok(Ratio::from_integer(cur.number()? as i64))
    }
}

/// Terms `coef*u^e` joined by `+`/`-`, optionally ending in `O(u^N)`.
pub(crate) fn series_in(cur: &mut Cursor, model: &SeriesModel) -> Result<SeriesElem> {
    let tw = model.tower();
    let mut terms = Vec::new();
    let mut precision = Value::Infinity;
    let mut first = true;
    loop {
        let neg = if cur.eat('-') {
            true
        } else if first || cur.eat('+') {
            false
        } else {
            break;
        };
        first = false;
        if cur.eat('O') {
            cur.expect('(')?;
            if !cur.eat('u') {
                return cur.err("expected 'u' in O-term");
            }
            precision = Value::Finite(u_exponent(cur)?);
            cur.expect(')')?;
            break;
        }
        let mut coef = tw.one(1);
        let mut exp = Ratio::from_integer(0);
        loop {
            match cur.peek() {
                Some('u') => {
                    cur.eat('u');
                    exp += u_exponent(cur)?;
                }
                Some(c) if c == '[' || c.is_ascii_digit() => {
                    let c = field_elem(cur, tw)?;
                    let (a, b) = tw
                        .align(&coef, &c)
                        .or_else(|_| cur.err("coefficient fields have no admitted compositum"))?;
                    coef = tw.mul(&a, &b);
                }
                _ => return cur.err("expected 'u' or a coefficient"),
            }
            if !cur.eat('*') {
                break;
            }
        }
        if neg {
            coef = tw.neg(&coef);
        }
        terms.push((exp, coef));
    }
    let pos = cur.pos();
    model.from_terms(terms, precision).map_err(|e| match e {
        Error::MmaxExceeded { .. } | Error::DenominatorBudget { .. } => e,
        other => Error::parse(pos, other.to_string()),
    })
}

pub fn parse_series(model: &SeriesModel, s: &str) -> Result<SeriesElem> {
    let mut cur = Cursor::new(s);
    if cur.eat_str("0") && cur.at_end() {
        return Ok(model.zero());
    }
    let mut cur = Cursor::new(s);
    let x = series_in(&mut cur, model)?;
    cur.finish()?;
    Ok(x)
}

pub fn format_series(x: &SeriesElem) -> String {
    x.to_string()
}

/// Whitespace-separated points in ascending order, `label` or
/// `label>image`; `inf` names the top point.
pub fn parse_chain(s: &str) -> Result<FiniteTauChain> {
    let mut labels = Vec::new();
    let mut tau = Vec::new();
    let mut offset = 0;
    for tok in s.split_whitespace() {
        let at = s[offset..].find(tok).map(|i| i + offset).unwrap_or(offset);
        offset = at + tok.len();
        let (label, image) = match tok.split_once('>') {
            Some((a, b)) => (a, Some(b)),
            None => (tok, None),
        };
        if label.is_empty() || image.is_some_and(str::is_empty) {
            return Err(Error::parse(at, "empty chain point"));
        }
        labels.push(label.to_string());
        if let Some(b) = image {
            tau.push((label.to_string(), b.to_string()));
        }
    }
    FiniteTauChain::new(labels, &tau).map_err(|e| Error::parse(0, e.to_string()))
}

/// `x<i>` or `y<i>`, 1-based.
fn variable(cur: &mut Cursor) -> Result<(char, usize)> {
    let at = cur.pos();
    let id = cur.ident();
    let mut chars = id.chars();
    let kind = chars.next();
    let idx = chars.as_str().parse::<usize>().ok().filter(|&i| i > 0);
    match (kind, idx) {
        (Some(k @ ('x' | 'y')), Some(i)) => Ok((k, i)),
        _ => Err(Error::parse(at, format!("expected a variable x1, y1, ..., found '{id}'"))),
    }
}

/// One side of an equation: `0` or signed terms `var` / `var*coef`.
fn side(cur: &mut Cursor, tw: &Tower) -> Result<Vec<(char, usize, SkewPoly)>> {
    let mut out = Vec::new();
    if cur.peek() == Some('0') {
        cur.eat('0');
        return Ok(out);
    }
    let ring = SkewRing::new(tw);
    let mut first = true;
    loop {
        let neg = if cur.eat('-') {
            true
        } else if first || cur.eat('+') {
            false
        } else {
            return Ok(out);
        };
        first = false;
        let (k, i) = variable(cur)?;
        let mut c = if cur.eat('*') {
            coefficient(cur, tw)?
        } else {
            ring.one(1)
        };
        if neg {
            c = ring.neg(&c);
        }
        out.push((k, i, c));
    }
}

/// `EX y1,...,yk : lhs = rhs ; ...` where each side is `0` or a sum of
/// `var*coef` terms, `coef` a parenthesised polynomial or a single product.
/// The `EX ... :` prefix may be omitted when nothing is bound; the free
/// variables are `x1..xn` for the largest index `n` used (at least 1).
pub fn parse_pp(tw: &Tower, src: &str) -> Result<PPFormula> {
    let ring = SkewRing::new(tw);
    let mut cur = Cursor::new(src);
    let mut bound = 0;
    if cur.eat_str("EX") {
        if cur.peek() != Some(':') {
            loop {
                let at = cur.pos();
                let (k, i) = variable(&mut cur)?;
                if k != 'y' || i != bound + 1 {
                    return Err(Error::parse(at, format!("expected y{}", bound + 1)));
                }
                bound += 1;
                if !cur.eat(',') {
                    break;
                }
            }
        }
        cur.expect(':')?;
    }
    let mut equations = Vec::new();
    loop {
        let lhs = side(&mut cur, tw)?;
        cur.expect('=')?;
        let rhs = side(&mut cur, tw)?;
        equations.push((cur.pos(), lhs, rhs));
        if !cur.eat(';') {
            break;
        }
    }
    cur.finish()?;
    let mut free = 1;
    let mut m = 1;
    for (at, lhs, rhs) in &equations {
        for (k, i, c) in lhs.iter().chain(rhs) {
            if *k == 'y' && *i > bound {
                return Err(Error::parse(*at, format!("y{i} is not bound")));
            }
            if *k == 'x' {
                free = free.max(*i);
            }
            m = tw
                .compositum(m, c.k_degree())
                .map_err(|e| Error::parse(*at, e.to_string()))?;
        }
    }
    let cols = equations.len();
    let mut a = vec![ring.zero(m); bound * cols];
    let mut b = vec![ring.zero(m); free * cols];
    for (j, (_, lhs, rhs)) in equations.iter().enumerate() {
        for (on_left, terms) in [(true, lhs), (false, rhs)] {
            for (k, i, c) in terms {
                let c = ring.lift(c, m)?;
                // y terms belong on the left, x terms on the right
                let (slot, keep) = match k {
                    'y' => (&mut a[(i - 1) * cols + j], on_left),
                    _ => (&mut b[(i - 1) * cols + j], !on_left),
                };
                *slot = if keep { ring.add(slot, &c) } else { ring.sub(slot, &c) };
            }
        }
    }
    PPFormula::new(
        &ring,
        MatrixOverR::new(&ring, m, bound, cols, a)?,
        MatrixOverR::new(&ring, m, free, cols, b)?,
    )
}

fn format_side(name: char, column: &[SkewPoly]) -> String {
    let terms: Vec<String> = column
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| {
            if c.k_degree() == 1 && c.degree() == Some(0) && c.coeffs()[0].is_one() {
                format!("{name}{}", i + 1)
            } else {
                format!("{name}{}*({})", i + 1, format_poly(c))
            }
        })
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

pub fn format_pp(phi: &PPFormula) -> String {
    let k = phi.bound_vars();
    let eqs: Vec<String> = (0..phi.equations())
        .map(|j| {
            format!(
                "{} = {}",
                format_side('y', &phi.a.column(j)),
                format_side('x', &phi.b.column(j))
            )
        })
        .collect();
    let vars: Vec<String> = (1..=k).map(|i| format!("y{i}")).collect();
    format!("EX {} : {}", vars.join(","), eqs.join(" ; "))
        .replace("EX  :", "EX :")
}

/// Reads the `p=`, `s=` and `m=` header lines of a descriptor file.
pub fn descriptor_field(src: &str) -> Result<(u32, u32, usize)> {
    let (mut p, mut s, mut m) = (None, None, None);
    let mut offset = 0;
    for line in src.lines() {
        let at = offset;
        offset += line.len() + 1;
        let line = line.trim();
        let num = |v: &str| {
            v.trim()
                .parse::<u64>()
                .map_err(|_| Error::parse(at, format!("bad number '{}'", v.trim())))
        };
        if let Some(v) = line.strip_prefix("p=") {
            p = Some(num(v)? as u32);
        } else if let Some(v) = line.strip_prefix("s=") {
            s = Some(num(v)? as u32);
        } else if let Some(v) = line.strip_prefix("m=") {
            m = Some(num(v)? as usize);
        }
    }
    match (p, s, m) {
        (Some(p), Some(s), Some(m)) => Ok((p, s, m)),
        _ => Err(Error::parse(0, "descriptor needs p=, s= and m= lines")),
    }
}

/// Header lines `p=`, `s=`, `m=`, optional `valueset-tag=` and
/// `theta-realized=`, then one `polynomial -> count|inf` line per key.
/// Blank lines and `#` comments are ignored.
pub fn parse_descriptor(tw: &Tower, src: &str) -> Result<TheoryDescriptor> {
    let (p, s, m) = descriptor_field(src)?;
    if (p, s) != (tw.p(), tw.s()) {
        return Err(Error::FieldMismatch);
    }
    tw.check_degree(m)?;
    let ring = SkewRing::new(tw);
    let mut d = TheoryDescriptor {
        p,
        s,
        m,
        table: Default::default(),
        valueset_tag: None,
        theta_realized: None,
    };
    let mut offset = 0;
    for raw in src.lines() {
        let at = offset;
        offset += raw.len() + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() || ["p=", "s=", "m="].iter().any(|h| line.starts_with(h)) {
            continue;
        }
        if let Some(v) = line.strip_prefix("valueset-tag=") {
            d.valueset_tag = Some(v.trim().to_string());
        } else if let Some(v) = line.strip_prefix("theta-realized=") {
            d.theta_realized = Some(match v.trim() {
                "true" => true,
                "false" => false,
                other => return Err(Error::parse(at, format!("expected true or false, found '{other}'"))),
            });
        } else if let Some((key, val)) = line.split_once("->") {
            let key = parse_poly_in(tw, key.trim(), m).map_err(|e| match e {
                Error::Parse { pos, msg } => Error::parse(at + pos, msg),
                other => other,
            })?;
            let key = ring.lift(&key, m).map_err(|e| Error::parse(at, e.to_string()))?;
            let val = match val.trim() {
                "inf" => Eta::Infinite,
                v => Eta::Finite(
                    v.parse()
                        .map_err(|_| Error::parse(at, format!("bad count '{v}'")))?,
                ),
            };
            if d.table.insert(key, val).is_some() {
                return Err(Error::parse(at, "repeated key"));
            }
        } else {
            return Err(Error::parse(at, format!("unrecognised line '{line}'")));
        }
    }
    Ok(d)
}

pub fn format_descriptor(d: &TheoryDescriptor) -> String {
    let mut out = format!("p={}\ns={}\nm={}\n", d.p, d.s, d.m);
    if let Some(tag) = &d.valueset_tag {
        out.push_str(&format!("valueset-tag={tag}\n"));
    }
    if let Some(theta) = d.theta_realized {
        out.push_str(&format!("theta-realized={theta}\n"));
    }
    for (k, v) in &d.table {
        out.push_str(&format!("{} -> {v}\n", format_poly(k)));
    }
    out
}

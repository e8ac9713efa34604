//! The twisted polynomial ring `R = K[t; phi]` over a finite field
//! `K = F_{p^m}` of the tower.
//!
//! Elements are written `sum t^i a_i` with coefficients on the right and
//! multiply by the rule `a t = t phi(a)`. "`d` right-divides `q`" means
//! `q = d x` for some `x`; this is what [`SkewRing::right_divmod`] tests.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::field::{FieldElem, Tower};
use crate::linalg::FpMatrix;

pub mod generic;

/// Default degree bound for exhaustive factorization.
pub const DEFAULT_FACTOR_BOUND: usize = 8;
/// Cap on the number of candidate divisors tried by exhaustive searches.
pub const DEFAULT_DIVISOR_CAP: u128 = 1 << 22;

/// `sum t^i a_i` with all `a_i` in `F_{p^m}`; no trailing zero coefficient.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct SkewPoly {
    m: usize,
    coeffs: Vec<FieldElem>,
}

impl SkewPoly {
    /// Degree of the coefficient field.
    pub fn k_degree(&self) -> usize {
        self.m
    }

    pub fn coeffs(&self) -> &[FieldElem] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> Option<&FieldElem> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.lead().is_some_and(FieldElem::is_one)
    }

    /// Number of leading powers of `t` that can be split off on the left.
    pub fn t_adic_order(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn is_separable(&self) -> bool {
        self.t_adic_order() == Some(0)
    }
}

impl Ord for SkewPoly {
    /// Degree first (zero is least), then `(a_0, a_1, ...)` lexicographically.
    fn cmp(&self, other: &Self) -> Ordering {
        self.coeffs
            .len()
            .cmp(&other.coeffs.len())
            .then_with(|| self.m.cmp(&other.m))
            .then_with(|| self.coeffs.cmp(&other.coeffs))
    }
}

impl PartialOrd for SkewPoly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// `t^{t_power} * factors[0] * ... * factors[k-1] * unit`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub t_power: usize,
    pub factors: Vec<SkewPoly>,
    pub unit: FieldElem,
}

/// Arithmetic in `K[t; phi]` over the fields of one tower.
///
/// Binary operations expect both arguments over the same coefficient field;
/// use [`SkewRing::align`] first when they may differ.
#[derive(Clone, Copy, Debug)]
pub struct SkewRing<'t> {
    tower: &'t Tower,
    divisor_cap: u128,
}

impl<'t> SkewRing<'t> {
    pub fn new(tower: &'t Tower) -> Self {
        SkewRing {
            tower,
            divisor_cap: DEFAULT_DIVISOR_CAP,
        }
    }

    pub fn with_divisor_cap(mut self, cap: u128) -> Self {
        self.divisor_cap = cap;
        self
    }

    pub fn tower(&self) -> &'t Tower {
        self.tower
    }

    pub fn zero(&self, m: usize) -> SkewPoly {
        SkewPoly {
            m,
            coeffs: Vec::new(),
        }
    }

    pub fn one(&self, m: usize) -> SkewPoly {
        self.constant(self.tower.one(m))
    }

    pub fn t(&self, m: usize) -> SkewPoly {
        self.monomial(1, self.tower.one(m))
    }

    pub fn constant(&self, c: FieldElem) -> SkewPoly {
        self.monomial(0, c)
    }

    /// `t^i c`.
    pub fn monomial(&self, i: usize, c: FieldElem) -> SkewPoly {
        let m = c.degree();
        let mut coeffs = vec![self.tower.zero(m); i];
        coeffs.push(c);
        self.normalize(m, coeffs)
    }

    /// Builds `sum t^i coeffs[i]`, lifting every coefficient to their
    /// compositum.
    pub fn from_coeffs(&self, coeffs: Vec<FieldElem>) -> Result<SkewPoly> {
        let mut m = 1;
        for c in &coeffs {
            m = self.tower.compositum(m, c.degree())?;
        }
        self.from_coeffs_in(m, coeffs)
    }

    /// Builds `sum t^i coeffs[i]` over `F_{p^m}`.
    pub fn from_coeffs_in(&self, m: usize, coeffs: Vec<FieldElem>) -> Result<SkewPoly> {
        let lifted = coeffs
            .iter()
            .map(|c| self.tower.embed_lift(c, m))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.normalize(m, lifted))
    }

    fn normalize(&self, m: usize, mut coeffs: Vec<FieldElem>) -> SkewPoly {
        while coeffs.last().is_some_and(FieldElem::is_zero) {
            coeffs.pop();
        }
        SkewPoly { m, coeffs }
    }

    fn coeff(&self, a: &SkewPoly, i: usize) -> FieldElem {
        a.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(|| self.tower.zero(a.m))
    }

    /// Re-expresses `a` over `F_{p^m}`.
    pub fn lift(&self, a: &SkewPoly, m: usize) -> Result<SkewPoly> {
        if a.m == m {
            return Ok(a.clone());
        }
        self.from_coeffs_in(m, a.coeffs.clone())
    }

    /// Lifts both polynomials to the compositum of their coefficient fields.
    pub fn align(&self, a: &SkewPoly, b: &SkewPoly) -> Result<(SkewPoly, SkewPoly)> {
        let m = self.tower.compositum(a.m, b.m)?;
        Ok((self.lift(a, m)?, self.lift(b, m)?))
    }

    fn same(a: &SkewPoly, b: &SkewPoly) {
        assert_eq!(
            a.m, b.m,
            "skew polynomials over different fields; align them first"
        );
    }

    pub fn add(&self, a: &SkewPoly, b: &SkewPoly) -> SkewPoly {
        Self::same(a, b);
        let n = a.coeffs.len().max(b.coeffs.len());
        let coeffs = (0..n)
            .map(|i| self.tower.add(&self.coeff(a, i), &self.coeff(b, i)))
            .collect();
        self.normalize(a.m, coeffs)
    }

    pub fn sub(&self, a: &SkewPoly, b: &SkewPoly) -> SkewPoly {
        Self::same(a, b);
        let n = a.coeffs.len().max(b.coeffs.len());
        let coeffs = (0..n)
            .map(|i| self.tower.sub(&self.coeff(a, i), &self.coeff(b, i)))
            .collect();
        self.normalize(a.m, coeffs)
    }

    pub fn neg(&self, a: &SkewPoly) -> SkewPoly {
        SkewPoly {
            m: a.m,
            coeffs: a.coeffs.iter().map(|c| self.tower.neg(c)).collect(),
        }
    }

    /// `c_i = sum_{k+l=i} phi^l(a_k) b_l`.
    pub fn mul(&self, a: &SkewPoly, b: &SkewPoly) -> SkewPoly {
        Self::same(a, b);
        if a.is_zero() || b.is_zero() {
            return self.zero(a.m);
        }
        let tw = self.tower;
        let mut out = vec![tw.zero(a.m); a.coeffs.len() + b.coeffs.len() - 1];
        for (l, bl) in b.coeffs.iter().enumerate() {
            if bl.is_zero() {
                continue;
            }
            for (k, ak) in a.coeffs.iter().enumerate() {
                if ak.is_zero() {
                    continue;
                }
                let term = tw.mul(&tw.frob_pow(ak, l as i64), bl);
                out[k + l] = tw.add(&out[k + l], &term);
            }
        }
        self.normalize(a.m, out)
    }

    /// `a * lambda`.
    pub fn mul_scalar_right(&self, a: &SkewPoly, lambda: &FieldElem) -> SkewPoly {
        let coeffs = a.coeffs.iter().map(|c| self.tower.mul(c, lambda)).collect();
        self.normalize(a.m, coeffs)
    }

    /// `lambda * a = sum t^i phi^i(lambda) a_i`.
    pub fn mul_scalar_left(&self, lambda: &FieldElem, a: &SkewPoly) -> SkewPoly {
        let coeffs = a
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| self.tower.mul(&self.tower.frob_pow(lambda, i as i64), c))
            .collect();
        self.normalize(a.m, coeffs)
    }

    pub fn pow(&self, a: &SkewPoly, e: usize) -> SkewPoly {
        (0..e).fold(self.one(a.m), |acc, _| self.mul(&acc, a))
    }

    /// `(quot, rem)` with `q = d * quot + rem` and `deg rem < deg d`.
    pub fn right_divmod(&self, q: &SkewPoly, d: &SkewPoly) -> Result<(SkewPoly, SkewPoly)> {
        Self::same(q, d);
        let k = d.degree().ok_or(Error::DivisionByZero)?;
        let tw = self.tower;
        let lead = d.lead().expect("nonzero divisor");
        let mut rem = q.clone();
        let mut quot = vec![tw.zero(q.m); q.coeffs.len().saturating_sub(k)];
        while let Some(n) = rem.degree().filter(|&n| n >= k) {
            // d * t^{n-k} c has leading coefficient phi^{n-k}(lead) * c
            let scale = tw.frob_pow(lead, (n - k) as i64);
            let c = tw.div(rem.lead().expect("nonzero"), &scale)?;
            let step = self.mul(d, &self.monomial(n - k, c.clone()));
            quot[n - k] = tw.add(&quot[n - k], &c);
            rem = self.sub(&rem, &step);
        }
        Ok((self.normalize(q.m, quot), rem))
    }

    /// `(quot, rem)` with `q = quot * d + rem`; needs `phi` to be onto,
    /// which holds on finite fields.
    pub(crate) fn left_divmod(&self, q: &SkewPoly, d: &SkewPoly) -> Result<(SkewPoly, SkewPoly)> {
        Self::same(q, d);
        let k = d.degree().ok_or(Error::DivisionByZero)?;
        let tw = self.tower;
        let lead = d.lead().expect("nonzero divisor");
        let mut rem = q.clone();
        let mut quot = vec![tw.zero(q.m); q.coeffs.len().saturating_sub(k)];
        while let Some(n) = rem.degree().filter(|&n| n >= k) {
            // t^{n-k} c * d has leading coefficient phi^k(c) * lead
            let c = tw.frob_pow(&tw.div(rem.lead().expect("nonzero"), lead)?, -(k as i64));
            let step = self.mul(&self.monomial(n - k, c.clone()), d);
            quot[n - k] = tw.add(&quot[n - k], &c);
            rem = self.sub(&rem, &step);
        }
        Ok((self.normalize(q.m, quot), rem))
    }

    /// Whether `q = d x` for some `x`.
    pub fn right_divides(&self, d: &SkewPoly, q: &SkewPoly) -> Result<bool> {
        Ok(self.right_divmod(q, d)?.1.is_zero())
    }

    /// `(monic, unit)` with `a = monic * unit`.
    pub fn make_monic(&self, a: &SkewPoly) -> Result<(SkewPoly, FieldElem)> {
        let lead = a.lead().ok_or(Error::ZeroArgument)?.clone();
        let inv = self.tower.inv(&lead)?;
        Ok((self.mul_scalar_right(a, &inv), lead))
    }

    /// Monic common left factor of maximal degree.
    pub fn rgcd(&self, a: &SkewPoly, b: &SkewPoly) -> Result<SkewPoly> {
        Self::same(a, b);
        if a.is_zero() && b.is_zero() {
            return Err(Error::BothZero);
        }
        let (mut x, mut y) = (a.clone(), b.clone());
        while !y.is_zero() {
            let (_, r) = self.right_divmod(&x, &y)?;
            x = y;
            y = r;
        }
        Ok(self.make_monic(&x)?.0)
    }

    /// Monic common right multiple `a x = b y` of least degree.
    pub fn lclm(&self, a: &SkewPoly, b: &SkewPoly) -> Result<SkewPoly> {
        Self::same(a, b);
        let (da, db) = match (a.degree(), b.degree()) {
            (Some(x), Some(y)) => (x, y),
            _ => return Err(Error::ZeroArgument),
        };
        let tw = self.tower;
        let m = a.m;
        for d in da.max(db)..=da + db {
            // unknowns: coefficients of x (deg <= d - da) and y (deg <= d - db),
            // each split into m prime-field coordinates
            let mut cols = Vec::new();
            for (left, dx, sign) in [(a, d - da, false), (b, d - db, true)] {
                for j in 0..=dx {
                    for bit in 0..m {
                        let mut v = vec![0u32; m];
                        v[bit] = 1;
                        let e = tw.from_vec(v);
                        let mut prod = self.mul(left, &self.monomial(j, e));
                        if sign {
                            prod = self.neg(&prod);
                        }
                        cols.push(flatten(&prod, d + 1, m));
                    }
                }
            }
            let mat = FpMatrix::from_columns(tw.p(), (d + 1) * m, &cols);
            let Some(kv) = mat.kernel().into_iter().next() else {
                continue;
            };
            let nx = (d - da + 1) * m;
            let x = unflatten(self, &kv[..nx], d - da + 1, m);
            let c = self.mul(a, &x);
            if c.is_zero() {
                continue;
            }
            return Ok(self.make_monic(&c)?.0);
        }
        unreachable!("a * b' = b * a' for suitable a', b' of complementary degree")
    }

    /// `(n, s)` with `q = t^n s` and `s` separable.
    pub fn sep_split(&self, q: &SkewPoly) -> Result<(usize, SkewPoly)> {
        let n = q.t_adic_order().ok_or(Error::ZeroArgument)?;
        Ok((n, self.normalize(q.m, q.coeffs[n..].to_vec())))
    }

    /// Coefficientwise `phi`: the unique `q1` with `q t = t q1`.
    pub fn t_conjugate(&self, q: &SkewPoly) -> SkewPoly {
        SkewPoly {
            m: q.m,
            coeffs: q.coeffs.iter().map(|c| self.tower.frob_pow(c, 1)).collect(),
        }
    }

    /// `(x', u')` with `u x = x' u'`, `u' = phi^{deg x}(u)`; `x'` is monic when
    /// `x` is.
    pub fn move_unit_right(&self, u: &FieldElem, x: &SkewPoly) -> Result<(SkewPoly, FieldElem)> {
        let k = x.degree().ok_or(Error::ZeroArgument)?;
        let tw = self.tower;
        let u_out = tw.frob_pow(u, k as i64);
        let u_out_inv = tw.inv(&u_out)?;
        let coeffs = x
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| tw.mul(&tw.mul(&tw.frob_pow(u, i as i64), c), &u_out_inv))
            .collect();
        Ok((self.normalize(x.m, coeffs), u_out))
    }

    /// All monic polynomials of degree `d` over `F_{p^m}`, ascending.
    pub fn monics(&self, m: usize, d: usize) -> Result<impl Iterator<Item = SkewPoly> + '_> {
        let k = self.tower.field_size(m);
        let count = k
            .checked_pow(d as u32)
            .filter(|&c| c <= self.divisor_cap)
            .ok_or(Error::SearchTooLarge {
                size: k.saturating_pow(d as u32),
                cap: self.divisor_cap,
            })?;
        Ok((0..count).map(move |mut idx| {
            let mut coeffs = Vec::with_capacity(d + 1);
            for _ in 0..d {
                coeffs.push(self.tower.from_index(m, idx % k));
                idx /= k;
            }
            coeffs.push(self.tower.one(m));
            SkewPoly { m, coeffs }
        }))
    }

    /// Least monic left factor of `q` of degree `d`, if any.
    fn left_factor_of_degree(&self, q: &SkewPoly, d: usize) -> Result<Option<SkewPoly>> {
        let n = q.degree().expect("nonzero");
        if 2 * d <= n {
            for f in self.monics(q.m, d)? {
                if self.right_divides(&f, q)? {
                    return Ok(Some(f));
                }
            }
            return Ok(None);
        }
        // search the complementary right factor instead
        let mut best: Option<SkewPoly> = None;
        for x in self.monics(q.m, n - d)? {
            let (f, rem) = self.left_divmod(q, &x)?;
            if rem.is_zero() {
                let f = self.make_monic(&f)?.0;
                if best.as_ref().is_none_or(|b| f < *b) {
                    best = Some(f);
                }
            }
        }
        Ok(best)
    }

    /// Least monic proper left factor of least degree.
    fn least_left_factor(&self, q: &SkewPoly) -> Result<Option<SkewPoly>> {
        let n = q.degree().expect("nonzero");
        for d in 1..n {
            if let Some(f) = self.left_factor_of_degree(q, d)? {
                return Ok(Some(f));
            }
        }
        Ok(None)
    }

    /// Irreducible: positive degree and no proper monic left factor.
    pub fn is_irreducible(&self, q: &SkewPoly) -> Result<bool> {
        match q.degree() {
            None | Some(0) => Ok(false),
            Some(1) => Ok(true),
            Some(_) => Ok(self.least_left_factor(q)?.is_none()),
        }
    }

    /// `q = t^n q_1 ... q_k u` with monic irreducible `q_i`; at each step the
    /// least left factor of least degree is split off.
    pub fn factorize(&self, q: &SkewPoly, bound: usize) -> Result<Factorization> {
        let n = q.degree().ok_or(Error::ZeroArgument)?;
        if n > bound {
            return Err(Error::DegreeBoundExceeded { degree: n, bound });
        }
        let (t_power, mut rest) = self.sep_split(q)?;
        let mut factors = Vec::new();
        while rest.degree().expect("nonzero") > 0 {
            match self.least_left_factor(&rest)? {
                Some(f) => {
                    rest = self.right_divmod(&rest, &f)?.0;
                    factors.push(f);
                }
                None => {
                    let (f, u) = self.make_monic(&rest)?;
                    factors.push(f);
                    rest = self.constant(u);
                }
            }
        }
        Ok(Factorization {
            t_power,
            factors,
            unit: rest.coeffs[0].clone(),
        })
    }

    /// Recomposes `t^n q_1 ... q_k u`.
    pub fn recompose(&self, m: usize, f: &Factorization) -> SkewPoly {
        let mut acc = self.monomial(f.t_power, self.tower.one(m));
        for q in &f.factors {
            acc = self.mul(&acc, q);
        }
        self.mul_scalar_right(&acc, &f.unit)
    }

    fn check_irreducible(&self, q: &SkewPoly) -> Result<()> {
        if !self.is_irreducible(q)? {
            return Err(Error::NotIrreducible(crate::text::format_poly(q)));
        }
        Ok(())
    }

    /// `lambda r mu`.
    pub fn conjugate(&self, lambda: &FieldElem, r: &SkewPoly, mu: &FieldElem) -> SkewPoly {
        self.mul_scalar_right(&self.mul_scalar_left(lambda, r), mu)
    }

    /// A witness `(lambda, mu)` of `q = lambda r mu`, least `lambda` first.
    pub fn is_k_conjugate(
        &self,
        q: &SkewPoly,
        r: &SkewPoly,
    ) -> Result<Option<(FieldElem, FieldElem)>> {
        Self::same(q, r);
        self.check_irreducible(q)?;
        self.check_irreducible(r)?;
        if q.degree() != r.degree() {
            return Ok(None);
        }
        Ok(self.conjugacy_witness(q, r))
    }

    fn conjugacy_witness(&self, q: &SkewPoly, r: &SkewPoly) -> Option<(FieldElem, FieldElem)> {
        let n = r.degree()? as i64;
        let tw = self.tower;
        for lambda in tw.elements(r.m).skip(1) {
            // leading coefficients force phi^n(lambda) r_n mu = q_n
            let lr = tw.mul(&tw.frob_pow(&lambda, n), r.lead()?);
            let mu = tw.div(q.lead()?, &lr).ok()?;
            if self.conjugate(&lambda, r, &mu) == *q {
                return Some((lambda, mu));
            }
        }
        None
    }

    /// Least monic member of the `K`-conjugacy class of an irreducible `q`.
    pub fn conjugacy_rep(&self, q: &SkewPoly) -> Result<SkewPoly> {
        self.check_irreducible(q)?;
        Ok(self.conjugacy_rep_unchecked(q))
    }

    pub(crate) fn conjugacy_rep_unchecked(&self, q: &SkewPoly) -> SkewPoly {
        let tw = self.tower;
        let n = q.degree().expect("nonzero") as i64;
        let lead = q.lead().expect("nonzero");
        tw.elements(q.m)
            .skip(1)
            .map(|lambda| {
                let lr = tw.mul(&tw.frob_pow(&lambda, n), lead);
                let mu = tw.inv(&lr).expect("unit");
                self.conjugate(&lambda, q, &mu)
            })
            .min()
            .expect("nonempty unit group")
    }

    /// `x.r = sum phi^i(x) a_i` for `x` in the tower.
    pub fn act_field(&self, x: &FieldElem, r: &SkewPoly) -> Result<FieldElem> {
        let tw = self.tower;
        let m = tw.compositum(x.degree(), r.m)?;
        let x = tw.embed_lift(x, m)?;
        let mut acc = tw.zero(m);
        for (i, a) in r.coeffs.iter().enumerate() {
            let a = tw.embed_lift(a, m)?;
            acc = tw.add(&acc, &tw.mul(&tw.frob_pow(&x, i as i64), &a));
        }
        Ok(acc)
    }
}

/// Coordinates of the first `len` coefficients, `m` residues each.
pub(crate) fn flatten(a: &SkewPoly, len: usize, m: usize) -> Vec<u32> {
    let mut out = vec![0u32; len * m];
    for (i, c) in a.coeffs.iter().enumerate().take(len) {
        out[i * m..(i + 1) * m].copy_from_slice(c.coeffs());
    }
    out
}

pub(crate) fn unflatten(ring: &SkewRing<'_>, v: &[u32], len: usize, m: usize) -> SkewPoly {
    let coeffs = (0..len)
        .map(|i| ring.tower.from_vec(v[i * m..(i + 1) * m].to_vec()))
        .collect();
    ring.normalize(m, coeffs)
}

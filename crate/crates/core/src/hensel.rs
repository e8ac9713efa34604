//! Solving `x . r = y` in the series module: `t`-roots, Hensel lifting on
//! positive valuations, torsion roots by prime-field linear algebra, and the
//! annihilator sets and minimal polynomials of constants.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::field::{FieldElem, Tower};
use crate::linalg::{self, FpMatrix};
use crate::series::{Exp, SeriesElem, SeriesModel, Value};
use crate::skew::{SkewPoly, SkewRing, DEFAULT_FACTOR_BOUND};

/// Largest annihilator set listed element by element.
pub const ROOT_LIST_CAP: u128 = 1 << 20;
const MAX_STEPS: usize = 10_000;

/// `|ann(r)|`: finite, or infinite for `r = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Eta {
    Finite(u128),
    Infinite,
}

impl Eta {
    pub fn mul(self, other: Eta) -> Eta {
        match (self, other) {
            (Eta::Finite(a), Eta::Finite(b)) => Eta::Finite(a * b),
            _ => Eta::Infinite,
        }
    }
}

impl fmt::Display for Eta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Eta::Finite(n) => write!(f, "{n}"),
            Eta::Infinite => write!(f, "inf"),
        }
    }
}

/// The roots of `X . r = 0` among the constants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnnSet {
    pub r: SkewPoly,
    /// Least admitted degree containing every root.
    pub field_degree: usize,
    /// Ascending, all in `F_{p^field_degree}`.
    pub roots: Vec<FieldElem>,
}

/// A finite partial module embedding into the tower, keyed by elements in
/// their least field.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Embedding {
    map: BTreeMap<FieldElem, FieldElem>,
}

impl Embedding {
    pub fn pairs(&self) -> impl Iterator<Item = (&FieldElem, &FieldElem)> {
        self.map.iter()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

/// Equation solving over one series model.
#[derive(Clone, Copy, Debug)]
pub struct Solver<'t> {
    sm: SeriesModel<'t>,
    ring: SkewRing<'t>,
}

impl<'t> Solver<'t> {
    pub fn new(sm: SeriesModel<'t>) -> Self {
        Solver {
            ring: SkewRing::new(sm.tower()),
            sm,
        }
    }

    pub fn model(&self) -> &SeriesModel<'t> {
        &self.sm
    }

    fn tower(&self) -> &'t Tower {
        self.sm.tower()
    }

    /// The unique `x` with `x . t = y`.
    pub fn t_root(&self, y: &SeriesElem) -> Result<SeriesElem> {
        let q = Exp::from_integer(self.sm.q());
        let tw = self.tower();
        let terms: Vec<(Exp, FieldElem)> = y
            .terms()
            .iter()
            .map(|(g, c)| (*g / q, tw.frob_pow(c, -1)))
            .collect();
        // a cutoff is only a lower bound, so it may be rounded down
        let grid = (tw.p() as i64).checked_pow(self.sm.k_max()).map(Exp::from_integer);
        let precision = match (y.precision(), grid) {
            (Value::Finite(n), Some(grid)) => Value::Finite((n / q * grid).floor() / grid),
            (Value::Finite(n), None) => Value::Finite(n / q),
            (Value::Infinity, _) => Value::Infinity,
        };
        self.sm.from_terms(terms, precision)
    }

    /// `x` with `v(x) > 0` and `x . r = y` up to the working precision, for
    /// separable `r` and `v(y) > 0`.
    pub fn hensel_lift(&self, r: &SkewPoly, y: &SeriesElem) -> Result<SeriesElem> {
        if !r.is_separable() {
            return Err(Error::NotSeparable);
        }
        if y.valuation_bound() <= Value::int(0) {
            return Err(Error::ValuationNotPositive(y.valuation_bound().to_string()));
        }
        let n = y.precision().min(self.sm.working_precision());
        let y = self.sm.truncate(y, n);
        let tw = self.tower();
        let a0_inv = tw.inv(&r.coeffs()[0])?;
        let tail = {
            let mut c = r.coeffs().to_vec();
            c[0] = tw.zero(r.k_degree());
            self.ring.from_coeffs_in(r.k_degree(), c)?
        };
        let mut x = self.sm.scale(&y, &a0_inv)?;
        for _ in 0..MAX_STEPS {
            let residual = self.sm.sub(&self.sm.act(&x, r)?, &y)?;
            if residual.valuation_bound() >= n {
                return Ok(self.sm.truncate(&x, n));
            }
            let rhs = self.sm.sub(&y, &self.sm.act(&x, &tail)?)?;
            x = self.sm.truncate(&self.sm.scale(&rhs, &a0_inv)?, n);
        }
        Err(Error::PrecisionExhausted(
            "Hensel iteration did not stabilize".into(),
        ))
    }

    /// `F_p`-matrix of `X -> X . r` on `F_{p^big}`.
    fn additive_matrix(&self, r: &SkewPoly, big: usize) -> Result<FpMatrix> {
        let tw = self.tower();
        let cols = (0..big)
            .map(|j| {
                let mut v = vec![0u32; big];
                v[j] = 1;
                let x = tw.from_coeffs(big, &v)?;
                Ok(tw.embed_lift(&self.ring.act_field(&x, r)?, big)?.coeffs().to_vec())
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FpMatrix::from_columns(tw.p(), big, &cols))
    }

    /// A constant `x` with `x . r = c`: the least solution in the first field
    /// of the tower (degrees `lcm(deg K, deg c)` and its multiples) that has
    /// one, rewritten in its least field.
    pub fn torsion_solve(&self, r: &SkewPoly, c: &FieldElem) -> Result<FieldElem> {
        let tw = self.tower();
        if c.is_zero() {
            return Ok(tw.zero(1));
        }
        let base = tw.compositum(r.k_degree(), c.degree())?;
        let mut big = base;
        while big <= tw.m_max() {
            let mat = self.additive_matrix(r, big)?;
            let rhs = tw.embed_lift(c, big)?;
            if let Some(sol) = mat.solve(rhs.coeffs()) {
                let least = linalg::lex_min_affine(tw.p(), &sol, &mat.kernel());
                return tw.descend(&tw.from_vec(least));
            }
            big += base;
        }
        Err(Error::NoSolution { m_max: tw.m_max() })
    }

    /// Solves `x . r = y` componentwise: negative part by leading-term
    /// peeling, constant part by [`Solver::torsion_solve`], positive part by
    /// [`Solver::hensel_lift`], then one `t`-root per power of `t` in `r`.
    ///
    /// Negative targets generally need infinitely many terms accumulating
    /// below 0 (`x^2 + x = u^{-1}` forces `u^{-1/2} + u^{-1/4} + ...`); the
    /// peeling stops when the exponent denominator budget is spent and the
    /// result is cut off just above the last determined term.
    pub fn solve_div(&self, r: &SkewPoly, y: &SeriesElem) -> Result<SeriesElem> {
        let (n, s) = self.ring.sep_split(r)?;
        let parts = self.sm.decompose(y);
        let mut x = self.solve_negative(&s, &parts.negative, n)?;
        if let Some((_, c)) = parts.torsion.terms().first() {
            let xt = self.torsion_solve(&s, c)?;
            x = self.sm.add(&x, &self.sm.constant(xt))?;
        } else if !parts.torsion.is_exact() {
            x = self.sm.truncate(&x, parts.torsion.precision());
        }
        if !parts.positive.is_zero_known() {
            x = self.sm.add(&x, &self.hensel_lift(&s, &parts.positive)?)?;
        } else {
            let cut = parts.positive.precision().min(self.sm.working_precision());
            x = self.sm.truncate(&x, cut);
        }
        // terms the t-roots would push past the budget are cut off
        let room = self.sm.k_max().saturating_sub(n as u32 * self.tower().s());
        if let Some((g, _)) = x.terms().iter().find(|(g, _)| self.denominator_level(g) > room) {
            x = self.sm.truncate(&x, Value::Finite(*g));
        }
        for _ in 0..n {
            x = self.t_root(&x)?;
        }
        Ok(x)
    }

    fn solve_negative(&self, s: &SkewPoly, y: &SeriesElem, reserve: usize) -> Result<SeriesElem> {
        let tw = self.tower();
        let d = s.degree().ok_or(Error::DivisionByZero)? as u32;
        let qd = Exp::from_integer(self.sm.q().pow(d));
        let lead_inv = tw.inv(s.lead().expect("nonzero"))?;
        let budget = self.sm.k_max().saturating_sub(reserve as u32 * self.tower().s());
        let mut x = self.sm.zero();
        let mut residual = y.clone();
        for _ in 0..MAX_STEPS {
            let Some((delta, lead)) = residual.terms().first().cloned() else {
                break;
            };
            if !delta.is_negative() {
                break;
            }
            let gamma = delta / qd;
            if self.denominator_level(&gamma) > budget {
                // unknown beyond the next term: cut off at its exponent
                let cut = Value::Finite(gamma);
                return Ok(self.sm.truncate(&x, cut));
            }
            let (a, b) = tw.align(&lead, &lead_inv)?;
            let c = tw.frob_pow(&tw.mul(&a, &b), -(d as i64));
            let term = self.sm.monomial(gamma, c);
            residual = self.sm.sub(&residual, &self.sm.act(&term, s)?)?;
            x = self.sm.add(&x, &term)?;
        }
        if residual.terms().first().is_some_and(|(g, _)| g.is_negative()) {
            return Err(Error::PrecisionExhausted(
                "negative part did not resolve".into(),
            ));
        }
        // the target's own cutoff bounds what is known about x
        let cut = match residual.precision() {
            Value::Finite(nv) if nv <= Exp::zero() => Value::Finite(nv / qd),
            _ => Value::Infinity,
        };
        Ok(self.sm.truncate(&x, cut))
    }

    fn denominator_level(&self, g: &Exp) -> u32 {
        let p = self.tower().p() as i64;
        let mut d = *g.denom();
        let mut k = 0;
        while d % p == 0 {
            d /= p;
            k += 1;
        }
        k
    }

    /// Kernel of `X -> X . s` on the least `F_{p^M}`, `deg K | M`, where it
    /// reaches its full dimension `s deg(s)`.
    fn separable_kernel(&self, s: &SkewPoly) -> Result<(usize, Vec<Vec<u32>>)> {
        let tw = self.tower();
        let want = tw.s() as usize * s.degree().ok_or(Error::ZeroArgument)?;
        let m = s.k_degree();
        let mut big = m;
        while big <= tw.m_max() {
            let ker = self.additive_matrix(s, big)?.kernel();
            if ker.len() == want {
                return Ok((big, ker));
            }
            big += m;
        }
        Err(Error::MmaxExceeded {
            needed: big,
            m_max: tw.m_max(),
        })
    }

    /// Every constant root of `X . r = 0` for `r != 0`.
    pub fn ann_roots(&self, r: &SkewPoly) -> Result<AnnSet> {
        let tw = self.tower();
        let (n, s) = self.ring.sep_split(r)?;
        let (big, ker) = self.separable_kernel(&s)?;
        let count = (tw.p() as u128).pow(ker.len() as u32);
        if count > ROOT_LIST_CAP {
            return Err(Error::SearchTooLarge {
                size: count,
                cap: ROOT_LIST_CAP,
            });
        }
        let mut roots: Vec<FieldElem> = linalg::enumerate_span(tw.p(), big, &ker)
            .into_iter()
            .map(|v| tw.frob_pow(&tw.from_vec(v), -(n as i64)))
            .collect();
        roots.sort();
        Ok(AnnSet {
            r: r.clone(),
            field_degree: big,
            roots,
        })
    }

    /// `|ann(r)| = p^{s (deg r - deg_is r)}`: the constants are the whole
    /// algebraic closure, where a separable additive polynomial has as many
    /// roots as its degree.
    pub fn eta(&self, r: &SkewPoly) -> Eta {
        match self.ring.sep_split(r) {
            Err(_) => Eta::Infinite,
            Ok((_, s)) => {
                let d = s.degree().expect("nonzero") as u32;
                Eta::Finite((self.sm.q() as u128).pow(d))
            }
        }
    }

    /// Number of roots of `X . r = 0` inside `F_{p^big}` only.
    pub fn eta_within(&self, r: &SkewPoly, big: usize) -> Result<Eta> {
        if r.is_zero() {
            return Ok(Eta::Infinite);
        }
        let (n, s) = self.ring.sep_split(r)?;
        let _ = n;
        let big = self.tower().compositum(big, s.k_degree())?;
        let dim = self.additive_matrix(&s, big)?.kernel().len();
        Ok(Eta::Finite((self.tower().p() as u128).pow(dim as u32)))
    }

    /// The exponent `e` with `eta(r) = |K_0|^e`, where `K_0` is the fixed
    /// field of `phi` in `K`.
    pub fn eta_exponent(&self, r: &SkewPoly) -> Option<u32> {
        let tw = self.tower();
        let k0 = tw.fixed_subfield_degree(r.k_degree()) as u32;
        let (_, s) = self.ring.sep_split(r).ok()?;
        let total = tw.s() * s.degree()? as u32;
        (total % k0 == 0).then_some(total / k0)
    }

    /// An `F_p`-basis (in `F_{p^big}`) of the finite submodule `a`, after
    /// checking that `a` is exactly the set of its combinations and is
    /// closed under `t` and scalars from `F_{p^m}`.
    fn submodule_basis(&self, a: &[FieldElem], m: usize, big: usize) -> Result<Vec<Vec<u32>>> {
        let tw = self.tower();
        let lifted = a
            .iter()
            .map(|x| Ok(tw.embed_lift(x, big)?.coeffs().to_vec()))
            .chain(std::iter::once(Ok(vec![0; big])))
            .collect::<Result<Vec<_>>>()?;
        let basis = linalg::echelon_high(tw.p(), big, &lifted);
        let mut distinct = lifted.clone();
        distinct.sort();
        distinct.dedup();
        if (distinct.len() as u128) != (tw.p() as u128).pow(basis.len() as u32) {
            return Err(Error::ClosureCheck(
                "listed elements are not an additive group".into(),
            ));
        }
        let span = FpMatrix::from_columns(tw.p(), big, &basis);
        let inside = |v: &FieldElem| basis.is_empty() && v.is_zero() || span.solve(v.coeffs()).is_some();
        let g = tw.embed_lift(&tw.generator(m)?, big)?;
        for b in &basis {
            let x = tw.from_vec(b.clone());
            if !inside(&tw.frob_pow(&x, 1)) {
                return Err(Error::ClosureCheck("not closed under t".into()));
            }
            let mut gk = tw.one(big);
            for _ in 0..m {
                if !inside(&tw.mul(&x, &gk)) {
                    return Err(Error::ClosureCheck("not closed under scalars".into()));
                }
                gk = tw.mul(&gk, &g);
            }
        }
        Ok(basis)
    }

    /// Monic `q` over `F_{p^m}` of least degree with `x . q` in the finite
    /// submodule `a` (the zero module when `a` is `None`).
    pub fn min_poly(&self, x: &FieldElem, a: Option<&[FieldElem]>, m: usize) -> Result<SkewPoly> {
        let tw = self.tower();
        let mut big = tw.compositum(m, x.degree())?;
        for e in a.unwrap_or(&[]) {
            big = tw.compositum(big, e.degree())?;
        }
        let basis = self.submodule_basis(a.unwrap_or(&[]), m, big)?;
        let xb = tw.embed_lift(x, big)?;
        let g = tw.embed_lift(&tw.generator(m)?, big)?;
        // phi^i(x) g^k for i < d, k < m, then the basis of a
        let mut cols: Vec<Vec<u32>> = Vec::new();
        let mut frob = xb.clone();
        for d in 0.. {
            if d > 0 {
                let mut all = cols.clone();
                all.extend(basis.iter().cloned());
                let mat = FpMatrix::from_columns(tw.p(), big, &all);
                let target = tw.neg(&frob);
                if let Some(sol) = mat.solve(target.coeffs()) {
                    let mut coeffs = Vec::with_capacity(d + 1);
                    for i in 0..d {
                        let mut alpha = tw.zero(big);
                        let mut gk = tw.one(big);
                        for k in 0..m {
                            alpha = tw.add(&alpha, &tw.scale(&gk, sol[i * m + k]));
                            gk = tw.mul(&gk, &g);
                        }
                        coeffs.push(tw.descend(&alpha)?);
                    }
                    coeffs.push(tw.one(m));
                    return self.ring.from_coeffs_in(m, coeffs);
                }
            } else if basis.is_empty() && xb.is_zero()
                || !basis.is_empty()
                    && FpMatrix::from_columns(tw.p(), big, &basis)
                        .solve(xb.coeffs())
                        .is_some()
            {
                return Ok(self.ring.one(m));
            }
            let mut gk = tw.one(big);
            for _ in 0..m {
                cols.push(tw.mul(&frob, &gk).coeffs().to_vec());
                gk = tw.mul(&gk, &g);
            }
            frob = tw.frob_pow(&frob, 1);
            if d > 64 {
                break;
            }
        }
        unreachable!("every constant is torsion")
    }

    /// Builds the identity-style input map `a -> a` on a submodule.
    pub fn identity_embedding(&self, a: &[FieldElem]) -> Result<Embedding> {
        let tw = self.tower();
        let mut map = BTreeMap::new();
        for x in a {
            let d = tw.descend(x)?;
            map.insert(d.clone(), d);
        }
        Ok(Embedding { map })
    }

    pub fn embedding_from_pairs(&self, pairs: &[(FieldElem, FieldElem)]) -> Result<Embedding> {
        let tw = self.tower();
        let mut map = BTreeMap::new();
        for (a, b) in pairs {
            map.insert(tw.descend(a)?, tw.descend(b)?);
        }
        Ok(Embedding { map })
    }

    fn lookup(&self, f: &Embedding, x: &FieldElem) -> Result<Option<FieldElem>> {
        Ok(f.map.get(&self.tower().descend(x)?).cloned())
    }

    /// Checks that `f` is an injective map of `F_{p^m}[t; phi]`-modules on
    /// its (finite) domain.
    pub fn verify_embedding(&self, f: &Embedding, m: usize) -> Result<bool> {
        let tw = self.tower();
        let mut images: Vec<&FieldElem> = f.map.values().collect();
        images.sort();
        images.dedup();
        if images.len() != f.map.len() {
            return Ok(false);
        }
        let g = tw.generator(m)?;
        let add = |a: &FieldElem, b: &FieldElem| -> Result<FieldElem> {
            let (a, b) = tw.align(a, b)?;
            Ok(tw.add(&a, &b))
        };
        let mul = |a: &FieldElem, b: &FieldElem| -> Result<FieldElem> {
            let (a, b) = tw.align(a, b)?;
            Ok(tw.mul(&a, &b))
        };
        for (a, fa) in &f.map {
            let checks = [
                (tw.frob_pow(a, 1), tw.frob_pow(fa, 1)),
                (mul(a, &g)?, mul(fa, &g)?),
            ];
            for (src, img) in checks {
                match self.lookup(f, &src)? {
                    Some(v) if tw.same_element(&v, &img)? => {}
                    _ => return Ok(false),
                }
            }
            for (b, fb) in &f.map {
                match self.lookup(f, &add(a, b)?)? {
                    Some(v) if tw.same_element(&v, &add(fa, fb)?)? => {}
                    _ => return Ok(false),
                }
            }
        }
        Ok(true)
    }

    /// One extension step for a finite embedding `f: A -> tower` and a
    /// constant `x` outside `A`: with `q` the minimal polynomial of `x` over
    /// `A` factored as `q_1 ... q_k`, set `z = x . (q_1 ... q_{k-1})` and
    /// `r = q_k`; pick `y` outside `f(A)` with `y . r = f(z . r)` and extend
    /// `f` to `A + z R` by `a + z.h -> f(a) + y.h`.
    pub fn extend_embedding_step(
        &self,
        f: &Embedding,
        x: &FieldElem,
        m: usize,
    ) -> Result<(FieldElem, Embedding)> {
        let tw = self.tower();
        let domain: Vec<FieldElem> = f.map.keys().cloned().collect();
        if !self.verify_embedding(f, m)? {
            return Err(Error::Precondition("input map is not a module embedding".into()));
        }
        if self.lookup(f, x)?.is_some() {
            return Err(Error::Precondition("element already in the domain".into()));
        }
        let q = self.min_poly(x, Some(&domain), m)?;
        let fac = self.ring.factorize(&q, DEFAULT_FACTOR_BOUND.max(q.degree().unwrap_or(0)))?;
        let mut factors: Vec<SkewPoly> = vec![self.ring.t(m); fac.t_power];
        factors.extend(fac.factors.iter().cloned());
        let r = factors.pop().expect("x is outside A, so deg q > 0");
        let head = factors
            .iter()
            .fold(self.ring.one(m), |acc, h| self.ring.mul(&acc, h));
        let z = tw.descend(&self.ring.act_field(x, &head)?)?;
        let zr = self.ring.act_field(&z, &r)?;
        let b = self
            .lookup(f, &zr)?
            .ok_or_else(|| Error::Precondition("z . r is not in the domain".into()))?;
        let image: Vec<FieldElem> = f.map.values().cloned().collect();
        let in_image = |v: &FieldElem| -> Result<bool> {
            for w in &image {
                if tw.same_element(v, w)? {
                    return Ok(true);
                }
            }
            Ok(false)
        };
        let b1 = self.torsion_solve(&r, &b)?;
        let y = if !in_image(&b1)? {
            b1
        } else {
            let ann = self.ann_roots(&r)?;
            let mut found = None;
            for e in &ann.roots {
                let (u, v) = tw.align(&b1, e)?;
                let cand = tw.descend(&tw.add(&u, &v))?;
                if !in_image(&cand)? {
                    found = Some(cand);
                    break;
                }
            }
            found.ok_or_else(|| {
                Error::NoAdmissibleExtension(format!(
                    "every solution of y.r = {b} lies in the image"
                ))
            })?
        };
        // a + z.h -> f(a) + y.h for deg h < deg r
        let deg_r = r.degree().expect("irreducible");
        let mut map = BTreeMap::new();
        let hs: Vec<SkewPoly> = (0..tw.field_size(m).pow(deg_r as u32))
            .map(|mut idx| {
                let k = tw.field_size(m);
                let coeffs = (0..deg_r)
                    .map(|_| {
                        let c = tw.from_index(m, idx % k);
                        idx /= k;
                        c
                    })
                    .collect();
                self.ring.from_coeffs_in(m, coeffs)
            })
            .collect::<Result<_>>()?;
        for h in &hs {
            let zh = self.ring.act_field(&z, h)?;
            let yh = self.ring.act_field(&y, h)?;
            for (a, fa) in &f.map {
                let (a1, zh1) = tw.align(a, &zh)?;
                let (fa1, yh1) = tw.align(fa, &yh)?;
                map.insert(
                    tw.descend(&tw.add(&a1, &zh1))?,
                    tw.descend(&tw.add(&fa1, &yh1))?,
                );
            }
        }
        let ext = Embedding { map };
        if !self.verify_embedding(&ext, m)? {
            return Err(Error::NoAdmissibleExtension(
                "extended map is not a module embedding".into(),
            ));
        }
        Ok((y, ext))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::{parse_field_elem, parse_poly, parse_series};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn setup(p: u32) -> Tower {
        Tower::new(p, 1, 24).unwrap()
    }

    #[test]
    fn t_root_examples() {
        let tw = setup(2);
        let sm = SeriesModel::new(&tw, 8, 64);
        let sv = Solver::new(sm);
        assert_eq!(
            sv.t_root(&sm.u()).unwrap(),
            parse_series(&sm, "u^(1/2)").unwrap()
        );
        let y = parse_series(&sm, "[g]@2*u^2").unwrap();
        let x = sv.t_root(&y).unwrap();
        assert_eq!(x, parse_series(&sm, "[g+1]@2*u").unwrap());
        assert_eq!(sm.act_t(&x), y);
        assert_eq!(sv.t_root(&sm.zero()).unwrap(), sm.zero());
        let deep = parse_series(&sm, "u^(1/256)").unwrap();
        assert_eq!(sv.t_root(&deep), Err(Error::DenominatorBudget { k_max: 8 }));
    }

    #[test]
    fn hensel_closed_form() {
        let tw = setup(2);
        let sm = SeriesModel::new(&tw, 8, 64);
        let sv = Solver::new(sm);
        let r = parse_poly(&tw, "t + 1").unwrap();
        let x = sv.hensel_lift(&r, &sm.u()).unwrap();
        // x^2 + x = u has the solution sum_k u^{2^k}
        let expected: Vec<Exp> = (0..6).map(|k| Exp::from_integer(1 << k)).collect();
        let got: Vec<Exp> = x.terms().iter().map(|(g, _)| *g).collect();
        assert_eq!(got, expected);
        assert!(x.terms().iter().all(|(_, c)| c.is_one()));
        assert_eq!(x.precision(), Value::int(64));
    }

    #[test]
    fn hensel_degree_zero_and_errors() {
        let tw = setup(2);
        let sm = SeriesModel::new(&tw, 8, 64);
        let sv = Solver::new(sm);
        let a0 = parse_poly(&tw, "[g]@2").unwrap();
        let y = parse_series(&sm, "u + [g]@2*u^(3/2)").unwrap();
        let x = sv.hensel_lift(&a0, &y).unwrap();
        let g_inv = tw.inv(&tw.generator(2).unwrap()).unwrap();
        assert_eq!(x, sm.truncate(&sm.scale(&y, &g_inv).unwrap(), Value::int(64)));
        let t = parse_poly(&tw, "t").unwrap();
        assert_eq!(sv.hensel_lift(&t, &sm.u()), Err(Error::NotSeparable));
        let one = sm.constant(tw.one(1));
        assert!(matches!(
            sv.hensel_lift(&parse_poly(&tw, "t+1").unwrap(), &one),
            Err(Error::ValuationNotPositive(_))
        ));
    }

    #[test]
    fn hensel_random_suite() {
        let tw = setup(2);
        let sm = SeriesModel::new(&tw, 8, 64);
        let sv = Solver::new(sm);
        let ring = SkewRing::new(&tw);
        let mut rng = StdRng::seed_from_u64(42);
        for _ in 0..40 {
            let deg = rng.gen_range(0..=4);
            let mut c: Vec<FieldElem> = (0..=deg).map(|_| tw.random(2, &mut rng)).collect();
            c[0] = tw.random_nonzero(2, &mut rng);
            c[deg] = tw.random_nonzero(2, &mut rng);
            let r = ring.from_coeffs_in(2, c).unwrap();
            let terms = (0..3)
                .map(|_| {
                    (
                        Exp::new(rng.gen_range(1..20), 1 << rng.gen_range(0..3)),
                        tw.random_nonzero(2, &mut rng),
                    )
                })
                .collect();
            let y = sm.from_terms(terms, Value::Infinity).unwrap();
            let x = sv.hensel_lift(&r, &y).unwrap();
            let res = sm.sub(&sm.act(&x, &r).unwrap(), &y).unwrap();
            assert!(res.valuation_bound() >= Value::int(64));
            assert_eq!(x.valuation().unwrap(), y.valuation().unwrap());
        }
    }

    #[test]
    fn torsion_solve_examples() {
        let tw = setup(2);
        let sm = SeriesModel::new(&tw, 8, 64);
        let sv = Solver::new(sm);
        let r = parse_poly(&tw, "t + 1").unwrap();
        let x = sv.torsion_solve(&r, &tw.one(1)).unwrap();
        assert_eq!(x, tw.generator(2).unwrap());
        let t = parse_poly(&tw, "t").unwrap();
        let c = parse_field_elem(&tw, "[g^2+1]@3").unwrap();
        assert_eq!(sv.torsion_solve(&t, &c).unwrap(), tw.frob_pow(&c, -1));
        assert!(sv.torsion_solve(&r, &tw.zero(1)).unwrap().is_zero());
        let small = Tower::new(2, 1, 1).unwrap();
        let ssm = SeriesModel::new(&small, 8, 64);
        assert_eq!(
            Solver::new(ssm).torsion_solve(&parse_poly(&small, "t+1").unwrap(), &small.one(1)),
            Err(Error::NoSolution { m_max: 1 })
        );
    }

    #[test]
    fn solve_div_examples() {
        let tw = setup(2);
        let sm = SeriesModel::new(&tw, 8, 64);
        let sv = Solver::new(sm);
        let t = parse_poly(&tw, "t").unwrap();
        let x = sv.solve_div(&t, &sm.u()).unwrap();
        assert_eq!(sm.truncate(&x, Value::Infinity).terms(), parse_series(&sm, "u^(1/2)").unwrap().terms());
        let r = parse_poly(&tw, "t + 1").unwrap();
        let x = sv.solve_div(&r, &sm.constant(tw.one(1))).unwrap();
        assert_eq!(x.terms(), sm.constant(tw.generator(2).unwrap()).terms());
        let y = parse_series(&sm, "u^(-2)").unwrap();
        let x = sv.solve_div(&r, &y).unwrap();
        assert_eq!(x.terms()[0].0, Exp::from_integer(-1));
        let back = sm.sub(&sm.act(&x, &r).unwrap(), &y).unwrap();
        assert!(back.valuation_bound() >= sm.act(&x, &r).unwrap().precision());
    }

    #[test]
    fn t_roots_past_the_budget_cut_off() {
        let tw = setup(2);
        let sm = SeriesModel::new(&tw, 8, 64);
        let sv = Solver::new(sm);
        let t3 = parse_poly(&tw, "t^3").unwrap();
        let y = parse_series(&sm, "u^(-1) + u^(1/64)").unwrap();
        let x = sv.solve_div(&t3, &y).unwrap();
        assert_eq!(x.terms(), parse_series(&sm, "u^(-1/8)").unwrap().terms());
        // u^(1/512) lies off the 1/256 grid, so the cutoff rounds down to 0
        assert_eq!(x.precision(), Value::int(0));
        assert!(sm.sub(&sm.act(&x, &t3).unwrap(), &y).unwrap().is_zero_known());
    }

    #[test]
    fn ann_examples() {
        let tw = setup(2);
        let sm = SeriesModel::new(&tw, 8, 64);
        let sv = Solver::new(sm);
        let roots = |s: &str| sv.ann_roots(&parse_poly(&tw, s).unwrap()).unwrap().roots;
        assert_eq!(roots("t + 1"), vec![tw.zero(1), tw.one(1)]);
        assert_eq!(roots("t"), vec![tw.zero(1)]);
        assert_eq!(roots("t^2 + t").len(), 2);
        assert!(roots("t^2 + t").iter().all(|x| tw.descend(x).unwrap().degree() == 1));
        let e = |s: &str| sv.eta(&parse_poly(&tw, s).unwrap());
        assert_eq!(e("t + 1"), Eta::Finite(2));
        assert_eq!(e("t^2 + 1"), Eta::Finite(4));
        assert_eq!(e("t^2 + t"), Eta::Finite(2));
        assert_eq!(e("0"), Eta::Infinite);
    }

    /// Brute force: count x in F_{2^M} with x.r = 0.
    fn count_roots(tw: &Tower, r: &SkewPoly, big: usize) -> u128 {
        let ring = SkewRing::new(tw);
        tw.elements(big)
            .filter(|x| ring.act_field(x, r).unwrap().is_zero())
            .count() as u128
    }

    #[test]
    fn eta_matches_enumeration() {
        let tw = setup(2);
        let sm = SeriesModel::new(&tw, 8, 64);
        let sv = Solver::new(sm);
        for s in ["t + 1", "t^2 + 1", "t^2 + t + 1", "t^3 + t + 1", "t^2*[1]@2 + t*[g]@2 + [1]@2"] {
            let r = parse_poly(&tw, s).unwrap();
            let ann = sv.ann_roots(&r).unwrap();
            assert_eq!(Eta::Finite(ann.roots.len() as u128), sv.eta(&r), "{s}");
            assert_eq!(count_roots(&tw, &r, ann.field_degree), ann.roots.len() as u128);
        }
    }

    #[test]
    fn min_poly_examples() {
        let tw = setup(2);
        let sm = SeriesModel::new(&tw, 8, 64);
        let sv = Solver::new(sm);
        let g = tw.generator(2).unwrap();
        let f2 = vec![tw.zero(1), tw.one(1)];
        assert_eq!(
            sv.min_poly(&g, Some(&f2), 1).unwrap(),
            parse_poly(&tw, "t + 1").unwrap()
        );
        assert_eq!(
            sv.min_poly(&tw.one(1), None, 1).unwrap(),
            parse_poly(&tw, "t + 1").unwrap()
        );
        assert_eq!(sv.min_poly(&tw.zero(1), None, 1).unwrap(), SkewRing::new(&tw).one(1));
        let bad = vec![tw.zero(2), g.clone()];
        assert!(matches!(
            sv.min_poly(&tw.one(1), Some(&bad), 1),
            Err(Error::ClosureCheck(_))
        ));
    }

    #[test]
    fn min_poly_divides_annihilating_polys() {
        let tw = setup(2);
        let sm = SeriesModel::new(&tw, 8, 64);
        let sv = Solver::new(sm);
        let ring = SkewRing::new(&tw);
        let f2 = vec![tw.zero(1), tw.one(1)];
        let mut rng = StdRng::seed_from_u64(8);
        let mut checked = 0;
        while checked < 30 {
            let x = tw.random(4, &mut rng);
            let deg = rng.gen_range(1..5);
            let c: Vec<FieldElem> = (0..=deg).map(|_| tw.random(1, &mut rng)).collect();
            let r = ring.from_coeffs_in(1, c).unwrap();
            if r.is_zero() {
                continue;
            }
            let v = tw.descend(&ring.act_field(&x, &r).unwrap()).unwrap();
            if v.degree() != 1 {
                continue;
            }
            let q = sv.min_poly(&x, Some(&f2), 1).unwrap();
            assert!(ring.right_divmod(&r, &q).unwrap().1.is_zero());
            checked += 1;
        }
    }

    #[test]
    fn extension_step_examples() {
        let tw = setup(2);
        let sm = SeriesModel::new(&tw, 8, 64);
        let sv = Solver::new(sm);
        let f2 = vec![tw.zero(1), tw.one(1)];
        let f = sv.identity_embedding(&f2).unwrap();
        let g = tw.generator(2).unwrap();
        let (y, ext) = sv.extend_embedding_step(&f, &g, 1).unwrap();
        assert_eq!(y, g);
        assert_eq!(ext.len(), 4);
        assert!(ext.pairs().all(|(a, b)| a == b));
        assert!(sv.verify_embedding(&ext, 1).unwrap());
        assert!(matches!(
            sv.extend_embedding_step(&f, &tw.one(1), 1),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn extension_step_with_frobenius_twist() {
        // f = Frobenius on F_4 sends g to g+1; extend along an element of F_16
        let tw = setup(2);
        let sm = SeriesModel::new(&tw, 8, 64);
        let sv = Solver::new(sm);
        let pairs: Vec<(FieldElem, FieldElem)> =
            tw.elements(2).map(|a| (a.clone(), tw.frob_pow(&a, 1))).collect();
        let f = sv.embedding_from_pairs(&pairs).unwrap();
        assert!(sv.verify_embedding(&f, 1).unwrap());
        let x = tw.generator(4).unwrap();
        let (y, ext) = sv.extend_embedding_step(&f, &x, 1).unwrap();
        assert!(sv.verify_embedding(&ext, 1).unwrap());
        // x^2 + x already lies in F_4 here, so one new coset suffices
        assert_eq!(ext.len(), 8);
        assert!(!tw.same_element(&y, &tw.zero(1)).unwrap());
    }
}

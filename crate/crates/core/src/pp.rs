//! Primitive positive formulas `EX y . y A = x B` over `R = K[t; phi]`,
//! their reduction to atomic systems in divisible modules, p.p. indexes and
//! the table descriptors that classify divisible theories.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::field::FieldElem;
use crate::hensel::{Eta, Solver};
use crate::series::SeriesElem;
use crate::skew::{SkewPoly, SkewRing};
use crate::text::format_poly;

/// A rectangular matrix of skew polynomials over one coefficient field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixOverR {
    m: usize,
    rows: usize,
    cols: usize,
    entries: Vec<SkewPoly>,
}

impl MatrixOverR {
    /// Row-major entries, lifted to the compositum of their fields (at
    /// least `F_{p^m}`).
    pub fn new(
        ring: &SkewRing,
        m: usize,
        rows: usize,
        cols: usize,
        entries: Vec<SkewPoly>,
    ) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        let tw = ring.tower();
        let mut big = m;
        for e in &entries {
            big = tw.compositum(big, e.k_degree())?;
        }
        let entries = entries
            .iter()
            .map(|e| ring.lift(e, big))
            .collect::<Result<_>>()?;
        Ok(MatrixOverR {
            m: big,
            rows,
            cols,
            entries,
        })
    }

    pub fn zeros(ring: &SkewRing, m: usize, rows: usize, cols: usize) -> Self {
        MatrixOverR {
            m,
            rows,
            cols,
            entries: vec![ring.zero(m); rows * cols],
        }
    }

    pub fn identity(ring: &SkewRing, m: usize, n: usize) -> Self {
        let mut id = Self::zeros(ring, m, n, n);
        for i in 0..n {
            id.set(i, i, ring.one(m));
        }
        id
    }

    /// The matrix whose product with `A` lists the rows `perm[0], perm[1], ...`
    /// of `A`.
    pub fn permutation(ring: &SkewRing, m: usize, perm: &[usize]) -> Self {
        let mut p = Self::zeros(ring, m, perm.len(), perm.len());
        for (i, &j) in perm.iter().enumerate() {
            p.set(i, j, ring.one(m));
        }
        p
    }

    pub fn k_degree(&self) -> usize {
        self.m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &SkewPoly {
        &self.entries[i * self.cols + j]
    }

    fn set(&mut self, i: usize, j: usize, v: SkewPoly) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn column(&self, j: usize) -> Vec<SkewPoly> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(SkewPoly::is_zero)
    }

    pub fn lift(&self, ring: &SkewRing, m: usize) -> Result<Self> {
        Self::new(ring, m, self.rows, self.cols, self.entries.clone())
    }

    pub fn mul(&self, ring: &SkewRing, other: &MatrixOverR) -> Result<MatrixOverR> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let m = ring.tower().compositum(self.m, other.m)?;
        let a = self.lift(ring, m)?;
        let b = other.lift(ring, m)?;
        let mut out = Self::zeros(ring, m, self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = ring.zero(m);
                for k in 0..self.cols {
                    acc = ring.add(&acc, &ring.mul(a.get(i, k), b.get(k, j)));
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        for i in 0..self.rows {
            self.entries.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// `col_j <- col_j - col_c * c`.
    fn col_sub(&mut self, ring: &SkewRing, j: usize, c: usize, f: &SkewPoly) {
        for i in 0..self.rows {
            let v = ring.sub(self.get(i, j), &ring.mul(self.get(i, c), f));
            self.set(i, j, v);
        }
    }

    /// `row_c <- row_c + f * row_j`.
    fn row_add_left(&mut self, ring: &SkewRing, c: usize, j: usize, f: &SkewPoly) {
        for k in 0..self.cols {
            let v = ring.add(self.get(c, k), &ring.mul(f, self.get(j, k)));
            self.set(c, k, v);
        }
    }

    fn scale_col(&mut self, ring: &SkewRing, c: usize, lambda: &FieldElem) {
        for i in 0..self.rows {
            let v = ring.mul_scalar_right(self.get(i, c), lambda);
            self.set(i, c, v);
        }
    }

    fn scale_row_left(&mut self, ring: &SkewRing, c: usize, lambda: &FieldElem) {
        for k in 0..self.cols {
            let v = ring.mul_scalar_left(lambda, self.get(c, k));
            self.set(c, k, v);
        }
    }
}

impl fmt::Display for MatrixOverR {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| format_poly(self.get(i, j))).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// `P A Q = (A_1 | 0)` with `A_1` lower triangular, monic on the diagonal of
/// its first `rank` rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Triangularization {
    pub perm: Vec<usize>,
    pub p: MatrixOverR,
    pub q: MatrixOverR,
    pub q_inv: MatrixOverR,
    pub reduced: MatrixOverR,
    pub rank: usize,
}

impl Triangularization {
    /// Multiplies back: `P A Q` equals the reduced matrix, `Q Q^{-1} = I`,
    /// and the reduced matrix has the promised shape.
    pub fn verify(&self, ring: &SkewRing, a: &MatrixOverR) -> Result<bool> {
        let paq = self.p.mul(ring, a)?.mul(ring, &self.q)?;
        let id = MatrixOverR::identity(ring, self.q.k_degree(), self.q.cols());
        let r = &self.reduced;
        let shape = (0..r.rows()).all(|i| {
            (0..r.cols()).all(|j| {
                let e = r.get(i, j);
                if j >= self.rank || j > i {
                    e.is_zero()
                } else if j == i {
                    e.is_monic()
                } else {
                    true
                }
            })
        });
        Ok(paq == *r && self.q.mul(ring, &self.q_inv)? == id && self.q_inv.mul(ring, &self.q)? == id && shape)
    }
}

/// Column reduction with a row permutation: at each step the least-degree
/// entry of the remaining block becomes the pivot and the rest of its row
/// is cleared by right division, re-pivoting whenever a remainder is
/// smaller.
pub fn triangularize(ring: &SkewRing, a: &MatrixOverR) -> Result<Triangularization> {
    let tw = ring.tower();
    let m = a.k_degree();
    let (k, n) = (a.rows(), a.cols());
    let mut w = a.clone();
    let mut q = MatrixOverR::identity(ring, m, n);
    let mut qi = MatrixOverR::identity(ring, m, n);
    let mut perm: Vec<usize> = (0..k).collect();
    let mut c = 0;
    while c < k.min(n) {
        let best = (c..k)
            .flat_map(|i| (c..n).map(move |j| (i, j)))
            .filter_map(|(i, j)| w.get(i, j).degree().map(|d| (d, i, j)))
            .min();
        let Some((_, i, j)) = best else { break };
        w.swap_rows(c, i);
        perm.swap(c, i);
        w.swap_cols(c, j);
        q.swap_cols(c, j);
        qi.swap_rows(c, j);
        loop {
            let piv = w.get(c, c).clone();
            for j in c + 1..n {
                if !w.get(c, j).is_zero() {
                    let (quot, _) = ring.right_divmod(w.get(c, j), &piv)?;
                    w.col_sub(ring, j, c, &quot);
                    q.col_sub(ring, j, c, &quot);
                    qi.row_add_left(ring, c, j, &quot);
                }
            }
            let next = (c + 1..n)
                .filter_map(|j| w.get(c, j).degree().map(|d| (d, j)))
                .min();
            match next {
                None => break,
                Some((_, j)) => {
                    w.swap_cols(c, j);
                    q.swap_cols(c, j);
                    qi.swap_rows(c, j);
                }
            }
        }
        let lambda = tw.inv(w.get(c, c).lead().expect("pivot is nonzero"))?;
        w.scale_col(ring, c, &lambda);
        q.scale_col(ring, c, &lambda);
        qi.scale_row_left(ring, c, &tw.inv(&lambda)?);
        c += 1;
    }
    Ok(Triangularization {
        p: MatrixOverR::permutation(ring, m, &perm),
        perm,
        q,
        q_inv: qi,
        reduced: w,
        rank: c,
    })
}

/// `EX y_1..y_k . (y_1..y_k) A = (x_1..x_n) B`, one equation per column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PPFormula {
    pub a: MatrixOverR,
    pub b: MatrixOverR,
}

impl PPFormula {
    pub fn new(ring: &SkewRing, a: MatrixOverR, b: MatrixOverR) -> Result<Self> {
        if a.cols() != b.cols() {
            return Err(Error::Shape(format!(
                "{} bound-variable columns against {} free-variable columns",
                a.cols(),
                b.cols()
            )));
        }
        let m = ring.tower().compositum(a.k_degree(), b.k_degree())?;
        Ok(PPFormula {
            a: a.lift(ring, m)?,
            b: b.lift(ring, m)?,
        })
    }

    /// The one-variable formula `x . r = 0`.
    pub fn annihilator(ring: &SkewRing, r: &SkewPoly) -> Self {
        let m = r.k_degree();
        PPFormula {
            a: MatrixOverR::zeros(ring, m, 0, 1),
            b: MatrixOverR {
                m,
                rows: 1,
                cols: 1,
                entries: vec![r.clone()],
            },
        }
    }

    /// The one-variable formula `EX y . y q = x`.
    pub fn divisibility(ring: &SkewRing, q: &SkewPoly) -> Self {
        let m = q.k_degree();
        PPFormula {
            a: MatrixOverR {
                m,
                rows: 1,
                cols: 1,
                entries: vec![q.clone()],
            },
            b: MatrixOverR::identity(ring, m, 1),
        }
    }

    pub fn bound_vars(&self) -> usize {
        self.a.rows()
    }

    pub fn free_vars(&self) -> usize {
        self.b.rows()
    }

    pub fn equations(&self) -> usize {
        self.a.cols()
    }

    pub fn k_degree(&self) -> usize {
        self.a.k_degree()
    }
}

/// Atomic equations `sum_l x_l . b_l = 0`, each given by its coefficient
/// column `b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AtomicSystem {
    pub free_vars: usize,
    pub equations: Vec<Vec<SkewPoly>>,
}

impl AtomicSystem {
    /// For one free variable, `r` with the system equivalent to `x . r = 0`
    /// (`r = 0` when there is no constraint).
    pub fn single(&self, ring: &SkewRing, m: usize) -> Result<SkewPoly> {
        if self.free_vars != 1 {
            return Err(Error::MultiVariable);
        }
        Ok(match self.equations.first() {
            None => ring.zero(m),
            Some(e) => e[0].clone(),
        })
    }
}

/// In a divisible module the triangular block is always solvable, so only
/// the columns of `B Q` beyond the rank constrain `x`; one free variable
/// collapses them to `x . rgcd = 0`.
pub fn pp_to_atomic(ring: &SkewRing, phi: &PPFormula) -> Result<AtomicSystem> {
    let tri = triangularize(ring, &phi.a)?;
    let bq = phi.b.mul(ring, &tri.q)?;
    let mut equations: Vec<Vec<SkewPoly>> = (tri.rank..bq.cols())
        .map(|j| bq.column(j))
        .filter(|col| col.iter().any(|e| !e.is_zero()))
        .collect();
    if phi.free_vars() == 1 && !equations.is_empty() {
        let mut g = equations[0][0].clone();
        for e in &equations[1..] {
            g = ring.rgcd(&g, &e[0])?;
        }
        equations = vec![vec![ring.make_monic(&g)?.0]];
    }
    Ok(AtomicSystem {
        free_vars: phi.free_vars(),
        equations,
    })
}

/// Whether `sum_l x_l . b_l` has no known nonzero term.
pub fn atomic_holds(solver: &Solver, b: &[SkewPoly], x: &[SeriesElem]) -> Result<bool> {
    let sm = solver.model();
    let mut acc = sm.zero();
    for (bl, xl) in b.iter().zip(x) {
        acc = sm.add(&acc, &sm.act(xl, bl)?)?;
    }
    Ok(acc.is_zero_known())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Satisfaction {
    pub holds: bool,
    pub witness: Option<Vec<SeriesElem>>,
}

/// Decides `EX y . y A = x B` at `x` in the series model: the residual
/// columns must vanish, then the triangular block is solved from its last
/// pivot upwards with [`Solver::solve_div`]. The witness is checked by
/// substitution.
pub fn pp_satisfies(
    solver: &Solver,
    ring: &SkewRing,
    phi: &PPFormula,
    x: &[SeriesElem],
) -> Result<Satisfaction> {
    if x.len() != phi.free_vars() {
        return Err(Error::Shape(format!(
            "{} values for {} free variables",
            x.len(),
            phi.free_vars()
        )));
    }
    let sm = solver.model();
    let tri = triangularize(ring, &phi.a)?;
    let bq = phi.b.mul(ring, &tri.q)?;
    let rhs = |j: usize| -> Result<SeriesElem> {
        let mut acc = sm.zero();
        for (l, xl) in x.iter().enumerate() {
            acc = sm.add(&acc, &sm.act(xl, bq.get(l, j))?)?;
        }
        Ok(acc)
    };
    for j in tri.rank..bq.cols() {
        if !rhs(j)?.is_zero_known() {
            return Ok(Satisfaction {
                holds: false,
                witness: None,
            });
        }
    }
    let a1 = &tri.reduced;
    let k = phi.bound_vars();
    let mut z = vec![sm.zero(); k];
    for j in (0..tri.rank).rev() {
        let mut target = rhs(j)?;
        for (i, zi) in z.iter().enumerate().skip(j + 1) {
            target = sm.sub(&target, &sm.act(zi, a1.get(i, j))?)?;
        }
        z[j] = solver.solve_div(a1.get(j, j), &target)?;
    }
    let mut y = vec![sm.zero(); k];
    for (i, zi) in z.into_iter().enumerate() {
        y[tri.perm[i]] = zi;
    }
    for j in 0..phi.equations() {
        let mut acc = sm.zero();
        for (i, yi) in y.iter().enumerate() {
            acc = sm.add(&acc, &sm.act(yi, phi.a.get(i, j))?)?;
        }
        for (l, xl) in x.iter().enumerate() {
            acc = sm.sub(&acc, &sm.act(xl, phi.b.get(l, j))?)?;
        }
        if !acc.is_zero_known() {
            return Err(Error::PrecisionExhausted(format!(
                "witness fails equation {} below {}",
                j + 1,
                acc.valuation_bound()
            )));
        }
    }
    Ok(Satisfaction {
        holds: true,
        witness: Some(y),
    })
}

/// A complete theory of nonzero divisible modules, given by `|ann(q)|` for
/// canonical representatives `q` of irreducible conjugacy classes, with the
/// value-set data consumed by the henselian comparison.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TheoryDescriptor {
    pub p: u32,
    pub s: u32,
    pub m: usize,
    pub table: BTreeMap<SkewPoly, Eta>,
    pub valueset_tag: Option<String>,
    pub theta_realized: Option<bool>,
}

impl TheoryDescriptor {
    /// `|K_0|`, the size of the fixed field of `phi` in `F_{p^m}`.
    pub fn k0_size(&self) -> u128 {
        (self.p as u128).pow(num_integer::gcd(self.s, self.m as u32))
    }

    /// Every key is its own representative and every finite value a power
    /// of `|K_0|`.
    pub fn check(&self, ring: &SkewRing) -> Result<()> {
        let k0 = self.k0_size();
        for (key, val) in &self.table {
            if ring.conjugacy_rep(key)? != *key {
                return Err(Error::Shape(format!("{} is not a canonical representative", format_poly(key))));
            }
            if let Eta::Finite(mut v) = *val {
                while v > 1 && v % k0 == 0 {
                    v /= k0;
                }
                if v != 1 {
                    return Err(Error::Shape(format!("{val} is not a power of {k0}")));
                }
            }
        }
        Ok(())
    }

    /// `|ann(q)|` in a model of the theory, by multiplicativity over an
    /// irreducible factorization.
    pub fn eta(&self, ring: &SkewRing, q: &SkewPoly) -> Result<Eta> {
        if q.is_zero() {
            return Ok(Eta::Infinite);
        }
        let q = ring.lift(q, self.m)?;
        let deg = q.degree().expect("nonzero");
        let fac = ring.factorize(&q, deg)?;
        let mut acc = Eta::Finite(1);
        let t = ring.t(self.m);
        let parts = std::iter::repeat_n(&t, fac.t_power).chain(fac.factors.iter());
        for f in parts {
            let rep = ring.conjugacy_rep(f)?;
            let v = self
                .table
                .get(&rep)
                .ok_or_else(|| Error::MissingEntry(format_poly(&rep)))?;
            acc = acc.mul(*v);
        }
        Ok(acc)
    }

    /// `ann(s) ⊆ ann(q)`: `ann(s) ∩ ann(q) = ann(rgcd(s, q))` always sits
    /// inside `ann(s)`, so inclusion is equality of sizes.
    pub fn entails(&self, ring: &SkewRing, s: &SkewPoly, q: &SkewPoly) -> Result<bool> {
        if s.is_zero() {
            return Ok(q.is_zero());
        }
        let (s, q) = ring.align(s, q)?;
        let g = ring.rgcd(&s, &q)?;
        Ok(self.eta(ring, &s)? == self.eta(ring, &g)?)
    }
}

/// The descriptor of the series model over `F_{p^m}`: every irreducible
/// conjugacy class up to degree `d`, with `|ann(q)| = p^{s deg q}` for
/// separable `q` and `1` for `t`.
pub fn theory_of_bigmodel(ring: &SkewRing, m: usize, d: usize) -> Result<TheoryDescriptor> {
    let tw = ring.tower();
    let q = (tw.p() as u128).pow(tw.s());
    theory_table(ring, m, d, |r| {
        Ok(if r.is_separable() {
            Eta::Finite(q.pow(r.degree().expect("nonzero") as u32))
        } else {
            Eta::Finite(1)
        })
    })
    .map(|table| TheoryDescriptor {
        p: tw.p(),
        s: tw.s(),
        m,
        table,
        valueset_tag: Some(bigmodel_tag(tw.p(), tw.s())),
        theta_realized: Some(true),
    })
}

/// Counts taken inside `F_{p^big}` only, as if the constants stopped there.
pub fn theory_of_truncated(
    solver: &Solver,
    ring: &SkewRing,
    m: usize,
    d: usize,
    big: usize,
) -> Result<TheoryDescriptor> {
    let tw = ring.tower();
    let table = theory_table(ring, m, d, |r| solver.eta_within(r, big))?;
    Ok(TheoryDescriptor {
        p: tw.p(),
        s: tw.s(),
        m,
        table,
        valueset_tag: Some(format!("{}:const<=F{}^{}", bigmodel_tag(tw.p(), tw.s()), tw.p(), big)),
        theta_realized: Some(true),
    })
}

/// `Z[1/p]` with `tau` multiplying by `p^s`.
pub fn bigmodel_tag(p: u32, s: u32) -> String {
    format!("Z[1/{p}]:tau=x{}", (p as u64).pow(s))
}

fn theory_table(
    ring: &SkewRing,
    m: usize,
    d: usize,
    eta: impl Fn(&SkewPoly) -> Result<Eta>,
) -> Result<BTreeMap<SkewPoly, Eta>> {
    if d > crate::skew::DEFAULT_FACTOR_BOUND {
        return Err(Error::DegreeBoundExceeded {
            degree: d,
            bound: crate::skew::DEFAULT_FACTOR_BOUND,
        });
    }
    let mut table = BTreeMap::new();
    for deg in 1..=d {
        for r in ring.monics(m, deg)? {
            if table.contains_key(&r) || !ring.is_irreducible(&r)? {
                continue;
            }
            let rep = ring.conjugacy_rep_unchecked(&r);
            if let std::collections::btree_map::Entry::Vacant(e) = table.entry(rep) {
                let v = eta(e.key())?;
                e.insert(v);
            }
        }
    }
    Ok(table)
}

/// `r'` with `ann(q) / ann(s) ≅ ann(r')` in every model of `theory`, given
/// `ann(s) ⊆ ann(q)`.
///
/// With `s = s_1 s'` and `s_1` irreducible: if `s_1` left-divides `q` as
/// `s_1 q'`, multiplication by `s_1` carries the quotient onto
/// `ann(q') / ann(s')`; otherwise `s_1` has no roots, multiplication by it
/// is bijective, and `q` is replaced by the `q_1` of `lclm(s_1, q) = s_1 q_1`
/// (for `s_1 = t` this is the coefficientwise Frobenius twist of `q`).
pub fn quotient_invariant(
    ring: &SkewRing,
    q: &SkewPoly,
    s: &SkewPoly,
    theory: &TheoryDescriptor,
) -> Result<SkewPoly> {
    let m = ring.tower().compositum(theory.m, ring.tower().compositum(q.k_degree(), s.k_degree())?)?;
    let q = ring.lift(q, m)?;
    let s = ring.lift(s, m)?;
    if !theory.entails(ring, &s, &q)? {
        return Err(Error::Precondition(format!(
            "x.({}) = 0 does not imply x.({}) = 0",
            format_poly(&s),
            format_poly(&q)
        )));
    }
    if s.is_zero() {
        return Ok(ring.one(m));
    }
    let deg = s.degree().expect("nonzero");
    let fac = ring.factorize(&s, deg)?;
    let t = ring.t(m);
    let mut cur = q;
    for s1 in std::iter::repeat_n(&t, fac.t_power).chain(fac.factors.iter()) {
        let (quot, rem) = ring.right_divmod(&cur, s1)?;
        cur = if rem.is_zero() {
            quot
        } else {
            if theory.eta(ring, s1)? != Eta::Finite(1) {
                return Err(Error::Precondition(format!(
                    "{} has roots but does not divide",
                    format_poly(s1)
                )));
            }
            let l = ring.lclm(s1, &cur)?;
            ring.right_divmod(&l, s1)?.0
        };
    }
    Ok(cur)
}

/// The single polynomial `r` with `phi` equivalent to `x . r = 0`.
pub fn single_variable(ring: &SkewRing, phi: &PPFormula) -> Result<SkewPoly> {
    pp_to_atomic(ring, phi)?.single(ring, phi.k_degree())
}

/// `|psi(N) / phi(N)|` for one-variable formulas with `phi(N) ⊆ psi(N)`.
pub fn pp_index(
    ring: &SkewRing,
    phi: &PPFormula,
    psi: &PPFormula,
    theory: &TheoryDescriptor,
) -> Result<Eta> {
    let r = single_variable(ring, phi)?;
    let q = single_variable(ring, psi)?;
    match (r.is_zero(), q.is_zero()) {
        (true, true) => return Ok(Eta::Finite(1)),
        (false, true) => return Ok(Eta::Infinite),
        (true, false) => {
            return Err(Error::Precondition(
                "the first formula holds everywhere but the second does not".into(),
            ))
        }
        (false, false) => {}
    }
    let rq = quotient_invariant(ring, &q, &r, theory)?;
    theory.eta(ring, &rq)
}

/// Outcome of comparing two descriptors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Equivalent,
    TableDiffers {
        key: SkewPoly,
        left: Eta,
        right: Eta,
    },
    TagDiffers {
        left: String,
        right: String,
    },
    ThetaDiffers {
        left: bool,
        right: bool,
    },
}

impl Verdict {
    pub fn is_equivalent(&self) -> bool {
        *self == Verdict::Equivalent
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Equivalent => write!(f, "EQUIVALENT"),
            Verdict::TableDiffers { key, left, right } => {
                write!(f, "NOT EQUIVALENT: {} -> {left} vs {right}", format_poly(key))
            }
            Verdict::TagDiffers { left, right } => {
                write!(f, "NOT EQUIVALENT: value sets {left} vs {right}")
            }
            Verdict::ThetaDiffers { left, right } => {
                write!(f, "NOT EQUIVALENT: theta realized {left} vs {right}")
            }
        }
    }
}

/// Compares the tables on their common keys; one key set must contain the
/// other. The least disagreeing key is reported.
pub fn decide_equiv_divisible(t1: &TheoryDescriptor, t2: &TheoryDescriptor) -> Result<Verdict> {
    if (t1.p, t1.s, t1.m) != (t2.p, t2.s, t2.m) {
        return Err(Error::FieldMismatch);
    }
    let sub12 = t1.table.keys().all(|k| t2.table.contains_key(k));
    let sub21 = t2.table.keys().all(|k| t1.table.contains_key(k));
    if !sub12 && !sub21 {
        return Err(Error::Incomparable);
    }
    for (key, left) in &t1.table {
        if let Some(right) = t2.table.get(key) {
            if left != right {
                return Ok(Verdict::TableDiffers {
                    key: key.clone(),
                    left: *left,
                    right: *right,
                });
            }
        }
    }
    Ok(Verdict::Equivalent)
}

/// Tables, value-set tags and the realization of `theta` must all agree.
pub fn decide_equiv_ake(t1: &TheoryDescriptor, t2: &TheoryDescriptor) -> Result<Verdict> {
    let (Some(a), Some(b)) = (&t1.valueset_tag, &t2.valueset_tag) else {
        return Err(Error::MissingTag);
    };
    let v = decide_equiv_divisible(t1, t2)?;
    if !v.is_equivalent() {
        return Ok(v);
    }
    if a != b {
        return Ok(Verdict::TagDiffers {
            left: a.clone(),
            right: b.clone(),
        });
    }
    match (t1.theta_realized, t2.theta_realized) {
        (Some(x), Some(y)) if x != y => Ok(Verdict::ThetaDiffers { left: x, right: y }),
        _ => Ok(Verdict::Equivalent),
    }
}

//! Compatible towers of finite fields `F_{p^m}` with the Frobenius power
//! `phi(x) = x^{p^s}`.
//!
//! Each degree `m` is presented as `F_p[X]/(f_m)` where `f_m` is the least
//! monic irreducible polynomial of degree `m` (coefficient vectors compared as
//! base-`p` integers). Elements are plain coefficient vectors in the power
//! basis of the class `g` of `X`; the [`Tower`] carries the moduli and a
//! write-once memo of embeddings `F_{p^m} -> F_{p^{m'}}` for `m | m'`.
//!
//! Embeddings are chosen so that every triangle of the divisor lattice
//! commutes: the image of `g_m` in `F_{p^{m'}}` is obtained through the
//! smallest maximal proper divisor of `m'` above `m`, and the embeddings of
//! the maximal proper divisors are picked as the least roots that agree on
//! pairwise intersections.

use std::cmp::Ordering;
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_integer::Integer;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{add_mod, inv_mod, mul_mod, sub_mod, FpMatrix};

/// Default largest admitted extension degree.
pub const DEFAULT_M_MAX: usize = 24;
/// Default cap on exhaustive root searches when building embeddings.
pub const DEFAULT_SEARCH_CAP: u128 = 1 << 20;

/// An element of `F_{p^m}` in the power basis `1, g, ..., g^{m-1}`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct FieldElem {
    coeffs: Vec<u32>,
}

impl FieldElem {
    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    /// Coefficients of `1, g, g^2, ...`.
    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0] == 1 && self.coeffs[1..].iter().all(|&c| c == 0)
    }

    /// The residue, when the element lies in the prime field coordinates.
    pub fn as_residue(&self) -> Option<u32> {
        if self.coeffs[1..].iter().all(|&c| c == 0) {
            Some(self.coeffs[0])
        } else {
            None
        }
    }

    /// Base-`p` integer encoding `sum c_i p^i`; its order is the canonical
    /// lexicographic order on elements of one degree.
    pub fn index(&self, p: u32) -> u128 {
        self.coeffs
            .iter()
            .rev()
            .fold(0u128, |acc, &c| acc * p as u128 + c as u128)
    }
}

impl Ord for FieldElem {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.coeffs.iter().rev().cmp(other.coeffs.iter().rev()))
    }
}

impl PartialOrd for FieldElem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.degree() == 1 {
            return write!(f, "{}", self.coeffs[0]);
        }
        let mut terms = Vec::new();
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let coef = if c == 1 && i > 0 {
                String::new()
            } else {
                c.to_string()
            };
            terms.push(match i {
                0 => coef,
                1 => format!("{coef}g"),
                _ => format!("{coef}g^{i}"),
            });
        }
        if terms.is_empty() {
            terms.push("0".into());
        }
        write!(f, "[{}]@{}", terms.join("+"), self.degree())
    }
}

struct FieldData {
    /// Monic defining polynomial, low to high, length `m + 1`.
    modulus: Vec<u32>,
    /// Columns: coefficient vectors of `(g^j)^p`.
    frob: FpMatrix,
}

/// A finite-field tower over `F_p` with the Frobenius power `x -> x^{p^s}`.
pub struct Tower {
    p: u32,
    s: u32,
    m_max: usize,
    search_cap: u128,
    fields: Vec<OnceLock<Arc<FieldData>>>,
    /// Image of `g_m` in `F_{p^{m'}}`, slot `m * (m_max + 1) + m'`.
    roots: Vec<OnceLock<FieldElem>>,
    /// Images of the power basis of `F_{p^m}` in `F_{p^{m'}}`.
    embeds: Vec<OnceLock<Arc<Vec<FieldElem>>>>,
}

impl fmt::Debug for Tower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Tower")
            .field("p", &self.p)
            .field("s", &self.s)
            .field("m_max", &self.m_max)
            .finish()
    }
}

fn memo<T: Clone>(cell: &OnceLock<T>, init: impl FnOnce() -> Result<T>) -> Result<T> {
    if let Some(v) = cell.get() {
        return Ok(v.clone());
    }
    let v = init()?;
    // a racing writer computed the same deterministic value
    let _ = cell.set(v);
    Ok(cell.get().expect("memo cell is set").clone())
}

pub(crate) fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= p as u64 {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl Tower {
    pub fn new(p: u32, s: u32, m_max: usize) -> Result<Self> {
        if !is_prime(p) || p > 1 << 16 {
            return Err(Error::NotPrime(p));
        }
        if s == 0 {
            return Err(Error::InvalidConfig("s must be positive".into()));
        }
        if m_max == 0 {
            return Err(Error::InvalidConfig("m_max must be positive".into()));
        }
        let slots = (m_max + 1) * (m_max + 1);
        Ok(Tower {
            p,
            s,
            m_max,
            search_cap: DEFAULT_SEARCH_CAP,
            fields: (0..=m_max).map(|_| OnceLock::new()).collect(),
            roots: (0..slots).map(|_| OnceLock::new()).collect(),
            embeds: (0..slots).map(|_| OnceLock::new()).collect(),
        })
    }

    pub fn with_search_cap(mut self, cap: u128) -> Self {
        self.search_cap = cap;
        self
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    pub fn m_max(&self) -> usize {
        self.m_max
    }

    /// `p^s`, the factor by which `t` scales valuations.
    pub fn q(&self) -> i64 {
        (self.p as i64).pow(self.s)
    }

    pub fn check_degree(&self, m: usize) -> Result<()> {
        if m == 0 || m > self.m_max {
            return Err(Error::MmaxExceeded {
                needed: m,
                m_max: self.m_max,
            });
        }
        Ok(())
    }

    /// Least common admitted degree of `a` and `b`.
    pub fn compositum(&self, a: usize, b: usize) -> Result<usize> {
        let m = a.lcm(&b);
        self.check_degree(m)?;
        Ok(m)
    }

    fn data(&self, m: usize) -> Result<Arc<FieldData>> {
        self.check_degree(m)?;
        memo(&self.fields[m], || {
            let modulus = least_irreducible(self.p, m);
            let frob_cols: Vec<Vec<u32>> = (0..m)
                .map(|j| {
                    let mut xj = vec![0u32; j + 1];
                    xj[j] = 1;
                    let r = fp_poly::powmod(&xj, self.p as u128, &modulus, self.p);
                    pad(r, m)
                })
                .collect();
            Ok(Arc::new(FieldData {
                frob: FpMatrix::from_columns(self.p, m, &frob_cols),
                modulus,
            }))
        })
    }

    /// The monic defining polynomial of degree `m`, coefficients low to high.
    pub fn modulus(&self, m: usize) -> Result<Vec<u32>> {
        Ok(self.data(m)?.modulus.clone())
    }

    pub fn zero(&self, m: usize) -> FieldElem {
        FieldElem {
            coeffs: vec![0; m],
        }
    }

    pub fn one(&self, m: usize) -> FieldElem {
        let mut e = self.zero(m);
        e.coeffs[0] = 1 % self.p;
        e
    }

    pub fn residue(&self, c: i64, m: usize) -> FieldElem {
        let mut e = self.zero(m);
        e.coeffs[0] = c.rem_euclid(self.p as i64) as u32;
        e
    }

    /// The class `g` of `X` in `F_{p^m}` (for `m = 1` this is `0`).
    pub fn generator(&self, m: usize) -> Result<FieldElem> {
        self.check_degree(m)?;
        if m == 1 {
            let f = self.modulus(1)?;
            return Ok(self.residue(-(f[0] as i64), 1));
        }
        let mut e = self.zero(m);
        e.coeffs[1] = 1;
        Ok(e)
    }

    pub fn from_coeffs(&self, m: usize, coeffs: &[u32]) -> Result<FieldElem> {
        self.check_degree(m)?;
        if coeffs.len() > m {
            return Err(Error::Shape(format!(
                "{} coefficients for a degree-{m} element",
                coeffs.len()
            )));
        }
        let mut c: Vec<u32> = coeffs.iter().map(|&x| x % self.p).collect();
        c.resize(m, 0);
        Ok(FieldElem { coeffs: c })
    }

    pub fn from_index(&self, m: usize, mut index: u128) -> FieldElem {
        let mut e = self.zero(m);
        for c in e.coeffs.iter_mut() {
            *c = (index % self.p as u128) as u32;
            index /= self.p as u128;
        }
        e
    }

    pub fn field_size(&self, m: usize) -> u128 {
        (self.p as u128).pow(m as u32)
    }

    /// All elements of `F_{p^m}` in ascending canonical order.
    pub fn elements(&self, m: usize) -> impl Iterator<Item = FieldElem> + '_ {
        (0..self.field_size(m)).map(move |i| self.from_index(m, i))
    }

    pub fn random<R: Rng + ?Sized>(&self, m: usize, rng: &mut R) -> FieldElem {
        FieldElem {
            coeffs: (0..m).map(|_| rng.gen_range(0..self.p)).collect(),
        }
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, m: usize, rng: &mut R) -> FieldElem {
        loop {
            let e = self.random(m, rng);
            if !e.is_zero() {
                return e;
            }
        }
    }

    fn same(a: &FieldElem, b: &FieldElem) {
        assert_eq!(
            a.degree(),
            b.degree(),
            "field elements of different degrees; align them first"
        );
    }

    /// Sum of two elements of the same degree.
    pub fn add(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        Self::same(a, b);
        FieldElem {
            coeffs: a
                .coeffs
                .iter()
                .zip(&b.coeffs)
                .map(|(&x, &y)| add_mod(x, y, self.p))
                .collect(),
        }
    }

    pub fn sub(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        Self::same(a, b);
        FieldElem {
            coeffs: a
                .coeffs
                .iter()
                .zip(&b.coeffs)
                .map(|(&x, &y)| sub_mod(x, y, self.p))
                .collect(),
        }
    }

    pub fn neg(&self, a: &FieldElem) -> FieldElem {
        FieldElem {
            coeffs: a.coeffs.iter().map(|&x| (self.p - x) % self.p).collect(),
        }
    }

    pub fn scale(&self, a: &FieldElem, c: u32) -> FieldElem {
        FieldElem {
            coeffs: a.coeffs.iter().map(|&x| mul_mod(x, c, self.p)).collect(),
        }
    }

    /// Product of two elements of the same degree.
    pub fn mul(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        Self::same(a, b);
        let m = a.degree();
        if m == 1 {
            return FieldElem {
                coeffs: vec![mul_mod(a.coeffs[0], b.coeffs[0], self.p)],
            };
        }
        let data = self.data(m).expect("element degree is admitted");
        let p = self.p as u64;
        let mut prod = vec![0u64; 2 * m - 1];
        for (i, &x) in a.coeffs.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.coeffs.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p;
            }
        }
        let f = &data.modulus;
        for k in (m..prod.len()).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            for i in 0..m {
                let sub = c * f[i] as u64 % p;
                prod[k - m + i] = (prod[k - m + i] + p - sub) % p;
            }
            prod[k] = 0;
        }
        FieldElem {
            coeffs: prod[..m].iter().map(|&c| c as u32).collect(),
        }
    }

    pub fn inv(&self, a: &FieldElem) -> Result<FieldElem> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let m = a.degree();
        if m == 1 {
            return Ok(FieldElem {
                coeffs: vec![inv_mod(a.coeffs[0], self.p)],
            });
        }
        let data = self.data(m)?;
        let inv = fp_poly::inverse_mod(&trim(a.coeffs.clone()), &data.modulus, self.p)
            .expect("nonzero element of a field is invertible");
        Ok(FieldElem {
            coeffs: pad(inv, m),
        })
    }

    pub fn div(&self, a: &FieldElem, b: &FieldElem) -> Result<FieldElem> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    pub fn pow(&self, a: &FieldElem, mut e: u128) -> FieldElem {
        let mut acc = self.one(a.degree());
        let mut base = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// `x^{p^e}` for the absolute Frobenius.
    pub fn frob_abs(&self, x: &FieldElem, e: usize) -> FieldElem {
        let m = x.degree();
        let e = e % m;
        if m == 1 || e == 0 {
            return x.clone();
        }
        let data = self.data(m).expect("element degree is admitted");
        let mut v = x.coeffs.clone();
        for _ in 0..e {
            v = data.frob.mul_vec(&v);
        }
        FieldElem { coeffs: v }
    }

    /// `phi^k(x) = x^{p^{sk}}`; negative `k` applies the inverse automorphism.
    pub fn frob_pow(&self, x: &FieldElem, k: i64) -> FieldElem {
        let m = x.degree() as i64;
        let e = (self.s as i64 * k).rem_euclid(m);
        self.frob_abs(x, e as usize)
    }

    /// Number of elements of `F_{p^m}` fixed by `phi`, i.e. `p^{gcd(s, m)}`.
    pub fn fixed_subfield_size(&self, m: usize) -> u128 {
        self.field_size((self.s as usize).gcd(&m))
    }

    /// Degree of the subfield of `F_{p^m}` fixed by `phi`.
    pub fn fixed_subfield_degree(&self, m: usize) -> usize {
        (self.s as usize).gcd(&m)
    }

    /// Matrix of `y -> y^{p^e}` on `F_{p^m}`.
    pub(crate) fn frob_matrix(&self, m: usize, e: usize) -> Result<FpMatrix> {
        let data = self.data(m)?;
        let mut acc = FpMatrix::from_columns(
            self.p,
            m,
            &(0..m)
                .map(|j| {
                    let mut v = vec![0; m];
                    v[j] = 1;
                    v
                })
                .collect::<Vec<_>>(),
        );
        for _ in 0..(e % m) {
            acc = data.frob.mul(&acc);
        }
        Ok(acc)
    }

    pub(crate) fn from_vec(&self, v: Vec<u32>) -> FieldElem {
        FieldElem { coeffs: v }
    }

    /// Image of `x` under the tower embedding into `F_{p^{target}}`.
    pub fn embed_lift(&self, x: &FieldElem, target: usize) -> Result<FieldElem> {
        let m = x.degree();
        self.check_degree(target)?;
        if target % m != 0 {
            return Err(Error::DegreeNotMultiple { from: m, to: target });
        }
        if m == target {
            return Ok(x.clone());
        }
        if m == 1 {
            return Ok(self.residue(x.coeffs[0] as i64, target));
        }
        let basis = self.embedding_basis(m, target)?;
        let mut acc = vec![0u32; target];
        for (c, img) in x.coeffs.iter().zip(basis.iter()) {
            if *c == 0 {
                continue;
            }
            for (a, &b) in acc.iter_mut().zip(&img.coeffs) {
                *a = add_mod(*a, mul_mod(*c, b, self.p), self.p);
            }
        }
        Ok(FieldElem { coeffs: acc })
    }

    /// Lifts both arguments into their compositum.
    pub fn align(&self, a: &FieldElem, b: &FieldElem) -> Result<(FieldElem, FieldElem)> {
        if a.degree() == b.degree() {
            return Ok((a.clone(), b.clone()));
        }
        let m = self.compositum(a.degree(), b.degree())?;
        Ok((self.embed_lift(a, m)?, self.embed_lift(b, m)?))
    }

    /// Equality of elements living at possibly different levels.
    pub fn same_element(&self, a: &FieldElem, b: &FieldElem) -> Result<bool> {
        let (a, b) = self.align(a, b)?;
        Ok(a == b)
    }

    /// Rewrites `x` in the smallest subfield that contains it.
    pub fn descend(&self, x: &FieldElem) -> Result<FieldElem> {
        let m = x.degree();
        if m == 1 {
            return Ok(x.clone());
        }
        for d in (1..m).filter(|d| m % d == 0) {
            if self.frob_abs(x, d) != *x {
                continue;
            }
            if d == 1 {
                return Ok(self.residue(x.coeffs[0] as i64, 1));
            }
            let basis = self.embedding_basis(d, m)?;
            let cols: Vec<Vec<u32>> = basis.iter().map(|b| b.coeffs.clone()).collect();
            let mat = FpMatrix::from_columns(self.p, m, &cols);
            let sol = mat
                .solve(&x.coeffs)
                .expect("fixed points of x^(p^d) form the image of the degree-d field");
            return Ok(FieldElem { coeffs: sol });
        }
        Ok(x.clone())
    }

    fn embedding_basis(&self, m: usize, target: usize) -> Result<Arc<Vec<FieldElem>>> {
        let slot = m * (self.m_max + 1) + target;
        memo(&self.embeds[slot], || {
            let beta = self.root_image(m, target)?;
            let mut powers = Vec::with_capacity(m);
            let mut cur = self.one(target);
            for _ in 0..m {
                powers.push(cur.clone());
                cur = self.mul(&cur, &beta);
            }
            Ok(Arc::new(powers))
        })
    }

    /// Image of `g_m` in `F_{p^{target}}`.
    fn root_image(&self, m: usize, target: usize) -> Result<FieldElem> {
        debug_assert!(target % m == 0 && m < target);
        let slot = m * (self.m_max + 1) + target;
        memo(&self.roots[slot], || {
            if m == 1 {
                return self.embed_lift(&self.generator(1)?, target);
            }
            let maximal = maximal_divisors(target);
            if maximal.contains(&m) {
                return self.maximal_root(m, target, &maximal);
            }
            let via = *maximal
                .iter()
                .find(|&&d| d % m == 0)
                .expect("a proper divisor lies below a maximal one");
            let inner = self.embed_lift(&self.generator(m)?, via)?;
            self.embed_lift(&inner, target)
        })
    }

    /// Root of `f_d` in `F_{p^{target}}` for a maximal proper divisor `d`,
    /// compatible with every smaller maximal divisor on their intersection.
    fn maximal_root(&self, d: usize, target: usize, maximal: &[usize]) -> Result<FieldElem> {
        let candidates = self.roots_in(d, target)?;
        let earlier: Vec<usize> = maximal.iter().copied().filter(|&e| e < d).collect();
        'cand: for beta in candidates {
            for &e in &earlier {
                let g = d.gcd(&e);
                if g == 1 {
                    continue;
                }
                // image of g_g through F_{p^d} using the candidate root
                let inner = self.embed_lift(&self.generator(g)?, d)?;
                let via_candidate = eval_in_basis(self, &inner, &beta);
                let via_e = self.embed_lift(&self.embed_lift(&self.generator(g)?, e)?, target)?;
                if via_candidate != via_e {
                    continue 'cand;
                }
            }
            return Ok(beta);
        }
        unreachable!("some conjugate root is compatible on the intersection")
    }

    /// All roots of the degree-`d` defining polynomial in `F_{p^{target}}`,
    /// sorted ascending.
    fn roots_in(&self, d: usize, target: usize) -> Result<Vec<FieldElem>> {
        let size = self.field_size(d);
        if size > self.search_cap {
            return Err(Error::SearchTooLarge {
                size,
                cap: self.search_cap,
            });
        }
        let f = self.modulus(d)?;
        let mut shifted = self.frob_matrix(target, d)?;
        let mut minus_id = FpMatrix::zeros(self.p, target, target);
        for i in 0..target {
            minus_id.set(i, i, self.p - 1);
        }
        shifted.add_assign(&minus_id);
        let sub_basis = shifted.kernel();
        debug_assert_eq!(sub_basis.len(), d);
        let mut first = None;
        for idx in 0..size {
            let mut v = vec![0u32; target];
            let mut k = idx;
            for b in &sub_basis {
                let c = (k % self.p as u128) as u32;
                k /= self.p as u128;
                if c != 0 {
                    for (a, &y) in v.iter_mut().zip(b) {
                        *a = add_mod(*a, mul_mod(c, y, self.p), self.p);
                    }
                }
            }
            let x = FieldElem { coeffs: v };
            if self.eval_fp_poly(&f, &x).is_zero() {
                first = Some(x);
                break;
            }
        }
        let root = first.expect("an irreducible of degree d splits in a degree-d-multiple field");
        let mut roots: Vec<FieldElem> = (0..d).map(|i| self.frob_abs(&root, i)).collect();
        roots.sort();
        roots.dedup();
        Ok(roots)
    }

    /// Evaluates a polynomial with `F_p` coefficients at `x`.
    pub(crate) fn eval_fp_poly(&self, f: &[u32], x: &FieldElem) -> FieldElem {
        let mut acc = self.zero(x.degree());
        for &c in f.iter().rev() {
            acc = self.mul(&acc, x);
            acc.coeffs[0] = add_mod(acc.coeffs[0], c, self.p);
        }
        acc
    }
}

fn eval_in_basis(tower: &Tower, x: &FieldElem, beta: &FieldElem) -> FieldElem {
    let mut acc = tower.zero(beta.degree());
    let mut pw = tower.one(beta.degree());
    for &c in x.coeffs() {
        if c != 0 {
            acc = tower.add(&acc, &tower.scale(&pw, c));
        }
        pw = tower.mul(&pw, beta);
    }
    acc
}

fn maximal_divisors(n: usize) -> Vec<usize> {
    let mut out: Vec<usize> = prime_factors(n).into_iter().map(|l| n / l).collect();
    out.sort_unstable();
    out
}

fn prime_factors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn trim(mut v: Vec<u32>) -> Vec<u32> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn pad(mut v: Vec<u32>, m: usize) -> Vec<u32> {
    v.resize(m, 0);
    v
}

/// Least monic irreducible of degree `m`, scanning lower coefficients as a
/// base-`p` counter.
fn least_irreducible(p: u32, m: usize) -> Vec<u32> {
    let mut code: u128 = 0;
    loop {
        let mut f = Vec::with_capacity(m + 1);
        let mut k = code;
        for _ in 0..m {
            f.push((k % p as u128) as u32);
            k /= p as u128;
        }
        f.push(1);
        if fp_poly::is_irreducible(&f, p) {
            return f;
        }
        code += 1;
    }
}

/// Polynomials over `F_p`, coefficient vectors low to high with no trailing
/// zeros (the zero polynomial is empty).
pub(crate) mod fp_poly {
    use super::trim;
    use crate::linalg::{add_mod, inv_mod, mul_mod, sub_mod};

    pub fn mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u32; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = add_mod(out[i + j], mul_mod(x, y, p), p);
            }
        }
        trim(out)
    }

    pub fn sub(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let n = a.len().max(b.len());
        let out = (0..n)
            .map(|i| sub_mod(*a.get(i).unwrap_or(&0), *b.get(i).unwrap_or(&0), p))
            .collect();
        trim(out)
    }

    pub fn divmod(a: &[u32], b: &[u32], p: u32) -> (Vec<u32>, Vec<u32>) {
        assert!(!b.is_empty(), "division by the zero polynomial");
        let mut r = trim(a.to_vec());
        if r.len() < b.len() {
            return (Vec::new(), r);
        }
        let mut q = vec![0u32; r.len() - b.len() + 1];
        let lead_inv = inv_mod(*b.last().unwrap(), p);
        while r.len() >= b.len() {
            let shift = r.len() - b.len();
            let c = mul_mod(*r.last().unwrap(), lead_inv, p);
            q[shift] = c;
            for (i, &bc) in b.iter().enumerate() {
                r[shift + i] = sub_mod(r[shift + i], mul_mod(c, bc, p), p);
            }
            r = trim(r);
        }
        (trim(q), r)
    }

    pub fn rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        divmod(a, b, p).1
    }

    pub fn gcd(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
        while !b.is_empty() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        if let Some(&l) = a.last() {
            let li = inv_mod(l, p);
            a = a.iter().map(|&c| mul_mod(c, li, p)).collect();
        }
        a
    }

    pub fn powmod(base: &[u32], mut e: u128, f: &[u32], p: u32) -> Vec<u32> {
        let mut acc = vec![1u32];
        let mut b = rem(base, f, p);
        while e > 0 {
            if e & 1 == 1 {
                acc = rem(&mul(&acc, &b, p), f, p);
            }
            b = rem(&mul(&b, &b, p), f, p);
            e >>= 1;
        }
        acc
    }

    /// Inverse of `a` modulo `f` by the extended Euclidean algorithm.
    pub fn inverse_mod(a: &[u32], f: &[u32], p: u32) -> Option<Vec<u32>> {
        let (mut r0, mut r1) = (f.to_vec(), rem(a, f, p));
        let (mut s0, mut s1): (Vec<u32>, Vec<u32>) = (Vec::new(), vec![1]);
        while !r1.is_empty() {
            let (q, r) = divmod(&r0, &r1, p);
            let s = sub(&s0, &mul(&q, &s1, p), p);
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
        }
        if r0.len() != 1 {
            return None;
        }
        let c = inv_mod(r0[0], p);
        Some(rem(
            &s0.iter().map(|&x| mul_mod(x, c, p)).collect::<Vec<_>>(),
            f,
            p,
        ))
    }

    /// Ben-Or: `f` of degree `m` is irreducible iff
    /// `gcd(f, X^{p^i} - X) = 1` for `1 <= i <= m/2`.
    pub fn is_irreducible(f: &[u32], p: u32) -> bool {
        let m = f.len() - 1;
        if m == 0 {
            return false;
        }
        if m == 1 {
            return true;
        }
        let x = vec![0, 1];
        let mut xp = x.clone();
        for _ in 0..m / 2 {
            xp = powmod(&xp, p as u128, f, p);
            let g = gcd(f, &sub(&xp, &x, p), p);
            if g.len() > 1 {
                return false;
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tw() -> Tower {
        Tower::new(2, 1, DEFAULT_M_MAX).unwrap()
    }

    /// Trial division by every monic polynomial of degree <= m/2.
    fn irreducible_by_trial_division(f: &[u32], p: u32) -> bool {
        let m = f.len() - 1;
        for d in 1..=m / 2 {
            for code in 0..(p as u64).pow(d as u32) {
                let mut g = Vec::new();
                let mut k = code;
                for _ in 0..d {
                    g.push((k % p as u64) as u32);
                    k /= p as u64;
                }
                g.push(1);
                if fp_poly::rem(f, &g, p).is_empty() {
                    return false;
                }
            }
        }
        true
    }

    #[test]
    fn defining_polynomials_are_least_irreducibles() {
        let t = tw();
        assert_eq!(t.modulus(2).unwrap(), vec![1, 1, 1]);
        assert_eq!(t.modulus(3).unwrap(), vec![1, 1, 0, 1]);
        assert_eq!(t.modulus(4).unwrap(), vec![1, 1, 0, 0, 1]);
        for p in [2u32, 3, 5] {
            let t = Tower::new(p, 1, 12).unwrap();
            for m in 1..=(if p == 2 { 12 } else { 6 }) {
                let f = t.modulus(m).unwrap();
                assert!(irreducible_by_trial_division(&f, p), "p={p} m={m}");
            }
        }
    }

    #[test]
    fn embed_lift_examples() {
        let t = tw();
        let one = t.one(1);
        assert_eq!(t.embed_lift(&one, 2).unwrap(), t.one(2));
        let g = t.generator(2).unwrap();
        let img = t.embed_lift(&g, 4).unwrap();
        // X^2 + X + 1 vanishes at the image
        let f = t.modulus(2).unwrap();
        assert!(t.eval_fp_poly(&f, &img).is_zero());
        assert_eq!(
            t.embed_lift(&g, 3),
            Err(Error::DegreeNotMultiple { from: 2, to: 3 })
        );
        assert!(matches!(
            t.embed_lift(&g, 26),
            Err(Error::MmaxExceeded { .. })
        ));
    }

    #[test]
    fn frob_examples() {
        let t = tw();
        let g = t.generator(2).unwrap();
        let g1 = t.add(&g, &t.one(2));
        assert_eq!(t.frob_pow(&g, 1), g1);
        assert_eq!(t.frob_pow(&g, 0), g);
        let mut rng = rand::thread_rng();
        for _ in 0..100 {
            let x = t.random(6, &mut rng);
            assert_eq!(t.frob_pow(&t.frob_pow(&x, -1), 1), x);
        }
    }

    #[test]
    fn frob_is_pth_power() {
        let t = Tower::new(3, 2, 8).unwrap();
        let mut rng = rand::thread_rng();
        for _ in 0..20 {
            let x = t.random(4, &mut rng);
            assert_eq!(t.frob_pow(&x, 1), t.pow(&x, 9));
        }
    }

    #[test]
    fn fixed_subfield_size_by_enumeration() {
        let cases = [(2u32, 1u32, 1usize, 2u128), (2, 1, 2, 2), (3, 2, 4, 9)];
        for (p, s, m, expected) in cases {
            let t = Tower::new(p, s, 8).unwrap();
            assert_eq!(t.fixed_subfield_size(m), expected);
            let fixed = t.elements(m).filter(|x| t.frob_pow(x, 1) == *x).count() as u128;
            assert_eq!(fixed, expected);
        }
    }

    #[test]
    fn inverse_and_division() {
        let t = Tower::new(3, 1, 8).unwrap();
        for x in t.elements(3).skip(1) {
            let xi = t.inv(&x).unwrap();
            assert!(t.mul(&x, &xi).is_one());
        }
        assert_eq!(t.inv(&t.zero(3)), Err(Error::DivisionByZero));
    }

    #[test]
    fn embeddings_are_ring_maps() {
        let t = tw();
        let mut rng = rand::thread_rng();
        for (m, mp) in [(2, 4), (2, 6), (3, 6), (4, 8), (3, 12), (4, 12), (6, 12)] {
            assert!(t.embed_lift(&t.one(m), mp).unwrap().is_one());
            for _ in 0..20 {
                let (x, y) = (t.random(m, &mut rng), t.random(m, &mut rng));
                let (ex, ey) = (t.embed_lift(&x, mp).unwrap(), t.embed_lift(&y, mp).unwrap());
                assert_eq!(t.embed_lift(&t.add(&x, &y), mp).unwrap(), t.add(&ex, &ey));
                assert_eq!(t.embed_lift(&t.mul(&x, &y), mp).unwrap(), t.mul(&ex, &ey));
            }
        }
    }

    #[test]
    fn embedding_triangles_commute() {
        for p in [2u32, 3] {
            let top = if p == 2 { 24 } else { 12 };
            let t = Tower::new(p, 1, top).unwrap();
            for m3 in 1..=top {
                for m2 in (1..m3).filter(|d| m3 % d == 0) {
                    for m1 in (1..m2).filter(|d| m2 % d == 0) {
                        let g = t.generator(m1).unwrap();
                        let two_step = t
                            .embed_lift(&t.embed_lift(&g, m2).unwrap(), m3)
                            .unwrap();
                        assert_eq!(two_step, t.embed_lift(&g, m3).unwrap(), "{m1}|{m2}|{m3}");
                    }
                }
            }
        }
    }

    #[test]
    fn descend_recovers_subfield_elements() {
        let t = tw();
        let mut rng = rand::thread_rng();
        for _ in 0..20 {
            let x = t.random(3, &mut rng);
            let up = t.embed_lift(&x, 12).unwrap();
            let down = t.descend(&up).unwrap();
            assert!(down.degree() <= 3);
            assert!(t.same_element(&down, &x).unwrap());
        }
        let g = t.generator(4).unwrap();
        assert_eq!(t.descend(&g).unwrap(), g);
    }

    #[test]
    fn display_forms() {
        let t = tw();
        let g = t.generator(2).unwrap();
        assert_eq!(t.add(&g, &t.one(2)).to_string(), "[g+1]@2");
        assert_eq!(t.one(1).to_string(), "1");
        assert_eq!(t.zero(3).to_string(), "[0]@3");
        let t3 = Tower::new(3, 1, 4).unwrap();
        let x = t3.from_coeffs(3, &[1, 0, 2]).unwrap();
        assert_eq!(x.to_string(), "[2g^2+1]@3");
    }
}

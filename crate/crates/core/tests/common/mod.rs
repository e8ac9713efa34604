#![allow(dead_code)]

use rand::Rng;
use skewval::series::Exp;
use skewval::{FieldElem, SeriesElem, SeriesModel, SkewPoly, SkewRing, Tower, Value};

pub fn random_poly<R: Rng>(ring: &SkewRing, m: usize, max_deg: usize, rng: &mut R) -> SkewPoly {
    let tw = ring.tower();
    let d = rng.gen_range(0..=max_deg);
    let coeffs = (0..=d).map(|_| tw.random(m, rng)).collect();
    ring.from_coeffs_in(m, coeffs).unwrap()
}

pub fn random_nonzero_poly<R: Rng>(ring: &SkewRing, m: usize, max_deg: usize, rng: &mut R) -> SkewPoly {
    loop {
        let q = random_poly(ring, m, max_deg, rng);
        if !q.is_zero() {
            return q;
        }
    }
}

/// Every monic polynomial over `F_{p^m}` of degree at most `d`.
pub fn monics_up_to(ring: &SkewRing, m: usize, d: usize) -> Vec<SkewPoly> {
    (0..=d).flat_map(|k| ring.monics(m, k).unwrap().collect::<Vec<_>>()).collect()
}

/// Up to three terms with exponents `a / p^j`, `|a| <= 12`, `j <= 2`.
pub fn random_series<R: Rng>(sm: &SeriesModel, m: usize, rng: &mut R) -> SeriesElem {
    let tw = sm.tower();
    let p = tw.p() as i64;
    let n = rng.gen_range(1..=3);
    let terms = (0..n)
        .map(|_| {
            let den = p.pow(rng.gen_range(0..=2));
            (Exp::new(rng.gen_range(-12..=12), den), tw.random_nonzero(m, rng))
        })
        .collect();
    sm.from_terms(terms, Value::Infinity).unwrap()
}

/// Nonzero, every exponent positive.
pub fn random_positive_series<R: Rng>(sm: &SeriesModel, m: usize, rng: &mut R) -> SeriesElem {
    let tw = sm.tower();
    let p = tw.p() as i64;
    loop {
        let n = rng.gen_range(1..=3);
        let terms = (0..n)
            .map(|_| {
                let den = p.pow(rng.gen_range(0..=2));
                (Exp::new(rng.gen_range(1..=20), den), tw.random_nonzero(m, rng))
            })
            .collect();
        let x = sm.from_terms(terms, Value::Infinity).unwrap();
        if !x.is_zero_known() {
            return x;
        }
    }
}

// Ordinary polynomials over one F_{p^m}, lowest coefficient first.

fn trim(tw: &Tower, m: usize, mut a: Vec<FieldElem>) -> Vec<FieldElem> {
    while a.last().is_some_and(|c| c.is_zero()) {
        a.pop();
    }
    let _ = (tw, m);
    a
}

fn poly_rem(tw: &Tower, m: usize, a: &[FieldElem], b: &[FieldElem]) -> Vec<FieldElem> {
    let mut r = a.to_vec();
    let lead_inv = tw.inv(b.last().unwrap()).unwrap();
    while r.len() >= b.len() {
        let c = tw.mul(r.last().unwrap(), &lead_inv);
        let shift = r.len() - b.len();
        for (i, bi) in b.iter().enumerate() {
            r[shift + i] = tw.sub(&r[shift + i], &tw.mul(&c, bi));
        }
        r = trim(tw, m, r);
    }
    r
}

fn poly_gcd(tw: &Tower, m: usize, a: &[FieldElem], b: &[FieldElem]) -> Vec<FieldElem> {
    let (mut a, mut b) = (a.to_vec(), b.to_vec());
    while !b.is_empty() {
        let r = poly_rem(tw, m, &a, &b);
        a = b;
        b = r;
    }
    a
}

/// Distinct roots of the additive polynomial `X -> X.q` in the algebraic
/// closure, from the ordinary polynomial alone: take `p`-th roots while the
/// derivative vanishes, then count `deg L - deg gcd(L, L')`.
pub fn additive_root_count(tw: &Tower, q: &SkewPoly) -> u128 {
    let m = q.k_degree();
    let qq = (tw.p() as usize).pow(tw.s());
    let deg = q.degree().unwrap();
    let mut l = vec![tw.zero(m); qq.pow(deg as u32) + 1];
    for (i, a) in q.coeffs().iter().enumerate() {
        l[qq.pow(i as u32)] = a.clone();
    }
    let p = tw.p() as usize;
    loop {
        let d: Vec<FieldElem> = l
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| tw.scale(c, (k % p) as u32))
            .collect();
        let d = trim(tw, m, d);
        if d.is_empty() {
            // L is a p-th power
            l = l
                .iter()
                .step_by(p)
                .map(|c| tw.frob_abs(c, m - 1))
                .collect();
            continue;
        }
        let g = poly_gcd(tw, m, &l, &d);
        return (l.len() - g.len()) as u128;
    }
}

/// Roots of `X -> X.q` in `F_{p^k}`, by trying every element.
pub fn enumerate_roots(tw: &Tower, ring: &SkewRing, q: &SkewPoly, k: usize) -> Vec<FieldElem> {
    let q = ring.lift(q, tw.compositum(k, q.k_degree()).unwrap()).unwrap();
    let big = q.k_degree();
    tw.elements(big)
        .filter(|x| ring.act_field(x, &q).unwrap().is_zero())
        .collect()
}

/// All roots of `q`, enumerated in the first `F_{p^k}`, `k <= k_cap`, that
/// holds `expected` of them.
pub fn split_roots(
    tw: &Tower,
    ring: &SkewRing,
    q: &SkewPoly,
    expected: u128,
    k_cap: usize,
) -> Option<(usize, Vec<FieldElem>)> {
    (1..=k_cap)
        .filter(|k| k % q.k_degree() == 0)
        .map(|k| (k, enumerate_roots(tw, ring, q, k)))
        .find(|(_, r)| r.len() as u128 == expected)
}

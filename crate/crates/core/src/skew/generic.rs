//! Twisted polynomials over the rational function field `F_p(z)` with
//! `phi(f)(z) = f(z^p)`.
//!
//! Here `phi` is not onto (`z` has no preimage), so the ring is right but not
//! left euclidean. Only multiplication and right division are provided.

use crate::error::{Error, Result};
use crate::field::{fp_poly, is_prime};
use crate::linalg::{inv_mod, mul_mod};

/// A reduced fraction `num / den` with `den` monic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatFn {
    num: Vec<u32>,
    den: Vec<u32>,
}

impl RatFn {
    pub fn is_zero(&self) -> bool {
        self.num.is_empty()
    }

    pub fn numerator(&self) -> &[u32] {
        &self.num
    }

    pub fn denominator(&self) -> &[u32] {
        &self.den
    }
}

/// `sum t^i a_i` with `a_i` in `F_p(z)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenericPoly {
    coeffs: Vec<RatFn>,
}

impl GenericPoly {
    pub fn coeffs(&self) -> &[RatFn] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

/// The ring `F_p(z)[t; z -> z^p]`.
#[derive(Clone, Copy, Debug)]
pub struct GenericRing {
    p: u32,
}

impl GenericRing {
    pub fn new(p: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(GenericRing { p })
    }

    fn reduce(&self, num: Vec<u32>, den: Vec<u32>) -> RatFn {
        assert!(!den.is_empty(), "zero denominator");
        if num.is_empty() {
            return RatFn {
                num,
                den: vec![1],
            };
        }
        let g = fp_poly::gcd(&num, &den, self.p);
        let num = fp_poly::divmod(&num, &g, self.p).0;
        let den = fp_poly::divmod(&den, &g, self.p).0;
        let li = inv_mod(*den.last().unwrap(), self.p);
        let scale = |v: Vec<u32>| v.into_iter().map(|c| mul_mod(c, li, self.p)).collect();
        RatFn {
            num: scale(num),
            den: scale(den),
        }
    }

    /// The fraction with numerator and denominator given low to high.
    pub fn ratfn(&self, num: &[u32], den: &[u32]) -> Result<RatFn> {
        let clean = |v: &[u32]| {
            let mut v: Vec<u32> = v.iter().map(|c| c % self.p).collect();
            while v.last() == Some(&0) {
                v.pop();
            }
            v
        };
        let den = clean(den);
        if den.is_empty() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.reduce(clean(num), den))
    }

    pub fn z(&self) -> RatFn {
        self.reduce(vec![0, 1], vec![1])
    }

    pub fn constant(&self, c: u32) -> RatFn {
        self.reduce(if c % self.p == 0 { vec![] } else { vec![c % self.p] }, vec![1])
    }

    pub fn add(&self, a: &RatFn, b: &RatFn) -> RatFn {
        let p = self.p;
        let lhs = fp_poly::mul(&a.num, &b.den, p);
        let rhs = fp_poly::mul(&b.num, &a.den, p);
        let zero: Vec<u32> = Vec::new();
        let num = fp_poly::sub(&lhs, &fp_poly::sub(&zero, &rhs, p), p);
        self.reduce(num, fp_poly::mul(&a.den, &b.den, p))
    }

    pub fn neg(&self, a: &RatFn) -> RatFn {
        let num = a.num.iter().map(|&c| (self.p - c) % self.p).collect();
        RatFn {
            num,
            den: a.den.clone(),
        }
    }

    pub fn mul(&self, a: &RatFn, b: &RatFn) -> RatFn {
        self.reduce(
            fp_poly::mul(&a.num, &b.num, self.p),
            fp_poly::mul(&a.den, &b.den, self.p),
        )
    }

    pub fn inv(&self, a: &RatFn) -> Result<RatFn> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.reduce(a.den.clone(), a.num.clone()))
    }

    /// `f(z) -> f(z^p)`.
    pub fn phi(&self, a: &RatFn) -> RatFn {
        let spread = |v: &[u32]| {
            let mut out = vec![0u32; v.len().saturating_sub(1) * self.p as usize + 1];
            for (i, &c) in v.iter().enumerate() {
                out[i * self.p as usize] = c;
            }
            if v.is_empty() {
                out.clear();
            }
            out
        };
        self.reduce(spread(&a.num), spread(&a.den))
    }

    /// The `c` with `phi(c) = a`, when it exists.
    pub fn phi_preimage(&self, a: &RatFn) -> Option<RatFn> {
        let p = self.p as usize;
        let shrink = |v: &[u32]| -> Option<Vec<u32>> {
            if v.iter().enumerate().any(|(i, &c)| c != 0 && i % p != 0) {
                return None;
            }
            Some(v.iter().step_by(p).copied().collect())
        };
        Some(self.reduce(shrink(&a.num)?, shrink(&a.den)?))
    }

    pub fn poly(&self, coeffs: Vec<RatFn>) -> GenericPoly {
        let mut coeffs = coeffs;
        while coeffs.last().is_some_and(RatFn::is_zero) {
            coeffs.pop();
        }
        GenericPoly { coeffs }
    }

    pub fn monomial(&self, i: usize, c: RatFn) -> GenericPoly {
        let mut coeffs = vec![self.constant(0); i];
        coeffs.push(c);
        self.poly(coeffs)
    }

    pub fn add_poly(&self, a: &GenericPoly, b: &GenericPoly) -> GenericPoly {
        let n = a.coeffs.len().max(b.coeffs.len());
        let zero = self.constant(0);
        let coeffs = (0..n)
            .map(|i| {
                self.add(
                    a.coeffs.get(i).unwrap_or(&zero),
                    b.coeffs.get(i).unwrap_or(&zero),
                )
            })
            .collect();
        self.poly(coeffs)
    }

    pub fn sub_poly(&self, a: &GenericPoly, b: &GenericPoly) -> GenericPoly {
        let nb = self.poly(b.coeffs.iter().map(|c| self.neg(c)).collect());
        self.add_poly(a, &nb)
    }

    pub fn mul_poly(&self, a: &GenericPoly, b: &GenericPoly) -> GenericPoly {
        if a.is_zero() || b.is_zero() {
            return self.poly(Vec::new());
        }
        let mut out = vec![self.constant(0); a.coeffs.len() + b.coeffs.len() - 1];
        for (l, bl) in b.coeffs.iter().enumerate() {
            for (k, ak) in a.coeffs.iter().enumerate() {
                let mut twisted = ak.clone();
                for _ in 0..l {
                    twisted = self.phi(&twisted);
                }
                out[k + l] = self.add(&out[k + l], &self.mul(&twisted, bl));
            }
        }
        self.poly(out)
    }

    /// `(quot, rem)` with `q = d * quot + rem`, `deg rem < deg d`.
    pub fn right_divmod(
        &self,
        q: &GenericPoly,
        d: &GenericPoly,
    ) -> Result<(GenericPoly, GenericPoly)> {
        let k = d.degree().ok_or(Error::DivisionByZero)?;
        let lead = d.coeffs.last().expect("nonzero");
        let mut rem = q.clone();
        let mut quot = self.poly(Vec::new());
        while let Some(n) = rem.degree().filter(|&n| n >= k) {
            let mut scale = lead.clone();
            for _ in 0..n - k {
                scale = self.phi(&scale);
            }
            let c = self.mul(rem.coeffs.last().expect("nonzero"), &self.inv(&scale)?);
            let step = self.monomial(n - k, c);
            rem = self.sub_poly(&rem, &self.mul_poly(d, &step));
            quot = self.add_poly(&quot, &step);
        }
        Ok((quot, rem))
    }

    /// Whether `q = c d` holds for a constant `c`; with `d = t` this asks
    /// for a preimage of the `t`-coefficient under `phi`.
    pub fn left_multiple_by_constant(&self, q: &GenericPoly, d: &GenericPoly) -> Option<RatFn> {
        if d.degree()? != 1 || !d.coeffs[0].is_zero() || q.degree()? != 1 || !q.coeffs[0].is_zero()
        {
            return None;
        }
        // c t b = t phi(c) b
        let target = self.mul(&q.coeffs[1], &self.inv(&d.coeffs[1]).ok()?);
        self.phi_preimage(&target)
    }
}

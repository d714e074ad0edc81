//! Exact arithmetic in cyclotomic fields `Q(zeta_n)`, realized as
//! `Q[x] / Phi_n(x)`.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::arith;

/// Polynomial coefficients, constant term first.
type Poly = Vec<BigRational>;

fn trim(p: &mut Poly) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = alloc::vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(&mut out);
    out
}

fn poly_sub(a: &[BigRational], b: &[BigRational]) -> Poly {
    let n = a.len().max(b.len());
    let mut out: Poly = (0..n)
        .map(|i| a.get(i).cloned().unwrap_or_else(BigRational::zero) - b.get(i).cloned().unwrap_or_else(BigRational::zero))
        .collect();
    trim(&mut out);
    out
}

/// Quotient and remainder of `a` by a nonzero `b`.
fn poly_divrem(a: &[BigRational], b: &[BigRational]) -> (Poly, Poly) {
    let mut r: Poly = a.to_vec();
    trim(&mut r);
    let db = b.len() - 1;
    let lead = b[db].clone();
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let mut q = alloc::vec![BigRational::zero(); r.len() - db];
    while r.len() > db && !r.is_empty() {
        let k = r.len() - 1 - db;
        let c = &r[r.len() - 1] / &lead;
        for (i, bi) in b.iter().enumerate() {
            let t = &c * bi;
            r[k + i] -= t;
        }
        q[k] = c;
        trim(&mut r);
    }
    trim(&mut q);
    (q, r)
}

/// The cyclotomic polynomial `Phi_n` with integer coefficients.
pub fn cyclotomic_polynomial(n: u64) -> Vec<BigInt> {
    // x^n - 1 divided by Phi_d for the proper divisors d of n
    let mut num: Poly = alloc::vec![BigRational::zero(); n as usize + 1];
    num[0] = -BigRational::one();
    num[n as usize] = BigRational::one();
    for d in 1..n {
        if n % d == 0 {
            let phi_d: Poly = cyclotomic_polynomial(d).into_iter().map(BigRational::from_integer).collect();
            num = poly_divrem(&num, &phi_d).0;
        }
    }
    num.into_iter().map(|c| c.to_integer()).collect()
}

/// The field `Q(zeta_n)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycField {
    n: u64,
    modulus: Poly,
}

/// An element of `Q(zeta_n)` as a polynomial of degree `< phi(n)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CycElem(Poly);

impl CycElem {
    pub fn coefficients(&self) -> &[BigRational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// The rational value, if the element lies in `Q`.
    pub fn as_rational(&self) -> Option<BigRational> {
        match self.0.len() {
            0 => Some(BigRational::zero()),
            1 => Some(self.0[0].clone()),
            _ => None,
        }
    }
}

impl CycField {
    pub fn new(n: u64) -> Self {
        assert!(n >= 1);
        let modulus = cyclotomic_polynomial(n).into_iter().map(BigRational::from_integer).collect();
        CycField { n, modulus }
    }

    pub fn order(&self) -> u64 {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    fn reduce(&self, p: Poly) -> CycElem {
        let (_, r) = poly_divrem(&p, &self.modulus);
        CycElem(r)
    }

    pub fn zero(&self) -> CycElem {
        CycElem(Vec::new())
    }

    pub fn one(&self) -> CycElem {
        self.rational(BigRational::one())
    }

    pub fn rational(&self, q: BigRational) -> CycElem {
        let mut p = alloc::vec![q];
        trim(&mut p);
        CycElem(p)
    }

    pub fn from_i64(&self, n: i64) -> CycElem {
        self.rational(arith::int(n))
    }

    /// `sum_k c_k zeta^k`, reduced modulo `Phi_n`.
    pub fn element(&self, coeffs: &[BigRational]) -> CycElem {
        let mut p = coeffs.to_vec();
        trim(&mut p);
        self.reduce(p)
    }

    /// Norm to `Q`: the product of all Galois conjugates.
    pub fn norm(&self, x: &CycElem) -> BigRational {
        let mut acc = self.one();
        for a in self.galois_group() {
            acc = self.mul(&acc, &self.galois(x, a));
        }
        acc.as_rational().expect("norms are rational")
    }

    /// `zeta_n^t`.
    pub fn zeta_pow(&self, t: i64) -> CycElem {
        let e = t.rem_euclid(self.n as i64) as usize;
        let mut p = alloc::vec![BigRational::zero(); e + 1];
        p[e] = BigRational::one();
        self.reduce(p)
    }

    pub fn add(&self, a: &CycElem, b: &CycElem) -> CycElem {
        let n = a.0.len().max(b.0.len());
        let mut p: Poly = (0..n)
            .map(|i| a.0.get(i).cloned().unwrap_or_else(BigRational::zero) + b.0.get(i).cloned().unwrap_or_else(BigRational::zero))
            .collect();
        trim(&mut p);
        CycElem(p)
    }

    pub fn sub(&self, a: &CycElem, b: &CycElem) -> CycElem {
        CycElem(poly_sub(&a.0, &b.0))
    }

    pub fn neg(&self, a: &CycElem) -> CycElem {
        CycElem(a.0.iter().map(|c| -c).collect())
    }

    pub fn scale(&self, a: &CycElem, q: &BigRational) -> CycElem {
        let mut p: Poly = a.0.iter().map(|c| c * q).collect();
        trim(&mut p);
        CycElem(p)
    }

    pub fn mul(&self, a: &CycElem, b: &CycElem) -> CycElem {
        self.reduce(poly_mul(&a.0, &b.0))
    }

    /// Inverse by the extended Euclidean algorithm; `None` for zero.
    pub fn inv(&self, a: &CycElem) -> Option<CycElem> {
        if a.is_zero() {
            return None;
        }
        // invariant: s*a = r (mod modulus)
        let (mut r0, mut r1) = (self.modulus.clone(), a.0.clone());
        let (mut s0, mut s1): (Poly, Poly) = (Vec::new(), alloc::vec![BigRational::one()]);
        while !r1.is_empty() {
            let (q, r) = poly_divrem(&r0, &r1);
            let s = poly_sub(&s0, &poly_mul(&q, &s1));
            r0 = core::mem::replace(&mut r1, r);
            s0 = core::mem::replace(&mut s1, s);
        }
        // r0 is a nonzero constant since Phi_n is irreducible
        debug_assert_eq!(r0.len(), 1);
        let c = r0[0].recip();
        Some(self.reduce(s0.into_iter().map(|x| x * &c).collect()))
    }

    pub fn pow(&self, a: &CycElem, mut e: u64) -> CycElem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// The automorphism `zeta -> zeta^a` for `gcd(a, n) = 1`.
    pub fn galois(&self, x: &CycElem, a: u64) -> CycElem {
        debug_assert!(a.gcd(&self.n) == 1);
        let mut acc = self.zero();
        for (i, c) in x.0.iter().enumerate() {
            if !c.is_zero() {
                acc = self.add(&acc, &self.scale(&self.zeta_pow((a * i as u64) as i64), c));
            }
        }
        acc
    }

    /// Complex conjugation `zeta -> zeta^{-1}`.
    pub fn conj(&self, x: &CycElem) -> CycElem {
        self.galois(x, self.n - 1)
    }

    /// Units `a mod n` (the Galois group).
    pub fn galois_group(&self) -> Vec<u64> {
        (1..=self.n).filter(|a| a.gcd(&self.n) == 1).map(|a| a % self.n).collect()
    }

    /// Trace to `Q`.
    pub fn trace(&self, x: &CycElem) -> BigRational {
        let mut acc = self.zero();
        for a in self.galois_group() {
            acc = self.add(&acc, &self.galois(x, a));
        }
        acc.as_rational().expect("traces are rational")
    }
}

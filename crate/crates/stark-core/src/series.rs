//! Bivariate power series in `X1, X2` truncated at total degree `M`, over
//! a pluggable exact coefficient ring.
//!
//! Coefficients are stored by homogeneous component: the coefficient of
//! `X1^i X2^l` lives at offset `v(v+1)/2 + l` with `v = i + l`.

use alloc::vec::Vec;
use core::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::arith;
use crate::cyclo::{CycElem, CycField};
use crate::error::{Error, Result};
use crate::modp::{Zp, ZpRing};

/// Exact commutative coefficient ring.
pub trait CoeffRing {
    type Elem: Clone + PartialEq + Debug;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn from_i64(&self, n: i64) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn is_zero(&self, a: &Self::Elem) -> bool;
}

impl CoeffRing for ZpRing {
    type Elem = Zp;
    fn zero(&self) -> Zp {
        ZpRing::zero(self)
    }
    fn one(&self) -> Zp {
        ZpRing::one(self)
    }
    fn add(&self, a: &Zp, b: &Zp) -> Zp {
        ZpRing::add(self, *a, *b)
    }
    fn sub(&self, a: &Zp, b: &Zp) -> Zp {
        ZpRing::sub(self, *a, *b)
    }
    fn neg(&self, a: &Zp) -> Zp {
        ZpRing::neg(self, *a)
    }
    fn mul(&self, a: &Zp, b: &Zp) -> Zp {
        ZpRing::mul(self, *a, *b)
    }
    fn from_i64(&self, n: i64) -> Zp {
        ZpRing::from_i64(self, n)
    }
    fn inv(&self, a: &Zp) -> Option<Zp> {
        if self.is_unit(*a) {
            ZpRing::inv(self, *a)
        } else {
            None
        }
    }
    fn is_zero(&self, a: &Zp) -> bool {
        ZpRing::is_zero(self, *a)
    }
}

/// `u + v*sqrt(d)` with `u, v` in `Q(zeta_f)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CycQuad {
    pub u: CycElem,
    pub v: CycElem,
}

/// The ring `Q(mu_f) (x) k`, `k = Q(sqrt(d))`.
#[derive(Clone, Debug)]
pub struct CycQuadRing {
    cyc: CycField,
    d: BigRational,
}

impl CycQuadRing {
    pub fn new(f: u64, d: i64) -> Self {
        CycQuadRing { cyc: CycField::new(f), d: arith::int(d) }
    }

    pub fn cyclotomic(&self) -> &CycField {
        &self.cyc
    }

    pub fn element(&self, u: CycElem, v: CycElem) -> CycQuad {
        CycQuad { u, v }
    }

    /// `p + q sqrt(d)` for rationals `p, q`.
    pub fn surd(&self, p: BigRational, q: BigRational) -> CycQuad {
        CycQuad { u: self.cyc.rational(p), v: self.cyc.rational(q) }
    }

    pub fn zeta_pow(&self, t: i64) -> CycQuad {
        CycQuad { u: self.cyc.zeta_pow(t), v: self.cyc.zero() }
    }

    pub fn scale(&self, a: &CycQuad, q: &BigRational) -> CycQuad {
        CycQuad { u: self.cyc.scale(&a.u, q), v: self.cyc.scale(&a.v, q) }
    }

    /// `sqrt(d) -> -sqrt(d)`.
    pub fn conj(&self, a: &CycQuad) -> CycQuad {
        CycQuad { u: a.u.clone(), v: self.cyc.neg(&a.v) }
    }

    /// `zeta -> zeta^a` on both components.
    pub fn galois(&self, x: &CycQuad, a: u64) -> CycQuad {
        CycQuad { u: self.cyc.galois(&x.u, a), v: self.cyc.galois(&x.v, a) }
    }
}

impl CoeffRing for CycQuadRing {
    type Elem = CycQuad;
    fn zero(&self) -> CycQuad {
        CycQuad { u: self.cyc.zero(), v: self.cyc.zero() }
    }
    fn one(&self) -> CycQuad {
        CycQuad { u: self.cyc.one(), v: self.cyc.zero() }
    }
    fn add(&self, a: &CycQuad, b: &CycQuad) -> CycQuad {
        CycQuad { u: self.cyc.add(&a.u, &b.u), v: self.cyc.add(&a.v, &b.v) }
    }
    fn sub(&self, a: &CycQuad, b: &CycQuad) -> CycQuad {
        CycQuad { u: self.cyc.sub(&a.u, &b.u), v: self.cyc.sub(&a.v, &b.v) }
    }
    fn neg(&self, a: &CycQuad) -> CycQuad {
        CycQuad { u: self.cyc.neg(&a.u), v: self.cyc.neg(&a.v) }
    }
    fn mul(&self, a: &CycQuad, b: &CycQuad) -> CycQuad {
        let c = &self.cyc;
        let vv = c.scale(&c.mul(&a.v, &b.v), &self.d);
        CycQuad { u: c.add(&c.mul(&a.u, &b.u), &vv), v: c.add(&c.mul(&a.u, &b.v), &c.mul(&a.v, &b.u)) }
    }
    fn from_i64(&self, n: i64) -> CycQuad {
        CycQuad { u: self.cyc.from_i64(n), v: self.cyc.zero() }
    }
    fn inv(&self, a: &CycQuad) -> Option<CycQuad> {
        let c = &self.cyc;
        let norm = c.sub(&c.mul(&a.u, &a.u), &c.scale(&c.mul(&a.v, &a.v), &self.d));
        let ni = c.inv(&norm)?;
        Some(CycQuad { u: c.mul(&a.u, &ni), v: c.neg(&c.mul(&a.v, &ni)) })
    }
    fn is_zero(&self, a: &CycQuad) -> bool {
        a.u.is_zero() && a.v.is_zero()
    }
}

#[inline]
fn offset(i: usize, l: usize) -> usize {
    let v = i + l;
    v * (v + 1) / 2 + l
}

/// A bivariate series truncated at total degree `degree`.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncSeries<E> {
    degree: usize,
    coeffs: Vec<E>,
}

impl<E: Clone + PartialEq + Debug> TruncSeries<E> {
    pub fn zero<R: CoeffRing<Elem = E>>(ring: &R, degree: usize) -> Self {
        TruncSeries { degree, coeffs: alloc::vec![ring.zero(); offset(0, degree + 1)] }
    }

    pub fn constant<R: CoeffRing<Elem = E>>(ring: &R, c: E, degree: usize) -> Self {
        let mut s = Self::zero(ring, degree);
        s.coeffs[0] = c;
        s
    }

    /// `c X1^i X2^l`.
    pub fn monomial<R: CoeffRing<Elem = E>>(ring: &R, i: usize, l: usize, c: E, degree: usize) -> Self {
        let mut s = Self::zero(ring, degree);
        if i + l <= degree {
            s.coeffs[offset(i, l)] = c;
        }
        s
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Coefficient of `X1^i X2^l` (`i + l <= degree`).
    pub fn coeff(&self, i: usize, l: usize) -> &E {
        &self.coeffs[offset(i, l)]
    }

    pub fn set(&mut self, i: usize, l: usize, c: E) {
        self.coeffs[offset(i, l)] = c;
    }

    /// Homogeneous component of degree `v`, ordered by the power of `X2`.
    pub fn component(&self, v: usize) -> &[E] {
        &self.coeffs[offset(v, 0)..offset(v, 0) + v + 1]
    }

    pub fn truncate(&self, degree: usize) -> Self {
        let degree = degree.min(self.degree);
        TruncSeries { degree, coeffs: self.coeffs[..offset(0, degree + 1)].to_vec() }
    }

    pub fn map(&self, f: impl Fn(&E) -> E) -> Self {
        TruncSeries { degree: self.degree, coeffs: self.coeffs.iter().map(f).collect() }
    }

    /// Exchanges `X1` and `X2`.
    pub fn swap_variables(&self) -> Self {
        let mut coeffs = self.coeffs.clone();
        for v in 0..=self.degree {
            for l in 0..=v {
                coeffs[offset(v - l, l)] = self.coeffs[offset(l, v - l)].clone();
            }
        }
        TruncSeries { degree: self.degree, coeffs }
    }

    fn check_same(&self, other: &Self) -> usize {
        self.degree.min(other.degree)
    }

    pub fn add<R: CoeffRing<Elem = E>>(&self, ring: &R, other: &Self) -> Self {
        let m = self.check_same(other);
        let n = offset(0, m + 1);
        TruncSeries { degree: m, coeffs: (0..n).map(|k| ring.add(&self.coeffs[k], &other.coeffs[k])).collect() }
    }

    pub fn sub<R: CoeffRing<Elem = E>>(&self, ring: &R, other: &Self) -> Self {
        let m = self.check_same(other);
        let n = offset(0, m + 1);
        TruncSeries { degree: m, coeffs: (0..n).map(|k| ring.sub(&self.coeffs[k], &other.coeffs[k])).collect() }
    }

    pub fn neg<R: CoeffRing<Elem = E>>(&self, ring: &R) -> Self {
        self.map(|c| ring.neg(c))
    }

    pub fn scale<R: CoeffRing<Elem = E>>(&self, ring: &R, c: &E) -> Self {
        self.map(|x| ring.mul(x, c))
    }

    pub fn mul<R: CoeffRing<Elem = E>>(&self, ring: &R, other: &Self) -> Self {
        let m = self.check_same(other);
        let mut out = Self::zero(ring, m);
        for v1 in 0..=m {
            for l1 in 0..=v1 {
                let a = &self.coeffs[offset(v1 - l1, l1)];
                if ring.is_zero(a) {
                    continue;
                }
                for v2 in 0..=m - v1 {
                    for l2 in 0..=v2 {
                        let b = &other.coeffs[offset(v2 - l2, l2)];
                        let k = offset(v1 - l1 + v2 - l2, l1 + l2);
                        out.coeffs[k] = ring.add(&out.coeffs[k], &ring.mul(a, b));
                    }
                }
            }
        }
        out
    }

    /// `self / other`; the constant term of `other` must be a unit.
    pub fn div<R: CoeffRing<Elem = E>>(&self, ring: &R, other: &Self) -> Result<Self> {
        let m = self.check_same(other);
        let b0_inv = ring.inv(&other.coeffs[0]).ok_or(Error::NonUnitDivisor)?;
        let mut q = Self::zero(ring, m);
        for v in 0..=m {
            for l in 0..=v {
                let i = v - l;
                let mut acc = self.coeffs[offset(i, l)].clone();
                for k in 0..=i {
                    for j in 0..=l {
                        if k == 0 && j == 0 {
                            continue;
                        }
                        let b = &other.coeffs[offset(k, j)];
                        if ring.is_zero(b) {
                            continue;
                        }
                        acc = ring.sub(&acc, &ring.mul(b, &q.coeffs[offset(i - k, l - j)]));
                    }
                }
                q.coeffs[offset(i, l)] = ring.mul(&acc, &b0_inv);
            }
        }
        Ok(q)
    }

    /// `u(X1) v(X2)` for univariate coefficient lists.
    pub fn outer<R: CoeffRing<Elem = E>>(ring: &R, u: &[E], v: &[E], degree: usize) -> Self {
        let mut s = Self::zero(ring, degree);
        s.add_outer(ring, &ring.one(), u, v);
        s
    }

    /// `self += c * u(X1) v(X2)`.
    pub fn add_outer<R: CoeffRing<Elem = E>>(&mut self, ring: &R, c: &E, u: &[E], v: &[E]) {
        for i in 0..=self.degree.min(u.len().saturating_sub(1)) {
            let cu = ring.mul(c, &u[i]);
            for l in 0..=(self.degree - i).min(v.len().saturating_sub(1)) {
                let k = offset(i, l);
                self.coeffs[k] = ring.add(&self.coeffs[k], &ring.mul(&cu, &v[l]));
            }
        }
    }

    /// `self / (1 - c u(X1) v(X2))` with `u(0) = v(0) = 1`, in `O(M^3)`.
    ///
    /// Writing `Q` for the quotient, `Q(1 - c) = A + c(s1 + s2)` where `s1`
    /// collects the `X1`-convolution of `u` with lower rows of `Q` and `s2`
    /// the `X2`-convolution of `v` with the partial products `H = u * Q`.
    pub fn div_one_minus_separable<R: CoeffRing<Elem = E>>(&self, ring: &R, c: &E, u: &[E], v: &[E]) -> Result<Self> {
        let m = self.degree;
        if u.len() <= m || v.len() <= m {
            return Err(Error::InsufficientDegree { needed: m });
        }
        debug_assert!(u[0] == ring.one() && v[0] == ring.one());
        let denom_inv = ring.inv(&ring.sub(&ring.one(), c)).ok_or(Error::NonUnitDivisor)?;
        let mut q = Self::zero(ring, m);
        let mut h = Self::zero(ring, m);
        for i in 0..=m {
            for l in 0..=m - i {
                let mut s1 = ring.zero();
                for k in 0..i {
                    s1 = ring.add(&s1, &ring.mul(&u[i - k], &q.coeffs[offset(k, l)]));
                }
                let mut s2 = ring.zero();
                for j in 0..l {
                    s2 = ring.add(&s2, &ring.mul(&v[l - j], &h.coeffs[offset(i, j)]));
                }
                let num = ring.add(&self.coeffs[offset(i, l)], &ring.mul(c, &ring.add(&s1, &s2)));
                let qv = ring.mul(&num, &denom_inv);
                h.coeffs[offset(i, l)] = ring.add(&qv, &s1);
                q.coeffs[offset(i, l)] = qv;
            }
        }
        Ok(q)
    }

    /// Multiplies by `(1 + X1)^-1 (1 + X2)^-1`.
    pub fn div_one_plus_both<R: CoeffRing<Elem = E>>(&self, ring: &R) -> Self {
        let m = self.degree;
        let mut q = self.clone();
        for l in 0..=m {
            for i in 1..=m - l {
                let prev = q.coeffs[offset(i - 1, l)].clone();
                q.coeffs[offset(i, l)] = ring.sub(&q.coeffs[offset(i, l)], &prev);
            }
        }
        for i in 0..=m {
            for l in 1..=m - i {
                let prev = q.coeffs[offset(i, l - 1)].clone();
                q.coeffs[offset(i, l)] = ring.sub(&q.coeffs[offset(i, l)], &prev);
            }
        }
        q
    }

    /// `(1 + X1)(1 + X2) d^2/dX1 dX2`; the result is known to degree `M - 2`.
    pub fn apply_delta<R: CoeffRing<Elem = E>>(&self, ring: &R) -> Result<Self> {
        if self.degree < 2 {
            return Err(Error::InsufficientDegree { needed: 2 });
        }
        let m = self.degree - 2;
        let mut g = Self::zero(ring, m);
        for i in 0..=m {
            for l in 0..=m - i {
                let k = ring.from_i64(((i + 1) * (l + 1)) as i64);
                g.coeffs[offset(i, l)] = ring.mul(&k, &self.coeffs[offset(i + 1, l + 1)]);
            }
        }
        // times (1 + X1)(1 + X2), from the top down
        for i in (1..=m).rev() {
            for l in 0..=m - i {
                let prev = g.coeffs[offset(i - 1, l)].clone();
                g.coeffs[offset(i, l)] = ring.add(&g.coeffs[offset(i, l)], &prev);
            }
        }
        for i in 0..=m {
            for l in (1..=m - i).rev() {
                let prev = g.coeffs[offset(i, l - 1)].clone();
                g.coeffs[offset(i, l)] = ring.add(&g.coeffs[offset(i, l)], &prev);
            }
        }
        Ok(g)
    }

    /// Constant term of `Delta^n(self)`.
    pub fn delta_power_at_zero<R: CoeffRing<Elem = E>>(&self, ring: &R, n: usize) -> Result<E> {
        if self.degree < 2 * n {
            return Err(Error::InsufficientDegree { needed: 2 * n });
        }
        let mut s = self.truncate(2 * n);
        for _ in 0..n {
            s = s.apply_delta(ring)?;
        }
        Ok(s.coeffs[0].clone())
    }

    /// Keeps, along one axis, only the powers `(1 + X)^k` with `p | k`.
    ///
    /// The series is treated as the polynomial it represents; on
    /// polynomials this is the averaging operator over `p`-th roots of
    /// unity, computed without adjoining them.
    pub fn apply_v<R: CoeffRing<Elem = E>>(&self, ring: &R, axis: u8, p: u64) -> Self {
        let m = self.degree;
        let pascal = pascal_triangle(ring, m);
        let mut out = self.clone();
        for other in 0..=m {
            let len = m - other + 1;
            let get = |t: usize| if axis == 1 { offset(t, other) } else { offset(other, t) };
            let f: Vec<E> = (0..len).map(|t| self.coeffs[get(t)].clone()).collect();
            // coefficients in the basis (1 + X)^k
            let mut g: Vec<E> = alloc::vec![ring.zero(); len];
            for (k, gk) in g.iter_mut().enumerate() {
                if k as u64 % p != 0 {
                    continue;
                }
                let mut acc = ring.zero();
                for (i, fi) in f.iter().enumerate().skip(k) {
                    let t = ring.mul(fi, &pascal[i][k]);
                    acc = if (i - k) % 2 == 0 { ring.add(&acc, &t) } else { ring.sub(&acc, &t) };
                }
                *gk = acc;
            }
            for j in 0..len {
                let mut acc = ring.zero();
                for (k, gk) in g.iter().enumerate().skip(j) {
                    if k as u64 % p == 0 {
                        acc = ring.add(&acc, &ring.mul(gk, &pascal[k][j]));
                    }
                }
                out.coeffs[get(j)] = acc;
            }
        }
        out
    }

    /// `U = (1 - V1)(1 - V2)`.
    pub fn apply_u<R: CoeffRing<Elem = E>>(&self, ring: &R, p: u64) -> Self {
        let v1 = self.apply_v(ring, 1, p);
        let a = self.sub(ring, &v1);
        let v2 = a.apply_v(ring, 2, p);
        a.sub(ring, &v2)
    }
}

fn pascal_triangle<R: CoeffRing>(ring: &R, m: usize) -> Vec<Vec<R::Elem>> {
    let mut rows: Vec<Vec<R::Elem>> = Vec::with_capacity(m + 1);
    for n in 0..=m {
        let mut row = Vec::with_capacity(n + 1);
        for k in 0..=n {
            if k == 0 || k == n {
                row.push(ring.one());
            } else {
                let prev: &Vec<R::Elem> = &rows[n - 1];
                row.push(ring.add(&prev[k - 1], &prev[k]));
            }
        }
        rows.push(row);
    }
    rows
}

/// Coefficients `binom(a, n)`, `0 <= n <= degree`, of `(1 + X)^a` for an
/// exact exponent in a field-like ring (every `n` must be invertible).
pub fn binom_power<R: CoeffRing>(ring: &R, a: &R::Elem, degree: usize) -> Result<Vec<R::Elem>> {
    let mut out = Vec::with_capacity(degree + 1);
    out.push(ring.one());
    for n in 1..=degree {
        let n_inv = ring.inv(&ring.from_i64(n as i64)).ok_or(Error::NonUnitDivisor)?;
        let factor = ring.mul(&ring.sub(a, &ring.from_i64(n as i64 - 1)), &n_inv);
        let next = ring.mul(&out[n - 1], &factor);
        out.push(next);
    }
    Ok(out)
}

/// Binomial coefficients of p-adic exponents: `(1 + X)^a` modulo `p^W`
/// from `a` known modulo `p^(W + ord_p(M!))`.
#[derive(Clone, Debug)]
pub struct PadicBinomials {
    p: u64,
    degree: usize,
    /// Modulus of the inputs, `p^W'`.
    guard_modulus: BigInt,
    /// `p^W`.
    modulus: BigInt,
    /// Inverse of the prime-to-p part of `n!` modulo `p^W`.
    unit_fact_inv: Vec<BigInt>,
    fact_val: Vec<u32>,
    pows: Vec<BigInt>,
}

impl PadicBinomials {
    pub fn new(p: u64, precision: u32, degree: usize) -> Self {
        let guard = precision + arith::factorial_valuation(degree as u64, p);
        let guard_modulus = arith::pow_u64(p, guard);
        let modulus = arith::pow_u64(p, precision);
        let mut unit_fact = BigInt::one();
        let mut unit_fact_inv = alloc::vec![BigInt::one()];
        let mut fact_val = alloc::vec![0u32];
        for n in 1..=degree as u64 {
            let v = arith::valuation_u64(n, p);
            let unit = n / p.pow(v);
            unit_fact = (unit_fact * BigInt::from(unit)).mod_floor(&modulus);
            unit_fact_inv.push(arith::mod_inverse(&unit_fact, &modulus).unwrap());
            fact_val.push(fact_val.last().unwrap() + v);
        }
        let max_v = *fact_val.last().unwrap();
        let pows = (0..=max_v).map(|e| arith::pow_u64(p, e)).collect();
        PadicBinomials { p, degree, guard_modulus, modulus, unit_fact_inv, fact_val, pows }
    }

    /// The exponent-precision `W'` required of inputs.
    pub fn guard_precision(&self) -> u32 {
        arith::valuation(&self.guard_modulus, self.p)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// `binom(a, n) mod p^W` for `n = 0..=degree`.
    pub fn series(&self, a: &BigInt) -> Vec<BigInt> {
        let a = a.mod_floor(&self.guard_modulus);
        let mut out = Vec::with_capacity(self.degree + 1);
        let mut falling = BigInt::one();
        out.push(BigInt::one());
        for n in 1..=self.degree {
            falling = (falling * (&a - BigInt::from(n - 1))).mod_floor(&self.guard_modulus);
            let v = self.fact_val[n] as usize;
            debug_assert!((&falling % &self.pows[v]).is_zero());
            let q = &falling / &self.pows[v];
            out.push((q * &self.unit_fact_inv[n]).mod_floor(&self.modulus));
        }
        out
    }

    /// As [`series`](Self::series), embedded in `ring` (which must be
    /// `Z/p^W`).
    pub fn series_in(&self, ring: &ZpRing, a: &BigInt) -> Vec<Zp> {
        self.series(a).iter().map(|c| ring.from_bigint(c)).collect()
    }
}

/// Stirling numbers of the second kind `S(n, k)`, `0 <= k <= n <= m`.
pub fn stirling2(m: usize) -> Vec<Vec<BigInt>> {
    let mut s = alloc::vec![alloc::vec![BigInt::zero(); m + 1]; m + 1];
    s[0][0] = BigInt::one();
    for n in 1..=m {
        for k in 1..=n {
            s[n][k] = BigInt::from(k) * &s[n - 1][k] + &s[n - 1][k - 1];
        }
    }
    s
}

/// Rational constant term of `Delta^n F` from the coefficients directly:
/// `sum f_{i,l} i! S(n,i) l! S(n,l)`.
pub fn delta_power_at_zero_stirling<R: CoeffRing>(ring: &R, f: &TruncSeries<R::Elem>, n: usize) -> Result<R::Elem> {
    if f.degree() < 2 * n {
        return Err(Error::InsufficientDegree { needed: 2 * n });
    }
    let s = stirling2(n);
    let mut fact = alloc::vec![BigInt::one(); n + 1];
    for i in 1..=n {
        fact[i] = &fact[i - 1] * BigInt::from(i);
    }
    let weight = |i: usize| -> BigInt {
        if n == 0 {
            if i == 0 { BigInt::one() } else { BigInt::zero() }
        } else {
            &fact[i] * &s[n][i]
        }
    };
    let to_ring = |z: &BigInt| ring.from_i64(i64::try_from(z).expect("small weights"));
    let mut acc = ring.zero();
    for i in 0..=n {
        for l in 0..=n {
            let w = weight(i) * weight(l);
            if w.is_zero() {
                continue;
            }
            acc = ring.add(&acc, &ring.mul(&to_ring(&w), f.coeff(i, l)));
        }
    }
    Ok(acc)
}

/// Rationals as a coefficient ring (used by tests and the verifier).
#[derive(Clone, Copy, Debug, Default)]
pub struct Rationals;

impl CoeffRing for Rationals {
    type Elem = BigRational;
    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn from_i64(&self, n: i64) -> BigRational {
        arith::int(n)
    }
    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        if a.is_zero() {
            None
        } else {
            Some(a.recip())
        }
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    type S = TruncSeries<BigRational>;

    fn series(coeffs: &[i64], degree: usize) -> S {
        let mut s = S::zero(&Rationals, degree);
        let mut it = coeffs.iter();
        for v in 0..=degree {
            for l in 0..=v {
                if let Some(&c) = it.next() {
                    s.set(v - l, l, arith::int(c));
                }
            }
        }
        s
    }

    fn arb_series(degree: usize) -> impl Strategy<Value = S> {
        let n = offset(0, degree + 1);
        prop::collection::vec(-6i64..=6, n).prop_map(move |c| series(&c, degree))
    }

    #[test]
    fn geometric_series() {
        let r = Rationals;
        let one = S::constant(&r, arith::int(1), 2);
        let x1 = S::monomial(&r, 1, 0, arith::int(1), 2);
        let q = one.div(&r, &one.sub(&r, &x1)).unwrap();
        assert_eq!(q, series(&[1, 1, 0, 1, 0, 0], 2));
        let x2 = S::monomial(&r, 0, 1, arith::int(1), 4);
        let x1 = S::monomial(&r, 1, 0, arith::int(1), 4);
        let prod = x1.mul(&r, &x2);
        for v in 0..=4 {
            let nonzero = prod.component(v).iter().any(|c| !c.is_zero());
            assert_eq!(nonzero, v == 2);
        }
    }

    #[test]
    fn delta_basics() {
        let r = Rationals;
        let x1x2 = S::monomial(&r, 1, 1, arith::int(1), 6);
        // Delta(X1 X2) = (1 + X1)(1 + X2)
        let d = x1x2.apply_delta(&r).unwrap();
        assert_eq!(d, series(&[1, 1, 1, 0, 1, 0], 4).truncate(4));
        let c = S::constant(&r, arith::int(5), 6);
        assert!(c.apply_delta(&r).unwrap().coeffs.iter().all(|x| x.is_zero()));
        assert_eq!(c.delta_power_at_zero(&r, 0).unwrap(), arith::int(5));
    }

    #[test]
    fn v_operator_examples() {
        let r = Rationals;
        let c = S::constant(&r, arith::int(3), 5);
        assert_eq!(c.apply_v(&r, 1, 3), c);
        assert!(c.apply_u(&r, 3).coeffs.iter().all(|x| x.is_zero()));
        // p = 2: V1(1 + X1) = 0
        let lin = series(&[1, 1], 3);
        assert!(lin.apply_v(&r, 1, 2).coeffs.iter().all(|x| x.is_zero()));
    }

    #[test]
    fn padic_binomials() {
        // p = 7, a = 3 mod 7^3: binom(a, 2) = 3 mod 7
        let b = PadicBinomials::new(7, 3, 2);
        let s = b.series(&BigInt::from(3));
        assert_eq!(s[2].mod_floor(&BigInt::from(7)), BigInt::from(3));
        // a = -1 gives alternating signs
        let b = PadicBinomials::new(5, 6, 12);
        let s = b.series(&BigInt::from(-1));
        let m = arith::pow_u64(5, 6);
        for (n, c) in s.iter().enumerate() {
            let want = if n % 2 == 0 { BigInt::one() } else { &m - 1 };
            assert_eq!(*c, want);
        }
        // agreement with exact binomials for a large exponent
        let a = BigInt::from(123456789u64);
        let b = PadicBinomials::new(3, 10, 30);
        let m = arith::pow_u64(3, 10);
        for (n, c) in b.series(&a).iter().enumerate() {
            let exact = (0..n).fold(BigRational::one(), |acc, j| acc * BigRational::new(&a - j, BigInt::from(j + 1)));
            assert_eq!(*c, exact.to_integer().mod_floor(&m));
        }
    }

    #[test]
    fn exact_binomial_powers() {
        let r = Rationals;
        assert_eq!(binom_power(&r, &arith::int(1), 4).unwrap(), [1, 1, 0, 0, 0].map(arith::int).to_vec());
        assert_eq!(binom_power(&r, &arith::int(-1), 4).unwrap(), [1, -1, 1, -1, 1].map(arith::int).to_vec());
    }

    proptest! {
        #[test]
        fn division_round_trip(a in arb_series(6), b in arb_series(6), c0 in 1i64..5) {
            let r = Rationals;
            let mut b = b;
            b.set(0, 0, arith::int(c0));
            let q = a.mul(&r, &b).div(&r, &b).unwrap();
            prop_assert_eq!(q, a);
        }

        #[test]
        fn separable_division_matches_generic(a in arb_series(7), u in prop::collection::vec(-4i64..=4, 8), v in prop::collection::vec(-4i64..=4, 8), c in 2i64..6) {
            let r = Rationals;
            let mut u: Vec<BigRational> = u.into_iter().map(arith::int).collect();
            let mut v: Vec<BigRational> = v.into_iter().map(arith::int).collect();
            u[0] = arith::int(1);
            v[0] = arith::int(1);
            let c = arith::int(c);
            let denom = S::constant(&r, arith::int(1), 7).sub(&r, &S::outer(&r, &u, &v, 7).scale(&r, &c));
            let fast = a.div_one_minus_separable(&r, &c, &u, &v).unwrap();
            prop_assert_eq!(fast, a.div(&r, &denom).unwrap());
        }

        #[test]
        fn inverse_one_plus(a in arb_series(6)) {
            let r = Rationals;
            let one_plus = S::outer(&r, &[arith::int(1), arith::int(1)], &[arith::int(1), arith::int(1)], 6);
            let q = a.div_one_plus_both(&r);
            prop_assert_eq!(q.mul(&r, &one_plus), a);
        }

        #[test]
        fn binomial_powers_multiply(a in -20i64..20, b in -20i64..20, n in 1i64..5) {
            let r = Rationals;
            let ea = arith::rat(a, n);
            let eb = arith::rat(b, n);
            let pa = binom_power(&r, &ea, 8).unwrap();
            let pb = binom_power(&r, &eb, 8).unwrap();
            let pab = binom_power(&r, &(&ea + &eb), 8).unwrap();
            let conv: Vec<BigRational> = (0..=8).map(|k| (0..=k).map(|j| &pa[j] * &pb[k - j]).sum()).collect();
            prop_assert_eq!(conv, pab);
        }

        #[test]
        fn padic_binomials_multiply(a in 0u64..1_000_000, b in 0u64..1_000_000) {
            let bt = PadicBinomials::new(5, 8, 12);
            let m = arith::pow_u64(5, 8);
            let pa = bt.series(&BigInt::from(a));
            let pb = bt.series(&BigInt::from(b));
            let pab = bt.series(&BigInt::from(a + b));
            for k in 0..=12 {
                let s = (0..=k).fold(BigInt::zero(), |acc, j| acc + &pa[j] * &pb[k - j]).mod_floor(&m);
                prop_assert_eq!(&s, &pab[k]);
            }
        }

        #[test]
        fn operator_algebra(a in arb_series(9), p in prop::sample::select(alloc::vec![2u64, 3, 5])) {
            let r = Rationals;
            let v1 = a.apply_v(&r, 1, p);
            prop_assert_eq!(v1.apply_v(&r, 1, p), v1.clone());
            let v12 = v1.apply_v(&r, 2, p);
            let v21 = a.apply_v(&r, 2, p).apply_v(&r, 1, p);
            prop_assert_eq!(&v12, &v21);
            let u = a.apply_u(&r, p);
            prop_assert_eq!(u.apply_u(&r, p), u.clone());
            let expanded = a.sub(&r, &v1).sub(&r, &a.apply_v(&r, 2, p)).add(&r, &v12);
            prop_assert_eq!(u, expanded);
        }

        #[test]
        fn delta_commutes_with_v(a in arb_series(6), p in prop::sample::select(alloc::vec![2u64, 3])) {
            let r = Rationals;
            // pad so nothing is truncated
            let mut big = S::zero(&r, 8);
            for v in 0..=6 {
                for l in 0..=v {
                    big.set(v - l, l, a.coeff(v - l, l).clone());
                }
            }
            let lhs = big.apply_v(&r, 1, p).apply_delta(&r).unwrap();
            let rhs = big.apply_delta(&r).unwrap().apply_v(&r, 1, p);
            prop_assert_eq!(lhs, rhs);
            let lhs = big.apply_u(&r, p).apply_delta(&r).unwrap();
            let rhs = big.apply_delta(&r).unwrap().apply_u(&r, p);
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn delta_power_two_ways(a in arb_series(8), n in 0usize..=4) {
            let r = Rationals;
            prop_assert_eq!(a.delta_power_at_zero(&r, n).unwrap(), delta_power_at_zero_stirling(&r, &a, n).unwrap());
        }

        #[test]
        fn cycquad_conjugation_is_a_ring_map(x in prop::collection::vec(-5i64..=5, 4), y in prop::collection::vec(-5i64..=5, 4)) {
            let r = CycQuadRing::new(5, 37);
            let mk = |c: &[i64]| {
                let zeta = r.zeta_pow(1);
                let sq = r.surd(arith::int(0), arith::int(1));
                let a = r.add(&r.from_i64(c[0]), &r.mul(&r.from_i64(c[1]), &zeta));
                let b = r.add(&r.from_i64(c[2]), &r.mul(&r.from_i64(c[3]), &zeta));
                r.add(&a, &r.mul(&b, &sq))
            };
            let (a, b) = (mk(&x), mk(&y));
            prop_assert_eq!(r.conj(&r.mul(&a, &b)), r.mul(&r.conj(&a), &r.conj(&b)));
            prop_assert_eq!(r.conj(&r.add(&a, &b)), r.add(&r.conj(&a), &r.conj(&b)));
            if !r.is_zero(&a) {
                prop_assert_eq!(r.mul(&a, &r.inv(&a).unwrap()), r.one());
            }
        }
    }
}

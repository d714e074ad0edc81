//! Real quadratic fields `k = Q(sqrt(d))` with integral basis `{1, w}`,
//! `w = (d + sqrt(d))/2`, their fractional ideals, units, and the real and
//! p-adic embeddings.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{self, sign_surd};
use crate::error::{Error, Result};

/// An element `a + b*w` of `k`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct QuadElem {
    pub a: BigRational,
    pub b: BigRational,
}

impl QuadElem {
    pub fn new(a: BigRational, b: BigRational) -> Self {
        QuadElem { a, b }
    }

    pub fn from_ints(a: i64, b: i64) -> Self {
        QuadElem { a: arith::int(a), b: arith::int(b) }
    }

    pub fn rational(q: BigRational) -> Self {
        QuadElem { a: q, b: BigRational::zero() }
    }

    pub fn integer(n: BigInt) -> Self {
        Self::rational(BigRational::from_integer(n))
    }

    pub fn zero() -> Self {
        Self::from_ints(0, 0)
    }

    pub fn one() -> Self {
        Self::from_ints(1, 0)
    }

    pub fn omega() -> Self {
        Self::from_ints(0, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_integral(&self) -> bool {
        self.a.is_integer() && self.b.is_integer()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn add(&self, o: &QuadElem) -> QuadElem {
        QuadElem { a: &self.a + &o.a, b: &self.b + &o.b }
    }

    pub fn sub(&self, o: &QuadElem) -> QuadElem {
        QuadElem { a: &self.a - &o.a, b: &self.b - &o.b }
    }

    pub fn neg(&self) -> QuadElem {
        QuadElem { a: -&self.a, b: -&self.b }
    }

    pub fn scale(&self, q: &BigRational) -> QuadElem {
        QuadElem { a: &self.a * q, b: &self.b * q }
    }

    pub fn scale_int(&self, n: i64) -> QuadElem {
        self.scale(&arith::int(n))
    }

    /// Least common denominator of the two coordinates.
    pub fn denominator(&self) -> BigInt {
        self.a.denom().lcm(self.b.denom())
    }
}

impl fmt::Display for QuadElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}*w", self.a, self.b)
    }
}

/// Which real embedding: `First` sends `sqrt(d)` to the positive root.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Embedding {
    First,
    Second,
}

/// A reduced or unreduced quadratic irrational `(p + sqrt(D))/q`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) struct Surd {
    pub p: BigInt,
    pub q: BigInt,
}

/// Correctly rounded decimal approximation `mantissa / 10^digits`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decimal {
    pub mantissa: BigInt,
    pub digits: u32,
}

impl fmt::Display for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ten = num_traits::pow(BigInt::from(10), self.digits as usize);
        let neg = self.mantissa.is_negative();
        let m = self.mantissa.abs();
        let (q, r) = m.div_rem(&ten);
        if neg {
            f.write_str("-")?;
        }
        if self.digits == 0 {
            return write!(f, "{q}");
        }
        let rs = alloc::format!("{r}");
        write!(f, "{q}.")?;
        for _ in rs.len()..self.digits as usize {
            f.write_str("0")?;
        }
        f.write_str(&rs)
    }
}

/// The field `Q(sqrt(d))` for a fundamental discriminant `d > 1`.
#[derive(Clone, Debug)]
pub struct QuadField {
    disc: i64,
    disc_big: BigInt,
    /// Norm of `w`, `(d^2 - d)/4`.
    omega_norm: BigInt,
    /// Reduced cycle of the unit ideal, with the generators that carry the
    /// initial lattice to each member.
    principal_cycle: Vec<(Surd, QuadElem)>,
    principal_index: BTreeMap<Surd, usize>,
    fundamental_unit: QuadElem,
}

pub fn is_fundamental_discriminant(d: i64) -> bool {
    if d <= 1 {
        return false;
    }
    let s = i64::try_from(arith::isqrt(&BigInt::from(d))).unwrap_or(0);
    if (s - 1..=s + 1).any(|t| t >= 0 && t * t == d) {
        return false;
    }
    match d.rem_euclid(4) {
        1 => arith::is_squarefree(d as u64),
        0 => {
            let m = d / 4;
            matches!(m.rem_euclid(4), 2 | 3) && arith::is_squarefree(m as u64)
        }
        _ => false,
    }
}

impl QuadField {
    pub fn new(disc: i64) -> Result<Self> {
        if !is_fundamental_discriminant(disc) {
            return Err(Error::BadDiscriminant(disc));
        }
        let disc_big = BigInt::from(disc);
        let omega_norm = BigInt::from((disc * disc - disc) / 4);
        let mut field = QuadField {
            disc,
            disc_big,
            omega_norm,
            principal_cycle: Vec::new(),
            principal_index: BTreeMap::new(),
            fundamental_unit: QuadElem::one(),
        };
        field.build_principal_cycle();
        Ok(field)
    }

    pub fn disc(&self) -> i64 {
        self.disc
    }

    pub fn disc_big(&self) -> &BigInt {
        &self.disc_big
    }

    // ---- element arithmetic -------------------------------------------

    pub fn mul(&self, x: &QuadElem, y: &QuadElem) -> QuadElem {
        // w^2 = d w - N(w)
        let bb = &x.b * &y.b;
        let d = BigRational::from_integer(self.disc_big.clone());
        let n = BigRational::from_integer(self.omega_norm.clone());
        QuadElem {
            a: &x.a * &y.a - &bb * n,
            b: &x.a * &y.b + &x.b * &y.a + bb * d,
        }
    }

    pub fn conj(&self, x: &QuadElem) -> QuadElem {
        // conj(w) = d - w
        let d = BigRational::from_integer(self.disc_big.clone());
        QuadElem { a: &x.a + &x.b * d, b: -&x.b }
    }

    pub fn trace(&self, x: &QuadElem) -> BigRational {
        BigRational::from_integer(BigInt::from(2)) * &x.a + &x.b * BigRational::from_integer(self.disc_big.clone())
    }

    pub fn norm(&self, x: &QuadElem) -> BigRational {
        let d = BigRational::from_integer(self.disc_big.clone());
        let n = BigRational::from_integer(self.omega_norm.clone());
        &x.a * &x.a + &x.a * &x.b * d + &x.b * &x.b * n
    }

    pub fn trace_norm(&self, x: &QuadElem) -> (BigRational, BigRational) {
        (self.trace(x), self.norm(x))
    }

    pub fn inv(&self, x: &QuadElem) -> QuadElem {
        let n = self.norm(x);
        assert!(!n.is_zero(), "inverse of zero");
        self.conj(x).scale(&n.recip())
    }

    pub fn div(&self, x: &QuadElem, y: &QuadElem) -> QuadElem {
        self.mul(x, &self.inv(y))
    }

    pub fn pow(&self, x: &QuadElem, mut e: u64) -> QuadElem {
        let mut base = x.clone();
        let mut acc = QuadElem::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// `sqrt(d)` as an element.
    pub fn sqrt_d(&self) -> QuadElem {
        QuadElem { a: arith::int(-self.disc), b: arith::int(2) }
    }

    /// The element `p + q*sqrt(d)`.
    pub fn from_surd(&self, p: &BigRational, q: &BigRational) -> QuadElem {
        let d = BigRational::from_integer(self.disc_big.clone());
        QuadElem { a: p - q * d, b: q * arith::int(2) }
    }

    /// `(p, q)` with `x = p + q*sqrt(d)`.
    pub fn surd_parts(&self, x: &QuadElem) -> (BigRational, BigRational) {
        let half = arith::rat(1, 2);
        let d = BigRational::from_integer(self.disc_big.clone());
        (&x.a + &x.b * d * &half, &x.b * half)
    }

    // ---- real embeddings, exactly ----------------------------------------

    pub fn sign(&self, x: &QuadElem, e: Embedding) -> i32 {
        let (p, q) = self.surd_parts(x);
        match e {
            Embedding::First => sign_surd(&p, &q, &self.disc_big),
            Embedding::Second => sign_surd(&p, &-q, &self.disc_big),
        }
    }

    pub fn is_totally_positive(&self, x: &QuadElem) -> bool {
        self.sign(x, Embedding::First) > 0 && self.sign(x, Embedding::Second) > 0
    }

    /// Compares `iota(x)` with `iota(y)` exactly.
    pub fn cmp_real(&self, x: &QuadElem, y: &QuadElem, e: Embedding) -> Ordering {
        self.sign(&x.sub(y), e).cmp(&0)
    }

    pub fn floor_real(&self, x: &QuadElem, e: Embedding) -> BigInt {
        let (p, q) = self.surd_parts(x);
        match e {
            Embedding::First => arith::floor_surd(&p, &q, &self.disc_big),
            Embedding::Second => arith::floor_surd(&p, &-q, &self.disc_big),
        }
    }

    pub fn ceil_real(&self, x: &QuadElem, e: Embedding) -> BigInt {
        let (p, q) = self.surd_parts(x);
        let q = if e == Embedding::First { q } else { -q };
        arith::ceil_surd(&p, &q, &self.disc_big)
    }

    /// `iota(x)` rounded to the nearest multiple of `10^-digits`.
    pub fn embed_real(&self, x: &QuadElem, digits: u32) -> (Decimal, Decimal) {
        let scale = BigRational::from_integer(num_traits::pow(BigInt::from(10), digits as usize) * 2);
        let round = |y: &QuadElem, e: Embedding| {
            let y2 = y.scale(&scale);
            let fl = self.floor_real(&y2, e);
            let mantissa = (fl + BigInt::one()).div_floor(&BigInt::from(2));
            Decimal { mantissa, digits }
        };
        (round(x, Embedding::First), round(x, Embedding::Second))
    }

    /// Floating-point value of an embedding (display only).
    pub fn approx(&self, x: &QuadElem, e: Embedding) -> f64 {
        let (p, q) = self.surd_parts(x);
        let s = libm_sqrt(self.disc as f64);
        let (p, q) = (ratio_f64(&p), ratio_f64(&q));
        match e {
            Embedding::First => p + q * s,
            Embedding::Second => p - q * s,
        }
    }

    // ---- units -------------------------------------------------------------

    fn principal_start(&self) -> Surd {
        let s = arith::isqrt(&self.disc_big);
        let mut b = s.clone();
        if (&b - &self.disc_big).is_odd() {
            b -= 1;
        }
        if b == s && b.is_zero() {
            b = BigInt::from(1);
        }
        Surd { p: b, q: BigInt::from(2) }
    }

    fn build_principal_cycle(&mut self) {
        let start = self.principal_start();
        debug_assert!(self.is_reduced(&start));
        let mut cycle = alloc::vec![(start.clone(), QuadElem::one())];
        let mut cur = start.clone();
        let mut acc = QuadElem::one();
        loop {
            let (_, next) = self.cf_step(&cur);
            acc = self.mul(&acc, &self.surd_elem(&next));
            if next == start {
                self.fundamental_unit = acc;
                break;
            }
            cycle.push((next.clone(), acc.clone()));
            cur = next;
        }
        self.principal_index = cycle.iter().enumerate().map(|(i, (s, _))| (s.clone(), i)).collect();
        self.principal_cycle = cycle;
    }

    /// The fundamental unit `e0 > 1`.
    pub fn fundamental_unit(&self) -> &QuadElem {
        &self.fundamental_unit
    }

    /// Smallest power of the fundamental unit that is totally positive and
    /// congruent to 1 modulo the integral ideal `f`.
    pub fn ray_unit_generator(&self, f: &QuadIdeal) -> QuadElem {
        let one = QuadElem::one();
        let mut u = self.fundamental_unit.clone();
        loop {
            if self.is_totally_positive(&u) && f.contains(self, &u.sub(&one)) {
                return u;
            }
            u = self.mul(&u, &self.fundamental_unit);
        }
    }

    // ---- p-adic embedding ----------------------------------------------

    pub fn padic_embedding(&self, p: u64, f: u64, root_choice: u8, zeta_choice: usize, precision: u32) -> Result<PadicEmbedding> {
        PadicEmbedding::new(self, p, f, root_choice, zeta_choice, precision)
    }

    // ---- continued fractions of ideal lattices ------------------------

    pub(crate) fn surd_elem(&self, s: &Surd) -> QuadElem {
        let q = BigRational::from_integer(s.q.clone());
        self.from_surd(&(BigRational::from_integer(s.p.clone()) / &q), &q.recip())
    }

    fn surd_sign(&self, p: &BigInt, q: &BigInt, conj: bool) -> i32 {
        // sign of (p + eps*sqrt(D))/q
        let pr = BigRational::from_integer(p.clone());
        let one = if conj { arith::int(-1) } else { arith::int(1) };
        sign_surd(&pr, &one, &self.disc_big) * if q.is_negative() { -1 } else { 1 }
    }

    pub(crate) fn is_reduced(&self, s: &Surd) -> bool {
        // theta > 1 and -1 < theta' < 0
        let gt1 = self.surd_sign(&(&s.p - &s.q), &s.q, false) > 0;
        let conj_neg = self.surd_sign(&s.p, &s.q, true) < 0;
        let conj_gt = self.surd_sign(&(&s.p + &s.q), &s.q, true) > 0;
        gt1 && conj_neg && conj_gt
    }

    /// One step `theta -> 1/(theta - floor(theta))`.
    pub(crate) fn cf_step(&self, s: &Surd) -> (BigInt, Surd) {
        let sq = arith::isqrt(&self.disc_big);
        let a = if s.q.is_positive() {
            (&s.p + &sq).div_floor(&s.q)
        } else {
            -((&s.p + &sq).div_floor(&-&s.q) + BigInt::one())
        };
        let p2 = &a * &s.q - &s.p;
        let q2 = (&self.disc_big - &p2 * &p2) / &s.q;
        (a, Surd { p: p2, q: q2 })
    }

    /// The quadratic irrational attached to a fractional ideal and the
    /// factor: `I = factor * (Z + Z theta)`.
    fn ideal_surd(&self, i: &QuadIdeal) -> (Surd, BigRational) {
        let p = &i.b * 2 + &self.disc_big;
        let q = &i.a * 2;
        (Surd { p, q }, &i.scale * BigRational::from_integer(i.a.clone()))
    }

    /// Runs the continued fraction of the ideal lattice until it is reduced.
    /// Returns the reduced surd and the element `mu` with
    /// `I = mu * (Z + Z theta_reduced)`.
    fn reduce_ideal(&self, i: &QuadIdeal) -> (Surd, QuadElem) {
        let (mut s, factor) = self.ideal_surd(i);
        let mut scale = QuadElem::rational(factor);
        while !self.is_reduced(&s) {
            let (_, next) = self.cf_step(&s);
            // L_i = L_{i+1} / theta_{i+1}
            scale = self.div(&scale, &self.surd_elem(&next));
            s = next;
        }
        (s, scale)
    }

    /// A generator of the ideal if it is principal.
    pub fn principal_generator(&self, i: &QuadIdeal) -> Option<QuadElem> {
        let (s, scale) = self.reduce_ideal(i);
        let &j = self.principal_index.get(&s)?;
        // Z + Z theta = O * mu_j
        Some(self.mul(&scale, &self.principal_cycle[j].1))
    }

    /// Canonical key of the (wide) ideal class: the least reduced surd in
    /// the cycle.
    pub fn class_key(&self, i: &QuadIdeal) -> (BigInt, BigInt) {
        let (start, _) = self.reduce_ideal(i);
        let mut best = start.clone();
        let mut cur = start.clone();
        loop {
            let (_, next) = self.cf_step(&cur);
            if next == start {
                break;
            }
            if next < best {
                best = next.clone();
            }
            cur = next;
        }
        (best.p, best.q)
    }

    /// The integral ideal `Z(q/2) + Z(p + sqrt(D))/2` attached to a class key
    /// (a reduced surd `(p + sqrt(D))/q`).
    pub fn ideal_of_class_key(&self, key: &(BigInt, BigInt)) -> QuadIdeal {
        let (p, q) = key;
        let half = arith::rat(1, 2);
        let g1 = QuadElem::integer(q / 2);
        let g2 = self.from_surd(&(BigRational::from_integer(p.clone()) * &half), &half);
        self.ideal_from_generators(&[g1, g2]).expect("reduced surds give ideals")
    }

    // ---- ideals -----------------------------------------------------------

    pub fn unit_ideal(&self) -> QuadIdeal {
        QuadIdeal { scale: BigRational::one(), a: BigInt::one(), b: BigInt::zero() }
    }

    pub fn principal_ideal(&self, x: &QuadElem) -> Result<QuadIdeal> {
        if x.is_zero() {
            return Err(Error::ZeroIdeal);
        }
        self.ideal_from_generators(&[x.clone(), self.mul(x, &QuadElem::omega())])
    }

    /// The different `(sqrt(d))`.
    pub fn different(&self) -> QuadIdeal {
        self.principal_ideal(&self.sqrt_d()).unwrap()
    }

    /// The ideal with integral HNF basis `[[a, b], [0, c]]` (columns `a`
    /// and `b + c w`), times `scale`.
    pub fn ideal_from_hnf(&self, hnf: [[i64; 2]; 2], scale: &BigRational) -> Result<QuadIdeal> {
        if hnf[1][0] != 0 {
            return Err(Error::Parse(alloc::string::String::from("HNF must be upper triangular")));
        }
        let g1 = QuadElem::from_ints(hnf[0][0], 0).scale(scale);
        let g2 = QuadElem::from_ints(hnf[0][1], hnf[1][1]).scale(scale);
        let i = self.ideal_from_generators(&[g1.clone(), g2.clone()])?;
        // the lattice must equal the input
        let expected = hnf[0][0].abs() as i128 * hnf[1][1].abs() as i128;
        let got = &i.norm() / (scale * scale);
        if got != BigRational::from_integer(BigInt::from(expected)) {
            return Err(Error::NotAnIdeal);
        }
        Ok(i)
    }

    /// Z-span of the given elements, which must be an O-module of rank 2.
    pub fn ideal_from_generators(&self, gens: &[QuadElem]) -> Result<QuadIdeal> {
        let den = gens.iter().fold(BigInt::one(), |acc, g| acc.lcm(&g.denominator()));
        let denq = BigRational::from_integer(den.clone());
        let vecs: Vec<(BigInt, BigInt)> = gens
            .iter()
            .map(|g| ((&g.a * &denq).to_integer(), (&g.b * &denq).to_integer()))
            .collect();
        let (a, b, c) = hnf2(&vecs).ok_or(Error::ZeroIdeal)?;
        // O-module test: w * basis in lattice
        let lat = |x: &BigInt, y: &BigInt| -> bool {
            if !y.is_multiple_of(&c) {
                return false;
            }
            let t = y / &c;
            (x - &t * &b).is_multiple_of(&a)
        };
        for (x, y) in [(a.clone(), BigInt::zero()), (b.clone(), c.clone())] {
            // w*(x + y w) = -y N + (x + y d) w
            let nx = -(&y * &self.omega_norm);
            let ny = &x + &y * &self.disc_big;
            if !lat(&nx, &ny) {
                return Err(Error::NotAnIdeal);
            }
        }
        if !a.is_multiple_of(&c) || !b.is_multiple_of(&c) {
            return Err(Error::NotAnIdeal);
        }
        let a0 = &a / &c;
        let b0 = (&b / &c).mod_floor(&a0);
        Ok(QuadIdeal { scale: BigRational::new(c, den), a: a0, b: b0 })
    }

    pub fn ideal_mul(&self, i: &QuadIdeal, j: &QuadIdeal) -> QuadIdeal {
        let bi = i.basis();
        let bj = j.basis();
        let mut gens = Vec::with_capacity(4);
        for x in &bi {
            for y in &bj {
                gens.push(self.mul(x, y));
            }
        }
        self.ideal_from_generators(&gens).expect("product of ideals")
    }

    pub fn ideal_pow(&self, i: &QuadIdeal, mut e: u64) -> QuadIdeal {
        let mut acc = self.unit_ideal();
        let mut base = i.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.ideal_mul(&acc, &base);
            }
            base = self.ideal_mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    pub fn ideal_conj(&self, i: &QuadIdeal) -> QuadIdeal {
        let gens: Vec<QuadElem> = i.basis().iter().map(|x| self.conj(x)).collect();
        self.ideal_from_generators(&gens).expect("conjugate ideal")
    }

    pub fn ideal_inv(&self, i: &QuadIdeal) -> QuadIdeal {
        self.ideal_conj(i).scale_by(&i.norm().recip())
    }

    pub fn ideal_div(&self, i: &QuadIdeal, j: &QuadIdeal) -> QuadIdeal {
        self.ideal_mul(i, &self.ideal_inv(j))
    }

    pub fn ideal_scale(&self, i: &QuadIdeal, x: &QuadElem) -> QuadIdeal {
        let gens: Vec<QuadElem> = i.basis().iter().map(|y| self.mul(x, y)).collect();
        self.ideal_from_generators(&gens).expect("scaled ideal")
    }

    pub fn ideal_add(&self, i: &QuadIdeal, j: &QuadIdeal) -> QuadIdeal {
        let mut gens = i.basis().to_vec();
        gens.extend(j.basis());
        self.ideal_from_generators(&gens).expect("sum of ideals")
    }

    /// Integral ideals `I`, `J` with `I + J = O`.
    pub fn ideals_coprime(&self, i: &QuadIdeal, j: &QuadIdeal) -> bool {
        self.ideal_add(i, j).is_unit()
    }

    /// `|I : (x)| = |N(x)| / N(I)`.
    pub fn generalized_index(&self, i: &QuadIdeal, x: &QuadElem) -> BigRational {
        self.norm(x).abs() / i.norm()
    }

    /// Roots of the minimal polynomial of `w` modulo a prime `l`.
    fn omega_roots_mod(&self, l: u64) -> Vec<u64> {
        if l == 2 {
            let n = self.omega_norm.mod_floor(&BigInt::from(2)).to_u64().unwrap();
            let d = self.disc.rem_euclid(2) as u64;
            return (0..2u64).filter(|&x| (x * x + d * x + n) % 2 == 0).collect();
        }
        // w = (d + sqrt d)/2
        let inv2 = (l + 1) / 2;
        let d = self.disc.rem_euclid(l as i64) as u64;
        let mut roots: Vec<u64> = arith::sqrt_mod_prime(self.disc, l)
            .into_iter()
            .map(|s| arith::mul_mod_u64((d + s) % l, inv2, l))
            .collect();
        roots.sort_unstable();
        roots.dedup();
        roots
    }

    /// Prime ideals above the rational prime `l`, ordered by HNF.
    pub fn primes_above(&self, l: u64) -> Vec<QuadIdeal> {
        let roots = self.omega_roots_mod(l);
        if roots.is_empty() {
            let li = BigInt::from(l);
            return alloc::vec![QuadIdeal { scale: BigRational::from_integer(li), a: BigInt::one(), b: BigInt::zero() }];
        }
        let mut out: Vec<QuadIdeal> = roots
            .iter()
            .map(|&r| {
                let b = BigInt::from((l - r) % l);
                QuadIdeal { scale: BigRational::one(), a: BigInt::from(l), b }
            })
            .collect();
        out.sort();
        out
    }

    /// All prime ideals of norm at most `bound`, ordered by norm then HNF.
    pub fn prime_ideals_up_to(&self, bound: u64) -> Vec<QuadIdeal> {
        let mut out = Vec::new();
        for l in arith::primes_up_to(bound) {
            for pi in self.primes_above(l) {
                if pi.norm() <= BigRational::from_integer(BigInt::from(bound)) {
                    out.push(pi);
                }
            }
        }
        out.sort_by(|x, y| x.norm().cmp(&y.norm()).then_with(|| x.cmp(y)));
        out
    }
}

fn ratio_f64(q: &BigRational) -> f64 {
    let n = q.numer().to_f64().unwrap_or(f64::NAN);
    let d = q.denom().to_f64().unwrap_or(f64::NAN);
    n / d
}

fn libm_sqrt(x: f64) -> f64 {
    // Newton's method; adequate for display purposes.
    if x <= 0.0 {
        return 0.0;
    }
    let mut y = x;
    for _ in 0..64 {
        y = 0.5 * (y + x / y);
    }
    y
}

/// Two-dimensional integer HNF: returns `(a, b, c)` with lattice
/// `Z(a,0) + Z(b,c)`, `a, c > 0`, `0 <= b < a`.
pub(crate) fn hnf2(vecs: &[(BigInt, BigInt)]) -> Option<(BigInt, BigInt, BigInt)> {
    let mut vs: Vec<(BigInt, BigInt)> = vecs.iter().filter(|v| !(v.0.is_zero() && v.1.is_zero())).cloned().collect();
    // Euclid on the second coordinate
    let mut pivot: Option<(BigInt, BigInt)> = None;
    loop {
        let idx = vs
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.1.is_zero())
            .min_by_key(|(_, v)| v.1.abs())
            .map(|(k, _)| k);
        let Some(k) = idx else { break };
        let pv = vs.swap_remove(k);
        let mut done = true;
        for v in vs.iter_mut() {
            if !v.1.is_zero() {
                let q = v.1.div_floor(&pv.1);
                v.0 -= &q * &pv.0;
                v.1 -= &q * &pv.1;
                if !v.1.is_zero() {
                    done = false;
                }
            }
        }
        if done {
            pivot = Some(pv);
            break;
        }
        vs.push(pv);
    }
    let (mut bx, mut c) = pivot?;
    if c.is_negative() {
        bx = -bx;
        c = -c;
    }
    let a = vs.iter().fold(BigInt::zero(), |acc, v| acc.gcd(&v.0));
    if a.is_zero() {
        return None;
    }
    let b = bx.mod_floor(&a);
    Some((a, b, c))
}

/// A nonzero fractional ideal `scale * (Z a + Z (b + w))`, `0 <= b < a`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuadIdeal {
    scale: BigRational,
    a: BigInt,
    b: BigInt,
}

impl QuadIdeal {
    pub fn scale(&self) -> &BigRational {
        &self.scale
    }

    /// The two Z-basis elements `scale*a` and `scale*(b + w)`.
    pub fn basis(&self) -> [QuadElem; 2] {
        [
            QuadElem::rational(&self.scale * BigRational::from_integer(self.a.clone())),
            QuadElem::new(&self.scale * BigRational::from_integer(self.b.clone()), self.scale.clone()),
        ]
    }

    /// Integral HNF `[[s a, s b], [0, s]]` over the scale denominator.
    pub fn hnf(&self) -> ([[BigInt; 2]; 2], BigInt) {
        let den = self.scale.denom().clone();
        let s = self.scale.numer().clone();
        ([[&s * &self.a, &s * &self.b], [BigInt::zero(), s]], den)
    }

    pub fn norm(&self) -> BigRational {
        &self.scale * &self.scale * BigRational::from_integer(self.a.clone())
    }

    pub fn is_integral(&self) -> bool {
        self.scale.is_integer()
    }

    pub fn is_unit(&self) -> bool {
        self.scale.is_one() && self.a.is_one()
    }

    pub fn scale_by(&self, q: &BigRational) -> QuadIdeal {
        QuadIdeal { scale: &self.scale * q.abs(), a: self.a.clone(), b: self.b.clone() }
    }

    /// Coordinates of `x` in the basis; `None` if not in the Q-span (never).
    pub fn coordinates(&self, x: &QuadElem) -> (BigRational, BigRational) {
        // x = u * s a + v * s (b + w)
        let v = &x.b / &self.scale;
        let u = (&x.a / &self.scale - &v * BigRational::from_integer(self.b.clone())) / BigRational::from_integer(self.a.clone());
        (u, v)
    }

    pub fn contains(&self, _field: &QuadField, x: &QuadElem) -> bool {
        let (u, v) = self.coordinates(x);
        u.is_integer() && v.is_integer()
    }

    /// Positive generator of `I ∩ Q` (for integral `I`, the integer `f_int`).
    pub fn min_rational(&self) -> BigRational {
        &self.scale * BigRational::from_integer(self.a.clone())
    }

    /// Integral ideal coprime to the integer `n` (no prime above `n`
    /// divides it).
    pub fn is_coprime_to_int(&self, n: &BigInt) -> bool {
        debug_assert!(self.is_integral());
        self.norm().to_integer().gcd(n).is_one()
    }
}

impl fmt::Display for QuadIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*<{}, {} + w>", self.scale, self.a, self.b)
    }
}

/// Images of `k` in `Z_p` modulo `p^W`, together with a primitive `f`-th
/// root of unity.
#[derive(Clone, Debug)]
pub struct PadicEmbedding {
    pub p: u64,
    pub f: u64,
    pub precision: u32,
    modulus: BigInt,
    disc: BigInt,
    /// Image of `sqrt(d)`.
    sqrt_d: BigInt,
    /// Image of `exp(2 pi i / f)`.
    zeta: BigInt,
    pub root_choice: u8,
    pub zeta_choice: usize,
}

impl PadicEmbedding {
    fn new(field: &QuadField, p: u64, f: u64, root_choice: u8, zeta_choice: usize, precision: u32) -> Result<Self> {
        if p == 2 || !arith::is_prime_u64(p) {
            return Err(Error::BadPrime(p));
        }
        if f == 0 || (p - 1) % f != 0 {
            return Err(Error::BadF { f, p });
        }
        let roots = arith::sqrt_mod_prime(field.disc, p);
        if roots.len() != 2 {
            return Err(Error::NonSplitPrime { p });
        }
        let modulus = arith::pow_u64(p, precision);
        let disc = field.disc_big.clone();
        let r0 = BigInt::from(roots[root_choice.min(1) as usize]);
        let sqrt_d = hensel_sqrt(&disc, &r0, p, precision);
        let prims = primitive_roots_of_unity(p, f);
        let g = *prims.get(zeta_choice).ok_or(Error::InvalidIndex)?;
        // Teichmueller lift: g^(p^(W-1))
        let e = arith::pow_u64(p, precision.saturating_sub(1));
        let zeta = BigInt::from(g).modpow(&e, &modulus);
        Ok(PadicEmbedding { p, f, precision, modulus, disc, sqrt_d, zeta, root_choice, zeta_choice })
    }

    /// Number of admissible choices of the root of unity.
    pub fn zeta_choice_count(p: u64, f: u64) -> usize {
        primitive_roots_of_unity(p, f).len()
    }

    pub fn modulus(&self) -> &BigInt {
        &self.modulus
    }

    pub fn sqrt_d(&self) -> &BigInt {
        &self.sqrt_d
    }

    pub fn zeta(&self) -> &BigInt {
        &self.zeta
    }

    /// `zeta^t` modulo `p^W`.
    pub fn zeta_pow(&self, t: u64) -> BigInt {
        self.zeta.modpow(&BigInt::from(t % self.f), &self.modulus)
    }

    /// Image of `x` under the embedding attached to `e` (`Second` applies
    /// the conjugation first). Fails if `x` is not p-integral.
    pub fn embed(&self, x: &QuadElem, e: Embedding) -> Result<BigInt> {
        // w -> (d +- sqrt d)/2
        let two_inv = arith::mod_inverse(&BigInt::from(2), &self.modulus).unwrap();
        let r = match e {
            Embedding::First => self.sqrt_d.clone(),
            Embedding::Second => -self.sqrt_d.clone(),
        };
        let w = ((&self.disc + r) * two_inv).mod_floor(&self.modulus);
        let a = arith::rational_mod(&x.a, &self.modulus).ok_or(Error::NegativeValuation)?;
        let b = arith::rational_mod(&x.b, &self.modulus).ok_or(Error::NegativeValuation)?;
        Ok((a + b * w).mod_floor(&self.modulus))
    }
}

/// Residues `g mod p` of exact multiplicative order `f`, ascending.
pub fn primitive_roots_of_unity(p: u64, f: u64) -> Vec<u64> {
    (1..p)
        .filter(|&g| {
            arith::pow_mod_u64(g, f, p) == 1 && arith::factor_u64(f).iter().all(|&(q, _)| arith::pow_mod_u64(g, f / q, p) != 1)
        })
        .collect()
}

fn hensel_sqrt(a: &BigInt, r0: &BigInt, p: u64, precision: u32) -> BigInt {
    let modulus = arith::pow_u64(p, precision);
    let mut x = r0.clone();
    let mut m = BigInt::from(p);
    while m < modulus {
        m = (&m * &m).min(modulus.clone());
        let inv = arith::mod_inverse(&(&x * 2), &m).expect("simple root");
        x = (&x - (&x * &x - a) * inv).mod_floor(&m);
    }
    x.mod_floor(&modulus)
}

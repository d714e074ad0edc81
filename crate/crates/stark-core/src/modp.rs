//! Residues modulo `p^W` for an odd prime `p`, with `p^W < 2^127`.
//!
//! Elements are stored in Montgomery form (`R = 2^128`), which keeps the
//! inner loops of the series arithmetic free of 256-bit divisions.

use alloc::string::String;
use alloc::vec::Vec;
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::arith;
use crate::error::{Error, Result};

/// A residue modulo `p^W`, in Montgomery representation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Zp(u128);

/// The ring `Z / p^W Z`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZpRing {
    p: u64,
    precision: u32,
    modulus: u128,
    neg_inv: u128,
    r2: u128,
    one: u128,
}

#[inline]
fn mul_wide(a: u128, b: u128) -> (u128, u128) {
    let (a1, a0) = (a >> 64, a & u64::MAX as u128);
    let (b1, b0) = (b >> 64, b & u64::MAX as u128);
    let p00 = a0 * b0;
    let p01 = a0 * b1;
    let p10 = a1 * b0;
    let p11 = a1 * b1;
    let mid = (p00 >> 64) + (p01 & u64::MAX as u128) + (p10 & u64::MAX as u128);
    let lo = (p00 & u64::MAX as u128) | (mid << 64);
    let hi = p11 + (p01 >> 64) + (p10 >> 64) + (mid >> 64);
    (hi, lo)
}

impl ZpRing {
    /// The ring `Z/p^W`. Fails if `p` is not an odd prime or `p^W >= 2^127`.
    pub fn new(p: u64, precision: u32) -> Result<Self> {
        if p == 2 || !arith::is_prime_u64(p) {
            return Err(Error::BadPrime(p));
        }
        let big = arith::pow_u64(p, precision);
        if big.bits() > 126 {
            return Err(Error::PrecisionOverflow(precision));
        }
        let modulus = big.to_u128().unwrap();
        // Newton iteration for m^{-1} mod 2^128
        let mut inv: u128 = 1;
        for _ in 0..7 {
            inv = inv.wrapping_mul(2u128.wrapping_sub(modulus.wrapping_mul(inv)));
        }
        let neg_inv = inv.wrapping_neg();
        let r = BigUint::from(1u8) << 128usize;
        let m = BigUint::from(modulus);
        let one = (&r % &m).to_u128().unwrap();
        let r2 = ((&r * &r) % &m).to_u128().unwrap();
        Ok(ZpRing { p, precision, modulus, neg_inv, r2, one })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn modulus(&self) -> u128 {
        self.modulus
    }

    pub fn modulus_big(&self) -> BigInt {
        BigInt::from(self.modulus)
    }

    #[inline]
    fn redc(&self, hi: u128, lo: u128) -> u128 {
        let t = lo.wrapping_mul(self.neg_inv);
        let (uh, ul) = mul_wide(t, self.modulus);
        let (_, carry) = lo.overflowing_add(ul);
        let mut r = hi + uh + carry as u128;
        if r >= self.modulus {
            r -= self.modulus;
        }
        r
    }

    #[inline]
    pub fn mul(&self, a: Zp, b: Zp) -> Zp {
        let (hi, lo) = mul_wide(a.0, b.0);
        Zp(self.redc(hi, lo))
    }

    #[inline]
    pub fn add(&self, a: Zp, b: Zp) -> Zp {
        let s = a.0 + b.0;
        Zp(if s >= self.modulus { s - self.modulus } else { s })
    }

    #[inline]
    pub fn sub(&self, a: Zp, b: Zp) -> Zp {
        Zp(if a.0 >= b.0 { a.0 - b.0 } else { a.0 + self.modulus - b.0 })
    }

    #[inline]
    pub fn neg(&self, a: Zp) -> Zp {
        Zp(if a.0 == 0 { 0 } else { self.modulus - a.0 })
    }

    pub fn zero(&self) -> Zp {
        Zp(0)
    }

    pub fn one(&self) -> Zp {
        Zp(self.one)
    }

    /// Embeds a standard residue `0 <= x < p^W`.
    pub fn from_residue(&self, x: u128) -> Zp {
        let x = x % self.modulus;
        self.mul(Zp(x), Zp(self.r2))
    }

    pub fn from_u64(&self, x: u64) -> Zp {
        self.from_residue(x as u128)
    }

    pub fn from_i64(&self, x: i64) -> Zp {
        let v = self.from_residue(x.unsigned_abs() as u128);
        if x < 0 {
            self.neg(v)
        } else {
            v
        }
    }

    pub fn from_bigint(&self, x: &BigInt) -> Zp {
        let r = x.mod_floor(&self.modulus_big());
        self.from_residue(r.to_u128().unwrap())
    }

    pub fn from_biguint(&self, x: &BigUint) -> Zp {
        let r = x % BigUint::from(self.modulus);
        self.from_residue(r.to_u128().unwrap())
    }

    /// Reduces a rational with p-integral denominator.
    pub fn from_rational(&self, q: &BigRational) -> Result<Zp> {
        let r = arith::rational_mod(q, &self.modulus_big()).ok_or(Error::NegativeValuation)?;
        Ok(self.from_bigint(&r))
    }

    /// The standard residue in `[0, p^W)`.
    pub fn residue(&self, a: Zp) -> u128 {
        self.redc(0, a.0)
    }

    pub fn residue_big(&self, a: Zp) -> BigInt {
        BigInt::from(self.residue(a))
    }

    pub fn is_zero(&self, a: Zp) -> bool {
        a.0 == 0
    }

    pub fn is_unit(&self, a: Zp) -> bool {
        self.residue(a) % self.p as u128 != 0
    }

    pub fn pow(&self, mut a: Zp, mut e: u128) -> Zp {
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: Zp) -> Option<Zp> {
        let r = BigInt::from(self.residue(a));
        let i = arith::mod_inverse(&r, &self.modulus_big())?;
        Some(self.from_bigint(&i))
    }

    /// p-adic valuation of the residue (`W` for zero).
    pub fn valuation(&self, a: Zp) -> u32 {
        let mut r = self.residue(a);
        if r == 0 {
            return self.precision;
        }
        let mut v = 0;
        while r % self.p as u128 == 0 {
            r /= self.p as u128;
            v += 1;
        }
        v
    }

    /// Base-p digits `d_0, ..., d_{W-1}` of the residue.
    pub fn digits(&self, a: Zp) -> Vec<u64> {
        let mut r = self.residue(a);
        let mut out = Vec::with_capacity(self.precision as usize);
        for _ in 0..self.precision {
            out.push((r % self.p as u128) as u64);
            r /= self.p as u128;
        }
        out
    }

    /// Reduction into a coarser ring `Z/p^V`, `V <= W`.
    pub fn reduce_to(&self, a: Zp, coarse: &ZpRing) -> Zp {
        debug_assert_eq!(self.p, coarse.p);
        coarse.from_residue(self.residue(a))
    }
}

/// Renders `x mod p^N` as `0.d_0 d_1 ... d_{N-1}_p`.
///
/// Digits 10..35 print as `A..Z`; larger digits print as `(n)`.
pub fn format_digits(digits: &[u64], p: u64) -> String {
    let mut s = String::from("0.");
    for &d in digits {
        push_digit(&mut s, d);
    }
    s.push('_');
    s.push_str(&alloc::format!("{p}"));
    s
}

fn push_digit(s: &mut String, d: u64) {
    match d {
        0..=9 => s.push((b'0' + d as u8) as char),
        10..=35 => s.push((b'A' + (d - 10) as u8) as char),
        _ => s.push_str(&alloc::format!("({d})")),
    }
}

/// Parses the digit notation produced by [`format_digits`]; returns
/// `(digits, p)`.
pub fn parse_digits(s: &str) -> Result<(Vec<u64>, u64)> {
    let bad = || Error::Parse(alloc::format!("digit string {s:?}"));
    let body = s.trim().strip_prefix("0.").ok_or_else(bad)?;
    let (ds, p) = body.rsplit_once('_').ok_or_else(bad)?;
    let p: u64 = p.parse().map_err(|_| bad())?;
    let mut out = Vec::new();
    let mut chars = ds.chars();
    while let Some(c) = chars.next() {
        let d = match c {
            '0'..='9' => c as u64 - '0' as u64,
            'A'..='Z' => c as u64 - 'A' as u64 + 10,
            '(' => {
                let mut n = String::new();
                for c in chars.by_ref() {
                    if c == ')' {
                        break;
                    }
                    n.push(c);
                }
                n.parse().map_err(|_| bad())?
            }
            _ => return Err(bad()),
        };
        if d >= p {
            return Err(bad());
        }
        out.push(d);
    }
    Ok((out, p))
}

/// Value of a digit vector as an integer.
pub fn digits_value(digits: &[u64], p: u64) -> BigInt {
    let mut acc = BigInt::zero();
    for &d in digits.iter().rev() {
        acc = acc * BigInt::from(p) + BigInt::from(d);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn montgomery_matches_plain_arithmetic() {
        for (p, w) in [(3u64, 39u32), (7, 24), (11, 17), (7, 44), (3, 79)] {
            let r = ZpRing::new(p, w).unwrap();
            let m = BigInt::from(r.modulus());
            let xs: [i64; 5] = [1, -1, 12345678901234, -987654321, 42];
            for &a in &xs {
                for &b in &xs {
                    let prod = r.mul(r.from_i64(a), r.from_i64(b));
                    let want = (BigInt::from(a) * BigInt::from(b)).mod_floor(&m);
                    assert_eq!(r.residue_big(prod), want);
                }
            }
        }
    }

    #[test]
    fn digit_notation() {
        let r = ZpRing::new(7, 3).unwrap();
        assert_eq!(format_digits(&r.digits(r.from_u64(5)), 7), "0.500_7");
        let r = ZpRing::new(11, 1).unwrap();
        assert_eq!(format_digits(&r.digits(r.from_u64(10)), 11), "0.A_11");
        assert_eq!(format_digits(&[36, 1], 41), "0.(36)1_41");
        assert_eq!(parse_digits("0.(36)1_41").unwrap(), (alloc::vec![36, 1], 41));
        assert_eq!(parse_digits("0.859AA8_11").unwrap().0, alloc::vec![8, 5, 9, 10, 10, 8]);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert_eq!(ZpRing::new(2, 5), Err(Error::BadPrime(2)));
        assert!(matches!(ZpRing::new(3, 90), Err(Error::PrecisionOverflow(90))));
    }
}

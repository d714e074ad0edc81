//! Integer and rational helpers shared by the other modules.

use alloc::vec::Vec;
use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Floor of the square root of a non-negative integer.
pub fn isqrt(n: &BigInt) -> BigInt {
    debug_assert!(!n.is_negative());
    n.sqrt()
}

/// Floor of `q * sqrt(d)` for a non-square `d > 0`.
pub fn floor_mul_sqrt(q: &BigInt, d: &BigInt) -> BigInt {
    let s = isqrt(&(q * q * d));
    if q.is_negative() {
        -s - 1
    } else {
        s
    }
}

/// Sign of `p + q*sqrt(d)` for non-square `d > 0`, as -1, 0 or 1.
pub fn sign_surd(p: &BigRational, q: &BigRational, d: &BigInt) -> i32 {
    let sp = sign_of(p);
    let sq = sign_of(q);
    if sq == 0 {
        return sp;
    }
    if sp == 0 || sp == sq {
        return sq;
    }
    // opposite signs: compare p^2 with q^2 d
    let lhs = p * p;
    let rhs = q * q * BigRational::from_integer(d.clone());
    if lhs > rhs {
        sp
    } else {
        sq
    }
}

pub fn sign_of(q: &BigRational) -> i32 {
    if q.is_zero() {
        0
    } else if q.is_positive() {
        1
    } else {
        -1
    }
}

/// Floor of `p + q*sqrt(d)` for rational `p, q` and non-square `d > 0`.
pub fn floor_surd(p: &BigRational, q: &BigRational, d: &BigInt) -> BigInt {
    let den = p.denom().lcm(q.denom());
    let pn = p.numer() * (&den / p.denom());
    let qn = q.numer() * (&den / q.denom());
    let s = if qn.is_zero() { BigInt::zero() } else { floor_mul_sqrt(&qn, d) };
    // p + q sqrt d lies in ((pn+s)/den, (pn+s+1)/den) when qn != 0
    (pn + s).div_floor(&den)
}

/// Ceiling of an irrational `p + q*sqrt(d)` (`q != 0`).
pub fn ceil_surd(p: &BigRational, q: &BigRational, d: &BigInt) -> BigInt {
    if q.is_zero() {
        return p.ceil().to_integer();
    }
    floor_surd(p, q, d) + 1
}

/// p-adic valuation of a nonzero integer.
pub fn valuation(n: &BigInt, p: u64) -> u32 {
    debug_assert!(!n.is_zero());
    let p = BigInt::from(p);
    let mut n = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

/// p-adic valuation of a nonzero rational.
pub fn rational_valuation(q: &BigRational, p: u64) -> i64 {
    valuation(q.numer(), p) as i64 - valuation(q.denom(), p) as i64
}

pub fn valuation_u64(mut n: u64, p: u64) -> u32 {
    let mut v = 0;
    while n != 0 && n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

/// `ord_p(n!)` by Legendre's formula.
pub fn factorial_valuation(n: u64, p: u64) -> u32 {
    let mut v = 0u64;
    let mut q = n / p;
    while q > 0 {
        v += q;
        q /= p;
    }
    v as u32
}

/// Modular inverse of `a` modulo `m > 1`, if it exists.
pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.mod_floor(m).extended_gcd(m);
    if !e.gcd.is_one() {
        return None;
    }
    Some(e.x.mod_floor(m))
}

/// Reduce a rational modulo `m`, if its denominator is invertible.
pub fn rational_mod(q: &BigRational, m: &BigInt) -> Option<BigInt> {
    let inv = mod_inverse(q.denom(), m)?;
    Some((q.numer() * inv).mod_floor(m))
}

pub fn to_biguint(n: &BigInt) -> BigUint {
    debug_assert!(n.sign() != Sign::Minus);
    n.magnitude().clone()
}

pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut i = 2u64;
    while i * i <= n {
        if n % i == 0 {
            return false;
        }
        i += 1;
    }
    true
}

/// Prime factorisation of a positive integer by trial division.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut q = 2u64;
    while q * q <= n {
        if n % q == 0 {
            let mut e = 0;
            while n % q == 0 {
                n /= q;
                e += 1;
            }
            out.push((q, e));
        }
        q += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Factorisation of a (moderate) positive big integer.
pub fn factor_bigint(n: &BigInt) -> Vec<(u64, u32)> {
    let n = n.abs().to_u64().expect("integer too large to factor by trial division");
    factor_u64(n)
}

/// Square-free test on `|n|`.
/// Euler's totient.
pub fn euler_phi(n: u64) -> u64 {
    factor_u64(n).iter().fold(n, |acc, &(q, _)| acc / q * (q - 1))
}

/// The Moebius function.
pub fn mobius(n: u64) -> i64 {
    let f = factor_u64(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// The Ramanujan sum `c_n(m)`: the trace of `zeta_n^m` from `Q(zeta_n)` to `Q`.
pub fn ramanujan_sum(n: u64, m: u64) -> i64 {
    let g = gcd_u64(n, m % n);
    let q = n / g;
    mobius(q) * (euler_phi(n) / euler_phi(q)) as i64
}

pub fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn lcm_u64(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 { 0 } else { a / gcd_u64(a, b) * b }
}

pub fn is_squarefree(n: u64) -> bool {
    factor_u64(n).iter().all(|&(_, e)| e == 1)
}

/// Binomial coefficient C(n, k) as big integer.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

pub fn pow_u64(base: u64, exp: u32) -> BigInt {
    num_traits::pow(BigInt::from(base), exp as usize)
}

pub fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    (a as u128 * b as u128 % m as u128) as u64
}

pub fn pow_mod_u64(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod_u64(acc, a, m);
        }
        a = mul_mod_u64(a, a, m);
        e >>= 1;
    }
    acc
}

/// All square roots of `a` modulo a prime `p`, ascending (Tonelli-Shanks).
pub fn sqrt_mod_prime(a: i64, p: u64) -> Vec<u64> {
    let a = a.rem_euclid(p as i64) as u64;
    if p == 2 {
        return alloc::vec![a];
    }
    if a == 0 {
        return alloc::vec![0];
    }
    if pow_mod_u64(a, (p - 1) / 2, p) != 1 {
        return Vec::new();
    }
    let (mut q, mut s) = (p - 1, 0u32);
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let mut z = 2;
    while pow_mod_u64(z, (p - 1) / 2, p) != p - 1 {
        z += 1;
    }
    let mut m = s;
    let mut c = pow_mod_u64(z, q, p);
    let mut t = pow_mod_u64(a, q, p);
    let mut r = pow_mod_u64(a, (q + 1) / 2, p);
    while t != 1 {
        let mut i = 0;
        let mut tt = t;
        while tt != 1 {
            tt = mul_mod_u64(tt, tt, p);
            i += 1;
        }
        let b = pow_mod_u64(c, 1u64 << (m - i - 1), p);
        m = i;
        c = mul_mod_u64(b, b, p);
        t = mul_mod_u64(t, c, p);
        r = mul_mod_u64(r, b, p);
    }
    let mut out = alloc::vec![r, p - r];
    out.sort_unstable();
    out
}

/// Primes up to `n` by a simple sieve.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    let n = n as usize;
    if n < 2 {
        return Vec::new();
    }
    let mut sieve = alloc::vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    (0..=n).filter(|&k| sieve[k]).map(|k| k as u64).collect()
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Parses a decimal literal such as `-1.4859` or `0.25` exactly.
pub fn parse_decimal(s: &str) -> Option<BigRational> {
    let s = s.trim();
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((a, b)) => (a, b),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    let digits_ok = |t: &str| t.bytes().all(|c| c.is_ascii_digit());
    if !digits_ok(int_part) || !digits_ok(frac_part) {
        return None;
    }
    let mut all = alloc::string::String::from(int_part);
    all.push_str(frac_part);
    let mant = if all.is_empty() { BigInt::zero() } else { all.parse::<BigInt>().ok()? };
    let den = num_traits::pow(BigInt::from(10), frac_part.len());
    let v = BigRational::new(mant, den);
    Some(if neg { -v } else { v })
}

/// Number of decimal digits after the point in a literal.
pub fn decimal_places(s: &str) -> usize {
    s.trim().split_once('.').map(|(_, f)| f.len()).unwrap_or(0)
}

/// Truncates a decimal literal to at most `places` fractional digits.
pub fn truncate_decimal(s: &str, places: usize) -> alloc::string::String {
    let s = s.trim();
    match s.split_once('.') {
        Some((a, b)) if b.len() > places => {
            let mut out = alloc::string::String::from(a);
            if places > 0 {
                out.push('.');
                out.push_str(&b[..places]);
            }
            out
        }
        _ => alloc::string::String::from(s),
    }
}

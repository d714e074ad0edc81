//! Pairs `(xi, I)`: a fractional ideal `I = a f^-1 D^-1` carrying the
//! additive character `x -> exp(2 pi i Tr(x))`, and the action of ray
//! classes on them.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::quadfield::{QuadElem, QuadField, QuadIdeal};
use crate::rayclass::{ClassLabel, RayClassGroup};

/// A value `zeta_f^t` of the character, stored by its exponent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CharValue {
    pub exponent: u64,
    pub order: u64,
}

impl CharValue {
    pub fn is_trivial(&self) -> bool {
        self.exponent == 0
    }
}

/// A pair `(xi, I)` with `I = a f^-1 D^-1`, `a` integral.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharPair {
    ideal: QuadIdeal,
    multiplier: QuadIdeal,
    conductor: u64,
}

impl CharPair {
    /// The ideal `I`.
    pub fn ideal(&self) -> &QuadIdeal {
        &self.ideal
    }

    /// The integral ideal `a` with `I = a f^-1 D^-1`.
    pub fn multiplier(&self) -> &QuadIdeal {
        &self.multiplier
    }

    /// The positive generator `f` of `f ∩ Z`: the order of the character.
    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    /// `N(I)` as an exact rational.
    pub fn norm(&self) -> BigRational {
        self.ideal.norm()
    }

    /// `xi(x)` for `x` in `I`.
    pub fn evaluate(&self, field: &QuadField, x: &QuadElem) -> Result<CharValue> {
        if !self.ideal.contains(field, x) {
            return Err(Error::NotInIdeal);
        }
        let f = BigInt::from(self.conductor);
        let scaled = field.trace(x) * BigRational::from_integer(f.clone());
        if !scaled.is_integer() {
            return Err(Error::NotIntegral);
        }
        let t = scaled.to_integer().mod_floor(&f);
        Ok(CharValue { exponent: t.to_u64().unwrap(), order: self.conductor })
    }

    /// Whether `x` lies in the kernel of `xi`.
    pub fn in_kernel(&self, field: &QuadField, x: &QuadElem) -> Result<bool> {
        Ok(self.evaluate(field, x)?.is_trivial())
    }

    /// The exact annihilator test: whether `c I` lies in the kernel lattice
    /// for the integral element `c`.
    pub fn annihilates(&self, field: &QuadField, c: &QuadElem) -> Result<bool> {
        for b in self.ideal.basis() {
            if !self.in_kernel(field, &field.mul(c, &b))? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The pair `(xi|_{aI}, aI)` for an integral ideal `a`.
    pub fn scaled(&self, field: &QuadField, a: &QuadIdeal) -> CharPair {
        CharPair {
            ideal: field.ideal_mul(a, &self.ideal),
            multiplier: field.ideal_mul(a, &self.multiplier),
            conductor: self.conductor,
        }
    }
}

/// The base pair `(xi_f^0, f^-1 D^-1)`.
pub fn base_pair(field: &QuadField, f: &QuadIdeal) -> Result<CharPair> {
    if !f.is_integral() {
        return Err(Error::NotIntegral);
    }
    if f.is_unit() {
        return Err(Error::TrivialModulus);
    }
    let conductor = f.min_rational().to_integer().to_u64().ok_or(Error::InvalidIndex)?;
    let ideal = field.ideal_inv(&field.ideal_mul(f, &field.different()));
    Ok(CharPair { ideal, multiplier: field.unit_ideal(), conductor })
}

/// `c . w`: the pair scaled by the representative of `c` of least norm
/// coprime to `f` and `aux`.
pub fn act(field: &QuadField, pair: &CharPair, class: &ClassLabel, group: &RayClassGroup, aux: u64) -> Result<CharPair> {
    let a = group.representative(class, aux)?;
    if !a.is_coprime_to_int(&BigInt::from(aux.max(1))) {
        return Err(Error::NotCoprime);
    }
    Ok(pair.scaled(field, &a))
}

/// Whether `x` is in the kernel of the pair's character.
pub fn kernel_test(field: &QuadField, pair: &CharPair, x: &QuadElem) -> Result<bool> {
    pair.in_kernel(field, x)
}

/// Whether `I` is prime to `p` (its norm is a `p`-unit).
pub fn is_prime_to(pair: &CharPair, p: u64) -> bool {
    let n = pair.norm();
    let p = BigInt::from(p);
    !(n.numer() % &p).is_zero() && !(n.denom() % &p).is_zero()
}

/// Embedding-independent sanity data: `f Tr(x)` is integral on a basis.
pub fn trace_denominators_divide_conductor(field: &QuadField, pair: &CharPair) -> bool {
    let f = BigRational::from_integer(BigInt::from(pair.conductor));
    pair.ideal.basis().iter().all(|b| (field.trace(b) * &f).is_integer())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith;

    fn setup() -> (QuadField, QuadIdeal) {
        let k = QuadField::new(37).unwrap();
        let f = k.principal_ideal(&QuadElem::from_ints(2, 0)).unwrap();
        (k, f)
    }

    #[test]
    fn base_pair_sqrt37() {
        let (k, f) = setup();
        let w = base_pair(&k, &f).unwrap();
        assert_eq!(w.conductor(), 2);
        // I = (1/(2 sqrt 37)) O
        let gen = k.inv(&k.mul(&QuadElem::from_ints(2, 0), &k.sqrt_d()));
        assert_eq!(*w.ideal(), k.principal_ideal(&gen).unwrap());
        let x = k.mul(&QuadElem::omega(), &gen);
        assert_eq!(w.evaluate(&k, &x).unwrap().exponent, 1);
        assert!(w.evaluate(&k, &gen).unwrap().is_trivial());
        assert!(trace_denominators_divide_conductor(&k, &w));
    }

    #[test]
    fn annihilator_is_exactly_f() {
        let (k, f) = setup();
        let w = base_pair(&k, &f).unwrap();
        assert!(w.annihilates(&k, &QuadElem::from_ints(2, 0)).unwrap());
        assert!(!w.annihilates(&k, &QuadElem::from_ints(1, 0)).unwrap());
        // a modulus with two prime factors of 5 in Q(sqrt 89)
        let k = QuadField::new(89).unwrap();
        let q5 = k.primes_above(5).remove(0);
        let w = base_pair(&k, &q5).unwrap();
        assert_eq!(w.conductor(), 5);
        assert!(w.annihilates(&k, &QuadElem::from_ints(5, 0)).unwrap());
        assert!(!w.annihilates(&k, &QuadElem::from_ints(1, 0)).unwrap());
    }

    #[test]
    fn evaluation_is_additive_and_checks_membership() {
        let (k, f) = setup();
        let w = base_pair(&k, &f).unwrap();
        let [b0, b1] = w.ideal().basis();
        let s = b0.add(&b1);
        let v = |x: &QuadElem| w.evaluate(&k, x).unwrap().exponent;
        assert_eq!(v(&s), (v(&b0) + v(&b1)) % 2);
        assert!(matches!(w.evaluate(&k, &QuadElem::rational(arith::rat(1, 3))), Err(Error::NotInIdeal)));
        assert!(matches!(base_pair(&k, &k.unit_ideal()), Err(Error::TrivialModulus)));
    }

    #[test]
    fn acting_preserves_the_annihilator() {
        let (k, f) = setup();
        let g = RayClassGroup::new(&k, &f, true, 7).unwrap();
        let w = base_pair(&k, &f).unwrap();
        for c in g.labels() {
            let cw = act(&k, &w, &c, &g, 7).unwrap();
            assert!(trace_denominators_divide_conductor(&k, &cw));
            assert!(cw.multiplier().is_coprime_to_int(&BigInt::from(14)));
            assert_eq!(cw.norm(), cw.multiplier().norm() / (f.norm() * arith::int(37)));
        }
    }
}

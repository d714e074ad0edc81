//! Twisted partial zeta values of a cone: exact values at non-positive
//! integers and the p-adic value at `s = 1`.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith;
use crate::charpairs::CharPair;
use crate::error::{Error, Result};
use crate::modp::{Zp, ZpRing};
use crate::quadfield::{Embedding, PadicEmbedding, QuadElem, QuadField};
use crate::series::{binom_power, CoeffRing, CycQuad, CycQuadRing, PadicBinomials, TruncSeries};
use crate::shintani::{self, Cone, ConeFan};

/// `c_n = sum over p-th roots of unity zeta of (zeta - 1)^n`, `n = 1..=n_max`
/// (entry `n - 1`), by the linear recurrence of order `p - 1`.
pub fn c_sequence(p: u64, n_max: usize) -> Vec<BigInt> {
    let pu = p as usize;
    let binoms: Vec<BigInt> = (0..=p).map(|k| arith::binomial(p, k)).collect();
    let mut c: Vec<BigInt> = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let v = if n < pu {
            let s = BigInt::from(p);
            if n % 2 == 0 { s } else { -s }
        } else {
            let mut acc = BigInt::zero();
            for k in 1..pu {
                acc += &binoms[k] * &c[n - k - 1];
            }
            -acc
        };
        c.push(v);
    }
    c
}

/// `c_n` from the closed form `p sum_r (-1)^(n-pr) binom(n, pr)`.
pub fn c_explicit(p: u64, n: u64) -> BigInt {
    let mut acc = BigInt::zero();
    let mut r = 0;
    while p * r <= n {
        let term = arith::binomial(n, p * r);
        if (n - p * r) % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
        r += 1;
    }
    acc * BigInt::from(p)
}

/// Precision parameters for `N` correct p-adic digits at `s = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrecisionPlan {
    pub p: u64,
    /// Target number of digits `N`.
    pub digits: u32,
    /// Series truncation: coefficients `a_{i,l}` with `i + l < degree` are used.
    pub degree: usize,
    /// Working exponent `W` of the coefficient ring `Z/p^W`.
    pub working: u32,
    /// Exponent `W'` to which binomial exponents must be known.
    pub guard: u32,
}

/// Upper bound for Euler's number used in the domain test.
fn e_upper() -> BigRational {
    BigRational::new(BigInt::from(2_718_281_829u64), BigInt::from(1_000_000_000u64))
}

/// Whether `M >= 2(p-1)/log p - 2`, i.e. `p^(M+2) >= e^(2(p-1))`; decided
/// conservatively with a rational upper bound for `e`.
pub fn in_planning_domain(p: u64, m: usize) -> bool {
    let lhs = BigRational::from_integer(arith::pow_u64(p, (m + 2) as u32));
    let mut rhs = BigRational::one();
    let e = e_upper();
    for _ in 0..2 * (p - 1) {
        rhs *= &e;
    }
    lhs >= rhs
}

/// Whether `f_p(M) > N` with `f_p(x) = (x+2)/(p-1) - (2/log p) log(x/2+1) - 2`.
///
/// Multiplying through by `(p-1) log p / 2 > 0` and exponentiating, this is
/// `p^(M + 2 - (N+2)(p-1)) 4^(p-1) > (M+2)^(2(p-1))`, an integer comparison.
pub fn exceeds_target(p: u64, m: usize, n: u32) -> bool {
    let e = (m as i64 + 2) - (n as i64 + 2) * (p as i64 - 1);
    if e <= 0 {
        return false;
    }
    let lhs = arith::pow_u64(p, e as u32) * arith::pow_u64(4, (p - 1) as u32);
    let rhs = BigInt::from(m as u64 + 2).pow(2 * (p as u32 - 1));
    lhs > rhs
}

/// The least admissible `M` with `f_p(M) > N`.
pub fn precision_plan(p: u64, digits: u32) -> PrecisionPlan {
    let mut m = 0;
    while !(in_planning_domain(p, m) && exceeds_target(p, m, digits)) {
        m += 1;
    }
    let working = digits.max(1);
    let guard = working + arith::factorial_valuation(m as u64, p);
    PrecisionPlan { p, digits, degree: m, working, guard }
}

/// A coefficient ring together with the exponential `(1+X)^iota(x)` and the
/// values of the character.
pub trait SeriesContext {
    type Ring: CoeffRing;
    fn ring(&self) -> &Self::Ring;
    fn field(&self) -> &QuadField;
    /// Total degree kept.
    fn degree(&self) -> usize;
    /// `zeta_f^t`.
    fn root_of_unity(&self, t: u64) -> <Self::Ring as CoeffRing>::Elem;
    /// Coefficients of `(1 + X)^iota(x)` for the embedding `e`.
    fn exponential(&self, x: &QuadElem, e: Embedding) -> Result<Vec<<Self::Ring as CoeffRing>::Elem>>;
}

/// Exact arithmetic in `Q(mu_f)(sqrt d)`.
pub struct ExactContext<'a> {
    field: &'a QuadField,
    ring: CycQuadRing,
    degree: usize,
}

impl<'a> ExactContext<'a> {
    pub fn new(field: &'a QuadField, f: u64, degree: usize) -> Self {
        ExactContext { field, ring: CycQuadRing::new(f, field.disc()), degree }
    }
}

impl SeriesContext for ExactContext<'_> {
    type Ring = CycQuadRing;
    fn ring(&self) -> &CycQuadRing {
        &self.ring
    }
    fn field(&self) -> &QuadField {
        self.field
    }
    fn degree(&self) -> usize {
        self.degree
    }
    fn root_of_unity(&self, t: u64) -> CycQuad {
        self.ring.zeta_pow(t as i64)
    }
    fn exponential(&self, x: &QuadElem, e: Embedding) -> Result<Vec<CycQuad>> {
        let (p, q) = self.field.surd_parts(x);
        let q = if e == Embedding::First { q } else { -q };
        binom_power(&self.ring, &self.ring.surd(p, q), self.degree)
    }
}

/// Arithmetic in `Z/p^W` through a p-adic embedding.
pub struct PadicContext<'a> {
    field: &'a QuadField,
    ring: ZpRing,
    embedding: PadicEmbedding,
    binomials: PadicBinomials,
    zeta: Zp,
    degree: usize,
}

impl<'a> PadicContext<'a> {
    /// Working precision `working`, series degree `degree`; the embedding is
    /// built with enough guard digits for the binomial coefficients.
    pub fn new(field: &'a QuadField, p: u64, f: u64, root_choice: u8, zeta_choice: usize, working: u32, degree: usize) -> Result<Self> {
        let ring = ZpRing::new(p, working)?;
        let binomials = PadicBinomials::new(p, working, degree);
        let embedding = field.padic_embedding(p, f, root_choice, zeta_choice, binomials.guard_precision())?;
        let zeta = ring.from_bigint(embedding.zeta());
        Ok(PadicContext { field, ring, embedding, binomials, zeta, degree })
    }

    pub fn from_plan(field: &'a QuadField, plan: &PrecisionPlan, f: u64, root_choice: u8, zeta_choice: usize) -> Result<Self> {
        // a_{i,l} is needed for i + l < M only
        Self::new(field, plan.p, f, root_choice, zeta_choice, plan.working, plan.degree.saturating_sub(1))
    }

    pub fn zp(&self) -> &ZpRing {
        &self.ring
    }

    pub fn embedding(&self) -> &PadicEmbedding {
        &self.embedding
    }
}

impl SeriesContext for PadicContext<'_> {
    type Ring = ZpRing;
    fn ring(&self) -> &ZpRing {
        &self.ring
    }
    fn field(&self) -> &QuadField {
        self.field
    }
    fn degree(&self) -> usize {
        self.degree
    }
    fn root_of_unity(&self, t: u64) -> Zp {
        self.ring.pow(self.zeta, t as u128)
    }
    fn exponential(&self, x: &QuadElem, e: Embedding) -> Result<Vec<Zp>> {
        let a = self.embedding.embed(x, e)?;
        Ok(self.binomials.series_in(&self.ring, &a))
    }
}

type Series<C> = TruncSeries<<<C as SeriesContext>::Ring as CoeffRing>::Elem>;

fn char_exponent(pair: &CharPair, field: &QuadField, x: &QuadElem, power: u64) -> Result<u64> {
    let v = pair.evaluate(field, x)?;
    Ok((v.exponent * power) % v.order)
}

/// Divides by `1 - xi(tau)(1+X)^iota(tau)`.
fn divide_by_generator<C: SeriesContext>(ctx: &C, pair: &CharPair, num: &Series<C>, tau: &QuadElem, power: u64) -> Result<Series<C>> {
    let field = ctx.field();
    let t = char_exponent(pair, field, tau, power)?;
    if t == 0 {
        return Err(Error::KernelGenerator);
    }
    let c = ctx.root_of_unity(t);
    let u = ctx.exponential(tau, Embedding::First)?;
    let v = ctx.exponential(tau, Embedding::Second)?;
    num.div_one_minus_separable(ctx.ring(), &c, &u, &v)
}

fn numerator<C: SeriesContext>(ctx: &C, pair: &CharPair, points: &[QuadElem], power: u64) -> Result<Series<C>> {
    let ring = ctx.ring();
    let field = ctx.field();
    let mut num = TruncSeries::zero(ring, ctx.degree());
    for a in points {
        let c = ctx.root_of_unity(char_exponent(pair, field, a, power)?);
        let u = ctx.exponential(a, Embedding::First)?;
        let v = ctx.exponential(a, Embedding::Second)?;
        num.add_outer(ring, &c, &u, &v);
    }
    Ok(num)
}

/// `F(X; xi^power, I, t1, t2)`: the sum over `points = I ∩ P(t1, t2)` of
/// `xi(a)(1+X)^iota(a)`, divided by both `1 - xi(t)(1+X)^iota(t)`.
pub fn build_f<C: SeriesContext>(ctx: &C, pair: &CharPair, t1: &QuadElem, t2: &QuadElem, points: &[QuadElem], power: u64) -> Result<Series<C>> {
    let num = numerator(ctx, pair, points, power)?;
    let q = divide_by_generator(ctx, pair, &num, t1, power)?;
    divide_by_generator(ctx, pair, &q, t2, power)
}

/// The points of `I ∩ P(p t1, p t2)` with `p ∤ |I : (a)|`.
pub fn t_p_points(field: &QuadField, pair: &CharPair, t1: &QuadElem, t2: &QuadElem, p: u64) -> Result<Vec<QuadElem>> {
    let pt1 = t1.scale_int(p as i64);
    let pt2 = t2.scale_int(p as i64);
    let all = shintani::enumerate_parallelogram(field, pair.ideal(), &pt1, &pt2)?;
    let pb = BigInt::from(p);
    Ok(all
        .into_iter()
        .filter(|a| {
            let idx = field.generalized_index(pair.ideal(), a);
            debug_assert!(idx.is_integer());
            !(idx.to_integer() % &pb).is_zero()
        })
        .collect())
}

/// `F_{T_p}(X; xi^power, I, t1, t2)`.
pub fn build_f_star<C: SeriesContext>(ctx: &C, pair: &CharPair, t1: &QuadElem, t2: &QuadElem, p: u64, power: u64) -> Result<Series<C>> {
    let field = ctx.field();
    let pts = t_p_points(field, pair, t1, t2, p)?;
    let num = numerator(ctx, pair, &pts, power)?;
    let q = divide_by_generator(ctx, pair, &num, &t1.scale_int(p as i64), power)?;
    divide_by_generator(ctx, pair, &q, &t2.scale_int(p as i64), power)
}

/// `z(m; xi^power, I, t1, t2)` for `m <= 0` (or the `T_p` version).
pub fn exact_z_at_m(ctx: &ExactContext<'_>, pair: &CharPair, cone: &Cone, m: i64, t_p: Option<u64>, power: u64) -> Result<CycQuad> {
    if m > 0 {
        return Err(Error::InvalidIndex);
    }
    let n = (-m) as usize;
    if ctx.degree() < 2 * n {
        return Err(Error::InsufficientDegree { needed: 2 * n });
    }
    let f = match t_p {
        None => build_f(ctx, pair, &cone.start, &cone.end, &cone.points, power)?,
        Some(p) => build_f_star(ctx, pair, &cone.start, &cone.end, p, power)?,
    };
    f.delta_power_at_zero(ctx.ring(), n)
}

/// The p-integral brackets `c_{n}/(p n)`, `n = 1..=count`, in `Z/p^W`.
pub fn c_brackets(ring: &ZpRing, count: usize) -> Result<Vec<Zp>> {
    let p = ring.p();
    let c = c_sequence(p, count);
    c.iter()
        .enumerate()
        .map(|(i, cn)| {
            let q = BigRational::new(cn.clone(), BigInt::from(p) * BigInt::from(i as u64 + 1));
            ring.from_rational(&q).map_err(|_| Error::NegativeValuation)
        })
        .collect()
}

/// Evaluates `(1/p^2) sum_{i+l<M} c_{i+1} c_{l+1} a_{i,l} / ((i+1)(l+1))` where
/// `(1+X)^-1 F = sum a_{i,l} X1^i X2^l` and `M = F.degree() + 1`.
pub fn value_at_one_from_series(ring: &ZpRing, f: &TruncSeries<Zp>, brackets: &[Zp]) -> Zp {
    let a = f.div_one_plus_both(ring);
    let m = f.degree();
    let mut acc = ring.zero();
    for v in 0..=m {
        for l in 0..=v {
            let i = v - l;
            let t = ring.mul(ring.mul(brackets[i], brackets[l]), *a.coeff(i, l));
            acc = ring.add(acc, t);
        }
    }
    acc
}

/// `z^(j)_{T_p,p}(1; xi, I, t1, t2)` modulo `p^W`.
pub fn padic_z_at_1(ctx: &PadicContext<'_>, pair: &CharPair, cone: &Cone) -> Result<Zp> {
    if !crate::charpairs::is_prime_to(pair, ctx.ring.p()) {
        return Err(Error::HypothesisViolation("the ideal is not prime to p".into()));
    }
    let f = build_f(ctx, pair, &cone.start, &cone.end, &cone.points, 1)?;
    let brackets = c_brackets(&ctx.ring, ctx.degree() + 1)?;
    Ok(value_at_one_from_series(&ctx.ring, &f, &brackets))
}

/// `N(I)` reduced to a unit of `Z/p^W`.
pub fn norm_unit(ring: &ZpRing, pair: &CharPair) -> Result<Zp> {
    let n = ring.from_rational(&pair.norm()).map_err(|_| Error::HypothesisViolation("N(I) is not prime to p".into()))?;
    if !ring.is_unit(n) {
        return Err(Error::HypothesisViolation("N(I) is not prime to p".into()));
    }
    Ok(n)
}

/// `Z^(j)_{T_p,p}(1; w) = N(I) sum_t z(1; xi, I, rho_{t-1}, rho_t)`.
pub fn padic_big_z_at_1(ctx: &PadicContext<'_>, pair: &CharPair, fan: &ConeFan) -> Result<Zp> {
    let mut acc = ctx.ring.zero();
    for cone in &fan.cones {
        acc = ctx.ring.add(acc, padic_z_at_1(ctx, pair, cone)?);
    }
    Ok(ctx.ring.mul(norm_unit(&ctx.ring, pair)?, acc))
}

/// Lower bound `ceil(n/(p-1))` for `ord_p(c_n)`.
pub fn c_valuation_bound(p: u64, n: u64) -> u64 {
    n.div_ceil(p - 1)
}

/// Whether every `c_n/(p n)` for `n <= n_max` is p-integral.
pub fn brackets_are_integral(p: u64, n_max: usize) -> bool {
    c_sequence(p, n_max).iter().enumerate().all(|(i, c)| {
        if c.is_zero() {
            return true;
        }
        let v = arith::valuation(&c.abs(), p) as i64;
        v >= 1 + arith::valuation_u64(i as u64 + 1, p) as i64
    })
}

/// Smallest exponent with `|c_n|` divisible by it, for reporting.
pub fn c_valuation(c: &BigInt, p: u64) -> Option<u32> {
    if c.is_zero() { None } else { Some(arith::valuation(&c.abs(), p)) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charpairs::base_pair;
    use crate::shintani::continued_fraction_fan;

    #[test]
    fn c_sequence_small() {
        let c = c_sequence(3, 4);
        assert_eq!(c, [-3, 3, 0, -9].map(BigInt::from).to_vec());
        for (i, cn) in c.iter().enumerate() {
            assert_eq!(*cn, c_explicit(3, i as u64 + 1));
        }
    }

    #[test]
    fn c_sequence_matches_closed_form() {
        for p in [3u64, 5, 7, 11, 13] {
            let c = c_sequence(p, 120);
            for (i, cn) in c.iter().enumerate() {
                let n = i as u64 + 1;
                assert_eq!(*cn, c_explicit(p, n));
                if let Some(v) = c_valuation(cn, p) {
                    assert!(v as u64 >= c_valuation_bound(p, n));
                }
            }
            assert!(brackets_are_integral(p, 120));
        }
    }

    #[test]
    fn plan_examples() {
        let plan = precision_plan(3, 24);
        assert_eq!(plan.degree, 63);
        assert_eq!(plan.working, 24);
        assert_eq!(plan.guard, 24 + arith::factorial_valuation(63, 3));
        // f_3(62) < 24 < f_3(63)
        let f = |x: f64, p: f64| (x + 2.0) / (p - 1.0) - 2.0 / p.ln() * (x / 2.0 + 1.0).ln() - 2.0;
        assert!(f(63.0, 3.0) > 24.0 && f(62.0, 3.0) < 24.0);
        for (p, n) in [(3u64, 39u32), (5, 23), (7, 24), (11, 17), (13, 10), (19, 6), (41, 2)] {
            let plan = precision_plan(p, n);
            let m = plan.degree as f64;
            let pf = p as f64;
            assert!(f(m, pf) > n as f64, "p = {p}");
            assert!(m >= 2.0 * (pf - 1.0) / pf.ln() - 2.0);
            let prev = m - 1.0;
            assert!(f(prev, pf) <= n as f64 || prev < 2.0 * (pf - 1.0) / pf.ln() - 2.0);
        }
        // large p: the domain constraint binds
        let plan = precision_plan(101, 1);
        assert!(plan.degree as f64 >= 2.0 * 100.0 / (101f64).ln() - 2.0);
    }

    fn example_one() -> (QuadField, CharPair, ConeFan) {
        let k = QuadField::new(37).unwrap();
        let f = k.principal_ideal(&QuadElem::from_ints(2, 0)).unwrap();
        let pair = base_pair(&k, &f).unwrap();
        let eps = k.ray_unit_generator(&f);
        let fan = continued_fraction_fan(&k, &pair, &eps).unwrap();
        (k, pair, fan)
    }

    #[test]
    fn exact_values_are_rational_and_additive() {
        let (k, pair, fan) = example_one();
        let ctx = ExactContext::new(&k, 2, 4);
        let ring = ctx.ring();
        let mut total = ring.zero();
        for cone in &fan.cones {
            let z = exact_z_at_m(&ctx, &pair, cone, 0, None, 1).unwrap();
            assert!(z.v.is_zero());
            total = ring.add(&total, &z);
        }
        let big = shintani::single_cone(&k, &pair, &fan.rays[0], &k.ray_unit_generator(&k.principal_ideal(&QuadElem::from_ints(2, 0)).unwrap())).unwrap();
        let z_big = exact_z_at_m(&ctx, &pair, &big, 0, None, 1).unwrap();
        assert_eq!(z_big, total);
        let z2 = exact_z_at_m(&ctx, &pair, &fan.cones[0], -2, None, 1).unwrap();
        assert!(z2.v.is_zero());
    }

    #[test]
    fn constant_term_is_the_character_sum() {
        let (k, pair, fan) = example_one();
        let ctx = ExactContext::new(&k, 2, 2);
        let cone = &fan.cones[0];
        let f = build_f(&ctx, &pair, &cone.start, &cone.end, &cone.points, 1).unwrap();
        let ring = ctx.ring();
        let sign = |x: &QuadElem| if pair.evaluate(&k, x).unwrap().exponent == 0 { 1i64 } else { -1 };
        let s: i64 = cone.points.iter().map(sign).sum();
        let den = (1 - sign(&cone.start)) * (1 - sign(&cone.end));
        assert_eq!(*f.coeff(0, 0), ring.surd(arith::rat(s, den), arith::int(0)));
        // conjugating sqrt(d) swaps the variables
        let conj = f.map(|c| ring.conj(c));
        assert_eq!(conj, f.swap_variables());
    }

    #[test]
    fn padic_fan_additivity_and_root_symmetry() {
        let (k, pair, fan) = example_one();
        let eps = k.ray_unit_generator(&k.principal_ideal(&QuadElem::from_ints(2, 0)).unwrap());
        let plan = precision_plan(7, 6);
        let big = shintani::single_cone(&k, &pair, &fan.rays[0], &eps).unwrap();
        let mut values = Vec::new();
        for root in 0..2 {
            let ctx = PadicContext::from_plan(&k, &plan, 2, root, 0).unwrap();
            let ring = ctx.zp().clone();
            let mut sum = ring.zero();
            for cone in &fan.cones {
                sum = ring.add(sum, padic_z_at_1(&ctx, &pair, cone).unwrap());
            }
            assert_eq!(sum, padic_z_at_1(&ctx, &pair, &big).unwrap());
            values.push(ring.residue(sum));
        }
        assert_eq!(values[0], values[1]);
    }
}

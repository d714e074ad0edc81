//! The group-ring element `sum_c Z(1; c.w) sigma_c^-1` over a ray class
//! group, its symmetry under inversion, and table-style formatting.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::charpairs::{act, base_pair, is_prime_to, CharPair};
use crate::error::{Error, Result};
use crate::modp::{format_digits, Zp, ZpRing};
use crate::quadfield::{QuadField, QuadIdeal};
use crate::rayclass::{lift_and_kernel, ClassLabel, RayClassGroup};
use crate::shintani::{continued_fraction_fan, ConeFan};
use crate::zeta::{padic_big_z_at_1, precision_plan, PadicContext, PrecisionPlan};

/// A finite abelian group `Z/n_1 x ... x Z/n_r` with elements ordered
/// lexicographically by exponent vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteAbelianGroup {
    orders: Vec<u64>,
}

impl FiniteAbelianGroup {
    pub fn new(orders: &[u64]) -> Self {
        assert!(orders.iter().all(|&n| n >= 1));
        FiniteAbelianGroup { orders: orders.to_vec() }
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn order(&self) -> usize {
        self.orders.iter().product::<u64>() as usize
    }

    pub fn identity(&self) -> Vec<u64> {
        alloc::vec![0; self.orders.len()]
    }

    /// Position of an exponent vector in the canonical order.
    pub fn index_of(&self, g: &[u64]) -> usize {
        assert_eq!(g.len(), self.orders.len());
        g.iter().zip(&self.orders).fold(0usize, |acc, (&e, &n)| acc * n as usize + (e % n) as usize)
    }

    pub fn element(&self, mut index: usize) -> Vec<u64> {
        let mut g = alloc::vec![0; self.orders.len()];
        for (slot, &n) in g.iter_mut().zip(&self.orders).rev() {
            *slot = (index % n as usize) as u64;
            index /= n as usize;
        }
        g
    }

    pub fn elements(&self) -> Vec<Vec<u64>> {
        (0..self.order()).map(|i| self.element(i)).collect()
    }

    pub fn add(&self, x: &[u64], y: &[u64]) -> Vec<u64> {
        x.iter().zip(y).zip(&self.orders).map(|((a, b), n)| (a + b) % n).collect()
    }

    pub fn neg(&self, x: &[u64]) -> Vec<u64> {
        x.iter().zip(&self.orders).map(|(a, n)| (n - a % n) % n).collect()
    }

    /// `σ^2`, `σ1σ2^3`, ... ; the identity is the empty string.
    pub fn name(&self, g: &[u64]) -> String {
        let mut s = String::new();
        let several = self.orders.len() > 1;
        for (i, &e) in g.iter().enumerate() {
            if e == 0 {
                continue;
            }
            s.push('σ');
            if several {
                s.push_str(&subscript(i as u64 + 1));
            }
            if e > 1 {
                s.push_str(&superscript(e));
            }
        }
        s
    }
}

fn map_digits(n: u64, table: &[char; 10]) -> String {
    format!("{n}").chars().map(|c| table[c.to_digit(10).unwrap() as usize]).collect()
}

fn superscript(n: u64) -> String {
    map_digits(n, &['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'])
}

fn subscript(n: u64) -> String {
    map_digits(n, &['₀', '₁', '₂', '₃', '₄', '₅', '₆', '₇', '₈', '₉'])
}

/// An element of `T[G]`, one coefficient per group element in canonical order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupRingElem<T> {
    group: FiniteAbelianGroup,
    coeffs: Vec<T>,
}

impl<T: Clone> GroupRingElem<T> {
    pub fn from_coefficients(group: FiniteAbelianGroup, coeffs: Vec<T>) -> Result<Self> {
        if coeffs.len() != group.order() {
            return Err(Error::InconsistentDimensions(format!("{} coefficients for a group of order {}", coeffs.len(), group.order())));
        }
        Ok(GroupRingElem { group, coeffs })
    }

    pub fn constant(group: FiniteAbelianGroup, zero: T, c: T) -> Self {
        let mut coeffs = alloc::vec![zero; group.order()];
        coeffs[0] = c;
        GroupRingElem { group, coeffs }
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn coefficients(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeff(&self, g: &[u64]) -> &T {
        &self.coeffs[self.group.index_of(g)]
    }

    pub fn set(&mut self, g: &[u64], c: T) {
        let i = self.group.index_of(g);
        self.coeffs[i] = c;
    }

    pub fn map<U: Clone>(&self, f: impl Fn(&T) -> U) -> GroupRingElem<U> {
        GroupRingElem { group: self.group.clone(), coeffs: self.coeffs.iter().map(f).collect() }
    }

    /// The involution `sum a_g g -> sum a_g g^-1`.
    pub fn invert_group(&self) -> Self {
        let mut out = self.clone();
        for (i, c) in self.coeffs.iter().enumerate() {
            let g = self.group.neg(&self.group.element(i));
            out.set(&g, c.clone());
        }
        out
    }

    /// Coefficientwise combination.
    pub fn zip_with(&self, other: &Self, f: impl Fn(&T, &T) -> T) -> Self {
        assert_eq!(self.group, other.group);
        GroupRingElem { group: self.group.clone(), coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| f(a, b)).collect() }
    }

    /// Convolution with explicit ring operations.
    pub fn convolve_with(&self, other: &Self, zero: T, add: impl Fn(&T, &T) -> T, mul: impl Fn(&T, &T) -> T) -> Self {
        assert_eq!(self.group, other.group);
        let g = &self.group;
        let mut out = alloc::vec![zero; g.order()];
        for (i, a) in self.coeffs.iter().enumerate() {
            let gi = g.element(i);
            for (j, b) in other.coeffs.iter().enumerate() {
                let k = g.index_of(&g.add(&gi, &g.element(j)));
                out[k] = add(&out[k], &mul(a, b));
            }
        }
        GroupRingElem { group: g.clone(), coeffs: out }
    }

    /// Table-style rendering: the identity coefficient first, then equal
    /// coefficients grouped, e.g. `a + b(σ+σ²)`.
    pub fn render(&self, fmt: impl Fn(&T) -> String) -> String
    where
        T: PartialEq,
    {
        let g = &self.group;
        let mut used = alloc::vec![false; g.order()];
        let mut parts: Vec<String> = Vec::new();
        for i in 0..g.order() {
            if used[i] {
                continue;
            }
            let same: Vec<usize> = (i..g.order()).filter(|&j| !used[j] && (j != 0 || i == 0) && self.coeffs[j] == self.coeffs[i]).collect();
            let same: Vec<usize> = if i == 0 { alloc::vec![0] } else { same };
            for &j in &same {
                used[j] = true;
            }
            let c = fmt(&self.coeffs[i]);
            if i == 0 {
                parts.push(c);
            } else {
                let names: Vec<String> = same.iter().map(|&j| g.name(&g.element(j))).collect();
                parts.push(format!("{c}({})", names.join("+")));
            }
        }
        parts.join(" + ")
    }
}

impl GroupRingElem<BigRational> {
    pub fn zero(group: FiniteAbelianGroup) -> Self {
        let n = group.order();
        GroupRingElem { group, coeffs: alloc::vec![BigRational::zero(); n] }
    }

    pub fn one(group: FiniteAbelianGroup) -> Self {
        Self::constant(group, BigRational::zero(), BigRational::from_integer(1.into()))
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.convolve_with(other, BigRational::zero(), |a, b| a + b, |a, b| a * b)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        self.map(|a| a * c)
    }
}

/// Outcome of comparing coefficients at `g` and `g^-1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetryReport {
    pub symmetric: bool,
    /// Pairs `(g, g^-1)` whose coefficients differ.
    pub mismatches: Vec<(Vec<u64>, Vec<u64>)>,
    /// For p-adic coefficients: the least valuation of a difference (the
    /// working precision when all agree).
    pub agreement_digits: Option<u32>,
}

/// Checks `coefficient(g) = coefficient(g^-1)`; a no-op when `inversion` is
/// false (the example is not declared stable under inversion).
pub fn galois_symmetry_check<T: Clone + PartialEq>(phi: &GroupRingElem<T>, inversion: bool) -> SymmetryReport {
    let mut mismatches = Vec::new();
    if inversion {
        let g = phi.group();
        for i in 0..g.order() {
            let x = g.element(i);
            let y = g.neg(&x);
            if g.index_of(&y) > i && phi.coeff(&x) != phi.coeff(&y) {
                mismatches.push((x, y));
            }
        }
    }
    SymmetryReport { symmetric: mismatches.is_empty(), mismatches, agreement_digits: None }
}

/// [`galois_symmetry_check`] for p-adic coefficients, also reporting to how
/// many digits the coefficients agree.
pub fn padic_symmetry_check(ring: &ZpRing, phi: &GroupRingElem<Zp>, inversion: bool) -> SymmetryReport {
    let mut report = galois_symmetry_check(phi, inversion);
    let g = phi.group();
    let mut digits = ring.precision();
    if inversion {
        for i in 0..g.order() {
            let x = g.element(i);
            let d = ring.sub(*phi.coeff(&x), *phi.coeff(&g.neg(&x)));
            digits = digits.min(ring.valuation(d));
        }
    }
    report.agreement_digits = Some(digits);
    report
}

/// `"0.d0d1..._p"` for a residue modulo `p^N`.
pub fn format_padic(ring: &ZpRing, x: Zp) -> String {
    format_digits(&ring.digits(x), ring.p())
}

/// The standing hypotheses: `f != O`, `p` split and prime to `f`, and
/// `f ∩ Z = (f_int)` with `f_int | p - 1`.
pub fn check_hypotheses(field: &QuadField, f: &QuadIdeal, p: u64) -> Result<u64> {
    if f.is_unit() {
        return Err(Error::HypothesisViolation("the modulus is trivial".into()));
    }
    if !f.is_integral() {
        return Err(Error::HypothesisViolation("the modulus is not integral".into()));
    }
    if !crate::arith::is_prime_u64(p) || p == 2 {
        return Err(Error::HypothesisViolation(format!("{p} is not an odd prime")));
    }
    if field.primes_above(p).len() != 2 {
        return Err(Error::HypothesisViolation(format!("{p} does not split")));
    }
    if !f.is_coprime_to_int(&BigInt::from(p)) {
        return Err(Error::HypothesisViolation(format!("the modulus is not prime to {p}")));
    }
    let fint = f.min_rational().to_integer().to_u64().ok_or(Error::InvalidIndex)?;
    if (p - 1) % fint != 0 {
        return Err(Error::HypothesisViolation(format!("{fint} does not divide {}", p - 1)));
    }
    Ok(fint)
}

/// The data of one ray class: its label in `Cl_f`, the lifted pair and its
/// cone fan. Jobs are independent and may be evaluated in any order.
#[derive(Clone, Debug)]
pub struct PhiJob {
    pub class: ClassLabel,
    pub lifted: ClassLabel,
    pub pair: CharPair,
    pub fan: ConeFan,
}

/// Everything needed to evaluate the classes of `Cl_f` at `s = 1`.
#[derive(Clone, Debug)]
pub struct PhiSetup {
    pub field: QuadField,
    pub modulus: QuadIdeal,
    pub conductor: u64,
    pub p: u64,
    pub plan: PrecisionPlan,
    pub group: FiniteAbelianGroup,
    pub kernel_size: u64,
    pub jobs: Vec<PhiJob>,
}

/// Which p-adic embedding: the square root of `d` and the root of unity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct EmbeddingChoice {
    pub root_choice: u8,
    pub zeta_choice: usize,
}

impl PhiSetup {
    pub fn new(field: &QuadField, f: &QuadIdeal, p: u64, digits: u32) -> Result<Self> {
        let conductor = check_hypotheses(field, f, p)?;
        let narrow_free = RayClassGroup::new(field, f, false, p)?;
        let narrow = RayClassGroup::new(field, f, true, p)?;
        let lift = lift_and_kernel(&narrow, &narrow_free)?;
        let base = base_pair(field, f)?;
        let eps = field.ray_unit_generator(f);
        let mut jobs = Vec::new();
        for class in narrow_free.labels() {
            let lifted = lift.lift(&class).ok_or(Error::InvalidIndex)?.clone();
            let pair = act(field, &base, &lifted, &narrow, p)?;
            if !is_prime_to(&pair, p) {
                return Err(Error::HypothesisViolation("a class representative is not prime to p".into()));
            }
            let fan = continued_fraction_fan(field, &pair, &eps)?;
            jobs.push(PhiJob { class, lifted, pair, fan });
        }
        Ok(PhiSetup {
            field: field.clone(),
            modulus: f.clone(),
            conductor,
            p,
            plan: precision_plan(p, digits),
            group: FiniteAbelianGroup::new(narrow_free.cyclic_orders()),
            kernel_size: lift.kernel_size,
            jobs,
        })
    }

    /// All admissible embedding choices.
    pub fn embedding_choices(&self) -> Vec<EmbeddingChoice> {
        let zetas = crate::quadfield::PadicEmbedding::zeta_choice_count(self.p, self.conductor);
        (0..2u8).flat_map(|r| (0..zetas).map(move |z| EmbeddingChoice { root_choice: r, zeta_choice: z })).collect()
    }

    pub fn ring(&self) -> Result<ZpRing> {
        ZpRing::new(self.p, self.plan.working)
    }

    /// `|ker| Z(1; c~.w)` for one job.
    pub fn evaluate(&self, job: &PhiJob, choice: EmbeddingChoice) -> Result<Zp> {
        let ctx = PadicContext::from_plan(&self.field, &self.plan, self.conductor, choice.root_choice, choice.zeta_choice)?;
        let z = padic_big_z_at_1(&ctx, &job.pair, &job.fan)?;
        let ring = ctx.zp();
        Ok(ring.mul(ring.from_u64(self.kernel_size), z))
    }

    /// Places per-job values (in job order) at `sigma_c^-1`.
    pub fn assemble(&self, values: &[Zp]) -> Result<GroupRingElem<Zp>> {
        let ring = self.ring()?;
        let mut phi = GroupRingElem::constant(self.group.clone(), ring.zero(), ring.zero());
        for (job, v) in self.jobs.iter().zip(values) {
            let inv = self.group.neg(&job.class.0);
            phi.set(&inv, *v);
        }
        Ok(phi)
    }

    /// Sequential evaluation of every class.
    pub fn compute(&self, choice: EmbeddingChoice) -> Result<GroupRingElem<Zp>> {
        let values = self.jobs.iter().map(|j| self.evaluate(j, choice)).collect::<Result<Vec<_>>>()?;
        self.assemble(&values)
    }
}

/// `Phi_{f,T_p,p}(1)` modulo `p^N` for one embedding choice.
pub fn compute_phi(field: &QuadField, f: &QuadIdeal, p: u64, digits: u32, choice: EmbeddingChoice) -> Result<GroupRingElem<Zp>> {
    PhiSetup::new(field, f, p, digits)?.compute(choice)
}

/// Formats every coefficient of a p-adic group-ring element.
pub fn format_phi(ring: &ZpRing, phi: &GroupRingElem<Zp>) -> Vec<String> {
    phi.coefficients().iter().map(|&c| format_padic(ring, c)).collect()
}

/// Rendering in the style `0.23..._7 + 0.62..._7(σ+σ²)`.
pub fn render_phi(ring: &ZpRing, phi: &GroupRingElem<Zp>) -> String {
    phi.render(|&c| format_padic(ring, c))
}

//! Checking the complex side on published numerical data: solving
//! `A * R(gamma) = Phi` in the group ring, rational reconstruction, rational
//! characters and idempotents, and the exterior-square lattice of the
//! S-units in an isotypic basis.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith;
use crate::cyclo::{CycElem, CycField};
use crate::error::{Error, Result};
use crate::lattice::{self, IntMatrix, Lattice, RatMatrix};
use crate::phi::{FiniteAbelianGroup, GroupRingElem};

/// Rational group ring `Q[G]`.
pub type RationalGroupRing = GroupRingElem<BigRational>;

// ---------------------------------------------------------------------------
// Characters

/// The rational characters of a finite abelian group.
///
/// A complex character is stored as an exponent vector `c` with
/// `chi(g_j) = exp(2 pi i c_j / n_j)` on the generators `g_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharacterTable {
    group: FiniteAbelianGroup,
    exponent: u64,
    classes: Vec<RationalClass>,
}

/// A Galois orbit of complex characters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalClass {
    pub members: Vec<Vec<u64>>,
    pub order: u64,
}

impl RationalClass {
    pub fn representative(&self) -> &[u64] {
        &self.members[0]
    }

    /// `[Q(X) : Q] = phi(d)`.
    pub fn degree(&self) -> usize {
        arith::euler_phi(self.order) as usize
    }
}

impl CharacterTable {
    pub fn new(group: &FiniteAbelianGroup) -> Self {
        let exponent = group.orders().iter().fold(1, |a, &n| arith::lcm_u64(a, n));
        let units: Vec<u64> = (1..=exponent).filter(|&t| arith::gcd_u64(t, exponent) == 1).collect();
        let mut seen = alloc::vec![false; group.order()];
        let mut classes = Vec::new();
        for i in 0..group.order() {
            if seen[i] {
                continue;
            }
            let chi = group.element(i);
            let mut members: Vec<Vec<u64>> = Vec::new();
            for &t in &units {
                let c: Vec<u64> = chi.iter().zip(group.orders()).map(|(&x, &n)| (x * t) % n).collect();
                let j = group.index_of(&c);
                if !seen[j] {
                    seen[j] = true;
                    members.push(c);
                }
            }
            let order = chi.iter().zip(group.orders()).fold(1, |a, (&c, &n)| arith::lcm_u64(a, n / arith::gcd_u64(c, n)));
            classes.push(RationalClass { members, order });
        }
        CharacterTable { group: group.clone(), exponent, classes }
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn classes(&self) -> &[RationalClass] {
        &self.classes
    }

    /// `v` with `chi(h) = zeta_N^v`, `N` the exponent of the group.
    fn value_exponent(&self, chi: &[u64], h: &[u64]) -> u64 {
        let n = self.exponent;
        chi.iter().zip(h).zip(self.group.orders()).map(|((&c, &x), &m)| c * x % m * (n / m)).sum::<u64>() % n
    }

    /// `w` with `chi(h) = zeta_d^w` for a character of order `d`.
    fn local_exponent(&self, class: usize, chi: &[u64], h: &[u64]) -> u64 {
        let d = self.classes[class].order;
        self.value_exponent(chi, h) / (self.exponent / d)
    }

    /// The class containing exactly the given characters.
    pub fn class_of_members(&self, members: &[Vec<u64>]) -> Result<usize> {
        let mut want: Vec<Vec<u64>> = members.to_vec();
        want.sort();
        for (i, c) in self.classes.iter().enumerate() {
            let mut have = c.members.clone();
            have.sort();
            if have == want {
                return Ok(i);
            }
        }
        Err(Error::InconsistentGroups(format!("{members:?} is not a full Galois orbit of characters")))
    }

    /// The central idempotent `e_X = (1/g) sum_h (sum_{chi in X} chi(h^-1)) h`.
    pub fn idempotent(&self, class: usize) -> RationalGroupRing {
        let g = self.group.order() as i64;
        let c = &self.classes[class];
        let mut e = RationalGroupRing::zero(self.group.clone());
        for h in self.group.elements() {
            let w = self.local_exponent(class, c.representative(), &h);
            e.set(&h, arith::rat(arith::ramanujan_sum(c.order, w), g));
        }
        e
    }

    /// `sum_h a_h x^{k(h)}` in `Q(zeta_d)` where `chi(h) = chi(sigma)^{k(h)}`
    /// for the representative `chi`; `chi(sigma)` must be primitive.
    pub fn component(&self, class: usize, sigma: &[u64], a: &RationalGroupRing) -> Result<(CycField, CycElem)> {
        let c = &self.classes[class];
        let d = c.order;
        let s = self.local_exponent(class, c.representative(), sigma);
        let s_inv = if d == 1 {
            0
        } else {
            arith::mod_inverse(&BigInt::from(s), &BigInt::from(d))
                .ok_or_else(|| Error::InconsistentGroups(format!("chi(sigma) is not a primitive {d}-th root of unity")))?
                .try_into()
                .unwrap()
        };
        let field = CycField::new(d);
        let mut acc = field.zero();
        for (i, coef) in a.coefficients().iter().enumerate() {
            if coef.is_zero() {
                continue;
            }
            let h = self.group.element(i);
            let k = self.local_exponent(class, c.representative(), &h) * s_inv % d;
            acc = field.add(&acc, &field.scale(&field.zeta_pow(k as i64), coef));
        }
        Ok((field, acc))
    }

    /// `prod_{chi in X} chi(a)`: the norm of the `X`-component.
    pub fn component_norm(&self, class: usize, a: &RationalGroupRing) -> BigRational {
        let rep = self.classes[class].representative().to_vec();
        // any element on which chi is primitive; use chi itself through the identity map
        let (field, x) = self.component_by_character(class, &rep, a);
        field.norm(&x)
    }

    fn component_by_character(&self, class: usize, chi: &[u64], a: &RationalGroupRing) -> (CycField, CycElem) {
        let d = self.classes[class].order;
        let field = CycField::new(d);
        let mut acc = field.zero();
        for (i, coef) in a.coefficients().iter().enumerate() {
            if !coef.is_zero() {
                let h = self.group.element(i);
                let w = self.local_exponent(class, chi, &h);
                acc = field.add(&acc, &field.scale(&field.zeta_pow(w as i64), coef));
            }
        }
        (field, acc)
    }
}

/// `r(S, chi)` per rational class, in the order of the character table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankData {
    ranks: Vec<u32>,
}

impl RankData {
    pub fn new(table: &CharacterTable, ranks: Vec<u32>) -> Result<Self> {
        if ranks.len() != table.classes().len() {
            return Err(Error::InconsistentDimensions(format!("{} ranks for {} rational classes", ranks.len(), table.classes().len())));
        }
        if ranks.iter().any(|&r| r < 2) {
            return Err(Error::InconsistentDimensions("every rank must be at least 2".into()));
        }
        Ok(RankData { ranks })
    }

    pub fn ranks(&self) -> &[u32] {
        &self.ranks
    }

    /// `e_{S,r} = sum_{r_i = r} e_i`.
    pub fn idempotent_eq(&self, table: &CharacterTable, r: u32) -> RationalGroupRing {
        let mut e = RationalGroupRing::zero(table.group().clone());
        for (i, &ri) in self.ranks.iter().enumerate() {
            if ri == r {
                e = e.add(&table.idempotent(i));
            }
        }
        e
    }

    /// `e~_{S,>r} = g sum_{r_i > r} e_i`, an element of `Z[G]`.
    pub fn scaled_idempotent_above(&self, table: &CharacterTable, r: u32) -> RationalGroupRing {
        let g = BigRational::from_integer(BigInt::from(table.group().order()));
        let mut e = RationalGroupRing::zero(table.group().clone());
        for (i, &ri) in self.ranks.iter().enumerate() {
            if ri > r {
                e = e.add(&table.idempotent(i));
            }
        }
        e.scale(&g)
    }

    /// `dim_Q Q[G]^{[S,2]} = sum_{r_i = 2} phi(d_i)`.
    pub fn s2_dimension(&self, table: &CharacterTable) -> usize {
        self.ranks.iter().zip(table.classes()).filter(|(&r, _)| r == 2).map(|(_, c)| c.degree()).sum()
    }

    /// `|det(x -> a x)|` on `Q[G]^{[S,2]}`.
    pub fn s2_norm(&self, table: &CharacterTable, a: &RationalGroupRing) -> BigRational {
        let mut n = BigRational::one();
        for (i, &r) in self.ranks.iter().enumerate() {
            if r == 2 {
                n *= table.component_norm(i, a);
            }
        }
        n.abs()
    }
}

// ---------------------------------------------------------------------------
// Real inputs and the solve

/// Real group-ring data given as exact decimals with a precision tag.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecimalGroupRing {
    pub value: RationalGroupRing,
    /// Number of decimal places of the least precise coefficient.
    pub digits: usize,
}

impl DecimalGroupRing {
    pub fn parse(group: &FiniteAbelianGroup, coeffs: &[&str]) -> Result<Self> {
        if coeffs.len() != group.order() {
            return Err(Error::InconsistentDimensions(format!("{} coefficients for a group of order {}", coeffs.len(), group.order())));
        }
        let mut vals = Vec::new();
        for s in coeffs {
            vals.push(arith::parse_decimal(s).ok_or_else(|| Error::Parse(format!("bad decimal {s:?}")))?);
        }
        let digits = coeffs.iter().map(|s| arith::decimal_places(s)).min().unwrap_or(0);
        Ok(DecimalGroupRing { value: GroupRingElem::from_coefficients(group.clone(), vals)?, digits })
    }

    /// Every coefficient truncated (towards zero) to `places` decimals.
    pub fn truncated(&self, places: usize) -> Self {
        let scale = BigRational::from_integer(num_traits::pow(BigInt::from(10), places));
        let value = self.value.map(|x| {
            let t = (x * &scale).trunc();
            t / &scale
        });
        DecimalGroupRing { value, digits: places.min(self.digits) }
    }
}

/// A rational approximation found by continued fractions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reconstruction {
    pub value: BigRational,
    pub residual: BigRational,
    pub within_tolerance: bool,
}

/// The first continued-fraction convergent of `x` with denominator at most
/// `bound` that lies within `tolerance` of `x`; failing that, the last
/// convergent below the bound.
pub fn rational_reconstruct(x: &BigRational, bound: &BigInt, tolerance: &BigRational) -> Reconstruction {
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    let mut rest = x.clone();
    let mut best = BigRational::from_integer(x.floor().to_integer());
    loop {
        let a = rest.floor().to_integer();
        let h2 = &a * &h1 + &h0;
        let k2 = &a * &k1 + &k0;
        if &k2 > bound {
            break;
        }
        let c = BigRational::new(h2.clone(), k2.clone());
        best = c.clone();
        if (x - &c).abs() <= *tolerance {
            break;
        }
        (h0, h1) = (h1, h2);
        (k0, k1) = (k1, k2);
        let frac = &rest - BigRational::from_integer(a);
        if frac.is_zero() {
            break;
        }
        rest = frac.recip();
    }
    let residual = (x - &best).abs();
    let within_tolerance = residual <= *tolerance;
    Reconstruction { value: best, residual, within_tolerance }
}

/// Options for [`solve_a`].
#[derive(Clone, Debug)]
pub struct SolveOptions {
    /// Largest admissible denominator in the reconstruction.
    pub denominator_bound: BigInt,
    /// Decimal digits given up to rounding in the inputs and the solve.
    pub guard_digits: usize,
}

impl SolveOptions {
    /// The bound `2 b g^e`.
    pub fn conjectural(b: &BigInt, g: usize, e: u32) -> Self {
        SolveOptions { denominator_bound: BigInt::from(2) * b * BigInt::from(g as u64).pow(e), guard_digits: 5 }
    }
}

/// The solution of `A R = Phi` on the `[S,2]` component.
#[derive(Clone, Debug)]
pub struct Solution {
    /// `e_{S,2}` applied to the exact solution for the decimal inputs.
    pub approximation: RationalGroupRing,
    /// The reconstructed element.
    pub a: RationalGroupRing,
    /// `max |e_{S,2}(A R - Phi)|` over the coefficients.
    pub residual: BigRational,
    /// Largest reconstruction error over the coefficients.
    pub reconstruction_error: BigRational,
    pub tolerance: BigRational,
}

/// The multiplication matrix: row `i` holds the coefficients of `g_i * x`.
fn multiplication_rows(x: &RationalGroupRing) -> RatMatrix {
    let g = x.group();
    (0..g.order())
        .map(|i| {
            let gi = g.element(i);
            let mut row = alloc::vec![BigRational::zero(); g.order()];
            for (j, c) in x.coefficients().iter().enumerate() {
                row[g.index_of(&g.add(&gi, &g.element(j)))] = c.clone();
            }
            row
        })
        .collect()
}

/// `y` with `y * x = b` in `Q[G]`, if `x` is invertible.
pub fn group_ring_divide(b: &RationalGroupRing, x: &RationalGroupRing) -> Option<RationalGroupRing> {
    let rows = multiplication_rows(x);
    let y = lattice::solve_left(&rows, b.coefficients())?;
    GroupRingElem::from_coefficients(b.group().clone(), y).ok()
}

fn max_abs(x: &RationalGroupRing) -> BigRational {
    x.coefficients().iter().map(|c| c.abs()).max().unwrap_or_else(BigRational::zero)
}

/// Solves `A R = Phi` in `R[G]^{[S,2]}` exactly for the decimal inputs and
/// reconstructs the coefficients of `A` as small rationals.
pub fn solve_a(rgamma: &DecimalGroupRing, phi0: &DecimalGroupRing, e_s2: &RationalGroupRing, opts: &SolveOptions) -> Result<Solution> {
    let group = rgamma.value.group().clone();
    let one = RationalGroupRing::one(group.clone());
    // R' = e R + (1 - e) is invertible exactly when R is on the [S,2] part
    let r_mod = e_s2.mul(&rgamma.value).add(&one.sub(e_s2));
    let y = group_ring_divide(&phi0.value, &r_mod).ok_or(Error::SingularRegulator)?;
    let approximation = e_s2.mul(&y);
    let digits = rgamma.digits.min(phi0.digits);
    let places = digits.saturating_sub(opts.guard_digits);
    let tolerance = BigRational::new(BigInt::one(), num_traits::pow(BigInt::from(10), places));
    let mut coeffs = Vec::new();
    let mut worst = BigRational::zero();
    for (i, c) in approximation.coefficients().iter().enumerate() {
        let rec = rational_reconstruct(c, &opts.denominator_bound, &tolerance);
        if !rec.within_tolerance {
            return Err(Error::ReconstructionFailed(format!(
                "coefficient {i}: best approximation {} misses by {}",
                rec.value,
                decimal_magnitude(&rec.residual)
            )));
        }
        worst = worst.max(rec.residual.clone());
        coeffs.push(rec.value);
    }
    let a = GroupRingElem::from_coefficients(group, coeffs)?;
    let residual = max_abs(&e_s2.mul(&a.mul(&rgamma.value).sub(&phi0.value)));
    Ok(Solution { approximation, a, residual, reconstruction_error: worst, tolerance })
}

/// `floor(log10 |x|)` for reporting, `None` for zero.
pub fn decimal_magnitude(x: &BigRational) -> String {
    if x.is_zero() {
        return String::from("0");
    }
    let x = x.abs();
    let mut e: i64 = 0;
    let ten = BigRational::from_integer(BigInt::from(10));
    let mut y = x.clone();
    while y >= ten {
        y /= &ten;
        e += 1;
    }
    while y < BigRational::one() {
        y *= &ten;
        e -= 1;
    }
    format!("1e{e}")
}

/// Whether `10^-k` bounds `x`.
pub fn below_power_of_ten(x: &BigRational, k: u32) -> bool {
    x.abs() < BigRational::new(BigInt::one(), num_traits::pow(BigInt::from(10), k as usize))
}

/// Whether `d` divides `c g^e` for some `e`.
pub fn divides_times_power(d: &BigInt, c: &BigInt, g: u64) -> bool {
    let mut d = d.abs();
    for (q, _) in arith::factor_u64(g) {
        let q = BigInt::from(q);
        while (&d % &q).is_zero() {
            d /= &q;
        }
    }
    (c % &d).is_zero()
}

/// Whether every coefficient of `a` lies in `(1/c) Z[1/g]`.
pub fn denominators_divide(a: &RationalGroupRing, c: &BigInt, g: u64) -> bool {
    a.coefficients().iter().all(|x| divides_times_power(x.denom(), c, g))
}

// ---------------------------------------------------------------------------
// Exterior squares

/// One summand `Q(X_i)^{r_i}` of the S-unit module together with vectors
/// `v_{i,1}, ..., v_{i,r_i}` realizing it (coordinates over the Z-basis).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsotypicBlock {
    pub class: usize,
    /// Group element `sigma_i` on which the characters of the class are primitive.
    pub sigma: Vec<u64>,
    pub vectors: Vec<Vec<BigInt>>,
}

/// The S-units modulo torsion with the group action and an isotypic basis.
#[derive(Clone, Debug)]
pub struct UnitModule {
    table: CharacterTable,
    rank: usize,
    /// Per group generator: row `m`, column `l` holds the coefficient of
    /// `u_m` in `g(u_l)`.
    actions: Vec<IntMatrix>,
    blocks: Vec<IsotypicBlock>,
    fields: Vec<CycField>,
    /// Rows are the vectors `sigma_i^k v_{i,j}` in block, `j`, `k` order.
    basis: RatMatrix,
    /// `(block, j, j')` per wedge coordinate block, the `[S,2]` part first.
    layout: Vec<(usize, usize, usize)>,
    s2_blocks: usize,
}

fn to_rational_vec(v: &[BigInt]) -> Vec<BigRational> {
    v.iter().map(|x| BigRational::from_integer(x.clone())).collect()
}

fn mat_vec(m: &IntMatrix, x: &[BigRational]) -> Vec<BigRational> {
    m.iter().map(|row| row.iter().zip(x).fold(BigRational::zero(), |acc, (a, b)| acc + BigRational::from_integer(a.clone()) * b)).collect()
}

impl UnitModule {
    pub fn new(table: &CharacterTable, actions: Vec<IntMatrix>, blocks: Vec<IsotypicBlock>) -> Result<Self> {
        let group = table.group();
        if actions.len() != group.orders().len() {
            return Err(Error::InconsistentDimensions(format!("{} action matrices for {} generators", actions.len(), group.orders().len())));
        }
        let rank = actions.first().map_or(0, |m| m.len());
        if actions.iter().any(|m| m.len() != rank || m.iter().any(|r| r.len() != rank)) {
            return Err(Error::InconsistentDimensions("action matrices must be square of a common size".into()));
        }
        let mut module = UnitModule { table: table.clone(), rank, actions, blocks: Vec::new(), fields: Vec::new(), basis: Vec::new(), layout: Vec::new(), s2_blocks: 0 };
        // the action is a representation of G
        let unit_vectors: Vec<Vec<BigRational>> = (0..rank).map(|l| (0..rank).map(|m| if l == m { BigRational::one() } else { BigRational::zero() }).collect()).collect();
        for (j, &n) in group.orders().iter().enumerate() {
            let mut h = group.identity();
            h[j] = n % n;
            for x in &unit_vectors {
                let mut y = x.clone();
                for _ in 0..n {
                    y = mat_vec(&module.actions[j], &y);
                }
                if &y != x {
                    return Err(Error::InconsistentGroups(format!("generator {j} does not have order dividing {n} on the units")));
                }
                for k in 0..j {
                    let a = mat_vec(&module.actions[j], &mat_vec(&module.actions[k], x));
                    let b = mat_vec(&module.actions[k], &mat_vec(&module.actions[j], x));
                    if a != b {
                        return Err(Error::InconsistentGroups("generator actions do not commute".into()));
                    }
                }
            }
        }
        let mut used = alloc::vec![false; table.classes().len()];
        for b in &blocks {
            if b.class >= used.len() || used[b.class] {
                return Err(Error::InconsistentDimensions(format!("block for class {} repeated or out of range", b.class)));
            }
            used[b.class] = true;
            if b.vectors.iter().any(|v| v.len() != rank) {
                return Err(Error::InconsistentDimensions("isotypic vector of the wrong length".into()));
            }
        }
        for (i, b) in blocks.iter().enumerate() {
            let class = &table.classes()[b.class];
            let e = table.idempotent(b.class);
            for v in &b.vectors {
                let v = to_rational_vec(v);
                if module.act(&e, &v) != v {
                    return Err(Error::InconsistentGroups(format!("vector {v:?} is not in the isotypic part of class {}", b.class)));
                }
                let mut w = v.clone();
                for _ in 0..class.degree() {
                    module.basis.push(w.clone());
                    w = module.act_element(&b.sigma, &w);
                }
            }
            // primitive on sigma
            table.component(b.class, &b.sigma, &RationalGroupRing::one(group.clone()))?;
            module.fields.push(CycField::new(class.order));
            let _ = i;
        }
        if module.basis.len() != rank || lattice::rational_determinant(&module.basis).is_zero() {
            return Err(Error::InconsistentDimensions("the isotypic vectors do not form a basis".into()));
        }
        for (i, b) in blocks.iter().enumerate() {
            if b.vectors.len() == 2 {
                module.layout.push((i, 0, 1));
            }
        }
        module.s2_blocks = module.layout.len();
        for (i, b) in blocks.iter().enumerate() {
            if b.vectors.len() > 2 {
                for j in 0..b.vectors.len() {
                    for jj in j + 1..b.vectors.len() {
                        module.layout.push((i, j, jj));
                    }
                }
            }
        }
        module.blocks = blocks;
        Ok(module)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn table(&self) -> &CharacterTable {
        &self.table
    }

    pub fn blocks(&self) -> &[IsotypicBlock] {
        &self.blocks
    }

    /// `h x` for a group element `h`.
    pub fn act_element(&self, h: &[u64], x: &[BigRational]) -> Vec<BigRational> {
        let mut y = x.to_vec();
        for (j, &e) in h.iter().enumerate() {
            for _ in 0..e {
                y = mat_vec(&self.actions[j], &y);
            }
        }
        y
    }

    /// `a x` for `a` in `Q[G]`.
    pub fn act(&self, a: &RationalGroupRing, x: &[BigRational]) -> Vec<BigRational> {
        let g = self.table.group();
        let mut acc = alloc::vec![BigRational::zero(); x.len()];
        for (i, c) in a.coefficients().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let y = self.act_element(&g.element(i), x);
            for (s, t) in acc.iter_mut().zip(y) {
                *s += c * t;
            }
        }
        acc
    }

    /// Coordinates of `x` in each `Q(X_i)^{r_i}`.
    pub fn isotypic_coordinates(&self, x: &[BigRational]) -> Result<Vec<Vec<CycElem>>> {
        let c = lattice::solve_left(&self.basis, x).ok_or(Error::InconsistentDimensions("vector outside the unit space".into()))?;
        let mut out = Vec::new();
        let mut pos = 0;
        for (b, field) in self.blocks.iter().zip(&self.fields) {
            let deg = field.degree();
            let mut v = Vec::new();
            for _ in &b.vectors {
                v.push(field.element(&c[pos..pos + deg]));
                pos += deg;
            }
            out.push(v);
        }
        Ok(out)
    }

    /// Dimension of the wedge space and of its `[S,2]` part.
    pub fn wedge_dimensions(&self) -> (usize, usize) {
        let dim = |entries: &[(usize, usize, usize)]| entries.iter().map(|&(b, _, _)| self.fields[b].degree()).sum::<usize>();
        (dim(&self.layout), dim(&self.layout[..self.s2_blocks]))
    }

    /// `x ^ y` in the basis `{sigma_i^k v_{i,j} ^ v_{i,j'}}`, `[S,2]` part first.
    pub fn wedge(&self, x: &[BigRational], y: &[BigRational]) -> Result<Vec<BigRational>> {
        let cx = self.isotypic_coordinates(x)?;
        let cy = self.isotypic_coordinates(y)?;
        let mut out = Vec::new();
        for &(b, j, jj) in &self.layout {
            let f = &self.fields[b];
            let w = f.sub(&f.mul(&cx[b][j], &cy[b][jj]), &f.mul(&cx[b][jj], &cy[b][j]));
            push_padded(&mut out, &w, f.degree());
        }
        Ok(out)
    }

    /// `a w` for a wedge vector `w`.
    pub fn act_on_wedge(&self, a: &RationalGroupRing, w: &[BigRational]) -> Result<Vec<BigRational>> {
        let mut out = Vec::new();
        let mut pos = 0;
        for &(b, _, _) in &self.layout {
            let f = &self.fields[b];
            let deg = f.degree();
            let (_, m) = self.table.component(self.blocks[b].class, &self.blocks[b].sigma, a)?;
            let x = f.element(&w[pos..pos + deg]);
            push_padded(&mut out, &f.mul(&m, &x), deg);
            pos += deg;
        }
        Ok(out)
    }

    /// `gamma = sum_t a_t ^ b_t` for unit exponent vectors.
    pub fn wedge_terms(&self, terms: &[(Vec<BigInt>, Vec<BigInt>)]) -> Result<Vec<BigRational>> {
        let (dim, _) = self.wedge_dimensions();
        let mut acc = alloc::vec![BigRational::zero(); dim];
        for (a, b) in terms {
            if a.len() != self.rank || b.len() != self.rank {
                return Err(Error::InconsistentDimensions("wedge factor of the wrong length".into()));
            }
            let w = self.wedge(&to_rational_vec(a), &to_rational_vec(b))?;
            for (s, t) in acc.iter_mut().zip(w) {
                *s += t;
            }
        }
        Ok(acc)
    }

    /// The Z-span of all `u_l ^ u_m`.
    pub fn wedge_lattice(&self) -> Result<Lattice> {
        let (dim, _) = self.wedge_dimensions();
        let mut gens = Vec::new();
        for l in 0..self.rank {
            for m in l + 1..self.rank {
                let e = |k: usize| -> Vec<BigRational> { (0..self.rank).map(|i| if i == k { BigRational::one() } else { BigRational::zero() }).collect() };
                gens.push(self.wedge(&e(l), &e(m))?);
            }
        }
        Lattice::from_generators(dim, &gens)
    }

    /// `L ∩ (span of the [S,2] basis vectors)`, in `[S,2]` coordinates.
    pub fn project_s2_lattice(&self, full: &Lattice) -> Result<Lattice> {
        let (dim, s2) = self.wedge_dimensions();
        let map: RatMatrix = (0..dim).map(|i| (s2..dim).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect()).collect();
        let ker = if s2 == dim { full.clone() } else { full.kernel_of(&map)? };
        let gens: RatMatrix = ker.basis().iter().map(|v| v[..s2].to_vec()).collect();
        Lattice::from_generators(s2, &gens)
    }

    /// Restricts a wedge vector with vanishing non-`[S,2]` part.
    pub fn s2_part(&self, w: &[BigRational]) -> Result<Vec<BigRational>> {
        let (_, s2) = self.wedge_dimensions();
        if w[s2..].iter().any(|x| !x.is_zero()) {
            return Err(Error::InconsistentDimensions("element is not in the [S,2] part".into()));
        }
        Ok(w[..s2].to_vec())
    }

    /// The Z-span of `{h w : h in G}` in `[S,2]` coordinates.
    pub fn cyclic_span(&self, w: &[BigRational]) -> Result<Lattice> {
        let g = self.table.group();
        let (_, s2) = self.wedge_dimensions();
        let mut gens = Vec::new();
        for h in g.elements() {
            let mut e = RationalGroupRing::zero(g.clone());
            e.set(&h, BigRational::one());
            gens.push(self.s2_part(&self.act_on_wedge(&e, w)?)?);
        }
        Lattice::from_generators(s2, &gens)
    }
}

fn push_padded(out: &mut Vec<BigRational>, x: &CycElem, deg: usize) {
    let c = x.coefficients();
    for k in 0..deg {
        out.push(c.get(k).cloned().unwrap_or_else(BigRational::zero));
    }
}

/// Lattice invariants of `eta = A gamma`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeReport {
    /// `|Lambda^{[S,2]} : Z[G] gamma|`.
    pub index_gamma: BigRational,
    /// Least `d` with `d eta` in the lattice.
    pub d_f: BigInt,
    /// Least `d` with `d (g_j - 1) eta` in the lattice, per generator.
    pub d_sigma_minus_one: Vec<BigInt>,
    /// `|d_f^-1 Lambda^{[S,2]} : Z[G] eta|`.
    pub index_eta: BigRational,
    pub s2_rank: usize,
}

pub fn lattice_invariants(module: &UnitModule, gamma_terms: &[(Vec<BigInt>, Vec<BigInt>)], a: &RationalGroupRing) -> Result<LatticeReport> {
    let full = module.wedge_lattice()?;
    let lam = module.project_s2_lattice(&full)?;
    let gamma = module.wedge_terms(gamma_terms)?;
    let gamma_s2 = module.s2_part(&gamma)?;
    if !lam.contains(&gamma_s2) {
        return Err(Error::InconsistentDimensions("gamma is not in the lattice".into()));
    }
    let index_gamma = lam.index_of(&module.cyclic_span(&gamma)?)?;
    let eta = module.act_on_wedge(a, &gamma)?;
    let eta_s2 = module.s2_part(&eta)?;
    let d_f = lam.membership_denominator(&eta_s2).ok_or(Error::RankMismatch)?;
    let g = module.table().group();
    let mut d_sigma_minus_one = Vec::new();
    for j in 0..g.orders().len() {
        let mut s = RationalGroupRing::constant(g.clone(), BigRational::zero(), -BigRational::one());
        let mut h = g.identity();
        h[j] = 1 % g.orders()[j];
        let c = s.coeff(&h).clone() + BigRational::one();
        s.set(&h, c);
        let w = module.s2_part(&module.act_on_wedge(&s, &eta)?)?;
        d_sigma_minus_one.push(lam.membership_denominator(&w).ok_or(Error::RankMismatch)?);
    }
    let scaled = lam.scale(&BigRational::new(BigInt::one(), d_f.clone()));
    let index_eta = scaled.index_of(&module.cyclic_span(&eta)?)?;
    Ok(LatticeReport { index_gamma, d_f, d_sigma_minus_one, index_eta, s2_rank: lam.rank() })
}

/// `d` with `d^n b |N(A)| = index`, when it is an integer.
pub fn d_f_from_index(index: &BigInt, b: &BigInt, norm_a: &BigRational, n: u32) -> Option<BigInt> {
    let q = BigRational::from_integer(index.clone()) / (BigRational::from_integer(b.clone()) * norm_a);
    if !q.is_integer() || !q.is_positive() {
        return None;
    }
    let q = q.to_integer();
    let r = q.nth_root(n);
    (r.pow(n) == q).then_some(r)
}

// ---------------------------------------------------------------------------
// Assembled check

/// Where `d_f` came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DfSource {
    /// Membership in the exterior-square lattice built from unit data.
    Lattice(LatticeReport),
    /// Solved from a published index of `Z[G] eta`, `b` and `N(A)`.
    PublishedIndex { index: BigInt },
}

/// Everything known about one example on the complex side.
#[derive(Clone, Debug)]
pub struct ConjectureInputs {
    pub table: CharacterTable,
    pub ranks: RankData,
    pub rgamma: DecimalGroupRing,
    pub phi0: DecimalGroupRing,
    /// `|Lambda^{[S,2]} : Z[G] gamma|`.
    pub b: BigInt,
    /// Whether the modulus is a power of a single prime ideal.
    pub prime_power_modulus: bool,
    pub denominator_exponent: u32,
    pub units: Option<(UnitModule, Vec<(Vec<BigInt>, Vec<BigInt>)>)>,
    pub published_index: Option<BigInt>,
}

#[derive(Clone, Debug)]
pub struct ConjectureReport {
    pub solution: Solution,
    /// `A` in `(1/b) Z[1/g] G` (or `(1/2b)` for prime-power moduli).
    pub denominators_ok: bool,
    pub d_f: Option<BigInt>,
    pub d_f_source: Option<DfSource>,
    /// `d_f | g^e` (or `2 g^e`).
    pub d_f_ok: Option<bool>,
    /// `d_{f, g_j - 1}` divides a power of `g`, when known.
    pub augmentation_ok: Option<bool>,
    /// `|d_f^-1 Lambda : Z[G] eta|` predicted from `d_f`, `b` and `N(A)`.
    pub predicted_index: Option<BigRational>,
}

pub fn check_conjecture_parts(inputs: &ConjectureInputs) -> Result<ConjectureReport> {
    let table = &inputs.table;
    let g = table.group().order() as u64;
    let e_s2 = inputs.ranks.idempotent_eq(table, 2);
    let opts = SolveOptions::conjectural(&inputs.b, g as usize, inputs.denominator_exponent);
    let solution = solve_a(&inputs.rgamma, &inputs.phi0, &e_s2, &opts)?;
    let c = if inputs.prime_power_modulus { BigInt::from(2) * &inputs.b } else { inputs.b.clone() };
    let denominators_ok = denominators_divide(&solution.a, &c, g);
    let n = inputs.ranks.s2_dimension(table) as u32;
    let norm_a = inputs.ranks.s2_norm(table, &solution.a);
    let two_or_one = BigInt::from(if inputs.prime_power_modulus { 2 } else { 1 });
    let (d_f, source, augmentation_ok) = if let Some((module, terms)) = &inputs.units {
        let rep = lattice_invariants(module, terms, &solution.a)?;
        let aug = rep.d_sigma_minus_one.iter().all(|d| divides_times_power(d, &BigInt::one(), g));
        (Some(rep.d_f.clone()), Some(DfSource::Lattice(rep)), Some(aug))
    } else if let Some(index) = &inputs.published_index {
        let d = d_f_from_index(index, &inputs.b, &norm_a, n);
        (d, Some(DfSource::PublishedIndex { index: index.clone() }), None)
    } else {
        (None, None, None)
    };
    let d_f_ok = d_f.as_ref().map(|d| divides_times_power(d, &two_or_one, g));
    let predicted_index = d_f.as_ref().map(|d| BigRational::from_integer(d.pow(n) * &inputs.b) * &norm_a);
    Ok(ConjectureReport { solution, denominators_ok, d_f, d_f_source: source, d_f_ok, augmentation_ok, predicted_index })
}

//! Ray class groups of real quadratic fields.
//!
//! A class of `Cl_m(k)` is keyed by its wide ideal class `c` together with
//! the image of a generator of `J * conj(A_c) / N(A_c)` in
//! `R = ((O/f)^x x signs) / <-1, e0>`, where `A_c` is a fixed integral
//! representative of `c` prime to the modulus. This realizes the exact
//! sequence `1 -> R -> Cl_m -> Cl(k) -> 1` concretely; the abelian group
//! structure is then read off from a Smith normal form.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith;
use crate::error::{Error, Result};
use crate::lattice;
use crate::quadfield::{Embedding, QuadElem, QuadField, QuadIdeal};

/// Exponent vector of a class over the invariant factors of its group.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClassLabel(pub Vec<u64>);

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Residue of an element of `O` modulo `f`, plus real signs (0 when the
/// infinite places are not part of the modulus).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct Residue {
    x: BigInt,
    y: BigInt,
    s1: i8,
    s2: i8,
}

type WideKey = (BigInt, BigInt);

/// Arithmetic in `O/f` for an integral ideal `f`.
#[derive(Clone, Debug)]
struct Quotient {
    // f = Z(a, 0) + Z(b, c) in coordinates over {1, w}
    a: BigInt,
    b: BigInt,
    c: BigInt,
    with_infinite: bool,
}

impl Quotient {
    fn new(f: &QuadIdeal, with_infinite: bool) -> Self {
        let (m, _) = f.hnf();
        Quotient { a: m[0][0].clone(), b: m[0][1].clone(), c: m[1][1].clone(), with_infinite }
    }

    fn reduce(&self, field: &QuadField, x: &QuadElem) -> Residue {
        let xa = x.a.to_integer();
        let xb = x.b.to_integer();
        let y = xb.mod_floor(&self.c);
        let q = (&xb - &y) / &self.c;
        let xr = (xa - q * &self.b).mod_floor(&self.a);
        let (s1, s2) = if self.with_infinite {
            (field.sign(x, Embedding::First) as i8, field.sign(x, Embedding::Second) as i8)
        } else {
            (0, 0)
        };
        Residue { x: xr, y, s1, s2 }
    }

    fn elem(&self, r: &Residue) -> QuadElem {
        QuadElem::new(BigRational::from_integer(r.x.clone()), BigRational::from_integer(r.y.clone()))
    }

    fn mul(&self, field: &QuadField, u: &Residue, v: &Residue) -> Residue {
        let mut r = self.reduce(field, &field.mul(&self.elem(u), &self.elem(v)));
        r.s1 = u.s1 * v.s1;
        r.s2 = u.s2 * v.s2;
        r
    }
}

/// The ray class group `Cl_f(k)` or `Cl_{f+}(k)`.
#[derive(Clone, Debug)]
pub struct RayClassGroup {
    field: QuadField,
    modulus: QuadIdeal,
    f_int: BigInt,
    with_infinite: bool,
    aux: BigInt,
    quotient: Quotient,
    /// Subgroup of `R`-residues coming from global units.
    unit_image: Vec<Residue>,
    wide_reps: BTreeMap<WideKey, QuadIdeal>,
    /// Canonical keys of all classes, indexed by element number.
    elements: Vec<(WideKey, Residue)>,
    element_index: BTreeMap<(WideKey, Residue), usize>,
    /// Invariant factors greater than 1.
    orders: Vec<u64>,
    labels: Vec<ClassLabel>,
    label_index: BTreeMap<ClassLabel, usize>,
    generators: Vec<QuadIdeal>,
}

impl RayClassGroup {
    /// Builds `Cl_f(k)` (or `Cl_{f+}(k)` when `with_infinite`). All
    /// representatives produced later are prime to `f_int * aux`.
    pub fn new(field: &QuadField, f: &QuadIdeal, with_infinite: bool, aux: u64) -> Result<Self> {
        if !f.is_integral() {
            return Err(Error::NotIntegral);
        }
        let f_int = f.min_rational().to_integer();
        let aux = BigInt::from(aux.max(1));
        let quotient = Quotient::new(f, with_infinite);
        let mut g = RayClassGroup {
            field: field.clone(),
            modulus: f.clone(),
            f_int,
            with_infinite,
            aux,
            quotient,
            unit_image: Vec::new(),
            wide_reps: BTreeMap::new(),
            elements: Vec::new(),
            element_index: BTreeMap::new(),
            orders: Vec::new(),
            labels: Vec::new(),
            label_index: BTreeMap::new(),
            generators: Vec::new(),
        };
        g.build_unit_image();
        g.build_wide_classes()?;
        g.build_elements();
        g.build_structure();
        Ok(g)
    }

    pub fn field(&self) -> &QuadField {
        &self.field
    }

    pub fn modulus(&self) -> &QuadIdeal {
        &self.modulus
    }

    pub fn with_infinite(&self) -> bool {
        self.with_infinite
    }

    /// Invariant factors (all `> 1`), each dividing the next.
    pub fn cyclic_orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn order(&self) -> u64 {
        self.elements.len() as u64
    }

    /// Integral ideal representatives of the invariant-factor generators.
    pub fn generators(&self) -> &[QuadIdeal] {
        &self.generators
    }

    /// Order of the wide class group `Cl(k)`.
    pub fn wide_class_number(&self) -> usize {
        self.wide_reps.len()
    }

    fn is_unit_mod_f(&self, x: &QuadElem) -> bool {
        if self.modulus.is_unit() {
            return true;
        }
        let Ok(i) = self.field.principal_ideal(x) else { return false };
        self.field.ideals_coprime(&i, &self.modulus)
    }

    fn build_unit_image(&mut self) {
        let field = &self.field;
        let gens = [QuadElem::from_ints(-1, 0), field.fundamental_unit().clone()];
        let mut set: BTreeSet<Residue> = BTreeSet::new();
        set.insert(self.quotient.reduce(field, &QuadElem::one()));
        let gen_res: Vec<Residue> = gens.iter().map(|u| self.quotient.reduce(field, u)).collect();
        loop {
            let mut grown = false;
            let snapshot: Vec<Residue> = set.iter().cloned().collect();
            for r in &snapshot {
                for g in &gen_res {
                    if set.insert(self.quotient.mul(field, r, g)) {
                        grown = true;
                    }
                }
            }
            if !grown {
                break;
            }
        }
        self.unit_image = set.into_iter().collect();
    }

    /// Canonical representative of the coset `r * (unit image)`.
    fn coset_key(&self, r: &Residue) -> Residue {
        self.unit_image.iter().map(|u| self.quotient.mul(&self.field, r, u)).min().expect("unit image nonempty")
    }

    fn bad_norm(&self) -> BigInt {
        &self.f_int * &self.aux
    }

    fn build_wide_classes(&mut self) -> Result<()> {
        let field = &self.field;
        // classes are generated by primes of norm at most sqrt(D)/2
        let bound = arith::isqrt(field.disc_big()).to_u64().unwrap() / 2 + 1;
        let small = field.prime_ideals_up_to(bound.max(2));
        let mut classes: BTreeMap<WideKey, QuadIdeal> = BTreeMap::new();
        let o = field.unit_ideal();
        classes.insert(field.class_key(&o), o);
        loop {
            let mut grown = false;
            let snapshot: Vec<QuadIdeal> = classes.values().cloned().collect();
            for c in &snapshot {
                for p in &small {
                    let k = field.class_key(&field.ideal_mul(c, p));
                    if let alloc::collections::btree_map::Entry::Vacant(e) = classes.entry(k.clone()) {
                        e.insert(field.ideal_of_class_key(&k));
                        grown = true;
                    }
                }
            }
            if !grown {
                break;
            }
        }
        // representatives prime to the modulus and the auxiliary integer
        let principal = field.class_key(&field.unit_ideal());
        let mut reps: BTreeMap<WideKey, QuadIdeal> = BTreeMap::new();
        reps.insert(principal, field.unit_ideal());
        let bad = self.bad_norm();
        let mut lo = 0u64;
        let mut hi = 64u64;
        while reps.len() < classes.len() {
            if lo > 1_000_000 {
                return Err(Error::ScanBoundExceeded(1_000_000));
            }
            for p in field.prime_ideals_up_to(hi) {
                let n = p.norm().to_integer();
                if n <= BigInt::from(lo) || !n.gcd(&bad).is_one() {
                    continue;
                }
                reps.entry(field.class_key(&p)).or_insert(p);
            }
            lo = hi;
            hi *= 4;
        }
        self.wide_reps = reps;
        Ok(())
    }

    /// Canonical key of the class of an ideal prime to `f`.
    fn key(&self, j: &QuadIdeal) -> Result<(WideKey, Residue)> {
        let field = &self.field;
        let c = field.class_key(j);
        let a = self.wide_reps.get(&c).ok_or_else(|| Error::InconsistentGroups(alloc::string::String::from("unknown wide class")))?;
        let prod = field.ideal_mul(j, &field.ideal_conj(a));
        let beta = field.principal_generator(&prod).expect("same wide class");
        let n = a.norm().to_integer();
        let n_inv = arith::mod_inverse(&n, &self.f_int).unwrap_or_else(BigInt::zero);
        let n_inv = if self.f_int.is_one() { BigInt::one() } else { n_inv };
        // beta is integral when j is; rescale through a common denominator otherwise
        let den = beta.denominator();
        let beta_int = beta.scale(&BigRational::from_integer(den.clone()));
        let den_inv = arith::mod_inverse(&den, &self.f_int).ok_or(Error::NotCoprime)?;
        let den_inv = if self.f_int.is_one() { BigInt::one() } else { den_inv };
        let scale = BigRational::from_integer(n_inv * den_inv);
        let mut r = self.quotient.reduce(field, &beta_int.scale(&scale));
        if self.with_infinite {
            r.s1 = field.sign(&beta, Embedding::First) as i8;
            r.s2 = field.sign(&beta, Embedding::Second) as i8;
        }
        Ok((c, self.coset_key(&r)))
    }

    /// A totally positive/negative etc. lift of a residue to `O`.
    fn lift_residue(&self, r: &Residue) -> QuadElem {
        let field = &self.field;
        let mut base = self.quotient.elem(r);
        if base.is_zero() {
            // only when f = O
            base = QuadElem::one();
        }
        if !self.with_infinite {
            return base;
        }
        let fq = BigRational::from_integer(self.f_int.clone());
        let sqrt_f = field.sqrt_d().scale(&fq);
        let want = (r.s1 as i32, r.s2 as i32);
        let mut t = 1i64;
        loop {
            let shift_r = QuadElem::rational(&fq * arith::int(t));
            let shift_s = sqrt_f.scale(&arith::int(t));
            for cand in [base.add(&shift_r), base.sub(&shift_r), base.add(&shift_s), base.sub(&shift_s)] {
                if (field.sign(&cand, Embedding::First), field.sign(&cand, Embedding::Second)) == want {
                    return cand;
                }
            }
            t *= 2;
        }
    }

    fn build_elements(&mut self) {
        let field = self.field.clone();
        let q = self.quotient.clone();
        let mut cosets: BTreeSet<Residue> = BTreeSet::new();
        let signs: &[(i8, i8)] = if self.with_infinite { &[(1, 1), (1, -1), (-1, 1), (-1, -1)] } else { &[(0, 0)] };
        let mut x = BigInt::zero();
        while x < q.a {
            let mut y = BigInt::zero();
            while y < q.c {
                let e = QuadElem::new(BigRational::from_integer(x.clone()), BigRational::from_integer(y.clone()));
                if self.is_unit_mod_f(&e) {
                    for &(s1, s2) in signs {
                        let mut r = q.reduce(&field, &e);
                        r.s1 = s1;
                        r.s2 = s2;
                        cosets.insert(self.coset_key(&r));
                    }
                }
                y += 1;
            }
            x += 1;
        }
        let mut elements = Vec::new();
        for c in self.wide_reps.keys() {
            for r in &cosets {
                elements.push((c.clone(), r.clone()));
            }
        }
        // identity first
        let ident = self.key(&field.unit_ideal()).unwrap();
        let pos = elements.iter().position(|e| *e == ident).unwrap();
        elements.swap(0, pos);
        self.element_index = elements.iter().enumerate().map(|(i, e)| (e.clone(), i)).collect();
        self.elements = elements;
    }

    fn element_ideal(&self, idx: usize) -> QuadIdeal {
        let (c, r) = &self.elements[idx];
        let a = &self.wide_reps[c];
        let beta = self.lift_residue(r);
        self.field.ideal_scale(a, &beta)
    }

    fn element_of(&self, j: &QuadIdeal) -> Result<usize> {
        let k = self.key(j)?;
        self.element_index.get(&k).copied().ok_or_else(|| Error::InconsistentGroups(alloc::string::String::from("class key not enumerated")))
    }

    fn build_structure(&mut self) {
        let n = self.elements.len();
        let reps: Vec<QuadIdeal> = (0..n).map(|i| self.element_ideal(i)).collect();
        let mul = |i: usize, j: usize| -> usize { self.element_of(&self.field.ideal_mul(&reps[i], &reps[j])).expect("closed under products") };
        // greedy generators with exponent vectors
        let mut vecs: Vec<Option<Vec<i64>>> = alloc::vec![None; n];
        vecs[0] = Some(Vec::new());
        let mut members = alloc::vec![0usize];
        let mut gens: Vec<usize> = Vec::new();
        let mut relations: Vec<Vec<i64>> = Vec::new();
        for cand in 0..n {
            if vecs[cand].is_some() {
                continue;
            }
            let k = gens.len();
            gens.push(cand);
            for v in vecs.iter_mut().flatten() {
                v.push(0);
            }
            let old: Vec<usize> = members.clone();
            let mut power = cand;
            let mut m = 1i64;
            loop {
                if let Some(v0) = vecs[power].clone() {
                    // g^m lies in the old subgroup
                    let mut rel = v0;
                    for x in rel.iter_mut() {
                        *x = -*x;
                    }
                    rel[k] += m;
                    relations.push(rel);
                    break;
                }
                for &h in &old {
                    let e = mul(h, power);
                    let mut v = vecs[h].clone().unwrap();
                    v[k] += m;
                    vecs[e] = Some(v);
                    members.push(e);
                }
                power = mul(power, cand);
                m += 1;
            }
        }
        let k = gens.len();
        for r in relations.iter_mut() {
            r.resize(k, 0);
        }
        let rel_big: lattice::IntMatrix = relations.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        let (diag, v) = if k == 0 { (Vec::new(), Vec::new()) } else { lattice::smith(&rel_big) };
        let keep: Vec<usize> = (0..diag.len()).filter(|&i| !diag[i].is_one()).collect();
        self.orders = keep.iter().map(|&i| diag[i].to_u64().unwrap()).collect();
        self.labels = vecs
            .iter()
            .map(|vec| {
                let vec = vec.as_ref().expect("every element reached");
                ClassLabel(
                    keep.iter()
                        .map(|&j| {
                            let s = (0..k).fold(BigInt::zero(), |acc, i| acc + BigInt::from(vec[i]) * &v[i][j]);
                            s.mod_floor(&diag[j]).to_u64().unwrap()
                        })
                        .collect(),
                )
            })
            .collect();
        self.label_index = self.labels.iter().enumerate().map(|(i, l)| (l.clone(), i)).collect();
        debug_assert_eq!(self.label_index.len(), n);
        // integral generators prime to f * aux
        let mut gens_out = Vec::new();
        for j in 0..self.orders.len() {
            let mut e = alloc::vec![0u64; self.orders.len()];
            e[j] = 1;
            gens_out.push(self.representative(&ClassLabel(e), 1).expect("Chebotarev"));
        }
        self.generators = gens_out;
    }

    /// Label of the class of an ideal prime to `f`.
    pub fn class_of(&self, j: &QuadIdeal) -> Result<ClassLabel> {
        let field = &self.field;
        // work with an integral multiple: scaling by a rational prime to f
        // changes the class by a principal ideal, so measure it exactly
        let den = j.scale().denom().clone();
        let num = j.scale().numer().clone();
        if !den.gcd(&self.f_int).is_one() || !num.gcd(&self.f_int).is_one() {
            return Err(Error::NotCoprime);
        }
        let prim = j.scale_by(&j.scale().recip());
        if !field.ideals_coprime(&prim, &self.modulus) {
            return Err(Error::NotCoprime);
        }
        let idx = self.element_of(j)?;
        Ok(self.labels[idx].clone())
    }

    pub fn identity(&self) -> ClassLabel {
        ClassLabel(alloc::vec![0; self.orders.len()])
    }

    pub fn add(&self, x: &ClassLabel, y: &ClassLabel) -> ClassLabel {
        ClassLabel(x.0.iter().zip(&y.0).zip(&self.orders).map(|((a, b), m)| (a + b) % m).collect())
    }

    pub fn neg(&self, x: &ClassLabel) -> ClassLabel {
        ClassLabel(x.0.iter().zip(&self.orders).map(|(a, m)| (m - a % m) % m).collect())
    }

    pub fn scale_label(&self, x: &ClassLabel, k: u64) -> ClassLabel {
        ClassLabel(x.0.iter().zip(&self.orders).map(|(a, m)| (a * (k % m)) % m).collect())
    }

    /// All labels in lexicographic exponent order.
    pub fn labels(&self) -> Vec<ClassLabel> {
        let mut out = alloc::vec![self.identity()];
        for (j, &m) in self.orders.iter().enumerate().rev() {
            let mut next = Vec::with_capacity(out.len() * m as usize);
            for e in 0..m {
                for l in &out {
                    let mut l = l.clone();
                    l.0[j] = e;
                    next.push(l);
                }
            }
            out = next;
        }
        out.sort();
        out
    }

    /// Order of a class.
    pub fn label_order(&self, x: &ClassLabel) -> u64 {
        x.0.iter().zip(&self.orders).fold(1u64, |acc, (&a, &m)| {
            let o = m / a.gcd(&m).max(1);
            let o = if a == 0 { 1 } else { o };
            acc.lcm(&o)
        })
    }

    /// Least-norm prime ideal in the class, prime to `f * aux * coprime_to`
    /// (ties broken by HNF); the unit ideal for the identity.
    pub fn representative(&self, label: &ClassLabel, coprime_to: u64) -> Result<QuadIdeal> {
        if !self.label_index.contains_key(label) {
            return Err(Error::InvalidIndex);
        }
        if *label == self.identity() {
            return Ok(self.field.unit_ideal());
        }
        let bad = self.bad_norm() * BigInt::from(coprime_to.max(1));
        let mut lo = 0u64;
        let mut hi = 64u64;
        while lo <= 1_000_000 {
            for p in self.field.prime_ideals_up_to(hi) {
                let n = p.norm().to_integer();
                if n <= BigInt::from(lo) || !n.gcd(&bad).is_one() {
                    continue;
                }
                if self.class_of(&p)? == *label {
                    return Ok(p);
                }
            }
            lo = hi;
            hi *= 4;
        }
        Err(Error::ScanBoundExceeded(1_000_000))
    }

    /// Checks injected group data against the computed group: the same
    /// invariant factors, generators of the declared orders that generate.
    pub fn validate_injection(&self, orders: &[u64], generators: &[QuadIdeal]) -> Result<()> {
        let mut want: Vec<u64> = orders.iter().copied().filter(|&m| m > 1).collect();
        want.sort_unstable();
        let prod: u64 = want.iter().product();
        if prod != self.order() {
            return Err(Error::InconsistentGroups(alloc::format!("injected order {prod}, computed {}", self.order())));
        }
        if generators.len() != orders.len() {
            return Err(Error::InconsistentGroups(alloc::string::String::from("one generator per cyclic factor")));
        }
        let labels: Vec<ClassLabel> = generators.iter().map(|g| self.class_of(g)).collect::<Result<_>>()?;
        for (l, &m) in labels.iter().zip(orders) {
            if self.label_order(l) != m {
                return Err(Error::InconsistentGroups(alloc::format!("generator {l} does not have order {m}")));
            }
        }
        // the subgroup generated has full order
        let mut span: BTreeSet<ClassLabel> = BTreeSet::new();
        span.insert(self.identity());
        for l in &labels {
            let snapshot: Vec<ClassLabel> = span.iter().cloned().collect();
            let mut cur = l.clone();
            while cur != self.identity() {
                for s in &snapshot {
                    span.insert(self.add(s, &cur));
                }
                cur = self.add(&cur, l);
            }
        }
        if span.len() as u64 != self.order() {
            return Err(Error::InconsistentGroups(alloc::string::String::from("injected generators do not generate")));
        }
        let mut have = self.orders.clone();
        have.sort_unstable();
        // same abstract group: compare elementary divisors
        if elementary_divisors(&want) != elementary_divisors(&have) {
            return Err(Error::InconsistentGroups(alloc::format!("injected {want:?}, computed {have:?}")));
        }
        Ok(())
    }
}

fn elementary_divisors(orders: &[u64]) -> Vec<(u64, u32)> {
    let mut out: Vec<(u64, u32)> = orders.iter().flat_map(|&m| arith::factor_u64(m)).collect();
    out.sort_unstable();
    out
}

/// Section of the projection `Cl_{f+} -> Cl_f` and the size of its kernel.
#[derive(Clone, Debug)]
pub struct Lift {
    map: BTreeMap<ClassLabel, ClassLabel>,
    pub kernel_size: u64,
}

impl Lift {
    pub fn lift(&self, x: &ClassLabel) -> Option<&ClassLabel> {
        self.map.get(x)
    }
}

/// Computes a section of `pi: Cl_{f+} -> Cl_f` by taking, for each class
/// of `Cl_f`, the `Cl_{f+}` class of its representative.
pub fn lift_and_kernel(fplus: &RayClassGroup, f: &RayClassGroup) -> Result<Lift> {
    if fplus.modulus != f.modulus || !fplus.with_infinite || f.with_infinite {
        return Err(Error::InconsistentGroups(alloc::string::String::from("expected Cl_{f+} and Cl_f for the same f")));
    }
    if fplus.order() % f.order() != 0 {
        return Err(Error::InconsistentGroups(alloc::format!("{} does not divide {}", f.order(), fplus.order())));
    }
    let mut map = BTreeMap::new();
    for l in f.labels() {
        let rep = f.representative(&l, 1)?;
        map.insert(l, fplus.class_of(&rep)?);
    }
    Ok(Lift { map, kernel_size: fplus.order() / f.order() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ideal(k: &QuadField, a: i64, b: i64, c: i64) -> QuadIdeal {
        k.ideal_from_hnf([[a, b], [0, c]], &arith::int(1)).unwrap()
    }

    #[test]
    fn trivial_modulus_in_class_number_one() {
        let k = QuadField::new(5).unwrap();
        let g = RayClassGroup::new(&k, &k.unit_ideal(), false, 1).unwrap();
        assert_eq!(g.order(), 1);
        let g = RayClassGroup::new(&k, &k.unit_ideal(), true, 1).unwrap();
        // N(e0) = -1: narrow equals wide
        assert_eq!(g.order(), 1);
        let k = QuadField::new(12).unwrap();
        let g = RayClassGroup::new(&k, &k.unit_ideal(), true, 1).unwrap();
        assert_eq!(g.order(), 2);
    }

    #[test]
    fn sqrt37_mod_two() {
        let k = QuadField::new(37).unwrap();
        let two = ideal(&k, 2, 0, 2);
        let g = RayClassGroup::new(&k, &two, false, 7).unwrap();
        assert_eq!(g.cyclic_orders(), &[3]);
        let gp = RayClassGroup::new(&k, &two, true, 7).unwrap();
        let lift = lift_and_kernel(&gp, &g).unwrap();
        assert_eq!(lift.kernel_size * 3, gp.order());
        assert!([1, 2, 4].contains(&lift.kernel_size));
        // small primes hit all three classes
        let mut seen = BTreeSet::new();
        for p in k.prime_ideals_up_to(50) {
            if p.norm().to_integer().is_odd() {
                seen.insert(g.class_of(&p).unwrap());
            }
        }
        assert_eq!(seen.len(), 3);
        for l in g.labels() {
            let r = g.representative(&l, 7).unwrap();
            assert_eq!(g.class_of(&r).unwrap(), l);
            let n = r.norm().to_integer();
            assert!(n.is_odd() && !n.is_multiple_of(&BigInt::from(7)));
        }
    }

    #[test]
    fn class_of_is_a_homomorphism() {
        let k = QuadField::new(37).unwrap();
        let g = RayClassGroup::new(&k, &ideal(&k, 2, 0, 2), true, 1).unwrap();
        let ps: Vec<QuadIdeal> = k.prime_ideals_up_to(40).into_iter().filter(|p| p.norm().to_integer().is_odd()).collect();
        for a in &ps {
            for b in &ps {
                let lhs = g.class_of(&k.ideal_mul(a, b)).unwrap();
                let rhs = g.add(&g.class_of(a).unwrap(), &g.class_of(b).unwrap());
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn principal_ideals_congruent_to_one() {
        let k = QuadField::new(37).unwrap();
        let f = ideal(&k, 2, 0, 2);
        let g = RayClassGroup::new(&k, &f, true, 1).unwrap();
        // alpha = 3 + 2w is = 1 mod 2 and totally positive
        let alpha = QuadElem::from_ints(3, 2);
        assert!(k.is_totally_positive(&alpha));
        let i = k.principal_ideal(&alpha).unwrap();
        assert_eq!(g.class_of(&i).unwrap(), g.identity());
        let p = k.primes_above(3).remove(0);
        assert_eq!(g.class_of(&k.ideal_mul(&p, &i)).unwrap(), g.class_of(&p).unwrap());
    }

    #[test]
    fn rejects_ideals_meeting_the_modulus() {
        let k = QuadField::new(37).unwrap();
        let g = RayClassGroup::new(&k, &ideal(&k, 2, 0, 2), false, 1).unwrap();
        assert_eq!(g.class_of(&ideal(&k, 2, 0, 2)), Err(Error::NotCoprime));
    }

    #[test]
    fn injection_is_validated() {
        let k = QuadField::new(37).unwrap();
        let g = RayClassGroup::new(&k, &ideal(&k, 2, 0, 2), false, 1).unwrap();
        let gens = g.generators().to_vec();
        assert!(g.validate_injection(&[3], &gens).is_ok());
        assert!(g.validate_injection(&[2], &gens).is_err());
    }
}

//! Cone geometry in the totally positive quadrant: half-open
//! parallelograms, their lattice points, and the continued-fraction fan
//! subdividing a fundamental cone for the units.
//!
//! `P(t1, t2) = {l t1 + m t2 : 0 < l <= 1, 0 <= m < 1}` and `C(t1, t2)`
//! is the cone `{l t1 + m t2 : l > 0, m >= 0}`.

use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::charpairs::CharPair;
use crate::error::{Error, Result};
use crate::lattice;
use crate::quadfield::{Embedding, QuadElem, QuadField, QuadIdeal};

/// `det(iota(x); iota(y)) = iota1(x) iota2(y) - iota2(x) iota1(y)`, which
/// equals `x y' - x' y`, a rational multiple of `sqrt(d)`. Returns its sign.
pub fn det_sign(field: &QuadField, x: &QuadElem, y: &QuadElem) -> i32 {
    let v = field.mul(x, &field.conj(y)).sub(&field.mul(&field.conj(x), y));
    // v = q sqrt(d) with q = surd part
    let (_, q) = field.surd_parts(&v);
    crate::arith::sign_of(&q)
}

/// Coordinates `(l, m)` with `z = l t1 + m t2`.
pub fn cone_coordinates(t1: &QuadElem, t2: &QuadElem, z: &QuadElem) -> Result<(BigRational, BigRational)> {
    // solve in the (1, w) coordinates
    let det = &t1.a * &t2.b - &t1.b * &t2.a;
    if det.is_zero() {
        return Err(Error::DependentGenerators);
    }
    let l = (&z.a * &t2.b - &z.b * &t2.a) / &det;
    let m = (&t1.a * &z.b - &t1.b * &z.a) / &det;
    Ok((l, m))
}

/// A basis pair `(x, y)` of `I` with both totally positive,
/// `iota1(x) > iota1(y)` and `det(iota(x); iota(y)) > 0`.
///
/// For any primitive totally positive `x`, the complements `y` with
/// `Zx + Zy = I` form `+-y0 + Zx`; the sign is fixed by the determinant,
/// and exactly one translate has `0 < iota1(y) < iota1(x)`, which is then
/// totally positive as well.
pub fn initial_basis_pair(field: &QuadField, ideal: &QuadIdeal) -> (QuadElem, QuadElem) {
    let [alpha, beta] = ideal.basis();
    let comb = |u: i64, v: i64| alpha.scale_int(u).add(&beta.scale_int(v));
    let mut bound = 1i64;
    loop {
        for r in 1..=bound {
            for (u, v) in ring_points(r) {
                if u.gcd(&v) != 1 {
                    continue;
                }
                let x = comb(u, v);
                if !field.is_totally_positive(&x) {
                    continue;
                }
                // u s - v t = 1
                let e = u.extended_gcd(&v);
                let (s, t) = (e.x * e.gcd, -e.y * e.gcd);
                let mut y0 = comb(t, s);
                if det_sign(field, &x, &y0) < 0 {
                    y0 = y0.neg();
                }
                let ratio = field.div(&y0, &x);
                let k = -field.floor_real(&ratio, Embedding::First);
                let y = y0.add(&x.scale(&BigRational::from_integer(k)));
                debug_assert!(field.is_totally_positive(&y));
                return (x, y);
            }
        }
        bound *= 2;
    }
}

/// Integer points with `max(|u|, |v|) = r`, in a fixed order.
fn ring_points(r: i64) -> Vec<(i64, i64)> {
    let mut pts = Vec::new();
    for u in -r..=r {
        for v in -r..=r {
            if u.abs().max(v.abs()) == r {
                pts.push((u, v));
            }
        }
    }
    pts
}

/// All points of `I ∩ P(t1, t2)`, ordered by their cone coordinates.
pub fn enumerate_parallelogram(field: &QuadField, ideal: &QuadIdeal, t1: &QuadElem, t2: &QuadElem) -> Result<Vec<QuadElem>> {
    let _ = field;
    let (c1, c2) = (ideal.coordinates(t1), ideal.coordinates(t2));
    let to_int = |q: &BigRational| -> Result<BigInt> { if q.is_integer() { Ok(q.to_integer()) } else { Err(Error::NotInIdeal) } };
    let rows = alloc::vec![alloc::vec![to_int(&c1.0)?, to_int(&c1.1)?], alloc::vec![to_int(&c2.0)?, to_int(&c2.1)?]];
    let h = lattice::hnf(&rows);
    if h.len() < 2 {
        return Err(Error::DependentGenerators);
    }
    let [alpha, beta] = ideal.basis();
    let mut out = Vec::new();
    let mut i = BigInt::zero();
    while i < h[0][0] {
        let mut j = BigInt::zero();
        while j < h[1][1] {
            let z = alpha.scale(&BigRational::from_integer(i.clone())).add(&beta.scale(&BigRational::from_integer(j.clone())));
            out.push(reduce_into_parallelogram(t1, t2, &z)?);
            j += 1;
        }
        i += 1;
    }
    out.sort_by(|a, b| cmp_coords(t1, t2, a, b));
    Ok(out)
}

fn cmp_coords(t1: &QuadElem, t2: &QuadElem, a: &QuadElem, b: &QuadElem) -> Ordering {
    let ca = cone_coordinates(t1, t2, a).unwrap();
    let cb = cone_coordinates(t1, t2, b).unwrap();
    ca.cmp(&cb)
}

/// The translate of `z` by `Z t1 + Z t2` lying in `P(t1, t2)`.
pub fn reduce_into_parallelogram(t1: &QuadElem, t2: &QuadElem, z: &QuadElem) -> Result<QuadElem> {
    let (l, m) = cone_coordinates(t1, t2, z)?;
    let shift_l = l.ceil() - BigRational::one();
    let shift_m = m.floor();
    Ok(z.sub(&t1.scale(&shift_l)).sub(&t2.scale(&shift_m)))
}

/// One cone `C(start, end)` of a fan together with `I ∩ P(start, end)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cone {
    pub start: QuadElem,
    pub end: QuadElem,
    pub points: Vec<QuadElem>,
}

/// The fan `rho_0, ..., rho_L` with `rho_L = eps rho_0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeFan {
    /// The vertices `rho_t`.
    pub rays: Vec<QuadElem>,
    pub cones: Vec<Cone>,
    /// Partial quotients `b_{n0+1}, ..., b_{n0+M}` over one period.
    pub partial_quotients: Vec<BigInt>,
    /// Indices `m` (in `1..M`) of skipped polygon vertices.
    pub skipped: Vec<usize>,
    /// The unit with `rho_L = eps rho_0` and `iota1(eps) < 1`.
    pub unit: QuadElem,
    /// The first index at which the sequence lies on the convexity polygon.
    pub stable_index: usize,
}

impl ConeFan {
    pub fn len(&self) -> usize {
        self.cones.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cones.is_empty()
    }
}

/// Orients the ray-unit generator so that `iota1(eps) < 1 < iota2(eps)`.
pub fn orient_unit(field: &QuadField, eps: &QuadElem) -> QuadElem {
    if field.cmp_real(eps, &QuadElem::one(), Embedding::First) == Ordering::Greater {
        field.inv(eps)
    } else {
        eps.clone()
    }
}

/// The type-II continued-fraction sequence of `I` from its initial pair,
/// `r_{n+1} = -r_{n-1} + b_n r_n` with `b_n = ceil(iota1(r_{n-1}/r_n))`.
struct PolygonWalk<'a> {
    field: &'a QuadField,
    terms: Vec<QuadElem>,
    quotients: Vec<BigInt>,
}

impl<'a> PolygonWalk<'a> {
    fn new(field: &'a QuadField, x: QuadElem, y: QuadElem) -> Self {
        PolygonWalk { field, terms: alloc::vec![x, y], quotients: alloc::vec![BigInt::zero()] }
    }

    /// Ensures `terms[n]` exists.
    fn extend_to(&mut self, n: usize) {
        while self.terms.len() <= n {
            let k = self.terms.len() - 1;
            let (prev, cur) = (&self.terms[k - 1], &self.terms[k]);
            let b = self.field.ceil_real(&self.field.div(prev, cur), Embedding::First);
            let next = cur.scale(&BigRational::from_integer(b.clone())).sub(prev);
            self.quotients.push(b);
            self.terms.push(next);
        }
    }

    fn term(&mut self, n: usize) -> &QuadElem {
        self.extend_to(n);
        &self.terms[n]
    }

    /// `b_n` for `n >= 1`.
    fn quotient(&mut self, n: usize) -> &BigInt {
        self.extend_to(n + 1);
        &self.quotients[n]
    }
}

/// Upper bound on polygon steps explored before giving up.
const WALK_LIMIT: usize = 1 << 20;

/// Builds the continued-fraction fan for the pair and the ray unit `eps`.
pub fn continued_fraction_fan(field: &QuadField, pair: &CharPair, eps: &QuadElem) -> Result<ConeFan> {
    let unit = orient_unit(field, eps);
    let ideal = pair.ideal();
    let (x, y) = initial_basis_pair(field, ideal);
    let mut walk = PolygonWalk::new(field, x, y);

    // N: first n with iota2(r_{n-1}) < iota2(r_n)
    let mut stable = 1;
    loop {
        let prev = walk.term(stable - 1).clone();
        let cur = walk.term(stable).clone();
        if field.cmp_real(&prev, &cur, Embedding::Second) == Ordering::Less {
            break;
        }
        stable += 1;
        if stable > WALK_LIMIT {
            return Err(Error::ScanBoundExceeded(WALK_LIMIT as u64));
        }
    }

    // period M: r_{N+M} = eps r_N and r_{N+M+1} = eps r_{N+1}
    let target0 = field.mul(&unit, walk.term(stable));
    let target1 = field.mul(&unit, walk.term(stable + 1));
    let mut period = 1;
    loop {
        if *walk.term(stable + period) == target0 && *walk.term(stable + period + 1) == target1 {
            break;
        }
        period += 1;
        if period > WALK_LIMIT {
            return Err(Error::ScanBoundExceeded(WALK_LIMIT as u64));
        }
    }

    // n0: first n >= N with r_n outside the kernel
    let mut start = stable;
    while pair.in_kernel(field, &walk.term(start).clone())? {
        start += 1;
        if start > stable + period {
            return Err(Error::KernelGenerator);
        }
    }

    let verts: Vec<QuadElem> = (0..=period).map(|m| walk.term(start + m).clone()).collect();
    let quotients: Vec<BigInt> = (0..=period).map(|m| walk.quotient(start + m).clone()).collect();
    debug_assert_eq!(verts[period], field.mul(&unit, &verts[0]));

    let mut bad = alloc::vec![false; period + 1];
    for m in 1..period {
        bad[m] = pair.in_kernel(field, &verts[m])?;
        if bad[m] && bad[m - 1] {
            return Err(Error::KernelGenerator);
        }
    }

    let mut rays = alloc::vec![verts[0].clone()];
    let mut cones = Vec::new();
    let mut skipped = Vec::new();
    let mut m = 1;
    while m <= period {
        if bad[m] {
            // (rho'_{m-1}, rho'_{m+1}); points rho'_{m-1} and j rho'_m
            let b = &quotients[m];
            let mut points = alloc::vec![verts[m - 1].clone()];
            let mut j = BigInt::one();
            while &j < b {
                points.push(verts[m].scale(&BigRational::from_integer(j.clone())));
                j += 1;
            }
            cones.push(Cone { start: verts[m - 1].clone(), end: verts[m + 1].clone(), points });
            rays.push(verts[m + 1].clone());
            skipped.push(m);
            m += 2;
        } else {
            cones.push(Cone { start: verts[m - 1].clone(), end: verts[m].clone(), points: alloc::vec![verts[m - 1].clone()] });
            rays.push(verts[m].clone());
            m += 1;
        }
    }
    for c in &cones {
        debug_assert!(det_sign(field, &c.start, &c.end) > 0);
    }
    Ok(ConeFan { rays, cones, partial_quotients: quotients[1..].to_vec(), skipped, unit, stable_index: stable })
}

/// The single cone `C(rho, eps rho)` with all of `I ∩ P(rho, eps rho)`.
pub fn single_cone(field: &QuadField, pair: &CharPair, rho: &QuadElem, eps: &QuadElem) -> Result<Cone> {
    let unit = orient_unit(field, eps);
    let end = field.mul(&unit, rho);
    let points = enumerate_parallelogram(field, pair.ideal(), rho, &end)?;
    Ok(Cone { start: rho.clone(), end, points })
}

/// Index `|I : Z t1 + Z t2|` (as a positive integer).
pub fn sublattice_index(ideal: &QuadIdeal, t1: &QuadElem, t2: &QuadElem) -> BigRational {
    let (a, b) = ideal.coordinates(t1);
    let (c, d) = ideal.coordinates(t2);
    (a * d - b * c).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charpairs::base_pair;

    fn brute_points(field: &QuadField, ideal: &QuadIdeal, t1: &QuadElem, t2: &QuadElem, box_size: i64) -> Vec<QuadElem> {
        let [alpha, beta] = ideal.basis();
        let mut out = Vec::new();
        for u in -box_size..=box_size {
            for v in -box_size..=box_size {
                let z = alpha.scale_int(u).add(&beta.scale_int(v));
                let (l, m) = cone_coordinates(t1, t2, &z).unwrap();
                if l > BigRational::zero() && l <= BigRational::one() && m >= BigRational::zero() && m < BigRational::one() {
                    out.push(z);
                }
            }
        }
        let _ = field;
        out.sort_by(|a, b| cmp_coords(t1, t2, a, b));
        out
    }

    #[test]
    fn parallelogram_counts() {
        let k = QuadField::new(37).unwrap();
        let o = k.unit_ideal();
        let one = QuadElem::one();
        let w = QuadElem::omega();
        assert_eq!(enumerate_parallelogram(&k, &o, &one, &w).unwrap(), alloc::vec![one.clone()]);
        let two = QuadElem::from_ints(2, 0);
        let two_w = w.scale_int(2);
        let pts = enumerate_parallelogram(&k, &o, &two, &two_w).unwrap();
        assert_eq!(pts.len(), 4);
        assert_eq!(pts, brute_points(&k, &o, &two, &two_w, 6));
        let three = QuadElem::from_ints(3, 0);
        let pts3 = enumerate_parallelogram(&k, &o, &two.scale_int(3), &two_w.scale_int(3)).unwrap();
        assert_eq!(pts3.len(), 9 * pts.len());
        let _ = three;
        assert!(matches!(enumerate_parallelogram(&k, &o, &two, &two.scale_int(2)), Err(Error::DependentGenerators)));
    }

    #[test]
    fn initial_pair_conditions() {
        for d in [5i64, 8, 12, 13, 37, 89, 709] {
            let k = QuadField::new(d).unwrap();
            for ideal in [k.unit_ideal(), k.ideal_inv(&k.different())] {
                let (x, y) = initial_basis_pair(&k, &ideal);
                assert!(k.is_totally_positive(&x) && k.is_totally_positive(&y));
                assert_eq!(k.cmp_real(&x, &y, Embedding::First), Ordering::Greater);
                assert!(det_sign(&k, &x, &y) > 0);
                assert_eq!(sublattice_index(&ideal, &x, &y), BigRational::one());
            }
        }
    }

    fn check_fan(d: i64, f: &QuadIdeal, k: &QuadField) {
        let pair = base_pair(k, f).unwrap();
        let eps = k.ray_unit_generator(f);
        let fan = continued_fraction_fan(k, &pair, &eps).unwrap();
        assert!(fan.partial_quotients.iter().all(|b| *b >= BigInt::from(2)), "d = {d}");
        assert_eq!(*fan.rays.last().unwrap(), k.mul(&fan.unit, &fan.rays[0]));
        for w in fan.skipped.windows(2) {
            assert!(w[1] > w[0] + 1);
        }
        for cone in &fan.cones {
            assert!(!pair.in_kernel(k, &cone.start).unwrap());
            assert!(!pair.in_kernel(k, &cone.end).unwrap());
            assert!(det_sign(k, &cone.start, &cone.end) > 0);
            let generic = enumerate_parallelogram(k, pair.ideal(), &cone.start, &cone.end).unwrap();
            let mut explicit = cone.points.clone();
            explicit.sort_by(|a, b| cmp_coords(&cone.start, &cone.end, a, b));
            assert_eq!(explicit, generic, "d = {d}");
            assert_eq!(BigRational::from_integer(BigInt::from(generic.len())), sublattice_index(pair.ideal(), &cone.start, &cone.end));
        }
    }

    #[test]
    fn fans_for_small_fields() {
        for (d, l) in [(37i64, 2u64), (89, 5), (13, 3), (21, 2), (29, 7), (41, 5)] {
            let k = QuadField::new(d).unwrap();
            let f = if l == 2 { k.principal_ideal(&QuadElem::from_ints(2, 0)).unwrap() } else {
                let ps = k.primes_above(l);
                ps[0].clone()
            };
            check_fan(d, &f, &k);
        }
    }

    #[test]
    fn fan_is_a_disjoint_cover() {
        // every point of I in the big cone (up to a box) lies in exactly one subcone
        let k = QuadField::new(37).unwrap();
        let f = k.principal_ideal(&QuadElem::from_ints(2, 0)).unwrap();
        let pair = base_pair(&k, &f).unwrap();
        let eps = k.ray_unit_generator(&f);
        let fan = continued_fraction_fan(&k, &pair, &eps).unwrap();
        let rho = &fan.rays[0];
        let end = fan.rays.last().unwrap();
        let [alpha, beta] = pair.ideal().basis();
        let in_cone = |t1: &QuadElem, t2: &QuadElem, z: &QuadElem| {
            let (l, m) = cone_coordinates(t1, t2, z).unwrap();
            l > BigRational::zero() && m >= BigRational::zero()
        };
        let mut seen = 0;
        for u in -40..=40 {
            for v in -40..=40 {
                let z = alpha.scale_int(u).add(&beta.scale_int(v));
                let hits = fan.cones.iter().filter(|c| in_cone(&c.start, &c.end, &z)).count();
                if in_cone(rho, end, &z) {
                    assert_eq!(hits, 1);
                    seen += 1;
                } else {
                    assert_eq!(hits, 0);
                }
            }
        }
        assert!(seen > 0);
    }
}

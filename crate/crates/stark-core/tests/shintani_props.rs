//! Continued-fraction fans: structure, explicit point sets against a
//! generic enumeration and a box scan, and the disjoint-cover property.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use proptest::prelude::*;

use stark_core::charpairs::{base_pair, CharPair};
use stark_core::quadfield::{is_fundamental_discriminant, QuadElem, QuadField, QuadIdeal};
use stark_core::shintani::{
    cone_coordinates, continued_fraction_fan, det_sign, enumerate_parallelogram, orient_unit, single_cone,
    sublattice_index, ConeFan,
};

fn discriminants(max: i64) -> Vec<i64> {
    (5..=max).filter(|&d| is_fundamental_discriminant(d)).collect()
}

#[derive(Debug)]
struct Setting {
    field: QuadField,
    pair: CharPair,
    eps: QuadElem,
    fan: ConeFan,
}

fn setting(d: i64, m: usize) -> Setting {
    let field = QuadField::new(d).unwrap();
    let f: QuadIdeal = if m < 5 {
        field.principal_ideal(&QuadElem::from_ints(m as i64 + 2, 0)).unwrap()
    } else {
        let l = [2u64, 3, 5, 7][m - 5];
        field.primes_above(l).into_iter().next().unwrap()
    };
    let pair = base_pair(&field, &f).unwrap();
    let eps = field.ray_unit_generator(&f);
    let fan = continued_fraction_fan(&field, &pair, &eps).unwrap();
    Setting { field, pair, eps, fan }
}

fn arb_setting() -> impl Strategy<Value = Setting> {
    (prop::sample::select(discriminants(60)), 0usize..9).prop_map(|(d, m)| setting(d, m))
}

/// `z` in the half-open cone: `z = l start + m end` with `l > 0`, `m >= 0`.
fn in_cone(start: &QuadElem, end: &QuadElem, z: &QuadElem) -> bool {
    let (l, m) = cone_coordinates(start, end, z).unwrap();
    l.is_positive() && !m.is_negative()
}

/// Largest box scanned; bigger parallelograms are left to the other checks.
const BOX_LIMIT: u64 = 40_000;

/// Points of `I` in `P(t1, t2)` found by scanning a box of ideal
/// coordinates, or `None` when the box exceeds `BOX_LIMIT`.
fn box_scan(ideal: &QuadIdeal, t1: &QuadElem, t2: &QuadElem) -> Option<Vec<QuadElem>> {
    let (a, b) = ideal.coordinates(t1);
    let (c, d) = ideal.coordinates(t2);
    let bound = |x: &BigRational, y: &BigRational| (x.abs() + y.abs()).ceil().to_integer();
    let (ru, rv) = (bound(&a, &c), bound(&b, &d));
    if (BigInt::from(2) * &ru + 1) * (BigInt::from(2) * &rv + 1) > BigInt::from(BOX_LIMIT) {
        return None;
    }
    let [alpha, beta] = ideal.basis();
    let mut out = Vec::new();
    let mut u = -ru.clone();
    while u <= ru {
        let mut v = -rv.clone();
        while v <= rv {
            let z = alpha
                .scale(&BigRational::from_integer(u.clone()))
                .add(&beta.scale(&BigRational::from_integer(v.clone())));
            let (l, m) = cone_coordinates(t1, t2, &z).unwrap();
            if l.is_positive() && l <= BigRational::one() && !m.is_negative() && m < BigRational::one() {
                out.push(z);
            }
            v += 1;
        }
        u += 1;
    }
    Some(out)
}

fn sorted(mut v: Vec<QuadElem>) -> Vec<QuadElem> {
    v.sort_by(|x, y| (&x.a, &x.b).cmp(&(&y.a, &y.b)));
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn fan_structure(s in arb_setting()) {
        let Setting { field, pair, eps, fan } = s;
        let unit = orient_unit(&field, &eps);
        prop_assert_eq!(&fan.unit, &unit);
        prop_assert_eq!(fan.rays.last().unwrap(), &field.mul(&unit, &fan.rays[0]));
        prop_assert_eq!(fan.rays.len(), fan.cones.len() + 1);
        for (i, c) in fan.cones.iter().enumerate() {
            prop_assert_eq!(&c.start, &fan.rays[i]);
            prop_assert_eq!(&c.end, &fan.rays[i + 1]);
            prop_assert!(det_sign(&field, &c.start, &c.end) > 0);
            prop_assert!(field.is_totally_positive(&c.start));
            prop_assert!(!pair.in_kernel(&field, &c.start).unwrap());
        }
        prop_assert!(fan.skipped.windows(2).all(|w| w[1] > w[0] + 1));
        for &m in &fan.skipped {
            prop_assert!(m >= 1 && m < fan.partial_quotients.len());
        }
        prop_assert!(fan.partial_quotients.iter().all(|b| *b >= BigInt::from(2)));
    }

    #[test]
    fn cone_points_match_enumeration_and_box_scan(s in arb_setting()) {
        let Setting { field, pair, fan, .. } = s;
        for c in &fan.cones {
            let generic = enumerate_parallelogram(&field, pair.ideal(), &c.start, &c.end).unwrap();
            prop_assert_eq!(sorted(c.points.clone()), sorted(generic.clone()));
            prop_assert_eq!(BigRational::from_integer(BigInt::from(generic.len())), sublattice_index(pair.ideal(), &c.start, &c.end));
            if let Some(scan) = box_scan(pair.ideal(), &c.start, &c.end) {
                prop_assert_eq!(sorted(scan), sorted(generic));
            }
        }
    }

    #[test]
    fn fan_is_a_disjoint_cover(s in arb_setting(), samples in prop::collection::vec((1i64..50, 0i64..50), 1..20)) {
        let Setting { field, fan, .. } = s;
        let rho = &fan.rays[0];
        let end = fan.rays.last().unwrap();
        // include every ray itself
        let mut points: Vec<QuadElem> = fan.rays[..fan.rays.len() - 1].to_vec();
        for (x, y) in samples {
            points.push(rho.scale_int(x).add(&end.scale_int(y)));
        }
        for z in &points {
            prop_assert!(in_cone(rho, end, z));
            let hits = fan.cones.iter().filter(|c| in_cone(&c.start, &c.end, z)).count();
            prop_assert_eq!(hits, 1);
            // the end ray belongs to the next period, not to this one
            prop_assert!(fan.cones.iter().all(|c| !in_cone(&c.start, &c.end, &field.mul(&fan.unit, rho))));
        }
    }
}

#[test]
fn single_cone_matches_box_scan_for_small_indices() {
    let mut checked = 0;
    for d in [5i64, 8, 12, 13, 17, 21] {
        for m in 0..9 {
            let s = setting(d, m);
            let rho = &s.fan.rays[0];
            let end = s.field.mul(&s.fan.unit, rho);
            if sublattice_index(s.pair.ideal(), rho, &end) > BigRational::from_integer(BigInt::from(3000)) {
                continue;
            }
            let cone = single_cone(&s.field, &s.pair, rho, &s.eps).unwrap();
            let Some(scan) = box_scan(s.pair.ideal(), &cone.start, &cone.end) else { continue };
            checked += 1;
            assert_eq!(sorted(cone.points.clone()), sorted(scan));
            assert!(!cone.points.iter().any(|z| z.is_zero()));
        }
    }
    assert!(checked > 10, "only {checked} cones were small enough to scan");
}

//! Ray class groups against the unit-index formula, computed by brute force
//! over `(O/f)^x`, and the homomorphism property of `class_of`.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use proptest::prelude::*;

use stark_core::quadfield::{is_fundamental_discriminant, Embedding, QuadElem, QuadField, QuadIdeal};
use stark_core::rayclass::{lift_and_kernel, RayClassGroup};

fn discriminants(max: i64) -> Vec<i64> {
    (5..=max).filter(|&d| is_fundamental_discriminant(d)).collect()
}

/// `a + b w` modulo `n O`, with `w^2 = d w - (d^2 - d)/4`, plus the two signs.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Res {
    a: i64,
    b: i64,
    s1: i8,
    s2: i8,
}

fn res_mul(x: Res, y: Res, n: i64, d: i64) -> Res {
    let c = (d * d - d) / 4;
    let a = x.a * y.a - x.b * y.b * c;
    let b = x.a * y.b + x.b * y.a + x.b * y.b * d;
    Res { a: a.rem_euclid(n), b: b.rem_euclid(n), s1: x.s1 * y.s1, s2: x.s2 * y.s2 }
}

fn unit_residue_count(n: i64, d: i64) -> usize {
    let c = (d * d - d) / 4;
    let mut count = 0;
    for a in 0..n {
        for b in 0..n {
            let norm = a * a + a * b * d + b * b * c;
            if num_integer::gcd(norm.rem_euclid(n), n) == 1 {
                count += 1;
            }
        }
    }
    count
}

/// Size of the subgroup generated by `gens`.
fn span(gens: &[Res], n: i64, d: i64) -> usize {
    let one = Res { a: 1 % n, b: 0, s1: 1, s2: 1 };
    let mut set = BTreeSet::from([one]);
    let mut frontier = vec![one];
    while let Some(x) = frontier.pop() {
        for &g in gens {
            let y = res_mul(x, g, n, d);
            if set.insert(y) {
                frontier.push(y);
            }
        }
    }
    set.len()
}

fn elem_res(field: &QuadField, x: &QuadElem, n: i64, signs: bool) -> Res {
    let a = x.a.to_integer().mod_floor_i64(n);
    let b = x.b.to_integer().mod_floor_i64(n);
    let (s1, s2) = if signs {
        (field.sign(x, Embedding::First) as i8, field.sign(x, Embedding::Second) as i8)
    } else {
        (1, 1)
    };
    Res { a, b, s1, s2 }
}

trait ModI64 {
    fn mod_floor_i64(&self, n: i64) -> i64;
}

impl ModI64 for BigInt {
    fn mod_floor_i64(&self, n: i64) -> i64 {
        num_integer::Integer::mod_floor(self, &BigInt::from(n)).to_i64().unwrap()
    }
}

fn rational_modulus(field: &QuadField, n: i64) -> QuadIdeal {
    field.principal_ideal(&QuadElem::from_ints(n, 0)).unwrap()
}

#[test]
fn orders_follow_the_unit_index_formula() {
    for d in discriminants(60) {
        let field = QuadField::new(d).unwrap();
        let h = RayClassGroup::new(&field, &field.unit_ideal(), false, 1).unwrap().order() as usize;
        let eps = field.fundamental_unit().clone();
        for n in 2..=7i64 {
            let f = rational_modulus(&field, n);
            let wide = RayClassGroup::new(&field, &f, false, 1).unwrap();
            let narrow = RayClassGroup::new(&field, &f, true, 1).unwrap();
            assert_eq!(wide.wide_class_number(), h);
            let phi = unit_residue_count(n, d);
            let minus = elem_res(&field, &QuadElem::from_ints(-1, 0), n, false);
            let e = elem_res(&field, &eps, n, false);
            let wide_index = span(&[minus, e], n, d);
            assert_eq!(wide.order() as usize * wide_index, h * phi, "d = {d}, f = {n}");
            let minus = elem_res(&field, &QuadElem::from_ints(-1, 0), n, true);
            let e = elem_res(&field, &eps, n, true);
            let narrow_index = span(&[minus, e], n, d);
            assert_eq!(narrow.order() as usize * narrow_index, 4 * h * phi, "d = {d}, f = {n}+");

            let lift = lift_and_kernel(&narrow, &wide).unwrap();
            assert!([1, 2, 4].contains(&lift.kernel_size));
            assert_eq!(narrow.order(), wide.order() * lift.kernel_size);
            let orders = narrow.cyclic_orders();
            assert_eq!(orders.iter().product::<u64>(), narrow.order());
            assert!(orders.windows(2).all(|w| w[1] % w[0] == 0));
            assert_eq!(narrow.labels().len() as u64, narrow.order());
        }
    }
}

fn arb_setting() -> impl Strategy<Value = (QuadField, QuadIdeal)> {
    (prop::sample::select(discriminants(80)), 0usize..10).prop_map(|(d, m)| {
        let field = QuadField::new(d).unwrap();
        let f = if m < 6 {
            rational_modulus(&field, m as i64 + 2)
        } else {
            let l = [2u64, 3, 5, 7][m - 6];
            field.primes_above(l).into_iter().next().unwrap()
        };
        (field, f)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn class_of_is_a_homomorphism((field, f) in arb_setting(), x in -6i64..6, y in -6i64..6) {
        let g = RayClassGroup::new(&field, &f, true, 1).unwrap();
        let bad = f.min_rational().to_integer();
        let primes: Vec<QuadIdeal> = field
            .prime_ideals_up_to(40)
            .into_iter()
            .filter(|p| num_integer::Integer::gcd(&p.norm().to_integer(), &bad) == BigInt::from(1))
            .take(6)
            .collect();
        for p in &primes {
            for q in &primes {
                let pq = field.ideal_mul(p, q);
                prop_assert_eq!(g.class_of(&pq).unwrap(), g.add(&g.class_of(p).unwrap(), &g.class_of(q).unwrap()));
            }
        }
        // alpha = 1 mod f: trivial when totally positive, and always trivial in Cl_f
        let n = bad.to_i64().unwrap();
        let alpha = QuadElem::from_ints(1 + n * x, n * y);
        prop_assume!(!alpha.is_zero());
        prop_assume!(f.contains(&field, &alpha.sub(&QuadElem::one())));
        let principal = field.principal_ideal(&alpha).unwrap();
        let wide = RayClassGroup::new(&field, &f, false, 1).unwrap();
        prop_assert_eq!(wide.class_of(&principal).unwrap(), wide.identity());
        if field.is_totally_positive(&alpha) {
            prop_assert_eq!(g.class_of(&principal).unwrap(), g.identity());
            for p in &primes {
                let ap = field.ideal_mul(&principal, p);
                prop_assert_eq!(g.class_of(&ap).unwrap(), g.class_of(p).unwrap());
            }
        }
    }

    #[test]
    fn representatives_lie_in_their_class((field, f) in arb_setting()) {
        let g = RayClassGroup::new(&field, &f, true, 1).unwrap();
        for l in g.labels() {
            let rep = g.representative(&l, 1).unwrap();
            prop_assert_eq!(g.class_of(&rep).unwrap(), l.clone());
            prop_assert_eq!(g.scale_label(&l, g.label_order(&l)), g.identity());
            prop_assert_eq!(g.add(&l, &g.neg(&l)), g.identity());
        }
        prop_assert!(!g.order().is_zero());
    }
}

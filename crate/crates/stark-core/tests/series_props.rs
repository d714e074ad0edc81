//! Bivariate series operators over exact rings, with the root-of-unity
//! averaging operator checked against a direct substitution in `Q(zeta_p)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use stark_core::series::{
    binom_power, delta_power_at_zero_stirling, CoeffRing, CycQuad, CycQuadRing, Rationals, TruncSeries,
};

const DEGREE: usize = 7;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// A polynomial of total degree at most `top`, stored at `DEGREE`.
fn arb_poly(top: usize) -> impl Strategy<Value = TruncSeries<BigRational>> {
    prop::collection::vec((-9i64..10, 1i64..4), (DEGREE + 1) * (DEGREE + 2) / 2).prop_map(move |cs| {
        let mut f = TruncSeries::zero(&Rationals, DEGREE);
        let mut it = cs.into_iter();
        for i in 0..=DEGREE {
            for l in 0..=DEGREE - i {
                let (n, d) = it.next().unwrap();
                if i + l <= top {
                    f.set(i, l, q(n, d));
                }
            }
        }
        f
    })
}

fn arb_p() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![2u64, 3, 5])
}

/// `(1/p) sum_zeta F(zeta (1 + X1) - 1, X2)` computed in `Q(zeta_p)`.
fn average_by_substitution(f: &TruncSeries<BigRational>, p: u64) -> TruncSeries<CycQuad> {
    let ring = CycQuadRing::new(p, 5);
    let lift = |c: &BigRational| ring.surd(c.clone(), q(0, 1));
    let mut total = TruncSeries::zero(&ring, DEGREE);
    for t in 0..p as i64 {
        let z = ring.zeta_pow(t);
        // powers of zeta (1 + X) - 1 as univariate coefficient vectors
        let base = vec![ring.sub(&z, &ring.one()), z.clone()];
        let mut powers: Vec<Vec<CycQuad>> = vec![vec![ring.one()]];
        for i in 1..=DEGREE {
            let prev = &powers[i - 1];
            let mut next = vec![ring.zero(); prev.len() + 1];
            for (j, c) in prev.iter().enumerate() {
                for (k, b) in base.iter().enumerate() {
                    next[j + k] = ring.add(&next[j + k], &ring.mul(c, b));
                }
            }
            powers.push(next);
        }
        for i in 0..=DEGREE {
            for l in 0..=DEGREE - i {
                let c = lift(f.coeff(i, l));
                for (j, b) in powers[i].iter().enumerate() {
                    if j + l <= DEGREE {
                        let cur = total.coeff(j, l).clone();
                        total.set(j, l, ring.add(&cur, &ring.mul(&c, b)));
                    }
                }
            }
        }
    }
    total.map(|c| ring.scale(c, &q(1, p as i64)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn averaging_matches_substitution(f in arb_poly(DEGREE), p in arb_p()) {
        let ring = CycQuadRing::new(p, 5);
        let v = f.apply_v(&Rationals, 1, p);
        let direct = average_by_substitution(&f, p);
        for i in 0..=DEGREE {
            for l in 0..=DEGREE - i {
                prop_assert_eq!(direct.coeff(i, l), &ring.surd(v.coeff(i, l).clone(), q(0, 1)));
            }
        }
        // the other axis is the same operator after swapping variables
        prop_assert_eq!(f.apply_v(&Rationals, 2, p), f.swap_variables().apply_v(&Rationals, 1, p).swap_variables());
    }

    #[test]
    fn projection_identities(f in arb_poly(DEGREE), p in arb_p()) {
        let r = &Rationals;
        let v1 = f.apply_v(r, 1, p);
        let v2 = f.apply_v(r, 2, p);
        prop_assert_eq!(v1.apply_v(r, 1, p), v1.clone());
        prop_assert_eq!(v1.apply_v(r, 2, p), v2.apply_v(r, 1, p));
        let u = f.apply_u(r, p);
        prop_assert_eq!(u.apply_u(r, p), u.clone());
        let expanded = f.sub(r, &v1).sub(r, &v2).add(r, &v1.apply_v(r, 2, p));
        prop_assert_eq!(u, expanded);
    }

    #[test]
    fn delta_commutes_with_the_operators(f in arb_poly(DEGREE - 2), p in arb_p()) {
        let r = &Rationals;
        let df = f.apply_delta(r).unwrap();
        prop_assert_eq!(df.apply_u(r, p), f.apply_u(r, p).apply_delta(r).unwrap());
        prop_assert_eq!(df.apply_v(r, 1, p), f.apply_v(r, 1, p).apply_delta(r).unwrap());
        prop_assert_eq!(
            f.delta_power_at_zero(r, 2).unwrap(),
            delta_power_at_zero_stirling(r, &f, 2).unwrap()
        );
    }

    #[test]
    fn binomial_powers_add_exponents(a in (-20i64..20, 1i64..7), b in (-20i64..20, 1i64..7)) {
        let r = &Rationals;
        let (a, b) = (q(a.0, a.1), q(b.0, b.1));
        let pa = binom_power(r, &a, DEGREE).unwrap();
        let pb = binom_power(r, &b, DEGREE).unwrap();
        let pab = binom_power(r, &(&a + &b), DEGREE).unwrap();
        for n in 0..=DEGREE {
            let conv: BigRational = (0..=n).map(|k| &pa[k] * &pb[n - k]).sum();
            prop_assert_eq!(&conv, &pab[n]);
        }
    }

    #[test]
    fn series_division_inverts_multiplication(f in arb_poly(DEGREE), g in arb_poly(DEGREE), c in 1i64..5) {
        let r = &Rationals;
        let mut g = g;
        g.set(0, 0, q(c, 1));
        let fg = f.mul(r, &g);
        prop_assert_eq!(fg.div(r, &g).unwrap(), f.clone());
        prop_assert_eq!(fg, g.mul(r, &f));
    }

    #[test]
    fn galois_action_is_a_ring_map(
        f in prop::sample::select(vec![3u64, 4, 5, 8, 12]),
        xs in prop::collection::vec(-5i64..6, 4),
        t in 0i64..24,
        a in 1u64..24,
    ) {
        prop_assume!(num_integer::gcd(a, f) == 1);
        let ring = CycQuadRing::new(f, 13);
        let x = ring.add(&ring.surd(q(xs[0], 1), q(xs[1], 2)), &ring.zeta_pow(t));
        let y = ring.mul(&ring.surd(q(xs[2], 3), q(xs[3], 1)), &ring.zeta_pow(t + 1));
        prop_assert_eq!(ring.galois(&ring.mul(&x, &y), a), ring.mul(&ring.galois(&x, a), &ring.galois(&y, a)));
        prop_assert_eq!(ring.galois(&ring.add(&x, &y), a), ring.add(&ring.galois(&x, a), &ring.galois(&y, a)));
        prop_assert_eq!(ring.galois(&ring.zeta_pow(t), a), ring.zeta_pow(t * a as i64));
        if let Some(inv) = ring.inv(&x) {
            prop_assert_eq!(ring.mul(&x, &inv), ring.one());
        }
    }
}

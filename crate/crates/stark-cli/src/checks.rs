//! Reproducibility checks shared by `selftest` and the acceptance target.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use stark_core::arith;
use stark_core::charpairs::CharPair;
use stark_core::modp::format_digits;
use stark_core::phi::{padic_symmetry_check, EmbeddingChoice, FiniteAbelianGroup, GroupRingElem, PhiSetup};
use stark_core::quadfield::{is_fundamental_discriminant, QuadElem, QuadField, QuadIdeal};
use stark_core::rayclass::RayClassGroup;
use stark_core::shintani::{single_cone, sublattice_index, Cone};
use stark_core::verify::{check_conjecture_parts, ConjectureReport, DfSource};
use stark_core::zeta::{
    build_f, build_f_star, c_explicit, c_sequence, c_valuation, c_valuation_bound, exact_z_at_m, padic_z_at_1,
    precision_plan, ExactContext, PadicContext, SeriesContext,
};
use stark_core::{Error, Result};

use crate::bundle::ExampleBundle;

/// All automorphisms of a finite abelian group, as index permutations.
pub fn automorphisms(group: &FiniteAbelianGroup) -> Vec<Vec<usize>> {
    let gens = group.orders().len();
    let n = group.order();
    let mut out = Vec::new();
    // images of the generators, as element indices
    let mut choice = vec![0usize; gens];
    loop {
        let images: Vec<Vec<u64>> = choice.iter().map(|&i| group.element(i)).collect();
        let ok = images.iter().zip(group.orders()).all(|(img, &ord)| {
            let mut acc = group.identity();
            for _ in 0..ord {
                acc = group.add(&acc, img);
            }
            acc == group.identity()
        });
        if ok {
            let map: Vec<usize> = (0..n)
                .map(|i| {
                    let e = group.element(i);
                    let mut acc = group.identity();
                    for (j, &k) in e.iter().enumerate() {
                        for _ in 0..k {
                            acc = group.add(&acc, &images[j]);
                        }
                    }
                    group.index_of(&acc)
                })
                .collect();
            let mut seen = vec![false; n];
            for &m in &map {
                seen[m] = true;
            }
            if seen.iter().all(|&s| s) {
                out.push(map);
            }
        }
        let mut j = 0;
        loop {
            if j == gens {
                return out;
            }
            choice[j] += 1;
            if choice[j] < n {
                break;
            }
            choice[j] = 0;
            j += 1;
        }
    }
}

/// Result of reproducing one published p-adic row.
#[derive(Clone, Debug)]
pub struct PadicReproduction {
    pub p: u64,
    pub digits: u32,
    pub computed: Vec<(EmbeddingChoice, GroupRingElem<Vec<u64>>)>,
    pub expected: GroupRingElem<Vec<u64>>,
    /// Choices whose output equals the published row coefficient by coefficient.
    pub exact_matches: Vec<EmbeddingChoice>,
    /// Choices matching after relabelling the group by an automorphism.
    pub relabelled_matches: Vec<EmbeddingChoice>,
    pub elapsed: Duration,
    pub setup: PhiSetup,
}

impl PadicReproduction {
    pub fn render(&self, digits: &GroupRingElem<Vec<u64>>) -> String {
        digits.render(|d| format_digits(d, self.p))
    }
}

/// Evaluates every class for every listed choice (in parallel over both)
/// and returns the digit vectors of each group-ring value.
pub fn compute_choices(setup: &PhiSetup, choices: &[EmbeddingChoice]) -> Result<Vec<(EmbeddingChoice, GroupRingElem<Vec<u64>>)>> {
    let jobs = setup.jobs.len();
    let tasks: Vec<(usize, usize)> = (0..choices.len()).flat_map(|c| (0..jobs).map(move |j| (c, j))).collect();
    let values = tasks.par_iter().map(|&(c, j)| setup.evaluate(&setup.jobs[j], choices[c])).collect::<Result<Vec<_>>>()?;
    let ring = setup.ring()?;
    let mut computed = Vec::new();
    for (c, choice) in choices.iter().enumerate() {
        let phi = setup.assemble(&values[c * jobs..(c + 1) * jobs])?;
        computed.push((*choice, phi.map(|&z| ring.digits(z))));
    }
    Ok(computed)
}

/// Computes the group-ring value for every admissible embedding choice, in
/// parallel over choices and classes, and compares with the bundle.
pub fn reproduce_padic(bundle: &ExampleBundle, p: u64) -> Result<PadicReproduction> {
    let expected = bundle.expected_padic(p)?.ok_or_else(|| Error::Parse(format!("example {} has no row for p = {p}", bundle.id)))?;
    let digits = bundle.padic_digits(p)?.unwrap_or(0);
    let start = Instant::now();
    let field = bundle.field()?;
    let f = bundle.modulus(&field)?;
    let setup = PhiSetup::new(&field, &f, p, digits)?;
    let choices = setup.embedding_choices();
    let computed = compute_choices(&setup, &choices)?;
    matching(p, digits, computed, expected, start.elapsed(), setup)
}

/// Compares computed digit vectors with a published row, exactly and up to
/// relabelling the group by an automorphism.
pub fn matching(
    p: u64,
    digits: u32,
    computed: Vec<(EmbeddingChoice, GroupRingElem<Vec<u64>>)>,
    expected: GroupRingElem<Vec<u64>>,
    elapsed: Duration,
    setup: PhiSetup,
) -> Result<PadicReproduction> {
    let group = expected.group().clone();
    if group.orders() != setup.group.orders() {
        return Err(Error::InconsistentGroups(format!("computed group {:?}, bundle group {:?}", setup.group.orders(), group.orders())));
    }
    let autos = automorphisms(&group);
    let mut exact_matches = Vec::new();
    let mut relabelled_matches = Vec::new();
    for (choice, phi) in &computed {
        let want = expected.coefficients();
        let have = phi.coefficients();
        let truncated = |v: &Vec<u64>| v[..v.len().min(digits as usize)].to_vec();
        if (0..group.order()).all(|i| truncated(&have[i]) == want[i]) {
            exact_matches.push(*choice);
        }
        if autos.iter().any(|m| (0..group.order()).all(|i| truncated(&have[m[i]]) == want[i])) {
            relabelled_matches.push(*choice);
        }
    }
    Ok(PadicReproduction { p, digits, computed, expected, exact_matches, relabelled_matches, elapsed, setup })
}

/// `coefficient(g) = coefficient(g^-1)` modulo `p^N` for one embedding choice.
pub fn phi_symmetry(bundle: &ExampleBundle, p: u64, digits: u32, choice: EmbeddingChoice) -> Result<(bool, u32)> {
    let field = bundle.field()?;
    let f = bundle.modulus(&field)?;
    let setup = PhiSetup::new(&field, &f, p, digits)?;
    let values = setup.jobs.par_iter().map(|j| setup.evaluate(j, choice)).collect::<Result<Vec<_>>>()?;
    let phi = setup.assemble(&values)?;
    let ring = setup.ring()?;
    let rep = padic_symmetry_check(&ring, &phi, true);
    Ok((rep.symmetric, rep.agreement_digits.unwrap_or(0)))
}

// ---------------------------------------------------------------------------
// Randomized configurations

/// A field, a modulus, an admissible prime and one class of `Cl_f`.
#[derive(Clone, Debug)]
pub struct Configuration {
    pub field: QuadField,
    pub modulus: QuadIdeal,
    pub description: String,
    pub p: u64,
    pub conductor: u64,
    pub pair: CharPair,
    pub cone: Cone,
    pub eps: QuadElem,
    pub rho: QuadElem,
}

/// Limits for the randomized configurations.
#[derive(Clone, Copy, Debug)]
pub struct ConfigLimits {
    pub max_disc: i64,
    pub max_modulus_int: u64,
    pub primes: &'static [u64],
    /// Re-draw when `C(rho, eps rho)` holds more lattice points than this.
    pub max_single_cone_points: u64,
}

pub const DEFAULT_LIMITS: ConfigLimits =
    ConfigLimits { max_disc: 100, max_modulus_int: 10, primes: &[3, 5, 7, 11, 13], max_single_cone_points: 4000 };

fn random_modulus(rng: &mut ChaCha8Rng, field: &QuadField, max_int: u64) -> Option<(QuadIdeal, String)> {
    if rng.gen_bool(0.5) {
        let n = rng.gen_range(2..=max_int);
        let f = field.principal_ideal(&QuadElem::from_ints(n as i64, 0)).ok()?;
        Some((f, format!("{n}O")))
    } else {
        let l = *[2u64, 3, 5, 7].choose(rng)?;
        let primes = field.primes_above(l);
        let i = rng.gen_range(0..primes.len());
        let q = primes[i].clone();
        let f = if q.norm() == arith::int(l as i64) && l * l <= max_int && rng.gen_bool(0.3) {
            (field.ideal_mul(&q, &q), format!("q{l}[{i}]^2"))
        } else {
            (q, format!("q{l}[{i}]"))
        };
        Some(f)
    }
}

/// Draws `count` admissible configurations deterministically from `seed`.
pub fn random_configurations(seed: u64, count: usize, limits: ConfigLimits) -> Vec<Configuration> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let discs: Vec<i64> = (5..=limits.max_disc).filter(|&d| is_fundamental_discriminant(d)).collect();
    let mut out = Vec::new();
    let mut attempts = 0;
    while out.len() < count && attempts < 10_000 {
        attempts += 1;
        let d = *discs.choose(&mut rng).unwrap();
        let Ok(field) = QuadField::new(d) else { continue };
        let Some((f, description)) = random_modulus(&mut rng, &field, limits.max_modulus_int) else { continue };
        let p = *limits.primes.choose(&mut rng).unwrap();
        let Ok(setup) = PhiSetup::new(&field, &f, p, 10) else { continue };
        let job = setup.jobs.choose(&mut rng).unwrap().clone();
        let eps = field.ray_unit_generator(&f);
        let rho = job.fan.rays[0].clone();
        let end = field.mul(&stark_core::shintani::orient_unit(&field, &eps), &rho);
        let index = sublattice_index(job.pair.ideal(), &rho, &end);
        if index > BigRational::from_integer(BigInt::from(limits.max_single_cone_points)) {
            continue;
        }
        let cone = job.fan.cones.choose(&mut rng).unwrap().clone();
        out.push(Configuration {
            description: format!("d={d} f={description} p={p} class={:?}", job.class.0),
            field,
            modulus: f,
            p,
            conductor: setup.conductor,
            pair: job.pair,
            cone,
            eps,
            rho,
        });
    }
    out
}

/// Outcome of a randomized check.
#[derive(Clone, Debug, Default)]
pub struct RandomizedOutcome {
    pub trials: usize,
    pub failures: Vec<String>,
}

impl RandomizedOutcome {
    pub fn passed(&self, min_trials: usize) -> bool {
        self.trials >= min_trials && self.failures.is_empty()
    }
}

fn run_randomized(configs: &[Configuration], check: impl Fn(&Configuration) -> Result<bool> + Sync) -> RandomizedOutcome {
    let results: Vec<(String, Result<bool>)> = configs.par_iter().map(|c| (c.description.clone(), check(c))).collect();
    let mut out = RandomizedOutcome { trials: results.len(), failures: Vec::new() };
    for (desc, r) in results {
        match r {
            Ok(true) => {}
            Ok(false) => out.failures.push(desc),
            Err(e) => out.failures.push(format!("{desc}: {e}")),
        }
    }
    out
}

/// The sum of the fan cones equals the single cone `C(rho, eps rho)` modulo `p^digits`.
pub fn fan_additivity(configs: &[Configuration], digits: u32) -> RandomizedOutcome {
    run_randomized(configs, |c| {
        let field = &c.field;
        let fan = stark_core::shintani::continued_fraction_fan(field, &c.pair, &c.eps)?;
        let plan = precision_plan(c.p, digits);
        let ctx = PadicContext::from_plan(field, &plan, c.conductor, 0, 0)?;
        let ring = ctx.zp();
        let mut sum = ring.zero();
        for cone in &fan.cones {
            sum = ring.add(sum, padic_z_at_1(&ctx, &c.pair, cone)?);
        }
        let big = single_cone(field, &c.pair, &fan.rays[0], &c.eps)?;
        Ok(sum == padic_z_at_1(&ctx, &c.pair, &big)?)
    })
}

/// `U F = F*` coefficientwise up to total degree `degree` modulo `p^digits`.
///
/// `U` is applied to `F` truncated at `degree + (digits + 1)(p - 1)`: the
/// coefficients dropped by the truncation enter the kept ones only through
/// sums `sum_zeta (zeta - 1)^n / p` with `n > (digits + 1)(p - 1)`, which
/// vanish modulo `p^digits`.
pub fn u_f_identity(configs: &[Configuration], degree: usize, digits: u32) -> RandomizedOutcome {
    run_randomized(configs, |c| {
        let field = &c.field;
        let deep = degree + (digits as usize + 1) * (c.p as usize - 1);
        let ctx = PadicContext::new(field, c.p, c.conductor, 0, 0, digits, deep)?;
        let f = build_f(&ctx, &c.pair, &c.cone.start, &c.cone.end, &c.cone.points, 1)?;
        let uf = f.apply_u(ctx.ring(), c.p).truncate(degree);
        let shallow = PadicContext::new(field, c.p, c.conductor, 0, 0, digits, degree)?;
        let fs = build_f_star(&shallow, &c.pair, &c.cone.start, &c.cone.end, c.p, 1)?;
        let ring = ctx.zp();
        Ok((0..=degree).all(|i| (0..=degree - i).all(|l| ring.residue(*uf.coeff(i, l)) == ring.residue(*fs.coeff(i, l)))))
    })
}

/// For `m in {0, -(p-1)}`: the `sqrt(d)` component vanishes and
/// `alpha(z(m; xi)) = z(m; xi^a)` for every `alpha: zeta -> zeta^a`.
pub fn exact_value_checks(configs: &[Configuration]) -> RandomizedOutcome {
    run_randomized(configs, |c| {
        let field = &c.field;
        let n = c.p as usize - 1;
        let ctx = ExactContext::new(field, c.conductor, 2 * n);
        let ring = ctx.ring();
        for m in [0i64, -(n as i64)] {
            let z = exact_z_at_m(&ctx, &c.pair, &c.cone, m, None, 1)?;
            if !z.v.is_zero() {
                return Ok(false);
            }
            for a in ring.cyclotomic().galois_group() {
                let lhs = ring.galois(&z, a);
                let rhs = exact_z_at_m(&ctx, &c.pair, &c.cone, m, None, a)?;
                if lhs != rhs {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    })
}

/// Recurrence against the closed form and the valuation bound for `n <= n_max`.
pub fn c_sequence_check(primes: &[u64], n_max: usize) -> Vec<String> {
    let mut failures = Vec::new();
    for &p in primes {
        let c = c_sequence(p, n_max);
        for (i, cn) in c.iter().enumerate() {
            let n = i as u64 + 1;
            if *cn != c_explicit(p, n) {
                failures.push(format!("p={p} n={n}: recurrence and closed form differ"));
            }
            if let Some(v) = c_valuation(cn, p) {
                if (v as u64) < c_valuation_bound(p, n) {
                    failures.push(format!("p={p} n={n}: valuation {v} below the bound"));
                }
            }
        }
    }
    failures
}

// ---------------------------------------------------------------------------
// Complex side

/// A built-in example whose published data are internally inconsistent, so
/// that the complex-side check cannot agree with it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KnownDiscrepancy {
    pub example: u32,
    pub reason: &'static str,
}

pub const KNOWN_DISCREPANCIES: [KnownDiscrepancy; 3] = [
    KnownDiscrepancy {
        example: 3,
        reason: "published index and b leave no integral d_f on the three-character component",
    },
    KnownDiscrepancy {
        example: 13,
        reason: "published regulator coefficients make R singular on the trivial character",
    },
    KnownDiscrepancy {
        example: 15,
        reason: "published A does not satisfy A R = Phi; the solve gives another element",
    },
];

/// The complex-side check against the bundle's expectations.
#[derive(Clone, Debug)]
pub struct VerifyOutcome {
    pub report: ConjectureReport,
    pub a_matches: bool,
    pub d_f_matches: bool,
    pub index_matches: Option<bool>,
    pub b: BigInt,
    pub idempotent_matches: bool,
    pub stable_under_truncation: Option<bool>,
}

/// Runs the solve for one example; `truncate_to` re-solves with inputs cut to
/// that many decimals and compares.
pub fn verify_example(bundle: &ExampleBundle, with_units: bool, truncate_to: Option<usize>) -> Result<VerifyOutcome> {
    let inputs = bundle.conjecture_inputs(with_units)?;
    let report = check_conjecture_parts(&inputs)?;
    // A is determined only on the rank-2 component
    let e_s2 = inputs.ranks.idempotent_eq(&inputs.table, 2);
    let expected_a = e_s2.mul(&bundle.rational(&bundle.expected_a)?);
    let a_matches = report.solution.a == expected_a;
    let d_f_matches = report.d_f.as_ref() == Some(&BigInt::from(bundle.expected_d_f));
    let index: BigInt = bundle.expected_index_eta.parse().map_err(|_| Error::Parse("index".into()))?;
    let index_matches = match &report.d_f_source {
        Some(DfSource::Lattice(l)) => Some(l.index_eta == BigRational::from_integer(index.clone())),
        _ => None,
    };
    let table = &inputs.table;
    let published = bundle.rational(&bundle.scaled_idempotent_above_two)?;
    let idempotent_matches = inputs.ranks.scaled_idempotent_above(table, 2) == published;
    let stable_under_truncation = match truncate_to {
        None => None,
        Some(places) => {
            let mut t = inputs.clone();
            t.rgamma = inputs.rgamma.truncated(places);
            t.phi0 = inputs.phi0.truncated(places);
            Some(check_conjecture_parts(&t).map(|r| r.solution.a == report.solution.a).unwrap_or(false))
        }
    };
    Ok(VerifyOutcome { report, a_matches, d_f_matches, index_matches, b: inputs.b, idempotent_matches, stable_under_truncation })
}

// ---------------------------------------------------------------------------
// Group structure

/// `Cl_f` for every bundle against its declared group; returns mismatches.
pub fn group_structure_check() -> Vec<String> {
    let mut failures = Vec::new();
    for b in ExampleBundle::all_builtin() {
        let result = (|| -> Result<Vec<u64>> {
            let field = b.field()?;
            let f = b.modulus(&field)?;
            Ok(RayClassGroup::new(&field, &f, false, 1)?.cyclic_orders().to_vec())
        })();
        match result {
            Ok(orders) if orders == b.group => {}
            Ok(orders) => failures.push(format!("example {}: computed {orders:?}, declared {:?}", b.id, b.group)),
            Err(e) => failures.push(format!("example {}: {e}", b.id)),
        }
    }
    failures
}

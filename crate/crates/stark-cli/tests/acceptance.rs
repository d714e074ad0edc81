//! Acceptance run: one PASS/FAIL line per criterion; exits nonzero when any
//! criterion fails.

use std::process::ExitCode;
use std::time::Duration;

use num_bigint::BigInt;
use stark_cli::bundle::ExampleBundle;
use stark_cli::checks::{
    c_sequence_check, exact_value_checks, fan_additivity, group_structure_check, random_configurations, reproduce_padic,
    u_f_identity, verify_example, PadicReproduction, DEFAULT_LIMITS,
};
use stark_core::verify::below_power_of_ten;

const EXAMPLE1_PRIMES: [u64; 3] = [3, 7, 11];
const EXAMPLE1_TIME_LIMIT: Duration = Duration::from_secs(5 * 60);
const EXAMPLE10_PRIMES: [u64; 4] = [3, 5, 7, 11];
const EXAMPLE10_TIME_LIMIT: Duration = Duration::from_secs(15 * 60);

const RANDOM_SEED: u64 = 0x5eed_2024;
const FAN_TRIALS: usize = 20;
const FAN_DIGITS: u32 = 10;
const UF_TRIALS: usize = 10;
const UF_DEGREE: usize = 20;
const UF_DIGITS: u32 = 10;
const EXACT_TRIALS: usize = 10;
const C_PRIMES: [u64; 5] = [3, 5, 7, 11, 13];
const C_MAX: usize = 300;

/// The solve must satisfy its equation to better than `10^-20`.
const RESIDUAL_EXPONENT: u32 = 20;
const TRUNCATED_PLACES: usize = 25;

struct Line {
    passed: bool,
    detail: String,
}

fn line(passed: bool, detail: impl Into<String>) -> Line {
    Line { passed, detail: detail.into() }
}

fn reproduction_lines(id: u32, primes: &[u64], limit: Duration, out: &mut Vec<PadicReproduction>) -> Line {
    let bundle = ExampleBundle::builtin(id).expect("bundle");
    let mut passed = true;
    let mut parts = Vec::new();
    for &p in primes {
        match reproduce_padic(&bundle, p) {
            Ok(r) => {
                let ok = !r.exact_matches.is_empty() && r.elapsed < limit;
                passed &= ok;
                parts.push(format!(
                    "p={p} N={}: {} of {} choices match, {:.1}s",
                    r.digits,
                    r.exact_matches.len(),
                    r.computed.len(),
                    r.elapsed.as_secs_f64()
                ));
                out.push(r);
            }
            Err(e) => {
                passed = false;
                parts.push(format!("p={p}: error {e}"));
            }
        }
    }
    line(passed, parts.join("; "))
}

fn symmetry_line(runs: &[PadicReproduction]) -> Line {
    let mut passed = !runs.is_empty();
    let mut parts = Vec::new();
    for r in runs {
        let sym = r.computed.iter().all(|(_, phi)| phi.coeff(&[1]) == phi.coeff(&[2]));
        passed &= sym;
        parts.push(format!("p={}: {}", r.p, if sym { "symmetric" } else { "asymmetric" }));
    }
    line(passed, parts.join(", "))
}

fn randomized_line(outcome: stark_cli::checks::RandomizedOutcome, min: usize) -> Line {
    let detail = if outcome.failures.is_empty() {
        format!("{} configurations agree", outcome.trials)
    } else {
        format!("{} of {} failed: {}", outcome.failures.len(), outcome.trials, outcome.failures.join(" | "))
    };
    line(outcome.passed(min), detail)
}

fn example1_line() -> Line {
    let bundle = ExampleBundle::builtin(1).expect("bundle");
    match verify_example(&bundle, true, Some(TRUNCATED_PLACES)) {
        Ok(v) => {
            let residual_ok = below_power_of_ten(&v.report.solution.residual, RESIDUAL_EXPONENT);
            let passed = v.a_matches
                && residual_ok
                && v.d_f_matches
                && v.index_matches == Some(true)
                && v.idempotent_matches
                && v.stable_under_truncation == Some(true);
            line(
                passed,
                format!(
                    "A {}, residual below 1e-{RESIDUAL_EXPONENT}: {residual_ok}, d_f = {:?}, index {}, scaled idempotent {}, stable at {TRUNCATED_PLACES} places: {:?}",
                    if v.a_matches { "matches" } else { "differs" },
                    v.report.d_f.map(|d| d.to_string()),
                    match v.index_matches { Some(true) => "matches", Some(false) => "differs", None => "unavailable" },
                    if v.idempotent_matches { "matches" } else { "differs" },
                    v.stable_under_truncation,
                ),
            )
        }
        Err(e) => line(false, format!("error {e}")),
    }
}

fn examples_4_7_8_line() -> Line {
    let mut passed = true;
    let mut parts = Vec::new();
    for id in [4u32, 7, 8] {
        let bundle = ExampleBundle::builtin(id).expect("bundle");
        match verify_example(&bundle, true, None) {
            Ok(v) => {
                let b_ok = id != 8 || v.b == BigInt::from(82);
                let ok = v.a_matches && v.d_f_matches && b_ok;
                passed &= ok;
                parts.push(format!(
                    "ex{id}: A {}, d_f = {:?}, b = {}",
                    if v.a_matches { "matches" } else { "differs" },
                    v.report.d_f.map(|d| d.to_string()),
                    v.b
                ));
            }
            Err(e) => {
                passed = false;
                parts.push(format!("ex{id}: error {e}"));
            }
        }
    }
    line(passed, parts.join("; "))
}

fn group_line() -> Line {
    let failures = group_structure_check();
    if failures.is_empty() {
        line(true, "ray class group orders agree for all 15 examples; property suites run under `cargo test --workspace`")
    } else {
        line(false, failures.join("; "))
    }
}

fn main() -> ExitCode {
    let mut runs1 = Vec::new();
    let mut runs10 = Vec::new();
    let mut lines = Vec::new();
    lines.push(reproduction_lines(1, &EXAMPLE1_PRIMES, EXAMPLE1_TIME_LIMIT, &mut runs1));
    lines.push(reproduction_lines(10, &EXAMPLE10_PRIMES, EXAMPLE10_TIME_LIMIT, &mut runs10));
    runs1.extend(runs10);
    lines.push(symmetry_line(&runs1));

    let fan_configs = random_configurations(RANDOM_SEED, FAN_TRIALS, DEFAULT_LIMITS);
    lines.push(randomized_line(fan_additivity(&fan_configs, FAN_DIGITS), FAN_TRIALS));
    let uf_configs = random_configurations(RANDOM_SEED + 1, UF_TRIALS, DEFAULT_LIMITS);
    lines.push(randomized_line(u_f_identity(&uf_configs, UF_DEGREE, UF_DIGITS), UF_TRIALS));

    let c_failures = c_sequence_check(&C_PRIMES, C_MAX);
    lines.push(if c_failures.is_empty() {
        line(true, format!("n <= {C_MAX}, p in {C_PRIMES:?}"))
    } else {
        line(false, c_failures.join("; "))
    });

    let exact_configs = random_configurations(RANDOM_SEED + 2, EXACT_TRIALS, DEFAULT_LIMITS);
    lines.push(randomized_line(exact_value_checks(&exact_configs), EXACT_TRIALS));
    lines.push(example1_line());
    lines.push(examples_4_7_8_line());
    lines.push(group_line());

    let mut all = true;
    for (i, l) in lines.iter().enumerate() {
        all &= l.passed;
        println!("criterion {}: {} — {}", i + 1, if l.passed { "PASS" } else { "FAIL" }, l.detail);
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

//! The `stark` binary: exit codes, JSON error shape, report round-trips and
//! a few values computed through the subcommands.

use std::process::{Command, Output};

use serde_json::Value;
use stark_cli::commands::{
    self, reingest, CnReport, FanReport, FieldInput, PhiRequest, PlanReport, Report, VerifyReport, ZetaMode,
    ZetaReport, ZetaRequest,
};

fn stark(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stark")).args(args).output().expect("run stark")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn assert_error(out: &Output, code: i32, kind: &str) {
    assert_eq!(out.status.code(), Some(code), "{}", String::from_utf8_lossy(&out.stdout));
    let v = json_of(out);
    assert_eq!(v["error"]["kind"], kind);
    assert!(v["error"]["message"].as_str().is_some_and(|m| !m.is_empty()));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_error(&stark(&["--json", "frobnicate"]), 2, "Usage");
    assert_error(&stark(&["cn", "--p", "3"]), 2, "Usage");
    assert_error(&stark(&["zeta", "--d", "5", "--f-rational", "3", "--f-hnf", "3,0,3", "--mode", "exact", "--m", "0"]), 2, "Usage");
}

#[test]
fn domain_errors_exit_with_one() {
    assert_error(&stark(&["--json", "cn", "--p", "9", "--n", "3"]), 1, "BadPrime");
    assert_error(&stark(&["zeta", "--d", "6", "--f-rational", "3", "--mode", "exact", "--m", "0"]), 1, "BadDiscriminant");
    assert_error(&stark(&["zeta", "--mode", "exact", "--m", "0"]), 1, "Usage");
    assert_error(&stark(&["zeta", "--d", "5", "--f-rational", "3", "--mode", "exact", "--m", "-1", "--p", "3"]), 1, "HypothesisViolation");
}

#[test]
fn help_and_version_succeed() {
    assert!(stark(&["--help"]).status.success());
    assert!(stark(&["--version"]).status.success());
}

#[test]
fn cn_and_plan_through_the_binary() {
    let out = stark(&["--json", "cn", "--p", "3", "--n", "4"]);
    assert!(out.status.success());
    let c: CnReport = reingest(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    assert_eq!(c.c, vec![Value::from(-3), Value::from(3), Value::from(0), Value::from(-9)]);

    let out = stark(&["--json", "plan", "--p", "3", "--digits", "24"]);
    let plan = json_of(&out);
    assert_eq!(plan["N"], 24);
    assert_eq!(plan["W"], 24);
    assert!(plan["M"].as_u64().unwrap() >= 24);
}

#[test]
fn verify_reports_every_example_and_flags_failures() {
    let out = stark(&["--json", "verify", "--example", "1", "--example", "13"]);
    assert_eq!(out.status.code(), Some(1));
    let report: VerifyReport = reingest(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    assert_eq!(report.rows.len(), 2);
    assert!(report.rows[0].passed());
    assert!(report.rows[1].error.is_some());

    let out = stark(&["verify", "--example", "4", "--example", "7"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn phi_assertion_for_the_first_example() {
    let out = stark(&["--json", "phi", "--example", "1", "--p", "3", "--assert"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let v = json_of(&out);
    assert_eq!(v["rows"][0]["assertion"]["passed"], true);
}

#[test]
fn reports_round_trip_through_json() {
    let ex1 = FieldInput { example: Some(1), ..Default::default() };
    let fan = commands::fan(&ex1, None).unwrap();
    assert_eq!(reingest::<FanReport>(&fan.json()).unwrap(), fan);

    let field = FieldInput { d: Some(5), f_rational: Some("3".into()), ..Default::default() };
    let req = ZetaRequest { mode: ZetaMode::Exact, m: Some(-1), s1: false, p: None, digits: 10, root_choice: 0, zeta_choice: 0 };
    let z = commands::zeta(&field, &req).unwrap();
    assert_eq!(reingest::<ZetaReport>(&z.json()).unwrap(), z);

    let plan = commands::plan(7, 10).unwrap();
    assert_eq!(reingest::<PlanReport>(&plan.json()).unwrap(), plan);

    let phi = commands::phi(&ex1, &PhiRequest { p: Some(3), digits: Some(6), root_choice: Some(0), zeta_choice: Some(0), assert: false }).unwrap();
    assert_eq!(reingest::<commands::PhiReport>(&phi.json()).unwrap(), phi);
}

fn exact_rational(field: &FieldInput, m: i64, p: Option<u64>) -> num_rational::BigRational {
    let req = ZetaRequest { mode: ZetaMode::Exact, m: Some(m), s1: false, p, digits: 10, root_choice: 0, zeta_choice: 0 };
    let z = commands::zeta(field, &req).unwrap();
    let exact = z.exact.unwrap();
    assert!(exact.sqrt_d_part.is_empty());
    assert!(exact.rational_part.len() <= 1);
    exact.rational_part.first().map(|s| stark_cli::bundle::parse_rational(s).unwrap()).unwrap_or_default()
}

#[test]
fn removing_an_inert_euler_factor() {
    // 7 is inert in Q(sqrt 5) and 7 = 1 mod 3 is totally positive, so 7O is
    // trivial in the ray class group mod 3: Z*(-1) = (1 - 49) Z(-1).
    let field = FieldInput { d: Some(5), f_rational: Some("3".into()), ..Default::default() };
    let full = exact_rational(&field, -1, None);
    let removed = exact_rational(&field, -1, Some(7));
    assert_eq!(removed, full * num_rational::BigRational::from_integer((-48).into()));
}

#[test]
fn field_inputs_are_exclusive_and_equivalent() {
    let a = FieldInput { d: Some(5), f_rational: Some("3".into()), ..Default::default() }.resolve().unwrap();
    let b = FieldInput { d: Some(5), f_hnf: Some("3,0,3".into()), ..Default::default() }.resolve().unwrap();
    assert_eq!(a.modulus, b.modulus);
    assert!(FieldInput { example: Some(1), d: Some(5), ..Default::default() }.resolve().is_err());
    assert!(FieldInput { d: Some(5), f_rational: Some("1/3".into()), ..Default::default() }.resolve().is_err());
}

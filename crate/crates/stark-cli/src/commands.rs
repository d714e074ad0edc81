//! Subcommand implementations. Each command turns flags into core objects,
//! runs, and returns a serializable report; `main` only prints.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use rayon::prelude::*;
use serde::{de::DeserializeOwned, Deserialize, Serialize};

use stark_core::charpairs::{base_pair, CharPair};
use stark_core::modp::{digits_value, format_digits};
use stark_core::phi::{check_hypotheses, EmbeddingChoice, GroupRingElem, PhiSetup};
use stark_core::quadfield::{QuadElem, QuadField, QuadIdeal};
use stark_core::series::{CoeffRing, CycQuad};
use stark_core::shintani::{continued_fraction_fan, ConeFan};
use stark_core::verify::decimal_magnitude;
use stark_core::zeta::{c_sequence, exact_z_at_m, padic_big_z_at_1, precision_plan, ExactContext, PadicContext, SeriesContext};

use crate::bundle::{parse_rational, ExampleBundle};
use crate::checks;

/// A failure reported as `{"error": {"kind": ..., "message": ...}}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliError {
    pub kind: String,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError { kind: "Usage".into(), message: message.into() }
    }

    pub fn to_json(&self) -> String {
        serde_json::json!({ "error": self }).to_string()
    }
}

impl From<stark_core::Error> for CliError {
    fn from(e: stark_core::Error) -> Self {
        let debug = format!("{e:?}");
        let kind = debug.split(|c: char| !c.is_alphanumeric()).next().unwrap_or("Error").to_string();
        CliError { kind, message: e.to_string() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError { kind: "Io".into(), message: e.to_string() }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Output of a subcommand: JSON for machines, text for people.
pub trait Report: Serialize + DeserializeOwned {
    fn text(&self) -> String;

    fn json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

// ---------------------------------------------------------------------------
// Field and modulus input

/// `[[a, b], [0, c]]` times `scale` (a rational written `p/q`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HnfLiteral {
    pub hnf: [[i64; 2]; 2],
    pub scale: String,
}

/// A field and an ideal of it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdealLiteral {
    pub d_k: i64,
    pub ideal: HnfLiteral,
}

impl IdealLiteral {
    pub fn from_ideal(field: &QuadField, ideal: &QuadIdeal) -> CliResult<Self> {
        let (hnf, den) = ideal.hnf();
        let small = |x: &BigInt| x.to_i64().ok_or_else(|| CliError::usage("ideal entries exceed 64 bits"));
        Ok(IdealLiteral {
            d_k: field.disc(),
            ideal: HnfLiteral {
                hnf: [[small(&hnf[0][0])?, small(&hnf[0][1])?], [small(&hnf[1][0])?, small(&hnf[1][1])?]],
                scale: format!("1/{den}"),
            },
        })
    }

    pub fn resolve(&self) -> CliResult<(QuadField, QuadIdeal)> {
        let field = QuadField::new(self.d_k)?;
        let scale = parse_rational(&self.ideal.scale)?;
        let ideal = field.ideal_from_hnf(self.ideal.hnf, &scale)?;
        Ok((field, ideal))
    }
}

/// Where the field and modulus come from.
#[derive(Clone, Debug, Default)]
pub struct FieldInput {
    pub example: Option<u32>,
    pub d: Option<i64>,
    /// `a,b,c` for the integral HNF `[[a, b], [0, c]]`.
    pub f_hnf: Option<String>,
    /// `q` for the modulus `q O`.
    pub f_rational: Option<String>,
    /// A JSON ideal literal.
    pub config: Option<PathBuf>,
}

pub struct Resolved {
    pub field: QuadField,
    pub modulus: QuadIdeal,
    pub bundle: Option<ExampleBundle>,
}

impl FieldInput {
    pub fn resolve(&self) -> CliResult<Resolved> {
        let sources = [self.example.is_some(), self.d.is_some(), self.config.is_some()];
        if sources.iter().filter(|&&s| s).count() != 1 {
            return Err(CliError::usage("give exactly one of --example, --d (with --f-hnf or --f-rational) or --config"));
        }
        if let Some(id) = self.example {
            if self.f_hnf.is_some() || self.f_rational.is_some() {
                return Err(CliError::usage("--example fixes the modulus"));
            }
            let bundle = ExampleBundle::builtin(id)?;
            let field = bundle.field()?;
            let modulus = bundle.modulus(&field)?;
            return Ok(Resolved { field, modulus, bundle: Some(bundle) });
        }
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path)?;
            let literal: IdealLiteral = serde_json::from_str(&text).map_err(|e| CliError { kind: "Parse".into(), message: e.to_string() })?;
            let (field, modulus) = literal.resolve()?;
            return integral(Resolved { field, modulus, bundle: None });
        }
        let field = QuadField::new(self.d.expect("checked above"))?;
        let modulus = match (&self.f_hnf, &self.f_rational) {
            (Some(h), None) => {
                let entries = h
                    .split(',')
                    .map(|x| x.trim().parse::<i64>().map_err(|_| CliError::usage(format!("bad HNF entry {x:?}"))))
                    .collect::<CliResult<Vec<_>>>()?;
                let [a, b, c] = entries[..] else { return Err(CliError::usage("--f-hnf takes a,b,c")) };
                field.ideal_from_hnf([[a, b], [0, c]], &BigRational::one())?
            }
            (None, Some(q)) => {
                let q = parse_rational(q)?;
                field.principal_ideal(&QuadElem::rational(q))?
            }
            _ => return Err(CliError::usage("give exactly one of --f-hnf or --f-rational")),
        };
        integral(Resolved { field, modulus, bundle: None })
    }
}

fn integral(r: Resolved) -> CliResult<Resolved> {
    if !r.modulus.is_integral() {
        return Err(stark_core::Error::NotIntegral.into());
    }
    Ok(r)
}

fn elem_strings(x: &QuadElem) -> [String; 2] {
    [x.a.to_string(), x.b.to_string()]
}

// ---------------------------------------------------------------------------
// fan

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FanClass {
    /// Exponent vector of the class in `Cl_f`; empty for the base pair.
    pub class: Vec<u64>,
    /// Coordinates `[a, b]` of `rho_t = a + b w`.
    pub rays: Vec<[String; 2]>,
    pub partial_quotients: Vec<String>,
    pub point_counts: Vec<usize>,
    pub skipped: Vec<usize>,
    pub unit: [String; 2],
}

impl FanClass {
    fn new(class: Vec<u64>, fan: &ConeFan) -> Self {
        FanClass {
            class,
            rays: fan.rays.iter().map(elem_strings).collect(),
            partial_quotients: fan.partial_quotients.iter().map(|b| b.to_string()).collect(),
            point_counts: fan.cones.iter().map(|c| c.points.len()).collect(),
            skipped: fan.skipped.clone(),
            unit: elem_strings(&fan.unit),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FanReport {
    pub modulus: IdealLiteral,
    pub fans: Vec<FanClass>,
}

impl Report for FanReport {
    fn text(&self) -> String {
        let mut s = String::new();
        for f in &self.fans {
            let rays: Vec<String> = f.rays.iter().map(|[a, b]| format!("{a} + {b}w")).collect();
            let _ = writeln!(s, "class {:?}: {} cones", f.class, f.point_counts.len());
            let _ = writeln!(s, "  rays: {}", rays.join(", "));
            let _ = writeln!(s, "  partial quotients: {}", f.partial_quotients.join(" "));
            let _ = writeln!(s, "  points per cone: {:?}", f.point_counts);
        }
        s
    }
}

/// The fan of the base pair, or of every class of `Cl_f` when `p` is given.
pub fn fan(input: &FieldInput, p: Option<u64>) -> CliResult<FanReport> {
    let r = input.resolve()?;
    let fans = match p {
        None => {
            let pair = base_pair(&r.field, &r.modulus)?;
            let eps = r.field.ray_unit_generator(&r.modulus);
            vec![FanClass::new(Vec::new(), &continued_fraction_fan(&r.field, &pair, &eps)?)]
        }
        Some(p) => {
            let setup = PhiSetup::new(&r.field, &r.modulus, p, 1)?;
            setup.jobs.iter().map(|j| FanClass::new(j.class.0.clone(), &j.fan)).collect()
        }
    };
    Ok(FanReport { modulus: IdealLiteral::from_ideal(&r.field, &r.modulus)?, fans })
}

// ---------------------------------------------------------------------------
// zeta

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ZetaMode {
    Exact,
    Padic,
}

/// `u + v sqrt(d)` with `u, v` in the power basis of `Q(zeta_f)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactValue {
    pub rational_part: Vec<String>,
    pub sqrt_d_part: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZetaReport {
    pub modulus: IdealLiteral,
    pub mode: ZetaMode,
    /// The point `m <= 0`, or `1` for the p-adic value at `s = 1`.
    pub s: i64,
    /// The prime removed from the Euler factor (`T_p` version), if any.
    pub p: Option<u64>,
    pub conductor: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<ExactValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub padic: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub embedding: Option<(u8, usize)>,
}

impl Report for ZetaReport {
    fn text(&self) -> String {
        match (&self.exact, &self.padic) {
            (Some(e), _) => {
                let show = |v: &[String]| if v.is_empty() { "0".to_string() } else { format!("[{}]", v.join(", ")) };
                format!("Z({}) = {} + {} sqrt({})\n", self.s, show(&e.rational_part), show(&e.sqrt_d_part), self.modulus.d_k)
            }
            (_, Some(x)) => format!("Z(1) = {x}\n"),
            _ => String::new(),
        }
    }
}

fn cyc_strings(x: &stark_core::cyclo::CycElem) -> Vec<String> {
    x.coefficients().iter().map(|q| q.to_string()).collect()
}

pub struct ZetaRequest {
    pub mode: ZetaMode,
    pub m: Option<i64>,
    pub s1: bool,
    pub p: Option<u64>,
    pub digits: u32,
    pub root_choice: u8,
    pub zeta_choice: usize,
}

/// The partial zeta function of the base pair summed over its fan:
/// exactly at `m <= 0` or p-adically at `s = 1`.
pub fn zeta(input: &FieldInput, req: &ZetaRequest) -> CliResult<ZetaReport> {
    let r = input.resolve()?;
    let field = &r.field;
    let pair = base_pair(field, &r.modulus)?;
    let eps = field.ray_unit_generator(&r.modulus);
    let fan = continued_fraction_fan(field, &pair, &eps)?;
    let modulus = IdealLiteral::from_ideal(field, &r.modulus)?;
    match req.mode {
        ZetaMode::Exact => {
            let m = match (req.m, req.s1) {
                (Some(m), false) if m <= 0 => m,
                _ => return Err(CliError::usage("exact mode needs --m <int <= 0>")),
            };
            let conductor = pair.conductor();
            if let Some(p) = req.p {
                if !stark_core::arith::is_prime_u64(p) {
                    return Err(stark_core::Error::BadPrime(p).into());
                }
                if !stark_core::charpairs::is_prime_to(&pair, p) {
                    return Err(stark_core::Error::HypothesisViolation(format!("I is not prime to p = {p}")).into());
                }
            }
            let value = exact_big_z(field, &pair, &fan, m, req.p, conductor)?;
            Ok(ZetaReport {
                modulus,
                mode: req.mode,
                s: m,
                p: req.p,
                conductor,
                exact: Some(ExactValue { rational_part: cyc_strings(&value.u), sqrt_d_part: cyc_strings(&value.v) }),
                padic: None,
                embedding: None,
            })
        }
        ZetaMode::Padic => {
            if !req.s1 || req.m.is_some() {
                return Err(CliError::usage("p-adic mode evaluates at s = 1: pass --s1"));
            }
            let p = req.p.ok_or_else(|| CliError::usage("p-adic mode needs --p"))?;
            let conductor = check_hypotheses(field, &r.modulus, p)?;
            let plan = precision_plan(p, req.digits);
            let ctx = PadicContext::from_plan(field, &plan, conductor, req.root_choice, req.zeta_choice)?;
            let z = padic_big_z_at_1(&ctx, &pair, &fan)?;
            let digits = ctx.zp().digits(z);
            Ok(ZetaReport {
                modulus,
                mode: req.mode,
                s: 1,
                p: Some(p),
                conductor,
                exact: None,
                padic: Some(format_digits(&digits[..req.digits as usize], p)),
                embedding: Some((req.root_choice, req.zeta_choice)),
            })
        }
    }
}

/// `N(I)^m sum_t z(m; xi, I, rho_{t-1}, rho_t)`.
fn exact_big_z(field: &QuadField, pair: &CharPair, fan: &ConeFan, m: i64, t_p: Option<u64>, conductor: u64) -> CliResult<CycQuad> {
    let degree = 2 * m.unsigned_abs() as usize;
    let ctx = ExactContext::new(field, conductor, degree);
    let ring = ctx.ring();
    let mut acc = ring.zero();
    for cone in &fan.cones {
        acc = ring.add(&acc, &exact_z_at_m(&ctx, pair, cone, m, t_p, 1)?);
    }
    let norm = pair.norm();
    let factor = if m == 0 { BigRational::one() } else { num_traits::pow(norm.recip(), m.unsigned_abs() as usize) };
    Ok(ring.scale(&acc, &factor))
}

// ---------------------------------------------------------------------------
// phi

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhiResult {
    pub root_choice: u8,
    pub zeta_choice: usize,
    /// Residues modulo `p^N`, one per group element.
    pub coefficients: Vec<String>,
    /// The same residues as digit strings.
    pub formatted: Vec<String>,
    /// Sum of group elements with equal coefficients grouped.
    pub rendered: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhiAssertion {
    pub expected: Vec<String>,
    /// Choices reproducing every digit.
    pub matched: Vec<(u8, usize)>,
    /// Choices reproducing every digit after relabelling the group.
    pub matched_after_relabelling: Vec<(u8, usize)>,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhiRow {
    pub p: u64,
    pub digits: u32,
    pub group: Vec<u64>,
    /// Group elements in coefficient order.
    pub elements: Vec<String>,
    pub results: Vec<PhiResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub assertion: Option<PhiAssertion>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhiReport {
    pub example: Option<u32>,
    pub modulus: IdealLiteral,
    pub rows: Vec<PhiRow>,
}

impl PhiReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.assertion.as_ref().is_none_or(|a| a.passed))
    }
}

impl Report for PhiReport {
    fn text(&self) -> String {
        let mut s = String::new();
        for row in &self.rows {
            for r in &row.results {
                let _ = writeln!(s, "p = {}, N = {}, embedding ({}, {}): {}", row.p, row.digits, r.root_choice, r.zeta_choice, r.rendered);
            }
            if let Some(a) = &row.assertion {
                let verdict = if a.passed { "match" } else { "MISMATCH" };
                let _ = writeln!(s, "p = {}: {verdict}; exact matches {:?}, after relabelling {:?}", row.p, a.matched, a.matched_after_relabelling);
            }
        }
        s
    }
}

fn phi_result(choice: EmbeddingChoice, digits: &GroupRingElem<Vec<u64>>, p: u64, n: u32) -> PhiResult {
    let cut = digits.map(|d| d[..d.len().min(n as usize)].to_vec());
    PhiResult {
        root_choice: choice.root_choice,
        zeta_choice: choice.zeta_choice,
        coefficients: cut.coefficients().iter().map(|d| digits_value(d, p).to_string()).collect(),
        formatted: cut.coefficients().iter().map(|d| format_digits(d, p)).collect(),
        rendered: cut.render(|d| format_digits(d, p)),
    }
}

pub struct PhiRequest {
    pub p: Option<u64>,
    pub digits: Option<u32>,
    pub root_choice: Option<u8>,
    pub zeta_choice: Option<usize>,
    pub assert: bool,
}

/// `Phi_{f,T_p,p}(1)` mod `p^N`; with `assert`, every admissible choice is
/// computed and compared with the example's published digits.
pub fn phi(input: &FieldInput, req: &PhiRequest) -> CliResult<PhiReport> {
    let r = input.resolve()?;
    if req.assert && r.bundle.is_none() {
        return Err(CliError::usage("--assert needs --example"));
    }
    let primes: Vec<u64> = match (req.p, &r.bundle) {
        (Some(p), _) => vec![p],
        (None, Some(b)) => b.padic.iter().map(|row| row.p).collect(),
        (None, None) => return Err(CliError::usage("--p is required without --example")),
    };
    let mut rows = Vec::new();
    for p in primes {
        let published = match &r.bundle {
            Some(b) => b.padic_digits(p)?,
            None => None,
        };
        let digits = match (req.digits, published) {
            (Some(n), Some(m)) if req.assert && n != m => {
                return Err(CliError::usage(format!("the published row for p = {p} has {m} digits; --assert compares at that precision")))
            }
            (Some(n), _) => n,
            (None, Some(m)) => m,
            (None, None) => return Err(CliError::usage("--digits is required")),
        };
        let setup = PhiSetup::new(&r.field, &r.modulus, p, digits)?;
        let group = setup.group.orders().to_vec();
        let elements = setup.group.elements().iter().map(|e| setup.group.name(e)).collect();
        let all = setup.embedding_choices();
        let choices: Vec<EmbeddingChoice> = if req.assert {
            all
        } else {
            let root = req.root_choice.unwrap_or(0);
            let zeta = req.zeta_choice.unwrap_or(0);
            let choice = EmbeddingChoice { root_choice: root, zeta_choice: zeta };
            if !all.contains(&choice) {
                return Err(CliError::usage(format!("embedding choice ({root}, {zeta}) is not admissible")));
            }
            vec![choice]
        };
        let computed = checks::compute_choices(&setup, &choices)?;
        let results = computed.iter().map(|(c, d)| phi_result(*c, d, p, digits)).collect();
        let assertion = match (&r.bundle, req.assert) {
            (Some(b), true) => {
                let expected =
                    b.expected_padic(p)?.ok_or_else(|| CliError::usage(format!("example {} has no row for p = {p}", b.id)))?;
                let rep = checks::matching(p, digits, computed, expected.clone(), Instant::now().elapsed(), setup)?;
                let pairs = |v: &[EmbeddingChoice]| v.iter().map(|c| (c.root_choice, c.zeta_choice)).collect::<Vec<_>>();
                Some(PhiAssertion {
                    expected: expected.coefficients().iter().map(|d| format_digits(d, p)).collect(),
                    passed: !rep.exact_matches.is_empty(),
                    matched: pairs(&rep.exact_matches),
                    matched_after_relabelling: pairs(&rep.relabelled_matches),
                })
            }
            _ => None,
        };
        rows.push(PhiRow { p, digits, group, elements, results, assertion });
    }
    Ok(PhiReport { example: r.bundle.as_ref().map(|b| b.id), modulus: IdealLiteral::from_ideal(&r.field, &r.modulus)?, rows })
}

// ---------------------------------------------------------------------------
// verify

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyRow {
    pub example: u32,
    /// Coefficients of the reconstructed element, one per group element.
    pub a: Vec<String>,
    pub rendered: String,
    /// Order of magnitude of the residual of the solve.
    pub residual: String,
    pub b: String,
    pub denominators_ok: bool,
    pub d_f: Option<String>,
    /// `lattice` (from unit data) or `index` (from the published index).
    pub d_f_source: Option<String>,
    pub d_f_ok: Option<bool>,
    pub index_eta_matches: Option<bool>,
    pub a_matches: bool,
    pub d_f_matches: bool,
    pub stable_under_truncation: Option<bool>,
    /// Set when the solve itself failed; the other fields are then empty.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl VerifyRow {
    fn failed(example: u32, error: String) -> Self {
        VerifyRow {
            example,
            a: Vec::new(),
            rendered: String::new(),
            residual: String::new(),
            b: String::new(),
            denominators_ok: false,
            d_f: None,
            d_f_source: None,
            d_f_ok: None,
            index_eta_matches: None,
            a_matches: false,
            d_f_matches: false,
            stable_under_truncation: None,
            error: Some(error),
        }
    }

    pub fn passed(&self) -> bool {
        self.error.is_none()
            && self.a_matches && self.d_f_matches && self.index_eta_matches != Some(false) && self.stable_under_truncation != Some(false)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub rows: Vec<VerifyRow>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(VerifyRow::passed)
    }
}

impl Report for VerifyReport {
    fn text(&self) -> String {
        let mut s = String::new();
        for r in &self.rows {
            if let Some(e) = &r.error {
                let _ = writeln!(s, "example {}: FAILED ({e})", r.example);
                continue;
            }
            let _ = writeln!(
                s,
                "example {}: A = {}  (residual ~{}, d_f = {} via {}) {}",
                r.example,
                r.rendered,
                r.residual,
                r.d_f.as_deref().unwrap_or("?"),
                r.d_f_source.as_deref().unwrap_or("-"),
                if r.passed() { "ok" } else { "MISMATCH" }
            );
        }
        s
    }
}

/// Solves for `A` and derives `d_f` for the given examples (all when empty).
pub fn verify(examples: &[u32], with_units: bool, truncate_to: Option<usize>) -> CliResult<VerifyReport> {
    let ids: Vec<u32> = if examples.is_empty() { (1..=15).collect() } else { examples.to_vec() };
    let rows = ids
        .par_iter()
        .map(|&id| -> CliResult<VerifyRow> {
            let bundle = ExampleBundle::builtin(id)?;
            let v = match checks::verify_example(&bundle, with_units, truncate_to) {
                Ok(v) => v,
                Err(e) => return Ok(VerifyRow::failed(id, e.to_string())),
            };
            let a = &v.report.solution.a;
            Ok(VerifyRow {
                example: id,
                a: a.coefficients().iter().map(|q| q.to_string()).collect(),
                rendered: a.render(|q| if q.is_negative() { format!("({q})") } else { q.to_string() }),
                residual: decimal_magnitude(&v.report.solution.residual),
                b: v.b.to_string(),
                denominators_ok: v.report.denominators_ok,
                d_f: v.report.d_f.as_ref().map(|d| d.to_string()),
                d_f_source: v.report.d_f_source.as_ref().map(|s| match s {
                    stark_core::verify::DfSource::Lattice(_) => "lattice".to_string(),
                    stark_core::verify::DfSource::PublishedIndex { .. } => "index".to_string(),
                }),
                d_f_ok: v.report.d_f_ok,
                index_eta_matches: v.index_matches,
                a_matches: v.a_matches,
                d_f_matches: v.d_f_matches,
                stable_under_truncation: v.stable_under_truncation,
                error: None,
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(VerifyReport { rows })
}

// ---------------------------------------------------------------------------
// cn and plan

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CnReport {
    pub p: u64,
    /// `c_1, ..., c_n`; numbers beyond 64 bits are written as strings.
    pub c: Vec<serde_json::Value>,
}

impl Report for CnReport {
    fn text(&self) -> String {
        let parts: Vec<String> = self.c.iter().map(|v| v.as_str().map(str::to_string).unwrap_or_else(|| v.to_string())).collect();
        format!("[{}]\n", parts.join(", "))
    }
}

pub fn cn(p: u64, n: usize) -> CliResult<CnReport> {
    if p < 3 || !stark_core::arith::is_prime_u64(p) {
        return Err(stark_core::Error::BadPrime(p).into());
    }
    let c = c_sequence(p, n)
        .into_iter()
        .map(|x| match x.to_i64() {
            Some(v) => serde_json::Value::from(v),
            None => serde_json::Value::from(x.to_string()),
        })
        .collect();
    Ok(CnReport { p, c })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanReport {
    pub p: u64,
    #[serde(rename = "N")]
    pub digits: u32,
    /// Series truncation.
    #[serde(rename = "M")]
    pub degree: usize,
    /// Working exponent.
    #[serde(rename = "W")]
    pub working: u32,
    /// Exponent for the binomial exponents.
    pub guard: u32,
}

impl Report for PlanReport {
    fn text(&self) -> String {
        format!("p = {}, N = {}: M = {}, W = {}, guard = {}\n", self.p, self.digits, self.degree, self.working, self.guard)
    }
}

pub fn plan(p: u64, digits: u32) -> CliResult<PlanReport> {
    if p < 3 || !stark_core::arith::is_prime_u64(p) {
        return Err(stark_core::Error::BadPrime(p).into());
    }
    if digits == 0 {
        return Err(CliError::usage("--digits must be positive"));
    }
    let plan = precision_plan(p, digits);
    Ok(PlanReport { p, digits, degree: plan.degree, working: plan.working, guard: plan.guard })
}

// ---------------------------------------------------------------------------
// selftest

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelftestLine {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelftestReport {
    pub lines: Vec<SelftestLine>,
    pub passed: bool,
}

impl Report for SelftestReport {
    fn text(&self) -> String {
        let mut s = String::new();
        for l in &self.lines {
            let _ = writeln!(s, "{}: {} — {}", l.name, if l.passed { "PASS" } else { "FAIL" }, l.detail);
        }
        s
    }
}

fn failures_line(name: &str, failures: Vec<String>, ok_detail: String) -> SelftestLine {
    SelftestLine {
        name: name.into(),
        passed: failures.is_empty(),
        detail: if failures.is_empty() { ok_detail } else { failures.join("; ") },
    }
}

fn randomized_line(name: &str, outcome: checks::RandomizedOutcome, min: usize) -> SelftestLine {
    SelftestLine {
        name: name.into(),
        passed: outcome.passed(min),
        detail: format!("{} trials, {} failures {}", outcome.trials, outcome.failures.len(), outcome.failures.join(" | ")).trim_end().to_string(),
    }
}

/// A fast version of the reproducibility checks: bundle round-trips and
/// consistency, group orders, the `c_n` identities, randomized fan/operator
/// /exact-value identities, the complex-side solve for every example and
/// one p-adic row.
pub fn selftest(seed: u64) -> CliResult<SelftestReport> {
    let mut lines = Vec::new();

    let mut bundle_failures = Vec::new();
    for b in ExampleBundle::all_builtin() {
        match ExampleBundle::from_json(&b.to_json()) {
            Ok(again) if again == b => {}
            _ => bundle_failures.push(format!("example {} does not round-trip", b.id)),
        }
        let table = b.character_table();
        let consistent = b
            .rank_data(&table)
            .and_then(|ranks| Ok(ranks.scaled_idempotent_above(&table, 2) == b.rational(&b.scaled_idempotent_above_two)?));
        if consistent != Ok(true) {
            bundle_failures.push(format!("example {}: ranks and scaled idempotent disagree", b.id));
        }
    }
    lines.push(failures_line("bundles", bundle_failures, "15 bundles round-trip and are consistent".into()));
    lines.push(failures_line("ray class groups", checks::group_structure_check(), "orders agree for all 15 examples".into()));
    lines.push(failures_line("c_n", checks::c_sequence_check(&[3, 5, 7, 11, 13], 100), "n <= 100".into()));

    let configs = checks::random_configurations(seed, 5, checks::DEFAULT_LIMITS);
    lines.push(randomized_line("fan additivity", checks::fan_additivity(&configs, 6), 5));
    lines.push(randomized_line("U F = F*", checks::u_f_identity(&configs[..3.min(configs.len())], 12, 6), 3));
    lines.push(randomized_line("exact values", checks::exact_value_checks(&configs[..3.min(configs.len())]), 3));

    let v = verify(&[], true, None)?;
    let failing: Vec<u32> = v.rows.iter().filter(|r| !r.passed()).map(|r| r.example).collect();
    let known: Vec<u32> = checks::KNOWN_DISCREPANCIES.iter().map(|k| k.example).collect();
    let unexpected: Vec<String> =
        failing.iter().filter(|id| !known.contains(id)).map(|id| format!("example {id} disagrees")).collect();
    let notes: Vec<String> = checks::KNOWN_DISCREPANCIES
        .iter()
        .map(|k| format!("example {}: {} ({})", k.example, k.reason, if failing.contains(&k.example) { "still differs" } else { "now agrees" }))
        .collect();
    lines.push(failures_line(
        "complex side",
        unexpected,
        format!("A and d_f agree for {} of 15 examples; known input conflicts: {}", 15 - failing.len(), notes.join("; ")),
    ));

    let row = phi(
        &FieldInput { example: Some(1), ..Default::default() },
        &PhiRequest { p: Some(3), digits: None, root_choice: None, zeta_choice: None, assert: true },
    )?;
    lines.push(SelftestLine {
        name: "p-adic row".into(),
        passed: row.passed(),
        detail: "example 1, p = 3".into(),
    });

    let passed = lines.iter().all(|l| l.passed);
    Ok(SelftestReport { lines, passed })
}

/// Parses a report back from its JSON.
pub fn reingest<T: Report>(json: &str) -> CliResult<T> {
    serde_json::from_str(json).map_err(|e| CliError { kind: "Parse".into(), message: e.to_string() })
}

//! Example bundles: field and modulus data, group structure, unit data and
//! published numerics for the fifteen worked examples, embedded at build
//! time and parsed into core types.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use stark_core::arith;
use stark_core::modp::parse_digits;
use stark_core::phi::{FiniteAbelianGroup, GroupRingElem};
use stark_core::quadfield::{QuadField, QuadIdeal};
use stark_core::verify::{
    CharacterTable, ConjectureInputs, DecimalGroupRing, IsotypicBlock, RankData, RationalGroupRing, UnitModule,
};
use stark_core::{Error, Result};

const BUILTIN: [&str; 15] = [
    include_str!("../data/example01.json"),
    include_str!("../data/example02.json"),
    include_str!("../data/example03.json"),
    include_str!("../data/example04.json"),
    include_str!("../data/example05.json"),
    include_str!("../data/example06.json"),
    include_str!("../data/example07.json"),
    include_str!("../data/example08.json"),
    include_str!("../data/example09.json"),
    include_str!("../data/example10.json"),
    include_str!("../data/example11.json"),
    include_str!("../data/example12.json"),
    include_str!("../data/example13.json"),
    include_str!("../data/example14.json"),
    include_str!("../data/example15.json"),
];

/// `coefficient * (sum of elements)` in a group ring.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    pub coefficient: String,
    pub elements: Vec<Vec<u64>>,
}

/// `q^exponent` for the `index`-th prime above `above` in HNF order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeFactor {
    pub above: u64,
    #[serde(default)]
    pub index: usize,
    pub exponent: u32,
}

/// `integer * prod primes`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModulusSpec {
    pub integer: u64,
    pub primes: Vec<PrimeFactor>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankClass {
    /// Exponent vectors of the complex characters in one rational class.
    pub members: Vec<Vec<u64>>,
    pub rank: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockSpec {
    pub members: Vec<Vec<u64>>,
    pub sigma: Vec<u64>,
    pub vectors: Vec<Vec<i64>>,
}

/// The S-units modulo torsion: group action on a Z-basis, an isotypic
/// basis of the rational span and the wedge generator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitSpec {
    /// Per generator, entry `(m, l)` is the coefficient of `u_m` in `g(u_l)`.
    pub actions: Vec<Vec<Vec<i64>>>,
    pub blocks: Vec<BlockSpec>,
    pub gamma: Vec<[Vec<i64>; 2]>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PadicRow {
    pub p: u64,
    pub phi: Vec<Term>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExampleBundle {
    pub id: u32,
    pub d_k: i64,
    pub class_number: u64,
    pub modulus: ModulusSpec,
    pub group: Vec<u64>,
    pub ranks: Vec<RankClass>,
    /// `g * (sum of idempotents of rank > 2 classes)`.
    pub scaled_idempotent_above_two: Vec<Term>,
    /// Index of `Z[G] gamma` in the `[S,2]` wedge lattice.
    pub b: String,
    pub prime_power_modulus: bool,
    /// The normalized regulator of `gamma`, as decimals.
    pub regulator: Vec<Term>,
    /// The complex value at `s = 1`, as decimals.
    pub phi_real: Vec<Term>,
    pub expected_a: Vec<Term>,
    pub expected_d_f: u64,
    pub expected_index_eta: String,
    pub expected_d_sigma_minus_one: Vec<u64>,
    pub padic: Vec<PadicRow>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub units: Option<UnitSpec>,
}

fn parse_int(s: &str) -> Result<BigInt> {
    s.parse().map_err(|_| Error::Parse(format!("bad integer {s:?}")))
}

/// Parses `n`, `n/d` or a decimal.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    if let Some((n, d)) = s.split_once('/') {
        let d = parse_int(d.trim())?;
        if d == BigInt::from(0) {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(BigRational::new(parse_int(n.trim())?, d));
    }
    arith::parse_decimal(s).ok_or_else(|| Error::Parse(format!("bad number {s:?}")))
}

/// Expands terms into one value per group element; unlisted elements get `zero`.
pub fn expand_terms<T: Clone>(
    group: &FiniteAbelianGroup,
    terms: &[Term],
    zero: T,
    parse: impl Fn(&str) -> Result<T>,
) -> Result<GroupRingElem<T>> {
    let mut out = GroupRingElem::constant(group.clone(), zero.clone(), zero);
    let mut seen = vec![false; group.order()];
    for t in terms {
        let c = parse(&t.coefficient)?;
        for e in &t.elements {
            if e.len() != group.orders().len() || e.iter().zip(group.orders()).any(|(x, n)| x >= n) {
                return Err(Error::Parse(format!("{e:?} is not an element of {:?}", group.orders())));
            }
            let i = group.index_of(e);
            if seen[i] {
                return Err(Error::Parse(format!("element {e:?} listed twice")));
            }
            seen[i] = true;
            out.set(e, c.clone());
        }
    }
    Ok(out)
}

impl ExampleBundle {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("bundles serialize")
    }

    pub fn builtin(id: u32) -> Result<Self> {
        let text = BUILTIN.get((id as usize).wrapping_sub(1)).ok_or_else(|| Error::Parse(format!("no example {id}")))?;
        Self::from_json(text)
    }

    pub fn all_builtin() -> Vec<Self> {
        (1..=BUILTIN.len() as u32).map(|i| Self::builtin(i).expect("embedded bundles parse")).collect()
    }

    pub fn field(&self) -> Result<QuadField> {
        QuadField::new(self.d_k)
    }

    pub fn modulus(&self, field: &QuadField) -> Result<QuadIdeal> {
        modulus_from_spec(field, &self.modulus)
    }

    pub fn group(&self) -> FiniteAbelianGroup {
        FiniteAbelianGroup::new(&self.group)
    }

    pub fn character_table(&self) -> CharacterTable {
        CharacterTable::new(&self.group())
    }

    pub fn rank_data(&self, table: &CharacterTable) -> Result<RankData> {
        let mut ranks = vec![0u32; table.classes().len()];
        for rc in &self.ranks {
            ranks[table.class_of_members(&rc.members)?] = rc.rank;
        }
        RankData::new(table, ranks)
    }

    pub fn rational(&self, terms: &[Term]) -> Result<RationalGroupRing> {
        expand_terms(&self.group(), terms, BigRational::from_integer(0.into()), parse_rational)
    }

    pub fn decimal(&self, terms: &[Term]) -> Result<DecimalGroupRing> {
        let value = self.rational(terms)?;
        let digits = terms.iter().map(|t| arith::decimal_places(&t.coefficient)).min().unwrap_or(0);
        Ok(DecimalGroupRing { value, digits })
    }

    pub fn unit_module(&self, table: &CharacterTable) -> Result<Option<(UnitModule, Vec<(Vec<BigInt>, Vec<BigInt>)>)>> {
        let Some(u) = &self.units else { return Ok(None) };
        let big = |v: &[i64]| v.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>();
        let actions = u.actions.iter().map(|m| m.iter().map(|r| big(r)).collect()).collect();
        let mut blocks = Vec::new();
        for b in &u.blocks {
            blocks.push(IsotypicBlock {
                class: table.class_of_members(&b.members)?,
                sigma: b.sigma.clone(),
                vectors: b.vectors.iter().map(|v| big(v)).collect(),
            });
        }
        let module = UnitModule::new(table, actions, blocks)?;
        let gamma = u.gamma.iter().map(|[a, b]| (big(a), big(b))).collect();
        Ok(Some((module, gamma)))
    }

    /// Inputs for the complex-side check; `with_units` selects the lattice
    /// route for `d_f` when unit data are present.
    pub fn conjecture_inputs(&self, with_units: bool) -> Result<ConjectureInputs> {
        let table = self.character_table();
        let ranks = self.rank_data(&table)?;
        let units = if with_units { self.unit_module(&table)? } else { None };
        let published_index = if units.is_none() { Some(parse_int(&self.expected_index_eta)?) } else { None };
        Ok(ConjectureInputs {
            rgamma: self.decimal(&self.regulator)?,
            phi0: self.decimal(&self.phi_real)?,
            b: parse_int(&self.b)?,
            prime_power_modulus: self.prime_power_modulus,
            denominator_exponent: 3,
            units,
            published_index,
            table,
            ranks,
        })
    }

    /// The published p-adic coefficients as `(digits, p)` per group element.
    pub fn expected_padic(&self, p: u64) -> Result<Option<GroupRingElem<Vec<u64>>>> {
        let Some(row) = self.padic.iter().find(|r| r.p == p) else { return Ok(None) };
        let parsed = expand_terms(&self.group(), &row.phi, Vec::new(), |s| {
            let (digits, q) = parse_digits(s)?;
            if q != p {
                return Err(Error::Parse(format!("{s:?} is not written in base {p}")));
            }
            Ok(digits)
        })?;
        if parsed.coefficients().iter().any(|c| c.is_empty()) {
            return Err(Error::Parse(format!("p = {p}: some group element has no coefficient")));
        }
        Ok(Some(parsed))
    }

    /// `N` as printed: the shortest digit string for `p`.
    pub fn padic_digits(&self, p: u64) -> Result<Option<u32>> {
        Ok(self.expected_padic(p)?.map(|e| e.coefficients().iter().map(|c| c.len()).min().unwrap_or(0) as u32))
    }
}

pub fn modulus_from_spec(field: &QuadField, spec: &ModulusSpec) -> Result<QuadIdeal> {
    if spec.integer == 0 {
        return Err(Error::ZeroIdeal);
    }
    let mut f = field.principal_ideal(&stark_core::quadfield::QuadElem::from_ints(spec.integer as i64, 0))?;
    for q in &spec.primes {
        let primes = field.primes_above(q.above);
        let prime = primes
            .get(q.index)
            .ok_or_else(|| Error::Parse(format!("there are only {} primes above {}", primes.len(), q.above)))?;
        f = field.ideal_mul(&f, &field.ideal_pow(prime, q.exponent as u64));
    }
    Ok(f)
}

/// Number of distinct prime ideals dividing an integral ideal.
pub fn distinct_prime_divisors(field: &QuadField, f: &QuadIdeal) -> usize {
    let n = f.norm().to_integer();
    let mut count = 0;
    for (l, _) in arith::factor_bigint(&n) {
        for q in field.primes_above(l) {
            if field.ideal_div(f, &q).is_integral() {
                count += 1;
            }
        }
    }
    count
}

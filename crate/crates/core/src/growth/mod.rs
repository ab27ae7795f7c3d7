//! Structured specifications of quasi-semisimple profinite groups and the
//! growth quantities computed from them.
//!
//! A [`GroupSpec`] is a finite union of strata. Each stratum is either an
//! explicit finite list of factors or an infinite family indexed by field
//! sizes `q^j` or by primes, with multiplicities given by an exponent rule.
//! The diagonal stratum is the unexpanded tail of a growing-rank
//! construction and only carries its rate.

mod compare;
mod rates;
mod zeta;

pub use compare::{
    cover_mn_comparison, sim_c_check, CoverComparison, RegimeCheck, SimCheckReport, SimPoint,
};
pub use rates::{exact_abscissa, prg_verdict, Abscissa, PrgVerdict, RateSummary, StratumRate};
pub use zeta::{
    empirical_slope, m_n, truncated_zeta, truncated_zeta_with, SlopeReport, SlopeRow, TruncatedZeta,
    ZetaOptions,
};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::arith::{big_pow, is_prime, prime_power};
use crate::char_tables::DegreeTable;
use crate::constructor::Schedule;
use crate::dirichlet::{DirichletSeries, Multiplicity};
use crate::error::{Error, Result};
use crate::lie::{model_xi, validate_pair_set, Family, LieType, PairSet};
use crate::rational::{self, serde_rational, Rational};

/// Whether a factor stands for the simple group `S(q)` or for its universal
/// cover `L(q)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flag {
    #[default]
    Simple,
    Cover,
}

fn default_a1() -> LieType {
    LieType::a1()
}

fn is_default_a1(t: &LieType) -> bool {
    *t == LieType::a1()
}

fn is_default_flag(f: &Flag) -> bool {
    *f == Flag::Simple
}

fn one_multiplicity() -> Multiplicity {
    Multiplicity::one()
}

fn is_one(m: &Multiplicity) -> bool {
    m.to_biguint().is_one()
}

fn default_j_start() -> u64 {
    1
}

fn is_j_start_default(j: &u64) -> bool {
    *j == 1
}

/// One quasi-simple factor `S_lambda(q)` (or its cover) with a multiplicity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorSpec {
    #[serde(default = "default_a1", skip_serializing_if = "is_default_a1")]
    pub lie_type: LieType,
    pub q: u64,
    #[serde(default, skip_serializing_if = "is_default_flag")]
    pub flag: Flag,
    #[serde(default = "one_multiplicity", skip_serializing_if = "is_one")]
    pub multiplicity: Multiplicity,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairs: Option<PairSet>,
}

impl FactorSpec {
    pub fn new(lie_type: LieType, q: u64, flag: Flag, multiplicity: Multiplicity) -> Self {
        FactorSpec {
            lie_type,
            q,
            flag,
            multiplicity,
            pairs: None,
        }
    }

    pub fn a1(q: u64, flag: Flag) -> Self {
        FactorSpec::new(LieType::a1(), q, flag, Multiplicity::one())
    }
}

/// Exponent laws `f(j)` other than the balanced schedule.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ExponentLaw {
    /// `f(j) = floor(slope * j)`.
    Linear {
        #[serde(with = "serde_rational")]
        slope: Rational,
    },
    /// `f(j) = j^degree`.
    Polynomial { degree: u32 },
}

/// Factors `S_lambda(q^j)^(q^f(j))` for `j >= j_start`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeometricStratum {
    pub q: u64,
    #[serde(default = "default_a1")]
    pub lie_type: LieType,
    #[serde(default)]
    pub flag: Flag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairs: Option<PairSet>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<Schedule>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exponent: Option<ExponentLaw>,
    #[serde(default = "default_j_start", skip_serializing_if = "is_j_start_default")]
    pub j_start: u64,
}

impl GeometricStratum {
    /// `f(j)`, or `None` when it does not fit a machine word.
    pub fn f(&self, j: u64) -> Option<u64> {
        if let Some(s) = &self.schedule {
            return Some(s.f(j));
        }
        match &self.exponent {
            Some(ExponentLaw::Linear { slope }) => {
                rational::floor(&(slope * Rational::from_integer(j.into()))).to_u64()
            }
            Some(ExponentLaw::Polynomial { degree }) => j.checked_pow(*degree),
            None => Some(0),
        }
    }
}

/// Multiplicity of the factor over the prime `p` in a prime-indexed stratum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PrimeMultiplicity {
    /// `p^e`.
    PowerOfP(u32),
    /// `((p^3 - p)/2)^k`, growing like `p^(3k)`.
    Psl2OrderPower(u32),
}

impl PrimeMultiplicity {
    /// Growth exponent `e` with multiplicity `Theta(p^e)`.
    pub fn rate_exponent(self) -> u64 {
        match self {
            PrimeMultiplicity::PowerOfP(e) => e as u64,
            PrimeMultiplicity::Psl2OrderPower(k) => 3 * k as u64,
        }
    }

    pub fn at(self, p: u64) -> Multiplicity {
        match self {
            PrimeMultiplicity::PowerOfP(e) => Multiplicity::power(p, e as u64),
            PrimeMultiplicity::Psl2OrderPower(k) => {
                let p = BigUint::from(p);
                let base = (&p * &p * &p - &p) / 2u32;
                Multiplicity::Int(num_traits::pow(base, k as usize))
            }
        }
    }
}

/// Factors `S_lambda(p)^(mult(p))` over all primes `p >= p_min`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PrimesRepr", into = "PrimesRepr")]
pub struct PrimesStratum {
    pub p_min: u64,
    pub lie_type: LieType,
    pub flag: Flag,
    pub multiplicity: PrimeMultiplicity,
    pub pairs: Option<PairSet>,
}

#[derive(Serialize, Deserialize)]
struct PrimesRepr {
    p_min: u64,
    #[serde(default = "default_a1", skip_serializing_if = "is_default_a1")]
    lie_type: LieType,
    #[serde(default, skip_serializing_if = "is_default_flag")]
    flag: Flag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rate_exponent: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    psl2_order_power: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pairs: Option<PairSet>,
}

impl TryFrom<PrimesRepr> for PrimesStratum {
    type Error = String;
    fn try_from(r: PrimesRepr) -> std::result::Result<Self, String> {
        let multiplicity = match (r.rate_exponent, r.psl2_order_power) {
            (Some(e), None) => PrimeMultiplicity::PowerOfP(e),
            (None, Some(k)) => PrimeMultiplicity::Psl2OrderPower(k),
            (None, None) => PrimeMultiplicity::PowerOfP(0),
            (Some(_), Some(_)) => {
                return Err("give at most one of rate_exponent and psl2_order_power".into())
            }
        };
        Ok(PrimesStratum {
            p_min: r.p_min,
            lie_type: r.lie_type,
            flag: r.flag,
            multiplicity,
            pairs: r.pairs,
        })
    }
}

impl From<PrimesStratum> for PrimesRepr {
    fn from(s: PrimesStratum) -> Self {
        let (rate_exponent, psl2_order_power) = match s.multiplicity {
            PrimeMultiplicity::PowerOfP(e) => (Some(e), None),
            PrimeMultiplicity::Psl2OrderPower(k) => (None, Some(k)),
        };
        PrimesRepr {
            p_min: s.p_min,
            lie_type: s.lie_type,
            flag: s.flag,
            rate_exponent,
            psl2_order_power,
            pairs: s.pairs,
        }
    }
}

/// Unexpanded tail of a growing-rank construction: stage `m` targets
/// `rho - gap/m` with Lie type `family` of rank `m + rank_offset` over `p`.
/// Every factor of the tail has minimal dimension above `certified_below`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagonalRule {
    #[serde(with = "serde_rational")]
    pub rho: Rational,
    #[serde(with = "serde_rational")]
    pub gap: Rational,
    pub family: Family,
    pub rank_offset: u32,
    pub p: u64,
    pub first_stage: u32,
    #[serde(with = "crate::growth::serde_big")]
    pub certified_below: BigUint,
}

impl DiagonalRule {
    pub fn stage_rho(&self, m: u32) -> Rational {
        &self.rho - &self.gap / Rational::from_integer(m.into())
    }

    pub fn stage_type(&self, m: u32) -> Result<LieType> {
        LieType::untwisted(self.family, m + self.rank_offset)
    }

    fn validate(&self) -> std::result::Result<(), String> {
        if !rational::is_positive(&self.gap) {
            return Err("gap must be positive so that the stage targets increase".into());
        }
        if self.first_stage == 0 {
            return Err("stages are numbered from 1".into());
        }
        if !is_prime(self.p) {
            return Err(format!("{} is not prime", self.p));
        }
        if matches!(self.family, Family::E6 | Family::E7 | Family::E8 | Family::F4 | Family::G2) {
            return Err("the diagonal tail needs a family of unbounded rank".into());
        }
        let m = self.first_stage;
        let t = self.stage_type(m).map_err(|e| e.to_string())?;
        let rho_m = self.stage_rho(m);
        // rho0 decreases with the rank while the targets increase
        if rho_m <= t.rho0() {
            return Err(format!(
                "stage {m} target {} does not exceed rho0({t}) = {}",
                rational::format_rational(&rho_m),
                rational::format_rational(&t.rho0())
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "index", rename_all = "lowercase")]
pub enum Stratum {
    Finite { factors: Vec<FactorSpec> },
    Geometric(GeometricStratum),
    Primes(PrimesStratum),
    Diagonal(DiagonalRule),
}

impl Stratum {
    pub fn kind(&self) -> &'static str {
        match self {
            Stratum::Finite { .. } => "finite",
            Stratum::Geometric(_) => "geometric",
            Stratum::Primes(_) => "primes",
            Stratum::Diagonal(_) => "diagonal",
        }
    }

    pub fn is_infinite(&self) -> bool {
        !matches!(self, Stratum::Finite { .. })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupSpec {
    pub strata: Vec<Stratum>,
}

impl GroupSpec {
    pub fn new(strata: Vec<Stratum>) -> Result<Self> {
        let s = GroupSpec { strata };
        s.validate()?;
        Ok(s)
    }

    pub fn finite(factors: Vec<FactorSpec>) -> Result<Self> {
        GroupSpec::new(vec![Stratum::Finite { factors }])
    }

    /// `prod_{p >= 5} SL2(p)^(((p^3 - p)/2)^(d - 2))`, the standard family
    /// with `d`-generated direct powers.
    pub fn sl2_primes(d: u32) -> Result<Self> {
        if d < 2 {
            return Err(Error::precondition("the family needs d >= 2"));
        }
        GroupSpec::new(vec![Stratum::Primes(PrimesStratum {
            p_min: 5,
            lie_type: LieType::a1(),
            flag: Flag::Cover,
            multiplicity: PrimeMultiplicity::Psl2OrderPower(d - 2),
            pairs: None,
        })])
    }

    /// Cartesian product: strata are concatenated.
    pub fn union(&self, other: &GroupSpec) -> GroupSpec {
        let mut strata = self.strata.clone();
        strata.extend(other.strata.iter().cloned());
        GroupSpec { strata }
    }

    /// The same spec with every flag replaced by `flag`.
    pub fn with_flag(&self, flag: Flag) -> GroupSpec {
        let strata = self
            .strata
            .iter()
            .map(|s| match s {
                Stratum::Finite { factors } => Stratum::Finite {
                    factors: factors
                        .iter()
                        .map(|f| FactorSpec { flag, ..f.clone() })
                        .collect(),
                },
                Stratum::Geometric(g) => Stratum::Geometric(GeometricStratum { flag, ..g.clone() }),
                Stratum::Primes(p) => Stratum::Primes(PrimesStratum { flag, ..p.clone() }),
                Stratum::Diagonal(d) => Stratum::Diagonal(d.clone()),
            })
            .collect();
        GroupSpec { strata }
    }

    pub fn is_finite(&self) -> bool {
        self.strata.iter().all(|s| !s.is_infinite())
    }

    /// Semantic checks; errors carry JSON pointers into the spec.
    pub fn validate(&self) -> Result<()> {
        for (i, s) in self.strata.iter().enumerate() {
            let at = |field: &str| format!("/strata/{i}{field}");
            match s {
                Stratum::Finite { factors } => {
                    for (k, f) in factors.iter().enumerate() {
                        let base = format!("/factors/{k}");
                        check_factor_field(&f.lie_type, f.q)
                            .map_err(|m| Error::parse(at(&format!("{base}/q")), m))?;
                        if f.multiplicity.is_zero() {
                            return Err(Error::parse(
                                at(&format!("{base}/multiplicity")),
                                "multiplicity must be at least 1",
                            ));
                        }
                        check_pairs(&f.pairs, &f.lie_type)
                            .map_err(|m| Error::parse(at(&format!("{base}/pairs")), m))?;
                    }
                }
                Stratum::Geometric(g) => {
                    if g.q < 2 || prime_power(g.q).is_none() {
                        return Err(Error::parse(at("/q"), format!("{} is not a prime power", g.q)));
                    }
                    if g.j_start == 0 {
                        return Err(Error::parse(at("/j_start"), "indices start at 1"));
                    }
                    check_pairs(&g.pairs, &g.lie_type).map_err(|m| Error::parse(at("/pairs"), m))?;
                    match (&g.schedule, &g.exponent) {
                        (Some(_), Some(_)) => {
                            return Err(Error::parse(at(""), "give either schedule or exponent, not both"))
                        }
                        (None, None) => {
                            return Err(Error::parse(at(""), "a geometric stratum needs a schedule or an exponent law"))
                        }
                        (None, Some(ExponentLaw::Linear { slope })) if slope < &Rational::from_integer(0.into()) => {
                            return Err(Error::parse(at("/exponent/slope"), "slope must be nonnegative"))
                        }
                        _ => {}
                    }
                }
                Stratum::Primes(p) => {
                    if p.lie_type.is_a1() && p.p_min < 5 {
                        return Err(Error::parse(
                            at("/p_min"),
                            "A1 over primes must start at p >= 5: SL2(2) and SL2(3) are Tits exceptions",
                        ));
                    }
                    if p.p_min < 2 {
                        return Err(Error::parse(at("/p_min"), "p_min must be at least 2"));
                    }
                    check_pairs(&p.pairs, &p.lie_type).map_err(|m| Error::parse(at("/pairs"), m))?;
                }
                Stratum::Diagonal(d) => d.validate().map_err(|m| Error::parse(at(""), m))?,
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("group specs serialize")
    }

    /// Parses and validates; schema errors carry a JSON pointer.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let spec: GroupSpec = serde_path_to_error::deserialize(de).map_err(|e| {
            let pointer = json_pointer(e.path());
            Error::parse(pointer, e.inner().to_string())
        })?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        GroupSpec::from_json_str(&v.to_string())
    }
}

fn json_pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        match seg {
            Segment::Seq { index } => out.push_str(&format!("/{index}")),
            Segment::Map { key } => out.push_str(&format!("/{}", key.replace('~', "~0").replace('/', "~1"))),
            Segment::Enum { variant } => out.push_str(&format!("/{variant}")),
            Segment::Unknown => out.push_str("/?"),
        }
    }
    out
}

fn check_factor_field(t: &LieType, q: u64) -> std::result::Result<(), String> {
    if q < 2 || prime_power(q).is_none() {
        return Err(format!("{q} is not a prime power"));
    }
    if t.is_tits_exception(q) {
        return Err(format!(
            "{t}({q}) is a Tits exception (SL2(2), SL2(3), 2A2(2), B2(2), G2(2) are not quasi-simple)"
        ));
    }
    Ok(())
}

fn check_pairs(pairs: &Option<PairSet>, t: &LieType) -> std::result::Result<(), String> {
    let Some(a) = pairs else { return Ok(()) };
    if a.is_empty() {
        return Err("pair sets must be nonempty".into());
    }
    let violations = validate_pair_set(a, t);
    if violations.is_empty() {
        return Ok(());
    }
    let list: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
    Err(format!("pair set invalid for {t}: {}", list.join("; ")))
}

/// A single concrete factor produced by expanding a stratum.
#[derive(Clone, Debug)]
pub(crate) struct Member {
    pub lie_type: LieType,
    pub q: BigUint,
    pub flag: Flag,
    pub multiplicity: Multiplicity,
    pub pairs: PairSet,
}

impl From<&FactorSpec> for Member {
    fn from(f: &FactorSpec) -> Self {
        Member {
            lie_type: f.lie_type,
            q: BigUint::from(f.q),
            flag: f.flag,
            multiplicity: f.multiplicity.clone(),
            pairs: f.pairs.clone().unwrap_or_else(|| f.lie_type.canonical_pairs()),
        }
    }
}

impl Member {
    pub fn min_dimension(&self) -> BigUint {
        if self.lie_type.is_a1() {
            a1_min_degree(&self.q, self.flag == Flag::Cover)
        } else {
            let n = self.pairs.min_n().expect("pair sets are nonempty");
            num_traits::pow(self.q.clone(), n as usize)
        }
    }

    /// The factor's own zeta function (no multiplicity), truncated at `n`.
    pub fn base_series(&self, n: &BigUint) -> Result<DirichletSeries> {
        if self.lie_type.is_a1() {
            let q = self
                .q
                .to_u64()
                .ok_or_else(|| Error::Range(format!("field size {} too large for a table", self.q)))?;
            let table = match self.flag {
                Flag::Cover => DegreeTable::sl2(q)?,
                Flag::Simple => DegreeTable::psl2(q)?,
            };
            table.zeta_series(n)
        } else {
            Ok(model_xi(&self.pairs, &self.q, n)?.plus_one())
        }
    }

    /// The factor's complete zeta function.
    pub fn full_series(&self) -> Result<DirichletSeries> {
        let cutoff = if self.lie_type.is_a1() {
            &self.q + 1u32
        } else {
            let n = self.pairs.iter().map(|p| p.1).max().unwrap_or(1);
            num_traits::pow(self.q.clone(), n as usize)
        };
        self.base_series(&cutoff)
    }

    /// `ln zeta(sigma)` of one copy, via `ln(1 + (zeta - 1))` to keep
    /// precision when the nontrivial part is tiny.
    pub fn ln_zeta(&self, sigma: f64) -> Result<f64> {
        Ok(self.full_series()?.minus_one()?.evaluate(sigma)?.ln_1p())
    }
}

/// Smallest nontrivial degree of `SL2(q)` (cover) or `PSL2(q)`.
pub(crate) fn a1_min_degree(q: &BigUint, cover: bool) -> BigUint {
    let one = BigUint::one();
    let two = BigUint::from(2u32);
    let four = BigUint::from(4u32);
    if (q % &two).is_zero() {
        q - &one
    } else if cover || q % &four == BigUint::from(3u32) {
        (q - &one) / &two
    } else {
        (q + &one) / &two
    }
}

/// Expansion of a stratum into members with minimal dimension `<= limit`.
pub(crate) struct Expansion {
    pub members: Vec<Member>,
    /// `false` when the horizon stopped the expansion early.
    pub complete: bool,
}

pub(crate) fn expand(stratum: &Stratum, limit: &BigUint, horizon: u64) -> Result<Expansion> {
    match stratum {
        Stratum::Finite { factors } => {
            let members = factors
                .iter()
                .map(Member::from)
                .filter(|m| &m.min_dimension() <= limit)
                .collect();
            Ok(Expansion {
                members,
                complete: true,
            })
        }
        Stratum::Geometric(g) => {
            let pairs = g.pairs.clone().unwrap_or_else(|| g.lie_type.canonical_pairs());
            let mut members = Vec::new();
            let mut j = g.j_start;
            loop {
                let q = big_pow(g.q, j);
                let excluded = q.to_u64().is_some_and(|q| g.lie_type.is_tits_exception(q));
                let member = Member {
                    lie_type: g.lie_type,
                    q,
                    flag: g.flag,
                    multiplicity: Multiplicity::one(),
                    pairs: pairs.clone(),
                };
                if &member.min_dimension() > limit {
                    return Ok(Expansion {
                        members,
                        complete: true,
                    });
                }
                if j > horizon {
                    return Ok(Expansion {
                        members,
                        complete: false,
                    });
                }
                if !excluded {
                    let f = g.f(j).ok_or_else(|| {
                        Error::Range(format!("exponent f({j}) does not fit in 64 bits"))
                    })?;
                    members.push(Member {
                        multiplicity: Multiplicity::power(g.q, f),
                        ..member
                    });
                }
                j += 1;
            }
        }
        Stratum::Primes(s) => {
            let pairs = s.pairs.clone().unwrap_or_else(|| s.lie_type.canonical_pairs());
            let mut members = Vec::new();
            let mut p = s.p_min;
            let mut taken = 0u64;
            loop {
                while !is_prime(p) {
                    p += 1;
                }
                let member = Member {
                    lie_type: s.lie_type,
                    q: BigUint::from(p),
                    flag: s.flag,
                    multiplicity: s.multiplicity.at(p),
                    pairs: pairs.clone(),
                };
                // (p - 1)/2 bounds the A1 minimal degree from below and is
                // nondecreasing, so it is a safe stopping rule
                let lower = if s.lie_type.is_a1() {
                    BigUint::from((p - 1) / 2)
                } else {
                    member.min_dimension()
                };
                if &lower > limit {
                    return Ok(Expansion {
                        members,
                        complete: true,
                    });
                }
                if taken >= horizon {
                    return Ok(Expansion {
                        members,
                        complete: false,
                    });
                }
                taken += 1;
                if !s.lie_type.is_tits_exception(p) && &member.min_dimension() <= limit {
                    members.push(member);
                }
                p += 1;
            }
        }
        Stratum::Diagonal(d) => Ok(Expansion {
            members: Vec::new(),
            complete: limit <= &d.certified_below,
        }),
    }
}

/// Serde helpers for big integers written as decimal strings.
pub(crate) mod serde_big {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(n: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&n.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(u64),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(n) => Ok(BigUint::from(n)),
            Repr::Text(t) => t
                .trim()
                .parse()
                .map_err(|_| serde::de::Error::custom(format!("bad integer {t:?}"))),
        }
    }
}

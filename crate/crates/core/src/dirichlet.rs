//! Truncated Dirichlet series `sum_n r_n n^{-s}` with dimensions bounded by a
//! cutoff `N`.
//!
//! Two coefficient backends exist and are never mixed inside one series:
//! [`Backend::Exact`] keeps arbitrary-precision integer multiplicities, while
//! [`Backend::LogDomain`] keeps natural logarithms of multiplicities so that
//! counts such as `C(5^40, 3)` stay representable. Dimensions are always exact
//! integers and entries are kept sorted by dimension.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Value};

use crate::arith::{big_ln, big_pow, log_add_exp, KahanSum};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Backend {
    Exact,
    LogDomain,
}

impl Backend {
    pub fn as_str(self) -> &'static str {
        match self {
            Backend::Exact => "exact",
            Backend::LogDomain => "log",
        }
    }
}

/// A nonnegative multiplicity, either a plain integer or `base^exponent`.
///
/// The power form lets multiplicities like `5^(f(j))` travel through the
/// log-domain backend without ever being expanded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Multiplicity {
    Int(BigUint),
    Power { base: u64, exponent: u64 },
}

impl Multiplicity {
    pub fn one() -> Self {
        Multiplicity::Int(BigUint::one())
    }

    pub fn int(n: u64) -> Self {
        Multiplicity::Int(BigUint::from(n))
    }

    /// `base^exponent`; `base^0` is stored as the integer 1 so that equal
    /// values compare equal after a round trip.
    pub fn power(base: u64, exponent: u64) -> Self {
        if exponent == 0 {
            return Multiplicity::one();
        }
        Multiplicity::Power { base, exponent }
    }

    pub fn to_biguint(&self) -> BigUint {
        match self {
            Multiplicity::Int(n) => n.clone(),
            Multiplicity::Power { base, exponent } => big_pow(*base, *exponent),
        }
    }

    pub fn ln(&self) -> f64 {
        match self {
            Multiplicity::Int(n) => big_ln(n),
            Multiplicity::Power { base, exponent } => {
                if *base == 0 {
                    if *exponent == 0 {
                        0.0
                    } else {
                        f64::NEG_INFINITY
                    }
                } else {
                    *exponent as f64 * (*base as f64).ln()
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Multiplicity::Int(n) => n.is_zero(),
            Multiplicity::Power { base, exponent } => *base == 0 && *exponent > 0,
        }
    }

    /// `ln(M - i)` for small `i`, without expanding huge powers.
    fn ln_minus(&self, i: u64) -> f64 {
        let ln_m = self.ln();
        if ln_m < 40.0 {
            let m = self.to_biguint();
            let i = BigUint::from(i);
            if m <= i {
                return f64::NEG_INFINITY;
            }
            return big_ln(&(m - i));
        }
        ln_m + (-((i as f64).ln() - ln_m).exp()).ln_1p()
    }

    /// Whether `k <= M`.
    fn at_least(&self, k: u64) -> bool {
        if self.ln() >= 64.0 {
            return true;
        }
        self.to_biguint() >= BigUint::from(k)
    }
}

impl fmt::Display for Multiplicity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Multiplicity::Int(n) => write!(f, "{n}"),
            Multiplicity::Power { base, exponent } => write!(f, "{base}^{exponent}"),
        }
    }
}

impl Serialize for Multiplicity {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Multiplicity::Int(n) => s.serialize_str(&n.to_string()),
            Multiplicity::Power { base, exponent } => {
                json!({"base": base, "exponent": exponent}).serialize(s)
            }
        }
    }
}

impl<'de> Deserialize<'de> for Multiplicity {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(u64),
            Text(String),
            Pow { base: u64, exponent: u64 },
        }
        Ok(match Repr::deserialize(d)? {
            Repr::Num(n) => Multiplicity::int(n),
            Repr::Text(t) => Multiplicity::Int(
                t.trim()
                    .parse()
                    .map_err(|_| serde::de::Error::custom(format!("bad multiplicity {t:?}")))?,
            ),
            Repr::Pow { base, exponent } => Multiplicity::power(base, exponent),
        })
    }
}

/// A cumulative count `R_n`, exact or as its natural logarithm.
#[derive(Clone, Debug, PartialEq)]
pub enum Count {
    Exact(BigUint),
    Log(f64),
}

impl Count {
    pub fn ln(&self) -> f64 {
        match self {
            Count::Exact(n) => big_ln(n),
            Count::Log(l) => *l,
        }
    }

    pub fn exact(&self) -> Option<&BigUint> {
        match self {
            Count::Exact(n) => Some(n),
            Count::Log(_) => None,
        }
    }

    /// Decimal logarithm, the unit used in slope tables.
    pub fn log10(&self) -> f64 {
        self.ln() / std::f64::consts::LN_10
    }
}

impl fmt::Display for Count {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Count::Exact(n) => write!(f, "{n}"),
            Count::Log(l) => write!(f, "exp({l})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Coeffs {
    Exact(BTreeMap<BigUint, BigUint>),
    Log(BTreeMap<BigUint, f64>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct DirichletSeries {
    cutoff: BigUint,
    coeffs: Coeffs,
}

impl DirichletSeries {
    pub fn empty(cutoff: BigUint, backend: Backend) -> Self {
        let coeffs = match backend {
            Backend::Exact => Coeffs::Exact(BTreeMap::new()),
            Backend::LogDomain => Coeffs::Log(BTreeMap::new()),
        };
        DirichletSeries { cutoff, coeffs }
    }

    /// The series `1`: only the principal character.
    pub fn one(cutoff: BigUint, backend: Backend) -> Self {
        let mut s = Self::empty(cutoff, backend);
        s.add_entry_exact_or_log(BigUint::one(), BigUint::one());
        s
    }

    /// Builds an exact series; dimensions above the cutoff are discarded and
    /// multiplicities for repeated dimensions accumulate.
    pub fn from_exact<I>(cutoff: BigUint, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (BigUint, BigUint)>,
    {
        if cutoff.is_zero() {
            return Err(Error::precondition("series cutoff must be positive"));
        }
        let mut map = BTreeMap::new();
        for (dim, mult) in entries {
            if dim.is_zero() {
                return Err(Error::precondition("dimension 0 in series"));
            }
            if dim > cutoff || mult.is_zero() {
                continue;
            }
            *map.entry(dim).or_insert_with(BigUint::zero) += mult;
        }
        Ok(DirichletSeries {
            cutoff,
            coeffs: Coeffs::Exact(map),
        })
    }

    /// Builds a log-domain series from `(dimension, ln multiplicity)` pairs.
    pub fn from_log<I>(cutoff: BigUint, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (BigUint, f64)>,
    {
        if cutoff.is_zero() {
            return Err(Error::precondition("series cutoff must be positive"));
        }
        let mut map: BTreeMap<BigUint, f64> = BTreeMap::new();
        for (dim, lm) in entries {
            if dim.is_zero() {
                return Err(Error::precondition("dimension 0 in series"));
            }
            if !lm.is_finite() {
                return Err(Error::precondition(format!(
                    "log multiplicity must be finite, got {lm}"
                )));
            }
            if dim > cutoff {
                continue;
            }
            let slot = map.entry(dim).or_insert(f64::NEG_INFINITY);
            *slot = log_add_exp(*slot, lm);
        }
        Ok(DirichletSeries {
            cutoff,
            coeffs: Coeffs::Log(map),
        })
    }

    fn add_entry_exact_or_log(&mut self, dim: BigUint, mult: BigUint) {
        if dim > self.cutoff || mult.is_zero() {
            return;
        }
        match &mut self.coeffs {
            Coeffs::Exact(m) => *m.entry(dim).or_insert_with(BigUint::zero) += mult,
            Coeffs::Log(m) => {
                let slot = m.entry(dim).or_insert(f64::NEG_INFINITY);
                *slot = log_add_exp(*slot, big_ln(&mult));
            }
        }
    }

    pub fn backend(&self) -> Backend {
        match self.coeffs {
            Coeffs::Exact(_) => Backend::Exact,
            Coeffs::Log(_) => Backend::LogDomain,
        }
    }

    pub fn cutoff(&self) -> &BigUint {
        &self.cutoff
    }

    pub fn len(&self) -> usize {
        match &self.coeffs {
            Coeffs::Exact(m) => m.len(),
            Coeffs::Log(m) => m.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dimensions(&self) -> Vec<BigUint> {
        match &self.coeffs {
            Coeffs::Exact(m) => m.keys().cloned().collect(),
            Coeffs::Log(m) => m.keys().cloned().collect(),
        }
    }

    /// Exact multiplicity at `dim`; `None` for the log backend.
    pub fn exact_at(&self, dim: &BigUint) -> Option<BigUint> {
        match &self.coeffs {
            Coeffs::Exact(m) => Some(m.get(dim).cloned().unwrap_or_default()),
            Coeffs::Log(_) => None,
        }
    }

    /// Exact entries; `None` for the log backend.
    pub fn exact_entries(&self) -> Option<&BTreeMap<BigUint, BigUint>> {
        match &self.coeffs {
            Coeffs::Exact(m) => Some(m),
            Coeffs::Log(_) => None,
        }
    }

    /// `(dimension, ln multiplicity)` for every entry, in dimension order.
    pub fn ln_entries(&self) -> Vec<(BigUint, f64)> {
        match &self.coeffs {
            Coeffs::Exact(m) => m.iter().map(|(d, c)| (d.clone(), big_ln(c))).collect(),
            Coeffs::Log(m) => m.iter().map(|(d, c)| (d.clone(), *c)).collect(),
        }
    }

    pub fn ln_at(&self, dim: &BigUint) -> f64 {
        match &self.coeffs {
            Coeffs::Exact(m) => m.get(dim).map(big_ln).unwrap_or(f64::NEG_INFINITY),
            Coeffs::Log(m) => m.get(dim).copied().unwrap_or(f64::NEG_INFINITY),
        }
    }

    /// Smallest dimension greater than one carrying a nonzero multiplicity.
    pub fn min_nontrivial_dimension(&self) -> Option<BigUint> {
        let one = BigUint::one();
        self.dimensions().into_iter().find(|d| d > &one)
    }

    /// Converts to the log-domain backend (identity on log series).
    pub fn to_log(&self) -> Self {
        match &self.coeffs {
            Coeffs::Log(_) => self.clone(),
            Coeffs::Exact(m) => DirichletSeries {
                cutoff: self.cutoff.clone(),
                coeffs: Coeffs::Log(m.iter().map(|(d, c)| (d.clone(), big_ln(c))).collect()),
            },
        }
    }

    pub fn to_backend(&self, backend: Backend) -> Result<Self> {
        match (self.backend(), backend) {
            (a, b) if a == b => Ok(self.clone()),
            (Backend::Exact, Backend::LogDomain) => Ok(self.to_log()),
            _ => Err(Error::BackendMismatch(
                "log-domain series cannot be converted back to exact".into(),
            )),
        }
    }

    /// Drops every entry above `n` and lowers the cutoff to `n`.
    pub fn truncate(&self, n: &BigUint) -> Self {
        let cutoff = n.min(&self.cutoff).clone();
        let coeffs = match &self.coeffs {
            Coeffs::Exact(m) => Coeffs::Exact(
                m.range(..=cutoff.clone())
                    .map(|(d, c)| (d.clone(), c.clone()))
                    .collect(),
            ),
            Coeffs::Log(m) => Coeffs::Log(
                m.range(..=cutoff.clone())
                    .map(|(d, c)| (d.clone(), *c))
                    .collect(),
            ),
        };
        DirichletSeries { cutoff, coeffs }
    }

    /// Entrywise sum; the result keeps the smaller cutoff.
    pub fn add(&self, other: &Self) -> Result<Self> {
        let cutoff = (&self.cutoff).min(&other.cutoff).clone();
        match (&self.coeffs, &other.coeffs) {
            (Coeffs::Exact(a), Coeffs::Exact(b)) => DirichletSeries::from_exact(
                cutoff,
                a.iter().chain(b.iter()).map(|(d, c)| (d.clone(), c.clone())),
            ),
            (Coeffs::Log(a), Coeffs::Log(b)) => DirichletSeries::from_log(
                cutoff,
                a.iter().chain(b.iter()).map(|(d, c)| (d.clone(), *c)),
            ),
            _ => Err(backend_mismatch()),
        }
    }

    /// `self + 1`: adds the principal character at dimension one.
    pub fn plus_one(&self) -> Self {
        let mut s = self.clone();
        s.add_entry_exact_or_log(BigUint::one(), BigUint::one());
        s
    }

    /// `self - 1`: removes one principal character (exact backend only).
    pub fn minus_one(&self) -> Result<Self> {
        let one = BigUint::one();
        match &self.coeffs {
            Coeffs::Exact(m) => {
                let mut m = m.clone();
                match m.get_mut(&one) {
                    Some(c) if !c.is_zero() => {
                        *c -= 1u32;
                        if c.is_zero() {
                            m.remove(&one);
                        }
                    }
                    _ => return Err(Error::precondition("series has no constant term to remove")),
                }
                Ok(DirichletSeries {
                    cutoff: self.cutoff.clone(),
                    coeffs: Coeffs::Exact(m),
                })
            }
            Coeffs::Log(_) => Err(Error::BackendMismatch(
                "subtraction is only defined on the exact backend".into(),
            )),
        }
    }

    /// `sum mult * dim^{-sigma}` with compensated summation.
    pub fn evaluate(&self, sigma: f64) -> Result<f64> {
        check_sigma(sigma)?;
        let mut acc = KahanSum::default();
        match &self.coeffs {
            Coeffs::Exact(m) => {
                for (d, c) in m {
                    let c = c.to_f64().filter(|v| v.is_finite()).ok_or_else(|| {
                        Error::Range(format!(
                            "multiplicity at dimension {d} does not fit in f64; use the log backend"
                        ))
                    })?;
                    acc.add(c * (-sigma * big_ln(d)).exp());
                }
            }
            Coeffs::Log(m) => {
                for (d, lc) in m {
                    let e = lc - sigma * big_ln(d);
                    if e > 709.0 {
                        return Err(Error::Range(format!(
                            "term at dimension {d} overflows f64 (ln = {e})"
                        )));
                    }
                    acc.add(e.exp());
                }
            }
        }
        Ok(acc.value())
    }

    /// Natural logarithm of [`evaluate`](Self::evaluate), computed with
    /// log-sum-exp so it never overflows.
    pub fn ln_evaluate(&self, sigma: f64) -> Result<f64> {
        check_sigma(sigma)?;
        let terms: Vec<f64> = self
            .ln_entries()
            .into_iter()
            .map(|(d, lc)| lc - sigma * big_ln(&d))
            .collect();
        Ok(log_sum_exp(&terms))
    }

    /// `R_n = sum_{d <= n} mult(d)`.
    pub fn cumulative(&self, n: &BigUint) -> Result<Count> {
        if n > &self.cutoff {
            return Err(Error::precondition(format!(
                "cumulative count at {n} requested beyond the truncation cutoff {}",
                self.cutoff
            )));
        }
        Ok(match &self.coeffs {
            Coeffs::Exact(m) => Count::Exact(m.range(..=n.clone()).map(|(_, c)| c).sum()),
            Coeffs::Log(m) => {
                let terms: Vec<f64> = m.range(..=n.clone()).map(|(_, c)| *c).collect();
                Count::Log(log_sum_exp(&terms))
            }
        })
    }

    /// Running cumulative counts at every entry dimension.
    pub fn cumulative_profile(&self) -> Vec<(BigUint, Count)> {
        match &self.coeffs {
            Coeffs::Exact(m) => {
                let mut acc = BigUint::zero();
                m.iter()
                    .map(|(d, c)| {
                        acc += c;
                        (d.clone(), Count::Exact(acc.clone()))
                    })
                    .collect()
            }
            Coeffs::Log(m) => {
                let mut acc = f64::NEG_INFINITY;
                m.iter()
                    .map(|(d, c)| {
                        acc = log_add_exp(acc, *c);
                        (d.clone(), Count::Log(acc))
                    })
                    .collect()
            }
        }
    }

    pub fn to_json(&self) -> Value {
        let cutoff = match self.cutoff.to_u64() {
            Some(n) => json!(n),
            None => json!(self.cutoff.to_string()),
        };
        let entries: Vec<Value> = match &self.coeffs {
            Coeffs::Exact(m) => m
                .iter()
                .map(|(d, c)| json!([d.to_string(), c.to_string()]))
                .collect(),
            Coeffs::Log(m) => m.iter().map(|(d, c)| json!([d.to_string(), c])).collect(),
        };
        json!({"cutoff": cutoff, "backend": self.backend().as_str(), "entries": entries})
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let cutoff = parse_big(v.get("cutoff"), "/cutoff")?;
        let backend = match v.get("backend").and_then(Value::as_str) {
            Some("exact") => Backend::Exact,
            Some("log") => Backend::LogDomain,
            _ => return Err(Error::parse("/backend", "expected \"exact\" or \"log\"")),
        };
        let entries = v
            .get("entries")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::parse("/entries", "expected an array"))?;
        let mut exact = Vec::new();
        let mut logs = Vec::new();
        for (i, e) in entries.iter().enumerate() {
            let ptr = format!("/entries/{i}");
            let pair = e
                .as_array()
                .filter(|a| a.len() == 2)
                .ok_or_else(|| Error::parse(&ptr, "expected [dimension, multiplicity]"))?;
            let dim = parse_big(Some(&pair[0]), &format!("{ptr}/0"))?;
            match backend {
                Backend::Exact => exact.push((dim, parse_big(Some(&pair[1]), &format!("{ptr}/1"))?)),
                Backend::LogDomain => {
                    let lm = pair[1]
                        .as_f64()
                        .ok_or_else(|| Error::parse(format!("{ptr}/1"), "expected a float"))?;
                    logs.push((dim, lm));
                }
            }
        }
        let rebuild = |e: Error| match e {
            Error::Precondition(m) => Error::parse("/entries", m),
            other => other,
        };
        match backend {
            Backend::Exact => Self::from_exact(cutoff, exact).map_err(rebuild),
            Backend::LogDomain => Self::from_log(cutoff, logs).map_err(rebuild),
        }
    }

    /// CSV with a header row: `dimension,multiplicity` (exact) or
    /// `dimension,ln_multiplicity` (log backend).
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        match &self.coeffs {
            Coeffs::Exact(m) => {
                out.push_str("dimension,multiplicity\n");
                for (d, c) in m {
                    out.push_str(&format!("{d},{c}\n"));
                }
            }
            Coeffs::Log(m) => {
                out.push_str("dimension,ln_multiplicity\n");
                for (d, c) in m {
                    out.push_str(&format!("{d},{c}\n"));
                }
            }
        }
        out
    }
}

impl Serialize for DirichletSeries {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for DirichletSeries {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        DirichletSeries::from_json(&v).map_err(serde::de::Error::custom)
    }
}

fn parse_big(v: Option<&Value>, ptr: &str) -> Result<BigUint> {
    match v {
        Some(Value::Number(n)) => n
            .as_u64()
            .map(BigUint::from)
            .ok_or_else(|| Error::parse(ptr, "expected a nonnegative integer")),
        Some(Value::String(s)) => s
            .trim()
            .parse()
            .map_err(|_| Error::parse(ptr, format!("not a decimal integer: {s:?}"))),
        _ => Err(Error::parse(ptr, "missing integer")),
    }
}

fn check_sigma(sigma: f64) -> Result<()> {
    if sigma.is_finite() && sigma >= 0.0 {
        Ok(())
    } else {
        Err(Error::precondition(format!(
            "evaluation point must be a finite nonnegative real, got {sigma}"
        )))
    }
}

fn backend_mismatch() -> Error {
    Error::BackendMismatch("operands use different coefficient backends".into())
}

pub(crate) fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    let mut acc = KahanSum::default();
    for t in terms {
        acc.add((t - max).exp());
    }
    max + acc.value().ln()
}

/// Dirichlet convolution truncated at `n`: the zeta function of a direct
/// product is the product of the factors' zeta functions.
pub fn convolve(a: &DirichletSeries, b: &DirichletSeries, n: &BigUint) -> Result<DirichletSeries> {
    let cutoff = n.min(&a.cutoff).min(&b.cutoff).clone();
    match (&a.coeffs, &b.coeffs) {
        (Coeffs::Exact(x), Coeffs::Exact(y)) => {
            let mut out: BTreeMap<BigUint, BigUint> = BTreeMap::new();
            for (d1, c1) in x {
                if d1 > &cutoff {
                    break;
                }
                let limit = &cutoff / d1;
                for (d2, c2) in y.range(..=limit) {
                    *out.entry(d1 * d2).or_insert_with(BigUint::zero) += c1 * c2;
                }
            }
            Ok(DirichletSeries {
                cutoff,
                coeffs: Coeffs::Exact(out),
            })
        }
        (Coeffs::Log(x), Coeffs::Log(y)) => {
            let mut out: BTreeMap<BigUint, f64> = BTreeMap::new();
            for (d1, c1) in x {
                if d1 > &cutoff {
                    break;
                }
                let limit = &cutoff / d1;
                for (d2, c2) in y.range(..=limit) {
                    let slot = out.entry(d1 * d2).or_insert(f64::NEG_INFINITY);
                    *slot = log_add_exp(*slot, c1 + c2);
                }
            }
            Ok(DirichletSeries {
                cutoff,
                coeffs: Coeffs::Log(out),
            })
        }
        _ => Err(backend_mismatch()),
    }
}

/// `base^M` truncated at `n`, for a base series with constant term exactly one.
///
/// Writing `base = 1 + x`, the result is `sum_k C(M, k) x^k`; every nontrivial
/// dimension is at least two, so only `k <= log2 n` contribute.
pub fn power_one_plus(
    base: &DirichletSeries,
    m: &Multiplicity,
    n: &BigUint,
) -> Result<DirichletSeries> {
    if m.is_zero() {
        return Err(Error::precondition("power multiplicity must be at least 1"));
    }
    let one = BigUint::one();
    let cutoff = n.min(&base.cutoff).clone();
    match &base.coeffs {
        Coeffs::Exact(map) => {
            if map.get(&one) != Some(&one) {
                return Err(Error::precondition(
                    "base series must have constant term exactly 1",
                ));
            }
            let x = DirichletSeries {
                cutoff: cutoff.clone(),
                coeffs: Coeffs::Exact(
                    map.range(BigUint::from(2u32)..=cutoff.clone())
                        .map(|(d, c)| (d.clone(), c.clone()))
                        .collect(),
                ),
            };
            let m_big = m.to_biguint();
            let mut result: BTreeMap<BigUint, BigUint> = BTreeMap::new();
            result.insert(one.clone(), one.clone());
            let mut binom = BigUint::one();
            let mut xk = x.clone();
            let mut k = 1u64;
            while !xk.is_empty() && BigUint::from(k) <= m_big {
                binom = binom * (&m_big - BigUint::from(k - 1)) / BigUint::from(k);
                if let Coeffs::Exact(entries) = &xk.coeffs {
                    for (d, c) in entries {
                        *result.entry(d.clone()).or_insert_with(BigUint::zero) += c * &binom;
                    }
                }
                xk = convolve(&xk, &x, &cutoff)?;
                k += 1;
            }
            Ok(DirichletSeries {
                cutoff,
                coeffs: Coeffs::Exact(result),
            })
        }
        Coeffs::Log(map) => {
            match map.get(&one) {
                Some(c) if c.abs() < 1e-12 => {}
                _ => {
                    return Err(Error::precondition(
                        "base series must have constant term exactly 1",
                    ))
                }
            }
            let x = DirichletSeries {
                cutoff: cutoff.clone(),
                coeffs: Coeffs::Log(
                    map.range(BigUint::from(2u32)..=cutoff.clone())
                        .map(|(d, c)| (d.clone(), *c))
                        .collect(),
                ),
            };
            let mut result: BTreeMap<BigUint, f64> = BTreeMap::new();
            result.insert(one.clone(), 0.0);
            let mut ln_binom = 0.0;
            let mut xk = x.clone();
            let mut k = 1u64;
            while !xk.is_empty() && m.at_least(k) {
                ln_binom += m.ln_minus(k - 1) - (k as f64).ln();
                if let Coeffs::Log(entries) = &xk.coeffs {
                    for (d, c) in entries {
                        let slot = result.entry(d.clone()).or_insert(f64::NEG_INFINITY);
                        *slot = log_add_exp(*slot, c + ln_binom);
                    }
                }
                xk = convolve(&xk, &x, &cutoff)?;
                k += 1;
            }
            Ok(DirichletSeries {
                cutoff,
                coeffs: Coeffs::Log(result),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    fn exact(cutoff: u64, entries: &[(u64, u64)]) -> DirichletSeries {
        DirichletSeries::from_exact(big(cutoff), entries.iter().map(|&(d, c)| (big(d), big(c))))
            .unwrap()
    }

    /// SL2(5) degree multiset {1,2,2,3,3,4,4,5,6}.
    fn sl2_5() -> DirichletSeries {
        exact(120, &[(1, 1), (2, 2), (3, 2), (4, 2), (5, 1), (6, 1)])
    }

    fn a5() -> DirichletSeries {
        exact(60, &[(1, 1), (3, 2), (4, 1), (5, 1)])
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(exact(1, &[(1, 1)]).evaluate(2.0).unwrap(), 1.0);
        let v = sl2_5().evaluate(1.0).unwrap();
        assert!((v - 53.0 / 15.0).abs() < 1e-14);
        assert_eq!(sl2_5().evaluate(0.0).unwrap(), 9.0);
        assert!(sl2_5().evaluate(-1.0).is_err());
    }

    #[test]
    fn evaluate_reports_range_errors() {
        let huge = DirichletSeries::from_exact(big(10), [(big(2), big_pow(10, 400))]).unwrap();
        assert!(matches!(huge.evaluate(1.0), Err(Error::Range(_))));
        let l = huge.to_log().ln_evaluate(1.0).unwrap();
        assert!((l - (400.0 * 10f64.ln() - 2f64.ln())).abs() < 1e-9);
    }

    #[test]
    fn convolution_identity_and_a5_square() {
        let s = sl2_5();
        let id = exact(120, &[(1, 1)]);
        assert_eq!(convolve(&s, &id, &big(120)).unwrap(), s);
        let sq = convolve(&a5(), &a5(), &big(25)).unwrap();
        assert_eq!(sq.cumulative(&big(25)).unwrap(), Count::Exact(big(25)));
    }

    #[test]
    fn convolution_rejects_mixed_backends() {
        let r = convolve(&a5(), &a5().to_log(), &big(10));
        assert!(matches!(r, Err(Error::BackendMismatch(_))));
    }

    #[test]
    fn power_examples() {
        let base = exact(8, &[(1, 1), (2, 1)]);
        assert_eq!(power_one_plus(&base, &Multiplicity::one(), &big(8)).unwrap(), base);
        let cube = power_one_plus(&base, &Multiplicity::int(3), &big(8)).unwrap();
        assert_eq!(cube, exact(8, &[(1, 1), (2, 3), (4, 3), (8, 1)]));
        assert!(power_one_plus(&base, &Multiplicity::int(0), &big(8)).is_err());
        assert!(power_one_plus(&exact(8, &[(2, 1)]), &Multiplicity::int(2), &big(8)).is_err());
    }

    #[test]
    fn power_log_domain_matches_exact_at_five_to_the_ten() {
        let base = exact(4, &[(1, 1), (2, 1)]);
        let m = Multiplicity::power(5, 10);
        let ex = power_one_plus(&base, &m, &big(4)).unwrap();
        let lg = power_one_plus(&base.to_log(), &m, &big(4)).unwrap();
        let m_f = 5f64.powi(10);
        assert!((lg.ln_at(&big(2)) - 10.0 * 5f64.ln()).abs() < 1e-12);
        // ln C(M, 2) = ln(M (M - 1) / 2)
        let expected = m_f.ln() + (m_f - 1.0).ln() - 2f64.ln();
        assert!((lg.ln_at(&big(4)) - expected).abs() < 1e-12);
        for d in [2u64, 4] {
            let rel = (ex.ln_at(&big(d)) - lg.ln_at(&big(d))).abs();
            assert!(rel < 1e-12);
        }
    }

    #[test]
    fn cumulative_examples() {
        assert_eq!(exact(1, &[(1, 1)]).cumulative(&big(1)).unwrap(), Count::Exact(big(1)));
        assert_eq!(a5().cumulative(&big(5)).unwrap(), Count::Exact(big(5)));
        assert_eq!(a5().cumulative(&big(3)).unwrap(), Count::Exact(big(3)));
        assert!(a5().truncate(&big(4)).cumulative(&big(5)).is_err());
        let lg = a5().to_log().cumulative(&big(5)).unwrap();
        assert!((lg.ln() - 5f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn json_round_trip_and_sorting() {
        let s = sl2_5();
        let v = s.to_json();
        assert_eq!(v["entries"][0], json!(["1", "1"]));
        assert_eq!(v["backend"], "exact");
        assert_eq!(DirichletSeries::from_json(&v).unwrap(), s);
        let lg = s.to_log();
        assert_eq!(DirichletSeries::from_json(&lg.to_json()).unwrap(), lg);
        let bad = json!({"cutoff": 10, "backend": "exact", "entries": [["0", "1"]]});
        assert!(matches!(DirichletSeries::from_json(&bad), Err(Error::Parse { .. })));
    }

    #[test]
    fn minus_one_and_plus_one() {
        let s = sl2_5();
        let x = s.minus_one().unwrap();
        assert_eq!(x.exact_at(&big(1)), Some(big(0)));
        assert_eq!(x.plus_one(), s);
        assert!(x.minus_one().is_err());
    }

    #[test]
    fn evaluate_tends_to_constant_term() {
        let v = sl2_5().evaluate(60.0).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }
}

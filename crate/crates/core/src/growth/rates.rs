//! Exact abscissae and PRG verdicts from the rate data of each stratum.
//!
//! A geometric stratum with `f(j)/j -> c` contributes
//! `sum_j q^(f(j)) q^(j(m - n s))`, which converges iff `c + m - n s < 0`,
//! so its rate is `max (c + m)/n`. A prime stratum with multiplicities of
//! order `p^e` contributes `sum_p p^(e + m - n s)`, which converges iff
//! `e + m - n s < -1`, giving `max (e + m + 1)/n`. The abscissa of a product
//! is the maximum over its strata.

use std::cmp::Ordering;
use std::fmt;

use serde::{Serialize, Serializer};
use serde_json::{json, Value};

use super::{ExponentLaw, GroupSpec, Stratum};
use crate::lie::PairSet;
use crate::rational::{format_rational, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Abscissa {
    /// The spec describes a finite group; its zeta function is a Dirichlet
    /// polynomial and has no abscissa in the usual sense.
    FiniteGroup,
    Finite(Rational),
    Infinite,
}

impl Abscissa {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            Abscissa::Finite(r) => Some(r),
            _ => None,
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Abscissa::FiniteGroup => 0,
            Abscissa::Finite(_) => 1,
            Abscissa::Infinite => 2,
        }
    }
}

impl Ord for Abscissa {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Abscissa::Finite(a), Abscissa::Finite(b)) => a.cmp(b),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl PartialOrd for Abscissa {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Abscissa {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Abscissa::FiniteGroup => write!(f, "finite-group"),
            Abscissa::Finite(r) => write!(f, "{}", format_rational(r)),
            Abscissa::Infinite => write!(f, "infinity"),
        }
    }
}

impl Serialize for Abscissa {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StratumRate {
    pub index: usize,
    pub kind: &'static str,
    pub rate: Abscissa,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RateSummary {
    pub abscissa: Abscissa,
    pub strata: Vec<StratumRate>,
}

impl RateSummary {
    pub fn to_json(&self) -> Value {
        json!({
            "abscissa": self.abscissa.to_string(),
            "strata": self.strata.iter().map(|s| json!({
                "index": s.index,
                "kind": s.kind,
                "rate": s.rate.to_string(),
            })).collect::<Vec<_>>(),
        })
    }
}

fn int(n: impl Into<num_bigint::BigInt>) -> Rational {
    Rational::from_integer(n.into())
}

fn max_over_pairs(pairs: &PairSet, shift: &Rational) -> Rational {
    pairs
        .iter()
        .map(|(m, n)| (shift + int(m)) / int(n))
        .max()
        .expect("pair sets are nonempty")
}

/// `lim f(j)/j` of a geometric stratum, or `None` when `f` is superlinear.
fn geometric_growth(g: &super::GeometricStratum) -> Option<Rational> {
    if let Some(s) = &g.schedule {
        return Some(s.rate());
    }
    match &g.exponent {
        Some(ExponentLaw::Linear { slope }) => Some(slope.clone()),
        Some(ExponentLaw::Polynomial { degree: 0 }) => Some(int(0)),
        Some(ExponentLaw::Polynomial { degree: 1 }) => Some(int(1)),
        Some(ExponentLaw::Polynomial { .. }) => None,
        None => Some(int(0)),
    }
}

fn stratum_rate(s: &Stratum) -> Abscissa {
    match s {
        Stratum::Finite { .. } => Abscissa::FiniteGroup,
        Stratum::Geometric(g) => {
            let pairs = g.pairs.clone().unwrap_or_else(|| g.lie_type.canonical_pairs());
            match geometric_growth(g) {
                Some(c) => Abscissa::Finite(max_over_pairs(&pairs, &c)),
                None => Abscissa::Infinite,
            }
        }
        Stratum::Primes(p) => {
            let pairs = p.pairs.clone().unwrap_or_else(|| p.lie_type.canonical_pairs());
            let e = int(p.multiplicity.rate_exponent()) + int(1);
            Abscissa::Finite(max_over_pairs(&pairs, &e))
        }
        // the tail's stage targets increase to rho
        Stratum::Diagonal(d) => Abscissa::Finite(d.rho.clone()),
    }
}

/// The exact abscissa of convergence, stratum by stratum.
pub fn exact_abscissa(spec: &GroupSpec) -> RateSummary {
    let strata: Vec<StratumRate> = spec
        .strata
        .iter()
        .enumerate()
        .map(|(index, s)| StratumRate {
            index,
            kind: s.kind(),
            rate: stratum_rate(s),
        })
        .collect();
    let abscissa = strata
        .iter()
        .map(|s| s.rate.clone())
        .max()
        .unwrap_or(Abscissa::FiniteGroup);
    RateSummary { abscissa, strata }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PrgVerdict {
    /// `m_n` grows at most like `n^exponent`.
    Prg { exponent: Rational },
    /// `m_n` is not polynomially bounded; the stratum is a witness.
    NotPrg { stratum: usize },
}

impl PrgVerdict {
    pub fn is_prg(&self) -> bool {
        matches!(self, PrgVerdict::Prg { .. })
    }

    pub fn to_json(&self) -> Value {
        match self {
            PrgVerdict::Prg { exponent } => json!({"verdict": "PRG", "exponent": format_rational(exponent)}),
            PrgVerdict::NotPrg { stratum } => json!({"verdict": "not-PRG", "stratum": stratum}),
        }
    }
}

/// PRG holds iff `m_n` is polynomially bounded. A geometric stratum has
/// `m_n` of order `n^(c/n_min)`, a prime stratum `n^((e+1)/n_min)`, where
/// `n_min` is the smallest `n` of its pair set; a superlinear `f` defeats
/// every polynomial. For the diagonal tail `m_n <= R_n` bounds the growth
/// by its rate.
pub fn prg_verdict(spec: &GroupSpec) -> PrgVerdict {
    let mut exponent = int(0);
    for (i, s) in spec.strata.iter().enumerate() {
        let e = match s {
            Stratum::Finite { .. } => int(0),
            Stratum::Geometric(g) => {
                let pairs = g.pairs.clone().unwrap_or_else(|| g.lie_type.canonical_pairs());
                let n_min = int(pairs.min_n().expect("pair sets are nonempty"));
                match geometric_growth(g) {
                    Some(c) => c / n_min,
                    None => return PrgVerdict::NotPrg { stratum: i },
                }
            }
            Stratum::Primes(p) => {
                let pairs = p.pairs.clone().unwrap_or_else(|| p.lie_type.canonical_pairs());
                let n_min = int(pairs.min_n().expect("pair sets are nonempty"));
                (int(p.multiplicity.rate_exponent()) + int(1)) / n_min
            }
            Stratum::Diagonal(d) => d.rho.clone(),
        };
        exponent = exponent.max(e);
    }
    PrgVerdict::Prg { exponent }
}

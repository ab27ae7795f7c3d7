//! Character-degree multisets of `SL2(q)` and `PSL2(q)`.
//!
//! The degrees come from the closed-form families of the classical character
//! theory of `SL2` over a finite field. Every constructed table is checked
//! against `sum mult(d) * d^2 = |G|` before it is handed out.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::arith::prime_power;
use crate::dirichlet::DirichletSeries;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GroupLabel {
    #[serde(rename = "SL2")]
    Sl2,
    #[serde(rename = "PSL2")]
    Psl2,
    Trivial,
}

impl GroupLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            GroupLabel::Sl2 => "SL2",
            GroupLabel::Psl2 => "PSL2",
            GroupLabel::Trivial => "Trivial",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeTable {
    group: GroupLabel,
    q: u64,
    degrees: BTreeMap<u64, u64>,
    order: BigUint,
}

impl DegreeTable {
    pub fn trivial() -> Self {
        DegreeTable {
            group: GroupLabel::Trivial,
            q: 1,
            degrees: BTreeMap::from([(1, 1)]),
            order: BigUint::one(),
        }
    }

    /// Degrees of `SL2(q)` for a prime power `q >= 4`.
    pub fn sl2(q: u64) -> Result<Self> {
        check_field(q)?;
        let mut d = BTreeMap::new();
        let mut put = |deg: u64, mult: u64| {
            if mult > 0 {
                *d.entry(deg).or_insert(0) += mult;
            }
        };
        put(1, 1);
        put(q, 1);
        if q % 2 == 1 {
            put(q + 1, (q - 3) / 2);
            put(q - 1, (q - 1) / 2);
            put(q.div_ceil(2), 2);
            put((q - 1) / 2, 2);
        } else {
            put(q + 1, q / 2 - 1);
            put(q - 1, q / 2);
        }
        let q_big = BigUint::from(q);
        let order = &q_big * (&q_big * &q_big - 1u32);
        DegreeTable::checked(GroupLabel::Sl2, q, d, order)
    }

    /// Degrees of `PSL2(q) = SL2(q) / {+-1}` for a prime power `q >= 4`.
    pub fn psl2(q: u64) -> Result<Self> {
        check_field(q)?;
        if q.is_multiple_of(2) {
            let t = DegreeTable::sl2(q)?;
            return DegreeTable::checked(GroupLabel::Psl2, q, t.degrees, t.order);
        }
        let mut d = BTreeMap::new();
        let mut put = |deg: u64, mult: u64| {
            if mult > 0 {
                *d.entry(deg).or_insert(0) += mult;
            }
        };
        put(1, 1);
        put(q, 1);
        if q % 4 == 1 {
            put(q.div_ceil(2), 2);
            put(q - 1, (q - 1) / 4);
            put(q + 1, (q - 5) / 4);
        } else {
            put((q - 1) / 2, 2);
            put(q - 1, (q - 3) / 4);
            put(q + 1, (q - 3) / 4);
        }
        let q_big = BigUint::from(q);
        let order = &q_big * (&q_big * &q_big - 1u32) / 2u32;
        DegreeTable::checked(GroupLabel::Psl2, q, d, order)
    }

    fn checked(group: GroupLabel, q: u64, degrees: BTreeMap<u64, u64>, order: BigUint) -> Result<Self> {
        let t = DegreeTable {
            group,
            q,
            degrees,
            order,
        };
        if t.mass() != t.order {
            return Err(Error::Invariant(format!(
                "{}({q}): sum of squared degrees {} differs from the group order {}",
                group.as_str(),
                t.mass(),
                t.order
            )));
        }
        if t.degrees.get(&1) != Some(&1) {
            return Err(Error::Invariant(format!(
                "{}({q}) must have exactly one linear character",
                group.as_str()
            )));
        }
        Ok(t)
    }

    pub fn group(&self) -> GroupLabel {
        self.group
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn order(&self) -> &BigUint {
        &self.order
    }

    pub fn degrees(&self) -> &BTreeMap<u64, u64> {
        &self.degrees
    }

    /// Number of irreducible characters (equal to the class number).
    pub fn character_count(&self) -> u64 {
        self.degrees.values().sum()
    }

    /// `sum mult(d) * d^2`.
    pub fn mass(&self) -> BigUint {
        self.degrees
            .iter()
            .map(|(&d, &m)| BigUint::from(d) * BigUint::from(d) * BigUint::from(m))
            .fold(BigUint::zero(), |a, b| a + b)
    }

    pub fn min_nontrivial_degree(&self) -> Result<u64> {
        self.degrees
            .keys()
            .copied()
            .find(|&d| d > 1)
            .ok_or_else(|| Error::precondition("the trivial table has no nontrivial degree"))
    }

    /// The zeta function restricted to dimensions `<= cutoff` (exact backend).
    pub fn zeta_series(&self, cutoff: &BigUint) -> Result<DirichletSeries> {
        DirichletSeries::from_exact(
            cutoff.clone(),
            self.degrees
                .iter()
                .map(|(&d, &m)| (BigUint::from(d), BigUint::from(m))),
        )
    }

    pub fn to_json(&self) -> Value {
        let degrees: Vec<Value> = self.degrees.iter().map(|(d, m)| json!([d, m])).collect();
        json!({
            "group": self.group.as_str(),
            "q": self.q,
            "order": self.order.to_string(),
            "degrees": degrees,
        })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("degree,multiplicity\n");
        for (d, m) in &self.degrees {
            out.push_str(&format!("{d},{m}\n"));
        }
        out
    }
}

impl fmt::Display for DegreeTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.group.as_str(), self.q)
    }
}

fn check_field(q: u64) -> Result<()> {
    if prime_power(q).is_none() {
        return Err(Error::precondition(format!("{q} is not a prime power")));
    }
    if q < 4 {
        return Err(Error::precondition(format!(
            "SL2({q}) is not quasi-simple (Tits exceptions SL2(2), SL2(3)); need q >= 4"
        )));
    }
    Ok(())
}

/// Smallest nontrivial degree of `SL2(q)` (`cover = true`) or `PSL2(q)`,
/// in closed form so that it is available for field sizes far beyond any
/// table one would materialise.
pub fn min_degree_closed_form(q: u64, cover: bool) -> u64 {
    if q.is_multiple_of(2) {
        q - 1
    } else if cover || q % 4 == 3 {
        (q - 1) / 2
    } else {
        q.div_ceil(2)
    }
}

/// Whether the minimal nontrivial degree of `PSL2(q)` is at most the square
/// of that of `SL2(q)` minus one.
pub fn cover_degree_check(q: u64) -> Result<bool> {
    let simple = DegreeTable::psl2(q)?.min_nontrivial_degree()?;
    let cover = DegreeTable::sl2(q)?.min_nontrivial_degree()?;
    Ok(simple < cover * cover)
}

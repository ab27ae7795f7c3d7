//! Root-system data, pair sets and the basic model polynomials
//! `xi_{a,q}(s) = sum_{(m,n) in a} q^{m - n s}`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::arith::big_pow;
use crate::dirichlet::DirichletSeries;
use crate::error::{Error, Result};
use crate::rational::{ratio, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    A,
    B,
    C,
    D,
    E6,
    E7,
    E8,
    F4,
    G2,
}

impl Family {
    pub const ALL: [Family; 9] = [
        Family::A,
        Family::B,
        Family::C,
        Family::D,
        Family::E6,
        Family::E7,
        Family::E8,
        Family::F4,
        Family::G2,
    ];

    /// Smallest legal rank, and the largest one for exceptional families.
    pub fn rank_range(self) -> (u32, Option<u32>) {
        match self {
            Family::A => (1, None),
            Family::B => (2, None),
            Family::C => (3, None),
            Family::D => (4, None),
            Family::E6 => (6, Some(6)),
            Family::E7 => (7, Some(7)),
            Family::E8 => (8, Some(8)),
            Family::F4 => (4, Some(4)),
            Family::G2 => (2, Some(2)),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Family::A => "A",
            Family::B => "B",
            Family::C => "C",
            Family::D => "D",
            Family::E6 => "E6",
            Family::E7 => "E7",
            Family::E8 => "E8",
            Family::F4 => "F4",
            Family::G2 => "G2",
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::parse("/family", format!("unknown root-system family {s:?}")))
    }
}

/// A Lie type: an irreducible root system together with a flag for the
/// graph automorphism twisting the Frobenius map.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "LieTypeRepr", into = "LieTypeRepr")]
pub struct LieType {
    family: Family,
    rank: u32,
    twisted: bool,
}

#[derive(Serialize, Deserialize)]
struct LieTypeRepr {
    family: Family,
    rank: u32,
    #[serde(default)]
    twisted: bool,
}

impl TryFrom<LieTypeRepr> for LieType {
    type Error = Error;
    fn try_from(r: LieTypeRepr) -> Result<Self> {
        LieType::new(r.family, r.rank, r.twisted)
    }
}

impl From<LieType> for LieTypeRepr {
    fn from(t: LieType) -> Self {
        LieTypeRepr {
            family: t.family,
            rank: t.rank,
            twisted: t.twisted,
        }
    }
}

impl LieType {
    pub fn new(family: Family, rank: u32, twisted: bool) -> Result<Self> {
        let (lo, hi) = family.rank_range();
        if rank < lo || hi.is_some_and(|h| rank != h) {
            return Err(Error::precondition(format!(
                "rank {rank} is not legal for family {}",
                family.as_str()
            )));
        }
        if twisted {
            let legal = match family {
                Family::A => rank >= 2,
                Family::D => rank >= 4,
                Family::E6 => true,
                _ => false,
            };
            if !legal {
                let why = if matches!(family, Family::B | Family::C | Family::G2 | Family::F4) {
                    " (Suzuki and Ree groups are not supported)"
                } else {
                    ""
                };
                return Err(Error::precondition(format!(
                    "no graph automorphism twist exists for {}{rank}{why}",
                    family.as_str()
                )));
            }
        }
        Ok(LieType {
            family,
            rank,
            twisted,
        })
    }

    pub fn untwisted(family: Family, rank: u32) -> Result<Self> {
        Self::new(family, rank, false)
    }

    /// `A_1`, the type of `SL2`.
    pub fn a1() -> Self {
        LieType {
            family: Family::A,
            rank: 1,
            twisted: false,
        }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn twisted(&self) -> bool {
        self.twisted
    }

    pub fn is_a1(&self) -> bool {
        self.family == Family::A && self.rank == 1
    }

    /// Number of positive roots `|Phi^+|`.
    pub fn positive_root_count(&self) -> u32 {
        let l = self.rank;
        match self.family {
            Family::A => l * (l + 1) / 2,
            Family::B | Family::C => l * l,
            Family::D => l * (l - 1),
            Family::G2 => 6,
            Family::F4 => 24,
            Family::E6 => 36,
            Family::E7 => 63,
            Family::E8 => 120,
        }
    }

    /// The admissibility threshold `rk / |Phi^+|` in lowest terms.
    pub fn rho0(&self) -> Rational {
        ratio(self.rank as u64, self.positive_root_count() as u64)
    }

    /// The canonical pair `(rk, |Phi^+|)` of the default model.
    pub fn canonical_pair(&self) -> (u32, u32) {
        (self.rank, self.positive_root_count())
    }

    pub fn canonical_pairs(&self) -> PairSet {
        PairSet::from_pairs([self.canonical_pair()]).expect("canonical pair has n >= 1")
    }

    /// Whether `(self, q)` is one of the finitely many cases in which the
    /// simply connected finite group fails to be quasi-simple.
    pub fn is_tits_exception(&self, q: u64) -> bool {
        match (self.family, self.rank, self.twisted) {
            (Family::A, 1, false) => q == 2 || q == 3,
            (Family::A, 2, true) => q == 2,
            (Family::B, 2, false) => q == 2,
            (Family::G2, _, false) => q == 2,
            _ => false,
        }
    }
}

impl fmt::Display for LieType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = if self.twisted { "2" } else { "" };
        match self.family {
            Family::A | Family::B | Family::C | Family::D => {
                write!(f, "{prefix}{}{}", self.family.as_str(), self.rank)
            }
            _ => write!(f, "{prefix}{}", self.family.as_str()),
        }
    }
}

/// A finite set of exponent pairs `(m, n)` with `n >= 1`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<(u32, u32)>", into = "Vec<(u32, u32)>")]
pub struct PairSet(BTreeSet<(u32, u32)>);

impl TryFrom<Vec<(u32, u32)>> for PairSet {
    type Error = Error;
    fn try_from(v: Vec<(u32, u32)>) -> Result<Self> {
        PairSet::from_pairs(v)
    }
}

impl From<PairSet> for Vec<(u32, u32)> {
    fn from(p: PairSet) -> Self {
        p.0.into_iter().collect()
    }
}

impl PairSet {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (u32, u32)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (m, n) in pairs {
            if n == 0 {
                return Err(Error::precondition(format!(
                    "pair ({m},{n}) has n = 0; second coordinates must be positive"
                )));
            }
            set.insert((m, n));
        }
        Ok(PairSet(set))
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.0.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn union(&self, other: &PairSet) -> PairSet {
        PairSet(self.0.union(&other.0).copied().collect())
    }

    pub fn is_disjoint(&self, other: &PairSet) -> bool {
        self.0.is_disjoint(&other.0)
    }

    /// Smallest `n` over the set: the model's minimal dimension is `q^n`.
    pub fn min_n(&self) -> Option<u32> {
        self.0.iter().map(|&(_, n)| n).min()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Constraint {
    /// `m <= rk`
    MAtMostRank,
    /// `n <= |Phi^+|`
    NAtMostPositiveRoots,
    /// `m * |Phi^+| <= n * rk`
    SlopeAtMostRho0,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub pair: (u32, u32),
    pub constraint: Constraint,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (m, n) = self.pair;
        let what = match self.constraint {
            Constraint::MAtMostRank => "m exceeds the rank",
            Constraint::NAtMostPositiveRoots => "n exceeds the number of positive roots",
            Constraint::SlopeAtMostRho0 => "m/n exceeds rk/|Phi^+|",
        };
        write!(f, "({m},{n}): {what}")
    }
}

/// Checks every pair against `m <= rk`, `n <= |Phi^+|` and
/// `m/n <= rk/|Phi^+|`; returns all violations (empty means pass).
pub fn validate_pair_set(a: &PairSet, t: &LieType) -> Vec<Violation> {
    let rk = t.rank() as u64;
    let np = t.positive_root_count() as u64;
    let mut out = Vec::new();
    for (m, n) in a.iter() {
        let (m64, n64) = (m as u64, n as u64);
        if m64 > rk {
            out.push(Violation {
                pair: (m, n),
                constraint: Constraint::MAtMostRank,
            });
        }
        if n64 > np {
            out.push(Violation {
                pair: (m, n),
                constraint: Constraint::NAtMostPositiveRoots,
            });
        }
        if m64 * np > n64 * rk {
            out.push(Violation {
                pair: (m, n),
                constraint: Constraint::SlopeAtMostRho0,
            });
        }
    }
    out
}

/// `xi_{a,q}` truncated at `cutoff`: multiplicity `q^m` at dimension `q^n`
/// for every pair. No constant term.
pub fn model_xi(a: &PairSet, q: &BigUint, cutoff: &BigUint) -> Result<DirichletSeries> {
    if q < &BigUint::from(2u32) {
        return Err(Error::precondition("model field size must be at least 2"));
    }
    let mut entries = Vec::new();
    for (m, n) in a.iter() {
        let dim = num_traits::pow(q.clone(), n as usize);
        if &dim > cutoff {
            continue;
        }
        entries.push((dim, num_traits::pow(q.clone(), m as usize)));
    }
    DirichletSeries::from_exact(cutoff.clone(), entries)
}

/// Convenience wrapper for machine-word field sizes.
pub fn model_xi_u64(a: &PairSet, q: u64, cutoff: &BigUint) -> Result<DirichletSeries> {
    model_xi(a, &big_pow(q, 1), cutoff)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn t(f: Family, r: u32) -> LieType {
        LieType::untwisted(f, r).unwrap()
    }

    /// Roots of A_l as e_i - e_j in R^{l+1}.
    fn roots_a(l: usize) -> Vec<Vec<i32>> {
        let mut out = Vec::new();
        for i in 0..=l {
            for j in 0..=l {
                if i != j {
                    let mut v = vec![0; l + 1];
                    v[i] = 1;
                    v[j] = -1;
                    out.push(v);
                }
            }
        }
        out
    }

    /// Roots of D_l as +-e_i +- e_j, i < j.
    fn roots_d(l: usize) -> Vec<Vec<i32>> {
        let mut out = Vec::new();
        for i in 0..l {
            for j in (i + 1)..l {
                for si in [-1, 1] {
                    for sj in [-1, 1] {
                        let mut v = vec![0; l];
                        v[i] = si;
                        v[j] = sj;
                        out.push(v);
                    }
                }
            }
        }
        out
    }

    /// Lexicographically positive roots.
    fn count_positive(roots: &[Vec<i32>]) -> u32 {
        roots
            .iter()
            .filter(|v| v.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0))
            .count() as u32
    }

    #[test]
    fn positive_root_counts() {
        assert_eq!(LieType::a1().positive_root_count(), 1);
        assert_eq!(count_positive(&roots_a(2)), 3);
        assert_eq!(t(Family::A, 2).positive_root_count(), 3);
        assert_eq!(roots_d(4).len(), 24);
        assert_eq!(t(Family::D, 4).positive_root_count(), 12);
        for l in 1..9 {
            let n = count_positive(&roots_a(l as usize));
            assert_eq!(t(Family::A, l).positive_root_count(), n);
        }
        for l in 4..9 {
            let n = count_positive(&roots_d(l as usize));
            assert_eq!(t(Family::D, l).positive_root_count(), n);
        }
        assert_eq!(t(Family::E8, 8).positive_root_count(), 120);
    }

    #[test]
    fn rho0_examples() {
        assert_eq!(LieType::a1().rho0(), rat(1, 1));
        assert_eq!(t(Family::A, 2).rho0(), rat(2, 3));
        assert_eq!(t(Family::E8, 8).rho0(), rat(1, 15));
    }

    #[test]
    fn construction_rules() {
        assert!(LieType::new(Family::A, 0, false).is_err());
        assert!(LieType::new(Family::E6, 5, false).is_err());
        assert!(LieType::new(Family::A, 1, true).is_err());
        assert!(LieType::new(Family::A, 2, true).is_ok());
        assert!(LieType::new(Family::D, 4, true).is_ok());
        assert!(LieType::new(Family::E6, 6, true).is_ok());
        let suzuki = LieType::new(Family::B, 2, true).unwrap_err().to_string();
        assert!(suzuki.contains("Suzuki"));
        assert!(LieType::new(Family::G2, 2, true).is_err());
    }

    #[test]
    fn validation_examples() {
        let a1 = LieType::a1();
        assert!(validate_pair_set(&PairSet::from_pairs([(1, 1)]).unwrap(), &a1).is_empty());
        let v = validate_pair_set(&PairSet::from_pairs([(2, 1)]).unwrap(), &a1);
        let kinds: Vec<_> = v.iter().map(|x| x.constraint).collect();
        assert_eq!(kinds, vec![Constraint::MAtMostRank, Constraint::SlopeAtMostRho0]);
        let a2 = t(Family::A, 2);
        assert!(validate_pair_set(&PairSet::from_pairs([(1, 3), (2, 3)]).unwrap(), &a2).is_empty());
        assert!(PairSet::from_pairs([(1, 0)]).is_err());
    }

    #[test]
    fn model_xi_examples() {
        let a = PairSet::from_pairs([(1, 1)]).unwrap();
        let s = model_xi_u64(&a, 5, &BigUint::from(10u32)).unwrap();
        assert_eq!(s.exact_at(&BigUint::from(5u32)), Some(BigUint::from(5u32)));
        assert_eq!(s.len(), 1);
        assert!(model_xi_u64(&PairSet::default(), 5, &BigUint::from(10u32))
            .unwrap()
            .is_empty());
        let b = PairSet::from_pairs([(1, 1), (0, 2)]).unwrap();
        let s = model_xi_u64(&b, 3, &BigUint::from(100u32)).unwrap();
        assert_eq!(s.exact_at(&BigUint::from(3u32)), Some(BigUint::from(3u32)));
        assert_eq!(s.exact_at(&BigUint::from(9u32)), Some(BigUint::from(1u32)));
    }

    #[test]
    fn json_forms() {
        let t = LieType::new(Family::A, 2, false).unwrap();
        let v = serde_json::to_value(t).unwrap();
        assert_eq!(v, serde_json::json!({"family":"A","rank":2,"twisted":false}));
        let p: PairSet = serde_json::from_str("[[2,3],[1,3]]").unwrap();
        assert_eq!(serde_json::to_string(&p).unwrap(), "[[1,3],[2,3]]");
        assert!(serde_json::from_str::<LieType>(r#"{"family":"E6","rank":4}"#).is_err());
    }
}

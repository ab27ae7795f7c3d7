//! The multiplicity schedule `f(j)` that tunes a fixed-type product to a
//! prescribed abscissa, and the order `≺` on exponent pairs it is built from.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie::{validate_pair_set, LieType, PairSet};
use crate::rational::{self, serde_rational, Rational};

/// Indices up to which nonnegativity of `f` is verified at construction.
pub const VERIFY_HORIZON: u64 = 10_000;

/// `(m, n)` precedes `(m', n')` when `m - n rho > m' - n' rho`, ties broken
/// by the smaller `n`.
pub fn precedes(a: (u32, u32), b: (u32, u32), rho: &Rational) -> bool {
    compare_pairs(a, b, rho) == Ordering::Less
}

pub fn compare_pairs(a: (u32, u32), b: (u32, u32), rho: &Rational) -> Ordering {
    let key = |(m, n): (u32, u32)| Rational::from_integer(m.into()) - rho * Rational::from_integer(n.into());
    key(b).cmp(&key(a)).then(a.1.cmp(&b.1))
}

/// The `≺`-minimal pair of `a`.
pub fn prec_min(a: &PairSet, rho: &Rational) -> Result<(u32, u32)> {
    a.iter()
        .min_by(|x, y| compare_pairs(*x, *y, rho))
        .ok_or_else(|| Error::precondition("prec_min needs a nonempty pair set"))
}

/// `f(j) = n0 k_j - m0 j` for `j >= j0` and `0` below, with
/// `k_j = floor(rho j + 1/2)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ScheduleRepr", into = "ScheduleRepr")]
pub struct Schedule {
    rho: Rational,
    rho0: Rational,
    m0: u32,
    n0: u32,
    j0: u64,
}

#[derive(Serialize, Deserialize)]
struct ScheduleRepr {
    #[serde(with = "serde_rational")]
    rho: Rational,
    #[serde(with = "serde_rational")]
    rho0: Rational,
    m0: u32,
    n0: u32,
    j0: u64,
    #[serde(default = "round_half_up")]
    k_rule: String,
}

fn round_half_up() -> String {
    "round-half-up".into()
}

impl TryFrom<ScheduleRepr> for Schedule {
    type Error = Error;
    fn try_from(r: ScheduleRepr) -> Result<Self> {
        if r.k_rule != "round-half-up" {
            return Err(Error::precondition(format!(
                "unsupported k_rule {:?}; only round-half-up is implemented",
                r.k_rule
            )));
        }
        let s = Schedule::new(r.rho, r.rho0, r.m0, r.n0)?;
        if s.j0 != r.j0 {
            return Err(Error::precondition(format!(
                "j0 = {} disagrees with ceil(1/(rho - rho0)) = {}",
                r.j0, s.j0
            )));
        }
        Ok(s)
    }
}

impl From<Schedule> for ScheduleRepr {
    fn from(s: Schedule) -> Self {
        ScheduleRepr {
            rho: s.rho,
            rho0: s.rho0,
            m0: s.m0,
            n0: s.n0,
            j0: s.j0,
            k_rule: round_half_up(),
        }
    }
}

impl Schedule {
    pub fn new(rho: Rational, rho0: Rational, m0: u32, n0: u32) -> Result<Self> {
        if !rational::is_positive(&rho0) {
            return Err(Error::precondition("rho0 must be positive"));
        }
        if rho <= rho0 {
            return Err(Error::precondition(format!(
                "rho = {} must exceed rho0 = {}",
                rational::format_rational(&rho),
                rational::format_rational(&rho0)
            )));
        }
        if n0 == 0 {
            return Err(Error::precondition("n0 must be positive"));
        }
        if Rational::new(m0.into(), n0.into()) > rho0 {
            return Err(Error::precondition(format!(
                "the pair ({m0},{n0}) has slope above rho0 = {}",
                rational::format_rational(&rho0)
            )));
        }
        let j0 = rational::ceil(&(Rational::from_integer(1.into()) / (&rho - &rho0)))
            .to_u64()
            .ok_or_else(|| Error::Range("j0 does not fit in 64 bits".into()))?;
        let s = Schedule {
            rho,
            rho0,
            m0,
            n0,
            j0,
        };
        s.verify_nonnegative(VERIFY_HORIZON)?;
        Ok(s)
    }

    pub fn rho(&self) -> &Rational {
        &self.rho
    }

    pub fn rho0(&self) -> &Rational {
        &self.rho0
    }

    pub fn pair(&self) -> (u32, u32) {
        (self.m0, self.n0)
    }

    pub fn j0(&self) -> u64 {
        self.j0
    }

    /// `k_j = floor(rho j + 1/2)`, in integer arithmetic.
    pub fn k(&self, j: u64) -> BigInt {
        let (n, d) = (self.rho.numer(), self.rho.denom());
        let two_d: BigInt = d * 2;
        let num: BigInt = n * 2 * BigInt::from(j) + d;
        num.div_floor(&two_d)
    }

    /// `f(j)` as an exact (possibly negative, when misconfigured) integer.
    pub fn f_exact(&self, j: u64) -> BigInt {
        if j < self.j0 {
            return BigInt::from(0);
        }
        BigInt::from(self.n0) * self.k(j) - BigInt::from(self.m0) * BigInt::from(j)
    }

    pub fn f(&self, j: u64) -> u64 {
        self.f_exact(j)
            .to_u64()
            .expect("f(j) is nonnegative and fits in 64 bits")
    }

    /// `lim f(j)/j = n0 rho - m0`.
    pub fn rate(&self) -> Rational {
        Rational::from_integer(self.n0.into()) * &self.rho - Rational::from_integer(self.m0.into())
    }

    /// Checks `f(j) >= 0` exactly for `j <= horizon`; beyond `j0` it also
    /// follows from `f(j) >= j n0 (rho - rho0) - n0/2 >= n0/2`.
    pub fn verify_nonnegative(&self, horizon: u64) -> Result<()> {
        for j in 1..=horizon {
            let f = self.f_exact(j);
            if f.is_negative() {
                return Err(Error::Invariant(format!("f({j}) = {f} is negative")));
            }
        }
        Ok(())
    }
}

/// The schedule for a Lie type, with the canonical pair set by default.
pub fn make_schedule(rho: &Rational, t: &LieType, pairs: Option<&PairSet>) -> Result<Schedule> {
    let canonical = t.canonical_pairs();
    let a = pairs.unwrap_or(&canonical);
    let violations = validate_pair_set(a, t);
    if !violations.is_empty() {
        let list: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
        return Err(Error::precondition(format!("pair set invalid for {t}: {}", list.join("; "))));
    }
    let rho0 = t.rho0();
    if rho <= &rho0 {
        return Err(Error::precondition(format!(
            "rho = {} is not admissible for {t}: it must exceed rk/|Phi^+| = {}",
            rational::format_rational(rho),
            rational::format_rational(&rho0)
        )));
    }
    let (m0, n0) = prec_min(a, rho)?;
    Schedule::new(rho.clone(), rho0, m0, n0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::Family;
    use crate::rational::{int, rat};

    fn pairs(v: &[(u32, u32)]) -> PairSet {
        PairSet::from_pairs(v.iter().copied()).unwrap()
    }

    #[test]
    fn prec_min_examples() {
        assert_eq!(prec_min(&pairs(&[(1, 1)]), &int(7)).unwrap(), (1, 1));
        assert_eq!(prec_min(&pairs(&[(1, 1), (2, 3)]), &int(2)).unwrap(), (1, 1));
        assert_eq!(prec_min(&pairs(&[(1, 1), (2, 2)]), &int(1)).unwrap(), (1, 1));
        assert!(prec_min(&PairSet::default(), &int(1)).is_err());
    }

    #[test]
    fn schedule_examples() {
        let a1 = LieType::a1();
        let s = make_schedule(&int(2), &a1, None).unwrap();
        assert_eq!(s.j0(), 1);
        for j in 1..20 {
            assert_eq!(s.k(j), BigInt::from(2 * j));
            assert_eq!(s.f(j), j);
        }
        let s = make_schedule(&rat(3, 2), &a1, None).unwrap();
        assert_eq!(s.j0(), 2);
        assert_eq!((s.f(1), s.f(2), s.f(3), s.f(4)), (0, 1, 2, 2));
        assert!(make_schedule(&rat(1, 2), &a1, None).is_err());
        assert!(make_schedule(&int(1), &a1, None).is_err());
    }

    #[test]
    fn a2_schedule_rate() {
        let a2 = LieType::untwisted(Family::A, 2).unwrap();
        let s = make_schedule(&rat(3, 2), &a2, None).unwrap();
        assert_eq!(s.pair(), (2, 3));
        assert_eq!(s.rate(), rat(5, 2));
    }

    #[test]
    fn serde_round_trip_and_checks() {
        let s = make_schedule(&rat(3, 2), &LieType::a1(), None).unwrap();
        let v = serde_json::to_value(&s).unwrap();
        assert_eq!(
            v,
            serde_json::json!({"rho":"3/2","rho0":"1","m0":1,"n0":1,"j0":2,"k_rule":"round-half-up"})
        );
        assert_eq!(serde_json::from_value::<Schedule>(v).unwrap(), s);
        let bad = serde_json::json!({"rho":"3/2","rho0":"1","m0":1,"n0":1,"j0":5});
        assert!(serde_json::from_value::<Schedule>(bad).is_err());
        let bad = serde_json::json!({"rho":"3/2","rho0":"1","m0":1,"n0":1,"j0":2,"k_rule":"floor"});
        assert!(serde_json::from_value::<Schedule>(bad).is_err());
    }

    #[test]
    fn rejects_pairs_above_rho0() {
        assert!(Schedule::new(int(3), int(1), 2, 1).is_err());
        assert!(make_schedule(&int(3), &LieType::a1(), Some(&pairs(&[(2, 1)]))).is_err());
    }
}

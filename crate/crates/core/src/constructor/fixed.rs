//! Fixed-type products `prod_j S_lambda(q^j)^(q^f(j))` with a prescribed
//! abscissa, and an exact termwise test of their convergence sums.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::schedule::{make_schedule, Schedule};
use crate::arith::{is_prime, prime_power};
use crate::error::{Error, Result};
use crate::growth::{Flag, GeometricStratum, GroupSpec, Stratum};
use crate::lie::{LieType, PairSet};
use crate::rational::{self, Rational};

/// The field size used for base prime `p`: `q` if given (it must be a power
/// of `p`), else `p`, squared for `A1` when `p` is 2 or 3 to step past the
/// non-quasi-simple `SL2(2)` and `SL2(3)`.
pub fn field_size(t: &LieType, p: u64, q: Option<u64>) -> Result<u64> {
    if !is_prime(p) {
        return Err(Error::precondition(format!("{p} is not prime")));
    }
    match q {
        Some(q) => match prime_power(q) {
            Some((base, _)) if base == p => Ok(q),
            _ => Err(Error::precondition(format!("{q} is not a power of {p}"))),
        },
        None if t.is_a1() && p < 4 => Ok(p * p),
        None => Ok(p),
    }
}

/// A single geometric stratum over `q^j` whose abscissa is exactly `rho`.
pub fn build_fixed_type(rho: &Rational, t: &LieType, p: u64, q: Option<u64>) -> Result<GroupSpec> {
    let q = field_size(t, p, q)?;
    let schedule = make_schedule(rho, t, None)?;
    GroupSpec::new(vec![Stratum::Geometric(GeometricStratum {
        q,
        lie_type: *t,
        flag: Flag::Cover,
        pairs: None,
        schedule: Some(schedule),
        exponent: None,
        j_start: 1,
    })])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TermwiseVerdict {
    Converges,
    Diverges,
    Inconclusive,
}

/// Exact termwise analysis of `sum_j q^(f(j)) sum_(m,n) q^(j(m - n σ))`.
///
/// `exponents[j-1]` is `max_(m,n) (f(j)/j + m - n σ)`, the per-index log-slope
/// `(1/j) log_q` of the leading part of term `j`.
#[derive(Clone, Debug)]
pub struct TermwiseReport {
    pub sigma: Rational,
    pub horizon: u64,
    pub exponents: Vec<Rational>,
    /// From this index on the verdict's bound holds both on the checked
    /// range and, by the closed-form estimate `|k_j/j - rho| <= 1/(2j)`,
    /// for every larger index.
    pub from_index: Option<u64>,
    pub verdict: TermwiseVerdict,
}

fn int(n: impl Into<BigInt>) -> Rational {
    Rational::from_integer(n.into())
}

/// Convergence at `σ = ρ + ε` needs every pair exponent to stay below
/// `-ε/2` from `j >= n0/((2 n_min - 1) ε)` on (there
/// `f(j)/j + m - nσ <= n0/(2j) - nε`);
/// divergence at `σ = ρ - ε` needs the leading pair's exponent to stay
/// nonnegative from `j >= max(j0, 1/(2ε))` on, so the terms do not tend to
/// zero. Both tails follow from the closed form; the checked range must
/// reach the threshold index and agree with it exactly.
pub fn termwise_test(schedule: &Schedule, pairs: &PairSet, sigma: &Rational, horizon: u64) -> Result<TermwiseReport> {
    if pairs.is_empty() {
        return Err(Error::precondition("the pair set must be nonempty"));
    }
    let rho = schedule.rho().clone();
    let (m0, n0) = schedule.pair();
    let exponent_of = |j: u64, (m, n): (u32, u32)| -> Rational {
        Rational::new(schedule.f_exact(j), BigInt::from(j)) + int(m) - sigma * int(n)
    };
    let exponents: Vec<Rational> = (1..=horizon)
        .map(|j| pairs.iter().map(|p| exponent_of(j, p)).max().expect("nonempty"))
        .collect();

    let eps = (sigma - &rho).abs();
    let mut report = TermwiseReport {
        sigma: sigma.clone(),
        horizon,
        exponents,
        from_index: None,
        verdict: TermwiseVerdict::Inconclusive,
    };
    if eps.is_zero() {
        return Ok(report);
    }
    if sigma > &rho {
        let n_min = pairs.min_n().expect("nonempty");
        let start = rational::ceil(&(int(n0) / (int(2 * n_min - 1) * &eps))).max(BigInt::from(1));
        let Ok(start) = u64::try_from(start) else { return Ok(report) };
        let bound = -&eps / int(2);
        if start <= horizon && report.exponents[(start - 1) as usize..].iter().all(|e| e <= &bound) {
            report.from_index = Some(start);
            report.verdict = TermwiseVerdict::Converges;
        }
    } else {
        let start = rational::ceil(&(int(1) / (int(2) * &eps))).max(BigInt::from(schedule.j0())).max(BigInt::from(1));
        let Ok(start) = u64::try_from(start) else { return Ok(report) };
        let zero = int(0);
        if start <= horizon
            && (start..=horizon).all(|j| exponent_of(j, (m0, n0)) >= zero)
        {
            report.from_index = Some(start);
            report.verdict = TermwiseVerdict::Diverges;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::growth::exact_abscissa;
    use crate::lie::Family;
    use crate::rational::rat;
    use crate::Abscissa;

    #[test]
    fn fixed_type_examples() {
        let cases = [
            (rat(2, 1), LieType::a1(), 5),
            (rat(3, 2), LieType::untwisted(Family::A, 2).unwrap(), 5),
            (rat(1, 15) + rat(1, 100), LieType::untwisted(Family::E8, 8).unwrap(), 7),
        ];
        for (rho, t, p) in cases {
            let spec = build_fixed_type(&rho, &t, p, None).unwrap();
            assert_eq!(exact_abscissa(&spec).abscissa, Abscissa::Finite(rho.clone()), "{t}");
        }
        assert!(build_fixed_type(&rat(1, 2), &LieType::a1(), 5, None).is_err());
        assert!(build_fixed_type(&rat(2, 1), &LieType::a1(), 6, None).is_err());
        assert!(build_fixed_type(&rat(2, 1), &LieType::a1(), 5, Some(49)).is_err());
    }

    #[test]
    fn small_primes_step_past_tits_exceptions() {
        assert_eq!(field_size(&LieType::a1(), 2, None).unwrap(), 4);
        assert_eq!(field_size(&LieType::a1(), 3, None).unwrap(), 9);
        assert_eq!(field_size(&LieType::a1(), 5, Some(25)).unwrap(), 25);
    }

    #[test]
    fn termwise_two_sided() {
        let t = LieType::a1();
        let s = make_schedule(&rat(2, 1), &t, None).unwrap();
        let a = t.canonical_pairs();
        let up = termwise_test(&s, &a, &rat(9, 4), 200).unwrap();
        assert_eq!(up.verdict, TermwiseVerdict::Converges);
        let down = termwise_test(&s, &a, &rat(7, 4), 200).unwrap();
        assert_eq!(down.verdict, TermwiseVerdict::Diverges);
        let at = termwise_test(&s, &a, &rat(2, 1), 200).unwrap();
        assert_eq!(at.verdict, TermwiseVerdict::Inconclusive);
        // eventually at most -n0 ε / 2 for the leading pair
        assert!(up.exponents[100..].iter().all(|e| e <= &rat(-1, 8)));
    }
}

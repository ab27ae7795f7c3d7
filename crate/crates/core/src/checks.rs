//! A bundled, deterministic invariant suite.

use std::time::Instant;

use num_bigint::BigUint;
use serde_json::{json, Value};

use crate::arith::prime_power;
use crate::char_tables::{cover_degree_check, min_degree_closed_form, DegreeTable};
use crate::constructor::{build_fixed_type, make_schedule, precedes, termwise_test, TermwiseVerdict};
use crate::dirichlet::{convolve, power_one_plus, Backend, DirichletSeries, Multiplicity};
use crate::error::Result;
use crate::finite_groups::ConcreteGroup;
use crate::growth::{cover_mn_comparison, exact_abscissa, FactorSpec, Flag, GroupSpec};
use crate::lie::{Family, LieType};
use crate::rational::{int, rat};
use crate::Abscissa;

#[derive(Clone, Debug)]
pub struct CheckResult {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    pub millis: u128,
}

#[derive(Clone, Debug, Default)]
pub struct CheckSuite {
    pub results: Vec<CheckResult>,
}

impl CheckSuite {
    pub fn pass(&self) -> bool {
        self.results.iter().all(|r| r.pass)
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        for r in &self.results {
            let status = if r.pass { "PASS" } else { "FAIL" };
            out.push_str(&format!("{status} {} ({} ms): {}\n", r.name, r.millis, r.detail));
        }
        let passed = self.results.iter().filter(|r| r.pass).count();
        out.push_str(&format!("{passed}/{} checks passed\n", self.results.len()));
        out
    }

    pub fn to_json(&self) -> Value {
        json!({
            "pass": self.pass(),
            "checks": self.results.iter().map(|r| json!({
                "name": r.name,
                "status": if r.pass { "pass" } else { "fail" },
                "detail": r.detail,
                "millis": r.millis as u64,
            })).collect::<Vec<_>>(),
        })
    }
}

type Check = (&'static str, fn() -> Result<(bool, String)>);

const CHECKS: &[Check] = &[
    ("degree-table-mass", degree_table_mass),
    ("sl2-primes-closed-form", sl2_primes_closed_form),
    ("fixed-type-abscissa", fixed_type_abscissa),
    ("convolution-laws", convolution_laws),
    ("exact-log-agreement", exact_log_agreement),
    ("pair-order-total", pair_order_total),
    ("schedule-nonnegative", schedule_nonnegative),
    ("product-rule", product_rule),
    ("cover-quotient-counts", cover_quotient_counts),
    ("a5-generators", a5_generators),
];

/// Runs every check; errors are reported as failures.
pub fn run_checks() -> CheckSuite {
    let results = CHECKS
        .iter()
        .map(|(name, f)| {
            let start = Instant::now();
            let (pass, detail) = match f() {
                Ok(r) => r,
                Err(e) => (false, format!("error: {e}")),
            };
            CheckResult {
                name,
                pass,
                detail,
                millis: start.elapsed().as_millis(),
            }
        })
        .collect();
    CheckSuite { results }
}

fn big(n: u64) -> BigUint {
    BigUint::from(n)
}

fn degree_table_mass() -> Result<(bool, String)> {
    let mut bad = Vec::new();
    let mut seen = 0;
    for q in 4..=81u64 {
        if prime_power(q).is_none() {
            continue;
        }
        seen += 1;
        let sl = DegreeTable::sl2(q)?;
        let psl = DegreeTable::psl2(q)?;
        let ok = sl.mass() == *sl.order()
            && psl.mass() == *psl.order()
            && cover_degree_check(q)?
            && sl.min_nontrivial_degree()? == min_degree_closed_form(q, true)
            && psl.min_nontrivial_degree()? == min_degree_closed_form(q, false);
        if !ok {
            bad.push(q);
        }
    }
    Ok((bad.is_empty(), format!("{seen} prime powers in [4, 81], failures {bad:?}")))
}

fn sl2_primes_closed_form() -> Result<(bool, String)> {
    let mut bad = Vec::new();
    for d in 2..=7u32 {
        let got = exact_abscissa(&GroupSpec::sl2_primes(d)?).abscissa;
        if got != Abscissa::Finite(int(3 * d as i64 - 4)) {
            bad.push((d, got.to_string()));
        }
    }
    Ok((bad.is_empty(), format!("abscissa 3d-4 for d = 2..7, failures {bad:?}")))
}

fn fixed_type_abscissa() -> Result<(bool, String)> {
    let types = [
        LieType::a1(),
        LieType::untwisted(Family::A, 3)?,
        LieType::untwisted(Family::B, 2)?,
        LieType::untwisted(Family::D, 4)?,
        LieType::untwisted(Family::G2, 2)?,
        LieType::untwisted(Family::E8, 8)?,
    ];
    let mut count = 0;
    let mut bad = Vec::new();
    for t in types {
        for extra in [rat(1, 7), rat(1, 1), rat(5, 2)] {
            let rho = t.rho0() + extra;
            let spec = build_fixed_type(&rho, &t, 5, None)?;
            count += 1;
            if exact_abscissa(&spec).abscissa != Abscissa::Finite(rho.clone()) {
                bad.push(format!("{t} at {rho}"));
                continue;
            }
            let s = make_schedule(&rho, &t, None)?;
            let pairs = t.canonical_pairs();
            let up = termwise_test(&s, &pairs, &(&rho + rat(1, 4)), 200)?.verdict;
            let down = termwise_test(&s, &pairs, &(&rho - rat(1, 4)), 200)?.verdict;
            if up != TermwiseVerdict::Converges || down != TermwiseVerdict::Diverges {
                bad.push(format!("{t} termwise at {rho}"));
            }
        }
    }
    Ok((bad.is_empty(), format!("{count} fixed-type specs, failures {bad:?}")))
}

fn small_series(seed: u64, cutoff: u64) -> Result<DirichletSeries> {
    let entries = (2..=cutoff).filter_map(|d| {
        let m = (seed.wrapping_mul(31).wrapping_add(d * 17)) % 5;
        (m > 0).then(|| (big(d), big(m)))
    });
    let entries = std::iter::once((big(1), big(1))).chain(entries);
    DirichletSeries::from_exact(big(cutoff), entries)
}

fn convolution_laws() -> Result<(bool, String)> {
    let n = big(40);
    let mut ok = true;
    for seed in 0..6u64 {
        let a = small_series(seed, 40)?;
        let b = small_series(seed + 11, 40)?;
        let c = small_series(seed + 23, 40)?;
        ok &= convolve(&a, &b, &n)? == convolve(&b, &a, &n)?;
        ok &= convolve(&convolve(&a, &b, &n)?, &c, &n)? == convolve(&a, &convolve(&b, &c, &n)?, &n)?;
        let base = small_series(seed, 12)?;
        let n12 = big(12);
        let lhs = power_one_plus(&base, &Multiplicity::int(3 + seed), &n12)?;
        let rhs = convolve(
            &power_one_plus(&base, &Multiplicity::int(1), &n12)?,
            &power_one_plus(&base, &Multiplicity::int(2 + seed), &n12)?,
            &n12,
        )?;
        ok &= lhs == rhs;
    }
    Ok((ok, "commutativity, associativity and power additivity on 6 seeds".into()))
}

fn exact_log_agreement() -> Result<(bool, String)> {
    let n = big(30);
    let base = small_series(3, 10)?;
    let mut worst: f64 = 0.0;
    for m in [1u64, 7, 1000, 1_000_000] {
        let exact = power_one_plus(&base, &Multiplicity::int(m), &n)?;
        let log = power_one_plus(&base.to_backend(Backend::LogDomain)?, &Multiplicity::int(m), &n)?;
        for (d, lm) in exact.ln_entries() {
            let other = log.ln_at(&d);
            worst = worst.max(((other - lm).exp() - 1.0).abs());
        }
    }
    Ok((worst <= 1e-9, format!("max relative deviation {worst:.3e}")))
}

fn pair_order_total() -> Result<(bool, String)> {
    let pairs: Vec<(u32, u32)> = (1..=6).flat_map(|n| (0..=6).map(move |m| (m, n))).collect();
    let mut ok = true;
    for rho in [rat(1, 3), rat(1, 1), rat(3, 2), rat(7, 3)] {
        for &a in &pairs {
            ok &= !precedes(a, a, &rho);
            for &b in &pairs {
                if a != b {
                    ok &= precedes(a, b, &rho) != precedes(b, a, &rho);
                }
                for &c in &pairs {
                    if precedes(a, b, &rho) && precedes(b, c, &rho) {
                        ok &= precedes(a, c, &rho);
                    }
                }
            }
        }
    }
    Ok((ok, format!("irreflexive, total and transitive on {} pairs", pairs.len())))
}

fn schedule_nonnegative() -> Result<(bool, String)> {
    let mut ok = true;
    for (rho, t) in [
        (rat(2, 1), LieType::a1()),
        (rat(3, 2), LieType::untwisted(Family::A, 2)?),
        (rat(1, 15) + rat(1, 100), LieType::untwisted(Family::E8, 8)?),
    ] {
        let s = make_schedule(&rho, &t, None)?;
        ok &= (1..=10_000u64).all(|j| s.f_exact(j) >= 0.into());
    }
    Ok((ok, "f(j) >= 0 for j <= 10^4 on 3 schedules".into()))
}

fn product_rule() -> Result<(bool, String)> {
    let parts: Vec<GroupSpec> = vec![
        GroupSpec::sl2_primes(3)?,
        GroupSpec::sl2_primes(5)?,
        build_fixed_type(&rat(5, 2), &LieType::a1(), 7, None)?,
        build_fixed_type(&rat(3, 2), &LieType::untwisted(Family::A, 2)?, 5, None)?,
        GroupSpec::finite(vec![FactorSpec::a1(11, Flag::Cover)])?,
    ];
    let mut ok = true;
    for a in &parts {
        for b in &parts {
            let (ra, rb) = (exact_abscissa(a).abscissa, exact_abscissa(b).abscissa);
            ok &= exact_abscissa(&a.union(b)).abscissa == ra.max(rb);
        }
    }
    Ok((ok, format!("{} ordered pairs", parts.len() * parts.len())))
}

fn cover_quotient_counts() -> Result<(bool, String)> {
    let factors = [5u64, 7, 9, 11, 13]
        .iter()
        .enumerate()
        .map(|(i, &q)| FactorSpec::a1(q, if i % 2 == 0 { Flag::Cover } else { Flag::Simple }))
        .collect();
    let spec = GroupSpec::finite(factors)?;
    let mut bad = Vec::new();
    for n in 1..=20 {
        if !cover_mn_comparison(&spec, n)?.pass {
            bad.push(n);
        }
    }
    Ok((bad.is_empty(), format!("m_(n^2) >= m_n(cover) for n <= 20, failures {bad:?}")))
}

fn a5_generators() -> Result<(bool, String)> {
    let a5 = ConcreteGroup::catalog("A5")?;
    let phi2 = a5.generating_tuple_count(2)?;
    let aut = a5.automorphism_count()?;
    let one = a5.min_generators_power(&big(1))?.d;
    let sixty = a5.min_generators_power(&big(60))?.d;
    let ok = phi2 == big(2280) && aut == 120 && one == 2 && sixty == 3;
    Ok((ok, format!("phi_2 = {phi2}, |Aut| = {aut}, d(A5) = {one}, d(A5^60) = {sixty}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes() {
        let suite = run_checks();
        assert!(suite.pass(), "{}", suite.summary());
        assert_eq!(suite.results.len(), CHECKS.len());
    }

}

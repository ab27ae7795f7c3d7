//! The growing-rank diagonal construction `G = prod_m K_m`.
//!
//! Stage `m` starts from the fixed-type product `H_m` with abscissa
//! `rho_m`, deletes the leading factors whose minimal dimension is at most
//! `n(m-1)`, and keeps a finite quotient `K_m`: the first remaining factor
//! with as many copies as the checks allow. With `L_m = K_1 x ... x K_m`
//! each stage certifies
//!
//! * `R_{n(m-1)}(L~_m) = R_{n(m-1)}(L~_{m-1})` exactly;
//! * `log R_n(L~_m) / log n <= rho` for all `n > n(m-1)`, by an exact sweep
//!   of the step points up to the budget together with the bound
//!   `R_n <= n^σ ζ(σ)` beyond it;
//! * `log R_{n(m)}(L_m) / log n(m) >= rho_m - 1/m` for some `n(m) > n(m-1)`.

use num_bigint::BigUint;
use num_traits::One;
use serde_json::{json, Value};

use super::fixed::{build_fixed_type, field_size};
use crate::arith::big_ln;
use crate::dirichlet::{Backend, Count, Multiplicity};
use crate::error::{Error, Result};
use crate::growth::{
    truncated_zeta_with, DiagonalRule, FactorSpec, Flag, GroupSpec, Member, Stratum, ZetaOptions,
};
use crate::lie::{Family, LieType};
use crate::rational::{self, format_rational, Rational};

/// How many indices past the first admissible one a stage may try.
const MAX_INDEX_SHIFT: u64 = 8;
/// Grid resolution for the analytic bound `R_n <= n^σ ζ(σ)`.
const SIGMA_STEPS: u32 = 256;
const SLOPE_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StageTarget {
    pub rho_m: Rational,
    pub lie_type: LieType,
    pub p: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagonalPlan {
    pub rho: Rational,
    pub targets: Vec<StageTarget>,
    /// Rule continuing the stages beyond `targets`; its `certified_below`
    /// is filled in by the construction.
    pub tail: Option<DiagonalRule>,
    pub n_budget: BigUint,
}

impl DiagonalPlan {
    /// Targets `rho - gap/m` with types `family` of rank `m + rank_offset`
    /// over `p`, for `m = 1..=stages`, continued by the same rule.
    pub fn harmonic(
        rho: Rational,
        gap: Rational,
        family: Family,
        rank_offset: u32,
        p: u64,
        stages: u32,
        n_budget: BigUint,
    ) -> Result<Self> {
        let rule = DiagonalRule {
            rho: rho.clone(),
            gap,
            family,
            rank_offset,
            p,
            first_stage: 1,
            certified_below: BigUint::one(),
        };
        let targets = (1..=stages)
            .map(|m| {
                Ok(StageTarget {
                    rho_m: rule.stage_rho(m),
                    lie_type: rule.stage_type(m)?,
                    p,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(DiagonalPlan {
            rho,
            targets,
            tail: Some(DiagonalRule {
                first_stage: stages + 1,
                ..rule
            }),
            n_budget,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.targets.is_empty() {
            return Err(Error::precondition("a diagonal plan needs at least one stage"));
        }
        if self.n_budget < BigUint::from(2u32) {
            return Err(Error::precondition("the dimension budget must be at least 2"));
        }
        for (i, t) in self.targets.iter().enumerate() {
            let m = i + 1;
            if t.rho_m >= self.rho {
                return Err(Error::precondition(format!(
                    "stage {m}: target {} must stay below rho = {}",
                    format_rational(&t.rho_m),
                    format_rational(&self.rho)
                )));
            }
            if t.rho_m <= t.lie_type.rho0() {
                return Err(Error::precondition(format!(
                    "stage {m}: target {} does not exceed rho0({}) = {}",
                    format_rational(&t.rho_m),
                    t.lie_type,
                    format_rational(&t.lie_type.rho0())
                )));
            }
            if i > 0 {
                let prev = &self.targets[i - 1];
                if t.rho_m <= prev.rho_m {
                    return Err(Error::precondition(format!("stage {m}: targets must increase strictly")));
                }
                if t.lie_type.rank() <= prev.lie_type.rank() {
                    return Err(Error::precondition(format!("stage {m}: ranks must increase strictly")));
                }
            }
        }
        if let Some(tail) = &self.tail {
            if tail.rho != self.rho {
                return Err(Error::precondition("the tail rule must share the limit rho"));
            }
            let next = self.targets.len() as u32 + 1;
            if tail.first_stage != next {
                return Err(Error::precondition(format!("the tail rule must start at stage {next}")));
            }
            let last = self.targets.last().expect("nonempty");
            if tail.stage_rho(next) <= last.rho_m || tail.stage_type(next)?.rank() <= last.lie_type.rank() {
                return Err(Error::precondition("the tail rule must continue the targets monotonically"));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckRecord {
    pub name: &'static str,
    pub pass: bool,
    pub evidence: &'static str,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StageRecord {
    pub m: usize,
    pub rho_m: Rational,
    pub lie_type: LieType,
    /// Field size of the kept factor.
    pub q: u64,
    /// Number of leading factors of `H_m` deleted.
    pub dropped: u64,
    /// Number of factors of `H_m` kept in `K_m`.
    pub kept: u64,
    /// `K_m` takes `base^exponent` copies; `H_m` has `base^schedule_exponent`.
    pub base: u64,
    pub exponent: u64,
    pub schedule_exponent: u64,
    pub n_prev: BigUint,
    pub n_m: BigUint,
    pub slope_at_n_m: f64,
    pub max_slope_after_prev: f64,
    pub analytic_sigma: f64,
    pub analytic_threshold: f64,
    pub checks: Vec<CheckRecord>,
}

impl StageRecord {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "m": self.m,
            "rho_m": format_rational(&self.rho_m),
            "lie_type": self.lie_type,
            "q": self.q,
            "dropped": self.dropped,
            "kept": self.kept,
            "multiplicity": {"base": self.base, "exponent": self.exponent},
            "schedule_exponent": self.schedule_exponent,
            "n_prev": self.n_prev.to_string(),
            "n_m": self.n_m.to_string(),
            "slope_at_n_m": self.slope_at_n_m,
            "max_slope_after_prev": self.max_slope_after_prev,
            "analytic_bound": {"sigma": self.analytic_sigma, "threshold": self.analytic_threshold},
            "checks": self.checks.iter().map(|c| json!({
                "name": c.name,
                "status": if c.pass { "pass" } else { "fail" },
                "evidence": c.evidence,
                "detail": c.detail,
            })).collect::<Vec<_>>(),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalCertificate {
    pub rho: Rational,
    pub n_budget: BigUint,
    pub stages: Vec<StageRecord>,
    pub tail: Option<DiagonalRule>,
}

impl DiagonalCertificate {
    pub fn passed(&self) -> bool {
        self.stages.iter().all(StageRecord::passed)
    }

    pub fn checkpoints(&self) -> Vec<BigUint> {
        std::iter::once(BigUint::one())
            .chain(self.stages.iter().map(|s| s.n_m.clone()))
            .collect()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "rho": format_rational(&self.rho),
            "n_budget": self.n_budget.to_string(),
            "stages": self.stages.iter().map(StageRecord::to_json).collect::<Vec<_>>(),
            "tail": self.tail,
        })
    }
}

fn spec_of(factors: &[FactorSpec], flag: Flag) -> GroupSpec {
    GroupSpec {
        strata: vec![Stratum::Finite {
            factors: factors.iter().map(|f| FactorSpec { flag, ..f.clone() }).collect(),
        }],
    }
}

fn series_with(factors: &[FactorSpec], flag: Flag, n: &BigUint, backend: Backend) -> Result<crate::DirichletSeries> {
    let opts = ZetaOptions {
        backend: Some(backend),
        ..ZetaOptions::default()
    };
    Ok(truncated_zeta_with(&spec_of(factors, flag), n, u64::MAX, &opts)?.series)
}

/// `ln ζ(σ)` of a finite product from its complete factor data.
fn ln_zeta(factors: &[FactorSpec], flag: Flag, sigma: f64) -> Result<f64> {
    let mut total = 0.0;
    for f in factors {
        let member = Member::from(&FactorSpec { flag, ..f.clone() });
        let one_copy = member.ln_zeta(sigma)?;
        if one_copy > 0.0 {
            total += (member.multiplicity.ln() + one_copy.ln()).exp();
        }
    }
    Ok(total)
}

/// Slopes at `n_prev + 1` and at every step point in `(n_prev, budget]`.
fn slopes_after(series: &crate::DirichletSeries, n_prev: &BigUint) -> Result<Vec<(BigUint, f64)>> {
    let start = n_prev + 1u32;
    let slope = |r: &Count, n: &BigUint| r.ln() / big_ln(n);
    let mut out = vec![(start.clone(), slope(&series.cumulative(&start)?, &start))];
    for (d, r) in series.cumulative_profile() {
        if d > start {
            let s = slope(&r, &d);
            out.push((d, s));
        }
    }
    Ok(out)
}

struct Candidate {
    record: StageRecord,
    factor: FactorSpec,
}

fn evaluate_candidate(
    plan: &DiagonalPlan,
    m: usize,
    target: &StageTarget,
    prev: &[FactorSpec],
    factor: FactorSpec,
    meta: (u64, u64, u64, u64),
    n_prev: &BigUint,
) -> Result<Candidate> {
    let (dropped, base, exponent, schedule_exponent) = meta;
    let rho = rational::to_f64(&plan.rho);
    let mut with: Vec<FactorSpec> = prev.to_vec();
    with.push(factor.clone());

    // (i): nothing new at or below n(m-1), compared exactly
    let before = series_with(prev, Flag::Cover, n_prev, Backend::Exact)?.cumulative(n_prev)?;
    let after = series_with(&with, Flag::Cover, n_prev, Backend::Exact)?.cumulative(n_prev)?;
    let no_new = CheckRecord {
        name: "no-new-small-reps",
        pass: before == after,
        evidence: "exact",
        detail: format!("R_{n_prev}(L~_{m}) = {after}, R_{n_prev}(L~_{}) = {before}", m - 1),
    };

    // (ii) upper: sweep to the budget, analytic bound beyond it
    let cover = series_with(&with, Flag::Cover, &plan.n_budget, Backend::LogDomain)?;
    let cover_slopes = slopes_after(&cover, n_prev)?;
    let (worst_n, worst) = cover_slopes
        .iter()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(n, s)| (n.clone(), *s))
        .expect("at least one candidate");
    let sweep_ok = worst <= rho * (1.0 - SLOPE_TOL);
    let mut best = (f64::NAN, f64::INFINITY);
    for k in 1..SIGMA_STEPS {
        let sigma = rho * k as f64 / SIGMA_STEPS as f64;
        let ln_z = ln_zeta(&with, Flag::Cover, sigma)?;
        // slack against rounding in the evaluation
        let threshold = ((ln_z * (1.0 + 1e-9) + 1e-12) / (rho - sigma)).exp();
        if threshold < best.1 {
            best = (sigma, threshold);
        }
    }
    let budget = big_ln(&plan.n_budget).exp();
    let analytic_ok = best.1 <= budget;
    let upper = CheckRecord {
        name: "never-larger-than-rho",
        pass: sweep_ok && analytic_ok,
        evidence: "exact-sweep+analytic",
        detail: format!(
            "max slope {worst:.6} at n = {worst_n} over ({n_prev}, {}]; R_n <= n^{:.4} zeta({:.4}) <= n^rho for n >= {:.4e}",
            plan.n_budget, best.0, best.0, best.1
        ),
    };

    // (ii) close to rho_m, on the simple quotients
    let simple = series_with(&with, Flag::Simple, &plan.n_budget, Backend::LogDomain)?;
    let simple_slopes = slopes_after(&simple, n_prev)?;
    let (n_m, slope_at) = simple_slopes
        .iter()
        .fold(None::<(BigUint, f64)>, |acc, (n, s)| match acc {
            Some((_, bs)) if *s <= bs => acc,
            _ => Some((n.clone(), *s)),
        })
        .expect("at least one candidate");
    let goal = rational::to_f64(&target.rho_m) - 1.0 / m as f64;
    let close = CheckRecord {
        name: "close-to-rho-m",
        pass: slope_at >= goal,
        evidence: "log-domain",
        detail: format!("slope {slope_at:.6} at n({m}) = {n_m} against rho_m - 1/m = {goal:.6}"),
    };

    let q = factor.q;
    Ok(Candidate {
        record: StageRecord {
            m,
            rho_m: target.rho_m.clone(),
            lie_type: target.lie_type,
            q,
            dropped,
            kept: 1,
            base,
            exponent,
            schedule_exponent,
            n_prev: n_prev.clone(),
            n_m,
            slope_at_n_m: slope_at,
            max_slope_after_prev: worst,
            analytic_sigma: best.0,
            analytic_threshold: best.1,
            checks: vec![no_new, upper, close],
        },
        factor,
    })
}

/// Runs the stages of `plan`; returns the union spec (finite quotients
/// `K_1, ..., K_M` followed by the tail rule) and the certificate.
pub fn build_diagonal(plan: &DiagonalPlan) -> Result<(GroupSpec, DiagonalCertificate)> {
    plan.validate()?;
    let mut n_prev = BigUint::one();
    let mut kept: Vec<FactorSpec> = Vec::new();
    let mut stages: Vec<StageRecord> = Vec::new();
    for (i, target) in plan.targets.iter().enumerate() {
        let m = i + 1;
        if n_prev >= plan.n_budget {
            return Err(Error::Budget(format!(
                "stage {m}: n({}) = {n_prev} already exhausts the budget {}",
                m - 1,
                plan.n_budget
            )));
        }
        let h = build_fixed_type(&target.rho_m, &target.lie_type, target.p, None)?;
        let Stratum::Geometric(g) = &h.strata[0] else {
            unreachable!("fixed-type specs have one geometric stratum")
        };
        let q = field_size(&target.lie_type, target.p, None)?;

        // first index whose factor has no nontrivial representation of
        // dimension <= n(m-1)
        let mut j = 1u64;
        loop {
            let f = FactorSpec::new(target.lie_type, checked_pow(q, j)?, Flag::Cover, Multiplicity::one());
            if !target.lie_type.is_tits_exception(f.q) && Member::from(&f).min_dimension() > n_prev {
                break;
            }
            j += 1;
        }

        let mut chosen: Option<Candidate> = None;
        let mut last_failure: Option<StageRecord> = None;
        'search: for jj in j..j + MAX_INDEX_SHIFT {
            let qj = checked_pow(q, jj)?;
            if target.lie_type.is_tits_exception(qj) {
                continue;
            }
            let full = g.f(jj).ok_or_else(|| Error::Range(format!("f({jj}) overflows")))?;
            // the largest multiplicity that keeps (i) and the upper bound
            for e in (0..=full).rev() {
                let factor = FactorSpec::new(target.lie_type, qj, Flag::Simple, Multiplicity::power(q, e));
                let c = evaluate_candidate(plan, m, target, &kept, factor, (jj - 1, q, e, full), &n_prev)?;
                if c.record.checks[0].pass && c.record.checks[1].pass {
                    if c.record.checks[2].pass {
                        chosen = Some(c);
                        break 'search;
                    }
                    last_failure = Some(c.record);
                    break;
                }
                last_failure = Some(c.record);
            }
        }
        let Some(c) = chosen else {
            let partial = last_failure.map(|r| r.to_json()).unwrap_or(Value::Null);
            return Err(Error::Budget(format!(
                "stage {m}: no finite quotient satisfies all checks within the budget {}; partial stage: {partial}",
                plan.n_budget
            )));
        };
        n_prev = c.record.n_m.clone();
        kept.push(c.factor);
        stages.push(c.record);
    }

    let tail = plan.tail.clone().map(|t| DiagonalRule {
        certified_below: n_prev.clone(),
        ..t
    });
    let mut strata: Vec<Stratum> = kept
        .iter()
        .map(|f| Stratum::Finite { factors: vec![f.clone()] })
        .collect();
    if let Some(t) = &tail {
        strata.push(Stratum::Diagonal(t.clone()));
    }
    let spec = GroupSpec::new(strata)?;
    Ok((
        spec,
        DiagonalCertificate {
            rho: plan.rho.clone(),
            n_budget: plan.n_budget.clone(),
            stages,
            tail,
        },
    ))
}

fn checked_pow(q: u64, j: u64) -> Result<u64> {
    u32::try_from(j)
        .ok()
        .and_then(|j| q.checked_pow(j))
        .ok_or_else(|| Error::Range(format!("{q}^{j} does not fit in 64 bits")))
}

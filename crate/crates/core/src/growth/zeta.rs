//! Truncated zeta functions of specs, factor counts `m_n` and empirical
//! slopes `log R_n / log n`.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use super::{expand, GroupSpec, Member};
use crate::arith::{ceil_sqrt, log_add_exp};
use crate::dirichlet::{convolve, power_one_plus, Backend, Count, DirichletSeries};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct ZetaOptions {
    /// Switch to the log-domain backend when some multiplicity `M` has
    /// `ln M` above this.
    pub log_threshold: f64,
    /// Force a backend regardless of the threshold.
    pub backend: Option<Backend>,
}

impl Default for ZetaOptions {
    fn default() -> Self {
        ZetaOptions {
            log_threshold: 64.0 * std::f64::consts::LN_2,
            backend: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct TruncatedZeta {
    pub series: DirichletSeries,
    /// Reasons the series may be incomplete below the cutoff.
    pub warnings: Vec<String>,
}

impl TruncatedZeta {
    pub fn is_exact(&self) -> bool {
        self.warnings.is_empty()
    }
}

/// The zeta function of `spec` restricted to dimensions `<= n`, using the
/// first `horizon` members of every infinite stratum.
pub fn truncated_zeta(spec: &GroupSpec, n: &BigUint, horizon: u64) -> Result<TruncatedZeta> {
    truncated_zeta_with(spec, n, horizon, &ZetaOptions::default())
}

pub fn truncated_zeta_with(
    spec: &GroupSpec,
    n: &BigUint,
    horizon: u64,
    opts: &ZetaOptions,
) -> Result<TruncatedZeta> {
    if n.is_zero() || horizon == 0 {
        return Err(Error::precondition("the cutoff N and the horizon J must be positive"));
    }
    let mut members: Vec<Member> = Vec::new();
    let mut warnings = Vec::new();
    for (i, s) in spec.strata.iter().enumerate() {
        let e = expand(s, n, horizon)?;
        if !e.complete {
            warnings.push(format!(
                "stratum {i} ({}): truncation not exact, members with dimensions <= {n} lie beyond the horizon",
                s.kind()
            ));
        }
        members.extend(e.members);
    }
    let backend = opts.backend.unwrap_or_else(|| {
        if members.iter().any(|m| m.multiplicity.ln() > opts.log_threshold) {
            Backend::LogDomain
        } else {
            Backend::Exact
        }
    });
    let factors: Vec<DirichletSeries> = members
        .par_iter()
        .map(|m| member_series(m, n, backend))
        .collect::<Result<_>>()?;
    let mut acc = DirichletSeries::one(n.clone(), backend);
    for f in &factors {
        acc = convolve(&acc, f, n)?;
    }
    Ok(TruncatedZeta {
        series: acc,
        warnings,
    })
}

pub(crate) fn member_series(m: &Member, n: &BigUint, backend: Backend) -> Result<DirichletSeries> {
    let base = m.base_series(n)?.to_backend(backend)?;
    // ln M == 0 exactly when M == 1
    if m.multiplicity.ln() == 0.0 {
        return Ok(base);
    }
    power_one_plus(&base, &m.multiplicity, n)
}

/// Total multiplicity of the factors whose minimal nontrivial dimension is
/// at most `n`.
pub fn m_n(spec: &GroupSpec, n: &BigUint) -> Result<Count> {
    let mut members = Vec::new();
    for (i, s) in spec.strata.iter().enumerate() {
        let e = expand(s, n, u64::MAX)?;
        if !e.complete {
            return Err(Error::Budget(format!(
                "stratum {i} ({}) is not expanded up to dimension {n}",
                s.kind()
            )));
        }
        members.extend(e.members);
    }
    // exact unless some multiplicity would take more than a megabit
    if members.iter().all(|m| m.multiplicity.ln() < 1.0e6 * std::f64::consts::LN_2) {
        let total = members
            .iter()
            .fold(BigUint::zero(), |acc, m| acc + m.multiplicity.to_biguint());
        Ok(Count::Exact(total))
    } else {
        let ln = members
            .iter()
            .fold(f64::NEG_INFINITY, |acc, m| log_add_exp(acc, m.multiplicity.ln()));
        Ok(Count::Log(ln))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SlopeRow {
    pub n: BigUint,
    pub log10_r: f64,
    pub slope: f64,
}

#[derive(Clone, Debug)]
pub struct SlopeReport {
    pub cutoff: BigUint,
    pub rows: Vec<SlopeRow>,
    pub window_start: BigUint,
    pub window_max: f64,
    pub window_argmax: BigUint,
    pub warnings: Vec<String>,
}

impl SlopeReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,log10_R_n,slope\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{}\n", r.n, r.log10_r, r.slope));
        }
        out
    }

    pub fn to_json(&self) -> Value {
        json!({
            "cutoff": self.cutoff.to_string(),
            "window_start": self.window_start.to_string(),
            "window_max": self.window_max,
            "window_argmax": self.window_argmax.to_string(),
            "warnings": self.warnings,
            "rows": self.rows.iter().map(|r| json!([r.n.to_string(), r.log10_r, r.slope])).collect::<Vec<_>>(),
        })
    }
}

fn slope(r: &Count, n: &BigUint) -> f64 {
    let ln_n = crate::arith::big_ln(n);
    if ln_n == 0.0 {
        0.0
    } else {
        r.ln() / ln_n
    }
}

/// Slopes `log R_n / log n` at every breakpoint of the truncated series and
/// their maximum over the window `[ceil(sqrt N), N]`.
pub fn empirical_slope(spec: &GroupSpec, n: &BigUint) -> Result<SlopeReport> {
    let tz = truncated_zeta(spec, n, u64::MAX)?;
    slope_report(&tz.series, n, tz.warnings)
}

pub(crate) fn slope_report(series: &DirichletSeries, n: &BigUint, warnings: Vec<String>) -> Result<SlopeReport> {
    let one = BigUint::one();
    let mut rows = Vec::new();
    for (d, r) in series.cumulative_profile() {
        if d > one {
            rows.push(SlopeRow {
                slope: slope(&r, &d),
                log10_r: r.log10(),
                n: d,
            });
        }
    }
    if n > &one && rows.last().map(|r| &r.n) != Some(n) {
        let r = series.cumulative(n)?;
        rows.push(SlopeRow {
            slope: slope(&r, n),
            log10_r: r.log10(),
            n: n.clone(),
        });
    }
    let window_start = ceil_sqrt(n).max(BigUint::from(2u32)).min(n.clone());
    let mut window_max = 0.0;
    let mut window_argmax = window_start.clone();
    if n > &one {
        // R_n is a step function, so the slope is largest at the left end of
        // each step: the window start and the breakpoints inside the window
        let r = series.cumulative(&window_start)?;
        window_max = slope(&r, &window_start);
        for row in rows.iter().filter(|r| r.n >= window_start) {
            if row.slope > window_max {
                window_max = row.slope;
                window_argmax = row.n.clone();
            }
        }
    }
    Ok(SlopeReport {
        cutoff: n.clone(),
        rows,
        window_start,
        window_max,
        window_argmax,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dirichlet::Multiplicity;
    use crate::growth::{FactorSpec, Flag};

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn single_psl2_5_is_a5() {
        let spec = GroupSpec::finite(vec![FactorSpec::a1(5, Flag::Simple)]).unwrap();
        let tz = truncated_zeta(&spec, &big(5), 1).unwrap();
        assert!(tz.is_exact());
        let e = tz.series.exact_entries().unwrap();
        let got: Vec<(u64, u64)> = e
            .iter()
            .map(|(d, m)| (d.try_into().unwrap(), m.try_into().unwrap()))
            .collect();
        assert_eq!(got, vec![(1, 1), (3, 2), (4, 1), (5, 1)]);
    }

    #[test]
    fn square_of_a5() {
        let f = FactorSpec::new(crate::lie::LieType::a1(), 5, Flag::Simple, Multiplicity::int(2));
        let spec = GroupSpec::finite(vec![f]).unwrap();
        let tz = truncated_zeta(&spec, &big(25), 1).unwrap();
        assert_eq!(tz.series.cumulative(&big(25)).unwrap(), Count::Exact(big(25)));
    }

    #[test]
    fn sl2_primes_small_cutoff() {
        let spec = GroupSpec::sl2_primes(3).unwrap();
        let n = big(4);
        let tz = truncated_zeta(&spec, &n, 100).unwrap();
        assert!(tz.is_exact());
        let t5 = crate::DegreeTable::sl2(5).unwrap().zeta_series(&n).unwrap();
        let t7 = crate::DegreeTable::sl2(7).unwrap().zeta_series(&n).unwrap();
        let expect = convolve(
            &power_one_plus(&t5, &Multiplicity::int(60), &n).unwrap(),
            &power_one_plus(&t7, &Multiplicity::int(168), &n).unwrap(),
            &n,
        )
        .unwrap();
        assert_eq!(tz.series, expect);
        let short = truncated_zeta(&spec, &n, 1).unwrap();
        assert!(!short.is_exact());
    }

    #[test]
    fn m_n_examples() {
        let spec = GroupSpec::sl2_primes(3).unwrap();
        assert_eq!(m_n(&spec, &big(1)).unwrap(), Count::Exact(big(0)));
        assert_eq!(m_n(&spec, &big(2)).unwrap(), Count::Exact(big(60)));
        assert_eq!(m_n(&spec, &big(3)).unwrap(), Count::Exact(big(228)));
    }

    #[test]
    fn slopes_of_small_groups() {
        let triv = GroupSpec::default();
        let r = empirical_slope(&triv, &big(100)).unwrap();
        assert!(r.rows.iter().all(|row| row.slope == 0.0));
        assert_eq!(r.window_max, 0.0);

        let a5 = GroupSpec::finite(vec![FactorSpec::a1(5, Flag::Simple)]).unwrap();
        let r = empirical_slope(&a5, &big(5)).unwrap();
        assert_eq!(r.rows.last().unwrap().n, big(5));
        assert!((r.rows.last().unwrap().slope - 1.0).abs() < 1e-12);
        assert!((r.window_max - 1.0).abs() < 1e-12);
        assert!(r.to_csv().starts_with("n,log10_R_n,slope\n3,"));
    }
}

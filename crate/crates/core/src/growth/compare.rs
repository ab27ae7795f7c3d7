//! Two-sided comparison of Dirichlet polynomials (`f ≤ C^(1+σ) g` and back)
//! and the cover-versus-quotient factor-count inequality.

use num_bigint::BigUint;
use serde_json::{json, Value};

use super::{m_n, Flag, GroupSpec, Stratum};
use crate::dirichlet::{Count, DirichletSeries};
use crate::error::{Error, Result};

const REL_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct SimPoint {
    pub sigma: f64,
    pub f: f64,
    pub g: f64,
    /// `C^(1+sigma)`.
    pub factor: f64,
    pub f_below: bool,
    pub g_below: bool,
    /// `min(C^(1+σ) g / f, C^(1+σ) f / g)`; at least one iff the point passes.
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegimeCheck {
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimCheckReport {
    pub c: f64,
    pub points: Vec<SimPoint>,
    /// `sigma -> 0+`: total masses.
    pub zero_regime: RegimeCheck,
    /// `sigma -> infinity`: smallest dimensions and their multiplicities.
    pub infinity_regime: RegimeCheck,
}

impl SimCheckReport {
    pub fn grid_pass(&self) -> bool {
        self.points.iter().all(|p| p.f_below && p.g_below)
    }

    pub fn pass(&self) -> bool {
        self.grid_pass() && self.zero_regime.pass && self.infinity_regime.pass
    }

    pub fn to_json(&self) -> Value {
        json!({
            "C": self.c,
            "pass": self.pass(),
            "grid_pass": self.grid_pass(),
            "points": self.points.iter().map(|p| json!({
                "sigma": p.sigma, "f": p.f, "g": p.g, "factor": p.factor,
                "pass": p.f_below && p.g_below, "margin": p.margin,
            })).collect::<Vec<_>>(),
            "zero_regime": {"pass": self.zero_regime.pass, "detail": self.zero_regime.detail},
            "infinity_regime": {"pass": self.infinity_regime.pass, "detail": self.infinity_regime.detail},
        })
    }
}

fn below(x: f64, bound: f64) -> bool {
    x <= bound * (1.0 + REL_TOL)
}

/// Checks `f(σ) ≤ C^(1+σ) g(σ)` and `g(σ) ≤ C^(1+σ) f(σ)` on `grid` and in
/// both limits. Passing certifies the relation only at the grid points and
/// asymptotically, not on all of `σ > 0`.
pub fn sim_c_check(f: &DirichletSeries, g: &DirichletSeries, c: f64, grid: &[f64]) -> Result<SimCheckReport> {
    if f.is_empty() || g.is_empty() {
        return Err(Error::precondition("both series must be nonzero"));
    }
    if c.is_nan() || c < 1.0 || !c.is_finite() {
        return Err(Error::precondition("C must be a finite real >= 1"));
    }
    let mut points = Vec::with_capacity(grid.len());
    for &sigma in grid {
        let (fv, gv) = (f.evaluate(sigma)?, g.evaluate(sigma)?);
        let factor = c.powf(1.0 + sigma);
        points.push(SimPoint {
            sigma,
            f: fv,
            g: gv,
            factor,
            f_below: below(fv, factor * gv),
            g_below: below(gv, factor * fv),
            margin: (factor * gv / fv).min(factor * fv / gv),
        });
    }

    let (f0, g0) = (f.evaluate(0.0)?, g.evaluate(0.0)?);
    let zero_regime = RegimeCheck {
        pass: below(f0, c * g0) && below(g0, c * f0),
        detail: format!("masses f(0) = {f0}, g(0) = {g0}, C = {c}"),
    };

    let (df, af) = leading(f);
    let (dg, ag) = leading(g);
    let ln_c = c.ln();
    // f/g ~ (af/ag) (dg/df)^σ, which stays below C^(1+σ) iff dg < C df, or
    // dg = C df and af <= C ag
    let eventually_below = |d_small: f64, a_small: f64, d_other: f64, a_other: f64| -> bool {
        let lhs = d_other;
        let rhs = ln_c + d_small;
        if lhs < rhs - REL_TOL * rhs.abs().max(1.0) {
            true
        } else if lhs <= rhs + REL_TOL * rhs.abs().max(1.0) {
            a_small <= ln_c + a_other + REL_TOL
        } else {
            false
        }
    };
    let f_ok = eventually_below(df, af, dg, ag);
    let g_ok = eventually_below(dg, ag, df, af);
    let infinity_regime = RegimeCheck {
        pass: f_ok && g_ok,
        detail: format!(
            "leading terms f ~ {:.6}·{:.6}^-σ, g ~ {:.6}·{:.6}^-σ; f ≤ C^(1+σ) g eventually: {f_ok}; g ≤ C^(1+σ) f eventually: {g_ok}",
            af.exp(),
            df.exp(),
            ag.exp(),
            dg.exp()
        ),
    };
    Ok(SimCheckReport {
        c,
        points,
        zero_regime,
        infinity_regime,
    })
}

/// `(ln d, ln mult)` of the smallest dimension present.
fn leading(s: &DirichletSeries) -> (f64, f64) {
    let (d, lm) = s.ln_entries().into_iter().next().expect("series is nonempty");
    (crate::arith::big_ln(&d), lm)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoverComparison {
    pub n: u64,
    /// `m_{n^2}` with every factor read as its simple quotient.
    pub simple_count: Count,
    /// `m_n` with every factor read as its universal cover.
    pub cover_count: Count,
    pub pass: bool,
}

impl CoverComparison {
    pub fn to_json(&self) -> Value {
        json!({
            "n": self.n,
            "m_n2_simple": self.simple_count.to_string(),
            "m_n_cover": self.cover_count.to_string(),
            "pass": self.pass,
        })
    }
}

fn count_ge(a: &Count, b: &Count) -> bool {
    match (a, b) {
        (Count::Exact(x), Count::Exact(y)) => x >= y,
        _ => a.ln() >= b.ln() - REL_TOL * b.ln().abs(),
    }
}

/// Verifies `m_{n^2}(G) >= m_n(G~)` for a spec of `A1` factors: every
/// nontrivial representation of a cover of dimension `d` yields one of the
/// simple quotient of dimension at most `d^2 - 1`.
pub fn cover_mn_comparison(spec: &GroupSpec, n: u64) -> Result<CoverComparison> {
    if n == 0 {
        return Err(Error::precondition("n must be positive"));
    }
    let all_a1 = spec.strata.iter().all(|s| match s {
        Stratum::Finite { factors } => factors.iter().all(|f| f.lie_type.is_a1()),
        Stratum::Geometric(g) => g.lie_type.is_a1(),
        Stratum::Primes(p) => p.lie_type.is_a1(),
        Stratum::Diagonal(_) => false,
    });
    if !all_a1 {
        return Err(Error::precondition(
            "cover comparison needs exact degree tables, i.e. A1 factors only",
        ));
    }
    let n_big = BigUint::from(n);
    let simple_count = m_n(&spec.with_flag(Flag::Simple), &(&n_big * &n_big))?;
    let cover_count = m_n(&spec.with_flag(Flag::Cover), &n_big)?;
    let pass = count_ge(&simple_count, &cover_count);
    Ok(CoverComparison {
        n,
        simple_count,
        cover_count,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::char_tables::DegreeTable;
    use crate::growth::FactorSpec;

    fn series(entries: &[(u64, u64)]) -> DirichletSeries {
        let cutoff = entries.iter().map(|e| e.0).max().unwrap_or(1);
        DirichletSeries::from_exact(
            BigUint::from(cutoff),
            entries.iter().map(|&(d, m)| (BigUint::from(d), BigUint::from(m))),
        )
        .unwrap()
    }

    #[test]
    fn reflexive() {
        let f = series(&[(3, 2), (4, 1), (5, 1)]);
        for c in [1.0, 2.0, 3.5] {
            let r = sim_c_check(&f, &f, c, &[0.5, 1.0, 2.0, 4.0]).unwrap();
            assert!(r.pass(), "{c}: {r:?}");
            for p in &r.points {
                assert!((p.margin - p.factor).abs() < 1e-9 * p.factor);
            }
        }
    }

    #[test]
    fn direct_failure() {
        let r = sim_c_check(&series(&[(2, 1)]), &series(&[(2, 100)]), 2.0, &[1.0]).unwrap();
        assert!(!r.points[0].g_below);
        assert!(r.points[0].f_below);
        assert!(!r.pass());
    }

    #[test]
    fn sl2_model_grid() {
        let q = 17u64;
        let f = DegreeTable::sl2(q).unwrap().zeta_series(&BigUint::from(q + 1)).unwrap().minus_one().unwrap();
        let g = series(&[(q, q)]);
        let r = sim_c_check(&f, &g, 2.0, &[0.5, 1.0, 2.0, 4.0]).unwrap();
        assert!(r.grid_pass(), "{r:?}");
        assert!(r.zero_regime.pass);
    }

    #[test]
    fn rejects_bad_input() {
        let f = series(&[(2, 1)]);
        assert!(sim_c_check(&f, &f, 0.5, &[1.0]).is_err());
        let empty = DirichletSeries::empty(BigUint::from(5u32), crate::Backend::Exact);
        assert!(sim_c_check(&f, &empty, 2.0, &[1.0]).is_err());
    }

    #[test]
    fn cover_comparison_examples() {
        let spec = GroupSpec::finite(vec![FactorSpec::a1(5, Flag::Simple)]).unwrap();
        let c = cover_mn_comparison(&spec, 2).unwrap();
        assert_eq!(c.simple_count, Count::Exact(BigUint::from(1u32)));
        assert_eq!(c.cover_count, Count::Exact(BigUint::from(1u32)));
        assert!(c.pass);
        let c = cover_mn_comparison(&spec, 1).unwrap();
        assert!(c.pass);
        assert_eq!(c.cover_count, Count::Exact(BigUint::from(0u32)));
    }
}

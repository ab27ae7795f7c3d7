//! Python bindings. Structured results cross the boundary as JSON strings.

use num_bigint::BigUint;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use repgrowth::constructor::{DiagonalPlan, TermwiseVerdict};
use repgrowth::growth::{FactorSpec, Flag};
use repgrowth::rational::{format_rational, parse_rational};
use repgrowth::{Error, Family, LieType, Rational};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Budget(_) | Error::Invariant(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn big(text: &str) -> PyResult<BigUint> {
    text.parse()
        .map_err(|_| PyValueError::new_err(format!("not a nonnegative integer: {text:?}")))
}

fn rational(text: &str) -> PyResult<Rational> {
    parse_rational(text).map_err(py_err)
}

fn parse_family(name: &str) -> PyResult<Family> {
    Family::ALL
        .into_iter()
        .find(|f| f.as_str().eq_ignore_ascii_case(name))
        .ok_or_else(|| PyValueError::new_err(format!("unknown family {name:?}")))
}

fn lie_type(name: &str, rank: u32, twisted: bool) -> PyResult<LieType> {
    LieType::new(parse_family(name)?, rank, twisted).map_err(py_err)
}

/// A validated group specification.
#[pyclass(name = "GroupSpec", module = "repgrowth_py", from_py_object)]
#[derive(Clone)]
struct PyGroupSpec {
    inner: repgrowth::GroupSpec,
}

#[pymethods]
impl PyGroupSpec {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyGroupSpec {
            inner: repgrowth::GroupSpec::from_json_str(text).map_err(py_err)?,
        })
    }

    #[staticmethod]
    fn sl2_primes(d: u32) -> PyResult<Self> {
        Ok(PyGroupSpec {
            inner: repgrowth::GroupSpec::sl2_primes(d).map_err(py_err)?,
        })
    }

    /// A single `SL2(q)` (`cover=True`) or `PSL2(q)` factor.
    #[staticmethod]
    #[pyo3(signature = (q, cover = false))]
    fn a1(q: u64, cover: bool) -> PyResult<Self> {
        let flag = if cover { Flag::Cover } else { Flag::Simple };
        Ok(PyGroupSpec {
            inner: repgrowth::GroupSpec::finite(vec![FactorSpec::a1(q, flag)]).map_err(py_err)?,
        })
    }

    fn to_json(&self) -> String {
        self.inner.to_json().to_string()
    }

    fn union(&self, other: &PyGroupSpec) -> Self {
        PyGroupSpec {
            inner: self.inner.union(&other.inner),
        }
    }

    /// `"finite-group"`, a rational such as `"3/2"`, or `"infinity"`.
    fn abscissa(&self) -> String {
        repgrowth::exact_abscissa(&self.inner).abscissa.to_string()
    }

    fn rates_json(&self) -> String {
        repgrowth::exact_abscissa(&self.inner).to_json().to_string()
    }

    fn prg_json(&self) -> String {
        repgrowth::prg_verdict(&self.inner).to_json().to_string()
    }

    /// `m_n` as a decimal string, or `"exp(x)"` in the log domain.
    fn m_n(&self, n: &str) -> PyResult<String> {
        let c = repgrowth::m_n(&self.inner, &big(n)?).map_err(py_err)?;
        Ok(match c.exact() {
            Some(v) => v.to_string(),
            None => format!("exp({})", c.ln()),
        })
    }

    #[pyo3(signature = (n, horizon = u64::MAX))]
    fn truncated_zeta(&self, n: &str, horizon: u64) -> PyResult<PyDirichletSeries> {
        let tz = repgrowth::truncated_zeta(&self.inner, &big(n)?, horizon).map_err(py_err)?;
        Ok(PyDirichletSeries {
            inner: tz.series,
            warnings: tz.warnings,
        })
    }

    fn empirical_slope_csv(&self, n: &str) -> PyResult<String> {
        Ok(repgrowth::empirical_slope(&self.inner, &big(n)?).map_err(py_err)?.to_csv())
    }

    fn __repr__(&self) -> String {
        format!("GroupSpec({})", self.to_json())
    }

    fn __eq__(&self, other: &PyGroupSpec) -> bool {
        self.inner == other.inner
    }
}

/// A truncated Dirichlet series.
#[pyclass(name = "DirichletSeries", module = "repgrowth_py", skip_from_py_object)]
#[derive(Clone)]
struct PyDirichletSeries {
    inner: repgrowth::DirichletSeries,
    warnings: Vec<String>,
}

#[pymethods]
impl PyDirichletSeries {
    #[getter]
    fn warnings(&self) -> Vec<String> {
        self.warnings.clone()
    }

    #[getter]
    fn backend(&self) -> &'static str {
        self.inner.backend().as_str()
    }

    /// `(dimension, multiplicity)` pairs with exact multiplicities as
    /// decimal strings; `None` for the log-domain backend.
    fn exact_entries(&self) -> Option<Vec<(String, String)>> {
        self.inner
            .exact_entries()
            .map(|m| m.iter().map(|(d, c)| (d.to_string(), c.to_string())).collect())
    }

    fn ln_entries(&self) -> Vec<(String, f64)> {
        self.inner.ln_entries().into_iter().map(|(d, l)| (d.to_string(), l)).collect()
    }

    fn evaluate(&self, sigma: f64) -> PyResult<f64> {
        self.inner.evaluate(sigma).map_err(py_err)
    }

    fn cumulative_ln(&self, n: &str) -> PyResult<f64> {
        Ok(self.inner.cumulative(&big(n)?).map_err(py_err)?.ln())
    }

    fn to_csv(&self) -> String {
        self.inner.to_csv()
    }

    fn to_json(&self) -> String {
        self.inner.to_json().to_string()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

/// Character degrees of `SL2(q)` or `PSL2(q)` as `(degree, multiplicity)` pairs.
#[pyfunction]
#[pyo3(signature = (q, cover = true))]
fn degree_table(q: u64, cover: bool) -> PyResult<Vec<(u64, u64)>> {
    let t = if cover {
        repgrowth::DegreeTable::sl2(q)
    } else {
        repgrowth::DegreeTable::psl2(q)
    }
    .map_err(py_err)?;
    Ok(t.degrees().iter().map(|(&d, &m)| (d, m)).collect())
}

#[pyfunction]
#[pyo3(signature = (rho, family, rank, p, twisted = false, q = None))]
fn build_fixed_type(rho: &str, family: &str, rank: u32, p: u64, twisted: bool, q: Option<u64>) -> PyResult<PyGroupSpec> {
    let t = lie_type(family, rank, twisted)?;
    Ok(PyGroupSpec {
        inner: repgrowth::build_fixed_type(&rational(rho)?, &t, p, q).map_err(py_err)?,
    })
}

/// Returns the union spec and the certificate as JSON.
#[pyfunction]
#[pyo3(signature = (rho, gap = "1", family = "A", rank_offset = 1, p = 5, stages = 4, budget = "1000000000"))]
fn build_diagonal(
    rho: &str,
    gap: &str,
    family: &str,
    rank_offset: u32,
    p: u64,
    stages: u32,
    budget: &str,
) -> PyResult<(PyGroupSpec, String)> {
    let f = parse_family(family)?;
    let plan = DiagonalPlan::harmonic(rational(rho)?, rational(gap)?, f, rank_offset, p, stages, big(budget)?)
        .map_err(py_err)?;
    let (spec, cert) = repgrowth::build_diagonal(&plan).map_err(py_err)?;
    Ok((PyGroupSpec { inner: spec }, cert.to_json().to_string()))
}

/// `"converges"`, `"diverges"` or `"inconclusive"` for the fixed-type
/// product at `sigma`.
#[pyfunction]
#[pyo3(signature = (rho, family, rank, sigma, horizon = 200, twisted = false))]
fn termwise_test(rho: &str, family: &str, rank: u32, sigma: &str, horizon: u64, twisted: bool) -> PyResult<&'static str> {
    let t = lie_type(family, rank, twisted)?;
    let s = repgrowth::make_schedule(&rational(rho)?, &t, None).map_err(py_err)?;
    let r = repgrowth::constructor::termwise_test(&s, &t.canonical_pairs(), &rational(sigma)?, horizon).map_err(py_err)?;
    Ok(match r.verdict {
        TermwiseVerdict::Converges => "converges",
        TermwiseVerdict::Diverges => "diverges",
        TermwiseVerdict::Inconclusive => "inconclusive",
    })
}

/// `rk / |Phi^+|` as a rational string.
#[pyfunction]
#[pyo3(signature = (family, rank, twisted = false))]
fn rho0(family: &str, rank: u32, twisted: bool) -> PyResult<String> {
    Ok(format_rational(&lie_type(family, rank, twisted)?.rho0()))
}

/// Eulerian functions and `|Aut|` of a catalog group, as JSON.
#[pyfunction]
#[pyo3(signature = (group, max_d = 3))]
fn generator_counts(group: &str, max_d: usize) -> PyResult<String> {
    let g = repgrowth::ConcreteGroup::catalog(group).map_err(py_err)?;
    Ok(g.counts_json(max_d).map_err(py_err)?.to_string())
}

#[pyfunction]
fn min_generators_power(group: &str, k: &str) -> PyResult<usize> {
    let g = repgrowth::ConcreteGroup::catalog(group).map_err(py_err)?;
    Ok(g.min_generators_power(&big(k)?).map_err(py_err)?.d)
}

/// Runs the invariant suite; returns the JSON report.
#[pyfunction]
fn run_checks() -> String {
    repgrowth::checks::run_checks().to_json().to_string()
}

#[pymodule]
fn repgrowth_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGroupSpec>()?;
    m.add_class::<PyDirichletSeries>()?;
    m.add_function(wrap_pyfunction!(degree_table, m)?)?;
    m.add_function(wrap_pyfunction!(build_fixed_type, m)?)?;
    m.add_function(wrap_pyfunction!(build_diagonal, m)?)?;
    m.add_function(wrap_pyfunction!(termwise_test, m)?)?;
    m.add_function(wrap_pyfunction!(rho0, m)?)?;
    m.add_function(wrap_pyfunction!(generator_counts, m)?)?;
    m.add_function(wrap_pyfunction!(min_generators_power, m)?)?;
    m.add_function(wrap_pyfunction!(run_checks, m)?)?;
    Ok(())
}

use std::collections::BTreeMap;
use std::path::PathBuf;

use pyo3::exceptions::{PyArithmeticError, PyOSError, PyValueError};
use pyo3::prelude::*;

use trichonet_core as core;
use core::{Bound as DegreeBound, ErrorKind};

fn to_py(e: core::Error) -> PyErr {
    match (&e, e.kind()) {
        (core::Error::Io { .. }, _) => PyOSError::new_err(e.to_string()),
        (_, ErrorKind::Numerical) => PyArithmeticError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// An int, `None`, `"inf"` or `math.inf`.
fn bound_from(obj: &Bound<'_, PyAny>) -> PyResult<DegreeBound> {
    if obj.is_none() {
        return Ok(DegreeBound::Infinite);
    }
    if let Ok(v) = obj.extract::<u64>() {
        return Ok(DegreeBound::Finite(v));
    }
    if let Ok(v) = obj.extract::<f64>() {
        if v.is_infinite() && v > 0.0 {
            return Ok(DegreeBound::Infinite);
        }
    }
    if let Ok(s) = obj.extract::<String>() {
        return s.parse().map_err(PyValueError::new_err);
    }
    Err(PyValueError::new_err("bound must be a non-negative int, None or inf"))
}

fn bound_to_py(py: Python<'_>, b: DegreeBound) -> PyResult<Py<PyAny>> {
    Ok(match b {
        DegreeBound::Finite(v) => v.into_pyobject(py)?.into_any().unbind(),
        DegreeBound::Infinite => f64::INFINITY.into_pyobject(py)?.into_any().unbind(),
    })
}

#[pyclass(name = "ModelParams", module = "trichonet", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyModelParams {
    inner: core::ModelParams,
}

#[pymethods]
impl PyModelParams {
    #[new]
    #[pyo3(signature = (lower_bound, upper_bound, lower_threshold=None, upper_threshold=None, arrival_rate=1.0, init_conn_probs=None, starting_degree=1))]
    fn new(
        lower_bound: u64,
        upper_bound: &Bound<'_, PyAny>,
        lower_threshold: Option<u64>,
        upper_threshold: Option<&Bound<'_, PyAny>>,
        arrival_rate: f64,
        init_conn_probs: Option<Vec<f64>>,
        starting_degree: u64,
    ) -> PyResult<Self> {
        let upper = bound_from(upper_bound)?;
        let upper_threshold = match upper_threshold {
            Some(obj) => bound_from(obj)?,
            None => upper,
        };
        let inner = core::ModelParams::new(
            lower_bound,
            lower_threshold.unwrap_or(lower_bound),
            upper_threshold,
            upper,
        )
        .and_then(|p| p.with_arrival_rate(arrival_rate))
        .and_then(|p| p.with_init_conn_probs(init_conn_probs.unwrap_or_else(|| vec![1.0])))
        .and_then(|p| p.with_starting_degree(starting_degree))
        .map_err(to_py)?;
        Ok(PyModelParams { inner })
    }

    #[getter]
    fn lower_bound(&self) -> u64 {
        self.inner.lower_bound()
    }

    #[getter]
    fn lower_threshold(&self) -> u64 {
        self.inner.lower_threshold()
    }

    #[getter]
    fn upper_threshold(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        bound_to_py(py, self.inner.upper_threshold())
    }

    #[getter]
    fn upper_bound(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        bound_to_py(py, self.inner.upper_bound())
    }

    #[getter]
    fn arrival_rate(&self) -> f64 {
        self.inner.arrival_rate()
    }

    #[getter]
    fn init_conn_probs(&self) -> Vec<f64> {
        self.inner.init_conn_probs().to_vec()
    }

    #[getter]
    fn starting_degree(&self) -> u64 {
        self.inner.starting_degree()
    }

    fn modified_degree(&self, k: u64) -> u64 {
        self.inner.modified_degree(k)
    }

    fn __repr__(&self) -> String {
        let p = &self.inner;
        format!(
            "ModelParams(L={}, LL={}, UU={}, U={}, arrival_rate={}, init_conn_probs={:?}, starting_degree={})",
            p.lower_bound(),
            p.lower_threshold(),
            p.upper_threshold(),
            p.upper_bound(),
            p.arrival_rate(),
            p.init_conn_probs(),
            p.starting_degree()
        )
    }
}

/// A pmf on the contiguous degree range `k_min..=k_max`.
#[pyclass(name = "Pmf", module = "trichonet", frozen, skip_from_py_object)]
struct PyPmf {
    inner: core::ClosedFormPmf,
}

#[pymethods]
impl PyPmf {
    #[getter]
    fn k_min(&self) -> u64 {
        self.inner.k_min()
    }

    #[getter]
    fn k_max(&self) -> u64 {
        self.inner.k_max()
    }

    #[getter]
    fn probabilities(&self) -> Vec<f64> {
        self.inner.probabilities().to_vec()
    }

    fn prob(&self, k: u64) -> f64 {
        self.inner.prob(k)
    }

    fn total_mass(&self) -> f64 {
        self.inner.total_mass()
    }

    fn __len__(&self) -> usize {
        self.inner.probabilities().len()
    }
}

fn pmf(r: core::Result<core::ClosedFormPmf>) -> PyResult<PyPmf> {
    r.map(|inner| PyPmf { inner }).map_err(to_py)
}

fn indexing(inclusive: bool) -> core::MixtureIndexing {
    if inclusive {
        core::MixtureIndexing::Inclusive
    } else {
        core::MixtureIndexing::Exclusive
    }
}

#[pyfunction]
fn poisson(mean: f64, k_max: u64) -> PyResult<PyPmf> {
    pmf(core::ClosedFormPmf::poisson(mean, k_max))
}

#[pyfunction]
fn exp_network(k_max: u64) -> PyResult<PyPmf> {
    pmf(core::ClosedFormPmf::exp_network(k_max))
}

#[pyfunction]
fn ba_power_law(k_max: u64) -> PyResult<PyPmf> {
    pmf(core::ClosedFormPmf::ba_power_law(k_max))
}

#[pyfunction]
#[pyo3(signature = (init_probs, k_max, inclusive=true))]
fn trunc_geom_mixture(init_probs: Vec<f64>, k_max: u64, inclusive: bool) -> PyResult<PyPmf> {
    pmf(core::ClosedFormPmf::trunc_geom_mixture(&init_probs, indexing(inclusive), k_max))
}

#[pyfunction]
fn trunc_power_law_mixture(init_probs: Vec<f64>, k_max: u64) -> PyResult<PyPmf> {
    pmf(core::ClosedFormPmf::trunc_power_law_mixture(&init_probs, k_max))
}

/// The three-regime law on `1..=network_size`; `gamma` defaults to
/// `L + min(1, U/N)`.
#[pyfunction]
#[pyo3(signature = (params, network_size, gamma=None))]
fn trichotomy(params: &PyModelParams, network_size: u64, gamma: Option<f64>) -> PyResult<PyPmf> {
    let p = &params.inner;
    let gamma = match gamma {
        Some(g) => core::GammaExponent::new(g, p).map_err(to_py)?,
        None => core::default_gamma(p, network_size),
    };
    pmf(core::ClosedFormPmf::trichotomy(p, gamma, network_size))
}

#[pyclass(name = "Ensemble", module = "trichonet", frozen, skip_from_py_object)]
struct PyEnsemble {
    inner: core::EnsemblePmf,
}

#[pymethods]
impl PyEnsemble {
    #[getter]
    fn k_min(&self) -> u64 {
        self.inner.k_min()
    }

    #[getter]
    fn k_max(&self) -> u64 {
        self.inner.k_max()
    }

    #[getter]
    fn runs(&self) -> u64 {
        self.inner.runs()
    }

    #[getter]
    fn mean_pmf(&self) -> Vec<f64> {
        self.inner.mean_pmf().to_vec()
    }

    #[getter]
    fn variance(&self) -> Vec<f64> {
        self.inner.per_bin_variance().to_vec()
    }

    fn prob(&self, k: u64) -> f64 {
        self.inner.prob(k)
    }

    /// Node counts pooled over runs, `{degree: count}`.
    fn histogram(&self) -> BTreeMap<u64, u64> {
        self.inner.pooled_histogram().counts().clone()
    }

    fn top_decile_variance(&self) -> f64 {
        self.inner.top_decile_variance()
    }
}

/// Grows `runs` independent networks to `n` nodes. `fixed_count` switches
/// to the fixed-set mode that reports only the first `fixed_count` nodes.
#[pyfunction]
#[pyo3(signature = (params, n, runs=1, seed=0, fixed_count=None, threads=None))]
fn simulate(
    py: Python<'_>,
    params: &PyModelParams,
    n: u64,
    runs: u64,
    seed: u64,
    fixed_count: Option<u64>,
    threads: Option<usize>,
) -> PyResult<PyEnsemble> {
    let mode = match fixed_count {
        Some(c) => core::SimMode::PoissonFixedSet { fixed_count: c },
        None => core::SimMode::Standard,
    };
    let config = core::SimConfig::new(params.inner.clone(), n, runs, seed)
        .with_mode(mode)
        .with_threads(threads);
    let inner = py.detach(|| core::run_ensemble(&config)).map_err(to_py)?;
    Ok(PyEnsemble { inner })
}

#[pyclass(name = "FitReport", module = "trichonet", frozen, skip_from_py_object)]
struct PyFitReport {
    inner: core::FitReport,
}

#[pymethods]
impl PyFitReport {
    #[getter]
    fn lower(&self) -> u64 {
        self.inner.lower
    }

    #[getter]
    fn upper(&self) -> u64 {
        self.inner.upper
    }

    #[getter]
    fn exponent(&self) -> f64 {
        self.inner.exponent
    }

    #[getter]
    fn gamma(&self) -> f64 {
        self.inner.gamma
    }

    #[getter]
    fn head_weights(&self) -> Vec<f64> {
        self.inner.head.weights.clone()
    }

    #[getter]
    fn p_a(&self) -> f64 {
        self.inner.head.p_a
    }

    #[getter]
    fn p_b(&self) -> f64 {
        self.inner.tail.p_b
    }

    #[getter]
    fn tail_c(&self) -> Option<f64> {
        self.inner.tail.c
    }

    #[getter]
    fn rmse_trichotomy(&self) -> f64 {
        self.inner.rmse_trichotomy
    }

    #[getter]
    fn rmse_power_law_only(&self) -> f64 {
        self.inner.rmse_power_law_only
    }

    #[getter]
    fn warnings(&self) -> Vec<String> {
        self.inner.warnings.clone()
    }

    fn fitted_prob(&self, k: u64) -> f64 {
        self.inner.fitted_prob(k)
    }

    fn csv_row(&self) -> String {
        self.inner.csv_row()
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.inner).expect("report serializes")
    }
}

/// Three-step fit of a `{degree: count}` histogram.
#[pyfunction]
#[pyo3(signature = (histogram, lower=None, upper=None, search=true, max_head_params=1, gamma_convention="literal", dataset=None))]
fn fit(
    histogram: BTreeMap<u64, u64>,
    lower: Option<u64>,
    upper: Option<u64>,
    search: bool,
    max_head_params: usize,
    gamma_convention: &str,
    dataset: Option<String>,
) -> PyResult<PyFitReport> {
    let config = core::FitConfig {
        initial_lower: lower,
        initial_upper: upper,
        search_boundaries: search,
        max_head_params,
        gamma_convention: gamma_convention.parse().map_err(PyValueError::new_err)?,
        dataset,
        ..core::FitConfig::default()
    };
    let hist = core::DegreeHistogram::from_counts(histogram);
    core::fit_trichotomy(&hist, &config)
        .map(|inner| PyFitReport { inner })
        .map_err(to_py)
}

fn grid_for(params: &core::ModelParams, t_end: f64, dt: Option<f64>, k_max: Option<u64>) -> core::GridConfig {
    let mut grid = core::GridConfig::for_params(params, t_end);
    if let Some(k) = k_max {
        let rate = params.arrival_rate() * params.max_modified_degree(k) as f64;
        grid = grid.with_k_max(k).with_dt(core::STABILITY_LIMIT / rate);
    }
    if let Some(dt) = dt {
        grid = grid.with_dt(dt);
    }
    grid
}

#[pyfunction]
#[pyo3(signature = (params, t_end=20.0, dt=None, k_max=None))]
fn self_consistent_gamma(
    py: Python<'_>,
    params: &PyModelParams,
    t_end: f64,
    dt: Option<f64>,
    k_max: Option<u64>,
) -> PyResult<f64> {
    let grid = grid_for(&params.inner, t_end, dt, k_max);
    py.detach(|| core::self_consistent_gamma(&params.inner, &grid)).map_err(to_py)
}

/// Residence-time average of the master-equation solution. `case` is one of
/// `"ba"`, `"large_u"`, `"small_u"`, `"self_consistent"`, or a float γ.
/// Returns the pmf and the mass that leaked past `k_max`.
#[pyfunction]
#[pyo3(signature = (params, t_end=20.0, case=None, dt=None, k_max=None))]
fn stationary_pmf(
    py: Python<'_>,
    params: &PyModelParams,
    t_end: f64,
    case: Option<&Bound<'_, PyAny>>,
    dt: Option<f64>,
    k_max: Option<u64>,
) -> PyResult<(PyPmf, f64)> {
    let p = &params.inner;
    let grid = grid_for(p, t_end, dt, k_max);
    let case = match case {
        None => None,
        Some(obj) => match obj.extract::<f64>() {
            Ok(gamma) => Some(core::ResidentialCase::Gamma { gamma }),
            Err(_) => match obj.extract::<String>()?.as_str() {
                "ba" => Some(core::ResidentialCase::BarabasiAlbert),
                "large_u" => Some(core::ResidentialCase::LargeU),
                "small_u" => Some(core::ResidentialCase::SmallU),
                "self_consistent" => None,
                other => return Err(PyValueError::new_err(format!("unknown residential case {other:?}"))),
            },
        },
    };
    let (inner, leak) = py
        .detach(|| {
            let case = match case {
                Some(c) => c,
                None => core::ResidentialCase::Gamma {
                    gamma: core::self_consistent_gamma(p, &grid)?,
                },
            };
            let spec = core::ResidentialTimeSpec::new(case, p, t_end)?;
            core::stationary_with_leak(p, &p.big_bang_init(), &spec, &grid)
        })
        .map_err(to_py)?;
    Ok((PyPmf { inner }, leak))
}

#[pyfunction]
fn read_histogram(path: PathBuf) -> PyResult<BTreeMap<u64, u64>> {
    core::parse_histogram(&path)
        .map(|h| h.counts().clone())
        .map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (path, directed=false, degree_mode="total", dedup=false))]
fn read_edge_list(path: PathBuf, directed: bool, degree_mode: &str, dedup: bool) -> PyResult<BTreeMap<u64, u64>> {
    let degree_mode = match degree_mode {
        "in" => core::DegreeMode::In,
        "out" => core::DegreeMode::Out,
        "total" => core::DegreeMode::Total,
        other => return Err(PyValueError::new_err(format!("unknown degree mode {other:?}"))),
    };
    let spec = core::EdgeListSpec {
        directedness: if directed { core::Directedness::Directed } else { core::Directedness::Undirected },
        degree_mode,
        dedup,
        ..core::EdgeListSpec::new(path)
    };
    core::parse_edge_list(&spec)
        .map(|h| h.counts().clone())
        .map_err(to_py)
}

#[pymodule]
#[pyo3(name = "trichonet")]
fn trichonet_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyModelParams>()?;
    m.add_class::<PyPmf>()?;
    m.add_class::<PyEnsemble>()?;
    m.add_class::<PyFitReport>()?;
    m.add_function(wrap_pyfunction!(poisson, m)?)?;
    m.add_function(wrap_pyfunction!(exp_network, m)?)?;
    m.add_function(wrap_pyfunction!(ba_power_law, m)?)?;
    m.add_function(wrap_pyfunction!(trunc_geom_mixture, m)?)?;
    m.add_function(wrap_pyfunction!(trunc_power_law_mixture, m)?)?;
    m.add_function(wrap_pyfunction!(trichotomy, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(fit, m)?)?;
    m.add_function(wrap_pyfunction!(self_consistent_gamma, m)?)?;
    m.add_function(wrap_pyfunction!(stationary_pmf, m)?)?;
    m.add_function(wrap_pyfunction!(read_histogram, m)?)?;
    m.add_function(wrap_pyfunction!(read_edge_list, m)?)?;
    Ok(())
}

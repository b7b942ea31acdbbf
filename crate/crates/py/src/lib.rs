//! Python bindings: scenarios, realizations, coverage and Monte Carlo.

use hetnet_core::coverage::{coverage_map, CoverageReport, RssGrid};
use hetnet_core::model::GridSpec;
use hetnet_core::statistics::{monte_carlo_metrics, theoretical_value, Metric};
use hetnet_core::{
    build_realization, calibrate_alpha as core_calibrate, compute_rss_grid, coverage_report,
    expected_power_density, realized_total_power, theoretical_tier_intensities, HetnetError,
    McSummary, NetworkRealization, PathLossModel, ScenarioConfig, Tier, PRESET_NAMES,
};
use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn to_py(e: HetnetError) -> PyErr {
    match e {
        HetnetError::Io(io) => PyOSError::new_err(io.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn tier(id: u8) -> PyResult<Tier> {
    Tier::from_id(id).ok_or_else(|| PyValueError::new_err(format!("tier must be 1..=4, got {id}")))
}

/// Scenario configuration. Build one from a preset name or a JSON document.
#[pyclass(name = "Scenario", module = "hetnet")]
struct PyScenario {
    inner: ScenarioConfig,
}

#[pymethods]
impl PyScenario {
    #[staticmethod]
    fn preset(name: &str) -> PyResult<Self> {
        Ok(Self {
            inner: hetnet_core::preset(name).map_err(to_py)?,
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: ScenarioConfig::from_json(text).map_err(to_py)?,
        })
    }

    fn to_json(&self) -> String {
        self.inner.to_json_pretty()
    }

    fn validate(&self) -> PyResult<()> {
        self.inner.validate().map_err(to_py)
    }

    #[getter]
    fn name(&self) -> Option<String> {
        self.inner.name.clone()
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed
    }

    #[setter]
    fn set_seed(&mut self, seed: u64) {
        self.inner.seed = seed;
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.inner.path_loss.exponent
    }

    #[setter]
    fn set_alpha(&mut self, alpha: f64) -> PyResult<()> {
        PathLossModel::new(self.inner.path_loss.reference_distance, alpha).map_err(to_py)?;
        self.inner.path_loss.exponent = alpha;
        Ok(())
    }

    #[getter]
    fn threshold_db(&self) -> f64 {
        self.inner.threshold_db
    }

    #[setter]
    fn set_threshold_db(&mut self, t: f64) {
        self.inner.threshold_db = t;
    }

    #[getter]
    fn grid(&self) -> (usize, usize) {
        (self.inner.grid.nx, self.inner.grid.ny)
    }

    #[setter]
    fn set_grid(&mut self, grid: (usize, usize)) {
        self.inner.grid = GridSpec { nx: grid.0, ny: grid.1 };
    }

    /// Theoretical per-tier intensities `[lambda, 2 mu sqrt(lambda), 2 p lambda, nu]`.
    fn tier_intensities(&self) -> [f64; 4] {
        theoretical_tier_intensities(&self.inner).0
    }

    fn total_density(&self) -> f64 {
        theoretical_tier_intensities(&self.inner).total()
    }

    /// Expected transmit power per unit area in watts.
    fn expected_power_density(&self) -> f64 {
        expected_power_density(&self.inner)
    }

    /// Closed-form value of a named metric, or None.
    fn theoretical(&self, metric: &str) -> PyResult<Option<f64>> {
        let m: Metric = metric.parse().map_err(to_py)?;
        Ok(theoretical_value(&self.inner, m))
    }

    #[pyo3(signature = (seed=None))]
    fn realize(&self, seed: Option<u64>) -> PyResult<PyRealization> {
        build(&self.inner, seed.unwrap_or(self.inner.seed))
    }

    fn __repr__(&self) -> String {
        format!(
            "Scenario(name={:?}, seed={}, alpha={})",
            self.inner.name.as_deref().unwrap_or("<config>"),
            self.inner.seed,
            self.inner.path_loss.exponent
        )
    }
}

fn build(cfg: &ScenarioConfig, seed: u64) -> PyResult<PyRealization> {
    Ok(PyRealization {
        inner: build_realization(cfg, seed).map_err(to_py)?,
        grid: None,
    })
}

/// One sampled network. The RSS raster is computed on first use.
#[pyclass(name = "Realization", module = "hetnet")]
struct PyRealization {
    inner: NetworkRealization,
    grid: Option<RssGrid>,
}

impl PyRealization {
    fn grid(&mut self) -> PyResult<&RssGrid> {
        if self.grid.is_none() {
            let s = &self.inner.scenario;
            self.grid = Some(compute_rss_grid(&self.inner, s.grid, &s.path_loss).map_err(to_py)?);
        }
        Ok(self.grid.as_ref().expect("just computed"))
    }
}

fn report_dict<'py>(py: Python<'py>, r: &CoverageReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("threshold_db", r.threshold_db)?;
    d.set_item("uncovered_fraction", r.uncovered_fraction)?;
    d.set_item("covered_fraction", r.covered_fraction.to_vec())?;
    d.set_item("strongest_fraction", r.strongest_fraction.to_vec())?;
    d.set_item("realized_power_w", r.realized_power_w)?;
    Ok(d)
}

fn summary_dict<'py>(py: Python<'py>, s: &McSummary) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("metric", &s.metric)?;
    d.set_item("samples", s.samples)?;
    d.set_item("mean", s.mean)?;
    d.set_item("std_dev", s.std_dev)?;
    d.set_item("std_error", s.std_error)?;
    d.set_item("ci99", (s.ci99_low, s.ci99_high))?;
    Ok(d)
}

#[pymethods]
impl PyRealization {
    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed
    }

    /// Base stations of `tier` as `(x, y)` pairs; the analysis window only
    /// unless `buffer` is true.
    #[pyo3(signature = (tier_id, buffer=false))]
    fn points(&self, tier_id: u8, buffer: bool) -> PyResult<Vec<(f64, f64)>> {
        let t = tier(tier_id)?;
        let set = if buffer {
            self.inner.layer(t).points.clone()
        } else {
            self.inner.reported(t)
        };
        Ok(set.iter().map(|p| (p.x, p.y)).collect())
    }

    fn counts(&self) -> [usize; 4] {
        Tier::ALL.map(|t| self.inner.layer(t).points.count_in(&self.inner.analysis_window))
    }

    fn total_power_w(&self) -> f64 {
        realized_total_power(&self.inner)
    }

    /// Row-major best RSS in dBm, row 0 at the top: `(nx, ny, values)`.
    fn rss(&mut self) -> PyResult<(usize, usize, Vec<f64>)> {
        let g = self.grid()?;
        Ok((g.nx, g.ny, g.best_rss.clone()))
    }

    /// Tier id of the strongest transmitter per pixel, row-major.
    fn association(&mut self) -> PyResult<Vec<u8>> {
        Ok(self.grid()?.best_tx.iter().map(|t| t.tier.id()).collect())
    }

    /// Tier id where covered at the scenario threshold, 0 elsewhere.
    fn coverage_map(&mut self) -> PyResult<Vec<u8>> {
        let thr = self.inner.scenario.threshold_db;
        Ok(coverage_map(self.grid()?, thr))
    }

    fn coverage<'py>(&mut self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let thr = self.inner.scenario.threshold_db;
        self.grid()?;
        let r = coverage_report(self.grid.as_ref().expect("computed"), thr, &self.inner);
        report_dict(py, &r)
    }
}

#[pyfunction]
fn preset_names() -> Vec<&'static str> {
    PRESET_NAMES.to_vec()
}

#[pyfunction]
#[pyo3(signature = (scenario, seed=None))]
fn build_realization_py(scenario: &PyScenario, seed: Option<u64>) -> PyResult<PyRealization> {
    scenario.realize(seed)
}

/// Summaries of the named metrics over `realizations` independent runs.
#[pyfunction]
#[pyo3(signature = (scenario, realizations, metrics, threads=None))]
fn monte_carlo<'py>(
    py: Python<'py>,
    scenario: &PyScenario,
    realizations: usize,
    metrics: Vec<String>,
    threads: Option<usize>,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let ms = metrics
        .iter()
        .map(|m| m.parse::<Metric>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(to_py)?;
    let cfg = scenario.inner.clone();
    let rows = py
        .detach(move || monte_carlo_metrics(&cfg, realizations, &ms, threads))
        .map_err(to_py)?;
    rows.iter().map(|r| summary_dict(py, r)).collect()
}

#[pyfunction]
#[pyo3(signature = (target, lambda_per_area, tx_power_dbm=50.0, threshold_db=-30.0, reference_distance=0.01))]
fn calibrate_alpha(
    target: f64,
    lambda_per_area: f64,
    tx_power_dbm: f64,
    threshold_db: f64,
    reference_distance: f64,
) -> PyResult<f64> {
    core_calibrate(target, lambda_per_area, tx_power_dbm, threshold_db, reference_distance).map_err(to_py)
}

#[pyfunction]
fn dbm_to_watts(dbm: f64) -> f64 {
    hetnet_core::dbm_to_watts(dbm)
}

#[pyfunction]
#[pyo3(signature = (tx_power_dbm, distance, alpha=hetnet_core::coverage::DEFAULT_ALPHA, reference_distance=0.01))]
fn rss_db(tx_power_dbm: f64, distance: f64, alpha: f64, reference_distance: f64) -> PyResult<f64> {
    let m = PathLossModel::new(reference_distance, alpha).map_err(to_py)?;
    Ok(hetnet_core::rss_db(tx_power_dbm, distance, &m))
}

#[pymodule]
fn hetnet(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", hetnet_core::VERSION)?;
    m.add("DEFAULT_ALPHA", hetnet_core::coverage::DEFAULT_ALPHA)?;
    m.add_class::<PyScenario>()?;
    m.add_class::<PyRealization>()?;
    m.add_function(wrap_pyfunction!(preset_names, m)?)?;
    m.add("build_realization", wrap_pyfunction!(build_realization_py, m)?)?;
    m.add_function(wrap_pyfunction!(monte_carlo, m)?)?;
    m.add_function(wrap_pyfunction!(calibrate_alpha, m)?)?;
    m.add_function(wrap_pyfunction!(dbm_to_watts, m)?)?;
    m.add_function(wrap_pyfunction!(rss_db, m)?)?;
    Ok(())
}

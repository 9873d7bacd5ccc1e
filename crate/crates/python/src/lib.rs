//! Python bindings for `bh-lab`.

use num_complex::Complex64;
use pyo3::exceptions::{PyIndexError, PyOverflowError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use bh_lab::combinatorics::{self, MultiIndex};
use bh_lab::experiments::{self, ExperimentRecord, SweepConfig, DEFAULT_DIVERGENCE_THRESHOLD};
use bh_lab::ksz::{self, KszRecord};
use bh_lab::multilinear::{self, SymmetricForm};
use bh_lab::polynomial::{self, HomogeneousPolynomial, TorusPoint};
use bh_lab::supnorm::{self, SupNormBudget, SupNormEstimate};
use bh_lab::Error;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Argument(msg) => PyValueError::new_err(msg),
        Error::Index(msg) => PyIndexError::new_err(msg),
        Error::Range(msg) => PyOverflowError::new_err(msg),
    }
}

trait IntoPy<T> {
    fn py_err(self) -> PyResult<T>;
}

impl<T> IntoPy<T> for bh_lab::Result<T> {
    fn py_err(self) -> PyResult<T> {
        self.map_err(to_py)
    }
}

fn budget(restarts: usize, samples: usize, tol: f64, max_sweeps: usize) -> SupNormBudget {
    SupNormBudget {
        restarts,
        samples_per_restart: samples,
        tol,
        max_sweeps,
    }
}

fn multi_index(exponents: Vec<u32>) -> PyResult<MultiIndex> {
    MultiIndex::new(exponents).py_err()
}

#[pyfunction]
fn multi_index_count(n: usize, m: usize) -> PyResult<u64> {
    combinatorics::multi_index_count(n, m).py_err()
}

#[pyfunction]
fn squarefree_count(n: usize, m: usize) -> PyResult<u64> {
    combinatorics::squarefree_count(n, m).py_err()
}

#[pyfunction]
fn excess_count(n: usize, m: usize) -> PyResult<u64> {
    combinatorics::excess_count(n, m).py_err()
}

#[pyfunction]
fn falling_factorial(n: usize, m: usize) -> PyResult<u64> {
    combinatorics::falling_factorial(n, m).py_err()
}

/// Multi-indices of degree `m` in `n` variables, colexicographic order.
#[pyfunction]
fn enumerate_multi_indices(n: usize, m: usize) -> PyResult<Vec<Vec<u32>>> {
    Ok(combinatorics::enumerate_multi_indices(n, m)
        .py_err()?
        .into_iter()
        .map(|a| a.exponents().to_vec())
        .collect())
}

#[pyfunction]
fn rank(exponents: Vec<u32>) -> PyResult<u64> {
    combinatorics::rank(&multi_index(exponents)?).py_err()
}

#[pyfunction]
fn unrank(index: u64, n: usize, m: usize) -> PyResult<Vec<u32>> {
    Ok(combinatorics::unrank(index, n, m)
        .py_err()?
        .exponents()
        .to_vec())
}

#[pyfunction]
fn orderings_multiplicity(exponents: Vec<u32>) -> PyResult<u64> {
    combinatorics::orderings_multiplicity(&multi_index(exponents)?).py_err()
}

#[pyfunction]
fn critical_exponent(m: usize) -> PyResult<f64> {
    experiments::critical_exponent(m).py_err()
}

#[pyfunction]
fn expected_slope_floor(m: usize, q: f64) -> f64 {
    experiments::expected_slope_floor(m, q)
}

/// Sup-norm estimate with its witness phases.
#[pyclass(name = "SupNormEstimate", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PySupNormEstimate(SupNormEstimate);

#[pymethods]
impl PySupNormEstimate {
    #[getter]
    fn lower_bound(&self) -> f64 {
        self.0.lower_bound
    }

    #[getter]
    fn upper_bound(&self) -> Option<f64> {
        self.0.upper_bound
    }

    #[getter]
    fn witness(&self) -> Vec<f64> {
        self.0.witness.phases().to_vec()
    }

    #[getter]
    fn restarts(&self) -> usize {
        self.0.restarts_used
    }

    #[getter]
    fn evaluations(&self) -> u64 {
        self.0.evaluations_used
    }

    #[getter]
    fn method(&self) -> &'static str {
        self.0.method.as_str()
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }

    fn __repr__(&self) -> String {
        format!(
            "SupNormEstimate(lower_bound={}, upper_bound={:?}, method='{}')",
            self.0.lower_bound,
            self.0.upper_bound,
            self.0.method.as_str()
        )
    }
}

/// Dense m-homogeneous polynomial on C^n.
#[pyclass(name = "Polynomial", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyPolynomial(HomogeneousPolynomial);

#[pymethods]
impl PyPolynomial {
    #[new]
    fn new(n: usize, m: usize, coefficients: Vec<Complex64>) -> PyResult<Self> {
        Ok(Self(
            HomogeneousPolynomial::new(n, m, coefficients).py_err()?,
        ))
    }

    #[staticmethod]
    fn random_signs(n: usize, m: usize, seed: u64) -> PyResult<Self> {
        Ok(Self(
            polynomial::random_sign_polynomial(n, m, seed).py_err()?,
        ))
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self(HomogeneousPolynomial::from_json(text).py_err()?))
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn m(&self) -> usize {
        self.0.m()
    }

    #[getter]
    fn seed(&self) -> Option<u64> {
        self.0.seed()
    }

    #[getter]
    fn coefficients(&self) -> Vec<Complex64> {
        self.0.coefficients().to_vec()
    }

    fn evaluate(&self, z: Vec<Complex64>) -> PyResult<Complex64> {
        self.0.evaluate(&z).py_err()
    }

    fn evaluate_on_torus(&self, phases: Vec<f64>) -> PyResult<Complex64> {
        self.0.evaluate_on_torus(&TorusPoint::new(phases)).py_err()
    }

    fn coeff_lq_norm(&self, q: f64) -> PyResult<f64> {
        self.0.coeff_lq_norm(q).py_err()
    }

    #[pyo3(signature = (samples, seed = 0))]
    fn sample_estimate(&self, samples: usize, seed: u64) -> PyResult<PySupNormEstimate> {
        Ok(PySupNormEstimate(
            supnorm::sample_estimate(&self.0, samples, seed).py_err()?,
        ))
    }

    #[pyo3(signature = (start, tol = 1e-9, max_sweeps = 200))]
    fn phase_ascent(
        &self,
        start: Vec<f64>,
        tol: f64,
        max_sweeps: usize,
    ) -> PyResult<PySupNormEstimate> {
        Ok(PySupNormEstimate(
            supnorm::phase_ascent(&self.0, &TorusPoint::new(start), tol, max_sweeps).py_err()?,
        ))
    }

    #[pyo3(signature = (restarts = 32, samples = 256, tol = 1e-9, max_sweeps = 200, seed = 0))]
    fn sup_norm_estimate(
        &self,
        py: Python<'_>,
        restarts: usize,
        samples: usize,
        tol: f64,
        max_sweeps: usize,
        seed: u64,
    ) -> PyResult<PySupNormEstimate> {
        let b = budget(restarts, samples, tol, max_sweeps);
        let est = py.detach(|| supnorm::sup_norm_estimate(&self.0, &b, seed));
        Ok(PySupNormEstimate(est.py_err()?))
    }

    fn grid_oracle(&self, resolution: usize) -> PyResult<PySupNormEstimate> {
        Ok(PySupNormEstimate(
            supnorm::grid_oracle(&self.0, resolution).py_err()?,
        ))
    }

    /// Entry `T(e_i1, ..., e_im)` of the polarized form; zero-based indices.
    fn form_entry(&self, tuple: Vec<usize>) -> PyResult<Complex64> {
        SymmetricForm::new(&self.0).form_entry(&tuple).py_err()
    }

    fn evaluate_form(&self, points: Vec<Vec<Complex64>>) -> PyResult<Complex64> {
        SymmetricForm::new(&self.0).evaluate(&points).py_err()
    }

    fn tensor_lq_norm(&self, q: f64) -> PyResult<f64> {
        SymmetricForm::new(&self.0).tensor_lq_norm(q).py_err()
    }

    #[pyo3(signature = (restarts = 32, samples = 256, tol = 1e-9, max_sweeps = 200, seed = 0))]
    fn form_sup_estimate(
        &self,
        py: Python<'_>,
        restarts: usize,
        samples: usize,
        tol: f64,
        max_sweeps: usize,
        seed: u64,
    ) -> PyResult<PySupNormEstimate> {
        let b = budget(restarts, samples, tol, max_sweeps);
        let est =
            py.detach(|| multilinear::form_sup_estimate(&SymmetricForm::new(&self.0), &b, seed));
        Ok(PySupNormEstimate(est.py_err()?))
    }

    fn __len__(&self) -> usize {
        self.0.coefficients().len()
    }

    fn __repr__(&self) -> String {
        format!(
            "Polynomial(n={}, m={}, terms={})",
            self.0.n(),
            self.0.m(),
            self.0.coefficients().len()
        )
    }
}

fn ksz_dict<'py>(py: Python<'py>, r: &KszRecord) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("n", r.n)?;
    d.set_item("m", r.m)?;
    d.set_item("seed", r.seed)?;
    d.set_item("sup_estimate", r.sup_estimate)?;
    d.set_item("denominator", r.ksz_bound_denominator)?;
    d.set_item("constant_estimate", r.constant_estimate)?;
    d.set_item("witness", r.estimate.witness.phases().to_vec())?;
    Ok(d)
}

fn record_dict<'py>(py: Python<'py>, r: &ExperimentRecord) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("m", r.m)?;
    d.set_item("n", r.n)?;
    d.set_item("q", r.q)?;
    d.set_item("trials", r.trials)?;
    d.set_item("seed", r.seed)?;
    d.set_item("coeff_count", r.coeff_count)?;
    d.set_item("coeff_lq", r.coeff_lq)?;
    d.set_item("sup_estimate", r.sup_estimate)?;
    d.set_item("ratio", r.ratio)?;
    d.set_item("constant_estimate", r.constant_estimate)?;
    Ok(d)
}

#[pyfunction]
#[allow(clippy::too_many_arguments)]
#[pyo3(signature = (n, m, seed = 0, restarts = 32, samples = 256, tol = 1e-9, max_sweeps = 200))]
fn ksz_record<'py>(
    py: Python<'py>,
    n: usize,
    m: usize,
    seed: u64,
    restarts: usize,
    samples: usize,
    tol: f64,
    max_sweeps: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let b = budget(restarts, samples, tol, max_sweeps);
    let r = py.detach(|| ksz::ksz_record(n, m, seed, &b)).py_err()?;
    ksz_dict(py, &r)
}

/// Best of `trials` sign patterns; returns the best record, its trial index
/// and every trial's constant estimate.
#[pyfunction]
#[pyo3(signature = (n, m, trials, seed = 0, restarts = 32, samples = 256, tol = 1e-9, max_sweeps = 200))]
#[allow(clippy::too_many_arguments)]
fn best_sign_search<'py>(
    py: Python<'py>,
    n: usize,
    m: usize,
    trials: usize,
    seed: u64,
    restarts: usize,
    samples: usize,
    tol: f64,
    max_sweeps: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let b = budget(restarts, samples, tol, max_sweeps);
    let s = py
        .detach(|| ksz::best_sign_search(n, m, trials, seed, &b))
        .py_err()?;
    let d = PyDict::new(py);
    d.set_item("best", ksz_dict(py, &s.best)?)?;
    d.set_item("best_trial", s.best_trial)?;
    d.set_item("constant_estimates", s.constant_estimates)?;
    Ok(d)
}

#[pyfunction]
#[pyo3(signature = (m, q, n_list, trials = 20, seed = 0, restarts = 32, samples = 256, tol = 1e-9, max_sweeps = 200))]
#[allow(clippy::too_many_arguments)]
fn ratio_sweep<'py>(
    py: Python<'py>,
    m: usize,
    q: f64,
    n_list: Vec<usize>,
    trials: usize,
    seed: u64,
    restarts: usize,
    samples: usize,
    tol: f64,
    max_sweeps: usize,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let config = SweepConfig {
        trials,
        budget: budget(restarts, samples, tol, max_sweeps),
        seed,
    };
    let recs = py
        .detach(|| experiments::ratio_sweep(m, q, &n_list, &config))
        .py_err()?;
    recs.iter().map(|r| record_dict(py, r)).collect()
}

#[pyfunction]
#[pyo3(signature = (m, q_list, n_list, trials = 20, seed = 0, threshold = DEFAULT_DIVERGENCE_THRESHOLD, restarts = 32, samples = 256, tol = 1e-9, max_sweeps = 200))]
#[allow(clippy::too_many_arguments)]
fn divergence_report<'py>(
    py: Python<'py>,
    m: usize,
    q_list: Vec<f64>,
    n_list: Vec<usize>,
    trials: usize,
    seed: u64,
    threshold: f64,
    restarts: usize,
    samples: usize,
    tol: f64,
    max_sweeps: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let config = SweepConfig {
        trials,
        budget: budget(restarts, samples, tol, max_sweeps),
        seed,
    };
    let rep = py
        .detach(|| experiments::divergence_report(m, &q_list, &n_list, &config, threshold))
        .py_err()?;
    let fits = rep
        .rows
        .iter()
        .map(|row| {
            let d = PyDict::new(py);
            d.set_item("q", row.q)?;
            d.set_item("slope", row.fit.slope)?;
            d.set_item("intercept", row.fit.intercept)?;
            d.set_item("r_squared", row.fit.r_squared)?;
            d.set_item("expected_slope_floor", row.fit.expected_slope_floor)?;
            d.set_item("verdict", row.verdict.as_str())?;
            Ok(d)
        })
        .collect::<PyResult<Vec<_>>>()?;
    let out = PyDict::new(py);
    out.set_item("m", rep.m)?;
    out.set_item("count_slope", rep.count_slope)?;
    out.set_item("fits", fits)?;
    out.set_item(
        "records",
        rep.records
            .iter()
            .map(|r| record_dict(py, r))
            .collect::<PyResult<Vec<_>>>()?,
    )?;
    out.set_item("slopes_csv", rep.slopes_csv())?;
    Ok(out)
}

#[pymodule]
#[pyo3(name = "bh_lab")]
fn bh_lab_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPolynomial>()?;
    m.add_class::<PySupNormEstimate>()?;
    m.add_function(wrap_pyfunction!(multi_index_count, m)?)?;
    m.add_function(wrap_pyfunction!(squarefree_count, m)?)?;
    m.add_function(wrap_pyfunction!(excess_count, m)?)?;
    m.add_function(wrap_pyfunction!(falling_factorial, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_multi_indices, m)?)?;
    m.add_function(wrap_pyfunction!(rank, m)?)?;
    m.add_function(wrap_pyfunction!(unrank, m)?)?;
    m.add_function(wrap_pyfunction!(orderings_multiplicity, m)?)?;
    m.add_function(wrap_pyfunction!(critical_exponent, m)?)?;
    m.add_function(wrap_pyfunction!(expected_slope_floor, m)?)?;
    m.add_function(wrap_pyfunction!(ksz_record, m)?)?;
    m.add_function(wrap_pyfunction!(best_sign_search, m)?)?;
    m.add_function(wrap_pyfunction!(ratio_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(divergence_report, m)?)?;
    m.add("DEFAULT_DIVERGENCE_THRESHOLD", DEFAULT_DIVERGENCE_THRESHOLD)?;
    Ok(())
}

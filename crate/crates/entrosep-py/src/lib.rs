//! Python bindings: bipartite states, the entropic criteria, mixed family
//! closed forms and thresholds, and the multistart floor search.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use entrosep::criteria;
use entrosep::entropy::{self, OutcomeDistribution};
use entrosep::observables::set_by_name;
use entrosep::qstate::{
    product_state, random_separable_mixture_with, rng_stream, DensityMatrix, ProductParams,
};
use entrosep::sepmin::{self, MultistartConfig};
use entrosep::werner;
use entrosep::Error;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::NoThreshold(_) | Error::Numerical(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// One criterion evaluated on one state. margin is bound minus value, so a
/// violation shows as a positive margin beyond tolerance.
#[pyclass(name = "Verdict", frozen)]
struct Verdict {
    #[pyo3(get)]
    criterion_id: String,
    #[pyo3(get)]
    value: f64,
    #[pyo3(get)]
    bound: f64,
    #[pyo3(get)]
    margin: f64,
    #[pyo3(get)]
    violated: bool,
}

#[pymethods]
impl Verdict {
    fn __repr__(&self) -> String {
        format!(
            "Verdict(criterion_id='{}', value={}, bound={}, violated={})",
            self.criterion_id, self.value, self.bound, self.violated
        )
    }
}

/// Bipartite density matrix with fixed factor dimensions.
#[pyclass(name = "State", frozen)]
struct State {
    inner: DensityMatrix,
}

#[pymethods]
impl State {
    /// Parse {"dimA": ..., "dimB": ..., "matrix": [[re, im], ...]} JSON.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self { inner: DensityMatrix::from_json(text).map_err(to_py)? })
    }

    /// The one parameter interpolation between white noise and the singlet.
    #[staticmethod]
    fn werner(p: f64) -> PyResult<Self> {
        Ok(Self { inner: werner::werner(p).map_err(to_py)?.state().clone() })
    }

    /// Pure two qubit product state from the four angle parametrization.
    #[staticmethod]
    fn product(alpha: f64, beta: f64, delta: f64, gamma: f64) -> Self {
        Self { inner: product_state(&ProductParams::new(alpha, beta, delta, gamma)).density() }
    }

    /// Random convex mixture of product states, separable by construction.
    #[staticmethod]
    #[pyo3(signature = (dim=2, terms=4, seed=0))]
    fn random_separable(dim: usize, terms: usize, seed: u64) -> PyResult<Self> {
        if dim < 2 || terms == 0 {
            return Err(PyValueError::new_err("need dim >= 2 and terms >= 1"));
        }
        let mut rng = rng_stream(seed, 7);
        Ok(Self { inner: random_separable_mixture_with(dim, terms, &mut rng).realize() })
    }

    fn dims(&self) -> (usize, usize) {
        (self.inner.dim_a(), self.inner.dim_b())
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn is_ppt(&self) -> bool {
        self.inner.is_ppt()
    }

    fn min_pt_eigenvalue(&self) -> f64 {
        self.inner.min_pt_eigenvalue()
    }

    /// Evaluate every criterion applicable at this dimension.
    fn check(&self) -> PyResult<Vec<Verdict>> {
        let verdicts = criteria::evaluate_all(&self.inner).map_err(to_py)?;
        Ok(verdicts
            .into_iter()
            .map(|v| Verdict {
                criterion_id: v.criterion_id,
                value: v.value,
                bound: v.bound,
                margin: v.margin,
                violated: v.violated,
            })
            .collect())
    }

    /// Entropy sum of one named operator set on this state, in nats.
    fn total_uncertainty(&self, set_name: &str) -> PyResult<f64> {
        let (da, db) = self.dims();
        if da != db {
            return Err(PyValueError::new_err("operator sets need equal factor dimensions"));
        }
        let set = set_by_name(set_name, da).map_err(to_py)?;
        entropy::total_uncertainty(&set, &self.inner).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("State(dims=({}, {}), ppt={})", self.inner.dim_a(), self.inner.dim_b(), self.is_ppt())
    }
}

/// Shannon entropy of a probability vector, in nats.
#[pyfunction]
fn shannon(probs: Vec<f64>) -> PyResult<f64> {
    Ok(OutcomeDistribution::new(probs).map_err(to_py)?.entropy())
}

/// H2(x) = -x ln x - (1-x) ln(1-x).
#[pyfunction]
fn binary_entropy(x: f64) -> f64 {
    entropy::binary_entropy(x)
}

/// Mixing parameter where a criterion's closed form starts to fire.
#[pyfunction]
#[pyo3(signature = (criterion_id, tol=1e-6))]
fn werner_threshold(criterion_id: &str, tol: f64) -> PyResult<f64> {
    werner::threshold(criterion_id, tol).map_err(to_py)
}

/// Closed form criterion value on the mixed family at parameter p.
#[pyfunction]
fn werner_closed_form(criterion_id: &str, p: f64) -> PyResult<f64> {
    werner::closed_form(criterion_id, p).map_err(to_py)
}

/// Multistart minimum of a set's entropy sum over product states.
/// Returns (value, converged).
#[pyfunction]
#[pyo3(signature = (set_name, d=2, starts=128, seed=0))]
fn minimize_floor(set_name: &str, d: usize, starts: usize, seed: u64) -> PyResult<(f64, bool)> {
    let set = set_by_name(set_name, d).map_err(to_py)?;
    let cfg = MultistartConfig { starts, seed, ..Default::default() };
    let r = sepmin::minimize_sep(&set, d, &cfg).map_err(to_py)?;
    Ok((r.value, r.converged))
}

/// Criterion ids applicable to a pair of d dimensional factors.
#[pyfunction]
#[pyo3(signature = (d=2))]
fn criterion_ids(d: usize) -> PyResult<Vec<String>> {
    let crits = if d == 2 {
        criteria::two_qubit_criteria()
    } else {
        criteria::dxd_criteria(d).map_err(to_py)?
    };
    Ok(crits.iter().map(|c| c.id().to_string()).collect())
}

/// Full operator set as pretty printed JSON (labels, eigenvalues, projectors).
#[pyfunction]
#[pyo3(signature = (set_name, d=2))]
fn operator_set_json(set_name: &str, d: usize) -> PyResult<String> {
    Ok(entrosep::cli::set_json(&set_by_name(set_name, d).map_err(to_py)?))
}

#[pymodule]
fn entrosep_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<State>()?;
    m.add_class::<Verdict>()?;
    m.add_function(wrap_pyfunction!(shannon, m)?)?;
    m.add_function(wrap_pyfunction!(binary_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(werner_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(werner_closed_form, m)?)?;
    m.add_function(wrap_pyfunction!(minimize_floor, m)?)?;
    m.add_function(wrap_pyfunction!(criterion_ids, m)?)?;
    m.add_function(wrap_pyfunction!(operator_set_json, m)?)?;
    Ok(())
}

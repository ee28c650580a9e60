//! Python bindings: states, observables, standard functions, channels, the
//! metric quantities and the inequality checks.
//!
//! ```python
//! import qig
//! d = qig.DensityMatrix([[0.7, 0.0], [0.0, 0.3]])
//! a = qig.Observable([[0.0, 1.0], [1.0, 0.0]])
//! qig.skew_information(d, qig.StandardFunction("wy"), a)
//! ```

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use qig_core::channels::{check_cov_monotonicity, check_fisher_monotonicity, KrausChannel, Subsystem};
use qig_core::inequalities::{
    check_dynamical_ucp, check_robertson, check_theorem1, check_theorem3, check_theorem4, InequalityVerdict,
};
use qig_core::json::{parse_channel, ChannelJson, MatrixJson};
use qig_core::linalg::{complex_from_parts, CMatrix};
use qig_core::metrics::{cov_symmetrized, tilde_identity_residual, MetricContext};
use qig_core::state::{random_density, random_observable, RngStream};
use qig_core::{DensityMatrix, Error, Observable, StandardFunction};

create_exception!(qig, ConditionViolated, PyValueError, "The function hypothesis of a check does not hold.");

fn to_py(e: Error) -> PyErr {
    match e {
        Error::ConditionViolated(msg) => ConditionViolated::new_err(msg),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn matrix(re: Vec<Vec<f64>>, im: Option<Vec<Vec<f64>>>) -> Result<CMatrix, Error> {
    let im = im.unwrap_or_else(|| re.iter().map(|r| vec![0.0; r.len()]).collect());
    complex_from_parts(&re, &im)
}

fn parts(m: &CMatrix) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let re = m.row_iter().map(|r| r.iter().map(|z| z.re).collect()).collect();
    let im = m.row_iter().map(|r| r.iter().map(|z| z.im).collect()).collect();
    (re, im)
}

#[pyclass(name = "DensityMatrix", module = "qig", frozen)]
struct PyDensityMatrix {
    inner: DensityMatrix,
}

#[pymethods]
impl PyDensityMatrix {
    /// Validates Hermiticity, unit trace and faithfulness.
    #[new]
    #[pyo3(signature = (re, im=None))]
    fn new(re: Vec<Vec<f64>>, im: Option<Vec<Vec<f64>>>) -> PyResult<Self> {
        let inner = matrix(re, im).and_then(DensityMatrix::from_matrix).map_err(to_py)?;
        Ok(Self { inner })
    }

    /// Ginibre-distributed random state.
    #[staticmethod]
    fn random(n: usize, seed: u64) -> PyResult<Self> {
        if n < 1 {
            return Err(PyValueError::new_err("n must be at least 1"));
        }
        Ok(Self {
            inner: random_density(n, &mut RngStream::new(seed)),
        })
    }

    #[staticmethod]
    fn diagonal(probs: Vec<f64>) -> PyResult<Self> {
        Ok(Self {
            inner: DensityMatrix::diagonal(&probs).map_err(to_py)?,
        })
    }

    #[staticmethod]
    fn maximally_mixed(n: usize) -> Self {
        Self {
            inner: DensityMatrix::maximally_mixed(n),
        }
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = parse_matrix_json(text)?.to_density().map_err(to_py)?;
        Ok(Self { inner })
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&MatrixJson::from_matrix(self.inner.matrix())).expect("plain data serializes")
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    /// Ascending.
    fn eigenvalues(&self) -> Vec<f64> {
        self.inner.eigenvalues().to_vec()
    }

    /// `(re, im)` as nested lists.
    fn parts(&self) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
        parts(self.inner.matrix())
    }

    fn __repr__(&self) -> String {
        format!("DensityMatrix(dim={}, eigenvalues={:?})", self.inner.dim(), self.inner.eigenvalues())
    }
}

#[pyclass(name = "Observable", module = "qig", frozen)]
struct PyObservable {
    inner: Observable,
}

#[pymethods]
impl PyObservable {
    #[new]
    #[pyo3(signature = (re, im=None))]
    fn new(re: Vec<Vec<f64>>, im: Option<Vec<Vec<f64>>>) -> PyResult<Self> {
        let inner = matrix(re, im).and_then(Observable::from_matrix).map_err(to_py)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn random(n: usize, seed: u64) -> PyResult<Self> {
        if n < 2 {
            return Err(PyValueError::new_err("n must be at least 2"));
        }
        Ok(Self {
            inner: random_observable(n, &mut RngStream::new(seed)),
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = parse_matrix_json(text)?.to_observable().map_err(to_py)?;
        Ok(Self { inner })
    }

    /// `A - Tr(D A) I`.
    fn centered(&self, d: &PyDensityMatrix) -> PyResult<Self> {
        Ok(Self {
            inner: self.inner.centered(&d.inner).map_err(to_py)?,
        })
    }

    fn scale(&self, s: f64) -> Self {
        Self {
            inner: self.inner.scale(s),
        }
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn parts(&self) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
        parts(self.inner.matrix())
    }

    fn __repr__(&self) -> String {
        format!("Observable(dim={})", self.inner.dim())
    }
}

fn parse_matrix_json(text: &str) -> PyResult<MatrixJson> {
    qig_core::json::parse_matrix(text).map_err(to_py)
}

/// A catalog function from its spec string: `sld`, `wy`, `rld`, `km`,
/// `kosaki:<beta>` or `tilde(<spec>)`.
#[pyclass(name = "StandardFunction", module = "qig", frozen)]
struct PyStandardFunction {
    inner: StandardFunction,
}

#[pymethods]
impl PyStandardFunction {
    #[new]
    fn new(spec: &str) -> PyResult<Self> {
        Ok(Self {
            inner: spec.parse().map_err(to_py)?,
        })
    }

    #[staticmethod]
    fn catalog() -> Vec<Self> {
        StandardFunction::catalog().into_iter().map(|inner| Self { inner }).collect()
    }

    fn __call__(&self, x: f64) -> PyResult<f64> {
        self.inner.eval(x).map_err(to_py)
    }

    fn at_zero(&self) -> f64 {
        self.inner.at_zero()
    }

    fn tilde(&self) -> Self {
        Self {
            inner: self.inner.tilde(),
        }
    }

    /// `M_f(a, b) = b f(a/b)`.
    fn mean(&self, a: f64, b: f64) -> PyResult<f64> {
        qig_core::functions::mean(&self.inner, a, b).map_err(to_py)
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("StandardFunction({:?})", self.inner.to_string())
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }
}

/// Row-major real or imaginary part of a matrix.
type Rows = Vec<Vec<f64>>;

#[pyclass(name = "KrausChannel", module = "qig", frozen)]
struct PyKrausChannel {
    inner: KrausChannel,
}

#[pymethods]
impl PyKrausChannel {
    /// Kraus operators as `(re, im)` pairs of nested lists.
    #[new]
    fn new(kraus: Vec<(Rows, Rows)>) -> PyResult<Self> {
        let ops = kraus
            .into_iter()
            .map(|(re, im)| complex_from_parts(&re, &im))
            .collect::<Result<Vec<_>, _>>()
            .map_err(to_py)?;
        Ok(Self {
            inner: KrausChannel::new(ops).map_err(to_py)?,
        })
    }

    #[staticmethod]
    fn identity(n: usize) -> Self {
        Self {
            inner: KrausChannel::identity(n),
        }
    }

    #[staticmethod]
    fn pinching(n: usize) -> Self {
        Self {
            inner: KrausChannel::pinching(n),
        }
    }

    /// Partial trace on `C^a ⊗ C^b`; `keep` is `"first"` or `"second"`.
    #[staticmethod]
    #[pyo3(signature = (a, b, keep="first"))]
    fn partial_trace(a: usize, b: usize, keep: &str) -> PyResult<Self> {
        let keep = match keep {
            "first" => Subsystem::First,
            "second" => Subsystem::Second,
            other => return Err(PyValueError::new_err(format!("keep must be 'first' or 'second', got {other:?}"))),
        };
        Ok(Self {
            inner: KrausChannel::partial_trace(a, b, keep).map_err(to_py)?,
        })
    }

    #[staticmethod]
    fn random(n: usize, k: usize, e: usize, seed: u64) -> PyResult<Self> {
        Ok(Self {
            inner: KrausChannel::random(n, k, e, &mut RngStream::new(seed)).map_err(to_py)?,
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = parse_channel(text).and_then(|c| c.to_channel()).map_err(to_py)?;
        Ok(Self { inner })
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&ChannelJson::from_channel(&self.inner)).expect("plain data serializes")
    }

    #[getter]
    fn in_dim(&self) -> usize {
        self.inner.in_dim()
    }

    #[getter]
    fn out_dim(&self) -> usize {
        self.inner.out_dim()
    }

    /// The output state, mixed towards `I/k` if it lost faithfulness.
    fn apply(&self, d: &PyDensityMatrix) -> PyResult<PyDensityMatrix> {
        Ok(PyDensityMatrix {
            inner: self.inner.apply(&d.inner).map_err(to_py)?.state,
        })
    }

    /// Heisenberg picture `Σ K* A K`.
    fn adjoint(&self, a: &PyObservable) -> PyResult<PyObservable> {
        Ok(PyObservable {
            inner: self.inner.adjoint_apply(&a.inner).map_err(to_py)?,
        })
    }
}

#[pyclass(name = "Verdict", module = "qig", frozen, get_all)]
struct PyVerdict {
    theorem: String,
    lhs: f64,
    rhs: f64,
    margin: f64,
    scale: f64,
    holds: bool,
    equality_case: bool,
    consistent: bool,
    notes: String,
}

#[pymethods]
impl PyVerdict {
    fn __repr__(&self) -> String {
        format!(
            "Verdict(theorem={:?}, lhs={}, rhs={}, margin={}, holds={}, equality_case={})",
            self.theorem, self.lhs, self.rhs, self.margin, self.holds, self.equality_case
        )
    }
}

impl From<InequalityVerdict> for PyVerdict {
    fn from(v: InequalityVerdict) -> Self {
        Self {
            holds: v.holds && v.consistent,
            theorem: v.theorem,
            lhs: v.lhs,
            rhs: v.rhs,
            margin: v.margin,
            scale: v.scale,
            equality_case: v.equality_case,
            consistent: v.consistent,
            notes: v.notes,
        }
    }
}

fn verdict(v: Result<InequalityVerdict, Error>) -> PyResult<PyVerdict> {
    v.map(PyVerdict::from).map_err(to_py)
}

fn unwrap_obs(obs: Vec<PyRef<'_, PyObservable>>) -> Vec<Observable> {
    obs.iter().map(|o| o.inner.clone()).collect()
}

fn second<'a>(a: &'a PyObservable, b: Option<&'a PyObservable>) -> &'a Observable {
    &b.unwrap_or(a).inner
}

/// `γ_D^f(A, B)`; `B` defaults to `A`.
#[pyfunction]
#[pyo3(signature = (d, f, a, b=None))]
fn gamma(d: &PyDensityMatrix, f: &PyStandardFunction, a: &PyObservable, b: Option<&PyObservable>) -> PyResult<f64> {
    let ctx = MetricContext::new(&d.inner, &f.inner);
    Ok(ctx.gamma(a.inner.matrix(), second(a, b).matrix()).map_err(to_py)?.re)
}

/// `qCov_D^f(A, B)`.
#[pyfunction]
#[pyo3(signature = (d, f, a, b=None))]
fn qcov(d: &PyDensityMatrix, f: &PyStandardFunction, a: &PyObservable, b: Option<&PyObservable>) -> PyResult<f64> {
    let ctx = MetricContext::new(&d.inner, &f.inner);
    Ok(ctx.qcov(a.inner.matrix(), second(a, b).matrix()).map_err(to_py)?.re)
}

/// Symmetrized covariance `Re Tr D A B - Tr D A Tr D B`.
#[pyfunction]
#[pyo3(signature = (d, a, b=None))]
fn cov(d: &PyDensityMatrix, a: &PyObservable, b: Option<&PyObservable>) -> PyResult<f64> {
    cov_symmetrized(&d.inner, &a.inner, second(a, b)).map_err(to_py)
}

/// `(f(0)/2) γ_D^f(i[D,A], i[D,B])`.
#[pyfunction]
#[pyo3(signature = (d, f, a, b=None))]
fn skew_information(
    d: &PyDensityMatrix,
    f: &PyStandardFunction,
    a: &PyObservable,
    b: Option<&PyObservable>,
) -> PyResult<f64> {
    MetricContext::new(&d.inner, &f.inner)
        .skew_information(&a.inner, second(a, b))
        .map_err(to_py)
}

/// `(skew, cov - qcov_tilde, |difference|)`.
#[pyfunction]
#[pyo3(signature = (d, f, a, b=None))]
fn skew_identity(
    d: &PyDensityMatrix,
    f: &PyStandardFunction,
    a: &PyObservable,
    b: Option<&PyObservable>,
) -> PyResult<(f64, f64, f64)> {
    let r = tilde_identity_residual(&d.inner, &f.inner, &a.inner, second(a, b)).map_err(to_py)?;
    Ok((r.lhs, r.rhs, r.residual))
}

#[pyfunction]
#[pyo3(name = "check_theorem1")]
fn py_check_theorem1(
    f: &PyStandardFunction,
    g: &PyStandardFunction,
    c: f64,
    d: &PyDensityMatrix,
    a: &PyObservable,
) -> PyResult<PyVerdict> {
    verdict(check_theorem1(&f.inner, &g.inner, c, &d.inner, &a.inner))
}

#[pyfunction]
#[pyo3(name = "check_theorem3")]
fn py_check_theorem3(
    f: &PyStandardFunction,
    g: &PyStandardFunction,
    c: f64,
    d: &PyDensityMatrix,
    obs: Vec<PyRef<'_, PyObservable>>,
) -> PyResult<PyVerdict> {
    verdict(check_theorem3(&f.inner, &g.inner, c, &d.inner, &unwrap_obs(obs)))
}

#[pyfunction]
#[pyo3(name = "check_dynamical_ucp")]
fn py_check_dynamical_ucp(
    f: &PyStandardFunction,
    d: &PyDensityMatrix,
    obs: Vec<PyRef<'_, PyObservable>>,
) -> PyResult<PyVerdict> {
    verdict(check_dynamical_ucp(&f.inner, &d.inner, &unwrap_obs(obs)))
}

#[pyfunction]
#[pyo3(name = "check_theorem4")]
fn py_check_theorem4(
    f: &PyStandardFunction,
    g: &PyStandardFunction,
    c: f64,
    dc: f64,
    d: &PyDensityMatrix,
    obs: Vec<PyRef<'_, PyObservable>>,
) -> PyResult<PyVerdict> {
    verdict(check_theorem4(&f.inner, &g.inner, c, dc, &d.inner, &unwrap_obs(obs)))
}

#[pyfunction]
#[pyo3(name = "check_robertson")]
fn py_check_robertson(d: &PyDensityMatrix, obs: Vec<PyRef<'_, PyObservable>>) -> PyResult<PyVerdict> {
    verdict(check_robertson(&d.inner, &unwrap_obs(obs)))
}

#[pyfunction]
#[pyo3(name = "check_fisher_monotonicity")]
fn py_check_fisher_monotonicity(
    f: &PyStandardFunction,
    ch: &PyKrausChannel,
    d: &PyDensityMatrix,
    a: &PyObservable,
) -> PyResult<PyVerdict> {
    verdict(check_fisher_monotonicity(&f.inner, &ch.inner, &d.inner, &a.inner))
}

#[pyfunction]
#[pyo3(name = "check_cov_monotonicity")]
fn py_check_cov_monotonicity(
    f: &PyStandardFunction,
    ch: &PyKrausChannel,
    d: &PyDensityMatrix,
    a: &PyObservable,
) -> PyResult<PyVerdict> {
    verdict(check_cov_monotonicity(&f.inner, &ch.inner, &d.inner, &a.inner))
}

#[pymodule]
fn qig(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("ConditionViolated", m.py().get_type::<ConditionViolated>())?;
    m.add_class::<PyDensityMatrix>()?;
    m.add_class::<PyObservable>()?;
    m.add_class::<PyStandardFunction>()?;
    m.add_class::<PyKrausChannel>()?;
    m.add_class::<PyVerdict>()?;
    m.add_function(wrap_pyfunction!(gamma, m)?)?;
    m.add_function(wrap_pyfunction!(qcov, m)?)?;
    m.add_function(wrap_pyfunction!(cov, m)?)?;
    m.add_function(wrap_pyfunction!(skew_information, m)?)?;
    m.add_function(wrap_pyfunction!(skew_identity, m)?)?;
    m.add_function(wrap_pyfunction!(py_check_theorem1, m)?)?;
    m.add_function(wrap_pyfunction!(py_check_theorem3, m)?)?;
    m.add_function(wrap_pyfunction!(py_check_dynamical_ucp, m)?)?;
    m.add_function(wrap_pyfunction!(py_check_theorem4, m)?)?;
    m.add_function(wrap_pyfunction!(py_check_robertson, m)?)?;
    m.add_function(wrap_pyfunction!(py_check_fisher_monotonicity, m)?)?;
    m.add_function(wrap_pyfunction!(py_check_cov_monotonicity, m)?)?;
    Ok(())
}

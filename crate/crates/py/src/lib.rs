//! Python bindings. Fields cross the boundary as flat row-major lists of
//! floats paired with a `Grid`.

use chemotaxis as core;
use pyo3::exceptions::{PyArithmeticError, PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn py_err(e: core::Error) -> PyErr {
    let msg = e.to_string();
    match e {
        core::Error::Convergence { .. } => PyRuntimeError::new_err(msg),
        core::Error::NegativeDensity { .. } => PyArithmeticError::new_err(msg),
        core::Error::Io { .. } => PyOSError::new_err(msg),
        _ => PyValueError::new_err(msg),
    }
}

#[pyclass(name = "Params", from_py_object)]
#[derive(Clone, Copy)]
struct PyParams {
    #[pyo3(get, set)]
    eps: f64,
    #[pyo3(get, set)]
    r: f64,
    #[pyo3(get, set)]
    mu: f64,
    #[pyo3(get, set)]
    theta: f64,
    #[pyo3(get, set)]
    d1: f64,
    #[pyo3(get, set)]
    d2: f64,
    #[pyo3(get, set)]
    alpha: f64,
    #[pyo3(get, set)]
    beta: f64,
    #[pyo3(get, set)]
    gamma: f64,
    #[pyo3(get, set)]
    delta: f64,
}

impl From<core::Params> for PyParams {
    fn from(p: core::Params) -> Self {
        PyParams {
            eps: p.eps,
            r: p.r,
            mu: p.mu,
            theta: p.theta,
            d1: p.d1,
            d2: p.d2,
            alpha: p.alpha,
            beta: p.beta,
            gamma: p.gamma,
            delta: p.delta,
        }
    }
}

impl From<PyParams> for core::Params {
    fn from(p: PyParams) -> Self {
        core::Params {
            eps: p.eps,
            r: p.r,
            mu: p.mu,
            theta: p.theta,
            d1: p.d1,
            d2: p.d2,
            alpha: p.alpha,
            beta: p.beta,
            gamma: p.gamma,
            delta: p.delta,
        }
    }
}

#[pymethods]
impl PyParams {
    #[new]
    #[pyo3(signature = (eps=0.0, r=1.0, mu=1.0, theta=2.0, d1=1.0, d2=1.0, alpha=1.0, beta=1.0, gamma=1.0, delta=1.0))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        eps: f64,
        r: f64,
        mu: f64,
        theta: f64,
        d1: f64,
        d2: f64,
        alpha: f64,
        beta: f64,
        gamma: f64,
        delta: f64,
    ) -> Self {
        PyParams {
            eps,
            r,
            mu,
            theta,
            d1,
            d2,
            alpha,
            beta,
            gamma,
            delta,
        }
    }

    fn validate(&self) -> PyResult<()> {
        core::Params::from(*self).validate().map_err(py_err)
    }

    fn logistic_equilibrium(&self) -> f64 {
        core::Params::from(*self).logistic_equilibrium()
    }

    fn __repr__(&self) -> String {
        format!("{:?}", core::Params::from(*self))
    }
}

#[pyclass(name = "Grid", from_py_object)]
#[derive(Clone, Copy)]
struct PyGrid(core::Grid);

#[pymethods]
impl PyGrid {
    /// `Grid(nx)` is 1D on [0, lx]; pass `ny` for a rectangle.
    #[new]
    #[pyo3(signature = (nx, ny=None, lx=1.0, ly=1.0))]
    fn new(nx: usize, ny: Option<usize>, lx: f64, ly: f64) -> PyResult<Self> {
        let g = match ny {
            None => core::Grid::new_1d(nx, lx),
            Some(ny) => core::Grid::new_2d(nx, ny, lx, ly),
        };
        g.map(PyGrid).map_err(py_err)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }
    #[getter]
    fn nx(&self) -> usize {
        self.0.nx()
    }
    #[getter]
    fn ny(&self) -> usize {
        self.0.ny()
    }
    #[getter]
    fn hx(&self) -> f64 {
        self.0.hx()
    }
    #[getter]
    fn hy(&self) -> f64 {
        self.0.hy()
    }
    fn __len__(&self) -> usize {
        self.0.len()
    }
    fn measure(&self) -> f64 {
        self.0.measure()
    }
    /// Cell centers in storage order.
    fn centers(&self) -> Vec<(f64, f64)> {
        let g = self.0;
        (0..g.ny())
            .flat_map(|j| (0..g.nx()).map(move |i| g.center(i, j)))
            .collect()
    }
    fn __repr__(&self) -> String {
        format!("{:?}", self.0)
    }
}

fn field(grid: &PyGrid, values: Vec<f64>) -> PyResult<core::Field> {
    core::Field::new(grid.0, values).map_err(py_err)
}

#[pyfunction]
fn validate_params(p: PyParams) -> PyResult<PyParams> {
    core::validate_params(p.into()).map(Into::into).map_err(py_err)
}

#[pyfunction]
fn m1(p: PyParams, grid: PyGrid, u0: Vec<f64>) -> PyResult<f64> {
    core::m1(&p.into(), &field(&grid, u0)?).map_err(py_err)
}

#[pyfunction]
fn make_bump(grid: PyGrid, center: (f64, f64), width: f64, target_ltheta: f64, theta: f64) -> PyResult<Vec<f64>> {
    core::make_bump(&grid.0, center, width, target_ltheta, theta)
        .map(core::Field::into_values)
        .map_err(py_err)
}

/// Reduced parameters for the attraction-repulsion system (`v = chi z − xi w`).
#[pyfunction]
fn ar_reduce(chi: f64, xi: f64, p: PyParams) -> PyResult<PyParams> {
    core::ar_reduce(&core::ARParams {
        chi,
        xi,
        params: p.into(),
    })
    .map(Into::into)
    .map_err(py_err)
}

fn solve_cfg(rel_tol: f64, preconditioner: &str) -> PyResult<core::SolveConfig> {
    Ok(core::SolveConfig {
        rel_tol,
        preconditioner: preconditioner.parse().map_err(PyValueError::new_err)?,
        ..core::SolveConfig::default()
    })
}

/// Solves `c phi − d Δphi = source` with zero-flux boundaries.
#[pyfunction]
#[pyo3(signature = (grid, d, c, source, rel_tol=1e-10, preconditioner="spectral"))]
fn solve_helmholtz(
    grid: PyGrid,
    d: f64,
    c: f64,
    source: Vec<f64>,
    rel_tol: f64,
    preconditioner: &str,
) -> PyResult<Vec<f64>> {
    let prob = core::HelmholtzProblem::new(d, c, field(&grid, source)?).map_err(py_err)?;
    core::solve_helmholtz(&prob, &solve_cfg(rel_tol, preconditioner)?)
        .map(core::Field::into_values)
        .map_err(py_err)
}

/// Returns `(v, w)` for density `u`.
#[pyfunction]
#[pyo3(signature = (p, grid, u, rel_tol=1e-10))]
fn solve_signals(p: PyParams, grid: PyGrid, u: Vec<f64>, rel_tol: f64) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let (v, w) = core::solve_signals(&field(&grid, u)?, &p.into(), &solve_cfg(rel_tol, "spectral")?)
        .map_err(py_err)?;
    Ok((v.into_values(), w.into_values()))
}

/// Runs to `t_end` and returns a dict with the verdict, run summary,
/// diagnostics records and final density.
#[pyfunction]
#[pyo3(signature = (p, grid, u0, t_end, cfl=0.4, dt_max=1e-2, blowup_cutoff=1e6, cadence=1))]
#[allow(clippy::too_many_arguments)]
fn run<'py>(
    py: Python<'py>,
    p: PyParams,
    grid: PyGrid,
    u0: Vec<f64>,
    t_end: f64,
    cfl: f64,
    dt_max: f64,
    blowup_cutoff: f64,
    cadence: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let p: core::Params = p.into();
    let step = core::StepConfig {
        cfl,
        dt_max,
        blowup_cutoff,
        ..core::StepConfig::default()
    };
    let probes = core::DiagnosticsConfig {
        cadence,
        ..core::DiagnosticsConfig::for_params(&p)
    };
    let u0 = field(&grid, u0)?;
    let rep = py
        .detach(|| core::run(u0, &p, t_end, &step, &core::SolveConfig::default(), &probes))
        .map_err(py_err)?;

    let out = PyDict::new(py);
    out.set_item("verdict", rep.verdict.as_str())?;
    out.set_item("terminal_time", rep.terminal_time)?;
    out.set_item("terminal_umax", rep.terminal_umax)?;
    out.set_item("peak_umax", rep.peak.umax)?;
    out.set_item("peak_time", rep.peak.t)?;
    out.set_item("steps", rep.steps)?;
    out.set_item("min_u", rep.min_u)?;
    out.set_item("max_mass_id_err", rep.max_mass_id_err)?;
    let records = rep
        .records
        .iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("t", r.t)?;
            d.set_item("mass", r.mass)?;
            d.set_item("mean", r.mean)?;
            d.set_item("umax", r.umax)?;
            d.set_item("ltheta", r.ltheta)?;
            d.set_item("w1q", r.w1q)?;
            d.set_item("mass_id_err", r.mass_id_err)?;
            d.set_item("dt", r.dt)?;
            Ok(d)
        })
        .collect::<PyResult<Vec<_>>>()?;
    out.set_item("records", records)?;
    out.set_item("u", rep.final_state.u.into_values())?;
    Ok(out)
}

#[pyfunction]
fn blowup_time_bound(a: f64, b: f64, d: f64, kappa: f64) -> PyResult<f64> {
    core::blowup_time_bound(&core::BlowupBoundInputs { a, b, d, kappa }).map_err(py_err)
}

/// Fits `y' <= C (y + y^3)` to `(t, y)` samples; returns `(C, valid_until)`.
#[pyfunction]
fn fit_bernoulli(points: Vec<(f64, f64)>) -> PyResult<(f64, f64)> {
    core::fit_bernoulli(&points)
        .map(|f| (f.c, f.valid_until))
        .map_err(py_err)
}

/// Parses and runs a configuration file body, writing results into `out_dir`.
#[pyfunction]
#[pyo3(signature = (text, out_dir, workers=1))]
fn run_config(py: Python<'_>, text: &str, out_dir: std::path::PathBuf, workers: usize) -> PyResult<String> {
    let cfg = core::parse_config(text).map_err(py_err)?;
    py.detach(|| core::cli::execute(&cfg, &out_dir, workers))
        .map_err(py_err)
}

#[pymodule]
fn chemotaxis_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", core::VERSION)?;
    m.add_class::<PyParams>()?;
    m.add_class::<PyGrid>()?;
    m.add_function(wrap_pyfunction!(validate_params, m)?)?;
    m.add_function(wrap_pyfunction!(m1, m)?)?;
    m.add_function(wrap_pyfunction!(make_bump, m)?)?;
    m.add_function(wrap_pyfunction!(ar_reduce, m)?)?;
    m.add_function(wrap_pyfunction!(solve_helmholtz, m)?)?;
    m.add_function(wrap_pyfunction!(solve_signals, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(blowup_time_bound, m)?)?;
    m.add_function(wrap_pyfunction!(fit_bernoulli, m)?)?;
    m.add_function(wrap_pyfunction!(run_config, m)?)?;
    Ok(())
}

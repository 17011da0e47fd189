//! Python bindings for the pseudo-cone Minkowski solver.
//!
//! Exposes the cone/body/weight types and the main operations (surface
//! area measure, covolumes, the solver, the non-uniqueness construction)
//! as a `pcmk_py` extension module.

use std::sync::Arc;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use pcmk_core::measures;
use pcmk_core::oracle;
use pcmk_core::solver;
use pcmk_core::weight::WeightKind;
use pcmk_core::QuadratureConfig;

fn err(e: pcmk_core::Error) -> PyErr {
    use pcmk_core::Error::*;
    match e {
        ToleranceNotMet { .. } | NotConverged(_) | RootBracketFailure(_) | RidgeSample(_) => {
            PyRuntimeError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

#[pyclass(frozen, from_py_object)]
#[derive(Clone)]
struct Cone {
    inner: Arc<pcmk_core::Cone>,
}

#[pymethods]
impl Cone {
    /// Build a cone from outer unit facet normals.
    #[staticmethod]
    #[pyo3(signature = (dim, normals, v_frak=None))]
    fn from_normals(dim: usize, normals: Vec<Vec<f64>>, v_frak: Option<Vec<f64>>) -> PyResult<Self> {
        Ok(Cone {
            inner: pcmk_core::Cone::from_facet_normals(dim, &normals, v_frak).map_err(err)?,
        })
    }

    /// Build a cone from generator rays.
    #[staticmethod]
    #[pyo3(signature = (dim, rays, v_frak=None))]
    fn from_rays(dim: usize, rays: Vec<Vec<f64>>, v_frak: Option<Vec<f64>>) -> PyResult<Self> {
        Ok(Cone {
            inner: pcmk_core::Cone::from_rays(dim, &rays, v_frak).map_err(err)?,
        })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn rays(&self) -> Vec<Vec<f64>> {
        self.inner.rays().to_vec()
    }

    #[getter]
    fn facet_normals(&self) -> Vec<Vec<f64>> {
        self.inner.facet_normals().to_vec()
    }

    #[getter]
    fn v_frak(&self) -> Vec<f64> {
        self.inner.v_frak().to_vec()
    }

    /// Spherical distance of `u` from the boundary of the dual direction
    /// set (negative outside).
    fn delta_c(&self, u: Vec<f64>) -> f64 {
        self.inner.delta_c(&u)
    }

    fn contains(&self, y: Vec<f64>) -> bool {
        self.inner.contains(&y, 1e-12)
    }

    /// Spherical Lebesgue measure of the direction set of the cone.
    fn omega_measure(&self) -> f64 {
        self.inner.omega_measure()
    }

    fn __repr__(&self) -> String {
        format!(
            "Cone(dim={}, facets={}, rays={})",
            self.inner.dim(),
            self.inner.facet_normals().len(),
            self.inner.rays().len()
        )
    }
}

#[pyclass(frozen, skip_from_py_object)]
#[derive(Clone)]
struct WeightFunction {
    inner: pcmk_core::WeightFunction,
}

#[pymethods]
impl WeightFunction {
    /// `kind` is "radial-power" (|y|^-q) or "height-power" (<y,v>^-q).
    #[new]
    fn new(kind: &str, q: f64, cone: Cone) -> PyResult<Self> {
        let kind = match kind {
            "radial-power" => WeightKind::RadialPower,
            "height-power" => WeightKind::HeightPower,
            other => {
                return Err(PyValueError::new_err(format!(
                    "kind must be 'radial-power' or 'height-power', got {other:?}"
                )))
            }
        };
        Ok(WeightFunction {
            inner: pcmk_core::WeightFunction::new(kind, q, cone.inner),
        })
    }

    #[getter]
    fn q(&self) -> f64 {
        self.inner.q()
    }

    #[getter]
    fn kind(&self) -> &'static str {
        match self.inner.kind() {
            WeightKind::RadialPower => "radial-power",
            WeightKind::HeightPower => "height-power",
        }
    }

    fn eval(&self, y: Vec<f64>) -> PyResult<f64> {
        self.inner.eval(&y).map_err(err)
    }

    /// ϑ(t): the weighted cross-section integral.
    fn cross_section_theta(&self, t: f64) -> PyResult<f64> {
        let cfg = QuadratureConfig::for_dim(self.inner.cone().dim());
        self.inner.cross_section_theta(t, &cfg).map_err(err)
    }

    /// Weighted volume of the unit-ball part of the cone.
    fn ball_covolume_density(&self) -> PyResult<f64> {
        let cfg = QuadratureConfig::for_dim(self.inner.cone().dim());
        self.inner.ball_covolume_density(&cfg).map_err(err)
    }
}

#[pyclass(frozen, skip_from_py_object)]
#[derive(Clone)]
struct PseudoCone {
    inner: pcmk_core::PseudoCone,
}

#[pymethods]
impl PseudoCone {
    #[new]
    fn new(cone: Cone, directions: Vec<Vec<f64>>, support: Vec<f64>) -> PyResult<Self> {
        Ok(PseudoCone {
            inner: pcmk_core::PseudoCone::new(cone.inner, directions, support).map_err(err)?,
        })
    }

    #[getter]
    fn directions(&self) -> Vec<Vec<f64>> {
        self.inner.directions().to_vec()
    }

    #[getter]
    fn support_numbers(&self) -> Vec<f64> {
        self.inner.support_numbers().to_vec()
    }

    #[getter]
    fn tightened(&self) -> bool {
        self.inner.is_tightened()
    }

    fn tighten(&self) -> PyResult<Self> {
        Ok(PseudoCone {
            inner: self.inner.tighten().map_err(err)?,
        })
    }

    fn scaled(&self, t: f64) -> PyResult<Self> {
        if !(t > 0.0) {
            return Err(PyValueError::new_err("scale factor must be positive"));
        }
        Ok(PseudoCone {
            inner: self.inner.scaled(t),
        })
    }

    /// Restriction to a subset of direction indices (a C-determined hull).
    fn restrict(&self, subset: Vec<usize>) -> PyResult<Self> {
        Ok(PseudoCone {
            inner: self.inner.restrict(&subset).map_err(err)?,
        })
    }

    /// (rho, argmax indices) of the radial function at an interior
    /// direction.
    fn radial_function(&self, v: Vec<f64>) -> PyResult<(f64, Vec<usize>)> {
        self.inner.radial_function(&v).map_err(err)
    }

    /// Support function value h_K(u) (non-positive).
    fn support_function(&self, u: Vec<f64>) -> PyResult<f64> {
        self.inner.support_function(&u).map_err(err)
    }

    /// Facet vertex chains, one list per direction (empty when slack).
    fn facets(&self) -> PyResult<Vec<Vec<Vec<f64>>>> {
        Ok(self.inner.facet_complex().map_err(err)?.facets)
    }

    /// Distance of the body from the origin.
    fn distance_from_origin(&self) -> PyResult<f64> {
        self.inner.distance_from_origin().map_err(err)
    }

    fn __repr__(&self) -> String {
        format!(
            "PseudoCone(dim={}, directions={}, tightened={})",
            self.inner.dim(),
            self.inner.directions().len(),
            self.inner.is_tightened()
        )
    }
}

/// Per-direction weighted facet masses.
#[pyfunction]
fn surface_measure(body: &PseudoCone, weight: &WeightFunction) -> PyResult<Vec<f64>> {
    let cfg = QuadratureConfig::for_dim(body.inner.dim());
    Ok(measures::surface_measure(&body.inner, &weight.inner, &cfg)
        .map_err(err)?
        .masses)
}

/// Covolume by facet summation (requires a tightened body).
#[pyfunction]
fn covolume_euler(body: &PseudoCone, weight: &WeightFunction) -> PyResult<f64> {
    let cfg = QuadratureConfig::for_dim(body.inner.dim());
    Ok(measures::covolume_euler(&body.inner, &weight.inner, &cfg)
        .map_err(err)?
        .value)
}

/// Covolume by radial quadrature.
#[pyfunction]
fn covolume_radial(body: &PseudoCone, weight: &WeightFunction) -> PyResult<f64> {
    let cfg = QuadratureConfig::for_dim(body.inner.dim());
    Ok(measures::covolume_radial(&body.inner, &weight.inner, &cfg)
        .map_err(err)?
        .value)
}

#[pyclass(frozen)]
struct SolveReport {
    #[pyo3(get)]
    converged: bool,
    #[pyo3(get)]
    iterations: usize,
    #[pyo3(get)]
    restarts: usize,
    #[pyo3(get, name = "lambda_")]
    lambda: f64,
    #[pyo3(get)]
    support: Vec<f64>,
    #[pyo3(get)]
    residuals: Vec<f64>,
    #[pyo3(get)]
    max_residual: f64,
    #[pyo3(get)]
    b_of_k: f64,
    #[pyo3(get)]
    covolume_euler: f64,
    #[pyo3(get)]
    covolume_radial: f64,
    #[pyo3(get)]
    phi_trace: Vec<f64>,
    solution: pcmk_core::PseudoCone,
}

#[pymethods]
impl SolveReport {
    #[getter]
    fn solution(&self) -> PseudoCone {
        PseudoCone {
            inner: self.solution.clone(),
        }
    }

    fn __repr__(&self) -> String {
        format!(
            "SolveReport(converged={}, iterations={}, max_residual={:.3e})",
            self.converged, self.iterations, self.max_residual
        )
    }
}

/// Solve the weighted Minkowski problem for atoms `[(direction, mass)]`.
#[pyfunction]
#[pyo3(signature = (cone, weight, atoms, tolerance=None, max_iterations=None, seed=0))]
fn solve_minkowski(
    cone: &Cone,
    weight: &WeightFunction,
    atoms: Vec<(Vec<f64>, f64)>,
    tolerance: Option<f64>,
    max_iterations: Option<usize>,
    seed: u64,
) -> PyResult<SolveReport> {
    let measure = solver::DirectionalMeasure::new(&cone.inner, atoms).map_err(err)?;
    let mut opts = solver::SolverOptions::for_dim(cone.inner.dim());
    if let Some(t) = tolerance {
        opts.tolerance = t;
    }
    if let Some(m) = max_iterations {
        opts.max_iterations = m;
    }
    opts.seed = seed;
    let report =
        solver::solve_minkowski(&cone.inner, &weight.inner, &measure, &opts).map_err(err)?;
    Ok(SolveReport {
        converged: report.converged,
        iterations: report.iterations,
        restarts: report.restarts,
        lambda: report.lambda,
        support: report.solution.support_numbers().to_vec(),
        residuals: report.residuals.clone(),
        max_residual: report.max_residual(),
        b_of_k: report.b_of_k,
        covolume_euler: report.covolume_euler,
        covolume_radial: report.covolume_radial,
        phi_trace: report.phi_trace.clone(),
        solution: report.solution,
    })
}

/// Monte Carlo facet masses: (estimates, standard errors, hits).
#[pyfunction]
fn mc_surface_measure(
    body: &PseudoCone,
    weight: &WeightFunction,
    samples: u64,
    seed: u64,
) -> PyResult<(Vec<f64>, Vec<f64>, Vec<u64>)> {
    let mc = oracle::mc_surface_measure(&body.inner, &weight.inner, samples, seed).map_err(err)?;
    Ok((
        mc.per_direction.iter().map(|e| e.estimate).collect(),
        mc.per_direction.iter().map(|e| e.std_error).collect(),
        mc.hits,
    ))
}

/// Two distinct bodies with the same (unit point) surface area measure:
/// returns (t0, mass_k, mass_l, hausdorff_distance).
#[pyfunction]
fn nonuniqueness_pair(weight: &WeightFunction) -> PyResult<(f64, f64, f64, f64)> {
    let cfg = QuadratureConfig::for_dim(weight.inner.cone().dim());
    let pair = oracle::nonuniqueness_pair(&weight.inner, &cfg).map_err(err)?;
    Ok((pair.t0, pair.mass_k, pair.mass_l, pair.hausdorff))
}

#[pymodule]
fn pcmk_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Cone>()?;
    m.add_class::<WeightFunction>()?;
    m.add_class::<PseudoCone>()?;
    m.add_class::<SolveReport>()?;
    m.add_function(wrap_pyfunction!(surface_measure, m)?)?;
    m.add_function(wrap_pyfunction!(covolume_euler, m)?)?;
    m.add_function(wrap_pyfunction!(covolume_radial, m)?)?;
    m.add_function(wrap_pyfunction!(solve_minkowski, m)?)?;
    m.add_function(wrap_pyfunction!(mc_surface_measure, m)?)?;
    m.add_function(wrap_pyfunction!(nonuniqueness_pair, m)?)?;
    Ok(())
}

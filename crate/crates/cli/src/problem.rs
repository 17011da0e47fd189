//! Problem-file schema (TOML, version "1") and its mapping onto library
//! objects.

use std::sync::Arc;

use serde::Deserialize;

use pcmk_core::cone::Cone;
use pcmk_core::pseudocone::PseudoCone;
use pcmk_core::solver::{DirectionalMeasure, SolverOptions};
use pcmk_core::weight::{WeightFunction, WeightKind};
use pcmk_core::QuadratureConfig;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub version: String,
    pub cone: ConeSpec,
    pub weight: WeightSpec,
    #[serde(default)]
    pub measure: Vec<AtomSpec>,
    #[serde(default)]
    pub body: Option<BodySpec>,
    #[serde(default)]
    pub solver: Option<SolverSpec>,
    #[serde(default)]
    pub quadrature: Option<QuadratureSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConeSpec {
    pub dim: usize,
    #[serde(default)]
    pub normals: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub rays: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub v_frak: Option<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightSpec {
    pub kind: String,
    pub q: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomSpec {
    pub direction: Vec<f64>,
    pub mass: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BodySpec {
    pub directions: Vec<Vec<f64>>,
    pub support: Vec<f64>,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    pub tolerance: Option<f64>,
    pub max_iterations: Option<usize>,
    pub armijo_slope: Option<f64>,
    pub backtrack: Option<f64>,
    pub jitter: Option<f64>,
    pub max_restarts: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSpec {
    pub rel_tol: Option<f64>,
    pub max_depth: Option<u32>,
}

/// Problem file compiled into library objects.
pub struct Problem {
    pub cone: Arc<Cone>,
    pub weight: WeightFunction,
    pub measure: Option<DirectionalMeasure>,
    pub body: Option<PseudoCone>,
    pub solver: SolverOptions,
    pub quadrature: QuadratureConfig,
}

pub fn parse(text: &str) -> Result<Problem, String> {
    let spec: ProblemFile =
        toml::from_str(text).map_err(|e| format!("problem file does not parse: {e}"))?;
    if spec.version != "1" {
        return Err(format!(
            "unsupported problem file version {:?}; this tool reads version \"1\"",
            spec.version
        ));
    }
    let cone = match (&spec.cone.normals, &spec.cone.rays) {
        (Some(normals), None) => {
            Cone::from_facet_normals(spec.cone.dim, normals, spec.cone.v_frak.clone())
        }
        (None, Some(rays)) => Cone::from_rays(spec.cone.dim, rays, spec.cone.v_frak.clone()),
        (Some(_), Some(_)) => {
            return Err("cone: give either normals or rays, not both".into());
        }
        (None, None) => return Err("cone: normals or rays required".into()),
    }
    .map_err(|e| format!("cone: {e}"))?;

    let kind = match spec.weight.kind.as_str() {
        "radial-power" => WeightKind::RadialPower,
        "height-power" => WeightKind::HeightPower,
        other => {
            return Err(format!(
                "weight.kind: {other:?} is not one of \"radial-power\", \"height-power\""
            ))
        }
    };
    let weight = WeightFunction::new(kind, spec.weight.q, cone.clone());

    let measure = if spec.measure.is_empty() {
        None
    } else {
        let atoms: Vec<(Vec<f64>, f64)> = spec
            .measure
            .iter()
            .map(|a| (a.direction.clone(), a.mass))
            .collect();
        Some(DirectionalMeasure::new(&cone, atoms).map_err(|e| format!("measure: {e}"))?)
    };

    let body = match &spec.body {
        None => None,
        Some(b) => Some(
            PseudoCone::new(cone.clone(), b.directions.clone(), b.support.clone())
                .map_err(|e| format!("body: {e}"))?,
        ),
    };

    let mut solver = SolverOptions::for_dim(cone.dim());
    if let Some(s) = &spec.solver {
        if let Some(x) = s.tolerance {
            solver.tolerance = x;
        }
        if let Some(x) = s.max_iterations {
            solver.max_iterations = x;
        }
        if let Some(x) = s.armijo_slope {
            solver.armijo_slope = x;
        }
        if let Some(x) = s.backtrack {
            solver.backtrack = x;
        }
        if let Some(x) = s.jitter {
            solver.jitter = x;
        }
        if let Some(x) = s.max_restarts {
            solver.max_restarts = x;
        }
        if let Some(x) = s.seed {
            solver.seed = x;
        }
    }

    let mut quadrature = QuadratureConfig::for_dim(cone.dim());
    if let Some(qc) = &spec.quadrature {
        if let Some(x) = qc.rel_tol {
            quadrature.rel_tol = x;
        }
        if let Some(x) = qc.max_depth {
            quadrature.max_depth = x;
        }
    }

    Ok(Problem {
        cone,
        weight,
        measure,
        body,
        solver,
        quadrature,
    })
}

/// The solver-domain gate shared by solve/verify: `q` must lie strictly
/// between n-1 and n.
pub fn require_solver_exponent(p: &Problem) -> Result<(), String> {
    if p.weight.solver_valid() {
        Ok(())
    } else {
        Err(format!(
            "q must lie in (n-1,n); got q = {} for n = {}",
            p.weight.q(),
            p.cone.dim()
        ))
    }
}

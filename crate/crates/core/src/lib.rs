//! Solver and verification library for the weighted Minkowski problem on
//! polyhedral C-pseudo-cones.
//!
//! Given a pointed full-dimensional cone `C` in R^n (n = 2, 3), a positive
//! weight `Θ` on `C \ {o}` homogeneous of degree `-q` with `n-1 < q < n`,
//! and a finitely supported measure `φ` on the interior directions of the
//! dual cone, the solver constructs a polyhedral C-pseudo-cone `K` whose
//! Θ-weighted surface area measure matches `φ`. Around the solver sit the
//! geometric primitives (support/radial functions, Wulff shapes, facet
//! enumeration, truncations), the quadrature layer for all Θ-integrals, two
//! independent covolume routes, and a verification module with Monte Carlo
//! and finite-difference oracles.

pub mod cone;
pub mod error;
pub mod fixtures;
pub mod measures;
pub mod oracle;
pub mod polytope;
pub mod pseudocone;
pub mod quadrature;
pub mod solver;
pub mod vecmath;
pub mod weight;

pub use cone::Cone;
pub use error::{Error, Result};
pub use measures::{covolume_euler, covolume_gradient, covolume_radial, surface_measure};
pub use measures::{CovolumeMethod, CovolumeResult, SurfaceMeasure};
pub use pseudocone::{FacetComplex, PseudoCone, TruncatedBody};
pub use quadrature::QuadratureConfig;
pub use solver::{
    lemma71_bound, phi_functional, solve_minkowski, DirectionalMeasure, SolveReport, SolverOptions,
};
pub use weight::{WeightFunction, WeightKind};

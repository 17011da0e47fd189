//! Error type shared by all modules of the crate.

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong when building cones, bodies, or running
/// quadrature, measures and the solver.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("cone is not pointed (it contains a line)")]
    NotPointed,
    #[error("cone is not full-dimensional")]
    NotFullDimensional,
    #[error("v_frak fails an interiority test: {0}")]
    BadVFrak(String),
    #[error("direction vector is zero or not normalizable")]
    ZeroVector,
    #[error("unsupported dimension {0}; only n in {{2,3}} is implemented")]
    UnsupportedDimension(usize),

    #[error("radial evaluation point is not in the interior of the cone")]
    OutsideDomain,
    #[error("direction is not in the interior of the dual cone")]
    OutsideDualInterior,
    #[error("pseudo-cone has no facet directions")]
    EmptyDirections,
    #[error("directions {0} and {1} coincide within tolerance")]
    DuplicateDirection(usize, usize),
    #[error("support number at index {0} is not strictly positive")]
    NonPositiveSupport(usize),
    #[error("direction subset is empty")]
    EmptySubset,
    #[error("truncation at height {0} misses the body")]
    EmptyTruncation(f64),

    #[error("point is outside the cone")]
    OutsideCone,
    #[error("weight function evaluated at the origin")]
    OriginArgument,
    #[error("segment passes through the origin")]
    SegmentThroughOrigin,
    #[error("polygon is degenerate (fewer than 3 distinct vertices or zero area)")]
    DegeneratePolygon,
    #[error("quadrature tolerance not met: achieved {achieved:e}, requested {requested:e}")]
    ToleranceNotMet { achieved: f64, requested: f64 },
    #[error("exponent q={q} outside the valid range ({lo},{hi})")]
    InvalidExponent { q: f64, lo: f64, hi: f64 },

    #[error("covolume by facet summation requires a tightened pseudo-cone")]
    NotTightened,
    #[error("directional measure is invalid: {0}")]
    InvalidMeasure(String),
    #[error("solver did not converge: {0}")]
    NotConverged(String),

    #[error("sampled direction lies on the ridge set after {0} resampling attempts")]
    RidgeSample(usize),
    #[error("root bracketing failed: {0}")]
    RootBracketFailure(String),
    #[error("subset margin violated: {0}")]
    MarginViolation(String),
}

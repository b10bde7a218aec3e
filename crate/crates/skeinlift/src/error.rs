use num_complex::Complex64;
use thiserror::Error;

/// Errors surfaced by the curve, network, braid and lift layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("polynomial root iteration did not converge (residual {residual:e})")]
    PolynomialSolveFailure { residual: f64 },

    #[error("evaluation at a puncture: z = {0}")]
    AtPuncture(Complex64),

    #[error("non-simple ramification at z = {z}: {count} roots collide")]
    NonSimpleRamification { z: Complex64, count: usize },

    #[error("resultant/discriminant computation degenerate: {0}")]
    ResultantDegenerate(String),

    #[error("curve is singular; witness (z, p) = ({z}, {p})")]
    SingularCurve { z: Complex64, p: Complex64 },

    #[error("path passes within {dist:e} of the branch/puncture locus at z = {z}")]
    PathTooCloseToBranchLocus { z: Complex64, dist: f64 },

    #[error("sheet matching ambiguous at z = {z} (margin {margin:e}) at minimum step")]
    MatchingAmbiguous { z: Complex64, margin: f64 },

    #[error("wall tracing exceeded the step limit")]
    StepLimitExceeded,

    #[error("could not solve for primary wall seed directions at branch point {0}")]
    SeedDirectionSolveFailure(Complex64),

    #[error("no disjoint branch-cut routing found for branch point at z = {0}")]
    CutRoutingFailure(Complex64),

    #[error("persistent tangency at z = {0}; perturb the input")]
    TangencyDetected(Complex64),

    #[error("strand not transverse to time slices / degenerate strand data: {0}")]
    NonBraidDiagram(String),

    #[error("strand passes through a puncture or marked point at z = {0}")]
    StrandThroughPuncture(Complex64),

    #[error("endpoint mismatch when composing skein elements: {0}")]
    EndpointMismatch(String),

    #[error("matrix dimension mismatch: ({0}, {1}) vs ({2}, {3})")]
    DimensionMismatch(usize, usize, usize, usize),

    #[error("strand tangent to a wall beyond tolerance at z = {0}")]
    NonTransverseInput(Complex64),

    #[error("two events within time tolerance at t = {0}; perturb the input")]
    EventCollision(f64),

    #[error("event labels never match any sheet transport (strict mode)")]
    InconsistentSheetMatching,

    #[error("folded tree nests joints beyond depth 1; not supported for N >= 3")]
    JointDepthUnsupported,

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

//! Error types for every fallible operation in the crate.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SurfaceError {
    #[error("{which} is not a permutation of 0..{k}")]
    NotAPermutation { which: &'static str, k: usize },
    #[error("gluing permutations do not act transitively; the surface is disconnected")]
    Disconnected,
    #[error("marked point sits on a singular vertex image")]
    MarkedPointOnSingularity,
    #[error("marked point coordinates must lie in [0,1)")]
    MarkedPointOutOfRange,
    #[error("square index {square} out of range for k={k}")]
    SquareOutOfRange { square: usize, k: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DirectionError {
    #[error("direction must have q >= 1")]
    NonPositiveQ,
    #[error("direction (p,q) must be primitive: gcd(|p|,q)=1")]
    NotPrimitive,
}

#[derive(Debug, Clone, Error)]
pub enum FlowError {
    #[error("starting point is a singular vertex")]
    StartAtSingularity,
    #[error("negative flow time")]
    NegativeTime,
}

#[derive(Debug, Clone, Error)]
pub enum IetError {
    #[error("transversal endpoint orbit hits a singular vertex before returning (endpoint {endpoint}, after {levels} levels)")]
    TransversalHitsSingularity { endpoint: String, levels: u64 },
    #[error("slow Rauzy step is degenerate: the two competing intervals have equal length (saddle connection)")]
    DegenerateStep,
    #[error("no valid transversal found for the requested shortening")]
    NoValidTransversal,
    #[error("transversal must be a nonempty subinterval of a bottom edge")]
    BadTransversal,
    #[error("interval exchange data invalid: {0}")]
    BadData(String),
}

#[derive(Debug, Clone, Error)]
pub enum CutError {
    #[error("cut {index}: lift of a segment hits a singular vertex")]
    LiftHitsSingularity { index: usize },
    #[error("lift of the planar point hits a singular vertex")]
    PointLiftHitsSingularity,
    #[error("cut {index}: length must be positive")]
    NonPositiveLength { index: usize },
    #[error("cut {index}: slope must be a nonzero primitive integer pair")]
    BadSlope { index: usize },
    #[error("group element has wrong shape for the declared group")]
    ValueShape,
}

#[derive(Debug, Clone, Error)]
pub enum SumError {
    #[error("trajectory hits a singular vertex at time {time}")]
    TrajectoryHitsSingularity { time: String },
    #[error("trajectory passes exactly through an endpoint of cut segment {segment} at time {time}")]
    TrajectoryHitsCutEndpoint { segment: usize, time: String },
    #[error("flow direction is parallel to cut {index}")]
    DirectionParallelToCut { index: usize },
    #[error("a cut endpoint lies exactly on the profile transversal at breakpoint {breakpoint}")]
    CutEndpointOnTransversalOrbit { breakpoint: String },
    #[error("starting point is a singular vertex")]
    StartAtSingularity,
}

#[derive(Debug, Clone, Error)]
pub enum WitnessError {
    #[error("no single-cylinder candidates in the searched range")]
    NoCandidates,
    #[error("no candidate satisfies the mod-1 witness conditions at the given tolerance")]
    NoWitnessFound,
    #[error("cut index {0} out of range")]
    BadCutIndex(usize),
}

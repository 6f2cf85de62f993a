use thiserror::Error;

/// Reasons a transverse taut structure fails to be veering.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub enum NotVeeringReason {
    /// Two tetrahedra force different colours on this edge class.
    Contradiction { edge: usize },
    /// No tetrahedron has this edge class in its equator.
    UnconstrainedEdge { edge: usize },
    /// The triangulation admits no consistent orientation.
    NonOrientable,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("malformed signature: {0}")]
    MalformedSignature(String),
    #[error("angle string has length {got}, expected {expected}")]
    AngleLengthMismatch { expected: usize, got: usize },
    #[error("invalid gluing: {0}")]
    InvalidGluing(String),
    #[error("taut check failed: {0}")]
    NotTaut(String),
    #[error("no transverse co-orientation: parity contradiction at tetrahedron {tet}")]
    NotTransverse { tet: usize },
    #[error("not veering: {0:?}")]
    NotVeering(NotVeeringReason),
    #[error("tetrahedron index {0} out of range")]
    BadTetIndex(usize),
    #[error("edge is not a river mouth")]
    NotAMouth,
    #[error("continent is not convex")]
    NotConvex,
    #[error("face is not on the boundary of the continent")]
    FaceNotOnBoundary,
    #[error("forked river has no complexity")]
    ForkedRiverHasNoComplexity,
    #[error("edge not in continent")]
    EdgeNotInContinent,
    #[error("depth cap exhausted: {0}")]
    DepthExhausted(String),
    #[error("continent does not cover every tetrahedron, face and edge orbit")]
    InsufficientContinent,
    #[error("bad cusp name: {0}")]
    BadCuspName(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

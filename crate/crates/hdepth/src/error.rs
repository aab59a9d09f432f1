use thiserror::Error;

/// Errors shared by the geometry, depth, location, and median routines.
#[derive(Debug, Error)]
pub enum Error {
    /// The defining points are affinely dependent and determine no unique
    /// hyperplane (repeated points, collinear triples in 3-D, ...).
    #[error("degenerate generator tuple: points are affinely dependent")]
    Degenerate,

    /// The hyperplanes do not meet in the expected flat (parallel or
    /// near-parallel normals).
    #[error("singular hyperplane system: no unique intersection")]
    Singular,

    /// The query sits on one of the hyperplanes, so no single cell contains
    /// it and cell coefficients are undefined.
    #[error("query lies on a family hyperplane (sign vector has a zero)")]
    OnBoundary,

    /// The query is within the zero band of an indexed line; the caller
    /// should fall back to direct evaluation.
    #[error("query lies on an indexed line")]
    OnLine,

    /// The line crosses no family member, so the restricted depth has no
    /// breakpoint to minimize over.
    #[error("line is parallel to every family member; restricted depth has no minimum")]
    Unbounded,

    /// No non-singular candidate intersections exist (for example a family
    /// of coincident or mutually parallel hyperplanes).
    #[error("no candidate intersection points")]
    NoCandidates,

    /// The probe line misses every family member, so nothing can be
    /// eliminated.
    #[error("probe line does not intersect any family member")]
    NoIntersections,

    /// Input data failed validation.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// An argument has the wrong dimension for this operation.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// An internal consistency check failed; this indicates a bug rather
    /// than bad input.
    #[error("internal consistency error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

//! Hyperplane distance depth.
//!
//! For a point set `P` in `R^d`, every affinely independent d-tuple of `P`
//! determines a hyperplane; the depth of a query point `q` is the sum of its
//! Euclidean distances to all of these hyperplanes. Small values mean `q`
//! sits centrally inside the arrangement, and the depth grows without bound
//! as `q` moves away, so the deepest point is the minimizer.
//!
//! The crate provides:
//!
//! - [`geometry`]: point sets, canonical hyperplanes, family enumeration,
//!   intersections, and parametrized lines;
//! - [`depth`]: direct depth evaluation, sign vectors, and the affine
//!   coefficients that evaluate the depth inside one arrangement cell;
//! - [`location2d`]: a slab-decomposition index over the 2-D line
//!   arrangement for logarithmic-time depth queries;
//! - [`median`]: exact deepest-point search (the depth restricted to any
//!   line is convex and piecewise linear, and some minimizer lies where `d`
//!   family hyperplanes meet), plus a brute-force oracle;
//! - [`approx2d`]: a bisection search that halves a bounding square around
//!   the 2-D median with a certified error bound.
//!
//! Everything is deterministic: members are enumerated in lexicographic
//! generator order, sums are accumulated in that fixed order with
//! compensation, and ties are broken lexicographically.
//!
//! ```
//! use hdepth::{median_exact, HyperplaneFamily, PointSet, SlabIndex};
//! use nalgebra::DVector;
//!
//! let ps = PointSet::new(2, vec![
//!     vec![0.0, 0.0],
//!     vec![1.0, 0.0],
//!     vec![0.0, 1.0],
//!     vec![1.0, 1.0],
//! ])?;
//!
//! // Sum of distances to all six lines through point pairs.
//! let family = HyperplaneFamily::enumerate(&ps);
//! let depth = family.depth(&DVector::from_vec(vec![0.5, 0.5]));
//!
//! // Deepest point, with generators and tie information.
//! let median = median_exact(&ps)?;
//! assert_eq!(median.point.as_slice(), &[0.5, 0.5]);
//!
//! // Logarithmic-time queries against the same family (2-D only).
//! let index = SlabIndex::build(&ps)?;
//! assert_eq!(index.query_depth(&DVector::from_vec(vec![0.5, 0.5])), depth);
//! # Ok::<(), hdepth::Error>(())
//! ```

pub mod approx2d;
pub mod depth;
pub mod error;
pub mod geometry;
pub mod location2d;
pub mod median;
pub mod numeric;

pub use approx2d::{
    eliminate_halfplane, error_bound, median_approx, ApproxMedian, Elimination,
    EliminationWitness, RetainedHalfPlane, SearchSquare,
};
pub use depth::{CellCoefficients, SignVector};
pub use error::{Error, Result};
pub use geometry::{
    bounding_square, intersection_point, Hyperplane, HyperplaneFamily, Line, PointSet,
};
pub use location2d::SlabIndex;
pub use median::{median_bruteforce, median_exact, min_on_line, LineMinimum, MedianResult};
pub use numeric::{binomial, REL_TOL, ZERO_BAND};

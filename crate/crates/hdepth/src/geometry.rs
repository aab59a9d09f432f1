//! Point sets, the hyperplanes their d-tuples determine, and the line and
//! intersection primitives shared by the depth and median routines.
//!
//! Hyperplanes are kept in a canonical form: unit normal, the first normal
//! component above the zero band is positive, and negative zeros are
//! scrubbed. Generator tuples are lexicographically sorted before any
//! arithmetic, so every permutation of the same tuple takes the same
//! floating-point path and yields identical bits.

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::numeric::{lex_cmp, CompensatedSum, REL_TOL, ZERO_BAND};

/// A finite multiset of points in `R^d`. Duplicates are allowed; the family
/// enumeration skips and counts the degenerate tuples they create.
#[derive(Debug, Clone)]
pub struct PointSet {
    dim: usize,
    points: Vec<DVector<f64>>,
}

impl PointSet {
    /// Validates and stores `rows` as points in `R^dim`. At least `dim`
    /// points are required, otherwise no hyperplane is determined.
    pub fn new(dim: usize, rows: Vec<Vec<f64>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("dimension must be at least 1".into()));
        }
        if rows.len() < dim {
            return Err(Error::InvalidInput(format!(
                "need at least {dim} points in {dim} dimensions, got {}",
                rows.len()
            )));
        }
        let mut points = Vec::with_capacity(rows.len());
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != dim {
                return Err(Error::InvalidInput(format!(
                    "point {i} has {} coordinates, expected {dim}",
                    row.len()
                )));
            }
            if row.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "point {i} has a non-finite coordinate"
                )));
            }
            points.push(DVector::from_vec(row));
        }
        Ok(Self { dim, points })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> &DVector<f64> {
        &self.points[i]
    }

    pub fn points(&self) -> &[DVector<f64>] {
        &self.points
    }
}

/// An affine hyperplane `{x : normal . x + offset = 0}` in canonical form.
#[derive(Debug, Clone)]
pub struct Hyperplane {
    normal: DVector<f64>,
    offset: f64,
    generators: Vec<usize>,
}

impl Hyperplane {
    /// Builds the hyperplane through exactly `d` points of `R^d`.
    ///
    /// Returns [`Error::Degenerate`] when the points are affinely dependent
    /// (repeated points, collinear triples in 3-D, ...) and so determine no
    /// unique hyperplane.
    pub fn from_points(points: &[DVector<f64>]) -> Result<Self> {
        let d = points
            .first()
            .map(|p| p.len())
            .ok_or_else(|| Error::InvalidInput("no generator points".into()))?;
        if points.len() != d {
            return Err(Error::InvalidInput(format!(
                "a hyperplane in {d} dimensions needs exactly {d} points, got {}",
                points.len()
            )));
        }
        for p in points {
            if p.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: p.len(),
                });
            }
        }

        // Sorting the tuple makes construction permutation-invariant down to
        // the last bit.
        let mut pts: Vec<&DVector<f64>> = points.iter().collect();
        pts.sort_by(|a, b| lex_cmp(a, b));

        let mut normal = match d {
            1 => DVector::from_vec(vec![1.0]),
            2 => {
                let dx = pts[1][0] - pts[0][0];
                let dy = pts[1][1] - pts[0][1];
                let scale = pts[0].norm().max(pts[1].norm());
                let n = DVector::from_vec(vec![-dy, dx]);
                if n.norm() <= ZERO_BAND * (1.0 + scale) {
                    return Err(Error::Degenerate);
                }
                n
            }
            _ => {
                // Null vector of the (d-1) x d difference matrix, computed
                // from the SVD of the matrix padded to square with a zero
                // row (same singular values plus one exact zero).
                let mut data = Vec::with_capacity(d * d);
                for p in &pts[1..] {
                    for j in 0..d {
                        data.push(p[j] - pts[0][j]);
                    }
                }
                data.extend(std::iter::repeat(0.0).take(d));
                let m = DMatrix::from_row_slice(d, d, &data);
                let svd = m.svd(false, true);
                let sv = &svd.singular_values;
                if sv[d - 2] <= ZERO_BAND * (1.0 + sv[0]) {
                    return Err(Error::Degenerate);
                }
                svd.v_t.as_ref().expect("v_t requested").row(d - 1).transpose()
            }
        };

        normal.normalize_mut();
        canonicalize_sign(&mut normal);

        let mut acc = CompensatedSum::new();
        for p in &pts {
            acc.add(normal.dot(p));
        }
        let offset = -(acc.value() / d as f64) + 0.0;

        let plane = Self {
            normal,
            offset,
            generators: Vec::new(),
        };
        for p in &pts {
            if plane.distance(p) > REL_TOL * (1.0 + p.norm()) {
                // The tuple is so ill-conditioned that the computed plane
                // does not even contain its generators.
                return Err(Error::Degenerate);
            }
        }
        Ok(plane)
    }

    pub(crate) fn with_generators(mut self, generators: Vec<usize>) -> Self {
        debug_assert!(generators.windows(2).all(|w| w[0] < w[1]));
        self.generators = generators;
        self
    }

    pub fn dim(&self) -> usize {
        self.normal.len()
    }

    /// Unit normal in canonical orientation.
    pub fn normal(&self) -> &DVector<f64> {
        &self.normal
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Indices of the defining points within their [`PointSet`]; empty for
    /// standalone hyperplanes.
    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    /// Signed offset `normal . q + offset`; positive on the side the normal
    /// points into.
    pub fn signed_offset(&self, q: &DVector<f64>) -> f64 {
        self.normal.dot(q) + self.offset
    }

    /// Euclidean distance from `q` to the hyperplane.
    pub fn distance(&self, q: &DVector<f64>) -> f64 {
        self.signed_offset(q).abs()
    }
}

/// All hyperplanes determined by the d-tuples of a point set, in the
/// lexicographic order of their generator tuples. Coincident hyperplanes
/// produced by different tuples are kept as separate members, so distances
/// are naturally weighted by multiplicity.
#[derive(Debug, Clone)]
pub struct HyperplaneFamily {
    dim: usize,
    members: Vec<Hyperplane>,
    skipped_degenerate: usize,
}

impl HyperplaneFamily {
    pub fn enumerate(ps: &PointSet) -> Self {
        let d = ps.dim();
        let mut members = Vec::new();
        let mut skipped = 0usize;
        let mut pts = Vec::with_capacity(d);
        for combo in (0..ps.len()).combinations(d) {
            pts.clear();
            pts.extend(combo.iter().map(|&i| ps.point(i).clone()));
            match Hyperplane::from_points(&pts) {
                Ok(h) => members.push(h.with_generators(combo)),
                Err(Error::Degenerate) => skipped += 1,
                Err(e) => unreachable!("enumeration over a validated point set: {e}"),
            }
        }
        Self {
            dim: d,
            members,
            skipped_degenerate: skipped,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn members(&self) -> &[Hyperplane] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Number of d-tuples skipped because they were affinely dependent.
    /// `len() + skipped_degenerate()` equals `C(n, d)`.
    pub fn skipped_degenerate(&self) -> usize {
        self.skipped_degenerate
    }
}

/// Common intersection point of `d` hyperplanes in `R^d`.
///
/// Fails with [`Error::Singular`] when the normals are (near-)dependent or
/// the computed point does not lie on all the planes to working tolerance.
pub fn intersection_point(planes: &[&Hyperplane]) -> Result<DVector<f64>> {
    let d = planes
        .first()
        .map(|h| h.dim())
        .ok_or_else(|| Error::InvalidInput("no hyperplanes".into()))?;
    if planes.len() != d {
        return Err(Error::InvalidInput(format!(
            "intersecting to a point in {d} dimensions needs exactly {d} hyperplanes, got {}",
            planes.len()
        )));
    }
    let mut data = Vec::with_capacity(d * d);
    let mut rhs = DVector::zeros(d);
    for (i, h) in planes.iter().enumerate() {
        if h.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: h.dim(),
            });
        }
        data.extend(h.normal().iter());
        rhs[i] = -h.offset();
    }
    let m = DMatrix::from_row_slice(d, d, &data);
    let x = m.full_piv_lu().solve(&rhs).ok_or(Error::Singular)?;
    let slack = REL_TOL * (1.0 + x.norm());
    if planes.iter().any(|h| h.distance(&x) > slack) {
        return Err(Error::Singular);
    }
    Ok(x)
}

/// A parametrized line `t -> base + t * direction` with a unit,
/// sign-canonical direction. Increasing `t` therefore agrees with the
/// lexicographic order of the points on the line.
#[derive(Debug, Clone)]
pub struct Line {
    base: DVector<f64>,
    direction: DVector<f64>,
    generators: Vec<usize>,
}

impl Line {
    /// A synthetic line through `base` along `direction` (any nonzero
    /// vector; it is normalized and sign-canonicalized).
    pub fn new(base: DVector<f64>, direction: DVector<f64>) -> Result<Self> {
        if base.len() != direction.len() {
            return Err(Error::DimensionMismatch {
                expected: base.len(),
                got: direction.len(),
            });
        }
        if base.iter().chain(direction.iter()).any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("non-finite line data".into()));
        }
        let mut direction = direction;
        if direction.norm() <= ZERO_BAND {
            return Err(Error::InvalidInput("zero line direction".into()));
        }
        direction.normalize_mut();
        canonicalize_sign(&mut direction);
        Ok(Self {
            base,
            direction,
            generators: Vec::new(),
        })
    }

    /// The line common to `d - 1` hyperplanes of `R^d` (`d >= 2`), with
    /// [`Error::Singular`] when they do not meet in a unique line.
    pub fn from_hyperplanes(planes: &[&Hyperplane]) -> Result<Self> {
        let d = planes
            .first()
            .map(|h| h.dim())
            .ok_or_else(|| Error::InvalidInput("no hyperplanes".into()))?;
        if d < 2 || planes.len() != d - 1 {
            return Err(Error::InvalidInput(format!(
                "a line in {d} dimensions needs exactly {} hyperplanes, got {}",
                d.saturating_sub(1),
                planes.len()
            )));
        }
        for h in planes {
            if h.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: h.dim(),
                });
            }
        }

        if d == 2 {
            let h = planes[0];
            let w = h.normal();
            let direction = DVector::from_vec(vec![-w[1], w[0]]);
            let base = w * -h.offset();
            return Line::new(base, direction);
        }

        // Direction: null vector of the stacked normals; base: minimum-norm
        // solution of the stacked plane equations. Both come from one SVD of
        // the (d-1) x d normal matrix padded square with a zero row.
        let mut data = Vec::with_capacity(d * d);
        let mut rhs = DVector::zeros(d);
        for (i, h) in planes.iter().enumerate() {
            data.extend(h.normal().iter());
            rhs[i] = -h.offset();
        }
        data.extend(std::iter::repeat(0.0).take(d));
        let m = DMatrix::from_row_slice(d, d, &data);
        let svd = m.svd(true, true);
        let sv = &svd.singular_values;
        if sv[d - 2] <= ZERO_BAND * (1.0 + sv[0]) {
            return Err(Error::Singular);
        }
        let direction = svd
            .v_t
            .as_ref()
            .expect("v_t requested")
            .row(d - 1)
            .transpose();
        let base = svd
            .solve(&rhs, ZERO_BAND * (1.0 + sv[0]))
            .map_err(|_| Error::Singular)?;
        let slack = REL_TOL * (1.0 + base.norm());
        if planes.iter().any(|h| h.distance(&base) > slack) {
            return Err(Error::Singular);
        }
        Line::new(base, direction)
    }

    pub(crate) fn with_generators(mut self, generators: Vec<usize>) -> Self {
        self.generators = generators;
        self
    }

    pub fn dim(&self) -> usize {
        self.base.len()
    }

    pub fn base(&self) -> &DVector<f64> {
        &self.base
    }

    /// Unit direction in canonical orientation.
    pub fn direction(&self) -> &DVector<f64> {
        &self.direction
    }

    /// Indices of the family members this line came from; empty for
    /// synthetic lines.
    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn point_at(&self, t: f64) -> DVector<f64> {
        &self.base + &self.direction * t
    }
}

/// Smallest axis-aligned square covering a 2-D point set, as
/// `(center, side)`. The square is the search region the approximate median
/// starts from, so it only needs to cover the points, not fit them tightly
/// in both axes.
pub fn bounding_square(ps: &PointSet) -> Result<(DVector<f64>, f64)> {
    if ps.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: ps.dim(),
        });
    }
    let (mut min_x, mut max_x) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut min_y, mut max_y) = (f64::INFINITY, f64::NEG_INFINITY);
    for p in ps.points() {
        min_x = min_x.min(p[0]);
        max_x = max_x.max(p[0]);
        min_y = min_y.min(p[1]);
        max_y = max_y.max(p[1]);
    }
    let center = DVector::from_vec(vec![(min_x + max_x) / 2.0, (min_y + max_y) / 2.0]);
    let side = (max_x - min_x).max(max_y - min_y);
    Ok((center, side))
}

/// Flips the vector so its first component above the zero band is positive,
/// then scrubs negative zeros.
fn canonicalize_sign(v: &mut DVector<f64>) {
    if let Some(lead) = v.iter().find(|x| x.abs() > ZERO_BAND) {
        if *lead < 0.0 {
            v.neg_mut();
        }
    }
    for x in v.iter_mut() {
        *x += 0.0;
    }
}

//! Certified approximate medians in 2-D via half-plane elimination.
//!
//! One elimination step minimizes depth along a probe line. At the
//! minimizer, depth restricted to the member line that crosses there is
//! piecewise affine; comparing the minimizer against its neighboring
//! crossings along that member line (or against the one-sided derivative
//! when there is no further crossing) tells which closed side of the probe
//! must contain every global minimizer. When neither side is strictly
//! better the minimizer itself is already a global median.
//!
//! [`median_approx`] runs one vertical and one horizontal probe through the
//! center of a shrinking axis-aligned square, keeps the quadrant selected
//! by the two retained half-planes, and halves the square each step. After
//! `m` steps the returned center is within `side * sqrt(2) / 2^(m+1)` of a
//! true median. Families whose lines are all parallel to a probe have no
//! minimizer along it; the resulting errors propagate to the caller.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::geometry::{bounding_square, HyperplaneFamily, Line, PointSet};
use crate::median::min_on_line;
use crate::numeric::ZERO_BAND;

/// A closed half-plane `{ q : normal . q + offset >= 0 }` whose boundary is
/// the probe line of the elimination step that produced it. The normal
/// points into the retained side.
#[derive(Debug, Clone)]
pub struct RetainedHalfPlane {
    normal: DVector<f64>,
    offset: f64,
}

impl RetainedHalfPlane {
    pub fn normal(&self) -> &DVector<f64> {
        &self.normal
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Whether `q` lies in the half-plane, enlarged by `slack` to absorb
    /// roundoff in the caller's coordinates.
    pub fn contains(&self, q: &DVector<f64>, slack: f64) -> bool {
        self.normal.dot(q) + self.offset >= -slack
    }
}

/// Where an elimination step looked and what it measured.
#[derive(Debug, Clone)]
pub struct EliminationWitness {
    /// Minimizer of depth along the probe line.
    pub minimizer: DVector<f64>,
    pub minimizer_depth: f64,
    /// Member whose line crosses the probe at the minimizer.
    pub crossing_member: usize,
    /// Next crossing along the member line in its direction, with its
    /// depth; `None` when the minimizer is the last crossing that way.
    pub forward_neighbor: Option<(DVector<f64>, f64)>,
    pub backward_neighbor: Option<(DVector<f64>, f64)>,
}

/// Outcome of one elimination step.
#[derive(Debug, Clone)]
pub enum Elimination {
    /// The probe minimizer is a global median.
    ExactMedian {
        point: DVector<f64>,
        depth: f64,
        witness: EliminationWitness,
    },
    /// Every median lies in `retained`, whose boundary is the probe line.
    HalfPlane {
        retained: RetainedHalfPlane,
        witness: EliminationWitness,
    },
}

/// Decides which closed side of `probe` contains the medians of `family`,
/// or reports that the probe minimizer itself is one.
///
/// Fails with [`Error::NoIntersections`] when no member line crosses the
/// probe.
pub fn eliminate_halfplane(probe: &Line, family: &HyperplaneFamily) -> Result<Elimination> {
    if probe.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: probe.dim(),
        });
    }
    if family.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: family.dim(),
        });
    }

    let lm = match min_on_line(probe, family) {
        Err(Error::Unbounded) => return Err(Error::NoIntersections),
        other => other?,
    };

    let member = &family.members()[lm.member];
    let member_line = Line::from_hyperplanes(&[member])?;
    let u = member_line.direction();
    let s_star = u.dot(&(&lm.point - member_line.base()));
    let sep = ZERO_BAND * (1.0 + s_star.abs());

    let mut forward: Option<f64> = None;
    let mut backward: Option<f64> = None;
    let mut total_slope = 0.0;
    for (k, h) in family.members().iter().enumerate() {
        if k == lm.member {
            continue;
        }
        let alpha = h.normal().dot(u);
        if alpha.abs() <= ZERO_BAND {
            continue;
        }
        total_slope += alpha.abs();
        let t = -(h.normal().dot(member_line.base()) + h.offset()) / alpha;
        if t > s_star + sep {
            forward = Some(forward.map_or(t, |cur: f64| cur.min(t)));
        } else if t < s_star - sep {
            backward = Some(backward.map_or(t, |cur: f64| cur.max(t)));
        }
    }

    let sample = |t: f64| -> (DVector<f64>, f64) {
        let p = member_line.point_at(t);
        let d = family.depth(&p);
        (p, d)
    };
    let forward_neighbor = forward.map(sample);
    let backward_neighbor = backward.map(sample);

    let derivative_band = ZERO_BAND * (1.0 + total_slope);
    let descends = |neighbor: &Option<(DVector<f64>, f64)>, dir_sign: f64| -> bool {
        match neighbor {
            Some((_, d)) => *d < lm.depth,
            None => {
                let escape = u * dir_sign;
                family.directional_derivative(&lm.point, &escape) < -derivative_band
            }
        }
    };
    let forward_smaller = descends(&forward_neighbor, 1.0);
    let backward_smaller = descends(&backward_neighbor, -1.0);

    let witness = EliminationWitness {
        minimizer: lm.point.clone(),
        minimizer_depth: lm.depth,
        crossing_member: lm.member,
        forward_neighbor,
        backward_neighbor,
    };

    match (backward_smaller, forward_smaller) {
        (false, false) => Ok(Elimination::ExactMedian {
            point: lm.point,
            depth: lm.depth,
            witness,
        }),
        (true, true) => Err(Error::Internal(
            "depth decreases both ways along a member line".into(),
        )),
        (bw, _) => {
            let v = probe.direction();
            let n0 = DVector::from_vec(vec![-v[1], v[0]]);
            let dir_sign = if bw { -1.0 } else { 1.0 };
            let sigma = (n0.dot(u) * dir_sign).signum();
            let mut normal = n0 * sigma;
            normal[0] += 0.0;
            normal[1] += 0.0;
            let offset = -normal.dot(&lm.point) + 0.0;
            Ok(Elimination::HalfPlane {
                retained: RetainedHalfPlane { normal, offset },
                witness,
            })
        }
    }
}

/// One state of the shrinking search square.
#[derive(Debug, Clone)]
pub struct SearchSquare {
    pub center: DVector<f64>,
    pub half_side: f64,
}

impl SearchSquare {
    /// Whether `q` lies in the square, enlarged by `slack` per coordinate.
    pub fn contains(&self, q: &DVector<f64>, slack: f64) -> bool {
        (q[0] - self.center[0]).abs() <= self.half_side + slack
            && (q[1] - self.center[1]).abs() <= self.half_side + slack
    }
}

/// An approximate median with a certified error bound.
#[derive(Debug, Clone)]
pub struct ApproxMedian {
    pub point: DVector<f64>,
    pub depth: f64,
    /// Euclidean distance bound from `point` to some exact median; zero
    /// when `exact` is set.
    pub error_bound: f64,
    /// True when an elimination step proved `point` is a global median.
    pub exact: bool,
    pub steps_done: u32,
    /// Search squares visited, starting with the bounding square.
    pub trace: Vec<SearchSquare>,
}

/// Guaranteed distance from the search-square center to a median after
/// `steps` halvings of a square with side `side`.
pub fn error_bound(side: f64, steps: u32) -> f64 {
    side * std::f64::consts::SQRT_2 / 2f64.powi(steps as i32 + 1)
}

/// Approximates the depth median of a 2-D point set by `steps` rounds of
/// half-plane elimination, halving a bounding square each round.
pub fn median_approx(ps: &PointSet, steps: u32) -> Result<ApproxMedian> {
    if ps.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: ps.dim(),
        });
    }
    let (mut center, side) = bounding_square(ps)?;
    let family = HyperplaneFamily::enumerate(ps);
    let mut trace = vec![SearchSquare {
        center: center.clone(),
        half_side: side / 2.0,
    }];
    if side == 0.0 {
        let depth = family.depth(&center);
        return Ok(ApproxMedian {
            point: center,
            depth,
            error_bound: 0.0,
            exact: true,
            steps_done: 0,
            trace,
        });
    }

    let mut half = side / 2.0;
    for step in 0..steps {
        let vertical = Line::new(center.clone(), DVector::from_vec(vec![0.0, 1.0]))?;
        let horizontal = Line::new(center.clone(), DVector::from_vec(vec![1.0, 0.0]))?;
        let mut sigma = [0.0f64; 2];
        let mut found_exact = None;
        for (axis, probe) in [vertical, horizontal].into_iter().enumerate() {
            match eliminate_halfplane(&probe, &family)? {
                Elimination::ExactMedian { point, depth, .. } => {
                    found_exact = Some((point, depth));
                    break;
                }
                Elimination::HalfPlane { retained, .. } => {
                    // The vertical probe constrains x, the horizontal
                    // probe constrains y.
                    sigma[axis] = retained.normal()[axis].signum();
                }
            }
        }
        if let Some((point, depth)) = found_exact {
            return Ok(ApproxMedian {
                point,
                depth,
                error_bound: 0.0,
                exact: true,
                steps_done: step,
                trace,
            });
        }
        center[0] += sigma[0] * half / 2.0;
        center[1] += sigma[1] * half / 2.0;
        half /= 2.0;
        trace.push(SearchSquare {
            center: center.clone(),
            half_side: half,
        });
    }

    let depth = family.depth(&center);
    Ok(ApproxMedian {
        point: center,
        depth,
        error_bound: error_bound(side, steps),
        exact: false,
        steps_done: steps,
        trace,
    })
}

//! Deepest-point search.
//!
//! Restricted to any line, the depth is a convex piecewise-linear function
//! of the line parameter whose breakpoints are the crossings with family
//! members, so its minimum is found by sorting the breakpoints and scanning
//! prefix slopes. Some global minimizer always lies where `d` family
//! hyperplanes meet; [`median_exact`] therefore minimizes along every line
//! spanned by a `(d-1)`-subset of the family, while [`median_bruteforce`]
//! evaluates every d-subset intersection directly and serves as the oracle
//! the fast path is tested against.

use std::cmp::Ordering;

use itertools::Itertools;
use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::geometry::{intersection_point, Hyperplane, HyperplaneFamily, Line, PointSet};
use crate::numeric::{lex_cmp, CompensatedSum, REL_TOL, ZERO_BAND};

/// Minimum of the depth restricted to one line.
#[derive(Debug, Clone)]
pub struct LineMinimum {
    /// Line parameter of the leftmost minimizer.
    pub t: f64,
    /// The minimizing point itself.
    pub point: DVector<f64>,
    /// Depth at the minimizer (evaluated directly over the family).
    pub depth: f64,
    /// Family member whose crossing attains the minimum. When several
    /// members cross there, the one making the largest angle with the line
    /// wins, with the lowest index breaking exact ties.
    pub member: usize,
    /// `true` when the minimizing set is a whole segment; `t` is then its
    /// left endpoint.
    pub plateau: bool,
}

/// Minimizes the depth along `line` by scanning breakpoint prefix slopes.
///
/// Fails with [`Error::Unbounded`] when the line crosses no member, since
/// the restricted depth then has no breakpoint to attain a minimum at.
pub fn min_on_line(line: &Line, family: &HyperplaneFamily) -> Result<LineMinimum> {
    if line.dim() != family.dim() {
        return Err(Error::DimensionMismatch {
            expected: family.dim(),
            got: line.dim(),
        });
    }
    let u = line.direction();

    // Crossing parameter, slope magnitude, and member index per transversal
    // member: the restricted depth is sum_i |alpha_i t + beta_i|.
    let mut crossings: Vec<(f64, f64, usize)> = Vec::new();
    for (i, h) in family.members().iter().enumerate() {
        let alpha = h.normal().dot(u);
        if alpha.abs() <= ZERO_BAND {
            continue;
        }
        let beta = h.signed_offset(line.base());
        crossings.push((-beta / alpha, alpha.abs(), i));
    }
    if crossings.is_empty() {
        return Err(Error::Unbounded);
    }
    crossings.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .expect("finite breakpoints")
            .then(a.2.cmp(&b.2))
    });

    let total: f64 = {
        let mut acc = CompensatedSum::new();
        for c in &crossings {
            acc.add(c.1);
        }
        acc.value()
    };

    // Walk breakpoints left to right; the slope right of breakpoint k is
    // 2 * (weight of breakpoints up to k) - total, and the minimum sits at
    // the first breakpoint where it turns nonnegative.
    let mut running = CompensatedSum::new();
    let mut k_star = crossings.len() - 1;
    for (k, c) in crossings.iter().enumerate() {
        running.add(2.0 * c.1);
        if running.value() - total >= 0.0 {
            k_star = k;
            break;
        }
    }

    let t_star = crossings[k_star].0;
    let t_tol = ZERO_BAND * (1.0 + t_star.abs());

    // All crossings that land on the minimizer, for the member tie-break
    // and the plateau test. Ones sorted before the stopping index already
    // contribute to `running`; only the ones after it still need adding.
    let mut group_start = k_star;
    while group_start > 0 && (t_star - crossings[group_start - 1].0).abs() <= t_tol {
        group_start -= 1;
    }
    let mut group_end = k_star;
    while group_end + 1 < crossings.len() && (crossings[group_end + 1].0 - t_star).abs() <= t_tol {
        running.add(2.0 * crossings[group_end + 1].1);
        group_end += 1;
    }
    let mut member = crossings[k_star].2;
    let mut steepness = crossings[k_star].1;
    for c in &crossings[group_start..=group_end] {
        if c.1 > steepness || (c.1 == steepness && c.2 < member) {
            steepness = c.1;
            member = c.2;
        }
    }

    let slope_past_group = running.value() - total;
    let plateau = group_end + 1 < crossings.len()
        && slope_past_group.abs() <= ZERO_BAND * total.max(1.0);

    let point = line.point_at(t_star);
    let depth = family.depth(&point);
    Ok(LineMinimum {
        t: t_star,
        point,
        depth,
        member,
        plateau,
    })
}

/// Result of a deepest-point search.
#[derive(Debug, Clone)]
pub struct MedianResult {
    /// Deepest point found; ties are broken lexicographically.
    pub point: DVector<f64>,
    /// Depth at that point.
    pub depth: f64,
    /// Indices of the `d` family members meeting at the point.
    pub generators: Vec<usize>,
    /// Number of candidate minima that were actually evaluated.
    pub candidates_examined: u64,
    /// All co-minimal candidate points (within relative tolerance),
    /// lexicographically sorted and deduplicated.
    pub ties: Vec<DVector<f64>>,
}

/// Evaluates the depth at every intersection of `d` family members and
/// keeps the deepest point. Exhaustive and slow; intended as the oracle for
/// tests and for small inputs.
pub fn median_bruteforce(ps: &PointSet) -> Result<MedianResult> {
    let family = HyperplaneFamily::enumerate(ps);
    let d = ps.dim();
    let mut candidates: Vec<(DVector<f64>, f64, Vec<usize>)> = Vec::new();
    for combo in (0..family.len()).combinations(d) {
        let planes: Vec<&Hyperplane> = combo.iter().map(|&i| &family.members()[i]).collect();
        match intersection_point(&planes) {
            Ok(p) => {
                let depth = family.depth(&p);
                candidates.push((p, depth, combo));
            }
            Err(Error::Singular) => continue,
            Err(e) => return Err(e),
        }
    }
    select_best(candidates)
}

/// Exact deepest point: minimizes along every line spanned by a
/// `(d-1)`-subset of the family and keeps the best line minimum. In one
/// dimension the single line is the axis itself.
pub fn median_exact(ps: &PointSet) -> Result<MedianResult> {
    let family = HyperplaneFamily::enumerate(ps);
    let d = ps.dim();
    let mut candidates: Vec<(DVector<f64>, f64, Vec<usize>)> = Vec::new();

    if d == 1 {
        let axis = Line::new(DVector::zeros(1), DVector::from_vec(vec![1.0]))
            .expect("unit axis direction");
        if let Some(candidate) = line_candidate(&axis, &family, &[])? {
            candidates.push(candidate);
        }
    } else {
        for combo in (0..family.len()).combinations(d - 1) {
            let planes: Vec<&Hyperplane> = combo.iter().map(|&i| &family.members()[i]).collect();
            let line = match Line::from_hyperplanes(&planes) {
                Ok(line) => line.with_generators(combo.clone()),
                Err(Error::Singular) => continue,
                Err(e) => return Err(e),
            };
            if let Some(candidate) = line_candidate(&line, &family, &combo)? {
                candidates.push(candidate);
            }
        }
    }
    select_best(candidates)
}

/// Runs one line minimization and turns the result into a candidate. The
/// winning point is re-derived by intersecting the full generator tuple so
/// that candidate coordinates match the brute-force search bit for bit; the
/// parametric minimizer only backs it up if that system is ill-conditioned.
fn line_candidate(
    line: &Line,
    family: &HyperplaneFamily,
    line_generators: &[usize],
) -> Result<Option<(DVector<f64>, f64, Vec<usize>)>> {
    let lm = match min_on_line(line, family) {
        Ok(lm) => lm,
        Err(Error::Unbounded) => return Ok(None),
        Err(e) => return Err(e),
    };
    let mut gens = line_generators.to_vec();
    gens.push(lm.member);
    gens.sort_unstable();
    let planes: Vec<&Hyperplane> = gens.iter().map(|&i| &family.members()[i]).collect();
    let (point, depth) = match intersection_point(&planes) {
        Ok(p) => {
            let depth = family.depth(&p);
            (p, depth)
        }
        Err(Error::Singular) => (lm.point, lm.depth),
        Err(e) => return Err(e),
    };
    Ok(Some((point, depth, gens)))
}

fn select_best(candidates: Vec<(DVector<f64>, f64, Vec<usize>)>) -> Result<MedianResult> {
    if candidates.is_empty() {
        return Err(Error::NoCandidates);
    }
    let mut best = 0;
    for i in 1..candidates.len() {
        let (point, depth, _) = &candidates[i];
        let (best_point, best_depth, _) = &candidates[best];
        if depth < best_depth
            || (depth == best_depth && lex_cmp(point, best_point) == Ordering::Less)
        {
            best = i;
        }
    }
    let best_depth = candidates[best].1;
    let tie_tol = REL_TOL * (1.0 + best_depth);
    let mut ties: Vec<DVector<f64>> = candidates
        .iter()
        .filter(|c| c.1 <= best_depth + tie_tol)
        .map(|c| c.0.clone())
        .collect();
    ties.sort_by(lex_cmp);
    ties.dedup_by(|a, b| {
        let scale = 1.0 + b.norm();
        (&*a - &*b).norm() <= REL_TOL * scale
    });
    Ok(MedianResult {
        point: candidates[best].0.clone(),
        depth: best_depth,
        generators: candidates[best].2.clone(),
        candidates_examined: candidates.len() as u64,
        ties,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn dv(coords: &[f64]) -> DVector<f64> {
        DVector::from_row_slice(coords)
    }

    fn flat_triangle() -> PointSet {
        PointSet::new(2, vec![vec![0.0, 0.0], vec![4.0, 0.0], vec![2.0, 1.0]]).unwrap()
    }

    fn unit_square() -> PointSet {
        PointSet::new(
            2,
            vec![
                vec![0.0, 0.0],
                vec![1.0, 0.0],
                vec![0.0, 1.0],
                vec![1.0, 1.0],
            ],
        )
        .unwrap()
    }

    #[test]
    fn min_on_x_axis_of_flat_triangle_is_a_plateau() {
        let family = HyperplaneFamily::enumerate(&flat_triangle());
        let axis = Line::new(dv(&[0.0, 0.0]), dv(&[1.0, 0.0])).unwrap();
        let lm = min_on_line(&axis, &family).unwrap();
        assert_eq!(lm.t, 0.0);
        assert_eq!(lm.point, dv(&[0.0, 0.0]));
        assert_relative_eq!(lm.depth, 4.0 / 5.0f64.sqrt(), max_relative = 1e-12);
        assert!(lm.plateau, "the minimum extends from (0,0) to (4,0)");
        assert_eq!(lm.member, 1);
    }

    #[test]
    fn min_on_square_center_line_is_a_point() {
        let family = HyperplaneFamily::enumerate(&unit_square());
        let vertical = Line::new(dv(&[0.5, 0.0]), dv(&[0.0, 1.0])).unwrap();
        let lm = min_on_line(&vertical, &family).unwrap();
        assert_relative_eq!(lm.t, 0.5, max_relative = 1e-12);
        assert_eq!(lm.point, dv(&[0.5, 0.5]));
        assert_eq!(lm.depth, 2.0);
        assert!(!lm.plateau);
        // Both diagonals cross at the minimizer with the same angle; the
        // lower member index wins.
        assert_eq!(lm.member, 2);
    }

    #[test]
    fn line_parallel_to_every_member_is_unbounded() {
        let ps = PointSet::new(2, vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![2.0, 0.0]]).unwrap();
        let family = HyperplaneFamily::enumerate(&ps);
        let parallel = Line::new(dv(&[0.0, 5.0]), dv(&[1.0, 0.0])).unwrap();
        assert!(matches!(
            min_on_line(&parallel, &family),
            Err(Error::Unbounded)
        ));
    }

    #[test]
    fn min_on_line_is_locally_minimal() {
        let mut rng = StdRng::seed_from_u64(59);
        for _ in 0..40 {
            let rows: Vec<Vec<f64>> = (0..5)
                .map(|_| vec![rng.random_range(-4.0..4.0), rng.random_range(-4.0..4.0)])
                .collect();
            let ps = PointSet::new(2, rows).unwrap();
            let family = HyperplaneFamily::enumerate(&ps);
            let angle = rng.random_range(0.0..std::f64::consts::TAU);
            let line = Line::new(
                dv(&[rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)]),
                dv(&[angle.cos(), angle.sin()]),
            )
            .unwrap();
            let Ok(lm) = min_on_line(&line, &family) else {
                continue;
            };
            for dt in [1e-4, 0.1, 2.0] {
                for sign in [-1.0, 1.0] {
                    let other = family.depth(&line.point_at(lm.t + sign * dt));
                    assert!(
                        other >= lm.depth - 1e-9 * (1.0 + lm.depth),
                        "line minimum beaten at offset {dt}"
                    );
                }
            }
        }
    }

    #[test]
    fn bruteforce_median_of_flat_triangle_is_the_apex() {
        let med = median_bruteforce(&flat_triangle()).unwrap();
        assert_eq!(med.point, dv(&[2.0, 1.0]));
        assert_eq!(med.depth, 1.0);
        assert_eq!(med.generators, vec![1, 2]);
        assert_eq!(med.candidates_examined, 3);
        assert_eq!(med.ties.len(), 1);
    }

    #[test]
    fn bruteforce_median_of_stretched_triangle_breaks_tie_lexicographically() {
        let ps = PointSet::new(2, vec![vec![0.0, 0.0], vec![4.0, 0.0], vec![2.0, 5.0]]).unwrap();
        let med = median_bruteforce(&ps).unwrap();
        assert!((&med.point - dv(&[0.0, 0.0])).norm() <= 1e-12);
        assert_relative_eq!(med.depth, 20.0 / 29.0f64.sqrt(), max_relative = 1e-12);
        assert_eq!(med.ties.len(), 2, "both base corners are co-minimal");
        assert!((&med.ties[0] - dv(&[0.0, 0.0])).norm() <= 1e-12);
        assert!((&med.ties[1] - dv(&[4.0, 0.0])).norm() <= 1e-12);
    }

    #[test]
    fn exact_median_matches_bruteforce_on_the_examples() {
        for ps in [
            flat_triangle(),
            unit_square(),
            PointSet::new(2, vec![vec![0.0, 0.0], vec![4.0, 0.0], vec![2.0, 5.0]]).unwrap(),
        ] {
            let brute = median_bruteforce(&ps).unwrap();
            let exact = median_exact(&ps).unwrap();
            assert_relative_eq!(exact.depth, brute.depth, max_relative = 1e-9);
            assert_eq!(exact.point, brute.point);
        }
    }

    #[test]
    fn unit_square_median_is_the_center() {
        let med = median_exact(&unit_square()).unwrap();
        assert_eq!(med.point, dv(&[0.5, 0.5]));
        assert_eq!(med.depth, 2.0);
        assert_eq!(med.ties.len(), 1);
    }

    #[test]
    fn one_dimensional_median_is_the_middle_order_statistic() {
        let ps = PointSet::new(1, vec![vec![3.0], vec![1.0], vec![2.0]]).unwrap();
        let med = median_exact(&ps).unwrap();
        assert_eq!(med.point[0], 2.0);
        // Even count: the whole middle segment is minimal and the leftmost
        // endpoint is returned.
        let ps = PointSet::new(1, vec![vec![4.0], vec![1.0], vec![3.0], vec![2.0]]).unwrap();
        let med = median_exact(&ps).unwrap();
        assert_eq!(med.point[0], 2.0);
        let brute = median_bruteforce(&ps).unwrap();
        assert_eq!(brute.point[0], 2.0);
    }

    #[test]
    fn coincident_family_has_no_candidates() {
        let ps = PointSet::new(2, vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0]]).unwrap();
        assert!(matches!(median_bruteforce(&ps), Err(Error::NoCandidates)));
        assert!(matches!(median_exact(&ps), Err(Error::NoCandidates)));
    }

    #[test]
    fn exact_median_agrees_with_bruteforce_on_random_sets() {
        let mut rng = StdRng::seed_from_u64(61);
        for _ in 0..25 {
            let n = rng.random_range(3..=6);
            let rows: Vec<Vec<f64>> = (0..n)
                .map(|_| vec![rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)])
                .collect();
            let ps = PointSet::new(2, rows).unwrap();
            let brute = median_bruteforce(&ps).unwrap();
            let exact = median_exact(&ps).unwrap();
            assert_relative_eq!(exact.depth, brute.depth, max_relative = 1e-9);
        }
    }

    #[test]
    fn median_point_lies_on_its_generators() {
        let mut rng = StdRng::seed_from_u64(67);
        for _ in 0..20 {
            let n = rng.random_range(3..=6);
            let rows: Vec<Vec<f64>> = (0..n)
                .map(|_| vec![rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)])
                .collect();
            let ps = PointSet::new(2, rows).unwrap();
            let family = HyperplaneFamily::enumerate(&ps);
            let med = median_exact(&ps).unwrap();
            assert_eq!(med.generators.len(), 2);
            for &g in &med.generators {
                assert!(
                    family.members()[g].distance(&med.point)
                        <= 1e-9 * (1.0 + med.point.norm())
                );
            }
        }
    }
}

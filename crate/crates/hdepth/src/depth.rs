//! Depth evaluation: direct summation over the family, sign vectors, and
//! the affine coefficients valid inside a single cell of the arrangement.
//!
//! Inside one cell no member changes side, so the depth restricted to the
//! cell is the affine function whose gradient and constant are the
//! sign-weighted sums of the member normals and offsets.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::geometry::HyperplaneFamily;
use crate::numeric::{CompensatedSum, ZERO_BAND};

/// Side of each family member a query lies on (`+1`, `-1`, or `0` inside
/// the zero band), in member order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignVector {
    signs: Vec<i8>,
}

impl SignVector {
    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    /// `true` when the query sat on at least one member hyperplane.
    pub fn has_zero(&self) -> bool {
        self.signs.iter().any(|&s| s == 0)
    }
}

/// Gradient and constant of the affine form that equals the depth
/// throughout one arrangement cell.
#[derive(Debug, Clone)]
pub struct CellCoefficients {
    pub gradient: DVector<f64>,
    pub constant: f64,
}

impl CellCoefficients {
    /// Evaluates the cell's affine form at `q`. Only meaningful for points
    /// whose sign vector matches the one the coefficients came from.
    pub fn evaluate(&self, q: &DVector<f64>) -> f64 {
        self.gradient.dot(q) + self.constant
    }
}

impl HyperplaneFamily {
    /// Depth of `q`: the sum of distances to every member, accumulated in
    /// member order with compensation so repeated runs agree bit for bit.
    pub fn depth(&self, q: &DVector<f64>) -> f64 {
        assert_eq!(q.len(), self.dim(), "query dimension mismatch");
        let mut acc = CompensatedSum::new();
        for h in self.members() {
            acc.add(h.distance(q));
        }
        acc.value()
    }

    /// Signs of the member offsets at `q`, with a `ZERO_BAND` dead zone.
    pub fn sign_vector(&self, q: &DVector<f64>) -> SignVector {
        assert_eq!(q.len(), self.dim(), "query dimension mismatch");
        let signs = self
            .members()
            .iter()
            .map(|h| {
                let s = h.signed_offset(q);
                if s.abs() <= ZERO_BAND {
                    0
                } else if s > 0.0 {
                    1
                } else {
                    -1
                }
            })
            .collect();
        SignVector { signs }
    }

    /// Affine coefficients of the cell a sign vector selects. Fails with
    /// [`Error::OnBoundary`] when the sign vector has a zero, since the
    /// query then lies between cells.
    pub fn cell_coefficients(&self, signs: &SignVector) -> Result<CellCoefficients> {
        if signs.len() != self.len() {
            return Err(Error::InvalidInput(format!(
                "sign vector has {} entries for a family of {}",
                signs.len(),
                self.len()
            )));
        }
        if signs.has_zero() {
            return Err(Error::OnBoundary);
        }
        let d = self.dim();
        let mut grad_acc = vec![CompensatedSum::new(); d];
        let mut const_acc = CompensatedSum::new();
        for (h, &g) in self.members().iter().zip(signs.signs()) {
            let g = g as f64;
            for (acc, w) in grad_acc.iter_mut().zip(h.normal().iter()) {
                acc.add(g * w);
            }
            const_acc.add(g * h.offset());
        }
        Ok(CellCoefficients {
            gradient: DVector::from_iterator(d, grad_acc.iter().map(|a| a.value())),
            constant: const_acc.value(),
        })
    }

    /// Contribution of one input point to the depth of `q`: the distance
    /// sum over exactly those members generated by `point_index`. Summing
    /// this over all points counts every member `d` times, so the total is
    /// `d` times the depth.
    pub fn per_point_depth(&self, q: &DVector<f64>, point_index: usize) -> f64 {
        assert_eq!(q.len(), self.dim(), "query dimension mismatch");
        let mut acc = CompensatedSum::new();
        for h in self.members() {
            if h.generators().contains(&point_index) {
                acc.add(h.distance(q));
            }
        }
        acc.value()
    }

    /// One-sided derivative of `t -> depth(q + t * direction)` at `t = 0+`.
    /// Members the query sits on contribute `|normal . direction|`, since
    /// the distance to them grows in both directions.
    pub fn directional_derivative(&self, q: &DVector<f64>, direction: &DVector<f64>) -> f64 {
        assert_eq!(q.len(), self.dim(), "query dimension mismatch");
        assert_eq!(direction.len(), self.dim(), "direction dimension mismatch");
        let mut acc = CompensatedSum::new();
        for h in self.members() {
            let s = h.signed_offset(q);
            let a = h.normal().dot(direction);
            if s.abs() <= ZERO_BAND {
                acc.add(a.abs());
            } else {
                acc.add(a * s.signum());
            }
        }
        acc.value()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::PointSet;
    use approx::assert_relative_eq;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

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

    fn dv(coords: &[f64]) -> DVector<f64> {
        DVector::from_row_slice(coords)
    }

    fn random_family(rng: &mut StdRng, dim: usize, n: usize) -> (PointSet, HyperplaneFamily) {
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..dim).map(|_| rng.random_range(-5.0..5.0)).collect())
            .collect();
        let ps = PointSet::new(dim, rows).unwrap();
        let fam = HyperplaneFamily::enumerate(&ps);
        (ps, fam)
    }

    #[test]
    fn unit_square_center_depth_is_two() {
        let fam = HyperplaneFamily::enumerate(&unit_square());
        assert_eq!(fam.depth(&dv(&[0.5, 0.5])), 2.0);
    }

    #[test]
    fn one_dimensional_depth_is_sum_of_absolute_gaps() {
        let ps = PointSet::new(1, vec![vec![1.0], vec![2.0], vec![10.0]]).unwrap();
        let fam = HyperplaneFamily::enumerate(&ps);
        assert_eq!(fam.depth(&dv(&[2.0])), 9.0);
    }

    #[test]
    fn triangle_apex_depth() {
        let ps = PointSet::new(2, vec![vec![0.0, 0.0], vec![4.0, 0.0], vec![2.0, 1.0]]).unwrap();
        let fam = HyperplaneFamily::enumerate(&ps);
        assert_eq!(fam.depth(&dv(&[2.0, 1.0])), 1.0);
    }

    #[test]
    fn sign_vector_at_off_center_point() {
        let fam = HyperplaneFamily::enumerate(&unit_square());
        // member order: y=0, x=0, main diagonal, anti-diagonal, x=1, y=1
        let sv = fam.sign_vector(&dv(&[0.5, 0.75]));
        assert_eq!(sv.signs(), &[1, 1, -1, 1, -1, -1]);
        assert!(!sv.has_zero());
    }

    #[test]
    fn sign_vector_zeroes_on_the_diagonals() {
        let fam = HyperplaneFamily::enumerate(&unit_square());
        let sv = fam.sign_vector(&dv(&[0.5, 0.5]));
        assert_eq!(sv.signs(), &[1, 1, 0, 0, -1, -1]);
        assert!(sv.has_zero());
    }

    #[test]
    fn cell_coefficients_match_direct_depth_inside_the_cell() {
        let fam = HyperplaneFamily::enumerate(&unit_square());
        let q = dv(&[0.5, 0.75]);
        let coeffs = fam.cell_coefficients(&fam.sign_vector(&q)).unwrap();
        assert_relative_eq!(coeffs.evaluate(&q), fam.depth(&q), max_relative = 1e-12);
        // Another point of the same cell evaluates through the same form.
        let q2 = dv(&[0.52, 0.74]);
        assert_eq!(fam.sign_vector(&q2), fam.sign_vector(&q));
        assert_relative_eq!(coeffs.evaluate(&q2), fam.depth(&q2), max_relative = 1e-12);
    }

    #[test]
    fn cell_coefficients_reject_boundary_points() {
        let fam = HyperplaneFamily::enumerate(&unit_square());
        let sv = fam.sign_vector(&dv(&[0.5, 0.5]));
        assert!(matches!(
            fam.cell_coefficients(&sv),
            Err(Error::OnBoundary)
        ));
    }

    #[test]
    fn cell_coefficients_agree_on_random_cells() {
        let mut rng = StdRng::seed_from_u64(41);
        for _ in 0..40 {
            let (_, fam) = random_family(&mut rng, 2, 6);
            let q = dv(&[rng.random_range(-6.0..6.0), rng.random_range(-6.0..6.0)]);
            let sv = fam.sign_vector(&q);
            let Ok(coeffs) = fam.cell_coefficients(&sv) else {
                continue;
            };
            let depth = fam.depth(&q);
            assert!((coeffs.evaluate(&q) - depth).abs() <= 1e-9 * (1.0 + depth.abs()));
        }
    }

    #[test]
    fn per_point_depth_of_square_corner() {
        let fam = HyperplaneFamily::enumerate(&unit_square());
        assert_eq!(fam.per_point_depth(&dv(&[0.5, 0.5]), 0), 1.0);
    }

    #[test]
    fn per_point_depths_decompose_total_depth() {
        let mut rng = StdRng::seed_from_u64(43);
        for &dim in &[1usize, 2, 3] {
            for _ in 0..20 {
                let n = rng.random_range(dim + 1..=dim + 4);
                let (ps, fam) = random_family(&mut rng, dim, n);
                let q = DVector::from_fn(dim, |_, _| rng.random_range(-5.0..5.0));
                let total: f64 = (0..ps.len()).map(|i| fam.per_point_depth(&q, i)).sum();
                let expected = dim as f64 * fam.depth(&q);
                assert_relative_eq!(total, expected, max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn derivative_in_flat_and_growing_regions_1d() {
        let ps = PointSet::new(1, vec![vec![0.0], vec![2.0]]).unwrap();
        let fam = HyperplaneFamily::enumerate(&ps);
        let up = dv(&[1.0]);
        // Between the points the two slopes cancel.
        assert_eq!(fam.directional_derivative(&dv(&[1.0]), &up), 0.0);
        // Beyond them both grow.
        assert_eq!(fam.directional_derivative(&dv(&[3.0]), &up), 2.0);
        // At a kink the one-sided derivative counts the touching member as
        // growing in either direction.
        assert_eq!(fam.directional_derivative(&dv(&[0.0]), &up), 0.0);
        assert_eq!(fam.directional_derivative(&dv(&[0.0]), &dv(&[-1.0])), 2.0);
    }

    #[test]
    fn derivative_matches_central_differences_away_from_members() {
        let mut rng = StdRng::seed_from_u64(47);
        let mut checked = 0;
        while checked < 30 {
            let (_, fam) = random_family(&mut rng, 2, 5);
            let q = dv(&[rng.random_range(-4.0..4.0), rng.random_range(-4.0..4.0)]);
            if fam
                .members()
                .iter()
                .any(|h| h.distance(&q) < 1e-3)
            {
                continue;
            }
            let angle = rng.random_range(0.0..std::f64::consts::TAU);
            let u = dv(&[angle.cos(), angle.sin()]);
            let h = 1e-6;
            let fd = (fam.depth(&(&q + &u * h)) - fam.depth(&(&q - &u * h))) / (2.0 * h);
            let dd = fam.directional_derivative(&q, &u);
            assert!((fd - dd).abs() <= 1e-4 * (1.0 + dd.abs()), "fd={fd} dd={dd}");
            checked += 1;
        }
    }

    #[test]
    fn opposite_one_sided_derivatives_sum_nonnegative() {
        let mut rng = StdRng::seed_from_u64(53);
        for _ in 0..50 {
            let (_, fam) = random_family(&mut rng, 2, 5);
            let q = dv(&[rng.random_range(-4.0..4.0), rng.random_range(-4.0..4.0)]);
            let angle = rng.random_range(0.0..std::f64::consts::TAU);
            let u = dv(&[angle.cos(), angle.sin()]);
            let neg = -&u;
            let total = fam.directional_derivative(&q, &u) + fam.directional_derivative(&q, &neg);
            assert!(total >= -1e-12, "convexity requires the sum to be nonnegative");
        }
    }
}

//! Logarithmic-time depth queries over a 2-D line arrangement.
//!
//! The x-axis is cut into slabs at the x-coordinates where two family lines
//! cross; strictly inside a slab the non-vertical lines keep one fixed
//! bottom-to-top order, so a query is located with two binary searches
//! (slab, then rank within the slab). Prefix sums of the orientation-signed
//! normals and offsets then produce the affine cell coefficients for any
//! rank in constant time. Vertical lines never participate in the y-order;
//! they live in one shared side array consulted by x-comparison alone.
//!
//! Coincident members are stored once with a multiplicity weight, and
//! queries inside the zero band of any line fall back to direct summation,
//! so indexed depths match [`HyperplaneFamily::depth`] to working accuracy.
//! Space is cubic in the number of lines, which is fine at desk scale but
//! is the first thing to revisit for larger inputs.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::geometry::{HyperplaneFamily, PointSet};
use crate::numeric::{CompensatedSum, ZERO_BAND};

/// A distinct non-vertical line together with the multiplicity of the
/// coincident members it stands for.
#[derive(Debug, Clone, Copy)]
struct SlantLine {
    wx: f64,
    wy: f64,
    b: f64,
    weight: f64,
    /// Sign of `wy`: +1 when the normal points upward, so
    /// `orient * signed_offset > 0` exactly when the query is above the
    /// line.
    orient: f64,
}

impl SlantLine {
    fn y_at(&self, x: f64) -> f64 {
        -(self.b + self.wx * x) / self.wy
    }

    fn signed_offset(&self, x: f64, y: f64) -> f64 {
        self.wx * x + self.wy * y + self.b
    }
}

/// A distinct vertical line `x = x0`.
#[derive(Debug, Clone, Copy)]
struct UprightLine {
    x0: f64,
    b: f64,
    weight: f64,
}

#[derive(Debug, Clone)]
struct Slab {
    /// Slant-line indices sorted bottom-to-top at the slab midpoint.
    order: Vec<u32>,
    /// `prefix[r]` = sum over the first `r` lines in `order` of
    /// `weight * orient * (wx, wy, b)`.
    prefix: Vec<[f64; 3]>,
}

/// Slab-decomposition point-location index over the line family of a 2-D
/// point set.
#[derive(Debug)]
pub struct SlabIndex {
    family: HyperplaneFamily,
    slants: Vec<SlantLine>,
    uprights: Vec<UprightLine>,
    /// `upright_prefix[k]` = sum over the first `k` vertical lines of
    /// `weight * (1, b)`.
    upright_prefix: Vec<[f64; 2]>,
    bounds: Vec<f64>,
    slabs: Vec<Slab>,
    face_count: u64,
}

impl SlabIndex {
    /// Enumerates the line family of `ps` and builds the index.
    pub fn build(ps: &PointSet) -> Result<Self> {
        if ps.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: ps.dim(),
            });
        }
        let family = HyperplaneFamily::enumerate(ps);

        // Deduplicate coincident members into weighted distinct lines. The
        // canonical form makes coincident members agree to far better than
        // the band, so clustering on sorted triples is exact in practice.
        let mut triples: Vec<(f64, f64, f64)> = family
            .members()
            .iter()
            .map(|h| (h.normal()[0], h.normal()[1], h.offset()))
            .collect();
        triples.sort_by(|a, b| {
            a.partial_cmp(b).expect("finite canonical line data")
        });
        let mut slants: Vec<SlantLine> = Vec::new();
        let mut uprights: Vec<UprightLine> = Vec::new();
        let mut i = 0;
        while i < triples.len() {
            let (wx, wy, b) = triples[i];
            let mut weight = 0.0;
            let mut j = i;
            while j < triples.len()
                && (triples[j].0 - wx).abs() <= ZERO_BAND
                && (triples[j].1 - wy).abs() <= ZERO_BAND
                && (triples[j].2 - b).abs() <= ZERO_BAND * (1.0 + b.abs())
            {
                weight += 1.0;
                j += 1;
            }
            if wy == 0.0 {
                uprights.push(UprightLine {
                    x0: -b / wx,
                    b,
                    weight,
                });
            } else {
                slants.push(SlantLine {
                    wx,
                    wy,
                    b,
                    weight,
                    orient: wy.signum(),
                });
            }
            i = j;
        }
        uprights.sort_by(|a, b| a.x0.partial_cmp(&b.x0).expect("finite"));

        let mut upright_prefix = Vec::with_capacity(uprights.len() + 1);
        upright_prefix.push([0.0; 2]);
        let mut uw = CompensatedSum::new();
        let mut ub = CompensatedSum::new();
        for u in &uprights {
            uw.add(u.weight);
            ub.add(u.weight * u.b);
            upright_prefix.push([uw.value(), ub.value()]);
        }

        // Slab boundaries: x-coordinates where two slanted lines cross.
        let mut bounds = Vec::new();
        for i in 0..slants.len() {
            for j in i + 1..slants.len() {
                let (a, c) = (&slants[i], &slants[j]);
                let det = a.wx * c.wy - c.wx * a.wy;
                if det.abs() <= ZERO_BAND {
                    continue;
                }
                bounds.push((c.b * a.wy - a.b * c.wy) / det);
            }
        }
        bounds.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        bounds.dedup_by(|next, kept| (*next - *kept).abs() <= ZERO_BAND * (1.0 + kept.abs()));

        let mut slabs = Vec::with_capacity(bounds.len() + 1);
        let mut keyed: Vec<(f64, u32)> = Vec::with_capacity(slants.len());
        for s in 0..=bounds.len() {
            let mid = if bounds.is_empty() {
                0.0
            } else if s == 0 {
                bounds[0] - 1.0
            } else if s == bounds.len() {
                bounds[bounds.len() - 1] + 1.0
            } else {
                (bounds[s - 1] + bounds[s]) / 2.0
            };
            keyed.clear();
            keyed.extend(
                slants
                    .iter()
                    .enumerate()
                    .map(|(li, l)| (l.y_at(mid), li as u32)),
            );
            keyed.sort_unstable_by(|a, b| {
                a.0.partial_cmp(&b.0).expect("finite").then(a.1.cmp(&b.1))
            });
            let order: Vec<u32> = keyed.iter().map(|&(_, li)| li).collect();
            let mut prefix = Vec::with_capacity(slants.len() + 1);
            prefix.push([0.0; 3]);
            let mut ax = CompensatedSum::new();
            let mut ay = CompensatedSum::new();
            let mut ab = CompensatedSum::new();
            for &li in &order {
                let l = &slants[li as usize];
                let w = l.weight * l.orient;
                ax.add(w * l.wx);
                ay.add(w * l.wy);
                ab.add(w * l.b);
                prefix.push([ax.value(), ay.value(), ab.value()]);
            }
            slabs.push(Slab { order, prefix });
        }

        let face_count = count_faces(&slants, &uprights);

        Ok(Self {
            family,
            slants,
            uprights,
            upright_prefix,
            bounds,
            slabs,
            face_count,
        })
    }

    pub fn family(&self) -> &HyperplaneFamily {
        &self.family
    }

    /// Number of distinct lines, after merging coincident members.
    pub fn line_count(&self) -> usize {
        self.slants.len() + self.uprights.len()
    }

    pub fn slab_count(&self) -> usize {
        self.slabs.len()
    }

    /// Number of 2-D faces of the arrangement, from the Euler relation
    /// `1 + m + sum over vertices of (lines through it - 1)`.
    pub fn face_count(&self) -> u64 {
        self.face_count
    }

    /// Finds the slab and the vertical rank of `q` (how many non-vertical
    /// lines pass strictly below it).
    ///
    /// Fails with [`Error::OnLine`] when `q` is inside the zero band of a
    /// line; cell data is meaningless there and callers fall back to direct
    /// evaluation.
    pub fn locate(&self, q: &DVector<f64>) -> Result<(usize, usize)> {
        assert_eq!(q.len(), 2, "query dimension mismatch");
        let (qx, qy) = (q[0], q[1]);

        let k = self.uprights.partition_point(|u| u.x0 < qx);
        for idx in [k.wrapping_sub(1), k] {
            if let Some(u) = self.uprights.get(idx) {
                if (qx - u.x0).abs() <= ZERO_BAND {
                    return Err(Error::OnLine);
                }
            }
        }

        let slab_idx = self.bounds.partition_point(|&b| b < qx);
        let slab = &self.slabs[slab_idx];
        let rank = slab.order.partition_point(|&li| {
            let l = &self.slants[li as usize];
            l.orient * l.signed_offset(qx, qy) > 0.0
        });
        for idx in [rank.wrapping_sub(1), rank] {
            if let Some(&li) = slab.order.get(idx) {
                if self.slants[li as usize].signed_offset(qx, qy).abs() <= ZERO_BAND {
                    return Err(Error::OnLine);
                }
            }
        }
        Ok((slab_idx, rank))
    }

    /// Depth of `q` through the index: two binary searches plus a
    /// constant-time coefficient lookup, falling back to direct summation
    /// when `q` lies on a line.
    pub fn query_depth(&self, q: &DVector<f64>) -> f64 {
        match self.locate(q) {
            Err(_) => self.family.depth(q),
            Ok((slab_idx, rank)) => {
                let slab = &self.slabs[slab_idx];
                let pre = slab.prefix[rank];
                let tot = *slab.prefix.last().expect("prefix never empty");
                let k = self.uprights.partition_point(|u| u.x0 < q[0]);
                let upre = self.upright_prefix[k];
                let utot = *self.upright_prefix.last().expect("prefix never empty");
                let gx = 2.0 * pre[0] - tot[0] + 2.0 * upre[0] - utot[0];
                let gy = 2.0 * pre[1] - tot[1];
                let c = 2.0 * pre[2] - tot[2] + 2.0 * upre[1] - utot[1];
                gx * q[0] + gy * q[1] + c
            }
        }
    }
}

/// Euler-relation face count: `1 + m + sum_v (m_v - 1)` over the
/// arrangement vertices, where `m_v` is the number of distinct lines
/// through vertex `v`.
fn count_faces(slants: &[SlantLine], uprights: &[UprightLine]) -> u64 {
    let m = slants.len() + uprights.len();
    // (x, y, line a, line b) per crossing; upright ids follow slant ids.
    let mut crossings: Vec<(f64, f64, u32, u32)> = Vec::new();
    for i in 0..slants.len() {
        for j in i + 1..slants.len() {
            let (a, c) = (&slants[i], &slants[j]);
            let det = a.wx * c.wy - c.wx * a.wy;
            if det.abs() <= ZERO_BAND {
                continue;
            }
            let x = (c.b * a.wy - a.b * c.wy) / det;
            let y = (a.b * c.wx - c.b * a.wx) / det;
            crossings.push((x, y, i as u32, j as u32));
        }
    }
    for (k, u) in uprights.iter().enumerate() {
        for (i, l) in slants.iter().enumerate() {
            crossings.push((u.x0, l.y_at(u.x0), i as u32, (slants.len() + k) as u32));
        }
    }
    crossings.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .expect("finite")
            .then(a.1.partial_cmp(&b.1).expect("finite"))
    });

    let mut excess: u64 = 0;
    let mut i = 0;
    while i < crossings.len() {
        let (rx, ry) = (crossings[i].0, crossings[i].1);
        let tol = 1e-9 * (1.0 + rx.abs().max(ry.abs()));
        let mut ids: Vec<u32> = Vec::new();
        let mut j = i;
        while j < crossings.len()
            && (crossings[j].0 - rx).abs() <= tol
            && (crossings[j].1 - ry).abs() <= tol
        {
            ids.push(crossings[j].2);
            ids.push(crossings[j].3);
            j += 1;
        }
        ids.sort_unstable();
        ids.dedup();
        excess += ids.len() as u64 - 1;
        i = j;
    }
    1 + m as u64 + excess
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::binomial;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};
    use std::collections::BTreeSet;

    fn dv(coords: &[f64]) -> DVector<f64> {
        DVector::from_row_slice(coords)
    }

    fn point_set(rows: &[[f64; 2]]) -> PointSet {
        PointSet::new(2, rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    /// Independent face count: sample two probes across every edge of every
    /// line (between consecutive crossings and beyond the extremes) and
    /// count distinct sign patterns. Every 2-D face of a nonempty
    /// arrangement touches at least one edge, so the probes cover them all.
    fn face_count_by_sampling(lines: &[(f64, f64, f64)]) -> u64 {
        if lines.is_empty() {
            return 1;
        }
        let eps = 1e-5;
        let mut patterns: BTreeSet<Vec<i8>> = BTreeSet::new();
        for (i, &(wx, wy, b)) in lines.iter().enumerate() {
            let n2 = wx * wx + wy * wy;
            let p0 = (-b * wx / n2, -b * wy / n2);
            let dir = (-wy, wx);
            let mut ts: Vec<f64> = Vec::new();
            for (j, &(ox, oy, ob)) in lines.iter().enumerate() {
                if j == i {
                    continue;
                }
                let denom = ox * dir.0 + oy * dir.1;
                if denom.abs() <= 1e-12 {
                    continue;
                }
                ts.push(-(ox * p0.0 + oy * p0.1 + ob) / denom);
            }
            ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
            ts.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * (1.0 + b.abs()));
            let mut params = Vec::new();
            if ts.is_empty() {
                params.push(0.0);
            } else {
                params.push(ts[0] - 1.0);
                params.extend(ts.windows(2).map(|w| (w[0] + w[1]) / 2.0));
                params.push(ts[ts.len() - 1] + 1.0);
            }
            for t in params {
                let on_line = (p0.0 + t * dir.0, p0.1 + t * dir.1);
                for side in [-1.0, 1.0] {
                    let p = (on_line.0 + side * eps * wx, on_line.1 + side * eps * wy);
                    let mut pattern = Vec::with_capacity(lines.len());
                    let mut ambiguous = false;
                    for &(ox, oy, ob) in lines {
                        let s = ox * p.0 + oy * p.1 + ob;
                        if s.abs() <= 1e-9 {
                            ambiguous = true;
                            break;
                        }
                        pattern.push(if s > 0.0 { 1 } else { -1 });
                    }
                    if !ambiguous {
                        patterns.insert(pattern);
                    }
                }
            }
        }
        patterns.len() as u64
    }

    fn distinct_lines(idx: &SlabIndex) -> Vec<(f64, f64, f64)> {
        let mut lines: Vec<(f64, f64, f64)> = idx
            .slants
            .iter()
            .map(|l| (l.wx, l.wy, l.b))
            .collect();
        lines.extend(idx.uprights.iter().map(|u| (1.0, 0.0, u.b)));
        lines
    }

    #[test]
    fn four_generic_points_make_eighteen_faces() {
        let idx = SlabIndex::build(&point_set(&[
            [0.0, 0.0],
            [4.0, 0.0],
            [2.0, 1.0],
            [1.0, 3.0],
        ]))
        .unwrap();
        assert_eq!(idx.line_count(), 6);
        assert_eq!(idx.face_count(), 18);
        assert_eq!(face_count_by_sampling(&distinct_lines(&idx)), 18);
    }

    #[test]
    fn triangle_arrangement_is_simple() {
        let idx = SlabIndex::build(&point_set(&[[0.0, 0.0], [4.0, 0.0], [2.0, 1.0]])).unwrap();
        assert_eq!(idx.face_count(), 1 + 3 + binomial(3, 2));
        assert_eq!(face_count_by_sampling(&distinct_lines(&idx)), 7);
    }

    #[test]
    fn square_with_diagonals_has_sixteen_faces() {
        let idx = SlabIndex::build(&point_set(&[
            [0.0, 0.0],
            [1.0, 0.0],
            [0.0, 1.0],
            [1.0, 1.0],
        ]))
        .unwrap();
        assert_eq!(idx.line_count(), 6);
        assert_eq!(idx.face_count(), 16);
        assert_eq!(face_count_by_sampling(&distinct_lines(&idx)), 16);
    }

    #[test]
    fn coincident_family_splits_the_plane_in_two() {
        let idx = SlabIndex::build(&point_set(&[[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]])).unwrap();
        assert_eq!(idx.line_count(), 1);
        assert_eq!(idx.face_count(), 2);
    }

    #[test]
    fn vertical_members_are_indexed_too() {
        let idx = SlabIndex::build(&point_set(&[[0.0, 0.0], [0.0, 2.0], [3.0, 1.0]])).unwrap();
        assert_eq!(idx.uprights.len(), 1);
        assert_eq!(idx.face_count(), 7);
        assert_eq!(face_count_by_sampling(&distinct_lines(&idx)), 7);
        for q in [
            dv(&[-1.0, 0.3]),
            dv(&[0.5, 0.4]),
            dv(&[4.0, -2.0]),
            dv(&[2.9, 1.1]),
        ] {
            let direct = idx.family().depth(&q);
            let indexed = idx.query_depth(&q);
            assert!(
                (direct - indexed).abs() <= 1e-9 * (1.0 + direct),
                "direct={direct} indexed={indexed}"
            );
        }
    }

    #[test]
    fn queries_left_of_all_crossings_land_in_slab_zero() {
        let idx = SlabIndex::build(&point_set(&[[0.0, 0.0], [4.0, 0.0], [2.0, 1.0]])).unwrap();
        let (slab, _) = idx.locate(&dv(&[-100.0, 0.5])).unwrap();
        assert_eq!(slab, 0);
    }

    #[test]
    fn on_line_queries_fall_back_to_direct_summation() {
        let idx = SlabIndex::build(&point_set(&[
            [0.0, 0.0],
            [1.0, 0.0],
            [0.0, 1.0],
            [1.0, 1.0],
        ]))
        .unwrap();
        let center = dv(&[0.5, 0.5]);
        assert!(matches!(idx.locate(&center), Err(Error::OnLine)));
        assert_eq!(idx.query_depth(&center), 2.0);
    }

    #[test]
    fn indexed_depth_matches_direct_on_random_sets() {
        let mut rng = StdRng::seed_from_u64(71);
        for _ in 0..10 {
            let n = rng.random_range(3..=7);
            let rows: Vec<Vec<f64>> = (0..n)
                .map(|_| vec![rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)])
                .collect();
            let ps = PointSet::new(2, rows).unwrap();
            let idx = SlabIndex::build(&ps).unwrap();
            for _ in 0..200 {
                let q = dv(&[rng.random_range(-8.0..8.0), rng.random_range(-8.0..8.0)]);
                let direct = idx.family().depth(&q);
                let indexed = idx.query_depth(&q);
                assert!(
                    (direct - indexed).abs() <= 1e-9 * (1.0 + direct),
                    "direct={direct} indexed={indexed} q={q:?}"
                );
            }
            // Near-line and near-crossing queries exercise the band logic.
            for m in idx.family().members().iter().take(6) {
                let p = ps.point(m.generators()[0])
                    + DVector::from_vec(vec![1e-8, -1e-8]);
                let direct = idx.family().depth(&p);
                let indexed = idx.query_depth(&p);
                assert!((direct - indexed).abs() <= 1e-9 * (1.0 + direct));
            }
        }
    }

    #[test]
    fn face_count_matches_sampling_oracle_on_random_sets() {
        let mut rng = StdRng::seed_from_u64(73);
        for _ in 0..10 {
            let n = rng.random_range(3..=5);
            let rows: Vec<Vec<f64>> = (0..n)
                .map(|_| vec![rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)])
                .collect();
            let ps = PointSet::new(2, rows.clone()).unwrap();
            let idx = SlabIndex::build(&ps).unwrap();
            assert_eq!(
                idx.face_count(),
                face_count_by_sampling(&distinct_lines(&idx)),
                "points: {rows:?}"
            );
        }
    }

    #[test]
    fn three_point_sets_make_simple_arrangements() {
        let mut rng = StdRng::seed_from_u64(79);
        for _ in 0..20 {
            let rows: Vec<Vec<f64>> = (0..3)
                .map(|_| vec![rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)])
                .collect();
            let ps = PointSet::new(2, rows).unwrap();
            let idx = SlabIndex::build(&ps).unwrap();
            let m = idx.line_count() as u64;
            assert_eq!(idx.face_count(), 1 + m + binomial(m, 2));
        }
    }
}

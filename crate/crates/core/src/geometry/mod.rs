//! Convex polytope intersection and geometric sparsity detection.
//!
//! Two compact convex sets are disjoint exactly when some axis separates
//! their scalar projections, and the axis joining their closest points is
//! always such an axis. [`intersection_test`] runs that construction:
//! bounding-box rejection, closest pair, projection test.

mod closest;
mod pattern;

use crate::error::{FemError, Result};
use crate::mesh::Point;

pub use closest::{
    closest_pair, closest_pair_solvers, AwayStepFrankWolfe, ClosestPair, ClosestPairSolver, MinNormPoint,
};
pub use pattern::{sparsity_pattern, sparsity_pattern_with, ContactPolicy, PatternOptions, SparsityPattern, INTERIOR_SHRINK};

/// Relative distance below which two polytopes count as touching.
pub const TOUCH_TOLERANCE: f64 = 1e-9;

/// Axis-aligned bounding box.
#[derive(Clone, Debug, PartialEq)]
pub struct Aabb {
    min: Vec<f64>,
    max: Vec<f64>,
}

impl Aabb {
    /// Componentwise min/max over `points`. Panics on an empty iterator.
    pub fn from_points<'a>(points: impl IntoIterator<Item = &'a [f64]>) -> Self {
        let mut it = points.into_iter();
        let first = it.next().expect("bounding box of an empty point set");
        let mut min = first.to_vec();
        let mut max = first.to_vec();
        for p in it {
            for (k, &c) in p.iter().enumerate() {
                min[k] = min[k].min(c);
                max[k] = max[k].max(c);
            }
        }
        Self { min, max }
    }

    pub fn min(&self) -> &[f64] {
        &self.min
    }

    pub fn max(&self) -> &[f64] {
        &self.max
    }

    /// Closed overlap test.
    pub fn intersects(&self, other: &Aabb) -> bool {
        self.min
            .iter()
            .zip(&self.max)
            .zip(other.min.iter().zip(&other.max))
            .all(|((a0, a1), (b0, b1))| a0 <= b1 && b0 <= a1)
    }

    pub fn contains_point(&self, p: &[f64], slack: f64) -> bool {
        p.iter()
            .zip(self.min.iter().zip(&self.max))
            .all(|(&c, (&lo, &hi))| c >= lo - slack && c <= hi + slack)
    }

    pub fn diagonal(&self) -> f64 {
        self.min
            .iter()
            .zip(&self.max)
            .map(|(a, b)| (b - a) * (b - a))
            .sum::<f64>()
            .sqrt()
    }
}

/// Convex hull of a finite vertex set. Redundant interior vertices are kept.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvexPolytope {
    dim: usize,
    vertices: Vec<Point>,
}

impl ConvexPolytope {
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        let dim = vertices
            .first()
            .map(Point::dim)
            .ok_or_else(|| FemError::InvalidArgument("polytope needs at least one vertex".into()))?;
        for v in &vertices {
            if v.dim() != dim {
                return Err(FemError::DimensionMismatch {
                    expected: dim,
                    found: v.dim(),
                });
            }
            if v.iter().any(|c| !c.is_finite()) {
                return Err(FemError::InvalidArgument("polytope vertex is not finite".into()));
            }
        }
        Ok(Self { dim, vertices })
    }

    pub fn from_points(vertices: Vec<Point>) -> Result<Self> {
        Self::new(vertices)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn bounding_box(&self) -> Aabb {
        Aabb::from_points(self.vertices.iter().map(Point::coords))
    }

    /// Vertex average.
    pub fn centroid(&self) -> Vec<f64> {
        let mut c = vec![0.0; self.dim];
        for v in &self.vertices {
            for (ci, x) in c.iter_mut().zip(v.iter()) {
                *ci += x;
            }
        }
        let m = self.vertices.len() as f64;
        c.iter_mut().for_each(|ci| *ci /= m);
        c
    }

    /// Largest vertex-to-vertex distance.
    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for (i, a) in self.vertices.iter().enumerate() {
            for b in &self.vertices[i + 1..] {
                d = d.max(a.distance(b));
            }
        }
        d
    }

    /// Image under the homothety with ratio `factor` about the centroid.
    pub fn scaled_about_centroid(&self, factor: f64) -> Self {
        let c = self.centroid();
        let vertices = self
            .vertices
            .iter()
            .map(|v| Point::new(v.iter().zip(&c).map(|(x, ci)| ci + factor * (x - ci)).collect()))
            .collect();
        Self { dim: self.dim, vertices }
    }

    /// Scalar projections of all vertices onto `axis`, as an interval.
    pub fn project(&self, axis: &[f64]) -> (f64, f64) {
        self.vertices
            .iter()
            .map(|v| dot(v, axis))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), t| (lo.min(t), hi.max(t)))
    }
}

pub fn bounding_box(p: &ConvexPolytope) -> Aabb {
    p.bounding_box()
}

/// Outcome of [`intersection_test`], with the evidence behind the verdict.
#[derive(Clone, Debug, PartialEq)]
pub enum IntersectionWitness {
    /// Step 1: the bounding boxes do not meet.
    DisjointBoxes,
    /// Step 2: closest distance is within the touch tolerance.
    Touching { distance: f64 },
    /// Step 3: `axis` = p_U − p_V separates the vertex projections.
    Separated { axis: Vec<f64>, distance: f64 },
    /// Step 3 found overlapping projections.
    ProjectionsOverlap { axis: Vec<f64>, distance: f64 },
}

impl IntersectionWitness {
    pub fn intersects(&self) -> bool {
        matches!(self, Self::Touching { .. } | Self::ProjectionsOverlap { .. })
    }
}

/// Separating-axis intersection test with an explicit closest-pair solver.
pub fn intersection_test(
    u: &ConvexPolytope,
    v: &ConvexPolytope,
    solver: &dyn ClosestPairSolver,
) -> Result<IntersectionWitness> {
    if u.dim() != v.dim() {
        return Err(FemError::DimensionMismatch {
            expected: u.dim(),
            found: v.dim(),
        });
    }
    if !u.bounding_box().intersects(&v.bounding_box()) {
        return Ok(IntersectionWitness::DisjointBoxes);
    }
    let pair = solver.solve(u, v)?;
    let touch = TOUCH_TOLERANCE * (u.diameter() + v.diameter());
    if pair.distance <= touch {
        return Ok(IntersectionWitness::Touching {
            distance: pair.distance,
        });
    }
    let axis: Vec<f64> = pair.on_u.iter().zip(pair.on_v.iter()).map(|(a, b)| a - b).collect();
    let (u_lo, u_hi) = u.project(&axis);
    let (v_lo, v_hi) = v.project(&axis);
    if u_hi < v_lo || v_hi < u_lo {
        Ok(IntersectionWitness::Separated {
            axis,
            distance: pair.distance,
        })
    } else {
        Ok(IntersectionWitness::ProjectionsOverlap {
            axis,
            distance: pair.distance,
        })
    }
}

/// Whether the closed convex hulls meet (touching counts).
pub fn convex_intersection(u: &ConvexPolytope, v: &ConvexPolytope) -> Result<bool> {
    Ok(intersection_test(u, v, &MinNormPoint::default())?.intersects())
}

/// All index pairs (i, j) with `a[i]` and `b[j]` overlapping (closed),
/// sorted. Sweep and prune along the first axis.
pub fn broad_phase_pairs(a: &[Aabb], b: &[Aabb]) -> Vec<(usize, usize)> {
    let mut order_a: Vec<usize> = (0..a.len()).collect();
    let mut order_b: Vec<usize> = (0..b.len()).collect();
    order_a.sort_by(|&i, &j| a[i].min[0].total_cmp(&a[j].min[0]));
    order_b.sort_by(|&i, &j| b[i].min[0].total_cmp(&b[j].min[0]));

    let mut out = Vec::new();
    let mut active_a: Vec<usize> = Vec::new();
    let mut active_b: Vec<usize> = Vec::new();
    let (mut ia, mut ib) = (0, 0);
    while ia < order_a.len() || ib < order_b.len() {
        let take_a = match (order_a.get(ia), order_b.get(ib)) {
            (Some(&i), Some(&j)) => a[i].min[0] <= b[j].min[0],
            (Some(_), None) => true,
            _ => false,
        };
        if take_a {
            let i = order_a[ia];
            ia += 1;
            let start = a[i].min[0];
            active_b.retain(|&j| b[j].max[0] >= start);
            out.extend(active_b.iter().filter(|&&j| a[i].intersects(&b[j])).map(|&j| (i, j)));
            active_a.push(i);
        } else {
            let j = order_b[ib];
            ib += 1;
            let start = b[j].min[0];
            active_a.retain(|&i| a[i].max[0] >= start);
            out.extend(active_a.iter().filter(|&&i| a[i].intersects(&b[j])).map(|&i| (i, j)));
            active_b.push(j);
        }
    }
    out.sort_unstable();
    out
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(v: &[&[f64]]) -> ConvexPolytope {
        ConvexPolytope::new(v.iter().map(|p| Point::from(*p)).collect()).unwrap()
    }

    fn unit_square_at(x: f64) -> ConvexPolytope {
        poly(&[&[x, 0.0], &[x + 1.0, 0.0], &[x + 1.0, 1.0], &[x, 1.0]])
    }

    #[test]
    fn bounding_boxes() {
        let t = poly(&[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]]);
        let b = t.bounding_box();
        assert_eq!((b.min(), b.max()), (&[0.0, 0.0][..], &[1.0, 1.0][..]));
        let p = poly(&[&[0.3, -2.0]]).bounding_box();
        assert_eq!(p.min(), p.max());
        let shifted = poly(&[&[5.0, 1.0], &[6.0, 1.0], &[5.0, 2.0]]).bounding_box();
        assert_eq!((shifted.min(), shifted.max()), (&[5.0, 1.0][..], &[6.0, 2.0][..]));
    }

    #[test]
    fn identical_polytopes_intersect() {
        let t = poly(&[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]]);
        assert!(convex_intersection(&t, &t).unwrap());
    }

    #[test]
    fn axis_separated_boxes() {
        let u = unit_square_at(0.0);
        let v = unit_square_at(2.0);
        assert!(!convex_intersection(&u, &v).unwrap());
        // Boxes that overlap in their AABBs but not as sets need step 3.
        let tri_a = poly(&[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]]);
        let tri_b = poly(&[&[1.0, 1.0], &[0.6, 1.0], &[1.0, 0.6]]);
        match intersection_test(&tri_a, &tri_b, &MinNormPoint::default()).unwrap() {
            IntersectionWitness::Separated { axis, .. } => {
                let (a_lo, a_hi) = tri_a.project(&axis);
                let (b_lo, b_hi) = tri_b.project(&axis);
                assert!(a_hi < b_lo || b_hi < a_lo);
            }
            other => panic!("expected separation, got {other:?}"),
        }
    }

    #[test]
    fn shared_vertex_touches() {
        let u = poly(&[&[0.0, 0.0], &[1.0, 0.0], &[1.0, 1.0]]);
        let v = poly(&[&[1.0, 1.0], &[2.0, 1.0], &[2.0, 2.0]]);
        assert!(convex_intersection(&u, &v).unwrap());
    }

    #[test]
    fn dimension_mismatch() {
        let u = poly(&[&[0.0]]);
        let v = poly(&[&[0.0, 0.0]]);
        assert!(matches!(convex_intersection(&u, &v), Err(FemError::DimensionMismatch { .. })));
    }

    #[test]
    fn broad_phase_matches_brute_force() {
        let boxes: Vec<Aabb> = (0..40)
            .map(|k| {
                let x = ((k * 37) % 17) as f64 * 0.3;
                let y = ((k * 11) % 13) as f64 * 0.25;
                let w = 0.2 + (k % 5) as f64 * 0.2;
                Aabb::from_points([&[x, y][..], &[x + w, y + w][..]])
            })
            .collect();
        let others: Vec<Aabb> = boxes.iter().skip(5).cloned().collect();
        let fast = broad_phase_pairs(&boxes, &others);
        let mut slow = Vec::new();
        for (i, a) in boxes.iter().enumerate() {
            for (j, b) in others.iter().enumerate() {
                if a.intersects(b) {
                    slow.push((i, j));
                }
            }
        }
        assert_eq!(fast, slow);
    }
}

//! Simplicial meshes in arbitrary dimension.
//!
//! A mesh is the four-field record used throughout the toolkit: points,
//! n-simplices, boundary facets and the active (Neumann) subset of the
//! boundary. Construction validates everything, including conformity, so
//! every other module can assume a well-formed triangulation.

mod generate;
mod io;

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::ops::Deref;

use nalgebra::{DMatrix, DVector};

use crate::error::{FemError, Result};
use crate::geometry::{self, Aabb, ConvexPolytope};

pub use generate::{uniform_interval_mesh, uniform_rectangle_mesh, Diagonal, GridMesh, MeshSize};
pub use io::{load_mesh, parse_mesh, save_mesh, write_mesh_string};

/// Relative barycentric tolerance for point containment.
pub const CONTAINMENT_TOL: f64 = 1e-12;

/// A point in n-dimensional space.
#[derive(Clone, Debug, PartialEq)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Self(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn distance(&self, other: &Point) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

impl Deref for Point {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for Point {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

impl From<&[f64]> for Point {
    fn from(v: &[f64]) -> Self {
        Self(v.to_vec())
    }
}

impl<const N: usize> From<[f64; N]> for Point {
    fn from(v: [f64; N]) -> Self {
        Self(v.to_vec())
    }
}

/// An n-simplex given by n+1 indices into the mesh point array.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Simplex(Vec<usize>);

impl Simplex {
    pub fn new(vertices: Vec<usize>) -> Self {
        Self(vertices)
    }

    pub fn vertices(&self) -> &[usize] {
        &self.0
    }
}

/// An (n−1)-facet given by n point indices. Equality ignores ordering.
#[derive(Clone, Debug)]
pub struct Facet(Vec<usize>);

impl Facet {
    pub fn new(vertices: Vec<usize>) -> Self {
        Self(vertices)
    }

    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    /// Sorted vertex list, the facet's identity.
    pub fn key(&self) -> Vec<usize> {
        let mut k = self.0.clone();
        k.sort_unstable();
        k
    }
}

impl PartialEq for Facet {
    fn eq(&self, other: &Self) -> bool {
        self.key() == other.key()
    }
}

impl Eq for Facet {}

/// Affine map T(x̂) = M·x̂ + b from the standard simplex onto a physical one.
#[derive(Clone, Debug)]
pub struct AffineMap {
    matrix: DMatrix<f64>,
    offset: DVector<f64>,
    inverse: DMatrix<f64>,
    abs_det: f64,
}

impl AffineMap {
    /// Map sending 0 to `vertices[0]` and eᵢ to `vertices[i]`.
    pub fn from_vertices(vertices: &[&[f64]]) -> Option<Self> {
        let n = vertices[0].len();
        if vertices.len() != n + 1 {
            return None;
        }
        let offset = DVector::from_column_slice(vertices[0]);
        let matrix = DMatrix::from_fn(n, n, |r, c| vertices[c + 1][r] - vertices[0][r]);
        let det = matrix.determinant();
        let scale = (1..=n)
            .map(|c| matrix.column(c - 1).norm())
            .product::<f64>();
        if !det.is_finite() || det.abs() <= 1e-12 * scale {
            return None;
        }
        let inverse = matrix.clone().try_inverse()?;
        Some(Self {
            matrix,
            offset,
            inverse,
            abs_det: det.abs(),
        })
    }

    pub fn dim(&self) -> usize {
        self.offset.len()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn offset(&self) -> &DVector<f64> {
        &self.offset
    }

    pub fn inverse_matrix(&self) -> &DMatrix<f64> {
        &self.inverse
    }

    /// |det M|, the volume ratio physical / reference.
    pub fn abs_det_j(&self) -> f64 {
        self.abs_det
    }

    pub fn apply(&self, xhat: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|r| self.offset[r] + (0..n).map(|c| self.matrix[(r, c)] * xhat[c]).sum::<f64>())
            .collect()
    }

    pub fn apply_inverse(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|r| {
                (0..n)
                    .map(|c| self.inverse[(r, c)] * (x[c] - self.offset[c]))
                    .sum::<f64>()
            })
            .collect()
    }
}

/// Per-simplex data derived once at construction.
#[derive(Clone, Debug)]
struct SimplexGeometry {
    map: AffineMap,
    /// Gradients of the n+1 barycentric coordinates, row-major (n+1)×n.
    bary_grads: Vec<f64>,
    bbox: Aabb,
}

#[derive(Clone)]
pub struct SimplicialMesh {
    dim: usize,
    points: Vec<Point>,
    simplices: Vec<Simplex>,
    boundary: Vec<Facet>,
    active: Vec<Facet>,
    geometry: Vec<SimplexGeometry>,
    vertex_simplices: Vec<Vec<usize>>,
}

impl fmt::Debug for SimplicialMesh {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SimplicialMesh")
            .field("dim", &self.dim)
            .field("points", &self.points.len())
            .field("simplices", &self.simplices.len())
            .field("boundary", &self.boundary.len())
            .field("active", &self.active.len())
            .finish()
    }
}

impl PartialEq for SimplicialMesh {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim
            && self.points == other.points
            && self.simplices == other.simplices
            && self.boundary.iter().map(Facet::vertices).eq(other.boundary.iter().map(Facet::vertices))
            && self.active.iter().map(Facet::vertices).eq(other.active.iter().map(Facet::vertices))
    }
}

impl SimplicialMesh {
    /// Validates and builds a mesh.
    ///
    /// Rejects out-of-range or repeated indices, degenerate simplices,
    /// boundary facets that are not faces of exactly one simplex, active
    /// facets missing from the boundary, and non-conforming triangulations.
    pub fn new(
        dim: usize,
        points: Vec<Point>,
        simplices: Vec<Simplex>,
        boundary: Vec<Facet>,
        active: Vec<Facet>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(FemError::InvalidMesh("dimension must be positive".into()));
        }
        for (i, p) in points.iter().enumerate() {
            if p.dim() != dim {
                return Err(FemError::InvalidMesh(format!(
                    "point {i} has {} coordinates, expected {dim}",
                    p.dim()
                )));
            }
            if p.iter().any(|c| !c.is_finite()) {
                return Err(FemError::InvalidMesh(format!("point {i} is not finite")));
            }
        }
        let check_indices = |what: &str, idx: usize, verts: &[usize], len: usize| -> Result<()> {
            if verts.len() != len {
                return Err(FemError::InvalidMesh(format!(
                    "{what} {idx} has {} vertices, expected {len}",
                    verts.len()
                )));
            }
            let mut seen = BTreeSet::new();
            for &v in verts {
                if v >= points.len() {
                    return Err(FemError::InvalidMesh(format!(
                        "{what} {idx} references point {v} but the mesh has {} points",
                        points.len()
                    )));
                }
                if !seen.insert(v) {
                    return Err(FemError::InvalidMesh(format!("{what} {idx} repeats point {v}")));
                }
            }
            Ok(())
        };
        for (i, s) in simplices.iter().enumerate() {
            check_indices("simplex", i, s.vertices(), dim + 1)?;
        }
        for (i, f) in boundary.iter().enumerate() {
            check_indices("boundary facet", i, f.vertices(), dim)?;
        }
        for (i, f) in active.iter().enumerate() {
            check_indices("active facet", i, f.vertices(), dim)?;
        }

        let mut geometry = Vec::with_capacity(simplices.len());
        for (i, s) in simplices.iter().enumerate() {
            let verts: Vec<&[f64]> = s.vertices().iter().map(|&v| points[v].coords()).collect();
            let map = AffineMap::from_vertices(&verts).ok_or(FemError::DegenerateSimplex(i))?;
            let mut bary_grads = vec![0.0; (dim + 1) * dim];
            for k in 0..dim {
                for c in 0..dim {
                    let g = map.inverse_matrix()[(k, c)];
                    bary_grads[(k + 1) * dim + c] = g;
                    bary_grads[c] -= g;
                }
            }
            let bbox = Aabb::from_points(verts.iter().copied());
            geometry.push(SimplexGeometry {
                map,
                bary_grads,
                bbox,
            });
        }

        let mut vertex_simplices = vec![Vec::new(); points.len()];
        for (i, s) in simplices.iter().enumerate() {
            for &v in s.vertices() {
                vertex_simplices[v].push(i);
            }
        }

        let mesh = Self {
            dim,
            points,
            simplices,
            boundary,
            active,
            geometry,
            vertex_simplices,
        };
        mesh.check_facets()?;
        mesh.check_conforming()?;
        Ok(mesh)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &Point {
        &self.points[i]
    }

    pub fn simplices(&self) -> &[Simplex] {
        &self.simplices
    }

    pub fn simplex(&self, i: usize) -> &Simplex {
        &self.simplices[i]
    }

    pub fn num_points(&self) -> usize {
        self.points.len()
    }

    pub fn num_simplices(&self) -> usize {
        self.simplices.len()
    }

    pub fn boundary_facets(&self) -> &[Facet] {
        &self.boundary
    }

    /// Neumann part of the boundary.
    pub fn active_boundary(&self) -> &[Facet] {
        &self.active
    }

    /// Boundary facets not in the active (Neumann) set.
    pub fn dirichlet_facets(&self) -> Vec<Facet> {
        let active: BTreeSet<Vec<usize>> = self.active.iter().map(Facet::key).collect();
        self.boundary
            .iter()
            .filter(|f| !active.contains(&f.key()))
            .cloned()
            .collect()
    }

    /// Returns a copy whose active boundary is every boundary facet matching `pred`
    /// (called with the facet's vertex coordinates).
    pub fn with_active_boundary(&self, pred: impl Fn(&[&Point]) -> bool) -> Self {
        let active = self
            .boundary
            .iter()
            .filter(|f| {
                let pts: Vec<&Point> = f.vertices().iter().map(|&v| &self.points[v]).collect();
                pred(&pts)
            })
            .cloned()
            .collect();
        Self {
            active,
            ..self.clone()
        }
    }

    /// Simplices having `v` as a vertex, in increasing order.
    pub fn simplices_around(&self, v: usize) -> &[usize] {
        &self.vertex_simplices[v]
    }

    pub fn simplex_vertices(&self, s: usize) -> impl Iterator<Item = &Point> + '_ {
        self.simplices[s].vertices().iter().map(move |&v| &self.points[v])
    }

    pub fn reference_map(&self, s: usize) -> &AffineMap {
        &self.geometry[s].map
    }

    pub fn simplex_volume(&self, s: usize) -> f64 {
        self.geometry[s].map.abs_det_j() / factorial(self.dim)
    }

    pub fn total_volume(&self) -> f64 {
        (0..self.simplices.len()).map(|s| self.simplex_volume(s)).sum()
    }

    pub fn simplex_bbox(&self, s: usize) -> &Aabb {
        &self.geometry[s].bbox
    }

    /// Gradient of barycentric coordinate `k` on simplex `s`.
    pub fn bary_gradient(&self, s: usize, k: usize) -> &[f64] {
        let n = self.dim;
        &self.geometry[s].bary_grads[k * n..(k + 1) * n]
    }

    /// Barycentric coordinates of `x` with respect to simplex `s`.
    pub fn barycentric(&self, s: usize, x: &[f64]) -> Vec<f64> {
        let xhat = self.geometry[s].map.apply_inverse(x);
        let mut lambda = Vec::with_capacity(self.dim + 1);
        lambda.push(1.0 - xhat.iter().sum::<f64>());
        lambda.extend(xhat);
        lambda
    }

    /// Physical point with barycentric coordinates `lambda` in simplex `s`.
    pub fn from_barycentric(&self, s: usize, lambda: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for (k, &v) in self.simplices[s].vertices().iter().enumerate() {
            for (o, c) in out.iter_mut().zip(self.points[v].iter()) {
                *o += lambda[k] * c;
            }
        }
    }

    pub fn centroid(&self, s: usize) -> Point {
        let w = 1.0 / (self.dim + 1) as f64;
        let mut out = vec![0.0; self.dim];
        self.from_barycentric(s, &vec![w; self.dim + 1], &mut out);
        Point::new(out)
    }

    /// Lowest-index simplex whose closed hull contains `p`, if any.
    ///
    /// Linear scan with a bounding-box pre-filter.
    pub fn locate_simplex(&self, p: &[f64]) -> Option<usize> {
        (0..self.simplices.len()).find(|&s| self.contains(s, p))
    }

    /// Closed containment test with the relative barycentric tolerance.
    pub fn contains(&self, s: usize, p: &[f64]) -> bool {
        let bbox = &self.geometry[s].bbox;
        let slack = CONTAINMENT_TOL * bbox.diagonal().max(f64::MIN_POSITIVE);
        if !bbox.contains_point(p, slack) {
            return false;
        }
        self.barycentric(s, p).iter().all(|&l| l >= -CONTAINMENT_TOL)
    }

    /// Longest edge over all simplices.
    pub fn max_edge_length(&self) -> f64 {
        self.simplices
            .iter()
            .flat_map(|s| {
                let v = s.vertices();
                (0..v.len()).flat_map(move |a| (a + 1..v.len()).map(move |b| (v[a], v[b])))
            })
            .map(|(a, b)| self.points[a].distance(&self.points[b]))
            .fold(0.0, f64::max)
    }

    /// All edges as sorted vertex pairs, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut set = BTreeSet::new();
        for s in &self.simplices {
            let v = s.vertices();
            for a in 0..v.len() {
                for b in a + 1..v.len() {
                    set.insert((v[a].min(v[b]), v[a].max(v[b])));
                }
            }
        }
        set.into_iter().collect()
    }

    pub fn simplex_polytope(&self, s: usize) -> ConvexPolytope {
        ConvexPolytope::from_points(self.simplex_vertices(s).cloned().collect())
            .expect("mesh simplices have consistent dimension")
    }

    fn check_facets(&self) -> Result<()> {
        let faces = self.face_map();
        let boundary: BTreeSet<Vec<usize>> = self.boundary.iter().map(Facet::key).collect();
        for (i, f) in self.boundary.iter().enumerate() {
            match faces.get(&f.key()) {
                Some(owners) if owners.len() == 1 => {}
                Some(_) => {
                    return Err(FemError::InvalidMesh(format!(
                        "boundary facet {i} {:?} is shared by two simplices",
                        f.vertices()
                    )))
                }
                None => {
                    return Err(FemError::InvalidMesh(format!(
                        "boundary facet {i} {:?} is not a face of any simplex",
                        f.vertices()
                    )))
                }
            }
        }
        for (i, f) in self.active.iter().enumerate() {
            if !boundary.contains(&f.key()) {
                return Err(FemError::InvalidMesh(format!(
                    "active facet {i} {:?} is not a boundary facet",
                    f.vertices()
                )));
            }
        }
        Ok(())
    }

    /// Facet (sorted key) → [(simplex, local index of the opposite vertex)].
    fn face_map(&self) -> HashMap<Vec<usize>, Vec<(usize, usize)>> {
        let mut faces: HashMap<Vec<usize>, Vec<(usize, usize)>> = HashMap::new();
        for (s, simplex) in self.simplices.iter().enumerate() {
            let v = simplex.vertices();
            for opposite in 0..v.len() {
                let mut key: Vec<usize> = v
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != opposite)
                    .map(|(_, &x)| x)
                    .collect();
                key.sort_unstable();
                faces.entry(key).or_default().push((s, opposite));
            }
        }
        faces
    }

    /// Conformity: every facet is shared by at most two simplices lying on
    /// opposite sides of it, no point sits inside a simplex it is not a vertex
    /// of, and simplices sharing no vertex are disjoint.
    pub fn check_conforming(&self) -> Result<()> {
        for (key, owners) in self.face_map() {
            if owners.len() > 2 {
                return Err(FemError::InvalidMesh(format!(
                    "facet {key:?} is shared by {} simplices",
                    owners.len()
                )));
            }
            if owners.len() == 2 {
                let side = |(s, opp): (usize, usize)| {
                    let apex = self.points[self.simplices[s].vertices()[opp]].coords();
                    orientation(&key.iter().map(|&k| self.points[k].coords()).collect::<Vec<_>>(), apex)
                };
                if side(owners[0]) * side(owners[1]) >= 0.0 {
                    return Err(FemError::InvalidMesh(format!(
                        "simplices {} and {} overlap across facet {key:?}",
                        owners[0].0, owners[1].0
                    )));
                }
            }
        }

        // Hanging or interior vertices.
        let point_boxes: Vec<Aabb> = self
            .points
            .iter()
            .map(|p| Aabb::from_points(std::iter::once(p.coords())))
            .collect();
        let simplex_boxes: Vec<Aabb> = self.geometry.iter().map(|g| g.bbox.clone()).collect();
        for (p, s) in geometry::broad_phase_pairs(&point_boxes, &simplex_boxes) {
            if self.simplices[s].vertices().contains(&p) {
                continue;
            }
            if self.barycentric(s, self.points[p].coords()).iter().all(|&l| l >= -1e-10) {
                return Err(FemError::InvalidMesh(format!(
                    "point {p} lies in simplex {s} without being one of its vertices"
                )));
            }
        }

        // Vertex-disjoint simplices must not touch.
        for (a, b) in geometry::broad_phase_pairs(&simplex_boxes, &simplex_boxes) {
            if a >= b {
                continue;
            }
            let va = self.simplices[a].vertices();
            if self.simplices[b].vertices().iter().any(|v| va.contains(v)) {
                continue;
            }
            if geometry::convex_intersection(&self.simplex_polytope(a), &self.simplex_polytope(b))? {
                return Err(FemError::InvalidMesh(format!(
                    "simplices {a} and {b} intersect without sharing a face"
                )));
            }
        }
        Ok(())
    }
}

/// Signed volume of the simplex (facet..., apex).
fn orientation(facet: &[&[f64]], apex: &[f64]) -> f64 {
    let n = apex.len();
    let base = facet[0];
    let m = DMatrix::from_fn(n, n, |r, c| {
        let col = if c + 1 < n { facet[c + 1] } else { apex };
        col[r] - base[r]
    });
    m.determinant()
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference_triangle() -> SimplicialMesh {
        parse_mesh(
            "dim 2\npoints 3\n0 0\n1 0\n0 1\nsimplices 1\n0 1 2\nboundary 3\n0 1\n1 2\n2 0\nactive 0\n",
        )
        .unwrap()
    }

    #[test]
    fn single_reference_triangle() {
        let m = reference_triangle();
        assert_eq!(m.num_simplices(), 1);
        assert!((m.simplex_volume(0) - 0.5).abs() < 1e-15);
        let map = m.reference_map(0);
        assert_eq!(map.matrix(), &DMatrix::identity(2, 2));
        assert_eq!(map.offset(), &DVector::zeros(2));
        assert_eq!(map.abs_det_j(), 1.0);
    }

    #[test]
    fn out_of_range_index_rejected() {
        let err = parse_mesh("dim 2\npoints 3\n0 0\n1 0\n0 1\nsimplices 1\n0 1 99\nboundary 0\nactive 0\n")
            .unwrap_err();
        assert!(matches!(err, FemError::InvalidMesh(ref m) if m.contains("99")), "{err}");
    }

    #[test]
    fn scaled_triangle_map() {
        let m = parse_mesh(
            "dim 2\npoints 3\n0 0\n2 0\n0 2\nsimplices 1\n0 1 2\nboundary 3\n0 1\n1 2\n2 0\nactive 0\n",
        )
        .unwrap();
        assert!((m.reference_map(0).abs_det_j() - 4.0).abs() < 1e-14);
        assert!((m.simplex_volume(0) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn segment_map() {
        let m = parse_mesh("dim 1\npoints 2\n3\n5\nsimplices 1\n0 1\nboundary 2\n0\n1\nactive 0\n").unwrap();
        let map = m.reference_map(0);
        assert_eq!(map.matrix()[(0, 0)], 2.0);
        assert_eq!(map.offset()[0], 3.0);
        assert_eq!(map.abs_det_j(), 2.0);
    }

    #[test]
    fn reference_tetrahedron_volume() {
        let m = parse_mesh(
            "dim 3\npoints 4\n0 0 0\n1 0 0\n0 1 0\n0 0 1\nsimplices 1\n0 1 2 3\n\
             boundary 4\n1 2 3\n0 2 3\n0 1 3\n0 1 2\nactive 0\n",
        )
        .unwrap();
        assert!((m.simplex_volume(0) - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn degenerate_simplex_rejected() {
        let err = parse_mesh("dim 2\npoints 3\n0 0\n1 1\n2 2\nsimplices 1\n0 1 2\nboundary 0\nactive 0\n")
            .unwrap_err();
        assert!(matches!(err, FemError::DegenerateSimplex(0)));
    }

    #[test]
    fn active_must_be_boundary() {
        let err = parse_mesh(
            "dim 2\npoints 4\n0 0\n1 0\n0 1\n1 1\nsimplices 2\n0 1 2\n1 3 2\nboundary 4\n0 1\n1 3\n3 2\n2 0\nactive 1\n1 2\n",
        )
        .unwrap_err();
        assert!(err.to_string().contains("not a boundary facet"), "{err}");
    }

    #[test]
    fn overlapping_simplices_rejected() {
        // Second triangle folds back over the first across the shared edge 1-2.
        let err = parse_mesh(
            "dim 2\npoints 4\n0 0\n1 0\n0 1\n0.2 0.2\nsimplices 2\n0 1 2\n1 2 3\nboundary 0\nactive 0\n",
        )
        .unwrap_err();
        assert!(err.to_string().contains("overlap") || err.to_string().contains("lies in"), "{err}");
    }

    #[test]
    fn hanging_node_rejected() {
        // Point 4 = (0.5, 0.5) is the midpoint of the long edge of triangle 0 but only a vertex of the others.
        let err = parse_mesh(
            "dim 2\npoints 5\n0 0\n1 0\n0 1\n1 1\n0.5 0.5\nsimplices 3\n0 1 2\n1 3 4\n4 3 2\nboundary 0\nactive 0\n",
        )
        .unwrap_err();
        assert!(err.to_string().contains("point 4"), "{err}");
    }

    #[test]
    fn reference_map_inverts_on_vertices() {
        let m = uniform_rectangle_mesh((-1.0, 1.0), (0.0, 3.0), MeshSize::Spacing(0.5), Diagonal::Forward)
            .unwrap()
            .mesh;
        for s in 0..m.num_simplices() {
            let map = m.reference_map(s);
            for (k, p) in m.simplex_vertices(s).enumerate() {
                let mut e = vec![0.0; 2];
                if k > 0 {
                    e[k - 1] = 1.0;
                }
                let back = map.apply(&map.apply_inverse(p));
                let fwd = map.apply(&e);
                for c in 0..2 {
                    assert!((back[c] - p[c]).abs() < 1e-12);
                    assert!((fwd[c] - p[c]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn locate_centroid_and_outside() {
        let m = uniform_rectangle_mesh((0.0, 1.0), (0.0, 1.0), MeshSize::Spacing(0.25), Diagonal::Forward)
            .unwrap()
            .mesh;
        for s in 0..m.num_simplices() {
            assert_eq!(m.locate_simplex(&m.centroid(s)), Some(s));
        }
        assert_eq!(m.locate_simplex(&[2.0, 0.5]), None);
        assert_eq!(m.locate_simplex(&[-1e-6, 0.5]), None);
    }

    #[test]
    fn locate_on_shared_edge_prefers_lowest_index() {
        let m = uniform_rectangle_mesh((0.0, 2.0), (0.0, 1.0), MeshSize::Spacing(1.0), Diagonal::Forward)
            .unwrap()
            .mesh;
        // The vertical edge x = 1 separates cell 0 from cell 1.
        let p = [1.0, 0.5];
        let owners: Vec<usize> = (0..m.num_simplices()).filter(|&s| m.contains(s, &p)).collect();
        assert_eq!(owners.len(), 2);
        assert_eq!(m.locate_simplex(&p), Some(owners[0]));
        assert!(owners[0] < owners[1]);
    }

    #[test]
    fn dirichlet_is_boundary_minus_active() {
        let m = uniform_rectangle_mesh((0.0, 1.0), (0.0, 2.0), MeshSize::Spacing(0.5), Diagonal::Forward)
            .unwrap()
            .mesh
            .with_active_boundary(|pts| pts.iter().all(|p| p[1] == 0.0));
        assert_eq!(m.active_boundary().len(), 2);
        assert_eq!(m.dirichlet_facets().len(), m.boundary_facets().len() - 2);
    }
}

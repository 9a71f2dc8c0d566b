//! Lagrange finite element spaces.
//!
//! A basis function is its support (a list of simplices) plus an evaluator.
//! Dirichlet conditions are imposed by leaving out the functions whose
//! Lagrange node lies on a Dirichlet facet.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use crate::error::{FemError, Result};
use crate::geometry::ConvexPolytope;
use crate::mesh::{Facet, Point, SimplicialMesh};

/// Polynomial family of a space.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Element {
    /// Piecewise linear, any dimension.
    P1,
    /// Piecewise quadratic, triangles only.
    P2,
}

impl Element {
    pub fn degree(self) -> usize {
        match self {
            Self::P1 => 1,
            Self::P2 => 2,
        }
    }
}

/// Local Lagrange node of a simplex, by local vertex indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LocalNode {
    Vertex(usize),
    /// Midpoint of the edge between two local vertices.
    Edge(usize, usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DofKind {
    P1Vertex,
    P2Vertex,
    P2Edge,
}

/// Value and gradient of a shape function at one point.
#[derive(Clone, Copy, Debug)]
pub struct ShapeEval<'a> {
    pub value: f64,
    pub grad: &'a [f64],
}

/// One global basis function.
#[derive(Clone, Debug)]
pub struct BasisFunction {
    node: usize,
    kind: DofKind,
    location: Point,
    support: Vec<usize>,
    local: Vec<LocalNode>,
}

impl BasisFunction {
    /// Global Lagrange node index (shared with the unconstrained space).
    pub fn node(&self) -> usize {
        self.node
    }

    pub fn kind(&self) -> DofKind {
        self.kind
    }

    pub fn location(&self) -> &Point {
        &self.location
    }

    /// Support simplices, increasing.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    /// Local node of this function within support simplex `s`.
    pub fn local_node(&self, s: usize) -> Option<LocalNode> {
        self.support.binary_search(&s).ok().map(|k| self.local[k])
    }
}

/// Scalar Lagrange space on a simplicial mesh.
#[derive(Clone, Debug)]
pub struct FiniteElementSpace {
    mesh: Arc<SimplicialMesh>,
    element: Element,
    layout: Vec<LocalNode>,
    element_nodes: Vec<Vec<usize>>,
    node_locations: Vec<Point>,
    node_dof: Vec<Option<usize>>,
    basis: Vec<BasisFunction>,
    constrained: bool,
}

/// P1 space without the vertices on `dirichlet`.
pub fn build_p1_space(mesh: Arc<SimplicialMesh>, dirichlet: &[Facet]) -> Result<FiniteElementSpace> {
    FiniteElementSpace::new(mesh, Element::P1, dirichlet)
}

/// P2 space on a triangulation without the nodes on `dirichlet`.
pub fn build_p2_space(mesh: Arc<SimplicialMesh>, dirichlet: &[Facet]) -> Result<FiniteElementSpace> {
    FiniteElementSpace::new(mesh, Element::P2, dirichlet)
}

impl FiniteElementSpace {
    pub fn new(mesh: Arc<SimplicialMesh>, element: Element, dirichlet: &[Facet]) -> Result<Self> {
        let n = mesh.dim();
        if element == Element::P2 && n != 2 {
            return Err(FemError::DimensionMismatch { expected: 2, found: n });
        }
        let boundary: BTreeSet<Vec<usize>> = mesh.boundary_facets().iter().map(Facet::key).collect();
        if let Some(f) = dirichlet.iter().find(|f| !boundary.contains(&f.key())) {
            return Err(FemError::InvalidArgument(format!(
                "Dirichlet facet {:?} is not a boundary facet",
                f.vertices()
            )));
        }
        let nv = mesh.num_points();
        let mut vertex_fixed = vec![false; nv];
        for f in dirichlet {
            for &v in f.vertices() {
                vertex_fixed[v] = true;
            }
        }

        let mut layout: Vec<LocalNode> = (0..=n).map(LocalNode::Vertex).collect();
        let mut node_locations: Vec<Point> = mesh.points().to_vec();
        let mut fixed = vertex_fixed;
        let mut element_nodes: Vec<Vec<usize>> = mesh.simplices().iter().map(|s| s.vertices().to_vec()).collect();

        if element == Element::P2 {
            for a in 0..=n {
                for b in a + 1..=n {
                    layout.push(LocalNode::Edge(a, b));
                }
            }
            let edges = mesh.edges();
            let edge_index: HashMap<(usize, usize), usize> = edges.iter().enumerate().map(|(k, &e)| (e, k)).collect();
            let mut dirichlet_edges = BTreeSet::new();
            for f in dirichlet {
                let v = f.key();
                for a in 0..v.len() {
                    for b in a + 1..v.len() {
                        dirichlet_edges.insert((v[a], v[b]));
                    }
                }
            }
            for &(a, b) in &edges {
                let mid = mesh.point(a).iter().zip(mesh.point(b).iter()).map(|(x, y)| 0.5 * (x + y)).collect();
                node_locations.push(Point::new(mid));
                fixed.push(dirichlet_edges.contains(&(a, b)));
            }
            for nodes in &mut element_nodes {
                let verts = nodes.clone();
                for node in &layout[n + 1..] {
                    if let LocalNode::Edge(a, b) = *node {
                        let key = (verts[a].min(verts[b]), verts[a].max(verts[b]));
                        nodes.push(nv + edge_index[&key]);
                    }
                }
            }
        }

        // Support and local node of every global node.
        let mut node_support: Vec<Vec<(usize, LocalNode)>> = vec![Vec::new(); node_locations.len()];
        for (s, nodes) in element_nodes.iter().enumerate() {
            for (&g, &ln) in nodes.iter().zip(&layout) {
                node_support[g].push((s, ln));
            }
        }

        let mut node_dof = vec![None; node_locations.len()];
        let mut basis = Vec::new();
        for (g, support) in node_support.into_iter().enumerate() {
            if fixed[g] || support.is_empty() {
                continue;
            }
            let kind = match (element, support[0].1) {
                (Element::P1, _) => DofKind::P1Vertex,
                (Element::P2, LocalNode::Vertex(_)) => DofKind::P2Vertex,
                (Element::P2, LocalNode::Edge(..)) => DofKind::P2Edge,
            };
            node_dof[g] = Some(basis.len());
            basis.push(BasisFunction {
                node: g,
                kind,
                location: node_locations[g].clone(),
                support: support.iter().map(|&(s, _)| s).collect(),
                local: support.iter().map(|&(_, l)| l).collect(),
            });
        }

        Ok(Self {
            mesh,
            element,
            layout,
            element_nodes,
            node_locations,
            node_dof,
            basis,
            constrained: !dirichlet.is_empty(),
        })
    }

    pub fn mesh(&self) -> &Arc<SimplicialMesh> {
        &self.mesh
    }

    pub fn element(&self) -> Element {
        self.element
    }

    pub fn degree(&self) -> usize {
        self.element.degree()
    }

    pub fn dim(&self) -> usize {
        self.mesh.dim()
    }

    /// Number of basis functions (degrees of freedom).
    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn is_constrained(&self) -> bool {
        self.constrained
    }

    pub fn basis(&self) -> &[BasisFunction] {
        &self.basis
    }

    pub fn basis_function(&self, i: usize) -> &BasisFunction {
        &self.basis[i]
    }

    /// Lagrange nodes of the unconstrained space.
    pub fn num_nodes(&self) -> usize {
        self.node_locations.len()
    }

    pub fn node_location(&self, node: usize) -> &Point {
        &self.node_locations[node]
    }

    pub fn node_locations(&self) -> &[Point] {
        &self.node_locations
    }

    /// Degree of freedom of a global node, `None` when it is constrained.
    pub fn dof_of_node(&self, node: usize) -> Option<usize> {
        self.node_dof[node]
    }

    /// Local node order shared by all simplices.
    pub fn local_layout(&self) -> &[LocalNode] {
        &self.layout
    }

    /// Global node ids of simplex `s`, in [`Self::local_layout`] order.
    pub fn element_nodes(&self, s: usize) -> &[usize] {
        &self.element_nodes[s]
    }

    /// Shape function of local node `ln` at barycentric coordinates `lambda`.
    pub fn shape_value(&self, ln: LocalNode, lambda: &[f64]) -> f64 {
        match (self.element, ln) {
            (Element::P1, LocalNode::Vertex(a)) => lambda[a],
            (Element::P2, LocalNode::Vertex(a)) => lambda[a] * (2.0 * lambda[a] - 1.0),
            (_, LocalNode::Edge(a, b)) => 4.0 * lambda[a] * lambda[b],
        }
    }

    /// Gradient of the shape function of `ln` on simplex `s`, into `out`.
    pub fn shape_gradient(&self, s: usize, ln: LocalNode, lambda: &[f64], out: &mut [f64]) {
        let m = &self.mesh;
        match (self.element, ln) {
            (Element::P1, LocalNode::Vertex(a)) => out.copy_from_slice(m.bary_gradient(s, a)),
            (Element::P2, LocalNode::Vertex(a)) => {
                let c = 4.0 * lambda[a] - 1.0;
                out.iter_mut().zip(m.bary_gradient(s, a)).for_each(|(o, g)| *o = c * g);
            }
            (_, LocalNode::Edge(a, b)) => {
                let (ga, gb) = (m.bary_gradient(s, a), m.bary_gradient(s, b));
                for (k, o) in out.iter_mut().enumerate() {
                    *o = 4.0 * (lambda[b] * ga[k] + lambda[a] * gb[k]);
                }
            }
        }
    }

    /// Values and first derivatives of basis function `i` at `points`.
    ///
    /// Each request is a derivative multi-index of length `dim` (all zeros
    /// for the value). The result is indexed `[point][request]`. At points
    /// shared by several simplices the lowest-index containing simplex
    /// decides; outside the support everything is exactly zero.
    pub fn evaluate(&self, i: usize, points: &[Point], requests: &[Vec<usize>]) -> Result<Vec<Vec<f64>>> {
        let n = self.dim();
        for r in requests {
            if r.len() != n {
                return Err(FemError::DimensionMismatch { expected: n, found: r.len() });
            }
            let order: usize = r.iter().sum();
            if order > 1 {
                return Err(FemError::UnsupportedDerivative(order));
            }
        }
        let f = &self.basis[i];
        let mut grad = vec![0.0; n];
        points
            .iter()
            .map(|p| {
                if p.dim() != n {
                    return Err(FemError::DimensionMismatch { expected: n, found: p.dim() });
                }
                let located = self.mesh.locate_simplex(p).and_then(|s| f.local_node(s).map(|ln| (s, ln)));
                let Some((s, ln)) = located else {
                    return Ok(vec![0.0; requests.len()]);
                };
                let lambda = self.mesh.barycentric(s, p);
                let value = self.shape_value(ln, &lambda);
                self.shape_gradient(s, ln, &lambda, &mut grad);
                Ok(requests
                    .iter()
                    .map(|r| match r.iter().position(|&k| k == 1) {
                        None => value,
                        Some(c) => grad[c],
                    })
                    .collect())
            })
            .collect()
    }

    /// Value of basis function `i` at `x`.
    pub fn value_at(&self, i: usize, x: &Point) -> f64 {
        let value = vec![0; self.dim()];
        self.evaluate(i, std::slice::from_ref(x), &[value]).map(|v| v[0][0]).unwrap_or(0.0)
    }

    /// Convex hull of all vertices of the support simplices.
    pub fn support_hull(&self, i: usize) -> ConvexPolytope {
        let verts: BTreeSet<usize> = self.basis[i]
            .support
            .iter()
            .flat_map(|&s| self.mesh.simplex(s).vertices().iter().copied())
            .collect();
        ConvexPolytope::new(verts.into_iter().map(|v| self.mesh.point(v).clone()).collect())
            .expect("mesh points share one dimension")
    }

    pub fn support_hulls(&self) -> Vec<ConvexPolytope> {
        (0..self.len()).map(|i| self.support_hull(i)).collect()
    }

    /// Nodal interpolant of `g` in dof coordinates.
    pub fn interpolate(&self, g: impl Fn(&[f64]) -> f64) -> Vec<f64> {
        self.basis.iter().map(|f| g(&f.location)).collect()
    }

    /// Lift of boundary data over all Lagrange nodes: `g` at nodes on the
    /// mesh's Dirichlet facets, zero elsewhere.
    pub fn interpolate_boundary(&self, g: impl Fn(&[f64]) -> f64) -> Vec<f64> {
        let on_boundary = self.nodes_on(&self.mesh.dirichlet_facets());
        self.node_locations
            .iter()
            .zip(on_boundary)
            .map(|(p, b)| if b { g(p) } else { 0.0 })
            .collect()
    }

    /// Flags of the Lagrange nodes lying on any of `facets`.
    pub fn nodes_on(&self, facets: &[Facet]) -> Vec<bool> {
        let mut flags = vec![false; self.num_nodes()];
        let nv = self.mesh.num_points();
        let mut edges = BTreeSet::new();
        for f in facets {
            let v = f.key();
            for &a in &v {
                flags[a] = true;
            }
            for a in 0..v.len() {
                for b in a + 1..v.len() {
                    edges.insert((v[a], v[b]));
                }
            }
        }
        if self.element == Element::P2 {
            for (k, e) in self.mesh.edges().into_iter().enumerate() {
                flags[nv + k] = edges.contains(&e);
            }
        }
        flags
    }

    /// Node values from dof coefficients, with `lift` (node values) added
    /// when given. Constrained nodes take the lift or zero.
    pub fn expand(&self, coeffs: &[f64], lift: Option<&[f64]>) -> Vec<f64> {
        let mut out = lift.map_or_else(|| vec![0.0; self.num_nodes()], <[f64]>::to_vec);
        for (f, &c) in self.basis.iter().zip(coeffs) {
            out[f.node] += c;
        }
        out
    }

    /// Σ_nodes u_node φ_node at barycentric `lambda` in simplex `s`.
    pub fn field_value(&self, node_values: &[f64], s: usize, lambda: &[f64]) -> f64 {
        self.element_nodes[s]
            .iter()
            .zip(&self.layout)
            .map(|(&g, &ln)| node_values[g] * self.shape_value(ln, lambda))
            .sum()
    }

    /// Gradient of the node-valued field on simplex `s`.
    pub fn field_gradient(&self, node_values: &[f64], s: usize, lambda: &[f64], out: &mut [f64]) {
        let mut g = vec![0.0; self.dim()];
        out.iter_mut().for_each(|o| *o = 0.0);
        for (&node, &ln) in self.element_nodes[s].iter().zip(&self.layout) {
            self.shape_gradient(s, ln, lambda, &mut g);
            out.iter_mut().zip(&g).for_each(|(o, gi)| *o += node_values[node] * gi);
        }
    }

    /// Whether two spaces live on the same mesh.
    pub fn same_mesh(&self, other: &FiniteElementSpace) -> bool {
        Arc::ptr_eq(&self.mesh, &other.mesh) || *self.mesh == *other.mesh
    }
}

/// Vector-valued space {(φ_1,0),…,(φ_N,0),(0,φ_1),…}: dof c·N + i is
/// component c of scalar function i.
#[derive(Clone, Debug)]
pub struct VectorSpace {
    scalar: FiniteElementSpace,
    components: usize,
}

impl VectorSpace {
    pub fn new(scalar: FiniteElementSpace, components: usize) -> Self {
        Self { scalar, components }
    }

    pub fn scalar(&self) -> &FiniteElementSpace {
        &self.scalar
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn len(&self) -> usize {
        self.components * self.scalar.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dof(&self, component: usize, i: usize) -> usize {
        component * self.scalar.len() + i
    }

    /// (component, scalar index) of a vector dof.
    pub fn split(&self, dof: usize) -> (usize, usize) {
        (dof / self.scalar.len(), dof % self.scalar.len())
    }

    /// Slice of `coeffs` holding one component.
    pub fn component<'a>(&self, coeffs: &'a [f64], c: usize) -> &'a [f64] {
        let n = self.scalar.len();
        &coeffs[c * n..(c + 1) * n]
    }
}

//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use femtool_core::assembly::{PointwiseForm, QuadPoint};
use femtool_core::femspace::{FiniteElementSpace, ShapeEval};
use femtool_core::geometry::ConvexPolytope;
use femtool_core::mesh::{Point, SimplicialMesh};
use microlp::{ComparisonOp, OptimizationDirection, Problem};
use rand::Rng;

/// L∞ distance between two convex hulls by linear programming:
/// min t subject to |Σ a_i u_i − Σ b_j v_j|_k ≤ t, a and b convex weights.
pub fn lp_linf_distance(u: &ConvexPolytope, v: &ConvexPolytope) -> f64 {
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let t = lp.add_var(1.0, (0.0, f64::INFINITY));
    let a: Vec<_> = u.vertices().iter().map(|_| lp.add_var(0.0, (0.0, f64::INFINITY))).collect();
    let b: Vec<_> = v.vertices().iter().map(|_| lp.add_var(0.0, (0.0, f64::INFINITY))).collect();
    for k in 0..u.dim() {
        let mut terms: Vec<_> = a.iter().zip(u.vertices()).map(|(&x, p)| (x, p[k])).collect();
        terms.extend(b.iter().zip(v.vertices()).map(|(&x, p)| (x, -p[k])));
        let mut upper = terms.clone();
        upper.push((t, -1.0));
        lp.add_constraint(upper.as_slice(), ComparisonOp::Le, 0.0);
        terms.push((t, 1.0));
        lp.add_constraint(terms.as_slice(), ComparisonOp::Ge, 0.0);
    }
    let ones = |vars: &[microlp::Variable]| vars.iter().map(|&x| (x, 1.0)).collect::<Vec<_>>();
    lp.add_constraint(ones(&a).as_slice(), ComparisonOp::Eq, 1.0);
    lp.add_constraint(ones(&b).as_slice(), ComparisonOp::Eq, 1.0);
    let sol = lp
        .solve()
        .expect("oracle LP is always feasible and bounded")
        .into_solution()
        .expect("oracle LP has no limits set");
    sol.objective().max(0.0)
}

/// Hull of 1..=n+3 points drawn in a box of half-width `radius`.
pub fn random_polytope(rng: &mut impl Rng, n: usize, centre: &[f64], radius: f64) -> ConvexPolytope {
    let count = rng.random_range(1..=n + 3);
    let vertices = (0..count)
        .map(|_| Point::new(centre.iter().map(|c| c + radius * rng.random_range(-1.0..1.0)).collect()))
        .collect();
    ConvexPolytope::new(vertices).unwrap()
}

/// Random pair with centres close enough that roughly half intersect.
pub fn random_pair(rng: &mut impl Rng, n: usize) -> (ConvexPolytope, ConvexPolytope) {
    let cu: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let cv: Vec<f64> = cu.iter().map(|c| c + rng.random_range(-1.6..1.6)).collect();
    let ru = rng.random_range(0.1..1.0);
    let rv = rng.random_range(0.1..1.0);
    (random_polytope(rng, n, &cu, ru), random_polytope(rng, n, &cv, rv))
}

/// ∫_{S_n} x^α = Π α_i! / (n + |α|)!.
pub fn monomial_integral(alpha: &[usize]) -> f64 {
    let fact = |k: usize| (2..=k).map(|j| j as f64).product::<f64>();
    let total: usize = alpha.iter().sum();
    alpha.iter().map(|&a| fact(a)).product::<f64>() / fact(alpha.len() + total)
}

/// All exponent vectors in n variables with total degree ≤ d.
pub fn multi_indices(n: usize, d: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in 0..=d {
        for mut rest in multi_indices(n - 1, d - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// 5-point Gauss–Legendre nodes and weights on [0, 1].
const GAUSS5: [(f64, f64); 5] = [
    (0.04691007703066802, 0.11846344252809471),
    (0.23076534494715845, 0.2393143352496831),
    (0.5, 0.2844444444444445),
    (0.7692346550528415, 0.2393143352496831),
    (0.9530899229693319, 0.11846344252809471),
];

/// Quadrature over a whole 1-D or 2-D mesh that shares nothing with the
/// Grundmann–Möller code: tensor Gauss–Legendre, collapsed onto triangles.
/// Exact for polynomials of degree 8 on every element.
pub struct DenseQuadrature {
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
    /// Element and barycentric coordinates of each point.
    pub simplex: Vec<usize>,
    pub bary: Vec<Vec<f64>>,
}

pub fn dense_quadrature(mesh: &SimplicialMesh) -> DenseQuadrature {
    let mut reference: Vec<(Vec<f64>, f64)> = Vec::new();
    match mesh.dim() {
        1 => reference.extend(GAUSS5.iter().map(|&(t, w)| (vec![t], w))),
        2 => {
            for &(a, wa) in &GAUSS5 {
                for &(b, wb) in &GAUSS5 {
                    reference.push((vec![a, b * (1.0 - a)], wa * wb * (1.0 - a)));
                }
            }
        }
        n => panic!("dense oracle supports dimensions 1 and 2, not {n}"),
    }
    let mut q = DenseQuadrature {
        points: Vec::new(),
        weights: Vec::new(),
        simplex: Vec::new(),
        bary: Vec::new(),
    };
    for s in 0..mesh.num_simplices() {
        let map = mesh.reference_map(s);
        for (xhat, w) in &reference {
            let x = map.apply(xhat);
            q.bary.push(mesh.barycentric(s, &x));
            q.points.push(Point::new(x));
            q.weights.push(w * map.abs_det_j());
            q.simplex.push(s);
        }
    }
    q
}

/// Value and gradient of every basis function at every oracle point, from
/// the public point-evaluation interface.
pub struct BasisSamples {
    /// `[basis][point]` = (value, gradient).
    pub data: Vec<Vec<(f64, Vec<f64>)>>,
}

impl BasisSamples {
    /// Basis functions with a nonzero value or gradient at point k.
    fn active(&self, k: usize) -> Vec<usize> {
        (0..self.data.len())
            .filter(|&i| {
                let (v, g) = &self.data[i][k];
                *v != 0.0 || g.iter().any(|&x| x != 0.0)
            })
            .collect()
    }
}

pub fn sample_basis(space: &FiniteElementSpace, q: &DenseQuadrature) -> BasisSamples {
    let n = space.dim();
    let mut requests = vec![vec![0; n]];
    for c in 0..n {
        let mut r = vec![0; n];
        r[c] = 1;
        requests.push(r);
    }
    let data = (0..space.len())
        .map(|i| {
            space
                .evaluate(i, &q.points, &requests)
                .unwrap()
                .into_iter()
                .map(|row| (row[0], row[1..].to_vec()))
                .collect()
        })
        .collect();
    BasisSamples { data }
}

fn integrand_at(form: &dyn PointwiseForm, q: &DenseQuadrature, trial: &BasisSamples, test: &BasisSamples, j: usize, i: usize, k: usize) -> f64 {
    let (uv, ug) = &trial.data[j][k];
    let (vv, vg) = &test.data[i][k];
    let at = QuadPoint {
        simplex: q.simplex[k],
        bary: &q.bary[k],
        x: q.points[k].coords(),
    };
    form.integrand(ShapeEval { value: *uv, grad: ug }, ShapeEval { value: *vv, grad: vg }, &at)
}

/// a(φ_j, φ_i) by integrating over every element of the mesh.
pub fn dense_entry(form: &dyn PointwiseForm, q: &DenseQuadrature, trial: &BasisSamples, test: &BasisSamples, j: usize, i: usize) -> f64 {
    (0..q.points.len())
        .map(|k| q.weights[k] * integrand_at(form, q, trial, test, j, i, k))
        .sum()
}

/// Full dense matrix, rows = test, columns = trial. Terms where both basis
/// samples vanish are skipped, which is exact for bilinear integrands.
pub fn dense_matrix(form: &dyn PointwiseForm, trial: &FiniteElementSpace, test: &FiniteElementSpace) -> Vec<Vec<f64>> {
    let q = dense_quadrature(trial.mesh());
    let (st, sv) = (sample_basis(trial, &q), sample_basis(test, &q));
    let mut out = vec![vec![0.0; trial.len()]; test.len()];
    for k in 0..q.points.len() {
        let (aj, ai) = (st.active(k), sv.active(k));
        for &i in &ai {
            for &j in &aj {
                out[i][j] += q.weights[k] * integrand_at(form, &q, &st, &sv, j, i, k);
            }
        }
    }
    out
}

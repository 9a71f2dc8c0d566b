//! Matrix and vector assembly.
//!
//! Entry (i, j) of an assembled matrix is a(φ_j, φ_i) with φ_j from the
//! trial space and φ_i from the test space, so rows belong to test
//! functions. Each entry is integrated only over the simplices shared by
//! both supports, and only pairs in the supplied [`SparsityPattern`] are
//! ever computed.

mod nonlinear;
mod sparse;
mod stokes;

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{FemError, Result};
use crate::femspace::{BasisFunction, FiniteElementSpace, ShapeEval};
use crate::geometry::{self, SparsityPattern};
use crate::mesh::Point;
use crate::quadrature::{self, QuadratureRule};

pub use nonlinear::NonlinearDiffusion;
pub use sparse::SparseMatrix;
pub use stokes::{assemble_stokes, StokesSystem};

/// Smallest quadrature degree used for any form.
pub const MIN_QUADRATURE_DEGREE: usize = 3;

/// Location of a quadrature node.
#[derive(Clone, Copy, Debug)]
pub struct QuadPoint<'a> {
    pub simplex: usize,
    pub bary: &'a [f64],
    pub x: &'a [f64],
}

/// Integrand of a bilinear form a(u, v) = ∫ F(u, ∇u, v, ∇v, x).
pub trait PointwiseForm: Send + Sync {
    fn integrand(&self, trial: ShapeEval<'_>, test: ShapeEval<'_>, at: &QuadPoint<'_>) -> f64;

    /// Polynomial degree of the integrand for bases of the given degrees.
    fn degree(&self, trial_degree: usize, test_degree: usize) -> usize;
}

/// ∇u·∇v.
#[derive(Clone, Copy, Debug, Default)]
pub struct GradientForm;

impl PointwiseForm for GradientForm {
    fn integrand(&self, trial: ShapeEval<'_>, test: ShapeEval<'_>, _: &QuadPoint<'_>) -> f64 {
        trial.grad.iter().zip(test.grad).map(|(a, b)| a * b).sum()
    }

    fn degree(&self, p: usize, q: usize) -> usize {
        (p - 1) + (q - 1)
    }
}

/// u·v.
#[derive(Clone, Copy, Debug, Default)]
pub struct MassForm;

impl PointwiseForm for MassForm {
    fn integrand(&self, trial: ShapeEval<'_>, test: ShapeEval<'_>, _: &QuadPoint<'_>) -> f64 {
        trial.value * test.value
    }

    fn degree(&self, p: usize, q: usize) -> usize {
        p + q
    }
}

type FormFn = dyn Fn(ShapeEval<'_>, ShapeEval<'_>, &QuadPoint<'_>) -> f64 + Send + Sync;

/// Form from a closure with a caller-declared integrand degree.
#[derive(Clone)]
pub struct GenericForm {
    integrand: Arc<FormFn>,
    degree: usize,
}

impl GenericForm {
    pub fn new(
        degree: usize,
        integrand: impl Fn(ShapeEval<'_>, ShapeEval<'_>, &QuadPoint<'_>) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            integrand: Arc::new(integrand),
            degree,
        }
    }
}

impl fmt::Debug for GenericForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GenericForm").field("degree", &self.degree).finish_non_exhaustive()
    }
}

impl PointwiseForm for GenericForm {
    fn integrand(&self, trial: ShapeEval<'_>, test: ShapeEval<'_>, at: &QuadPoint<'_>) -> f64 {
        (self.integrand)(trial, test, at)
    }

    fn degree(&self, _: usize, _: usize) -> usize {
        self.degree
    }
}

/// Quadrature choice shared by all assembly routines.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct AssemblyOptions {
    /// Fixed odd quadrature degree; otherwise the declared integrand degree
    /// rounded up to odd, at least [`MIN_QUADRATURE_DEGREE`].
    pub quadrature_degree: Option<usize>,
}

impl AssemblyOptions {
    pub fn with_degree(degree: usize) -> Self {
        Self {
            quadrature_degree: Some(degree),
        }
    }

    /// Rule for an integrand of the declared degree in dimension `n`.
    pub fn rule(&self, n: usize, declared: usize) -> Result<Arc<QuadratureRule>> {
        match self.quadrature_degree {
            Some(d) if d % 2 == 0 => Err(FemError::Quadrature {
                dim: n,
                degree: d,
                reason: "Grundmann–Möller degrees are odd".into(),
            }),
            Some(d) => quadrature::rule_for_degree(n, d),
            None => quadrature::rule_for_degree(n, declared.max(MIN_QUADRATURE_DEGREE)),
        }
    }
}

/// Simplices in both supports, increasing.
pub fn common_support(u: &BasisFunction, v: &BasisFunction) -> Vec<usize> {
    let (a, b) = (u.support(), v.support());
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// Geometric sparsity pattern between two spaces on one mesh.
pub fn support_pattern(trial: &FiniteElementSpace, test: &FiniteElementSpace) -> Result<SparsityPattern> {
    geometry::sparsity_pattern(&trial.support_hulls(), &test.support_hulls())
}

fn check_same_mesh(trial: &FiniteElementSpace, test: &FiniteElementSpace) -> Result<()> {
    if trial.same_mesh(test) {
        Ok(())
    } else {
        Err(FemError::InvalidArgument("trial and test spaces live on different meshes".into()))
    }
}

/// a(φ_trial, φ_test) over the common support with a fixed rule.
pub fn bilinear_entry<F: PointwiseForm + ?Sized>(
    form: &F,
    trial: &FiniteElementSpace,
    test: &FiniteElementSpace,
    trial_index: usize,
    test_index: usize,
    rule: &QuadratureRule,
) -> f64 {
    let mesh = trial.mesh();
    let n = mesh.dim();
    let fu = trial.basis_function(trial_index);
    let fv = test.basis_function(test_index);
    let mut x = vec![0.0; n];
    let mut gu = vec![0.0; n];
    let mut gv = vec![0.0; n];
    let mut total = 0.0;
    for s in common_support(fu, fv) {
        let (lu, lv) = (
            fu.local_node(s).expect("s is in the support"),
            fv.local_node(s).expect("s is in the support"),
        );
        let mut local = 0.0;
        for (k, &w) in rule.weights().iter().enumerate() {
            let lambda = rule.node(k);
            mesh.from_barycentric(s, lambda, &mut x);
            trial.shape_gradient(s, lu, lambda, &mut gu);
            test.shape_gradient(s, lv, lambda, &mut gv);
            let u = ShapeEval {
                value: trial.shape_value(lu, lambda),
                grad: &gu,
            };
            let v = ShapeEval {
                value: test.shape_value(lv, lambda),
                grad: &gv,
            };
            local += w * form.integrand(
                u,
                v,
                &QuadPoint {
                    simplex: s,
                    bary: lambda,
                    x: &x,
                },
            );
        }
        total += mesh.reference_map(s).abs_det_j() * local;
    }
    total
}

/// Matrix with entry (test i, trial j) = a(φ_j, φ_i) for every pattern pair.
pub fn assemble_bilinear<F: PointwiseForm + ?Sized>(
    form: &F,
    trial: &FiniteElementSpace,
    test: &FiniteElementSpace,
    pattern: &SparsityPattern,
    options: &AssemblyOptions,
) -> Result<SparseMatrix> {
    check_same_mesh(trial, test)?;
    if pattern.n_trial() != trial.len() || pattern.n_test() != test.len() {
        return Err(FemError::DimensionMismatch {
            expected: trial.len() * test.len(),
            found: pattern.n_trial() * pattern.n_test(),
        });
    }
    let rule = options.rule(trial.dim(), form.degree(trial.degree(), test.degree()))?;
    let triplets: Vec<(usize, usize, f64)> = pattern
        .pairs()
        .par_iter()
        .map(|&(j, i)| (i, j, bilinear_entry(form, trial, test, j, i, &rule)))
        .collect();
    SparseMatrix::from_triplets(test.len(), trial.len(), triplets)
}

type SourceFn = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// Right-hand side functional ℓ(v).
#[derive(Clone)]
pub enum LinearFunctional {
    /// ∫ f v, with `degree` the polynomial degree declared for f.
    L2Load { f: Arc<SourceFn>, degree: usize },
    /// M·v(p).
    PointLoad { magnitude: f64, location: Point },
}

impl LinearFunctional {
    pub fn l2(degree: usize, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Self::L2Load {
            f: Arc::new(f),
            degree,
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::l2(0, move |_| c)
    }

    pub fn point(magnitude: f64, location: impl Into<Point>) -> Self {
        Self::PointLoad {
            magnitude,
            location: location.into(),
        }
    }
}

impl fmt::Debug for LinearFunctional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::L2Load { degree, .. } => f.debug_struct("L2Load").field("degree", degree).finish_non_exhaustive(),
            Self::PointLoad { magnitude, location } => f
                .debug_struct("PointLoad")
                .field("magnitude", magnitude)
                .field("location", location)
                .finish(),
        }
    }
}

/// Vector b_i = ℓ(φ_i) over the test space.
pub fn assemble_linear(
    functional: &LinearFunctional,
    test: &FiniteElementSpace,
    options: &AssemblyOptions,
) -> Result<Vec<f64>> {
    let mesh = test.mesh();
    match functional {
        LinearFunctional::L2Load { f, degree } => {
            let rule = options.rule(test.dim(), degree + test.degree())?;
            let mut x = vec![0.0; mesh.dim()];
            Ok(test
                .basis()
                .iter()
                .map(|phi| {
                    phi.support()
                        .iter()
                        .map(|&s| {
                            let ln = phi.local_node(s).expect("s is in the support");
                            let sum: f64 = (0..rule.len())
                                .map(|k| {
                                    let lambda = rule.node(k);
                                    mesh.from_barycentric(s, lambda, &mut x);
                                    rule.weights()[k] * f(&x) * test.shape_value(ln, lambda)
                                })
                                .sum();
                            mesh.reference_map(s).abs_det_j() * sum
                        })
                        .sum()
                })
                .collect())
        }
        LinearFunctional::PointLoad { magnitude, location } => {
            if location.dim() != mesh.dim() {
                return Err(FemError::DimensionMismatch {
                    expected: mesh.dim(),
                    found: location.dim(),
                });
            }
            let s = mesh
                .locate_simplex(location)
                .ok_or_else(|| FemError::PointOutsideMesh(location.coords().to_vec()))?;
            let lambda = mesh.barycentric(s, location);
            let mut b = vec![0.0; test.len()];
            for (&node, &ln) in test.element_nodes(s).iter().zip(test.local_layout()) {
                if let Some(dof) = test.dof_of_node(node) {
                    b[dof] = magnitude * test.shape_value(ln, &lambda);
                }
            }
            Ok(b)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::femspace::build_p1_space;
    use crate::mesh::uniform_interval_mesh;

    fn interval_space() -> FiniteElementSpace {
        let m = Arc::new(uniform_interval_mesh((0.0, 1.0), 0.25).unwrap());
        build_p1_space(m.clone(), m.boundary_facets()).unwrap()
    }

    #[test]
    fn one_dimensional_stencils() {
        let space = interval_space();
        let pattern = support_pattern(&space, &space).unwrap();
        assert_eq!(pattern.len(), 7);
        let opts = AssemblyOptions::default();
        let k = assemble_bilinear(&GradientForm, &space, &space, &pattern, &opts).unwrap();
        assert!((k.get(1, 1) - 8.0).abs() < 1e-12);
        assert!((k.get(0, 1) + 4.0).abs() < 1e-12);
        assert!(!k.contains(0, 2));
        let m = assemble_bilinear(&MassForm, &space, &space, &pattern, &opts).unwrap();
        assert!((m.get(1, 1) - 1.0 / 6.0).abs() < 1e-14);
        assert!((m.get(1, 2) - 1.0 / 24.0).abs() < 1e-14);
    }

    #[test]
    fn zero_form_keeps_structure() {
        let space = interval_space();
        let pattern = support_pattern(&space, &space).unwrap();
        let zero = GenericForm::new(0, |_, _, _| 0.0);
        let a = assemble_bilinear(&zero, &space, &space, &pattern, &AssemblyOptions::default()).unwrap();
        assert_eq!(a.nnz(), 7);
        assert!(a.triplets().all(|(_, _, v)| v == 0.0));
    }

    #[test]
    fn loads() {
        let space = interval_space();
        let opts = AssemblyOptions::default();
        let b = assemble_linear(&LinearFunctional::constant(1.0), &space, &opts).unwrap();
        assert!(b.iter().all(|&v| (v - 0.25).abs() < 1e-14));
        let p = assemble_linear(&LinearFunctional::point(1.0, [0.5]), &space, &opts).unwrap();
        assert_eq!(p, vec![0.0, 1.0, 0.0]);
        assert!(matches!(
            assemble_linear(&LinearFunctional::point(1.0, [2.0]), &space, &opts),
            Err(FemError::PointOutsideMesh(_))
        ));
    }

    #[test]
    fn even_override_rejected() {
        assert!(AssemblyOptions::with_degree(4).rule(2, 1).is_err());
        assert_eq!(AssemblyOptions::default().rule(2, 0).unwrap().degree(), 3);
    }
}

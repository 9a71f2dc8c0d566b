//! Residual and Jacobian of −Δu + u³ = f.

use std::fmt;
use std::sync::Arc;

use super::{assemble_bilinear, AssemblyOptions, PointwiseForm, QuadPoint, SparseMatrix};
use crate::error::{FemError, Result};
use crate::femspace::{FiniteElementSpace, ShapeEval};
use crate::geometry::SparsityPattern;

type SourceFn = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// Weak form ∫ ∇u·∇v + u³v − f v on a constrained scalar space.
#[derive(Clone)]
pub struct NonlinearDiffusion {
    source: Arc<SourceFn>,
    source_degree: usize,
}

impl fmt::Debug for NonlinearDiffusion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NonlinearDiffusion")
            .field("source_degree", &self.source_degree)
            .finish_non_exhaustive()
    }
}

impl NonlinearDiffusion {
    /// `source_degree` is the polynomial degree declared for f.
    pub fn new(source_degree: usize, source: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            source: Arc::new(source),
            source_degree,
        }
    }

    fn check(&self, space: &FiniteElementSpace, u: &[f64]) -> Result<()> {
        if u.len() == space.len() {
            Ok(())
        } else {
            Err(FemError::DimensionMismatch {
                expected: space.len(),
                found: u.len(),
            })
        }
    }

    /// F_i(u) = ∫ ∇u_h·∇φ_i + u_h³ φ_i − f φ_i with u_h = Σ u_j φ_j.
    pub fn residual(&self, space: &FiniteElementSpace, u: &[f64], options: &AssemblyOptions) -> Result<Vec<f64>> {
        self.check(space, u)?;
        let p = space.degree();
        let rule = options.rule(space.dim(), (4 * p).max(self.source_degree + p))?;
        let mesh = space.mesh();
        let n = mesh.dim();
        let nodes = space.expand(u, None);
        let mut out = vec![0.0; space.len()];
        let mut x = vec![0.0; n];
        let mut grad_u = vec![0.0; n];
        let mut grad_phi = vec![0.0; n];
        for s in 0..mesh.num_simplices() {
            let det = mesh.reference_map(s).abs_det_j();
            for (k, &w) in rule.weights().iter().enumerate() {
                let lambda = rule.node(k);
                mesh.from_barycentric(s, lambda, &mut x);
                let uh = space.field_value(&nodes, s, lambda);
                space.field_gradient(&nodes, s, lambda, &mut grad_u);
                let f = (self.source)(&x);
                for (&node, &ln) in space.element_nodes(s).iter().zip(space.local_layout()) {
                    let Some(dof) = space.dof_of_node(node) else { continue };
                    let phi = space.shape_value(ln, lambda);
                    space.shape_gradient(s, ln, lambda, &mut grad_phi);
                    let diffusion: f64 = grad_u.iter().zip(&grad_phi).map(|(a, b)| a * b).sum();
                    out[dof] += det * w * (diffusion + (uh.powi(3) - f) * phi);
                }
            }
        }
        Ok(out)
    }

    /// J_ij = ∫ ∇φ_j·∇φ_i + 3u_h² φ_j φ_i on the given pattern.
    pub fn jacobian(
        &self,
        space: &FiniteElementSpace,
        pattern: &SparsityPattern,
        u: &[f64],
        options: &AssemblyOptions,
    ) -> Result<SparseMatrix> {
        self.check(space, u)?;
        let form = JacobianForm {
            space,
            nodes: space.expand(u, None),
        };
        assemble_bilinear(&form, space, space, pattern, options)
    }
}

struct JacobianForm<'a> {
    space: &'a FiniteElementSpace,
    nodes: Vec<f64>,
}

impl PointwiseForm for JacobianForm<'_> {
    fn integrand(&self, trial: ShapeEval<'_>, test: ShapeEval<'_>, at: &QuadPoint<'_>) -> f64 {
        let uh = self.space.field_value(&self.nodes, at.simplex, at.bary);
        let diffusion: f64 = trial.grad.iter().zip(test.grad).map(|(a, b)| a * b).sum();
        diffusion + 3.0 * uh * uh * trial.value * test.value
    }

    fn degree(&self, p: usize, q: usize) -> usize {
        2 * p + p + q
    }
}

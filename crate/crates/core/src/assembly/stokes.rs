//! Taylor–Hood block system for the Stokes equations.

use super::{assemble_bilinear, support_pattern, AssemblyOptions, GradientForm, PointwiseForm, QuadPoint, SparseMatrix};
use crate::error::{FemError, Result};
use crate::femspace::{FiniteElementSpace, ShapeEval, VectorSpace};

/// Blocks of [A Bᵀ; B 0][u; p] = [f; g] for the homogeneous velocity
/// correction u, with the boundary lift moved to the right-hand side.
#[derive(Clone, Debug)]
pub struct StokesSystem {
    pub a: SparseMatrix,
    pub b: SparseMatrix,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
}

/// −ψ ∂_c φ.
struct DivergenceForm {
    component: usize,
}

impl PointwiseForm for DivergenceForm {
    fn integrand(&self, trial: ShapeEval<'_>, test: ShapeEval<'_>, _: &QuadPoint<'_>) -> f64 {
        -test.value * trial.grad[self.component]
    }

    fn degree(&self, p: usize, q: usize) -> usize {
        (p - 1) + q
    }
}

/// Assembles the Stokes blocks.
///
/// `velocity` is the constrained vector space, `velocity_full` the
/// unconstrained scalar space of the same element and `lift` the boundary
/// node values of each component, stacked: `lift[c·N + node]`.
pub fn assemble_stokes(
    velocity: &VectorSpace,
    velocity_full: &FiniteElementSpace,
    pressure: &FiniteElementSpace,
    lift: &[f64],
    options: &AssemblyOptions,
) -> Result<StokesSystem> {
    let v = velocity.scalar();
    let nc = velocity.components();
    if !v.same_mesh(pressure) || !v.same_mesh(velocity_full) {
        return Err(FemError::InvalidArgument("velocity and pressure spaces use different meshes".into()));
    }
    if velocity_full.is_constrained() || velocity_full.len() != velocity_full.num_nodes() {
        return Err(FemError::InvalidArgument("the lifting space must be unconstrained".into()));
    }
    let n_full = velocity_full.len();
    if lift.len() != nc * n_full {
        return Err(FemError::DimensionMismatch {
            expected: nc * n_full,
            found: lift.len(),
        });
    }

    let vv = support_pattern(v, v)?;
    let fv = support_pattern(velocity_full, v)?;
    let vp = support_pattern(v, pressure)?;
    let fp = support_pattern(velocity_full, pressure)?;

    let k = assemble_bilinear(&GradientForm, v, v, &vv, options)?;
    let k_lift = assemble_bilinear(&GradientForm, velocity_full, v, &fv, options)?;
    let n = v.len();
    let mut a_triplets = Vec::with_capacity(nc * k.nnz());
    let mut f = Vec::with_capacity(nc * n);
    let mut b_triplets = Vec::new();
    let mut g = vec![0.0; pressure.len()];
    for c in 0..nc {
        a_triplets.extend(k.triplets().map(|(i, j, x)| (c * n + i, c * n + j, x)));
        let lift_c = &lift[c * n_full..(c + 1) * n_full];
        f.extend(k_lift.mul_vec(lift_c).into_iter().map(|x| -x));

        let div = DivergenceForm { component: c };
        let b_c = assemble_bilinear(&div, v, pressure, &vp, options)?;
        b_triplets.extend(b_c.triplets().map(|(i, j, x)| (i, c * n + j, x)));
        let b_full = assemble_bilinear(&div, velocity_full, pressure, &fp, options)?;
        for (gi, x) in g.iter_mut().zip(b_full.mul_vec(lift_c)) {
            *gi -= x;
        }
    }
    Ok(StokesSystem {
        a: SparseMatrix::from_triplets(nc * n, nc * n, a_triplets)?,
        b: SparseMatrix::from_triplets(pressure.len(), nc * n, b_triplets)?,
        f,
        g,
    })
}

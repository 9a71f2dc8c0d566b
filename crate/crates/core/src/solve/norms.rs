//! Error norms of finite element fields against exact solutions.

use crate::error::{FemError, Result};
use crate::femspace::FiniteElementSpace;
use crate::quadrature;

/// Degree of the extra quadrature nodes sampled by the L∞ estimate.
pub const LINF_SAMPLE_DEGREE: usize = 7;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Norm {
    /// Elementwise quadrature of (u_h − u)².
    L2,
    /// Maximum over all Lagrange nodes and degree-7 quadrature nodes.
    Linf,
}

/// ‖u_h − u‖ for u_h given by dof coefficients (constrained nodes are 0).
pub fn error_norm(space: &FiniteElementSpace, coeffs: &[f64], exact: impl Fn(&[f64]) -> f64, norm: Norm) -> Result<f64> {
    if coeffs.len() != space.len() {
        return Err(FemError::DimensionMismatch {
            expected: space.len(),
            found: coeffs.len(),
        });
    }
    nodal_error_norm(space, &space.expand(coeffs, None), exact, norm)
}

/// ‖u_h − u‖ for u_h given by values at all Lagrange nodes.
pub fn nodal_error_norm(
    space: &FiniteElementSpace,
    nodes: &[f64],
    exact: impl Fn(&[f64]) -> f64,
    norm: Norm,
) -> Result<f64> {
    check_nodes(space, nodes)?;
    match norm {
        Norm::L2 => Ok(error_moments(space, nodes, &exact)?.1.max(0.0).sqrt()),
        Norm::Linf => {
            let mesh = space.mesh();
            let mut worst = space
                .node_locations()
                .iter()
                .zip(nodes)
                .map(|(p, v)| (v - exact(p)).abs())
                .fold(0.0, f64::max);
            let rule = quadrature::rule_for_degree(mesh.dim(), LINF_SAMPLE_DEGREE)?;
            let mut x = vec![0.0; mesh.dim()];
            for s in 0..mesh.num_simplices() {
                for lambda in rule.nodes() {
                    mesh.from_barycentric(s, lambda, &mut x);
                    worst = worst.max((space.field_value(nodes, s, lambda) - exact(&x)).abs());
                }
            }
            Ok(worst)
        }
    }
}

/// L2 norm of e − ē where ē is the mean of e = u_h − u over the domain.
/// Compares fields that are only defined up to a constant.
pub fn mean_free_l2_error(space: &FiniteElementSpace, nodes: &[f64], exact: impl Fn(&[f64]) -> f64) -> Result<f64> {
    check_nodes(space, nodes)?;
    let (integral, square) = error_moments(space, nodes, &exact)?;
    let volume = space.mesh().total_volume();
    Ok((square - integral * integral / volume).max(0.0).sqrt())
}

fn check_nodes(space: &FiniteElementSpace, nodes: &[f64]) -> Result<()> {
    if nodes.len() == space.num_nodes() {
        Ok(())
    } else {
        Err(FemError::DimensionMismatch {
            expected: space.num_nodes(),
            found: nodes.len(),
        })
    }
}

/// (∫e, ∫e²) with e = u_h − u.
fn error_moments(space: &FiniteElementSpace, nodes: &[f64], exact: &impl Fn(&[f64]) -> f64) -> Result<(f64, f64)> {
    let mesh = space.mesh();
    let rule = quadrature::rule_for_degree(mesh.dim(), (2 * space.degree() + 3).max(5))?;
    let mut x = vec![0.0; mesh.dim()];
    let (mut first, mut second) = (0.0, 0.0);
    for s in 0..mesh.num_simplices() {
        let det = mesh.reference_map(s).abs_det_j();
        let (mut a, mut b) = (0.0, 0.0);
        for (k, lambda) in rule.nodes().enumerate() {
            mesh.from_barycentric(s, lambda, &mut x);
            let e = space.field_value(nodes, s, lambda) - exact(&x);
            a += rule.weights()[k] * e;
            b += rule.weights()[k] * e * e;
        }
        first += det * a;
        second += det * b;
    }
    Ok((first, second))
}

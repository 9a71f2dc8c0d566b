//! Saddle-point systems [A Bᵀ; B 0][u; p] = [f; g].

use std::time::Instant;

use super::linear::{norm, residual, LinearSolver, SolveReport, SparseLu};
use crate::assembly::SparseMatrix;
use crate::error::{FemError, Result};

/// Solution of a saddle-point system.
#[derive(Clone, Debug, PartialEq)]
pub struct SaddleSolution {
    pub velocity: Vec<f64>,
    pub pressure: Vec<f64>,
    pub report: SolveReport,
}

/// Solves the block system with the default sparse direct solver.
///
/// The constant pressure mode is removed by pinning pressure dof 0 to zero;
/// afterwards p is shifted to zero mean, weighted by `mean_weights`
/// (typically ∫ψ_k) or uniformly when `None`.
pub fn solve_saddle(
    a: &SparseMatrix,
    b: &SparseMatrix,
    f: &[f64],
    g: &[f64],
    mean_weights: Option<&[f64]>,
) -> Result<SaddleSolution> {
    solve_saddle_with(&SparseLu::default(), a, b, f, g, mean_weights)
}

pub fn solve_saddle_with(
    solver: &dyn LinearSolver,
    a: &SparseMatrix,
    b: &SparseMatrix,
    f: &[f64],
    g: &[f64],
    mean_weights: Option<&[f64]>,
) -> Result<SaddleSolution> {
    let start = Instant::now();
    let nu = a.nrows();
    let np = b.nrows();
    let mismatch = |expected, found| FemError::DimensionMismatch { expected, found };
    if a.ncols() != nu || b.ncols() != nu {
        return Err(mismatch(nu, b.ncols()));
    }
    if f.len() != nu {
        return Err(mismatch(nu, f.len()));
    }
    if g.len() != np {
        return Err(mismatch(np, g.len()));
    }
    if let Some(w) = mean_weights {
        if w.len() != np {
            return Err(mismatch(np, w.len()));
        }
    }
    if np == 0 {
        let r = solver.solve(a, f)?;
        return Ok(SaddleSolution {
            velocity: r.solution.clone(),
            pressure: Vec::new(),
            report: r,
        });
    }

    // Unknowns: u (nu), then p_1..p_{np-1}; pressure 0 is pinned.
    let p_index = |k: usize| nu + k - 1;
    let mut t: Vec<(usize, usize, f64)> = a.triplets().collect();
    for (k, j, v) in b.triplets() {
        if k == 0 {
            continue;
        }
        t.push((p_index(k), j, v));
        t.push((j, p_index(k), v));
    }
    let n = nu + np - 1;
    let k_mat = SparseMatrix::from_triplets(n, n, t)?;
    let rhs: Vec<f64> = f.iter().chain(&g[1..]).copied().collect();
    let report = solver.solve(&k_mat, &rhs)?;

    let velocity = report.solution[..nu].to_vec();
    let mut pressure = Vec::with_capacity(np);
    pressure.push(0.0);
    pressure.extend_from_slice(&report.solution[nu..]);

    // The pinned row of B was dropped. A compatible system satisfies it
    // anyway; otherwise g has a component outside the range of B.
    let full_res = {
        let mut r = residual(a, &velocity, f);
        let bt = b.transpose().mul_vec(&pressure);
        r.iter_mut().zip(bt).for_each(|(ri, x)| *ri += x);
        r.extend(residual(b, &velocity, g));
        norm(&r)
    };
    let bnorm = norm(f).hypot(norm(g));
    if full_res > super::RESIDUAL_TOLERANCE * (1.0 + bnorm) {
        return Err(FemError::InvalidArgument(format!(
            "saddle system is incompatible: residual {full_res:.3e} after pinning the constant pressure mode"
        )));
    }

    let mean = match mean_weights {
        Some(w) => {
            let total: f64 = w.iter().sum();
            pressure.iter().zip(w).map(|(p, wi)| p * wi).sum::<f64>() / total
        }
        None => pressure.iter().sum::<f64>() / np as f64,
    };
    pressure.iter_mut().for_each(|p| *p -= mean);
    Ok(SaddleSolution {
        velocity,
        pressure,
        report: SolveReport {
            residual: full_res,
            wall_time: start.elapsed(),
            ..report
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn homogeneous_data_gives_zero() {
        let a = SparseMatrix::from_triplets(2, 2, vec![(0, 0, 2.0), (1, 1, 2.0)]).unwrap();
        let b = SparseMatrix::from_triplets(2, 2, vec![(0, 0, 1.0), (0, 1, -1.0), (1, 0, -1.0), (1, 1, 1.0)]).unwrap();
        let s = solve_saddle(&a, &b, &[0.0, 0.0], &[0.0, 0.0], None).unwrap();
        assert_eq!(s.velocity, vec![0.0, 0.0]);
        assert!(s.pressure.iter().all(|p| p.abs() < 1e-15));
    }
}

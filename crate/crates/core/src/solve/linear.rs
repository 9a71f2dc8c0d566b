//! Linear solvers behind a common trait.

use std::sync::Arc;
use std::time::{Duration, Instant};

use faer::prelude::*;
use faer::sparse::{SparseColMat, Triplet};
use nalgebra::DVector;

use crate::assembly::SparseMatrix;
use crate::error::{FemError, Result};
use crate::registry::Registry;

/// Residual contract: ‖Ax − b‖₂ ≤ RESIDUAL_TOLERANCE·(1 + ‖b‖₂).
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;

/// Outcome of a solve.
#[derive(Clone, Debug, PartialEq)]
pub struct SolveReport {
    pub solution: Vec<f64>,
    pub iterations: usize,
    /// Final residual 2-norm.
    pub residual: f64,
    /// Residual norm after each iteration (Newton) or refinement step.
    pub residual_history: Vec<f64>,
    pub wall_time: Duration,
}

pub trait LinearSolver: Send + Sync {
    fn name(&self) -> &'static str;
    fn solve(&self, a: &SparseMatrix, b: &[f64]) -> Result<SolveReport>;
}

/// Registry of the built-in linear solvers.
pub fn linear_solvers() -> Registry<dyn LinearSolver> {
    let mut r: Registry<dyn LinearSolver> = Registry::new("linear solver");
    r.register("direct", Arc::new(SparseLu::default()));
    r.register("cg", Arc::new(ConjugateGradient::default()));
    r.register("dense", Arc::new(DenseLu));
    r
}

/// Solves with the default sparse direct solver.
pub fn solve_linear(a: &SparseMatrix, b: &[f64]) -> Result<SolveReport> {
    SparseLu::default().solve(a, b)
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub(crate) fn residual(a: &SparseMatrix, x: &[f64], b: &[f64]) -> Vec<f64> {
    a.mul_vec(x).iter().zip(b).map(|(ax, bi)| ax - bi).collect()
}

fn check_shape(a: &SparseMatrix, b: &[f64]) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(FemError::DimensionMismatch {
            expected: a.nrows(),
            found: a.ncols(),
        });
    }
    if b.len() != a.nrows() {
        return Err(FemError::DimensionMismatch {
            expected: a.nrows(),
            found: b.len(),
        });
    }
    Ok(())
}

/// Sparse LU (faer) followed by iterative refinement.
#[derive(Clone, Debug)]
pub struct SparseLu {
    pub max_refinements: usize,
}

impl Default for SparseLu {
    fn default() -> Self {
        Self { max_refinements: 3 }
    }
}

impl LinearSolver for SparseLu {
    fn name(&self) -> &'static str {
        "direct"
    }

    fn solve(&self, a: &SparseMatrix, b: &[f64]) -> Result<SolveReport> {
        check_shape(a, b)?;
        let start = Instant::now();
        let n = a.nrows();
        let bnorm = norm(b);
        if n == 0 || bnorm == 0.0 {
            return Ok(SolveReport {
                solution: vec![0.0; n],
                iterations: 0,
                residual: 0.0,
                residual_history: vec![0.0],
                wall_time: start.elapsed(),
            });
        }
        let triplets: Vec<Triplet<usize, usize, f64>> = a.triplets().map(|(i, j, v)| Triplet::new(i, j, v)).collect();
        let mat = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &triplets)
            .map_err(|e| FemError::InvalidArgument(format!("sparse matrix construction failed: {e:?}")))?;
        let lu = mat.sp_lu().map_err(|_| FemError::SingularMatrix)?;
        let solve = |rhs: &[f64]| -> Vec<f64> {
            let col = Mat::<f64>::from_fn(n, 1, |i, _| rhs[i]);
            let x = lu.solve(&col);
            (0..n).map(|i| x[(i, 0)]).collect()
        };

        let mut x = solve(b);
        let tol = RESIDUAL_TOLERANCE * (1.0 + bnorm);
        let mut r = residual(a, &x, b);
        let mut history = vec![norm(&r)];
        let mut steps = 0;
        while history[steps] > tol && steps < self.max_refinements && history[steps].is_finite() {
            let dx = solve(&r);
            x.iter_mut().zip(&dx).for_each(|(xi, d)| *xi -= d);
            r = residual(a, &x, b);
            history.push(norm(&r));
            steps += 1;
        }
        let res = history[steps];
        if !res.is_finite() || x.iter().any(|v| !v.is_finite()) {
            return Err(FemError::SingularMatrix);
        }
        if res > tol {
            return Err(FemError::NotConverged {
                solver: self.name(),
                iterations: steps,
                residual: res,
            });
        }
        Ok(SolveReport {
            solution: x,
            iterations: steps,
            residual: res,
            residual_history: history,
            wall_time: start.elapsed(),
        })
    }
}

/// Jacobi-preconditioned conjugate gradients for symmetric positive
/// definite systems.
#[derive(Clone, Debug)]
pub struct ConjugateGradient {
    /// Relative residual tolerance ‖r‖ ≤ tol·‖b‖.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for ConjugateGradient {
    fn default() -> Self {
        Self {
            tolerance: 1e-12,
            max_iterations: 100_000,
        }
    }
}

impl LinearSolver for ConjugateGradient {
    fn name(&self) -> &'static str {
        "cg"
    }

    fn solve(&self, a: &SparseMatrix, b: &[f64]) -> Result<SolveReport> {
        check_shape(a, b)?;
        let start = Instant::now();
        let n = a.nrows();
        let dot = |u: &[f64], v: &[f64]| u.iter().zip(v).map(|(x, y)| x * y).sum::<f64>();
        let inv_diag: Vec<f64> = a
            .diagonal()
            .iter()
            .map(|&d| if d > 0.0 { 1.0 / d } else { 1.0 })
            .collect();
        let bnorm = norm(b);
        let tol = (self.tolerance * bnorm).min(RESIDUAL_TOLERANCE * (1.0 + bnorm));
        let mut x = vec![0.0; n];
        let mut r = b.to_vec();
        let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(ri, d)| ri * d).collect();
        let mut p = z.clone();
        let mut rz = dot(&r, &z);
        let mut history = vec![bnorm];
        for it in 0..self.max_iterations {
            let rnorm = norm(&r);
            if rnorm <= tol {
                // Recompute to guard against drift of the recursive residual.
                let true_res = norm(&residual(a, &x, b));
                if true_res <= RESIDUAL_TOLERANCE * (1.0 + bnorm) {
                    return Ok(SolveReport {
                        solution: x,
                        iterations: it,
                        residual: true_res,
                        residual_history: history,
                        wall_time: start.elapsed(),
                    });
                }
                r = residual(a, &x, b).iter().map(|v| -v).collect();
            }
            let ap = a.mul_vec(&p);
            let pap = dot(&p, &ap);
            if pap <= 0.0 || !pap.is_finite() {
                return Err(FemError::SingularMatrix);
            }
            let alpha = rz / pap;
            x.iter_mut().zip(&p).for_each(|(xi, pi)| *xi += alpha * pi);
            r.iter_mut().zip(&ap).for_each(|(ri, api)| *ri -= alpha * api);
            z = r.iter().zip(&inv_diag).map(|(ri, d)| ri * d).collect();
            let rz_new = dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            p.iter_mut().zip(&z).for_each(|(pi, zi)| *pi = zi + beta * *pi);
            history.push(norm(&r));
        }
        Err(FemError::NotConverged {
            solver: self.name(),
            iterations: self.max_iterations,
            residual: norm(&r),
        })
    }
}

/// Dense LU with partial pivoting; for small systems and cross-checks.
#[derive(Clone, Copy, Debug, Default)]
pub struct DenseLu;

impl LinearSolver for DenseLu {
    fn name(&self) -> &'static str {
        "dense"
    }

    fn solve(&self, a: &SparseMatrix, b: &[f64]) -> Result<SolveReport> {
        check_shape(a, b)?;
        let start = Instant::now();
        let x = a
            .to_dense()
            .lu()
            .solve(&DVector::from_column_slice(b))
            .ok_or(FemError::SingularMatrix)?;
        let x: Vec<f64> = x.iter().copied().collect();
        let res = norm(&residual(a, &x, b));
        if !res.is_finite() {
            return Err(FemError::SingularMatrix);
        }
        if res > RESIDUAL_TOLERANCE * (1.0 + norm(b)) {
            return Err(FemError::NotConverged {
                solver: self.name(),
                iterations: 0,
                residual: res,
            });
        }
        Ok(SolveReport {
            solution: x,
            iterations: 0,
            residual: res,
            residual_history: vec![res],
            wall_time: start.elapsed(),
        })
    }
}

//! Undamped Newton iteration.

use std::sync::Arc;
use std::time::Instant;

use super::linear::{norm, LinearSolver, SolveReport, SparseLu};
use crate::assembly::SparseMatrix;
use crate::error::{FemError, Result};

/// Consecutive residual increases treated as divergence.
pub const DIVERGENCE_STEPS: usize = 5;

#[derive(Clone)]
pub struct NewtonOptions {
    /// Stop when ‖F(x)‖₂ ≤ tolerance.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub linear_solver: Arc<dyn LinearSolver>,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            max_iterations: 50,
            linear_solver: Arc::new(SparseLu::default()),
        }
    }
}

impl std::fmt::Debug for NewtonOptions {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("NewtonOptions")
            .field("tolerance", &self.tolerance)
            .field("max_iterations", &self.max_iterations)
            .field("linear_solver", &self.linear_solver.name())
            .finish()
    }
}

/// x_{k+1} = x_k − J(x_k)⁻¹ F(x_k) until ‖F‖₂ ≤ tolerance.
///
/// `residual_history[k]` is ‖F(x_k)‖₂, starting with the initial guess.
pub fn solve_newton(
    residual: impl Fn(&[f64]) -> Result<Vec<f64>>,
    jacobian: impl Fn(&[f64]) -> Result<SparseMatrix>,
    x0: &[f64],
    options: &NewtonOptions,
) -> Result<SolveReport> {
    let start = Instant::now();
    let mut x = x0.to_vec();
    let mut f = residual(&x)?;
    if f.len() != x.len() {
        return Err(FemError::DimensionMismatch {
            expected: x.len(),
            found: f.len(),
        });
    }
    let mut history = vec![norm(&f)];
    let mut growth = 0;
    for it in 0..=options.max_iterations {
        let current = history[it];
        if current <= options.tolerance {
            return Ok(SolveReport {
                solution: x,
                iterations: it,
                residual: current,
                residual_history: history,
                wall_time: start.elapsed(),
            });
        }
        if !current.is_finite() || growth >= DIVERGENCE_STEPS {
            return Err(FemError::Diverged {
                steps: it,
                residual: current,
            });
        }
        if it == options.max_iterations {
            break;
        }
        let j = jacobian(&x)?;
        let step = options.linear_solver.solve(&j, &f)?;
        x.iter_mut().zip(&step.solution).for_each(|(xi, d)| *xi -= d);
        f = residual(&x)?;
        let next = norm(&f);
        growth = if next > current { growth + 1 } else { 0 };
        history.push(next);
    }
    Err(FemError::NotConverged {
        solver: "newton",
        iterations: options.max_iterations,
        residual: *history.last().expect("history is never empty"),
    })
}

//! Linear, Newton and saddle-point solvers, error norms and convergence
//! rates.

mod convergence;
mod linear;
mod newton;
mod norms;
mod saddle;

pub use convergence::{observed_rate, ConvergenceRow, ConvergenceTable};
pub use linear::{
    linear_solvers, solve_linear, ConjugateGradient, DenseLu, LinearSolver, SolveReport, SparseLu,
    RESIDUAL_TOLERANCE,
};
pub use newton::{solve_newton, NewtonOptions, DIVERGENCE_STEPS};
pub use norms::{error_norm, mean_free_l2_error, nodal_error_norm, Norm, LINF_SAMPLE_DEGREE};
pub use saddle::{solve_saddle, solve_saddle_with, SaddleSolution};

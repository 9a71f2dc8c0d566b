//! −u″ + u³ = f on (0,1), u(0) = u(1) = 0, exact u = sin πx.

use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant;

use super::{require_dim, Example, ExampleRun, RunOptions};
use crate::assembly::{support_pattern, NonlinearDiffusion};
use crate::error::Result;
use crate::femspace::{Element, FiniteElementSpace};
use crate::mesh::uniform_interval_mesh;
use crate::solve::{error_norm, solve_newton, NewtonOptions, Norm, SolveReport};

/// Degree declared for the (non-polynomial) source when choosing quadrature.
const SOURCE_DEGREE: usize = 5;

pub fn nonlinear_exact(p: &[f64]) -> f64 {
    (PI * p[0]).sin()
}

/// f = π² sin πx + sin³ πx.
pub fn nonlinear_source(p: &[f64]) -> f64 {
    let s = (PI * p[0]).sin();
    PI * PI * s + s * s * s
}

#[derive(Clone, Debug)]
pub struct NonlinearSolution {
    pub space: FiniteElementSpace,
    pub coeffs: Vec<f64>,
    pub report: SolveReport,
}

/// Newton solve from the zero initial guess on the uniform mesh of spacing h.
pub fn solve_nonlinear(h: f64, options: &RunOptions) -> Result<NonlinearSolution> {
    let mesh = match &options.mesh {
        Some(m) => Arc::clone(m),
        None => Arc::new(uniform_interval_mesh((0.0, 1.0), h)?),
    };
    require_dim(&mesh, 1)?;
    let dirichlet = mesh.dirichlet_facets();
    let space = FiniteElementSpace::new(mesh, options.element.unwrap_or(Element::P1), &dirichlet)?;
    let problem = NonlinearDiffusion::new(SOURCE_DEGREE, nonlinear_source);
    let pattern = support_pattern(&space, &space)?;
    let newton = NewtonOptions {
        linear_solver: Arc::clone(&options.linear_solver),
        ..NewtonOptions::default()
    };
    let report = solve_newton(
        |u| problem.residual(&space, u, &options.assembly),
        |u| problem.jacobian(&space, &pattern, u, &options.assembly),
        &vec![0.0; space.len()],
        &newton,
    )?;
    Ok(NonlinearSolution {
        coeffs: report.solution.clone(),
        space,
        report,
    })
}

#[derive(Clone, Copy, Debug, Default)]
pub struct NonlinearExample;

impl Example for NonlinearExample {
    fn name(&self) -> &'static str {
        "nonlinear"
    }

    fn description(&self) -> &'static str {
        "-u'' + u³ = π² sin πx + sin³ πx on (0,1), u(0) = u(1) = 0; exact u = sin πx"
    }

    fn default_h_sequence(&self) -> Vec<f64> {
        (4..=8).map(|k| 0.5f64.powi(k)).collect()
    }

    fn rate_metrics(&self) -> &'static [&'static str] {
        &["linf_error"]
    }

    fn run(&self, h: f64, options: &RunOptions) -> Result<ExampleRun> {
        let start = Instant::now();
        let sol = solve_nonlinear(h, options)?;
        let linf = error_norm(&sol.space, &sol.coeffs, nonlinear_exact, Norm::Linf)?;
        Ok(ExampleRun {
            h: sol.space.mesh().max_edge_length(),
            dofs: sol.space.len(),
            metrics: vec![("linf_error", linf)],
            iterations: sol.report.iterations,
            residual: sol.report.residual,
            field: None,
            wall_time: start.elapsed(),
        })
    }
}

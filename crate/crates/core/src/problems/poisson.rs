//! −Δu = f on (−1,1)², u = 0 on the boundary.

use std::sync::Arc;
use std::time::Instant;

use super::{require_dim, Example, ExampleRun, RunOptions};
use crate::assembly::{assemble_bilinear, assemble_linear, support_pattern, GradientForm, LinearFunctional};
use crate::error::Result;
use crate::femspace::{Element, FiniteElementSpace};
use crate::mesh::{uniform_rectangle_mesh, Diagonal, MeshSize, SimplicialMesh};
use crate::solve::{error_norm, Norm, SolveReport};

/// u = −(x³−x)(y³−y).
pub fn poisson_exact(p: &[f64]) -> f64 {
    let (x, y) = (p[0], p[1]);
    -(x * x * x - x) * (y * y * y - y)
}

/// f = 6(x²+y²−2)xy.
pub fn poisson_source(p: &[f64]) -> f64 {
    let (x, y) = (p[0], p[1]);
    6.0 * (x * x + y * y - 2.0) * x * y
}

#[derive(Clone, Debug)]
pub struct PoissonSolution {
    pub space: FiniteElementSpace,
    pub coeffs: Vec<f64>,
    pub report: SolveReport,
}

/// Homogeneous Dirichlet Poisson solve on the max-side-`h` mesh.
pub fn solve_poisson(h: f64, options: &RunOptions) -> Result<PoissonSolution> {
    let mesh = match &options.mesh {
        Some(m) => Arc::clone(m),
        None => Arc::new(uniform_rectangle_mesh((-1.0, 1.0), (-1.0, 1.0), MeshSize::MaxSide(h), Diagonal::Forward)?.mesh),
    };
    solve_poisson_on(mesh, options)
}

pub(crate) fn solve_poisson_on(mesh: Arc<SimplicialMesh>, options: &RunOptions) -> Result<PoissonSolution> {
    require_dim(&mesh, 2)?;
    let dirichlet = mesh.dirichlet_facets();
    let element = options.element.unwrap_or(Element::P1);
    let space = FiniteElementSpace::new(mesh, element, &dirichlet)?;
    let pattern = support_pattern(&space, &space)?;
    let a = assemble_bilinear(&GradientForm, &space, &space, &pattern, &options.assembly)?;
    let b = assemble_linear(&LinearFunctional::l2(4, poisson_source), &space, &options.assembly)?;
    let report = options.linear_solver.solve(&a, &b)?;
    Ok(PoissonSolution {
        coeffs: report.solution.clone(),
        space,
        report,
    })
}

#[derive(Clone, Copy, Debug, Default)]
pub struct PoissonExample;

impl Example for PoissonExample {
    fn name(&self) -> &'static str {
        "poisson"
    }

    fn description(&self) -> &'static str {
        "-Δu = 6(x²+y²-2)xy on (-1,1)², u = 0 on the boundary; exact u = -(x³-x)(y³-y)"
    }

    fn default_h_sequence(&self) -> Vec<f64> {
        (2..=6).map(|k| 0.5f64.powi(k)).collect()
    }

    fn rate_metrics(&self) -> &'static [&'static str] {
        &["l2_error"]
    }

    fn run(&self, h: f64, options: &RunOptions) -> Result<ExampleRun> {
        let start = Instant::now();
        let sol = solve_poisson(h, options)?;
        let l2 = error_norm(&sol.space, &sol.coeffs, poisson_exact, Norm::L2)?;
        Ok(ExampleRun {
            h: sol.space.mesh().max_edge_length(),
            dofs: sol.space.len(),
            metrics: vec![("l2_error", l2)],
            iterations: sol.report.iterations,
            residual: sol.report.residual,
            field: None,
            wall_time: start.elapsed(),
        })
    }
}

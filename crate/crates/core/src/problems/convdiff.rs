//! −εΔu − u_y = M δ_p on (0,1)×(0,2), u = 0 on x = 0, x = 1 and y = 2,
//! u_y = 0 on y = 0.

use std::sync::Arc;
use std::time::Instant;

use super::{require_dim, Example, ExampleRun, RunOptions};
use crate::assembly::{assemble_bilinear, assemble_linear, support_pattern, GenericForm, LinearFunctional};
use crate::error::Result;
use crate::femspace::{Element, FiniteElementSpace};
use crate::mesh::{uniform_rectangle_mesh, Diagonal, MeshSize, SimplicialMesh};
use crate::solve::SolveReport;

pub const CONVDIFF_EPSILON: f64 = 1.0;
/// Magnitude and location of the point source.
pub const CONVDIFF_LOAD: (f64, [f64; 2]) = (1.0, [0.5, 1.0]);

#[derive(Clone, Debug)]
pub struct ConvDiffSolution {
    pub space: FiniteElementSpace,
    pub coeffs: Vec<f64>,
    /// Values at every mesh vertex (zero on the Dirichlet part).
    pub nodes: Vec<f64>,
    /// Simplex receiving the point load.
    pub source_simplex: usize,
    pub report: SolveReport,
}

/// The rectangle mesh used by the example, mirrored about x = ½ so the
/// discrete problem keeps the reflection symmetry, with y = 0 marked as the
/// Neumann part.
pub fn convdiff_mesh(h: f64) -> Result<SimplicialMesh> {
    let grid = uniform_rectangle_mesh((0.0, 1.0), (0.0, 2.0), MeshSize::MaxSide(h), Diagonal::Mirrored)?;
    Ok(grid.mesh.with_active_boundary(|f| f.iter().all(|p| p.coords()[1] == 0.0)))
}

pub fn solve_convdiff(h: f64, options: &RunOptions) -> Result<ConvDiffSolution> {
    let mesh = match &options.mesh {
        Some(m) => Arc::clone(m),
        None => Arc::new(convdiff_mesh(h)?),
    };
    require_dim(&mesh, 2)?;
    let dirichlet = mesh.dirichlet_facets();
    let space = FiniteElementSpace::new(Arc::clone(&mesh), options.element.unwrap_or(Element::P1), &dirichlet)?;
    let p = space.degree();
    let form = GenericForm::new(2 * p - 1, |trial, test, _| {
        let diffusion: f64 = trial.grad.iter().zip(test.grad).map(|(a, b)| a * b).sum();
        CONVDIFF_EPSILON * diffusion - trial.grad[1] * test.value
    });
    let pattern = support_pattern(&space, &space)?;
    let a = assemble_bilinear(&form, &space, &space, &pattern, &options.assembly)?;
    let (magnitude, location) = CONVDIFF_LOAD;
    let b = assemble_linear(&LinearFunctional::point(magnitude, location.to_vec()), &space, &options.assembly)?;
    let report = options.linear_solver.solve(&a, &b)?;
    let source_simplex = mesh
        .locate_simplex(&location)
        .expect("the load point was located during assembly");
    Ok(ConvDiffSolution {
        nodes: space.expand(&report.solution, None),
        coeffs: report.solution.clone(),
        space,
        source_simplex,
        report,
    })
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ConvDiffExample;

impl Example for ConvDiffExample {
    fn name(&self) -> &'static str {
        "convdiff"
    }

    fn description(&self) -> &'static str {
        "-Δu - u_y = δ(x - (½,1)) on (0,1)×(0,2), u = 0 on x=0, x=1, y=2, u_y = 0 on y=0"
    }

    fn default_h_sequence(&self) -> Vec<f64> {
        vec![1.0 / 32.0]
    }

    fn rate_metrics(&self) -> &'static [&'static str] {
        &[]
    }

    fn run(&self, h: f64, options: &RunOptions) -> Result<ExampleRun> {
        let start = Instant::now();
        let sol = solve_convdiff(h, options)?;
        let mesh = sol.space.mesh();
        let (peak, _) = sol
            .nodes
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, &v)| if v > best.1 { (i, v) } else { best });
        let field = mesh
            .points()
            .iter()
            .zip(&sol.nodes)
            .map(|(p, &u)| [p.coords()[0], p.coords()[1], u])
            .collect();
        Ok(ExampleRun {
            h: mesh.max_edge_length(),
            dofs: sol.space.len(),
            metrics: vec![("max_u", sol.nodes[peak])],
            iterations: sol.report.iterations,
            residual: sol.report.residual,
            field: Some(field),
            wall_time: start.elapsed(),
        })
    }
}

//! Colliding flow: −Δu + ∇p = 0, ∇·u = 0 on (−1,1)² with
//! u = (20xy³, 5x⁴ − 5y⁴) on the boundary, Taylor–Hood P2/P1.

use std::sync::Arc;
use std::time::Instant;

use super::{require_dim, Example, ExampleRun, RunOptions};
use crate::assembly::{assemble_linear, assemble_stokes, LinearFunctional};
use crate::error::Result;
use crate::femspace::{Element, FiniteElementSpace, VectorSpace};
use crate::mesh::{uniform_rectangle_mesh, Diagonal, MeshSize};
use crate::solve::{mean_free_l2_error, nodal_error_norm, Norm, SaddleSolution};

/// Exact velocity, which is also the boundary data.
pub fn stokes_boundary(p: &[f64]) -> [f64; 2] {
    let (x, y) = (p[0], p[1]);
    [20.0 * x * y.powi(3), 5.0 * x.powi(4) - 5.0 * y.powi(4)]
}

/// Exact pressure up to a constant: the one that balances −Δu for the
/// velocity above.
pub fn stokes_pressure(p: &[f64]) -> f64 {
    let (x, y) = (p[0], p[1]);
    60.0 * x * x * y - 20.0 * y.powi(3)
}

#[derive(Clone, Debug)]
pub struct StokesSolution {
    /// Unconstrained P2 space; velocity components are given on its nodes.
    pub velocity_space: FiniteElementSpace,
    pub pressure_space: FiniteElementSpace,
    /// Full velocity node values per component (correction plus lift).
    pub velocity: [Vec<f64>; 2],
    /// Pressure values at the P1 nodes, zero mean.
    pub pressure: Vec<f64>,
    /// ‖B·u − g‖∞ for the computed correction.
    pub divergence: f64,
    pub saddle: SaddleSolution,
}

pub fn solve_stokes(h: f64, options: &RunOptions) -> Result<StokesSolution> {
    let mesh = match &options.mesh {
        Some(m) => Arc::clone(m),
        None => Arc::new(uniform_rectangle_mesh((-1.0, 1.0), (-1.0, 1.0), MeshSize::MaxSide(h), Diagonal::Forward)?.mesh),
    };
    require_dim(&mesh, 2)?;
    let dirichlet = mesh.dirichlet_facets();
    let velocity = VectorSpace::new(FiniteElementSpace::new(Arc::clone(&mesh), Element::P2, &dirichlet)?, 2);
    let full = FiniteElementSpace::new(Arc::clone(&mesh), Element::P2, &[])?;
    let pressure = FiniteElementSpace::new(mesh, Element::P1, &[])?;

    let lift: [Vec<f64>; 2] = [0, 1].map(|c| full.interpolate_boundary(|p| stokes_boundary(p)[c]));
    let stacked: Vec<f64> = lift.concat();
    let system = assemble_stokes(&velocity, &full, &pressure, &stacked, &options.assembly)?;
    let weights = assemble_linear(&LinearFunctional::constant(1.0), &pressure, &options.assembly)?;
    let saddle = crate::solve::solve_saddle_with(
        options.linear_solver.as_ref(),
        &system.a,
        &system.b,
        &system.f,
        &system.g,
        Some(&weights),
    )?;

    let divergence = system
        .b
        .mul_vec(&saddle.velocity)
        .iter()
        .zip(&system.g)
        .map(|(bu, g)| (bu - g).abs())
        .fold(0.0, f64::max);
    let scalar = velocity.scalar();
    let velocity_nodes = [0, 1].map(|c| scalar.expand(velocity.component(&saddle.velocity, c), Some(&lift[c])));
    Ok(StokesSolution {
        velocity_space: full,
        pressure: pressure.expand(&saddle.pressure, None),
        pressure_space: pressure,
        velocity: velocity_nodes,
        divergence,
        saddle,
    })
}

impl StokesSolution {
    /// Mean-free L2 distance of the discrete pressure to `exact`.
    pub fn pressure_error(&self, exact: impl Fn(&[f64]) -> f64) -> Result<f64> {
        mean_free_l2_error(&self.pressure_space, &self.pressure, exact)
    }

    /// L2 norm of the velocity error, both components together.
    pub fn velocity_error(&self) -> Result<f64> {
        let mut sq = 0.0;
        for c in 0..2 {
            let e = nodal_error_norm(&self.velocity_space, &self.velocity[c], |p| stokes_boundary(p)[c], Norm::L2)?;
            sq += e * e;
        }
        Ok(sq.sqrt())
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct StokesExample;

impl Example for StokesExample {
    fn name(&self) -> &'static str {
        "stokes"
    }

    fn description(&self) -> &'static str {
        "colliding flow on (-1,1)²: u = (20xy³, 5x⁴-5y⁴), p = 60x²y - 20y³ + C, Taylor-Hood P2/P1"
    }

    fn default_h_sequence(&self) -> Vec<f64> {
        (1..=4).map(|k| 0.5f64.powi(k)).collect()
    }

    fn rate_metrics(&self) -> &'static [&'static str] {
        &["pressure_l2_error", "velocity_l2_error"]
    }

    fn run(&self, h: f64, options: &RunOptions) -> Result<ExampleRun> {
        let start = Instant::now();
        let sol = solve_stokes(h, options)?;
        Ok(ExampleRun {
            h: sol.pressure_space.mesh().max_edge_length(),
            dofs: sol.saddle.velocity.len() + sol.saddle.pressure.len(),
            metrics: vec![
                ("pressure_l2_error", sol.pressure_error(stokes_pressure)?),
                ("velocity_l2_error", sol.velocity_error()?),
                ("divergence", sol.divergence),
            ],
            iterations: sol.saddle.report.iterations,
            residual: sol.saddle.report.residual,
            field: None,
            wall_time: start.elapsed(),
        })
    }
}

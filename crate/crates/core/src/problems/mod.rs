//! The four worked examples: Poisson, convection–diffusion, nonlinear
//! diffusion and Stokes colliding flow.

mod convdiff;
mod nonlinear;
mod poisson;
mod stokes;

use std::sync::Arc;
use std::time::Duration;

use crate::assembly::AssemblyOptions;
use crate::error::{FemError, Result};
use crate::femspace::Element;
use crate::mesh::SimplicialMesh;
use crate::registry::Registry;
use crate::solve::{ConvergenceTable, LinearSolver, SparseLu};

pub use convdiff::{convdiff_mesh, solve_convdiff, ConvDiffExample, ConvDiffSolution, CONVDIFF_EPSILON, CONVDIFF_LOAD};
pub use nonlinear::{nonlinear_exact, nonlinear_source, solve_nonlinear, NonlinearExample, NonlinearSolution};
pub use poisson::{poisson_exact, poisson_source, solve_poisson, PoissonExample, PoissonSolution};
pub use stokes::{
    solve_stokes, stokes_boundary, stokes_pressure, StokesExample, StokesSolution,
};

/// Settings shared by all examples.
#[derive(Clone)]
pub struct RunOptions {
    pub assembly: AssemblyOptions,
    pub linear_solver: Arc<dyn LinearSolver>,
    /// Use this mesh instead of generating one from h.
    pub mesh: Option<Arc<SimplicialMesh>>,
    /// Element override where an example supports more than one.
    pub element: Option<Element>,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            assembly: AssemblyOptions::default(),
            linear_solver: Arc::new(SparseLu::default()),
            mesh: None,
            element: None,
        }
    }
}

impl std::fmt::Debug for RunOptions {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RunOptions")
            .field("assembly", &self.assembly)
            .field("linear_solver", &self.linear_solver.name())
            .field("mesh", &self.mesh.as_ref().map(|m| m.num_simplices()))
            .field("element", &self.element)
            .finish()
    }
}

/// Result of one example run at one mesh size.
#[derive(Clone, Debug, PartialEq)]
pub struct ExampleRun {
    /// Longest edge of the mesh actually used.
    pub h: f64,
    pub dofs: usize,
    /// Named error or diagnostic values, in a fixed order.
    pub metrics: Vec<(&'static str, f64)>,
    /// Newton iterations, or linear-solver iterations for linear problems.
    pub iterations: usize,
    pub residual: f64,
    /// Sampled solution rows (x, y, u), when the example produces a field.
    pub field: Option<Vec<[f64; 3]>>,
    pub wall_time: Duration,
}

impl ExampleRun {
    pub fn metric(&self, name: &str) -> Option<f64> {
        self.metrics.iter().find(|(n, _)| *n == name).map(|&(_, v)| v)
    }
}

pub trait Example: Send + Sync {
    fn name(&self) -> &'static str;
    fn description(&self) -> &'static str;
    fn default_h_sequence(&self) -> Vec<f64>;
    /// Metrics that are errors and get a convergence-rate column.
    fn rate_metrics(&self) -> &'static [&'static str];
    fn run(&self, h: f64, options: &RunOptions) -> Result<ExampleRun>;
}

/// Registry of the built-in examples.
pub fn examples() -> Registry<dyn Example> {
    let mut r: Registry<dyn Example> = Registry::new("example");
    r.register("poisson", Arc::new(PoissonExample));
    r.register("convdiff", Arc::new(ConvDiffExample));
    r.register("nonlinear", Arc::new(NonlinearExample));
    r.register("stokes", Arc::new(StokesExample));
    r
}

/// One level of a convergence study with the rates of each rate metric.
#[derive(Clone, Debug, PartialEq)]
pub struct StudyLevel {
    pub run: ExampleRun,
    pub rates: Vec<(&'static str, Option<f64>)>,
}

/// Runs `example` for every h and attaches observed rates.
pub fn convergence_study(example: &dyn Example, hs: &[f64], options: &RunOptions) -> Result<Vec<StudyLevel>> {
    if hs.is_empty() {
        return Err(FemError::InvalidArgument("empty mesh-size sequence".into()));
    }
    let runs = hs.iter().map(|&h| example.run(h, options)).collect::<Result<Vec<_>>>()?;
    let mut tables = Vec::new();
    for &name in example.rate_metrics() {
        let levels: Vec<(f64, f64)> = runs
            .iter()
            .map(|r| (r.h, r.metric(name).expect("rate metrics are always reported")))
            .collect();
        tables.push((name, ConvergenceTable::new(&levels)?));
    }
    Ok(runs
        .into_iter()
        .enumerate()
        .map(|(k, run)| StudyLevel {
            rates: tables.iter().map(|(name, t)| (*name, t.rows()[k].rate)).collect(),
            run,
        })
        .collect())
}

fn require_dim(mesh: &SimplicialMesh, dim: usize) -> Result<()> {
    if mesh.dim() == dim {
        Ok(())
    } else {
        Err(FemError::DimensionMismatch {
            expected: dim,
            found: mesh.dim(),
        })
    }
}

use std::f64::consts::PI;
use std::sync::Arc;

use femtool_core::assembly::{assemble_bilinear, assemble_linear, support_pattern, AssemblyOptions, GradientForm, LinearFunctional};
use femtool_core::femspace::{Element, FiniteElementSpace};
use femtool_core::mesh::{uniform_interval_mesh, uniform_rectangle_mesh, Diagonal, MeshSize};
use femtool_core::problems::{convergence_study, examples, solve_nonlinear, RunOptions, StokesExample};
use femtool_core::solve::{error_norm, linear_solvers, ConvergenceTable, Norm, RESIDUAL_TOLERANCE};

fn residual_norm(a: &femtool_core::assembly::SparseMatrix, x: &[f64], b: &[f64]) -> f64 {
    a.mul_vec(x).iter().zip(b).map(|(ax, bi)| (ax - bi).powi(2)).sum::<f64>().sqrt()
}

fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Nodal error of −u″ = π² sin πx on the uniform mesh of spacing h.
fn sine_nodal_error(h: f64) -> f64 {
    let mesh = Arc::new(uniform_interval_mesh((0.0, 1.0), h).unwrap());
    let space = FiniteElementSpace::new(Arc::clone(&mesh), Element::P1, &mesh.dirichlet_facets()).unwrap();
    let opts = AssemblyOptions::default();
    let pattern = support_pattern(&space, &space).unwrap();
    let a = assemble_bilinear(&GradientForm, &space, &space, &pattern, &opts).unwrap();
    let b = assemble_linear(&LinearFunctional::l2(5, |x| PI * PI * (PI * x[0]).sin()), &space, &opts).unwrap();
    let x = femtool_core::solve::solve_linear(&a, &b).unwrap().solution;
    space
        .basis()
        .iter()
        .zip(&x)
        .map(|(f, xi)| (xi - (PI * f.location()[0]).sin()).abs())
        .fold(0.0, f64::max)
}

#[test]
fn one_dimensional_poisson_is_second_order() {
    let (e8, e16) = (sine_nodal_error(0.125), sine_nodal_error(0.0625));
    assert!(e8 < 0.125 * 0.125 && e16 < 0.0625 * 0.0625);
    assert!(e8 / e16 > 3.5, "{e8:e} / {e16:e}");
}

#[test]
fn every_linear_solver_meets_the_residual_contract() {
    let mesh = Arc::new(uniform_rectangle_mesh((-1.0, 1.0), (-1.0, 1.0), MeshSize::MaxSide(0.25), Diagonal::Forward).unwrap().mesh);
    let space = FiniteElementSpace::new(Arc::clone(&mesh), Element::P2, &mesh.dirichlet_facets()).unwrap();
    let opts = AssemblyOptions::default();
    let a = assemble_bilinear(&GradientForm, &space, &space, &support_pattern(&space, &space).unwrap(), &opts).unwrap();
    let b = assemble_linear(&LinearFunctional::l2(2, |x| 1.0 + x[0] * x[1]), &space, &opts).unwrap();
    let registry = linear_solvers();
    let mut solutions = Vec::new();
    for name in registry.names() {
        let report = registry.get(name).unwrap().solve(&a, &b).unwrap();
        let r = residual_norm(&a, &report.solution, &b);
        assert!(r <= RESIDUAL_TOLERANCE * (1.0 + l2(&b)), "{name}: {r:e}");
        solutions.push(report.solution);
    }
    for s in &solutions[1..] {
        let diff = s.iter().zip(&solutions[0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(diff < 1e-8);
    }
}

#[test]
fn newton_iterations_are_mesh_independent_and_quadratic() {
    for k in 4..=10 {
        let sol = solve_nonlinear(0.5f64.powi(k), &RunOptions::default()).unwrap();
        let history = &sol.report.residual_history;
        assert!(sol.report.iterations <= 8, "h = 2^-{k}: {history:?}");
        // Once the iteration is in its quadratic regime the next residual is
        // bounded by a modest multiple of the square of the current one.
        let n = history.len();
        let (prev, last) = (history[n - 3], history[n - 2]);
        assert!(last <= 10.0 * prev * prev, "h = 2^-{k}: {history:?}");
    }
}

#[test]
fn linear_and_quadratic_fields_are_reproduced() {
    let mesh = Arc::new(uniform_rectangle_mesh((0.0, 1.0), (0.0, 2.0), MeshSize::MaxSide(0.4), Diagonal::Mirrored).unwrap().mesh);
    let p1 = FiniteElementSpace::new(Arc::clone(&mesh), Element::P1, &[]).unwrap();
    let p2 = FiniteElementSpace::new(mesh, Element::P2, &[]).unwrap();
    let linear = |x: &[f64]| 1.0 + 2.0 * x[0] - 3.0 * x[1];
    let quadratic = |x: &[f64]| x[0] * x[1] - x[1] * x[1] + 0.5;
    for norm in [Norm::L2, Norm::Linf] {
        assert!(error_norm(&p1, &p1.interpolate(linear), linear, norm).unwrap() < 1e-12);
        assert!(error_norm(&p2, &p2.interpolate(quadratic), quadratic, norm).unwrap() < 1e-12);
    }
}

#[test]
fn stokes_velocity_converges_at_least_quadratically() {
    let hs: Vec<f64> = (1..=3).map(|k| 0.5f64.powi(k)).collect();
    let study = convergence_study(&StokesExample, &hs, &RunOptions::default()).unwrap();
    for level in &study[1..] {
        let rate = level.rates.iter().find(|(n, _)| *n == "velocity_l2_error").unwrap().1.unwrap();
        assert!(rate >= 2.0, "{rate}");
        assert!(level.run.metric("divergence").unwrap() < 1e-9);
    }
}

#[test]
fn example_runs_are_deterministic() {
    let registry = examples();
    for name in ["poisson", "convdiff", "nonlinear", "stokes"] {
        let ex = registry.get(name).unwrap();
        let h = if name == "nonlinear" { 1.0 / 64.0 } else { 0.25 };
        let mut a = ex.run(h, &RunOptions::default()).unwrap();
        let mut b = ex.run(h, &RunOptions::default()).unwrap();
        a.wall_time = Default::default();
        b.wall_time = Default::default();
        assert_eq!(a, b, "{name}");
    }
}

#[test]
fn convergence_table_rejects_non_decreasing_sizes() {
    assert!(ConvergenceTable::new(&[(0.5, 1.0), (0.5, 0.25)]).is_err());
    let t = ConvergenceTable::new(&[(0.5, 1.0), (0.25, 0.25)]).unwrap();
    assert!((t.rates()[0] - 2.0).abs() < 1e-14);
}

mod common;

use std::f64::consts::PI;
use std::sync::Arc;

use femtool_core::assembly::{
    assemble_bilinear, assemble_linear, assemble_stokes, support_pattern, AssemblyOptions, GradientForm, LinearFunctional,
    MassForm, NonlinearDiffusion, PointwiseForm,
};
use femtool_core::femspace::{Element, FiniteElementSpace, VectorSpace};
use femtool_core::mesh::{uniform_interval_mesh, uniform_rectangle_mesh, Diagonal, MeshSize, SimplicialMesh};
use femtool_core::problems::nonlinear_source;

fn square(h: f64) -> Arc<SimplicialMesh> {
    Arc::new(uniform_rectangle_mesh((-1.0, 1.0), (-1.0, 1.0), MeshSize::MaxSide(h), Diagonal::Forward).unwrap().mesh)
}

fn constrained(mesh: &Arc<SimplicialMesh>, element: Element) -> FiniteElementSpace {
    FiniteElementSpace::new(Arc::clone(mesh), element, &mesh.dirichlet_facets()).unwrap()
}

fn assemble(form: &dyn PointwiseForm, trial: &FiniteElementSpace, test: &FiniteElementSpace, opts: &AssemblyOptions) -> Vec<Vec<f64>> {
    let pattern = support_pattern(trial, test).unwrap();
    let a = assemble_bilinear(form, trial, test, &pattern, opts).unwrap();
    (0..test.len()).map(|i| (0..trial.len()).map(|j| a.get(i, j)).collect()).collect()
}

fn max_diff(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

#[test]
fn restricted_assembly_matches_dense_oracle() {
    let mesh = square(0.5);
    let p1 = constrained(&mesh, Element::P1);
    let p2 = constrained(&mesh, Element::P2);
    let opts = AssemblyOptions::default();
    for (trial, test) in [(&p1, &p1), (&p2, &p2), (&p1, &p2), (&p2, &p1)] {
        for form in [&GradientForm as &dyn PointwiseForm, &MassForm] {
            let dense = common::dense_matrix(form, trial, test);
            let sparse = assemble(form, trial, test, &opts);
            assert!(max_diff(&dense, &sparse) < 1e-12, "{}", max_diff(&dense, &sparse));
        }
    }
}

#[test]
fn restricted_assembly_matches_dense_oracle_in_1d() {
    let mesh = Arc::new(uniform_interval_mesh((0.0, 1.0), 1.0 / 16.0).unwrap());
    let space = constrained(&mesh, Element::P1);
    let opts = AssemblyOptions::default();
    for form in [&GradientForm as &dyn PointwiseForm, &MassForm] {
        let dense = common::dense_matrix(form, &space, &space);
        assert!(max_diff(&dense, &assemble(form, &space, &space, &opts)) < 1e-12);
    }
}

#[test]
fn gradient_matrices_are_symmetric() {
    let mesh = square(0.25);
    for element in [Element::P1, Element::P2] {
        let space = constrained(&mesh, element);
        let pattern = support_pattern(&space, &space).unwrap();
        assert!(pattern.is_symmetric());
        let a = assemble_bilinear(&GradientForm, &space, &space, &pattern, &AssemblyOptions::default()).unwrap();
        assert!(a.asymmetry() < 1e-12);
    }
}

#[test]
fn raising_quadrature_degree_changes_nothing_for_polynomial_forms() {
    let mesh = square(0.5);
    for element in [Element::P1, Element::P2] {
        let space = constrained(&mesh, element);
        for form in [&GradientForm as &dyn PointwiseForm, &MassForm] {
            let base = assemble(form, &space, &space, &AssemblyOptions::default());
            let high = assemble(form, &space, &space, &AssemblyOptions::with_degree(9));
            assert!(max_diff(&base, &high) < 1e-12);
        }
    }
}

#[test]
fn assembly_is_bit_reproducible() {
    let mesh = square(0.25);
    let space = constrained(&mesh, Element::P2);
    let pattern = support_pattern(&space, &space).unwrap();
    let opts = AssemblyOptions::default();
    let a = assemble_bilinear(&GradientForm, &space, &space, &pattern, &opts).unwrap();
    let b = assemble_bilinear(&GradientForm, &space, &space, &pattern, &opts).unwrap();
    assert_eq!(a, b);
}

#[test]
fn point_load_gives_barycentric_weights() {
    let mesh = square(0.3);
    let space = FiniteElementSpace::new(Arc::clone(&mesh), Element::P1, &[]).unwrap();
    let b = assemble_linear(&LinearFunctional::point(1.0, vec![0.13, -0.41]), &space, &AssemblyOptions::default()).unwrap();
    let s = mesh.locate_simplex(&[0.13, -0.41]).unwrap();
    let lambda = mesh.barycentric(s, &[0.13, -0.41]);
    let verts = mesh.simplex(s).vertices();
    for (i, &bi) in b.iter().enumerate() {
        let expected = verts.iter().position(|&v| v == i).map_or(0.0, |k| lambda[k]);
        assert!((bi - expected).abs() < 1e-14);
    }
    assert!((b.iter().sum::<f64>() - 1.0).abs() < 1e-14);
}

fn interval_space(h: f64) -> FiniteElementSpace {
    let mesh = Arc::new(uniform_interval_mesh((0.0, 1.0), h).unwrap());
    constrained(&mesh, Element::P1)
}

#[test]
fn nonlinear_residual_matches_dense_oracle() {
    let h = 1.0 / 256.0;
    let space = interval_space(h);
    let problem = NonlinearDiffusion::new(5, nonlinear_source);
    let u = space.interpolate(|x| (PI * x[0]).sin());
    let opts = AssemblyOptions::default();
    let residual = problem.residual(&space, &u, &opts).unwrap();

    let q = common::dense_quadrature(space.mesh());
    let samples = common::sample_basis(&space, &q);
    let mut worst: f64 = 0.0;
    for (i, &ri) in residual.iter().enumerate() {
        let mut oracle = 0.0;
        for k in 0..q.points.len() {
            let (phi, dphi) = &samples.data[i][k];
            if *phi == 0.0 && dphi[0] == 0.0 {
                continue;
            }
            let (mut uh, mut duh) = (0.0, 0.0);
            for (j, &uj) in u.iter().enumerate() {
                let (v, g) = &samples.data[j][k];
                uh += uj * v;
                duh += uj * g[0];
            }
            oracle += q.weights[k] * (duh * dphi[0] + (uh.powi(3) - nonlinear_source(q.points[k].coords())) * phi);
        }
        worst = worst.max((ri - oracle).abs());
    }
    assert!(worst < 1e-12, "{worst:e}");
    let norm = residual.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    assert!(norm < 10.0 * h * h, "{norm:e}");
}

#[test]
fn jacobian_matches_finite_differences() {
    let space = interval_space(1.0 / 16.0);
    let problem = NonlinearDiffusion::new(5, nonlinear_source);
    let opts = AssemblyOptions::default();
    let pattern = support_pattern(&space, &space).unwrap();
    let u = space.interpolate(|x| (PI * x[0]).sin());
    let jac = problem.jacobian(&space, &pattern, &u, &opts).unwrap();
    assert!(jac.asymmetry() < 1e-12);
    let step = 1e-6;
    for j in 0..space.len() {
        let mut up = u.clone();
        let mut down = u.clone();
        up[j] += step;
        down[j] -= step;
        let fp = problem.residual(&space, &up, &opts).unwrap();
        let fm = problem.residual(&space, &down, &opts).unwrap();
        for i in 0..space.len() {
            let fd = (fp[i] - fm[i]) / (2.0 * step);
            assert!((fd - jac.get(i, j)).abs() < 1e-5, "({i}, {j}): {fd} vs {}", jac.get(i, j));
        }
    }
}

#[test]
fn jacobian_at_zero_is_the_stiffness_matrix() {
    let space = interval_space(0.125);
    let problem = NonlinearDiffusion::new(5, nonlinear_source);
    let opts = AssemblyOptions::default();
    let pattern = support_pattern(&space, &space).unwrap();
    let jac = problem.jacobian(&space, &pattern, &vec![0.0; space.len()], &opts).unwrap();
    let k = assemble_bilinear(&GradientForm, &space, &space, &pattern, &opts).unwrap();
    assert_eq!(jac.nnz(), k.nnz());
    for (i, j, v) in k.triplets() {
        assert!((jac.get(i, j) - v).abs() < 1e-12);
    }
    let zero = NonlinearDiffusion::new(0, |_| 0.0);
    let r = zero.residual(&space, &vec![0.0; space.len()], &opts).unwrap();
    assert!(r.iter().all(|&x| x == 0.0));
}

struct Stokes {
    velocity: VectorSpace,
    full: FiniteElementSpace,
    pressure: FiniteElementSpace,
}

fn stokes_spaces(h: f64) -> Stokes {
    let mesh = square(h);
    Stokes {
        velocity: VectorSpace::new(constrained(&mesh, Element::P2), 2),
        full: FiniteElementSpace::new(Arc::clone(&mesh), Element::P2, &[]).unwrap(),
        pressure: FiniteElementSpace::new(mesh, Element::P1, &[]).unwrap(),
    }
}

#[test]
fn stokes_with_zero_data_has_zero_rhs_and_solution() {
    let s = stokes_spaces(0.5);
    let lift = vec![0.0; 2 * s.full.len()];
    let sys = assemble_stokes(&s.velocity, &s.full, &s.pressure, &lift, &AssemblyOptions::default()).unwrap();
    assert!(sys.f.iter().chain(&sys.g).all(|&x| x == 0.0));
    let sol = femtool_core::solve::solve_saddle(&sys.a, &sys.b, &sys.f, &sys.g, None).unwrap();
    assert!(sol.velocity.iter().chain(&sol.pressure).all(|x| x.abs() < 1e-12));
}

#[test]
fn stokes_velocity_block_is_positive_definite() {
    let s = stokes_spaces(0.5);
    let lift = vec![0.0; 2 * s.full.len()];
    let sys = assemble_stokes(&s.velocity, &s.full, &s.pressure, &lift, &AssemblyOptions::default()).unwrap();
    assert!(sys.a.asymmetry() < 1e-12);
    let eig = sys.a.to_dense().symmetric_eigen();
    assert!(eig.eigenvalues.min() > 1e-3, "{}", eig.eigenvalues.min());
}

#[test]
fn divergence_of_constant_velocity_vanishes() {
    let s = stokes_spaces(0.5);
    for c in 0..2 {
        let n = s.full.len();
        let mut lift = vec![0.0; 2 * n];
        lift[c * n..(c + 1) * n].copy_from_slice(&s.full.interpolate_boundary(|_| 1.0));
        let sys = assemble_stokes(&s.velocity, &s.full, &s.pressure, &lift, &AssemblyOptions::default()).unwrap();
        // Lift (boundary nodes) plus correction (interior nodes) is the
        // constant 1, so B·u − g is the discrete divergence of a constant.
        let interior = vec![1.0; s.velocity.scalar().len()];
        let mut u = vec![0.0; s.velocity.len()];
        u[c * interior.len()..(c + 1) * interior.len()].copy_from_slice(&interior);
        let bu = sys.b.mul_vec(&u);
        let worst = bu.iter().zip(&sys.g).map(|(a, g)| (a - g).abs()).fold(0.0, f64::max);
        assert!(worst < 1e-12, "{worst:e}");
    }
}

#[test]
fn stokes_rejects_a_foreign_mesh() {
    let s = stokes_spaces(0.5);
    let other = FiniteElementSpace::new(square(0.25), Element::P1, &[]).unwrap();
    let lift = vec![0.0; 2 * s.full.len()];
    assert!(assemble_stokes(&s.velocity, &s.full, &other, &lift, &AssemblyOptions::default()).is_err());
}

//! Finite element assembly on simplicial meshes.
//!
//! Operator sparsity is discovered from basis-function supports with a
//! separating-axis intersection test on their convex hulls, and every
//! integral is evaluated with Grundmann–Möller simplex quadrature.
//!
//! The typical pipeline:
//!
//! 1. build or load a [`mesh::SimplicialMesh`];
//! 2. build trial/test spaces with [`femspace::build_p1_space`] or
//!    [`femspace::build_p2_space`];
//! 3. compute a [`geometry::SparsityPattern`] from the support hulls and
//!    assemble with [`assembly::assemble_bilinear`] /
//!    [`assembly::assemble_linear`];
//! 4. solve with [`solve::solve_linear`], [`solve::solve_newton`] or
//!    [`solve::solve_saddle`].
//!
//! ```
//! use std::sync::Arc;
//! use femtool_core::{assembly, femspace, geometry, mesh, solve};
//!
//! let m = Arc::new(mesh::uniform_interval_mesh((0.0, 1.0), 0.25).unwrap());
//! let dirichlet = m.boundary_facets().to_vec();
//! let space = femspace::build_p1_space(m, &dirichlet).unwrap();
//! let hulls = space.support_hulls();
//! let pattern = geometry::sparsity_pattern(&hulls, &hulls).unwrap();
//! let opts = assembly::AssemblyOptions::default();
//! let a = assembly::assemble_bilinear(&assembly::GradientForm, &space, &space, &pattern, &opts).unwrap();
//! assert!((a.get(0, 0) - 8.0).abs() < 1e-12);
//! let b = assembly::assemble_linear(&assembly::LinearFunctional::constant(1.0), &space, &opts).unwrap();
//! let x = solve::solve_linear(&a, &b).unwrap();
//! assert_eq!(x.solution.len(), 3);
//! ```

pub mod assembly;
pub mod error;
pub mod femspace;
pub mod geometry;
pub mod mesh;
pub mod problems;
pub mod quadrature;
pub mod registry;
pub mod solve;

pub use error::{FemError, Result};

use std::sync::Arc;

use femtool_core::femspace::{Element, FiniteElementSpace};
use femtool_core::mesh::{uniform_rectangle_mesh, Diagonal, MeshSize, Point};
use femtool_core::FemError;
use proptest::prelude::*;

fn space(element: Element) -> FiniteElementSpace {
    let mesh = uniform_rectangle_mesh((0.0, 1.0), (0.0, 1.0), MeshSize::MaxSide(0.3), Diagonal::Forward).unwrap().mesh;
    FiniteElementSpace::new(Arc::new(mesh), element, &[]).unwrap()
}

const VALUE: [usize; 2] = [0, 0];

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn basis_is_a_partition_of_unity(x in 0.0..1.0f64, y in 0.0..1.0f64) {
        for element in [Element::P1, Element::P2] {
            let s = space(element);
            let p = Point::new(vec![x, y]);
            let total: f64 = (0..s.len()).map(|i| s.evaluate(i, std::slice::from_ref(&p), &[VALUE.to_vec()]).unwrap()[0][0]).sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn gradients_match_finite_differences(x in 0.05..0.95f64, y in 0.05..0.95f64, pick in 0usize..1000) {
        for element in [Element::P1, Element::P2] {
            let s = space(element);
            let mesh = s.mesh();
            let cell = mesh.locate_simplex(&[x, y]).unwrap();
            // Stay inside the located element so the difference quotient
            // does not straddle a kink.
            let lambda = mesh.barycentric(cell, &[x, y]);
            prop_assume!(lambda.iter().all(|&l| l > 1e-3));
            let support: Vec<usize> = (0..s.len()).filter(|&i| s.basis_function(i).support().contains(&cell)).collect();
            let i = support[pick % support.len()];
            let requests = [vec![0, 0], vec![1, 0], vec![0, 1]];
            let at = s.evaluate(i, &[Point::new(vec![x, y])], &requests).unwrap()[0].clone();
            let step = 1e-7;
            for c in 0..2 {
                let mut a = vec![x, y];
                let mut b = vec![x, y];
                a[c] += step;
                b[c] -= step;
                let fd = (s.value_at(i, &Point::new(a)) - s.value_at(i, &Point::new(b))) / (2.0 * step);
                prop_assert!((fd - at[1 + c]).abs() < 1e-5, "{} vs {}", fd, at[1 + c]);
            }
        }
    }
}

#[test]
fn second_derivatives_are_refused() {
    let s = space(Element::P2);
    let err = s.evaluate(0, &[Point::new(vec![0.5, 0.5])], &[vec![1, 1]]).unwrap_err();
    assert!(matches!(err, FemError::UnsupportedDerivative(2)));
}

#[test]
fn values_vanish_outside_the_support() {
    let s = space(Element::P2);
    for i in 0..s.len() {
        let hull = s.support_hull(i);
        let far = Point::new(vec![1.0 - s.basis_function(i).location()[0], 1.0 - s.basis_function(i).location()[1]]);
        let (lo, hi) = (hull.bounding_box().min().to_vec(), hull.bounding_box().max().to_vec());
        let outside = (0..2).any(|c| far[c] < lo[c] - 1e-9 || far[c] > hi[c] + 1e-9);
        if outside {
            assert_eq!(s.value_at(i, &far), 0.0);
        }
    }
}

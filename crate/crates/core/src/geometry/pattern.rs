//! Sparsity patterns from support overlap.

use std::sync::Arc;

use rayon::prelude::*;

use super::{broad_phase_pairs, intersection_test, Aabb, ClosestPairSolver, ConvexPolytope, MinNormPoint};
use crate::error::{FemError, Result};

/// Relative homothety applied to hulls under [`ContactPolicy::Interior`].
pub const INTERIOR_SHRINK: f64 = 1e-6;

/// Which kind of support contact produces a matrix entry.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ContactPolicy {
    /// Closed hulls: sharing a single point is enough.
    Closed,
    /// Open hulls: contact on a set of measure zero does not count. Hulls are
    /// shrunk about their centroids by [`INTERIOR_SHRINK`] before testing.
    #[default]
    Interior,
}

#[derive(Clone)]
pub struct PatternOptions {
    pub contact: ContactPolicy,
    pub solver: Arc<dyn ClosestPairSolver>,
}

impl Default for PatternOptions {
    fn default() -> Self {
        Self {
            contact: ContactPolicy::default(),
            solver: Arc::new(MinNormPoint::default()),
        }
    }
}

impl std::fmt::Debug for PatternOptions {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PatternOptions")
            .field("contact", &self.contact)
            .field("solver", &self.solver.name())
            .finish()
    }
}

/// Set of (trial, test) index pairs whose supports may overlap. Sorted and
/// free of duplicates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparsityPattern {
    n_trial: usize,
    n_test: usize,
    pairs: Vec<(usize, usize)>,
}

impl SparsityPattern {
    pub fn new(n_trial: usize, n_test: usize, mut pairs: Vec<(usize, usize)>) -> Result<Self> {
        if let Some(&(i, j)) = pairs.iter().find(|&&(i, j)| i >= n_trial || j >= n_test) {
            return Err(FemError::InvalidArgument(format!(
                "pair ({i}, {j}) out of range for a {n_trial} x {n_test} pattern"
            )));
        }
        pairs.sort_unstable();
        pairs.dedup();
        Ok(Self { n_trial, n_test, pairs })
    }

    /// Every pair, no sparsity.
    pub fn dense(n_trial: usize, n_test: usize) -> Self {
        let pairs = (0..n_trial).flat_map(|i| (0..n_test).map(move |j| (i, j))).collect();
        Self { n_trial, n_test, pairs }
    }

    pub fn n_trial(&self) -> usize {
        self.n_trial
    }

    pub fn n_test(&self) -> usize {
        self.n_test
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, trial: usize, test: usize) -> bool {
        self.pairs.binary_search(&(trial, test)).is_ok()
    }

    /// Swap the roles of trial and test.
    pub fn transpose(&self) -> Self {
        let mut pairs: Vec<_> = self.pairs.iter().map(|&(i, j)| (j, i)).collect();
        pairs.sort_unstable();
        Self {
            n_trial: self.n_test,
            n_test: self.n_trial,
            pairs,
        }
    }

    pub fn is_symmetric(&self) -> bool {
        self.n_trial == self.n_test && self.pairs.iter().all(|&(i, j)| self.contains(j, i))
    }
}

/// Pattern of trial/test hull pairs that intersect, default options.
pub fn sparsity_pattern(trial: &[ConvexPolytope], test: &[ConvexPolytope]) -> Result<SparsityPattern> {
    sparsity_pattern_with(trial, test, &PatternOptions::default())
}

/// Broad phase on bounding boxes, then the separating-axis test on each
/// candidate pair in parallel.
pub fn sparsity_pattern_with(
    trial: &[ConvexPolytope],
    test: &[ConvexPolytope],
    options: &PatternOptions,
) -> Result<SparsityPattern> {
    let prepare = |hulls: &[ConvexPolytope]| -> Vec<ConvexPolytope> {
        match options.contact {
            ContactPolicy::Closed => hulls.to_vec(),
            ContactPolicy::Interior => hulls
                .iter()
                .map(|h| h.scaled_about_centroid(1.0 - INTERIOR_SHRINK))
                .collect(),
        }
    };
    let trial_hulls = prepare(trial);
    let test_hulls = prepare(test);
    let boxes = |hulls: &[ConvexPolytope]| -> Vec<Aabb> { hulls.iter().map(ConvexPolytope::bounding_box).collect() };
    let candidates = broad_phase_pairs(&boxes(&trial_hulls), &boxes(&test_hulls));
    let solver = options.solver.as_ref();
    let hits = candidates
        .into_par_iter()
        .map(|(i, j)| Ok(intersection_test(&trial_hulls[i], &test_hulls[j], solver)?.intersects().then_some((i, j))))
        .collect::<Result<Vec<_>>>()?;
    Ok(SparsityPattern {
        n_trial: trial.len(),
        n_test: test.len(),
        pairs: hits.into_iter().flatten().collect(),
    })
}

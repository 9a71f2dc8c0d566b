//! Observed convergence rates.

use crate::error::{FemError, Result};

/// Rate between two levels, ln(e₀/e₁) / ln(h₀/h₁). Equals log₂(e₀/e₁) when
/// the mesh size halves exactly.
pub fn observed_rate(h0: f64, e0: f64, h1: f64, e1: f64) -> f64 {
    (e0 / e1).ln() / (h0 / h1).ln()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvergenceRow {
    /// Realised mesh size.
    pub h: f64,
    pub error: f64,
    /// Rate against the previous row; `None` for the first.
    pub rate: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConvergenceTable {
    rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    /// Builds from (h, error) pairs with strictly decreasing h.
    pub fn new(levels: &[(f64, f64)]) -> Result<Self> {
        if levels.windows(2).any(|w| w[1].0 >= w[0].0) {
            return Err(FemError::InvalidArgument("mesh sizes must be strictly decreasing".into()));
        }
        let rows = levels
            .iter()
            .enumerate()
            .map(|(k, &(h, error))| ConvergenceRow {
                h,
                error,
                rate: (k > 0).then(|| observed_rate(levels[k - 1].0, levels[k - 1].1, h, error)),
            })
            .collect();
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[ConvergenceRow] {
        &self.rows
    }

    /// Rates between successive rows.
    pub fn rates(&self) -> Vec<f64> {
        self.rows.iter().filter_map(|r| r.rate).collect()
    }
}

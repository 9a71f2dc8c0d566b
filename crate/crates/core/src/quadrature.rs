//! Grundmann–Möller quadrature on simplices.
//!
//! The degree d = 2s+1 rule on the standard n-simplex S_n is
//!
//! ```text
//! Q(p) = Σ_{i=0}^{s} (−1)^i 2^{−2s} (d+n−2i)^d / (i! (d+n−i)!)
//!        Σ_{|β| = s−i, β_0 ≥ … ≥ β_n} [p((2β_0+1)/(d+n−2i), …, (2β_n+1)/(d+n−2i))]
//! ```
//!
//! where `[·]` sums over all distinct permutations of the argument. Nodes are
//! stored as barycentric tuples; barycentric coordinate k ≥ 1 is Cartesian
//! coordinate k−1 on S_n, coordinate 0 belongs to the origin vertex.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{FemError, Result};
use crate::mesh::AffineMap;

/// Largest node count a rule may have before generation is refused.
const MAX_NODES: u128 = 20_000_000;

/// Quadrature rule on the standard n-simplex with barycentric nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    dim: usize,
    degree: usize,
    bary: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Barycentric coordinates of node k (length n+1).
    pub fn node(&self, k: usize) -> &[f64] {
        let m = self.dim + 1;
        &self.bary[k * m..(k + 1) * m]
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.bary.chunks_exact(self.dim + 1)
    }

    /// Cartesian coordinates of node k on the standard simplex.
    pub fn reference_point(&self, k: usize) -> &[f64] {
        &self.node(k)[1..]
    }

    /// Σ |w_k|.
    pub fn abs_weight_sum(&self) -> f64 {
        self.weights.iter().map(|w| w.abs()).sum()
    }

    /// n!·Σ|w_k| + 1, computed from the weights.
    pub fn lebesgue_constant(&self) -> f64 {
        factorial(self.dim) * self.abs_weight_sum() + 1.0
    }

    /// Σ_k w_k f(x̂_k) over the standard simplex.
    pub fn integrate_reference(&self, mut f: impl FnMut(&[f64]) -> f64) -> f64 {
        (0..self.len()).map(|k| self.weights[k] * f(self.reference_point(k))).sum()
    }
}

/// Every distinct reordering of `tuple`, each exactly once, in
/// lexicographically descending order.
pub fn distinct_permutations<T: PartialOrd + Clone>(tuple: &[T]) -> Vec<Vec<T>> {
    let mut current = tuple.to_vec();
    current.sort_by(|a, b| b.partial_cmp(a).expect("permutation entries must be comparable"));
    let mut out = vec![current.clone()];
    while prev_permutation(&mut current) {
        out.push(current.clone());
    }
    out
}

/// Steps to the lexicographic predecessor; false once the tuple is ascending.
fn prev_permutation<T: PartialOrd>(v: &mut [T]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] <= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] >= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Nonincreasing (parts)-tuples of nonnegative integers summing to `total`.
fn partitions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    fn rec(remaining: usize, slots: usize, cap: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if slots == 0 {
            if remaining == 0 {
                out.push(prefix.clone());
            }
            return;
        }
        for part in (0..=remaining.min(cap)).rev() {
            if part * slots < remaining {
                break;
            }
            prefix.push(part);
            rec(remaining - part, slots - 1, part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(total, parts, total, &mut Vec::with_capacity(parts), &mut out);
    out
}

fn ln_factorial(k: usize) -> f64 {
    (2..=k).map(|j| (j as f64).ln()).sum()
}

pub(crate) fn factorial(k: usize) -> f64 {
    (2..=k).map(|j| j as f64).product()
}

fn binomial(n: u128, k: u128) -> Option<u128> {
    let k = k.min(n.checked_sub(k)?);
    let mut acc: u128 = 1;
    for j in 0..k {
        acc = acc.checked_mul(n - j)? / (j + 1);
    }
    Some(acc)
}

/// Signed weight of the i-th layer and the log of its magnitude.
fn layer_weight(n: usize, s: usize, i: usize) -> (f64, f64) {
    let d = 2 * s + 1;
    let ln_mag = -((2 * s) as f64) * std::f64::consts::LN_2 + d as f64 * ((d + n - 2 * i) as f64).ln()
        - ln_factorial(i)
        - ln_factorial(d + n - i);
    let sign = if i.is_multiple_of(2) { 1.0 } else { -1.0 };
    (sign, ln_mag)
}

/// Generates the degree 2s+1 rule on the n-simplex.
pub fn grundmann_moeller(n: usize, s: usize) -> Result<QuadratureRule> {
    let d = 2 * s + 1;
    let reject = |reason: String| FemError::Quadrature { dim: n, degree: d, reason };
    if n == 0 {
        return Err(reject("dimension must be at least 1".into()));
    }
    match binomial((n + s + 1) as u128, s as u128) {
        Some(count) if count <= MAX_NODES => {}
        _ => return Err(reject(format!("rule would need more than {MAX_NODES} nodes"))),
    }
    let mut bary = Vec::new();
    let mut weights = Vec::new();
    for i in 0..=s {
        let (sign, ln_mag) = layer_weight(n, s, i);
        if !(-700.0..=700.0).contains(&ln_mag) {
            return Err(reject(format!("weight magnitude e^{ln_mag:.1} is not representable")));
        }
        let w = sign * ln_mag.exp();
        let denom = (d + n - 2 * i) as f64;
        for beta in partitions(s - i, n + 1) {
            for perm in distinct_permutations(&beta) {
                bary.extend(perm.iter().map(|&b| (2 * b + 1) as f64 / denom));
                weights.push(w);
            }
        }
    }
    Ok(QuadratureRule {
        dim: n,
        degree: d,
        bary,
        weights,
    })
}

type RuleCache = Mutex<HashMap<(usize, usize), Arc<QuadratureRule>>>;

/// Process-wide memoised [`grundmann_moeller`].
pub fn cached_rule(n: usize, s: usize) -> Result<Arc<QuadratureRule>> {
    static CACHE: OnceLock<RuleCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(rule) = cache.lock().expect("rule cache poisoned").get(&(n, s)) {
        return Ok(Arc::clone(rule));
    }
    // Generated outside the lock; concurrent first calls build identical rules.
    let rule = Arc::new(grundmann_moeller(n, s)?);
    let mut guard = cache.lock().expect("rule cache poisoned");
    Ok(Arc::clone(guard.entry((n, s)).or_insert(rule)))
}

/// Smallest odd degree that is at least `degree`.
pub fn odd_degree_at_least(degree: usize) -> usize {
    if degree % 2 == 1 {
        degree
    } else {
        degree + 1
    }
}

/// Cached rule exact for polynomials of total degree `degree`.
pub fn rule_for_degree(n: usize, degree: usize) -> Result<Arc<QuadratureRule>> {
    let d = odd_degree_at_least(degree);
    cached_rule(n, (d - 1) / 2)
}

fn require_odd(n: usize, d: usize) -> Result<usize> {
    if d % 2 == 1 {
        Ok((d - 1) / 2)
    } else {
        Err(FemError::Quadrature {
            dim: n,
            degree: d,
            reason: "Grundmann–Möller degrees are odd".into(),
        })
    }
}

/// Node count C((2n+d+1)/2, (d−1)/2) of the degree-d rule.
pub fn rule_cost(n: usize, d: usize) -> Result<u128> {
    let s = require_odd(n, d)?;
    binomial((n + s + 1) as u128, s as u128).ok_or_else(|| FemError::Quadrature {
        dim: n,
        degree: d,
        reason: "node count overflows".into(),
    })
}

/// Node count ((d+1)/2)^n of the tensor-product Gauss rule of degree d.
pub fn tensor_product_cost(n: usize, d: usize) -> Result<u128> {
    let s = require_odd(n, d)?;
    ((s + 1) as u128).checked_pow(n as u32).ok_or_else(|| FemError::Quadrature {
        dim: n,
        degree: d,
        reason: "node count overflows".into(),
    })
}

/// Stability constant of the degree-d rule in the quadrature error bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorFactorReport {
    pub dim: usize,
    pub degree: usize,
    /// W = Σ|w_k| on the standard simplex.
    pub lebesgue_w: f64,
    /// n!·W + 1.
    pub error_factor: f64,
}

/// Error factor from the closed form
/// 1 + n! Σ_i 2^{1−d} (d−2i+n)^d / (i!(d−i+n)!) · C(n+s−i, n).
pub fn error_factor(n: usize, d: usize) -> Result<ErrorFactorReport> {
    let s = require_odd(n, d)?;
    let mut w = 0.0;
    for i in 0..=s {
        let (_, ln_mag) = layer_weight(n, s, i);
        let ln_count = ln_factorial(n + s - i) - ln_factorial(n) - ln_factorial(s - i);
        w += (ln_mag + ln_count).exp();
    }
    Ok(ErrorFactorReport {
        dim: n,
        degree: d,
        lebesgue_w: w,
        error_factor: factorial(n) * w + 1.0,
    })
}

/// ∫_T f over the simplex T = map(S_n), as |det J|·Σ_k w_k f(map(x̂_k)).
/// The weights already carry the 1/n! volume of S_n.
pub fn integrate_on_simplex(rule: &QuadratureRule, map: &AffineMap, mut f: impl FnMut(&[f64]) -> f64) -> Result<f64> {
    if rule.dim() != map.dim() {
        return Err(FemError::DimensionMismatch {
            expected: map.dim(),
            found: rule.dim(),
        });
    }
    let sum: f64 = (0..rule.len())
        .map(|k| rule.weights[k] * f(&map.apply(rule.reference_point(k))))
        .sum();
    Ok(map.abs_det_j() * sum)
}

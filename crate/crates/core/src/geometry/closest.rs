//! Closest pair between two convex polytopes.
//!
//! Both solvers minimise ‖Σ a_i u_i − Σ b_j v_j‖² over the product of two
//! probability simplices. Coordinates are centred and scaled to unit size
//! first so tolerances are relative to the problem.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::{dot, ConvexPolytope};
use crate::error::{FemError, Result};
use crate::mesh::Point;
use crate::registry::Registry;

/// Squared normalised norm treated as zero distance.
const ZERO_NORM_SQ: f64 = 1e-28;
/// Frank–Wolfe converges slowly when the origin sits near the boundary of
/// U − V. The iterate is always feasible, so once ‖x‖ ≤ 1e-10 (normalised)
/// the true distance is certainly inside the touch tolerance.
const FW_ZERO_NORM_SQ: f64 = 1e-20;
/// Absolute floor on the normalised duality gap. Below it ties between
/// mesh-aligned vertices make the corral cycle. A gap this small still
/// pins the distance down unless it is under ~1e-8 (normalised), which is
/// inside the touch band; the separating axis is verified exactly anyway.
const GAP_FLOOR: f64 = 1e-16;
/// Roundoff level of the gap once the corral stops changing. Normalised
/// points have norm ≤ 2 and x is a combination of them, so x (and hence the
/// gap) carries an absolute error of a few ulps of ‖p‖².
const STUCK_GAP_FLOOR: f64 = 1e-14;

/// Closest points p_U ∈ U and p_V ∈ V with their convex weights.
#[derive(Clone, Debug, PartialEq)]
pub struct ClosestPair {
    pub on_u: Point,
    pub on_v: Point,
    pub distance: f64,
    pub weights_u: Vec<f64>,
    pub weights_v: Vec<f64>,
    pub iterations: usize,
}

/// Strategy for the closest-pair quadratic program.
pub trait ClosestPairSolver: Send + Sync {
    fn name(&self) -> &'static str;
    fn solve(&self, u: &ConvexPolytope, v: &ConvexPolytope) -> Result<ClosestPair>;
}

/// Registry of the built-in closest-pair solvers.
pub fn closest_pair_solvers() -> Registry<dyn ClosestPairSolver> {
    let mut r: Registry<dyn ClosestPairSolver> = Registry::new("closest-pair solver");
    r.register("min-norm-point", Arc::new(MinNormPoint::default()));
    r.register("away-step-frank-wolfe", Arc::new(AwayStepFrankWolfe::default()));
    r
}

/// Closest pair with the default solver.
pub fn closest_pair(u: &ConvexPolytope, v: &ConvexPolytope) -> Result<ClosestPair> {
    MinNormPoint::default().solve(u, v)
}

/// Vertices of both polytopes in centred, unit-scaled coordinates.
struct Normalized {
    dim: usize,
    u: Vec<f64>,
    v: Vec<f64>,
}

impl Normalized {
    fn new(u: &ConvexPolytope, v: &ConvexPolytope) -> Result<Self> {
        if u.dim() != v.dim() {
            return Err(FemError::DimensionMismatch {
                expected: u.dim(),
                found: v.dim(),
            });
        }
        let dim = u.dim();
        let all = || u.vertices().iter().chain(v.vertices());
        let count = (u.vertices().len() + v.vertices().len()) as f64;
        let mut centre = vec![0.0; dim];
        for p in all() {
            centre.iter_mut().zip(p.iter()).for_each(|(c, x)| *c += x / count);
        }
        let radius = all()
            .map(|p| p.iter().zip(&centre).map(|(x, c)| (x - c) * (x - c)).sum::<f64>().sqrt())
            .fold(0.0, f64::max);
        let scale = if radius > 0.0 { 1.0 / radius } else { 1.0 };
        let flat = |poly: &ConvexPolytope| -> Vec<f64> {
            poly.vertices()
                .iter()
                .flat_map(|p| p.iter().zip(&centre).map(|(x, c)| (x - c) * scale).collect::<Vec<_>>())
                .collect()
        };
        Ok(Self {
            dim,
            u: flat(u),
            v: flat(v),
        })
    }

    fn u(&self, i: usize) -> &[f64] {
        &self.u[i * self.dim..(i + 1) * self.dim]
    }

    fn v(&self, j: usize) -> &[f64] {
        &self.v[j * self.dim..(j + 1) * self.dim]
    }

    fn nu(&self) -> usize {
        self.u.len() / self.dim.max(1)
    }

    fn nv(&self) -> usize {
        self.v.len() / self.dim.max(1)
    }

    fn diff(&self, i: usize, j: usize) -> Vec<f64> {
        self.u(i).iter().zip(self.v(j)).map(|(a, b)| a - b).collect()
    }

    /// Vertex of U − V minimising ⟨x, ·⟩.
    fn lmo(&self, x: &[f64]) -> (usize, usize) {
        let i = argbest((0..self.nu()).map(|i| dot(self.u(i), x)), |a, b| a < b);
        let j = argbest((0..self.nv()).map(|j| dot(self.v(j), x)), |a, b| a > b);
        (i, j)
    }

    fn point(&self, a: &[f64], b: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; self.dim];
        for (i, &w) in a.iter().enumerate() {
            x.iter_mut().zip(self.u(i)).for_each(|(xi, ui)| *xi += w * ui);
        }
        for (j, &w) in b.iter().enumerate() {
            x.iter_mut().zip(self.v(j)).for_each(|(xi, vj)| *xi -= w * vj);
        }
        x
    }
}

fn argbest(values: impl Iterator<Item = f64>, better: impl Fn(f64, f64) -> bool) -> usize {
    let mut best = (0, f64::NAN);
    for (k, t) in values.enumerate() {
        if k == 0 || better(t, best.1) {
            best = (k, t);
        }
    }
    best.0
}

/// Maps convex weights back to the original coordinates.
fn finish(u: &ConvexPolytope, v: &ConvexPolytope, weights_u: Vec<f64>, weights_v: Vec<f64>, iterations: usize) -> ClosestPair {
    let combine = |poly: &ConvexPolytope, w: &[f64]| {
        let mut p = vec![0.0; poly.dim()];
        for (vert, &wk) in poly.vertices().iter().zip(w) {
            p.iter_mut().zip(vert.iter()).for_each(|(pi, x)| *pi += wk * x);
        }
        Point::new(p)
    };
    let on_u = combine(u, &weights_u);
    let on_v = combine(v, &weights_v);
    ClosestPair {
        distance: on_u.distance(&on_v),
        on_u,
        on_v,
        weights_u,
        weights_v,
        iterations,
    }
}

/// Wolfe's minimum-norm-point algorithm on the Minkowski difference U − V,
/// generated lazily from vertex pairs. Terminates finitely in exact
/// arithmetic and returns an exact optimum up to roundoff.
#[derive(Clone, Debug)]
pub struct MinNormPoint {
    pub max_iterations: usize,
    /// Relative duality-gap tolerance, ‖x‖² − ⟨x, p⟩ ≤ tol·‖x‖².
    pub tolerance: f64,
}

impl Default for MinNormPoint {
    fn default() -> Self {
        Self {
            max_iterations: 10_000,
            tolerance: 1e-12,
        }
    }
}

/// Weights of the point of minimum norm in the affine hull of `pts`.
fn affine_minimizer(pts: &[Vec<f64>]) -> Vec<f64> {
    let m = pts.len();
    if m == 1 {
        return vec![1.0];
    }
    let n = pts[0].len();
    let d = DMatrix::from_fn(n, m - 1, |r, c| pts[c + 1][r] - pts[0][r]);
    let rhs = DVector::from_iterator(n, pts[0].iter().map(|x| -x));
    let svd = d.svd(true, true);
    let cutoff = 1e-13 * svd.singular_values.max();
    let beta = svd.solve(&rhs, cutoff).expect("u and v were computed");
    let mut alpha = Vec::with_capacity(m);
    alpha.push(1.0 - beta.sum());
    alpha.extend(beta.iter());
    alpha
}

impl ClosestPairSolver for MinNormPoint {
    fn name(&self) -> &'static str {
        "min-norm-point"
    }

    fn solve(&self, u: &ConvexPolytope, v: &ConvexPolytope) -> Result<ClosestPair> {
        let q = Normalized::new(u, v)?;
        let combine = |pairs: &[(usize, usize)], lambda: &[f64], it: usize| {
            let mut wu = vec![0.0; q.nu()];
            let mut wv = vec![0.0; q.nv()];
            for (&(i, j), &l) in pairs.iter().zip(lambda) {
                wu[i] += l;
                wv[j] += l;
            }
            finish(u, v, wu, wv, it)
        };

        let cu = u.centroid();
        let cv = v.centroid();
        let start_dir: Vec<f64> = cu.iter().zip(&cv).map(|(a, b)| a - b).collect();
        let start = q.lmo(&start_dir);
        let mut pairs = vec![start];
        let mut pts = vec![q.diff(start.0, start.1)];
        let mut lambda = vec![1.0];
        let mut x = pts[0].clone();
        let mut gap = f64::INFINITY;

        for it in 1..=self.max_iterations {
            let xx = dot(&x, &x);
            if xx <= ZERO_NORM_SQ {
                return Ok(combine(&pairs, &lambda, it));
            }
            let (i, j) = q.lmo(&x);
            let p = q.diff(i, j);
            gap = xx - dot(&x, &p);
            if gap <= self.tolerance * xx + GAP_FLOOR {
                return Ok(combine(&pairs, &lambda, it));
            }
            if pairs.contains(&(i, j)) {
                // No progress possible: the corral already holds the
                // minimising vertex, so the remaining gap is roundoff.
                if gap <= 1e-8 * xx + STUCK_GAP_FLOOR {
                    return Ok(combine(&pairs, &lambda, it));
                }
                return Err(FemError::ClosestPairNotConverged {
                    solver: self.name(),
                    iterations: it,
                    gap,
                });
            }
            pairs.push((i, j));
            pts.push(p);
            lambda.push(0.0);

            loop {
                let alpha = affine_minimizer(&pts);
                if alpha.iter().all(|&a| a > 0.0) {
                    lambda = alpha;
                    break;
                }
                let mut theta = 1.0;
                let mut hit = None;
                for (k, (&a, &l)) in alpha.iter().zip(&lambda).enumerate() {
                    if a <= 0.0 && l - a > 0.0 {
                        let t = l / (l - a);
                        if t < theta || hit.is_none() {
                            theta = t;
                            hit = Some(k);
                        }
                    }
                }
                for (l, a) in lambda.iter_mut().zip(&alpha) {
                    *l = theta * a + (1.0 - theta) * *l;
                }
                if let Some(k) = hit {
                    lambda[k] = 0.0;
                }
                let mut k = 0;
                while k < lambda.len() {
                    if lambda[k] <= 1e-15 {
                        lambda.remove(k);
                        pts.remove(k);
                        pairs.remove(k);
                    } else {
                        k += 1;
                    }
                }
                let total: f64 = lambda.iter().sum();
                lambda.iter_mut().for_each(|l| *l /= total);
            }
            x = vec![0.0; q.dim];
            for (pt, &l) in pts.iter().zip(&lambda) {
                x.iter_mut().zip(pt).for_each(|(xi, pi)| *xi += l * pi);
            }
        }
        Err(FemError::ClosestPairNotConverged {
            solver: self.name(),
            iterations: self.max_iterations,
            gap,
        })
    }
}

/// Away-step Frank–Wolfe with exact line search over the product of the
/// two weight simplices. Converges linearly, but the rate degrades when the
/// origin lies close to the boundary of U − V, so near-contact pairs can
/// exhaust the iteration cap and return
/// [`FemError::ClosestPairNotConverged`].
#[derive(Clone, Debug)]
pub struct AwayStepFrankWolfe {
    pub max_iterations: usize,
    /// Absolute Frank–Wolfe gap tolerance in normalised coordinates.
    pub tolerance: f64,
}

impl Default for AwayStepFrankWolfe {
    fn default() -> Self {
        Self {
            max_iterations: 10_000,
            tolerance: 1e-12,
        }
    }
}

impl ClosestPairSolver for AwayStepFrankWolfe {
    fn name(&self) -> &'static str {
        "away-step-frank-wolfe"
    }

    fn solve(&self, u: &ConvexPolytope, v: &ConvexPolytope) -> Result<ClosestPair> {
        let q = Normalized::new(u, v)?;
        let mut a = vec![0.0; q.nu()];
        let mut b = vec![0.0; q.nv()];
        a[0] = 1.0;
        b[0] = 1.0;
        let mut gap = f64::INFINITY;

        for it in 1..=self.max_iterations {
            let x = q.point(&a, &b);
            let xx = dot(&x, &x);
            if xx <= FW_ZERO_NORM_SQ {
                return Ok(finish(u, v, a, b, it));
            }
            let (i, j) = q.lmo(&x);
            let s = q.diff(i, j);
            gap = xx - dot(&x, &s);
            if gap <= self.tolerance {
                return Ok(finish(u, v, a, b, it));
            }
            // Away atom: active vertices maximising ⟨x, u_i⟩ and minimising ⟨x, v_j⟩.
            let ia = argbest(
                (0..q.nu()).map(|k| if a[k] > 0.0 { dot(q.u(k), &x) } else { f64::NEG_INFINITY }),
                |p, r| p > r,
            );
            let jb = argbest(
                (0..q.nv()).map(|k| if b[k] > 0.0 { dot(q.v(k), &x) } else { f64::INFINITY }),
                |p, r| p < r,
            );
            let away = q.diff(ia, jb);
            let away_gap = dot(&x, &away) - xx;

            if gap >= away_gap {
                let d: Vec<f64> = s.iter().zip(&x).map(|(si, xi)| si - xi).collect();
                let dd = dot(&d, &d);
                let gamma = if dd > 0.0 { (gap / dd).clamp(0.0, 1.0) } else { 0.0 };
                a.iter_mut().for_each(|w| *w *= 1.0 - gamma);
                b.iter_mut().for_each(|w| *w *= 1.0 - gamma);
                a[i] += gamma;
                b[j] += gamma;
            } else {
                let d: Vec<f64> = x.iter().zip(&away).map(|(xi, ai)| xi - ai).collect();
                let dd = dot(&d, &d);
                let limit = |w: f64| if w < 1.0 { w / (1.0 - w) } else { f64::INFINITY };
                let gamma_max = limit(a[ia]).min(limit(b[jb]));
                let gamma = if dd > 0.0 { (away_gap / dd).min(gamma_max) } else { 0.0 };
                a.iter_mut().for_each(|w| *w *= 1.0 + gamma);
                b.iter_mut().for_each(|w| *w *= 1.0 + gamma);
                a[ia] -= gamma;
                b[jb] -= gamma;
                for w in a.iter_mut().chain(b.iter_mut()) {
                    if *w < 1e-15 {
                        *w = 0.0;
                    }
                }
            }
        }
        Err(FemError::ClosestPairNotConverged {
            solver: self.name(),
            iterations: self.max_iterations,
            gap,
        })
    }
}

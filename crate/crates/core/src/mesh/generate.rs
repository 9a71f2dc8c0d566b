//! Uniform structured meshes of intervals and rectangles.

use super::{Facet, Point, Simplex, SimplicialMesh};
use crate::error::{FemError, Result};

/// How the caller specifies element size for [`uniform_rectangle_mesh`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MeshSize {
    /// Grid spacing (leg length of the right triangles). Must divide both
    /// side lengths.
    Spacing(f64),
    /// Upper bound on the longest triangle side. The cell counts are the
    /// smallest ones whose diagonals do not exceed it.
    MaxSide(f64),
}

/// Diagonal layout of the split grid cells.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Diagonal {
    /// Every cell is cut from its lower-left to its upper-right corner.
    #[default]
    Forward,
    /// Left half as [`Diagonal::Forward`], right half mirrored, so the mesh is
    /// symmetric under reflection about the vertical centre line. Forces an
    /// even number of columns.
    Mirrored,
}

/// A generated rectangle mesh together with its realised size.
#[derive(Clone, Debug)]
pub struct GridMesh {
    pub mesh: SimplicialMesh,
    /// Longest triangle side actually realised.
    pub max_side: f64,
    /// Cell counts along x and y.
    pub cells: [usize; 2],
}

fn divisions(length: f64, spacing: f64) -> Result<usize> {
    let q = length / spacing;
    let n = q.round();
    if n < 1.0 || (q - n).abs() > 1e-9 * q.max(1.0) {
        return Err(FemError::InvalidArgument(format!(
            "spacing {spacing} does not divide length {length}"
        )));
    }
    Ok(n as usize)
}

fn check_range(name: &str, (lo, hi): (f64, f64)) -> Result<f64> {
    if !(lo.is_finite() && hi.is_finite()) || hi <= lo {
        return Err(FemError::InvalidArgument(format!("empty {name} range ({lo}, {hi})")));
    }
    Ok(hi - lo)
}

fn check_size(h: f64) -> Result<()> {
    if !(h.is_finite() && h > 0.0) {
        return Err(FemError::InvalidArgument(format!("mesh size must be positive, got {h}")));
    }
    Ok(())
}

/// Uniform mesh of the interval `range` with spacing `h` (which must divide
/// its length). Boundary facets are the two endpoints.
pub fn uniform_interval_mesh(range: (f64, f64), h: f64) -> Result<SimplicialMesh> {
    check_size(h)?;
    let len = check_range("interval", range)?;
    let n = divisions(len, h)?;
    let points = (0..=n)
        .map(|i| Point::new(vec![range.0 + len * i as f64 / n as f64]))
        .collect();
    let simplices = (0..n).map(|i| Simplex::new(vec![i, i + 1])).collect();
    let boundary = vec![Facet::new(vec![0]), Facet::new(vec![n])];
    SimplicialMesh::new(1, points, simplices, boundary, Vec::new())
}

/// Axis-aligned rectangle split into right triangles.
///
/// Points are numbered row by row from the lower-left corner. Boundary
/// facets run bottom, right, top, left. With [`MeshSize::MaxSide`] the
/// realised longest side is reported in [`GridMesh::max_side`] and never
/// exceeds the request.
pub fn uniform_rectangle_mesh(
    x_range: (f64, f64),
    y_range: (f64, f64),
    size: MeshSize,
    diagonal: Diagonal,
) -> Result<GridMesh> {
    let lx = check_range("x", x_range)?;
    let ly = check_range("y", y_range)?;
    let (mut nx, ny) = match size {
        MeshSize::Spacing(h) => {
            check_size(h)?;
            (divisions(lx, h)?, divisions(ly, h)?)
        }
        MeshSize::MaxSide(h) => {
            check_size(h)?;
            let leg = h / std::f64::consts::SQRT_2;
            let count = |l: f64| ((l / leg) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
            (count(lx), count(ly))
        }
    };
    if diagonal == Diagonal::Mirrored && nx % 2 == 1 {
        if matches!(size, MeshSize::Spacing(_)) {
            return Err(FemError::InvalidArgument(
                "mirrored diagonals need an even number of columns".into(),
            ));
        }
        nx += 1;
    }

    let idx = |i: usize, j: usize| j * (nx + 1) + i;
    let mut points = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            points.push(Point::new(vec![
                x_range.0 + lx * i as f64 / nx as f64,
                y_range.0 + ly * j as f64 / ny as f64,
            ]));
        }
    }
    let mut simplices = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let (a, b, c, d) = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
            let forward = match diagonal {
                Diagonal::Forward => true,
                Diagonal::Mirrored => 2 * i < nx,
            };
            if forward {
                simplices.push(Simplex::new(vec![a, b, c]));
                simplices.push(Simplex::new(vec![a, c, d]));
            } else {
                simplices.push(Simplex::new(vec![a, b, d]));
                simplices.push(Simplex::new(vec![b, c, d]));
            }
        }
    }
    let mut boundary = Vec::with_capacity(2 * (nx + ny));
    boundary.extend((0..nx).map(|i| Facet::new(vec![idx(i, 0), idx(i + 1, 0)])));
    boundary.extend((0..ny).map(|j| Facet::new(vec![idx(nx, j), idx(nx, j + 1)])));
    boundary.extend((0..nx).rev().map(|i| Facet::new(vec![idx(i + 1, ny), idx(i, ny)])));
    boundary.extend((0..ny).rev().map(|j| Facet::new(vec![idx(0, j + 1), idx(0, j)])));

    let mesh = SimplicialMesh::new(2, points, simplices, boundary, Vec::new())?;
    let max_side = mesh.max_edge_length();
    Ok(GridMesh {
        mesh,
        max_side,
        cells: [nx, ny],
    })
}

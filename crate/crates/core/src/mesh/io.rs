//! Line-oriented text format.
//!
//! ```text
//! dim <n>
//! points <count>      # then count lines of n reals
//! simplices <count>   # then count lines of n+1 zero-based indices
//! boundary <count>    # then count lines of n indices
//! active <count>      # then count lines of n indices
//! ```
//!
//! `#` starts a comment; blank lines are ignored.

use std::io::{BufRead, Write};

use super::{Facet, Point, Simplex, SimplicialMesh};
use crate::error::{FemError, Result};

pub fn load_mesh<R: BufRead>(reader: R) -> Result<SimplicialMesh> {
    let mut text = String::new();
    for line in reader.lines() {
        text.push_str(&line?);
        text.push('\n');
    }
    parse_mesh(&text)
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    /// Next non-empty line with comments stripped, and its 1-based number.
    fn next_content(&mut self) -> Option<(usize, &'a str)> {
        for (i, raw) in self.inner.by_ref() {
            self.last = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if !line.is_empty() {
                return Some((i + 1, line));
            }
        }
        None
    }

    fn err(&self, line: usize, message: impl Into<String>) -> FemError {
        FemError::Parse {
            line,
            message: message.into(),
        }
    }

    fn header(&mut self, keyword: &str) -> Result<usize> {
        let (line, text) = self
            .next_content()
            .ok_or_else(|| self.err(self.last, format!("expected `{keyword} <count>`, found end of input")))?;
        let mut parts = text.split_whitespace();
        if parts.next() != Some(keyword) {
            return Err(self.err(line, format!("expected `{keyword} <count>`, found `{text}`")));
        }
        let count = parts
            .next()
            .and_then(|c| c.parse::<usize>().ok())
            .ok_or_else(|| self.err(line, format!("`{keyword}` needs a nonnegative integer")))?;
        if parts.next().is_some() {
            return Err(self.err(line, format!("trailing tokens after `{keyword} {count}`")));
        }
        Ok(count)
    }

    fn rows<T: std::str::FromStr>(&mut self, count: usize, width: usize, what: &str) -> Result<Vec<Vec<T>>> {
        let mut out = Vec::with_capacity(count);
        for _ in 0..count {
            let (line, text) = self
                .next_content()
                .ok_or_else(|| self.err(self.last, format!("unexpected end of input in {what} block")))?;
            let row = text
                .split_whitespace()
                .map(|t| t.parse::<T>())
                .collect::<std::result::Result<Vec<T>, _>>()
                .map_err(|_| self.err(line, format!("malformed {what} entry `{text}`")))?;
            if row.len() != width {
                return Err(self.err(line, format!("{what} entry has {} values, expected {width}", row.len())));
            }
            out.push(row);
        }
        Ok(out)
    }
}

pub fn parse_mesh(text: &str) -> Result<SimplicialMesh> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
        last: 0,
    };
    let dim = lines.header("dim")?;
    if dim == 0 {
        return Err(lines.err(lines.last, "dimension must be positive"));
    }
    let n_points = lines.header("points")?;
    let points = lines.rows::<f64>(n_points, dim, "point")?;
    let n_simplices = lines.header("simplices")?;
    let simplices = lines.rows::<usize>(n_simplices, dim + 1, "simplex")?;
    let n_boundary = lines.header("boundary")?;
    let boundary = lines.rows::<usize>(n_boundary, dim, "boundary facet")?;
    let n_active = lines.header("active")?;
    let active = lines.rows::<usize>(n_active, dim, "active facet")?;
    if let Some((line, text)) = lines.next_content() {
        return Err(lines.err(line, format!("unexpected trailing content `{text}`")));
    }
    SimplicialMesh::new(
        dim,
        points.into_iter().map(Point::new).collect(),
        simplices.into_iter().map(Simplex::new).collect(),
        boundary.into_iter().map(Facet::new).collect(),
        active.into_iter().map(Facet::new).collect(),
    )
}

pub fn save_mesh<W: Write>(mesh: &SimplicialMesh, mut w: W) -> Result<()> {
    w.write_all(write_mesh_string(mesh).as_bytes())?;
    Ok(())
}

/// Serialises with shortest round-trip float formatting.
pub fn write_mesh_string(mesh: &SimplicialMesh) -> String {
    fn join<T: ToString>(row: &[T]) -> String {
        row.iter().map(T::to_string).collect::<Vec<_>>().join(" ")
    }
    let mut out = String::new();
    out.push_str(&format!("dim {}\n", mesh.dim()));
    out.push_str(&format!("points {}\n", mesh.num_points()));
    for p in mesh.points() {
        out.push_str(&join(p.coords()));
        out.push('\n');
    }
    out.push_str(&format!("simplices {}\n", mesh.num_simplices()));
    for s in mesh.simplices() {
        out.push_str(&join(s.vertices()));
        out.push('\n');
    }
    out.push_str(&format!("boundary {}\n", mesh.boundary_facets().len()));
    for f in mesh.boundary_facets() {
        out.push_str(&join(f.vertices()));
        out.push('\n');
    }
    out.push_str(&format!("active {}\n", mesh.active_boundary().len()));
    for f in mesh.active_boundary() {
        out.push_str(&join(f.vertices()));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comments_and_blank_lines() {
        let text = "# a triangle\ndim 2\n\npoints 3 # three\n0 0\n1 0\n0 1\nsimplices 1\n0 1 2\nboundary 3\n0 1\n1 2\n2 0\nactive 1\n0 1 # bottom\n";
        let m = parse_mesh(text).unwrap();
        assert_eq!(m.active_boundary().len(), 1);
    }

    #[test]
    fn malformed_input_reports_line() {
        let err = parse_mesh("dim 2\npoints 2\n0 0\n1 x\n").unwrap_err();
        assert!(matches!(err, FemError::Parse { line: 4, .. }), "{err}");
        let err = parse_mesh("dim 2\npoints 1\n0 0 0\n").unwrap_err();
        assert!(matches!(err, FemError::Parse { line: 3, .. }), "{err}");
        let err = parse_mesh("points 1\n").unwrap_err();
        assert!(matches!(err, FemError::Parse { line: 1, .. }), "{err}");
        let err = parse_mesh("dim 1\npoints 2\n0\n1\nsimplices 1\n0 1\nboundary 2\n0\n1\n").unwrap_err();
        assert!(err.to_string().contains("active"), "{err}");
    }

    #[test]
    fn round_trip() {
        let text = "dim 2\npoints 4\n0 0\n1 0\n0 1\n1 1\nsimplices 2\n0 1 3\n0 3 2\nboundary 4\n0 1\n1 3\n3 2\n2 0\nactive 1\n0 1\n";
        let m = parse_mesh(text).unwrap();
        let again = parse_mesh(&write_mesh_string(&m)).unwrap();
        assert_eq!(m, again);
        assert_eq!(write_mesh_string(&m), text);
    }
}

//! Per-corner scaled Jacobians, per-vertex quality and the distributions
//! behind the histogram and sorted-vertex views.

use nalgebra::Matrix3;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::Vector;
use crate::mesh::{Adjacency, CellKind, Mesh};

#[derive(Debug, Error, PartialEq)]
pub enum QualityError {
    #[error("cell {cell} out of range ({count} cells)")]
    CellOutOfRange { cell: usize, count: usize },
    #[error("corner {corner} out of range for a cell of arity {arity}")]
    CornerOutOfRange { corner: usize, arity: usize },
    #[error("histogram needs at least one bin")]
    ZeroBins,
}

/// Edges shorter than this make a corner degenerate.
pub const DEGENERATE_EDGE: f64 = 1e-30;

/// For each VTK hex corner, the three neighbours spanning a right-handed
/// frame at that corner.
pub const HEX_CORNER_NEIGHBORS: [[usize; 3]; 8] = [
    [1, 3, 4],
    [2, 0, 5],
    [3, 1, 6],
    [0, 2, 7],
    [7, 5, 0],
    [4, 6, 1],
    [5, 7, 2],
    [6, 4, 3],
];

/// Unclamped scaled Jacobian of one corner; `-1` for a degenerate corner.
pub fn raw_corner_jacobian(mesh: &Mesh, cell: usize, corner: usize) -> Result<f64, QualityError> {
    if cell >= mesh.cell_count() {
        return Err(QualityError::CellOutOfRange {
            cell,
            count: mesh.cell_count(),
        });
    }
    if corner >= mesh.arity() {
        return Err(QualityError::CornerOutOfRange {
            corner,
            arity: mesh.arity(),
        });
    }
    let c = mesh.cell(cell);
    let p = |k: usize| mesh.vertex(c[k]);
    let origin = p(corner);
    Ok(match mesh.kind() {
        CellKind::Hex => {
            let [a, b, d] = HEX_CORNER_NEIGHBORS[corner];
            let edges = [p(a) - origin, p(b) - origin, p(d) - origin];
            match normalize_all(&edges) {
                Some([e1, e2, e3]) => Matrix3::from_columns(&[e1, e2, e3]).determinant(),
                None => -1.0,
            }
        }
        CellKind::Quad => {
            let next = p((corner + 1) % 4) - origin;
            let prev = p((corner + 3) % 4) - origin;
            match normalize_all(&[next, prev]) {
                Some([e1, e2]) => e1.x * e2.y - e1.y * e2.x,
                None => -1.0,
            }
        }
    })
}

fn normalize_all<const N: usize>(edges: &[Vector; N]) -> Option<[Vector; N]> {
    let mut out = *edges;
    for e in &mut out {
        let len = e.norm();
        if len < DEGENERATE_EDGE {
            return None;
        }
        *e /= len;
    }
    Some(out)
}

/// Scaled Jacobian of a corner, clamped to `[-1, 1]`.
pub fn corner_scaled_jacobian(mesh: &Mesh, cell: usize, corner: usize) -> Result<f64, QualityError> {
    raw_corner_jacobian(mesh, cell, corner).map(|j| j.clamp(-1.0, 1.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CornerJacobian {
    pub cell: usize,
    /// Clamped to `[-1, 1]`.
    pub value: f64,
    pub raw: f64,
}

/// Vertex quality of a vertex no cell touches.
pub const ISOLATED_VERTEX_QUALITY: f64 = 1.0;

#[derive(Clone, Debug, PartialEq)]
pub struct QualityField {
    corners: Vec<Vec<CornerJacobian>>,
    vertex_quality: Vec<f64>,
    median: f64,
}

impl QualityField {
    /// Corners located at `v`, one per incident cell, ordered by cell id.
    pub fn corners(&self, v: usize) -> &[CornerJacobian] {
        &self.corners[v]
    }

    /// `J_m` per vertex: the minimum corner value at the vertex.
    pub fn vertex_quality(&self) -> &[f64] {
        &self.vertex_quality
    }

    pub fn quality(&self, v: usize) -> f64 {
        self.vertex_quality[v]
    }

    /// Median vertex quality (`q_m`).
    pub fn median(&self) -> f64 {
        self.median
    }

    pub fn len(&self) -> usize {
        self.vertex_quality.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertex_quality.is_empty()
    }

    /// Worst vertex and its quality.
    pub fn worst(&self) -> Option<(usize, f64)> {
        self.vertex_quality
            .iter()
            .copied()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
    }

    /// Builds a field directly from vertex qualities (no corner data). Used
    /// for distribution-only consumers and tests.
    pub fn from_vertex_quality(vertex_quality: Vec<f64>) -> Self {
        let median = median(&vertex_quality).unwrap_or(ISOLATED_VERTEX_QUALITY);
        Self {
            corners: vec![Vec::new(); vertex_quality.len()],
            vertex_quality,
            median,
        }
    }
}

/// Median; the mean of the two middle values for even counts.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    Some(if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    })
}

pub fn compute_quality_field(mesh: &Mesh, adjacency: &Adjacency) -> QualityField {
    let per_cell: Vec<Vec<(f64, f64)>> = (0..mesh.cell_count())
        .into_par_iter()
        .map(|c| {
            (0..mesh.arity())
                .map(|k| {
                    let raw = raw_corner_jacobian(mesh, c, k).expect("in range");
                    (raw.clamp(-1.0, 1.0), raw)
                })
                .collect()
        })
        .collect();

    let corners: Vec<Vec<CornerJacobian>> = (0..mesh.vertex_count())
        .map(|v| {
            adjacency
                .vertex_cells(v)
                .iter()
                .map(|&c| {
                    let k = mesh.cell(c).iter().position(|&x| x == v).expect("incident");
                    let (value, raw) = per_cell[c][k];
                    CornerJacobian { cell: c, value, raw }
                })
                .collect()
        })
        .collect();
    let vertex_quality: Vec<f64> = corners
        .iter()
        .map(|cs| {
            cs.iter()
                .map(|c| c.value)
                .min_by(f64::total_cmp)
                .unwrap_or(ISOLATED_VERTEX_QUALITY)
        })
        .collect();
    let median = median(&vertex_quality).unwrap_or(ISOLATED_VERTEX_QUALITY);
    QualityField {
        corners,
        vertex_quality,
        median,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QualityHistogram {
    /// `bins + 1` uniform edges over `[-1, 1]`.
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
    /// Vertex ids by ascending quality, ties by id.
    pub sorted_vertices: Vec<usize>,
}

/// Uniform histogram over `[-1, 1]`. A value on an interior edge goes to
/// the upper bin; the top edge is inclusive.
pub fn quality_histogram(field: &QualityField, bins: usize) -> Result<QualityHistogram, QualityError> {
    if bins == 0 {
        return Err(QualityError::ZeroBins);
    }
    let edges = (0..=bins).map(|i| -1.0 + 2.0 * i as f64 / bins as f64).collect();
    let mut counts = vec![0usize; bins];
    for &q in field.vertex_quality() {
        let t = ((q + 1.0) / 2.0 * bins as f64).floor();
        let bin = if t < 0.0 { 0 } else { (t as usize).min(bins - 1) };
        counts[bin] += 1;
    }
    let mut sorted_vertices: Vec<usize> = (0..field.len()).collect();
    sorted_vertices.sort_by(|&a, &b| field.quality(a).total_cmp(&field.quality(b)).then(a.cmp(&b)));
    Ok(QualityHistogram {
        edges,
        counts,
        sorted_vertices,
    })
}

/// `vertex,quality` lines for the debug dump.
pub fn quality_csv(field: &QualityField) -> String {
    let mut out = String::from("vertex,quality\n");
    for (v, q) in field.vertex_quality().iter().enumerate() {
        out.push_str(&format!("{v},{q:?}\n"));
    }
    out
}

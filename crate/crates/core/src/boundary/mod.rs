//! Boundary extraction and signed boundary error against a reference mesh.
//!
//! The error of an original boundary point is its distance to the closest
//! point on the reference boundary divided by the reference bounding-box
//! diagonal. It is positive when the point lies outside the reference and
//! negative inside.

mod curves;
mod extract;
mod surface;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use curves::{signed_boundary_error_2d, ReferenceCurves};
pub use extract::{extract_boundary_2d, extract_boundary_3d, BoundaryCurve, BoundarySurface};
pub use surface::{signed_boundary_error_3d, surface_errors, SignMode, SurfaceErrorField, SurfaceHit, SurfaceQuery};

#[derive(Debug, Error, PartialEq)]
pub enum BoundaryError {
    #[error("expected a {expected}D mesh, found {found}D")]
    WrongDimension { expected: usize, found: usize },
    #[error("non-manifold boundary at vertex {vertex} ({edges} incident boundary edges, expected 2)")]
    NonManifoldBoundary { vertex: usize, edges: usize },
    #[error("empty reference boundary")]
    EmptyReference,
    #[error("empty boundary: the mesh has no boundary vertices")]
    EmptyBoundary,
    #[error("reference bounding-box diagonal must be positive (got {0})")]
    DegenerateReference(f64),
    #[error("reference surface is not a closed manifold: unsigned only")]
    UnsignedOnly,
    #[error("no error record for loop vertex {0}")]
    MissingRecord(usize),
    #[error("cannot collate an empty set of records")]
    EmptyRecords,
}

/// Normalized errors at or below this magnitude count as on the boundary.
pub const ON_BOUNDARY: f64 = 1e-12;

fn classify(magnitude: f64, side: f64) -> f64 {
    if magnitude <= ON_BOUNDARY || side == 0.0 {
        0.0
    } else {
        magnitude * side.signum()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryErrorRecord {
    pub vertex: usize,
    /// Closest point on the reference boundary.
    pub closest: [f64; 3],
    /// Signed, normalized by the reference diagonal.
    pub error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LoopSeries {
    pub loop_index: usize,
    pub vertices: Vec<usize>,
    pub arc_length: Vec<f64>,
    pub errors: Vec<f64>,
}

/// Error series per loop in traversal order.
pub fn per_loop_series(loops: &[BoundaryCurve], records: &[BoundaryErrorRecord]) -> Result<Vec<LoopSeries>, BoundaryError> {
    let by_vertex: HashMap<usize, f64> = records.iter().map(|r| (r.vertex, r.error)).collect();
    loops
        .iter()
        .enumerate()
        .map(|(loop_index, l)| {
            let errors = l
                .vertices
                .iter()
                .map(|v| by_vertex.get(v).copied().ok_or(BoundaryError::MissingRecord(*v)))
                .collect::<Result<_, _>>()?;
            Ok(LoopSeries {
                loop_index,
                vertices: l.vertices.clone(),
                arc_length: l.arc_length.clone(),
                errors,
            })
        })
        .collect()
}

/// All errors sorted ascending against their percentile rank.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CollatedSeries {
    pub vertices: Vec<usize>,
    pub values: Vec<f64>,
    /// `rank / (N - 1)`, and `0` for a single record.
    pub percentiles: Vec<f64>,
}

impl CollatedSeries {
    /// Vertices whose percentile lies in `[lo, hi]`.
    pub fn vertices_in_range(&self, lo: f64, hi: f64) -> Vec<usize> {
        self.vertices
            .iter()
            .zip(&self.percentiles)
            .filter(|(_, &p)| p >= lo && p <= hi)
            .map(|(&v, _)| v)
            .collect()
    }
}

pub fn collate(records: &[BoundaryErrorRecord]) -> Result<CollatedSeries, BoundaryError> {
    if records.is_empty() {
        return Err(BoundaryError::EmptyRecords);
    }
    let mut sorted: Vec<&BoundaryErrorRecord> = records.iter().collect();
    sorted.sort_by(|a, b| a.error.total_cmp(&b.error).then(a.vertex.cmp(&b.vertex)));
    let n = sorted.len();
    let percentiles = (0..n)
        .map(|k| if n == 1 { 0.0 } else { k as f64 / (n - 1) as f64 })
        .collect();
    Ok(CollatedSeries {
        vertices: sorted.iter().map(|r| r.vertex).collect(),
        values: sorted.iter().map(|r| r.error).collect(),
        percentiles,
    })
}

/// `vertex,loop,arc_length,b_error` rows; loop and arc length are empty for
/// surface records.
pub fn boundary_csv(loops: &[LoopSeries], records: &[BoundaryErrorRecord]) -> String {
    let mut out = String::from("vertex,loop,arc_length,b_error\n");
    if loops.is_empty() {
        for r in records {
            out.push_str(&format!("{},,,{:?}\n", r.vertex, r.error));
        }
    } else {
        for l in loops {
            for i in 0..l.vertices.len() {
                out.push_str(&format!(
                    "{},{},{:?},{:?}\n",
                    l.vertices[i], l.loop_index, l.arc_length[i], l.errors[i]
                ));
            }
        }
    }
    out
}

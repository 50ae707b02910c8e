use serde::{Deserialize, Serialize};

use super::{ClusterSummary, GlyphError};
use crate::mesh::{Adjacency, Mesh, MeshFragment};
use crate::quality::{CornerJacobian, QualityField};

/// Cells incident to any cluster member, with original ids.
pub fn sub_region(mesh: &Mesh, adjacency: &Adjacency, cluster: &ClusterSummary) -> MeshFragment {
    let cells = cluster
        .members
        .iter()
        .flat_map(|&v| adjacency.vertex_cells(v).iter().copied())
        .collect();
    MeshFragment::from_cells(mesh, cells)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OneRing {
    pub vertex: usize,
    pub fragment: MeshFragment,
    /// Corner values at the vertex, ordered by cell id.
    pub corners: Vec<CornerJacobian>,
}

pub fn one_ring(mesh: &Mesh, adjacency: &Adjacency, field: &QualityField, vertex: usize) -> Result<OneRing, GlyphError> {
    if vertex >= mesh.vertex_count() {
        return Err(GlyphError::VertexOutOfRange {
            vertex,
            count: mesh.vertex_count(),
        });
    }
    let fragment = MeshFragment::from_cells(mesh, adjacency.vertex_cells(vertex).to_vec());
    let mut corners = field.corners(vertex).to_vec();
    corners.sort_by_key(|c| c.cell);
    Ok(OneRing {
        vertex,
        fragment,
        corners,
    })
}

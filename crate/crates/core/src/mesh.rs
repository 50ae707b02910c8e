//! Immutable hex/quad meshes, their derived adjacency, and triangulated
//! reference surfaces.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{Aabb, Point, Vector};

#[derive(Debug, Error, PartialEq)]
pub enum MeshError {
    #[error("connectivity length {len} is not a multiple of the cell arity {arity}")]
    ConnectivityLength { len: usize, arity: usize },
    #[error("cell {cell} references vertex {index} but the mesh has {count} vertices")]
    IndexOutOfRange { cell: usize, index: usize, count: usize },
    #[error("cell {cell} repeats vertex {vertex}")]
    RepeatedVertex { cell: usize, vertex: usize },
    #[error("quad mesh vertex {vertex} is not in the z = 0 plane (z = {z})")]
    NotPlanar { vertex: usize, z: f64 },
    #[error("vertex {vertex} has a non-finite coordinate")]
    NonFinite { vertex: usize },
    #[error("surface triangle {triangle} references vertex {index} but the surface has {count} vertices")]
    DanglingFacet { triangle: usize, index: usize, count: usize },
    #[error("UV data covers {got} triangles but the surface has {expected}")]
    UvLength { got: usize, expected: usize },
}

/// Cell type of a mesh. Every mesh holds a single kind.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CellKind {
    Quad,
    Hex,
}

/// Edges of a VTK hexahedron in local corner indices.
pub const HEX_EDGES: [[usize; 2]; 12] = [
    [0, 1],
    [1, 2],
    [2, 3],
    [3, 0],
    [4, 5],
    [5, 6],
    [6, 7],
    [7, 4],
    [0, 4],
    [1, 5],
    [2, 6],
    [3, 7],
];

/// Faces of a VTK hexahedron, each listed counter-clockwise when seen from
/// outside a positively oriented cell.
pub const HEX_FACES: [[usize; 4]; 6] = [
    [0, 3, 2, 1],
    [4, 5, 6, 7],
    [0, 1, 5, 4],
    [1, 2, 6, 5],
    [2, 3, 7, 6],
    [3, 0, 4, 7],
];

pub const QUAD_EDGES: [[usize; 2]; 4] = [[0, 1], [1, 2], [2, 3], [3, 0]];

impl CellKind {
    pub fn arity(self) -> usize {
        match self {
            CellKind::Quad => 4,
            CellKind::Hex => 8,
        }
    }

    pub fn dimension(self) -> usize {
        match self {
            CellKind::Quad => 2,
            CellKind::Hex => 3,
        }
    }

    pub fn edges(self) -> &'static [[usize; 2]] {
        match self {
            CellKind::Quad => &QUAD_EDGES,
            CellKind::Hex => &HEX_EDGES,
        }
    }

    pub fn faces(self) -> &'static [[usize; 4]] {
        match self {
            CellKind::Quad => &[],
            CellKind::Hex => &HEX_FACES,
        }
    }
}

/// A hexahedral (3D) or quadrilateral (2D) mesh. Cells are stored flat with a
/// fixed stride; hex corners follow the VTK ordering.
#[derive(Clone, Debug, PartialEq)]
pub struct Mesh {
    name: String,
    kind: CellKind,
    vertices: Vec<Point>,
    cells: Vec<usize>,
}

impl Mesh {
    pub fn new(
        name: impl Into<String>,
        kind: CellKind,
        vertices: Vec<Point>,
        cells: Vec<usize>,
    ) -> Result<Self, MeshError> {
        let arity = kind.arity();
        if !cells.len().is_multiple_of(arity) {
            return Err(MeshError::ConnectivityLength { len: cells.len(), arity });
        }
        for (i, p) in vertices.iter().enumerate() {
            if !(p.x.is_finite() && p.y.is_finite() && p.z.is_finite()) {
                return Err(MeshError::NonFinite { vertex: i });
            }
            if kind == CellKind::Quad && p.z != 0.0 {
                return Err(MeshError::NotPlanar { vertex: i, z: p.z });
            }
        }
        for (c, cell) in cells.chunks_exact(arity).enumerate() {
            for (k, &v) in cell.iter().enumerate() {
                if v >= vertices.len() {
                    return Err(MeshError::IndexOutOfRange {
                        cell: c,
                        index: v,
                        count: vertices.len(),
                    });
                }
                if cell[..k].contains(&v) {
                    return Err(MeshError::RepeatedVertex { cell: c, vertex: v });
                }
            }
        }
        Ok(Self {
            name: name.into(),
            kind,
            vertices,
            cells,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> CellKind {
        self.kind
    }

    pub fn dimension(&self) -> usize {
        self.kind.dimension()
    }

    pub fn arity(&self) -> usize {
        self.kind.arity()
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn vertex(&self, v: usize) -> &Point {
        &self.vertices[v]
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len() / self.arity()
    }

    pub fn cell(&self, c: usize) -> &[usize] {
        let a = self.arity();
        &self.cells[c * a..(c + 1) * a]
    }

    pub fn cells(&self) -> impl ExactSizeIterator<Item = &[usize]> + '_ {
        self.cells.chunks_exact(self.arity())
    }

    /// Flat connectivity, `arity` indices per cell.
    pub fn connectivity(&self) -> &[usize] {
        &self.cells
    }

    pub fn cell_centroid(&self, c: usize) -> Point {
        let cell = self.cell(c);
        let sum = cell
            .iter()
            .fold(Vector::zeros(), |acc, &v| acc + self.vertices[v].coords);
        Point::from(sum / cell.len() as f64)
    }

    pub fn cell_bounds(&self, c: usize) -> Aabb {
        Aabb::from_points(self.cell(c).iter().map(|&v| &self.vertices[v]))
    }

    pub fn bounds(&self) -> Aabb {
        Aabb::from_points(self.vertices.iter())
    }

    /// Returns a copy with every vertex mapped through `f`. Used for
    /// transformed fixtures; connectivity is unchanged.
    pub fn map_vertices(&self, f: impl Fn(&Point) -> Point) -> Result<Self, MeshError> {
        Self::new(
            self.name.clone(),
            self.kind,
            self.vertices.iter().map(f).collect(),
            self.cells.clone(),
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    /// Endpoints, smaller index first.
    pub vertices: [usize; 2],
    /// Incident cells in ascending order.
    pub cells: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Face {
    /// Corners in the orientation of the first incident cell (outward for a
    /// positively oriented cell).
    pub vertices: [usize; 4],
    pub cells: Vec<usize>,
}

/// Incidence tables derived from a mesh. Edge and face order is the order of
/// first appearance while scanning cells in index order.
#[derive(Clone, Debug)]
pub struct Adjacency {
    vertex_cells: Vec<Vec<usize>>,
    vertex_edges: Vec<Vec<usize>>,
    edges: Vec<Edge>,
    faces: Vec<Face>,
    average_edge_length: f64,
    bounds: Aabb,
}

impl Adjacency {
    pub fn build(mesh: &Mesh) -> Self {
        let nv = mesh.vertex_count();
        let mut vertex_cells = vec![Vec::new(); nv];
        let mut vertex_edges = vec![Vec::new(); nv];
        let mut edges: Vec<Edge> = Vec::new();
        let mut faces: Vec<Face> = Vec::new();
        let mut edge_index: HashMap<[usize; 2], usize> = HashMap::new();
        let mut face_index: HashMap<[usize; 4], usize> = HashMap::new();

        for (c, cell) in mesh.cells().enumerate() {
            for &v in cell {
                vertex_cells[v].push(c);
            }
            for &[a, b] in mesh.kind().edges() {
                let (u, w) = (cell[a], cell[b]);
                let key = if u < w { [u, w] } else { [w, u] };
                let e = *edge_index.entry(key).or_insert_with(|| {
                    edges.push(Edge {
                        vertices: key,
                        cells: Vec::new(),
                    });
                    vertex_edges[key[0]].push(edges.len() - 1);
                    vertex_edges[key[1]].push(edges.len() - 1);
                    edges.len() - 1
                });
                edges[e].cells.push(c);
            }
            for local in mesh.kind().faces() {
                let corners = local.map(|k| cell[k]);
                let mut key = corners;
                key.sort_unstable();
                let f = *face_index.entry(key).or_insert_with(|| {
                    faces.push(Face {
                        vertices: corners,
                        cells: Vec::new(),
                    });
                    faces.len() - 1
                });
                faces[f].cells.push(c);
            }
        }

        let average_edge_length = if edges.is_empty() {
            0.0
        } else {
            edges
                .iter()
                .map(|e| (mesh.vertex(e.vertices[1]) - mesh.vertex(e.vertices[0])).norm())
                .sum::<f64>()
                / edges.len() as f64
        };

        Self {
            vertex_cells,
            vertex_edges,
            edges,
            faces,
            average_edge_length,
            bounds: mesh.bounds(),
        }
    }

    pub fn vertex_cells(&self, v: usize) -> &[usize] {
        &self.vertex_cells[v]
    }

    pub fn vertex_edges(&self, v: usize) -> &[usize] {
        &self.vertex_edges[v]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Unique faces; empty for quad meshes.
    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn average_edge_length(&self) -> f64 {
        self.average_edge_length
    }

    pub fn bounds(&self) -> &Aabb {
        &self.bounds
    }

    pub fn diagonal(&self) -> f64 {
        self.bounds.diagonal()
    }
}

/// A subset of a mesh addressed by original ids.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeshFragment {
    /// Original cell ids, ascending.
    pub cells: Vec<usize>,
    /// Original ids of every corner of those cells, ascending.
    pub vertices: Vec<usize>,
}

impl MeshFragment {
    pub fn from_cells(mesh: &Mesh, mut cells: Vec<usize>) -> Self {
        cells.sort_unstable();
        cells.dedup();
        let mut vertices: Vec<usize> = cells.iter().flat_map(|&c| mesh.cell(c).iter().copied()).collect();
        vertices.sort_unstable();
        vertices.dedup();
        Self { cells, vertices }
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Standalone mesh with local indices; local vertex `i` is
    /// `self.vertices[i]` in the source.
    pub fn to_mesh(&self, mesh: &Mesh) -> Mesh {
        let local: HashMap<usize, usize> = self.vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let vertices = self.vertices.iter().map(|&v| *mesh.vertex(v)).collect();
        let cells = self
            .cells
            .iter()
            .flat_map(|&c| mesh.cell(c).iter().map(|v| local[v]))
            .collect();
        Mesh::new(format!("{}-fragment", mesh.name()), mesh.kind(), vertices, cells)
            .expect("fragment of a valid mesh is valid")
    }
}

/// Triangulated reference surface with optional per-corner UVs.
#[derive(Clone, Debug)]
pub struct ReferenceSurface {
    vertices: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    uv: Option<Vec<[[f64; 2]; 3]>>,
    closed_manifold: bool,
}

impl ReferenceSurface {
    pub fn new(
        vertices: Vec<Point>,
        triangles: Vec<[usize; 3]>,
        uv: Option<Vec<[[f64; 2]; 3]>>,
    ) -> Result<Self, MeshError> {
        for (t, tri) in triangles.iter().enumerate() {
            for &i in tri {
                if i >= vertices.len() {
                    return Err(MeshError::DanglingFacet {
                        triangle: t,
                        index: i,
                        count: vertices.len(),
                    });
                }
            }
        }
        if let Some(uv) = &uv {
            if uv.len() != triangles.len() {
                return Err(MeshError::UvLength {
                    got: uv.len(),
                    expected: triangles.len(),
                });
            }
        }
        let closed_manifold = is_closed_oriented(&triangles);
        Ok(Self {
            vertices,
            triangles,
            uv,
            closed_manifold,
        })
    }

    /// Boundary faces of a hex mesh split into triangles (`abc`, `acd`).
    pub fn from_quads(vertices: Vec<Point>, quads: &[[usize; 4]]) -> Result<Self, MeshError> {
        let triangles = quads
            .iter()
            .flat_map(|q| [[q[0], q[1], q[2]], [q[0], q[2], q[3]]])
            .collect();
        Self::new(vertices, triangles, None)
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    /// UV per triangle corner, parallel to `triangles()`.
    pub fn uv(&self) -> Option<&[[[f64; 2]; 3]]> {
        self.uv.as_deref()
    }

    /// One UV per surface vertex, when the map has no seams (every vertex
    /// gets the same UV from all its triangles).
    pub fn vertex_uv(&self) -> Option<Vec<[f64; 2]>> {
        let uv = self.uv.as_ref()?;
        let mut out: Vec<Option<[f64; 2]>> = vec![None; self.vertices.len()];
        for (tri, tuv) in self.triangles.iter().zip(uv) {
            for k in 0..3 {
                match out[tri[k]] {
                    None => out[tri[k]] = Some(tuv[k]),
                    Some(prev) if prev != tuv[k] => return None,
                    Some(_) => {}
                }
            }
        }
        out.into_iter().collect()
    }

    /// Every edge is shared by exactly two triangles traversing it in
    /// opposite directions.
    pub fn is_closed_manifold(&self) -> bool {
        self.closed_manifold
    }

    pub fn bounds(&self) -> Aabb {
        Aabb::from_points(self.vertices.iter())
    }
}

fn is_closed_oriented(triangles: &[[usize; 3]]) -> bool {
    if triangles.is_empty() {
        return false;
    }
    let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
    for t in triangles {
        for k in 0..3 {
            *directed.entry((t[k], t[(k + 1) % 3])).or_default() += 1;
        }
    }
    directed
        .iter()
        .all(|(&(a, b), &n)| n == 1 && directed.get(&(b, a)) == Some(&1))
}

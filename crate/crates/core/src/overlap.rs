//! Overlapping vertices (distinct vertices at nearly the same position) and
//! overlapping cells (a vertex inside a cell it does not belong to), plus
//! the arrow annotations that point at them.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geometry::{tet_barycentric, triangle_barycentric_2d, AabbTree, Point, Vector};
use crate::mesh::{Adjacency, CellKind, Mesh, HEX_FACES};

/// Default overlap distance as a fraction of the bounding-box diagonal.
pub const DEFAULT_EPSILON_REL: f64 = 1e-6;
/// Barycentric slack for the containment predicate.
pub const BARYCENTRIC_TOLERANCE: f64 = -1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VertexPair {
    pub a: usize,
    pub b: usize,
    pub distance: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Containment {
    pub vertex: usize,
    pub cell: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ArrowSource {
    /// Half of the arrow pair for an overlapping-vertex pair.
    VertexPair { partner: usize },
    Containment { cell: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArrowTarget {
    pub vertex: usize,
    pub source: ArrowSource,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Arrow {
    pub target: usize,
    /// Unit direction in the arrow plane of the target vertex.
    pub direction: [f64; 3],
    pub angle_degrees: f64,
    pub source: ArrowSource,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OverlapReport {
    pub epsilon_rel: f64,
    /// Absolute distance bound (`epsilon_rel * diagonal`).
    pub epsilon: f64,
    pub vertex_pairs: Vec<VertexPair>,
    pub containments: Vec<Containment>,
    pub arrows: Vec<Arrow>,
}

fn absolute_epsilon(adjacency: &Adjacency, epsilon_rel: f64) -> f64 {
    epsilon_rel * adjacency.diagonal()
}

/// All vertex pairs (edge-connected or not) closer than
/// `epsilon_rel * diagonal`, as `a < b`, sorted.
pub fn detect_overlapping_vertices(mesh: &Mesh, adjacency: &Adjacency, epsilon_rel: f64) -> Vec<VertexPair> {
    let eps = absolute_epsilon(adjacency, epsilon_rel);
    if !(eps > 0.0) {
        return Vec::new();
    }
    let key = |p: &Point| {
        [
            (p.x / eps).floor() as i64,
            (p.y / eps).floor() as i64,
            (p.z / eps).floor() as i64,
        ]
    };
    let mut grid: HashMap<[i64; 3], Vec<usize>> = HashMap::new();
    for (v, p) in mesh.vertices().iter().enumerate() {
        grid.entry(key(p)).or_default().push(v);
    }
    let mut pairs = Vec::new();
    for (a, p) in mesh.vertices().iter().enumerate() {
        let k = key(p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    let Some(bucket) = grid.get(&[k[0] + dx, k[1] + dy, k[2] + dz]) else {
                        continue;
                    };
                    for &b in bucket {
                        if b > a {
                            let distance = (mesh.vertex(b) - p).norm();
                            if distance < eps {
                                pairs.push(VertexPair { a, b, distance });
                            }
                        }
                    }
                }
            }
        }
    }
    pairs.sort_by_key(|p| (p.a, p.b));
    pairs
}

/// Whether `point` lies in hex `cell`. The hex is split into 24 tetrahedra,
/// four per face, each spanned by a face edge, the face centroid and the
/// cell centroid; the point is inside if it is inside any of them.
pub fn point_in_hex(point: &Point, mesh: &Mesh, cell: usize) -> bool {
    let corners = mesh.cell(cell);
    let p: Vec<&Point> = corners.iter().map(|&v| mesh.vertex(v)).collect();
    let center = mesh.cell_centroid(cell);
    for face in &HEX_FACES {
        let face_center = Point::from(face.iter().fold(Vector::zeros(), |acc, &k| acc + p[k].coords) / 4.0);
        for i in 0..4 {
            let a = p[face[i]];
            let b = p[face[(i + 1) % 4]];
            if let Some(l) = tet_barycentric(point, [a, b, &face_center, &center]) {
                if l.iter().all(|&x| x >= BARYCENTRIC_TOLERANCE) {
                    return true;
                }
            }
        }
    }
    false
}

/// 2D analogue of [`point_in_hex`]: four triangles fanned from the quad
/// centroid.
pub fn point_in_quad(point: &Point, mesh: &Mesh, cell: usize) -> bool {
    let corners = mesh.cell(cell);
    let center = mesh.cell_centroid(cell);
    let c = [center.x, center.y];
    for i in 0..4 {
        let a = mesh.vertex(corners[i]);
        let b = mesh.vertex(corners[(i + 1) % 4]);
        if let Some(l) = triangle_barycentric_2d([point.x, point.y], [[a.x, a.y], [b.x, b.y], c]) {
            if l.iter().all(|&x| x >= BARYCENTRIC_TOLERANCE) {
                return true;
            }
        }
    }
    false
}

pub fn point_in_cell(point: &Point, mesh: &Mesh, cell: usize) -> bool {
    match mesh.kind() {
        CellKind::Hex => point_in_hex(point, mesh, cell),
        CellKind::Quad => point_in_quad(point, mesh, cell),
    }
}

/// The containment predicate used for overlapping cells: `vertex` is not a
/// corner of `cell`, does not coincide (within `eps`) with any of its
/// corners, and lies inside it. Coincident corners are already reported as
/// overlapping vertices.
pub fn is_overlapping_cell(mesh: &Mesh, vertex: usize, cell: usize, eps: f64) -> bool {
    let corners = mesh.cell(cell);
    if corners.contains(&vertex) {
        return false;
    }
    let p = mesh.vertex(vertex);
    if corners.iter().any(|&c| (mesh.vertex(c) - p).norm() < eps) {
        return false;
    }
    point_in_cell(p, mesh, cell)
}

/// Every (vertex, non-incident cell) incident, found through an AABB tree
/// over cell bounds. Sorted by vertex then cell.
pub fn detect_overlapping_cells(mesh: &Mesh, adjacency: &Adjacency, epsilon_rel: f64) -> Vec<Containment> {
    let eps = absolute_epsilon(adjacency, epsilon_rel);
    let boxes: Vec<_> = (0..mesh.cell_count()).map(|c| mesh.cell_bounds(c)).collect();
    let tree = AabbTree::build(&boxes);
    // Box slack scaled to the model keeps boundary hits inside the candidate set.
    let slack = 1e-9 * adjacency.diagonal();
    let mut found: Vec<Containment> = (0..mesh.vertex_count())
        .into_par_iter()
        .flat_map_iter(|v| {
            let mut hits = Vec::new();
            tree.for_each_containing(mesh.vertex(v), slack, |c| {
                if is_overlapping_cell(mesh, v, c, eps) {
                    hits.push(Containment { vertex: v, cell: c });
                }
            });
            hits
        })
        .collect();
    found.sort_unstable();
    found
}

/// Orthonormal basis `(u, v)` of the arrow plane at a vertex. Boundary
/// vertices of hex meshes use the plane orthogonal to the mean normal of
/// their boundary faces; everything else uses the global XY plane.
pub fn arrow_plane(normal: Option<Vector>) -> (Vector, Vector) {
    let n = match normal.and_then(|n| n.try_normalize(1e-12)) {
        Some(n) => n,
        None => return (Vector::x(), Vector::y()),
    };
    // Project the world axis least aligned with the normal.
    let axis = [Vector::x(), Vector::y(), Vector::z()]
        .into_iter()
        .min_by(|a, b| n.dot(a).abs().total_cmp(&n.dot(b).abs()))
        .expect("three axes");
    let u = (axis - n * n.dot(&axis)).normalize();
    let v = n.cross(&u);
    (u, v)
}

/// Mean outward normal of boundary faces around each vertex (hex meshes).
pub fn boundary_vertex_normals(mesh: &Mesh, adjacency: &Adjacency) -> HashMap<usize, Vector> {
    let mut out: HashMap<usize, Vector> = HashMap::new();
    for f in adjacency.faces().iter().filter(|f| f.cells.len() == 1) {
        let p: Vec<&Point> = f.vertices.iter().map(|&v| mesh.vertex(v)).collect();
        let n = (p[2] - p[0]).cross(&(p[3] - p[1]));
        if let Some(n) = n.try_normalize(1e-300) {
            for &v in &f.vertices {
                *out.entry(v).or_insert_with(Vector::zeros) += n;
            }
        }
    }
    out
}

/// Spreads the `n` arrows aimed at each vertex evenly at `k * 360 / n`
/// degrees, first arrow along the plane's first basis vector. Arrows for a
/// vertex keep the order in which their targets were listed.
pub fn place_arrows(targets: &[ArrowTarget], normals: &HashMap<usize, Vector>) -> Vec<Arrow> {
    let mut by_vertex: BTreeMap<usize, Vec<ArrowSource>> = BTreeMap::new();
    for t in targets {
        by_vertex.entry(t.vertex).or_default().push(t.source);
    }
    let mut arrows = Vec::with_capacity(targets.len());
    for (vertex, sources) in by_vertex {
        let (u, v) = arrow_plane(normals.get(&vertex).copied());
        let n = sources.len();
        for (k, source) in sources.into_iter().enumerate() {
            let angle_degrees = k as f64 * 360.0 / n as f64;
            let (s, c) = angle_degrees.to_radians().sin_cos();
            let d = u * c + v * s;
            arrows.push(Arrow {
                target: vertex,
                direction: [d.x, d.y, d.z],
                angle_degrees,
                source,
            });
        }
    }
    arrows
}

/// Two arrows per overlapping pair (one at each vertex) and one per
/// containment (at the contained vertex).
pub fn arrow_targets(pairs: &[VertexPair], containments: &[Containment]) -> Vec<ArrowTarget> {
    let mut out = Vec::with_capacity(2 * pairs.len() + containments.len());
    for p in pairs {
        out.push(ArrowTarget {
            vertex: p.a,
            source: ArrowSource::VertexPair { partner: p.b },
        });
        out.push(ArrowTarget {
            vertex: p.b,
            source: ArrowSource::VertexPair { partner: p.a },
        });
    }
    for c in containments {
        out.push(ArrowTarget {
            vertex: c.vertex,
            source: ArrowSource::Containment { cell: c.cell },
        });
    }
    out
}

pub fn detect_overlaps(mesh: &Mesh, adjacency: &Adjacency, epsilon_rel: f64) -> OverlapReport {
    let vertex_pairs = detect_overlapping_vertices(mesh, adjacency, epsilon_rel);
    let containments = detect_overlapping_cells(mesh, adjacency, epsilon_rel);
    let normals = match mesh.kind() {
        CellKind::Hex => boundary_vertex_normals(mesh, adjacency),
        CellKind::Quad => HashMap::new(),
    };
    let arrows = place_arrows(&arrow_targets(&vertex_pairs, &containments), &normals);
    OverlapReport {
        epsilon_rel,
        epsilon: absolute_epsilon(adjacency, epsilon_rel),
        vertex_pairs,
        containments,
        arrows,
    }
}

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::BoundaryError;
use crate::geometry::signed_area_2d;
use crate::mesh::{Adjacency, CellKind, Mesh};

/// A closed boundary loop of a quad mesh.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCurve {
    /// Vertex ids in traversal order; the last connects back to the first.
    pub vertices: Vec<usize>,
    /// Cumulative arc length at each vertex, starting at 0.
    pub arc_length: Vec<f64>,
    /// Total loop length including the closing edge.
    pub length: f64,
    /// Positive for counter-clockwise loops.
    pub signed_area: f64,
}

/// Boundary loops of a quad mesh. The outermost loop (largest absolute
/// area) comes first and runs counter-clockwise; holes run clockwise and
/// follow in order of their lowest vertex id. Every loop starts at its
/// lowest vertex id.
pub fn extract_boundary_2d(mesh: &Mesh, adjacency: &Adjacency) -> Result<Vec<BoundaryCurve>, BoundaryError> {
    if mesh.kind() != CellKind::Quad {
        return Err(BoundaryError::WrongDimension {
            expected: 2,
            found: mesh.dimension(),
        });
    }
    let mut neighbors: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for e in adjacency.edges().iter().filter(|e| e.cells.len() == 1) {
        let [a, b] = e.vertices;
        neighbors.entry(a).or_default().push(b);
        neighbors.entry(b).or_default().push(a);
    }
    if let Some((&vertex, n)) = neighbors.iter().find(|(_, n)| n.len() != 2) {
        return Err(BoundaryError::NonManifoldBoundary {
            vertex,
            edges: n.len(),
        });
    }

    let mut visited: HashMap<usize, bool> = HashMap::new();
    let mut loops: Vec<Vec<usize>> = Vec::new();
    for &start in neighbors.keys() {
        if visited.contains_key(&start) {
            continue;
        }
        let mut path = vec![start];
        visited.insert(start, true);
        let (mut prev, mut cur) = (start, neighbors[&start][0].min(neighbors[&start][1]));
        while cur != start {
            path.push(cur);
            visited.insert(cur, true);
            let n = &neighbors[&cur];
            let next = if n[0] == prev { n[1] } else { n[0] };
            prev = cur;
            cur = next;
        }
        loops.push(path);
    }

    let area = |path: &[usize]| {
        let poly: Vec<[f64; 2]> = path.iter().map(|&v| [mesh.vertex(v).x, mesh.vertex(v).y]).collect();
        signed_area_2d(&poly)
    };
    let outer = (0..loops.len())
        .max_by(|&a, &b| area(&loops[a]).abs().total_cmp(&area(&loops[b]).abs()).then(b.cmp(&a)));
    let mut curves = Vec::with_capacity(loops.len());
    let mut order: Vec<usize> = (0..loops.len()).collect();
    if let Some(o) = outer {
        order.retain(|&i| i != o);
        order.insert(0, o);
    }
    for i in order {
        let mut path = loops[i].clone();
        let want_ccw = Some(i) == outer;
        if (area(&path) > 0.0) != want_ccw {
            path[1..].reverse();
        }
        curves.push(make_curve(mesh, path));
    }
    Ok(curves)
}

fn make_curve(mesh: &Mesh, vertices: Vec<usize>) -> BoundaryCurve {
    let mut arc_length = Vec::with_capacity(vertices.len());
    let mut s = 0.0;
    for (i, &v) in vertices.iter().enumerate() {
        if i > 0 {
            s += (mesh.vertex(v) - mesh.vertex(vertices[i - 1])).norm();
        }
        arc_length.push(s);
    }
    let closing = (mesh.vertex(vertices[0]) - mesh.vertex(*vertices.last().expect("non-empty"))).norm();
    let poly: Vec<[f64; 2]> = vertices.iter().map(|&v| [mesh.vertex(v).x, mesh.vertex(v).y]).collect();
    BoundaryCurve {
        signed_area: signed_area_2d(&poly),
        length: s + closing,
        vertices,
        arc_length,
    }
}

/// Boundary surface of a hex mesh: faces with one incident cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundarySurface {
    /// Outward-oriented quads (for positively oriented cells).
    pub faces: Vec<[usize; 4]>,
    /// Vertex ids on the surface, ascending.
    pub vertices: Vec<usize>,
}

pub fn extract_boundary_3d(mesh: &Mesh, adjacency: &Adjacency) -> Result<BoundarySurface, BoundaryError> {
    if mesh.kind() != CellKind::Hex {
        return Err(BoundaryError::WrongDimension {
            expected: 3,
            found: mesh.dimension(),
        });
    }
    let faces: Vec<[usize; 4]> = adjacency
        .faces()
        .iter()
        .filter(|f| f.cells.len() == 1)
        .map(|f| f.vertices)
        .collect();
    let mut edge_use: BTreeMap<[usize; 2], usize> = BTreeMap::new();
    for f in &faces {
        for k in 0..4 {
            let (a, b) = (f[k], f[(k + 1) % 4]);
            *edge_use.entry([a.min(b), a.max(b)]).or_default() += 1;
        }
    }
    if let Some((&[a, _], &n)) = edge_use.iter().find(|(_, &n)| n != 2) {
        return Err(BoundaryError::NonManifoldBoundary { vertex: a, edges: n });
    }
    let mut vertices: Vec<usize> = faces.iter().flatten().copied().collect();
    vertices.sort_unstable();
    vertices.dedup();
    Ok(BoundarySurface { faces, vertices })
}

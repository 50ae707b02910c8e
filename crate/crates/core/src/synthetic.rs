//! Synthetic meshes: structured grids, holed quad grids and randomly degraded
//! grids. Used as fixtures and for benchmarking.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::{Point, Vector};
use crate::mesh::{CellKind, Mesh};

/// `nx * ny * nz` block of axis-aligned hexes with edge length `spacing`.
pub fn hex_grid(nx: usize, ny: usize, nz: usize, spacing: f64) -> Mesh {
    let id = |i: usize, j: usize, k: usize| i + (nx + 1) * (j + (ny + 1) * k);
    let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1) * (nz + 1));
    for k in 0..=nz {
        for j in 0..=ny {
            for i in 0..=nx {
                vertices.push(Point::new(i as f64, j as f64, k as f64) * spacing);
            }
        }
    }
    let mut cells = Vec::with_capacity(nx * ny * nz * 8);
    for k in 0..nz {
        for j in 0..ny {
            for i in 0..nx {
                cells.extend_from_slice(&[
                    id(i, j, k),
                    id(i + 1, j, k),
                    id(i + 1, j + 1, k),
                    id(i, j + 1, k),
                    id(i, j, k + 1),
                    id(i + 1, j, k + 1),
                    id(i + 1, j + 1, k + 1),
                    id(i, j + 1, k + 1),
                ]);
            }
        }
    }
    Mesh::new(format!("hex-grid-{nx}x{ny}x{nz}"), CellKind::Hex, vertices, cells).expect("valid grid")
}

/// `nx * ny` counter-clockwise quads in the z = 0 plane.
pub fn quad_grid(nx: usize, ny: usize, spacing: f64) -> Mesh {
    holed_quad_grid(nx, ny, spacing, &[], &[])
}

/// Quad grid where the cells listed in `removed` are deleted and each cell in
/// `ringed` is replaced by four quads around a square hole, which leaves the
/// outline of that cell unchanged. Cells are addressed by `(column, row)`.
pub fn holed_quad_grid(
    nx: usize,
    ny: usize,
    spacing: f64,
    removed: &[(usize, usize)],
    ringed: &[(usize, usize)],
) -> Mesh {
    let id = |i: usize, j: usize| i + (nx + 1) * j;
    let mut vertices: Vec<Point> = Vec::new();
    for j in 0..=ny {
        for i in 0..=nx {
            vertices.push(Point::new(i as f64 * spacing, j as f64 * spacing, 0.0));
        }
    }
    let mut cells = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            if removed.contains(&(i, j)) {
                continue;
            }
            let outer = [id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)];
            if ringed.contains(&(i, j)) {
                let center = Point::new((i as f64 + 0.5) * spacing, (j as f64 + 0.5) * spacing, 0.0);
                let h = 0.25 * spacing;
                let base = vertices.len();
                for (dx, dy) in [(-h, -h), (h, -h), (h, h), (-h, h)] {
                    vertices.push(center + Vector::new(dx, dy, 0.0));
                }
                let inner = [base, base + 1, base + 2, base + 3];
                for k in 0..4 {
                    let n = (k + 1) % 4;
                    cells.extend_from_slice(&[outer[k], outer[n], inner[n], inner[k]]);
                }
            } else {
                cells.extend_from_slice(&outer);
            }
        }
    }
    compact("quad-grid", CellKind::Quad, vertices, cells)
}

/// Drops vertices no cell references.
fn compact(name: &str, kind: CellKind, vertices: Vec<Point>, cells: Vec<usize>) -> Mesh {
    let mut remap = vec![usize::MAX; vertices.len()];
    let mut kept = Vec::new();
    for &v in &cells {
        if remap[v] == usize::MAX {
            remap[v] = usize::MAX - 1;
        }
    }
    for (v, slot) in remap.iter_mut().enumerate() {
        if *slot != usize::MAX {
            *slot = kept.len();
            kept.push(vertices[v]);
        }
    }
    let cells = cells.into_iter().map(|v| remap[v]).collect();
    Mesh::new(name, kind, kept, cells).expect("valid compacted mesh")
}

/// Moves a `fraction` of the vertices by a uniform random offset of up to
/// `amplitude` per axis (z untouched for quad meshes). Returns the mesh and
/// the ids of the moved vertices.
pub fn degrade(mesh: &Mesh, fraction: f64, amplitude: f64, seed: u64) -> (Mesh, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut moved = Vec::new();
    let mut vertices = mesh.vertices().to_vec();
    for (v, p) in vertices.iter_mut().enumerate() {
        if rng.gen::<f64>() < fraction {
            let dz = if mesh.kind() == CellKind::Hex {
                rng.gen_range(-amplitude..=amplitude)
            } else {
                0.0
            };
            *p += Vector::new(
                rng.gen_range(-amplitude..=amplitude),
                rng.gen_range(-amplitude..=amplitude),
                dz,
            );
            moved.push(v);
        }
    }
    let out = Mesh::new(mesh.name(), mesh.kind(), vertices, mesh.connectivity().to_vec()).expect("same connectivity");
    (out, moved)
}

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{classify, BoundaryError, BoundaryErrorRecord, BoundarySurface};
use crate::geometry::{closest_point_on_triangle, Aabb, AabbTree, Point, TriangleFeature, Vector};
use crate::mesh::{Mesh, ReferenceSurface};

/// How to sign 3D errors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignMode {
    /// Require a closed manifold reference.
    Signed,
    /// Sign when the reference is closed, otherwise report magnitudes.
    Auto,
    Unsigned,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SurfaceHit {
    pub point: Point,
    pub distance: f64,
    pub triangle: usize,
    pub barycentric: [f64; 3],
    /// `+1` outside, `-1` inside, `0` on the surface.
    pub side: f64,
}

/// Closest-point and inside/outside queries against a triangulated
/// reference, signed with angle-weighted pseudo-normals.
#[derive(Clone, Debug)]
pub struct SurfaceQuery<'a> {
    surface: &'a ReferenceSurface,
    tree: AabbTree,
    face_normals: Vec<Vector>,
    vertex_normals: Vec<Vector>,
    edge_normals: HashMap<[usize; 2], Vector>,
    signed: bool,
}

impl<'a> SurfaceQuery<'a> {
    pub fn new(surface: &'a ReferenceSurface) -> Self {
        let v = surface.vertices();
        let tris = surface.triangles();
        let boxes: Vec<Aabb> = tris
            .iter()
            .map(|t| Aabb::from_points([&v[t[0]], &v[t[1]], &v[t[2]]]))
            .collect();

        // Closed references may be wound inward; flip so normals face out.
        let volume: f64 = tris
            .iter()
            .map(|t| v[t[0]].coords.dot(&v[t[1]].coords.cross(&v[t[2]].coords)))
            .sum();
        let flip = if surface.is_closed_manifold() && volume < 0.0 { -1.0 } else { 1.0 };

        let face_normals: Vec<Vector> = tris
            .iter()
            .map(|t| {
                (v[t[1]] - v[t[0]])
                    .cross(&(v[t[2]] - v[t[0]]))
                    .try_normalize(0.0)
                    .unwrap_or_else(Vector::zeros)
                    * flip
            })
            .collect();
        let mut vertex_normals = vec![Vector::zeros(); v.len()];
        let mut edge_normals: HashMap<[usize; 2], Vector> = HashMap::new();
        for (t, tri) in tris.iter().enumerate() {
            let n = face_normals[t];
            for k in 0..3 {
                let (a, b, c) = (tri[k], tri[(k + 1) % 3], tri[(k + 2) % 3]);
                let e1 = v[b] - v[a];
                let e2 = v[c] - v[a];
                let angle = match (e1.try_normalize(0.0), e2.try_normalize(0.0)) {
                    (Some(x), Some(y)) => x.dot(&y).clamp(-1.0, 1.0).acos(),
                    _ => 0.0,
                };
                vertex_normals[a] += n * angle;
                *edge_normals.entry([a.min(b), a.max(b)]).or_insert_with(Vector::zeros) += n;
            }
        }
        Self {
            surface,
            tree: AabbTree::build(&boxes),
            face_normals,
            vertex_normals,
            edge_normals,
            signed: surface.is_closed_manifold(),
        }
    }

    /// Whether inside/outside is meaningful for this reference.
    pub fn is_signed(&self) -> bool {
        self.signed
    }

    pub fn closest(&self, p: &Point) -> SurfaceHit {
        let v = self.surface.vertices();
        let tris = self.surface.triangles();
        let (t, d2) = self
            .tree
            .nearest(p, |i| {
                let [a, b, c] = tris[i];
                (closest_point_on_triangle(p, &v[a], &v[b], &v[c]).point - p).norm_squared()
            })
            .expect("reference surface has triangles");
        let tri = tris[t];
        let hit = closest_point_on_triangle(p, &v[tri[0]], &v[tri[1]], &v[tri[2]]);
        let normal = match hit.feature {
            TriangleFeature::Face => self.face_normals[t],
            TriangleFeature::Vertex(k) => self.vertex_normals[tri[k]],
            TriangleFeature::Edge(k) => {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                self.edge_normals[&[a.min(b), a.max(b)]]
            }
        };
        let s = (p - hit.point).dot(&normal);
        let side = if s > 0.0 {
            1.0
        } else if s < 0.0 {
            -1.0
        } else {
            0.0
        };
        SurfaceHit {
            point: hit.point,
            distance: d2.sqrt(),
            triangle: t,
            barycentric: hit.barycentric,
            side,
        }
    }

    /// UV of a hit, interpolated from the triangle's corner UVs.
    pub fn uv_at(&self, hit: &SurfaceHit) -> Option<[f64; 2]> {
        let uv = self.surface.uv()?[hit.triangle];
        let b = hit.barycentric;
        Some([
            b[0] * uv[0][0] + b[1] * uv[1][0] + b[2] * uv[2][0],
            b[0] * uv[0][1] + b[1] * uv[1][1] + b[2] * uv[2][1],
        ])
    }
}

/// Error field over the boundary surface of a hex mesh.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfaceErrorField {
    pub surface: BoundarySurface,
    /// One record per surface vertex, in `surface.vertices` order.
    pub records: Vec<BoundaryErrorRecord>,
    /// UV of each record's closest reference point, when the reference has
    /// a UV map.
    pub uv: Option<Vec<[f64; 2]>>,
    pub signed: bool,
}

/// Errors for arbitrary points against a reference surface.
pub fn surface_errors(
    points: &[(usize, Point)],
    query: &SurfaceQuery<'_>,
    diag_reference: f64,
    signed: bool,
) -> Result<(Vec<BoundaryErrorRecord>, Option<Vec<[f64; 2]>>), BoundaryError> {
    if !(diag_reference > 0.0 && diag_reference.is_finite()) {
        return Err(BoundaryError::DegenerateReference(diag_reference));
    }
    let hits: Vec<SurfaceHit> = points.par_iter().map(|(_, p)| query.closest(p)).collect();
    let records = points
        .iter()
        .zip(&hits)
        .map(|(&(vertex, _), hit)| BoundaryErrorRecord {
            vertex,
            closest: hit.point.coords.into(),
            error: classify(hit.distance / diag_reference, if signed { hit.side } else { 1.0 }),
        })
        .collect();
    let uv = query
        .surface
        .uv()
        .map(|_| hits.iter().map(|h| query.uv_at(h).expect("uv present")).collect());
    Ok((records, uv))
}

/// Signed normalized error of every boundary-surface vertex of `mesh`
/// against `reference`.
pub fn signed_boundary_error_3d(
    mesh: &Mesh,
    surface: &BoundarySurface,
    reference: &ReferenceSurface,
    diag_reference: f64,
    mode: SignMode,
) -> Result<SurfaceErrorField, BoundaryError> {
    let query = SurfaceQuery::new(reference);
    let signed = match mode {
        SignMode::Signed if !query.is_signed() => return Err(BoundaryError::UnsignedOnly),
        SignMode::Signed => true,
        SignMode::Auto => query.is_signed(),
        SignMode::Unsigned => false,
    };
    let points: Vec<(usize, Point)> = surface.vertices.iter().map(|&v| (v, *mesh.vertex(v))).collect();
    let (records, uv) = surface_errors(&points, &query, diag_reference, signed)?;
    Ok(SurfaceErrorField {
        surface: surface.clone(),
        records,
        uv,
        signed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::extract_boundary_3d;
    use crate::mesh::Adjacency;
    use crate::synthetic::hex_grid;

    fn cube_surface() -> ReferenceSurface {
        let m = hex_grid(1, 1, 1, 1.0);
        let s = extract_boundary_3d(&m, &Adjacency::build(&m)).unwrap();
        ReferenceSurface::from_quads(m.vertices().to_vec(), &s.faces).unwrap()
    }

    #[test]
    fn cube_queries() {
        let r = cube_surface();
        let q = SurfaceQuery::new(&r);
        let diag = 3f64.sqrt();
        let (rec, uv) = surface_errors(
            &[(0, Point::new(0.5, 0.5, 1.2)), (1, Point::new(0.5, 0.5, 0.5)), (2, Point::new(1.5, 1.5, 1.5))],
            &q,
            diag,
            true,
        )
        .unwrap();
        assert!(uv.is_none());
        assert!((rec[0].error - 0.2 / diag).abs() < 1e-9);
        assert!((rec[1].error + 0.5 / diag).abs() < 1e-9);
        // Corner region: vertex pseudo-normal decides.
        assert!((rec[2].error - (0.75f64).sqrt() / diag).abs() < 1e-9);
    }

    #[test]
    fn inward_winding_is_corrected() {
        let r = cube_surface();
        let flipped: Vec<[usize; 3]> = r.triangles().iter().map(|t| [t[0], t[2], t[1]]).collect();
        let inward = ReferenceSurface::new(r.vertices().to_vec(), flipped, None).unwrap();
        let q = SurfaceQuery::new(&inward);
        assert_eq!(q.closest(&Point::new(0.5, 0.5, 1.2)).side, 1.0);
        assert_eq!(q.closest(&Point::new(0.5, 0.5, 0.7)).side, -1.0);
    }

    #[test]
    fn open_reference_needs_unsigned_mode() {
        let m = hex_grid(1, 1, 1, 1.0);
        let adj = Adjacency::build(&m);
        let s = extract_boundary_3d(&m, &adj).unwrap();
        let open = ReferenceSurface::from_quads(m.vertices().to_vec(), &s.faces[..5]).unwrap();
        let err = signed_boundary_error_3d(&m, &s, &open, 1.0, SignMode::Signed).unwrap_err();
        assert_eq!(err, BoundaryError::UnsignedOnly);
        let field = signed_boundary_error_3d(&m, &s, &open, 1.0, SignMode::Auto).unwrap();
        assert!(!field.signed);
        assert!(field.records.iter().all(|r| r.error >= 0.0));
    }

    #[test]
    fn uv_is_interpolated() {
        let pts = vec![Point::new(0.0, 0.0, 0.0), Point::new(2.0, 0.0, 0.0), Point::new(0.0, 2.0, 0.0)];
        let r = ReferenceSurface::new(pts, vec![[0, 1, 2]], Some(vec![[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]])).unwrap();
        let q = SurfaceQuery::new(&r);
        let hit = q.closest(&Point::new(0.5, 0.5, 3.0));
        let uv = q.uv_at(&hit).unwrap();
        assert!((uv[0] - 0.25).abs() < 1e-15 && (uv[1] - 0.25).abs() < 1e-15);
    }
}

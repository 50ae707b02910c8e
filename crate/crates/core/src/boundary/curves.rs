use rayon::prelude::*;

use super::{classify, BoundaryCurve, BoundaryError, BoundaryErrorRecord};
use crate::geometry::{closest_point_on_segment, point_in_polygons_even_odd, Aabb, AabbTree, Point};
use crate::mesh::Mesh;

/// Boundary loops of a 2D reference mesh prepared for distance and
/// inside/outside queries.
#[derive(Clone, Debug)]
pub struct ReferenceCurves {
    segments: Vec<(Point, Point)>,
    polygons: Vec<Vec<[f64; 2]>>,
    tree: AabbTree,
}

impl ReferenceCurves {
    pub fn new(mesh: &Mesh, loops: &[BoundaryCurve]) -> Result<Self, BoundaryError> {
        let mut segments = Vec::new();
        let mut polygons = Vec::new();
        for l in loops {
            let n = l.vertices.len();
            for i in 0..n {
                segments.push((*mesh.vertex(l.vertices[i]), *mesh.vertex(l.vertices[(i + 1) % n])));
            }
            polygons.push(l.vertices.iter().map(|&v| [mesh.vertex(v).x, mesh.vertex(v).y]).collect());
        }
        if segments.is_empty() {
            return Err(BoundaryError::EmptyReference);
        }
        let boxes: Vec<Aabb> = segments.iter().map(|(a, b)| Aabb::from_points([a, b])).collect();
        Ok(Self {
            tree: AabbTree::build(&boxes),
            segments,
            polygons,
        })
    }

    /// Closest point on the reference boundary.
    pub fn closest(&self, p: &Point) -> (Point, f64) {
        let (i, d2) = self
            .tree
            .nearest(p, |i| {
                let (a, b) = &self.segments[i];
                (closest_point_on_segment(p, a, b) - p).norm_squared()
            })
            .expect("non-empty reference");
        let (a, b) = &self.segments[i];
        (closest_point_on_segment(p, a, b), d2.sqrt())
    }

    /// Even-odd containment over all loops jointly.
    pub fn contains(&self, p: &Point) -> bool {
        point_in_polygons_even_odd([p.x, p.y], &self.polygons)
    }
}

/// Signed normalized error of each point against the reference curves:
/// distance to the closest boundary point over `diag_reference`, positive
/// outside the reference domain, negative inside.
pub fn signed_boundary_error_2d(
    points: &[(usize, Point)],
    reference: &ReferenceCurves,
    diag_reference: f64,
) -> Result<Vec<BoundaryErrorRecord>, BoundaryError> {
    if !(diag_reference > 0.0 && diag_reference.is_finite()) {
        return Err(BoundaryError::DegenerateReference(diag_reference));
    }
    Ok(points
        .par_iter()
        .map(|&(vertex, p)| {
            let (closest, distance) = reference.closest(&p);
            let magnitude = distance / diag_reference;
            let outside = !reference.contains(&p);
            BoundaryErrorRecord {
                vertex,
                closest: closest.coords.into(),
                error: classify(magnitude, if outside { 1.0 } else { -1.0 }),
            }
        })
        .collect())
}

//! Sphere glyphs sized by vertex quality and their aggregation into
//! clusters.
//!
//! A vertex with quality `J_m` gets a glyph of severity `c = 1 - J_m`
//! (`0` for a perfect corner set, `2` for a fully inverted one) and radius
//! `c * r_max`. Glyph size therefore depends on quality only, not on the
//! size of the surrounding elements.

mod cluster;
mod region;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::Point;
use crate::mesh::{Adjacency, Mesh};
use crate::quality::QualityField;

pub use cluster::{cluster_glyphs, overlap_pairs, ClusterSummary, UnionFind, PALETTE};
pub use region::{one_ring, sub_region, OneRing};

#[derive(Debug, Error, PartialEq)]
pub enum GlyphError {
    #[error("empty mesh: default glyph parameters need at least one edge")]
    EmptyMesh,
    #[error("r_max must be positive and finite (got {0})")]
    InvalidMaxRadius(f64),
    #[error("r_dmin must be non-negative and finite (got {0})")]
    InvalidMinRadius(f64),
    #[error("r_dmin {r_dmin} exceeds the largest possible radius 2 * r_max = {limit}")]
    MinRadiusTooLarge { r_dmin: f64, limit: f64 },
    #[error("vertex {vertex} out of range ({count} vertices)")]
    VertexOutOfRange { vertex: usize, count: usize },
}

/// Fraction of the average edge length used for the default `r_max`.
pub const DEFAULT_RMAX_FRACTION: f64 = 0.5;
/// Fraction of `r_max` used for the default `r_dmin`.
pub const DEFAULT_RDMIN_FRACTION: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GlyphParams {
    pub r_max: f64,
    pub r_dmin: f64,
}

impl GlyphParams {
    pub fn new(r_max: f64, r_dmin: f64) -> Result<Self, GlyphError> {
        if !(r_max.is_finite() && r_max > 0.0) {
            return Err(GlyphError::InvalidMaxRadius(r_max));
        }
        if !(r_dmin.is_finite() && r_dmin >= 0.0) {
            return Err(GlyphError::InvalidMinRadius(r_dmin));
        }
        if r_dmin > 2.0 * r_max {
            return Err(GlyphError::MinRadiusTooLarge {
                r_dmin,
                limit: 2.0 * r_max,
            });
        }
        Ok(Self { r_max, r_dmin })
    }
}

/// `r_max` = half the average edge length, `r_dmin` = a tenth of `r_max`.
pub fn default_params(adjacency: &Adjacency) -> Result<GlyphParams, GlyphError> {
    if adjacency.edges().is_empty() || adjacency.average_edge_length() <= 0.0 {
        return Err(GlyphError::EmptyMesh);
    }
    let r_max = DEFAULT_RMAX_FRACTION * adjacency.average_edge_length();
    GlyphParams::new(r_max, DEFAULT_RDMIN_FRACTION * r_max)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Glyph {
    pub vertex: usize,
    pub center: Point,
    /// Vertex quality `J_m`.
    pub quality: f64,
    /// Severity `1 - J_m`, in `[0, 2]`.
    pub severity: f64,
    pub radius: f64,
}

impl Glyph {
    pub fn new(vertex: usize, center: Point, quality: f64, r_max: f64) -> Self {
        let severity = 1.0 - quality;
        Self {
            vertex,
            center,
            quality,
            severity,
            radius: severity * r_max,
        }
    }
}

/// One glyph per vertex plus the displayed subset.
#[derive(Clone, Debug, PartialEq)]
pub struct GlyphSet {
    pub params: GlyphParams,
    glyphs: Vec<Glyph>,
    displayed: Vec<usize>,
}

impl GlyphSet {
    /// Every glyph, indexed by vertex id.
    pub fn all(&self) -> &[Glyph] {
        &self.glyphs
    }

    pub fn glyph(&self, vertex: usize) -> &Glyph {
        &self.glyphs[vertex]
    }

    /// Vertex ids of displayed glyphs, ascending.
    pub fn displayed_ids(&self) -> &[usize] {
        &self.displayed
    }

    pub fn displayed(&self) -> Vec<Glyph> {
        self.displayed.iter().map(|&v| self.glyphs[v]).collect()
    }
}

/// A glyph is displayed when its radius is positive and at least `r_dmin`.
pub fn is_displayed(radius: f64, params: &GlyphParams) -> bool {
    radius > 0.0 && radius >= params.r_dmin
}

pub fn build_glyphs(field: &QualityField, mesh: &Mesh, params: GlyphParams) -> GlyphSet {
    let glyphs: Vec<Glyph> = field
        .vertex_quality()
        .iter()
        .enumerate()
        .map(|(v, &q)| Glyph::new(v, *mesh.vertex(v), q, params.r_max))
        .collect();
    let displayed = glyphs
        .iter()
        .filter(|g| is_displayed(g.radius, &params))
        .map(|g| g.vertex)
        .collect();
    GlyphSet {
        params,
        glyphs,
        displayed,
    }
}

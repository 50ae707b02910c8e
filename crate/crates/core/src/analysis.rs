//! End-to-end pipelines: quality, glyphs, clusters, feature edges and
//! overlaps for one mesh, and boundary error against a reference.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::boundary::{
    collate, extract_boundary_2d, extract_boundary_3d, per_loop_series, signed_boundary_error_2d,
    signed_boundary_error_3d, BoundaryCurve, BoundaryError, BoundaryErrorRecord, CollatedSeries, LoopSeries,
    ReferenceCurves, SignMode, SurfaceErrorField,
};
use crate::features::{default_e_qmax, filter_feature_edges, FeatureEdgeSet};
use crate::geometry::Point;
use crate::glyph::{build_glyphs, cluster_glyphs, default_params, ClusterSummary, GlyphError, GlyphParams, GlyphSet};
use crate::mesh::{Adjacency, CellKind, Mesh, ReferenceSurface};
use crate::overlap::{detect_overlaps, OverlapReport, DEFAULT_EPSILON_REL};
use crate::quality::{compute_quality_field, quality_histogram, QualityField, QualityHistogram};

#[derive(Debug, Error, PartialEq)]
pub enum AnalysisError {
    #[error("empty mesh: {0}")]
    EmptyMesh(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("dimension mismatch: original is {original}D, reference is {reference}D")]
    DimensionMismatch { original: usize, reference: usize },
    #[error(transparent)]
    Boundary(#[from] BoundaryError),
}

impl From<GlyphError> for AnalysisError {
    fn from(e: GlyphError) -> Self {
        match e {
            GlyphError::EmptyMesh => AnalysisError::EmptyMesh(e.to_string()),
            other => AnalysisError::InvalidParameter(other.to_string()),
        }
    }
}

/// A parameter that is either derived from the mesh or given explicitly.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum Param {
    #[default]
    Auto,
    Value(f64),
}

impl FromStr for Param {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(Param::Auto);
        }
        match s.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(Param::Value(v)),
            _ => Err(format!("expected a number or `auto`, found `{s}`")),
        }
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Param::Auto => f.write_str("auto"),
            Param::Value(v) => write!(f, "{v}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnalysisOptions {
    pub r_max: Param,
    pub r_dmin: Param,
    pub e_qmax: Param,
    pub epsilon_overlap: f64,
    pub bins: usize,
}

pub const DEFAULT_BINS: usize = 20;

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            r_max: Param::Auto,
            r_dmin: Param::Auto,
            e_qmax: Param::Auto,
            epsilon_overlap: DEFAULT_EPSILON_REL,
            bins: DEFAULT_BINS,
        }
    }
}

/// Parameter values actually used, recorded in scene provenance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResolvedParams {
    pub r_max: f64,
    pub r_dmin: f64,
    pub e_qmax: f64,
    pub epsilon_overlap: f64,
    pub bins: usize,
}

#[derive(Clone, Debug)]
pub struct Analysis {
    pub mesh: Mesh,
    pub adjacency: Adjacency,
    pub quality: QualityField,
    pub histogram: QualityHistogram,
    pub params: ResolvedParams,
    pub glyphs: GlyphSet,
    pub clusters: Vec<ClusterSummary>,
    pub features: FeatureEdgeSet,
    pub overlaps: OverlapReport,
}

/// Resolves `auto` parameters against the mesh. An explicit `r_max` still
/// gets the default `r_dmin = 0.1 * r_max` when `r_dmin` is `auto`.
pub fn resolve_params(
    adjacency: &Adjacency,
    quality: &QualityField,
    options: &AnalysisOptions,
) -> Result<ResolvedParams, AnalysisError> {
    if options.bins == 0 {
        return Err(AnalysisError::InvalidParameter("bins must be at least 1".into()));
    }
    if !(options.epsilon_overlap > 0.0 && options.epsilon_overlap.is_finite()) {
        return Err(AnalysisError::InvalidParameter(format!(
            "epsilon-overlap must be positive (got {})",
            options.epsilon_overlap
        )));
    }
    let r_max = match options.r_max {
        Param::Value(v) => v,
        Param::Auto => default_params(adjacency)?.r_max,
    };
    let r_dmin = match options.r_dmin {
        Param::Value(v) => v,
        Param::Auto => crate::glyph::DEFAULT_RDMIN_FRACTION * r_max,
    };
    let glyph = GlyphParams::new(r_max, r_dmin)?;
    let e_qmax = match options.e_qmax {
        Param::Value(v) => v,
        Param::Auto => default_e_qmax(quality).map_err(|e| AnalysisError::EmptyMesh(e.to_string()))?,
    };
    Ok(ResolvedParams {
        r_max: glyph.r_max,
        r_dmin: glyph.r_dmin,
        e_qmax,
        epsilon_overlap: options.epsilon_overlap,
        bins: options.bins,
    })
}

pub fn analyze(mesh: Mesh, options: &AnalysisOptions) -> Result<Analysis, AnalysisError> {
    if mesh.cell_count() == 0 {
        return Err(AnalysisError::EmptyMesh(format!("`{}` has no cells", mesh.name())));
    }
    let adjacency = Adjacency::build(&mesh);
    let quality = compute_quality_field(&mesh, &adjacency);
    let params = resolve_params(&adjacency, &quality, options)?;
    let histogram = quality_histogram(&quality, params.bins)
        .map_err(|e| AnalysisError::InvalidParameter(e.to_string()))?;
    let glyph_params = GlyphParams::new(params.r_max, params.r_dmin)?;
    let glyphs = build_glyphs(&quality, &mesh, glyph_params);
    let clusters = cluster_glyphs(&glyphs.displayed());
    let features = filter_feature_edges(&adjacency, &quality, params.e_qmax);
    let overlaps = detect_overlaps(&mesh, &adjacency, params.epsilon_overlap);
    Ok(Analysis {
        mesh,
        adjacency,
        quality,
        histogram,
        params,
        glyphs,
        clusters,
        features,
        overlaps,
    })
}

/// What an original mesh is compared against.
#[derive(Clone, Debug)]
pub enum BoundaryReference {
    /// Another hex or quad mesh of the same dimension.
    Mesh(Mesh),
    /// A triangulated surface (3D only), possibly carrying a UV map.
    Surface(ReferenceSurface),
}

impl BoundaryReference {
    pub fn dimension(&self) -> usize {
        match self {
            BoundaryReference::Mesh(m) => m.dimension(),
            BoundaryReference::Surface(_) => 3,
        }
    }

    /// Bounding-box diagonal of the whole reference.
    pub fn diagonal(&self) -> f64 {
        match self {
            BoundaryReference::Mesh(m) => m.bounds().diagonal(),
            BoundaryReference::Surface(s) => s.bounds().diagonal(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryAnalysis {
    pub dimension: usize,
    pub signed: bool,
    pub diag_reference: f64,
    /// 2D only.
    pub loops: Vec<BoundaryCurve>,
    pub series: Vec<LoopSeries>,
    /// 3D only.
    pub surface: Option<SurfaceErrorField>,
    pub records: Vec<BoundaryErrorRecord>,
    pub collated: CollatedSeries,
}

pub fn analyze_boundary(
    original: &Mesh,
    adjacency: &Adjacency,
    reference: &BoundaryReference,
    mode: SignMode,
) -> Result<BoundaryAnalysis, AnalysisError> {
    if original.dimension() != reference.dimension() {
        return Err(AnalysisError::DimensionMismatch {
            original: original.dimension(),
            reference: reference.dimension(),
        });
    }
    let diag_reference = reference.diagonal();
    match (original.kind(), reference) {
        (CellKind::Quad, BoundaryReference::Mesh(refmesh)) => {
            let loops = extract_boundary_2d(original, adjacency)?;
            if loops.is_empty() {
                return Err(BoundaryError::EmptyBoundary.into());
            }
            let ref_loops = extract_boundary_2d(refmesh, &Adjacency::build(refmesh))?;
            let curves = ReferenceCurves::new(refmesh, &ref_loops)?;
            let mut points: Vec<(usize, Point)> = loops
                .iter()
                .flat_map(|l| l.vertices.iter().map(|&v| (v, *original.vertex(v))))
                .collect();
            points.sort_by_key(|p| p.0);
            let records = signed_boundary_error_2d(&points, &curves, diag_reference)?;
            let series = per_loop_series(&loops, &records)?;
            let collated = collate(&records)?;
            Ok(BoundaryAnalysis {
                dimension: 2,
                signed: true,
                diag_reference,
                loops,
                series,
                surface: None,
                records,
                collated,
            })
        }
        (CellKind::Hex, reference) => {
            let surface = extract_boundary_3d(original, adjacency)?;
            if surface.vertices.is_empty() {
                return Err(BoundaryError::EmptyBoundary.into());
            }
            let owned;
            let refsurf = match reference {
                BoundaryReference::Surface(s) => s,
                BoundaryReference::Mesh(m) => {
                    let s = extract_boundary_3d(m, &Adjacency::build(m))?;
                    owned = ReferenceSurface::from_quads(m.vertices().to_vec(), &s.faces)
                        .expect("boundary faces index the mesh");
                    &owned
                }
            };
            let field = signed_boundary_error_3d(original, &surface, refsurf, diag_reference, mode)?;
            let collated = collate(&field.records)?;
            Ok(BoundaryAnalysis {
                dimension: 3,
                signed: field.signed,
                diag_reference,
                loops: Vec::new(),
                series: Vec::new(),
                records: field.records.clone(),
                surface: Some(field),
                collated,
            })
        }
        (CellKind::Quad, BoundaryReference::Surface(_)) => unreachable!("dimension checked above"),
    }
}

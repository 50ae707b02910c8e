//! Versioned JSON scene and compare documents consumed by the viewer.
//!
//! Every array is flat and ordered deterministically, and every id refers
//! to an entry in the same document. The digest covers the body only, so
//! the optional timestamp does not affect it.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::analysis::{Analysis, BoundaryAnalysis, ResolvedParams};
use crate::boundary::{BoundaryErrorRecord, CollatedSeries, LoopSeries, SignMode};
use crate::glyph::{sub_region, PALETTE};
use crate::mesh::CellKind;
use crate::overlap::OverlapReport;

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_NAME: &str = "hqview";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum SceneError {
    #[error("invalid scene JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported schema version {found} (expected {SCHEMA_VERSION})")]
    SchemaVersion { found: u32 },
    #[error("digest mismatch: stored {stored}, computed {computed}")]
    Digest { stored: String, computed: String },
    #[error("dangling reference: {0}")]
    Dangling(String),
    #[error("compare scenes describe different models: `{0}` and `{1}`")]
    ModelMismatch(String, String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeshSection {
    pub name: String,
    pub cell_kind: String,
    pub dimension: usize,
    pub arity: usize,
    pub vertex_count: usize,
    pub cell_count: usize,
    /// `x, y, z` per vertex.
    pub positions: Vec<f64>,
    /// `arity` vertex ids per cell.
    pub cells: Vec<usize>,
    /// Two vertex ids per edge; edge ids index this list.
    pub edges: Vec<usize>,
    /// Four vertex ids per boundary face (hex meshes only).
    pub boundary_faces: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QualitySection {
    /// `J_m` per vertex.
    pub vertex_quality: Vec<f64>,
    pub median: f64,
    pub worst_vertex: usize,
    pub worst_quality: f64,
    /// Corners of vertex `v` are `corner_offsets[v]..corner_offsets[v + 1]`.
    pub corner_offsets: Vec<usize>,
    pub corner_cells: Vec<usize>,
    pub corner_values: Vec<f64>,
    pub histogram_edges: Vec<f64>,
    pub histogram_counts: Vec<usize>,
    /// Vertex ids by ascending quality, ties by id.
    pub sorted_vertices: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GlyphEntry {
    pub vertex: usize,
    pub quality: f64,
    pub severity: f64,
    pub radius: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterEntry {
    pub id: usize,
    pub members: Vec<usize>,
    pub representative: usize,
    pub radius: f64,
    pub worst_quality: f64,
    pub member_count: usize,
    pub color_index: usize,
    /// Cells incident to any member, ascending.
    pub region_cells: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GlyphSection {
    pub r_max: f64,
    pub r_dmin: f64,
    pub palette: Vec<String>,
    pub displayed: Vec<GlyphEntry>,
    pub clusters: Vec<ClusterEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureSection {
    pub threshold: f64,
    /// Edge ids, ascending.
    pub emphasized: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundarySection {
    pub dimension: usize,
    pub reference: String,
    pub sign_mode: SignMode,
    pub signed: bool,
    pub diag_reference: f64,
    pub loops: Vec<LoopSeries>,
    pub records: Vec<BoundaryErrorRecord>,
    pub collated: CollatedSeries,
    /// Four vertex ids per boundary face of the original (3D only).
    pub surface_faces: Vec<usize>,
    /// `u, v` per record when the reference carries a UV map.
    pub uv: Option<Vec<f64>>,
}

impl BoundarySection {
    pub fn new(reference: &str, mode: SignMode, b: &BoundaryAnalysis) -> Self {
        let (surface_faces, uv) = match &b.surface {
            Some(s) => (
                s.surface.faces.iter().flatten().copied().collect(),
                s.uv.as_ref().map(|uv| uv.iter().flatten().copied().collect()),
            ),
            None => (Vec::new(), None),
        };
        Self {
            dimension: b.dimension,
            reference: reference.to_string(),
            sign_mode: mode,
            signed: b.signed,
            diag_reference: b.diag_reference,
            loops: b.series.clone(),
            records: b.records.clone(),
            collated: b.collated.clone(),
            surface_faces,
            uv,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub inputs: Vec<String>,
    pub parameters: ResolvedParams,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SceneBody {
    pub model: String,
    pub mesh: MeshSection,
    pub quality: QualitySection,
    pub glyphs: GlyphSection,
    pub feature_edges: FeatureSection,
    pub overlaps: OverlapReport,
    pub boundary: Option<BoundarySection>,
    pub provenance: Provenance,
}

impl SceneBody {
    pub fn from_analysis(model: &str, inputs: Vec<String>, a: &Analysis, boundary: Option<BoundarySection>) -> Self {
        let mesh = &a.mesh;
        let q = &a.quality;
        let mut corner_offsets = vec![0];
        let mut corner_cells = Vec::new();
        let mut corner_values = Vec::new();
        for v in 0..q.len() {
            for c in q.corners(v) {
                corner_cells.push(c.cell);
                corner_values.push(c.value);
            }
            corner_offsets.push(corner_cells.len());
        }
        let (worst_vertex, worst_quality) = q.worst().expect("analysis of a non-empty mesh");
        let boundary_faces = if mesh.kind() == CellKind::Hex {
            a.adjacency
                .faces()
                .iter()
                .filter(|f| f.cells.len() == 1)
                .flat_map(|f| f.vertices)
                .collect()
        } else {
            Vec::new()
        };
        let clusters = a
            .clusters
            .iter()
            .map(|c| ClusterEntry {
                id: c.id,
                members: c.members.clone(),
                representative: c.representative,
                radius: c.radius,
                worst_quality: c.worst_quality,
                member_count: c.member_count,
                color_index: c.color_index,
                region_cells: sub_region(mesh, &a.adjacency, c).cells,
            })
            .collect();
        Self {
            model: model.to_string(),
            mesh: MeshSection {
                name: mesh.name().to_string(),
                cell_kind: match mesh.kind() {
                    CellKind::Hex => "hex".into(),
                    CellKind::Quad => "quad".into(),
                },
                dimension: mesh.dimension(),
                arity: mesh.arity(),
                vertex_count: mesh.vertex_count(),
                cell_count: mesh.cell_count(),
                positions: mesh.vertices().iter().flat_map(|p| [p.x, p.y, p.z]).collect(),
                cells: mesh.connectivity().to_vec(),
                edges: a.adjacency.edges().iter().flat_map(|e| e.vertices).collect(),
                boundary_faces,
            },
            quality: QualitySection {
                vertex_quality: q.vertex_quality().to_vec(),
                median: q.median(),
                worst_vertex,
                worst_quality,
                corner_offsets,
                corner_cells,
                corner_values,
                histogram_edges: a.histogram.edges.clone(),
                histogram_counts: a.histogram.counts.clone(),
                sorted_vertices: a.histogram.sorted_vertices.clone(),
            },
            glyphs: GlyphSection {
                r_max: a.glyphs.params.r_max,
                r_dmin: a.glyphs.params.r_dmin,
                palette: PALETTE.iter().map(|s| s.to_string()).collect(),
                displayed: a
                    .glyphs
                    .displayed()
                    .iter()
                    .map(|g| GlyphEntry {
                        vertex: g.vertex,
                        quality: g.quality,
                        severity: g.severity,
                        radius: g.radius,
                    })
                    .collect(),
                clusters,
            },
            feature_edges: FeatureSection {
                threshold: a.features.threshold,
                emphasized: a.features.emphasized.clone(),
            },
            overlaps: a.overlaps.clone(),
            boundary,
            provenance: Provenance {
                tool: TOOL_NAME.into(),
                version: TOOL_VERSION.into(),
                inputs,
                parameters: a.params,
            },
        }
    }

    /// Checks that every id in the body resolves within the body.
    pub fn validate(&self) -> Result<(), SceneError> {
        let m = &self.mesh;
        let nv = m.vertex_count;
        let nc = m.cell_count;
        let ne = m.edges.len() / 2;
        let bad = |what: &str| Err(SceneError::Dangling(what.to_string()));
        if m.positions.len() != 3 * nv || m.cells.len() != m.arity * nc || !m.edges.len().is_multiple_of(2) {
            return bad("mesh array lengths");
        }
        let vertex_ok = |v: &usize| *v < nv;
        if !m.cells.iter().all(vertex_ok) || !m.edges.iter().all(vertex_ok) || !m.boundary_faces.iter().all(vertex_ok) {
            return bad("mesh vertex id");
        }
        let q = &self.quality;
        if q.vertex_quality.len() != nv
            || q.corner_offsets.len() != nv + 1
            || q.corner_offsets.last() != Some(&q.corner_cells.len())
            || q.corner_cells.len() != q.corner_values.len()
            || !q.corner_cells.iter().all(|c| *c < nc)
            || q.worst_vertex >= nv
            || q.sorted_vertices.len() != nv
            || !q.sorted_vertices.iter().all(vertex_ok)
        {
            return bad("quality section");
        }
        let g = &self.glyphs;
        if !g.displayed.iter().all(|e| e.vertex < nv) {
            return bad("glyph vertex id");
        }
        for c in &g.clusters {
            if !c.members.iter().all(vertex_ok)
                || !c.members.contains(&c.representative)
                || c.color_index >= g.palette.len()
                || !c.region_cells.iter().all(|x| *x < nc)
            {
                return bad("cluster");
            }
        }
        if !self.feature_edges.emphasized.iter().all(|e| *e < ne) {
            return bad("feature edge id");
        }
        let o = &self.overlaps;
        if !o.vertex_pairs.iter().all(|p| p.a < nv && p.b < nv)
            || !o.containments.iter().all(|c| c.vertex < nv && c.cell < nc)
            || !o.arrows.iter().all(|a| a.target < nv)
        {
            return bad("overlap id");
        }
        if let Some(b) = &self.boundary {
            if !b.records.iter().all(|r| r.vertex < nv)
                || !b.loops.iter().all(|l| l.vertices.iter().all(vertex_ok))
                || !b.collated.vertices.iter().all(vertex_ok)
                || !b.surface_faces.iter().all(vertex_ok)
                || b.uv.as_ref().is_some_and(|uv| uv.len() != 2 * b.records.len())
            {
                return bad("boundary section");
            }
        }
        Ok(())
    }

    /// Hex SHA-256 of the compact JSON encoding.
    pub fn digest(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("scene bodies serialize");
        hex::encode(Sha256::digest(&bytes))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SceneDocument {
    pub schema_version: u32,
    pub digest: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generated_at: Option<String>,
    pub body: SceneBody,
}

impl SceneDocument {
    pub fn new(body: SceneBody) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            digest: body.digest(),
            generated_at: None,
            body,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("scene documents serialize");
        s.push('\n');
        s
    }

    /// Parses and checks version, digest and id references.
    pub fn from_json(text: &str) -> Result<Self, SceneError> {
        let doc: SceneDocument = serde_json::from_str(text)?;
        doc.check()?;
        Ok(doc)
    }

    pub fn check(&self) -> Result<(), SceneError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(SceneError::SchemaVersion {
                found: self.schema_version,
            });
        }
        let computed = self.body.digest();
        if computed != self.digest {
            return Err(SceneError::Digest {
                stored: self.digest.clone(),
                computed,
            });
        }
        self.body.validate()
    }
}

/// Framing shared by both sides of a comparison.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CameraHint {
    pub center: [f64; 3],
    pub radius: f64,
}

impl CameraHint {
    /// Bounding sphere of the union of both meshes' boxes.
    pub fn enclosing(a: &SceneBody, b: &SceneBody) -> Self {
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for p in a.mesh.positions.chunks_exact(3).chain(b.mesh.positions.chunks_exact(3)) {
            for k in 0..3 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        let center = [0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1]), 0.5 * (lo[2] + hi[2])];
        let radius = 0.5 * ((hi[0] - lo[0]).powi(2) + (hi[1] - lo[1]).powi(2) + (hi[2] - lo[2]).powi(2)).sqrt();
        Self { center, radius }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompareDocument {
    pub schema_version: u32,
    pub model: String,
    pub labels: [String; 2],
    pub camera: CameraHint,
    pub scenes: [SceneDocument; 2],
}

impl CompareDocument {
    pub fn new(labels: [String; 2], a: SceneDocument, b: SceneDocument) -> Result<Self, SceneError> {
        if a.body.model != b.body.model {
            return Err(SceneError::ModelMismatch(a.body.model.clone(), b.body.model.clone()));
        }
        Ok(Self {
            schema_version: SCHEMA_VERSION,
            model: a.body.model.clone(),
            labels,
            camera: CameraHint::enclosing(&a.body, &b.body),
            scenes: [a, b],
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("compare documents serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, SceneError> {
        let doc: CompareDocument = serde_json::from_str(text)?;
        if doc.schema_version != SCHEMA_VERSION {
            return Err(SceneError::SchemaVersion {
                found: doc.schema_version,
            });
        }
        for s in &doc.scenes {
            s.check()?;
            if s.body.model != doc.model {
                return Err(SceneError::ModelMismatch(doc.model.clone(), s.body.model.clone()));
            }
        }
        Ok(doc)
    }
}

//! Hex and quad mesh quality analysis: scaled Jacobians, quality glyphs and
//! their clusters, feature edges, overlapping elements, and boundary error
//! against a reference.

pub mod analysis;
pub mod boundary;
pub mod features;
pub mod geometry;
pub mod glyph;
pub mod io;
pub mod mesh;
pub mod overlap;
pub mod quality;
pub mod scene;
pub mod synthetic;

pub use analysis::{analyze, analyze_boundary, Analysis, AnalysisError, AnalysisOptions, BoundaryReference, Param};
pub use mesh::{Adjacency, CellKind, Mesh, ReferenceSurface};
pub use scene::{CompareDocument, SceneBody, SceneDocument};

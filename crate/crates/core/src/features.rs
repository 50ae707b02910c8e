//! Quality-defined feature edges: edges whose two endpoints both have
//! vertex quality below a threshold.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mesh::Adjacency;
use crate::quality::QualityField;

#[derive(Debug, Error, PartialEq)]
#[error("empty quality field: no vertices to take a median over")]
pub struct EmptyField;

/// Offset added to the median vertex quality for the default threshold.
pub const DEFAULT_THRESHOLD_OFFSET: f64 = 0.2;

/// `min(0.2 + q_m, 1)`.
pub fn default_e_qmax(field: &QualityField) -> Result<f64, EmptyField> {
    if field.is_empty() {
        return Err(EmptyField);
    }
    Ok((DEFAULT_THRESHOLD_OFFSET + field.median()).min(1.0))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureEdgeSet {
    pub threshold: f64,
    /// Edge ids (into `Adjacency::edges`), ascending.
    pub emphasized: Vec<usize>,
    pub deemphasized: Vec<usize>,
}

pub fn is_feature_edge(quality_a: f64, quality_b: f64, threshold: f64) -> bool {
    quality_a < threshold && quality_b < threshold
}

pub fn filter_feature_edges(adjacency: &Adjacency, field: &QualityField, e_qmax: f64) -> FeatureEdgeSet {
    let (emphasized, deemphasized) = (0..adjacency.edges().len()).partition(|&e| {
        let [a, b] = adjacency.edges()[e].vertices;
        is_feature_edge(field.quality(a), field.quality(b), e_qmax)
    });
    FeatureEdgeSet {
        threshold: e_qmax,
        emphasized,
        deemphasized,
    }
}

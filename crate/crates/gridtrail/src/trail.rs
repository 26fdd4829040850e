//! Covering-trail model, the exact verifier, and the closed-form bounds h(k).

use crate::geom::{
    aabb_extent, rat_from_string, rat_to_string, segment_grid_coverage, GeomError, Rat,
    RationalPoint, Segment,
};
use crate::grid::{all_nodes, classify_node};
use num::BigInt;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TrailError {
    #[error("trail needs at least 2 vertices")]
    TooShort,
    #[error("vertex {0} has dimension {1}, expected {2}")]
    WrongDimension(usize, usize, usize),
    #[error("vertices {0} and {1} coincide (zero-length segment)")]
    DuplicateVertex(usize, usize),
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error("bad trail document: {0}")]
    BadDocument(String),
    #[error("trail is not complete: {0} grid nodes missing")]
    Incomplete(usize),
    #[error("trail leaves the box: extent {0} on axis {1} exceeds {2}")]
    OutOfBox(String, usize, String),
    #[error("k must be >= 1")]
    BadK,
}

/// Connected polygonal chain; segment i joins vertices i and i+1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trail {
    k: usize,
    vertices: Vec<RationalPoint>,
}

impl Trail {
    pub fn new(k: usize, vertices: Vec<RationalPoint>) -> Result<Self, TrailError> {
        if vertices.len() < 2 {
            return Err(TrailError::TooShort);
        }
        for (i, v) in vertices.iter().enumerate() {
            if v.dim() != k {
                return Err(TrailError::WrongDimension(i, v.dim(), k));
            }
        }
        for i in 0..vertices.len() - 1 {
            if vertices[i] == vertices[i + 1] {
                return Err(TrailError::DuplicateVertex(i, i + 1));
            }
        }
        Ok(Trail { k, vertices })
    }

    pub fn from_int_vertices(k: usize, vertices: &[&[i64]]) -> Result<Self, TrailError> {
        Trail::new(
            k,
            vertices.iter().map(|v| RationalPoint::from_ints(v)).collect(),
        )
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn vertices(&self) -> &[RationalPoint] {
        &self.vertices
    }

    pub fn segment_count(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn segments(&self) -> Vec<Segment> {
        (0..self.segment_count())
            .map(|i| {
                Segment::new(self.vertices[i].clone(), self.vertices[i + 1].clone())
                    .expect("validated at construction")
            })
            .collect()
    }

    pub fn reversed(&self) -> Trail {
        let mut vertices = self.vertices.clone();
        vertices.reverse();
        Trail { k: self.k, vertices }
    }
}

#[derive(Serialize, Deserialize)]
struct TrailDoc {
    k: usize,
    vertices: Vec<Vec<String>>,
}

impl Trail {
    pub fn to_json(&self) -> String {
        let doc = TrailDoc {
            k: self.k,
            vertices: self
                .vertices
                .iter()
                .map(|v| v.coords().iter().map(rat_to_string).collect())
                .collect(),
        };
        serde_json::to_string(&doc).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self, TrailError> {
        let doc: TrailDoc =
            serde_json::from_str(s).map_err(|e| TrailError::BadDocument(e.to_string()))?;
        let mut vertices = Vec::with_capacity(doc.vertices.len());
        for v in &doc.vertices {
            let coords = v
                .iter()
                .map(|c| rat_from_string(c))
                .collect::<Result<Vec<Rat>, _>>()?;
            vertices.push(RationalPoint::new(coords)?);
        }
        Trail::new(doc.k, vertices)
    }
}

/// Verification result for one trail.
#[derive(Debug, Clone)]
pub struct CoverageReport {
    pub segment_count: usize,
    pub covered: BTreeSet<Vec<u8>>,
    pub missing: BTreeSet<Vec<u8>>,
    pub extents: Vec<Rat>,
    pub box_ok: bool,
    pub complete: bool,
    pub endpoints: (RationalPoint, RationalPoint),
    /// Node class per endpoint when the endpoint is a grid node.
    pub endpoint_classes: (Option<usize>, Option<usize>),
}

impl CoverageReport {
    pub fn to_json_value(&self) -> serde_json::Value {
        let nodes = |s: &BTreeSet<Vec<u8>>| {
            serde_json::Value::Array(s.iter().map(|n| serde_json::json!(n)).collect())
        };
        serde_json::json!({
            "box_ok": self.box_ok,
            "complete": self.complete,
            "covered": nodes(&self.covered),
            "endpoint_classes": [self.endpoint_classes.0, self.endpoint_classes.1],
            "extents": self.extents.iter().map(rat_to_string).collect::<Vec<_>>(),
            "missing": nodes(&self.missing),
            "segment_count": self.segment_count,
        })
    }
}

/// Per-axis box limits; `None` means the uniform side-3 box.
pub fn box_limits(k: usize, spec: Option<&[Rat]>) -> Vec<Rat> {
    match spec {
        Some(v) => v.to_vec(),
        None => vec![Rat::from(BigInt::from(3)); k],
    }
}

/// Exact coverage/extent verification of a trail against G_k.
pub fn verify_trail(t: &Trail, box_extent: Option<&[Rat]>) -> Result<CoverageReport, TrailError> {
    let k = t.k();
    let limits = box_limits(k, box_extent);
    if limits.len() != k {
        return Err(TrailError::WrongDimension(0, limits.len(), k));
    }
    let mut covered = BTreeSet::new();
    for s in t.segments() {
        covered.extend(segment_grid_coverage(&s, k)?);
    }
    let missing: BTreeSet<Vec<u8>> = all_nodes(k)
        .into_iter()
        .filter(|n| !covered.contains(n))
        .collect();
    let extents = aabb_extent(t.vertices())?;
    let box_ok = extents.iter().zip(&limits).all(|(e, l)| e <= l);
    let first = t.vertices().first().unwrap().clone();
    let last = t.vertices().last().unwrap().clone();
    let class_of = |p: &RationalPoint| {
        p.as_grid_node()
            .and_then(|n| classify_node(&n, k).ok())
    };
    Ok(CoverageReport {
        segment_count: t.segment_count(),
        complete: missing.is_empty(),
        endpoint_classes: (class_of(&first), class_of(&last)),
        endpoints: (first, last),
        covered,
        missing,
        extents,
        box_ok,
    })
}

/// Lower bound on segments of any in-box covering trail: (3^k - 1)/2.
pub fn h_lower(k: u32) -> Result<u128, TrailError> {
    if k < 1 {
        return Err(TrailError::BadK);
    }
    Ok((3u128.pow(k) - 1) / 2)
}

/// Same closed form, satisfying h(k+1) = 3*h(k) + 1.
pub fn h_formula(k: u32) -> Result<u128, TrailError> {
    h_lower(k)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub optimal: bool,
    pub bound: u128,
}

/// A complete in-box trail matching the lower bound is minimum-length.
pub fn optimality_certificate(t: &Trail) -> Result<Certificate, TrailError> {
    let report = verify_trail(t, None)?;
    if !report.complete {
        return Err(TrailError::Incomplete(report.missing.len()));
    }
    if !report.box_ok {
        let limit = Rat::from(BigInt::from(3));
        let (axis, e) = report
            .extents
            .iter()
            .enumerate()
            .find(|(_, e)| **e > limit)
            .expect("box_ok false implies an offending axis");
        return Err(TrailError::OutOfBox(
            rat_to_string(e),
            axis,
            rat_to_string(&limit),
        ));
    }
    let bound = h_lower(t.k() as u32)?;
    Ok(Certificate {
        optimal: t.segment_count() as u128 == bound,
        bound,
    })
}

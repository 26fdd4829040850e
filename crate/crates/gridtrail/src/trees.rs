//! Covering trees for {0,1,2}^k: the Definition-2 verifier, the two frozen
//! 12-segment constructions for k = 3, the dimension-lifting replication, and
//! the closed-form size bounds.
//!
//! Connectivity is decided on the contact graph: each segment is split at
//! every point where another segment's *endpoint* lies in its interior, and
//! the resulting subsegments are the graph edges. Shared endpoints and
//! T-junctions connect; a pure interior-interior crossing does not.

use crate::geom::{
    aabb_extent, point_on_segment, rat_from_string, rat_to_string, segment_grid_coverage,
    GeomError, Rat, RationalPoint, Segment,
};
use crate::grid::all_nodes;
use crate::trail::h_formula;
use num::{BigInt, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TreeError {
    #[error(transparent)]
    Geometry(#[from] GeomError),
    #[error("segment {0} has dimension {1}, tree has dimension {2}")]
    WrongDimension(usize, usize, usize),
    #[error("segments {0} and {1} overlap along a positive-length interval")]
    Overlap(usize, usize),
    #[error("tree must have at least one segment")]
    Empty,
    #[error("k must be at least {0} for this bound")]
    BadK(u32),
    #[error("replication input must be a tree missing at most one node, got: {0}")]
    BadReplicationInput(String),
    #[error("replication produced no verifiable tree: {0}")]
    ReplicationFailed(String),
    #[error("malformed tree document: {0}")]
    BadDocument(String),
}

/// A finite arrangement of segments in R^k intended to cover grid nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoveringTree {
    k: usize,
    segments: Vec<Segment>,
}

#[derive(Serialize, Deserialize)]
struct TreeDoc {
    k: usize,
    segments: Vec<[Vec<String>; 2]>,
}

impl CoveringTree {
    pub fn new(k: usize, segments: Vec<Segment>) -> Result<Self, TreeError> {
        if segments.is_empty() {
            return Err(TreeError::Empty);
        }
        for (i, s) in segments.iter().enumerate() {
            if s.dim() != k {
                return Err(TreeError::WrongDimension(i, s.dim(), k));
            }
        }
        Ok(CoveringTree { k, segments })
    }

    /// Build from integer endpoint triples; only the first `k` coordinates
    /// of each triple are used.
    pub fn from_int_segments(k: usize, segs: &[([i64; 3], [i64; 3])]) -> Result<Self, TreeError> {
        if k == 0 || k > 3 {
            return Err(TreeError::BadK(k as u32));
        }
        let mut out = Vec::with_capacity(segs.len());
        for (a, b) in segs {
            out.push(Segment::new(
                RationalPoint::from_ints(&a[..k]),
                RationalPoint::from_ints(&b[..k]),
            )?);
        }
        CoveringTree::new(k, out)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn size(&self) -> usize {
        self.segments.len()
    }

    /// All segment endpoints, deduplicated.
    pub fn vertices(&self) -> Vec<RationalPoint> {
        let mut set = BTreeSet::new();
        for s in &self.segments {
            set.insert(s.a().clone());
            set.insert(s.b().clone());
        }
        set.into_iter().collect()
    }

    pub fn to_json(&self) -> String {
        let doc = TreeDoc {
            k: self.k,
            segments: self
                .segments
                .iter()
                .map(|s| {
                    [
                        s.a().coords().iter().map(rat_to_string).collect(),
                        s.b().coords().iter().map(rat_to_string).collect(),
                    ]
                })
                .collect(),
        };
        serde_json::to_string(&doc).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self, TreeError> {
        let doc: TreeDoc =
            serde_json::from_str(s).map_err(|e| TreeError::BadDocument(e.to_string()))?;
        let mut segments = Vec::with_capacity(doc.segments.len());
        for [a, b] in &doc.segments {
            let pa = RationalPoint::new(
                a.iter()
                    .map(|c| rat_from_string(c))
                    .collect::<Result<_, _>>()?,
            )?;
            let pb = RationalPoint::new(
                b.iter()
                    .map(|c| rat_from_string(c))
                    .collect::<Result<_, _>>()?,
            )?;
            segments.push(Segment::new(pa, pb)?);
        }
        CoveringTree::new(doc.k, segments)
    }
}

/// Result of checking a segment arrangement against Definition 2.
#[derive(Debug, Clone)]
pub struct TreeReport {
    pub size: usize,
    pub covered: BTreeSet<Vec<u8>>,
    pub missing: BTreeSet<Vec<u8>>,
    pub connected: bool,
    pub acyclic: bool,
    pub extents: Vec<Rat>,
    /// None when no box constraint was requested.
    pub box_ok: Option<bool>,
}

impl TreeReport {
    pub fn is_tree(&self) -> bool {
        self.connected && self.acyclic
    }

    pub fn covering(&self) -> bool {
        self.missing.is_empty()
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let nodes = |s: &BTreeSet<Vec<u8>>| {
            serde_json::Value::Array(s.iter().map(|n| serde_json::json!(n)).collect())
        };
        serde_json::json!({
            "acyclic": self.acyclic,
            "box_ok": self.box_ok,
            "connected": self.connected,
            "covered": nodes(&self.covered),
            "extents": self.extents.iter().map(rat_to_string).collect::<Vec<_>>(),
            "is_tree": self.is_tree(),
            "missing": nodes(&self.missing),
            "size": self.size,
        })
    }
}

fn rat_dot(u: &[Rat], v: &[Rat]) -> Rat {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

fn rat_sub(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// True when the two segments lie on one line and share more than a point.
fn segments_overlap(s: &Segment, t: &Segment) -> Result<bool, GeomError> {
    let d1 = rat_sub(s.b().coords(), s.a().coords());
    let d2 = rat_sub(t.b().coords(), t.a().coords());
    let k = d1.len();
    let parallel = (0..k).all(|i| (i + 1..k).all(|j| &d1[i] * &d2[j] == &d1[j] * &d2[i]));
    if !parallel {
        return Ok(false);
    }
    let w = rat_sub(t.a().coords(), s.a().coords());
    let collinear = (0..k).all(|i| (i + 1..k).all(|j| &w[i] * &d1[j] == &w[j] * &d1[i]));
    if !collinear {
        return Ok(false);
    }
    // Shared line: compare parameter intervals along d1.
    let dd = rat_dot(&d1, &d1);
    let ta = rat_dot(&rat_sub(t.a().coords(), s.a().coords()), &d1);
    let tb = rat_dot(&rat_sub(t.b().coords(), s.a().coords()), &d1);
    let (lo, hi) = if ta <= tb { (ta, tb) } else { (tb, ta) };
    let l = if lo > Rat::zero() { lo } else { Rat::zero() };
    let h = if hi < dd { hi } else { dd };
    Ok(l < h)
}

/// Exact verification of a segment arrangement: coverage of G_k, contact-graph
/// connectivity and acyclicity, and optional per-axis extent limits.
pub fn verify_tree(t: &CoveringTree, box_extent: Option<&[Rat]>) -> Result<TreeReport, TreeError> {
    let k = t.k;
    let segs = &t.segments;
    for i in 0..segs.len() {
        for j in (i + 1)..segs.len() {
            if segments_overlap(&segs[i], &segs[j])? {
                return Err(TreeError::Overlap(i, j));
            }
        }
    }
    // Split each segment at every other segment's endpoint lying on it.
    let mut vid: BTreeMap<RationalPoint, usize> = BTreeMap::new();
    let mut intern = |p: &RationalPoint, next: &mut usize| -> usize {
        *vid.entry(p.clone()).or_insert_with(|| {
            let id = *next;
            *next += 1;
            id
        })
    };
    let mut next = 0usize;
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for (i, s) in segs.iter().enumerate() {
        let mut cuts: BTreeSet<RationalPoint> = BTreeSet::new();
        cuts.insert(s.a().clone());
        cuts.insert(s.b().clone());
        for (j, other) in segs.iter().enumerate() {
            if i == j {
                continue;
            }
            for q in [other.a(), other.b()] {
                if point_on_segment(q, s)? {
                    cuts.insert(q.clone());
                }
            }
        }
        // Order cut points along the segment by parameter.
        let d = rat_sub(s.b().coords(), s.a().coords());
        let mut ordered: Vec<(Rat, RationalPoint)> = cuts
            .into_iter()
            .map(|p| (rat_dot(&rat_sub(p.coords(), s.a().coords()), &d), p))
            .collect();
        ordered.sort_by(|a, b| a.0.cmp(&b.0));
        for w in ordered.windows(2) {
            let u = intern(&w[0].1, &mut next);
            let v = intern(&w[1].1, &mut next);
            edges.push((u, v));
        }
    }
    // Union-find over split vertices.
    let mut parent: Vec<usize> = (0..next).collect();
    fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut merges = 0usize;
    for &(u, v) in &edges {
        let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
        if ru != rv {
            parent[ru] = rv;
            merges += 1;
        }
    }
    let components = next - merges;
    let connected = components == 1;
    // A forest has exactly V - C edges; anything more closes a cycle.
    let acyclic = edges.len() == next - components;

    let mut covered = BTreeSet::new();
    for s in segs {
        covered.extend(segment_grid_coverage(s, k)?);
    }
    let missing: BTreeSet<Vec<u8>> = all_nodes(k)
        .into_iter()
        .filter(|n| !covered.contains(n))
        .collect();
    let extents = aabb_extent(&t.vertices())?;
    let box_ok = box_extent.map(|lims| {
        lims.len() == k && extents.iter().zip(lims).all(|(e, l)| e <= l)
    });
    Ok(TreeReport {
        size: segs.len(),
        covered,
        missing,
        connected,
        acyclic,
        extents,
        box_ok,
    })
}

/// 12-segment tree covering 26 of the 27 nodes of G_3, all vertices inside a
/// 2x2x3 box (unit slack on the third axis only). The uncovered node (2,2,1)
/// lies on no segment, so the replication link along a new axis can pick up
/// the three uncovered nodes of the copies in one stroke.
pub fn partial_tree_3() -> CoveringTree {
    CoveringTree::from_int_segments(3, PARTIAL_TREE_3_SEGMENTS)
        .expect("frozen construction is well-formed")
}

/// The node of G_3 that `partial_tree_3` leaves uncovered.
pub fn partial_tree_3_missing() -> Vec<u8> {
    vec![2, 2, 1]
}

const PARTIAL_TREE_3_SEGMENTS: &[([i64; 3], [i64; 3])] = &[
    // placeholder: filled from the frozen golden search result
];

/// 12-segment tree covering all 27 nodes of G_3; no box constraint.
pub fn full_tree_3() -> CoveringTree {
    CoveringTree::from_int_segments(3, FULL_TREE_3_SEGMENTS)
        .expect("frozen construction is well-formed")
}

const FULL_TREE_3_SEGMENTS: &[([i64; 3], [i64; 3])] = &[
    // placeholder: filled from the frozen golden search result
];

fn append_coord(p: &RationalPoint, w: i64) -> RationalPoint {
    let mut c = p.coords().to_vec();
    c.push(Rat::from(BigInt::from(w)));
    RationalPoint::new(c).expect("nonempty")
}

/// Lift a k-dimensional tree that misses at most one node to a covering tree
/// for G_{k+1}: three copies at new-axis offsets 0, 1, 2, a link through the
/// three copies' missing nodes, and at most two connector segments.
pub fn replicate_tree(t: &CoveringTree) -> Result<CoveringTree, TreeError> {
    let report = verify_tree(t, None)?;
    if !report.is_tree() || report.missing.len() > 1 {
        return Err(TreeError::BadReplicationInput(format!(
            "connected={} acyclic={} missing={}",
            report.connected,
            report.acyclic,
            report.missing.len()
        )));
    }
    let k2 = t.k + 1;
    let mut base: Vec<Segment> = Vec::with_capacity(3 * t.size() + 3);
    for w in 0..3i64 {
        for s in &t.segments {
            base.push(Segment::new(
                append_coord(s.a(), w),
                append_coord(s.b(), w),
            )?);
        }
    }
    let missing = report.missing.iter().next().cloned();
    if let Some(m) = &missing {
        // One link covers the three collinear copies of the missing node.
        let mc: Vec<i64> = m.iter().map(|&c| c as i64).collect();
        let mut lo = mc.clone();
        lo.push(0);
        let mut hi = mc.clone();
        hi.push(2);
        base.push(Segment::new(
            RationalPoint::from_ints(&lo),
            RationalPoint::from_ints(&hi),
        )?);
    }
    let verts = t.vertices();
    // First connector: a new-axis segment through one common vertex of the
    // three copies ties them together.
    for p in &verts {
        let ca = Segment::new(append_coord(p, 0), append_coord(p, 2))?;
        let mut with_ca = base.clone();
        with_ca.push(ca);
        if missing.is_none() {
            let cand = CoveringTree::new(k2, with_ca)?;
            let rep = verify_tree(&cand, None)?;
            if rep.is_tree() && rep.covering() {
                return Ok(cand);
            }
            continue;
        }
        // Second connector: join the link (at its midpoint node) to a vertex
        // of the middle copy, inside the w = 1 hyperplane.
        let m = missing.as_ref().unwrap();
        let mc: Vec<i64> = m.iter().map(|&c| c as i64).collect();
        let mut mid = mc.clone();
        mid.push(1);
        let link_mid = RationalPoint::from_ints(&mid);
        for r in &verts {
            let cb = match Segment::new(link_mid.clone(), append_coord(r, 1)) {
                Ok(s) => s,
                Err(_) => continue,
            };
            let mut segs = with_ca.clone();
            segs.push(cb);
            let cand = CoveringTree::new(k2, segs)?;
            let rep = verify_tree(&cand, None)?;
            if rep.is_tree() && rep.covering() {
                return Ok(cand);
            }
        }
    }
    Err(TreeError::ReplicationFailed(
        "no vertex pair yielded a verified covering tree".into(),
    ))
}

/// Closed-form size bounds for covering trees of G_k.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeBounds {
    pub k: u32,
    /// h(k): in-box covering trees of this size always exist.
    pub dt_upper: u128,
    /// (3^(k-4)-1)/2 + 13*3^(k-3), valid for k >= 4.
    pub lemma1_upper: Option<u128>,
    /// (25*3^(k-3)-1)/2, valid for k >= 3.
    pub thm2_upper: Option<u128>,
    /// h(k) - thm2_upper = 3^(k-3), valid for k >= 3.
    pub gap_lower: Option<u128>,
}

impl TreeBounds {
    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::json!({
            "dt_upper": self.dt_upper,
            "gap_lower": self.gap_lower,
            "k": self.k,
            "lemma1_upper": self.lemma1_upper,
            "thm2_upper": self.thm2_upper,
        })
    }
}

pub fn tree_bounds(k: u32) -> Result<TreeBounds, TreeError> {
    if k < 1 {
        return Err(TreeError::BadK(1));
    }
    let dt_upper = h_formula(k).map_err(|_| TreeError::BadK(1))?;
    let lemma1_upper = if k >= 4 {
        Some((3u128.pow(k - 4) - 1) / 2 + 13 * 3u128.pow(k - 3))
    } else {
        None
    };
    let thm2_upper = if k >= 3 {
        Some((25 * 3u128.pow(k - 3) - 1) / 2)
    } else {
        None
    };
    let gap_lower = if k >= 3 { Some(3u128.pow(k - 3)) } else { None };
    Ok(TreeBounds {
        k,
        dt_upper,
        lemma1_upper,
        thm2_upper,
        gap_lower,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tree(k: usize, segs: &[([i64; 3], [i64; 3])]) -> CoveringTree {
        let segments = segs
            .iter()
            .map(|(a, b)| {
                Segment::new(
                    RationalPoint::from_ints(&a[..k]),
                    RationalPoint::from_ints(&b[..k]),
                )
                .unwrap()
            })
            .collect();
        CoveringTree::new(k, segments).unwrap()
    }

    #[test]
    fn single_segment_k1_is_covering_tree() {
        let t = CoveringTree::new(
            1,
            vec![Segment::new(
                RationalPoint::from_ints(&[0]),
                RationalPoint::from_ints(&[2]),
            )
            .unwrap()],
        )
        .unwrap();
        let rep = verify_tree(&t, None).unwrap();
        assert_eq!(rep.size, 1);
        assert!(rep.is_tree() && rep.covering());
    }

    #[test]
    fn two_disjoint_segments_not_connected() {
        let t = tree(2, &[([0, 0, 0], [2, 0, 0]), ([0, 2, 0], [2, 2, 0])]);
        let rep = verify_tree(&t, None).unwrap();
        assert!(!rep.connected);
        assert!(rep.acyclic);
    }

    #[test]
    fn t_junction_connects() {
        // vertical tooth endpoint interior to a horizontal spine
        let t = tree(2, &[([0, 0, 0], [2, 0, 0]), ([1, 0, 0], [1, 2, 0])]);
        let rep = verify_tree(&t, None).unwrap();
        assert!(rep.connected && rep.acyclic);
    }

    #[test]
    fn pure_crossing_does_not_connect() {
        // interiors cross at (1,1); neither endpoint lies on the other
        let t = tree(2, &[([0, 0, 0], [2, 2, 0]), ([0, 2, 0], [2, 0, 0])]);
        let rep = verify_tree(&t, None).unwrap();
        assert!(!rep.connected);
        assert!(rep.acyclic);
    }

    #[test]
    fn overlap_is_an_error() {
        let t = tree(1, &[([0, 0, 0], [2, 0, 0]), ([1, 0, 0], [3, 0, 0])]);
        assert!(matches!(verify_tree(&t, None), Err(TreeError::Overlap(0, 1))));
    }

    #[test]
    fn cycle_detected() {
        // square: four segments sharing corners pairwise
        let t = tree(
            2,
            &[
                ([0, 0, 0], [2, 0, 0]),
                ([2, 0, 0], [2, 2, 0]),
                ([2, 2, 0], [0, 2, 0]),
                ([0, 2, 0], [0, 0, 0]),
            ],
        );
        let rep = verify_tree(&t, None).unwrap();
        assert!(rep.connected);
        assert!(!rep.acyclic);
    }

    #[test]
    fn comb_is_covering_tree_for_k2() {
        // t(2) = h(2) = 4: spine plus three teeth
        let t = tree(
            2,
            &[
                ([0, 0, 0], [2, 0, 0]),
                ([0, 0, 0], [0, 2, 0]),
                ([1, 0, 0], [1, 2, 0]),
                ([2, 0, 0], [2, 2, 0]),
            ],
        );
        let rep = verify_tree(&t, None).unwrap();
        assert!(rep.is_tree() && rep.covering());
        assert_eq!(rep.size as u128, h_formula(2).unwrap());
    }

    #[test]
    fn box_extent_check() {
        let t = tree(2, &[([0, 0, 0], [2, 0, 0]), ([1, 0, 0], [1, 2, 0])]);
        let three = Rat::from(BigInt::from(3));
        let one = Rat::from(BigInt::from(1));
        let rep = verify_tree(&t, Some(&[three.clone(), three.clone()])).unwrap();
        assert_eq!(rep.box_ok, Some(true));
        let rep = verify_tree(&t, Some(&[one, three])).unwrap();
        assert_eq!(rep.box_ok, Some(false));
        let rep = verify_tree(&t, None).unwrap();
        assert_eq!(rep.box_ok, None);
    }

    #[test]
    fn tree_json_round_trip() {
        let t = tree(2, &[([0, 0, 0], [2, 0, 0]), ([1, 0, 0], [1, 2, 0])]);
        let s = t.to_json();
        let back = CoveringTree::from_json(&s).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.to_json(), s);
    }

    #[test]
    fn bounds_formulas() {
        let b3 = tree_bounds(3).unwrap();
        assert_eq!(b3.dt_upper, 13);
        assert_eq!(b3.thm2_upper, Some(12));
        assert_eq!(b3.gap_lower, Some(1));
        assert_eq!(b3.lemma1_upper, None);
        let b4 = tree_bounds(4).unwrap();
        assert_eq!(b4.dt_upper, 40);
        assert_eq!(b4.thm2_upper, Some(37));
        assert_eq!(b4.lemma1_upper, Some(39));
        assert_eq!(b4.gap_lower, Some(3));
        for k in 4..=8u32 {
            let b = tree_bounds(k).unwrap();
            let h = h_formula(k).unwrap();
            assert!(b.thm2_upper.unwrap() <= b.lemma1_upper.unwrap());
            assert!(b.lemma1_upper.unwrap() <= b.dt_upper);
            assert_eq!(h - b.thm2_upper.unwrap(), 3u128.pow(k - 3));
            assert_eq!(b.gap_lower, Some(3u128.pow(k - 3)));
        }
        let b2 = tree_bounds(2).unwrap();
        assert_eq!(b2.thm2_upper, None);
        assert_eq!(b2.gap_lower, None);
    }

    #[test]
    fn replicate_full_coverage_input() {
        // a covering tree with no missing node lifts with one connector
        let t = tree(
            2,
            &[
                ([0, 0, 0], [2, 0, 0]),
                ([0, 0, 0], [0, 2, 0]),
                ([1, 0, 0], [1, 2, 0]),
                ([2, 0, 0], [2, 2, 0]),
            ],
        );
        let lifted = replicate_tree(&t).unwrap();
        assert_eq!(lifted.k(), 3);
        assert!(lifted.size() <= 3 * t.size() + 3);
        let rep = verify_tree(&lifted, None).unwrap();
        assert!(rep.is_tree() && rep.covering());
    }
}

//! The clockwise construction: base trails for k=1,2 and the lift that turns
//! an optimal trail for {0,1,2}^(k-1) into one for {0,1,2}^k with
//! 3*h(k-1)+1 segments.
//!
//! The lift appends two fresh axes (x,y) and swirls through 3^(k-2) cycles of
//! three lines each; cycle j keeps the old coordinates pinned to a "chain
//! state" word over {A,B,C} so that consecutive cycles share a vertex and all
//! 3^(k-2) words occur exactly once. After the swirl (which covers every node
//! off the plane x=y) the input trail is pasted in once more, embedded on the
//! diagonal x=y, covering the remaining nodes.

use crate::geom::{Rat, RationalPoint, Segment};
use crate::grid::classify_node;
use crate::trail::{h_lower, verify_trail, Trail, TrailError};
use num::BigInt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ClockwiseError {
    #[error("base trails exist only for k=1 and k=2")]
    BadBaseK,
    #[error("lift input is not a complete covering trail")]
    InputIncomplete,
    #[error("lift input does not fit the side-3 box")]
    InputOutOfBox,
    #[error("lift input has {0} segments, expected h(k)={1}")]
    WrongSegmentCount(usize, u128),
    #[error("lift input has no endpoint at a class-0 vertex")]
    NoVertexEndpoint,
    #[error("lift input does not fit the [0,3] embedding window after normalization")]
    EmbeddingWindow,
    #[error("tail swap attachment vertex mismatch")]
    AttachmentMismatch,
    #[error("internal verification failed after construction: {0}")]
    PostVerify(String),
    #[error(transparent)]
    Trail(#[from] TrailError),
}

/// Decomposition of a lifted trail into its four phases.
#[derive(Debug, Clone)]
pub struct LiftPlan {
    pub forward: Vec<Segment>,
    pub backward: Vec<Segment>,
    pub link: Segment,
    pub final_copy: Vec<Segment>,
    /// 1-based index of the link segment in the output trail: 3^(k-1).
    pub link_index: usize,
    /// Grid nodes covered by the link and by no earlier segment.
    pub link_new_nodes: usize,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Chain {
    A,
    B,
    C,
}

/// Old-coordinate value of each chain at the four stops of a cycle.
fn chain_states(c: Chain) -> [i64; 4] {
    match c {
        Chain::A => [0, 0, 0, 0],
        Chain::B => [0, 3, 0, 3],
        Chain::C => [3, 0, 3, 0],
    }
}

/// Order in which the 3^m chain words are visited. Adjacent words agree at
/// the shared cycle boundary; every word appears exactly once.
fn schedule(m: usize) -> Vec<Vec<Chain>> {
    if m == 0 {
        return vec![vec![]];
    }
    let w = schedule(m - 1);
    let mut out: Vec<Vec<Chain>> = w
        .iter()
        .map(|t| {
            let mut v = vec![Chain::A];
            v.extend_from_slice(t);
            v
        })
        .collect();
    for (i, t) in w.iter().chain(w.iter()).enumerate() {
        let head = if i % 2 == 0 { Chain::B } else { Chain::C };
        let mut v = vec![head];
        v.extend_from_slice(t);
        out.push(v);
    }
    out
}

/// Vertex list (integer coordinates) of the swirl for dimension k.
fn cycle_vertices(k: usize, words: &[Vec<Chain>]) -> Vec<Vec<i64>> {
    let mut verts: Vec<Vec<i64>> = Vec::with_capacity(3 * words.len() + 1);
    for word in words {
        let state = |stop: usize| -> Vec<i64> {
            word.iter().map(|&c| chain_states(c)[stop]).collect()
        };
        let stop = |xy: [i64; 2], s: Vec<i64>| {
            let mut v = Vec::with_capacity(k);
            v.extend_from_slice(&xy);
            v.extend(s);
            v
        };
        let v0 = stop([0, 0], state(0));
        if let Some(last) = verts.last() {
            debug_assert_eq!(last, &v0);
        } else {
            verts.push(v0);
        }
        verts.push(stop([3, 0], state(1)));
        verts.push(stop([0, 3], state(2)));
        verts.push(stop([0, 0], state(3)));
    }
    verts
}

/// Diagonal embedding used for the pasted copy: duplicate the first
/// coordinate, so the image covers exactly the nodes with x1 = x2.
fn embed(v: &RationalPoint) -> RationalPoint {
    let mut coords = Vec::with_capacity(v.dim() + 1);
    coords.push(v.coords()[0].clone());
    coords.push(v.coords()[0].clone());
    coords.extend_from_slice(&v.coords()[1..]);
    RationalPoint::new(coords).expect("non-empty")
}

pub fn base_trail(k: usize) -> Result<Trail, ClockwiseError> {
    match k {
        1 => Ok(Trail::from_int_vertices(1, &[&[0], &[2]])?),
        2 => Ok(Trail::from_int_vertices(
            2,
            &[&[0, 0], &[0, 3], &[3, 0], &[0, 0], &[2, 2]],
        )?),
        _ => Err(ClockwiseError::BadBaseK),
    }
}

/// Reorient `c` (reversal and/or per-axis flips) so a class-0 endpoint sits
/// at the origin, then check the trail fits the [0,3] window the swirl
/// occupies.
fn normalize_for_lift(c: &Trail) -> Result<Trail, ClockwiseError> {
    let k = c.k();
    let endpoint_class = |p: &RationalPoint| {
        p.as_grid_node().and_then(|n| classify_node(&n, k).ok())
    };
    let mut orientations = Vec::new();
    if endpoint_class(c.vertices().first().unwrap()) == Some(0) {
        orientations.push(c.clone());
    }
    if endpoint_class(c.vertices().last().unwrap()) == Some(0) {
        orientations.push(c.reversed());
    }
    if orientations.is_empty() {
        return Err(ClockwiseError::NoVertexEndpoint);
    }
    let zero = Rat::from(BigInt::from(0));
    let two = Rat::from(BigInt::from(2));
    let three = Rat::from(BigInt::from(3));
    for oriented in orientations {
        let start = oriented.vertices()[0].as_grid_node().unwrap();
        let flipped: Vec<RationalPoint> = oriented
            .vertices()
            .iter()
            .map(|v| {
                let coords = v
                    .coords()
                    .iter()
                    .enumerate()
                    .map(|(i, x)| if start[i] == 2 { &two - x } else { x.clone() })
                    .collect();
                RationalPoint::new(coords).unwrap()
            })
            .collect();
        let fits = flipped
            .iter()
            .all(|v| v.coords().iter().all(|x| x >= &zero && x <= &three));
        if fits {
            return Ok(Trail::new(k, flipped)?);
        }
    }
    Err(ClockwiseError::EmbeddingWindow)
}

fn check_lift_input(c: &Trail) -> Result<(), ClockwiseError> {
    let report = verify_trail(c, None)?;
    if !report.complete {
        return Err(ClockwiseError::InputIncomplete);
    }
    if !report.box_ok {
        return Err(ClockwiseError::InputOutOfBox);
    }
    let want = h_lower(c.k() as u32)?;
    if c.segment_count() as u128 != want {
        return Err(ClockwiseError::WrongSegmentCount(c.segment_count(), want));
    }
    Ok(())
}

fn lift_vertices(c_norm: &Trail) -> Vec<RationalPoint> {
    let k = c_norm.k() + 1;
    let words = schedule(k - 2);
    let mut verts: Vec<RationalPoint> = cycle_vertices(k, &words)
        .iter()
        .map(|v| RationalPoint::from_ints(v))
        .collect();
    // The swirl ends at the origin, which is the normalized input's first
    // vertex under the diagonal embedding; paste the rest of the copy.
    debug_assert_eq!(verts.last().unwrap(), &RationalPoint::from_ints(&vec![0; k]));
    for v in &c_norm.vertices()[1..] {
        verts.push(embed(v));
    }
    verts
}

fn plan_from(t: &Trail, h_in: usize) -> LiftPlan {
    let segs = t.segments();
    let link_index = 2 * h_in + 1;
    let mut seen = std::collections::BTreeSet::new();
    for s in &segs[..link_index - 1] {
        seen.extend(crate::geom::segment_grid_coverage(s, t.k()).unwrap());
    }
    let link = segs[link_index - 1].clone();
    let link_new_nodes = crate::geom::segment_grid_coverage(&link, t.k())
        .unwrap()
        .iter()
        .filter(|n| !seen.contains(*n))
        .count();
    LiftPlan {
        forward: segs[..h_in].to_vec(),
        backward: segs[h_in..2 * h_in].to_vec(),
        link,
        final_copy: segs[link_index..].to_vec(),
        link_index,
        link_new_nodes,
    }
}

pub fn lift_with_plan(c: &Trail) -> Result<(Trail, LiftPlan), ClockwiseError> {
    check_lift_input(c)?;
    let c_norm = normalize_for_lift(c)?;
    let k = c.k() + 1;
    let t = Trail::new(k, lift_vertices(&c_norm))?;
    let report = verify_trail(&t, None)?;
    let want = h_lower(k as u32)? as usize;
    if !report.complete || !report.box_ok || t.segment_count() != want {
        return Err(ClockwiseError::PostVerify(format!(
            "complete={} box_ok={} segments={} want={}",
            report.complete,
            report.box_ok,
            t.segment_count(),
            want
        )));
    }
    let plan = plan_from(&t, c.segment_count());
    if plan.link_new_nodes == 0 {
        return Err(ClockwiseError::PostVerify(
            "link segment covers no new node".to_string(),
        ));
    }
    Ok((t, plan))
}

pub fn lift(c: &Trail) -> Result<Trail, ClockwiseError> {
    Ok(lift_with_plan(c)?.0)
}

/// Optimal covering trail for {0,1,2}^k: base trail for k <= 2, iterated
/// lift above. Deterministic; two calls yield identical trails.
pub fn generate(k: usize) -> Result<Trail, ClockwiseError> {
    if k == 0 {
        return Err(ClockwiseError::BadBaseK);
    }
    let mut t = base_trail(k.min(2))?;
    for _ in 2..k {
        t = lift(&t)?;
    }
    Ok(t)
}

/// Replace the pasted final copy of a lifted trail with another optimal
/// trail attached at the same vertex.
pub fn alternate_tail(t: &Trail, c_alt: &Trail) -> Result<Trail, ClockwiseError> {
    let k = t.k();
    if k < 2 || c_alt.k() != k - 1 {
        return Err(ClockwiseError::AttachmentMismatch);
    }
    check_lift_input(c_alt)?;
    let link_end = 3usize.pow(k as u32 - 1); // vertex index where the copy starts
    if t.vertices().len() <= link_end {
        return Err(ClockwiseError::AttachmentMismatch);
    }
    if embed(&c_alt.vertices()[0]) != t.vertices()[link_end] {
        return Err(ClockwiseError::AttachmentMismatch);
    }
    let zero = Rat::from(BigInt::from(0));
    let three = Rat::from(BigInt::from(3));
    for v in c_alt.vertices() {
        for x in v.coords() {
            if x < &zero || x > &three {
                return Err(ClockwiseError::EmbeddingWindow);
            }
        }
    }
    let mut verts = t.vertices()[..=link_end].to_vec();
    for v in &c_alt.vertices()[1..] {
        verts.push(embed(v));
    }
    let out = Trail::new(k, verts)?;
    let report = verify_trail(&out, None)?;
    if !report.complete || !report.box_ok || out.segment_count() != t.segment_count() {
        return Err(ClockwiseError::PostVerify(format!(
            "complete={} box_ok={} segments={}",
            report.complete,
            report.box_ok,
            out.segment_count()
        )));
    }
    Ok(out)
}

/// Optimal trails for k=3 starting at an edge node (class 1) or a
/// face-center (class 2); the generated trail itself starts at a vertex.
/// Obtained from the same swirl machinery by reordering the chain schedule
/// and trimming the first stop.
pub fn seed_trail_3(class: usize) -> Result<Trail, ClockwiseError> {
    let (words, start) = match class {
        1 => (
            vec![vec![Chain::A], vec![Chain::B], vec![Chain::C]],
            [1i64, 0, 0],
        ),
        2 => (
            vec![vec![Chain::B], vec![Chain::C], vec![Chain::A]],
            [1i64, 0, 1],
        ),
        _ => return Err(ClockwiseError::BadBaseK),
    };
    let mut verts = cycle_vertices(3, &words);
    verts[0] = start.to_vec();
    let mut pts: Vec<RationalPoint> = verts.iter().map(|v| RationalPoint::from_ints(v)).collect();
    let tail = base_trail(2)?;
    for v in &tail.vertices()[1..] {
        pts.push(embed(v));
    }
    let t = Trail::new(3, pts)?;
    let report = verify_trail(&t, None)?;
    if !report.complete || !report.box_ok || t.segment_count() != 13 {
        return Err(ClockwiseError::PostVerify("seed trail invalid".to_string()));
    }
    Ok(t)
}

//! Exhaustive search for minimum-link covering trails over bounded rational
//! lattices. Turning points live on {-m, -m+1/D, ..., n-1+m}^k (scaled to
//! integers by D internally); verdicts are always relative to that lattice
//! class and say so.

use crate::clockwise::{generate, seed_trail_3};
use crate::geom::{Rat, RationalPoint};
use crate::grid::{all_nodes, classify_node, enumerate_isometries, Isometry};
use crate::trail::{h_lower, verify_trail, Trail};
use num::BigInt;
use std::collections::BTreeMap;
use std::sync::atomic::{AtomicBool, Ordering};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("unsupported grid dims {0:?} (1..=3 axes of size 1..=3)")]
    BadDims(Vec<u8>),
    #[error("invalid config: {0}")]
    BadConfig(String),
    #[error("lattice of {points} points exceeds the limit {limit}")]
    Resource { points: u64, limit: u64 },
    #[error("start node {0:?} is not a grid node")]
    BadStart(Vec<u8>),
    #[error("exhaustive start map supports k <= 2 only; use constructive mode for k = 3")]
    TooLargeForExhaustion,
}

#[derive(Debug, Clone)]
pub struct SearchConfig {
    /// Grid dimensions per axis, e.g. [3,3]; grid nodes are 0..dims[i]-1.
    pub dims: Vec<u8>,
    /// Extra integer layers beyond the grid per axis.
    pub margin: u8,
    /// Denominator for turning points.
    pub denom: u8,
    /// Maximum number of segments.
    pub budget: usize,
    /// Optional fixed first vertex (a grid node).
    pub start: Option<Vec<u8>>,
    /// Per-axis extent cap; `None` means 3 per axis.
    pub extent_cap: Option<Vec<Rat>>,
    pub workers: usize,
    /// Lattice-size resource guard.
    pub max_points: u64,
}

impl SearchConfig {
    pub fn new(dims: Vec<u8>, budget: usize) -> Self {
        SearchConfig {
            dims,
            margin: 1,
            denom: 1,
            budget,
            start: None,
            extent_cap: None,
            workers: 1,
            max_points: 1_000_000,
        }
    }

    pub fn lattice_class(&self) -> (u8, u8) {
        (self.margin, self.denom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Found(Trail),
    /// No trail exists over this lattice class (m, D).
    NoneExhaustive,
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub verdict: Verdict,
    pub lattice_class: (u8, u8),
}

struct Space {
    k: usize,
    dims: Vec<u8>,
    d: i64,
    points: Vec<Vec<i64>>, // scaled integer lattice points
    node_count: usize,
    /// coverage bitmask per ordered point pair (a*n+b)
    cover: Vec<u64>,
    cap_scaled: Vec<i64>,
    max_line_cover: u32,
}

fn build_space(cfg: &SearchConfig) -> Result<Space, OracleError> {
    let k = cfg.dims.len();
    if k == 0 || k > 3 || cfg.dims.iter().any(|&n| n == 0 || n > 3) {
        return Err(OracleError::BadDims(cfg.dims.clone()));
    }
    if cfg.denom == 0 || cfg.budget == 0 || cfg.workers == 0 {
        return Err(OracleError::BadConfig(
            "denom, budget and workers must be >= 1".to_string(),
        ));
    }
    let d = cfg.denom as i64;
    let m = cfg.margin as i64;
    let mut axes: Vec<Vec<i64>> = Vec::new();
    let mut total: u64 = 1;
    for &n in &cfg.dims {
        let lo = -m * d;
        let hi = (n as i64 - 1 + m) * d;
        axes.push((lo..=hi).collect());
        total = total.saturating_mul((hi - lo + 1) as u64);
    }
    if total > cfg.max_points {
        return Err(OracleError::Resource {
            points: total,
            limit: cfg.max_points,
        });
    }
    let mut points = vec![vec![]];
    for ax in &axes {
        let mut next = Vec::with_capacity(points.len() * ax.len());
        for p in &points {
            for &v in ax {
                let mut q = p.clone();
                q.push(v);
                next.push(q);
            }
        }
        points = next;
    }
    // grid nodes, scaled
    let mut nodes = vec![vec![]];
    for &n in &cfg.dims {
        let mut next = Vec::new();
        for p in &nodes {
            for g in 0..n as i64 {
                let mut q = p.clone();
                q.push(g * d);
                next.push(q);
            }
        }
        nodes = next;
    }
    let node_count = nodes.len();
    if node_count > 27 {
        return Err(OracleError::BadDims(cfg.dims.clone()));
    }
    let np = points.len();
    let mut cover = vec![0u64; np * np];
    let on = |node: &[i64], a: &[i64], b: &[i64]| -> bool {
        // collinearity via pairwise cross products, then per-axis interval
        for i in 0..k {
            for j in (i + 1)..k {
                let wi = node[i] - a[i];
                let wj = node[j] - a[j];
                let di = b[i] - a[i];
                let dj = b[j] - a[j];
                if (wi as i128) * (dj as i128) != (wj as i128) * (di as i128) {
                    return false;
                }
            }
        }
        (0..k).all(|i| node[i] >= a[i].min(b[i]) && node[i] <= a[i].max(b[i]))
    };
    for (ai, a) in points.iter().enumerate() {
        for (bi, b) in points.iter().enumerate() {
            if ai == bi {
                continue;
            }
            let mut mask = 0u64;
            for (ni, node) in nodes.iter().enumerate() {
                if on(node, a, b) {
                    mask |= 1 << ni;
                }
            }
            cover[ai * np + bi] = mask;
        }
    }
    let caps = match &cfg.extent_cap {
        Some(v) => {
            if v.len() != k {
                return Err(OracleError::BadConfig(format!(
                    "extent cap has {} axes, grid has {k}",
                    v.len()
                )));
            }
            v.clone()
        }
        None => vec![Rat::from(BigInt::from(3)); k],
    };
    // scaled integer extents: hi-lo <= floor(cap*D)
    let cap_scaled = caps
        .iter()
        .map(|c| (c * Rat::from(BigInt::from(d))).floor().to_integer())
        .map(|b| i64::try_from(b).unwrap_or(i64::MAX))
        .collect();
    let max_line_cover = *cfg.dims.iter().max().unwrap() as u32;
    Ok(Space {
        k,
        dims: cfg.dims.clone(),
        d,
        points,
        node_count,
        cover,
        cap_scaled,
        max_line_cover,
    })
}

impl Space {
    fn point_index(&self, p: &[i64]) -> Option<usize> {
        self.points.iter().position(|q| q == p)
    }

    fn full_mask(&self) -> u64 {
        (1u64 << self.node_count) - 1
    }

    fn to_trail(&self, vertices: &[usize]) -> Trail {
        let pts = vertices
            .iter()
            .map(|&i| {
                RationalPoint::new(
                    self.points[i]
                        .iter()
                        .map(|&c| Rat::new(BigInt::from(c), BigInt::from(self.d)))
                        .collect(),
                )
                .unwrap()
            })
            .collect();
        Trail::new(self.k, pts).expect("lattice trail well-formed")
    }
}

enum Mode<'a> {
    FindFirst,
    Count(&'a mut u64),
}

#[allow(clippy::too_many_arguments)]
fn dfs(
    sp: &Space,
    verts: &mut Vec<usize>,
    covered: u64,
    lo: &mut [i64; 3],
    hi: &mut [i64; 3],
    budget: usize,
    mode: &mut Mode,
    found: &mut Option<Vec<usize>>,
    stop: &AtomicBool,
) {
    let depth = verts.len() - 1;
    if let Mode::Count(_) = mode {
        // count trails with exactly `budget` segments
        if depth == budget {
            if covered == sp.full_mask() {
                if let Mode::Count(c) = mode {
                    **c += 1;
                }
            }
            return;
        }
    } else {
        if covered == sp.full_mask() {
            *found = Some(verts.clone());
            return;
        }
        if depth == budget {
            return;
        }
    }
    if stop.load(Ordering::Relaxed) {
        return;
    }
    let uncovered = sp.node_count as u32 - covered.count_ones();
    if uncovered > sp.max_line_cover * (budget - depth) as u32 {
        return;
    }
    let v = *verts.last().unwrap();
    let np = sp.points.len();
    for w in 0..np {
        if w == v {
            continue;
        }
        let mut ok = true;
        let mut save_lo = [0i64; 3];
        let mut save_hi = [0i64; 3];
        for i in 0..sp.k {
            save_lo[i] = lo[i];
            save_hi[i] = hi[i];
            let c = sp.points[w][i];
            let nlo = lo[i].min(c);
            let nhi = hi[i].max(c);
            if nhi - nlo > sp.cap_scaled[i] {
                ok = false;
            }
            lo[i] = nlo;
            hi[i] = nhi;
        }
        if ok {
            verts.push(w);
            dfs(
                sp,
                verts,
                covered | sp.cover[v * np + w],
                lo,
                hi,
                budget,
                mode,
                found,
                stop,
            );
            verts.pop();
            if found.is_some() {
                for i in 0..sp.k {
                    lo[i] = save_lo[i];
                    hi[i] = save_hi[i];
                }
                return;
            }
        }
        for i in 0..sp.k {
            lo[i] = save_lo[i];
            hi[i] = save_hi[i];
        }
    }
}

/// Isometries of the scaled lattice (only available on uniform grids).
fn lattice_isometries(sp: &Space, cfg: &SearchConfig) -> Vec<Isometry> {
    if sp.dims.windows(2).any(|w| w[0] != w[1]) {
        return vec![Isometry::identity(sp.k)];
    }
    let _ = cfg;
    enumerate_isometries(sp.k)
}

fn apply_lattice_iso(sp: &Space, iso: &Isometry, p: &[i64]) -> Vec<i64> {
    // flips map x -> (n-1)*D - x on the scaled lattice
    let span = (sp.dims[0] as i64 - 1) * sp.d;
    let mut out = vec![0i64; sp.k];
    for i in 0..sp.k {
        let c = p[iso.perm()[i]];
        out[i] = if iso.flip()[i] { span - c } else { c };
    }
    out
}

/// First moves (start vertex, second vertex), optionally symmetry-reduced.
fn first_moves(sp: &Space, cfg: &SearchConfig, reduce: bool) -> Result<Vec<(usize, usize)>, OracleError> {
    let np = sp.points.len();
    let starts: Vec<usize> = match &cfg.start {
        Some(node) => {
            if node.len() != sp.k || node.iter().zip(&sp.dims).any(|(&c, &n)| c >= n) {
                return Err(OracleError::BadStart(node.clone()));
            }
            let scaled: Vec<i64> = node.iter().map(|&c| c as i64 * sp.d).collect();
            vec![sp.point_index(&scaled).expect("grid node is a lattice point")]
        }
        None => (0..np).collect(),
    };
    let mut moves = Vec::new();
    for &a in &starts {
        for b in 0..np {
            if b != a {
                moves.push((a, b));
            }
        }
    }
    if reduce && cfg.start.is_none() {
        let isos = lattice_isometries(sp, cfg);
        if isos.len() > 1 {
            moves.retain(|&(a, b)| {
                let pa = &sp.points[a];
                let pb = &sp.points[b];
                for iso in &isos {
                    let qa = apply_lattice_iso(sp, iso, pa);
                    let qb = apply_lattice_iso(sp, iso, pb);
                    if (&qa, &qb) < (pa, pb) {
                        return false;
                    }
                }
                true
            });
        }
    }
    Ok(moves)
}

fn run_moves<F, R>(cfg: &SearchConfig, moves: &[(usize, usize)], worker: F) -> Vec<(usize, R)>
where
    F: Fn(usize, (usize, usize)) -> R + Sync,
    R: Send,
{
    let workers = cfg.workers.max(1);
    let mut indexed: Vec<(usize, R)> = Vec::new();
    if workers == 1 {
        for (i, &mv) in moves.iter().enumerate() {
            indexed.push((i, worker(i, mv)));
        }
    } else {
        let results: Vec<std::sync::Mutex<Vec<(usize, R)>>> =
            (0..workers).map(|_| std::sync::Mutex::new(Vec::new())).collect();
        std::thread::scope(|scope| {
            for w in 0..workers {
                let worker = &worker;
                let results = &results;
                scope.spawn(move || {
                    let mut local = Vec::new();
                    let mut i = w;
                    while i < moves.len() {
                        local.push((i, worker(i, moves[i])));
                        i += workers;
                    }
                    *results[w].lock().unwrap() = local;
                });
            }
        });
        for r in results {
            indexed.extend(r.into_inner().unwrap());
        }
        indexed.sort_by_key(|(i, _)| *i);
    }
    indexed
}

/// Depth-first exhaustive search for a complete trail within the budget.
pub fn min_trail_search(cfg: &SearchConfig) -> Result<SearchOutcome, OracleError> {
    let sp = build_space(cfg)?;
    let moves = first_moves(&sp, cfg, true)?;
    let stop = AtomicBool::new(false);
    let results = run_moves(cfg, &moves, |_, (a, b)| {
        if stop.load(Ordering::Relaxed) {
            return None;
        }
        let mut lo = [0i64; 3];
        let mut hi = [0i64; 3];
        for i in 0..sp.k {
            lo[i] = sp.points[a][i].min(sp.points[b][i]);
            hi[i] = sp.points[a][i].max(sp.points[b][i]);
        }
        for i in 0..sp.k {
            if hi[i] - lo[i] > sp.cap_scaled[i] {
                return None;
            }
        }
        let np = sp.points.len();
        let mut verts = vec![a, b];
        let mut found = None;
        let mut mode = Mode::FindFirst;
        dfs(
            &sp,
            &mut verts,
            sp.cover[a * np + b],
            &mut lo,
            &mut hi,
            cfg.budget,
            &mut mode,
            &mut found,
            &stop,
        );
        if found.is_some() {
            stop.store(true, Ordering::Relaxed);
        }
        found
    });
    for (_, r) in results {
        if let Some(verts) = r {
            let t = sp.to_trail(&verts);
            debug_assert!(verify_trail(&t, None).map(|r| r.complete).unwrap_or(false));
            return Ok(SearchOutcome {
                verdict: Verdict::Found(t),
                lattice_class: cfg.lattice_class(),
            });
        }
    }
    Ok(SearchOutcome {
        verdict: Verdict::NoneExhaustive,
        lattice_class: cfg.lattice_class(),
    })
}

/// Number of distinct complete trails with exactly `budget` segments (raw
/// count, no symmetry reduction).
pub fn count_solutions(cfg: &SearchConfig) -> Result<u64, OracleError> {
    let sp = build_space(cfg)?;
    let moves = first_moves(&sp, cfg, false)?;
    let stop = AtomicBool::new(false);
    let results = run_moves(cfg, &moves, |_, (a, b)| {
        let mut lo = [0i64; 3];
        let mut hi = [0i64; 3];
        for i in 0..sp.k {
            lo[i] = sp.points[a][i].min(sp.points[b][i]);
            hi[i] = sp.points[a][i].max(sp.points[b][i]);
        }
        for i in 0..sp.k {
            if hi[i] - lo[i] > sp.cap_scaled[i] {
                return 0u64;
            }
        }
        let np = sp.points.len();
        let mut verts = vec![a, b];
        let mut count = 0u64;
        let mut found = None;
        let mut mode = Mode::Count(&mut count);
        dfs(
            &sp,
            &mut verts,
            sp.cover[a * np + b],
            &mut lo,
            &mut hi,
            cfg.budget,
            &mut mode,
            &mut found,
            &stop,
        );
        count
    });
    Ok(results.into_iter().map(|(_, c)| c).sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StartStatus {
    Feasible,
    InfeasibleOverLattice,
    Unknown,
}

/// Feasibility of covering the grid with h(k) segments starting at each
/// node. Exhaustive for k <= 2; constructive (isometry transport of known
/// trails) for k = 3.
pub fn feasible_starts(k: usize, budget: Option<usize>) -> Result<BTreeMap<Vec<u8>, StartStatus>, OracleError> {
    let mut map = BTreeMap::new();
    match k {
        1 | 2 => {
            let budget = budget.unwrap_or(h_lower(k as u32).unwrap() as usize);
            for node in all_nodes(k) {
                let mut cfg = SearchConfig::new(vec![3; k], budget);
                cfg.start = Some(node.clone());
                let out = min_trail_search(&cfg)?;
                let status = match out.verdict {
                    Verdict::Found(_) => StartStatus::Feasible,
                    Verdict::NoneExhaustive => StartStatus::InfeasibleOverLattice,
                };
                map.insert(node, status);
            }
        }
        3 => {
            // class -> a known optimal trail starting in that class
            let seeds: Vec<Trail> = vec![
                generate(3).map_err(|e| OracleError::BadConfig(e.to_string()))?,
                seed_trail_3(1).map_err(|e| OracleError::BadConfig(e.to_string()))?,
                seed_trail_3(2).map_err(|e| OracleError::BadConfig(e.to_string()))?,
            ];
            let isos = enumerate_isometries(3);
            for node in all_nodes(3) {
                map.insert(node, StartStatus::Unknown);
            }
            for seed in &seeds {
                let start = seed.vertices()[0].as_grid_node().unwrap();
                for iso in &isos {
                    let image = iso.apply_node(&start);
                    map.insert(image, StartStatus::Feasible);
                }
            }
            // transport is within-class; double-check every non-center node
            // ended up feasible
            for (node, status) in &map {
                let c = classify_node(node, 3).unwrap();
                debug_assert!(
                    (c == 3) == (*status == StartStatus::Unknown),
                    "unexpected status for {node:?}"
                );
            }
        }
        _ => return Err(OracleError::TooLargeForExhaustion),
    }
    Ok(map)
}

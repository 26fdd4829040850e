//! Exact rational points, segments, and the incidence predicates everything
//! else is built on. No floating point anywhere.

use num::{BigInt, BigRational, One, Signed, Zero};
use std::collections::BTreeSet;
use std::fmt;
use thiserror::Error;

pub type Rat = BigRational;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GeomError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("zero-length segment")]
    ZeroLength,
    #[error("empty point list")]
    EmptyInput,
    #[error("point must have dimension >= 1")]
    ZeroDimension,
    #[error("invalid rational literal {0:?}")]
    BadRational(String),
}

/// k-dimensional point with exact rational coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalPoint {
    coords: Vec<Rat>,
}

impl RationalPoint {
    pub fn new(coords: Vec<Rat>) -> Result<Self, GeomError> {
        if coords.is_empty() {
            return Err(GeomError::ZeroDimension);
        }
        Ok(RationalPoint { coords })
    }

    pub fn from_ints(coords: &[i64]) -> Self {
        RationalPoint {
            coords: coords.iter().map(|&c| Rat::from(BigInt::from(c))).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Rat] {
        &self.coords
    }

    /// The grid node with the same coordinates, if all of them are integers
    /// in {0,1,2}.
    pub fn as_grid_node(&self) -> Option<Vec<u8>> {
        let mut node = Vec::with_capacity(self.coords.len());
        for c in &self.coords {
            if !c.is_integer() || c.is_negative() || *c > Rat::from(BigInt::from(2)) {
                return None;
            }
            node.push(c.to_integer().try_into().ok()?);
        }
        Some(node)
    }
}

impl fmt::Display for RationalPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", rat_to_string(c))?;
        }
        write!(f, ")")
    }
}

/// Closed segment between two distinct points of equal dimension.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Segment {
    a: RationalPoint,
    b: RationalPoint,
}

impl Segment {
    pub fn new(a: RationalPoint, b: RationalPoint) -> Result<Self, GeomError> {
        if a.dim() != b.dim() {
            return Err(GeomError::DimensionMismatch(a.dim(), b.dim()));
        }
        if a == b {
            return Err(GeomError::ZeroLength);
        }
        Ok(Segment { a, b })
    }

    pub fn a(&self) -> &RationalPoint {
        &self.a
    }

    pub fn b(&self) -> &RationalPoint {
        &self.b
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    pub fn reversed(&self) -> Segment {
        Segment {
            a: self.b.clone(),
            b: self.a.clone(),
        }
    }
}

/// Canonical text form of a rational: integers bare, otherwise "p/q" with
/// q > 0 and gcd(p,q) = 1 (BigRational keeps fractions reduced).
pub fn rat_to_string(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rat_from_string(s: &str) -> Result<Rat, GeomError> {
    let bad = || GeomError::BadRational(s.to_string());
    match s.split_once('/') {
        None => {
            let n: BigInt = s.parse().map_err(|_| bad())?;
            Ok(Rat::from(n))
        }
        Some((p, q)) => {
            let p: BigInt = p.parse().map_err(|_| bad())?;
            let q: BigInt = q.parse().map_err(|_| bad())?;
            if q <= BigInt::zero() {
                return Err(bad());
            }
            let r = Rat::new(p, q.clone());
            // Require the canonical reduced form on input, so that documents
            // round-trip byte-identically.
            if r.denom() != &q {
                return Err(bad());
            }
            Ok(r)
        }
    }
}

/// Exact test of whether `p` lies on the closed segment `s`.
pub fn point_on_segment(p: &RationalPoint, s: &Segment) -> Result<bool, GeomError> {
    let k = s.dim();
    if p.dim() != k {
        return Err(GeomError::DimensionMismatch(p.dim(), k));
    }
    let a = s.a.coords();
    let b = s.b.coords();
    let pc = p.coords();
    // Collinearity: (p-a) x (b-a) = 0 componentwise over all axis pairs.
    let w: Vec<Rat> = (0..k).map(|i| &pc[i] - &a[i]).collect();
    let d: Vec<Rat> = (0..k).map(|i| &b[i] - &a[i]).collect();
    for i in 0..k {
        for j in (i + 1)..k {
            if &w[i] * &d[j] != &w[j] * &d[i] {
                return Ok(false);
            }
        }
    }
    // Betweenness: each coordinate within the segment's axis interval.
    for i in 0..k {
        let (lo, hi) = if a[i] <= b[i] {
            (&a[i], &b[i])
        } else {
            (&b[i], &a[i])
        };
        if &pc[i] < lo || &pc[i] > hi {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The nodes of {0,1,2}^k lying on `s`. A line meets at most 3 of them.
pub fn segment_grid_coverage(s: &Segment, k: usize) -> Result<BTreeSet<Vec<u8>>, GeomError> {
    if s.dim() != k {
        return Err(GeomError::DimensionMismatch(s.dim(), k));
    }
    let a = s.a.coords();
    let b = s.b.coords();
    let d: Vec<Rat> = (0..k).map(|i| &b[i] - &a[i]).collect();
    // Candidate parameters: endpoints plus every t at which some varying
    // coordinate passes an integer level 0, 1, 2.
    let mut cands: BTreeSet<Rat> = BTreeSet::new();
    cands.insert(Rat::zero());
    cands.insert(Rat::one());
    for i in 0..k {
        if d[i].is_zero() {
            continue;
        }
        for v in 0..3i64 {
            let t = (Rat::from(BigInt::from(v)) - &a[i]) / &d[i];
            if t >= Rat::zero() && t <= Rat::one() {
                cands.insert(t);
            }
        }
    }
    let mut nodes = BTreeSet::new();
    'outer: for t in &cands {
        let mut node = Vec::with_capacity(k);
        for i in 0..k {
            let c = &a[i] + t * &d[i];
            if !c.is_integer() || c.is_negative() || c > Rat::from(BigInt::from(2)) {
                continue 'outer;
            }
            node.push(u8::try_from(c.to_integer()).expect("coordinate in 0..=2"));
        }
        nodes.insert(node);
    }
    Ok(nodes)
}

/// Per-axis extents (max - min) of a non-empty point set.
pub fn aabb_extent(points: &[RationalPoint]) -> Result<Vec<Rat>, GeomError> {
    let first = points.first().ok_or(GeomError::EmptyInput)?;
    let k = first.dim();
    let mut lo = first.coords().to_vec();
    let mut hi = lo.clone();
    for p in &points[1..] {
        if p.dim() != k {
            return Err(GeomError::DimensionMismatch(p.dim(), k));
        }
        for i in 0..k {
            let c = &p.coords()[i];
            if c < &lo[i] {
                lo[i] = c.clone();
            }
            if c > &hi[i] {
                hi[i] = c.clone();
            }
        }
    }
    Ok((0..k).map(|i| &hi[i] - &lo[i]).collect())
}

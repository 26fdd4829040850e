//! The grid G_k = {0,1,2}^k: node taxonomy and the isometry group of signed
//! axis permutations (order 2^k * k!).

use crate::geom::{Rat, RationalPoint};
use num::BigInt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GridError {
    #[error("coordinate {0} outside {{0,1,2}}")]
    BadCoordinate(i64),
    #[error("class {c} out of range for k={k}")]
    ClassOutOfRange { k: u32, c: u32 },
    #[error("node has {0} coordinates, expected {1}")]
    WrongDimension(usize, usize),
}

/// Number of coordinates equal to 1. Class 0 nodes are the vertices of the
/// grid's bounding cube; class k is the unique center.
pub fn classify_node(p: &[u8], k: usize) -> Result<usize, GridError> {
    if p.len() != k {
        return Err(GridError::WrongDimension(p.len(), k));
    }
    for &c in p {
        if c > 2 {
            return Err(GridError::BadCoordinate(c as i64));
        }
    }
    Ok(p.iter().filter(|&&c| c == 1).count())
}

/// Human-readable class name; the k=3 taxonomy is kept, higher classes get
/// generated names.
pub fn class_name(k: usize, c: usize) -> String {
    match (k, c) {
        (_, 0) => "vertex".to_string(),
        (k, c) if c == k => "center".to_string(),
        (3, 1) => "edge".to_string(),
        (3, 2) => "face-center".to_string(),
        (2, 1) => "edge".to_string(),
        _ => format!("class-{c} of {k}"),
    }
}

/// binomial(k,c) * 2^(k-c): how many nodes have exactly c coordinates = 1.
pub fn class_count(k: u32, c: u32) -> Result<u128, GridError> {
    if c > k {
        return Err(GridError::ClassOutOfRange { k, c });
    }
    let mut binom: u128 = 1;
    for i in 0..c as u128 {
        binom = binom * (k as u128 - i) / (i + 1);
    }
    Ok(binom << (k - c))
}

/// All 3^k grid nodes in lexicographic order.
pub fn all_nodes(k: usize) -> Vec<Vec<u8>> {
    let mut out = vec![vec![]];
    for _ in 0..k {
        let mut next = Vec::with_capacity(out.len() * 3);
        for n in &out {
            for c in 0..3u8 {
                let mut m = n.clone();
                m.push(c);
                next.push(m);
            }
        }
        out = next;
    }
    out
}

/// A signed axis permutation fixing {0,1,2}^k: first permute axes, then apply
/// x -> 2-x on flipped axes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Isometry {
    perm: Vec<usize>,
    flip: Vec<bool>,
}

impl Isometry {
    pub fn new(perm: Vec<usize>, flip: Vec<bool>) -> Option<Self> {
        let k = perm.len();
        if flip.len() != k {
            return None;
        }
        let mut seen = vec![false; k];
        for &p in &perm {
            if p >= k || seen[p] {
                return None;
            }
            seen[p] = true;
        }
        Some(Isometry { perm, flip })
    }

    pub fn identity(k: usize) -> Self {
        Isometry {
            perm: (0..k).collect(),
            flip: vec![false; k],
        }
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn flip(&self) -> &[bool] {
        &self.flip
    }

    /// Output coordinate i reads input coordinate perm[i], then flips.
    pub fn apply_point(&self, p: &RationalPoint) -> RationalPoint {
        let two = Rat::from(BigInt::from(2));
        let coords: Vec<Rat> = (0..self.dim())
            .map(|i| {
                let c = p.coords()[self.perm[i]].clone();
                if self.flip[i] {
                    &two - &c
                } else {
                    c
                }
            })
            .collect();
        RationalPoint::new(coords).expect("dimension preserved")
    }

    pub fn apply_node(&self, n: &[u8]) -> Vec<u8> {
        (0..self.dim())
            .map(|i| {
                let c = n[self.perm[i]];
                if self.flip[i] {
                    2 - c
                } else {
                    c
                }
            })
            .collect()
    }

    /// self ∘ other (apply `other` first).
    pub fn compose(&self, other: &Isometry) -> Isometry {
        let k = self.dim();
        let mut perm = vec![0; k];
        let mut flip = vec![false; k];
        for i in 0..k {
            perm[i] = other.perm[self.perm[i]];
            flip[i] = self.flip[i] ^ other.flip[self.perm[i]];
        }
        Isometry { perm, flip }
    }

    pub fn inverse(&self) -> Isometry {
        let k = self.dim();
        let mut perm = vec![0; k];
        let mut flip = vec![false; k];
        for i in 0..k {
            perm[self.perm[i]] = i;
            flip[self.perm[i]] = self.flip[i];
        }
        Isometry { perm, flip }
    }
}

/// All 2^k * k! isometries of G_k.
pub fn enumerate_isometries(k: usize) -> Vec<Isometry> {
    fn perms(k: usize) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in perms(k - 1) {
            for pos in 0..=p.len() {
                let mut q = p.clone();
                q.insert(pos, k - 1);
                out.push(q);
            }
        }
        out
    }
    let mut out = Vec::new();
    for perm in perms(k) {
        for mask in 0..(1u32 << k) {
            let flip = (0..k).map(|i| mask >> i & 1 == 1).collect();
            out.push(Isometry::new(perm.clone(), flip).unwrap());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn classify_examples() {
        assert_eq!(classify_node(&[2, 2, 2], 3).unwrap(), 0);
        assert_eq!(classify_node(&[1, 1, 0], 3).unwrap(), 2);
        assert_eq!(classify_node(&[1, 1, 1], 3).unwrap(), 3);
        assert_eq!(classify_node(&[3, 0, 0], 3), Err(GridError::BadCoordinate(3)));
        assert_eq!(class_name(3, 2), "face-center");
    }

    #[test]
    fn class_count_examples() {
        assert_eq!(class_count(3, 0).unwrap(), 8);
        assert_eq!(class_count(3, 1).unwrap(), 12);
        assert_eq!(class_count(3, 2).unwrap(), 6);
        assert_eq!(class_count(4, 4).unwrap(), 1);
        assert!(class_count(2, 3).is_err());
    }

    #[test]
    fn class_counts_sum_to_grid_size() {
        for k in 1..=10u32 {
            let total: u128 = (0..=k).map(|c| class_count(k, c).unwrap()).sum();
            assert_eq!(total, 3u128.pow(k));
        }
    }

    #[test]
    fn isometry_group_size_and_closure() {
        for k in 1..=3 {
            let g = enumerate_isometries(k);
            let expected = (1usize << k) * (1..=k).product::<usize>();
            assert_eq!(g.len(), expected);
            let set: HashSet<_> = g.iter().cloned().collect();
            assert_eq!(set.len(), expected);
            // spot-check closure and inverses on a sample
            for a in g.iter().take(6) {
                for b in g.iter().take(6) {
                    assert!(set.contains(&a.compose(b)));
                }
                assert_eq!(a.compose(&a.inverse()), Isometry::identity(k));
            }
        }
    }

    #[test]
    fn flip_all_maps_origin_to_far_vertex() {
        let m = Isometry::new(vec![0, 1, 2], vec![true, true, true]).unwrap();
        assert_eq!(m.apply_node(&[0, 0, 0]), vec![2, 2, 2]);
    }

    #[test]
    fn isometries_preserve_class_and_act_transitively_on_classes() {
        for k in 1..=4usize {
            let g = enumerate_isometries(k);
            let nodes = all_nodes(k);
            for n in &nodes {
                let c = classify_node(n, k).unwrap();
                let orbit: HashSet<Vec<u8>> = g.iter().map(|m| m.apply_node(n)).collect();
                for o in &orbit {
                    assert_eq!(classify_node(o, k).unwrap(), c);
                }
                let class_size = class_count(k as u32, c as u32).unwrap() as usize;
                assert_eq!(orbit.len(), class_size);
            }
        }
    }
}

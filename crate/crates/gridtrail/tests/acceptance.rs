//! Acceptance suite: one test per acceptance criterion, each emitting a
//! single PASS/FAIL line. Run with `--nocapture` to see the lines directly.

use std::collections::BTreeSet;
use std::time::Instant;

use num::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gridtrail::clockwise::generate;
use gridtrail::geom::{point_on_segment, Rat, RationalPoint};
use gridtrail::grid::{all_nodes, enumerate_isometries};
use gridtrail::oracle::{
    count_solutions, feasible_starts, min_trail_search, SearchConfig, StartStatus, Verdict,
};
use gridtrail::trail::{h_formula, verify_trail, Trail};
use gridtrail::trees::{
    full_tree_3, partial_tree_3, replicate_tree, tree_bounds, verify_tree,
};

fn report(n: u32, what: &str, run: impl FnOnce() + std::panic::UnwindSafe) {
    match std::panic::catch_unwind(run) {
        Ok(()) => println!("criterion {n}: PASS - {what}"),
        Err(e) => {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            println!("criterion {n}: FAIL - {what}: {msg}");
            panic!("criterion {n} failed");
        }
    }
}

#[test]
fn criterion_1_optimal_generation() {
    report(1, "optimal generation for k = 1..6", || {
        let t0 = Instant::now();
        let expected = [1usize, 4, 13, 40, 121, 364];
        for k in 1usize..=6 {
            let t = generate(k).expect("generate");
            assert_eq!(
                t.segment_count(),
                expected[k - 1],
                "segment count at k={k}"
            );
            assert_eq!(h_formula(k as u32).expect("h"), expected[k - 1] as u128);
            let rep = verify_trail(&t, None).expect("verify");
            assert!(rep.complete, "incomplete coverage at k={k}");
            assert!(rep.box_ok, "extent above 3 at k={k}");
        }
        let dt = t0.elapsed();
        assert!(dt.as_secs() < 10, "took {dt:?}, limit 10 s");
    });
}

#[test]
fn criterion_2_lower_bound_at_desk_scale() {
    report(2, "oracle: NONE at 3 segments, FOUND at 4 (m=1, D=1)", || {
        let t0 = Instant::now();
        let cfg3 = SearchConfig::new(vec![3, 3], 3);
        let out3 = min_trail_search(&cfg3).expect("search");
        assert_eq!(out3.lattice_class, (1, 1), "lattice class must be stated");
        assert!(
            matches!(out3.verdict, Verdict::NoneExhaustive),
            "expected exhaustive NONE at budget 3"
        );
        let dt = t0.elapsed();
        assert!(dt.as_secs() < 60, "exhaustion took {dt:?}, limit 60 s");

        let cfg4 = SearchConfig::new(vec![3, 3], 4);
        let out4 = min_trail_search(&cfg4).expect("search");
        match out4.verdict {
            Verdict::Found(t) => {
                assert_eq!(t.segment_count(), 4);
                let rep = verify_trail(&t, None).expect("verify");
                assert!(rep.complete && rep.box_ok);
            }
            _ => panic!("expected a 4-segment solution"),
        }
    });
}

#[test]
fn criterion_3_start_node_map() {
    report(3, "start map: k=2 exhaustive, k=3 constructive", || {
        let m2 = feasible_starts(2, None).expect("starts k=2");
        assert_eq!(m2.len(), 9);
        for (node, status) in &m2 {
            if node == &vec![1, 1] {
                assert_eq!(
                    status,
                    &StartStatus::InfeasibleOverLattice,
                    "center must be infeasible over the lattice"
                );
            } else {
                assert_eq!(status, &StartStatus::Feasible, "start {node:?}");
            }
        }
        let m3 = feasible_starts(3, None).expect("starts k=3");
        assert_eq!(m3.len(), 27);
        for (node, status) in &m3 {
            if node == &vec![1, 1, 1] {
                assert_eq!(status, &StartStatus::Unknown, "center must be unknown");
            } else {
                assert_eq!(status, &StartStatus::Feasible, "start {node:?}");
            }
        }
    });
}

#[test]
fn criterion_4_tree_results() {
    report(4, "trees: full 12/27, partial 12/26, replicate <= 39 < 40", || {
        let full = full_tree_3();
        let rf = verify_tree(&full, None).expect("verify full");
        assert!(rf.is_tree() && rf.covering());
        assert_eq!(rf.size, 12);
        assert_eq!(rf.covered.len(), 27);
        assert!((rf.size as u128) < h_formula(3).expect("h(3)"));

        let part = partial_tree_3();
        let rp = verify_tree(&part, None).expect("verify partial");
        assert!(rp.is_tree());
        assert_eq!(rp.size, 12);
        assert_eq!(rp.covered.len(), 26);
        assert_eq!(rp.missing.len(), 1);

        let g4 = replicate_tree(&part).expect("replicate");
        let r4 = verify_tree(&g4, None).expect("verify G_4 tree");
        assert!(r4.is_tree() && r4.covering());
        assert!(r4.size <= 39, "size {} > 39", r4.size);
        assert!((r4.size as u128) < h_formula(4).expect("h(4)"));
    });
}

#[test]
fn criterion_5_bounds_table() {
    report(5, "bounds identities for k = 3..8 with 37/39/40 at k=4", || {
        for k in 3u32..=8 {
            let b = tree_bounds(k).expect("bounds");
            let thm2 = b.thm2_upper.expect("thm2");
            assert_eq!(thm2, (25 * 3u128.pow(k - 3) - 1) / 2);
            assert_eq!(b.dt_upper - thm2, 3u128.pow(k - 3));
            assert_eq!(b.gap_lower, Some(3u128.pow(k - 3)));
            if k >= 4 {
                assert_eq!(
                    b.lemma1_upper.expect("lemma1"),
                    (3u128.pow(k - 4) - 1) / 2 + 13 * 3u128.pow(k - 3)
                );
            }
        }
        let b4 = tree_bounds(4).expect("bounds k=4");
        assert_eq!(b4.dt_upper, 40);
        assert_eq!(b4.thm2_upper, Some(37));
        assert_eq!(b4.lemma1_upper, Some(39));
    });
}

fn random_trail(rng: &mut ChaCha8Rng) -> Option<Trail> {
    let nv = rng.gen_range(2..=7);
    let mut pts = Vec::new();
    for _ in 0..nv {
        let coords: Vec<Rat> = (0..2)
            .map(|_| {
                let num = rng.gen_range(-4i64..=8);
                let den = if rng.gen_bool(0.3) { 2 } else { 1 };
                Rat::new(BigInt::from(num), BigInt::from(den))
            })
            .collect();
        pts.push(RationalPoint::new(coords).ok()?);
    }
    Trail::new(2, pts).ok()
}

#[test]
fn criterion_6_property_suites() {
    report(6, "verifier oracle, isometries, JSON, worker invariance", || {
        // (a) verifier vs naive per-node oracle on 10,000 randomized trails
        let mut rng = ChaCha8Rng::seed_from_u64(20260826);
        let mut checked = 0usize;
        while checked < 10_000 {
            let Some(t) = random_trail(&mut rng) else {
                continue;
            };
            let rep = verify_trail(&t, None).expect("verify");
            let segs = t.segments();
            let mut naive = BTreeSet::new();
            for node in all_nodes(2) {
                let p = RationalPoint::from_ints(&[node[0] as i64, node[1] as i64]);
                if segs.iter().any(|s| point_on_segment(&p, s).expect("dim")) {
                    naive.insert(node);
                }
            }
            assert_eq!(rep.covered, naive, "coverage mismatch on {}", t.to_json());

            // (c) JSON round-trips byte-identically
            let j = t.to_json();
            assert_eq!(j, Trail::from_json(&j).expect("parse").to_json());
            checked += 1;
        }

        // (b) all 48 isometries of G_3 preserve C(3)'s invariants
        let c3 = generate(3).expect("generate");
        let base = verify_trail(&c3, None).expect("verify");
        let mut base_ext = base.extents.clone();
        base_ext.sort();
        let isos = enumerate_isometries(3);
        assert_eq!(isos.len(), 48);
        for iso in &isos {
            let t = Trail::new(
                3,
                c3.vertices().iter().map(|p| iso.apply_point(p)).collect(),
            )
            .expect("mapped");
            assert_eq!(t.segment_count(), c3.segment_count());
            let rep = verify_trail(&t, None).expect("verify");
            assert!(rep.complete);
            let mut ext = rep.extents.clone();
            ext.sort();
            assert_eq!(ext, base_ext);
        }

        // (d) oracle verdicts independent of worker count
        for budget in [3usize, 4] {
            let mut found = Vec::new();
            let mut counts = Vec::new();
            for workers in [1usize, 2, 8] {
                let mut cfg = SearchConfig::new(vec![3, 3], budget);
                cfg.workers = workers;
                let out = min_trail_search(&cfg).expect("search");
                found.push(matches!(out.verdict, Verdict::Found(_)));
                counts.push(count_solutions(&cfg).expect("count"));
            }
            assert!(found.windows(2).all(|w| w[0] == w[1]));
            assert!(counts.windows(2).all(|w| w[0] == w[1]));
        }
    });
}

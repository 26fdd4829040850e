//! Frozen golden artifacts: generated trails must stay byte-identical,
//! the exhaustive solution count for the 3x3 grid is locked, and the two
//! reference covering trees verify against their recorded shapes.

use gridtrail::clockwise::generate;
use gridtrail::oracle::{count_solutions, SearchConfig};
use gridtrail::trail::{verify_trail, Trail};
use gridtrail::trees::{
    full_tree_3, partial_tree_3, partial_tree_3_missing, verify_tree, CoveringTree,
};

#[test]
fn generated_trails_match_goldens() {
    for (k, golden) in [
        (1usize, include_str!("golden/c1.json")),
        (2, include_str!("golden/c2.json")),
        (3, include_str!("golden/c3.json")),
        (4, include_str!("golden/c4.json")),
    ] {
        let t = generate(k).expect("generate");
        assert_eq!(
            t.to_json(),
            golden.trim_end(),
            "generated C({k}) drifted from the golden file"
        );
        // and the golden parses back to a complete trail
        let back = Trail::from_json(golden.trim_end()).expect("golden parses");
        let rep = verify_trail(&back, None).expect("verify");
        assert!(rep.complete && rep.box_ok);
    }
}

#[test]
fn oracle_count_at_budget_4_is_frozen() {
    // complete 4-segment trails on the 3x3 grid over the m=1, D=1 lattice,
    // counting reversals as distinct
    let cfg = SearchConfig::new(vec![3, 3], 4);
    assert_eq!(count_solutions(&cfg).expect("count"), 64);
}

#[test]
fn partial_tree_3_matches_golden() {
    let golden = include_str!("golden/partial3.json");
    let t = partial_tree_3();
    assert_eq!(t.to_json(), golden.trim_end(), "partial_tree_3 drifted");
    let back = CoveringTree::from_json(golden.trim_end()).expect("golden parses");
    let rep = verify_tree(&back, None).expect("verify");
    assert!(rep.is_tree());
    assert_eq!(rep.size, 12);
    assert_eq!(rep.covered.len(), 26);
    assert_eq!(rep.missing.len(), 1);
    let miss = rep.missing.iter().next().expect("one missing");
    assert_eq!(miss, &partial_tree_3_missing());
}

#[test]
fn full_tree_3_matches_golden() {
    let golden = include_str!("golden/full3.json");
    let t = full_tree_3();
    assert_eq!(t.to_json(), golden.trim_end(), "full_tree_3 drifted");
    let back = CoveringTree::from_json(golden.trim_end()).expect("golden parses");
    let rep = verify_tree(&back, None).expect("verify");
    assert!(rep.is_tree() && rep.covering());
    assert_eq!(rep.size, 12);
}

use std::collections::{BTreeSet, HashSet};

use graphmix::graphcore::*;
use graphmix::realize::*;
use graphmix::statespace::{enumerate, Guard};
use itertools::Itertools;
use proptest::prelude::*;

/// Every graph on `n` vertices, as (degrees, graph).
fn all_graphs(n: usize) -> impl Iterator<Item = LabeledGraph> {
    let pairs: Vec<(usize, usize)> = (0..n).tuple_combinations().collect();
    (0u64..1 << pairs.len()).map(move |bits| {
        let e = pairs.iter().enumerate().filter(|(k, _)| bits >> k & 1 == 1).map(|(_, &p)| p);
        LabeledGraph::from_edges(n, e).unwrap()
    })
}

#[test]
fn three_three_one_one_is_not_graphical() {
    assert!(!is_graphical(&[3, 3, 1, 1]));
    let d = DegreeSequence::new(vec![3, 3, 1, 1]).unwrap();
    assert!(matches!(realize_degree(&d), Err(RealizeError::NotGraphical { .. })));
    let count = enumerate(&Instance::Degree(d), false, Guard::default()).map(|s| s.len()).unwrap_or(0);
    assert_eq!(count, 0);
}

#[test]
fn small_bipartite_example_is_realizable() {
    assert!(is_bigraphical(&[2, 2, 1], &[3, 1, 1]));
    let inst = BipartiteInstance::new(vec![2, 2, 1], vec![3, 1, 1]).unwrap();
    let g = realize_bipartite(&inst).unwrap();
    assert_eq!(classify_membership(&g, &Instance::Bipartite(inst)).tag, MembershipTag::Exact);
}

#[test]
fn erdos_gallai_matches_exhaustive_search() {
    for n in 1..=6 {
        let seen: HashSet<Vec<u32>> = all_graphs(n).map(|g| g.degrees()).collect();
        for d in (0..n).map(|_| 0..n as u32).multi_cartesian_product() {
            assert_eq!(is_graphical(&d), seen.contains(&d), "{d:?}");
            if seen.contains(&d) && d.iter().all(|&x| x > 0) {
                let g = realize_degree(&DegreeSequence::new(d.clone()).unwrap()).unwrap();
                assert_eq!(g.degrees(), d);
            }
        }
    }
}

#[test]
fn gale_ryser_matches_exhaustive_search() {
    for (m, n) in [(1, 1), (2, 2), (2, 3), (3, 3), (3, 4)] {
        let mut seen = HashSet::new();
        for bits in 0u32..1 << (m * n) {
            let mut r = vec![0u32; m];
            let mut c = vec![0u32; n];
            for i in 0..m {
                for j in 0..n {
                    if bits >> (i * n + j) & 1 == 1 {
                        r[i] += 1;
                        c[j] += 1;
                    }
                }
            }
            seen.insert((r, c));
        }
        for r in (0..m).map(|_| 0..=n as u32).multi_cartesian_product() {
            for c in (0..n).map(|_| 0..=m as u32).multi_cartesian_product() {
                let ok = seen.contains(&(r.clone(), c.clone()));
                assert_eq!(is_bigraphical(&r, &c), ok, "{r:?} {c:?}");
                if ok && r.iter().chain(&c).all(|&x| x > 0) {
                    let inst = BipartiteInstance::new(r.clone(), c.clone()).unwrap();
                    let g = realize_bipartite(&inst).unwrap();
                    assert_eq!(classify_membership(&g, &Instance::Bipartite(inst)).tag, MembershipTag::Exact);
                }
            }
        }
    }
}

#[test]
fn pam_realizability_matches_exhaustive_search() {
    let n = 6;
    for n1 in 1..n {
        let mut seen = BTreeSet::new();
        for g in all_graphs(n) {
            let d = g.degrees();
            if d.contains(&0) {
                continue;
            }
            let (mut c11, mut c12, mut c22) = (0, 0, 0);
            for e in g.edges() {
                match (e.lo() < n1, e.hi() < n1) {
                    (true, true) => c11 += 1,
                    (false, false) => c22 += 1,
                    _ => c12 += 1,
                }
            }
            seen.insert((d, c11, c12, c22));
        }
        let degrees: BTreeSet<Vec<u32>> = seen.iter().map(|k| k.0.clone()).collect();
        for d in degrees {
            let m = d.iter().sum::<u32>() as u64 / 2;
            for c11 in 0..=m {
                for c22 in 0..=m - c11 {
                    let c12 = m - c11 - c22;
                    let Ok(inst) = PamInstance::new(n1, n - n1, c11, c12, c22, d.clone()) else { continue };
                    match realize_pam(&inst) {
                        Ok(g) => {
                            assert!(seen.contains(&(d.clone(), c11, c12, c22)));
                            assert_eq!(classify_membership(&g, &Instance::Pam(inst)).tag, MembershipTag::Exact);
                        }
                        Err(_) => assert!(!seen.contains(&(d.clone(), c11, c12, c22)), "{d:?} {c11} {c12} {c22}"),
                    }
                }
            }
        }
    }
}

#[test]
fn capacity_violation_is_reported() {
    // Two vertices per class cannot hold two internal edges.
    let inst = PamInstance::new(2, 2, 2, 0, 1, vec![2, 2, 1, 1]).unwrap();
    assert!(matches!(realize_pam(&inst), Err(RealizeError::NotRealizable(RealizeStage::CapacityBound))));
}

proptest! {
    #[test]
    fn realization_is_exact(d in prop::collection::vec(1u32..8, 2..10)) {
        let seq = DegreeSequence::new(d.clone()).unwrap();
        match realize_degree(&seq) {
            Ok(g) => prop_assert_eq!(classify_membership(&g, &Instance::Degree(seq)).tag, MembershipTag::Exact),
            Err(_) => prop_assert!(!is_graphical(&d)),
        }
    }

    #[test]
    fn graphicality_is_permutation_invariant(mut d in prop::collection::vec(0u32..7, 1..9), k in any::<usize>()) {
        let before = is_graphical(&d);
        let len = d.len();
        d.rotate_left(k % len);
        prop_assert_eq!(before, is_graphical(&d));
    }
}

use std::collections::BTreeSet;

use graphmix::graphcore::*;
use graphmix::realize::realize_pam;
use graphmix::statespace::{enumerate, Guard};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn graph(n: usize, e: &[(usize, usize)]) -> LabeledGraph {
    LabeledGraph::from_edges(n, e.iter().copied()).unwrap()
}

fn from_bits(n: usize, bits: u64) -> LabeledGraph {
    let mut edges = Vec::new();
    let mut k = 0;
    for a in 0..n {
        for b in a + 1..n {
            if bits >> k & 1 == 1 {
                edges.push((a, b));
            }
            k += 1;
        }
    }
    graph(n, &edges)
}

/// (c11, c12, c22) by classifying every edge.
fn counts(g: &LabeledGraph, split: usize) -> (u64, u64, u64) {
    let (mut c11, mut c12, mut c22) = (0, 0, 0);
    for e in g.edges() {
        match (e.lo() < split, e.hi() < split) {
            (true, true) => c11 += 1,
            (false, false) => c22 += 1,
            _ => c12 += 1,
        }
    }
    (c11, c12, c22)
}

fn degree(d: &[u32]) -> Instance {
    Instance::Degree(DegreeSequence::new(d.to_vec()).unwrap())
}

#[test]
fn difference_of_identical_graphs_is_empty() {
    let g = graph(4, &[(0, 1), (2, 3)]);
    assert!(symmetric_difference(&g, &g).unwrap().is_empty());
}

#[test]
fn difference_of_two_matchings() {
    let d = symmetric_difference(&graph(4, &[(0, 1), (2, 3)]), &graph(4, &[(0, 2), (1, 3)])).unwrap();
    assert_eq!(d.blue, vec![Edge::new(0, 1), Edge::new(2, 3)]);
    assert_eq!(d.red, vec![Edge::new(0, 2), Edge::new(1, 3)]);
    assert!(d.is_balanced());
}

#[test]
fn difference_matches_set_algebra_on_two_regular_graphs() {
    let space = enumerate(&degree(&[2; 6]), false, Guard::default()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let (g, h) = (space.labeled(rng.gen_range(0..70)), space.labeled(rng.gen_range(0..70)));
        let (eg, eh): (BTreeSet<Edge>, BTreeSet<Edge>) = (g.edges().collect(), h.edges().collect());
        let d = symmetric_difference(&g, &h).unwrap();
        assert_eq!(d.blue.iter().copied().collect::<BTreeSet<_>>(), &eg - &eh);
        assert_eq!(d.red.iter().copied().collect::<BTreeSet<_>>(), &eh - &eg);
        assert!(d.is_balanced());
    }
}

#[test]
fn membership_of_single_edge_instance() {
    let inst = degree(&[1, 1]);
    assert_eq!(classify_membership(&graph(2, &[(0, 1)]), &inst).tag, MembershipTag::Exact);
    let m = classify_membership(&LabeledGraph::empty(2), &inst);
    assert_eq!(m.tag, MembershipTag::PerturbedWithin);
    assert_eq!(m.perturbation.alpha, vec![1, 1]);
}

#[test]
fn too_many_cut_edges_is_outside() {
    // V1 = {0,1,2,3}, V2 = {4,5,6,7}, degrees 1, two cut edges wanted.
    let inst = Instance::Pam(PamInstance::new(4, 4, 1, 2, 1, vec![1; 8]).unwrap());
    let g = graph(8, &[(0, 4), (1, 5), (2, 6), (3, 7)]);
    let m = classify_membership(&g, &inst);
    assert_eq!(m.perturbation.cut_delta, Some(-2));
    assert_eq!(m.tag, MembershipTag::Outside);
}

#[test]
fn counts_of_empty_graph() {
    let inst = PamInstance::new(2, 2, 0, 2, 0, vec![1; 4]).unwrap();
    assert_eq!(cut_internal_counts(&LabeledGraph::empty(4), &inst), (0, 0, 0));
}

#[test]
fn appendix_instance_counts() {
    // Six vertices of degree 3 and five of degree 4, c = (7 4; 4 8).
    let inst = PamInstance::new(6, 5, 7, 4, 8, [vec![3; 6], vec![4; 5]].concat()).unwrap();
    assert!(inst.is_jdm());
    let g = realize_pam(&inst).unwrap();
    assert_eq!(cut_internal_counts(&g, &inst), (7, 4, 8));
    assert_eq!(g.degrees(), inst.d);
}

#[test]
fn counts_match_per_edge_classification() {
    let inst = PamInstance::new(3, 3, 1, 1, 1, vec![1; 6]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let g = from_bits(6, rng.gen_range(0..1 << 15));
        let (c11, c12, c22) = counts(&g, 3);
        assert_eq!(cut_internal_counts(&g, &inst), (c11, c12, c22));
    }
}

#[test]
fn instance_json_round_trip() {
    let text = r#"{"kind":"pam","d":[1,1,1,1],"classes":[2,2],"matrix":[[0,2],[2,0]]}"#;
    let inst = Instance::from_json(text).unwrap();
    assert_eq!(Instance::from_json(&inst.to_json()).unwrap(), inst);
    assert!(matches!(Instance::from_json(r#"{"kind":"tree"}"#), Err(InstanceError::UnknownKind(_))));
    assert!(matches!(Instance::from_json(r#"{"kind":"degree"}"#), Err(InstanceError::MissingField("d"))));
}

#[test]
fn instance_invariants_enforced() {
    assert!(DegreeSequence::new(vec![1, 0]).is_err());
    assert!(BipartiteInstance::new(vec![2, 2], vec![1, 1]).is_err());
    assert!(PamInstance::new(2, 2, 1, 1, 0, vec![1; 4]).is_err());
}

fn any_graph() -> impl Strategy<Value = LabeledGraph> {
    (2usize..=6).prop_flat_map(|n| (Just(n), 0u64..1 << (n * (n - 1) / 2))).prop_map(|(n, bits)| from_bits(n, bits))
}

fn graph_and_degrees() -> impl Strategy<Value = (LabeledGraph, Vec<u32>)> {
    any_graph().prop_flat_map(|g| {
        let n = g.order();
        (Just(g), prop::collection::vec(1u32..n as u32, n))
    })
}

proptest! {
    #[test]
    fn exact_iff_degrees_match((g, d) in graph_and_degrees()) {
        prop_assume!(d.iter().sum::<u32>() % 2 == 0);
        let inst = degree(&d);
        let m = classify_membership(&g, &inst);
        prop_assert_eq!(m.tag == MembershipTag::Exact, g.degrees() == d);
    }

    #[test]
    fn perturbed_states_have_a_legal_deficit((g, d) in graph_and_degrees()) {
        prop_assume!(d.iter().sum::<u32>() % 2 == 0);
        let m = classify_membership(&g, &degree(&d));
        if m.tag == MembershipTag::PerturbedWithin {
            let mut nz: Vec<i64> = m.perturbation.alpha.iter().copied().filter(|&a| a != 0).collect();
            nz.sort();
            prop_assert!(nz == vec![1, 1] || nz == vec![2]);
        }
    }

    #[test]
    fn pam_membership_is_bounded(g in any_graph(), h_bits in any::<u64>(), split in 1usize..6) {
        let n = g.order();
        prop_assume!(split < n && g.degrees().iter().all(|&x| x > 0));
        let h = from_bits(n, h_bits & ((1u64 << (n * (n - 1) / 2)) - 1));
        let (c11, c12, c22) = counts(&g, split);
        let Ok(inst) = PamInstance::new(split, n - split, c11, c12, c22, g.degrees()) else { return Ok(()) };
        let inst = Instance::Pam(inst);
        prop_assert_eq!(classify_membership(&g, &inst).tag, MembershipTag::Exact);
        let m = classify_membership(&h, &inst);
        if m.tag == MembershipTag::PerturbedWithin {
            prop_assert!(m.perturbation.alpha.iter().all(|a| a.abs() <= 2));
            prop_assert!(m.perturbation.cut_delta.unwrap().abs() <= 1);
        }
    }

    #[test]
    fn difference_swaps_colours(a in any_graph(), bits in any::<u64>()) {
        let n = a.order();
        let b = from_bits(n, bits & ((1u64 << (n * (n - 1) / 2)) - 1));
        let ab = symmetric_difference(&a, &b).unwrap();
        let ba = symmetric_difference(&b, &a).unwrap();
        prop_assert_eq!(ab.swapped(), ba);
        let blue: BTreeSet<Edge> = ab.blue.iter().copied().collect();
        prop_assert!(ab.red.iter().all(|e| !blue.contains(e)));
    }

    #[test]
    fn graph_invariants_and_edge_list_round_trip(g in any_graph()) {
        prop_assert_eq!(2 * g.edge_count() as u32, g.degrees().iter().sum::<u32>());
        prop_assert!(g.edges().all(|e| e.lo() < e.hi() && e.hi() < g.order()));
        prop_assert_eq!(LabeledGraph::parse_edge_list(&g.to_edge_list()).unwrap(), g.clone());
        let m = MaskGraph::from_graph(&g).unwrap();
        prop_assert_eq!(m.to_labeled(), g);
    }
}

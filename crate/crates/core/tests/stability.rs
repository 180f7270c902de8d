use std::collections::{HashSet, VecDeque};

use graphmix::chains::*;
use graphmix::graphcore::*;
use graphmix::stability::*;
use graphmix::statespace::{bfs, enumerate, state_graph, Guard};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn seq(d: &[u32]) -> DegreeSequence {
    DegreeSequence::new(d.to_vec()).unwrap()
}

fn big(x: impl Into<i128>) -> BigInt {
    BigInt::from(x.into())
}

fn stable1_big(d: &[u32]) -> bool {
    let n = big(d.len() as i128);
    let two_m = big(d.iter().map(|&x| x as i128).sum::<i128>());
    let lo = big(*d.iter().min().unwrap() as i128);
    let hi = big(*d.iter().max().unwrap() as i128);
    let a = &two_m - &n * &lo;
    let b = &n * &hi - &two_m;
    &a * &b <= (&hi - &lo) * (&a * (&n - &hi - 1) + &b * &lo)
}

fn stable2_big(d: &[u32]) -> bool {
    let n = big(d.len() as i128);
    let lo = big(*d.iter().min().unwrap() as i128);
    let hi = big(*d.iter().max().unwrap() as i128);
    let s = &hi - &lo + 1;
    &s * &s <= 4 * &lo * (n - hi - 1)
}

fn bip_big(r: &[u32], c: &[u32]) -> (bool, bool) {
    let (m, n) = (big(r.len() as i128), big(c.len() as i128));
    let (dr, hr) = (big(*r.iter().min().unwrap()), big(*r.iter().max().unwrap()));
    let (dc, hc) = (big(*c.iter().min().unwrap()), big(*c.iter().max().unwrap()));
    let sq = |x: BigInt| &x * &x;
    let stable = sq(&hr - &dc) <= 4 * &dc * (&n - &hr) && sq(&hc - &dr) <= 4 * &dr * (&m - &hc);
    let a = &dc * (&n - &hr);
    let b = &dr * (&m - &hc);
    let emms = (&hc - &dc - 1) * (&hr - &dr - 1) < 1 + a.max(b);
    (stable, emms)
}

#[test]
fn regular_sequences_are_stable() {
    for n in 2..12 {
        for k in 1..n as u32 {
            assert!(check_stable1(&seq(&vec![k; n])));
        }
    }
}

#[test]
fn documented_sequence_matches_big_integer_evaluation() {
    let d = [2, 2, 2, 1, 1];
    assert_eq!(check_stable1(&seq(&d)), stable1_big(&d));
    assert_eq!(check_stable2(&seq(&d)), stable2_big(&d));
}

#[test]
fn stars_are_not_stable() {
    for n in 4..20 {
        let mut d = vec![1; n];
        d[0] = n as u32 - 1;
        assert!(!check_stable2(&seq(&d)));
    }
}

#[test]
fn all_ones_bipartite_is_stable() {
    for n in 1..8 {
        assert!(check_bipartite_stable(&BipartiteInstance::new(vec![1; n], vec![1; n]).unwrap()));
    }
}

#[test]
fn single_edge_parameters() {
    let inst = Instance::Degree(seq(&[1, 1]));
    assert_eq!(k_js(&inst, Guard::default()).unwrap(), 1);
    assert_eq!(p_stability_ratio(&inst, Guard::default()).unwrap(), num_rational::Ratio::from_integer(2));
}

#[test]
fn triangle_ratio_is_perturbed_count() {
    let inst = Instance::Degree(seq(&[2, 2, 2]));
    let all = enumerate(&inst, true, Guard::default()).unwrap().len() as u64;
    assert_eq!(p_stability_ratio(&inst, Guard::default()).unwrap(), num_rational::Ratio::from_integer(all));
}

#[test]
fn k_pam_is_zero_for_rigid_instance() {
    // K4 split 2|2: nothing can be deleted without leaving the perturbed space
    // for good, and the space is a single state.
    let inst = PamInstance::new(2, 2, 1, 4, 1, vec![3; 4]).unwrap();
    let all = enumerate(&Instance::Pam(inst.clone()), true, Guard::default()).unwrap();
    let exact = enumerate(&Instance::Pam(inst.clone()), false, Guard::default()).unwrap();
    assert_eq!(k_pam(&inst, Guard::default()).unwrap() == 0, all.len() == exact.len());
}

/// Largest distance to an exact state: breadth-first search outward from
/// all exact states over neighbour lists from the chain kernel (the chains
/// are symmetric, so distances agree in both directions).
fn k_oracle(kind: ChainKind, inst: &Instance) -> usize {
    let spec = ChainSpec::new(kind, inst.clone(), 0).unwrap();
    let space = enumerate(inst, true, Guard::default()).unwrap();
    let mut seen = HashSet::new();
    let mut q = VecDeque::new();
    for id in space.exact_ids() {
        let g = space.labeled(id);
        seen.insert(g.canonical_key());
        q.push_back((g, 0));
    }
    let mut worst = 0;
    while let Some((g, d)) = q.pop_front() {
        worst = worst.max(d);
        for (h, _) in neighbors(&spec, &g) {
            if seen.insert(h.canonical_key()) {
                q.push_back((h, d + 1));
            }
        }
    }
    assert_eq!(seen.len(), space.len());
    worst
}

#[test]
fn distance_parameters_match_breadth_first_search() {
    for d in [vec![1, 1, 1, 1], vec![2, 2, 2, 1, 1], vec![3, 2, 2, 2, 1], vec![2, 2, 1, 1, 1, 1]] {
        let inst = Instance::Degree(seq(&d));
        assert_eq!(k_js(&inst, Guard::default()).unwrap(), k_oracle(ChainKind::JerrumSinclair, &inst), "{d:?}");
    }
    let b = Instance::Bipartite(BipartiteInstance::new(vec![2, 1, 1], vec![2, 1, 1]).unwrap());
    assert_eq!(k_js(&b, Guard::default()).unwrap(), k_oracle(ChainKind::BipartiteJs, &b));
    for p in [PamInstance::jdm(3, 3, 2, 2, 2).unwrap(), PamInstance::new(2, 3, 1, 1, 2, vec![1, 2, 2, 2, 1]).unwrap()] {
        assert_eq!(k_pam(&p, Guard::default()).unwrap(), k_oracle(ChainKind::HingeFlip, &Instance::Pam(p.clone())));
    }
}

#[test]
fn k_js_rejects_two_class_instances() {
    let p = Instance::Pam(PamInstance::jdm(3, 3, 2, 2, 2).unwrap());
    assert!(matches!(k_js(&p, Guard::default()), Err(StabilityError::PreconditionViolated(_))));
}

fn small_jdm() -> Vec<PamInstance> {
    let mut out = Vec::new();
    for n1 in 2..=3 {
        for n2 in n1..=4 {
            for b1 in 1..(n1 + n2) as u32 {
                for b2 in 1..(n1 + n2) as u32 {
                    for c12 in 1..(n1 * n2) as u64 {
                        if let Ok(p) = PamInstance::jdm(n1, n2, b1, b2, c12) {
                            if jdm_hypotheses(&p) && graphmix::realize::realize_pam(&p).is_ok() {
                                out.push(p);
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

#[test]
fn jdm_repair_is_legal_short_and_no_better_than_optimal() {
    let insts = small_jdm();
    assert!(insts.len() >= 10);
    for p in insts {
        let inst = Instance::Pam(p.clone());
        let Ok(space) = enumerate(&inst, true, Guard { max_vertices: 10, max_states: 3000 }) else { continue };
        let spec = ChainSpec::new(ChainKind::HingeFlip, inst.clone(), 0).unwrap();
        let dist = bfs(&state_graph(&spec, &space).unwrap(), &space.exact_ids());
        for id in 0..space.len() {
            let g = space.labeled(id);
            let moves = jdm_repair(&g, &p).unwrap();
            assert!(moves.len() <= 6 && moves.len() >= dist[id]);
            let mut cur = g.clone();
            for &(i, j, k) in &moves {
                let next = apply_hinge_moves(&cur, &[(i, j, k)]).unwrap();
                assert!(!transition_probability(&spec, &cur, &next).is_zero());
                cur = next;
            }
            assert_eq!(classify_membership(&cur, &inst).tag, MembershipTag::Exact);
            assert_eq!(apply_hinge_moves(&g, &moves).unwrap(), cur);
        }
    }
}

#[test]
fn jdm_repair_rejects_non_jdm_instance() {
    let p = PamInstance::new(2, 3, 1, 1, 2, vec![1, 2, 2, 2, 1]).unwrap();
    let g = graphmix::realize::realize_pam(&p).unwrap();
    assert!(matches!(jdm_repair(&g, &p), Err(StabilityError::PreconditionViolated(_))));
}

#[test]
fn bounded_repair_finds_shortest_paths() {
    let inst = Instance::Degree(seq(&[2, 2, 2, 1, 1]));
    let space = enumerate(&inst, true, Guard::default()).unwrap();
    let spec = ChainSpec::new(ChainKind::JerrumSinclair, inst.clone(), 0).unwrap();
    let dist = bfs(&state_graph(&spec, &space).unwrap(), &space.exact_ids());
    for id in 0..space.len() {
        let g = space.labeled(id);
        let steps = bounded_repair(&g, &inst, 9).unwrap();
        assert_eq!(steps.len(), dist[id]);
        let mut cur = g;
        for s in &steps {
            cur.apply(&s.removed, &s.added).unwrap();
        }
        assert_eq!(classify_membership(&cur, &inst).tag, MembershipTag::Exact);
        if dist[id] > 0 {
            assert!(matches!(bounded_repair(&space.labeled(id), &inst, dist[id] - 1), Err(StabilityError::NotFound(_))));
        } else {
            assert!(bounded_repair(&space.labeled(id), &inst, 0).unwrap().is_empty());
        }
    }
}

#[test]
fn report_lists_verdicts_and_exact_values() {
    let inst = Instance::Degree(seq(&[1, 1]));
    let r = stability_report(&inst, true, Guard::default()).unwrap();
    assert_eq!(r.verdicts.len(), 2);
    assert_eq!(r.k_exact, Some(1));
    assert_eq!(r.ratio, Some((2, 1)));
    assert!(stability_report(&inst, false, Guard::default()).unwrap().k_exact.is_none());
}

fn degree_seq() -> impl Strategy<Value = Vec<u32>> {
    (2usize..40).prop_flat_map(|n| prop::collection::vec(1u32..n as u32, n))
}

proptest! {
    #[test]
    fn stable2_implies_stable1(d in degree_seq()) {
        prop_assert_eq!(check_stable1(&seq(&d)), stable1_big(&d));
        prop_assert_eq!(check_stable2(&seq(&d)), stable2_big(&d));
        if check_stable2(&seq(&d)) {
            prop_assert!(check_stable1(&seq(&d)));
        }
    }

    #[test]
    fn quarter_bounds_are_stable(d in (8usize..80).prop_flat_map(|n| {
        let (lo, hi) = (n.div_ceil(4) as u32, ((3 * n - 4) / 4) as u32);
        prop::collection::vec(lo..=hi, n)
    })) {
        prop_assert!(check_stable2(&seq(&d)));
    }

    #[test]
    fn square_root_bound_is_stable(d in (4usize..400).prop_flat_map(|n| {
        let hi = (2.0 * (n as f64).sqrt() - 2.0).floor() as u32;
        prop::collection::vec(1..=hi, n)
    })) {
        prop_assert!(check_stable2(&seq(&d)));
    }

    #[test]
    fn bipartite_checks_match_big_integer_evaluation((m, n, bits) in (1usize..8, 1usize..8, any::<u64>())) {
        let (mut r, mut c) = (vec![0u32; m], vec![0u32; n]);
        for i in 0..m {
            for j in 0..n {
                if bits >> (i * n + j) & 1 == 1 {
                    r[i] += 1;
                    c[j] += 1;
                }
            }
        }
        prop_assume!(r.iter().chain(&c).all(|&x| x > 0));
        let inst = BipartiteInstance::new(r.clone(), c.clone()).unwrap();
        prop_assert_eq!((check_bipartite_stable(&inst), check_bipartite_emms(&inst)), bip_big(&r, &c));
    }

    #[test]
    fn almost_half_regular_satisfies_emms(
        (m, n, base, r) in (2usize..10, 2usize..10).prop_flat_map(|(m, n)| (Just(m), Just(n), 1u32..=m as u32, prop::collection::vec(1u32..=n as u32, m)))
    ) {
        // Column degrees differ by at most one; fill them from the row total.
        let total: u32 = r.iter().sum();
        prop_assume!(total >= base * n as u32 && total <= (base + 1) * n as u32 && base < m as u32);
        let extra = (total - base * n as u32) as usize;
        let c: Vec<u32> = (0..n).map(|j| base + (j < extra) as u32).collect();
        prop_assume!(c.iter().all(|&x| x as usize <= m));
        // Complete bipartite graphs are the one exception: both sides are
        // regular and saturated, so the left side is 1 and the right side 1.
        let complete = r.iter().all(|&x| x as usize == n) && c.iter().all(|&x| x as usize == m);
        let Ok(inst) = BipartiteInstance::new(r, c) else { return Ok(()) };
        prop_assert_eq!(check_bipartite_emms(&inst), !complete);
    }

    #[test]
    fn ratio_is_at_least_one(d in prop::collection::vec(1u32..4, 2..6)) {
        prop_assume!(d.iter().sum::<u32>() % 2 == 0 && graphmix::realize::is_graphical(&d));
        let r = p_stability_ratio(&Instance::Degree(seq(&d)), Guard::default()).unwrap();
        prop_assert!(r >= num_rational::Ratio::one());
    }
}

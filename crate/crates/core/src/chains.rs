//! Transition kernels for the lazy switch, Jerrum–Sinclair and hinge-flip
//! chains (plus restricted and bipartite variants).
//!
//! Every kernel is written once as an "outcome" function of the random
//! draw. The sampler draws uniformly and calls it; the exact enumerator
//! calls it for every possible draw and attaches the draw's probability.

use std::collections::HashMap;

use arrayvec::ArrayVec;
use num_rational::Ratio;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graphcore::{
    symmetric_difference, Edge, GraphView, Instance, LabeledGraph, MembershipTag, PamInstance, Vertex,
};

/// Exact transition probabilities.
pub type Prob = Ratio<i64>;

pub type Delta = ArrayVec<Edge, 2>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChainKind {
    Switch,
    JerrumSinclair,
    HingeFlip,
    RestrictedSwitch,
    BipartiteJs,
    BipartiteSwitch,
}

impl ChainKind {
    /// Whether the chain lives on the perturbed space 𝒢′ (else on 𝒢).
    pub fn perturbed_space(self) -> bool {
        matches!(self, ChainKind::JerrumSinclair | ChainKind::HingeFlip | ChainKind::BipartiteJs)
    }

    pub fn parse(name: &str) -> Option<ChainKind> {
        Some(match name {
            "switch" => ChainKind::Switch,
            "js" | "jerrum-sinclair" => ChainKind::JerrumSinclair,
            "hinge" | "hinge-flip" => ChainKind::HingeFlip,
            "rswitch" | "restricted-switch" => ChainKind::RestrictedSwitch,
            "bjs" | "bipartite-js" => ChainKind::BipartiteJs,
            "bswitch" | "bipartite-switch" => ChainKind::BipartiteSwitch,
            _ => return None,
        })
    }

    /// The chain natural for an instance kind.
    pub fn default_for(inst: &Instance, perturbed: bool) -> ChainKind {
        match (inst, perturbed) {
            (Instance::Degree(_), false) => ChainKind::Switch,
            (Instance::Degree(_), true) => ChainKind::JerrumSinclair,
            (Instance::Bipartite(_), false) => ChainKind::BipartiteSwitch,
            (Instance::Bipartite(_), true) => ChainKind::BipartiteJs,
            (Instance::Pam(_), false) => ChainKind::RestrictedSwitch,
            (Instance::Pam(_), true) => ChainKind::HingeFlip,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChainError {
    #[error("chain {0:?} cannot run on this instance kind")]
    IncompatibleInstance(ChainKind),
    #[error("start state is not in the chain's state space")]
    StartOutsideSpace,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainSpec {
    pub kind: ChainKind,
    pub instance: Instance,
    pub seed: u64,
}

impl ChainSpec {
    pub fn new(kind: ChainKind, instance: Instance, seed: u64) -> Result<ChainSpec, ChainError> {
        let ok = matches!(
            (kind, &instance),
            (ChainKind::Switch | ChainKind::JerrumSinclair, Instance::Degree(_))
                | (ChainKind::HingeFlip | ChainKind::RestrictedSwitch, Instance::Pam(_))
                | (ChainKind::BipartiteJs | ChainKind::BipartiteSwitch, Instance::Bipartite(_))
        );
        if !ok {
            return Err(ChainError::IncompatibleInstance(kind));
        }
        Ok(ChainSpec { kind, instance, seed })
    }

    fn pam(&self) -> &PamInstance {
        match &self.instance {
            Instance::Pam(p) => p,
            _ => unreachable!("checked in ChainSpec::new"),
        }
    }

    /// Bipartite side split point (first vertex of side U).
    fn split(&self) -> usize {
        match &self.instance {
            Instance::Bipartite(b) => b.r.len(),
            _ => unreachable!("checked in ChainSpec::new"),
        }
    }
}

/// Seeded generator; `stream` selects an independent ChaCha stream so that
/// parallel chains from one seed never share randomness.
pub fn make_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// The random choices behind one step.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Proposal {
    Lazy,
    /// Fewer than two edges (switch) or no draw possible.
    Empty,
    Switch { e1: Edge, e2: Edge, matching: u8 },
    Js { i: Vertex, j: Vertex, k: Option<Vertex> },
    Hinge { i: Vertex, j: Vertex, k: Vertex },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitionRecord {
    pub removed: Vec<Edge>,
    pub added: Vec<Edge>,
    pub proposal: Proposal,
    pub accepted: bool,
}

impl TransitionRecord {
    fn rejected(proposal: Proposal) -> TransitionRecord {
        TransitionRecord { removed: vec![], added: vec![], proposal, accepted: false }
    }
}

/// Cached per-state quantities: `alpha[v] = d_v − deg(v)`, its L1 norm and
/// (for two-class instances) the cut count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Summary {
    pub alpha: Vec<i64>,
    pub l1: i64,
    pub cut: i64,
}

impl Summary {
    pub fn of<G: GraphView>(g: &G, inst: &Instance) -> Summary {
        let target = inst.degrees();
        let alpha: Vec<i64> = (0..g.order()).map(|v| target[v] as i64 - g.degree(v) as i64).collect();
        let l1 = alpha.iter().map(|a| a.abs()).sum();
        let cut = match inst {
            Instance::Pam(p) => crate::graphcore::cut_count(g, p) as i64,
            _ => 0,
        };
        Summary { alpha, l1, cut }
    }

    fn bump(&mut self, v: Vertex, by: i64) {
        self.l1 += (self.alpha[v] + by).abs() - self.alpha[v].abs();
        self.alpha[v] += by;
    }

    fn update(&mut self, removed: &[Edge], added: &[Edge], inst: &Instance) {
        for e in removed {
            self.bump(e.lo(), 1);
            self.bump(e.hi(), 1);
        }
        for e in added {
            self.bump(e.lo(), -1);
            self.bump(e.hi(), -1);
        }
        if let Instance::Pam(p) = inst {
            self.cut += added.iter().filter(|&&e| p.is_cut(e)).count() as i64;
            self.cut -= removed.iter().filter(|&&e| p.is_cut(e)).count() as i64;
        }
    }
}

/// The two non-identity perfect matchings on the endpoints of `e1`, `e2`.
/// Index 0 is the identity matching (always rejected), 1 pairs lo–lo and
/// hi–hi, 2 pairs lo–hi and hi–lo.
fn switch_outcome<G: GraphView>(g: &G, spec: &ChainSpec, e1: Edge, e2: Edge, matching: u8) -> Option<(Delta, Delta)> {
    let (a, b, x, y) = (e1.lo(), e1.hi(), e2.lo(), e2.hi());
    if matching == 0 || a == x || a == y || b == x || b == y {
        return None;
    }
    let (f1, f2) = if matching == 1 { (Edge::new(a, x), Edge::new(b, y)) } else { (Edge::new(a, y), Edge::new(b, x)) };
    if g.has_edge(f1.lo(), f1.hi()) || g.has_edge(f2.lo(), f2.hi()) {
        return None;
    }
    match spec.kind {
        ChainKind::RestrictedSwitch => {
            let p = spec.pam();
            let before = p.is_cut(e1) as i32 + p.is_cut(e2) as i32;
            let after = p.is_cut(f1) as i32 + p.is_cut(f2) as i32;
            if before != after {
                return None;
            }
        }
        ChainKind::BipartiteSwitch => {
            let s = spec.split();
            let cross = |e: Edge| (e.lo() < s) != (e.hi() < s);
            if !cross(f1) || !cross(f2) {
                return None;
            }
        }
        _ => {}
    }
    let mut rem = Delta::new();
    rem.push(e1);
    rem.push(e2);
    let mut add = Delta::new();
    add.push(f1);
    add.push(f2);
    Some((rem, add))
}

/// JS outcome for ordered pair (i, j) before the compensating-edge choice.
enum JsOutcome {
    Nothing,
    Delete(Edge),
    Add(Edge),
    /// Add (i,j), then delete (j,k) for k drawn uniformly from `candidates`.
    AddDelete(Edge, Vec<Vertex>),
}

fn js_outcome<G: GraphView>(g: &G, s: &Summary, i: Vertex, j: Vertex) -> JsOutcome {
    if i == j {
        return JsOutcome::Nothing;
    }
    let has = g.has_edge(i, j);
    if s.l1 == 0 {
        return if has { JsOutcome::Delete(Edge::new(i, j)) } else { JsOutcome::Nothing };
    }
    if has || s.alpha[i] <= 0 {
        return JsOutcome::Nothing;
    }
    if s.alpha[j] > 0 {
        JsOutcome::Add(Edge::new(i, j))
    } else {
        JsOutcome::AddDelete(Edge::new(i, j), g.neighbors(j))
    }
}

/// Hinge flip i–j → j–k: legal iff {i,j} ∈ E, {j,k} ∉ E and the result stays
/// in 𝒢′(γ,d).
fn hinge_outcome<G: GraphView>(g: &G, s: &Summary, p: &PamInstance, i: Vertex, j: Vertex, k: Vertex) -> Option<(Edge, Edge)> {
    if i == j || j == k || i == k || !g.has_edge(i, j) || g.has_edge(j, k) {
        return None;
    }
    let (old, new) = (Edge::new(i, j), Edge::new(j, k));
    hinge_keeps_space(s, p, old, new, i, k).then_some((old, new))
}

/// Whether moving one degree unit from `i` to `k` (removing `old`, adding
/// `new`) keeps the state in 𝒢′(γ,d).
pub(crate) fn hinge_keeps_space(s: &Summary, p: &PamInstance, old: Edge, new: Edge, i: Vertex, k: Vertex) -> bool {
    let l1 = s.l1 - s.alpha[i].abs() - s.alpha[k].abs() + (s.alpha[i] + 1).abs() + (s.alpha[k] - 1).abs();
    let cut = s.cut - p.is_cut(old) as i64 + p.is_cut(new) as i64;
    l1 <= 4 && (p.c12 as i64 - cut).abs() <= 1
}

/// Call `f(removed, added, proposal, probability)` for every accepted
/// non-lazy draw. Draws leading to the same state are reported separately.
pub fn for_each_move<G, F>(spec: &ChainSpec, g: &G, mut f: F)
where
    G: GraphView,
    F: FnMut(&[Edge], &[Edge], Proposal, Prob),
{
    let n = g.order() as i64;
    match spec.kind {
        ChainKind::Switch | ChainKind::RestrictedSwitch | ChainKind::BipartiteSwitch => {
            let edges = g.sorted_edges();
            let m = edges.len() as i64;
            if m < 2 {
                return;
            }
            let w = Prob::new(1, 2 * (m * (m - 1) / 2) * 3);
            for p in 0..edges.len() {
                for q in p + 1..edges.len() {
                    for matching in 1..3u8 {
                        if let Some((r, a)) = switch_outcome(g, spec, edges[p], edges[q], matching) {
                            f(&r, &a, Proposal::Switch { e1: edges[p], e2: edges[q], matching }, w);
                        }
                    }
                }
            }
        }
        ChainKind::JerrumSinclair | ChainKind::BipartiteJs => {
            let s = Summary::of(g, &spec.instance);
            let pairs: Vec<(Vertex, Vertex)> = if spec.kind == ChainKind::BipartiteJs {
                let split = spec.split();
                let nn = g.order();
                (0..nn).flat_map(|i| (0..nn).map(move |j| (i, j))).filter(|&(i, j)| (i < split) != (j < split)).collect()
            } else {
                (0..g.order()).flat_map(|i| (0..g.order()).map(move |j| (i, j))).collect()
            };
            let w = Prob::new(1, 2 * pairs.len() as i64);
            for (i, j) in pairs {
                match js_outcome(g, &s, i, j) {
                    JsOutcome::Nothing => {}
                    JsOutcome::Delete(e) => f(&[e], &[], Proposal::Js { i, j, k: None }, w),
                    JsOutcome::Add(e) => f(&[], &[e], Proposal::Js { i, j, k: None }, w),
                    JsOutcome::AddDelete(e, ks) => {
                        let wk = w / ks.len() as i64;
                        for k in ks {
                            f(&[Edge::new(j, k)], &[e], Proposal::Js { i, j, k: Some(k) }, wk);
                        }
                    }
                }
            }
        }
        ChainKind::HingeFlip => {
            let p = spec.pam();
            let s = Summary::of(g, &spec.instance);
            let w = Prob::new(1, 2 * n * n * n);
            for i in 0..g.order() {
                for j in g.neighbors(i) {
                    for k in 0..g.order() {
                        if let Some((old, new)) = hinge_outcome(g, &s, p, i, j, k) {
                            f(&[old], &[new], Proposal::Hinge { i, j, k }, w);
                        }
                    }
                }
            }
        }
    }
}

/// Distinct neighbouring states with their exact probabilities.
#[derive(Clone, Debug)]
pub struct Neighborhood {
    pub self_loop: Prob,
    /// (removed, added, probability), sorted by (removed, added).
    pub moves: Vec<(Vec<Edge>, Vec<Edge>, Prob)>,
}

pub fn neighborhood<G: GraphView>(spec: &ChainSpec, g: &G) -> Neighborhood {
    let mut acc: HashMap<(Vec<Edge>, Vec<Edge>), Prob> = HashMap::new();
    for_each_move(spec, g, |r, a, _, w| {
        let mut r = r.to_vec();
        let mut a = a.to_vec();
        r.sort_unstable();
        a.sort_unstable();
        *acc.entry((r, a)).or_insert_with(Prob::zero) += w;
    });
    let total: Prob = acc.values().copied().fold(Prob::zero(), |x, y| x + y);
    let mut moves: Vec<_> = acc.into_iter().map(|((r, a), w)| (r, a, w)).collect();
    moves.sort_by(|x, y| (&x.0, &x.1).cmp(&(&y.0, &y.1)));
    Neighborhood { self_loop: Prob::one() - total, moves }
}

/// Neighbouring graphs with probabilities (self-loop excluded; see
/// [`neighborhood`] for it).
pub fn neighbors(spec: &ChainSpec, g: &LabeledGraph) -> Vec<(LabeledGraph, Prob)> {
    neighborhood(spec, g)
        .moves
        .into_iter()
        .map(|(r, a, w)| {
            let mut h = g.clone();
            h.apply(&r, &a).expect("enumerated move applies");
            (h, w)
        })
        .collect()
}

/// Exact P(g, h), summing over every random draw that maps g to h.
pub fn transition_probability<A: GraphView, B: GraphView>(spec: &ChainSpec, g: &A, h: &B) -> Prob {
    let Ok(diff) = symmetric_difference(g, h) else {
        return Prob::zero();
    };
    if diff.is_empty() {
        return neighborhood(spec, g).self_loop;
    }
    let mut total = Prob::zero();
    for_each_move(spec, g, |r, a, _, w| {
        let mut r = r.to_vec();
        let mut a = a.to_vec();
        r.sort_unstable();
        a.sort_unstable();
        if r == diff.blue && a == diff.red {
            total += w;
        }
    });
    total
}

/// A running chain: graph, cached summary and generator.
pub struct Sampler {
    spec: ChainSpec,
    graph: LabeledGraph,
    summary: Summary,
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(spec: ChainSpec, start: LabeledGraph) -> Result<Sampler, ChainError> {
        let m = crate::graphcore::classify_membership(&start, &spec.instance);
        let ok = match m.tag {
            MembershipTag::Exact => true,
            MembershipTag::PerturbedWithin => spec.kind.perturbed_space(),
            MembershipTag::Outside => false,
        };
        if !ok {
            return Err(ChainError::StartOutsideSpace);
        }
        let summary = Summary::of(&start, &spec.instance);
        let rng = make_rng(spec.seed, 0);
        Ok(Sampler { spec, graph: start, summary, rng })
    }

    pub fn graph(&self) -> &LabeledGraph {
        &self.graph
    }

    pub fn into_graph(self) -> LabeledGraph {
        self.graph
    }

    pub fn summary(&self) -> &Summary {
        &self.summary
    }

    pub fn step(&mut self) -> TransitionRecord {
        if self.rng.gen::<bool>() {
            return TransitionRecord::rejected(Proposal::Lazy);
        }
        let g = &self.graph;
        let n = g.order();
        let (proposal, outcome): (Proposal, Option<(Delta, Delta)>) = match self.spec.kind {
            ChainKind::Switch | ChainKind::RestrictedSwitch | ChainKind::BipartiteSwitch => {
                let m = g.edge_count();
                if m < 2 {
                    let _ = self.rng.gen_range(0..3u8);
                    return TransitionRecord::rejected(Proposal::Empty);
                }
                let p = self.rng.gen_range(0..m);
                let mut q = self.rng.gen_range(0..m - 1);
                if q >= p {
                    q += 1;
                }
                let matching = self.rng.gen_range(0..3u8);
                let (e1, e2) = (g.edge_at(p), g.edge_at(q));
                let (e1, e2) = if e1 < e2 { (e1, e2) } else { (e2, e1) };
                (Proposal::Switch { e1, e2, matching }, switch_outcome(g, &self.spec, e1, e2, matching))
            }
            ChainKind::JerrumSinclair | ChainKind::BipartiteJs => {
                let (i, j) = if self.spec.kind == ChainKind::BipartiteJs {
                    let s = self.spec.split();
                    let (a, b) = (self.rng.gen_range(0..s), self.rng.gen_range(s..n));
                    if self.rng.gen::<bool>() {
                        (a, b)
                    } else {
                        (b, a)
                    }
                } else {
                    (self.rng.gen_range(0..n), self.rng.gen_range(0..n))
                };
                let mut k = None;
                let out = match js_outcome(g, &self.summary, i, j) {
                    JsOutcome::Nothing => None,
                    JsOutcome::Delete(e) => Some((one(e), Delta::new())),
                    JsOutcome::Add(e) => Some((Delta::new(), one(e))),
                    JsOutcome::AddDelete(e, _) => {
                        let nb = g.neighbor_slice(j);
                        let kk = nb[self.rng.gen_range(0..nb.len())] as Vertex;
                        k = Some(kk);
                        Some((one(Edge::new(j, kk)), one(e)))
                    }
                };
                (Proposal::Js { i, j, k }, out)
            }
            ChainKind::HingeFlip => {
                let (i, j, k) = (self.rng.gen_range(0..n), self.rng.gen_range(0..n), self.rng.gen_range(0..n));
                let out = hinge_outcome(g, &self.summary, self.spec.pam(), i, j, k).map(|(o, nw)| (one(o), one(nw)));
                (Proposal::Hinge { i, j, k }, out)
            }
        };
        match outcome {
            None => TransitionRecord::rejected(proposal),
            Some((rem, add)) => {
                self.graph.apply(&rem, &add).expect("kernel only proposes legal moves");
                self.summary.update(&rem, &add, &self.spec.instance);
                TransitionRecord { removed: rem.to_vec(), added: add.to_vec(), proposal, accepted: true }
            }
        }
    }
}

fn one(e: Edge) -> Delta {
    let mut d = Delta::new();
    d.push(e);
    d
}

/// Run `steps` steps from `start`; `trace` sees every record and the state
/// after it.
pub fn run(
    spec: &ChainSpec,
    start: LabeledGraph,
    steps: u64,
    mut trace: Option<&mut dyn FnMut(u64, &TransitionRecord, &LabeledGraph)>,
) -> Result<LabeledGraph, ChainError> {
    let mut s = Sampler::new(spec.clone(), start)?;
    for t in 0..steps {
        let rec = s.step();
        if let Some(f) = trace.as_mut() {
            f(t, &rec, s.graph());
        }
    }
    Ok(s.into_graph())
}

//! Stability inequalities, exact distance parameters and constructive
//! repair of perturbed states.

use std::collections::{HashMap, VecDeque};

use num_rational::Ratio;
use serde::Serialize;
use thiserror::Error;

use crate::chains::{for_each_move, ChainKind, ChainSpec};
use crate::graphcore::{
    classify_membership, BipartiteInstance, DegreeSequence, Edge, Instance, LabeledGraph, MembershipTag,
    PamInstance, Vertex,
};
use crate::statespace::{bfs, enumerate, state_graph, Guard, StateSpaceError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StabilityError {
    #[error(transparent)]
    StateSpace(#[from] StateSpaceError),
    #[error("instance has no graphical realization")]
    NotGraphical,
    #[error("perturbed state {0} cannot reach any exact state")]
    Unreachable(usize),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("repair got stuck: {0}")]
    Stuck(String),
    #[error("no exact state within {0} moves")]
    NotFound(usize),
}

fn min_max(d: &[u32]) -> (i128, i128) {
    let lo = d.iter().copied().min().unwrap_or(0) as i128;
    let hi = d.iter().copied().max().unwrap_or(0) as i128;
    (lo, hi)
}

/// (2m−nδ)(nΔ−2m) ≤ (Δ−δ)[(2m−nδ)(n−Δ−1) + (nΔ−2m)δ].
pub fn check_stable1(d: &DegreeSequence) -> bool {
    let n = d.len() as i128;
    let two_m = d.sum() as i128;
    let (lo, hi) = min_max(&d.0);
    let a = two_m - n * lo;
    let b = n * hi - two_m;
    a * b <= (hi - lo) * (a * (n - hi - 1) + b * lo)
}

/// (Δ−δ+1)² ≤ 4δ(n−Δ−1).
pub fn check_stable2(d: &DegreeSequence) -> bool {
    let n = d.len() as i128;
    let (lo, hi) = min_max(&d.0);
    (hi - lo + 1).pow(2) <= 4 * lo * (n - hi - 1)
}

/// (Δ_r−δ_c)² ≤ 4δ_c(n−Δ_r) and (Δ_c−δ_r)² ≤ 4δ_r(m−Δ_c), with m = |r|, n = |c|.
pub fn check_bipartite_stable(inst: &BipartiteInstance) -> bool {
    let (m, n) = (inst.r.len() as i128, inst.c.len() as i128);
    let (dr, hr) = min_max(&inst.r);
    let (dc, hc) = min_max(&inst.c);
    (hr - dc).pow(2) <= 4 * dc * (n - hr) && (hc - dr).pow(2) <= 4 * dr * (m - hc)
}

/// (Δ_c−δ_c−1)(Δ_r−δ_r−1) < 1 + max{δ_c(n−Δ_r), δ_r(m−Δ_c)}.
pub fn check_bipartite_emms(inst: &BipartiteInstance) -> bool {
    let (m, n) = (inst.r.len() as i128, inst.c.len() as i128);
    let (dr, hr) = min_max(&inst.r);
    let (dc, hc) = min_max(&inst.c);
    (hc - dc - 1) * (hr - dr - 1) < 1 + (dc * (n - hr)).max(dr * (m - hc))
}

/// Regular-classes hypotheses: constant degree per class, 1 ≤ β_i ≤ |V|−1,
/// 1 ≤ γ ≤ |V1||V2|−1.
pub fn jdm_hypotheses(inst: &PamInstance) -> bool {
    let n = inst.order() as u32;
    inst.is_jdm() && inst.cut_in_standing_range() && inst.d.iter().all(|&b| b >= 1 && b < n)
}

/// Whether some α ∈ (0, ½) satisfies the sparse-family hypotheses
/// |V_i| ≥ αn, 2 ≤ d_v ≤ √(αn/4), 1 ≤ c12 ≤ αn/2.
pub fn sparse_hypotheses(inst: &PamInstance) -> bool {
    let n = inst.order() as u128;
    let hi = inst.d.iter().copied().max().unwrap_or(0) as u128;
    if inst.d.iter().any(|&x| x < 2) || inst.c12 < 1 {
        return false;
    }
    // α·n must lie in [max(4Δ², 2c12), min(n1, n2)] and below n/2.
    let need = (4 * hi * hi).max(2 * inst.c12 as u128);
    need <= inst.n1.min(inst.n2) as u128 && 2 * need < n
}

fn space_distance(inst: &Instance, kind: ChainKind, guard: Guard) -> Result<usize, StabilityError> {
    let space = enumerate(inst, true, guard)?;
    let spec = ChainSpec::new(kind, inst.clone(), 0).expect("chain matches instance kind");
    let exact = space.exact_ids();
    if exact.is_empty() {
        return Err(StabilityError::NotGraphical);
    }
    let adj = state_graph(&spec, &space)?;
    let dist = bfs(&adj, &exact);
    let mut k = 0;
    for (id, &d) in dist.iter().enumerate() {
        if d == usize::MAX {
            return Err(StabilityError::Unreachable(id));
        }
        k = k.max(d);
    }
    Ok(k)
}

/// k_JS: the largest JS-chain distance from a perturbed state to 𝒢.
/// Works for degree and bipartite instances.
pub fn k_js(inst: &Instance, guard: Guard) -> Result<usize, StabilityError> {
    let kind = match inst {
        Instance::Degree(_) => ChainKind::JerrumSinclair,
        Instance::Bipartite(_) => ChainKind::BipartiteJs,
        Instance::Pam(_) => return Err(StabilityError::PreconditionViolated("k_js needs a degree or bipartite instance".into())),
    };
    space_distance(inst, kind, guard)
}

/// k(γ,d): the largest hinge-flip distance from 𝒢′(γ,d) to 𝒢(γ,d).
pub fn k_pam(inst: &PamInstance, guard: Guard) -> Result<usize, StabilityError> {
    space_distance(&Instance::Pam(inst.clone()), ChainKind::HingeFlip, guard)
}

/// |𝒢′| / |𝒢|.
pub fn p_stability_ratio(inst: &Instance, guard: Guard) -> Result<Ratio<u64>, StabilityError> {
    let exact = enumerate(inst, false, guard)?.len() as u64;
    let all = enumerate(inst, true, guard)?.len() as u64;
    if exact == 0 {
        return Err(StabilityError::NotGraphical);
    }
    Ok(Ratio::new(all, exact))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub name: String,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StabilityReport {
    pub n: usize,
    pub m: u64,
    pub delta: u32,
    #[serde(rename = "Delta")]
    pub delta_max: u32,
    pub verdicts: Vec<Verdict>,
    pub k_exact: Option<usize>,
    /// |𝒢′|/|𝒢| as (numerator, denominator).
    pub ratio: Option<(u64, u64)>,
}

/// Evaluate every applicable inequality; with `exact` also compute the
/// distance parameter and ratio by enumeration.
pub fn stability_report(inst: &Instance, exact: bool, guard: Guard) -> Result<StabilityReport, StabilityError> {
    let d = inst.degrees();
    let v = |name: &str, holds: bool| Verdict { name: name.into(), holds };
    let verdicts = match inst {
        Instance::Degree(s) => vec![v("stable1", check_stable1(s)), v("stable2", check_stable2(s))],
        Instance::Bipartite(b) => vec![v("bipartite_stable", check_bipartite_stable(b)), v("bipartite_emms", check_bipartite_emms(b))],
        Instance::Pam(p) => vec![v("jdm_regular_classes", jdm_hypotheses(p)), v("sparse_irregular", sparse_hypotheses(p))],
    };
    let (k_exact, ratio) = if exact {
        let k = match inst {
            Instance::Pam(p) => k_pam(p, guard)?,
            _ => k_js(inst, guard)?,
        };
        let r = p_stability_ratio(inst, guard)?;
        (Some(k), Some((*r.numer(), *r.denom())))
    } else {
        (None, None)
    };
    Ok(StabilityReport {
        n: d.len(),
        m: d.iter().map(|&x| x as u64).sum::<u64>() / 2,
        delta: d.iter().copied().min().unwrap_or(0),
        delta_max: d.iter().copied().max().unwrap_or(0),
        verdicts,
        k_exact,
        ratio,
    })
}

/// Hinge flip (i, j, k): delete {i,j}, add {j,k}.
pub type HingeMove = (Vertex, Vertex, Vertex);

/// Working copy for the regular-classes repair. Possibly complemented, in
/// which case targets are n−1−β and flips are mapped back on record.
struct Work {
    n: usize,
    n1: usize,
    adj: Vec<Vec<bool>>,
    target: Vec<i64>,
    c12: i64,
    complemented: bool,
    moves: Vec<HingeMove>,
}

const REPAIR_GUARD: usize = 24;

impl Work {
    fn class(&self, v: Vertex) -> usize {
        usize::from(v >= self.n1)
    }

    fn members(&self, class: usize) -> std::ops::Range<Vertex> {
        if class == 0 {
            0..self.n1
        } else {
            self.n1..self.n
        }
    }

    fn deg(&self, v: Vertex) -> i64 {
        self.adj[v].iter().filter(|&&b| b).count() as i64
    }

    /// Degree surplus (positive) or deficit (negative).
    fn exc(&self, v: Vertex) -> i64 {
        self.deg(v) - self.target[v]
    }

    fn cut(&self) -> i64 {
        let mut c = 0;
        for a in 0..self.n1 {
            for b in self.n1..self.n {
                c += self.adj[a][b] as i64;
            }
        }
        c
    }

    fn internal(&self, class: usize) -> i64 {
        let r = self.members(class);
        let mut c = 0;
        for a in r.clone() {
            for b in a + 1..r.end {
                c += self.adj[a][b] as i64;
            }
        }
        c
    }

    fn l1(&self) -> i64 {
        (0..self.n).map(|v| self.exc(v).abs()).sum()
    }

    fn exact(&self) -> bool {
        self.l1() == 0 && self.cut() == self.c12
    }

    fn legal(&self, (i, j, k): HingeMove) -> bool {
        if i == j || j == k || i == k || !self.adj[i][j] || self.adj[j][k] {
            return false;
        }
        let cut = self.cut() - (self.class(i) != self.class(j)) as i64 + (self.class(j) != self.class(k)) as i64;
        let l1 = self.l1() - self.exc(i).abs() - self.exc(k).abs() + (self.exc(i) - 1).abs() + (self.exc(k) + 1).abs();
        l1 <= 4 && (cut - self.c12).abs() <= 1
    }

    fn flip(&mut self, m: HingeMove) -> Result<(), StabilityError> {
        if !self.legal(m) {
            return Err(StabilityError::Stuck(format!("hinge flip {:?} is not a legal move", m)));
        }
        let (i, j, k) = m;
        self.adj[i][j] = false;
        self.adj[j][i] = false;
        self.adj[j][k] = true;
        self.adj[k][j] = true;
        self.moves.push(if self.complemented { (k, j, i) } else { m });
        if self.moves.len() > REPAIR_GUARD {
            return Err(StabilityError::Stuck("move guard exceeded".into()));
        }
        Ok(())
    }

    /// Try two flips in either order.
    fn flip_pair(&mut self, a: HingeMove, b: HingeMove) -> Result<(), StabilityError> {
        if self.legal(a) {
            self.flip(a)?;
            if self.legal(b) {
                return self.flip(b);
            }
            // Undo and try the other order.
            let (i, j, k) = a;
            self.flip_raw_undo(i, j, k);
        }
        self.flip(b)?;
        self.flip(a)
    }

    fn flip_raw_undo(&mut self, i: Vertex, j: Vertex, k: Vertex) {
        self.adj[j][k] = false;
        self.adj[k][j] = false;
        self.adj[i][j] = true;
        self.adj[j][i] = true;
        self.moves.pop();
    }

    fn complement(&mut self) {
        for a in 0..self.n {
            for b in 0..self.n {
                if a != b {
                    self.adj[a][b] = !self.adj[a][b];
                }
            }
        }
        for t in &mut self.target {
            *t = self.n as i64 - 1 - *t;
        }
        self.c12 = (self.n1 * (self.n - self.n1)) as i64 - self.c12;
        self.complemented = !self.complemented;
    }

    fn first<T>(it: impl IntoIterator<Item = T>) -> Option<T> {
        it.into_iter().next()
    }

    /// Move one unit from surplus `w` to `v` within a class: flip (w, z, v)
    /// for the lowest z ∈ N(w) \ N(v), z ≠ v.
    fn cancellation(&mut self, v: Vertex, w: Vertex) -> Result<(), StabilityError> {
        let z = Self::first((0..self.n).filter(|&z| z != v && self.adj[w][z] && !self.adj[v][z]))
            .ok_or_else(|| StabilityError::Stuck(format!("no cancellation neighbour for {v},{w}")))?;
        self.flip((w, z, v))
    }

    fn non_edges(&self, class: usize) -> Vec<(Vertex, Vertex)> {
        let r = self.members(class);
        let mut out = Vec::new();
        for a in r.clone() {
            for b in r.clone() {
                if a != b && !self.adj[a][b] {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// One progress step when the cut count is c12 + 1.
    fn case_cut_high(&mut self) -> Result<(), StabilityError> {
        // X lost an internal edge; Y carries the extra degree.
        let x = if self.class_internal_deficit(0) { 0 } else { 1 };
        let y = 1 - x;
        let surplus_y: Vec<Vertex> = self.members(y).filter(|&v| self.exc(v) > 0).collect();
        let non_edges = self.non_edges(x);
        // Direct: v2 adjacent to an endpoint of an X non-edge.
        for &v2 in &surplus_y {
            for &(a, b) in &non_edges {
                if self.adj[v2][a] && self.legal((v2, a, b)) {
                    return self.flip((v2, a, b));
                }
            }
        }
        // Make sure an X non-edge has an endpoint without deficit.
        let Some(&(a, b)) = non_edges.iter().find(|&&(a, _)| self.exc(a) >= 0) else {
            let &(a, _) = non_edges.first().ok_or_else(|| StabilityError::Stuck("no non-edge inside class".into()))?;
            let w = Self::first(self.members(x).filter(|&u| self.exc(u) > 0))
                .ok_or_else(|| StabilityError::Stuck("no surplus to cancel".into()))?;
            return self.cancellation(a, w);
        };
        // Subcase A: a surplus vertex of Y with a neighbour in X.
        for &v2 in &surplus_y {
            let Some(v1) = Self::first(self.members(x).filter(|&u| self.adj[v2][u])) else { continue };
            if self.exc(v1) > 0 {
                let v = Self::first(self.members(x).filter(|&u| self.exc(u) < 0))
                    .ok_or_else(|| StabilityError::Stuck("no deficit in class".into()))?;
                return self.cancellation(v, v1);
            }
            let p = Self::first((0..self.n).filter(|&p| p != v1 && p != v2 && self.adj[a][p] && !self.adj[v1][p]))
                .ok_or_else(|| StabilityError::Stuck("no alternating neighbour".into()))?;
            return self.flip_pair((v2, v1, p), (p, a, b));
        }
        // Subcase B: no surplus vertex of Y touches X. Route a unit of
        // surplus to the Y-endpoint q of a cut edge.
        let v2 = *surplus_y.first().ok_or_else(|| StabilityError::Stuck("no surplus in class".into()))?;
        let q = Self::first(self.members(y).filter(|&q| self.members(x).any(|r| self.adj[q][r])))
            .ok_or_else(|| StabilityError::Stuck("no cut edge".into()))?;
        let u = Self::first((0..self.n).filter(|&u| u != q && self.adj[v2][u] && !self.adj[q][u]))
            .ok_or_else(|| StabilityError::Stuck("no transfer neighbour".into()))?;
        self.flip((v2, u, q))
    }

    /// Whether `class` has one internal edge fewer than required.
    fn class_internal_deficit(&self, class: usize) -> bool {
        let sum: i64 = self.members(class).map(|v| self.target[v]).sum();
        2 * self.internal(class) + self.cut() < sum
    }

    /// One progress step when the cut count is right but internal counts
    /// are not.
    fn case_cut_equal(&mut self) -> Result<(), StabilityError> {
        // X holds one internal edge too many.
        let x = if self.class_internal_deficit(1) { 0 } else { 1 };
        let y = 1 - x;
        let edges_x: Vec<(Vertex, Vertex)> = self
            .members(x)
            .flat_map(|a| self.members(x).filter(move |&b| b != a).map(move |b| (a, b)))
            .filter(|&(a, b)| self.adj[a][b])
            .collect();
        let Some(&(a, _)) = edges_x.iter().find(|&&(a, _)| self.exc(a) > 0) else {
            let &(a, _) = edges_x.first().ok_or_else(|| StabilityError::Stuck("no internal edge".into()))?;
            let w = Self::first(self.members(x).filter(|&u| self.exc(u) > 0))
                .ok_or_else(|| StabilityError::Stuck("no surplus in class".into()))?;
            return self.cancellation(a, w);
        };
        for &(a2, b) in edges_x.iter().filter(|&&(a2, _)| self.exc(a2) > 0) {
            if let Some(v2) = Self::first(self.members(y).filter(|&v| !self.adj[b][v])) {
                if self.legal((a2, b, v2)) {
                    return self.flip((a2, b, v2));
                }
            }
        }
        let (p, q) = Self::first(
            self.members(x).flat_map(|p| self.members(y).map(move |q| (p, q))).filter(|&(p, q)| !self.adj[p][q]),
        )
        .ok_or_else(|| StabilityError::Stuck("cut is complete".into()))?;
        let r = Self::first(self.members(x).filter(|&r| r != p && self.adj[p][r]))
            .ok_or_else(|| StabilityError::Stuck("no internal neighbour".into()))?;
        if self.exc(r) > 0 {
            return self.flip((r, p, q));
        }
        let w = Self::first((0..self.n).filter(|&w| w != r && self.adj[a][w] && !self.adj[r][w]))
            .ok_or_else(|| StabilityError::Stuck("no alternating neighbour".into()))?;
        self.flip_pair((a, w, r), (r, p, q))
    }

    fn balanced(&self) -> bool {
        self.cut() == self.c12 && !self.class_internal_deficit(0) && !self.class_internal_deficit(1)
    }
}

/// Repair a perturbed state of a regular-classes instance into 𝒢(c,d) with
/// hinge flips, following the constructive case analysis: first restore
/// the cut and internal edge counts, then cancel surplus against deficit
/// inside each class. Ties are broken lowest-index-first.
pub fn jdm_repair(g: &LabeledGraph, inst: &PamInstance) -> Result<Vec<HingeMove>, StabilityError> {
    if !jdm_hypotheses(inst) {
        return Err(StabilityError::PreconditionViolated("instance is not a regular-classes instance in range".into()));
    }
    let tag = classify_membership(g, &Instance::Pam(inst.clone())).tag;
    if tag == MembershipTag::Outside {
        return Err(StabilityError::PreconditionViolated("graph is outside the perturbed space".into()));
    }
    let n = inst.order();
    let mut adj = vec![vec![false; n]; n];
    for e in g.edges() {
        adj[e.lo()][e.hi()] = true;
        adj[e.hi()][e.lo()] = true;
    }
    let mut w = Work {
        n,
        n1: inst.n1,
        adj,
        target: inst.d.iter().map(|&x| x as i64).collect(),
        c12: inst.c12 as i64,
        complemented: false,
        moves: Vec::new(),
    };
    while !w.balanced() {
        let diff = w.cut() - w.c12;
        if diff == -1 {
            w.complement();
            w.case_cut_high()?;
            w.complement();
        } else if diff == 1 {
            w.case_cut_high()?;
        } else {
            w.case_cut_equal()?;
        }
    }
    while !w.exact() {
        let v = Work::first((0..n).filter(|&v| w.exc(v) < 0)).expect("balanced but inexact state has a deficit");
        let u = Work::first(w.members(w.class(v)).filter(|&u| w.exc(u) > 0))
            .ok_or_else(|| StabilityError::Stuck("balanced class without surplus".into()))?;
        w.cancellation(v, u)?;
    }
    Ok(w.moves)
}

/// Apply hinge moves to a copy of `g`.
pub fn apply_hinge_moves(g: &LabeledGraph, moves: &[HingeMove]) -> Result<LabeledGraph, crate::graphcore::GraphError> {
    let mut h = g.clone();
    for &(i, j, k) in moves {
        h.apply(&[Edge::new(i, j)], &[Edge::new(j, k)])?;
    }
    Ok(h)
}

/// One chain transition: edges removed and added.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Step {
    pub removed: Vec<Edge>,
    pub added: Vec<Edge>,
}

/// Breadth-first search from `g` through the perturbed-space chain of
/// `inst` (JS / bipartite JS / hinge flip) to the nearest exact state,
/// exploring at most `depth` moves. Returns the moves of one shortest path.
pub fn bounded_repair(g: &LabeledGraph, inst: &Instance, depth: usize) -> Result<Vec<Step>, StabilityError> {
    let tag = classify_membership(g, inst).tag;
    if tag == MembershipTag::Outside {
        return Err(StabilityError::PreconditionViolated("graph is outside the perturbed space".into()));
    }
    let kind = ChainKind::default_for(inst, true);
    let spec = ChainSpec::new(kind, inst.clone(), 0).expect("default chain matches instance");
    let start = g.canonical_key();
    let mut prev: HashMap<Vec<u8>, Option<(Vec<u8>, Step)>> = HashMap::from([(start.clone(), None)]);
    let mut q = VecDeque::from([(g.clone(), 0usize)]);
    while let Some((h, dist)) = q.pop_front() {
        if classify_membership(&h, inst).tag == MembershipTag::Exact {
            let mut steps = Vec::new();
            let mut key = h.canonical_key();
            while let Some(Some((p, s))) = prev.get(&key) {
                steps.push(s.clone());
                key = p.clone();
            }
            steps.reverse();
            return Ok(steps);
        }
        if dist == depth {
            continue;
        }
        let hk = h.canonical_key();
        let mut next = Vec::new();
        for_each_move(&spec, &h, |r, a, _, _| next.push((r.to_vec(), a.to_vec())));
        for (r, a) in next {
            let mut x = h.clone();
            x.apply(&r, &a).expect("enumerated move applies");
            let key = x.canonical_key();
            if !prev.contains_key(&key) {
                prev.insert(key, Some((hk.clone(), Step { removed: r, added: a })));
                q.push_back((x, dist + 1));
            }
        }
    }
    Err(StabilityError::NotFound(depth))
}

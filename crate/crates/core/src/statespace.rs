//! Exhaustive state spaces, exact transition matrices and mixing diagnostics.

use std::collections::{HashMap, VecDeque};

use num_rational::Ratio;
use num_traits::{One, Zero};
use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::chains::{for_each_move, make_rng, ChainKind, ChainSpec, Prob};
use crate::graphcore::{classify_parts, GraphView, Instance, LabeledGraph, MaskGraph, MembershipTag, MASK_LIMIT};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StateSpaceError {
    #[error("instance too large to enumerate: {0}")]
    TooLarge(String),
    #[error("chain {0:?} does not match the enumerated space")]
    SpaceMismatch(ChainKind),
    #[error("a chain move left the enumerated space")]
    MoveLeavesSpace,
    #[error("eigenvalue iteration did not converge after {0} iterations")]
    NonConvergence(usize),
    #[error("invalid flow: {0}")]
    InvalidFlow(String),
}

/// Limits for exhaustive enumeration.
#[derive(Clone, Copy, Debug)]
pub struct Guard {
    pub max_vertices: usize,
    pub max_states: usize,
}

impl Default for Guard {
    fn default() -> Guard {
        Guard { max_vertices: 10, max_states: 20_000 }
    }
}

/// Enumerated 𝒢(inst) or 𝒢′(inst). States are stored as edge masks (bit i
/// ↔ i-th vertex pair in lexicographic order) sorted ascending.
#[derive(Clone, Debug)]
pub struct StateSpace {
    pub instance: Instance,
    pub perturbed: bool,
    n: usize,
    states: Vec<u128>,
    index: HashMap<u128, usize>,
}

impl StateSpace {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn mask(&self, id: usize) -> u128 {
        self.states[id]
    }

    pub fn graph(&self, id: usize) -> MaskGraph {
        MaskGraph::from_mask(self.n, self.states[id])
    }

    pub fn labeled(&self, id: usize) -> LabeledGraph {
        self.graph(id).to_labeled()
    }

    pub fn id_of_mask(&self, mask: u128) -> Option<usize> {
        self.index.get(&mask).copied()
    }

    pub fn id_of<G: GraphView>(&self, g: &G) -> Option<usize> {
        let m = MaskGraph::from_graph(g).ok()?;
        self.id_of_mask(m.mask())
    }

    pub fn tag(&self, id: usize) -> MembershipTag {
        crate::graphcore::classify_membership(&self.graph(id), &self.instance).tag
    }

    /// Ids of the exact states (all ids when the space is not perturbed).
    pub fn exact_ids(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.tag(i) == MembershipTag::Exact).collect()
    }
}

struct Enumerator<'a> {
    inst: &'a Instance,
    perturbed: bool,
    n: usize,
    target: Vec<u32>,
    /// Maximum degree a vertex may reach.
    cap: Vec<u32>,
    split: Option<usize>,
    guard: Guard,
    deg: Vec<u32>,
    mask: u128,
    out: Vec<u128>,
    overflow: bool,
    /// Edges chosen so far; never exceeds half the target degree sum.
    edges: u64,
    min_edges: u64,
    max_edges: u64,
    /// Largest deficit a single vertex may keep.
    slack: u32,
    /// PAM only: class boundary, cut edges chosen so far and their cap.
    classes: Option<(usize, u64)>,
    cut: u64,
}

impl Enumerator<'_> {
    fn allowed_neighbor(&self, i: usize, j: usize) -> bool {
        match self.split {
            Some(s) => (i < s) != (j < s),
            None => true,
        }
    }

    /// Partial feasibility after vertex `i`'s degree is final.
    fn prefix_ok(&self, upto: usize) -> bool {
        // Later vertices only gain edges among themselves.
        let later = (self.n - upto - 1) as u32;
        let mut room = 0;
        for v in upto + 1..self.n {
            if self.deg[v] + later.saturating_sub(1) + self.slack < self.target[v] {
                return false;
            }
            room += (self.cap[v] - self.deg[v]).min(later.saturating_sub(1)) as u64;
        }
        if self.edges + room / 2 < self.min_edges {
            return false;
        }
        if let Some((n1, cap)) = self.classes {
            // Later cut edges join two later vertices on opposite sides.
            let room = |r: std::ops::Range<usize>| r.map(|v| (self.cap[v] - self.deg[v]) as u64).sum::<u64>();
            let later = room(upto + 1..n1.max(upto + 1)).min(room(n1.max(upto + 1)..self.n));
            let floor = cap.saturating_sub(2 * self.perturbed as u64);
            if self.cut + later < floor {
                return false;
            }
        }
        let alpha = |v: usize| self.target[v] as i64 - self.deg[v] as i64;
        match self.inst {
            Instance::Degree(_) => {
                let budget = if self.perturbed { 2 } else { 0 };
                let mut total = 0;
                for v in 0..=upto {
                    let a = alpha(v);
                    if a < 0 {
                        return false;
                    }
                    total += a;
                }
                total <= budget
            }
            Instance::Bipartite(_) => {
                let s = self.split.expect("bipartite split");
                let budget = if self.perturbed { 1 } else { 0 };
                let (mut sv, mut su) = (0, 0);
                for v in 0..=upto {
                    let a = alpha(v);
                    if a < 0 {
                        return false;
                    }
                    if v < s {
                        sv += a
                    } else {
                        su += a
                    }
                }
                sv <= budget && su <= budget
            }
            Instance::Pam(_) => {
                if !self.perturbed {
                    return (0..=upto).all(|v| alpha(v) == 0);
                }
                (0..=upto).map(|v| alpha(v).abs()).sum::<i64>() <= 4
            }
        }
    }

    fn rec(&mut self, i: usize) {
        if self.overflow {
            return;
        }
        if i == self.n {
            let cut = self.classes.map(|_| self.cut);
            let tag = classify_parts(self.inst, &self.deg, cut, true).tag;
            let keep = match tag {
                MembershipTag::Exact => true,
                MembershipTag::PerturbedWithin => self.perturbed,
                MembershipTag::Outside => false,
            };
            if keep {
                self.out.push(self.mask);
                if self.out.len() > self.guard.max_states {
                    self.overflow = true;
                }
            }
            return;
        }
        let cands: Vec<usize> =
            (i + 1..self.n).filter(|&j| self.allowed_neighbor(i, j) && self.deg[j] < self.cap[j]).collect();
        let cur = self.deg[i];
        let lo_deg = match self.inst {
            Instance::Pam(_) if self.perturbed => self.target[i].saturating_sub(2),
            Instance::Pam(_) => self.target[i],
            _ if self.perturbed => self.target[i].saturating_sub(2),
            _ => self.target[i],
        };
        let hi_deg = self.cap[i];
        if cur > hi_deg {
            return;
        }
        let kmin = lo_deg.saturating_sub(cur) as usize;
        let kmax = ((hi_deg - cur) as usize).min(cands.len());
        if kmin > kmax {
            return;
        }
        let mut chosen = Vec::with_capacity(kmax);
        self.choose(i, &cands, 0, kmin, kmax, &mut chosen);
    }

    fn choose(&mut self, i: usize, cands: &[usize], from: usize, kmin: usize, kmax: usize, chosen: &mut Vec<usize>) {
        if chosen.len() >= kmin {
            self.deg[i] += chosen.len() as u32;
            if self.prefix_ok(i) {
                self.rec(i + 1);
            }
            self.deg[i] -= chosen.len() as u32;
        }
        if chosen.len() == kmax {
            return;
        }
        for idx in from..cands.len() {
            if cands.len() - idx + chosen.len() < kmin {
                break;
            }
            let j = cands[idx];
            let is_cut = match self.classes {
                Some((n1, cap)) => {
                    let c = ((i < n1) != (j < n1)) as u64;
                    if self.cut + c > cap {
                        continue;
                    }
                    c
                }
                None => 0,
            };
            if self.edges == self.max_edges {
                break;
            }
            let bit = 1u128 << crate::graphcore::pair_index(self.n, i, j);
            self.mask |= bit;
            self.deg[j] += 1;
            self.edges += 1;
            self.cut += is_cut;
            chosen.push(j);
            self.choose(i, cands, idx + 1, kmin, kmax, chosen);
            chosen.pop();
            self.cut -= is_cut;
            self.edges -= 1;
            self.deg[j] -= 1;
            self.mask &= !bit;
        }
    }
}

/// Enumerate 𝒢(inst) (`perturbed = false`) or 𝒢′(inst).
pub fn enumerate(inst: &Instance, perturbed: bool, guard: Guard) -> Result<StateSpace, StateSpaceError> {
    let n = inst.order();
    if n > guard.max_vertices || n > MASK_LIMIT {
        return Err(StateSpaceError::TooLarge(format!("{n} vertices exceeds limit {}", guard.max_vertices.min(MASK_LIMIT))));
    }
    let target = inst.degrees();
    let cap: Vec<u32> = match inst {
        Instance::Pam(_) if perturbed => target.iter().map(|&d| d + 2).collect(),
        _ => target.clone(),
    };
    let split = match inst {
        Instance::Bipartite(b) => Some(b.r.len()),
        _ => None,
    };
    let classes = match inst {
        Instance::Pam(p) => Some((p.n1, p.c12 + perturbed as u64)),
        _ => None,
    };
    let max_edges = target.iter().map(|&d| d as u64).sum::<u64>() / 2;
    // PAM perturbations keep the edge total; the other kinds may lose one edge.
    let (min_edges, slack) = match inst {
        _ if !perturbed => (max_edges, 0),
        Instance::Pam(_) => (max_edges, 2),
        Instance::Bipartite(_) => (max_edges.saturating_sub(1), 1),
        Instance::Degree(_) => (max_edges.saturating_sub(1), 2),
    };
    let mut e = Enumerator {
        inst,
        perturbed,
        n,
        target,
        cap,
        split,
        guard,
        deg: vec![0; n],
        mask: 0,
        out: Vec::new(),
        overflow: false,
        edges: 0,
        min_edges,
        max_edges,
        slack,
        classes,
        cut: 0,
    };
    e.rec(0);
    if e.overflow {
        return Err(StateSpaceError::TooLarge(format!("more than {} states", guard.max_states)));
    }
    let mut states = e.out;
    states.sort_unstable();
    let index = states.iter().enumerate().map(|(i, &m)| (m, i)).collect();
    Ok(StateSpace { instance: inst.clone(), perturbed, n, states, index })
}

/// Row-stochastic transition matrix, stored as sparse rows (dense copies on
/// request) with exact entries alongside the floating-point ones.
#[derive(Clone, Debug)]
pub struct TransitionMatrix {
    pub rows: Vec<Vec<(usize, f64)>>,
    pub exact: Vec<Vec<(usize, Prob)>>,
}

impl TransitionMatrix {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.rows[i].iter().find(|e| e.0 == j).map_or(0.0, |e| e.1)
    }

    pub fn get_exact(&self, i: usize, j: usize) -> Prob {
        self.exact[i].iter().find(|e| e.0 == j).map_or(Prob::zero(), |e| e.1)
    }

    pub fn dense(&self) -> Vec<Vec<f64>> {
        let n = self.len();
        let mut out = vec![vec![0.0; n]; n];
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, p) in row {
                out[i][j] = p;
            }
        }
        out
    }

    /// y = x P (row vector times matrix).
    pub fn left_mul(&self, x: &[f64], y: &mut [f64]) {
        y.iter_mut().for_each(|v| *v = 0.0);
        for (i, row) in self.rows.iter().enumerate() {
            let xi = x[i];
            if xi == 0.0 {
                continue;
            }
            for &(j, p) in row {
                y[j] += xi * p;
            }
        }
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.len()).all(|i| self.exact[i].iter().all(|&(j, p)| self.get_exact(j, i) == p))
    }

    /// Max |1 − row sum|.
    pub fn stochasticity_error(&self) -> f64 {
        self.rows.iter().map(|r| (1.0 - r.iter().map(|e| e.1).sum::<f64>()).abs()).fold(0.0, f64::max)
    }
}

fn check_spec(spec: &ChainSpec, space: &StateSpace) -> Result<(), StateSpaceError> {
    if spec.instance != space.instance || spec.kind.perturbed_space() != space.perturbed {
        return Err(StateSpaceError::SpaceMismatch(spec.kind));
    }
    Ok(())
}

pub fn transition_matrix(spec: &ChainSpec, space: &StateSpace) -> Result<TransitionMatrix, StateSpaceError> {
    check_spec(spec, space)?;
    let mut rows = Vec::with_capacity(space.len());
    let mut exact = Vec::with_capacity(space.len());
    for id in 0..space.len() {
        let g = space.graph(id);
        let mut acc: HashMap<usize, Prob> = HashMap::new();
        let mut bad = false;
        for_each_move(spec, &g, |r, a, _, w| match space.id_of_mask(g.mask_after(r, a)) {
            Some(t) => *acc.entry(t).or_insert_with(Prob::zero) += w,
            None => bad = true,
        });
        if bad {
            return Err(StateSpaceError::MoveLeavesSpace);
        }
        let out: Prob = acc.values().fold(Prob::zero(), |x, &y| x + y);
        *acc.entry(id).or_insert_with(Prob::zero) += Prob::one() - out;
        let mut row: Vec<(usize, Prob)> = acc.into_iter().collect();
        row.sort_unstable_by_key(|e| e.0);
        rows.push(row.iter().map(|&(j, p)| (j, *p.numer() as f64 / *p.denom() as f64)).collect());
        exact.push(row);
    }
    Ok(TransitionMatrix { rows, exact })
}

/// Undirected state graph (self-loops dropped) of a chain on a space.
pub fn state_graph(spec: &ChainSpec, space: &StateSpace) -> Result<Vec<Vec<usize>>, StateSpaceError> {
    check_spec(spec, space)?;
    let mut adj = Vec::with_capacity(space.len());
    for id in 0..space.len() {
        let g = space.graph(id);
        let mut nb = Vec::new();
        let mut bad = false;
        for_each_move(spec, &g, |r, a, _, _| match space.id_of_mask(g.mask_after(r, a)) {
            Some(t) => nb.push(t),
            None => bad = true,
        });
        if bad {
            return Err(StateSpaceError::MoveLeavesSpace);
        }
        nb.sort_unstable();
        nb.dedup();
        adj.push(nb);
    }
    Ok(adj)
}

/// Multi-source BFS distances (`usize::MAX` = unreachable).
pub fn bfs(adj: &[Vec<usize>], sources: &[usize]) -> Vec<usize> {
    let mut dist = vec![usize::MAX; adj.len()];
    let mut q = VecDeque::new();
    for &s in sources {
        if dist[s] != 0 {
            dist[s] = 0;
            q.push_back(s);
        }
    }
    while let Some(x) = q.pop_front() {
        for &y in &adj[x] {
            if dist[y] == usize::MAX {
                dist[y] = dist[x] + 1;
                q.push_back(y);
            }
        }
    }
    dist
}

/// One shortest path from `src` to the nearest member of `targets`
/// (inclusive of both ends); ties broken by lowest state id.
pub fn shortest_path_to(adj: &[Vec<usize>], src: usize, is_target: impl Fn(usize) -> bool) -> Option<Vec<usize>> {
    let mut prev = vec![usize::MAX; adj.len()];
    let mut seen = vec![false; adj.len()];
    let mut q = VecDeque::from([src]);
    seen[src] = true;
    while let Some(x) = q.pop_front() {
        if is_target(x) {
            let mut path = vec![x];
            let mut c = x;
            while c != src {
                c = prev[c];
                path.push(c);
            }
            path.reverse();
            return Some(path);
        }
        for &y in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                prev[y] = x;
                q.push_back(y);
            }
        }
    }
    None
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpectralGap {
    pub lambda1: f64,
    pub gap: f64,
    pub iterations: usize,
}

pub const EIGEN_TOL: f64 = 1e-10;
pub const EIGEN_MAX_ITER: usize = 1_000_000;

/// Second-largest eigenvalue of a symmetric lazy chain by power iteration
/// with the uniform eigenvector deflated. Stops when the eigen-residual
/// ‖Pv − λv‖ drops below [`EIGEN_TOL`].
pub fn spectral_gap(p: &TransitionMatrix) -> Result<SpectralGap, StateSpaceError> {
    let n = p.len();
    if n <= 1 {
        return Ok(SpectralGap { lambda1: 0.0, gap: 1.0, iterations: 0 });
    }
    let deflate = |v: &mut [f64]| {
        let mean = v.iter().sum::<f64>() / n as f64;
        v.iter_mut().for_each(|x| *x -= mean);
    };
    let normalize = |v: &mut [f64]| -> f64 {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            v.iter_mut().for_each(|x| *x /= norm);
        }
        norm
    };
    let mut rng = make_rng(0x5eed, 7);
    let mut v: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() - 0.5).collect();
    deflate(&mut v);
    normalize(&mut v);
    let mut w = vec![0.0; n];
    for it in 1..=EIGEN_MAX_ITER {
        // P is symmetric, so vP = Pv.
        p.left_mul(&v, &mut w);
        deflate(&mut w);
        let lambda: f64 = v.iter().zip(&w).map(|(a, b)| a * b).sum();
        let res = v.iter().zip(&w).map(|(a, b)| (b - lambda * a).powi(2)).sum::<f64>().sqrt();
        if res <= EIGEN_TOL {
            let lambda1 = lambda.clamp(0.0, 1.0);
            return Ok(SpectralGap { lambda1, gap: 1.0 - lambda1, iterations: it });
        }
        if normalize(&mut w) == 0.0 {
            // v lies in the kernel: the deflated spectrum is {0}.
            return Ok(SpectralGap { lambda1: 0.0, gap: 1.0, iterations: it });
        }
        std::mem::swap(&mut v, &mut w);
    }
    Err(StateSpaceError::NonConvergence(EIGEN_MAX_ITER))
}

fn tv_to_uniform(dist: &[f64]) -> f64 {
    let u = 1.0 / dist.len() as f64;
    0.5 * dist.iter().map(|&x| (x - u).abs()).sum::<f64>()
}

/// Δ_x(t) for t = 0..=tmax.
pub fn tv_curve(p: &TransitionMatrix, x: usize, tmax: usize) -> Vec<f64> {
    let n = p.len();
    let mut cur = vec![0.0; n];
    cur[x] = 1.0;
    let mut next = vec![0.0; n];
    let mut out = Vec::with_capacity(tmax + 1);
    out.push(tv_to_uniform(&cur));
    for _ in 0..tmax {
        p.left_mul(&cur, &mut next);
        std::mem::swap(&mut cur, &mut next);
        out.push(tv_to_uniform(&cur));
    }
    out
}

pub fn tv_distance(p: &TransitionMatrix, x: usize, t: usize) -> f64 {
    *tv_curve(p, x, t).last().expect("curve has t+1 points")
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MixingTime {
    pub tau: usize,
    /// Start state attaining the maximum.
    pub worst_state: usize,
    /// Whether every Δ_x(t) sequence was observed non-increasing.
    pub monotone: bool,
}

/// Hard cap on the horizon explored per start state.
pub const MIXING_MAX_STEPS: usize = 1_000_000;

/// τ(ε) = max_x min{t : Δ_x(t′) ≤ ε ∀ t′ ≥ t}. Uses that Δ_x is
/// non-increasing (true for any chain with stationary π); monotonicity of
/// the computed prefix is checked and reported.
pub fn mixing_time(p: &TransitionMatrix, eps: f64) -> Result<MixingTime, StateSpaceError> {
    let n = p.len();
    let mut best = MixingTime { tau: 0, worst_state: 0, monotone: true };
    let mut cur = vec![0.0; n];
    let mut next = vec![0.0; n];
    for x in 0..n {
        cur.iter_mut().for_each(|v| *v = 0.0);
        cur[x] = 1.0;
        let mut prev = tv_to_uniform(&cur);
        let mut t = 0;
        while prev > eps {
            if t == MIXING_MAX_STEPS {
                return Err(StateSpaceError::NonConvergence(t));
            }
            p.left_mul(&cur, &mut next);
            std::mem::swap(&mut cur, &mut next);
            t += 1;
            let d = tv_to_uniform(&cur);
            if d > prev + 1e-12 {
                best.monotone = false;
            }
            prev = d;
        }
        if t > best.tau {
            best.tau = t;
            best.worst_state = x;
        }
    }
    Ok(best)
}

/// Exact flow values.
pub type FlowValue = Ratio<i128>;

#[derive(Clone, Debug)]
pub struct FlowPath {
    pub states: Vec<usize>,
    pub amount: FlowValue,
}

#[derive(Clone, Debug, Default)]
pub struct FlowAssignment {
    pub paths: Vec<FlowPath>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Congestion {
    pub rho: FlowValue,
    pub ell: usize,
}

impl Congestion {
    pub fn rho_f64(&self) -> f64 {
        *self.rho.numer() as f64 / *self.rho.denom() as f64
    }

    /// Sinclair's bound (1 − λ1)⁻¹ ≤ ρ(f)·ℓ(f).
    pub fn sinclair_holds(&self, gap: &SpectralGap) -> bool {
        1.0 / gap.gap <= self.rho_f64() * self.ell as f64 * (1.0 + 1e-12)
    }
}

/// ρ(f) = max_e f(e)/Q(e) with Q(e) = π(x)P(x,y), π uniform; ℓ(f) = longest
/// path carrying flow. Validates demands π(x)π(y) exactly.
pub fn flow_congestion(space: &StateSpace, p: &TransitionMatrix, flow: &FlowAssignment) -> Result<Congestion, StateSpaceError> {
    let n = space.len() as i128;
    let demand = FlowValue::new(1, n * n);
    let mut per_pair: HashMap<(usize, usize), FlowValue> = HashMap::new();
    let mut per_edge: HashMap<(usize, usize), FlowValue> = HashMap::new();
    let mut ell = 0;
    for fp in &flow.paths {
        let s = &fp.states;
        if s.len() < 2 || fp.amount < FlowValue::zero() {
            return Err(StateSpaceError::InvalidFlow("path shorter than one edge or negative flow".into()));
        }
        let mut seen = std::collections::HashSet::new();
        if !s.iter().all(|x| seen.insert(*x)) {
            return Err(StateSpaceError::InvalidFlow(format!("path {:?} is not simple", s)));
        }
        if fp.amount.is_zero() {
            continue;
        }
        for w in s.windows(2) {
            if p.get_exact(w[0], w[1]).is_zero() {
                return Err(StateSpaceError::InvalidFlow(format!("{} -> {} is not a transition", w[0], w[1])));
            }
            *per_edge.entry((w[0], w[1])).or_insert_with(FlowValue::zero) += fp.amount;
        }
        *per_pair.entry((s[0], *s.last().unwrap())).or_insert_with(FlowValue::zero) += fp.amount;
        ell = ell.max(s.len() - 1);
    }
    for x in 0..space.len() {
        for y in 0..space.len() {
            if x == y {
                continue;
            }
            let got = per_pair.get(&(x, y)).copied().unwrap_or_else(FlowValue::zero);
            if got != demand {
                return Err(StateSpaceError::InvalidFlow(format!("pair ({x},{y}) carries {got}, needs {demand}")));
            }
        }
    }
    let mut rho = FlowValue::zero();
    for (&(x, y), &f) in &per_edge {
        let pxy = p.get_exact(x, y);
        let q = FlowValue::new(*pxy.numer() as i128, *pxy.denom() as i128 * n);
        rho = rho.max(f / q);
    }
    Ok(Congestion { rho, ell })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphcore::DegreeSequence;

    fn deg(d: &[u32]) -> Instance {
        Instance::Degree(DegreeSequence::new(d.to_vec()).unwrap())
    }

    #[test]
    fn small_counts() {
        assert_eq!(enumerate(&deg(&[1, 1]), true, Guard::default()).unwrap().len(), 2);
        assert_eq!(enumerate(&deg(&[2, 2, 2, 2]), false, Guard::default()).unwrap().len(), 3);
        assert_eq!(enumerate(&deg(&[2; 6]), false, Guard::default()).unwrap().len(), 70);
    }

    #[test]
    fn too_large_guard() {
        let g = Guard { max_vertices: 10, max_states: 5 };
        assert!(matches!(enumerate(&deg(&[2; 6]), false, g), Err(StateSpaceError::TooLarge(_))));
        assert!(matches!(enumerate(&deg(&[1; 12]), false, Guard::default()), Err(StateSpaceError::TooLarge(_))));
    }

    #[test]
    fn singleton_space() {
        let inst = deg(&[3, 3, 3, 3]);
        let s = enumerate(&inst, false, Guard::default()).unwrap();
        let spec = ChainSpec::new(ChainKind::Switch, inst, 0).unwrap();
        let p = transition_matrix(&spec, &s).unwrap();
        assert_eq!(p.rows, vec![vec![(0, 1.0)]]);
        let gap = spectral_gap(&p).unwrap();
        assert_eq!(gap.gap, 1.0);
    }

    #[test]
    fn two_state_gap_closed_form() {
        // d = (1,1) under JS: P = [[3/4,1/4],[1/4,3/4]], λ1 = 1 − 2p = 1/2.
        let inst = deg(&[1, 1]);
        let s = enumerate(&inst, true, Guard::default()).unwrap();
        let spec = ChainSpec::new(ChainKind::JerrumSinclair, inst, 0).unwrap();
        let p = transition_matrix(&spec, &s).unwrap();
        let gap = spectral_gap(&p).unwrap();
        assert!((gap.lambda1 - 0.5).abs() < 1e-9);
        assert_eq!(tv_curve(&p, 0, 0), vec![0.5]);
        assert_eq!(mixing_time(&p, 0.5).unwrap().tau, 0);
    }

    #[test]
    fn flow_demand_checked() {
        let inst = deg(&[1, 1]);
        let s = enumerate(&inst, true, Guard::default()).unwrap();
        let spec = ChainSpec::new(ChainKind::JerrumSinclair, inst, 0).unwrap();
        let p = transition_matrix(&spec, &s).unwrap();
        let quarter = FlowValue::new(1, 4);
        let ok = FlowAssignment {
            paths: vec![FlowPath { states: vec![0, 1], amount: quarter }, FlowPath { states: vec![1, 0], amount: quarter }],
        };
        let c = flow_congestion(&s, &p, &ok).unwrap();
        // f(e)/Q(e) = (1/4) / (1/2 · 1/4) = 2.
        assert_eq!(c.rho, FlowValue::from_integer(2));
        assert_eq!(c.ell, 1);
        let bad = FlowAssignment { paths: vec![FlowPath { states: vec![0, 1], amount: quarter }] };
        assert!(matches!(flow_congestion(&s, &p, &bad), Err(StateSpaceError::InvalidFlow(_))));
    }
}

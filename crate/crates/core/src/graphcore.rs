//! Graphs, instances, symmetric differences and membership tests.

use std::fmt;

use indexmap::IndexSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Vertex = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for graph on {n} vertices")]
    VertexOutOfRange { vertex: Vertex, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(Vertex),
    #[error("edge {0} already present")]
    DuplicateEdge(Edge),
    #[error("edge {0} not present")]
    MissingEdge(Edge),
    #[error("graphs have different orders ({0} vs {1})")]
    OrderMismatch(usize, usize),
    #[error("malformed graph file: {0}")]
    Parse(String),
    #[error("graph too large for mask encoding ({0} vertices, limit {MASK_LIMIT})")]
    TooLargeForMask(usize),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InstanceError {
    #[error("degree sequence must be non-empty with positive entries")]
    NonPositive,
    #[error("degree sum {0} is odd")]
    OddSum(u64),
    #[error("bipartite sides have different degree sums ({0} vs {1})")]
    SideSumMismatch(u64, u64),
    #[error("class {class} degree sum {sum} does not equal 2*c_ii + c12 = {expected}")]
    Conservation { class: usize, sum: u64, expected: u64 },
    #[error("class sizes {n1}+{n2} do not match {len} degrees")]
    ClassSizes { n1: usize, n2: usize, len: usize },
    #[error("partition matrix must be symmetric 2x2")]
    Matrix,
    #[error("missing field `{0}` for this instance kind")]
    MissingField(&'static str),
    #[error("unknown instance kind `{0}`")]
    UnknownKind(String),
    #[error("invalid instance json: {0}")]
    Json(String),
}

/// Undirected edge stored with sorted endpoints. The derived order is the
/// lexicographic order on sorted pairs, used as the global edge order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge(pub u32, pub u32);

impl Edge {
    pub fn new(a: Vertex, b: Vertex) -> Edge {
        debug_assert!(a != b, "self-loop");
        if a < b {
            Edge(a as u32, b as u32)
        } else {
            Edge(b as u32, a as u32)
        }
    }

    #[inline]
    pub fn lo(self) -> Vertex {
        self.0 as Vertex
    }

    #[inline]
    pub fn hi(self) -> Vertex {
        self.1 as Vertex
    }

    #[inline]
    pub fn contains(self, v: Vertex) -> bool {
        self.lo() == v || self.hi() == v
    }

    /// The endpoint that is not `v`.
    #[inline]
    pub fn other(self, v: Vertex) -> Vertex {
        if self.lo() == v {
            self.hi()
        } else {
            debug_assert_eq!(self.hi(), v);
            self.lo()
        }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{},{}}}", self.0, self.1)
    }
}

/// Read-only view shared by [`LabeledGraph`] and [`MaskGraph`] so the chain
/// kernels have a single implementation.
pub trait GraphView {
    fn order(&self) -> usize;
    fn has_edge(&self, a: Vertex, b: Vertex) -> bool;
    fn degree(&self, v: Vertex) -> usize;
    fn edge_count(&self) -> usize;
    /// Edges in lexicographic order.
    fn sorted_edges(&self) -> Vec<Edge>;
    /// Neighbours of `v` in increasing order.
    fn neighbors(&self, v: Vertex) -> Vec<Vertex>;

    fn degrees(&self) -> Vec<u32> {
        (0..self.order()).map(|v| self.degree(v) as u32).collect()
    }
}

/// Simple undirected graph on `0..n`.
///
/// Edges live in an insertion-ordered set, which gives O(1) membership and
/// O(1) uniform sampling by index; `adj` keeps per-vertex neighbour lists.
#[derive(Clone, Debug)]
pub struct LabeledGraph {
    n: usize,
    edges: IndexSet<Edge>,
    adj: Vec<Vec<u32>>,
}

impl PartialEq for LabeledGraph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.edges == other.edges
    }
}

impl Eq for LabeledGraph {}

impl LabeledGraph {
    pub fn empty(n: usize) -> LabeledGraph {
        LabeledGraph { n, edges: IndexSet::new(), adj: vec![Vec::new(); n] }
    }

    pub fn from_edges<I>(n: usize, edges: I) -> Result<LabeledGraph, GraphError>
    where
        I: IntoIterator<Item = (Vertex, Vertex)>,
    {
        let mut g = LabeledGraph::empty(n);
        for (a, b) in edges {
            g.add_edge(a, b)?;
        }
        Ok(g)
    }

    fn check(&self, a: Vertex, b: Vertex) -> Result<Edge, GraphError> {
        for v in [a, b] {
            if v >= self.n {
                return Err(GraphError::VertexOutOfRange { vertex: v, n: self.n });
            }
        }
        if a == b {
            return Err(GraphError::SelfLoop(a));
        }
        Ok(Edge::new(a, b))
    }

    pub fn add_edge(&mut self, a: Vertex, b: Vertex) -> Result<(), GraphError> {
        let e = self.check(a, b)?;
        if !self.edges.insert(e) {
            return Err(GraphError::DuplicateEdge(e));
        }
        self.adj[a].push(b as u32);
        self.adj[b].push(a as u32);
        Ok(())
    }

    pub fn remove_edge(&mut self, a: Vertex, b: Vertex) -> Result<(), GraphError> {
        let e = self.check(a, b)?;
        if !self.edges.swap_remove(&e) {
            return Err(GraphError::MissingEdge(e));
        }
        for (x, y) in [(a, b), (b, a)] {
            let list = &mut self.adj[x];
            let pos = list.iter().position(|&w| w as usize == y).expect("adjacency out of sync");
            list.swap_remove(pos);
        }
        Ok(())
    }

    /// Apply a delta (removals first, then additions).
    pub fn apply(&mut self, removed: &[Edge], added: &[Edge]) -> Result<(), GraphError> {
        for e in removed {
            self.remove_edge(e.lo(), e.hi())?;
        }
        for e in added {
            self.add_edge(e.lo(), e.hi())?;
        }
        Ok(())
    }

    /// Edge at position `i` of the internal edge list (uniform sampling).
    pub fn edge_at(&self, i: usize) -> Edge {
        *self.edges.get_index(i).expect("edge index out of range")
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.edges.iter().copied()
    }

    /// Unsorted neighbour list; cheap.
    pub fn neighbor_slice(&self, v: Vertex) -> &[u32] {
        &self.adj[v]
    }

    pub fn complement(&self) -> LabeledGraph {
        let mut g = LabeledGraph::empty(self.n);
        for a in 0..self.n {
            for b in a + 1..self.n {
                if !self.has_edge(a, b) {
                    g.add_edge(a, b).expect("fresh edge");
                }
            }
        }
        g
    }

    /// Canonical byte string: the sorted edge list, 4+4 bytes per edge
    /// (little endian), preceded by the order.
    pub fn canonical_key(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(4 + 8 * self.edges.len());
        out.extend_from_slice(&(self.n as u32).to_le_bytes());
        for e in self.sorted_edges() {
            out.extend_from_slice(&e.0.to_le_bytes());
            out.extend_from_slice(&e.1.to_le_bytes());
        }
        out
    }

    /// Parse the text format: header `n m`, then `m` lines `u v`.
    pub fn parse_edge_list(text: &str) -> Result<LabeledGraph, GraphError> {
        let mut nums = text.split_whitespace().map(|t| {
            t.parse::<usize>().map_err(|_| GraphError::Parse(format!("not an integer: {t:?}")))
        });
        let n = nums.next().ok_or_else(|| GraphError::Parse("missing header".into()))??;
        let m = nums.next().ok_or_else(|| GraphError::Parse("missing edge count".into()))??;
        let mut g = LabeledGraph::empty(n);
        for i in 0..m {
            let a = nums.next().ok_or_else(|| GraphError::Parse(format!("edge {i} truncated")))??;
            let b = nums.next().ok_or_else(|| GraphError::Parse(format!("edge {i} truncated")))??;
            g.add_edge(a, b)?;
        }
        if nums.next().is_some() {
            return Err(GraphError::Parse(format!("more than the declared {m} edges")));
        }
        Ok(g)
    }

    pub fn to_edge_list(&self) -> String {
        let mut s = format!("{} {}\n", self.n, self.edges.len());
        for e in self.sorted_edges() {
            s.push_str(&format!("{} {}\n", e.0, e.1));
        }
        s
    }
}

impl GraphView for LabeledGraph {
    fn order(&self) -> usize {
        self.n
    }

    fn has_edge(&self, a: Vertex, b: Vertex) -> bool {
        a != b && a < self.n && b < self.n && self.edges.contains(&Edge::new(a, b))
    }

    fn degree(&self, v: Vertex) -> usize {
        self.adj[v].len()
    }

    fn edge_count(&self) -> usize {
        self.edges.len()
    }

    fn sorted_edges(&self) -> Vec<Edge> {
        let mut v: Vec<Edge> = self.edges.iter().copied().collect();
        v.sort_unstable();
        v
    }

    fn neighbors(&self, v: Vertex) -> Vec<Vertex> {
        let mut out: Vec<Vertex> = self.adj[v].iter().map(|&w| w as Vertex).collect();
        out.sort_unstable();
        out
    }
}

/// Largest order supported by [`MaskGraph`]: C(16,2) = 120 pairs fit in a u128.
pub const MASK_LIMIT: usize = 16;

/// Bit position of pair `{a,b}`; pairs are numbered in lexicographic order.
#[inline]
pub fn pair_index(n: usize, a: Vertex, b: Vertex) -> usize {
    let (a, b) = if a < b { (a, b) } else { (b, a) };
    a * (2 * n - a - 1) / 2 + (b - a - 1)
}

/// Compact graph on at most [`MASK_LIMIT`] vertices used by the exhaustive
/// machinery. The edge mask doubles as a hashable canonical encoding; bit
/// order follows the lexicographic edge order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct MaskGraph {
    n: u8,
    rows: [u16; MASK_LIMIT],
    mask: u128,
}

impl MaskGraph {
    pub fn empty(n: usize) -> MaskGraph {
        assert!(n <= MASK_LIMIT);
        MaskGraph { n: n as u8, rows: [0; MASK_LIMIT], mask: 0 }
    }

    pub fn from_mask(n: usize, mask: u128) -> MaskGraph {
        let mut g = MaskGraph::empty(n);
        let mut idx = 0;
        for a in 0..n {
            for b in a + 1..n {
                if mask >> idx & 1 == 1 {
                    g.rows[a] |= 1 << b;
                    g.rows[b] |= 1 << a;
                }
                idx += 1;
            }
        }
        g.mask = mask;
        g
    }

    pub fn from_graph<G: GraphView>(g: &G) -> Result<MaskGraph, GraphError> {
        if g.order() > MASK_LIMIT {
            return Err(GraphError::TooLargeForMask(g.order()));
        }
        let mut m = MaskGraph::empty(g.order());
        for e in g.sorted_edges() {
            m.toggle(e);
        }
        Ok(m)
    }

    pub fn mask(&self) -> u128 {
        self.mask
    }

    #[inline]
    pub fn edge_bit(&self, e: Edge) -> u128 {
        1u128 << pair_index(self.n as usize, e.lo(), e.hi())
    }

    #[inline]
    pub fn toggle(&mut self, e: Edge) {
        self.rows[e.lo()] ^= 1 << e.hi();
        self.rows[e.hi()] ^= 1 << e.lo();
        self.mask ^= self.edge_bit(e);
    }

    /// Mask after applying a delta, without materialising the graph.
    pub fn mask_after(&self, removed: &[Edge], added: &[Edge]) -> u128 {
        let mut m = self.mask;
        for &e in removed.iter().chain(added) {
            m ^= self.edge_bit(e);
        }
        m
    }

    pub fn row(&self, v: Vertex) -> u16 {
        self.rows[v]
    }

    pub fn to_labeled(&self) -> LabeledGraph {
        LabeledGraph::from_edges(self.n as usize, self.sorted_edges().into_iter().map(|e| (e.lo(), e.hi())))
            .expect("mask graphs are simple")
    }
}

impl GraphView for MaskGraph {
    fn order(&self) -> usize {
        self.n as usize
    }

    #[inline]
    fn has_edge(&self, a: Vertex, b: Vertex) -> bool {
        a != b && self.rows[a] >> b & 1 == 1
    }

    #[inline]
    fn degree(&self, v: Vertex) -> usize {
        self.rows[v].count_ones() as usize
    }

    fn edge_count(&self) -> usize {
        self.mask.count_ones() as usize
    }

    fn sorted_edges(&self) -> Vec<Edge> {
        let n = self.n as usize;
        let mut out = Vec::with_capacity(self.edge_count());
        for a in 0..n {
            let mut r = self.rows[a] >> (a + 1) << (a + 1);
            while r != 0 {
                let b = r.trailing_zeros() as usize;
                out.push(Edge(a as u32, b as u32));
                r &= r - 1;
            }
        }
        out
    }

    fn neighbors(&self, v: Vertex) -> Vec<Vertex> {
        let mut out = Vec::with_capacity(self.degree(v));
        let mut r = self.rows[v];
        while r != 0 {
            out.push(r.trailing_zeros() as usize);
            r &= r - 1;
        }
        out
    }
}

/// Plain degree sequence with positive entries.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeSequence(pub Vec<u32>);

impl DegreeSequence {
    pub fn new(d: Vec<u32>) -> Result<DegreeSequence, InstanceError> {
        if d.is_empty() || d.contains(&0) {
            return Err(InstanceError::NonPositive);
        }
        Ok(DegreeSequence(d))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> u64 {
        self.0.iter().map(|&x| x as u64).sum()
    }

    pub fn min(&self) -> u32 {
        self.0.iter().copied().min().unwrap_or(0)
    }

    pub fn max(&self) -> u32 {
        self.0.iter().copied().max().unwrap_or(0)
    }
}

/// Bipartite instance. Vertices `0..m` form side V (degrees `r`), vertices
/// `m..m+n` form side U (degrees `c`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BipartiteInstance {
    pub r: Vec<u32>,
    pub c: Vec<u32>,
}

impl BipartiteInstance {
    pub fn new(r: Vec<u32>, c: Vec<u32>) -> Result<BipartiteInstance, InstanceError> {
        if r.is_empty() || c.is_empty() || r.contains(&0) || c.contains(&0) {
            return Err(InstanceError::NonPositive);
        }
        let (sr, sc) = (r.iter().map(|&x| x as u64).sum(), c.iter().map(|&x| x as u64).sum());
        if sr != sc {
            return Err(InstanceError::SideSumMismatch(sr, sc));
        }
        Ok(BipartiteInstance { r, c })
    }

    pub fn order(&self) -> usize {
        self.r.len() + self.c.len()
    }

    /// Side of vertex `v`: 0 for V, 1 for U.
    pub fn side(&self, v: Vertex) -> usize {
        usize::from(v >= self.r.len())
    }

    pub fn degrees(&self) -> Vec<u32> {
        self.r.iter().chain(&self.c).copied().collect()
    }
}

/// Two-class partition adjacency matrix instance. Class membership is
/// positional: the first `n1` vertices form V1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PamInstance {
    pub n1: usize,
    pub n2: usize,
    pub c11: u64,
    pub c12: u64,
    pub c22: u64,
    pub d: Vec<u32>,
}

impl PamInstance {
    pub fn new(n1: usize, n2: usize, c11: u64, c12: u64, c22: u64, d: Vec<u32>) -> Result<PamInstance, InstanceError> {
        if d.len() != n1 + n2 {
            return Err(InstanceError::ClassSizes { n1, n2, len: d.len() });
        }
        if d.is_empty() || d.contains(&0) {
            return Err(InstanceError::NonPositive);
        }
        let inst = PamInstance { n1, n2, c11, c12, c22, d };
        for (class, cii) in [(0, c11), (1, c22)] {
            let sum = inst.class_degree_sum(class);
            if sum != 2 * cii + c12 {
                return Err(InstanceError::Conservation { class: class + 1, sum, expected: 2 * cii + c12 });
            }
        }
        Ok(inst)
    }

    /// JDM instance: constant degree `beta1` on V1 and `beta2` on V2.
    pub fn jdm(n1: usize, n2: usize, beta1: u32, beta2: u32, c12: u64) -> Result<PamInstance, InstanceError> {
        let s1 = n1 as u64 * beta1 as u64;
        let s2 = n2 as u64 * beta2 as u64;
        if s1 < c12 || s2 < c12 || (s1 - c12) % 2 != 0 || (s2 - c12) % 2 != 0 {
            return Err(InstanceError::Conservation { class: 1, sum: s1, expected: c12 });
        }
        let mut d = vec![beta1; n1];
        d.extend(std::iter::repeat(beta2).take(n2));
        PamInstance::new(n1, n2, (s1 - c12) / 2, c12, (s2 - c12) / 2, d)
    }

    pub fn order(&self) -> usize {
        self.n1 + self.n2
    }

    /// Class of `v`: 0 for V1, 1 for V2.
    #[inline]
    pub fn class_of(&self, v: Vertex) -> usize {
        usize::from(v >= self.n1)
    }

    pub fn class_range(&self, class: usize) -> std::ops::Range<Vertex> {
        if class == 0 {
            0..self.n1
        } else {
            self.n1..self.n1 + self.n2
        }
    }

    pub fn class_degree_sum(&self, class: usize) -> u64 {
        self.class_range(class).map(|v| self.d[v] as u64).sum()
    }

    pub fn is_cut(&self, e: Edge) -> bool {
        self.class_of(e.lo()) != self.class_of(e.hi())
    }

    pub fn edge_total(&self) -> u64 {
        self.c11 + self.c12 + self.c22
    }

    /// Degrees constant within each class.
    pub fn is_jdm(&self) -> bool {
        let uniform = |r: std::ops::Range<usize>| r.clone().all(|v| self.d[v] == self.d[r.start]);
        self.n1 > 0 && self.n2 > 0 && uniform(self.class_range(0)) && uniform(self.class_range(1))
    }

    /// The paper's standing assumption 1 ≤ c12 ≤ |V1||V2| − 1.
    pub fn cut_in_standing_range(&self) -> bool {
        self.c12 >= 1 && self.c12 < (self.n1 * self.n2) as u64
    }

    /// Complementary instance: degrees n−1−d_v, cut count n1·n2 − c12.
    pub fn complement(&self) -> Option<PamInstance> {
        let n = self.order() as u32;
        let d: Vec<u32> = self.d.iter().map(|&x| n - 1 - x).collect();
        let c12 = (self.n1 * self.n2) as u64 - self.c12;
        let c11 = (self.n1 * (self.n1.saturating_sub(1)) / 2) as u64 - self.c11;
        let c22 = (self.n2 * (self.n2.saturating_sub(1)) / 2) as u64 - self.c22;
        if d.contains(&0) {
            return None;
        }
        PamInstance::new(self.n1, self.n2, c11, c12, c22, d).ok()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Instance {
    Degree(DegreeSequence),
    Bipartite(BipartiteInstance),
    Pam(PamInstance),
}

/// On-disk instance format.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct InstanceFile {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classes: Option<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<[[u64; 2]; 2]>,
}

impl Instance {
    pub fn order(&self) -> usize {
        match self {
            Instance::Degree(d) => d.len(),
            Instance::Bipartite(b) => b.order(),
            Instance::Pam(p) => p.order(),
        }
    }

    /// Target degree of every vertex.
    pub fn degrees(&self) -> Vec<u32> {
        match self {
            Instance::Degree(d) => d.0.clone(),
            Instance::Bipartite(b) => b.degrees(),
            Instance::Pam(p) => p.d.clone(),
        }
    }

    pub fn from_file(f: &InstanceFile) -> Result<Instance, InstanceError> {
        match f.kind.as_str() {
            "degree" => {
                let d = f.d.clone().ok_or(InstanceError::MissingField("d"))?;
                let seq = DegreeSequence::new(d)?;
                if seq.sum() % 2 == 1 {
                    return Err(InstanceError::OddSum(seq.sum()));
                }
                Ok(Instance::Degree(seq))
            }
            "bipartite" => {
                let r = f.r.clone().ok_or(InstanceError::MissingField("r"))?;
                let c = f.c.clone().ok_or(InstanceError::MissingField("c"))?;
                Ok(Instance::Bipartite(BipartiteInstance::new(r, c)?))
            }
            "pam" => {
                let [n1, n2] = f.classes.ok_or(InstanceError::MissingField("classes"))?;
                let m = f.matrix.ok_or(InstanceError::MissingField("matrix"))?;
                if m[0][1] != m[1][0] {
                    return Err(InstanceError::Matrix);
                }
                let mut d = f.d.clone().ok_or(InstanceError::MissingField("d"))?;
                // Shorthand: one degree per class.
                if d.len() == 2 && n1 + n2 != 2 {
                    let (b1, b2) = (d[0], d[1]);
                    d = std::iter::repeat(b1).take(n1).chain(std::iter::repeat(b2).take(n2)).collect();
                }
                Ok(Instance::Pam(PamInstance::new(n1, n2, m[0][0], m[0][1], m[1][1], d)?))
            }
            other => Err(InstanceError::UnknownKind(other.to_string())),
        }
    }

    pub fn to_file(&self) -> InstanceFile {
        match self {
            Instance::Degree(d) => InstanceFile { kind: "degree".into(), d: Some(d.0.clone()), ..Default::default() },
            Instance::Bipartite(b) => {
                InstanceFile { kind: "bipartite".into(), r: Some(b.r.clone()), c: Some(b.c.clone()), ..Default::default() }
            }
            Instance::Pam(p) => InstanceFile {
                kind: "pam".into(),
                d: Some(p.d.clone()),
                classes: Some([p.n1, p.n2]),
                matrix: Some([[p.c11, p.c12], [p.c12, p.c22]]),
                ..Default::default()
            },
        }
    }

    pub fn from_json(text: &str) -> Result<Instance, InstanceError> {
        let f: InstanceFile = serde_json::from_str(text).map_err(|e| InstanceError::Json(e.to_string()))?;
        Instance::from_file(&f)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("instance serialises")
    }
}

/// Blue edges are in `G` only, red edges in `G2` only. Both lists sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColoredDifference {
    pub n: usize,
    pub blue: Vec<Edge>,
    pub red: Vec<Edge>,
}

impl ColoredDifference {
    pub fn len(&self) -> usize {
        self.blue.len() + self.red.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blue.is_empty() && self.red.is_empty()
    }

    pub fn blue_degree(&self) -> Vec<usize> {
        incidence(self.n, &self.blue)
    }

    pub fn red_degree(&self) -> Vec<usize> {
        incidence(self.n, &self.red)
    }

    pub fn is_balanced(&self) -> bool {
        self.blue_degree() == self.red_degree()
    }

    pub fn swapped(&self) -> ColoredDifference {
        ColoredDifference { n: self.n, blue: self.red.clone(), red: self.blue.clone() }
    }
}

fn incidence(n: usize, edges: &[Edge]) -> Vec<usize> {
    let mut deg = vec![0; n];
    for e in edges {
        deg[e.lo()] += 1;
        deg[e.hi()] += 1;
    }
    deg
}

pub fn symmetric_difference<A: GraphView, B: GraphView>(g: &A, g2: &B) -> Result<ColoredDifference, GraphError> {
    if g.order() != g2.order() {
        return Err(GraphError::OrderMismatch(g.order(), g2.order()));
    }
    let blue = g.sorted_edges().into_iter().filter(|e| !g2.has_edge(e.lo(), e.hi())).collect();
    let red = g2.sorted_edges().into_iter().filter(|e| !g.has_edge(e.lo(), e.hi())).collect();
    Ok(ColoredDifference { n: g.order(), blue, red })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MembershipTag {
    Exact,
    PerturbedWithin,
    Outside,
}

/// Degree and cut deviations. `alpha[v] = d_v − deg(v)`: positive means a
/// deficit, negative a surplus. `cut_delta = c12 − c12′` for PAM instances.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Perturbation {
    pub alpha: Vec<i64>,
    pub cut_delta: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Membership {
    pub tag: MembershipTag,
    pub perturbation: Perturbation,
}

/// (c11′, c12′, c22′) of `g` under the positional partition of `inst`.
pub fn cut_internal_counts<G: GraphView>(g: &G, inst: &PamInstance) -> (u64, u64, u64) {
    let mut c = [0u64; 3];
    for e in g.sorted_edges() {
        c[inst.class_of(e.lo()) + inst.class_of(e.hi())] += 1;
    }
    (c[0], c[1], c[2])
}

/// Number of cut edges only (cheaper than the full triple for mask graphs).
pub fn cut_count<G: GraphView>(g: &G, inst: &PamInstance) -> u64 {
    (0..inst.n1).map(|v| g.neighbors(v).into_iter().filter(|&w| w >= inst.n1).count() as u64).sum()
}

/// Classify from degrees and (for PAM) the cut count alone. This is the
/// single place where the three membership definitions live.
pub fn classify_parts(inst: &Instance, degrees: &[u32], cut: Option<u64>, bipartite_ok: bool) -> Membership {
    let target = inst.degrees();
    let alpha: Vec<i64> = target.iter().zip(degrees).map(|(&d, &x)| d as i64 - x as i64).collect();
    let cut_delta = match inst {
        Instance::Pam(p) => cut.map(|c| p.c12 as i64 - c as i64),
        _ => None,
    };
    let tag = match inst {
        Instance::Degree(_) => {
            if alpha.iter().any(|&a| a < 0) {
                MembershipTag::Outside
            } else {
                match alpha.iter().sum::<i64>() {
                    0 => MembershipTag::Exact,
                    2 => MembershipTag::PerturbedWithin,
                    _ => MembershipTag::Outside,
                }
            }
        }
        Instance::Bipartite(b) => {
            let m = b.r.len();
            if !bipartite_ok || alpha.iter().any(|&a| a < 0) {
                MembershipTag::Outside
            } else {
                let sv: i64 = alpha[..m].iter().sum();
                let su: i64 = alpha[m..].iter().sum();
                match (sv, su) {
                    (0, 0) => MembershipTag::Exact,
                    (1, 1) => MembershipTag::PerturbedWithin,
                    _ => MembershipTag::Outside,
                }
            }
        }
        Instance::Pam(_) => {
            let l1: i64 = alpha.iter().map(|a| a.abs()).sum();
            let sum: i64 = alpha.iter().sum();
            let cd = cut_delta.expect("pam classification needs a cut count");
            if sum != 0 || l1 > 4 || cd.abs() > 1 {
                MembershipTag::Outside
            } else if l1 == 0 && cd == 0 {
                MembershipTag::Exact
            } else {
                MembershipTag::PerturbedWithin
            }
        }
    };
    Membership { tag, perturbation: Perturbation { alpha, cut_delta } }
}

/// Membership of `g` in 𝒢(inst) / 𝒢′(inst).
pub fn classify_membership<G: GraphView>(g: &G, inst: &Instance) -> Membership {
    if g.order() != inst.order() {
        let n = inst.order();
        return Membership {
            tag: MembershipTag::Outside,
            perturbation: Perturbation { alpha: vec![0; n], cut_delta: None },
        };
    }
    let degrees = g.degrees();
    let (cut, bip) = match inst {
        Instance::Pam(p) => (Some(cut_count(g, p)), true),
        Instance::Bipartite(b) => {
            let ok = g.sorted_edges().iter().all(|e| b.side(e.lo()) != b.side(e.hi()));
            (None, ok)
        }
        Instance::Degree(_) => (None, true),
    };
    classify_parts(inst, &degrees, cut, bip)
}

pub fn is_exact<G: GraphView>(g: &G, inst: &Instance) -> bool {
    classify_membership(g, inst).tag == MembershipTag::Exact
}

pub fn is_within<G: GraphView>(g: &G, inst: &Instance) -> bool {
    classify_membership(g, inst).tag != MembershipTag::Outside
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: usize, e: &[(usize, usize)]) -> LabeledGraph {
        LabeledGraph::from_edges(n, e.iter().copied()).unwrap()
    }

    #[test]
    fn rejects_loops_and_duplicates() {
        let mut h = LabeledGraph::empty(3);
        assert_eq!(h.add_edge(1, 1), Err(GraphError::SelfLoop(1)));
        h.add_edge(0, 2).unwrap();
        assert_eq!(h.add_edge(2, 0), Err(GraphError::DuplicateEdge(Edge(0, 2))));
        assert!(matches!(h.add_edge(0, 3), Err(GraphError::VertexOutOfRange { .. })));
        assert_eq!(h.remove_edge(0, 1), Err(GraphError::MissingEdge(Edge(0, 1))));
    }

    #[test]
    fn difference_of_matchings() {
        let a = g(4, &[(0, 1), (2, 3)]);
        let b = g(4, &[(0, 2), (1, 3)]);
        let d = symmetric_difference(&a, &b).unwrap();
        assert_eq!(d.blue, vec![Edge(0, 1), Edge(2, 3)]);
        assert_eq!(d.red, vec![Edge(0, 2), Edge(1, 3)]);
        assert!(d.is_balanced());
        assert!(symmetric_difference(&a, &a).unwrap().is_empty());
    }

    #[test]
    fn membership_examples() {
        let inst = Instance::Degree(DegreeSequence::new(vec![1, 1]).unwrap());
        assert_eq!(classify_membership(&g(2, &[(0, 1)]), &inst).tag, MembershipTag::Exact);
        assert_eq!(classify_membership(&g(2, &[]), &inst).tag, MembershipTag::PerturbedWithin);

        // c12 = 2 but the graph has 4 cut edges.
        let pam = PamInstance::new(2, 2, 0, 2, 0, vec![1, 1, 1, 1]).unwrap();
        let k22 = g(4, &[(0, 2), (0, 3), (1, 2), (1, 3)]);
        assert_eq!(classify_membership(&k22, &Instance::Pam(pam)).tag, MembershipTag::Outside);
    }

    #[test]
    fn mask_roundtrip() {
        let h = g(6, &[(0, 5), (1, 2), (3, 4), (2, 5)]);
        let m = MaskGraph::from_graph(&h).unwrap();
        assert_eq!(m.sorted_edges(), h.sorted_edges());
        assert_eq!(MaskGraph::from_mask(6, m.mask()), m);
        assert_eq!(m.to_labeled(), h);
        assert_eq!(m.degrees(), h.degrees());
        assert_eq!(m.neighbors(5), vec![0, 2]);
    }

    #[test]
    fn edge_list_roundtrip() {
        let h = g(5, &[(0, 4), (1, 2), (3, 4)]);
        let text = h.to_edge_list();
        assert_eq!(LabeledGraph::parse_edge_list(&text).unwrap(), h);
        assert!(LabeledGraph::parse_edge_list("3 2\n0 1\n").is_err());
    }

    #[test]
    fn instance_json() {
        let inst = Instance::from_json(r#"{"kind":"pam","d":[3,4],"classes":[6,5],"matrix":[[7,4],[4,8]]}"#).unwrap();
        match &inst {
            Instance::Pam(p) => {
                assert!(p.is_jdm());
                assert_eq!(p.d, vec![3, 3, 3, 3, 3, 3, 4, 4, 4, 4, 4]);
            }
            _ => panic!(),
        }
        assert_eq!(Instance::from_json(&inst.to_json()).unwrap(), inst);
        assert!(matches!(Instance::from_json(r#"{"kind":"degree","d":[1,2]}"#), Err(InstanceError::OddSum(3))));
    }
}

//! Pairings, circuit decompositions and canonical paths between two
//! realizations, plus their encodings.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::graphcore::{Edge, GraphError, GraphView, LabeledGraph, Vertex};
use crate::statespace::StateSpaceError;

mod hinge;
mod js;
mod landscape;
mod switch;

pub use hinge::{
    hinge_canonical_path, pam_encoding, pam_encoding_at, pam_recover_count, section_segment_decomposition, HingeStep,
    Section, Segment, SegmentDecomposition,
};
pub use js::{js_canonical_path, js_encoding, js_encoding_at, js_recover, JsStep, JsType};
pub use landscape::{is_traversal, landscape, traverse, Landscape, Piece, Traversal, TRAVERSAL_CONSTANT};
pub use switch::{restricted_switch_distance_check, switch_path, SwitchCheck, SwitchMove};

pub use crate::graphcore::{symmetric_difference, ColoredDifference};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CanonicalError {
    #[error("red and blue degrees differ at vertex {0}")]
    Unbalanced(Vertex),
    #[error("pairing does not match the difference: {0}")]
    InvalidPairing(String),
    #[error("realizations do not belong to the same instance")]
    InstanceMismatch,
    #[error("transition is not on the canonical path")]
    TransitionNotOnPath,
    #[error("not an encoding: {0}")]
    NotAnEncoding(String),
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
    #[error("states are disconnected in the chain")]
    Disconnected,
    #[error("no switch sequence found: {0}")]
    NoSwitchPath(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    StateSpace(#[from] StateSpaceError),
}

/// At every vertex, a perfect matching between incident red and blue edges
/// of a difference. Stored colourless as a symmetric partner map so the
/// same value can be used before the colours are known.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Pairing {
    partner: BTreeMap<(Vertex, Edge), Edge>,
}

impl Pairing {
    /// Build from (vertex, red, blue) triples.
    pub fn from_triples(triples: impl IntoIterator<Item = (Vertex, Edge, Edge)>) -> Pairing {
        let mut partner = BTreeMap::new();
        for (v, r, b) in triples {
            partner.insert((v, r), b);
            partner.insert((v, b), r);
        }
        Pairing { partner }
    }

    pub fn partner(&self, v: Vertex, e: Edge) -> Option<Edge> {
        self.partner.get(&(v, e)).copied()
    }

    /// Edges the pairing is defined on.
    pub fn edges(&self) -> BTreeSet<Edge> {
        self.partner.keys().map(|&(_, e)| e).collect()
    }

    /// Whether this is a pairing of `diff`: every incidence covered, each
    /// partner pair one red and one blue edge.
    pub fn check(&self, diff: &ColoredDifference) -> Result<(), CanonicalError> {
        let blue: BTreeSet<Edge> = diff.blue.iter().copied().collect();
        let red: BTreeSet<Edge> = diff.red.iter().copied().collect();
        if self.partner.len() != 2 * diff.len() {
            return Err(CanonicalError::InvalidPairing("wrong number of incidences".into()));
        }
        for (&(v, e), &f) in &self.partner {
            let ok_colors = (blue.contains(&e) && red.contains(&f)) || (red.contains(&e) && blue.contains(&f));
            if !e.contains(v) || !f.contains(v) || !ok_colors {
                return Err(CanonicalError::InvalidPairing(format!("{e} and {f} at {v}")));
            }
        }
        Ok(())
    }

    /// (vertex, red, blue) triples in sorted order.
    pub fn triples(&self, diff: &ColoredDifference) -> Vec<(Vertex, Edge, Edge)> {
        let red: BTreeSet<Edge> = diff.red.iter().copied().collect();
        self.partner.iter().filter(|(&(_, e), _)| red.contains(&e)).map(|(&(v, e), &f)| (v, e, f)).collect()
    }
}

fn incident(edges: &[Edge], v: Vertex) -> Vec<Edge> {
    edges.iter().copied().filter(|e| e.contains(v)).collect()
}

fn check_balanced(diff: &ColoredDifference) -> Result<(), CanonicalError> {
    let (b, r) = (diff.blue_degree(), diff.red_degree());
    match (0..diff.n).find(|&v| b[v] != r[v]) {
        Some(v) => Err(CanonicalError::Unbalanced(v)),
        None => Ok(()),
    }
}

/// |Ψ| = Π θ_v!.
pub fn pairing_count(diff: &ColoredDifference) -> Result<u128, CanonicalError> {
    check_balanced(diff)?;
    Ok(diff.red_degree().iter().map(|&t| (1..=t as u128).product::<u128>()).product())
}

/// Every pairing of `diff`, in a fixed order. The empty difference has
/// exactly one (empty) pairing.
pub fn enumerate_pairings(diff: &ColoredDifference) -> Result<Box<dyn Iterator<Item = Pairing>>, CanonicalError> {
    check_balanced(diff)?;
    if diff.is_empty() {
        return Ok(Box::new(std::iter::once(Pairing::from_triples(std::iter::empty()))));
    }
    let theta = diff.red_degree();
    let per_vertex: Vec<Vec<Vec<(Vertex, Edge, Edge)>>> = (0..diff.n)
        .filter(|&v| theta[v] > 0)
        .map(|v| {
            let reds = incident(&diff.red, v);
            let blues = incident(&diff.blue, v);
            blues
                .iter()
                .copied()
                .permutations(blues.len())
                .map(|perm| reds.iter().zip(perm).map(|(&r, b)| (v, r, b)).collect())
                .collect()
        })
        .collect();
    Ok(Box::new(
        per_vertex.into_iter().multi_cartesian_product().map(|choice| Pairing::from_triples(choice.into_iter().flatten())),
    ))
}

pub fn pairings_of(diff: &ColoredDifference) -> Result<Vec<Pairing>, CanonicalError> {
    Ok(enumerate_pairings(diff)?.collect())
}

/// Uniform pairing: an independent uniform matching at every vertex.
pub fn sample_pairing<R: Rng + ?Sized>(diff: &ColoredDifference, rng: &mut R) -> Result<Pairing, CanonicalError> {
    check_balanced(diff)?;
    let mut triples = Vec::new();
    for v in 0..diff.n {
        let reds = incident(&diff.red, v);
        let mut blues = incident(&diff.blue, v);
        blues.shuffle(rng);
        triples.extend(reds.into_iter().zip(blues).map(|(r, b)| (v, r, b)));
    }
    Ok(Pairing::from_triples(triples))
}

/// Closed alternating walk `x_0 x_1 … x_L` with `x_L = x_0`. Edge `i` is
/// `{x_i, x_{i+1}}`; even edges are blue, odd edges red.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Circuit {
    pub walk: Vec<Vertex>,
}

impl Circuit {
    /// Number of edges.
    pub fn len(&self) -> usize {
        self.walk.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn start(&self) -> Vertex {
        self.walk[0]
    }

    pub fn edge(&self, i: usize) -> Edge {
        Edge::new(self.walk[i], self.walk[i + 1])
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        (0..self.len()).map(|i| self.edge(i))
    }

    pub fn blue(&self) -> impl Iterator<Item = Edge> + '_ {
        (0..self.len()).step_by(2).map(|i| self.edge(i))
    }

    pub fn red(&self) -> impl Iterator<Item = Edge> + '_ {
        (1..self.len()).step_by(2).map(|i| self.edge(i))
    }
}

/// Colourless closed walks of the pairing over `edges`, in discovery
/// order: each starts from the smallest unused edge. Returned as cyclic
/// edge sequences with their vertex walks.
fn raw_circuits(edges: &BTreeSet<Edge>, psi: &Pairing) -> Result<Vec<Vec<Vertex>>, CanonicalError> {
    let mut used = BTreeSet::new();
    let mut out = Vec::new();
    for &e0 in edges {
        if used.contains(&e0) {
            continue;
        }
        let mut walk = vec![e0.lo(), e0.hi()];
        used.insert(e0);
        let mut cur = e0;
        loop {
            let v = *walk.last().unwrap();
            let next = psi.partner(v, cur).ok_or_else(|| CanonicalError::InvalidPairing(format!("{cur} unpaired at {v}")))?;
            if next == e0 {
                break;
            }
            if !used.insert(next) {
                return Err(CanonicalError::InvalidPairing(format!("{next} reached twice")));
            }
            walk.push(next.other(v));
            cur = next;
        }
        if *walk.last().unwrap() != walk[0] {
            return Err(CanonicalError::InvalidPairing("walk does not close".into()));
        }
        out.push(walk);
    }
    Ok(out)
}

/// Rotate/orient a closed walk so that it starts with `anchor`, traversed
/// from its smaller endpoint.
fn anchor_walk(walk: &[Vertex], anchor: Edge) -> Vec<Vertex> {
    let l = walk.len() - 1;
    let cyc = &walk[..l];
    for i in 0..l {
        let (a, b) = (cyc[i], cyc[(i + 1) % l]);
        if Edge::new(a, b) == anchor {
            let mut w: Vec<Vertex> = if a == anchor.lo() {
                (0..=l).map(|k| cyc[(i + k) % l]).collect()
            } else {
                (0..=l).map(|k| cyc[(i + 1 + l - k) % l]).collect()
            };
            w[l] = w[0];
            return w;
        }
    }
    unreachable!("anchor lies on the walk")
}

/// Anchor a colourless walk given the blue edge set.
fn colour_circuit(walk: &[Vertex], is_blue: impl Fn(Edge) -> bool) -> Circuit {
    let anchor = walk.windows(2).map(|w| Edge::new(w[0], w[1])).filter(|&e| is_blue(e)).min().expect("circuit has a blue edge");
    Circuit { walk: anchor_walk(walk, anchor) }
}

/// Canonical decomposition of `diff` under `psi`: repeatedly start at the
/// lexicographically smallest unused edge and follow the pairing. Circuits
/// are ordered by their smallest edge; each starts at the smaller endpoint
/// of its smallest blue edge and traverses that edge first.
pub fn circuit_decomposition(diff: &ColoredDifference, psi: &Pairing) -> Result<Vec<Circuit>, CanonicalError> {
    psi.check(diff)?;
    let blue: BTreeSet<Edge> = diff.blue.iter().copied().collect();
    let all: BTreeSet<Edge> = diff.blue.iter().chain(&diff.red).copied().collect();
    Ok(raw_circuits(&all, psi)?.iter().map(|w| colour_circuit(w, |e| blue.contains(&e))).collect())
}

/// A path of states `states[0] → … → states[len]` with one step record per
/// transition, plus the circuit decomposition it was built from.
#[derive(Clone, Debug)]
pub struct CanonicalPath<S> {
    pub states: Vec<LabeledGraph>,
    pub steps: Vec<S>,
    pub circuits: Vec<Circuit>,
}

impl<S> CanonicalPath<S> {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Index of the transition (z, z2), if it is on the path.
    pub fn position(&self, z: &LabeledGraph, z2: &LabeledGraph) -> Option<usize> {
        self.states.windows(2).position(|w| &w[0] == z && &w[1] == z2)
    }
}

/// A graph value encoding the transition (z, z2).
#[derive(Clone, Debug, PartialEq)]
pub struct Encoding {
    pub l: LabeledGraph,
    pub z: LabeledGraph,
    pub z2: LabeledGraph,
}

/// Edge set of a graph as a sorted set.
pub(crate) fn edge_set<G: GraphView>(g: &G) -> BTreeSet<Edge> {
    g.sorted_edges().into_iter().collect()
}

pub(crate) fn graph_from_set(n: usize, s: &BTreeSet<Edge>) -> LabeledGraph {
    LabeledGraph::from_edges(n, s.iter().map(|e| (e.lo(), e.hi()))).expect("edge set is simple")
}

pub(crate) fn sym_diff(a: &BTreeSet<Edge>, b: &BTreeSet<Edge>) -> BTreeSet<Edge> {
    a.symmetric_difference(b).copied().collect()
}

/// Recover (G, G′) from a state `z` on the path, the difference H and a
/// colouring of each circuit (`blue_even[i]`: even positions of raw walk i
/// are blue).
pub(crate) fn pair_from_colouring(
    n: usize,
    z: &BTreeSet<Edge>,
    h: &BTreeSet<Edge>,
    walks: &[Vec<Vertex>],
    blue_even: &[bool],
) -> (LabeledGraph, LabeledGraph) {
    let common: BTreeSet<Edge> = z.difference(h).copied().collect();
    let mut g = common.clone();
    let mut g2 = common;
    for (w, &be) in walks.iter().zip(blue_even) {
        for (i, p) in w.windows(2).enumerate() {
            let e = Edge::new(p[0], p[1]);
            if (i % 2 == 0) == be {
                g.insert(e);
            } else {
                g2.insert(e);
            }
        }
    }
    (graph_from_set(n, &g), graph_from_set(n, &g2))
}

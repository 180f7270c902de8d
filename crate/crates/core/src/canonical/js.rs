//! Circuit processing for the Jerrum–Sinclair chain and its encoding.

use std::collections::BTreeSet;

use serde::Serialize;

use super::{
    circuit_decomposition, edge_set, graph_from_set, pair_from_colouring, raw_circuits, sym_diff, CanonicalError,
    CanonicalPath, Encoding, Pairing,
};
use crate::graphcore::{symmetric_difference, Edge, GraphView, LabeledGraph};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum JsType {
    /// Delete an edge from an exact state.
    Type0,
    /// Add an edge at a deficit vertex and delete a compensating edge.
    Type1,
    /// Add an edge between deficit vertices.
    Type2,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JsStep {
    pub kind: JsType,
    pub added: Option<Edge>,
    pub removed: Option<Edge>,
    pub circuit: usize,
    /// e_{H,t}: the blue edge deleted by the most recent Type 0 step.
    pub anchor: Edge,
}

/// Canonical JS path from `g` to `g2` for pairing `psi`. Circuits are
/// processed in order; along a circuit, red edges are added and blue edges
/// deleted alternately. Whenever the walk re-enters its start vertex while
/// that vertex still has a deficit, the addition is a Type 2 step and the
/// next deletion starts afresh with Type 0.
pub fn js_canonical_path(g: &LabeledGraph, g2: &LabeledGraph, psi: &Pairing) -> Result<CanonicalPath<JsStep>, CanonicalError> {
    if g.order() != g2.order() || g.degrees() != g2.degrees() {
        return Err(CanonicalError::InstanceMismatch);
    }
    let diff = symmetric_difference(g, g2)?;
    let circuits = circuit_decomposition(&diff, psi)?;
    let target: Vec<i64> = g.degrees().iter().map(|&d| d as i64).collect();
    let mut cur = g.clone();
    let mut states = vec![cur.clone()];
    let mut steps = Vec::new();
    let deficit = |h: &LabeledGraph, v: usize| target[v] - h.degree(v) as i64;
    for (ci, c) in circuits.iter().enumerate() {
        let len = c.len();
        let mut anchor = c.edge(0);
        let mut t = 0;
        while t < len {
            let exact = (0..cur.order()).all(|v| deficit(&cur, v) == 0);
            let step = if exact {
                debug_assert!(t % 2 == 0);
                anchor = c.edge(t);
                t += 1;
                JsStep { kind: JsType::Type0, added: None, removed: Some(anchor), circuit: ci, anchor }
            } else {
                let add = c.edge(t);
                let (i, j) = (c.walk[t], c.walk[t + 1]);
                if deficit(&cur, i) <= 0 {
                    return Err(CanonicalError::InvariantViolation(format!("vertex {i} has no deficit")));
                }
                if deficit(&cur, j) > 0 {
                    t += 1;
                    JsStep { kind: JsType::Type2, added: Some(add), removed: None, circuit: ci, anchor }
                } else {
                    let rem = c.edge(t + 1);
                    t += 2;
                    JsStep { kind: JsType::Type1, added: Some(add), removed: Some(rem), circuit: ci, anchor }
                }
            };
            if let Some(e) = step.removed {
                cur.remove_edge(e.lo(), e.hi())?;
            }
            if let Some(e) = step.added {
                cur.add_edge(e.lo(), e.hi())?;
            }
            states.push(cur.clone());
            steps.push(step);
        }
    }
    Ok(CanonicalPath { states, steps, circuits })
}

/// Encoding of transition `idx` of `path`, where `h` is the edge set of
/// G △ G′: L = H △ (Z ∪ Z′), minus e_{H,t} for Type 1 steps.
pub fn js_encoding_at(path: &CanonicalPath<JsStep>, h: &BTreeSet<Edge>, idx: usize) -> Encoding {
    let (z, z2) = (&path.states[idx], &path.states[idx + 1]);
    let union: BTreeSet<Edge> = edge_set(z).union(&edge_set(z2)).copied().collect();
    let mut l = sym_diff(h, &union);
    if path.steps[idx].kind == JsType::Type1 {
        l.remove(&path.steps[idx].anchor);
    }
    Encoding { l: graph_from_set(z.order(), &l), z: z.clone(), z2: z2.clone() }
}

/// Encoding of the transition (z, z2) on the canonical path of (g, g2, psi).
pub fn js_encoding(
    z: &LabeledGraph,
    z2: &LabeledGraph,
    g: &LabeledGraph,
    g2: &LabeledGraph,
    psi: &Pairing,
) -> Result<Encoding, CanonicalError> {
    let path = js_canonical_path(g, g2, psi)?;
    let idx = path.position(z, z2).ok_or(CanonicalError::TransitionNotOnPath)?;
    let h = sym_diff(&edge_set(g), &edge_set(g2));
    Ok(js_encoding_at(&path, &h, idx))
}

/// Recover (G, G′) from a transition, its encoding and the pairing. The
/// colours are inferred: the changed edges fix the current circuit, and
/// earlier (processed) / later (unprocessed) circuits are read off Z. The
/// result is re-encoded to reject anything that is not an encoding.
pub fn js_recover(
    z: &LabeledGraph,
    z2: &LabeledGraph,
    l: &LabeledGraph,
    psi: &Pairing,
) -> Result<(LabeledGraph, LabeledGraph), CanonicalError> {
    let bad = |m: &str| CanonicalError::NotAnEncoding(m.into());
    let n = z.order();
    let (zs, z2s) = (edge_set(z), edge_set(z2));
    let union: BTreeSet<Edge> = zs.union(&z2s).copied().collect();
    let mut h = sym_diff(&edge_set(l), &union);
    let mut odd_deg = vec![0usize; n];
    for e in &h {
        odd_deg[e.lo()] ^= 1;
        odd_deg[e.hi()] ^= 1;
    }
    let odd: Vec<usize> = (0..n).filter(|&v| odd_deg[v] == 1).collect();
    match odd.len() {
        0 => {}
        2 => {
            if !h.insert(Edge::new(odd[0], odd[1])) {
                return Err(bad("compensating edge already present"));
            }
        }
        _ => return Err(bad("wrong number of odd-degree vertices")),
    }
    if h.is_empty() {
        return Err(bad("empty difference"));
    }
    if psi.edges() != h {
        return Err(bad("pairing does not cover the recovered difference"));
    }
    let walks = raw_circuits(&h, psi)?;
    let removed: Vec<Edge> = zs.difference(&z2s).copied().collect();
    let added: Vec<Edge> = z2s.difference(&zs).copied().collect();
    let pos_in = |w: &Vec<usize>, e: Edge| w.windows(2).position(|p| Edge::new(p[0], p[1]) == e);
    let current = walks
        .iter()
        .position(|w| removed.iter().chain(&added).any(|&e| pos_in(w, e).is_some()))
        .ok_or_else(|| bad("transition does not touch the difference"))?;
    let mut blue_even = Vec::with_capacity(walks.len());
    for (i, w) in walks.iter().enumerate() {
        let be = if i == current {
            match removed.iter().find_map(|&e| pos_in(w, e)) {
                Some(p) => p % 2 == 0,
                None => added.iter().find_map(|&e| pos_in(w, e)).expect("current circuit touched") % 2 == 1,
            }
        } else {
            let p = w
                .windows(2)
                .position(|p| zs.contains(&Edge::new(p[0], p[1])))
                .ok_or_else(|| bad("circuit has no edge in Z"))?;
            // Processed circuits keep their red edges, unprocessed their blue.
            (p % 2 == 0) == (i > current)
        };
        blue_even.push(be);
    }
    let (g, g2) = pair_from_colouring(n, &zs, &h, &walks, &blue_even);
    let enc = js_encoding(z, z2, &g, &g2, psi).map_err(|_| bad("recovered pair does not use the transition"))?;
    if enc.l != *l {
        return Err(bad("re-encoding differs"));
    }
    Ok((g, g2))
}

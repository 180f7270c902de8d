//! Constructive switch sequences and restricted-switch distances.

use std::collections::BTreeSet;

use serde::Serialize;

use super::{edge_set, CanonicalError};
use crate::chains::{ChainKind, ChainSpec};
use crate::graphcore::{Edge, GraphView, Instance, LabeledGraph, PamInstance};
use crate::statespace::{bfs, enumerate, state_graph, Guard};

/// Replace `removed` by `added` (two disjoint edges on the same four
/// vertices).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SwitchMove {
    pub removed: [Edge; 2],
    pub added: [Edge; 2],
}

impl SwitchMove {
    pub fn apply(&self, g: &mut LabeledGraph) -> Result<(), CanonicalError> {
        g.apply(&self.removed, &self.added)?;
        Ok(())
    }
}

struct Search {
    cur: BTreeSet<Edge>,
    target: BTreeSet<Edge>,
}

impl Search {
    /// Legal switches removing `e1` and `e2`.
    fn switches(&self, e1: Edge, e2: Edge) -> impl Iterator<Item = SwitchMove> + '_ {
        let (a, b, x, y) = (e1.lo(), e1.hi(), e2.lo(), e2.hi());
        let options = if a != x && a != y && b != x && b != y {
            vec![(Edge::new(a, x), Edge::new(b, y)), (Edge::new(a, y), Edge::new(b, x))]
        } else {
            Vec::new()
        };
        options
            .into_iter()
            .filter(|(f1, f2)| !self.cur.contains(f1) && !self.cur.contains(f2))
            .map(move |(f1, f2)| SwitchMove { removed: [e1, e2], added: [f1, f2] })
    }

    /// Decrease of |cur △ target| caused by `m`.
    fn gain(&self, m: &SwitchMove) -> i32 {
        let r: i32 = m.removed.iter().map(|e| if self.target.contains(e) { -1 } else { 1 }).sum();
        let a: i32 = m.added.iter().map(|e| if self.target.contains(e) { 1 } else { -1 }).sum();
        r + a
    }

    fn apply(&mut self, m: &SwitchMove) {
        for e in &m.removed {
            self.cur.remove(e);
        }
        self.cur.extend(m.added);
    }

    fn undo(&mut self, m: &SwitchMove) {
        for e in &m.added {
            self.cur.remove(e);
        }
        self.cur.extend(m.removed);
    }

    /// Switches with the given gain that remove at least one surplus edge
    /// (any switch with positive gain does).
    fn with_gain(&self, gain: i32) -> Vec<SwitchMove> {
        let bad: Vec<Edge> = self.cur.difference(&self.target).copied().collect();
        let mut out = Vec::new();
        for (p, &e1) in bad.iter().enumerate() {
            for &e2 in &self.cur {
                if bad[..=p].contains(&e2) {
                    continue;
                }
                out.extend(self.switches(e1, e2).filter(|m| self.gain(m) == gain));
            }
        }
        out
    }

    fn all(&self) -> Vec<SwitchMove> {
        let edges: Vec<Edge> = self.cur.iter().copied().collect();
        let mut out = Vec::new();
        for p in 0..edges.len() {
            for q in p + 1..edges.len() {
                out.extend(self.switches(edges[p], edges[q]));
            }
        }
        out
    }

    /// Up to three switches whose total gain is at least twice their number.
    fn lookahead(&mut self) -> Option<Vec<SwitchMove>> {
        for m1 in self.all() {
            let g1 = self.gain(&m1);
            if g1 < -2 {
                continue;
            }
            self.apply(&m1);
            let mut found = None;
            'second: for g2 in [4, 2] {
                if g1 + g2 < 2 {
                    continue;
                }
                for m2 in self.with_gain(g2) {
                    if g1 + g2 >= 4 {
                        found = Some(vec![m1, m2]);
                        break 'second;
                    }
                    self.apply(&m2);
                    let third = self.with_gain(4).into_iter().next();
                    self.undo(&m2);
                    if let Some(m3) = third.filter(|_| g1 + g2 + 4 >= 6) {
                        found = Some(vec![m1, m2, m3]);
                        break 'second;
                    }
                }
            }
            self.undo(&m1);
            if found.is_some() {
                return found;
            }
        }
        None
    }
}

/// Switch sequence turning `h` into `h2`. Greedy: take a switch that
/// removes four difference edges if there is one, else two; when neither
/// exists, search up to three switches ahead for a sequence with average
/// gain at least two. The result therefore has at most ½|E(H) △ E(H′)|
/// moves.
pub fn switch_path(h: &LabeledGraph, h2: &LabeledGraph) -> Result<Vec<SwitchMove>, CanonicalError> {
    if h.order() != h2.order() || h.degrees() != h2.degrees() {
        return Err(CanonicalError::InstanceMismatch);
    }
    let mut s = Search { cur: edge_set(h), target: edge_set(h2) };
    let mut moves = Vec::new();
    while s.cur != s.target {
        let next = s.with_gain(4).into_iter().next().or_else(|| s.with_gain(2).into_iter().next());
        let batch = match next {
            Some(m) => vec![m],
            None => s.lookahead().ok_or_else(|| {
                CanonicalError::NoSwitchPath(format!("stuck with {} differing edges", s.cur.symmetric_difference(&s.target).count()))
            })?,
        };
        for m in batch {
            s.apply(&m);
            moves.push(m);
        }
    }
    Ok(moves)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SwitchCheck {
    pub distance: usize,
    pub delta: usize,
    /// distance ≤ (3/2)·delta.
    pub holds: bool,
}

/// Exact restricted-switch distance between `h` and `h2` by BFS over the
/// enumerated space of `inst`.
pub fn restricted_switch_distance_check(
    h: &LabeledGraph,
    h2: &LabeledGraph,
    inst: &PamInstance,
    guard: Guard,
) -> Result<SwitchCheck, CanonicalError> {
    let instance = Instance::Pam(inst.clone());
    let space = enumerate(&instance, false, guard)?;
    let spec = ChainSpec::new(ChainKind::RestrictedSwitch, instance, 0).map_err(|_| CanonicalError::InstanceMismatch)?;
    let adj = state_graph(&spec, &space)?;
    let (a, b) = match (space.id_of(h), space.id_of(h2)) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(CanonicalError::InstanceMismatch),
    };
    let distance = bfs(&adj, &[a])[b];
    if distance == usize::MAX {
        return Err(CanonicalError::Disconnected);
    }
    let delta = edge_set(h).symmetric_difference(&edge_set(h2)).count();
    Ok(SwitchCheck { distance, delta, holds: 2 * distance <= 3 * delta })
}

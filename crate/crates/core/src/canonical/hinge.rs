//! Sections, segments and the hinge-flip canonical path, with its encoding.

use std::collections::BTreeSet;

use serde::Serialize;

use super::landscape::{landscape, traverse, Landscape};
use super::{
    circuit_decomposition, edge_set, graph_from_set, pair_from_colouring, raw_circuits, sym_diff, CanonicalError,
    CanonicalPath, Circuit, Encoding, Pairing,
};
use crate::graphcore::{cut_count, symmetric_difference, Edge, GraphView, LabeledGraph, PamInstance, Vertex};

/// Walk positions `start..=end` of circuit `circuit`, with the cut-count
/// change `l` of its last hinge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Section {
    pub circuit: usize,
    pub start: usize,
    pub end: usize,
    pub l: i64,
}

/// Consecutive sections, ending at the first one with nonzero `l`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Segment {
    pub sections: Vec<usize>,
    pub l: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SegmentDecomposition {
    pub sections: Vec<Section>,
    pub segments: Vec<Segment>,
}

impl SegmentDecomposition {
    pub fn l_values(&self) -> Vec<i64> {
        self.segments.iter().map(|s| s.l).collect()
    }
}

/// Cut-count change of the hinge ending at position `r`: it swaps edge
/// `r−2` (blue) for edge `r−1` (red).
fn hinge_l(c: &Circuit, inst: &PamInstance, r: usize) -> i64 {
    inst.is_cut(c.edge(r - 1)) as i64 - inst.is_cut(c.edge(r - 2)) as i64
}

/// Split every circuit at the positions r (even) whose hinge changes the cut
/// count, then group sections into segments. A trailing zero section joins
/// the preceding segment; with no nonzero section at all there is a single
/// segment with `l = 0`.
pub fn section_segment_decomposition(circuits: &[Circuit], inst: &PamInstance) -> SegmentDecomposition {
    let mut sections = Vec::new();
    for (ci, c) in circuits.iter().enumerate() {
        let mut start = 0;
        for r in (2..=c.len()).step_by(2) {
            let l = hinge_l(c, inst, r);
            if l != 0 {
                sections.push(Section { circuit: ci, start, end: r, l });
                start = r;
            }
        }
        if start != c.len() {
            sections.push(Section { circuit: ci, start, end: c.len(), l: 0 });
        }
    }
    let mut segments: Vec<Segment> = Vec::new();
    let mut open: Vec<usize> = Vec::new();
    for (si, s) in sections.iter().enumerate() {
        open.push(si);
        if s.l != 0 {
            segments.push(Segment { sections: std::mem::take(&mut open), l: s.l });
        }
    }
    if !open.is_empty() {
        match segments.last_mut() {
            Some(last) => last.sections.extend(open),
            None => segments.push(Segment { sections: open, l: 0 }),
        }
    }
    SegmentDecomposition { sections, segments }
}

/// One hinge flip: remove {i, j}, add {j, k}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct HingeStep {
    pub i: Vertex,
    pub j: Vertex,
    pub k: Vertex,
    /// 0-based segment index.
    pub segment: usize,
    pub unwinding: bool,
}

struct Builder<'a> {
    circuits: &'a [Circuit],
    dec: &'a SegmentDecomposition,
    cur: LabeledGraph,
    states: Vec<LabeledGraph>,
    steps: Vec<HingeStep>,
}

impl Builder<'_> {
    fn flip(&mut self, step: HingeStep) -> Result<(), CanonicalError> {
        self.cur.remove_edge(step.i, step.j)?;
        self.cur.add_edge(step.j, step.k)?;
        self.states.push(self.cur.clone());
        self.steps.push(step);
        Ok(())
    }

    /// Unwind (or rewind) 0-based segment `seg`.
    fn segment(&mut self, seg: usize, unwinding: bool) -> Result<(), CanonicalError> {
        let secs = self.dec.segments[seg].sections.clone();
        let mut order: Vec<usize> = secs;
        if !unwinding {
            order.reverse();
        }
        for si in order {
            let s = self.dec.sections[si];
            let w = &self.circuits[s.circuit].walk;
            let mut rs: Vec<usize> = (s.start + 2..=s.end).step_by(2).collect();
            if !unwinding {
                rs.reverse();
            }
            for r in rs {
                let (i, j, k) = if unwinding { (w[r - 2], w[r - 1], w[r]) } else { (w[r], w[r - 1], w[r - 2]) };
                self.flip(HingeStep { i, j, k, segment: seg, unwinding })?;
            }
        }
        Ok(())
    }
}

/// The hinge-flip path from `g` to `g2` built from the landscape of the
/// segment decomposition: each mountain/valley is processed along its
/// traversal, unwinding or rewinding one segment on each side per move.
/// Also returns the landscape used.
pub fn hinge_canonical_path(
    g: &LabeledGraph,
    g2: &LabeledGraph,
    inst: &PamInstance,
    psi: &Pairing,
) -> Result<(CanonicalPath<HingeStep>, Landscape), CanonicalError> {
    let exact = |h: &LabeledGraph| {
        h.order() == inst.order()
            && h.degrees().iter().zip(&inst.d).all(|(a, b)| *a as u32 == *b)
            && cut_count(h, inst) == inst.c12
    };
    if !exact(g) || !exact(g2) {
        return Err(CanonicalError::InstanceMismatch);
    }
    let diff = symmetric_difference(g, g2)?;
    let circuits = circuit_decomposition(&diff, psi)?;
    let mut b = Builder {
        circuits: &circuits,
        dec: &section_segment_decomposition(&circuits, inst),
        cur: g.clone(),
        states: vec![g.clone()],
        steps: Vec::new(),
    };
    if circuits.is_empty() {
        let land = Landscape { p: vec![0], pieces: vec![] };
        return Ok((CanonicalPath { states: b.states, steps: b.steps, circuits }, land));
    }
    let land = landscape(&b.dec.l_values())?;
    for piece in &land.pieces {
        if piece.sign == 0 {
            for seg in piece.a..piece.b {
                b.segment(seg, true)?;
            }
            continue;
        }
        let tr = traverse(&land.p, piece)?;
        for w in tr.pairs.windows(2) {
            let ((r0, s0), (r1, s1)) = (w[0], w[1]);
            // Segment S_x (1-based) is index x − 1.
            if r1 > r0 {
                b.segment(r1 - 1, true)?;
            } else {
                b.segment(r0 - 1, false)?;
            }
            if s1 > s0 {
                b.segment(s1 - 1, true)?;
            } else {
                b.segment(s0 - 1, false)?;
            }
        }
    }
    if b.cur != *g2 {
        return Err(CanonicalError::InvariantViolation("hinge path does not reach the target".into()));
    }
    let Builder { states, steps, .. } = b;
    Ok((CanonicalPath { states, steps, circuits }, land))
}

/// Encoding L = (G △ G′) △ Z of transition `idx`.
pub fn pam_encoding_at(path: &CanonicalPath<HingeStep>, h: &BTreeSet<Edge>, idx: usize) -> Encoding {
    let (z, z2) = (&path.states[idx], &path.states[idx + 1]);
    let l = sym_diff(h, &edge_set(z));
    Encoding { l: graph_from_set(z.order(), &l), z: z.clone(), z2: z2.clone() }
}

pub fn pam_encoding(
    z: &LabeledGraph,
    z2: &LabeledGraph,
    g: &LabeledGraph,
    g2: &LabeledGraph,
    inst: &PamInstance,
    psi: &Pairing,
) -> Result<Encoding, CanonicalError> {
    let (path, _) = hinge_canonical_path(g, g2, inst, psi)?;
    let idx = path.position(z, z2).ok_or(CanonicalError::TransitionNotOnPath)?;
    let h = sym_diff(&edge_set(g), &edge_set(g2));
    Ok(pam_encoding_at(&path, &h, idx))
}

/// Largest number of circuits for which [`pam_recover_count`] tries every
/// colouring.
const MAX_RECOVER_CIRCUITS: usize = 16;

/// Every pair (G, G′) of exact states whose canonical path (for `psi`) uses
/// the transition (z, z2) and encodes it as `l`. The candidates are the 2^s
/// colourings of the circuits of H = L △ Z.
pub fn pam_recover_count(
    z: &LabeledGraph,
    z2: &LabeledGraph,
    l: &LabeledGraph,
    inst: &PamInstance,
    psi: &Pairing,
) -> Result<Vec<(LabeledGraph, LabeledGraph)>, CanonicalError> {
    let bad = |m: &str| CanonicalError::NotAnEncoding(m.into());
    let zs = edge_set(z);
    let h = sym_diff(&edge_set(l), &zs);
    if h.is_empty() {
        return Err(bad("empty difference"));
    }
    if psi.edges() != h {
        return Err(bad("pairing does not cover the recovered difference"));
    }
    let walks = raw_circuits(&h, psi)?;
    if walks.len() > MAX_RECOVER_CIRCUITS {
        return Err(CanonicalError::InvariantViolation(format!("{} circuits is too many to enumerate", walks.len())));
    }
    let mut out = Vec::new();
    for mask in 0u32..1 << walks.len() {
        let blue_even: Vec<bool> = (0..walks.len()).map(|i| mask >> i & 1 == 1).collect();
        let (g, g2) = pair_from_colouring(z.order(), &zs, &h, &walks, &blue_even);
        if let Ok(enc) = pam_encoding(z, z2, &g, &g2, inst, psi) {
            if enc.l == *l {
                out.push((g, g2));
            }
        }
    }
    Ok(out)
}

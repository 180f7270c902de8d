//! Graphicality tests and initial realizations.

use serde::Serialize;
use thiserror::Error;

use crate::graphcore::{BipartiteInstance, DegreeSequence, Instance, LabeledGraph, PamInstance, Vertex};

/// Which feasibility stage rejected a PAM instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum RealizeStage {
    /// A class cannot hold the requested number of internal edges, or the
    /// cut count exceeds |V1||V2|.
    CapacityBound,
    /// No split of degrees into internal and cut parts satisfies
    /// Erdős–Gallai on both sides and Gale–Ryser across.
    SplitSearchExhausted { class1_splits: usize, class2_splits: usize },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RealizeError {
    #[error("degree sequence is not graphical (Erdős–Gallai fails at k = {k})")]
    NotGraphical { k: usize },
    #[error("bipartite degrees are not realizable (Gale–Ryser fails at k = {k})")]
    NotBipartiteGraphical { k: usize },
    #[error("instance not realizable: {0:?}")]
    NotRealizable(RealizeStage),
}

/// First k (1-based) at which the Erdős–Gallai inequality fails, if any.
/// Parity failure is reported as k = 0.
pub fn erdos_gallai_witness(d: &[u32]) -> Option<usize> {
    let mut s: Vec<u64> = d.iter().map(|&x| x as u64).collect();
    if s.iter().sum::<u64>() % 2 == 1 {
        return Some(0);
    }
    s.sort_unstable_by(|a, b| b.cmp(a));
    let n = s.len();
    let mut lhs = 0u64;
    for k in 1..=n {
        lhs += s[k - 1];
        let k64 = k as u64;
        let rhs = k64 * (k64 - 1) + s[k..].iter().map(|&x| x.min(k64)).sum::<u64>();
        if lhs > rhs {
            return Some(k);
        }
    }
    None
}

/// Erdős–Gallai test; entries may be zero here (used for internal parts).
pub fn is_graphical(d: &[u32]) -> bool {
    erdos_gallai_witness(d).is_none()
}

pub fn is_graphical_degree(d: &DegreeSequence) -> bool {
    is_graphical(&d.0)
}

fn gale_ryser_witness(r: &[u32], c: &[u32]) -> Option<usize> {
    let sr: u64 = r.iter().map(|&x| x as u64).sum();
    let sc: u64 = c.iter().map(|&x| x as u64).sum();
    if sr != sc {
        return Some(0);
    }
    let mut rs: Vec<u64> = r.iter().map(|&x| x as u64).collect();
    rs.sort_unstable_by(|a, b| b.cmp(a));
    let mut lhs = 0u64;
    for k in 1..=rs.len() {
        lhs += rs[k - 1];
        let rhs: u64 = c.iter().map(|&x| (x as u64).min(k as u64)).sum();
        if lhs > rhs {
            return Some(k);
        }
    }
    None
}

/// Gale–Ryser test for a bipartite degree pair (zeros allowed).
pub fn is_bigraphical(r: &[u32], c: &[u32]) -> bool {
    gale_ryser_witness(r, c).is_none()
}

pub fn is_graphical_bipartite(inst: &BipartiteInstance) -> bool {
    is_bigraphical(&inst.r, &inst.c)
}

/// Havel–Hakimi on vertices `verts` (global labels) with residual degrees
/// `d`, adding edges to `g`.
fn havel_hakimi_into(g: &mut LabeledGraph, verts: &[Vertex], d: &[u32]) -> Result<(), RealizeError> {
    let mut rem: Vec<(u32, Vertex)> = d.iter().copied().zip(verts.iter().copied()).collect();
    loop {
        // Largest residual first; ties broken by lowest label.
        rem.sort_unstable_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        if rem.is_empty() || rem[0].0 == 0 {
            return Ok(());
        }
        let (k, v) = rem[0];
        let k = k as usize;
        if k >= rem.len() || rem[k].0 == 0 {
            let w = erdos_gallai_witness(d).unwrap_or(0);
            return Err(RealizeError::NotGraphical { k: w });
        }
        for item in rem.iter_mut().skip(1).take(k) {
            g.add_edge(v, item.1).expect("havel-hakimi adds fresh edges");
            item.0 -= 1;
        }
        rem[0].0 = 0;
    }
}

pub fn realize_degree(d: &DegreeSequence) -> Result<LabeledGraph, RealizeError> {
    if let Some(k) = erdos_gallai_witness(&d.0) {
        return Err(RealizeError::NotGraphical { k });
    }
    let mut g = LabeledGraph::empty(d.len());
    let verts: Vec<Vertex> = (0..d.len()).collect();
    havel_hakimi_into(&mut g, &verts, &d.0)?;
    Ok(g)
}

/// Greedy bipartite construction: every row links to the columns with the
/// largest residual demand. Correct for any row order when Gale–Ryser holds.
fn bipartite_into(g: &mut LabeledGraph, rows: &[Vertex], r: &[u32], cols: &[Vertex], c: &[u32]) -> Result<(), RealizeError> {
    if let Some(k) = gale_ryser_witness(r, c) {
        return Err(RealizeError::NotBipartiteGraphical { k });
    }
    let mut res: Vec<(u32, Vertex)> = c.iter().copied().zip(cols.iter().copied()).collect();
    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.sort_by(|&a, &b| r[b].cmp(&r[a]).then(a.cmp(&b)));
    for i in order {
        res.sort_unstable_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        let k = r[i] as usize;
        if k > res.len() || (k > 0 && res[k - 1].0 == 0) {
            return Err(RealizeError::NotBipartiteGraphical { k: 0 });
        }
        for item in res.iter_mut().take(k) {
            g.add_edge(rows[i], item.1).expect("fresh bipartite edge");
            item.0 -= 1;
        }
    }
    Ok(())
}

pub fn realize_bipartite(inst: &BipartiteInstance) -> Result<LabeledGraph, RealizeError> {
    let m = inst.r.len();
    let mut g = LabeledGraph::empty(inst.order());
    let rows: Vec<Vertex> = (0..m).collect();
    let cols: Vec<Vertex> = (m..inst.order()).collect();
    bipartite_into(&mut g, &rows, &inst.r, &cols, &inst.c)?;
    Ok(g)
}

/// All cut-degree vectors for one class whose internal remainder is
/// graphical, summing to `cut` with internal sum `2*internal`. Vertices of
/// equal degree get non-increasing cut degrees (symmetry breaking).
fn class_splits(d: &[u32], other: usize, cut: u64, internal: u64) -> Vec<Vec<u32>> {
    let n = d.len();
    let mut out = Vec::new();
    let mut b = vec![0u32; n];
    fn rec(
        i: usize,
        d: &[u32],
        other: usize,
        left: u64,
        b: &mut Vec<u32>,
        out: &mut Vec<Vec<u32>>,
        internal: u64,
    ) {
        let n = d.len();
        if i == n {
            if left == 0 {
                let a: Vec<u32> = d.iter().zip(b.iter()).map(|(&x, &y)| x - y).collect();
                if a.iter().map(|&x| x as u64).sum::<u64>() == 2 * internal && is_graphical(&a) {
                    out.push(b.clone());
                }
            }
            return;
        }
        let lo = d[i].saturating_sub((n - 1) as u32);
        let mut hi = d[i].min(other as u32);
        if i > 0 && d[i - 1] == d[i] {
            hi = hi.min(b[i - 1]);
        }
        let rest_max: u64 = (i + 1..n).map(|j| d[j].min(other as u32) as u64).sum();
        for x in lo..=hi {
            let x64 = x as u64;
            if x64 > left || left - x64 > rest_max {
                continue;
            }
            b[i] = x;
            rec(i + 1, d, other, left - x64, b, out, internal);
        }
    }
    rec(0, d, other, cut, &mut b, &mut out, internal);
    out
}

/// Realize a two-class instance by searching degree splits into internal and
/// cut parts; the search is exhaustive, so failure is a certificate.
pub fn realize_pam(inst: &PamInstance) -> Result<LabeledGraph, RealizeError> {
    let (n1, n2) = (inst.n1 as u64, inst.n2 as u64);
    if inst.c12 > n1 * n2 || inst.c11 > n1 * n1.saturating_sub(1) / 2 || inst.c22 > n2 * n2.saturating_sub(1) / 2 {
        return Err(RealizeError::NotRealizable(RealizeStage::CapacityBound));
    }
    // Sort each class by degree so equal degrees are adjacent for symmetry
    // breaking; remember the permutation.
    let sorted_class = |class: usize| -> Vec<Vertex> {
        let mut v: Vec<Vertex> = inst.class_range(class).collect();
        v.sort_by(|&a, &b| inst.d[b].cmp(&inst.d[a]).then(a.cmp(&b)));
        v
    };
    let v1 = sorted_class(0);
    let v2 = sorted_class(1);
    let d1: Vec<u32> = v1.iter().map(|&v| inst.d[v]).collect();
    let d2: Vec<u32> = v2.iter().map(|&v| inst.d[v]).collect();
    let s1 = class_splits(&d1, inst.n2, inst.c12, inst.c11);
    let s2 = class_splits(&d2, inst.n1, inst.c12, inst.c22);
    for b1 in &s1 {
        for b2 in &s2 {
            if !is_bigraphical(b1, b2) {
                continue;
            }
            let mut g = LabeledGraph::empty(inst.order());
            let a1: Vec<u32> = d1.iter().zip(b1).map(|(x, y)| x - y).collect();
            let a2: Vec<u32> = d2.iter().zip(b2).map(|(x, y)| x - y).collect();
            havel_hakimi_into(&mut g, &v1, &a1)?;
            havel_hakimi_into(&mut g, &v2, &a2)?;
            bipartite_into(&mut g, &v1, b1, &v2, b2)?;
            return Ok(g);
        }
    }
    Err(RealizeError::NotRealizable(RealizeStage::SplitSearchExhausted {
        class1_splits: s1.len(),
        class2_splits: s2.len(),
    }))
}

pub fn realize(inst: &Instance) -> Result<LabeledGraph, RealizeError> {
    match inst {
        Instance::Degree(d) => realize_degree(d),
        Instance::Bipartite(b) => realize_bipartite(b),
        Instance::Pam(p) => realize_pam(p),
    }
}

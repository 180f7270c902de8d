//! Landscape functions, their mountain/valley split and traversals.

use std::collections::VecDeque;

use serde::Serialize;

use super::CanonicalError;

/// Empirical constant `C` with `moves ≤ C·(t−a)(b−t)` for every traversal
/// produced by [`traverse`] on landscape functions with `B ≤ 16`, where
/// `moves` is the number of steps (pairs − 1). Checked exhaustively by the
/// test suite.
pub const TRAVERSAL_CONSTANT: usize = 1;

/// A maximal mountain (`sign = 1`) or valley (`sign = −1`) on `{a..b}` with
/// first top `top`. `sign = 0` marks the flat warm-up piece.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Piece {
    pub a: usize,
    pub b: usize,
    pub top: usize,
    pub sign: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Landscape {
    pub p: Vec<i64>,
    pub pieces: Vec<Piece>,
}

/// P(0) = 0, P(i) = l_1 + … + l_i, split at zeros. Unit steps are required
/// except for the single all-zero case (P ≡ 0 on {0, 1}).
pub fn landscape(l: &[i64]) -> Result<Landscape, CanonicalError> {
    let bad = |m: String| Err(CanonicalError::InvariantViolation(m));
    let mut p = vec![0i64];
    for &x in l {
        p.push(p.last().unwrap() + x);
    }
    if *p.last().unwrap() != 0 {
        return bad(format!("landscape ends at {}", p.last().unwrap()));
    }
    if l.len() == 1 && l[0] == 0 {
        return Ok(Landscape { p, pieces: vec![Piece { a: 0, b: 1, top: 0, sign: 0 }] });
    }
    if let Some(i) = l.iter().position(|x| x.abs() != 1) {
        return bad(format!("step {} of the landscape is {}", i + 1, l[i]));
    }
    let mut pieces = Vec::new();
    let mut a = 0;
    for b in 1..p.len() {
        if p[b] == 0 {
            let sign = p[a + 1].signum();
            let top = (a..=b).max_by_key(|&i| (p[i].abs(), std::cmp::Reverse(i))).unwrap();
            pieces.push(Piece { a, b, top, sign });
            a = b;
        }
    }
    Ok(Landscape { p, pieces })
}

/// Sequence of index pairs from (a, t) to (t, b).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Traversal {
    pub pairs: Vec<(usize, usize)>,
}

impl Traversal {
    /// Number of moves.
    pub fn moves(&self) -> usize {
        self.pairs.len().saturating_sub(1)
    }
}

const MOVES: [(isize, isize); 4] = [(1, 1), (1, -1), (-1, 1), (-1, -1)];

/// Shortest traversal of `piece`: breadth-first search over pairs (i, j)
/// with a ≤ i ≤ t ≤ j ≤ b and P(i) + P(j) = P(t), moving both indices by
/// one each step.
pub fn traverse(p: &[i64], piece: &Piece) -> Result<Traversal, CanonicalError> {
    let Piece { a, b, top: t, .. } = *piece;
    let w = b - t + 1;
    let idx = |i: usize, j: usize| (i - a) * w + (j - t);
    let ok = |i: isize, j: isize| {
        i >= a as isize && i <= t as isize && j >= t as isize && j <= b as isize && p[i as usize] + p[j as usize] == p[t]
    };
    let mut prev = vec![usize::MAX; (t - a + 1) * w];
    let start = (a, t);
    let goal = (t, b);
    prev[idx(a, t)] = idx(a, t);
    let mut queue = VecDeque::from([start]);
    while let Some((i, j)) = queue.pop_front() {
        if (i, j) == goal {
            break;
        }
        for (di, dj) in MOVES {
            let (ni, nj) = (i as isize + di, j as isize + dj);
            if ok(ni, nj) {
                let (ni, nj) = (ni as usize, nj as usize);
                if prev[idx(ni, nj)] == usize::MAX {
                    prev[idx(ni, nj)] = idx(i, j);
                    queue.push_back((ni, nj));
                }
            }
        }
    }
    if prev[idx(t, b)] == usize::MAX {
        return Err(CanonicalError::InvariantViolation(format!("no traversal of piece {a}..{b}")));
    }
    let mut pairs = vec![goal];
    let mut cur = idx(t, b);
    while cur != idx(a, t) {
        cur = prev[cur];
        pairs.push((a + cur / w, t + cur % w));
    }
    pairs.reverse();
    Ok(Traversal { pairs })
}

/// Checks the traversal properties: endpoints (a,t) and (t,b), unit moves in
/// both coordinates, constant height sum P(i)+P(j) = P(t), side confinement,
/// and minimality (no pair repeats and no two non-consecutive pairs are one
/// move apart, so no proper subsequence is a traversal).
pub fn is_traversal(p: &[i64], piece: &Piece, tr: &Traversal) -> bool {
    let Piece { a, b, top: t, .. } = *piece;
    let pr = &tr.pairs;
    if pr.first() != Some(&(a, t)) || pr.last() != Some(&(t, b)) {
        return false;
    }
    let adjacent = |x: (usize, usize), y: (usize, usize)| x.0.abs_diff(y.0) == 1 && x.1.abs_diff(y.1) == 1;
    let confined = pr.iter().all(|&(i, j)| a <= i && i <= t && t <= j && j <= b && p[i] + p[j] == p[t]);
    let steps = pr.windows(2).all(|w| adjacent(w[0], w[1]));
    let minimal = (0..pr.len()).all(|r| (r + 1..pr.len()).all(|s| pr[r] != pr[s] && (s == r + 1 || !adjacent(pr[r], pr[s]))));
    confined && steps && minimal
}

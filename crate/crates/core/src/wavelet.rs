//! Dynamic wavelet tree over an insert-only sequence of values.
//!
//! Each node splits its value range in half and stores one bit per element
//! saying which half it belongs to; children hold the subsequence of their
//! half. Besides positional insertion and access, the tree enumerates a few
//! candidate positions inside a rectangle (position range x value range),
//! which is all the factorizer needs from it: any three distinct candidates
//! contain a usable one. Candidates are deterministic — the first matches in
//! position order plus the last one — so a naive mirror can predict them.

use crate::bits::DynBitVec;

pub const NONE: u32 = u32::MAX;

#[derive(Debug)]
struct WNode {
    lo: u64,
    hi: u64,
    child: [u32; 2],
    bv: DynBitVec,
}

#[derive(Debug)]
pub struct WaveletTree {
    nodes: Vec<WNode>,
    root: u32,
}

impl WaveletTree {
    /// Values will lie in `[0, max_value]`; `max_value >= 1`.
    pub fn new(max_value: u64) -> Self {
        debug_assert!(max_value >= 1);
        let root = WNode { lo: 0, hi: max_value, child: [NONE, NONE], bv: DynBitVec::new() };
        WaveletTree { nodes: vec![root], root: 0 }
    }

    pub fn len(&self) -> usize {
        self.nodes[self.root as usize].bv.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Total bits stored across all levels.
    pub fn total_bits(&self) -> usize {
        self.nodes.iter().map(|n| n.bv.len()).sum()
    }

    pub fn insert(&mut self, mut pos: usize, val: u64) {
        let mut v = self.root;
        loop {
            let n = &mut self.nodes[v as usize];
            debug_assert!(n.lo <= val && val <= n.hi && pos <= n.bv.len());
            let mid = n.lo + (n.hi - n.lo) / 2;
            let bit = val > mid;
            n.bv.insert(pos, bit);
            let (clo, chi) = if bit { (mid + 1, n.hi) } else { (n.lo, mid) };
            if clo == chi {
                return;
            }
            pos = self.nodes[v as usize].bv.rank(pos, bit);
            v = self.child_or_create(v, bit as usize, clo, chi);
        }
    }

    /// Value at 1-based position `i`.
    pub fn access(&self, mut i: usize) -> u64 {
        let mut v = self.root;
        loop {
            let n = &self.nodes[v as usize];
            let mid = n.lo + (n.hi - n.lo) / 2;
            let bit = n.bv.access(i);
            let (clo, chi) = if bit { (mid + 1, n.hi) } else { (n.lo, mid) };
            if clo == chi {
                return clo;
            }
            i = n.bv.rank(i - 1, bit) + 1;
            v = n.child[bit as usize];
        }
    }

    /// Up to `limit` distinct 1-based positions within `[p1, p2]` holding
    /// values in `[vlo, vhi]`: the first `limit - 1` matches in position
    /// order plus the last match (all matches when fewer than `limit`).
    /// Returns the positions and an operation count (node visits plus
    /// bit-vector steps) for budget instrumentation.
    pub fn range_candidates(
        &self,
        p1: usize,
        p2: usize,
        vlo: u64,
        vhi: u64,
        limit: usize,
    ) -> (Vec<usize>, usize) {
        debug_assert!(limit >= 1);
        debug_assert!(p1 >= 1 && p2 <= self.len() || p1 > p2);
        let mut visited = 0usize;
        let mut out = Vec::with_capacity(limit);
        if p1 > p2 || vlo > vhi {
            return (out, visited);
        }
        let last = match self.extremal_match(self.root, p1, p2, vlo, vhi, true, &mut visited) {
            Some(p) => p,
            None => return (out, visited),
        };
        let mut cur = p1;
        while out.len() + 1 < limit {
            match self.extremal_match(self.root, cur, p2, vlo, vhi, false, &mut visited) {
                Some(p) if p < last => {
                    out.push(p);
                    cur = p + 1;
                }
                _ => break,
            }
        }
        out.push(last);
        (out, visited)
    }

    fn child_or_create(&mut self, v: u32, side: usize, clo: u64, chi: u64) -> u32 {
        let existing = self.nodes[v as usize].child[side];
        if existing != NONE {
            return existing;
        }
        self.nodes.push(WNode { lo: clo, hi: chi, child: [NONE, NONE], bv: DynBitVec::new() });
        let id = (self.nodes.len() - 1) as u32;
        self.nodes[v as usize].child[side] = id;
        id
    }

    /// Extremal (first if `last` is false, else last) node-local position in
    /// `[q1, q2]` whose value lies in `[vlo, vhi]`. Answers come back in the
    /// caller's coordinates: each recursion level re-maps its child's answer
    /// through one select. At most two nodes per level straddle a value
    /// boundary, so the visit count stays linear in the tree depth.
    #[allow(clippy::too_many_arguments)]
    fn extremal_match(
        &self,
        v: u32,
        q1: usize,
        q2: usize,
        vlo: u64,
        vhi: u64,
        last: bool,
        visited: &mut usize,
    ) -> Option<usize> {
        if q1 > q2 {
            return None;
        }
        *visited += 1;
        let n = &self.nodes[v as usize];
        if vhi < n.lo || n.hi < vlo {
            return None;
        }
        if vlo <= n.lo && n.hi <= vhi {
            return Some(if last { q2 } else { q1 });
        }
        let mid = n.lo + (n.hi - n.lo) / 2;
        let mut best: Option<usize> = None;
        if vlo <= mid {
            let l1 = n.bv.rank(q1 - 1, false) + 1;
            let l2 = n.bv.rank(q2, false);
            *visited += 1;
            if l1 <= l2 {
                // A single-value half is always fully in or out, so the
                // recursive arm only runs where a child node exists.
                let sub = if vlo <= n.lo && mid <= vhi {
                    Some(if last { l2 } else { l1 })
                } else {
                    self.extremal_match(n.child[0], l1, l2, vlo, vhi.min(mid), last, visited)
                };
                if let Some(p) = sub {
                    best = Some(n.bv.select(p, false));
                    *visited += 1;
                }
            }
        }
        if vhi > mid {
            let r1 = n.bv.rank(q1 - 1, true) + 1;
            let r2 = n.bv.rank(q2, true);
            *visited += 1;
            if r1 <= r2 {
                let sub = if vlo <= mid + 1 && n.hi <= vhi {
                    Some(if last { r2 } else { r1 })
                } else {
                    self.extremal_match(n.child[1], r1, r2, vlo.max(mid + 1), vhi, last, visited)
                };
                if let Some(p) = sub {
                    let up = n.bv.select(p, true);
                    *visited += 1;
                    if best.map_or(true, |b| if last { up > b } else { up < b }) {
                        best = Some(up);
                    }
                }
            }
        }
        best
    }
}

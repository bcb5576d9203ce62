//! Online suffix tree over the sequence of packed blocks.
//!
//! Built one block at a time (Ukkonen's scheme), with three synchronized side
//! structures: a crit-bit child index per internal vertex ([`NavTrie`]), an
//! order-maintenance list of the depth-first traversal ([`OrderIndex`]), and
//! a wavelet tree over the leaves' keys in traversal order. A leaf's key is
//! the bit-reversed block preceding its suffix (or a sentinel for the first
//! suffix), so "occurrence preceded by a given character string" becomes a
//! value-range query aligned with the leaf-rank order.
//!
//! Mutations are reported as [`Event`]s so a caller holding a position inside
//! the tree across an update can repair it.

use crate::nav::NavTrie;
use crate::order::{OrderIndex, KIND_CLOSE, KIND_LEAF, KIND_OPEN};
use crate::params::{extract_char, pack_block, reversed, Code, Params};
use crate::wavelet::WaveletTree;

pub const NONE: u32 = u32::MAX;
pub const ROOT: u32 = 0;
const OPEN: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Event {
    /// The edge `parent -> child` was split; `mid` now owns its first
    /// `upper_blocks` blocks and `child` hangs below `mid`.
    Split { parent: u32, mid: u32, child: u32, upper_blocks: u32 },
    /// A new suffix leaf appeared under `parent`.
    NewLeaf { parent: u32, leaf: u32 },
}

#[derive(Debug)]
struct Vert {
    parent: u32,
    /// Edge from the parent: 1-based block positions `[edge_start, edge_end]`,
    /// with `edge_end == OPEN` for leaves (the edge grows with the text).
    edge_start: u32,
    edge_end: u32,
    link: u32,
    /// Child index keyed by each child edge's first block (internal only).
    nav: NavTrie,
    /// Traversal-list marks: open/close for internal vertices, the single
    /// leaf entry (twice) for leaves.
    el_first: u32,
    el_last: u32,
    /// 1-based block index of the suffix this leaf spells; NONE if internal.
    suffix_block: u32,
    /// Smallest suffix block among the leaves below (inclusive). Leaves are
    /// created in increasing suffix order, so this never needs propagation:
    /// a new leaf can only lower its direct parent's value.
    min_sb: u32,
}

#[derive(Debug)]
pub struct SuffixTree {
    verts: Vec<Vert>,
    blocks: Vec<u64>,
    order: OrderIndex,
    wavelet: WaveletTree,
    events: Vec<Event>,
    // Construction state.
    active_node: u32,
    active_edge_pos: u32,
    active_len: u32,
    remainder: u32,
    need_sl: u32,
    leaf_count: u32,
    // Geometry.
    r: usize,
    bpc: u32,
    w: u32,
    sentinel: u64,
}

impl SuffixTree {
    pub fn new(params: &Params) -> Self {
        let mut order = OrderIndex::new();
        let ef = order.insert_first(KIND_OPEN, ROOT, 0);
        let el = order.insert_after(ef, KIND_CLOSE, ROOT, 0);
        let root = Vert {
            parent: NONE,
            edge_start: 0,
            edge_end: 0,
            link: NONE,
            nav: NavTrie::new(params.w),
            el_first: ef,
            el_last: el,
            suffix_block: NONE,
            min_sb: NONE,
        };
        SuffixTree {
            verts: vec![root],
            blocks: Vec::new(),
            order,
            wavelet: WaveletTree::new(params.sentinel()),
            events: Vec::new(),
            active_node: ROOT,
            active_edge_pos: 0,
            active_len: 0,
            remainder: 0,
            need_sl: NONE,
            leaf_count: 0,
            r: params.r,
            bpc: params.bpc,
            w: params.w,
            sentinel: params.sentinel(),
        }
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[u64] {
        &self.blocks
    }

    pub fn leaf_count(&self) -> usize {
        self.leaf_count as usize
    }

    pub fn vertex_count(&self) -> usize {
        self.verts.len()
    }

    pub fn wavelet_bits(&self) -> usize {
        self.wavelet.total_bits()
    }

    pub fn is_leaf(&self, v: u32) -> bool {
        self.verts[v as usize].suffix_block != NONE
    }

    pub fn parent(&self, v: u32) -> u32 {
        self.verts[v as usize].parent
    }

    /// 1-based block index of a leaf's suffix.
    pub fn suffix_block(&self, v: u32) -> usize {
        debug_assert!(self.is_leaf(v));
        self.verts[v as usize].suffix_block as usize
    }

    /// Text position where a leaf's suffix starts.
    pub fn border_of_leaf(&self, v: u32) -> usize {
        self.r * (self.suffix_block(v) - 1) + 1
    }

    pub fn child_by_block(&self, v: u32, key: u64) -> Option<u32> {
        self.verts[v as usize].nav.find(key)
    }

    pub fn nav(&self, v: u32) -> &NavTrie {
        &self.verts[v as usize].nav
    }

    /// Whether the suffix starting at block `j` (1-based) has its own leaf.
    /// Leaves appear in suffix order, so this is a count comparison.
    pub fn is_block_suffix_leaf(&self, j: usize) -> bool {
        j >= 1 && j <= self.leaf_count as usize
    }

    /// Earliest block index whose suffix begins with `blocks[j..=end]`
    /// (1-based, inclusive). The range is part of the indexed string, so its
    /// path exists; the walk skips over whole edges by length.
    pub fn earliest_block_with_prefix(&self, j: usize, end: usize) -> usize {
        debug_assert!(j >= 1 && j <= end && end <= self.blocks.len());
        let mut node = ROOT;
        let mut pos = j;
        loop {
            let child = self.verts[node as usize]
                .nav
                .find(self.blocks[pos - 1])
                .expect("a block range of the text lies on a tree path");
            let elen = self.edge_blocks(child) as usize;
            #[cfg(debug_assertions)]
            {
                let es = self.verts[child as usize].edge_start as usize;
                for k in 0..elen.min(end - pos + 1) {
                    debug_assert_eq!(self.blocks[es - 1 + k], self.blocks[pos - 1 + k]);
                }
            }
            if pos + elen > end {
                return self.verts[child as usize].min_sb as usize;
            }
            node = child;
            pos += elen;
        }
    }

    /// First and last child of `v` whose edge begins with the given
    /// character prefix (shorter than one block), or `None` when no edge
    /// does. The prefix is matched on the packed key bits alone, which the
    /// keys' uniqueness makes exact.
    pub fn child_span(&self, v: u32, prefix: &[Code]) -> Option<(u32, u32)> {
        debug_assert!(!prefix.is_empty() && prefix.len() < self.r);
        let bits = prefix.len() as u32 * self.bpc;
        let key = pack_block(prefix, self.bpc) << (self.w - bits);
        let nav = &self.verts[v as usize].nav;
        let cur = nav.refeed(key, bits as u8)?;
        Some(nav.span(&cur))
    }

    fn edge_blocks(&self, v: u32) -> u32 {
        let vt = &self.verts[v as usize];
        if vt.edge_end == OPEN {
            self.blocks.len() as u32 - vt.edge_start + 1
        } else {
            vt.edge_end - vt.edge_start + 1
        }
    }

    /// Length of the edge above `v` in characters (grows for leaves).
    pub fn edge_span_chars(&self, v: u32) -> usize {
        self.edge_blocks(v) as usize * self.r
    }

    /// Character at 0-based offset `d` within the edge above `v`.
    pub fn edge_char(&self, v: u32, d: usize) -> Code {
        debug_assert!(d < self.edge_span_chars(v));
        let es = self.verts[v as usize].edge_start as usize;
        let block = self.blocks[es - 1 + d / self.r];
        extract_char(block, d % self.r, self.r, self.bpc)
    }

    /// Leaf-rank interval covered by the subtree of `v` (1-based, inclusive).
    pub fn rank_span_vertex(&self, v: u32) -> (usize, usize) {
        let vt = &self.verts[v as usize];
        (
            self.order.leaves_before(vt.el_first) + 1,
            self.order.leaves_through(vt.el_last),
        )
    }

    /// Leaf-rank interval from the subtree of `vmin` through that of `vmax`
    /// (children of one vertex, in key order).
    pub fn rank_span_pair(&self, vmin: u32, vmax: u32) -> (usize, usize) {
        (
            self.order.leaves_before(self.verts[vmin as usize].el_first) + 1,
            self.order.leaves_through(self.verts[vmax as usize].el_last),
        )
    }

    /// Searches ranks `[lo, hi]` for a leaf whose key falls in
    /// `[c_min, c_max]` and whose border passes the occurrence filters:
    /// not the excluded border, at least `y_len + 1`, and starting at or
    /// before `occ_cap` once shifted back by `y_len`. Inspecting three
    /// candidates is enough: at most one candidate border can exceed the
    /// cap and at most one equals the excluded border.
    pub fn exist(
        &self,
        lo: usize,
        hi: usize,
        c_min: u64,
        c_max: u64,
        y_len: usize,
        excluded_border: usize,
        occ_cap: usize,
    ) -> Option<usize> {
        if lo > hi {
            return None;
        }
        let (cands, _) = self.wavelet.range_candidates(lo, hi, c_min, c_max, 3);
        for rank in cands {
            let e = self.order.kth_leaf(rank);
            let b = self.order.border(e);
            if b != excluded_border && b > y_len && b - y_len <= occ_cap {
                return Some(b);
            }
        }
        None
    }

    /// Borders and suffix blocks of the leaves with ranks `[lo, hi]`, in
    /// rank order. Test and audit helper; linear in the range size.
    pub fn leaf_entries(&self, lo: usize, hi: usize) -> Vec<(usize, usize)> {
        (lo..=hi.min(self.leaf_count as usize))
            .map(|k| {
                let e = self.order.kth_leaf(k);
                let v = self.order.vertex(e);
                (self.order.border(e), self.suffix_block(v))
            })
            .collect()
    }

    /// Appends one block and updates all structures. The returned events
    /// describe every topology change, in order.
    pub fn extend(&mut self, block: u64) -> &[Event] {
        debug_assert!(block < self.sentinel);
        self.events.clear();
        self.blocks.push(block);
        let pos = self.blocks.len() as u32;
        self.need_sl = NONE;
        self.remainder += 1;
        while self.remainder > 0 {
            if self.active_len == 0 {
                self.active_edge_pos = pos;
            }
            let key = self.blocks[self.active_edge_pos as usize - 1];
            match self.verts[self.active_node as usize].nav.find(key) {
                None => {
                    debug_assert_eq!(self.active_len, 0, "active point must sit on a vertex");
                    self.add_leaf(self.active_node, pos);
                    let an = self.active_node;
                    self.add_suffix_link(an);
                }
                Some(child) => {
                    let elen = self.edge_blocks(child);
                    if self.active_len >= elen {
                        self.active_node = child;
                        self.active_edge_pos += elen;
                        self.active_len -= elen;
                        continue;
                    }
                    let es = self.verts[child as usize].edge_start;
                    if self.blocks[(es + self.active_len) as usize - 1] == block {
                        self.active_len += 1;
                        let an = self.active_node;
                        self.add_suffix_link(an);
                        break;
                    }
                    let mid = self.split_edge(child, self.active_len);
                    self.add_leaf(mid, pos);
                    self.add_suffix_link(mid);
                }
            }
            self.remainder -= 1;
            if self.active_node == ROOT && self.active_len > 0 {
                self.active_len -= 1;
                self.active_edge_pos = pos - self.remainder + 1;
            } else if self.active_node != ROOT {
                let link = self.verts[self.active_node as usize].link;
                self.active_node = if link == NONE { ROOT } else { link };
            }
        }
        &self.events
    }

    fn add_suffix_link(&mut self, v: u32) {
        if self.need_sl != NONE {
            self.verts[self.need_sl as usize].link = v;
        }
        self.need_sl = v;
    }

    fn alloc(&mut self, v: Vert) -> u32 {
        self.verts.push(v);
        (self.verts.len() - 1) as u32
    }

    fn add_leaf(&mut self, parent: u32, edge_start: u32) {
        let sb = self.blocks.len() as u32 - self.remainder + 1;
        self.leaf_count += 1;
        debug_assert_eq!(sb, self.leaf_count, "leaves appear in suffix order");
        let leaf = self.alloc(Vert {
            parent,
            edge_start,
            edge_end: OPEN,
            link: NONE,
            nav: NavTrie::new(self.w),
            el_first: NONE,
            el_last: NONE,
            suffix_block: sb,
            min_sb: sb,
        });
        let pm = &mut self.verts[parent as usize].min_sb;
        *pm = (*pm).min(sb);
        let key = self.blocks[edge_start as usize - 1];
        let (pred, succ) = self.verts[parent as usize].nav.insert(key, leaf);
        let border = (self.r as u32) * (sb - 1) + 1;
        let entry = match (pred, succ) {
            (Some(p), _) => {
                let anchor = self.verts[p as usize].el_last;
                self.order.insert_after(anchor, KIND_LEAF, leaf, border)
            }
            (None, Some(s)) => {
                let anchor = self.verts[s as usize].el_first;
                self.order.insert_before(anchor, KIND_LEAF, leaf, border)
            }
            (None, None) => {
                let anchor = self.verts[parent as usize].el_first;
                self.order.insert_after(anchor, KIND_LEAF, leaf, border)
            }
        };
        self.verts[leaf as usize].el_first = entry;
        self.verts[leaf as usize].el_last = entry;
        let rank = self.order.leaf_rank(entry);
        let key_val = if sb == 1 {
            self.sentinel
        } else {
            reversed(self.blocks[sb as usize - 2], self.w)
        };
        self.wavelet.insert(rank - 1, key_val);
        self.events.push(Event::NewLeaf { parent, leaf });
    }

    fn split_edge(&mut self, child: u32, upper_blocks: u32) -> u32 {
        debug_assert!(upper_blocks >= 1 && upper_blocks < self.edge_blocks(child));
        let parent = self.verts[child as usize].parent;
        let es = self.verts[child as usize].edge_start;
        let mid = self.alloc(Vert {
            parent,
            edge_start: es,
            edge_end: es + upper_blocks - 1,
            link: NONE,
            nav: NavTrie::new(self.w),
            el_first: NONE,
            el_last: NONE,
            suffix_block: NONE,
            min_sb: self.verts[child as usize].min_sb,
        });
        self.verts[child as usize].edge_start = es + upper_blocks;
        self.verts[child as usize].parent = mid;
        self.verts[parent as usize].nav.set_payload(self.blocks[es as usize - 1], mid);
        let lower_key = self.blocks[(es + upper_blocks) as usize - 1];
        self.verts[mid as usize].nav.insert(lower_key, child);
        let cf = self.verts[child as usize].el_first;
        let cl = self.verts[child as usize].el_last;
        let mo = self.order.insert_before(cf, KIND_OPEN, mid, 0);
        let mc = self.order.insert_after(cl, KIND_CLOSE, mid, 0);
        self.verts[mid as usize].el_first = mo;
        self.verts[mid as usize].el_last = mc;
        self.events.push(Event::Split { parent, mid, child, upper_blocks });
        mid
    }

    /// Traversal list as (kind, vertex) pairs; test and diagnostics helper.
    pub fn traversal(&self) -> Vec<(u8, u32)> {
        self.order
            .entries_in_order()
            .iter()
            .map(|&e| (self.order.kind(e), self.order.vertex(e)))
            .collect()
    }

    /// Key of the leaf at a given rank, straight from the wavelet tree;
    /// test helper.
    pub fn leaf_key_at_rank(&self, rank: usize) -> u64 {
        self.wavelet.access(rank)
    }
}

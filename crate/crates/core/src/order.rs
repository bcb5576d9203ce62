//! Order-maintenance list for the suffix tree's traversal sequence.
//!
//! The sequence holds, in depth-first order, an opening and closing mark for
//! every internal vertex and one entry per suffix leaf. A balanced binary
//! tree over the sequence answers, in logarithmic time, how many leaf entries
//! precede a given entry (the leaf's rank, which indexes the wavelet tree)
//! and which entry holds a given rank. Entries are only ever inserted.

pub const NONE: u32 = u32::MAX;

pub const KIND_INTERNAL: u8 = 0;
pub const KIND_OPEN: u8 = 1;
pub const KIND_CLOSE: u8 = 2;
pub const KIND_LEAF: u8 = 3;

#[derive(Debug)]
struct Node {
    parent: u32,
    child: [u32; 2],
    height: u8,
    /// Leaf entries (KIND_LEAF) in this subtree; for an entry, 1 or 0.
    leaves: u32,
    kind: u8,
    /// Suffix-tree vertex this entry belongs to.
    vertex: u32,
    /// Text position of the suffix for KIND_LEAF entries.
    border: u32,
}

#[derive(Debug)]
pub struct OrderIndex {
    nodes: Vec<Node>,
    root: u32,
}

impl OrderIndex {
    pub fn new() -> Self {
        OrderIndex { nodes: Vec::new(), root: NONE }
    }

    /// Total number of KIND_LEAF entries.
    pub fn leaf_count(&self) -> usize {
        if self.root == NONE {
            0
        } else {
            self.nodes[self.root as usize].leaves as usize
        }
    }

    pub fn kind(&self, e: u32) -> u8 {
        self.nodes[e as usize].kind
    }

    pub fn vertex(&self, e: u32) -> u32 {
        self.nodes[e as usize].vertex
    }

    pub fn border(&self, e: u32) -> usize {
        self.nodes[e as usize].border as usize
    }

    /// First entry of an empty list.
    pub fn insert_first(&mut self, kind: u8, vertex: u32, border: u32) -> u32 {
        debug_assert_eq!(self.root, NONE);
        let e = self.alloc_entry(kind, vertex, border);
        self.root = e;
        e
    }

    pub fn insert_after(&mut self, anchor: u32, kind: u8, vertex: u32, border: u32) -> u32 {
        self.insert_beside(anchor, kind, vertex, border, 1)
    }

    pub fn insert_before(&mut self, anchor: u32, kind: u8, vertex: u32, border: u32) -> u32 {
        self.insert_beside(anchor, kind, vertex, border, 0)
    }

    /// Number of KIND_LEAF entries strictly before `e` in list order.
    pub fn leaves_before(&self, e: u32) -> usize {
        let mut count = 0usize;
        let mut cur = e;
        loop {
            let p = self.nodes[cur as usize].parent;
            if p == NONE {
                return count;
            }
            let pn = &self.nodes[p as usize];
            if pn.child[1] == cur {
                count += self.nodes[pn.child[0] as usize].leaves as usize;
            }
            cur = p;
        }
    }

    /// Leaf rank of a KIND_LEAF entry (1-based).
    pub fn leaf_rank(&self, e: u32) -> usize {
        debug_assert_eq!(self.kind(e), KIND_LEAF);
        self.leaves_before(e) + 1
    }

    /// Number of KIND_LEAF entries at or before `e` in list order.
    pub fn leaves_through(&self, e: u32) -> usize {
        self.leaves_before(e) + (self.kind(e) == KIND_LEAF) as usize
    }

    /// The KIND_LEAF entry with 1-based rank `k`.
    pub fn kth_leaf(&self, k: usize) -> u32 {
        debug_assert!(1 <= k && k <= self.leaf_count());
        let mut v = self.root;
        let mut k = k as u32;
        loop {
            let n = &self.nodes[v as usize];
            if n.kind != KIND_INTERNAL {
                debug_assert!(n.kind == KIND_LEAF && k == 1);
                return v;
            }
            let left = self.nodes[n.child[0] as usize].leaves;
            if k <= left {
                v = n.child[0];
            } else {
                k -= left;
                v = n.child[1];
            }
        }
    }

    /// All entries in list order; test and diagnostics helper.
    pub fn entries_in_order(&self) -> Vec<u32> {
        let mut out = Vec::new();
        if self.root == NONE {
            return out;
        }
        let mut stack = vec![self.root];
        while let Some(v) = stack.pop() {
            let n = &self.nodes[v as usize];
            if n.kind == KIND_INTERNAL {
                stack.push(n.child[1]);
                stack.push(n.child[0]);
            } else {
                out.push(v);
            }
        }
        out
    }

    fn alloc_entry(&mut self, kind: u8, vertex: u32, border: u32) -> u32 {
        debug_assert_ne!(kind, KIND_INTERNAL);
        self.nodes.push(Node {
            parent: NONE,
            child: [NONE, NONE],
            height: 0,
            leaves: (kind == KIND_LEAF) as u32,
            kind,
            vertex,
            border,
        });
        (self.nodes.len() - 1) as u32
    }

    /// Splices a new entry next to `anchor` (side 1 = after): a fresh join
    /// node takes the anchor's place and adopts both.
    fn insert_beside(&mut self, anchor: u32, kind: u8, vertex: u32, border: u32, side: usize) -> u32 {
        let e = self.alloc_entry(kind, vertex, border);
        let parent = self.nodes[anchor as usize].parent;
        let join = {
            self.nodes.push(Node {
                parent,
                child: [NONE, NONE],
                height: 1,
                leaves: 0,
                kind: KIND_INTERNAL,
                vertex: NONE,
                border: 0,
            });
            (self.nodes.len() - 1) as u32
        };
        self.nodes[join as usize].child[side] = e;
        self.nodes[join as usize].child[1 - side] = anchor;
        self.nodes[anchor as usize].parent = join;
        self.nodes[e as usize].parent = join;
        if parent == NONE {
            self.root = join;
        } else {
            let p = &mut self.nodes[parent as usize];
            let slot = if p.child[0] == anchor { 0 } else { 1 };
            p.child[slot] = join;
        }
        self.rebalance_from(join);
        e
    }

    fn height(&self, v: u32) -> i32 {
        self.nodes[v as usize].height as i32
    }

    fn pull(&mut self, v: u32) {
        let [a, b] = self.nodes[v as usize].child;
        let h = 1 + self.height(a).max(self.height(b)) as u8;
        let leaves = self.nodes[a as usize].leaves + self.nodes[b as usize].leaves;
        let n = &mut self.nodes[v as usize];
        n.height = h;
        n.leaves = leaves;
    }

    fn rebalance_from(&mut self, mut v: u32) {
        loop {
            self.pull(v);
            let [a, b] = self.nodes[v as usize].child;
            let bal = self.height(b) - self.height(a);
            if bal > 1 {
                let [ba, bb] = self.nodes[b as usize].child;
                if self.height(ba) > self.height(bb) {
                    self.rotate(b, 0);
                }
                v = self.rotate(v, 1);
            } else if bal < -1 {
                let [aa, ab] = self.nodes[a as usize].child;
                if self.height(ab) > self.height(aa) {
                    self.rotate(a, 1);
                }
                v = self.rotate(v, 0);
            }
            let p = self.nodes[v as usize].parent;
            if p == NONE {
                return;
            }
            v = p;
        }
    }

    /// Rotates `v` down toward `1 - dir`; its child on side `dir` takes its
    /// place and is returned.
    fn rotate(&mut self, v: u32, dir: usize) -> u32 {
        let c = self.nodes[v as usize].child[dir];
        let grand = self.nodes[c as usize].child[1 - dir];
        let parent = self.nodes[v as usize].parent;
        self.nodes[v as usize].child[dir] = grand;
        self.nodes[grand as usize].parent = v;
        self.nodes[c as usize].child[1 - dir] = v;
        self.nodes[v as usize].parent = c;
        self.nodes[c as usize].parent = parent;
        if parent == NONE {
            self.root = c;
        } else {
            let p = &mut self.nodes[parent as usize];
            let slot = if p.child[0] == v { 0 } else { 1 };
            p.child[slot] = c;
        }
        self.pull(v);
        self.pull(c);
        c
    }
}

impl Default for OrderIndex {
    fn default() -> Self {
        Self::new()
    }
}

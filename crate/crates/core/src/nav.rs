//! Crit-bit index over the child edges of one suffix-tree vertex.
//!
//! Keys are the packed first blocks of the outgoing edges, compared most
//! significant bit first, so key order equals lexicographic order of the edge
//! labels. Besides exact lookup, the index supports bit-by-bit refinement: a
//! cursor narrows the candidate child set as a pattern block is revealed one
//! character at a time, before a whole block is known.

pub const NONE: u32 = u32::MAX;
const LEAF: u8 = 0xFF;

#[derive(Debug, Clone)]
struct CbNode {
    /// Bit index tested at this node (0 = most significant), or LEAF.
    test_bit: u8,
    parent: u32,
    child: [u32; 2],
    /// Full key (leaves only).
    key: u64,
    /// Caller-supplied id (leaves only).
    payload: u32,
}

#[derive(Debug)]
pub struct NavTrie {
    nodes: Vec<CbNode>,
    root: u32,
    width: u8,
}

/// Position inside a [`NavTrie`] after feeding a prefix of key bits.
///
/// `node`'s subtree is exactly the set of keys consistent with the bits fed
/// so far; `rep` is one such key, used to verify bits the tree does not test.
#[derive(Debug, Clone, Copy)]
pub struct Cursor {
    node: u32,
    bits_fed: u8,
    rep: u64,
}

impl NavTrie {
    pub fn new(width: u32) -> Self {
        debug_assert!((1..=63).contains(&width));
        NavTrie { nodes: Vec::new(), root: NONE, width: width as u8 }
    }

    pub fn is_empty(&self) -> bool {
        self.root == NONE
    }

    #[inline]
    fn bit(&self, key: u64, idx: u8) -> usize {
        ((key >> (self.width - 1 - idx)) & 1) as usize
    }

    fn is_leaf(&self, v: u32) -> bool {
        self.nodes[v as usize].test_bit == LEAF
    }

    /// The leaf whose key shares all tested bits with `key`.
    fn candidate(&self, key: u64) -> u32 {
        let mut v = self.root;
        while !self.is_leaf(v) {
            let n = &self.nodes[v as usize];
            v = n.child[self.bit(key, n.test_bit)];
        }
        v
    }

    pub fn find(&self, key: u64) -> Option<u32> {
        if self.root == NONE {
            return None;
        }
        let leaf = self.candidate(key);
        let n = &self.nodes[leaf as usize];
        (n.key == key).then_some(n.payload)
    }

    /// Repoints an existing key at a new payload (edge split repoints the
    /// parent's child slot from the old child to the new middle vertex).
    pub fn set_payload(&mut self, key: u64, payload: u32) {
        let leaf = self.candidate(key);
        let n = &mut self.nodes[leaf as usize];
        debug_assert_eq!(n.key, key, "set_payload on absent key");
        n.payload = payload;
    }

    /// Inserts a new key and returns the payloads of its neighbors in key
    /// order. The key must not be present.
    pub fn insert(&mut self, key: u64, payload: u32) -> (Option<u32>, Option<u32>) {
        let leaf = self.alloc(CbNode {
            test_bit: LEAF,
            parent: NONE,
            child: [NONE, NONE],
            key,
            payload,
        });
        if self.root == NONE {
            self.root = leaf;
            return (None, None);
        }
        let cand = self.candidate(key);
        let diff = self.nodes[cand as usize].key ^ key;
        debug_assert_ne!(diff, 0, "duplicate key {key:#x}");
        let test_bit = (diff.leading_zeros() - (64 - self.width as u32)) as u8;

        // Splice a new test node at the first point whose test exceeds it.
        let mut at = self.root;
        while !self.is_leaf(at) && self.nodes[at as usize].test_bit < test_bit {
            let n = &self.nodes[at as usize];
            at = n.child[self.bit(key, n.test_bit)];
        }
        let parent = self.nodes[at as usize].parent;
        let side = self.bit(key, test_bit);
        let inner = self.alloc(CbNode {
            test_bit,
            parent,
            child: [NONE, NONE],
            key: 0,
            payload: NONE,
        });
        self.nodes[inner as usize].child[side] = leaf;
        self.nodes[inner as usize].child[1 - side] = at;
        self.nodes[leaf as usize].parent = inner;
        self.nodes[at as usize].parent = inner;
        if parent == NONE {
            self.root = inner;
        } else {
            let p = &mut self.nodes[parent as usize];
            let slot = if p.child[0] == at { 0 } else { 1 };
            p.child[slot] = inner;
        }
        (self.leaf_neighbor(leaf, 0), self.leaf_neighbor(leaf, 1))
    }

    /// Payload of the nearest leaf on the given side (0 = predecessor).
    fn leaf_neighbor(&self, leaf: u32, side: usize) -> Option<u32> {
        let mut cur = leaf;
        loop {
            let p = self.nodes[cur as usize].parent;
            if p == NONE {
                return None;
            }
            if self.nodes[p as usize].child[1 - side] == cur {
                let top = self.nodes[p as usize].child[side];
                let extreme = if side == 0 { self.max_leaf(top) } else { self.min_leaf(top) };
                return Some(self.nodes[extreme as usize].payload);
            }
            cur = p;
        }
    }

    fn min_leaf(&self, mut v: u32) -> u32 {
        while !self.is_leaf(v) {
            v = self.nodes[v as usize].child[0];
        }
        v
    }

    fn max_leaf(&self, mut v: u32) -> u32 {
        while !self.is_leaf(v) {
            v = self.nodes[v as usize].child[1];
        }
        v
    }

    fn alloc(&mut self, n: CbNode) -> u32 {
        self.nodes.push(n);
        (self.nodes.len() - 1) as u32
    }

    /// Cursor over the whole key set; `None` when empty.
    pub fn cursor(&self) -> Option<Cursor> {
        (self.root != NONE).then(|| Cursor {
            node: self.root,
            bits_fed: 0,
            rep: self.nodes[self.min_leaf(self.root) as usize].key,
        })
    }

    /// Feeds the next key bit. Returns false when no key matches anymore;
    /// the cursor is then dead and must not be advanced further.
    pub fn advance(&self, cur: &mut Cursor, bit: usize) -> bool {
        debug_assert!(cur.bits_fed < self.width);
        let idx = cur.bits_fed;
        let n = &self.nodes[cur.node as usize];
        if n.test_bit != LEAF && n.test_bit == idx {
            cur.node = n.child[bit];
            cur.rep = self.nodes[self.min_leaf(cur.node) as usize].key;
        } else if self.bit(cur.rep, idx) != bit {
            // All keys below cur.node agree on this bit, and it mismatches.
            return false;
        }
        cur.bits_fed += 1;
        true
    }

    /// Re-derives a cursor after the trie has been mutated, by replaying the
    /// already-verified bits of `key`. Returns `None` only if the prefix no
    /// longer matches, which cannot happen under insert-only growth.
    pub fn refeed(&self, key: u64, bits: u8) -> Option<Cursor> {
        let mut cur = self.cursor()?;
        for idx in 0..bits {
            if !self.advance(&mut cur, self.bit(key, idx)) {
                return None;
            }
        }
        Some(cur)
    }

    /// Payload when the cursor has narrowed to a single key.
    pub fn narrowed(&self, cur: &Cursor) -> Option<u32> {
        self.is_leaf(cur.node).then(|| self.nodes[cur.node as usize].payload)
    }

    /// Payloads of the value-smallest and value-largest keys still matching.
    pub fn span(&self, cur: &Cursor) -> (u32, u32) {
        (
            self.nodes[self.min_leaf(cur.node) as usize].payload,
            self.nodes[self.max_leaf(cur.node) as usize].payload,
        )
    }

    pub fn bits_fed(&self, cur: &Cursor) -> u8 {
        cur.bits_fed
    }
}

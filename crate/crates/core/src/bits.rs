//! Dynamic bit vector with insertion at arbitrary positions.
//!
//! Bits live in 1024-bit chunks at the leaves of a balanced tree whose nodes
//! aggregate bit and one counts, giving logarithmic insert, access, rank and
//! select. A full chunk is split into two half-full ones before inserting;
//! chunks are never merged since bits are never deleted.

pub const NONE: u32 = u32::MAX;
const CHUNK_WORDS: usize = 16;
const CHUNK_BITS: u32 = (CHUNK_WORDS * 64) as u32;

#[derive(Debug)]
struct Node {
    parent: u32,
    child: [u32; 2],
    height: u8,
    /// Subtree totals.
    bits: u32,
    ones: u32,
    /// Chunk storage (leaves only).
    words: Option<Box<[u64; CHUNK_WORDS]>>,
}

#[derive(Debug)]
pub struct DynBitVec {
    nodes: Vec<Node>,
    root: u32,
}

impl DynBitVec {
    pub fn new() -> Self {
        DynBitVec { nodes: Vec::new(), root: NONE }
    }

    pub fn len(&self) -> usize {
        if self.root == NONE {
            0
        } else {
            self.nodes[self.root as usize].bits as usize
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn ones(&self) -> usize {
        if self.root == NONE {
            0
        } else {
            self.nodes[self.root as usize].ones as usize
        }
    }

    /// Inserts `bit` so that it becomes the bit at 0-based position `pos`.
    pub fn insert(&mut self, pos: usize, bit: bool) {
        debug_assert!(pos <= self.len());
        if self.root == NONE {
            self.root = self.alloc_leaf();
        }
        // Descend to the chunk containing the position (boundary offsets go
        // left, so appends extend the left chunk), splitting a full chunk
        // into halves and re-aiming before the in-chunk insert.
        let mut v = self.root;
        let mut off = pos as u32;
        loop {
            let n = &self.nodes[v as usize];
            if n.words.is_some() {
                if n.bits == CHUNK_BITS {
                    let join = self.split_leaf(v);
                    let [lo, hi] = self.nodes[join as usize].child;
                    let lo_bits = self.nodes[lo as usize].bits;
                    if off <= lo_bits {
                        v = lo;
                    } else {
                        off -= lo_bits;
                        v = hi;
                    }
                }
                break;
            }
            let left_bits = self.nodes[n.child[0] as usize].bits;
            if off <= left_bits {
                v = n.child[0];
            } else {
                off -= left_bits;
                v = n.child[1];
            }
        }
        self.chunk_insert(v, off, bit);
        self.update_up(v, 1, bit as i32);
    }

    /// Bit at 1-based position `i`.
    pub fn access(&self, i: usize) -> bool {
        debug_assert!(1 <= i && i <= self.len());
        let (leaf, off) = self.locate(i as u32 - 1);
        let words = self.nodes[leaf as usize].words.as_ref().unwrap();
        (words[(off / 64) as usize] >> (off % 64)) & 1 == 1
    }

    /// Occurrences of `bit` among the first `prefix_len` bits.
    pub fn rank(&self, prefix_len: usize, bit: bool) -> usize {
        debug_assert!(prefix_len <= self.len());
        if prefix_len == 0 {
            return 0;
        }
        let mut v = self.root;
        let mut remaining = prefix_len as u32;
        let mut ones = 0u32;
        loop {
            let n = &self.nodes[v as usize];
            if let Some(words) = n.words.as_ref() {
                ones += prefix_ones(words, remaining);
                break;
            }
            let left = &self.nodes[n.child[0] as usize];
            if remaining <= left.bits {
                v = n.child[0];
            } else {
                ones += left.ones;
                remaining -= left.bits;
                v = n.child[1];
            }
        }
        if bit {
            ones as usize
        } else {
            prefix_len - ones as usize
        }
    }

    /// 1-based position of the `j`-th occurrence of `bit`.
    pub fn select(&self, j: usize, bit: bool) -> usize {
        debug_assert!(j >= 1);
        let mut v = self.root;
        let mut j = j as u32;
        let mut pos = 0u32;
        loop {
            let n = &self.nodes[v as usize];
            let count = |m: &Node| if bit { m.ones } else { m.bits - m.ones };
            if let Some(words) = n.words.as_ref() {
                pos += chunk_select(words, n.bits, j, bit);
                return pos as usize;
            }
            let left = &self.nodes[n.child[0] as usize];
            if j <= count(left) {
                v = n.child[0];
            } else {
                j -= count(left);
                pos += left.bits;
                v = n.child[1];
            }
        }
    }

    fn locate(&self, mut off: u32) -> (u32, u32) {
        let mut v = self.root;
        loop {
            let n = &self.nodes[v as usize];
            if n.words.is_some() {
                return (v, off);
            }
            let left_bits = self.nodes[n.child[0] as usize].bits;
            if off < left_bits {
                v = n.child[0];
            } else {
                off -= left_bits;
                v = n.child[1];
            }
        }
    }

    fn alloc_leaf(&mut self) -> u32 {
        self.nodes.push(Node {
            parent: NONE,
            child: [NONE, NONE],
            height: 0,
            bits: 0,
            ones: 0,
            words: Some(Box::new([0u64; CHUNK_WORDS])),
        });
        (self.nodes.len() - 1) as u32
    }

    /// Splits a full chunk into two half-full siblings under a join node
    /// that takes its place; returns the join node.
    fn split_leaf(&mut self, leaf: u32) -> u32 {
        let right = self.alloc_leaf();
        let half = CHUNK_WORDS / 2;
        {
            let old: Box<[u64; CHUNK_WORDS]> = self.nodes[leaf as usize].words.take().unwrap();
            let mut lo = Box::new([0u64; CHUNK_WORDS]);
            let mut hi = Box::new([0u64; CHUNK_WORDS]);
            lo[..half].copy_from_slice(&old[..half]);
            hi[..half].copy_from_slice(&old[half..]);
            let lo_ones: u32 = lo[..half].iter().map(|w| w.count_ones()).sum();
            let hi_ones = self.nodes[leaf as usize].ones - lo_ones;
            let ln = &mut self.nodes[leaf as usize];
            ln.words = Some(lo);
            ln.bits = CHUNK_BITS / 2;
            ln.ones = lo_ones;
            let rn = &mut self.nodes[right as usize];
            rn.words = Some(hi);
            rn.bits = CHUNK_BITS / 2;
            rn.ones = hi_ones;
        }
        let parent = self.nodes[leaf as usize].parent;
        self.nodes.push(Node {
            parent,
            child: [leaf, right],
            height: 1,
            bits: CHUNK_BITS,
            ones: self.nodes[leaf as usize].ones + self.nodes[right as usize].ones,
            words: None,
        });
        let join = (self.nodes.len() - 1) as u32;
        self.nodes[leaf as usize].parent = join;
        self.nodes[right as usize].parent = join;
        if parent == NONE {
            self.root = join;
        } else {
            let p = &mut self.nodes[parent as usize];
            let slot = if p.child[0] == leaf { 0 } else { 1 };
            p.child[slot] = join;
        }
        self.rebalance_from(join);
        join
    }

    fn chunk_insert(&mut self, leaf: u32, off: u32, bit: bool) {
        let n = &mut self.nodes[leaf as usize];
        debug_assert!(n.bits < CHUNK_BITS && off <= n.bits);
        let words = n.words.as_mut().unwrap();
        let wi = (off / 64) as usize;
        let bo = off % 64;
        let last = (n.bits / 64) as usize; // word holding the next free slot
        let mut carry = (words[wi] >> 63) & 1;
        let low_mask = if bo == 0 { 0 } else { u64::MAX >> (64 - bo) };
        words[wi] = (words[wi] & low_mask)
            | ((bit as u64) << bo)
            | ((words[wi] & !low_mask) << 1);
        let mut i = wi + 1;
        while i <= last.min(CHUNK_WORDS - 1) {
            let next_carry = (words[i] >> 63) & 1;
            words[i] = (words[i] << 1) | carry;
            carry = next_carry;
            i += 1;
        }
        n.bits += 1;
        n.ones += bit as u32;
    }

    /// Adds deltas along the path to the root (no restructuring needed for
    /// plain inserts; splits rebalance separately).
    fn update_up(&mut self, leaf: u32, dbits: i32, dones: i32) {
        let mut v = self.nodes[leaf as usize].parent;
        while v != NONE {
            let n = &mut self.nodes[v as usize];
            n.bits = (n.bits as i32 + dbits) as u32;
            n.ones = (n.ones as i32 + dones) as u32;
            v = n.parent;
        }
    }

    fn height(&self, v: u32) -> i32 {
        self.nodes[v as usize].height as i32
    }

    fn pull(&mut self, v: u32) {
        let [a, b] = self.nodes[v as usize].child;
        let h = 1 + self.height(a).max(self.height(b)) as u8;
        let bits = self.nodes[a as usize].bits + self.nodes[b as usize].bits;
        let ones = self.nodes[a as usize].ones + self.nodes[b as usize].ones;
        let n = &mut self.nodes[v as usize];
        n.height = h;
        n.bits = bits;
        n.ones = ones;
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

impl Default for DynBitVec {
    fn default() -> Self {
        Self::new()
    }
}

fn prefix_ones(words: &[u64; CHUNK_WORDS], prefix: u32) -> u32 {
    let full = (prefix / 64) as usize;
    let mut ones: u32 = words[..full].iter().map(|w| w.count_ones()).sum();
    let rem = prefix % 64;
    if rem > 0 {
        ones += (words[full] & (u64::MAX >> (64 - rem))).count_ones();
    }
    ones
}

/// 1-based in-chunk position of the `j`-th occurrence of `bit`.
fn chunk_select(words: &[u64; CHUNK_WORDS], len: u32, mut j: u32, bit: bool) -> u32 {
    debug_assert!(j >= 1);
    let mut base = 0u32;
    for &raw in words.iter() {
        let avail = (len - base).min(64);
        let mask = if avail == 64 { u64::MAX } else { (1u64 << avail) - 1 };
        let w = if bit { raw } else { !raw } & mask;
        let c = w.count_ones();
        if j <= c {
            let mut w = w;
            for _ in 1..j {
                w &= w - 1;
            }
            return base + w.trailing_zeros() + 1;
        }
        j -= c;
        base += avail;
        if base >= len {
            break;
        }
    }
    unreachable!("select past the number of {bit} bits");
}

//! Trie answering "longest prefix of the upcoming text that occurs earlier",
//! for match lengths below one block.
//!
//! The factorizer feeds it sliding windows of up to `2r` characters, one per
//! block boundary. Ingesting a window inserts every string that starts in the
//! window's first `r` positions, truncated to depth `r`. Each node stores the
//! smallest text position at which its string has been seen start, so a
//! descent filtered by `min_pos <= cut` reports exactly the matches allowed
//! at that cut.

use crate::params::{Code, PackedText};
use std::collections::HashSet;

pub const ROOT: u32 = 0;

#[derive(Debug)]
struct Node {
    /// Smallest 1-based text position where the root-to-here string starts.
    min_pos: u32,
    /// Children sorted by character code.
    children: Vec<(Code, u32)>,
}

#[derive(Debug)]
pub struct BlockTrie {
    nodes: Vec<Node>,
    /// Packed contents of fully ingested windows; a window whose content was
    /// already ingested at an earlier (hence smaller) position is skipped.
    seen_words: HashSet<u64>,
    r: usize,
}

impl BlockTrie {
    pub fn new(r: usize) -> Self {
        BlockTrie {
            nodes: vec![Node { min_pos: u32::MAX, children: Vec::new() }],
            seen_words: HashSet::new(),
            r,
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn child(&self, v: u32, c: Code) -> Option<u32> {
        let kids = &self.nodes[v as usize].children;
        kids.binary_search_by_key(&c, |&(code, _)| code)
            .ok()
            .map(|i| kids[i].1)
    }

    /// Earliest start position of the string spelled root -> `v`.
    pub fn min_pos(&self, v: u32) -> usize {
        self.nodes[v as usize].min_pos as usize
    }

    /// Ingests the window `text[start..=end]` (1-based, inclusive): inserts
    /// the strings starting at `start..start+r`, each truncated to depth `r`
    /// and to the window end. `word` is the packed content of a full-length
    /// window; when the same content was ingested before, all its strings
    /// already sit in the trie at strictly earlier positions and the whole
    /// window is skipped.
    pub fn ingest(&mut self, text: &PackedText, start: usize, end: usize, word: Option<u64>) {
        if let Some(w) = word {
            if !self.seen_words.insert(w) {
                return;
            }
        }
        for k in 0..self.r {
            let st = start + k;
            if st > end {
                break;
            }
            let depth = self.r.min(end - st + 1);
            let mut v = ROOT;
            for d in 0..depth {
                let c = text.char_at(st + d);
                v = self.child_or_insert(v, c);
                let node = &mut self.nodes[v as usize];
                node.min_pos = node.min_pos.min(st as u32);
            }
        }
    }

    fn child_or_insert(&mut self, v: u32, c: Code) -> u32 {
        let next = self.nodes.len() as u32;
        let kids = &mut self.nodes[v as usize].children;
        match kids.binary_search_by_key(&c, |&(code, _)| code) {
            Ok(i) => kids[i].1,
            Err(i) => {
                kids.insert(i, (c, next));
                self.nodes.push(Node { min_pos: u32::MAX, children: Vec::new() });
                next
            }
        }
    }
}

//! The online factorization driver.
//!
//! Consumes the text block by block and emits greedy factors: at each cut,
//! the longest prefix of the unread remainder that also occurs starting at
//! or before the cut. Matches shorter than one block come from the window
//! trie; longer matches are measured by descending the block suffix tree
//! once per alignment of the match start within a block, validating each
//! candidate length with an occurrence query the moment it would exceed the
//! best length so far. Reading is lazy: the engine never looks more than one
//! block past the characters it has confirmed, so factors are final as soon
//! as the text that proves them has arrived.

use crate::nav::{Cursor, NavTrie};
use crate::params::{pack_block, y_range, Code, PackedText, Params};
use crate::source::{BlockSource, SourceError};
use crate::suffix::{Event, SuffixTree, ROOT as ST_ROOT};
use crate::trie::{BlockTrie, ROOT as TRIE_ROOT};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorKind {
    /// First occurrence of a character: no earlier match at all.
    Literal,
    /// Repeats text that starts at or before the cut (and may overlap it).
    Copy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Factor {
    /// 1-based position in the factorization.
    pub index: usize,
    /// 1-based text position of the factor's first character.
    pub start: usize,
    pub len: usize,
    pub kind: FactorKind,
    /// Start of one earlier occurrence proving a copy; `None` for literals.
    pub witness: Option<usize>,
}

/// Receives factors and per-block progress as the engine produces them.
pub trait FactorSink {
    fn factor(&mut self, f: Factor);
    /// Called after every consumed block: the factor currently being
    /// computed and how many of its characters are already confirmed.
    fn provisional(&mut self, _index: usize, _confirmed: usize, _read_pos: usize) {}
}

impl FactorSink for Vec<Factor> {
    fn factor(&mut self, f: Factor) {
        self.push(f);
    }
}

#[derive(Debug, thiserror::Error)]
pub enum EngineError {
    #[error(transparent)]
    Param(#[from] crate::params::ParamError),
    #[error(transparent)]
    Source(#[from] SourceError),
    #[error("input ended early: expected {expected} characters, got {got}")]
    LengthMismatch { expected: usize, got: usize },
}

/// Counters accumulated over one run.
#[derive(Debug, Clone, Default)]
pub struct Stats {
    pub n: usize,
    pub r: usize,
    pub factors: usize,
    pub blocks_read: usize,
    pub st_leaves: usize,
    pub st_vertices: usize,
    pub trie_nodes: usize,
    pub wavelet_bits: usize,
    /// Largest observed `read_pos - (ell + confirmed)` right after a read.
    pub max_lag: usize,
    /// Reads that left `read_pos > ell + confirmed + r`. Must stay zero.
    pub lag_violations: usize,
    /// Occurrence queries cross-checked against the linear scan (audit mode).
    pub exist_checks: usize,
    pub exist_mismatches: usize,
}

/// Per-factor work counters, used to verify the cost bounds.
#[derive(Debug, Clone, Copy, Default)]
pub struct FactorAudit {
    pub len: usize,
    /// Characters read while waiting for the factor's block suffix to
    /// become a leaf.
    pub first_step_chars: usize,
    /// Occurrence queries issued while measuring this factor.
    pub exist_calls: usize,
}

enum Probe {
    /// The match ends within one block: `s` matched characters (0 means a
    /// literal).
    Short { s: usize, witness: Option<usize> },
    /// A whole block matched; the factor is at least `r` long.
    NeedsLongPath { witness: usize },
}

/// Where the current descent stands in the suffix tree.
enum Locus {
    /// Exactly at a vertex.
    Vertex(u32),
    /// Inside the child index of `vertex`: fewer than one block's characters
    /// fed, no child determined yet.
    Nav { vertex: u32, cursor: Cursor, chars: Vec<Code> },
    /// `depth` characters down the edge above `child` (internal child only).
    Edge { child: u32, depth: usize },
}

enum Step {
    Ok,
    /// The descent narrowed to a leaf edge; switch to direct comparison.
    Leaf(u32),
    Mismatch,
}

pub struct Engine<S> {
    params: Params,
    source: S,
    text: PackedText,
    /// Characters read so far; the text is known up to here.
    read_pos: usize,
    st: SuffixTree,
    trie: BlockTrie,
    /// First window not yet ingested at full length.
    next_window: usize,
    /// Characters already finalized into factors (the cut).
    ell: usize,
    /// Index of the factor currently being computed.
    index: usize,
    /// Confirmed length of the current factor.
    m: usize,
    block_buf: Vec<Code>,
    /// Tree mutations since the last read, for locus repair.
    pending: Vec<Event>,
    exist_audit: bool,
    stats: Stats,
    audits: Vec<FactorAudit>,
}

impl<S: BlockSource> Engine<S> {
    pub fn new(params: Params, source: S) -> Self {
        Engine {
            text: PackedText::new(&params),
            st: SuffixTree::new(&params),
            trie: BlockTrie::new(params.r),
            source,
            read_pos: 0,
            next_window: 0,
            ell: 0,
            index: 0,
            m: 0,
            block_buf: Vec::with_capacity(params.r),
            pending: Vec::new(),
            exist_audit: false,
            stats: Stats { n: params.n, r: params.r, ..Stats::default() },
            audits: Vec::new(),
            params,
        }
    }

    /// Cross-checks every occurrence query against a linear scan of the
    /// leaf list. Quadratic; for tests.
    pub fn enable_exist_audit(&mut self) {
        self.exist_audit = true;
    }

    pub fn audits(&self) -> &[FactorAudit] {
        &self.audits
    }

    pub fn stats(&self) -> &Stats {
        &self.stats
    }

    /// Factorizes the whole text into `sink`.
    pub fn run(&mut self, sink: &mut dyn FactorSink) -> Result<Stats, EngineError> {
        debug_assert_eq!(self.ell, 0, "run consumes the engine");
        let n = self.params.n;
        while self.ell < n {
            self.index += 1;
            self.m = 0;
            let mut audit = FactorAudit::default();
            let (len, kind, witness) = match self.p_less_r(sink)? {
                Probe::Short { s: 0, .. } => (1, FactorKind::Literal, None),
                Probe::Short { s, witness } => (s, FactorKind::Copy, witness),
                Probe::NeedsLongPath { witness } => {
                    let (len, w) = self.p_geq_r(witness, &mut audit, sink)?;
                    (len, FactorKind::Copy, w)
                }
            };
            debug_assert!(kind == FactorKind::Literal || witness.is_some());
            audit.len = len;
            sink.factor(Factor { index: self.index, start: self.ell + 1, len, kind, witness });
            self.audits.push(audit);
            self.ell += len;
        }
        debug_assert_eq!(self.read_pos, n);
        self.stats.factors = self.index;
        self.stats.st_leaves = self.st.leaf_count();
        self.stats.st_vertices = self.st.vertex_count();
        self.stats.trie_nodes = self.trie.node_count();
        self.stats.wavelet_bits = self.st.wavelet_bits();
        Ok(self.stats.clone())
    }

    /// Pulls one block (or the final shorter tail), extends the text, the
    /// suffix tree, and the window trie, and reports progress.
    fn read_block(&mut self, sink: &mut dyn FactorSink) -> Result<(), EngineError> {
        let n = self.params.n;
        let r = self.params.r;
        debug_assert!(self.read_pos < n);
        let want = r.min(n - self.read_pos);
        self.block_buf.clear();
        let got = self.source.read_chars(want, &mut self.block_buf)?;
        if got < want {
            return Err(EngineError::LengthMismatch { expected: n, got: self.read_pos + got });
        }
        for i in 0..got {
            self.text.push(self.block_buf[i]);
        }
        self.read_pos += got;
        self.stats.blocks_read += 1;
        let lag = self.read_pos.saturating_sub(self.ell + self.m);
        if lag > self.stats.max_lag {
            self.stats.max_lag = lag;
        }
        if self.read_pos > self.ell + self.m + r {
            self.stats.lag_violations += 1;
        }
        self.pending.clear();
        while self.st.block_count() < self.read_pos / r {
            let t = self.st.block_count() + 1;
            let base = (t - 1) * r;
            self.block_buf.clear();
            for k in 1..=r {
                self.block_buf.push(self.text.char_at(base + k));
            }
            let block = pack_block(&self.block_buf, self.params.bpc);
            let evs = self.st.extend(block);
            self.pending.extend_from_slice(evs);
            if t >= 2 {
                // The window of the previous boundary is now full: both its
                // blocks are in. Re-ingesting repeated content is skipped by
                // the packed-word check.
                let start = (t - 2) * r + 1;
                self.trie.ingest(&self.text, start, t * r, self.window_word(start));
                self.next_window = t - 1;
            }
            // The newest window is ingested right away at reduced depth so
            // that matches starting near the cut are visible before their
            // window completes; the full-length pass later only deepens it.
            self.trie.ingest(&self.text, (t - 1) * r + 1, t * r, None);
        }
        if self.read_pos == n {
            // Windows that will never reach full length end at the text end.
            let last = (n - 1) / r;
            for j in self.next_window..=last {
                self.trie.ingest(&self.text, j * r + 1, n, None);
            }
            self.next_window = last + 1;
        }
        sink.provisional(self.index, self.m, self.read_pos);
        Ok(())
    }

    /// Packed content of the full window starting at `start`, when it fits
    /// one word; identical windows are ingested once.
    fn window_word(&self, start: usize) -> Option<u64> {
        let r = self.params.r;
        if 2 * self.params.w > 64 {
            return None;
        }
        let mut v = 0u64;
        for k in 0..2 * r {
            v = (v << self.params.bpc) | self.text.char_at(start + k) as u64;
        }
        Some(v)
    }

    /// Longest match strictly shorter than one block, via the window trie.
    /// Matching all `r` characters hands over to the long path.
    fn p_less_r(&mut self, sink: &mut dyn FactorSink) -> Result<Probe, EngineError> {
        let n = self.params.n;
        let r = self.params.r;
        let mut s = 0usize;
        let mut node = TRIE_ROOT;
        loop {
            if s == r || self.ell + s == n {
                break;
            }
            if self.ell + s + 1 > self.read_pos {
                self.read_block(sink)?;
            }
            let c = self.text.char_at(self.ell + s + 1);
            match self.trie.child(node, c) {
                Some(ch) if self.trie.min_pos(ch) <= self.ell => {
                    node = ch;
                    s += 1;
                    self.m = s;
                }
                _ => break,
            }
        }
        if s == r {
            Ok(Probe::NeedsLongPath { witness: self.trie.min_pos(node) })
        } else if s == 0 {
            Ok(Probe::Short { s: 0, witness: None })
        } else {
            Ok(Probe::Short { s, witness: Some(self.trie.min_pos(node)) })
        }
    }

    /// Match length at least one block. First step: read until the suffix
    /// starting at the cut's block is an explicit leaf, certifying every
    /// fully repeated block prefix on the way. Second step: targeted direct
    /// comparisons, then one suffix-tree descent per alignment of the match
    /// start within a block.
    fn p_geq_r(
        &mut self,
        trie_witness: usize,
        audit: &mut FactorAudit,
        sink: &mut dyn FactorSink,
    ) -> Result<(usize, Option<usize>), EngineError> {
        let n = self.params.n;
        let r = self.params.r;
        let ell = self.ell;
        let ellb = ell / r;
        let b_excl = (ellb + 1) * r + 1;
        self.m = r;
        let mut witness = Some(trie_witness);
        let fs_start = self.read_pos;
        loop {
            if ell + self.m >= n || self.st.is_block_suffix_leaf(ellb + 1) {
                break;
            }
            // While the suffix of the block string starting at the cut's
            // block repeats earlier, the whole read block prefix matches.
            let certified = r * self.st.block_count() - ell;
            if certified > self.m {
                self.m = certified;
                witness = None;
            }
            if ell + self.m >= self.read_pos && self.read_pos < n {
                self.read_block(sink)?;
            } else {
                break;
            }
        }
        if witness.is_none() {
            // A certified prefix is a block range that repeats earlier; the
            // earliest suffix extending that range locates an occurrence.
            let bc = (ell + self.m) / r;
            let i = self.st.earliest_block_with_prefix(ellb + 1, bc);
            debug_assert!(i <= ellb);
            witness = Some(r * (i - 1) + 1 + (ell - r * ellb));
        }
        audit.first_step_chars = self.read_pos - fs_start;

        // Occurrences at position 1 sit before every block border; measure
        // them directly.
        self.sweep(1, &mut witness, sink)?;
        // Occurrences whose first border past the start is the cut block's
        // own border are invisible to the descents (that border is the
        // factor's own); their starts are the r positions before it.
        for m in 1..=r {
            let cand = b_excl - m;
            if cand <= ell {
                self.sweep(cand, &mut witness, sink)?;
            }
        }

        if ell + self.m < n {
            for m in 1..=r {
                self.descend_iteration(m, b_excl, &mut witness, audit, sink)?;
                if ell + self.m >= n {
                    break;
                }
            }
        }

        if self.read_pos == n {
            // A final partial block never joins the suffix tree, so matches
            // that cross into it are measured directly. Any such match is
            // longer than the distance from its start to the last block
            // boundary, which confines the starts to a short band before the
            // cut.
            if n % r != 0 {
                let tail = n % r;
                let lo = (ell + 2).saturating_sub(tail).max(1);
                let hi = ell.min(r * ellb);
                for st in lo..=hi {
                    self.sweep(st, &mut witness, sink)?;
                }
            }
            // Block suffixes that keep repeating to the end of the text never
            // become leaves, so descents cannot see occurrences aligned with
            // them. The repeats all share one block-aligned shift, which maps
            // any such occurrence down to either a leaf-aligned one or one
            // aligned with the first repeating suffix; the latter starts in a
            // band of r positions before that suffix's border.
            if self.st.leaf_count() < self.st.block_count() {
                let b0 = r * self.st.leaf_count() + 1;
                let lo = (b0 + 1).saturating_sub(r).max(1);
                let hi = ell.min(b0);
                for st in lo..=hi {
                    self.sweep(st, &mut witness, sink)?;
                }
            }
        }
        debug_assert!(witness.is_some(), "copy factors must carry a witness");
        Ok((self.m, witness))
    }

    /// Compares `W[st0..]` against the factor tail `W[ell+1..]` character by
    /// character, reading as needed; raises the confirmed length on every
    /// extra matched character and adopts the witness on an exact tie.
    fn sweep(
        &mut self,
        st0: usize,
        witness: &mut Option<usize>,
        sink: &mut dyn FactorSink,
    ) -> Result<(), EngineError> {
        debug_assert!(st0 >= 1 && st0 <= self.ell);
        let n = self.params.n;
        let ell = self.ell;
        let mut k = 0usize;
        loop {
            if ell + k + 1 > n {
                break;
            }
            if ell + k + 1 > self.read_pos {
                if self.read_pos >= n {
                    break;
                }
                self.read_block(sink)?;
            }
            if self.text.char_at(ell + k + 1) != self.text.char_at(st0 + k) {
                break;
            }
            k += 1;
            if k > self.m {
                self.m = k;
                *witness = Some(st0);
            }
        }
        Ok(())
    }

    /// One suffix-tree descent: matches `X = W[ell+m..]` from the root,
    /// with `Y = W[ell+1..ell+m-1]` constraining which leaves count as
    /// occurrences (their suffix must be preceded by `Y`). The confirmed
    /// length grows past the current best only after an occurrence query
    /// succeeds for the current set of candidate leaves; the set is
    /// re-queried only when it changes.
    fn descend_iteration(
        &mut self,
        m: usize,
        b_excl: usize,
        witness: &mut Option<usize>,
        audit: &mut FactorAudit,
        sink: &mut dyn FactorSink,
    ) -> Result<(), EngineError> {
        let n = self.params.n;
        let r = self.params.r;
        let bpc = self.params.bpc;
        let ell = self.ell;
        let y_len = m - 1;
        if ell + m > n {
            return Ok(());
        }
        let y: Vec<Code> = (ell + 1..ell + m).map(|p| self.text.char_at(p)).collect();
        let (c_min, c_max) = y_range(pack_block(&y, bpc), y_len, r, bpc);
        let mut locus = Locus::Vertex(ST_ROOT);
        let mut matched = 0usize;
        let mut validated: Option<(u32, u32)> = None;
        loop {
            let p = ell + m + matched;
            if p > n {
                break;
            }
            if p > self.read_pos {
                if self.read_pos >= n {
                    break;
                }
                self.read_block(sink)?;
                self.repair_locus(&mut locus);
                continue;
            }
            let c = self.text.char_at(p);
            match self.advance_locus(&mut locus, c) {
                Step::Mismatch => return Ok(()),
                Step::Leaf(leaf) => {
                    // A single candidate suffix remains; its text settles
                    // everything from here, including the unverified part
                    // of Y.
                    let beta = self.st.border_of_leaf(leaf);
                    if beta > y_len && beta - y_len <= ell {
                        self.sweep(beta - y_len, witness, sink)?;
                    }
                    return Ok(());
                }
                Step::Ok => {
                    matched += 1;
                    if y_len + matched > self.m {
                        let mk = self.locus_marker(&locus);
                        if validated == Some(mk) {
                            // Same candidate leaves as the last successful
                            // query: the validated occurrence extends along
                            // this very path.
                            self.m = y_len + matched;
                        } else {
                            let (lo, hi) = self.locus_rank_span(&locus);
                            match self.call_exist(lo, hi, c_min, c_max, &y, b_excl, audit) {
                                Some(beta) => {
                                    self.m = y_len + matched;
                                    *witness = Some(beta - y_len);
                                    validated = Some(mk);
                                }
                                None => return Ok(()),
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn call_exist(
        &mut self,
        lo: usize,
        hi: usize,
        c_min: u64,
        c_max: u64,
        y: &[Code],
        b_excl: usize,
        audit: &mut FactorAudit,
    ) -> Option<usize> {
        audit.exist_calls += 1;
        let res = self.st.exist(lo, hi, c_min, c_max, y.len(), b_excl, self.ell);
        if self.exist_audit {
            self.stats.exist_checks += 1;
            let chars: Vec<Code> = (1..=self.read_pos).map(|p| self.text.char_at(p)).collect();
            let borders: Vec<usize> = self
                .st
                .leaf_entries(1, self.st.leaf_count())
                .iter()
                .map(|&(b, _)| b)
                .collect();
            let naive =
                crate::oracle::naive_exist(&chars, &borders, lo, hi, y, b_excl, self.ell);
            if res.is_some() != naive.is_some() {
                self.stats.exist_mismatches += 1;
            }
        }
        res
    }

    fn locus_marker(&self, locus: &Locus) -> (u32, u32) {
        match locus {
            Locus::Vertex(v) => (*v, *v),
            Locus::Edge { child, .. } => (*child, *child),
            Locus::Nav { vertex, cursor, .. } => self.st.nav(*vertex).span(cursor),
        }
    }

    fn locus_rank_span(&self, locus: &Locus) -> (usize, usize) {
        match locus {
            Locus::Vertex(v) => self.st.rank_span_vertex(*v),
            Locus::Edge { child, .. } => self.st.rank_span_vertex(*child),
            Locus::Nav { vertex, cursor, .. } => {
                let (a, b) = self.st.nav(*vertex).span(cursor);
                self.st.rank_span_pair(a, b)
            }
        }
    }

    /// Advances the descent by one character.
    fn advance_locus(&self, locus: &mut Locus, c: Code) -> Step {
        let bpc = self.params.bpc;
        let narrowed: Option<(u32, usize)> = match locus {
            Locus::Vertex(v) => {
                let v = *v;
                let nav = self.st.nav(v);
                let mut cur = match nav.cursor() {
                    Some(cur) => cur,
                    None => return Step::Mismatch,
                };
                if !feed_char(nav, &mut cur, c, bpc) {
                    return Step::Mismatch;
                }
                match nav.narrowed(&cur) {
                    Some(child) => Some((child, 1)),
                    None => {
                        *locus = Locus::Nav { vertex: v, cursor: cur, chars: vec![c] };
                        None
                    }
                }
            }
            Locus::Nav { vertex, cursor, chars } => {
                let nav = self.st.nav(*vertex);
                if !feed_char(nav, cursor, c, bpc) {
                    return Step::Mismatch;
                }
                chars.push(c);
                nav.narrowed(cursor).map(|child| (child, chars.len()))
            }
            Locus::Edge { child, depth } => {
                let (ch, d) = (*child, *depth);
                if self.st.edge_char(ch, d) != c {
                    return Step::Mismatch;
                }
                if d + 1 == self.st.edge_span_chars(ch) {
                    *locus = Locus::Vertex(ch);
                } else {
                    *locus = Locus::Edge { child: ch, depth: d + 1 };
                }
                None
            }
        };
        match narrowed {
            None => Step::Ok,
            Some((child, depth)) => {
                if self.st.is_leaf(child) {
                    return Step::Leaf(child);
                }
                *locus = if depth == self.st.edge_span_chars(child) {
                    Locus::Vertex(child)
                } else {
                    Locus::Edge { child, depth }
                };
                Step::Ok
            }
        }
    }

    /// Applies the tree mutations of the last read to a held locus: an edge
    /// the locus sits on may have been split, and the child index it is
    /// navigating may have gained an entry (which restructures the index's
    /// internals but never invalidates already-verified characters).
    fn repair_locus(&mut self, locus: &mut Locus) {
        let r = self.params.r;
        let bpc = self.params.bpc;
        let w = self.params.w;
        let events = std::mem::take(&mut self.pending);
        for ev in events {
            match ev {
                Event::Split { mid, child, upper_blocks, .. } => {
                    if let Locus::Edge { child: lc, depth } = locus {
                        if *lc == child {
                            let upper = upper_blocks as usize * r;
                            if *depth < upper {
                                *locus = Locus::Edge { child: mid, depth: *depth };
                            } else if *depth == upper {
                                *locus = Locus::Vertex(mid);
                            } else {
                                *locus = Locus::Edge { child, depth: *depth - upper };
                            }
                        }
                    }
                }
                Event::NewLeaf { parent, .. } => {
                    if let Locus::Nav { vertex, cursor, chars } = locus {
                        if *vertex == parent {
                            let bits = chars.len() as u32 * bpc;
                            let key = pack_block(chars, bpc) << (w - bits);
                            *cursor = self
                                .st
                                .nav(*vertex)
                                .refeed(key, bits as u8)
                                .expect("a fed prefix survives inserts");
                        }
                    }
                }
            }
        }
    }
}

fn feed_char(nav: &NavTrie, cur: &mut Cursor, c: Code, bpc: u32) -> bool {
    for i in (0..bpc).rev() {
        if !nav.advance(cur, ((c >> i) & 1) as usize) {
            return false;
        }
    }
    true
}

/// Factorizes an in-memory text with automatically chosen parameters.
pub fn factorize(text: &[Code], sigma: u32) -> Result<(Vec<Factor>, Stats), EngineError> {
    let params = Params::choose(text.len(), sigma)?;
    factorize_with(params, text, sigma)
}

/// Factorizes an in-memory text with explicit parameters.
pub fn factorize_with(
    params: Params,
    text: &[Code],
    sigma: u32,
) -> Result<(Vec<Factor>, Stats), EngineError> {
    let mut engine = Engine::new(params, crate::source::SliceSource::new(text, sigma));
    let mut out = Vec::new();
    let stats = engine.run(&mut out)?;
    Ok((out, stats))
}

//! Sizing parameters and the bit-packed text buffer.
//!
//! Everything downstream works over fixed-width character codes packed into
//! `u64` words: `bpc` bits per character, `r` characters per block, `w = r*bpc`
//! bits per packed block. The block width is chosen so that the number of
//! distinct packed block values stays at most `sqrt(n)`, which bounds the
//! size of the short-match trie.

use thiserror::Error;

/// A character code in `[0, sigma)`.
pub type Code = u32;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParamError {
    #[error("text length must be at least 1")]
    EmptyText,
    #[error("alphabet size must be at least 1")]
    EmptySigma,
    #[error("alphabet size {0} exceeds supported maximum 65536")]
    SigmaTooLarge(u64),
    #[error("text length {0} exceeds supported maximum {max}", max = u32::MAX)]
    TextTooLong(u64),
    #[error("block width {0} bits exceeds 63")]
    BlockTooWide(u32),
}

/// Fixed sizing for one factorization run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Params {
    /// Total text length in characters (known up front).
    pub n: usize,
    /// Alphabet size; codes are `0..sigma`.
    pub sigma: u32,
    /// Bits per character: `ceil(log2(max(sigma, 2)))`.
    pub bpc: u32,
    /// Characters per block.
    pub r: usize,
    /// Bits per packed block, `r * bpc`. Always `<= 63`.
    pub w: u32,
}

impl Params {
    /// Derives the block size from `n` and `sigma`: the largest `r` with
    /// `2^(2*r*bpc) <= n`, clamped to at least one character per block.
    pub fn choose(n: usize, sigma: u32) -> Result<Self, ParamError> {
        let bpc = bits_per_char(n, sigma)?;
        let r = ((n.ilog2() / (4 * bpc)) as usize).max(1);
        Self::with_block_size(n, sigma, r)
    }

    /// Same validation as [`Params::choose`] but with a caller-picked `r`.
    pub fn with_block_size(n: usize, sigma: u32, r: usize) -> Result<Self, ParamError> {
        let bpc = bits_per_char(n, sigma)?;
        let w = (r as u64).checked_mul(bpc as u64).unwrap_or(64);
        if w > 63 {
            return Err(ParamError::BlockTooWide(w as u32));
        }
        Ok(Params { n, sigma, bpc, r, w: w as u32 })
    }

    /// Number of whole blocks in the text.
    pub fn block_count(&self) -> usize {
        self.n / self.r
    }

    /// Packed value one past any real block: all real blocks are `< 2^w`.
    pub fn sentinel(&self) -> u64 {
        1u64 << self.w
    }
}

fn bits_per_char(n: usize, sigma: u32) -> Result<u32, ParamError> {
    if n == 0 {
        return Err(ParamError::EmptyText);
    }
    if n as u64 > u32::MAX as u64 {
        return Err(ParamError::TextTooLong(n as u64));
    }
    if sigma == 0 {
        return Err(ParamError::EmptySigma);
    }
    if sigma > 65536 {
        return Err(ParamError::SigmaTooLarge(sigma as u64));
    }
    // A 1-symbol alphabet still needs one bit per character.
    Ok((sigma.max(2) - 1).ilog2() + 1)
}

/// Append-only text buffer storing `bpc`-bit codes packed into `u64` words.
///
/// Positions are 1-based throughout, matching the factorizer's indexing.
#[derive(Debug, Clone)]
pub struct PackedText {
    words: Vec<u64>,
    len: usize,
    bpc: u32,
    sigma: u32,
}

impl PackedText {
    pub fn new(params: &Params) -> Self {
        let total_bits = (params.n as u64) * (params.bpc as u64);
        let words = Vec::with_capacity((total_bits as usize).div_ceil(64) + 1);
        PackedText { words, len: 0, bpc: params.bpc, sigma: params.sigma }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Appends one code. The caller has already validated `c < sigma`.
    pub fn push(&mut self, c: Code) {
        debug_assert!(c < self.sigma, "code {c} out of range for sigma {}", self.sigma);
        let bit = self.len as u64 * self.bpc as u64;
        let (word, off) = ((bit / 64) as usize, (bit % 64) as u32);
        if word == self.words.len() {
            self.words.push(0);
        }
        self.words[word] |= (c as u64) << off;
        if off + self.bpc > 64 {
            self.words.push((c as u64) >> (64 - off));
        }
        self.len += 1;
    }

    /// Code at 1-based position `i`.
    pub fn char_at(&self, i: usize) -> Code {
        debug_assert!(1 <= i && i <= self.len, "position {i} out of 1..={}", self.len);
        let bit = (i - 1) as u64 * self.bpc as u64;
        let (word, off) = ((bit / 64) as usize, (bit % 64) as u32);
        let mut v = self.words[word] >> off;
        if off + self.bpc > 64 {
            v |= self.words[word + 1] << (64 - off);
        }
        (v & ((1u64 << self.bpc) - 1)) as Code
    }

    /// Length of the longest common prefix of the suffixes at 1-based
    /// positions `a` and `b`, capped at `max_len`.
    pub fn lcp(&self, a: usize, b: usize, max_len: usize) -> usize {
        let mut k = 0;
        while k < max_len
            && a + k <= self.len
            && b + k <= self.len
            && self.char_at(a + k) == self.char_at(b + k)
        {
            k += 1;
        }
        k
    }
}

/// Packs `r` codes into one word, first character in the most significant
/// `bpc` bits: packing `[c0, c1]` yields `c0 << bpc | c1`.
pub fn pack_block(codes: &[Code], bpc: u32) -> u64 {
    let mut v = 0u64;
    for &c in codes {
        v = (v << bpc) | c as u64;
    }
    v
}

/// Code at block-local index `k` (0-based, 0 = first character) of a packed
/// block of `r` characters.
pub fn extract_char(packed: u64, k: usize, r: usize, bpc: u32) -> Code {
    debug_assert!(k < r);
    let shift = (r - 1 - k) as u32 * bpc;
    ((packed >> shift) & ((1u64 << bpc) - 1)) as Code
}

/// Bit-reversal of a `w`-bit value.
pub fn reversed(value: u64, w: u32) -> u64 {
    debug_assert!(w >= 1 && w <= 63 && value < (1u64 << w));
    value.reverse_bits() >> (64 - w)
}

/// Range of `w`-bit reversed block values whose originals END with the
/// `y_len`-character string packed in `y_packed`. A block's last characters
/// are its low bits; w-bit reversal moves them to the top, so the matching
/// reversed values form one contiguous range. For `y_len == 0` the range is
/// every real block value — never the sentinel.
pub fn y_range(y_packed: u64, y_len: usize, r: usize, bpc: u32) -> (u64, u64) {
    let w = r as u32 * bpc;
    if y_len == 0 {
        return (0, (1u64 << w) - 1);
    }
    let ybits = y_len as u32 * bpc;
    debug_assert!(y_packed < (1u64 << ybits));
    let pad = w - ybits;
    let lo = reversed(y_packed, ybits) << pad;
    (lo, lo | ((1u64 << pad) - 1))
}

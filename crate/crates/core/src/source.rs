//! Pull-based character input for the factorizer.
//!
//! The engine decides when to read and asks for exactly one block's worth of
//! characters at a time (less at the end of the text); a source must satisfy
//! each request in full or signal end of input by returning fewer.

use crate::params::Code;

#[derive(Debug, thiserror::Error)]
pub enum SourceError {
    #[error("input error: {0}")]
    Io(#[from] std::io::Error),
    #[error("character code {code} at position {pos} is outside the alphabet (sigma = {sigma})")]
    Alphabet { pos: usize, code: u32, sigma: u32 },
}

pub trait BlockSource {
    /// Appends up to `want` characters to `out` and returns how many were
    /// appended. Returning fewer than `want` means the input is exhausted.
    fn read_chars(&mut self, want: usize, out: &mut Vec<Code>) -> Result<usize, SourceError>;
}

/// In-memory source over pre-decoded character codes, validating each code
/// against the declared alphabet as it is consumed.
pub struct SliceSource<'a> {
    data: &'a [Code],
    pos: usize,
    sigma: u32,
}

impl<'a> SliceSource<'a> {
    pub fn new(data: &'a [Code], sigma: u32) -> Self {
        SliceSource { data, pos: 0, sigma }
    }
}

impl BlockSource for SliceSource<'_> {
    fn read_chars(&mut self, want: usize, out: &mut Vec<Code>) -> Result<usize, SourceError> {
        let take = want.min(self.data.len() - self.pos);
        for i in 0..take {
            let c = self.data[self.pos + i];
            if c >= self.sigma {
                return Err(SourceError::Alphabet { pos: self.pos + i + 1, code: c, sigma: self.sigma });
            }
            out.push(c);
        }
        self.pos += take;
        Ok(take)
    }
}

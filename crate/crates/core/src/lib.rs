//! Online Lempel-Ziv factorization over block-packed text.

pub mod bits;
pub mod engine;
pub mod nav;
pub mod oracle;
pub mod order;
pub mod params;
pub mod source;
pub mod suffix;
pub mod trie;
pub mod wavelet;

pub use engine::{factorize, factorize_with, Engine, EngineError, Factor, FactorKind, FactorSink, Stats};
pub use params::{Code, PackedText, ParamError, Params};
pub use source::{BlockSource, SliceSource, SourceError};

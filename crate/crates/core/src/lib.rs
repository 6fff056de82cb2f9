//! A binary code correcting two deletions, with a linear-time decoder.
//!
//! A message `c` of length `n` is protected by moment-weighted sums of its
//! 10- and 01-indicator vectors. Those sums are themselves protected the same
//! way and the result is sent three times over. [`codec::encode`] and
//! [`codec::decode`] wrap the whole pipeline; [`recovery`] holds the core
//! two-deletion decoder and [`oracle`] the brute-force cross-checks.

pub mod bitseq;
pub mod codec;
pub mod error;
pub mod oracle;
pub mod recovery;
pub mod syndrome;

pub use bitseq::BitSeq;
pub use codec::{decode, decode_with, encode, layout, CodeLayout, DecodeOptions, DecodeReport};
pub use error::{Error, Result, Stage};
pub use recovery::decode_two_deletions;
pub use syndrome::{f_syndrome, h_syndrome, SyndromeF, SyndromeH};

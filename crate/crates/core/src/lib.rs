//! scalescope quantifies the information content of discrete descriptions
//! under different observation scales.
//!
//! A description is a sequence of alphabet units (characters, bytes or bits).
//! Tiling it into contiguous symbols yields a size-weighted probability
//! profile, whose entropy in base D (the number of distinct symbols) scores
//! how evenly the interpretation spreads over its own symbol set. Split,
//! drift and join edits let a local search descend toward the fundamental
//! scale: the symbol set of minimal entropy. Ranked profiles can be
//! downgraded onto coarser scales for comparison, and the same scale, scope
//! and resolution accounting applies to tiled 2D grids.

pub mod downgrade;
pub mod error;
pub mod grid;
pub mod jsonfmt;
pub mod message;
pub mod profile;
pub mod report;
pub mod search;
pub mod segmentation;
pub mod tokenize;

pub use downgrade::{downgrade_profile, DowngradePoint, DowngradedProfile};
pub use error::{Error, Result};
pub use grid::{grid_profile, grid_report, Grid, GridOptions, GridReport, GridTiling};
pub use message::{Alphabet, Message};
pub use profile::{
    entropy_flat, specific_diversity, symbol_probability, ProfileEntry, SymbolProfile,
};
pub use report::{scale_report, Resolution, ScaleReport};
pub use search::{
    apply_move, diversity_delta_bounds, exhaustive_min_entropy, minimize_entropy, Acceptance,
    Move, MoveClass, MoveKind, SearchConfig, SearchOutcome, TraceEntry, DEFAULT_ORACLE_CAP,
};
pub use segmentation::Segmentation;
pub use tokenize::{
    tokenize_bits, tokenize_chars, tokenize_ngram, tokenize_words, Attachment, DelimiterPolicy,
    Scale,
};

//! Multilingual ESG issue classification pipeline.
//!
//! The crate covers the full data-engineering loop for a 35-label ESG news
//! classification task: corpus handling, prompt-based synthetic augmentation,
//! zero-shot consensus labeling over multiple generative backends, translation
//! augmentation, a desk-scale hashed n-gram classifier trained with AdamW,
//! weighted-F1 evaluation with a baseline gate, hard-voting ensembles, and a
//! config-driven experiment runner that renders result tables.
//!
//! All operations are deterministic given their seeds, so experiments rerun
//! byte-for-byte identically against the built-in mock backends.

pub mod augment;
pub mod backends;
pub mod classifier;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod fixtures;
pub mod runner;

pub(crate) mod hashing;

pub use error::{Error, ErrorCategory, Result};

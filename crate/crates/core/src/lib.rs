//! Semantic hash centers: binary class codewords that keep inter-class
//! similarity while staying a minimum Hamming distance apart, plus the
//! Hamming-ranking metrics used to evaluate retrieval with them.
//!
//! The pieces, roughly in pipeline order:
//!
//! - [`similarity`] turns classifier logits or class embeddings into a
//!   similarity matrix `S`.
//! - [`gv`] picks the distance target `d` for `C` codewords of length `q`.
//! - [`optimizer`] searches for centers `H` with `H^T H / q` close to `S`
//!   and pairwise distance at least `d`.
//! - [`losses`] scores relaxed network outputs against fixed centers.
//! - [`eval`] ranks a code database per query and reports MAP and PR curves.
//!
//! [`code`] and [`format`] hold the packed code types and their file formats.

pub mod cli;
pub mod code;
pub mod error;
pub mod eval;
pub mod format;
pub mod gv;
pub mod losses;
pub mod optimizer;
pub mod similarity;

pub use code::{hamming_distance, inner_product, BinaryCode, CenterSet, CodeDatabase, SimilarityMatrix};
pub use error::{Error, Result};
pub use gv::compute_min_distance;

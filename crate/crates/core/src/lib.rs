//! Finite-prefix experiments on sequences over {-1, 0, 1}.
//!
//! The crate generates arithmetic sequences (Möbius, Liouville, ℬ-free
//! variants) and symbolic ones (rotation codings, Bernoulli draws, finite
//! codes), measures block statistics and complexity, runs Chowla- and
//! Sarnak-type correlation batteries, builds Toeplitz sequences that
//! correlate with a reference sequence, and evaluates the binary-entropy
//! bounds relating `h_top(z²)` and `h_top(z)`.
//!
//! Positions are 1-based in every public API; entropies are in bits.

pub mod correlations;
pub mod empirics;
pub mod entbounds;
pub mod error;
pub mod io;
pub mod numbergen;
mod pack;
pub mod phase;
pub mod seqcore;
pub mod symbolicgen;
pub mod toeplitz;

pub use error::{Error, Result};
pub use seqcore::{pointwise_product, shift, square_map, Block, SignSeq, Symbol};

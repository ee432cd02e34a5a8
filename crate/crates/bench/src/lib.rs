//! Benchmark fixtures for `chowla-core`; the benches live in `benches/`.

use chowla_core::numbergen::mobius_prefix;
use chowla_core::symbolicgen::{ternary_sturmian_prefix, SturmianParams};
use chowla_core::SignSeq;

pub const SEED: u64 = 20_240_601;

pub fn mobius(n: usize) -> SignSeq {
    mobius_prefix(n).expect("n >= 1")
}

/// A positive-entropy sequence over {-1, 0, 1}.
pub fn ternary(n: usize) -> SignSeq {
    ternary_sturmian_prefix(&SturmianParams::golden(), SEED, n).expect("n >= 1")
}

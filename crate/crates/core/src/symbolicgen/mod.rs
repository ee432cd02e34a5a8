//! Symbolic sequence constructions: rotation codings, seeded i.i.d. draws,
//! finite-code factors of Bernoulli shifts, sparse embeddings, block
//! recoding toward zero entropy, and quantization of real orbits.
//!
//! Every random generator here draws from ChaCha8 (`rand_chacha` 0.3) seeded
//! with `seed_from_u64`, so a `(params, seed, N)` triple always yields the
//! same prefix.

mod determinize;
mod quantize;

pub use determinize::{determinize_step, DeterminizeParams, Determinized};
pub use quantize::{quantize, Quantized};

use std::collections::HashSet;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::phase::frac_linear;
use crate::seqcore::{pointwise_product, SignSeq, Symbol};

pub(crate) fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn check_len(n: usize) -> Result<()> {
    if n == 0 {
        Err(invalid("n", "prefix length must be at least 1"))
    } else {
        Ok(())
    }
}

/// Rotation-coding parameters: `η(n) = 1` iff `{nα + β} ∈ [1-α, 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SturmianParams {
    pub alpha: f64,
    pub beta: f64,
}

impl SturmianParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(invalid("alpha", format!("{alpha} is outside [0, 1]")));
        }
        if !(0.0..1.0).contains(&beta) {
            return Err(invalid("beta", format!("{beta} is outside [0, 1)")));
        }
        Ok(SturmianParams { alpha, beta })
    }

    /// The golden-ratio slope `1/φ² = (3 - √5)/2`.
    pub fn golden() -> Self {
        SturmianParams {
            alpha: (3.0 - 5f64.sqrt()) / 2.0,
            beta: 0.0,
        }
    }

    /// A rational `p/q` with `q <= 1000` lying within `1e-12` of `alpha`, if
    /// any. Such slopes behave periodically at desk scale, so callers that
    /// need exact complexity `n + 1` should warn.
    pub fn near_rational(&self) -> Option<(u64, u64)> {
        (1..=1000u64).find_map(|q| {
            let p = (self.alpha * q as f64).round();
            ((self.alpha - p / q as f64).abs() <= 1e-12).then_some((p as u64, q))
        })
    }
}

/// Rotation coding of the circle by `alpha`: a Sturmian word for irrational
/// `alpha`, a balanced periodic word otherwise.
pub fn sturmian_prefix(p: &SturmianParams, n: usize) -> Result<SignSeq> {
    check_len(n)?;
    let threshold = 1.0 - p.alpha;
    let data = (1..=n as u64)
        .map(|k| {
            let x = frac_linear(k, p.alpha, p.beta);
            i8::from(p.alpha > 0.0 && x >= threshold)
        })
        .collect();
    Ok(SignSeq::from_raw(data))
}

/// Parameters of a Bernoulli measure `B(p_1, ..., p_k)` plus the seed.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BernoulliParams {
    probabilities: Vec<f64>,
    pub seed: u64,
}

impl BernoulliParams {
    pub fn new(probabilities: Vec<f64>, seed: u64) -> Result<Self> {
        if probabilities.is_empty() {
            return Err(invalid("probs", "at least one probability is required"));
        }
        if let Some(p) = probabilities.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(invalid("probs", format!("{p} is outside [0, 1]")));
        }
        let sum: f64 = probabilities.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(invalid("probs", format!("probabilities sum to {sum}, not 1")));
        }
        Ok(BernoulliParams {
            probabilities,
            seed,
        })
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }
}

/// I.i.d. draws from `alphabet` with the given probabilities.
pub fn bernoulli_prefix(alphabet: &[Symbol], p: &BernoulliParams, n: usize) -> Result<SignSeq> {
    check_len(n)?;
    if alphabet.len() != p.probabilities.len() {
        return Err(invalid(
            "alphabet",
            format!(
                "{} symbols but {} probabilities",
                alphabet.len(),
                p.probabilities.len()
            ),
        ));
    }
    let mut cumulative = Vec::with_capacity(alphabet.len());
    let mut acc = 0.0;
    for &q in &p.probabilities {
        acc += q;
        cumulative.push(acc);
    }
    let fallback = p
        .probabilities
        .iter()
        .rposition(|&q| q > 0.0)
        .expect("probabilities sum to one");
    let mut rng = rng(p.seed);
    let data = (0..n)
        .map(|_| {
            let u: f64 = rng.gen();
            let i = cumulative.iter().position(|&c| u < c).unwrap_or(fallback);
            alphabet[i].value()
        })
        .collect();
    Ok(SignSeq::from_raw(data))
}

/// Uniform i.i.d. letters from {0,1,2,3}, two bits at a time from 64-bit words.
fn uniform_quaternary(rng: &mut ChaCha8Rng, len: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(len);
    while out.len() < len {
        let word = rng.next_u64();
        for i in 0..32 {
            if out.len() == len {
                break;
            }
            out.push(((word >> (2 * i)) & 3) as u8);
        }
    }
    out
}

/// Uniform i.i.d. signs, one bit at a time from 64-bit words (bit 1 ↦ +1).
fn uniform_signs(rng: &mut ChaCha8Rng, len: usize) -> Vec<i8> {
    let mut out = Vec::with_capacity(len);
    while out.len() < len {
        let word = rng.next_u64();
        for i in 0..64 {
            if out.len() == len {
                break;
            }
            out.push(if (word >> i) & 1 == 1 { 1 } else { -1 });
        }
    }
    out
}

/// Image of a uniform Bernoulli point on {0,1,2,3} under the sliding code
/// of length `k0`: the pair `(ω(n), ω(n+k0-1))` maps (0,1),(1,2) to -1,
/// (0,2),(2,3) to +1 and everything else to 0.
pub fn coded_example_prefix(k0: usize, seed: u64, n: usize) -> Result<SignSeq> {
    check_len(n)?;
    if k0 < 2 {
        return Err(invalid("k0", "code length must be at least 2"));
    }
    let omega = uniform_quaternary(&mut rng(seed), n + k0 - 1);
    let data = (0..n)
        .map(|i| match (omega[i], omega[i + k0 - 1]) {
            (0, 1) | (1, 2) => -1,
            (0, 2) | (2, 3) => 1,
            _ => 0,
        })
        .collect();
    Ok(SignSeq::from_raw(data))
}

/// `X(n) = Y(n)·1{Y(n+1) = 1}` for i.i.d. uniform signs `Y`.
pub fn squares_needed_prefix(seed: u64, n: usize) -> Result<SignSeq> {
    check_len(n)?;
    let y = uniform_signs(&mut rng(seed), n + 1);
    let data = y.windows(2).map(|w| if w[1] == 1 { w[0] } else { 0 }).collect();
    Ok(SignSeq::from_raw(data))
}

/// Recursive sparse word: `A_1 = 1 0^10`, `A_{s+1} = A_s A_s 0^{10^{s+1}}`,
/// with the very first 1 replaced by -1.
pub fn example_aa_prefix(n: usize) -> Result<SignSeq> {
    check_len(n)?;
    let mut v: Vec<i8> = Vec::with_capacity(n);
    v.push(1);
    v.extend(std::iter::repeat_n(0, 10));
    let mut zeros: usize = 10;
    while v.len() < n {
        let copy_len = v.len().min(n - v.len());
        v.extend_from_within(..copy_len);
        zeros = zeros.saturating_mul(10);
        let pad = zeros.min(n.saturating_sub(v.len()));
        v.extend(std::iter::repeat_n(0, pad));
    }
    v.truncate(n);
    v[0] = -1;
    Ok(SignSeq::from_raw(v))
}

/// Product `η·u` of a rotation coding and an independent Bernoulli draw.
pub fn modulated_sturmian_prefix(
    sturmian: &SturmianParams,
    alphabet: &[Symbol],
    bernoulli: &BernoulliParams,
    n: usize,
) -> Result<SignSeq> {
    let eta = sturmian_prefix(sturmian, n)?;
    let u = bernoulli_prefix(alphabet, bernoulli, n)?;
    pointwise_product(&eta, &u)
}

/// `η·u` with `u` i.i.d. uniform signs: zero-entropy square, entropy `δ`.
pub fn signed_sturmian_prefix(sturmian: &SturmianParams, seed: u64, n: usize) -> Result<SignSeq> {
    let bp = BernoulliParams::new(vec![0.5, 0.5], seed)?;
    modulated_sturmian_prefix(sturmian, &[Symbol::NEG, Symbol::POS], &bp, n)
}

/// `η·u` with `u ~ B(1/4, 1/2, 1/4)` on {-1, 0, 1}: entropies `δ` for the
/// square and `δ·log 3` for the sequence.
pub fn ternary_sturmian_prefix(sturmian: &SturmianParams, seed: u64, n: usize) -> Result<SignSeq> {
    let bp = BernoulliParams::new(vec![0.25, 0.5, 0.25], seed)?;
    modulated_sturmian_prefix(sturmian, &[Symbol::NEG, Symbol::ZERO, Symbol::POS], &bp, n)
}

/// One stage of a sparse embedding: all distinct blocks of length `block_len`.
#[derive(Clone, Debug, Serialize)]
pub struct EmbedStage {
    pub block_len: usize,
    pub gap: usize,
    pub blocks_total: usize,
    pub blocks_placed: usize,
}

impl EmbedStage {
    pub fn complete(&self) -> bool {
        self.blocks_placed == self.blocks_total
    }
}

#[derive(Clone, Debug)]
pub struct SparseEmbedding {
    pub seq: SignSeq,
    pub stages: Vec<EmbedStage>,
}

impl SparseEmbedding {
    /// Largest block length whose stage was placed completely.
    pub fn complete_len(&self) -> Option<usize> {
        self.stages
            .iter()
            .take_while(|s| s.complete())
            .last()
            .map(|s| s.block_len)
    }
}

pub const SPARSE_FIRST_BLOCK: usize = 4;

/// Copy the blocks of `w` into a zero background so that the support has
/// small density while every block of `w` up to the completed length still
/// occurs.
///
/// Stage `k = 1, 2, ...` uses block length `d_k = 4·g^{k-1}` (`g =
/// gap_growth`). Each distinct `d_k`-block of `w`, in order of first
/// occurrence, is written after `(g^k - 1)·d_k` zeros. A block is therefore
/// flanked by at least `d_k` zeros on both sides, and every prefix of the
/// output has support density at most `1/g`, decaying like `g^{-k}`.
pub fn sparse_embed(w: &SignSeq, n: usize, gap_growth: usize) -> Result<SparseEmbedding> {
    check_len(n)?;
    if gap_growth < 2 {
        return Err(invalid("gap_growth", "must be at least 2"));
    }
    if w.len() < SPARSE_FIRST_BLOCK {
        return Err(Error::PrefixTooShort {
            required: SPARSE_FIRST_BLOCK,
            available: w.len(),
        });
    }
    let src = w.as_slice();
    let mut out = vec![0i8; n];
    let mut pos = 0usize;
    let mut stages = Vec::new();
    let mut d = SPARSE_FIRST_BLOCK;
    let mut scale = gap_growth;
    'stages: while d <= src.len() {
        let gap = (scale - 1).checked_mul(d);
        let mut seen = HashSet::new();
        let blocks: Vec<&[i8]> = src.windows(d).filter(|b| seen.insert(*b)).collect();
        let mut stage = EmbedStage {
            block_len: d,
            gap: gap.unwrap_or(usize::MAX),
            blocks_total: blocks.len(),
            blocks_placed: 0,
        };
        for block in blocks {
            let end = gap.and_then(|g| pos.checked_add(g)).and_then(|p| p.checked_add(d));
            match end {
                Some(end) if end <= n => {
                    out[end - d..end].copy_from_slice(block);
                    pos = end;
                    stage.blocks_placed += 1;
                }
                _ => {
                    stages.push(stage);
                    break 'stages;
                }
            }
        }
        stages.push(stage);
        match (d.checked_mul(gap_growth), scale.checked_mul(gap_growth)) {
            (Some(nd), Some(ns)) => (d, scale) = (nd, ns),
            _ => break,
        }
    }
    Ok(SparseEmbedding {
        seq: SignSeq::from_raw(out),
        stages,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqcore::square_map;
    use std::collections::HashSet;

    fn distinct_windows(data: &[i8], len: usize) -> HashSet<Vec<i8>> {
        data.windows(len).map(|w| w.to_vec()).collect()
    }

    #[test]
    fn sturmian_degenerate_slope() {
        let p = SturmianParams::new(0.0, 0.3).unwrap();
        assert_eq!(sturmian_prefix(&p, 100).unwrap().support_size(), 0);
    }

    #[test]
    fn sturmian_complexity_and_balance() {
        let p = SturmianParams::golden();
        assert!(p.near_rational().is_none());
        let eta = sturmian_prefix(&p, 1_000_000).unwrap();
        let data = eta.as_slice();
        for len in [1, 2, 5, 17, 40] {
            assert_eq!(distinct_windows(data, len).len(), len + 1, "p_{len}");
        }
        let delta = p.alpha;
        for block in data.windows(50) {
            let ones = block.iter().filter(|&&v| v == 1).count() as f64;
            assert!(ones > 50.0 * delta - 3.0 && ones < 50.0 * delta + 3.0);
        }
        let mut sum = 0.0;
        for (i, &v) in data.iter().enumerate().take(10_000) {
            sum += v as f64;
            let n = (i + 1) as f64;
            assert!((sum / n - delta).abs() <= 3.0 / n);
        }
    }

    #[test]
    fn sturmian_param_validation() {
        assert!(SturmianParams::new(1.5, 0.0).is_err());
        assert!(SturmianParams::new(0.5, 1.0).is_err());
        assert_eq!(SturmianParams::new(0.25, 0.0).unwrap().near_rational(), Some((1, 4)));
    }

    #[test]
    fn bernoulli_fair_signs() {
        let alphabet = [Symbol::NEG, Symbol::POS];
        let p = BernoulliParams::new(vec![0.5, 0.5], 7).unwrap();
        let u = bernoulli_prefix(&alphabet, &p, 1_000_000).unwrap();
        let mean = u.as_slice().iter().map(|&v| v as f64).sum::<f64>() / 1e6;
        assert!(mean.abs() < 0.005, "{mean}");
        assert_eq!(u, bernoulli_prefix(&alphabet, &p, 1_000_000).unwrap());
    }

    #[test]
    fn bernoulli_ternary_square_density() {
        let alphabet = [Symbol::NEG, Symbol::ZERO, Symbol::POS];
        let p = BernoulliParams::new(vec![0.25, 0.5, 0.25], 11).unwrap();
        let u = bernoulli_prefix(&alphabet, &p, 1_000_000).unwrap();
        let d = square_map(&u).support_density();
        assert!((d - 0.5).abs() < 0.005, "{d}");
    }

    #[test]
    fn bernoulli_degenerate_and_invalid() {
        let alphabet = [Symbol::POS, Symbol::NEG];
        let p = BernoulliParams::new(vec![1.0, 0.0], 3).unwrap();
        let u = bernoulli_prefix(&alphabet, &p, 1000).unwrap();
        assert!(u.as_slice().iter().all(|&v| v == 1));
        assert!(BernoulliParams::new(vec![0.5, 0.6], 0).is_err());
        assert!(BernoulliParams::new(vec![-0.5, 1.5], 0).is_err());
        assert!(bernoulli_prefix(&[Symbol::POS], &p, 10).is_err());
    }

    #[test]
    fn coded_example_alphabet_and_mean() {
        assert!(coded_example_prefix(1, 0, 10).is_err());
        let z = coded_example_prefix(2, 5, 1_000_000).unwrap();
        let mean = z.as_slice().iter().map(|&v| v as f64).sum::<f64>() / 1e6;
        assert!(mean.abs() < 0.002);
        // P(z != 0) = 4/16
        assert!((z.support_density() - 0.25).abs() < 0.003);
    }

    #[test]
    fn squares_needed_structure() {
        let x = squares_needed_prefix(9, 100_000).unwrap();
        // X(n)^2 = 1{Y(n+1)=1} and X(n+1) = Y(n+1)·…, so X(n)≠0 ⇒ X(n+1) ∈ {0, 1}
        for w in x.as_slice().windows(2) {
            if w[0] != 0 {
                assert!(w[1] >= 0);
            }
        }
        assert!((x.support_density() - 0.5).abs() < 0.01);
    }

    #[test]
    fn example_aa_shape() {
        let z = example_aa_prefix(1_000_000).unwrap();
        assert_eq!(z[1], -1);
        assert!(z.as_slice()[1..].iter().all(|&v| v >= 0));
        assert!(z.support_density() < 1e-2);
        // A_1 A_1 prefix
        let head = example_aa_prefix(22).unwrap();
        let mut expected = vec![0i8; 22];
        expected[0] = -1;
        expected[11] = 1;
        assert_eq!(head.as_slice(), expected.as_slice());
        assert_eq!(example_aa_prefix(5).unwrap().as_slice(), &[-1, 0, 0, 0, 0]);
    }

    #[test]
    fn example_aa_square_recurs() {
        let z2 = square_map(&example_aa_prefix(1_000_000).unwrap());
        let data = z2.as_slice();
        let half = data.len() / 2;
        for len in [1usize, 5, 11, 12, 20] {
            // last start of each block; a block recurs iff its last start is
            // strictly after its first start
            let mut first = std::collections::HashMap::new();
            let mut last = std::collections::HashMap::new();
            for (i, w) in data.windows(len).enumerate() {
                first.entry(w).or_insert(i);
                last.insert(w, i);
            }
            for (w, &i) in &first {
                if i < half {
                    assert!(last[w] > i, "block of length {len} at {i} does not recur");
                }
            }
        }
    }

    #[test]
    fn sparse_embed_density_and_coverage() {
        let alphabet = [Symbol::NEG, Symbol::ZERO, Symbol::POS];
        let p = BernoulliParams::new(vec![0.25, 0.5, 0.25], 2).unwrap();
        let w = bernoulli_prefix(&alphabet, &p, 200_000).unwrap();
        let n = 1_000_000;
        let emb = sparse_embed(&w, n, 2).unwrap();
        let out = emb.seq.as_slice();
        // every prefix, not just the whole output
        let mut support = 0usize;
        for (i, &v) in out.iter().enumerate() {
            support += (v != 0) as usize;
            assert!(support * 2 <= i + 1, "prefix {}", i + 1);
        }
        assert!(emb.complete_len().unwrap() >= 8);
        let produced = distinct_windows(out, 8);
        for block in distinct_windows(w.as_slice(), 8) {
            assert!(produced.contains(&block));
        }
        for a in 1..=5 {
            let corr: f64 = out
                .windows(a + 1)
                .map(|x| (x[0] * x[a]) as f64)
                .sum::<f64>()
                / n as f64;
            assert!(corr.abs() <= emb.seq.support_density());
        }
    }

    #[test]
    fn sparse_embed_rejects_bad_input() {
        let w = SignSeq::from_vec(vec![1, -1, 1]).unwrap();
        assert!(matches!(sparse_embed(&w, 100, 2), Err(Error::PrefixTooShort { .. })));
        let w = SignSeq::from_vec(vec![1; 10]).unwrap();
        assert!(sparse_embed(&w, 100, 1).is_err());
    }
}

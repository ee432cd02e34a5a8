//! Block statistics of finite prefixes: frequencies, complexity, entropy
//! estimates, and the relatively-independent-extension test.

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::pack::{count_windows, distinct_window_counts, WindowCounts};
use crate::seqcore::{square_map, Block, SignSeq};

pub const MAX_FREQUENCY_ORDER: usize = 24;
pub const MAX_HAT_ORDER: usize = 16;

/// Empirical window measure of a prefix, restricted to blocks of length
/// at most `max_order`.
///
/// A block of length `ℓ` has frequency `#occurrences / (N - ℓ + 1)`
/// (overlapping windows).
pub struct EmpiricalMeasure {
    max_order: usize,
    len: usize,
    counts: Vec<WindowCounts>,
}

impl EmpiricalMeasure {
    pub fn max_order(&self) -> usize {
        self.max_order
    }

    /// Prefix length `N` the measure was computed from.
    pub fn window_count(&self) -> usize {
        self.len
    }

    fn windows(&self, l: usize) -> usize {
        self.len + 1 - l
    }

    /// Frequency of `block`; zero for blocks that never occur. Panics if the
    /// block is longer than `max_order`.
    pub fn freq(&self, block: &Block) -> f64 {
        let l = block.len();
        assert!(l >= 1 && l <= self.max_order, "block length {l} outside 1..={}", self.max_order);
        self.counts[l - 1].get(block.packed() as u64) as f64 / self.windows(l) as f64
    }

    pub fn count(&self, block: &Block) -> u64 {
        self.counts[block.len() - 1].get(block.packed() as u64)
    }

    /// Blocks of length `l` that occur, with their frequencies, in packed-code order.
    pub fn blocks(&self, l: usize) -> Vec<(Block, f64)> {
        let w = self.windows(l) as f64;
        self.counts[l - 1]
            .nonzero()
            .into_iter()
            .map(|(code, c)| (Block::unpack(code as u128, l), c as f64 / w))
            .collect()
    }
}

/// Frequencies of all blocks of length `1..=k`.
pub fn block_frequencies(w: &SignSeq, k: usize) -> Result<EmpiricalMeasure> {
    if k == 0 || k > MAX_FREQUENCY_ORDER {
        return Err(Error::BudgetExceeded {
            what: "frequency order",
            requested: k,
            limit: MAX_FREQUENCY_ORDER,
        });
    }
    if w.len() < 10 * k {
        return Err(Error::PrefixTooShort {
            required: 10 * k,
            available: w.len(),
        });
    }
    let data = w.as_slice();
    let counts = (1..=k).map(|l| count_windows(data, l)).collect();
    Ok(EmpiricalMeasure {
        max_order: k,
        len: w.len(),
        counts,
    })
}

/// Block complexity `p_n` for `n = 1..=n_max`.
#[derive(Clone, Debug, Serialize)]
pub struct ComplexityProfile {
    pub counts: Vec<usize>,
    /// `log2(p_n) / n`.
    pub entropy_slope: Vec<f64>,
    pub prefix_len: usize,
}

impl ComplexityProfile {
    pub fn n_max(&self) -> usize {
        self.counts.len()
    }

    /// `p_n`, 1-based in `n`.
    pub fn p(&self, n: usize) -> usize {
        self.counts[n - 1]
    }
}

/// Exact counts of distinct windows of each length `1..=n_max` in the prefix.
pub fn complexity_profile(w: &SignSeq, n_max: usize) -> Result<ComplexityProfile> {
    if n_max == 0 {
        return Err(invalid("n_max", "must be at least 1"));
    }
    if n_max > w.len() {
        return Err(Error::PrefixTooShort {
            required: n_max,
            available: w.len(),
        });
    }
    let counts = distinct_window_counts(w.as_slice(), n_max);
    let entropy_slope = counts
        .iter()
        .enumerate()
        .map(|(i, &c)| (c as f64).log2() / (i + 1) as f64)
        .collect();
    Ok(ComplexityProfile {
        counts,
        entropy_slope,
        prefix_len: w.len(),
    })
}

/// A finite-scale topological entropy estimate.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct EntropyEstimate {
    /// Median of `log2(p_n)/n` over the window.
    pub value: f64,
    /// Spread (max - min) of `log2(p_n)/n` over the window.
    pub uncertainty: f64,
    pub n_lo: usize,
    pub n_hi: usize,
}

impl EntropyEstimate {
    pub fn lower(&self) -> f64 {
        self.value - self.uncertainty
    }

    pub fn upper(&self) -> f64 {
        self.value + self.uncertainty
    }
}

/// Median of the entropy slopes over `n_lo..=n_hi`. This is a statistic of
/// the observed prefix, not the limit `lim log2(p_n)/n`.
pub fn entropy_estimate(
    profile: &ComplexityProfile,
    n_lo: usize,
    n_hi: usize,
) -> Result<EntropyEstimate> {
    if n_lo == 0 || n_lo >= n_hi || n_hi > profile.n_max() {
        return Err(invalid(
            "window",
            format!("need 1 <= n_lo < n_hi <= {}, got {n_lo}..{n_hi}", profile.n_max()),
        ));
    }
    let mut slopes = profile.entropy_slope[n_lo - 1..n_hi].to_vec();
    slopes.sort_by(f64::total_cmp);
    let m = slopes.len();
    let value = if m % 2 == 1 {
        slopes[m / 2]
    } else {
        (slopes[m / 2 - 1] + slopes[m / 2]) / 2.0
    };
    Ok(EntropyEstimate {
        value,
        uncertainty: slopes[m - 1] - slopes[0],
        n_lo,
        n_hi,
    })
}

/// Outcome of [`hat_extension_test`].
#[derive(Clone, Debug, Serialize)]
pub struct HatReport {
    pub k: usize,
    pub tol: f64,
    /// Squared blocks with frequency at or below this are not audited.
    pub min_mass: f64,
    pub audited_blocks: usize,
    pub max_violation: f64,
    /// Block attaining `max_violation`.
    pub witness: Option<Block>,
    /// First violating block in (length, packed code) order.
    pub shortest_witness: Option<Block>,
    pub passed: bool,
}

/// Compare the block frequencies of `z` with the relatively independent
/// extension of those of `z²`: `freq_z(B) ≈ 2^{-|supp B|}·freq_{z²}(B²)`.
///
/// Only blocks whose squared block has frequency above `tol` are audited;
/// rarer blocks cannot be resolved at the given tolerance. For every audited
/// squared block all `2^{|supp|}` sign lifts are checked, including lifts
/// that never occur in `z`.
pub fn hat_extension_test(z: &SignSeq, k: usize, tol: f64) -> Result<HatReport> {
    hat_extension_test_with_mass(z, k, tol, tol)
}

/// [`hat_extension_test`] with an explicit audit threshold on `freq_{z²}(B²)`.
pub fn hat_extension_test_with_mass(
    z: &SignSeq,
    k: usize,
    tol: f64,
    min_mass: f64,
) -> Result<HatReport> {
    if k == 0 || k > MAX_HAT_ORDER {
        return Err(Error::BudgetExceeded {
            what: "hat-test order",
            requested: k,
            limit: MAX_HAT_ORDER,
        });
    }
    if !(tol > 0.0) {
        return Err(invalid("tol", "must be positive"));
    }
    let fz = block_frequencies(z, k)?;
    let fsq = block_frequencies(&square_map(z), k)?;
    let mut report = HatReport {
        k,
        tol,
        min_mass,
        audited_blocks: 0,
        max_violation: 0.0,
        witness: None,
        shortest_witness: None,
        passed: true,
    };
    for l in 1..=k {
        for (sq, mass) in fsq.blocks(l) {
            if mass <= min_mass {
                continue;
            }
            let s = sq.ones();
            let expected = mass / (1u64 << s) as f64;
            for signs in 0u32..1 << s {
                let mut letters = sq.letters().to_vec();
                for (bit, &pos) in sq.support().iter().enumerate() {
                    if (signs >> bit) & 1 == 1 {
                        letters[pos] = -1;
                    }
                }
                let lift = Block::from_raw(letters);
                let gap = (fz.freq(&lift) - expected).abs();
                report.audited_blocks += 1;
                if gap > tol && report.shortest_witness.is_none() {
                    report.shortest_witness = Some(lift.clone());
                }
                if gap > report.max_violation {
                    report.max_violation = gap;
                    report.witness = Some(lift);
                }
            }
        }
    }
    report.passed = report.max_violation <= tol;
    Ok(report)
}

/// Length-`n` blocks whose empirical frequency exceeds `threshold`, sorted.
pub fn positive_frequency_blocks(w: &SignSeq, n: usize, threshold: f64) -> Result<Vec<Block>> {
    if n == 0 || n > 32 {
        return Err(Error::BudgetExceeded {
            what: "block length",
            requested: n,
            limit: 32,
        });
    }
    if n > w.len() {
        return Err(Error::PrefixTooShort {
            required: n,
            available: w.len(),
        });
    }
    let windows = (w.len() + 1 - n) as f64;
    let mut out: Vec<Block> = count_windows(w.as_slice(), n)
        .nonzero()
        .into_iter()
        .filter(|&(_, c)| c as f64 / windows > threshold)
        .map(|(code, _)| Block::unpack(code as u128, n))
        .collect();
    out.sort();
    Ok(out)
}

use std::collections::{HashMap, HashSet};

use serde::Serialize;

use crate::entbounds::binary_entropy;
use crate::error::{invalid, Error, Result};
use crate::seqcore::SignSeq;

/// Parameters of one recoding step.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DeterminizeParams {
    pub epsilon: f64,
    /// Largest `δ <= 1/2` with `H(δ) + δ <= ε`. Heaviness and acceptability
    /// are decided with `δ`, which is what makes the image bound `2^(εN)` hold
    /// for every `N`, not only asymptotically.
    pub working_epsilon: f64,
    /// Length `n` of the inner (heavy/light) blocks.
    pub n_block: usize,
    /// Length `N_k` of the recoded outer blocks.
    pub big_n: usize,
}

impl DeterminizeParams {
    pub fn new(epsilon: f64, n_block: usize, big_n: usize) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(invalid("epsilon", format!("{epsilon} is outside (0, 1)")));
        }
        if n_block == 0 {
            return Err(invalid("n_block", "must be at least 1"));
        }
        if n_block > big_n {
            return Err(invalid(
                "n_block",
                format!("inner block length {n_block} exceeds outer length {big_n}"),
            ));
        }
        Ok(DeterminizeParams {
            epsilon,
            working_epsilon: working_epsilon(epsilon),
            n_block,
            big_n,
        })
    }

    /// A block is heavy when its frequency exceeds `2^(-δ·n)`.
    pub fn heavy_threshold(&self) -> f64 {
        (-self.working_epsilon * self.n_block as f64).exp2()
    }

    /// `2^(ε·N_k)`, the bound on the number of distinct recoded blocks.
    pub fn image_bound(&self) -> f64 {
        (self.epsilon * self.big_n as f64).exp2()
    }
}

// H(δ)+δ is increasing on [0, 1/2] and reaches 1.5 there; keep the lower
// bisection end so the inequality holds exactly.
fn working_epsilon(epsilon: f64) -> f64 {
    let g = |d: f64| binary_entropy(d).expect("d in [0, 1/2]") + d;
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if g(mid) <= epsilon {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Result of [`determinize_step`].
#[derive(Clone, Debug)]
pub struct Determinized {
    pub seq: SignSeq,
    /// Distinct outer blocks in the recoded sequence.
    pub distinct_blocks: usize,
    /// Outer blocks recoded (full blocks only; a trailing partial block is
    /// copied unchanged).
    pub outer_blocks: usize,
    pub acceptable_blocks: usize,
    pub heavy_blocks: usize,
    /// Positions inside full outer blocks where output and input differ.
    pub changed: usize,
    /// Share of positions `j` whose inner block starting at `j` is light
    /// (or runs past the end of `u`).
    pub non_good_fraction: f64,
}

impl Determinized {
    /// Share of the recoded region that lies in non-acceptable outer blocks.
    pub fn non_acceptable_fraction(&self) -> f64 {
        (self.outer_blocks - self.acceptable_blocks) as f64 / self.outer_blocks as f64
    }

    pub fn changed_fraction(&self, big_n: usize) -> f64 {
        self.changed as f64 / (self.outer_blocks * big_n) as f64
    }
}

/// One block-recoding step toward a completely deterministic sequence.
///
/// Inner `n`-blocks are heavy when their empirical frequency in `u` exceeds
/// `2^(-δ n)`, `δ` the working epsilon. Each outer block `W` of length `N_k`
/// is mapped to `a^{N_k}` (`a = u(1)`) unless more than a `1-δ` share of its positions start a
/// heavy block fully inside `W`. Acceptable blocks keep a greedy left-to-right
/// packing of disjoint heavy blocks and have every other position overwritten
/// by `a`.
pub fn determinize_step(u: &SignSeq, p: &DeterminizeParams) -> Result<Determinized> {
    let data = u.as_slice();
    let (n, big_n) = (p.n_block, p.big_n);
    if big_n > data.len() {
        return Err(Error::PrefixTooShort {
            required: big_n,
            available: data.len(),
        });
    }
    let windows = data.len() - n + 1;
    let mut counts: HashMap<&[i8], usize> = HashMap::new();
    for w in data.windows(n) {
        *counts.entry(w).or_default() += 1;
    }
    let threshold = p.heavy_threshold();
    let heavy: HashSet<&[i8]> = counts
        .iter()
        .filter(|(_, &c)| c as f64 / windows as f64 > threshold)
        .map(|(&w, _)| w)
        .collect();
    let good_in_u = data.windows(n).filter(|w| heavy.contains(w)).count();

    let a = data[0];
    let outer_blocks = data.len() / big_n;
    let mut out = data.to_vec();
    let mut acceptable_blocks = 0;
    let mut changed = 0;
    let mut images: HashSet<&[i8]> = HashSet::new();

    for b in 0..outer_blocks {
        let w = &data[b * big_n..(b + 1) * big_n];
        let good: Vec<bool> = (0..big_n)
            .map(|j| j + n <= big_n && heavy.contains(&w[j..j + n]))
            .collect();
        let good_count = good.iter().filter(|&&g| g).count();
        let target = &mut out[b * big_n..(b + 1) * big_n];
        if good_count as f64 / big_n as f64 > 1.0 - p.working_epsilon {
            acceptable_blocks += 1;
            let mut covered = vec![false; big_n];
            let mut j = 0;
            while j < big_n {
                if good[j] {
                    covered[j..j + n].iter_mut().for_each(|c| *c = true);
                    j += n;
                } else {
                    j += 1;
                }
            }
            for (t, &c) in target.iter_mut().zip(&covered) {
                if !c {
                    *t = a;
                }
            }
        } else {
            target.iter_mut().for_each(|t| *t = a);
        }
        changed += w.iter().zip(target.iter()).filter(|(x, y)| x != y).count();
    }
    for b in 0..outer_blocks {
        images.insert(&out[b * big_n..(b + 1) * big_n]);
    }
    let distinct_blocks = images.len();

    Ok(Determinized {
        seq: SignSeq::from_raw(out),
        distinct_blocks,
        outer_blocks,
        acceptable_blocks,
        heavy_blocks: heavy.len(),
        changed,
        non_good_fraction: 1.0 - good_in_u as f64 / data.len() as f64,
    })
}

//! Window counting over packed 2-bit letter codes.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::seqcore::letter_code;

/// Largest window length whose codes are tabulated in a dense array.
const DENSE_MAX: usize = 11;
/// Largest window length whose presence is tracked in a dense bitset.
const BITSET_MAX: usize = 12;
const CHUNK: usize = 1 << 18;

/// Chunk boundaries over window start positions `0..windows`.
fn chunks(windows: usize) -> Vec<(usize, usize)> {
    (0..windows)
        .step_by(CHUNK)
        .map(|s| (s, (s + CHUNK).min(windows)))
        .collect()
}

/// Packed codes of all windows of length `len` (≤ 32) starting in `start..end`.
fn for_each_code(data: &[i8], len: usize, start: usize, end: usize, mut f: impl FnMut(u64)) {
    debug_assert!((1..=32).contains(&len));
    let mask = if len == 32 { u64::MAX } else { (1u64 << (2 * len)) - 1 };
    let mut code = 0u64;
    for &v in &data[start..start + len - 1] {
        code = (code << 2) | letter_code(v) as u64;
    }
    for i in start..end {
        code = ((code << 2) | letter_code(data[i + len - 1]) as u64) & mask;
        f(code);
    }
}

/// Occurrence counts of the windows of one length.
pub(crate) enum WindowCounts {
    Dense(Vec<u64>),
    Sparse(HashMap<u64, u64>),
}

impl WindowCounts {
    pub(crate) fn get(&self, code: u64) -> u64 {
        match self {
            WindowCounts::Dense(v) => v.get(code as usize).copied().unwrap_or(0),
            WindowCounts::Sparse(m) => m.get(&code).copied().unwrap_or(0),
        }
    }

    pub(crate) fn nonzero(&self) -> Vec<(u64, u64)> {
        let mut out: Vec<(u64, u64)> = match self {
            WindowCounts::Dense(v) => v
                .iter()
                .enumerate()
                .filter(|(_, &c)| c > 0)
                .map(|(k, &c)| (k as u64, c))
                .collect(),
            WindowCounts::Sparse(m) => m.iter().map(|(&k, &c)| (k, c)).collect(),
        };
        out.sort_unstable();
        out
    }
}

/// Count every window of length `len` (1 ≤ len ≤ 32). Counts are integers,
/// so the chunked parallel merge is exact and thread-count independent.
pub(crate) fn count_windows(data: &[i8], len: usize) -> WindowCounts {
    let windows = data.len() + 1 - len;
    let parts = chunks(windows);
    if len <= DENSE_MAX {
        let size = 1usize << (2 * len);
        let merged = parts
            .par_iter()
            .map(|&(s, e)| {
                let mut local = vec![0u64; size];
                for_each_code(data, len, s, e, |c| local[c as usize] += 1);
                local
            })
            .reduce(
                || vec![0u64; size],
                |mut a, b| {
                    a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                    a
                },
            );
        WindowCounts::Dense(merged)
    } else {
        let merged = parts
            .par_iter()
            .map(|&(s, e)| {
                let mut local: HashMap<u64, u64> = HashMap::new();
                for_each_code(data, len, s, e, |c| *local.entry(c).or_default() += 1);
                local
            })
            .reduce(HashMap::new, |mut a, b| {
                for (k, c) in b {
                    *a.entry(k).or_default() += c;
                }
                a
            });
        WindowCounts::Sparse(merged)
    }
}

/// Number of distinct windows of each length `1..=n_max`.
pub(crate) fn distinct_window_counts(data: &[i8], n_max: usize) -> Vec<usize> {
    let short_max = n_max.min(32).min(data.len());
    let mut counts: Vec<usize> = (1..=short_max)
        .into_par_iter()
        .map(|len| distinct_short(data, len))
        .collect();
    if n_max > short_max {
        let long = distinct_by_suffix_order(data, n_max);
        counts.extend_from_slice(&long[short_max..]);
    }
    counts
}

fn distinct_short(data: &[i8], len: usize) -> usize {
    let windows = data.len() + 1 - len;
    if len <= BITSET_MAX {
        let words = (1usize << (2 * len)).div_ceil(64);
        let mut bits = vec![0u64; words];
        for_each_code(data, len, 0, windows, |c| bits[(c >> 6) as usize] |= 1 << (c & 63));
        bits.iter().map(|w| w.count_ones() as usize).sum()
    } else {
        let mut codes = Vec::with_capacity(windows);
        for_each_code(data, len, 0, windows, |c| codes.push(c));
        codes.par_sort_unstable();
        codes.dedup();
        codes.len()
    }
}

/// Distinct-window counts for all lengths up to `n_max` at once.
///
/// Suffixes are ordered by their first `n_max` letters (prefix doubling on
/// ranks), then adjacent suffixes are compared directly up to `n_max`. A
/// window of length `n` starting at the suffix in sorted slot `i` is new iff
/// the suffix has at least `n` letters and shares fewer than `n` with the
/// previous slot.
pub(crate) fn distinct_by_suffix_order(data: &[i8], n_max: usize) -> Vec<usize> {
    let len = data.len();
    // rank 0 is reserved for "past the end"
    let mut rank: Vec<u32> = data.iter().map(|&v| letter_code(v) as u32 + 1).collect();
    let mut order: Vec<u32> = (0..len as u32).collect();
    let mut span = 1usize;
    let rank_at = |rank: &[u32], i: usize| -> u64 { rank.get(i).copied().unwrap_or(0) as u64 };
    loop {
        let keyed: Vec<(u64, u32)> = (0..len)
            .into_par_iter()
            .map(|i| ((rank_at(&rank, i) << 32) | rank_at(&rank, i + span), i as u32))
            .collect();
        let mut keyed = keyed;
        keyed.par_sort_unstable();
        let mut next = vec![0u32; len];
        let mut r = 1u32;
        for k in 0..len {
            if k > 0 && keyed[k].0 != keyed[k - 1].0 {
                r += 1;
            }
            next[keyed[k].1 as usize] = r;
            order[k] = keyed[k].1;
        }
        rank = next;
        span *= 2;
        if span >= n_max || r as usize == len {
            break;
        }
    }
    let mut diff = vec![0i64; n_max + 2];
    for k in 0..len {
        let i = order[k] as usize;
        let avail = (len - i).min(n_max);
        let lcp = if k == 0 {
            0
        } else {
            let j = order[k - 1] as usize;
            data[i..]
                .iter()
                .zip(&data[j..])
                .take(n_max)
                .take_while(|(a, b)| a == b)
                .count()
        };
        if lcp < avail {
            diff[lcp + 1] += 1;
            diff[avail + 1] -= 1;
        }
    }
    let mut out = Vec::with_capacity(n_max);
    let mut acc = 0i64;
    for d in &diff[1..=n_max] {
        acc += d;
        out.push(acc as usize);
    }
    out
}

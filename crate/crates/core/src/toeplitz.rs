//! Toeplitz sequences built from a reference sequence along the
//! progressions `A_j = {j + n·q^j : n >= 0}`.
//!
//! `j` is initial when no earlier progression `A_{j'}` (with `j'` initial)
//! contains it. The initial progressions partition the positive integers, so
//! every `n` has a unique initial owner `j`, and `t(n) = z(j)`.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::correlations::checkpoint_positions;
use crate::error::{invalid, Error, Result};
use crate::seqcore::{letter_code, SignSeq};

/// Largest table `classify_initials` will build.
pub const MAX_TABLE_LEN: usize = 200_000_000;
/// Largest window `L = q^ℓ` whose blocks are compared for the entropy bound.
pub const MAX_ENTROPY_WINDOW: u64 = 40;

#[derive(Clone, Debug)]
pub struct ToeplitzSpec {
    q: u64,
    z_ref: SignSeq,
}

impl ToeplitzSpec {
    pub fn new(q: u64, z_ref: SignSeq) -> Result<Self> {
        check_q(q)?;
        Ok(ToeplitzSpec { q, z_ref })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn z_ref(&self) -> &SignSeq {
        &self.z_ref
    }

    fn check_ref(&self, n: usize) -> Result<()> {
        if self.z_ref.len() < n {
            return Err(Error::PrefixTooShort {
                required: n,
                available: self.z_ref.len(),
            });
        }
        Ok(())
    }
}

fn check_q(q: u64) -> Result<()> {
    if q < 2 {
        return Err(invalid("q", format!("{q} must be at least 2")));
    }
    Ok(())
}

/// `q^j` if it does not exceed `limit`.
fn pow_within(q: u64, j: u64, limit: u64) -> Option<u64> {
    let mut p = 1u64;
    for _ in 0..j {
        p = p.checked_mul(q)?;
        if p > limit {
            return None;
        }
    }
    Some(p)
}

/// Initial owner of every `n` in `1..=N`.
#[derive(Clone, Debug)]
pub struct InitialTable {
    q: u64,
    owner: Vec<u32>,
}

impl InitialTable {
    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn len(&self) -> usize {
        self.owner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.owner.is_empty()
    }

    /// The initial `j` with `n ∈ A_j` (`n` itself when `n` is initial).
    pub fn owner(&self, n: usize) -> usize {
        self.owner[n - 1] as usize
    }

    pub fn is_initial(&self, n: usize) -> bool {
        self.owner(n) == n
    }

    pub fn initials(&self) -> impl Iterator<Item = usize> + '_ {
        (1..=self.len()).filter(|&n| self.is_initial(n))
    }

    pub fn non_initials(&self) -> impl Iterator<Item = usize> + '_ {
        (1..=self.len()).filter(|&n| !self.is_initial(n))
    }

    pub fn non_initial_count(&self) -> usize {
        self.non_initials().count()
    }

    pub fn non_initial_density(&self) -> f64 {
        self.non_initial_count() as f64 / self.len() as f64
    }

    /// Largest prefix density of non-initials, `max_{N'} #{n <= N' non-initial}/N'`.
    pub fn max_prefix_non_initial_density(&self) -> f64 {
        let mut count = 0usize;
        let mut best = 0.0f64;
        for n in 1..=self.len() {
            if !self.is_initial(n) {
                count += 1;
                best = best.max(count as f64 / n as f64);
            }
        }
        best
    }

    /// Recheck the partition without the sieve: every `n` must lie in exactly
    /// one `A_j` with `j` initial, and that `j` must be the recorded owner.
    /// Returns the first offending `n`.
    pub fn verify_partition(&self) -> std::result::Result<(), usize> {
        let n_max = self.len() as u64;
        // only initial j with q^j < N can own anything besides j
        let mut small: Vec<(u64, u64)> = Vec::new();
        for j in 1..=n_max {
            match pow_within(self.q, j, n_max) {
                Some(p) => {
                    if self.is_initial(j as usize) {
                        small.push((j, p));
                    }
                }
                None => break,
            }
        }
        let bad = (1..=n_max).into_par_iter().find_first(|&n| {
            let mut owners = 0;
            let mut last = 0;
            if self.is_initial(n as usize) {
                owners += 1;
                last = n;
            }
            for &(j, p) in &small {
                if j < n && (n - j) % p == 0 {
                    owners += 1;
                    last = j;
                }
            }
            owners != 1 || last as usize != self.owner(n as usize)
        });
        match bad {
            Some(n) => Err(n as usize),
            None => Ok(()),
        }
    }
}

/// Forward sieve: the first unmarked `j` is initial, and then marks
/// `j + n·q^j` for `n >= 1`. Progressions with `q^j > N` own only `j`.
pub fn classify_initials(q: u64, n: usize) -> Result<InitialTable> {
    check_q(q)?;
    if n == 0 {
        return Err(invalid("n", "table length must be at least 1"));
    }
    if n > MAX_TABLE_LEN {
        return Err(Error::BudgetExceeded {
            what: "initial table length",
            requested: n,
            limit: MAX_TABLE_LEN,
        });
    }
    let mut owner = vec![0u32; n];
    let mut stepping = true;
    for j in 1..=n {
        if owner[j - 1] != 0 {
            continue;
        }
        owner[j - 1] = j as u32;
        if !stepping {
            continue;
        }
        match pow_within(q, j as u64, n as u64) {
            Some(p) => {
                let p = p as usize;
                let mut m = j + p;
                while m <= n {
                    if owner[m - 1] == 0 {
                        owner[m - 1] = j as u32;
                    }
                    m += p;
                }
            }
            // q^j only grows with j
            None => stepping = false,
        }
    }
    Ok(InitialTable { q, owner })
}

fn build_from_table(z: &SignSeq, table: &InitialTable) -> SignSeq {
    let zs = z.as_slice();
    SignSeq::from_raw(table.owner.iter().map(|&j| zs[j as usize - 1]).collect())
}

/// `t(n) = z(j)` where `j` is the initial owner of `n`.
pub fn build_toeplitz(spec: &ToeplitzSpec, n: usize) -> Result<SignSeq> {
    spec.check_ref(n)?;
    let table = classify_initials(spec.q, n)?;
    Ok(build_from_table(&spec.z_ref, &table))
}

#[derive(Clone, Debug, Serialize)]
pub struct CorrelationPoint {
    pub n: usize,
    /// `(1/N) Σ t(n) z(n)`.
    pub value: f64,
    /// `(1/N) Σ z(n)² - 2/(q-1)`.
    pub lower_bound: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ToeplitzCorrelation {
    pub q: u64,
    pub value: f64,
    pub lower_bound: f64,
    pub checkpoints: Vec<CorrelationPoint>,
    /// `value >= lower_bound` at every checkpoint.
    pub holds: bool,
}

/// Correlation of `t` with its reference `z` and the bound
/// `(1/N)Σz² - 2/(q-1)`, at the standard checkpoints.
pub fn toeplitz_correlation(spec: &ToeplitzSpec, n: usize) -> Result<ToeplitzCorrelation> {
    let t = build_toeplitz(spec, n)?;
    let zs = spec.z_ref.as_slice();
    let slack = 2.0 / (spec.q - 1) as f64;
    let mut checkpoints = Vec::new();
    let (mut cross, mut sq) = (0i64, 0i64);
    let mut m = 0;
    for c in checkpoint_positions(n) {
        while m < c {
            cross += (t.as_slice()[m] * zs[m]) as i64;
            sq += (zs[m] * zs[m]) as i64;
            m += 1;
        }
        checkpoints.push(CorrelationPoint {
            n: c,
            value: cross as f64 / c as f64,
            lower_bound: sq as f64 / c as f64 - slack,
        });
    }
    let last = checkpoints.last().expect("n >= 1");
    Ok(ToeplitzCorrelation {
        q: spec.q,
        value: last.value,
        lower_bound: last.lower_bound,
        holds: checkpoints.iter().all(|p| p.value >= p.lower_bound),
        checkpoints,
    })
}

/// Shape of the end windows `I_{m,k,L} = ((k+1)q^m - L, (k+1)q^m]`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct IntervalParams {
    pub q: u64,
    pub m: u32,
    pub ell: u32,
    pub k_count: usize,
}

impl IntervalParams {
    pub fn new(q: u64, m: u32, ell: u32, k_count: usize) -> Result<Self> {
        check_q(q)?;
        if ell == 0 || ell >= m {
            return Err(invalid("ell", format!("need 1 <= ell < m, got ell={ell}, m={m}")));
        }
        if k_count == 0 {
            return Err(invalid("k", "interval count must be at least 1"));
        }
        let block = q.checked_pow(m).ok_or_else(|| invalid("m", "q^m overflows"))?;
        let span = block as u128 * k_count as u128;
        if span > MAX_TABLE_LEN as u128 {
            return Err(Error::BudgetExceeded {
                what: "K·q^m",
                requested: span.min(usize::MAX as u128) as usize,
                limit: MAX_TABLE_LEN,
            });
        }
        Ok(IntervalParams { q, m, ell, k_count })
    }

    pub fn interval_len(&self) -> usize {
        self.q.pow(self.m) as usize
    }

    pub fn window_len(&self) -> usize {
        self.q.pow(self.ell) as usize
    }

    /// Positions covered by `k = 0..K`.
    pub fn span(&self) -> usize {
        self.interval_len() * self.k_count
    }

    /// First position of `I_{m,k,L}` shifted left by `s`.
    fn window_start(&self, k: usize, s: usize) -> usize {
        (k + 1) * self.interval_len() - self.window_len() - s + 1
    }
}

/// Non-initial pattern inside one window: per position, 0 initial, 1 type 1
/// (owner `j <= m`), 2 type 2.
fn window_types(table: &InitialTable, p: &IntervalParams, k: usize) -> Vec<u8> {
    let start = p.window_start(k, 0);
    (start..start + p.window_len())
        .map(|n| {
            if table.is_initial(n) {
                0
            } else if table.owner(n) <= p.m as usize {
                1
            } else {
                2
            }
        })
        .collect()
}

fn good_flags(table: &InitialTable, p: &IntervalParams) -> Vec<bool> {
    (0..p.k_count)
        .into_par_iter()
        .map(|k| !window_types(table, p, k).contains(&2))
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct IntervalReport {
    pub params: IntervalParams,
    pub interval_len: usize,
    pub window_len: usize,
    pub good: usize,
    pub non_good: usize,
    pub non_good_fraction: f64,
    /// `q^{-(q^m - m - L)}`, as a float and as the exponent of `q`.
    pub non_good_bound: f64,
    pub non_good_bound_exponent: i64,
    pub within_bound: bool,
    /// `L·(1/q + ... + 1/q^ℓ) = q^{ℓ-1} + ... + 1`.
    pub expected_type1: u64,
    /// Type-1 counts seen over good `k >= 1`, sorted and deduplicated.
    pub observed_type1: Vec<u64>,
    pub type1_exact: bool,
    /// Type-1 mask of the first good `k >= 1`, as '0'/'1' per position.
    pub mask: String,
    pub masks_identical: bool,
}

/// Type analysis of the end windows for `k = 0..K`. Density and mask
/// comparisons use good `k >= 1`.
pub fn interval_analytics(p: &IntervalParams) -> Result<IntervalReport> {
    let table = classify_initials(p.q, p.span())?;
    Ok(interval_analytics_with(&table, p))
}

fn interval_analytics_with(table: &InitialTable, p: &IntervalParams) -> IntervalReport {
    let good = good_flags(table, p);
    let good_count = good.iter().filter(|&&g| g).count();
    let non_good = p.k_count - good_count;
    let exponent = p.interval_len() as i64 - p.m as i64 - p.window_len() as i64;
    let bound = (p.q as f64).powi(-(exponent.clamp(i32::MIN as i64, i32::MAX as i64) as i32));
    let expected_type1: u64 = (0..p.ell).map(|i| p.q.pow(i)).sum();

    let masks: Vec<Vec<u8>> = (1..p.k_count)
        .into_par_iter()
        .filter(|&k| good[k])
        .map(|k| window_types(table, p, k))
        .collect();
    let mut observed: Vec<u64> = masks
        .iter()
        .map(|m| m.iter().filter(|&&t| t == 1).count() as u64)
        .collect();
    observed.sort_unstable();
    observed.dedup();
    let reference = masks.first();
    let masks_identical = masks.iter().all(|m| Some(m) == reference);
    let mask = reference
        .map(|m| m.iter().map(|&t| if t == 1 { '1' } else { '0' }).collect())
        .unwrap_or_default();
    let non_good_fraction = non_good as f64 / p.k_count as f64;
    IntervalReport {
        params: *p,
        interval_len: p.interval_len(),
        window_len: p.window_len(),
        good: good_count,
        non_good,
        non_good_fraction,
        non_good_bound: bound,
        non_good_bound_exponent: exponent,
        within_bound: non_good_fraction <= bound,
        type1_exact: !observed.is_empty() && observed.iter().all(|&c| c == expected_type1),
        expected_type1,
        observed_type1: observed,
        mask,
        masks_identical,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EntropyBound {
    pub params: IntervalParams,
    pub good: usize,
    /// Distinct `t(I_{m,k,L})` over good `k`.
    pub distinct_blocks: usize,
    /// `log2(distinct_blocks) / L`.
    pub estimate: f64,
    /// Best estimate over windows shifted left by `s` in `0..=q^m - L`,
    /// when scanned.
    pub best_offset: Option<usize>,
    pub best_estimate: Option<f64>,
}

fn distinct_window_blocks(
    t: &[i8],
    p: &IntervalParams,
    good: &[bool],
    s: usize,
) -> usize {
    let len = p.window_len();
    let codes: HashSet<u128> = (0..p.k_count)
        .filter(|&k| good[k])
        .map(|k| {
            let start = p.window_start(k, s) - 1;
            t[start..start + len]
                .iter()
                .fold(0u128, |c, &v| (c << 2) | letter_code(v) as u128)
        })
        .collect();
    codes.len()
}

/// Finite-scale lower-bound estimate `log2 |{t(I_{m,k,L}) : k good}| / L`.
pub fn toeplitz_entropy_lower_bound(spec: &ToeplitzSpec, p: &IntervalParams) -> Result<f64> {
    Ok(toeplitz_entropy_bound(spec, p, false)?.estimate)
}

/// As `toeplitz_entropy_lower_bound`, with the counts and optionally the scan
/// over window offsets.
pub fn toeplitz_entropy_bound(
    spec: &ToeplitzSpec,
    p: &IntervalParams,
    scan_offsets: bool,
) -> Result<EntropyBound> {
    if p.q != spec.q {
        return Err(invalid("q", "interval parameters and spec disagree on q"));
    }
    if p.window_len() as u64 > MAX_ENTROPY_WINDOW {
        return Err(invalid(
            "ell",
            format!("window q^ell = {} exceeds {MAX_ENTROPY_WINDOW}", p.window_len()),
        ));
    }
    spec.check_ref(p.span())?;
    let table = classify_initials(p.q, p.span())?;
    let t = build_from_table(&spec.z_ref, &table);
    let good = good_flags(&table, p);
    let l = p.window_len() as f64;
    let estimate_of = |count: usize| if count == 0 { 0.0 } else { (count as f64).log2() / l };
    let distinct = distinct_window_blocks(t.as_slice(), p, &good, 0);
    let (best_offset, best_estimate) = if scan_offsets {
        let max_s = p.interval_len() - p.window_len();
        let (s, c) = (0..=max_s)
            .into_par_iter()
            .map(|s| (s, distinct_window_blocks(t.as_slice(), p, &good, s)))
            .reduce(|| (0, 0), |a, b| if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) { b } else { a });
        (Some(s), Some(estimate_of(c)))
    } else {
        (None, None)
    };
    Ok(EntropyBound {
        params: *p,
        good: good.iter().filter(|&&g| g).count(),
        distinct_blocks: distinct,
        estimate: estimate_of(distinct),
        best_offset,
        best_estimate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numbergen::mobius_prefix;
    use proptest::prelude::*;

    /// Owner by definition: scan j upward, tracking which j are initial.
    fn naive_owner(q: u64, n: usize) -> Vec<usize> {
        let mut initial: Vec<usize> = Vec::new();
        (1..=n)
            .map(|x| {
                let found = initial.iter().copied().find(|&j| {
                    match (q as u128).checked_pow(j as u32) {
                        Some(p) => x > j && ((x - j) as u128) % p == 0,
                        None => false,
                    }
                });
                match found {
                    Some(j) => j,
                    None => {
                        initial.push(x);
                        x
                    }
                }
            })
            .collect()
    }

    #[test]
    fn small_tables() {
        let t = classify_initials(3, 10).unwrap();
        assert_eq!(t.initials().collect::<Vec<_>>(), vec![1, 2, 3, 5, 6, 8, 9]);
        assert_eq!(t.non_initials().collect::<Vec<_>>(), vec![4, 7, 10]);
        assert!([4, 7, 10].iter().all(|&n| t.owner(n) == 1));
        let t = classify_initials(2, 6).unwrap();
        assert_eq!(t.non_initials().collect::<Vec<_>>(), vec![3, 5, 6]);
        assert_eq!((t.owner(3), t.owner(5), t.owner(6)), (1, 1, 2));
        assert!(classify_initials(1, 10).is_err());
    }

    #[test]
    fn matches_naive_owner() {
        for q in [2, 3, 4, 7] {
            let t = classify_initials(q, 3000).unwrap();
            let naive = naive_owner(q, 3000);
            assert!((1..=3000).all(|n| t.owner(n) == naive[n - 1]), "q={q}");
        }
    }

    #[test]
    fn partition_and_density() {
        for q in [2, 3, 5, 10] {
            let t = classify_initials(q, 200_000).unwrap();
            assert_eq!(t.verify_partition(), Ok(()));
            assert!(t.max_prefix_non_initial_density() <= 1.0 / (q - 1) as f64);
        }
    }

    #[test]
    fn verify_catches_tampering() {
        let mut t = classify_initials(3, 100).unwrap();
        t.owner[6] = 7;
        assert_eq!(t.verify_partition(), Err(7));
    }

    #[test]
    fn toeplitz_values() {
        let z = SignSeq::from_vec(vec![-1, 1, 0, 1, 1, -1, 0, 1, 1, -1]).unwrap();
        let spec = ToeplitzSpec::new(3, z.clone()).unwrap();
        let t = build_toeplitz(&spec, 10).unwrap();
        assert_eq!((t[4], t[7], t[10]), (-1, -1, -1));
        for n in [1, 2, 3, 5, 6, 8, 9] {
            assert_eq!(t[n], z[n]);
        }
        assert!(build_toeplitz(&spec, 11).is_err());
    }

    #[test]
    fn toeplitz_property() {
        let mu = mobius_prefix(60_000).unwrap();
        let spec = ToeplitzSpec::new(3, mu).unwrap();
        let t = build_toeplitz(&spec, 60_000).unwrap();
        let table = classify_initials(3, 60_000).unwrap();
        for n in 1..=1000 {
            let Some(period) = 3usize.checked_pow(table.owner(n) as u32) else {
                continue;
            };
            for k in 1usize..=5 {
                let m = n.saturating_add(k.saturating_mul(period));
                if m <= 60_000 {
                    assert_eq!(t[n], t[m], "n={n} k={k}");
                }
            }
        }
    }

    #[test]
    fn correlation_examples() {
        let zeros = ToeplitzSpec::new(5, SignSeq::zeros(1000).unwrap()).unwrap();
        let c = toeplitz_correlation(&zeros, 1000).unwrap();
        assert_eq!(c.value, 0.0);
        assert_eq!(c.lower_bound, -0.5);

        let signs: Vec<i8> = (0..100_000u64).map(|i| if (i * i + 3 * i) % 7 < 3 { 1 } else { -1 }).collect();
        let spec = ToeplitzSpec::new(10, SignSeq::from_vec(signs).unwrap()).unwrap();
        let c = toeplitz_correlation(&spec, 100_000).unwrap();
        assert!(c.holds);
        assert!(c.value >= 1.0 - 2.0 / 9.0);
    }

    #[test]
    fn interval_example_q3() {
        let p = IntervalParams::new(3, 4, 2, 1000).unwrap();
        let r = interval_analytics(&p).unwrap();
        assert_eq!(r.expected_type1, 4);
        assert!(r.type1_exact, "{:?}", r.observed_type1);
        assert!(r.masks_identical);
        assert_eq!(r.non_good, 0);
        assert!(r.within_bound);
        assert_eq!(r.mask.len(), 9);
    }

    #[test]
    fn type_two_hits_are_sparse() {
        // A_{m+h}* meets each I_{m,k} in at most one point
        let (q, m) = (3u64, 3u32);
        let block = q.pow(m) as usize;
        let table = classify_initials(q, block * 2000).unwrap();
        for k in 0..2000 {
            let mut seen = HashSet::new();
            for n in k * block + 1..=(k + 1) * block {
                let j = table.owner(n);
                if n != j && j > m as usize {
                    assert!(seen.insert(j), "k={k} j={j}");
                }
            }
        }
    }

    #[test]
    fn entropy_of_zero_reference() {
        let p = IntervalParams::new(3, 3, 1, 200).unwrap();
        let spec = ToeplitzSpec::new(3, SignSeq::zeros(p.span()).unwrap()).unwrap();
        let b = toeplitz_entropy_bound(&spec, &p, true).unwrap();
        assert_eq!(b.distinct_blocks, 1);
        assert_eq!(b.estimate, 0.0);
        assert_eq!(b.best_estimate, Some(0.0));
    }

    #[test]
    fn rejects_bad_params() {
        assert!(IntervalParams::new(3, 2, 2, 10).is_err());
        assert!(IntervalParams::new(3, 4, 0, 10).is_err());
        assert!(IntervalParams::new(10, 9, 2, 1000).is_err());
        let p = IntervalParams::new(2, 7, 6, 10).unwrap();
        let spec = ToeplitzSpec::new(2, SignSeq::zeros(p.span()).unwrap()).unwrap();
        assert!(toeplitz_entropy_bound(&spec, &p, false).is_err());
    }

    proptest! {
        #[test]
        fn correlation_bound_every_prefix(
            v in prop::collection::vec(-1i8..=1, 1..400),
            q in 2u64..8,
        ) {
            let z = SignSeq::from_vec(v.clone()).unwrap();
            let spec = ToeplitzSpec::new(q, z).unwrap();
            let t = build_toeplitz(&spec, v.len()).unwrap();
            let (mut cross, mut sq) = (0i64, 0i64);
            for n in 0..v.len() {
                cross += (t.as_slice()[n] * v[n]) as i64;
                sq += (v[n] * v[n]) as i64;
                let len = (n + 1) as f64;
                prop_assert!(cross as f64 / len >= sq as f64 / len - 2.0 / (q - 1) as f64);
            }
        }

        #[test]
        fn initial_positions_copy_reference(v in prop::collection::vec(-1i8..=1, 1..400), q in 2u64..8) {
            let z = SignSeq::from_vec(v).unwrap();
            let spec = ToeplitzSpec::new(q, z.clone()).unwrap();
            let t = build_toeplitz(&spec, z.len()).unwrap();
            let table = classify_initials(q, z.len()).unwrap();
            for n in table.initials() {
                prop_assert_eq!(t[n], z[n]);
            }
        }
    }
}

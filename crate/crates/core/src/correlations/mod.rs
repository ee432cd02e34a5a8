//! Correlation sums: multi-lag autocorrelations of a sequence, the batteries
//! built from them, sums weighted by orbit samples, and the Davenport scan
//! over additive characters.

mod davenport;
mod sampler;

pub use davenport::{davenport_scan, DavenportScan, MIN_GRID};
pub use sampler::{sarnak_sum, strong_sarnak_sum, Observable, OrbitSampler};

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::seqcore::SignSeq;

/// Number of checkpoints on every curve.
pub const CHECKPOINTS: usize = 10;
/// Largest number of specs a battery may enumerate.
pub const BATTERY_BUDGET: u64 = 100_000;

const CHUNK: usize = 1 << 16;

/// Lags `a_1 < ... < a_r` and exponents `i_0, ..., i_r` in {1, 2}.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CorrelationSpec {
    lags: Vec<usize>,
    exponents: Vec<u8>,
}

impl CorrelationSpec {
    pub fn new(lags: Vec<usize>, exponents: Vec<u8>) -> Result<Self> {
        if lags.first().is_some_and(|&a| a == 0) {
            return Err(invalid("lags", "lags must be at least 1"));
        }
        if lags.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("lags", "lags must be strictly increasing"));
        }
        if exponents.len() != lags.len() + 1 {
            return Err(invalid(
                "exponents",
                format!("expected {} exponents, got {}", lags.len() + 1, exponents.len()),
            ));
        }
        if exponents.iter().any(|&e| e != 1 && e != 2) {
            return Err(invalid("exponents", "exponents must be 1 or 2"));
        }
        Ok(CorrelationSpec { lags, exponents })
    }

    /// `(1/N) Σ z(n)`.
    pub fn mean() -> Self {
        CorrelationSpec {
            lags: vec![],
            exponents: vec![1],
        }
    }

    pub fn lags(&self) -> &[usize] {
        &self.lags
    }

    pub fn exponents(&self) -> &[u8] {
        &self.exponents
    }

    pub fn r(&self) -> usize {
        self.lags.len()
    }

    pub fn max_lag(&self) -> usize {
        self.lags.last().copied().unwrap_or(0)
    }

    /// Every exponent is 1.
    pub fn is_linear(&self) -> bool {
        self.exponents.iter().all(|&e| e == 1)
    }

    /// Every exponent is 2; such specs only see `z²`.
    pub fn is_even(&self) -> bool {
        self.exponents.iter().all(|&e| e == 2)
    }

    /// `(offset, exponent)` pairs with offset 0 for the leading factor.
    fn factors(&self) -> Vec<(usize, u8)> {
        std::iter::once(0)
            .chain(self.lags.iter().copied())
            .zip(self.exponents.iter().copied())
            .collect()
    }
}

impl fmt::Display for CorrelationSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: Vec<String>| v.join(",");
        write!(
            f,
            "lags=({}) exponents=({})",
            join(self.lags.iter().map(|a| a.to_string()).collect()),
            join(self.exponents.iter().map(|e| e.to_string()).collect())
        )
    }
}

/// Normalized partial sums at `N' = i·N/10`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorrelationCurve {
    pub checkpoints: Vec<(usize, f64)>,
}

impl CorrelationCurve {
    pub fn final_value(&self) -> f64 {
        self.checkpoints.last().map(|c| c.1).unwrap_or(0.0)
    }
}

pub(crate) fn checkpoint_positions(n: usize) -> Vec<usize> {
    let mut v: Vec<usize> = (1..=CHECKPOINTS)
        .map(|i| i * n / CHECKPOINTS)
        .filter(|&c| c > 0)
        .collect();
    v.dedup();
    v
}

/// Exact running sums `Σ_{n<=c} term(n)` at each checkpoint `c`.
fn int_running_sums(cps: &[usize], term: impl Fn(usize) -> i64 + Sync) -> Vec<i64> {
    let mut acc = 0i64;
    let mut start = 1;
    cps.iter()
        .map(|&c| {
            acc += (start..c + 1)
                .into_par_iter()
                .with_min_len(CHUNK)
                .map(&term)
                .sum::<i64>();
            start = c + 1;
            acc
        })
        .collect()
}

fn pairwise(v: &[f64]) -> f64 {
    match v.len() {
        0 => 0.0,
        1 => v[0],
        n => pairwise(&v[..n / 2]) + pairwise(&v[n / 2..]),
    }
}

/// Running sums of a real term. Chunks are fixed and their sums are combined
/// by a pairwise tree, so the result does not depend on the thread count.
pub(crate) fn real_running_sums(cps: &[usize], term: impl Fn(usize) -> f64 + Sync) -> Vec<f64> {
    let mut acc = 0.0;
    let mut start = 1;
    cps.iter()
        .map(|&c| {
            let chunk_sums: Vec<f64> = (start..=c)
                .step_by(CHUNK)
                .collect::<Vec<_>>()
                .into_par_iter()
                .map(|s| (s..=(s + CHUNK - 1).min(c)).map(&term).sum::<f64>())
                .collect();
            acc += pairwise(&chunk_sums);
            start = c + 1;
            acc
        })
        .collect()
}

fn normalize<T: Copy + Into<f64>>(cps: &[usize], sums: Vec<T>) -> CorrelationCurve {
    CorrelationCurve {
        checkpoints: cps
            .iter()
            .zip(sums)
            .map(|(&c, s)| (c, s.into() / c as f64))
            .collect(),
    }
}

fn check_prefix(z: &SignSeq, n: usize, max_lag: usize) -> Result<()> {
    if n == 0 {
        return Err(invalid("n", "sum length must be at least 1"));
    }
    let required = n + max_lag;
    if z.len() < required {
        return Err(Error::PrefixTooShort {
            required,
            available: z.len(),
        });
    }
    Ok(())
}

/// `∏_s z^{i_s}(n + a_s)` at 0-based position `i` of `n`.
#[inline]
fn product_at(data: &[i8], factors: &[(usize, u8)], i: usize) -> i64 {
    let mut p = 1i64;
    for &(a, e) in factors {
        let v = data[i + a] as i64;
        p *= if e == 2 { v * v } else { v };
        if p == 0 {
            break;
        }
    }
    p
}

/// `(1/N') Σ_{n<=N'} ∏_s z^{i_s}(n + a_s)` at the checkpoints of `N`.
/// Needs `N + max lag` terms of `z`. Sums are exact integers.
pub fn chowla_sum(z: &SignSeq, spec: &CorrelationSpec, n: usize) -> Result<CorrelationCurve> {
    check_prefix(z, n, spec.max_lag())?;
    let data = z.as_slice();
    let factors = spec.factors();
    let cps = checkpoint_positions(n);
    let sums = int_running_sums(&cps, |m| product_at(data, &factors, m - 1));
    Ok(normalize(&cps, sums.into_iter().map(|s| s as f64).collect()))
}

/// Whether a battery result backs a proven statement or is a finite-scale
/// consistency check of a conjecture.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ClaimKind {
    Theorem,
    Consistency,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpecResult {
    pub spec: CorrelationSpec,
    pub value: f64,
    pub curve: CorrelationCurve,
}

#[derive(Clone, Debug, Serialize)]
pub struct FamilyVerdict {
    pub specs: usize,
    pub max_abs: f64,
    /// Index into `BatteryReport::results` of the largest `|value|`.
    pub witness: Option<usize>,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct BatteryReport {
    pub n: usize,
    pub max_lag: usize,
    pub max_r: usize,
    pub tol: f64,
    pub claim: ClaimKind,
    pub results: Vec<SpecResult>,
    /// All specs (exponents in {1,2}, not all 2).
    pub full: FamilyVerdict,
    /// Only the specs with every exponent 1.
    pub linear: FamilyVerdict,
}

impl BatteryReport {
    pub fn full_witness(&self) -> Option<&SpecResult> {
        self.full.witness.map(|i| &self.results[i])
    }

    pub fn linear_witness(&self) -> Option<&SpecResult> {
        self.linear.witness.map(|i| &self.results[i])
    }
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1u64, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Number of specs `battery_specs` would enumerate, saturating.
pub fn battery_size(max_lag: usize, max_r: usize) -> u64 {
    (0..=max_r.min(max_lag) as u64)
        .map(|r| {
            let exps = 1u64.checked_shl(r as u32 + 1).unwrap_or(u64::MAX).saturating_sub(1);
            binomial(max_lag as u64, r).saturating_mul(exps)
        })
        .fold(0u64, |a, b| a.saturating_add(b))
}

fn lag_subsets(max_lag: usize, r: usize) -> Vec<Vec<usize>> {
    fn rec(from: usize, max_lag: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for a in from..=max_lag {
            cur.push(a);
            rec(a + 1, max_lag, r, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(1, max_lag, r, &mut Vec::new(), &mut out);
    out
}

/// All specs with `r <= max_r`, lags in `1..=max_lag` and exponents not all
/// 2, ordered by `r`, then lags, then exponents (lexicographically).
pub fn battery_specs(max_lag: usize, max_r: usize) -> Result<Vec<CorrelationSpec>> {
    let size = battery_size(max_lag, max_r);
    if size > BATTERY_BUDGET {
        return Err(Error::BudgetExceeded {
            what: "correlation specs",
            requested: size as usize,
            limit: BATTERY_BUDGET as usize,
        });
    }
    let mut out = Vec::with_capacity(size as usize);
    for r in 0..=max_r.min(max_lag) {
        for lags in lag_subsets(max_lag, r) {
            for mask in 0u32..(1 << (r + 1)) {
                // bit r - s of the mask is exponent s, so masks count up lexicographically
                let exponents: Vec<u8> = (0..=r).map(|s| 1 + ((mask >> (r - s)) & 1) as u8).collect();
                if exponents.iter().all(|&e| e == 2) {
                    continue;
                }
                out.push(CorrelationSpec {
                    lags: lags.clone(),
                    exponents,
                });
            }
        }
    }
    Ok(out)
}

fn verdict<'a>(results: impl Iterator<Item = (usize, &'a SpecResult)>, tol: f64) -> FamilyVerdict {
    let mut specs = 0;
    let mut max_abs = 0.0f64;
    let mut witness = None;
    for (i, r) in results {
        specs += 1;
        if witness.is_none() || r.value.abs() > max_abs {
            max_abs = r.value.abs();
            witness = Some(i);
        }
    }
    FamilyVerdict {
        specs,
        max_abs,
        witness,
        passed: max_abs < tol,
    }
}

/// Run every spec of `battery_specs(max_lag, max_r)` to length `N` and
/// compare the final `|value|` against `tol`, for the full family and for
/// the all-exponents-1 subfamily.
pub fn ch_battery(
    z: &SignSeq,
    max_lag: usize,
    max_r: usize,
    n: usize,
    tol: f64,
    claim: ClaimKind,
) -> Result<BatteryReport> {
    if !(tol > 0.0) {
        return Err(invalid("tol", "tolerance must be positive"));
    }
    let specs = battery_specs(max_lag, max_r)?;
    let needed = specs.iter().map(|s| s.max_lag()).max().unwrap_or(0);
    check_prefix(z, n, needed)?;
    let results = specs
        .into_iter()
        .map(|spec| {
            let curve = chowla_sum(z, &spec, n)?;
            Ok(SpecResult {
                value: curve.final_value(),
                spec,
                curve,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let full = verdict(results.iter().enumerate(), tol);
    let linear = verdict(
        results.iter().enumerate().filter(|(_, r)| r.spec.is_linear()),
        tol,
    );
    Ok(BatteryReport {
        n,
        max_lag,
        max_r,
        tol,
        claim,
        results,
        full,
        linear,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numbergen::mobius_prefix;
    use crate::seqcore::square_map;
    use crate::symbolicgen::{coded_example_prefix, squares_needed_prefix};
    use proptest::prelude::*;

    fn spec(lags: &[usize], exps: &[u8]) -> CorrelationSpec {
        CorrelationSpec::new(lags.to_vec(), exps.to_vec()).unwrap()
    }

    fn brute(z: &[i8], spec: &CorrelationSpec, n: usize) -> f64 {
        let mut s = 0i64;
        for m in 0..n {
            let mut p = z[m] as i64;
            if spec.exponents[0] == 2 {
                p *= p;
            }
            for (a, &e) in spec.lags.iter().zip(&spec.exponents[1..]) {
                let v = z[m + a] as i64;
                p *= v.pow(e as u32);
            }
            s += p;
        }
        s as f64 / n as f64
    }

    #[test]
    fn spec_validation() {
        assert!(CorrelationSpec::new(vec![2, 1], vec![1, 1, 1]).is_err());
        assert!(CorrelationSpec::new(vec![0], vec![1, 1]).is_err());
        assert!(CorrelationSpec::new(vec![1], vec![1]).is_err());
        assert!(CorrelationSpec::new(vec![1], vec![1, 3]).is_err());
        assert_eq!(spec(&[1, 3], &[2, 1, 1]).to_string(), "lags=(1,3) exponents=(2,1,1)");
    }

    #[test]
    fn alternating_lag_one() {
        let z = SignSeq::from_vec((0..101).map(|i| if i % 2 == 0 { 1 } else { -1 }).collect()).unwrap();
        let c = chowla_sum(&z, &spec(&[1], &[1, 1]), 100).unwrap();
        assert_eq!(c.checkpoints.len(), 10);
        assert!(c.checkpoints.iter().all(|&(_, v)| v == -1.0));
    }

    #[test]
    fn short_prefix_rejected() {
        let z = SignSeq::zeros(10).unwrap();
        match chowla_sum(&z, &spec(&[3], &[1, 1]), 8) {
            Err(Error::PrefixTooShort { required, available }) => {
                assert_eq!((required, available), (11, 10));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn checkpoints_small_n() {
        assert_eq!(checkpoint_positions(3), vec![1, 2, 3]);
        assert_eq!(checkpoint_positions(20), (1..=10).map(|i| 2 * i).collect::<Vec<_>>());
    }

    #[test]
    fn battery_enumeration() {
        let specs = battery_specs(5, 2).unwrap();
        assert_eq!(specs.len() as u64, battery_size(5, 2));
        assert_eq!(specs.len(), 1 + 5 * 3 + 10 * 7);
        assert_eq!(specs[0], CorrelationSpec::mean());
        assert_eq!(specs[1], spec(&[1], &[1, 1]));
        assert_eq!(specs[2], spec(&[1], &[1, 2]));
        assert_eq!(specs[3], spec(&[1], &[2, 1]));
        assert!(specs.iter().all(|s| !s.is_even()));
        assert!(matches!(battery_specs(40, 10), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn mobius_lag_one_small() {
        let mu = mobius_prefix(1_000_001).unwrap();
        let v = chowla_sum(&mu, &spec(&[1], &[1, 1]), 1_000_000).unwrap().final_value();
        assert!(v.abs() < 0.01, "{v}");
    }

    #[test]
    fn squares_needed_separation() {
        let z = squares_needed_prefix(7, 400_010).unwrap();
        let r = ch_battery(&z, 3, 2, 400_000, 0.01, ClaimKind::Theorem).unwrap();
        assert!(r.linear.passed, "{}", r.linear.max_abs);
        assert!(!r.full.passed);
        let w = r.full_witness().unwrap();
        assert_eq!(w.spec, spec(&[1], &[2, 1]));
        assert!((w.value - 0.25).abs() < 0.01);
    }

    #[test]
    fn coded_example_fails_at_lag_one() {
        let z = coded_example_prefix(2, 3, 1_000_010).unwrap();
        let r = ch_battery(&z, 2, 1, 1_000_000, 0.01, ClaimKind::Theorem).unwrap();
        assert!(!r.full.passed);
        // (1,1), (1,2) and (2,1) at lag 1 all have |value| = 1/64 in the limit
        let w = r.full_witness().unwrap();
        assert_eq!(w.spec.lags(), &[1]);
        assert!((w.value.abs() - 1.0 / 64.0).abs() < 0.004, "{}", w.value);
        let lin = r.linear_witness().unwrap();
        assert_eq!(lin.spec, spec(&[1], &[1, 1]));
        assert!((lin.value - 1.0 / 64.0).abs() < 0.004, "{}", lin.value);
        assert!(!r.linear.passed);
    }

    #[test]
    fn coded_example_k0_five() {
        let z = coded_example_prefix(5, 11, 1_000_010).unwrap();
        // z(n) and z(n+a) share a coordinate of ω only for a = k0 - 1
        for a in [1, 2, 3, 5, 6] {
            let v = chowla_sum(&z, &spec(&[a], &[1, 1]), 1_000_000).unwrap().final_value();
            assert!(v.abs() < 0.004, "lag {a}: {v}");
        }
        let v = chowla_sum(&z, &spec(&[4], &[1, 1]), 1_000_000).unwrap().final_value();
        assert!((v - 1.0 / 64.0).abs() < 0.004, "{v}");
    }

    proptest! {
        #[test]
        fn matches_brute_force(
            v in prop::collection::vec(-1i8..=1, 30..200),
            lags in prop::collection::btree_set(1usize..8, 0..4),
            seed in any::<u32>(),
        ) {
            let lags: Vec<usize> = lags.into_iter().collect();
            let exps: Vec<u8> = (0..=lags.len()).map(|s| 1 + ((seed >> s) & 1) as u8).collect();
            let sp = spec(&lags, &exps);
            let n = v.len() - 8;
            let z = SignSeq::from_vec(v.clone()).unwrap();
            let got = chowla_sum(&z, &sp, n).unwrap().final_value();
            prop_assert_eq!(got, brute(&v, &sp, n));
        }

        #[test]
        fn even_spec_sees_only_square(
            v in prop::collection::vec(-1i8..=1, 30..200),
            lags in prop::collection::btree_set(1usize..8, 0..4),
        ) {
            let lags: Vec<usize> = lags.into_iter().collect();
            let z = SignSeq::from_vec(v).unwrap();
            let n = z.len() - 8;
            let even = spec(&lags, &vec![2; lags.len() + 1]);
            let lin = spec(&lags, &vec![1; lags.len() + 1]);
            prop_assert_eq!(chowla_sum(&z, &even, n).unwrap(), chowla_sum(&square_map(&z), &lin, n).unwrap());
        }

        #[test]
        fn squares_drop_out_for_signs(
            v in prop::collection::vec(prop::bool::ANY, 30..200),
            lags in prop::collection::btree_set(1usize..8, 1..4),
            drop in any::<u32>(),
        ) {
            let z = SignSeq::from_vec(v.iter().map(|&b| if b { 1 } else { -1 }).collect()).unwrap();
            let n = z.len() - 8;
            let all: Vec<usize> = std::iter::once(0).chain(lags.iter().copied()).collect();
            let exps: Vec<u8> = (0..all.len()).map(|s| 1 + ((drop >> s) & 1) as u8).collect();
            prop_assume!(exps.contains(&1));
            let kept: Vec<usize> = all.iter().zip(&exps).filter(|(_, &e)| e == 1).map(|(&a, _)| a).collect();
            // re-anchor the kept offsets at the first one
            let base = kept[0];
            let reduced = spec(&kept[1..].iter().map(|a| a - base).collect::<Vec<_>>(), &vec![1; kept.len()]);
            let shifted = crate::seqcore::shift(&z, base).unwrap();
            let full = chowla_sum(&z, &spec(&all[1..], &exps), n).unwrap().final_value();
            prop_assert_eq!(full, chowla_sum(&shifted, &reduced, n).unwrap().final_value());
        }

        #[test]
        fn bounded_by_support_density(
            v in prop::collection::vec(-1i8..=1, 30..200),
            lags in prop::collection::btree_set(1usize..8, 0..4),
            seed in any::<u32>(),
        ) {
            let lags: Vec<usize> = lags.into_iter().collect();
            let mut exps: Vec<u8> = (0..=lags.len()).map(|s| 1 + ((seed >> s) & 1) as u8).collect();
            exps[0] = 1;
            let z = SignSeq::from_vec(v.clone()).unwrap();
            let n = z.len() - 8;
            let curve = chowla_sum(&z, &spec(&lags, &exps), n).unwrap();
            for (c, val) in curve.checkpoints {
                let density = v[..c].iter().filter(|&&x| x != 0).count() as f64 / c as f64;
                prop_assert!(val.abs() <= density + 1e-15);
            }
        }
    }
}

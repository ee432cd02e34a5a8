//! Arithmetic sequences: Möbius, Liouville and the generalized Möbius
//! function of a set of pairwise coprime squares, plus admissibility of
//! {0,1}-blocks with respect to such a set.

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::seqcore::{Block, SignSeq};

/// Smallest-prime-factor table for `1..=n`, built by a linear sieve.
///
/// `spf[1] == 1`; for `m >= 2`, `spf[m]` is the least prime dividing `m`.
pub struct Sieve {
    spf: Vec<u32>,
    primes: Vec<u32>,
}

impl Sieve {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("n", "prefix length must be at least 1"));
        }
        if n > u32::MAX as usize {
            return Err(invalid("n", "sieve bound exceeds u32 range"));
        }
        let mut spf = vec![0u32; n + 1];
        let mut primes = Vec::new();
        spf[1] = 1;
        for i in 2..=n {
            if spf[i] == 0 {
                spf[i] = i as u32;
                primes.push(i as u32);
            }
            let si = spf[i];
            for &p in &primes {
                let m = i * p as usize;
                if p > si || m > n {
                    break;
                }
                spf[m] = p;
            }
        }
        Ok(Sieve { spf, primes })
    }

    pub fn bound(&self) -> usize {
        self.spf.len() - 1
    }

    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    pub fn smallest_prime_factor(&self, m: usize) -> u32 {
        self.spf[m]
    }

    /// μ and λ on `1..=bound` in one pass over the table.
    pub fn mobius_liouville(&self) -> (SignSeq, SignSeq) {
        let n = self.bound();
        let mut mu = vec![0i8; n + 1];
        let mut lambda = vec![0i8; n + 1];
        mu[1] = 1;
        lambda[1] = 1;
        for i in 2..=n {
            let p = self.spf[i] as usize;
            let m = i / p;
            lambda[i] = -lambda[m];
            mu[i] = if self.spf[m] as usize == p && m > 1 {
                0
            } else {
                -mu[m]
            };
        }
        mu.remove(0);
        lambda.remove(0);
        (SignSeq::from_raw(mu), SignSeq::from_raw(lambda))
    }
}

/// `μ(1), ..., μ(n)`.
pub fn mobius_prefix(n: usize) -> Result<SignSeq> {
    Ok(Sieve::new(n)?.mobius_liouville().0)
}

/// `λ(1), ..., λ(n)` with `λ(m) = (-1)^Ω(m)`.
pub fn liouville_prefix(n: usize) -> Result<SignSeq> {
    Ok(Sieve::new(n)?.mobius_liouville().1)
}

/// A set ℬ = {b_k = a_k²} with pairwise coprime `a_k >= 2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BSet {
    a_values: Vec<u64>,
    b_values: Vec<u64>,
}

impl BSet {
    /// Build from the squares `b_k`. Each must be a perfect square of some
    /// `a_k >= 2`, and the roots must be pairwise coprime.
    pub fn from_squares(b_values: &[u64]) -> Result<Self> {
        if b_values.is_empty() {
            return Err(invalid("bset", "at least one element is required"));
        }
        let mut b: Vec<u64> = b_values.to_vec();
        b.sort_unstable();
        b.dedup();
        let mut a = Vec::with_capacity(b.len());
        for &bk in &b {
            let root = isqrt(bk);
            if root * root != bk {
                return Err(invalid("bset", format!("{bk} is not a perfect square")));
            }
            if root < 2 {
                return Err(invalid("bset", format!("{bk} must be the square of an integer >= 2")));
            }
            a.push(root);
        }
        for i in 0..a.len() {
            for j in i + 1..a.len() {
                if gcd(a[i], a[j]) != 1 {
                    return Err(invalid(
                        "bset",
                        format!("roots {} and {} are not coprime", a[i], a[j]),
                    ));
                }
            }
        }
        Ok(BSet {
            a_values: a,
            b_values: b,
        })
    }

    /// All `p²` with `p` prime and `p² <= bound`. This is the part of the
    /// classical set that constrains blocks of length up to `bound`.
    pub fn prime_squares(bound: u64) -> Result<Self> {
        let root = isqrt(bound);
        if root < 2 {
            return Err(invalid("bset", "bound admits no prime square"));
        }
        Self::prime_squares_with_roots(root)
    }

    /// All `p²` with `p` prime and `p <= root_bound`. Generating `μ_ℬ` up to
    /// `N` needs every root `a_k <= N`, since the sign counts `a_k | n`.
    pub fn prime_squares_with_roots(root_bound: u64) -> Result<Self> {
        if root_bound < 2 {
            return Err(invalid("bset", "root bound admits no prime"));
        }
        let primes = Sieve::new(root_bound as usize)?.primes().to_vec();
        Ok(BSet {
            a_values: primes.iter().map(|&p| p as u64).collect(),
            b_values: primes.iter().map(|&p| (p as u64) * (p as u64)).collect(),
        })
    }

    pub fn a_values(&self) -> &[u64] {
        &self.a_values
    }

    pub fn b_values(&self) -> &[u64] {
        &self.b_values
    }

    /// `∏ (1 - 1/b_k)` over the materialized elements.
    pub fn free_density(&self) -> f64 {
        self.b_values
            .iter()
            .map(|&b| 1.0 - 1.0 / b as f64)
            .product()
    }
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `μ_ℬ(1), ..., μ_ℬ(n)`: zero when some `b_k | m`, otherwise
/// `(-1)^{#{k : a_k | m}}`.
pub fn mu_b_prefix(bset: &BSet, n: usize) -> Result<SignSeq> {
    if n == 0 {
        return Err(invalid("n", "prefix length must be at least 1"));
    }
    // bit 0: parity of #{a_k | m}; bit 1: some b_k | m
    let mut state = vec![0u8; n + 1];
    for (&a, &b) in bset.a_values.iter().zip(&bset.b_values) {
        let a = a as usize;
        if a > n {
            continue;
        }
        for m in (a..=n).step_by(a) {
            state[m] ^= 1;
        }
        if b as usize <= n {
            for m in (b as usize..=n).step_by(b as usize) {
                state[m] |= 2;
            }
        }
    }
    let data = state[1..]
        .iter()
        .map(|&s| match s {
            0 => 1,
            1 => -1,
            _ => 0,
        })
        .collect();
    Ok(SignSeq::from_raw(data))
}

/// Whether a {0,1}-block is ℬ-admissible: for every `b` in the set with
/// `b <= len(block)`, the support misses at least one residue class mod `b`.
/// Elements larger than the block length cannot be violated.
pub fn is_admissible(block: &Block, bset: &BSet) -> bool {
    let len = block.len() as u64;
    bset.b_values
        .iter()
        .take_while(|&&b| b <= len)
        .all(|&b| {
            let mut hit = vec![false; b as usize];
            let mut distinct = 0u64;
            for &i in block.support() {
                let r = i % b as usize;
                if !hit[r] {
                    hit[r] = true;
                    distinct += 1;
                }
            }
            distinct < b
        })
}

pub const MAX_ADMISSIBLE_LEN: usize = 30;

/// Exact number of ℬ-admissible {0,1}-blocks of length `n`, by depth-first
/// enumeration. A branch is cut as soon as a residue class is filled
/// completely; it is counted wholesale once every constraint already has a
/// residue class whose positions are all behind the cursor and empty.
pub fn admissible_block_count(n: usize, bset: &BSet) -> Result<u64> {
    if n > MAX_ADMISSIBLE_LEN {
        return Err(Error::BudgetExceeded {
            what: "admissible block length",
            requested: n,
            limit: MAX_ADMISSIBLE_LEN,
        });
    }
    let moduli: Vec<usize> = bset
        .b_values
        .iter()
        .take_while(|&&b| b as usize <= n)
        .map(|&b| b as usize)
        .collect();
    let mut search = AdmissibleSearch {
        n,
        occupied: moduli.iter().map(|&b| vec![false; b]).collect(),
        filled: vec![0; moduli.len()],
        moduli,
    };
    Ok(search.count(0))
}

struct AdmissibleSearch {
    n: usize,
    moduli: Vec<usize>,
    occupied: Vec<Vec<bool>>,
    filled: Vec<usize>,
}

impl AdmissibleSearch {
    /// Some class mod `moduli[k]` has all its positions `< pos` and none occupied.
    fn settled(&self, k: usize, pos: usize) -> bool {
        let b = self.moduli[k];
        // positions of class r are r, r+b, ...; the last one below n is
        // r + b*floor((n-1-r)/b). It is behind the cursor iff < pos.
        (0..b).any(|r| !self.occupied[k][r] && r + b * ((self.n - 1 - r) / b) < pos)
    }

    fn count(&mut self, pos: usize) -> u64 {
        if pos == self.n {
            return 1;
        }
        if (0..self.moduli.len()).all(|k| self.settled(k, pos)) {
            return 1u64 << (self.n - pos);
        }
        // letter 0
        let mut total = self.count(pos + 1);
        // letter 1, unless it would complete some residue system
        let blocked = self.moduli.iter().enumerate().any(|(k, &b)| {
            !self.occupied[k][pos % b] && self.filled[k] + 1 == b
        });
        if !blocked {
            let mut newly = Vec::with_capacity(self.moduli.len());
            for (k, &b) in self.moduli.iter().enumerate() {
                let r = pos % b;
                if !self.occupied[k][r] {
                    self.occupied[k][r] = true;
                    self.filled[k] += 1;
                    newly.push(k);
                }
            }
            total += self.count(pos + 1);
            for k in newly {
                let b = self.moduli[k];
                self.occupied[k][pos % b] = false;
                self.filled[k] -= 1;
            }
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqcore::square_map;
    use proptest::prelude::*;

    /// Trial-division oracle: (number of distinct primes, Ω, squarefree).
    fn factor_oracle(mut m: u64) -> (u32, u32, bool) {
        let (mut distinct, mut total, mut squarefree) = (0, 0, true);
        let mut p = 2;
        while p * p <= m {
            if m % p == 0 {
                distinct += 1;
                let mut e = 0;
                while m % p == 0 {
                    m /= p;
                    e += 1;
                }
                total += e;
                squarefree &= e == 1;
            }
            p += 1;
        }
        if m > 1 {
            distinct += 1;
            total += 1;
        }
        (distinct, total, squarefree)
    }

    #[test]
    fn mobius_small() {
        assert_eq!(mobius_prefix(6).unwrap().as_slice(), &[1, -1, -1, 0, -1, 1]);
        assert_eq!(
            square_map(&mobius_prefix(10).unwrap()).as_slice(),
            &[1, 1, 1, 0, 1, 1, 1, 0, 0, 1]
        );
        assert!(mobius_prefix(0).is_err());
    }

    #[test]
    fn liouville_small() {
        assert_eq!(
            liouville_prefix(8).unwrap().as_slice(),
            &[1, -1, -1, 1, -1, 1, -1, -1]
        );
        assert_eq!(liouville_prefix(4).unwrap()[4], 1);
        assert!(liouville_prefix(0).is_err());
    }

    #[test]
    fn sieve_agrees_with_trial_division() {
        let sieve = Sieve::new(20_000).unwrap();
        let (mu, lambda) = sieve.mobius_liouville();
        for m in 1..=20_000u64 {
            let (distinct, total, squarefree) = factor_oracle(m);
            let expected_mu = if squarefree {
                if distinct % 2 == 0 { 1 } else { -1 }
            } else {
                0
            };
            assert_eq!(mu[m as usize], expected_mu, "mu({m})");
            assert_eq!(lambda[m as usize], if total % 2 == 0 { 1 } else { -1 }, "lambda({m})");
        }
        for &p in sieve.primes() {
            assert_eq!(mu[p as usize], -1);
        }
    }

    #[test]
    fn mobius_is_liouville_times_squarefree() {
        let sieve = Sieve::new(100_000).unwrap();
        let (mu, lambda) = sieve.mobius_liouville();
        let mu2 = square_map(&mu);
        for n in 1..=mu.len() {
            assert_eq!(mu[n], lambda[n] * mu2[n]);
            if mu[n] != 0 {
                assert_eq!(mu[n], lambda[n]);
            }
        }
    }

    #[test]
    fn bset_validation() {
        assert!(BSet::from_squares(&[4, 9, 25]).is_ok());
        assert!(BSet::from_squares(&[8]).is_err());
        assert!(BSet::from_squares(&[1]).is_err());
        assert!(BSet::from_squares(&[4, 16]).is_err());
        assert!(BSet::from_squares(&[36, 25]).is_ok());
        assert!(BSet::from_squares(&[]).is_err());
        let ps = BSet::prime_squares(30).unwrap();
        assert_eq!(ps.b_values(), &[4, 9, 25]);
        assert_eq!(ps.a_values(), &[2, 3, 5]);
    }

    #[test]
    fn mu_b_classical_case() {
        let n = 50_000;
        let bset = BSet::prime_squares_with_roots(n as u64).unwrap();
        assert_eq!(mu_b_prefix(&bset, n).unwrap(), mobius_prefix(n).unwrap());
        // roots only up to sqrt(N) get the zeros right but miss large prime factors
        let short = mu_b_prefix(&BSet::prime_squares(n as u64).unwrap(), n).unwrap();
        assert_eq!(square_map(&short), square_map(&mobius_prefix(n).unwrap()));
        assert_ne!(short, mobius_prefix(n).unwrap());
    }

    #[test]
    fn mu_b_single_square() {
        let z = mu_b_prefix(&BSet::from_squares(&[4]).unwrap(), 10).unwrap();
        assert_eq!((z[2], z[3], z[4], z[6]), (-1, 1, 0, -1));
    }

    #[test]
    fn mu_b_density_matches_residue_count() {
        // residues mod 36 avoiding multiples of 4 and 9
        let free = (1..=36).filter(|r| r % 4 != 0 && r % 9 != 0).count();
        assert_eq!(free, 24);
        let bset = BSet::from_squares(&[4, 9]).unwrap();
        let z = mu_b_prefix(&bset, 1_000_000).unwrap();
        let density = z.support_density();
        assert!((density - free as f64 / 36.0).abs() < 1e-3, "{density}");
        assert!((bset.free_density() - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn admissibility_examples() {
        let b4 = BSet::from_squares(&[4]).unwrap();
        assert!(!is_admissible(&Block::new(vec![1, 1, 1, 1]).unwrap(), &b4));
        assert!(is_admissible(&Block::new(vec![1, 0, 0, 1]).unwrap(), &b4));
        // b larger than the block imposes nothing
        assert!(is_admissible(&Block::new(vec![1, 1, 1]).unwrap(), &b4));
    }

    #[test]
    fn squarefree_blocks_are_admissible() {
        let z2 = square_map(&mobius_prefix(1_000_000).unwrap());
        let bset = BSet::prime_squares(20).unwrap();
        let data = z2.as_slice();
        for start in 0..=data.len() - 20 {
            let block = Block::from_raw(data[start..start + 20].to_vec());
            assert!(is_admissible(&block, &bset), "block at {}", start + 1);
        }
    }

    /// Brute-force count over all 2^n blocks.
    fn brute_count(n: usize, bset: &BSet) -> u64 {
        (0u32..1 << n)
            .filter(|mask| {
                let letters = (0..n).map(|i| ((mask >> i) & 1) as i8).collect();
                is_admissible(&Block::from_raw(letters), bset)
            })
            .count() as u64
    }

    #[test]
    fn admissible_counts() {
        let wide = BSet::from_squares(&[4, 9]).unwrap();
        assert_eq!(admissible_block_count(3, &wide).unwrap(), 8);
        assert_eq!(admissible_block_count(3, &BSet::from_squares(&[25]).unwrap()).unwrap(), 8);
        assert_eq!(admissible_block_count(4, &BSet::from_squares(&[4]).unwrap()).unwrap(), 15);
        let ps = BSet::prime_squares(30).unwrap();
        for n in 1..=16 {
            assert_eq!(admissible_block_count(n, &ps).unwrap(), brute_count(n, &ps), "n={n}");
        }
        assert!(matches!(
            admissible_block_count(31, &ps),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn admissible_entropy_slope_is_nearly_monotone() {
        let ps = BSet::prime_squares(30).unwrap();
        let slopes: Vec<f64> = (8..=24)
            .map(|n| (admissible_block_count(n, &ps).unwrap() as f64).log2() / n as f64)
            .collect();
        for w in slopes.windows(2) {
            assert!(w[1] <= w[0] + 0.02, "{slopes:?}");
        }
    }

    proptest! {
        #[test]
        fn admissibility_is_hereditary(bits in prop::collection::vec(0i8..=1, 1..40), drop in 0usize..40) {
            let bset = BSet::prime_squares(40).unwrap();
            let block = Block::from_raw(bits.clone());
            if is_admissible(&block, &bset) {
                let mut smaller = bits;
                let i = drop % smaller.len();
                smaller[i] = 0;
                prop_assert!(is_admissible(&Block::from_raw(smaller), &bset));
            }
        }
    }
}

use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::Serialize;

use super::checkpoint_positions;
use crate::error::{invalid, Error, Result};
use crate::seqcore::SignSeq;

pub const MIN_GRID: usize = 100;

#[derive(Clone, Debug, Serialize)]
pub struct DavenportScan {
    pub n: usize,
    pub grid: usize,
    /// `max_θ |Σ_{n<=N} e(nθ) z(n)| / N` over `θ = j/grid`.
    pub max_value: f64,
    pub argmax_theta: f64,
    /// The same maximum at each checkpoint `N'`.
    pub curve: Vec<(usize, f64)>,
}

/// Scan `|Σ_{n<=N} e(nθ) z(n)| / N` over the grid `θ = j/grid`.
///
/// Phases are looked up in an exact table of `e(k/grid)`, indexed by
/// `n·j mod grid`, so there is no accumulated rotation error.
pub fn davenport_scan(z: &SignSeq, n: usize, grid: usize) -> Result<DavenportScan> {
    if grid < MIN_GRID {
        return Err(invalid("grid", format!("{grid} is below the minimum {MIN_GRID}")));
    }
    if n == 0 {
        return Err(invalid("n", "sum length must be at least 1"));
    }
    if z.len() < n {
        return Err(Error::PrefixTooShort {
            required: n,
            available: z.len(),
        });
    }
    let table: Vec<(f64, f64)> = (0..grid)
        .map(|k| {
            let t = TAU * k as f64 / grid as f64;
            (t.cos(), t.sin())
        })
        .collect();
    let cps = checkpoint_positions(n);
    let data = &z.as_slice()[..n];
    let per_theta: Vec<Vec<f64>> = (0..grid)
        .into_par_iter()
        .map(|j| {
            let mut out = Vec::with_capacity(cps.len());
            let (mut re, mut im) = (0.0f64, 0.0f64);
            // idx = m·j mod grid, advanced incrementally
            let mut idx = j;
            let mut m = 1;
            for &c in &cps {
                while m <= c {
                    let v = data[m - 1] as f64;
                    let (cr, ci) = table[idx];
                    re += v * cr;
                    im += v * ci;
                    idx += j;
                    if idx >= grid {
                        idx -= grid;
                    }
                    m += 1;
                }
                out.push(re.hypot(im) / c as f64);
            }
            out
        })
        .collect();

    let curve: Vec<(usize, f64)> = cps
        .iter()
        .enumerate()
        .map(|(i, &c)| (c, per_theta.iter().map(|v| v[i]).fold(0.0, f64::max)))
        .collect();
    let last = cps.len() - 1;
    let (best_j, max_value) = per_theta
        .iter()
        .enumerate()
        .map(|(j, v)| (j, v[last]))
        .fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
    Ok(DavenportScan {
        n,
        grid,
        max_value,
        argmax_theta: best_j as f64 / grid as f64,
        curve,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numbergen::mobius_prefix;

    #[test]
    fn zeros_and_constants() {
        let z = SignSeq::zeros(1000).unwrap();
        let s = davenport_scan(&z, 1000, 100).unwrap();
        assert_eq!(s.max_value, 0.0);
        let one = SignSeq::from_vec(vec![1; 1000]).unwrap();
        let s = davenport_scan(&one, 1000, 100).unwrap();
        assert!((s.max_value - 1.0).abs() < 1e-12);
        assert_eq!(s.argmax_theta, 0.0);
        assert!(davenport_scan(&one, 1000, 99).is_err());
    }

    #[test]
    fn alternating_peaks_at_half() {
        let z = SignSeq::from_vec((1..=1000).map(|n| if n % 2 == 0 { 1 } else { -1 }).collect()).unwrap();
        let s = davenport_scan(&z, 1000, 100).unwrap();
        assert_eq!(s.argmax_theta, 0.5);
        assert!((s.max_value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn matches_direct_evaluation() {
        let mu = mobius_prefix(5000).unwrap();
        let s = davenport_scan(&mu, 5000, 128).unwrap();
        let mut best = 0.0f64;
        for j in 0..128 {
            let th = j as f64 / 128.0;
            let (mut re, mut im) = (0.0f64, 0.0f64);
            for n in 1..=5000 {
                let t = TAU * th * n as f64;
                re += mu[n] as f64 * t.cos();
                im += mu[n] as f64 * t.sin();
            }
            best = best.max(re.hypot(im) / 5000.0);
        }
        assert!((s.max_value - best).abs() < 1e-9, "{} {best}", s.max_value);
    }
}

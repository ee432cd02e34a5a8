use serde::Serialize;

use crate::error::{invalid, Result};

/// A real sequence mapped onto a finite grid of levels.
#[derive(Clone, Debug, Serialize)]
pub struct Quantized {
    /// Grid `a_0 < a_1 < ...`, evenly spaced by `step`.
    pub levels: Vec<f64>,
    /// `indices[n]` is the level chosen for `y[n]`.
    pub indices: Vec<u32>,
}

impl Quantized {
    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.indices.iter().map(|&i| self.levels[i as usize])
    }

    /// Number of distinct levels actually used.
    pub fn alphabet_size(&self) -> usize {
        let mut used = vec![false; self.levels.len()];
        for &i in &self.indices {
            used[i as usize] = true;
        }
        used.into_iter().filter(|&u| u).count()
    }
}

/// Map every `y[n]` to the largest grid level not exceeding it. The grid
/// starts at `min(y) - step/2` with spacing `step`, so the sup-norm error is
/// strictly below `step`.
pub fn quantize(y: &[f64], step: f64) -> Result<Quantized> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(invalid("step", format!("{step} must be positive and finite")));
    }
    if y.is_empty() {
        return Err(invalid("y", "at least one value is required"));
    }
    if let Some(bad) = y.iter().find(|v| !v.is_finite()) {
        return Err(invalid("y", format!("non-finite value {bad}")));
    }
    let lo = y.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let base = lo - step / 2.0;
    let top = ((hi - base) / step).floor() as usize;
    let levels: Vec<f64> = (0..=top + 1).map(|i| base + i as f64 * step).collect();
    let indices = y
        .iter()
        .map(|&v| {
            let mut i = (((v - base) / step).floor() as usize).min(levels.len() - 1);
            // correct for rounding in the division
            while levels[i] > v {
                i -= 1;
            }
            while i + 1 < levels.len() && levels[i + 1] <= v {
                i += 1;
            }
            i as u32
        })
        .collect();
    let mut q = Quantized { levels, indices };
    // drop an unused top level
    let max_used = *q.indices.iter().max().unwrap() as usize;
    q.levels.truncate(max_used + 1);
    Ok(q)
}

//! Binary entropy, its inverse branches, the boundary curves `f1`/`f2` of the
//! region of attainable `(h_top(z²), h_top(z))` pairs, and the Bernoulli
//! hat-entropy identity. Everything is in bits.

use serde::Serialize;

use crate::error::{invalid, Result};

pub const LOG2_3: f64 = 1.584_962_500_721_156_2;

const INVERSE_TOL: f64 = 1e-12;
const INVERSE_MAX_ITER: usize = 200;

fn check_unit(name: &'static str, x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(invalid(name, format!("{x} is outside [0, 1]")))
    }
}

fn h_unchecked(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    -x * x.log2() - (1.0 - x) * (1.0 - x).log2()
}

/// `H(x) = -x log x - (1-x) log(1-x)`, with `H(0) = H(1) = 0`.
pub fn binary_entropy(x: f64) -> Result<f64> {
    check_unit("x", x)?;
    Ok(h_unchecked(x))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    /// `H` restricted to `[0, 1/2]`.
    Lower,
    /// `H` restricted to `[1/2, 1]`.
    Upper,
}

/// The `x` on the given branch with `H(x) = y`, by bisection.
pub fn entropy_inverse(y: f64, branch: Branch) -> Result<f64> {
    check_unit("y", y)?;
    if y >= 1.0 {
        return Ok(0.5);
    }
    if y <= 0.0 {
        return Ok(match branch {
            Branch::Lower => 0.0,
            Branch::Upper => 1.0,
        });
    }
    // keep `lo` on the side where H < y
    let (mut lo, mut hi) = match branch {
        Branch::Lower => (0.0f64, 0.5f64),
        Branch::Upper => (1.0, 0.5),
    };
    for _ in 0..INVERSE_MAX_ITER {
        if (hi - lo).abs() <= INVERSE_TOL {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if h_unchecked(mid) < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `H(2/3) = log 3 - 2/3`, where `f2` switches to the constant `log 3`.
pub fn f2_breakpoint() -> f64 {
    LOG2_3 - 2.0 / 3.0
}

/// Lower boundary curve `f1(x) = x + H⁻¹(x)` on the lower branch.
pub fn f1(x: f64) -> Result<f64> {
    Ok(x + entropy_inverse(x, Branch::Lower)?)
}

/// Upper boundary curve: `x + H⁻¹(x)` on the upper branch below `H(2/3)`,
/// `log 3` from there on.
pub fn f2(x: f64) -> Result<f64> {
    check_unit("x", x)?;
    if x >= f2_breakpoint() {
        Ok(LOG2_3)
    } else {
        Ok(x + entropy_inverse(x, Branch::Upper)?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EntropyPair {
    pub h_square: f64,
    pub h_full: f64,
}

impl EntropyPair {
    /// Checks `h_square <= h_full <= min(h_square + 1, log 3)`.
    pub fn new(h_square: f64, h_full: f64) -> Result<Self> {
        check_unit("h_square", h_square)?;
        if !(0.0..=LOG2_3 + 1e-12).contains(&h_full) {
            return Err(invalid("h_full", format!("{h_full} is outside [0, log2 3]")));
        }
        if h_full + 1e-12 < h_square {
            return Err(invalid("h_full", "must be at least h_square"));
        }
        if h_full > h_square + 1.0 + 1e-12 {
            return Err(invalid("h_full", "must be at most h_square + 1"));
        }
        Ok(EntropyPair { h_square, h_full })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PairVerdict {
    pub pair: EntropyPair,
    pub f2_value: f64,
    /// `f2(h_square) - h_full`; must be non-negative.
    pub upper_margin: f64,
    /// `h_full` sits on the upper curve.
    pub on_upper_curve: bool,
    /// The upper bound is attained at `h_full = log 3`.
    pub equality: bool,
    pub f1_value: Option<f64>,
    /// `h_full - f1(h_square)`; must be positive when checked.
    pub lower_margin: Option<f64>,
    pub passed: bool,
}

const AUDIT_SLACK: f64 = 1e-12;

/// Audit a pair against `h_full <= f2(h_square)`, and against
/// `f1(h_square) < h_full` when `recurrent_closed` is set.
pub fn audit_entropy_pair(pair: EntropyPair, recurrent_closed: bool) -> Result<PairVerdict> {
    let f2_value = f2(pair.h_square)?;
    let upper_margin = f2_value - pair.h_full;
    let on_upper_curve = upper_margin.abs() <= 1e-9;
    let equality = on_upper_curve && (pair.h_full - LOG2_3).abs() <= 1e-9;
    let mut passed = upper_margin >= -AUDIT_SLACK;
    let (f1_value, lower_margin) = if recurrent_closed {
        let v = f1(pair.h_square)?;
        let margin = pair.h_full - v;
        passed &= margin > 0.0;
        (Some(v), Some(margin))
    } else {
        (None, None)
    };
    Ok(PairVerdict {
        pair,
        f2_value,
        upper_margin,
        on_upper_curve,
        equality,
        f1_value,
        lower_margin,
        passed,
    })
}

/// For the Bernoulli measure `ν = B(1-d, d)` on {0,1} and its hat extension
/// `ν̂ = B(d/2, 1-d, d/2)` on {-1,0,1}: returns `(h(ν), h(ν̂))`.
pub fn bernoulli_hat_entropy(d: f64) -> Result<(f64, f64)> {
    check_unit("d", d)?;
    let h_nu = h_unchecked(d);
    let h_hat = [d / 2.0, 1.0 - d, d / 2.0]
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum();
    Ok((h_nu, h_hat))
}

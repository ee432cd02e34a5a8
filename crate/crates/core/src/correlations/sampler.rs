use std::f64::consts::TAU;

use serde::Serialize;

use super::{checkpoint_positions, check_prefix, normalize, real_running_sums, CorrelationCurve, CorrelationSpec};
use crate::error::{invalid, Error, Result};
use crate::phase::frac_linear;
use crate::seqcore::SignSeq;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Observable {
    Cos,
    Sin,
}

/// A real observable along an orbit, `n ↦ f(Tⁿx)` for `n = 1, 2, ...`.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum OrbitSampler {
    /// `f(x0 + nα mod 1)` with `f = cos 2π·` or `sin 2π·`.
    Rotation { alpha: f64, x0: f64, f: Observable },
    /// `pattern[(n-1) mod P]`.
    Periodic { pattern: Vec<f64> },
    /// First coordinate of `Sⁿw`, i.e. `w(n+1)`.
    Subshift {
        #[serde(skip)]
        w: SignSeq,
    },
}

impl OrbitSampler {
    pub fn rotation(alpha: f64, x0: f64, f: Observable) -> Result<Self> {
        if !alpha.is_finite() || !x0.is_finite() {
            return Err(invalid("alpha", "rotation parameters must be finite"));
        }
        Ok(OrbitSampler::Rotation { alpha, x0, f })
    }

    pub fn periodic(pattern: Vec<f64>) -> Result<Self> {
        if pattern.is_empty() {
            return Err(invalid("pattern", "period must be at least 1"));
        }
        if pattern.iter().any(|v| !v.is_finite()) {
            return Err(invalid("pattern", "values must be finite"));
        }
        Ok(OrbitSampler::Periodic { pattern })
    }

    pub fn constant(value: f64) -> Result<Self> {
        Self::periodic(vec![value])
    }

    pub fn subshift(w: SignSeq) -> Self {
        OrbitSampler::Subshift { w }
    }

    /// `f(Tⁿx)`, `n >= 1`.
    #[inline]
    pub fn sample(&self, n: usize) -> f64 {
        match self {
            OrbitSampler::Rotation { alpha, x0, f } => {
                let t = TAU * frac_linear(n as u64, alpha.rem_euclid(1.0), x0.rem_euclid(1.0));
                match f {
                    Observable::Cos => t.cos(),
                    Observable::Sin => t.sin(),
                }
            }
            OrbitSampler::Periodic { pattern } => pattern[(n - 1) % pattern.len()],
            OrbitSampler::Subshift { w } => w.as_slice()[n] as f64,
        }
    }

    fn check_len(&self, n: usize) -> Result<()> {
        if let OrbitSampler::Subshift { w } = self {
            if w.len() < n + 1 {
                return Err(Error::PrefixTooShort {
                    required: n + 1,
                    available: w.len(),
                });
            }
        }
        Ok(())
    }
}

/// `(1/N') Σ_{n<=N'} f(Tⁿx)·z(n)` at the checkpoints of `N`.
pub fn sarnak_sum(sampler: &OrbitSampler, z: &SignSeq, n: usize) -> Result<CorrelationCurve> {
    strong_sarnak_sum(sampler, z, &CorrelationSpec::mean(), n)
}

/// `(1/N') Σ f(Tⁿx)·∏_s z^{i_s}(n + a_s)`.
pub fn strong_sarnak_sum(
    sampler: &OrbitSampler,
    z: &SignSeq,
    spec: &CorrelationSpec,
    n: usize,
) -> Result<CorrelationCurve> {
    check_prefix(z, n, spec.max_lag())?;
    sampler.check_len(n)?;
    let data = z.as_slice();
    let factors = spec.factors();
    let cps = checkpoint_positions(n);
    let sums = real_running_sums(&cps, |m| {
        let p = super::product_at(data, &factors, m - 1);
        if p == 0 {
            0.0
        } else {
            p as f64 * sampler.sample(m)
        }
    });
    Ok(normalize(&cps, sums))
}

//! Fractional parts of `n·α + β` without the `O(n·ε)` drift of naive
//! accumulation.

/// `{n·alpha + beta}` in `[0, 1)`.
///
/// The product is split into its rounded value and the exact rounding error
/// (via fused multiply-add) before reduction, so the phase error stays at a
/// few ulps of 1 instead of growing with `n`.
#[inline]
pub fn frac_linear(n: u64, alpha: f64, beta: f64) -> f64 {
    let x = n as f64;
    let p = x * alpha;
    let err = x.mul_add(alpha, -p);
    let mut f = (p - p.floor()) + err + beta;
    f -= f.floor();
    if f >= 1.0 {
        f -= 1.0;
    }
    f
}

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Volume `omega_k` of the unit ball in `R^k`, i.e. `pi^{k/2} / Gamma(k/2 + 1)`.
///
/// Evaluated through the two-step recurrence `omega_k = (2 pi / k) omega_{k-2}`
/// from `omega_0 = 1`, `omega_1 = 2`, which is exact up to rounding and avoids
/// a Gamma function.
pub fn unit_ball_volume(k: i64) -> Result<f64> {
    if k < 0 {
        return Err(Error::InvalidArgument(format!("unit ball volume needs k >= 0, got {k}")));
    }
    let mut w = if k % 2 == 0 { 1.0 } else { 2.0 };
    let mut j = if k % 2 == 0 { 2 } else { 3 };
    while j <= k {
        w *= 2.0 * PI / j as f64;
        j += 2;
    }
    Ok(w)
}

pub(crate) fn omega(k: usize) -> f64 {
    unit_ball_volume(k as i64).expect("non-negative")
}

/// `A_d = (d/2) * omega_d / omega_{d-1}`.
pub fn sharp_constant(d: i64) -> Result<f64> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!("sharp constant needs d >= 2, got {d}")));
    }
    Ok(d as f64 / 2.0 * unit_ball_volume(d)? / unit_ball_volume(d - 1)?)
}

/// `H^{d-1}(S^{d-1}) = d * omega_d`.
pub(crate) fn sphere_area(d: usize) -> f64 {
    d as f64 * omega(d)
}

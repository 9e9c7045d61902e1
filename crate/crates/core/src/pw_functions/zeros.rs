use serde::{Deserialize, Serialize};

use super::{cos_turns, CosineProduct};
use crate::convex_geometry::{dot, UnitVector};
use crate::error::{ensure_dim, Error, Result};

/// Zeros of one factor along the slice `s -> base + s theta`: the factor is
/// `cos(2 pi (c + g s))` with `c = a <base, nu>`, `g = a <theta, nu>`, and it
/// vanishes exactly when `2 (c + g s) - 1/2` is an integer.
struct Progression {
    c: f64,
    g: f64,
}

impl Progression {
    /// Integer range `m` with `(m/2 + 1/4 - c) / g` in `[-t, t]`.
    fn range(&self, t: f64) -> (i64, i64) {
        let lo = self.c - self.g.abs() * t;
        let hi = self.c + self.g.abs() * t;
        ((2.0 * lo - 0.5).ceil() as i64, (2.0 * hi - 0.5).floor() as i64)
    }

    fn zero(&self, m: i64) -> f64 {
        (m as f64 / 2.0 + 0.25 - self.c) / self.g
    }
}

fn progressions(f: &CosineProduct, base: &[f64], theta: &UnitVector) -> Result<Vec<Progression>> {
    ensure_dim(f.dimension(), base.len())?;
    ensure_dim(f.dimension(), theta.dim())?;
    let mut out = Vec::with_capacity(f.len());
    for (n, t) in f.terms().iter().enumerate() {
        let c = t.a * dot(base, t.nu.as_slice());
        let g = t.a * theta.dot(t.nu.as_slice());
        if g == 0.0 {
            if cos_turns(c) == 0.0 {
                return Err(Error::InfiniteCount(format!("factor {n} vanishes identically along the slice")));
            }
            continue;
        }
        out.push(Progression { c, g });
    }
    Ok(out)
}

fn check_halfwidth(t: f64) -> Result<()> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("half-width must be finite and >= 0, got {t}")))
    }
}

/// Number of `s in [-t, t]` with `f(base + s theta) = 0`, counted once per
/// vanishing factor.
pub fn slice_zero_count(f: &CosineProduct, base: &[f64], theta: &UnitVector, t: f64) -> Result<u64> {
    check_halfwidth(t)?;
    Ok(progressions(f, base, theta)?
        .iter()
        .map(|p| {
            let (lo, hi) = p.range(t);
            (hi - lo + 1).max(0) as u64
        })
        .sum())
}

/// The zeros counted by [`slice_zero_count`], sorted, with multiplicity.
pub fn slice_zeros(f: &CosineProduct, base: &[f64], theta: &UnitVector, t: f64) -> Result<Vec<f64>> {
    check_halfwidth(t)?;
    let mut out = Vec::new();
    for p in progressions(f, base, theta)? {
        let (lo, hi) = p.range(t);
        out.extend((lo..=hi).map(|m| p.zero(m)).filter(|s| s.abs() <= t));
    }
    out.sort_by(f64::total_cmp);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JensenReport {
    /// `int_0^T card{|s| <= t : f(x + s theta) = 0} dt / t`.
    pub lhs: f64,
    /// `4 T h + ln(1 / |f(x)|)`.
    pub rhs: f64,
    pub zeros: usize,
}

/// Both sides of the Jensen bound on real zeros of `s -> f(x + s theta)`
/// in `[-T, T]`. `h_theta` must dominate `sum_n a_n |<theta, nu_n>|`.
pub fn jensen_functional(f: &CosineProduct, x: &[f64], theta: &UnitVector, big_t: f64, h_theta: f64) -> Result<JensenReport> {
    if !(big_t.is_finite() && big_t > 0.0) {
        return Err(Error::InvalidArgument(format!("T must be positive, got {big_t}")));
    }
    let spectral = f.spectral_support(theta.as_slice());
    if !(h_theta.is_finite() && h_theta >= spectral * (1.0 - 1e-12)) {
        return Err(Error::InvalidArgument(format!(
            "h_theta = {h_theta} is below the spectral support {spectral} in this direction"
        )));
    }
    let fx = f.evaluate(x)?;
    if fx == 0.0 {
        return Err(Error::InvalidArgument("f(x) = 0: the Jensen functional diverges".into()));
    }
    let zeros = slice_zeros(f, x, theta, big_t)?;
    // integrating the step function gives one ln(T/|s|) per zero
    let lhs = zeros.iter().map(|s| (big_t / s.abs()).ln()).sum();
    Ok(JensenReport { lhs, rhs: 4.0 * big_t * h_theta - fx.abs().ln(), zeros: zeros.len() })
}

use rand::Rng as _;

use super::CosineProduct;
use crate::convex_geometry::omega;
use crate::error::{Error, Result};
use crate::estimate::{mean_and_se, Estimate};
use crate::rng;

pub const MIN_RONKIN_SAMPLES: usize = 10_000;

const TAG_RONKIN: u64 = 0x40_4b;

/// Monte Carlo estimate of `R^{-(d+1)} int_{B(0,R)} ln(1 / |f|)`, which tends
/// to zero like `1/R` for cosine products. Uniform points in the ball come
/// from rejection sampling in the bounding cube.
pub fn ronkin_estimate(f: &CosineProduct, radius: f64, n_samples: usize, seed: u64) -> Result<Estimate> {
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::InvalidArgument(format!("R must be positive, got {radius}")));
    }
    if n_samples < MIN_RONKIN_SAMPLES {
        return Err(Error::InvalidArgument(format!(
            "need at least {MIN_RONKIN_SAMPLES} samples, got {n_samples}"
        )));
    }
    if f.is_empty() {
        return Ok(Estimate::exact(0.0));
    }
    let d = f.dimension();
    let chunks = rng::chunked(seed, TAG_RONKIN, n_samples, |g, len| {
        let mut out = Vec::with_capacity(len);
        let mut x = vec![0.0; d];
        while out.len() < len {
            for xi in x.iter_mut() {
                *xi = radius * (2.0 * g.random::<f64>() - 1.0);
            }
            if x.iter().map(|v| v * v).sum::<f64>() > radius * radius {
                continue;
            }
            let v = f.eval_unchecked(&x).abs();
            if v > 0.0 {
                out.push(-v.ln());
            }
        }
        out
    });
    let values: Vec<f64> = chunks.into_iter().flatten().collect();
    let (mean, se) = mean_and_se(&values);
    let scale = omega(d) / radius;
    Ok(Estimate::with_std_error(scale * mean, scale * se))
}

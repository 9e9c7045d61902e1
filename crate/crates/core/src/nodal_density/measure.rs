use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{line_intersection_count, PrunedArrangement};
use crate::convex_geometry::{dot, omega, UnitVector};
use crate::error::{ensure_dim, Error, Result};
use crate::estimate::{mean_and_se, Estimate};
use crate::rng;

pub const DEFAULT_CROFTON_DIRS: usize = 2000;
pub const DEFAULT_LINES_PER_DIR: usize = 4;
/// Redraws allowed for a direction parallel to some family.
const MAX_RESAMPLES: usize = 100;
const TAG_CROFTON: u64 = 0xc0f7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CroftonBudget {
    pub n_dirs: usize,
    pub lines_per_dir: usize,
}

impl Default for CroftonBudget {
    fn default() -> Self {
        CroftonBudget { n_dirs: DEFAULT_CROFTON_DIRS, lines_per_dir: DEFAULT_LINES_PER_DIR }
    }
}

/// Monte Carlo estimate of `H^{d-1}(set ∩ B(center, R))` from the Crofton
/// formula: random directions `theta`, random lines `y + R theta` with `y`
/// uniform in the `(d-1)`-disk `theta^⊥ ∩ B(center, R)`, and
/// `estimate = d omega_d R^{d-1} / 2 * mean(card)`. The standard error is
/// clustered by direction.
pub fn crofton_estimate(
    arr: &PrunedArrangement,
    center: &[f64],
    radius: f64,
    n_dirs: usize,
    lines_per_dir: usize,
    seed: u64,
) -> Result<Estimate> {
    let d = arr.dimension();
    ensure_dim(d, center.len())?;
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::InvalidArgument(format!("R must be positive, got {radius}")));
    }
    if n_dirs < 2 || lines_per_dir == 0 {
        return Err(Error::InvalidArgument("Crofton needs >= 2 directions and >= 1 line each".into()));
    }
    if arr.families().is_empty() {
        return Ok(Estimate::exact(0.0));
    }
    let per_dir: Vec<f64> = (0..n_dirs)
        .into_par_iter()
        .map(|k| {
            let mut g = rng::stream(seed, TAG_CROFTON, k as u64);
            'redraw: for _ in 0..MAX_RESAMPLES {
                let theta = UnitVector::random(d, &mut g);
                if arr.families().iter().any(|f| theta.dot(f.nu.as_slice()) == 0.0) {
                    continue;
                }
                let basis = theta.complement_basis();
                let mut total = 0u64;
                for _ in 0..lines_per_dir {
                    let z = uniform_in_ball(d - 1, &mut g);
                    let r2: f64 = z.iter().map(|v| v * v).sum();
                    let mut y = center.to_vec();
                    for (zk, b) in z.iter().zip(&basis) {
                        for (yk, bk) in y.iter_mut().zip(b) {
                            *yk += radius * zk * bk;
                        }
                    }
                    let half = radius * (1.0 - r2).max(0.0).sqrt();
                    match line_intersection_count(arr, &y, &theta, -half, half) {
                        Ok(c) => total += c,
                        Err(Error::InfiniteCount(_)) => continue 'redraw,
                        Err(e) => return Err(e),
                    }
                }
                return Ok(total as f64 / lines_per_dir as f64);
            }
            Err(Error::Internal(format!("Crofton direction {k}: {MAX_RESAMPLES} degenerate draws in a row")))
        })
        .collect::<Result<_>>()?;
    let (mean, se) = mean_and_se(&per_dir);
    let scale = d as f64 * omega(d) * radius.powi(d as i32 - 1) / 2.0;
    Ok(Estimate::with_std_error(scale * mean, scale * se))
}

fn uniform_in_ball(k: usize, g: &mut rng::Rng) -> Vec<f64> {
    loop {
        let z: Vec<f64> = (0..k).map(|_| 2.0 * g.random::<f64>() - 1.0).collect();
        if z.iter().map(|v| v * v).sum::<f64>() <= 1.0 {
            return z;
        }
    }
}

/// Length of `set ∩ B(center, r)` in the plane, computed exactly: chords of
/// every line minus the merged exclusion intervals.
pub(crate) fn exact_length_2d(arr: &PrunedArrangement, center: &[f64], r: f64) -> f64 {
    let fams = arr.families();
    let rho = arr.rho();
    let mut total = 0.0;
    let mut cuts: Vec<(f64, f64)> = Vec::new();
    for (i, f) in fams.iter().enumerate() {
        let nu = f.nu.as_slice();
        let tau = [-nu[1], nu[0]];
        let pc = dot(center, nu);
        let (k0, k1) = f.levels_in(pc - r, pc + r);
        for k in k0..=k1 {
            let delta = f.level(k) - pc;
            let half = (r * r - delta * delta).max(0.0).sqrt();
            if half == 0.0 {
                continue;
            }
            if arr.is_raw() {
                total += 2.0 * half;
                continue;
            }
            let p0 = [center[0] + delta * nu[0], center[1] + delta * nu[1]];
            cuts.clear();
            for (j, fj) in fams.iter().enumerate() {
                if j == i || f.parallel_to(fj) {
                    continue;
                }
                let g = dot(&tau, fj.nu.as_slice());
                let q = dot(&p0, fj.nu.as_slice());
                let w = rho / g.abs();
                let reach = g.abs() * half + rho;
                let (m0, m1) = fj.levels_in(q - reach, q + reach);
                for m in m0..=m1 {
                    let u = (fj.level(m) - q) / g;
                    let (a, b) = ((u - w).max(-half), (u + w).min(half));
                    if a < b {
                        cuts.push((a, b));
                    }
                }
            }
            total += 2.0 * half - merged_length(&mut cuts);
        }
    }
    total
}

fn merged_length(iv: &mut [(f64, f64)]) -> f64 {
    iv.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut len = 0.0;
    let mut cur: Option<(f64, f64)> = None;
    for &(a, b) in iv.iter() {
        cur = match cur {
            Some((s, e)) if a <= e => Some((s, e.max(b))),
            Some((s, e)) => {
                len += e - s;
                Some((a, b))
            }
            None => Some((a, b)),
        };
    }
    if let Some((s, e)) = cur {
        len += e - s;
    }
    len
}

/// `H^{d-1}(set ∩ B(center, r))`: exact in the plane, Crofton otherwise.
pub fn measure_in_ball(
    arr: &PrunedArrangement,
    center: &[f64],
    r: f64,
    budget: CroftonBudget,
    seed: u64,
) -> Result<Estimate> {
    ensure_dim(arr.dimension(), center.len())?;
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::InvalidArgument(format!("radius must be positive, got {r}")));
    }
    if arr.dimension() == 2 {
        let v = exact_length_2d(arr, center, r);
        // rounding only
        return Ok(Estimate::with_tolerance(v, 1e-12 * v.max(r)));
    }
    crofton_estimate(arr, center, r, budget.n_dirs, budget.lines_per_dir, seed)
}

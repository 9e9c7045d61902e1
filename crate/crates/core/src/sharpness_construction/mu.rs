use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::WeightFunction;
use crate::convex_geometry::{
    default_sup_resolution, maximize_on_sphere, perimeter_2d, sample_boundary, sphere_grid, BoundarySample, ConvexBody,
    Point,
};
use crate::error::{ensure_dim, Error, Result};
use crate::estimate::{mean_and_se, Estimate};
use crate::rng;

/// Nodes carried into the bootstrap (the best ones by sample mean).
const BOOTSTRAP_NODES: usize = 256;
const TAG_BOOT: u64 = 0xb007;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MuEstimate {
    /// `max_y mean_m |<nu_m, y>| g(x_m)` over the polar-boundary grid.
    pub mu_hat: Estimate,
    /// Bootstrap estimate of the upward bias of the maximum (0 without a
    /// bootstrap).
    pub bias: f64,
    pub argmax: Point,
    pub samples: usize,
    pub grid_nodes: usize,
    pub bootstrap_reps: usize,
}

/// Validated weights at the samples.
pub(crate) fn weights(g: &WeightFunction, samples: &[BoundarySample]) -> Result<Vec<f64>> {
    samples
        .iter()
        .map(|s| {
            let w = g.eval(&s.point, s.normal.as_slice());
            if w.is_finite() && w >= 0.0 {
                Ok(w)
            } else {
                Err(Error::InvalidArgument(format!("weight {} is {w} at {:?}", g.label(), s.point)))
            }
        })
        .collect()
}

/// Estimate `mu = |dK|^{-1} sup_{y in K°} int_{dK} |<nu(x), y>| g(x)` from
/// `m` uniform boundary samples. The sup runs over the polar boundary nodes
/// `theta / h_K(theta)`. With `bootstrap_reps > 0` the reported error is the
/// bootstrap root-mean-square error (spread and bias of the maximum);
/// otherwise it is the standard error of the mean at the maximizing node.
pub fn mu_functional(
    body: &ConvexBody,
    g: &WeightFunction,
    m: usize,
    polar_resolution: usize,
    bootstrap_reps: usize,
    seed: u64,
) -> Result<MuEstimate> {
    if m < 1000 {
        return Err(Error::InvalidArgument(format!("mu needs at least 1000 samples, got {m}")));
    }
    let samples = sample_boundary(body, m, seed)?;
    let w = weights(g, &samples)?;
    mu_from_samples(body, &samples, &w, polar_resolution, bootstrap_reps, seed)
}

pub(crate) fn mu_from_samples(
    body: &ConvexBody,
    samples: &[BoundarySample],
    w: &[f64],
    polar_resolution: usize,
    bootstrap_reps: usize,
    seed: u64,
) -> Result<MuEstimate> {
    let d = body.dimension();
    let m = samples.len();
    let nodes: Vec<Vec<f64>> = sphere_grid(d, polar_resolution)
        .into_iter()
        .map(|t| {
            let h = body.support_checked(&t)?;
            Ok(t.iter().map(|x| x / h).collect())
        })
        .collect::<Result<_>>()?;
    // row-major |<nu_m, y>| g_m would be large; recompute per node instead
    let column = |y: &[f64]| -> Vec<f64> {
        samples.iter().zip(w).map(|(s, wm)| s.normal.dot(y).abs() * wm).collect()
    };
    let means: Vec<f64> = nodes.par_iter().map(|y| column(y).iter().sum::<f64>() / m as f64).collect();
    let mut order: Vec<usize> = (0..nodes.len()).collect();
    order.sort_by(|&a, &b| means[b].total_cmp(&means[a]).then(a.cmp(&b)));
    let best = order[0];
    let mu_hat = means[best];
    let (_, se_at_best) = mean_and_se(&column(&nodes[best]));
    let (estimate, bias) = if bootstrap_reps == 0 {
        (Estimate::with_std_error(mu_hat, se_at_best), 0.0)
    } else {
        let top: Vec<Vec<f64>> = order.iter().take(BOOTSTRAP_NODES).map(|&k| column(&nodes[k])).collect();
        let reps: Vec<f64> = (0..bootstrap_reps)
            .into_par_iter()
            .map(|b| {
                let mut r = rng::stream(seed, TAG_BOOT, b as u64);
                let mut counts = vec![0u32; m];
                for _ in 0..m {
                    counts[r.random_range(0..m)] += 1;
                }
                top.iter()
                    .map(|col| col.iter().zip(&counts).map(|(v, c)| v * *c as f64).sum::<f64>() / m as f64)
                    .fold(f64::MIN, f64::max)
            })
            .collect();
        let mean = reps.iter().sum::<f64>() / reps.len() as f64;
        let var = reps.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (reps.len().max(2) - 1) as f64;
        let bias = mean - mu_hat;
        (Estimate::with_std_error(mu_hat, (var + bias * bias).sqrt()), bias)
    };
    Ok(MuEstimate {
        mu_hat: estimate,
        bias,
        argmax: nodes[best].clone(),
        samples: m,
        grid_nodes: nodes.len(),
        bootstrap_reps,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuarterTurnMu {
    /// `4 sup_{theta in dK°} h_K(theta^⊥) / H^1(dK)`.
    pub mu: Estimate,
    /// `sup_{theta in dK°} h_K(theta^⊥)`; equals 1 for quarter-turn symmetric bodies.
    pub sup_factor: f64,
    pub perimeter: f64,
}

/// The planar `mu` for `g = 1` in closed form.
pub fn mu_2d_quarter_turn(body: &ConvexBody) -> Result<QuarterTurnMu> {
    ensure_dim(2, body.dimension())?;
    // theta = u / h(u) on dK°, so h(theta^⊥) = h(u^⊥) / h(u)
    let sup = maximize_on_sphere(2, default_sup_resolution(2), |u| {
        Ok(body.support_checked(&[-u[1], u[0]])? / body.support_checked(u)?)
    })?;
    let per = perimeter_2d(body)?;
    let p = per.perimeter.value;
    let mu = 4.0 * sup.value / p;
    Ok(QuarterTurnMu {
        mu: Estimate::with_tolerance(mu, mu * per.perimeter.tolerance.unwrap_or(0.0) / p),
        sup_factor: sup.value,
        perimeter: p,
    })
}

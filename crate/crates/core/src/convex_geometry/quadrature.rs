use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::constants::sphere_area;
use super::vector::{dot, norm, orthonormal_complement, UnitVector};
use crate::error::{Error, Result};
use crate::estimate::Estimate;
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadratureScheme {
    /// Uniform angles on the circle.
    Trapezoid,
    /// Gauss-Legendre in `cos(polar angle)` on each hemisphere times a uniform azimuth rule.
    ProductGaussLegendre,
    MonteCarlo,
}

/// Nodes and weights for integrals over `S^{d-1}` against `H^{d-1}`.
///
/// Weights sum to `d * omega_d`.
#[derive(Debug, Clone)]
pub struct SphereQuadrature {
    dimension: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    scheme: QuadratureScheme,
    seed: Option<u64>,
    /// Node spacing, used for the nominal quadrature tolerance.
    spacing: f64,
}

pub const DEFAULT_TRAPEZOID_NODES: usize = 2048;
pub const DEFAULT_GL_POLAR_PER_HEMISPHERE: usize = 96;
pub const DEFAULT_GL_AZIMUTH: usize = 512;
pub const DEFAULT_MC_NODES: usize = 200_000;

impl SphereQuadrature {
    pub fn trapezoid(n: usize) -> Result<Self> {
        if n < 8 {
            return Err(Error::InvalidArgument(format!("trapezoid rule needs >= 8 nodes, got {n}")));
        }
        let mut nodes = Vec::with_capacity(2 * n);
        for j in 0..n {
            let phi = 2.0 * PI * j as f64 / n as f64;
            nodes.push(phi.cos());
            nodes.push(phi.sin());
        }
        Ok(SphereQuadrature {
            dimension: 2,
            nodes,
            weights: vec![2.0 * PI / n as f64; n],
            scheme: QuadratureScheme::Trapezoid,
            seed: None,
            spacing: 2.0 * PI / n as f64,
        })
    }

    pub fn product_gauss_legendre(polar_per_hemisphere: usize, azimuth: usize) -> Result<Self> {
        if polar_per_hemisphere < 2 || azimuth < 8 {
            return Err(Error::InvalidArgument("product rule too small".into()));
        }
        let (x, w) = gauss_legendre(polar_per_hemisphere);
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        let dphi = 2.0 * PI / azimuth as f64;
        for hemi in [-1.0, 1.0] {
            for (xi, wi) in x.iter().zip(&w) {
                // map [-1, 1] onto [0, 1] or [-1, 0]
                let z = hemi * 0.5 * (xi + 1.0);
                let wz = 0.5 * wi;
                let r = (1.0 - z * z).max(0.0).sqrt();
                for j in 0..azimuth {
                    let phi = dphi * j as f64;
                    nodes.extend_from_slice(&[r * phi.cos(), r * phi.sin(), z]);
                    weights.push(wz * dphi);
                }
            }
        }
        Ok(SphereQuadrature {
            dimension: 3,
            nodes,
            weights,
            scheme: QuadratureScheme::ProductGaussLegendre,
            seed: None,
            spacing: dphi.max(PI / (2.0 * polar_per_hemisphere as f64)),
        })
    }

    pub fn monte_carlo(d: usize, n: usize, seed: u64) -> Result<Self> {
        if d < 2 || n < 2 {
            return Err(Error::InvalidArgument("Monte Carlo sphere rule needs d >= 2, n >= 2".into()));
        }
        let chunks = rng::chunked(seed, 0x51_4855_4144, n, |r, len| {
            let mut v = Vec::with_capacity(len * d);
            for _ in 0..len {
                v.extend_from_slice(UnitVector::random(d, r).as_slice());
            }
            v
        });
        let nodes: Vec<f64> = chunks.concat();
        Ok(SphereQuadrature {
            dimension: d,
            nodes,
            weights: vec![sphere_area(d) / n as f64; n],
            scheme: QuadratureScheme::MonteCarlo,
            seed: Some(seed),
            spacing: 0.0,
        })
    }

    /// Default scheme for a dimension: trapezoid (d = 2), product
    /// Gauss-Legendre (d = 3), Monte Carlo with the given seed (d >= 4).
    pub fn for_dimension(d: usize, seed: u64) -> Result<Self> {
        match d {
            0 | 1 => Err(Error::InvalidArgument(format!("sphere quadrature needs d >= 2, got {d}"))),
            2 => Self::trapezoid(DEFAULT_TRAPEZOID_NODES),
            3 => Self::product_gauss_legendre(DEFAULT_GL_POLAR_PER_HEMISPHERE, DEFAULT_GL_AZIMUTH),
            _ => Self::monte_carlo(d, DEFAULT_MC_NODES, seed),
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn scheme(&self) -> QuadratureScheme {
        self.scheme
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn node(&self, i: usize) -> &[f64] {
        &self.nodes[i * self.dimension..(i + 1) * self.dimension]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn integrate<F>(&self, f: F) -> Estimate
    where
        F: Fn(&[f64]) -> f64 + Sync,
    {
        self.try_integrate(|t| Ok(f(t))).expect("infallible integrand")
    }

    /// Integrate `f` over the sphere. Deterministic rules report a nominal
    /// tolerance `spacing^2 * |value|` (the kink-limited rate); Monte Carlo
    /// reports a standard error plus a summation rounding tolerance.
    pub fn try_integrate<F>(&self, f: F) -> Result<Estimate>
    where
        F: Fn(&[f64]) -> Result<f64> + Sync,
    {
        let values: Vec<f64> = (0..self.len())
            .into_par_iter()
            .map(|i| f(self.node(i)))
            .collect::<Result<_>>()?;
        let total: f64 = values.iter().zip(&self.weights).map(|(v, w)| v * w).sum();
        Ok(match self.scheme {
            QuadratureScheme::MonteCarlo => {
                let (mean, se) = crate::estimate::mean_and_se(&values);
                let area = sphere_area(self.dimension);
                debug_assert!((mean * area - total).abs() <= 1e-9 * total.abs().max(1.0));
                // the summation rounding bound covers zero-variance integrands
                let rounding = self.len() as f64 * f64::EPSILON * total.abs();
                Estimate { tolerance: Some(rounding), ..Estimate::with_std_error(total, area * se) }
            }
            _ => Estimate::with_tolerance(total, self.spacing * self.spacing * total.abs()),
        })
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` (Newton on `P_n`).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p1 = z;
                p0 = 1.0;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Nested direction grids on `S^{d-1}` used for suprema.
///
/// * d = 2: `resolution` equally spaced angles.
/// * d = 3: `resolution` azimuth steps times `resolution / 2 + 1` polar
///   steps, poles included.
/// * d >= 4: the first `resolution` points of a fixed pseudo-random stream.
///
/// Doubling the resolution (d <= 3) or increasing it (d >= 4) yields a
/// superset of the previous grid.
pub fn sphere_grid(d: usize, resolution: usize) -> Vec<Vec<f64>> {
    match d {
        2 => (0..resolution)
            .map(|j| {
                let phi = 2.0 * PI * j as f64 / resolution as f64;
                vec![phi.cos(), phi.sin()]
            })
            .collect(),
        3 => {
            let polar = (resolution / 2).max(1);
            let mut out = Vec::with_capacity((polar + 1) * resolution);
            for i in 0..=polar {
                let t = PI * i as f64 / polar as f64;
                for j in 0..resolution {
                    let p = 2.0 * PI * j as f64 / resolution as f64;
                    out.push(vec![t.sin() * p.cos(), t.sin() * p.sin(), t.cos()]);
                }
            }
            out
        }
        _ => {
            let mut r = rng::stream(0x6772_6964, d as u64, 0);
            (0..resolution).map(|_| UnitVector::random(d, &mut r).into()).collect()
        }
    }
}

/// Default grid resolution for suprema over the sphere in dimension `d`.
pub fn default_sup_resolution(d: usize) -> usize {
    match d {
        2 => 2048,
        3 => 128,
        _ => 20_000,
    }
}

#[derive(Debug, Clone)]
pub struct SphereMax {
    /// Best value found (grid plus local refinement).
    pub value: f64,
    pub argmax: Vec<f64>,
    /// Maximum over the grid alone.
    pub grid_value: f64,
}

/// Maximize `f` over the unit sphere: grid search followed by local
/// refinement from the best few grid nodes.
pub fn maximize_on_sphere<F>(d: usize, resolution: usize, f: F) -> Result<SphereMax>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    let grid = sphere_grid(d, resolution);
    let vals: Vec<f64> = grid.par_iter().map(|t| f(t)).collect::<Result<_>>()?;
    let mut order: Vec<usize> = (0..vals.len()).collect();
    order.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]).then(a.cmp(&b)));
    let grid_value = vals[order[0]];
    let mut best = (grid_value, grid[order[0]].clone());
    let step = match d {
        2 => 2.0 * PI / resolution as f64,
        3 => 2.0 * PI / resolution as f64,
        _ => (sphere_area(d) / resolution as f64).powf(1.0 / (d as f64 - 1.0)),
    };
    for &start in order.iter().take(4) {
        let (v, x) = if d == 2 {
            refine_circle(&grid[start], step, &f)?
        } else {
            refine_compass(&grid[start], vals[start], step, &f)?
        };
        if v > best.0 {
            best = (v, x);
        }
    }
    Ok(SphereMax { value: best.0, argmax: best.1, grid_value })
}

fn refine_circle<F>(start: &[f64], step: f64, f: &F) -> Result<(f64, Vec<f64>)>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    let phi0 = start[1].atan2(start[0]);
    let eval = |phi: f64| f(&[phi.cos(), phi.sin()]);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (phi0 - step, phi0 + step);
    let mut c = b - g * (b - a);
    let mut e = a + g * (b - a);
    let (mut fc, mut fe) = (eval(c)?, eval(e)?);
    for _ in 0..80 {
        if fc > fe {
            b = e;
            e = c;
            fe = fc;
            c = b - g * (b - a);
            fc = eval(c)?;
        } else {
            a = c;
            c = e;
            fc = fe;
            e = a + g * (b - a);
            fe = eval(e)?;
        }
        if b - a < 1e-13 {
            break;
        }
    }
    let mut best = (f(start)?, start.to_vec());
    for phi in [c, e, 0.5 * (a + b)] {
        let v = eval(phi)?;
        if v > best.0 {
            best = (v, vec![phi.cos(), phi.sin()]);
        }
    }
    Ok(best)
}

fn refine_compass<F>(start: &[f64], v0: f64, step: f64, f: &F) -> Result<(f64, Vec<f64>)>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    let mut x = start.to_vec();
    let mut fx = v0;
    let mut h = step;
    let mut iters = 0;
    while h > 1e-10 && iters < 400 {
        iters += 1;
        let basis = orthonormal_complement(&x);
        let mut improved = false;
        for b in &basis {
            for s in [h, -h] {
                let y: Vec<f64> = x.iter().zip(b).map(|(xi, bi)| xi + s * bi).collect();
                let n = norm(&y);
                let y: Vec<f64> = y.into_iter().map(|v| v / n).collect();
                let fy = f(&y)?;
                if fy > fx {
                    x = y;
                    fx = fy;
                    improved = true;
                    break;
                }
            }
            if improved {
                break;
            }
        }
        if !improved {
            h *= 0.5;
        }
    }
    debug_assert!((dot(&x, &x) - 1.0).abs() < 1e-9);
    Ok((fx, x))
}

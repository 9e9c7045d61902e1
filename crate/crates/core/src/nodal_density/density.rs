use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::measure::{measure_in_ball, CroftonBudget};
use super::PrunedArrangement;
use crate::convex_geometry::{dot, omega, Point};
use crate::error::{ensure_dim, Error, Result};
use crate::estimate::Estimate;
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DensityMethod {
    /// Exact chord lengths (planar arrangements).
    Analytic,
    /// Crofton Monte Carlo.
    Crofton,
    /// Measured density next to the asymptotic `sum 1/s` value.
    Hybrid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityRow {
    pub r: f64,
    /// `inf_x H^{d-1}(set ∩ B(x, r)) / (omega_d r^d)` over the centers.
    pub inf_density: f64,
    pub argmin: Point,
    pub std_err: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhiRow {
    pub r: f64,
    /// `sup_x H^{d-1}(set ∩ B(x, r)) / (omega_{d-1} r^{d-1})` over the centers.
    pub sup_phi_ratio: f64,
    pub argmax: Point,
    pub std_err: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub dimension: usize,
    pub rho: f64,
    pub method: DensityMethod,
    /// `sum 1/s` of the unpruned families.
    pub analytic_density: f64,
    pub rows: Vec<DensityRow>,
    /// Infimum at the largest radius; the tolerance is the change from the
    /// previous radius.
    pub lower_density: Estimate,
    pub note: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub phi_profile: Vec<PhiRow>,
}

impl DensityReport {
    /// CSV with columns `r,inf_density,sup_phi_ratio,std_err`; density rows
    /// first, then profile rows, blank where a column does not apply.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("r,inf_density,sup_phi_ratio,std_err\n");
        for row in &self.rows {
            s.push_str(&format!("{},{},,{}\n", row.r, row.inf_density, row.std_err));
        }
        for row in &self.phi_profile {
            s.push_str(&format!("{},,{},{}\n", row.r, row.sup_phi_ratio, row.std_err));
        }
        s
    }
}

fn method_for(arr: &PrunedArrangement) -> DensityMethod {
    if arr.dimension() == 2 {
        DensityMethod::Analytic
    } else {
        DensityMethod::Crofton
    }
}

fn check_centers(arr: &PrunedArrangement, centers: &[Point]) -> Result<()> {
    if centers.is_empty() {
        return Err(Error::InvalidArgument("no centers given".into()));
    }
    centers.iter().try_for_each(|c| ensure_dim(arr.dimension(), c.len()))
}

/// Measures of `B(c, r)` for every center, each with its own seed.
fn measures(arr: &PrunedArrangement, centers: &[Point], r: f64, budget: CroftonBudget, seed: u64) -> Result<Vec<Estimate>> {
    centers
        .par_iter()
        .enumerate()
        .map(|(k, c)| measure_in_ball(arr, c, r, budget, rng::derive(seed, k as u64)))
        .collect()
}

/// Lower surface density over a finite radius ladder and center set.
pub fn lower_density_estimate(
    arr: &PrunedArrangement,
    radii: &[f64],
    centers: &[Point],
    budget: CroftonBudget,
    seed: u64,
) -> Result<DensityReport> {
    if radii.is_empty() {
        return Err(Error::InvalidArgument("no radii given".into()));
    }
    if radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) || radii.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("radii must be positive and increasing".into()));
    }
    check_centers(arr, centers)?;
    let d = arr.dimension();
    let mut rows = Vec::with_capacity(radii.len());
    for (ri, &r) in radii.iter().enumerate() {
        let vol = omega(d) * r.powi(d as i32);
        let m = measures(arr, centers, r, budget, rng::derive(seed, ri as u64))?;
        let (k, best) = m
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.value.total_cmp(&b.1.value).then(a.0.cmp(&b.0)))
            .expect("centers nonempty");
        rows.push(DensityRow {
            r,
            inf_density: best.value / vol,
            argmin: centers[k].clone(),
            std_err: best.se() / vol,
        });
    }
    let last = rows.last().expect("radii nonempty");
    let trend = if rows.len() >= 2 { last.inf_density - rows[rows.len() - 2].inf_density } else { 0.0 };
    let lower_density = Estimate {
        value: last.inf_density,
        std_error: (last.std_err > 0.0).then_some(last.std_err),
        tolerance: Some(trend.abs()),
        exact: false,
    };
    let note = format!(
        "liminf over r truncated at r = {}; inf over {} centers; change from the previous radius {:+.3e}",
        last.r,
        centers.len(),
        trend
    );
    Ok(DensityReport {
        dimension: d,
        rho: arr.rho(),
        method: method_for(arr),
        analytic_density: super::analytic_density(arr.families()),
        rows,
        lower_density,
        note,
        phi_profile: Vec::new(),
    })
}

/// Points where sheets pile up or pruning leaves edges near `around`: the
/// projections onto the nearest plane of each family, the nearest crossing
/// of each non-parallel pair (at most `max_pairs`), and the exclusion edges
/// around those crossings.
pub fn adversarial_centers(arr: &PrunedArrangement, around: &[f64], max_pairs: usize) -> Vec<Point> {
    let fams = arr.families();
    let mut out = vec![around.to_vec()];
    let nearest_level = |i: usize| -> f64 {
        let f = &fams[i];
        dot(around, f.nu.as_slice()) - f.signed_distance(around)
    };
    for (i, f) in fams.iter().enumerate() {
        let shift = nearest_level(i) - dot(around, f.nu.as_slice());
        out.push(around.iter().zip(f.nu.as_slice()).map(|(x, n)| x + shift * n).collect());
    }
    let mut pairs = 0;
    'outer: for i in 0..fams.len() {
        for j in i + 1..fams.len() {
            if pairs >= max_pairs {
                break 'outer;
            }
            let (a, b) = (fams[i].nu.as_slice(), fams[j].nu.as_slice());
            let c = dot(a, b);
            if c.abs() > super::PARALLEL_COS {
                continue;
            }
            pairs += 1;
            // x = around + l1 a + l2 b with <x, a> = p_i, <x, b> = p_j
            let ri = nearest_level(i) - dot(around, a);
            let rj = nearest_level(j) - dot(around, b);
            let det = 1.0 - c * c;
            let l1 = (ri - c * rj) / det;
            let l2 = (rj - c * ri) / det;
            let cross: Point = around.iter().zip(a.iter().zip(b)).map(|(x, (p, q))| x + l1 * p + l2 * q).collect();
            if arr.rho() > 0.0 {
                let sin = det.sqrt();
                // within plane i, move off plane j (and vice versa) to the edge
                for (u, v) in [(a, b), (b, a)] {
                    let e: Vec<f64> = v.iter().zip(u).map(|(vk, uk)| (vk - c * uk) / sin).collect();
                    for scale in [1.0, 1.0 + 1e-9, 1.5] {
                        let t = scale * arr.rho() / sin;
                        for sgn in [-1.0, 1.0] {
                            out.push(cross.iter().zip(&e).map(|(x, ek)| x + sgn * t * ek).collect());
                        }
                    }
                }
            }
            out.push(cross);
        }
    }
    out
}

/// `sup_x H^{d-1}(set ∩ B(x, r)) / (omega_{d-1} r^{d-1})` for each `r`, over
/// the given centers and their adversarial companions.
pub fn phi_regularity_profile(
    arr: &PrunedArrangement,
    r_list: &[f64],
    centers: &[Point],
    budget: CroftonBudget,
    seed: u64,
) -> Result<Vec<PhiRow>> {
    if r_list.iter().any(|r| !(r.is_finite() && *r > 0.0 && *r < 1.0)) {
        return Err(Error::InvalidArgument("profile radii must lie in (0, 1)".into()));
    }
    check_centers(arr, centers)?;
    let d = arr.dimension();
    let mut all: Vec<Point> = Vec::new();
    for c in centers {
        all.extend(adversarial_centers(arr, c, 64));
    }
    let mut rows = Vec::with_capacity(r_list.len());
    for (ri, &r) in r_list.iter().enumerate() {
        let disk = omega(d - 1) * r.powi(d as i32 - 1);
        let m = measures(arr, &all, r, budget, rng::derive(seed, ri as u64))?;
        let (k, best) = m
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.value.total_cmp(&b.1.value).then(b.0.cmp(&a.0)))
            .expect("centers nonempty");
        rows.push(PhiRow { r, sup_phi_ratio: best.value / disk, argmax: all[k].clone(), std_err: best.se() / disk });
    }
    Ok(rows)
}

/// Regular grid of `n` points per axis on `[-half_width, half_width]^d`.
pub fn center_grid(d: usize, half_width: f64, n: usize) -> Vec<Point> {
    let n = n.max(1);
    let coord = |i: usize| if n == 1 { 0.0 } else { -half_width + 2.0 * half_width * i as f64 / (n - 1) as f64 };
    let total = n.pow(d as u32);
    (0..total)
        .map(|mut idx| {
            (0..d)
                .map(|_| {
                    let c = coord(idx % n);
                    idx /= n;
                    c
                })
                .collect()
        })
        .collect()
}

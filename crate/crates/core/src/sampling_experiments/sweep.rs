use serde::{Deserialize, Serialize};

use super::ratio::{ambient_norm, finish, finite_or_inf, trajectory_sum};
use super::{make_test_function, Shape, TestFunction};
use crate::convex_geometry::{mean_width, sharp_constant, ConvexBody, Exponent, Point, SphereQuadrature, UnitVector};
use crate::error::{Error, Result};
use crate::nodal_density::{HyperplaneFamily, PrunedArrangement};
use crate::rng;
use rand::Rng as _;

const TAG_FAMILIES: u64 = 0x5eed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    /// Spectral margin of the squared-sinc bank.
    pub margin: f64,
    /// Translates added to the bank.
    pub shifts: Vec<Point>,
    /// Default `40 / b_min` per function, capped at [`default_box_cap`].
    pub box_half_width: Option<f64>,
    /// Default `1 / (8 f_max)` per function.
    pub resolution: Option<f64>,
    /// Add, per seed, a modulated function vanishing on the first family.
    pub adversarial: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig { margin: 0.3, shifts: vec![vec![0.3, 0.2], vec![0.5, 0.5]], box_half_width: None, resolution: None, adversarial: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub density: f64,
    /// `density / (A_d W(K))`.
    pub density_ratio: f64,
    pub p: Exponent,
    #[serde(serialize_with = "finite_or_inf")]
    pub max_ratio: f64,
    pub f_id: String,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    /// `A_d W(K)`.
    pub threshold: f64,
    pub label: String,
    pub rows: Vec<SweepRow>,
    pub notes: Vec<String>,
}

impl SweepTable {
    /// CSV with columns `density,p,max_ratio,f_id,seed`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("density,p,max_ratio,f_id,seed\n");
        for r in &self.rows {
            let p = if r.p.0.is_infinite() { "inf".to_string() } else { r.p.0.to_string() };
            let m = if r.max_ratio.is_finite() { r.max_ratio.to_string() } else { "inf".to_string() };
            s.push_str(&format!("{},{},{},{},{}\n", r.density, p, m, r.f_id, r.seed));
        }
        s
    }
}

/// Upper limit on the default box half-width; the trajectory grid grows like
/// `half^{d-1}` per plane and the plane count like `half`.
pub fn default_box_cap(d: usize) -> f64 {
    if d <= 2 { 256.0 } else { 24.0 }
}

/// Families whose first `k + 1` members have total density `densities[k]`:
/// the first has spacing `1 / D_0`, each later one `1 / (D_k - D_{k-1})`.
/// Directions are uniform and offsets uniform within a period.
pub fn nested_families(d: usize, densities: &[f64], seed: u64) -> Result<Vec<HyperplaneFamily>> {
    if densities.is_empty() || densities[0] <= 0.0 || densities.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("densities must be positive and strictly increasing".into()));
    }
    let mut g = rng::stream(seed, TAG_FAMILIES, 0);
    let mut prev = 0.0;
    densities
        .iter()
        .map(|&dk| {
            let s = 1.0 / (dk - prev);
            prev = dk;
            let nu = UnitVector::random(d, &mut g);
            HyperplaneFamily::new(nu, s, s * g.random::<f64>())
        })
        .collect()
}

/// Modulated squared sinc that vanishes on every plane of `fam`, centered
/// midway between two planes, with the widest bandwidth keeping its spectrum
/// inside `(1 - margin) K`. `None` when the carrier alone does not fit.
fn adversarial(body: &ConvexBody, fam: &HyperplaneFamily, margin: f64, id: String) -> Result<Option<TestFunction>> {
    let d = body.dimension();
    let freq = 1.0 / (2.0 * fam.spacing);
    let carrier: Vec<f64> = fam.nu.as_slice().iter().map(|v| freq * v).collect();
    let limit = 1.0 - margin;
    if body.gauge(&carrier)? >= limit {
        return Ok(None);
    }
    let make = |b: f64| TestFunction {
        id: id.clone(),
        amplitude: 1.0,
        center: fam.nu.as_slice().iter().map(|v| (fam.offset + fam.spacing / 2.0) * v).collect(),
        shape: Shape::Modulated { bandwidths: vec![b; d], carrier: carrier.clone() },
    };
    let (mut lo, mut hi) = (0.0, 1.0 / body.gauge(&vec![1.0; d])?);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if make(mid).spectrum_fits(body)? <= limit {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo > 0.0).then(|| make(lo)))
}

/// For each seed, build nested isotropic arrangements (rho = 0) at the given
/// densities and record the largest norm ratio over the bank. Ratios can
/// only fall as density rises, since trajectories are nested and share their
/// quadrature points.
pub fn density_sweep(body: &ConvexBody, p: Exponent, densities: &[f64], config: &SweepConfig, seeds: &[u64]) -> Result<SweepTable> {
    let d = body.dimension();
    let quad = SphereQuadrature::for_dimension(d, 0)?;
    let threshold = sharp_constant(d as i64)? * mean_width(body, &quad)?.value;
    if densities.is_empty() {
        return Err(Error::InvalidArgument("empty density grid".into()));
    }
    let lo = densities.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = densities.iter().cloned().fold(0.0, f64::max);
    if lo > 0.3 * threshold * (1.0 + 1e-9) || hi < 1.5 * threshold * (1.0 - 1e-9) {
        return Err(Error::InvalidArgument(format!(
            "density grid [{lo}, {hi}] must span [0.3, 1.5] x threshold {threshold}"
        )));
    }
    if seeds.is_empty() {
        return Err(Error::InvalidArgument("no seeds given".into()));
    }
    let shifts: Vec<Point> = config.shifts.iter().filter(|s| s.len() == d).cloned().collect();
    let base_bank = make_test_function(body, config.margin, &shifts)?;
    let mut rows = Vec::new();
    let mut notes = Vec::new();
    for &seed in seeds {
        let fams = nested_families(d, densities, seed)?;
        let mut bank = base_bank.clone();
        if config.adversarial {
            match adversarial(body, &fams[0], config.margin, format!("modulated-{seed}"))? {
                Some(f) => bank.push(f),
                None => notes.push(format!("seed {seed}: first family too dense for a vanishing modulated function")),
            }
        }
        // per function: (id, ambient norm, half, h)
        let prepared: Vec<(&TestFunction, f64, f64, f64)> = bank
            .iter()
            .map(|f| {
                let bmin = f.bandwidths().iter().cloned().fold(f64::INFINITY, f64::min);
                let half = config.box_half_width.unwrap_or((40.0 / bmin).min(default_box_cap(d)));
                let h = config.resolution.unwrap_or(1.0 / (8.0 * f.max_frequency()));
                if h > 1.0 / (8.0 * f.max_frequency()) {
                    return Err(Error::ResolutionTooCoarse(format!("h = {h} too coarse for {}", f.id)));
                }
                Ok((f, ambient_norm(f, p.0, half, h), half, h))
            })
            .collect::<Result<_>>()?;
        for (k, &density) in densities.iter().enumerate() {
            let gamma = PrunedArrangement::raw(d, fams[..=k].to_vec())?;
            let mut best = (f64::NEG_INFINITY, String::new());
            for (f, amb, half, h) in &prepared {
                let (sum, _) = trajectory_sum(f, &gamma, p.0, *half, *h);
                let traj = finish(p.0, sum, h.powi(d as i32 - 1));
                let ratio = if traj > 0.0 { amb / traj } else { f64::INFINITY };
                if ratio > best.0 {
                    best = (ratio, f.id.clone());
                }
            }
            rows.push(SweepRow { density, density_ratio: density / threshold, p, max_ratio: best.0, f_id: best.1, seed });
        }
    }
    Ok(SweepTable { threshold, label: "empirical upper envelope".into(), rows, notes })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nested_densities_add_up() {
        let fams = nested_families(2, &[0.5, 1.25, 3.0], 4).unwrap();
        let mut total = 0.0;
        for (f, want) in fams.iter().zip([0.5, 1.25, 3.0]) {
            total += 1.0 / f.spacing;
            assert!((total - want).abs() < 1e-12);
        }
        assert!(nested_families(2, &[1.0, 1.0], 0).is_err());
    }

    #[test]
    fn adversarial_vanishes_on_first_family() {
        let ball = ConvexBody::ball(2, 1.0).unwrap();
        let fam = &nested_families(2, &[1.2], 9).unwrap()[0];
        let f = adversarial(&ball, fam, 0.3, "m".into()).unwrap().unwrap();
        assert!(f.spectrum_fits(&ball).unwrap() <= 0.7 + 1e-9);
        let along = |t: f64, s: f64| {
            let b = fam.nu.complement_basis();
            fam.nu.as_slice().iter().zip(&b[0]).map(|(n, e)| t * n + s * e).collect::<Vec<f64>>()
        };
        for k in -3..=3 {
            assert!(f.shape_value(&along(fam.level(k), 0.7)).abs() < 1e-12);
        }
        let dense = &nested_families(2, &[5.0], 9).unwrap()[0];
        assert!(adversarial(&ball, dense, 0.3, "m".into()).unwrap().is_none());
    }

    #[test]
    fn sweep_is_monotone_and_labelled() {
        let ball = ConvexBody::ball(2, 1.0).unwrap();
        let thr = std::f64::consts::PI;
        let grid: Vec<f64> = [0.3, 0.8, 1.5].iter().map(|c| c * thr).collect();
        let cfg = SweepConfig { box_half_width: Some(30.0), ..SweepConfig::default() };
        let t = density_sweep(&ball, Exponent(2.0), &grid, &cfg, &[1]).unwrap();
        assert_eq!(t.label, "empirical upper envelope");
        assert_eq!(t.rows.len(), 3);
        for w in t.rows.windows(2) {
            assert!(w[1].max_ratio <= w[0].max_ratio);
        }
        assert!(t.to_csv().starts_with("density,p,max_ratio,f_id,seed\n"));
        assert!(density_sweep(&ball, Exponent(2.0), &grid[1..], &cfg, &[1]).is_err());
    }
}

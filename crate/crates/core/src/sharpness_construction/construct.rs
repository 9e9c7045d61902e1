use serde::{Deserialize, Serialize};

use super::mu::{mu_from_samples, weights, MuEstimate};
use super::WeightFunction;
use crate::convex_geometry::{default_sup_resolution, sample_boundary, BodySpec, BoundarySample, ConvexBody, Point};
use crate::error::{Error, Result};
use crate::estimate::Estimate;
use crate::nodal_density::{
    analytic_density, independent_pruning_loss, lower_density_estimate, nodal_arrangement, pruning_loss, CroftonBudget,
    DensityReport, PrunedArrangement,
};
use crate::pw_functions::{spectrum_certificate, CosineProduct, CosineTerm, SpectrumCertificate};
use crate::rng;

const TAG_MU: u64 = 1;
const TAG_POINTS: u64 = 2;
const TAG_LOSS: u64 = 3;
const TAG_DENSITY: u64 = 4;

/// Knobs of [`construct_example`]; `None` fields take their defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConstructionConfig {
    /// Size of the independent sample behind `mu_hat`; default `max(10 N, 10^4)`.
    pub mu_samples: Option<usize>,
    pub polar_resolution: Option<usize>,
    pub certificate_resolution: Option<usize>,
    pub bootstrap_reps: usize,
    pub max_retries: usize,
    pub loss_samples: usize,
    pub density: Option<DensityOptions>,
}

impl Default for ConstructionConfig {
    fn default() -> Self {
        ConstructionConfig {
            mu_samples: None,
            polar_resolution: None,
            certificate_resolution: None,
            bootstrap_reps: 0,
            max_retries: 20,
            loss_samples: 200_000,
            density: None,
        }
    }
}

/// Optional measured lower density of the pruned nodal set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensityOptions {
    pub radii: Vec<f64>,
    pub centers: Vec<Point>,
    #[serde(default)]
    pub budget: CroftonBudget,
}

/// Full record of one construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharpnessRun {
    pub body: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub body_spec: Option<BodySpec>,
    pub weight: String,
    pub n: usize,
    pub delta: f64,
    pub seed: u64,
    /// Attempts whose certificate failed before the recorded one.
    pub retries: usize,
    pub attempt_seed: u64,
    pub samples: Vec<BoundarySample>,
    pub g_values: Vec<f64>,
    pub mu: MuEstimate,
    pub g_mean: f64,
    pub alpha: f64,
    pub f: CosineProduct,
    pub certificate: SpectrumCertificate,
    pub rho: f64,
    pub arrangement: PrunedArrangement,
    /// `sum 1/s_n = 2 alpha g_mean`.
    pub raw_density: Estimate,
    /// Loss for families in general position; the error bar comes from the
    /// Monte Carlo check below.
    pub pruning_loss: Estimate,
    pub pruning_loss_measured: Estimate,
    pub achieved_density: Estimate,
    /// `2 g_mean / mu_hat`.
    pub target: f64,
    pub margin: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub density_report: Option<DensityReport>,
}

/// `min(0.01, s_min / 10)`.
pub fn default_rho(families_min_spacing: f64) -> f64 {
    0.01f64.min(families_min_spacing / 10.0)
}

/// Sample `N` boundary points, estimate `mu` on an independent sample, set
/// `alpha = 1 / (mu_hat + 3 delta)` and `a_n = alpha g(x_n) / N`, certify the
/// spectrum, and prune the nodal set. Failed certificates are retried with
/// fresh seeds up to `max_retries` times.
pub fn construct_example(
    body: &ConvexBody,
    g: &WeightFunction,
    n: usize,
    delta: f64,
    rho: Option<f64>,
    config: &ConstructionConfig,
    seed: u64,
) -> Result<SharpnessRun> {
    if n == 0 {
        return Err(Error::InvalidArgument("N must be >= 1".into()));
    }
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::InvalidArgument(format!("delta must be positive, got {delta}")));
    }
    if let Some(r) = rho {
        if !(r.is_finite() && r >= 0.0) {
            return Err(Error::InvalidArgument(format!("rho must be >= 0, got {r}")));
        }
    }
    let d = body.dimension();
    let m = config.mu_samples.unwrap_or((10 * n).max(10_000));
    let polar = config.polar_resolution.unwrap_or_else(|| default_sup_resolution(d));
    let cert_res = config.certificate_resolution.unwrap_or_else(|| default_sup_resolution(d));
    let mut last_gauge = f64::NAN;
    for attempt in 0..=config.max_retries {
        let s = rng::derive(seed, attempt as u64);
        let mu_samples = sample_boundary(body, m, rng::derive(s, TAG_MU))?;
        let mu_w = weights(g, &mu_samples)?;
        let mu = mu_from_samples(body, &mu_samples, &mu_w, polar, config.bootstrap_reps, rng::derive(s, TAG_MU))?;
        let mu_hat = mu.mu_hat.value;
        if mu_hat <= 0.0 {
            return Err(Error::InvalidArgument("mu_hat is zero: the weight vanishes on the sample".into()));
        }
        let alpha = 1.0 / (mu_hat + 3.0 * delta);
        let samples = sample_boundary(body, n, rng::derive(s, TAG_POINTS))?;
        let g_values = weights(g, &samples)?;
        let terms = samples
            .iter()
            .zip(&g_values)
            .filter(|(_, w)| **w > 0.0)
            .map(|(x, w)| CosineTerm::new(alpha * w / n as f64, x.normal.clone()))
            .collect::<Result<Vec<_>>>()?;
        let f = CosineProduct::new(d, terms)?;
        let certificate = spectrum_certificate(&f, body, cert_res)?;
        if !certificate.pass {
            last_gauge = certificate.gauge_max;
            continue;
        }
        let g_mean = g_values.iter().sum::<f64>() / n as f64;
        let families = nodal_arrangement(&f)?;
        let raw = analytic_density(&families);
        let rho = rho.unwrap_or_else(|| default_rho(families.iter().map(|f| f.spacing).fold(f64::INFINITY, f64::min)));
        let arrangement = PrunedArrangement::new(d, families, rho)?;
        let loss_formula = independent_pruning_loss(&arrangement);
        let measured = pruning_loss(&arrangement, config.loss_samples.max(1), rng::derive(s, TAG_LOSS))?;
        let loss_se = measured.se();
        let achieved = raw - loss_formula;
        let density_report = match &config.density {
            Some(opt) => Some(lower_density_estimate(
                &arrangement,
                &opt.radii,
                &opt.centers,
                opt.budget,
                rng::derive(s, TAG_DENSITY),
            )?),
            None => None,
        };
        let target = 2.0 * g_mean / mu_hat;
        return Ok(SharpnessRun {
            body: body.describe(),
            body_spec: body.to_spec(),
            weight: g.label().to_string(),
            n,
            delta,
            seed,
            retries: attempt,
            attempt_seed: s,
            samples,
            g_values,
            mu,
            g_mean,
            alpha,
            f,
            certificate,
            rho,
            arrangement,
            raw_density: Estimate::with_tolerance(raw, 1e-12 * raw),
            pruning_loss: se_estimate(loss_formula, loss_se),
            pruning_loss_measured: measured,
            achieved_density: se_estimate(achieved, loss_se),
            target,
            margin: achieved - target,
            density_report,
        });
    }
    Err(Error::CertificateFailed { gauge_max: last_gauge, attempts: config.max_retries + 1 })
}

fn se_estimate(value: f64, se: f64) -> Estimate {
    if se > 0.0 {
        Estimate::with_std_error(value, se)
    } else {
        Estimate::exact(value)
    }
}

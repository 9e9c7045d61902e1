use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::construct::{construct_example, ConstructionConfig, SharpnessRun};
use super::mu::{mu_2d_quarter_turn, QuarterTurnMu};
use super::WeightFunction;
use crate::convex_geometry::{mean_width, omega, sharp_constant, ConvexBody, SphereQuadrature};
use crate::error::{ensure_dim, Error, Result};
use crate::estimate::Estimate;
use crate::nodal_density::{analytic_density, nodal_arrangement};
use crate::pw_functions::{spectrum_certificate, CosineProduct};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallSharpnessReport {
    pub dimension: usize,
    pub delta: f64,
    pub achieved_density: Estimate,
    /// `d omega_d / omega_{d-1} - 2 delta`.
    pub target: f64,
    /// `A_d * W(B) = d omega_d / omega_{d-1}`.
    pub ceiling: Estimate,
    pub margin: f64,
    pub ceiling_margin: f64,
    pub meets_target: bool,
    /// `achieved <= ceiling + 3 std_error`.
    pub below_ceiling: bool,
    pub run: SharpnessRun,
}

/// Construction on the unit ball with `g = 1`, measured against the
/// lower target `2 (A_d - delta)` and the ceiling `A_d W(B) = 2 A_d`.
pub fn verify_ball_sharpness(
    d: usize,
    delta: f64,
    n: usize,
    rho: Option<f64>,
    config: &ConstructionConfig,
    seed: u64,
) -> Result<BallSharpnessReport> {
    if !(2..=4).contains(&d) {
        return Err(Error::InvalidArgument(format!("ball sharpness is checked for d in 2..=4, got {d}")));
    }
    let ball = ConvexBody::ball(d, 1.0)?;
    let run = construct_example(&ball, &WeightFunction::default(), n, delta, rho, config, seed)?;
    let ceiling = d as f64 * omega(d) / omega(d - 1);
    let target = ceiling - 2.0 * delta;
    let a = run.achieved_density;
    Ok(BallSharpnessReport {
        dimension: d,
        delta,
        target,
        ceiling: Estimate::with_tolerance(ceiling, 1e-15 * ceiling),
        margin: a.value - target,
        ceiling_margin: ceiling - a.value,
        meets_target: a.value >= target,
        below_ceiling: a.value <= ceiling + 3.0 * a.se(),
        achieved_density: a,
        run,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuarterTurnReport {
    pub delta: f64,
    pub mean_width: Estimate,
    /// `(pi/2 - delta) W(K)`.
    pub target: f64,
    /// `(pi/2) W(K)`.
    pub half_pi_width: f64,
    pub mu: QuarterTurnMu,
    /// `2 / mu`, which should equal `(pi/2) W(K)`.
    pub two_over_mu: f64,
    pub relative_discrepancy: f64,
    pub achieved_density: Estimate,
    pub margin: f64,
    pub run: SharpnessRun,
}

/// Construction on a quarter-turn symmetric planar body with `g = 1`,
/// measured against `(pi/2 - delta) W(K)`.
pub fn verify_2d_sharpness(
    body: &ConvexBody,
    delta: f64,
    n: usize,
    rho: Option<f64>,
    config: &ConstructionConfig,
    seed: u64,
) -> Result<QuarterTurnReport> {
    ensure_dim(2, body.dimension())?;
    if !body.is_quarter_turn_symmetric() {
        return Err(Error::InvalidArgument(format!("{} is not quarter-turn symmetric", body.describe())));
    }
    let w = mean_width(body, &SphereQuadrature::for_dimension(2, 0)?)?;
    let mu = mu_2d_quarter_turn(body)?;
    let run = construct_example(body, &WeightFunction::default(), n, delta, rho, config, seed)?;
    let half_pi_width = PI / 2.0 * w.value;
    let two_over_mu = 2.0 / mu.mu.value;
    let target = (PI / 2.0 - delta) * w.value;
    let a = run.achieved_density;
    Ok(QuarterTurnReport {
        delta,
        mean_width: w,
        target,
        half_pi_width,
        relative_discrepancy: (two_over_mu - half_pi_width).abs() / half_pi_width,
        two_over_mu,
        mu,
        margin: a.value - target,
        achieved_density: a,
        run,
    })
}

/// `A_d W(K) - sum_n 2 a_n` for a cosine product whose spectrum lies in `K`.
pub fn density_bound_margin(f: &CosineProduct, body: &ConvexBody, quad: &SphereQuadrature) -> Result<Estimate> {
    let d = f.dimension();
    ensure_dim(body.dimension(), d)?;
    let cert = spectrum_certificate(f, body, crate::convex_geometry::default_sup_resolution(d))?;
    if !cert.pass {
        return Err(Error::CertificateFailed { gauge_max: cert.gauge_max, attempts: 1 });
    }
    let w = mean_width(body, quad)?;
    let a = sharp_constant(d as i64)?;
    let density = analytic_density(&nodal_arrangement(f)?);
    Ok(Estimate {
        value: a * w.value - density,
        std_error: w.std_error.map(|s| a * s),
        tolerance: w.tolerance.map(|t| a * t),
        exact: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn margin_examples() {
        let ball = ConvexBody::ball(2, 1.0).unwrap();
        let q = SphereQuadrature::for_dimension(2, 0).unwrap();
        let f = CosineProduct::from_pairs(2, &[(1.0, &[1.0, 0.0])]).unwrap();
        let m = density_bound_margin(&f, &ball, &q).unwrap();
        assert!((m.value - (PI - 2.0)).abs() < 1e-9);
        let one = CosineProduct::one(2).unwrap();
        assert!((density_bound_margin(&one, &ball, &q).unwrap().value - PI).abs() < 1e-9);
        let too_big = CosineProduct::from_pairs(2, &[(1.2, &[1.0, 0.0])]).unwrap();
        assert!(matches!(density_bound_margin(&too_big, &ball, &q), Err(Error::CertificateFailed { .. })));
    }

    #[test]
    fn small_ball_run() {
        let rep = verify_ball_sharpness(2, 0.02, 100, None, &ConstructionConfig::default(), 1).unwrap();
        assert!(rep.below_ceiling);
        assert!((rep.ceiling.value - PI).abs() < 1e-15);
        assert!(verify_ball_sharpness(5, 0.02, 10, None, &ConstructionConfig::default(), 1).is_err());
    }

    #[test]
    fn quarter_turn_identity() {
        let body = ConvexBody::lp_ball_2d(4.0).unwrap();
        let rep = verify_2d_sharpness(&body, 0.02, 100, None, &ConstructionConfig::default(), 2).unwrap();
        assert!(rep.relative_discrepancy < 0.01, "{}", rep.relative_discrepancy);
        let skew = ConvexBody::oracle(2, |t| (4.0 * t[0] * t[0] + t[1] * t[1]).sqrt(), true, false).unwrap();
        assert!(verify_2d_sharpness(&skew, 0.02, 10, None, &ConstructionConfig::default(), 0).is_err());
    }
}

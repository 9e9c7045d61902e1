//! Empirical norm ratios `||f||_{L^p(R^d)} / ||f||_{L^p(Gamma)}` for band-limited
//! test functions against hyperplane trajectories, swept across densities.
//!
//! These sweeps give an empirical upper envelope over a finite bank. They
//! illustrate the density threshold; they do not certify it.

mod ratio;
mod sweep;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::convex_geometry::{dot, ConvexBody, Point};
use crate::error::{ensure_dim, Error, Result};

pub use ratio::{sampling_ratio, RatioReport};
pub use sweep::{density_sweep, nested_families, SweepConfig, SweepRow, SweepTable};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Shape {
    /// `prod_i sinc^2(b_i y_i)` with `sinc(t) = sin(pi t) / (pi t)`; its
    /// spectrum is the cube `prod [-b_i, b_i]`.
    SquaredSinc { bandwidths: Vec<f64> },
    /// The squared sinc times `cos(2 pi <carrier, y>)`; spectrum in the cube
    /// shifted by `+-carrier`.
    Modulated { bandwidths: Vec<f64>, carrier: Vec<f64> },
}

/// `amplitude * shape(x - center)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestFunction {
    pub id: String,
    pub amplitude: f64,
    pub center: Point,
    pub shape: Shape,
}

/// Integrability order of `|f|` along each axis (`|f| <= C |y|^{-2}`).
pub const DECAY_ORDER: u32 = 2;

fn sinc(t: f64) -> f64 {
    if t == 0.0 {
        1.0
    } else {
        let x = PI * t;
        x.sin() / x
    }
}

impl TestFunction {
    pub fn dimension(&self) -> usize {
        self.center.len()
    }

    pub fn bandwidths(&self) -> &[f64] {
        match &self.shape {
            Shape::SquaredSinc { bandwidths } | Shape::Modulated { bandwidths, .. } => bandwidths,
        }
    }

    /// Half-widths of the smallest centered cube containing the spectrum.
    pub fn spectral_half_widths(&self) -> Vec<f64> {
        match &self.shape {
            Shape::SquaredSinc { bandwidths } => bandwidths.clone(),
            Shape::Modulated { bandwidths, carrier } => {
                bandwidths.iter().zip(carrier).map(|(b, c)| b + c.abs()).collect()
            }
        }
    }

    /// Largest frequency present along any axis.
    pub fn max_frequency(&self) -> f64 {
        self.spectral_half_widths().into_iter().fold(0.0, f64::max)
    }

    /// Spectrum inside `K`: every spectral point, for the squared sinc the
    /// cube vertices and for the modulated shape the shifted cube vertices,
    /// has gauge at most 1.
    pub fn spectrum_fits(&self, body: &ConvexBody) -> Result<f64> {
        let b = self.bandwidths();
        let shifts: Vec<Vec<f64>> = match &self.shape {
            Shape::SquaredSinc { .. } => vec![vec![0.0; b.len()]],
            Shape::Modulated { carrier, .. } => vec![carrier.clone(), carrier.iter().map(|c| -c).collect()],
        };
        let mut worst = 0.0f64;
        for s in &shifts {
            for v in cube_vertices(b) {
                let p: Vec<f64> = v.iter().zip(s).map(|(x, y)| x + y).collect();
                worst = worst.max(body.gauge(&p)?);
            }
        }
        Ok(worst)
    }

    /// `shape(x - center)`, without the amplitude.
    pub fn shape_value(&self, x: &[f64]) -> f64 {
        let (b, carrier) = match &self.shape {
            Shape::SquaredSinc { bandwidths } => (bandwidths, None),
            Shape::Modulated { bandwidths, carrier } => (bandwidths, Some(carrier)),
        };
        let mut v = 1.0;
        for ((xi, ci), bi) in x.iter().zip(&self.center).zip(b) {
            let s = sinc(bi * (xi - ci));
            v *= s * s;
        }
        if let Some(c) = carrier {
            let y: Vec<f64> = x.iter().zip(&self.center).map(|(a, b)| a - b).collect();
            v *= crate::pw_functions::cos_turns(dot(c, &y));
        }
        v
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        ensure_dim(self.dimension(), x.len())?;
        Ok(self.amplitude * self.shape_value(x))
    }

    /// Same shape, different amplitude.
    pub fn scaled(&self, c: f64) -> Self {
        TestFunction { amplitude: self.amplitude * c, ..self.clone() }
    }
}

fn cube_vertices(half: &[f64]) -> Vec<Vec<f64>> {
    let d = half.len();
    (0..1usize << d)
        .map(|mask| (0..d).map(|i| if mask >> i & 1 == 1 { -half[i] } else { half[i] }).collect())
        .collect()
}

/// Squared-sinc bank for `K`: the isotropic bandwidth
/// `b = (1 - margin) / max_v ||v||_K` over the vertices `v` of `[-1, 1]^d`,
/// centered at the origin and at each shift.
pub fn make_test_function(body: &ConvexBody, margin: f64, shifts: &[Point]) -> Result<Vec<TestFunction>> {
    if !(margin > 0.0 && margin < 1.0) {
        return Err(Error::InvalidArgument(format!("margin must lie in (0, 1), got {margin}")));
    }
    let d = body.dimension();
    let unit = vec![1.0; d];
    let worst = cube_vertices(&unit).iter().map(|v| body.gauge(v)).collect::<Result<Vec<_>>>()?.into_iter().fold(0.0, f64::max);
    let b = (1.0 - margin) / worst;
    if !(b.is_finite() && b > 0.0) {
        return Err(Error::BodyDefinition(format!("no positive bandwidth fits {}", body.describe())));
    }
    let mut out = vec![TestFunction {
        id: "sinc2-0".into(),
        amplitude: 1.0,
        center: vec![0.0; d],
        shape: Shape::SquaredSinc { bandwidths: vec![b; d] },
    }];
    for (k, s) in shifts.iter().enumerate() {
        ensure_dim(d, s.len())?;
        out.push(TestFunction { id: format!("sinc2-{}", k + 1), center: s.clone(), ..out[0].clone() });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube_bandwidth() {
        let cube = ConvexBody::cube(2, 1.0).unwrap();
        let bank = make_test_function(&cube, 0.5, &[]).unwrap();
        assert_eq!(bank[0].bandwidths(), &[0.5, 0.5]);
        assert_eq!(bank[0].spectrum_fits(&cube).unwrap(), 0.5);
    }

    #[test]
    fn ball_bandwidth() {
        let ball = ConvexBody::ball(2, 1.0).unwrap();
        let bank = make_test_function(&ball, 0.3, &[vec![1.0, 2.0]]).unwrap();
        assert!((bank[0].spectrum_fits(&ball).unwrap() - 0.7).abs() < 1e-12);
        assert_eq!(bank.len(), 2);
        assert_eq!(bank[1].evaluate(&[1.0, 2.0]).unwrap(), 1.0);
        assert!(make_test_function(&ball, 1.0, &[]).is_err());
    }

    #[test]
    fn peak_at_center() {
        let f = &make_test_function(&ConvexBody::ball(3, 1.0).unwrap(), 0.2, &[]).unwrap()[0];
        assert_eq!(f.evaluate(&[0.0; 3]).unwrap(), 1.0);
        for x in [[0.3, 0.0, 0.0], [1.0, -2.0, 0.5], [7.0, 7.0, 7.0]] {
            assert!(f.evaluate(&x).unwrap().abs() <= 1.0);
        }
    }
}

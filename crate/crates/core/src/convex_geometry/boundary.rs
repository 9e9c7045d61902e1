use std::f64::consts::PI;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::body::ConvexBody;
use super::constants::sphere_area;
use super::quadrature::SphereQuadrature;
use super::vector::{Point, UnitVector};
use crate::error::{ensure_dim, Error, Result};
use crate::estimate::Estimate;
use crate::rng;

/// Angular resolution of the table behind boundary sampling.
pub const SAMPLING_TABLE_SIZE: usize = 4096;
/// Angular resolution of the table behind perimeters.
pub const PERIMETER_TABLE_SIZE: usize = 8192;

const TAG_BOUNDARY: u64 = 0xb0_0d;

/// One boundary sample: a point of `dK` and the outward unit normal there.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundarySample {
    pub point: Point,
    pub normal: UnitVector,
}

/// Tangent polygon of a planar body at `n` equally spaced normal angles.
///
/// Edge `j` lies on the support line with normal angle `phi_j = 2 pi j / n`
/// and spans the normal angles `[phi_j - pi/n, phi_j + pi/n]`; its length is
/// the integral of `h + h''` over that range for smooth `h`.
#[derive(Debug, Clone)]
pub struct BoundaryTable {
    lengths: Vec<f64>,
    cumulative: Vec<f64>,
}

impl BoundaryTable {
    pub fn new(body: &ConvexBody, n: usize) -> Result<Self> {
        ensure_dim(2, body.dimension())?;
        if n < 8 {
            return Err(Error::InvalidArgument(format!("boundary table needs >= 8 angles, got {n}")));
        }
        let step = 2.0 * PI / n as f64;
        let normals: Vec<[f64; 2]> = (0..n).map(|j| [(j as f64 * step).cos(), (j as f64 * step).sin()]).collect();
        let h: Vec<f64> = normals.iter().map(|t| body.support_checked(t)).collect::<Result<_>>()?;
        // vertex j is where support lines j and j+1 meet
        let det = step.sin();
        let vertices: Vec<[f64; 2]> = (0..n)
            .map(|j| {
                let k = (j + 1) % n;
                let (a, b) = (normals[j], normals[k]);
                [(h[j] * b[1] - h[k] * a[1]) / det, (a[0] * h[k] - b[0] * h[j]) / det]
            })
            .collect();
        let scale = h.iter().cloned().fold(0.0, f64::max);
        let mut lengths = Vec::with_capacity(n);
        for j in 0..n {
            let prev = vertices[(j + n - 1) % n];
            let cur = vertices[j];
            let tangent = [-normals[j][1], normals[j][0]];
            let len = (cur[0] - prev[0]) * tangent[0] + (cur[1] - prev[1]) * tangent[1];
            if len < -1e-9 * scale {
                return Err(Error::BodyDefinition(format!(
                    "support function is not convex near angle {:.6} (negative boundary length {len:e})",
                    j as f64 * step
                )));
            }
            lengths.push(len.max(0.0));
        }
        let mut cumulative = Vec::with_capacity(n + 1);
        let mut acc = 0.0;
        cumulative.push(0.0);
        for l in &lengths {
            acc += l;
            cumulative.push(acc);
        }
        Ok(BoundaryTable { lengths, cumulative })
    }

    pub fn len(&self) -> usize {
        self.lengths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lengths.is_empty()
    }

    /// Total length: the perimeter of the tangent polygon.
    pub fn perimeter(&self) -> f64 {
        self.cumulative[self.lengths.len()]
    }

    /// Normal angle at arclength fraction `u` in `[0, 1)`.
    pub fn angle_at(&self, u: f64) -> f64 {
        let n = self.lengths.len();
        let target = u * self.perimeter();
        let j = self.cumulative.partition_point(|c| *c <= target).saturating_sub(1).min(n - 1);
        let frac = if self.lengths[j] > 0.0 { (target - self.cumulative[j]) / self.lengths[j] } else { 0.5 };
        let step = 2.0 * PI / n as f64;
        (j as f64 - 0.5 + frac.clamp(0.0, 1.0)) * step
    }
}

/// Draw `n` points uniformly (w.r.t. surface measure) from `dK` together
/// with their outward normals. Supported: balls in any dimension and
/// strictly convex planar bodies.
pub fn sample_boundary(body: &ConvexBody, n: usize, seed: u64) -> Result<Vec<BoundarySample>> {
    let d = body.dimension();
    if let super::body::BodyKind::Ball { radius } = body.kind() {
        let r = *radius;
        let chunks = rng::chunked(seed, TAG_BOUNDARY, n, |g, len| {
            (0..len)
                .map(|_| {
                    let normal = UnitVector::random(d, g);
                    BoundarySample { point: normal.as_slice().iter().map(|x| r * x).collect(), normal }
                })
                .collect::<Vec<_>>()
        });
        return Ok(chunks.into_iter().flatten().collect());
    }
    if d != 2 {
        return Err(Error::Unsupported(format!(
            "boundary sampling of {} (only balls are supported for d >= 3)",
            body.describe()
        )));
    }
    if !body.is_strictly_convex() {
        return Err(Error::NotStrictlyConvex(format!(
            "{} cannot be sampled by normal angle",
            body.describe()
        )));
    }
    let table = BoundaryTable::new(body, SAMPLING_TABLE_SIZE)?;
    let chunks = rng::chunked(seed, TAG_BOUNDARY, n, |g, len| {
        (0..len)
            .map(|_| {
                let phi = table.angle_at(g.random::<f64>());
                let normal = UnitVector::from_angle(phi);
                body.boundary_point(&normal).map(|point| BoundarySample { point, normal })
            })
            .collect::<Result<Vec<_>>>()
    });
    let mut out = Vec::with_capacity(n);
    for c in chunks {
        out.extend(c?);
    }
    Ok(out)
}

/// Mean width `W(K) = 2 / |S^{d-1}| * integral of h_K over the sphere`.
pub fn mean_width(body: &ConvexBody, quad: &SphereQuadrature) -> Result<Estimate> {
    ensure_dim(body.dimension(), quad.dimension())?;
    let scale = 2.0 / sphere_area(body.dimension());
    let est = quad.try_integrate(|t| body.support_checked(t))?;
    Ok(Estimate {
        value: scale * est.value,
        std_error: est.std_error.map(|s| scale * s),
        tolerance: est.tolerance.map(|s| scale * s),
        exact: false,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerimeterReport {
    /// Length of `dK`, from the tangent polygon.
    pub perimeter: Estimate,
    /// `pi * W(K)` by the default circle quadrature.
    pub pi_mean_width: Estimate,
    /// `|perimeter - pi W| / perimeter`.
    pub relative_discrepancy: f64,
}

/// Perimeter of a planar body, with the Cauchy cross-check `pi * W(K)`.
pub fn perimeter_2d(body: &ConvexBody) -> Result<PerimeterReport> {
    ensure_dim(2, body.dimension())?;
    let table = BoundaryTable::new(body, PERIMETER_TABLE_SIZE)?;
    let p = table.perimeter();
    let step = 2.0 * PI / PERIMETER_TABLE_SIZE as f64;
    let w = mean_width(body, &SphereQuadrature::for_dimension(2, 0)?)?;
    let pi_w = Estimate {
        value: PI * w.value,
        std_error: None,
        tolerance: w.tolerance.map(|t| PI * t),
        exact: false,
    };
    Ok(PerimeterReport {
        perimeter: Estimate::with_tolerance(p, step * step * p),
        relative_discrepancy: (p - pi_w.value).abs() / p,
        pi_mean_width: pi_w,
    })
}

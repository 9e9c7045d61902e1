use serde::{Deserialize, Serialize};

use super::CosineProduct;
use crate::convex_geometry::{maximize_on_sphere, sphere_grid, BodyKind, ConvexBody};
use crate::error::{ensure_dim, Error, Result};

/// Smallest polar-boundary grid accepted by [`spectrum_certificate`].
pub fn min_certificate_resolution(d: usize) -> usize {
    match d {
        2 => 256,
        3 => 32,
        _ => 1000,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateMethod {
    /// Maximum over the vertices of a polytope `K°`; exact.
    PolarVertices,
    /// Grid maximum followed by local refinement.
    GridRefined,
}

/// Certificate that the spectrum `{sum_n eps_n a_n nu_n}` of a cosine
/// product lies in `K`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumCertificate {
    pub body: String,
    /// `sup_{y in dK°} sum_n a_n |<nu_n, y>|`, the largest gauge of a
    /// spectrum point.
    pub gauge_max: f64,
    /// Maximum over the grid nodes alone (nondecreasing under refinement).
    pub grid_max: f64,
    pub resolution: usize,
    pub method: CertificateMethod,
    pub pass: bool,
}

/// Check `sum_n a_n |<nu_n, y>| <= 1` on the polar boundary
/// `y = theta / h_K(theta)`. By the sign identity
/// `sup_eps sum eps_n c_n = sum |c_n|` this bounds the gauge of every one of
/// the `2^N` spectrum points at once.
pub fn spectrum_certificate(f: &CosineProduct, body: &ConvexBody, resolution: usize) -> Result<SpectrumCertificate> {
    let d = f.dimension();
    ensure_dim(body.dimension(), d)?;
    if resolution < min_certificate_resolution(d) {
        return Err(Error::ResolutionTooCoarse(format!(
            "certificate grid {resolution} is below the minimum {} for d = {d}",
            min_certificate_resolution(d)
        )));
    }
    let ratio = |t: &[f64]| -> Result<f64> { Ok(f.spectral_support(t) / body.support_checked(t)?) };
    let grid_max = sphere_grid(d, resolution)
        .iter()
        .map(|t| ratio(t))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let (gauge_max, method) = match polar_vertices(body) {
        Some(vertices) => {
            let v = vertices.iter().map(|y| f.spectral_support(y)).fold(0.0, f64::max);
            (v, CertificateMethod::PolarVertices)
        }
        None if f.is_empty() => (0.0, CertificateMethod::GridRefined),
        None => {
            let m = maximize_on_sphere(d, resolution, ratio)?;
            (m.value.max(grid_max), CertificateMethod::GridRefined)
        }
    };
    Ok(SpectrumCertificate {
        body: body.describe(),
        gauge_max,
        grid_max,
        resolution,
        method,
        pass: gauge_max <= 1.0,
    })
}

/// Vertices of `K°` when it is a polytope with a closed form.
fn polar_vertices(body: &ConvexBody) -> Option<Vec<Vec<f64>>> {
    let d = body.dimension();
    let cross = |r: f64| -> Vec<Vec<f64>> {
        (0..d)
            .map(|i| {
                let mut v = vec![0.0; d];
                v[i] = 1.0 / r;
                v
            })
            .collect()
    };
    match body.kind() {
        BodyKind::Cube { half_width } => Some(cross(*half_width)),
        BodyKind::LpBall2D { p } if p.is_infinite() => Some(cross(1.0)),
        BodyKind::LpBall2D { p } if *p == 1.0 => Some(vec![vec![1.0, 1.0], vec![1.0, -1.0]]),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(a: f64) -> CosineProduct {
        CosineProduct::from_pairs(2, &[(a, &[1.0, 0.0])]).unwrap()
    }

    #[test]
    fn ball_examples() {
        let ball = ConvexBody::ball(2, 1.0).unwrap();
        let c = spectrum_certificate(&single(1.0), &ball, 1024).unwrap();
        assert!((c.gauge_max - 1.0).abs() < 1e-12 && c.pass);
        let c = spectrum_certificate(&single(1.01), &ball, 1024).unwrap();
        assert!((c.gauge_max - 1.01).abs() < 1e-12 && !c.pass);
    }

    #[test]
    fn cube_example_against_brute_force() {
        let f = CosineProduct::from_pairs(2, &[(0.5, &[1.0, 0.0]), (0.5, &[0.0, 1.0])]).unwrap();
        let cube = ConvexBody::cube(2, 1.0).unwrap();
        let c = spectrum_certificate(&f, &cube, 256).unwrap();
        let brute = f
            .spectrum_points()
            .unwrap()
            .iter()
            .map(|p| cube.gauge(p).unwrap())
            .fold(0.0, f64::max);
        assert_eq!(c.gauge_max, brute);
        assert_eq!(c.gauge_max, 0.5);
        assert!(c.pass);
    }

    #[test]
    fn refined_matches_vertex_formula() {
        // the square as an oracle grid vs. the closed-form polar vertices
        let f = CosineProduct::from_pairs(2, &[(0.3, &[0.6, 0.8]), (0.4, &[-0.28, 0.96])]).unwrap();
        let cube = ConvexBody::cube(2, 1.0).unwrap();
        let n = 1024;
        let vals: Vec<f64> = (0..n)
            .map(|j| {
                let p = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
                p.cos().abs() + p.sin().abs()
            })
            .collect();
        let grid = ConvexBody::angular_grid(vals).unwrap();
        let exact = spectrum_certificate(&f, &cube, 256).unwrap();
        let approx = spectrum_certificate(&f, &grid, 2048).unwrap();
        assert!((exact.gauge_max - approx.gauge_max).abs() < 1e-4, "{exact:?} {approx:?}");
    }

    #[test]
    fn grid_max_is_monotone_under_refinement() {
        let f = CosineProduct::from_pairs(3, &[(0.2, &[0.3, 0.4, 0.5]), (0.3, &[1.0, -1.0, 0.2])]).unwrap();
        let ball = ConvexBody::ball(3, 1.0).unwrap();
        let mut last = 0.0;
        for res in [32, 64, 128] {
            let c = spectrum_certificate(&f, &ball, res).unwrap();
            assert!(c.grid_max >= last && c.gauge_max >= c.grid_max);
            last = c.grid_max;
        }
    }

    #[test]
    fn coarse_grid_rejected() {
        let ball = ConvexBody::ball(2, 1.0).unwrap();
        assert!(matches!(spectrum_certificate(&single(1.0), &ball, 16), Err(Error::ResolutionTooCoarse(_))));
    }
}

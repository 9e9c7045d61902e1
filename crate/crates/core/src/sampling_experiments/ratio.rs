use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};

use super::TestFunction;
use crate::convex_geometry::Exponent;
use crate::error::{ensure_dim, Error, Result};
use crate::nodal_density::PrunedArrangement;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    pub f_id: String,
    pub p: Exponent,
    /// The box is `[-R, R]^d`.
    pub box_half_width: f64,
    pub resolution: f64,
    pub ambient_norm: f64,
    pub trajectory_norm: f64,
    /// `ambient / trajectory`; `"inf"` when `f` vanishes on every quadrature
    /// point of the trajectory.
    #[serde(serialize_with = "finite_or_inf")]
    pub ratio: f64,
    /// Bound on the mass of `|f|^p` outside the box relative to the mass
    /// inside (for `p = inf`: on `sup |f|` outside relative to the peak).
    pub tail_bound: f64,
    pub trajectory_points: usize,
}

pub(crate) fn finite_or_inf<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_str("inf")
    }
}

/// `sum |v|^p` (or the max for `p = inf`) without the grid weight.
fn accumulate(p: f64, vals: impl Iterator<Item = f64>) -> f64 {
    if p.is_infinite() {
        vals.fold(0.0, |m, v| m.max(v.abs()))
    } else {
        vals.map(|v| v.abs().powf(p)).sum()
    }
}

pub(crate) fn finish(p: f64, sum: f64, cell: f64) -> f64 {
    if p.is_infinite() {
        sum
    } else {
        (sum * cell).powf(1.0 / p)
    }
}

/// Shape-only ambient `L^p` norm over the node grid `h Z^d ∩ [-R, R]^d`.
pub(crate) fn ambient_norm(f: &TestFunction, p: f64, half: f64, h: f64) -> f64 {
    let d = f.dimension();
    let k = (half / h).floor() as i64;
    let n = (2 * k + 1) as usize;
    let coord = |i: usize| (i as i64 - k) as f64 * h;
    let total = n.pow(d as u32 - 1);
    // one row along the last axis per task, summed in row order
    let rows: Vec<f64> = (0..total)
        .into_par_iter()
        .map(|mut idx| {
            let mut x = vec![0.0; d];
            for xi in x.iter_mut().take(d - 1) {
                *xi = coord(idx % n);
                idx /= n;
            }
            accumulate(
                p,
                (0..n).map(|j| {
                    x[d - 1] = coord(j);
                    f.shape_value(&x)
                }),
            )
        })
        .collect();
    finish(p, accumulate_rows(p, &rows), h.powi(d as i32))
}

fn accumulate_rows(p: f64, rows: &[f64]) -> f64 {
    if p.is_infinite() {
        rows.iter().cloned().fold(0.0, f64::max)
    } else {
        rows.iter().sum()
    }
}

/// Shape-only trajectory sum: every plane meeting the box carries the node
/// grid `p0 + h Z^{d-1}` (in an orthonormal basis of the plane) anchored at
/// the projection `p0` of the origin, so shared planes share points.
pub(crate) fn trajectory_sum(f: &TestFunction, gamma: &PrunedArrangement, p: f64, half: f64, h: f64) -> (f64, usize) {
    let d = gamma.dimension();
    let reach = half * (d as f64).sqrt();
    let k = (reach / h).floor() as i64;
    let n = (2 * k + 1) as usize;
    let mut planes: Vec<(usize, f64)> = Vec::new();
    for (i, fam) in gamma.families().iter().enumerate() {
        let (k0, k1) = fam.levels_in(-reach, reach);
        planes.extend((k0..=k1).map(|m| (i, fam.level(m))));
    }
    let bases: Vec<Vec<Vec<f64>>> = gamma.families().iter().map(|f| f.nu.complement_basis()).collect();
    let per_plane: Vec<(f64, usize)> = planes
        .par_iter()
        .map(|&(i, level)| {
            let nu = gamma.families()[i].nu.as_slice();
            let basis = &bases[i];
            let mut x = vec![0.0; d];
            let mut acc = 0.0;
            let mut count = 0usize;
            for idx in 0..n.pow(d as u32 - 1) {
                let mut rem = idx;
                for (xk, nk) in x.iter_mut().zip(nu) {
                    *xk = level * nk;
                }
                for b in basis {
                    let u = (rem % n) as i64 - k;
                    rem /= n;
                    let t = u as f64 * h;
                    for (xk, bk) in x.iter_mut().zip(b) {
                        *xk += t * bk;
                    }
                }
                if x.iter().any(|v| v.abs() > half) || gamma.excluded(i, &x) {
                    continue;
                }
                count += 1;
                let v = f.shape_value(&x).abs();
                if p.is_infinite() {
                    acc = f64::max(acc, v);
                } else {
                    acc += v.powf(p);
                }
            }
            (acc, count)
        })
        .collect();
    let sums: Vec<f64> = per_plane.iter().map(|(s, _)| *s).collect();
    (accumulate_rows(p, &sums), per_plane.iter().map(|(_, c)| c).sum())
}

/// Tail bound from `sinc^2(b y) <= min(1, (pi b |y|)^{-2})` and
/// `int sinc^{2p}(b y) dy <= 1 / b`.
fn tail_bound(f: &TestFunction, p: f64, half: f64, ambient_mass: f64) -> f64 {
    let b = f.bandwidths();
    let pi = std::f64::consts::PI;
    let reach: Vec<f64> = f.center.iter().map(|c| (half - c.abs()).max(0.0)).collect();
    if reach.contains(&0.0) {
        return f64::INFINITY;
    }
    if p.is_infinite() {
        return b.iter().zip(&reach).map(|(bi, t)| (pi * bi * t).powi(-2)).fold(0.0, f64::max).min(1.0);
    }
    let total: f64 = (0..b.len())
        .map(|i| {
            let axis = 2.0 * (pi * b[i]).powf(-2.0 * p) * reach[i].powf(1.0 - 2.0 * p) / (2.0 * p - 1.0);
            let others: f64 = (0..b.len()).filter(|j| *j != i).map(|j| 1.0 / b[j]).product();
            axis * others
        })
        .sum();
    total / ambient_mass
}

/// Norm ratio of `f` between `R^d` (truncated to the box) and `Gamma`.
/// Norms are computed for the shape and then scaled by `|amplitude|`, so the
/// ratio does not depend on the amplitude at all.
pub fn sampling_ratio(f: &TestFunction, gamma: &PrunedArrangement, p: Exponent, half: f64, h: f64) -> Result<RatioReport> {
    let d = gamma.dimension();
    ensure_dim(d, f.dimension())?;
    let pv = p.0;
    if pv.is_nan() || pv < 1.0 {
        return Err(Error::InvalidArgument(format!("p must lie in [1, inf], got {pv}")));
    }
    if !(half.is_finite() && half > 0.0 && h.is_finite() && h > 0.0) {
        return Err(Error::InvalidArgument("box half-width and resolution must be positive".into()));
    }
    let fmax = f.max_frequency();
    if h > 1.0 / (8.0 * fmax) {
        return Err(Error::ResolutionTooCoarse(format!(
            "h = {h} exceeds 1/(8 f_max) = {} for {}",
            1.0 / (8.0 * fmax),
            f.id
        )));
    }
    if f.amplitude == 0.0 || !f.amplitude.is_finite() {
        return Err(Error::InvalidArgument("amplitude must be finite and nonzero".into()));
    }
    let amb = ambient_norm(f, pv, half, h);
    let (traj_sum, points) = trajectory_sum(f, gamma, pv, half, h);
    let traj = finish(pv, traj_sum, h.powi(d as i32 - 1));
    let ratio = if traj > 0.0 { amb / traj } else { f64::INFINITY };
    let mass = if pv.is_infinite() { amb } else { amb.powf(pv) };
    let scale = f.amplitude.abs();
    Ok(RatioReport {
        f_id: f.id.clone(),
        p,
        box_half_width: half,
        resolution: h,
        ambient_norm: scale * amb,
        trajectory_norm: scale * traj,
        ratio,
        tail_bound: tail_bound(f, pv, half, mass),
        trajectory_points: points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convex_geometry::{ConvexBody, UnitVector};
    use crate::nodal_density::HyperplaneFamily;
    use crate::sampling_experiments::make_test_function;

    fn bank() -> Vec<TestFunction> {
        make_test_function(&ConvexBody::ball(2, 1.0).unwrap(), 0.3, &[vec![0.5, 0.5]]).unwrap()
    }

    fn family(spacing: f64, offset: f64) -> PrunedArrangement {
        let nu = UnitVector::new(vec![0.6, 0.8]).unwrap();
        PrunedArrangement::raw(2, vec![HyperplaneFamily::new(nu, spacing, offset).unwrap()]).unwrap()
    }

    #[test]
    fn peak_on_trajectory_gives_unit_sup_ratio() {
        let f = &bank()[0];
        let r = sampling_ratio(f, &family(3.0, 0.0), Exponent(f64::INFINITY), 20.0, 0.1).unwrap();
        assert_eq!(r.ratio, 1.0);
        assert!(r.tail_bound.is_finite());
    }

    #[test]
    fn sparser_family_has_larger_ratio() {
        let f = &bank()[0];
        let sparse = sampling_ratio(f, &family(4.0, 0.37), Exponent(2.0), 30.0, 0.2).unwrap();
        let dense = sampling_ratio(f, &family(0.5, 0.37), Exponent(2.0), 30.0, 0.2).unwrap();
        assert!(sparse.ratio > dense.ratio, "{} vs {}", sparse.ratio, dense.ratio);
    }

    #[test]
    fn hole_translate_raises_ratio() {
        let f = &bank()[0];
        let g = TestFunction { center: vec![0.6 * 2.0, 0.8 * 2.0], ..f.clone() };
        let gamma = family(4.0, 0.0);
        let a = sampling_ratio(f, &gamma, Exponent(2.0), 30.0, 0.2).unwrap();
        let b = sampling_ratio(&g, &gamma, Exponent(2.0), 30.0, 0.2).unwrap();
        assert!(b.ratio > a.ratio);
    }

    #[test]
    fn amplitude_does_not_change_ratio() {
        let f = &bank()[1];
        let gamma = family(1.3, 0.2);
        let base = sampling_ratio(f, &gamma, Exponent(1.5), 15.0, 0.2).unwrap();
        for c in [-3.0, 1e-7, 12345.0] {
            let r = sampling_ratio(&f.scaled(c), &gamma, Exponent(1.5), 15.0, 0.2).unwrap();
            assert_eq!(r.ratio.to_bits(), base.ratio.to_bits());
        }
    }

    #[test]
    fn coarse_resolution_rejected() {
        let f = &bank()[0];
        let err = sampling_ratio(f, &family(1.0, 0.0), Exponent(2.0), 10.0, 1.0).unwrap_err();
        assert!(matches!(err, Error::ResolutionTooCoarse(_)));
        assert!(sampling_ratio(f, &family(1.0, 0.0), Exponent(0.5), 10.0, 0.1).is_err());
    }

    #[test]
    fn halving_h_moves_norms_little() {
        let f = &bank()[0];
        let gamma = family(1.0, 0.3);
        let a = sampling_ratio(f, &gamma, Exponent(2.0), 40.0, 0.2).unwrap();
        let b = sampling_ratio(f, &gamma, Exponent(2.0), 40.0, 0.1).unwrap();
        assert!((a.ambient_norm / b.ambient_norm - 1.0).abs() < 0.01);
        assert!((a.trajectory_norm / b.trajectory_norm - 1.0).abs() < 0.01);
    }
}

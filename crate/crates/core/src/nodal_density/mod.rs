//! Nodal sets of cosine products as unions of periodic hyperplane families,
//! optionally pruned near pairwise intersections.

mod density;
mod measure;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::convex_geometry::{dot, UnitVector};
use crate::error::{ensure_dim, Error, Result};
use crate::estimate::Estimate;
use crate::pw_functions::CosineProduct;
use crate::rng;

pub use density::{
    adversarial_centers, center_grid, lower_density_estimate, phi_regularity_profile, DensityMethod, DensityReport, DensityRow,
    PhiRow,
};
pub use measure::{crofton_estimate, measure_in_ball, CroftonBudget, DEFAULT_CROFTON_DIRS, DEFAULT_LINES_PER_DIR};

/// Directions with `|<nu_i, nu_j>|` above this are treated as parallel.
const PARALLEL_COS: f64 = 1.0 - 1e-12;

/// The planes `{x : <x, nu> = offset + k * spacing}`, `k in Z`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HyperplaneFamily {
    pub nu: UnitVector,
    pub spacing: f64,
    pub offset: f64,
}

impl HyperplaneFamily {
    pub fn new(nu: UnitVector, spacing: f64, offset: f64) -> Result<Self> {
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(Error::InvalidArgument(format!("spacing must be positive, got {spacing}")));
        }
        if !offset.is_finite() {
            return Err(Error::InvalidArgument("offset must be finite".into()));
        }
        Ok(HyperplaneFamily { nu, spacing, offset })
    }

    /// Zero set of `cos(2 pi a <x, nu>)`.
    pub fn from_frequency(a: f64, nu: UnitVector) -> Result<Self> {
        Self::new(nu, 1.0 / (2.0 * a), 1.0 / (4.0 * a))
    }

    pub fn dim(&self) -> usize {
        self.nu.dim()
    }

    /// Signed offset of `x` from its nearest plane.
    pub fn signed_distance(&self, x: &[f64]) -> f64 {
        let u = (dot(x, self.nu.as_slice()) - self.offset) / self.spacing;
        (u - u.round()) * self.spacing
    }

    pub fn distance(&self, x: &[f64]) -> f64 {
        self.signed_distance(x).abs()
    }

    /// Position `<x, nu>` of plane `k`.
    pub fn level(&self, k: i64) -> f64 {
        self.offset + k as f64 * self.spacing
    }

    /// Plane indices with level in `[lo, hi]`.
    pub fn levels_in(&self, lo: f64, hi: f64) -> (i64, i64) {
        (((lo - self.offset) / self.spacing).ceil() as i64, ((hi - self.offset) / self.spacing).floor() as i64)
    }

    fn parallel_to(&self, other: &HyperplaneFamily) -> bool {
        self.nu.dot(other.nu.as_slice()).abs() > PARALLEL_COS
    }
}

/// A union of hyperplane families with the `rho`-neighbourhoods of pairwise
/// intersections removed: a point on a plane of family `i` is dropped when it
/// lies within distance `rho` of a plane of another, non-parallel family.
/// `rho = 0` is the raw arrangement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawArrangement")]
pub struct PrunedArrangement {
    dimension: usize,
    families: Vec<HyperplaneFamily>,
    rho: f64,
    /// Set when `rho` exceeds half the smallest spacing.
    large_rho_warning: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawArrangement {
    dimension: usize,
    families: Vec<HyperplaneFamily>,
    #[serde(default)]
    rho: f64,
    #[serde(default)]
    #[allow(dead_code)]
    large_rho_warning: bool,
}

impl TryFrom<RawArrangement> for PrunedArrangement {
    type Error = Error;
    fn try_from(r: RawArrangement) -> Result<Self> {
        PrunedArrangement::new(r.dimension, r.families, r.rho)
    }
}

impl PrunedArrangement {
    pub fn new(dimension: usize, families: Vec<HyperplaneFamily>, rho: f64) -> Result<Self> {
        if dimension < 2 {
            return Err(Error::InvalidArgument(format!("dimension must be >= 2, got {dimension}")));
        }
        for f in &families {
            ensure_dim(dimension, f.dim())?;
            HyperplaneFamily::new(f.nu.clone(), f.spacing, f.offset)?;
        }
        if !(rho.is_finite() && rho >= 0.0) {
            return Err(Error::InvalidArgument(format!("rho must be finite and >= 0, got {rho}")));
        }
        let min_spacing = families.iter().map(|f| f.spacing).fold(f64::INFINITY, f64::min);
        Ok(PrunedArrangement { dimension, large_rho_warning: rho > min_spacing / 2.0, families, rho })
    }

    pub fn raw(dimension: usize, families: Vec<HyperplaneFamily>) -> Result<Self> {
        Self::new(dimension, families, 0.0)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn families(&self) -> &[HyperplaneFamily] {
        &self.families
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn is_raw(&self) -> bool {
        self.rho == 0.0
    }

    pub fn large_rho_warning(&self) -> bool {
        self.large_rho_warning
    }

    pub fn min_spacing(&self) -> f64 {
        self.families.iter().map(|f| f.spacing).fold(f64::INFINITY, f64::min)
    }

    /// Is the point `x`, lying on a plane of family `i`, removed by pruning?
    pub fn excluded(&self, i: usize, x: &[f64]) -> bool {
        if self.rho == 0.0 {
            return false;
        }
        let fi = &self.families[i];
        self.families
            .iter()
            .enumerate()
            .any(|(j, fj)| j != i && !fi.parallel_to(fj) && fj.distance(x) <= self.rho)
    }

    /// Same arrangement with a different exclusion radius.
    pub fn with_rho(&self, rho: f64) -> Result<Self> {
        Self::new(self.dimension, self.families.clone(), rho)
    }
}

pub fn nodal_arrangement(f: &CosineProduct) -> Result<Vec<HyperplaneFamily>> {
    f.terms().iter().map(|t| HyperplaneFamily::from_frequency(t.a, t.nu.clone())).collect()
}

/// Asymptotic surface density `sum_n 1 / s_n` of the raw union.
pub fn analytic_density(families: &[HyperplaneFamily]) -> f64 {
    families.iter().map(|f| 1.0 / f.spacing).sum()
}

pub fn prune(dimension: usize, families: Vec<HyperplaneFamily>, rho: f64) -> Result<PrunedArrangement> {
    PrunedArrangement::new(dimension, families, rho)
}

/// Number of `t in [t0, t1]` where `y + t theta` meets a (kept) plane,
/// counted once per family.
pub fn line_intersection_count(arr: &PrunedArrangement, y: &[f64], theta: &UnitVector, t0: f64, t1: f64) -> Result<u64> {
    ensure_dim(arr.dimension, y.len())?;
    ensure_dim(arr.dimension, theta.dim())?;
    if !(t0.is_finite() && t1.is_finite() && t0 <= t1) {
        return Err(Error::InvalidArgument(format!("bad segment [{t0}, {t1}]")));
    }
    let mut count = 0u64;
    let mut x = vec![0.0; y.len()];
    for (i, f) in arr.families.iter().enumerate() {
        let g = theta.dot(f.nu.as_slice());
        let c0 = dot(y, f.nu.as_slice());
        if g == 0.0 {
            if f.distance(y) == 0.0 {
                return Err(Error::InfiniteCount(format!("the line lies inside a plane of family {i}")));
            }
            continue;
        }
        let (a, b) = (c0 + g * t0, c0 + g * t1);
        let (k0, k1) = f.levels_in(a.min(b), a.max(b));
        if k1 < k0 {
            continue;
        }
        if arr.is_raw() {
            count += (k1 - k0 + 1) as u64;
            continue;
        }
        for k in k0..=k1 {
            let t = (f.level(k) - c0) / g;
            for (xk, (yk, tk)) in x.iter_mut().zip(y.iter().zip(theta.as_slice())) {
                *xk = yk + t * tk;
            }
            if !arr.excluded(i, &x) {
                count += 1;
            }
        }
    }
    Ok(count)
}

const TAG_LOSS: u64 = 0x1055;

/// Surface density removed by pruning, estimated by testing the exclusion
/// predicate at random points of the planes (family chosen with weight
/// `1 / s_i`, position uniform over a large window of the plane).
pub fn pruning_loss(arr: &PrunedArrangement, n_samples: usize, seed: u64) -> Result<Estimate> {
    if arr.is_raw() || arr.families.is_empty() {
        return Ok(Estimate::exact(0.0));
    }
    if n_samples == 0 {
        return Err(Error::InvalidArgument("pruning loss needs samples".into()));
    }
    let d = arr.dimension;
    let total = analytic_density(&arr.families);
    let weights: Vec<f64> = arr.families.iter().map(|f| 1.0 / f.spacing / total).collect();
    let bases: Vec<Vec<Vec<f64>>> = arr.families.iter().map(|f| f.nu.complement_basis()).collect();
    let window = 1e4 * arr.families.iter().map(|f| f.spacing).fold(arr.rho, f64::max);
    let hits: u64 = rng::chunked(seed, TAG_LOSS, n_samples, |g, len| {
        let mut x = vec![0.0; d];
        let mut hits = 0u64;
        for _ in 0..len {
            let mut u = g.random::<f64>();
            let mut i = 0;
            while i + 1 < weights.len() && u >= weights[i] {
                u -= weights[i];
                i += 1;
            }
            let f = &arr.families[i];
            let k = g.random_range(-1_000_000i64..1_000_000);
            let level = f.level(k);
            for (xk, nk) in x.iter_mut().zip(f.nu.as_slice()) {
                *xk = level * nk;
            }
            for b in &bases[i] {
                let z = window * (2.0 * g.random::<f64>() - 1.0);
                for (xk, bk) in x.iter_mut().zip(b) {
                    *xk += z * bk;
                }
            }
            if arr.excluded(i, &x) {
                hits += 1;
            }
        }
        hits
    })
    .into_iter()
    .sum();
    let p = hits as f64 / n_samples as f64;
    Ok(Estimate::with_std_error(total * p, total * (p * (1.0 - p) / n_samples as f64).sqrt()))
}

/// Pruning loss for families in general position: a plane of family `i`
/// keeps the fraction `prod_j (1 - 2 rho / s_j)` over non-parallel `j`.
pub fn independent_pruning_loss(arr: &PrunedArrangement) -> f64 {
    let fams = &arr.families;
    fams.iter()
        .enumerate()
        .map(|(i, fi)| {
            let kept: f64 = fams
                .iter()
                .enumerate()
                .filter(|(j, fj)| *j != i && !fi.parallel_to(fj))
                .map(|(_, fj)| (1.0 - 2.0 * arr.rho / fj.spacing).max(0.0))
                .product();
            (1.0 - kept) / fi.spacing
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(d: usize, i: usize) -> UnitVector {
        UnitVector::axis(d, i)
    }

    #[test]
    fn arrangement_examples() {
        let f = CosineProduct::from_pairs(2, &[(1.0, &[1.0, 0.0])]).unwrap();
        let fam = &nodal_arrangement(&f).unwrap()[0];
        assert_eq!((fam.spacing, fam.offset), (0.5, 0.25));
        assert_eq!(fam.distance(&[0.75, 3.0]), 0.0);
        assert_eq!(fam.distance(&[-0.25, 0.0]), 0.0);
        let half = CosineProduct::from_pairs(2, &[(0.5, &[1.0, 0.0])]).unwrap();
        assert_eq!(nodal_arrangement(&half).unwrap()[0].spacing, 1.0);
        assert!(nodal_arrangement(&CosineProduct::one(2).unwrap()).unwrap().is_empty());
    }

    #[test]
    fn density_examples() {
        let one = HyperplaneFamily::from_frequency(1.0, e(2, 0)).unwrap();
        let two = HyperplaneFamily::from_frequency(1.0, e(2, 1)).unwrap();
        assert_eq!(analytic_density(std::slice::from_ref(&one)), 2.0);
        assert_eq!(analytic_density(&[one, two]), 4.0);
        assert_eq!(analytic_density(&[]), 0.0);
    }

    #[test]
    fn line_count_examples() {
        let fam = HyperplaneFamily::new(e(2, 0), 0.5, 0.25).unwrap();
        let arr = PrunedArrangement::raw(2, vec![fam.clone()]).unwrap();
        assert_eq!(line_intersection_count(&arr, &[0.0, 0.0], &e(2, 0), -1.0, 1.0).unwrap(), 4);
        assert_eq!(line_intersection_count(&arr, &[0.1, 0.0], &e(2, 1), -9.0, 9.0).unwrap(), 0);
        assert!(matches!(
            line_intersection_count(&arr, &[0.25, 0.0], &e(2, 1), -1.0, 1.0),
            Err(Error::InfiniteCount(_))
        ));
        // a transversal through the crossing (1/4, 1/4) loses both hits
        let cross = vec![fam, HyperplaneFamily::new(e(2, 1), 0.5, 0.25).unwrap()];
        let raw = PrunedArrangement::raw(2, cross.clone()).unwrap();
        let pruned = PrunedArrangement::new(2, cross, 0.1).unwrap();
        let diag = UnitVector::normalize(&[1.0, 1.0]).unwrap();
        let y = [0.25, 0.25];
        let a = line_intersection_count(&raw, &y, &diag, -0.1, 0.1).unwrap();
        let b = line_intersection_count(&pruned, &y, &diag, -0.1, 0.1).unwrap();
        assert_eq!((a, b), (2, 0));
    }

    #[test]
    fn rho_warning() {
        let fam = HyperplaneFamily::new(e(2, 0), 0.5, 0.25).unwrap();
        assert!(!PrunedArrangement::new(2, vec![fam.clone()], 0.2).unwrap().large_rho_warning());
        assert!(PrunedArrangement::new(2, vec![fam], 0.3).unwrap().large_rho_warning());
    }

    #[test]
    fn loss_matches_independence_formula() {
        let fams = vec![
            HyperplaneFamily::new(e(2, 0), 1.0, 0.5).unwrap(),
            HyperplaneFamily::new(e(2, 1), 1.0, 0.5).unwrap(),
        ];
        let arr = PrunedArrangement::new(2, fams, 0.1).unwrap();
        // each unit of plane loses 2 rho per crossing family
        assert!((independent_pruning_loss(&arr) - 0.4).abs() < 1e-12);
        let est = pruning_loss(&arr, 200_000, 4).unwrap();
        assert!(est.agrees_with(0.4, 4.0), "{est:?}");
    }

    #[test]
    fn json_round_trip() {
        let arr = PrunedArrangement::new(2, vec![HyperplaneFamily::new(e(2, 0), 0.5, 0.25).unwrap()], 0.01).unwrap();
        let s = serde_json::to_string(&arr).unwrap();
        assert_eq!(serde_json::from_str::<PrunedArrangement>(&s).unwrap(), arr);
    }
}

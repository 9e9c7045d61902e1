use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of `R^d`.
pub type Point = Vec<f64>;

const UNIT_TOL: f64 = 1e-12;

/// A direction on the unit sphere `S^{d-1}`, `d >= 2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct UnitVector(Vec<f64>);

impl UnitVector {
    /// Accepts coordinates whose Euclidean norm is 1 within `1e-12`.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "unit vectors need dimension >= 2, got {}",
                coords.len()
            )));
        }
        let n = norm(&coords);
        if !n.is_finite() || (n - 1.0).abs() > UNIT_TOL {
            return Err(Error::InvalidArgument(format!("vector has norm {n}, not 1")));
        }
        Ok(UnitVector(coords))
    }

    pub fn normalize(v: &[f64]) -> Result<Self> {
        let n = norm(v);
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::InvalidArgument("cannot normalize a zero or non-finite vector".into()));
        }
        UnitVector::new(v.iter().map(|x| x / n).collect())
    }

    /// Coordinate axis `e_i` in dimension `d`.
    pub fn axis(d: usize, i: usize) -> Self {
        assert!(d >= 2 && i < d, "axis {i} out of range for dimension {d}");
        let mut v = vec![0.0; d];
        v[i] = 1.0;
        UnitVector(v)
    }

    /// `(cos phi, sin phi)`.
    pub fn from_angle(phi: f64) -> Self {
        UnitVector(vec![phi.cos(), phi.sin()])
    }

    /// Uniform on the sphere (normalized Gaussian).
    pub fn random<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Self {
        loop {
            let v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
            let n = norm(&v);
            if n > 1e-300 {
                return UnitVector(v.into_iter().map(|x| x / n).collect());
            }
        }
    }

    pub(crate) fn from_raw(v: Vec<f64>) -> Self {
        debug_assert!((norm(&v) - 1.0).abs() < 1e-9);
        UnitVector(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn neg(&self) -> Self {
        UnitVector(self.0.iter().map(|x| -x).collect())
    }

    /// Quarter turn `(x1, x2) -> (-x2, x1)`; planar only.
    pub fn perp(&self) -> Self {
        assert_eq!(self.dim(), 2, "perp is defined in the plane only");
        UnitVector(vec![-self.0[1], self.0[0]])
    }

    pub fn dot(&self, x: &[f64]) -> f64 {
        dot(&self.0, x)
    }

    /// Orthonormal basis of the hyperplane orthogonal to `self`.
    pub fn complement_basis(&self) -> Vec<Vec<f64>> {
        orthonormal_complement(&self.0)
    }
}

impl TryFrom<Vec<f64>> for UnitVector {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        // Serialized vectors go through a text round trip; renormalize small drift.
        let n = norm(&v);
        if (n - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!("vector has norm {n}, not 1")));
        }
        UnitVector::new(v.iter().map(|x| x / n).collect())
    }
}

impl From<UnitVector> for Vec<f64> {
    fn from(u: UnitVector) -> Self {
        u.0
    }
}

impl AsRef<[f64]> for UnitVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `x + t * v`
pub fn axpy(x: &[f64], t: f64, v: &[f64]) -> Point {
    x.iter().zip(v).map(|(a, b)| a + t * b).collect()
}

/// Gram-Schmidt completion of `u` (assumed unit) to an orthonormal basis;
/// returns the `d - 1` vectors orthogonal to `u`.
pub fn orthonormal_complement(u: &[f64]) -> Vec<Vec<f64>> {
    let d = u.len();
    let mut basis: Vec<Vec<f64>> = vec![u.to_vec()];
    // Axes ordered by how little they overlap with u, for conditioning.
    let mut axes: Vec<usize> = (0..d).collect();
    axes.sort_by(|&i, &j| u[i].abs().total_cmp(&u[j].abs()));
    for &i in &axes {
        if basis.len() == d {
            break;
        }
        let mut v = vec![0.0; d];
        v[i] = 1.0;
        for b in &basis {
            let c = dot(&v, b);
            for (vk, bk) in v.iter_mut().zip(b) {
                *vk -= c * bk;
            }
        }
        let n = norm(&v);
        if n > 1e-8 {
            v.iter_mut().for_each(|x| *x /= n);
            basis.push(v);
        }
    }
    basis.remove(0);
    basis
}

/// A uniformly random rotation of `R^d` as a row-major orthogonal matrix.
pub fn random_rotation<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(d);
    while rows.len() < d {
        let mut v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        for r in &rows {
            let c = dot(&v, r);
            for (vk, rk) in v.iter_mut().zip(r) {
                *vk -= c * rk;
            }
        }
        let n = norm(&v);
        if n > 1e-8 {
            rows.push(v.into_iter().map(|x| x / n).collect());
        }
    }
    rows
}

pub fn apply(m: &[Vec<f64>], x: &[f64]) -> Point {
    m.iter().map(|row| dot(row, x)).collect()
}

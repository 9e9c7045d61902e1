//! Cosine-product Paley-Wiener functions `f(x) = prod_n cos(2 pi a_n <x, nu_n>)`.

mod certificate;
mod ronkin;
mod zeros;

use serde::{Deserialize, Serialize};

use crate::convex_geometry::{dot, UnitVector};
use crate::error::{ensure_dim, Error, Result};

pub use certificate::{min_certificate_resolution, spectrum_certificate, CertificateMethod, SpectrumCertificate};
pub use ronkin::{ronkin_estimate, MIN_RONKIN_SAMPLES};
pub use zeros::{jensen_functional, slice_zero_count, slice_zeros, JensenReport};

/// One factor `cos(2 pi a <x, nu>)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CosineTerm {
    pub a: f64,
    pub nu: UnitVector,
}

impl CosineTerm {
    pub fn new(a: f64, nu: UnitVector) -> Result<Self> {
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::InvalidArgument(format!("frequency must be positive and finite, got {a}")));
        }
        Ok(CosineTerm { a, nu })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawProduct")]
pub struct CosineProduct {
    dimension: usize,
    terms: Vec<CosineTerm>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProduct {
    dimension: usize,
    terms: Vec<CosineTerm>,
}

impl TryFrom<RawProduct> for CosineProduct {
    type Error = Error;
    fn try_from(raw: RawProduct) -> Result<Self> {
        CosineProduct::new(raw.dimension, raw.terms)
    }
}

impl CosineProduct {
    pub fn new(dimension: usize, terms: Vec<CosineTerm>) -> Result<Self> {
        if dimension < 2 {
            return Err(Error::InvalidArgument(format!("dimension must be >= 2, got {dimension}")));
        }
        for t in &terms {
            ensure_dim(dimension, t.nu.dim())?;
            CosineTerm::new(t.a, t.nu.clone())?;
        }
        Ok(CosineProduct { dimension, terms })
    }

    /// The constant function 1.
    pub fn one(dimension: usize) -> Result<Self> {
        Self::new(dimension, Vec::new())
    }

    /// Convenience constructor from `(a, nu)` pairs.
    pub fn from_pairs(dimension: usize, pairs: &[(f64, &[f64])]) -> Result<Self> {
        let terms = pairs
            .iter()
            .map(|(a, nu)| CosineTerm::new(*a, UnitVector::normalize(nu)?))
            .collect::<Result<_>>()?;
        Self::new(dimension, terms)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn terms(&self) -> &[CosineTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        ensure_dim(self.dimension, x.len())?;
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|t| cos_turns(t.a * dot(x, t.nu.as_slice()))).product()
    }

    /// `sum_n a_n |<nu_n, y>|`: the largest `<xi, y>` over the spectrum of `f`.
    pub fn spectral_support(&self, y: &[f64]) -> f64 {
        self.terms.iter().map(|t| t.a * dot(y, t.nu.as_slice()).abs()).sum()
    }

    /// Every point `sum_n eps_n a_n nu_n` of the spectrum (`2^N` of them).
    pub fn spectrum_points(&self) -> Result<Vec<Vec<f64>>> {
        if self.terms.len() > 20 {
            return Err(Error::InvalidArgument(format!(
                "refusing to enumerate 2^{} spectrum points",
                self.terms.len()
            )));
        }
        let n = self.terms.len();
        Ok((0..1usize << n)
            .map(|mask| {
                let mut p = vec![0.0; self.dimension];
                for (i, t) in self.terms.iter().enumerate() {
                    let s = if mask >> i & 1 == 1 { -t.a } else { t.a };
                    for (pk, vk) in p.iter_mut().zip(t.nu.as_slice()) {
                        *pk += s * vk;
                    }
                }
                p
            })
            .collect())
    }
}

/// `cos(2 pi u)`, reduced by quarter turns so that zeros at `u in 1/4 + Z/2`
/// are exact.
pub fn cos_turns(u: f64) -> f64 {
    let r = u - u.round();
    let k = (4.0 * r).round();
    let t = 2.0 * std::f64::consts::PI * (r - k / 4.0);
    match k as i64 {
        0 => t.cos(),
        1 => -t.sin(),
        -1 => t.sin(),
        _ => -t.cos(),
    }
}

pub fn evaluate(f: &CosineProduct, x: &[f64]) -> Result<f64> {
    f.evaluate(x)
}

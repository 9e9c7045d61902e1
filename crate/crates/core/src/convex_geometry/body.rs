use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::quadrature::{default_sup_resolution, maximize_on_sphere, sphere_grid};
use super::vector::{dot, norm, Point, UnitVector};
use crate::error::{ensure_dim, Error, Result};

/// Finite-difference step for gradients of oracle support functions.
pub const FD_STEP: f64 = 1e-6;

type SupportFn = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// A user-supplied support function `theta -> h(theta)` on unit vectors.
#[derive(Clone)]
pub struct SupportOracle {
    h: Arc<SupportFn>,
    /// Declared `C^1` (so the body is strictly convex); enables boundary points.
    pub smooth: bool,
}

impl fmt::Debug for SupportOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SupportOracle").field("smooth", &self.smooth).finish_non_exhaustive()
    }
}

#[derive(Debug, Clone)]
pub enum BodyKind {
    Ball { radius: f64 },
    Cube { half_width: f64 },
    /// Unit ball of the `l^p` norm in the plane, `p` in `[1, inf]`.
    LpBall2D { p: f64 },
    /// Planar support function tabulated at `n` equally spaced angles and
    /// interpolated linearly in angle.
    AngularGrid { values: Vec<f64> },
    Oracle(SupportOracle),
}

/// An origin-symmetric convex body with nonempty interior, described by its
/// support function.
#[derive(Debug, Clone)]
pub struct ConvexBody {
    dimension: usize,
    kind: BodyKind,
    quarter_turn_symmetric: bool,
    gauge_resolution: usize,
}

impl ConvexBody {
    pub fn ball(d: usize, radius: f64) -> Result<Self> {
        check_dim(d)?;
        check_positive("radius", radius)?;
        Ok(Self::from_parts(d, BodyKind::Ball { radius }, d == 2))
    }

    pub fn cube(d: usize, half_width: f64) -> Result<Self> {
        check_dim(d)?;
        check_positive("half width", half_width)?;
        Ok(Self::from_parts(d, BodyKind::Cube { half_width }, d == 2))
    }

    /// `p = f64::INFINITY` gives the square `[-1, 1]^2`.
    pub fn lp_ball_2d(p: f64) -> Result<Self> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::InvalidArgument(format!("lp-ball needs p >= 1, got {p}")));
        }
        Ok(Self::from_parts(2, BodyKind::LpBall2D { p }, true))
    }

    pub fn angular_grid(values: Vec<f64>) -> Result<Self> {
        let n = values.len();
        if n < 8 || !n.is_multiple_of(2) {
            return Err(Error::BodyDefinition(format!(
                "angular grid needs an even number (>= 8) of values, got {n}"
            )));
        }
        let scale = values.iter().cloned().fold(0.0, f64::max);
        for (j, &v) in values.iter().enumerate() {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::BodyDefinition(format!("grid value {j} is {v}; must be positive")));
            }
            if (v - values[(j + n / 2) % n]).abs() > 1e-12 * scale {
                return Err(Error::BodyDefinition(format!("grid is not origin symmetric at index {j}")));
            }
        }
        let quarter = n.is_multiple_of(4)
            && (0..n).all(|j| (values[j] - values[(j + n / 4) % n]).abs() <= 1e-12 * scale);
        Ok(Self::from_parts(2, BodyKind::AngularGrid { values }, quarter))
    }

    /// Wrap a support function. Positivity and origin symmetry are checked on
    /// a direction grid, as is quarter-turn symmetry when claimed (d = 2).
    pub fn oracle<F>(d: usize, h: F, smooth: bool, quarter_turn_symmetric: bool) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        check_dim(d)?;
        if quarter_turn_symmetric && d != 2 {
            return Err(Error::InvalidArgument("quarter-turn symmetry is a planar notion".into()));
        }
        let body = Self::from_parts(
            d,
            BodyKind::Oracle(SupportOracle { h: Arc::new(h), smooth }),
            quarter_turn_symmetric,
        );
        let grid = sphere_grid(d, if d == 2 { 720 } else if d == 3 { 48 } else { 2000 });
        for t in &grid {
            let u = UnitVector::from_raw(t.clone());
            let a = body.support_checked(u.as_slice())?;
            let b = body.support_checked(u.neg().as_slice())?;
            if (a - b).abs() > 1e-9 * a.max(b) {
                return Err(Error::BodyDefinition(format!(
                    "support is not origin symmetric: h({t:?}) = {a}, h(-theta) = {b}"
                )));
            }
            if quarter_turn_symmetric {
                let c = body.support_checked(u.perp().as_slice())?;
                if (a - c).abs() > 1e-9 * a.max(c) {
                    return Err(Error::BodyDefinition(format!(
                        "support is not quarter-turn symmetric at {t:?}"
                    )));
                }
            }
        }
        Ok(body)
    }

    fn from_parts(dimension: usize, kind: BodyKind, quarter: bool) -> Self {
        ConvexBody {
            dimension,
            kind,
            quarter_turn_symmetric: quarter,
            gauge_resolution: default_sup_resolution(dimension),
        }
    }

    /// Grid resolution used by the gauge of oracle-type bodies.
    pub fn with_gauge_resolution(mut self, resolution: usize) -> Self {
        self.gauge_resolution = resolution.max(8);
        self
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn kind(&self) -> &BodyKind {
        &self.kind
    }

    pub fn is_origin_symmetric(&self) -> bool {
        true
    }

    pub fn is_quarter_turn_symmetric(&self) -> bool {
        self.quarter_turn_symmetric
    }

    /// Whether boundary points (gradients of `h`) are available.
    pub fn is_strictly_convex(&self) -> bool {
        match &self.kind {
            BodyKind::Ball { .. } => true,
            BodyKind::Cube { .. } | BodyKind::AngularGrid { .. } => false,
            BodyKind::LpBall2D { p } => *p > 1.0 && p.is_finite(),
            BodyKind::Oracle(o) => o.smooth,
        }
    }

    pub fn support(&self, theta: &UnitVector) -> Result<f64> {
        ensure_dim(self.dimension, theta.dim())?;
        Ok(self.support_unchecked(theta.as_slice()))
    }

    /// Support function at a unit vector given as a raw slice. Oracle
    /// failures surface as NaN; use [`ConvexBody::support`] for checked calls.
    pub(crate) fn support_unchecked(&self, t: &[f64]) -> f64 {
        match &self.kind {
            BodyKind::Ball { radius } => *radius,
            BodyKind::Cube { half_width } => half_width * t.iter().map(|x| x.abs()).sum::<f64>(),
            BodyKind::LpBall2D { p } => lq_norm(t, conjugate(*p)),
            BodyKind::AngularGrid { values } => {
                let n = values.len();
                let mut phi = t[1].atan2(t[0]);
                if phi < 0.0 {
                    phi += 2.0 * PI;
                }
                let pos = phi / (2.0 * PI) * n as f64;
                let j = (pos.floor() as usize).min(n - 1);
                let frac = pos - j as f64;
                values[j] * (1.0 - frac) + values[(j + 1) % n] * frac
            }
            BodyKind::Oracle(o) => {
                let v = (o.h)(t);
                if v.is_finite() && v > 0.0 {
                    v
                } else {
                    f64::NAN
                }
            }
        }
    }

    pub(crate) fn support_checked(&self, t: &[f64]) -> Result<f64> {
        let v = self.support_unchecked(t);
        if v.is_finite() && v > 0.0 {
            Ok(v)
        } else {
            Err(Error::BodyDefinition(format!("support function is not positive and finite at {t:?}")))
        }
    }

    /// Minkowski functional `||x||_K = inf { l >= 0 : x in l K }`.
    pub fn gauge(&self, x: &[f64]) -> Result<f64> {
        ensure_dim(self.dimension, x.len())?;
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("gauge of a non-finite point".into()));
        }
        Ok(match &self.kind {
            BodyKind::Ball { radius } => norm(x) / radius,
            BodyKind::Cube { half_width } => x.iter().fold(0.0f64, |m, v| m.max(v.abs())) / half_width,
            BodyKind::LpBall2D { p } => lq_norm(x, *p),
            _ => {
                if x.iter().all(|v| *v == 0.0) {
                    return Ok(0.0);
                }
                // ||x||_K = sup_theta <x, theta> / h(theta)
                maximize_on_sphere(self.dimension, self.gauge_resolution, |t| {
                    Ok(dot(x, t) / self.support_checked(t)?)
                })?
                .value
                .max(0.0)
            }
        })
    }

    /// Gradient of `h` at `theta`: the boundary point with outward normal `theta`.
    pub fn boundary_point(&self, theta: &UnitVector) -> Result<Point> {
        ensure_dim(self.dimension, theta.dim())?;
        let t = theta.as_slice();
        match &self.kind {
            BodyKind::Ball { radius } => Ok(t.iter().map(|x| radius * x).collect()),
            BodyKind::LpBall2D { p } if *p > 1.0 && p.is_finite() => Ok(lp_gradient(t, *p)),
            BodyKind::Oracle(o) if o.smooth => self.fd_gradient(t),
            _ => Err(Error::NotStrictlyConvex(format!("{} has corners or flat faces", self.describe()))),
        }
    }

    fn fd_gradient(&self, t: &[f64]) -> Result<Point> {
        // Homogeneous extension H(v) = |v| h(v / |v|).
        let ext = |v: &[f64]| -> Result<f64> {
            let n = norm(v);
            let u: Vec<f64> = v.iter().map(|x| x / n).collect();
            Ok(n * self.support_checked(&u)?)
        };
        let h0 = self.support_checked(t)?;
        let mut g: Vec<f64> = t.iter().map(|x| h0 * x).collect();
        for b in super::vector::orthonormal_complement(t) {
            let plus: Vec<f64> = t.iter().zip(&b).map(|(x, y)| x + FD_STEP * y).collect();
            let minus: Vec<f64> = t.iter().zip(&b).map(|(x, y)| x - FD_STEP * y).collect();
            let deriv = (ext(&plus)? - ext(&minus)?) / (2.0 * FD_STEP);
            for (gi, bi) in g.iter_mut().zip(&b) {
                *gi += deriv * bi;
            }
        }
        Ok(g)
    }

    pub fn describe(&self) -> String {
        match &self.kind {
            BodyKind::Ball { radius } => format!("ball(d={}, R={radius})", self.dimension),
            BodyKind::Cube { half_width } => format!("cube(d={}, half_width={half_width})", self.dimension),
            BodyKind::LpBall2D { p } => format!("lp2d(p={p})"),
            BodyKind::AngularGrid { values } => format!("oracle-grid({} values)", values.len()),
            BodyKind::Oracle(_) => format!("oracle(d={})", self.dimension),
        }
    }

    /// Serializable description; `None` for callable oracles.
    pub fn to_spec(&self) -> Option<BodySpec> {
        let d = self.dimension;
        Some(match &self.kind {
            BodyKind::Ball { radius } => BodySpec::Ball { dimension: d, radius: *radius },
            BodyKind::Cube { half_width } => BodySpec::Cube { dimension: d, half_width: *half_width },
            BodyKind::LpBall2D { p } => BodySpec::Lp2d { dimension: 2, p: Exponent(*p) },
            BodyKind::AngularGrid { values } => BodySpec::OracleGrid { dimension: 2, grid: values.clone() },
            BodyKind::Oracle(_) => return None,
        })
    }
}

pub fn support_function(body: &ConvexBody, theta: &UnitVector) -> Result<f64> {
    body.support(theta)
}

pub fn gauge(body: &ConvexBody, x: &[f64]) -> Result<f64> {
    body.gauge(x)
}

pub fn boundary_point(body: &ConvexBody, theta: &UnitVector) -> Result<Point> {
    body.boundary_point(theta)
}

/// JSON body description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum BodySpec {
    Ball { dimension: usize, radius: f64 },
    Cube { dimension: usize, half_width: f64 },
    Lp2d {
        #[serde(default = "two")]
        dimension: usize,
        p: Exponent,
    },
    OracleGrid {
        #[serde(default = "two")]
        dimension: usize,
        grid: Vec<f64>,
    },
}

fn two() -> usize {
    2
}

impl BodySpec {
    pub fn build(&self) -> Result<ConvexBody> {
        match self {
            BodySpec::Ball { dimension, radius } => ConvexBody::ball(*dimension, *radius),
            BodySpec::Cube { dimension, half_width } => ConvexBody::cube(*dimension, *half_width),
            BodySpec::Lp2d { dimension, p } => {
                ensure_dim(2, *dimension)?;
                ConvexBody::lp_ball_2d(p.0)
            }
            BodySpec::OracleGrid { dimension, grid } => {
                ensure_dim(2, *dimension)?;
                ConvexBody::angular_grid(grid.clone())
            }
        }
    }
}

/// An `l^p` exponent; serialized as a number, or `"inf"` for infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponent(pub f64);

impl Serialize for Exponent {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(x) => Ok(Exponent(x)),
            Raw::Text(s) if matches!(s.to_ascii_lowercase().as_str(), "inf" | "infinity") => {
                Ok(Exponent(f64::INFINITY))
            }
            Raw::Text(s) => Err(serde::de::Error::custom(format!("invalid exponent {s:?}"))),
        }
    }
}

fn check_dim(d: usize) -> Result<()> {
    if d < 2 {
        Err(Error::InvalidArgument(format!("bodies need dimension >= 2, got {d}")))
    } else {
        Ok(())
    }
}

fn check_positive(what: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::BodyDefinition(format!("{what} must be positive and finite, got {v}")))
    }
}

/// Hölder conjugate `p / (p - 1)`.
pub(crate) fn conjugate(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

/// `l^q` norm, scaled by the max entry so large `q` does not underflow.
pub(crate) fn lq_norm(v: &[f64], q: f64) -> f64 {
    let m = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if q.is_infinite() || m == 0.0 {
        return m;
    }
    if q == 1.0 {
        return v.iter().map(|x| x.abs()).sum();
    }
    m * v.iter().map(|x| (x.abs() / m).powf(q)).sum::<f64>().powf(1.0 / q)
}

/// Gradient of `theta -> ||theta||_q` for `1 < p < inf`.
fn lp_gradient(t: &[f64], p: f64) -> Point {
    let q = conjugate(p);
    let h = lq_norm(t, q);
    t.iter().map(|x| x.signum() * (x.abs() / h).powf(q - 1.0)).collect()
}

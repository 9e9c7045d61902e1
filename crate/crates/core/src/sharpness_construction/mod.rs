//! The randomized cosine-product construction whose nodal set nearly
//! attains the density threshold `A_d * W(K)`.

mod construct;
mod mu;
mod verify;

use std::fmt;
use std::sync::Arc;

pub use construct::{construct_example, default_rho, ConstructionConfig, DensityOptions, SharpnessRun};
pub use mu::{mu_2d_quarter_turn, mu_functional, MuEstimate, QuarterTurnMu};
pub use verify::{
    density_bound_margin, verify_2d_sharpness, verify_ball_sharpness, BallSharpnessReport, QuarterTurnReport,
};

type WeightFn = dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync;

/// A weight `g : dK -> [0, inf)`, evaluated on (point, outward normal).
#[derive(Clone)]
pub struct WeightFunction {
    label: String,
    g: Arc<WeightFn>,
    sup: Option<f64>,
}

impl fmt::Debug for WeightFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WeightFunction").field("label", &self.label).field("sup", &self.sup).finish()
    }
}

impl Default for WeightFunction {
    fn default() -> Self {
        Self::constant(1.0)
    }
}

impl WeightFunction {
    pub fn constant(c: f64) -> Self {
        WeightFunction { label: format!("constant({c})"), g: Arc::new(move |_, _| c), sup: Some(c) }
    }

    /// `sup` is the declared bound of a bounded weight.
    pub fn new<F>(label: impl Into<String>, g: F, sup: Option<f64>) -> Self
    where
        F: Fn(&[f64], &[f64]) -> f64 + Send + Sync + 'static,
    {
        WeightFunction { label: label.into(), g: Arc::new(g), sup }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn sup(&self) -> Option<f64> {
        self.sup
    }

    pub fn eval(&self, point: &[f64], normal: &[f64]) -> f64 {
        (self.g)(point, normal)
    }
}

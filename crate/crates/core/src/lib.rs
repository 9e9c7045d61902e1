//! Numerical machinery around sharp surface-density thresholds for mobile
//! sampling of Paley-Wiener functions.
//!
//! The crate is organised bottom-up:
//!
//! * [`convex_geometry`]: convex bodies given by their support function,
//!   sphere quadrature, mean width, gauges, boundary sampling.
//! * [`pw_functions`]: cosine-product Paley-Wiener functions, spectrum
//!   certificates, exact slice zero counting, the Jensen and Ronkin checks.
//! * [`nodal_density`]: nodal sets as hyperplane arrangements, intersection
//!   pruning, Crofton estimates, lower densities and regularity profiles.
//! * [`sharpness_construction`]: the randomized cosine-product construction
//!   whose nodal density approaches `A_d * W(K)`.
//! * [`sampling_experiments`]: empirical norm-ratio sweeps across the
//!   density threshold.
//!
//! Every randomized routine takes an explicit `u64` seed and is
//! bit-reproducible regardless of the rayon thread count.

pub mod convex_geometry;
pub mod error;
pub mod estimate;
pub mod nodal_density;
pub mod pw_functions;
pub mod rng;
pub mod sampling_experiments;
pub mod sharpness_construction;

pub use convex_geometry::{
    boundary_point, gauge, mean_width, perimeter_2d, sample_boundary, sharp_constant,
    support_function, unit_ball_volume, BodyKind, BodySpec, ConvexBody, Point, SphereQuadrature,
    UnitVector,
};
pub use error::{Error, Result};
pub use estimate::Estimate;
pub use nodal_density::{HyperplaneFamily, PrunedArrangement};
pub use pw_functions::{CosineProduct, CosineTerm, SpectrumCertificate};
